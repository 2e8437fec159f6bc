//! Binary fixed-point reals and complex numbers on top of `BigInt`.
//!
//! A value is `mantissa * 2^-bits`. Root refinement and embedding evaluation run
//! here so the working precision is a plain integer parameter and can be doubled
//! on demand.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixed {
    mant: BigInt,
    bits: u32,
}

impl Fixed {
    pub fn zero(bits: u32) -> Self {
        Fixed { mant: BigInt::zero(), bits }
    }

    pub fn from_int(value: &BigInt, bits: u32) -> Self {
        Fixed { mant: value << bits, bits }
    }

    /// Exact conversion of a finite `f64` (rounded only when `bits` is too small
    /// to hold its lowest set bit).
    pub fn from_f64(x: f64, bits: u32) -> Self {
        assert!(x.is_finite(), "non-finite value {x}");
        if x == 0.0 {
            return Fixed::zero(bits);
        }
        let raw = x.to_bits();
        let negative = raw >> 63 == 1;
        let biased = ((raw >> 52) & 0x7ff) as i64;
        let frac = raw & ((1u64 << 52) - 1);
        let (mant, exp) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        let shift = exp + bits as i64;
        let mut m = BigInt::from(mant);
        if shift >= 0 {
            m <<= shift as usize;
        } else {
            m = round_shr(&m, (-shift) as u32);
        }
        if negative {
            m = -m;
        }
        Fixed { mant: m, bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn to_f64(&self) -> f64 {
        let len = self.mant.bits() as i64;
        if len == 0 {
            return 0.0;
        }
        let excess = (len - 62).max(0);
        let top = (&self.mant >> excess as usize).to_f64().unwrap_or(f64::NAN);
        top * pow2(excess - self.bits as i64)
    }

    pub fn abs(&self) -> Fixed {
        Fixed { mant: self.mant.abs(), bits: self.bits }
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    /// Truncating division.
    pub fn div(&self, rhs: &Fixed) -> Fixed {
        debug_assert_eq!(self.bits, rhs.bits);
        Fixed { mant: (&self.mant << self.bits) / &rhs.mant, bits: self.bits }
    }

    /// Re-express at a different precision.
    pub fn with_bits(&self, bits: u32) -> Fixed {
        let mant = if bits >= self.bits {
            &self.mant << (bits - self.bits)
        } else {
            round_shr(&self.mant, self.bits - bits)
        };
        Fixed { mant, bits }
    }

    /// Rounds to the nearest integer.
    pub fn round(&self) -> BigInt {
        round_shr(&self.mant, self.bits)
    }
}

fn pow2(e: i64) -> f64 {
    // split so intermediate factors stay in range
    let mut out = 1.0f64;
    let mut e = e;
    while e > 1000 {
        out *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        out *= 2f64.powi(-1000);
        e += 1000;
    }
    out * 2f64.powi(e as i32)
}

fn round_shr(m: &BigInt, shift: u32) -> BigInt {
    if shift == 0 {
        return m.clone();
    }
    let half = BigInt::from(1) << (shift - 1);
    (m + half) >> shift
}

impl Add for &Fixed {
    type Output = Fixed;
    fn add(self, rhs: &Fixed) -> Fixed {
        debug_assert_eq!(self.bits, rhs.bits);
        Fixed { mant: &self.mant + &rhs.mant, bits: self.bits }
    }
}

impl Sub for &Fixed {
    type Output = Fixed;
    fn sub(self, rhs: &Fixed) -> Fixed {
        debug_assert_eq!(self.bits, rhs.bits);
        Fixed { mant: &self.mant - &rhs.mant, bits: self.bits }
    }
}

impl Mul for &Fixed {
    type Output = Fixed;
    fn mul(self, rhs: &Fixed) -> Fixed {
        debug_assert_eq!(self.bits, rhs.bits);
        Fixed { mant: round_shr(&(&self.mant * &rhs.mant), self.bits), bits: self.bits }
    }
}

impl Neg for &Fixed {
    type Output = Fixed;
    fn neg(self) -> Fixed {
        Fixed { mant: -&self.mant, bits: self.bits }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedComplex {
    pub re: Fixed,
    pub im: Fixed,
}

impl FixedComplex {
    pub fn zero(bits: u32) -> Self {
        FixedComplex { re: Fixed::zero(bits), im: Fixed::zero(bits) }
    }

    pub fn real(re: Fixed) -> Self {
        let bits = re.bits();
        FixedComplex { re, im: Fixed::zero(bits) }
    }

    pub fn from_int(value: &BigInt, bits: u32) -> Self {
        FixedComplex::real(Fixed::from_int(value, bits))
    }

    pub fn from_c64(z: Complex64, bits: u32) -> Self {
        FixedComplex { re: Fixed::from_f64(z.re, bits), im: Fixed::from_f64(z.im, bits) }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn bits(&self) -> u32 {
        self.re.bits()
    }

    pub fn conj(&self) -> Self {
        FixedComplex { re: self.re.clone(), im: -&self.im }
    }

    /// `|re| + |im|`, an upper bound on the modulus.
    pub fn norm1(&self) -> Fixed {
        &self.re.abs() + &self.im.abs()
    }

    pub fn norm_sqr(&self) -> Fixed {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    /// Division carried out on mantissas so that small denominators keep full
    /// relative accuracy.
    pub fn div(&self, rhs: &FixedComplex) -> FixedComplex {
        let bits = self.bits();
        let (a, b) = (self.re.mantissa(), self.im.mantissa());
        let (c, d) = (rhs.re.mantissa(), rhs.im.mantissa());
        let den = c * c + d * d;
        let re = ((a * c + b * d) << bits) / &den;
        let im = ((b * c - a * d) << bits) / &den;
        FixedComplex { re: Fixed { mant: re, bits }, im: Fixed { mant: im, bits } }
    }

    pub fn with_bits(&self, bits: u32) -> Self {
        FixedComplex { re: self.re.with_bits(bits), im: self.im.with_bits(bits) }
    }
}

impl Add for &FixedComplex {
    type Output = FixedComplex;
    fn add(self, rhs: &FixedComplex) -> FixedComplex {
        FixedComplex { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &FixedComplex {
    type Output = FixedComplex;
    fn sub(self, rhs: &FixedComplex) -> FixedComplex {
        FixedComplex { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &FixedComplex {
    type Output = FixedComplex;
    fn mul(self, rhs: &FixedComplex) -> FixedComplex {
        let re = &(&self.re * &rhs.re) - &(&self.im * &rhs.im);
        let im = &(&self.re * &rhs.im) + &(&self.im * &rhs.re);
        FixedComplex { re, im }
    }
}

impl Neg for &FixedComplex {
    type Output = FixedComplex;
    fn neg(self) -> FixedComplex {
        FixedComplex { re: -&self.re, im: -&self.im }
    }
}
