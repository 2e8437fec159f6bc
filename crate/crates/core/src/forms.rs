//! The potential `phi(z) = prod_{i<=s} im(z_i)^-1`, the exact semipositive form
//! `omega = sqrt(-1) d d-bar log phi` and its primitive `d^c log phi`.
//!
//! On real tangent vectors written in complex coordinates the form evaluates to
//! `omega(v, w) = -sum_{i<=s} Im(v_i conj(w_i)) / (2 im(z_i)^2)`, and with the
//! convention `d^c f(v) = -df(Iv)` one gets
//! `d^c log phi(v) = sum_{i<=s} Re(v_i) / im(z_i)` and `omega = 1/2 d d^c log phi`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{OtError, Result};
use crate::field::NumberField;
use crate::group::{GroupElement, Point, Tangent};

pub const DEFAULT_FD_STEP: f64 = 1e-5;
pub const FD_STEP_RANGE: (f64, f64) = (1e-7, 1e-3);
pub const DEFAULT_QUADRATURE: usize = 512;
pub const DEFAULT_STOKES_RADIUS: f64 = 0.3;
/// Required clearance between a disk and the real axis.
pub const DISK_CLEARANCE: f64 = 0.05;

pub fn log_phi(p: &Point) -> f64 {
    -p.z[..p.s()].iter().map(|z| z.im.ln()).sum::<f64>()
}

/// `log phi(p + delta) - log phi(p)` for a real displacement
/// `delta = (dx_1, dy_1, .., dx_m, dy_m)`, free of cancellation.
pub fn log_phi_increment(p: &Point, delta: &[f64]) -> f64 {
    -p.z[..p.s()].iter().enumerate().map(|(i, z)| (delta[2 * i + 1] / z.im).ln_1p()).sum::<f64>()
}

pub fn omega_closed(p: &Point, v: &Tangent, w: &Tangent) -> f64 {
    p.z[..p.s()]
        .iter()
        .enumerate()
        .map(|(i, z)| -(v.v[i] * w.v[i].conj()).im / (2.0 * z.im * z.im))
        .sum()
}

pub fn dc_logphi(p: &Point, v: &Tangent) -> f64 {
    p.z[..p.s()].iter().enumerate().map(|(i, z)| v.v[i].re / z.im).sum()
}

pub fn semipositivity_check(p: &Point, v: &Tangent) -> f64 {
    omega_closed(p, v, &v.rotate())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormMethod {
    ClosedForm,
    FiniteDifference,
}

#[derive(Debug, Clone, Serialize)]
pub struct FormEvaluation {
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub value: f64,
    pub method: FormMethod,
    pub point: Point,
    pub pair: (Tangent, Tangent),
}

pub fn evaluate_closed(p: &Point, v: &Tangent, w: &Tangent) -> FormEvaluation {
    FormEvaluation {
        value: omega_closed(p, v, w),
        method: FormMethod::ClosedForm,
        point: p.clone(),
        pair: (v.clone(), w.clone()),
    }
}

fn check_step(p: &Point, h: f64) -> Result<()> {
    if !(FD_STEP_RANGE.0..=FD_STEP_RANGE.1).contains(&h) {
        return Err(OtError::StepOutOfRange(h));
    }
    for z in &p.z[..p.s()] {
        if z.im <= 2.0 * h * z.im.abs().max(1.0) {
            return Err(OtError::NearBoundary(2.0 * h));
        }
    }
    Ok(())
}

/// Real Hessian of `log phi` in coordinates `(x_1, y_1, .., x_m, y_m)` by
/// central differences with per-coordinate step `h * max(1, |coordinate|)`.
fn real_hessian_fd(p: &Point, h: f64) -> Vec<Vec<f64>> {
    let dim = 2 * p.m();
    let coords: Vec<f64> = p.z.iter().flat_map(|z| [z.re, z.im]).collect();
    let steps: Vec<f64> = coords.iter().map(|c| h * c.abs().max(1.0)).collect();
    let g = |moves: &[(usize, f64)]| {
        let mut delta = vec![0.0; dim];
        for &(a, d) in moves {
            delta[a] += d;
        }
        log_phi_increment(p, &delta)
    };
    let mut hess = vec![vec![0.0; dim]; dim];
    for a in 0..dim {
        let ha = steps[a];
        hess[a][a] = (g(&[(a, ha)]) + g(&[(a, -ha)])) / (ha * ha);
        for b in a + 1..dim {
            let hb = steps[b];
            let val = (g(&[(a, ha), (b, hb)]) - g(&[(a, ha), (b, -hb)]) - g(&[(a, -ha), (b, hb)])
                + g(&[(a, -ha), (b, -hb)]))
                / (4.0 * ha * hb);
            hess[a][b] = val;
            hess[b][a] = val;
        }
    }
    hess
}

/// `d^2 log phi / dz_j dz-bar_k` assembled from the real Hessian.
pub fn complex_hessian_fd(p: &Point, h: f64) -> Result<Vec<Vec<Complex64>>> {
    check_step(p, h)?;
    let r = real_hessian_fd(p, h);
    let m = p.m();
    Ok((0..m)
        .map(|j| {
            (0..m)
                .map(|k| {
                    let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
                    Complex64::new(r[xj][xk] + r[yj][yk], r[xj][yk] - r[yj][xk]) * 0.25
                })
                .collect()
        })
        .collect())
}

/// `sqrt(-1) sum H_jk dz_j ^ dz-bar_k` on `(v, w)`, which is
/// `-2 Im(sum_jk H_jk v_j conj(w_k))` for Hermitian `H`.
pub fn contract_hessian(hess: &[Vec<Complex64>], v: &Tangent, w: &Tangent) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, row) in hess.iter().enumerate() {
        for (k, hjk) in row.iter().enumerate() {
            acc += hjk * v.v[j] * w.v[k].conj();
        }
    }
    -2.0 * acc.im
}

/// Finite-difference value of `omega(v, w)`, Richardson-extrapolated from
/// steps `h` and `h/2`.
pub fn omega_fd(p: &Point, v: &Tangent, w: &Tangent, h: f64) -> Result<FormEvaluation> {
    check_step(p, h)?;
    let coarse = contract_hessian(&complex_hessian_fd(p, h)?, v, w);
    let fine = contract_hessian(&complex_hessian_fd(p, 0.5 * h)?, v, w);
    Ok(FormEvaluation {
        value: (4.0 * fine - coarse) / 3.0,
        method: FormMethod::FiniteDifference,
        point: p.clone(),
        pair: (v.clone(), w.clone()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvarianceResidual {
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub omega: f64,
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub dc: f64,
}

impl InvarianceResidual {
    pub fn max(&self) -> f64 {
        self.omega.max(self.dc)
    }
}

/// `|omega(g p; dg v, dg w) - omega(p; v, w)|` and the same for `d^c log phi`.
pub fn invariance_residual(
    field: &NumberField,
    g: &GroupElement,
    p: &Point,
    v: &Tangent,
    w: &Tangent,
) -> Result<InvarianceResidual> {
    let map = g.affine(field);
    let q = map.apply(p)?;
    let gv = map.push_forward(v);
    let gw = map.push_forward(w);
    Ok(InvarianceResidual {
        omega: (omega_closed(&q, &gv, &gw) - omega_closed(p, v, w)).abs(),
        dc: (dc_logphi(&q, &gv) - dc_logphi(p, v)).abs(),
    })
}

/// Pairwise summation.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[derive(Debug, Clone, Serialize)]
pub struct StokesReport {
    pub slot: usize,
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub radius: f64,
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub surface_integral: f64,
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub boundary_integral: f64,
    #[serde(serialize_with = "crate::report::ser_f64")]
    pub residual: f64,
    pub n_surf: usize,
    pub n_bdry: usize,
}

/// Compares `int_D omega` with `int_{dD} 1/2 d^c log phi` for the disk of
/// radius `r` about `p0` in the `(d/dx, d/dy)` plane of `slot`.
///
/// The surface integral is a polar midpoint rule on `n_surf x n_surf` cells;
/// the boundary integral a midpoint rule on `n_bdry` nodes.
pub fn stokes_residual(p0: &Point, r: f64, slot: usize, n_surf: usize, n_bdry: usize) -> Result<StokesReport> {
    if slot >= p0.m() || !(r > 0.0) || n_surf == 0 || n_bdry == 0 {
        return Err(OtError::Config(format!("bad disk: slot {slot}, radius {r}, sizes {n_surf}/{n_bdry}")));
    }
    if slot < p0.s() && p0.z[slot].im - r <= DISK_CLEARANCE {
        return Err(OtError::DiskLeavesDomain(slot));
    }
    let m = p0.m();
    let center = p0.z[slot];
    let (ex, ey) = (Tangent::dx(m, slot), Tangent::dy(m, slot));
    let d_rho = r / n_surf as f64;
    let d_theta = std::f64::consts::TAU / n_surf as f64;
    let mut cells = Vec::with_capacity(n_surf * n_surf);
    for k in 0..n_surf {
        let rho = (k as f64 + 0.5) * d_rho;
        for l in 0..n_surf {
            let theta = (l as f64 + 0.5) * d_theta;
            let q = p0.with_slot(slot, center + Complex64::from_polar(rho, theta));
            cells.push(omega_closed(&q, &ex, &ey) * rho * d_rho * d_theta);
        }
    }
    let surface_integral = pairwise_sum(&cells);

    let d_theta = std::f64::consts::TAU / n_bdry as f64;
    let nodes: Vec<f64> = (0..n_bdry)
        .map(|l| {
            let theta = (l as f64 + 0.5) * d_theta;
            let q = p0.with_slot(slot, center + Complex64::from_polar(r, theta));
            let mut tangent = Tangent::zero(m);
            tangent.v[slot] = Complex64::from_polar(r, theta) * Complex64::i();
            0.5 * dc_logphi(&q, &tangent) * d_theta
        })
        .collect();
    let boundary_integral = pairwise_sum(&nodes);
    Ok(StokesReport {
        slot,
        radius: r,
        surface_integral,
        boundary_integral,
        residual: (surface_integral - boundary_integral).abs(),
        n_surf,
        n_bdry,
    })
}
