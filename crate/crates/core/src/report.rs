//! JSON report assembly. Floats are written with 17 significant digits so a
//! report round-trips every `f64` bit pattern; non-finite values become `null`.

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::config::Config;
use crate::error::Result;
use crate::field::NumberField;
use crate::foliation::WordCertificate;
use crate::suites::SuiteResult;
use crate::units::{log_embedding, AdmissibleCertificate, FoundUnit, LogVector, Unit};

pub const SCHEMA: &str = "otcurves-report/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn raw_f64(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() { format!("{x:.16e}") } else { "null".to_string() };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

pub fn ser_f64<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    raw_f64(*x).serialize(s)
}

pub fn ser_f64_vec<S: Serializer>(xs: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&raw_f64(*x))?;
    }
    seq.end()
}

pub fn ser_f64_matrix<S: Serializer>(rows: &[Vec<f64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<Box<RawValue>>> = rows.iter().map(|r| r.iter().map(|x| raw_f64(*x)).collect()).collect();
    rows.serialize(s)
}

/// Complex numbers as `[re, im]` pairs.
pub fn ser_complex_vec<S: Serializer>(zs: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(zs.len()))?;
    for z in zs {
        seq.serialize_element(&[raw_f64(z.re), raw_f64(z.im)])?;
    }
    seq.end()
}

pub fn ser_complex_matrix<S: Serializer>(rows: &[Vec<Complex64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<[Box<RawValue>; 2]>> =
        rows.iter().map(|r| r.iter().map(|z| [raw_f64(z.re), raw_f64(z.im)]).collect()).collect();
    rows.serialize(s)
}

/// Big integers as JSON numbers when they fit in `i64`, decimal strings otherwise.
pub fn ser_bigints<S: Serializer>(xs: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        match i64::try_from(x) {
            Ok(v) => seq.serialize_element(&v)?,
            Err(_) => seq.serialize_element(&x.to_string())?,
        }
    }
    seq.end()
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldSummary {
    pub polynomial: crate::field::IntPolynomial,
    pub degree: usize,
    pub s: usize,
    pub t: usize,
    pub precision_bits: u32,
    #[serde(serialize_with = "ser_f64")]
    pub eps_root: f64,
    #[serde(serialize_with = "ser_complex_vec")]
    pub roots: Vec<Complex64>,
    #[serde(serialize_with = "ser_f64")]
    pub reconstruction_error: f64,
}

impl FieldSummary {
    pub fn new(field: &NumberField) -> Self {
        let e = field.embeddings();
        FieldSummary {
            polynomial: field.poly().clone(),
            degree: field.degree(),
            s: field.s(),
            t: field.t(),
            precision_bits: e.precision_bits,
            eps_root: e.eps_root,
            roots: e.roots().to_vec(),
            reconstruction_error: e.reconstruction_error(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UnitRecord {
    pub unit: Unit,
    pub positive: Unit,
    pub power: u32,
    pub log: LogVector,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnitsSummary {
    pub bound: u32,
    pub count: usize,
    pub units: Vec<UnitRecord>,
    pub generators: Vec<Unit>,
}

impl UnitsSummary {
    pub fn new(field: &NumberField, bound: u32, found: &[FoundUnit], generators: Vec<Unit>) -> Self {
        let units = found
            .iter()
            .map(|f| UnitRecord {
                unit: f.unit.clone(),
                positive: f.positive.clone(),
                power: f.power,
                log: log_embedding(field, &f.unit),
            })
            .collect();
        UnitsSummary { bound, count: found.len(), units, generators }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    pub config: Config,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub units: Option<UnitsSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<AdmissibleCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<WordCertificate>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: &str, config: &Config) -> Self {
        Report {
            schema: SCHEMA,
            tool_version: TOOL_VERSION,
            command: command.to_string(),
            config: config.clone(),
            field: None,
            units: None,
            certificate: None,
            fixed_point: None,
            suites: Vec::new(),
            passed: true,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| crate::error::OtError::Config(e.to_string()))
    }

    /// Plain-text summary for the terminal.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        if let Some(f) = &self.field {
            out.push_str(&format!("field: degree {} signature (s, t) = ({}, {})\n", f.degree, f.s, f.t));
            for (i, z) in f.roots.iter().enumerate() {
                out.push_str(&format!("  root[{i}] = {:.12} {:+.12}i\n", z.re, z.im));
            }
        }
        if let Some(u) = &self.units {
            out.push_str(&format!("units: {} found with coefficients in [-{b}, {b}]\n", u.count, b = u.bound));
            for g in &u.generators {
                out.push_str(&format!("  generator {}\n", g.element));
            }
        }
        if let Some(c) = &self.certificate {
            out.push_str(&format!("admissible: {:?} det {:.10} rank {}\n", c.verdict, c.det, c.rank));
        }
        if let Some(w) = &self.fixed_point {
            out.push_str(&format!("word {}: {:?}\n", w.word, w.certificate.kind));
        }
        for s in &self.suites {
            out.push_str(&format!(
                "{} {:<28} trials {:>6} failed {:>4} max {:.3e} min {:.3e}\n",
                if s.passed { "PASS" } else { "FAIL" },
                s.name,
                s.trials,
                s.failed,
                s.max,
                s.min
            ));
        }
        out.push_str(if self.passed { "result: pass\n" } else { "result: FAIL\n" });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Probe {
        #[serde(serialize_with = "ser_f64")]
        x: f64,
        #[serde(serialize_with = "ser_f64_vec")]
        v: Vec<f64>,
        #[serde(serialize_with = "ser_bigints")]
        b: Vec<BigInt>,
    }

    #[test]
    fn floats_round_trip() {
        let p = Probe { x: 0.1, v: vec![1.0 / 3.0, f64::NAN], b: vec![BigInt::from(-3), BigInt::from(10).pow(30)] };
        let text = serde_json::to_string(&p).unwrap();
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), 0.1);
        assert_eq!(back["v"][0].as_f64().unwrap(), 1.0 / 3.0);
        assert!(back["v"][1].is_null());
        assert_eq!(back["b"][0], -3);
        assert_eq!(back["b"][1], "1000000000000000000000000000000");
    }
}
