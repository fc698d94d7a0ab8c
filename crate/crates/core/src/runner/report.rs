//! JSON report of a verification run.

use num_complex::Complex64;
use serde::{Serialize, Serializer};
use serde_json::Value;

use super::config::RunConfig;
use crate::merom::EvalPoint;

pub const SCHEMA: &str = "elliptic-hecke.report/1";

/// Scientific notation with 17 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn ser_sci<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&sci(*x))
}

fn complex_pair(c: Complex64) -> [String; 2] {
    [sci(c.re), sci(c.im)]
}

/// How a record's value is compared with its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// Pass iff value < threshold.
    Below,
    /// Pass iff value >= threshold; used by negative controls.
    Above,
}

impl Comparison {
    pub fn passes(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparison::Below => value < threshold,
            Comparison::Above => value >= threshold,
        }
    }

    /// True if `a` is a worse outcome than `b`.
    pub fn worse(self, a: f64, b: f64) -> bool {
        match self {
            Comparison::Below => a > b || a.is_nan(),
            Comparison::Above => a < b || a.is_nan(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointEcho {
    pub z: Vec<[String; 2]>,
    pub lam: Vec<[String; 2]>,
    pub h: [String; 2],
}

impl From<&EvalPoint> for PointEcho {
    fn from(p: &EvalPoint) -> Self {
        Self {
            z: p.z.iter().copied().map(complex_pair).collect(),
            lam: p.lam.iter().copied().map(complex_pair).collect(),
            h: complex_pair(p.h),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub detail: String,
    pub point: Option<PointEcho>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    pub suite: String,
    pub anchor: String,
    #[serde(serialize_with = "ser_sci")]
    pub max_residual: f64,
    #[serde(serialize_with = "ser_sci")]
    pub threshold: f64,
    pub comparison: Comparison,
    pub checks: usize,
    pub pass: bool,
    /// Where the worst value occurred; present on failure.
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    #[serde(rename = "type")]
    pub label: String,
    pub isogeny: String,
    pub tau: [String; 2],
    pub h: Vec<[String; 2]>,
    pub truncation: usize,
    pub tol: Option<String>,
    pub seeds: Vec<u64>,
    pub samples: usize,
    pub suites: Vec<String>,
    pub negative_control: bool,
}

impl From<&RunConfig> for ConfigEcho {
    fn from(c: &RunConfig) -> Self {
        Self {
            label: c.label.clone(),
            isogeny: c.isogeny.as_str().into(),
            tau: complex_pair(c.tau),
            h: c.hbars.iter().copied().map(complex_pair).collect(),
            truncation: c.truncation,
            tol: c.tol.map(sci),
            seeds: c.seeds.clone(),
            samples: c.samples,
            suites: c.suites.iter().map(|s| s.as_str().to_string()).collect(),
            negative_control: c.negative_control,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema: String,
    pub config: ConfigEcho,
    /// Sorted by name.
    pub records: Vec<Record>,
    pub pass: bool,
    pub timing: Timing,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report without wall-clock data; identical for identical inputs.
    pub fn body(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Value::Object(map) = &mut v {
            map.remove("timing");
        }
        v
    }

    pub fn record(&self, name: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(sci(1.0), "1.0000000000000000e0");
        assert_eq!(sci(-0.5), "-5.0000000000000000e-1");
        assert_eq!(sci(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn comparisons() {
        assert!(Comparison::Below.passes(1e-9, 1e-7));
        assert!(!Comparison::Below.passes(f64::NAN, 1e-7));
        assert!(Comparison::Above.passes(1.0, 1e-5));
        assert!(!Comparison::Above.passes(1e-9, 1e-5));
        assert!(Comparison::Below.worse(2.0, 1.0));
        assert!(Comparison::Above.worse(1.0, 2.0));
    }
}
