//! Run configuration: a flat `key = value` file plus command-line overrides.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::root_datum::{Isogeny, RootDatum};
use crate::theta::DEFAULT_TRUNCATION;

/// An invalid configuration entry, with the key it came from.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Theta,
    Weyl,
    Residue,
    Gamma,
    Psi,
    Inverse,
}

impl Suite {
    pub const ALL: [Suite; 6] = [Suite::Theta, Suite::Weyl, Suite::Residue, Suite::Gamma, Suite::Psi, Suite::Inverse];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Theta => "theta",
            Suite::Weyl => "weyl",
            Suite::Residue => "residue",
            Suite::Gamma => "gamma",
            Suite::Psi => "psi",
            Suite::Inverse => "inverse",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

/// Default `ℏ` values; every sampled identity is checked at each of them.
pub const DEFAULT_HBARS: [Complex64; 2] = [Complex64::new(0.1183, 0.2471), Complex64::new(0.3311, -0.0817)];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub label: String,
    pub isogeny: Isogeny,
    pub tau: Complex64,
    pub hbars: Vec<Complex64>,
    pub truncation: usize,
    /// Replaces every per-identity threshold when set.
    pub tol: Option<f64>,
    pub seeds: Vec<u64>,
    pub samples: usize,
    pub suites: BTreeSet<Suite>,
    pub negative_control: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            label: "A1".into(),
            isogeny: Isogeny::Adjoint,
            tau: crate::theta::DEFAULT_TAU,
            hbars: DEFAULT_HBARS.to_vec(),
            truncation: DEFAULT_TRUNCATION,
            tol: None,
            seeds: vec![1, 2, 3],
            samples: 20,
            suites: Suite::ALL.into_iter().collect(),
            negative_control: false,
        }
    }
}

impl RunConfig {
    /// Parse a config file body on top of the defaults. Blank lines and
    /// text after `#` are ignored.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::new(format!("line {}", n + 1), "expected `key = value`"))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Set one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let err = |m: String| ConfigError::new(key, m);
        match key {
            "type" | "cartan_label" => self.label = value.to_string(),
            "isogeny" | "isogeny_tag" => {
                self.isogeny = value.parse().map_err(|_| err(format!("unknown isogeny {value:?}")))?
            }
            "tau" => self.tau = parse_complex(value).map_err(err)?,
            "h" | "hbar" => self.hbars = parse_list(value, parse_complex).map_err(err)?,
            "truncation" => self.truncation = value.parse().map_err(|_| err(format!("not an integer: {value:?}")))?,
            "tol" => self.tol = Some(value.parse().map_err(|_| err(format!("not a number: {value:?}")))?),
            "seeds" => {
                self.seeds = parse_list(value, |s| s.parse().map_err(|_| format!("not a seed: {s:?}"))).map_err(err)?
            }
            "samples" | "samples_per_identity" => {
                self.samples = value.parse().map_err(|_| err(format!("not an integer: {value:?}")))?
            }
            "suites" => self.suites = parse_list(value, |s| s.parse()).map_err(err)?.into_iter().collect(),
            "negative_control" => {
                self.negative_control =
                    value.parse().map_err(|_| err(format!("expected true or false, got {value:?}")))?
            }
            _ => return Err(ConfigError::new(key, "unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        RootDatum::build(&self.label, self.isogeny).map_err(|e| ConfigError::new("type", e.to_string()))?;
        if self.tau.im.is_nan() || self.tau.im <= 0.0 || !self.tau.re.is_finite() || !self.tau.im.is_finite() {
            return Err(ConfigError::new("tau", "Im(tau) must be positive"));
        }
        if self.hbars.is_empty() {
            return Err(ConfigError::new("h", "at least one value required"));
        }
        if self.hbars.iter().any(|h| !h.re.is_finite() || !h.im.is_finite()) {
            return Err(ConfigError::new("h", "values must be finite"));
        }
        if self.truncation == 0 {
            return Err(ConfigError::new("truncation", "must be at least 1"));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(ConfigError::new("tol", "must be positive"));
            }
        }
        if self.seeds.is_empty() {
            return Err(ConfigError::new("seeds", "at least one seed required"));
        }
        if self.samples == 0 {
            return Err(ConfigError::new("samples", "must be at least 1"));
        }
        if self.suites.is_empty() {
            return Err(ConfigError::new("suites", "at least one suite required"));
        }
        Ok(())
    }
}

fn parse_list<T>(value: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(item).collect()
}

/// Parse `0.3`, `0.75i`, `-i`, `0.5+0.9i`, `1e-3-2e-2i` and similar.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("not a complex number: {text:?}");
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split before the last sign that does not follow an exponent marker
    let bytes = body.as_bytes();
    let split =
        (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.75i").unwrap(), c(0.0, 0.75));
        assert_eq!(parse_complex("0.5+0.9i").unwrap(), c(0.5, 0.9));
        assert_eq!(parse_complex(" 0.3 ").unwrap(), c(0.3, 0.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1e-3-2e-2i").unwrap(), c(1e-3, -2e-2));
        assert_eq!(parse_complex("2.5e+1i").unwrap(), c(0.0, 25.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn parses_a_file() {
        let cfg = RunConfig::parse(
            "# comment\ntype = B2\nisogeny = sc\ntau = 0.1+0.8i\nh = 0.2+0.1i, 0.3i\nseeds = 4,5\nsamples = 7\nsuites = weyl, theta # trailing\n",
        )
        .unwrap();
        assert_eq!(cfg.label, "B2");
        assert_eq!(cfg.isogeny, Isogeny::SimplyConnected);
        assert_eq!(cfg.hbars, vec![c(0.2, 0.1), c(0.0, 0.3)]);
        assert_eq!(cfg.seeds, vec![4, 5]);
        assert_eq!(cfg.suites, [Suite::Theta, Suite::Weyl].into_iter().collect());
    }

    #[test]
    fn errors_name_the_field() {
        let e = RunConfig::parse("tau = 0.3").unwrap_err();
        assert_eq!(e.field, "tau");
        assert_eq!(RunConfig::parse("samples = 0").unwrap_err().field, "samples");
        assert_eq!(RunConfig::parse("suites = ").unwrap_err().field, "suites");
        assert_eq!(RunConfig::parse("suites = weil").unwrap_err().field, "suites");
        assert_eq!(RunConfig::parse("type = E8").unwrap_err().field, "type");
        assert_eq!(RunConfig::parse("colour = red").unwrap_err().field, "colour");
        assert_eq!(RunConfig::parse("tau").unwrap_err().field, "line 1");
    }
}
