//! Batch verification: run identity suites for one root datum and one set of
//! elliptic parameters, and collect the outcome as a [`SuiteReport`].
//!
//! Every sampled identity is checked for each `ℏ` value and each seed of the
//! configuration; a record keeps the worst value seen.

pub mod config;
pub mod report;
mod suites;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use crate::hecke::verify::Sampling;
use crate::hecke::{OperatorCache, Variant};
use crate::root_datum::{RootDatum, WeylGroup};
use crate::theta::{ThetaParams, DEFAULT_TOL};

pub use config::{parse_complex, ConfigError, RunConfig, Suite};
pub use report::{Comparison, Record, SuiteReport, Witness};

use suites::{Ctx, Outcome};

/// One verifiable identity.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub suite: Suite,
    pub anchor: &'static str,
    pub comparison: Comparison,
    pub threshold: f64,
    /// Whether a configured `tol` replaces the threshold (negative controls
    /// then require `100·tol`).
    pub follows_tol: bool,
}

const fn entry(
    name: &'static str,
    suite: Suite,
    anchor: &'static str,
    comparison: Comparison,
    threshold: f64,
    follows_tol: bool,
) -> CatalogEntry {
    CatalogEntry { name, suite, anchor, comparison, threshold, follows_tol }
}

use Comparison::{Above, Below};

const CATALOG: &[CatalogEntry] = &[
    entry(
        "braid:A1xA1",
        Suite::Weyl,
        "dynamical Demazure-Lusztig operators: braid relation of order 2",
        Below,
        1e-7,
        true,
    ),
    entry(
        "braid:A2",
        Suite::Weyl,
        "dynamical Demazure-Lusztig operators: braid relation of order 3",
        Below,
        1e-7,
        true,
    ),
    entry(
        "braid:B2",
        Suite::Weyl,
        "dynamical Demazure-Lusztig operators: braid relation of order 4",
        Below,
        1e-7,
        true,
    ),
    entry(
        "braid:G2",
        Suite::Weyl,
        "dynamical Demazure-Lusztig operators: braid relation of order 6",
        Below,
        1e-7,
        true,
    ),
    entry(
        "gamma-dual-residues",
        Suite::Gamma,
        "dual generator satisfies the residue conditions of the Langlands dual system",
        Below,
        1e-6,
        true,
    ),
    entry(
        "gamma-generator",
        Suite::Gamma,
        "Gamma sends the dual delta of a simple reflection to its Demazure-Lusztig operator",
        Below,
        1e-9,
        true,
    ),
    entry(
        "gamma-homomorphism",
        Suite::Gamma,
        "Gamma is multiplicative on products of dual generators",
        Below,
        1e-7,
        true,
    ),
    entry(
        "gamma-residues",
        Suite::Gamma,
        "image of a dual generator under Gamma satisfies the residue conditions",
        Below,
        1e-6,
        true,
    ),
    entry(
        "inverse-dual-quadratic",
        Suite::Inverse,
        "Langlands dual operator squares to the identity",
        Below,
        1e-7,
        true,
    ),
    entry(
        "inverse-negative-control",
        Suite::Inverse,
        "inverse identity fails for the dual operator with one sign dropped",
        Above,
        1e-5,
        true,
    ),
    entry(
        "inverse-p",
        Suite::Inverse,
        "inverse identity between the operator and its Langlands dual: off-diagonal part vanishes",
        Below,
        1e-7,
        true,
    ),
    entry(
        "inverse-q",
        Suite::Inverse,
        "inverse identity between the operator and its Langlands dual: diagonal part equals one",
        Below,
        1e-7,
        true,
    ),
    entry(
        "pole-cancellation",
        Suite::Residue,
        "polynomial representation: poles of the coefficients cancel on regular sections (minimum slope)",
        Above,
        -0.1,
        false,
    ),
    entry(
        "psi-compat",
        Suite::Psi,
        "Psi intertwines the module structures on pairs with a z-only factor",
        Below,
        1e-7,
        true,
    ),
    entry(
        "psi-negative-control",
        Suite::Psi,
        "Psi compatibility fails when the second factor depends on lambda",
        Above,
        1e-5,
        true,
    ),
    entry("quadratic", Suite::Weyl, "dynamical Demazure-Lusztig operators: quadratic relation", Below, 1e-7, true),
    entry(
        "reduced-word",
        Suite::Weyl,
        "operator of a Weyl group element is independent of the reduced word",
        Below,
        1e-7,
        true,
    ),
    entry(
        "residue:T",
        Suite::Residue,
        "dynamical Demazure-Lusztig operator satisfies the residue conditions",
        Below,
        1e-6,
        true,
    ),
    entry(
        "residue:closure",
        Suite::Residue,
        "residue conditions are closed under products of adjacent generators",
        Below,
        1e-6,
        true,
    ),
    entry(
        "residue:negative-control",
        Suite::Residue,
        "an unpaired simple pole violates the residue pairing (distance of the residual from 1)",
        Below,
        0.1,
        false,
    ),
    entry(
        "theta:derivative-at-zero",
        Suite::Theta,
        "normalized odd theta function: derivative at the origin",
        Below,
        1e-8,
        true,
    ),
    entry("theta:oddness", Suite::Theta, "normalized odd theta function: odd symmetry", Below, 1e-8, true),
    entry(
        "theta:period",
        Suite::Theta,
        "normalized odd theta function: antiperiodicity under x -> x + 1",
        Below,
        1e-8,
        true,
    ),
    entry(
        "theta:quasi-period",
        Suite::Theta,
        "normalized odd theta function: factor of automorphy under x -> x + tau",
        Below,
        1e-8,
        true,
    ),
    entry(
        "theta:truncation",
        Suite::Theta,
        "normalized odd theta function: truncated product agrees with twice as many factors",
        Below,
        1e-8,
        true,
    ),
];

/// Every identity the runner can check, sorted by name.
pub fn list_identities() -> Vec<CatalogEntry> {
    let mut v = CATALOG.to_vec();
    v.sort_by_key(|e| e.name);
    v
}

fn catalog_entry(name: &str) -> &'static CatalogEntry {
    CATALOG.iter().find(|e| e.name == name).expect("identity is catalogued")
}

/// Run every selected suite.
pub fn run(config: &RunConfig) -> Result<SuiteReport, ConfigError> {
    config.validate()?;
    let start = Instant::now();
    let datum = RootDatum::build(&config.label, config.isogeny).map_err(|e| ConfigError::new("type", e.to_string()))?;
    let params = ThetaParams::new(config.tau, config.truncation, DEFAULT_TOL, DEFAULT_TOL)
        .map_err(|e| ConfigError::new("tau", e.to_string()))?;
    let group = Arc::new(WeylGroup::new(datum.clone()));
    let ctx = Ctx {
        dual: Arc::new(WeylGroup::new(datum.langlands_dual())),
        cache: OperatorCache::new(&group),
        group,
        params: params.clone(),
        variant: if config.negative_control { Variant::SignFlipped } else { Variant::Exact },
    };

    let mut records = Vec::new();
    for identity in suites::instances(&ctx, &config.suites) {
        let spec = catalog_entry(identity.name);
        let threshold = match (config.tol, spec.follows_tol, spec.comparison) {
            (Some(t), true, Below) => t,
            (Some(t), true, Above) => 100.0 * t,
            _ => spec.threshold,
        };
        let mut worst: Option<Outcome> = None;
        for &hbar in &config.hbars {
            for &seed in &config.seeds {
                let s = Sampling::new(params.clone(), hbar, seed, config.samples);
                let outcome = match catch_unwind(AssertUnwindSafe(|| (identity.check)(&ctx, &s))) {
                    Ok(Ok(o)) => o,
                    Ok(Err(e)) => Outcome::error(format!("h = {hbar}, seed = {seed}: {e}")),
                    Err(panic) => {
                        let msg = panic
                            .downcast_ref::<String>()
                            .cloned()
                            .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                            .unwrap_or_default();
                        Outcome::error(format!("h = {hbar}, seed = {seed}: panicked: {msg}"))
                    }
                };
                worst = Some(match worst {
                    None => outcome,
                    Some(w) => w.merge(outcome, spec.comparison),
                });
            }
        }
        let o = worst.expect("at least one seed and h");
        let pass = o.veto.is_none() && spec.comparison.passes(o.value, threshold);
        records.push(Record {
            name: identity.name.to_string(),
            suite: spec.suite.as_str().to_string(),
            anchor: spec.anchor.to_string(),
            max_residual: o.value,
            threshold,
            comparison: spec.comparison,
            checks: o.checks,
            pass,
            witness: match (pass, spec.comparison.passes(o.value, threshold)) {
                (true, _) => None,
                (false, false) => o.witness.or(o.veto),
                (false, true) => o.veto.or(o.witness),
            },
        });
    }
    records.sort_by(|a, b| a.name.cmp(&b.name));
    let pass = records.iter().all(|r| r.pass);
    Ok(SuiteReport {
        schema: report::SCHEMA.to_string(),
        config: config.into(),
        records,
        pass,
        timing: report::Timing { wall_clock_seconds: start.elapsed().as_secs_f64() },
    })
}
