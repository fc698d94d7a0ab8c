//! The identities behind each catalog entry.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use super::config::Suite;
use super::report::{Comparison, PointEcho, Witness};
use crate::hecke::verify::{
    canonical_failing_element, compare_elements, psi_compat_unchecked, random_section, verify_adjunction_variant,
    verify_braid_variant, verify_dual_quadratic, verify_gamma_homomorphism, verify_pole_cancellation,
    verify_psi_compat, verify_quadratic_variant, verify_reduced_words, verify_residue_conditions, Check, Condition,
    ResidueReport, Sampling,
};
use crate::hecke::{
    dl_dynamical, dl_dynamical_variant, gamma_with, gkv_dual_generator, HeckeElement, OperatorCache, Variant,
};
use crate::merom::{LinearForm, MeroExpr};
use crate::root_datum::WeylGroup;
use crate::theta::{theta, theta_derivative_at_zero, ThetaParams};

/// Reduced words compared by the `reduced-word` identity.
const REDUCED_WORDS: usize = 3;
/// Regular sections probed per simple root by `pole-cancellation`.
const POLE_SECTIONS: usize = 5;
/// Minimum number of random arguments per theta identity.
const THETA_POINTS: usize = 100;

pub(super) struct Ctx {
    pub group: Arc<WeylGroup>,
    pub dual: Arc<WeylGroup>,
    pub params: ThetaParams,
    pub variant: Variant,
    pub cache: OperatorCache,
}

/// Worst value of one identity over one `(ℏ, seed)` pair.
#[derive(Debug, Clone)]
pub(super) struct Outcome {
    pub value: f64,
    pub checks: usize,
    pub witness: Option<Witness>,
    /// Failure independent of the value, e.g. a residue condition that the
    /// value does not measure.
    pub veto: Option<Witness>,
}

impl Outcome {
    fn new(value: f64, checks: usize, witness: Option<Witness>) -> Self {
        Self { value, checks, witness, veto: None }
    }

    pub fn error(detail: String) -> Self {
        Self { value: f64::NAN, checks: 0, witness: None, veto: Some(Witness { detail, point: None }) }
    }

    fn from_check(c: &Check, detail: impl Into<String>) -> Self {
        let witness = c.witness.as_ref().map(|p| Witness { detail: detail.into(), point: Some(p.into()) });
        Self::new(c.max_residual, c.points, witness)
    }

    pub fn merge(self, other: Outcome, cmp: Comparison) -> Outcome {
        let checks = self.checks + other.checks;
        let veto = self.veto.or(other.veto);
        let (value, witness) = if cmp.worse(other.value, self.value) && !self.value.is_nan() {
            (other.value, other.witness)
        } else {
            (self.value, self.witness)
        };
        Outcome { value, checks, witness, veto }
    }
}

type CheckFn = Box<dyn Fn(&Ctx, &Sampling) -> Result<Outcome, String>>;

pub(super) struct Identity {
    pub name: &'static str,
    pub check: CheckFn,
}

fn identity(name: &'static str, f: impl Fn(&Ctx, &Sampling) -> Result<Outcome, String> + 'static) -> Identity {
    Identity { name, check: Box::new(f) }
}

fn fold(cmp: Comparison, items: impl IntoIterator<Item = Result<Outcome, String>>) -> Result<Outcome, String> {
    let mut acc: Option<Outcome> = None;
    for o in items {
        let o = o?;
        acc = Some(match acc {
            None => o,
            Some(a) => a.merge(o, cmp),
        });
    }
    Ok(acc.unwrap_or_else(|| Outcome::new(0.0, 0, None)))
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// The identities of the selected suites that apply to the datum.
pub(super) fn instances(ctx: &Ctx, suites: &BTreeSet<Suite>) -> Vec<Identity> {
    let mut out = Vec::new();
    let rank = ctx.group.rank();
    if suites.contains(&Suite::Theta) {
        out.push(identity("theta:derivative-at-zero", |ctx, _| {
            let d = theta_derivative_at_zero(&ctx.params).map_err(err)?;
            let w = Witness { detail: format!("theta'(0) = {d}"), point: None };
            Ok(Outcome::new((d - 1.0).norm(), 1, Some(w)))
        }));
        out.push(identity("theta:oddness", |ctx, s| {
            theta_relation(ctx, s, 1, |x, p| Ok((theta(x, p)?, -theta(-x, p)?)))
        }));
        out.push(identity("theta:period", |ctx, s| {
            theta_relation(ctx, s, 2, |x, p| Ok((theta(x + 1.0, p)?, -theta(x, p)?)))
        }));
        out.push(identity("theta:quasi-period", |ctx, s| {
            theta_relation(ctx, s, 3, |x, p| {
                let tau = p.tau();
                let factor = -(Complex64::i() * PI * (-tau - x * 2.0)).exp();
                Ok((theta(x + tau, p)?, factor * theta(x, p)?))
            })
        }));
        out.push(identity("theta:truncation", |ctx, s| {
            let doubled = ctx.params.with_truncation(2 * ctx.params.truncation()).map_err(err)?;
            theta_relation(ctx, s, 4, move |x, p| Ok((theta(x, p)?, theta(x, &doubled)?)))
        }));
    }

    if suites.contains(&Suite::Weyl) {
        out.push(identity("quadratic", |ctx, s| {
            fold(
                Comparison::Below,
                (0..ctx.group.rank()).map(|i| {
                    let c = verify_quadratic_variant(&ctx.group, i, s, ctx.variant).map_err(err)?;
                    Ok(Outcome::from_check(&c, format!("T{}^2 = 1", i + 1)))
                }),
            )
        }));
        let mut braid_types: Vec<(&'static str, Vec<(usize, usize)>)> = Vec::new();
        for i in 0..rank {
            for j in i + 1..rank {
                let label = ctx.group.datum().rank_two_label(i, j).expect("distinct indices");
                match braid_types.iter_mut().find(|(l, _)| *l == label) {
                    Some((_, pairs)) => pairs.push((i, j)),
                    None => braid_types.push((label, vec![(i, j)])),
                }
            }
        }
        for (label, pairs) in braid_types {
            let name = match label {
                "A1xA1" => "braid:A1xA1",
                "A2" => "braid:A2",
                "B2" => "braid:B2",
                _ => "braid:G2",
            };
            out.push(identity(name, move |ctx, s| {
                fold(
                    Comparison::Below,
                    pairs.iter().map(|&(i, j)| {
                        let c = verify_braid_variant(&ctx.group, i, j, s, ctx.variant).map_err(err)?;
                        Ok(Outcome::from_check(&c, format!("braid relation for s{} and s{}", i + 1, j + 1)))
                    }),
                )
            }));
        }
        out.push(identity("reduced-word", |ctx, s| {
            let w0 = ctx.group.longest();
            let c = verify_reduced_words(&ctx.group, w0, REDUCED_WORDS, s).map_err(err)?;
            Ok(Outcome::from_check(&c, "reduced words of the longest element"))
        }));
    }

    if suites.contains(&Suite::Residue) {
        out.push(identity("residue:T", |ctx, s| {
            fold(
                Comparison::Below,
                (0..ctx.group.rank()).map(|i| {
                    let t = dl_dynamical_variant(&ctx.group, i, ctx.variant).map_err(err)?;
                    Ok(residue_outcome(&verify_residue_conditions(&t, s), Some((-0.1, 0.1)), &format!("T{}", i + 1)))
                }),
            )
        }));
        let adjacent: Vec<(usize, usize)> = (0..rank)
            .flat_map(|i| (0..rank).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && ctx.group.datum().cartan().get(i, j) != 0)
            .collect();
        if !adjacent.is_empty() {
            out.push(identity("residue:closure", move |ctx, s| {
                fold(
                    Comparison::Below,
                    adjacent.iter().map(|&(i, j)| {
                        let p = dl_dynamical_variant(&ctx.group, i, ctx.variant)
                            .and_then(|a| a.multiply(&dl_dynamical_variant(&ctx.group, j, ctx.variant)?))
                            .map_err(err)?;
                        Ok(residue_outcome(&verify_residue_conditions(&p, s), None, &format!("T{}T{}", i + 1, j + 1)))
                    }),
                )
            }));
        }
        out.push(identity("residue:negative-control", |ctx, s| {
            let h = canonical_failing_element(&ctx.group, 0).map_err(err)?;
            let r = verify_residue_conditions(&h, s);
            let ii = r.get(Condition::ResidueZ);
            let mut o = Outcome::new(
                (ii.worst - 1.0).abs(),
                ii.checks,
                Some(Witness { detail: format!("condition ii residual {:.6e}", ii.worst), point: None }),
            );
            if ii.pass {
                o.veto = Some(Witness { detail: "unpaired pole was accepted".into(), point: None });
            }
            Ok(o)
        }));
        out.push(identity("pole-cancellation", |ctx, s| {
            fold(
                Comparison::Above,
                (0..ctx.group.rank()).flat_map(|i| {
                    let mut rng = s.rng(9000 + i as u64);
                    let sections: Vec<MeroExpr> =
                        (0..POLE_SECTIONS).map(|_| random_section(ctx.group.rank(), true, &mut rng)).collect();
                    sections.into_iter().enumerate().map(move |(k, f)| {
                        let slope = verify_pole_cancellation(&ctx.group, i, &f, s, (i * POLE_SECTIONS + k) as u64)
                            .map_err(err)?;
                        let w = Witness { detail: format!("T{}({f}) along z_a{} = 0", i + 1, i + 1), point: None };
                        Ok(Outcome::new(slope, s.samples, Some(w)))
                    })
                }),
            )
        }));
    }

    if suites.contains(&Suite::Gamma) {
        out.push(identity("gamma-generator", |ctx, s| {
            fold(
                Comparison::Below,
                (0..ctx.group.rank()).map(|i| {
                    let g = &ctx.group;
                    let d = HeckeElement::delta(g, g.identity(), g.generator(i), MeroExpr::one());
                    let image = gamma_with(&d, &ctx.cache).map_err(err)?;
                    let t = dl_dynamical(g, i).map_err(err)?;
                    let c = compare_elements(&image, &t, s, 10_000 + i as u64).map_err(err)?;
                    let mut o = Outcome::from_check(&c, format!("Gamma(delta_{}^d) vs T{}", i + 1, i + 1));
                    if !image.keys().eq(t.keys()) {
                        o.veto = Some(Witness { detail: format!("keys differ for s{}", i + 1), point: None });
                    }
                    Ok(o)
                }),
            )
        }));
        out.push(identity("gamma-residues", |ctx, s| {
            fold(
                Comparison::Below,
                (0..ctx.group.rank()).map(|i| {
                    let sigma = gkv_dual_generator(&ctx.group, i).map_err(err)?;
                    let image = gamma_with(&sigma, &ctx.cache).map_err(err)?;
                    Ok(residue_outcome(&verify_residue_conditions(&image, s), None, &format!("Gamma(sigma{})", i + 1)))
                }),
            )
        }));
        out.push(identity("gamma-dual-residues", |ctx, s| {
            fold(
                Comparison::Below,
                (0..ctx.group.rank()).map(|i| {
                    let sigma = gkv_dual_generator(&ctx.group, i).map_err(err)?;
                    let dual = sigma.to_langlands_dual(&ctx.dual).map_err(err)?;
                    Ok(residue_outcome(&verify_residue_conditions(&dual, s), None, &format!("sigma{}", i + 1)))
                }),
            )
        }));
        out.push(identity("gamma-homomorphism", |ctx, s| {
            let n = ctx.group.rank();
            fold(
                Comparison::Below,
                (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| {
                    let c = verify_gamma_homomorphism(&ctx.group, i, j, s).map_err(err)?;
                    Ok(Outcome::from_check(&c, format!("Gamma(sigma{})Gamma(sigma{})", i + 1, j + 1)))
                }),
            )
        }));
    }

    if suites.contains(&Suite::Psi) {
        out.push(identity("psi-compat", |ctx, s| {
            let n = ctx.group.rank();
            fold(
                Comparison::Below,
                (0..n).flat_map(|i| {
                    let mut rng = s.rng(11_000 + i as u64);
                    let g = random_section(n, true, &mut rng);
                    let fs = [
                        MeroExpr::one(),
                        MeroExpr::theta(LinearForm::z(ctx.group.datum().simple_root(i))),
                        random_section(n, false, &mut rng),
                    ];
                    fs.into_iter().map(move |f| {
                        let c = verify_psi_compat(&ctx.group, i, &g, &f, s).map_err(err)?;
                        Ok(Outcome::from_check(&c, format!("Psi(T{})(g, {f}) with g = {g}", i + 1)))
                    })
                }),
            )
        }));
        out.push(identity("psi-negative-control", |ctx, s| {
            let n = ctx.group.rank();
            fold(
                Comparison::Above,
                (0..n).map(|i| {
                    let mut rng = s.rng(12_000 + i as u64);
                    let g = random_section(n, true, &mut rng);
                    let d = ctx.group.datum();
                    let f = MeroExpr::theta(&LinearForm::z(d.simple_root(i)) + &LinearForm::lam(d.simple_coroot(i)));
                    let c = psi_compat_unchecked(&ctx.group, i, &g, &f, s).map_err(err)?;
                    Ok(Outcome::from_check(&c, format!("lambda-dependent f = {f}")))
                }),
            )
        }));
    }

    if suites.contains(&Suite::Inverse) {
        for (name, take_p) in [("inverse-p", true), ("inverse-q", false)] {
            out.push(identity(name, move |ctx, s| {
                fold(
                    Comparison::Below,
                    (0..ctx.group.rank()).map(|i| {
                        let c = verify_adjunction_variant(&ctx.group, i, s, ctx.variant).map_err(err)?;
                        let (check, what) =
                            if take_p { (c.p_identity, "p + q·p^L") } else { (c.q_identity, "q·q^L") };
                        Ok(Outcome::from_check(&check, format!("{what} for s{}", i + 1)))
                    }),
                )
            }));
        }
        out.push(identity("inverse-dual-quadratic", |ctx, s| {
            fold(
                Comparison::Below,
                (0..ctx.group.rank()).map(|i| {
                    let c = verify_dual_quadratic(&ctx.group, i, s).map_err(err)?;
                    Ok(Outcome::from_check(&c, format!("(T{}^L)^2 = 1", i + 1)))
                }),
            )
        }));
        out.push(identity("inverse-negative-control", |ctx, s| {
            fold(
                Comparison::Above,
                (0..ctx.group.rank()).map(|i| {
                    let c = verify_adjunction_variant(&ctx.group, i, s, Variant::SignFlipped).map_err(err)?;
                    Ok(Outcome::from_check(&c.p_identity, format!("sign-flipped p^L for s{}", i + 1)))
                }),
            )
        }));
    }
    out
}

/// Worst of `lhs − rhs` relative to `max(|lhs|, |rhs|)` over random
/// `x = a + bτ`, `a, b ∈ [−1, 1]`.
fn theta_relation(
    ctx: &Ctx,
    s: &Sampling,
    task: u64,
    f: impl Fn(Complex64, &ThetaParams) -> Result<(Complex64, Complex64), crate::theta::ThetaError>,
) -> Result<Outcome, String> {
    let mut rng = s.rng(20_000 + task);
    let tau = ctx.params.tau();
    let mut worst = Outcome::new(0.0, 0, None);
    for _ in 0..s.samples.max(THETA_POINTS) {
        let x = tau * rng.random_range(-1.0..1.0) + rng.random_range(-1.0..1.0);
        let (a, b) = f(x, &ctx.params).map_err(err)?;
        let r = (a - b).norm() / a.norm().max(b.norm());
        let w = Witness { detail: format!("x = {x}"), point: None };
        worst = worst.merge(Outcome::new(r, 1, Some(w)), Comparison::Below);
    }
    Ok(worst)
}

/// Value: worst scaled residue of conditions ii) and ii'). Any failing
/// condition, or a shifted-regularity slope outside `slopes`, vetoes.
fn residue_outcome(r: &ResidueReport, slopes: Option<(f64, f64)>, what: &str) -> Outcome {
    let ii = r.get(Condition::ResidueZ);
    let iip = r.get(Condition::ResidueLambda);
    let worst = if iip.worst > ii.worst { iip } else { ii };
    let describe = |c: &crate::hecke::verify::ConditionReport| -> Witness {
        match &c.witness {
            Some(w) => Witness {
                detail: format!(
                    "{what}: condition {} at ({}, {}) along {}: {:.6e}",
                    c.condition.tag(),
                    w.key.0,
                    w.key.1,
                    w.divisor,
                    w.value
                ),
                point: w.point.as_ref().map(PointEcho::from),
            },
            None => Witness {
                detail: format!("{what}: condition {} worst {:.6e}", c.condition.tag(), c.worst),
                point: None,
            },
        }
    };
    let checks = r.conditions.iter().map(|c| c.checks).sum();
    let mut o = Outcome::new(worst.worst, checks, Some(describe(worst)));
    if let Some(failed) = r.conditions.iter().find(|c| !c.pass) {
        o.veto = Some(describe(failed));
    } else if let (Some((lo, hi)), Some((a, b))) = (slopes, r.get(Condition::ShiftedRegularity).slope_range) {
        if a < lo || b > hi {
            o.veto = Some(Witness {
                detail: format!("{what}: shifted regularity slopes [{a:.3e}, {b:.3e}] outside [{lo}, {hi}]"),
                point: None,
            });
        }
    }
    o
}
