//! Sampled verification of Hecke-algebra identities.
//!
//! Every check draws points from a [`Sampling`] and reports the worst
//! residual together with the point where it occurred.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{
    dl_dual_langlands_variant, dl_dynamical, dl_dynamical_variant, gamma, gkv_dual_generator, psi, t_word,
    t_word_variant, HeckeElement, HeckeError, Key, Variant,
};
use crate::merom::{
    is_regular_along, residue_along, task_rng, EvalPoint, ExprError, LinearForm, MeroExpr, PointSampler,
};
use crate::root_datum::{DatumError, WeylGroup};
use crate::theta::ThetaParams;

/// Elliptic parameters, `ℏ`, seed and sample count shared by a batch of
/// checks.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampling {
    pub params: ThetaParams,
    pub hbar: Complex64,
    pub seed: u64,
    pub samples: usize,
}

impl Sampling {
    pub fn new(params: ThetaParams, hbar: Complex64, seed: u64, samples: usize) -> Self {
        Self { params, hbar, seed, samples }
    }

    pub fn sampler(&self, rank: usize) -> PointSampler {
        PointSampler::new(rank, self.hbar)
    }

    pub fn rng(&self, task: u64) -> ChaCha8Rng {
        task_rng(self.seed, task)
    }

    fn points(&self, rank: usize, guards: &[LinearForm], task: u64) -> Result<Vec<EvalPoint>, ExprError> {
        let sampler = self.sampler(rank);
        let mut rng = self.rng(task);
        (0..self.samples).map(|_| sampler.sample(guards, &mut rng, &self.params)).collect()
    }
}

/// Worst residual of a sampled identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub max_residual: f64,
    pub points: usize,
    pub witness: Option<EvalPoint>,
}

impl Check {
    fn new() -> Self {
        Self { max_residual: 0.0, points: 0, witness: None }
    }

    fn record(&mut self, residual: f64, p: &EvalPoint) {
        self.points += 1;
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        if residual > self.max_residual || self.witness.is_none() {
            self.max_residual = self.max_residual.max(residual);
            self.witness = Some(p.clone());
        }
    }

    /// Combine checks of the same identity.
    pub fn merge(mut self, other: Check) -> Check {
        if other.max_residual > self.max_residual || self.witness.is_none() {
            self.max_residual = other.max_residual;
            self.witness = other.witness;
        }
        self.points += other.points;
        self
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual < tol
    }
}

/// `|a − b| / max(1, |a|, |b|)`.
pub fn scaled_difference(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

/// Coefficientwise comparison of two elements at sampled points.
pub fn compare_elements(a: &HeckeElement, b: &HeckeElement, s: &Sampling, task: u64) -> Result<Check, HeckeError> {
    let mut guards = a.forms();
    guards.extend(b.forms());
    let mut check = Check::new();
    for p in s.points(a.datum().rank(), &guards, task)? {
        check.record(a.residual_at(b, &p, &s.params)?, &p);
    }
    Ok(check)
}

/// Pointwise comparison of two functions at sampled points.
pub fn compare_sections(a: &MeroExpr, b: &MeroExpr, rank: usize, s: &Sampling, task: u64) -> Result<Check, HeckeError> {
    let mut guards = a.forms();
    guards.extend(b.forms());
    let mut check = Check::new();
    for p in s.points(rank, &guards, task)? {
        let (x, y) = (a.eval(&p, &s.params)?, b.eval(&p, &s.params)?);
        check.record(scaled_difference(x, y), &p);
    }
    Ok(check)
}

/// `T_α² = 1`.
pub fn verify_quadratic(group: &Arc<WeylGroup>, i: usize, s: &Sampling) -> Result<Check, HeckeError> {
    verify_quadratic_variant(group, i, s, Variant::Exact)
}

pub fn verify_quadratic_variant(
    group: &Arc<WeylGroup>,
    i: usize,
    s: &Sampling,
    variant: Variant,
) -> Result<Check, HeckeError> {
    let t = dl_dynamical_variant(group, i, variant)?;
    compare_elements(&t.multiply(&t)?, &HeckeElement::identity(group), s, i as u64)
}

/// `(T^L_α)² = 1`.
pub fn verify_dual_quadratic(group: &Arc<WeylGroup>, i: usize, s: &Sampling) -> Result<Check, HeckeError> {
    let t = dl_dual_langlands_variant(group, i, Variant::Exact)?;
    compare_elements(&t.multiply(&t)?, &HeckeElement::identity(group), s, 100 + i as u64)
}

/// The two alternating words `ijij…` and `jiji…` of length `m_ij`.
pub fn braid_words(group: &WeylGroup, i: usize, j: usize) -> Result<(Vec<usize>, Vec<usize>), DatumError> {
    if i == j {
        return Err(DatumError::SameIndex(i));
    }
    let m = group.datum().braid_order(i, j)?;
    let alt = |a: usize, b: usize| (0..m).map(|k| if k % 2 == 0 { a } else { b }).collect();
    Ok((alt(i, j), alt(j, i)))
}

/// `T_iT_jT_i⋯ = T_jT_iT_j⋯` with `m_ij` factors on each side.
pub fn verify_braid(group: &Arc<WeylGroup>, i: usize, j: usize, s: &Sampling) -> Result<Check, HeckeError> {
    verify_braid_variant(group, i, j, s, Variant::Exact)
}

pub fn verify_braid_variant(
    group: &Arc<WeylGroup>,
    i: usize,
    j: usize,
    s: &Sampling,
    variant: Variant,
) -> Result<Check, HeckeError> {
    let (u, v) = braid_words(group, i, j)?;
    let a = t_word_variant(group, &u, variant)?;
    let b = t_word_variant(group, &v, variant)?;
    compare_elements(&a, &b, s, 1000 + (i * group.rank() + j) as u64)
}

/// Compare `T_w` built from the first reduced word of `w` with the ones
/// built from other reduced words: all of them if there are at most
/// `max_words`, otherwise `max_words − 1` evenly spaced ones including the
/// last.
pub fn verify_reduced_words(
    group: &Arc<WeylGroup>,
    w: usize,
    max_words: usize,
    s: &Sampling,
) -> Result<Check, HeckeError> {
    let words = group.reduced_words(w);
    let picked: BTreeSet<usize> = if words.len() <= max_words {
        (1..words.len()).collect()
    } else {
        let m = max_words.max(2) - 1;
        (1..=m).map(|k| k * (words.len() - 1) / m).collect()
    };
    let reference = t_word(group, &words[0])?;
    let mut check = Check::new();
    for k in picked {
        let other = t_word(group, &words[k])?;
        check = check.merge(compare_elements(&reference, &other, s, 2000 + k as u64)?);
    }
    Ok(check)
}

/// `Ψ(T_α)(g ⊗ f) = T_α(f·g)` for `f` depending only on `z`.
pub fn verify_psi_compat(
    group: &Arc<WeylGroup>,
    i: usize,
    g: &MeroExpr,
    f: &MeroExpr,
    s: &Sampling,
) -> Result<Check, HeckeError> {
    if f.depends_on_lambda() {
        return Err(HeckeError::LambdaDependent);
    }
    psi_compat_unchecked(group, i, g, f, s)
}

/// [`verify_psi_compat`] without the restriction on `f`.
pub fn psi_compat_unchecked(
    group: &Arc<WeylGroup>,
    i: usize,
    g: &MeroExpr,
    f: &MeroExpr,
    s: &Sampling,
) -> Result<Check, HeckeError> {
    let t = dl_dynamical(group, i)?;
    let lhs = psi(&t).act_on_pair(g, f)?;
    let rhs = t.act_on_section(&(f.clone() * g.clone()))?;
    compare_sections(&lhs, &rhs, group.rank(), s, 3000 + i as u64)
}

/// The two scalar identities behind the inverse relation between `T_α` and
/// `T^L_α`: `𝔭 + 𝔮·ˢˢ𝔭^L = 0` and `𝔮·ˢˢ𝔮^L = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjunctionCheck {
    pub p_identity: Check,
    pub q_identity: Check,
}

pub fn verify_adjunction_identity(
    group: &Arc<WeylGroup>,
    i: usize,
    s: &Sampling,
) -> Result<AdjunctionCheck, HeckeError> {
    verify_adjunction_variant(group, i, s, Variant::Exact)
}

pub fn verify_adjunction_variant(
    group: &Arc<WeylGroup>,
    i: usize,
    s: &Sampling,
    variant: Variant,
) -> Result<AdjunctionCheck, HeckeError> {
    let t = dl_dynamical(group, i)?;
    let tl = dl_dual_langlands_variant(group, i, variant)?;
    let (e, si) = (group.identity(), group.generator(i));
    let coeff = |h: &HeckeElement, key: Key| h.coeff(key.0, key.1).cloned().unwrap_or_else(MeroExpr::zero);
    let (p, q) = (coeff(&t, (e, si)), coeff(&t, (si, si)));
    let (pl, ql) = (coeff(&tl, (si, e)), coeff(&tl, (si, si)));
    let s_el = group.element(si);
    let p_id = p + q.clone() * pl.twist(s_el, s_el)?;
    let q_id = q * ql.twist(s_el, s_el)?;
    Ok(AdjunctionCheck {
        p_identity: compare_sections(&p_id, &MeroExpr::zero(), group.rank(), s, 4000 + i as u64)?,
        q_identity: compare_sections(&q_id, &MeroExpr::one(), group.rank(), s, 4100 + i as u64)?,
    })
}

/// A product of two theta factors of random nonzero integer forms in
/// `(z, λ, ℏ)`, optionally without `λ`.
pub fn random_section(rank: usize, with_lambda: bool, rng: &mut impl Rng) -> MeroExpr {
    let mut form = || loop {
        let z: Vec<i64> = (0..rank).map(|_| rng.random_range(-2..=2)).collect();
        let lam: Vec<i64> = (0..rank).map(|_| if with_lambda { rng.random_range(-2..=2) } else { 0 }).collect();
        let f = LinearForm::new(z, lam, rng.random_range(-1..=1));
        if f.has_z() || f.has_lam() {
            return f;
        }
    };
    MeroExpr::theta(form()) * MeroExpr::theta(form())
}

/// Smallest regularity slope of `T_α(f)` along `z_α = 0` over sampled
/// points of the divisor.
pub fn verify_pole_cancellation(
    group: &Arc<WeylGroup>,
    i: usize,
    f: &MeroExpr,
    s: &Sampling,
    task: u64,
) -> Result<f64, HeckeError> {
    let t = dl_dynamical(group, i)?;
    let e = t.act_on_section(f)?;
    let divisor = LinearForm::z(group.datum().simple_root(i));
    let sampler = s.sampler(group.rank());
    let mut rng = s.rng(5000 + task);
    let mut worst = f64::INFINITY;
    for _ in 0..s.samples {
        let base = sampler.sample_on_divisor(&e.forms(), &divisor, &mut rng, &s.params)?;
        worst = worst.min(is_regular_along(&e, &divisor, &base, &s.params).slope);
    }
    Ok(worst)
}

/// `Γ(σ_i)·Γ(σ_j) = Γ(σ_i·σ_j)`.
pub fn verify_gamma_homomorphism(
    group: &Arc<WeylGroup>,
    i: usize,
    j: usize,
    s: &Sampling,
) -> Result<Check, HeckeError> {
    let (a, b) = (gkv_dual_generator(group, i)?, gkv_dual_generator(group, j)?);
    let lhs = gamma(&a)?.multiply(&gamma(&b)?)?;
    let rhs = gamma(&a.multiply(&b)?)?;
    compare_elements(&lhs, &rhs, s, 6000 + (i * group.rank() + j) as u64)
}

/// Residue conditions on `Σ a_{w,v} δ_w δ_v^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    /// Poles along `z_β = 0` and `λ_{β∨} = 0` are at most simple.
    PoleOrder,
    /// `Res_{z_β = 0}(a_{w,v} + a_{s_β w, v}) = 0`.
    ResidueZ,
    /// `Res_{λ_{β∨} = 0}(a_{w,v} + a_{w, s_β v}) = 0`.
    ResidueLambda,
    /// `a_{w,v}·θ(z_β)/θ(ℏ − z_β)` is regular along `z_β = ℏ` for `β ∈ Φ(w)`.
    ShiftedRegularity,
}

impl Condition {
    pub const ALL: [Condition; 4] =
        [Condition::PoleOrder, Condition::ResidueZ, Condition::ResidueLambda, Condition::ShiftedRegularity];

    pub fn tag(self) -> &'static str {
        match self {
            Condition::PoleOrder => "i",
            Condition::ResidueZ => "ii",
            Condition::ResidueLambda => "ii'",
            Condition::ShiftedRegularity => "iii",
        }
    }

    fn is_slope(self) -> bool {
        matches!(self, Condition::PoleOrder | Condition::ShiftedRegularity)
    }
}

/// Pass thresholds for [`verify_residue_conditions`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueThresholds {
    /// Largest accepted scaled residue of a pair sum.
    pub residue: f64,
    /// Smallest accepted slope along `z_β = 0` and `λ_{β∨} = 0`.
    pub pole_order_slope: f64,
    /// Smallest accepted slope along `z_β = ℏ`.
    pub regular_slope: f64,
}

impl Default for ResidueThresholds {
    fn default() -> Self {
        Self { residue: 1e-6, pole_order_slope: -1.1, regular_slope: crate::merom::REGULAR_SLOPE }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidueWitness {
    pub key: (String, String),
    pub divisor: LinearForm,
    pub value: f64,
    pub point: Option<EvalPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub condition: Condition,
    pub pass: bool,
    pub checks: usize,
    /// Largest scaled residue for residue conditions, smallest slope for
    /// slope conditions.
    pub worst: f64,
    /// Smallest and largest slope seen, for slope conditions.
    pub slope_range: Option<(f64, f64)>,
    pub witness: Option<ResidueWitness>,
}

impl ConditionReport {
    fn new(condition: Condition) -> Self {
        let worst = if condition.is_slope() { f64::INFINITY } else { 0.0 };
        Self { condition, pass: true, checks: 0, worst, slope_range: None, witness: None }
    }

    fn record(&mut self, value: f64, ok: bool, witness: impl FnOnce() -> ResidueWitness) {
        self.checks += 1;
        let value = if value.is_nan() {
            if self.condition.is_slope() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        } else {
            value
        };
        if self.condition.is_slope() {
            let (lo, hi) = self.slope_range.unwrap_or((value, value));
            self.slope_range = Some((lo.min(value), hi.max(value)));
        }
        let worse = if self.condition.is_slope() { value < self.worst } else { value > self.worst };
        if !ok && self.pass {
            self.pass = false;
            self.worst = value;
            self.witness = Some(witness());
        } else if worse && (self.pass == ok) {
            self.worst = value;
            if !ok {
                self.witness = Some(witness());
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidueReport {
    pub conditions: Vec<ConditionReport>,
}

impl ResidueReport {
    pub fn pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn get(&self, condition: Condition) -> &ConditionReport {
        self.conditions.iter().find(|c| c.condition == condition).expect("all conditions reported")
    }
}

/// Index of the reflection `s_β` for the `k`-th positive root.
pub fn reflection_index(group: &WeylGroup, k: usize) -> usize {
    let d = group.datum();
    let (beta, beta_v) = (&d.positive_roots()[k], &d.positive_coroots()[k]);
    let n = d.rank();
    let rows: Vec<Vec<i64>> =
        (0..n).map(|r| (0..n).map(|c| i64::from(r == c) - beta[r] * beta_v[c]).collect()).collect();
    // mat_on_star acts on columns: x ↦ x − ⟨x, β∨⟩β
    let m = crate::root_datum::IntMatrix::from_rows(&rows);
    group.index_of(&m).expect("positive root reflections lie in W")
}

/// Check conditions i), ii), ii') and iii) along every positive root and
/// coroot divisor, with `samples` base points per divisor and key.
///
/// Divisors `λ_{β∨} = ℏ` are not probed: operators such as `T_α` have
/// poles there and are certified only away from them.
pub fn verify_residue_conditions(h: &HeckeElement, s: &Sampling) -> ResidueReport {
    verify_residue_conditions_with(h, s, ResidueThresholds::default())
}

pub fn verify_residue_conditions_with(h: &HeckeElement, s: &Sampling, thresholds: ResidueThresholds) -> ResidueReport {
    let group = h.group();
    let d = group.datum();
    let n = d.rank();
    let sampler = s.sampler(n);
    let mut reports: Vec<ConditionReport> = Condition::ALL.iter().map(|&c| ConditionReport::new(c)).collect();
    let mut task = 7000u64;
    let zero = MeroExpr::zero();
    let coeff = |key: Key| h.coeff(key.0, key.1).unwrap_or(&zero);

    for k in 0..d.positive_roots().len() {
        let s_beta = reflection_index(group, k);
        let z_div = LinearForm::z(&d.positive_roots()[k]);
        let l_div = LinearForm::lam(&d.positive_coroots()[k]);

        for (cond, div, partner) in [
            (
                Condition::ResidueZ,
                &z_div,
                (|g: &WeylGroup, sb, (w, v): Key| (g.mul(sb, w), v)) as fn(&WeylGroup, usize, Key) -> Key,
            ),
            (Condition::ResidueLambda, &l_div, |g: &WeylGroup, sb, (w, v): Key| (w, g.mul(sb, v))),
        ] {
            let mut pairs: BTreeSet<(Key, Key)> = BTreeSet::new();
            for key in h.keys() {
                let other = partner(group, s_beta, key);
                pairs.insert((key.min(other), key.max(other)));
            }
            for (a_key, b_key) in pairs {
                let (a, b) = (coeff(a_key), coeff(b_key));
                let sum = a.clone() + b.clone();
                let mut rng = s.rng(task);
                task += 1;
                let name = h.key_name(a_key);
                let report = &mut reports[cond as usize];
                for _ in 0..s.samples {
                    let base = match sampler.sample_on_divisor(&sum.forms(), div, &mut rng, &s.params) {
                        Ok(p) => p,
                        Err(_) => {
                            report.record(f64::INFINITY, false, || ResidueWitness {
                                key: name.clone(),
                                divisor: div.clone(),
                                value: f64::INFINITY,
                                point: None,
                            });
                            break;
                        }
                    };
                    let residual = (|| -> Result<f64, ExprError> {
                        let rs = residue_along(&sum, div, &base, &s.params)?;
                        let ra = residue_along(a, div, &base, &s.params)?;
                        let rb = residue_along(b, div, &base, &s.params)?;
                        Ok(rs.norm() / ra.norm().max(rb.norm()).max(1.0))
                    })()
                    .unwrap_or(f64::INFINITY);
                    report.record(residual, residual < thresholds.residue, || ResidueWitness {
                        key: name.clone(),
                        divisor: div.clone(),
                        value: residual,
                        point: Some(base.clone()),
                    });
                }
            }
        }

        for key in h.keys().collect::<Vec<_>>() {
            let a = coeff(key);
            let name = h.key_name(key);
            for div in [&z_div, &l_div] {
                let mut rng = s.rng(task);
                task += 1;
                probe_slopes(
                    &mut reports[Condition::PoleOrder as usize],
                    a,
                    div,
                    &name,
                    thresholds.pole_order_slope,
                    s,
                    &sampler,
                    &mut rng,
                );
            }
            if group.inversion_indices(key.0).contains(&k) {
                let hb = LinearForm::hbar(n, 1);
                let e = a.clone() * MeroExpr::theta(z_div.clone()) / MeroExpr::theta(&hb - &z_div);
                let div = &z_div - &hb;
                let mut rng = s.rng(task);
                task += 1;
                probe_slopes(
                    &mut reports[Condition::ShiftedRegularity as usize],
                    &e,
                    &div,
                    &name,
                    thresholds.regular_slope,
                    s,
                    &sampler,
                    &mut rng,
                );
            }
        }
    }
    ResidueReport { conditions: reports }
}

#[allow(clippy::too_many_arguments)]
fn probe_slopes(
    report: &mut ConditionReport,
    e: &MeroExpr,
    div: &LinearForm,
    name: &(String, String),
    min_slope: f64,
    s: &Sampling,
    sampler: &PointSampler,
    rng: &mut ChaCha8Rng,
) {
    for _ in 0..s.samples {
        let (slope, point) = match sampler.sample_on_divisor(&e.forms(), div, rng, &s.params) {
            Ok(base) => (is_regular_along(e, div, &base, &s.params).slope, Some(base)),
            Err(_) => (f64::NEG_INFINITY, None),
        };
        report.record(slope, slope >= min_slope, || ResidueWitness {
            key: name.clone(),
            divisor: div.clone(),
            value: slope,
            point: point.clone(),
        });
        if point.is_none() {
            break;
        }
    }
}

/// `(1/θ(z_α))·δ_α`, which violates condition ii) along `z_α = 0`.
pub fn canonical_failing_element(group: &Arc<WeylGroup>, i: usize) -> Result<HeckeElement, HeckeError> {
    group.datum().check_index(i)?;
    let za = LinearForm::z(group.datum().simple_root(i));
    Ok(HeckeElement::delta(group, group.generator(i), group.identity(), MeroExpr::one() / MeroExpr::theta(za)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::root_datum::{Isogeny, RootDatum};

    fn group(label: &str) -> Arc<WeylGroup> {
        Arc::new(WeylGroup::new(RootDatum::build(label, Isogeny::Adjoint).unwrap()))
    }

    fn sampling(samples: usize) -> Sampling {
        Sampling::new(ThetaParams::default(), Complex64::new(0.1183, 0.2471), 1, samples)
    }

    #[test]
    fn reflections_of_positive_roots() {
        let g = group("B2");
        for k in 0..g.datum().positive_roots().len() {
            let r = reflection_index(&g, k);
            assert_eq!(g.mul(r, r), g.identity());
            let beta = &g.datum().positive_roots()[k];
            let image = g.element(r).mat_on_star().apply(beta);
            assert_eq!(image, beta.iter().map(|x| -x).collect::<Vec<_>>());
        }
        assert_eq!(reflection_index(&g, 0), g.generator(0));
    }

    #[test]
    fn identity_passes_all_conditions() {
        let g = group("A2");
        let r = verify_residue_conditions(&HeckeElement::identity(&g), &sampling(3));
        assert!(r.pass(), "{r:?}");
    }

    #[test]
    fn dl_operator_passes_all_conditions() {
        for label in ["A1", "A2", "B2"] {
            let g = group(label);
            for i in 0..g.rank() {
                let r = verify_residue_conditions(&dl_dynamical(&g, i).unwrap(), &sampling(4));
                assert!(r.pass(), "{label} {i}: {r:#?}");
                let (lo, hi) = r.get(Condition::ShiftedRegularity).slope_range.unwrap();
                assert!(lo >= -0.1 && hi <= 0.1, "{lo} {hi}");
            }
        }
    }

    #[test]
    fn failing_element_is_rejected() {
        let g = group("A1");
        let r = verify_residue_conditions(&canonical_failing_element(&g, 0).unwrap(), &sampling(4));
        let ii = r.get(Condition::ResidueZ);
        assert!(!ii.pass);
        assert!((ii.worst - 1.0).abs() < 0.1, "{}", ii.worst);
        assert!(ii.witness.is_some());
    }

    #[test]
    fn adjunction_identity() {
        let g = group("A1");
        let c = verify_adjunction_identity(&g, 0, &sampling(10)).unwrap();
        assert!(c.p_identity.passes(1e-10) && c.q_identity.passes(1e-10), "{c:?}");
        let bad = verify_adjunction_variant(&g, 0, &sampling(10), Variant::SignFlipped).unwrap();
        assert!(bad.p_identity.max_residual > 1e-3);
    }

    #[test]
    fn psi_rejects_lambda_dependent_sections() {
        let g = group("A1");
        let f = MeroExpr::theta(LinearForm::lam(&[2]));
        assert_eq!(verify_psi_compat(&g, 0, &MeroExpr::one(), &f, &sampling(2)), Err(HeckeError::LambdaDependent));
    }

    #[test]
    fn braid_words_are_alternating() {
        let g = group("G2");
        let (a, b) = braid_words(&g, 0, 1).unwrap();
        assert_eq!(a, vec![0, 1, 0, 1, 0, 1]);
        assert_eq!(b, vec![1, 0, 1, 0, 1, 0]);
        assert_eq!(braid_words(&g, 1, 1), Err(DatumError::SameIndex(1)));
    }
}
