//! Meromorphic functions of `(z, λ, ℏ)` built from theta factors of integer
//! linear forms.
//!
//! Expressions are plain trees and are never simplified: every identity in
//! this crate is established by evaluating both sides at sampled points of
//! the universal cover `ℂⁿ × ℂⁿ`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::root_datum::WeylElement;
use crate::theta::{theta, ThetaError, ThetaParams};

/// Default lower bound on `|θ(L)|` for denominator factors and guard forms.
pub const DEFAULT_GUARD: f64 = 1e-3;
/// Default first offset from a divisor for residues and regularity probes.
pub const DEFAULT_EPS0: f64 = 1e-4;
/// Number of sample offsets `ε₀·2^{−k}` used by [`residue_along`].
pub const RESIDUE_LEVELS: usize = 4;
/// [`residue_along`] keeps `ε₀` below the clearance to the nearest other
/// theta divisor divided by this factor.
pub const RESIDUE_REACH: f64 = 100.0;
/// Target relative error of [`residue_along`].
pub const RESIDUE_ACCURACY: f64 = 1e-10;
/// Factor by which [`residue_along`] shrinks `ε₀` when the target is missed.
pub const RESIDUE_REFINE: f64 = 10.0;
/// Smallest first offset tried by [`residue_along`].
pub const RESIDUE_MIN_EPS: f64 = 1e-7;
/// Number of halvings used by [`is_regular_along`].
pub const REGULARITY_STEPS: usize = 6;
/// Slope at or above which a function counts as regular along a divisor.
pub const REGULAR_SLOPE: f64 = -0.1;
/// Relative spread between the estimates at `ε` and `ε/2` above which a
/// residue is rejected as a higher-order pole. At a double pole the spread
/// is of order `1/ε`.
pub const RESIDUE_STABILITY: f64 = 1e-2;
/// Attempts made by the point samplers before giving up.
pub const SAMPLE_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("evaluation too close to the divisor of {form:?} (|theta| = {magnitude:.3e})")]
    NearDivisor { form: Option<LinearForm>, magnitude: f64 },
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("residue along {form} does not converge (spread {spread:.3e}); pole of order >= 2?")]
    HigherOrderPole { form: LinearForm, spread: f64 },
    #[error("linear form {0} has no z or lambda part")]
    DegenerateForm(LinearForm),
    #[error("no admissible point found after {0} attempts")]
    RejectionBudget(usize),
}

/// `⟨z_coeffs, z⟩ + ⟨lam_coeffs, λ⟩ + h_coeff·ℏ`.
///
/// `z_coeffs` lives in `X*` and pairs with `z ∈ X_* ⊗ ℂ`; `lam_coeffs`
/// lives in `X_*` and pairs with `λ ∈ X* ⊗ ℂ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    z: Vec<i64>,
    lam: Vec<i64>,
    h: i64,
}

impl LinearForm {
    pub fn new(z: Vec<i64>, lam: Vec<i64>, h: i64) -> Self {
        assert_eq!(z.len(), lam.len(), "z and lambda parts must have the same rank");
        Self { z, lam, h }
    }

    /// `z_μ` for `μ ∈ X*`.
    pub fn z(mu: &[i64]) -> Self {
        Self::new(mu.to_vec(), vec![0; mu.len()], 0)
    }

    /// `λ_{μ∨}` for `μ∨ ∈ X_*`.
    pub fn lam(mu_v: &[i64]) -> Self {
        Self::new(vec![0; mu_v.len()], mu_v.to_vec(), 0)
    }

    /// `c·ℏ` in rank `n`.
    pub fn hbar(rank: usize, c: i64) -> Self {
        Self::new(vec![0; rank], vec![0; rank], c)
    }

    pub fn rank(&self) -> usize {
        self.z.len()
    }

    pub fn z_coeffs(&self) -> &[i64] {
        &self.z
    }

    pub fn lam_coeffs(&self) -> &[i64] {
        &self.lam
    }

    pub fn h_coeff(&self) -> i64 {
        self.h
    }

    pub fn has_z(&self) -> bool {
        self.z.iter().any(|&c| c != 0)
    }

    pub fn has_lam(&self) -> bool {
        self.lam.iter().any(|&c| c != 0)
    }

    pub fn is_zero(&self) -> bool {
        !self.has_z() && !self.has_lam() && self.h == 0
    }

    pub fn scaled(&self, c: i64) -> Self {
        Self { z: self.z.iter().map(|x| c * x).collect(), lam: self.lam.iter().map(|x| c * x).collect(), h: c * self.h }
    }

    /// True if `self = c·other` for some rational `c`, i.e. `self` vanishes
    /// identically on the divisor `other = 0`.
    pub fn is_multiple_of(&self, other: &LinearForm) -> bool {
        let a: Vec<i64> = self.z.iter().chain(&self.lam).copied().chain([self.h]).collect();
        let b: Vec<i64> = other.z.iter().chain(&other.lam).copied().chain([other.h]).collect();
        if b.iter().all(|&x| x == 0) {
            return a.iter().all(|&x| x == 0);
        }
        (0..a.len()).all(|i| (0..a.len()).all(|j| a[i] * b[j] == a[j] * b[i]))
    }

    /// Exchange the `z` and `λ` parts, as when passing to the Langlands dual
    /// datum.
    pub fn swap_sides(&self) -> Self {
        Self { z: self.lam.clone(), lam: self.z.clone(), h: self.h }
    }

    /// `L ↦ L∘(w⁻¹, v⁻¹)`: `(a, b, c) ↦ (w·a, v·b, c)`.
    pub fn twisted(&self, w: &WeylElement, v: &WeylElement) -> Result<Self, ExprError> {
        let n = self.rank();
        for m in [w.mat_on_star(), v.mat_on_costar()] {
            if m.dim() != n {
                return Err(ExprError::RankMismatch { expected: n, found: m.dim() });
            }
        }
        Ok(Self { z: w.mat_on_star().apply(&self.z), lam: v.mat_on_costar().apply(&self.lam), h: self.h })
    }

    pub fn eval(&self, p: &EvalPoint) -> Result<Complex64, ExprError> {
        if p.rank() != self.rank() {
            return Err(ExprError::RankMismatch { expected: self.rank(), found: p.rank() });
        }
        let mut acc = p.h * self.h as f64;
        for (c, x) in self.z.iter().zip(&p.z) {
            acc += x * *c as f64;
        }
        for (c, x) in self.lam.iter().zip(&p.lam) {
            acc += x * *c as f64;
        }
        Ok(acc)
    }

    /// Direction `d` in `(z, λ)` space with `L(d) = 1`: `a/⟨a, a⟩` on the
    /// `z` side when the form has a `z` part, otherwise `b/⟨b, b⟩` on the
    /// `λ` side.
    pub fn unit_direction(&self) -> Result<(Vec<f64>, Vec<f64>), ExprError> {
        let n = self.rank();
        let norm = |v: &[i64]| v.iter().map(|x| x * x).sum::<i64>() as f64;
        if self.has_z() {
            let s = norm(&self.z);
            Ok((self.z.iter().map(|&x| x as f64 / s).collect(), vec![0.0; n]))
        } else if self.has_lam() {
            let s = norm(&self.lam);
            Ok((vec![0.0; n], self.lam.iter().map(|&x| x as f64 / s).collect()))
        } else {
            Err(ExprError::DegenerateForm(self.clone()))
        }
    }
}

impl Add for &LinearForm {
    type Output = LinearForm;

    fn add(self, rhs: &LinearForm) -> LinearForm {
        assert_eq!(self.rank(), rhs.rank());
        LinearForm {
            z: self.z.iter().zip(&rhs.z).map(|(a, b)| a + b).collect(),
            lam: self.lam.iter().zip(&rhs.lam).map(|(a, b)| a + b).collect(),
            h: self.h + rhs.h,
        }
    }
}

impl Sub for &LinearForm {
    type Output = LinearForm;

    fn sub(self, rhs: &LinearForm) -> LinearForm {
        self + &rhs.scaled(-1)
    }
}

impl Neg for &LinearForm {
    type Output = LinearForm;

    fn neg(self) -> LinearForm {
        self.scaled(-1)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(i64, String)> = Vec::new();
        for (i, &c) in self.z.iter().enumerate() {
            terms.push((c, format!("z{}", i + 1)));
        }
        for (i, &c) in self.lam.iter().enumerate() {
            terms.push((c, format!("l{}", i + 1)));
        }
        terms.push((self.h, "h".into()));
        let mut out = String::new();
        for (c, name) in terms.into_iter().filter(|(c, _)| *c != 0) {
            let sign = if c < 0 {
                "-"
            } else if out.is_empty() {
                ""
            } else {
                "+"
            };
            let mag = c.abs();
            if mag == 1 {
                out.push_str(&format!("{sign}{name}"));
            } else {
                out.push_str(&format!("{sign}{mag}{name}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

/// A point `(z, λ, ℏ)` of the universal cover.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalPoint {
    pub z: Vec<Complex64>,
    pub lam: Vec<Complex64>,
    pub h: Complex64,
}

impl EvalPoint {
    pub fn new(z: Vec<Complex64>, lam: Vec<Complex64>, h: Complex64) -> Self {
        assert_eq!(z.len(), lam.len());
        Self { z, lam, h }
    }

    pub fn rank(&self) -> usize {
        self.z.len()
    }

    /// `(w⁻¹z, v⁻¹λ)`, so that `f(p.acted(w, v)) = (ʷᵛf)(p)`.
    pub fn acted(&self, w: &WeylElement, v: &WeylElement) -> Self {
        Self {
            z: w.mat_on_star().apply_transpose(&self.z),
            lam: v.mat_on_costar().apply_transpose(&self.lam),
            h: self.h,
        }
    }

    /// `self + t·(dz, dλ)`.
    pub fn moved(&self, dz: &[f64], dlam: &[f64], t: Complex64) -> Self {
        Self {
            z: self.z.iter().zip(dz).map(|(x, d)| x + t * d).collect(),
            lam: self.lam.iter().zip(dlam).map(|(x, d)| x + t * d).collect(),
            h: self.h,
        }
    }

    /// The point on `{form = value}` reached from `self` along the form's
    /// unit direction.
    pub fn on_level(&self, form: &LinearForm, value: Complex64) -> Result<Self, ExprError> {
        let (dz, dl) = form.unit_direction()?;
        let current = form.eval(self)?;
        Ok(self.moved(&dz, &dl, value - current))
    }
}

/// Expression tree of a meromorphic function.
#[derive(Debug, Clone, PartialEq)]
pub enum MeroExpr {
    Theta(LinearForm),
    Const(Complex64),
    Sum(Vec<MeroExpr>),
    Prod(Vec<MeroExpr>),
    Quot(Box<MeroExpr>, Box<MeroExpr>),
    Neg(Box<MeroExpr>),
}

impl MeroExpr {
    pub fn theta(form: LinearForm) -> Self {
        MeroExpr::Theta(form)
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        MeroExpr::Const(c.into())
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn sum(terms: impl IntoIterator<Item = MeroExpr>) -> Self {
        MeroExpr::Sum(terms.into_iter().collect())
    }

    pub fn prod(factors: impl IntoIterator<Item = MeroExpr>) -> Self {
        MeroExpr::Prod(factors.into_iter().collect())
    }

    pub fn quot(num: MeroExpr, den: MeroExpr) -> Self {
        MeroExpr::Quot(Box::new(num), Box::new(den))
    }

    /// `∏θ(num) / ∏θ(den)`.
    pub fn theta_ratio(num: &[LinearForm], den: &[LinearForm]) -> Self {
        Self::quot(
            Self::prod(num.iter().cloned().map(MeroExpr::Theta)),
            Self::prod(den.iter().cloned().map(MeroExpr::Theta)),
        )
    }

    /// Structurally the constant zero.
    pub fn is_structural_zero(&self) -> bool {
        matches!(self, MeroExpr::Const(c) if *c == Complex64::new(0.0, 0.0))
    }

    /// Every linear form appearing under a theta, in tree order.
    pub fn forms(&self) -> Vec<LinearForm> {
        let mut out = Vec::new();
        self.collect_forms(&mut out);
        out
    }

    fn collect_forms(&self, out: &mut Vec<LinearForm>) {
        match self {
            MeroExpr::Theta(f) => out.push(f.clone()),
            MeroExpr::Const(_) => {}
            MeroExpr::Sum(v) | MeroExpr::Prod(v) => v.iter().for_each(|e| e.collect_forms(out)),
            MeroExpr::Quot(a, b) => {
                a.collect_forms(out);
                b.collect_forms(out);
            }
            MeroExpr::Neg(a) => a.collect_forms(out),
        }
    }

    pub fn depends_on_lambda(&self) -> bool {
        self.forms().iter().any(LinearForm::has_lam)
    }

    pub fn depends_on_z(&self) -> bool {
        self.forms().iter().any(LinearForm::has_z)
    }

    pub fn node_count(&self) -> usize {
        match self {
            MeroExpr::Theta(_) | MeroExpr::Const(_) => 1,
            MeroExpr::Sum(v) | MeroExpr::Prod(v) => 1 + v.iter().map(Self::node_count).sum::<usize>(),
            MeroExpr::Quot(a, b) => 1 + a.node_count() + b.node_count(),
            MeroExpr::Neg(a) => 1 + a.node_count(),
        }
    }

    /// `ʷᵛf(z, λ) = f(w⁻¹z, v⁻¹λ)`, realized on the coefficients of every
    /// linear form.
    pub fn twist(&self, w: &WeylElement, v: &WeylElement) -> Result<Self, ExprError> {
        Ok(match self {
            MeroExpr::Theta(f) => MeroExpr::Theta(f.twisted(w, v)?),
            MeroExpr::Const(c) => MeroExpr::Const(*c),
            MeroExpr::Sum(t) => MeroExpr::Sum(t.iter().map(|e| e.twist(w, v)).collect::<Result<_, _>>()?),
            MeroExpr::Prod(t) => MeroExpr::Prod(t.iter().map(|e| e.twist(w, v)).collect::<Result<_, _>>()?),
            MeroExpr::Quot(a, b) => Self::quot(a.twist(w, v)?, b.twist(w, v)?),
            MeroExpr::Neg(a) => MeroExpr::Neg(Box::new(a.twist(w, v)?)),
        })
    }

    /// Apply `f` to every linear form.
    pub fn map_forms(&self, f: &impl Fn(&LinearForm) -> LinearForm) -> Self {
        match self {
            MeroExpr::Theta(l) => MeroExpr::Theta(f(l)),
            MeroExpr::Const(c) => MeroExpr::Const(*c),
            MeroExpr::Sum(t) => MeroExpr::Sum(t.iter().map(|e| e.map_forms(f)).collect()),
            MeroExpr::Prod(t) => MeroExpr::Prod(t.iter().map(|e| e.map_forms(f)).collect()),
            MeroExpr::Quot(a, b) => Self::quot(a.map_forms(f), b.map_forms(f)),
            MeroExpr::Neg(a) => MeroExpr::Neg(Box::new(a.map_forms(f))),
        }
    }

    /// Evaluate with the default guard: any denominator theta factor with
    /// `|θ| < DEFAULT_GUARD` is an error.
    pub fn eval(&self, p: &EvalPoint, params: &ThetaParams) -> Result<Complex64, ExprError> {
        self.eval_guarded(p, params, DEFAULT_GUARD)
    }

    /// Evaluate, rejecting denominator theta factors smaller than `guard`.
    /// A guard of zero only rejects exact division by zero.
    pub fn eval_guarded(&self, p: &EvalPoint, params: &ThetaParams, guard: f64) -> Result<Complex64, ExprError> {
        self.eval_inner(p, params, guard, false)
    }

    fn eval_inner(
        &self,
        p: &EvalPoint,
        params: &ThetaParams,
        guard: f64,
        in_denominator: bool,
    ) -> Result<Complex64, ExprError> {
        match self {
            MeroExpr::Theta(f) => {
                let v = theta(f.eval(p)?, params)?;
                if in_denominator && v.norm() < guard {
                    return Err(ExprError::NearDivisor { form: Some(f.clone()), magnitude: v.norm() });
                }
                Ok(v)
            }
            MeroExpr::Const(c) => Ok(*c),
            MeroExpr::Sum(t) => t
                .iter()
                .try_fold(Complex64::new(0.0, 0.0), |acc, e| Ok(acc + e.eval_inner(p, params, guard, in_denominator)?)),
            MeroExpr::Prod(t) => t
                .iter()
                .try_fold(Complex64::new(1.0, 0.0), |acc, e| Ok(acc * e.eval_inner(p, params, guard, in_denominator)?)),
            MeroExpr::Quot(a, b) => {
                let num = a.eval_inner(p, params, guard, in_denominator)?;
                let den = b.eval_inner(p, params, guard, !in_denominator)?;
                if den.norm() == 0.0 || !den.norm().is_finite() {
                    let form = b.smallest_theta(p, params);
                    return Err(ExprError::NearDivisor { form, magnitude: den.norm() });
                }
                Ok(num / den)
            }
            MeroExpr::Neg(a) => Ok(-a.eval_inner(p, params, guard, in_denominator)?),
        }
    }

    fn smallest_theta(&self, p: &EvalPoint, params: &ThetaParams) -> Option<LinearForm> {
        self.forms()
            .into_iter()
            .filter_map(|f| {
                let v = f.eval(p).ok().and_then(|x| theta(x, params).ok())?;
                Some((v.norm(), f))
            })
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, f)| f)
    }
}

impl From<Complex64> for MeroExpr {
    fn from(c: Complex64) -> Self {
        MeroExpr::Const(c)
    }
}

impl From<LinearForm> for MeroExpr {
    fn from(f: LinearForm) -> Self {
        MeroExpr::Theta(f)
    }
}

impl Add for MeroExpr {
    type Output = MeroExpr;

    fn add(self, rhs: MeroExpr) -> MeroExpr {
        MeroExpr::Sum(vec![self, rhs])
    }
}

impl Sub for MeroExpr {
    type Output = MeroExpr;

    fn sub(self, rhs: MeroExpr) -> MeroExpr {
        MeroExpr::Sum(vec![self, MeroExpr::Neg(Box::new(rhs))])
    }
}

impl Mul for MeroExpr {
    type Output = MeroExpr;

    fn mul(self, rhs: MeroExpr) -> MeroExpr {
        MeroExpr::Prod(vec![self, rhs])
    }
}

impl Div for MeroExpr {
    type Output = MeroExpr;

    fn div(self, rhs: MeroExpr) -> MeroExpr {
        MeroExpr::quot(self, rhs)
    }
}

impl Neg for MeroExpr {
    type Output = MeroExpr;

    fn neg(self) -> MeroExpr {
        MeroExpr::Neg(Box::new(self))
    }
}

impl fmt::Display for MeroExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, t: &[MeroExpr], sep: &str| -> fmt::Result {
            f.write_str("(")?;
            for (k, e) in t.iter().enumerate() {
                if k > 0 {
                    f.write_str(sep)?;
                }
                write!(f, "{e}")?;
            }
            f.write_str(")")
        };
        match self {
            MeroExpr::Theta(l) => write!(f, "θ({l})"),
            MeroExpr::Const(c) if c.im == 0.0 => write!(f, "{}", c.re),
            MeroExpr::Const(c) => write!(f, "({c})"),
            MeroExpr::Sum(t) => join(f, t, " + "),
            MeroExpr::Prod(t) => join(f, t, "·"),
            MeroExpr::Quot(a, b) => write!(f, "{a}/{b}"),
            MeroExpr::Neg(a) => write!(f, "-{a}"),
        }
    }
}

/// `lim_{t→0} θ(t)·e(p(t))`, where `p(t)` moves `base` along the form's unit
/// direction so that `form(p(t)) = t`.
///
/// `g(t) = θ(t)·e(p(t))` is sampled at `t = ε₀·2^{−k}`,
/// `k < RESIDUE_LEVELS`, and extrapolated to `t = 0` by Neville's scheme.
/// The first-level estimates `2g(ε/2) − g(ε)` at `ε₀` and `ε₀/2` must agree,
/// which rules out poles of higher order.
///
/// `ε₀` starts at [`DEFAULT_EPS0`], reduced when another divisor of `e` passes
/// close to `base` (see [`divisor_clearance`]), and is divided by
/// [`RESIDUE_REFINE`] until the extrapolation error estimate drops below
/// `RESIDUE_ACCURACY·max(1, |residue|)` or `ε₀` reaches [`RESIDUE_MIN_EPS`].
pub fn residue_along(
    e: &MeroExpr,
    form: &LinearForm,
    base: &EvalPoint,
    params: &ThetaParams,
) -> Result<Complex64, ExprError> {
    let mut eps0 = DEFAULT_EPS0.min(divisor_clearance(e, form, base, params)? / RESIDUE_REACH);
    loop {
        let (value, err) = residue_estimate(e, form, base, params, eps0)?;
        if err <= RESIDUE_ACCURACY * value.norm().max(1.0) || eps0 <= RESIDUE_MIN_EPS {
            return Ok(value);
        }
        eps0 = (eps0 / RESIDUE_REFINE).max(RESIDUE_MIN_EPS);
    }
}

/// [`residue_along`] with a fixed first offset `eps0`.
pub fn residue_along_with(
    e: &MeroExpr,
    form: &LinearForm,
    base: &EvalPoint,
    params: &ThetaParams,
    eps0: f64,
) -> Result<Complex64, ExprError> {
    residue_estimate(e, form, base, params, eps0).map(|(value, _)| value)
}

/// Rough distance from `base`, along the unit direction of `form`, to the
/// nearest divisor of a theta factor of `e` other than `form` itself:
/// the minimum of `|θ(L(base))| / |∂L|` over forms `L` of `e`.
pub fn divisor_clearance(
    e: &MeroExpr,
    form: &LinearForm,
    base: &EvalPoint,
    params: &ThetaParams,
) -> Result<f64, ExprError> {
    let (dz, dl) = form.unit_direction()?;
    let mut clearance = f64::INFINITY;
    for l in e.forms() {
        if l.is_multiple_of(form) {
            continue;
        }
        let slope: f64 = l.z.iter().zip(&dz).chain(l.lam.iter().zip(&dl)).map(|(&a, &d)| a as f64 * d).sum();
        if slope == 0.0 {
            continue;
        }
        clearance = clearance.min(theta(l.eval(base)?, params)?.norm() / slope.abs());
    }
    Ok(clearance)
}

/// Extrapolated residue and an estimate of its error.
fn residue_estimate(
    e: &MeroExpr,
    form: &LinearForm,
    base: &EvalPoint,
    params: &ThetaParams,
    eps0: f64,
) -> Result<(Complex64, f64), ExprError> {
    let (dz, dl) = form.unit_direction()?;
    let offset = form.eval(base)?;
    let g = |t: f64| -> Result<Complex64, ExprError> {
        let p = base.moved(&dz, &dl, Complex64::new(t, 0.0) - offset);
        // the realized form value, so that rounding in p cancels against e
        let t = form.eval(&p)?;
        Ok(theta(t, params)? * e.eval_guarded(&p, params, 0.0)?)
    };
    let nodes: Vec<f64> = (0..RESIDUE_LEVELS).map(|k| eps0 / (1u64 << k) as f64).collect();
    let values = nodes.iter().map(|&t| g(t)).collect::<Result<Vec<_>, _>>()?;
    let coarse = values[1] * 2.0 - values[0];
    let fine = values[2] * 2.0 - values[1];
    let spread = (coarse - fine).norm();
    let scale = values.iter().fold(1.0_f64, |m, v| m.max(v.norm()));
    if !spread.is_finite() || spread > RESIDUE_STABILITY * scale {
        return Err(ExprError::HigherOrderPole { form: form.clone(), spread });
    }
    Ok(extrapolate_to_zero(&nodes, values))
}

/// Value at `t = 0` of the interpolating polynomial through `(nodes, values)`
/// (Neville's scheme), and its distance from the interpolant that drops the
/// first node.
fn extrapolate_to_zero(nodes: &[f64], mut values: Vec<Complex64>) -> (Complex64, f64) {
    let n = nodes.len();
    for m in 1..n {
        for i in 0..n - m {
            let (a, b) = (nodes[i], nodes[i + m]);
            values[i] = (values[i] * b - values[i + 1] * a) / (b - a);
        }
    }
    (values[0], (values[0] - values[1]).norm())
}

/// Outcome of [`is_regular_along`].
#[derive(Debug, Clone, PartialEq)]
pub struct Regularity {
    pub regular: bool,
    /// Least-squares slope of `log|e|` against `log ε`: about `−1` at a
    /// simple pole, `0` at a generic regular point, `+1` at a simple zero.
    pub slope: f64,
    pub magnitudes: Vec<f64>,
}

/// Probe `|e|` at form values `ε₀·2^{−k}`, `k = 0..=REGULARITY_STEPS`, and
/// fit the log–log slope.
pub fn is_regular_along(e: &MeroExpr, form: &LinearForm, base: &EvalPoint, params: &ThetaParams) -> Regularity {
    let steps: Vec<f64> = (0..=REGULARITY_STEPS).map(|k| DEFAULT_EPS0 / (1u64 << k) as f64).collect();
    let mut magnitudes = Vec::with_capacity(steps.len());
    for &t in &steps {
        let value = base.on_level(form, Complex64::new(t, 0.0)).and_then(|p| e.eval_guarded(&p, params, 0.0));
        match value {
            Ok(v) if v.norm().is_finite() => magnitudes.push(v.norm()),
            _ => {
                return Regularity { regular: false, slope: f64::NEG_INFINITY, magnitudes };
            }
        }
    }
    let xs: Vec<f64> = steps.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = magnitudes.iter().map(|m| m.max(f64::MIN_POSITIVE).ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    Regularity { regular: slope >= REGULAR_SLOPE, slope, magnitudes }
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Deterministic random stream for task `task` of a run seeded with `seed`.
pub fn task_rng(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}

/// Draws evaluation points from the fundamental box
/// `{a + bτ : a, b ∈ [0.05, 0.95]}` in every coordinate, with `ℏ` fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSampler {
    pub rank: usize,
    pub hbar: Complex64,
    pub guard: f64,
    pub budget: usize,
}

impl PointSampler {
    pub fn new(rank: usize, hbar: Complex64) -> Self {
        Self { rank, hbar, guard: DEFAULT_GUARD, budget: SAMPLE_BUDGET }
    }

    fn draw(&self, rng: &mut impl Rng, tau: Complex64) -> EvalPoint {
        let mut coord = || {
            let a: f64 = rng.random_range(0.05..0.95);
            let b: f64 = rng.random_range(0.05..0.95);
            tau * b + a
        };
        let z = (0..self.rank).map(|_| coord()).collect();
        let lam = (0..self.rank).map(|_| coord()).collect();
        EvalPoint::new(z, lam, self.hbar)
    }

    fn admissible(
        &self,
        p: &EvalPoint,
        guards: &[LinearForm],
        skip: Option<&LinearForm>,
        params: &ThetaParams,
    ) -> Result<bool, ExprError> {
        for g in guards {
            if skip.is_some_and(|d| g.is_multiple_of(d)) {
                continue;
            }
            match theta(g.eval(p)?, params) {
                Ok(v) if v.norm() > self.guard => {}
                Ok(_) | Err(ThetaError::Range { .. }) => return Ok(false),
                Err(e) => return Err(e.into()),
            }
        }
        Ok(true)
    }

    /// A point at which `|θ(L)| > guard` for every guard form `L`.
    pub fn sample(
        &self,
        guards: &[LinearForm],
        rng: &mut impl Rng,
        params: &ThetaParams,
    ) -> Result<EvalPoint, ExprError> {
        for _ in 0..self.budget {
            let p = self.draw(rng, params.tau());
            if self.admissible(&p, guards, None, params)? {
                return Ok(p);
            }
        }
        Err(ExprError::RejectionBudget(self.budget))
    }

    /// A point on `{divisor = 0}` at which every guard form not vanishing
    /// identically on the divisor satisfies `|θ(L)| > guard`.
    pub fn sample_on_divisor(
        &self,
        guards: &[LinearForm],
        divisor: &LinearForm,
        rng: &mut impl Rng,
        params: &ThetaParams,
    ) -> Result<EvalPoint, ExprError> {
        for _ in 0..self.budget {
            let p = self.draw(rng, params.tau()).on_level(divisor, Complex64::new(0.0, 0.0))?;
            if self.admissible(&p, guards, Some(divisor), params)? {
                return Ok(p);
            }
        }
        Err(ExprError::RejectionBudget(self.budget))
    }
}

/// One generic point for `guards`, drawn from stream `(seed, 0)`.
pub fn sample_generic_point(
    guards: &[LinearForm],
    rank: usize,
    hbar: Complex64,
    seed: u64,
    params: &ThetaParams,
) -> Result<EvalPoint, ExprError> {
    PointSampler::new(rank, hbar).sample(guards, &mut task_rng(seed, 0), params)
}
