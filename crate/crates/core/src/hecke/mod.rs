//! Elements `Σ a_{w,v} δ_w δ_v^d` of the twisted group algebra with
//! meromorphic coefficients, the dynamical Demazure–Lusztig operators and
//! the maps built from them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use thiserror::Error;

use crate::merom::{EvalPoint, ExprError, LinearForm, MeroExpr};
use crate::root_datum::{DatumError, RootDatum, WeylGroup};
use crate::theta::ThetaParams;

pub mod verify;

/// `(w, v)`: indices of `δ_w` and `δ_v^d` in the Weyl group.
pub type Key = (usize, usize);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeckeError {
    #[error("elements belong to different root data ({0} and {1})")]
    DatumMismatch(String, String),
    #[error(transparent)]
    Datum(#[from] DatumError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("term at ({w}, {v}) is not supported on dual-side deltas")]
    NotDualSupported { w: String, v: String },
    #[error("section depends on lambda")]
    LambdaDependent,
}

/// Which version of an operator to build. [`Variant::SignFlipped`] drops one
/// sign in the formula and exists only to exercise failure paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Exact,
    SignFlipped,
}

#[derive(Debug, Clone)]
pub struct HeckeElement {
    group: Arc<WeylGroup>,
    coeffs: BTreeMap<Key, MeroExpr>,
}

impl HeckeElement {
    /// Collect terms, summing repeated keys and dropping structural zeros.
    pub fn from_terms(group: &Arc<WeylGroup>, terms: impl IntoIterator<Item = (Key, MeroExpr)>) -> Self {
        let mut grouped: BTreeMap<Key, Vec<MeroExpr>> = BTreeMap::new();
        for (key, c) in terms {
            if !c.is_structural_zero() {
                grouped.entry(key).or_default().push(c);
            }
        }
        let coeffs = grouped
            .into_iter()
            .map(|(k, mut v)| (k, if v.len() == 1 { v.pop().unwrap() } else { MeroExpr::Sum(v) }))
            .collect();
        Self { group: Arc::clone(group), coeffs }
    }

    pub fn zero(group: &Arc<WeylGroup>) -> Self {
        Self::from_terms(group, [])
    }

    pub fn identity(group: &Arc<WeylGroup>) -> Self {
        Self::delta(group, group.identity(), group.identity(), MeroExpr::one())
    }

    /// `c·δ_w δ_v^d`.
    pub fn delta(group: &Arc<WeylGroup>, w: usize, v: usize, c: MeroExpr) -> Self {
        Self::from_terms(group, [((w, v), c)])
    }

    /// The function `f` as the element `f·δ_e δ_e^d`.
    pub fn scalar(group: &Arc<WeylGroup>, f: MeroExpr) -> Self {
        Self::delta(group, group.identity(), group.identity(), f)
    }

    pub fn group(&self) -> &Arc<WeylGroup> {
        &self.group
    }

    pub fn datum(&self) -> &RootDatum {
        self.group.datum()
    }

    pub fn coeff(&self, w: usize, v: usize) -> Option<&MeroExpr> {
        self.coeffs.get(&(w, v))
    }

    pub fn coeffs(&self) -> &BTreeMap<Key, MeroExpr> {
        &self.coeffs
    }

    pub fn keys(&self) -> impl Iterator<Item = Key> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `("s1", "e")`-style names of a key.
    pub fn key_name(&self, key: Key) -> (String, String) {
        (self.group.element(key.0).name(), self.group.element(key.1).name())
    }

    /// Every linear form in every coefficient, deduplicated.
    pub fn forms(&self) -> Vec<LinearForm> {
        let set: BTreeSet<LinearForm> = self.coeffs.values().flat_map(MeroExpr::forms).collect();
        set.into_iter().collect()
    }

    fn check_same_datum(&self, other: &HeckeElement) -> Result<(), HeckeError> {
        if Arc::ptr_eq(&self.group, &other.group) || self.datum() == other.datum() {
            Ok(())
        } else {
            Err(HeckeError::DatumMismatch(self.datum().label().into(), other.datum().label().into()))
        }
    }

    /// `(a δ_w δ_v^d)·(b δ_x δ_y^d) = a·ʷᵛb δ_{wx} δ_{vy}^d`, extended
    /// bilinearly.
    pub fn multiply(&self, other: &HeckeElement) -> Result<HeckeElement, HeckeError> {
        self.check_same_datum(other)?;
        let g = &self.group;
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for (&(w, v), a) in &self.coeffs {
            let (we, ve) = (g.element(w), g.element(v));
            for (&(x, y), b) in &other.coeffs {
                let c = a.clone() * b.twist(we, ve)?;
                terms.push(((g.mul(w, x), g.mul(v, y)), c));
            }
        }
        Ok(Self::from_terms(g, terms))
    }

    pub fn add(&self, other: &HeckeElement) -> Result<HeckeElement, HeckeError> {
        self.check_same_datum(other)?;
        let terms = self.coeffs.iter().chain(&other.coeffs).map(|(k, c)| (*k, c.clone()));
        Ok(Self::from_terms(&self.group, terms))
    }

    /// `Σ a_{w,v}·ʷᵛf`.
    pub fn act_on_section(&self, f: &MeroExpr) -> Result<MeroExpr, HeckeError> {
        let g = &self.group;
        let terms = self
            .coeffs
            .iter()
            .map(|(&(w, v), a)| Ok(a.clone() * f.twist(g.element(w), g.element(v))?))
            .collect::<Result<Vec<_>, ExprError>>()?;
        Ok(MeroExpr::sum(terms))
    }

    pub fn eval_coeffs(&self, p: &EvalPoint, params: &ThetaParams) -> Result<BTreeMap<Key, Complex64>, ExprError> {
        self.coeffs.iter().map(|(k, c)| Ok((*k, c.eval(p, params)?))).collect()
    }

    /// Largest `|a − b| / max(1, |a|, |b|)` over the union of keys, with
    /// missing keys read as zero.
    pub fn residual_at(&self, other: &HeckeElement, p: &EvalPoint, params: &ThetaParams) -> Result<f64, HeckeError> {
        self.check_same_datum(other)?;
        let a = self.eval_coeffs(p, params)?;
        let b = other.eval_coeffs(p, params)?;
        let zero = Complex64::new(0.0, 0.0);
        let keys: BTreeSet<&Key> = a.keys().chain(b.keys()).collect();
        Ok(keys
            .into_iter()
            .map(|k| {
                let (x, y) = (*a.get(k).unwrap_or(&zero), *b.get(k).unwrap_or(&zero));
                (x - y).norm() / x.norm().max(y.norm()).max(1.0)
            })
            .fold(0.0, f64::max))
    }

    /// The same element read in the Langlands dual datum: `(w, v) ↦ (v, w)`
    /// and `z ↔ λ` in every linear form.
    pub fn to_langlands_dual(&self, dual: &Arc<WeylGroup>) -> Result<HeckeElement, HeckeError> {
        let expected = self.datum().langlands_dual();
        if dual.datum() != &expected {
            return Err(HeckeError::DatumMismatch(expected.label().into(), dual.datum().label().into()));
        }
        let g = &self.group;
        let terms = self
            .coeffs
            .iter()
            .map(|(&(w, v), c)| {
                let w2 = dual.from_word(g.element(v).word())?;
                let v2 = dual.from_word(g.element(w).word())?;
                Ok(((w2, v2), c.map_forms(&LinearForm::swap_sides)))
            })
            .collect::<Result<Vec<_>, HeckeError>>()?;
        Ok(Self::from_terms(dual, terms))
    }
}

impl fmt::Display for HeckeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (k, (&key, c)) in self.coeffs.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let (w, v) = self.key_name(key);
            write!(f, "[{c}]·δ_{w}·δ^d_{v}")?;
        }
        Ok(())
    }
}

/// `(x, y, h)` = `(z_α, λ_{α∨}, ℏ)` for the simple root `α_i`.
fn simple_forms(group: &WeylGroup, i: usize) -> Result<(LinearForm, LinearForm, LinearForm), HeckeError> {
    let d = group.datum();
    d.check_index(i)?;
    Ok((LinearForm::z(d.simple_root(i)), LinearForm::lam(d.simple_coroot(i)), LinearForm::hbar(d.rank(), 1)))
}

fn th(f: LinearForm) -> MeroExpr {
    MeroExpr::theta(f)
}

/// The dynamical Demazure–Lusztig operator
/// `T_α = 𝔭 δ_α^d + 𝔮 δ_α δ_α^d` with
/// `𝔭 = θ(ℏ)θ(z_α − λ_{α∨}) / (θ(z_α)θ(ℏ − λ_{α∨}))` and
/// `𝔮 = θ(λ_{α∨})θ(ℏ − z_α) / (θ(z_α)θ(ℏ − λ_{α∨}))`.
pub fn dl_dynamical(group: &Arc<WeylGroup>, i: usize) -> Result<HeckeElement, HeckeError> {
    dl_dynamical_variant(group, i, Variant::Exact)
}

/// [`dl_dynamical`]; the sign-flipped variant uses `θ(ℏ + λ_{α∨})` in the
/// denominator of `𝔭`.
pub fn dl_dynamical_variant(group: &Arc<WeylGroup>, i: usize, variant: Variant) -> Result<HeckeElement, HeckeError> {
    let (x, y, h) = simple_forms(group, i)?;
    let p_den = match variant {
        Variant::Exact => &h - &y,
        Variant::SignFlipped => &h + &y,
    };
    let p = th(h.clone()) * th(&x - &y) / (th(x.clone()) * th(p_den));
    let q = th(y.clone()) * th(&h - &x) / (th(x) * th(&h - &y));
    let (e, s) = (group.identity(), group.generator(i));
    Ok(HeckeElement::from_terms(group, [((e, s), p), ((s, s), q)]))
}

/// The operator of the Langlands dual system written in the same
/// coordinates: `T_α^L = 𝔭^L δ_α + 𝔮^L δ_α δ_α^d` with
/// `𝔭^L = θ(ℏ)θ(λ_{α∨} − z_α) / (θ(λ_{α∨})θ(ℏ + z_α))` and
/// `𝔮^L = θ(z_α)θ(ℏ + λ_{α∨}) / (θ(λ_{α∨})θ(ℏ + z_α))`.
pub fn dl_dual_langlands(group: &Arc<WeylGroup>, i: usize) -> Result<HeckeElement, HeckeError> {
    dl_dual_langlands_variant(group, i, Variant::Exact)
}

/// [`dl_dual_langlands`]; the sign-flipped variant uses `θ(λ_{α∨} + z_α)`
/// in the numerator of `𝔭^L`.
pub fn dl_dual_langlands_variant(
    group: &Arc<WeylGroup>,
    i: usize,
    variant: Variant,
) -> Result<HeckeElement, HeckeError> {
    let (x, y, h) = simple_forms(group, i)?;
    let p_num = match variant {
        Variant::Exact => &y - &x,
        Variant::SignFlipped => &y + &x,
    };
    let p = th(h.clone()) * th(p_num) / (th(y.clone()) * th(&h + &x));
    let q = th(x.clone()) * th(&h + &y) / (th(y) * th(&h + &x));
    let (e, s) = (group.identity(), group.generator(i));
    Ok(HeckeElement::from_terms(group, [((s, e), p), ((s, s), q)]))
}

/// `σ_α = [θ(λ_{α∨} + ℏ)/θ(λ_{α∨})] + [θ(λ_{α∨} − ℏ)/θ(λ_{α∨})] δ_α^d`.
pub fn gkv_dual_generator(group: &Arc<WeylGroup>, i: usize) -> Result<HeckeElement, HeckeError> {
    let (_, y, h) = simple_forms(group, i)?;
    let a = th(&y + &h) / th(y.clone());
    let b = th(&y - &h) / th(y);
    let (e, s) = (group.identity(), group.generator(i));
    Ok(HeckeElement::from_terms(group, [((e, e), a), ((e, s), b)]))
}

/// `T_{s_{i₁}}⋯T_{s_{iₖ}}` for a reduced word `[i₁, …, iₖ]`.
pub fn t_word(group: &Arc<WeylGroup>, word: &[usize]) -> Result<HeckeElement, HeckeError> {
    t_word_variant(group, word, Variant::Exact)
}

pub fn t_word_variant(group: &Arc<WeylGroup>, word: &[usize], variant: Variant) -> Result<HeckeElement, HeckeError> {
    group.from_reduced_word(word)?;
    word.iter()
        .try_fold(HeckeElement::identity(group), |acc, &i| acc.multiply(&dl_dynamical_variant(group, i, variant)?))
}

/// Memoized [`t_word`], keyed by the word. [`OperatorCache::t_element`] uses
/// the stored reduced word of each group element.
#[derive(Debug)]
pub struct OperatorCache {
    group: Arc<WeylGroup>,
    words: Mutex<HashMap<Vec<usize>, HeckeElement>>,
}

impl OperatorCache {
    pub fn new(group: &Arc<WeylGroup>) -> Self {
        Self { group: Arc::clone(group), words: Mutex::new(HashMap::new()) }
    }

    pub fn group(&self) -> &Arc<WeylGroup> {
        &self.group
    }

    pub fn t_word(&self, word: &[usize]) -> Result<HeckeElement, HeckeError> {
        if let Some(t) = self.words.lock().expect("cache lock").get(word) {
            return Ok(t.clone());
        }
        let t = t_word(&self.group, word)?;
        self.words.lock().expect("cache lock").insert(word.to_vec(), t.clone());
        Ok(t)
    }

    pub fn t_element(&self, w: usize) -> Result<HeckeElement, HeckeError> {
        let word = self.group.element(w).word().to_vec();
        self.t_word(&word)
    }
}

/// `Γ(Σ a_v δ_v^d) = Σ a_v·T_v`.
pub fn gamma(sigma: &HeckeElement) -> Result<HeckeElement, HeckeError> {
    gamma_with(sigma, &OperatorCache::new(sigma.group()))
}

pub fn gamma_with(sigma: &HeckeElement, cache: &OperatorCache) -> Result<HeckeElement, HeckeError> {
    let group = sigma.group();
    let mut out = HeckeElement::zero(group);
    for (&(w, v), a) in sigma.coeffs() {
        if w != group.identity() {
            let (w, v) = sigma.key_name((w, v));
            return Err(HeckeError::NotDualSupported { w, v });
        }
        let term = HeckeElement::scalar(group, a.clone()).multiply(&cache.t_element(v)?)?;
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Image of an element under `a δ_w δ_v^d ↦ a δ_w δ_v^d ⊗ δ_w`.
#[derive(Debug, Clone)]
pub struct PsiImage {
    group: Arc<WeylGroup>,
    terms: Vec<(Key, MeroExpr)>,
}

impl PsiImage {
    pub fn terms(&self) -> &[(Key, MeroExpr)] {
        &self.terms
    }

    /// `Σ a_{w,v}·ʷᵛg·ʷf` on the pair `(g, f)`.
    pub fn act_on_pair(&self, g: &MeroExpr, f: &MeroExpr) -> Result<MeroExpr, HeckeError> {
        let e = self.group.element(self.group.identity());
        let terms = self
            .terms
            .iter()
            .map(|&((w, v), ref a)| {
                let (we, ve) = (self.group.element(w), self.group.element(v));
                Ok(MeroExpr::prod([a.clone(), g.twist(we, ve)?, f.twist(we, e)?]))
            })
            .collect::<Result<Vec<_>, ExprError>>()?;
        Ok(MeroExpr::sum(terms))
    }
}

pub fn psi(h: &HeckeElement) -> PsiImage {
    PsiImage { group: Arc::clone(h.group()), terms: h.coeffs().iter().map(|(k, c)| (*k, c.clone())).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::merom::{task_rng, PointSampler};
    use crate::root_datum::Isogeny;

    fn group(label: &str) -> Arc<WeylGroup> {
        Arc::new(WeylGroup::new(RootDatum::build(label, Isogeny::Adjoint).unwrap()))
    }

    fn points(forms: &[LinearForm], rank: usize, n: usize) -> Vec<EvalPoint> {
        let params = ThetaParams::default();
        let sampler = PointSampler::new(rank, Complex64::new(0.1183, 0.2471));
        let mut rng = task_rng(7, 0);
        (0..n).map(|_| sampler.sample(forms, &mut rng, &params).unwrap()).collect()
    }

    fn max_residual(a: &HeckeElement, b: &HeckeElement, n: usize) -> f64 {
        let params = ThetaParams::default();
        let mut forms = a.forms();
        forms.extend(b.forms());
        points(&forms, a.datum().rank(), n).iter().map(|p| a.residual_at(b, p, &params).unwrap()).fold(0.0, f64::max)
    }

    #[test]
    fn keys_of_operators() {
        let g = group("A2");
        let (e, s) = (g.identity(), g.generator(1));
        let t = dl_dynamical(&g, 1).unwrap();
        assert_eq!(t.keys().collect::<Vec<_>>(), vec![(e, s), (s, s)]);
        let tl = dl_dual_langlands(&g, 1).unwrap();
        assert_eq!(tl.keys().collect::<Vec<_>>(), vec![(s, e), (s, s)]);
        assert!(matches!(dl_dynamical(&g, 2), Err(HeckeError::Datum(_))));
    }

    #[test]
    fn delta_products_follow_the_group() {
        let g = group("B2");
        for w in 0..g.order() {
            for x in [g.generator(0), g.generator(1), g.longest()] {
                let a = HeckeElement::delta(&g, w, x, MeroExpr::one());
                let b = HeckeElement::delta(&g, x, w, MeroExpr::one());
                let ab = a.multiply(&b).unwrap();
                assert_eq!(ab.keys().collect::<Vec<_>>(), vec![(g.mul(w, x), g.mul(x, w))]);
            }
        }
    }

    #[test]
    fn identity_is_neutral() {
        let g = group("A2");
        let t = dl_dynamical(&g, 0).unwrap();
        let one = HeckeElement::identity(&g);
        assert!(max_residual(&one.multiply(&t).unwrap(), &t, 5) < 1e-14);
        assert!(max_residual(&t.multiply(&one).unwrap(), &t, 5) < 1e-14);
    }

    #[test]
    fn theta_delta_squared() {
        let g = group("A1");
        let s = g.generator(0);
        let za = LinearForm::z(g.datum().simple_root(0));
        let a = HeckeElement::delta(&g, s, g.identity(), MeroExpr::theta(za.clone()));
        let expected = HeckeElement::scalar(&g, -(MeroExpr::theta(za.clone()) * MeroExpr::theta(za)));
        assert!(max_residual(&a.multiply(&a).unwrap(), &expected, 10) < 1e-13);
    }

    #[test]
    fn quadratic_relations() {
        for label in ["A1", "A2", "B2", "G2"] {
            let g = group(label);
            let one = HeckeElement::identity(&g);
            for i in 0..g.rank() {
                let t = dl_dynamical(&g, i).unwrap();
                assert!(max_residual(&t.multiply(&t).unwrap(), &one, 20) < 1e-10, "{label} T{i}");
                let tl = dl_dual_langlands(&g, i).unwrap();
                assert!(max_residual(&tl.multiply(&tl).unwrap(), &one, 20) < 1e-10, "{label} TL{i}");
            }
        }
    }

    #[test]
    fn corrupted_operator_breaks_the_quadratic_relation() {
        let g = group("A1");
        let t = dl_dynamical_variant(&g, 0, Variant::SignFlipped).unwrap();
        assert!(max_residual(&t.multiply(&t).unwrap(), &HeckeElement::identity(&g), 5) > 1e-3);
    }

    #[test]
    fn braid_in_a2() {
        let g = group("A2");
        let a = t_word(&g, &[0, 1, 0]).unwrap();
        let b = t_word(&g, &[1, 0, 1]).unwrap();
        assert!(max_residual(&a, &b, 20) < 1e-10);
        assert!(t_word(&g, &[]).unwrap().keys().eq([(0, 0)]));
        assert!(matches!(t_word(&g, &[0, 0]), Err(HeckeError::Datum(DatumError::NotReduced(_)))));
    }

    #[test]
    fn action_is_a_module_structure() {
        let g = group("A2");
        let a = dl_dynamical(&g, 0).unwrap();
        let b = dl_dynamical(&g, 1).unwrap();
        let f = MeroExpr::theta(&LinearForm::z(&[1, 2]) + &LinearForm::lam(&[0, 1]));
        let lhs = a.multiply(&b).unwrap().act_on_section(&f).unwrap();
        let rhs = a.act_on_section(&b.act_on_section(&f).unwrap()).unwrap();
        let params = ThetaParams::default();
        let mut forms = lhs.forms();
        forms.extend(rhs.forms());
        for p in points(&forms, 2, 10) {
            let (x, y) = (lhs.eval(&p, &params).unwrap(), rhs.eval(&p, &params).unwrap());
            assert!((x - y).norm() <= 1e-10 * x.norm().max(1.0));
        }
        let one = HeckeElement::identity(&g).act_on_section(&f).unwrap();
        let p = &points(&f.forms(), 2, 1)[0];
        assert_eq!(one.eval(p, &params).unwrap(), f.eval(p, &params).unwrap());
    }

    #[test]
    fn gamma_of_generators() {
        let g = group("A2");
        let s = g.generator(0);
        let d = HeckeElement::delta(&g, g.identity(), s, MeroExpr::one());
        let image = gamma(&d).unwrap();
        let t = dl_dynamical(&g, 0).unwrap();
        assert!(image.keys().eq(t.keys()));
        assert_eq!(max_residual(&image, &t, 10), 0.0);
        let one = gamma(&HeckeElement::identity(&g)).unwrap();
        assert!(one.keys().eq([(0, 0)]));
        let bad = HeckeElement::delta(&g, s, g.identity(), MeroExpr::one());
        assert!(matches!(gamma(&bad), Err(HeckeError::NotDualSupported { .. })));
    }

    #[test]
    fn gkv_generator_ignores_z() {
        let g = group("A2");
        let sigma = gkv_dual_generator(&g, 1).unwrap();
        assert!(sigma.coeffs().values().all(|c| !c.depends_on_z()));
    }

    #[test]
    fn langlands_transport_round_trips() {
        let g = group("B2");
        let dual = Arc::new(WeylGroup::new(g.datum().langlands_dual()));
        let sigma = gkv_dual_generator(&g, 0).unwrap();
        let there = sigma.to_langlands_dual(&dual).unwrap();
        assert!(there.coeffs().values().all(|c| !c.depends_on_lambda()));
        let back = there.to_langlands_dual(&g).unwrap();
        assert!(back.keys().eq(sigma.keys()));
        assert!(max_residual(&back, &sigma, 5) == 0.0);
    }

    #[test]
    fn datum_mismatch() {
        let a = HeckeElement::identity(&group("A2"));
        let b = HeckeElement::identity(&group("B2"));
        assert!(matches!(a.multiply(&b), Err(HeckeError::DatumMismatch(..))));
    }
}
