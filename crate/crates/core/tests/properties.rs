use std::sync::Arc;

use elliptic_hecke::hecke::verify::{compare_elements, random_section, scaled_difference, Sampling};
use elliptic_hecke::hecke::{dl_dynamical, HeckeElement};
use elliptic_hecke::merom::{residue_along, task_rng, LinearForm, MeroExpr, PointSampler};
use elliptic_hecke::root_datum::{pairing, Isogeny, RootDatum, WeylGroup};
use elliptic_hecke::theta::{theta, ThetaParams};
use num_complex::Complex64;
use proptest::prelude::*;

const LABELS: &[&str] = &["A1", "A1xA1", "A2", "B2", "C2", "G2", "A3"];

fn group(label: &str, sc: bool) -> Arc<WeylGroup> {
    let iso = if sc { Isogeny::SimplyConnected } else { Isogeny::Adjoint };
    Arc::new(WeylGroup::new(RootDatum::build(label, iso).unwrap()))
}

fn hbar() -> Complex64 {
    Complex64::new(0.1183, 0.2471)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_symmetries(a in -1.0f64..1.0, b in -1.0f64..1.0, tau_im in 0.5f64..1.5) {
        let p = ThetaParams::with_tau(Complex64::new(0.1, tau_im)).unwrap();
        let tau = p.tau();
        let x = Complex64::new(a, 0.0) + tau * b;
        let t = theta(x, &p).unwrap();
        let i = Complex64::i();
        let pi = std::f64::consts::PI;
        prop_assert!(scaled_difference(theta(-x, &p).unwrap(), -t) < 1e-9);
        prop_assert!(scaled_difference(theta(x + 1.0, &p).unwrap(), -t) < 1e-9);
        let factor = -(-i * pi * tau - 2.0 * i * pi * x).exp();
        prop_assert!(scaled_difference(theta(x + tau, &p).unwrap(), factor * t) < 1e-9);
    }

    #[test]
    fn theta_has_unit_slope_at_zero(r in 1e-9f64..1e-6, phase in 0.0f64..6.3) {
        let p = ThetaParams::default();
        let x = Complex64::from_polar(r, phase);
        prop_assert!((theta(x, &p).unwrap() / x - 1.0).norm() < 1e-9);
    }

    #[test]
    fn weyl_action_preserves_pairing(
        label in prop::sample::select(LABELS),
        sc: bool,
        w in 0usize..64,
        a in prop::collection::vec(-3i64..=3, 3),
        b in prop::collection::vec(-3i64..=3, 3),
    ) {
        let g = group(label, sc);
        let e = g.element(w % g.order());
        let n = g.rank();
        let (a, b) = (&a[..n], &b[..n]);
        prop_assert_eq!(pairing(&e.mat_on_star().apply(a), &e.mat_on_costar().apply(b)), pairing(a, b));
    }

    #[test]
    fn length_changes_by_one(label in prop::sample::select(LABELS), sc: bool, w in 0usize..64, i in 0usize..3) {
        let g = group(label, sc);
        let w = w % g.order();
        let i = i % g.rank();
        let l = g.element(w).length() as i64;
        let ws = g.element(g.mul(w, g.generator(i))).length() as i64;
        prop_assert_eq!((ws - l).abs(), 1);
        prop_assert_eq!(g.element(w).length(), g.inversion_indices(w).len());
        prop_assert_eq!(g.from_word(g.element(w).word()).unwrap(), w);
    }

    #[test]
    fn twisting_is_a_group_action(
        label in prop::sample::select(LABELS),
        idx in prop::collection::vec(0usize..64, 4),
        seed in 0u64..1000,
    ) {
        let g = group(label, false);
        let p = ThetaParams::default();
        let m = |k: usize| idx[k] % g.order();
        let (w, v, w2, v2) = (m(0), m(1), m(2), m(3));
        let mut rng = task_rng(seed, 0);
        let e = random_section(g.rank(), true, &mut rng) / MeroExpr::theta(LinearForm::hbar(g.rank(), 1));
        let el = |k| g.element(k);
        let twice = e.twist(el(w), el(v)).unwrap().twist(el(w2), el(v2)).unwrap();
        let once = e.twist(el(g.mul(w2, w)), el(g.mul(v2, v))).unwrap();
        let point = PointSampler::new(g.rank(), hbar()).sample(&once.forms(), &mut rng, &p).unwrap();
        let (a, b) = (twice.eval(&point, &p).unwrap(), once.eval(&point, &p).unwrap());
        prop_assert!(scaled_difference(a, b) < 1e-9, "{a} vs {b}");
        let moved = e.eval(&point.acted(el(w), el(v)), &p).unwrap();
        let direct = e.twist(el(w), el(v)).unwrap().eval(&point, &p).unwrap();
        prop_assert!(scaled_difference(moved, direct) < 1e-9, "{moved} vs {direct}");
    }

    #[test]
    fn residue_is_linear(seed in 0u64..1000, c in -3i64..=3, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let p = ThetaParams::default();
        let div = LinearForm::z(&[1, -1]);
        let mut rng = task_rng(seed, 1);
        let e1 = MeroExpr::theta(&div - &LinearForm::hbar(2, c)) / MeroExpr::theta(div.clone());
        let e2 = random_section(2, true, &mut rng) / MeroExpr::theta(div.clone());
        let a = Complex64::new(re, im);
        let combo = MeroExpr::constant(a) * e1.clone() + e2.clone();
        let base = PointSampler::new(2, hbar()).sample_on_divisor(&combo.forms(), &div, &mut rng, &p).unwrap();
        let lhs = residue_along(&combo, &div, &base, &p).unwrap();
        let rhs = a * residue_along(&e1, &div, &base, &p).unwrap() + residue_along(&e2, &div, &base, &p).unwrap();
        prop_assert!(scaled_difference(lhs, rhs) < 1e-9, "{lhs} vs {rhs}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn multiplication_is_associative(
        label in prop::sample::select(&["A2", "B2", "G2"][..]),
        gens in prop::collection::vec(0usize..2, 3),
        seed in 0u64..1000,
    ) {
        let g = group(label, false);
        let mut rng = task_rng(seed, 2);
        let mut factor = |i: usize| -> HeckeElement {
            let f = random_section(2, true, &mut rng);
            HeckeElement::scalar(&g, f).multiply(&dl_dynamical(&g, i).unwrap()).unwrap()
        };
        let (a, b, c) = (factor(gens[0]), factor(gens[1]), factor(gens[2]));
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(left.keys().collect::<Vec<_>>(), right.keys().collect::<Vec<_>>());
        let s = Sampling::new(ThetaParams::default(), hbar(), seed, 4);
        let check = compare_elements(&left, &right, &s, 0).unwrap();
        prop_assert!(check.passes(1e-9), "{}", check.max_residual);
        prop_assert!(left.coeffs().values().all(|e| !e.is_structural_zero()));
    }
}
