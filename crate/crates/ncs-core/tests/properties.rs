//! Property tests over randomly drawn models and labels.

use ncs_core::hyper::{
    radius_classify, structure_ln_rho, structure_ln_rho_dual, structure_rho, HypergeometricModel, SeriesBudget,
};
use ncs_core::meijer::ContourSpec;
use ncs_core::quadrature::RadialQuadrature;
use ncs_core::states::{continuity_distance, fock_coefficient, normalization, overlap, ComplexLabel, Flavor, StateFamily};
use ncs_core::transform::{RadialFunction, Transformer};
use proptest::prelude::*;

fn params(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.2f64..5.0, len)
}

/// Any model with up to three parameters on each side.
fn any_model() -> impl Strategy<Value = HypergeometricModel> {
    (params(0..=3), params(0..=3)).prop_map(|(a, b)| HypergeometricModel::new(a, b).unwrap())
}

/// Models whose label domain is the whole plane (q ≥ p).
fn entire_model() -> impl Strategy<Value = HypergeometricModel> {
    (0usize..=2, 0usize..=1)
        .prop_flat_map(|(p, extra)| (params(p..=p), params(p + extra..=p + extra)))
        .prop_map(|(a, b)| HypergeometricModel::new(a, b).unwrap())
}

fn label() -> impl Strategy<Value = ComplexLabel> {
    (0.0f64..6.0, -3.2f64..3.2).prop_map(|(x, phi)| ComplexLabel::new(x, phi).unwrap())
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn structure_function_duality(m in any_model()) {
        for n in 0..=50 {
            let lhs = structure_ln_rho(&m, n) + structure_ln_rho_dual(&m, n);
            let rhs = 2.0 * ln_factorial(n);
            // relative error of ρ·ρ̃ against (n!)²
            prop_assert!((lhs - rhs).exp_m1().abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn structure_function_recurrence(m in any_model()) {
        for n in 0..40 {
            let ratio = structure_rho(&m, n + 1).unwrap() / structure_rho(&m, n).unwrap();
            let nf = n as f64;
            let expected = (nf + 1.0) * m.b().iter().map(|b| b + nf).product::<f64>()
                / m.a().iter().map(|a| a + nf).product::<f64>();
            prop_assert!((ratio - expected).abs() <= 1e-12 * expected);
        }
    }

    #[test]
    fn growth_exponent_matches_radius_class(m in any_model()) {
        // ln ρ(n+1) − ln ρ(n) ≈ e·ln n + O(1/n), e = 1 + q − p
        let step = |n: usize| structure_ln_rho(&m, n + 1) - structure_ln_rho(&m, n);
        let slope = (step(1000) - step(100)) / (1000f64 / 100.0).ln();
        let e = radius_classify(&m).exponent as f64;
        prop_assert!((slope - e).abs() < 0.05, "slope {slope}, exponent {e}");
    }

    #[test]
    fn overlaps_are_bounded(m in entire_model(), z1 in label(), z2 in label()) {
        let b = SeriesBudget::default();
        for flavor in [Flavor::Bg, Flavor::Kp] {
            let fam = StateFamily::new(m.clone(), flavor).unwrap();
            // KP labels of a p = q model live in the unit disk
            let inside = |z: &ComplexLabel| ComplexLabel::new(z.modulus_sq.min(0.9 * fam.radius()), z.phase).unwrap();
            let (z1, z2) = (inside(&z1), inside(&z2));
            prop_assert_eq!(overlap(&fam, &z1, &z1, &b).unwrap().re, 1.0);
            let o = overlap(&fam, &z1, &z2, &b).unwrap();
            prop_assert!(o.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn coefficients_are_normalized(m in entire_model(), z in label()) {
        let b = SeriesBudget::default();
        let fam = StateFamily::new(m, Flavor::Bg).unwrap();
        let mut total = 0.0;
        for n in 0..400 {
            total += fock_coefficient(&fam, &z, n, &b).unwrap().norm_sqr();
        }
        prop_assert!((total - 1.0).abs() < 1e-10, "{total}");
    }

    #[test]
    fn kp_is_bg_of_swapped_model(m in entire_model(), x in 0.0f64..6.0) {
        // the swap has q' ≤ p'; keep x inside its radius
        let b = SeriesBudget::default();
        let kp = StateFamily::new(m.clone(), Flavor::Kp).unwrap();
        let bg = StateFamily::new(m.swapped(), Flavor::Bg).unwrap();
        let x = x.min(0.9 * kp.radius());
        let (u, v) = (normalization(&kp, x, &b).unwrap(), normalization(&bg, x, &b).unwrap());
        prop_assert!((u - v).abs() <= 1e-14 * u);
        for n in 0..20 {
            prop_assert!((kp.rho(n).unwrap() - bg.rho(n).unwrap()).abs() <= 1e-14 * bg.rho(n).unwrap());
        }
    }

    #[test]
    fn continuity_under_halving(m in entire_model(), z in label(), dx in 0.01f64..0.2, dphi in -0.2f64..0.2) {
        let b = SeriesBudget::default();
        let fam = StateFamily::new(m, Flavor::Bg).unwrap();
        let c = z.to_complex();
        let mut prev = f64::INFINITY;
        for h in 0..6 {
            let s = 0.5f64.powi(h);
            let z2 = ComplexLabel::from_complex(c + num_complex::Complex64::new(dx * s, dphi * s));
            let d = continuity_distance(&fam, &z, &z2, &b).unwrap();
            if prev.is_finite() && prev > 1e-6 {
                prop_assert!(d <= 0.5 * prev * 1.05, "{d} after {prev}");
            }
            prev = d;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn transform_is_linear(c1 in -2.0f64..2.0, c2 in -2.0f64..2.0,
                           p1 in prop::collection::vec(-1.0f64..1.0, 1..4),
                           p2 in prop::collection::vec(-1.0f64..1.0, 1..4),
                           a in 0.0f64..8.0, k in prop::sample::select(vec![0.0, 0.5, 1.0, 2.5])) {
        let fam = if k == 0.0 {
            StateFamily::canonical()
        } else {
            StateFamily::new(HypergeometricModel::from_preset(&format!("pho:{k}")).unwrap(), Flavor::Bg).unwrap()
        };
        let poly = |c: Vec<f64>| move |x: f64| Ok(c.iter().rev().fold(0.0, |acc, ci| acc * x + ci));
        let f1 = RadialFunction::from_fn(poly(p1.clone()));
        let f2 = RadialFunction::from_fn(poly(p2.clone()));
        let (q1, q2) = (poly(p1), poly(p2));
        let mix = RadialFunction::from_fn(move |x| Ok(c1 * q1(x)? + c2 * q2(x)?));
        let e = Transformer::new(&fam, &RadialQuadrature::default(), &ContourSpec::default(), &SeriesBudget::default()).unwrap();
        let lhs = e.gft(&mix, a).unwrap();
        let g1 = e.gft(&f1, a).unwrap();
        let g2 = e.gft(&f2, a).unwrap();
        let rhs = c1 * g1 + c2 * g2;
        let scale = (c1 * g1).abs() + (c2 * g2).abs();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale.max(1e-300), "{lhs} vs {rhs}");
    }
}
