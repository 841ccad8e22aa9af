//! Property tests for the algebraic identities behind the rate formulas.

use cf_core::rate::{
    alpha_mmse, computation_rate, computation_rate_alpha, quadratic_form, quadratic_form_pairwise, rate_from_f,
};
use cf_core::{ChannelVector, CoefficientVector, GramMatrix, PowerConfig};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = (ChannelVector, CoefficientVector, PowerConfig)> {
    (2usize..=8)
        .prop_flat_map(|l| {
            (
                prop::collection::vec(-3.0f64..3.0, l),
                prop::collection::vec(-4i64..=4, l),
                prop::sample::select(vec![1.0, 10.0, 100.0]),
            )
        })
        .prop_filter("nonzero", |(h, a, _)| {
            h.iter().any(|&x| x != 0.0) && a.iter().any(|&x| x != 0)
        })
        .prop_map(|(h, a, p)| {
            (
                ChannelVector::new(h).unwrap(),
                CoefficientVector::new(a).unwrap(),
                PowerConfig::new(p).unwrap(),
            )
        })
}

/// `a = round(s h)` plus a small perturbation: mostly positive-rate vectors.
fn aligned_instance() -> impl Strategy<Value = (ChannelVector, CoefficientVector, PowerConfig)> {
    (2usize..=8)
        .prop_flat_map(|l| {
            (
                prop::collection::vec(-3.0f64..3.0, l),
                prop::collection::vec(-1i64..=1, l),
                0.2f64..2.0,
                prop::sample::select(vec![1.0, 10.0, 100.0]),
            )
        })
        .prop_filter_map("degenerate", |(h, noise, scale, p)| {
            let a: Vec<i64> = h
                .iter()
                .zip(&noise)
                .map(|(x, n)| (x * scale).round() as i64 + if n.abs() == 1 && x.abs() < 0.5 { *n } else { 0 })
                .collect();
            Some((
                ChannelVector::new(h).ok()?,
                CoefficientVector::new(a).ok()?,
                PowerConfig::new(p).unwrap(),
            ))
        })
}

fn rel_close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0)
}

proptest! {
    #[test]
    fn three_forms_of_f_agree((h, a, p) in instance()) {
        let expanded = quadratic_form(&h, &a, p).unwrap();
        let pairwise = quadratic_form_pairwise(&h, &a, p).unwrap();
        let gram = GramMatrix::new(&h, p).quadratic_form(&a).unwrap();
        prop_assert!(rel_close(expanded, pairwise, 1e-9));
        prop_assert!(rel_close(expanded, gram, 1e-9));
    }

    #[test]
    fn rate_from_f_matches_mmse_rate((h, a, p) in instance()) {
        let f = quadratic_form(&h, &a, p).unwrap();
        let direct = computation_rate(&h, &a, p).unwrap().bits();
        let via_f = rate_from_f(f, &h, p).unwrap().bits();
        prop_assert!((direct - via_f).abs() <= 1e-9 * direct.max(1.0));
    }

    #[test]
    fn sign_flip_is_exact((h, a, p) in instance()) {
        prop_assert_eq!(computation_rate(&h, &a, p).unwrap(), computation_rate(&h, &a.negated(), p).unwrap());
    }

    #[test]
    fn mmse_scaling_is_locally_optimal((h, a, p) in aligned_instance()) {
        let alpha = alpha_mmse(&h, &a, p).unwrap();
        let at = computation_rate_alpha(&h, &a, p, alpha).unwrap().bits();
        prop_assume!(at > 0.0);
        for s in [1.0 - 1e-3, 1.0 + 1e-3] {
            prop_assert!(computation_rate_alpha(&h, &a, p, alpha * s).unwrap().bits() <= at);
        }
        prop_assert!((at - computation_rate(&h, &a, p).unwrap().bits()).abs() < 1e-9);
    }

    #[test]
    fn beyond_radius_rate_is_zero((h, a, p) in instance()) {
        if a.norm_sq() as f64 >= 1.0 + p.get() * h.norm_sq() {
            prop_assert_eq!(computation_rate(&h, &a, p).unwrap().bits(), 0.0);
        }
    }
}
