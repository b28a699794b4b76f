//! Property tests of the finite-blocklength primitives: monotonicity in
//! SNR and rate, the √N scaling of the f-metric, and the Q/Q⁻¹ round trip.
//!
//! Strict monotonicity of the error probability is asserted only while the
//! values sit above the f64 tail clamp; past it the check falls back to the
//! f-metric, which carries the same information without underflowing.

use fbnoma_core::fbl::{decode_error_prob, f_metric, q_func, q_inv, Blocklength, Rate, SnrValue};
use proptest::prelude::*;

const CLAMP_GUARD: f64 = 1e-290;

fn eps(gamma: f64, n: u32, r: f64) -> f64 {
    decode_error_prob(
        SnrValue::new(gamma).unwrap(),
        Blocklength::new(n).unwrap(),
        Rate::new(r).unwrap(),
    )
    .unwrap()
    .get()
}

fn fmet(gamma: f64, n: u32, r: f64) -> f64 {
    f_metric(
        SnrValue::new(gamma).unwrap(),
        Blocklength::new(n).unwrap(),
        Rate::new(r).unwrap(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // Error probability decreases strictly in the SNR.
    #[test]
    fn eps_monotone_decreasing_in_gamma(
        gamma in 1e-3..1e4f64,
        n in 50u32..2000,
        frac in 0.0..1.0f64,
    ) {
        let r = frac * (1.0 + gamma).log2();
        let delta = 1e-6 * gamma;
        let lo = eps(gamma, n, r);
        let hi = eps(gamma + delta, n, r);
        if lo > CLAMP_GUARD {
            prop_assert!(hi < lo, "ε({}) = {hi} !< ε({gamma}) = {lo}", gamma + delta);
        } else {
            prop_assert!(fmet(gamma + delta, n, r) > fmet(gamma, n, r));
        }
    }

    // Error probability increases strictly in the rate.
    #[test]
    fn eps_monotone_increasing_in_rate(
        gamma in 1e-3..1e4f64,
        n in 50u32..2000,
        frac in 0.0..0.999f64,
    ) {
        let cap = (1.0 + gamma).log2();
        let r = frac * cap;
        let delta = 1e-6 * cap;
        let lo = eps(gamma, n, r);
        let hi = eps(gamma, n, r + delta);
        if hi > CLAMP_GUARD {
            prop_assert!(hi > lo);
        } else {
            prop_assert!(fmet(gamma, n, r + delta) < fmet(gamma, n, r));
        }
    }

    // The finite-difference slope of f in γ is strictly positive.
    #[test]
    fn f_slope_in_gamma_positive(
        gamma in 1e-3..1e4f64,
        n in 50u32..2000,
        frac in 0.0..1.0f64,
    ) {
        let r = frac * (1.0 + gamma).log2();
        let delta = 1e-6 * gamma;
        prop_assert!(fmet(gamma + delta, n, r) > fmet(gamma, n, r));
    }

    // Quadrupling the blocklength doubles f.
    #[test]
    fn f_scales_as_sqrt_n(
        gamma in 1e-3..1e4f64,
        n in 50u32..500,
        frac in 0.0..2.0f64,
    ) {
        let r = frac * (1.0 + gamma).log2();
        let f1 = fmet(gamma, n, r);
        let f4 = fmet(gamma, 4 * n, r);
        prop_assert!((f4 - 2.0 * f1).abs() <= 1e-12 * f4.abs().max(1e-300));
    }

    // Q and Q⁻¹ invert each other to 1e-9 absolute in p.
    #[test]
    fn q_round_trip(p in 1e-12..1.0f64) {
        prop_assume!(p < 1.0 - 1e-12);
        let x = q_inv(p).unwrap();
        let back = q_func(x).unwrap();
        prop_assert!((back - p).abs() <= 1e-9);
    }
}
