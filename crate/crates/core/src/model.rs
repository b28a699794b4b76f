//! Two-user NOMA SINR algebra, SIC outage, and effective throughput.
//!
//! The access point superposes both messages on the same blocklength-`N`
//! resource. User 1 (the stronger channel, `h₁ > h₂`) first decodes user 2's
//! message treating its own as noise; on success it cancels the interference
//! and decodes at SNR `γ₁ = P₁h₁`, on failure it decodes through the
//! interference at `γ′₁ = P₁h₁/(P₂h₁+1)`. User 2 always decodes through
//! user 1's interference at `γ₂ = P₂h₂/(P₁h₂+1)`. Marginalizing over the
//! SIC outcome gives the effective error probability at user 1,
//!
//! ```text
//! ε̄₁ = ε₁ − ε₁ε₂¹ + ε₂¹ε′₁,
//! ```
//!
//! and the effective throughputs `T̄₁ = R₁(1 − ε̄₁)`, `T̄₂ = R₂(1 − ε₂)`.
//!
//! Zero-power corners (where an SINR vanishes and the f-metric is singular)
//! are defined by convention rather than by formula:
//! * `P₂ = 0`: there is no second message, so `ε₂¹ = 0`; with `R₂ = 0`
//!   additionally `ε₂ = 0` and `T̄₂ = 0`. `R₂ > 0` at zero power is treated
//!   as certain failure (`ε₂ = 1`).
//! * `P₁ = 0`: symmetrically, `ε₁ = ε′₁ = 0` when `R₁ = 0` and `1` when
//!   `R₁ > 0`; either way `T̄₁ = 0`.

use crate::fbl::{eps_raw, Blocklength, ErrorProb, Rate, SnrValue};
use crate::{Error, Result};

/// Normalized linear power gains of the two users, `h₁ > h₂ > 0`.
///
/// `hᵢ = |h̃ᵢ|²/σᵢ²`, so the received SNR at full power is `P·hᵢ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGains {
    h1: f64,
    h2: f64,
}

impl ChannelGains {
    pub fn new(h1: f64, h2: f64) -> Result<Self> {
        if !(h1.is_finite() && h2.is_finite()) || h2 <= 0.0 || h1 <= h2 {
            return Err(Error::domain(format!(
                "channel gains must satisfy h1 > h2 > 0, got h1 = {h1}, h2 = {h2}"
            )));
        }
        Ok(ChannelGains { h1, h2 })
    }

    /// Gains from coefficient magnitudes and per-user noise powers.
    pub fn from_magnitudes(mag1: f64, mag2: f64, sigma1_sq: f64, sigma2_sq: f64) -> Result<Self> {
        if sigma1_sq <= 0.0 || sigma2_sq <= 0.0 {
            return Err(Error::domain("noise powers must be positive"));
        }
        ChannelGains::new(mag1 * mag1 / sigma1_sq, mag2 * mag2 / sigma2_sq)
    }

    pub fn h1(&self) -> f64 {
        self.h1
    }

    pub fn h2(&self) -> f64 {
        self.h2
    }
}

/// A NOMA rate/power decision `(P₁, P₂, R₁, R₂)`.
///
/// Powers are validated nonnegative here; the budget `P₁ + P₂ ≤ P` is
/// checked against [`SystemParams`] at evaluation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NomaDecision {
    pub p1: f64,
    pub p2: f64,
    pub r1: Rate,
    pub r2: Rate,
}

impl NomaDecision {
    pub fn new(p1: f64, p2: f64, r1: Rate, r2: Rate) -> Result<Self> {
        if !(p1.is_finite() && p2.is_finite()) || p1 < 0.0 || p2 < 0.0 {
            return Err(Error::domain(format!(
                "powers must be finite and nonnegative, got P1 = {p1}, P2 = {p2}"
            )));
        }
        Ok(NomaDecision { p1, p2, r1, r2 })
    }

    pub fn zero() -> Self {
        NomaDecision {
            p1: 0.0,
            p2: 0.0,
            r1: Rate::ZERO,
            r2: Rate::ZERO,
        }
    }
}

/// Shared system parameters: blocklength `N` (`N₁ = N₂ = N` for NOMA),
/// power budget `P`, and the throughput target `T₀` for user 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub n: Blocklength,
    pub p_total: f64,
    pub t0: f64,
}

impl SystemParams {
    pub fn new(n: Blocklength, p_total: f64, t0: f64) -> Result<Self> {
        if !p_total.is_finite() || p_total <= 0.0 {
            return Err(Error::domain(format!(
                "power budget must be positive, got {p_total}"
            )));
        }
        if !t0.is_finite() || t0 < 0.0 {
            return Err(Error::domain(format!(
                "throughput target must be nonnegative, got {t0}"
            )));
        }
        Ok(SystemParams { n, p_total, t0 })
    }
}

/// Everything a decision induces: the four SINRs, the five error
/// probabilities, and the two effective throughputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NomaEvaluation {
    pub gamma21: SnrValue,
    pub gamma1: SnrValue,
    pub gamma1_prime: SnrValue,
    pub gamma2: SnrValue,
    pub eps21: ErrorProb,
    pub eps1: ErrorProb,
    pub eps1_prime: ErrorProb,
    pub eps2: ErrorProb,
    pub eps_bar1: ErrorProb,
    pub t1_bar: f64,
    pub t2_bar: f64,
}

// ---------------------------------------------------------------------------
// SINR algebra
// ---------------------------------------------------------------------------

/// SINR of `x₂` at user 1 (the SIC decode): `γ₂¹ = P₂h₁/(P₁h₁+1)`.
pub fn sinr_x2_at_u1(gains: &ChannelGains, d: &NomaDecision) -> SnrValue {
    SnrValue::new(d.p2 * gains.h1 / (d.p1 * gains.h1 + 1.0)).expect("nonnegative by construction")
}

/// SNR of `x₁` at user 1 after successful SIC: `γ₁ = P₁h₁`.
pub fn snr_x1_sic(gains: &ChannelGains, d: &NomaDecision) -> SnrValue {
    SnrValue::new(d.p1 * gains.h1).expect("nonnegative by construction")
}

/// SINR of `x₁` at user 1 when SIC failed: `γ′₁ = P₁h₁/(P₂h₁+1)`.
pub fn sinr_x1_nosic(gains: &ChannelGains, d: &NomaDecision) -> SnrValue {
    SnrValue::new(d.p1 * gains.h1 / (d.p2 * gains.h1 + 1.0)).expect("nonnegative by construction")
}

/// SINR of `x₂` at user 2: `γ₂ = P₂h₂/(P₁h₂+1)`.
pub fn sinr_x2_at_u2(gains: &ChannelGains, d: &NomaDecision) -> SnrValue {
    SnrValue::new(d.p2 * gains.h2 / (d.p1 * gains.h2 + 1.0)).expect("nonnegative by construction")
}

// ---------------------------------------------------------------------------
// Error probabilities and throughput
// ---------------------------------------------------------------------------

/// Decoding error probability at a zero-power / zero-SNR corner.
fn corner_eps(r: f64) -> f64 {
    if r > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Error probability of `x₁` at user 1 conditioned on failed SIC:
/// `Q(f(γ′₁, N, R₁))` while `R₁ ≤ log₂(1+γ′₁)`, and 1 beyond the
/// interference-limited capacity.
pub fn eps1_prime(gains: &ChannelGains, d: &NomaDecision, n: Blocklength) -> ErrorProb {
    let g1p = sinr_x1_nosic(gains, d).get();
    let r1 = d.r1.get();
    let e = if g1p == 0.0 {
        corner_eps(r1)
    } else if r1 <= (1.0 + g1p).log2() {
        eps_raw(g1p, n.as_f64(), r1)
    } else {
        1.0
    };
    ErrorProb::new(e).expect("probability by construction")
}

/// Evaluate a decision: all SINRs, error probabilities, and throughputs.
///
/// Errors when the decision exceeds the power budget (beyond 1e-9 relative
/// slack).
pub fn evaluate_noma(
    gains: &ChannelGains,
    d: &NomaDecision,
    params: &SystemParams,
) -> Result<NomaEvaluation> {
    let used = d.p1 + d.p2;
    if used > params.p_total * (1.0 + 1e-9) {
        return Err(Error::PowerBudget {
            used,
            budget: params.p_total,
        });
    }
    let n = params.n.as_f64();
    let r1 = d.r1.get();
    let r2 = d.r2.get();

    let gamma21 = sinr_x2_at_u1(gains, d);
    let gamma1 = snr_x1_sic(gains, d);
    let gamma1_prime = sinr_x1_nosic(gains, d);
    let gamma2 = sinr_x2_at_u2(gains, d);

    // No second message at P₂ = 0: SIC trivially "succeeds".
    let eps21 = if d.p2 == 0.0 {
        0.0
    } else {
        eps_raw(gamma21.get(), n, r2)
    };
    let eps2 = if d.p2 == 0.0 {
        corner_eps(r2)
    } else {
        eps_raw(gamma2.get(), n, r2)
    };
    let eps1 = if d.p1 == 0.0 {
        corner_eps(r1)
    } else {
        eps_raw(gamma1.get(), n, r1)
    };
    let eps1_prime = eps1_prime(gains, d, params.n).get();

    let eps_bar1 = eps1 - eps1 * eps21 + eps21 * eps1_prime;
    let t1_bar = r1 * (1.0 - eps_bar1);
    let t2_bar = r2 * (1.0 - eps2);

    Ok(NomaEvaluation {
        gamma21,
        gamma1,
        gamma1_prime,
        gamma2,
        eps21: ErrorProb::new(eps21)?,
        eps1: ErrorProb::new(eps1)?,
        eps1_prime: ErrorProb::new(eps1_prime)?,
        eps2: ErrorProb::new(eps2)?,
        eps_bar1: ErrorProb::new(eps_bar1)?,
        t1_bar,
        t2_bar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbl::decode_error_prob;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gains() -> ChannelGains {
        ChannelGains::new(0.64, 0.04).unwrap()
    }
    fn rate(r: f64) -> Rate {
        Rate::new(r).unwrap()
    }
    fn bl(n: u32) -> Blocklength {
        Blocklength::new(n).unwrap()
    }
    fn decision(p1: f64, p2: f64, r1: f64, r2: f64) -> NomaDecision {
        NomaDecision::new(p1, p2, rate(r1), rate(r2)).unwrap()
    }

    #[test]
    fn gains_reject_bad_ordering() {
        assert!(ChannelGains::new(0.2, 0.2).is_err());
        assert!(ChannelGains::new(0.1, 0.4).is_err());
        assert!(ChannelGains::new(0.4, 0.0).is_err());
        assert!(ChannelGains::new(0.4, -0.1).is_err());
    }

    #[test]
    fn sinr_x2_at_u1_values() {
        let g = gains();
        assert_eq!(sinr_x2_at_u1(&g, &decision(400.0, 0.0, 1.0, 1.0)).get(), 0.0);
        let full = sinr_x2_at_u1(&g, &decision(0.0, 1000.0, 0.0, 1.0)).get();
        assert!((full - 1000.0 * 0.64).abs() < 1e-12);
        let v = sinr_x2_at_u1(&g, &decision(400.0, 600.0, 1.0, 1.0)).get();
        assert!((v - 384.0 / 257.0).abs() < 1e-12);
    }

    #[test]
    fn snr_x1_sic_values() {
        let g = gains();
        assert_eq!(snr_x1_sic(&g, &decision(0.0, 10.0, 0.0, 0.0)).get(), 0.0);
        assert_eq!(snr_x1_sic(&g, &decision(400.0, 0.0, 0.0, 0.0)).get(), 256.0);
        let once = snr_x1_sic(&g, &decision(123.0, 0.0, 0.0, 0.0)).get();
        let twice = snr_x1_sic(&g, &decision(246.0, 0.0, 0.0, 0.0)).get();
        assert!((twice - 2.0 * once).abs() < 1e-12);
    }

    #[test]
    fn sinr_x1_nosic_values() {
        let g = gains();
        let d0 = decision(400.0, 0.0, 1.0, 0.0);
        assert_eq!(sinr_x1_nosic(&g, &d0), snr_x1_sic(&g, &d0));
        let v = sinr_x1_nosic(&g, &decision(400.0, 600.0, 1.0, 1.0)).get();
        assert!((v - 256.0 / 385.0).abs() < 1e-12);
        assert_eq!(sinr_x1_nosic(&g, &decision(0.0, 600.0, 0.0, 1.0)).get(), 0.0);
    }

    #[test]
    fn sinr_x2_at_u2_values() {
        let g = gains();
        assert_eq!(sinr_x2_at_u2(&g, &decision(400.0, 0.0, 1.0, 0.0)).get(), 0.0);
        let d = decision(400.0, 600.0, 1.0, 1.0);
        let v = sinr_x2_at_u2(&g, &d).get();
        assert!((v - 24.0 / 17.0).abs() < 1e-12);
        assert!(sinr_x2_at_u1(&g, &d).get() > v);
    }

    #[test]
    fn eps1_prime_piecewise() {
        let g = gains();
        let n = bl(100);
        let d = decision(400.0, 600.0, 1.0, 1.0);
        let cap_p = sinr_x1_nosic(&g, &d).capacity();

        let above = NomaDecision { r1: rate(cap_p + 0.1), ..d };
        assert_eq!(eps1_prime(&g, &above, n).get(), 1.0);

        let at = NomaDecision { r1: rate(cap_p), ..d };
        assert_eq!(eps1_prime(&g, &at, n).get(), 0.5);

        let no_interference = decision(400.0, 0.0, 2.0, 0.0);
        let expected = decode_error_prob(snr_x1_sic(&g, &no_interference), n, rate(2.0)).unwrap();
        assert_eq!(eps1_prime(&g, &no_interference, n), expected);
    }

    #[test]
    fn evaluate_rejects_budget_violation() {
        let params = SystemParams::new(bl(100), 1000.0, 1.0).unwrap();
        let err = evaluate_noma(&gains(), &decision(800.0, 300.0, 1.0, 1.0), &params);
        assert!(matches!(err, Err(Error::PowerBudget { .. })));
    }

    #[test]
    fn zero_rates_give_zero_throughput() {
        let params = SystemParams::new(bl(100), 1000.0, 0.0).unwrap();
        let ev = evaluate_noma(&gains(), &decision(600.0, 400.0, 0.0, 0.0), &params).unwrap();
        assert_eq!(ev.t1_bar, 0.0);
        assert_eq!(ev.t2_bar, 0.0);
    }

    #[test]
    fn single_user_reduction() {
        let params = SystemParams::new(bl(100), 1000.0, 0.0).unwrap();
        let d = decision(1000.0, 0.0, 5.0, 0.0);
        let ev = evaluate_noma(&gains(), &d, &params).unwrap();
        assert_eq!(ev.eps21.get(), 0.0);
        assert_eq!(ev.eps2.get(), 0.0);
        assert_eq!(ev.t2_bar, 0.0);
        let eps = decode_error_prob(SnrValue::new(1000.0 * 0.64).unwrap(), bl(100), rate(5.0))
            .unwrap()
            .get();
        assert!((ev.t1_bar - 5.0 * (1.0 - eps)).abs() < 1e-15);
    }

    #[test]
    fn marginalization_identity() {
        // ε̄₁ = ε₁(1−ε₂¹) + ε′₁ε₂¹ exactly as computed.
        let params = SystemParams::new(bl(150), 10_000.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let p2 = rng.gen_range(0.0..10_000.0);
            let p1 = 10_000.0 - p2;
            let d = decision(p1, p2, rng.gen_range(0.0..8.0), rng.gen_range(0.0..3.0));
            let ev = evaluate_noma(&gains(), &d, &params).unwrap();
            let (e1, e21, e1p) = (ev.eps1.get(), ev.eps21.get(), ev.eps1_prime.get());
            let alt = e1 * (1.0 - e21) + e1p * e21;
            assert!((ev.eps_bar1.get() - alt).abs() <= 1e-15);
            assert!(ev.eps1_prime >= ev.eps1);
            assert!(ev.t1_bar >= 0.0 && ev.t1_bar <= d.r1.get());
            assert!(ev.t2_bar >= 0.0 && ev.t2_bar <= d.r2.get());
            if p2 > 0.0 {
                assert!(ev.gamma1 > ev.gamma1_prime);
            }
        }
    }

    #[test]
    fn power_scaling_improves_everything() {
        // Scaling both powers up strictly raises every SINR and strictly
        // lowers every error probability. Rates are drawn as capacity
        // fractions so the probabilities stay clear of the f64 tail clamp.
        let params = SystemParams::new(bl(100), 20_000.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let p1 = rng.gen_range(100.0..5000.0);
            let p2 = rng.gen_range(100.0..5000.0);
            let probe = decision(p1, p2, 0.0, 0.0);
            let cap1 = snr_x1_sic(&gains(), &probe).capacity();
            let cap2 = sinr_x2_at_u2(&gains(), &probe).capacity();
            let r1 = rng.gen_range(0.6..0.95) * cap1;
            let r2 = rng.gen_range(0.5..0.95) * cap2;
            let d = decision(p1, p2, r1, r2);
            let alpha = rng.gen_range(1.01..1.5);
            let scaled = decision(alpha * p1, alpha * p2, r1, r2);
            let a = evaluate_noma(&gains(), &d, &params).unwrap();
            let b = evaluate_noma(&gains(), &scaled, &params).unwrap();
            assert!(b.gamma2 > a.gamma2);
            assert!(b.gamma21 > a.gamma21);
            assert!(b.gamma1 > a.gamma1);
            assert!(b.gamma1_prime > a.gamma1_prime);
            assert!(b.eps2 < a.eps2);
            assert!(b.eps21 < a.eps21);
            assert!(b.eps1 < a.eps1);
            assert!(b.eps1_prime <= a.eps1_prime);
        }
    }

    #[test]
    fn monte_carlo_reproduces_effective_error() {
        // Simulate the SIC event, then the matching conditional decode of
        // x₁; the empirical failure rate must agree with ε̄₁.
        let params = SystemParams::new(bl(100), 10_000.0, 1.0).unwrap();
        let d = decision(7000.0, 3000.0, 9.0, 1.4);
        let ev = evaluate_noma(&gains(), &d, &params).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let trials = 1_000_000u32;
        let mut failures = 0u32;
        for _ in 0..trials {
            let sic_failed = rng.gen::<f64>() < ev.eps21.get();
            let p_fail = if sic_failed {
                ev.eps1_prime.get()
            } else {
                ev.eps1.get()
            };
            if rng.gen::<f64>() < p_fail {
                failures += 1;
            }
        }
        let est = f64::from(failures) / f64::from(trials);
        let truth = ev.eps_bar1.get();
        let se = (truth * (1.0 - truth) / f64::from(trials)).sqrt();
        assert!(
            (est - truth).abs() <= 3.0 * se,
            "MC {est} vs ε̄₁ {truth} (3σ = {})",
            3.0 * se
        );
    }
}
