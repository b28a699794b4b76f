//! Finite-blocklength primitives.
//!
//! The normal approximation ties together four quantities: the SNR (or SINR)
//! `γ`, the blocklength `N`, the transmission rate `R`, and the decoding
//! error probability `ε`. With the channel dispersion `V = 1 − (1+γ)⁻²`,
//!
//! ```text
//! ε = Q(f(γ, N, R)),   f(γ, N, R) = ln2 · √(N/V) · (log₂(1+γ) − R)
//! R = log₂(1+γ) − √(V/N) · Q⁻¹(ε) / ln2
//! ```
//!
//! where `Q` is the standard Gaussian upper-tail probability. This module
//! implements those formulas and the domain newtypes they operate on. The
//! approximation is considered accurate for `N ≥ 100`; nothing below the
//! positivity floor is enforced, experiments here use `N ≥ 50`.
//!
//! `Q` is evaluated through the complementary error function,
//! `Q(x) = erfc(x/√2)/2`, with a rational-approximation `erfc` good to
//! ~1e-15 relative error; `Q⁻¹` starts from a rational approximation of the
//! normal quantile and polishes with two Newton steps on `Q`.

use crate::{Error, Result};
use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

pub(crate) const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

// ---------------------------------------------------------------------------
// Domain newtypes
// ---------------------------------------------------------------------------

/// Linear signal-to-(interference-plus-)noise ratio, `γ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SnrValue(f64);

impl SnrValue {
    pub fn new(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::domain(format!(
                "SNR must be finite and nonnegative, got {gamma}"
            )));
        }
        Ok(SnrValue(gamma))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Shannon capacity `log₂(1+γ)` in bps/Hz.
    pub fn capacity(self) -> f64 {
        (1.0 + self.0).log2()
    }
}

/// Number of channel symbols, `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Blocklength(u32);

impl Blocklength {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("blocklength must be at least 1"));
        }
        Ok(Blocklength(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }
}

/// Transmission rate in bits per channel use, `r ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Rate(f64);

impl Rate {
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::domain(format!(
                "rate must be finite and nonnegative, got {r}"
            )));
        }
        Ok(Rate(r))
    }

    pub const ZERO: Rate = Rate(0.0);

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Probability in `[0, 1]`.
///
/// The operating regime of the model is `ε ≤ 0.5` (rates at or below
/// capacity); the type does not forbid larger values because the failed-SIC
/// branch explicitly assigns `ε′₁ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ErrorProb(f64);

impl ErrorProb {
    pub fn new(eps: f64) -> Result<Self> {
        if !eps.is_finite() || !(0.0..=1.0).contains(&eps) {
            return Err(Error::domain(format!(
                "probability must lie in [0, 1], got {eps}"
            )));
        }
        Ok(ErrorProb(eps))
    }

    pub const ZERO: ErrorProb = ErrorProb(0.0);
    pub const ONE: ErrorProb = ErrorProb(1.0);

    pub fn get(self) -> f64 {
        self.0
    }
}

// ---------------------------------------------------------------------------
// Gaussian tail function and inverse
// ---------------------------------------------------------------------------

/// Standard Gaussian upper-tail probability `Q(x) = ∫ₓ^∞ φ(t) dt`.
///
/// Strictly decreasing in `x` until the tails saturate: values whose true
/// magnitude is below the smallest positive double (`x ≳ 37.6`) are clamped
/// to `f64::MIN_POSITIVE` so the result stays strictly positive.
pub fn q_func(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("Q requires finite input, got {x}")));
    }
    Ok(q_raw(x))
}

/// Inverse of [`q_func`] on `(0, 1)`.
pub fn q_inv(p: f64) -> Result<f64> {
    if !p.is_finite() || p <= 0.0 || p >= 1.0 {
        return Err(Error::domain(format!(
            "Q⁻¹ requires p in (0, 1), got {p}"
        )));
    }
    Ok(q_inv_raw(p))
}

pub(crate) fn q_raw(x: f64) -> f64 {
    let q = 0.5 * erfc(x * FRAC_1_SQRT_2);
    if q == 0.0 {
        // erfc underflowed; the true tail is below the smallest subnormal.
        f64::MIN_POSITIVE
    } else {
        q
    }
}

/// Standard Gaussian density.
pub(crate) fn gauss_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

pub(crate) fn q_inv_raw(p: f64) -> f64 {
    let mut x = -norm_quantile(p);
    // Two Newton steps on Q itself: Q'(x) = −φ(x).
    for _ in 0..2 {
        let pdf = gauss_pdf(x);
        if pdf == 0.0 {
            break;
        }
        let step = (q_raw(x) - p) / pdf;
        let next = x + step;
        if !next.is_finite() {
            return q_inv_bisect(p);
        }
        x = next;
    }
    if (q_raw(x) - p).abs() > 1e-9 * p.max(1e-12) {
        return q_inv_bisect(p);
    }
    x
}

fn q_inv_bisect(p: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0_f64, 40.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if q_raw(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Rational approximation of the standard normal quantile `Φ⁻¹(p)`
/// (Acklam's algorithm, ~1e-9 relative before refinement).
fn norm_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_690e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Complementary error function, rational Chebyshev approximation after
/// W. J. Cody. Relative error ~1e-15 on the non-underflowing range.
fn erfc(x: f64) -> f64 {
    const A: [f64; 5] = [
        3.161_123_743_870_565_6,
        1.138_641_541_510_501_6e2,
        3.774_852_376_853_020_2e2,
        3.209_377_589_138_469_4e3,
        1.857_777_061_846_031_5e-1,
    ];
    const B: [f64; 4] = [
        2.360_129_095_234_412_1e1,
        2.440_246_379_344_441_7e2,
        1.282_616_526_077_372_3e3,
        2.844_236_833_439_171e3,
    ];
    const C: [f64; 9] = [
        5.641_884_969_886_701e-1,
        8.883_149_794_388_376,
        6.611_919_063_714_163e1,
        2.986_351_381_974_001_3e2,
        8.819_522_212_417_691e2,
        1.712_047_612_634_070_6e3,
        2.051_078_377_826_071_5e3,
        1.230_339_354_797_997_2e3,
        2.153_115_354_744_038_3e-8,
    ];
    const D: [f64; 8] = [
        1.574_492_611_070_983_5e1,
        1.176_939_508_913_125e2,
        5.371_811_018_620_098_5e2,
        1.621_389_574_566_690_2e3,
        3.290_799_235_733_459_7e3,
        4.362_619_090_143_247e3,
        3.439_367_674_143_721_6e3,
        1.230_339_354_803_749_4e3,
    ];
    const P: [f64; 6] = [
        3.053_266_349_612_323_4e-1,
        3.603_448_999_498_044_4e-1,
        1.257_817_261_112_292_4e-1,
        1.608_378_514_874_227_7e-2,
        6.587_491_615_298_378e-4,
        1.631_538_713_730_209_8e-2,
    ];
    const Q: [f64; 5] = [
        2.568_520_192_289_822_4,
        1.872_952_849_923_460_4,
        5.279_051_029_514_284e-1,
        6.051_834_131_244_132e-2,
        2.335_204_976_268_691_8e-3,
    ];
    const SQRPI: f64 = 5.641_895_835_477_562_9e-1; // 1/√π
    const THRESH: f64 = 0.46875;
    const XBIG: f64 = 26.543;

    let y = x.abs();
    if y <= THRESH {
        // erfc via erf on the central interval.
        let z = if y > 1.11e-16 { y * y } else { 0.0 };
        let mut num = A[4] * z;
        let mut den = z;
        for i in 0..3 {
            num = (num + A[i]) * z;
            den = (den + B[i]) * z;
        }
        return 1.0 - x * (num + A[3]) / (den + B[3]);
    }

    let result = if y <= 4.0 {
        let mut num = C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + C[i]) * y;
            den = (den + D[i]) * y;
        }
        let r = (num + C[7]) / (den + D[7]);
        scaled_exp(y) * r
    } else if y < XBIG {
        let z = 1.0 / (y * y);
        let mut num = P[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + P[i]) * z;
            den = (den + Q[i]) * z;
        }
        let r = z * (num + P[4]) / (den + Q[4]);
        scaled_exp(y) * ((SQRPI - r) / y)
    } else {
        0.0
    };

    if x < 0.0 {
        2.0 - result
    } else {
        result
    }
}

/// `exp(−y²)` split so the squared term is formed from a 1/16-truncated
/// value, preserving low-order bits of the exponent.
fn scaled_exp(y: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp()
}

// ---------------------------------------------------------------------------
// Dispersion, f-metric, error probability, achievable rate
// ---------------------------------------------------------------------------

/// Channel dispersion `V = 1 − (1+γ)⁻²`, in `[0, 1)`; exactly 0 at `γ = 0`.
pub fn dispersion(gamma: SnrValue) -> f64 {
    dispersion_raw(gamma.get())
}

pub(crate) fn dispersion_raw(gamma: f64) -> f64 {
    if gamma == 0.0 {
        return 0.0;
    }
    let u = 1.0 + gamma;
    1.0 - 1.0 / (u * u)
}

/// `f(γ, N, R) = ln2 · √(N/V) · (log₂(1+γ) − R)`.
///
/// Positive below capacity, zero at capacity, negative above. Errors at
/// `γ = 0`, where the dispersion vanishes; callers evaluating zero-power
/// corners must handle them before calling.
pub fn f_metric(gamma: SnrValue, n: Blocklength, r: Rate) -> Result<f64> {
    if gamma.get() == 0.0 {
        return Err(Error::SingularSnr);
    }
    Ok(f_raw(gamma.get(), n.as_f64(), r.get()))
}

/// Assumes `gamma > 0`.
pub(crate) fn f_raw(gamma: f64, n: f64, r: f64) -> f64 {
    let v = dispersion_raw(gamma);
    LN_2 * (n / v).sqrt() * ((1.0 + gamma).log2() - r)
}

/// Decoding error probability `ε = Q(f(γ, N, R))`.
///
/// Exactly 0.5 at capacity, below 0.5 under it; decreasing in `γ` and
/// increasing in `R`. Propagates the `γ = 0` singularity of [`f_metric`].
pub fn decode_error_prob(gamma: SnrValue, n: Blocklength, r: Rate) -> Result<ErrorProb> {
    let f = f_metric(gamma, n, r)?;
    ErrorProb::new(q_raw(f))
}

/// Assumes `gamma > 0`.
pub(crate) fn eps_raw(gamma: f64, n: f64, r: f64) -> f64 {
    q_raw(f_raw(gamma, n, r))
}

/// Achievable rate of the normal approximation, clamped at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AchievableRate {
    pub rate: Rate,
    /// True when the raw value was negative (tiny `ε` at low SNR / short
    /// `N`) and the rate was clamped to 0.
    pub clamped: bool,
}

/// `R = log₂(1+γ) − √(V/N) · Q⁻¹(ε) / ln2` for `γ > 0` and `ε ∈ (0, 1)`.
///
/// The raw value is legitimately negative when `ε` is tiny relative to what
/// the link can support; it is clamped to 0 and flagged so sweeps see a zero
/// throughput instead of an abort. Where the raw value is nonnegative,
/// `decode_error_prob(γ, n, achievable_rate(γ, n, ε)) = ε`.
pub fn achievable_rate(gamma: SnrValue, n: Blocklength, eps: ErrorProb) -> Result<AchievableRate> {
    let e = eps.get();
    if e <= 0.0 || e >= 1.0 {
        return Err(Error::domain(format!(
            "achievable rate requires ε in (0, 1), got {e}"
        )));
    }
    if gamma.get() == 0.0 {
        return Err(Error::SingularSnr);
    }
    let g = gamma.get();
    let v = dispersion_raw(g);
    let raw = (1.0 + g).log2() - (v / n.as_f64()).sqrt() * q_inv_raw(e) / LN_2;
    if raw < 0.0 {
        Ok(AchievableRate {
            rate: Rate::ZERO,
            clamped: true,
        })
    } else {
        Ok(AchievableRate {
            rate: Rate::new(raw)?,
            clamped: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snr(g: f64) -> SnrValue {
        SnrValue::new(g).unwrap()
    }
    fn bl(n: u32) -> Blocklength {
        Blocklength::new(n).unwrap()
    }
    fn rate(r: f64) -> Rate {
        Rate::new(r).unwrap()
    }

    #[test]
    fn newtype_validation() {
        assert!(SnrValue::new(-1e-9).is_err());
        assert!(SnrValue::new(f64::NAN).is_err());
        assert!(SnrValue::new(f64::INFINITY).is_err());
        assert!(Blocklength::new(0).is_err());
        assert!(Rate::new(-0.1).is_err());
        assert!(ErrorProb::new(1.2).is_err());
        assert!(ErrorProb::new(-0.2).is_err());
        assert!(ErrorProb::new(1.0).is_ok());
    }

    #[test]
    fn q_at_zero_is_half() {
        assert_eq!(q_func(0.0).unwrap(), 0.5);
    }

    #[test]
    fn q_deep_tail_stays_positive() {
        let q = q_func(40.0).unwrap();
        assert!(q > 0.0);
        assert!(q < 1e-300);
    }

    #[test]
    fn q_rejects_non_finite() {
        assert!(q_func(f64::NAN).is_err());
        assert!(q_func(f64::INFINITY).is_err());
    }

    #[test]
    fn q_inv_domain() {
        assert!(q_inv(0.0).is_err());
        assert!(q_inv(1.0).is_err());
        assert!(q_inv(-0.5).is_err());
        assert!(q_inv(f64::NAN).is_err());
    }

    #[test]
    fn q_inv_median_is_exactly_zero() {
        assert_eq!(q_inv(0.5).unwrap(), 0.0);
    }

    #[test]
    fn q_round_trip() {
        let x = 2.0;
        let back = q_inv(q_func(x).unwrap()).unwrap();
        assert!((back - x).abs() < 1e-9, "round trip gave {back}");
    }

    #[test]
    fn dispersion_values() {
        assert_eq!(dispersion(snr(0.0)), 0.0);
        assert_eq!(dispersion(snr(1.0)), 0.75);
        assert!((dispersion(snr(99.0)) - 0.9999).abs() < 1e-15);
        assert!(dispersion(snr(1e6)) < 1.0);
    }

    #[test]
    fn f_metric_capacity_cancellation() {
        for &g in &[0.3, 1.0, 42.0, 1e4] {
            let cap = snr(g).capacity();
            let f = f_metric(snr(g), bl(173), rate(cap)).unwrap();
            assert_eq!(f, 0.0);
        }
    }

    #[test]
    fn f_metric_reference_point() {
        // ln2·√(100/(1−101⁻²))·(log₂101 − 6), evaluated at extended precision.
        let f = f_metric(snr(100.0), bl(100), rate(6.0)).unwrap();
        assert!((f - 4.562_597_975_135_356).abs() < 1e-12 * 4.56);
    }

    #[test]
    fn f_metric_sqrt_n_scaling() {
        let f1 = f_metric(snr(7.0), bl(128), rate(1.5)).unwrap();
        let f2 = f_metric(snr(7.0), bl(512), rate(1.5)).unwrap();
        assert!((f2 - 2.0 * f1).abs() < 1e-12 * f2.abs());
    }

    #[test]
    fn f_metric_singular_at_zero_snr() {
        assert_eq!(
            f_metric(snr(0.0), bl(100), rate(0.0)),
            Err(Error::SingularSnr)
        );
    }

    #[test]
    fn error_prob_at_capacity_is_half() {
        let g = snr(3.7);
        let eps = decode_error_prob(g, bl(200), rate(g.capacity())).unwrap();
        assert_eq!(eps.get(), 0.5);
    }

    #[test]
    fn error_prob_reference_point() {
        // Q(4.5625979751…) from the extended-precision tail integral.
        let eps = decode_error_prob(snr(100.0), bl(100), rate(6.0)).unwrap();
        assert!((eps.get() - 2.526_225_166_182_5e-6).abs() < 1e-9 * 2.5e-6);
    }

    #[test]
    fn error_prob_rate_zero_is_negligible() {
        let eps = decode_error_prob(snr(10.0), bl(100), rate(0.0)).unwrap();
        assert!(eps.get() < 1e-100);
    }

    #[test]
    fn achievable_rate_at_half_eps_is_capacity() {
        let g = snr(25.0);
        let r = achievable_rate(g, bl(300), ErrorProb::new(0.5).unwrap()).unwrap();
        assert!(!r.clamped);
        assert_eq!(r.rate.get(), g.capacity());
    }

    #[test]
    fn achievable_rate_round_trip() {
        let g = snr(100.0);
        let n = bl(100);
        let eps = ErrorProb::new(1e-5).unwrap();
        let r = achievable_rate(g, n, eps).unwrap();
        assert!(!r.clamped);
        let back = decode_error_prob(g, n, r.rate).unwrap();
        assert!((back.get() - 1e-5).abs() < 1e-9);
    }

    #[test]
    fn achievable_rate_clamps_negative() {
        // log₂(1.01) − √(V/100)·Q⁻¹(1e-9)/ln2 < 0.
        let r = achievable_rate(snr(0.01), bl(100), ErrorProb::new(1e-9).unwrap()).unwrap();
        assert!(r.clamped);
        assert_eq!(r.rate.get(), 0.0);
    }

    #[test]
    fn achievable_rate_domain_errors() {
        assert!(achievable_rate(snr(1.0), bl(100), ErrorProb::ZERO).is_err());
        assert!(achievable_rate(snr(1.0), bl(100), ErrorProb::ONE).is_err());
    }
}
