//! Channel-gain construction and Monte Carlo averaging.
//!
//! Fixed-gain scenarios take the two coefficient magnitudes directly (the
//! figure captions quote `|h̃₁|`, `|h̃₂|`). Fading scenarios model
//! `h̃ᵢ = dᵢ^(−α)·h̄ᵢ` with `h̄ᵢ` a zero-mean unit-variance complex
//! Gaussian, so `|h̄ᵢ|²` is exponential with mean 1 and the mean linear
//! gain is `dᵢ^(−2α)/σᵢ²`. Noise powers default to 1 and are configurable.
//!
//! Sampling is counter-based: realization `i` draws from an independent
//! ChaCha stream keyed by `(seed, i)`, so results are identical no matter
//! how realizations are distributed over threads. Aggregation uses
//! index-ordered pairwise summation for run-to-run bit stability.

use crate::model::{ChannelGains, SystemParams};
use crate::noma::{optimize_noma, Tolerances};
use crate::numerics::pairwise_sum;
use crate::oma::{optimize_oma, optimize_oma_fixed_slots};
use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// Fixed channel coefficients, as quoted in the figure captions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioFixed {
    pub h1_tilde_mag: f64,
    pub h2_tilde_mag: f64,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
}

impl ScenarioFixed {
    /// Unit noise power at both users.
    pub fn new(h1_tilde_mag: f64, h2_tilde_mag: f64) -> Self {
        ScenarioFixed {
            h1_tilde_mag,
            h2_tilde_mag,
            sigma1_sq: 1.0,
            sigma2_sq: 1.0,
        }
    }

    /// The normalized linear gains `hᵢ = |h̃ᵢ|²/σᵢ²`; errors when the
    /// ordering `h₁ > h₂` fails.
    pub fn gains(&self) -> Result<ChannelGains> {
        ChannelGains::from_magnitudes(
            self.h1_tilde_mag,
            self.h2_tilde_mag,
            self.sigma1_sq,
            self.sigma2_sq,
        )
    }
}

/// Rayleigh-fading scenario with distance path loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioFading {
    /// Distance to user 1, meters; must be less than `d2`.
    pub d1: f64,
    pub d2: f64,
    /// Path-loss exponent applied to the coefficient, `h̃ᵢ = dᵢ^(−α)·h̄ᵢ`.
    pub alpha: f64,
    pub seed: u64,
    pub realizations: u32,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
}

impl ScenarioFading {
    pub fn new(d1: f64, d2: f64, alpha: f64, seed: u64, realizations: u32) -> Result<Self> {
        if !(d1 > 0.0 && d2 > d1) {
            return Err(Error::domain(format!(
                "distances must satisfy 0 < d1 < d2, got {d1}, {d2}"
            )));
        }
        if alpha <= 0.0 {
            return Err(Error::domain("path-loss exponent must be positive"));
        }
        if realizations == 0 {
            return Err(Error::domain("need at least one realization"));
        }
        Ok(ScenarioFading {
            d1,
            d2,
            alpha,
            seed,
            realizations,
            sigma1_sq: 1.0,
            sigma2_sq: 1.0,
        })
    }

    /// Override the per-user noise powers.
    pub fn with_noise(mut self, sigma1_sq: f64, sigma2_sq: f64) -> Result<Self> {
        if sigma1_sq <= 0.0 || sigma2_sq <= 0.0 {
            return Err(Error::domain("noise powers must be positive"));
        }
        self.sigma1_sq = sigma1_sq;
        self.sigma2_sq = sigma2_sq;
        Ok(self)
    }
}

/// `10^(x/10)`.
pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

/// Squared magnitude of a unit-variance complex Gaussian draw.
fn unit_cg_mag_sq(rng: &mut ChaCha8Rng) -> f64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    0.5 * (re * re + im * im)
}

/// Draw the gain pair for one realization.
///
/// Deterministic in `(seed, index)`. Draws violating the model ordering
/// `h₁ > h₂` relabel the users so the stronger link is user 1; exact ties
/// (measure zero) nudge `h₂` down one part in 10¹².
pub fn sample_fading_pair(scenario: &ScenarioFading, index: u32) -> ChannelGains {
    assert!(index < scenario.realizations, "index out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    rng.set_stream(u64::from(index));
    let (g1, g2) = sample_raw_gains(scenario, &mut rng);
    let (mut h1, mut h2) = if g1 > g2 { (g1, g2) } else { (g2, g1) };
    if h2 <= 0.0 {
        h2 = f64::MIN_POSITIVE;
    }
    if h1 <= h2 {
        h1 = h2 * (1.0 + 1e-12);
    }
    ChannelGains::new(h1, h2).expect("ordered positive gains")
}

/// The unswapped gains `(h₁, h₂)`; exposed for the statistics tests.
pub(crate) fn sample_raw_gains(scenario: &ScenarioFading, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let loss1 = scenario.d1.powf(-2.0 * scenario.alpha);
    let loss2 = scenario.d2.powf(-2.0 * scenario.alpha);
    let g1 = loss1 * unit_cg_mag_sq(rng) / scenario.sigma1_sq;
    let g2 = loss2 * unit_cg_mag_sq(rng) / scenario.sigma2_sq;
    (g1, g2)
}

/// Which optimizer a Monte Carlo run drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Noma,
    Oma,
    OmaFixedSlots,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Noma => "noma",
            Scheme::Oma => "oma",
            Scheme::OmaFixedSlots => "oma-fixed",
        }
    }
}

/// Mean objective and its standard error over the realizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloStats {
    pub mean: f64,
    pub std_err: f64,
    pub realizations: u32,
    pub infeasible: u32,
}

/// Per-realization objectives (`T̄₁`, with infeasible counted as zero), in
/// realization order. Realizations solve independently and may run in
/// parallel; the output order is fixed by the index.
pub fn monte_carlo_objectives(
    scenario: &ScenarioFading,
    params: &SystemParams,
    scheme: Scheme,
    tol: &Tolerances,
) -> Vec<f64> {
    (0..scenario.realizations)
        .into_par_iter()
        .map(|i| {
            let gains = sample_fading_pair(scenario, i);
            match scheme {
                Scheme::Noma => optimize_noma(&gains, params, tol).objective,
                Scheme::Oma => optimize_oma(&gains, params, tol).t1_bar,
                Scheme::OmaFixedSlots => optimize_oma_fixed_slots(&gains, params, tol).t1_bar,
            }
        })
        .collect()
}

/// Run the chosen optimizer over all realizations and average.
pub fn monte_carlo_average(
    scenario: &ScenarioFading,
    params: &SystemParams,
    scheme: Scheme,
    tol: &Tolerances,
) -> MonteCarloStats {
    let objectives = monte_carlo_objectives(scenario, params, scheme, tol);
    summarize(&objectives)
}

/// Mean and standard error by index-ordered pairwise summation.
pub fn summarize(objectives: &[f64]) -> MonteCarloStats {
    let n = objectives.len();
    let mean = pairwise_sum(objectives) / n as f64;
    let std_err = if n > 1 {
        let sq: Vec<f64> = objectives.iter().map(|x| (x - mean) * (x - mean)).collect();
        (pairwise_sum(&sq) / ((n - 1) as f64 * n as f64)).sqrt()
    } else {
        0.0
    };
    MonteCarloStats {
        mean,
        std_err,
        realizations: n as u32,
        infeasible: objectives.iter().filter(|&&x| x == 0.0).count() as u32,
    }
}
