//! Brute-force reference optimizers.
//!
//! Everything here recomputes the SINR and error-probability chain directly
//! from the finite-blocklength primitives — it deliberately shares no code
//! with [`crate::model`], [`crate::noma`], or [`crate::oma`] — so that grid
//! agreement genuinely cross-checks the solvers. Feasibility uses the
//! relaxed inequality `T̄₂ ≥ T₀` rather than the equality the solvers prove
//! active at the optimum; agreement therefore also tests that theorem.
//!
//! Grids are dense and dumb on purpose; expect these to be orders of
//! magnitude slower than the solvers.

use crate::fbl::{q_raw, Blocklength, Rate};
use crate::model::{ChannelGains, NomaDecision, NomaEvaluation, SystemParams};
use crate::noma::{SolveIterations, SolveReport};
use crate::oma::{OmaDecision, OmaSolution};
use crate::{Error, Result};
use std::f64::consts::LN_2;

/// Grid densities for the brute-force searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub p2_points: usize,
    pub r2_points: usize,
    pub r1_points: usize,
}

impl GridSpec {
    pub fn new(p2_points: usize, r2_points: usize, r1_points: usize) -> Result<Self> {
        if p2_points < 2 || r2_points < 2 || r1_points < 2 {
            return Err(Error::domain("grid needs at least 2 points per axis"));
        }
        Ok(GridSpec {
            p2_points,
            r2_points,
            r1_points,
        })
    }

    /// Nested refinement: `k → 2k−1` keeps every coarse point on the fine
    /// grid, so the refined objective can never decrease.
    pub fn refined(self) -> Self {
        GridSpec {
            p2_points: 2 * self.p2_points - 1,
            r2_points: 2 * self.r2_points - 1,
            r1_points: 2 * self.r1_points - 1,
        }
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            p2_points: 61,
            r2_points: 61,
            r1_points: 61,
        }
    }
}

// ---------------------------------------------------------------------------
// Straight-line recomputation of the NOMA chain
// ---------------------------------------------------------------------------

fn q_of(gamma: f64, n: f64, r: f64) -> f64 {
    let v = 1.0 - 1.0 / ((1.0 + gamma) * (1.0 + gamma));
    q_raw(LN_2 * (n / v).sqrt() * ((1.0 + gamma).log2() - r))
}

/// All intermediate quantities of one NOMA operating point, recomputed
/// formula by formula. Zero-power corners use the same conventions as the
/// model: a vanished message never fails SIC (`ε₂¹ = 0`), and a zero-SNR
/// decode fails certainly unless its rate is zero.
#[derive(Debug, Clone, Copy)]
pub struct NomaPoint {
    pub gamma21: f64,
    pub gamma1: f64,
    pub gamma1_prime: f64,
    pub gamma2: f64,
    pub eps21: f64,
    pub eps1: f64,
    pub eps1_prime: f64,
    pub eps2: f64,
    pub eps_bar1: f64,
    pub t1_bar: f64,
    pub t2_bar: f64,
}

/// Evaluate the chain at `(P₁, P₂, R₁, R₂)` for gains `(h₁, h₂)`.
pub fn eval_noma_point(h1: f64, h2: f64, p1: f64, p2: f64, r1: f64, r2: f64, n: f64) -> NomaPoint {
    let gamma21 = p2 * h1 / (p1 * h1 + 1.0);
    let gamma1 = p1 * h1;
    let gamma1_prime = p1 * h1 / (p2 * h1 + 1.0);
    let gamma2 = p2 * h2 / (p1 * h2 + 1.0);

    let corner = |r: f64| if r > 0.0 { 1.0 } else { 0.0 };
    let eps21 = if p2 == 0.0 { 0.0 } else { q_of(gamma21, n, r2) };
    let eps2 = if p2 == 0.0 { corner(r2) } else { q_of(gamma2, n, r2) };
    let eps1 = if p1 == 0.0 { corner(r1) } else { q_of(gamma1, n, r1) };
    let eps1_prime = if gamma1_prime == 0.0 {
        corner(r1)
    } else if r1 <= (1.0 + gamma1_prime).log2() {
        q_of(gamma1_prime, n, r1)
    } else {
        1.0
    };
    let eps_bar1 = eps1 - eps1 * eps21 + eps21 * eps1_prime;
    NomaPoint {
        gamma21,
        gamma1,
        gamma1_prime,
        gamma2,
        eps21,
        eps1,
        eps1_prime,
        eps2,
        eps_bar1,
        t1_bar: r1 * (1.0 - eps_bar1),
        t2_bar: r2 * (1.0 - eps2),
    }
}

fn grid(points: usize, hi: f64) -> impl Iterator<Item = f64> {
    let denom = (points - 1) as f64;
    (0..points).map(move |i| hi * i as f64 / denom)
}

// ---------------------------------------------------------------------------
// NOMA grid search
// ---------------------------------------------------------------------------

/// Exhaustive search over `(P₂, R₂, R₁)` with `P₁ = P − P₂`, keeping points
/// with `T̄₂ ≥ T₀` and maximizing `T̄₁`. Ties resolve to the lowest
/// flattened grid index (P₂ outermost, then R₂, then R₁).
pub fn grid_optimize_noma(
    gains: &ChannelGains,
    params: &SystemParams,
    spec: &GridSpec,
) -> SolveReport {
    let (h1, h2) = (gains.h1(), gains.h2());
    let p = params.p_total;
    let n = params.n.as_f64();
    let mut best: Option<(f64, f64, f64, f64)> = None; // (objective, p2, r2, r1)

    for p2 in grid(spec.p2_points, p) {
        let p1 = p - p2;
        let gamma2 = p2 * h2 / (p1 * h2 + 1.0);
        let gamma21 = p2 * h1 / (p1 * h1 + 1.0);
        let gamma1 = p1 * h1;
        let gamma1_prime = p1 * h1 / (p2 * h1 + 1.0);
        let cap2 = (1.0 + gamma2).log2();
        let cap1 = (1.0 + gamma1).log2();
        let cap1p = (1.0 + gamma1_prime).log2();

        // ε₁ and ε′₁ do not depend on R₂; cache them across the R₂ loop.
        let corner = |r: f64| if r > 0.0 { 1.0 } else { 0.0 };
        let e1_cache: Vec<(f64, f64, f64)> = grid(spec.r1_points, cap1)
            .map(|r1| {
                let e1 = if p1 == 0.0 { corner(r1) } else { q_of(gamma1, n, r1) };
                let e1p = if gamma1_prime == 0.0 {
                    corner(r1)
                } else if r1 <= cap1p {
                    q_of(gamma1_prime, n, r1)
                } else {
                    1.0
                };
                (r1, e1, e1p)
            })
            .collect();

        for r2 in grid(spec.r2_points, cap2) {
            let eps2 = if p2 == 0.0 { corner(r2) } else { q_of(gamma2, n, r2) };
            let t2 = r2 * (1.0 - eps2);
            if t2 < params.t0 {
                continue;
            }
            let eps21 = if p2 == 0.0 { 0.0 } else { q_of(gamma21, n, r2) };
            for &(r1, e1, e1p) in &e1_cache {
                let t1 = r1 * (1.0 - (e1 - e1 * eps21 + eps21 * e1p));
                if best.map_or(true, |(b, ..)| t1 > b) {
                    best = Some((t1, p2, r2, r1));
                }
            }
        }
    }

    match best {
        None => SolveReport {
            decision: NomaDecision::zero(),
            evaluation: None,
            objective: 0.0,
            feasible: false,
            iterations: SolveIterations::default(),
            convexity_gate: false,
        },
        Some((objective, p2, r2, r1)) => {
            let point = eval_noma_point(h1, h2, p - p2, p2, r1, r2, n);
            let decision = NomaDecision::new(
                p - p2,
                p2,
                Rate::new(r1).expect("grid rates are finite"),
                Rate::new(r2).expect("grid rates are finite"),
            )
            .expect("grid powers are valid");
            SolveReport {
                objective,
                feasible: true,
                convexity_gate: gate_at(h1, h2, &decision, n),
                evaluation: Some(point_to_evaluation(&point)),
                decision,
                iterations: SolveIterations::default(),
            }
        }
    }
}

/// Eq.-28 check, recomputed locally so the oracle stays solver-free.
fn gate_at(h1: f64, h2: f64, d: &NomaDecision, n: f64) -> bool {
    let g1 = d.p1 * h1;
    let g1p = d.p1 * h1 / (d.p2 * h1 + 1.0);
    let g2 = d.p2 * h2 / (d.p1 * h2 + 1.0);
    let g21 = d.p2 * h1 / (d.p1 * h1 + 1.0);
    let r1 = d.r1.get();
    let bound = ((1.0 + g2).log2()).min((1.0 + g21).log2() - 2.0 / (n * h1 * LN_2));
    (1.0 + g1p).log2() < r1 && r1 <= (1.0 + g1).log2() && d.r2.get() <= bound
}

fn point_to_evaluation(p: &NomaPoint) -> NomaEvaluation {
    use crate::fbl::{ErrorProb, SnrValue};
    let snr = |g: f64| SnrValue::new(g).expect("grid SINRs are finite");
    let prob = |e: f64| ErrorProb::new(e.clamp(0.0, 1.0)).expect("probabilities in range");
    NomaEvaluation {
        gamma21: snr(p.gamma21),
        gamma1: snr(p.gamma1),
        gamma1_prime: snr(p.gamma1_prime),
        gamma2: snr(p.gamma2),
        eps21: prob(p.eps21),
        eps1: prob(p.eps1),
        eps1_prime: prob(p.eps1_prime),
        eps2: prob(p.eps2),
        eps_bar1: prob(p.eps_bar1),
        t1_bar: p.t1_bar,
        t2_bar: p.t2_bar,
    }
}

// ---------------------------------------------------------------------------
// OMA grid search
// ---------------------------------------------------------------------------

/// Exhaustive search over `(N₂, P₂, R₂, R₁)` with `P₁` implied by the
/// energy identity; feasibility is `(N₂/N)·R₂(1−ε₂) ≥ T₀`.
pub fn grid_optimize_oma(
    gains: &ChannelGains,
    params: &SystemParams,
    spec: &GridSpec,
) -> OmaSolution {
    grid_oma_over_splits(gains, params, spec, 1..params.n.get())
}

/// The same search restricted to the fixed split `N₂ = ⌊N/2⌋`.
pub fn grid_optimize_oma_fixed_slots(
    gains: &ChannelGains,
    params: &SystemParams,
    spec: &GridSpec,
) -> OmaSolution {
    let n2 = params.n.get() / 2;
    grid_oma_over_splits(gains, params, spec, n2..n2 + 1)
}

fn grid_oma_over_splits(
    gains: &ChannelGains,
    params: &SystemParams,
    spec: &GridSpec,
    splits: std::ops::Range<u32>,
) -> OmaSolution {
    let (h1, h2) = (gains.h1(), gains.h2());
    let n = params.n.as_f64();
    let budget = n * params.p_total;
    let mut best: Option<(f64, u32, f64, f64, f64, f64)> = None; // (t1, n2, p2, r2, r1, t2)

    for n2 in splits {
        if n2 == 0 || n2 >= params.n.get() {
            continue;
        }
        let n2f = f64::from(n2);
        let n1f = n - n2f;
        let frac2 = n2f / n;
        let frac1 = n1f / n;
        let p2_max = budget / n2f;
        for p2 in grid(spec.p2_points, p2_max) {
            // Lowest-index feasible R₂, if any.
            let mut feasible_r2: Option<(f64, f64)> = None;
            if params.t0 == 0.0 {
                feasible_r2 = Some((0.0, 0.0));
            } else if p2 > 0.0 {
                let gamma2 = p2 * h2;
                let cap2 = (1.0 + gamma2).log2();
                for r2 in grid(spec.r2_points, cap2) {
                    let t2 = frac2 * r2 * (1.0 - q_of(gamma2, n2f, r2));
                    if t2 >= params.t0 {
                        feasible_r2 = Some((r2, t2));
                        break;
                    }
                }
            }
            let Some((r2, t2)) = feasible_r2 else { continue };
            let p1 = (budget - n2f * p2) / n1f;
            if p1 < 0.0 {
                continue;
            }
            let mut best_r1 = (0.0, 0.0); // (t1, r1)
            if p1 > 0.0 {
                let gamma1 = p1 * h1;
                let cap1 = (1.0 + gamma1).log2();
                for r1 in grid(spec.r1_points, cap1) {
                    let t1 = frac1 * r1 * (1.0 - q_of(gamma1, n1f, r1));
                    if t1 > best_r1.0 {
                        best_r1 = (t1, r1);
                    }
                }
            }
            if best.map_or(true, |(b, ..)| best_r1.0 > b) {
                best = Some((best_r1.0, n2, p2, r2, best_r1.1, t2));
            }
        }
    }

    match best {
        None => OmaSolution {
            decision: OmaDecision {
                n1: Blocklength::new((params.n.get() / 2).max(1)).expect("positive"),
                n2: Blocklength::new((params.n.get() / 2).max(1)).expect("positive"),
                p1: 0.0,
                p2: 0.0,
                r1: Rate::ZERO,
                r2: Rate::ZERO,
            },
            t1_bar: 0.0,
            t2_bar: 0.0,
            feasible: false,
        },
        Some((t1, n2, p2, r2, r1, t2)) => {
            let n2b = Blocklength::new(n2).expect("nonzero");
            let n1b = Blocklength::new(params.n.get() - n2).expect("nonzero");
            let p1 = (budget - f64::from(n2) * p2) / n1b.as_f64();
            OmaSolution {
                decision: OmaDecision {
                    n1: n1b,
                    n2: n2b,
                    p1,
                    p2,
                    r1: Rate::new(r1).expect("finite"),
                    r2: Rate::new(r2).expect("finite"),
                },
                t1_bar: t1,
                t2_bar: t2,
                feasible: true,
            }
        }
    }
}
