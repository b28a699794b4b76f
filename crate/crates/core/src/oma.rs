//! Orthogonal-access benchmark: the two users occupy disjoint time slots
//! (`N₁ + N₂ = N`), so each link is interference free with SNR `γᵢ = Pᵢhᵢ`
//! and throughput `T̄ᵢ = (Nᵢ/N)·Rᵢ·(1 − Q(f(γᵢ, Nᵢ, Rᵢ)))`.
//!
//! The design searches the time-slot split exhaustively. Per candidate
//! `N₂`: Step 1 picks the minimum `P₂` whose best rate meets `T̄₂ = T₀`
//! (bisection over `P₂`, the inner rate from the same first-order condition
//! as the NOMA Step 2); Step 2 spends the remaining energy on user 1,
//! `P₁ = (NP − N₂P₂)/N₁`, and picks `R₁` by the single-user first-order
//! condition; Step 3 keeps the best split. Energy, not power, is conserved
//! across slots: `N₁P₁ + N₂P₂ = NP`.

use crate::fbl::{Blocklength, Rate};
use crate::model::{ChannelGains, SystemParams};
use crate::noma::{t2_of_r2_raw, t2_peak, u_raw, Tolerances};
use crate::numerics::bisect_root;

/// An OMA decision: slot lengths, powers, and rates for both users.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmaDecision {
    pub n1: Blocklength,
    pub n2: Blocklength,
    pub p1: f64,
    pub p2: f64,
    pub r1: Rate,
    pub r2: Rate,
}

/// Result of an OMA design solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmaSolution {
    pub decision: OmaDecision,
    /// `T̄₁` at the decision; the objective. Zero when infeasible.
    pub t1_bar: f64,
    pub t2_bar: f64,
    pub feasible: bool,
}

impl OmaSolution {
    fn infeasible(n_total: Blocklength) -> Self {
        let half = Blocklength::new((n_total.get() / 2).max(1)).expect("positive");
        OmaSolution {
            decision: OmaDecision {
                n1: half,
                n2: half,
                p1: 0.0,
                p2: 0.0,
                r1: Rate::ZERO,
                r2: Rate::ZERO,
            },
            t1_bar: 0.0,
            t2_bar: 0.0,
            feasible: false,
        }
    }
}

/// Single-link effective throughput `(Nᵢ/N)·r·(1 − Q(f(p·h, Nᵢ, r)))`.
///
/// Zero power carries zero rate in the model; that corner returns 0.
pub fn oma_throughput(h: f64, p: f64, n_i: Blocklength, n_total: Blocklength, r: Rate) -> f64 {
    debug_assert!(p > 0.0 || r.get() == 0.0, "zero power requires zero rate");
    if r.get() == 0.0 || p <= 0.0 {
        return 0.0;
    }
    let frac = n_i.as_f64() / n_total.as_f64();
    frac * t2_of_r2_raw(p * h, n_i.as_f64(), r.get())
}

/// Step 1: minimum `P₂` (and its best `R₂`) meeting `T̄₂ = T₀` in a slot of
/// `n2` symbols. The bisection bracket is the full budget spent in user 2's
/// slot, `P₂ ≤ N·P/N₂`; the joint energy constraint is enforced in Step 2.
/// `None` when the target is unreachable even at the bracket top.
pub fn oma_step1_p2_r2(
    h2: f64,
    n2: Blocklength,
    params: &SystemParams,
    tol: &Tolerances,
) -> Option<(f64, Rate)> {
    if params.t0 == 0.0 {
        return Some((0.0, Rate::ZERO));
    }
    let n_total = params.n.as_f64();
    let n2f = n2.as_f64();
    let frac = n2f / n_total;
    let p_max = n_total * params.p_total / n2f;
    let surplus = |p2: f64| frac * t2_peak(p2 * h2, n2f, tol.rate_tol).1 - params.t0;
    if surplus(p_max) < 0.0 {
        return None;
    }
    let (mut lo, mut hi) = (0.0_f64, p_max);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..tol.max_bisection_iters {
        let s = surplus(mid);
        if s.abs() <= tol.throughput_tol && (hi - lo) <= tol.power_tol {
            break;
        }
        if s < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        let next = 0.5 * (lo + hi);
        if next == lo || next == hi {
            break;
        }
        mid = next;
    }
    let (r2, _, _) = t2_peak(mid * h2, n2f, tol.rate_tol);
    Some((mid, Rate::new(r2).expect("bounded by capacity")))
}

/// Step 2: the rate maximizing user 1's slot throughput, i.e. the root of
/// the single-user first-order condition `𝒰(γ₁, R₁) = 0` (or capacity when
/// the derivative never turns negative).
pub fn oma_step2_r1(h1: f64, p1: f64, n1: Blocklength, tol: &Tolerances) -> Rate {
    if p1 <= 0.0 {
        return Rate::ZERO;
    }
    let g1 = p1 * h1;
    let n1f = n1.as_f64();
    let cap = (1.0 + g1).log2();
    if u_raw(g1, n1f, cap) >= 0.0 {
        return Rate::new(cap).expect("finite capacity");
    }
    let root = bisect_root(
        |r| u_raw(g1, n1f, r),
        0.0,
        cap,
        tol.rate_tol,
        f64::INFINITY,
        tol.max_bisection_iters,
    )
    .expect("derivative positive at rate 0");
    Rate::new(root.x).expect("bounded by capacity")
}

fn solve_for_split(
    gains: &ChannelGains,
    params: &SystemParams,
    n2: u32,
    tol: &Tolerances,
) -> Option<OmaSolution> {
    let n = params.n.get();
    if n2 == 0 || n2 >= n {
        return None;
    }
    let n1 = Blocklength::new(n - n2).expect("nonzero");
    let n2 = Blocklength::new(n2).expect("nonzero");
    let (p2, r2) = oma_step1_p2_r2(gains.h2(), n2, params, tol)?;
    let energy_left = params.n.as_f64() * params.p_total - n2.as_f64() * p2;
    if energy_left < 0.0 {
        return None;
    }
    let p1 = energy_left / n1.as_f64();
    let r1 = oma_step2_r1(gains.h1(), p1, n1, tol);
    let t1 = oma_throughput(gains.h1(), p1, n1, params.n, r1);
    let t2 = oma_throughput(gains.h2(), p2, n2, params.n, r2);
    Some(OmaSolution {
        decision: OmaDecision { n1, n2, p1, p2, r1, r2 },
        t1_bar: t1,
        t2_bar: t2,
        feasible: true,
    })
}

/// Full OMA design: exhaustive integer search over `N₂ ∈ {1, …, N−1}` with
/// Steps 1–2 per candidate. Infeasible at every split reports zero.
pub fn optimize_oma(gains: &ChannelGains, params: &SystemParams, tol: &Tolerances) -> OmaSolution {
    let n = params.n.get();
    assert!(n >= 2, "OMA needs at least two symbols to split");
    if params.t0 == 0.0 {
        // The constraint is vacuous; concentrate everything on user 1 with
        // the thinnest possible slot for user 2.
        return solve_for_split(gains, params, 1, tol).expect("t0 = 0 is always feasible");
    }
    let mut best: Option<OmaSolution> = None;
    for n2 in 1..n {
        if let Some(sol) = solve_for_split(gains, params, n2, tol) {
            if best.as_ref().map_or(true, |b| sol.t1_bar > b.t1_bar) {
                best = Some(sol);
            }
        }
    }
    best.unwrap_or_else(|| OmaSolution::infeasible(params.n))
}

/// Fixed-slot OMA variant: `N₁ = N₂ = N/2` (odd `N` splits as
/// `N₁ = ⌈N/2⌉`, `N₂ = ⌊N/2⌋`).
pub fn optimize_oma_fixed_slots(
    gains: &ChannelGains,
    params: &SystemParams,
    tol: &Tolerances,
) -> OmaSolution {
    let n = params.n.get();
    assert!(n >= 2, "OMA needs at least two symbols to split");
    solve_for_split(gains, params, n / 2, tol).unwrap_or_else(|| OmaSolution::infeasible(params.n))
}

/// As [`optimize_oma`] but with `R₁` pinned (the `T̄₁` vs `R₁` sweeps); the
/// slot and power allocation for user 2 is still optimized per split.
pub fn optimize_oma_fixed_r1(
    gains: &ChannelGains,
    params: &SystemParams,
    r1: f64,
    tol: &Tolerances,
) -> OmaSolution {
    let n = params.n.get();
    assert!(n >= 2, "OMA needs at least two symbols to split");
    let mut best: Option<OmaSolution> = None;
    for n2 in 1..n {
        if let Some(sol) = pinned_r1_split(gains, params, n2, r1, tol) {
            if best.as_ref().map_or(true, |b| sol.t1_bar > b.t1_bar) {
                best = Some(sol);
            }
        }
    }
    best.unwrap_or_else(|| OmaSolution::infeasible(params.n))
}

/// Fixed-slot variant of [`optimize_oma_fixed_r1`].
pub fn optimize_oma_fixed_slots_fixed_r1(
    gains: &ChannelGains,
    params: &SystemParams,
    r1: f64,
    tol: &Tolerances,
) -> OmaSolution {
    let n = params.n.get();
    assert!(n >= 2, "OMA needs at least two symbols to split");
    pinned_r1_split(gains, params, n / 2, r1, tol).unwrap_or_else(|| OmaSolution::infeasible(params.n))
}

fn pinned_r1_split(
    gains: &ChannelGains,
    params: &SystemParams,
    n2: u32,
    r1: f64,
    tol: &Tolerances,
) -> Option<OmaSolution> {
    let base = solve_for_split(gains, params, n2, tol)?;
    let r1 = Rate::new(r1).ok()?;
    let t1 = oma_throughput(gains.h1(), base.decision.p1, base.decision.n1, params.n, r1);
    Some(OmaSolution {
        decision: OmaDecision { r1, ..base.decision },
        t1_bar: t1,
        ..base
    })
}
