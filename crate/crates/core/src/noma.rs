//! Optimal rate and power design for the NOMA downlink.
//!
//! The problem: maximize user 1's effective throughput `T̄₁` subject to
//! `T̄₂ ≥ T₀` and `P₁ + P₂ ≤ P`. At the optimum both constraints are active
//! (full power is always spent, and user 2 is served exactly `T₀`), which
//! reduces the search to one dimension. The solver follows four steps:
//!
//! 1. for a candidate `P₂`, find the smaller root `R₂†` of
//!    `𝒯(R₂) = R₂(1 − Q(f(γ₂, R₂))) = T₀` by the fixed-point iteration
//!    `R₂ ← T₀ / (1 − Q(f(γ₂, R₂)))`, which contracts on `[0, R₂‡]`;
//! 2. find the `R₁†` maximizing `T̄₁` from the two-branch first-order
//!    condition built on `𝒰` (the derivative of `r(1 − Q(f))`), each branch
//!    being concave;
//! 3. bracket the feasible powers from below by `P₂ˡ`, the smallest `P₂`
//!    whose best achievable `T̄₂` reaches `T₀`;
//! 4. scan `P₂ ∈ [P₂ˡ, P]` coarsely and refine the best bracket by golden
//!    section. A sufficient condition (the convexity gate) certifies the
//!    objective concave in `P₁`, in which case the refinement is exact up
//!    to unimodality; the coarse scan guards the remaining cases.
//!
//! Infeasible instances (no `P₂` can serve `T₀`) report a zero objective.

use crate::fbl::{dispersion_raw, eps_raw, f_raw, q_raw, Blocklength, ErrorProb, Rate, SnrValue, SQRT_2PI};
use crate::model::{evaluate_noma, ChannelGains, NomaDecision, NomaEvaluation, SystemParams};
use crate::numerics::bisect_root;
use std::f64::consts::LN_2;

/// Default number of coarse scan points in the outer power search.
pub const DEFAULT_SCAN_POINTS: usize = 200;

/// Solver tolerances and iteration caps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Convergence tolerance on rates, bps/Hz.
    pub rate_tol: f64,
    /// Convergence tolerance on powers, linear units.
    pub power_tol: f64,
    /// Tolerance on meeting the throughput target, bps/Hz.
    pub throughput_tol: f64,
    pub max_fixed_point_iters: usize,
    pub max_bisection_iters: usize,
}

impl Tolerances {
    /// Defaults for a given power budget: `rate_tol = 1e-9`,
    /// `power_tol = 1e-6·P`, `throughput_tol = 1e-7`.
    pub fn for_power_budget(p_total: f64) -> Self {
        Tolerances {
            rate_tol: 1e-9,
            power_tol: 1e-6 * p_total,
            throughput_tol: 1e-7,
            max_fixed_point_iters: 200,
            max_bisection_iters: 200,
        }
    }

    fn assert_valid(&self) {
        assert!(
            self.rate_tol > 0.0
                && self.power_tol > 0.0
                && self.throughput_tol > 0.0
                && self.max_fixed_point_iters > 0
                && self.max_bisection_iters > 0,
            "tolerances must be strictly positive"
        );
    }
}

/// Per-stage iteration counts of a solve (counts refer to the returned
/// solution's final inner solves, not the whole scan).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveIterations {
    pub p2_bound_bisections: usize,
    pub fixed_point: usize,
    pub fixed_point_fell_back: bool,
    pub r1_bisections: usize,
    pub scan_points: usize,
    pub golden_section: usize,
}

/// Result of a NOMA design solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub decision: NomaDecision,
    pub evaluation: Option<NomaEvaluation>,
    /// `T̄₁` at the decision; zero when infeasible.
    pub objective: f64,
    pub feasible: bool,
    pub iterations: SolveIterations,
    /// Whether the sufficient concavity condition held at the optimum.
    pub convexity_gate: bool,
}

impl SolveReport {
    fn infeasible(iterations: SolveIterations) -> Self {
        SolveReport {
            decision: NomaDecision::zero(),
            evaluation: None,
            objective: 0.0,
            feasible: false,
            iterations,
            convexity_gate: false,
        }
    }
}

// ---------------------------------------------------------------------------
// User-2 throughput in R₂ and its analytic derivative
// ---------------------------------------------------------------------------

/// `𝒯(R₂) = R₂ (1 − Q(f(γ₂, N, R₂)))`, concave in `R₂` below capacity.
pub fn throughput_u2_of_r2(gamma2: SnrValue, n: Blocklength, r2: Rate) -> f64 {
    assert!(gamma2.get() > 0.0, "gamma2 must be positive");
    t2_of_r2_raw(gamma2.get(), n.as_f64(), r2.get())
}

pub(crate) fn t2_of_r2_raw(gamma: f64, n: f64, r: f64) -> f64 {
    r * (1.0 - eps_raw(gamma, n, r))
}

/// Analytic derivative `𝒯′(R₂) = 1 − Q(f) − R₂·b/√(2π)·e^{−f²/2}` with
/// `b = √N·ln2/√V`. This is exactly `𝒰(γ₂, R₂)`.
pub fn d_throughput_u2_dr2(gamma2: SnrValue, n: Blocklength, r2: Rate) -> f64 {
    u_condition(gamma2, n, r2)
}

/// First-order condition kernel `𝒰(x, r)`: the derivative of
/// `r (1 − Q(f(x, ·, r)))` in `r`, strictly decreasing on `[0, log₂(1+x)]`.
pub fn u_condition(x: SnrValue, n: Blocklength, r: Rate) -> f64 {
    assert!(x.get() > 0.0, "SNR argument of the first-order condition must be positive");
    u_raw(x.get(), n.as_f64(), r.get())
}

pub(crate) fn u_raw(gamma: f64, n: f64, r: f64) -> f64 {
    let v = dispersion_raw(gamma);
    let b = n.sqrt() * LN_2 / v.sqrt();
    let f = f_raw(gamma, n, r);
    1.0 - q_raw(f) - r * b / SQRT_2PI * (-0.5 * f * f).exp()
}

/// Stationary rate `R₂‡` of `𝒯` on `(0, log₂(1+γ₂))`, unique by concavity.
///
/// Errors if the derivative has no sign change on the operational domain
/// (only possible at vanishing `N·γ₂`, which the model never optimizes
/// over); use the peak helpers for total behavior.
pub fn r2_ddagger(gamma2: SnrValue, n: Blocklength) -> crate::Result<Rate> {
    assert!(gamma2.get() > 0.0, "gamma2 must be positive");
    let g = gamma2.get();
    let nf = n.as_f64();
    let cap = gamma2.capacity();
    if u_raw(g, nf, cap) >= 0.0 {
        return Err(crate::Error::Solver(format!(
            "throughput derivative has no sign change on (0, {cap}]: N·γ₂ too small"
        )));
    }
    let root = bisect_root(
        |r| u_raw(g, nf, r),
        0.0,
        cap,
        1e-12 * (1.0 + cap),
        f64::INFINITY,
        200,
    )
    .expect("bracket signs verified above");
    Rate::new(root.x)
}

/// Argmax and maximum of `𝒯(R₂)` on the operational domain `[0, capacity]`,
/// total in `γ₂`: when the stationary point does not exist the peak sits at
/// capacity, where `𝒯 = log₂(1+γ₂)/2`.
pub(crate) fn t2_peak(gamma: f64, n: f64, x_tol: f64) -> (f64, f64, usize) {
    let cap = (1.0 + gamma).log2();
    if u_raw(gamma, n, cap) >= 0.0 {
        return (cap, t2_of_r2_raw(gamma, n, cap), 0);
    }
    let root = bisect_root(|r| u_raw(gamma, n, r), 0.0, cap, x_tol, f64::INFINITY, 200)
        .expect("derivative positive at 0, negative at capacity");
    (root.x, t2_of_r2_raw(gamma, n, root.x), root.iterations)
}

// ---------------------------------------------------------------------------
// Step 1: R₂ by fixed-point iteration
// ---------------------------------------------------------------------------

/// Outcome of the Step-1 rate solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointSolve {
    /// The smaller root `R₂†` of `𝒯(R₂) = T₀`.
    pub rate: Rate,
    pub iterations: usize,
    /// True when the iteration cap was hit and the root was finished by
    /// bisection instead.
    pub used_bisection: bool,
}

/// Solve `𝒯(R₂) = T₀` for the smaller root by iterating
/// `R₂ ← T₀/(1 − Q(f(γ₂, R₂)))` from `R₂ = T₀`. Returns `None` when even
/// the stationary rate cannot reach `T₀` (infeasible `P₂`).
pub fn solve_r2_fixed_point(
    gamma2: SnrValue,
    n: Blocklength,
    t0: f64,
    tol: &Tolerances,
) -> Option<FixedPointSolve> {
    assert!(gamma2.get() > 0.0, "gamma2 must be positive");
    assert!(t0 >= 0.0 && t0.is_finite(), "t0 must be nonnegative");
    if t0 == 0.0 {
        return Some(FixedPointSolve {
            rate: Rate::ZERO,
            iterations: 0,
            used_bisection: false,
        });
    }
    let g = gamma2.get();
    let nf = n.as_f64();
    let (r_peak, peak, _) = t2_peak(g, nf, tol.rate_tol);
    if peak < t0 {
        return None;
    }
    let mut r = t0;
    for iterations in 1..=tol.max_fixed_point_iters {
        let next = t0 / (1.0 - eps_raw(g, nf, r));
        if !next.is_finite() {
            break;
        }
        if (next - r).abs() < tol.rate_tol {
            return Some(FixedPointSolve {
                rate: Rate::new(next).expect("iterates stay in [T₀, R₂‡]"),
                iterations,
                used_bisection: false,
            });
        }
        r = next;
    }
    // Contraction slows to a crawl as T₀ approaches the peak; finish the
    // same root with a bracketed search.
    let root = bisect_root(
        |r| t2_of_r2_raw(g, nf, r) - t0,
        0.0,
        r_peak,
        tol.rate_tol,
        tol.throughput_tol,
        tol.max_bisection_iters,
    )
    .expect("𝒯(0) = 0 < T₀ ≤ 𝒯(R₂‡)");
    Some(FixedPointSolve {
        rate: Rate::new(root.x).expect("root lies in [0, R₂‡]"),
        iterations: tol.max_fixed_point_iters + root.iterations,
        used_bisection: true,
    })
}

// ---------------------------------------------------------------------------
// Step 2: R₁ by first-order bisection
// ---------------------------------------------------------------------------

/// The `R₁` maximizing `T̄₁ = R₁(1 − ε̄₁)` for fixed powers and SIC outage.
///
/// The derivative is `(1−ε₂¹)𝒰(γ₁,·) + ε₂¹𝒰(γ′₁,·)` up to the
/// interference-limited capacity `log₂(1+γ′₁)` and `(1−ε₂¹)𝒰(γ₁,·)` beyond
/// it; both branches are concave, and the failed-SIC term drops to zero at
/// the branch boundary, so the global maximizer is the better of the two
/// branch candidates (ties go to the smaller rate).
pub fn solve_r1(
    gains: &ChannelGains,
    p1: f64,
    p2: f64,
    n: Blocklength,
    eps21: ErrorProb,
    tol: &Tolerances,
) -> Rate {
    let (r, _) = solve_r1_counted(gains.h1(), p1, p2, n.as_f64(), eps21.get(), tol);
    Rate::new(r).expect("rate bounded by capacity")
}

pub(crate) fn solve_r1_counted(
    h1: f64,
    p1: f64,
    p2: f64,
    nf: f64,
    e21: f64,
    tol: &Tolerances,
) -> (f64, usize) {
    if p1 <= 0.0 {
        return (0.0, 0);
    }
    let g1 = p1 * h1;
    let g1p = p1 * h1 / (p2 * h1 + 1.0);
    let cap1 = (1.0 + g1).log2();
    let cap1p = (1.0 + g1p).log2();
    let mut bisections = 0;

    let branch1 = |r: f64| (1.0 - e21) * u_raw(g1, nf, r) + e21 * u_raw(g1p, nf, r);
    let cand_a = if branch1(cap1p) < 0.0 {
        let root = bisect_root(branch1, 0.0, cap1p, tol.rate_tol, f64::INFINITY, tol.max_bisection_iters)
            .expect("derivative positive at 0");
        bisections += root.iterations;
        root.x
    } else {
        cap1p
    };

    let mut cand_b = None;
    if cap1p < cap1 {
        if u_raw(g1, nf, cap1) >= 0.0 {
            cand_b = Some(cap1);
        } else if u_raw(g1, nf, cap1p) > 0.0 {
            let root = bisect_root(
                |r| u_raw(g1, nf, r),
                cap1p,
                cap1,
                tol.rate_tol,
                f64::INFINITY,
                tol.max_bisection_iters,
            )
            .expect("sign change checked");
            bisections += root.iterations;
            cand_b = Some(root.x);
        }
    }

    let value = |r: f64| {
        let e1 = eps_raw(g1, nf, r);
        let e1p = if r <= cap1p { eps_raw(g1p, nf, r) } else { 1.0 };
        r * (1.0 - (e1 - e1 * e21 + e21 * e1p))
    };
    match cand_b {
        None => (cand_a, bisections),
        Some(b) => {
            if value(b) > value(cand_a) + tol.rate_tol {
                (b, bisections)
            } else {
                (cand_a, bisections)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Step 3: lower bound on P₂
// ---------------------------------------------------------------------------

/// Smallest `P₂` whose best achievable `T̄₂` (over `R₂`, with
/// `P₁ = P − P₂`) reaches `T₀`; `None` when the target is out of reach even
/// at full power. Zero target returns zero power.
pub fn p2_lower_bound(gains: &ChannelGains, params: &SystemParams, tol: &Tolerances) -> Option<f64> {
    p2_lower_bound_counted(gains, params, tol).map(|(p2, _)| p2)
}

pub(crate) fn p2_lower_bound_counted(
    gains: &ChannelGains,
    params: &SystemParams,
    tol: &Tolerances,
) -> Option<(f64, usize)> {
    if params.t0 == 0.0 {
        return Some((0.0, 0));
    }
    let p = params.p_total;
    let h2 = gains.h2();
    let nf = params.n.as_f64();
    let surplus = |p2: f64| t2_peak(p2 * h2 / ((p - p2) * h2 + 1.0), nf, tol.rate_tol).1 - params.t0;
    if surplus(p) < 0.0 {
        return None;
    }
    // The map P₂ ↦ max_R₂ 𝒯 is strictly increasing; bracket (0, P] with a
    // virtual negative value at 0 (γ₂ = 0 is singular, surplus → −T₀).
    let (mut lo, mut hi) = (0.0_f64, p);
    let mut iterations = 0;
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..tol.max_bisection_iters {
        let s = surplus(mid);
        iterations += 1;
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
    Some((mid, iterations))
}

// ---------------------------------------------------------------------------
// Step 4 support: the sufficient concavity condition
// ---------------------------------------------------------------------------

/// Sufficient condition for `T̄₁` to be concave in `P₁` at a decision:
/// `log₂(1+γ′₁) < R₁ ≤ log₂(1+γ₁)` and
/// `R₂ ≤ min{log₂(1+γ₂), log₂(1+γ₂¹) − 2/(N·h₁·ln2)}`.
pub fn convexity_gate(gains: &ChannelGains, d: &NomaDecision, n: Blocklength) -> bool {
    let g1 = d.p1 * gains.h1();
    let g1p = d.p1 * gains.h1() / (d.p2 * gains.h1() + 1.0);
    let g2 = d.p2 * gains.h2() / (d.p1 * gains.h2() + 1.0);
    let g21 = d.p2 * gains.h1() / (d.p1 * gains.h1() + 1.0);
    let r1 = d.r1.get();
    let r2 = d.r2.get();
    let rate_cond = (1.0 + g1p).log2() < r1 && r1 <= (1.0 + g1).log2();
    let bound = ((1.0 + g2).log2()).min((1.0 + g21).log2() - 2.0 / (n.as_f64() * gains.h1() * LN_2));
    rate_cond && r2 <= bound
}

// ---------------------------------------------------------------------------
// Step 4: outer power search
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Candidate {
    p2: f64,
    r2: f64,
    r1: f64,
    objective: f64,
    evaluation: NomaEvaluation,
    fixed_point: usize,
    fell_back: bool,
    r1_bisections: usize,
}

/// How the Step-2 rate is chosen during the outer search.
#[derive(Debug, Clone, Copy)]
enum R1Mode {
    Optimize,
    Pinned(f64),
}

fn eval_candidate(
    gains: &ChannelGains,
    params: &SystemParams,
    tol: &Tolerances,
    p2: f64,
    r1_mode: R1Mode,
) -> Option<Candidate> {
    let p2 = p2.clamp(0.0, params.p_total);
    if p2 <= 0.0 {
        return None;
    }
    let p1 = params.p_total - p2;
    let gamma2 = SnrValue::new(p2 * gains.h2() / (p1 * gains.h2() + 1.0)).ok()?;
    let fp = solve_r2_fixed_point(gamma2, params.n, params.t0, tol)?;
    let r2 = fp.rate.get();
    let gamma21 = p2 * gains.h1() / (p1 * gains.h1() + 1.0);
    let e21 = eps_raw(gamma21, params.n.as_f64(), r2);
    let (r1, r1_bisections) = match r1_mode {
        R1Mode::Optimize => solve_r1_counted(gains.h1(), p1, p2, params.n.as_f64(), e21, tol),
        R1Mode::Pinned(r) => (r, 0),
    };
    let decision = NomaDecision::new(p1, p2, Rate::new(r1).ok()?, fp.rate).ok()?;
    let evaluation = evaluate_noma(gains, &decision, params).ok()?;
    Some(Candidate {
        p2,
        r2,
        r1,
        objective: evaluation.t1_bar,
        evaluation,
        fixed_point: fp.iterations,
        fell_back: fp.used_bisection,
        r1_bisections,
    })
}

fn single_user_report(gains: &ChannelGains, params: &SystemParams, tol: &Tolerances) -> SolveReport {
    let p = params.p_total;
    let (r1, r1_bisections) = solve_r1_counted(gains.h1(), p, 0.0, params.n.as_f64(), 0.0, tol);
    let decision = NomaDecision::new(p, 0.0, Rate::new(r1).expect("bounded"), Rate::ZERO)
        .expect("valid powers");
    let evaluation = evaluate_noma(gains, &decision, params).expect("within budget");
    SolveReport {
        objective: evaluation.t1_bar,
        feasible: true,
        iterations: SolveIterations {
            r1_bisections,
            ..SolveIterations::default()
        },
        convexity_gate: convexity_gate(gains, &decision, params.n),
        decision,
        evaluation: Some(evaluation),
    }
}

/// Full four-step NOMA design with the default coarse-scan density.
pub fn optimize_noma(gains: &ChannelGains, params: &SystemParams, tol: &Tolerances) -> SolveReport {
    optimize_noma_with_scan(gains, params, tol, DEFAULT_SCAN_POINTS)
}

/// Full four-step NOMA design with an explicit coarse-scan density.
///
/// The sufficient concavity condition is only sufficient, so the outer
/// search is a dense scan followed by golden-section refinement of the best
/// bracket rather than a pure golden section.
pub fn optimize_noma_with_scan(
    gains: &ChannelGains,
    params: &SystemParams,
    tol: &Tolerances,
    scan_points: usize,
) -> SolveReport {
    optimize_over_p2(gains, params, tol, scan_points, R1Mode::Optimize)
}

fn optimize_over_p2(
    gains: &ChannelGains,
    params: &SystemParams,
    tol: &Tolerances,
    scan_points: usize,
    r1_mode: R1Mode,
) -> SolveReport {
    tol.assert_valid();
    let p = params.p_total;
    if params.t0 == 0.0 {
        if let R1Mode::Pinned(r1) = r1_mode {
            return pinned_single_user_report(gains, params, tol, r1);
        }
        return single_user_report(gains, params, tol);
    }

    let mut iterations = SolveIterations::default();
    let Some((p2l, bound_iters)) = p2_lower_bound_counted(gains, params, tol) else {
        return SolveReport::infeasible(SolveIterations::default());
    };
    iterations.p2_bound_bisections = bound_iters;

    let scan_points = scan_points.max(2);
    let step = (p - p2l) / (scan_points - 1) as f64;
    let mut best: Option<(usize, Candidate)> = None;
    for i in 0..scan_points {
        let p2 = if i + 1 == scan_points { p } else { p2l + step * i as f64 };
        if let Some(c) = eval_candidate(gains, params, tol, p2, r1_mode) {
            if best.as_ref().map_or(true, |(_, b)| c.objective > b.objective) {
                best = Some((i, c));
            }
        }
    }
    iterations.scan_points = scan_points;
    let Some((best_idx, mut best_cand)) = best else {
        return SolveReport::infeasible(iterations);
    };

    // Golden-section refinement of the bracket around the scan winner.
    let lo = p2l + step * best_idx.saturating_sub(1) as f64;
    let hi = (p2l + step * (best_idx + 1) as f64).min(p);
    if hi > lo {
        let (x, _, gs_iters) = crate::numerics::golden_section_max(
            |p2| {
                eval_candidate(gains, params, tol, p2, r1_mode)
                    .map_or(f64::NEG_INFINITY, |c| c.objective)
            },
            lo,
            hi,
            tol.power_tol,
            tol.max_bisection_iters,
        );
        iterations.golden_section = gs_iters;
        if let Some(c) = eval_candidate(gains, params, tol, x, r1_mode) {
            if c.objective > best_cand.objective {
                best_cand = c;
            }
        }
    }

    iterations.fixed_point = best_cand.fixed_point;
    iterations.fixed_point_fell_back = best_cand.fell_back;
    iterations.r1_bisections = best_cand.r1_bisections;

    let decision = NomaDecision::new(
        p - best_cand.p2,
        best_cand.p2,
        Rate::new(best_cand.r1).expect("bounded"),
        Rate::new(best_cand.r2).expect("bounded"),
    )
    .expect("valid powers");
    SolveReport {
        objective: best_cand.objective,
        feasible: true,
        convexity_gate: convexity_gate(gains, &decision, params.n),
        decision,
        evaluation: Some(best_cand.evaluation),
        iterations,
    }
}

fn pinned_single_user_report(
    gains: &ChannelGains,
    params: &SystemParams,
    tol: &Tolerances,
    r1: f64,
) -> SolveReport {
    let _ = tol;
    let decision = match (Rate::new(r1), NomaDecision::new(params.p_total, 0.0, Rate::ZERO, Rate::ZERO)) {
        (Ok(rate), Ok(d)) => NomaDecision { r1: rate, ..d },
        _ => return SolveReport::infeasible(SolveIterations::default()),
    };
    match evaluate_noma(gains, &decision, params) {
        Ok(evaluation) => SolveReport {
            objective: evaluation.t1_bar,
            feasible: true,
            convexity_gate: convexity_gate(gains, &decision, params.n),
            decision,
            evaluation: Some(evaluation),
            iterations: SolveIterations::default(),
        },
        Err(_) => SolveReport::infeasible(SolveIterations::default()),
    }
}

// ---------------------------------------------------------------------------
// Pinned-variable solves used by the figure sweeps
// ---------------------------------------------------------------------------

/// Best design with `P₂` pinned (the `T̄₁` vs `P₂` curves): `P₁ = P − P₂`,
/// `R₂` from Step 1, `R₁` from Step 2. Infeasible `P₂` reports zero.
pub fn optimize_noma_fixed_p2(
    gains: &ChannelGains,
    params: &SystemParams,
    p2: f64,
    tol: &Tolerances,
) -> SolveReport {
    tol.assert_valid();
    if params.t0 == 0.0 && p2 == 0.0 {
        return single_user_report(gains, params, tol);
    }
    match eval_candidate(gains, params, tol, p2, R1Mode::Optimize) {
        None => SolveReport::infeasible(SolveIterations::default()),
        Some(c) => candidate_report(gains, params, c),
    }
}

/// Best design with `R₂` pinned (the `T̄₁` vs `R₂` curves): the unique `P₂`
/// satisfying `T̄₂ = T₀` is found by bisection (monotone in `P₂`), the rest
/// follows Steps 2. Returns an infeasible report when `R₂` cannot serve
/// `T₀` within the budget.
pub fn optimize_noma_fixed_r2(
    gains: &ChannelGains,
    params: &SystemParams,
    r2: f64,
    tol: &Tolerances,
) -> SolveReport {
    tol.assert_valid();
    if params.t0 == 0.0 && r2 == 0.0 {
        return single_user_report(gains, params, tol);
    }
    if r2 <= 0.0 {
        return SolveReport::infeasible(SolveIterations::default());
    }
    let p = params.p_total;
    let h2 = gains.h2();
    let nf = params.n.as_f64();
    let t2_at = |p2: f64| t2_of_r2_raw(p2 * h2 / ((p - p2) * h2 + 1.0), nf, r2);
    if t2_at(p) < params.t0 {
        return SolveReport::infeasible(SolveIterations::default());
    }
    let (mut lo, mut hi) = (0.0_f64, p);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..tol.max_bisection_iters {
        let s = t2_at(mid) - params.t0;
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
    let p2 = mid;
    let p1 = p - p2;
    let gamma21 = p2 * gains.h1() / (p1 * gains.h1() + 1.0);
    let e21 = eps_raw(gamma21, nf, r2);
    let (r1, r1_bisections) = solve_r1_counted(gains.h1(), p1, p2, nf, e21, tol);
    let decision = NomaDecision::new(p1, p2, Rate::new(r1).expect("bounded"), Rate::new(r2).expect("checked"))
        .expect("valid powers");
    match evaluate_noma(gains, &decision, params) {
        Ok(evaluation) => SolveReport {
            objective: evaluation.t1_bar,
            feasible: true,
            convexity_gate: convexity_gate(gains, &decision, params.n),
            decision,
            evaluation: Some(evaluation),
            iterations: SolveIterations {
                r1_bisections,
                ..SolveIterations::default()
            },
        },
        Err(_) => SolveReport::infeasible(SolveIterations::default()),
    }
}

/// Best design with `R₁` pinned (the `T̄₁` vs `R₁` curves): the outer power
/// search runs as usual but the Step-2 rate is fixed.
pub fn optimize_noma_fixed_r1(
    gains: &ChannelGains,
    params: &SystemParams,
    r1: f64,
    tol: &Tolerances,
) -> SolveReport {
    optimize_over_p2(gains, params, tol, DEFAULT_SCAN_POINTS, R1Mode::Pinned(r1))
}

fn candidate_report(gains: &ChannelGains, params: &SystemParams, c: Candidate) -> SolveReport {
    let decision = NomaDecision::new(
        params.p_total - c.p2,
        c.p2,
        Rate::new(c.r1).expect("bounded"),
        Rate::new(c.r2).expect("bounded"),
    )
    .expect("valid powers");
    SolveReport {
        objective: c.objective,
        feasible: true,
        convexity_gate: convexity_gate(gains, &decision, params.n),
        decision,
        evaluation: Some(c.evaluation),
        iterations: SolveIterations {
            fixed_point: c.fixed_point,
            fixed_point_fell_back: c.fell_back,
            r1_bisections: c.r1_bisections,
            ..SolveIterations::default()
        },
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
    fn tol() -> Tolerances {
        Tolerances::for_power_budget(10_000.0)
    }

    #[test]
    fn t2_zero_rate_and_capacity() {
        let g = snr(1.4118);
        let n = bl(100);
        assert_eq!(throughput_u2_of_r2(g, n, Rate::ZERO), 0.0);
        let cap = g.capacity();
        let at_cap = throughput_u2_of_r2(g, n, rate(cap));
        assert!((at_cap - 0.5 * cap).abs() < 1e-15);
    }

    #[test]
    fn derivative_at_zero_rate_is_positive() {
        let g = snr(2.0);
        let d = d_throughput_u2_dr2(g, bl(100), Rate::ZERO);
        let expected = 1.0 - eps_raw(2.0, 100.0, 0.0);
        assert!((d - expected).abs() < 1e-15);
        assert!(d > 0.0);
    }

    #[test]
    fn r2_ddagger_is_stationary_and_below_capacity() {
        let g = snr(1.4118);
        let n = bl(100);
        let r = r2_ddagger(g, n).unwrap();
        assert!(d_throughput_u2_dr2(g, n, r).abs() < 1e-9);
        assert!(r.get() < g.capacity());
    }

    #[test]
    fn r2_ddagger_errors_when_derivative_never_flips() {
        // N·γ₂ below π: the derivative stays positive up to capacity.
        let g = snr(0.01);
        assert!(r2_ddagger(g, bl(100)).is_err());
    }

    #[test]
    fn fixed_point_zero_target() {
        let fp = solve_r2_fixed_point(snr(1.5), bl(100), 0.0, &tol()).unwrap();
        assert_eq!(fp.rate, Rate::ZERO);
    }

    #[test]
    fn fixed_point_solves_target_below_peak() {
        let g = snr(1.4118);
        let n = bl(100);
        let t = tol();
        let fp = solve_r2_fixed_point(g, n, 0.5, &t).unwrap();
        let achieved = throughput_u2_of_r2(g, n, fp.rate);
        assert!((achieved - 0.5).abs() <= t.throughput_tol);
        let stationary = r2_ddagger(g, n).unwrap();
        assert!(fp.rate.get() <= stationary.get());
        assert!(!fp.used_bisection);
    }

    #[test]
    fn fixed_point_matches_bisection_oracle() {
        let g = snr(1.4118);
        let n = bl(100);
        let fp = solve_r2_fixed_point(g, n, 0.5, &tol()).unwrap();
        // Independent bisection on 𝒯(R₂) − T₀ over [0, R₂‡].
        let peak = r2_ddagger(g, n).unwrap().get();
        let (mut lo, mut hi) = (0.0, peak);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if throughput_u2_of_r2(g, n, rate(mid)) < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((fp.rate.get() - 0.5 * (lo + hi)).abs() < 1e-8);
    }

    #[test]
    fn fixed_point_infeasible_above_peak() {
        let g = snr(1.4118);
        let n = bl(100);
        let (_, peak, _) = t2_peak(1.4118, 100.0, 1e-9);
        assert!(solve_r2_fixed_point(g, n, peak + 0.1, &tol()).is_none());
    }

    #[test]
    fn u_condition_sign_change_and_zero_rate() {
        let x = snr(40.0);
        let n = bl(200);
        let at_zero = u_condition(x, n, Rate::ZERO);
        assert!((at_zero - (1.0 - eps_raw(40.0, 200.0, 0.0))).abs() < 1e-15);
        assert!(at_zero > 0.0);
        assert!(u_condition(x, n, rate(x.capacity())) < 0.0);
    }

    #[test]
    fn solve_r1_stays_below_capacity_and_handles_zero_power() {
        let gains = ChannelGains::new(0.64, 0.0025).unwrap();
        let t = tol();
        let r = solve_r1(&gains, 4000.0, 6000.0, bl(200), ErrorProb::new(0.01).unwrap(), &t);
        let cap1 = (1.0 + 4000.0 * 0.64_f64).log2();
        assert!(r.get() > 0.0 && r.get() <= cap1);
        let zero = solve_r1(&gains, 0.0, 6000.0, bl(200), ErrorProb::ZERO, &t);
        assert_eq!(zero, Rate::ZERO);
    }

    #[test]
    fn solve_r1_no_sic_outage_matches_single_user_condition() {
        let gains = ChannelGains::new(0.64, 0.0025).unwrap();
        let n = bl(200);
        let r = solve_r1(&gains, 10_000.0, 0.0, n, ErrorProb::ZERO, &tol());
        let g1 = snr(10_000.0 * 0.64);
        assert!(u_condition(g1, n, r).abs() < 1e-7);
    }

    #[test]
    fn solve_r1_beats_dense_grid() {
        let (p1, p2) = (4000.0, 6000.0);
        let e21 = 0.01;
        let t = tol();
        let (r_star, _) = solve_r1_counted(0.64, p1, p2, 200.0, e21, &t);
        let g1: f64 = p1 * 0.64;
        let g1p: f64 = p1 * 0.64 / (p2 * 0.64 + 1.0);
        let cap1 = (1.0 + g1).log2();
        let cap1p = (1.0 + g1p).log2();
        let value = |r: f64| {
            let e1 = eps_raw(g1, 200.0, r);
            let e1p = if r <= cap1p { eps_raw(g1p, 200.0, r) } else { 1.0 };
            r * (1.0 - (e1 - e1 * e21 + e21 * e1p))
        };
        let mut grid_best = 0.0_f64;
        for i in 0..=2000 {
            let r = cap1 * i as f64 / 2000.0;
            grid_best = grid_best.max(value(r));
        }
        assert!(
            value(r_star) >= grid_best - 1e-4,
            "solver {} vs grid {grid_best}",
            value(r_star)
        );
    }

    #[test]
    fn p2_lower_bound_zero_target_and_root_property() {
        let gains = ChannelGains::new(0.64, 0.04).unwrap();
        let t = tol();
        let params0 = SystemParams::new(bl(100), 10_000.0, 0.0).unwrap();
        assert_eq!(p2_lower_bound(&gains, &params0, &t), Some(0.0));

        let params = SystemParams::new(bl(100), 10_000.0, 1.0).unwrap();
        let p2l = p2_lower_bound(&gains, &params, &t).unwrap();
        let g2 = p2l * 0.04 / ((10_000.0 - p2l) * 0.04 + 1.0);
        let (_, peak, _) = t2_peak(g2, 100.0, t.rate_tol);
        assert!((peak - 1.0).abs() <= 10.0 * t.throughput_tol, "peak {peak}");
    }

    #[test]
    fn p2_lower_bound_infeasible_for_absurd_target() {
        let gains = ChannelGains::new(0.64, 1e-6).unwrap();
        let params = SystemParams::new(bl(100), 10.0, 5.0).unwrap();
        assert_eq!(p2_lower_bound(&gains, &params, &Tolerances::for_power_budget(10.0)), None);
    }

    #[test]
    fn convexity_gate_rejects_out_of_range_rates() {
        let gains = ChannelGains::new(0.64, 0.04).unwrap();
        let n = bl(100);
        let d = NomaDecision::new(1000.0, 9000.0, rate(1.0), rate(20.0)).unwrap();
        assert!(!convexity_gate(&gains, &d, n)); // R₂ above both bounds
        let g1p: f64 = 1000.0 * 0.64 / (9000.0 * 0.64 + 1.0);
        let low_r1 = NomaDecision::new(1000.0, 9000.0, rate(0.5 * (1.0 + g1p).log2()), rate(1.0)).unwrap();
        assert!(!convexity_gate(&gains, &low_r1, n)); // R₁ below the no-SIC capacity
    }

    #[test]
    fn optimize_zero_target_is_single_user() {
        let gains = ChannelGains::new(0.64, 0.04).unwrap();
        let params = SystemParams::new(bl(100), 10_000.0, 0.0).unwrap();
        let report = optimize_noma(&gains, &params, &tol());
        assert!(report.feasible);
        assert_eq!(report.decision.p2, 0.0);
        assert_eq!(report.decision.r2, Rate::ZERO);
        assert!((report.decision.p1 - 10_000.0).abs() < 1e-9);
        // objective equals the single-user maximum of R(1−Q(f(P·h₁, N, R)))
        let g1 = snr(10_000.0 * 0.64);
        let mut grid_best = 0.0_f64;
        for i in 0..=4000 {
            let r = g1.capacity() * i as f64 / 4000.0;
            grid_best = grid_best.max(r * (1.0 - eps_raw(g1.get(), 100.0, r)));
        }
        assert!((report.objective - grid_best).abs() < 1e-5);
    }

    #[test]
    fn optimize_infeasible_reports_zero() {
        let gains = ChannelGains::new(0.64, 1e-6).unwrap();
        let params = SystemParams::new(bl(100), 10.0, 5.0).unwrap();
        let report = optimize_noma(&gains, &params, &Tolerances::for_power_budget(10.0));
        assert!(!report.feasible);
        assert_eq!(report.objective, 0.0);
    }

    #[test]
    fn optimize_meets_constraints() {
        let gains = ChannelGains::new(0.64, 0.04).unwrap();
        let params = SystemParams::new(bl(100), 10_000.0, 1.0).unwrap();
        let t = tol();
        let report = optimize_noma(&gains, &params, &t);
        assert!(report.feasible);
        let ev = report.evaluation.unwrap();
        // Lemma 1: full power. Lemma 2: the target is met with equality.
        assert!((report.decision.p1 + report.decision.p2 - 10_000.0).abs() <= 1e-9 * 10_000.0);
        assert!((ev.t2_bar - 1.0).abs() <= t.throughput_tol);
        // The optimum spends more than the minimum feasible power on u₂.
        let p2l = p2_lower_bound(&gains, &params, &t).unwrap();
        assert!(report.decision.p2 >= p2l);
    }

    #[test]
    fn pinned_p2_below_lower_bound_is_infeasible() {
        let gains = ChannelGains::new(0.64, 0.04).unwrap();
        let params = SystemParams::new(bl(100), 10_000.0, 1.0).unwrap();
        let t = tol();
        let p2l = p2_lower_bound(&gains, &params, &t).unwrap();
        let report = optimize_noma_fixed_p2(&gains, &params, 0.5 * p2l, &t);
        assert!(!report.feasible);
        assert_eq!(report.objective, 0.0);
        let feasible = optimize_noma_fixed_p2(&gains, &params, 1.5 * p2l, &t);
        assert!(feasible.feasible);
        assert!(feasible.objective > 0.0);
    }

    #[test]
    fn pinned_r2_serves_target_exactly() {
        let gains = ChannelGains::new(0.64, 0.04).unwrap();
        let params = SystemParams::new(bl(100), 10_000.0, 1.0).unwrap();
        let t = tol();
        let report = optimize_noma_fixed_r2(&gains, &params, 1.3, &t);
        assert!(report.feasible);
        let ev = report.evaluation.unwrap();
        assert!((ev.t2_bar - 1.0).abs() <= 1e-6);
        assert_eq!(report.decision.r2.get(), 1.3);
    }
}
