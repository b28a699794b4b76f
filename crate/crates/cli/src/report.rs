//! Human-readable rendering of solve results.

use fbnoma_core::channel::MonteCarloStats;
use fbnoma_core::model::SystemParams;
use fbnoma_core::noma::SolveReport;
use fbnoma_core::oma::OmaSolution;

pub fn format_noma(report: &SolveReport, params: &SystemParams) -> String {
    let mut out = String::new();
    out.push_str("scheme      noma\n");
    out.push_str(&format!("feasible    {}\n", report.feasible));
    out.push_str(&format!("objective   {:.6} bps/Hz (T1)\n", report.objective));
    if let Some(ev) = &report.evaluation {
        let d = &report.decision;
        out.push_str(&format!(
            "decision    P1={:.4} P2={:.4} R1={:.6} R2={:.6}\n",
            d.p1,
            d.p2,
            d.r1.get(),
            d.r2.get()
        ));
        out.push_str(&format!(
            "user 2      T2={:.6} bps/Hz (target {})\n",
            ev.t2_bar, params.t0
        ));
        out.push_str(&format!(
            "snr         g21={:.4} g1={:.4} g1'={:.4} g2={:.4}\n",
            ev.gamma21.get(),
            ev.gamma1.get(),
            ev.gamma1_prime.get(),
            ev.gamma2.get()
        ));
        out.push_str(&format!(
            "errors      eps21={:.3e} eps1={:.3e} eps1'={:.3e} eps2={:.3e} eps_bar1={:.3e}\n",
            ev.eps21.get(),
            ev.eps1.get(),
            ev.eps1_prime.get(),
            ev.eps2.get(),
            ev.eps_bar1.get()
        ));
        let it = &report.iterations;
        out.push_str(&format!(
            "iterations  p2_bound={} fixed_point={}{} r1_bisect={} scan={} golden={}\n",
            it.p2_bound_bisections,
            it.fixed_point,
            if it.fixed_point_fell_back { " (bisection fallback)" } else { "" },
            it.r1_bisections,
            it.scan_points,
            it.golden_section
        ));
        out.push_str(&format!("concave-in-P1 condition  {}\n", report.convexity_gate));
    }
    out
}

pub fn format_oma(label: &str, sol: &OmaSolution, params: &SystemParams) -> String {
    let mut out = String::new();
    out.push_str(&format!("scheme      {label}\n"));
    out.push_str(&format!("feasible    {}\n", sol.feasible));
    out.push_str(&format!("objective   {:.6} bps/Hz (T1)\n", sol.t1_bar));
    if sol.feasible {
        let d = &sol.decision;
        out.push_str(&format!(
            "decision    N1={} N2={} P1={:.4} P2={:.4} R1={:.6} R2={:.6}\n",
            d.n1.get(),
            d.n2.get(),
            d.p1,
            d.p2,
            d.r1.get(),
            d.r2.get()
        ));
        out.push_str(&format!(
            "user 2      T2={:.6} bps/Hz (target {})\n",
            sol.t2_bar, params.t0
        ));
    }
    out
}

pub fn format_monte_carlo(label: &str, stats: &MonteCarloStats) -> String {
    format!(
        "scheme      {label}\nmean T1     {:.6} bps/Hz (stderr {:.6}, {} realizations, {} infeasible)\n",
        stats.mean, stats.std_err, stats.realizations, stats.infeasible
    )
}
