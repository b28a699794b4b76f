//! Solver-vs-oracle comparison on randomized instances.
//!
//! Each instance draws an average SNR, blocklength, target, and gain pair,
//! then solves with the fast designs and with the dense-grid references at
//! two nested resolutions. The grid can only underestimate the true
//! optimum, so the refinement gap doubles as an estimate of the remaining
//! grid error; an instance passes when the solver sits within
//! `max(0.5% relative, 2x refinement gap)` of the fine grid.

use fbnoma_core::channel::db_to_linear;
use fbnoma_core::fbl::Blocklength;
use fbnoma_core::model::{ChannelGains, SystemParams};
use fbnoma_core::noma::{optimize_noma, Tolerances};
use fbnoma_core::oma::optimize_oma;
use fbnoma_core::oracle::{grid_optimize_noma, grid_optimize_oma, GridSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct OracleCheckOpts {
    pub instances: usize,
    pub seed: u64,
    pub noma_grid: GridSpec,
    pub oma_grid: GridSpec,
}

impl Default for OracleCheckOpts {
    fn default() -> Self {
        OracleCheckOpts {
            instances: 20,
            seed: 1,
            // The binding axis needs the density: the NOMA optimum rides
            // the T̄₂ = T₀ boundary in R₂, the OMA one in P₂ (first-order
            // sensitivity); the remaining axes are interior maxima where
            // the step only costs second order.
            noma_grid: GridSpec::new(61, 201, 61).expect("static spec"),
            oma_grid: GridSpec::new(201, 61, 61).expect("static spec"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SchemeComparison {
    pub solver: f64,
    pub grid_coarse: f64,
    pub grid_fine: f64,
    /// |solver − fine| / max(fine, floor).
    pub deviation: f64,
    /// max(0.5%, 2·(fine − coarse)/fine).
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct InstanceReport {
    pub snr_db: f64,
    pub n: u32,
    pub t0: f64,
    pub h1: f64,
    pub h2: f64,
    pub noma: SchemeComparison,
    pub oma: SchemeComparison,
}

#[derive(Debug, Clone)]
pub struct OracleCheckSummary {
    pub reports: Vec<InstanceReport>,
    pub max_deviation: f64,
    pub failures: usize,
}

fn compare(solver: f64, coarse: f64, fine: f64) -> SchemeComparison {
    debug_assert!(fine >= coarse - 1e-12, "nested refinement cannot lose");
    let floor = 1e-9;
    let deviation = (solver - fine).abs() / fine.max(floor);
    let refinement_gap = if fine > floor { 2.0 * (fine - coarse) / fine } else { 0.0 };
    let tolerance = refinement_gap.max(0.005);
    SchemeComparison {
        solver,
        grid_coarse: coarse,
        grid_fine: fine,
        deviation,
        tolerance,
        pass: deviation <= tolerance,
    }
}

pub fn run(opts: &OracleCheckOpts) -> OracleCheckSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut reports = Vec::with_capacity(opts.instances);
    for _ in 0..opts.instances {
        let snr_db = rng.gen_range(20.0..40.0);
        let n = rng.gen_range(100..=500u32);
        let t0 = rng.gen_range(0.5..3.0);
        let h1 = rng.gen_range(0.2..1.0);
        let ratio = rng.gen_range(4.0..100.0);
        let h2 = h1 / ratio;

        let gains = ChannelGains::new(h1, h2).expect("ratio > 1");
        let p = db_to_linear(snr_db);
        let params = SystemParams::new(Blocklength::new(n).expect("n >= 100"), p, t0)
            .expect("positive parameters");
        let tol = Tolerances::for_power_budget(p);

        let noma_solver = optimize_noma(&gains, &params, &tol).objective;
        let noma_coarse = grid_optimize_noma(&gains, &params, &opts.noma_grid).objective;
        let noma_fine = grid_optimize_noma(&gains, &params, &opts.noma_grid.refined()).objective;

        let oma_solver = optimize_oma(&gains, &params, &tol).t1_bar;
        let oma_coarse = grid_optimize_oma(&gains, &params, &opts.oma_grid).t1_bar;
        let oma_fine = grid_optimize_oma(&gains, &params, &opts.oma_grid.refined()).t1_bar;

        reports.push(InstanceReport {
            snr_db,
            n,
            t0,
            h1,
            h2,
            noma: compare(noma_solver, noma_coarse, noma_fine),
            oma: compare(oma_solver, oma_coarse, oma_fine),
        });
    }
    let max_deviation = reports
        .iter()
        .flat_map(|r| [r.noma.deviation, r.oma.deviation])
        .fold(0.0, f64::max);
    let failures = reports.iter().filter(|r| !(r.noma.pass && r.oma.pass)).count();
    OracleCheckSummary {
        reports,
        max_deviation,
        failures,
    }
}

pub fn format_summary(summary: &OracleCheckSummary) -> String {
    let mut out = String::new();
    for (i, r) in summary.reports.iter().enumerate() {
        out.push_str(&format!(
            "instance {i:2}: snr_db={:5.1} n={:3} t0={:.2} h1={:.3} h2={:.5}\n",
            r.snr_db, r.n, r.t0, r.h1, r.h2
        ));
        for (label, c) in [("noma", &r.noma), ("oma ", &r.oma)] {
            out.push_str(&format!(
                "    {label}: solver={:.6} grid={:.6} (coarse {:.6}) dev={:.3e} tol={:.3e} {}\n",
                c.solver,
                c.grid_fine,
                c.grid_coarse,
                c.deviation,
                c.tolerance,
                if c.pass { "ok" } else { "MISMATCH" }
            ));
        }
    }
    out.push_str(&format!(
        "max deviation: {:.3e} over {} instances ({} mismatches)\n",
        summary.max_deviation,
        summary.reports.len(),
        summary.failures
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_check_agrees() {
        let opts = OracleCheckOpts {
            instances: 3,
            seed: 11,
            noma_grid: GridSpec::new(41, 141, 41).unwrap(),
            oma_grid: GridSpec::new(141, 41, 41).unwrap(),
        };
        let summary = run(&opts);
        assert_eq!(summary.reports.len(), 3);
        assert_eq!(summary.failures, 0, "{}", format_summary(&summary));
    }
}
