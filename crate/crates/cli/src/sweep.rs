//! Sweep engine: iterate one variable, solve per point per scheme, and
//! collect rows for the CSV of record.
//!
//! The sweep semantics mirror the figures: pinning `p2`, `r2`, or `r1`
//! re-optimizes every other quantity at each point, while `t0`, `n`, and
//! `snr_db` sweeps run the full designs. Fading scenarios average the full
//! designs over the realizations and carry a standard-error column.

use anyhow::{bail, Context, Result};
use fbnoma_core::channel::{
    monte_carlo_average, db_to_linear, Scheme, ScenarioFading, ScenarioFixed,
};
use fbnoma_core::fbl::Blocklength;
use fbnoma_core::model::{ChannelGains, SystemParams};
use fbnoma_core::noma::{
    optimize_noma_fixed_p2, optimize_noma_fixed_r1, optimize_noma_fixed_r2,
    optimize_noma_with_scan, SolveReport, Tolerances,
};
use fbnoma_core::oma::{
    optimize_oma, optimize_oma_fixed_r1, optimize_oma_fixed_slots,
    optimize_oma_fixed_slots_fixed_r1, OmaSolution,
};
use rayon::prelude::*;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

/// The variable a sweep iterates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    P2,
    R2,
    R1,
    T0,
    N,
    SnrDb,
}

impl SweepVar {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "p2" => SweepVar::P2,
            "r2" => SweepVar::R2,
            "r1" => SweepVar::R1,
            "t0" => SweepVar::T0,
            "n" => SweepVar::N,
            "snr_db" | "snr-db" => SweepVar::SnrDb,
            other => bail!("unknown sweep variable `{other}` (expected p2, r2, r1, t0, n, snr_db)"),
        })
    }

    pub fn label(self) -> &'static str {
        match self {
            SweepVar::P2 => "p2",
            SweepVar::R2 => "r2",
            SweepVar::R1 => "r1",
            SweepVar::T0 => "t0",
            SweepVar::N => "n",
            SweepVar::SnrDb => "snr_db",
        }
    }
}

pub fn parse_scheme(s: &str) -> Result<Scheme> {
    Ok(match s {
        "noma" => Scheme::Noma,
        "oma" => Scheme::Oma,
        "oma-fixed" | "oma_fixed" => Scheme::OmaFixedSlots,
        other => bail!("unknown scheme `{other}` (expected noma, oma, oma-fixed)"),
    })
}

/// The channel side of a sweep.
#[derive(Debug, Clone, Copy)]
pub enum Scenario {
    Fixed(ScenarioFixed),
    Fading(ScenarioFading),
}

/// A fully resolved sweep, ready to run.
#[derive(Debug, Clone)]
pub struct ResolvedSweep {
    pub name: String,
    pub scenario: Scenario,
    pub snr_db: f64,
    pub n: u32,
    pub t0: f64,
    pub var: SweepVar,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub schemes: Vec<Scheme>,
    pub scan_points: usize,
}

impl ResolvedSweep {
    pub fn validate(&self) -> Result<()> {
        if self.schemes.is_empty() {
            bail!("at least one scheme is required");
        }
        if self.points == 0 {
            bail!("sweep needs at least one point");
        }
        if self.points == 1 {
            if self.start > self.stop {
                bail!("sweep range is empty: start {} > stop {}", self.start, self.stop);
            }
        } else if self.start >= self.stop {
            bail!("sweep range must satisfy start < stop, got [{}, {}]", self.start, self.stop);
        }
        match (&self.scenario, self.var) {
            (Scenario::Fading(_), SweepVar::P2 | SweepVar::R2 | SweepVar::R1) => {
                bail!("fading scenarios support only t0, n, and snr_db sweeps")
            }
            (Scenario::Fixed(_), SweepVar::P2 | SweepVar::R2)
                if self.schemes.iter().any(|s| *s != Scheme::Noma) =>
            {
                bail!("p2 and r2 sweeps are defined for the noma scheme only")
            }
            _ => Ok(()),
        }
    }
}

/// One CSV row. Columns absent for a given sweep stay empty.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub sweep_var: &'static str,
    pub value: f64,
    pub scheme: &'static str,
    pub objective: f64,
    pub t2_bar: Option<f64>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub n1: Option<u32>,
    pub n2: Option<u32>,
    pub feasible: Option<bool>,
    pub stderr: Option<f64>,
}

impl ResultRow {
    fn infeasible(var: &'static str, value: f64, scheme: &'static str) -> Self {
        ResultRow {
            sweep_var: var,
            value,
            scheme,
            objective: 0.0,
            t2_bar: None,
            p1: None,
            p2: None,
            r1: None,
            r2: None,
            n1: None,
            n2: None,
            feasible: Some(false),
            stderr: None,
        }
    }
}

pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    (0..points)
        .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
        .collect()
}

/// Run the sweep: points are dispatched to the worker pool, rows come back
/// in sweep order (scheme-major within each point).
pub fn run_sweep(spec: &ResolvedSweep) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let values = linspace(spec.start, spec.stop, spec.points);
    let rows: Vec<Vec<ResultRow>> = values
        .par_iter()
        .map(|&value| {
            spec.schemes
                .iter()
                .map(|&scheme| run_point(spec, value, scheme))
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

fn run_point(spec: &ResolvedSweep, value: f64, scheme: Scheme) -> ResultRow {
    let var = spec.var.label();
    catch_unwind(AssertUnwindSafe(|| point_row(spec, value, scheme)))
        .unwrap_or(None)
        .unwrap_or_else(|| ResultRow::infeasible(var, value, scheme.label()))
}

fn point_row(spec: &ResolvedSweep, value: f64, scheme: Scheme) -> Option<ResultRow> {
    let var = spec.var.label();
    let n = if spec.var == SweepVar::N { value.round() as u32 } else { spec.n };
    let snr_db = if spec.var == SweepVar::SnrDb { value } else { spec.snr_db };
    let t0 = if spec.var == SweepVar::T0 { value } else { spec.t0 };
    let p_total = db_to_linear(snr_db);
    let params = SystemParams::new(Blocklength::new(n).ok()?, p_total, t0).ok()?;
    let tol = Tolerances::for_power_budget(p_total);

    match spec.scenario {
        Scenario::Fading(fading) => {
            let stats = monte_carlo_average(&fading, &params, scheme, &tol);
            Some(ResultRow {
                sweep_var: var,
                value,
                scheme: scheme.label(),
                objective: stats.mean,
                t2_bar: None,
                p1: None,
                p2: None,
                r1: None,
                r2: None,
                n1: None,
                n2: None,
                feasible: None,
                stderr: Some(stats.std_err),
            })
        }
        Scenario::Fixed(fixed) => {
            let gains = fixed.gains().ok()?;
            match scheme {
                Scheme::Noma => {
                    let report = match spec.var {
                        SweepVar::P2 => optimize_noma_fixed_p2(&gains, &params, value, &tol),
                        SweepVar::R2 => optimize_noma_fixed_r2(&gains, &params, value, &tol),
                        SweepVar::R1 => optimize_noma_fixed_r1(&gains, &params, value, &tol),
                        _ => optimize_noma_with_scan(&gains, &params, &tol, spec.scan_points),
                    };
                    Some(noma_row(var, value, &report))
                }
                Scheme::Oma => {
                    let sol = match spec.var {
                        SweepVar::R1 => optimize_oma_fixed_r1(&gains, &params, value, &tol),
                        _ => optimize_oma(&gains, &params, &tol),
                    };
                    Some(oma_row(var, value, scheme.label(), &sol))
                }
                Scheme::OmaFixedSlots => {
                    let sol = match spec.var {
                        SweepVar::R1 => {
                            optimize_oma_fixed_slots_fixed_r1(&gains, &params, value, &tol)
                        }
                        _ => optimize_oma_fixed_slots(&gains, &params, &tol),
                    };
                    Some(oma_row(var, value, scheme.label(), &sol))
                }
            }
        }
    }
}

pub fn noma_row(var: &'static str, value: f64, report: &SolveReport) -> ResultRow {
    if !report.feasible {
        return ResultRow::infeasible(var, value, "noma");
    }
    ResultRow {
        sweep_var: var,
        value,
        scheme: "noma",
        objective: report.objective,
        t2_bar: report.evaluation.as_ref().map(|e| e.t2_bar),
        p1: Some(report.decision.p1),
        p2: Some(report.decision.p2),
        r1: Some(report.decision.r1.get()),
        r2: Some(report.decision.r2.get()),
        n1: None,
        n2: None,
        feasible: Some(true),
        stderr: None,
    }
}

pub fn oma_row(var: &'static str, value: f64, scheme: &'static str, sol: &OmaSolution) -> ResultRow {
    if !sol.feasible {
        return ResultRow::infeasible(var, value, scheme);
    }
    ResultRow {
        sweep_var: var,
        value,
        scheme,
        objective: sol.t1_bar,
        t2_bar: Some(sol.t2_bar),
        p1: Some(sol.decision.p1),
        p2: Some(sol.decision.p2),
        r1: Some(sol.decision.r1.get()),
        r2: Some(sol.decision.r2.get()),
        n1: Some(sol.decision.n1.get()),
        n2: Some(sol.decision.n2.get()),
        feasible: Some(true),
        stderr: None,
    }
}

/// Re-evaluate a fixed-gain NOMA row's decision from scratch. Sweep rows
/// are closed under this: the objective column must come back.
pub fn recompute_noma_row(fixed: &ScenarioFixed, params: &SystemParams, row: &ResultRow) -> Option<f64> {
    let gains: ChannelGains = fixed.gains().ok()?;
    let decision = fbnoma_core::model::NomaDecision::new(
        row.p1?,
        row.p2?,
        fbnoma_core::fbl::Rate::new(row.r1?).ok()?,
        fbnoma_core::fbl::Rate::new(row.r2?).ok()?,
    )
    .ok()?;
    Some(fbnoma_core::model::evaluate_noma(&gains, &decision, params).ok()?.t1_bar)
}

// ---------------------------------------------------------------------------
// CSV of record
// ---------------------------------------------------------------------------

pub const CSV_HEADER: &str = "sweep_var,value,scheme,objective,t2_bar,p1,p2,r1,r2,n1,n2,feasible,stderr";

fn push_opt_f64(line: &mut String, v: Option<f64>) {
    line.push(',');
    if let Some(v) = v {
        line.push_str(&format!("{v}"));
    }
}

pub fn csv_line(row: &ResultRow) -> String {
    let mut line = format!("{},{},{},{}", row.sweep_var, row.value, row.scheme, row.objective);
    push_opt_f64(&mut line, row.t2_bar);
    push_opt_f64(&mut line, row.p1);
    push_opt_f64(&mut line, row.p2);
    push_opt_f64(&mut line, row.r1);
    push_opt_f64(&mut line, row.r2);
    line.push(',');
    if let Some(n1) = row.n1 {
        line.push_str(&n1.to_string());
    }
    line.push(',');
    if let Some(n2) = row.n2 {
        line.push_str(&n2.to_string());
    }
    line.push(',');
    if let Some(f) = row.feasible {
        line.push_str(if f { "true" } else { "false" });
    }
    push_opt_f64(&mut line, row.stderr);
    line
}

/// Write the rows as UTF-8, `.`-decimal, LF-terminated CSV.
pub fn write_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut out = Vec::with_capacity(rows.len() * 96 + 128);
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", csv_line(row))?;
    }
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .with_context(|| format!("creating output directory {}", dir.display()))?;
        }
    }
    std::fs::write(path, out).with_context(|| format!("writing CSV to {}", path.display()))?;
    Ok(())
}
