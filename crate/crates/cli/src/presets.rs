//! Built-in experiment presets, one per results figure.
//!
//! Captions fix most parameters; where a caption says "different values
//! of" something without enumerating them, the preset carries a documented
//! default list and expands into one labeled run per list entry.

use crate::sweep::{ResolvedSweep, Scenario, SweepVar};
use fbnoma_core::channel::{Scheme, ScenarioFading, ScenarioFixed};
use fbnoma_core::noma::DEFAULT_SCAN_POINTS;

/// One preset: a family of sweeps sharing a figure.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    /// `(label, sweep)` pairs; single-run presets use an empty label.
    pub runs: Vec<(String, ResolvedSweep)>,
}

fn fixed(h1: f64, h2: f64) -> Scenario {
    Scenario::Fixed(ScenarioFixed::new(h1, h2))
}

#[allow(clippy::too_many_arguments)]
fn sweep(
    name: String,
    scenario: Scenario,
    snr_db: f64,
    n: u32,
    t0: f64,
    var: SweepVar,
    (start, stop, points): (f64, f64, usize),
    schemes: Vec<Scheme>,
) -> ResolvedSweep {
    ResolvedSweep {
        name,
        scenario,
        snr_db,
        n,
        t0,
        var,
        start,
        stop,
        points,
        schemes,
        scan_points: DEFAULT_SCAN_POINTS,
    }
}

/// Default Monte Carlo realization count for the fading preset.
pub const FIG9_REALIZATIONS: u32 = 2000;

/// The fading scenario behind fig9: users at 20 m and 60 m, path-loss
/// exponent 2, per-user noise normalized to the mean path-loss power
/// `dᵢ^(−2α)` so the sweep axis is the average received SNR (with unit
/// noise the raw gains sit at 1e-6–1e-8 and no target is ever feasible
/// on the plotted axis range).
pub fn fig9_scenario(seed: u64, realizations: u32) -> ScenarioFading {
    let (d1, d2, alpha) = (20.0_f64, 60.0_f64, 2.0_f64);
    ScenarioFading::new(d1, d2, alpha, seed, realizations)
        .expect("static distances are valid")
        .with_noise(d1.powf(-2.0 * alpha), d2.powf(-2.0 * alpha))
        .expect("positive noise powers")
}

pub fn all() -> Vec<Preset> {
    let mut presets = Vec::new();

    // fig2: T̄₁ vs P₂, h1=0.8, h2=0.2, snr_db=40, n=100; t0 in {1, 1.5, 2}.
    presets.push(Preset {
        name: "fig2",
        summary: "noma T1 vs p2 sweep; h1=0.8 h2=0.2 snr_db=40 n=100 t0 in {1, 1.5, 2}",
        runs: [1.0, 1.5, 2.0]
            .iter()
            .map(|&t0| {
                (
                    format!("t0-{t0}"),
                    sweep(
                        format!("fig2-t0-{t0}"),
                        fixed(0.8, 0.2),
                        40.0,
                        100,
                        t0,
                        SweepVar::P2,
                        (0.0, 1e4, 201),
                        vec![Scheme::Noma],
                    ),
                )
            })
            .collect(),
    });

    // fig3: T̄₁ vs R₂, t0=2, n=200, h1=0.8, h2=0.1; snr_db in {30, 35, 40}.
    presets.push(Preset {
        name: "fig3",
        summary: "noma T1 vs r2 sweep; h1=0.8 h2=0.1 n=200 t0=2 snr_db in {30, 35, 40}",
        runs: [30.0, 35.0, 40.0]
            .iter()
            .map(|&snr| {
                (
                    format!("snr-{snr}"),
                    sweep(
                        format!("fig3-snr-{snr}"),
                        fixed(0.8, 0.1),
                        snr,
                        200,
                        2.0,
                        SweepVar::R2,
                        (0.1, 3.2, 63),
                        vec![Scheme::Noma],
                    ),
                )
            })
            .collect(),
    });

    // fig4: T̄₁ vs R₁ for all three schemes; t0=3, snr_db=40, n=200.
    presets.push(Preset {
        name: "fig4",
        summary: "T1 vs r1 for noma, oma, oma-fixed; h1=0.8 h2=0.1 snr_db=40 n=200 t0=3",
        runs: vec![(
            String::new(),
            sweep(
                "fig4".into(),
                fixed(0.8, 0.1),
                40.0,
                200,
                3.0,
                SweepVar::R1,
                (2.0, 13.0, 56),
                vec![Scheme::Noma, Scheme::Oma, Scheme::OmaFixedSlots],
            ),
        )],
    });

    // fig5: T̄₁* vs T₀; snr_db=40, h1=0.8, n=200; h2 in {0.1, 0.2}.
    presets.push(Preset {
        name: "fig5",
        summary: "noma and oma T1* vs t0; h1=0.8 snr_db=40 n=200 h2 in {0.1, 0.2}",
        runs: [0.1, 0.2]
            .iter()
            .map(|&h2| {
                (
                    format!("h2-{h2}"),
                    sweep(
                        format!("fig5-h2-{h2}"),
                        fixed(0.8, h2),
                        40.0,
                        200,
                        0.0,
                        SweepVar::T0,
                        (0.5, 6.0, 23),
                        vec![Scheme::Noma, Scheme::Oma],
                    ),
                )
            })
            .collect(),
    });

    // fig6: N₁* vs N in OMA; h1=0.8, h2=0.1; (snr_db, t0) pairs.
    presets.push(Preset {
        name: "fig6",
        summary: "oma optimal N1 vs n; h1=0.8 h2=0.1; (snr_db, t0) in {(40, 1), (40, 2), (30, 2)}",
        runs: [(40.0, 1.0), (40.0, 2.0), (30.0, 2.0)]
            .iter()
            .map(|&(snr, t0)| {
                (
                    format!("snr-{snr}-t0-{t0}"),
                    sweep(
                        format!("fig6-snr-{snr}-t0-{t0}"),
                        fixed(0.8, 0.1),
                        snr,
                        200,
                        t0,
                        SweepVar::N,
                        (100.0, 500.0, 9),
                        vec![Scheme::Oma],
                    ),
                )
            })
            .collect(),
    });

    // fig7: T̄₁* vs N; snr_db=40, h1=0.8, h2=0.1, t0=2.
    presets.push(Preset {
        name: "fig7",
        summary: "noma and oma T1* vs n; h1=0.8 h2=0.1 snr_db=40 t0=2",
        runs: vec![(
            String::new(),
            sweep(
                "fig7".into(),
                fixed(0.8, 0.1),
                40.0,
                200,
                2.0,
                SweepVar::N,
                (50.0, 2000.0, 14),
                vec![Scheme::Noma, Scheme::Oma],
            ),
        )],
    });

    // fig8: T̄₁* vs N at smaller gain disparity; snr_db=30, h2=0.4, t0=2.
    presets.push(Preset {
        name: "fig8",
        summary: "noma and oma T1* vs n; h1=0.8 h2=0.4 snr_db=30 t0=2",
        runs: vec![(
            String::new(),
            sweep(
                "fig8".into(),
                fixed(0.8, 0.4),
                30.0,
                200,
                2.0,
                SweepVar::N,
                (50.0, 800.0, 16),
                vec![Scheme::Noma, Scheme::Oma],
            ),
        )],
    });

    // fig9: Monte Carlo T̄₁* vs average SNR; d1=20, d2=60, alpha=2, t0=2, n=200.
    presets.push(Preset {
        name: "fig9",
        summary: "fading Monte Carlo T1* vs snr_db for noma, oma, oma-fixed; d1=20 d2=60 alpha=2 t0=2 n=200 seed=7 realizations=2000 (noise normalized to mean path loss)",
        runs: vec![(
            String::new(),
            sweep(
                "fig9".into(),
                Scenario::Fading(fig9_scenario(7, FIG9_REALIZATIONS)),
                40.0,
                200,
                2.0,
                SweepVar::SnrDb,
                (10.0, 40.0, 7),
                vec![Scheme::Noma, Scheme::Oma, Scheme::OmaFixedSlots],
            ),
        )],
    });

    presets
}

pub fn find(name: &str) -> Option<Preset> {
    all().into_iter().find(|p| p.name == name)
}

/// Text for the `presets` subcommand: every preset with its full
/// parameterization.
pub fn describe() -> String {
    let mut out = String::new();
    for preset in all() {
        out.push_str(&format!("{}  {}\n", preset.name, preset.summary));
        for (label, run) in &preset.runs {
            let schemes: Vec<&str> = run.schemes.iter().map(|s| s.label()).collect();
            let scenario = match &run.scenario {
                Scenario::Fixed(f) => format!(
                    "h1={} h2={} noise=({}, {})",
                    f.h1_tilde_mag, f.h2_tilde_mag, f.sigma1_sq, f.sigma2_sq
                ),
                Scenario::Fading(f) => format!(
                    "d1={} d2={} alpha={} seed={} realizations={} noise=({:.3e}, {:.3e})",
                    f.d1, f.d2, f.alpha, f.seed, f.realizations, f.sigma1_sq, f.sigma2_sq
                ),
            };
            let label = if label.is_empty() { String::new() } else { format!(" [{label}]") };
            out.push_str(&format!(
                "  {}{}: sweep {} in [{}, {}] x{} | snr_db={} n={} t0={} | schemes {} | {}\n",
                run.name,
                label,
                run.var.label(),
                run.start,
                run.stop,
                run.points,
                run.snr_db,
                run.n,
                run.t0,
                schemes.join(","),
                scenario
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_presets_fig2_through_fig9() {
        let names: Vec<&str> = all().iter().map(|p| p.name).collect();
        assert_eq!(names, vec!["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"]);
    }

    #[test]
    fn every_run_validates() {
        for preset in all() {
            for (_, run) in &preset.runs {
                run.validate().unwrap_or_else(|e| panic!("{}: {e}", run.name));
            }
        }
    }

    #[test]
    fn describe_quotes_the_caption_parameters() {
        let text = describe();
        assert!(text.contains("fig8"));
        assert!(text.contains("h2=0.4 snr_db=30 t0=2"));
        assert!(text.contains("fig6"));
        assert!(text.contains("h1=0.8 h2=0.1"));
    }

    #[test]
    fn fig9_gains_are_unit_mean() {
        let sc = fig9_scenario(7, 10);
        // d^(−2α)/σ² = 1 by construction.
        let mean1 = sc.d1.powf(-2.0 * sc.alpha) / sc.sigma1_sq;
        let mean2 = sc.d2.powf(-2.0 * sc.alpha) / sc.sigma2_sq;
        assert!((mean1 - 1.0).abs() < 1e-12);
        assert!((mean2 - 1.0).abs() < 1e-12);
    }
}
