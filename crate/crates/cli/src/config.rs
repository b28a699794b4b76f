//! Run configuration: a TOML file with nested sections, overridden by
//! command-line flags (flags win). Every run is fully explicit — there is
//! no wall-clock seeding and no hidden default channel.

use crate::sweep::{parse_scheme, ResolvedSweep, Scenario, SweepVar};
use anyhow::{anyhow, bail, Context, Result};
use fbnoma_core::channel::{db_to_linear, Scheme, ScenarioFading, ScenarioFixed};
use fbnoma_core::noma::DEFAULT_SCAN_POINTS;
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub solver: SolverSection,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub h1: Option<f64>,
    pub h2: Option<f64>,
    pub noise1: Option<f64>,
    pub noise2: Option<f64>,
    pub fading: Option<bool>,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub realizations: Option<u32>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub snr_db: Option<f64>,
    pub power: Option<f64>,
    pub n: Option<u32>,
    pub t0: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub var: Option<String>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
    pub schemes: Option<Vec<String>>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub csv: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub scan_points: Option<usize>,
}

pub fn load(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

/// Flag-level overrides; `None` keeps the file value.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub h1: Option<f64>,
    pub h2: Option<f64>,
    pub noise1: Option<f64>,
    pub noise2: Option<f64>,
    pub fading: bool,
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub realizations: Option<u32>,
    pub snr_db: Option<f64>,
    pub power: Option<f64>,
    pub n: Option<u32>,
    pub t0: Option<f64>,
    pub scan_points: Option<usize>,
}

/// Everything a solve needs; sweeps add the range on top.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub scenario: Scenario,
    pub snr_db: f64,
    pub n: u32,
    pub t0: f64,
    pub scan_points: usize,
}

fn require<T>(value: Option<T>, field: &str) -> Result<T> {
    value.ok_or_else(|| anyhow!("missing required field `{field}` (set it in the config file or as a flag)"))
}

pub fn resolve(file: &FileConfig, flags: &Overrides) -> Result<Resolved> {
    let sc = &file.scenario;
    let fading = flags.fading || sc.fading.unwrap_or(false);
    let scenario = if fading {
        let d1 = require(flags.d1.or(sc.d1), "scenario.d1")?;
        let d2 = require(flags.d2.or(sc.d2), "scenario.d2")?;
        let alpha = flags.alpha.or(sc.alpha).unwrap_or(2.0);
        let seed = require(flags.seed.or(sc.seed), "scenario.seed")?;
        let realizations = flags.realizations.or(sc.realizations).unwrap_or(1000);
        let mut fading = ScenarioFading::new(d1, d2, alpha, seed, realizations)
            .map_err(|e| anyhow!("scenario: {e}"))?;
        if let (Some(n1), Some(n2)) = (
            flags.noise1.or(sc.noise1).or(Some(1.0)),
            flags.noise2.or(sc.noise2).or(Some(1.0)),
        ) {
            fading = fading.with_noise(n1, n2).map_err(|e| anyhow!("scenario: {e}"))?;
        }
        Scenario::Fading(fading)
    } else {
        let h1 = require(flags.h1.or(sc.h1), "scenario.h1")?;
        let h2 = require(flags.h2.or(sc.h2), "scenario.h2")?;
        let mut fixed = ScenarioFixed::new(h1, h2);
        fixed.sigma1_sq = flags.noise1.or(sc.noise1).unwrap_or(1.0);
        fixed.sigma2_sq = flags.noise2.or(sc.noise2).unwrap_or(1.0);
        fixed.gains().map_err(|e| anyhow!("scenario: {e}"))?;
        Scenario::Fixed(fixed)
    };

    let sys = &file.system;
    let snr_db = match (flags.power.or(sys.power), flags.snr_db.or(sys.snr_db)) {
        (Some(p), _) if p > 0.0 => 10.0 * p.log10(),
        (Some(p), _) => bail!("system.power must be positive, got {p}"),
        (None, Some(db)) => db,
        (None, None) => bail!("missing required field `system.snr_db` (or `system.power`)"),
    };
    let n = require(flags.n.or(sys.n), "system.n")?;
    let t0 = require(flags.t0.or(sys.t0), "system.t0")?;
    if t0 < 0.0 || !t0.is_finite() {
        bail!("system.t0 must be nonnegative, got {t0}");
    }
    if db_to_linear(snr_db) <= 0.0 {
        bail!("system.snr_db resolves to a nonpositive power");
    }

    Ok(Resolved {
        scenario,
        snr_db,
        n,
        t0,
        scan_points: flags
            .scan_points
            .or(file.solver.scan_points)
            .unwrap_or(DEFAULT_SCAN_POINTS),
    })
}

/// Assemble a sweep from the resolved base plus the `[sweep]` section and
/// sweep-specific flags.
#[allow(clippy::too_many_arguments)]
pub fn resolve_sweep(
    name: String,
    base: &Resolved,
    file: &FileConfig,
    var: Option<&str>,
    start: Option<f64>,
    stop: Option<f64>,
    points: Option<usize>,
    schemes: &[String],
) -> Result<ResolvedSweep> {
    let section = &file.sweep;
    let var_name = var
        .map(str::to_owned)
        .or_else(|| section.var.clone())
        .ok_or_else(|| anyhow!("missing required field `sweep.var`"))?;
    let scheme_names: Vec<String> = if schemes.is_empty() {
        section.schemes.clone().unwrap_or_default()
    } else {
        schemes.to_vec()
    };
    if scheme_names.is_empty() {
        bail!("missing required field `sweep.schemes`");
    }
    let schemes: Vec<Scheme> = scheme_names
        .iter()
        .map(|s| parse_scheme(s))
        .collect::<Result<_>>()?;
    let spec = ResolvedSweep {
        name,
        scenario: base.scenario,
        snr_db: base.snr_db,
        n: base.n,
        t0: base.t0,
        var: SweepVar::parse(&var_name)?,
        start: require(start.or(section.start), "sweep.start")?,
        stop: require(stop.or(section.stop), "sweep.stop")?,
        points: require(points.or(section.points), "sweep.points")?,
        schemes,
        scan_points: base.scan_points,
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_then_flag_overrides() {
        let file: FileConfig = toml::from_str(
            r#"
            [scenario]
            h1 = 0.8
            h2 = 0.2
            [system]
            snr_db = 40.0
            n = 100
            t0 = 1.0
            "#,
        )
        .unwrap();
        let base = resolve(&file, &Overrides::default()).unwrap();
        assert_eq!(base.n, 100);
        assert_eq!(base.snr_db, 40.0);

        let flags = Overrides {
            n: Some(250),
            t0: Some(2.0),
            ..Overrides::default()
        };
        let over = resolve(&file, &flags).unwrap();
        assert_eq!(over.n, 250);
        assert_eq!(over.t0, 2.0);
    }

    #[test]
    fn missing_field_is_named() {
        let file: FileConfig = toml::from_str("[system]\nsnr_db = 40.0\n").unwrap();
        let err = resolve(&file, &Overrides::default()).unwrap_err().to_string();
        assert!(err.contains("scenario.h1"), "{err}");
    }

    #[test]
    fn gain_ordering_is_validated() {
        let file: FileConfig = toml::from_str(
            "[scenario]\nh1 = 0.8\nh2 = 0.9\n[system]\nsnr_db = 40.0\nn = 100\nt0 = 1.0\n",
        )
        .unwrap();
        assert!(resolve(&file, &Overrides::default()).is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<FileConfig>("[scenario]\nh3 = 1.0\n").is_err());
    }

    #[test]
    fn power_flag_translates_to_snr() {
        let file: FileConfig = toml::from_str(
            "[scenario]\nh1 = 0.8\nh2 = 0.2\n[system]\nn = 100\nt0 = 1.0\n",
        )
        .unwrap();
        let flags = Overrides {
            power: Some(1e4),
            ..Overrides::default()
        };
        let base = resolve(&file, &flags).unwrap();
        assert!((base.snr_db - 40.0).abs() < 1e-12);
    }

    #[test]
    fn fading_requires_explicit_seed() {
        let file: FileConfig = toml::from_str(
            "[scenario]\nfading = true\nd1 = 20.0\nd2 = 60.0\n[system]\nsnr_db = 30.0\nn = 200\nt0 = 2.0\n",
        )
        .unwrap();
        let err = resolve(&file, &Overrides::default()).unwrap_err().to_string();
        assert!(err.contains("scenario.seed"), "{err}");
    }
}
