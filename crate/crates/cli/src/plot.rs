//! Line-plot rendering of sweep rows to SVG. The CSV is the artifact of
//! record; callers treat failures here as warnings, never as run failures.

use crate::sweep::ResultRow;
use anyhow::{bail, Result};
use plotters::prelude::*;
use std::path::Path;

const COLORS: [RGBColor; 3] = [RGBColor(198, 45, 38), RGBColor(31, 90, 166), RGBColor(46, 125, 50)];

/// Draw one line (or lone markers for single-point sweeps) per scheme.
pub fn render_svg(path: &Path, title: &str, x_label: &str, rows: &[ResultRow]) -> Result<()> {
    if rows.is_empty() {
        bail!("nothing to plot");
    }
    let mut schemes: Vec<&'static str> = Vec::new();
    for row in rows {
        if !schemes.contains(&row.scheme) {
            schemes.push(row.scheme);
        }
    }
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (0.0_f64, f64::NEG_INFINITY);
    for row in rows {
        x_min = x_min.min(row.value);
        x_max = x_max.max(row.value);
        y_min = y_min.min(row.objective);
        y_max = y_max.max(row.objective);
    }
    if !x_min.is_finite() || !y_max.is_finite() {
        bail!("rows contain no finite values");
    }
    if x_max == x_min {
        x_max += 1.0;
        x_min -= 1.0;
    }
    let pad = 0.05 * (y_max - y_min).max(1e-9);
    let y_range = (y_min - pad)..(y_max + pad);

    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let root = SVGBackend::new(path, (860, 620)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 22))
        .margin(18)
        .x_label_area_size(42)
        .y_label_area_size(56)
        .build_cartesian_2d(x_min..x_max, y_range)?;
    chart
        .configure_mesh()
        .x_desc(x_label)
        .y_desc("effective throughput T1 (bps/Hz)")
        .draw()?;

    for (idx, scheme) in schemes.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        let series: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.scheme == *scheme)
            .map(|r| (r.value, r.objective))
            .collect();
        if series.len() == 1 {
            chart
                .draw_series(series.iter().map(|&(x, y)| Circle::new((x, y), 4, color.filled())))?
                .label(*scheme)
                .legend(move |(x, y)| Circle::new((x + 8, y), 4, color.filled()));
        } else {
            chart
                .draw_series(LineSeries::new(series, color.stroke_width(2)))?
                .label(*scheme)
                .legend(move |(x, y)| {
                    PathElement::new(vec![(x, y), (x + 16, y)], color.stroke_width(2))
                });
        }
    }
    chart
        .configure_series_labels()
        .border_style(BLACK)
        .background_style(WHITE.mix(0.85))
        .draw()?;
    root.present()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(scheme: &'static str, value: f64, objective: f64) -> ResultRow {
        ResultRow {
            sweep_var: "t0",
            value,
            scheme,
            objective,
            t2_bar: None,
            p1: None,
            p2: None,
            r1: None,
            r2: None,
            n1: None,
            n2: None,
            feasible: Some(true),
            stderr: None,
        }
    }

    #[test]
    fn renders_two_scheme_plot() {
        let rows = vec![
            row("noma", 1.0, 5.0),
            row("oma", 1.0, 4.0),
            row("noma", 2.0, 4.2),
            row("oma", 2.0, 3.1),
        ];
        let path = std::env::temp_dir().join("fbnoma-plot-test.svg");
        render_svg(&path, "test", "t0 (bps/Hz)", &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("<svg"));
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn single_point_plots_markers() {
        let rows = vec![row("noma", 1.0, 5.0)];
        let path = std::env::temp_dir().join("fbnoma-plot-single.svg");
        render_svg(&path, "single", "t0", &rows).unwrap();
        assert!(path.exists());
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn empty_rows_error_without_writing() {
        let path = std::env::temp_dir().join("fbnoma-plot-empty.svg");
        assert!(render_svg(&path, "empty", "x", &[]).is_err());
        assert!(!path.exists());
    }
}
