//! Aggregate-curve rendering.
//!
//! Draws the aggregate series of one experiment as an SVG chart: per
//! policy the mean average regret over rounds inside a shaded band of one
//! standard deviation, and for the optimistic policies additionally the
//! optimization and bandit components of the same curve.

use std::path::Path;

use plotters::prelude::*;

use crate::error::{Error, Result};
use crate::policy::PolicyKind;
use crate::trace::{read_aggregate_csv, AggregatePoint, AggregateSeries};

const WIDTH: u32 = 960;
const HEIGHT: u32 = 640;
const BAND_ALPHA: f64 = 0.15;

const PALETTE: [RGBColor; 10] = [
    RGBColor(31, 119, 180),
    RGBColor(255, 127, 14),
    RGBColor(44, 160, 44),
    RGBColor(214, 39, 40),
    RGBColor(148, 103, 189),
    RGBColor(140, 86, 75),
    RGBColor(227, 119, 194),
    RGBColor(127, 127, 127),
    RGBColor(188, 189, 34),
    RGBColor(23, 190, 207),
];

/// Reads an aggregate CSV and renders it to `output` as an SVG image.
pub fn plot_file(input: &Path, output: &Path) -> Result<()> {
    let series = read_aggregate_csv(input)?;
    render(&series, output)
}

/// Renders an in-memory aggregate series to `output` as an SVG image.
pub fn render(series: &AggregateSeries, output: &Path) -> Result<()> {
    match output.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("svg") => {}
        _ => {
            return Err(Error::InvalidConfig(format!(
                "output path {} needs an .svg extension",
                output.display()
            )))
        }
    }
    let curves = build_curves(series);
    if curves.iter().all(|c| c.points.is_empty()) {
        return Err(Error::InvalidConfig("no finite data points".into()));
    }
    if let Some(parent) = output.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let (x_range, y_range) = bounds(&curves);

    let root = SVGBackend::new(output, (WIDTH, HEIGHT)).into_drawing_area();
    root.fill(&WHITE).map_err(draw_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption("Average regret per round", ("sans-serif", 24))
        .margin(12)
        .x_label_area_size(44)
        .y_label_area_size(64)
        .build_cartesian_2d(x_range, y_range)
        .map_err(draw_err)?;
    chart
        .configure_mesh()
        .x_desc("round")
        .y_desc("average regret")
        .label_style(("sans-serif", 15))
        .draw()
        .map_err(draw_err)?;

    for curve in &curves {
        if curve.band.len() >= 2 {
            let mut ring: Vec<(f64, f64)> =
                curve.band.iter().map(|&(t, _, hi)| (t, hi)).collect();
            ring.extend(curve.band.iter().rev().map(|&(t, lo, _)| (t, lo)));
            chart
                .draw_series(std::iter::once(Polygon::new(
                    ring,
                    curve.color.mix(BAND_ALPHA),
                )))
                .map_err(draw_err)?;
        }
        let color = curve.color;
        chart
            .draw_series(LineSeries::new(
                curve.points.iter().copied(),
                color.stroke_width(2),
            ))
            .map_err(draw_err)?
            .label(curve.label.clone())
            .legend(move |(x, y)| {
                PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2))
            });
    }

    chart
        .configure_series_labels()
        .position(SeriesLabelPosition::UpperRight)
        .background_style(WHITE.mix(0.85))
        .border_style(BLACK)
        .label_font(("sans-serif", 15))
        .draw()
        .map_err(draw_err)?;
    root.present().map_err(draw_err)?;
    Ok(())
}

fn draw_err<E: std::fmt::Display>(err: E) -> Error {
    Error::Plot(err.to_string())
}

struct Curve {
    label: String,
    color: RGBColor,
    /// (t, mean) pairs with finite mean.
    points: Vec<(f64, f64)>,
    /// (t, mean - std, mean + std) triples with finite bounds.
    band: Vec<(f64, f64, f64)>,
}

fn build_curves(series: &AggregateSeries) -> Vec<Curve> {
    let mut out = Vec::new();
    for kind in series.policies() {
        let pts = series.policy(kind);
        let split = matches!(
            kind,
            PolicyKind::Proof
                | PolicyKind::ProofExploreFinite
                | PolicyKind::ProofExploreContinuous
        );
        let total_label = if split {
            format!("{} (total)", kind)
        } else {
            kind.to_string()
        };
        out.push(make_curve(&pts, total_label, next_color(out.len()), |p| {
            (p.avg_regret_mean, p.avg_regret_std)
        }));
        if split {
            out.push(make_curve(
                &pts,
                format!("{kind} (optimization)"),
                next_color(out.len()),
                |p| (p.opt_regret_mean, p.opt_regret_std),
            ));
            out.push(make_curve(
                &pts,
                format!("{kind} (bandit)"),
                next_color(out.len()),
                |p| (p.bandit_regret_mean, p.bandit_regret_std),
            ));
        }
    }
    out
}

fn next_color(index: usize) -> RGBColor {
    PALETTE[index % PALETTE.len()]
}

fn make_curve(
    pts: &[&AggregatePoint],
    label: String,
    color: RGBColor,
    pick: impl Fn(&AggregatePoint) -> (f64, f64),
) -> Curve {
    let mut points = Vec::with_capacity(pts.len());
    let mut band = Vec::with_capacity(pts.len());
    for p in pts {
        let (mean, std) = pick(p);
        if !mean.is_finite() {
            continue;
        }
        let t = p.t as f64;
        points.push((t, mean));
        if std.is_finite() {
            band.push((t, mean - std, mean + std));
        }
    }
    Curve {
        label,
        color,
        points,
        band,
    }
}

fn bounds(curves: &[Curve]) -> (std::ops::Range<f64>, std::ops::Range<f64>) {
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for curve in curves {
        for &(t, mean) in &curve.points {
            x_min = x_min.min(t);
            x_max = x_max.max(t);
            y_min = y_min.min(mean);
            y_max = y_max.max(mean);
        }
        for &(t, lo, hi) in &curve.band {
            x_min = x_min.min(t);
            x_max = x_max.max(t);
            y_min = y_min.min(lo);
            y_max = y_max.max(hi);
        }
    }
    if x_max <= x_min {
        x_max = x_min + 1.0;
    }
    let span = (y_max - y_min).max(y_max.abs() * 1e-3).max(1e-9);
    (x_min..x_max, (y_min - 0.05 * span)..(y_max + 0.05 * span))
}
