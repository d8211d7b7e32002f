//! Self-contained SVG renderer for curve plots on logarithmic axes.
//!
//! No plotting library and no external binaries: the output is a plain
//! SVG string with `<line>` grid, one `<polyline>` per series, optional
//! `<circle>` markers, and optional `<polygon>` standard-error bands.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use scaling_lab::CurveSeries;

use crate::CliError;

/// Line colors, assigned by the caller.
pub const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Axis scales. The sample axis is always logarithmic; learning curves
/// are unreadable on a linear n axis.
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Axes {
    /// log n over log value.
    LogLog,
    /// log n over linear value.
    LogLinear,
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum LineStyle {
    Solid,
    Dashed,
    DashDot,
}

impl LineStyle {
    fn dash(self) -> &'static str {
        match self {
            LineStyle::Solid => "none",
            LineStyle::Dashed => "7 5",
            LineStyle::DashDot => "9 4 2 4",
        }
    }
}

/// One curve on the plot.
pub struct PlotSeries<'a> {
    pub series: &'a CurveSeries,
    pub label: String,
    pub color: &'static str,
    pub style: LineStyle,
    /// Draw a circle on every point.
    pub markers: bool,
    /// Shade value +- se wherever points carry a standard error.
    pub band: bool,
}

/// A complete plot: what to draw and where to write it.
pub struct PlotSpec<'a> {
    pub title: String,
    pub y_label: String,
    pub axes: Axes,
    pub series_list: Vec<PlotSeries<'a>>,
    pub output_path: PathBuf,
}

const WIDTH: f64 = 880.0;
const HEIGHT: f64 = 600.0;
const MARGIN_LEFT: f64 = 74.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 46.0;
const MARGIN_BOTTOM: f64 = 58.0;

/// Render and write the plot file.
pub fn render_plot(spec: &PlotSpec) -> Result<(), CliError> {
    let svg = render_svg(spec)?;
    fs::write(&spec.output_path, svg).map_err(|e| {
        CliError::Run(format!("cannot write {}: {e}", spec.output_path.display()))
    })
}

/// A point that survived the axis filters, in data coordinates.
struct Kept {
    x: f64,
    y: f64,
    se: Option<f64>,
}

/// Points drawable under the given axes: n >= 1 always (log n axis),
/// and positive finite values when the value axis is logarithmic.
fn keep(series: &CurveSeries, axes: Axes) -> Vec<Kept> {
    series
        .points
        .iter()
        .filter(|p| p.n >= 1 && p.value.is_finite())
        .filter(|p| axes == Axes::LogLinear || p.value > 0.0)
        .map(|p| Kept {
            x: p.n as f64,
            y: p.value,
            se: p.se,
        })
        .collect()
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Decade tick label: plain decimal near 1, scientific far from it.
fn tick_label(exp: i32) -> String {
    if (-4..=4).contains(&exp) {
        format!("{}", 10f64.powi(exp))
    } else {
        format!("1e{exp}")
    }
}

/// Tick positions for a linear value axis: a 1/2/5 step giving at most
/// eight ticks across the data range.
fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| span / s <= 8.0)
        .unwrap_or(mag * 10.0);
    let mut ticks = Vec::new();
    let mut t = (lo / step).ceil() * step;
    while t <= hi + step * 1e-9 {
        ticks.push(t);
        t += step;
    }
    ticks
}

fn render_svg(spec: &PlotSpec) -> Result<String, CliError> {
    if spec.series_list.is_empty() {
        return Err(CliError::Usage("a plot needs at least one series".into()));
    }
    let kept: Vec<Vec<Kept>> = spec
        .series_list
        .iter()
        .map(|s| keep(s.series, spec.axes))
        .collect();
    if kept.iter().all(|k| k.is_empty()) {
        return Err(CliError::Run(
            "no plottable points: every value fell off the axes".into(),
        ));
    }

    // Ranges in transformed coordinates: log10 on x, log10 or identity
    // on y. Bands may spill past the range; the clip path trims them.
    let ty = |y: f64| match spec.axes {
        Axes::LogLog => y.log10(),
        Axes::LogLinear => y,
    };
    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for k in kept.iter().flatten() {
        x_lo = x_lo.min(k.x.log10());
        x_hi = x_hi.max(k.x.log10());
        y_lo = y_lo.min(ty(k.y));
        y_hi = y_hi.max(ty(k.y));
    }
    if x_hi - x_lo < 1e-9 {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    if y_hi - y_lo < 1e-9 {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    let x_pad = (x_hi - x_lo) * 0.03;
    let y_pad = (y_hi - y_lo) * 0.05;
    let (x_lo, x_hi) = (x_lo - x_pad, x_hi + x_pad);
    let (y_lo, y_hi) = (y_lo - y_pad, y_hi + y_pad);

    let px = |x: f64| {
        MARGIN_LEFT + (x.log10() - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    };
    let py = |y: f64| {
        HEIGHT - MARGIN_BOTTOM
            - (ty(y) - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    };
    // Smallest drawable value on a log axis; band lower edges clamp
    // here instead of taking log of a nonpositive number.
    let y_floor = match spec.axes {
        Axes::LogLog => 10f64.powf(y_lo),
        Axes::LogLinear => f64::NEG_INFINITY,
    };

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"Helvetica, Arial, sans-serif\">\n"
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let _ = write!(
        svg,
        "<clipPath id=\"plotarea\"><rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" \
         width=\"{plot_w}\" height=\"{plot_h}\"/></clipPath>\n"
    );

    // Grid and tick labels.
    let mut grid = String::new();
    let x_tick_lo = x_lo.ceil() as i32;
    let x_tick_hi = x_hi.floor() as i32;
    for exp in x_tick_lo..=x_tick_hi {
        let x = px(10f64.powi(exp));
        let _ = write!(
            grid,
            "<line x1=\"{x:.2}\" y1=\"{MARGIN_TOP}\" x2=\"{x:.2}\" y2=\"{:.2}\" \
             stroke=\"#dddddd\"/>\n",
            HEIGHT - MARGIN_BOTTOM
        );
        let _ = write!(
            grid,
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"13\" \
             fill=\"#333333\">{}</text>\n",
            HEIGHT - MARGIN_BOTTOM + 20.0,
            tick_label(exp)
        );
    }
    match spec.axes {
        Axes::LogLog => {
            for exp in (y_lo.ceil() as i32)..=(y_hi.floor() as i32) {
                let y = py(10f64.powi(exp));
                let _ = write!(
                    grid,
                    "<line x1=\"{MARGIN_LEFT}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
                     stroke=\"#dddddd\"/>\n",
                    WIDTH - MARGIN_RIGHT
                );
                let _ = write!(
                    grid,
                    "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"13\" \
                     fill=\"#333333\">{}</text>\n",
                    MARGIN_LEFT - 8.0,
                    y + 4.5,
                    tick_label(exp)
                );
            }
        }
        Axes::LogLinear => {
            for t in linear_ticks(y_lo, y_hi) {
                let y = py(t);
                let _ = write!(
                    grid,
                    "<line x1=\"{MARGIN_LEFT}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
                     stroke=\"#dddddd\"/>\n",
                    WIDTH - MARGIN_RIGHT
                );
                let _ = write!(
                    grid,
                    "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"13\" \
                     fill=\"#333333\">{t}</text>\n",
                    MARGIN_LEFT - 8.0,
                    y + 4.5
                );
            }
        }
    }
    svg.push_str(&grid);
    let _ = write!(
        svg,
        "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"#555555\"/>\n"
    );

    // Series, bands under lines, everything clipped to the frame.
    svg.push_str("<g clip-path=\"url(#plotarea)\">\n");
    for (ps, pts) in spec.series_list.iter().zip(&kept) {
        if !ps.band {
            continue;
        }
        let banded: Vec<&Kept> = pts.iter().filter(|k| k.se.is_some()).collect();
        if banded.is_empty() {
            continue;
        }
        let mut poly = String::new();
        for k in &banded {
            let hi = k.y + k.se.unwrap();
            let _ = write!(poly, "{:.2},{:.2} ", px(k.x), py(hi.max(y_floor)));
        }
        for k in banded.iter().rev() {
            let lo = (k.y - k.se.unwrap()).max(y_floor);
            let _ = write!(poly, "{:.2},{:.2} ", px(k.x), py(lo));
        }
        let _ = write!(
            svg,
            "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.15\" stroke=\"none\"/>\n",
            poly.trim_end(),
            ps.color
        );
    }
    for (ps, pts) in spec.series_list.iter().zip(&kept) {
        let mut line = String::new();
        for k in pts {
            let _ = write!(line, "{:.2},{:.2} ", px(k.x), py(k.y));
        }
        let _ = write!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\" \
             stroke-dasharray=\"{}\"/>\n",
            line.trim_end(),
            ps.color,
            ps.style.dash()
        );
        if ps.markers {
            for k in pts {
                let _ = write!(
                    svg,
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.6\" fill=\"{}\"/>\n",
                    px(k.x),
                    py(k.y),
                    ps.color
                );
            }
        }
    }
    svg.push_str("</g>\n");

    // Legend, top right inside the frame.
    let longest = spec
        .series_list
        .iter()
        .map(|s| s.label.len())
        .max()
        .unwrap_or(0) as f64;
    let legend_w = longest * 6.6 + 48.0;
    let legend_h = spec.series_list.len() as f64 * 18.0 + 10.0;
    let lx = WIDTH - MARGIN_RIGHT - legend_w - 8.0;
    let ly = MARGIN_TOP + 8.0;
    let _ = write!(
        svg,
        "<rect x=\"{lx:.2}\" y=\"{ly:.2}\" width=\"{legend_w:.2}\" height=\"{legend_h:.2}\" \
         fill=\"#ffffff\" fill-opacity=\"0.85\" stroke=\"#999999\"/>\n"
    );
    for (i, ps) in spec.series_list.iter().enumerate() {
        let row_y = ly + 14.0 + i as f64 * 18.0;
        let _ = write!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{row_y:.2}\" x2=\"{:.2}\" y2=\"{row_y:.2}\" \
             stroke=\"{}\" stroke-width=\"2\" stroke-dasharray=\"{}\"/>\n",
            lx + 8.0,
            lx + 34.0,
            ps.color,
            ps.style.dash()
        );
        let _ = write!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" fill=\"#111111\">{}</text>\n",
            lx + 40.0,
            row_y + 4.0,
            escape(&ps.label)
        );
    }

    // Title and axis labels.
    let _ = write!(
        svg,
        "<text x=\"{:.2}\" y=\"26\" text-anchor=\"middle\" font-size=\"17\" \
         fill=\"#111111\">{}</text>\n",
        WIDTH / 2.0,
        escape(&spec.title)
    );
    let _ = write!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"14\" \
         fill=\"#111111\">n</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 14.0
    );
    let _ = write!(
        svg,
        "<text x=\"18\" y=\"{:.2}\" font-size=\"14\" fill=\"#111111\" \
         transform=\"rotate(-90 18 {:.2})\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape(&spec.y_label)
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use scaling_lab::{CurveKind, SeriesMeta};

    fn series(values: &[(u64, f64)]) -> CurveSeries {
        CurveSeries::from_values(
            CurveKind::InstMean,
            SeriesMeta::default(),
            values.iter().copied(),
        )
    }

    fn spec<'a>(list: Vec<PlotSeries<'a>>, axes: Axes) -> PlotSpec<'a> {
        PlotSpec {
            title: "t".into(),
            y_label: "error".into(),
            axes,
            series_list: list,
            output_path: PathBuf::from("unused.svg"),
        }
    }

    fn plain(series: &CurveSeries) -> PlotSeries<'_> {
        PlotSeries {
            series,
            label: "curve".into(),
            color: PALETTE[0],
            style: LineStyle::Solid,
            markers: false,
            band: false,
        }
    }

    #[test]
    fn single_series_two_points_is_one_polyline() {
        let s = series(&[(1, 0.5), (2, 0.25)]);
        let svg = render_svg(&spec(vec![plain(&s)], Axes::LogLog)).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("<polygon").count(), 0);
    }

    #[test]
    fn one_polyline_per_series() {
        let a = series(&[(1, 0.5), (2, 0.25), (4, 0.125)]);
        let b = series(&[(1, 0.9), (2, 0.8)]);
        let svg = render_svg(&spec(
            vec![plain(&a), plain(&b)],
            Axes::LogLog,
        ))
        .unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn bands_emit_polygons_only_when_asked() {
        let mut s = series(&[(1, 0.5), (2, 0.25), (4, 0.125)]);
        for p in &mut s.points {
            p.se = Some(0.01);
        }
        let mut with_band = plain(&s);
        with_band.band = true;
        with_band.markers = true;
        let svg = render_svg(&spec(vec![with_band], Axes::LogLog)).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 3);

        let svg = render_svg(&spec(vec![plain(&s)], Axes::LogLog)).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 0);
        assert_eq!(svg.matches("<circle").count(), 0);
    }

    #[test]
    fn empty_plot_is_a_usage_error() {
        assert!(render_svg(&spec(vec![], Axes::LogLog)).is_err());
    }

    #[test]
    fn zero_values_survive_on_linear_axis() {
        // n = 0 never plots (log n axis); value 0 plots only when the
        // value axis is linear.
        let s = series(&[(0, 1.0), (1, 0.0), (2, 0.5)]);
        let log = render_svg(&spec(vec![plain(&s)], Axes::LogLog)).unwrap();
        let lin = render_svg(&spec(vec![plain(&s)], Axes::LogLinear)).unwrap();
        let count = |svg: &str| {
            svg.lines()
                .find(|l| l.starts_with("<polyline"))
                .map(|l| l.matches(',').count())
                .unwrap()
        };
        assert_eq!(count(&log), 1);
        assert_eq!(count(&lin), 2);
    }
}
