//! Line charts of sort rate or speedup against log2 of the length.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::algorithm::{AlgorithmId, Mode};
use crate::bench::{join_speedups, Measurement};
use crate::distribution::DistributionKind;
use crate::error::{Error, Result};
use crate::key::ElementWidth;
use crate::sequence::PayloadMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureKind {
    SortRate,
    Speedup,
}

/// Which rows a figure shows. `mode` is ignored by speedup figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PlotSpec {
    pub kind: FigureKind,
    pub mode: Mode,
    pub width: ElementWidth,
    pub payload: PayloadMode,
    pub distribution: DistributionKind,
}

impl PlotSpec {
    pub fn describe(&self) -> String {
        let payload = match self.payload {
            PayloadMode::KeysOnly => "keys only",
            PayloadMode::KeyValue => "(key, value) pairs",
        };
        match self.kind {
            FigureKind::SortRate => {
                let mode = match self.mode {
                    Mode::Sequential => "Sequential",
                    Mode::Parallel => "Parallel",
                };
                format!("{mode}, {} bit, {payload}, {}", self.width, self.distribution)
            }
            FigureKind::Speedup => format!("Speedup, {} bit, {payload}, {}", self.width, self.distribution),
        }
    }

    pub fn file_stem(&self) -> String {
        match self.kind {
            FigureKind::SortRate => format!(
                "rate_{}_{}_{}_{}",
                self.mode, self.width, self.payload, self.distribution
            ),
            FigureKind::Speedup => format!("speedup_{}_{}_{}", self.width, self.payload, self.distribution),
        }
    }

    fn y_label(&self) -> &'static str {
        match self.kind {
            FigureKind::SortRate => "Sort rate (M/s)",
            FigureKind::Speedup => "Speedup",
        }
    }

    fn omits_quicksort(&self) -> bool {
        self.distribution == DistributionKind::Zero
    }

    fn matches(&self, m: &Measurement) -> bool {
        m.is_valid()
            && m.width == self.width
            && m.payload == self.payload
            && m.distribution == self.distribution
            && (self.kind == FigureKind::Speedup || m.mode == self.mode)
            && !(self.omits_quicksort() && m.algorithm == AlgorithmId::Quick)
    }
}

struct Series {
    algorithm: AlgorithmId,
    points: Vec<(f64, f64)>,
}

fn collect_series(measurements: &[Measurement], spec: &PlotSpec) -> Result<Vec<Series>> {
    let rows: Vec<Measurement> = measurements.iter().filter(|m| spec.matches(m)).cloned().collect();
    let mut points: Vec<(AlgorithmId, f64, f64)> = match spec.kind {
        FigureKind::SortRate => rows
            .iter()
            .map(|m| (m.algorithm, (m.n as f64).log2(), m.sort_rate))
            .collect(),
        FigureKind::Speedup => join_speedups(&rows)?
            .into_iter()
            .map(|s| (s.cell.algorithm, (s.cell.n as f64).log2(), s.speedup))
            .collect(),
    };
    points.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let series: Vec<Series> = AlgorithmId::ALL
        .into_iter()
        .map(|algorithm| Series {
            algorithm,
            points: points
                .iter()
                .filter(|p| p.0 == algorithm)
                .map(|p| (p.1, p.2))
                .collect(),
        })
        .filter(|s| !s.points.is_empty())
        .collect();
    if series.is_empty() {
        return Err(Error::EmptyPlot(spec.describe()));
    }
    Ok(series)
}

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 220.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 80.0;

const COLORS: [&str; 7] = ["#1f77b4", "#d62728", "#9467bd", "#2ca02c", "#ff7f0e", "#8c564b", "#17becf"];

fn style(algo: AlgorithmId) -> usize {
    AlgorithmId::ALL.iter().position(|&a| a == algo).unwrap_or(0)
}

fn marker(out: &mut String, algo: AlgorithmId, x: f64, y: f64) {
    let i = style(algo);
    let c = COLORS[i];
    let r = 4.0;
    let shape = match i {
        0 => format!(r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{c}"/>"#),
        1 => format!(
            r#"<rect x="{:.2}" y="{:.2}" width="{}" height="{}" fill="{c}"/>"#,
            x - r,
            y - r,
            2.0 * r,
            2.0 * r
        ),
        2 => format!(
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="none" stroke="{c}" stroke-width="1.5"/>"#,
            x,
            y - r,
            x - r,
            y + r,
            x + r,
            y + r
        ),
        3 => format!(
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{c}"/>"#,
            x,
            y - r,
            x - r,
            y + r,
            x + r,
            y + r
        ),
        4 => format!(
            r#"<path d="M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}" stroke="{c}" stroke-width="2"/>"#,
            x - r,
            y - r,
            x + r,
            y + r,
            x - r,
            y + r,
            x + r,
            y - r
        ),
        5 => format!(
            r#"<path d="M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}" stroke="{c}" stroke-width="1.5"/>"#,
            x,
            y - r,
            x,
            y + r,
            x - r,
            y - r / 2.0,
            x + r,
            y + r / 2.0,
            x - r,
            y + r / 2.0,
            x + r,
            y - r / 2.0
        ),
        _ => format!(
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{c}"/>"#,
            x,
            y - r,
            x + r,
            y,
            x,
            y + r,
            x - r,
            y
        ),
    };
    let _ = write!(out, r#"<g class="marker" data-algorithm="{}">{shape}</g>"#, algo.name());
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Step for about five ticks from 0 to `max`.
fn tick_step(max: f64) -> f64 {
    let raw = max / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag)
}

fn render(series: &[Series], spec: &PlotSpec) -> String {
    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let (mut x0, mut x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    x0 = x0.floor();
    x1 = x1.ceil();
    if x1 - x0 < 1.0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let y_max_data = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .fold(0.0f64, f64::max);
    let step = if y_max_data > 0.0 { tick_step(y_max_data * 1.05) } else { 1.0 };
    let y1 = ((y_max_data * 1.05) / step).ceil().max(1.0) * step;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| TOP + plot_h - y / y1 * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text class="title" x="{:.1}" y="25" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(&spec.describe())
    );
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let mut t = x0.ceil();
    while t <= x1 + 1e-9 {
        let x = px(t);
        let _ = writeln!(
            out,
            r#"<g class="xtick"><line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{t}</text></g>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 20.0
        );
        t += 1.0;
    }
    let mut k = 0.0;
    while k <= y1 + step * 1e-9 {
        let y = py(k);
        let _ = writeln!(
            out,
            r##"<g class="ytick"><line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text></g>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0,
            format_tick(k, step)
        );
        k += step;
    }
    let _ = writeln!(
        out,
        r#"<text class="xlabel" x="{:.1}" y="{:.1}" text-anchor="middle">log2(n)</text>"#,
        LEFT + plot_w / 2.0,
        TOP + plot_h + 42.0
    );
    let _ = writeln!(
        out,
        r#"<text class="ylabel" transform="translate(18,{:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
        TOP + plot_h / 2.0,
        spec.y_label()
    );
    for s in series {
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline class="series" data-algorithm="{}" points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            s.algorithm.name(),
            pts.join(" "),
            COLORS[style(s.algorithm)]
        );
        for &(x, y) in &s.points {
            marker(&mut out, s.algorithm, px(x), py(y));
            out.push('\n');
        }
    }
    let lx = LEFT + plot_w + 20.0;
    for (i, s) in series.iter().enumerate() {
        let ly = TOP + 10.0 + 22.0 * i as f64;
        let _ = write!(
            out,
            r#"<g class="legend-entry"><line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{}" stroke-width="1.5"/>"#,
            lx + 30.0,
            COLORS[style(s.algorithm)]
        );
        marker(&mut out, s.algorithm, lx + 15.0, ly);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}">{}</text></g>"#,
            lx + 38.0,
            ly + 4.0,
            escape(s.algorithm.label())
        );
    }
    if spec.omits_quicksort() {
        let _ = writeln!(
            out,
            r#"<text class="footnote" x="{LEFT}" y="{:.1}" font-size="11">Quicksort is omitted for the zero distribution: constant input is detected by its min/max pass without sorting.</text>"#,
            HEIGHT - 12.0
        );
    }
    out.push_str("</svg>\n");
    out
}

fn format_tick(v: f64, step: f64) -> String {
    if step >= 1.0 {
        format!("{v:.0}")
    } else {
        let digits = (-step.log10().floor()) as usize;
        format!("{v:.digits$}")
    }
}

/// The SVG document for `spec`.
pub fn render_plot(measurements: &[Measurement], spec: &PlotSpec) -> Result<String> {
    let series = collect_series(measurements, spec)?;
    Ok(render(&series, spec))
}

pub fn emit_plot(measurements: &[Measurement], spec: &PlotSpec, path: impl AsRef<Path>) -> Result<()> {
    let svg = render_plot(measurements, spec)?;
    let path = path.as_ref();
    std::fs::write(path, svg).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Writes one sort-rate figure per (mode, width, payload, distribution)
/// present, and a speedup figure wherever both modes are present, to
/// `<prefix>_<stem>.svg`. Returns the paths written.
pub fn emit_all_plots(measurements: &[Measurement], prefix: &str) -> Result<Vec<PathBuf>> {
    let valid: Vec<Measurement> = measurements.iter().filter(|m| m.is_valid()).cloned().collect();
    let mut specs: Vec<PlotSpec> = Vec::new();
    for m in &valid {
        let rate = PlotSpec {
            kind: FigureKind::SortRate,
            mode: m.mode,
            width: m.width,
            payload: m.payload,
            distribution: m.distribution,
        };
        if !specs.contains(&rate) {
            specs.push(rate);
        }
    }
    let rates = specs.clone();
    for r in rates {
        let speed = PlotSpec {
            kind: FigureKind::Speedup,
            mode: Mode::Parallel,
            ..r
        };
        let both = Mode::ALL.iter().all(|&mode| rates_has(&specs, PlotSpec { mode, ..r }));
        if both && !specs.contains(&speed) {
            specs.push(speed);
        }
    }
    let mut written = Vec::new();
    for spec in specs {
        let rows: Vec<Measurement> = match spec.kind {
            FigureKind::SortRate => valid.clone(),
            FigureKind::Speedup => paired(&valid),
        };
        let series = match collect_series(&rows, &spec) {
            Ok(s) => s,
            Err(Error::EmptyPlot(_)) => continue,
            Err(e) => return Err(e),
        };
        let path = PathBuf::from(format!("{prefix}_{}.svg", spec.file_stem()));
        std::fs::write(&path, render(&series, &spec)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}

fn rates_has(specs: &[PlotSpec], spec: PlotSpec) -> bool {
    specs.contains(&PlotSpec {
        kind: FigureKind::SortRate,
        ..spec
    })
}

/// Rows whose cell has a valid row in both modes.
fn paired(valid: &[Measurement]) -> Vec<Measurement> {
    valid
        .iter()
        .filter(|m| {
            valid
                .iter()
                .any(|o| o.mode != m.mode && o.cell_key() == m.cell_key())
        })
        .cloned()
        .collect()
}
