//! Self-contained SVG plots of sweep records.
//!
//! Measured estimates are drawn as markers and theory as lines, one colour per
//! `(quantity, c, l, iterations)` series. The y-axis is logarithmic for the
//! acceptance, ratio, retrieval and capacity sweeps.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::record::SweepRecord;
use super::spec::ExperimentKind;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f",
];

#[derive(Debug, Clone, Copy, PartialEq)]
enum Style {
    Markers,
    Line,
    Dashed,
}

#[derive(Debug)]
struct Series {
    label: String,
    style: Style,
    colour: usize,
    points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
struct Axis {
    log: bool,
    lo: f64,
    hi: f64,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return Axis { log, lo: if log { 0.1 } else { 0.0 }, hi: 1.0 };
        }
        if log {
            lo = 10f64.powf(lo.log10().floor());
            hi = 10f64.powf(hi.log10().ceil());
            if lo == hi {
                hi = lo * 10.0;
            }
        } else {
            lo = lo.min(0.0);
            if hi <= lo {
                hi = lo + 1.0;
            }
        }
        Axis { log, lo, hi }
    }

    fn map(&self, v: f64) -> f64 {
        if self.log {
            (v.log10() - self.lo.log10()) / (self.hi.log10() - self.lo.log10())
        } else {
            (v - self.lo) / (self.hi - self.lo)
        }
    }

    fn contains(&self, v: f64) -> bool {
        v.is_finite() && (!self.log || v > 0.0)
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (self.lo.log10().round() as i32, self.hi.log10().round() as i32);
            let step = ((b - a) / 8).max(1);
            (a..=b).step_by(step as usize).map(|e| 10f64.powi(e)).collect()
        } else {
            (0..=5).map(|i| self.lo + (self.hi - self.lo) * i as f64 / 5.0).collect()
        }
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn series_key(r: &SweepRecord) -> String {
    let mut key = r.quantity.to_string();
    if let (Some(c), Some(l)) = (r.clusters, r.fanals) {
        write!(key, " c={c} l={l}").unwrap();
    } else {
        write!(key, " n={}", r.neurons).unwrap();
    }
    if let Some(it) = r.iterations.filter(|&it| it > 1) {
        write!(key, " it={it}").unwrap();
    }
    key
}

fn build_series(records: &[SweepRecord], experiment: ExperimentKind) -> Vec<Series> {
    let mut groups: BTreeMap<String, Vec<&SweepRecord>> = BTreeMap::new();
    let mut order = Vec::new();
    for r in records {
        let key = series_key(r);
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(r);
    }
    let mut out = Vec::new();
    for (colour, key) in order.iter().enumerate() {
        let rows = &groups[key];
        let quantity = rows[0].quantity;
        let mut measured = Vec::new();
        let mut theory = Vec::new();
        for r in rows {
            match (experiment, quantity) {
                (ExperimentKind::Ratio, _) => {
                    let x = r.messages as f64;
                    measured.extend(r.derived.map(|y| (x, y)));
                    theory.extend(r.derived_theory.map(|y| (x, y)));
                }
                (ExperimentKind::Capacity, "capacity") => {
                    let x = r.memory_bits.unwrap_or(0.0);
                    measured.extend(r.derived.map(|y| (x, y)));
                    theory.extend(r.derived_theory.map(|y| (x, y)));
                }
                (ExperimentKind::Capacity, _) | (ExperimentKind::HopfieldBaseline, _) => {
                    if let (Some(x), Some(y)) = (r.memory_bits, r.derived) {
                        theory.push((x, y));
                    } else if let Some(y) = r.estimate {
                        measured.push((r.messages as f64, y));
                    }
                }
                _ => {
                    let x = r.messages as f64;
                    measured.extend(r.estimate.map(|y| (x, y)));
                    theory.extend(r.theory.map(|y| (x, y)));
                }
            }
        }
        if !measured.is_empty() {
            out.push(Series {
                label: key.clone(),
                style: Style::Markers,
                colour,
                points: measured,
            });
        }
        if !theory.is_empty() {
            out.push(Series {
                label: format!("{key} (theory)"),
                style: Style::Line,
                colour,
                points: theory,
            });
        }
    }
    if experiment == ExperimentKind::Capacity {
        let xs: Vec<f64> = records.iter().filter_map(|r| r.memory_bits).collect();
        if let (Some(lo), Some(hi)) = (
            xs.iter().copied().reduce(f64::min),
            xs.iter().copied().reduce(f64::max),
        ) {
            out.push(Series {
                label: "efficiency 1".into(),
                style: Style::Dashed,
                colour: PALETTE.len() - 1,
                points: vec![(lo, lo), (hi, hi)],
            });
        }
    }
    out
}

/// Renders the records of one sweep as an SVG document.
pub fn render(records: &[SweepRecord], title: &str) -> String {
    let experiment = records.first().map(|r| r.experiment).unwrap_or(ExperimentKind::Density);
    let series = build_series(records, experiment);
    let log_y = experiment != ExperimentKind::Density;
    let log_x = experiment == ExperimentKind::Capacity;
    let (x_label, y_label) = match experiment {
        ExperimentKind::Density => ("messages learnt", "density"),
        ExperimentKind::Accept => ("messages learnt", "acceptance probability"),
        ExperimentKind::Ratio => ("messages learnt", "unlearnt accepted / learnt"),
        ExperimentKind::Retrieval => ("messages learnt", "retrieval error"),
        ExperimentKind::Capacity => ("memory (bits)", "capacity (bits)"),
        ExperimentKind::HopfieldBaseline => ("messages learnt", "error"),
    };
    let all = || series.iter().flat_map(|s| s.points.iter().copied());
    let xa = Axis::fit(all().map(|p| p.0), log_x);
    let ya = Axis::fit(all().map(|p| p.1), log_y);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + xa.map(x) * pw;
    let py = |y: f64| TOP + (1.0 - ya.map(y)) * ph;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        escape(title)
    )
    .unwrap();
    writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##
    )
    .unwrap();
    for t in xa.ticks() {
        let x = px(t);
        writeln!(
            s,
            r##"<line x1="{x:.1}" y1="{TOP}" x2="{x:.1}" y2="{:.1}" stroke="#ddd"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"##,
            TOP + ph,
            TOP + ph + 16.0,
            tick_label(t)
        )
        .unwrap();
    }
    for t in ya.ticks() {
        let y = py(t);
        writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            y + 4.0,
            tick_label(t)
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{x_label}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 16.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{y_label}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    )
    .unwrap();

    for (i, ser) in series.iter().enumerate() {
        let colour = PALETTE[ser.colour % PALETTE.len()];
        let pts: Vec<(f64, f64)> = ser
            .points
            .iter()
            .copied()
            .filter(|&(x, y)| xa.contains(x) && ya.contains(y))
            .map(|(x, y)| (px(x), py(y)))
            .collect();
        match ser.style {
            Style::Markers => {
                for (x, y) in &pts {
                    writeln!(s, r#"<circle cx="{x:.1}" cy="{y:.1}" r="3.5" fill="{colour}"/>"#).unwrap();
                }
            }
            Style::Line | Style::Dashed => {
                let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
                let dash = if ser.style == Style::Dashed { r#" stroke-dasharray="6 4""# } else { "" };
                writeln!(
                    s,
                    r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"{dash}/>"#,
                    path.join(" ")
                )
                .unwrap();
            }
        }
        let ly = TOP + 10.0 + 16.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        match ser.style {
            Style::Markers => writeln!(
                s,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3.5" fill="{colour}"/>"#,
                lx + 9.0,
                ly - 4.0
            ),
            _ => writeln!(
                s,
                r#"<line x1="{lx:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{colour}" stroke-width="1.5"/>"#,
                ly - 4.0,
                lx + 18.0,
                ly - 4.0
            ),
        }
        .unwrap();
        writeln!(s, r#"<text x="{:.1}" y="{ly:.1}">{}</text>"#, lx + 24.0, escape(&ser.label)).unwrap();
    }
    s.push_str("</svg>\n");
    s
}
