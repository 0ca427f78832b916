//! Self-contained SVG plots: axes, log ticks, polylines and markers.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::{Error, Result};
use crate::formats::EmbeddingTable;
use crate::grid::{summarize, GridRow, NORM_NAMES};

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// An SVG document under construction.
pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Self {
            width,
            height,
            body: String::new(),
        }
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, dash: bool) {
        let dash = if dash { r#" stroke-dasharray="5,4""# } else { "" };
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}"{dash}/>"#
        );
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str) {
        let pts: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
    }

    pub fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        let _ = writeln!(self.body, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{fill}"/>"#);
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r##"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}" stroke="#999"/>"##
        );
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, content: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size}" text-anchor="{anchor}" font-family="sans-serif">{}</text>"#,
            escape(content)
        );
    }

    pub fn vertical_text(&mut self, x: f64, y: f64, size: f64, content: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size}" text-anchor="middle" font-family="sans-serif" transform="rotate(-90 {x:.2} {y:.2})">{}</text>"#,
            escape(content)
        );
    }

    /// The finished document. With `timestamp`, a comment recording the
    /// generation time follows the opening tag.
    pub fn finish(self, timestamp: bool) -> String {
        let mut out = format!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
            w = self.width,
            h = self.height
        );
        out.push('\n');
        if timestamp {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            let _ = writeln!(out, "<!-- generated at unix time {secs} -->");
        }
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}

/// Maps data to pixels along one axis.
#[derive(Debug, Clone, Copy)]
pub struct Scale {
    lo: f64,
    hi: f64,
    from: f64,
    to: f64,
    log: bool,
}

impl Scale {
    pub fn new(lo: f64, hi: f64, from: f64, to: f64, log: bool) -> Self {
        let (lo, hi) = if log { (lo.log10(), hi.log10()) } else { (lo, hi) };
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
        Self { lo, hi, from, to, log }
    }

    pub fn map(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        self.from + (v - self.lo) / (self.hi - self.lo) * (self.to - self.from)
    }

    /// Tick positions: decades (and 2x, 5x when the range is narrow) on log
    /// axes, round steps on linear ones.
    pub fn ticks(&self) -> Vec<f64> {
        if self.log {
            let mut out = Vec::new();
            let narrow = self.hi - self.lo < 2.0;
            for e in (self.lo.floor() as i32)..=(self.hi.ceil() as i32) {
                let base = 10f64.powi(e);
                let mults: &[f64] = if narrow { &[1.0, 2.0, 5.0] } else { &[1.0] };
                for &k in mults {
                    let v = k * base;
                    let l = v.log10();
                    if l >= self.lo - 1e-9 && l <= self.hi + 1e-9 {
                        out.push(v);
                    }
                }
            }
            out
        } else {
            let span = self.hi - self.lo;
            let raw = span / 5.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0]
                .iter()
                .map(|k| k * mag)
                .find(|&s| s >= raw)
                .unwrap_or(10.0 * mag);
            let mut v = (self.lo / step).ceil() * step;
            let mut out = Vec::new();
            while v <= self.hi + 1e-9 * step {
                out.push(if v.abs() < 1e-12 * step { 0.0 } else { v });
                v += step;
            }
            out
        }
    }
}

fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Plot frame inside an SVG: axes with ticks and labels.
struct Panel {
    x: Scale,
    y: Scale,
    top: f64,
    right: f64,
}

impl Panel {
    #[allow(clippy::too_many_arguments)]
    fn draw(
        svg: &mut Svg,
        bounds: (f64, f64, f64, f64),
        xr: (f64, f64),
        yr: (f64, f64),
        log: (bool, bool),
        title: &str,
        xlabel: &str,
        ylabel: &str,
    ) -> Self {
        let (left, top, right, bottom) = bounds;
        let x = Scale::new(xr.0, xr.1, left, right, log.0);
        let y = Scale::new(yr.0, yr.1, bottom, top, log.1);
        svg.line(left, bottom, right, bottom, "black", false);
        svg.line(left, bottom, left, top, "black", false);
        for t in x.ticks() {
            let px = x.map(t);
            svg.line(px, bottom, px, bottom + 4.0, "black", false);
            svg.text(px, bottom + 16.0, 10.0, "middle", &tick_label(t));
        }
        for t in y.ticks() {
            let py = y.map(t);
            svg.line(left - 4.0, py, left, py, "black", false);
            svg.text(left - 6.0, py + 3.0, 10.0, "end", &tick_label(t));
        }
        svg.text((left + right) / 2.0, top - 8.0, 12.0, "middle", title);
        svg.text((left + right) / 2.0, bottom + 32.0, 11.0, "middle", xlabel);
        svg.vertical_text(left - 44.0, (top + bottom) / 2.0, 11.0, ylabel);
        Panel { x, y, top, right }
    }

    fn point(&self, x: f64, y: f64) -> (f64, f64) {
        (self.x.map(x), self.y.map(y))
    }
}

fn padded_log_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| v.is_finite() && *v > 0.0)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    (lo <= hi).then(|| (lo / 1.25, hi * 1.25))
}

fn padded_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo > hi {
        return None;
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
    Some((lo - pad, hi + pad))
}

fn empty(what: &str) -> Error {
    Error::Data(format!("nothing to plot: {what}"))
}

/// Series of `(m, mean metric)` per `n` for one regime.
fn series(rows: &[GridRow], regime: &str, metric: usize) -> BTreeMap<usize, Vec<(f64, f64)>> {
    let mut out: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for ((r, n, m), s) in summarize(rows) {
        if r == regime && s.norms[metric].is_finite() && s.norms[metric] > 0.0 {
            out.entry(n).or_default().push((m as f64, s.norms[metric]));
        }
    }
    out
}

/// Regimes present in the rows, in first-appearance order.
pub fn regimes(rows: &[GridRow]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for r in rows {
        if !out.contains(&r.regime) {
            out.push(r.regime.clone());
        }
    }
    out
}

fn draw_series(svg: &mut Svg, panel: &Panel, lines: &BTreeMap<usize, Vec<(f64, f64)>>) {
    for (i, (_, pts)) in lines.iter().enumerate() {
        let px: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| panel.point(x, y)).collect();
        svg.polyline(&px, color(i));
        for &(x, y) in &px {
            svg.circle(x, y, 3.0, color(i));
        }
    }
}

fn legend(svg: &mut Svg, x: f64, y: f64, entries: &[(String, &str)]) {
    for (i, (label, c)) in entries.iter().enumerate() {
        let yy = y + 14.0 * i as f64;
        svg.line(x, yy, x + 18.0, yy, c, false);
        svg.text(x + 22.0, yy + 4.0, 10.0, "start", label);
    }
}

/// `||V̂Ŝ - VSW||_{2->inf}` against `m`, log-log, one curve per `n`, with a
/// dashed reference proportional to `log(m) / sqrt(m)`.
pub fn convergence_plot(rows: &[GridRow], regime: &str, timestamp: bool) -> Result<String> {
    let lines = series(rows, regime, 5);
    if lines.is_empty() {
        return Err(empty("no convergence data"));
    }
    let all = || lines.values().flatten();
    let xr = padded_log_range(all().map(|p| p.0)).ok_or_else(|| empty("no positive m"))?;
    let yr = padded_log_range(all().map(|p| p.1)).ok_or_else(|| empty("no positive norms"))?;
    let mut svg = Svg::new(640.0, 440.0);
    let panel = Panel::draw(
        &mut svg,
        (80.0, 40.0, 500.0, 380.0),
        xr,
        yr,
        (true, true),
        &format!("{regime} regime: 2-to-infinity embedding error"),
        "m (interactions)",
        "error",
    );
    draw_series(&mut svg, &panel, &lines);

    let (&(x0, y0), xs) = {
        let first = lines.values().next().expect("nonempty");
        (&first[0], first.iter().map(|p| p.0).collect::<Vec<_>>())
    };
    let rate = |m: f64| m.ln() / m.sqrt();
    let reference: Vec<(f64, f64)> = xs.iter().map(|&m| panel.point(m, y0 * rate(m) / rate(x0))).collect();
    for w in reference.windows(2) {
        svg.line(w[0].0, w[0].1, w[1].0, w[1].1, "black", true);
    }
    let mut entries: Vec<(String, &str)> = lines
        .keys()
        .enumerate()
        .map(|(i, n)| (format!("n = {n}"), color(i)))
        .collect();
    entries.push(("log(m)/sqrt(m)".into(), "black"));
    legend(&mut svg, panel.right + 15.0, panel.top + 10.0, &entries);
    Ok(svg.finish(timestamp))
}

/// Small multiples of the six diagnostic norms against `m`, log-log.
pub fn diagnostics_plot(rows: &[GridRow], regime: &str, timestamp: bool) -> Result<String> {
    let per_metric: Vec<_> = (0..6).map(|k| series(rows, regime, k)).collect();
    if per_metric.iter().all(BTreeMap::is_empty) {
        return Err(empty("no diagnostics data"));
    }
    let mut svg = Svg::new(1080.0, 640.0);
    let mut ns: Vec<usize> = Vec::new();
    for (k, lines) in per_metric.iter().enumerate() {
        let col = (k % 3) as f64;
        let row = (k / 3) as f64;
        let left = 80.0 + 330.0 * col;
        let top = 40.0 + 300.0 * row;
        let all = || lines.values().flatten();
        let (Some(xr), Some(yr)) = (
            padded_log_range(all().map(|p| p.0)),
            padded_log_range(all().map(|p| p.1)),
        ) else {
            svg.text(
                left + 120.0,
                top + 120.0,
                11.0,
                "middle",
                &format!("{}: no data", NORM_NAMES[k]),
            );
            continue;
        };
        let panel = Panel::draw(
            &mut svg,
            (left, top, left + 240.0, top + 220.0),
            xr,
            yr,
            (true, true),
            NORM_NAMES[k],
            "m",
            "",
        );
        draw_series(&mut svg, &panel, lines);
        for n in lines.keys() {
            if !ns.contains(n) {
                ns.push(*n);
            }
        }
    }
    ns.sort_unstable();
    let entries: Vec<(String, &str)> = ns
        .iter()
        .enumerate()
        .map(|(i, n)| (format!("n = {n}"), color(i)))
        .collect();
    legend(&mut svg, 1000.0, 50.0, &entries);
    Ok(svg.finish(timestamp))
}

/// Mean ARI per `(n, m)` laid out as a table, one block per regime.
pub fn ari_table(rows: &[GridRow], gap_k: bool, timestamp: bool) -> Result<String> {
    let summary = summarize(rows);
    if summary.is_empty() {
        return Err(empty("no ARI values"));
    }
    let regimes = regimes(rows);
    let cell_w = 80.0;
    let cell_h = 24.0;
    let mut blocks = Vec::new();
    for regime in &regimes {
        let mut ns: Vec<usize> = Vec::new();
        let mut ms: Vec<usize> = Vec::new();
        for (r, n, m) in summary.keys() {
            if r == regime {
                if !ns.contains(n) {
                    ns.push(*n);
                }
                if !ms.contains(m) {
                    ms.push(*m);
                }
            }
        }
        ns.sort_unstable();
        ms.sort_unstable();
        if !ns.is_empty() {
            blocks.push((regime.clone(), ns, ms));
        }
    }
    let width = (60.0 + cell_w * (1 + blocks.iter().map(|b| b.2.len()).max().unwrap_or(1)) as f64).max(420.0);
    let height: f64 = 20.0 + blocks.iter().map(|b| 70.0 + cell_h * b.1.len() as f64).sum::<f64>();
    let mut svg = Svg::new(width, height);
    let mut y = 20.0;
    let label = if gap_k { "gap-selected k" } else { "true k" };
    for (regime, ns, ms) in &blocks {
        svg.text(
            30.0,
            y + 14.0,
            13.0,
            "start",
            &format!("{regime} regime, mean ARI ({label})"),
        );
        y += 26.0;
        svg.text(30.0 + cell_w / 2.0, y + 16.0, 11.0, "middle", "n \\ m");
        for (j, m) in ms.iter().enumerate() {
            svg.text(
                30.0 + cell_w * (j as f64 + 1.5),
                y + 16.0,
                11.0,
                "middle",
                &m.to_string(),
            );
        }
        y += cell_h;
        for n in ns {
            svg.text(30.0 + cell_w / 2.0, y + 16.0, 11.0, "middle", &n.to_string());
            for (j, m) in ms.iter().enumerate() {
                let x = 30.0 + cell_w * (j as f64 + 1.0);
                match summary.get(&(regime.clone(), *n, *m)) {
                    Some(s) => {
                        let v = if gap_k { s.ari_gap_k } else { s.ari_true_k };
                        let shade = (255.0 - 120.0 * v.clamp(0.0, 1.0)).round() as u8;
                        svg.rect(x, y, cell_w, cell_h, &format!("rgb({shade},{shade},255)"));
                        svg.text(x + cell_w / 2.0, y + 16.0, 11.0, "middle", &format!("{v:.3}"));
                    }
                    None => svg.rect(x, y, cell_w, cell_h, "#eeeeee"),
                }
            }
            y += cell_h;
        }
        y += 20.0;
    }
    Ok(svg.finish(timestamp))
}

/// First two embedding coordinates, colored by type when present.
pub fn scatter_plot(table: &EmbeddingTable, timestamp: bool) -> Result<String> {
    let m = table.coords.nrows();
    if m == 0 {
        return Err(empty("empty embedding"));
    }
    let xs: Vec<f64> = table.coords.column(0).iter().copied().collect();
    let ys: Vec<f64> = if table.coords.ncols() > 1 {
        table.coords.column(1).iter().copied().collect()
    } else {
        vec![0.0; m]
    };
    let xr = padded_range(xs.iter().copied()).ok_or_else(|| empty("no finite coordinates"))?;
    let yr = padded_range(ys.iter().copied()).ok_or_else(|| empty("no finite coordinates"))?;
    let mut svg = Svg::new(600.0, 520.0);
    let panel = Panel::draw(
        &mut svg,
        (80.0, 40.0, 560.0, 460.0),
        xr,
        yr,
        (false, false),
        "interaction embedding",
        "x1",
        "x2",
    );
    let mut type_index: BTreeMap<usize, usize> = BTreeMap::new();
    if let Some(types) = &table.types {
        for &t in types {
            let next = type_index.len();
            type_index.entry(t).or_insert(next);
        }
    }
    for p in 0..m {
        if !(xs[p].is_finite() && ys[p].is_finite()) {
            continue;
        }
        let c = table.types.as_ref().map_or(0, |t| type_index[&t[p]]);
        let (x, y) = panel.point(xs[p], ys[p]);
        svg.circle(x, y, 2.0, color(c));
    }
    Ok(svg.finish(timestamp))
}
