//! Table, JSON and SVG emission.
//!
//! CSV files carry only deterministic metadata so that two runs with the
//! same configuration produce identical bytes; wall time goes to stderr and
//! into the JSON envelope.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

/// Fixed-schema rows, already formatted.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: Option<u64>,
    pub config: Value,
}

impl Meta {
    pub fn new(command: &'static str, seed: Option<u64>, config: Value) -> Self {
        Self {
            tool: "geoment",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            config,
        }
    }

    fn header_lines(&self) -> Vec<String> {
        vec![
            format!("{} {}", self.tool, self.version),
            format!("command: {}", self.command),
            match self.seed {
                Some(s) => format!("seed: {s}"),
                None => "seed: none (deterministic)".to_string(),
            },
            format!("config: {}", self.config),
        ]
    }
}

pub fn to_csv(meta: &Meta, table: &Table) -> Result<String, csv::Error> {
    let mut out = String::new();
    for line in meta.header_lines() {
        let _ = writeln!(out, "# {line}");
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    out.push_str(&String::from_utf8(bytes).expect("fields are UTF-8"));
    Ok(out)
}

pub fn to_json(meta: &Meta, wall_time_s: f64, result: &Value) -> String {
    let mut meta = serde_json::to_value(meta).expect("metadata serializes");
    meta["wall_time_s"] = Value::from(wall_time_s);
    let doc = serde_json::json!({ "meta": meta, "result": result });
    let mut s = serde_json::to_string_pretty(&doc).expect("values serialize");
    s.push('\n');
    s
}

/// Which table columns a scatter plot uses.
#[derive(Debug, Clone, Copy)]
pub struct Plot {
    pub x: &'static str,
    pub y: &'static str,
    /// Column whose distinct values get distinct colors.
    pub group: Option<&'static str>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace("--", "- -")
}

fn axis_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Static scatter plot built only from the CSV text (header and rows), so
/// it is as reproducible as the CSV itself. Rows whose coordinates do not
/// parse as finite numbers are skipped.
pub fn to_svg(meta: &Meta, table: &Table, plot: Plot) -> String {
    let (xi, yi) = (
        table.column(plot.x).expect("plot column exists"),
        table.column(plot.y).expect("plot column exists"),
    );
    let gi = plot.group.and_then(|g| table.column(g));
    let points: Vec<(f64, f64, String)> = table
        .rows
        .iter()
        .filter_map(|row| {
            let x: f64 = row[xi].parse().ok()?;
            let y: f64 = row[yi].parse().ok()?;
            let g = gi.map(|i| row[i].clone()).unwrap_or_default();
            (x.is_finite() && y.is_finite()).then_some((x, y, g))
        })
        .collect();
    let mut groups: Vec<String> = Vec::new();
    for (_, _, g) in &points {
        if !groups.contains(g) {
            groups.push(g.clone());
        }
    }

    let (x0, x1) = axis_range(points.iter().map(|p| p.0));
    let (y0, y1) = axis_range(points.iter().map(|p| p.1));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    s.push_str("<!--\n");
    for line in meta.header_lines() {
        let _ = writeln!(s, "{}", escape(&line));
    }
    s.push_str("-->\n");
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{left} {top} L{left} {bottom} L{right} {bottom}" stroke="black" fill="none"/>"#
    );
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<text x="{px:.1}" y="{:.1}" font-size="11" text-anchor="middle">{xv:.3}</text>"#,
            bottom + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{py:.1}" font-size="11" text-anchor="end">{yv:.3}</text>"#,
            left - 6.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        escape(plot.x)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(plot.y)
    );
    for (x, y, g) in &points {
        let k = groups.iter().position(|h| h == g).unwrap_or(0);
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}" fill-opacity="0.7"/>"#,
            sx(*x),
            sy(*y),
            PALETTE[k % PALETTE.len()]
        );
    }
    if gi.is_some() {
        for (k, g) in groups.iter().enumerate() {
            let y = top + 14.0 * k as f64;
            let _ = writeln!(
                s,
                r#"<circle cx="{:.1}" cy="{:.1}" r="4" fill="{}"/><text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
                right - 110.0,
                y,
                PALETTE[k % PALETTE.len()],
                right - 100.0,
                y + 4.0,
                escape(g)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
