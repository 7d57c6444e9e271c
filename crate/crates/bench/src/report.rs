//! Sweep tables as CSV and the two plots as SVG.
//!
//! Both outputs only depend on the table contents, so identical tables give
//! identical bytes.

use std::fmt::Write as _;
use std::io::{Read, Write};

use zermelo_core::optimizer::OptimizerStatus;
use zermelo_core::{Error, Result};

use crate::fit::retained;
use crate::sweep::{RowTiming, SweepRow};

pub const CSV_HEADER: [&str; 21] = [
    "l",
    "h",
    "vertices",
    "arcs",
    "t_graph",
    "t_continuous",
    "error",
    "a_posteriori",
    "a_posteriori_0",
    "a_posteriori_1",
    "a_posteriori_2",
    "local",
    "a_priori",
    "sigma",
    "length",
    "residual",
    "status",
    "simplified_valid",
    "l_within_length",
    "coupling_respected",
    "failure",
];

fn status_name(s: Option<OptimizerStatus>) -> &'static str {
    match s {
        None => "",
        Some(OptimizerStatus::Converged) => "converged",
        Some(OptimizerStatus::MaxIterations) => "maxIterations",
        Some(OptimizerStatus::NoDescent) => "noDescent",
        Some(OptimizerStatus::SeedKept) => "seedKept",
    }
}

fn parse_status(s: &str) -> Result<Option<OptimizerStatus>> {
    Ok(Some(match s {
        "" => return Ok(None),
        "converged" => OptimizerStatus::Converged,
        "maxIterations" => OptimizerStatus::MaxIterations,
        "noDescent" => OptimizerStatus::NoDescent,
        "seedKept" => OptimizerStatus::SeedKept,
        other => return Err(Error::InvalidArgument(format!("unknown status '{other}'"))),
    }))
}

pub fn write_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in rows {
        let t = r.a_posteriori_terms;
        let nums = [
            r.l,
            r.h,
            r.vertex_count as f64,
            r.arc_count as f64,
            r.t_graph,
            r.t_continuous,
            r.error,
            r.a_posteriori,
            t[0],
            t[1],
            t[2],
            r.local,
            r.a_priori,
            r.sigma,
            r.length,
            r.residual,
        ];
        let mut rec: Vec<String> = nums.iter().map(|v| v.to_string()).collect();
        rec.push(status_name(r.status).into());
        for b in [r.simplified_valid, r.l_within_length, r.coupling_respected] {
            rec.push(b.to_string());
        }
        rec.push(r.failure.clone().unwrap_or_default());
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::InvalidArgument("sweep table header does not match".into()));
    }
    let bad = |what: &str, v: &str| Error::InvalidArgument(format!("bad {what} '{v}'"));
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> { rec[i].parse().map_err(|_| bad(CSV_HEADER[i], &rec[i])) };
        let count = |i: usize| -> Result<usize> { rec[i].parse().map_err(|_| bad(CSV_HEADER[i], &rec[i])) };
        let flag = |i: usize| -> Result<bool> { rec[i].parse().map_err(|_| bad(CSV_HEADER[i], &rec[i])) };
        rows.push(SweepRow {
            l: num(0)?,
            h: num(1)?,
            vertex_count: count(2)?,
            arc_count: count(3)?,
            t_graph: num(4)?,
            t_continuous: num(5)?,
            error: num(6)?,
            a_posteriori: num(7)?,
            a_posteriori_terms: [num(8)?, num(9)?, num(10)?],
            local: num(11)?,
            a_priori: num(12)?,
            sigma: num(13)?,
            length: num(14)?,
            residual: num(15)?,
            status: parse_status(&rec[16])?,
            simplified_valid: flag(17)?,
            l_within_length: flag(18)?,
            coupling_respected: flag(19)?,
            failure: (!rec[20].is_empty()).then(|| rec[20].to_string()),
        });
    }
    Ok(rows)
}

pub fn write_timings_csv<W: Write>(timings: &[RowTiming], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["l", "search_secs", "optimize_secs", "bounds_secs"])?;
    for t in timings {
        out.write_record(
            [t.l, t.search_secs, t.optimize_secs, t.bounds_secs].iter().map(|v| v.to_string()),
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Shares of the three a posteriori terms in their sum.
pub fn term_shares(row: &SweepRow) -> [f64; 3] {
    let t = row.a_posteriori_terms;
    let s = t[0] + t[1] + t[2];
    if s > 0.0 {
        [t[0] / s, t[1] / s, t[2] / s]
    } else {
        [0.0; 3]
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN: (f64, f64, f64, f64) = (70.0, 150.0, 30.0, 50.0); // left, right, top, bottom
const TERM_COLORS: [&str; 3] = ["#f4a582", "#92c5de", "#bababa"];
const TERM_LABELS: [&str; 3] = ["∫α0‖δξ‖²", "∫α1‖δξ‖‖δξτ‖", "∫α2‖δξτ‖²"];

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
    log_y: bool,
}

impl Frame {
    fn px(&self, l: f64) -> f64 {
        let (a, b) = self.x;
        MARGIN.0 + (l.log10() - a) / (b - a) * (WIDTH - MARGIN.0 - MARGIN.1)
    }

    fn py(&self, v: f64) -> f64 {
        let (a, b) = self.y;
        let v = if self.log_y { v.log10() } else { v };
        HEIGHT - MARGIN.3 - (v - a) / (b - a) * (HEIGHT - MARGIN.2 - MARGIN.3)
    }
}

fn header(svg: &mut String, title: &str) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{:.2}" y="18" text-anchor="middle" font-size="13">{}</text>"#, (WIDTH - MARGIN.1 + MARGIN.0) / 2.0, escape(title));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes(svg: &mut String, f: &Frame, y_label: &str) {
    let (x0, x1) = (MARGIN.0, WIDTH - MARGIN.1);
    let (y0, y1) = (HEIGHT - MARGIN.3, MARGIN.2);
    let _ = writeln!(svg, r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#, x1 - x0, y0 - y1);
    for e in f.x.0.ceil() as i32..=f.x.1.floor() as i32 {
        let x = f.px(10f64.powi(e));
        let _ = writeln!(svg, r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{e}</text>"#, y0 + 18.0);
    }
    if f.log_y {
        for e in f.y.0.ceil() as i32..=f.y.1.floor() as i32 {
            let y = f.py(10f64.powi(e));
            let _ = writeln!(svg, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0);
            let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"#, x0 - 8.0, y + 4.0);
        }
    } else {
        for k in 0..=4 {
            let v = k as f64 / 4.0;
            let y = f.py(v);
            let _ = writeln!(svg, r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0);
            let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"#, x0 - 8.0, y + 4.0);
        }
    }
    let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">l</text>"#, (x0 + x1) / 2.0, HEIGHT - 12.0);
    let _ = writeln!(svg, r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#, (y0 + y1) / 2.0, (y0 + y1) / 2.0, escape(y_label));
}

fn legend(svg: &mut String, entries: &[(&str, &str, bool)]) {
    let x = WIDTH - MARGIN.1 + 12.0;
    for (i, (label, color, filled)) in entries.iter().enumerate() {
        let y = MARGIN.2 + 10.0 + 18.0 * i as f64;
        if *filled {
            let _ = writeln!(svg, r#"<rect x="{x:.2}" y="{:.2}" width="14" height="10" fill="{color}"/>"#, y - 8.0);
        } else {
            let _ = writeln!(svg, r#"<line x1="{x:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#, y - 3.0, x + 14.0, y - 3.0);
        }
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{y:.2}">{}</text>"#, x + 20.0, escape(label));
    }
}

fn polyline(svg: &mut String, pts: &[(f64, f64)], color: &str) {
    let s: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, s.join(" "));
}

fn band(svg: &mut String, lower: &[(f64, f64)], upper: &[(f64, f64)], color: &str) {
    let s: Vec<String> = upper
        .iter()
        .chain(lower.iter().rev())
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect();
    let _ = writeln!(svg, r#"<polygon points="{}" fill="{color}" stroke="none"/>"#, s.join(" "));
}

fn x_range(rows: &[&SweepRow]) -> (f64, f64) {
    let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r.l), b.max(r.l)));
    let pad = ((hi / lo).log10() * 0.05).max(0.05);
    (lo.log10() - pad, hi.log10() + pad)
}

fn usable(rows: &[SweepRow]) -> Vec<&SweepRow> {
    let mut v: Vec<&SweepRow> = rows.iter().filter(|r| r.ok()).collect();
    v.sort_by(|a, b| b.l.total_cmp(&a.l));
    v
}

/// Error and the three bounds against `l` on log-log axes, with the
/// a posteriori terms stacked below the a posteriori line.
pub fn error_plot_svg(rows: &[SweepRow], title: &str) -> Result<String> {
    let rows = usable(rows);
    if rows.is_empty() {
        return Err(Error::InvalidArgument("no successful rows to plot".into()));
    }
    let values = rows
        .iter()
        .flat_map(|r| [r.error, r.a_posteriori, r.local, r.a_priori])
        .filter(|v| *v > 0.0 && v.is_finite());
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let (lo, hi) = if lo <= hi { (lo.log10().floor(), hi.log10().ceil()) } else { (-1.0, 0.0) };
    let f = Frame { x: x_range(&rows), y: (lo, hi.max(lo + 1.0)), log_y: true };
    let floor = 10f64.powf(f.y.0);
    let mut svg = String::new();
    header(&mut svg, title);

    // stacked terms, bottom to top: α2, α1, α0
    let mut lower: Vec<(f64, f64)> = rows.iter().map(|r| (f.px(r.l), f.py(floor))).collect();
    let mut acc = vec![0.0; rows.len()];
    for k in [2, 1, 0] {
        for (a, r) in acc.iter_mut().zip(&rows) {
            *a += r.a_posteriori_terms[k];
        }
        let upper: Vec<(f64, f64)> = rows.iter().zip(&acc).map(|(r, a)| (f.px(r.l), f.py(a.max(floor)))).collect();
        band(&mut svg, &lower, &upper, TERM_COLORS[k]);
        lower = upper;
    }
    let line = |s: fn(&SweepRow) -> f64| -> Vec<(f64, f64)> {
        rows.iter().filter(|r| s(r) > 0.0).map(|r| (f.px(r.l), f.py(s(r)))).collect()
    };
    polyline(&mut svg, &line(|r| r.a_posteriori), "#404040");
    polyline(&mut svg, &line(|r| r.local), "#7b3294");
    polyline(&mut svg, &line(|r| r.a_priori), "#ca0020");
    for r in rows.iter().filter(|r| r.error > 0.0) {
        let _ = writeln!(svg, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#0571b0"/>"##, f.px(r.l), f.py(r.error));
    }
    axes(&mut svg, &f, "travel time difference");
    legend(
        &mut svg,
        &[
            ("a priori", "#ca0020", false),
            ("local", "#7b3294", false),
            ("a posteriori", "#404040", false),
            (TERM_LABELS[0], TERM_COLORS[0], true),
            (TERM_LABELS[1], TERM_COLORS[1], true),
            (TERM_LABELS[2], TERM_COLORS[2], true),
            ("error", "#0571b0", true),
        ],
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Stacked shares of the three a posteriori terms over the retained rows.
pub fn share_plot_svg(rows: &[SweepRow], title: &str) -> Result<String> {
    let rows = retained(rows);
    if rows.is_empty() {
        return Err(Error::InvalidArgument("no retained rows to plot".into()));
    }
    let f = Frame { x: x_range(&rows), y: (0.0, 1.0), log_y: false };
    let mut svg = String::new();
    header(&mut svg, title);
    let mut lower: Vec<(f64, f64)> = rows.iter().map(|r| (f.px(r.l), f.py(0.0))).collect();
    let mut acc = vec![0.0; rows.len()];
    for k in [2, 1, 0] {
        for (a, r) in acc.iter_mut().zip(&rows) {
            *a += term_shares(r)[k];
        }
        let upper: Vec<(f64, f64)> = rows.iter().zip(&acc).map(|(r, a)| (f.px(r.l), f.py(*a))).collect();
        band(&mut svg, &lower, &upper, TERM_COLORS[k]);
        lower = upper;
    }
    axes(&mut svg, &f, "share of a posteriori bound");
    legend(
        &mut svg,
        &[
            (TERM_LABELS[0], TERM_COLORS[0], true),
            (TERM_LABELS[1], TERM_COLORS[1], true),
            (TERM_LABELS[2], TERM_COLORS[2], true),
        ],
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}
