//! Report files: a tidy CSV of every trial, a summary CSV, one SVG chart per
//! EDP (mean error against CR on a log axis, one line per method with
//! +/- one standard deviation bars), and the report metadata as JSON.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use edpfill_core::data::EdpKind;

use crate::config::Method;
use crate::error::{Error, Result};
use crate::experiment::{summarize, ErrorReport, Stats, TrialError};

pub const TIDY_FILE: &str = "tidy.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const REPORT_FILE: &str = "report.json";

pub fn chart_file(kind: EdpKind) -> String {
    format!("error_{}.svg", kind.tag())
}

pub fn write_tidy(raw: &[TrialError], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    w.write_record(["edp", "method", "cr", "trial", "error"]).map_err(|e| Error::csv(path, e))?;
    for r in raw {
        w.write_record([
            r.edp.tag().to_string(),
            r.method.tag().to_string(),
            r.cr.to_string(),
            r.trial.to_string(),
            r.error.to_string(),
        ])
        .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_tidy(path: &Path) -> Result<Vec<TrialError>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let mut out = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        if rec.len() != 5 {
            return Err(Error::parse(path, line, "expected edp,method,cr,trial,error"));
        }
        let bad = |what: &str, v: &str| Error::parse(path, line, format!("bad {what} `{v}`"));
        out.push(TrialError {
            edp: EdpKind::from_tag(&rec[0]).ok_or_else(|| bad("edp", &rec[0]))?,
            method: Method::from_tag(&rec[1]).ok_or_else(|| bad("method", &rec[1]))?,
            cr: rec[2].parse().map_err(|_| bad("cr", &rec[2]))?,
            trial: rec[3].parse().map_err(|_| bad("trial", &rec[3]))?,
            error: rec[4].parse().map_err(|_| bad("error", &rec[4]))?,
        });
    }
    Ok(out)
}

pub fn write_summary(summary: &[(EdpKind, Method, f64, Stats)], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    w.write_record(["edp", "method", "cr", "trials", "mean", "std", "min", "max"])
        .map_err(|e| Error::csv(path, e))?;
    for (edp, method, cr, s) in summary {
        w.write_record([
            edp.tag().to_string(),
            method.tag().to_string(),
            cr.to_string(),
            s.trials.to_string(),
            s.mean.to_string(),
            s.std.to_string(),
            s.min.to_string(),
            s.max.to_string(),
        ])
        .map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];
const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;

/// SVG line chart of mean error vs CR for one EDP.
pub fn chart_svg(kind: EdpKind, summary: &[(EdpKind, Method, f64, Stats)]) -> String {
    let rows: Vec<_> = summary.iter().filter(|r| r.0 == kind).collect();
    let mut methods: Vec<Method> = Vec::new();
    let mut crs: Vec<f64> = Vec::new();
    for r in &rows {
        if !methods.contains(&r.1) {
            methods.push(r.1);
        }
        if !crs.contains(&r.2) {
            crs.push(r.2);
        }
    }
    crs.sort_by(f64::total_cmp);

    // Log axis over the positive part of mean +/- std, padded to decades.
    let positive: Vec<f64> = rows
        .iter()
        .flat_map(|r| [r.3.mean - r.3.std, r.3.mean, r.3.mean + r.3.std])
        .filter(|v| *v > 0.0 && v.is_finite())
        .collect();
    let lo = positive.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = positive.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (dlo, dhi) = if lo.is_finite() {
        let a = lo.log10().floor();
        let b = hi.log10().ceil();
        (a, if b > a { b } else { a + 1.0 })
    } else {
        (-3.0, 0.0)
    };
    let floor = 10f64.powf(dlo);
    let (xlo, xhi) = match (crs.first(), crs.last()) {
        (Some(a), Some(b)) if b > a => (*a, *b),
        (Some(a), _) => (a - 0.05, a + 0.05),
        _ => (0.0, 1.0),
    };
    let px = |x: f64| LEFT + (x - xlo) / (xhi - xlo) * (W - LEFT - RIGHT);
    let py = |y: f64| {
        let v = y.max(floor).log10();
        TOP + (dhi - v) / (dhi - dlo) * (H - TOP - BOTTOM)
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}: mean relative error on unobserved cells</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        kind.tag()
    );
    let (x0, x1, y0, y1) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(s, r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y1 - y0);
    let mut d = dlo;
    while d <= dhi + 1e-9 {
        let y = py(10f64.powf(d));
        let _ = writeln!(s, r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#dddddd"/>"##);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{}</text>"#, x0 - 6.0, y + 4.0, d as i64);
        d += 1.0;
    }
    for &cr in &crs {
        let x = px(cr);
        let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{y1}" x2="{x:.2}" y2="{}" stroke="black"/>"#, y1 + 5.0);
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{cr}</text>"#, y1 + 20.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">compression ratio</text>"#, (x0 + x1) / 2.0, H - 12.0);
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">error (log scale)</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    for (k, method) in methods.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut pts: Vec<(f64, &Stats)> = rows.iter().filter(|r| r.1 == *method).map(|r| (r.2, &r.3)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let _ = writeln!(s, r#"<g class="series" data-method="{}">"#, method.tag());
        let path: Vec<String> = pts.iter().map(|(c, st)| format!("{:.2},{:.2}", px(*c), py(st.mean))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            path.join(" ")
        );
        for (c, st) in &pts {
            let x = px(*c);
            let (ya, yb) = (py(st.mean - st.std), py(st.mean + st.std));
            let _ = writeln!(s, r#"<line class="errorbar" x1="{x:.2}" y1="{ya:.2}" x2="{x:.2}" y2="{yb:.2}" stroke="{color}"/>"#);
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, py(st.mean));
        }
        let _ = writeln!(s, "</g>");
        let ly = TOP + 10.0 + 20.0 * k as f64;
        let _ = writeln!(s, r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, x1 + 12.0, x1 + 36.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, x1 + 42.0, ly + 4.0, method.tag());
    }
    s.push_str("</svg>\n");
    s
}

/// Writes the tidy and summary CSVs, the charts and `report.json` into
/// `out_dir`, returning the paths written.
pub fn emit_report(report: &ErrorReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    let tidy = out_dir.join(TIDY_FILE);
    write_tidy(&report.raw, &tidy)?;
    written.push(tidy);
    written.extend(emit_from_raw(&report.raw, out_dir)?);
    let meta = out_dir.join(REPORT_FILE);
    let json = serde_json::to_string_pretty(report)?;
    fs::write(&meta, json).map_err(|e| Error::io(&meta, e))?;
    written.push(meta);
    Ok(written)
}

/// Summary and charts from raw trial errors (e.g. a tidy CSV read back).
pub fn emit_from_raw(raw: &[TrialError], out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let summary = summarize(raw);
    let mut written = Vec::new();
    let sp = out_dir.join(SUMMARY_FILE);
    write_summary(&summary, &sp)?;
    written.push(sp);
    for kind in EdpKind::ALL {
        if summary.iter().any(|r| r.0 == kind) {
            let p = out_dir.join(chart_file(kind));
            fs::write(&p, chart_svg(kind, &summary)).map_err(|e| Error::io(&p, e))?;
            written.push(p);
        }
    }
    Ok(written)
}
