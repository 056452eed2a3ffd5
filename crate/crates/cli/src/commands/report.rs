//! `report`: plain-text summary and SVG charts rendered from the meta CSVs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::meta::{CD_FILE, CD_SIDECAR, IMPACT_FILE, SUMMARY_FILE};
use super::Context;
use crate::error::{CliError, CliResult};
use crate::output::{write_atomic, Manifest};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#9c755f",
];

fn read_rows(path: &Path) -> CliResult<Vec<Vec<String>>> {
    let f = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(f);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(cfml_core::Error::from)?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok(rows)
}

fn num(s: &str, path: &Path) -> CliResult<f64> {
    s.parse()
        .map_err(|_| CliError::Runtime(format!("{}: `{s}` is not a number", path.display())))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn svg_open(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    s
}

/// Mean tau per approach with one-sd whiskers.
fn scores_svg(rows: &[(String, f64, f64)]) -> String {
    let mut s = svg_open("LOOCV Kendall tau (mean +- sd)");
    let (lo, hi) = (-1.0, 1.0);
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let y = |v: f64| MARGIN + (hi - v.clamp(lo, hi)) / (hi - lo) * plot_h;
    let _ = writeln!(
        s,
        r##"<line x1="{MARGIN}" y1="{0}" x2="{1}" y2="{0}" stroke="#888"/>"##,
        y(0.0),
        WIDTH - MARGIN
    );
    for v in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{v}</text>"#,
            MARGIN - 6.0,
            y(v) + 4.0
        );
    }
    let slot = (WIDTH - 2.0 * MARGIN) / rows.len().max(1) as f64;
    for (i, (label, mean, sd)) in rows.iter().enumerate() {
        let x = MARGIN + slot * i as f64 + slot * 0.15;
        let w = slot * 0.7;
        let (top, bottom) = if *mean >= 0.0 {
            (y(*mean), y(0.0))
        } else {
            (y(0.0), y(*mean))
        };
        let cx = x + w / 2.0;
        let _ = writeln!(
            s,
            r#"<rect x="{x:.1}" y="{top:.1}" width="{w:.1}" height="{:.1}" fill="{}"/>"#,
            bottom - top,
            PALETTE[i % PALETTE.len()]
        );
        let _ = writeln!(
            s,
            r#"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="black"/>"#,
            y(mean + sd),
            y(mean - sd)
        );
        let _ = writeln!(
            s,
            r#"<text x="{cx:.1}" y="{}" text-anchor="middle">{}</text>"#,
            HEIGHT - MARGIN + 16.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// One polyline per approach over thresholds `1..=|A|`.
fn impact_svg(curves: &BTreeMap<String, Vec<f64>>, measure_hint: &str) -> String {
    let mut s = svg_open(&format!("Baselevel impact ({measure_hint})"));
    let all: Vec<f64> = curves.values().flatten().copied().collect();
    let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    };
    let n = curves.values().map(Vec::len).max().unwrap_or(1).max(2);
    let x = |t: usize| MARGIN + (t as f64) / (n - 1) as f64 * (WIDTH - 3.0 * MARGIN);
    let y = |v: f64| MARGIN + (hi - v) / (hi - lo) * (HEIGHT - 2.0 * MARGIN);
    for t in 0..n {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#,
            x(t),
            HEIGHT - MARGIN + 16.0,
            t + 1
        );
    }
    for v in [lo, (lo + hi) / 2.0, hi] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{v:.3}</text>"#,
            MARGIN - 6.0,
            y(v) + 4.0
        );
    }
    for (i, (label, curve)) in curves.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = curve
            .iter()
            .enumerate()
            .map(|(t, v)| format!("{:.1},{:.1}", x(t), y(*v)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="2"/>"#,
            points.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{colour}">{}</text>"#,
            WIDTH - 2.0 * MARGIN + 8.0,
            MARGIN + 14.0 * i as f64,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Average ranks on a rank axis with the critical difference as a bar.
fn cd_svg(ranks: &[(String, f64)], cd: f64) -> String {
    let mut s = svg_open(&format!("Average rank (CD = {cd:.3})"));
    let k = ranks.len().max(2) as f64;
    let x = |r: f64| MARGIN + (r - 1.0) / (k - 1.0) * (WIDTH - 2.0 * MARGIN);
    let axis_y = MARGIN + 30.0;
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN}" y1="{axis_y}" x2="{}" y2="{axis_y}" stroke="black"/>"#,
        WIDTH - MARGIN
    );
    for r in 1..=ranks.len().max(2) {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{r}</text>"#,
            x(r as f64),
            axis_y - 8.0
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{:.1}" y1="{}" x2="{:.1}" y2="{}" stroke="red" stroke-width="3"/>"#,
        x(1.0),
        axis_y - 24.0,
        x(1.0 + cd),
        axis_y - 24.0
    );
    for (i, (label, r)) in ranks.iter().enumerate() {
        let ly = axis_y + 24.0 + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r##"<polyline points="{0:.1},{axis_y} {0:.1},{ly} {1:.1},{ly}" fill="none" stroke="#444"/>"##,
            x(*r),
            x(*r) + 12.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}">{} ({r:.2})</text>"#,
            x(*r) + 16.0,
            ly + 4.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Renders every chart whose source CSV exists in `out`; returns the written paths.
pub fn render(out: &Path) -> CliResult<Vec<PathBuf>> {
    let mut written = Vec::new();
    let summary_path = out.join(SUMMARY_FILE);
    let summary = read_rows(&summary_path)?;
    let many_sets = summary
        .iter()
        .map(|r| &r[0])
        .collect::<std::collections::BTreeSet<_>>()
        .len()
        > 1;
    let mut bars = Vec::new();
    for r in &summary {
        let label = if many_sets {
            format!("{}.{}", r[0], r[1])
        } else {
            r[1].clone()
        };
        bars.push((
            label,
            num(&r[2], &summary_path)?,
            num(&r[3], &summary_path)?,
        ));
    }
    let p = out.join("scores.svg");
    write_atomic(&p, scores_svg(&bars).as_bytes())?;
    written.push(p);

    let impact_path = out.join(IMPACT_FILE);
    if impact_path.exists() {
        let mut curves: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for r in read_rows(&impact_path)? {
            let label = if r[0] == r[1] {
                r[0].clone()
            } else {
                format!("{}.{}", r[0], r[1])
            };
            curves
                .entry(label)
                .or_default()
                .push(num(&r[3], &impact_path)?);
        }
        let p = out.join("impact.svg");
        write_atomic(&p, impact_svg(&curves, "mean best-so-far").as_bytes())?;
        written.push(p);
    }

    let cd_path = out.join(CD_FILE);
    let sidecar = out.join(CD_SIDECAR);
    if cd_path.exists() && sidecar.exists() {
        let text = fs::read_to_string(&sidecar).map_err(|e| CliError::io(&sidecar, e))?;
        let cd = text
            .lines()
            .find_map(|l| l.strip_prefix("cd="))
            .ok_or_else(|| CliError::Runtime(format!("{}: no `cd=` line", sidecar.display())))?;
        let cd = num(cd, &sidecar)?;
        let mut ranks = Vec::new();
        for r in read_rows(&cd_path)? {
            ranks.push((r[0].clone(), num(&r[1], &cd_path)?));
        }
        let p = out.join("cd.svg");
        write_atomic(&p, cd_svg(&ranks, cd).as_bytes())?;
        written.push(p);
    }
    Ok(written)
}

pub fn report(ctx: &Context) -> CliResult<()> {
    let out = ctx.out();
    let summary_path = out.join(SUMMARY_FILE);
    if ctx.dry_run {
        println!("report from {}", out.display());
        return Ok(());
    }
    let summary = read_rows(&summary_path)?;
    println!(
        "{:<6} {:<8} {:>8} {:>8}  hyperparameters",
        "set", "learner", "mean", "sd"
    );
    for r in &summary {
        let mean = num(&r[2], &summary_path)?;
        let sd = num(&r[3], &summary_path)?;
        println!("{:<6} {:<8} {mean:>8.4} {sd:>8.4}  {}", r[0], r[1], r[4]);
    }
    let sidecar = out.join(CD_SIDECAR);
    if let Ok(text) = fs::read_to_string(&sidecar) {
        println!("{}", text.trim_end().replace('\n', "  "));
    }
    let mut manifest = Manifest::new("report", ctx.cfg.seed, ctx.config_path.as_deref())?;
    manifest.input(&summary_path)?;
    for p in render(out)? {
        manifest.output(&p)?;
    }
    manifest.write(out)?;
    Ok(())
}
