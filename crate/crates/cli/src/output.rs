//! CSV and SVG rendering, and the all-or-nothing file writer.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// A rendered output held in memory until the whole job has succeeded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: Vec<u8>,
}

impl OutputFile {
    pub fn new(name: impl Into<String>, contents: impl Into<Vec<u8>>) -> Self {
        OutputFile {
            name: name.into(),
            contents: contents.into(),
        }
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(&self.contents))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Ordered `# key = value` header lines.
pub type Metadata = Vec<(String, String)>;

/// Fixed-width scientific notation so outputs are byte-stable.
pub fn number(x: f64) -> String {
    if x == 0.0 {
        // Avoid "-0" in the output.
        return format!("{:.12e}", 0.0);
    }
    format!("{x:.12e}")
}

fn header(out: &mut String, meta: &Metadata) {
    for (k, v) in meta {
        let _ = writeln!(out, "# {k} = {v}");
    }
}

/// Scales `values` so the largest magnitude is 1. Returns the divisor (1 if all zero).
pub fn normalize(values: &[f64]) -> (Vec<f64>, f64) {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if peak > 0.0 { peak } else { 1.0 };
    (values.iter().map(|v| v / scale).collect(), scale)
}

pub fn spectrum_1d_csv(meta: &Metadata, omega: &[f64], intensity: &[f64]) -> String {
    let mut out = String::new();
    header(&mut out, meta);
    out.push_str("omega_cm,intensity\n");
    for (w, y) in omega.iter().zip(intensity) {
        let _ = writeln!(out, "{},{}", number(*w), number(*y));
    }
    out
}

/// Long format, row-major in ω₁.
pub fn spectrum_2d_csv(meta: &Metadata, omega1: &[f64], omega3: &[f64], values: &[f64]) -> String {
    let mut out = String::new();
    header(&mut out, meta);
    out.push_str("omega1_cm,omega3_cm,value\n");
    for (i, w1) in omega1.iter().enumerate() {
        for (k, w3) in omega3.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{}",
                number(*w1),
                number(*w3),
                number(values[i * omega3.len() + k])
            );
        }
    }
    out
}

pub fn envelope_csv(meta: &Metadata, tau: &[f64], linear: &[f64], nonrephasing: &[f64]) -> String {
    let mut out = String::new();
    header(&mut out, meta);
    out.push_str("tau_ps,linear_abs,nonrephasing_abs\n");
    for i in 0..tau.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            number(tau[i]),
            number(linear[i]),
            number(nonrephasing[i])
        );
    }
    out
}

/// Blue-white-red map of v ∈ [−1, 1].
fn diverging(v: f64) -> (u8, u8, u8) {
    let t = v.clamp(-1.0, 1.0);
    let fade = |c: f64, a: f64| (255.0 + (c - 255.0) * a).round() as u8;
    if t < 0.0 {
        (fade(33.0, -t), fade(102.0, -t), fade(172.0, -t))
    } else {
        (fade(178.0, t), fade(24.0, t), fade(43.0, t))
    }
}

const PLOT: f64 = 400.0;
const MARGIN: f64 = 60.0;

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * span {
        out.push((t * 1e6).round() / 1e6);
        t += step;
    }
    out
}

fn axes(out: &mut String, x: (f64, f64), y: (f64, f64), xlabel: &str, ylabel: &str, title: &str) {
    let px = |v: f64| MARGIN + (v - x.0) / (x.1 - x.0) * PLOT;
    let py = |v: f64| MARGIN + PLOT - (v - y.0) / (y.1 - y.0) * PLOT;
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{PLOT}" height="{PLOT}" fill="none" stroke="black"/>"#
    );
    for t in ticks(x.0, x.1) {
        let _ = writeln!(
            out,
            r#"<line x1="{0:.2}" y1="{1}" x2="{0:.2}" y2="{2}" stroke="black"/><text x="{0:.2}" y="{3}" font-size="11" text-anchor="middle">{4}</text>"#,
            px(t),
            MARGIN + PLOT,
            MARGIN + PLOT + 5.0,
            MARGIN + PLOT + 18.0,
            t
        );
    }
    for t in ticks(y.0, y.1) {
        let _ = writeln!(
            out,
            r#"<line x1="{1}" y1="{0:.2}" x2="{2}" y2="{0:.2}" stroke="black"/><text x="{3}" y="{0:.2}" font-size="11" text-anchor="end" dominant-baseline="middle">{4}</text>"#,
            py(t),
            MARGIN - 5.0,
            MARGIN,
            MARGIN - 8.0,
            t
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">{xlabel}</text>"#,
        MARGIN + PLOT / 2.0,
        MARGIN + PLOT + 40.0
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{0}" font-size="13" text-anchor="middle" transform="rotate(-90 16 {0})">{ylabel}</text>"#,
        MARGIN + PLOT / 2.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="30" font-size="14" text-anchor="middle">{title}</text>"#,
        MARGIN + PLOT / 2.0
    );
}

fn svg_open(out: &mut String) {
    let size = PLOT + 2.0 * MARGIN;
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

/// Heatmap of a normalized surface, ω₁ horizontal and ω₃ vertical.
pub fn heatmap_svg(title: &str, omega1: &[f64], omega3: &[f64], values: &[f64]) -> String {
    let mut out = String::new();
    svg_open(&mut out);
    let (n1, n3) = (omega1.len(), omega3.len());
    let step1 = if n1 > 1 { omega1[1] - omega1[0] } else { 1.0 };
    let step3 = if n3 > 1 { omega3[1] - omega3[0] } else { 1.0 };
    let x = (omega1[0] - step1 / 2.0, omega1[n1 - 1] + step1 / 2.0);
    let y = (omega3[0] - step3 / 2.0, omega3[n3 - 1] + step3 / 2.0);
    let (cw, ch) = (PLOT / n1 as f64, PLOT / n3 as f64);
    for i in 0..n1 {
        for k in 0..n3 {
            let (r, g, b) = diverging(values[i * n3 + k]);
            let _ = writeln!(
                out,
                r##"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="#{r:02x}{g:02x}{b:02x}"/>"##,
                MARGIN + i as f64 * cw,
                MARGIN + PLOT - (k + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    axes(&mut out, x, y, "ω₁ (cm⁻¹)", "ω₃ (cm⁻¹)", title);
    out.push_str("</svg>\n");
    out
}

/// Overlaid line plots sharing one x axis.
pub fn lines_svg(title: &str, xlabel: &str, series: &[(String, Vec<f64>, Vec<f64>)]) -> String {
    const COLORS: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];
    let mut out = String::new();
    svg_open(&mut out);
    let xs = series.iter().flat_map(|s| s.1.iter().copied());
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let ys = series.iter().flat_map(|s| s.2.iter().copied());
    let (mut y0, mut y1) = ys.fold((0.0f64, 0.0f64), |(a, b), v| (a.min(v), b.max(v)));
    if y1 <= y0 {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    for (idx, (label, x, y)) in series.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        let pts: Vec<String> = x
            .iter()
            .zip(y)
            .map(|(a, b)| {
                format!(
                    "{:.2},{:.2}",
                    MARGIN + (a - x0) / (x1 - x0) * PLOT,
                    MARGIN + PLOT - (b - y0) / (y1 - y0) * PLOT
                )
            })
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{label}</text>"#,
            MARGIN + 8.0,
            MARGIN + 16.0 + 14.0 * idx as f64
        );
    }
    axes(&mut out, (x0, x1), (y0, y1), xlabel, "normalized intensity", title);
    out.push_str("</svg>\n");
    out
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes every file or none: contents go to hidden temporaries first and
/// are renamed into place only when all writes succeeded.
pub fn commit(dir: &Path, files: &[OutputFile]) -> Result<Vec<ManifestEntry>, CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut staged: Vec<(PathBuf, PathBuf)> = Vec::new();
    let cleanup = |staged: &[(PathBuf, PathBuf)], renamed: usize| {
        for (i, (tmp, fin)) in staged.iter().enumerate() {
            let _ = fs::remove_file(if i < renamed { fin } else { tmp });
        }
    };
    for f in files {
        let fin = dir.join(&f.name);
        let tmp = dir.join(format!(".{}.partial", f.name));
        if let Err(e) = fs::write(&tmp, &f.contents) {
            let _ = fs::remove_file(&tmp);
            cleanup(&staged, 0);
            return Err(io_err(&tmp)(e));
        }
        staged.push((tmp, fin));
    }
    for i in 0..staged.len() {
        if let Err(e) = fs::rename(&staged[i].0, &staged[i].1) {
            cleanup(&staged, i);
            return Err(io_err(&staged[i].1)(e));
        }
    }
    Ok(files
        .iter()
        .map(|f| ManifestEntry {
            path: f.name.clone(),
            bytes: f.contents.len(),
            sha256: f.sha256(),
        })
        .collect())
}
