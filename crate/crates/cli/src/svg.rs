//! Static σ_min portrait: log-scaled colour cells, strip guide lines, eigenvalue dots.

use num_complex::Complex64;
use ostrovsky_core::PseudospectrumField;
use std::fmt::Write as _;

/// Ten fixed steps from dark (small σ_min) to light.
pub const PALETTE: [&str; 10] = [
    "#440154", "#482878", "#3e4989", "#31688e", "#26828e", "#1f9e89", "#35b779", "#6ece58", "#b5de2b", "#fde725",
];

const PLOT_W: f64 = 480.0;
const PLOT_H: f64 = 600.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 40.0;
const LEGEND_W: f64 = 170.0;

/// Bin index of log10(σ) between the field's extreme values.
fn bin(log_s: f64, lo: f64, hi: f64) -> usize {
    if hi <= lo {
        return 0;
    }
    (((log_s - lo) / (hi - lo) * 10.0).floor().max(0.0) as usize).min(9)
}

fn spacing(v: &[f64]) -> f64 {
    if v.len() > 1 { v[1] - v[0] } else { 1.0 }
}

pub fn portrait(field: &PseudospectrumField, guides: &[f64], eigenvalues: &[Complex64], title: &str) -> String {
    let (re0, re1) = (field.re_grid[0], *field.re_grid.last().unwrap_or(&field.re_grid[0]));
    let (im0, im1) = (field.im_grid[0], *field.im_grid.last().unwrap_or(&field.im_grid[0]));
    let (dre, dim) = (spacing(&field.re_grid), spacing(&field.im_grid));
    // the cells are centred on the grid points, so the frame is half a cell wider
    let (xa, xb) = (re0 - 0.5 * dre, re1 + 0.5 * dre);
    let (ya, yb) = (im0 - 0.5 * dim, im1 + 0.5 * dim);
    let x = |re: f64| LEFT + (re - xa) / (xb - xa) * PLOT_W;
    let y = |im: f64| TOP + (yb - im) / (yb - ya) * PLOT_H;
    let logs: Vec<f64> = field.sigma_min.iter().map(|s| s.max(1e-300).log10()).collect();
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let width = LEFT + PLOT_W + LEGEND_W;
    let height = TOP + PLOT_H + 60.0;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="24" font-size="14">{}</text>"#, LEFT, escape(title));
    let cw = PLOT_W / field.re_grid.len() as f64;
    let ch = PLOT_H / field.im_grid.len() as f64;
    let _ = writeln!(s, r#"<g id="field" shape-rendering="crispEdges">"#);
    let nre = field.re_grid.len();
    for (k, &l) in logs.iter().enumerate() {
        let (i, j) = (k / nre, k % nre);
        let cx = x(field.re_grid[j]) - 0.5 * cw;
        let cy = y(field.im_grid[i]) - 0.5 * ch;
        let _ = writeln!(s, r#"<rect x="{cx:.2}" y="{cy:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#, cw + 0.05, ch + 0.05, PALETTE[bin(l, lo, hi)]);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g id="guides" stroke="#e41a1c" stroke-width="2" stroke-dasharray="6,4">"##);
    for &g in guides.iter().filter(|g| **g >= xa && **g <= xb) {
        let _ = writeln!(s, r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}"/>"#, x(g), TOP, TOP + PLOT_H);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r##"<g id="eigenvalues" fill="white" stroke="#000000" stroke-width="0.5">"##);
    for l in eigenvalues.iter().filter(|l| l.re >= xa && l.re <= xb && l.im >= ya && l.im <= yb) {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2"/>"#, x(l.re), y(l.im));
    }
    let _ = writeln!(s, "</g>");
    // frame and ticks
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{PLOT_W}" height="{PLOT_H}" fill="none" stroke="black"/>"#);
    for k in 0..=4 {
        let re = xa + (xb - xa) * k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{re:.2}</text>"#, x(re), TOP + PLOT_H + 18.0);
        let im = ya + (yb - ya) * k as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{im:.2}</text>"#, LEFT - 6.0, y(im) + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Re λ</text>"#, LEFT + 0.5 * PLOT_W, TOP + PLOT_H + 40.0);
    let _ = writeln!(s, r#"<text x="16" y="{:.2}" transform="rotate(-90 16 {0:.2})" text-anchor="middle">Im λ</text>"#, TOP + 0.5 * PLOT_H);
    // legend: bin edges in log10 σ_min
    let lx = LEFT + PLOT_W + 20.0;
    let _ = writeln!(s, r#"<text x="{lx:.2}" y="{:.2}">log10 σ_min</text>"#, TOP + 10.0);
    for (k, colour) in PALETTE.iter().enumerate().rev() {
        let row = (9 - k) as f64;
        let ty = TOP + 20.0 + row * 24.0;
        let edge = lo + (hi - lo) * k as f64 / 10.0;
        let _ = writeln!(s, r#"<rect x="{lx:.2}" y="{ty:.2}" width="20" height="20" fill="{colour}"/>"#);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">≥ {edge:.2}</text>"#, lx + 28.0, ty + 14.0);
    }
    let _ = writeln!(s, "</svg>");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
