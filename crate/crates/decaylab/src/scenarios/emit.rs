//! Artifact emission: the diagnostic CSV and a small self-contained SVG
//! chart (norm history with fit overlay, energies, identity residuals).
//! Both renderers are pure functions of their inputs with fixed float
//! formatting, so identical runs emit identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::functionals::{DiagnosticSeries, CSV_COLUMNS};
use crate::ratefit::FitModel;
use crate::Result;

use super::ScenarioReport;

/// Render the diagnostic table as CSV: the canonical header, one row per
/// sample. Floats use shortest round-trip formatting, so the text carries
/// the exact binary values.
pub fn csv_string(series: &DiagnosticSeries) -> String {
    let mut out = String::with_capacity(series.samples.len() * 220 + 256);
    out.push_str(&CSV_COLUMNS.join(","));
    out.push('\n');
    for s in &series.samples {
        for (i, v) in s.csv_values().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{v}").expect("writing to a String cannot fail");
        }
        out.push('\n');
    }
    out
}

pub fn emit_csv(series: &DiagnosticSeries, path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(series))?;
    Ok(())
}

pub fn emit_svg(report: &ScenarioReport, series: &DiagnosticSeries, path: &Path) -> Result<()> {
    std::fs::write(path, svg_string(report, series))?;
    Ok(())
}

const SVG_W: f64 = 720.0;
const SVG_H: f64 = 700.0;
const PANEL_X: f64 = 64.0;
const PANEL_W: f64 = 624.0;
const PANEL_H: f64 = 170.0;
const HEADER_H: f64 = 58.0;
const PANEL_GAP: f64 = 44.0;

struct Curve {
    label: &'static str,
    color: &'static str,
    dashed: bool,
    /// Raw (x, y) pairs; log panels silently drop nonpositive entries.
    pts: Vec<(f64, f64)>,
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Compact deterministic tick label.
fn tick(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        let a = x.abs();
        if (1e-3..1e4).contains(&a) {
            format!("{x:.3}")
        } else {
            format!("{x:.2e}")
        }
    }
}

fn draw_panel(
    out: &mut String,
    y_top: f64,
    caption: &str,
    curves: &[Curve],
    xlog: bool,
    ylog: bool,
) {
    write!(
        out,
        "<rect x=\"{PANEL_X:.2}\" y=\"{y_top:.2}\" width=\"{PANEL_W:.2}\" \
         height=\"{PANEL_H:.2}\" fill=\"none\" stroke=\"#999999\"/>\n"
    )
    .unwrap();
    write!(
        out,
        "<text x=\"{PANEL_X:.2}\" y=\"{:.2}\" font-family=\"monospace\" \
         font-size=\"12\" fill=\"#222222\">{}</text>\n",
        y_top - 8.0,
        xml_escape(caption)
    )
    .unwrap();
    // legend, right-aligned along the caption line
    let mut legend_x = PANEL_X + PANEL_W;
    for c in curves.iter().rev() {
        write!(
            out,
            "<text x=\"{legend_x:.2}\" y=\"{:.2}\" font-family=\"monospace\" \
             font-size=\"11\" fill=\"{}\" text-anchor=\"end\">{}</text>\n",
            y_top - 8.0,
            c.color,
            xml_escape(c.label)
        )
        .unwrap();
        legend_x -= 12.0 + 7.0 * c.label.len() as f64;
    }
    let transform = |&(x, y): &(f64, f64)| -> Option<(f64, f64)> {
        let tx = if xlog {
            if x > 0.0 {
                x.ln()
            } else {
                return None;
            }
        } else {
            x
        };
        let ty = if ylog {
            if y > 0.0 {
                y.ln()
            } else {
                return None;
            }
        } else {
            y
        };
        Some((tx, ty))
    };
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    let mut n_pts = 0usize;
    for c in curves {
        for p in c.pts.iter().filter_map(transform) {
            xmin = xmin.min(p.0);
            xmax = xmax.max(p.0);
            ymin = ymin.min(p.1);
            ymax = ymax.max(p.1);
            n_pts += 1;
        }
    }
    if n_pts < 2 {
        write!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"12\" \
             fill=\"#777777\" text-anchor=\"middle\">no positive samples to plot</text>\n",
            PANEL_X + PANEL_W / 2.0,
            y_top + PANEL_H / 2.0
        )
        .unwrap();
        return;
    }
    if xmax - xmin < 1e-12 {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if ymax - ymin < 1e-12 {
        ymin -= 0.5;
        ymax += 0.5;
    }
    let px = |x: f64| PANEL_X + (x - xmin) / (xmax - xmin) * PANEL_W;
    let py = |y: f64| y_top + PANEL_H - (y - ymin) / (ymax - ymin) * PANEL_H;
    for c in curves {
        let mut points = String::new();
        for (tx, ty) in c.pts.iter().filter_map(transform) {
            if !points.is_empty() {
                points.push(' ');
            }
            write!(points, "{:.2},{:.2}", px(tx), py(ty)).unwrap();
        }
        if points.is_empty() {
            continue;
        }
        let dash = if c.dashed { " stroke-dasharray=\"6 4\"" } else { "" };
        write!(
            out,
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.3\"{dash} \
             points=\"{points}\"/>\n",
            c.color
        )
        .unwrap();
    }
    // corner tick labels, in raw units
    let back = |v: f64, log: bool| if log { v.exp() } else { v };
    let labels = [
        (PANEL_X, y_top + PANEL_H + 14.0, "start", tick(back(xmin, xlog))),
        (PANEL_X + PANEL_W, y_top + PANEL_H + 14.0, "end", tick(back(xmax, xlog))),
        (PANEL_X - 6.0, y_top + 10.0, "end", tick(back(ymax, ylog))),
        (PANEL_X - 6.0, y_top + PANEL_H, "end", tick(back(ymin, ylog))),
    ];
    for (x, y, anchor, text) in labels {
        write!(
            out,
            "<text x=\"{x:.2}\" y=\"{y:.2}\" font-family=\"monospace\" font-size=\"10\" \
             fill=\"#555555\" text-anchor=\"{anchor}\">{text}</text>\n"
        )
        .unwrap();
    }
}

/// If the report carries a fit or bound on the `l2_u_sq` column, build a
/// dashed overlay in field-norm units over the fit window.
fn norm_overlay(report: &ScenarioReport, t_end: f64) -> Option<Curve> {
    for c in &report.checks {
        if !c.name.contains("l2_u_sq") {
            continue;
        }
        let sqrted = c.name.contains("(sqrt ");
        if let Some(fit) = &c.fit {
            let eval: Box<dyn Fn(f64) -> f64> = match fit.model {
                FitModel::Power => {
                    let (a, b) = if sqrted {
                        (fit.prefactor, fit.exponent)
                    } else {
                        (fit.prefactor.sqrt(), 0.5 * fit.exponent)
                    };
                    if !(a > 0.0) {
                        continue;
                    }
                    Box::new(move |t: f64| a * t.powf(b))
                }
                FitModel::Sqrtlog if sqrted => {
                    let a = fit.prefactor;
                    if !(a > 0.0) {
                        continue;
                    }
                    Box::new(move |t: f64| a * t.ln().max(0.0).sqrt())
                }
                _ => continue,
            };
            let (t0, t1) = fit.window;
            let t1 = t1.min(t_end);
            if !(t1 > t0 && t0 > 0.0) {
                continue;
            }
            let pts = (0..=32)
                .map(|i| {
                    let t = (t0.ln() + (t1.ln() - t0.ln()) * i as f64 / 32.0).exp();
                    (t, eval(t))
                })
                .collect();
            return Some(Curve { label: "fit", color: "#555555", dashed: true, pts });
        }
        if let Some(bound) = &c.bound {
            let sup = if sqrted { bound.sup } else { bound.sup.max(0.0).sqrt() };
            if !(sup > 0.0) {
                continue;
            }
            let (t0, t1) = bound.window;
            return Some(Curve {
                label: "sup",
                color: "#555555",
                dashed: true,
                pts: vec![(t0, sup), (t1.min(t_end), sup)],
            });
        }
    }
    None
}

/// Render the run as a three-panel SVG: field norm on log-log axes with
/// the fitted law overlaid, energy and weighted energy, and the two
/// identity residuals.
pub fn svg_string(report: &ScenarioReport, series: &DiagnosticSeries) -> String {
    let mut out = String::with_capacity(64 * 1024);
    write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W:.0}\" \
         height=\"{SVG_H:.0}\" viewBox=\"0 0 {SVG_W:.0} {SVG_H:.0}\">\n"
    )
    .unwrap();
    write!(out, "<rect width=\"{SVG_W:.0}\" height=\"{SVG_H:.0}\" fill=\"#ffffff\"/>\n").unwrap();
    write!(
        out,
        "<text x=\"16\" y=\"22\" font-family=\"monospace\" font-size=\"14\" \
         fill=\"#111111\">{} [{}]</text>\n",
        xml_escape(&report.id),
        report.outcome
    )
    .unwrap();
    let title_line = format!(
        "{} | dt {:.5}, horizon {}, grid {}^{} on [-{}, {}]",
        report.config.title,
        series.dt,
        report.config.horizon,
        report.config.grid.points_per_axis,
        report.config.grid.dim,
        report.config.grid.half_width,
        report.config.grid.half_width
    );
    write!(
        out,
        "<text x=\"16\" y=\"40\" font-family=\"monospace\" font-size=\"11\" \
         fill=\"#444444\">{}</text>\n",
        xml_escape(&title_line)
    )
    .unwrap();

    let t_end = series.samples.last().map_or(0.0, |s| s.t);
    let norm: Vec<(f64, f64)> =
        series.samples.iter().map(|s| (s.t, s.l2_u_sq.max(0.0).sqrt())).collect();
    let mut panel_a = vec![Curve { label: "|u(t)|", color: "#1f6fb4", dashed: false, pts: norm }];
    if let Some(overlay) = norm_overlay(report, t_end) {
        panel_a.push(overlay);
    }
    let y0 = HEADER_H + 16.0;
    draw_panel(&mut out, y0, "field norm, log-log", &panel_a, true, true);

    let energy: Vec<(f64, f64)> = series.samples.iter().map(|s| (s.t, s.energy)).collect();
    let weighted: Vec<(f64, f64)> =
        series.samples.iter().map(|s| (s.t, s.weighted_energy)).collect();
    let panel_b = vec![
        Curve { label: "E(t)", color: "#b44a1f", dashed: false, pts: energy },
        Curve { label: "(1+t)^2 E", color: "#3a8f3a", dashed: false, pts: weighted },
    ];
    let y1 = y0 + PANEL_H + PANEL_GAP;
    draw_panel(&mut out, y1, "energy and weighted energy, log-log", &panel_b, true, true);

    let v_res: Vec<(f64, f64)> =
        series.samples.iter().map(|s| (s.t, s.v_residual.abs())).collect();
    let e_res: Vec<(f64, f64)> =
        series.samples.iter().map(|s| (s.t, s.energy_residual.abs())).collect();
    let panel_c = vec![
        Curve { label: "|v ident|", color: "#6a4ab4", dashed: false, pts: v_res },
        Curve { label: "|E ident|", color: "#b49a1f", dashed: false, pts: e_res },
    ];
    let y2 = y1 + PANEL_H + PANEL_GAP;
    draw_panel(&mut out, y2, "identity residuals, log y", &panel_c, false, true);

    out.push_str("</svg>\n");
    out
}
