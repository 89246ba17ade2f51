//! Byte-stable SVG plots of sweep tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::fit::{fit_decay, FitOptions};
use super::sweep::{series, SweepRow};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotKind {
    SurvivalVsDepth,
    DstarVsN,
}

impl std::str::FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "survival-vs-depth" => Ok(PlotKind::SurvivalVsDepth),
            "dstar-vs-n" => Ok(PlotKind::DstarVsN),
            other => Err(Error::InvalidArgument(format!("unknown plot kind `{other}`"))),
        }
    }
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn new(lo: f64, hi: f64, log: bool) -> Self {
        let (lo, hi) = if log {
            (lo.log10().floor(), hi.log10().ceil())
        } else {
            (lo, hi)
        };
        let (lo, hi) = if hi - lo < 1e-12 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        };
        Axis { lo, hi, log }
    }

    fn frac(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (lo, hi) = (self.lo as i32, self.hi as i32);
            let step = ((hi - lo) / 8).max(1);
            (lo..=hi)
                .step_by(step as usize)
                .map(|e| (10f64.powi(e), format!("1e{e}")))
                .collect()
        } else {
            let span = self.hi - self.lo;
            let raw = span / 6.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0]
                .iter()
                .map(|m| m * mag)
                .find(|s| *s >= raw)
                .unwrap_or(10.0 * mag);
            let mut t = (self.lo / step).ceil() * step;
            let mut out = Vec::new();
            while t <= self.hi + step * 1e-9 {
                out.push((t, trim(t)));
                t += step;
            }
            out
        }
    }
}

fn trim(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
    band: Vec<(f64, f64, f64)>,
}

struct Frame {
    x: Axis,
    y: Axis,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + self.x.frac(x) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - self.y.frac(y) * (HEIGHT - TOP - BOTTOM)
    }
}

/// Renders the plot as an SVG document.
pub fn render_plot(rows: &[SweepRow], kind: PlotKind) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("cannot plot an empty table".into()));
    }
    let (all, x_label, y_label, log_x, log_y) = match kind {
        PlotKind::SurvivalVsDepth => (survival_series(rows), "depth", "survival probability", false, true),
        PlotKind::DstarVsN => (dstar_series(rows)?, "n", "fitted d* (eps = 0.01)", true, false),
    };

    let xs = all.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let ys = all.iter().flat_map(|s| {
        s.points
            .iter()
            .map(|p| p.1)
            .chain(s.band.iter().flat_map(|b| [b.1, b.2]))
    });
    let (xlo, xhi) = min_max(xs);
    let (ylo, yhi) = min_max(ys);
    let frame = Frame {
        x: Axis::new(xlo, xhi, log_x),
        y: if log_y {
            Axis::new(ylo, yhi.min(1.0), true)
        } else {
            Axis::new(0.0, yhi, false)
        },
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    axes(&mut svg, &frame, x_label, y_label);
    for (i, s) in all.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if s.band.len() > 1 {
            let upper = s.band.iter().map(|b| (frame.px(b.0), frame.py(b.2)));
            let lower = s.band.iter().rev().map(|b| (frame.px(b.0), frame.py(b.1)));
            let pts: Vec<String> = upper.chain(lower).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                svg,
                r#"<polygon points="{}" fill="{color}" fill-opacity="0.18" stroke="none"/>"#,
                pts.join(" ")
            );
        } else {
            for b in &s.band {
                let x = frame.px(b.0);
                let _ = writeln!(
                    svg,
                    r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}" stroke-opacity="0.5"/>"#,
                    frame.py(b.1),
                    frame.py(b.2)
                );
            }
        }
        if s.points.len() > 1 {
            let pts: Vec<String> = s
                .points
                .iter()
                .map(|p| format!("{:.2},{:.2}", frame.px(p.0), frame.py(p.1)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                pts.join(" ")
            );
        }
        for p in &s.points {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                frame.px(p.0),
                frame.py(p.1)
            );
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot(rows: &[SweepRow], kind: PlotKind, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let svg = render_plot(rows, kind)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}

fn axes(svg: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (x0, x1) = (LEFT, WIDTH - RIGHT);
    let (y0, y1) = (HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        svg,
        r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );
    for (v, label) in f.x.ticks() {
        let x = f.px(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            y0 + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
            y0 + 18.0
        );
    }
    for (v, label) in f.y.ticks() {
        let y = f.py(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#dddddd"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
            x0 - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x_label}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{y_label}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
}

fn min_max(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn survival_series(rows: &[SweepRow]) -> Vec<Series> {
    // zero estimates sit at half a count so the log axis stays finite
    let floor = rows.iter().map(|r| 0.5 / r.trials.max(1) as f64).fold(1.0, f64::min);
    series(rows)
        .into_iter()
        .map(|s| Series {
            label: format!("{} n={} g={}", s[0].family, s[0].n, s[0].gamma),
            points: s.iter().map(|r| (r.depth as f64, r.p_hat.max(floor))).collect(),
            band: s
                .iter()
                .map(|r| (r.depth as f64, r.ci_lo.max(floor), r.ci_hi.max(floor)))
                .collect(),
        })
        .collect()
}

fn dstar_series(rows: &[SweepRow]) -> Result<Vec<Series>> {
    let mut out: Vec<Series> = Vec::new();
    for s in series(rows) {
        let Ok(fit) = fit_decay(&s, &FitOptions::default()) else {
            continue;
        };
        if !fit.d_star_hat.is_finite() {
            continue;
        }
        let label = format!("{} g={}", s[0].family, s[0].gamma);
        let point = (s[0].n as f64, fit.d_star_hat);
        match out.iter_mut().find(|x| x.label == label) {
            Some(x) => x.points.push(point),
            None => out.push(Series {
                label,
                points: vec![point],
                band: vec![],
            }),
        }
    }
    if out.is_empty() {
        return Err(Error::Fit("no series has a finite d* estimate".into()));
    }
    Ok(out)
}
