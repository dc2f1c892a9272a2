use std::fmt::Write as _;
use std::path::Path;

use super::experiment::Trace;
use crate::error::{Error, Result};

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const MAX_POINTS: usize = 1500;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Series<'a> {
    label: String,
    color: &'a str,
    dashed: bool,
    points: Vec<(f64, f64)>,
}

/// Log-linear chart of mean relative error, one line per trace plus the
/// baseline of the first trace.
pub fn emit_svg(traces: &[Trace], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let svg = render_svg(traces)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

pub fn render_svg(traces: &[Trace]) -> Result<String> {
    let first = traces
        .first()
        .ok_or_else(|| Error::invalid("no traces to plot"))?;

    let mut series: Vec<Series> = traces
        .iter()
        .enumerate()
        .map(|(i, tr)| Series {
            label: tr.label.clone(),
            color: PALETTE[i % PALETTE.len()],
            dashed: false,
            points: tr
                .rows
                .iter()
                .map(|r| (r.t as f64, r.mean_rel_err))
                .collect(),
        })
        .collect();
    series.push(Series {
        label: "baseline".into(),
        color: "#000000",
        dashed: true,
        points: first
            .rows
            .iter()
            .map(|r| (r.t as f64, r.baseline_rel_err))
            .collect(),
    });

    let t_max = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .fold(1.0, f64::max);
    let positive = || {
        series
            .iter()
            .flat_map(|s| s.points.iter().map(|p| p.1))
            .filter(|&v| v > 0.0)
    };
    let lo = positive().fold(f64::INFINITY, f64::min);
    let hi = positive().fold(f64::NEG_INFINITY, f64::max);
    let (exp_lo, exp_hi) = if lo.is_finite() {
        (
            lo.log10().floor(),
            hi.log10().ceil().max(lo.log10().floor() + 1.0),
        )
    } else {
        (-1.0, 0.0)
    };

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |t: f64| LEFT + plot_w * t / t_max;
    let sy = |v: f64| TOP + plot_h * (exp_hi - v.log10()) / (exp_hi - exp_lo);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" style="font-family:sans-serif;font-size:12px">"#
    );
    for tr in traces {
        let _ = writeln!(
            out,
            "<!-- config: {} -->",
            escape(&tr.config).replace("--", "- -")
        );
    }
    let _ = writeln!(
        out,
        r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" style="fill:#ffffff"/>"##
    );
    let _ = writeln!(
        out,
        r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" style="fill:none;stroke:#444444;stroke-width:1"/>"##
    );

    // Decade grid and labels.
    let step = ((exp_hi - exp_lo) / 10.0).ceil().max(1.0);
    let mut e = exp_lo;
    while e <= exp_hi + 1e-9 {
        let y = sy(10f64.powf(e));
        let _ = writeln!(
            out,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" style="stroke:#dddddd;stroke-width:1"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" style="text-anchor:end">1e{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            e as i64
        );
        e += step;
    }
    for k in 0..=5 {
        let t = t_max * k as f64 / 5.0;
        let x = sx(t);
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" style="text-anchor:middle">{}</text>"#,
            TOP + plot_h + 18.0,
            t.round() as u64
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" style="text-anchor:middle">Iteration</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{:.2}" transform="rotate(-90 20 {:.2})" style="text-anchor:middle">Relative Error</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for s in &series {
        let stride = s.points.len().div_ceil(MAX_POINTS).max(1);
        let last = s.points.len().saturating_sub(1);
        let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        for (i, &(t, v)) in s.points.iter().enumerate() {
            if i % stride != 0 && i != last {
                continue;
            }
            if v > 0.0 {
                segments.last_mut().unwrap().push((sx(t), sy(v)));
            } else if !segments.last().unwrap().is_empty() {
                segments.push(Vec::new());
            }
        }
        let dash = if s.dashed {
            ";stroke-dasharray:6 4"
        } else {
            ""
        };
        for seg in segments.iter().filter(|seg| seg.len() > 1) {
            let pts: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                out,
                r#"<polyline points="{}" style="fill:none;stroke:{};stroke-width:1.5{dash}"/>"#,
                pts.join(" "),
                s.color
            );
        }
    }

    for (i, s) in series.iter().enumerate() {
        let y = TOP + 10.0 + 20.0 * i as f64;
        let x = WIDTH - RIGHT + 15.0;
        let dash = if s.dashed {
            ";stroke-dasharray:6 4"
        } else {
            ""
        };
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" style="stroke:{};stroke-width:2{dash}"/>"#,
            x + 25.0,
            s.color
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            x + 32.0,
            y + 4.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
