//! Static SVG figures: frame trajectories and force-angle area plots.
//!
//! Output is plain text assembled in a fixed order, so identical inputs give
//! identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::assess::individual_series;
use crate::error::{Error, Result};
use crate::paradigm::{
    acceleration_path, build_cr_ncr, deceleration_path, detect_events, inner_group_series, GroupSeparation,
    TwoMachineSeries,
};
use crate::swing::{MachineId, MachineParams, SystemTrajectory};
use crate::tolerances::Tolerances;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

/// Everything a view needs.
pub struct PlotContext<'a> {
    pub case_name: &'a str,
    pub traj: &'a SystemTrajectory,
    pub params: &'a [MachineParams],
    pub separation: Option<&'a GroupSeparation>,
    pub tolerances: Tolerances,
}

struct Curve {
    label: String,
    class: &'static str,
    machine: Option<String>,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

struct Region {
    class: &'static str,
    fill: &'static str,
    xs: Vec<f64>,
    ys: Vec<f64>,
    area: f64,
}

struct Figure {
    title: String,
    xlabel: &'static str,
    ylabel: &'static str,
    curves: Vec<Curve>,
    regions: Vec<Region>,
}

/// Absolute area enclosed by a closed polygon.
pub fn shoelace(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    let mut s = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        s += xs[i] * ys[j] - xs[j] * ys[i];
    }
    0.5 * s.abs()
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 1.0, hi + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn render(fig: &Figure) -> String {
    let (x0, x1) = bounds(
        fig.curves
            .iter()
            .flat_map(|c| c.xs.iter().copied())
            .chain(fig.regions.iter().flat_map(|r| r.xs.iter().copied())),
    );
    let (y0, y1) = bounds(
        fig.curves
            .iter()
            .flat_map(|c| c.ys.iter().copied())
            .chain(fig.regions.iter().flat_map(|r| r.ys.iter().copied())),
    );
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;
    let points = |xs: &[f64], ys: &[f64]| {
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(&fig.title)
    );
    let _ = writeln!(
        s,
        r#"<rect class="frame" x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
            sx(fx),
            TOP + ph + 16.0,
            tick(fx)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
            LEFT - 6.0,
            sy(fy) + 4.0,
            tick(fy)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0,
        fig.xlabel
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {:.1})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        fig.ylabel
    );
    for r in &fig.regions {
        let _ = writeln!(
            s,
            r#"<polygon class="{}" data-area="{}" fill="{}" fill-opacity="0.35" stroke="none" points="{}"/>"#,
            r.class,
            r.area,
            r.fill,
            points(&r.xs, &r.ys)
        );
    }
    for (i, c) in fig.curves.iter().enumerate() {
        let color = if c.class == "rm-line" {
            "black"
        } else {
            PALETTE[i % PALETTE.len()]
        };
        let dash = if c.class == "rm-line" { r#" stroke-dasharray="6 4""# } else { "" };
        let machine = c
            .machine
            .as_ref()
            .map(|m| format!(r#" data-machine="{m}""#))
            .unwrap_or_default();
        let _ = writeln!(
            s,
            r#"<polyline class="{}"{machine} fill="none" stroke="{color}" stroke-width="1.3"{dash} points="{}"/>"#,
            c.class,
            points(&c.xs, &c.ys)
        );
    }
    for (i, c) in fig.curves.iter().enumerate() {
        let color = if c.class == "rm-line" {
            "black"
        } else {
            PALETTE[i % PALETTE.len()]
        };
        let y = TOP + 14.0 + 14.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{y:.1}" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            LEFT + 8.0,
            escape(&c.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    let t = format!("{v:.3}");
    if t == "-0.000" {
        "0.000".into()
    } else {
        t
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn degrees(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| x.to_degrees()).collect()
}

fn zero_line(time: &[f64], label: &str) -> Curve {
    Curve {
        label: label.to_string(),
        class: "rm-line",
        machine: None,
        xs: vec![time[0], *time.last().unwrap()],
        ys: vec![0.0, 0.0],
    }
}

fn series_curve(s: &TwoMachineSeries, label: String, machine: String) -> Curve {
    Curve {
        label,
        class: "curve",
        machine: Some(machine),
        xs: s.time.clone(),
        ys: degrees(&s.delta),
    }
}

fn require_separation<'a>(ctx: &'a PlotContext<'_>, view: &str) -> Result<&'a GroupSeparation> {
    ctx.separation
        .ok_or_else(|| Error::InvalidInput(format!("view '{view}' needs a group separation")))
}

fn eac_figure(ctx: &PlotContext<'_>, series: &TwoMachineSeries, label: &str) -> Figure {
    let (ax, ay) = acceleration_path(series);
    let mut regions = Vec::new();
    let mut acc_x = ax.clone();
    let mut acc_y = ay.clone();
    acc_x.push(*ax.last().unwrap());
    acc_y.push(0.0);
    acc_x.push(ax[0]);
    acc_y.push(0.0);
    regions.push(Region {
        class: "area-acc",
        fill: "#d62728",
        area: shoelace(&acc_x, &acc_y),
        xs: degrees(&acc_x),
        ys: acc_y,
    });
    let mut curves = vec![Curve {
        label: "fault-on".into(),
        class: "curve",
        machine: None,
        xs: degrees(&ax),
        ys: ay,
    }];
    let kc = series.clearing_index;
    let end = match detect_events(series, &ctx.tolerances) {
        Ok(ev) => {
            let (dx, dy) = deceleration_path(series, &ev);
            let mut ring_x = dx.clone();
            let mut ring_y = dy.clone();
            ring_x.push(*dx.last().unwrap());
            ring_y.push(0.0);
            ring_x.push(dx[0]);
            ring_y.push(0.0);
            regions.push(Region {
                class: "area-dec",
                fill: "#1f77b4",
                area: shoelace(&ring_x, &ring_y),
                xs: degrees(&ring_x),
                ys: ring_y,
            });
            ev.step + 1
        }
        Err(_) => series.len() - 1,
    };
    curves.push(Curve {
        label: "post-fault".into(),
        class: "curve",
        machine: None,
        xs: degrees(&series.delta[kc..=end]),
        ys: series.force[kc..=end].to_vec(),
    });
    Figure {
        title: format!("{}: f-delta plane, {label}", ctx.case_name),
        xlabel: "relative angle (deg)",
        ylabel: "interaction force f (p.u.)",
        curves,
        regions,
    }
}

fn figure(ctx: &PlotContext<'_>, view: &str) -> Result<Figure> {
    let traj = ctx.traj;
    let ids = traj.ids();
    let time = traj.times();
    match view {
        "sync" => Ok(Figure {
            title: format!("{}: rotor angles, synchronous frame", ctx.case_name),
            xlabel: "time (s)",
            ylabel: "angle (deg)",
            curves: ids
                .iter()
                .enumerate()
                .map(|(i, id)| Curve {
                    label: format!("machine {id}"),
                    class: "curve",
                    machine: Some(id.to_string()),
                    xs: time.clone(),
                    ys: degrees(&traj.delta_series(i)),
                })
                .collect(),
            regions: Vec::new(),
        }),
        "sys" => {
            let all = individual_series(traj, ctx.params, ids)?;
            let rm_label = if traj.has_stationary_reference() {
                "infinite bus"
            } else {
                "Machine-SYS"
            };
            let mut curves: Vec<Curve> = all
                .iter()
                .zip(ids)
                .map(|(s, id)| series_curve(s, format!("machine {id}"), id.to_string()))
                .collect();
            curves.push(zero_line(&time, rm_label));
            Ok(Figure {
                title: format!("{}: individual-machine trajectories", ctx.case_name),
                xlabel: "time (s)",
                ylabel: "angle relative to reference (deg)",
                curves,
                regions: Vec::new(),
            })
        }
        "emtr" => {
            let sep = require_separation(ctx, view)?;
            let s = build_cr_ncr(traj, ctx.params, sep)?;
            Ok(Figure {
                title: format!("{}: equivalent-machine trajectory", ctx.case_name),
                xlabel: "time (s)",
                ylabel: "CR-NCR angle (deg)",
                curves: vec![series_curve(&s, "Machine-CR".into(), "CR".into()), zero_line(&time, "Machine-NCR")],
                regions: Vec::new(),
            })
        }
        "inner" => {
            let sep = require_separation(ctx, view)?;
            let mut curves = sep
                .cr()
                .iter()
                .map(|&id| {
                    inner_group_series(traj, ctx.params, sep, id)
                        .map(|s| series_curve(&s, format!("machine {id}"), id.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            curves.push(zero_line(&time, "Machine-CR"));
            Ok(Figure {
                title: format!("{}: inner-group trajectories", ctx.case_name),
                xlabel: "time (s)",
                ylabel: "angle relative to Machine-CR (deg)",
                curves,
                regions: Vec::new(),
            })
        }
        _ => match view.strip_prefix("eac:") {
            Some("cr") | Some("CR") => {
                let sep = require_separation(ctx, view)?;
                let s = build_cr_ncr(traj, ctx.params, sep)?;
                Ok(eac_figure(ctx, &s, "Machine-CR"))
            }
            Some(id) => {
                let id: u32 = id.parse().map_err(|_| Error::UnknownView(view.to_string()))?;
                let id = MachineId(id);
                traj.index_of(id)?;
                let s = individual_series(traj, ctx.params, &[id])?.remove(0);
                Ok(eac_figure(ctx, &s, &format!("machine {id}")))
            }
            None => Err(Error::UnknownView(view.to_string())),
        },
    }
}

/// SVG text of one view. Views: `sync`, `sys`, `emtr`, `inner`, `eac:<id>`, `eac:cr`.
pub fn render_view(ctx: &PlotContext<'_>, view: &str) -> Result<String> {
    Ok(render(&figure(ctx, view)?))
}

fn file_name(case: &str, view: &str) -> String {
    format!("{case}_{}.svg", view.replace(':', "_"))
}

/// Writes one SVG per view into `out_dir`. All views are rendered before any
/// file is written, so an unknown view leaves the directory untouched.
pub fn emit_plots(ctx: &PlotContext<'_>, views: &[String], out_dir: &Path) -> Result<Vec<PathBuf>> {
    let rendered = views
        .iter()
        .map(|v| render_view(ctx, v).map(|svg| (v, svg)))
        .collect::<Result<Vec<_>>>()?;
    let mut paths = Vec::with_capacity(rendered.len());
    for (view, svg) in rendered {
        let p = out_dir.join(file_name(ctx.case_name, view));
        fs::write(&p, svg)?;
        paths.push(p);
    }
    Ok(paths)
}
