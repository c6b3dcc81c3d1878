use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use tsa_core::assess::{Mode, SystemStatus};
use tsa_core::basin::{
    ball_eac, ball_energy, barrier_speed, simulate_ball, BallEventKind, BallState, BasinProfile, SineBasin,
};
use tsa_core::case::{load_case, CaseFile};
use tsa_core::run::{prepare, run, trajectory_path, RunOptions};
use tsa_core::MachineId;

#[derive(Parser)]
#[command(name = "tsa", version, about = "Transient stability assessment of classical multi-machine systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a case and write its trajectory CSV.
    Simulate {
        case: PathBuf,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Simulate and assess a case; writes trajectory, events and report.
    Assess {
        case: PathBuf,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        assess: AssessArgs,
        /// Views to render, e.g. sys,eac:1,eac:cr
        #[arg(long, value_delimiter = ',')]
        plot: Vec<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Ball in a gravity-variant basin.
    Toy(ToyArgs),
    /// Render SVG views of a case: sync, sys, emtr, inner, eac:<id>, eac:cr.
    Plot {
        case: PathBuf,
        #[arg(long, value_delimiter = ',')]
        view: Vec<String>,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        assess: AssessArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Assess several cases in parallel, one output subdirectory per case.
    Batch {
        #[arg(required = true)]
        cases: Vec<PathBuf>,
        #[command(flatten)]
        assess: AssessArgs,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args, Clone)]
struct SimArgs {
    /// Integration step (s).
    #[arg(long)]
    dt: Option<f64>,
    /// End of the horizon (s).
    #[arg(long)]
    t_end: Option<f64>,
    /// Clearing time (s).
    #[arg(long)]
    tc: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Individual,
    Equivalent,
}

#[derive(Args, Clone)]
struct AssessArgs {
    #[arg(long, value_enum, default_value = "individual")]
    mode: ModeArg,
    /// Critical machine ids, e.g. 1,9,10
    #[arg(long, value_delimiter = ',')]
    critical: Option<Vec<u32>>,
    /// Share of the largest clearing KE for automatic critical selection.
    #[arg(long)]
    critical_threshold: Option<f64>,
    /// Critical group for the equivalent view, e.g. 8,9
    #[arg(long, value_delimiter = ',')]
    cr: Option<Vec<u32>>,
    #[arg(long)]
    event_tol: Option<f64>,
    #[arg(long)]
    quadrature_tol: Option<f64>,
    #[arg(long)]
    stable_residual_tol: Option<f64>,
    #[arg(long)]
    undisturbed_tol: Option<f64>,
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Output directory.
    #[arg(long, env = "TSA_OUT_DIR", default_value = "tsa-out")]
    out: PathBuf,
}

#[derive(Args)]
struct ToyArgs {
    /// Field strength g (N).
    #[arg(long, default_value_t = 9.81)]
    g: f64,
    /// Boundary altitude h_b (m).
    #[arg(long, default_value_t = 1.0)]
    boundary: f64,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    /// Launch speed from the bottom (m/s).
    #[arg(long, conflicts_with = "speed_ratio")]
    speed: Option<f64>,
    /// Launch speed as a multiple of the barrier speed.
    #[arg(long, default_value_t = 0.9)]
    speed_ratio: f64,
    #[arg(long, default_value_t = 5.0)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[command(flatten)]
    out: OutArgs,
}

fn ids(v: &Option<Vec<u32>>) -> Option<Vec<MachineId>> {
    v.as_ref().map(|v| v.iter().copied().map(MachineId).collect())
}

fn options(a: &AssessArgs, case: &CaseFile, plots: Vec<String>) -> RunOptions {
    let mut tol = case.tolerances();
    let overrides = [
        (a.event_tol, &mut tol.event),
        (a.quadrature_tol, &mut tol.quadrature),
        (a.stable_residual_tol, &mut tol.stable_residual),
        (a.undisturbed_tol, &mut tol.undisturbed),
    ];
    for (value, slot) in overrides {
        if let Some(v) = value {
            *slot = v;
        }
    }
    RunOptions {
        mode: match a.mode {
            ModeArg::Individual => Mode::Individual,
            ModeArg::Equivalent => Mode::Equivalent,
        },
        critical: ids(&a.critical),
        critical_fraction: a.critical_threshold,
        cr: ids(&a.cr),
        tolerances: Some(tol),
        plots,
    }
}

fn load(path: &Path, sim: &SimArgs) -> Result<CaseFile> {
    let mut case = load_case(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(dt) = sim.dt {
        case.fault.dt = dt;
    }
    if let Some(t) = sim.t_end {
        case.fault.t_end = t;
    }
    if let Some(t) = sim.tc {
        case.fault.tc = t;
    }
    case.validate()
        .with_context(|| format!("{} with command-line overrides", path.display()))?;
    Ok(case)
}

fn status_code(s: SystemStatus) -> u8 {
    match s {
        SystemStatus::Inconclusive => 2,
        _ => 0,
    }
}

fn cmd_simulate(path: &Path, sim: &SimArgs, out: &Path) -> Result<u8> {
    let case = load(path, sim)?;
    fs::create_dir_all(out)?;
    let prepared = prepare(&case, &RunOptions::default())?;
    let p = trajectory_path(out, &case.name);
    prepared.write_trajectory(&p)?;
    println!("{}", p.display());
    Ok(0)
}

fn cmd_assess(path: &Path, sim: &SimArgs, a: &AssessArgs, plots: Vec<String>, out: &Path) -> Result<u8> {
    let case = load(path, sim)?;
    let artifacts = run(&case, &options(a, &case, plots), out)?;
    print!("{}", fs::read_to_string(&artifacts.report)?);
    Ok(status_code(artifacts.status))
}

fn cmd_plot(path: &Path, views: &[String], sim: &SimArgs, a: &AssessArgs, out: &Path) -> Result<u8> {
    let case = load(path, sim)?;
    fs::create_dir_all(out)?;
    let prepared = prepare(&case, &options(a, &case, Vec::new()))?;
    for p in prepared.plot(views, out)? {
        println!("{}", p.display());
    }
    Ok(0)
}

fn cmd_batch(cases: &[PathBuf], a: &AssessArgs, jobs: Option<usize>, out: &Path) -> Result<u8> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()?;
    let results: Vec<Result<SystemStatus>> = pool.install(|| {
        cases
            .par_iter()
            .map(|path| {
                let case = load(path, &SimArgs { dt: None, t_end: None, tc: None })?;
                let stem = path.file_stem().map_or_else(|| case.name.clone(), |s| s.to_string_lossy().into_owned());
                let artifacts = run(&case, &options(a, &case, Vec::new()), &out.join(stem))?;
                Ok(artifacts.status)
            })
            .collect()
    });
    let mut code = 0;
    let mut failed = false;
    for (path, r) in cases.iter().zip(results) {
        match r {
            Ok(s) => {
                println!("{}: {s}", path.display());
                code = code.max(status_code(s));
            }
            Err(e) => {
                eprintln!("{}: error: {e:#}", path.display());
                failed = true;
            }
        }
    }
    // an error outranks an inconclusive case
    Ok(if failed { 1 } else { code })
}

fn cmd_toy(t: &ToyArgs) -> Result<u8> {
    let basin = SineBasin::new(t.g, t.boundary)?;
    let v_star = barrier_speed(&basin, t.mass);
    let speed = t.speed.unwrap_or(t.speed_ratio * v_star);
    let initial = BallState {
        h: basin.bottom(),
        v: speed,
        mass: t.mass,
    };
    let traj = simulate_ball(&basin, initial, t.t_end, t.dt)?;
    let out = &t.out.out;
    fs::create_dir_all(out)?;

    let traj_path = out.join("toy_trajectory.csv");
    let mut w = BufWriter::new(File::create(&traj_path)?);
    writeln!(w, "time,h,v,force,ke,pe,te")?;
    for k in 0..traj.len() {
        let s = traj.state(k);
        let (ke, pe, te) = ball_energy(&s, &basin, basin.bottom());
        writeln!(w, "{},{},{},{},{},{},{}", traj.time[k], s.h, s.v, basin.force(s.h), ke, pe, te)?;
    }
    w.flush()?;

    let eac = match ball_eac(&traj, &basin, 0) {
        Ok(e) => e,
        Err(e) => {
            println!("barrier speed {v_star} m/s, launch speed {speed} m/s");
            println!("{e}");
            return Ok(2);
        }
    };
    let (kind, verdict) = match eac.event.kind {
        BallEventKind::Dsp => ("DSP", "stable"),
        BallEventKind::Dlp => ("DLP", "unstable"),
    };
    let eac_path = out.join("toy_eac.csv");
    fs::write(
        &eac_path,
        format!(
            "kind,time,h,v,a_acc,a_dec,residual_energy,residual_area\n{kind},{},{},{},{},{},{},{}\n",
            eac.event.time, eac.event.h, eac.event.v, eac.a_acc, eac.a_dec, eac.residual_energy, eac.residual_area
        ),
    )?;
    println!("barrier speed {v_star} m/s, launch speed {speed} m/s");
    println!(
        "{kind} at t = {:.6} s, h = {:.6} m: {verdict}, residual KE {:.6e} (A_acc {:.6}, A_dec {:.6})",
        eac.event.time, eac.event.h, eac.residual_energy, eac.a_acc, eac.a_dec
    );
    println!("{}", traj_path.display());
    println!("{}", eac_path.display());
    Ok(0)
}

fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Simulate { case, sim, out } => cmd_simulate(&case, &sim, &out.out),
        Command::Assess {
            case,
            sim,
            assess,
            plot,
            out,
        } => cmd_assess(&case, &sim, &assess, plot, &out.out),
        Command::Toy(t) => cmd_toy(&t),
        Command::Plot {
            case,
            view,
            sim,
            assess,
            out,
        } => cmd_plot(&case, &view, &sim, &assess, &out.out),
        Command::Batch {
            cases,
            assess,
            jobs,
            out,
        } => cmd_batch(&cases, &assess, jobs, &out.out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap would use 2, which means inconclusive here
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
