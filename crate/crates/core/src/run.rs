//! Case to artifacts: simulate, assess, write CSVs, report and plots.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::assess::{
    assess_equivalent, assess_individual, individual_series, select_critical, AssessmentReport, Mode,
    SystemStatus, DEFAULT_CRITICAL_FRACTION,
};
use crate::case::CaseFile;
use crate::error::Result;
use crate::output::{render_report, write_events_csv, write_trajectory_csv};
use crate::paradigm::GroupSeparation;
use crate::plot::{emit_plots, PlotContext};
use crate::swing::{simulate, MachineId, SystemTrajectory};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub mode: Mode,
    /// Overrides the case's critical set.
    pub critical: Option<Vec<MachineId>>,
    /// Overrides the case's critical threshold.
    pub critical_fraction: Option<f64>,
    /// Overrides the case's group separation (critical group ids).
    pub cr: Option<Vec<MachineId>>,
    pub tolerances: Option<Tolerances>,
    pub plots: Vec<String>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Individual,
            critical: None,
            critical_fraction: None,
            cr: None,
            tolerances: None,
            plots: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub trajectory_csv: PathBuf,
    pub events_csv: PathBuf,
    pub report: PathBuf,
    pub plots: Vec<PathBuf>,
    pub status: SystemStatus,
}

/// Simulation plus the resolved assessment inputs of a case.
pub struct Prepared {
    pub case: CaseFile,
    pub traj: SystemTrajectory,
    pub tolerances: Tolerances,
    pub critical: Vec<MachineId>,
    pub separation: Option<GroupSeparation>,
}

pub fn prepare(case: &CaseFile, opts: &RunOptions) -> Result<Prepared> {
    let system = case.system()?;
    let traj = simulate(&system, &case.initial_snapshot(), &case.fault)?;
    let tolerances = opts.tolerances.unwrap_or_else(|| case.tolerances());
    let critical = match opts.critical.clone().or_else(|| case.critical.clone()) {
        Some(c) => c,
        None => {
            let fraction = opts
                .critical_fraction
                .or(case.critical_threshold)
                .unwrap_or(DEFAULT_CRITICAL_FRACTION);
            select_critical(&traj, system.machines(), fraction)?
        }
    };
    let ids = case.ids();
    let separation = match &opts.cr {
        Some(cr) => Some(GroupSeparation::from_cr(cr, &ids)?),
        None => case.separation()?,
    };
    Ok(Prepared {
        case: case.clone(),
        traj,
        tolerances,
        critical,
        separation,
    })
}

impl Prepared {
    pub fn assess(&self, mode: Mode) -> Result<AssessmentReport> {
        let params = &self.case.machines;
        match mode {
            Mode::Individual => assess_individual(&self.traj, params, &self.critical, &self.tolerances),
            Mode::Equivalent => {
                let sep = match &self.separation {
                    Some(s) => s.clone(),
                    None => GroupSeparation::from_cr(&self.critical, &self.case.ids())?,
                };
                assess_equivalent(&self.traj, params, &sep, &self.tolerances)
            }
        }
    }

    pub fn write_trajectory(&self, path: &Path) -> Result<()> {
        let series = individual_series(&self.traj, &self.case.machines, self.traj.ids())?;
        write_trajectory_csv(BufWriter::new(File::create(path)?), &self.traj, &series)
    }

    pub fn plot(&self, views: &[String], out_dir: &Path) -> Result<Vec<PathBuf>> {
        let ctx = PlotContext {
            case_name: &self.case.name,
            traj: &self.traj,
            params: &self.case.machines,
            separation: self.separation.as_ref(),
            tolerances: self.tolerances,
        };
        emit_plots(&ctx, views, out_dir)
    }
}

pub fn trajectory_path(out_dir: &Path, case: &str) -> PathBuf {
    out_dir.join(format!("{case}_trajectory.csv"))
}

/// Simulates, assesses and writes every artifact into `out_dir`.
pub fn run(case: &CaseFile, opts: &RunOptions, out_dir: &Path) -> Result<RunArtifacts> {
    fs::create_dir_all(out_dir)?;
    let prepared = prepare(case, opts)?;
    let report = prepared.assess(opts.mode)?;
    let name = &case.name;

    let trajectory_csv = trajectory_path(out_dir, name);
    prepared.write_trajectory(&trajectory_csv)?;

    let events_csv = out_dir.join(format!("{name}_{}_events.csv", opts.mode));
    write_events_csv(BufWriter::new(File::create(&events_csv)?), &report)?;

    let report_path = out_dir.join(format!("{name}_{}_report.txt", opts.mode));
    fs::write(&report_path, render_report(name, &report, prepared.traj.end_time()))?;

    let plots = prepared.plot(&opts.plots, out_dir)?;
    Ok(RunArtifacts {
        trajectory_csv,
        events_csv,
        report: report_path,
        plots,
        status: report.system_status,
    })
}
