//! CSV and text artifacts.
//!
//! Numbers go through `f64`'s `Display`, the shortest text that parses back
//! to the same bits, so every file round-trips exactly.

use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::assess::{AssessmentReport, MachineStatus, Mode, SystemStatus};
use crate::error::{Error, Result};
use crate::paradigm::{Objective, ReferenceKind, TwoMachineSeries};
use crate::swing::{MachineId, SystemTrajectory};

/// Column names of the trajectory CSV, in file order.
pub fn trajectory_header(ids: &[MachineId]) -> Vec<String> {
    let mut h = vec!["time".to_string()];
    for prefix in ["delta_deg_", "delta_sys_deg_", "omega_", "f_sys_"] {
        h.extend(ids.iter().map(|id| format!("{prefix}{id}")));
    }
    h
}

/// Writes `time`, synchronous-frame angles, angles relative to the
/// individual reference, speeds and interaction forces, one row per sample.
pub fn write_trajectory_csv<W: Write>(
    out: W,
    traj: &SystemTrajectory,
    individual: &[TwoMachineSeries],
) -> Result<()> {
    let n = traj.machine_count();
    if individual.len() != n {
        return Err(Error::shape("relative series per machine", n, individual.len()));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(trajectory_header(traj.ids()))?;
    let mut row = Vec::with_capacity(1 + 4 * n);
    for (k, snap) in traj.snapshots().iter().enumerate() {
        row.clear();
        row.push(snap.time.to_string());
        row.extend(snap.delta.iter().map(|d| d.to_degrees().to_string()));
        row.extend(individual.iter().map(|s| s.delta[k].to_degrees().to_string()));
        row.extend(snap.omega.iter().map(|w| w.to_string()));
        row.extend(individual.iter().map(|s| s.force[k].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn read_trajectory_csv<R: Read>(input: R) -> Result<CsvTable> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|e| Error::InvalidInput(format!("trajectory row {}: '{v}': {e}", line + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(CsvTable { header, rows })
}

/// One line of the events CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    /// IDLP, IDSP, EDLP, EDSP or inconclusive.
    pub kind: String,
    /// Machine id, or CR.
    pub machine: String,
    pub status: String,
    pub time: Option<f64>,
    pub delta_rel_deg: Option<f64>,
    pub omega_rel: Option<f64>,
    pub residual_ke: Option<f64>,
    pub a_acc: Option<f64>,
    pub a_dec: Option<f64>,
    pub margin: Option<f64>,
}

pub fn event_records(report: &AssessmentReport) -> Vec<EventRecord> {
    report
        .verdicts
        .iter()
        .filter(|v| v.status != MachineStatus::NonCritical)
        .map(|v| EventRecord {
            kind: v
                .event
                .as_ref()
                .map_or_else(|| "inconclusive".to_string(), |e| e.kind.to_string()),
            machine: v.objective.to_string(),
            status: v.status.to_string(),
            time: v.event.as_ref().map(|e| e.time),
            delta_rel_deg: v.event.as_ref().map(|e| e.delta_rel.to_degrees()),
            omega_rel: v.event.as_ref().map(|e| e.omega_rel),
            residual_ke: v.event.as_ref().map(|e| e.residual_ke),
            a_acc: v.a_acc,
            a_dec: v.a_dec,
            margin: v.margin,
        })
        .collect()
}

pub fn write_events_csv<W: Write>(out: W, report: &AssessmentReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for rec in event_records(report) {
        w.serialize(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_events_csv<R: Read>(input: R) -> Result<Vec<EventRecord>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|rec| rec.map_err(Error::from)).collect()
}

fn reference_name(kind: &ReferenceKind) -> String {
    match kind {
        ReferenceKind::MachineSys => "Machine-SYS".into(),
        ReferenceKind::GroupCr => "Machine-CR".into(),
        ReferenceKind::GroupNcr => "Machine-NCR".into(),
        ReferenceKind::Machine(id) => format!("machine {id}"),
        ReferenceKind::Stationary => "infinite bus".into(),
    }
}

fn subject(o: &Objective) -> String {
    match o {
        Objective::Machine(id) => format!("machine {id}"),
        Objective::Cr(ids) => format!(
            "Machine-CR {{{}}}",
            ids.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
        ),
    }
}

fn join_ids(ids: &[MachineId]) -> String {
    ids.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Plain-text narrative: timeline, verdicts, counts and the system verdict
/// on the last line.
pub fn render_report(case_name: &str, report: &AssessmentReport, end_time: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Case: {case_name}");
    let _ = writeln!(s, "Mode: {} (reference: {})", report.mode, reference_name(&report.reference));
    let _ = writeln!(s, "Clearing time: {:.6} s", report.clearing_time);
    match report.mode {
        Mode::Individual => {
            let _ = writeln!(s, "Critical machines: {}", join_ids(&report.critical));
        }
        Mode::Equivalent => {
            let _ = writeln!(s, "Critical group: {}", join_ids(&report.critical));
        }
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "Event timeline");
    let mut any = false;
    for v in &report.verdicts {
        if let Some(e) = &v.event {
            any = true;
            let _ = writeln!(
                s,
                "  t = {:.6} s  {}  {:<20} delta_rel = {:.6} deg  residual KE = {:.6e} p.u.",
                e.time,
                e.kind,
                subject(&v.objective),
                e.delta_rel.to_degrees(),
                e.residual_ke
            );
        }
    }
    if !any {
        let _ = writeln!(s, "  (no events)");
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "Verdicts");
    for v in &report.verdicts {
        let detail = match (v.status, v.margin) {
            (MachineStatus::Unstable, Some(m)) => format!("margin {m:.6e} p.u. (residual KE at DLP)"),
            (MachineStatus::Stable, Some(m)) => format!("margin {m:.6e} p.u. (A_dec - A_acc to DSP, proxy)"),
            (MachineStatus::Inconclusive, _) => v.note.clone().unwrap_or_default(),
            _ => String::new(),
        };
        let detail = match (&v.note, v.status) {
            (Some(n), MachineStatus::Stable | MachineStatus::Unstable) => format!("{detail}; check: {n}"),
            _ => detail,
        };
        let line = format!("  {:<20} {:<13} {}", subject(&v.objective), v.status.to_string(), detail);
        let _ = writeln!(s, "{}", line.trim_end());
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "Unstable count: {}", report.unstable_count);
    if let Some(o) = &report.leading_unstable {
        let _ = writeln!(s, "Leading unstable: {}", subject(o));
    }
    match report.instability_time {
        Some(t) => {
            let _ = writeln!(s, "Instability time: {t:.6} s");
        }
        None => {
            let _ = writeln!(s, "Instability time: none");
        }
    }
    match report.severity_time {
        Some(t) => {
            let _ = writeln!(s, "Severity time: {t:.6} s (last event among critical machines)");
        }
        None => {
            let _ = writeln!(s, "Severity time: none");
        }
    }
    if report.system_status == SystemStatus::Inconclusive {
        let _ = writeln!(s, "Hint: no DSP or DLP before t = {end_time} s; try a longer t_end.");
    }
    let _ = writeln!(
        s,
        "SYSTEM {}",
        match report.system_status {
            SystemStatus::Stable => "STABLE",
            SystemStatus::Unstable => "UNSTABLE",
            SystemStatus::Inconclusive => "INCONCLUSIVE",
        }
    );
    s
}
