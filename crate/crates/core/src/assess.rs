//! Individual-machine and equivalent-machine stability assessment.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paradigm::{
    build_cr_ncr, build_machine_sys, energy_ledger, relative_series, EnergyLedger, GroupSeparation, Objective,
    ReferenceKind, ReferenceMachine, StabilityEvent, TwoMachineSeries,
};
use crate::swing::{MachineId, MachineParams, SystemTrajectory};
use crate::tolerances::Tolerances;

/// Default share of the largest clearing KE a machine needs to count as critical.
pub const DEFAULT_CRITICAL_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Individual,
    Equivalent,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Individual => "individual",
            Mode::Equivalent => "equivalent",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MachineStatus {
    Stable,
    Unstable,
    Inconclusive,
    NonCritical,
}

impl fmt::Display for MachineStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MachineStatus::Stable => "stable",
            MachineStatus::Unstable => "unstable",
            MachineStatus::Inconclusive => "inconclusive",
            MachineStatus::NonCritical => "non_critical",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemStatus {
    Stable,
    Unstable,
    Inconclusive,
}

impl fmt::Display for SystemStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemStatus::Stable => "stable",
            SystemStatus::Unstable => "unstable",
            SystemStatus::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MachineVerdict {
    pub objective: Objective,
    pub status: MachineStatus,
    pub event: Option<StabilityEvent>,
    /// Residual KE if unstable, `A_dec - A_acc` if stable.
    pub margin: Option<f64>,
    pub a_acc: Option<f64>,
    pub a_dec: Option<f64>,
    pub note: Option<String>,
}

impl MachineVerdict {
    fn from_ledger(objective: Objective, ledger: &EnergyLedger) -> Self {
        match &ledger.mpp {
            Some(ev) => {
                let unstable = ev.kind.is_liberation();
                let margin = if unstable {
                    ledger.residual_energy
                } else {
                    ledger.residual_area.map(|r| -r)
                };
                Self {
                    objective,
                    status: if unstable {
                        MachineStatus::Unstable
                    } else {
                        MachineStatus::Stable
                    },
                    event: Some(ev.clone()),
                    margin,
                    a_acc: Some(ledger.a_acc),
                    a_dec: ledger.a_dec,
                    note: (!ledger.warnings.is_empty()).then(|| ledger.warnings.join("; ")),
                }
            }
            None => Self {
                objective,
                status: MachineStatus::Inconclusive,
                event: None,
                margin: None,
                a_acc: Some(ledger.a_acc),
                a_dec: None,
                note: ledger.inconclusive.clone(),
            },
        }
    }

    fn non_critical(id: MachineId) -> Self {
        Self {
            objective: Objective::Machine(id),
            status: MachineStatus::NonCritical,
            event: None,
            margin: None,
            a_acc: None,
            a_dec: None,
            note: None,
        }
    }

    pub fn event_time(&self) -> Option<f64> {
        self.event.as_ref().map(|e| e.time)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssessmentReport {
    pub mode: Mode,
    pub reference: ReferenceKind,
    pub clearing_time: f64,
    pub critical: Vec<MachineId>,
    /// Analysed verdicts ordered by event time, then the rest.
    pub verdicts: Vec<MachineVerdict>,
    pub system_status: SystemStatus,
    /// Time of the first DLP.
    pub instability_time: Option<f64>,
    /// Time of the last event among the critical machines.
    pub severity_time: Option<f64>,
    pub unstable_count: usize,
    pub leading_unstable: Option<Objective>,
}

impl AssessmentReport {
    pub fn events(&self) -> impl Iterator<Item = &StabilityEvent> {
        self.verdicts.iter().filter_map(|v| v.event.as_ref())
    }

    pub fn verdict(&self, objective: &Objective) -> Option<&MachineVerdict> {
        self.verdicts.iter().find(|v| &v.objective == objective)
    }
}

fn order_verdicts(verdicts: &mut [MachineVerdict]) {
    // stable sort keeps trajectory order among ties and among event-less verdicts
    verdicts.sort_by(|a, b| match (a.event_time(), b.event_time()) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
}

/// Reference for the individual-machine view: the infinite bus when the
/// network has one, otherwise Machine-SYS.
pub fn individual_reference(traj: &SystemTrajectory, params: &[MachineParams]) -> Result<ReferenceMachine> {
    if traj.has_stationary_reference() {
        Ok(ReferenceMachine::stationary(traj))
    } else {
        build_machine_sys(traj, params)
    }
}

/// Two-machine series of every machine against the individual reference.
pub fn individual_series(
    traj: &SystemTrajectory,
    params: &[MachineParams],
    machines: &[MachineId],
) -> Result<Vec<TwoMachineSeries>> {
    let rm = individual_reference(traj, params)?;
    machines
        .par_iter()
        .map(|&id| relative_series(traj, params, id, &rm))
        .collect()
}

/// Machines whose KE relative to the reference at clearing is at least
/// `fraction` of the largest one. Never empty.
pub fn select_critical(traj: &SystemTrajectory, params: &[MachineParams], fraction: f64) -> Result<Vec<MachineId>> {
    let rm = individual_reference(traj, params)?;
    let kc = traj.clearing_index();
    let snap = &traj.snapshots()[kc];
    let w_rm = rm.series.omega[kc];
    let ke: Vec<f64> = params
        .iter()
        .zip(&snap.omega)
        .map(|(p, w)| 0.5 * p.inertia * (w - w_rm) * (w - w_rm))
        .collect();
    let (top, max) = ke
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    if !(max > 0.0) {
        return Ok(vec![params[top].id]);
    }
    let cut = fraction * max;
    Ok(params
        .iter()
        .zip(&ke)
        .filter(|(_, &k)| k >= cut)
        .map(|(p, _)| p.id)
        .collect())
}

/// Machine-by-machine assessment of the critical machines.
pub fn assess_individual(
    traj: &SystemTrajectory,
    params: &[MachineParams],
    critical: &[MachineId],
    tol: &Tolerances,
) -> Result<AssessmentReport> {
    if critical.is_empty() {
        return Err(Error::InvalidInput("critical machine set is empty".into()));
    }
    let mut critical: Vec<MachineId> = critical.to_vec();
    for &id in &critical {
        traj.index_of(id)?;
    }
    critical.sort_by_key(|&id| traj.index_of(id).unwrap_or(usize::MAX));
    critical.dedup();

    let rm = individual_reference(traj, params)?;
    let mut verdicts: Vec<MachineVerdict> = critical
        .par_iter()
        .map(|&id| {
            let series = relative_series(traj, params, id, &rm)?;
            let ledger = energy_ledger(&series, tol);
            Ok(MachineVerdict::from_ledger(Objective::Machine(id), &ledger))
        })
        .collect::<Result<_>>()?;
    order_verdicts(&mut verdicts);

    let unstable: Vec<&MachineVerdict> = verdicts
        .iter()
        .filter(|v| v.status == MachineStatus::Unstable)
        .collect();
    let system_status = if !unstable.is_empty() {
        SystemStatus::Unstable
    } else if verdicts.iter().all(|v| v.status == MachineStatus::Stable) {
        SystemStatus::Stable
    } else {
        SystemStatus::Inconclusive
    };
    let instability_time = unstable.first().and_then(|v| v.event_time());
    let leading_unstable = unstable.first().map(|v| v.objective.clone());
    let unstable_count = unstable.len();
    let severity_time = verdicts
        .iter()
        .filter_map(MachineVerdict::event_time)
        .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.max(t))));

    for &id in traj.ids() {
        if !critical.contains(&id) {
            verdicts.push(MachineVerdict::non_critical(id));
        }
    }

    Ok(AssessmentReport {
        mode: Mode::Individual,
        reference: rm.kind,
        clearing_time: traj.clearing_time(),
        critical,
        verdicts,
        system_status,
        instability_time,
        severity_time,
        unstable_count,
        leading_unstable,
    })
}

/// One-and-only assessment of Machine-CR against Machine-NCR.
pub fn assess_equivalent(
    traj: &SystemTrajectory,
    params: &[MachineParams],
    sep: &GroupSeparation,
    tol: &Tolerances,
) -> Result<AssessmentReport> {
    let series = build_cr_ncr(traj, params, sep)?;
    let ledger = energy_ledger(&series, tol);
    let verdict = MachineVerdict::from_ledger(series.objective.clone(), &ledger);
    let (system_status, instability_time, unstable_count, leading_unstable) = match verdict.status {
        MachineStatus::Unstable => (
            SystemStatus::Unstable,
            verdict.event_time(),
            1,
            Some(verdict.objective.clone()),
        ),
        MachineStatus::Stable => (SystemStatus::Stable, None, 0, None),
        _ => (SystemStatus::Inconclusive, None, 0, None),
    };
    Ok(AssessmentReport {
        mode: Mode::Equivalent,
        reference: ReferenceKind::GroupNcr,
        clearing_time: traj.clearing_time(),
        critical: sep.cr().to_vec(),
        severity_time: verdict.event_time(),
        verdicts: vec![verdict],
        system_status,
        instability_time,
        unstable_count,
        leading_unstable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::three_machine_run;

    fn individual(tc: f64) -> AssessmentReport {
        let (system, traj) = three_machine_run(tc, 3.0);
        assess_individual(&traj, system.machines(), traj.ids(), &Tolerances::default()).unwrap()
    }

    #[test]
    fn all_dsp_means_stable() {
        let r = individual(0.2);
        assert_eq!(r.system_status, SystemStatus::Stable);
        assert_eq!(r.unstable_count, 0);
        assert_eq!(r.instability_time, None);
        assert!(r.events().all(|e| e.kind == crate::paradigm::EventKind::Idsp));
        let last = r.events().map(|e| e.time).fold(f64::MIN, f64::max);
        assert_eq!(r.severity_time, Some(last));
        for v in &r.verdicts {
            assert!(v.margin.unwrap().abs() < 1e-4);
        }
    }

    #[test]
    fn any_dlp_means_unstable() {
        let r = individual(0.3);
        assert_eq!(r.system_status, SystemStatus::Unstable);
        assert_eq!(r.unstable_count, 2);
        let first = r
            .verdicts
            .iter()
            .find(|v| v.status == MachineStatus::Unstable)
            .unwrap();
        assert_eq!(r.leading_unstable.as_ref(), Some(&first.objective));
        assert_eq!(r.instability_time, first.event_time());
        assert!(r.instability_time.unwrap() <= r.severity_time.unwrap());
        for v in r.verdicts.iter().filter(|v| v.status == MachineStatus::Unstable) {
            assert!(v.margin.unwrap() > 0.0);
        }
        let times: Vec<f64> = r.verdicts.iter().filter_map(|v| v.event_time()).collect();
        assert!(times.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn non_critical_machines_are_listed_last() {
        let (system, traj) = three_machine_run(0.2, 3.0);
        let r = assess_individual(&traj, system.machines(), &[MachineId(1)], &Tolerances::default()).unwrap();
        assert_eq!(r.verdicts.len(), 3);
        assert_eq!(r.verdicts[0].objective, Objective::Machine(MachineId(1)));
        assert!(r.verdicts[1..].iter().all(|v| v.status == MachineStatus::NonCritical));
        assert!(assess_individual(&traj, system.machines(), &[], &Tolerances::default()).is_err());
        assert!(assess_individual(&traj, system.machines(), &[MachineId(9)], &Tolerances::default()).is_err());
    }

    #[test]
    fn critical_selection_thresholds() {
        let (system, traj) = three_machine_run(0.2, 3.0);
        let p = system.machines();
        assert_eq!(select_critical(&traj, p, 0.0).unwrap().len(), 3);
        let one = select_critical(&traj, p, 1.0).unwrap();
        assert_eq!(one.len(), 1);
        let mut last = 0;
        for frac in [1.0, 0.8, 0.5, 0.2, 0.05, 0.0] {
            let set = select_critical(&traj, p, frac).unwrap();
            assert!(set.len() >= last);
            assert!(set.contains(&one[0]));
            last = set.len();
        }
    }

    #[test]
    fn undisturbed_system_still_has_one_critical_machine() {
        let (system, traj) = three_machine_run(0.0, 0.5);
        assert_eq!(select_critical(&traj, system.machines(), 0.1).unwrap().len(), 1);
        let r = assess_individual(&traj, system.machines(), traj.ids(), &Tolerances::default()).unwrap();
        assert_eq!(r.system_status, SystemStatus::Inconclusive);
    }

    #[test]
    fn equivalent_report_has_one_verdict() {
        let (system, traj) = three_machine_run(0.2, 3.0);
        let sep = GroupSeparation::from_cr(&[MachineId(1)], traj.ids()).unwrap();
        let r = assess_equivalent(&traj, system.machines(), &sep, &Tolerances::default()).unwrap();
        assert_eq!(r.verdicts.len(), 1);
        assert_eq!(r.system_status, SystemStatus::Stable);
        assert_eq!(r.verdicts[0].event.as_ref().unwrap().kind, crate::paradigm::EventKind::Edsp);
        assert_eq!(r.instability_time, None);
        assert_eq!(r.severity_time, r.verdicts[0].event_time());

        let (system, traj) = three_machine_run(0.3, 3.0);
        let sep = GroupSeparation::from_cr(&[MachineId(1)], traj.ids()).unwrap();
        let r = assess_equivalent(&traj, system.machines(), &sep, &Tolerances::default()).unwrap();
        assert_eq!(r.system_status, SystemStatus::Unstable);
        assert_eq!(r.instability_time, r.severity_time);
        assert_eq!(r.unstable_count, 1);
    }
}
