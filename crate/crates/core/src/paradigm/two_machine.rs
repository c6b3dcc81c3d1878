//! Relative motion of an objective machine against a reference machine.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::reference::{aggregate_group, AggregateSeries, ReferenceKind, ReferenceMachine};
use crate::error::{Error, Result};
use crate::swing::{MachineId, MachineParams, SystemTrajectory};

/// What is moving relative to the reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Machine(MachineId),
    /// Machine-CR, the equivalent of the critical group.
    Cr(Vec<MachineId>),
}

impl Objective {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Objective::Cr(_))
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Machine(id) => write!(f, "{id}"),
            Objective::Cr(_) => f.write_str("CR"),
        }
    }
}

/// Relative angle, speed and interaction force of one objective/RM pair,
/// sampled on the trajectory grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoMachineSeries {
    pub objective: Objective,
    pub reference: ReferenceKind,
    /// M of the objective.
    pub inertia: f64,
    pub reference_inertia: f64,
    pub time: Vec<f64>,
    pub delta: Vec<f64>,
    pub omega: Vec<f64>,
    pub force: Vec<f64>,
    /// Interaction force at the clearing sample under the fault-on network.
    pub pre_clearing_force: f64,
    /// Post-fault interaction force along the fault-on samples.
    pub postfault_field: Vec<f64>,
    pub fault_index: usize,
    pub clearing_index: usize,
    pub dt: f64,
}

impl TwoMachineSeries {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    pub fn clearing_time(&self) -> f64 {
        self.time[self.clearing_index]
    }
}

/// Pairs an aggregated objective with a reference.
pub fn pair_series(
    traj: &SystemTrajectory,
    objective: Objective,
    obj: &AggregateSeries,
    rm: &ReferenceMachine,
) -> TwoMachineSeries {
    let r = &rm.series;
    let ratio = obj.inertia / r.inertia;
    let rel = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(a, b)| a - b).collect() };
    let force = obj
        .force
        .iter()
        .zip(&r.force)
        .map(|(po, pr)| po - ratio * pr)
        .collect();
    TwoMachineSeries {
        objective,
        reference: rm.kind.clone(),
        inertia: obj.inertia,
        reference_inertia: r.inertia,
        time: traj.times(),
        delta: rel(&obj.delta, &r.delta),
        omega: rel(&obj.omega, &r.omega),
        force,
        pre_clearing_force: obj.pre_clearing_force - ratio * r.pre_clearing_force,
        postfault_field: obj
            .postfault_field
            .iter()
            .zip(&r.postfault_field)
            .map(|(po, pr)| po - ratio * pr)
            .collect(),
        fault_index: traj.fault_index(),
        clearing_index: traj.clearing_index(),
        dt: traj.dt(),
    }
}

/// Real machine `objective` observed from `rm`.
pub fn relative_series(
    traj: &SystemTrajectory,
    params: &[MachineParams],
    objective: MachineId,
    rm: &ReferenceMachine,
) -> Result<TwoMachineSeries> {
    let obj = aggregate_group(traj, params, &[objective])?;
    Ok(pair_series(traj, Objective::Machine(objective), &obj, rm))
}

/// Partition of the machines into a critical and a non-critical group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSeparation {
    cr: Vec<MachineId>,
    ncr: Vec<MachineId>,
}

impl GroupSeparation {
    pub fn new(cr: &[MachineId], ncr: &[MachineId], all: &[MachineId]) -> Result<Self> {
        let cr_set: BTreeSet<_> = cr.iter().copied().collect();
        let ncr_set: BTreeSet<_> = ncr.iter().copied().collect();
        let all_set: BTreeSet<_> = all.iter().copied().collect();
        if cr_set.is_empty() || ncr_set.is_empty() {
            return Err(Error::InvalidSeparation("both groups must be non-empty".into()));
        }
        if let Some(id) = cr_set.intersection(&ncr_set).next() {
            return Err(Error::InvalidSeparation(format!("machine {id} is in both groups")));
        }
        if let Some(id) = cr_set.union(&ncr_set).find(|id| !all_set.contains(id)) {
            return Err(Error::InvalidSeparation(format!("unknown machine {id}")));
        }
        if let Some(id) = all_set.iter().find(|id| !cr_set.contains(id) && !ncr_set.contains(id)) {
            return Err(Error::InvalidSeparation(format!("machine {id} is in neither group")));
        }
        Ok(Self {
            cr: cr_set.into_iter().collect(),
            ncr: ncr_set.into_iter().collect(),
        })
    }

    /// Critical group as given, everything else non-critical.
    pub fn from_cr(cr: &[MachineId], all: &[MachineId]) -> Result<Self> {
        let ncr: Vec<_> = all.iter().copied().filter(|id| !cr.contains(id)).collect();
        Self::new(cr, &ncr, all)
    }

    pub fn cr(&self) -> &[MachineId] {
        &self.cr
    }

    pub fn ncr(&self) -> &[MachineId] {
        &self.ncr
    }

    pub fn swapped(&self) -> Self {
        Self {
            cr: self.ncr.clone(),
            ncr: self.cr.clone(),
        }
    }
}

/// Machine-CR against Machine-NCR.
pub fn build_cr_ncr(
    traj: &SystemTrajectory,
    params: &[MachineParams],
    sep: &GroupSeparation,
) -> Result<TwoMachineSeries> {
    let cr = aggregate_group(traj, params, sep.cr())?;
    let ncr = ReferenceMachine {
        kind: ReferenceKind::GroupNcr,
        series: aggregate_group(traj, params, sep.ncr())?,
    };
    Ok(pair_series(traj, Objective::Cr(sep.cr().to_vec()), &cr, &ncr))
}

/// A critical-group member against Machine-CR.
pub fn inner_group_series(
    traj: &SystemTrajectory,
    params: &[MachineParams],
    sep: &GroupSeparation,
    machine: MachineId,
) -> Result<TwoMachineSeries> {
    if !sep.cr().contains(&machine) {
        return Err(Error::InvalidSeparation(format!(
            "machine {machine} is not in the critical group"
        )));
    }
    let rm = ReferenceMachine {
        kind: ReferenceKind::GroupCr,
        series: aggregate_group(traj, params, sep.cr())?,
    };
    relative_series(traj, params, machine, &rm)
}
