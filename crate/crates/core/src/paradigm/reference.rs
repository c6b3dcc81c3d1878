//! Motion references: real machines, inertia-weighted groups, Machine-SYS.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::swing::{MachineId, MachineParams, SystemTrajectory};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    /// Center of inertia of every machine.
    MachineSys,
    /// Equivalent of the critical group.
    GroupCr,
    /// Equivalent of the non-critical group.
    GroupNcr,
    /// A single real machine.
    Machine(MachineId),
    /// An infinite bus: zero angle, zero speed, infinite inertia.
    Stationary,
}

/// Inertia-weighted equivalent motion of a set of machines.
///
/// `delta` and `omega` are COI averages over the members; `force` is the
/// plain sum of member net forces, so `inertia * d(omega)/dt = force`.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSeries {
    pub members: Vec<MachineId>,
    pub inertia: f64,
    pub delta: Vec<f64>,
    pub omega: Vec<f64>,
    pub force: Vec<f64>,
    /// Fault-on net force at the clearing sample.
    pub pre_clearing_force: f64,
    /// Post-fault net force along the fault-on samples.
    pub postfault_field: Vec<f64>,
}

impl AggregateSeries {
    fn stationary(len: usize, fault_on: usize) -> Self {
        Self {
            members: Vec::new(),
            inertia: f64::INFINITY,
            delta: vec![0.0; len],
            omega: vec![0.0; len],
            force: vec![0.0; len],
            pre_clearing_force: 0.0,
            postfault_field: vec![0.0; fault_on],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceMachine {
    pub kind: ReferenceKind,
    pub series: AggregateSeries,
}

impl ReferenceMachine {
    pub fn stationary(traj: &SystemTrajectory) -> Self {
        Self {
            kind: ReferenceKind::Stationary,
            series: AggregateSeries::stationary(traj.len(), traj.postfault_field().len()),
        }
    }

    pub fn machine(traj: &SystemTrajectory, params: &[MachineParams], id: MachineId) -> Result<Self> {
        Ok(Self {
            kind: ReferenceKind::Machine(id),
            series: aggregate_group(traj, params, &[id])?,
        })
    }

    pub fn inertia(&self) -> f64 {
        self.series.inertia
    }
}

fn check_params(traj: &SystemTrajectory, params: &[MachineParams]) -> Result<()> {
    if params.len() != traj.machine_count() {
        return Err(Error::shape("machine parameters vs trajectory", traj.machine_count(), params.len()));
    }
    if params.iter().zip(traj.ids()).any(|(p, &id)| p.id != id) {
        return Err(Error::InvalidInput("machine parameters not in trajectory order".into()));
    }
    Ok(())
}

/// Indices of the group members in trajectory order, duplicates removed.
pub(crate) fn member_indices(traj: &SystemTrajectory, group: &[MachineId]) -> Result<Vec<usize>> {
    if group.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let mut idx = group
        .iter()
        .map(|&id| traj.index_of(id))
        .collect::<Result<Vec<_>>>()?;
    idx.sort_unstable();
    idx.dedup();
    Ok(idx)
}

/// Inertia-weighted aggregation of a machine group.
pub fn aggregate_group(
    traj: &SystemTrajectory,
    params: &[MachineParams],
    group: &[MachineId],
) -> Result<AggregateSeries> {
    check_params(traj, params)?;
    let idx = member_indices(traj, group)?;
    let inertia: f64 = idx.iter().map(|&i| params[i].inertia).sum();
    let weights: Vec<f64> = idx.iter().map(|&i| params[i].inertia / inertia).collect();

    let n = traj.len();
    let mut delta = Vec::with_capacity(n);
    let mut omega = Vec::with_capacity(n);
    let mut force = Vec::with_capacity(n);
    for (k, snap) in traj.snapshots().iter().enumerate() {
        let p = traj.net_force(k);
        let mut d = 0.0;
        let mut w = 0.0;
        let mut f = 0.0;
        for (&i, &c) in idx.iter().zip(&weights) {
            d += c * snap.delta[i];
            w += c * snap.omega[i];
            f += p[i];
        }
        delta.push(d);
        omega.push(w);
        force.push(f);
    }
    let pre = traj.pre_clearing_force();
    let pre_clearing_force = idx.iter().fold(0.0, |acc, &i| acc + pre[i]);
    let postfault_field = traj
        .postfault_field()
        .iter()
        .map(|p| idx.iter().fold(0.0, |acc, &i| acc + p[i]))
        .collect();
    Ok(AggregateSeries {
        members: idx.iter().map(|&i| traj.ids()[i]).collect(),
        inertia,
        delta,
        omega,
        force,
        pre_clearing_force,
        postfault_field,
    })
}

/// Machine-SYS: the center of inertia of the whole system.
pub fn build_machine_sys(traj: &SystemTrajectory, params: &[MachineParams]) -> Result<ReferenceMachine> {
    let all = traj.ids().to_vec();
    Ok(ReferenceMachine {
        kind: ReferenceKind::MachineSys,
        series: aggregate_group(traj, params, &all)?,
    })
}
