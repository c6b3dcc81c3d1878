//! Classical-model multi-machine swing dynamics.
//!
//! Each machine is a constant EMF behind transient reactance, so with the
//! network reduced to the internal nodes the electrical output is
//!
//! ```text
//! Pe_i = E_i^2 G_ii + sum_{j != i} E_i E_j (G_ij cos d_ij + B_ij sin d_ij)
//! ```
//!
//! and the rotor obeys `dd_i/dt = w_i`, `M_i dw_i/dt = Pm_i - Pe_i` without
//! damping. A trajectory is produced by fixed-step RK4 through the pre-fault,
//! fault-on and post-fault network stages, with the stage switches snapped to
//! the integration grid.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rk4::{rk4_step, Rk4Workspace};

/// Tolerance on `|Y_ij - Y_ji|` for a reciprocal network.
pub const SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MachineId(pub u32);

impl fmt::Display for MachineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineParams {
    pub id: MachineId,
    /// Inertia constant M, p.u.·s².
    pub inertia: f64,
    /// Mechanical input Pm, p.u.
    pub mech_power: f64,
    /// Internal EMF magnitude, p.u.
    pub emf: f64,
}

impl MachineParams {
    pub fn new(id: u32, inertia: f64, mech_power: f64, emf: f64) -> Result<Self> {
        let m = Self {
            id: MachineId(id),
            inertia,
            mech_power,
            emf,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inertia > 0.0 && self.inertia.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "machine {}: inertia must be positive, got {}",
                self.id, self.inertia
            )));
        }
        if !(self.emf > 0.0 && self.emf.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "machine {}: emf must be positive, got {}",
                self.id, self.emf
            )));
        }
        if !self.mech_power.is_finite() {
            return Err(Error::InvalidInput(format!(
                "machine {}: mechanical power is not finite",
                self.id
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageLabel {
    Prefault,
    FaultOn,
    Postfault,
}

impl fmt::Display for StageLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StageLabel::Prefault => "prefault",
            StageLabel::FaultOn => "fault_on",
            StageLabel::Postfault => "postfault",
        })
    }
}

/// Constant-voltage source at angle zero folded into a reduced network.
/// Machine `i` couples to it through `G_ib + jB_ib`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfiniteBus {
    pub emf: f64,
    pub conductance: Vec<f64>,
    pub susceptance: Vec<f64>,
}

/// Reduced admittance matrix at the machine internal nodes for one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkStage {
    label: StageLabel,
    n: usize,
    g: Vec<f64>,
    b: Vec<f64>,
    infinite_bus: Option<InfiniteBus>,
}

impl NetworkStage {
    pub fn new(label: StageLabel, g: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> Result<Self> {
        let n = g.len();
        if b.len() != n {
            return Err(Error::shape(format!("{label} susceptance rows"), n, b.len()));
        }
        let mut gf = Vec::with_capacity(n * n);
        let mut bf = Vec::with_capacity(n * n);
        for (i, (gr, br)) in g.iter().zip(&b).enumerate() {
            if gr.len() != n {
                return Err(Error::shape(format!("{label} conductance row {i}"), n, gr.len()));
            }
            if br.len() != n {
                return Err(Error::shape(format!("{label} susceptance row {i}"), n, br.len()));
            }
            gf.extend_from_slice(gr);
            bf.extend_from_slice(br);
        }
        if gf.iter().chain(&bf).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("{label}: non-finite admittance entry")));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let dg = (gf[i * n + j] - gf[j * n + i]).abs();
                let db = (bf[i * n + j] - bf[j * n + i]).abs();
                if dg > SYMMETRY_TOL || db > SYMMETRY_TOL {
                    return Err(Error::InvalidInput(format!(
                        "{label}: admittance matrix not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self {
            label,
            n,
            g: gf,
            b: bf,
            infinite_bus: None,
        })
    }

    pub fn with_infinite_bus(mut self, bus: InfiniteBus) -> Result<Self> {
        if bus.conductance.len() != self.n {
            return Err(Error::shape(
                format!("{} infinite-bus conductance", self.label),
                self.n,
                bus.conductance.len(),
            ));
        }
        if bus.susceptance.len() != self.n {
            return Err(Error::shape(
                format!("{} infinite-bus susceptance", self.label),
                self.n,
                bus.susceptance.len(),
            ));
        }
        self.infinite_bus = Some(bus);
        Ok(self)
    }

    /// Same matrices under a different label.
    pub fn relabeled(&self, label: StageLabel) -> Self {
        Self {
            label,
            ..self.clone()
        }
    }

    pub fn label(&self) -> StageLabel {
        self.label
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn conductance(&self, i: usize, j: usize) -> f64 {
        self.g[i * self.n + j]
    }

    pub fn susceptance(&self, i: usize, j: usize) -> f64 {
        self.b[i * self.n + j]
    }

    pub fn infinite_bus(&self) -> Option<&InfiniteBus> {
        self.infinite_bus.as_ref()
    }

    pub fn conductance_rows(&self) -> Vec<Vec<f64>> {
        self.g.chunks(self.n.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn susceptance_rows(&self) -> Vec<Vec<f64>> {
        self.b.chunks(self.n.max(1)).map(<[f64]>::to_vec).collect()
    }

    /// Copy with every conductance (including the infinite-bus coupling) zeroed.
    pub fn lossless(&self) -> Self {
        let mut s = self.clone();
        s.g.iter_mut().for_each(|v| *v = 0.0);
        if let Some(bus) = s.infinite_bus.as_mut() {
            bus.conductance.iter_mut().for_each(|v| *v = 0.0);
        }
        s
    }

    fn power_into(&self, delta: &[f64], emf: &[f64], out: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = i * n;
            let mut p = emf[i] * emf[i] * self.g[row + i];
            for j in 0..n {
                if j == i {
                    continue;
                }
                let dij = delta[i] - delta[j];
                p += emf[i] * emf[j] * (self.g[row + j] * dij.cos() + self.b[row + j] * dij.sin());
            }
            if let Some(bus) = &self.infinite_bus {
                let d = delta[i];
                p += emf[i] * bus.emf * (bus.conductance[i] * d.cos() + bus.susceptance[i] * d.sin());
            }
            out[i] = p;
        }
    }

    /// Time derivative of the electrical output along a motion with speeds `omega`.
    fn power_rate_into(&self, delta: &[f64], omega: &[f64], emf: &[f64], out: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = i * n;
            let mut r = 0.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                let dij = delta[i] - delta[j];
                r += emf[i] * emf[j] * (self.b[row + j] * dij.cos() - self.g[row + j] * dij.sin()) * (omega[i] - omega[j]);
            }
            if let Some(bus) = &self.infinite_bus {
                let d = delta[i];
                r += emf[i] * bus.emf * (bus.susceptance[i] * d.cos() - bus.conductance[i] * d.sin()) * omega[i];
            }
            out[i] = r;
        }
    }
}

fn check_dims(delta_len: usize, stage: &NetworkStage, params: &[MachineParams]) -> Result<()> {
    if params.len() != stage.size() {
        return Err(Error::shape(
            format!("{} matrix vs machine count", stage.label()),
            params.len(),
            stage.size(),
        ));
    }
    if delta_len != params.len() {
        return Err(Error::shape("angle vector", params.len(), delta_len));
    }
    Ok(())
}

/// Electrical output of every machine for the given angles (radians).
pub fn electrical_power(
    delta: &[f64],
    stage: &NetworkStage,
    params: &[MachineParams],
) -> Result<Vec<f64>> {
    check_dims(delta.len(), stage, params)?;
    let emf: Vec<f64> = params.iter().map(|m| m.emf).collect();
    let mut out = vec![0.0; params.len()];
    stage.power_into(delta, &emf, &mut out);
    Ok(out)
}

/// Rotor angles (rad) and speed deviations (rad/s) at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSnapshot {
    pub time: f64,
    pub delta: Vec<f64>,
    pub omega: Vec<f64>,
}

impl SystemSnapshot {
    pub fn at_rest(time: f64, delta: Vec<f64>) -> Self {
        let omega = vec![0.0; delta.len()];
        Self { time, delta, omega }
    }
}

/// `(dδ/dt, dω/dt)` of the swing equations.
pub fn derivatives(
    snapshot: &SystemSnapshot,
    stage: &NetworkStage,
    params: &[MachineParams],
) -> Result<(Vec<f64>, Vec<f64>)> {
    check_dims(snapshot.delta.len(), stage, params)?;
    if snapshot.omega.len() != params.len() {
        return Err(Error::shape("speed vector", params.len(), snapshot.omega.len()));
    }
    let pe = electrical_power(&snapshot.delta, stage, params)?;
    let domega = params
        .iter()
        .zip(&pe)
        .map(|(m, pe)| (m.mech_power - pe) / m.inertia)
        .collect();
    Ok((snapshot.omega.clone(), domega))
}

/// Machines plus the three network stages of a fault scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSystem {
    machines: Vec<MachineParams>,
    prefault: NetworkStage,
    fault_on: NetworkStage,
    postfault: NetworkStage,
}

impl PowerSystem {
    pub fn new(
        machines: Vec<MachineParams>,
        prefault: NetworkStage,
        fault_on: NetworkStage,
        postfault: NetworkStage,
    ) -> Result<Self> {
        if machines.is_empty() {
            return Err(Error::InvalidInput("no machines".into()));
        }
        for m in &machines {
            m.validate()?;
        }
        let mut ids: Vec<_> = machines.iter().map(|m| m.id).collect();
        ids.sort();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!("duplicate machine id {}", w[0])));
        }
        for stage in [&prefault, &fault_on, &postfault] {
            if stage.size() != machines.len() {
                return Err(Error::shape(
                    format!("{} matrix vs machine count", stage.label()),
                    machines.len(),
                    stage.size(),
                ));
            }
        }
        Ok(Self {
            machines,
            prefault: prefault.relabeled(StageLabel::Prefault),
            fault_on: fault_on.relabeled(StageLabel::FaultOn),
            postfault: postfault.relabeled(StageLabel::Postfault),
        })
    }

    pub fn machines(&self) -> &[MachineParams] {
        &self.machines
    }

    pub fn len(&self) -> usize {
        self.machines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.machines.is_empty()
    }

    pub fn ids(&self) -> Vec<MachineId> {
        self.machines.iter().map(|m| m.id).collect()
    }

    pub fn index_of(&self, id: MachineId) -> Result<usize> {
        self.machines
            .iter()
            .position(|m| m.id == id)
            .ok_or(Error::UnknownMachine(id))
    }

    pub fn stage(&self, label: StageLabel) -> &NetworkStage {
        match label {
            StageLabel::Prefault => &self.prefault,
            StageLabel::FaultOn => &self.fault_on,
            StageLabel::Postfault => &self.postfault,
        }
    }

    /// True when the post-fault network contains an infinite bus, which then
    /// serves as the stationary motion reference.
    pub fn has_infinite_bus(&self) -> bool {
        self.postfault.infinite_bus().is_some()
    }

    /// `max_i |Pm_i - Pe_i|` of the pre-fault network at the snapshot angles.
    pub fn equilibrium_residual(&self, snapshot: &SystemSnapshot) -> Result<f64> {
        let pe = electrical_power(&snapshot.delta, &self.prefault, &self.machines)?;
        Ok(self
            .machines
            .iter()
            .zip(&pe)
            .map(|(m, pe)| (m.mech_power - pe).abs())
            .fold(0.0, f64::max))
    }
}

/// Fault application/clearing times, horizon and step, all in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaultSchedule {
    pub t0: f64,
    pub tc: f64,
    pub t_end: f64,
    pub dt: f64,
}

impl FaultSchedule {
    pub fn validate(&self, t_start: f64) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidInput(format!("dt must be positive, got {}", self.dt)));
        }
        if !(t_start <= self.t0 && self.t0 <= self.tc && self.tc <= self.t_end) {
            return Err(Error::InvalidInput(format!(
                "need t_start <= t0 <= tc <= t_end, got {t_start}, {}, {}, {}",
                self.t0, self.tc, self.t_end
            )));
        }
        Ok(())
    }
}

/// Synchronous-reference trajectory on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemTrajectory {
    ids: Vec<MachineId>,
    snapshots: Vec<SystemSnapshot>,
    net_force: Vec<Vec<f64>>,
    dt: f64,
    fault_index: usize,
    clearing_index: usize,
    pre_clearing_force: Vec<f64>,
    postfault_field: Vec<Vec<f64>>,
    stationary_reference: bool,
}

impl SystemTrajectory {
    pub fn ids(&self) -> &[MachineId] {
        &self.ids
    }

    pub fn machine_count(&self) -> usize {
        self.ids.len()
    }

    pub fn snapshots(&self) -> &[SystemSnapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn time(&self, k: usize) -> f64 {
        self.snapshots[k].time
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }

    /// Net accelerating power `Pm - Pe` per machine at sample `k`, using the
    /// stage active at that instant.
    pub fn net_force(&self, k: usize) -> &[f64] {
        &self.net_force[k]
    }

    /// Net force at the clearing instant evaluated with the fault-on network
    /// (the left limit at the switch).
    pub fn pre_clearing_force(&self) -> &[f64] {
        &self.pre_clearing_force
    }

    /// Net force the post-fault network would produce at each fault-on
    /// sample, indexed from the fault sample up to (not including) clearing.
    pub fn postfault_field(&self) -> &[Vec<f64>] {
        &self.postfault_field
    }

    pub fn fault_index(&self) -> usize {
        self.fault_index
    }

    pub fn clearing_index(&self) -> usize {
        self.clearing_index
    }

    /// Grid-snapped fault application time.
    pub fn fault_time(&self) -> f64 {
        self.time(self.fault_index)
    }

    /// Grid-snapped clearing time.
    pub fn clearing_time(&self) -> f64 {
        self.time(self.clearing_index)
    }

    pub fn end_time(&self) -> f64 {
        self.time(self.len() - 1)
    }

    pub fn has_stationary_reference(&self) -> bool {
        self.stationary_reference
    }

    pub fn index_of(&self, id: MachineId) -> Result<usize> {
        self.ids
            .iter()
            .position(|&m| m == id)
            .ok_or(Error::UnknownMachine(id))
    }

    pub fn delta_series(&self, machine: usize) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.delta[machine]).collect()
    }

    pub fn omega_series(&self, machine: usize) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.omega[machine]).collect()
    }

    pub fn force_series(&self, machine: usize) -> Vec<f64> {
        self.net_force.iter().map(|p| p[machine]).collect()
    }
}

fn grid_index(t: f64, t_start: f64, dt: f64) -> usize {
    ((t - t_start) / dt).round() as usize
}

/// Integrates the swing equations through the fault schedule.
pub fn simulate(
    system: &PowerSystem,
    initial: &SystemSnapshot,
    schedule: &FaultSchedule,
) -> Result<SystemTrajectory> {
    let n = system.len();
    if initial.delta.len() != n {
        return Err(Error::shape("initial angle vector", n, initial.delta.len()));
    }
    if initial.omega.len() != n {
        return Err(Error::shape("initial speed vector", n, initial.omega.len()));
    }
    if initial.delta.iter().chain(&initial.omega).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("initial snapshot is not finite".into()));
    }
    let t_start = initial.time;
    schedule.validate(t_start)?;
    let dt = schedule.dt;
    let fault_index = grid_index(schedule.t0, t_start, dt);
    let clearing_index = grid_index(schedule.tc, t_start, dt).max(fault_index);
    let steps = grid_index(schedule.t_end, t_start, dt).max(clearing_index);

    let stage_at = |k: usize| -> &NetworkStage {
        if k < fault_index {
            system.stage(StageLabel::Prefault)
        } else if k < clearing_index {
            system.stage(StageLabel::FaultOn)
        } else {
            system.stage(StageLabel::Postfault)
        }
    };

    let machines = system.machines();
    let emf: Vec<f64> = machines.iter().map(|m| m.emf).collect();
    let pm: Vec<f64> = machines.iter().map(|m| m.mech_power).collect();
    let inertia: Vec<f64> = machines.iter().map(|m| m.inertia).collect();

    let net_force_at = |stage: &NetworkStage, delta: &[f64]| -> Vec<f64> {
        let mut pe = vec![0.0; n];
        stage.power_into(delta, &emf, &mut pe);
        pm.iter().zip(&pe).map(|(pm, pe)| pm - pe).collect()
    };

    let mut snapshots = Vec::with_capacity(steps + 1);
    let mut net_force = Vec::with_capacity(steps + 1);
    let mut pre_clearing_force = Vec::new();
    let mut postfault_field = Vec::with_capacity(clearing_index - fault_index);

    let mut y: Vec<f64> = initial.delta.iter().chain(&initial.omega).copied().collect();
    let mut ws = Rk4Workspace::new(2 * n);
    let mut pe = vec![0.0; n];

    for k in 0..=steps {
        let time = t_start + k as f64 * dt;
        let (delta, omega) = y.split_at(n);
        if k == clearing_index {
            let before = if clearing_index > fault_index {
                system.stage(StageLabel::FaultOn)
            } else if fault_index > 0 {
                system.stage(StageLabel::Prefault)
            } else {
                system.stage(StageLabel::Postfault)
            };
            pre_clearing_force = net_force_at(before, delta);
        }
        if (fault_index..clearing_index).contains(&k) {
            postfault_field.push(net_force_at(system.stage(StageLabel::Postfault), delta));
        }
        net_force.push(net_force_at(stage_at(k), delta));
        snapshots.push(SystemSnapshot {
            time,
            delta: delta.to_vec(),
            omega: omega.to_vec(),
        });
        if k == steps {
            break;
        }
        let stage = stage_at(k);
        rk4_step(&mut y, time, dt, &mut ws, |_, state, dydt| {
            let (d, w) = state.split_at(n);
            stage.power_into(d, &emf, &mut pe);
            let (dd, dw) = dydt.split_at_mut(n);
            dd.copy_from_slice(w);
            for i in 0..n {
                dw[i] = (pm[i] - pe[i]) / inertia[i];
            }
        });
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::SimulationDiverged { last_time: time });
        }
    }

    Ok(SystemTrajectory {
        ids: system.ids(),
        snapshots,
        net_force,
        dt,
        fault_index,
        clearing_index,
        pre_clearing_force,
        postfault_field,
        stationary_reference: system.has_infinite_bus(),
    })
}

/// System transient energy `Σ ½M_iω_i² − Σ ∫ P_i dδ_i` from sample `from`
/// onward.
///
/// Each step's work `∫ Σ P_i ω_i dt` uses the trapezoid rule with its
/// endpoint-derivative correction, evaluated under the network that drove
/// that step, so the potential part is fourth-order in `dt`.
pub fn transient_energy(traj: &SystemTrajectory, system: &PowerSystem, from: usize) -> Vec<f64> {
    let machines = system.machines();
    let n = machines.len();
    let emf: Vec<f64> = machines.iter().map(|m| m.emf).collect();
    let stage_of_step = |k: usize| -> &NetworkStage {
        if k < traj.fault_index() {
            system.stage(StageLabel::Prefault)
        } else if k < traj.clearing_index() {
            system.stage(StageLabel::FaultOn)
        } else {
            system.stage(StageLabel::Postfault)
        }
    };
    let mut pe_buf = vec![0.0; n];
    let mut rate_buf = vec![0.0; n];
    // power flowing into the rotors and its time derivative
    let mut work_rate = |stage: &NetworkStage, s: &SystemSnapshot| -> (f64, f64) {
        stage.power_into(&s.delta, &emf, &mut pe_buf);
        stage.power_rate_into(&s.delta, &s.omega, &emf, &mut rate_buf);
        let mut g = 0.0;
        let mut dg = 0.0;
        for i in 0..n {
            let f = machines[i].mech_power - pe_buf[i];
            g += f * s.omega[i];
            dg += f * f / machines[i].inertia - rate_buf[i] * s.omega[i];
        }
        (g, dg)
    };

    let snaps = traj.snapshots();
    let h = traj.dt();
    let mut pe = 0.0;
    let mut out = Vec::with_capacity(snaps.len().saturating_sub(from));
    for k in from..snaps.len() {
        if k > from {
            let stage = stage_of_step(k - 1);
            let (g0, dg0) = work_rate(stage, &snaps[k - 1]);
            let (g1, dg1) = work_rate(stage, &snaps[k]);
            pe -= 0.5 * h * (g0 + g1) + h * h / 12.0 * (dg0 - dg1);
        }
        let ke: f64 = machines
            .iter()
            .zip(&snaps[k].omega)
            .map(|(m, w)| 0.5 * m.inertia * w * w)
            .sum();
        out.push(ke + pe);
    }
    out
}
