//! Case files: one JSON document per fault scenario.
//!
//! Angles are stored in degrees, everything else in SI seconds and per-unit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::paradigm::GroupSeparation;
use crate::swing::{
    FaultSchedule, InfiniteBus, MachineId, MachineParams, NetworkStage, PowerSystem, StageLabel, SystemSnapshot,
};
use crate::tolerances::Tolerances;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfiniteBusSpec {
    pub emf: f64,
    pub g: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageSpec {
    pub g: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infinite_bus: Option<InfiniteBusSpec>,
}

impl StageSpec {
    pub fn from_stage(stage: &NetworkStage) -> Self {
        Self {
            g: stage.conductance_rows(),
            b: stage.susceptance_rows(),
            infinite_bus: stage.infinite_bus().map(|bus| InfiniteBusSpec {
                emf: bus.emf,
                g: bus.conductance.clone(),
                b: bus.susceptance.clone(),
            }),
        }
    }

    pub fn to_stage(&self, label: StageLabel) -> Result<NetworkStage> {
        let stage = NetworkStage::new(label, self.g.clone(), self.b.clone())?;
        match &self.infinite_bus {
            Some(bus) => stage.with_infinite_bus(InfiniteBus {
                emf: bus.emf,
                conductance: bus.g.clone(),
                susceptance: bus.b.clone(),
            }),
            None => Ok(stage),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stages {
    pub prefault: StageSpec,
    pub fault_on: StageSpec,
    pub postfault: StageSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub time: f64,
    pub delta_deg: Vec<f64>,
    pub omega: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparationSpec {
    pub cr: Vec<MachineId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ncr: Option<Vec<MachineId>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    pub schema_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub provenance: String,
    #[serde(default = "default_base")]
    pub base_mva: f64,
    #[serde(default = "default_frequency")]
    pub frequency_hz: f64,
    pub machines: Vec<MachineParams>,
    pub stages: Stages,
    pub initial: InitialSpec,
    pub fault: FaultSchedule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critical: Option<Vec<MachineId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critical_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separation: Option<SeparationSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

fn default_base() -> f64 {
    100.0
}

fn default_frequency() -> f64 {
    60.0
}

impl CaseFile {
    pub fn new(name: &str, system: &PowerSystem, initial: &SystemSnapshot, fault: FaultSchedule) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            name: name.to_string(),
            provenance: String::new(),
            base_mva: default_base(),
            frequency_hz: default_frequency(),
            machines: system.machines().to_vec(),
            stages: Stages {
                prefault: StageSpec::from_stage(system.stage(StageLabel::Prefault)),
                fault_on: StageSpec::from_stage(system.stage(StageLabel::FaultOn)),
                postfault: StageSpec::from_stage(system.stage(StageLabel::Postfault)),
            },
            initial: InitialSpec {
                time: initial.time,
                delta_deg: initial.delta.iter().map(|d| d.to_degrees()).collect(),
                omega: initial.omega.clone(),
            },
            fault,
            critical: None,
            critical_threshold: None,
            separation: None,
            tolerances: None,
        }
    }

    pub fn ids(&self) -> Vec<MachineId> {
        self.machines.iter().map(|m| m.id).collect()
    }

    pub fn system(&self) -> Result<PowerSystem> {
        let stage = |spec: &StageSpec, label: StageLabel| {
            spec.to_stage(label)
                .map_err(|e| Error::Validation(format!("stage {label}: {e}")))
        };
        PowerSystem::new(
            self.machines.clone(),
            stage(&self.stages.prefault, StageLabel::Prefault)?,
            stage(&self.stages.fault_on, StageLabel::FaultOn)?,
            stage(&self.stages.postfault, StageLabel::Postfault)?,
        )
        .map_err(|e| match e {
            Error::Validation(_) => e,
            other => Error::Validation(other.to_string()),
        })
    }

    pub fn initial_snapshot(&self) -> SystemSnapshot {
        SystemSnapshot {
            time: self.initial.time,
            delta: self.initial.delta_deg.iter().map(|d| d.to_radians()).collect(),
            omega: self.initial.omega.clone(),
        }
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances.unwrap_or_default()
    }

    pub fn separation(&self) -> Result<Option<GroupSeparation>> {
        let ids = self.ids();
        self.separation
            .as_ref()
            .map(|s| match &s.ncr {
                Some(ncr) => GroupSeparation::new(&s.cr, ncr, &ids),
                None => GroupSeparation::from_cr(&s.cr, &ids),
            })
            .transpose()
    }

    /// Checks every invariant a loaded case must satisfy.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Validation(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let system = self.system()?;
        let n = system.len();
        if self.initial.delta_deg.len() != n || self.initial.omega.len() != n {
            return Err(Error::Validation(format!(
                "initial state needs {n} angles and speeds, got {} and {}",
                self.initial.delta_deg.len(),
                self.initial.omega.len()
            )));
        }
        self.fault
            .validate(self.initial.time)
            .map_err(|e| Error::Validation(format!("fault schedule: {e}")))?;
        let ids = self.ids();
        for id in self.critical.iter().flatten() {
            if !ids.contains(id) {
                return Err(Error::Validation(format!("critical set names unknown machine {id}")));
            }
        }
        if let Some(t) = self.critical_threshold {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::Validation(format!("critical_threshold {t} outside [0, 1]")));
            }
        }
        self.separation()
            .map_err(|e| Error::Validation(format!("separation: {e}")))?;
        let tol = self.tolerances();
        let residual = system.equilibrium_residual(&self.initial_snapshot())?;
        if !(residual < tol.equilibrium) {
            return Err(Error::Validation(format!(
                "initial state is not a pre-fault equilibrium: max |Pm - Pe| = {residual:e} p.u."
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let case: CaseFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        case.validate()?;
        Ok(case)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

pub fn load_case(path: impl AsRef<Path>) -> Result<CaseFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    CaseFile::from_json(&text, path)
}

pub fn save_case(case: &CaseFile, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, case.to_json()?)?;
    Ok(())
}
