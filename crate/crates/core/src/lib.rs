//! Transient stability assessment of classical multi-machine power systems.
//!
//! [`swing`] integrates the swing equations through a fault. [`paradigm`]
//! turns the resulting trajectory into two-machine series, detects DLP/DSP
//! events and keeps the energy ledger. [`assess`] applies the unity
//! principles machine by machine or to a single critical group. [`basin`] is
//! the one-body analogue used to sanity-check the energy bookkeeping.

pub mod assess;
pub mod basin;
pub mod case;
pub mod error;
pub mod output;
pub mod paradigm;
pub mod plot;
pub mod quadrature;
pub mod rk4;
pub mod run;
pub mod swing;
pub mod tolerances;

#[cfg(test)]
mod testkit;

pub use error::{Error, Result};
pub use swing::{
    electrical_power, simulate, FaultSchedule, MachineId, MachineParams, NetworkStage, PowerSystem, StageLabel,
    SystemSnapshot, SystemTrajectory,
};
pub use tolerances::Tolerances;
