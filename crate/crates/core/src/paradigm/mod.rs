//! Trajectory, modeling and energy paradigms over a simulated trajectory.

pub mod energy;
pub mod events;
pub mod reference;
pub mod two_machine;

pub use energy::{acceleration_path, deceleration_area, deceleration_path, energy_ledger, EnergyLedger};
pub use events::{detect_events, is_undisturbed, swing_direction, EventKind, StabilityEvent};
pub use reference::{aggregate_group, build_machine_sys, AggregateSeries, ReferenceKind, ReferenceMachine};
pub use two_machine::{
    build_cr_ncr, inner_group_series, pair_series, relative_series, GroupSeparation, Objective, TwoMachineSeries,
};
