//! First-swing DLP/DSP detection on a two-machine series.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::two_machine::{Objective, TwoMachineSeries};
use crate::error::{Error, Result};
use crate::quadrature::{hermite, hermite_root, lerp};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    #[serde(rename = "IDLP")]
    Idlp,
    #[serde(rename = "IDSP")]
    Idsp,
    #[serde(rename = "EDLP")]
    Edlp,
    #[serde(rename = "EDSP")]
    Edsp,
}

impl EventKind {
    pub fn is_liberation(self) -> bool {
        matches!(self, EventKind::Idlp | EventKind::Edlp)
    }

    pub fn is_stationary(self) -> bool {
        !self.is_liberation()
    }

    fn of(liberation: bool, equivalent: bool) -> Self {
        match (liberation, equivalent) {
            (true, false) => EventKind::Idlp,
            (false, false) => EventKind::Idsp,
            (true, true) => EventKind::Edlp,
            (false, true) => EventKind::Edsp,
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Idlp => "IDLP",
            EventKind::Idsp => "IDSP",
            EventKind::Edlp => "EDLP",
            EventKind::Edsp => "EDSP",
        })
    }
}

impl FromStr for EventKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "IDLP" => Ok(EventKind::Idlp),
            "IDSP" => Ok(EventKind::Idsp),
            "EDLP" => Ok(EventKind::Edlp),
            "EDSP" => Ok(EventKind::Edsp),
            other => Err(Error::InvalidInput(format!("unknown event kind '{other}'"))),
        }
    }
}

/// A DLP or DSP located between samples `step` and `step + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityEvent {
    pub kind: EventKind,
    pub objective: Objective,
    pub time: f64,
    pub step: usize,
    /// Position inside the bracketing step, in [0, 1]. Zero only for a
    /// DLP already passed before clearing.
    pub fraction: f64,
    pub delta_rel: f64,
    pub omega_rel: f64,
    pub force: f64,
    /// Residual KE at the event, filled in by the energy ledger.
    pub residual_ke: f64,
}

/// Orientation of the first swing: +1 if the objective leads the RM after
/// clearing, -1 if it lags.
pub fn swing_direction(series: &TwoMachineSeries) -> f64 {
    let kc = series.clearing_index;
    let w = series.omega[kc];
    if w != 0.0 {
        w.signum()
    } else if series.force[kc] != 0.0 {
        series.force[kc].signum()
    } else {
        1.0
    }
}

/// True when the series has neither moved nor gained speed by clearing.
pub fn is_undisturbed(series: &TwoMachineSeries, tol: &Tolerances) -> bool {
    let kc = series.clearing_index;
    (series.delta[kc] - series.delta[0]).abs() < tol.undisturbed && series.omega[kc].abs() < tol.undisturbed
}

/// Locates the first DSP or DLP after clearing.
///
/// The series is oriented by [`swing_direction`] so that the first swing is
/// always outward. A DSP is the speed falling through zero; a DLP is the force
/// rising through zero while the objective still advances. When both happen
/// inside the same step, the DSP wins.
///
/// A DSP is the root of the cubic Hermite fit of ω (slopes `f / M`); a DLP
/// crossing is linear in f, whose slope is not sampled. The remaining state
/// comes from the same cubic fits (`dδ/dt = ω`, `M dω/dt = f`).
///
/// If the post-fault force was restoring somewhere along the fault-on path,
/// stopped restoring while the objective advanced and still drives at
/// clearing, the objective passed the post-fault DLP during the fault. That
/// DLP is reported at the clearing sample with no deceleration area.
pub fn detect_events(series: &TwoMachineSeries, tol: &Tolerances) -> Result<StabilityEvent> {
    if is_undisturbed(series, tol) {
        return Err(Error::Inconclusive(format!(
            "machine {} is not disturbed by the fault",
            series.objective
        )));
    }
    let s = swing_direction(series);
    let kc = series.clearing_index;
    let n = series.len();
    let equivalent = series.objective.is_equivalent();
    let h = series.dt;

    // last sample where the post-fault force restored, and whether the
    // objective was advancing when it stopped restoring
    let last_restoring = series.postfault_field.iter().rposition(|&p| s * p < 0.0);
    let liberated = last_restoring.is_some_and(|j| {
        let up = series.fault_index + j + 1;
        s * series.omega[kc] > 0.0 && s * series.force[kc] >= 0.0 && s * series.omega[up] > 0.0
    });
    if liberated {
        return Ok(StabilityEvent {
            kind: EventKind::of(true, equivalent),
            objective: series.objective.clone(),
            time: series.time[kc],
            step: kc,
            fraction: 0.0,
            delta_rel: series.delta[kc],
            omega_rel: series.omega[kc],
            force: series.force[kc],
            residual_ke: 0.0,
        });
    }

    for k in kc..n.saturating_sub(1) {
        let (w0, w1) = (s * series.omega[k], s * series.omega[k + 1]);
        let (g0, g1) = (s * series.force[k], s * series.force[k + 1]);
        if w0 > 0.0 && w1 <= 0.0 {
            let (a0, a1) = (series.force[k] / series.inertia, series.force[k + 1] / series.inertia);
            let frac = hermite_root(series.omega[k], series.omega[k + 1], a0, a1, h);
            let delta = hermite(
                series.delta[k],
                series.delta[k + 1],
                series.omega[k],
                series.omega[k + 1],
                h,
                frac,
            );
            return Ok(StabilityEvent {
                kind: EventKind::of(false, equivalent),
                objective: series.objective.clone(),
                time: lerp(series.time[k], series.time[k + 1], frac),
                step: k,
                fraction: frac,
                delta_rel: delta,
                omega_rel: hermite(series.omega[k], series.omega[k + 1], a0, a1, h, frac),
                force: lerp(series.force[k], series.force[k + 1], frac),
                residual_ke: 0.0,
            });
        }
        if w0 > 0.0 && g0 < 0.0 && g1 >= 0.0 {
            let frac = -g0 / (g1 - g0);
            return Ok(StabilityEvent {
                kind: EventKind::of(true, equivalent),
                objective: series.objective.clone(),
                time: lerp(series.time[k], series.time[k + 1], frac),
                step: k,
                fraction: frac,
                delta_rel: hermite(
                    series.delta[k],
                    series.delta[k + 1],
                    series.omega[k],
                    series.omega[k + 1],
                    h,
                    frac,
                ),
                omega_rel: hermite(
                    series.omega[k],
                    series.omega[k + 1],
                    series.force[k] / series.inertia,
                    series.force[k + 1] / series.inertia,
                    h,
                    frac,
                ),
                force: lerp(series.force[k], series.force[k + 1], frac),
                residual_ke: 0.0,
            });
        }
    }
    Err(Error::Inconclusive(format!(
        "machine {}: no DSP or DLP before t = {}",
        series.objective,
        series.time.last().copied().unwrap_or(0.0)
    )))
}
