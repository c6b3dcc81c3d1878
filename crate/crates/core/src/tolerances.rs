use serde::{Deserialize, Serialize};

/// Numerical thresholds used by detection and bookkeeping. Every field can be
/// overridden from a case file or the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed |ω| at an interpolated DSP.
    pub event: f64,
    /// Agreement between the energy-form and area-form residual KE.
    pub quadrature: f64,
    /// Largest residual KE still counted as exhausted at a DSP.
    pub stable_residual: f64,
    /// Displacement and speed below which a series counts as undisturbed.
    pub undisturbed: f64,
    /// Allowed pre-fault mismatch `max |Pm - Pe|`.
    pub equilibrium: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            event: 1e-6,
            quadrature: 1e-6,
            stable_residual: 1e-4,
            undisturbed: 1e-9,
            equilibrium: 1e-3,
        }
    }
}
