//! Transient energy of a two-machine series and the equal-area bookkeeping.

use super::events::{detect_events, StabilityEvent};
use super::two_machine::TwoMachineSeries;
use crate::error::Error;
use crate::quadrature::trapezoid_path;
use crate::tolerances::Tolerances;

/// Kinetic and potential energy after clearing, plus the residual KE at the
/// MPP computed two ways.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyLedger {
    /// Index of the clearing sample; `kinetic[0]` belongs to it.
    pub start_index: usize,
    pub kinetic: Vec<f64>,
    /// Path-integrated post-fault PE, zero at clearing.
    pub potential: Vec<f64>,
    /// KE gained during the fault.
    pub a_acc: f64,
    pub mpp: Option<StabilityEvent>,
    /// `-∫ f dδ` from clearing to the MPP.
    pub a_dec: Option<f64>,
    /// `KE(tc) - ΔPE(tc → MPP)`.
    pub residual_energy: Option<f64>,
    /// `A_acc - A_dec`.
    pub residual_area: Option<f64>,
    /// `½ M ω²` at the interpolated MPP.
    pub residual_kinetic: Option<f64>,
    pub inconclusive: Option<String>,
    /// Numerical checks that failed without changing the verdict.
    pub warnings: Vec<String>,
}

impl EnergyLedger {
    pub fn total(&self) -> Vec<f64> {
        self.kinetic.iter().zip(&self.potential).map(|(k, p)| k + p).collect()
    }
}

/// Points of the force-angle path from clearing to the MPP.
pub fn deceleration_path(series: &TwoMachineSeries, mpp: &StabilityEvent) -> (Vec<f64>, Vec<f64>) {
    let kc = series.clearing_index;
    let mut x: Vec<f64> = series.delta[kc..=mpp.step].to_vec();
    let mut y: Vec<f64> = series.force[kc..=mpp.step].to_vec();
    x.push(mpp.delta_rel);
    y.push(mpp.force);
    (x, y)
}

/// Points of the fault-on force-angle path from fault application to
/// clearing, ending on the fault-on force at the clearing angle.
pub fn acceleration_path(series: &TwoMachineSeries) -> (Vec<f64>, Vec<f64>) {
    let (k0, kc) = (series.fault_index, series.clearing_index);
    let x = series.delta[k0..=kc].to_vec();
    let mut y = series.force[k0..kc].to_vec();
    y.push(series.pre_clearing_force);
    (x, y)
}

/// Deceleration area `-∫ f dδ` along the realized path to the MPP.
pub fn deceleration_area(series: &TwoMachineSeries, mpp: &StabilityEvent) -> f64 {
    let (x, y) = deceleration_path(series, mpp);
    -trapezoid_path(&x, &y)
}

pub fn energy_ledger(series: &TwoMachineSeries, tol: &Tolerances) -> EnergyLedger {
    let kc = series.clearing_index;
    let m = series.inertia;
    let kinetic: Vec<f64> = series.omega[kc..].iter().map(|w| 0.5 * m * w * w).collect();
    let mut potential = Vec::with_capacity(kinetic.len());
    potential.push(0.0);
    for k in kc..series.len() - 1 {
        let last = *potential.last().unwrap();
        potential.push(last - 0.5 * (series.force[k] + series.force[k + 1]) * (series.delta[k + 1] - series.delta[k]));
    }
    let a_acc = kinetic[0];

    let mut ledger = EnergyLedger {
        start_index: kc,
        kinetic,
        potential,
        a_acc,
        mpp: None,
        a_dec: None,
        residual_energy: None,
        residual_area: None,
        residual_kinetic: None,
        inconclusive: None,
        warnings: Vec::new(),
    };
    match detect_events(series, tol) {
        Ok(mut ev) => {
            let k = ev.step;
            let pe_mpp = ledger.potential[k - kc] - 0.5 * (series.force[k] + ev.force) * (ev.delta_rel - series.delta[k]);
            let residual = a_acc - pe_mpp;
            let a_dec = deceleration_area(series, &ev);
            ev.residual_ke = residual;
            ledger.warnings = checks(&ev, a_acc - a_dec, tol);
            ledger.residual_energy = Some(residual);
            ledger.residual_area = Some(a_acc - a_dec);
            ledger.residual_kinetic = Some(0.5 * m * ev.omega_rel * ev.omega_rel);
            ledger.a_dec = Some(a_dec);
            ledger.mpp = Some(ev);
        }
        Err(Error::Inconclusive(why)) => ledger.inconclusive = Some(why),
        Err(e) => ledger.inconclusive = Some(e.to_string()),
    }
    ledger
}

fn checks(ev: &StabilityEvent, area_form: f64, tol: &Tolerances) -> Vec<String> {
    let mut w = Vec::new();
    let gap = (ev.residual_ke - area_form).abs();
    if gap > tol.quadrature {
        w.push(format!("energy and area forms of the residual differ by {gap:.3e}"));
    }
    if ev.kind.is_stationary() {
        if ev.residual_ke.abs() > tol.stable_residual {
            w.push(format!("residual KE {:.3e} left at the DSP; try a smaller dt", ev.residual_ke));
        }
        if ev.omega_rel.abs() > tol.event {
            w.push(format!("speed {:.3e} left at the DSP", ev.omega_rel));
        }
    }
    w
}
