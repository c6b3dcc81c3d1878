//! Ball in a gravity-variant basin: the one-body toy for DLP/DSP and NEC.
//!
//! The Earth is the fixed reference at `h = 0`, the bottom of the basin. The
//! field pulls the ball back toward the bottom until the boundary `h_b`, and
//! beyond it the field reverses and pushes the ball out.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{hermite, lerp, simpson};
use crate::rk4::{rk4_step, Rk4Workspace};

/// Panels per PE quadrature. Enough for round-off level accuracy on smooth profiles.
pub const PE_PANELS: usize = 2048;

pub trait BasinProfile {
    /// Net force on the ball at altitude `h` (N).
    fn force(&self, h: f64) -> f64;
    /// Altitude where the field reverses.
    fn boundary(&self) -> f64;
    /// Altitude of the stable resting point.
    fn bottom(&self) -> f64 {
        0.0
    }
}

/// `G(h) = -g sin(π h / h_b)` for `|h| <= 1.5 h_b`, held at the peak value
/// outside that band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineBasin {
    pub g: f64,
    pub boundary: f64,
}

impl SineBasin {
    pub fn new(g: f64, boundary: f64) -> Result<Self> {
        if !(g > 0.0 && boundary > 0.0 && g.is_finite() && boundary.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "basin needs positive field and boundary, got g = {g}, h_b = {boundary}"
            )));
        }
        Ok(Self { g, boundary })
    }
}

impl BasinProfile for SineBasin {
    fn force(&self, h: f64) -> f64 {
        let x = (h / self.boundary).clamp(-1.5, 1.5);
        -self.g * (PI * x).sin()
    }

    fn boundary(&self) -> f64 {
        self.boundary
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallState {
    pub h: f64,
    pub v: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallTrajectory {
    pub mass: f64,
    pub dt: f64,
    pub time: Vec<f64>,
    pub h: Vec<f64>,
    pub v: Vec<f64>,
}

impl BallTrajectory {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    pub fn state(&self, k: usize) -> BallState {
        BallState {
            h: self.h[k],
            v: self.v[k],
            mass: self.mass,
        }
    }
}

pub fn simulate_ball(
    profile: &impl BasinProfile,
    initial: BallState,
    t_end: f64,
    dt: f64,
) -> Result<BallTrajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    if !(initial.mass > 0.0) {
        return Err(Error::InvalidInput(format!("mass must be positive, got {}", initial.mass)));
    }
    let steps = (t_end / dt).round().max(0.0) as usize;
    let m = initial.mass;
    let mut traj = BallTrajectory {
        mass: m,
        dt,
        time: Vec::with_capacity(steps + 1),
        h: Vec::with_capacity(steps + 1),
        v: Vec::with_capacity(steps + 1),
    };
    let mut y = [initial.h, initial.v];
    let mut ws = Rk4Workspace::new(2);
    for k in 0..=steps {
        let t = k as f64 * dt;
        traj.time.push(t);
        traj.h.push(y[0]);
        traj.v.push(y[1]);
        if k == steps {
            break;
        }
        rk4_step(&mut y, t, dt, &mut ws, |_, s, d| {
            d[0] = s[1];
            d[1] = profile.force(s[0]) / m;
        });
        if !(y[0].is_finite() && y[1].is_finite()) {
            return Err(Error::SimulationDiverged { last_time: t });
        }
    }
    Ok(traj)
}

/// `(KE, PE, TE)` with PE measured from `h_ref`.
pub fn ball_energy(state: &BallState, profile: &impl BasinProfile, h_ref: f64) -> (f64, f64, f64) {
    let ke = 0.5 * state.mass * state.v * state.v;
    let pe = -simpson(|h| profile.force(h), h_ref, state.h, PE_PANELS);
    (ke, pe, ke + pe)
}

/// Work the field takes from the ball moving from `from` to `to`.
pub fn deceleration_area(profile: &impl BasinProfile, from: f64, to: f64) -> f64 {
    simpson(|h| -profile.force(h), from, to, PE_PANELS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallEventKind {
    /// Velocity reaches zero inside the basin.
    Dsp,
    /// Field turns from restoring to expelling while the ball still moves out.
    Dlp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallEvent {
    pub kind: BallEventKind,
    pub time: f64,
    pub step: usize,
    pub fraction: f64,
    pub h: f64,
    pub v: f64,
    pub force: f64,
}

impl BallEvent {
    pub fn is_stable(&self) -> bool {
        self.kind == BallEventKind::Dsp
    }
}

fn classify_from(traj: &BallTrajectory, profile: &impl BasinProfile, start: usize) -> Result<BallEvent> {
    let v0 = traj.v[start];
    let g_start = profile.force(traj.h[start]);
    let s = if v0 != 0.0 {
        v0.signum()
    } else if g_start != 0.0 {
        g_start.signum()
    } else {
        return Err(Error::Inconclusive("ball is at rest at an equilibrium".into()));
    };
    let m = traj.mass;
    let dt = traj.dt;
    for k in start..traj.len().saturating_sub(1) {
        let (w0, w1) = (s * traj.v[k], s * traj.v[k + 1]);
        let (f0, f1) = (profile.force(traj.h[k]), profile.force(traj.h[k + 1]));
        let (g0, g1) = (s * f0, s * f1);
        let hit = if w0 > 0.0 && w1 <= 0.0 {
            Some((BallEventKind::Dsp, w0 / (w0 - w1)))
        } else if w0 > 0.0 && g0 < 0.0 && g1 >= 0.0 {
            Some((BallEventKind::Dlp, -g0 / (g1 - g0)))
        } else {
            None
        };
        if let Some((kind, frac)) = hit {
            let h = hermite(traj.h[k], traj.h[k + 1], traj.v[k], traj.v[k + 1], dt, frac);
            let v = match kind {
                BallEventKind::Dsp => lerp(traj.v[k], traj.v[k + 1], frac),
                BallEventKind::Dlp => hermite(traj.v[k], traj.v[k + 1], f0 / m, f1 / m, dt, frac),
            };
            return Ok(BallEvent {
                kind,
                time: lerp(traj.time[k], traj.time[k + 1], frac),
                step: k,
                fraction: frac,
                h,
                v,
                force: lerp(f0, f1, frac),
            });
        }
    }
    Err(Error::Inconclusive("no DSP or DLP within the horizon".into()))
}

/// First DSP or DLP of the ball's outward swing.
pub fn classify_ball(traj: &BallTrajectory, profile: &impl BasinProfile) -> Result<BallEvent> {
    classify_from(traj, profile, 0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallEac {
    pub event: BallEvent,
    pub a_acc: f64,
    pub a_dec: f64,
    /// KE at clearing minus the PE gained up to the MPP.
    pub residual_energy: f64,
    /// `A_acc - A_dec`.
    pub residual_area: f64,
}

/// Equal-area bookkeeping from the clearing sample `clearing` to the MPP.
pub fn ball_eac(traj: &BallTrajectory, profile: &impl BasinProfile, clearing: usize) -> Result<BallEac> {
    if clearing >= traj.len() {
        return Err(Error::InvalidInput(format!(
            "clearing index {clearing} outside trajectory of {} samples",
            traj.len()
        )));
    }
    let event = classify_from(traj, profile, clearing)?;
    let p2 = traj.state(clearing);
    let mpp = BallState {
        h: event.h,
        v: event.v,
        mass: traj.mass,
    };
    let bottom = profile.bottom();
    let (ke_c, pe_c, _) = ball_energy(&p2, profile, bottom);
    let (_, pe_m, _) = ball_energy(&mpp, profile, bottom);
    let a_acc = 0.5 * p2.mass * p2.v * p2.v;
    let a_dec = deceleration_area(profile, p2.h, event.h);
    Ok(BallEac {
        event,
        a_acc,
        a_dec,
        residual_energy: ke_c - (pe_m - pe_c),
        residual_area: a_acc - a_dec,
    })
}

/// Launch speed from the bottom that exactly reaches the boundary.
pub fn barrier_speed(profile: &impl BasinProfile, mass: f64) -> f64 {
    let barrier = deceleration_area(profile, profile.bottom(), profile.boundary());
    (2.0 * barrier / mass).sqrt()
}
