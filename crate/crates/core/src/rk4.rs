//! Classic fixed-step fourth-order Runge-Kutta.

/// Scratch buffers reused across steps.
#[derive(Debug, Clone)]
pub struct Rk4Workspace {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Workspace {
    pub fn new(n: usize) -> Self {
        Self {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
        }
    }
}

/// Advances `y` by one step of size `dt`. `f(t, y, dydt)` writes the derivative.
pub fn rk4_step<F>(y: &mut [f64], t: f64, dt: f64, ws: &mut Rk4Workspace, mut f: F)
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    debug_assert_eq!(ws.k1.len(), n);
    let half = 0.5 * dt;

    f(t, y, &mut ws.k1);
    for i in 0..n {
        ws.tmp[i] = y[i] + half * ws.k1[i];
    }
    f(t + half, &ws.tmp, &mut ws.k2);
    for i in 0..n {
        ws.tmp[i] = y[i] + half * ws.k2[i];
    }
    f(t + half, &ws.tmp, &mut ws.k3);
    for i in 0..n {
        ws.tmp[i] = y[i] + dt * ws.k3[i];
    }
    f(t + dt, &ws.tmp, &mut ws.k4);
    for i in 0..n {
        y[i] += dt / 6.0 * (ws.k1[i] + 2.0 * ws.k2[i] + 2.0 * ws.k3[i] + ws.k4[i]);
    }
}
