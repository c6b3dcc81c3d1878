//! Small fixture systems shared by the unit tests.

use crate::swing::{
    electrical_power, simulate, FaultSchedule, MachineParams, NetworkStage, PowerSystem, StageLabel, SystemSnapshot,
    SystemTrajectory,
};

const B: [[f64; 3]; 3] = [[-3.0, 1.2, 0.9], [1.2, -3.1, 1.4], [0.9, 1.4, -2.9]];

fn stage(label: StageLabel, faulted: Option<usize>) -> NetworkStage {
    let mut b: Vec<Vec<f64>> = B.iter().map(|r| r.to_vec()).collect();
    if let Some(f) = faulted {
        for j in 0..3 {
            if j != f {
                b[f][j] = 0.0;
                b[j][f] = 0.0;
            }
        }
    }
    NetworkStage::new(label, vec![vec![0.0; 3]; 3], b).unwrap()
}

/// Three machines on an exact equilibrium; the fault weakens machine 1.
pub fn three_machine() -> (PowerSystem, SystemSnapshot) {
    let delta = vec![0.45, -0.05, -0.15];
    let pre = stage(StageLabel::Prefault, None);
    let inertia = [0.08, 0.12, 0.2];
    let emf = [1.1, 1.05, 1.0];
    let unit: Vec<MachineParams> = (0..3)
        .map(|i| MachineParams::new(i as u32 + 1, inertia[i], 0.0, emf[i]).unwrap())
        .collect();
    let pe = electrical_power(&delta, &pre, &unit).unwrap();
    let machines = unit
        .iter()
        .zip(&pe)
        .map(|(m, &p)| MachineParams::new(m.id.0, m.inertia, p, m.emf).unwrap())
        .collect();
    let system = PowerSystem::new(
        machines,
        pre,
        stage(StageLabel::FaultOn, Some(0)),
        stage(StageLabel::Postfault, None),
    )
    .unwrap();
    (system, SystemSnapshot::at_rest(0.0, delta))
}

pub fn three_machine_run(tc: f64, t_end: f64) -> (PowerSystem, SystemTrajectory) {
    let (system, initial) = three_machine();
    let schedule = FaultSchedule {
        t0: 0.0,
        tc,
        t_end,
        dt: 1e-3,
    };
    let traj = simulate(&system, &initial, &schedule).unwrap();
    (system, traj)
}
