#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tsa_core::case::{load_case, CaseFile};
use tsa_core::swing::{
    electrical_power, FaultSchedule, InfiniteBus, MachineParams, NetworkStage, PowerSystem, StageLabel,
    SystemSnapshot,
};

pub const BUNDLED: [&str; 3] = ["smib", "wscc3", "ne10"];

pub fn cases_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../cases")
}

pub fn bundled(name: &str) -> CaseFile {
    load_case(cases_dir().join(format!("{name}.json"))).unwrap()
}

/// A random reduced network: symmetric, synchronizing couplings and light
/// losses.
fn network(rng: &mut ChaCha8Rng, n: usize, lossy: bool) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut g = vec![vec![0.0; n]; n];
    let mut b = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let bij = rng.random_range(0.4..3.0);
            let gij = if lossy { rng.random_range(0.0..0.15) } else { 0.0 };
            b[i][j] = bij;
            b[j][i] = bij;
            g[i][j] = gij;
            g[j][i] = gij;
        }
        b[i][i] = -b[i].iter().sum::<f64>() - rng.random_range(0.5..2.0);
        if lossy {
            g[i][i] = rng.random_range(0.05..0.4);
        }
    }
    (g, b)
}

fn scaled(g: &[Vec<f64>], b: &[Vec<f64>], bus: usize, k: f64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut g = g.to_vec();
    let mut b = b.to_vec();
    let n = g.len();
    for j in 0..n {
        if j != bus {
            g[bus][j] *= k;
            g[j][bus] *= k;
            b[bus][j] *= k;
            b[j][bus] *= k;
        }
    }
    (g, b)
}

/// A desk-scale fault scenario built from `seed`: 2 to 10 machines starting
/// on an exact equilibrium, a fault that weakens one machine's couplings and
/// a post-fault network with one coupling partly lost.
pub fn random_case(seed: u64, lossy: bool) -> CaseFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=10usize);
    let (g, b) = network(&mut rng, n, lossy);
    let delta0: Vec<f64> = (0..n).map(|_| rng.random_range(-0.4..0.4)).collect();
    let emf: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..1.2)).collect();
    let pre = NetworkStage::new(StageLabel::Prefault, g.clone(), b.clone()).unwrap();
    let unit: Vec<MachineParams> = (0..n)
        .map(|i| MachineParams::new(i as u32 + 1, 1.0, 0.0, emf[i]).unwrap())
        .collect();
    let pe = electrical_power(&delta0, &pre, &unit).unwrap();
    // inertia grows with the machine's loading, as it would with its rating
    let machines: Vec<MachineParams> = unit
        .iter()
        .zip(&pe)
        .map(|(m, &p)| {
            let inertia = (p.abs() + 1.0) * rng.random_range(0.03..0.1);
            MachineParams::new(m.id.0, inertia, p, m.emf).unwrap()
        })
        .collect();

    let bus = rng.random_range(0..n);
    let (fg, fb) = scaled(&g, &b, bus, rng.random_range(0.0..0.3));
    let on = NetworkStage::new(StageLabel::FaultOn, fg, fb).unwrap();
    let (mut pg, mut pb) = (g.clone(), b.clone());
    if n > 2 {
        let j = (bus + 1 + rng.random_range(0..n - 1)) % n;
        let k = rng.random_range(0.5..1.0);
        pb[bus][j] *= k;
        pb[j][bus] *= k;
        pg[bus][j] *= k;
        pg[j][bus] *= k;
    }
    let post = NetworkStage::new(StageLabel::Postfault, pg, pb).unwrap();
    let system = PowerSystem::new(machines, pre, on, post).unwrap();
    let fault = FaultSchedule {
        t0: 0.0,
        tc: (rng.random_range(0.05..0.6f64) * 1000.0).round() / 1000.0,
        t_end: 4.0,
        dt: 1e-3,
    };
    let mut case = CaseFile::new(&format!("random{seed}"), &system, &SystemSnapshot::at_rest(0.0, delta0), fault);
    case.provenance = format!("randomized desk-scale case, seed {seed}");
    case
}

/// Machine against an infinite bus: `Pe = E Eb B sin δ`, fault-on transfer zero.
pub fn smib_system(pm: f64, e: f64, eb: f64, b: f64, inertia: f64) -> PowerSystem {
    let stage = |label, b: f64| {
        NetworkStage::new(label, vec![vec![0.0]], vec![vec![0.0]])
            .unwrap()
            .with_infinite_bus(InfiniteBus {
                emf: eb,
                conductance: vec![0.0],
                susceptance: vec![b],
            })
            .unwrap()
    };
    PowerSystem::new(
        vec![MachineParams::new(1, inertia, pm, e).unwrap()],
        stage(StageLabel::Prefault, b),
        stage(StageLabel::FaultOn, 0.0),
        stage(StageLabel::Postfault, b),
    )
    .unwrap()
}
