mod common;

use std::path::Path;

use proptest::prelude::*;

use tsa_core::assess::{assess_individual, select_critical};
use tsa_core::case::CaseFile;
use tsa_core::paradigm::{build_cr_ncr, build_machine_sys, energy_ledger, relative_series, GroupSeparation};
use tsa_core::quadrature::{hermite, simpson};
use tsa_core::swing::{simulate, PowerSystem, StageLabel, SystemTrajectory};
use tsa_core::Tolerances;

fn short(seed: u64, lossy: bool) -> (CaseFile, PowerSystem, SystemTrajectory) {
    let mut case = common::random_case(seed, lossy);
    case.fault.t_end = 1.5;
    case.fault.dt = 2e-3;
    let system = case.system().unwrap();
    let traj = simulate(&system, &case.initial_snapshot(), &case.fault).unwrap();
    (case, system, traj)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn simulation_is_deterministic(seed in 0u64..10_000, lossy: bool) {
        let (case, system, a) = short(seed, lossy);
        let b = simulate(&system, &case.initial_snapshot(), &case.fault).unwrap();
        prop_assert_eq!(a.snapshots(), b.snapshots());
    }

    #[test]
    fn coi_relative_angles_balance(seed in 0u64..10_000, lossy: bool) {
        let (_, system, traj) = short(seed, lossy);
        let p = system.machines();
        let rm = build_machine_sys(&traj, p).unwrap();
        let series: Vec<_> = p.iter().map(|m| relative_series(&traj, p, m.id, &rm).unwrap()).collect();
        for k in (0..traj.len()).step_by(50) {
            let d: f64 = p.iter().zip(&series).map(|(m, s)| m.inertia * s.delta[k]).sum();
            let w: f64 = p.iter().zip(&series).map(|(m, s)| m.inertia * s.omega[k]).sum();
            let scale: f64 = p.iter().map(|m| m.inertia).sum();
            prop_assert!(d.abs() / scale < 1e-12 && w.abs() / scale < 1e-12);
        }
    }

    #[test]
    fn residual_energy_equals_residual_area(seed in 0u64..10_000, lossy: bool) {
        let (_, system, traj) = short(seed, lossy);
        let p = system.machines();
        let rm = build_machine_sys(&traj, p).unwrap();
        for m in p {
            let s = relative_series(&traj, p, m.id, &rm).unwrap();
            let l = energy_ledger(&s, &Tolerances::default());
            if let (Some(e), Some(a)) = (l.residual_energy, l.residual_area) {
                prop_assert!((e - a).abs() <= 1e-9 * l.a_acc.max(1e-6), "{} vs {}", e, a);
            }
        }
    }

    #[test]
    fn raising_the_threshold_shrinks_the_critical_set(seed in 0u64..10_000, lo in 0.0f64..1.0, gap in 0.0f64..0.5) {
        let (_, system, traj) = short(seed, false);
        let wide = select_critical(&traj, system.machines(), lo).unwrap();
        let narrow = select_critical(&traj, system.machines(), (lo + gap).min(1.0)).unwrap();
        prop_assert!(!narrow.is_empty());
        prop_assert!(narrow.iter().all(|id| wide.contains(id)));
    }

    #[test]
    fn adding_critical_machines_keeps_their_verdicts(seed in 0u64..10_000) {
        let (_, system, traj) = short(seed, true);
        let p = system.machines();
        let one = assess_individual(&traj, p, &[p[0].id], &Tolerances::default()).unwrap();
        let all = assess_individual(&traj, p, traj.ids(), &Tolerances::default()).unwrap();
        let obj = &one.verdicts[0].objective;
        prop_assert_eq!(Some(&one.verdicts[0]), all.verdict(obj));
        prop_assert!(all.unstable_count >= one.unstable_count);
    }

    #[test]
    fn swapping_groups_negates_the_equivalent_motion(seed in 0u64..10_000, pick in any::<prop::sample::Index>()) {
        let (_, system, traj) = short(seed, true);
        let ids = traj.ids();
        let cr = [ids[pick.index(ids.len())]];
        let sep = GroupSeparation::from_cr(&cr, ids).unwrap();
        let a = build_cr_ncr(&traj, system.machines(), &sep).unwrap();
        let b = build_cr_ncr(&traj, system.machines(), &sep.swapped()).unwrap();
        for k in 0..a.len() {
            prop_assert!((a.delta[k] + b.delta[k]).abs() < 1e-12);
            prop_assert!((a.omega[k] + b.omega[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn an_unfaulted_equilibrium_stays_put(seed in 0u64..10_000, lossy: bool) {
        let mut case = common::random_case(seed, lossy);
        case.fault.t_end = 1.0;
        let base = case.system().unwrap();
        let pre = base.stage(StageLabel::Prefault);
        let system = PowerSystem::new(
            base.machines().to_vec(),
            pre.clone(),
            pre.relabeled(StageLabel::FaultOn),
            pre.relabeled(StageLabel::Postfault),
        )
        .unwrap();
        prop_assert!(system.equilibrium_residual(&case.initial_snapshot()).unwrap() < 1e-9);
        let traj = simulate(&system, &case.initial_snapshot(), &case.fault).unwrap();
        let start = &traj.snapshots()[0].delta;
        for s in traj.snapshots() {
            prop_assert!(s.omega.iter().all(|w| w.abs() < 1e-8));
            prop_assert!(s.delta.iter().zip(start).all(|(a, b)| (a - b).abs() < 1e-8));
        }
    }

    #[test]
    fn case_json_round_trips(seed in 0u64..10_000, lossy: bool) {
        let case = common::random_case(seed, lossy);
        let back = CaseFile::from_json(&case.to_json().unwrap(), Path::new("memory")).unwrap();
        prop_assert_eq!(back, case);
    }
}

proptest! {
    #[test]
    fn simpson_is_exact_on_cubics(c in prop::array::uniform4(-5.0f64..5.0), a in -3.0f64..3.0, w in 0.01f64..4.0) {
        let f = |x: f64| c[0] + x * (c[1] + x * (c[2] + x * c[3]));
        let anti = |x: f64| x * (c[0] + x * (c[1] / 2.0 + x * (c[2] / 3.0 + x * c[3] / 4.0)));
        let b = a + w;
        let exact = anti(b) - anti(a);
        let got = simpson(f, a, b, 2);
        prop_assert!((got - exact).abs() <= 1e-9 * (1.0 + exact.abs()));
        prop_assert_eq!(simpson(f, b, a, 2), -got);
    }

    #[test]
    fn hermite_reproduces_cubics(c in prop::array::uniform4(-5.0f64..5.0), h in 0.001f64..1.0, s in 0.0f64..=1.0) {
        let f = |x: f64| c[0] + x * (c[1] + x * (c[2] + x * c[3]));
        let df = |x: f64| c[1] + x * (2.0 * c[2] + x * 3.0 * c[3]);
        let v = hermite(f(0.0), f(h), df(0.0), df(h), h, s);
        prop_assert!((v - f(s * h)).abs() < 1e-9);
        prop_assert_eq!(hermite(f(0.0), f(h), df(0.0), df(h), h, 0.0), f(0.0));
    }
}
