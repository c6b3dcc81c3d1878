use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn case(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../../cases/{name}.json"))
}

fn tsa(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsa"))
        .args(args)
        .env("TSA_OUT_DIR", out)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn stable_case_exits_zero_with_a_stable_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let o = tsa(&["assess", case("wscc3").to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().last(), Some("SYSTEM STABLE"));
    for f in ["wscc3_trajectory.csv", "wscc3_individual_events.csv", "wscc3_individual_report.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn unstable_case_still_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = tsa(&["assess", case("smib").to_str().unwrap(), "--tc", "0.3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().last(), Some("SYSTEM UNSTABLE"));
}

#[test]
fn short_horizon_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let o = tsa(&["assess", case("smib").to_str().unwrap(), "--tc", "0.05", "--t-end", "0.08"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert!(text.contains("try a longer t_end"));
    assert!(!text.contains("inconclusive: inconclusive"));
}

#[test]
fn bad_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = tsa(&["assess", "no-such-case.json"], dir.path());
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("no-such-case.json"));

    let bad_tc = tsa(&["assess", case("smib").to_str().unwrap(), "--tc=-1"], dir.path());
    assert_eq!(bad_tc.status.code(), Some(1));
}

#[test]
fn equivalent_mode_gives_one_edlp_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = tsa(&["assess", case("ne10").to_str().unwrap(), "--mode", "equivalent"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let events: Vec<&str> = text.lines().filter(|l| l.trim_start().starts_with("t = ")).collect();
    assert_eq!(events.len(), 1);
    assert!(events[0].contains("EDLP") && events[0].contains("Machine-CR {1, 10}"));
    assert_eq!(text.lines().last(), Some("SYSTEM UNSTABLE"));
}

#[test]
fn out_flag_overrides_the_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let o = tsa(
        &["simulate", case("smib").to_str().unwrap(), "--out", flag_dir.path().to_str().unwrap()],
        env_dir.path(),
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(flag_dir.path().join("smib_trajectory.csv").exists());
    assert!(!env_dir.path().join("smib_trajectory.csv").exists());

    let o = tsa(&["simulate", case("smib").to_str().unwrap()], env_dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(env_dir.path().join("smib_trajectory.csv").exists());
}

#[test]
fn plot_views() {
    let dir = tempfile::tempdir().unwrap();
    let ne10 = case("ne10");
    let o = tsa(&["plot", ne10.to_str().unwrap(), "--view", "sync,sys,eac:cr"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
    assert!(dir.path().join("ne10_eac_cr.svg").exists());

    let o = tsa(&["plot", ne10.to_str().unwrap(), "--view", "sys,polar"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("polar"));

    let empty = tempfile::tempdir().unwrap();
    let o = tsa(&["assess", case("smib").to_str().unwrap()], empty.path());
    assert_eq!(o.status.code(), Some(0));
    let svgs = std::fs::read_dir(empty.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "svg"))
        .count();
    assert_eq!(svgs, 0);
}

#[test]
fn toy_ball_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let below = tsa(&["toy", "--speed-ratio", "0.9"], dir.path());
    assert_eq!(below.status.code(), Some(0));
    assert!(stdout(&below).contains("DSP") && stdout(&below).contains("stable"));
    assert!(dir.path().join("toy_eac.csv").exists());

    let above = tsa(&["toy", "--speed-ratio", "1.1"], dir.path());
    assert_eq!(above.status.code(), Some(0));
    assert!(stdout(&above).contains("DLP") && stdout(&above).contains("unstable"));

    let short = tsa(&["toy", "--t-end", "0.05"], dir.path());
    assert_eq!(short.status.code(), Some(2));

    let bad = tsa(&["toy", "--g=-1"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    let usage = tsa(&["toy", "--no-such-flag"], dir.path());
    assert_eq!(usage.status.code(), Some(1));
}

#[test]
fn batch_runs_each_case_into_its_own_directory() {
    let dir = tempfile::tempdir().unwrap();
    let (smib, wscc3) = (case("smib"), case("wscc3"));
    let o = tsa(&["batch", smib.to_str().unwrap(), wscc3.to_str().unwrap(), "--jobs", "2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.ends_with("smib.json: unstable")), "{text}");
    assert!(dir.path().join("smib/smib_individual_report.txt").exists());
    assert!(dir.path().join("wscc3/wscc3_individual_report.txt").exists());

    let o = tsa(&["batch", smib.to_str().unwrap(), "missing.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}
