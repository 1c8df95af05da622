//! End-to-end tests of the command-line interface.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_zkowf")
}

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_cfg(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("exp.cfg");
    std::fs::write(&path, text).unwrap();
    path
}

const DIAL_CFG: &str = "\
protocol.kind = dial-nizk
protocol.eps_c = 1/16
protocol.eps_s = 1/8
protocol.eps_z = 1/4
protocol.crs_len = 4
protocol.sim_corrupt_len = 2
instance.arm = yes
inverter.kind = canonical
mode = exact
";

#[test]
fn measure_reports_the_exact_profile_and_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), DIAL_CFG);
    let out = run(&["measure", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("bound-holds"));
    assert!(text.contains("eps_c = 1/16"));
    assert!(text.contains("eps_s = 1/8"));
    assert!(text.contains("eps_z = 1/4"));
}

#[test]
fn reduce_on_the_bundled_config_holds_its_bound() {
    let cfg = manifest().join("configs/gi_k2.cfg");
    let out = run(&[
        "reduce",
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "1500",
        "--seed",
        "2",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["verdict"], "bound-holds");
    assert_eq!(json["experiment"], "reduce");
    assert_eq!(json["seed"], 2);
}

#[test]
fn archive_then_report_round_trips_the_result() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), DIAL_CFG);
    let out_dir = tmp.path().join("results");
    let out = run(&[
        "reduce",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "9",
        "--out",
        out_dir.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let first = stdout(&out);

    let mut entries = std::fs::read_dir(&out_dir).unwrap();
    let dir = entries.next().unwrap().unwrap().path();
    assert!(entries.next().is_none());
    // The archive records the effective config: the subcommand's
    // experiment kind is appended to the input.
    assert_eq!(
        std::fs::read_to_string(dir.join("config.cfg")).unwrap(),
        format!("{DIAL_CFG}experiment.kind = reduce\n")
    );

    let result = dir.join("result.json");
    let out = run(&["report", "--input", result.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), first);

    let out = run(&["report", "--input", result.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("check,value,bound,direction,exact,holds"));
}

#[test]
fn deterministic_given_the_same_seed_and_config() {
    let tmp = tempfile::tempdir().unwrap();
    let mut text = String::from(DIAL_CFG);
    text.push_str("trials.n = 400\nmode = sampled\n");
    let cfg = write_cfg(tmp.path(), &text);
    let args = ["reduce", "--config", cfg.to_str().unwrap(), "--seed", "5", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    let c = run(&["reduce", "--config", cfg.to_str().unwrap(), "--seed", "6", "--format", "json"]);
    assert_ne!(stdout(&a), stdout(&c));
}

#[test]
fn invert_and_construct_subcommands_work() {
    let tmp = tempfile::tempdir().unwrap();
    let mut text = String::from(DIAL_CFG);
    text.push_str("inverter.kind = distributional\n");
    let cfg = write_cfg(tmp.path(), &text);
    let out = run(&["invert", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("deviation-is-zero"));

    let out = run(&["construct", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("outputs-end-with-verdict"));
}

#[test]
fn decide_subcommand_accepts_the_yes_arm() {
    let tmp = tempfile::tempdir().unwrap();
    let mut text = String::from(DIAL_CFG);
    text.push_str("trials.n = 800\nmode = sampled\nparams.p = 8\n");
    let cfg = write_cfg(tmp.path(), &text);
    let out = run(&["decide", "--config", cfg.to_str().unwrap(), "--seed", "3"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("yes-acceptance"));
}

#[test]
fn bad_inputs_produce_error_exits() {
    let out = run(&["measure", "--config", "/nonexistent/exp.cfg"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));

    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), "not a key value line\n");
    let out = run(&["measure", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    let cfg = write_cfg(tmp.path(), DIAL_CFG);
    let out = run(&["measure", "--config", cfg.to_str().unwrap(), "--format", "yaml"]);
    assert_eq!(out.status.code(), Some(3));
}
