//! End-to-end checks of the `simulate` binary: config handling, exit codes,
//! CSV layout, determinism, blow-up reporting, and sweeps.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn simulate() -> Command {
    Command::new(env!("CARGO_BIN_EXE_simulate"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bbmb_cli_{tag}_{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

/// Small, fast custom run regularly reused below.
const SMALL_RUN: &str = "scenario=custom\nhalf_length=50\nn_points=201\nt_end=2\n";

fn run_ok(args: &[&str]) -> Output {
    simulate().args(args).output().expect("spawn simulate")
}

#[test]
fn small_run_passes_and_writes_csv() {
    let dir = temp_dir("small");
    let cfg = dir.join("run.cfg");
    let out = dir.join("run.csv");
    write(&cfg, SMALL_RUN);
    let result = run_ok(&[cfg.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert!(result.status.success(), "{result:?}");
    let text = fs::read_to_string(&out).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(
        header,
        "t,l2_phi,h1_phi,h2_phi,h3_phi,sup_phi,sup_dx_phi,sup_dx2_phi,weighted_l2,\
         energy_residual,apriori_accum,sup_err_u,sup_err_dxu,sup_err_dx2u,\
         sobolev_margin_0,sobolev_margin_1,sobolev_margin_2"
    );
    assert!(text.contains("# result: PASS"));
}

#[test]
fn identical_specs_produce_byte_identical_csv() {
    let dir = temp_dir("determinism");
    let cfg = dir.join("run.cfg");
    write(&cfg, SMALL_RUN);
    let out_a = dir.join("a.csv");
    let out_b = dir.join("b.csv");
    // output_path differs, so compare everything after the echo header
    assert!(run_ok(&[cfg.to_str().unwrap(), "--output", out_a.to_str().unwrap()])
        .status
        .success());
    assert!(run_ok(&[cfg.to_str().unwrap(), "--output", out_b.to_str().unwrap()])
        .status
        .success());
    let strip = |p: &Path| {
        fs::read_to_string(p)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with("# output_path"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&out_a), strip(&out_b));
}

#[test]
fn invalid_variant_exits_with_config_error() {
    let dir = temp_dir("variant");
    let cfg = dir.join("bad.cfg");
    write(&cfg, "gamma=0\ndelta=1\n");
    let result = run_ok(&[cfg.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2), "{result:?}");
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("variant"), "{stderr}");
}

#[test]
fn unknown_key_reports_line_number() {
    let dir = temp_dir("badkey");
    let cfg = dir.join("bad.cfg");
    write(&cfg, "t_end=1\nwhatever=3\n");
    let result = run_ok(&[cfg.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("line 2"), "{stderr}");
}

#[test]
fn oversized_dt_blows_up_with_partial_csv_and_failure_exit() {
    let dir = temp_dir("blowup");
    let cfg = dir.join("run.cfg");
    let out = dir.join("run.csv");
    // dt is ~10x the stability bound; the unstable grid mode needs a few
    // dozen steps to amplify round-off into a non-finite value
    write(
        &cfg,
        "scenario=custom\nhalf_length=50\nn_points=201\nt_end=120\ndt=2\nsnapshot_every=1\n",
    );
    let result = run_ok(&[cfg.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1), "{result:?}");
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("blow-up"), "summary should name the blow-up");
    assert!(text.contains("# result: FAIL"));
}

#[test]
fn flag_overrides_win_over_file_keys() {
    let dir = temp_dir("flags");
    let cfg = dir.join("run.cfg");
    let out = dir.join("run.csv");
    write(&cfg, "scenario=custom\nhalf_length=50\nn_points=201\nt_end=50\n");
    let result = run_ok(&[
        cfg.to_str().unwrap(),
        "--t-end",
        "1",
        "--grid-n",
        "201",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{result:?}");
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("# t_end=1"));
    assert!(text.contains("# n_points=201"));
}

#[test]
fn refinement_study_runs_and_reports_orders() {
    let dir = temp_dir("refine");
    let cfg = dir.join("run.cfg");
    write(
        &cfg,
        "scenario=custom\nu_minus=-0.4\nu_plus=0.4\nhalf_length=40\nn_points=201\nt_end=2\n",
    );
    let result = run_ok(&[cfg.to_str().unwrap(), "--refine", "2"]);
    assert!(result.status.success(), "{result:?}");
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.contains("observed_order_phi"), "{stdout}");
    assert!(stdout.contains("# refinement: PASS"), "{stdout}");
}

#[test]
fn refinement_rejects_single_level() {
    let dir = temp_dir("refine1");
    let cfg = dir.join("run.cfg");
    write(&cfg, SMALL_RUN);
    let result = run_ok(&[cfg.to_str().unwrap(), "--refine", "1"]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn sweep_reports_each_config_and_continues_past_invalid_ones() {
    let dir = temp_dir("sweep");
    write(&dir.join("a.cfg"), SMALL_RUN);
    write(&dir.join("b.cfg"), SMALL_RUN);
    write(&dir.join("c.cfg"), "gamma=0\ndelta=1\n"); // invalid variant
    let result = run_ok(&["--sweep", dir.to_str().unwrap()]);
    // one invalid entry: overall failure exit, but the others completed
    assert_eq!(result.status.code(), Some(1), "{result:?}");
    let index = fs::read_to_string(dir.join("sweep_index.csv")).unwrap();
    assert!(index.lines().any(|l| l.starts_with("a,") && l.contains("PASS")), "{index}");
    assert!(index.lines().any(|l| l.starts_with("b,") && l.contains("PASS")), "{index}");
    assert!(index.lines().any(|l| l.starts_with("c,") && l.contains("ERROR")), "{index}");
    assert!(dir.join("a.csv").exists());
    assert!(dir.join("b.csv").exists());
    // identical specs produced byte-identical outputs despite parallelism
    let strip = |p: PathBuf| {
        fs::read_to_string(p)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with("# output_path"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(dir.join("a.csv")), strip(dir.join("b.csv")));
}

#[test]
fn alpha_sweep_on_constant_state_scenario_passes() {
    let dir = temp_dir("alpha_sweep");
    for alpha in ["0.5", "1", "2"] {
        write(
            &dir.join(format!("alpha_{alpha}.cfg")),
            &format!("scenario=thm1_1\nalpha={alpha}\n"),
        );
    }
    let result = run_ok(&["--sweep", dir.to_str().unwrap()]);
    assert!(result.status.success(), "{result:?}");
    let index = fs::read_to_string(dir.join("sweep_index.csv")).unwrap();
    assert_eq!(index.matches("PASS").count(), 3, "{index}");
}

#[test]
fn scenario_flag_without_config_file() {
    let dir = temp_dir("preset");
    let out = dir.join("preset.csv");
    // a fast horizon keeps this a smoke test; gates still evaluate
    let result = run_ok(&[
        "--scenario",
        "thm1_5",
        "--t-end",
        "6",
        "--grid-n",
        "401",
        "--output",
        out.to_str().unwrap(),
    ]);
    // short horizons may not satisfy the decay gates; only the mechanics
    // are under test here
    assert!(result.status.code() == Some(0) || result.status.code() == Some(1));
    assert!(out.exists());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("# scenario=thm1_5"));
}
