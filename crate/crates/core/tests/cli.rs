use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use gtrl::io::{read_rows, BoundRow, DistanceRow, EmpiricalRow, KernelRow, RunManifest, TrajectoryRow, MANIFEST_NAME};

fn gtrl() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gtrl"));
    c.env_remove("GTRL_THREADS");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stderr_json(o: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().rev().find(|l| l.starts_with('{')).unwrap_or_else(|| panic!("no JSON line in {text}"));
    serde_json::from_str(line).unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn csv<T: serde::de::DeserializeOwned>(path: &Path) -> Vec<T> {
    read_rows(std::fs::File::open(path).unwrap()).unwrap()
}

#[test]
fn cyber_casestudy_writes_files_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("cyber");
    let o = run(gtrl().args(["casestudy", "cyber", "--runs", "4", "--horizon", "300", "--out"]).arg(&out));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let m = RunManifest::read(&out).unwrap();
    assert_eq!(m.tool, "gtrl");
    assert_eq!(m.seed, 2024);
    assert_eq!(m.command, "casestudy cyber");
    let mut listed: Vec<_> = m.outputs.iter().map(|e| e.file.clone()).collect();
    listed.push(MANIFEST_NAME.into());
    listed.sort();
    let mut on_disk: Vec<_> =
        std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    on_disk.sort();
    assert_eq!(listed, on_disk);
    for e in &m.outputs {
        assert_eq!(std::fs::metadata(out.join(&e.file)).unwrap().len(), e.bytes);
    }

    let traj: Vec<TrajectoryRow> = csv(&out.join("trajectory.csv"));
    assert_eq!(traj.len(), 301 * 2);
    assert!(traj.iter().all(|r| (0.0..=1.0).contains(&r.received_utility)));
    let emp: Vec<EmpiricalRow> = csv(&out.join("empirical.csv"));
    let last_t = emp.iter().map(|r| r.t).max().unwrap();
    for player in 0..2 {
        let total: f64 = emp.iter().filter(|r| r.t == last_t && r.player == player).map(|r| r.frequency).sum();
        assert!((total - 1.0).abs() < 1e-12, "{player}: {total}");
    }
    let svg = std::fs::read_to_string(out.join("defender_frequency.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn same_config_and_seed_reproduce_data_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("coordination.toml");
    let outs: Vec<PathBuf> = (0..2).map(|k| tmp.path().join(format!("run{k}"))).collect();
    for out in &outs {
        let o = run(gtrl().args(["simulate", "--runs", "20", "--horizon", "200", "--config"]).arg(&cfg).arg("--out").arg(out));
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = RunManifest::read(&outs[0]).unwrap();
    let b = RunManifest::read(&outs[1]).unwrap();
    assert_eq!(a.outputs, b.outputs);
    assert_eq!(a.config_sha256, b.config_sha256);
    for e in &a.outputs {
        let x = std::fs::read(outs[0].join(&e.file)).unwrap();
        let y = std::fs::read(outs[1].join(&e.file)).unwrap();
        assert!(x == y, "{} differs", e.file);
    }

    let other = tmp.path().join("other");
    let o = run(gtrl().args(["simulate", "--runs", "20", "--horizon", "200", "--seed", "12", "--config"]).arg(&cfg).arg("--out").arg(&other));
    assert!(o.status.success());
    let c = RunManifest::read(&other).unwrap();
    assert_ne!(c.config_sha256, a.config_sha256);
    assert_eq!(c.seed, 12);
}

#[test]
fn thread_count_does_not_change_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut digests = Vec::new();
    for threads in ["1", "3"] {
        let out = tmp.path().join(threads);
        let o = run(gtrl()
            .env("GTRL_THREADS", threads)
            .args(["casestudy", "cyber", "--runs", "6", "--horizon", "150", "--out"])
            .arg(&out));
        assert!(o.status.success());
        digests.push(RunManifest::read(&out).unwrap().outputs);
    }
    assert_eq!(digests[0], digests[1]);

    let o = run(gtrl().env("GTRL_THREADS", "zero").args(["casestudy", "cyber", "--runs", "1", "--horizon", "10", "--out"]).arg(tmp.path().join("bad")));
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "invalid-argument");
}

#[test]
fn rate_above_one_at_first_iteration_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.toml",
        r#"
game = "cyber"
horizon = 3

[schedule]
kind = "custom-table"
gamma = [1.0]
table = [2.0, 0.5, 0.25]
"#,
    );
    let out = tmp.path().join("out");
    let o = run(gtrl().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&out));
    assert_eq!(o.status.code(), Some(2));
    let j = stderr_json(&o);
    assert_eq!(j["code"], 2);
    assert_eq!(j["error"], "schedule-violation");
    let msg = j["message"].as_str().unwrap();
    assert!(msg.contains("player 0") && msg.contains("t=1"), "{msg}");
    assert!(!out.join(MANIFEST_NAME).exists());
}

#[test]
fn malformed_configs_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "typo.toml", "game = \"cyber\"\nhorizon = 10\nhorizn = 3\n");
    let o = run(gtrl().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(tmp.path().join("o")));
    assert_eq!(o.status.code(), Some(2));

    let cfg = write_config(tmp.path(), "noise.toml", "game = \"cyber\"\nhorizon = 10\nnoise = \"cauchy:1\"\n[schedule]\nkind = \"pseries\"\np = 1.0\n");
    let o = run(gtrl().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(tmp.path().join("o")));
    assert_eq!(o.status.code(), Some(2));

    let o = run(gtrl().args(["simulate", "--config"]).arg(tmp.path().join("missing.toml")));
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn analyze_large_demand_game_hits_the_cap() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = run(gtrl().args(["analyze", "--config"]).arg(configs().join("demand.toml")).arg("--out").arg(&out));
    assert_eq!(o.status.code(), Some(3));
    let j = stderr_json(&o);
    assert_eq!(j["error"], "cap-exceeded");
    assert!(j["message"].as_str().unwrap().contains("10^100"), "{j}");
}

#[test]
fn analyze_two_by_two_is_fast_and_complete() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let start = Instant::now();
    let o = run(gtrl().args(["analyze", "--config"]).arg(configs().join("coordination.toml")).arg("--out").arg(&out));
    let took = start.elapsed();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(took < Duration::from_secs(1), "{took:?}");

    for f in ["kernel.csv", "states.csv", "potential.csv", "stationary.csv", "distance.csv", "distance.svg", "stable_states.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let kernel: Vec<KernelRow> = csv(&out.join("kernel.csv"));
    for z in 0..16 {
        let s: f64 = kernel.iter().filter(|r| r.z_from == z).map(|r| r.prob).sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
    let dist: Vec<DistanceRow> = csv(&out.join("distance.csv"));
    assert_eq!(dist.len(), 501);
    assert!(dist.iter().all(|r| (0.0..=2.0).contains(&r.distance)));

    // Both diagonal equilibria, each repeated: (left,left) twice is z = 0,
    // (right,right) twice is z = 15.
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("stable_states.json")).unwrap()).unwrap();
    assert_eq!(summary["stabilized"], true);
    let star: Vec<u64> =
        summary["lambda_star"].as_array().unwrap().iter().map(|e| e["state_index"].as_u64().unwrap()).collect();
    assert_eq!(star, [0, 15]);
    assert_eq!(summary["resistance_agrees"], true);
}

fn bounds_config(dir: &Path, delta: f64) -> PathBuf {
    write_config(
        dir,
        "b.toml",
        &format!(
            "horizon = 200\n\n[bounds]\naction_counts = [2, 2]\np = [1.0, 0.25]\nt_star = 1\ndelta = {delta}\n"
        ),
    )
}

#[test]
fn bounds_rejects_zero_delta_and_bad_p() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(gtrl().args(["bounds", "--config"]).arg(bounds_config(tmp.path(), 0.0)).arg("--out").arg(tmp.path().join("o")));
    assert_eq!(o.status.code(), Some(2));

    let o = run(gtrl()
        .args(["bounds", "--p", "1.5", "--config"])
        .arg(bounds_config(tmp.path(), 0.1))
        .arg("--out")
        .arg(tmp.path().join("o")));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bounds_faster_decay_gives_the_lower_tail() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = run(gtrl().args(["bounds", "--config"]).arg(bounds_config(tmp.path(), 0.1)).arg("--out").arg(&out));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fast: Vec<BoundRow> = csv(&out.join("bounds_p1.csv"));
    let slow: Vec<BoundRow> = csv(&out.join("bounds_p0.25.csv"));
    assert_eq!(fast.len(), 199);
    assert_eq!(fast.len(), slow.len());
    assert!(fast.iter().zip(&slow).all(|(a, b)| a.t == b.t));
    let (a, b) = (fast.last().unwrap(), slow.last().unwrap());
    assert!(a.log10_bound < b.log10_bound, "{} vs {}", a.log10_bound, b.log10_bound);
    // The 2x2 constant is astronomically large, so the traces are vacuous
    // but still finite in log space.
    assert!(fast.iter().chain(&slow).all(|r| r.log10_bound.is_finite()));
}

#[test]
fn bounds_unit_game_constants() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = run(gtrl().args(["bounds", "--config"]).arg(configs().join("unit_bounds.toml")).arg("--out").arg(&out));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // One player, one action: |Z| = 1 and C_eps = 8 * 1 * 1 * 2 * 2 = 32,
    // so C = 4 * C_eps = 128.
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("constants.json")).unwrap()).unwrap();
    assert_eq!(report["chain_size"], 1.0);
    let c = report["c"].as_f64().unwrap();
    assert!((c - 128.0).abs() < 1e-9, "{c}");
    assert!((report["log10_c_eps"].as_f64().unwrap() - 32f64.log10()).abs() < 1e-12);
    // e x^2 - e x with x = 4C/delta
    let x: f64 = 4.0 * 128.0 / 0.1;
    let expected = (std::f64::consts::E * (x * x - x)).log10();
    assert!((report["log10_explicit_rate"].as_f64().unwrap() - expected).abs() < 1e-9);
    // With gamma = 1 the rate at t* = 1 is 1, above the cap.
    assert_eq!(report["traces"][0]["rate_cap_holds"], false);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn demand_casestudy_aggregates_sum_to_population() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = run(gtrl()
        .args(["casestudy", "demand", "--customers", "12", "--slots", "4", "--horizon", "80", "--runs", "1", "--out"])
        .arg(&out));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.join("empirical.csv").exists());
    let mut r = csv::Reader::from_path(out.join("aggregate.csv")).unwrap();
    assert_eq!(r.headers().unwrap().len(), 5);
    let mut rows = 0;
    for rec in r.records() {
        let rec = rec.unwrap();
        let total: f64 = rec.iter().skip(1).map(|x| x.parse::<f64>().unwrap()).sum();
        assert!((total - 12.0).abs() < 1e-9);
        rows += 1;
    }
    assert_eq!(rows, 81);
}
