use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn exe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tzlab"))
}

fn scratch(tag: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("cli-{tag}"));
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn eigen_flags_reach_the_sign_limit() {
    let out = scratch("eigen");
    let o = exe()
        .args(["eigen", "--drift", "sign", "--epsilon", "+1", "--nu-over-L", "1.0", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let s = read_json(&out.join("summary.json"));
    let ratio = s["result"]["e1_over_r0"].as_f64().unwrap();
    assert!((ratio - 0.4053).abs() < 1e-4, "{ratio}");
    let header = std::fs::read_to_string(out.join("eigen_sweep.csv")).unwrap();
    assert!(header.starts_with("parameter,e1,r0,ratio_to_r0,omega,robin_residual,method,status\n"));
}

#[test]
fn negative_epsilon_is_accepted_as_a_value() {
    let out = scratch("eigen-neg");
    let o = exe()
        .args(["eigen", "--drift", "linear", "--epsilon", "-1", "--alpha", "0.5", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let s = read_json(&out.join("summary.json"));
    assert!((s["result"]["e1"].as_f64().unwrap() - 1.5).abs() < 1e-6);
}

#[test]
fn hkd_demo_reports_band_figures() {
    let out = scratch("hkd");
    let o = exe().args(["hkd-demo", "--override", "process.n_paths=100", "--out"]).arg(&out).output().unwrap();
    assert!(o.status.success());
    let r = &read_json(&out.join("summary.json"))["result"];
    assert!((r["gamma"].as_f64().unwrap() - 0.006410).abs() < 1e-6);
    assert!((r["swing_coefficient"].as_f64().unwrap() - 0.0079).abs() < 1e-4);
    assert!((r["eigen_ratios"]["sign_momentum_limit"].as_f64().unwrap() - 0.41).abs() < 5e-3);
    assert!((r["eigen_ratios"]["tanh_limit"].as_f64().unwrap() - 0.58).abs() < 5e-3);
    assert_eq!(r["bond"]["rich_peg"]["may_exceed_one"], Value::Bool(true));
}

#[test]
fn invalid_config_lists_every_problem_and_writes_nothing() {
    let dir = scratch("bad");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("bad.json");
    std::fs::write(
        &cfg,
        r#"{"zone": {"s_plus": 7.9}, "process": {"dt": -1}, "pricing": {"nt": 0}}"#,
    )
    .unwrap();
    let out = dir.join("out");
    let o = exe().args(["price", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let err = stdout_json(&o);
    assert_eq!(err["error"]["kind"], "config");
    assert_eq!(err["error"]["violations"].as_array().unwrap().len(), 3, "{err}");
    assert!(!out.exists());
}

#[test]
fn unknown_keys_abort_before_computation() {
    let dir = scratch("unknown");
    let o = exe()
        .args(["simulate", "--override", "process.sigmaa=2", "--override", "extra=1", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let v = stdout_json(&o)["error"]["violations"].clone();
    assert_eq!(v.as_array().unwrap().len(), 2, "{v}");
    assert!(!dir.exists());
}

#[test]
fn numerical_failure_carries_diagnostics() {
    let dir = scratch("noroot");
    let o = exe()
        .args(["eigen", "--drift", "sign", "--nu-over-L", "1.5", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    let e = stdout_json(&o);
    assert_eq!(e["error"]["diagnostics"]["variant"], "no_root");
}

#[test]
fn manifest_config_reproduces_the_run() {
    let first = scratch("repro-a");
    let o = exe()
        .args([
            "simulate",
            "--seed",
            "5",
            "--override",
            "process.n_paths=50",
            "--override",
            "drift.kind=tanh",
            "--override",
            "drift.nu_over_l=0.6",
            "--out",
        ])
        .arg(&first)
        .output()
        .unwrap();
    assert!(o.status.success());
    let manifest = read_json(&first.join("manifest.json"));
    assert_eq!(manifest["seed"], 5);
    let cfg = scratch("repro-cfg").with_extension("json");
    std::fs::write(&cfg, serde_json::to_string(&manifest["config"]).unwrap()).unwrap();
    let second = scratch("repro-b");
    let o = exe().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&second).output().unwrap();
    assert!(o.status.success());
    let again = read_json(&second.join("manifest.json"));
    assert_eq!(manifest["config_sha256"], again["config_sha256"]);
    assert_eq!(manifest["files"], again["files"]);
}

#[test]
fn price_writes_surfaces_and_quotes() {
    let out = scratch("price");
    let o = exe()
        .args([
            "price",
            "--override",
            "pricing.nx=201",
            "--override",
            "pricing.nt=200",
            "--override",
            "pricing.mc_paths=2000",
            "--override",
            "pricing.claims=[\"unit_bond\",\"rate_squared\"]",
            "--override",
            "peg.kind=linear",
            "--override",
            "peg.r_star_fraction=1.0",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let r = &read_json(&out.join("summary.json"))["result"];
    let bond = &r["claims"]["unit_bond"];
    let pde = bond["pde_v_at_x0"].as_f64().unwrap();
    assert!((pde - bond["closed_form_v_at_x0"].as_f64().unwrap()).abs() < 1e-4);
    assert!(bond["monte_carlo"]["z_vs_pde"].as_f64().unwrap().abs() < 4.0);
    let surface = std::fs::read_to_string(out.join("surface_rate_squared.csv")).unwrap();
    assert!(surface.starts_with("t,x,v\n"));
    // 21 time slices by 21 nodes plus the header
    assert_eq!(surface.lines().count(), 21 * 21 + 1);
}

#[test]
fn map_compares_linearized_and_nonlinear() {
    let out = scratch("map");
    let o = exe().args(["map", "--out"]).arg(&out).output().unwrap();
    assert!(o.status.success());
    let r = &read_json(&out.join("summary.json"))["result"];
    let lin = r["linearized"]["r_star"].as_f64().unwrap();
    let nl = r["nonlinear"]["r_star"].as_f64().unwrap();
    let gamma = r["gamma"].as_f64().unwrap();
    assert!(((nl - lin) / lin).abs() < 2.0 * gamma, "{lin} {nl}");
    let csv = std::fs::read_to_string(out.join("map.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2001 + 1);
}
