use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use zkcyl::cli::manifest::{read_manifest, verify_manifest, MANIFEST_NAME};
use zkcyl::cli::{
    main_with_args, run, validate, ScenarioConfig, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, VERSION,
};

const DRIFT: &str = r#"
scenario = "drift_vs_N"
seed = 3
x_scale = 1.0
y_scale = 1.0
mx = 32
my = 32
dt = 1e-2
tend = 0.1
snapshot_every = 2
data = "spectrum"
kmax = 3
jmax = 3
amplitude = 0.5
s = 0.9
n_list = [2.0, 4.0, 8.0]
"#;

const SUITE: &str = r#"
scenario = "bilinear_suite"
estimates = ["b1", "b3"]
seeds = 3
k_band = 2.0
"#;

const BLOW_UP: &str = r#"
scenario = "conserve"
x_scale = 1.0
y_scale = 1.0
mx = 32
my = 32
dt = 0.5
tend = 200.0
scheme = "strang"
snapshot_every = 1
data = "gaussian"
amplitude = 50.0
width = 0.5
ymod = 0.5
n = 4.0
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_zkcyl"))
        .args(args)
        .output()
        .unwrap()
}

/// Every file listed in the manifest, with its bytes.
fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let m = read_manifest(dir).unwrap();
    m.files
        .iter()
        .map(|f| (f.path.clone(), fs::read(dir.join(&f.path)).unwrap()))
        .collect()
}

#[test]
fn sweeps_are_byte_identical_across_runs_and_workers() {
    let tmp = tempfile::tempdir().unwrap();
    for (name, text) in [("drift", DRIFT), ("suite", SUITE)] {
        let cfg = ScenarioConfig::from_toml(text).unwrap();
        let a = tmp.path().join(format!("{name}_a"));
        let b = tmp.path().join(format!("{name}_b"));
        let c = tmp.path().join(format!("{name}_c"));
        assert_eq!(run(&cfg, &a, 1).exit_code, EXIT_OK, "{name}");
        assert_eq!(run(&cfg, &b, 1).exit_code, EXIT_OK);
        assert_eq!(run(&cfg, &c, 3).exit_code, EXIT_OK);
        let first = outputs(&a);
        assert!(
            first.iter().any(|(f, _)| f.ends_with(".csv")),
            "{name}: {first:?}"
        );
        assert_eq!(first, outputs(&b), "{name}");
        assert_eq!(first, outputs(&c), "{name}");
    }
}

#[test]
fn manifest_lists_checksums_and_detects_tampering() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ScenarioConfig::from_toml(DRIFT).unwrap();
    let out = tmp.path().join("run");
    let status = run(&cfg, &out, 2);
    assert_eq!(status.exit_code, EXIT_OK);
    let m = read_manifest(&out).unwrap();
    assert_eq!(m, status.manifest.unwrap());
    assert_eq!(m.version, VERSION);
    assert_eq!(m.scenario, "drift_vs_N");
    assert_eq!(m.jobs, 2);
    assert_eq!(ScenarioConfig::from_toml(&m.config).unwrap(), cfg);
    assert!(!m.files.is_empty());
    assert!(verify_manifest(&out).unwrap().is_empty());

    let d = out.to_str().unwrap();
    assert_eq!(main_with_args(["zkcyl", "verify", d]), EXIT_OK);
    let victim = out.join(&m.files[0].path);
    let mut bytes = fs::read(&victim).unwrap();
    bytes[0] ^= 1;
    fs::write(&victim, bytes).unwrap();
    assert_eq!(verify_manifest(&out).unwrap().len(), 1);
    assert_eq!(main_with_args(["zkcyl", "verify", d]), EXIT_CONFIG);
    fs::remove_file(&victim).unwrap();
    assert!(verify_manifest(&out).unwrap()[0].ends_with("missing"));
    assert_eq!(
        main_with_args(["zkcyl", "verify", tmp.path().to_str().unwrap()]),
        EXIT_CONFIG
    );
}

#[test]
fn configuration_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = write_config(
        tmp.path(),
        "empty.toml",
        &DRIFT.replace("[2.0, 4.0, 8.0]", "[]"),
    );
    let out = tmp.path().join("never");
    let o = bin(&[
        "run",
        empty.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n_list"));
    assert!(!out.join(MANIFEST_NAME).exists());

    let unknown = write_config(
        tmp.path(),
        "unknown.toml",
        "scenario = \"conserve\"\nbogus = 1\n",
    );
    assert_eq!(
        bin(&["validate", unknown.to_str().unwrap()]).status.code(),
        Some(EXIT_CONFIG)
    );
    assert_eq!(
        bin(&["run", "/nonexistent/config.toml"]).status.code(),
        Some(EXIT_CONFIG)
    );
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(EXIT_CONFIG));
}

#[test]
fn validate_reports_each_problem() {
    let mut cfg = ScenarioConfig::from_toml(DRIFT).unwrap();
    assert!(validate(&cfg).is_empty());
    cfg.n_list = vec![2.0, 1e3];
    cfg.dt = -1.0;
    let diags = validate(&cfg);
    assert_eq!(diags.len(), 2, "{diags:?}");
    assert!(validate(&ScenarioConfig::default())
        .iter()
        .any(|d| d.contains("scenario")));

    let tmp = tempfile::tempdir().unwrap();
    let p = write_config(tmp.path(), "drift.toml", DRIFT);
    let ok = bin(&["validate", p.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert_eq!(String::from_utf8_lossy(&ok.stdout).trim(), "ok");
    let bad = bin(&["validate", p.to_str().unwrap(), "--set", "n_list=[1e3]"]);
    assert_eq!(bad.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("N=1000"));
}

#[test]
fn numerical_failure_exits_with_three_and_keeps_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let p = write_config(tmp.path(), "blow.toml", BLOW_UP);
    let out = tmp.path().join("blow");
    let o = bin(&["run", p.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(EXIT_NUMERICAL),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let m = read_manifest(&out).unwrap();
    assert_eq!(m.exit_code, EXIT_NUMERICAL);
    assert!(m.message.is_some());
    assert!(!m.files.is_empty());
    assert!(verify_manifest(&out).unwrap().is_empty());
}

#[test]
fn version_command() {
    let o = bin(&["version"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    assert_eq!(
        String::from_utf8_lossy(&o.stdout).trim(),
        format!("zkcyl {VERSION}")
    );
}

#[test]
fn shipped_configs_validate() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut n = 0;
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        let cfg = ScenarioConfig::load(&p).unwrap();
        assert!(
            validate(&cfg).is_empty(),
            "{}: {:?}",
            p.display(),
            validate(&cfg)
        );
        n += 1;
    }
    assert_eq!(n, 9);
}
