use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cvqkd_cli::output::{sha256_hex, RunManifest};

fn cvqkd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvqkd"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("cfg.toml");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const SMALL: &str = r#"
seed = 11
[constellation]
n = 8
v_m = 30.0
[classification]
train_size = 120
test_size = 60
k = [3, 5]
distances_km = [5.0, 20.0]
[keyrate]
beta = 0.98
losses_db = [1.0, 4.0]
lambda_q = { source = "measured", k = 5 }
curves = [{ scheme = "qknn", n = 8, v_m = 0.38 }, { scheme = "conventional", n = 8, v_m = 0.38 }]
[complexity]
u = 8
m = 128
k = 15
"#;

#[test]
fn version_prints_the_package_version() {
    let o = cvqkd(&["version"]);
    assert!(o.status.success());
    assert_eq!(
        String::from_utf8(o.stdout).unwrap().trim(),
        format!("cvqkd {}", env!("CARGO_PKG_VERSION"))
    );
}

#[test]
fn run_writes_the_listed_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let o = cvqkd(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let manifest: RunManifest =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    for f in &manifest.outputs {
        let bytes = fs::read(out.join(&f.path)).unwrap();
        assert_eq!(sha256_hex(&bytes), f.sha256, "{}", f.path);
    }
    let names: Vec<&str> = manifest.outputs.iter().map(|f| f.path.as_str()).collect();
    for want in [
        "config.toml",
        "metrics.csv",
        "metrics.json",
        "predictions.csv",
        "roc.csv",
        "keyrate.csv",
        "complexity.csv",
        "datasets/5km_train.csv",
        "datasets/20km_test.json",
        "keyrate.plot.json",
    ] {
        assert!(names.contains(&want), "{want} missing from {names:?}");
    }
    assert_eq!(
        manifest.config_sha256,
        sha256_hex(&fs::read(out.join("config.toml")).unwrap())
    );

    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 1 + 2 * 2);
    let predictions = fs::read_to_string(out.join("predictions.csv")).unwrap();
    assert_eq!(predictions.lines().count(), 1 + 2 * 2 * 60);
    let keyrate = fs::read_to_string(out.join("keyrate.csv")).unwrap();
    assert!(keyrate
        .starts_with("loss_db,scheme,n,v_m,lambda_q,i_ab,chi_be,chi_be_per_symbol,key_rate\n"));
}

#[test]
fn seed_override_changes_data_and_reruns_match() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let run = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        assert!(cvqkd(&[
            "run",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
            "--seed",
            seed
        ])
        .status
        .success());
        fs::read(out.join("predictions.csv")).unwrap()
    };
    assert_eq!(run("a", "5"), run("b", "5"));
    assert_ne!(run("a", "5"), run("c", "6"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    let cfg = write_config(dir.path(), "[constellation]\nn = 8\nv_m = 1.0\n");
    let o = cvqkd(&["run", "--config", &cfg, "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));

    let bad_eta = SMALL.replace(
        "[constellation]",
        "[channel]\nefficiency = 1.2\n[constellation]",
    );
    let cfg = write_config(dir.path(), &bad_eta);
    let o = cvqkd(&["validate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).contains("channel.efficiency"));
    assert_eq!(
        cvqkd(&["run", "--config", &cfg, "--out", out])
            .status
            .code(),
        Some(2)
    );

    let huge = SMALL.replace("train_size = 120", "train_size = 100000");
    let cfg = write_config(dir.path(), &huge);
    let o = cvqkd(&["run", "--config", &cfg, "--out", out, "--mode", "gate"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("analytic"));

    let cfg = write_config(dir.path(), SMALL);
    assert!(cvqkd(&["validate", "--config", &cfg]).status.success());
    let o = cvqkd(&[
        "sweep", "--config", &cfg, "--out", out, "--param", "k", "--range", "5:1:1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = cvqkd(&[
        "sweep", "--config", &cfg, "--out", out, "--param", "seed", "--values", "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(
        cvqkd(&["run", "--config", "/nonexistent.toml"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(cvqkd(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn domain_error_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let text = "seed = 1\n[constellation]\nn = 8\nv_m = 1.0\n\
                [keyrate]\nbeta = 0.98\nlosses_db = [0.0]\nlambda_q = { source = \"fixed\", value = 1.0 }\n\
                fock_cutoff = 2\ncurves = [{ scheme = \"conventional\", n = 8, v_m = 40.0 }]\n";
    let cfg = write_config(dir.path(), text);
    let o = cvqkd(&[
        "run",
        "--config",
        &cfg,
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn sweep_merges_points() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("sweep");
    let o = cvqkd(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--param",
        "k",
        "--values",
        "1,3,7",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let merged = fs::read_to_string(out.join("sweep_complexity.csv")).unwrap();
    let ks: Vec<&str> = merged
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(ks, ["1", "3", "7"]);
    let metrics = fs::read_to_string(out.join("sweep_metrics.csv")).unwrap();
    assert!(metrics.starts_with("param,value,distance_km,k,precision"));
    assert_eq!(metrics.lines().count(), 1 + 3 * 2);
}
