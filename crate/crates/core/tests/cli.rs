use std::path::Path;
use std::process::{Command, Output};

fn mflab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mflab")).args(args).env_remove("MFLAB_SEED").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn first_line(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&mflab(&[])), 2);
    assert_eq!(code(&mflab(&["converge", "--n-list", "16,4"])), 2);
    assert_eq!(code(&mflab(&["jsq", "--lambda", "1.5"])), 2);
    assert_eq!(code(&mflab(&["ring", "--reps", "0"])), 2);
    assert_eq!(code(&mflab(&["frobnicate"])), 2);
}

#[test]
fn cases_pass_by_default_and_fail_literally() {
    let ok = mflab(&["cases"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    let stdout = String::from_utf8(ok.stdout).unwrap();
    assert!(stdout.lines().all(|l| l.starts_with("[PASS]")));

    let literal = mflab(&["cases", "--remark2-literal"]);
    assert_eq!(code(&literal), 1);
    let stdout = String::from_utf8(literal.stdout).unwrap();
    assert!(stdout.lines().any(|l| l.starts_with("[FAIL] fixed-point-residual-k1")));
}

#[test]
fn converge_csv_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = mflab(&["converge", "--n-list", "2,4", "--reps", "2", "--samples", "100", "--seed", "3", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(first_line(&a), "n,replication,rho_to_P,tv_to_P,stderr,wall_time_s");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(std::fs::read_to_string(&a).unwrap().lines().count(), 5);

    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 3);
    assert_eq!(meta["version"], mflab::VERSION);
    assert_eq!(meta["config"]["n_list"], serde_json::json!([2, 4]));
    assert!(dir.path().join("a.csv.summary.json").exists());
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lab.toml");
    std::fs::write(&cfg, "seed = 21\nlambda = 0.4\n").unwrap();
    let out = dir.path().join("p.json");
    let run = |extra: &[&str], env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_mflab"));
        cmd.args(["jsq", "--trunc", "5", "--out", out.to_str().unwrap()]).args(extra).env_remove("MFLAB_SEED");
        if let Some(s) = env {
            cmd.env("MFLAB_SEED", s);
        }
        assert!(cmd.status().unwrap().success());
        let meta: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("p.json.meta.json")).unwrap()).unwrap();
        meta["seed"].as_u64().unwrap()
    };
    let cfg_s = cfg.to_str().unwrap();
    assert_eq!(run(&["--config", cfg_s, "--seed", "5"], Some("8")), 5);
    assert_eq!(run(&["--config", cfg_s], Some("8")), 21);
    assert_eq!(run(&[], Some("8")), 8);
    assert_eq!(run(&[], None), 1);
}

#[test]
fn jsq_json_fields() {
    let o = mflab(&["jsq", "--k", "1", "--lambda", "0.5", "--trunc", "10"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["k", "lambda", "mu", "B", "residual", "boundary_mass", "proportion"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let total: f64 = v["proportion"].as_object().unwrap().values().map(|x| x.as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn export_headers() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    let s = |name: &str| p(name).to_str().unwrap().to_string();

    assert_eq!(code(&mflab(&["ode", "--trunc", "8", "--t-max", "1", "--out", &s("o.csv")])), 0);
    assert_eq!(first_line(&p("o.csv")), "t,u,z");

    let o = mflab(&["ring", "--nodes", "6", "--samples", "40", "--reps", "1", "--horizon", "3", "--out", &s("r.csv"), "--trajectory", &s("t.csv")]);
    assert_eq!(code(&o), 0);
    assert_eq!(first_line(&p("r.csv")), "replication,u,z,std_error");
    assert_eq!(first_line(&p("t.csv")), "time,node,queue_len");

    assert_eq!(code(&mflab(&["density", "--nodes", "4", "--horizon", "2", "--out", &s("d.csv")])), 0);
    assert_eq!(first_line(&p("d.csv")), "time,u,count");

    assert_eq!(code(&mflab(&["density", "--nodes", "2", "--exact", "--trunc", "3", "--out", &s("e.json")])), 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p("e.json")).unwrap()).unwrap();
    assert_eq!(v["B"], 3);
}

#[test]
fn drift_report_runs() {
    let o = mflab(&["drift", "--n-list", "4,16", "--reps", "3", "--t-max", "2", "--trunc", "10"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert!(v["ring_gap"]["ring_vs_ode"].as_f64().unwrap() >= 0.0);
}
