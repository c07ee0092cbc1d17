use std::path::Path;
use std::process::{Command, Output};

fn vmo_lab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vmo-lab"))
        .current_dir(dir)
        .args(args)
        .env_remove("VMO_LAB_THREADS")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn fs_verify_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let o = vmo_lab(dir.path(), &["fs-verify", "--trials", "1000", "--seed", "7", "--out", name]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config_digest="));
    assert_eq!(lines.next().unwrap(), "trial,mode,p,N0,lambda,lhs,rhs,pass");
    assert!(lines.all(|l| l.ends_with(",true")));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, out: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_vmo-lab"))
            .current_dir(dir.path())
            .args(["fs-verify", "--trials", "100", "--out", out])
            .env("VMO_LAB_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read(dir.path().join(out)).unwrap()
    };
    assert_eq!(run("1", "one.csv"), run("4", "four.csv"));
}

#[test]
fn example_bound_rejects_small_kappa() {
    let dir = tempfile::tempdir().unwrap();
    let o = vmo_lab(dir.path(), &["example-bound", "--kappa", "3", "--res", "64", "--out", "b.csv"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("kappa >= 4"), "{err}");
    assert!(!dir.path().join("b.csv").exists());
}

#[test]
fn apriori_sweep_rejects_p_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = vmo_lab(dir.path(), &["field-gen", "--res", "16", "--out", "f.bin"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = vmo_lab(dir.path(), &["apriori-sweep", "--field", "f.bin", "--p", "2", "--out", "s.csv"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("p > 2"), "{err}");
    assert!(!dir.path().join("s.csv").exists());
}

#[test]
fn config_file_supplies_parameters_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"trials": 4, "seed": 3, "out": "c.csv"}"#).unwrap();
    let o = vmo_lab(dir.path(), &["fs-verify", "--config", "c.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = vmo_lab(dir.path(), &["fs-verify", "--trials", "4", "--seed", "3", "--out", "f.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = vmo_lab(dir.path(), &["fs-verify", "--config", "c.json", "--seed", "5", "--out", "g.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let read = |n: &str| std::fs::read_to_string(dir.path().join(n)).unwrap();
    assert_eq!(read("c.csv"), read("f.csv"));
    assert_ne!(read("c.csv").lines().next(), read("g.csv").lines().next());
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"trialz": 4}"#).unwrap();
    let o = vmo_lab(dir.path(), &["fs-verify", "--config", "c.json", "--out", "x.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn field_pipeline_writes_every_csv() {
    let dir = tempfile::tempdir().unwrap();
    let steps: [&[&str]; 5] = [
        &["field-gen", "--res", "32", "--profile", "square-wave", "--out", "f.bin"],
        &["oscillation", "--field", "f.bin", "--directions", "4", "--out", "g.csv"],
        &["example-bound", "--res", "64", "--out", "b.csv"],
        &["apriori-sweep", "--field", "f.bin", "--lambdas", "16,256", "--rhs-count", "2", "--out", "s.csv"],
        &["local-probe", "--field", "f.bin", "--radii", "0.25", "--count", "2", "--out", "l.csv"],
    ];
    for args in steps {
        let o = vmo_lab(dir.path(), args);
        assert!(o.status.success(), "{args:?}: {}", stderr(&o));
    }
    for (name, header) in [
        ("g.csv", "region_id,cx,cy,radius,best_dir_angle,osc_value"),
        ("s.csv", "lambda,p,norm_u,norm_ux,norm_uxx,norm_rhs,implied_N,solver_iters,residual"),
        ("l.csv", "radius,p,cx,cy,fitted,frozen,laplacian"),
    ] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert!(lines[0].starts_with("# config_digest="));
        assert_eq!(lines[1], header);
        assert!(lines.len() > 2);
    }
}

#[test]
fn agmon_check_reports_each_mu() {
    let dir = tempfile::tempdir().unwrap();
    let o = vmo_lab(dir.path(), &["agmon-check", "--res", "16", "--ny", "32", "--mu", "0,5", "--out", "a.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn bad_thread_count_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_vmo-lab"))
        .current_dir(dir.path())
        .args(["fs-verify", "--trials", "2", "--out", "x.csv"])
        .env("VMO_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("VMO_LAB_THREADS"));
}
