use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qss(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qss"))
        .args(args)
        .current_dir(dir)
        .env_remove("QSS_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

const C8: &str = "n 8\n0 1\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n0 7\n";

#[test]
fn fig1_is_byte_identical_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let base = [
        "fig1",
        "--model",
        "ws",
        "--n-grid",
        "100:300:100",
        "--samples",
        "20",
        "--seed",
        "7",
    ];
    let mut outputs = Vec::new();
    for (name, workers) in [("a.csv", "1"), ("b.csv", "1"), ("c.csv", "4")] {
        let mut args = base.to_vec();
        args.extend(["--out", name, "--workers", workers]);
        let out = qss(&args, dir.path());
        assert!(out.status.success(), "{}", stderr(&out));
        outputs.push(fs::read(dir.path().join(name)).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("model,n,panel,probability,ci_low,ci_high,samples,seed")
    );
    assert_eq!(lines.count(), 3 * 3);
    let meta = fs::read_to_string(dir.path().join("a.csv.meta")).unwrap();
    assert!(meta.contains("seed=7") && meta.contains("regenerations="));
}

#[test]
fn fig2_is_deterministic_under_worker_env() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "fig2",
        "--model",
        "er,ba",
        "--n-grid",
        "40:80:40",
        "--samples",
        "2",
        "--seed",
        "3",
    ];
    let a = qss(&args, dir.path());
    let b = Command::new(env!("CARGO_BIN_EXE_qss"))
        .args(args)
        .env("QSS_WORKERS", "3")
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with(
        "model,n,seed,anchor,added_vertices,kind,t_base,p_base,T_base,p_attacked,T_attacked,\
         eff,t_opt,T_opt,strong_eff,t_pen\n"
    ));
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 2);
}

#[test]
fn scan_ec_on_cycle_lists_two_pairs() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.edges"), C8).unwrap();
    let out = qss(&["scan-ec", "--in", "g.edges", "--vertex", "3"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        stdout(&out),
        "anchor,kind,vertices\n3,2ec-path,2;3\n3,2ec-path,3;4\n"
    );
}

#[test]
fn attack_without_configuration_fails_at_runtime() {
    let dir = tempfile::tempdir().unwrap();
    // Star: the centre has degree 4, every leaf degree 1, no triangles.
    fs::write(dir.path().join("g.edges"), "n 5\n0 1\n0 2\n0 3\n0 4\n").unwrap();
    let out = qss(
        &["attack", "--in", "g.edges", "--marked", "0", "--seed", "1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("no exceptional configuration"));
}

#[test]
fn attack_reports_one_row() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.edges"), C8).unwrap();
    let out = qss(
        &["attack", "--in", "g.edges", "--marked", "0", "--seed", "1"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("8,1,0,"), "{row}");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["fig1", "--no-such-flag"],
        vec!["fig1", "--n-grid", "3:5:1"],
        vec!["fig1", "--n-grid", "oops"],
        vec!["fig2", "--model", "lattice"],
        vec!["generate", "--model", "er,ws", "--n", "10"],
        vec!["fig1", "--config", "missing.cfg"],
        vec![],
    ] {
        let out = qss(&args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn missing_input_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = qss(
        &["scan-ec", "--in", "nope.edges", "--vertex", "0"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.cfg"),
        "# small run\nmodels=ws\nn-grid=50:100:50\nsamples=4\nseed=11\nout=from_config.csv\n",
    )
    .unwrap();
    let out = qss(
        &["fig1", "--config", "run.cfg", "--samples", "5"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(!stderr(&out).contains("(default)"));
    let text = fs::read_to_string(dir.path().join("from_config.csv")).unwrap();
    let first = text.lines().nth(1).unwrap();
    assert!(first.starts_with("ws,50,order2_d2,"), "{first}");
    assert!(first.contains(",5,"), "{first}");
}

#[test]
fn default_seed_is_printed() {
    let dir = tempfile::tempdir().unwrap();
    let out = qss(&["generate", "--model", "ba", "--n", "20"], dir.path());
    assert!(out.status.success());
    assert!(stderr(&out).contains("seed: "));
    assert!(stdout(&out).starts_with("n 20\n"));
}

#[test]
fn fig3_regresses_an_existing_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let out = qss(
        &[
            "fig2",
            "--model",
            "er",
            "--n-grid",
            "30:90:30",
            "--samples",
            "2",
            "--seed",
            "5",
            "--out",
            "attacks.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let out = qss(&["fig3", "--from", "attacks.csv"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "model,variant,alpha,intercept,rse,points");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("er,reference,"));
    assert!(lines[1].ends_with(",3"));
}

#[test]
fn search_trace_starts_at_marked_fraction() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.edges"), C8).unwrap();
    let out = qss(
        &["search", "--in", "g.edges", "--marked", "0,4", "--t", "2"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().nth(1).unwrap().split(',').nth(1), Some("0.25"));
    assert_eq!(text.lines().count(), 4);
}
