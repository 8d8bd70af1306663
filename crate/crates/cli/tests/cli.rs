use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subconn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn gen_to(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let p = path.to_str().unwrap().to_string();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &p]);
    let o = run(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    p
}

#[test]
fn gen_path_five() {
    let o = run(&["gen", "path", "--n", "5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "5 4\non: 0 1 2 3 4\n0 1\n1 2\n2 3\n3 4\n");
}

#[test]
fn gen_star_nine() {
    let o = run(&["gen", "star", "--n", "9"]);
    assert!(stdout(&o).starts_with("9 8\n"));
}

#[test]
fn gen_is_deterministic() {
    let a = run(&["gen", "gnm", "--n", "100", "--m", "300", "--seed", "1"]);
    let b = run(&["gen", "gnm", "--n", "100", "--m", "300", "--seed", "1"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn infeasible_gen_is_a_usage_error() {
    let o = run(&["gen", "gnm", "--n", "4", "--m", "100"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["gen", "cube", "--n", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn query_on_path() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen_to(dir.path(), "p.txt", &["path", "--n", "3"]);
    let o = run(&[
        "query", &g, "--d-star", "1", "--d", "1", "--pair", "0", "2", "--pair", "0", "0",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0 2 false\n0 0 true\n");
    let o = run(&["query", &g, "--d-star", "1", "--d", "1", "--pair", "0", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn labelled_input() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("l.txt");
    fs::write(&p, "labels: a b c\n3 2\non: a b c\na b\nb c\n").unwrap();
    let p = p.to_str().unwrap();
    let o = run(&["query", p, "--d-star", "1", "--d", "b", "--pair", "a", "c"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "a c false\n");
}

#[test]
fn verify_path_passes() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen_to(dir.path(), "p.txt", &["path", "--n", "40"]);
    let o = run(&[
        "verify",
        &g,
        "--d-star",
        "3",
        "--trials",
        "100",
        "--queries",
        "50",
        "--shadow",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("\"mismatches\": 0"));
}

#[test]
fn verify_detects_injected_faults() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen_to(
        dir.path(),
        "g.txt",
        &[
            "gnm", "--n", "60", "--m", "120", "--n-off", "15", "--seed", "3",
        ],
    );
    let o = run(&["verify", &g, "--trials", "10", "--fault-inject"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_with_empty_updates_and_sparsifier() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen_to(
        dir.path(),
        "g.txt",
        &["grid", "--n", "64", "--n-off", "16", "--seed", "2"],
    );
    let o = run(&["verify", &g, "--d-star", "0", "--trials", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&[
        "verify",
        &g,
        "--d-star",
        "4",
        "--trials",
        "20",
        "--sparsify",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn workload_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen_to(
        dir.path(),
        "g.txt",
        &["cliques-bridge", "--n", "12", "--n-off", "3", "--seed", "5"],
    );
    let w = dir.path().join("w.json");
    let w = w.to_str().unwrap();
    let o = run(&[
        "verify",
        &g,
        "--trials",
        "8",
        "--queries",
        "20",
        "--emit-workload",
        w,
    ]);
    assert!(o.status.success());
    let o = run(&["verify", &g, "--workload", w]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["query", &g, "--workload", w]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 8 * 20);
}

#[test]
fn bench_prints_csv() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen_to(
        dir.path(),
        "g.txt",
        &["gnm", "--n", "300", "--m", "900", "--seed", "1"],
    );
    let o = run(&["bench", &g, "--d-values", "1", "--reps", "3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(
        lines[0],
        "d,mean_update_us,mean_query_us,intervals,phases,preprocessing_ms"
    );
    assert!(lines[1].starts_with("1,"));
    assert!(lines[2].starts_with("# update-time log-log slope"));
}

#[test]
fn preprocess_update_inspect() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen_to(
        dir.path(),
        "g.txt",
        &["grid", "--n", "25", "--n-off", "5", "--seed", "1"],
    );
    let o = run(&["preprocess", &g, "--d-star", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"table_points\""));
    let o = run(&["update", &g, "--d-star", "2", "--d", "3,7"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"intervals\""));
    let o = run(&["update", &g, "--d-star", "1", "--d", "3,7"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["inspect", &g]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("level"));
}
