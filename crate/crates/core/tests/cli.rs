use std::process::{Command, Output};

fn andor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_andor"))
        .args(args)
        .env_remove("ANDOR_EXACT_CUTOFF")
        .env_remove("ANDOR_EXACT_WORK")
        .env_remove("ANDOR_ENUM_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn count_table() {
    let o = andor(&["count", "--n", "1..3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# command: "));
    let rows = data_lines(&text);
    assert_eq!(rows[0], "n,k,T,B,rat,rat_float");
    assert_eq!(rows[1], "1,1,1,1/2,,");
    assert!(rows[2].starts_with("2,2,6,"));
    assert!(rows[3].starts_with("3,3,88,"));
}

#[test]
fn exit_codes() {
    assert_eq!(andor(&["verify", "--suite", "bonferroni,unimodal"]).status.code(), Some(0));
    assert_eq!(andor(&["verify", "--suite", "series"]).status.code(), Some(1));
    assert_eq!(andor(&["enumerate", "--n", "40"]).status.code(), Some(2));
    assert_eq!(andor(&["count", "--n", "0"]).status.code(), Some(64));
    assert_eq!(andor(&["no-such-command"]).status.code(), Some(64));
    assert_eq!(andor(&["--help"]).status.code(), Some(0));
}

#[test]
fn json_output() {
    let o = andor(&["--format", "json", "threshold", "--n", "10,1000"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["columns"][1], "M_n");
    assert_eq!(v["rows"][0][1], "4");
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn seeded_runs_repeat() {
    let args = ["estimate", "--n", "20", "--event", "satisfiable", "--samples", "2000", "--seed", "9"];
    let a = stdout(&andor(&args));
    let b = stdout(&andor(&args));
    assert_eq!(data_lines(&a), data_lines(&b));
    assert!(a.contains("# seed: 9"));
    let mut more = args.to_vec();
    more.extend(["--workers", "2"]);
    assert_eq!(data_lines(&a), data_lines(&stdout(&andor(&more))));
}

#[test]
fn out_file_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "command=enumerate\nn=3\nk=1\n").unwrap();
    let out = dir.path().join("classes.csv");
    let o = andor(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(data_lines(&text).len(), 1 + 32);
    assert!(text.contains("# classes: 32"));
    assert!(text.contains("# census_matches_formula: true"));
    assert!(text.contains("# config.k: 1"));
}

#[test]
fn environment_overrides() {
    let o = Command::new(env!("CARGO_BIN_EXE_andor"))
        .args(["enumerate", "--n", "4"])
        .env("ANDOR_ENUM_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}
