use std::process::{Command, Output};

use wittquant_harness::report::{ScenarioReport, Verdict};

fn wittquant(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wittquant")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn run_prints_json_and_exits_zero_on_expected_polarity() {
    let o = wittquant(&["run", "phi-ring-hom", "--samples", "10"]);
    assert!(o.status.success());
    let r = ScenarioReport::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.params.samples, 10);

    // the counterexample scenario fails, which is what it expects
    let o = wittquant(&["run", "remark-counterexample"]);
    assert!(o.status.success());
}

#[test]
fn unmet_polarity_exits_one() {
    let o = wittquant(&["run", "eq1", "--mutation", "flip-relation"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn errors_exit_two() {
    assert_eq!(wittquant(&["run", "nope"]).status.code(), Some(2));
    assert_eq!(wittquant(&["run", "eq1", "--p", "2"]).status.code(), Some(2));
    let o = wittquant(&["run", "eq1", "--out", "/nonexistent/dir/r.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    std::fs::write(&path, "samples = 5\nseed = 9\n").unwrap();
    let out = dir.path().join("r.json");
    let o = wittquant(&[
        "run",
        "cartier",
        "--config",
        path.to_str().unwrap(),
        "--seed",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let r = ScenarioReport::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!((r.params.samples, r.params.seed), (5, 4));
}

#[test]
fn markdown_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = wittquant(&["run", "remark-counterexample", "--out", json.to_str().unwrap()]);
    assert!(o.status.success());
    let o = wittquant(&["replay", json.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("central-generation: reproduced"));

    let o = wittquant(&["run", "remark-counterexample", "--format", "markdown"]);
    assert!(stdout(&o).contains("| scenario | statement | expected | verdict |"));
}

#[test]
fn eval_and_list() {
    let o = wittquant(&["eval", "[y^3, x^3]", "--n", "4"]);
    assert_eq!(stdout(&o).trim(), "9*x^2*y^2 + 18*x*y + 6");
    let o = wittquant(&["eval", "--z1", "{u^2, v}"]);
    assert_eq!(stdout(&o).trim(), "2*u");
    assert_eq!(wittquant(&["eval", "x +"]).status.code(), Some(2));
    let o = wittquant(&["list"]);
    assert_eq!(stdout(&o).lines().count(), 13);
}
