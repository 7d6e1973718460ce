use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use statewalk::scenarios::{ScenarioConfig, SCENARIO_NAMES};
use statewalk_cli::{parse_and_validate, RunArgs};

fn statewalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_statewalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn effective_documents_round_trip() {
    let args = RunArgs {
        seed: Some(11),
        trials: Some(123),
        epsilon: Some(0.1234567890123456789),
        set: vec!["dt=0.0731".into(), "weights=[0.25,0.75]".into()],
        ..RunArgs::default()
    };
    let run = parse_and_validate("born", &args, None).unwrap();
    let text = serde_json::to_string(&run.document()).unwrap();
    let again = parse_and_validate("born", &RunArgs::default(), Some(&text)).unwrap();
    assert_eq!(run, again);

    for name in SCENARIO_NAMES {
        let run = parse_and_validate(name, &RunArgs::default(), None).unwrap();
        assert_eq!(run.scenario, ScenarioConfig::default_for(name).unwrap());
        let text = serde_json::to_string_pretty(&run.document()).unwrap();
        assert_eq!(parse_and_validate(name, &RunArgs::default(), Some(&text)).unwrap(), run);
    }
}

#[test]
fn flags_override_the_document() {
    let doc = r#"{"scenario": "born", "seed": 7, "trials": 10, "out": "elsewhere"}"#;
    let args = RunArgs {
        seed: Some(42),
        ..RunArgs::default()
    };
    let run = parse_and_validate("born", &args, Some(doc)).unwrap();
    assert_eq!(run.seed, 42);
    assert_eq!(run.out, Path::new("elsewhere"));
    assert_eq!(parse_and_validate("born", &RunArgs::default(), Some(doc)).unwrap().seed, 7);
}

#[test]
fn validation_errors_name_the_key() {
    let key = |scenario: &str, args: RunArgs, doc: Option<&str>| {
        parse_and_validate(scenario, &args, doc).unwrap_err().key().map(str::to_string)
    };
    let eps = RunArgs {
        epsilon: Some(-0.1),
        ..RunArgs::default()
    };
    assert_eq!(key("born", eps.clone(), None).as_deref(), Some("epsilon"));
    // box-escape has no walk, so the flag itself is the unknown key.
    assert_eq!(key("box-escape", eps, None).as_deref(), Some("epsilon"));
    assert_eq!(key("born", RunArgs::default(), Some(r#"{"bogus": 1}"#)).as_deref(), Some("bogus"));
    assert_eq!(key("born", RunArgs::default(), Some(r#"{"trials": "many"}"#)).as_deref(), Some("trials"));
    assert_eq!(key("born", RunArgs::default(), Some(r#"{"seed": -3}"#)).as_deref(), Some("seed"));
    assert_eq!(key("born", RunArgs::default(), Some(r#"{"scenario": "epr"}"#)).as_deref(), Some("scenario"));
    assert_eq!(key("cat", RunArgs::default(), Some(r#"{"points": 128}"#)).as_deref(), Some("joint_budget"));
    assert_eq!(key("born", RunArgs::default(), Some("[1, 2]")).as_deref(), Some("config"));
}

#[test]
fn validation_failure_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = statewalk(&["born", "--epsilon", "-0.1", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("epsilon"));
    assert!(!out.exists());
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    let args = |out: &Path| statewalk(&["born", "--trials", "50", "--seed", "5", "--threads", "2", "--out", path(out)]);
    assert_eq!(args(&a).status.code(), Some(0));
    assert_eq!(args(&b).status.code(), Some(0));
    let trials = fs::read(a.join("trials.csv")).unwrap();
    assert_eq!(trials, fs::read(b.join("trials.csv")).unwrap());
    assert_eq!(String::from_utf8_lossy(&trials).lines().count(), 51);

    // The written config.json reproduces the run.
    let o = statewalk(&["born", "--config", path(&a.join("config.json")), "--out", path(&c)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(trials, fs::read(c.join("trials.csv")).unwrap());

    let summary: serde_json::Value = serde_json::from_slice(&fs::read(a.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["seed"], 5);
    assert_eq!(summary["config"]["trials"], 50);
    assert!(summary["checks"].as_array().is_some_and(|c| !c.is_empty()));
}

#[test]
fn runs_without_trials_write_a_header_only_trials_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("box");
    let o = statewalk(&["box-escape", "--set", "steps=100", "--set", "duration=2", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        fs::read_to_string(out.join("trials.csv")).unwrap(),
        "trial_id,outcome,steps,final_distance\n"
    );
    let table = fs::read_to_string(out.join("distances.csv")).unwrap();
    let row = table.lines().nth(1).unwrap();
    // Floats carry 17 significant digits.
    assert!(row.split(',').all(|f| f.contains('e') && f.trim_start_matches('-').len() >= 20), "{row}");
}

#[test]
fn selftest_passes() {
    let o = statewalk(&["selftest", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(statewalk(&["born", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(statewalk(&["--help"]).status.code(), Some(0));
}
