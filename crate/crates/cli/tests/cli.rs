use std::fs;
use std::process::{Command, Output};

fn mixquiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixquiv")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn trstar_prints_the_worked_example() {
    let o = mixquiv(&["trstar", "--r", "7", "--s", "2", "--perm", "(1 4 5)(2 6 7)", "--passive", "2,3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "(1 7 ~2 ~4)(~5 6)(3)");
}

#[test]
fn trstar_rejects_bad_permutations_with_usage_status() {
    let o = mixquiv(&["trstar", "--r", "3", "--perm", "(1 4)"]);
    assert_eq!(o.status.code(), Some(2));
    let o = mixquiv(&["trstar", "--r", "3", "--s", "2", "--perm", "(1 2)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cayley_hamilton_in_dimension_one_passes() {
    let o = mixquiv(&["verify", "relations", "--r", "2", "--s", "0", "--dims", "1:1", "--seed", "5", "--trials", "40"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS"));
}

#[test]
fn forcing_a_wrong_expectation_exits_one() {
    let o = mixquiv(&[
        "verify", "relations", "--r", "2", "--dims", "2", "--seed", "5", "--trials", "10", "--expect", "vanish",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("witness"));
}

#[test]
fn randomized_commands_need_a_seed() {
    let o = mixquiv(&["verify", "relations", "--r", "2", "--dims", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_reports_are_reproducible_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("q.json");
    fs::write(
        &q,
        r#"{"vertices": 2, "ordinary": [], "pairs": [[1, 2]],
            "arrows": [{"id": "x", "from": 1, "to": 1}, {"id": "y", "from": 1, "to": 2}, {"id": "z", "from": 2, "to": 1}],
            "dims": {"1": 2, "2": 2}}"#,
    )
    .unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = mixquiv(&[
            "verify", "relations", "--quiver", q.to_str().unwrap(), "--r", "3", "--s", "1", "--trials", "30",
            "--seed", "7", "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
        assert!(v["ms"].is_u64());
        v.as_object_mut().unwrap().remove("ms");
        v
    };
    let a = run("a.json");
    assert_eq!(a, run("b.json"));
    for key in ["expr", "trials", "outcome", "prob_bound"] {
        assert!(a.get(key).is_some(), "missing {key}");
    }
    assert_eq!(a["outcome"], "all-zero");
}

#[test]
fn config_file_supplies_flags_and_command_line_wins() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "command = \"verify relations\"\nr = 2\ndims = \"1:1\"\nseed = 3\ntrials = 25\nformat = \"json\"\n")
        .unwrap();
    let o = mixquiv(&["--config", cfg.to_str().unwrap(), "--trials", "12"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["trials"], 12);
    assert_eq!(v["seed"], 3);

    fs::write(&cfg, "r = [1, 2").unwrap();
    assert_eq!(mixquiv(&["--config", cfg.to_str().unwrap(), "cycles"]).status.code(), Some(2));
}

#[test]
fn cycles_lists_canonical_words() {
    let o = mixquiv(&["cycles", "--quiver", "builtin:model", "--max-len", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let list: Vec<&str> = v["cycles"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(list, ["(X)", "(X X)", "(Y Z)", "(Y ~Z)"]);
}

#[test]
fn sigma_rs_emits_expressions_and_latex() {
    let o = mixquiv(&["sigma-rs", "--r", "2", "--s", "1"]);
    assert_eq!(stdout(&o).trim(), "-(Y Z) + (Y ~Z)");
    let o = mixquiv(&["sigma-rs", "--r", "2", "--s", "1", "--emit", "latex"]);
    assert!(stdout(&o).contains("\\bar{Z}"));
    assert_eq!(mixquiv(&["sigma-rs", "--r", "3", "--s", "2"]).status.code(), Some(2));
}

#[test]
fn suitable_generators_follow_their_layouts() {
    let base = ["verify", "suitable", "--multidegree", "2", "--dims", "1", "--seed", "1", "--trials", "20"];
    assert_eq!(mixquiv(&base).status.code(), Some(0));
    let mut small = base.to_vec();
    small.extend(["--layout", "singletons"]);
    let o = mixquiv(&small);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("counterexample"));
}

#[test]
fn invariance_of_cycles_and_sigma() {
    let o = mixquiv(&[
        "verify", "invariance", "--quiver", "builtin:ortho:1", "--dims", "2", "--max-len", "2", "--r", "2", "--s", "1",
        "--seed", "9", "--trials", "10",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count() >= 4);
}

#[test]
fn identities_and_ortho_suites() {
    let o = mixquiv(&["identities", "--which", "all", "--N", "5", "--n", "2", "--r", "4", "--trials", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("genvanish-probe"));
    assert_eq!(mixquiv(&["identities", "--which", "genvanish", "--N", "5", "--n", "3", "--r", "3"]).status.code(), Some(2));

    let o = mixquiv(&["ortho", "--m", "2", "--d", "2", "--len", "2", "--trials", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 2);
    assert_eq!(mixquiv(&["ortho", "--flavor", "sp", "--d", "3"]).status.code(), Some(2));
}

#[test]
fn span_reports_a_rank() {
    let o = mixquiv(&["span", "--multidegree", "3", "--dims", "2", "--seed", "2", "--expect-rank", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = mixquiv(&["span", "--multidegree", "3", "--dims", "2", "--seed", "2", "--expect-rank", "3"]);
    assert_eq!(o.status.code(), Some(1));
}
