use std::path::Path;
use std::process::{Command, Output};

use ce_dynamics::runner::CSV_HEADER;
use ce_dynamics::{Game, Summary};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ce-dynamics"))
        .args(args)
        .output()
        .expect("spawn cli")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&cli(&[])), 1);
    assert_eq!(code(&cli(&["run", "--random", "2,2", "--horizon", "5", "--eta", "0.1"])), 1);
    assert_eq!(
        code(&cli(&["run", "--random", "2,2", "--dynamics", "nope", "--horizon", "5", "--eta", "0.1"])),
        1
    );
    // both learning-rate options at once
    assert_eq!(
        code(&cli(&[
            "run", "--random", "2,2", "--dynamics", "omwu", "--horizon", "5", "--eta", "0.1",
            "--eta-rule", "adaptive",
        ])),
        1
    );
    assert_eq!(code(&cli(&["--help"])), 0);
}

#[test]
fn validation_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&cli(&["run", "--random", "6,2", "--dynamics", "arbo", "--horizon", "5", "--eta", "0.1"])),
        2
    );
    assert_eq!(
        code(&cli(&["run", "--random", "2,2", "--dynamics", "omwu", "--horizon", "0", "--eta", "0.1"])),
        2
    );
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"players":2,"actions":[2,2],"losses":[[0,0,0,1.5],[0,0,0,0]]}"#).unwrap();
    let out = cli(&["run", "--game", path(&bad), "--dynamics", "omwu", "--horizon", "3", "--eta", "0.1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("player 0"));
    let missing = dir.path().join("missing.json");
    assert_eq!(
        code(&cli(&["run", "--game", path(&missing), "--dynamics", "omwu", "--horizon", "3", "--eta", "0.1"])),
        2
    );
    let matrix = dir.path().join("m.json");
    std::fs::write(&matrix, "[[0.5,0.5],[0.3,0.6]]").unwrap();
    assert_eq!(code(&cli(&["stationary", "--matrix", path(&matrix)])), 2);
}

#[test]
fn gen_then_run_writes_documented_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let game_path = dir.path().join("game.json");
    let out = cli(&["gen", "--actions", "3,2", "--seed", "4", "--out", path(&game_path)]);
    assert_eq!(code(&out), 0);
    let game = Game::from_json(&std::fs::read(&game_path).unwrap()).unwrap();
    assert_eq!(game, Game::random(&[3, 2], 4).unwrap());

    let out_dir = dir.path().join("run");
    let out = cli(&[
        "run", "--game", path(&game_path), "--dynamics", "bm-omwu", "--horizon", "40",
        "--eta-rule", "theorem-swap", "--out", path(&out_dir),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("regret.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    assert_eq!(lines.count(), 40 * 2);
    let summary = Summary::from_json(&std::fs::read(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary.horizon, 40);
    assert_eq!(summary.action_counts, vec![3, 2]);
    assert!(!out_dir.join("trace.json").exists());
}

#[test]
fn trace_feeds_diagnose() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = cli(&[
        "run", "--random", "3,3", "--seed", "1", "--dynamics", "sl-omwu", "--horizon", "64",
        "--eta", "0.00001", "--trace", "--out", path(&out_dir),
    ]);
    assert_eq!(code(&out), 0);
    let out = cli(&["diagnose", "--trace", path(&out_dir.join("trace.json")), "--order", "5"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for player in report.as_array().unwrap() {
        assert_eq!(player["smoothness"]["applicable"], true);
        assert_eq!(player["smoothness"]["passed"], true);
        assert_eq!(player["stability"]["passed"], true);
        assert_eq!(player["rvu"]["holds"], true);
    }
    let out = cli(&[
        "diagnose", "--trace", path(&out_dir.join("trace.json")), "--order", "2", "--format", "csv",
    ]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().next(), Some("player,order,t,norm,bound"));
    // orders 0..=2 over 64 rounds, two players
    assert_eq!(csv.lines().count(), 1 + 2 * (64 + 63 + 62));
}

#[test]
fn trees_lists_cayley_many() {
    let out = cli(&["trees", "--nodes", "4", "--root", "2"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 16);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(1) == Some("2")));
    let out = cli(&["trees", "--nodes", "3", "--format", "json"]);
    let trees: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(trees.as_array().unwrap().len(), 9);
    assert_eq!(code(&cli(&["trees", "--nodes", "9"])), 2);
}

#[test]
fn stationary_of_two_state_chain() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = dir.path().join("m.json");
    std::fs::write(&matrix, "[[0.9,0.1],[0.3,0.7]]").unwrap();
    for method in ["linear", "tree", "log-tree"] {
        let out = cli(&["stationary", "--matrix", path(&matrix), "--method", method]);
        assert_eq!(code(&out), 0);
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        let pi: Vec<f64> = serde_json::from_value(v["stationary"].clone()).unwrap();
        // balance: π0·0.1 = π1·0.3
        assert!((pi[0] - 0.75).abs() < 1e-14 && (pi[1] - 0.25).abs() < 1e-14);
    }
}

#[test]
fn equivalence_subcommand_passes() {
    let out = cli(&["equivalence", "--random", "3,3", "--seed", "2", "--horizon", "50"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
}

#[test]
fn failed_numerical_check_exits_three() {
    // exact agreement is not attainable in floating point
    let out = cli(&[
        "equivalence", "--random", "3,3", "--seed", "2", "--horizon", "50", "--tolerance", "0",
    ]);
    assert_eq!(code(&out), 3);
}
