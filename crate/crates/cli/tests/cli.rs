use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopfinder"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn toyama_is_nonterminating() {
    let path = data("toyama.trs");
    let out = run(&["--no-time", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("NO"));
    let witness = lines.next().unwrap();
    assert!(
        witness == "witness: f(s(h),s(h),s(h))" || witness == "witness: f(s(h),s(1),s(h))",
        "{text}"
    );
    assert!(text.contains("certificate:\n"));
    assert!(text.contains("  closing position: ε\n"));
    assert!(!text.contains("time:"));
}

#[test]
fn every_strategy_finds_toyama() {
    let path = data("toyama.trs");
    for strategy in ["all", "lm", "lmne"] {
        let out = run(&["--strategy", strategy, path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{strategy}");
        assert!(stdout(&out).starts_with("NO\n"));
    }
}

#[test]
fn leftmost_misses_a_loop_that_lmne_finds() {
    let path = data("selflm.trs");
    let out = run(&["--strategy", "lm", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("DON'T KNOW\n"));
    let out = run(&["--strategy", "lmne", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn terminating_system_is_dont_know() {
    let out = run(&[data("terminating.trs").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out).lines().next(), Some("DON'T KNOW"));
}

#[test]
fn iteration_budget_gives_timeout() {
    let out = run(&[
        "--max-iterations",
        "1",
        data("toyama.trs").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout(&out).lines().next(), Some("TIMEOUT"));
}

#[test]
fn invalid_input_exits_three() {
    let out = run(&[data("nonvalid.trs").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).is_empty());
    assert!(
        stderr(&out).contains("nonvalid.trs:3:3:"),
        "{}",
        stderr(&out)
    );

    let out = run(&["/no/such/file.trs"]);
    assert_eq!(out.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.trs");
    fs::write(&bad, "(RULES f(x -> x)").unwrap();
    let out = run(&[bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_flags_exit_three() {
    let path = data("toyama.trs");
    let out = run(&["--strategy", "rightmost", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["--timeout", "0", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn json_output() {
    let out = run(&[
        "--format",
        "json",
        "--no-time",
        data("semi.trs").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(value["verdict"], "NO");
    assert_eq!(value["strategy"], "lmne");
    assert_eq!(value["witness"]["theta1"], "{x/0}");
    assert_eq!(value["witness"]["theta2"], "{y/h(y)}");
    assert_eq!(value["witness"]["verified"], true);
    assert_eq!(value["iterations"], 0);
    assert!(value.get("elapsed_secs").is_none());
}

#[test]
fn dump_graph_writes_edges() {
    let out = run(&["--dump-graph", data("rprime.trs").to_str().unwrap()]);
    assert_eq!(stderr(&out), "0 -> 0\n0 -> 1\n0 -> 2\n2 -> 0\n2 -> 1\n");
}

#[test]
fn seed_is_ignored() {
    let path = data("toyama.trs");
    let plain = run(&["--no-time", path.to_str().unwrap()]);
    let seeded = Command::new(env!("CARGO_BIN_EXE_loopfinder"))
        .env("LOOPFINDER_SEED", "42")
        .args(["--no-time", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(plain.stdout, seeded.stdout);
}

#[test]
fn directory_summary() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["toyama.trs", "swap.trs", "terminating.trs"] {
        fs::copy(data(name), dir.path().join(name)).unwrap();
    }
    fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let out = run(&["--no-time", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert!(rows[0].starts_with("file"));
    assert!(rows[1].contains("swap.trs") && rows[1].contains("NO"));
    assert!(rows[2].contains("terminating.trs") && rows[2].contains("DON'T KNOW"));
    assert!(rows[3].contains("toyama.trs") && rows[3].contains("NO"));
    let totals: Vec<&str> = rows.last().unwrap().split_whitespace().collect();
    assert_eq!(&totals[..5], ["3", "2", "1", "0", "0"]);

    fs::copy(data("nonvalid.trs"), dir.path().join("nonvalid.trs")).unwrap();
    let out = run(&[
        "--format",
        "json",
        "--no-time",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    let last: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(last["summary"]["files"], 4);
    assert_eq!(last["summary"]["errors"], 1);
    assert_eq!(last["summary"]["no"], 2);
}
