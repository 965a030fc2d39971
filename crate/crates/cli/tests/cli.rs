use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn latgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latgame"))
        .args(args)
        .env_remove("LATGAME_POINT_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {:?}", String::from_utf8_lossy(&o.stderr)))
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    /// Normal-play NIM with heaps of size at most 2, and the strategy
    /// compiled from P = 2N².
    fn nim2() -> Self {
        let dir = TempDir::new().unwrap();
        let f = Fixture { dir };
        let o = latgame(&["gen", "nim", "--heaps", "2", "--mode", "normal", "-o", &f.s("game.json")]);
        assert_eq!(o.status.code(), Some(0), "{o:?}");
        f.write("strat.json", r#"{"d":2,"strata":[{"F":[[0,0]],"A":[[2,0],[0,2]]}]}"#);
        let o = latgame(&["compile", &f.s("strat.json"), "-o", &f.s("strategy.json"), "--game", &f.s("game.json"), "--verify-level", "12"]);
        assert_eq!(o.status.code(), Some(0), "{o:?}");
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn s(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }

    fn write(&self, name: &str, text: &str) {
        std::fs::write(self.path(name), text).unwrap();
    }
}

#[test]
fn query_prints_label_and_exit_code() {
    let f = Fixture::nim2();
    let o = latgame(&["query", &f.s("game.json"), &f.s("strategy.json"), "--pos", "4,2"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "P\n"));
    let o = latgame(&["query", &f.s("game.json"), &f.s("strategy.json"), "--pos", "1,2"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(1), "N\n"));
}

#[test]
fn query_off_board_is_an_error() {
    let f = Fixture::nim2();
    let o = latgame(&["query", &f.s("game.json"), &f.s("strategy.json"), "--pos", "-1,0"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "position_off_board");
    let o = latgame(&["query", &f.s("game.json"), &f.s("strategy.json"), "--pos", "1,2,3"]);
    assert_eq!(stderr_json(&o)["error"], "dimension_mismatch");
}

#[test]
fn move_lists_winning_moves() {
    let f = Fixture::nim2();
    // From (1,2) the only winning move takes the lone 1-heap.
    let o = latgame(&["move", &f.s("game.json"), &f.s("strategy.json"), "--pos", "1,2"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "1,0\n"));
    // From (1,1) shrink the 2-heap to 1.
    let o = latgame(&["move", &f.s("game.json"), &f.s("strategy.json"), "--pos", "1,1"]);
    assert_eq!(stdout(&o), "-1,1\n");
    let o = latgame(&["move", &f.s("game.json"), &f.s("strategy.json"), "--pos", "2,2"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), ""));
}

#[test]
fn compile_output_is_a_strategy_document() {
    let f = Fixture::nim2();
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(f.path("strategy.json")).unwrap()).unwrap();
    assert_eq!(doc["d"], 2);
    assert_eq!(doc["terms"].as_array().unwrap().len(), 1);
    assert_eq!(doc["terms"][0]["denoms"], serde_json::json!([[2, 0], [0, 2]]));
}

#[test]
fn compile_rejects_a_wrong_stratification() {
    let f = Fixture::nim2();
    f.write("bad.json", r#"{"d":2,"strata":[{"F":[[1,0]],"A":[[2,0],[0,2]]}]}"#);
    let o = latgame(&["compile", &f.s("bad.json"), "--game", &f.s("game.json"), "--verify-level", "8"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "verification_failed");
    let o = latgame(&["compile", &f.s("bad.json"), "--no-verify"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn compile_requires_verification_flags() {
    let f = Fixture::nim2();
    let o = latgame(&["compile", &f.s("strat.json")]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "usage");
}

#[test]
fn complexity_of_each_document() {
    let f = Fixture::nim2();
    let n = |name: &str| {
        let o = latgame(&["complexity", &f.s(name)]);
        assert_eq!(o.status.code(), Some(0), "{o:?}");
        stdout(&o).trim().parse::<u64>().unwrap()
    };
    // d(m + n) = 2·3 plus one bit for each of the four nonzero move entries.
    assert_eq!(n("game.json"), 10);
    let o = latgame(&["gen", "nim", "--heaps", "2", "--mode", "misere", "-o", &f.s("misere.json")]);
    assert_eq!(o.status.code(), Some(0));
    // The defeated generator 0 adds a column but no bits.
    assert_eq!(n("misere.json"), 12);
    assert_eq!(n("strat.json"), 10);
    assert!(n("strategy.json") > 0);
}

#[test]
fn validate_reports_axioms() {
    let f = Fixture::nim2();
    let o = latgame(&["validate", &f.s("game.json")]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["valid"], true);

    f.write("split.json", r#"{"d":2,"gamma":[[-2,1]],"cone_rays":"orthant"}"#);
    let o = latgame(&["validate", &f.s("split.json")]);
    assert_eq!(o.status.code(), Some(1));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["valid"], false);
}

#[test]
fn solve_text_and_json() {
    let f = Fixture::nim2();
    let o = latgame(&["solve", &f.s("game.json"), "--level", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0 0 P\n1 0 N\n0 1 N\n2 0 P\n");
    let o = latgame(&["solve", &f.s("game.json"), "--level", "2", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0], serde_json::json!({"pos": [0, 0], "label": "P"}));
    assert_eq!(v.as_array().unwrap().len(), 4);
}

#[test]
fn congruent_exit_codes() {
    let f = Fixture::nim2();
    let g = &f.s("game.json");
    let o = latgame(&["congruent", g, "--pos1", "0,0", "--pos2", "2,0", "--strat", &f.s("strat.json")]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert_eq!(serde_json::from_str::<Value>(&stdout(&o)).unwrap()["kind"], "congruent_certified");

    let o = latgame(&["congruent", g, "--pos1", "0,0", "--pos2", "1,0"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kind"], "distinguished");
    assert_eq!(v["witness"], serde_json::json!([0, 0]));

    let o = latgame(&["congruent", g, &f.s("strategy.json"), "--pos1", "0,0", "--pos2", "2,0", "--radius", "6"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kind"], "congruent_probable");
    assert_eq!(v["evidence"]["radius"], 6);
}

#[test]
fn gen_writes_games() {
    let f = Fixture::nim2();
    let o = latgame(&["gen", "nim", "--heaps", "2"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["defeated_generators"], serde_json::json!([[0, 0]]));
    assert_eq!(v["cone_rays"], "orthant");

    let o = latgame(&["gen", "ex5"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["d"], 5);
    assert_eq!(v["gamma"].as_array().unwrap().len(), 8);

    f.write("spec.json", r#"{"max_heap":2,"moves":[{"kind":"remove","heap":1},{"kind":"split","from":2,"into":[1,1]}],"play_mode":"normal"}"#);
    let o = latgame(&["gen", "octal", "--spec", &f.s("spec.json")]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["gamma"], serde_json::json!([[1, 0], [-2, 1]]));

    f.write("bad.json", r#"{"max_heap":2,"moves":[{"kind":"split","from":2,"into":[1,1]}],"play_mode":"normal"}"#);
    let o = latgame(&["gen", "octal", "--spec", &f.s("bad.json")]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "rule_set_axiom_violation");
}

#[test]
fn plot_grid_and_svg() {
    let f = Fixture::nim2();
    let o = latgame(&["plot", &f.s("game.json"), "--level", "4", "--svg", &f.s("out.svg")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "P\n...\nP.P.P\n");
    let svg = std::fs::read_to_string(f.path("out.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<rect").count(), 9);
}

#[test]
fn usage_errors_are_json() {
    let o = latgame(&["query"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "usage");
    let o = latgame(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(3));
    let o = latgame(&["validate", "/nonexistent/game.json"]);
    assert_eq!(stderr_json(&o)["error"], "io");
}

#[test]
fn malformed_files_are_format_errors() {
    let f = Fixture::nim2();
    f.write("junk.json", "{\"d\": 2,");
    let o = latgame(&["validate", &f.s("junk.json")]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "format");
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(latgame(&["--help"]).status.code(), Some(0));
    assert_eq!(latgame(&["--version"]).status.code(), Some(0));
}

#[test]
fn point_cap_from_environment() {
    let f = Fixture::nim2();
    let o = Command::new(env!("CARGO_BIN_EXE_latgame"))
        .args(["solve", &f.s("game.json"), "--level", "40"])
        .env("LATGAME_POINT_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "region_too_large");
}
