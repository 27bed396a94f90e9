//! End-to-end runs of the `vdp` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const EXAMPLE: &str = "-5 + digitsum(x1, 4+7*i^3, 5)";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vdp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn expand_identity() {
    let out = run(&["expand", "--prime", "3", "--level", "2", "--expr", "x1", "--precision", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["entries"], 9);
    assert_eq!(v["sup_norm"], "1");
    let b = v["table"]["B"].as_array().unwrap();
    assert_eq!(b[2], serde_json::json!([2, 0, 0, 0]));
    // B_5 = 5 - 2
    assert_eq!(b[5], serde_json::json!([0, 1, 0, 0]));
}

#[test]
fn expand_zero_and_example() {
    let v = json(&run(&["expand", "--prime", "5", "--level", "2", "--expr", "0"]));
    assert_eq!(v["sup_norm"], "0");
    let v = json(&run(&["expand", "--prime", "7", "--level", "2", "--precision", "6", "--expr", EXAMPLE]));
    let b = v["table"]["B"].as_array().unwrap();
    let m7 = 7i64.pow(6);
    for m in 0..7i64 {
        let expected = (-5 + 4 * m.pow(5)).rem_euclid(m7);
        let digits: Vec<i64> = b[m as usize].as_array().unwrap().iter().map(|d| d.as_i64().unwrap()).collect();
        let value = digits.iter().rev().fold(0, |acc, d| acc * 7 + d);
        assert_eq!(value, expected, "m = {m}");
    }
}

#[test]
fn table_file_round_trip() {
    let path = scratch("fermat-table.json");
    let path_str = path.to_str().unwrap();
    let out = run(&[
        "expand", "--prime", "7", "--level", "2", "--precision", "6", "--expr", "divp(x1 - x1^7, 1)",
        "--output", path_str,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out).get("table").is_none());
    let from_table = json(&run(&["eval", "--table", path_str, "--at", "30"]));
    let direct = json(&run(&["eval", "--prime", "7", "--precision", "6", "--expr", "divp(x1 - x1^7, 1)", "--at", "30"]));
    assert_eq!(from_table["value"], direct["value"]);
    let lip = run(&["lipschitz", "--table", path_str, "--alpha", "1"]);
    assert_eq!(lip.status.code(), Some(0));
    let bad = run(&["lipschitz", "--table", path_str, "--alpha", "0"]);
    assert_eq!(bad.status.code(), Some(1));
    let wrong_prime = run(&["eval", "--table", path_str, "--prime", "5", "--at", "1"]);
    assert_eq!(wrong_prime.status.code(), Some(2));
}

#[test]
fn multivariate_table_keys() {
    let v = json(&run(&["expand", "--prime", "3", "--vars", "2", "--level", "1", "--expr", "x1*x2", "--precision", "3"]));
    let a = v["table"]["A"].as_object().unwrap();
    assert_eq!(a.len(), 9);
    assert_eq!(a["(2,2)"], serde_json::json!([1, 1, 0]));
    assert_eq!(v["table"]["n"], 2);
}

#[test]
fn lipschitz_tiers() {
    let pass = run(&["lipschitz", "--prime", "7", "--level", "2", "--alpha", "1", "--expr", "divp(x1 - x1^7, 1)"]);
    assert_eq!(pass.status.code(), Some(0));
    let v = json(&pass);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["tiers"]["necessary-bound"]["status"], "pass");
    assert_eq!(v["tiers"]["pair-sampled"]["status"], "pass");

    let fail = run(&["lipschitz", "--prime", "7", "--level", "2", "--alpha", "0", "--expr", "divp(x1 - x1^7, 1)"]);
    assert_eq!(fail.status.code(), Some(1));
    assert_eq!(json(&fail)["tiers"]["necessary-bound"]["status"], "violated");

    let constant = run(&["lipschitz", "--prime", "5", "--expr", "3"]);
    assert_eq!(constant.status.code(), Some(0));

    let multi = json(&run(&[
        "lipschitz", "--prime", "7", "--vars", "2", "--level", "2", "--alpha", "1,0",
        "--expr", "divp(x1 - x1^7, 1) + x2",
    ]));
    for tier in ["necessary-bound", "projection-sampled", "pair-sampled"] {
        assert_eq!(multi["tiers"][tier]["status"], "pass", "{tier}");
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["lipschitz", "--prime", "3", "--vars", "2", "--level", "2", "--seed", "11", "--expr", "x1^2*x2 + divp(x2 - x2^3, 1)"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["expand", "--prime", "3", "--vars", "2", "--level", "2", "--expr", "x1*x2"]);
    let d = run(&["expand", "--prime", "3", "--vars", "2", "--level", "2", "--expr", "x1*x2"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn roots_and_lifts() {
    let v = json(&run(&["roots", "--prime", "7", "--level", "1", "--expr", EXAMPLE]));
    assert_eq!(v["roots"], serde_json::json!([5]));
    let v = json(&run(&["roots", "--prime", "3", "--vars", "2", "--level", "1", "--expr", "x1 + x2"]));
    assert_eq!(v["roots"], serde_json::json!([[0, 0], [1, 2], [2, 1]]));

    let lifted = run(&["lift", "--prime", "5", "--expr", "x1 - 1234", "--start", "4", "--target-precision", "8"]);
    assert_eq!(lifted.status.code(), Some(0));
    assert_eq!(json(&lifted)["trace"]["root"][0], "1234");

    let failed = run(&["lift", "--prime", "2", "--expr", "x1^2 - 1", "--start", "1", "--target-precision", "6"]);
    assert_eq!(failed.status.code(), Some(1));
    assert_eq!(json(&failed)["trace"]["status"], "condition-failed");

    let auto = run(&[
        "lift", "--prime", "7", "--vars", "2", "--expr", &format!("7*x1 + {}", EXAMPLE.replace("x1", "x2")), "--start", "0,5",
        "--auto-coordinate", "--target-precision", "6",
    ]);
    assert_eq!(auto.status.code(), Some(0));
    let levels = json(&auto)["trace"]["levels"].as_array().unwrap().clone();
    assert!(levels.iter().all(|l| l["coordinate"] == 2));
}

#[test]
fn func_file_supplies_alpha() {
    let path = scratch("fermat.json");
    std::fs::write(&path, r#"{"arity":1,"alpha":[1],"body":"divp(x1 - x1^5, 1)"}"#).unwrap();
    let out = run(&["lipschitz", "--prime", "5", "--level", "2", "--func", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["alpha"], serde_json::json!([1]));
}

#[test]
fn wellposed_reports() {
    let ok = run(&["wellposed", "--prime", "7", "--alpha", "1", "--samples", "500", "--expr", "divp(x1 - x1^7, 1)"]);
    assert_eq!(ok.status.code(), Some(0));
    let v = json(&ok);
    assert_eq!(v["exact-divisions"]["status"], "pass");
    assert_eq!(v["residue-classes"]["status"], "pass");
    let bad = run(&["wellposed", "--prime", "7", "--samples", "200", "--expr", "divp(x1 - 1, 1)"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn text_format() {
    let out = run(&["lift", "--prime", "7", "--expr", EXAMPLE, "--start", "5", "--target-precision", "4", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("status: lifted\n"), "{text}");
    assert!(text.contains("condition [4 2 6 1 5 3]"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["eval", "--prime", "6", "--expr", "x1", "--at", "1"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--prime", "5", "--expr", "x1 +", "--at", "1"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--prime", "5", "--expr", "divp(x1, 1)", "--at", "1"]).status.code(), Some(3));
    assert_eq!(run(&["expand", "--prime", "5", "--level", "5", "--precision", "2", "--expr", "x1"]).status.code(), Some(4));
    let over = run(&["expand", "--prime", "7", "--level", "9", "--expr", "x1", "--budget", "1000"]);
    assert_eq!(over.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&over.stderr).contains("budget"));
    let start = run(&["lift", "--prime", "7", "--expr", "x1^2 - 2", "--start", "1"]);
    assert_eq!(start.status.code(), Some(2));
}
