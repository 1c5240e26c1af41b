use std::process::Command;

use serde_json::{json, Value};

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ordtree"))
        .args(args)
        .output()
        .expect("binary runs");
    let text = String::from_utf8(out.stdout).expect("utf-8");
    let report = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (out.status.code().expect("exit code"), report, text)
}

#[test]
fn rank_of_a_point_is_one() {
    let (code, r, _) = run(&["rank", &data("one.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"], json!({"dp": {"cnf": [[{"cnf": []}, 1]]}}));
    assert_eq!(r["verification"], json!("Skipped"));
}

#[test]
fn rank_verifies_against_brute_force() {
    let (code, r, _) = run(&["rank", &data("omega2.json"), "--verify"]);
    assert_eq!(code, 0);
    assert_eq!(r["verification"], json!("Passed"));
    let w_plus_1 = json!({"cnf": [[{"cnf": [[{"cnf": []}, 1]]}, 1], [{"cnf": []}, 1]]});
    assert_eq!(r["verdict"]["dp"], w_plus_1);
}

#[test]
fn rank_budget_exceeded_exits_3() {
    let (code, r, _) = run(&["rank", &data("omega2.json"), "--budget", r#"{"cnf":[[{"cnf":[]},5]]}"#]);
    assert_eq!(code, 3);
    assert_eq!(r["error"]["kind"], json!("BudgetExceeded"));
}

#[test]
fn homogenize_branching_four_passes_verification() {
    let (code, r, _) = run(&["homogenize", &data("tree4.json"), &data("colouring4.json"), "--verify"]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"]["verdict"], json!("Homogeneous"));
    assert_eq!(r["verification"], json!("Passed"));
}

#[test]
fn counterexamples_pass_verification() {
    let (code, r, _) = run(&["homogenize", &data("tree2.json"), &data("colouring2.json"), "--verify"]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"]["verdict"], json!("Counterexample"));
    assert_eq!(r["verification"], json!("Passed"));
}

#[test]
fn not_downward_closed_family_exits_2_with_witness() {
    let (code, r, _) = run(&["ideal-check", &data("notdown.json")]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["detail"]["NotDownwardClosed"]["missing"], json!([1]));
}

#[test]
fn malformed_input_names_a_json_pointer() {
    let (code, r, _) = run(&["rank", &data("malformed.json")]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["kind"], json!("MalformedInput"));
    assert!(r["error"]["pointer"].as_str().unwrap().starts_with("/args/0"), "{r}");
}

#[test]
fn unknown_command_exits_2() {
    let (code, r, _) = run(&["transmogrify", "x.json"]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["kind"], json!("UnknownCommand"));
}

#[test]
fn reports_are_byte_identical_and_verify_keeps_the_verdict() {
    let args = ["iso", &data("shuffle01.json"), &data("shuffle01.json"), "--seed", "7", "--rounds", "300"];
    let (_, plain, first) = run(&args);
    let (_, _, second) = run(&args);
    assert_eq!(first, second);
    let mut checked: Vec<&str> = args.to_vec();
    checked.push("--verify");
    let (code, r, _) = run(&checked);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"], plain["verdict"]);
    assert_eq!(r["verification"], json!("Passed"));
    assert!(r["verdict"]["pairs"].as_array().unwrap().len() >= 150);
}

#[test]
fn iso_reports_obstruction_and_trace() {
    let (code, r, _) = run(&["iso", &data("shuffle01.json"), &data("shuffle012.json"), "--trace", "--rounds", "10"]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"]["obstruction"]["colour"], json!(2));
    assert!(r["verdict"]["trace"].is_array());
}

#[test]
fn game_and_tree_commands() {
    let (code, r, _) = run(&["game", &data("tree2.json"), &data("target2.json"), "--verify"]);
    assert_eq!(code, 0);
    assert_eq!(r["verification"], json!("Passed"));
    let (code, r, _) = run(&["level-homogenize", &data("tree2.json"), &data("levels2.json"), "--verify"]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"]["levels"], json!([0, 1, 0]));
    assert_eq!(r["verification"], json!("Passed"));
    let (code, r, _) = run(&["bound-homogenize", &data("tree2.json"), &data("bounds2.json"), "--mu", "3", "--verify"]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"]["alpha"], json!(4));
    let (code, r, _) =
        run(&["bound-homogenize", &data("tree2.json"), &data("bounds2.json"), "--mu", "3", "--cap", "2"]);
    assert_eq!(code, 3, "{r}");
    let (code, r, _) = run(&["cover-homogenize", &data("tree2.json"), &data("cover2.json"), "--verify"]);
    assert_eq!(code, 0);
    assert!(r["verdict"].get("Wins").is_some() || r["verdict"].get("NoIndexWins").is_some());
    let (code, r, _) = run(&["tree-rank", &data("tree2.json"), "--mode", "reflexive"]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"]["ranks"][0]["rank"], json!({"cnf": [[{"cnf": []}, 2]]}));
    let (code, r, _) = run(&["tree-compare", &data("tree2.json"), &data("tree2.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"]["level"], json!("LEOtimes"));
    let (code, r, _) = run(&["front", &data("plain_tree.json"), &data("front_nodes.json"), "--verify"]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"]["contains_front"], json!(true));
    assert_eq!(r["verification"], json!("Passed"));
}

#[test]
fn order_term_commands() {
    let (code, r, _) = run(&["scattered", &data("shuffle01.json")]);
    assert_eq!((code, &r["verdict"]["scattered"]), (0, &json!(false)));
    let (code, r, _) = run(&["canon-colour", &data("omega2.json"), "--verify"]);
    assert_eq!(code, 0);
    assert_eq!(r["verification"], json!("Passed"));
    let (code, r, _) = run(&["cut-classify", &data("omega2.json"), &data("cut_start.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"]["cases"], json!(["I0Empty"]));
}

#[test]
fn ideal_commands() {
    let (code, r, _) = run(&["ideal-check", &data("singletons5.json"), "--lam", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"]["report"]["covering_number"], json!({"Finite": 5}));
}

#[test]
fn almost_disjoint_commands() {
    let (code, r, _) = run(&["ad", "extend", &data("branches3.json"), "--emit", "8", "--verify"]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"]["elements"].as_array().unwrap().len(), 8);
    assert_eq!(r["verification"], json!("Passed"));
    let (code, r, _) = run(&["ad", "extend", &data("evens_odds.json"), "--emit", "3"]);
    assert_eq!(code, 3);
    assert_eq!(r["error"]["detail"]["HorizonExhausted"]["certified"], json!(true));
    let (code, r, _) = run(&["ad", "disjointify", &data("powers.json"), "--verify"]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"]["cuts"], json!([2, 2]));
    assert_eq!(r["verification"], json!("Passed"));
}
