use std::path::PathBuf;
use std::process::{Command, Output};

use ainf::ainf_core::UnitMode;
use ainf::cli::{self, CheckOpts, CliError, ContractionDef, Definition, TorusDef, TorusOpts};
use ainf::coefficients::FieldTag;
use ainf::fixtures::{a2_quiver, fixture_d, named_units, span_uv};
use ainf::fukaya_torus::{TorusLine, Q};
use proptest::prelude::*;
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn load(name: &str) -> Definition {
    cli::parse_definition(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

fn reparse(d: &Definition) -> Definition {
    cli::parse_definition(&d.normalized()).unwrap()
}

fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ainf"));
    c.args(args).env_remove("AINF_SEED");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn tmp(name: &str, body: &str) -> String {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn data_files_match_the_fixtures() {
    let d = load("fixture_d.json");
    assert_eq!(d.category, fixture_d(&FieldTag::F2));
    assert_eq!(d.units.as_ref(), Some(&named_units(&d.category)));
    let q = load("a2_quiver.json");
    assert_eq!(q.category, a2_quiver(&FieldTag::Q));
    let s = load("span_uv.json");
    assert_eq!(s.category, span_uv(&FieldTag::Q));
    assert!(matches!(s.contraction, Some(ContractionDef::Auto)));
}

#[test]
fn normalization_is_idempotent_on_data_files() {
    for name in ["fixture_d.json", "a2_quiver.json", "span_uv.json"] {
        let d = load(name);
        let again = reparse(&d);
        assert_eq!(again.category, d.category, "{name}");
        assert_eq!(again.normalized(), d.normalized(), "{name}");
        assert_eq!(again.digest(), d.digest(), "{name}");
        let on_disk: Value = serde_json::from_str(&std::fs::read_to_string(data(name)).unwrap()).unwrap();
        assert_eq!(on_disk, d.to_json(), "{name}");
    }
}

const YONEDA_Y: &str = r#"{
  "schema": "ainf/1",
  "field": {"tag": "Q"},
  "objects": ["X", "Y"],
  "homs": [
    {"from": "X", "to": "X", "basis": [["e_X", 0]]},
    {"from": "Y", "to": "Y", "basis": [["e_Y", 0]]},
    {"from": "X", "to": "Y", "basis": [["a", 0]]}
  ],
  "comps": [
    {"inputs": ["e_X", "e_X"], "output": {"e_X": 1}},
    {"inputs": ["e_Y", "e_Y"], "output": {"e_Y": 1}},
    {"inputs": ["a", "e_X"], "output": {"a": 1}},
    {"inputs": ["e_Y", "a"], "output": [["a", 1]]}
  ],
  "modules": [
    {
      "name": "Y_Y",
      "spaces": {"X": [["m_a", 0]], "Y": [["m_e", 0]]},
      "actions": [
        {"inputs": ["m_e", "e_Y"], "output": {"m_e": 1}},
        {"inputs": ["m_e", "a"], "output": {"m_a": 1}},
        {"inputs": ["m_a", "e_X"], "output": {"m_a": 1}}
      ]
    }
  ]
}"#;

const SPAN_EXPLICIT: &str = r#"{
  "schema": "ainf/1",
  "field": {"tag": "Q"},
  "objects": ["A"],
  "homs": [{"from": "A", "to": "A", "basis": [["e_A", 0], ["u", 0], ["v", 1]]}],
  "comps": [
    {"inputs": ["u"], "output": {"v": 1}},
    {"inputs": ["e_A", "e_A"], "output": {"e_A": 1}},
    {"inputs": ["u", "e_A"], "output": {"u": 1}},
    {"inputs": ["e_A", "u"], "output": {"u": 1}},
    {"inputs": ["v", "e_A"], "output": {"v": 1}},
    {"inputs": ["e_A", "v"], "output": {"v": -1}},
    {"inputs": ["u", "u"], "output": {"u": 1}},
    {"inputs": ["u", "v"], "output": {"v": -1}}
  ],
  "units": {"A": {"e_A": 1}},
  "contraction": [
    {
      "from": "A", "to": "A", "small": [["e", 0]],
      "f1": {"e": {"e_A": 1}},
      "g1": {"e_A": {"e": 1}},
      "t1": {"v": {"u": -1}}
    }
  ]
}"#;

#[test]
fn modules_round_trip_and_pass() {
    let d = cli::parse_definition(YONEDA_Y).unwrap();
    assert_eq!(d.modules.len(), 1);
    assert_eq!(d.modules[0].actions.len(), 3);
    let again = reparse(&d);
    assert_eq!(again.modules, d.modules);
    assert_eq!(again.normalized(), d.normalized());
    let rep = cli::cmd_check(&d, &CheckOpts::default()).unwrap();
    assert!(rep.pass, "{:?}", rep.failure);
    assert!(rep.tables.contains_key("module Y_Y"));
    let broken = YONEDA_Y.replace(r#"{"inputs": ["m_e", "e_Y"], "output": {"m_e": 1}}"#, r#"{"inputs": ["m_e", "e_Y"], "output": {"m_e": 2}}"#);
    let broken = cli::parse_definition(&broken).unwrap();
    assert!(cli::cmd_check(&broken, &CheckOpts::default()).unwrap().pass);
    let rep = cli::cmd_check(&broken, &CheckOpts { max_d: Some(3), ..CheckOpts::default() }).unwrap();
    assert!(!rep.pass);
    assert_eq!(rep.failure.unwrap()["kind"], "module");
}

#[test]
fn explicit_contraction_round_trips_and_transfers() {
    let d = cli::parse_definition(SPAN_EXPLICIT).unwrap();
    assert!(matches!(d.contraction, Some(ContractionDef::Explicit(_))));
    assert_eq!(d.category, span_uv(&FieldTag::Q));
    let again = reparse(&d);
    assert_eq!(again.normalized(), d.normalized());
    let rep = cli::cmd_transfer(&d, Some(4)).unwrap();
    assert!(rep.pass, "{:?}", rep.failure);
    assert_eq!(rep.tables["summary"]["minimal"], true);
    let bad = SPAN_EXPLICIT.replace(r#""t1": {"v": {"u": -1}}"#, r#""t1": {}"#);
    assert!(cli::cmd_transfer(&cli::parse_definition(&bad).unwrap(), Some(4)).is_err());
}

fn three_line_scene() -> TorusDef {
    let lines = ["1/0@0", "0/1@1/3", "1/1@1/7"].iter().map(|s| TorusLine::parse(s).unwrap()).collect();
    TorusDef { lines, area_cap: Q::from_integer(10), max_d: 3 }
}

#[test]
fn torus_export_round_trips_and_checks() {
    let (rep, def) = cli::cmd_torus(&TorusOpts { scene: three_line_scene(), surgery: None }).unwrap();
    assert!(rep.pass, "{:?}", rep.failure);
    let again = reparse(&def);
    assert_eq!(again.normalized(), def.normalized());
    assert_eq!(again.torus.as_ref().unwrap().lines, def.torus.as_ref().unwrap().lines);
    let check = cli::cmd_check(&again, &CheckOpts::default()).unwrap();
    assert!(check.pass, "{:?}", check.failure);
    let surgery = ["1/0@0".to_string(), "0/1@1/3".to_string(), "1/1@1/7".to_string()];
    let (rep, _) = cli::cmd_torus(&TorusOpts { scene: three_line_scene(), surgery: Some(surgery) }).unwrap();
    assert_eq!(rep.tables["surgery"]["equal"], true);
}

#[test]
fn schema_errors_carry_paths_and_lines() {
    let bad = YONEDA_Y.replace(r#"{"inputs": ["a", "e_X"], "output": {"a": 1}}"#, r#"{"inputs": ["a", "q"], "output": {"a": 1}}"#);
    match cli::parse_definition(&bad) {
        Err(CliError::Schema { path, line, msg }) => {
            assert_eq!(path, "comps[2]");
            assert_eq!(line, Some(13));
            assert!(msg.contains('q'), "{msg}");
        }
        other => panic!("{other:?}"),
    }
    let extra = YONEDA_Y.replacen(r#""objects""#, r#""colour": 1, "objects""#, 1);
    assert!(matches!(cli::parse_definition(&extra), Err(CliError::Schema { .. })));
    let old = YONEDA_Y.replace("ainf/1", "ainf/0");
    assert!(matches!(cli::parse_definition(&old), Err(CliError::Schema { path, .. }) if path == "schema"));
    match cli::parse_definition("{\n  \"schema\": \"ainf/1\",\n  \"objects\": [\"X\",]\n}") {
        Err(CliError::Syntax { line, column, .. }) => assert_eq!((line, column), (3, 19)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn inhomogeneous_constants_are_schema_errors() {
    let bad = YONEDA_Y.replace(r#""basis": [["e_Y", 0]]"#, r#""basis": [["e_Y", 1]]"#);
    assert!(matches!(cli::parse_definition(&bad), Err(CliError::Schema { path, .. }) if path == "comps"));
}

#[test]
fn empty_compositions_pass_with_a_warning() {
    let d = cli::parse_definition(r#"{"schema": "ainf/1", "field": {"tag": "F2"}, "objects": ["X"], "homs": [{"from": "X", "to": "X", "basis": [["x", 1]]}]}"#).unwrap();
    let rep = cli::cmd_check(&d, &CheckOpts::default()).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.warnings.len(), 1);
}

#[test]
fn mutated_fixture_fails_with_a_locus() {
    let d = load("fixture_d.json");
    let rep = cli::cmd_check(&d, &CheckOpts { mutations: 50, ..CheckOpts::default() }).unwrap();
    assert!(rep.pass);
    assert_eq!(rep.tables["mutations"]["detected"], 50);
    for m in &cli::random_mutations(&d.category, 10, 3) {
        let mut bad = d.clone();
        bad.category = cli::apply_mutation(&d.category, m);
        let rep = cli::cmd_check(&bad, &CheckOpts { max_d: Some(5), ..CheckOpts::default() }).unwrap();
        assert!(!rep.pass);
        let f = rep.failure.unwrap();
        if f["kind"] == "relation" {
            assert_eq!(f["inputs"].as_array().unwrap().len() as u64, f["d"].as_u64().unwrap());
        } else {
            assert_eq!(f["kind"], "unit");
        }
    }
}

#[test]
fn mutation_sampling_is_without_replacement_when_possible() {
    let d = fixture_d(&FieldTag::F2);
    let sites = cli::mutation_sites(&d).len();
    let ms = cli::random_mutations(&d, sites, 9);
    let distinct: std::collections::BTreeSet<_> = ms.iter().map(|m| (m.inputs.clone(), m.out)).collect();
    assert_eq!(distinct.len(), sites);
    assert_eq!(cli::random_mutations(&d, sites + 5, 9).len(), sites + 5);
    assert_eq!(cli::random_mutations(&d, 20, 4), cli::random_mutations(&d, 20, 4));
}

#[test]
fn strict_and_cohomological_unit_modes() {
    let d = load("a2_quiver.json");
    for units in [UnitMode::Strict, UnitMode::Cohomological] {
        assert!(cli::cmd_check(&d, &CheckOpts { units, ..CheckOpts::default() }).unwrap().pass);
    }
}

#[test]
fn cohomology_and_hochschild_reports() {
    let s = cli::cmd_cohomology(&load("span_uv.json")).unwrap();
    assert_eq!(s.tables["cohomology"]["A->A"], serde_json::json!({"0": 1}));
    let h = cli::cmd_hochschild(&load("a2_quiver.json"), (-1, 2), 3).unwrap();
    assert_eq!(h.tables["hochschild"]["0"]["dim"], 1);
    assert_eq!(h.tables["hochschild"]["0"]["exact"], true);
    assert!(cli::parse_window("2..1").is_err());
    assert_eq!(cli::parse_window("-1..2").unwrap(), (-1, 2));
}

#[test]
fn cone_report_on_fixture_d() {
    let rep = cli::cmd_cone(&load("fixture_d.json"), "Z0", "Z1", "x1").unwrap();
    assert!(rep.pass, "{:?}", rep.failure);
    assert_eq!(rep.tables["maurer_cartan"]["pass"], true);
    assert_eq!(rep.tables["exact_triangle"]["pass"], true);
    assert!(cli::cmd_cone(&load("fixture_d.json"), "Z0", "Z1", "x2").is_err());
}

#[test]
fn binary_exit_codes() {
    let ok = run(&["check", data("fixture_d.json").to_str().unwrap()], &[]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert_eq!(report(&ok)["pass"], true);
    let text = std::fs::read_to_string(data("fixture_d.json")).unwrap();
    let mut doc: Value = serde_json::from_str(&text).unwrap();
    let comps = doc["comps"].as_array_mut().unwrap();
    comps.retain(|c| c["inputs"] != serde_json::json!(["x1", "e_Z0"]));
    let broken = tmp("broken_d.json", &doc.to_string());
    let fail = run(&["check", &broken], &[]);
    assert_eq!(fail.status.code(), Some(1));
    let r = report(&fail);
    assert_eq!(r["failure"]["kind"], "unit");
    let syntax = tmp("syntax.json", "{\"schema\": ");
    let err = run(&["check", &syntax], &[]);
    assert_eq!(err.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&err.stderr).contains("line 1"));
    assert_eq!(run(&["check", "/nonexistent/file.json"], &[]).status.code(), Some(2));
    assert_eq!(run(&["torus", "--lines", "1/0@0", "1/0@1/2"], &[]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"], &[]).status.code(), Some(2));
}

#[test]
fn binary_reports_are_deterministic_and_seeded() {
    let f = data("fixture_d.json");
    let f = f.to_str().unwrap();
    let a = run(&["check", f, "--mutations", "5", "--seed", "7"], &[]);
    let b = run(&["check", f, "--mutations", "5", "--seed", "7"], &[]);
    assert_eq!(a.stdout, b.stdout);
    let env = run(&["check", f, "--mutations", "5"], &[("AINF_SEED", "7")]);
    assert_eq!(a.stdout, env.stdout);
    let default = run(&["check", f, "--mutations", "5"], &[]);
    assert_eq!(report(&default)["command"]["seed"], cli::DEFAULT_SEED);
    assert_ne!(default.stdout, a.stdout);
    assert_eq!(run(&["check", f, "--mutations", "5"], &[("AINF_SEED", "seven")]).status.code(), Some(2));
    let pretty = run(&["--pretty", "check", f], &[]);
    assert!(String::from_utf8_lossy(&pretty.stdout).contains("result   PASS"));
}

#[test]
fn binary_torus_export_reimports() {
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("torus_export.json");
    let o = run(&["torus", "--lines", "1/0@0", "0/1@1/3", "1/1@1/7", "--export", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let check = run(&["check", out.to_str().unwrap()], &[]);
    assert_eq!(check.status.code(), Some(0));
    let file = run(&["torus", "--file", out.to_str().unwrap()], &[]);
    assert_eq!(file.stdout, o.stdout);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mutation_round_trip_preserves_normal_form(seed in any::<u64>()) {
        let d = load("fixture_d.json");
        for m in cli::random_mutations(&d.category, 3, seed) {
            let mut md = d.clone();
            md.category = cli::apply_mutation(&d.category, &m);
            let again = reparse(&md);
            prop_assert_eq!(&again.category, &md.category);
            prop_assert_eq!(again.normalized(), md.normalized());
        }
    }
}
