use std::fs;
use std::path::Path;
use std::sync::Arc;

use cantor_towers::cli;
use cantor_towers::findyn::{EquivariantMap, FiniteSystem};
use cantor_towers::fraisse::{AmalgamProblem, AmalgamSolution};
use cantor_towers::tower::Tower;

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(std::iter::once("cantor").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn write_problem(dir: &Path) -> String {
    let w = Arc::new(FiniteSystem::cycle(2));
    let f = EquivariantMap::new(Arc::new(FiniteSystem::cycle(4)), w.clone(), vec![0, 1, 0, 1]).unwrap();
    let g = EquivariantMap::new(Arc::new(FiniteSystem::from_cycle_type(&[2, 2])), w, vec![0, 1, 1, 0]).unwrap();
    let p = path(dir, "problem.json");
    fs::write(&p, AmalgamProblem::new(f, g).unwrap().to_json()).unwrap();
    p
}

#[test]
fn exit_code_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (spiral_t, odo_t, chain_t) = (path(d, "spiral.json"), path(d, "odo.json"), path(d, "chain.json"));
    let (coarse, junk) = (path(d, "coarse.json"), path(d, "junk.json"));
    let problem = write_problem(d);
    fs::write(&coarse, format!(r#"{{"level":0,"blocks":[{:?}]}}"#, (0..18).collect::<Vec<_>>())).unwrap();
    fs::write(&junk, "{not json").unwrap();

    let matrix: Vec<(Vec<&str>, i32)> = vec![
        (vec!["spiral", "tower", "--depth", "2", "--out", &spiral_t], 0),
        (vec!["odometer", "tower", "--spec", ":2", "--depth", "3", "--out", &odo_t], 0),
        (vec!["fraisse", "chain", "--schedule", "2,3", "--depth", "3", "--out", &chain_t], 0),
        (vec!["odometer", "conj", "--a", ":2", "--b", ":3"], 1),
        (vec!["odometer", "conj", "--a", "2", "--b", "4"], 0),
        (vec!["odometer", "swap", "--spec", ":3"], 1),
        (vec!["odometer", "phi", "--spec", "6", "--k", "4"], 0),
        (vec!["odometer", "step", "--spec", ":2", "--digits", "0,2"], 2),
        (vec!["spiral", "verify", "--n", "2"], 0),
        (vec!["spiral", "build", "--n", "0"], 2),
        (vec!["spiral", "export", "--n", "1", "--format", "dot"], 0),
        (vec!["tower", "validate", "--tower", &spiral_t, "--cantor"], 0),
        (vec!["tower", "lift", "--tower", &spiral_t, "--n", "1"], 0),
        (vec!["tower", "lift", "--tower", &spiral_t, "--n", "1", "--max-level", "0"], 1),
        (vec!["tower", "lift", "--tower", &spiral_t, "--n", "1", "--partition", &coarse], 2),
        (vec!["tower", "star", "--tower", &odo_t, "--depth", "3"], 0),
        (vec!["tower", "star", "--tower", &spiral_t, "--depth", "1"], 2),
        (vec!["tower", "wandering", "--tower", &odo_t, "--depth", "3"], 1),
        (vec!["tower", "wandering", "--tower", &spiral_t, "--depth", "1"], 0),
        (vec!["tower", "validate", "--tower", &junk], 2),
        (vec!["fraisse", "amalgamate", "--problem", &problem], 0),
        (vec!["fraisse", "jep", "--x", "2", "--y", "3"], 0),
        (vec!["fraisse", "certify", "--chain", &chain_t, "--spiral-depth", "2"], 0),
        (vec!["fraisse", "certify", "--chain", &spiral_t], 2),
        (vec!["fraisse", "merge"], 2),
    ];
    assert!(matrix.len() >= 20);
    for (args, expected) in &matrix {
        let (code, out, err) = run(args);
        assert_eq!(code, *expected, "{args:?}\nstdout: {out}\nstderr: {err}");
        if code == 2 {
            assert!(!err.is_empty(), "{args:?} failed silently");
        }
    }
}

#[test]
fn headline_messages() {
    let (_, out, _) = run(&["odometer", "conj", "--a", ":2", "--b", ":3"]);
    assert!(out.starts_with("not conjugate"), "{out}");
    assert_eq!(run(&["spiral", "verify", "--n", "2"]).1.trim(), "xi morphism: OK");
    assert_eq!(run(&["odometer", "swap", "--spec", ":3"]).1.trim(), "fails: σ(x)=1−x unsatisfiable");
    assert_eq!(run(&["odometer", "step", "--spec", ":2", "--digits", "1,1,0"]).1.trim(), "0,0,1");
}

#[test]
fn json_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let spiral_t = path(dir.path(), "spiral.json");
    assert_eq!(run(&["spiral", "tower", "--depth", "2", "--out", &spiral_t]).0, 0);
    let invocations: Vec<Vec<&str>> = vec![
        vec!["--json", "odometer", "conj", "--a", "6:5", "--b", ":30"],
        vec!["--json", "odometer", "phi", "--spec", ":3", "--k", "2"],
        vec!["--json", "odometer", "swap", "--spec", "3,4"],
        vec!["--json", "odometer", "step", "--spec", ":3", "--digits", "2,2"],
        vec!["--json", "odometer", "truncate", "--spec", ":2,3", "--n", "2"],
        vec!["--json", "spiral", "build", "--n", "1"],
        vec!["--json", "spiral", "verify", "--n", "1"],
        vec!["--json", "spiral", "wandering", "--n", "2"],
        vec!["--json", "tower", "lift", "--tower", &spiral_t, "--n", "1"],
        vec!["--json", "tower", "validate", "--tower", &spiral_t],
        vec!["--json", "fraisse", "jep", "--x", "2,1", "--y", "3"],
        vec!["--json", "fraisse", "chain", "--schedule", "2", "--depth", "3"],
    ];
    for args in invocations {
        let (code, out, err) = run(&args);
        assert!(code <= 1, "{args:?}: {err}");
        let value: serde_json::Value = serde_json::from_str(out.trim()).unwrap_or_else(|e| panic!("{args:?}: {e}\n{out}"));
        let again: serde_json::Value = serde_json::from_str(&value.to_string()).unwrap();
        assert_eq!(value, again);
    }
    let (_, out, _) = run(&["--json", "spiral", "wandering", "--n", "2"]);
    let points: Vec<String> = serde_json::from_str(&out).unwrap();
    assert_eq!(points.len(), 108);
}

#[test]
fn artifacts_reparse_to_equal_values() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let chain_t = path(d, "chain.json");
    run(&["fraisse", "chain", "--schedule", "2,3", "--depth", "3", "--out", &chain_t]);
    let text = fs::read_to_string(&chain_t).unwrap();
    assert_eq!(Tower::from_json(&text).unwrap().to_json(), text);

    let sys_path = path(d, "c6.json");
    run(&["odometer", "truncate", "--spec", ":2,3", "--n", "2", "--out", &sys_path]);
    let text = fs::read_to_string(&sys_path).unwrap();
    assert_eq!(FiniteSystem::from_json(&text).unwrap().to_json(), text);

    let problem = write_problem(d);
    let sol_path = path(d, "solution.json");
    assert_eq!(run(&["fraisse", "amalgamate", "--problem", &problem, "--out", &sol_path]).0, 0);
    let p = AmalgamProblem::from_json(&fs::read_to_string(&problem).unwrap()).unwrap();
    let text = fs::read_to_string(&sol_path).unwrap();
    assert_eq!(AmalgamSolution::from_json(&text, &p).unwrap().to_json(), text);
}

#[test]
fn outputs_are_deterministic() {
    let args = ["--json", "fraisse", "chain", "--schedule", "2,3", "--depth", "4"];
    assert_eq!(run(&args).1, run(&args).1);
    let args = ["spiral", "export", "--n", "1", "--format", "json"];
    assert_eq!(run(&args).1, run(&args).1);
}
