use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dualkit::dual::{dualize, DualizationMethod};
use dualkit::gen::gen_2d;
use dualkit::io::{read_lp, write_lp};
use dualkit::lp::{ConstraintSense, LinearConstraint, LinearProgram, ObjectiveSense, Variable};
use dualkit::metrics::cged;

fn dualkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dualkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn save(dir: &Path, name: &str, lp: &LinearProgram) -> PathBuf {
    let path = dir.join(name);
    write_lp(&path, lp, None).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn model5() -> LinearProgram {
    LinearProgram::new(ObjectiveSense::Minimize)
        .with_variable(Variable::non_negative("yw"))
        .with_variable(Variable::non_negative("ys"))
        .with_objective([("yw", 12.0), ("ys", 8.0)])
        .with_constraint(LinearConstraint::new(
            "d",
            [("yw", 2.0), ("ys", 1.0)],
            ConstraintSense::Geq,
            5.0,
        ))
        .with_constraint(LinearConstraint::new(
            "t",
            [("yw", 3.0), ("ys", 2.0)],
            ConstraintSense::Geq,
            4.0,
        ))
}

fn model6() -> LinearProgram {
    LinearProgram::new(ObjectiveSense::Minimize)
        .with_variable(Variable::non_negative("yw"))
        .with_variable(Variable::non_negative("ys"))
        .with_variable(Variable::non_negative("zd"))
        .with_variable(Variable::non_negative("zt"))
        .with_objective([("yw", 12.0), ("ys", 8.0)])
        .with_constraint(LinearConstraint::new(
            "d",
            [("yw", 2.0), ("ys", 1.0), ("zd", -1.0)],
            ConstraintSense::Eq,
            5.0,
        ))
        .with_constraint(LinearConstraint::new(
            "t",
            [("yw", 3.0), ("ys", 2.0), ("zt", -1.0)],
            ConstraintSense::Eq,
            4.0,
        ))
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn solve_unit_square() {
    let dir = tempfile::tempdir().unwrap();
    let p = save(dir.path(), "square.mps", &gen_2d(19, 1).unwrap());
    let out = dualkit(&["solve", s(&p)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().next(), Some("OPTIMAL 2"));
}

#[test]
fn check_slacked_dual_against_plain_dual() {
    let dir = tempfile::tempdir().unwrap();
    let m6 = save(dir.path(), "m6.json", &model6());
    let m5 = save(dir.path(), "m5.mps", &model5());
    let out = dualkit(&["check", s(&m6), s(&m5), "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["schema"], "dualkit-report/1");
    assert_eq!(v["cged"], 0.0);
    assert!(v["nged"].as_f64().unwrap() > 0.0);
    assert_eq!(v["equivalent"], true);
}

#[test]
fn echoed_primal_matches_value_but_not_structure() {
    let dir = tempfile::tempdir().unwrap();
    let primal = gen_2d(25, 1).unwrap();
    let p = save(dir.path(), "primal.mps", &primal);
    let d = save(
        dir.path(),
        "dual.mps",
        &dualize(&primal, DualizationMethod::StandardForm).dual,
    );
    let out = dualkit(&["check", s(&p), s(&d), "--json"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["obj_match"], true);
    assert!(v["cged"].as_f64().unwrap() > 0.0);
    assert_eq!(v["equivalent"], false);
}

#[test]
fn truth_against_itself() {
    let dir = tempfile::tempdir().unwrap();
    let t = save(dir.path(), "t.mps", &model5());
    let out = dualkit(&["check", s(&t), s(&t), "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(
        (
            v["cged"].as_f64(),
            v["nged"].as_f64(),
            v["obj_match"].as_bool()
        ),
        (Some(0.0), Some(0.0), Some(true))
    );
    for metric in ["cged", "nged", "obj"] {
        assert_eq!(
            code(&dualkit(&["check", s(&t), s(&t), "--metric", metric])),
            0,
            "{metric}"
        );
    }
}

#[test]
fn malformed_input_exits_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mps");
    fs::write(&bad, "NAME x\nROWS\n N obj\n Q r1\nENDATA\n").unwrap();
    let out = dualkit(&["dualize", s(&bad)]);
    assert_eq!(code(&out), 2);
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("line 4"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let good = save(dir.path(), "good.mps", &model5());
    let out = dualkit(&["check", s(&bad), s(&good), "--json"]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["equivalent"], false);
}

#[test]
fn dualize_writes_round_trippable_dual() {
    let dir = tempfile::tempdir().unwrap();
    let primal = gen_2d(30, 2).unwrap();
    let p = save(dir.path(), "primal.mps", &primal);
    let expected = dualize(&primal, DualizationMethod::StandardForm).dual;
    for (method, name) in [("checked", "d1.mps"), ("sf", "d2.json"), ("sob", "d3.mps")] {
        let out_path = dir.path().join(name);
        let out = dualkit(&["dualize", s(&p), "--method", method, "--out", s(&out_path)]);
        assert_eq!(code(&out), 0, "{method}");
        let dual = read_lp(&out_path, None).unwrap();
        assert_eq!(cged(&dual, &expected).unwrap().0, 0.0, "{method}");
    }
    let out = dualkit(&["dualize", s(&p), "--method", "sf"]);
    assert!(stdout(&out).contains("ROWS"));
}

#[test]
fn canonical_graph_dot() {
    let dir = tempfile::tempdir().unwrap();
    let lp = LinearProgram::new(ObjectiveSense::Minimize)
        .with_variable(Variable::non_negative("x1"))
        .with_variable(Variable::non_negative("x2"))
        .with_variable(Variable::new("s", f64::NEG_INFINITY, 0.0))
        .with_objective([("x1", 1.0), ("x2", 1.0)])
        .with_constraint(LinearConstraint::new(
            "c1",
            [("x1", 1.0), ("x2", 1.0), ("s", 1.0)],
            ConstraintSense::Eq,
            1.0,
        ));
    let p = save(dir.path(), "eq.json", &lp);
    let dot = dir.path().join("g.dot");
    let out = dualkit(&["graph", s(&p), "--canonical", "--dot", s(&dot)]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&dot).unwrap();
    let nodes = text
        .lines()
        .filter(|l| l.contains('[') && !l.contains("--"))
        .count();
    assert_eq!(nodes, 5, "{text}");
}

#[test]
fn inject_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = save(dir.path(), "dual.mps", &model5());
    fs::create_dir_all(dir.path().join("a")).unwrap();
    fs::create_dir_all(dir.path().join("b")).unwrap();
    let (o1, o2) = (dir.path().join("a/e.mps"), dir.path().join("b/e.mps"));
    let a = dualkit(&[
        "inject",
        s(&d),
        "--error",
        "MISSING_CONSTRAINT",
        "--seed",
        "5",
        "--out",
        s(&o1),
    ]);
    let b = dualkit(&[
        "inject",
        s(&d),
        "--error",
        "missing-constraint",
        "--seed",
        "5",
        "--out",
        s(&o2),
    ]);
    assert_eq!((code(&a), code(&b)), (0, 0));
    assert_eq!(fs::read(&o1).unwrap(), fs::read(&o2).unwrap());
    assert_eq!(stdout(&a), stdout(&b));
    let out = dualkit(&["check", s(&o1), s(&d)]);
    assert_eq!(code(&out), 1);
}

#[test]
fn gen_small_config_and_refuse_overwrite() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"two_d": false, "co_per_family": 1, "error_types": ["MISSING_VARIABLE"]}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("ds");
    let out = dualkit(&["gen", "--config", s(&cfg), "--out", s(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["samples"].as_array().unwrap().len(), 7);
    assert!(out_dir
        .join("co_mis_00/errors/MISSING_VARIABLE.mps")
        .exists());
    let again = dualkit(&["gen", "--config", s(&cfg), "--out", s(&out_dir)]);
    assert_eq!(code(&again), 5);
    fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    assert_eq!(
        code(&dualkit(&[
            "gen",
            "--config",
            s(&cfg),
            "--out",
            s(&dir.path().join("other"))
        ])),
        5
    );
}

#[test]
fn report_aggregates() {
    let dir = tempfile::tempdir().unwrap();
    let (cands, truths) = (dir.path().join("c"), dir.path().join("t"));
    fs::create_dir_all(&cands).unwrap();
    fs::create_dir_all(&truths).unwrap();
    save(&truths, "a.mps", &model5());
    save(&cands, "a.mps", &model6());
    save(&truths, "b.mps", &model5());
    save(&cands, "b.mps", &gen_2d(19, 1).unwrap());
    save(&truths, "c.mps", &model5());
    let out = dualkit(&[
        "report",
        "--candidates",
        s(&cands),
        "--truths",
        s(&truths),
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let agg = &v["aggregate"];
    assert_eq!(agg["samples"], 3);
    assert!((agg["cged_accuracy"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    assert_eq!(agg["parse_failures"], 1);
    let rows = v["rows"].as_array().unwrap();
    let recomputed = rows
        .iter()
        .filter(|r| r["cged"].as_f64() == Some(0.0))
        .count();
    assert_eq!(recomputed, 1);
}

#[test]
fn atol_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let a = save(dir.path(), "a.mps", &model5());
    let mut shifted = model5();
    shifted.constraints[0].rhs += 1e-3;
    let b = save(dir.path(), "b.mps", &shifted);
    assert_eq!(
        code(&dualkit(&["check", s(&a), s(&b), "--metric", "cged"])),
        1
    );
    let out = Command::new(env!("CARGO_BIN_EXE_dualkit"))
        .args(["check", s(&a), s(&b), "--metric", "cged"])
        .env("DUALKIT_ATOL", "0.01")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}
