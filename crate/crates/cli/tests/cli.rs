use std::path::{Path, PathBuf};
use std::process::Command;

use pcoeq::fixtures;
use pcoeq::io::algebra_to_json;
use pcoeq_cli::{execute, Verdict};
use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pcoeq"))
}

fn write(dir: &Path, name: &str, value: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

/// Runs the binary with a report file; returns the exit code and report.
fn run(dir: &Path, args: &[&str]) -> (i32, Option<Value>) {
    let report = dir.join("report.json");
    let _ = std::fs::remove_file(&report);
    let out = bin()
        .arg("--report")
        .arg(&report)
        .args(args)
        .output()
        .unwrap();
    let code = out.status.code().unwrap();
    let value = std::fs::read_to_string(&report)
        .ok()
        .map(|t| serde_json::from_str(&t).unwrap());
    if code == 2 {
        assert!(!out.stderr.is_empty());
    }
    (code, value)
}

fn validate(dir: &Path, report: &Value) -> i32 {
    let path = write(dir, "to-validate.json", report);
    bin()
        .arg("validate-witness")
        .arg(&path)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

/// Algebra files for `X` and `Y`, and the pair `u, v : {0,a} ⇉ X` with
/// `v(a) = b`.
fn subtraction_files(dir: &Path) -> Vec<String> {
    let x = fixtures::subtraction_x();
    let s = x.restrict("S", &[0, 1]).unwrap();
    let mut args = Vec::new();
    for (file, alg) in [
        ("x.json", x),
        ("y.json", fixtures::subtraction_y()),
        ("s.json", s),
    ] {
        write(dir, file, &algebra_to_json(&alg));
        args.push("--algebra".to_string());
        args.push(dir.join(file).display().to_string());
    }
    let one = fixtures::trivial(fixtures::subtraction_y().signature()).renamed("One");
    write(dir, "one.json", &algebra_to_json(&one));
    args.push("--algebra".into());
    args.push(dir.join("one.json").display().to_string());
    write(
        dir,
        "pair.json",
        &json!({
            "u": {"source": "S", "target": "X", "map": ["0", "a"]},
            "v": {"source": "S", "target": "X", "map": ["0", "b"]},
        }),
    );
    write(
        dir,
        "zero-pair.json",
        &json!({
            "u": {"source": "One", "target": "Y", "map": [0]},
            "v": {"source": "One", "target": "Y", "map": [0]},
        }),
    );
    args
}

fn with<'a>(base: &'a [String], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter()
        .map(String::as_str)
        .chain(extra.iter().copied())
        .collect()
}

#[test]
fn decide_p_exit_codes_and_terms() {
    let dir = TempDir::new().unwrap();
    let terms = dir.path().join("terms.json");
    let (code, report) = run(
        dir.path(),
        &[
            "decide-p",
            "builtin:z2",
            "--emit-terms",
            terms.to_str().unwrap(),
        ],
    );
    assert_eq!(code, 0);
    let report = report.unwrap();
    assert_eq!(report["result"], "holds");
    assert_eq!(report["sizes"]["free_rank2"], 4);
    assert_eq!(report["sizes"]["free_rank1"], 2);
    assert_eq!(report["sizes"]["generic"], 8);
    let emitted: Value = serde_json::from_str(&std::fs::read_to_string(&terms).unwrap()).unwrap();
    assert_eq!(emitted, report["terms"]);
    assert_eq!(emitted["schema"], "global");
    assert_eq!(validate(dir.path(), &report), 0);

    let (code, report) = run(dir.path(), &["decide-p", "builtin:pointed-set2"]);
    assert_eq!(code, 1);
    let report = report.unwrap();
    assert!(report["witness"]["certificates"].as_array().unwrap().len() >= 2);
    assert!(report["witness"]["concrete"].is_object());
    assert_eq!(validate(dir.path(), &report), 0);
}

#[test]
fn algebra_files_work_like_builtins() {
    let dir = TempDir::new().unwrap();
    let file = write(dir.path(), "z2.json", &algebra_to_json(&fixtures::z2()));
    let a = execute(["pcoeq", "decide-p", file.to_str().unwrap()]).unwrap();
    let b = execute(["pcoeq", "decide-p", "builtin:z2"]).unwrap();
    assert_eq!(a.untimed(), b.untimed());
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["pcoeq", "decide-p", "builtin:subtraction-x"],
        vec!["pcoeq", "decide-local-np", "builtin:lattice2"],
        vec![
            "pcoeq",
            "find-term",
            "--kind",
            "majority",
            "builtin:lattice2",
        ],
        vec!["pcoeq", "verify-paper-counterexample"],
    ] {
        let a = execute(args.clone()).unwrap();
        let b = execute(args.clone()).unwrap();
        let (ta, tb) = (a.untimed(), b.untimed());
        assert_eq!(
            serde_json::to_string(&ta).unwrap(),
            serde_json::to_string(&tb).unwrap()
        );
    }
}

#[test]
fn coequalizer_of_equal_maps_is_the_target() {
    let dir = TempDir::new().unwrap();
    let files = subtraction_files(dir.path());
    write(
        dir.path(),
        "same.json",
        &json!({
            "u": {"source": "S", "target": "X", "map": [0, 1]},
            "v": {"source": "S", "target": "X", "map": [0, 1]},
        }),
    );
    let same = dir.path().join("same.json");
    let (code, report) = run(
        dir.path(),
        &with(&files, &["coeq", "--pair", same.to_str().unwrap()]),
    );
    assert_eq!(code, 0);
    let report = report.unwrap();
    assert_eq!(report["sizes"]["quotient"], 3);
    assert_eq!(report["details"]["map"], json!([0, 1, 2]));

    let pair = dir.path().join("pair.json");
    let (code, report) = run(
        dir.path(),
        &with(&files, &["coeq", "--pair", pair.to_str().unwrap()]),
    );
    assert_eq!(code, 0);
    assert_eq!(
        report.unwrap()["details"]["congruence"],
        json!([[0], [1, 2]])
    );
}

#[test]
fn p_instance_failure_in_the_subtraction_variety() {
    let dir = TempDir::new().unwrap();
    let files = subtraction_files(dir.path());
    let pair = dir.path().join("pair.json");
    let zero = dir.path().join("zero-pair.json");
    let (code, report) = run(
        dir.path(),
        &with(
            &files,
            &[
                "check-p-instance",
                "--pair1",
                pair.to_str().unwrap(),
                "--pair2",
                zero.to_str().unwrap(),
            ],
        ),
    );
    assert_eq!(code, 1);
    let report = report.unwrap();
    let w = &report["witness"];
    assert_eq!(w["pair"][0]["labels"], json!(["a", "c"]));
    assert_eq!(w["pair"][1]["labels"], json!(["b", "c"]));
    assert_eq!(w["in_kernel"], true);
    assert_eq!(validate(dir.path(), &report), 0);

    // tampering with the certificate is caught
    let mut bad = report.clone();
    bad["witness"]["certificates"][0]["pair"] = json!([0, 0]);
    assert_eq!(validate(dir.path(), &bad), 1);
}

#[test]
fn normality_and_cokernels_from_files() {
    let dir = TempDir::new().unwrap();
    let files = subtraction_files(dir.path());
    let q = write(
        dir.path(),
        "q.json",
        &json!({"source": "X", "target": "X", "map": [0, 1, 2]}),
    );
    let (code, _) = run(
        dir.path(),
        &with(&files, &["is-normal", "--hom", q.to_str().unwrap()]),
    );
    assert_eq!(code, 0);
    // the zero-kernel {0} generates the discrete congruence, not {a,b}
    let q = write(
        dir.path(),
        "q.json",
        &json!({"source": "X", "target": "Y", "map": ["0", "c", "c"]}),
    );
    let (code, report) = run(
        dir.path(),
        &with(&files, &["is-normal", "--hom", q.to_str().unwrap()]),
    );
    assert_eq!(code, 1);
    let report = report.unwrap();
    assert_eq!(report["witness"]["in_kernel"], true);
    assert_eq!(validate(dir.path(), &report), 0);
    let inc = write(
        dir.path(),
        "inc.json",
        &json!({"source": "S", "target": "X", "map": [0, 1]}),
    );
    let (code, report) = run(
        dir.path(),
        &with(&files, &["cokernel", "--hom", inc.to_str().unwrap()]),
    );
    assert_eq!(code, 0);
    assert_eq!(report.unwrap()["sizes"]["quotient"], 1);

    write(
        dir.path(),
        "ps.json",
        &algebra_to_json(&fixtures::pointed_set2()),
    );
    let sq = pcoeq::constructions::product(
        &std::sync::Arc::new(fixtures::pointed_set2()),
        &std::sync::Arc::new(fixtures::pointed_set2()),
    )
    .unwrap();
    let sq_alg = sq.algebra.as_ref().clone().renamed("PS2sq");
    write(dir.path(), "sq.json", &algebra_to_json(&sq_alg));
    let pi1 = write(
        dir.path(),
        "pi1.json",
        &json!({"source": "sq.json", "target": "ps.json", "map": sq.pi1.map()}),
    );
    let (code, report) = run(dir.path(), &["is-normal", "--hom", pi1.to_str().unwrap()]);
    assert_eq!(code, 1);
    let report = report.unwrap();
    assert_eq!(validate(dir.path(), &report), 0);
}

#[test]
fn points_from_files() {
    let dir = TempDir::new().unwrap();
    let z2 = std::sync::Arc::new(fixtures::z2());
    let sq = pcoeq::constructions::product(&z2, &z2).unwrap();
    write(dir.path(), "z2.json", &algebra_to_json(&z2));
    write(
        dir.path(),
        "sq.json",
        &algebra_to_json(&sq.algebra.as_ref().clone().renamed("Z2sq")),
    );
    let diag: Vec<usize> = (0..2).map(|x| sq.pair(x, x)).collect();
    let point = json!({"total": "sq.json", "base": "z2.json", "p": sq.pi1.map(), "s": diag});
    let p = write(dir.path(), "point.json", &point);
    let (code, report) = run(
        dir.path(),
        &[
            "pt-product",
            "--left",
            p.to_str().unwrap(),
            "--right",
            p.to_str().unwrap(),
        ],
    );
    assert_eq!(code, 0, "{report:?}");
    assert_eq!(report.unwrap()["sizes"]["product"], 8);

    let id = json!({"from": "point.json", "to": "point.json", "map": [0, 1, 2, 3]});
    let zero: Vec<usize> = (0..4).map(|e| diag[sq.pi1.map()[e]]).collect();
    let z = json!({"from": "point.json", "to": "point.json", "map": zero});
    let pair = write(dir.path(), "pm-pair.json", &json!({"u": id, "v": z}));
    let (code, report) = run(dir.path(), &["pt-coeq", "--pair", pair.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(report.unwrap()["sizes"]["quotient"], 2);
    let (code, report) = run(
        dir.path(),
        &[
            "check-local-instance",
            "--pair1",
            pair.to_str().unwrap(),
            "--pair2",
            pair.to_str().unwrap(),
        ],
    );
    assert_eq!(code, 0, "{report:?}");
    let m = write(dir.path(), "m.json", &id);
    let (code, _) = run(
        dir.path(),
        &["pt-is-normal", "--morphism", m.to_str().unwrap()],
    );
    assert_eq!(code, 0);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        &json!({"name": "B", "size": 2, "operations": {"+": {"arity": 2, "table": [0, 1, 1]}}}),
    );
    let out = bin().arg("decide-p").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains('+'));

    let files = subtraction_files(dir.path());
    let h = write(
        dir.path(),
        "h.json",
        &json!({"source": "X", "target": "Y", "map": [0, 1, 7]}),
    );
    let out = bin()
        .args(with(&files, &["is-normal", "--hom", h.to_str().unwrap()]))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("map[2]"));

    for args in [
        vec!["frobnicate"],
        vec!["find-term", "--kind", "pixley", "builtin:z2"],
        vec![],
    ] {
        assert_eq!(bin().args(&args).output().unwrap().status.code(), Some(2));
    }
    let out = bin()
        .args(["find-term", "--kind", "subtraction", "builtin:lattice2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn congruence_and_fixture_verbs() {
    let r = execute([
        "pcoeq",
        "congruence",
        "builtin:subtraction-x",
        "--pair",
        "a,b",
        "--trace",
    ])
    .unwrap();
    assert_eq!(r.result, Verdict::Ok);
    let d = r.details.unwrap();
    assert_eq!(d["blocks"], json!([[0], [1, 2]]));
    assert!(d["trace"]["steps"]
        .as_array()
        .is_some_and(|s| !s.is_empty()));
    let r = execute(["pcoeq", "congruence", "builtin:z2", "--all"]).unwrap();
    assert_eq!(r.sizes["congruences"], 2);
    let r = execute(["pcoeq", "fixture", "--list"]).unwrap();
    assert!(r.details.unwrap()["fixtures"].as_array().unwrap().len() >= 5);
    let r = execute(["pcoeq", "fixture", "z2"]).unwrap();
    assert_eq!(r.details.unwrap(), algebra_to_json(&fixtures::z2()));
}

#[test]
fn find_term_reports_and_certificates() {
    let dir = TempDir::new().unwrap();
    let (code, report) = run(
        dir.path(),
        &["find-term", "--kind", "majority", "builtin:lattice2"],
    );
    assert_eq!(code, 0);
    assert_eq!(validate(dir.path(), &report.unwrap()), 0);
    let (code, report) = run(
        dir.path(),
        &["find-term", "--kind", "malcev", "builtin:lattice2"],
    );
    assert_eq!(code, 1);
    assert_eq!(validate(dir.path(), &report.unwrap()), 0);
}

#[test]
fn counterexample_verdicts_survive_relabelling() {
    let base = execute(["pcoeq", "verify-paper-counterexample"]).unwrap();
    let verdicts = |r: &pcoeq_cli::Report| -> Vec<Value> {
        let d = r.details.as_ref().unwrap();
        let mut v: Vec<Value> = d["assertions"]
            .as_array()
            .unwrap()
            .iter()
            .map(|a| a["holds"].clone())
            .collect();
        v.push(d["supplementary"]["holds"].clone());
        v.push(d["pair"].clone());
        v
    };
    for perm in ["0,1,2", "1,0,2", "2,1,0", "1,2,0", "2,0,1", "0,2,1"] {
        let r = execute(["pcoeq", "verify-paper-counterexample", "--relabel", perm]).unwrap();
        assert_eq!(verdicts(&r), verdicts(&base), "relabelling {perm}");
        assert_eq!(r.result, base.result);
    }
    assert!(execute(["pcoeq", "verify-paper-counterexample", "--relabel", "0,0,1"]).is_err());
}
