use std::path::{Path, PathBuf};
use std::process::Command;

fn corpus(dir: &str) -> Vec<PathBuf> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(dir);
    let mut files: Vec<PathBuf> = std::fs::read_dir(root)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "sdl"))
        .collect();
    files.sort();
    files
}

fn lbk(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lbk")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exit_codes_follow_the_corpus() {
    for (dir, code) in [("valid", 0), ("mutations", 1), ("malformed", 2)] {
        let files = corpus(dir);
        assert!(files.len() >= 6, "{dir}");
        for f in files {
            let (c, out, err) = lbk(&["check", path(&f)]);
            assert_eq!(c, code, "{}\n{out}{err}", f.display());
        }
    }
}

#[test]
fn malformed_files_report_positions() {
    for f in corpus("malformed") {
        let (_, _, err) = lbk(&["check", path(&f)]);
        let name = f.file_name().unwrap().to_str().unwrap();
        let line = err.lines().next().unwrap();
        let rest = &line[line.find(name).unwrap() + name.len()..];
        let mut parts = rest.split(':');
        assert_eq!(parts.next(), Some(""));
        let l: usize = parts.next().unwrap().parse().unwrap();
        let c: usize = parts.next().unwrap().parse().unwrap();
        assert!(l >= 1 && c >= 1, "{line}");
    }
    let f = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/malformed/bad_index.sdl");
    let (_, _, err) = lbk(&["check", path(&f)]);
    assert!(err.contains(":3:20: dimension error"), "{err}");
}

#[test]
fn symplectic_lists_crossed_module_laws() {
    let f = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/valid/symplectic.sdl");
    let (c, out, _) = lbk(&["check", path(&f)]);
    assert_eq!(c, 0);
    for id in ["CM1-peiffer", "CM2-equivariance", "isotropy"] {
        assert!(out.lines().any(|l| l.contains("[pass]") && l.contains(&format!("] {id} "))), "{id}\n{out}");
    }
}

#[test]
fn jacobi_witness_is_printed() {
    let f = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/mutations/mutated_g2.sdl");
    let (c, out, _) = lbk(&["check", path(&f)]);
    assert_eq!(c, 1);
    assert!(out.contains("[FAIL] jacobi") && out.contains("at (1,2,3)"), "{out}");
}

#[test]
fn structured_report_fields() {
    let f = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/mutations/mutated_g2.sdl");
    let (_, out, _) = lbk(&["--report", "structured", "check", path(&f)]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"], "fail");
    let entries = v["reports"][0]["entries"].as_array().unwrap();
    let jac = entries.iter().find(|e| e["id"] == "jacobi").unwrap();
    assert_eq!(jac["status"], "fail");
    assert_eq!(jac["witness"], serde_json::json!([1, 2, 3]));
    assert_eq!(jac["residual"], "(2)*e3");
    for e in entries {
        assert_eq!(e["status"] == "fail", e["residual"] != "0", "{e}");
    }
}

#[test]
fn multiple_files_keep_input_order() {
    let mut files = corpus("valid");
    files.reverse();
    files.push(corpus("mutations")[0].clone());
    let args: Vec<&str> = std::iter::once("check").chain(files.iter().map(|f| path(f))).collect();
    let (c, out, _) = lbk(&args);
    assert_eq!(c, 1);
    let headers: Vec<&str> = out.lines().filter_map(|l| l.strip_prefix("== ")).collect();
    let expected: Vec<&str> = files.iter().map(|f| path(f)).collect();
    assert_eq!(headers, expected);

    // an input error dominates
    let bad = corpus("malformed")[0].clone();
    let (c, _, _) = lbk(&["check", path(&files[0]), path(&bad)]);
    assert_eq!(c, 2);
}

#[test]
fn verify_theorems() {
    let f = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/valid/rmatrix_f4.sdl");
    let (c, out, _) = lbk(&["verify-theorem", path(&f), "--theorem", "matched-pair"]);
    assert_eq!(c, 0, "{out}");
    assert!(out.contains("[info] bicrossed") && out.contains("[pass]") && out.contains("equivalence"));
    assert!(!out.contains("fail, first failure"), "{out}");
    for name in ["adjoint", "symplectic_bicrossed", "manin_symplectic"] {
        let f = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("corpus/valid/{name}.sdl"));
        let (c, out, _) = lbk(&["verify-theorem", path(&f), "--theorem", "round-trip"]);
        assert_eq!(c, 0, "{name}\n{out}");
    }
    // both sides fail on the mutation, so the equivalence holds
    let f = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/mutations/rotation_dual_action.sdl");
    let (c, out, _) = lbk(&["verify-theorem", path(&f), "--theorem", "matched-pair"]);
    assert_eq!(c, 0, "{out}");
}

#[test]
fn construct_writes_checkable_sdl() {
    let dir = tempfile::tempdir().unwrap();
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/valid");
    let cases = [
        ("symplectic.sdl", "semidirect"),
        ("action_pair.sdl", "double"),
        ("poisson.sdl", "courant-double"),
        ("adjoint.sdl", "courant-double"),
        ("adjoint.sdl", "bicrossed-to-triple"),
        ("manin_symplectic.sdl", "triple-to-bicrossed"),
        ("rmatrix_f4.sdl", "from-rmatrix"),
        ("heisenberg_h.sdl", "from-invariant-h"),
    ];
    for (i, (file, op)) in cases.iter().enumerate() {
        let out = dir.path().join(format!("{i}.sdl"));
        let (c, _, err) = lbk(&["construct", path(&root.join(file)), "--op", op, "--out", path(&out)]);
        assert_eq!(c, 0, "{file} {op}: {err}");
        let (c, report, _) = lbk(&["check", path(&out)]);
        assert_eq!(c, 0, "{file} {op}\n{report}");
    }
    // refuses to overwrite without --force
    let out = dir.path().join("0.sdl");
    let before = std::fs::read_to_string(&out).unwrap();
    let (c, _, err) = lbk(&["construct", path(&root.join("g2.sdl")), "--op", "semidirect", "--out", path(&out)]);
    assert_eq!(c, 2, "{err}");
    assert_eq!(std::fs::read_to_string(&out).unwrap(), before);
    let (c, _, _) = lbk(&[
        "construct",
        path(&root.join("adjoint.sdl")),
        "--op",
        "semidirect",
        "--structure",
        "cm",
        "--out",
        path(&out),
        "--force",
    ]);
    assert_eq!(c, 0);
    assert_ne!(std::fs::read_to_string(&out).unwrap(), before);

    // a failing hypothesis is a mathematical failure
    let bad = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/mutations/heisenberg_h_noninvariant.sdl");
    let (c, _, err) = lbk(&["construct", path(&bad), "--op", "from-invariant-h"]);
    assert_eq!(c, 1, "{err}");
    assert!(err.contains("[l,h] = 0"), "{err}");
}

#[test]
fn fmt_is_canonical() {
    for f in corpus("valid").into_iter().chain(corpus("mutations")) {
        let (c, once, _) = lbk(&["fmt", path(&f)]);
        assert_eq!(c, 0);
        let dir = tempfile::tempdir().unwrap();
        let tmp = dir.path().join("x.sdl");
        std::fs::write(&tmp, &once).unwrap();
        let (_, twice, _) = lbk(&["fmt", path(&tmp)]);
        assert_eq!(once, twice, "{}", f.display());
    }
}
