//! Byte-exact output checks for the pinned inputs. Set `SCHEME_FORGE_BLESS=1`
//! to rewrite the golden files after an intentional format change.

use std::path::{Path, PathBuf};
use std::process::Command;

const PINNED: [&str; 4] = ["z3", "paley7", "z4", "wreath_z3_k2"];
const VERBS: [&str; 3] = ["verify", "classify", "crosscheck"];

fn tests_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

fn run(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_scheme-forge"))
        .args(args)
        .current_dir(tests_dir().join("data"))
        .env_remove("SCHEME_FORGE_THREADS")
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap(),
    )
}

#[test]
fn pinned_outputs_match_golden_files() {
    let bless = std::env::var_os("SCHEME_FORGE_BLESS").is_some();
    let mut mismatches = Vec::new();
    for verb in VERBS {
        for name in PINNED {
            for (format, ext) in [("json", "json"), ("text", "txt")] {
                let input = format!("{name}.json");
                let (stdout, stderr, code) = run(&[verb, &input, "--format", format]);
                assert_eq!(code, 0, "{verb} {input}: {stderr}");
                let golden = tests_dir()
                    .join("golden")
                    .join(format!("{verb}_{name}.{ext}"));
                if bless {
                    std::fs::write(&golden, &stdout).unwrap();
                    continue;
                }
                let want = std::fs::read_to_string(&golden)
                    .unwrap_or_else(|e| panic!("{}: {e}", golden.display()));
                if want != stdout {
                    mismatches.push(golden.display().to_string());
                }
            }
        }
    }
    assert!(mismatches.is_empty(), "outputs differ from {mismatches:?}");
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let one = Command::new(env!("CARGO_BIN_EXE_scheme-forge"))
        .args(["classify", "paley7.json", "--format", "json"])
        .current_dir(tests_dir().join("data"))
        .env("SCHEME_FORGE_THREADS", "1")
        .output()
        .unwrap();
    let (many, _, _) = run(&["classify", "paley7.json", "--format", "json"]);
    assert_eq!(String::from_utf8(one.stdout).unwrap(), many);
}

#[test]
fn exit_code_contract() {
    let cases: &[(&[&str], i32)] = &[
        (&["verify", "z4.json"], 0),
        (&["crosscheck", "z4.json"], 0),
        (&["classify", "wreath_z3_k2.json"], 0),
        (&["oracle", "paley7.json"], 0),
        (&["analyze", "z4.json"], 0),
        (&["analyze", "--digraph", "not_wdrd.json"], 0),
        (&["verify", "--digraph", "z4_arcs_13.json"], 0),
        (&["verify", "--digraph", "cycle3.json"], 0),
        (&["catalog", "paley_tournament(7)"], 0),
        (&["enumerate", "--max-n", "6"], 0),
        // property failure
        (&["verify", "--digraph", "not_wdrd.json"], 1),
        // input and usage errors
        (&["verify", "broken.json"], 2),
        (&["verify", "z6_not_schur.json"], 2),
        (&["verify", "missing.json"], 2),
        (&["catalog", "paley_tournament(9)"], 2),
        (&["catalog", "petersen(10)"], 2),
        (&["classify"], 2),
        (&["classify", "z4.json", "--frobnicate"], 2),
        (&["enumerate", "--min-n", "5", "--max-n", "4"], 2),
        (&["enumerate", "--max-n", "21"], 2),
    ];
    for (args, want) in cases {
        let (_, stderr, code) = run(args);
        assert_eq!(code, *want, "{args:?}: {stderr}");
    }
}

#[test]
fn input_errors_carry_json_pointer() {
    let (stdout, stderr, code) = run(&["verify", "broken.json"]);
    assert_eq!(code, 2);
    assert!(stdout.is_empty());
    assert!(stderr.contains("at /relations/1/pairs/3"), "{stderr}");
    assert!(stderr.contains("covered twice"), "{stderr}");
    let (_, stderr, _) = run(&["verify", "z6_not_schur.json"]);
    assert!(stderr.contains("at /circulant/classes"), "{stderr}");
}

#[test]
fn bad_thread_cap_is_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_scheme-forge"))
        .args(["verify", "z3.json"])
        .current_dir(tests_dir().join("data"))
        .env("SCHEME_FORGE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn written_schemes_reread_identically() {
    let dir = tempfile::tempdir().unwrap();
    let emit = dir.path().join("corpus");
    let (_, stderr, code) = run(&[
        "enumerate",
        "--min-n",
        "6",
        "--max-n",
        "8",
        "--emit-dir",
        emit.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stderr}");
    let mut names: Vec<String> = std::fs::read_dir(&emit)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 7 + 4 + 10);
    assert!(names.contains(&"circ-n8-9.json".to_string()));
    for name in &names {
        let path = emit.join(name);
        let s = scheme_forge::io::read_scheme_file(&path).unwrap();
        let again = scheme_forge::io::to_json_string(&scheme_forge::io::scheme_to_value(&s));
        assert_eq!(again, std::fs::read_to_string(&path).unwrap(), "{name}");
    }

    let out = dir.path().join("w.json");
    let (_, stderr, code) = run(&[
        "product",
        "--wreath",
        "z3.json",
        "one_class(2)",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{stderr}");
    let w = scheme_forge::io::read_scheme_file(&out).unwrap();
    assert_eq!(
        w,
        scheme_forge::catalog("wreath(thin_cyclic(3),one_class(2))").unwrap()
    );
    assert!(w.provenance().is_some());

    let (stdout, _, code) = run(&["product", "--lex", "cycle3.json", "cycle3.json"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("\"size\": 9"));
}
