//! The command line: exit codes, output formats, determinism.

mod common;

use std::path::PathBuf;
use std::process::Command;

use alcd::cli::{run, EXIT_CONSISTENT, EXIT_ERROR, EXIT_INCONSISTENT, EXIT_NO_WITNESS};
use alcd::parse_ontology;
use alcd::report::JsonVerdict;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn alcd(args: &[&str], stdin: &str) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("alcd").chain(args.iter().copied());
    let code = run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn corpus_files() -> Vec<(PathBuf, bool)> {
    let mut out = Vec::new();
    for (sub, consistent) in [("consistent", true), ("inconsistent", false)] {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(common::corpus_dir().join(sub))
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        paths.sort();
        out.extend(paths.into_iter().map(|p| (p, consistent)));
    }
    out
}

fn is_trace_line(line: &str) -> bool {
    let parts: Vec<&str> = line.split(' ').collect();
    let number = |s: &str, key: &str| {
        s.strip_prefix(key)
            .is_some_and(|n| !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()))
    };
    if parts.len() != 3 || !number(parts[0], "iter=") || !number(parts[1], "drop=") {
        return false;
    }
    match parts[2].strip_prefix("reason=") {
        Some("local") => true,
        Some(r) => r
            .strip_prefix("patch:")
            .and_then(|p| p.rsplit_once('@'))
            .is_some_and(|(_, slot)| !slot.is_empty() && slot.bytes().all(|b| b.is_ascii_digit())),
        None => false,
    }
}

#[test]
fn check_exit_codes_follow_the_verdict() {
    for (path, consistent) in corpus_files() {
        let p = path.to_str().unwrap();
        let o = alcd(&["check", p], "");
        let expected = if consistent { EXIT_CONSISTENT } else { EXIT_INCONSISTENT };
        assert_eq!(o.code, expected, "{p}: {}", o.stderr);
        let mut lines = o.stdout.lines();
        assert_eq!(lines.next(), Some(if consistent { "consistent" } else { "inconsistent" }));
        let stats = lines.next().unwrap();
        assert!(stats.starts_with("closure=") && !stats.contains("ms="), "{stats}");
        assert_eq!(lines.next(), None);
    }
}

#[test]
fn json_output_follows_the_schema() {
    for (path, consistent) in corpus_files() {
        let o = alcd(&["check", "--json", path.to_str().unwrap()], "");
        let line = o.stdout.trim_end();
        let v: JsonVerdict = serde_json::from_str(line).unwrap();
        assert_eq!(v.consistent, consistent);
        let order = [
            "\"consistent\"", "\"stats\"", "\"closure\"", "\"nt\"", "\"types\"",
            "\"augmented\"", "\"survivors\"", "\"iterations\"", "\"csp_calls\"", "\"ms\"",
        ];
        let positions: Vec<usize> = order.iter().map(|k| line.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "{line}");
    }
}

#[test]
fn traces_are_well_formed_and_reproducible() {
    for (path, _) in corpus_files() {
        let p = path.to_str().unwrap();
        let a = alcd(&["check", "--trace", "--seed", "5", p], "");
        let b = alcd(&["check", "--trace", "--seed", "5", p], "");
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.stderr, b.stderr);
        assert!(a.stderr.lines().all(is_trace_line), "{p}:\n{}", a.stderr);
    }
}

#[test]
fn verdicts_do_not_depend_on_the_seed() {
    for (path, _) in corpus_files() {
        let p = path.to_str().unwrap();
        let first = alcd(&["check", "--seed", "0", p], "").code;
        for seed in ["1", "2", "99"] {
            assert_eq!(alcd(&["check", "--seed", seed, p], "").code, first, "{p}");
        }
    }
}

#[test]
fn witness_prints_a_prefix_or_exits_with_three() {
    for (path, consistent) in corpus_files() {
        let p = path.to_str().unwrap();
        let o = alcd(&["witness", p], "");
        if consistent {
            assert_eq!(o.code, EXIT_CONSISTENT, "{p}: {}", o.stderr);
            assert!(o.stdout.starts_with("consistent\ndepth 2\n"), "{}", o.stdout);
            assert!(o.stdout.contains("\nleaves {"));
            assert_eq!(o.stdout, alcd(&["witness", p], "").stdout);
        } else {
            assert_eq!(o.code, EXIT_NO_WITNESS, "{p}");
            assert_eq!(o.stdout, "inconsistent\n");
        }
    }
}

#[test]
fn reduce_removes_assertions_and_singletons() {
    for (path, _) in corpus_files() {
        let p = path.to_str().unwrap();
        let o = alcd(&["reduce", p], "");
        assert_eq!(o.code, EXIT_CONSISTENT, "{p}: {}", o.stderr);
        let reduced = parse_ontology(&o.stdout).unwrap();
        assert!(!reduced.has_singletons());
        assert!(!reduced.has_feature_assertions());
        assert!(!reduced.has_predicate_assertions());
    }
}

#[test]
fn oracle_reports_small_models() {
    let dir = common::corpus_dir().join("consistent");
    let found = alcd(&["oracle", dir.join("lt_chain.alcd").to_str().unwrap()], "");
    assert_eq!(found.code, EXIT_CONSISTENT);
    assert!(found.stdout.starts_with("model-found\ndomain Q\nelements "));
    let none = alcd(&["oracle", dir.join("descending_chain.alcd").to_str().unwrap()], "");
    assert_eq!(none.code, EXIT_INCONSISTENT);
    assert_eq!(none.stdout, "no-model-within-bound\n");
}

#[test]
fn stdin_is_read_for_dash() {
    let o = alcd(&["check", "--json", "-"], "domain Q; top <= some [r f, r f] lt;");
    assert_eq!(o.code, EXIT_CONSISTENT);
    let v: JsonVerdict = serde_json::from_str(o.stdout.trim_end()).unwrap();
    assert_eq!((v.stats.nt, v.stats.types), (2, 1));
}

#[test]
fn errors_exit_with_two() {
    let missing = alcd(&["check", "/nonexistent/x.alcd"], "");
    assert_eq!(missing.code, EXIT_ERROR);
    assert!(missing.stdout.is_empty());
    assert!(missing.stderr.starts_with("error: /nonexistent/x.alcd"));
    let bad = alcd(&["check", "-"], "domain Q;\ntop <= some [f] wobble;");
    assert_eq!(bad.code, EXIT_ERROR);
    assert!(bad.stderr.contains("line 2, column 17"), "{}", bad.stderr);
    for cmd in ["reduce", "witness", "oracle"] {
        assert_eq!(alcd(&[cmd, "-"], "domain Q; top <=").code, EXIT_ERROR);
    }
    assert_eq!(alcd(&["frobnicate"], "").code, EXIT_ERROR);
    assert_eq!(alcd(&["witness", "--depth", "0", "-"], "domain Q;").code, EXIT_ERROR);
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_alcd");
    let cases = [
        ("ok.alcd", "domain Q; top <= some [r f, r f] lt;", EXIT_CONSISTENT),
        ("clash.alcd", "domain Q; a : A; a : not A;", EXIT_INCONSISTENT),
        ("broken.alcd", "domain Q; a :", EXIT_ERROR),
    ];
    for (file, src, code) in cases {
        let path = dir.path().join(file);
        std::fs::write(&path, src).unwrap();
        let status = Command::new(bin).arg("check").arg(&path).output().unwrap();
        assert_eq!(status.status.code(), Some(code), "{file}");
    }
    let clash = dir.path().join("clash.alcd");
    let w = Command::new(bin).arg("witness").arg(&clash).output().unwrap();
    assert_eq!(w.status.code(), Some(EXIT_NO_WITNESS));
}
