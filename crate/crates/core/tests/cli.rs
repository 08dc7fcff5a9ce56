use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};

use scpbound::cli::run;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("scpbound").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn bound_first_moment_on_all_ones() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "ones.scp", "3 3\n111\n111\n111\n");
    let (code, out, _) = invoke(&["bound", "--method", "first-moment", "-i", &f]);
    assert_eq!(code, 0);
    assert!(out.starts_with("first-moment: k=1 "), "{out}");
}

#[test]
fn solve_exact_chain() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "chain.scp", "3 4\n1100\n0110\n0011\n");
    let (code, out, _) = invoke(&["solve", "--exact", "-i", &f]);
    assert_eq!(code, 0);
    assert!(out.contains("columns 2 3\n"), "{out}");
    assert!(out.contains("size 2\n"));
    assert!(out.contains("status proved\n"));
}

#[test]
fn zero_row_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "zero.scp", "3 3\n101\n000\n011\n");
    for cmd in ["bound", "refine", "solve"] {
        let (code, _, err) = invoke(&[cmd, "-i", &f]);
        assert_eq!(code, 1, "{cmd}");
        assert!(err.contains("row 2 has no covering column"), "{err}");
        assert_eq!(err.lines().count(), 1);
    }
}

#[test]
fn parse_errors_and_bad_flags() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.scp", "2 3\n101\n1x1\n");
    let (code, _, err) = invoke(&["bound", "-i", &f]);
    assert_eq!(code, 3);
    assert!(err.contains("line 3"), "{err}");
    assert_eq!(invoke(&["bound", "-i", "/nonexistent/file.scp"]).0, 3);
    assert_eq!(invoke(&["bound", "--frobnicate"]).0, 4);
    assert_eq!(invoke(&[]).0, 4);
    assert_eq!(invoke(&["solve", "--exact", "--greedy", "-i", &f]).0, 4);
    assert_eq!(invoke(&["gen", "--model", "karp", "--m", "3"]).0, 4);
    assert_eq!(invoke(&["decompose", "-i", &f]).0, 4);
    assert_eq!(invoke(&["--help"]).0, 0);
}

#[test]
fn no_bound_within_n_exits_two() {
    // 4x4 identity: 4 (3/4)^k >= 1 for every k <= 4, while the exact
    // hypergeometric term vanishes at k = n
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "id.scp", "4 4\n1000\n0100\n0010\n0001\n");
    let (code, out, _) = invoke(&["bound", "--method", "first-moment", "-i", &f]);
    assert_eq!(code, 2);
    assert!(out.contains("k=none"));
    assert_eq!(invoke(&["bound", "--method", "hypergeometric", "-i", &f]).0, 0);
}

#[test]
fn text_and_json_report_the_same_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text, _) = invoke(&["gen", "--model", "constant-density", "--m", "12", "--n", "15", "--delta", "0.4", "--seed", "3"]);
    assert_eq!(code, 0);
    let f = write(dir.path(), "g.scp", &text);
    let (c1, txt, _) = invoke(&["bound", "-i", &f, "--split", "6,7"]);
    let (c2, js, _) = invoke(&["bound", "-i", &f, "--split", "6,7", "--format", "json"]);
    assert_eq!((c1, c2), (0, 0));
    let v: serde_json::Value = serde_json::from_str(&js).unwrap();
    assert_eq!(v["schema"], "scpbound/1");
    let rows = v["bounds"].as_array().unwrap();
    let lines: Vec<&str> = txt.lines().collect();
    assert_eq!(rows.len(), lines.len());
    for (row, line) in rows.iter().zip(&lines) {
        let fields: std::collections::HashMap<&str, &str> =
            line.split_once(": ").unwrap().1.split(' ').map(|kv| kv.split_once('=').unwrap()).collect();
        assert!(line.starts_with(row["method"].as_str().unwrap()));
        let k = row["k"].as_u64().map(|k| k.to_string()).unwrap_or("none".into());
        assert_eq!(fields["k"], k);
        for key in ["witness", "witness_prev"] {
            match row[key].as_f64() {
                Some(x) => assert_eq!(fields[key].parse::<f64>().unwrap(), x),
                None => assert_eq!(fields[key], "none"),
            }
        }
    }
}

#[test]
fn gen_then_bound_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for run_id in 0..2 {
        let g = dir.path().join(format!("g{run_id}.scp"));
        let gs = g.to_str().unwrap();
        let args = ["gen", "--model", "karp", "--m", "20", "--n", "30", "--delta", "0.2", "--seed", "11", "-o", gs];
        assert_eq!(invoke(&args).0, 0);
        let (code, out, _) = invoke(&["bound", "-i", gs, "--format", "csv"]);
        assert_eq!(code, 0);
        outputs.push((std::fs::read(&g).unwrap(), out));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn gen_from_spec_file_and_sparse_format() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "spec.json",
        r#"{"model":"planted","m":6,"n":8,"blocks":{"d1":1.0,"d2":0.0,"d3":0.0,"d4":1.0,"mu":0.0,"nu":0.0},"seed":1}"#,
    );
    let (code, out, _) = invoke(&["gen", "--spec", &spec, "--matrix-format", "sparse"]);
    assert_eq!(code, 0);
    assert_eq!(out, "# planted split r=3 c=4\n6 8\n1: 1 2 3 4\n2: 1 2 3 4\n3: 1 2 3 4\n4: 5 6 7 8\n5: 5 6 7 8\n6: 5 6 7 8\n");
    // unit block densities are outside the formulas' domain
    let f = write(dir.path(), "p.scp", &out);
    let (code, out, _) = invoke(&["decompose", "-i", &f, "--split", "3,4"]);
    assert_eq!(code, 2);
    assert!(out.contains("sound: not applicable"), "{out}");

    let f = write(
        dir.path(),
        "q.scp",
        "6 8\n11100000\n01110000\n10110000\n00001110\n00000111\n00001011\n",
    );
    let (code, out, _) = invoke(&["decompose", "-i", &f, "--split", "3,4"]);
    assert_eq!(code, 0);
    assert!(out.contains("valid=true"), "{out}");
    assert!(out.contains("independent: k=2 k1=1 k2=1"), "{out}");
    let (code, out, _) = invoke(&["decompose", "-i", &f, "--search", "--effort", "2000", "--seed", "4", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["decomposition"]["counts"][1]["max"], 0);
    assert_eq!(v["search"]["row_order"].as_array().unwrap().len(), 6);
}

#[test]
fn refine_reports_root_and_quoted_constant() {
    let (code, out, _) = invoke(&["refine", "--root-only"]);
    assert_eq!(code, 0);
    let root: f64 = out.split_whitespace().next().unwrap().strip_prefix("root=").unwrap().parse().unwrap();
    assert!((root - 1.59607164).abs() < 1e-8);
    assert!(out.contains("quoted=1.56"));
}

#[test]
fn experiment_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let json = dir.path().join("r.json");
    let (code, out, err) = invoke(&[
        "experiment",
        "--model",
        "karp",
        "--sizes",
        "6x8,8x10",
        "--delta",
        "0.4",
        "--seeds",
        "3",
        "--decomposed",
        "--csv",
        csv.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), out);
    assert_eq!(out.lines().count(), 7);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 6);
    assert!(v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn binary_reads_standard_input() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_scpbound"))
        .args(["solve", "--greedy", "-i", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"3 4\n1001\n0011\n1101\n").unwrap();
    let output = child.wait_with_output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    assert!(String::from_utf8(output.stdout).unwrap().starts_with("columns 4\nsize 1\n"));

    let output = Command::new(env!("CARGO_BIN_EXE_scpbound"))
        .args(["bound", "-i", "-"])
        .stdin(Stdio::null())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
}
