use std::path::Path;
use std::process::{Command, Output};

use toda_pencil::io::{read_pencil, read_result, write_pencil};
use toda_pencil::Rational;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toda-pencil"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn demo_file(dir: &Path, section: &str) -> String {
    let path = dir.join(format!("demo{section}.json"));
    let out = run(&["demo", "--section", section, "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    path.to_str().unwrap().to_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn demo_documents() {
    let out = run(&["demo", "--section", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let spec = read_pencil(&out.stdout).unwrap();
    assert_eq!((spec.n, spec.m), (6, 3));
    assert_eq!(spec.epsilon.to_ints(), vec![1, 1, 1, 0, 0]);
    assert_eq!(write_pencil(&spec), stdout(&out));

    let spec = read_pencil(&run(&["demo", "--section", "2"]).stdout).unwrap();
    assert_eq!((spec.n, spec.m), (5, 1));
    assert_eq!(run(&["demo", "--section", "7"]).status.code(), Some(1));
}

#[test]
fn transform_with_verification() {
    let dir = tempfile::tempdir().unwrap();
    let input = demo_file(dir.path(), "2");
    let out = run(&["transform", "--input", &input, "--mode", "exact", "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"620/63\""));
    let doc = read_result(&out.stdout).unwrap();
    assert_eq!(doc.verified, Some(true));
    assert_eq!(doc.charpoly.unwrap().degree(), Some(5));
    // deterministic bytes
    assert_eq!(run(&["transform", "--input", &input, "--verify"]).stdout, out.stdout);
}

#[test]
fn float_mode_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = demo_file(dir.path(), "3");
    let exact = read_result(&run(&["transform", "-i", &input]).stdout).unwrap();
    let out = run(&["transform", "-i", &input, "--mode", "f64"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let floats: Vec<f64> = v["q_hat"][0]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().parse().unwrap())
        .collect();
    for (x, y) in exact.result.q_hat[0].iter().zip(floats) {
        let want = toda_pencil::Field::to_f64(x);
        assert!(((y - want) / want).abs() <= 1e-13);
    }
    assert_eq!(run(&["transform", "-i", &input, "--mode", "f64", "--verify"]).status.code(), Some(1));
    assert_eq!(run(&["transform", "-i", "/no/such/file.json"]).status.code(), Some(1));
    assert_eq!(run(&["transform"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn schema_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"format":"gevp-pencil/1","N":2,"M":2,"q":[["1","2"]],"e":["1"]}"#).unwrap();
    let out = run(&["transform", "-i", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("length mismatch"));
}

#[test]
fn breakdown_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.json");
    std::fs::write(
        &path,
        r#"{"format":"gevp-pencil/1","N":2,"M":1,"epsilon":[0],"q":["0","1"],"e":["0"]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let out = run(&["transform", "-i", p]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("breakdown at k=0, n=0"));
    let out = run(&["trajectory", "-i", p]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout(&out), "k,n,q,e,f,d\n");
}

#[test]
fn roots_of_pencils_and_results_agree() {
    let dir = tempfile::tempdir().unwrap();
    let input = demo_file(dir.path(), "3");
    let pencil_roots = stdout(&run(&["roots", "-i", &input]));
    let lines: Vec<f64> = pencil_roots.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(lines.len(), 6);
    assert!((lines[5] - 28.1051142).abs() < 1e-7);

    let result = dir.path().join("result.json");
    let out = run(&["transform", "-i", &input, "-o", result.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&run(&["roots", "-i", result.to_str().unwrap()])), pencil_roots);
}

#[test]
fn roots_report_repeated_content() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("id.json");
    // all-zero mask with q = 1 and e = 0 gives A = B = I
    std::fs::write(
        &path,
        r#"{"format":"gevp-pencil/1","N":3,"M":1,"epsilon":[0,0],"q":["1","1","1"],"e":["0","0"]}"#,
    )
    .unwrap();
    let out = run(&["roots", "-i", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("1 (multiplicity 3)"), "{text}");
    assert!(text.contains("non-simple: 3 of 3"));
}

#[test]
fn trajectory_csv() {
    let dir = tempfile::tempdir().unwrap();
    let two = demo_file(dir.path(), "2");
    let text = stdout(&run(&["trajectory", "-i", &two]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,n,q,e,f,d"));
    assert!(lines.next().unwrap().starts_with("0,0,1,6,7,"));

    let four = demo_file(dir.path(), "4");
    let text = stdout(&run(&["trajectory", "-i", &four]));
    let last_k: usize = text.lines().last().unwrap().split(',').next().unwrap().parse().unwrap();
    assert_eq!(last_k, 11);

    let one = dir.path().join("one.json");
    std::fs::write(&one, r#"{"format":"gevp-pencil/1","N":1,"M":1,"q":["5/3"],"e":[]}"#).unwrap();
    let text = stdout(&run(&["trajectory", "-i", one.to_str().unwrap()]));
    assert_eq!(text, "k,n,q,e,f,d\n0,0,5/3,,5/3,\n");
}

#[test]
fn verify_command() {
    let dir = tempfile::tempdir().unwrap();
    for section in ["2", "3", "4"] {
        let input = demo_file(dir.path(), section);
        let out = run(&["verify", "-i", &input]);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        assert!(stdout(&out).ends_with("verified: true\n"));
    }
    // a tampered result fails with exit 3
    let input = demo_file(dir.path(), "2");
    let result = dir.path().join("r.json");
    run(&["transform", "-i", &input, "-o", result.to_str().unwrap()]);
    let mut doc = read_result(&std::fs::read(&result).unwrap()).unwrap();
    doc.result.q_hat[0][1] = Rational::from(10);
    let text = toda_pencil::io::write_result(&doc.result, &Default::default());
    std::fs::write(&result, text).unwrap();
    let out = run(&["verify", "-i", &input, "--result", result.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).ends_with("verified: false\n"));
}
