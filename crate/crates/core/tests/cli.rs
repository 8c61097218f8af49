use std::io::Write;
use std::process::Command;

use hk_core::cli::{run, EXIT_LIMIT, EXIT_OK, EXIT_USAGE};

fn hk(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("hk").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn decide_empty_set_axiom() {
    let (code, out, _) = hk(&["decide", "--k", "1", "exists y. forall t. !(t in y)"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "true\n");
}

#[test]
fn false_sentences_also_exit_zero() {
    for algo in ["block", "rank"] {
        let (code, out, _) = hk(&["decide", "--k", "2", "--algo", algo, "exists x. x in x"]);
        assert_eq!((code, out.as_str()), (EXIT_OK, "false\n"));
    }
    let (code, out, _) = hk(&[
        "decide",
        "--k",
        "0",
        "--algo",
        "k0",
        "exists x, y. !(x = y)",
    ]);
    assert_eq!((code, out.as_str()), (EXIT_OK, "false\n"));
}

#[test]
fn enumerate_count() {
    let (code, out, _) = hk(&[
        "enumerate",
        "--k",
        "1",
        "--m",
        "1",
        "--l",
        "1",
        "--count-only",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "2\n");
    let (_, out, _) = hk(&[
        "enumerate",
        "--k",
        "2",
        "--m",
        "0",
        "--l",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(out.lines().count(), 4);
}

#[test]
fn bounds_table() {
    let (code, out, _) = hk(&["bounds", "--k", "2", "--n", "2"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "t_rank=68");
    assert_eq!(lines[1], "t_2(2) <= 2^{c_k}_1 with c_k=7: true");
    let (_, out, _) = hk(&["bounds", "--k", "1", "--n", "3", "--format", "json"]);
    assert_eq!(out, "{\"k\":1,\"n\":3,\"t_rank\":\"21\"}\n");
}

#[test]
fn json_output_is_byte_stable() {
    let args = [
        "decide",
        "--k",
        "1",
        "--format",
        "json",
        "forall x. exists y. x in y",
    ];
    let (_, a, _) = hk(&args);
    let (_, b, _) = hk(&args);
    assert_eq!(a, b);
    assert!(a.starts_with("{\"value\":true,\"algorithm\":\"block\",\"m\":\"9\","));
    assert!(a.contains("\"elapsed_ms\":0"));
    let mut jobs = args.to_vec();
    jobs.extend(["--jobs", "2"]);
    assert_eq!(hk(&jobs).1, a);
}

#[test]
fn usage_and_parse_errors_exit_2() {
    assert_eq!(hk(&["decide", "--k", "1", "exists x. x in"]).0, EXIT_USAGE);
    assert_eq!(hk(&["decide", "exists x. x in x"]).0, EXIT_USAGE);
    assert_eq!(hk(&["decide", "--k", "1", "x in x"]).0, EXIT_USAGE);
    assert_eq!(hk(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(
        hk(&["eval", "--k", "1", "--assign", "x={{},{{}}}", "x = x"]).0,
        EXIT_USAGE
    );
    assert_eq!(
        hk(&["decide", "--k", "1", "--file", "/nonexistent", "x = x"]).0,
        EXIT_USAGE
    );
}

#[test]
fn caps_exit_3() {
    let (code, _, err) = hk(&[
        "decide",
        "--k",
        "2",
        "--max-nodes",
        "7",
        "forall x. exists y. x in y",
    ]);
    assert_eq!(code, EXIT_LIMIT, "{err}");
    let (code, _, _) = hk(&[
        "enumerate",
        "--k",
        "2",
        "--m",
        "2",
        "--l",
        "1",
        "--max-classes",
        "10",
    ]);
    assert_eq!(code, EXIT_LIMIT);
}

#[test]
fn unsound_level_is_flagged() {
    let (code, out, err) = hk(&[
        "decide",
        "--k",
        "1",
        "--unsound-m",
        "1",
        "--format",
        "json",
        "forall x. exists y. x in y",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("\"sound\":false"));
    assert!(err.contains("warning"));
}

#[test]
fn eval_bounded_and_unbounded() {
    let (_, out, _) = hk(&[
        "eval",
        "--k",
        "2",
        "--assign",
        "x={{},{{}}};y={}",
        "exists z in x. z = y",
    ]);
    assert_eq!(out, "true\n");
    let (_, out, _) = hk(&[
        "eval",
        "--k",
        "1",
        "--assign",
        "x={{}}",
        "exists y. (x in y & exists z in y. z = x)",
    ]);
    assert_eq!(out, "true\n");
    let (_, out, _) = hk(&["eval", "--k", "1", "--assign", "x={}", "exists y. y in x"]);
    assert_eq!(out, "false\n");
}

#[test]
fn qe_output_is_bounded() {
    let (code, out, _) = hk(&["qe", "--k", "1", "exists y. x in y"]);
    assert_eq!(code, EXIT_OK);
    let f = hk_core::formula::parse(out.trim()).unwrap();
    assert!(f.is_bounded());
}

#[test]
fn files_for_formulas_and_structures() {
    let mut formula = tempfile::NamedTempFile::new().unwrap();
    write!(formula, "forall x. !(x in x)").unwrap();
    let (_, out, _) = hk(&[
        "decide",
        "--k",
        "1",
        "--file",
        formula.path().to_str().unwrap(),
    ]);
    assert_eq!(out, "true\n");

    let mut structure = tempfile::NamedTempFile::new().unwrap();
    write!(
        structure,
        r#"{{"nodes":["a","b"],"edges":[["a","b"]],"tuple":["a"]}}"#
    )
    .unwrap();
    let path = structure.path().to_str().unwrap();
    assert_eq!(
        hk(&["check-structure", "--k", "1", "--m", "1", "--file", path]).1,
        "true\n"
    );
    assert_eq!(
        hk(&["check-structure", "--k", "0", "--m", "1", "--file", path]).1,
        "false\n"
    );

    let mut cyclic = tempfile::NamedTempFile::new().unwrap();
    write!(
        cyclic,
        r#"{{"nodes":["a"],"edges":[["a","a"]],"tuple":["a"]}}"#
    )
    .unwrap();
    let path = cyclic.path().to_str().unwrap();
    assert_eq!(
        hk(&["check-structure", "--k", "1", "--m", "1", "--file", path]).1,
        "false\n"
    );
}

#[test]
fn selftest_single_criterion() {
    let (code, out, _) = hk(&["selftest", "--criterion", "1"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("criterion 1 PASS"));
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_hk");
    let ok = Command::new(bin)
        .args(["decide", "--k", "1", "exists y. forall t. !(t in y)"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "true\n");
    let bad = Command::new(bin)
        .args(["decide", "--k", "1", "((("])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
