use std::process::Command;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hahn-aut")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn apply_exp_derivation() {
    let (code, out) = run(&[
        "apply",
        "--group=Q",
        "--precision=5",
        "exp_derivation{phi: linear(1), shift: 1, precision: 5}",
        "t^(1)",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "RESULT: t^(1) + t^(2) + t^(3) + t^(4) (mod t^(5))\n");
}

#[test]
fn classify_reports_each_predicate() {
    let (code, out) = run(&["classify", "--group=Q", "--seed=7", "--sample-count=50", "internal_mult{eps: t^(1)}"]);
    assert_eq!(code, 1);
    let keys: Vec<&str> = out.lines().filter_map(|l| l.split_once(": ").map(|(k, _)| k)).collect();
    for key in ["CLASS", "SAMPLES", "additive", "multiplicative", "one_aut", "WITNESS multiplicative"] {
        assert!(keys.contains(&key), "missing {key} in\n{out}");
    }
    assert!(out.contains("one_aut: n/a"), "{out}");
}

#[test]
fn field_automorphism_classifies_clean() {
    let (code, out) = run(&["classify", "--seed=3", "compose(character{1: 2}, external_field{tau: scalar(2)})"]);
    assert_eq!(code, 1, "internal must fail for a non-identity exponent map:\n{out}");
    assert!(out.contains("multiplicative: pass"), "{out}");
    assert!(out.contains("WITNESS internal: s = "), "{out}");
}

#[test]
fn spec_from_file() {
    let dir = std::env::temp_dir().join(format!("hahn-aut-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("aut.spec");
    std::fs::write(&path, "compose(character{1: 2}, external_field{tau: scalar(2)})\n").unwrap();
    let (code, out) = run(&["apply", path.to_str().unwrap(), "t^(1) + t^(-1)"]);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!((code, out.as_str()), (0, "RESULT: 1/4*t^(-2) + 4*t^(2)\n"));
}

#[test]
fn lex_group_factorization() {
    let (code, out) = run(&[
        "factorize",
        "--group=Lex(2)",
        "--mode=field",
        "--samples=(1,0);(0,1);(1,1)",
        "external_field{tau: matrix((1, 0), (1, 2))}",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("EXPONENT: (1,0) -> (1,1)"), "{out}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["classify"]).0, 2);
    assert_eq!(run(&["eval", "--group=Lex(0)", "1"]).0, 2);
    let (code, out) = run(&["eval", "--group=Lex(2)", "t^(1/2)"]);
    assert_eq!(code, 2);
    assert!(out.starts_with("ERROR: ExponentParseError"), "{out}");
    let (code, out) = run(&["exp-deriv", "phi_shift{phi: linear(1), shift: 1}", "t^(1)"]);
    assert_eq!(code, 2);
    assert!(out.starts_with("ERROR: InsufficientPrecision"), "{out}");
}
