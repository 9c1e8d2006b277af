use std::fs;
use std::path::PathBuf;

use spatial_logic_cli::{run, Output};

fn dir() -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("commands");
    fs::create_dir_all(&d).unwrap();
    d
}

fn file(name: &str, text: &str) -> String {
    let p = dir().join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn cli(args: &[&str]) -> Output {
    run(std::iter::once("spatial-logic").chain(args.iter().copied()))
}

#[test]
fn eval_reflexivity() {
    let f = file("refl.f", "(= x x)");
    let e = file("refl.s", "(structure (size 2) (sig) (assign (x 1)))");
    assert_eq!(
        cli(&["eval", &f, &e]),
        Output {
            stdout: "true\n".into(),
            stderr: String::new(),
            code: 0
        }
    );
}

#[test]
fn eval_false_and_errors() {
    let e = file("p.s", "(structure (size 2) (sig (P 1)) (rel P (0)))");
    let f = file("allp.f", "(forall x (P x))");
    let out = cli(&["eval", &f, &e]);
    assert_eq!((out.stdout.as_str(), out.code), ("false\n", 1));

    let undeclared = file("undeclared.f", "(sig (P 1)) (Q x)");
    let out = cli(&["eval", &undeclared, &e]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains("Q"), "{}", out.stderr);

    let out = cli(&["eval", &f, "/nonexistent/structure"]);
    assert_eq!(out.code, 2);
}

#[test]
fn eval_two_single_edges() {
    let one = "(exists x (exists y (and (E x y) (forall u (forall v (implies (E u v) (and (= u x) (= v y))))))))";
    let f = file("two-edges.f", &format!("(sep {one} {one})"));
    let e = file(
        "cycle.s",
        "(structure (size 2) (sig (E 2)) (rel E (0 1) (1 0)))",
    );
    assert_eq!(cli(&["eval", &f, &e]).stdout, "true\n");
    let budget = cli(&["--budget", "1", "eval", &f, &e]);
    assert_eq!(budget.code, 2);
    assert!(budget.stderr.contains("budget"), "{}", budget.stderr);
}

#[test]
fn translate_modes() {
    let plain = file("plain.f", "(sig (P 1)) (forall x (P x))");
    assert_eq!(
        cli(&["translate", &plain, "--mode", "sep2sol"]).stdout,
        "(forall x (P x))\n"
    );

    let sep = file("sep.f", "(sig (P 1) (Q 1)) (sep (P x) (Q x))");
    let out = cli(&["translate", &sep, "--mode", "sep2sol"]);
    assert_eq!(out.code, 0);
    assert!(
        out.stdout
            .starts_with("(exists2 P' (exists2 Q' (exists2 P'' (exists2 Q''"),
        "{}",
        out.stdout
    );

    let lfp = file(
        "lfp.f",
        "(sig (E 2)) (lfp T (u v) (or (E u v) (exists w (and (E u w) (T w v)))) (x y))",
    );
    assert!(cli(&["translate", &lfp, "--mode", "lfp2sol"])
        .stdout
        .starts_with("(forall2 T"));

    let negative = file("negative.f", "(lfp R (u) (not (R u)) (x))");
    let out = cli(&["translate", &negative, "--mode", "lfp2sol"]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());

    let bad_mode = cli(&["translate", &plain, "--mode", "nosuch"]);
    assert_eq!(bad_mode.code, 2);
}

#[test]
fn two_variable_output_classifies_with_two_names() {
    let f = file(
        "three.f",
        "(sig (E 2)) (exists x (exists y (exists z (and (E x y) (and (E y z) (E z x))))))",
    );
    let out = cli(&["translate", &f, "--mode", "twovar"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let reduced = file("three-reduced.f", &format!("(sig (E 2)) {}", out.stdout));
    let report = cli(&["classify", &reduced]).stdout;
    assert!(report.contains("foVarCount: 2\n"), "{report}");
    assert_eq!(cli(&["solve", &f, "--max-size", "3"]).code, 0);
    assert_eq!(cli(&["solve", &reduced, "--max-size", "3"]).code, 0);
}

#[test]
fn solve_and_count() {
    let never = file("never.f", "(exists x (not (= x x)))");
    assert_eq!(
        cli(&["solve", &never, "--max-size", "3"]),
        Output {
            stdout: "EXHAUSTED\n".into(),
            stderr: String::new(),
            code: 1
        }
    );

    let sig = file("p.sig", "(sig (P 1))");
    let t = file("true.f", "true");
    assert_eq!(
        cli(&["--vocab", &sig, "count", &t, "--size", "2"]).stdout,
        "4\n"
    );
    assert_eq!(cli(&["count", &t, "--size", "2"]).stdout, "1\n");
    let declared = file("true-p.f", "(sig (P 1)) true");
    assert_eq!(cli(&["count", &declared, "--size", "2"]).stdout, "4\n");

    let two = file("two.f", "(sig (P 1)) (exists-ge 2 x (P x))");
    let out = cli(&["solve", &two, "--max-size", "3"]);
    assert_eq!(out.code, 0);
    assert_eq!(
        out.stdout,
        "WITNESS\n(structure (size 2) (sig (P 1)) (rel P (0) (1)))\n"
    );

    let limited = cli(&["--budget", "2", "solve", &never, "--max-size", "3"]);
    assert_eq!((limited.stdout.as_str(), limited.code), ("BUDGET\n", 2));
}

#[test]
fn bound_names_are_not_enumerated() {
    let f = file("bound.f", "(exists2 R (exists x (R x)))");
    assert_eq!(cli(&["count", &f, "--size", "2"]).stdout, "1\n");
}

#[test]
fn classify_block() {
    let f = file(
        "classify.f",
        "(sig (P 1)) (sep-on (P) (exists x (P x)) (exists-ge 2 y (P y)))",
    );
    assert_eq!(
        cli(&["classify", &f]).stdout,
        "foDepth: 1\ncountingDepth: 1\nfoVarCount: 2\nisMonadicSO: true\nspatialOperandMaxFoDepth: 1\nusesOnlyUnarySplit: true\n"
    );
}

#[test]
fn forests_command() {
    assert_eq!(
        cli(&["forests", "--size", "2"]).stdout,
        "forests 3\nclosure OK\n"
    );
    let sig = file("pq2.sig", "(sig (P 2) (Q 2))");
    let out = cli(&["--vocab", &sig, "forests", "--size", "2"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.ends_with("closure OK\n"));
}

#[test]
fn parallel_search_matches_sequential() {
    let f = file(
        "par.f",
        "(sig (P 1) (E 2)) (and (forall x (P x)) (exists x (exists y (and (E x y) (not (= x y))))))",
    );
    let seq = cli(&["solve", &f, "--max-size", "3"]);
    let par = cli(&["--jobs", "4", "solve", &f, "--max-size", "3"]);
    assert_eq!(seq, par);
    assert_eq!(
        cli(&["count", &f, "--size", "2"]),
        cli(&["--jobs", "3", "count", &f, "--size", "2"])
    );
}
