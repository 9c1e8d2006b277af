//! One test per acceptance criterion; each prints a PASS/FAIL line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use spatial_logic::corpus::{self, Corpus};
use spatial_logic::selftest::{run_criterion, CriterionReport};
use spatial_logic::{print_structure, Finder, Relation, SearchBudget, Structure};

fn check(number: u8) -> CriterionReport {
    let r = run_criterion(number, &Finder::new(SearchBudget::default(), 1));
    println!("{r}");
    r
}

macro_rules! criterion {
    ($name:ident, $n:expr) => {
        #[test]
        fn $name() {
            let r = check($n);
            assert!(r.passed, "{r}");
        }
    };
}

criterion!(criterion_01_spatial_to_second_order_equivalence, 1);
criterion!(criterion_02_second_order_to_spatial, 2);
criterion!(criterion_03_fixpoint_soundness, 3);
criterion!(criterion_04_forest_split_closure, 4);
criterion!(criterion_05_forest_evaluation_agreement, 5);
criterion!(criterion_06_adjunction, 6);
criterion!(criterion_07_two_variable_reduction, 7);
criterion!(criterion_08_monadic_pipeline_fragment, 8);
criterion!(criterion_09_algebraic_laws, 9);

/// Output of one binary invocation.
type Run = (String, String, Option<i32>);

fn bin(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_spatial-logic"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
        out.status.code(),
    )
}

fn workdir() -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    fs::create_dir_all(&d).unwrap();
    d
}

/// A size-2 structure over the corpus vocabulary with a little of everything.
fn sample_structure(c: &Corpus) -> Structure {
    let v = c.base_vocab();
    let mut e = Structure::new(&v, 2).unwrap();
    for s in &v {
        let tuples: Vec<Vec<usize>> = match s.arity {
            1 if s.name == "P" => vec![vec![0]],
            1 => vec![vec![1]],
            2 => vec![vec![0, 1], vec![1, 1]],
            _ => vec![],
        };
        e.set_relation(&s.name, Relation::from_tuples(2, s.arity, tuples).unwrap())
            .unwrap();
    }
    for (x, val) in [("x", 0), ("y", 1), ("z", 1)] {
        e.set_var(x, val).unwrap();
    }
    e
}

/// Every command on every corpus formula, each run twice.
fn command_lines(dir: &Path) -> Vec<Vec<String>> {
    let mut lines = Vec::new();
    for c in corpus::ALL {
        let structure = dir.join(format!("{}.structure", c.name));
        fs::write(&structure, print_structure(&sample_structure(c))).unwrap();
        let structure = structure.to_string_lossy().into_owned();
        for (i, src) in c.formulas.iter().enumerate() {
            let path = dir.join(format!("{}-{i}.formula", c.name));
            fs::write(&path, c.document(src)).unwrap();
            let f = path.to_string_lossy().into_owned();
            let mut cmds = vec![
                vec!["classify".to_owned(), f.clone()],
                vec!["eval".to_owned(), f.clone(), structure.clone()],
                vec![
                    "solve".to_owned(),
                    f.clone(),
                    "--max-size".into(),
                    "2".into(),
                ],
                vec!["count".to_owned(), f.clone(), "--size".into(), "2".into()],
            ];
            for mode in ["sep2sol", "sol2sep", "lfp2sol", "twovar"] {
                cmds.push(vec![
                    "translate".into(),
                    f.clone(),
                    "--mode".into(),
                    mode.into(),
                ]);
            }
            lines.extend(cmds);
        }
    }
    lines.push(vec!["forests".into(), "--size".into(), "3".into()]);
    lines.push(vec!["selftest".into()]);
    lines
}

#[test]
fn criterion_10_determinism_and_round_trip() {
    let library = check(10);
    let dir = workdir();
    let mut failures = Vec::new();
    let lines = command_lines(&dir);
    for args in &lines {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let (first, second) = (bin(&args), bin(&args));
        if first != second {
            failures.push(format!("{args:?}"));
        }
        if first.2 == Some(2) && first.1.is_empty() {
            failures.push(format!("{args:?}: exit 2 without a diagnostic"));
        }
    }
    for c in [corpus::SPATIAL, corpus::THREE_VARIABLE] {
        let path = dir.join(format!("{}-0.formula", c.name));
        let f = path.to_string_lossy().into_owned();
        let seq = bin(&["solve", &f, "--max-size", "2"]);
        let par = bin(&["--jobs", "4", "solve", &f, "--max-size", "2"]);
        if seq != par {
            failures.push(format!("{f}: parallel solve differs"));
        }
    }
    println!(
        "criterion 10 {}: {} command lines run twice{}",
        if library.passed && failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        },
        lines.len(),
        failures
            .first()
            .map(|f| format!("; first difference {f}"))
            .unwrap_or_default()
    );
    assert!(library.passed, "{library}");
    assert!(failures.is_empty(), "{failures:?}");
}
