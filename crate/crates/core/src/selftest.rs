//! Executable checks of the library's correctness claims, run against the
//! formula collections in [`crate::corpus`].
//!
//! Every check compares two independently computed answers by exhaustive
//! enumeration and returns a [`CriterionReport`]; none can pass on a
//! truncated search, since budget exhaustion fails the check.

use std::fmt;
use std::time::Instant;

use crate::analysis::{classify, in_fragment, Fragment};
use crate::corpus;
use crate::eval::Prepared;
use crate::forests::{check_split_closure, eval_over_forests};
use crate::formula::Formula;
use crate::modelfinder::{Finder, SearchError, SearchStatus, StructureSpace};
use crate::structure::print_structure;
use crate::syntax::{parse_formula, print_formula};
use crate::translate::{
    lfp_to_sol, reduce_to_two_vars, saturate_bound, sol_to_spatial, spatial_to_sol,
};
use crate::vocab::Vocabulary;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionReport {
    pub number: u8,
    pub title: &'static str,
    pub passed: bool,
    /// Individual comparisons performed.
    pub cases: u64,
    /// The first failure, or a summary.
    pub detail: String,
    pub millis: u128,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {}: {} ({} cases; {})",
            self.number,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.cases,
            self.detail
        )
    }
}

/// What a check found: comparisons made and the first failure, if any.
struct Outcome {
    cases: u64,
    failure: Option<String>,
    summary: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            cases: 0,
            failure: None,
            summary: String::new(),
        }
    }

    fn fail(&mut self, msg: String) {
        self.failure.get_or_insert(msg);
    }
}

pub const TITLES: [&str; 10] = [
    "spatial connectives translate to equivalent second-order formulas",
    "second-order quantifiers translate to spatial conjunction",
    "least fixpoints translate to second-order formulas",
    "splits of forests are forests",
    "direct and translated evaluation agree on forests",
    "spatial conjunction and implication are adjoint",
    "three-variable formulas reduce to two variables",
    "monadic translations land in the depth-one fragment",
    "algebraic laws of spatial conjunction",
    "printing and parsing round-trip deterministically",
];

/// Runs criterion `number` (1 to 10).
pub fn run_criterion(number: u8, finder: &Finder) -> CriterionReport {
    let start = Instant::now();
    let result = match number {
        1 => spatial_equivalence(finder),
        2 => second_order_saturation(finder),
        3 => fixpoint_soundness(finder),
        4 => forest_closure(),
        5 => forest_agreement(finder),
        6 => adjunction(finder),
        7 => two_variable_reduction(finder),
        8 => monadic_pipeline(),
        9 => algebraic_laws(finder),
        10 => round_trip(),
        _ => panic!("no criterion {number}"),
    };
    let (passed, cases, detail) = match result {
        Ok(o) => match o.failure {
            None => (true, o.cases, o.summary),
            Some(msg) => (false, o.cases, msg),
        },
        Err(e) => (false, 0, format!("error: {e}")),
    };
    CriterionReport {
        number,
        title: TITLES[number as usize - 1],
        passed,
        cases,
        detail,
        millis: start.elapsed().as_millis(),
    }
}

pub fn run_all(finder: &Finder) -> Vec<CriterionReport> {
    (1..=10).map(|n| run_criterion(n, finder)).collect()
}

fn space_len(vocab: &Vocabulary, n_max: usize, free: usize) -> Result<u64, SearchError> {
    let names: Vec<String> = (0..free).map(|i| format!("v{i}")).collect();
    (1..=n_max)
        .map(|n| Ok(StructureSpace::new(vocab, n, &names)?.len()))
        .sum()
}

/// Records an exhaustive comparison of `f` and `g`.
fn compare(
    out: &mut Outcome,
    finder: &Finder,
    label: &str,
    f: &Formula,
    g: &Formula,
    vocab: &Vocabulary,
    n_max: usize,
) -> Result<(), SearchError> {
    let free = f.free_fo_vars().union(&g.free_fo_vars()).count();
    if let Some(e) = finder.equiv(f, g, vocab, n_max)? {
        out.fail(format!("{label} differs on {}", print_structure(&e)));
    }
    out.cases += space_len(vocab, n_max, free)?;
    Ok(())
}

fn spatial_equivalence(finder: &Finder) -> Result<Outcome, SearchError> {
    let mut out = Outcome::new();
    let full = corpus::SPATIAL.base_vocab();
    for (src, f) in corpus::SPATIAL.parsed() {
        let t = spatial_to_sol(&f, &full)?.formula;
        let (vocab, n_max) = if f.free_so_vars().contains("E") {
            (full.clone(), 2)
        } else {
            (full.restrict(|p| p != "E"), 3)
        };
        compare(&mut out, finder, src, &f, &t, &vocab, n_max)?;
    }
    out.summary = format!("{} formulas, 0 mismatches", corpus::SPATIAL.formulas.len());
    Ok(out)
}

fn second_order_saturation(finder: &Finder) -> Result<Outcome, SearchError> {
    let mut out = Outcome::new();
    let base = corpus::SECOND_ORDER.base_vocab();
    let budget = finder.budget.eval;
    for (src, f) in corpus::SECOND_ORDER.parsed() {
        let t = sol_to_spatial(&f, &base)?;
        let direct = Prepared::new(&f, &base)?;
        let translated = Prepared::new(&t.formula, &t.vocab)?;
        let free: Vec<String> = f.free_fo_vars().into_iter().collect();
        for n in 1..=2 {
            let space = StructureSpace::new(&base, n, &free)?;
            for e in space.iter() {
                out.cases += 1;
                let saturated = saturate_bound(&f, &e, &t.vocab)?;
                if direct.eval(&e, budget)? != translated.eval(&saturated, budget)? {
                    out.fail(format!("{src} differs on {}", print_structure(&e)));
                }
            }
        }
        let a = finder.sat(&f, &base, 2)?.status;
        let b = finder.sat(&t.formula, &t.vocab, 2)?.status;
        out.cases += 1;
        if a == SearchStatus::Budget || b == SearchStatus::Budget {
            out.fail(format!("{src}: search budget exhausted"));
        } else if a != b {
            out.fail(format!("{src}: satisfiability {a} but translation {b}"));
        }
    }
    out.summary = format!(
        "{} formulas, 0 mismatches",
        corpus::SECOND_ORDER.formulas.len()
    );
    Ok(out)
}

fn max_fixpoint_arity(f: &Formula) -> usize {
    let mut k = 0;
    f.visit(&mut |g| {
        if let Formula::Lfp { params, .. } | Formula::LetRec { params, .. } = g {
            k = k.max(params.len());
        }
    });
    k
}

fn fixpoint_soundness(finder: &Finder) -> Result<Outcome, SearchError> {
    let mut out = Outcome::new();
    let base = corpus::FIXPOINT.base_vocab();
    for (src, f) in corpus::FIXPOINT.parsed() {
        let t = lfp_to_sol(&f, &base)?.formula;
        let n_max = if max_fixpoint_arity(&f) <= 1 { 3 } else { 2 };
        compare(&mut out, finder, src, &f, &t, &base, n_max)?;
    }
    out.summary = format!("{} formulas, 0 mismatches", corpus::FIXPOINT.formulas.len());
    Ok(out)
}

fn forest_closure() -> Result<Outcome, SearchError> {
    let mut out = Outcome::new();
    let mut parts = Vec::new();
    for (sig, n) in [(&[("P", 2), ("Q", 2)][..], 3), (&[("E", 2)][..], 4)] {
        let vocab = Vocabulary::of(sig).expect("forest vocabulary");
        let r = check_split_closure(&vocab, n)?;
        out.cases += r.splits;
        parts.push(format!("{} forests up to size {n}", r.forests));
        if let Some(v) = r.counterexample {
            out.fail(format!(
                "split of {} into {} and {}",
                print_structure(&v.forest),
                print_structure(&v.split.left),
                print_structure(&v.split.right)
            ));
        }
    }
    out.summary = parts.join(", ");
    Ok(out)
}

fn forest_agreement(finder: &Finder) -> Result<Outcome, SearchError> {
    let mut out = Outcome::new();
    let base = corpus::FOREST.base_vocab();
    for (src, f) in corpus::FOREST.parsed() {
        for n in 1..=3 {
            let cmp = eval_over_forests(&f, &base, n, finder.budget.eval)?;
            out.cases += cmp.forests as u64;
            if !cmp.agree() {
                out.fail(format!(
                    "{src} at size {n}: {} direct models, {} translated",
                    cmp.direct.len(),
                    cmp.translated.len()
                ));
            }
        }
    }
    out.summary = format!(
        "{} formulas, identical model sets",
        corpus::FOREST.formulas.len()
    );
    Ok(out)
}

/// Whether `f` holds on every structure of size `1..=n_max`.
fn valid(
    finder: &Finder,
    f: &Formula,
    vocab: &Vocabulary,
    n_max: usize,
) -> Result<bool, SearchError> {
    let r = finder.sat(&Formula::not(f.clone()), vocab, n_max)?;
    match r.status {
        SearchStatus::Witness => Ok(false),
        SearchStatus::Exhausted => Ok(true),
        SearchStatus::Budget => Err(SearchError::Budget(r.structures_checked)),
    }
}

fn adjunction(finder: &Finder) -> Result<Outcome, SearchError> {
    let mut out = Outcome::new();
    let vocab = Vocabulary::of(corpus::ADJUNCTION_VOCAB).expect("adjunction vocabulary");
    let mut holding = 0;
    for (a, b, c) in corpus::ADJUNCTION {
        let [f1, f2, f3] = [a, b, c].map(|s| parse_formula(s, &vocab).expect("adjunction corpus"));
        let lhs = Formula::implies(Formula::sep(f1.clone(), f2.clone()), f3.clone());
        let rhs = Formula::implies(f1, Formula::wand(f2, f3));
        let (l, r) = (
            valid(finder, &lhs, &vocab, 2)?,
            valid(finder, &rhs, &vocab, 2)?,
        );
        out.cases += 1;
        holding += usize::from(l);
        if l != r {
            out.fail(format!(
                "({a}, {b}, {c}): sep side valid {l}, wand side valid {r}"
            ));
        }
    }
    out.summary = format!(
        "{} triples, {holding} valid on both sides",
        corpus::ADJUNCTION.len()
    );
    Ok(out)
}

fn two_variable_reduction(finder: &Finder) -> Result<Outcome, SearchError> {
    let mut out = Outcome::new();
    let base = corpus::THREE_VARIABLE.base_vocab();
    for (src, f) in corpus::THREE_VARIABLE.parsed() {
        let t = reduce_to_two_vars(&f, &base)?;
        let vars = classify(&t.formula, &t.vocab).fo_var_count;
        if vars > 2 {
            out.fail(format!("{src}: reduction uses {vars} variables"));
        }
        let a = finder.sat(&f, &base, 3)?.status;
        let b = finder.sat(&t.formula, &base, 3)?.status;
        out.cases += 1;
        if a == SearchStatus::Budget || b == SearchStatus::Budget {
            out.fail(format!("{src}: search budget exhausted"));
        } else if a != b {
            out.fail(format!("{src}: satisfiability {a} but reduction {b}"));
        }
    }
    out.summary = format!(
        "{} formulas, 0 mismatches",
        corpus::THREE_VARIABLE.formulas.len()
    );
    Ok(out)
}

fn monadic_pipeline() -> Result<Outcome, SearchError> {
    let mut out = Outcome::new();
    let base = corpus::MONADIC.base_vocab();
    for (src, f) in corpus::MONADIC.parsed() {
        out.cases += 1;
        if !in_fragment(&f, &base, Fragment::MonadicDepthOne).holds {
            out.fail(format!("{src} is not a monadic depth-one input"));
            continue;
        }
        let t = sol_to_spatial(&f, &base)?;
        let m = in_fragment(&t.formula, &t.vocab, Fragment::DepthOneSpatial);
        if !m.holds {
            out.fail(format!(
                "{src}: translation leaves the fragment at {:?}",
                m.violations
            ));
        }
    }
    out.summary = format!(
        "{} formulas, all translations in the fragment",
        corpus::MONADIC.formulas.len()
    );
    Ok(out)
}

fn algebraic_laws(finder: &Finder) -> Result<Outcome, SearchError> {
    let mut out = Outcome::new();
    let vocab = corpus::LAWS.base_vocab();
    let fs: Vec<Formula> = corpus::LAWS.parsed().into_iter().map(|(_, f)| f).collect();
    let sep = |a: &Formula, b: &Formula| Formula::sep(a.clone(), b.clone());
    let emp = Formula::emp(&vocab);
    for a in &fs {
        compare(
            &mut out,
            finder,
            &format!("{a} * emp"),
            &sep(a, &emp),
            a,
            &vocab,
            2,
        )?;
        compare(
            &mut out,
            finder,
            &format!("{a} * false"),
            &sep(a, &Formula::False),
            &Formula::False,
            &vocab,
            2,
        )?;
        for b in &fs {
            compare(
                &mut out,
                finder,
                &format!("{a} * {b}"),
                &sep(a, b),
                &sep(b, a),
                &vocab,
                2,
            )?;
            for c in &fs {
                let left = sep(&sep(a, b), c);
                let right = sep(a, &sep(b, c));
                compare(
                    &mut out,
                    finder,
                    &format!("({a} * {b}) * {c}"),
                    &left,
                    &right,
                    &vocab,
                    2,
                )?;
            }
        }
    }
    out.summary = format!(
        "{} formulas: commutativity, associativity, unit, annihilator",
        fs.len()
    );
    Ok(out)
}

/// `print ∘ parse` is the identity on canonical text and `parse ∘ print` on
/// trees, for the corpora and for every translation of them.
fn round_trip() -> Result<Outcome, SearchError> {
    let mut out = Outcome::new();
    let check = |out: &mut Outcome, f: &Formula, vocab: &Vocabulary| {
        out.cases += 1;
        let text = print_formula(f);
        match parse_formula(&text, vocab) {
            Ok(g) if g == *f && print_formula(&g) == text => {}
            Ok(g) => out.fail(format!("{text} reads back as {g}")),
            Err(e) => out.fail(format!("{text} does not parse: {e}")),
        }
    };
    for c in corpus::ALL {
        let vocab = c.parse_vocab();
        for (_, f) in c.parsed() {
            check(&mut out, &f, &vocab);
            for t in [
                spatial_to_sol(&f, &vocab),
                sol_to_spatial(&f, &vocab),
                lfp_to_sol(&f, &vocab),
                reduce_to_two_vars(&f, &vocab),
            ]
            .into_iter()
            .flatten()
            {
                check(&mut out, &t.formula, &t.vocab);
            }
        }
    }
    for c in [corpus::SPATIAL, corpus::FIXPOINT] {
        let vocab = c.base_vocab();
        for (src, f) in c.parsed() {
            let first = translations_text(&f, &vocab);
            if first != translations_text(&f, &vocab) {
                out.fail(format!("{src}: translation output differs between runs"));
            }
        }
    }
    for n in 1..=2 {
        let space = StructureSpace::new(&corpus::SPATIAL.base_vocab(), n, &["x".into()])?;
        for e in space.iter().step_by(7) {
            out.cases += 1;
            let text = print_structure(&e);
            match crate::structure::parse_structure(&text) {
                Ok(back) if back == e => {}
                _ => out.fail(format!("structure {text} does not read back")),
            }
        }
    }
    out.summary = "canonical text is a fixed point".into();
    Ok(out)
}

fn translations_text(f: &Formula, vocab: &Vocabulary) -> Vec<String> {
    [spatial_to_sol(f, vocab), lfp_to_sol(f, vocab)]
        .into_iter()
        .map(|r| {
            r.map(|t| print_formula(&t.formula))
                .unwrap_or_else(|e| e.to_string())
        })
        .collect()
}

/// Criteria whose corpora are cheap enough for debug-build unit tests.
#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelfinder::SearchBudget;

    #[test]
    fn quick_criteria_pass() {
        let finder = Finder::new(SearchBudget::default(), 1);
        for n in [4, 8, 10] {
            let r = run_criterion(n, &finder);
            assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn report_line() {
        let r = CriterionReport {
            number: 3,
            title: TITLES[2],
            passed: false,
            cases: 7,
            detail: "x".into(),
            millis: 0,
        };
        assert_eq!(
            r.to_string(),
            "criterion  3 FAIL: least fixpoints translate to second-order formulas (7 cases; x)"
        );
    }
}
