//! Forest-shaped structures: enumeration, closure under splitting, and
//! agreement between direct and translated evaluation.

use crate::analysis::classify;
use crate::eval::{EvalBudget, Prepared};
use crate::formula::Formula;
use crate::modelfinder::{SearchError, StructureSpace};
use crate::structure::{enumerate_splits, is_forest, SplitPair, Structure};
use crate::translate::spatial_to_sol;
use crate::vocab::Vocabulary;

/// Forests of size `n` over `vocab`, in structure enumeration order.
///
/// ```
/// use spatial_logic::{enumerate_forests, Vocabulary};
/// let e = Vocabulary::of(&[("E", 2)]).unwrap();
/// // Rooted labelled forests on n nodes: (n+1)^(n-1).
/// assert_eq!(enumerate_forests(&e, 3).unwrap().len(), 16);
/// ```
pub fn enumerate_forests(vocab: &Vocabulary, n: usize) -> Result<Vec<Structure>, SearchError> {
    let space = StructureSpace::new(vocab, n, &[])?;
    let mut out = Vec::new();
    for e in space.iter() {
        if is_forest(&e)? {
            out.push(e);
        }
    }
    Ok(out)
}

/// A forest with a split component that is not a forest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureViolation {
    pub forest: Structure,
    pub split: SplitPair,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureReport {
    /// Forests examined over all sizes.
    pub forests: u64,
    /// Split pairs examined over all forests.
    pub splits: u64,
    /// The first violation found, if any.
    pub counterexample: Option<ClosureViolation>,
}

impl ClosureReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Splits every forest of size `1..=n` over the whole vocabulary and checks
/// that both components are forests.
pub fn check_split_closure(vocab: &Vocabulary, n: usize) -> Result<ClosureReport, SearchError> {
    let sigma = vocab.all();
    let mut report = ClosureReport {
        forests: 0,
        splits: 0,
        counterexample: None,
    };
    for size in 1..=n {
        for forest in enumerate_forests(vocab, size)? {
            report.forests += 1;
            for split in enumerate_splits(&forest, &sigma)? {
                report.splits += 1;
                if !is_forest(&split.left)? || !is_forest(&split.right)? {
                    report.counterexample = Some(ClosureViolation { forest, split });
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}

/// Forests satisfying a formula, computed directly and through its
/// second-order translation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestComparison {
    pub forests: usize,
    pub direct: Vec<Structure>,
    pub translated: Vec<Structure>,
}

impl ForestComparison {
    pub fn agree(&self) -> bool {
        self.direct == self.translated
    }
}

/// Evaluates `f` on every forest of size `n`, once as written and once after
/// [`spatial_to_sol`]. `f` may split unary relations only.
pub fn eval_over_forests(
    f: &Formula,
    vocab: &Vocabulary,
    n: usize,
    budget: EvalBudget,
) -> Result<ForestComparison, SearchError> {
    if !classify(f, vocab).uses_only_unary_split {
        return Err(SearchError::NotUnarySplit);
    }
    let direct = Prepared::new(f, vocab)?;
    let translated = Prepared::new(&spatial_to_sol(f, vocab)?.formula, vocab)?;
    let forests = enumerate_forests(vocab, n)?;
    let mut cmp = ForestComparison {
        forests: forests.len(),
        direct: Vec::new(),
        translated: Vec::new(),
    };
    for e in forests {
        let a = direct.eval(&e, budget)?;
        let b = translated.eval(&e, budget)?;
        if a {
            cmp.direct.push(e.clone());
        }
        if b {
            cmp.translated.push(e);
        }
    }
    Ok(cmp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    #[test]
    fn forest_counts() {
        let e = Vocabulary::of(&[("E", 2)]).unwrap();
        let counts: Vec<usize> = (1..=4)
            .map(|n| enumerate_forests(&e, n).unwrap().len())
            .collect();
        assert_eq!(counts, [1, 3, 16, 125]);
        let pe = Vocabulary::of(&[("P", 1), ("E", 2)]).unwrap();
        assert_eq!(enumerate_forests(&pe, 3).unwrap().len(), 16 * 8);
    }

    #[test]
    fn closure_small() {
        let e = Vocabulary::of(&[("E", 2)]).unwrap();
        let r = check_split_closure(&e, 3).unwrap();
        assert!(r.holds());
        assert_eq!(r.forests, 1 + 3 + 16);
        let two = Vocabulary::of(&[("P", 2), ("Q", 2)]).unwrap();
        assert!(check_split_closure(&two, 2).unwrap().holds());
    }

    #[test]
    fn translation_agrees_on_forests() {
        let v = Vocabulary::of(&[("P", 1), ("E", 2)]).unwrap();
        for src in [
            "(sep-on (P) (exists x (P x)) (exists x (P x)))",
            "(sep-on (P) (forall x (implies (P x) (exists y (E x y)))) (exists x (P x)))",
            "(not (sep-on (P) (exists x (P x)) (not (exists x (P x)))))",
        ] {
            let f = parse_formula(src, &v).unwrap();
            for n in 1..=3 {
                let cmp = eval_over_forests(&f, &v, n, EvalBudget::default()).unwrap();
                assert!(cmp.agree(), "{src} at size {n}");
            }
        }
    }

    #[test]
    fn binary_splits_are_rejected() {
        let v = Vocabulary::of(&[("E", 2)]).unwrap();
        let f = parse_formula("(sep (exists x (exists y (E x y))) true)", &v).unwrap();
        assert_eq!(
            eval_over_forests(&f, &v, 2, EvalBudget::default()),
            Err(SearchError::NotUnarySplit)
        );
    }
}
