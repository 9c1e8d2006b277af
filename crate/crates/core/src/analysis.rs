//! Syntactic metrics and fragment membership.
//!
//! Paths locate subformulas by child index from the root, following
//! [`Formula::children`].

use std::fmt;

use crate::formula::Formula;
use crate::vocab::Vocabulary;

/// Metrics locating a formula relative to the decidable fragments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FragmentReport {
    /// Maximal nesting of first-order and counting quantifiers.
    pub fo_depth: usize,
    /// Maximal nesting of counting quantifiers alone.
    pub counting_depth: usize,
    /// Distinct first-order variable names.
    pub fo_var_count: usize,
    /// Every second-order binder has arity at most one.
    pub is_monadic_so: bool,
    /// Maximal `fo_depth` of a spatial operand; 0 without spatial connectives.
    pub spatial_operand_max_fo_depth: usize,
    /// Every relation split by a spatial connective has arity at most one.
    pub uses_only_unary_split: bool,
}

impl fmt::Display for FragmentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "foDepth: {}", self.fo_depth)?;
        writeln!(f, "countingDepth: {}", self.counting_depth)?;
        writeln!(f, "foVarCount: {}", self.fo_var_count)?;
        writeln!(f, "isMonadicSO: {}", self.is_monadic_so)?;
        writeln!(
            f,
            "spatialOperandMaxFoDepth: {}",
            self.spatial_operand_max_fo_depth
        )?;
        write!(f, "usesOnlyUnarySplit: {}", self.uses_only_unary_split)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fragment {
    /// Spatial conjunction over operands of quantifier depth at most one,
    /// two variable names, no second-order quantifiers.
    DepthOneSpatial,
    /// Unary second-order quantifiers over matrices of depth at most one,
    /// two variable names, no spatial connectives or fixpoints.
    MonadicDepthOne,
    /// At most two variable names.
    TwoVar,
    /// Monadic second-order binders and unary splitting only.
    Mso,
}

impl Fragment {
    pub const ALL: [Fragment; 4] = [
        Fragment::DepthOneSpatial,
        Fragment::MonadicDepthOne,
        Fragment::TwoVar,
        Fragment::Mso,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fragment::DepthOneSpatial => "DEPTH1_SPATIAL",
            Fragment::MonadicDepthOne => "MONADIC_DEPTH1",
            Fragment::TwoVar => "TWO_VAR",
            Fragment::Mso => "MSO",
        }
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub type Path = Vec<usize>;

/// Result of [`in_fragment`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    pub holds: bool,
    pub violations: Vec<Path>,
}

/// Quantifier depth; first-order and counting binders each add one.
pub fn fo_depth(f: &Formula) -> usize {
    let inner = f.children().into_iter().map(fo_depth).max().unwrap_or(0);
    match f {
        Formula::Exists { .. }
        | Formula::Forall { .. }
        | Formula::CountExists { .. }
        | Formula::ExistsExactly { .. } => inner + 1,
        _ => inner,
    }
}

fn counting_depth(f: &Formula) -> usize {
    let inner = f
        .children()
        .into_iter()
        .map(counting_depth)
        .max()
        .unwrap_or(0);
    match f {
        Formula::CountExists { .. } | Formula::ExistsExactly { .. } => inner + 1,
        _ => inner,
    }
}

/// Relations in scope with their arities, for resolving split sets.
struct Scope<'v> {
    vocab: &'v Vocabulary,
    /// `(name, arity, spatial)`.
    bound: Vec<(String, usize, bool)>,
}

impl Scope<'_> {
    fn lookup(&self, name: &str) -> Option<(usize, bool)> {
        match self.bound.iter().rev().find(|(n, _, _)| n == name) {
            Some(&(_, k, s)) => Some((k, s)),
            None => self.vocab.arity(name).map(|k| (k, true)),
        }
    }

    /// Arities of the relations a spatial node actually splits.
    fn split_arities(&self, f: &Formula) -> Vec<usize> {
        let (on, left, right) = match f {
            Formula::Sep { on, left, right } => (on.as_ref(), &**left, &**right),
            Formula::Wand(left, right) => (None, &**left, &**right),
            _ => return Vec::new(),
        };
        let mut mentioned = left.free_so_vars();
        mentioned.extend(right.free_so_vars());
        mentioned
            .iter()
            .filter(|p| on.is_none_or(|s| s.contains(p)))
            .filter_map(|p| match self.lookup(p) {
                Some((k, spatial)) if spatial || on.is_some() => Some(k),
                _ => None,
            })
            .collect()
    }

    fn enter(&mut self, f: &Formula) -> usize {
        match f {
            Formula::ExistsSo { pred, arity, .. } | Formula::ForallSo { pred, arity, .. } => {
                self.bound.push((pred.clone(), *arity, true));
                1
            }
            Formula::Lfp { pred, params, .. } | Formula::LetRec { pred, params, .. } => {
                self.bound.push((pred.clone(), params.len(), false));
                1
            }
            _ => 0,
        }
    }

    fn leave(&mut self, pushed: usize) {
        self.bound.truncate(self.bound.len() - pushed);
    }
}

/// Depth-first walk with the path and scope of every node.
fn walk(
    f: &Formula,
    path: &mut Path,
    scope: &mut Scope,
    visit: &mut impl FnMut(&Formula, &Path, &Scope),
) {
    visit(f, path, scope);
    let pushed = scope.enter(f);
    for (i, c) in f.children().into_iter().enumerate() {
        path.push(i);
        walk(c, path, scope, visit);
        path.pop();
    }
    scope.leave(pushed);
}

fn spatial_operands(f: &Formula) -> Option<[&Formula; 2]> {
    match f {
        Formula::Sep { left, right, .. } | Formula::Wand(left, right) => Some([left, right]),
        _ => None,
    }
}

/// Computes a [`FragmentReport`]; `vocab` gives the arities of free symbols.
///
/// ```
/// use spatial_logic::{classify, parse_formula, Vocabulary};
/// let vocab = Vocabulary::of(&[("E", 2)]).unwrap();
/// let r = classify(&parse_formula("(forall x (exists y (E x y)))", &vocab).unwrap(), &vocab);
/// assert_eq!((r.fo_depth, r.fo_var_count, r.counting_depth), (2, 2, 0));
/// ```
pub fn classify(f: &Formula, vocab: &Vocabulary) -> FragmentReport {
    let mut report = FragmentReport {
        fo_depth: fo_depth(f),
        counting_depth: counting_depth(f),
        fo_var_count: f.fo_names().len(),
        is_monadic_so: true,
        spatial_operand_max_fo_depth: 0,
        uses_only_unary_split: true,
    };
    let mut scope = Scope {
        vocab,
        bound: Vec::new(),
    };
    walk(f, &mut Vec::new(), &mut scope, &mut |g, _, scope| {
        if let Some((_, k)) = g.so_binder() {
            report.is_monadic_so &= k <= 1;
        }
        if let Some(ops) = spatial_operands(g) {
            for op in ops {
                report.spatial_operand_max_fo_depth =
                    report.spatial_operand_max_fo_depth.max(fo_depth(op));
            }
            report.uses_only_unary_split &= scope.split_arities(g).iter().all(|&k| k <= 1);
        }
    });
    report
}

/// Quantifier depth of a second-order matrix as seen by
/// [`sol_to_spatial`](crate::sol_to_spatial): a nested second-order binder
/// becomes a spatial conjunction with an emptiness constraint of depth one.
fn effective_depth(f: &Formula) -> usize {
    let inner = f
        .children()
        .into_iter()
        .map(effective_depth)
        .max()
        .unwrap_or(0);
    match f {
        Formula::Exists { .. }
        | Formula::Forall { .. }
        | Formula::CountExists { .. }
        | Formula::ExistsExactly { .. } => inner + 1,
        Formula::ExistsSo { .. } | Formula::ForallSo { .. } => inner.max(1),
        _ => inner,
    }
}

/// Decides membership in `fragment`, listing the offending subformulas.
///
/// ```
/// use spatial_logic::{in_fragment, parse_formula, Fragment, Vocabulary};
/// let vocab = Vocabulary::of(&[("P", 1)]).unwrap();
/// let ok = parse_formula("(sep (exists-ge 2 x (P x)) (exists x (P x)))", &vocab).unwrap();
/// assert!(in_fragment(&ok, &vocab, Fragment::DepthOneSpatial).holds);
/// let deep = parse_formula("(sep (exists x (exists y (P y))) true)", &vocab).unwrap();
/// assert_eq!(in_fragment(&deep, &vocab, Fragment::DepthOneSpatial).violations, vec![vec![0]]);
/// ```
pub fn in_fragment(f: &Formula, vocab: &Vocabulary, fragment: Fragment) -> Membership {
    let mut violations: Vec<Path> = Vec::new();
    let mut scope = Scope {
        vocab,
        bound: Vec::new(),
    };
    walk(
        f,
        &mut Vec::new(),
        &mut scope,
        &mut |g, path, scope| match fragment {
            Fragment::DepthOneSpatial => {
                if let Some(ops) = spatial_operands(g) {
                    for (i, op) in ops.into_iter().enumerate() {
                        if fo_depth(op) > 1 {
                            let mut p = path.clone();
                            p.push(i);
                            violations.push(p);
                        }
                    }
                }
                if g.so_binder().is_some() {
                    violations.push(path.clone());
                }
            }
            Fragment::MonadicDepthOne => match g {
                Formula::ExistsSo { arity, body, .. } | Formula::ForallSo { arity, body, .. } => {
                    if *arity != 1 {
                        violations.push(path.clone());
                    } else if effective_depth(body) > 1 {
                        let mut p = path.clone();
                        p.push(0);
                        violations.push(p);
                    }
                }
                Formula::Sep { .. }
                | Formula::Wand(..)
                | Formula::Lfp { .. }
                | Formula::LetRec { .. } => violations.push(path.clone()),
                _ => {}
            },
            Fragment::TwoVar => {}
            Fragment::Mso => {
                if let Some((_, k)) = g.so_binder() {
                    if k > 1 {
                        violations.push(path.clone());
                    }
                }
                if spatial_operands(g).is_some() && scope.split_arities(g).iter().any(|&k| k > 1) {
                    violations.push(path.clone());
                }
            }
        },
    );
    if matches!(
        fragment,
        Fragment::DepthOneSpatial | Fragment::MonadicDepthOne | Fragment::TwoVar
    ) && f.fo_names().len() > 2
        && !violations.contains(&Vec::new())
    {
        violations.insert(0, Vec::new());
    }
    Membership {
        holds: violations.is_empty(),
        violations,
    }
}

/// The subformula at `path`, if any.
pub fn subformula<'f>(f: &'f Formula, path: &[usize]) -> Option<&'f Formula> {
    path.iter()
        .try_fold(f, |g, &i| g.children().get(i).copied())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{desugar, rename_bound_so};
    use crate::syntax::parse_formula;
    use crate::translate::sol_to_spatial;

    fn vocab() -> Vocabulary {
        Vocabulary::of(&[("P", 1), ("Q", 1), ("E", 2)]).unwrap()
    }

    fn p(s: &str) -> Formula {
        parse_formula(s, &vocab()).unwrap()
    }

    #[test]
    fn depth_examples() {
        let r = classify(&p("(forall x (exists y (E x y)))"), &vocab());
        assert_eq!(r.fo_depth, 2);
        assert_eq!(r.fo_var_count, 2);
        assert_eq!(r.counting_depth, 0);
        assert_eq!(r.spatial_operand_max_fo_depth, 0);

        let r = classify(&p("(sep (exists-ge 2 x (P x)) (exists x (P x)))"), &vocab());
        assert_eq!(r.spatial_operand_max_fo_depth, 1);
        assert_eq!(r.counting_depth, 1);
        assert!(r.uses_only_unary_split);

        let deep = p("(sep (forall x (exists y (E x y))) true)");
        let r = classify(&deep, &vocab());
        assert_eq!(r.spatial_operand_max_fo_depth, 2);
        assert!(!r.uses_only_unary_split);
    }

    #[test]
    fn depth_one_spatial_membership() {
        let f = p("(sep (exists-ge 2 x (P x)) (exists x (P x)))");
        assert!(in_fragment(&f, &vocab(), Fragment::DepthOneSpatial).holds);
        let g = p("(sep (exists-ge 2 x (exists y (E x y))) (exists x (P x)))");
        let m = in_fragment(&g, &vocab(), Fragment::DepthOneSpatial);
        assert!(!m.holds);
        assert_eq!(m.violations, vec![vec![0]]);
        assert!(matches!(
            subformula(&g, &m.violations[0]),
            Some(Formula::CountExists { .. })
        ));
    }

    #[test]
    fn two_var_and_mso() {
        let three = p("(exists x (exists y (exists z (and (E x y) (E y z)))))");
        assert_eq!(
            in_fragment(&three, &vocab(), Fragment::TwoVar).violations,
            vec![Vec::<usize>::new()]
        );
        let mso = p("(exists2 P (sep-on (P Q) (P x) (Q x)))");
        assert!(in_fragment(&mso, &vocab(), Fragment::Mso).holds);
        let not_mso = p("(sep (E x x) true)");
        assert!(!in_fragment(&not_mso, &vocab(), Fragment::Mso).holds);
    }

    #[test]
    fn classify_is_stable_under_desugar_and_renaming() {
        for s in [
            "(forall x (implies (P x) (exists-exactly 2 y (E x y))))",
            "(and (P x) (forall2 P (or (P x) (Q x))))",
            "(iff (exists x (P x)) (forall y (Q y)))",
        ] {
            let f = p(s);
            assert_eq!(
                classify(&f, &vocab()),
                classify(&desugar(&f), &vocab()),
                "{s}"
            );
            assert_eq!(
                classify(&f, &vocab()),
                classify(&rename_bound_so(&f), &vocab()),
                "{s}"
            );
        }
    }

    #[test]
    fn monadic_depth_one_uses_effective_depth() {
        let ok = p("(exists2 P (forall x (iff (P x) (Q x))))");
        assert!(in_fragment(&ok, &vocab(), Fragment::MonadicDepthOne).holds);
        // A nested binder under a first-order quantifier: the matrix of P has
        // one quantifier, but its translation nests the inner emptiness
        // constraint under `forall x`, giving an operand of depth 2.
        let nested = p("(exists2 P (forall x (exists2 Q (and (P x) (Q x)))))");
        let m = in_fragment(&nested, &vocab(), Fragment::MonadicDepthOne);
        assert_eq!(m.violations, vec![vec![0]]);
        let out = sol_to_spatial(&nested, &vocab()).unwrap();
        assert!(!in_fragment(&out.formula, &out.vocab, Fragment::DepthOneSpatial).holds);
        let binary = p("(exists2 E (exists x (E x x)))");
        assert!(!in_fragment(&binary, &vocab(), Fragment::MonadicDepthOne).holds);
    }

    #[test]
    fn report_block() {
        let r = classify(&p("(exists x (P x))"), &vocab());
        assert_eq!(
            r.to_string(),
            "foDepth: 1\ncountingDepth: 0\nfoVarCount: 1\nisMonadicSO: true\nspatialOperandMaxFoDepth: 0\nusesOnlyUnarySplit: true"
        );
    }
}
