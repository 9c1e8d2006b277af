//! The formula AST and the syntactic operations every translation relies on.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::vocab::{PredicateSet, PredicateSymbol, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("predicate `{pred}` has arity {expected} but is used with {found} argument(s)")]
    ArityMismatch {
        pred: String,
        expected: usize,
        found: usize,
    },
    #[error("predicate name `{0}` already occurs in the formula")]
    NameInUse(String),
}

/// Formulas of second-order logic extended with spatial conjunction,
/// spatial implication and least fixpoints.
///
/// `Or`, `Implies`, `Iff`, `Forall`, `ForallSo`, `ExistsExactly` and `False`
/// are sugar; [`desugar`] rewrites them into the remaining core variants.
/// Second-order binders record the arity of the predicate they bind so that a
/// formula can be evaluated without consulting a vocabulary for bound names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Eq(String, String),
    Atom {
        pred: String,
        args: Vec<String>,
    },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists {
        var: String,
        body: Box<Formula>,
    },
    Forall {
        var: String,
        body: Box<Formula>,
    },
    /// `∃^{≥c} x. F`
    CountExists {
        at_least: u32,
        var: String,
        body: Box<Formula>,
    },
    /// `∃^{=c} x. F`
    ExistsExactly {
        count: u32,
        var: String,
        body: Box<Formula>,
    },
    ExistsSo {
        pred: String,
        arity: usize,
        body: Box<Formula>,
    },
    ForallSo {
        pred: String,
        arity: usize,
        body: Box<Formula>,
    },
    /// Spatial conjunction. `on == None` splits every relation in scope
    /// (`⊛`); `Some(σ)` splits only the members of `σ` (`⊛_σ`).
    Sep {
        on: Option<PredicateSet>,
        left: Box<Formula>,
        right: Box<Formula>,
    },
    /// Spatial implication `F −⊛ G`.
    Wand(Box<Formula>, Box<Formula>),
    /// `lfp P (x1…xk) F (y1…yk)`: membership of `y` in the least fixpoint.
    Lfp {
        pred: String,
        params: Vec<String>,
        body: Box<Formula>,
        args: Vec<String>,
    },
    /// `letrec P (x1…xk) = F in G`.
    LetRec {
        pred: String,
        params: Vec<String>,
        body: Box<Formula>,
        scope: Box<Formula>,
    },
}

use Formula::*;

fn bx(f: Formula) -> Box<Formula> {
    Box::new(f)
}

fn strings<S: AsRef<str>>(xs: &[S]) -> Vec<String> {
    xs.iter().map(|s| s.as_ref().to_owned()).collect()
}

impl Formula {
    pub fn eq(x: &str, y: &str) -> Self {
        Eq(x.into(), y.into())
    }

    pub fn atom<S: AsRef<str>>(pred: &str, args: &[S]) -> Self {
        Atom {
            pred: pred.into(),
            args: strings(args),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Not(bx(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        And(bx(a), bx(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Or(bx(a), bx(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Implies(bx(a), bx(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Iff(bx(a), bx(b))
    }

    pub fn exists(var: &str, body: Formula) -> Self {
        Exists {
            var: var.into(),
            body: bx(body),
        }
    }

    pub fn forall(var: &str, body: Formula) -> Self {
        Forall {
            var: var.into(),
            body: bx(body),
        }
    }

    pub fn count_exists(at_least: u32, var: &str, body: Formula) -> Self {
        CountExists {
            at_least,
            var: var.into(),
            body: bx(body),
        }
    }

    pub fn exists_exactly(count: u32, var: &str, body: Formula) -> Self {
        ExistsExactly {
            count,
            var: var.into(),
            body: bx(body),
        }
    }

    pub fn exists_so(pred: &str, arity: usize, body: Formula) -> Self {
        ExistsSo {
            pred: pred.into(),
            arity,
            body: bx(body),
        }
    }

    pub fn forall_so(pred: &str, arity: usize, body: Formula) -> Self {
        ForallSo {
            pred: pred.into(),
            arity,
            body: bx(body),
        }
    }

    pub fn sep(left: Formula, right: Formula) -> Self {
        Sep {
            on: None,
            left: bx(left),
            right: bx(right),
        }
    }

    pub fn sep_on(on: PredicateSet, left: Formula, right: Formula) -> Self {
        Sep {
            on: Some(on),
            left: bx(left),
            right: bx(right),
        }
    }

    pub fn wand(left: Formula, right: Formula) -> Self {
        Wand(bx(left), bx(right))
    }

    pub fn lfp<S: AsRef<str>>(pred: &str, params: &[S], body: Formula, args: &[S]) -> Self {
        Lfp {
            pred: pred.into(),
            params: strings(params),
            body: bx(body),
            args: strings(args),
        }
    }

    pub fn letrec<S: AsRef<str>>(pred: &str, params: &[S], body: Formula, scope: Formula) -> Self {
        LetRec {
            pred: pred.into(),
            params: strings(params),
            body: bx(body),
            scope: bx(scope),
        }
    }

    /// Right-nested conjunction; the empty conjunction is `true`.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut parts: Vec<_> = parts.into_iter().collect();
        let Some(mut acc) = parts.pop() else {
            return True;
        };
        while let Some(p) = parts.pop() {
            acc = Formula::and(p, acc);
        }
        acc
    }

    /// Every relation of `vocab` is empty: the unit of `⊛`.
    ///
    /// ```
    /// use spatial_logic::{Formula, Vocabulary};
    /// let v = Vocabulary::of(&[("P", 1), ("E", 2)]).unwrap();
    /// assert_eq!(
    ///     Formula::emp(&v).to_string(),
    ///     "(and (forall x1 (not (P x1))) (forall x1 (forall x2 (not (E x1 x2)))))"
    /// );
    /// ```
    pub fn emp(vocab: &Vocabulary) -> Self {
        Formula::conj(vocab.iter().map(|s| {
            let xs: Vec<String> = (1..=s.arity).map(|i| format!("x{i}")).collect();
            let none = Formula::not(Formula::atom(&s.name, &xs));
            xs.iter().rev().fold(none, |acc, x| Formula::forall(x, acc))
        }))
    }

    /// Immediate subformulas, in the order used by violation paths.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            True | False | Eq(..) | Atom { .. } => vec![],
            Not(f) => vec![f],
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | Wand(a, b) => vec![a, b],
            Sep { left, right, .. } => vec![left, right],
            Exists { body, .. }
            | Forall { body, .. }
            | CountExists { body, .. }
            | ExistsExactly { body, .. }
            | ExistsSo { body, .. }
            | ForallSo { body, .. }
            | Lfp { body, .. } => vec![body],
            LetRec { body, scope, .. } => vec![body, scope],
        }
    }

    /// Rebuilds the node with `f` applied to each immediate subformula.
    pub fn map_children(&self, mut f: impl FnMut(&Formula) -> Formula) -> Formula {
        match self {
            True | False | Eq(..) | Atom { .. } => self.clone(),
            Not(a) => Not(bx(f(a))),
            And(a, b) => And(bx(f(a)), bx(f(b))),
            Or(a, b) => Or(bx(f(a)), bx(f(b))),
            Implies(a, b) => Implies(bx(f(a)), bx(f(b))),
            Iff(a, b) => Iff(bx(f(a)), bx(f(b))),
            Wand(a, b) => Wand(bx(f(a)), bx(f(b))),
            Sep { on, left, right } => Sep {
                on: on.clone(),
                left: bx(f(left)),
                right: bx(f(right)),
            },
            Exists { var, body } => Exists {
                var: var.clone(),
                body: bx(f(body)),
            },
            Forall { var, body } => Forall {
                var: var.clone(),
                body: bx(f(body)),
            },
            CountExists {
                at_least,
                var,
                body,
            } => CountExists {
                at_least: *at_least,
                var: var.clone(),
                body: bx(f(body)),
            },
            ExistsExactly { count, var, body } => ExistsExactly {
                count: *count,
                var: var.clone(),
                body: bx(f(body)),
            },
            ExistsSo { pred, arity, body } => ExistsSo {
                pred: pred.clone(),
                arity: *arity,
                body: bx(f(body)),
            },
            ForallSo { pred, arity, body } => ForallSo {
                pred: pred.clone(),
                arity: *arity,
                body: bx(f(body)),
            },
            Lfp {
                pred,
                params,
                body,
                args,
            } => Lfp {
                pred: pred.clone(),
                params: params.clone(),
                body: bx(f(body)),
                args: args.clone(),
            },
            LetRec {
                pred,
                params,
                body,
                scope,
            } => LetRec {
                pred: pred.clone(),
                params: params.clone(),
                body: bx(f(body)),
                scope: bx(f(scope)),
            },
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn is_core(&self) -> bool {
        let here = !matches!(
            self,
            False
                | Or(..)
                | Implies(..)
                | Iff(..)
                | Forall { .. }
                | ForallSo { .. }
                | ExistsExactly { .. }
        );
        here && self.children().iter().all(|c| c.is_core())
    }

    /// Whether the formula contains `sep`, `sep-on` or `wand`.
    pub fn has_spatial(&self) -> bool {
        matches!(self, Sep { .. } | Wand(..)) || self.children().iter().any(|c| c.has_spatial())
    }

    pub fn has_fixpoint(&self) -> bool {
        matches!(self, Lfp { .. } | LetRec { .. })
            || self.children().iter().any(|c| c.has_fixpoint())
    }

    pub fn has_so_quantifier(&self) -> bool {
        matches!(self, ExistsSo { .. } | ForallSo { .. })
            || self.children().iter().any(|c| c.has_so_quantifier())
    }

    pub fn free_fo_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free_fo(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_fo(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut note = |v: &String, bound: &Vec<String>| {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        };
        match self {
            Eq(a, b) => {
                note(a, bound);
                note(b, bound);
            }
            Atom { args, .. } => args.iter().for_each(|a| note(a, bound)),
            Exists { var, body }
            | Forall { var, body }
            | CountExists { var, body, .. }
            | ExistsExactly { var, body, .. } => {
                bound.push(var.clone());
                body.collect_free_fo(bound, out);
                bound.pop();
            }
            Lfp {
                params, body, args, ..
            } => {
                args.iter().for_each(|a| note(a, bound));
                let depth = bound.len();
                bound.extend(params.iter().cloned());
                body.collect_free_fo(bound, out);
                bound.truncate(depth);
            }
            LetRec {
                params,
                body,
                scope,
                ..
            } => {
                let depth = bound.len();
                bound.extend(params.iter().cloned());
                body.collect_free_fo(bound, out);
                bound.truncate(depth);
                scope.collect_free_fo(bound, out);
            }
            _ => {
                for c in self.children() {
                    c.collect_free_fo(bound, out);
                }
            }
        }
    }

    /// Free second-order names: predicates used in atoms or `sep-on` lists
    /// outside the scope of a binder for them.
    pub fn free_so_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free_so(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_so(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Atom { pred, .. } => {
                if !bound.contains(pred) {
                    out.insert(pred.clone());
                }
            }
            Sep { on, left, right } => {
                if let Some(on) = on {
                    for p in on.iter() {
                        if !bound.iter().any(|b| b == p) {
                            out.insert(p.to_owned());
                        }
                    }
                }
                left.collect_free_so(bound, out);
                right.collect_free_so(bound, out);
            }
            ExistsSo { pred, body, .. } | ForallSo { pred, body, .. } | Lfp { pred, body, .. } => {
                bound.push(pred.clone());
                body.collect_free_so(bound, out);
                bound.pop();
            }
            LetRec {
                pred, body, scope, ..
            } => {
                bound.push(pred.clone());
                body.collect_free_so(bound, out);
                scope.collect_free_so(bound, out);
                bound.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_free_so(bound, out);
                }
            }
        }
    }

    /// Names introduced by second-order binders (quantifiers, `lfp`, `letrec`).
    pub fn bound_so_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Some((p, _)) = f.so_binder() {
                out.insert(p.to_owned());
            }
        });
        out
    }

    /// Every second-order name occurring anywhere, free or bound.
    pub fn so_names(&self) -> BTreeSet<String> {
        let mut out = self.bound_so_vars();
        self.visit(&mut |f| match f {
            Atom { pred, .. } => {
                out.insert(pred.clone());
            }
            Sep { on: Some(on), .. } => out.extend(on.iter().map(str::to_owned)),
            _ => {}
        });
        out
    }

    /// Every first-order name occurring anywhere, free or bound.
    pub fn fo_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| out.extend(f.local_fo_names().into_iter().cloned()));
        out
    }

    /// FO names in order of first appearance (pre-order, left to right).
    pub fn fo_names_in_order(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.visit(&mut |f| {
            for v in f.local_fo_names() {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        });
        out
    }

    fn local_fo_names(&self) -> Vec<&String> {
        match self {
            Eq(a, b) => vec![a, b],
            Atom { args, .. } => args.iter().collect(),
            Exists { var, .. }
            | Forall { var, .. }
            | CountExists { var, .. }
            | ExistsExactly { var, .. } => vec![var],
            Lfp { params, args, .. } => params.iter().chain(args).collect(),
            LetRec { params, .. } => params.iter().collect(),
            _ => vec![],
        }
    }

    /// The predicate and arity bound at this node, if it is a second-order binder.
    pub fn so_binder(&self) -> Option<(&str, usize)> {
        match self {
            ExistsSo { pred, arity, .. } | ForallSo { pred, arity, .. } => Some((pred, *arity)),
            Lfp { pred, params, .. } | LetRec { pred, params, .. } => Some((pred, params.len())),
            _ => None,
        }
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Every `(name, arity)` pair witnessed by an atom or a binder.
    pub fn predicate_uses(&self) -> Vec<PredicateSymbol> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Atom { pred, args } = f {
                out.push(PredicateSymbol::new(pred.clone(), args.len()));
            }
            if let Some((p, k)) = f.so_binder() {
                out.push(PredicateSymbol::new(p, k));
            }
        });
        out
    }

    /// Checks atom arities against `vocab` and binder arities against the
    /// declared ones.
    pub fn check_arities(&self, vocab: &Vocabulary) -> Result<(), FormulaError> {
        for use_ in self.predicate_uses() {
            if let Some(k) = vocab.arity(&use_.name) {
                if k != use_.arity {
                    return Err(FormulaError::ArityMismatch {
                        pred: use_.name,
                        expected: k,
                        found: use_.arity,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Deterministic fresh names: `base_1`, `base_2`, … (least unused counter).
pub(crate) fn fresh_suffixed(base: &str, used: &mut BTreeSet<String>) -> String {
    let name = (1..)
        .map(|k| format!("{base}_{k}"))
        .find(|n| !used.contains(n))
        .expect("unbounded counter");
    used.insert(name.clone());
    name
}

/// `candidate` itself if unused, otherwise the least unused suffixed variant.
pub(crate) fn fresh_variant(candidate: &str, used: &mut BTreeSet<String>) -> String {
    if used.insert(candidate.to_owned()) {
        candidate.to_owned()
    } else {
        fresh_suffixed(candidate, used)
    }
}

/// Replaces free occurrences of predicate `old` by `new` without any checks.
/// `new` must not occur in `f`.
pub(crate) fn rename_free_pred(f: &Formula, old: &str, new: &str) -> Formula {
    match f {
        Atom { pred, args } if pred == old => Atom {
            pred: new.to_owned(),
            args: args.clone(),
        },
        ExistsSo { pred, .. } | ForallSo { pred, .. } | Lfp { pred, .. } | LetRec { pred, .. }
            if pred == old =>
        {
            f.clone()
        }
        Sep { on, left, right } => Sep {
            on: on.as_ref().map(|s| {
                s.iter()
                    .map(|p| if p == old { new } else { p })
                    .collect::<PredicateSet>()
            }),
            left: bx(rename_free_pred(left, old, new)),
            right: bx(rename_free_pred(right, old, new)),
        },
        _ => f.map_children(|c| rename_free_pred(c, old, new)),
    }
}

/// Replaces free occurrences of the first-order variable `old` by `new`,
/// where `new` does not occur in `f`.
pub(crate) fn rename_free_var(f: &Formula, old: &str, new: &str) -> Formula {
    let sub = |v: &String| if v == old { new.to_owned() } else { v.clone() };
    match f {
        Eq(a, b) => Eq(sub(a), sub(b)),
        Atom { pred, args } => Atom {
            pred: pred.clone(),
            args: args.iter().map(sub).collect(),
        },
        Exists { var, .. }
        | Forall { var, .. }
        | CountExists { var, .. }
        | ExistsExactly { var, .. }
            if var == old =>
        {
            f.clone()
        }
        Lfp {
            pred,
            params,
            body,
            args,
        } => Lfp {
            pred: pred.clone(),
            params: params.clone(),
            body: if params.iter().any(|p| p == old) {
                body.clone()
            } else {
                bx(rename_free_var(body, old, new))
            },
            args: args.iter().map(sub).collect(),
        },
        LetRec {
            pred,
            params,
            body,
            scope,
        } => LetRec {
            pred: pred.clone(),
            params: params.clone(),
            body: if params.iter().any(|p| p == old) {
                body.clone()
            } else {
                bx(rename_free_var(body, old, new))
            },
            scope: bx(rename_free_var(scope, old, new)),
        },
        _ => f.map_children(|c| rename_free_var(c, old, new)),
    }
}

/// Capture-avoiding renaming of a free predicate (`F[old := new]`).
///
/// Binders for `old` are not entered. Fails if `new` already occurs in `f`
/// or if some free occurrence of `old` disagrees with `new`'s arity.
///
/// ```
/// use spatial_logic::{parse_formula, substitute_predicate, PredicateSymbol, Vocabulary};
/// let vocab = Vocabulary::of(&[("P", 1)]).unwrap();
/// let f = parse_formula("(and (P x) (exists2 P (P y)))", &vocab).unwrap();
/// let g = substitute_predicate(&f, "P", &PredicateSymbol::new("R", 1)).unwrap();
/// assert_eq!(g.to_string(), "(and (R x) (exists2 P (P y)))");
/// ```
pub fn substitute_predicate(
    f: &Formula,
    old: &str,
    new: &PredicateSymbol,
) -> Result<Formula, FormulaError> {
    if f.so_names().contains(&new.name) {
        return Err(FormulaError::NameInUse(new.name.clone()));
    }
    let mut bad = None;
    check_free_arity(f, old, new.arity, &mut bad);
    if let Some(found) = bad {
        return Err(FormulaError::ArityMismatch {
            pred: old.to_owned(),
            expected: new.arity,
            found,
        });
    }
    Ok(rename_free_pred(f, old, &new.name))
}

fn check_free_arity(f: &Formula, old: &str, arity: usize, bad: &mut Option<usize>) {
    match f {
        Atom { pred, args } if pred == old && args.len() != arity => *bad = Some(args.len()),
        ExistsSo { pred, .. } | ForallSo { pred, .. } | Lfp { pred, .. } | LetRec { pred, .. }
            if pred == old => {}
        _ => {
            for c in f.children() {
                check_free_arity(c, old, arity, bad);
            }
        }
    }
}

/// Renames second-order binders so that every binder introduces a name
/// distinct from all other bound names and from every free name.
///
/// A binder is renamed only when its name clashes; names are `base_k` with the
/// least unused `k`.
pub fn rename_bound_so(f: &Formula) -> Formula {
    rename_bound_so_avoiding(f, &BTreeSet::new())
}

/// [`rename_bound_so`], additionally never generating a name in `avoid`.
pub fn rename_bound_so_avoiding(f: &Formula, avoid: &BTreeSet<String>) -> Formula {
    let mut binder_counts: BTreeMap<String, usize> = BTreeMap::new();
    f.visit(&mut |g| {
        if let Some((p, _)) = g.so_binder() {
            *binder_counts.entry(p.to_owned()).or_default() += 1;
        }
    });
    let free = f.free_so_vars();
    let clashing: BTreeSet<String> = binder_counts
        .into_iter()
        .filter(|(p, count)| *count > 1 || free.contains(p))
        .map(|(p, _)| p)
        .collect();
    if clashing.is_empty() {
        return f.clone();
    }
    let mut used = f.so_names();
    used.extend(avoid.iter().cloned());
    rename_binders(f, &clashing, &mut used)
}

fn rename_binders(
    f: &Formula,
    clashing: &BTreeSet<String>,
    used: &mut BTreeSet<String>,
) -> Formula {
    match f {
        ExistsSo { pred, arity, body } | ForallSo { pred, arity, body }
            if clashing.contains(pred) =>
        {
            let new = fresh_suffixed(pred, used);
            let body = rename_binders(&rename_free_pred(body, pred, &new), clashing, used);
            if matches!(f, ExistsSo { .. }) {
                Formula::exists_so(&new, *arity, body)
            } else {
                Formula::forall_so(&new, *arity, body)
            }
        }
        Lfp {
            pred,
            params,
            body,
            args,
        } if clashing.contains(pred) => {
            let new = fresh_suffixed(pred, used);
            let body = rename_binders(&rename_free_pred(body, pred, &new), clashing, used);
            Lfp {
                pred: new,
                params: params.clone(),
                body: bx(body),
                args: args.clone(),
            }
        }
        LetRec {
            pred,
            params,
            body,
            scope,
        } if clashing.contains(pred) => {
            let new = fresh_suffixed(pred, used);
            let body = rename_binders(&rename_free_pred(body, pred, &new), clashing, used);
            let scope = rename_binders(&rename_free_pred(scope, pred, &new), clashing, used);
            LetRec {
                pred: new,
                params: params.clone(),
                body: bx(body),
                scope: bx(scope),
            }
        }
        _ => f.map_children(|c| rename_binders(c, clashing, used)),
    }
}

/// Rewrites sugar into core variants: `∀` as `¬∃¬`, `∃^{=c}` as
/// `∃^{≥c} ∧ ¬∃^{≥c+1}`, and the boolean abbreviations via `∧`/`¬`.
pub fn desugar(f: &Formula) -> Formula {
    let d = |g: &Formula| desugar(g);
    match f {
        False => Formula::not(True),
        Or(a, b) => Formula::not(Formula::and(Formula::not(d(a)), Formula::not(d(b)))),
        Implies(a, b) => Formula::not(Formula::and(d(a), Formula::not(d(b)))),
        Iff(a, b) => {
            let (a, b) = (d(a), d(b));
            Formula::and(
                Formula::not(Formula::and(a.clone(), Formula::not(b.clone()))),
                Formula::not(Formula::and(b, Formula::not(a))),
            )
        }
        Forall { var, body } => Formula::not(Formula::exists(var, Formula::not(d(body)))),
        ForallSo { pred, arity, body } => {
            Formula::not(Formula::exists_so(pred, *arity, Formula::not(d(body))))
        }
        ExistsExactly { count, var, body } => {
            let body = d(body);
            Formula::and(
                Formula::count_exists(*count, var, body.clone()),
                Formula::not(Formula::count_exists(count + 1, var, body)),
            )
        }
        _ => f.map_children(d),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Polarity {
    Pos,
    Neg,
    Both,
}

impl Polarity {
    fn flip(self) -> Self {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
            Polarity::Both => Polarity::Both,
        }
    }
}

/// True iff every free occurrence of `pred` in `f` is positive.
///
/// `iff`, `exists-exactly` and the left operand of `wand` are treated as
/// mixed or negative contexts; `letrec` is expanded first.
pub fn check_positivity(f: &Formula, pred: &str) -> bool {
    let expanded;
    let f = if f.has_fixpoint() {
        expanded = expand_letrec(f);
        &expanded
    } else {
        f
    };
    positive_in(f, pred, Polarity::Pos)
}

fn positive_in(f: &Formula, pred: &str, pol: Polarity) -> bool {
    match f {
        Atom { pred: p, .. } => p != pred || pol == Polarity::Pos,
        Not(a) => positive_in(a, pred, pol.flip()),
        Implies(a, b) => positive_in(a, pred, pol.flip()) && positive_in(b, pred, pol),
        Wand(a, b) => positive_in(a, pred, pol.flip()) && positive_in(b, pred, pol),
        Iff(a, b) => positive_in(a, pred, Polarity::Both) && positive_in(b, pred, Polarity::Both),
        ExistsExactly { body, .. } => positive_in(body, pred, Polarity::Both),
        ExistsSo { pred: p, .. } | ForallSo { pred: p, .. } | Lfp { pred: p, .. } if p == pred => {
            true
        }
        _ => f.children().iter().all(|c| positive_in(c, pred, pol)),
    }
}

/// Replaces every `letrec P (x̄) = F in G` by `G` with each free atom
/// `P(ȳ)` replaced by `lfp P (x̄) F (ȳ)`, renaming binders of `G` that would
/// capture free names of `F`.
pub fn expand_letrec(f: &Formula) -> Formula {
    match f {
        LetRec {
            pred,
            params,
            body,
            scope,
        } => {
            let body = expand_letrec(body);
            let scope = expand_letrec(scope);
            let mut used_fo = scope.fo_names();
            used_fo.extend(body.fo_names());
            let mut used_so = scope.so_names();
            used_so.extend(body.so_names());
            let lfp = LfpTemplate {
                pred,
                params,
                body: &body,
                free_fo: body
                    .free_fo_vars()
                    .into_iter()
                    .filter(|v| !params.contains(v))
                    .collect(),
                free_so: body
                    .free_so_vars()
                    .into_iter()
                    .filter(|p| p != pred)
                    .collect(),
            };
            lfp.substitute(&scope, &mut used_fo, &mut used_so)
        }
        _ => f.map_children(expand_letrec),
    }
}

struct LfpTemplate<'a> {
    pred: &'a str,
    params: &'a [String],
    body: &'a Formula,
    free_fo: BTreeSet<String>,
    free_so: BTreeSet<String>,
}

impl LfpTemplate<'_> {
    fn substitute(
        &self,
        g: &Formula,
        used_fo: &mut BTreeSet<String>,
        used_so: &mut BTreeSet<String>,
    ) -> Formula {
        match g {
            Atom { pred, args } if pred == self.pred => Lfp {
                pred: self.pred.to_owned(),
                params: self.params.to_vec(),
                body: bx(self.body.clone()),
                args: args.clone(),
            },
            // P is rebound: nothing below refers to the letrec definition.
            ExistsSo { pred, .. }
            | ForallSo { pred, .. }
            | Lfp { pred, .. }
            | LetRec { pred, .. }
                if pred == self.pred =>
            {
                g.clone()
            }
            Exists { var, body }
            | Forall { var, body }
            | CountExists { var, body, .. }
            | ExistsExactly { var, body, .. }
                if self.free_fo.contains(var) =>
            {
                let new = fresh_suffixed(var, used_fo);
                let body = self.substitute(&rename_free_var(body, var, &new), used_fo, used_so);
                match g {
                    Exists { .. } => Formula::exists(&new, body),
                    Forall { .. } => Formula::forall(&new, body),
                    CountExists { at_least, .. } => Formula::count_exists(*at_least, &new, body),
                    ExistsExactly { count, .. } => Formula::exists_exactly(*count, &new, body),
                    _ => unreachable!(),
                }
            }
            ExistsSo { pred, arity, body } | ForallSo { pred, arity, body }
                if self.free_so.contains(pred) =>
            {
                let new = fresh_suffixed(pred, used_so);
                let body = self.substitute(&rename_free_pred(body, pred, &new), used_fo, used_so);
                if matches!(g, ExistsSo { .. }) {
                    Formula::exists_so(&new, *arity, body)
                } else {
                    Formula::forall_so(&new, *arity, body)
                }
            }
            Lfp {
                pred,
                params,
                body,
                args,
            } => {
                // Inner fixpoint: its parameters and predicate may capture.
                let (mut params2, mut body2, mut pred2) =
                    (params.clone(), (**body).clone(), pred.clone());
                for p in params2.iter_mut() {
                    if self.free_fo.contains(p) {
                        let new = fresh_suffixed(p, used_fo);
                        body2 = rename_free_var(&body2, p, &new);
                        *p = new;
                    }
                }
                if self.free_so.contains(&pred2) {
                    let new = fresh_suffixed(&pred2, used_so);
                    body2 = rename_free_pred(&body2, &pred2, &new);
                    pred2 = new;
                }
                Lfp {
                    pred: pred2,
                    params: params2,
                    body: bx(self.substitute(&body2, used_fo, used_so)),
                    args: args.clone(),
                }
            }
            _ => g.map_children(|c| self.substitute(c, used_fo, used_so)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn vocab() -> Vocabulary {
        Vocabulary::of(&[("P", 1), ("Q", 1), ("E", 2), ("P1", 1)]).unwrap()
    }

    fn p(s: &str) -> Formula {
        parse_formula(s, &vocab()).unwrap()
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn bound_and_free_so_vars() {
        assert_eq!(
            p("(exists2 P (forall x (P x)))").bound_so_vars(),
            set(&["P"])
        );
        assert_eq!(
            p("(exists2 P (forall x (and (P x) (Q x))))").free_so_vars(),
            set(&["Q"])
        );
        assert!(p("(P x)").bound_so_vars().is_empty());
        assert_eq!(
            p("(sep-on (P Q) true true)").free_so_vars(),
            set(&["P", "Q"])
        );
    }

    #[test]
    fn free_fo_vars_respect_binders() {
        let f = p("(and (exists x (E x y)) (lfp P1 (z) (E z w) (x)))");
        assert_eq!(f.free_fo_vars(), set(&["w", "x", "y"]));
    }

    #[test]
    fn rename_bound_so_examples() {
        let f = p("(and (exists2 P (P x)) (exists2 P (P y)))");
        assert_eq!(
            rename_bound_so(&f).to_string(),
            "(and (exists2 P_1 (P_1 x)) (exists2 P_2 (P_2 y)))"
        );
        let g = p("(and (exists2 Q (Q x)) (Q y))");
        assert_eq!(
            rename_bound_so(&g).to_string(),
            "(and (exists2 Q_1 (Q_1 x)) (Q y))"
        );
        let h = p("(exists2 P (forall x (P x)))");
        assert_eq!(rename_bound_so(&h), h);
    }

    #[test]
    fn rename_bound_so_nested_shadowing() {
        let f = p("(exists2 P (and (P x) (exists2 P (not (P x)))))");
        let g = rename_bound_so(&f);
        assert_eq!(
            g.to_string(),
            "(exists2 P_1 (and (P_1 x) (exists2 P_2 (not (P_2 x)))))"
        );
    }

    #[test]
    fn substitute_predicate_examples() {
        let new = PredicateSymbol::new("P'", 1);
        assert_eq!(
            substitute_predicate(&p("(P x)"), "P", &new)
                .unwrap()
                .to_string(),
            "(P' x)"
        );
        let bound = p("(exists2 P (P x))");
        assert_eq!(substitute_predicate(&bound, "P", &new).unwrap(), bound);
        assert_eq!(
            substitute_predicate(&p("(and (P x) (Q x))"), "P", &PredicateSymbol::new("Q", 1)),
            Err(FormulaError::NameInUse("Q".into()))
        );
        assert!(matches!(
            substitute_predicate(&p("(P x)"), "P", &PredicateSymbol::new("R", 2)),
            Err(FormulaError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn positivity_examples() {
        let v = Vocabulary::of(&[("E", 2), ("P", 2), ("Q", 1)]).unwrap();
        let tc = parse_formula("(or (E x y) (exists z (and (E x z) (P z y))))", &v).unwrap();
        assert!(check_positivity(&tc, "P"));
        assert!(!check_positivity(
            &parse_formula("(not (Q x))", &v).unwrap(),
            "Q"
        ));
        assert!(check_positivity(
            &parse_formula("(not (not (Q x)))", &v).unwrap(),
            "Q"
        ));
        assert!(!check_positivity(
            &parse_formula("(iff (Q x) true)", &v).unwrap(),
            "Q"
        ));
        assert!(!check_positivity(
            &parse_formula("(implies (Q x) true)", &v).unwrap(),
            "Q"
        ));
        assert!(check_positivity(
            &parse_formula("(implies true (Q x))", &v).unwrap(),
            "Q"
        ));
        assert!(!check_positivity(
            &parse_formula("(wand (Q x) true)", &v).unwrap(),
            "Q"
        ));
        assert!(check_positivity(
            &parse_formula("(not (exists2 Q (not (Q x))))", &v).unwrap(),
            "Q"
        ));
    }

    #[test]
    fn desugar_examples() {
        let body = Formula::atom("P", &["x"]);
        assert_eq!(
            desugar(&Formula::forall("x", body.clone())),
            Formula::not(Formula::exists("x", Formula::not(body.clone())))
        );
        assert_eq!(
            desugar(&Formula::exists_exactly(1, "x", body.clone())),
            Formula::and(
                Formula::count_exists(1, "x", body.clone()),
                Formula::not(Formula::count_exists(2, "x", body))
            )
        );
        let f = p("(iff (forall2 P (or (P x) false)) (implies (Q x) (exists-exactly 2 y (Q y))))");
        assert!(!f.is_core());
        assert!(desugar(&f).is_core());
    }

    #[test]
    fn letrec_expansion_avoids_capture() {
        // z is a parameter of the definition and must not be captured.
        let v = Vocabulary::of(&[("E", 2), ("R", 1)]).unwrap();
        let f = parse_formula("(letrec R (x) (E z x) (exists z (R z)))", &v).unwrap();
        let g = expand_letrec(&f);
        assert_eq!(g.to_string(), "(exists z_1 (lfp R (x) (E z x) (z_1)))");
    }

    #[test]
    fn conj_is_right_nested() {
        let c = Formula::conj([Formula::True, Formula::False, Formula::True]);
        assert_eq!(c.to_string(), "(and true (and false true))");
        assert_eq!(Formula::conj([]), Formula::True);
    }
}
