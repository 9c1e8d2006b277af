//! Formula-to-formula translations: spatial connectives into second-order
//! logic, second-order quantifiers into spatial conjunction, fixpoints into
//! second-order logic, and first-order variables into unary predicates.
//!
//! Every pass returns the translated formula together with the vocabulary
//! extended by the predicate names it introduced.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::formula::{
    check_positivity, expand_letrec, fresh_variant, rename_bound_so, rename_free_pred, Formula,
};
use crate::vocab::{PredicateSet, PredicateSymbol, VocabError, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("{construct} is not accepted by the {pass} translation")]
    Unsupported {
        pass: &'static str,
        construct: &'static str,
    },
    #[error("`{0}` occurs negatively in the body of its fixpoint")]
    Positivity(String),
    #[error("`{0}` has arity above two")]
    ArityAboveTwo(String),
    #[error("`{0}` is neither declared nor bound")]
    Unbound(String),
    #[error(transparent)]
    Vocab(#[from] VocabError),
}

/// Output of a translation pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Translated {
    pub formula: Formula,
    /// The input vocabulary followed by every introduced symbol.
    pub vocab: Vocabulary,
}

/// State threaded through one translation pass.
#[derive(Debug, Clone)]
pub struct TranslationContext {
    vocab: Vocabulary,
    global_so_vars: BTreeSet<String>,
    fresh_counter: usize,
    used: BTreeSet<String>,
    fo_pool: Vec<String>,
}

impl TranslationContext {
    pub fn new(f: &Formula, vocab: &Vocabulary) -> Self {
        let mut global = f.free_so_vars();
        global.extend(f.bound_so_vars());
        let mut used = f.so_names();
        used.extend(vocab.iter().map(|s| s.name.clone()));
        let mut fo_pool = f.fo_names_in_order();
        let defaults = ["x", "y", "z", "u", "v", "w"].map(String::from);
        let numbered = (1..=8).map(|i| format!("x{i}"));
        for v in defaults.into_iter().chain(numbered) {
            if !fo_pool.contains(&v) {
                fo_pool.push(v);
            }
        }
        Self {
            vocab: vocab.clone(),
            global_so_vars: global,
            fresh_counter: 0,
            used,
            fo_pool,
        }
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Every second-order name of the input, free or bound.
    pub fn global_so_vars(&self) -> &BTreeSet<String> {
        &self.global_so_vars
    }

    /// Number of fresh symbols generated so far.
    pub fn fresh_counter(&self) -> usize {
        self.fresh_counter
    }

    fn fresh_pred(&mut self, candidate: &str, arity: usize) -> Result<String, TranslateError> {
        let name = fresh_variant(candidate, &mut self.used);
        self.vocab.declare(PredicateSymbol::new(&name, arity))?;
        self.fresh_counter += 1;
        Ok(name)
    }

    /// `k` first-order variable names, reusing the input's own names first.
    fn fo_vars(&self, k: usize) -> Vec<String> {
        let mut pool = self.fo_pool.clone();
        while pool.len() < k {
            pool.push(format!("x{}", pool.len() + 1));
        }
        pool.truncate(k);
        pool
    }

    fn finish(self, formula: Formula) -> Translated {
        Translated {
            formula,
            vocab: self.vocab,
        }
    }
}

fn forall_all(vars: &[String], body: Formula) -> Formula {
    vars.iter()
        .rev()
        .fold(body, |acc, v| Formula::forall(v, acc))
}

fn exists_so_all(binders: &[(String, usize)], body: Formula) -> Formula {
    binders
        .iter()
        .rev()
        .fold(body, |acc, (p, k)| Formula::exists_so(p, *k, acc))
}

fn forall_so_all(binders: &[(String, usize)], body: Formula) -> Formula {
    binders
        .iter()
        .rev()
        .fold(body, |acc, (p, k)| Formula::forall_so(p, *k, acc))
}

/// Relations in scope at some point of a pass, outermost first.
#[derive(Debug, Clone)]
struct Scope {
    /// `(name, arity, spatial)`; fixpoint binders are not spatial.
    entries: Vec<(String, usize, bool)>,
}

impl Scope {
    fn new(vocab: &Vocabulary) -> Self {
        Self {
            entries: vocab
                .iter()
                .map(|s| (s.name.clone(), s.arity, true))
                .collect(),
        }
    }

    fn lookup(&self, name: &str) -> Option<(usize, usize, bool)> {
        self.entries
            .iter()
            .rposition(|(n, _, _)| n == name)
            .map(|i| (i, self.entries[i].1, self.entries[i].2))
    }

    fn with<T>(
        &mut self,
        name: &str,
        arity: usize,
        spatial: bool,
        k: impl FnOnce(&mut Self) -> T,
    ) -> T {
        self.entries.push((name.to_owned(), arity, spatial));
        let out = k(self);
        self.entries.pop();
        out
    }

    /// The relations a spatial connective splits, in scope order: `on` (or
    /// every spatial relation in scope) restricted to those the operands
    /// mention. Splitting an unmentioned relation cannot affect either side.
    fn split_set(
        &self,
        on: Option<&PredicateSet>,
        left: &Formula,
        right: &Formula,
    ) -> Result<Vec<(String, usize)>, TranslateError> {
        let mut mentioned = left.free_so_vars();
        mentioned.extend(right.free_so_vars());
        let mut picked = Vec::new();
        match on {
            Some(sigma) => {
                for p in sigma.iter() {
                    let (pos, k, _) = self
                        .lookup(p)
                        .ok_or_else(|| TranslateError::Unbound(p.to_owned()))?;
                    if mentioned.contains(p) {
                        picked.push((pos, p.to_owned(), k));
                    }
                }
            }
            None => {
                for p in &mentioned {
                    if let Some((pos, k, true)) = self.lookup(p) {
                        picked.push((pos, p.clone(), k));
                    }
                }
            }
        }
        picked.sort();
        Ok(picked.into_iter().map(|(_, p, k)| (p, k)).collect())
    }
}

/// `∀x̄.((P(x̄) ↔ (A(x̄) ∨ B(x̄))) ∧ ¬(A(x̄) ∧ B(x̄)))`.
fn split_constraint(whole: &str, a: &str, b: &str, vars: &[String]) -> Formula {
    let at = |p: &str| Formula::atom(p, vars);
    forall_all(
        vars,
        Formula::and(
            Formula::iff(at(whole), Formula::or(at(a), at(b))),
            Formula::not(Formula::and(at(a), at(b))),
        ),
    )
}

struct SpatialToSol {
    cx: TranslationContext,
}

impl SpatialToSol {
    fn primed(
        &mut self,
        set: &[(String, usize)],
        marks: &str,
    ) -> Result<Vec<(String, usize)>, TranslateError> {
        set.iter()
            .map(|(p, k)| Ok((self.cx.fresh_pred(&format!("{p}{marks}"), *k)?, *k)))
            .collect()
    }

    fn rename_all(f: Formula, from: &[(String, usize)], to: &[(String, usize)]) -> Formula {
        from.iter().zip(to).fold(f, |acc, ((old, _), (new, _))| {
            rename_free_pred(&acc, old, new)
        })
    }

    fn go(&mut self, f: &Formula, scope: &mut Scope) -> Result<Formula, TranslateError> {
        Ok(match f {
            Formula::Sep { on, left, right } => {
                let set = scope.split_set(on.as_ref(), left, right)?;
                let first = self.primed(&set, "'")?;
                let second = self.primed(&set, "''")?;
                let l = Self::rename_all(self.go(left, scope)?, &set, &first);
                let r = Self::rename_all(self.go(right, scope)?, &set, &second);
                let mut parts: Vec<Formula> = set
                    .iter()
                    .zip(first.iter().zip(&second))
                    .map(|((p, k), ((a, _), (b, _)))| {
                        split_constraint(p, a, b, &self.cx.fo_vars(*k))
                    })
                    .collect();
                parts.push(l);
                parts.push(r);
                let binders: Vec<_> = first.into_iter().chain(second).collect();
                exists_so_all(&binders, Formula::conj(parts))
            }
            Formula::Wand(left, right) => {
                let set = scope.split_set(None, left, right)?;
                let ext = self.primed(&set, "'")?;
                let whole = self.primed(&set, "''")?;
                let l = Self::rename_all(self.go(left, scope)?, &set, &ext);
                let r = Self::rename_all(self.go(right, scope)?, &set, &whole);
                let mut parts: Vec<Formula> = set
                    .iter()
                    .zip(ext.iter().zip(&whole))
                    .map(|((p, k), ((a, _), (w, _)))| {
                        split_constraint(w, p, a, &self.cx.fo_vars(*k))
                    })
                    .collect();
                parts.push(l);
                let binders: Vec<_> = ext.into_iter().chain(whole).collect();
                forall_so_all(&binders, Formula::implies(Formula::conj(parts), r))
            }
            Formula::ExistsSo { pred, arity, body } => Formula::exists_so(
                pred,
                *arity,
                scope.with(pred, *arity, true, |s| self.go(body, s))?,
            ),
            Formula::ForallSo { pred, arity, body } => Formula::forall_so(
                pred,
                *arity,
                scope.with(pred, *arity, true, |s| self.go(body, s))?,
            ),
            Formula::Lfp {
                pred,
                params,
                body,
                args,
            } => Formula::lfp(
                pred,
                params,
                scope.with(pred, params.len(), false, |s| self.go(body, s))?,
                args,
            ),
            Formula::LetRec {
                pred,
                params,
                body,
                scope: g,
            } => Formula::letrec(
                pred,
                params,
                scope.with(pred, params.len(), false, |s| self.go(body, s))?,
                scope.with(pred, params.len(), false, |s| self.go(g, s))?,
            ),
            _ => {
                let mut err = None;
                let out = f.map_children(|c| match self.go(c, scope) {
                    Ok(g) => g,
                    Err(e) => {
                        err.get_or_insert(e);
                        Formula::True
                    }
                });
                if let Some(e) = err {
                    return Err(e);
                }
                out
            }
        })
    }
}

/// Eliminates `sep`, `sep-on` and `wand` in favour of second-order
/// quantifiers over fresh copies `P'`, `P''` of the split relations.
///
/// ```
/// use spatial_logic::{parse_formula, spatial_to_sol, Vocabulary};
/// let vocab = Vocabulary::of(&[("P", 1), ("Q", 1)]).unwrap();
/// let f = parse_formula("(sep (P x) (Q x))", &vocab).unwrap();
/// let out = spatial_to_sol(&f, &vocab).unwrap();
/// assert_eq!(
///     out.formula.to_string(),
///     "(exists2 P' (exists2 Q' (exists2 P'' (exists2 Q'' (and \
///      (forall x (and (iff (P x) (or (P' x) (P'' x))) (not (and (P' x) (P'' x))))) (and \
///      (forall x (and (iff (Q x) (or (Q' x) (Q'' x))) (not (and (Q' x) (Q'' x))))) (and \
///      (P' x) (Q'' x))))))))"
/// );
/// ```
pub fn spatial_to_sol(f: &Formula, vocab: &Vocabulary) -> Result<Translated, TranslateError> {
    check_declared(f, vocab)?;
    let mut pass = SpatialToSol {
        cx: TranslationContext::new(f, vocab),
    };
    let out = pass.go(f, &mut Scope::new(vocab))?;
    Ok(pass.cx.finish(out))
}

fn check_declared(f: &Formula, vocab: &Vocabulary) -> Result<(), TranslateError> {
    match f.free_so_vars().into_iter().find(|p| !vocab.contains(p)) {
        Some(p) => Err(TranslateError::Unbound(p)),
        None => Ok(()),
    }
}

fn reject(
    f: &Formula,
    pass: &'static str,
    bad: impl Fn(&Formula) -> Option<&'static str>,
) -> Result<(), TranslateError> {
    let mut found = None;
    f.visit(&mut |g| {
        if found.is_none() {
            found = bad(g);
        }
    });
    match found {
        Some(construct) => Err(TranslateError::Unsupported { pass, construct }),
        None => Ok(()),
    }
}

fn construct_name(f: &Formula) -> &'static str {
    match f {
        Formula::Sep { on: None, .. } => "sep",
        Formula::Sep { .. } => "sep-on",
        Formula::Wand(..) => "wand",
        Formula::Lfp { .. } => "lfp",
        Formula::LetRec { .. } => "letrec",
        Formula::CountExists { .. } => "exists-ge",
        Formula::ExistsExactly { .. } => "exists-exactly",
        _ => "this construct",
    }
}

struct SolToSpatial {
    cx: TranslationContext,
    /// `Some(σ)` when every bound predicate is unary: emit `sep-on σ`.
    unary_sigma: Option<PredicateSet>,
    /// Second-order names in vocabulary order, then binder order.
    v2: Vec<(String, usize)>,
}

impl SolToSpatial {
    fn sep(&self, left: Formula, right: Formula) -> Formula {
        match &self.unary_sigma {
            Some(sigma) => Formula::sep_on(sigma.clone(), left, right),
            None => Formula::sep(left, right),
        }
    }

    /// Every listed predicate is full (or empty, when `negate`), one `∀`
    /// block per arity.
    fn all_or_none(&self, preds: &[(String, usize)], negate: bool) -> Formula {
        let mut arities: Vec<usize> = preds.iter().map(|&(_, k)| k).collect();
        arities.sort_unstable();
        arities.dedup();
        Formula::conj(arities.into_iter().map(|k| {
            let vars = self.cx.fo_vars(k);
            let atoms = preds.iter().filter(|&&(_, a)| a == k).map(|(p, _)| {
                let a = Formula::atom(p, &vars);
                if negate {
                    Formula::not(a)
                } else {
                    a
                }
            });
            forall_all(&vars, Formula::conj(atoms))
        }))
    }

    fn nonebut(&self, pred: &str) -> Formula {
        let others: Vec<(String, usize)> = self
            .v2
            .iter()
            .filter(|(q, _)| q != pred)
            .filter(|(q, _)| self.unary_sigma.as_ref().is_none_or(|s| s.contains(q)))
            .cloned()
            .collect();
        self.all_or_none(&others, true)
    }

    fn go(&self, f: &Formula) -> Formula {
        match f {
            Formula::ExistsSo { pred, body, .. } => self.sep(self.nonebut(pred), self.go(body)),
            Formula::ForallSo { pred, body, .. } => {
                Formula::not(self.sep(self.nonebut(pred), self.go(&Formula::not((**body).clone()))))
            }
            _ => f.map_children(|c| self.go(c)),
        }
    }
}

/// Replaces second-order quantifiers by spatial conjunction: the result,
/// read over a structure where the bound predicates are full, agrees with
/// the input.
///
/// Binders are first renamed apart. When every bound predicate is unary the
/// emitted conjunctions split only the unary symbols.
///
/// ```
/// use spatial_logic::{parse_formula, sol_to_spatial, Vocabulary};
/// let vocab = Vocabulary::of(&[("P", 1)]).unwrap();
/// let f = parse_formula("(exists2 P (forall x (P x)))", &vocab).unwrap();
/// let out = sol_to_spatial(&f, &vocab).unwrap();
/// assert_eq!(
///     out.formula.to_string(),
///     "(and (forall x (P x)) (sep-on (P) true (forall x (P x))))"
/// );
/// ```
pub fn sol_to_spatial(f: &Formula, vocab: &Vocabulary) -> Result<Translated, TranslateError> {
    reject(f, "sol2sep", |g| match g {
        Formula::Sep { .. } | Formula::Wand(..) | Formula::Lfp { .. } | Formula::LetRec { .. } => {
            Some(construct_name(g))
        }
        _ => None,
    })?;
    check_declared(f, vocab)?;
    let f = rename_bound_so(f);
    let mut bound: Vec<(String, usize)> = Vec::new();
    f.visit(&mut |g| {
        if let Some((p, k)) = g.so_binder() {
            bound.push((p.to_owned(), k));
        }
    });
    if bound.is_empty() {
        return Ok(Translated {
            formula: f,
            vocab: vocab.clone(),
        });
    }
    let mut cx = TranslationContext::new(&f, vocab);
    for (p, k) in &bound {
        cx.vocab.ensure(PredicateSymbol::new(p, *k))?;
    }
    let free = f.free_so_vars();
    let mut v2: Vec<(String, usize)> = vocab
        .iter()
        .filter(|s| free.contains(&s.name))
        .map(|s| (s.name.clone(), s.arity))
        .collect();
    v2.extend(bound.iter().cloned());
    let unary_sigma = bound
        .iter()
        .all(|&(_, k)| k == 1)
        .then(|| cx.vocab.of_arity(1));
    let pass = SolToSpatial {
        cx,
        unary_sigma,
        v2,
    };
    let body = pass.go(&f);
    let formula = Formula::and(pass.all_or_none(&bound, false), body);
    Ok(pass.cx.finish(formula))
}

/// `e[P := U^{ar P}]` for every predicate bound in `f`: the structure on
/// which [`sol_to_spatial`]'s output is read.
pub fn saturate_bound(
    f: &Formula,
    e: &crate::structure::Structure,
    vocab: &Vocabulary,
) -> Result<crate::structure::Structure, crate::structure::StructureError> {
    let f = rename_bound_so(f);
    let mut e = e.reinterpret(vocab)?;
    let mut bound = Vec::new();
    f.visit(&mut |g| {
        if let Some((p, k)) = g.so_binder() {
            bound.push((p.to_owned(), k));
        }
    });
    for (p, k) in bound {
        e.set_relation(&p, crate::structure::Relation::full(e.size(), k)?)?;
    }
    Ok(e)
}

fn lfp_pass(f: &Formula, lfp_bound: &mut Vec<String>) -> Result<Formula, TranslateError> {
    match f {
        Formula::Lfp {
            pred,
            params,
            body,
            args,
        } => {
            if !check_positivity(body, pred) {
                return Err(TranslateError::Positivity(pred.clone()));
            }
            lfp_bound.push(pred.clone());
            let inner = lfp_pass(body, lfp_bound);
            lfp_bound.pop();
            let inner = inner?;
            let k = params.len();
            let fixed = forall_all(params, Formula::iff(inner, Formula::atom(pred, params)));
            Ok(Formula::forall_so(
                pred,
                k,
                Formula::implies(fixed, Formula::atom(pred, args)),
            ))
        }
        Formula::Sep { left, right, .. } | Formula::Wand(left, right)
            if lfp_bound
                .iter()
                .any(|p| left.free_so_vars().contains(p) || right.free_so_vars().contains(p)) =>
        {
            Err(TranslateError::Unsupported {
                pass: "lfp2sol",
                construct: "a spatial connective over a fixpoint predicate",
            })
        }
        Formula::ExistsSo { pred, .. } | Formula::ForallSo { pred, .. } => {
            // A second-order binder shadows a fixpoint predicate of the same name.
            let shadowed: Vec<String> = lfp_bound.iter().filter(|p| *p == pred).cloned().collect();
            lfp_bound.retain(|p| p != pred);
            let mut err = None;
            let out = f.map_children(|c| {
                lfp_pass(c, lfp_bound).unwrap_or_else(|e| {
                    err.get_or_insert(e);
                    Formula::True
                })
            });
            lfp_bound.extend(shadowed);
            err.map_or(Ok(out), Err)
        }
        _ => {
            let mut err = None;
            let out = f.map_children(|c| {
                lfp_pass(c, lfp_bound).unwrap_or_else(|e| {
                    err.get_or_insert(e);
                    Formula::True
                })
            });
            err.map_or(Ok(out), Err)
        }
    }
}

/// Replaces each `lfp P (x̄) F (ȳ)` by `∀P.((∀x̄.(F ↔ P(x̄))) → P(ȳ))`, after
/// expanding `letrec`.
///
/// ```
/// use spatial_logic::{lfp_to_sol, parse_formula, Vocabulary};
/// let vocab = Vocabulary::of(&[("R", 1)]).unwrap();
/// let f = parse_formula("(lfp R (x) (R x) (y))", &vocab).unwrap();
/// let out = lfp_to_sol(&f, &vocab).unwrap();
/// assert_eq!(
///     out.formula.to_string(),
///     "(forall2 R (implies (forall x (iff (R x) (R x))) (R y)))"
/// );
/// ```
pub fn lfp_to_sol(f: &Formula, vocab: &Vocabulary) -> Result<Translated, TranslateError> {
    let expanded = expand_letrec(f);
    let formula = lfp_pass(&expanded, &mut Vec::new())?;
    let mut vocab = vocab.clone();
    expanded.visit(&mut |g| {
        if let Formula::Lfp { pred, params, .. } = g {
            // Clashes are impossible: the parser checks lfp arities.
            let _ = vocab.ensure(PredicateSymbol::new(pred, params.len()));
        }
    });
    Ok(Translated { formula, vocab })
}

struct TwoVar {
    cx: TranslationContext,
}

const U: &str = "u";
const V: &str = "v";

impl TwoVar {
    fn singleton(p: &str) -> Formula {
        Formula::exists_exactly(1, U, Formula::atom(p, &[U]))
    }

    fn go(
        &mut self,
        f: &Formula,
        env: &mut Vec<(String, String)>,
    ) -> Result<Formula, TranslateError> {
        let lookup = |env: &[(String, String)], x: &str| {
            env.iter()
                .rev()
                .find(|(v, _)| v == x)
                .map(|(_, p)| p.clone())
                .expect("free variables are closed over first")
        };
        Ok(match f {
            Formula::Eq(x, y) => {
                let (px, py) = (lookup(env, x), lookup(env, y));
                Formula::forall(
                    U,
                    Formula::implies(Formula::atom(&px, &[U]), Formula::atom(&py, &[U])),
                )
            }
            Formula::Atom { pred, args } => match args.as_slice() {
                [] => f.clone(),
                [x] => {
                    let px = lookup(env, x);
                    Formula::forall(
                        U,
                        Formula::implies(Formula::atom(&px, &[U]), Formula::atom(pred, &[U])),
                    )
                }
                [x, y] => {
                    let (px, py) = (lookup(env, x), lookup(env, y));
                    Formula::forall(
                        U,
                        Formula::forall(
                            V,
                            Formula::implies(
                                Formula::and(Formula::atom(&px, &[U]), Formula::atom(&py, &[V])),
                                Formula::atom(pred, &[U, V]),
                            ),
                        ),
                    )
                }
                _ => return Err(TranslateError::ArityAboveTwo(pred.clone())),
            },
            Formula::Exists { var, body } | Formula::Forall { var, body } => {
                let p = self.cx.fresh_pred(&format!("P_{var}"), 1)?;
                env.push((var.clone(), p.clone()));
                let inner = self.go(body, env);
                env.pop();
                let inner = inner?;
                if matches!(f, Formula::Exists { .. }) {
                    Formula::exists_so(&p, 1, Formula::and(Self::singleton(&p), inner))
                } else {
                    Formula::forall_so(&p, 1, Formula::implies(Self::singleton(&p), inner))
                }
            }
            Formula::CountExists { .. }
            | Formula::ExistsExactly { .. }
            | Formula::Sep { .. }
            | Formula::Wand(..)
            | Formula::Lfp { .. }
            | Formula::LetRec { .. } => {
                return Err(TranslateError::Unsupported {
                    pass: "twovar",
                    construct: construct_name(f),
                })
            }
            _ => {
                let mut err = None;
                let out = f.map_children(|c| match self.go(c, env) {
                    Ok(g) => g,
                    Err(e) => {
                        err.get_or_insert(e);
                        Formula::True
                    }
                });
                if let Some(e) = err {
                    return Err(e);
                }
                out
            }
        })
    }
}

/// Encodes every first-order variable `x` as a singleton unary predicate
/// `P_x`, so that the result uses only the variables `u` and `v` and is
/// equisatisfiable with the input. Free variables are closed existentially.
///
/// ```
/// use spatial_logic::{parse_formula, reduce_to_two_vars, Vocabulary};
/// let vocab = Vocabulary::of(&[("P", 1)]).unwrap();
/// let f = parse_formula("(exists x (P x))", &vocab).unwrap();
/// let out = reduce_to_two_vars(&f, &vocab).unwrap();
/// assert_eq!(
///     out.formula.to_string(),
///     "(exists2 P_x (and (exists-exactly 1 u (P_x u)) (forall u (implies (P_x u) (P u)))))"
/// );
/// ```
pub fn reduce_to_two_vars(f: &Formula, vocab: &Vocabulary) -> Result<Translated, TranslateError> {
    if let Some(s) = vocab.iter().find(|s| s.arity > 2) {
        if f.predicate_uses().iter().any(|u| u.name == s.name) {
            return Err(TranslateError::ArityAboveTwo(s.name.clone()));
        }
    }
    let mut pass = TwoVar {
        cx: TranslationContext::new(f, vocab),
    };
    let free: Vec<String> = f
        .fo_names_in_order()
        .into_iter()
        .filter(|v| f.free_fo_vars().contains(v))
        .collect();
    let closed = free
        .iter()
        .rev()
        .fold(f.clone(), |acc, x| Formula::exists(x, acc));
    let formula = pass.go(&closed, &mut Vec::new())?;
    Ok(pass.cx.finish(formula))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn vocab() -> Vocabulary {
        Vocabulary::of(&[("P", 1), ("Q", 1), ("E", 2)]).unwrap()
    }

    fn p(s: &str) -> Formula {
        parse_formula(s, &vocab()).unwrap()
    }

    #[test]
    fn sep_free_formula_is_unchanged() {
        let f = p("(exists2 P (forall x (iff (P x) (not (Q x)))))");
        assert_eq!(spatial_to_sol(&f, &vocab()).unwrap().formula, f);
    }

    #[test]
    fn sep_on_primes_only_sigma() {
        let v = Vocabulary::of(&[("P", 1), ("E", 2)]).unwrap();
        let f = parse_formula(
            "(sep-on (P) (exists x (and (P x) (E x x))) (exists x (E x x)))",
            &v,
        )
        .unwrap();
        let out = spatial_to_sol(&f, &v).unwrap();
        let bound = out.formula.bound_so_vars();
        assert_eq!(bound, ["P'", "P''"].iter().map(|s| s.to_string()).collect());
        assert!(out.formula.to_string().contains("(E x x)"));
        assert_eq!(out.vocab.arity("P''"), Some(1));
    }

    #[test]
    fn wand_shape() {
        let out = spatial_to_sol(&p("(wand (P x) (Q x))"), &vocab()).unwrap();
        assert_eq!(
            out.formula.to_string(),
            "(forall2 P' (forall2 Q' (forall2 P'' (forall2 Q'' (implies (and \
             (forall x (and (iff (P'' x) (or (P x) (P' x))) (not (and (P x) (P' x))))) (and \
             (forall x (and (iff (Q'' x) (or (Q x) (Q' x))) (not (and (Q x) (Q' x))))) (P' x))) \
             (Q'' x))))))"
        );
    }

    #[test]
    fn nested_seps_get_suffixed_names() {
        let out = spatial_to_sol(&p("(sep (P x) (sep (P x) (P y)))"), &vocab()).unwrap();
        let bound = out.formula.bound_so_vars();
        for n in ["P'", "P''", "P'_1", "P''_1"] {
            assert!(bound.contains(n), "{n} in {bound:?}");
        }
    }

    #[test]
    fn sol_to_spatial_without_so_is_identity() {
        let f = p("(exists x (E x x))");
        assert_eq!(sol_to_spatial(&f, &vocab()).unwrap().formula, f);
    }

    #[test]
    fn sol_to_spatial_binary_uses_plain_sep() {
        let v = Vocabulary::of(&[("P", 1), ("R", 2)]).unwrap();
        let f = parse_formula("(exists2 R (exists x (and (P x) (R x x))))", &v).unwrap();
        let out = sol_to_spatial(&f, &v).unwrap();
        assert_eq!(
            out.formula.to_string(),
            "(and (forall x (forall y (R x y))) (sep (forall x (not (P x))) (exists x (and (P x) (R x x)))))"
        );
    }

    #[test]
    fn sol_to_spatial_forall_and_renaming() {
        let f = p("(and (P x) (forall2 P (exists2 Q (iff (P x) (Q x)))))");
        let out = sol_to_spatial(&f, &vocab()).unwrap();
        let s = out.formula.to_string();
        assert!(s.starts_with("(and (forall x (and (P_1 x) (Q x))) "), "{s}");
        assert!(
            s.contains("(not (sep-on (P P_1 Q) (forall x (and (not (P x)) (not (Q x))))"),
            "{s}"
        );
        assert!(!out.formula.has_so_quantifier());
    }

    #[test]
    fn sol_to_spatial_rejects_spatial_input() {
        assert!(matches!(
            sol_to_spatial(&p("(sep true true)"), &vocab()),
            Err(TranslateError::Unsupported { .. })
        ));
    }

    #[test]
    fn lfp_positivity_is_checked() {
        let v = Vocabulary::of(&[("R", 1)]).unwrap();
        let f = parse_formula("(lfp R (x) (not (R x)) (y))", &v).unwrap();
        assert_eq!(
            lfp_to_sol(&f, &v),
            Err(TranslateError::Positivity("R".into()))
        );
    }

    #[test]
    fn lfp_to_sol_removes_fixpoints() {
        let v = Vocabulary::of(&[("E", 2), ("T", 2)]).unwrap();
        let f = parse_formula(
            "(letrec T (x y) (or (E x y) (exists z (and (E x z) (T z y)))) (T a b))",
            &v,
        )
        .unwrap();
        let out = lfp_to_sol(&f, &v).unwrap();
        assert!(!out.formula.has_fixpoint());
        assert_eq!(
            out.formula.free_fo_vars(),
            ["a", "b"].iter().map(|s| s.to_string()).collect()
        );
    }

    #[test]
    fn two_var_atoms() {
        let f = p("(forall x (forall y (E x y)))");
        let out = reduce_to_two_vars(&f, &vocab()).unwrap();
        assert!(out
            .formula
            .to_string()
            .contains("(forall u (forall v (implies (and (P_x u) (P_y v)) (E u v))))"));
        assert!(out.formula.fo_names().iter().all(|v| v == "u" || v == "v"));

        let eq = reduce_to_two_vars(&p("(exists x (exists y (= x y)))"), &vocab()).unwrap();
        assert!(eq
            .formula
            .to_string()
            .contains("(forall u (implies (P_x u) (P_y u)))"));
    }

    #[test]
    fn two_var_closes_free_variables_and_renames() {
        let v = Vocabulary::of(&[("P_x", 1), ("P", 1)]).unwrap();
        let f = parse_formula("(and (P_x x) (P x))", &v).unwrap();
        let out = reduce_to_two_vars(&f, &v).unwrap();
        assert!(out.formula.to_string().starts_with("(exists2 P_x_1 "));
        assert!(out.formula.free_fo_vars().is_empty());
    }

    #[test]
    fn two_var_rejects() {
        assert!(reduce_to_two_vars(&p("(exists-ge 2 x (P x))"), &vocab()).is_err());
        let v = Vocabulary::of(&[("T", 3)]).unwrap();
        let f = parse_formula("(exists x (T x x x))", &v).unwrap();
        assert_eq!(
            reduce_to_two_vars(&f, &v),
            Err(TranslateError::ArityAboveTwo("T".into()))
        );
    }
}
