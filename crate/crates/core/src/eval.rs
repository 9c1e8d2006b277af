//! Exact truth evaluation on finite structures.
//!
//! A formula is compiled once into a tree whose variables and relations are
//! addressed by slot, then evaluated by mutating a single slot vector in
//! place. Nested second-order existentials are evaluated as one block: each
//! conjunct of the matrix is checked as soon as the binders it mentions are
//! assigned, which prunes the search without changing the result.

use std::fmt;

use smallvec::SmallVec;
use thiserror::Error;

use crate::formula::{check_positivity, expand_letrec, Formula};
use crate::structure::{tuple_capacity, Relation, Structure};
use crate::vocab::{PredicateSet, Vocabulary};

/// Limits on the exponential enumerations performed by [`eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalBudget {
    /// Split pairs examined by spatial conjunctions.
    pub max_split_pairs: u64,
    /// Candidate relations tried by second-order quantifiers plus extensions
    /// tried by spatial implications.
    pub max_extension_structures: u64,
}

impl Default for EvalBudget {
    fn default() -> Self {
        Self {
            max_split_pairs: 10_000_000,
            max_extension_structures: 10_000_000,
        }
    }
}

impl EvalBudget {
    /// The same limit for both counters.
    pub fn uniform(limit: u64) -> Self {
        Self {
            max_split_pairs: limit,
            max_extension_structures: limit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetKind {
    SplitPairs,
    ExtensionStructures,
}

impl fmt::Display for BudgetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BudgetKind::SplitPairs => "split pairs",
            BudgetKind::ExtensionStructures => "extension structures",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("evaluation budget exceeded: more than {limit} {kind}")]
    Budget { kind: BudgetKind, limit: u64 },
    #[error("`{0}` is not interpreted by the structure")]
    Unbound(String),
    #[error("`{0}` occurs negatively in the body of its fixpoint")]
    Positivity(String),
    #[error("`{pred}` has arity {expected} but is applied to {found} arguments")]
    Arity {
        pred: String,
        expected: usize,
        found: usize,
    },
    #[error("the structure's vocabulary differs from the prepared one")]
    VocabularyMismatch,
    #[error("relations of arity {arity} over {size} elements are too large to enumerate")]
    TooLarge { size: usize, arity: usize },
}

type Slots = SmallVec<[usize; 4]>;

enum Node {
    Const(bool),
    Eq(usize, usize),
    Atom(usize, Slots),
    Not(Box<Node>),
    And(Vec<Node>),
    Or(Vec<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Exists(usize, Box<Node>),
    Forall(usize, Box<Node>),
    AtLeast(u32, usize, Box<Node>),
    Exactly(u32, usize, Box<Node>),
    SoBlock(Box<SoBlock>),
    Sep(Vec<usize>, Box<Node>, Box<Node>),
    Wand(Vec<usize>, Box<Node>, Box<Node>),
    Lfp(Box<LfpNode>),
}

/// `∃P1…∃Pm. C1 ∧ … ∧ Cj` with the binders in search order.
struct SoBlock {
    binders: Vec<(usize, usize)>,
    /// Conjuncts mentioning no binder.
    upfront: Vec<Node>,
    /// `checks[i]`: conjuncts whose last needed binder is `binders[i]`.
    checks: Vec<Vec<Node>>,
}

struct LfpNode {
    slot: usize,
    arity: usize,
    params: Slots,
    body: Node,
    args: Slots,
}

struct Compiler {
    var_scope: Vec<(String, usize)>,
    free_vars: Vec<(String, usize)>,
    var_count: usize,
    /// `(name, slot, spatial)`; fixpoint binders are not spatial.
    rel_scope: Vec<(String, usize, bool)>,
    rel_arity: Vec<usize>,
}

impl Compiler {
    fn new(vocab: &Vocabulary) -> Self {
        Self {
            var_scope: Vec::new(),
            free_vars: Vec::new(),
            var_count: 0,
            rel_scope: vocab
                .iter()
                .enumerate()
                .map(|(i, s)| (s.name.clone(), i, true))
                .collect(),
            rel_arity: vocab.iter().map(|s| s.arity).collect(),
        }
    }

    fn new_var(&mut self) -> usize {
        self.var_count += 1;
        self.var_count - 1
    }

    fn new_rel(&mut self, arity: usize) -> usize {
        self.rel_arity.push(arity);
        self.rel_arity.len() - 1
    }

    fn var(&mut self, name: &str) -> usize {
        if let Some(&(_, s)) = self.var_scope.iter().rev().find(|(n, _)| n == name) {
            return s;
        }
        if let Some(&(_, s)) = self.free_vars.iter().find(|(n, _)| n == name) {
            return s;
        }
        let s = self.new_var();
        self.free_vars.push((name.to_owned(), s));
        s
    }

    fn rel(&self, name: &str) -> Result<usize, EvalError> {
        self.rel_scope
            .iter()
            .rev()
            .find(|(n, _, _)| n == name)
            .map(|&(_, s, _)| s)
            .ok_or_else(|| EvalError::Unbound(name.to_owned()))
    }

    /// Slots split by a spatial connective: `on` (or every spatial relation
    /// in scope) restricted to the relations the operands mention, since the
    /// split of anything else cannot affect either side.
    fn split_slots(
        &self,
        on: Option<&PredicateSet>,
        left: &Formula,
        right: &Formula,
    ) -> Result<Vec<usize>, EvalError> {
        let mut mentioned = left.free_so_vars();
        mentioned.extend(right.free_so_vars());
        let mut slots = Vec::new();
        match on {
            Some(sigma) => {
                for p in sigma.iter() {
                    let s = self.rel(p)?;
                    if mentioned.contains(p) {
                        slots.push(s);
                    }
                }
            }
            None => {
                for p in &mentioned {
                    if let Some(&(_, s, true)) =
                        self.rel_scope.iter().rev().find(|(n, _, _)| n == p)
                    {
                        slots.push(s);
                    }
                }
            }
        }
        slots.sort_unstable();
        Ok(slots)
    }

    fn bound_var<T>(&mut self, name: &str, k: impl FnOnce(&mut Self, usize) -> T) -> T {
        let s = self.new_var();
        self.var_scope.push((name.to_owned(), s));
        let out = k(self, s);
        self.var_scope.pop();
        out
    }

    fn compile(&mut self, f: &Formula) -> Result<Node, EvalError> {
        use Formula as F;
        Ok(match f {
            F::True => Node::Const(true),
            F::False => Node::Const(false),
            F::Eq(x, y) => Node::Eq(self.var(x), self.var(y)),
            F::Atom { pred, args } => {
                let slot = self.rel(pred)?;
                let expected = self.rel_arity[slot];
                if expected != args.len() {
                    return Err(EvalError::Arity {
                        pred: pred.clone(),
                        expected,
                        found: args.len(),
                    });
                }
                Node::Atom(slot, args.iter().map(|a| self.var(a)).collect())
            }
            F::Not(a) => Node::Not(Box::new(self.compile(a)?)),
            F::And(..) => {
                let mut parts = Vec::new();
                collect_binary(f, &mut parts, |g| match g {
                    F::And(a, b) => Some((a, b)),
                    _ => None,
                });
                Node::And(
                    parts
                        .into_iter()
                        .map(|p| self.compile(p))
                        .collect::<Result<_, _>>()?,
                )
            }
            F::Or(..) => {
                let mut parts = Vec::new();
                collect_binary(f, &mut parts, |g| match g {
                    F::Or(a, b) => Some((a, b)),
                    _ => None,
                });
                Node::Or(
                    parts
                        .into_iter()
                        .map(|p| self.compile(p))
                        .collect::<Result<_, _>>()?,
                )
            }
            F::Implies(a, b) => {
                Node::Implies(Box::new(self.compile(a)?), Box::new(self.compile(b)?))
            }
            F::Iff(a, b) => Node::Iff(Box::new(self.compile(a)?), Box::new(self.compile(b)?)),
            F::Exists { var, body } => {
                self.bound_var(var, |c, s| Ok(Node::Exists(s, Box::new(c.compile(body)?))))?
            }
            F::Forall { var, body } => {
                self.bound_var(var, |c, s| Ok(Node::Forall(s, Box::new(c.compile(body)?))))?
            }
            F::CountExists {
                at_least,
                var,
                body,
            } => self.bound_var(var, |c, s| {
                Ok(Node::AtLeast(*at_least, s, Box::new(c.compile(body)?)))
            })?,
            F::ExistsExactly { count, var, body } => self.bound_var(var, |c, s| {
                Ok(Node::Exactly(*count, s, Box::new(c.compile(body)?)))
            })?,
            F::ExistsSo { .. } => self.so_block(f, false)?,
            F::ForallSo { .. } => Node::Not(Box::new(self.so_block(f, true)?)),
            F::Sep { on, left, right } => {
                let slots = self.split_slots(on.as_ref(), left, right)?;
                Node::Sep(
                    slots,
                    Box::new(self.compile(left)?),
                    Box::new(self.compile(right)?),
                )
            }
            F::Wand(left, right) => {
                let slots = self.split_slots(None, left, right)?;
                Node::Wand(
                    slots,
                    Box::new(self.compile(left)?),
                    Box::new(self.compile(right)?),
                )
            }
            F::Lfp {
                pred,
                params,
                body,
                args,
            } => {
                let args = args.iter().map(|a| self.var(a)).collect();
                Node::Lfp(Box::new(self.lfp(pred, params, body, args)?))
            }
            F::LetRec { .. } => self.compile(&expand_letrec(f))?,
        })
    }

    fn lfp(
        &mut self,
        pred: &str,
        params: &[String],
        body: &Formula,
        args: Slots,
    ) -> Result<LfpNode, EvalError> {
        if !check_positivity(body, pred) {
            return Err(EvalError::Positivity(pred.to_owned()));
        }
        let arity = params.len();
        let slot = self.new_rel(arity);
        self.rel_scope.push((pred.to_owned(), slot, false));
        let mut param_slots = Slots::new();
        for p in params {
            let s = self.new_var();
            self.var_scope.push((p.clone(), s));
            param_slots.push(s);
        }
        let body = self.compile(body);
        self.var_scope.truncate(self.var_scope.len() - params.len());
        self.rel_scope.pop();
        Ok(LfpNode {
            slot,
            arity,
            params: param_slots,
            body: body?,
            args,
        })
    }

    /// Compiles `f` (or `¬f` when `negated`) as a block of existential
    /// second-order binders over a flattened conjunction.
    fn so_block(&mut self, f: &Formula, negated: bool) -> Result<Node, EvalError> {
        let mut binders: Vec<(&str, usize)> = Vec::new();
        let (mut cur, mut neg) = (f, negated);
        loop {
            match (cur, neg) {
                (Formula::ExistsSo { pred, arity, body }, false)
                | (Formula::ForallSo { pred, arity, body }, true) => {
                    binders.push((pred, *arity));
                    cur = body;
                }
                (Formula::Not(inner), _) => {
                    neg = !neg;
                    cur = inner;
                }
                _ => break,
            }
        }
        let mut leaves = Vec::new();
        flatten_conjuncts(cur, neg, &mut leaves);

        let slots: Vec<usize> = binders.iter().map(|&(_, k)| self.new_rel(k)).collect();
        let deps: Vec<Vec<usize>> = leaves
            .iter()
            .map(|(leaf, _)| {
                let free = leaf.free_so_vars();
                let mut d: Vec<usize> = free
                    .iter()
                    .filter_map(|name| binders.iter().rposition(|(b, _)| b == name))
                    .collect();
                d.sort_unstable();
                d.dedup();
                d
            })
            .collect();

        for (&(name, _), &slot) in binders.iter().zip(&slots) {
            self.rel_scope.push((name.to_owned(), slot, true));
        }
        let compiled: Result<Vec<Node>, EvalError> = leaves
            .iter()
            .map(|(leaf, neg)| {
                let n = self.compile(leaf)?;
                Ok(if *neg { Node::Not(Box::new(n)) } else { n })
            })
            .collect();
        self.rel_scope
            .truncate(self.rel_scope.len() - binders.len());
        let compiled = compiled?;

        let order = search_order(&binders, &deps);
        let level_of = |b: usize| order.iter().position(|&o| o == b);
        let mut upfront = Vec::new();
        let mut checks: Vec<Vec<Node>> = order.iter().map(|_| Vec::new()).collect();
        for (node, d) in compiled.into_iter().zip(&deps) {
            match d.iter().filter_map(|&b| level_of(b)).max() {
                Some(level) => checks[level].push(node),
                None => upfront.push(node),
            }
        }
        Ok(Node::SoBlock(Box::new(SoBlock {
            binders: order.iter().map(|&b| (slots[b], binders[b].1)).collect(),
            upfront,
            checks,
        })))
    }
}

fn collect_binary<'a>(
    f: &'a Formula,
    out: &mut Vec<&'a Formula>,
    split: impl Fn(&'a Formula) -> Option<(&'a Formula, &'a Formula)> + Copy,
) {
    match split(f) {
        Some((a, b)) => {
            collect_binary(a, out, split);
            collect_binary(b, out, split);
        }
        None => out.push(f),
    }
}

/// Splits `f` (negated when `neg`) into conjuncts, seeing through `¬¬`,
/// `¬∨` and `¬→`.
fn flatten_conjuncts<'a>(f: &'a Formula, neg: bool, out: &mut Vec<(&'a Formula, bool)>) {
    match (f, neg) {
        (Formula::And(a, b), false) | (Formula::Or(a, b), true) => {
            flatten_conjuncts(a, neg, out);
            flatten_conjuncts(b, neg, out);
        }
        (Formula::Implies(a, b), true) => {
            flatten_conjuncts(a, false, out);
            flatten_conjuncts(b, true, out);
        }
        (Formula::Not(inner), _) => flatten_conjuncts(inner, !neg, out),
        (Formula::True, false) | (Formula::False, true) => {}
        _ => out.push((f, neg)),
    }
}

/// Greedy binder order: repeatedly take the binder that completes the most
/// conjuncts, breaking ties by how close it brings some conjunct to
/// completion, then by smaller arity, then by position. Binders no conjunct
/// mentions are left out: any value for them is as good as another.
fn search_order(binders: &[(&str, usize)], deps: &[Vec<usize>]) -> Vec<usize> {
    let mut used: Vec<bool> = vec![false; binders.len()];
    for d in deps {
        for &b in d {
            used[b] = true;
        }
    }
    let mut assigned = vec![false; binders.len()];
    let mut order = Vec::new();
    let remaining = |assigned: &[bool], d: &[usize]| d.iter().filter(|&&b| !assigned[b]).count();
    while order.len() < used.iter().filter(|&&u| u).count() {
        let best = (0..binders.len())
            .filter(|&b| used[b] && !assigned[b])
            .min_by_key(|&b| {
                let mut with = assigned.clone();
                with[b] = true;
                let done = deps
                    .iter()
                    .filter(|d| d.contains(&b) && remaining(&with, d) == 0)
                    .count();
                let closest = deps
                    .iter()
                    .filter(|d| d.contains(&b))
                    .map(|d| remaining(&with, d))
                    .min()
                    .unwrap_or(usize::MAX);
                (std::cmp::Reverse(done), closest, binders[b].1, b)
            })
            .expect("an unassigned used binder exists");
        assigned[best] = true;
        order.push(best);
    }
    order
}

/// A formula compiled against a fixed vocabulary, reusable across structures.
pub struct Prepared {
    vocab: Vocabulary,
    root: Node,
    free_vars: Vec<(String, usize)>,
    var_count: usize,
    rel_arity: Vec<usize>,
}

impl Prepared {
    pub fn new(f: &Formula, vocab: &Vocabulary) -> Result<Self, EvalError> {
        let mut c = Compiler::new(vocab);
        let root = c.compile(f)?;
        Ok(Self {
            vocab: vocab.clone(),
            root,
            free_vars: c.free_vars,
            var_count: c.var_count,
            rel_arity: c.rel_arity,
        })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Free first-order variables, in order of first occurrence.
    pub fn free_vars(&self) -> impl Iterator<Item = &str> {
        self.free_vars.iter().map(|(n, _)| n.as_str())
    }

    pub fn eval(&self, e: &Structure, budget: EvalBudget) -> Result<bool, EvalError> {
        let mut m = self.machine(e, budget)?;
        m.eval(&self.root)
    }

    fn machine(&self, e: &Structure, budget: EvalBudget) -> Result<Machine, EvalError> {
        if e.vocab() != &self.vocab {
            return Err(EvalError::VocabularyMismatch);
        }
        let n = e.size();
        let mut vars = vec![0; self.var_count];
        for (name, slot) in &self.free_vars {
            vars[*slot] = e
                .var(name)
                .ok_or_else(|| EvalError::Unbound(name.clone()))?;
        }
        let mut rels = e.rels().to_vec();
        for &k in &self.rel_arity[rels.len()..] {
            rels.push(
                Relation::empty(n, k).map_err(|_| EvalError::TooLarge { size: n, arity: k })?,
            );
        }
        Ok(Machine {
            n,
            vars,
            rels,
            budget,
            splits: 0,
            extensions: 0,
        })
    }
}

struct Machine {
    n: usize,
    vars: Vec<usize>,
    rels: Vec<Relation>,
    budget: EvalBudget,
    splits: u64,
    extensions: u64,
}

impl Machine {
    fn tick_split(&mut self) -> Result<(), EvalError> {
        self.splits += 1;
        if self.splits > self.budget.max_split_pairs {
            return Err(EvalError::Budget {
                kind: BudgetKind::SplitPairs,
                limit: self.budget.max_split_pairs,
            });
        }
        Ok(())
    }

    fn tick_extension(&mut self) -> Result<(), EvalError> {
        self.extensions += 1;
        if self.extensions > self.budget.max_extension_structures {
            return Err(self.extension_overflow());
        }
        Ok(())
    }

    fn extension_overflow(&self) -> EvalError {
        EvalError::Budget {
            kind: BudgetKind::ExtensionStructures,
            limit: self.budget.max_extension_structures,
        }
    }

    fn rank(&self, slots: &[usize]) -> usize {
        slots.iter().fold(0, |i, &s| i * self.n + self.vars[s])
    }

    fn unrank_into(&mut self, mut index: usize, slots: &[usize]) {
        for &s in slots.iter().rev() {
            self.vars[s] = index % self.n;
            index /= self.n;
        }
    }

    fn count(&mut self, slot: usize, body: &Node, stop_after: u32) -> Result<u32, EvalError> {
        let mut hits = 0;
        for v in 0..self.n {
            self.vars[slot] = v;
            if self.eval(body)? {
                hits += 1;
                if hits > stop_after {
                    break;
                }
            }
        }
        Ok(hits)
    }

    fn eval(&mut self, node: &Node) -> Result<bool, EvalError> {
        Ok(match node {
            Node::Const(b) => *b,
            Node::Eq(x, y) => self.vars[*x] == self.vars[*y],
            Node::Atom(r, args) => {
                let i = self.rank(args);
                self.rels[*r].contains_index(i)
            }
            Node::Not(a) => !self.eval(a)?,
            Node::And(parts) => {
                for p in parts {
                    if !self.eval(p)? {
                        return Ok(false);
                    }
                }
                true
            }
            Node::Or(parts) => {
                for p in parts {
                    if self.eval(p)? {
                        return Ok(true);
                    }
                }
                false
            }
            Node::Implies(a, b) => !self.eval(a)? || self.eval(b)?,
            Node::Iff(a, b) => self.eval(a)? == self.eval(b)?,
            Node::Exists(s, body) => {
                for v in 0..self.n {
                    self.vars[*s] = v;
                    if self.eval(body)? {
                        return Ok(true);
                    }
                }
                false
            }
            Node::Forall(s, body) => {
                for v in 0..self.n {
                    self.vars[*s] = v;
                    if !self.eval(body)? {
                        return Ok(false);
                    }
                }
                true
            }
            Node::AtLeast(c, s, body) => self.count(*s, body, *c)? >= *c,
            Node::Exactly(c, s, body) => self.count(*s, body, *c)? == *c,
            Node::SoBlock(block) => {
                for c in &block.upfront {
                    if !self.eval(c)? {
                        return Ok(false);
                    }
                }
                self.assign(block, 0)?
            }
            Node::Sep(slots, left, right) => self.sep(slots, left, right)?,
            Node::Wand(slots, left, right) => self.wand(slots, left, right)?,
            Node::Lfp(l) => {
                let r = self.fixpoint(l, |_| {})?;
                r.contains_index(self.rank(&l.args))
            }
        })
    }

    fn assign(&mut self, block: &SoBlock, level: usize) -> Result<bool, EvalError> {
        let Some(&(slot, arity)) = block.binders.get(level) else {
            return Ok(true);
        };
        let cap = tuple_capacity(self.n, arity)
            .filter(|&c| c < 64)
            .ok_or_else(|| self.extension_overflow())?;
        'candidates: for mask in 0..1u64 << cap {
            self.tick_extension()?;
            self.rels[slot].set_mask(mask);
            for c in &block.checks[level] {
                if !self.eval(c)? {
                    continue 'candidates;
                }
            }
            if self.assign(block, level + 1)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn sep(&mut self, slots: &[usize], left: &Node, right: &Node) -> Result<bool, EvalError> {
        let saved: Vec<Relation> = slots.iter().map(|&s| self.rels[s].clone()).collect();
        let tuples: Vec<(usize, usize)> = saved
            .iter()
            .enumerate()
            .flat_map(|(k, r)| r.indices().map(move |i| (k, i)))
            .collect();
        if tuples.len() >= 64 {
            return Err(EvalError::Budget {
                kind: BudgetKind::SplitPairs,
                limit: self.budget.max_split_pairs,
            });
        }
        let mut found = false;
        for mask in 0..1u64 << tuples.len() {
            self.tick_split()?;
            for &s in slots {
                self.rels[s].clear();
            }
            for (bit, &(k, i)) in tuples.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    self.rels[slots[k]].insert_index(i);
                }
            }
            if !self.eval(left)? {
                continue;
            }
            for (k, &s) in slots.iter().enumerate() {
                self.rels[s] = saved[k].difference(&self.rels[s]);
            }
            if self.eval(right)? {
                found = true;
                break;
            }
        }
        for (k, &s) in slots.iter().enumerate() {
            self.rels[s] = saved[k].clone();
        }
        Ok(found)
    }

    fn wand(&mut self, slots: &[usize], left: &Node, right: &Node) -> Result<bool, EvalError> {
        let saved: Vec<Relation> = slots.iter().map(|&s| self.rels[s].clone()).collect();
        let free: Vec<(usize, usize)> = saved
            .iter()
            .enumerate()
            .flat_map(|(k, r)| {
                r.complement()
                    .indices()
                    .collect::<Vec<_>>()
                    .into_iter()
                    .map(move |i| (k, i))
            })
            .collect();
        if free.len() >= 64 {
            return Err(self.extension_overflow());
        }
        let mut holds = true;
        for mask in 0..1u64 << free.len() {
            self.tick_extension()?;
            for &s in slots {
                self.rels[s].clear();
            }
            for (bit, &(k, i)) in free.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    self.rels[slots[k]].insert_index(i);
                }
            }
            if !self.eval(left)? {
                continue;
            }
            for (k, &s) in slots.iter().enumerate() {
                self.rels[s] = saved[k].union(&self.rels[s]);
            }
            if !self.eval(right)? {
                holds = false;
                break;
            }
        }
        for (k, &s) in slots.iter().enumerate() {
            self.rels[s] = saved[k].clone();
        }
        Ok(holds)
    }

    /// Iterates the body's operator from the empty relation; `stage` sees
    /// every approximation, the final one included.
    fn fixpoint(
        &mut self,
        l: &LfpNode,
        mut stage: impl FnMut(&Relation),
    ) -> Result<Relation, EvalError> {
        let saved_params: Vec<usize> = l.params.iter().map(|&s| self.vars[s]).collect();
        let empty = Relation::empty(self.n, l.arity).map_err(|_| EvalError::TooLarge {
            size: self.n,
            arity: l.arity,
        })?;
        let mut current = empty.clone();
        stage(&current);
        loop {
            self.rels[l.slot] = current.clone();
            let mut next = empty.clone();
            for i in 0..current.capacity() {
                self.unrank_into(i, &l.params);
                if self.eval(&l.body)? {
                    next.insert_index(i);
                }
            }
            if next == current {
                break;
            }
            current = next;
            stage(&current);
        }
        for (&s, v) in l.params.iter().zip(saved_params) {
            self.vars[s] = v;
        }
        Ok(current)
    }
}

/// `⟦F⟧e`.
///
/// ```
/// use spatial_logic::{eval, parse_formula, parse_structure, EvalBudget};
/// let e = parse_structure("(structure (size 2) (sig (E 2)) (rel E (0 1) (1 0)))").unwrap();
/// let one = "(and (exists x (exists y (E x y))) (and (not (exists-ge 2 x (exists y (E x y)))) \
///            (forall x (not (exists-ge 2 y (E x y))))))";
/// let f = parse_formula(&format!("(sep {one} {one})"), e.vocab()).unwrap();
/// assert!(eval(&f, &e, EvalBudget::default()).unwrap());
/// ```
pub fn eval(f: &Formula, e: &Structure, budget: EvalBudget) -> Result<bool, EvalError> {
    Prepared::new(f, e.vocab())?.eval(e, budget)
}

fn prepare_lfp(
    pred: &str,
    params: &[String],
    body: &Formula,
    e: &Structure,
    budget: EvalBudget,
) -> Result<(LfpNode, Machine), EvalError> {
    let body = expand_letrec(body);
    let mut c = Compiler::new(e.vocab());
    let node = c.lfp(pred, params, &body, Slots::new())?;
    let prepared = Prepared {
        vocab: e.vocab().clone(),
        root: Node::Const(true),
        free_vars: c.free_vars,
        var_count: c.var_count,
        rel_arity: c.rel_arity,
    };
    let machine = prepared.machine(e, budget)?;
    Ok((node, machine))
}

/// The least fixpoint of `r ↦ {v̄ | ⟦body⟧e[pred := r, params := v̄]}`.
///
/// ```
/// use spatial_logic::{eval_lfp, parse_formula, parse_structure, EvalBudget, Vocabulary};
/// let e = parse_structure("(structure (size 3) (sig (E 2)) (rel E (0 1) (1 2)))").unwrap();
/// let vocab = Vocabulary::of(&[("E", 2), ("T", 2)]).unwrap();
/// let body = parse_formula("(or (E x y) (exists z (and (E x z) (T z y))))", &vocab).unwrap();
/// let tc = eval_lfp("T", &["x".into(), "y".into()], &body, &e, EvalBudget::default()).unwrap();
/// assert_eq!(tc.tuples().collect::<Vec<_>>(), [[0, 1], [0, 2], [1, 2]]);
/// ```
pub fn eval_lfp(
    pred: &str,
    params: &[String],
    body: &Formula,
    e: &Structure,
    budget: EvalBudget,
) -> Result<Relation, EvalError> {
    let (node, mut m) = prepare_lfp(pred, params, body, e, budget)?;
    m.fixpoint(&node, |_| {})
}

/// Every approximation `∅ = r0 ⊆ r1 ⊆ …` up to and including the fixpoint.
pub fn eval_lfp_chain(
    pred: &str,
    params: &[String],
    body: &Formula,
    e: &Structure,
    budget: EvalBudget,
) -> Result<Vec<Relation>, EvalError> {
    let (node, mut m) = prepare_lfp(pred, params, body, e, budget)?;
    let mut chain = Vec::new();
    m.fixpoint(&node, |r| chain.push(r.clone()))?;
    Ok(chain)
}
