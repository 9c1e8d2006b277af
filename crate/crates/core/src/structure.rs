//! Finite relational structures over the universe `{0, …, n-1}`.
//!
//! A [`Structure`] merges the model with the first-order assignment: it maps
//! variables to elements and predicate symbols to relations.

use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;
use thiserror::Error;

use crate::syntax::{read_sexps, read_signature, ParseError, Pos, Sexp};
use crate::vocab::{PredicateSet, PredicateSymbol, Vocabulary};

/// Relations over more tuples than this are rejected.
pub const MAX_TUPLES: usize = 1 << 24;

/// Splits over more tuples than this cannot be enumerated.
pub const MAX_SPLIT_TUPLES: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("element {element} is outside the universe of size {size}")]
    OutOfRange { element: usize, size: usize },
    #[error("`{name}` has arity {expected}, got a tuple or relation of arity {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("relation `{0}` lists a tuple twice")]
    DuplicateTuple(String),
    #[error("predicate `{0}` is not in the structure's vocabulary")]
    UnknownPredicate(String),
    #[error("universe size must be at least 1")]
    EmptyUniverse,
    #[error("relation of arity {arity} over {size} elements is too large")]
    TooLarge { size: usize, arity: usize },
    #[error("forest checks need arity at most 2, `{0}` has a larger arity")]
    ArityAboveTwo(String),
    #[error("relation built over universe {found} used in a structure of size {expected}")]
    UniverseMismatch { expected: usize, found: usize },
}

pub(crate) fn tuple_capacity(size: usize, arity: usize) -> Option<usize> {
    let arity = u32::try_from(arity).ok()?;
    size.checked_pow(arity).filter(|&c| c <= MAX_TUPLES)
}

/// A set of `k`-tuples over `{0, …, n-1}`, stored as a bitmap indexed by the
/// lexicographic rank of each tuple.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    universe: usize,
    arity: usize,
    bits: SmallVec<[u64; 2]>,
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.tuples()).finish()
    }
}

impl Relation {
    pub fn empty(universe: usize, arity: usize) -> Result<Self, StructureError> {
        let cap = tuple_capacity(universe, arity).ok_or(StructureError::TooLarge {
            size: universe,
            arity,
        })?;
        Ok(Self {
            universe,
            arity,
            bits: SmallVec::from_elem(0, cap.div_ceil(64)),
        })
    }

    /// `U^k`, all `n^k` tuples.
    pub fn full(universe: usize, arity: usize) -> Result<Self, StructureError> {
        let mut r = Self::empty(universe, arity)?;
        for i in 0..r.capacity() {
            r.insert_index(i);
        }
        Ok(r)
    }

    pub fn from_tuples<T, I>(
        universe: usize,
        arity: usize,
        tuples: I,
    ) -> Result<Self, StructureError>
    where
        T: AsRef<[usize]>,
        I: IntoIterator<Item = T>,
    {
        let mut r = Self::empty(universe, arity)?;
        for t in tuples {
            r.insert(t.as_ref())?;
        }
        Ok(r)
    }

    /// The relation whose tuple of rank `i` is present iff bit `i` of `mask` is set.
    pub(crate) fn from_mask(universe: usize, arity: usize, mask: u64) -> Self {
        let mut r = Self::empty(universe, arity).expect("mask relations are small");
        if let Some(w) = r.bits.first_mut() {
            *w = mask;
        }
        r
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// `n^k`, the number of possible tuples.
    pub fn capacity(&self) -> usize {
        self.universe.pow(self.arity as u32)
    }

    pub fn rank(&self, tuple: &[usize]) -> Result<usize, StructureError> {
        if tuple.len() != self.arity {
            return Err(StructureError::Arity {
                name: String::from("<relation>"),
                expected: self.arity,
                found: tuple.len(),
            });
        }
        let mut i = 0;
        for &v in tuple {
            if v >= self.universe {
                return Err(StructureError::OutOfRange {
                    element: v,
                    size: self.universe,
                });
            }
            i = i * self.universe + v;
        }
        Ok(i)
    }

    pub fn unrank(&self, mut index: usize) -> Vec<usize> {
        let mut t = vec![0; self.arity];
        for slot in t.iter_mut().rev() {
            *slot = index % self.universe;
            index /= self.universe;
        }
        t
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.rank(tuple).is_ok_and(|i| self.contains_index(i))
    }

    #[inline]
    pub fn contains_index(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn insert_index(&mut self, i: usize) {
        self.bits[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub(crate) fn remove_index(&mut self, i: usize) {
        self.bits[i / 64] &= !(1 << (i % 64));
    }

    /// Replaces the contents with the tuples selected by `mask` (capacity ≤ 64).
    #[inline]
    pub(crate) fn set_mask(&mut self, mask: u64) {
        self.bits[0] = mask;
    }

    pub(crate) fn clear(&mut self) {
        self.bits.fill(0);
    }

    /// Inserts a tuple; returns whether it was new.
    pub fn insert(&mut self, tuple: &[usize]) -> Result<bool, StructureError> {
        let i = self.rank(tuple)?;
        let fresh = !self.contains_index(i);
        self.insert_index(i);
        Ok(fresh)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Ranks of present tuples, ascending.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + b)
            })
        })
    }

    /// Present tuples in lexicographic order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.indices().map(|i| self.unrank(i))
    }

    fn zip_with(&self, other: &Relation, op: impl Fn(u64, u64) -> u64) -> Relation {
        debug_assert_eq!((self.universe, self.arity), (other.universe, other.arity));
        Relation {
            universe: self.universe,
            arity: self.arity,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        }
    }

    pub fn union(&self, other: &Relation) -> Relation {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Relation) -> Relation {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Relation) -> Relation {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.bits
            .iter()
            .zip(&other.bits)
            .all(|(&a, &b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Relation) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| a & b == 0)
    }

    /// `U^k ∖ self`.
    pub fn complement(&self) -> Relation {
        let full = Relation::full(self.universe, self.arity).expect("same size as self");
        full.difference(self)
    }
}

/// The full relation `U^k` over `{0, …, n-1}`.
///
/// ```
/// use spatial_logic::full_relation;
/// assert_eq!(full_relation(2, 2).len(), 4);
/// assert_eq!(full_relation(3, 0).tuples().collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
/// ```
pub fn full_relation(n: usize, k: usize) -> Relation {
    Relation::full(n, k).expect("full_relation: relation too large")
}

/// A finite relational structure `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    size: usize,
    vocab: Vocabulary,
    vars: BTreeMap<String, usize>,
    rels: Vec<Relation>,
}

impl Structure {
    /// The structure of size `n` interpreting every symbol as the empty relation.
    pub fn new(vocab: &Vocabulary, size: usize) -> Result<Self, StructureError> {
        if size == 0 {
            return Err(StructureError::EmptyUniverse);
        }
        let rels = vocab
            .iter()
            .map(|s| Relation::empty(size, s.arity))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            size,
            vocab: vocab.clone(),
            vars: BTreeMap::new(),
            rels,
        })
    }

    pub(crate) fn from_parts(
        size: usize,
        vocab: Vocabulary,
        vars: BTreeMap<String, usize>,
        rels: Vec<Relation>,
    ) -> Self {
        Self {
            size,
            vocab,
            vars,
            rels,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn var(&self, x: &str) -> Option<usize> {
        self.vars.get(x).copied()
    }

    pub fn vars(&self) -> &BTreeMap<String, usize> {
        &self.vars
    }

    pub fn relation(&self, pred: &str) -> Option<&Relation> {
        self.vocab.position(pred).map(|i| &self.rels[i])
    }

    /// `(symbol, relation)` pairs in vocabulary order.
    pub fn relations(&self) -> impl Iterator<Item = (&PredicateSymbol, &Relation)> {
        self.vocab.iter().zip(&self.rels)
    }

    pub fn set_var(&mut self, x: &str, v: usize) -> Result<(), StructureError> {
        if v >= self.size {
            return Err(StructureError::OutOfRange {
                element: v,
                size: self.size,
            });
        }
        self.vars.insert(x.to_owned(), v);
        Ok(())
    }

    /// Replaces (or adds) the interpretation of `pred`.
    pub fn set_relation(&mut self, pred: &str, r: Relation) -> Result<(), StructureError> {
        if r.universe() != self.size {
            return Err(StructureError::UniverseMismatch {
                expected: self.size,
                found: r.universe(),
            });
        }
        match self.vocab.position(pred) {
            Some(i) => {
                let expected = self.vocab.symbols()[i].arity;
                if expected != r.arity() {
                    return Err(StructureError::Arity {
                        name: pred.to_owned(),
                        expected,
                        found: r.arity(),
                    });
                }
                self.rels[i] = r;
            }
            None => {
                self.vocab
                    .declare(PredicateSymbol::new(pred, r.arity()))
                    .map_err(|_| StructureError::UnknownPredicate(pred.to_owned()))?;
                self.rels.push(r);
            }
        }
        Ok(())
    }

    /// `e[x := v]`.
    pub fn update_var(&self, x: &str, v: usize) -> Result<Structure, StructureError> {
        let mut e = self.clone();
        e.set_var(x, v)?;
        Ok(e)
    }

    /// `e[P := r]`.
    pub fn update_pred(&self, pred: &str, r: Relation) -> Result<Structure, StructureError> {
        let mut e = self.clone();
        e.set_relation(pred, r)?;
        Ok(e)
    }

    pub(crate) fn rels(&self) -> &[Relation] {
        &self.rels
    }

    /// The same structure seen through a different vocabulary: shared symbols
    /// keep their relation, new ones are empty, missing ones are dropped.
    pub fn reinterpret(&self, vocab: &Vocabulary) -> Result<Structure, StructureError> {
        let mut e = Structure::new(vocab, self.size)?;
        e.vars = self.vars.clone();
        for (i, s) in vocab.iter().enumerate() {
            if let Some(r) = self.relation(&s.name) {
                if r.arity() != s.arity {
                    return Err(StructureError::Arity {
                        name: s.name.clone(),
                        expected: s.arity,
                        found: r.arity(),
                    });
                }
                e.rels[i] = r.clone();
            }
        }
        Ok(e)
    }
}

/// A pair `(e1, e2)` with `split_σ(e)(e1, e2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPair {
    pub left: Structure,
    pub right: Structure,
}

/// Iterator over all `σ`-splits of a structure.
pub struct Splits<'a> {
    parent: &'a Structure,
    /// `(relation position, tuple rank)` for each splittable tuple.
    slots: Vec<(usize, usize)>,
    next: u64,
    end: u64,
}

impl Iterator for Splits<'_> {
    type Item = SplitPair;

    fn next(&mut self) -> Option<SplitPair> {
        if self.next >= self.end {
            return None;
        }
        let mask = self.next;
        self.next += 1;
        let mut left = self.parent.clone();
        let mut right = self.parent.clone();
        let mut cleared = vec![false; self.parent.rels.len()];
        for &(rel, _) in &self.slots {
            if !cleared[rel] {
                left.rels[rel] = Relation::empty(self.parent.size, self.parent.rels[rel].arity())
                    .expect("same shape as parent");
                cleared[rel] = true;
            }
        }
        for (bit, &(rel, idx)) in self.slots.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                left.rels[rel].insert_index(idx);
                right.rels[rel].remove_index(idx);
            }
        }
        Some(SplitPair { left, right })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

/// Enumerates every `SplitPair` of `e` over `σ`.
///
/// The splittable tuples are those of the `σ` relations, taken in vocabulary
/// order and lexicographically within a relation; bit `j` of a binary
/// counter sends tuple `j` to the left component. Relations outside `σ` and
/// the first-order assignment are copied to both components.
pub fn enumerate_splits<'a>(
    e: &'a Structure,
    sigma: &PredicateSet,
) -> Result<Splits<'a>, StructureError> {
    for p in sigma.iter() {
        if !e.vocab.contains(p) {
            return Err(StructureError::UnknownPredicate(p.to_owned()));
        }
    }
    let slots: Vec<(usize, usize)> = e
        .vocab
        .iter()
        .enumerate()
        .filter(|(_, s)| sigma.contains(&s.name))
        .flat_map(|(i, _)| e.rels[i].indices().map(move |t| (i, t)))
        .collect();
    if slots.len() > MAX_SPLIT_TUPLES {
        return Err(StructureError::TooLarge {
            size: e.size,
            arity: e.vocab.max_arity(),
        });
    }
    Ok(Splits {
        parent: e,
        end: 1u64 << slots.len(),
        slots,
        next: 0,
    })
}

/// Whether the label-erased digraph (union of all binary relations) is acyclic
/// with in-degree at most one. Unary and nullary relations are ignored;
/// self-loops are cycles.
pub fn is_forest(e: &Structure) -> Result<bool, StructureError> {
    if let Some(s) = e.vocab.iter().find(|s| s.arity > 2) {
        return Err(StructureError::ArityAboveTwo(s.name.clone()));
    }
    let n = e.size;
    let mut parent: Vec<Option<usize>> = vec![None; n];
    for (s, r) in e.relations() {
        if s.arity != 2 {
            continue;
        }
        for idx in r.indices() {
            let (src, dst) = (idx / n, idx % n);
            match parent[dst] {
                Some(p) if p != src => return Ok(false),
                _ => parent[dst] = Some(src),
            }
        }
    }
    // In-degree ≤ 1: a cycle exists iff walking parents from some node revisits it.
    let mut state = vec![0u8; n]; // 0 unvisited, 1 on current walk, 2 done
    for start in 0..n {
        let mut path = Vec::new();
        let mut cur = Some(start);
        while let Some(v) = cur {
            match state[v] {
                2 => break,
                1 => return Ok(false),
                _ => {
                    state[v] = 1;
                    path.push(v);
                    cur = parent[v];
                }
            }
        }
        for v in path {
            state[v] = 2;
        }
    }
    Ok(true)
}

fn malformed(pos: Pos, msg: impl Into<String>) -> StructureError {
    StructureError::Parse(ParseError::syntax(pos, msg))
}

fn number(s: &Sexp) -> Result<usize, StructureError> {
    s.symbol()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| malformed(s.pos(), "expected a non-negative integer"))
}

/// Parses `(structure (size N) (sig …) (assign (x v) …)? (rel P (t…) …)…)`.
///
/// A declared symbol without a `rel` clause is empty; repeated tuples are
/// rejected.
pub fn parse_structure(text: &str) -> Result<Structure, StructureError> {
    let sexps = read_sexps(text)?;
    let [top] = sexps.as_slice() else {
        return Err(malformed(
            Pos { line: 1, col: 1 },
            "expected a single `(structure …)` form",
        ));
    };
    if top.head() != Some("structure") {
        return Err(malformed(top.pos(), "expected `(structure …)`"));
    }
    let clauses = &top.list().unwrap()[1..];
    let mut size = None;
    let mut vocab = None;
    let mut assigns = Vec::new();
    let mut rels = Vec::new();
    for c in clauses {
        match c.head() {
            Some("size") => {
                let items = c.list().unwrap();
                if items.len() != 2 || size.is_some() {
                    return Err(malformed(c.pos(), "expected one `(size N)`"));
                }
                size = Some(number(&items[1])?);
            }
            Some("sig") => {
                if vocab.is_some() {
                    return Err(malformed(c.pos(), "duplicate `sig`"));
                }
                vocab = Some(read_signature(c)?);
            }
            Some("assign") => assigns.push(c),
            Some("rel") => rels.push(c),
            _ => return Err(malformed(c.pos(), "unknown structure clause")),
        }
    }
    let size = size.ok_or_else(|| malformed(top.pos(), "missing `(size N)`"))?;
    let vocab = vocab.unwrap_or_default();
    let mut e = Structure::new(&vocab, size)?;
    for a in assigns {
        for pair in &a.list().unwrap()[1..] {
            let items = pair.list().filter(|i| i.len() == 2);
            let Some([x, v]) = items else {
                return Err(malformed(pair.pos(), "expected `(var element)`"));
            };
            let x = x
                .symbol()
                .ok_or_else(|| malformed(x.pos(), "expected a variable"))?;
            if e.vars.contains_key(x) {
                return Err(malformed(
                    pair.pos(),
                    format!("variable `{x}` assigned twice"),
                ));
            }
            e.set_var(x, number(v)?)?;
        }
    }
    let mut seen = Vec::new();
    for r in rels {
        let items = r.list().unwrap();
        let name = items
            .get(1)
            .and_then(Sexp::symbol)
            .ok_or_else(|| malformed(r.pos(), "expected `(rel Name tuple…)`"))?;
        let idx = vocab
            .position(name)
            .ok_or_else(|| StructureError::UnknownPredicate(name.to_owned()))?;
        if seen.contains(&idx) {
            return Err(malformed(r.pos(), format!("relation `{name}` given twice")));
        }
        seen.push(idx);
        let arity = vocab.symbols()[idx].arity;
        let mut rel = Relation::empty(size, arity)?;
        for t in &items[2..] {
            let tuple = t
                .list()
                .ok_or_else(|| malformed(t.pos(), "expected a tuple"))?
                .iter()
                .map(number)
                .collect::<Result<Vec<_>, _>>()?;
            if tuple.len() != arity {
                return Err(StructureError::Arity {
                    name: name.to_owned(),
                    expected: arity,
                    found: tuple.len(),
                });
            }
            if !rel.insert(&tuple)? {
                return Err(StructureError::DuplicateTuple(name.to_owned()));
            }
        }
        e.rels[idx] = rel;
    }
    Ok(e)
}

/// Canonical structure text; `parse_structure` inverts it.
pub fn print_structure(e: &Structure) -> String {
    let mut out = format!(
        "(structure (size {}) {}",
        e.size,
        crate::syntax::print_signature(&e.vocab)
    );
    if !e.vars.is_empty() {
        out.push_str(" (assign");
        for (x, v) in &e.vars {
            out.push_str(&format!(" ({x} {v})"));
        }
        out.push(')');
    }
    for (s, r) in e.relations() {
        out.push_str(&format!(" (rel {}", s.name));
        for t in r.tuples() {
            let parts: Vec<String> = t.iter().map(usize::to_string).collect();
            out.push_str(&format!(" ({})", parts.join(" ")));
        }
        out.push(')');
    }
    out.push(')');
    out
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_structure(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Structure {
        let vocab = Vocabulary::of(&[("E", 2)]).unwrap();
        let mut e = Structure::new(&vocab, n).unwrap();
        let r = Relation::from_tuples(n, 2, edges.iter().map(|&(a, b)| [a, b])).unwrap();
        e.set_relation("E", r).unwrap();
        e
    }

    #[test]
    fn updates_are_functional() {
        let vocab = Vocabulary::of(&[("P", 1), ("Q", 1)]).unwrap();
        let mut e = Structure::new(&vocab, 2).unwrap();
        e.set_relation("Q", Relation::full(2, 1).unwrap()).unwrap();
        let e2 = e.update_var("x", 0).unwrap();
        assert_eq!(e2.var("x"), Some(0));
        assert_eq!(e.var("x"), None);
        let e3 = e.update_pred("P", Relation::empty(2, 1).unwrap()).unwrap();
        assert!(e3.relation("P").unwrap().is_empty());
        assert_eq!(e3.relation("Q"), e.relation("Q"));
        assert!(matches!(
            e.update_var("x", 2),
            Err(StructureError::OutOfRange { .. })
        ));
        assert!(matches!(
            e.update_pred("P", Relation::empty(2, 2).unwrap()),
            Err(StructureError::Arity { .. })
        ));
    }

    #[test]
    fn full_relation_sizes() {
        assert_eq!(full_relation(2, 1).tuples().collect::<Vec<_>>(), [[0], [1]]);
        assert_eq!(full_relation(2, 2).len(), 4);
        assert_eq!(full_relation(3, 0).len(), 1);
    }

    #[test]
    fn split_counts() {
        let vocab = Vocabulary::of(&[("P", 1)]).unwrap();
        let e = Structure::new(&vocab, 2).unwrap();
        let sigma: PredicateSet = ["P"].into_iter().collect();
        let splits: Vec<_> = enumerate_splits(&e, &sigma).unwrap().collect();
        assert_eq!(splits.len(), 1);
        assert!(splits[0].left.relation("P").unwrap().is_empty());

        let g = graph(2, &[(0, 1), (1, 0)]);
        let sigma: PredicateSet = ["E"].into_iter().collect();
        assert_eq!(enumerate_splits(&g, &sigma).unwrap().count(), 4);

        let splits: Vec<_> = enumerate_splits(&g, &PredicateSet::new())
            .unwrap()
            .collect();
        assert_eq!(
            splits,
            vec![SplitPair {
                left: g.clone(),
                right: g.clone()
            }]
        );
    }

    #[test]
    fn splits_preserve_assignment_and_unsplit_relations() {
        let vocab = Vocabulary::of(&[("P", 1), ("E", 2)]).unwrap();
        let mut e = Structure::new(&vocab, 2).unwrap();
        e.set_var("x", 1).unwrap();
        e.set_relation("P", Relation::full(2, 1).unwrap()).unwrap();
        e.set_relation("E", Relation::from_tuples(2, 2, [[0, 1]]).unwrap())
            .unwrap();
        let sigma: PredicateSet = ["P"].into_iter().collect();
        for s in enumerate_splits(&e, &sigma).unwrap() {
            assert_eq!(s.left.var("x"), Some(1));
            assert_eq!(s.right.vars(), e.vars());
            assert_eq!(s.left.relation("E"), e.relation("E"));
            assert_eq!(s.right.relation("E"), e.relation("E"));
        }
    }

    #[test]
    fn unknown_sigma_member() {
        let e = graph(1, &[]);
        let sigma: PredicateSet = ["Q"].into_iter().collect();
        assert!(enumerate_splits(&e, &sigma).is_err());
    }

    #[test]
    fn forest_examples() {
        assert!(is_forest(&graph(3, &[])).unwrap());
        assert!(!is_forest(&graph(2, &[(0, 1), (1, 0)])).unwrap());
        assert!(!is_forest(&graph(1, &[(0, 0)])).unwrap());
        assert!(is_forest(&graph(3, &[(0, 1), (0, 2)])).unwrap());
        assert!(!is_forest(&graph(3, &[(0, 1), (1, 2), (2, 0)])).unwrap());

        let vocab = Vocabulary::of(&[("P", 2), ("Q", 2)]).unwrap();
        let mut e = Structure::new(&vocab, 3).unwrap();
        e.set_relation("P", Relation::from_tuples(3, 2, [[0, 2]]).unwrap())
            .unwrap();
        e.set_relation("Q", Relation::from_tuples(3, 2, [[1, 2]]).unwrap())
            .unwrap();
        assert!(!is_forest(&e).unwrap());

        let ternary = Vocabulary::of(&[("T", 3)]).unwrap();
        assert!(is_forest(&Structure::new(&ternary, 1).unwrap()).is_err());
    }

    #[test]
    fn forest_ignores_unary_content() {
        let vocab = Vocabulary::of(&[("P", 1), ("E", 2)]).unwrap();
        let mut e = Structure::new(&vocab, 2).unwrap();
        e.set_relation("E", Relation::from_tuples(2, 2, [[0, 1]]).unwrap())
            .unwrap();
        let before = is_forest(&e).unwrap();
        e.set_relation("P", Relation::full(2, 1).unwrap()).unwrap();
        assert_eq!(is_forest(&e).unwrap(), before);
    }

    #[test]
    fn parse_structure_examples() {
        let e = parse_structure("(structure (size 1) (sig (P 1)) (rel P))").unwrap();
        assert_eq!(e.size(), 1);
        assert!(e.relation("P").unwrap().is_empty());

        let e = parse_structure("(structure (size 2) (sig (E 2)) (assign (x 0)) (rel E (0 1)))")
            .unwrap();
        assert_eq!(e.var("x"), Some(0));
        assert_eq!(
            e.relation("E").unwrap().tuples().collect::<Vec<_>>(),
            [[0, 1]]
        );
        assert_eq!(
            print_structure(&e),
            "(structure (size 2) (sig (E 2)) (assign (x 0)) (rel E (0 1)))"
        );

        let omitted = parse_structure("(structure (size 2) (sig (P 1) (Z 0)) (rel Z ()))").unwrap();
        assert!(omitted.relation("P").unwrap().is_empty());
        assert_eq!(omitted.relation("Z").unwrap().len(), 1);
        assert_eq!(
            parse_structure(&print_structure(&omitted)).unwrap(),
            omitted
        );
    }

    #[test]
    fn parse_structure_errors() {
        let cases = [
            "(structure (size 2) (sig (E 2)) (rel E (0 1) (0 1)))",
            "(structure (size 2) (sig (E 2)) (rel E (0 2)))",
            "(structure (size 2) (sig (E 2)) (rel E (0)))",
            "(structure (size 2) (sig (E 2)) (rel F (0 1)))",
            "(structure (sig (E 2)))",
            "(structure (size 0))",
            "(structure (size 1) (assign (x 1)))",
            "(structure (size 1) (bogus))",
            "(model (size 1))",
        ];
        for c in cases {
            assert!(parse_structure(c).is_err(), "{c}");
        }
    }
}
