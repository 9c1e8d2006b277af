//! Predicate symbols, vocabularies and predicate sets.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabError {
    #[error("predicate name must be nonempty")]
    EmptyName,
    #[error("predicate `{0}` must start with an uppercase letter")]
    BadName(String),
    #[error("predicate `{0}` declared twice")]
    Duplicate(String),
    #[error("predicate `{name}` declared with arity {declared}, used with arity {used}")]
    ArityConflict {
        name: String,
        declared: usize,
        used: usize,
    },
    #[error("predicate `{0}` is not declared")]
    Undeclared(String),
}

/// A relational symbol `P` together with its arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredicateSymbol {
    pub name: String,
    pub arity: usize,
}

impl PredicateSymbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Self {
            name: name.into(),
            arity,
        }
    }
}

impl fmt::Display for PredicateSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

pub(crate) fn is_predicate_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// A finite signature of predicate symbols.
///
/// Iteration follows declaration order; every ordering-sensitive operation in
/// the crate (split enumeration, structure enumeration, fresh copies for
/// `sep`) derives its order from here.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    symbols: Vec<PredicateSymbol>,
    index: HashMap<String, usize>,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Eq for Vocabulary {}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_symbols<I>(symbols: I) -> Result<Self, VocabError>
    where
        I: IntoIterator<Item = PredicateSymbol>,
    {
        let mut vocab = Self::new();
        for symbol in symbols {
            vocab.declare(symbol)?;
        }
        Ok(vocab)
    }

    /// Builds a vocabulary from `(name, arity)` pairs.
    ///
    /// ```
    /// use spatial_logic::Vocabulary;
    /// let vocab = Vocabulary::of(&[("P", 1), ("E", 2)]).unwrap();
    /// assert_eq!(vocab.arity("E"), Some(2));
    /// assert_eq!(vocab.max_arity(), 2);
    /// ```
    pub fn of(pairs: &[(&str, usize)]) -> Result<Self, VocabError> {
        Self::from_symbols(pairs.iter().map(|&(n, k)| PredicateSymbol::new(n, k)))
    }

    pub fn declare(&mut self, symbol: PredicateSymbol) -> Result<(), VocabError> {
        if symbol.name.is_empty() {
            return Err(VocabError::EmptyName);
        }
        if !is_predicate_name(&symbol.name) {
            return Err(VocabError::BadName(symbol.name));
        }
        if self.index.contains_key(&symbol.name) {
            return Err(VocabError::Duplicate(symbol.name));
        }
        self.index.insert(symbol.name.clone(), self.symbols.len());
        self.symbols.push(symbol);
        Ok(())
    }

    /// Declares `symbol` unless an identical declaration already exists.
    pub fn ensure(&mut self, symbol: PredicateSymbol) -> Result<(), VocabError> {
        match self.arity(&symbol.name) {
            Some(k) if k == symbol.arity => Ok(()),
            Some(k) => Err(VocabError::ArityConflict {
                name: symbol.name,
                declared: k,
                used: symbol.arity,
            }),
            None => self.declare(symbol),
        }
    }

    /// Adds every symbol of `other` not present here; arities must agree.
    pub fn merge(&mut self, other: &Vocabulary) -> Result<(), VocabError> {
        for symbol in other.iter() {
            self.ensure(symbol.clone())?;
        }
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&PredicateSymbol> {
        self.index.get(name).map(|&i| &self.symbols[i])
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.get(name).map(|s| s.arity)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PredicateSymbol> {
        self.symbols.iter()
    }

    pub fn symbols(&self) -> &[PredicateSymbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// The maximal arity `C`; zero for an empty vocabulary.
    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|s| s.arity).max().unwrap_or(0)
    }

    /// Symbols of exactly arity `k`, in declaration order.
    pub fn of_arity(&self, k: usize) -> PredicateSet {
        self.symbols
            .iter()
            .filter(|s| s.arity == k)
            .map(|s| s.name.clone())
            .collect()
    }

    /// All symbol names as a predicate set.
    pub fn all(&self) -> PredicateSet {
        self.symbols.iter().map(|s| s.name.clone()).collect()
    }

    /// Keeps only the symbols whose names satisfy `keep`, preserving order.
    pub fn restrict(&self, mut keep: impl FnMut(&str) -> bool) -> Vocabulary {
        let mut out = Vocabulary::new();
        for s in &self.symbols {
            if keep(&s.name) {
                out.index.insert(s.name.clone(), out.symbols.len());
                out.symbols.push(s.clone());
            }
        }
        out
    }
}

impl<'a> IntoIterator for &'a Vocabulary {
    type Item = &'a PredicateSymbol;
    type IntoIter = std::slice::Iter<'a, PredicateSymbol>;

    fn into_iter(self) -> Self::IntoIter {
        self.symbols.iter()
    }
}

/// A subset `σ` of the vocabulary, used to parameterize `sep-on`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredicateSet(BTreeSet<String>);

impl PredicateSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>) -> bool {
        self.0.insert(name.into())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks `σ ⊆ Σ`.
    pub fn check_within(&self, vocab: &Vocabulary) -> Result<(), VocabError> {
        match self.0.iter().find(|n| !vocab.contains(n)) {
            Some(n) => Err(VocabError::Undeclared(n.clone())),
            None => Ok(()),
        }
    }
}

impl<S: Into<String>> FromIterator<S> for PredicateSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self(iter.into_iter().map(Into::into).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_names_are_rejected() {
        let err = Vocabulary::of(&[("P", 1), ("P", 2)]).unwrap_err();
        assert_eq!(err, VocabError::Duplicate("P".into()));
    }

    #[test]
    fn names_must_be_uppercase_led() {
        assert!(matches!(
            Vocabulary::of(&[("p", 1)]),
            Err(VocabError::BadName(_))
        ));
        assert!(Vocabulary::of(&[("P'_1", 1)]).is_ok());
    }

    #[test]
    fn declaration_order_is_kept() {
        let v = Vocabulary::of(&[("Q", 1), ("E", 2), ("P", 1)]).unwrap();
        let names: Vec<_> = v.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["Q", "E", "P"]);
        assert_eq!(v.of_arity(1).iter().collect::<Vec<_>>(), ["P", "Q"]);
        let r = v.restrict(|n| n != "E");
        assert_eq!(r.position("P"), Some(1));
    }

    #[test]
    fn ensure_detects_arity_conflicts() {
        let mut v = Vocabulary::of(&[("P", 1)]).unwrap();
        assert!(v.ensure(PredicateSymbol::new("P", 1)).is_ok());
        assert!(matches!(
            v.ensure(PredicateSymbol::new("P", 2)),
            Err(VocabError::ArityConflict { .. })
        ));
    }

    #[test]
    fn predicate_set_subset_check() {
        let v = Vocabulary::of(&[("P", 1)]).unwrap();
        let ok: PredicateSet = ["P"].into_iter().collect();
        let bad: PredicateSet = ["P", "Q"].into_iter().collect();
        assert!(ok.check_within(&v).is_ok());
        assert_eq!(
            bad.check_within(&v),
            Err(VocabError::Undeclared("Q".into()))
        );
    }
}
