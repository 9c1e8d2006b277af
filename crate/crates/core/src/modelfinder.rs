//! Exhaustive bounded search over finite structures.
//!
//! Structures of a given size are numbered in lexicographic order of
//! `(first-order values, predicate bitmaps in vocabulary order)`, where a
//! bitmap is read as the integer whose bit `i` is the tuple of rank `i`.
//! Every search reports results in that order, so parallel runs agree with
//! sequential ones bit for bit.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::eval::{EvalBudget, EvalError, Prepared};
use crate::formula::Formula;
use crate::structure::{tuple_capacity, Relation, Structure, StructureError};
use crate::translate::TranslateError;
use crate::vocab::Vocabulary;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error("search budget exceeded after {0} structures")]
    Budget(u64),
    #[error("structures of size {0} over this vocabulary are too many to enumerate")]
    TooLarge(usize),
    #[error("the formula splits a relation of arity above one")]
    NotUnarySplit,
}

/// Limits for a bounded search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Structures evaluated, summed over all sizes.
    pub max_structures: u64,
    /// Applied to each single evaluation.
    pub eval: EvalBudget,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_structures: 10_000_000,
            eval: EvalBudget::default(),
        }
    }
}

/// The structures of one size, addressable by index.
#[derive(Debug, Clone)]
pub struct StructureSpace {
    vocab: Vocabulary,
    size: usize,
    free_vars: Vec<String>,
    /// Radix of each digit, most significant first: one per variable, then
    /// `2^{n^k}` per symbol.
    radices: Vec<u64>,
    len: u64,
}

impl StructureSpace {
    pub fn new(vocab: &Vocabulary, size: usize, free_vars: &[String]) -> Result<Self, SearchError> {
        if size == 0 {
            return Err(StructureError::EmptyUniverse.into());
        }
        let mut radices: Vec<u64> = free_vars.iter().map(|_| size as u64).collect();
        for s in vocab {
            let cap = tuple_capacity(size, s.arity)
                .filter(|&c| c < 64)
                .ok_or(SearchError::TooLarge(size))?;
            radices.push(1 << cap);
        }
        let len = radices
            .iter()
            .try_fold(1u64, |acc, &r| acc.checked_mul(r))
            .ok_or(SearchError::TooLarge(size))?;
        Ok(Self {
            vocab: vocab.clone(),
            size,
            free_vars: free_vars.to_vec(),
            radices,
            len,
        })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// The structure with the given index.
    pub fn get(&self, mut index: u64) -> Structure {
        assert!(index < self.len, "structure index out of range");
        let mut digits = vec![0u64; self.radices.len()];
        for (d, &r) in digits.iter_mut().zip(&self.radices).rev() {
            *d = index % r;
            index /= r;
        }
        let m = self.free_vars.len();
        let vars: BTreeMap<String, usize> = self
            .free_vars
            .iter()
            .zip(&digits)
            .map(|(x, &v)| (x.clone(), v as usize))
            .collect();
        let rels = self
            .vocab
            .iter()
            .zip(&digits[m..])
            .map(|(s, &mask)| Relation::from_mask(self.size, s.arity, mask))
            .collect();
        Structure::from_parts(self.size, self.vocab.clone(), vars, rels)
    }

    pub fn iter(&self) -> impl Iterator<Item = Structure> + '_ {
        (0..self.len).map(|i| self.get(i))
    }
}

/// All `n^{|freeVars|} · ∏ 2^{n^{ar P}}` structures of size `n`, in index order.
///
/// ```
/// use spatial_logic::{enumerate_structures, Vocabulary};
/// let p = Vocabulary::of(&[("P", 1)]).unwrap();
/// assert_eq!(enumerate_structures(&p, 2, &[]).unwrap().count(), 4);
/// assert_eq!(enumerate_structures(&p, 2, &["x".into()]).unwrap().count(), 8);
/// ```
pub fn enumerate_structures(
    vocab: &Vocabulary,
    n: usize,
    free_vars: &[String],
) -> Result<impl Iterator<Item = Structure>, SearchError> {
    let space = StructureSpace::new(vocab, n, free_vars)?;
    Ok((0..space.len()).map(move |i| space.get(i)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchStatus {
    Witness,
    Exhausted,
    Budget,
}

impl fmt::Display for SearchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchStatus::Witness => "WITNESS",
            SearchStatus::Exhausted => "EXHAUSTED",
            SearchStatus::Budget => "BUDGET",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub status: SearchStatus,
    pub witness: Option<Structure>,
    pub sizes_tried: Vec<usize>,
    /// Structures evaluated, including the witness.
    pub structures_checked: u64,
}

/// Bounded search with a fixed budget and worker count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Finder {
    pub budget: SearchBudget,
    /// Worker threads; 1 runs sequentially.
    pub jobs: usize,
}

impl Default for Finder {
    fn default() -> Self {
        Self {
            budget: SearchBudget::default(),
            jobs: 1,
        }
    }
}

/// Outcome of scanning a prefix of a space for the first hit.
enum Scan {
    Hit(u64),
    Miss,
}

impl Finder {
    pub fn new(budget: SearchBudget, jobs: usize) -> Self {
        Self {
            budget,
            jobs: jobs.max(1),
        }
    }

    fn run<T: Send>(&self, work: impl FnOnce() -> T + Send) -> T {
        if self.jobs <= 1 {
            return work();
        }
        match rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs)
            .build()
        {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        }
    }

    /// Least index below `limit` whose test is true or fails; errors win
    /// only if they come first in index order.
    fn first<E: Send>(
        &self,
        limit: u64,
        test: impl Fn(u64) -> Result<bool, E> + Sync,
    ) -> Result<Scan, (u64, E)> {
        let probe = |i: u64| match test(i) {
            Ok(true) => Some(Ok(i)),
            Ok(false) => None,
            Err(e) => Some(Err((i, e))),
        };
        let found = if self.jobs <= 1 {
            (0..limit).find_map(probe)
        } else {
            self.run(|| (0..limit).into_par_iter().find_map_first(probe))
        };
        match found {
            Some(Ok(i)) => Ok(Scan::Hit(i)),
            Some(Err(e)) => Err(e),
            None => Ok(Scan::Miss),
        }
    }

    /// First structure of size `1..=n_max` satisfying `f`.
    pub fn sat(
        &self,
        f: &Formula,
        vocab: &Vocabulary,
        n_max: usize,
    ) -> Result<SearchResult, SearchError> {
        let prepared = Prepared::new(f, vocab)?;
        let free = sorted_free_vars(&[f]);
        let mut result = SearchResult {
            status: SearchStatus::Exhausted,
            witness: None,
            sizes_tried: Vec::new(),
            structures_checked: 0,
        };
        for n in 1..=n_max {
            let space = StructureSpace::new(vocab, n, &free)?;
            result.sizes_tried.push(n);
            let remaining = self.budget.max_structures - result.structures_checked;
            let limit = space.len().min(remaining);
            let scan = self.first(limit, |i| prepared.eval(&space.get(i), self.budget.eval));
            match scan {
                Ok(Scan::Hit(i)) => {
                    result.structures_checked += i + 1;
                    result.status = SearchStatus::Witness;
                    result.witness = Some(space.get(i));
                    return Ok(result);
                }
                Ok(Scan::Miss) => {
                    result.structures_checked += limit;
                    if limit < space.len() {
                        result.status = SearchStatus::Budget;
                        return Ok(result);
                    }
                }
                Err((i, EvalError::Budget { .. })) => {
                    result.structures_checked += i + 1;
                    result.status = SearchStatus::Budget;
                    return Ok(result);
                }
                Err((_, e)) => return Err(e.into()),
            }
        }
        Ok(result)
    }

    /// First structure of size `1..=n_max` on which `f1` and `f2` differ.
    pub fn equiv(
        &self,
        f1: &Formula,
        f2: &Formula,
        vocab: &Vocabulary,
        n_max: usize,
    ) -> Result<Option<Structure>, SearchError> {
        let (p1, p2) = (Prepared::new(f1, vocab)?, Prepared::new(f2, vocab)?);
        let free = sorted_free_vars(&[f1, f2]);
        let mut checked = 0u64;
        for n in 1..=n_max {
            let space = StructureSpace::new(vocab, n, &free)?;
            let remaining = self.budget.max_structures - checked;
            let limit = space.len().min(remaining);
            let differs = |i: u64| -> Result<bool, EvalError> {
                let e = space.get(i);
                Ok(p1.eval(&e, self.budget.eval)? != p2.eval(&e, self.budget.eval)?)
            };
            match self.first(limit, differs) {
                Ok(Scan::Hit(i)) => return Ok(Some(space.get(i))),
                Ok(Scan::Miss) if limit < space.len() => {
                    return Err(SearchError::Budget(checked + limit))
                }
                Ok(Scan::Miss) => checked += limit,
                Err((_, e)) => return Err(e.into()),
            }
        }
        Ok(None)
    }

    /// Number of structures of size `n` satisfying `f`. Free first-order
    /// variables, if any, are counted as part of the structure.
    pub fn count(&self, f: &Formula, vocab: &Vocabulary, n: usize) -> Result<u64, SearchError> {
        let prepared = Prepared::new(f, vocab)?;
        let space = StructureSpace::new(vocab, n, &sorted_free_vars(&[f]))?;
        if space.len() > self.budget.max_structures {
            return Err(SearchError::Budget(self.budget.max_structures));
        }
        let one = |i: u64| {
            prepared
                .eval(&space.get(i), self.budget.eval)
                .map(u64::from)
        };
        let total: Result<u64, EvalError> = if self.jobs <= 1 {
            (0..space.len()).map(one).sum()
        } else {
            self.run(|| (0..space.len()).into_par_iter().map(one).sum())
        };
        Ok(total?)
    }
}

fn sorted_free_vars(fs: &[&Formula]) -> Vec<String> {
    let mut all = std::collections::BTreeSet::new();
    for f in fs {
        all.extend(f.free_fo_vars());
    }
    all.into_iter().collect()
}

/// [`Finder::sat`] with one worker.
///
/// ```
/// use spatial_logic::{parse_formula, sat_bounded, SearchBudget, SearchStatus, Vocabulary};
/// let vocab = Vocabulary::of(&[("P", 1)]).unwrap();
/// let two = parse_formula("(exists-ge 2 x (P x))", &vocab).unwrap();
/// assert_eq!(sat_bounded(&two, &vocab, 1, SearchBudget::default()).unwrap().status, SearchStatus::Exhausted);
/// let r = sat_bounded(&two, &vocab, 2, SearchBudget::default()).unwrap();
/// assert_eq!((r.status, r.structures_checked), (SearchStatus::Witness, 2 + 4));
/// ```
pub fn sat_bounded(
    f: &Formula,
    vocab: &Vocabulary,
    n_max: usize,
    budget: SearchBudget,
) -> Result<SearchResult, SearchError> {
    Finder::new(budget, 1).sat(f, vocab, n_max)
}

/// [`Finder::equiv`] with one worker.
pub fn equiv_bounded(
    f1: &Formula,
    f2: &Formula,
    vocab: &Vocabulary,
    n_max: usize,
    budget: SearchBudget,
) -> Result<Option<Structure>, SearchError> {
    Finder::new(budget, 1).equiv(f1, f2, vocab, n_max)
}

/// [`Finder::count`] with one worker.
pub fn count_models(
    f: &Formula,
    vocab: &Vocabulary,
    n: usize,
    budget: SearchBudget,
) -> Result<u64, SearchError> {
    Finder::new(budget, 1).count(f, vocab, n)
}
