//! Formula collections exercised by the self-test and the integration tests.

use crate::formula::Formula;
use crate::syntax::parse_formula;
use crate::vocab::Vocabulary;

/// A named list of formulas over a common vocabulary.
#[derive(Debug, Clone, Copy)]
pub struct Corpus {
    pub name: &'static str,
    /// Symbols interpreted by structures.
    pub base: &'static [(&'static str, usize)],
    /// Extra names the formulas bind (second-order or fixpoint predicates).
    pub bound: &'static [(&'static str, usize)],
    pub formulas: &'static [&'static str],
}

impl Corpus {
    pub fn base_vocab(&self) -> Vocabulary {
        Vocabulary::of(self.base).expect("corpus vocabulary")
    }

    /// Base symbols plus bound names, as needed for parsing.
    pub fn parse_vocab(&self) -> Vocabulary {
        let mut v = self.base_vocab();
        v.merge(&Vocabulary::of(self.bound).expect("corpus vocabulary"))
            .expect("corpus vocabulary");
        v
    }

    pub fn parsed(&self) -> Vec<(&'static str, Formula)> {
        let v = self.parse_vocab();
        self.formulas
            .iter()
            .map(|src| {
                (
                    *src,
                    parse_formula(src, &v).unwrap_or_else(|e| panic!("{src}: {e}")),
                )
            })
            .collect()
    }

    /// The formula as a standalone file: signature of the used base symbols,
    /// then the formula.
    pub fn document(&self, src: &str) -> String {
        let sig: Vec<String> = self
            .base
            .iter()
            .map(|(p, k)| format!("({p} {k})"))
            .collect();
        format!("(sig {})\n{src}\n", sig.join(" "))
    }
}

const PQE: &[(&str, usize)] = &[("P", 1), ("Q", 1), ("E", 2)];
const PQ: &[(&str, usize)] = &[("P", 1), ("Q", 1)];
const PE: &[(&str, usize)] = &[("P", 1), ("E", 2)];

/// Spatial conjunction, its unary-restricted form and spatial implication.
pub const SPATIAL: Corpus = Corpus {
    name: "spatial",
    base: PQE,
    bound: &[],
    formulas: &[
        "(sep (exists x (P x)) (exists x (P x)))",
        "(sep (forall x (P x)) (forall x (not (P x))))",
        "(sep (exists-exactly 1 x (P x)) (exists-exactly 1 x (P x)))",
        "(sep (exists x (exists y (E x y))) (exists x (exists y (E x y))))",
        "(sep (exists x (exists y (and (E x y) (forall u (forall v (implies (E u v) (and (= u x) (= v y)))))))) \
              (exists x (exists y (and (E x y) (forall u (forall v (implies (E u v) (and (= u x) (= v y)))))))))",
        "(sep-on (P) (exists x (P x)) (exists x (and (P x) (Q x))))",
        "(sep-on (P Q) (forall x (iff (P x) (Q x))) (exists x (P x)))",
        "(sep-on (Q) (forall x (implies (Q x) (P x))) (not (exists x (Q x))))",
        "(wand (exists x (P x)) (exists-ge 2 x (P x)))",
        "(wand (forall x (not (Q x))) (forall x (P x)))",
        "(wand (exists x (exists y (E x y))) (exists x (E x x)))",
        "(not (sep (not (exists x (P x))) (not (exists x (Q x)))))",
        "(exists x (sep (P x) (exists y (and (P y) (not (= x y))))))",
        "(forall x (implies (P x) (sep (P x) (not (P x)))))",
        "(sep (sep (exists x (P x)) (exists x (Q x))) (exists x (E x x)))",
        "(sep true (forall x (not (E x x))))",
        "(sep false (exists x (P x)))",
        "(sep-on (P) (wand (exists x (P x)) (forall x (P x))) true)",
        "(wand (sep (exists x (P x)) (exists x (P x))) (exists-ge 2 x (P x)))",
        "(exists x (wand (P x) (exists y (and (P y) (E x y)))))",
        "(sep (forall x (forall y (implies (E x y) (P x)))) (exists x (exists y (E x y))))",
        "(implies (sep (exists x (Q x)) true) (exists x (Q x)))",
        "(sep-on (P Q) (exists x (and (P x) (Q x))) (exists x (or (P x) (Q x))))",
        "(exists x (exists y (sep (E x y) (E y x))))",
        "(forall x (sep-on (P) (or (P x) (Q x)) (exists-ge 1 y (P y))))",
        "(sep (exists-ge 2 x (exists y (E x y))) true)",
        "(wand (forall x (Q x)) (sep (forall x (Q x)) (exists x (Q x))))",
        "(sep (iff (exists x (P x)) (exists x (Q x))) (not (exists x (P x))))",
        "(not (wand (exists x (P x)) false))",
        "(sep-on (P) (exists x (P x)) (wand (exists x (P x)) (exists-ge 2 x (P x))))",
        "(exists x (sep-on (Q) (Q x) (exists y (and (Q y) (E x y)))))",
        "(sep (exists x (E x x)) (exists x (and (P x) (E x x))))",
    ],
};

/// Second-order sentences over unary symbols.
pub const SECOND_ORDER: Corpus = Corpus {
    name: "second-order",
    base: PQ,
    bound: &[("R", 1), ("S", 1), ("T", 2)],
    formulas: &[
        "(exists2 R (forall x (iff (R x) (P x))))",
        "(exists2 R (and (exists x (R x)) (forall x (implies (R x) (P x)))))",
        "(forall2 R (implies (forall x (implies (P x) (R x))) (exists x (R x))))",
        "(exists2 R (exists2 S (forall x (and (iff (R x) (not (S x))) (implies (P x) (R x))))))",
        "(forall2 R (or (exists x (R x)) (forall x (not (R x)))))",
        "(exists2 R (exists-exactly 1 x (and (R x) (Q x))))",
        "(exists2 T (forall x (exists-exactly 1 y (T x y))))",
        "(exists2 T (and (forall x (not (T x x))) (forall x (exists y (T x y)))))",
        "(forall2 T (implies (forall x (forall y (T x y))) (exists x (T x x))))",
        "(exists x (exists2 R (and (R x) (not (P x)))))",
        "(forall x (exists2 R (iff (R x) (Q x))))",
        "(not (exists2 R (and (exists x (R x)) (not (exists x (R x))))))",
        "(exists2 R (forall x (iff (R x) (and (P x) (Q x)))))",
        "(exists2 R (and (forall x (implies (R x) (P x))) (exists-ge 2 x (R x))))",
        "(forall2 R (forall2 S (implies (forall x (iff (R x) (S x))) (forall x (implies (R x) (S x))))))",
        "(exists2 R (forall2 S (implies (forall x (implies (S x) (R x))) (forall x (implies (S x) (P x))))))",
        "(exists2 T (forall x (forall y (iff (T x y) (and (P x) (Q y))))))",
        "(exists2 R (and (exists x (R x)) (exists x (not (R x)))))",
        "(forall2 R (exists x (iff (R x) (P x))))",
        "(exists2 R (exists2 S (and (exists x (and (R x) (S x))) (forall x (implies (S x) (Q x))))))",
        "(and (exists x (P x)) (exists2 R (forall x (iff (R x) (not (P x))))))",
        "(exists2 T (exists x (exists y (and (T x y) (not (T y x))))))",
    ],
};

/// Least fixpoints; the first formula is transitive closure.
pub const FIXPOINT: Corpus = Corpus {
    name: "fixpoint",
    base: PE,
    bound: &[("R", 1), ("T", 2)],
    formulas: &[
        "(lfp T (u v) (or (E u v) (exists w (and (E u w) (T w v)))) (x y))",
        "(lfp R (u) (or (P u) (exists w (and (E w u) (R w)))) (x))",
        "(exists x (lfp R (u) (or (P u) (exists w (and (E u w) (R w)))) (x)))",
        "(forall x (lfp R (u) (or (P u) (not (P u))) (x)))",
        "(lfp R (u) (and (P u) (R u)) (x))",
        "(forall x (implies (P x) (lfp R (u) (or (P u) (exists w (and (E w u) (R w)))) (x))))",
        "(lfp T (u v) (or (= u v) (exists w (and (T u w) (E w v)))) (x y))",
        "(exists x (lfp T (u v) (or (E u v) (exists w (and (T u w) (T w v)))) (x x)))",
        "(letrec R (u) (or (P u) (exists w (and (E u w) (R w)))) (forall x (R x)))",
        "(lfp R (u) (forall w (implies (E w u) (R w))) (x))",
        "(not (lfp R (u) (exists w (and (E u w) (R w))) (x)))",
        "(letrec T (u v) (or (E u v) (exists w (and (E u w) (T w v)))) (forall x (not (T x x))))",
        "(exists x (and (P x) (lfp R (u) (or (exists w (and (E w u) (P w))) (exists w (and (E w u) (R w)))) (x))))",
    ],
};

/// `(F1, F2, F3)` triples for the adjunction between `⊛` and `−⊛`.
pub const ADJUNCTION_VOCAB: &[(&str, usize)] = PQ;
pub const ADJUNCTION: &[(&str, &str, &str)] = &[
    (
        "(exists x (P x))",
        "(exists x (P x))",
        "(exists-ge 2 x (P x))",
    ),
    ("(forall x (P x))", "true", "(forall x (P x))"),
    (
        "(exists x (Q x))",
        "(exists x (P x))",
        "(exists x (and (P x) (Q x)))",
    ),
    ("true", "(exists x (P x))", "(exists x (P x))"),
    (
        "(not (exists x (P x)))",
        "(forall x (Q x))",
        "(forall x (Q x))",
    ),
    (
        "(forall x (and (not (P x)) (not (Q x))))",
        "(exists x (P x))",
        "(exists x (P x))",
    ),
    (
        "(exists x (P x))",
        "(exists x (Q x))",
        "(exists x (or (P x) (Q x)))",
    ),
    (
        "(exists-exactly 1 x (P x))",
        "(exists-exactly 1 x (P x))",
        "(exists-exactly 2 x (P x))",
    ),
    ("false", "true", "false"),
    ("(exists x (and (P x) (Q x)))", "true", "(exists x (P x))"),
    (
        "(forall x (iff (P x) (Q x)))",
        "(exists x (P x))",
        "(exists x (Q x))",
    ),
    (
        "(exists x (P x))",
        "(not (exists x (P x)))",
        "(exists x (P x))",
    ),
];

/// First-order formulas with three variable names.
pub const THREE_VARIABLE: Corpus = Corpus {
    name: "three-variable",
    base: PE,
    bound: &[],
    formulas: &[
        "(exists x (exists y (exists z (and (E x y) (and (E y z) (E z x))))))",
        "(forall x (forall y (forall z (implies (and (E x y) (E y z)) (E x z)))))",
        "(exists x (exists y (exists z (and (not (= x y)) (and (not (= y z)) (not (= x z)))))))",
        "(forall x (exists y (exists z (and (E x y) (and (E x z) (not (= y z)))))))",
        "(exists x (exists y (exists z (and (P x) (and (P y) (and (not (P z)) (not (= x y))))))))",
        "(exists x (forall y (exists z (and (E y z) (E z x)))))",
        "(forall x (forall y (forall z (implies (and (E x y) (E x z)) (= y z)))))",
        "(exists x (and (P x) (exists y (and (E x y) (exists z (and (E y z) (not (P z))))))))",
        "(forall x (implies (P x) (exists y (exists z (and (E x y) (and (E y z) (P z)))))))",
        "(exists x (exists y (exists z (and (E x y) (and (E y z) (and (not (P x)) (P z)))))))",
        "(exists y (and (E x y) (exists z (and (E y z) (E z x)))))",
        "(exists x (exists y (exists z (and (E x y) (and (not (E x y)) (P z))))))",
    ],
};

/// Monadic second-order sentences over counting matrices of depth one.
pub const MONADIC: Corpus = Corpus {
    name: "monadic",
    base: PQE,
    bound: &[("R", 1), ("S", 1), ("U", 1)],
    formulas: &[
        "(exists2 R (forall x (iff (R x) (P x))))",
        "(exists2 R (exists-ge 2 x (and (R x) (Q x))))",
        "(forall2 R (exists x (or (R x) (not (R x)))))",
        "(exists2 R (exists2 S (forall x (iff (R x) (not (S x))))))",
        "(exists2 R (and (exists x (R x)) (forall x (implies (R x) (P x)))))",
        "(exists2 R (forall x (implies (E x x) (R x))))",
        "(exists2 R (forall2 S (exists-exactly 1 x (and (R x) (S x)))))",
        "(exists2 R (or (forall x (R x)) (exists-ge 3 x (not (R x)))))",
        "(forall2 R (implies (exists x (R x)) (exists x (and (R x) (P x)))))",
        "(exists2 R (and (forall x (iff (R x) (Q x))) (exists-ge 1 x (R x))))",
        "(exists2 R (exists2 S (exists2 U (forall x (or (R x) (or (S x) (U x)))))))",
    ],
};

/// Spatial conjunction restricted to the unary symbol, read over forests.
pub const FOREST: Corpus = Corpus {
    name: "forest",
    base: PE,
    bound: &[],
    formulas: &[
        "(sep-on (P) (exists x (P x)) (exists x (P x)))",
        "(sep-on (P) (forall x (implies (P x) (exists y (E x y)))) (exists x (P x)))",
        "(not (sep-on (P) (exists x (P x)) (not (exists x (P x)))))",
        "(sep-on (P) (forall x (implies (P x) (forall y (not (E y x))))) (forall x (implies (P x) (exists y (E y x)))))",
        "(exists x (sep-on (P) (P x) (exists y (and (E x y) (P y)))))",
        "(sep-on (P) (exists-exactly 1 x (P x)) (exists-ge 2 x (P x)))",
        "(forall x (implies (exists y (E x y)) (sep-on (P) (P x) true)))",
        "(sep-on (P) (sep-on (P) (exists x (P x)) (exists x (P x))) (exists x (P x)))",
        "(sep-on (P) (forall x (iff (P x) (exists y (E y x)))) true)",
        "(sep-on (P) (exists x (and (P x) (forall y (not (E y x))))) (exists x (and (P x) (exists y (E y x)))))",
        "(implies (exists x (P x)) (sep-on (P) (exists x (P x)) (forall x (not (P x)))))",
    ],
};

/// Unary formulas for the algebraic laws of `⊛`.
pub const LAWS: Corpus = Corpus {
    name: "laws",
    base: PQ,
    bound: &[],
    formulas: &[
        "true",
        "(exists x (P x))",
        "(forall x (P x))",
        "(exists-exactly 1 x (Q x))",
        "(not (exists x (Q x)))",
        "(exists x (and (P x) (Q x)))",
        "(forall x (iff (P x) (Q x)))",
        "(sep (exists x (P x)) (exists x (Q x)))",
    ],
};

pub const ALL: &[Corpus] = &[
    SPATIAL,
    SECOND_ORDER,
    FIXPOINT,
    THREE_VARIABLE,
    MONADIC,
    FOREST,
    LAWS,
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_corpus_parses() {
        for c in ALL {
            assert!(!c.parsed().is_empty(), "{}", c.name);
        }
        let v = Vocabulary::of(ADJUNCTION_VOCAB).unwrap();
        for (a, b, c) in ADJUNCTION {
            for s in [a, b, c] {
                parse_formula(s, &v).unwrap();
            }
        }
    }

    #[test]
    fn sizes() {
        assert!(SPATIAL.formulas.len() >= 30);
        assert!(SECOND_ORDER.formulas.len() >= 20);
        assert!(FIXPOINT.formulas.len() >= 11);
        assert!(ADJUNCTION.len() >= 10);
        for c in [THREE_VARIABLE, MONADIC, FOREST] {
            assert!(c.formulas.len() >= 10);
        }
    }
}
