//! Spatial logic over finite relational structures.

pub mod analysis;
pub mod corpus;
pub mod eval;
pub mod forests;
pub mod formula;
pub mod modelfinder;
pub mod selftest;
pub mod structure;
pub mod syntax;
pub mod translate;
pub mod vocab;

pub use analysis::{
    classify, fo_depth, in_fragment, subformula, Fragment, FragmentReport, Membership, Path,
};
pub use eval::{eval, eval_lfp, eval_lfp_chain, BudgetKind, EvalBudget, EvalError, Prepared};
pub use forests::{
    check_split_closure, enumerate_forests, eval_over_forests, ClosureReport, ClosureViolation,
    ForestComparison,
};
pub use formula::{
    check_positivity, desugar, expand_letrec, rename_bound_so, rename_bound_so_avoiding,
    substitute_predicate, Formula, FormulaError,
};
pub use modelfinder::{
    count_models, enumerate_structures, equiv_bounded, sat_bounded, Finder, SearchBudget,
    SearchError, SearchResult, SearchStatus, StructureSpace,
};
pub use structure::{
    enumerate_splits, full_relation, is_forest, parse_structure, print_structure, Relation,
    SplitPair, Structure, StructureError,
};
pub use syntax::{
    declared_signature, parse_formula, parse_formula_document, parse_signature, print_formula,
    print_signature, ParseError, Pos,
};
pub use translate::{
    lfp_to_sol, reduce_to_two_vars, saturate_bound, sol_to_spatial, spatial_to_sol, TranslateError,
    Translated, TranslationContext,
};
pub use vocab::{PredicateSet, PredicateSymbol, VocabError, Vocabulary};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/formulas.md")]
    mod formulas {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/translations.md")]
    mod translations {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/forests.md")]
    mod forests {}
}

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}
