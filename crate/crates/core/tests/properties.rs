use proptest::prelude::*;
use spatial_logic::{
    count_models, desugar, enumerate_splits, enumerate_structures, equiv_bounded, eval,
    parse_formula, parse_structure, print_formula, print_structure, rename_bound_so,
    spatial_to_sol, EvalBudget, Formula, PredicateSet, SearchBudget, Structure, StructureSpace,
    Vocabulary,
};

fn vocab() -> Vocabulary {
    Vocabulary::of(&[("P", 1), ("Q", 1), ("E", 2)]).unwrap()
}

fn unary() -> Vocabulary {
    Vocabulary::of(&[("P", 1), ("Q", 1)]).unwrap()
}

fn var() -> impl Strategy<Value = String> {
    prop_oneof![Just("x".to_owned()), Just("y".to_owned())]
}

fn atom(binary: bool) -> BoxedStrategy<Formula> {
    let mut leaves = vec![
        Just(Formula::True).boxed(),
        Just(Formula::False).boxed(),
        (var(), var())
            .prop_map(|(a, b)| Formula::eq(&a, &b))
            .boxed(),
        (prop_oneof![Just("P"), Just("Q")], var())
            .prop_map(|(p, x)| Formula::atom(p, &[x]))
            .boxed(),
    ];
    if binary {
        leaves.push(
            (var(), var())
                .prop_map(|(a, b)| Formula::atom("E", &[a, b]))
                .boxed(),
        );
    }
    proptest::strategy::Union::new(leaves).boxed()
}

/// Formulas over `P`, `Q` (and `E` when `binary`) in the variables `x`, `y`.
fn formula(binary: bool, spatial: bool) -> BoxedStrategy<Formula> {
    atom(binary)
        .prop_recursive(3, 12, 2, move |inner| {
            let mut ops = vec![
                inner.clone().prop_map(Formula::not).boxed(),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Formula::and(a, b))
                    .boxed(),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Formula::or(a, b))
                    .boxed(),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Formula::implies(a, b))
                    .boxed(),
                (var(), inner.clone())
                    .prop_map(|(x, f)| Formula::exists(&x, f))
                    .boxed(),
                (var(), inner.clone())
                    .prop_map(|(x, f)| Formula::forall(&x, f))
                    .boxed(),
                (1u32..3, var(), inner.clone())
                    .prop_map(|(c, x, f)| Formula::count_exists(c, &x, f))
                    .boxed(),
                (1u32..3, var(), inner.clone())
                    .prop_map(|(c, x, f)| Formula::exists_exactly(c, &x, f))
                    .boxed(),
            ];
            if spatial {
                ops.push(
                    (inner.clone(), inner.clone())
                        .prop_map(|(a, b)| Formula::sep(a, b))
                        .boxed(),
                );
                ops.push(
                    (inner.clone(), inner.clone())
                        .prop_map(|(a, b)| {
                            let mut on = PredicateSet::new();
                            on.insert("P");
                            Formula::sep_on(on, a, b)
                        })
                        .boxed(),
                );
                ops.push(
                    (inner.clone(), inner)
                        .prop_map(|(a, b)| Formula::wand(a, b))
                        .boxed(),
                );
            }
            proptest::strategy::Union::new(ops)
        })
        .boxed()
}

fn structure(v: Vocabulary, max: usize) -> impl Strategy<Value = Structure> {
    (1..=max).prop_flat_map(move |n| {
        let space = StructureSpace::new(&v, n, &["x".into(), "y".into()]).unwrap();
        (0..space.len()).prop_map(move |i| space.get(i))
    })
}

fn holds(f: &Formula, e: &Structure) -> bool {
    eval(f, e, EvalBudget::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn print_then_parse_is_identity(f in formula(true, true)) {
        let text = print_formula(&f);
        let back = parse_formula(&text, &vocab()).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(print_formula(&back), text);
    }

    #[test]
    fn structure_text_round_trips(e in structure(vocab(), 3)) {
        prop_assert_eq!(parse_structure(&print_structure(&e)).unwrap(), e);
    }

    #[test]
    fn desugaring_preserves_truth(f in formula(true, true), e in structure(vocab(), 2)) {
        prop_assert_eq!(holds(&desugar(&f), &e), holds(&f, &e));
    }

    #[test]
    fn counting_one_is_existence(f in formula(true, false), e in structure(vocab(), 3)) {
        prop_assert_eq!(
            holds(&Formula::count_exists(1, "x", f.clone()), &e),
            holds(&Formula::exists("x", f), &e)
        );
    }

    #[test]
    fn splits_recombine(e in structure(vocab(), 2)) {
        let sigma = e.vocab().all();
        let total: usize = e.relations().map(|(_, r)| r.len()).sum();
        let mut count = 0u64;
        for s in enumerate_splits(&e, &sigma).unwrap() {
            count += 1;
            for (sym, r) in e.relations() {
                let name = sym.name.as_str();
                let (l, rr) = (s.left.relation(name).unwrap(), s.right.relation(name).unwrap());
                prop_assert!(l.is_disjoint(rr));
                prop_assert_eq!(&l.union(rr), r);
            }
            prop_assert_eq!(s.left.vars(), e.vars());
        }
        prop_assert_eq!(count, 1u64 << total);
    }

    #[test]
    fn separation_is_commutative(a in formula(true, true), b in formula(true, true), e in structure(vocab(), 2)) {
        prop_assert_eq!(
            holds(&Formula::sep(a.clone(), b.clone()), &e),
            holds(&Formula::sep(b, a), &e)
        );
    }

    #[test]
    fn separation_is_associative(
        a in formula(false, true),
        b in formula(false, true),
        c in formula(false, true),
        e in structure(unary(), 2),
    ) {
        let left = Formula::sep(Formula::sep(a.clone(), b.clone()), c.clone());
        let right = Formula::sep(a, Formula::sep(b, c));
        prop_assert_eq!(holds(&left, &e), holds(&right, &e));
    }

    #[test]
    fn separation_with_false_is_false(a in formula(true, true), e in structure(vocab(), 2)) {
        prop_assert!(!holds(&Formula::sep(a, Formula::False), &e));
    }

    #[test]
    fn emp_is_a_unit(a in formula(false, true), e in structure(unary(), 3)) {
        let v = unary();
        prop_assert_eq!(holds(&Formula::sep(a.clone(), Formula::emp(&v)), &e), holds(&a, &e));
    }

    #[test]
    fn translation_removes_spatial_connectives(f in formula(true, true), e in structure(vocab(), 2)) {
        let t = spatial_to_sol(&f, &vocab()).unwrap();
        prop_assert!(!t.formula.has_spatial());
        prop_assert_eq!(holds(&t.formula, &e), holds(&f, &e));
    }

    #[test]
    fn negation_partitions_models(f in formula(false, true), n in 1usize..=3) {
        let v = unary();
        let closed = Formula::exists("x", Formula::forall("y", f));
        let yes = count_models(&closed, &v, n, SearchBudget::default()).unwrap();
        let no = count_models(&Formula::not(closed), &v, n, SearchBudget::default()).unwrap();
        prop_assert_eq!(yes + no, 1u64 << (2 * n));
    }

    #[test]
    fn renaming_binders_preserves_truth(f in formula(false, false), e in structure(unary(), 2)) {
        let g = Formula::exists_so("P", 1, Formula::and(f.clone(), Formula::forall_so("P", 1, f)));
        prop_assert_eq!(holds(&rename_bound_so(&g), &e), holds(&g, &e));
    }
}

#[test]
fn equivalence_finds_the_first_difference() {
    let v = unary();
    let f = parse_formula("(sep (exists x (P x)) (exists x (P x)))", &v).unwrap();
    let g = parse_formula("(exists-ge 2 x (P x))", &v).unwrap();
    assert_eq!(
        equiv_bounded(&f, &g, &v, 3, SearchBudget::default()).unwrap(),
        None
    );
    let h = parse_formula("(exists x (P x))", &v).unwrap();
    let cex = equiv_bounded(&f, &h, &v, 3, SearchBudget::default())
        .unwrap()
        .unwrap();
    assert_eq!(cex.size(), 1);
    assert_eq!(cex.relation("P").unwrap().len(), 1);
}

#[test]
fn enumeration_is_exhaustive_and_distinct() {
    let v = vocab();
    let all: Vec<String> = enumerate_structures(&v, 2, &[])
        .unwrap()
        .map(|e| print_structure(&e))
        .collect();
    assert_eq!(all.len(), 4 * 4 * 16);
    let unique: std::collections::BTreeSet<_> = all.iter().collect();
    assert_eq!(unique.len(), all.len());
}
