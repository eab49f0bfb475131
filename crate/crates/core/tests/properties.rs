use std::cmp::Ordering;

use bunched::bunch::canonical_compare;
use bunched::oracle::{brute_force_lbi, enumerate_sequents, CorpusSpec};
use bunched::*;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::var("p")),
        Just(Formula::var("q")),
        Just(Formula::var("r")),
        Just(Formula::Top),
        Just(Formula::Bot),
        Just(Formula::One),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        (0..5u8, inner.clone(), inner).prop_map(|(c, a, b)| match c {
            0 => Formula::and(a, b),
            1 => Formula::or(a, b),
            2 => Formula::imp(a, b),
            3 => Formula::tensor(a, b),
            _ => Formula::wand(a, b),
        })
    })
}

fn small_formula() -> impl Strategy<Value = Formula> {
    formula().prop_filter("at most 5 symbols", |f| f.size() <= 5)
}

fn bunch_of(f: impl Strategy<Value = Formula> + 'static, leaves: u32) -> impl Strategy<Value = Bunch> {
    let leaf = prop_oneof![8 => f.prop_map(Bunch::leaf), 1 => Just(Bunch::EmptyM), 1 => Just(Bunch::EmptyA)];
    leaf.prop_recursive(4, leaves, 2, |inner| {
        (any::<bool>(), inner.clone(), inner)
            .prop_map(|(comma, a, b)| if comma { Bunch::comma(a, b) } else { Bunch::semi(a, b) })
    })
}

fn bunch() -> impl Strategy<Value = Bunch> {
    bunch_of(formula(), 8)
}

fn sequent() -> impl Strategy<Value = Sequent> {
    (bunch_of(small_formula(), 5), small_formula())
        .prop_map(|(antecedent, succedent)| RawSequent { antecedent, succedent }.normalize())
}

/// Sequents small enough for the brute-force oracle.
fn tiny_sequent() -> impl Strategy<Value = Sequent> {
    let f = || formula().prop_filter("at most 3 symbols", |f| f.size() <= 3);
    (bunch_of(f(), 3), f()).prop_map(|(antecedent, succedent)| RawSequent { antecedent, succedent }.normalize())
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, rng_seed: RngSeed::Fixed(0xb1), ..ProptestConfig::default() }
}

fn normal() -> impl Strategy<Value = NormalBunch> {
    bunch().prop_map(|b| NormalBunch::from_bunch(&b))
}

fn comma_lengths(x: &StarBunch, out: &mut Vec<usize>) {
    if x.is_comma() {
        out.push(x.children().len());
    }
    for c in x.children() {
        comma_lengths(c, out);
    }
}

fn tiny_corpus(variables: &[&str]) -> Vec<Sequent> {
    let spec = CorpusSpec {
        variables: variables.iter().map(|v| v.to_string()).collect(),
        max_formula_size: 3,
        max_antecedent_leaves: 2,
        include_units: false,
    };
    enumerate_sequents(&spec).unwrap()
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn formula_text_round_trips(f in formula()) {
        prop_assert_eq!(parse_formula(&f.render(Style::Text)).unwrap(), f);
    }

    #[test]
    fn sequent_text_round_trips(a in bunch(), f in formula()) {
        let raw = RawSequent { antecedent: a, succedent: f };
        prop_assert_eq!(parse_sequent(&raw.render(Style::Text)).unwrap(), raw);
    }

    #[test]
    fn subformula_count_bounded_by_occurrence_sizes(s in sequent()) {
        let total: usize = s.formulas().iter().map(|f| f.size()).sum();
        prop_assert!(s.subformulas().len() <= total);
    }

    #[test]
    fn star_alternates(b in bunch()) {
        prop_assert!(star(&b).is_star());
    }

    #[test]
    fn reduce_is_idempotent_and_normal(b in bunch()) {
        let n = reduce(&star(&b));
        prop_assert!(n.as_star().is_normal());
        prop_assert_eq!(reduce(n.as_star()), n.clone());
        prop_assert!(n.size() <= star(&b).size());
    }

    #[test]
    fn reduce_is_compositional(x in bunch(), y in bunch(), comma in any::<bool>()) {
        let (x, y) = (star(&x), star(&y));
        let join = |a: StarBunch, b: StarBunch| {
            if comma { StarBunch::comma(vec![a, b]) } else { StarBunch::semi(vec![a, b]) }
        };
        let inner = reduce(&x).into_star();
        prop_assert_eq!(reduce(&join(inner, y.clone())), reduce(&join(x, y)));
    }

    #[test]
    fn tall_bunches_are_big(x in normal()) {
        let (h, size) = (x.height(), x.size());
        for n in 1..=h / 2 {
            prop_assert!(size >= n, "height {} but size {}", h, size);
        }
    }

    #[test]
    fn canonical_order_is_total(a in normal(), b in normal(), c in normal()) {
        let ab = canonical_compare(&a, &b);
        prop_assert_eq!(ab, canonical_compare(&b, &a).reverse());
        prop_assert_eq!(ab == Ordering::Equal, a == b);
        if ab != Ordering::Greater && canonical_compare(&b, &c) != Ordering::Greater {
            prop_assert_ne!(canonical_compare(&a, &c), Ordering::Greater);
        }
    }

    #[test]
    fn weight_bounds_pairs_and_comma_lists(s in sequent()) {
        let w = weight(&s);
        prop_assert!(critical_pairs(&s).iter().all(|p| p.size() <= w));
        prop_assert!(critical_pairs(&s).iter().any(|p| p.size() == w));
        let mut lengths = Vec::new();
        comma_lengths(s.antecedent.as_star(), &mut lengths);
        prop_assert!(lengths.iter().all(|&n| n <= w));
        prop_assert!(w >= 2);
    }

    #[test]
    fn preimage_variants_reduce_back(x in normal()) {
        for path in x.as_star().leaf_paths() {
            let variants = preimage_variants(&x, &Position::new(path.clone())).unwrap();
            prop_assert_eq!(variants.len(), 1 << (path.len() + 1));
            for (w, pos) in variants {
                prop_assert_eq!(reduce(&w), x.clone());
                prop_assert!(w.at(&pos.path).and_then(StarBunch::as_formula).is_some());
            }
        }
    }

    #[test]
    fn expand_is_checked_canonical_and_analytic(s in sequent()) {
        let sub = s.subformulas();
        for app in expand(&s) {
            prop_assert!(check_instance(&s, &app), "{} by {}", s, app.rule);
            for p in &app.premises {
                prop_assert!(p.antecedent.as_star().is_normal());
                prop_assert!(p.formulas().iter().all(|f| sub.contains(*f)), "{} not analytic in {}", p, s);
            }
        }
    }

    #[test]
    fn focused_apps_are_checked(s in sequent()) {
        for app in expand_focused(&s) {
            prop_assert!(check_instance(&s, &app), "{} by {}", s, app.rule);
        }
    }

    #[test]
    fn decide_is_sound_and_deterministic(s in sequent()) {
        let cfg = SearchConfig { max_visited: Some(20_000), ..SearchConfig::default() };
        let (v, st) = decide(&s, &cfg);
        if let Some(d) = v.derivation() {
            prop_assert!(verify(d));
            prop_assert_eq!(&d.sequent, &s);
        }
        prop_assert!(st.max_height_seen < 2 * (st.root_weight + 1));
        prop_assert!(st.max_weight_seen <= st.root_weight);
        prop_assert_eq!(decide(&s, &cfg).0, v);
    }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn oracle_depth_is_monotone(s in tiny_sequent(), d in 1usize..6) {
        let raw = s.to_raw();
        if brute_force_lbi(&raw, d).is_provable() {
            prop_assert!(brute_force_lbi(&raw, d + 1).is_provable());
        }
    }

    #[test]
    fn oracle_proofs_are_found_by_decide(s in tiny_sequent()) {
        if brute_force_lbi(&s.to_raw(), 7).is_provable() {
            let (v, _) = decide(&s, &SearchConfig { max_visited: Some(20_000), ..SearchConfig::default() });
            prop_assert_ne!(v, Verdict::Unprovable, "{} missed", s);
        }
    }
}

#[test]
fn memo_free_search_agrees_on_tiny_corpus() {
    let memo = SearchConfig { emit_derivation: false, ..SearchConfig::default() };
    let bare = SearchConfig { memoize: false, max_visited: Some(200_000), ..memo.clone() };
    let mut compared = 0;
    for s in tiny_corpus(&["p", "q"]) {
        let (with, _) = decide(&s, &memo);
        let (without, _) = decide(&s, &bare);
        if without != Verdict::ResourceLimit {
            assert_eq!(with, without, "{s}");
            compared += 1;
        }
    }
    assert!(compared > 0);
}

#[test]
fn focused_search_agrees_with_exhaustive_on_tiny_corpus() {
    let focused = SearchConfig { emit_derivation: false, ..SearchConfig::default() };
    let exhaustive = SearchConfig { exhaustive: true, max_visited: Some(200), ..focused.clone() };
    let (mut compared, mut total) = (0, 0);
    for s in tiny_corpus(&["p"]) {
        total += 1;
        let (a, _) = decide(&s, &focused);
        let (b, _) = decide(&s, &exhaustive);
        assert_ne!(a, Verdict::ResourceLimit, "{s}");
        if b != Verdict::ResourceLimit {
            assert_eq!(a, b, "{s}");
            compared += 1;
        }
    }
    assert!(compared * 2 > total, "only {compared} of {total} compared");
}
