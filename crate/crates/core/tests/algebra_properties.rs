mod common;

use markov_hull::axioms::CandidateOSet;
use markov_hull::entropy::entropy;
use markov_hull::explorer::separate_hulls;
use markov_hull::semilattice::{enumerate_idempotents, fingerprint, strict_upset, IdempotentIndex};
use markov_hull::{catalog, Element, Hull, TransitionMatrix};
use proptest::prelude::*;
use proptest::sample::Index;

fn pick(pool: &[Element], i: &Index) -> Element {
    pool[i.index(pool.len())].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn multiplication_is_associative(t in common::matrix(3), i in any::<Index>(), j in any::<Index>(), k in any::<Index>()) {
        let h = Hull::new(t);
        let pool = h.elements_up_to(2);
        let (a, b, c) = (pick(&pool, &i), pick(&pool, &j), pick(&pool, &k));
        prop_assert_eq!(
            h.multiply(&h.multiply(&a, &b), &c),
            h.multiply(&a, &h.multiply(&b, &c))
        );
    }

    #[test]
    fn products_stay_in_the_hull(t in common::matrix(3), i in any::<Index>(), j in any::<Index>()) {
        let h = Hull::new(t);
        let pool = h.elements_up_to(2);
        let p = h.multiply(&pick(&pool, &i), &pick(&pool, &j));
        prop_assert!(h.check(&p).is_ok());
    }

    #[test]
    fn inverse_laws(t in common::matrix(3), i in any::<Index>(), j in any::<Index>()) {
        let h = Hull::new(t);
        let pool = h.elements_up_to(2);
        let (g, k) = (pick(&pool, &i), pick(&pool, &j));
        prop_assert_eq!(g.inverse().inverse(), g.clone());
        prop_assert_eq!(h.multiply(&h.multiply(&g, &g.inverse()), &g), g.clone());
        prop_assert_eq!(h.multiply(&g, &k).inverse(), h.multiply(&k.inverse(), &g.inverse()));
        prop_assert_eq!(h.multiply(&g.inverse(), &g), g.source().unwrap());
        prop_assert_eq!(h.multiply(&g, &g.inverse()), g.range().unwrap());
    }

    #[test]
    fn order_is_multiplicative(t in common::matrix(3), i in any::<Index>(), j in any::<Index>()) {
        let h = Hull::new(t.clone());
        let pool = enumerate_idempotents(&t, 3);
        let (e, f) = (pick(&pool, &i), pick(&pool, &j));
        prop_assert_eq!(h.leq(&e, &f).unwrap(), h.multiply(&e, &f) == e);
        prop_assert_eq!(h.multiply(&e, &f), h.multiply(&f, &e));
    }

    #[test]
    fn hull_is_combinatorial(t in common::matrix(3), i in any::<Index>()) {
        let h = Hull::new(t);
        let g = pick(&h.elements_up_to(2), &i);
        if g.source().unwrap() == g.range().unwrap() {
            prop_assert!(g.is_idempotent());
        }
    }

    #[test]
    fn literals_round_trip(t in common::matrix(3), i in any::<Index>()) {
        let h = Hull::new(t);
        let g = pick(&h.elements_up_to(2), &i);
        prop_assert_eq!(h.parse(&h.format(&g)).unwrap(), g);
    }

    #[test]
    fn family_is_intersection_closed(t in common::matrix(4)) {
        let family = t.constructible_family();
        for a in t.letters() {
            prop_assert!(t.is_constructible(t.follows(a)));
        }
        for &x in family {
            for &y in family {
                let z = x.intersection(y);
                prop_assert!(z.is_empty() || t.is_constructible(z));
            }
        }
    }

    #[test]
    fn entropy_is_permutation_invariant(t in common::matrix(4), seed in any::<u64>()) {
        let n = t.size();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.rotate_left((seed as usize) % n);
        if n > 2 && seed % 2 == 0 {
            perm.swap(0, 1);
        }
        let u = t.permuted(&perm).unwrap();
        prop_assert!((entropy(&t, 1e-10).unwrap() - entropy(&u, 1e-10).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn fingerprint_is_permutation_invariant(t in common::matrix(3), perm in common::permutation(3)) {
        let perm: Vec<usize> = perm.into_iter().filter(|&p| p < t.size()).collect();
        let u = t.permuted(&perm).unwrap();
        prop_assert_eq!(fingerprint(&t, 3), fingerprint(&u, 3));
    }

    #[test]
    fn separation_is_symmetric(t in common::matrix(3), u in common::matrix(3)) {
        let flip = |s: markov_hull::explorer::Separation| match s {
            markov_hull::explorer::Separation::Separated { k, counts } => {
                markov_hull::explorer::Separation::Separated { k, counts: (counts.1, counts.0) }
            }
            other => other,
        };
        prop_assert_eq!(separate_hulls(&t, &u, 3), flip(separate_hulls(&u, &t, 3)));
    }

    #[test]
    fn upsets_are_complete_and_shrink(t in common::matrix(3), i in any::<Index>()) {
        let h = Hull::new(t.clone());
        let pool = enumerate_idempotents(&t, 3);
        let e = pick(&pool, &i);
        let up = strict_upset(&t, &e).unwrap();
        let brute: Vec<Element> = pool
            .iter()
            .filter(|f| **f != e && h.leq(&e, f).unwrap())
            .cloned()
            .collect();
        prop_assert_eq!(&up, &brute);
        for f in &up {
            prop_assert!(strict_upset(&t, f).unwrap().len() < up.len());
        }
    }

    #[test]
    fn standard_set_is_comparable_to_everything(t in common::matrix(3)) {
        let h = Hull::new(t.clone());
        let o = CandidateOSet::standard(&h);
        for e in enumerate_idempotents(&t, 3) {
            prop_assert!(o
                .elements()
                .iter()
                .any(|f| h.leq(&e, f).unwrap() || h.leq(f, &e).unwrap()));
        }
    }
}

#[test]
fn full_shift_language_sizes() {
    for m in 1..=4usize {
        let t = TransitionMatrix::from_rows(vec![vec![1; m]; m]).unwrap();
        let expected: usize = (1..=4).map(|k| m.pow(k)).sum();
        assert_eq!(t.enumerate_language(4).len(), expected);
    }
}

#[test]
fn covers_are_intransitive() {
    for t in [catalog::t1(), catalog::t2(), catalog::conjugate_left()] {
        let index = IdempotentIndex::build(&t, 3);
        for i in 0..index.len() {
            let ups = index.upper_covers_of(i);
            for &j in ups {
                // nothing covered by an upper cover of i is also above i
                for &k in index.upper_covers_of(j) {
                    assert!(!ups.contains(&k));
                }
                assert!(index.nodes()[j].as_triple().unwrap().range_word().len()
                    <= index.nodes()[i].as_triple().unwrap().range_word().len());
            }
        }
    }
}

#[test]
fn standard_classification_partition() {
    use markov_hull::semilattice::{classify, Position};
    let t = catalog::t1();
    let h = Hull::new(t.clone());
    let o = CandidateOSet::standard(&h);
    for e in enumerate_idempotents(&t, 4) {
        let s_empty = e.as_triple().unwrap().range_word().is_empty();
        let expected = if o.contains(&e) {
            Position::InO
        } else if s_empty {
            Position::AboveO
        } else {
            Position::BelowO
        };
        assert_eq!(classify(&e, o.elements()).unwrap(), expected, "{}", h.format(&e));
    }
}
