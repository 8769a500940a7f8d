mod common;

use proptest::prelude::*;
use std::collections::BTreeSet;
use symdyn::chaos::{density_report, find_r_distal_tuple, point_stream, Horizon};
use symdyn::codes::{apply, compose, SlidingBlockCode};
use symdyn::decomposition::{chain_components, entropy, has_positive_entropy};
use symdyn::fixtures;
use symdyn::shadow_lab::{brute_shadowing_check, truncate_shift, CheckMode};
use symdyn::shift_core::{all_words, alphabet_of, determinize, language_equal, Word};
use symdyn::towers::{claim_flags, enumerate_towers, select_max_tower, TowerKind};
use symdyn::{distance, Dyadic, SftGraph, SmallRational, SymbolicPoint};

fn graph_from(nv: usize, edges: &[(usize, usize, usize)]) -> SftGraph {
    let names: Vec<String> = (0..nv).map(|v| format!("v{v}")).collect();
    let e: Vec<(&str, &str, &str)> = edges
        .iter()
        .map(|&(s, d, l)| {
            (
                names[s % nv].as_str(),
                names[d % nv].as_str(),
                ["0", "1"][l],
            )
        })
        .collect();
    SftGraph::from_named_edges(&["0", "1"], &e).unwrap()
}

fn arb_graph() -> impl Strategy<Value = SftGraph> {
    (
        1usize..=3,
        prop::collection::vec((0usize..3, 0usize..3, 0usize..2), 0..7),
    )
        .prop_map(|(nv, edges)| graph_from(nv, &edges))
}

fn arb_point() -> impl Strategy<Value = SymbolicPoint> {
    (
        prop::collection::vec(0usize..2, 0..5),
        prop::collection::vec(0usize..2, 1..5),
    )
        .prop_map(|(pre, per)| SymbolicPoint::new(pre, per).unwrap())
}

fn locally_admissible(w: &[usize], forbidden: &[Word]) -> bool {
    !forbidden
        .iter()
        .any(|f| w.windows(f.len()).any(|x| x == f.as_slice()))
}

fn on_cycle(g: &SftGraph, v: usize) -> bool {
    let n = g.vertex_count();
    let mut cur = vec![false; n];
    cur[v] = true;
    for _ in 0..n {
        let mut next = vec![false; n];
        for e in g.edges() {
            if cur[e.src] {
                next[e.dst] = true;
            }
        }
        if next[v] {
            return true;
        }
        cur = next;
    }
    false
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forbidden_word_shifts_match_filtering(forbidden in prop::collection::vec(prop::collection::vec(0usize..2, 1..=3), 0..=3)) {
        let g = SftGraph::from_forbidden_words(&alphabet_of(&["0", "1"]), &forbidden).unwrap();
        // states are 2-words, so five symbols of room on each side reach a cycle
        let pad = 5;
        let long: Vec<Word> = all_words(2, 6 + 2 * pad).into_iter().filter(|w| locally_admissible(w, &forbidden)).collect();
        for k in 1..=6 {
            let oracle: BTreeSet<Word> = long.iter().map(|w| w[pad..pad + k].to_vec()).collect();
            let got: BTreeSet<Word> = g.words_of_length(k).into_iter().collect();
            prop_assert_eq!(got, oracle);
        }
    }

    #[test]
    fn distance_is_an_ultrametric(x in arb_point(), y in arb_point(), z in arb_point()) {
        prop_assert_eq!(distance(&x, &y), distance(&y, &x));
        prop_assert_eq!(distance(&x, &x), Dyadic::Zero);
        prop_assert!(distance(&x, &z) <= distance(&x, &y).max(distance(&y, &z)));
        prop_assert_eq!(distance(&x, &y) == Dyadic::Zero, x == y);
    }

    #[test]
    fn language_equality_is_an_equivalence(a in arb_graph(), b in arb_graph(), c in arb_graph()) {
        prop_assert!(language_equal(&a, &a).unwrap().equal);
        let ab = language_equal(&a, &b).unwrap().equal;
        prop_assert_eq!(ab, language_equal(&b, &a).unwrap().equal);
        if ab && language_equal(&b, &c).unwrap().equal {
            prop_assert!(language_equal(&a, &c).unwrap().equal);
        }
        let d = determinize(&a);
        prop_assert!(d.is_deterministic());
        prop_assert!(language_equal(&a, &d).unwrap().equal);
    }

    #[test]
    fn positive_entropy_is_structural(g in arb_graph()) {
        prop_assume!(!g.is_empty());
        let h: f64 = entropy(&g).unwrap();
        prop_assert_eq!(h > 1e-9, has_positive_entropy(&g));
    }

    #[test]
    fn components_of_a_disjoint_union(a in arb_graph(), b in arb_graph()) {
        let u = a.disjoint_union(&b).unwrap();
        let count = |g: &SftGraph| chain_components(g).components.len();
        prop_assert_eq!(count(&u), count(&a) + count(&b));
    }

    #[test]
    fn chain_recurrent_vertices_lie_on_cycles(g in arb_graph()) {
        let dec = chain_components(&g);
        let covered: BTreeSet<usize> = dec.vertex_sets.iter().flatten().copied().collect();
        let oracle: BTreeSet<usize> = (0..g.vertex_count()).filter(|&v| on_cycle(&g, v)).collect();
        prop_assert_eq!(covered, oracle);
    }

    #[test]
    fn codes_commute_with_the_shift(table in prop::collection::vec(0usize..2, 4), other in prop::collection::vec(0usize..2, 4), x in arb_point()) {
        let full = fixtures::full_shift(2).unwrap();
        let c = SlidingBlockCode::from_fn(full.clone(), full.clone(), 2, |w| table[2 * w[0] + w[1]]).unwrap();
        let d = SlidingBlockCode::from_fn(full.clone(), full, 2, |w| other[2 * w[0] + w[1]]).unwrap();
        prop_assert_eq!(apply(&c, &x.shifted(1)).unwrap(), apply(&c, &x).unwrap().shifted(1));
        let dc = compose(&d, &c).unwrap();
        prop_assert_eq!(apply(&dc, &x).unwrap(), apply(&d, &apply(&c, &x).unwrap()).unwrap());
    }
}

fn hosts() -> Vec<SftGraph> {
    vec![
        fixtures::full_shift(2).unwrap(),
        fixtures::golden_mean().unwrap(),
        fixtures::three_cycle().unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn shadowing_verdicts_replay_and_are_monotone(
        host in 0usize..3,
        depth in 2usize..=4,
        e in 0u32..4,
        d in 0u32..4,
        h in 1usize..=5,
        looser in 0u32..2,
        finer in 0u32..2,
        shorter in 0usize..3,
    ) {
        let (sys, _) = truncate_shift::<SmallRational>(&hosts()[host], depth).unwrap();
        let p = |k: u32| SmallRational::new(1, 1 << k);
        let v = brute_shadowing_check(&sys, &p(e), &p(d), h, CheckMode::Exhaustive).unwrap();
        prop_assert!(v.replay(&sys));
        if v.is_ok() {
            let w = brute_shadowing_check(&sys, &p(e.saturating_sub(looser)), &p(d + finer), h.saturating_sub(shorter).max(1), CheckMode::Exhaustive).unwrap();
            prop_assert!(w.is_ok());
        }
    }

    #[test]
    fn density_counts_are_monotone(x in arb_point(), y in arb_point(), e in 0u32..5, d in 1u32..5) {
        let hs = [Horizon { horizon: 40, close_target: None, far_target: None }];
        let counts = |e: u32, d: u32| {
            let streams = vec![point_stream(&x), point_stream(&y)];
            let row = density_report(streams, Dyadic::Pow(e), Dyadic::Pow(d), &hs).unwrap().rows[0].clone();
            (row.close, row.far)
        };
        let (close, far) = counts(e, d);
        let (close_finer, far_finer) = counts(e + 1, d + 1);
        prop_assert!(close_finer <= close);
        prop_assert!(far_finer >= far);
    }

    #[test]
    fn distal_tuples_reproduce_their_separation(host in 0usize..2, n in 2usize..=3) {
        let g = &hosts()[host];
        let t = find_r_distal_tuple(g, n, 6).unwrap();
        prop_assert_eq!(t.n(), n);
        prop_assert_eq!(t.min_distance(t.period), t.r);
        for p in t.points() {
            prop_assert!(g.contains_point(&p));
        }
    }

    #[test]
    fn selection_flags_recompute(fixture in 0usize..6, pick in 0usize..64, n in 1usize..=3) {
        let names = ["full_shift", "golden_mean", "point_beside_golden_mean", "branching", "two_fixed_points", "interval_tower"];
        let seq = fixtures::catalog().unwrap().into_iter().find(|(k, _)| *k == names[fixture]).unwrap().1;
        let towers = enumerate_towers(&seq, TowerKind::Component, 4).unwrap();
        let t = &towers[pick % towers.len()];
        let r = select_max_tower(&seq, t, n).unwrap();
        prop_assert_eq!(claim_flags(&seq, t, &r.output, n).unwrap(), r.flags);
        prop_assert!(r.flags.all());
    }
}

#[test]
fn generated_sequences_are_deterministic() {
    for seed in 0..8 {
        assert_eq!(common::random_sequence(seed), common::random_sequence(seed));
    }
}
