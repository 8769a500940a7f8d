use std::collections::BTreeSet;
use symdyn::fixtures;
use symdyn::shift_core::{
    all_words, alphabet_of, determinize, language_equal, minimize, Language, SftJson, Word,
};
use symdyn::{distance, Dyadic, Error, SftGraph, SymbolicPoint};

fn avoiding(k: usize, n: usize, forbidden: &[Word]) -> BTreeSet<Word> {
    all_words(n, k)
        .into_iter()
        .filter(|w| {
            !forbidden
                .iter()
                .any(|f| w.windows(f.len()).any(|x| x == f.as_slice()))
        })
        .collect()
}

fn labels(g: &SftGraph, k: usize) -> BTreeSet<Word> {
    g.words_of_length(k).into_iter().collect()
}

#[test]
fn nothing_forbidden_is_the_full_shift() {
    let g = SftGraph::from_forbidden_words(&alphabet_of(&["0", "1"]), &[]).unwrap();
    assert_eq!(g.vertex_count(), 1);
    assert_eq!(g.edges().len(), 2);
}

#[test]
fn golden_mean_words_match_filtering() {
    let g = fixtures::golden_mean().unwrap();
    assert_eq!(g.vertex_count(), 2);
    assert!(g.is_deterministic());
    for k in 1..=6 {
        assert_eq!(labels(&g, k), avoiding(k, 2, &[vec![1, 1]]));
    }
}

#[test]
fn forbidding_a_symbol_leaves_a_fixed_point() {
    let g = SftGraph::from_forbidden_words(&alphabet_of(&["0", "1"]), &[vec![1]]).unwrap();
    assert_eq!(g.vertex_count(), 1);
    assert_eq!(g.edges().len(), 1);
    assert_eq!(g.edges()[0].label, 0);
}

#[test]
fn everything_forbidden_is_empty_not_an_error() {
    let g = SftGraph::from_forbidden_words(&alphabet_of(&["0", "1"]), &[vec![0], vec![1]]).unwrap();
    assert!(g.is_empty());
    assert!(matches!(
        SftGraph::from_forbidden_words(&[], &[]),
        Err(Error::InvalidAlphabet(_))
    ));
}

#[test]
fn distance_examples() {
    let a = alphabet_of(&["0", "1"]);
    let p = |t: &str| SymbolicPoint::parse(&a, t).unwrap();
    assert_eq!(distance(&p("(0)^inf"), &p("(0)^inf")), Dyadic::Zero);
    assert_eq!(distance(&p("(0)^inf"), &p("(1)^inf")), Dyadic::ONE);
    assert_eq!(distance(&p("0001(0)^inf"), &p("(0)^inf")), Dyadic::Pow(3));
    assert_eq!(p("0101(01)^inf"), p("(01)^inf"));
}

#[test]
fn language_equality_examples() {
    let gm = fixtures::golden_mean().unwrap();
    assert!(language_equal(&gm, &minimize(&gm)).unwrap().equal);
    let v = language_equal(&fixtures::full_shift(2).unwrap(), &gm).unwrap();
    assert!(!v.equal);
    assert_eq!(v.witness, Some(vec![1, 1]));
    let (e1, e2) = fixtures::even_shift().unwrap();
    assert!(language_equal(&e1, &e2).unwrap().equal);
    for k in 1..=8 {
        assert_eq!(labels(&e1, k), labels(&e2, k));
    }
    let other = SftGraph::full_shift(&alphabet_of(&["a", "b"])).unwrap();
    assert!(matches!(
        language_equal(&gm, &other),
        Err(Error::AlphabetMismatch(_))
    ));
}

#[test]
fn determinization_keeps_the_language() {
    let (_, even) = fixtures::even_shift().unwrap();
    for g in [
        even,
        fixtures::golden_mean().unwrap(),
        fixtures::cycle_and_golden_mean().unwrap(),
    ] {
        let d = determinize(&g);
        assert!(d.is_deterministic());
        assert!(language_equal(&g, &d).unwrap().equal);
    }
}

#[test]
fn json_forms_round_trip() {
    for g in [
        fixtures::golden_mean().unwrap(),
        fixtures::three_cycle().unwrap(),
        fixtures::wandering().unwrap(),
    ] {
        let text = serde_json::to_string(&g.to_json()).unwrap();
        let back: SftJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_graph().unwrap(), g);
    }
    let f: SftJson =
        serde_json::from_str(r#"{"alphabet": ["0", "1"], "forbidden": ["11"]}"#).unwrap();
    let g = f.to_graph().unwrap();
    assert!(
        Language::of_shift(&g)
            .equals(&Language::of_shift(&fixtures::golden_mean().unwrap()))
            .unwrap()
            .equal
    );
}

#[test]
fn long_symbols_use_dot_separators() {
    let a = alphabet_of(&["ab", "c"]);
    let g = SftGraph::full_shift(&a).unwrap();
    assert_eq!(g.format(&[0, 1, 0]), "ab.c.ab");
    assert_eq!(g.parse("ab.c.ab").unwrap(), vec![0, 1, 0]);
}
