use symdyn::codes::{apply, compose, image, SlidingBlockCode};
use symdyn::fixtures;
use symdyn::shift_core::{all_words, alphabet_of, language_equal, Language};
use symdyn::{Error, SftGraph, SymbolicPoint};

fn xor() -> SlidingBlockCode {
    let x = fixtures::full_shift(2).unwrap();
    SlidingBlockCode::from_fn(x.clone(), x, 2, |w| w[0] ^ w[1]).unwrap()
}

fn and() -> SlidingBlockCode {
    let x = fixtures::full_shift(2).unwrap();
    SlidingBlockCode::from_fn(x.clone(), x, 2, |w| w[0] & w[1]).unwrap()
}

fn pt(g: &SftGraph, t: &str) -> SymbolicPoint {
    SymbolicPoint::parse(g.alphabet(), t).unwrap()
}

/// Words of length `k` with a preimage of length `k + w - 1`.
fn brute_image(c: &SlidingBlockCode, k: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = c
        .domain()
        .words_of_length(k + c.window() - 1)
        .iter()
        .map(|w| c.map_word(w).unwrap())
        .collect();
    out.sort();
    out.dedup();
    out
}

#[test]
fn apply_examples() {
    let gm = fixtures::golden_mean().unwrap();
    let x = pt(&gm, "0(01)^inf");
    assert_eq!(apply(&SlidingBlockCode::identity(&gm), &x).unwrap(), x);
    let full = fixtures::full_shift(2).unwrap();
    assert_eq!(
        apply(&xor(), &pt(&full, "(01)^inf")).unwrap(),
        pt(&full, "(1)^inf")
    );
    let ab = SftGraph::full_shift(&alphabet_of(&["a", "b"])).unwrap();
    let a = SftGraph::full_shift(&alphabet_of(&["a"])).unwrap();
    let collapse =
        SlidingBlockCode::symbol_map(ab.clone(), a.clone(), &[("a", "a"), ("b", "a")]).unwrap();
    assert_eq!(
        apply(&collapse, &pt(&ab, "(b)^inf")).unwrap(),
        pt(&a, "(a)^inf")
    );
    assert!(matches!(
        apply(&SlidingBlockCode::identity(&gm), &pt(&gm, "(1)^inf")),
        Err(Error::NotInLanguage(_))
    ));
}

#[test]
fn apply_commutes_with_the_shift() {
    let full = fixtures::full_shift(2).unwrap();
    let x = pt(&full, "0110(001)^inf");
    let c = xor();
    assert_eq!(
        apply(&c, &x.shifted(1)).unwrap(),
        apply(&c, &x).unwrap().shifted(1)
    );
}

#[test]
fn compose_examples() {
    let c = xor();
    let full = fixtures::full_shift(2).unwrap();
    let id = SlidingBlockCode::identity(&full);
    assert_eq!(
        compose(&id, &c).unwrap().normalized().rule(),
        c.normalized().rule()
    );
    let cc = compose(&c, &c).unwrap();
    assert_eq!(cc.window(), 3);
    let x = pt(&full, "(0011)^inf");
    let twice = apply(&c, &apply(&c, &x).unwrap()).unwrap();
    assert_eq!(apply(&cc, &x).unwrap().prefix(16), twice.prefix(16));
    let gm = fixtures::golden_mean().unwrap();
    let into_gm = SlidingBlockCode::identity(&gm);
    assert!(matches!(
        compose(&into_gm, &c),
        Err(Error::CompositionMismatch(_))
    ));
}

#[test]
fn image_examples() {
    let gm = fixtures::golden_mean().unwrap();
    assert!(
        language_equal(&image(&SlidingBlockCode::identity(&gm)), &gm)
            .unwrap()
            .equal
    );
    let full = fixtures::full_shift(2).unwrap();
    let xi = image(&xor());
    assert!(language_equal(&xi, &full).unwrap().equal);
    for k in 1..=6 {
        assert_eq!(brute_image(&xor(), k).len(), 1 << k);
    }
    let ai = image(&and());
    assert!(ai.is_sofic());
    assert!(!ai.accepts(&[1, 0, 1]));
    let lang = Language::of_shift(&ai);
    for k in 1..=6 {
        let brute = brute_image(&and(), k);
        for w in all_words(2, k) {
            assert_eq!(lang.accepts(&w), brute.binary_search(&w).is_ok(), "{w:?}");
        }
    }
}

#[test]
fn restricted_image_is_contained() {
    let gm = fixtures::golden_mean().unwrap();
    let c = xor();
    let r = c.restricted(&gm).unwrap();
    let (small, big) = (
        Language::of_shift(&image(&r)),
        Language::of_shift(&image(&c)),
    );
    assert_eq!(small.included_in(&big).unwrap(), None);
}
