//! Built-in shifts and inverse sequences used by the self-test, the test
//! suites and the command line.

use crate::codes::SlidingBlockCode;
use crate::error::Result;
use crate::inverse_systems::{InverseSequenceSpec, Tail};
use crate::shift_core::{alphabet_of, SftGraph};
use std::collections::BTreeMap;

fn graph(alphabet: &[String], edges: &[(String, String, String)]) -> Result<SftGraph> {
    let a: Vec<&str> = alphabet.iter().map(String::as_str).collect();
    let e: Vec<(&str, &str, &str)> = edges
        .iter()
        .map(|(s, d, l)| (s.as_str(), d.as_str(), l.as_str()))
        .collect();
    SftGraph::from_named_edges(&a, &e)
}

fn loops(symbols: &[&str]) -> Result<SftGraph> {
    let edges: Vec<_> = symbols
        .iter()
        .map(|s| (format!("v{s}"), format!("v{s}"), s.to_string()))
        .collect();
    graph(&alphabet_of(symbols), &edges)
}

/// Edges of the gap shift "at least `k` zeros after each one" on vertices
/// `{prefix}0..={prefix}k`, vertex `i` counting zeros since the last one.
pub fn gap_shift_edges(
    prefix: &str,
    zero: &str,
    one: &str,
    k: usize,
) -> Vec<(String, String, String)> {
    let v = |i: usize| format!("{prefix}{i}");
    let mut edges = Vec::new();
    for i in 0..=k {
        edges.push((v(i), v((i + 1).min(k)), zero.to_string()));
    }
    edges.push((v(k), v(0), one.to_string()));
    edges
}

pub fn full_shift(k: usize) -> Result<SftGraph> {
    let alphabet: Vec<String> = (0..k).map(|i| i.to_string()).collect();
    SftGraph::full_shift(&alphabet)
}

pub fn golden_mean() -> Result<SftGraph> {
    SftGraph::from_forbidden_words(&alphabet_of(&["0", "1"]), &[vec![1, 1]])
}

/// Two presentations of the even shift: a two-vertex graph and a
/// three-vertex follower-set graph.
pub fn even_shift() -> Result<(SftGraph, SftGraph)> {
    let a = SftGraph::from_named_edges(
        &["0", "1"],
        &[("e", "e", "1"), ("e", "o", "0"), ("o", "e", "0")],
    )?;
    let b = SftGraph::from_named_edges(
        &["0", "1"],
        &[
            ("p", "p", "1"),
            ("p", "q", "0"),
            ("q", "r", "0"),
            ("r", "q", "0"),
            ("r", "p", "1"),
        ],
    )?;
    Ok((a, b))
}

/// Single periodic orbit of period three.
pub fn three_cycle() -> Result<SftGraph> {
    SftGraph::from_named_edges(
        &["a", "b", "c"],
        &[("x", "y", "a"), ("y", "z", "b"), ("z", "x", "c")],
    )
}

/// Two vertices swapping with labels `a`, `b`: period two.
pub fn two_cycle() -> Result<SftGraph> {
    SftGraph::from_named_edges(&["a", "b"], &[("x", "y", "a"), ("y", "x", "b")])
}

/// Fixed points `x`, `y` joined by a transient edge `t`.
pub fn wandering() -> Result<SftGraph> {
    SftGraph::from_named_edges(
        &["x", "t", "y"],
        &[("u", "u", "x"), ("u", "v", "t"), ("v", "v", "y")],
    )
}

/// Three-cycle on `a, b, c` disjoint from the golden mean shift on `0, 1`.
pub fn cycle_and_golden_mean() -> Result<SftGraph> {
    let mut edges = vec![
        ("x".to_string(), "y".to_string(), "a".to_string()),
        ("y".to_string(), "z".to_string(), "b".to_string()),
        ("z".to_string(), "x".to_string(), "c".to_string()),
    ];
    edges.extend(gap_shift_edges("g", "0", "1", 1));
    graph(&alphabet_of(&["a", "b", "c", "0", "1"]), &edges)
}

fn constant_identity(level: SftGraph) -> Result<InverseSequenceSpec> {
    let id = SlidingBlockCode::identity(&level);
    InverseSequenceSpec::constant(level, id)
}

/// Fixed points `a, b, c` with `a -> b -> c -> c` at every level.
pub fn abc_chain() -> Result<InverseSequenceSpec> {
    let x = loops(&["a", "b", "c"])?;
    let code =
        SlidingBlockCode::symbol_map(x.clone(), x.clone(), &[("a", "b"), ("b", "c"), ("c", "c")])?;
    InverseSequenceSpec::constant(x, code)
}

/// Full 2-shift with the window-2 sum mod 2 at every level.
pub fn xor_sequence() -> Result<InverseSequenceSpec> {
    let x = full_shift(2)?;
    let code = SlidingBlockCode::from_fn(x.clone(), x.clone(), 2, |w| w[0] ^ w[1])?;
    InverseSequenceSpec::constant(x, code)
}

pub fn constant_golden_mean() -> Result<InverseSequenceSpec> {
    constant_identity(golden_mean()?)
}

pub fn constant_full_shift() -> Result<InverseSequenceSpec> {
    constant_identity(full_shift(2)?)
}

pub fn constant_three_cycle() -> Result<InverseSequenceSpec> {
    constant_identity(three_cycle()?)
}

pub fn constant_two_cycle() -> Result<InverseSequenceSpec> {
    constant_identity(two_cycle()?)
}

pub fn constant_wandering() -> Result<InverseSequenceSpec> {
    constant_identity(wandering()?)
}

pub fn constant_mixed() -> Result<InverseSequenceSpec> {
    constant_identity(cycle_and_golden_mean()?)
}

/// One level with fixed points `a` and `b`, identity tail.
pub fn two_fixed_points() -> Result<InverseSequenceSpec> {
    InverseSequenceSpec::new(vec![loops(&["a", "b"])?], Vec::new(), Tail::Identity)
}

/// Golden mean at level 1; fixed points `p`, `q` at level 2, both sent to
/// `0`.
pub fn merging() -> Result<InverseSequenceSpec> {
    let x1 = golden_mean()?;
    let x2 = loops(&["p", "q"])?;
    let code = SlidingBlockCode::symbol_map(x2.clone(), x1.clone(), &[("p", "0"), ("q", "0")])?;
    InverseSequenceSpec::new(vec![x1, x2], vec![code], Tail::Identity)
}

/// Level 1: fixed point `a` beside the golden mean on `0, 1`; level 2: the
/// golden mean on `0, 1` mapping into it.
pub fn point_beside_golden_mean() -> Result<InverseSequenceSpec> {
    let mut edges = vec![("s".to_string(), "s".to_string(), "a".to_string())];
    edges.extend(gap_shift_edges("g", "0", "1", 1));
    let x1 = graph(&alphabet_of(&["a", "0", "1"]), &edges)?;
    let x2 = golden_mean()?;
    let code = SlidingBlockCode::symbol_map(x2.clone(), x1.clone(), &[("0", "0"), ("1", "1")])?;
    InverseSequenceSpec::new(vec![x1, x2], vec![code], Tail::Identity)
}

/// Full 2-shift at level 1; level 2 a fixed point `d` beside a full shift
/// on `f0, f1`; level 3 fixed points `g`, `k` beside a full shift on
/// `h0, h1`. Choosing `g` over `h` above the full shift breaks one-step
/// stabilization.
pub fn branching() -> Result<InverseSequenceSpec> {
    let x1 = full_shift(2)?;
    let x2 = SftGraph::from_named_edges(
        &["d", "f0", "f1"],
        &[("D", "D", "d"), ("F", "F", "f0"), ("F", "F", "f1")],
    )?;
    let x3 = SftGraph::from_named_edges(
        &["g", "h0", "h1", "k"],
        &[
            ("G", "G", "g"),
            ("H", "H", "h0"),
            ("H", "H", "h1"),
            ("K", "K", "k"),
        ],
    )?;
    let c1 = SlidingBlockCode::symbol_map(
        x2.clone(),
        x1.clone(),
        &[("d", "0"), ("f0", "0"), ("f1", "1")],
    )?;
    let c2 = SlidingBlockCode::symbol_map(
        x3.clone(),
        x2.clone(),
        &[("g", "f0"), ("h0", "f0"), ("h1", "f1"), ("k", "d")],
    )?;
    InverseSequenceSpec::new(vec![x1, x2, x3], vec![c1, c2], Tail::Identity)
}

/// Full shifts on `0, 1` and `a, b` alternating, relabelling both ways.
pub fn alternating() -> Result<InverseSequenceSpec> {
    let x1 = full_shift(2)?;
    let x2 = SftGraph::full_shift(&alphabet_of(&["a", "b"]))?;
    let down = SlidingBlockCode::symbol_map(x2.clone(), x1.clone(), &[("a", "0"), ("b", "1")])?;
    let up = SlidingBlockCode::symbol_map(x1.clone(), x2.clone(), &[("0", "a"), ("1", "b")])?;
    InverseSequenceSpec::new(vec![x1, x2], vec![down, up], Tail::Periodic { block: 2 })
}

/// Binary address of each level-`n` interval with the creation levels of
/// its two endpoints, in address order.
pub fn interval_endpoints(depth: usize) -> Vec<Vec<(String, usize, usize)>> {
    let mut levels = vec![vec![("0".to_string(), 1, 1), ("1".to_string(), 1, 1)]];
    for n in 2..=depth {
        let prev = levels.last().expect("nonempty");
        let mut next = Vec::new();
        for (s, l, r) in prev {
            next.push((format!("{s}0"), *l, n));
            next.push((format!("{s}1"), n, *r));
        }
        levels.push(next);
    }
    levels
}

/// Levels `1..=depth`: one gap-shift component per level-`n` interval,
/// with gap `min` of its endpoint creation levels and symbols tagged by
/// the address; bonding codes drop the last address bit.
pub fn interval_tower_sequence(depth: usize) -> Result<InverseSequenceSpec> {
    let intervals = interval_endpoints(depth);
    let mut levels = Vec::new();
    for list in &intervals {
        let mut alphabet = Vec::new();
        let mut edges = Vec::new();
        for (s, l, r) in list {
            let (zero, one) = (format!("{s}/0"), format!("{s}/1"));
            edges.extend(gap_shift_edges(&format!("{s}:"), &zero, &one, (*l).min(*r)));
            alphabet.push(zero);
            alphabet.push(one);
        }
        levels.push(graph(&alphabet, &edges)?);
    }
    let mut codes = Vec::new();
    for n in 1..depth {
        let (lower, upper) = (&levels[n - 1], &levels[n]);
        let mut rule = BTreeMap::new();
        for (i, name) in upper.alphabet().iter().enumerate() {
            let (addr, bit) = name.split_once('/').expect("tagged symbol");
            let target = format!("{}/{bit}", &addr[..addr.len() - 1]);
            rule.insert(vec![i], lower.symbol_index(&target).expect("parent symbol"));
        }
        codes.push(SlidingBlockCode::new(
            upper.clone(),
            lower.clone(),
            1,
            rule,
        )?);
    }
    InverseSequenceSpec::new(levels, codes, Tail::Identity)
}

/// Every bundled sequence by name.
pub fn catalog() -> Result<Vec<(&'static str, InverseSequenceSpec)>> {
    Ok(vec![
        ("abc_chain", abc_chain()?),
        ("xor", xor_sequence()?),
        ("golden_mean", constant_golden_mean()?),
        ("full_shift", constant_full_shift()?),
        ("three_cycle", constant_three_cycle()?),
        ("two_cycle", constant_two_cycle()?),
        ("wandering", constant_wandering()?),
        ("mixed", constant_mixed()?),
        ("two_fixed_points", two_fixed_points()?),
        ("merging", merging()?),
        ("point_beside_golden_mean", point_beside_golden_mean()?),
        ("branching", branching()?),
        ("alternating", alternating()?),
        ("interval_tower", interval_tower_sequence(4)?),
    ])
}
