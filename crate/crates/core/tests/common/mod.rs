#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, VecDeque};
use symdyn::codes::SlidingBlockCode;
use symdyn::inverse_systems::{InverseSequenceSpec, Tail};
use symdyn::SftGraph;

fn names(prefix: &str, k: usize) -> Vec<String> {
    (0..k).map(|i| format!("{prefix}{i}")).collect()
}

fn build(alphabet: &[String], edges: &[(usize, usize, usize)]) -> Option<SftGraph> {
    let a: Vec<&str> = alphabet.iter().map(String::as_str).collect();
    let vs: Vec<String> = (0..4).map(|v| format!("v{v}")).collect();
    let e: Vec<(&str, &str, &str)> = edges
        .iter()
        .map(|&(s, d, l)| (vs[s].as_str(), vs[d].as_str(), a[l]))
        .collect();
    let g = SftGraph::from_named_edges(&a, &e).ok()?;
    (!g.is_empty() && g.memory().is_some()).then_some(g)
}

fn random_top(rng: &mut ChaCha8Rng, alphabet: &[String]) -> (SftGraph, Vec<(usize, usize, usize)>) {
    loop {
        let nv = rng.gen_range(1..=4);
        let mut edges = Vec::new();
        for s in 0..nv {
            for d in 0..nv {
                if rng.gen_bool(0.45) {
                    edges.push((s, d, rng.gen_range(0..alphabet.len())));
                }
            }
        }
        if let Some(g) = build(alphabet, &edges) {
            return (g, edges);
        }
    }
}

/// Deterministic inverse sequence with at most four vertices per level,
/// at most five listed levels and an identity tail.
pub fn random_sequence(seed: u64) -> InverseSequenceSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let depth = rng.gen_range(1..=5);
    let top_alpha = names("s5_", rng.gen_range(2..=3));
    let (top, mut edges) = random_top(&mut rng, &top_alpha);
    let mut levels = vec![top];
    let mut alphabets = vec![top_alpha];
    let mut codes = Vec::new();
    for n in (1..depth).rev() {
        let upper = levels.last().expect("nonempty").clone();
        let upper_alpha = alphabets.last().expect("nonempty").clone();
        let alpha = names(&format!("s{n}_"), rng.gen_range(1..=3));
        let windowed = upper_alpha.len() <= 3 && rng.gen_bool(0.25);
        let (level, code) = if windowed {
            let full = SftGraph::full_shift(&alpha).expect("full shift");
            let table: Vec<usize> = (0..upper_alpha.len().pow(2))
                .map(|_| rng.gen_range(0..alpha.len()))
                .collect();
            let k = upper_alpha.len();
            let code = SlidingBlockCode::from_fn(upper.clone(), full.clone(), 2, |w| {
                table[w[0] * k + w[1]]
            })
            .expect("window-2 code into a full shift");
            edges = (0..alpha.len()).map(|l| (0, 0, l)).collect();
            (full, code)
        } else {
            let phi: Vec<usize> = (0..upper_alpha.len())
                .map(|_| rng.gen_range(0..alpha.len()))
                .collect();
            let mut lower: Vec<(usize, usize, usize)> =
                edges.iter().map(|&(s, d, l)| (s, d, phi[l])).collect();
            let nv = edges
                .iter()
                .map(|&(s, d, _)| s.max(d) + 1)
                .max()
                .unwrap_or(1);
            for _ in 0..rng.gen_range(0..=2) {
                lower.push((
                    rng.gen_range(0..nv),
                    rng.gen_range(0..nv),
                    rng.gen_range(0..alpha.len()),
                ));
            }
            let (level, kept) = match build(&alpha, &lower) {
                Some(g) => (g, lower),
                None => (
                    SftGraph::full_shift(&alpha).expect("full shift"),
                    (0..alpha.len()).map(|l| (0, 0, l)).collect(),
                ),
            };
            let pairs: Vec<(&str, &str)> = upper_alpha
                .iter()
                .zip(&phi)
                .map(|(a, &b)| (a.as_str(), alpha[b].as_str()))
                .collect();
            let code = SlidingBlockCode::symbol_map(upper.clone(), level.clone(), &pairs)
                .expect("symbol map");
            edges = kept;
            (level, code)
        };
        levels.push(level);
        alphabets.push(alpha);
        codes.push(code);
    }
    levels.reverse();
    codes.reverse();
    InverseSequenceSpec::new(levels, codes, Tail::Identity).expect("random sequence")
}

/// Vertices reachable from `s` along `adj`.
pub fn reach(adj: &[Vec<usize>], s: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([s]);
    seen[s] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Classes of mutual reachability that carry a cycle, by pairwise search.
pub fn brute_chain_components(adj: &[Vec<usize>]) -> BTreeSet<BTreeSet<usize>> {
    let n = adj.len();
    let r: Vec<Vec<bool>> = (0..n).map(|s| reach(adj, s)).collect();
    let mut out = BTreeSet::new();
    for u in 0..n {
        let on_cycle = adj[u].iter().any(|&v| r[v][u]);
        if on_cycle {
            out.insert((0..n).filter(|&v| r[u][v] && r[v][u]).collect());
        }
    }
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Cyclic classes of a chain component: breadth-first levels modulo the
/// gcd of level defects along internal arcs.
pub fn brute_cyclic_classes(
    adj: &[Vec<usize>],
    comp: &BTreeSet<usize>,
) -> BTreeSet<BTreeSet<usize>> {
    let root = *comp.iter().next().expect("nonempty component");
    let mut level = vec![usize::MAX; adj.len()];
    level[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &v in adj[u].iter().filter(|v| comp.contains(v)) {
            if level[v] == usize::MAX {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut period = 0;
    for &u in comp {
        for &v in adj[u].iter().filter(|v| comp.contains(v)) {
            period = gcd(period, (level[u] + 1).abs_diff(level[v]));
        }
    }
    let mut classes = vec![BTreeSet::new(); period];
    for &u in comp {
        classes[level[u] % period].insert(u);
    }
    classes.into_iter().collect()
}

/// Random admissible word of length `len` in `g`.
pub fn random_walk(g: &SftGraph, rng: &mut ChaCha8Rng, len: usize) -> Vec<usize> {
    let mut v = rng.gen_range(0..g.vertex_count());
    let mut w = Vec::with_capacity(len);
    for _ in 0..len {
        let e = g.out_edges(v).choose(rng).expect("essential graph");
        w.push(e.label);
        v = e.dst;
    }
    w
}
