//! Chain recurrence, chain components, cyclic classes, entropy and
//! resolution-`K` chain reachability for shifts presented by labeled graphs.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::shift_core::{minimize, Edge, SftGraph, SftJson, Symbol, Word};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};

/// Strongly connected components of an adjacency list, each sorted, listed
/// by smallest member.
pub fn sccs(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = work.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(p, _)) = work.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
    }
    out.sort_by_key(|c| c[0]);
    out
}

fn adjacency(g: &SftGraph) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); g.vertex_count()];
    for e in g.edges() {
        adj[e.src].push(e.dst);
    }
    adj
}

/// Basic sets of a presentation together with the transient remainder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentDecomposition {
    /// Irreducible pieces, each induced on `vertex_sets[i]`.
    pub components: Vec<SftGraph>,
    /// Vertex ids of each piece in the source graph.
    pub vertex_sets: Vec<Vec<usize>>,
    pub cr_graph: SftGraph,
    pub transient_edges: Vec<Edge>,
}

impl ComponentDecomposition {
    /// Component containing vertex `v` of the source graph.
    pub fn component_of(&self, v: usize) -> Option<usize> {
        self.vertex_sets
            .iter()
            .position(|s| s.binary_search(&v).is_ok())
    }
}

pub fn chain_components(g: &SftGraph) -> ComponentDecomposition {
    let adj = adjacency(g);
    let mut vertex_sets = Vec::new();
    for comp in sccs(&adj) {
        let cyclic = comp.len() > 1 || adj[comp[0]].contains(&comp[0]);
        if cyclic {
            vertex_sets.push(comp);
        }
    }
    let mut which = vec![usize::MAX; g.vertex_count()];
    for (i, s) in vertex_sets.iter().enumerate() {
        for &v in s {
            which[v] = i;
        }
    }
    let components = vertex_sets
        .iter()
        .map(|s| {
            let mut keep = vec![false; g.vertex_count()];
            s.iter().for_each(|&v| keep[v] = true);
            g.induced(&keep)
        })
        .collect();
    let in_cr: Vec<bool> = which.iter().map(|&c| c != usize::MAX).collect();
    let transient_edges = g
        .edges()
        .iter()
        .filter(|e| which[e.src] == usize::MAX || which[e.src] != which[e.dst])
        .copied()
        .collect();
    let keep_edges: Vec<bool> = g
        .edges()
        .iter()
        .map(|e| in_cr[e.src] && which[e.src] == which[e.dst])
        .collect();
    let cr_graph = g.with_edges(&keep_edges);
    ComponentDecomposition {
        components,
        vertex_sets,
        cr_graph,
        transient_edges,
    }
}

/// Restriction of a presentation to its chain recurrent part.
pub fn cr_graph(g: &SftGraph) -> SftGraph {
    chain_components(g).cr_graph
}

pub fn is_irreducible(g: &SftGraph) -> bool {
    !g.is_empty() && sccs(&adjacency(g)).len() == 1
}

/// Period and cyclic classes of an irreducible presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicStructure {
    pub period: usize,
    /// `classes[i]` maps into `classes[(i + 1) % period]`; class 0 holds
    /// vertex 0.
    pub classes: Vec<Vec<usize>>,
    pub mixing: bool,
}

impl CyclicStructure {
    pub fn class_of(&self, v: usize) -> usize {
        self.classes
            .iter()
            .position(|c| c.binary_search(&v).is_ok())
            .expect("vertex in some class")
    }
}

pub fn cyclic_structure(g: &SftGraph) -> Result<CyclicStructure> {
    let comps = sccs(&adjacency(g)).len();
    if g.is_empty() || comps != 1 {
        return Err(Error::NotIrreducible { components: comps });
    }
    let n = g.vertex_count();
    let mut dist = vec![usize::MAX; n];
    dist[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for e in g.out_edges(v) {
            if dist[e.dst] == usize::MAX {
                dist[e.dst] = dist[v] + 1;
                queue.push_back(e.dst);
            }
        }
    }
    let mut m = 0usize;
    for e in g.edges() {
        let diff = (dist[e.src] as i64 + 1 - dist[e.dst] as i64).unsigned_abs() as usize;
        m = num_integer::gcd(m, diff);
    }
    let mut classes = vec![Vec::new(); m];
    for v in 0..n {
        classes[dist[v] % m].push(v);
    }
    Ok(CyclicStructure {
        period: m,
        mixing: m == 1,
        classes,
    })
}

/// Topological entropy in nats, as the log Perron value of a right-resolving
/// presentation.
pub fn entropy<F: Real>(g: &SftGraph) -> Result<F> {
    if g.is_empty() {
        return Err(Error::EmptyShift);
    }
    let det = if g.is_deterministic() {
        g.clone()
    } else {
        minimize(g)
    };
    let dec = chain_components(&det);
    let mut best = F::zero();
    let mut any_positive = false;
    for comp in &dec.components {
        if comp.edges().len() == comp.vertex_count() {
            continue;
        }
        any_positive = true;
        let rho = perron_value::<F>(comp);
        if rho > best {
            best = rho;
        }
    }
    if !any_positive {
        return Ok(F::zero());
    }
    Ok(best.ln())
}

/// Whether the entropy is positive, decided from graph structure alone.
pub fn has_positive_entropy(g: &SftGraph) -> bool {
    if g.is_empty() {
        return false;
    }
    let det = if g.is_deterministic() {
        g.clone()
    } else {
        minimize(g)
    };
    chain_components(&det)
        .components
        .iter()
        .any(|c| c.edges().len() > c.vertex_count())
}

/// Spectral radius of an irreducible graph's adjacency matrix.
fn perron_value<F: Real>(g: &SftGraph) -> F {
    let n = g.vertex_count();
    let tol = F::from_f64(1e-12)
        .unwrap()
        .max(F::epsilon() * F::from_f64(64.0).unwrap());
    let mut x = vec![F::one(); n];
    let mut estimate = F::one();
    for _ in 0..2_000_000 {
        // (A + I) x keeps the iteration aperiodic.
        let mut y = x.clone();
        for e in g.edges() {
            y[e.src] = y[e.src] + x[e.dst];
        }
        let mut lo = F::infinity();
        let mut hi = F::zero();
        for i in 0..n {
            let r = y[i] / x[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let norm = y.iter().fold(F::zero(), |a, &b| a.max(b));
        x = y.into_iter().map(|v| v / norm).collect();
        estimate = (lo + hi) / (F::one() + F::one());
        if (hi - lo) <= tol * hi {
            break;
        }
    }
    estimate - F::one()
}

/// Outcome of a chain search at a fixed resolution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainWitness {
    pub reachable: bool,
    /// Length-`K` windows of the chain points, first to last.
    pub chain: Vec<Word>,
}

/// Existence of a `2^-K`-chain from the cylinder of `from` to the cylinder
/// of `to`, optionally with length congruent to `r` modulo `m`.
pub fn delta_chain_reachable(
    g: &SftGraph,
    from: &[Symbol],
    to: &[Symbol],
    k: usize,
    length_constraint: Option<(usize, usize)>,
) -> Result<ChainWitness> {
    for w in [from, to] {
        if w.len() < k {
            return Err(Error::Schema(format!("word shorter than resolution {k}")));
        }
        if !g.accepts(w) {
            return Err(Error::NotInLanguage(g.format(w)));
        }
    }
    let (m, r) = length_constraint.unwrap_or((1, 0));
    if m == 0 {
        return Err(Error::Schema("modulus must be positive".into()));
    }
    let r = r % m;
    let nodes = g.words_of_length(k);
    let id: HashMap<&Word, usize> = nodes.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut succ = vec![Vec::new(); nodes.len()];
    for w in g.words_of_length(k + 1) {
        succ[id[&w[..k].to_vec()]].push(id[&w[1..].to_vec()]);
    }
    let target = id[&to[..k].to_vec()];
    let start = id[&from[..k].to_vec()];
    let compatible = {
        let l = from.len().min(to.len());
        from[..l] == to[..l] && g.accepts(if from.len() > to.len() { from } else { to })
    };
    if r == 0 && compatible {
        return Ok(ChainWitness {
            reachable: true,
            chain: vec![from[..k].to_vec()],
        });
    }
    // First step is pinned when the source word is longer than K.
    let firsts: Vec<usize> = if from.len() > k {
        vec![id[&from[1..=k].to_vec()]]
    } else {
        succ[start].clone()
    };
    let mut prev: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    let mut queue = VecDeque::new();
    for f in firsts {
        let s = (f, 1 % m);
        if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(s) {
            e.insert((start, 0));
            queue.push_back(s);
        }
    }
    while let Some((v, phase)) = queue.pop_front() {
        if v == target && phase == r && to_extends(g, &nodes[v], to) {
            let mut chain = vec![nodes[v].clone()];
            let mut cur = (v, phase);
            while let Some(&p) = prev.get(&cur) {
                chain.push(nodes[p.0].clone());
                if p == (start, 0) {
                    break;
                }
                cur = p;
            }
            chain.reverse();
            return Ok(ChainWitness {
                reachable: true,
                chain,
            });
        }
        for &w in &succ[v] {
            let s = (w, (phase + 1) % m);
            if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(s) {
                e.insert((v, phase));
                queue.push_back(s);
            }
        }
    }
    Ok(ChainWitness {
        reachable: false,
        chain: Vec::new(),
    })
}

fn to_extends(g: &SftGraph, window: &[Symbol], to: &[Symbol]) -> bool {
    to.starts_with(window) && g.accepts(to)
}

/// Graph on admissible `K`-words with an edge per admissible `(K+1)`-word,
/// labeled by its first symbol.
pub fn block_graph(g: &SftGraph, k: usize) -> SftGraph {
    let nodes = g.words_of_length(k);
    let id: HashMap<&Word, usize> = nodes.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let edges = g
        .words_of_length(k + 1)
        .iter()
        .map(|w| Edge {
            src: id[&w[..k].to_vec()],
            dst: id[&w[1..].to_vec()],
            label: w[0],
        })
        .collect();
    let names = nodes.iter().map(|w| g.format(w)).collect();
    SftGraph::assemble(g.alphabet().to_vec(), names, edges, g.is_sofic())
}

/// Least `N` such that any two `2^-K`-chain-related windows of an irreducible
/// graph are joined by chains of every length `m·n` with `n ≥ N`.
pub fn chain_connection_index(g: &SftGraph, k: usize) -> Result<usize> {
    let b = block_graph(g, k);
    let cs = cyclic_structure(&b)?;
    let m = cs.period;
    let n = b.vertex_count();
    let mut a = vec![vec![false; n]; n];
    for e in b.edges() {
        a[e.src][e.dst] = true;
    }
    let mul = |x: &Vec<Vec<bool>>, y: &Vec<Vec<bool>>| -> Vec<Vec<bool>> {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).any(|t| x[i][t] && y[t][j])).collect())
            .collect()
    };
    let mut step = a.clone();
    for _ in 1..m {
        step = mul(&step, &a);
    }
    let class: Vec<usize> = (0..n).map(|v| cs.class_of(v)).collect();
    let mut power = step.clone();
    for count in 1..=(4 * n * n + 4) {
        if (0..n).all(|i| (0..n).all(|j| class[i] != class[j] || power[i][j])) {
            return Ok(count);
        }
        power = mul(&power, &step);
    }
    Err(Error::InternalInvariantViolation(
        "chain connection index not found".into(),
    ))
}

/// Serializable summary of the structure of one shift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub components: Vec<ComponentReport>,
    pub period: Option<usize>,
    pub classes: Option<Vec<Vec<String>>>,
    pub entropy_nats: f64,
    pub mixing: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub vertices: Vec<String>,
    pub period: usize,
    pub classes: Vec<Vec<String>>,
    pub entropy_nats: f64,
    pub mixing: bool,
    pub graph: SftJson,
}

pub fn decomposition_report(g: &SftGraph) -> Result<DecompositionReport> {
    let dec = chain_components(g);
    let name = |gr: &SftGraph, c: &CyclicStructure| -> Vec<Vec<String>> {
        c.classes
            .iter()
            .map(|cl| cl.iter().map(|&v| gr.vertices()[v].clone()).collect())
            .collect()
    };
    let mut components = Vec::new();
    for comp in &dec.components {
        let cs = cyclic_structure(comp)?;
        components.push(ComponentReport {
            vertices: comp.vertices().to_vec(),
            period: cs.period,
            classes: name(comp, &cs),
            entropy_nats: entropy::<f64>(comp)?,
            mixing: cs.mixing,
            graph: comp.to_json(),
        });
    }
    let whole = if is_irreducible(g) {
        Some(cyclic_structure(g)?)
    } else {
        None
    };
    Ok(DecompositionReport {
        components,
        period: whole.as_ref().map(|c| c.period),
        classes: whole.as_ref().map(|c| name(g, c)),
        entropy_nats: entropy::<f64>(g)?,
        mixing: whole.as_ref().map(|c| c.mixing),
    })
}
