use super::{alphabet_map, Edge, SftGraph, Symbol, Word};
use crate::error::Result;
use std::collections::{HashMap, VecDeque};

/// Deterministic automaton with every state accepting; a missing
/// transition rejects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    symbols: usize,
    start: usize,
    trans: Vec<Vec<Option<usize>>>,
    subsets: Vec<Vec<usize>>,
}

type Bits = Vec<u64>;

fn to_bits(n: usize, members: impl IntoIterator<Item = usize>) -> Bits {
    let mut b = vec![0u64; n.div_ceil(64).max(1)];
    for v in members {
        b[v / 64] |= 1 << (v % 64);
    }
    b
}

fn from_bits(b: &Bits) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, &w) in b.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            let t = w.trailing_zeros() as usize;
            out.push(i * 64 + t);
            w &= w - 1;
        }
    }
    out
}

impl Dfa {
    /// Subset construction over the labels of paths starting in `start`.
    pub fn from_graph(g: &SftGraph, start: &[usize]) -> Dfa {
        let n = g.vertex_count();
        let k = g.alphabet().len();
        let init = to_bits(n, start.iter().copied());
        let mut index: HashMap<Bits, usize> = HashMap::new();
        let mut subsets = vec![init.clone()];
        let mut trans: Vec<Vec<Option<usize>>> = Vec::new();
        index.insert(init, 0);
        let mut i = 0;
        while i < subsets.len() {
            let members = from_bits(&subsets[i]);
            let mut succ: Vec<Bits> = vec![to_bits(n, []); k];
            let mut hit = vec![false; k];
            for &v in &members {
                for e in g.out_edges(v) {
                    succ[e.label][e.dst / 64] |= 1 << (e.dst % 64);
                    hit[e.label] = true;
                }
            }
            let mut row = vec![None; k];
            for a in 0..k {
                if !hit[a] {
                    continue;
                }
                let b = std::mem::take(&mut succ[a]);
                let id = match index.get(&b) {
                    Some(&id) => id,
                    None => {
                        subsets.push(b.clone());
                        index.insert(b, subsets.len() - 1);
                        subsets.len() - 1
                    }
                };
                row[a] = Some(id);
            }
            trans.push(row);
            i += 1;
        }
        Dfa {
            symbols: k,
            start: 0,
            trans,
            subsets: subsets.iter().map(from_bits).collect(),
        }
    }

    pub fn start(&self) -> usize {
        self.start
    }
    pub fn state_count(&self) -> usize {
        self.trans.len()
    }
    pub fn symbols(&self) -> usize {
        self.symbols
    }
    pub fn next(&self, s: usize, a: Symbol) -> Option<usize> {
        self.trans[s][a]
    }
    /// Graph vertices tracked by state `s` (empty after minimization).
    pub fn subset(&self, s: usize) -> &[usize] {
        &self.subsets[s]
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        let mut s = self.start;
        for &a in word {
            match self.trans[s][a] {
                Some(t) => s = t,
                None => return false,
            }
        }
        true
    }

    /// Minimal automaton, states numbered in breadth-first order from the
    /// start state with symbols scanned in index order.
    pub fn minimize(&self) -> Dfa {
        let n = self.state_count();
        let dead = n;
        let step = |s: usize, a: usize| -> usize {
            if s == dead {
                dead
            } else {
                self.trans[s][a].unwrap_or(dead)
            }
        };
        let mut class: Vec<usize> = (0..=n).map(|s| usize::from(s != dead)).collect();
        loop {
            let mut sig: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next = vec![0; n + 1];
            for s in 0..=n {
                let key = (
                    class[s],
                    (0..self.symbols).map(|a| class[step(s, a)]).collect(),
                );
                let len = sig.len();
                next[s] = *sig.entry(key).or_insert(len);
            }
            let stable = sig.len()
                == class
                    .iter()
                    .collect::<std::collections::BTreeSet<_>>()
                    .len();
            class = next;
            if stable {
                break;
            }
        }
        let dead_class = class[dead];
        let mut order: HashMap<usize, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut reps = Vec::new();
        if class[self.start] != dead_class {
            order.insert(class[self.start], 0);
            reps.push(self.start);
            queue.push_back(self.start);
        }
        while let Some(s) = queue.pop_front() {
            for a in 0..self.symbols {
                let t = step(s, a);
                let c = class[t];
                if c != dead_class && !order.contains_key(&c) {
                    order.insert(c, reps.len());
                    reps.push(t);
                    queue.push_back(t);
                }
            }
        }
        let trans = reps
            .iter()
            .map(|&s| {
                (0..self.symbols)
                    .map(|a| {
                        let c = class[step(s, a)];
                        (c != dead_class).then(|| order[&c])
                    })
                    .collect()
            })
            .collect::<Vec<_>>();
        let subsets = vec![Vec::new(); reps.len()];
        if reps.is_empty() {
            // Only the empty word survives; keep a lone start state.
            return Dfa {
                symbols: self.symbols,
                start: 0,
                trans: vec![vec![None; self.symbols]],
                subsets: vec![Vec::new()],
            };
        }
        Dfa {
            symbols: self.symbols,
            start: 0,
            trans,
            subsets,
        }
    }

    /// Presentation whose vertices are the automaton states.
    pub fn to_graph(&self, alphabet: &[String]) -> SftGraph {
        let mut edges = Vec::new();
        for (s, row) in self.trans.iter().enumerate() {
            for (a, t) in row.iter().enumerate() {
                if let Some(t) = t {
                    edges.push(Edge {
                        src: s,
                        dst: *t,
                        label: a,
                    });
                }
            }
        }
        let names = (0..self.state_count()).map(|i| format!("q{i}")).collect();
        SftGraph::assemble(alphabet.to_vec(), names, edges, true)
    }
}

type Pair = (Option<usize>, Option<usize>);

/// Shortest word accepted by exactly one side (`symmetric`) or by `a` only.
fn product_search(a: &Dfa, b: &Dfa, symmetric: bool) -> Option<Word> {
    let key = |x: Option<usize>, y: Option<usize>| (x, y);
    let mut prev: HashMap<Pair, (Pair, Symbol)> = HashMap::new();
    let startk = key(Some(a.start), Some(b.start));
    let mut seen = std::collections::HashSet::from([startk]);
    let mut queue = VecDeque::from([startk]);
    while let Some((x, y)) = queue.pop_front() {
        for s in 0..a.symbols {
            let nx = x.and_then(|x| a.trans[x][s]);
            let ny = y.and_then(|y| b.trans[y][s]);
            if nx.is_none() && ny.is_none() {
                continue;
            }
            let k = key(nx, ny);
            if seen.insert(k) {
                prev.insert(k, ((x, y), s));
                let bad = if symmetric {
                    nx.is_some() != ny.is_some()
                } else {
                    nx.is_some() && ny.is_none()
                };
                if bad {
                    let mut word = vec![s];
                    let mut cur = (x, y);
                    while cur != startk {
                        let (p, sym) = prev[&cur];
                        word.push(sym);
                        cur = p;
                    }
                    word.reverse();
                    return Some(word);
                }
                if nx.is_some() && (symmetric || ny.is_some()) {
                    queue.push_back(k);
                }
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageVerdict {
    pub equal: bool,
    /// Shortest word lying in exactly one of the two languages.
    pub witness: Option<Word>,
}

fn aligned(a: &SftGraph, b: &SftGraph) -> Result<SftGraph> {
    if a.alphabet() == b.alphabet() {
        return Ok(b.clone());
    }
    if a.alphabet().len() != b.alphabet().len() {
        return Err(crate::error::Error::AlphabetMismatch(format!(
            "{} vs {} symbols",
            a.alphabet().len(),
            b.alphabet().len()
        )));
    }
    alphabet_map(b.alphabet(), a.alphabet())?;
    b.over_alphabet(a.alphabet())
}

/// Equality of factor languages.
pub fn language_equal(a: &SftGraph, b: &SftGraph) -> Result<LanguageVerdict> {
    let b = aligned(a, b)?;
    let da = Dfa::from_graph(a, &a.all_vertices());
    let db = Dfa::from_graph(&b, &b.all_vertices());
    let witness = product_search(&da, &db, true);
    Ok(LanguageVerdict {
        equal: witness.is_none(),
        witness,
    })
}

/// `None` when every word of `a` is a word of `b`; otherwise a shortest
/// word of `a` missing from `b`.
pub fn language_included(a: &SftGraph, b: &SftGraph) -> Result<Option<Word>> {
    let b = aligned(a, b)?;
    let da = Dfa::from_graph(a, &a.all_vertices());
    let db = Dfa::from_graph(&b, &b.all_vertices());
    Ok(product_search(&da, &db, false))
}

/// Inclusion of the languages of paths starting in the given vertex sets.
pub fn contains(
    outer: (&SftGraph, &[usize]),
    inner: (&SftGraph, &[usize]),
) -> Result<Option<Word>> {
    let ig = aligned(outer.0, inner.0)?;
    let da = Dfa::from_graph(&ig, inner.1);
    let db = Dfa::from_graph(outer.0, outer.1);
    Ok(product_search(&da, &db, false))
}

/// Essential right-resolving presentation from the subset construction.
pub fn determinize(g: &SftGraph) -> SftGraph {
    if g.is_empty() {
        return g.clone();
    }
    let d = Dfa::from_graph(g, &g.all_vertices());
    d.to_graph(g.alphabet()).marked_sofic(g.is_sofic()).prune()
}

/// Minimal deterministic presentation of the factor language.
pub fn minimize(g: &SftGraph) -> SftGraph {
    if g.is_empty() {
        return g.clone();
    }
    let d = Dfa::from_graph(g, &g.all_vertices()).minimize();
    d.to_graph(g.alphabet()).marked_sofic(g.is_sofic()).prune()
}

/// Prefix-closed language read from a set of start vertices, held as a
/// minimal automaton; structural equality is language equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Language {
    alphabet: Vec<String>,
    dfa: Dfa,
}

impl Language {
    /// Labels of finite paths leaving `start`.
    pub fn rooted(g: &SftGraph, start: &[usize]) -> Language {
        let dfa = Dfa::from_graph(g, start).minimize();
        Language {
            alphabet: g.alphabet().to_vec(),
            dfa,
        }
    }

    /// Factor language of the shift presented by an essential graph.
    pub fn of_shift(g: &SftGraph) -> Language {
        Self::rooted(g, &g.all_vertices())
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }
    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }
    pub fn state_count(&self) -> usize {
        self.dfa.state_count()
    }

    /// True when no nonempty word is accepted.
    pub fn is_empty(&self) -> bool {
        self.dfa.trans[self.dfa.start].iter().all(Option::is_none)
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        self.dfa.accepts(word)
    }

    /// Accepted words of length `k`, lexicographic.
    pub fn words(&self, k: usize) -> Vec<Word> {
        let mut frontier = vec![(Vec::new(), self.dfa.start)];
        for _ in 0..k {
            let mut next = Vec::new();
            for (w, s) in &frontier {
                for (a, t) in self.dfa.trans[*s].iter().enumerate() {
                    if let Some(t) = t {
                        let mut x = w.clone();
                        x.push(a);
                        next.push((x, *t));
                    }
                }
            }
            frontier = next;
        }
        frontier.into_iter().map(|(w, _)| w).collect()
    }

    /// Same language over a reordering of the alphabet.
    pub fn over_alphabet(&self, alphabet: &[String]) -> Result<Language> {
        if alphabet == self.alphabet.as_slice() {
            return Ok(self.clone());
        }
        if alphabet.len() != self.alphabet.len() {
            return Err(crate::error::Error::AlphabetMismatch(format!(
                "{} vs {} symbols",
                alphabet.len(),
                self.alphabet.len()
            )));
        }
        let map = alphabet_map(&self.alphabet, alphabet)?;
        let mut trans = vec![vec![None; alphabet.len()]; self.dfa.state_count()];
        for (s, row) in self.dfa.trans.iter().enumerate() {
            for (a, t) in row.iter().enumerate() {
                trans[s][map[a]] = *t;
            }
        }
        let dfa = Dfa {
            symbols: alphabet.len(),
            start: self.dfa.start,
            subsets: vec![Vec::new(); trans.len()],
            trans,
        }
        .minimize();
        Ok(Language {
            alphabet: alphabet.to_vec(),
            dfa,
        })
    }

    /// `None` if every word here lies in `other`, else a shortest word that
    /// does not.
    pub fn included_in(&self, other: &Language) -> Result<Option<Word>> {
        let o = other.over_alphabet(&self.alphabet)?;
        Ok(product_search(&self.dfa, &o.dfa, false))
    }

    pub fn equals(&self, other: &Language) -> Result<LanguageVerdict> {
        let o = other.over_alphabet(&self.alphabet)?;
        if o.dfa == self.dfa {
            return Ok(LanguageVerdict {
                equal: true,
                witness: None,
            });
        }
        let witness = product_search(&self.dfa, &o.dfa, true);
        Ok(LanguageVerdict {
            equal: witness.is_none(),
            witness,
        })
    }

    /// Automaton graph with the start state at index 0 (not pruned).
    pub fn rooted_graph(&self) -> SftGraph {
        self.dfa.to_graph(&self.alphabet).marked_sofic(true)
    }

    /// Essential presentation of the shift whose factor language this is.
    pub fn to_shift_graph(&self) -> SftGraph {
        self.rooted_graph().prune()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift_core::alphabet_of;

    #[test]
    fn minimal_golden_mean_has_two_states() {
        let ab = alphabet_of(&["0", "1"]);
        let g = SftGraph::from_forbidden_words(&ab, &[vec![1, 1]]).unwrap();
        let m = Dfa::from_graph(&g, &g.all_vertices()).minimize();
        // start state (all vertices) coincides with "seen 0"
        assert_eq!(m.state_count(), 2);
    }

    #[test]
    fn product_search_finds_shortest() {
        let ab = alphabet_of(&["0", "1"]);
        let full = SftGraph::full_shift(&ab).unwrap();
        let gm = SftGraph::from_forbidden_words(&ab, &[vec![1, 1]]).unwrap();
        let v = language_equal(&full, &gm).unwrap();
        assert_eq!(v.witness, Some(vec![1, 1]));
        assert_eq!(language_included(&gm, &full).unwrap(), None);
    }
}
