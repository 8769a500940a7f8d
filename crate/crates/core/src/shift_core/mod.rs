//! Alphabets, words, labeled-graph presentations of one-sided shift spaces,
//! the cylinder metric and sofic-language algebra.

mod automata;
mod json;
mod point;

pub use automata::{
    contains, determinize, language_equal, language_included, minimize, Dfa, Language,
    LanguageVerdict,
};
pub use json::SftJson;
pub use point::{distance, CylinderMetric, Dyadic, SymbolicPoint};

use crate::error::{Error, Result};
use std::collections::{BTreeSet, HashMap};

pub type Symbol = usize;
pub type Word = Vec<Symbol>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub label: Symbol,
}

/// Labeled multigraph presenting the shift of label sequences of its
/// infinite paths. Always essential after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SftGraph {
    alphabet: Vec<String>,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    out_start: Vec<usize>,
    deterministic: bool,
    sofic: bool,
}

pub fn validate_alphabet(alphabet: &[String]) -> Result<()> {
    if alphabet.is_empty() {
        return Err(Error::InvalidAlphabet("alphabet is empty".into()));
    }
    let mut seen = BTreeSet::new();
    for s in alphabet {
        if s.is_empty() || s.contains('.') || s.chars().any(char::is_whitespace) {
            return Err(Error::InvalidAlphabet(format!("bad symbol {s:?}")));
        }
        if !seen.insert(s) {
            return Err(Error::InvalidAlphabet(format!("duplicate symbol {s:?}")));
        }
    }
    Ok(())
}

pub fn format_word(alphabet: &[String], word: &[Symbol]) -> String {
    let parts: Vec<&str> = word.iter().map(|&s| alphabet[s].as_str()).collect();
    if alphabet.iter().all(|s| s.chars().count() == 1) {
        parts.concat()
    } else {
        parts.join(".")
    }
}

pub fn parse_word(alphabet: &[String], text: &str) -> Result<Word> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let index: HashMap<&str, usize> = alphabet
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let lookup = |tok: &str| {
        index
            .get(tok)
            .copied()
            .ok_or_else(|| Error::Parse(format!("unknown symbol {tok:?} in word {text:?}")))
    };
    if alphabet.iter().all(|s| s.chars().count() == 1) && !text.contains('.') {
        text.chars().map(|c| lookup(&c.to_string())).collect()
    } else {
        text.split('.').map(lookup).collect()
    }
}

impl SftGraph {
    /// Builds a presentation and prunes it to its essential part.
    pub fn new(alphabet: Vec<String>, vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        validate_alphabet(&alphabet)?;
        for e in &edges {
            if e.label >= alphabet.len() {
                return Err(Error::Schema(format!(
                    "edge label {} outside alphabet",
                    e.label
                )));
            }
            if e.src >= vertices.len() || e.dst >= vertices.len() {
                return Err(Error::Schema("edge endpoint outside vertex set".into()));
            }
        }
        Ok(Self::assemble(alphabet, vertices, edges, false).prune())
    }

    /// Builds from named vertices and symbols.
    pub fn from_named_edges(alphabet: &[&str], edges: &[(&str, &str, &str)]) -> Result<Self> {
        let alphabet: Vec<String> = alphabet.iter().map(|s| s.to_string()).collect();
        validate_alphabet(&alphabet)?;
        let mut vertices: Vec<String> = Vec::new();
        let mut vid = HashMap::new();
        let mut get = |name: &str, vertices: &mut Vec<String>| -> usize {
            *vid.entry(name.to_string()).or_insert_with(|| {
                vertices.push(name.to_string());
                vertices.len() - 1
            })
        };
        let mut out = Vec::new();
        for &(s, d, l) in edges {
            let label = alphabet
                .iter()
                .position(|a| a == l)
                .ok_or_else(|| Error::Schema(format!("label {l:?} not in alphabet")))?;
            let src = get(s, &mut vertices);
            let dst = get(d, &mut vertices);
            out.push(Edge { src, dst, label });
        }
        Self::new(alphabet, vertices, out)
    }

    pub fn empty(alphabet: Vec<String>) -> Result<Self> {
        validate_alphabet(&alphabet)?;
        Ok(Self::assemble(alphabet, Vec::new(), Vec::new(), false))
    }

    /// SFT avoiding the given factors, presented on admissible N-words with
    /// N = (longest forbidden length) - 1.
    pub fn from_forbidden_words(alphabet: &[String], forbidden: &[Word]) -> Result<Self> {
        validate_alphabet(alphabet)?;
        if forbidden.iter().any(|w| w.is_empty()) {
            return Err(Error::Schema("forbidden words must be nonempty".into()));
        }
        if forbidden.iter().flatten().any(|&s| s >= alphabet.len()) {
            return Err(Error::Schema(
                "forbidden word uses a symbol outside the alphabet".into(),
            ));
        }
        let n = forbidden.iter().map(Vec::len).max().unwrap_or(1).max(1) - 1;
        let bad: BTreeSet<&[Symbol]> = forbidden.iter().map(Vec::as_slice).collect();
        let avoids_suffixes = |w: &[Symbol]| (0..w.len()).all(|i| !bad.contains(&w[i..]));
        let mut states: Vec<Word> = vec![Vec::new()];
        for _ in 0..n {
            let mut next = Vec::new();
            for w in &states {
                for a in 0..alphabet.len() {
                    let mut x = w.clone();
                    x.push(a);
                    if avoids_suffixes(&x) {
                        next.push(x);
                    }
                }
            }
            states = next;
        }
        let index: HashMap<&Word, usize> = states.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut edges = Vec::new();
        for (i, w) in states.iter().enumerate() {
            for a in 0..alphabet.len() {
                let mut x = w.clone();
                x.push(a);
                if !avoids_suffixes(&x) {
                    continue;
                }
                let tail = x[1..].to_vec();
                let dst = if n == 0 { 0 } else { index[&tail] };
                edges.push(Edge {
                    src: i,
                    dst,
                    label: a,
                });
            }
        }
        let names = states.iter().map(|w| format_word(alphabet, w)).collect();
        Ok(Self::assemble(alphabet.to_vec(), names, edges, false).prune())
    }

    pub fn full_shift(alphabet: &[String]) -> Result<Self> {
        Self::from_forbidden_words(alphabet, &[])
    }

    pub(crate) fn assemble(
        alphabet: Vec<String>,
        vertices: Vec<String>,
        mut edges: Vec<Edge>,
        sofic: bool,
    ) -> Self {
        edges.sort_by_key(|e| (e.src, e.label, e.dst));
        edges.dedup();
        let mut out_start = vec![0; vertices.len() + 1];
        for e in &edges {
            out_start[e.src + 1] += 1;
        }
        for v in 0..vertices.len() {
            out_start[v + 1] += out_start[v];
        }
        let deterministic = edges
            .windows(2)
            .all(|w| (w[0].src, w[0].label) != (w[1].src, w[1].label));
        SftGraph {
            alphabet,
            vertices,
            edges,
            out_start,
            deterministic,
            sofic,
        }
    }

    /// Removes vertices not on a bi-infinite path.
    pub fn prune(&self) -> Self {
        let nv = self.vertices.len();
        let mut alive = vec![true; nv];
        loop {
            let mut outd = vec![0usize; nv];
            let mut ind = vec![0usize; nv];
            for e in &self.edges {
                if alive[e.src] && alive[e.dst] {
                    outd[e.src] += 1;
                    ind[e.dst] += 1;
                }
            }
            let mut changed = false;
            for v in 0..nv {
                if alive[v] && (outd[v] == 0 || ind[v] == 0) {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.induced(&alive)
    }

    /// Subgraph on the vertices flagged in `keep` (not pruned).
    pub fn induced(&self, keep: &[bool]) -> Self {
        let mut map = vec![usize::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        for (v, name) in self.vertices.iter().enumerate() {
            if keep[v] {
                map[v] = vertices.len();
                vertices.push(name.clone());
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e.src] && keep[e.dst])
            .map(|e| Edge {
                src: map[e.src],
                dst: map[e.dst],
                label: e.label,
            })
            .collect();
        Self::assemble(self.alphabet.clone(), vertices, edges, self.sofic)
    }

    /// Subgraph keeping only the listed edges (by index), then pruned.
    pub fn with_edges(&self, keep: &[bool]) -> Self {
        let edges = self
            .edges
            .iter()
            .zip(keep)
            .filter(|(_, &k)| k)
            .map(|(e, _)| *e)
            .collect();
        Self::assemble(
            self.alphabet.clone(),
            self.vertices.clone(),
            edges,
            self.sofic,
        )
        .prune()
    }

    /// Same graph over a larger alphabet that contains this one.
    pub fn over_alphabet(&self, alphabet: &[String]) -> Result<Self> {
        let map = alphabet_map(&self.alphabet, alphabet)?;
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                label: map[e.label],
                ..*e
            })
            .collect();
        Ok(Self::assemble(
            alphabet.to_vec(),
            self.vertices.clone(),
            edges,
            self.sofic,
        ))
    }

    pub fn marked_sofic(mut self, sofic: bool) -> Self {
        self.sofic = sofic;
        self
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }
    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }
    pub fn is_sofic(&self) -> bool {
        self.sofic
    }
    pub fn out_edges(&self, v: usize) -> &[Edge] {
        &self.edges[self.out_start[v]..self.out_start[v + 1]]
    }

    pub fn symbol_index(&self, name: &str) -> Option<Symbol> {
        self.alphabet.iter().position(|a| a == name)
    }
    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|a| a == name)
    }

    pub fn format(&self, word: &[Symbol]) -> String {
        format_word(&self.alphabet, word)
    }
    pub fn parse(&self, text: &str) -> Result<Word> {
        parse_word(&self.alphabet, text)
    }

    /// Vertices reachable by reading `word` from any vertex of `from`.
    pub fn follow(&self, from: &[usize], word: &[Symbol]) -> Vec<usize> {
        let mut cur: BTreeSet<usize> = from.iter().copied().collect();
        for &a in word {
            let mut next = BTreeSet::new();
            for &v in &cur {
                for e in self.out_edges(v) {
                    if e.label == a {
                        next.insert(e.dst);
                    }
                }
            }
            cur = next;
            if cur.is_empty() {
                break;
            }
        }
        cur.into_iter().collect()
    }

    pub fn all_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).collect()
    }

    /// Whether `word` labels some path.
    pub fn accepts(&self, word: &[Symbol]) -> bool {
        !self.is_empty() && !self.follow(&self.all_vertices(), word).is_empty()
    }

    /// All path labels of length `k`, sorted and deduplicated.
    pub fn words_of_length(&self, k: usize) -> Vec<Word> {
        self.words_from(&self.all_vertices(), k)
    }

    /// All labels of length `k` of paths starting in `start`.
    pub fn words_from(&self, start: &[usize], k: usize) -> Vec<Word> {
        let mut frontier: Vec<(Word, Vec<usize>)> = if start.is_empty() {
            Vec::new()
        } else {
            vec![(Vec::new(), start.to_vec())]
        };
        for _ in 0..k {
            let mut next = Vec::new();
            for (w, set) in &frontier {
                for a in 0..self.alphabet.len() {
                    let s = self.follow(set, &[a]);
                    if !s.is_empty() {
                        let mut x = w.clone();
                        x.push(a);
                        next.push((x, s));
                    }
                }
            }
            frontier = next;
        }
        frontier.into_iter().map(|(w, _)| w).collect()
    }

    /// Synchronizing delay: least N such that every word of length at least
    /// N, read from all vertices, ends at a single vertex. `None` if no such N.
    pub fn memory(&self) -> Option<usize> {
        if self.is_empty() {
            return Some(0);
        }
        let dfa = Dfa::from_graph(self, &self.all_vertices());
        let mut layer: Vec<usize> = vec![dfa.start()];
        let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut has_big = Vec::new();
        loop {
            if let Some(&j) = seen.get(&layer) {
                let last_big = has_big.iter().rposition(|&b| b);
                return match last_big {
                    None => Some(0),
                    Some(i) if i >= j => None,
                    Some(i) => Some(i + 1),
                };
            }
            seen.insert(layer.clone(), has_big.len());
            has_big.push(layer.iter().any(|&s| dfa.subset(s).len() > 1));
            let mut next = BTreeSet::new();
            for &s in &layer {
                for a in 0..self.alphabet.len() {
                    if let Some(t) = dfa.next(s, a) {
                        next.insert(t);
                    }
                }
            }
            layer = next.into_iter().collect();
        }
    }

    /// Disjoint union over a common alphabet (the union of both alphabets).
    pub fn disjoint_union(&self, other: &SftGraph) -> Result<SftGraph> {
        let mut alphabet = self.alphabet.clone();
        for s in &other.alphabet {
            if !alphabet.contains(s) {
                alphabet.push(s.clone());
            }
        }
        let a = self.over_alphabet(&alphabet)?;
        let b = other.over_alphabet(&alphabet)?;
        let off = a.vertices.len();
        let mut vertices = a.vertices.clone();
        vertices.extend(b.vertices.iter().map(|v| format!("{v}'")));
        let mut edges = a.edges.clone();
        edges.extend(b.edges.iter().map(|e| Edge {
            src: e.src + off,
            dst: e.dst + off,
            label: e.label,
        }));
        Ok(Self::assemble(
            alphabet,
            vertices,
            edges,
            self.sofic || other.sofic,
        ))
    }
}

/// Index map from `from` symbols into `to` symbols.
pub fn alphabet_map(from: &[String], to: &[String]) -> Result<Vec<Symbol>> {
    from.iter()
        .map(|s| {
            to.iter()
                .position(|t| t == s)
                .ok_or_else(|| Error::AlphabetMismatch(format!("symbol {s:?} missing")))
        })
        .collect()
}

/// All words of length `k` over `n` symbols, lexicographic.
pub fn all_words(n: usize, k: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * n);
        for w in &out {
            for a in 0..n {
                let mut x = w.clone();
                x.push(a);
                next.push(x);
            }
        }
        out = next;
    }
    out
}

pub fn alphabet_of(symbols: &[&str]) -> Vec<String> {
    symbols.iter().map(|s| s.to_string()).collect()
}
