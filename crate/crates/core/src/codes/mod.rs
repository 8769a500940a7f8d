//! Sliding block codes between one-sided shifts: application, composition,
//! restriction and sofic images.

use crate::error::{Error, Result};
use crate::shift_core::{
    alphabet_map, format_word, parse_word, Edge, Language, SftGraph, SftJson, Symbol,
    SymbolicPoint, Word,
};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// Local rule of window `w` (anticipation only) from admissible domain
/// `w`-words to codomain symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlidingBlockCode {
    domain: SftGraph,
    codomain: SftGraph,
    window: usize,
    rule: BTreeMap<Word, Symbol>,
}

impl SlidingBlockCode {
    /// Validates totality on admissible windows and that the image lies in
    /// the codomain.
    pub fn new(
        domain: SftGraph,
        codomain: SftGraph,
        window: usize,
        rule: BTreeMap<Word, Symbol>,
    ) -> Result<Self> {
        let code = Self::unchecked(domain, codomain, window, rule)?;
        if let Some(w) = code
            .image_language()
            .included_in(&Language::of_shift(&code.codomain))?
        {
            return Err(Error::Schema(format!(
                "image word {} is not in the codomain",
                code.codomain.format(&w)
            )));
        }
        Ok(code)
    }

    fn unchecked(
        domain: SftGraph,
        codomain: SftGraph,
        window: usize,
        rule: BTreeMap<Word, Symbol>,
    ) -> Result<Self> {
        if window == 0 {
            return Err(Error::Schema("window must be positive".into()));
        }
        if rule.values().any(|&s| s >= codomain.alphabet().len()) {
            return Err(Error::Schema(
                "rule symbol outside codomain alphabet".into(),
            ));
        }
        let mut kept = BTreeMap::new();
        for w in domain.words_of_length(window) {
            match rule.get(&w) {
                Some(&s) => {
                    kept.insert(w, s);
                }
                None => {
                    return Err(Error::Schema(format!(
                        "rule undefined on admissible word {}",
                        domain.format(&w)
                    )))
                }
            }
        }
        Ok(SlidingBlockCode {
            domain,
            codomain,
            window,
            rule: kept,
        })
    }

    /// Window-1 code from a symbol table.
    pub fn symbol_map(domain: SftGraph, codomain: SftGraph, map: &[(&str, &str)]) -> Result<Self> {
        let mut rule = BTreeMap::new();
        for &(a, b) in map {
            let a = domain
                .symbol_index(a)
                .ok_or_else(|| Error::Schema(format!("unknown domain symbol {a:?}")))?;
            let b = codomain
                .symbol_index(b)
                .ok_or_else(|| Error::Schema(format!("unknown codomain symbol {b:?}")))?;
            rule.insert(vec![a], b);
        }
        Self::new(domain, codomain, 1, rule)
    }

    pub fn identity(g: &SftGraph) -> Self {
        let rule = (0..g.alphabet().len()).map(|a| (vec![a], a)).collect();
        Self::unchecked(g.clone(), g.clone(), 1, rule).expect("identity is total")
    }

    /// Code from a function on windows, tabulated over admissible words.
    pub fn from_fn(
        domain: SftGraph,
        codomain: SftGraph,
        window: usize,
        f: impl Fn(&[Symbol]) -> Symbol,
    ) -> Result<Self> {
        let rule = domain.words_of_length(window).into_iter().map(|w| {
            let s = f(&w);
            (w, s)
        });
        Self::new(domain, codomain, window, rule.collect())
    }

    pub fn domain(&self) -> &SftGraph {
        &self.domain
    }
    pub fn codomain(&self) -> &SftGraph {
        &self.codomain
    }
    pub fn window(&self) -> usize {
        self.window
    }
    pub fn rule(&self) -> &BTreeMap<Word, Symbol> {
        &self.rule
    }

    /// Image of an admissible word of length at least `w`.
    pub fn map_word(&self, word: &[Symbol]) -> Result<Word> {
        if word.len() < self.window {
            return Ok(Vec::new());
        }
        word.windows(self.window)
            .map(|w| {
                self.rule
                    .get(w)
                    .copied()
                    .ok_or_else(|| Error::NotInLanguage(self.domain.format(w)))
            })
            .collect()
    }

    /// Same rule with trailing coordinates the rule ignores removed.
    pub fn normalized(&self) -> Self {
        let mut code = self.clone();
        while code.window > 1 {
            let mut shorter: BTreeMap<Word, Symbol> = BTreeMap::new();
            let mut ok = true;
            for (w, &s) in &code.rule {
                let head = w[..w.len() - 1].to_vec();
                match shorter.get(&head) {
                    Some(&t) if t != s => {
                        ok = false;
                        break;
                    }
                    _ => {
                        shorter.insert(head, s);
                    }
                }
            }
            if !ok {
                break;
            }
            code.window -= 1;
            code.rule = shorter;
        }
        code
    }

    /// Same rule on a subshift of the domain (given by a graph over the
    /// domain alphabet).
    pub fn restricted(&self, domain: &SftGraph) -> Result<Self> {
        let sub = domain.over_alphabet(self.domain.alphabet())?;
        if let Some(w) = Language::of_shift(&sub).included_in(&Language::of_shift(&self.domain))? {
            return Err(Error::NotInLanguage(self.domain.format(&w)));
        }
        Self::unchecked(sub, self.codomain.clone(), self.window, self.rule.clone())
    }

    /// Same rule between replacement presentations of the same alphabets
    /// (symbols matched by name).
    pub fn rebound(&self, domain: &SftGraph, codomain: &SftGraph) -> Result<Self> {
        let dmap = alphabet_map(self.domain.alphabet(), domain.alphabet())?;
        let cmap = alphabet_map(self.codomain.alphabet(), codomain.alphabet())?;
        let rule = self
            .rule
            .iter()
            .map(|(w, &s)| (w.iter().map(|&a| dmap[a]).collect(), cmap[s]))
            .collect();
        Self::new(domain.clone(), codomain.clone(), self.window, rule)
    }

    /// Same rule with a replacement codomain containing the image.
    pub fn with_codomain(&self, codomain: &SftGraph) -> Result<Self> {
        let map = alphabet_map(self.codomain.alphabet(), codomain.alphabet())?;
        let rule = self
            .rule
            .iter()
            .map(|(w, &s)| (w.clone(), map[s]))
            .collect();
        Self::new(self.domain.clone(), codomain.clone(), self.window, rule)
    }

    /// Labeled graph carrying the images of paths of `g` (a graph over the
    /// domain alphabet), with `start` transported; vertices are paths of
    /// `w - 1` edges.
    pub fn image_graph(&self, g: &SftGraph, start: &[usize]) -> Result<(SftGraph, Vec<usize>)> {
        let g = if g.alphabet() == self.domain.alphabet() {
            g.clone()
        } else {
            g.over_alphabet(self.domain.alphabet())?
        };
        let w = self.window;
        // Paths of w-1 edges as (first vertex, edge indices).
        let mut paths: Vec<(usize, Vec<usize>)> =
            (0..g.vertex_count()).map(|v| (v, Vec::new())).collect();
        let edge_index: HashMap<Edge, usize> =
            g.edges().iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let end = |p: &(usize, Vec<usize>)| p.1.last().map_or(p.0, |&e| g.edges()[e].dst);
        for _ in 1..w {
            let mut next = Vec::new();
            for p in &paths {
                for e in g.out_edges(end(p)) {
                    let mut q = p.clone();
                    q.1.push(edge_index[e]);
                    next.push(q);
                }
            }
            paths = next;
        }
        let id: HashMap<&(usize, Vec<usize>), usize> =
            paths.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut edges = Vec::new();
        for (i, p) in paths.iter().enumerate() {
            let labels: Word = p.1.iter().map(|&e| g.edges()[e].label).collect();
            for e in g.out_edges(end(p)) {
                let mut word = labels.clone();
                word.push(e.label);
                let Some(&sym) = self.rule.get(&word) else {
                    return Err(Error::NotInLanguage(g.format(&word)));
                };
                let mut tail = p.1.clone();
                tail.push(edge_index[e]);
                let q = (g.edges()[tail[0]].dst, tail[1..].to_vec());
                edges.push(Edge {
                    src: i,
                    dst: id[&q],
                    label: sym,
                });
            }
        }
        let mut in_start = vec![false; g.vertex_count()];
        start.iter().for_each(|&v| in_start[v] = true);
        let new_start = paths
            .iter()
            .enumerate()
            .filter(|(_, p)| in_start[p.0])
            .map(|(i, _)| i)
            .collect();
        let names = (0..paths.len()).map(|i| format!("p{i}")).collect();
        let h = SftGraph::assemble(self.codomain.alphabet().to_vec(), names, edges, true);
        Ok((h, new_start))
    }

    /// Image of the language read from `start` in `g`.
    pub fn image_rooted(&self, g: &SftGraph, start: &[usize]) -> Result<Language> {
        let (h, s) = self.image_graph(g, start)?;
        Ok(Language::rooted(&h, &s))
    }

    /// Image of a prefix-closed language over the domain alphabet.
    pub fn image_of_language(&self, lang: &Language) -> Result<Language> {
        let g = lang.rooted_graph();
        self.image_rooted(&g, &[0])
    }

    /// Factor language of the image of the whole domain.
    pub fn image_language(&self) -> Language {
        self.image_rooted(&self.domain, &self.domain.all_vertices())
            .expect("rule total on the domain")
    }
}

/// `y_i = rule(x_i .. x_{i+w-1})`.
pub fn apply(c: &SlidingBlockCode, x: &SymbolicPoint) -> Result<SymbolicPoint> {
    if !c.domain.contains_point(x) {
        return Err(Error::NotInLanguage(x.format(c.domain.alphabet())));
    }
    let pre = x.preperiod().len();
    let per = x.period().len();
    let read = |i: usize| -> Symbol {
        let w: Word = (i..i + c.window).map(|j| x.at(j)).collect();
        c.rule[&w]
    };
    let head = (0..pre).map(read).collect();
    let cycle = (pre..pre + per).map(read).collect();
    SymbolicPoint::new(head, cycle)
}

/// `outer ∘ inner`, of window `w_inner + w_outer - 1`.
pub fn compose(outer: &SlidingBlockCode, inner: &SlidingBlockCode) -> Result<SlidingBlockCode> {
    let mid = outer.domain.alphabet();
    let map = alphabet_map(inner.codomain.alphabet(), mid)
        .map_err(|e| Error::CompositionMismatch(e.to_string()))?;
    let translated = inner
        .rule
        .iter()
        .map(|(w, &s)| (w.clone(), map[s]))
        .collect();
    let relabeled = SlidingBlockCode::unchecked(
        inner.domain.clone(),
        outer.domain.clone(),
        inner.window,
        translated,
    )?;
    if let Some(w) = relabeled
        .image_language()
        .included_in(&Language::of_shift(&outer.domain))?
    {
        return Err(Error::CompositionMismatch(format!(
            "inner image word {} is outside the outer domain",
            format_word(mid, &w)
        )));
    }
    let window = inner.window + outer.window - 1;
    let mut rule = BTreeMap::new();
    for w in inner.domain.words_of_length(window) {
        let mid_word = relabeled.map_word(&w)?;
        let s = outer.rule.get(&mid_word).copied().ok_or_else(|| {
            Error::CompositionMismatch(format!(
                "outer rule undefined on {}",
                format_word(mid, &mid_word)
            ))
        })?;
        rule.insert(w, s);
    }
    SlidingBlockCode::unchecked(inner.domain.clone(), outer.codomain.clone(), window, rule)
}

/// Minimal deterministic presentation of the image shift.
pub fn image(c: &SlidingBlockCode) -> SftGraph {
    c.image_language().to_shift_graph()
}

/// Serialized code. Inside a sequence file the domain and codomain may be
/// omitted and are then taken from the adjacent levels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeJson {
    pub window: usize,
    pub rule: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<SftJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain: Option<SftJson>,
}

impl CodeJson {
    pub fn to_code(&self) -> Result<SlidingBlockCode> {
        let missing = || Error::Schema("code needs both domain and codomain".into());
        let domain = self.domain.as_ref().ok_or_else(missing)?.to_graph()?;
        let codomain = self.codomain.as_ref().ok_or_else(missing)?.to_graph()?;
        self.to_code_between(&domain, &codomain)
    }

    /// Builds the code against already loaded graphs.
    pub fn to_code_between(
        &self,
        domain: &SftGraph,
        codomain: &SftGraph,
    ) -> Result<SlidingBlockCode> {
        let mut rule = BTreeMap::new();
        for (k, v) in &self.rule {
            let w = parse_word(domain.alphabet(), k).map_err(|e| Error::Schema(e.to_string()))?;
            if w.len() != self.window {
                return Err(Error::Schema(format!(
                    "rule key {k:?} has length {} != window",
                    w.len()
                )));
            }
            let s = codomain.symbol_index(v).ok_or_else(|| {
                Error::Schema(format!("rule value {v:?} not in codomain alphabet"))
            })?;
            rule.insert(w, s);
        }
        SlidingBlockCode::new(domain.clone(), codomain.clone(), self.window, rule)
    }

    pub fn from_code(c: &SlidingBlockCode) -> Self {
        CodeJson {
            window: c.window,
            rule: c
                .rule
                .iter()
                .map(|(w, &s)| (c.domain.format(w), c.codomain.alphabet()[s].clone()))
                .collect(),
            domain: Some(c.domain.to_json()),
            codomain: Some(c.codomain.to_json()),
        }
    }

    /// Rule table only, for embedding in a sequence file.
    pub fn from_code_bare(c: &SlidingBlockCode) -> Self {
        CodeJson {
            domain: None,
            codomain: None,
            ..Self::from_code(c)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift_core::alphabet_of;

    #[test]
    fn xor_of_alternating_is_ones() {
        let g = SftGraph::full_shift(&alphabet_of(&["0", "1"])).unwrap();
        let xor = SlidingBlockCode::from_fn(g.clone(), g, 2, |w| w[0] ^ w[1]).unwrap();
        let x = SymbolicPoint::periodic(vec![0, 1]).unwrap();
        assert_eq!(apply(&xor, &x).unwrap(), SymbolicPoint::constant(1));
    }

    #[test]
    fn and_image_forbids_101() {
        let g = SftGraph::full_shift(&alphabet_of(&["0", "1"])).unwrap();
        let and = SlidingBlockCode::from_fn(g.clone(), g, 2, |w| w[0] & w[1]).unwrap();
        let lang = and.image_language();
        assert!(!lang.accepts(&[1, 0, 1]));
        assert!(lang.accepts(&[1, 0, 0, 1]));
    }
}
