use super::{hat_space, InverseSequenceSpec};
use crate::error::{Error, Result};
use crate::shift_core::{CylinderMetric, Dyadic, Language, Word};
use std::collections::{BTreeSet, HashMap};

pub const MAX_LIMIT_POINTS: u128 = 1_000_000;

/// Which words of the deepest level generate the tuples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitMode {
    /// All words of `X_d`.
    Levels,
    /// Words of the eventual image at level `d`, computed with this cap.
    Extendable { cap: usize },
}

/// Finite stand-in for the inverse limit: tuples of length-`T` windows at
/// levels `1..=d`, with the shift relation between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedLimit {
    pub depth: usize,
    pub word_length: usize,
    pub window_excess: usize,
    /// Lexicographically sorted; `points[i][n - 1]` is the level-`n` window.
    pub points: Vec<Vec<Word>>,
    /// Successors of each point under the shift.
    pub succ: Vec<Vec<usize>>,
    index: HashMap<Vec<Word>, usize>,
}

impl TruncatedLimit {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, tuple: &[Word]) -> Option<usize> {
        self.index.get(tuple).copied()
    }

    /// `max_n 2^-(n-1) d_n`, with `d_n` the window distance at level `n`.
    pub fn distance(&self, i: usize, j: usize) -> Dyadic {
        tuple_distance(&self.points[i], &self.points[j])
    }

    /// Distinct restrictions of the points to the given levels (1-based).
    pub fn project(&self, levels: &[usize]) -> Vec<Vec<Word>> {
        let set: BTreeSet<Vec<Word>> = self
            .points
            .iter()
            .map(|p| levels.iter().map(|&n| p[n - 1].clone()).collect())
            .collect();
        set.into_iter().collect()
    }
}

/// Reindexed tuple metric: coordinate `k` (0-based) weighs `2^-k`.
pub fn tuple_distance(a: &[Word], b: &[Word]) -> Dyadic {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(k, (x, y))| CylinderMetric::word_distance(x, y).scaled(k as u32))
        .max()
        .unwrap_or(Dyadic::Zero)
}

fn count_words(lang: &Language, k: usize) -> u128 {
    let dfa = lang.dfa();
    let mut counts = vec![0u128; dfa.state_count()];
    counts[dfa.start()] = 1;
    for _ in 0..k {
        let mut next = vec![0u128; dfa.state_count()];
        for (s, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for a in 0..dfa.symbols() {
                if let Some(t) = dfa.next(s, a) {
                    next[t] = next[t].saturating_add(c);
                }
            }
        }
        counts = next;
    }
    counts.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

pub fn truncated_limit(
    seq: &InverseSequenceSpec,
    d: usize,
    t: usize,
    mode: LimitMode,
) -> Result<TruncatedLimit> {
    if d == 0 || t == 0 {
        return Err(Error::Schema(
            "truncated limit needs d >= 1 and T >= 1".into(),
        ));
    }
    let lang = match mode {
        LimitMode::Levels => Language::of_shift(seq.level(d)),
        LimitMode::Extendable { cap } => hat_space(seq, d, cap)?.language,
    };
    let excess = seq.window_excess(1, d);
    let len = t + excess;
    let estimate = count_words(&lang, len + 1);
    if estimate > MAX_LIMIT_POINTS {
        return Err(Error::TooLarge {
            estimate,
            limit: MAX_LIMIT_POINTS,
        });
    }
    let tuple = |u: &[usize]| -> Result<Vec<Word>> {
        (1..=d)
            .map(|n| seq.project_word(n, d, u).map(|w| w[..t].to_vec()))
            .collect()
    };
    let mut arcs = Vec::new();
    let mut set = BTreeSet::new();
    for u in lang.words(len + 1) {
        let a = tuple(&u[..len])?;
        let b = tuple(&u[1..])?;
        set.insert(a.clone());
        set.insert(b.clone());
        arcs.push((a, b));
    }
    let points: Vec<Vec<Word>> = set.into_iter().collect();
    let index: HashMap<Vec<Word>, usize> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();
    let mut succ = vec![Vec::new(); points.len()];
    for (a, b) in arcs {
        succ[index[&a]].push(index[&b]);
    }
    for s in &mut succ {
        s.sort_unstable();
        s.dedup();
    }
    Ok(TruncatedLimit {
        depth: d,
        word_length: t,
        window_excess: excess,
        points,
        succ,
        index,
    })
}
