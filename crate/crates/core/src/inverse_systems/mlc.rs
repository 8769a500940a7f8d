use super::{InverseSequenceSpec, Tail};
use crate::codes::{compose, SlidingBlockCode};
use crate::decomposition::cr_graph;
use crate::error::{Error, Result};
use crate::shift_core::{Language, SftGraph, SftJson, Word};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

pub const DEFAULT_DEPTH_CAP: usize = 32;

/// Memoized images `π_n^m(X_m)` as canonical languages.
#[derive(Debug)]
pub struct ImageTable<'a> {
    seq: &'a InverseSequenceSpec,
    cache: HashMap<(usize, usize), Language>,
}

impl<'a> ImageTable<'a> {
    pub fn new(seq: &'a InverseSequenceSpec) -> Self {
        ImageTable {
            seq,
            cache: HashMap::new(),
        }
    }

    fn key(&self, n: usize, m: usize) -> (usize, usize) {
        let r = self.seq.phase_representative(n);
        (r, m - (n - r))
    }

    /// `π_n^m(X_m)` for `m >= n`.
    pub fn image(&mut self, n: usize, m: usize) -> Result<Language> {
        assert!(m >= n && n >= 1);
        let key = self.key(n, m);
        if let Some(l) = self.cache.get(&key) {
            return Ok(l.clone());
        }
        let (n, m) = key;
        let cached =
            (n + 1..=m).find_map(|k| self.cache.get(&self.key(k, m)).map(|l| (k, l.clone())));
        let (mut k, mut lang) =
            cached.unwrap_or_else(|| (m, Language::of_shift(self.seq.level(m))));
        while k > n {
            k -= 1;
            lang = self.seq.code(k).image_of_language(&lang)?;
            let key = self.key(k, m);
            self.cache.insert(key, lang.clone());
        }
        self.cache.insert((n, m), lang.clone());
        Ok(lang)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum HatStatus {
    /// `π_n^depth(X_depth)` equals the next image.
    Stabilized { depth: usize },
    /// No consecutive equality up to this depth.
    Capped { depth: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HatSpaceResult {
    pub n: usize,
    pub language: Language,
    pub status: HatStatus,
}

impl HatSpaceResult {
    pub fn graph(&self) -> SftGraph {
        self.language.to_shift_graph()
    }
}

/// Eventual image at level `n`, scanning depths `n+1 ..= n+cap`.
pub fn hat_space(seq: &InverseSequenceSpec, n: usize, depth_cap: usize) -> Result<HatSpaceResult> {
    hat_space_with(&mut ImageTable::new(seq), n, depth_cap)
}

fn hat_space_with(table: &mut ImageTable, n: usize, depth_cap: usize) -> Result<HatSpaceResult> {
    if n == 0 || depth_cap < 2 {
        return Err(Error::Schema(
            "hat_space needs n >= 1 and depth_cap >= 2".into(),
        ));
    }
    let mut prev = table.image(n, n + 1)?;
    for m in n + 2..=n + depth_cap {
        let cur = table.image(n, m)?;
        if cur == prev {
            return Ok(HatSpaceResult {
                n,
                language: prev,
                status: HatStatus::Stabilized { depth: m - 1 },
            });
        }
        prev = cur;
    }
    Ok(HatSpaceResult {
        n,
        language: prev,
        status: HatStatus::Capped {
            depth: n + depth_cap,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MlcStatus {
    /// Images from depth `witness` up to the cap coincide.
    Holds {
        witness: usize,
    },
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelVerdict {
    pub level: usize,
    pub mlc1: bool,
    /// Word of `π_n^{n+1}(X_{n+1})` missing from `π_n^{n+2}(X_{n+2})`.
    pub mlc1_counterexample: Option<Word>,
    pub mlc: MlcStatus,
    /// `π_n^m(X_m)` for `m = n ..= n + cap`.
    pub image_chain: Vec<Language>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MlcVerdict {
    pub cap: usize,
    tail: Tail,
    listed: usize,
    pub levels: Vec<LevelVerdict>,
}

impl MlcVerdict {
    pub fn mlc1_everywhere(&self) -> bool {
        self.levels.iter().all(|l| l.mlc1)
    }

    pub fn first_mlc1_failure(&self) -> Option<usize> {
        self.levels.iter().find(|l| !l.mlc1).map(|l| l.level)
    }

    fn representative(&self, n: usize) -> usize {
        if n <= self.listed {
            return n;
        }
        match self.tail {
            Tail::Identity => self.listed,
            Tail::Periodic { block } => {
                self.listed - block + 1 + (n - 1 - (self.listed - block)) % block
            }
        }
    }

    /// MLC witness at any level, transported along the tail.
    pub fn witness(&self, n: usize) -> Option<usize> {
        let r = self.representative(n);
        match self.levels[r - 1].mlc {
            MlcStatus::Holds { witness } => Some(witness + (n - r)),
            MlcStatus::Undetermined => None,
        }
    }

    pub fn to_json(&self) -> VerdictJson {
        VerdictJson {
            cap: self.cap,
            levels: self
                .levels
                .iter()
                .map(|l| {
                    let alphabet = l.image_chain[0].alphabet();
                    LevelVerdictJson {
                        level: l.level,
                        mlc1: l.mlc1,
                        mlc1_counterexample: l
                            .mlc1_counterexample
                            .as_ref()
                            .map(|w| crate::shift_core::format_word(alphabet, w)),
                        mlc: l.mlc,
                        image_states: l.image_chain.iter().map(Language::state_count).collect(),
                        image_chain: l
                            .image_chain
                            .iter()
                            .map(|g| g.to_shift_graph().to_json())
                            .collect(),
                    }
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub cap: usize,
    pub levels: Vec<LevelVerdictJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelVerdictJson {
    pub level: usize,
    pub mlc1: bool,
    pub mlc1_counterexample: Option<String>,
    pub mlc: MlcStatus,
    pub image_states: Vec<usize>,
    pub image_chain: Vec<SftJson>,
}

/// MLC(1) and MLC at every listed level.
pub fn check_mlc(seq: &InverseSequenceSpec, depth_cap: usize) -> Result<MlcVerdict> {
    if depth_cap < 3 {
        return Err(Error::Schema("check_mlc needs depth_cap >= 3".into()));
    }
    let mut table = ImageTable::new(seq);
    let mut levels = Vec::new();
    for n in 1..=seq.listed_levels() {
        let chain = (n..=n + depth_cap)
            .map(|m| table.image(n, m))
            .collect::<Result<Vec<_>>>()?;
        for m in 0..depth_cap {
            if let Some(w) = chain[m + 1].included_in(&chain[m])? {
                return Err(Error::InternalInvariantViolation(format!(
                    "image chain at level {n} grows at depth {}: {}",
                    n + m + 1,
                    crate::shift_core::format_word(chain[m].alphabet(), &w)
                )));
            }
        }
        let mlc1_counterexample = chain[1].included_in(&chain[2])?;
        let last = chain.len() - 1;
        let mut first = last;
        while first > 0 && chain[first - 1] == chain[last] {
            first -= 1;
        }
        let mlc = if first < last {
            MlcStatus::Holds { witness: n + first }
        } else {
            MlcStatus::Undetermined
        };
        levels.push(LevelVerdict {
            level: n,
            mlc1: mlc1_counterexample.is_none(),
            mlc1_counterexample,
            mlc,
            image_chain: chain,
        });
    }
    let verdict = MlcVerdict {
        cap: depth_cap,
        tail: seq.tail(),
        listed: seq.listed_levels(),
        levels,
    };
    if verdict.mlc1_everywhere() {
        for lv in &verdict.levels {
            let n = lv.level;
            let settled = lv.image_chain[1..].iter().all(|l| *l == lv.image_chain[1]);
            let hat = hat_space_with(&mut table, n, depth_cap)?;
            let hat_ok = hat.status == HatStatus::Stabilized { depth: n + 1 }
                && hat.language == lv.image_chain[1];
            if !settled || !hat_ok {
                return Err(Error::InternalInvariantViolation(format!(
                    "MLC(1) holds but the eventual image at level {n} differs from the first image"
                )));
            }
        }
    }
    Ok(verdict)
}

/// Index map `j -> n(j)` of an extracted subsequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsequenceMap {
    /// `n(1), .., n(L')`.
    pub listed: Vec<usize>,
    /// `(block, stride)`: `n(j + block) = n(j) + stride` in the tail;
    /// `None` means unit steps after the last listed entry.
    pub periodic: Option<(usize, usize)>,
}

impl SubsequenceMap {
    pub fn n(&self, j: usize) -> usize {
        assert!(j >= 1);
        let l = self.listed.len();
        if j <= l {
            return self.listed[j - 1];
        }
        match self.periodic {
            None => self.listed[l - 1] + (j - l),
            Some((block, stride)) => {
                let back = (j - l).div_ceil(block);
                self.n(j - back * block) + back * stride
            }
        }
    }
}

fn composed_code(seq: &InverseSequenceSpec, n: usize, m: usize) -> Result<SlidingBlockCode> {
    let mut c = seq.code(m - 1).clone();
    for i in (n..m - 1).rev() {
        c = compose(seq.code(i), &c)?;
    }
    Ok(c)
}

/// Subsequence along MLC witnesses, with composed bonding codes; satisfies
/// MLC(1) (verified before returning).
pub fn extract_mlc1_subsequence(
    seq: &InverseSequenceSpec,
    verdict: &MlcVerdict,
) -> Result<(InverseSequenceSpec, SubsequenceMap)> {
    let l = seq.listed_levels();
    let mut ns = vec![1usize];
    let mut seen_phase: HashMap<usize, usize> = HashMap::new();
    let (cycle_start, stop_at) = loop {
        let n = *ns.last().expect("nonempty");
        match seq.tail() {
            Tail::Identity if n >= l => break (None, ns.len()),
            Tail::Periodic { block } if n > l - block => {
                let phase = (n - 1 - (l - block)) % block;
                if let Some(&j0) = seen_phase.get(&phase) {
                    break (Some(j0), ns.len() - 1);
                }
                seen_phase.insert(phase, ns.len() - 1);
            }
            _ => {}
        }
        let w = verdict
            .witness(n)
            .ok_or(Error::CannotExtract { level: n })?;
        ns.push(w.max(n + 1));
    };
    let listed: Vec<usize> = ns[..stop_at].to_vec();
    let levels: Vec<SftGraph> = listed.iter().map(|&n| seq.level(n).clone()).collect();
    let mut codes = Vec::new();
    for pair in ns[..=stop_at.min(ns.len() - 1)].windows(2) {
        codes.push(composed_code(seq, pair[0], pair[1])?);
    }
    let (tail, periodic) = match cycle_start {
        None => (Tail::Identity, None),
        Some(j0) => {
            let block = stop_at - j0;
            (
                Tail::Periodic { block },
                Some((block, ns[stop_at] - ns[j0])),
            )
        }
    };
    if matches!(tail, Tail::Identity) {
        codes.truncate(levels.len() - 1);
    }
    let out = InverseSequenceSpec::new(levels, codes, tail)?;
    let check = check_mlc(&out, verdict.cap)?;
    if let Some(level) = check.first_mlc1_failure() {
        return Err(Error::InternalInvariantViolation(format!(
            "extracted subsequence fails MLC(1) at level {level}"
        )));
    }
    Ok((out, SubsequenceMap { listed, periodic }))
}

/// Levels replaced by their chain recurrent parts, codes restricted.
pub fn restrict_to_cr(seq: &InverseSequenceSpec, depth_cap: usize) -> Result<InverseSequenceSpec> {
    let verdict = check_mlc(seq, depth_cap)?;
    if let Some(level) = verdict.first_mlc1_failure() {
        return Err(Error::Mlc1Required { level });
    }
    let levels: Vec<SftGraph> = seq.listed().iter().map(cr_graph).collect();
    let l = levels.len();
    let block = match seq.tail() {
        Tail::Identity => 0,
        Tail::Periodic { block } => block,
    };
    let mut codes = Vec::new();
    for (i, c) in seq.listed_codes().iter().enumerate() {
        let dom = if i + 1 < l {
            &levels[i + 1]
        } else {
            &levels[l - block]
        };
        let code = c
            .restricted(dom)
            .and_then(|r| r.with_codomain(&levels[i]))
            .map_err(|e| {
                Error::InternalInvariantViolation(format!("restricted code {}: {e}", i + 1))
            })?;
        codes.push(code);
    }
    let out = InverseSequenceSpec::new(levels, codes, seq.tail())
        .map_err(|e| Error::InternalInvariantViolation(e.to_string()))?;
    let check = check_mlc(&out, depth_cap)?;
    if let Some(level) = check.first_mlc1_failure() {
        return Err(Error::InternalInvariantViolation(format!(
            "restriction to the chain recurrent part fails MLC(1) at level {level}"
        )));
    }
    Ok(out)
}
