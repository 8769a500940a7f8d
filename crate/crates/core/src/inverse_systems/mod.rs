//! Finitely presented inverse sequences of shifts of finite type: eventual
//! images, Mittag-Leffler analysis, subsequence extraction, restriction to
//! the chain recurrent part and truncated inverse limits.

mod limit;
mod mlc;

pub use limit::{truncated_limit, tuple_distance, LimitMode, TruncatedLimit, MAX_LIMIT_POINTS};
pub use mlc::{
    check_mlc, extract_mlc1_subsequence, hat_space, restrict_to_cr, HatSpaceResult, HatStatus,
    ImageTable, LevelVerdict, LevelVerdictJson, MlcStatus, MlcVerdict, SubsequenceMap, VerdictJson,
    DEFAULT_DEPTH_CAP,
};

use crate::codes::{CodeJson, SlidingBlockCode};
use crate::error::{Error, Result};
use crate::shift_core::{Language, SftGraph, SftJson};
use serde::{Deserialize, Serialize};

/// Behaviour beyond the listed levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tail {
    /// Last level repeats with identity bonding maps.
    Identity,
    /// The last `block` levels and codes repeat; the final code maps the
    /// first level of the block onto the last listed level.
    Periodic { block: usize },
}

/// Levels `X_1, .., X_L` with bonding codes `X_{n+1} -> X_n`, extended to
/// all `n >= 1` by the tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseSequenceSpec {
    levels: Vec<SftGraph>,
    codes: Vec<SlidingBlockCode>,
    tail: Tail,
    identity: Option<SlidingBlockCode>,
}

impl InverseSequenceSpec {
    /// Validates adjacency of codes and levels and rebinds each code to the
    /// level presentations.
    pub fn new(levels: Vec<SftGraph>, codes: Vec<SlidingBlockCode>, tail: Tail) -> Result<Self> {
        let l = levels.len();
        if l == 0 {
            return Err(Error::Schema("sequence needs at least one level".into()));
        }
        let expected = match tail {
            Tail::Identity => l - 1,
            Tail::Periodic { block } => {
                if block == 0 || block > l {
                    return Err(Error::Schema(format!(
                        "periodic block {block} outside 1..={l}"
                    )));
                }
                l
            }
        };
        if codes.len() != expected {
            return Err(Error::Schema(format!(
                "expected {expected} codes, found {}",
                codes.len()
            )));
        }
        for (i, g) in levels.iter().enumerate() {
            if g.is_empty() {
                return Err(Error::Schema(format!("level {} is empty", i + 1)));
            }
            if g.memory().is_none() {
                return Err(Error::Schema(format!(
                    "level {} needs a presentation with finite memory",
                    i + 1
                )));
            }
        }
        let mut bound = Vec::with_capacity(codes.len());
        for (i, c) in codes.iter().enumerate() {
            let dom_idx = if i + 1 < l { i + 1 } else { l - block_of(tail) };
            let dom = &levels[dom_idx];
            let cod = &levels[i];
            for (side, given, level) in [
                ("domain", c.domain(), dom_idx),
                ("codomain", c.codomain(), i),
            ] {
                let want = Language::of_shift(&levels[level]);
                let have = Language::of_shift(given);
                let same = have.alphabet().len() == want.alphabet().len()
                    && have.equals(&want).map(|v| v.equal).unwrap_or(false);
                if !same {
                    return Err(Error::Schema(format!(
                        "code {} {side} does not match level {}",
                        i + 1,
                        level + 1
                    )));
                }
            }
            bound.push(c.rebound(dom, cod)?);
        }
        let identity =
            matches!(tail, Tail::Identity).then(|| SlidingBlockCode::identity(&levels[l - 1]));
        Ok(InverseSequenceSpec {
            levels,
            codes: bound,
            tail,
            identity,
        })
    }

    /// Sequence with one repeated level and one repeated code.
    pub fn constant(level: SftGraph, code: SlidingBlockCode) -> Result<Self> {
        Self::new(vec![level], vec![code], Tail::Periodic { block: 1 })
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Number of listed levels; levels `1..=L` meet every tail phase.
    pub fn listed_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn listed(&self) -> &[SftGraph] {
        &self.levels
    }

    pub fn listed_codes(&self) -> &[SlidingBlockCode] {
        &self.codes
    }

    /// Listed level index (0-based) presenting level `n` (1-based).
    pub fn level_slot(&self, n: usize) -> usize {
        assert!(n >= 1, "levels are numbered from 1");
        let l = self.levels.len();
        let i = n - 1;
        if i < l {
            return i;
        }
        match self.tail {
            Tail::Identity => l - 1,
            Tail::Periodic { block } => l - block + (i - (l - block)) % block,
        }
    }

    /// Representative level in `1..=L` with the same level and code from
    /// there on.
    pub fn phase_representative(&self, n: usize) -> usize {
        let l = self.levels.len();
        if n <= l {
            return n;
        }
        match self.tail {
            Tail::Identity => l,
            Tail::Periodic { block } => l - block + 1 + (n - 1 - (l - block)) % block,
        }
    }

    pub fn level(&self, n: usize) -> &SftGraph {
        &self.levels[self.level_slot(n)]
    }

    /// Bonding code `X_{n+1} -> X_n`.
    pub fn code(&self, n: usize) -> &SlidingBlockCode {
        assert!(n >= 1, "levels are numbered from 1");
        let l = self.levels.len();
        let i = n - 1;
        match self.tail {
            Tail::Identity if i + 1 >= l => self.identity.as_ref().expect("identity tail code"),
            Tail::Identity => &self.codes[i],
            Tail::Periodic { block } => {
                if i < l - block {
                    &self.codes[i]
                } else {
                    &self.codes[l - block + (i - (l - block)) % block]
                }
            }
        }
    }

    /// Sum of `w - 1` over the codes between levels `n` and `m`.
    pub fn window_excess(&self, n: usize, m: usize) -> usize {
        (n..m).map(|i| self.code(i).window() - 1).sum()
    }

    /// Word of level `n` read off from a word of level `m` (length shrinks by
    /// the window excess).
    pub fn project_word(&self, n: usize, m: usize, word: &[usize]) -> Result<Vec<usize>> {
        let mut w = word.to_vec();
        for i in (n..m).rev() {
            w = self.code(i).map_word(&w)?;
        }
        Ok(w)
    }
}

fn block_of(tail: Tail) -> usize {
    match tail {
        Tail::Identity => 0,
        Tail::Periodic { block } => block,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailJson {
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<usize>,
}

/// Serialized sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceJson {
    pub levels: Vec<SftJson>,
    pub codes: Vec<CodeJson>,
    pub tail: TailJson,
}

impl SequenceJson {
    pub fn to_spec(&self) -> Result<InverseSequenceSpec> {
        let tail = match (self.tail.mode.as_str(), self.tail.block) {
            ("identity", _) => Tail::Identity,
            ("periodic", Some(block)) => Tail::Periodic { block },
            ("periodic", None) => {
                return Err(Error::Schema("periodic tail needs \"block\"".into()))
            }
            (other, _) => return Err(Error::Schema(format!("unknown tail mode {other:?}"))),
        };
        let levels = self
            .levels
            .iter()
            .map(SftJson::to_graph)
            .collect::<Result<Vec<_>>>()?;
        let l = levels.len();
        let mut codes = Vec::with_capacity(self.codes.len());
        for (i, c) in self.codes.iter().enumerate() {
            let dom_idx = if i + 1 < l {
                i + 1
            } else {
                l.saturating_sub(block_of(tail))
            };
            if dom_idx >= l || i >= l {
                return Err(Error::Schema(format!(
                    "code {} has no adjacent levels",
                    i + 1
                )));
            }
            let dom = match &c.domain {
                Some(j) => j.to_graph()?,
                None => levels[dom_idx].clone(),
            };
            let cod = match &c.codomain {
                Some(j) => j.to_graph()?,
                None => levels[i].clone(),
            };
            codes.push(c.to_code_between(&dom, &cod)?);
        }
        InverseSequenceSpec::new(levels, codes, tail)
    }

    pub fn from_spec(seq: &InverseSequenceSpec) -> Self {
        let tail = match seq.tail {
            Tail::Identity => TailJson {
                mode: "identity".into(),
                block: None,
            },
            Tail::Periodic { block } => TailJson {
                mode: "periodic".into(),
                block: Some(block),
            },
        };
        SequenceJson {
            levels: seq.levels.iter().map(SftGraph::to_json).collect(),
            codes: seq.codes.iter().map(CodeJson::from_code_bare).collect(),
            tail,
        }
    }
}
