use super::FiniteSystem;
use crate::error::{Error, Result};
use crate::scalar::Exact;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Cap on search transitions in exhaustive mode.
pub const MAX_SEARCH_STEPS: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CheckMode {
    Exhaustive,
    Sampled { seed: u64, count: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShadowOutcome {
    Ok,
    /// A pseudo-orbit no candidate follows, with each candidate's first
    /// failing index.
    Counterexample {
        pseudo_orbit: Vec<usize>,
        failures: Vec<(usize, usize)>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShadowingVerdict<S: Exact> {
    pub epsilon: S,
    pub delta: S,
    pub horizon: usize,
    pub mode: CheckMode,
    pub starts: Vec<usize>,
    pub candidates: Vec<usize>,
    pub outcome: ShadowOutcome,
    /// Search transitions (exhaustive) or pseudo-orbits drawn (sampled).
    pub work: u64,
}

impl<S: Exact> ShadowingVerdict<S> {
    pub fn is_ok(&self) -> bool {
        self.outcome == ShadowOutcome::Ok
    }

    /// Re-simulates a counterexample: the orbit must be a pseudo-orbit and
    /// every failure index must be reproduced.
    pub fn replay(&self, sys: &FiniteSystem<S>) -> bool {
        match &self.outcome {
            ShadowOutcome::Ok => true,
            ShadowOutcome::Counterexample {
                pseudo_orbit,
                failures,
            } => {
                if pseudo_orbit.len() != self.horizon
                    || !is_pseudo_orbit(sys, pseudo_orbit, &self.delta)
                {
                    return false;
                }
                let again = shadowing_failures(sys, pseudo_orbit, &self.epsilon, &self.candidates);
                again.len() == failures.len()
                    && again
                        .iter()
                        .zip(failures)
                        .all(|(&(c, i), &(c2, i2))| c == c2 && i == Some(i2))
            }
        }
    }

    pub fn to_json(&self, sys: &FiniteSystem<S>) -> VerdictJson {
        let (result, pseudo_orbit, failures) = match &self.outcome {
            ShadowOutcome::Ok => ("ok", None, None),
            ShadowOutcome::Counterexample {
                pseudo_orbit,
                failures,
            } => (
                "counterexample",
                Some(
                    pseudo_orbit
                        .iter()
                        .map(|&p| sys.name(p).to_string())
                        .collect(),
                ),
                Some(
                    failures
                        .iter()
                        .map(|&(c, i)| FailureJson {
                            candidate: sys.name(c).to_string(),
                            index: i,
                        })
                        .collect(),
                ),
            ),
        };
        VerdictJson {
            epsilon: self.epsilon.to_text(),
            delta: self.delta.to_text(),
            horizon: self.horizon,
            mode: self.mode,
            result: result.to_string(),
            pseudo_orbit,
            failures,
            work: self.work,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureJson {
    pub candidate: String,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub epsilon: String,
    pub delta: String,
    pub horizon: usize,
    pub mode: CheckMode,
    pub result: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pseudo_orbit: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failures: Option<Vec<FailureJson>>,
    pub work: u64,
}

fn is_pseudo_orbit<S: Exact>(sys: &FiniteSystem<S>, orbit: &[usize], delta: &S) -> bool {
    orbit
        .windows(2)
        .all(|w| sys.d(sys.image(w[0]), w[1]) <= delta)
}

/// For each candidate, the first index `i` with `d(f^i(c), x_i) > eps`.
pub fn shadowing_failures<S: Exact>(
    sys: &FiniteSystem<S>,
    orbit: &[usize],
    eps: &S,
    candidates: &[usize],
) -> Vec<(usize, Option<usize>)> {
    candidates
        .iter()
        .map(|&c| {
            let mut p = c;
            let mut first = None;
            for (i, &x) in orbit.iter().enumerate() {
                if sys.d(p, x) > eps {
                    first = Some(i);
                    break;
                }
                p = sys.image(p);
            }
            (c, first)
        })
        .collect()
}

/// Every δ-pseudo-orbit of length `horizon` against every point.
pub fn brute_shadowing_check<S: Exact>(
    sys: &FiniteSystem<S>,
    eps: &S,
    delta: &S,
    horizon: usize,
    mode: CheckMode,
) -> Result<ShadowingVerdict<S>> {
    let all: Vec<usize> = (0..sys.len()).collect();
    check_within(sys, &all, &all, eps, delta, horizon, mode)
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            (0..64)
                .filter(move |b| w >> b & 1 == 1)
                .map(move |b| k * 64 + b)
        })
    }
}

struct Search<'a, S: Exact> {
    sys: &'a FiniteSystem<S>,
    horizon: usize,
    ball: Vec<Bits>,
    succ: Vec<Vec<usize>>,
    safe: HashSet<(usize, usize, Bits)>,
    visited: u128,
    estimate: u128,
}

impl<S: Exact> Search<'_, S> {
    fn image(&self, pos: &Bits) -> Bits {
        let mut out = Bits::new(self.sys.len());
        for p in pos.iter() {
            out.set(self.sys.image(p));
        }
        out
    }

    /// `path` ends at step `i` with live shadow positions `pos`; returns
    /// whether some extension kills every position, leaving it in `path`.
    fn fails(&mut self, i: usize, pos: Bits, path: &mut Vec<usize>) -> Result<bool> {
        if i + 1 == self.horizon {
            return Ok(false);
        }
        let x = *path.last().expect("nonempty path");
        let key = (i, x, pos);
        if self.safe.contains(&key) {
            return Ok(false);
        }
        let moved = self.image(&key.2);
        for k in 0..self.succ[x].len() {
            let y = self.succ[x][k];
            self.visited += 1;
            if self.visited > MAX_SEARCH_STEPS {
                return Err(Error::TooLarge {
                    estimate: self.estimate,
                    limit: MAX_SEARCH_STEPS,
                });
            }
            let next = moved.and(&self.ball[y]);
            path.push(y);
            if next.is_empty() || self.fails(i + 1, next, path)? {
                return Ok(true);
            }
            path.pop();
        }
        self.safe.insert(key);
        Ok(false)
    }
}

fn validate<S: Exact>(sys: &FiniteSystem<S>, set: &[usize], what: &str) -> Result<()> {
    if set.is_empty() {
        return Err(Error::Schema(format!("{what} set is empty")));
    }
    if let Some(&p) = set.iter().find(|&&p| p >= sys.len()) {
        return Err(Error::Schema(format!("{what} index {p} out of range")));
    }
    Ok(())
}

/// Pseudo-orbits starting in `starts`, shadowed only by points of
/// `candidates`. A counterexample is the lexicographically least failing
/// pseudo-orbit found, completed by least successors.
pub fn check_within<S: Exact>(
    sys: &FiniteSystem<S>,
    starts: &[usize],
    candidates: &[usize],
    eps: &S,
    delta: &S,
    horizon: usize,
    mode: CheckMode,
) -> Result<ShadowingVerdict<S>> {
    if !eps.is_positive() || !delta.is_positive() {
        return Err(Error::InvalidThresholds(
            "epsilon and delta must be positive".into(),
        ));
    }
    if horizon == 0 {
        return Err(Error::Schema("horizon must be positive".into()));
    }
    validate(sys, starts, "start")?;
    validate(sys, candidates, "candidate")?;
    let n = sys.len();
    let mut starts = starts.to_vec();
    starts.sort_unstable();
    starts.dedup();
    let mut candidates = candidates.to_vec();
    candidates.sort_unstable();
    candidates.dedup();
    let ball: Vec<Bits> = (0..n)
        .map(|x| {
            let mut b = Bits::new(n);
            (0..n)
                .filter(|&y| sys.d(x, y) <= eps)
                .for_each(|y| b.set(y));
            b
        })
        .collect();
    let succ: Vec<Vec<usize>> = (0..n).map(|x| sys.successors(x, delta)).collect();
    let mut cand = Bits::new(n);
    candidates.iter().for_each(|&c| cand.set(c));

    let (found, work) = match mode {
        CheckMode::Exhaustive => {
            let branching = succ.iter().map(Vec::len).max().unwrap_or(1) as u128;
            let estimate =
                (1..horizon).fold(starts.len() as u128, |acc, _| acc.saturating_mul(branching));
            let mut search = Search {
                sys,
                horizon,
                ball,
                succ,
                safe: HashSet::new(),
                visited: 0,
                estimate,
            };
            let mut found = None;
            for &x0 in &starts {
                let mut path = vec![x0];
                let pos = search.ball[x0].and(&cand);
                if pos.is_empty() || search.fails(0, pos, &mut path)? {
                    while path.len() < horizon {
                        let last = *path.last().expect("nonempty path");
                        path.push(search.succ[last][0]);
                    }
                    found = Some(path);
                    break;
                }
            }
            (found, search.visited as u64)
        }
        CheckMode::Sampled { seed, count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut best: Option<Vec<usize>> = None;
            for _ in 0..count {
                let mut path = vec![starts[rng.gen_range(0..starts.len())]];
                while path.len() < horizon {
                    let s = &succ[*path.last().expect("nonempty path")];
                    path.push(s[rng.gen_range(0..s.len())]);
                }
                let dead = shadowing_failures(sys, &path, eps, &candidates)
                    .iter()
                    .all(|(_, f)| f.is_some());
                if dead && best.as_ref().map_or(true, |b| path < *b) {
                    best = Some(path);
                }
            }
            (best, count as u64)
        }
    };
    let outcome = match found {
        None => ShadowOutcome::Ok,
        Some(pseudo_orbit) => {
            let failures = shadowing_failures(sys, &pseudo_orbit, eps, &candidates)
                .into_iter()
                .map(|(c, f)| {
                    f.map(|i| (c, i)).ok_or_else(|| {
                        Error::InternalInvariantViolation("counterexample is shadowed".into())
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            ShadowOutcome::Counterexample {
                pseudo_orbit,
                failures,
            }
        }
    };
    Ok(ShadowingVerdict {
        epsilon: eps.clone(),
        delta: delta.clone(),
        horizon,
        mode,
        starts,
        candidates,
        outcome,
        work,
    })
}
