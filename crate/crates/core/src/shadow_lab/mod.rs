//! Finite metric systems and brute-force pseudo-orbit shadowing checks.

mod check;
mod example62;

pub use check::{
    brute_shadowing_check, check_within, shadowing_failures, CheckMode, ShadowOutcome,
    ShadowingVerdict, VerdictJson, MAX_SEARCH_STEPS,
};
pub use example62::{
    build_example62, default_scales, endpoint_census, sigma_family, sigma_infinity, sigma_k,
    BaseClass, Census, ComponentCheck, ComponentInfo, Example62, ScaleLadder, SigmaIndex,
    SigmaMember,
};

use crate::error::{Error, Result};
use crate::scalar::Exact;
use crate::shift_core::{distance, SftGraph, SymbolicPoint, Word};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Largest point count accepted by [`truncate_shift`].
pub const MAX_TRUNCATION_POINTS: usize = 1 << 16;

/// Finite set of named points with an exact metric and a self-map.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSystem<S: Exact> {
    names: Vec<String>,
    dist: Vec<S>,
    map: Vec<usize>,
}

impl<S: Exact> FiniteSystem<S> {
    /// Validates the metric axioms and totality of the map.
    pub fn new(names: Vec<String>, dist: Vec<Vec<S>>, map: Vec<usize>) -> Result<Self> {
        let sys = Self::from_rows(names, dist, map)?;
        sys.check_triangle()?;
        Ok(sys)
    }

    /// Like [`FiniteSystem::new`] without the cubic triangle check, for
    /// distances built from known metrics.
    fn from_rows(names: Vec<String>, dist: Vec<Vec<S>>, map: Vec<usize>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Schema(
                "finite system needs at least one point".into(),
            ));
        }
        if dist.len() != n || dist.iter().any(|r| r.len() != n) {
            return Err(Error::Schema(format!("distance matrix must be {n} x {n}")));
        }
        if map.len() != n {
            return Err(Error::Schema(format!(
                "map has {} entries for {n} points",
                map.len()
            )));
        }
        if let Some(i) = map.iter().position(|&j| j >= n) {
            return Err(Error::Schema(format!(
                "map sends point {i} outside the point set"
            )));
        }
        let names_set: BTreeSet<&String> = names.iter().collect();
        if names_set.len() != n {
            return Err(Error::Schema("point names must be distinct".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let d = &dist[i][j];
                if d.is_negative() {
                    return Err(Error::Schema(format!(
                        "negative distance between {i} and {j}"
                    )));
                }
                if (i == j) != d.is_zero() {
                    return Err(Error::Schema(format!(
                        "distance between {i} and {j} violates identity"
                    )));
                }
                if *d != dist[j][i] {
                    return Err(Error::Schema(format!(
                        "distance between {i} and {j} is not symmetric"
                    )));
                }
            }
        }
        Ok(FiniteSystem {
            names,
            dist: dist.into_iter().flatten().collect(),
            map,
        })
    }

    fn check_triangle(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.d(i, k) > &(self.d(i, j).clone() + self.d(j, k).clone()) {
                        return Err(Error::Schema(format!(
                            "triangle inequality fails for {i}, {j}, {k}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn d(&self, i: usize, j: usize) -> &S {
        &self.dist[i * self.len() + j]
    }

    pub fn image(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// `f^k(i)`.
    pub fn iterate(&self, i: usize, k: usize) -> usize {
        (0..k).fold(i, |p, _| self.map[p])
    }

    /// Points within `delta` of the image of `i`, ascending.
    pub fn successors(&self, i: usize, delta: &S) -> Vec<usize> {
        let fi = self.map[i];
        (0..self.len())
            .filter(|&j| self.d(fi, j) <= delta)
            .collect()
    }

    /// Sub-system on a forward-invariant subset, in the given order.
    pub fn restrict(&self, points: &[usize]) -> Result<Self> {
        let pos: BTreeMap<usize, usize> = points.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        if pos.len() != points.len() {
            return Err(Error::Schema("restriction lists a point twice".into()));
        }
        let mut map = Vec::with_capacity(points.len());
        for &p in points {
            let q = *pos.get(&self.map[p]).ok_or_else(|| {
                Error::Schema(format!("subset is not invariant at {}", self.names[p]))
            })?;
            map.push(q);
        }
        let names = points.iter().map(|&p| self.names[p].clone()).collect();
        let mut dist = Vec::with_capacity(points.len() * points.len());
        for &p in points {
            for &q in points {
                dist.push(self.d(p, q).clone());
            }
        }
        Ok(FiniteSystem { names, dist, map })
    }

    pub fn to_json(&self) -> FiniteSystemJson {
        let n = self.len();
        FiniteSystemJson {
            points: self.names.clone(),
            dist: (0..n)
                .map(|i| (0..n).map(|j| self.d(i, j).to_text()).collect())
                .collect(),
            map: self.map.clone(),
        }
    }

    pub fn from_json(j: &FiniteSystemJson) -> Result<Self> {
        let mut dist = Vec::with_capacity(j.dist.len());
        for (i, row) in j.dist.iter().enumerate() {
            let mut r = Vec::with_capacity(row.len());
            for (k, cell) in row.iter().enumerate() {
                let v = S::parse_text(cell).ok_or_else(|| {
                    Error::Parse(format!("dist[{i}][{k}]: {cell:?} is not a rational"))
                })?;
                r.push(v);
            }
            dist.push(r);
        }
        Self::new(j.points.clone(), dist, j.map.clone())
    }
}

/// Wire form: rationals as `"p/q"` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteSystemJson {
    pub points: Vec<String>,
    pub dist: Vec<Vec<String>>,
    pub map: Vec<usize>,
}

/// Least label sequence readable from a vertex set, as an eventually
/// periodic point.
fn least_continuation(g: &SftGraph, from: Vec<usize>) -> Result<SymbolicPoint> {
    let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut word = Vec::new();
    let mut cur = from;
    loop {
        if let Some(&k) = seen.get(&cur) {
            return SymbolicPoint::new(word[..k].to_vec(), word[k..].to_vec());
        }
        seen.insert(cur.clone(), word.len());
        let a = (0..g.alphabet().len())
            .find(|&a| !g.follow(&cur, &[a]).is_empty())
            .ok_or_else(|| {
                Error::InternalInvariantViolation("pruned graph has a dead end".into())
            })?;
        word.push(a);
        cur = g.follow(&cur, &[a]);
    }
}

/// Depth-`depth` truncation of a shift: one point per word `w` of length
/// `depth`, namely `w` followed by its least continuation; the map sends a
/// point to the representative of the first `depth` symbols of its shift.
pub fn truncate_shift<S: Exact>(
    g: &SftGraph,
    depth: usize,
) -> Result<(FiniteSystem<S>, Vec<SymbolicPoint>)> {
    if depth == 0 {
        return Err(Error::Schema("truncation depth must be positive".into()));
    }
    if g.is_empty() {
        return Err(Error::EmptyShift);
    }
    let limit = MAX_TRUNCATION_POINTS as u128;
    for k in 1..depth {
        let n = g.words_of_length(k).len() as u128;
        if n > limit {
            return Err(Error::TooLarge { estimate: n, limit });
        }
    }
    let words = g.words_of_length(depth);
    if words.len() as u128 > limit {
        return Err(Error::TooLarge {
            estimate: words.len() as u128,
            limit,
        });
    }
    let all = g.all_vertices();
    let mut points = Vec::with_capacity(words.len());
    for w in &words {
        let tail = least_continuation(g, g.follow(&all, w))?;
        let mut pre = w.clone();
        pre.extend_from_slice(tail.preperiod());
        points.push(SymbolicPoint::new(pre, tail.period().to_vec())?);
    }
    let index: BTreeMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let map = points
        .iter()
        .map(|p| {
            let w = p.shifted(1).prefix(depth);
            index.get(&w).copied().ok_or_else(|| {
                Error::InternalInvariantViolation("shifted word not in language".into())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let names = points.iter().map(|p| p.format(g.alphabet())).collect();
    let dist = point_distances(&points);
    Ok((FiniteSystem::from_rows(names, dist, map)?, points))
}

fn point_distances<S: Exact>(points: &[SymbolicPoint]) -> Vec<Vec<S>> {
    points
        .iter()
        .map(|p| points.iter().map(|q| distance(p, q).to_exact()).collect())
        .collect()
}

/// Finite system on explicit eventually periodic points closed under the
/// shift, with the cylinder metric.
pub fn shift_on_points<S: Exact>(
    alphabet: &[String],
    points: Vec<SymbolicPoint>,
) -> Result<FiniteSystem<S>> {
    let index: BTreeMap<&SymbolicPoint, usize> =
        points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let map = points
        .iter()
        .map(|p| {
            index.get(&p.shifted(1)).copied().ok_or_else(|| {
                Error::Schema(format!(
                    "point set not closed under the shift at {}",
                    p.format(alphabet)
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let names = points.iter().map(|p| p.format(alphabet)).collect();
    FiniteSystem::from_rows(names, point_distances(&points), map)
}
