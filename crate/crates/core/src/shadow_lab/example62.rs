use super::{brute_shadowing_check, shift_on_points, truncate_shift, CheckMode, FiniteSystem};
use crate::decomposition::sccs;
use crate::error::{Error, Result};
use crate::fixtures::gap_shift_edges;
use crate::scalar::{pow2_neg, Exact};
use crate::shift_core::{alphabet_of, distance, SftGraph, SymbolicPoint};
use serde::{Deserialize, Serialize};

/// Gap shift: every `1` is followed by at least `k` zeros.
pub fn sigma_k(k: usize) -> Result<SftGraph> {
    if k == 0 {
        return Err(Error::Schema("gap must be at least 1".into()));
    }
    let edges = gap_shift_edges("", "0", "1", k);
    let e: Vec<(&str, &str, &str)> = edges
        .iter()
        .map(|(s, d, l)| (s.as_str(), d.as_str(), l.as_str()))
        .collect();
    SftGraph::from_named_edges(&["0", "1"], &e)
}

/// `0^m 1 0^∞` for `m = 0..=truncation`, then `0^∞`, under the shift.
pub fn sigma_infinity<S: Exact>(truncation: usize) -> Result<FiniteSystem<S>> {
    if truncation == 0 {
        return Err(Error::Schema("truncation must be at least 1".into()));
    }
    let mut points = Vec::with_capacity(truncation + 2);
    for m in 0..=truncation {
        let mut pre = vec![0; m];
        pre.push(1);
        points.push(SymbolicPoint::new(pre, vec![0])?);
    }
    points.push(SymbolicPoint::constant(0));
    shift_on_points(&alphabet_of(&["0", "1"]), points)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaIndex {
    Finite(usize),
    Infinite { truncation: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum SigmaMember<S: Exact> {
    Graph(SftGraph),
    Points(FiniteSystem<S>),
}

pub fn sigma_family<S: Exact>(index: SigmaIndex) -> Result<SigmaMember<S>> {
    match index {
        SigmaIndex::Finite(k) => sigma_k(k).map(SigmaMember::Graph),
        SigmaIndex::Infinite { truncation } => sigma_infinity(truncation).map(SigmaMember::Points),
    }
}

/// Per-level thresholds and contraction factors, index `k - 1` for level `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleLadder<S: Exact> {
    pub epsilon: Vec<S>,
    pub delta: Vec<S>,
    pub c: Vec<S>,
}

/// `ε_k = 2^-k`, `δ_k = ε_k / 4`, `c_1 = 1/4`, `c_{k+1} = min(c_k / 4, δ_k / 4)`.
pub fn default_scales<S: Exact>(depth: usize) -> ScaleLadder<S> {
    let four = S::from_ratio(4, 1);
    let epsilon: Vec<S> = (1..=depth).map(|k| pow2_neg(k as u32)).collect();
    let delta: Vec<S> = epsilon.iter().map(|e| e.clone() / four.clone()).collect();
    let mut c = vec![S::from_ratio(1, 4)];
    for k in 1..depth {
        let next = (c[k - 1].clone() / four.clone()).min(delta[k - 1].clone() / four.clone());
        c.push(next);
    }
    c.truncate(depth);
    ScaleLadder { epsilon, delta, c }
}

fn validate_scales<S: Exact>(c: &[S], depth: usize) -> Result<()> {
    if c.len() < depth {
        return Err(Error::InvalidScales(format!(
            "{} scales given for depth {depth}",
            c.len()
        )));
    }
    let half = S::from_ratio(1, 2);
    if c[0] >= half {
        return Err(Error::InvalidScales(format!(
            "first scale {} is not below 1/2",
            c[0]
        )));
    }
    if let Some(k) = c.iter().position(|x| !x.is_positive()) {
        return Err(Error::InvalidScales(format!(
            "scale {} is not positive",
            k + 1
        )));
    }
    if let Some(k) = c.windows(2).position(|w| w[1] >= w[0]) {
        return Err(Error::InvalidScales(format!(
            "scales {} and {} are not decreasing",
            k + 1,
            k + 2
        )));
    }
    Ok(())
}

/// Level-`n` intervals in address order with the creation levels of their
/// endpoints.
fn intervals<S: Exact>(c: &[S], depth: usize) -> Vec<Vec<(String, S, S, usize, usize)>> {
    let mut levels: Vec<Vec<(String, S, S, usize, usize)>> = Vec::new();
    let mut prev = vec![(String::new(), S::zero(), S::one(), 1, 1)];
    for n in 1..=depth {
        let cn = c[n - 1].clone();
        let mut next = Vec::with_capacity(prev.len() * 2);
        for (s, a, b, l, r) in &prev {
            let w = (b.clone() - a.clone()) * cn.clone();
            let (ln, rn) = if n == 1 { (1, 1) } else { (n, n) };
            next.push((format!("{s}0"), a.clone(), a.clone() + w.clone(), *l, ln));
            next.push((format!("{s}1"), b.clone() - w, b.clone(), rn, *r));
        }
        levels.push(next.clone());
        prev = next;
    }
    levels
}

/// Endpoints new at each level `1..=depth`, sorted.
pub fn endpoint_census<S: Exact>(c: &[S], depth: usize) -> Result<Vec<Vec<S>>> {
    validate_scales(c, depth)?;
    let mut seen: Vec<S> = Vec::new();
    let mut out = Vec::with_capacity(depth);
    for level in intervals(c, depth) {
        let mut fresh: Vec<S> = Vec::new();
        for (_, a, b, _, _) in level {
            for e in [a, b] {
                if !seen.contains(&e) && !fresh.contains(&e) {
                    fresh.push(e);
                }
            }
        }
        fresh.sort();
        seen.extend(fresh.iter().cloned());
        out.push(fresh);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BaseClass {
    Endpoint { level: usize },
    Interior,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentInfo {
    pub word: String,
    pub class: BaseClass,
    pub base: String,
    pub fiber: String,
    pub fiber_points: usize,
    pub chain_transitive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub depth: usize,
    pub k_max: usize,
    pub horizon: usize,
    pub scales: Vec<String>,
    pub epsilons: Vec<String>,
    pub deltas: Vec<String>,
    pub smallness_holds: bool,
    pub endpoint_counts: Vec<usize>,
    pub component_count: usize,
    pub sft_components: usize,
    pub interior_components: usize,
    pub bijection: bool,
    pub components: Vec<ComponentInfo>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCheck {
    pub word: String,
    pub level: usize,
    pub epsilon: String,
    pub delta: String,
    pub ok: bool,
    pub work: u64,
}

/// Finite-depth model: one fiber per depth-`d` address over a base point
/// in `[0, 1]`.
#[derive(Clone, Debug)]
pub struct Example62<S: Exact> {
    pub census: Census,
    pub ladder: ScaleLadder<S>,
    pub bases: Vec<S>,
    pub fibers: Vec<FiniteSystem<S>>,
    fiber_points: Vec<Vec<SymbolicPoint>>,
}

fn chain_transitive<S: Exact>(sys: &FiniteSystem<S>, delta: &S) -> bool {
    let adj: Vec<Vec<usize>> = (0..sys.len()).map(|x| sys.successors(x, delta)).collect();
    sccs(&adj).len() == 1
}

/// Builds the depth-`depth` model with scales `c`; base points whose
/// interval has an endpoint created at level `k <= k_max` carry a
/// truncated gap shift `Σ_k`, the rest a truncated `Σ_∞`. Fibers are deep
/// enough for exact shadowing checks at `horizon`.
pub fn build_example62<S: Exact>(
    depth: usize,
    c: &[S],
    k_max: usize,
    horizon: usize,
) -> Result<Example62<S>> {
    if depth == 0 {
        return Err(Error::Schema("depth must be at least 1".into()));
    }
    if k_max > depth {
        return Err(Error::Schema(format!(
            "k_max {k_max} exceeds depth {depth}"
        )));
    }
    if horizon < 3 {
        return Err(Error::Schema("horizon must be at least 3".into()));
    }
    validate_scales(c, depth)?;
    let c = &c[..depth];
    let defaults = default_scales::<S>(depth);
    let ladder = ScaleLadder {
        epsilon: defaults.epsilon,
        delta: defaults.delta,
        c: c.to_vec(),
    };
    let four = S::from_ratio(4, 1);
    let smallness_holds = (1..depth).all(|k| {
        c[k] <= (c[k - 1].clone() / four.clone()).min(ladder.delta[k - 1].clone() / four.clone())
    });
    let endpoint_counts = endpoint_census(c, depth)?.iter().map(Vec::len).collect();
    let two = S::from_ratio(2, 1);
    let level = intervals(c, depth).pop().expect("depth at least 1");

    let mut components = Vec::with_capacity(level.len());
    let (mut bases, mut fibers, mut fiber_points) = (Vec::new(), Vec::new(), Vec::new());
    for (word, a, b, l, r) in level {
        let m = l.min(r);
        let (class, base) = if m <= k_max {
            let e = if l <= r { a } else { b };
            (BaseClass::Endpoint { level: m }, e)
        } else {
            (BaseClass::Interior, (a + b) / two.clone())
        };
        let (sys, points, name, delta) = match class {
            BaseClass::Endpoint { level } => {
                let (sys, pts) = truncate_shift::<S>(&sigma_k(level)?, horizon + level - 1)?;
                (
                    sys,
                    pts,
                    format!("sigma_{level}"),
                    ladder.delta[level - 1].clone(),
                )
            }
            BaseClass::Interior => {
                let m = horizon + depth - 1;
                let sys = sigma_infinity::<S>(m)?;
                let mut pts: Vec<SymbolicPoint> = (0..=m)
                    .map(|j| {
                        let mut pre = vec![0; j];
                        pre.push(1);
                        SymbolicPoint::new(pre, vec![0])
                    })
                    .collect::<Result<_>>()?;
                pts.push(SymbolicPoint::constant(0));
                (
                    sys,
                    pts,
                    "sigma_inf".to_string(),
                    ladder.delta[depth - 1].clone(),
                )
            }
        };
        components.push(ComponentInfo {
            word,
            class,
            base: base.to_text(),
            fiber: name,
            fiber_points: sys.len(),
            chain_transitive: chain_transitive(&sys, &delta),
        });
        bases.push(base);
        fibers.push(sys);
        fiber_points.push(points);
    }
    let mut sorted = bases.clone();
    sorted.sort();
    sorted.dedup();
    let bijection = sorted.len() == bases.len()
        && components.len() == 1 << depth
        && components.iter().all(|c| c.chain_transitive);
    let sft_components = components
        .iter()
        .filter(|c| matches!(c.class, BaseClass::Endpoint { .. }))
        .count();
    let census = Census {
        depth,
        k_max,
        horizon,
        scales: c.iter().map(Exact::to_text).collect(),
        epsilons: ladder.epsilon.iter().map(Exact::to_text).collect(),
        deltas: ladder.delta.iter().map(Exact::to_text).collect(),
        smallness_holds,
        endpoint_counts,
        component_count: components.len(),
        sft_components,
        interior_components: components.len() - sft_components,
        bijection,
        components,
    };
    Ok(Example62 {
        census,
        ladder,
        bases,
        fibers,
        fiber_points,
    })
}

impl<S: Exact> Example62<S> {
    /// Exhaustive check of every gap-shift fiber at its own thresholds.
    pub fn verify_fibers(&self) -> Result<Vec<ComponentCheck>> {
        let mut out = Vec::new();
        for (info, sys) in self.census.components.iter().zip(&self.fibers) {
            if let BaseClass::Endpoint { level } = info.class {
                let (eps, delta) = (
                    &self.ladder.epsilon[level - 1],
                    &self.ladder.delta[level - 1],
                );
                let v = brute_shadowing_check(
                    sys,
                    eps,
                    delta,
                    self.census.horizon,
                    CheckMode::Exhaustive,
                )?;
                out.push(ComponentCheck {
                    word: info.word.clone(),
                    level,
                    epsilon: eps.to_text(),
                    delta: delta.to_text(),
                    ok: v.is_ok(),
                    work: v.work,
                });
            }
        }
        Ok(out)
    }

    /// The whole model as one system: distance is the larger of the base
    /// distance and the cylinder distance of the fiber coordinates.
    pub fn system(&self) -> Result<FiniteSystem<S>> {
        let mut index = Vec::new();
        for (f, sys) in self.fibers.iter().enumerate() {
            for p in 0..sys.len() {
                index.push((f, p));
            }
        }
        let offsets: Vec<usize> = self
            .fibers
            .iter()
            .scan(0, |acc, s| {
                let o = *acc;
                *acc += s.len();
                Some(o)
            })
            .collect();
        let names = index
            .iter()
            .map(|&(f, p)| {
                format!(
                    "{}|{}",
                    self.census.components[f].word,
                    self.fibers[f].name(p)
                )
            })
            .collect();
        let map = index
            .iter()
            .map(|&(f, p)| offsets[f] + self.fibers[f].image(p))
            .collect();
        let dist = index
            .iter()
            .map(|&(f, p)| {
                index
                    .iter()
                    .map(|&(g, q)| {
                        let base = (self.bases[f].clone() - self.bases[g].clone()).abs();
                        let fiber: S =
                            distance(&self.fiber_points[f][p], &self.fiber_points[g][q]).to_exact();
                        base.max(fiber)
                    })
                    .collect()
            })
            .collect();
        FiniteSystem::from_rows(names, dist, map)
    }
}
