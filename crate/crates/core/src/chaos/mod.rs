//! Distal tuples, chain-proximal joins and scheduled scrambled tuples with
//! their empirical closeness densities.

use crate::decomposition::{cyclic_structure, CyclicStructure};
use crate::error::{Error, Result};
use crate::shift_core::{distance, CylinderMetric, Dyadic, SftGraph, Symbol, SymbolicPoint, Word};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

fn readable_from(g: &SftGraph, start: &[usize], x: &SymbolicPoint) -> bool {
    let mut cur = g.follow(start, x.preperiod());
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    loop {
        if cur.is_empty() {
            return false;
        }
        if !seen.insert(cur.clone()) {
            return true;
        }
        cur = g.follow(&cur, x.period());
    }
}

/// Vertices from which the point can be read.
pub fn start_vertices(g: &SftGraph, x: &SymbolicPoint) -> Vec<usize> {
    (0..g.vertex_count())
        .filter(|&v| readable_from(g, &[v], x))
        .collect()
}

fn classes_of(cs: &CyclicStructure, starts: &[usize]) -> BTreeSet<usize> {
    starts.iter().map(|&v| cs.class_of(v)).collect()
}

/// `n` periodic points of a common period whose orbits stay `r` apart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistalTuple {
    pub period: usize,
    /// Period words, one per point.
    pub words: Vec<Word>,
    /// Vertex each point's cycle starts from.
    pub starts: Vec<usize>,
    pub r: Dyadic,
}

impl DistalTuple {
    pub fn n(&self) -> usize {
        self.words.len()
    }

    pub fn points(&self) -> Vec<SymbolicPoint> {
        self.words
            .iter()
            .map(|w| SymbolicPoint::periodic(w.clone()).expect("nonempty period"))
            .collect()
    }

    /// Minimum pairwise distance over the shifts `0..shifts`.
    pub fn min_distance(&self, shifts: usize) -> Dyadic {
        let pts = self.points();
        let mut best = Dyadic::ONE;
        for k in 0..shifts {
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    best = best.min(distance(&pts[i].shifted(k), &pts[j].shifted(k)));
                }
            }
        }
        best
    }
}

/// Closed-path label words of length `p` from vertices of `class`, with a
/// start vertex for each.
fn cycle_words(g: &SftGraph, class: &[usize], p: usize) -> Vec<(Word, usize)> {
    let mut found: HashMap<Word, usize> = HashMap::new();
    for &v in class {
        let mut stack = vec![(v, Vec::new())];
        while let Some((u, w)) = stack.pop() {
            if w.len() == p {
                if u == v {
                    found.entry(w).or_insert(v);
                }
                continue;
            }
            for e in g.out_edges(u) {
                let mut x = w.clone();
                x.push(e.label);
                stack.push((e.dst, x));
            }
        }
    }
    let mut out: Vec<(Word, usize)> = found.into_iter().collect();
    out.sort();
    out
}

fn primitive_period(w: &[Symbol]) -> usize {
    (1..=w.len())
        .find(|&d| w.len() % d == 0 && (0..w.len()).all(|i| w[i] == w[i % d]))
        .unwrap_or(w.len())
}

fn pair_distance(a: &[Symbol], b: &[Symbol]) -> Dyadic {
    let p = a.len();
    let mut best = Dyadic::ONE;
    for k in 0..p {
        let mismatch = (0..p).find(|&i| a[(k + i) % p] != b[(k + i) % p]);
        best = best.min(mismatch.map_or(Dyadic::Zero, |i| Dyadic::Pow(i as u32)));
    }
    best
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Searches periods `1..=max_period` for `n` points in one cyclic class;
/// at the first feasible period returns the tuple with the largest `r`,
/// then the smallest total primitive period, then the least words.
pub fn find_r_distal_tuple(g: &SftGraph, n: usize, max_period: usize) -> Result<DistalTuple> {
    if n < 2 {
        return Err(Error::Schema("distal tuples need n >= 2".into()));
    }
    let cs = cyclic_structure(g)?;
    for p in 1..=max_period {
        let mut best: Option<(Dyadic, usize, Vec<Word>, Vec<usize>)> = None;
        for class in &cs.classes {
            let words = cycle_words(g, class, p);
            if words.len() < n {
                continue;
            }
            let mut dist = vec![vec![Dyadic::Zero; words.len()]; words.len()];
            for i in 0..words.len() {
                for j in i + 1..words.len() {
                    let d = pair_distance(&words[i].0, &words[j].0);
                    dist[i][j] = d;
                    dist[j][i] = d;
                }
            }
            for pick in subsets(words.len(), n) {
                let mut r = Dyadic::ONE;
                for a in 0..n {
                    for b in a + 1..n {
                        r = r.min(dist[pick[a]][pick[b]]);
                    }
                }
                let weight: usize = pick.iter().map(|&i| primitive_period(&words[i].0)).sum();
                let ws: Vec<Word> = pick.iter().map(|&i| words[i].0.clone()).collect();
                let better = match &best {
                    None => true,
                    Some((br, bw, bws, _)) => {
                        (r, std::cmp::Reverse(weight), std::cmp::Reverse(&ws))
                            > (*br, std::cmp::Reverse(*bw), std::cmp::Reverse(bws))
                    }
                };
                if better {
                    let starts = pick.iter().map(|&i| words[i].1).collect();
                    best = Some((r, weight, ws, starts));
                }
            }
        }
        if let Some((r, _, words, starts)) = best {
            if r != Dyadic::Zero {
                return Ok(DistalTuple {
                    period: p,
                    words,
                    starts,
                    r,
                });
            }
        }
    }
    Err(Error::NoDistalTuple {
        period_bound: max_period,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JoinCertificate {
    /// `ε = 2^-k`.
    pub k: usize,
    pub connector: Word,
    /// `d(z, w)`, at most `ε`.
    pub distance_to_z: Dyadic,
    /// Index from which `w` and `y` agree.
    pub agreement_from: usize,
    /// `limsup_k d(σ^k y, σ^k w)`; zero because the tails coincide.
    pub limsup: Dyadic,
}

/// Point starting like `z` and ending like `y`.
pub fn chain_proximal_join(
    g: &SftGraph,
    y: &SymbolicPoint,
    z: &SymbolicPoint,
    epsilon: Dyadic,
) -> Result<(SymbolicPoint, JoinCertificate)> {
    let Some(k) = epsilon.exponent() else {
        return Err(Error::InvalidThresholds("epsilon must be positive".into()));
    };
    let k = k as usize;
    let cs = cyclic_structure(g)?;
    let (sy, sz) = (start_vertices(g, y), start_vertices(g, z));
    if sy.is_empty() || sz.is_empty() {
        let which = if sy.is_empty() { y } else { z };
        return Err(Error::NotInLanguage(which.format(g.alphabet())));
    }
    let (cy, cz) = (classes_of(&cs, &sy), classes_of(&cs, &sz));
    if cy.is_disjoint(&cz) {
        return Err(Error::NotChainProximal {
            left: *cy.first().expect("nonempty"),
            right: *cz.first().expect("nonempty"),
        });
    }
    let m = cs.period;
    let from = g.follow(&sz, &z.prefix(k));
    let mut ell = 0;
    let bound = k + m * (g.vertex_count() + 1) * (g.vertex_count() + 1);
    loop {
        let tail = y.shifted(k + ell);
        let targets: BTreeSet<usize> = start_vertices(g, &tail).into_iter().collect();
        if let Some(conn) = connector(g, &from, &targets, ell) {
            let mut pre = z.prefix(k);
            pre.extend_from_slice(&conn);
            pre.extend_from_slice(tail.preperiod());
            let w = SymbolicPoint::new(pre, tail.period().to_vec())?;
            let agreement_from = k + ell;
            let cert = JoinCertificate {
                k,
                connector: conn,
                distance_to_z: distance(z, &w),
                agreement_from,
                limsup: distance(&w.shifted(agreement_from), &y.shifted(agreement_from)),
            };
            return Ok((w, cert));
        }
        ell += m;
        if ell > bound {
            return Err(Error::InternalInvariantViolation(
                "no connector within the path bound".into(),
            ));
        }
    }
}

/// Least-label path of exactly `len` edges from `from` into `targets`.
fn connector(g: &SftGraph, from: &[usize], targets: &BTreeSet<usize>, len: usize) -> Option<Word> {
    let n = g.vertex_count();
    let mut can = vec![vec![false; n]; len + 1];
    for &t in targets {
        can[0][t] = true;
    }
    for step in 1..=len {
        for v in 0..n {
            can[step][v] = g.out_edges(v).iter().any(|e| can[step - 1][e.dst]);
        }
    }
    let mut cur: Vec<usize> = from.iter().copied().filter(|&v| can[len][v]).collect();
    if cur.is_empty() {
        return None;
    }
    let mut word = Vec::with_capacity(len);
    for step in (1..=len).rev() {
        let mut best: Option<Symbol> = None;
        for &v in &cur {
            for e in g.out_edges(v) {
                if can[step - 1][e.dst] && best.is_none_or(|b| e.label < b) {
                    best = Some(e.label);
                }
            }
        }
        let a = best.expect("some edge continues");
        word.push(a);
        let mut next: Vec<usize> = cur
            .iter()
            .flat_map(|&v| {
                g.out_edges(v)
                    .iter()
                    .filter(|e| e.label == a && can[step - 1][e.dst])
                    .map(|e| e.dst)
            })
            .collect();
        next.sort_unstable();
        next.dedup();
        cur = next;
    }
    Some(word)
}

/// Least `L` with every entry of `A^L` positive.
pub fn mixing_constant(g: &SftGraph) -> Result<usize> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::EmptyShift);
    }
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|v| {
            let mut row = vec![false; n];
            g.out_edges(v).iter().for_each(|e| row[e.dst] = true);
            row
        })
        .collect();
    let mut power = adj.clone();
    for l in 1..=4 * n * n {
        if power.iter().all(|row| row.iter().all(|&b| b)) {
            return Ok(l);
        }
        let mut next = vec![vec![false; n]; n];
        for i in 0..n {
            for k in 0..n {
                if power[i][k] {
                    for j in 0..n {
                        next[i][j] |= adj[k][j];
                    }
                }
            }
        }
        power = next;
    }
    Err(Error::NotMixing(format!(
        "no positive power up to {}",
        4 * n * n
    )))
}

/// Block lengths with `l_{k+1} >= k (H_k + M) + (k + 1) margin`, where
/// `H_k` bounds the length up to the end of block `k` with connectors of
/// length `M`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub first: usize,
    pub margin: usize,
    pub mixing: usize,
}

impl Schedule {
    pub fn new(first: usize, margin: usize, mixing: usize) -> Result<Self> {
        if first == 0 {
            return Err(Error::Schema("first block must be nonempty".into()));
        }
        Ok(Schedule {
            first,
            margin,
            mixing,
        })
    }

    /// First `count` block lengths.
    pub fn lengths(&self, count: usize) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::with_capacity(count);
        let mut end = 0usize;
        for k in 0..count {
            let l = if k == 0 {
                self.first
            } else {
                let want = k
                    .saturating_mul(end.saturating_add(self.mixing))
                    .saturating_add((k + 1).saturating_mul(self.margin));
                want.max(out[k - 1].saturating_add(1))
            };
            end = end
                .saturating_add(l)
                .saturating_add(if k == 0 { 0 } else { self.mixing });
            out.push(l);
        }
        out
    }

    /// Index one past block `k` (1-based).
    pub fn block_end(&self, k: usize) -> usize {
        let l = self.lengths(k);
        l.iter()
            .fold(0usize, |a, &b| a.saturating_add(b))
            .saturating_add((k - 1).saturating_mul(self.mixing))
    }

    /// `l_{k+1} >= k (l_1 + .. + l_k)` for the first `count` blocks.
    pub fn growth_holds(&self, count: usize) -> bool {
        let l = self.lengths(count);
        (1..count).all(|k| l[k] >= k * l[..k].iter().sum::<usize>() && l[k] > l[k - 1])
    }

    /// Blocks whose end lies at or before `horizon`.
    pub fn blocks_within(&self, horizon: usize) -> usize {
        let mut k = 0;
        while self.block_end(k + 1) <= horizon {
            k += 1;
        }
        k
    }
}

/// Odd blocks copy the reference orbit on every stream, even blocks copy
/// the distal points, joined by connectors of length exactly `M`.
#[derive(Clone, Debug)]
pub struct ScrambledTuple {
    graph: SftGraph,
    distal: DistalTuple,
    schedule: Schedule,
}

impl ScrambledTuple {
    pub fn n(&self) -> usize {
        self.distal.n()
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn distal(&self) -> &DistalTuple {
        &self.distal
    }

    /// Lazily generated symbols of stream `i`.
    pub fn stream(&self, i: usize) -> ScrambledStream<'_> {
        assert!(i < self.n());
        ScrambledStream {
            tuple: self,
            index: i,
            block: 0,
            buffer: VecDeque::new(),
            vertex: None,
            connectors: HashMap::new(),
        }
    }

    /// Whether position `t` lies inside block `k` (1-based), and which.
    pub fn block_at(&self, t: usize) -> Option<usize> {
        let lengths = self.schedule.lengths(24);
        let mut start = 0usize;
        for (k, &l) in lengths.iter().enumerate() {
            if k > 0 {
                start += self.schedule.mixing;
            }
            if t < start {
                return None;
            }
            if t < start + l {
                return Some(k + 1);
            }
            start = start.saturating_add(l);
        }
        None
    }

    /// Start and end (exclusive) of block `k`.
    pub fn block_span(&self, k: usize) -> (usize, usize) {
        let end = self.schedule.block_end(k);
        (end - self.schedule.lengths(k)[k - 1], end)
    }
}

pub struct ScrambledStream<'a> {
    tuple: &'a ScrambledTuple,
    index: usize,
    block: usize,
    buffer: VecDeque<Symbol>,
    vertex: Option<usize>,
    connectors: HashMap<(usize, usize), Word>,
}

impl ScrambledStream<'_> {
    fn cycle_for(&self, block: usize) -> usize {
        if block % 2 == 1 {
            0
        } else {
            self.index
        }
    }

    fn refill(&mut self) {
        let t = self.tuple;
        self.block += 1;
        let k = self.block;
        let block_len = t.schedule.lengths(k)[k - 1];
        let c = self.cycle_for(k);
        let start = t.distal.starts[c];
        if let Some(v) = self.vertex {
            let conn = self
                .connectors
                .entry((v, start))
                .or_insert_with(|| {
                    let target: BTreeSet<usize> = [start].into_iter().collect();
                    connector(&t.graph, &[v], &target, t.schedule.mixing).expect("mixing connector")
                })
                .clone();
            self.buffer.extend(conn);
        }
        let word = &t.distal.words[c];
        let p = word.len();
        for s in 0..block_len {
            self.buffer.push_back(word[s % p]);
        }
        let path_end = t.graph.follow(&[start], &word[..block_len % p]);
        self.vertex = path_end.first().copied();
    }
}

impl Iterator for ScrambledStream<'_> {
    type Item = Symbol;
    fn next(&mut self) -> Option<Symbol> {
        if self.buffer.is_empty() {
            self.refill();
        }
        self.buffer.pop_front()
    }
}

/// Streams of a scrambled tuple on a mixing shift.
pub fn build_scrambled_tuple(
    g: &SftGraph,
    distal: &DistalTuple,
    schedule: &Schedule,
) -> Result<ScrambledTuple> {
    let m = mixing_constant(g)?;
    if schedule.mixing < m {
        return Err(Error::Schema(format!(
            "schedule connector length {} below mixing constant {m}",
            schedule.mixing
        )));
    }
    for (w, &v) in distal.words.iter().zip(&distal.starts) {
        if !g.follow(&[v], w).contains(&v) {
            return Err(Error::NotInLanguage(crate::shift_core::format_word(
                g.alphabet(),
                w,
            )));
        }
    }
    Ok(ScrambledTuple {
        graph: g.clone(),
        distal: distal.clone(),
        schedule: schedule.clone(),
    })
}

/// Symbols of an eventually periodic point.
pub fn point_stream(x: &SymbolicPoint) -> impl Iterator<Item = Symbol> + '_ {
    (0..).map(move |i| x.at(i))
}

/// Target fraction `num / den` at a horizon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Target {
    pub num: u64,
    pub den: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Horizon {
    pub horizon: usize,
    #[serde(default)]
    pub close_target: Option<Target>,
    #[serde(default)]
    pub far_target: Option<Target>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityRow {
    pub horizon: usize,
    pub close: usize,
    pub far: usize,
    pub pass_close: Option<bool>,
    pub pass_far: Option<bool>,
}

impl DensityRow {
    pub fn frac_close(&self) -> f64 {
        self.close as f64 / self.horizon as f64
    }

    pub fn frac_far(&self) -> f64 {
        self.far as f64 / self.horizon as f64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub epsilon: Dyadic,
    pub delta: Dyadic,
    pub rows: Vec<DensityRow>,
}

impl DensityReport {
    pub fn all_pass(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.pass_close != Some(false) && r.pass_far != Some(false))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("horizon,frac_close,frac_far,pass_close,pass_far\n");
        let flag = |f: Option<bool>| f.map_or(String::new(), |b| b.to_string());
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:.9},{:.9},{},{}",
                r.horizon,
                r.frac_close(),
                r.frac_far(),
                flag(r.pass_close),
                flag(r.pass_far)
            );
        }
        out
    }
}

fn meets(count: usize, horizon: usize, t: Option<Target>) -> Option<bool> {
    t.map(|t| (count as u128) * (t.den as u128) >= (t.num as u128) * (horizon as u128))
}

/// Exact closeness and separation counts at each horizon.
pub fn density_report<I: Iterator<Item = Symbol>>(
    streams: Vec<I>,
    epsilon: Dyadic,
    delta: Dyadic,
    horizons: &[Horizon],
) -> Result<DensityReport> {
    let (Some(e), Some(d)) = (epsilon.exponent(), delta.exponent()) else {
        return Err(Error::InvalidThresholds(
            "epsilon and delta must be positive".into(),
        ));
    };
    if d == 0 {
        return Err(Error::InvalidThresholds(
            "delta must be below the diameter 1".into(),
        ));
    }
    if streams.len() < 2 {
        return Err(Error::InvalidThresholds("need at least two streams".into()));
    }
    let (e, d) = (e as usize, d as usize);
    // close at t: all pairs agree on t..=t+e; far at t: every pair differs within t..t+d.
    let window = (e + 1).max(d);
    let mut hs: Vec<Horizon> = horizons.to_vec();
    hs.sort_by_key(|h| h.horizon);
    let max_h = hs.last().map_or(0, |h| h.horizon);
    let mut streams = streams;
    let n = streams.len();
    let ended = || Error::InvalidThresholds("stream ended before the horizon".into());
    let mut buf: Vec<VecDeque<Symbol>> = vec![VecDeque::with_capacity(window + 1); n];
    for (s, b) in streams.iter_mut().zip(buf.iter_mut()) {
        for _ in 0..window {
            b.push_back(s.next().ok_or_else(ended)?);
        }
    }
    let (mut close, mut far) = (0usize, 0usize);
    let mut rows = Vec::new();
    let mut next_h = 0;
    for t in 0..max_h {
        let mut all_close = true;
        let mut all_far = true;
        for b in buf.iter_mut() {
            b.make_contiguous();
        }
        for i in 0..n {
            for j in i + 1..n {
                let mismatch =
                    CylinderMetric::first_mismatch(buf[i].as_slices().0, buf[j].as_slices().0);
                match mismatch {
                    Some(k) => {
                        all_close &= k > e;
                        all_far &= k < d;
                    }
                    None => all_far = false,
                }
            }
        }
        close += all_close as usize;
        far += all_far as usize;
        while next_h < hs.len() && hs[next_h].horizon == t + 1 {
            let h = hs[next_h];
            rows.push(DensityRow {
                horizon: h.horizon,
                close,
                far,
                pass_close: meets(close, h.horizon, h.close_target),
                pass_far: meets(far, h.horizon, h.far_target),
            });
            next_h += 1;
        }
        for (s, b) in streams.iter_mut().zip(buf.iter_mut()) {
            b.pop_front();
            b.push_back(s.next().ok_or_else(ended)?);
        }
    }
    Ok(DensityReport {
        epsilon,
        delta,
        rows,
    })
}

/// Horizons at the ends of blocks `from..=to`, targeting `1 - 1/k` for
/// closeness after odd blocks and separation after even ones.
pub fn scheduled_horizons(schedule: &Schedule, from: usize, to: usize) -> Vec<Horizon> {
    (from..=to)
        .map(|k| {
            let t = Some(Target {
                num: k as u64 - 1,
                den: k as u64,
            });
            let odd = k % 2 == 1;
            Horizon {
                horizon: schedule.block_end(k),
                close_target: if odd { t } else { None },
                far_target: if odd { None } else { t },
            }
        })
        .collect()
}

/// Distal search, schedule and streams for a mixing shift, with the
/// separation threshold `r / 2`.
pub fn scramble(
    g: &SftGraph,
    n: usize,
    max_period: usize,
    epsilon: Dyadic,
    first_block: usize,
) -> Result<(ScrambledTuple, Dyadic)> {
    let distal = find_r_distal_tuple(g, n, max_period)?;
    let delta = distal.r.scaled(1);
    let m = mixing_constant(g)?;
    let (Some(e), Some(d)) = (epsilon.exponent(), delta.exponent()) else {
        return Err(Error::InvalidThresholds(
            "epsilon and delta must be positive".into(),
        ));
    };
    let margin = (e as usize + 1).max(d as usize);
    let schedule = Schedule::new(first_block, margin, m)?;
    Ok((build_scrambled_tuple(g, &distal, &schedule)?, delta))
}
