//! Towers of chain components or cyclic classes over an inverse sequence,
//! greedy maximal-image selection and the entropic component search.

use crate::decomposition::{
    chain_components, cyclic_structure, entropy, has_positive_entropy, is_irreducible, sccs,
};
use crate::error::{Error, Result};
use crate::inverse_systems::{
    check_mlc, restrict_to_cr, truncated_limit, InverseSequenceSpec, LimitMode, Tail,
    TruncatedLimit,
};
use crate::shift_core::{format_word, Language, SftGraph};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TowerKind {
    /// Chain components of each level.
    Component,
    /// Cyclic classes of irreducible levels.
    Cyclic,
}

/// Outcome of the product-automaton search for `π_n^{n+1}(entry_{n+1}) ⊆ entry_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub level: usize,
    pub image_states: usize,
    pub target_states: usize,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TowerTail {
    /// Only the listed entries are known; `extendable` records whether some
    /// infinite tower continues them.
    Prefix { extendable: bool },
    /// `entry(n) = entry(n - period)` for `n >= start + period`.
    Periodic { start: usize, period: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tower {
    pub kind: TowerKind,
    /// `entries[n - 1]` is the piece id at level `n`.
    pub entries: Vec<usize>,
    pub certificates: Vec<Certificate>,
    pub tail: TowerTail,
    /// Nonempty fiber in the depth-`d`, `T = 1` truncated limit, when it
    /// fits the size bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realizable: Option<bool>,
}

impl Tower {
    /// Bare tower from ids; certificates are filled in by [`certify`].
    pub fn from_entries(kind: TowerKind, entries: Vec<usize>) -> Self {
        Tower {
            kind,
            entries,
            certificates: Vec::new(),
            tail: TowerTail::Prefix { extendable: false },
            realizable: None,
        }
    }

    pub fn depth(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, n: usize) -> Option<usize> {
        assert!(n >= 1, "levels are numbered from 1");
        if n <= self.entries.len() {
            return Some(self.entries[n - 1]);
        }
        match self.tail {
            TowerTail::Periodic { start, period } => {
                Some(self.entries[start - 1 + (n - start) % period])
            }
            TowerTail::Prefix { .. } => None,
        }
    }

    pub fn to_json(&self) -> TowerJson {
        TowerJson {
            kind: self.kind,
            entries: self.entries.clone(),
            tail: self.tail,
            flags: None,
        }
    }
}

/// Serialized tower, optionally with the selection flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerJson {
    pub kind: TowerKind,
    pub entries: Vec<usize>,
    pub tail: TowerTail,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flags: Option<ClaimFlags>,
}

impl TowerJson {
    pub fn to_tower(&self) -> Tower {
        Tower {
            kind: self.kind,
            entries: self.entries.clone(),
            certificates: Vec::new(),
            tail: self.tail,
            realizable: None,
        }
    }
}

struct Piece {
    graph: SftGraph,
    start: Vec<usize>,
    language: Language,
}

/// Memoized pieces of each level and their images one and two steps down.
pub struct TowerContext<'a> {
    seq: &'a InverseSequenceSpec,
    kind: TowerKind,
    pieces: HashMap<usize, Vec<Piece>>,
    image1: HashMap<(usize, usize), Language>,
    image2: HashMap<(usize, usize), Language>,
}

impl<'a> TowerContext<'a> {
    pub fn new(seq: &'a InverseSequenceSpec, kind: TowerKind) -> Result<Self> {
        let mut ctx = TowerContext {
            seq,
            kind,
            pieces: HashMap::new(),
            image1: HashMap::new(),
            image2: HashMap::new(),
        };
        for n in 1..=seq.listed_levels() {
            ctx.ensure(n)?;
        }
        Ok(ctx)
    }

    pub fn kind(&self) -> TowerKind {
        self.kind
    }

    fn ensure(&mut self, n: usize) -> Result<usize> {
        let slot = self.seq.level_slot(n);
        if !self.pieces.contains_key(&slot) {
            let g = self.seq.level(n);
            let list = match self.kind {
                TowerKind::Component => {
                    let dec = chain_components(g);
                    dec.components
                        .into_iter()
                        .map(|c| {
                            let start = c.all_vertices();
                            let language = Language::of_shift(&c);
                            Piece {
                                graph: c,
                                start,
                                language,
                            }
                        })
                        .collect()
                }
                TowerKind::Cyclic => {
                    if !is_irreducible(g) {
                        return Err(Error::NotTransitive { level: n });
                    }
                    cyclic_structure(g)?
                        .classes
                        .into_iter()
                        .map(|cl| Piece {
                            graph: g.clone(),
                            language: Language::rooted(g, &cl),
                            start: cl,
                        })
                        .collect()
                }
            };
            self.pieces.insert(slot, list);
        }
        Ok(slot)
    }

    pub fn piece_count(&mut self, n: usize) -> Result<usize> {
        let slot = self.ensure(n)?;
        Ok(self.pieces[&slot].len())
    }

    /// Language of piece `id` at level `n`.
    pub fn language(&mut self, n: usize, id: usize) -> Result<Language> {
        let slot = self.ensure(n)?;
        self.pieces[&slot]
            .get(id)
            .map(|p| p.language.clone())
            .ok_or_else(|| Error::Schema(format!("level {n} has no piece {id}")))
    }

    /// `π_n^{n+1}` of piece `id` at level `n + 1`.
    pub fn image1(&mut self, n: usize, id: usize) -> Result<Language> {
        let key = (self.seq.phase_representative(n), id);
        if let Some(l) = self.image1.get(&key) {
            return Ok(l.clone());
        }
        let slot = self.ensure(n + 1)?;
        let piece = self.pieces[&slot]
            .get(id)
            .ok_or_else(|| Error::Schema(format!("level {} has no piece {id}", n + 1)))?;
        let lang = self.seq.code(n).image_rooted(&piece.graph, &piece.start)?;
        self.image1.insert(key, lang.clone());
        Ok(lang)
    }

    /// `π_n^{n+2}` of piece `id` at level `n + 2`.
    pub fn image2(&mut self, n: usize, id: usize) -> Result<Language> {
        let key = (self.seq.phase_representative(n), id);
        if let Some(l) = self.image2.get(&key) {
            return Ok(l.clone());
        }
        let one = self.image1(n + 1, id)?;
        let lang = self.seq.code(n).image_of_language(&one)?;
        self.image2.insert(key, lang.clone());
        Ok(lang)
    }

    /// Smallest piece id at level `n` whose language includes `lang`.
    pub fn containing(&mut self, n: usize, lang: &Language) -> Result<Option<usize>> {
        for id in 0..self.piece_count(n)? {
            if lang.included_in(&self.language(n, id)?)?.is_none() {
                return Ok(Some(id));
            }
        }
        Ok(None)
    }

    /// Checks `π_n^{n+1}(upper) ⊆ lower`.
    pub fn certificate(&mut self, n: usize, upper: usize, lower: usize) -> Result<Certificate> {
        let img = self.image1(n, upper)?;
        let target = self.language(n, lower)?;
        let witness = img.included_in(&target)?;
        Ok(Certificate {
            level: n,
            image_states: img.state_count(),
            target_states: target.state_count(),
            holds: witness.is_none(),
            counterexample: witness.map(|w| format_word(img.alphabet(), &w)),
        })
    }

    /// Pieces at each tail phase that continue to an infinite tower,
    /// indexed by phase representative.
    fn alive(&mut self) -> Result<HashMap<usize, BTreeSet<usize>>> {
        let l = self.seq.listed_levels();
        let block = match self.seq.tail() {
            Tail::Identity => 1,
            Tail::Periodic { block } => block,
        };
        let s = l + 1 - block;
        let mut alive: HashMap<usize, BTreeSet<usize>> = HashMap::new();
        for r in s..=l {
            alive.insert(r, (0..self.piece_count(r)?).collect());
        }
        loop {
            let mut changed = false;
            for r in (s..=l).rev() {
                let next = self.seq.phase_representative(r + 1);
                let above = alive[&next].clone();
                let mut keep = BTreeSet::new();
                for c in alive[&r].clone() {
                    for &e in &above {
                        if self.certificate(r, e, c)?.holds {
                            keep.insert(c);
                            break;
                        }
                    }
                }
                if keep != alive[&r] {
                    alive.insert(r, keep);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for r in (1..s).rev() {
            let above = alive[&(r + 1)].clone();
            let mut keep = BTreeSet::new();
            for c in 0..self.piece_count(r)? {
                for &e in &above {
                    if self.certificate(r, e, c)?.holds {
                        keep.insert(c);
                        break;
                    }
                }
            }
            alive.insert(r, keep);
        }
        Ok(alive)
    }

    fn is_alive(&self, alive: &HashMap<usize, BTreeSet<usize>>, n: usize, id: usize) -> bool {
        alive[&self.seq.phase_representative(n)].contains(&id)
    }
}

/// Fails with `Mlc1Required` at the first level where MLC(1) fails.
pub fn require_mlc1(seq: &InverseSequenceSpec) -> Result<()> {
    let verdict = check_mlc(seq, 3)?;
    match verdict.first_mlc1_failure() {
        Some(level) => Err(Error::Mlc1Required { level }),
        None => Ok(()),
    }
}

/// Fills in the containment certificates of levels `1..depth`.
pub fn certify(ctx: &mut TowerContext<'_>, tower: &mut Tower, depth: usize) -> Result<bool> {
    let mut certs = Vec::new();
    for n in 1..depth {
        let (Some(lower), Some(upper)) = (tower.entry(n), tower.entry(n + 1)) else {
            return Err(Error::Schema(format!(
                "tower has no entry at level {}",
                n + 1
            )));
        };
        certs.push(ctx.certificate(n, upper, lower)?);
    }
    let ok = certs.iter().all(|c| c.holds);
    tower.certificates = certs;
    Ok(ok)
}

/// All containment-compatible id sequences of length `d`.
pub fn enumerate_towers(
    seq: &InverseSequenceSpec,
    kind: TowerKind,
    d: usize,
) -> Result<Vec<Tower>> {
    if d == 0 {
        return Err(Error::Schema("tower depth must be at least 1".into()));
    }
    if kind == TowerKind::Cyclic {
        for n in 1..=seq.listed_levels() {
            if !is_irreducible(seq.level(n)) {
                return Err(Error::NotTransitive { level: n });
            }
        }
        require_mlc1(seq)?;
    }
    let mut ctx = TowerContext::new(seq, kind)?;
    let alive = ctx.alive()?;
    let mut partial: Vec<(Vec<usize>, Vec<Certificate>)> = (0..ctx.piece_count(1)?)
        .map(|c| (vec![c], Vec::new()))
        .collect();
    for n in 1..d {
        let mut next = Vec::new();
        for (entries, certs) in partial {
            let lower = entries[n - 1];
            for e in 0..ctx.piece_count(n + 1)? {
                let cert = ctx.certificate(n, e, lower)?;
                if cert.holds {
                    let mut en = entries.clone();
                    en.push(e);
                    let mut cs = certs.clone();
                    cs.push(cert);
                    next.push((en, cs));
                }
            }
        }
        partial = next;
    }
    let limit = match truncated_limit(seq, d, 1, LimitMode::Levels) {
        Ok(l) => Some(l),
        Err(Error::TooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut out = Vec::new();
    for (entries, certificates) in partial {
        let extendable = ctx.is_alive(&alive, d, entries[d - 1]);
        let mut tower = Tower {
            kind,
            entries,
            certificates,
            tail: TowerTail::Prefix { extendable },
            realizable: None,
        };
        if let Some(lim) = &limit {
            tower.realizable = Some(!tower_fiber(&mut ctx, &tower, lim)?.is_empty());
        }
        out.push(tower);
    }
    Ok(out)
}

/// Points of the truncated limit on a cycle whose level windows lie in the
/// tower's pieces. Exact when distinct pieces use distinct labels.
pub fn tower_fiber(
    ctx: &mut TowerContext<'_>,
    tower: &Tower,
    lim: &TruncatedLimit,
) -> Result<Vec<usize>> {
    let recurrent = recurrent_points(lim);
    let mut langs = Vec::new();
    for n in 1..=lim.depth {
        let id = tower
            .entry(n)
            .ok_or_else(|| Error::Schema(format!("tower has no entry at level {n}")))?;
        langs.push(ctx.language(n, id)?);
    }
    Ok((0..lim.len())
        .filter(|&i| recurrent[i] && lim.points[i].iter().zip(&langs).all(|(w, l)| l.accepts(w)))
        .collect())
}

/// Whether each point of the truncated limit lies on a cycle.
pub fn recurrent_points(lim: &TruncatedLimit) -> Vec<bool> {
    let mut on_cycle = vec![false; lim.len()];
    for comp in sccs(&lim.succ) {
        if comp.len() > 1 || lim.succ[comp[0]].contains(&comp[0]) {
            comp.iter().for_each(|&v| on_cycle[v] = true);
        }
    }
    on_cycle
}

/// The four properties of a selected tower.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimFlags {
    /// Output and input agree at the start level.
    pub agrees_at_start: bool,
    /// Image of the input's next entry lies in the image of the output's.
    pub image_grows: bool,
    /// Levelwise containment from the start level on.
    pub contained: bool,
    /// One-step images stabilize from the start level on.
    pub stabilized: bool,
}

impl ClaimFlags {
    pub fn all(&self) -> bool {
        self.agrees_at_start && self.image_grows && self.contained && self.stabilized
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionStep {
    /// Level of the chosen piece.
    pub level: usize,
    /// Piece whose image serves as the anchor (one level up for later steps).
    pub anchor: usize,
    /// Level-`(level - 1)` piece the candidates must map into.
    pub host: usize,
    pub candidates: Vec<usize>,
    pub maximal: Vec<usize>,
    pub chosen: usize,
    pub image_states: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerSelectionReport {
    pub start_level: usize,
    pub input: Tower,
    pub output: Tower,
    pub flags: ClaimFlags,
    pub steps: Vec<SelectionStep>,
    /// No periodic pattern within the search horizon.
    pub cap_reached: bool,
}

impl TowerSelectionReport {
    pub fn to_json(&self) -> TowerJson {
        let mut j = self.output.to_json();
        j.flags = Some(self.flags);
        j
    }
}

fn require_chain_recurrent(seq: &InverseSequenceSpec) -> Result<()> {
    for n in 1..=seq.listed_levels() {
        let g = seq.level(n);
        let dec = chain_components(g);
        let covered: usize = dec.vertex_sets.iter().map(Vec::len).sum();
        if !dec.transient_edges.is_empty() || covered != g.vertex_count() {
            return Err(Error::NotChainRecurrent { level: n });
        }
    }
    Ok(())
}

fn choose_maximal(
    ctx: &mut TowerContext<'_>,
    n: usize,
    anchor: &Language,
    host: usize,
) -> Result<(Vec<usize>, Vec<usize>, usize, Language)> {
    let host_lang = ctx.language(n, host)?;
    let mut cands = Vec::new();
    for e in 0..ctx.piece_count(n + 1)? {
        let img = ctx.image1(n, e)?;
        if anchor.included_in(&img)?.is_none() && img.included_in(&host_lang)?.is_none() {
            cands.push((e, img));
        }
    }
    let mut maximal = Vec::new();
    for (i, (e, img)) in cands.iter().enumerate() {
        let mut dominated = false;
        for (j, (_, other)) in cands.iter().enumerate() {
            if i != j && img.included_in(other)?.is_none() && other.included_in(img)?.is_some() {
                dominated = true;
                break;
            }
        }
        if !dominated {
            maximal.push(*e);
        }
    }
    let Some(&chosen) = maximal.first() else {
        return Err(Error::EmptyImageChain { level: n + 1 });
    };
    let lang = cands
        .iter()
        .find(|(e, _)| *e == chosen)
        .map(|(_, l)| l.clone())
        .expect("chosen candidate");
    Ok((
        cands.into_iter().map(|(e, _)| e).collect(),
        maximal,
        chosen,
        lang,
    ))
}

/// Greedy maximal-image tower through `start` agreeing with it below level
/// `n` and stabilizing from `n` on.
pub fn select_max_tower(
    seq: &InverseSequenceSpec,
    start: &Tower,
    n: usize,
) -> Result<TowerSelectionReport> {
    if n == 0 {
        return Err(Error::Schema("start level must be at least 1".into()));
    }
    require_mlc1(seq)?;
    if start.kind == TowerKind::Component {
        require_chain_recurrent(seq)?;
    }
    let mut ctx = TowerContext::new(seq, start.kind)?;
    select_in(&mut ctx, seq, start, n)
}

fn select_in(
    ctx: &mut TowerContext<'_>,
    seq: &InverseSequenceSpec,
    start: &Tower,
    n: usize,
) -> Result<TowerSelectionReport> {
    let missing = |k: usize| Error::Schema(format!("start tower has no entry at level {k}"));
    let mut entries = Vec::new();
    for k in 1..=n {
        entries.push(start.entry(k).ok_or_else(|| missing(k))?);
    }
    let next = start.entry(n + 1).ok_or_else(|| missing(n + 1))?;
    let mut steps = Vec::new();

    let anchor = ctx.image1(n, next)?;
    let (candidates, maximal, mut d, _) = choose_maximal(ctx, n, &anchor, entries[n - 1])?;
    steps.push(SelectionStep {
        level: n + 1,
        anchor: next,
        host: entries[n - 1],
        candidates,
        maximal,
        chosen: d,
        image_states: ctx.image1(n, d)?.state_count(),
    });

    let l = seq.listed_levels();
    let block = match seq.tail() {
        Tail::Identity => 1,
        Tail::Periodic { block } => block,
    };
    let periodic_from = l + 1 - block;
    let horizon = l.max(n + 1) + 4 * block + 1;
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut tail = None;
    let mut m = n + 1;
    while m <= horizon {
        if m - 1 >= periodic_from {
            let state = (seq.phase_representative(m - 1), d);
            if let Some(&first) = seen.get(&state) {
                tail = Some(TowerTail::Periodic {
                    start: first,
                    period: m - first,
                });
                break;
            }
            seen.insert(state, m);
        }
        let target = ctx.image1(m - 1, d)?;
        let mut anchor_piece = None;
        for e in 0..ctx.piece_count(m + 1)? {
            if target.included_in(&ctx.image2(m - 1, e)?)?.is_none() {
                anchor_piece = Some(e);
                break;
            }
        }
        let e0 = anchor_piece.ok_or(Error::EmptyImageChain { level: m + 1 })?;
        let anchor = ctx.image1(m, e0)?;
        let host = ctx.containing(m, &anchor)?.ok_or_else(|| {
            Error::InternalInvariantViolation(format!(
                "image of piece {e0} at level {} lies in no piece",
                m + 1
            ))
        })?;
        entries.push(host);
        let (candidates, maximal, chosen, img) = choose_maximal(ctx, m, &anchor, host)?;
        steps.push(SelectionStep {
            level: m + 1,
            anchor: e0,
            host,
            candidates,
            maximal,
            chosen,
            image_states: img.state_count(),
        });
        d = chosen;
        m += 1;
    }
    let cap_reached = tail.is_none();
    let mut output = Tower {
        kind: start.kind,
        entries,
        certificates: Vec::new(),
        tail: tail.unwrap_or(TowerTail::Prefix { extendable: true }),
        realizable: None,
    };
    let check_depth = check_depth(&output);
    certify(ctx, &mut output, check_depth)?;
    let flags = claim_flags_in(ctx, start, &output, n)?;
    if !flags.all() {
        return Err(Error::InternalInvariantViolation(format!(
            "selected tower fails the claim: {flags:?}"
        )));
    }
    Ok(TowerSelectionReport {
        start_level: n,
        input: start.clone(),
        output,
        flags,
        steps,
        cap_reached,
    })
}

fn check_depth(t: &Tower) -> usize {
    match t.tail {
        TowerTail::Periodic { start, period } => t.entries.len().max(start + period) + 2,
        TowerTail::Prefix { .. } => t.entries.len(),
    }
}

/// Recomputes the four properties from the towers alone.
pub fn claim_flags(
    seq: &InverseSequenceSpec,
    input: &Tower,
    output: &Tower,
    n: usize,
) -> Result<ClaimFlags> {
    let mut ctx = TowerContext::new(seq, output.kind)?;
    claim_flags_in(&mut ctx, input, output, n)
}

fn claim_flags_in(
    ctx: &mut TowerContext<'_>,
    input: &Tower,
    output: &Tower,
    n: usize,
) -> Result<ClaimFlags> {
    let depth = check_depth(output);
    let agrees_at_start = input.entry(n).is_some() && input.entry(n) == output.entry(n);
    let image_grows = match (input.entry(n + 1), output.entry(n + 1)) {
        (Some(a), Some(b)) => ctx.image1(n, a)?.included_in(&ctx.image1(n, b)?)?.is_none(),
        _ => false,
    };
    let mut contained = true;
    for m in n..depth {
        match (output.entry(m), output.entry(m + 1)) {
            (Some(lo), Some(hi)) => contained &= ctx.certificate(m, hi, lo)?.holds,
            _ => contained = false,
        }
    }
    let mut stabilized = true;
    for m in n..depth.saturating_sub(1) {
        match (output.entry(m + 1), output.entry(m + 2)) {
            (Some(a), Some(b)) => stabilized &= ctx.image1(m, a)?.equals(&ctx.image2(m, b)?)?.equal,
            _ => stabilized = false,
        }
    }
    Ok(ClaimFlags {
        agrees_at_start,
        image_grows,
        contained,
        stabilized,
    })
}

/// Tower agreeing with `tower` on levels `1..=level` whose images
/// stabilize from `level` on.
pub fn approximate_by_shadowing_tower(
    seq: &InverseSequenceSpec,
    tower: &Tower,
    level: usize,
) -> Result<Tower> {
    let report = select_max_tower(seq, tower, level)?;
    for k in 1..=level {
        if report.output.entry(k) != tower.entry(k) {
            return Err(Error::InternalInvariantViolation(format!(
                "approximation differs from the tower at level {k}"
            )));
        }
    }
    Ok(report.output)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropicComponent {
    pub report: TowerSelectionReport,
    /// Level `n` with `π_n^{n+1}(C'_{n+1})` of positive entropy.
    pub level: usize,
    /// Entropy of that image in nats.
    pub entropy_bound: f64,
}

/// Tower with stabilizing images whose limit has positive entropy.
pub fn find_entropic_component(seq: &InverseSequenceSpec) -> Result<EntropicComponent> {
    require_mlc1(seq)?;
    let restricted = restrict_to_cr(seq, crate::inverse_systems::DEFAULT_DEPTH_CAP)?;
    let mut ctx = TowerContext::new(&restricted, TowerKind::Component)?;
    let alive = ctx.alive()?;
    let block = match restricted.tail() {
        Tail::Identity => 1,
        Tail::Periodic { block } => block,
    };
    let last = restricted.listed_levels() + block;
    for n in 1..=last {
        for e in 0..ctx.piece_count(n + 1)? {
            if !ctx.is_alive(&alive, n + 1, e) {
                continue;
            }
            let img = ctx.image1(n, e)?;
            if !has_positive_entropy(&img.to_shift_graph()) {
                continue;
            }
            let mut entries = vec![e];
            for k in (1..=n).rev() {
                let upper = *entries.last().expect("nonempty");
                let img = ctx.image1(k, upper)?;
                let host = ctx.containing(k, &img)?.ok_or_else(|| {
                    Error::InternalInvariantViolation(format!(
                        "image at level {k} lies in no component"
                    ))
                })?;
                entries.push(host);
            }
            entries.reverse();
            let start = Tower::from_entries(TowerKind::Component, entries);
            let report = select_in(&mut ctx, &restricted, &start, n)?;
            let out_next = report.output.entry(n + 1).expect("selected entry");
            let bound = entropy::<f64>(&ctx.image1(n, out_next)?.to_shift_graph())?;
            return Ok(EntropicComponent {
                report,
                level: n,
                entropy_bound: bound,
            });
        }
    }
    Err(Error::NoEntropicComponent)
}
