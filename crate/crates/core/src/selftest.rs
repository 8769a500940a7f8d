//! Small fixture suites behind the command line's `--selftest` flag.

use crate::chaos::{
    chain_proximal_join, density_report, find_r_distal_tuple, scheduled_horizons, scramble,
};
use crate::decomposition::{chain_components, decomposition_report, entropy};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::inverse_systems::{check_mlc, extract_mlc1_subsequence, restrict_to_cr, MlcStatus};
use crate::shadow_lab::{
    brute_shadowing_check, build_example62, default_scales, sigma_infinity, truncate_shift,
    CheckMode, FiniteSystem,
};
use crate::shift_core::{language_equal, Dyadic, SymbolicPoint};
use crate::towers::{
    enumerate_towers, find_entropic_component, select_max_tower, Tower, TowerKind,
};
use crate::Rational;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Analyze,
    Mlc,
    Towers,
    Entropic,
    Scramble,
    Shadow,
    Example62,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestCase {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub suite: Suite,
    pub passed: usize,
    pub failed: usize,
    pub cases: Vec<SelftestCase>,
}

type Case = (&'static str, fn() -> Result<(bool, String)>);

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-6
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

const ANALYZE: &[Case] = &[
    ("golden mean report", || {
        let r = decomposition_report(&fixtures::golden_mean()?)?;
        Ok((
            close(r.entropy_nats, 0.481212) && r.period == Some(1) && r.components.len() == 1,
            format!("{:.6}", r.entropy_nats),
        ))
    }),
    ("full shift entropy", || {
        let h: f64 = entropy(&fixtures::full_shift(2)?)?;
        Ok((close(h, 2f64.ln()), format!("{h:.6}")))
    }),
    ("three cycle period", || {
        let r = decomposition_report(&fixtures::three_cycle()?)?;
        Ok((
            r.period == Some(3) && r.entropy_nats == 0.0,
            format!("{:?}", r.period),
        ))
    }),
    ("even shift presentations agree", || {
        let (a, b) = fixtures::even_shift()?;
        let v = language_equal(&a, &b)?;
        Ok((v.equal, String::new()))
    }),
    ("wandering edge is transient", || {
        let d = chain_components(&fixtures::wandering()?);
        Ok((
            d.components.len() == 2 && d.transient_edges.len() == 1,
            String::new(),
        ))
    }),
];

const MLC: &[Case] = &[
    ("abc chain fails one-step stabilization", || {
        let v = check_mlc(&fixtures::abc_chain()?, 8)?;
        let lv = &v.levels[0];
        Ok((
            !lv.mlc1 && lv.mlc == MlcStatus::Holds { witness: 3 },
            format!("{:?}", lv.mlc),
        ))
    }),
    ("surjective sequences stabilize at once", || {
        let ok = [fixtures::constant_full_shift()?, fixtures::xor_sequence()?]
            .iter()
            .map(|s| check_mlc(s, 8).map(|v| v.mlc1_everywhere()))
            .collect::<Result<Vec<_>>>()?;
        Ok((ok.iter().all(|&b| b), String::new()))
    }),
    ("abc chain extraction", || {
        let seq = fixtures::abc_chain()?;
        let v = check_mlc(&seq, 8)?;
        let (ext, map) = extract_mlc1_subsequence(&seq, &v)?;
        Ok((
            check_mlc(&ext, 8)?.mlc1_everywhere(),
            format!("n(2) = {}", map.n(2)),
        ))
    }),
    ("restriction keeps stabilization", || {
        let r = restrict_to_cr(&fixtures::constant_mixed()?, 8)?;
        Ok((check_mlc(&r, 8)?.mlc1_everywhere(), String::new()))
    }),
];

const TOWERS: &[Case] = &[
    ("two fixed points give two towers", || {
        let t = enumerate_towers(&fixtures::two_fixed_points()?, TowerKind::Component, 3)?;
        Ok((t.len() == 2, format!("{}", t.len())))
    }),
    ("two cycle gives two class towers", || {
        let t = enumerate_towers(&fixtures::constant_two_cycle()?, TowerKind::Cyclic, 3)?;
        Ok((t.len() == 2, format!("{}", t.len())))
    }),
    ("branching selection takes the maximal image", || {
        let start = Tower::from_entries(TowerKind::Component, vec![0, 0, 2]);
        let r = select_max_tower(&fixtures::branching()?, &start, 1)?;
        Ok((
            r.flags.all() && r.output.entries[..3] == [0, 1, 1],
            format!("{:?}", r.output.entries),
        ))
    }),
    ("interval towers", || {
        let t = enumerate_towers(
            &fixtures::interval_tower_sequence(4)?,
            TowerKind::Component,
            5,
        )?;
        Ok((t.len() == 16, format!("{}", t.len())))
    }),
];

const ENTROPIC: &[Case] = &[
    ("golden mean", || {
        let e = find_entropic_component(&fixtures::constant_golden_mean()?)?;
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        Ok((
            close(e.entropy_bound, phi.ln()),
            format!("{:.6}", e.entropy_bound),
        ))
    }),
    ("mixed fixture picks the golden mean", || {
        let e = find_entropic_component(&fixtures::constant_mixed()?)?;
        Ok((e.report.output.entry(1) == Some(1), String::new()))
    }),
    ("cycles have none", || {
        match find_entropic_component(&fixtures::constant_three_cycle()?) {
            Err(Error::NoEntropicComponent) => Ok((true, String::new())),
            other => Ok((false, format!("{other:?}"))),
        }
    }),
];

const SCRAMBLE: &[Case] = &[
    ("full shift pair is 1-distal", || {
        let t = find_r_distal_tuple(&fixtures::full_shift(2)?, 2, 4)?;
        Ok((t.r == Dyadic::ONE, format!("{:?}", t.r)))
    }),
    ("join on the full shift", || {
        let g = fixtures::full_shift(2)?;
        let y = SymbolicPoint::parse(g.alphabet(), "(0)^inf")?;
        let z = SymbolicPoint::parse(g.alphabet(), "(1)^inf")?;
        let (w, cert) = chain_proximal_join(&g, &y, &z, Dyadic::Pow(3))?;
        Ok((
            cert.limsup == Dyadic::Zero && w.format(g.alphabet()) == "111(0)^inf",
            w.format(g.alphabet()),
        ))
    }),
    ("golden mean pair meets the ladder", || {
        let g = fixtures::golden_mean()?;
        let (tuple, delta) = scramble(&g, 2, 8, Dyadic::Pow(5), 8)?;
        let hs = scheduled_horizons(tuple.schedule(), 3, 6);
        let r = density_report(
            (0..2).map(|i| tuple.stream(i)).collect(),
            Dyadic::Pow(5),
            delta,
            &hs,
        )?;
        Ok((r.all_pass(), format!("{} horizons", r.rows.len())))
    }),
];

const SHADOW: &[Case] = &[
    ("fixed point", || {
        let g = crate::shift_core::SftGraph::full_shift(&["a".to_string()])?;
        let (sys, _) = truncate_shift::<Rational>(&g, 1)?;
        let v = brute_shadowing_check(&sys, &q(1, 2), &q(1, 4), 4, CheckMode::Exhaustive)?;
        Ok((v.is_ok(), String::new()))
    }),
    ("depth-8 full shift", || {
        let (sys, _) = truncate_shift::<Rational>(&fixtures::full_shift(2)?, 8)?;
        let v = brute_shadowing_check(&sys, &q(1, 2), &q(1, 4), 8, CheckMode::Exhaustive)?;
        Ok((v.is_ok(), format!("work {}", v.work)))
    }),
    ("sigma_inf counterexample replays", || {
        let sys: FiniteSystem<Rational> = sigma_infinity(8)?;
        let v = brute_shadowing_check(&sys, &q(1, 4), &q(1, 16), 16, CheckMode::Exhaustive)?;
        Ok((!v.is_ok() && v.replay(&sys), String::new()))
    }),
];

const EXAMPLE62: &[Case] = &[
    ("depth-4 census", || {
        let c = default_scales::<Rational>(4).c;
        let ex = build_example62(4, &c, 4, 8)?;
        let n = &ex.census;
        let ok = n.endpoint_counts == [4, 4, 8, 16] && n.component_count == 16 && n.bijection;
        Ok((ok, format!("{:?}", n.endpoint_counts)))
    }),
    ("depth-3 fibers shadow", || {
        let c = default_scales::<Rational>(3).c;
        let checks = build_example62(3, &c, 3, 8)?.verify_fibers()?;
        Ok((
            checks.iter().all(|k| k.ok),
            format!("{} fibers", checks.len()),
        ))
    }),
];

pub fn run(suite: Suite) -> SelftestReport {
    let cases = match suite {
        Suite::Analyze => ANALYZE,
        Suite::Mlc => MLC,
        Suite::Towers => TOWERS,
        Suite::Entropic => ENTROPIC,
        Suite::Scramble => SCRAMBLE,
        Suite::Shadow => SHADOW,
        Suite::Example62 => EXAMPLE62,
    };
    let cases: Vec<SelftestCase> = cases
        .iter()
        .map(|(name, f)| {
            let (passed, detail) = f().unwrap_or_else(|e| (false, e.to_string()));
            SelftestCase {
                name: name.to_string(),
                passed,
                detail,
            }
        })
        .collect();
    let passed = cases.iter().filter(|c| c.passed).count();
    SelftestReport {
        suite,
        passed,
        failed: cases.len() - passed,
        cases,
    }
}
