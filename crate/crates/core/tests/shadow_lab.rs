use symdyn::decomposition::{cyclic_structure, entropy};
use symdyn::fixtures;
use symdyn::shadow_lab::{
    brute_shadowing_check, build_example62, check_within, default_scales, endpoint_census,
    sigma_family, sigma_infinity, sigma_k, truncate_shift, BaseClass, CheckMode, FiniteSystem,
    FiniteSystemJson, ShadowOutcome, SigmaIndex, SigmaMember,
};
use symdyn::shift_core::{Language, SymbolicPoint};
use symdyn::{Error, Rational, SftGraph, SmallRational};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn single_fixed_point_is_shadowed() {
    let sys = FiniteSystem::new(vec!["p".into()], vec![vec![q(0, 1)]], vec![0]).unwrap();
    let v = brute_shadowing_check(&sys, &q(1, 2), &q(1, 4), 10, CheckMode::Exhaustive).unwrap();
    assert!(v.is_ok());
}

#[test]
fn metric_is_validated_on_load() {
    let bad = FiniteSystemJson {
        points: vec!["a".into(), "b".into(), "c".into()],
        dist: vec![
            vec!["0".into(), "1".into(), "3".into()],
            vec!["1".into(), "0".into(), "1".into()],
            vec!["3".into(), "1".into(), "0".into()],
        ],
        map: vec![0, 1, 2],
    };
    assert!(matches!(
        FiniteSystem::<Rational>::from_json(&bad),
        Err(Error::Schema(_))
    ));
    let asym = FiniteSystemJson {
        dist: vec![vec!["0".into(), "1".into()], vec!["2".into(), "0".into()]],
        points: vec!["a".into(), "b".into()],
        map: vec![1, 0],
    };
    assert!(FiniteSystem::<Rational>::from_json(&asym).is_err());
    let wild = FiniteSystemJson {
        dist: vec![vec!["0".into()]],
        points: vec!["a".into()],
        map: vec![3],
    };
    assert!(FiniteSystem::<Rational>::from_json(&wild).is_err());
}

#[test]
fn system_json_round_trip() {
    let (sys, _) = truncate_shift::<Rational>(&fixtures::golden_mean().unwrap(), 4).unwrap();
    let text = serde_json::to_string(&sys.to_json()).unwrap();
    let back: FiniteSystemJson = serde_json::from_str(&text).unwrap();
    assert_eq!(FiniteSystem::<Rational>::from_json(&back).unwrap(), sys);
}

#[test]
fn full_shift_truncation_is_the_shift_on_padded_words() {
    let g = fixtures::full_shift(2).unwrap();
    let (sys, pts) = truncate_shift::<Rational>(&g, 5).unwrap();
    assert_eq!(sys.len(), 32);
    for (i, p) in pts.iter().enumerate() {
        assert_eq!(p.period(), &[0]);
        assert_eq!(pts[sys.image(i)], p.shifted(1));
    }
}

#[test]
fn depth_six_full_shift_truncation_has_an_unshadowed_orbit() {
    let (sys, pts) = truncate_shift::<Rational>(&fixtures::full_shift(2).unwrap(), 6).unwrap();
    let v = brute_shadowing_check(&sys, &q(1, 2), &q(1, 4), 8, CheckMode::Exhaustive).unwrap();
    let ShadowOutcome::Counterexample { pseudo_orbit, .. } = &v.outcome else {
        panic!("expected a counterexample")
    };
    assert!(v.replay(&sys));
    // shadowing at 1/2 means matching leading symbols; no padded word of
    // length 6 produces this leading-symbol string
    let leading: Vec<usize> = pseudo_orbit.iter().map(|&x| pts[x].at(0)).collect();
    assert!(pts.iter().all(|p| p.prefix(8) != leading));
}

#[test]
fn depth_eight_full_shift_truncation_shadows_at_horizon_eight() {
    let (sys, _) = truncate_shift::<SmallRational>(&fixtures::full_shift(2).unwrap(), 8).unwrap();
    let v = brute_shadowing_check(
        &sys,
        &SmallRational::new(1, 2),
        &SmallRational::new(1, 4),
        8,
        CheckMode::Exhaustive,
    )
    .unwrap();
    assert!(v.is_ok(), "{:?}", v.outcome);
}

#[test]
fn sigma_infinity_points_and_map() {
    let sys = sigma_infinity::<Rational>(8).unwrap();
    assert_eq!(sys.len(), 10);
    let z = |m: usize| sys.index_of(&format!("{}1(0)^inf", "0".repeat(m))).unwrap();
    let zero = sys.index_of("(0)^inf").unwrap();
    for m in 1..=8 {
        assert_eq!(sys.image(z(m)), z(m - 1));
    }
    assert_eq!(sys.image(z(0)), zero);
    assert_eq!(sys.image(zero), zero);
}

#[test]
fn sigma_infinity_cycle_is_not_shadowed() {
    let sys = sigma_infinity::<Rational>(8).unwrap();
    let z = |m: usize| sys.index_of(&format!("{}1(0)^inf", "0".repeat(m))).unwrap();
    let (eps, delta) = (q(1, 4), q(1, 16));
    let v = brute_shadowing_check(&sys, &eps, &delta, 16, CheckMode::Exhaustive).unwrap();
    assert!(v.replay(&sys));
    let ShadowOutcome::Counterexample {
        pseudo_orbit,
        failures,
    } = &v.outcome
    else {
        panic!("expected a counterexample")
    };
    let cycle = [z(4), z(3), z(2), z(1), z(0)];
    let offset = cycle.iter().position(|&p| p == pseudo_orbit[0]).unwrap();
    for (i, &x) in pseudo_orbit.iter().enumerate() {
        assert_eq!(x, cycle[(offset + i) % 5]);
    }
    assert_eq!(failures.len(), 10);
    // the cycle written from z_4 fails against every point too
    let written: Vec<usize> = (0..16).map(|i| cycle[i % 5]).collect();
    let all: Vec<usize> = (0..sys.len()).collect();
    let fails = symdyn::shadow_lab::shadowing_failures(&sys, &written, &eps, &all);
    assert!(fails.iter().all(|(_, f)| f.is_some()));
}

#[test]
fn sampled_mode_is_reproducible() {
    let sys = sigma_infinity::<Rational>(8).unwrap();
    let mode = CheckMode::Sampled {
        seed: 7,
        count: 400,
    };
    let a = brute_shadowing_check(&sys, &q(1, 4), &q(1, 16), 16, mode).unwrap();
    let b = brute_shadowing_check(&sys, &q(1, 4), &q(1, 16), 16, mode).unwrap();
    assert_eq!(a, b);
    assert!(a.replay(&sys));
    let json = serde_json::to_string(&a.to_json(&sys)).unwrap();
    assert!(json.contains("\"seed\":7"));
}

#[test]
fn exhaustive_guard() {
    let (sys, _) = truncate_shift::<SmallRational>(&fixtures::full_shift(2).unwrap(), 10).unwrap();
    let r = brute_shadowing_check(
        &sys,
        &SmallRational::new(1, 1),
        &SmallRational::new(1, 2),
        40,
        CheckMode::Exhaustive,
    );
    assert!(matches!(r, Err(Error::TooLarge { .. })));
}

#[test]
fn thresholds_must_be_positive() {
    let sys = sigma_infinity::<Rational>(2).unwrap();
    assert!(matches!(
        brute_shadowing_check(&sys, &q(0, 1), &q(1, 4), 4, CheckMode::Exhaustive),
        Err(Error::InvalidThresholds(_))
    ));
}

#[test]
fn gap_one_is_the_golden_mean() {
    let SigmaMember::Graph(g) = sigma_family::<Rational>(SigmaIndex::Finite(1)).unwrap() else {
        panic!()
    };
    let gm = fixtures::golden_mean().unwrap();
    assert!(
        Language::of_shift(&g)
            .equals(&Language::of_shift(&gm))
            .unwrap()
            .equal
    );
}

#[test]
fn gap_shift_entropies_match_polynomial_roots() {
    for k in 1..=5 {
        let g = sigma_k(k).unwrap();
        let h: f64 = entropy(&g).unwrap();
        let root = bisect(|x| x.powi(k as i32 + 1) - x.powi(k as i32) - 1.0, 1.0, 2.0);
        assert!((h - root.ln()).abs() < 1e-9, "k = {k}");
    }
    let h: f64 = entropy(&sigma_k(2).unwrap()).unwrap();
    assert!((h - 0.382245).abs() < 1e-6);
}

#[test]
fn gap_shifts_are_nested() {
    for k in 1..=6 {
        let (a, b) = (
            Language::of_shift(&sigma_k(k + 1).unwrap()),
            Language::of_shift(&sigma_k(k).unwrap()),
        );
        assert_eq!(a.included_in(&b).unwrap(), None);
        assert!(b.included_in(&a).unwrap().is_some());
    }
}

#[test]
fn default_ladder() {
    let l = default_scales::<Rational>(4);
    assert_eq!(l.c, vec![q(1, 4), q(1, 32), q(1, 128), q(1, 512)]);
    assert_eq!(l.delta[0], q(1, 8));
}

#[test]
fn endpoint_levels() {
    let c = default_scales::<Rational>(5).c;
    let a = endpoint_census(&c, 5).unwrap();
    assert_eq!(a[0], vec![q(0, 1), q(1, 4), q(3, 4), q(1, 1)]);
    let sizes: Vec<usize> = a.iter().map(Vec::len).collect();
    assert_eq!(sizes, vec![4, 4, 8, 16, 32]);
}

#[test]
fn scales_are_validated() {
    for bad in [
        vec![q(1, 2), q(1, 4)],
        vec![q(1, 4), q(1, 4)],
        vec![q(1, 4), q(-1, 8)],
        vec![q(1, 4)],
    ] {
        assert!(matches!(
            build_example62(2, &bad, 2, 8),
            Err(Error::InvalidScales(_))
        ));
    }
}

#[test]
fn example_census_at_depth_four() {
    let c = default_scales::<Rational>(4).c;
    let ex = build_example62(4, &c, 4, 8).unwrap();
    let census = &ex.census;
    assert_eq!(census.endpoint_counts, vec![4, 4, 8, 16]);
    assert_eq!(census.component_count, 16);
    assert!(census.bijection);
    assert!(census.smallness_holds);
    assert_eq!(census.sft_components, 16);
    for check in ex.verify_fibers().unwrap() {
        assert!(check.ok, "{check:?}");
    }
}

#[test]
fn interior_bases_carry_the_non_shadowing_fiber() {
    let c = default_scales::<Rational>(4).c;
    let ex = build_example62(4, &c, 2, 4).unwrap();
    let interior: Vec<_> = ex
        .census
        .components
        .iter()
        .filter(|c| c.class == BaseClass::Interior)
        .collect();
    let expected = fixtures::interval_endpoints(4)[3]
        .iter()
        .filter(|(_, l, r)| *l.min(r) > 2)
        .count();
    assert!(expected > 0);
    assert_eq!(interior.len(), expected);
    assert!(interior.iter().all(|c| c.fiber == "sigma_inf"));
    assert!(ex.census.bijection);
    let sys = ex.system().unwrap();
    assert_eq!(
        sys.len(),
        ex.fibers.iter().map(FiniteSystem::len).sum::<usize>()
    );
    for (i, &j) in sys.map().iter().enumerate() {
        let (a, b) = (
            sys.name(i).split('|').next().unwrap(),
            sys.name(j).split('|').next().unwrap(),
        );
        assert_eq!(a, b);
    }
}

#[test]
fn pseudo_orbits_in_a_cyclic_class_stay_shadowed_inside_it() {
    let g = SftGraph::from_named_edges(
        &["a", "b", "c", "d"],
        &[
            ("u", "v", "a"),
            ("u", "v", "b"),
            ("v", "u", "c"),
            ("v", "u", "d"),
        ],
    )
    .unwrap();
    let cyc = cyclic_structure(&g).unwrap();
    assert_eq!(cyc.period, 2);
    let (sys, pts) = truncate_shift::<Rational>(&g, 7).unwrap();
    let u = g.vertex_index("u").unwrap();
    let class: Vec<usize> = (0..pts.len())
        .filter(|&i| g.out_edges(u).iter().any(|e| e.label == pts[i].at(0)))
        .collect();
    let v = check_within(
        &sys,
        &class,
        &class,
        &q(1, 2),
        &q(1, 4),
        5,
        CheckMode::Exhaustive,
    )
    .unwrap();
    assert!(v.is_ok());
    let p = SymbolicPoint::parse(g.alphabet(), "(ac)^inf").unwrap();
    assert!(pts.contains(&p) || pts.iter().any(|x| x.prefix(7) == p.prefix(7)));
}
