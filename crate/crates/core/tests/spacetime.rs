use collapse_core::exec::map_trials;
use collapse_core::linalg::{r, StateVector};
use collapse_core::rng::seeded;
use collapse_core::spacetime::*;
use collapse_core::stats::binomial_sigma;
use collapse_core::Error;
use proptest::prelude::*;

/// Particle 2 measured at R on the right, particle 1 at L on the left.
fn r_point() -> SpacetimePoint {
    SpacetimePoint::new(5.0, 1.0)
}

fn l_point() -> SpacetimePoint {
    SpacetimePoint::new(-5.0, 2.0)
}

fn pair(g_a: bool, g_b: bool) -> ScenarioConfig {
    ScenarioConfig::singlet_pair(r_point(), l_point(), g_a, g_b).unwrap()
}

fn product(p1: i8, p2: i8) -> StateVector {
    let d = |v: i8| if v > 0 { 0 } else { 1 };
    StateVector::basis(&[2, 2], &[d(p1), d(p2)]).unwrap()
}

/// Surface through `(0, t)` with slope `s` on `|x| ≤ 6`, flat outside.
fn tilted(t: f64, s: f64) -> SpacelikeSurface {
    SpacelikeSurface::from_knots(vec![(-6.0, t - 6.0 * s), (6.0, t + 6.0 * s)]).unwrap()
}

#[test]
fn volume_examples() {
    let s0 = SpacelikeSurface::flat(0.0);
    let s = SpacelikeSurface::flat(5.0);
    assert!(!in_volume(&SpacetimePoint::new(0.0, -1.0), &s, &s0));
    assert!(in_volume(&SpacetimePoint::new(0.0, 3.0), &s, &s0));
    assert!(!in_volume(&SpacetimePoint::new(0.0, 5.0), &s, &s0));
    assert!(in_volume(&SpacetimePoint::new(0.0, 0.0), &s, &s0));
}

#[test]
fn past_cone_examples() {
    let s0 = SpacelikeSurface::flat(0.0);
    let p = SpacetimePoint::new(0.0, 2.0);
    let cone = past_cone_surface(&p, &s0).unwrap();
    assert_eq!(cone.knots(), &[(-2.0, 0.0), (0.0, 2.0), (2.0, 0.0)]);
    assert!(!in_volume(&SpacetimePoint::new(3.0, 1.0), &cone, &s0));
    assert!(in_volume(&SpacetimePoint::new(0.0, 1.0), &cone, &s0));
}

#[test]
fn past_cone_over_tilted_initial_surface() {
    let s0 = SpacelikeSurface::with_tails(vec![(-1.0, 0.0), (1.0, 1.0)], 0.0, 0.0).unwrap();
    let p = SpacetimePoint::new(0.0, 3.0);
    let cone = past_cone_surface(&p, &s0).unwrap();
    for k in -100..=100 {
        let x = k as f64 * 0.1;
        let expect = s0.eval(x).max(p.t - (x - p.x).abs());
        assert!((cone.eval(x) - expect).abs() < 1e-12, "x = {x}");
    }
}

#[test]
fn union_of_two_cones_matches_pointwise_max() {
    let s0 = SpacelikeSurface::flat(0.0);
    let pts = [SpacetimePoint::new(-1.0, 2.0), SpacetimePoint::new(2.5, 3.0)];
    let u = past_cone_union(&pts, &s0).unwrap();
    for k in -80..=80 {
        let x = k as f64 * 0.1;
        let expect = pts.iter().map(|p| p.t - (x - p.x).abs()).fold(0.0, f64::max);
        assert!((u.eval(x) - expect).abs() < 1e-12);
    }
}

#[test]
fn one_particle_reduces_with_born_weights() {
    let alpha = 0.6f64;
    let beta = 0.8f64;
    let cfg = ScenarioConfig::one_particle(r(alpha), r(beta), SpacetimePoint::new(0.0, 1.0), true).unwrap();
    let below = SpacelikeSurface::flat(0.5);
    let above = SpacelikeSurface::flat(2.0);
    let n = 100_000;
    let plus = map_trials(n, 7, |_, rng| {
        let mut log = EventLog::new();
        assert_eq!(&state_on_surface(&cfg, &below, &mut log, rng).unwrap(), cfg.initial_state());
        let s = state_on_surface(&cfg, &above, &mut log, rng).unwrap();
        let o = log.get("A").unwrap().outcome;
        let expect = StateVector::basis(&[2], &[if o > 0 { 0 } else { 1 }]).unwrap();
        assert!(s.approx_eq_up_to_phase(&expect, 1e-12));
        o == 1
    })
    .into_iter()
    .filter(|&b| b)
    .count();
    let p = alpha * alpha;
    let f = plus as f64 / n as f64;
    assert!((f - p).abs() < 3.0 * binomial_sigma(p, n), "{f}");
}

#[test]
fn switched_off_apparatus_never_reduces() {
    let cfg = ScenarioConfig::one_particle(r(0.6), r(0.8), SpacetimePoint::new(0.0, 1.0), false).unwrap();
    let mut log = EventLog::new();
    let s = state_on_surface(&cfg, &SpacelikeSurface::flat(10.0), &mut log, &mut seeded(1)).unwrap();
    assert_eq!(&s, cfg.initial_state());
    assert!(log.events().is_empty());
}

#[test]
fn two_particle_case_split() {
    let below_both = SpacelikeSurface::flat(0.5);
    let above_r_only = tilted(1.5, 0.1);
    let above_l_only = tilted(2.2, -0.25);
    let above_both = SpacelikeSurface::flat(3.0);
    assert!(in_volume(&r_point(), &above_r_only, &SpacelikeSurface::flat(0.0)));
    assert!(!in_volume(&l_point(), &above_r_only, &SpacelikeSurface::flat(0.0)));
    assert!(in_volume(&l_point(), &above_l_only, &SpacelikeSurface::flat(0.0)));
    assert!(!in_volume(&r_point(), &above_l_only, &SpacelikeSurface::flat(0.0)));

    for (g_a, g_b) in [(false, false), (true, false), (false, true), (true, true)] {
        let cfg = pair(g_a, g_b);
        for seed in 0..20 {
            let mut rng = seeded(seed);
            let mut log = EventLog::new();
            let s = state_on_surface(&cfg, &below_both, &mut log, &mut rng).unwrap();
            assert_eq!(s, singlet());
            for sigma in [&above_r_only, &above_l_only, &above_both] {
                let s = state_on_surface(&cfg, sigma, &mut log, &mut rng).unwrap();
                let reduced = crossed(&cfg, sigma);
                if reduced.is_empty() {
                    assert_eq!(s, singlet());
                } else {
                    let one = product(1, -1);
                    let two = product(-1, 1);
                    assert!(s.approx_eq_up_to_phase(&one, 1e-12) || s.approx_eq_up_to_phase(&two, 1e-12));
                }
            }
            if g_a && g_b {
                assert_eq!(log.get("A").unwrap().outcome, -log.get("B").unwrap().outcome);
            }
        }
    }
}

#[test]
fn state_persists_from_l_to_both() {
    let cfg = pair(true, true);
    for seed in 0..50 {
        let mut rng = seeded(seed);
        let mut log = EventLog::new();
        let first = state_on_surface(&cfg, &tilted(2.2, -0.25), &mut log, &mut rng).unwrap();
        let later = state_on_surface(&cfg, &SpacelikeSurface::flat(3.0), &mut log, &mut rng).unwrap();
        assert_eq!(first, later);
    }
}

#[test]
fn reduction_alternatives_are_even_over_1e5_trials() {
    let n = 100_000;
    for (g_a, g_b, sigma) in
        [(true, false, tilted(1.5, 0.1)), (false, true, tilted(2.2, -0.25)), (true, true, SpacelikeSurface::flat(3.0))]
    {
        let cfg = pair(g_a, g_b);
        let first = map_trials(n, 11, |_, rng| {
            let mut log = EventLog::new();
            let s = state_on_surface(&cfg, &sigma, &mut log, rng).unwrap();
            s.approx_eq_up_to_phase(&product(1, -1), 1e-12)
        })
        .into_iter()
        .filter(|&b| b)
        .count();
        let f = first as f64 / n as f64;
        assert!((f - 0.5).abs() < 3.0 * binomial_sigma(0.5, n), "{g_a} {g_b}: {f}");
    }
}

#[test]
fn property_attribution_follows_the_light_cone() {
    let cfg = pair(true, false);
    let particle_1 = cfg.particles()[0];
    // Future light cone of R reaches x = −5 at t = 1 + 10.
    for seed in 0..20 {
        let mut rng = seeded(seed);
        let mut log = EventLog::new();
        let before = property_at(&particle_1.at_time(0.5), 0, &cfg, &mut log, &mut rng).unwrap();
        assert_eq!(before, PropertyVerdict::Indefinite);
        let spacelike = property_at(&particle_1.at_time(10.5), 0, &cfg, &mut log, &mut rng).unwrap();
        assert_eq!(spacelike, PropertyVerdict::Indefinite);
        let on_cone = property_at(&particle_1.at_time(11.0), 0, &cfg, &mut log, &mut rng).unwrap();
        assert_eq!(on_cone, PropertyVerdict::Indefinite);
        let after = property_at(&particle_1.at_time(11.5), 0, &cfg, &mut log, &mut rng).unwrap();
        let a = log.get("A").unwrap().outcome;
        assert_eq!(after, PropertyVerdict::Definite(-a));
        let own = property_at(&cfg.particles()[1].at_time(1.5), 1, &cfg, &mut log, &mut rng).unwrap();
        assert_eq!(own, PropertyVerdict::Definite(a));
    }
}

#[test]
fn apparatus_pointer_is_always_definite() {
    let cfg = pair(true, true);
    let mut rng = seeded(3);
    let mut log = EventLog::new();
    for k in 0..40 {
        let t = k as f64 * 0.25;
        let reading = apparatus_reading("A", t, &cfg, &mut log, &mut rng).unwrap();
        if t <= r_point().t {
            assert_eq!(reading, Reading::Ready);
        } else {
            let o = log.get("A").unwrap().outcome;
            assert_eq!(reading, if o > 0 { Reading::Plus } else { Reading::Minus });
        }
    }
    let off = pair(false, true);
    assert_eq!(apparatus_reading("A", 9.0, &off, &mut EventLog::new(), &mut rng).unwrap(), Reading::Ready);
}

#[test]
fn parameter_independence_table() {
    let stats = stats_parameter_independence(&pair(true, true), 20_000, 5).unwrap();
    assert_eq!(stats.entries.len(), 8);
    for e in &stats.entries {
        assert!((e.probability - 0.5).abs() < 3.0 * e.sigma, "{e:?}");
    }
    assert!(stats.entry(Side::L, 1, true).is_some());
    assert_eq!(stats.both_on_same_outcome, 0);
    assert_eq!(stats.both_on_trials, 40_000);
}

#[test]
fn below_initial_surface_is_an_error() {
    let cfg = pair(true, true);
    let r = property_at(&SpacetimePoint::new(0.0, -1.0), 0, &cfg, &mut EventLog::new(), &mut seeded(0));
    assert!(matches!(r, Err(Error::BelowInitialSurface { .. })));
}

fn claim(target: ClaimTarget, vantage: SpacetimePoint) -> CounterfactualClaim {
    CounterfactualClaim { vantage, fact: "A".into(), target, asserted_outcome: 1 }
}

#[test]
fn counterfactual_cases() {
    let observer = SpacetimePoint::new(5.0, 3.0);
    let both = pair(true, true);
    let mut rng = seeded(9);
    let actual = claim(ClaimTarget::Actual { apparatus: "B".into() }, observer);
    assert_eq!(
        counterfactual_classify(&actual, &both, &mut EventLog::new(), &mut rng).unwrap(),
        Legitimacy::Legitimate
    );

    let only_a = pair(true, false);
    let at_l = claim(ClaimTarget::Hypothetical { particle: 0, at: l_point() }, observer);
    assert_eq!(
        counterfactual_classify(&at_l, &only_a, &mut EventLog::new(), &mut rng).unwrap(),
        Legitimacy::Illegitimate
    );

    let t = SpacetimePoint::new(-5.0, 20.0);
    let at_t = claim(ClaimTarget::Hypothetical { particle: 0, at: t }, observer);
    assert_eq!(
        counterfactual_classify(&at_t, &only_a, &mut EventLog::new(), &mut rng).unwrap(),
        Legitimacy::Legitimate
    );
}

#[test]
fn malformed_claims_rejected() {
    let only_a = pair(true, false);
    let mut rng = seeded(1);
    let observer = SpacetimePoint::new(5.0, 3.0);
    let bad = [
        claim(ClaimTarget::Actual { apparatus: "B".into() }, observer),
        claim(ClaimTarget::Hypothetical { particle: 0, at: SpacetimePoint::new(0.0, 5.0) }, observer),
        claim(ClaimTarget::Hypothetical { particle: 3, at: l_point() }, observer),
        claim(ClaimTarget::Actual { apparatus: "B".into() }, SpacetimePoint::new(-5.0, 3.0)),
        CounterfactualClaim { asserted_outcome: 0, ..claim(ClaimTarget::Actual { apparatus: "A".into() }, observer) },
    ];
    for c in bad {
        let r = counterfactual_classify(&c, &only_a, &mut EventLog::new(), &mut rng);
        assert!(matches!(r, Err(Error::MalformedClaim(_))), "{c:?}: {r:?}");
    }
}

fn names(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("λ{k}")).collect()
}

#[test]
fn hidden_variable_four_element_model() {
    let model =
        HiddenVariableModel::new(names(4), vec![1, 1, -1, -1], vec![(1, -1), (-1, 1), (1, -1), (-1, 1)]).unwrap();
    // Oracle: enumerate Λ₁₋₂ directly from the definition.
    let oracle: Vec<usize> = (0..4).filter(|&k| [1, 1, -1, -1][k] == 1 && model.both_on(k) == (-1, 1)).collect();
    assert_eq!(oracle, vec![1]);
    let report = hv_counterfactual_demo(&model).unwrap();
    assert_eq!(report.flagged.len(), 1);
    let d = &report.flagged[0];
    assert_eq!(d.lambda, "λ2");
    assert_eq!(d.same_lambda, (-1, 1));
    assert_eq!(d.same_outcome_b, -1);
    assert_eq!(d.same_outcome_worlds, vec!["λ3".to_string()]);
    assert!(report.criteria_disagree());
}

#[test]
fn hidden_variable_maximal_and_local_models() {
    let maximal = HiddenVariableModel::new(names(2), vec![1, 1], vec![(-1, 1), (-1, 1)]).unwrap();
    assert_eq!(hv_counterfactual_demo(&maximal).unwrap().flagged.len(), 2);
    let local = HiddenVariableModel::new(names(2), vec![1, -1], vec![(1, -1), (-1, 1)]);
    assert!(matches!(local, Err(Error::LocalModel(_))));
}

fn arb_surface() -> impl Strategy<Value = SpacelikeSurface> {
    (prop::collection::vec((-0.9f64..0.9, 0.2f64..3.0), 1..5), 0.0f64..8.0, -10.0f64..-5.0).prop_map(
        |(segments, t0, x0)| {
            let mut knots = vec![(x0, t0)];
            for (slope, dx) in segments {
                let (x, t) = *knots.last().unwrap();
                knots.push((x + dx, t + slope * dx));
            }
            let low = knots.iter().map(|k| k.1).fold(0.0, f64::min);
            SpacelikeSurface::from_knots(knots.into_iter().map(|(x, t)| (x, t - low)).collect()).unwrap()
        },
    )
}

fn arb_point() -> impl Strategy<Value = SpacetimePoint> {
    (-12.0f64..12.0, -2.0f64..14.0).prop_map(|(x, t)| SpacetimePoint::new(x, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn boosts_preserve_volume_membership(
        p in arb_point(),
        sigma in arb_surface(),
        lift in 0.0f64..4.0,
        v in -0.9f64..0.9,
    ) {
        let s0 = SpacelikeSurface::flat(-3.0);
        let sigma = SpacelikeSurface::with_tails(
            sigma.knots().iter().map(|&(x, t)| (x, t + lift)).collect(), 0.0, 0.0).unwrap();
        let before = in_volume(&p, &sigma, &s0);
        let after = in_volume(&p.boosted(v), &sigma.boosted(v), &s0.boosted(v));
        // Points within rounding distance of a surface may flip.
        let margin = (p.t - sigma.eval(p.x)).abs().min((p.t - s0.eval(p.x)).abs());
        prop_assume!(margin > 1e-9);
        prop_assert_eq!(before, after);
    }

    #[test]
    fn boosts_preserve_property_verdicts(
        t1 in 0.0f64..25.0,
        v in -0.9f64..0.9,
        seed in 0u64..1000,
        g_b in any::<bool>(),
    ) {
        let cfg = pair(true, g_b);
        let boosted = cfg.boosted(v);
        let p = cfg.particles()[0].at_time(t1);
        prop_assume!((t1 - 11.0).abs() > 1e-6 && (t1 - 2.0).abs() > 1e-6);
        let mut log = EventLog::new();
        let mut rng = seeded(seed);
        let here = property_at(&p, 0, &cfg, &mut log, &mut rng).unwrap();
        let mut blog = EventLog::new();
        let mut brng = seeded(seed);
        let there = property_at(&p.boosted(v), 0, &boosted, &mut blog, &mut brng).unwrap();
        prop_assert_eq!(here, there);
    }

    #[test]
    fn state_is_independent_of_surface_history(
        first in arb_surface(),
        lift in 0.0f64..5.0,
        seed in 0u64..1000,
        g_a in any::<bool>(),
        g_b in any::<bool>(),
    ) {
        let cfg = pair(g_a, g_b);
        let s1 = SpacelikeSurface::with_tails(
            first.knots().iter().map(|&(x, t)| (x, t + lift)).collect(), 0.0, 0.0).unwrap();
        prop_assume!(s1.dominates(&first));
        let mut via = EventLog::new();
        let mut rng = seeded(seed);
        state_on_surface(&cfg, &first, &mut via, &mut rng).unwrap();
        let stepped = state_on_surface(&cfg, &s1, &mut via, &mut rng).unwrap();
        let mut direct = EventLog::new();
        let jumped = state_on_surface(&cfg, &s1, &mut direct, &mut seeded(seed)).unwrap();
        prop_assert_eq!(stepped, jumped);
        prop_assert_eq!(via.events(), direct.events());
    }
}
