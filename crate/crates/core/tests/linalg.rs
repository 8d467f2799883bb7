use collapse_core::exec::{map_trials_parallel, map_trials_sequential};
use collapse_core::linalg::*;
use collapse_core::rng::seeded;
use collapse_core::stats::chi_square_gof;
use proptest::prelude::*;

fn arb_state(dims: Vec<usize>) -> impl Strategy<Value = StateVector> {
    let n: usize = dims.iter().product();
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_filter_map("nonzero", move |v| {
        let s = StateVector::new(v.into_iter().map(|(a, b)| c(a, b)).collect(), dims.clone()).ok()?;
        (s.norm_sqr() > 1e-3).then(|| s.normalized().unwrap())
    })
}

fn arb_operator(d: usize) -> impl Strategy<Value = Operator> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d)
        .prop_map(move |v| Operator::from_entries(vec![d], v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
}

/// Cayley transform `(1 − iH)(1 + iH)⁻¹` of a 2×2 Hermitian `H`.
fn cayley_2x2(a: f64, b: f64, cr: f64, ci: f64) -> Operator {
    // H = [[a, z], [z*, b]], z = cr + i ci.
    let z = c(cr, ci);
    let i = c(0.0, 1.0);
    let m_plus = [[r(1.0) + i * a, i * z], [i * z.conj(), r(1.0) + i * b]];
    let m_minus = [[r(1.0) - i * a, -i * z], [-i * z.conj(), r(1.0) - i * b]];
    let det = m_plus[0][0] * m_plus[1][1] - m_plus[0][1] * m_plus[1][0];
    let inv = [[m_plus[1][1] / det, -m_plus[0][1] / det], [-m_plus[1][0] / det, m_plus[0][0] / det]];
    let e = m_minus.iter().flat_map(|row| (0..2).map(move |col| row[0] * inv[0][col] + row[1] * inv[1][col])).collect();
    Operator::from_entries(vec![2], e).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn kron_is_associative(a in arb_state(vec![2]), b in arb_state(vec![3]), cc in arb_state(vec![2])) {
        let left = kron(&kron(&a, &b), &cc);
        let right = kron(&a, &kron(&b, &cc));
        prop_assert!(left.max_abs_diff(&right) < 1e-15);
        prop_assert_eq!(left.factor_dims(), &[2, 3, 2]);
    }

    #[test]
    fn operator_kron_is_associative(a in arb_operator(2), b in arb_operator(2), cc in arb_operator(3)) {
        let left = kron(&kron(&a, &b), &cc);
        let right = kron(&a, &kron(&b, &cc));
        prop_assert!(left.max_abs_diff(&right) < 1e-14);
    }

    #[test]
    fn unitaries_preserve_norm(
        s in arb_state(vec![2, 3, 2]),
        h in (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0),
        slot in 0usize..2,
    ) {
        let u = cayley_2x2(h.0, h.1, h.2, h.3);
        prop_assert!(u.is_unitary(1e-12));
        let target = if slot == 0 { 0 } else { 2 };
        let out = u.apply_on(&[target], &s).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        let dense = u.embed(&[target], &[2, 3, 2]).unwrap().apply(&s).unwrap();
        prop_assert!(out.max_abs_diff(&dense) < 1e-14);
    }

    #[test]
    fn apply_on_matches_embedding(op in arb_operator(3), s in arb_state(vec![2, 3, 2])) {
        let sparse = op.apply_on(&[1], &s).unwrap();
        let dense = op.embed(&[1], &[2, 3, 2]).unwrap().apply(&s).unwrap();
        prop_assert!(sparse.max_abs_diff(&dense) < 1e-13);
    }

    #[test]
    fn marginals_sum_to_one(s in arb_state(vec![3, 2, 2])) {
        for slot in 0..3 {
            let m = s.slot_marginal(slot).unwrap();
            prop_assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn digest_is_phase_blind(s in arb_state(vec![2, 2]), theta in 0.0f64..std::f64::consts::TAU) {
        let rotated = s.scaled(Complex64::from_polar(1.0, theta));
        prop_assert!(s.approx_eq_up_to_phase(&rotated, 1e-12));
        prop_assert_eq!(collapse_core::trace::state_digest(&s), collapse_core::trace::state_digest(&rotated));
    }
}

#[test]
fn born_frequencies_over_1e5_trials() {
    let s = StateVector::from_amplitudes(vec![r(0.5), c(0.0, 0.5), r(-0.5f64.sqrt())]).unwrap();
    let projectors: Vec<Operator> =
        (0..3).map(|k| Operator::projector_onto(&StateVector::basis(&[3], &[k]).unwrap()).unwrap()).collect();
    let n = 100_000;
    let mut counts = [0u64; 3];
    let mut rng = seeded(17);
    let m = ProjectiveMeasurement::new(projectors).unwrap();
    for _ in 0..n {
        counts[m.measure(&s, &mut rng).unwrap().outcome_index] += 1;
    }
    let expected = [0.25 * n as f64, 0.25 * n as f64, 0.5 * n as f64];
    assert!(chi_square_gof(&counts, &expected).passes(1e-3), "{counts:?}");
}

#[test]
fn measurement_in_rotated_basis() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = StateVector::from_amplitudes(vec![r(h), r(h)]).unwrap();
    let minus = StateVector::from_amplitudes(vec![r(h), r(-h)]).unwrap();
    let fam = vec![Operator::projector_onto(&plus).unwrap(), Operator::projector_onto(&minus).unwrap()];
    let s = StateVector::basis(&[2], &[0]).unwrap();
    let mut rng = seeded(2);
    let out = measure_projective(&s, &fam, &mut rng).unwrap();
    assert!((out.probability - 0.5).abs() < 1e-12);
    let expect = if out.outcome_index == 0 { &plus } else { &minus };
    assert!(out.post_state.approx_eq_up_to_phase(expect, 1e-12));
}

#[test]
fn replay_is_deterministic_and_order_independent() {
    let s = StateVector::from_amplitudes(vec![r(0.6), r(0.8)]).unwrap();
    let run = |i: usize, rng: &mut collapse_core::rng::SimRng| (i, measure_slot(&s, 0, rng).unwrap().value);
    let seq = map_trials_sequential(2000, 99, run);
    let par = map_trials_parallel(2000, 99, run);
    assert_eq!(seq, par);
    assert_eq!(seq, map_trials_sequential(2000, 99, run));
    assert_ne!(seq, map_trials_sequential(2000, 100, run));
}
