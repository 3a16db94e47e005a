use super::*;
use crate::lp::{LpStatus, TOL_FEAS};
use crate::model::{gen_bernoulli_matrix, noiseless_outcomes, ProblemInstance};
use crate::noise::{apply_noise, NoiseModel};
use crate::rng::GtRng;
use proptest::prelude::*;
use std::vec::Vec;

fn bits(s: &str) -> BitVec {
    s.chars().map(|c| c == '1').collect()
}

fn as_f64(x: &BitVec) -> Vec<f64> {
    x.iter().map(|b| b as u8 as f64).collect()
}

#[test]
fn builder_rows() {
    let m = TestMatrix::from_rows(&[[0u8, 0, 1], [1, 0, 0]]).unwrap();
    let lp = build_nolipo_lp(&m, &bits("01"), 1).unwrap();
    let rows = lp.constraints();
    // Negative test: -eta_0 + x_2 = 0 with eta_0 in [0, d].
    assert_eq!(rows[0].terms, [(2, 1.0), (3, -1.0)]);
    assert_eq!(rows[0].relation, Relation::Eq);
    assert_eq!(rows[0].rhs, 0.0);
    assert_eq!(lp.bounds()[3], (0.0, 1.0));
    // Positive test: eta_1 + x_0 >= 1 with eta_1 in [0, 1].
    assert_eq!(rows[1].terms, [(0, 1.0), (4, 1.0)]);
    assert_eq!(rows[1].relation, Relation::Ge);
    assert_eq!(rows[1].rhs, 1.0);
    assert_eq!(lp.bounds()[4], (0.0, 1.0));
    assert_eq!(rows[2].relation, Relation::Eq);
    assert_eq!(rows[2].rhs, 1.0);
    assert_eq!(lp.objective(), &[0.0, 0.0, 0.0, 1.0, 1.0]);
}

#[test]
fn zero_weight_forces_zero() {
    let m = gen_bernoulli_matrix(10, 6, 0.3, 1).unwrap();
    let y = bits("1010101010");
    let s = crate::lp::solve(&build_nolipo_lp(&m, &y, 0).unwrap()).unwrap();
    assert!(s.values[..6].iter().all(|v| v.abs() < 1e-12));
    let out = decode_nolipo(&m, &y, 0).unwrap();
    assert_eq!(out.estimate.count_ones(), 0);
    assert!(out.integral);
    assert!(build_nolipo_lp(&m, &y, 7).is_err());
}

#[test]
fn rounding_examples() {
    assert_eq!(round_solution(&[1.0, 0.0, 1.0], TOL_INT), (bits("101"), true));
    assert_eq!(round_solution(&[0.5, 0.5], TOL_INT), (bits("11"), false));
    assert_eq!(round_solution(&[0.9999999, 3e-7], TOL_INT), (bits("10"), true));
}

#[test]
fn lipo_identity_recovers_truth() {
    let m = TestMatrix::identity(6);
    let y = bits("010110");
    let out = decode_lipo(&m, &y, 3).unwrap().unwrap();
    assert_eq!(out.estimate, y);
    assert!(out.integral);
}

#[test]
fn lipo_detects_impossible_positive() {
    let m = TestMatrix::from_rows(&[[0u8, 0, 0], [1, 1, 0]]).unwrap();
    assert!(decode_lipo(&m, &bits("10"), 0).unwrap().is_none());
}

#[test]
fn minus_variant_with_all_positive_outcomes() {
    let m = gen_bernoulli_matrix(8, 6, 0.4, 2).unwrap();
    let out = decode_nolipo_minus(&m, &BitVec::ones(8), 2).unwrap();
    assert_eq!(out.objective_value, 0.0);
    let sum: f64 = out.fractional.iter().sum();
    assert!((sum - 2.0).abs() < 1e-9);
}

#[test]
fn nounlipo_noiseless_stops_at_truth() {
    let m = gen_bernoulli_matrix(60, 8, 0.25, 3).unwrap();
    let inst = ProblemInstance::new(8, [2, 5]).unwrap();
    let y = noiseless_outcomes(&m, &inst).unwrap();
    let out = decode_nounlipo(&m, &y, 5, 0.0, 1.0).unwrap().unwrap();
    assert_eq!(out.assumed_defectives, 2);
    assert_eq!(out.estimate, inst.indicator());
    assert!(out.eta.iter().all(|&e| e == 0.0));
    // Neither smaller count admits a zero-slack binary point.
    for d_bar in 0..2 {
        for x in weight_vectors(8, d_bar) {
            assert!(one_sided_objective(&m, &y, &as_f64(&x), Side::Both).unwrap() > 0.0);
        }
    }
}

#[test]
fn nounlipo_all_positive_terminates() {
    let m = gen_bernoulli_matrix(6, 5, 0.5, 4).unwrap();
    let r = decode_nounlipo(&m, &BitVec::ones(6), 5, 0.0, 1.0).unwrap();
    if let Some(out) = r {
        assert!(out.assumed_defectives <= 5);
    }
}

#[test]
fn perturbation_set() {
    let x = bits("110");
    let all = PerturbationSpec::all(&x);
    assert_eq!(all.len(), 2);
    for p in &all {
        assert_eq!(p.phi().iter().map(|&v| v as i32).sum::<i32>(), 0);
    }
    let p = PerturbationSpec::new(&x, 0, 2).unwrap();
    assert_eq!(p.phi(), &[-1, 0, 1]);
    assert_eq!(p.apply(&x), bits("011"));
    assert!(PerturbationSpec::new(&x, 2, 0).is_err());
    // Negative test pooling the added item: slack rises by one.
    assert_eq!(p.eta_change(&bits("001"), false, &x), 1);
    // Positive test pooling only the removed item: slack rises by one.
    assert_eq!(p.eta_change(&bits("100"), true, &x), 1);
    assert_eq!(p.eta_change(&bits("110"), true, &x), 0);
}

pub(crate) fn weight_vectors(n: usize, d: usize) -> Vec<BitVec> {
    (0u32..1 << n)
        .filter(|mask| mask.count_ones() as usize == d)
        .map(|mask| (0..n).map(|j| mask >> j & 1 == 1).collect())
        .collect()
}

struct Case {
    m: TestMatrix,
    inst: ProblemInstance,
    y_hat: BitVec,
}

fn small_case(seed: u64, q: f64) -> Case {
    let mut rng = GtRng::new(seed);
    let n = 2 + rng.below(7);
    let d = rng.below(3).min(n);
    let t = 1 + rng.below(10);
    let p = if d <= 1 { 0.5 } else { 1.0 / d as f64 };
    let m = gen_bernoulli_matrix(t, n, p, rng.next_u64()).unwrap();
    let inst = ProblemInstance::random(n, d, rng.next_u64()).unwrap();
    let y = noiseless_outcomes(&m, &inst).unwrap();
    let (y_hat, _) = apply_noise(&y, &NoiseModel::Bsc { q }, rng.next_u64()).unwrap();
    Case { m, inst, y_hat }
}

fn generic_objective(lp: &LinearProgram) -> f64 {
    let s = crate::lp::solve(lp).unwrap();
    assert_eq!(s.status, LpStatus::Optimal);
    s.objective_value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn dual_route_matches_literal_program(seed: u64, noisy: bool) {
        let c = small_case(seed, if noisy { 0.1 } else { 0.0 });
        let d = c.inst.d();
        let cases = [
            (Side::Both, build_nolipo_lp(&c.m, &c.y_hat, d).unwrap(), decode_nolipo(&c.m, &c.y_hat, d).unwrap()),
            (Side::Positive, build_nolipo_plus_lp(&c.m, &c.y_hat, d).unwrap(), decode_nolipo_plus(&c.m, &c.y_hat, d).unwrap()),
            (Side::Negative, build_nolipo_minus_lp(&c.m, &c.y_hat, d).unwrap(), decode_nolipo_minus(&c.m, &c.y_hat, d).unwrap()),
        ];
        for (_, lp, out) in cases {
            let reference = generic_objective(&lp);
            prop_assert!((reference - out.objective_value).abs() <= 1e-9, "{} vs {}", reference, out.objective_value);
            let mut point = out.fractional.clone();
            point.extend(&out.eta);
            prop_assert!(lp.max_violation(&point) <= TOL_FEAS);
        }
    }

    #[test]
    fn brute_force_oracle(seed: u64, noisy: bool) {
        let c = small_case(seed, if noisy { 0.1 } else { 0.0 });
        let d = c.inst.d();
        let out = decode_nolipo(&c.m, &c.y_hat, d).unwrap();
        let truth = one_sided_objective(&c.m, &c.y_hat, &as_f64(&c.inst.indicator()), Side::Both).unwrap();
        prop_assert!(out.objective_value <= truth + 1e-9);
        if out.integral {
            let best = weight_vectors(c.m.cols(), d)
                .iter()
                .map(|x| one_sided_objective(&c.m, &c.y_hat, &as_f64(x), Side::Both).unwrap())
                .fold(f64::INFINITY, f64::min);
            prop_assert!((out.objective_value - best).abs() <= 1e-9);
        }
    }

    #[test]
    fn one_sided_below_truth(seed: u64) {
        let c = small_case(seed, 0.1);
        let d = c.inst.d();
        let x = as_f64(&c.inst.indicator());
        let plus = decode_nolipo_plus(&c.m, &c.y_hat, d).unwrap();
        let minus = decode_nolipo_minus(&c.m, &c.y_hat, d).unwrap();
        prop_assert!(plus.objective_value <= one_sided_objective(&c.m, &c.y_hat, &x, Side::Positive).unwrap() + 1e-9);
        prop_assert!(minus.objective_value <= one_sided_objective(&c.m, &c.y_hat, &x, Side::Negative).unwrap() + 1e-9);
        prop_assert!(plus.eta.iter().zip(c.y_hat.iter()).all(|(e, yb)| yb || *e == 0.0));
    }

    #[test]
    fn truth_is_feasible_for_literal_program(seed: u64) {
        let c = small_case(seed, 0.2);
        let d = c.inst.d();
        let lp = build_nolipo_lp(&c.m, &c.y_hat, d).unwrap();
        let mut point = as_f64(&c.inst.indicator());
        point.extend(eta_at(&c.m, &c.y_hat, &point.clone(), Side::Both).unwrap());
        prop_assert!(lp.max_violation(&point) <= TOL_FEAS);
    }

    #[test]
    fn noiseless_zero_objective_and_lipo_feasible(seed: u64) {
        let c = small_case(seed, 0.0);
        let d = c.inst.d();
        prop_assert!(decode_nolipo(&c.m, &c.y_hat, d).unwrap().objective_value.abs() <= 1e-9);
        let lipo = decode_lipo(&c.m, &c.y_hat, d).unwrap();
        prop_assert!(lipo.is_some());
        let lp = build_lipo_lp(&c.m, &c.y_hat, d).unwrap();
        prop_assert!(lp.max_violation(&lipo.unwrap().fractional) <= TOL_FEAS);
    }
}
