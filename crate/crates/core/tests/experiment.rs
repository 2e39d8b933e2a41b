mod common;

use num_bigint::BigInt;
use num_traits::Pow;
use proptest::prelude::*;
use proptest::test_runner::FileFailurePersistence;

use pslab::diophantine::{AlphaSpec, Convergent};
use pslab::experiment::{
    derive_params, f_delta, gamma_sums, n_for, scaling_report, solution_search, ExperimentError, ExperimentParams,
    DELTA_CLAMP,
};
use pslab::numerics::{decimal_to_fixed, FixedReal, Rational};

fn g95() -> Rational {
    Rational::new(19, 20)
}

fn manual(alpha: &str, beta: &str, n: u64, delta: f64) -> ExperimentParams {
    ExperimentParams {
        alpha: alpha.parse().unwrap(),
        beta: decimal_to_fixed(beta, 256).unwrap(),
        gamma: g95(),
        c: 1.0,
        eps: 0.0,
        conv: Convergent {
            a: 1.into(),
            q: 1.into(),
        },
        n,
        delta,
        delta_formula: delta,
        delta_clamped: false,
        h: 1,
        m: 1,
        theta_v: 2,
    }
}

const SQRT3: &str = "1.7320508075688772935274463415058723669428052538103806280558069794519330169088000370811461867572485756756261414154";
const SQRT3_PLUS_ONE: &str = "2.7320508075688772935274463415058723669428052538103806280558069794519330169088000370811461867572485756756261414154";

#[test]
fn n_satisfies_integer_bracket() {
    // N = ⌊q^{145/142}⌋  ⟺  N^142 ≤ q^145 < (N+1)^142
    for q in [169u64, 408, 985, 5741, 33461] {
        let n = n_for(&BigInt::from(q), &g95()).unwrap();
        let q145 = Pow::pow(BigInt::from(q), 145u32);
        assert!(Pow::pow(BigInt::from(n), 142u32) <= q145);
        assert!(q145 < Pow::pow(BigInt::from(n + 1), 142u32));
    }
}

#[test]
fn parameter_cascade_at_5741() {
    let conv = Convergent {
        a: 8119.into(),
        q: 5741.into(),
    };
    let p = derive_params(&AlphaSpec::Surd(2), &FixedReal::zero(128), &g95(), 1.0, 0.0, &conv).unwrap();
    let nf = p.n as f64;
    assert_eq!(p.h, 75);
    assert_eq!(p.m, nf.powf((16.0 - 15.0 * 0.95) / 29.0).floor() as u64);
    assert_eq!(p.theta_v, nf.powf((2.0 * 0.95 + 23.0) / 58.0).floor() as u64);
    assert!(p.delta_clamped && p.delta == DELTA_CLAMP);
    let small_c = derive_params(&AlphaSpec::Surd(2), &FixedReal::zero(128), &g95(), 0.1, 0.0, &conv).unwrap();
    assert!(!small_c.delta_clamped);
    assert!((small_c.delta - 0.1 * nf.powf(-0.3 / 29.0)).abs() < 1e-15);
}

#[test]
fn near_lower_gamma_edge() {
    let g = Rational::new(13_000_000_001, 14_000_000_000);
    let conv = Convergent {
        a: 1393.into(),
        q: 985.into(),
    };
    let p = derive_params(&AlphaSpec::Surd(2), &FixedReal::zero(128), &g, 0.25, 0.0, &conv).unwrap();
    assert!((p.delta - 0.25).abs() < 1e-6);
    assert!(matches!(
        derive_params(&AlphaSpec::Surd(2), &FixedReal::zero(128), &Rational::new(9, 10), 1.0, 0.0, &conv),
        Err(ExperimentError::GammaOutOfRange(_))
    ));
}

#[test]
fn f_delta_has_mean_two_delta() {
    let grid = 1_000_000u64;
    for delta in [0.05, 0.1, 0.25] {
        let hits: u64 = (0..grid)
            .map(|i| f_delta(&FixedReal::from_ratio(&i.into(), &grid.into(), 128), delta) as u64)
            .sum();
        let mean = hits as f64 / grid as f64 - 2.0 * delta;
        assert!(mean.abs() <= 2e-6, "Delta {delta}: {mean}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_failure_persistence(FileFailurePersistence::Off))]

    #[test]
    fn f_delta_is_periodic(m in any::<i64>(), k in -100i64..100, delta in 0.001f64..0.499) {
        let x = FixedReal::from_mantissa(BigInt::from(m), 64).unwrap();
        let shifted = &x + &FixedReal::from_int(k, 64);
        prop_assert_eq!(f_delta(&x, delta), f_delta(&shifted, delta));
    }
}

#[test]
fn gamma_matches_per_prime_brute_force() {
    let p = manual(&format!("dec:{SQRT3}"), "0.25", 10, 0.2);
    let s = gamma_sums(&p).unwrap();
    let mut want = 0.0;
    for q in [2u64, 3, 5, 7] {
        assert_eq!(common::ps_indicator(q, 19, 20), 1);
        let t = common::OracleAlpha::Surd(3).frac((q * q) as u128) + 0.25;
        let t = t - t.floor();
        let f = if t < 0.2 || t >= 0.8 { 1.0 } else { 0.0 };
        want += (f - 0.4) * (q as f64).ln();
    }
    assert!((s.gamma - want).abs() < 1e-12, "{} vs {want}", s.gamma);
    assert!(s.residual <= 1e-9 * 4.0);
}

#[test]
fn search_is_invariant_under_integer_shifts() {
    let base = solution_search(&manual(&format!("dec:{SQRT3}"), "0.3", 3000, 0.05)).unwrap();
    let alpha_shift = solution_search(&manual(&format!("dec:{SQRT3_PLUS_ONE}"), "0.3", 3000, 0.05)).unwrap();
    let beta_shift = solution_search(&manual(&format!("dec:{SQRT3}"), "1.3", 3000, 0.05)).unwrap();
    assert_eq!(base, alpha_shift);
    assert_eq!(base, beta_shift);
    assert!(base.summary.pass_count > 0);
}

#[test]
fn constant_phase_searches() {
    let none = solution_search(&manual("rat:0/1", "0.4", 500, 0.1)).unwrap();
    assert_eq!(none.summary.pass_count, 0);
    assert!(none.records.iter().all(|r| (r.dist.to_f64() - 0.4).abs() < 1e-15));

    let all = solution_search(&manual("sqrt:2", "0", 500, DELTA_CLAMP)).unwrap();
    assert_eq!(all.summary.pass_count, all.summary.ps_count);
}

#[test]
fn scaling_rows_are_sorted_and_repeatable() {
    let c = |a: i64, q: i64| Convergent {
        a: a.into(),
        q: q.into(),
    };
    let zero = FixedReal::zero(128);
    let rows = scaling_report(&AlphaSpec::Surd(2), &zero, &g95(), 1.0, 0.0, &[c(577, 408), c(239, 169), c(577, 408)])
        .unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0].q, BigInt::from(169));
    assert_eq!(rows[1], rows[2]);
    assert!(scaling_report(&AlphaSpec::Surd(2), &zero, &g95(), 1.0, 0.0, &[]).is_err());
}
