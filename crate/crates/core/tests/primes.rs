mod common;

use proptest::prelude::*;
use proptest::test_runner::FileFailurePersistence;

use pslab::numerics::Rational;
use pslab::primes::{
    is_ps_prime, primes_up_to, ps_count, ps_witnesses, segments, sieve, sieve_monolithic, sieve_with_limit,
    AmbiguityPolicy, PrimesError,
};

#[test]
fn divisor_sums_of_mu_and_lambda() {
    let limit = 100_000u64;
    let t = sieve_monolithic(limit);
    let mut mu_sum = vec![0i64; limit as usize + 1];
    let mut lambda_sum = vec![0.0f64; limit as usize + 1];
    for d in 1..=limit {
        let (mu, lam) = (t.mu(d) as i64, t.lambda(d));
        let mut m = d;
        while m <= limit {
            mu_sum[m as usize] += mu;
            lambda_sum[m as usize] += lam;
            m += d;
        }
    }
    for n in 1..=limit {
        assert_eq!(mu_sum[n as usize], i64::from(n == 1), "sum of mu over divisors of {n}");
        assert!((lambda_sum[n as usize] - (n as f64).ln()).abs() < 1e-9, "sum of Lambda over divisors of {n}");
    }
}

#[test]
fn segmented_equals_monolithic() {
    let limit = 200_000u64;
    let whole = sieve_monolithic(limit);
    for seg_len in [1_000u64, 4_096, 65_537] {
        let mut n = 0;
        for seg in segments(0, limit, seg_len) {
            for k in seg.lo() + 1..=seg.hi() {
                n += 1;
                assert_eq!(seg.is_prime(k), whole.is_prime(k), "{k}");
                assert_eq!(seg.mu(k), whole.mu(k), "{k}");
                assert_eq!(seg.tau(k), whole.tau(k), "{k}");
                assert_eq!(seg.lambda(k).to_bits(), whole.lambda(k).to_bits(), "{k}");
            }
        }
        assert_eq!(n, limit);
    }
}

#[test]
fn segment_length_is_enforced() {
    assert!(matches!(sieve_with_limit(0, 101, 100), Err(PrimesError::SegmentTooLarge { .. })));
    assert!(matches!(sieve(10, 10), Err(PrimesError::BadInterval { .. })));
}

#[test]
fn prime_counts() {
    assert_eq!(primes_up_to(100).len(), 25);
    assert_eq!(primes_up_to(1_000_000).len(), 78_498);
}

proptest! {
    #![proptest_config(ProptestConfig::with_failure_persistence(FileFailurePersistence::Off))]

    #[test]
    fn windows_match_trial_division(lo in 0u64..10_000_000_000, len in 1u64..200) {
        let seg = sieve(lo, lo + len).unwrap();
        for n in lo + 1..=lo + len {
            prop_assert_eq!(seg.is_prime(n), common::is_prime(n), "{}", n);
            prop_assert_eq!(seg.mu(n), common::mobius(n), "{}", n);
            prop_assert!((seg.lambda(n) - common::lambda(n)).abs() < 1e-12, "{}", n);
        }
    }

    #[test]
    fn membership_matches_integer_roots(p in 2u64..10_000_000, b in 15u32..60, slack in 1u32..4) {
        // γ = a/b with 13/14 < γ < 1
        let a = b - slack;
        let g = Rational::new(a as i128, b as i128);
        prop_assume!(g > Rational::new(13, 14));
        let expect = common::ps_indicator(p, a, b);
        let got = is_ps_prime(p, &g).unwrap();
        prop_assert_eq!(got.is_some(), expect == 1);
        if let Some(w) = got {
            prop_assert_eq!(w.n, common::ceil_root(p, a, b));
        }
    }
}

#[test]
fn small_ps_lists() {
    let g = Rational::new(19, 20);
    let (w, skipped) = ps_witnesses(10, &g, AmbiguityPolicy::Fail).unwrap();
    assert!(skipped.is_empty());
    assert_eq!(w.iter().map(|w| (w.p, w.n)).collect::<Vec<_>>(), [(2, 2), (3, 3), (5, 5), (7, 7)]);
    assert_eq!(ps_count(10, &g, AmbiguityPolicy::Fail).unwrap().count, 4);
}

#[test]
fn half_exponent_counts_squares_gaps() {
    // γ = 1/2: p is PS iff some n has n² ∈ [p, p+1), i.e. p is a square.
    let (w, _) = ps_witnesses(10_000, &Rational::new(1, 2), AmbiguityPolicy::Fail).unwrap();
    let ps: Vec<u64> = w.iter().map(|w| w.p).collect();
    let oracle: Vec<u64> = common::primes_upto(10_000)
        .into_iter()
        .filter(|&p| common::ps_indicator(p, 1, 2) == 1)
        .collect();
    assert_eq!(ps, oracle);
    assert!(ps.is_empty());
}
