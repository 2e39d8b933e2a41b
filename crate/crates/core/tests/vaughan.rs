mod common;

use proptest::prelude::*;
use proptest::test_runner::FileFailurePersistence;

use pslab::diophantine::AlphaSpec;
use pslab::expsums::PhaseSpec;
use pslab::numerics::Rational;
use pslab::primes::sieve_monolithic;
use pslab::vaughan::{build_coeffs, identity_residual, theta_sums, VaughanError};

fn phase() -> impl Strategy<Value = PhaseSpec> {
    prop_oneof![
        Just(PhaseSpec::Zero),
        (-1.0f64..1.0, 1u32..=3).prop_map(|(sigma, k)| PhaseSpec::Monomial { sigma, k }),
        (2u64..50, 1u64..5, 0u64..5, 1i128..20, 1u64..4).prop_map(|(d, h, m, a, fixed)| PhaseSpec::Bilinear {
            alpha: AlphaSpec::rational(d as i64 * 7 + 1, 97),
            h,
            m,
            gamma: Rational::new(a, 20),
            fixed,
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        ..ProptestConfig::with_failure_persistence(FileFailurePersistence::Off)
    })]

    #[test]
    fn identity_holds(n2 in 5u64..1000, t in 0.0f64..1.0, s in 0.0f64..1.0, phase in phase()) {
        let theta = 2 + ((n2 as f64).sqrt() as u64 - 2) * (t * 1000.0) as u64 / 1000;
        let n1 = theta + ((n2 - theta) as f64 * s) as u64;
        prop_assume!(n1 < n2);
        let r = identity_residual(n1, n2, theta, &phase).unwrap();
        prop_assert!(r <= 1e-9 * (n2 - n1 + 1) as f64);
    }
}

#[test]
fn zero_phase_is_chebyshev_difference() {
    let table = sieve_monolithic(5000);
    for (n1, n2, theta) in [(10u64, 5000u64, 10u64), (31, 2000, 31), (2, 100, 2), (400, 401, 20)] {
        let s = theta_sums(n1, n2, theta, &PhaseSpec::Zero).unwrap();
        let psi: f64 = (n1 + 1..=n2).map(|n| table.lambda(n)).sum();
        assert!((s.combined().re - psi).abs() < 1e-9, "({n1}, {n2}]: {} vs {psi}", s.combined().re);
        assert!(s.combined().im.abs() < 1e-9);
    }
}

#[test]
fn coefficients_agree_with_definitions() {
    let theta = 12u64;
    let k = build_coeffs(theta, 3000).unwrap();
    for d in 1..=theta * theta {
        let mut c = 0.0;
        for r in 1..=theta {
            if d % r == 0 && d / r <= theta {
                c += common::mobius(r) as f64 * common::lambda(d / r);
            }
        }
        assert!((k.c(d) - c).abs() < 1e-12, "c({d})");
    }
    for d in 1..=3000u64 {
        let a: i64 = (1..=theta.min(d)).filter(|r| d % r == 0).map(|r| common::mobius(r) as i64).sum();
        assert_eq!(k.a(d), a, "a({d})");
    }
}

#[test]
fn range_errors() {
    assert!(matches!(theta_sums(3, 100, 5, &PhaseSpec::Zero), Err(VaughanError::RangeError(_))));
    assert!(matches!(theta_sums(50, 50, 5, &PhaseSpec::Zero), Err(VaughanError::RangeError(_))));
    assert!(matches!(build_coeffs(1, 100), Err(VaughanError::RangeError(_))));
}
