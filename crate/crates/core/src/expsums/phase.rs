//! Exact reduction of `αk mod 1` and the phase functions summed by the
//! exponential-sum evaluators.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::diophantine::AlphaSpec;
use crate::numerics::{FixedReal, Rational};

use super::ExpSumError;

/// Fractional bits of `α` needed so that `{αk}` keeps 64 correct bits for
/// every `k ≤ max_multiplier`, rounded up to a whole limb.
pub fn precision_for(max_multiplier: u128) -> u32 {
    let bits = 128 - max_multiplier.max(1).leading_zeros() + 64;
    bits.div_ceil(64) * 64
}

/// `{α}` at a fixed precision, ready to reduce `αk mod 1` for integer `k`.
///
/// With `α` truncated to `P` bits the error in `{αk}` is below `k·2^-P`, so
/// [`precision_for`] keeps it under `2^-64`.
#[derive(Clone, Debug)]
pub struct PhaseReducer {
    frac_alpha: BigInt,
    bits: u32,
    modulus: BigInt,
}

impl PhaseReducer {
    pub fn new(alpha: &AlphaSpec, max_multiplier: u128) -> Result<Self, ExpSumError> {
        Self::with_bits(alpha, precision_for(max_multiplier))
    }

    pub fn with_bits(alpha: &AlphaSpec, bits: u32) -> Result<Self, ExpSumError> {
        let value = alpha.evaluate(bits)?;
        let bits = value.frac_bits();
        Ok(Self {
            frac_alpha: value.frac().mantissa().clone(),
            bits,
            modulus: BigInt::one() << bits,
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// `{αk}` in fixed point.
    pub fn frac(&self, k: u128) -> FixedReal {
        let m = (&self.frac_alpha * BigInt::from(k)).mod_floor(&self.modulus);
        FixedReal::from_mantissa(m, self.bits).expect("precision at least 64")
    }

    /// `{αk}` as a binary64 value in `[0, 1)`.
    pub fn turns(&self, k: u128) -> f64 {
        let m = (&self.frac_alpha * BigInt::from(k)).mod_floor(&self.modulus);
        let top = (m >> (self.bits - 64)).to_u64().expect("64 bits");
        top as f64 * (-64f64).exp2()
    }
}

/// A real phase `f`, evaluated at integers of a running variable.
#[derive(Clone, Debug, PartialEq)]
pub enum PhaseSpec {
    /// `f(x) = αh(cx)² - m(cx)^γ` with the other variable fixed at `c`;
    /// as a function of `d` and `l` this is `αhd²l² - md^γl^γ`.
    Bilinear {
        alpha: AlphaSpec,
        h: u64,
        m: u64,
        gamma: Rational,
        fixed: u64,
    },
    /// `f(x) = σx^k`.
    Monomial { sigma: f64, k: u32 },
    Zero,
}

impl PhaseSpec {
    /// Bind the phase to a reducer valid for running values `≤ max_running`.
    pub fn prepare(&self, max_running: u64) -> Result<PreparedPhase, ExpSumError> {
        let reducer = match self {
            PhaseSpec::Bilinear { alpha, h, fixed, .. } => {
                let top = (*fixed as u128) * (max_running as u128);
                let max_k = (*h as u128).saturating_mul(top.saturating_mul(top));
                Some(PhaseReducer::new(alpha, max_k)?)
            }
            _ => None,
        };
        if let PhaseSpec::Monomial { k, .. } = self {
            if !(1..=3).contains(k) {
                return Err(ExpSumError::BadArgument(format!("monomial degree {k} outside 1..=3")));
            }
        }
        Ok(PreparedPhase {
            spec: self.clone(),
            reducer,
            max_running,
        })
    }

    /// Closed-form `f'''(x)` in the running variable.
    pub fn third_derivative(&self, x: f64) -> f64 {
        match self {
            PhaseSpec::Bilinear { m, gamma, fixed, .. } => {
                let g = *gamma.numer() as f64 / *gamma.denom() as f64;
                -(*m as f64) * (*fixed as f64).powf(g) * g * (g - 1.0) * (g - 2.0) * x.powf(g - 3.0)
            }
            PhaseSpec::Monomial { sigma, k } => {
                let k = *k as f64;
                sigma * k * (k - 1.0) * (k - 2.0) * x.powf(k - 3.0)
            }
            PhaseSpec::Zero => 0.0,
        }
    }
}

/// A [`PhaseSpec`] with its `α` reduction precomputed.
#[derive(Clone, Debug)]
pub struct PreparedPhase {
    spec: PhaseSpec,
    reducer: Option<PhaseReducer>,
    max_running: u64,
}

fn frac_f64(x: f64) -> f64 {
    x - x.floor()
}

impl PreparedPhase {
    pub fn spec(&self) -> &PhaseSpec {
        &self.spec
    }

    pub fn max_running(&self) -> u64 {
        self.max_running
    }

    /// `f(x) mod 1` (not necessarily reduced into `[0, 1)`).
    pub fn turns(&self, x: u64) -> f64 {
        debug_assert!(x <= self.max_running, "{x} above prepared range {}", self.max_running);
        match &self.spec {
            PhaseSpec::Bilinear { h, m, gamma, fixed, .. } => {
                let reducer = self.reducer.as_ref().expect("bilinear phases carry a reducer");
                let n = (*fixed as u128) * (x as u128);
                let quad = reducer.turns(*h as u128 * n * n);
                let g = *gamma.numer() as f64 / *gamma.denom() as f64;
                quad - frac_f64(*m as f64 * (n as f64).powf(g))
            }
            PhaseSpec::Monomial { sigma, k } => frac_f64(sigma * (x as f64).powi(*k as i32)),
            PhaseSpec::Zero => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reducer_matches_exact_rational() {
        let r = PhaseReducer::new(&AlphaSpec::rational(3, 7), 1 << 40).unwrap();
        for k in [1u128, 7, 22, 1_000_003] {
            let exact = ((3 * k) % 7) as f64 / 7.0;
            assert!((r.turns(k) - exact).abs() < 1e-15, "{k}");
        }
    }

    #[test]
    fn negative_alpha_reduces_into_unit_interval() {
        let r = PhaseReducer::new(&AlphaSpec::rational(-1, 4), 100).unwrap();
        assert_eq!(r.turns(1), 0.75);
        assert_eq!(r.turns(2), 0.5);
    }

    #[test]
    fn precision_policy() {
        assert_eq!(precision_for(1), 128);
        assert_eq!(precision_for(u64::MAX as u128), 128);
        assert_eq!(precision_for(1u128 << 64), 192);
    }

    #[test]
    fn monomial_degree_checked() {
        assert!(PhaseSpec::Monomial { sigma: 1.0, k: 4 }.prepare(10).is_err());
    }
}
