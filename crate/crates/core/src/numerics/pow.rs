//! Real powers `n^γ` of positive integers with rational `γ`, in fixed point.
//!
//! The value is `exp(γ·ln n)`. Both series run at a working precision wide
//! enough that the final rounding to the requested precision dominates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use super::fixed::{round_div, round_shift};
use super::{FixedReal, NumericsError, Rational, MIN_FRAC_BITS};

/// Distance (in bits below the requested precision) within which a power is
/// flagged as possibly integral.
pub const FLOOR_GUARD_BITS: u32 = 32;

/// Largest multiple of the initial precision tried before giving up on a floor.
pub const MAX_ESCALATION: u32 = 8;

/// Result of [`pow_real`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowValue {
    pub value: FixedReal,
    /// Set when the value lies within `2^-(P-32)` of an integer.
    pub near_integer: bool,
    /// Set when the value was certified to be exactly an integer.
    pub exact: bool,
}

/// `2·atanh(z)` for a fixed-point `z` with `|z| <= 1/3`, as a raw mantissa at `bits`.
fn two_atanh(z: &BigInt, bits: u32) -> BigInt {
    let z2 = round_shift(&(z * z), bits);
    let mut power = z.clone();
    let mut acc = BigInt::zero();
    let mut k: u64 = 1;
    while !power.is_zero() {
        acc += &power / BigInt::from(k);
        power = round_shift(&(&power * &z2), bits);
        k += 2;
    }
    acc << 1u32
}

/// `ln 2` as a mantissa at `bits`.
fn ln2(bits: u32) -> BigInt {
    let third = round_div(&(BigInt::one() << bits), &BigInt::from(3));
    two_atanh(&third, bits)
}

/// `ln n` for `n >= 1` as a mantissa at `bits`.
fn ln_int(n: &BigInt, bits: u32) -> BigInt {
    debug_assert!(n.is_positive());
    let k = n.bits() - 1;
    // m = n / 2^k in [1, 2); z = (m - 1) / (m + 1) in [0, 1/3).
    let pow2 = BigInt::one() << k;
    let z = round_div(&((n - &pow2) << bits), &(n + &pow2));
    two_atanh(&z, bits) + ln2(bits) * BigInt::from(k)
}

/// `exp(y)` for a mantissa `y >= 0` at `bits`. Returns a mantissa at `bits`.
fn exp_nonneg(y: &BigInt, bits: u32) -> BigInt {
    debug_assert!(!y.is_negative());
    const HALVINGS: u32 = 16;
    let w = bits + HALVINGS + 16;
    let y = y << (w - bits);
    let l2 = ln2(w);
    let k = y.div_floor(&l2);
    let r = &y - &k * &l2;
    let r = round_shift(&r, HALVINGS);
    // Taylor series of exp(r) with r < 2^-16.
    let one = BigInt::one() << w;
    let mut term = one.clone();
    let mut acc = one;
    let mut j: u64 = 1;
    loop {
        term = round_shift(&(&term * &r), w) / BigInt::from(j);
        if term.is_zero() {
            break;
        }
        acc += &term;
        j += 1;
    }
    for _ in 0..HALVINGS {
        acc = round_shift(&(&acc * &acc), w);
    }
    let k = k.to_u32().expect("exponent fits in u32");
    round_shift(&(acc << k), w - bits)
}

fn check_gamma(gamma: &Rational) -> Result<(), NumericsError> {
    let zero = Rational::zero();
    let two = Rational::from_integer(2);
    if *gamma <= zero || *gamma >= two {
        return Err(NumericsError::ExponentOutOfRange(*gamma));
    }
    Ok(())
}

/// Whether `k^den == n^num`, checked by exact integer arithmetic when cheap.
fn is_exact_power(n: &BigInt, k: &BigInt, gamma: &Rational) -> bool {
    let (num, den) = (*gamma.numer(), *gamma.denom());
    if den > 64 || num > 128 {
        return false;
    }
    Pow::pow(k, den as u32) == Pow::pow(n, num as u32)
}

/// `n^γ` within `2^-P`, for `n >= 1`, `γ ∈ (0, 2)` and `P >= 64`.
pub fn pow_real(n: u64, gamma: &Rational, frac_bits: u32) -> Result<PowValue, NumericsError> {
    pow_real_big(&BigInt::from(n), gamma, frac_bits)
}

pub fn pow_real_big(n: &BigInt, gamma: &Rational, frac_bits: u32) -> Result<PowValue, NumericsError> {
    if frac_bits < MIN_FRAC_BITS {
        return Err(NumericsError::PrecisionTooLow(frac_bits));
    }
    if !n.is_positive() {
        return Err(NumericsError::NonPositiveBase);
    }
    check_gamma(gamma)?;
    let (num, den) = (BigInt::from(*gamma.numer()), BigInt::from(*gamma.denom()));
    // n^γ < n^2, so relative accuracy of 2·bits(n) + 64 bits beyond P suffices.
    let w = frac_bits + 2 * n.bits() as u32 + 64;
    let y = round_div(&(ln_int(n, w) * &num), &den);
    let mantissa = round_shift(&exp_nonneg(&y, w), w - frac_bits);
    let mut value = FixedReal::raw(mantissa, frac_bits);

    let near_integer = value.dist_nearest().mantissa() <= &(BigInt::one() << FLOOR_GUARD_BITS);
    let mut exact = false;
    if near_integer {
        let k = round_shift(value.mantissa(), frac_bits);
        if is_exact_power(n, &k, gamma) {
            value = FixedReal::from_int(k, frac_bits);
            exact = true;
        }
    }
    Ok(PowValue {
        value,
        near_integer,
        exact,
    })
}

/// `n^γ` at the smallest precision in `P, 2P, 4P, 8P` that either clears the
/// integrality guard or certifies an exact integer.
pub fn pow_guarded(n: u64, gamma: &Rational, frac_bits: u32) -> Result<PowValue, NumericsError> {
    let mut bits = frac_bits.max(MIN_FRAC_BITS);
    loop {
        let v = pow_real(n, gamma, bits)?;
        if !v.near_integer || v.exact {
            return Ok(v);
        }
        if bits >= frac_bits.max(MIN_FRAC_BITS) * MAX_ESCALATION {
            return Err(NumericsError::AmbiguousFloor { n, gamma: *gamma });
        }
        bits *= 2;
    }
}

/// `⌊n^γ⌋`, escalating precision when the value sits close to an integer.
pub fn floor_pow(n: u64, gamma: &Rational, frac_bits: u32) -> Result<BigInt, NumericsError> {
    Ok(pow_guarded(n, gamma, frac_bits)?.value.floor())
}
