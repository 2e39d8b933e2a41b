//! Fixed-point reals and the elementary functions built on them:
//! `{x}`, `‖x‖`, the sawtooth `ψ`, `e(x) = exp(2πix)` and real powers `n^γ`.

mod fixed;
mod pow;
mod sum;
mod unit;

pub use fixed::{FixedReal, MIN_FRAC_BITS};
pub use pow::{floor_pow, pow_guarded, pow_real, pow_real_big, PowValue, FLOOR_GUARD_BITS, MAX_ESCALATION};
pub use sum::{ordered_sum, ordered_sum_real, ComplexSum, NeumaierSum, REDUCTION_CHUNK};
pub use unit::{e_of, e_turns, UnitComplex};

use num_bigint::BigInt;
use thiserror::Error;

/// Exact rational exponents such as `γ = 19/20`.
pub type Rational = num_rational::Ratio<i128>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericsError {
    #[error("fixed-point precision {0} is below the 64-bit minimum")]
    PrecisionTooLow(u32),
    #[error("power base must be a positive integer")]
    NonPositiveBase,
    #[error("exponent {0} outside (0, 2)")]
    ExponentOutOfRange(Rational),
    #[error("cannot resolve floor of {n}^({gamma}): value within guard distance of an integer at maximum precision")]
    AmbiguousFloor { n: u64, gamma: Rational },
    #[error("malformed number `{0}`")]
    Malformed(String),
}

/// `{x}`.
pub fn frac(x: &FixedReal) -> FixedReal {
    x.frac()
}

/// `‖x‖`.
pub fn dist_nearest(x: &FixedReal) -> FixedReal {
    x.dist_nearest()
}

/// `ψ(t) = {t} - 1/2`.
pub fn psi(t: &FixedReal) -> FixedReal {
    t.psi()
}

/// Parse an exact rational written `a/b` or as a plain integer.
pub fn parse_rational(text: &str) -> Result<Rational, NumericsError> {
    let bad = || NumericsError::Malformed(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((a, b)) => (a, b),
        None => (text, "1"),
    };
    let is_int = |s: &str| {
        let digits = s.strip_prefix('-').unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !is_int(num) || !is_int(den) || den.starts_with('-') {
        return Err(bad());
    }
    let num: i128 = num.parse().map_err(|_| bad())?;
    let den: i128 = den.parse().map_err(|_| bad())?;
    if den == 0 {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Parse a plain decimal literal (`-0.125`, `3`, `.5`) into its exact
/// value `digits / 10^scale`.
pub fn parse_decimal(text: &str) -> Result<(BigInt, BigInt), NumericsError> {
    let bad = || NumericsError::Malformed(text.to_string());
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    Ok((num, den))
}

/// A decimal string as a fixed-point value rounded to `frac_bits`.
pub fn decimal_to_fixed(text: &str, frac_bits: u32) -> Result<FixedReal, NumericsError> {
    let (num, den) = parse_decimal(text)?;
    Ok(FixedReal::from_ratio(&num, &den, frac_bits))
}
