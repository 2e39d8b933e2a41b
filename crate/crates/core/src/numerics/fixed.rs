//! Binary fixed-point reals with an unbounded mantissa.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::NumericsError;

/// Smallest number of fractional bits a [`FixedReal`] may carry.
pub const MIN_FRAC_BITS: u32 = 64;

/// The real number `mantissa * 2^(-frac_bits)`.
///
/// Values of different precision may be mixed: addition and subtraction
/// align to the larger precision, which is exact. Multiplication rounds the
/// exact product to nearest at the larger precision, ties to even.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FixedReal {
    mantissa: BigInt,
    frac_bits: u32,
}

/// Shift `x` right by `shift` bits, rounding to nearest with ties to even.
pub(crate) fn round_shift(x: &BigInt, shift: u32) -> BigInt {
    if shift == 0 {
        return x.clone();
    }
    let unit = BigInt::one() << shift;
    let (q, r) = x.div_mod_floor(&unit);
    let half = BigInt::one() << (shift - 1);
    match r.cmp(&half) {
        Ordering::Greater => q + 1,
        Ordering::Equal if q.is_odd() => q + 1,
        _ => q,
    }
}

/// Round `num / den` to the nearest integer, ties to even. `den` must be positive.
pub(crate) fn round_div(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_mod_floor(den);
    let twice = &r << 1u32;
    match twice.cmp(den) {
        Ordering::Greater => q + 1,
        Ordering::Equal if q.is_odd() => q + 1,
        _ => q,
    }
}

impl FixedReal {
    pub fn from_mantissa(mantissa: BigInt, frac_bits: u32) -> Result<Self, NumericsError> {
        if frac_bits < MIN_FRAC_BITS {
            return Err(NumericsError::PrecisionTooLow(frac_bits));
        }
        Ok(Self { mantissa, frac_bits })
    }

    pub(crate) fn raw(mantissa: BigInt, frac_bits: u32) -> Self {
        debug_assert!(frac_bits >= MIN_FRAC_BITS);
        Self { mantissa, frac_bits }
    }

    pub fn zero(frac_bits: u32) -> Self {
        Self::raw(BigInt::zero(), frac_bits.max(MIN_FRAC_BITS))
    }

    pub fn from_int(value: impl Into<BigInt>, frac_bits: u32) -> Self {
        let bits = frac_bits.max(MIN_FRAC_BITS);
        Self::raw(value.into() << bits, bits)
    }

    /// `num / den` rounded to nearest (ties to even) at `frac_bits`.
    pub fn from_ratio(num: &BigInt, den: &BigInt, frac_bits: u32) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let bits = frac_bits.max(MIN_FRAC_BITS);
        let (num, den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num.clone(), den.clone())
        };
        Self::raw(round_div(&(num << bits), &den), bits)
    }

    /// Exact conversion when `frac_bits` covers the binary expansion of `x`,
    /// otherwise rounded to nearest.
    pub fn from_f64(x: f64, frac_bits: u32) -> Self {
        assert!(x.is_finite(), "non-finite input");
        let bits = frac_bits.max(MIN_FRAC_BITS);
        if x == 0.0 {
            return Self::zero(bits);
        }
        let raw = x.abs().to_bits();
        let exp = ((raw >> 52) & 0x7ff) as i64;
        let (sig, e) = if exp == 0 {
            (raw & ((1 << 52) - 1), -1074)
        } else {
            ((raw & ((1 << 52) - 1)) | (1 << 52), exp - 1075)
        };
        let mut m = BigInt::from(sig);
        let total = e + bits as i64;
        m = if total >= 0 {
            m << (total as u32)
        } else {
            round_shift(&m, (-total) as u32)
        };
        if x < 0.0 {
            m = -m;
        }
        Self::raw(m, bits)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    /// Re-express at another precision; exact when widening.
    pub fn with_frac_bits(&self, frac_bits: u32) -> Self {
        let bits = frac_bits.max(MIN_FRAC_BITS);
        match bits.cmp(&self.frac_bits) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => Self::raw(&self.mantissa << (bits - self.frac_bits), bits),
            Ordering::Less => Self::raw(round_shift(&self.mantissa, self.frac_bits - bits), bits),
        }
    }

    fn unit(&self) -> BigInt {
        BigInt::one() << self.frac_bits
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        self.mantissa.div_floor(&self.unit())
    }

    /// Smallest integer not below the value.
    pub fn ceil(&self) -> BigInt {
        -((-&self.mantissa).div_floor(&self.unit()))
    }

    /// Fractional part `x - floor(x)`, in `[0, 1)`.
    pub fn frac(&self) -> Self {
        Self::raw(self.mantissa.mod_floor(&self.unit()), self.frac_bits)
    }

    /// Distance to the nearest integer, in `[0, 1/2]`.
    pub fn dist_nearest(&self) -> Self {
        let unit = self.unit();
        let r = self.mantissa.mod_floor(&unit);
        let other = &unit - &r;
        Self::raw(r.min(other), self.frac_bits)
    }

    /// The sawtooth `{x} - 1/2`, in `[-1/2, 1/2)`.
    pub fn psi(&self) -> Self {
        let unit = self.unit();
        let r = self.mantissa.mod_floor(&unit);
        Self::raw(r - (unit >> 1u32), self.frac_bits)
    }

    /// Fractional part re-centred into `[-1/2, 1/2)`.
    pub fn centred_frac(&self) -> Self {
        let unit = self.unit();
        let half = &unit >> 1u32;
        let r = (&self.mantissa + &half).mod_floor(&unit) - half;
        Self::raw(r, self.frac_bits)
    }

    pub fn is_integer(&self) -> bool {
        self.mantissa.mod_floor(&self.unit()).is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.sign() == Sign::Minus
    }

    pub fn abs(&self) -> Self {
        Self::raw(self.mantissa.abs(), self.frac_bits)
    }

    /// Multiply by an integer; exact.
    pub fn mul_int(&self, k: impl Into<BigInt>) -> Self {
        Self::raw(&self.mantissa * k.into(), self.frac_bits)
    }

    /// Divide by a positive integer, rounding to nearest.
    pub fn div_int(&self, k: impl Into<BigInt>) -> Self {
        Self::raw(round_div(&self.mantissa, &k.into()), self.frac_bits)
    }

    /// Nearest binary64 value (up to one rounding of the top 64 bits).
    pub fn to_f64(&self) -> f64 {
        let bits = self.mantissa.bits();
        if bits <= 64 {
            let m = self.mantissa.to_i128().expect("fits in 64 bits") as f64;
            return m * 2f64.powi(-(self.frac_bits as i32));
        }
        let shift = (bits - 64) as u32;
        let top = round_shift(&self.mantissa, shift).to_i128().expect("fits") as f64;
        top * 2f64.powi(shift as i32 - self.frac_bits as i32)
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, u32) {
        let bits = self.frac_bits.max(other.frac_bits);
        let a = &self.mantissa << (bits - self.frac_bits);
        let b = &other.mantissa << (bits - other.frac_bits);
        (a, b, bits)
    }
}

impl fmt::Debug for FixedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FixedReal({} @ {} bits)", self.to_f64(), self.frac_bits)
    }
}

impl fmt::Display for FixedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl PartialOrd for FixedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FixedReal {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl Add for &FixedReal {
    type Output = FixedReal;
    fn add(self, rhs: &FixedReal) -> FixedReal {
        let (a, b, bits) = self.aligned(rhs);
        FixedReal::raw(a + b, bits)
    }
}

impl Sub for &FixedReal {
    type Output = FixedReal;
    fn sub(self, rhs: &FixedReal) -> FixedReal {
        let (a, b, bits) = self.aligned(rhs);
        FixedReal::raw(a - b, bits)
    }
}

impl Mul for &FixedReal {
    type Output = FixedReal;
    fn mul(self, rhs: &FixedReal) -> FixedReal {
        let bits = self.frac_bits.max(rhs.frac_bits);
        let product = &self.mantissa * &rhs.mantissa;
        let shift = self.frac_bits + rhs.frac_bits - bits;
        FixedReal::raw(round_shift(&product, shift), bits)
    }
}

impl Neg for &FixedReal {
    type Output = FixedReal;
    fn neg(self) -> FixedReal {
        FixedReal::raw(-&self.mantissa, self.frac_bits)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr for FixedReal {
            type Output = FixedReal;
            fn $method(self, rhs: FixedReal) -> FixedReal {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for FixedReal {
    type Output = FixedReal;
    fn neg(self) -> FixedReal {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fx(x: f64) -> FixedReal {
        FixedReal::from_f64(x, 128)
    }

    #[test]
    fn frac_examples() {
        assert_eq!(fx(2.25).frac(), fx(0.25));
        assert_eq!(fx(-0.25).frac(), fx(0.75));
        assert_eq!(fx(3.0).frac(), fx(0.0));
    }

    #[test]
    fn dist_nearest_examples() {
        let three_tenths = FixedReal::from_ratio(&3.into(), &10.into(), 128);
        assert_eq!(three_tenths.dist_nearest(), three_tenths);
        let minus_fifth = FixedReal::from_ratio(&(-1).into(), &5.into(), 128);
        assert_eq!(
            minus_fifth.dist_nearest(),
            FixedReal::from_ratio(&1.into(), &5.into(), 128)
        );
        assert_eq!(fx(7.5).dist_nearest(), fx(0.5));
    }

    #[test]
    fn psi_examples() {
        assert_eq!(fx(0.0).psi(), fx(-0.5));
        assert_eq!(fx(0.75).psi(), fx(0.25));
        assert_eq!(fx(-0.25).psi(), fx(0.25));
    }

    #[test]
    fn multiplication_rounds_half_even() {
        // 2^-64 * 2^-1 at 64 bits is exactly half an ulp: ties go to the even mantissa 0.
        let tiny = FixedReal::from_mantissa(BigInt::from(1), 64).unwrap();
        let half = fx(0.5).with_frac_bits(64);
        assert!((&tiny * &half).is_zero());
        // 3 ulp * 1/2 = 1.5 ulp rounds to 2 ulp.
        let three = FixedReal::from_mantissa(BigInt::from(3), 64).unwrap();
        assert_eq!((&three * &half).mantissa(), &BigInt::from(2));
    }

    #[test]
    fn low_precision_is_rejected() {
        assert!(matches!(
            FixedReal::from_mantissa(BigInt::from(1), 32),
            Err(NumericsError::PrecisionTooLow(32))
        ));
    }

    #[test]
    fn floor_and_ceil_on_negatives() {
        assert_eq!(fx(-1.5).floor(), BigInt::from(-2));
        assert_eq!(fx(-1.5).ceil(), BigInt::from(-1));
        assert_eq!(fx(4.0).ceil(), BigInt::from(4));
    }

    #[test]
    fn f64_round_trip() {
        for x in [1.0, -3.75, 1e-10, 123456.789, -0.1] {
            assert_eq!(fx(x).to_f64(), x);
        }
    }
}
