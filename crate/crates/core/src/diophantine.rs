//! Rational approximation of `α` and of its multiples `αh`.
//!
//! Every supported `α` has an exactly computable continued fraction: square
//! roots `√D` through the periodic surd recurrence (and `h√D = √(h²D)`),
//! rationals and decimal literals through Euclid's algorithm. Floating point
//! never decides a partial quotient; it only re-checks the approximation
//! inequalities afterwards.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::numerics::{parse_decimal, FixedReal, NumericsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiophantineError {
    #[error("malformed alpha `{0}` (expected sqrt:D, dec:<digits> or rat:<a>/<b>)")]
    BadAlpha(String),
    #[error("sqrt:{0} is not irrational (D must be >= 2 and not a perfect square)")]
    NotIrrational(u64),
    #[error("decimal literal has {have} digits but {need} are required at {bits} bits")]
    InsufficientDigits { have: usize, need: usize, bits: u32 },
    #[error("alpha is rational: its continued fraction ended after {} convergents", .convergents.len())]
    RationalAlpha { convergents: Vec<Convergent> },
    #[error("could not certify an approximation inequality for {a}/{q} at the maximum precision")]
    PrecisionExhausted { a: BigInt, q: BigInt },
    #[error("approximation inequality fails for {a}/{q}")]
    InequalityFails { a: BigInt, q: BigInt },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// The irrational `α` (or a test rational) an experiment runs against.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AlphaSpec {
    /// `√D`.
    Surd(u64),
    /// A decimal literal, treated as the exact rational it denotes.
    Decimal(String),
    /// `num/den` with `den > 0`.
    Rational { num: BigInt, den: BigInt },
}

impl FromStr for AlphaSpec {
    type Err = DiophantineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DiophantineError::BadAlpha(s.to_string());
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        if let Some(d) = s.strip_prefix("sqrt:") {
            if !digits(d) {
                return Err(bad());
            }
            let d: u64 = d.parse().map_err(|_| bad())?;
            let r = d.sqrt();
            if d < 2 || r * r == d {
                return Err(DiophantineError::NotIrrational(d));
            }
            Ok(AlphaSpec::Surd(d))
        } else if let Some(lit) = s.strip_prefix("dec:") {
            parse_decimal(lit).map_err(|_| bad())?;
            if lit.starts_with('+') {
                return Err(bad());
            }
            Ok(AlphaSpec::Decimal(lit.to_string()))
        } else if let Some(r) = s.strip_prefix("rat:") {
            let (a, b) = r.split_once('/').ok_or_else(bad)?;
            let a_digits = a.strip_prefix('-').unwrap_or(a);
            if !digits(a_digits) || !digits(b) {
                return Err(bad());
            }
            let num: BigInt = a.parse().map_err(|_| bad())?;
            let den: BigInt = b.parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(AlphaSpec::Rational { num, den })
        } else {
            Err(bad())
        }
    }
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSpec::Surd(d) => write!(f, "sqrt:{d}"),
            AlphaSpec::Decimal(lit) => write!(f, "dec:{lit}"),
            AlphaSpec::Rational { num, den } => write!(f, "rat:{num}/{den}"),
        }
    }
}

impl AlphaSpec {
    pub fn rational(num: i64, den: i64) -> Self {
        AlphaSpec::Rational {
            num: num.into(),
            den: den.into(),
        }
    }

    /// `α` to within `2^-P` (square roots are truncated, rationals rounded).
    pub fn evaluate(&self, frac_bits: u32) -> Result<FixedReal, DiophantineError> {
        let bits = frac_bits.max(crate::numerics::MIN_FRAC_BITS);
        match self {
            AlphaSpec::Surd(d) => {
                let root = (BigInt::from(*d) << (2 * bits)).sqrt();
                Ok(FixedReal::from_mantissa(root, bits)?)
            }
            AlphaSpec::Decimal(lit) => {
                let have = lit.bytes().filter(u8::is_ascii_digit).count();
                let need = (bits as usize).div_ceil(3);
                if have < need {
                    return Err(DiophantineError::InsufficientDigits { have, need, bits });
                }
                let (num, den) = parse_decimal(lit)?;
                Ok(FixedReal::from_ratio(&num, &den, bits))
            }
            AlphaSpec::Rational { num, den } => Ok(FixedReal::from_ratio(num, den, bits)),
        }
    }

    /// Exact rational value, if `α` is rational.
    pub fn as_ratio(&self) -> Option<(BigInt, BigInt)> {
        match self {
            AlphaSpec::Surd(_) => None,
            AlphaSpec::Decimal(lit) => parse_decimal(lit).ok(),
            AlphaSpec::Rational { num, den } => Some(if den.is_negative() {
                (-num, -den)
            } else {
                (num.clone(), den.clone())
            }),
        }
    }

    /// The continued fraction of `h·α`.
    pub fn continued_fraction(&self, h: u64) -> ContinuedFraction {
        match self {
            AlphaSpec::Surd(d) => ContinuedFraction::surd(BigInt::from(h) * BigInt::from(h) * BigInt::from(*d)),
            _ => {
                let (num, den) = self.as_ratio().expect("rational kinds");
                ContinuedFraction::ratio(num * BigInt::from(h), den)
            }
        }
    }
}

/// Partial quotients of a quadratic surd or a rational, generated exactly.
#[derive(Clone, Debug)]
pub enum ContinuedFraction {
    /// `(m + √D) / q`, with `q | D - m²`.
    Surd { d: BigInt, root: BigInt, m: BigInt, q: BigInt },
    Ratio { num: BigInt, den: BigInt },
    Done,
}

impl ContinuedFraction {
    fn surd(d: BigInt) -> Self {
        let root = d.sqrt();
        ContinuedFraction::Surd {
            d,
            root,
            m: BigInt::zero(),
            q: BigInt::one(),
        }
    }

    fn ratio(num: BigInt, den: BigInt) -> Self {
        ContinuedFraction::Ratio { num, den }
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self, ContinuedFraction::Done)
    }
}

impl Iterator for ContinuedFraction {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        match self {
            ContinuedFraction::Surd { d, root, m, q } => {
                let a = (&*m + &*root).div_floor(q);
                let m_next = &a * &*q - &*m;
                let q_next = (&*d - &m_next * &m_next) / &*q;
                *m = m_next;
                *q = q_next;
                Some(a)
            }
            ContinuedFraction::Ratio { num, den } => {
                let (a, r) = num.div_mod_floor(den);
                if r.is_zero() {
                    *self = ContinuedFraction::Done;
                } else {
                    let next_den = r;
                    *num = std::mem::replace(den, next_den);
                }
                Some(a)
            }
            ContinuedFraction::Done => None,
        }
    }
}

/// A continued-fraction convergent `a/q` of `α`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Convergent {
    pub a: BigInt,
    pub q: BigInt,
}

impl Convergent {
    /// Convergents with `a = 0` are listed but cannot seed an experiment.
    pub fn is_admissible(&self) -> bool {
        !self.a.is_zero()
    }

    pub fn q_u64(&self) -> Option<u64> {
        self.q.to_u64()
    }
}

impl fmt::Display for Convergent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.a, self.q)
    }
}

/// Running numerator/denominator recurrence over a [`ContinuedFraction`].
struct Convergents {
    cf: ContinuedFraction,
    prev: (BigInt, BigInt),
    cur: (BigInt, BigInt),
}

impl Convergents {
    fn new(cf: ContinuedFraction) -> Self {
        Self {
            cf,
            prev: (BigInt::zero(), BigInt::one()),
            cur: (BigInt::one(), BigInt::zero()),
        }
    }
}

impl Iterator for Convergents {
    type Item = (BigInt, BigInt);

    fn next(&mut self) -> Option<Self::Item> {
        let a = self.cf.next()?;
        let next = (&a * &self.cur.0 + &self.prev.0, &a * &self.cur.1 + &self.prev.1);
        self.prev = std::mem::replace(&mut self.cur, next);
        Some(self.cur.clone())
    }
}

/// Outcome of comparing `|h·α - a/q|` against `1/bound_den`.
fn compare_error(
    alpha: &AlphaSpec,
    h: u64,
    a: &BigInt,
    q: &BigInt,
    bound_den: &BigInt,
    strict: bool,
    start_bits: u32,
) -> Result<bool, DiophantineError> {
    let mut bits = start_bits.max(64);
    for _ in 0..4 {
        let ha = alpha.evaluate(bits)?.mul_int(h);
        let diff = (&ha - &FixedReal::from_ratio(a, q, bits)).abs();
        let bound = FixedReal::from_ratio(&BigInt::one(), bound_den, bits);
        // α carries at most h ulps of error, each rounding one more ulp.
        let margin = FixedReal::from_mantissa(BigInt::from(h) + 3, bits)?;
        let hi = &diff + &margin;
        let lo = &diff - &margin;
        let certainly_ok = if strict { hi < bound } else { hi <= bound };
        let certainly_bad = if strict { lo >= bound } else { lo > bound };
        if certainly_ok {
            return Ok(true);
        }
        if certainly_bad {
            return Ok(false);
        }
        bits *= 2;
    }
    Err(DiophantineError::PrecisionExhausted {
        a: a.clone(),
        q: q.clone(),
    })
}

fn bits_for(q: &BigInt, bound_den: &BigInt, h: u64) -> u32 {
    (q.bits() + bound_den.bits() + 64 + 64 - (h.max(1)).leading_zeros() as u64) as u32
}

/// Check `|α - a/q| < 1/q²` numerically.
pub fn certify_convergent(alpha: &AlphaSpec, conv: &Convergent) -> Result<(), DiophantineError> {
    let q2 = &conv.q * &conv.q;
    let bits = bits_for(&conv.q, &q2, 1);
    if compare_error(alpha, 1, &conv.a, &conv.q, &q2, true, bits)? && conv.a.gcd(&conv.q).is_one() {
        Ok(())
    } else {
        Err(DiophantineError::InequalityFails {
            a: conv.a.clone(),
            q: conv.q.clone(),
        })
    }
}

/// The first `count` continued-fraction convergents of `α`, in increasing `q`.
///
/// A rational `α` whose expansion ends within the first `count` terms is an
/// error carrying the convergents that were produced.
pub fn convergents(alpha: &AlphaSpec, count: usize) -> Result<Vec<Convergent>, DiophantineError> {
    let mut it = Convergents::new(alpha.continued_fraction(1));
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let Some((a, q)) = it.next() else { break };
        out.push(Convergent { a, q });
        if it.cf.is_exhausted() {
            return Err(DiophantineError::RationalAlpha { convergents: out });
        }
    }
    for c in &out {
        certify_convergent(alpha, c)?;
    }
    Ok(out)
}

/// A fraction `a_h/q_h` with `|αh - a_h/q_h| ≤ 1/(q_h q²)` and `q_h ≤ q²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletApproximant {
    pub h: u64,
    pub a_h: BigInt,
    pub q_h: BigInt,
}

impl DirichletApproximant {
    /// Re-check the defining inequality against `q` at `bits` of precision.
    pub fn verify(&self, alpha: &AlphaSpec, q: &BigInt, bits: u32) -> Result<bool, DiophantineError> {
        let bound_den = &self.q_h * q * q;
        let ok = compare_error(alpha, self.h, &self.a_h, &self.q_h, &bound_den, false, bits)?;
        Ok(ok && self.a_h.gcd(&self.q_h).is_one() && self.q_h >= BigInt::one() && self.q_h <= q * q)
    }

    pub fn q_h_f64(&self) -> f64 {
        self.q_h.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// The convergent of `αh` with the largest denominator not exceeding `q²`.
pub fn dirichlet_approx(alpha: &AlphaSpec, h: u64, q: &BigInt) -> Result<DirichletApproximant, DiophantineError> {
    let limit = q * q;
    let mut best: Option<(BigInt, BigInt)> = None;
    for (a, qk) in Convergents::new(alpha.continued_fraction(h)) {
        if qk > limit {
            break;
        }
        best = Some((a, qk));
    }
    let (a_h, q_h) = best.expect("the first convergent has denominator 1");
    let approx = DirichletApproximant { h, a_h, q_h };
    let bits = bits_for(&approx.q_h, &(&approx.q_h * &limit), h);
    if approx.verify(alpha, q, bits)? {
        Ok(approx)
    } else {
        Err(DiophantineError::InequalityFails {
            a: approx.a_h,
            q: approx.q_h,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QhRow {
    pub h: u64,
    pub a_h: BigInt,
    pub q_h: BigInt,
    /// `q^{1/3} < q_h ≤ q²`.
    pub in_range: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QhAudit {
    pub q: BigInt,
    pub rows: Vec<QhRow>,
    pub violations: usize,
}

/// Dirichlet denominators `q_h` for `h = 1..=H`, each tested for membership
/// in `(q^{1/3}, q²]`. Violations are counted, not raised.
pub fn qh_range_audit(alpha: &AlphaSpec, conv: &Convergent, big_h: u64) -> Result<QhAudit, DiophantineError> {
    let q = &conv.q;
    let rows: Vec<QhRow> = (1..=big_h)
        .into_par_iter()
        .map(|h| {
            let d = dirichlet_approx(alpha, h, q)?;
            let cube = &d.q_h * &d.q_h * &d.q_h;
            let in_range = &cube > q && &d.q_h <= &(q * q);
            Ok(QhRow {
                h,
                a_h: d.a_h,
                q_h: d.q_h,
                in_range,
            })
        })
        .collect::<Result<_, DiophantineError>>()?;
    let violations = rows.iter().filter(|r| !r.in_range).count();
    Ok(QhAudit {
        q: q.clone(),
        rows,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(cs: &[Convergent]) -> Vec<(i64, i64)> {
        cs.iter()
            .map(|c| (c.a.to_i64().unwrap(), c.q.to_i64().unwrap()))
            .collect()
    }

    #[test]
    fn sqrt2_convergents() {
        let cs = convergents(&AlphaSpec::Surd(2), 5).unwrap();
        assert_eq!(pairs(&cs), vec![(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)]);
    }

    #[test]
    fn sqrt5_convergents() {
        let cs = convergents(&AlphaSpec::Surd(5), 4).unwrap();
        assert_eq!(pairs(&cs), vec![(2, 1), (9, 4), (38, 17), (161, 72)]);
    }

    #[test]
    fn rational_alpha_exhausts() {
        match convergents(&AlphaSpec::rational(3, 7), 3) {
            Err(DiophantineError::RationalAlpha { convergents }) => {
                assert_eq!(pairs(&convergents), vec![(0, 1), (1, 2), (3, 7)]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(pairs(&convergents(&AlphaSpec::rational(3, 7), 2).unwrap()), vec![(0, 1), (1, 2)]);
        assert!(!convergents(&AlphaSpec::rational(3, 7), 2).unwrap()[0].is_admissible());
    }

    #[test]
    fn dirichlet_examples() {
        let d = dirichlet_approx(&AlphaSpec::Surd(2), 1, &BigInt::from(5)).unwrap();
        assert_eq!((d.a_h, d.q_h), (BigInt::from(17), BigInt::from(12)));
        let d = dirichlet_approx(&AlphaSpec::Surd(2), 1, &BigInt::from(1)).unwrap();
        assert_eq!((d.a_h, d.q_h), (BigInt::from(1), BigInt::from(1)));
    }

    #[test]
    fn parse_grammar() {
        assert_eq!("sqrt:2".parse::<AlphaSpec>().unwrap(), AlphaSpec::Surd(2));
        assert_eq!("rat:-3/7".parse::<AlphaSpec>().unwrap(), AlphaSpec::rational(-3, 7));
        assert!(matches!("dec:1.25".parse::<AlphaSpec>().unwrap(), AlphaSpec::Decimal(_)));
        for bad in ["sqrt:4", "sqrt:1", "sqrt:-2", "sqrt:2 ", "rat:1/0", "rat:1/-2", "dec:1e3", "dec:+1", "pi", "SQRT:2"] {
            assert!(bad.parse::<AlphaSpec>().is_err(), "{bad}");
        }
        for s in ["sqrt:3", "rat:5/9", "dec:-0.5"] {
            assert_eq!(s.parse::<AlphaSpec>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn short_decimal_needs_more_digits() {
        let a: AlphaSpec = "dec:1.41".parse().unwrap();
        assert!(matches!(a.evaluate(64), Err(DiophantineError::InsufficientDigits { .. })));
        let long = format!("dec:0.{}", "3".repeat(30));
        assert!(long.parse::<AlphaSpec>().unwrap().evaluate(64).is_ok());
    }

    #[test]
    fn audit_with_no_rows() {
        let conv = Convergent {
            a: 41.into(),
            q: 29.into(),
        };
        let audit = qh_range_audit(&AlphaSpec::Surd(2), &conv, 0).unwrap();
        assert!(audit.rows.is_empty());
        assert_eq!(audit.violations, 0);
    }
}
