//! Segmented sieving with the arithmetic functions `Λ`, `μ`, `τ`, and
//! Piatetski-Shapiro membership.
//!
//! A prime `p` is a Piatetski-Shapiro prime of type `γ` when an integer lies
//! in `[p^γ, (p+1)^γ)`. That integer is the witness `n` with `p = ⌊n^{1/γ}⌋`,
//! and the indicator `⌊-p^γ⌋ - ⌊-(p+1)^γ⌋` is 1 exactly when it exists.

use num_integer::Roots;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::numerics::{pow_guarded, NumericsError, Rational};

/// Largest interval length a single [`SieveSegment`] may cover by default.
pub const DEFAULT_SEGMENT_LEN: u64 = 1 << 22;

/// Fixed-point precision used when a power must be resolved exactly.
pub const PS_FRAC_BITS: u32 = 128;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrimesError {
    #[error("segment ({lo}, {hi}] has length {len}, above the limit {max}")]
    SegmentTooLarge { lo: u64, hi: u64, len: u64, max: u64 },
    #[error("invalid interval ({lo}, {hi}]")]
    BadInterval { lo: u64, hi: u64 },
    #[error("gamma {0} outside (0, 1]")]
    GammaOutOfRange(Rational),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Primes and `Λ`, `μ`, `τ` on the interval `(lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SieveSegment {
    lo: u64,
    hi: u64,
    prime: Vec<bool>,
    lambda: Vec<f64>,
    mu: Vec<i8>,
    tau: Vec<u32>,
}

impl SieveSegment {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    fn index(&self, n: u64) -> usize {
        assert!(n > self.lo && n <= self.hi, "{n} outside ({}, {}]", self.lo, self.hi);
        (n - self.lo - 1) as usize
    }

    pub fn is_prime(&self, n: u64) -> bool {
        self.prime[self.index(n)]
    }

    /// von Mangoldt `Λ(n)`.
    pub fn lambda(&self, n: u64) -> f64 {
        self.lambda[self.index(n)]
    }

    /// Möbius `μ(n)`.
    pub fn mu(&self, n: u64) -> i8 {
        self.mu[self.index(n)]
    }

    /// Divisor count `τ(n)`.
    pub fn tau(&self, n: u64) -> u32 {
        self.tau[self.index(n)]
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.prime
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(move |(i, _)| self.lo + 1 + i as u64)
    }

    pub fn lambda_values(&self) -> &[f64] {
        &self.lambda
    }

    pub fn mu_values(&self) -> &[i8] {
        &self.mu
    }

    pub fn tau_values(&self) -> &[u32] {
        &self.tau
    }
}

/// Primes up to `limit` by a plain sieve of Eratosthenes.
pub fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Sieve `(lo, hi]` with the default segment length limit.
pub fn sieve(lo: u64, hi: u64) -> Result<SieveSegment, PrimesError> {
    sieve_with_limit(lo, hi, DEFAULT_SEGMENT_LEN)
}

pub fn sieve_with_limit(lo: u64, hi: u64, max_len: u64) -> Result<SieveSegment, PrimesError> {
    if hi <= lo {
        return Err(PrimesError::BadInterval { lo, hi });
    }
    let len = hi - lo;
    if len > max_len {
        return Err(PrimesError::SegmentTooLarge { lo, hi, len, max: max_len });
    }
    Ok(sieve_segment(lo, hi, &small_primes(hi.sqrt())))
}

/// Factor every integer of `(lo, hi]` by the base primes `≤ √hi`.
fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> SieveSegment {
    let len = (hi - lo) as usize;
    let mut rem: Vec<u64> = (lo + 1..=hi).collect();
    let mut mu = vec![1i8; len];
    let mut tau = vec![1u32; len];
    let mut distinct = vec![0u8; len];
    let mut last = vec![0u64; len];
    for &p in base {
        if p * p > hi {
            break;
        }
        let mut m = (lo / p + 1) * p;
        while m <= hi {
            let i = (m - lo - 1) as usize;
            let mut e = 0u32;
            while rem[i] % p == 0 {
                rem[i] /= p;
                e += 1;
            }
            tau[i] *= e + 1;
            mu[i] = if e > 1 { 0 } else { -mu[i] };
            distinct[i] += 1;
            last[i] = p;
            m += p;
        }
    }
    let mut prime = vec![false; len];
    let mut lambda = vec![0.0; len];
    for i in 0..len {
        if rem[i] > 1 {
            tau[i] *= 2;
            mu[i] = -mu[i];
            distinct[i] += 1;
            last[i] = rem[i];
        }
        if distinct[i] == 1 {
            lambda[i] = (last[i] as f64).ln();
            prime[i] = tau[i] == 2;
        }
    }
    SieveSegment {
        lo,
        hi,
        prime,
        lambda,
        mu,
        tau,
    }
}

/// `(0, limit]` in one piece from a smallest-prime-factor table, with no
/// segment length limit. An independent route to the same tables.
pub fn sieve_monolithic(limit: u64) -> SieveSegment {
    let n = limit as usize;
    let mut spf = vec![0u64; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u64;
                }
                j += i;
            }
        }
    }
    let mut prime = vec![false; n];
    let mut lambda = vec![0.0; n];
    let mut mu = vec![0i8; n];
    let mut tau = vec![0u32; n];
    for k in 1..=n {
        let (mut m, mut t, mut u, mut primes_seen, mut first) = (k as u64, 1u32, 1i8, 0, 0u64);
        while m > 1 {
            let p = spf[m as usize];
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            t *= e + 1;
            u = if e > 1 { 0 } else { -u };
            primes_seen += 1;
            first = p;
        }
        prime[k - 1] = primes_seen == 1 && t == 2;
        lambda[k - 1] = if primes_seen == 1 { (first as f64).ln() } else { 0.0 };
        mu[k - 1] = u;
        tau[k - 1] = t;
    }
    SieveSegment {
        lo: 0,
        hi: limit,
        prime,
        lambda,
        mu,
        tau,
    }
}

/// Cover `(lo, hi]` with segments of `seg_len`, sieved in parallel and
/// returned in ascending order.
pub fn segments(lo: u64, hi: u64, seg_len: u64) -> Vec<SieveSegment> {
    if hi <= lo {
        return Vec::new();
    }
    let base = small_primes(hi.sqrt());
    let bounds: Vec<(u64, u64)> = (0..)
        .map(|k| lo + k * seg_len)
        .take_while(|&a| a < hi)
        .map(|a| (a, (a + seg_len).min(hi)))
        .collect();
    bounds
        .into_par_iter()
        .map(|(a, b)| sieve_segment(a, b, &base))
        .collect()
}

/// All primes `≤ x`, in ascending order.
pub fn primes_up_to(x: u64) -> Vec<u64> {
    segments(0, x, DEFAULT_SEGMENT_LEN)
        .iter()
        .flat_map(|s| s.primes().collect::<Vec<_>>())
        .collect()
}

/// A Piatetski-Shapiro witness: `p^γ ≤ n < (p+1)^γ`, so `p = ⌊n^{1/γ}⌋`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PsWitness {
    pub p: u64,
    pub n: u64,
}

pub(crate) fn check_ps_gamma(gamma: &Rational) -> Result<(), PrimesError> {
    if *gamma <= Rational::from_integer(0) || *gamma > Rational::from_integer(1) {
        return Err(PrimesError::GammaOutOfRange(*gamma));
    }
    Ok(())
}

pub(crate) fn gamma_f64(gamma: &Rational) -> f64 {
    *gamma.numer() as f64 / *gamma.denom() as f64
}

/// Binary64 powers are trusted for the floor decision only when they sit at
/// least this far from an integer (binary64 error here is below 1e-9).
const FAST_PATH_MARGIN: f64 = 1.0 / (1u64 << 20) as f64;
const FAST_PATH_MAX: u64 = 1 << 40;

fn fast_ceil(x: f64) -> Option<u64> {
    let d = (x - x.round()).abs();
    (d > FAST_PATH_MARGIN).then(|| x.ceil() as u64)
}

/// `(⌈p^γ⌉, ⌈(p+1)^γ⌉)`.
fn ceil_pair(p: u64, gamma: &Rational) -> Result<(u64, u64), PrimesError> {
    if p < FAST_PATH_MAX && *gamma.denom() != 1 {
        let g = gamma_f64(gamma);
        if let (Some(a), Some(b)) = (fast_ceil((p as f64).powf(g)), fast_ceil(((p + 1) as f64).powf(g))) {
            return Ok((a, b));
        }
    }
    let lo = pow_guarded(p, gamma, PS_FRAC_BITS)?.value.ceil();
    let hi = pow_guarded(p + 1, gamma, PS_FRAC_BITS)?.value.ceil();
    Ok((lo.to_u64().expect("fits"), hi.to_u64().expect("fits")))
}

/// The witness `n ∈ [p^γ, (p+1)^γ)` if one exists.
pub fn is_ps_prime(p: u64, gamma: &Rational) -> Result<Option<PsWitness>, PrimesError> {
    check_ps_gamma(gamma)?;
    let (a, b) = ceil_pair(p, gamma)?;
    Ok((b > a).then_some(PsWitness { p, n: a }))
}

/// What [`ps_count`] does with a prime whose floors cannot be resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AmbiguityPolicy {
    #[default]
    Fail,
    SkipAndLog,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsCount {
    pub limit: u64,
    pub count: u64,
    /// `X^γ / log X`.
    pub scale: f64,
    pub ratio: f64,
    /// Primes skipped because their floors stayed ambiguous.
    pub skipped: Vec<u64>,
}

/// Piatetski-Shapiro witnesses for every prime `≤ x`, ascending.
pub fn ps_witnesses(x: u64, gamma: &Rational, policy: AmbiguityPolicy) -> Result<(Vec<PsWitness>, Vec<u64>), PrimesError> {
    check_ps_gamma(gamma)?;
    let segs = segments(0, x, DEFAULT_SEGMENT_LEN);
    let per_seg: Vec<(Vec<PsWitness>, Vec<u64>)> = segs
        .par_iter()
        .map(|s| {
            let mut found = Vec::new();
            let mut skipped = Vec::new();
            for p in s.primes() {
                match is_ps_prime(p, gamma) {
                    Ok(Some(w)) => found.push(w),
                    Ok(None) => {}
                    Err(PrimesError::Numerics(NumericsError::AmbiguousFloor { .. }))
                        if policy == AmbiguityPolicy::SkipAndLog =>
                    {
                        skipped.push(p)
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok((found, skipped))
        })
        .collect::<Result<_, PrimesError>>()?;
    let mut found = Vec::new();
    let mut skipped = Vec::new();
    for (f, s) in per_seg {
        found.extend(f);
        skipped.extend(s);
    }
    Ok((found, skipped))
}

/// Count Piatetski-Shapiro primes `≤ x` and compare with `x^γ / log x`.
pub fn ps_count(x: u64, gamma: &Rational, policy: AmbiguityPolicy) -> Result<PsCount, PrimesError> {
    let (found, skipped) = ps_witnesses(x, gamma, policy)?;
    let xf = x as f64;
    let scale = xf.powf(gamma_f64(gamma)) / xf.ln();
    let count = found.len() as u64;
    Ok(PsCount {
        limit: x,
        count,
        scale,
        ratio: count as f64 / scale,
        skipped,
    })
}
