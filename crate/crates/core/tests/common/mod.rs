//! Direct-loop oracles shared by the integration tests. Nothing here calls
//! into the library's sieve, power or reduction code.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Pow, ToPrimitive, Zero};
use std::f64::consts::PI;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `Λ(n)` by trial division.
pub fn lambda(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut m = n;
            while m % d == 0 {
                m /= d;
            }
            return if m == 1 { (d as f64).ln() } else { 0.0 };
        }
        d += 1;
    }
    (n as f64).ln()
}

/// `μ(n)` by trial division.
pub fn mobius(n: u64) -> i8 {
    let (mut m, mut sign, mut d) = (n, 1i8, 2);
    while d * d <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return 0;
            }
            sign = -sign;
        }
        d += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

pub fn primes_upto(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| is_prime(p)).collect()
}

/// `α` in a form the oracle can reduce without the library.
#[derive(Clone, Copy, Debug)]
pub enum OracleAlpha {
    Rat(i64, i64),
    Surd(u64),
}

impl OracleAlpha {
    pub fn spec(&self) -> String {
        match self {
            OracleAlpha::Rat(a, b) => format!("rat:{a}/{b}"),
            OracleAlpha::Surd(d) => format!("sqrt:{d}"),
        }
    }

    /// `{αk}` in `[0, 1)`.
    pub fn frac(&self, k: u128) -> f64 {
        match *self {
            OracleAlpha::Rat(a, b) => {
                let r = (BigInt::from(a) * BigInt::from(k)) % BigInt::from(b);
                let r = if r < BigInt::zero() { r + BigInt::from(b) } else { r };
                r.to_f64().unwrap() / b as f64
            }
            OracleAlpha::Surd(d) => {
                // ⌊√(d k²)·2^200⌋ = isqrt(d·k²·2^400)
                let scaled: BigInt = (BigInt::from(d) * BigInt::from(k) * BigInt::from(k)) << 400usize;
                let root = scaled.sqrt();
                let frac: BigInt = root & ((BigInt::one() << 200) - 1);
                let top: BigInt = frac >> 136usize;
                top.to_f64().unwrap() / 2f64.powi(64)
            }
        }
    }
}

pub fn e(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

/// `⌊x^{a/b}⌋` and whether it is exact, by integer roots.
pub fn floor_root(x: u64, a: u32, b: u32) -> (BigInt, bool) {
    let p = Pow::pow(BigInt::from(x), a);
    let r = p.nth_root(b);
    let exact = Pow::pow(&r, b) == p;
    (r, exact)
}

/// `⌈x^{a/b}⌉`.
pub fn ceil_root(x: u64, a: u32, b: u32) -> u64 {
    let (r, exact) = floor_root(x, a, b);
    let r = r.to_u64().unwrap();
    if exact {
        r
    } else {
        r + 1
    }
}

/// `ψ(-x^{a/b})` with the integer part taken exactly.
pub fn psi_neg_pow(x: u64, a: u32, b: u32) -> f64 {
    let (r, exact) = floor_root(x, a, b);
    if exact {
        return -0.5;
    }
    let y = (x as f64).powf(a as f64 / b as f64);
    0.5 - (y - r.to_f64().unwrap())
}

/// `⌊-p^γ⌋ - ⌊-(p+1)^γ⌋`.
pub fn ps_indicator(p: u64, a: u32, b: u32) -> u64 {
    ceil_root(p + 1, a, b) - ceil_root(p, a, b)
}

/// Relative agreement, with a `1e-12` absolute floor for values near zero.
pub fn rel_close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()) + 1e-12
}

pub fn crel_close(x: Complex64, y: Complex64, tol: f64) -> bool {
    (x - y).norm() <= tol * x.norm().max(y.norm()) + 1e-12
}
