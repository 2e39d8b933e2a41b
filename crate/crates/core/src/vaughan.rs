//! Vaughan's identity with both cutoffs at `ϑ`, and the four-sum split of
//!
//! `Φ(N₁, N₂) = Σ_{N₁<n≤N₂} Λ(n) e(f(n)) = Θ₁ - Θ₂ - Θ₃ - Θ₄`.
//!
//! Coefficients: `c(d) = Σ_{rs=d, r≤ϑ, s≤ϑ} μ(r)Λ(s)` (type I, `d ≤ ϑ²`) and
//! `a(d) = Σ_{r|d, r≤ϑ} μ(r)` (type II). For every `n > ϑ`
//!
//! `Λ(n) = Σ_{d≤ϑ, d|n} μ(d) log(n/d) - Σ_{d|n} c(d) - Σ_{dl=n, d>ϑ, l>ϑ} a(d)Λ(l)`.

use num_complex::Complex64;
use num_integer::Roots;
use thiserror::Error;

use crate::expsums::{ExpSumError, PhaseSpec};
use crate::numerics::{e_turns, ordered_sum, NeumaierSum};
use crate::primes::{sieve_monolithic, SieveSegment};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VaughanError {
    #[error("invalid range: {0}")]
    RangeError(String),
    #[error("coefficient bound violated at d = {d}: {detail}")]
    BoundViolated { d: u64, detail: String },
    #[error("Vaughan identity residual {residual} exceeds tolerance {tolerance}")]
    IdentityViolated { residual: f64, tolerance: f64 },
    #[error(transparent)]
    ExpSum(#[from] ExpSumError),
}

/// Coefficient tables for a fixed cutoff `ϑ`.
#[derive(Clone, Debug)]
pub struct VaughanCoeffs {
    theta_v: u64,
    /// `c(d)` for `d ≤ ϑ²`.
    c: Vec<f64>,
    /// `a(d)` for `d ≤ d_max`.
    a: Vec<i64>,
    table: SieveSegment,
}

impl VaughanCoeffs {
    pub fn theta_v(&self) -> u64 {
        self.theta_v
    }

    pub fn c(&self, d: u64) -> f64 {
        self.c[d as usize]
    }

    pub fn a(&self, d: u64) -> i64 {
        self.a[d as usize]
    }

    pub fn c_max(&self) -> u64 {
        self.c.len() as u64 - 1
    }

    pub fn d_max(&self) -> u64 {
        self.a.len() as u64 - 1
    }

    pub fn mu(&self, n: u64) -> i8 {
        self.table.mu(n)
    }

    pub fn lambda(&self, n: u64) -> f64 {
        self.table.lambda(n)
    }

    pub fn tau(&self, n: u64) -> u32 {
        self.table.tau(n)
    }

    /// Right-hand side of the pointwise identity at `n > ϑ`; equals `Λ(n)`.
    pub fn reconstruct_lambda(&self, n: u64) -> f64 {
        assert!(n > self.theta_v && n <= self.d_max(), "n = {n} outside ({}, {}]", self.theta_v, self.d_max());
        let t = self.theta_v;
        let mut acc = NeumaierSum::new();
        for d in 1..=n.sqrt() {
            if n % d != 0 {
                continue;
            }
            let pair = n / d;
            let divisors: &[u64] = if pair == d { &[d] } else { &[d, pair] };
            for &e in divisors {
                let l = n / e;
                if e <= t {
                    acc.add(self.mu(e) as f64 * (l as f64).ln());
                }
                if e <= self.c_max() {
                    acc.add(-self.c(e));
                }
                if e > t && l > t {
                    acc.add(-(self.a(e) as f64) * self.lambda(l));
                }
            }
        }
        acc.value()
    }
}

/// Build `c(d)` for `d ≤ ϑ²` and `a(d)` for `d ≤ d_max`, verifying
/// `|c(d)| ≤ log d` and `|a(d)| ≤ τ(d)` on every entry.
pub fn build_coeffs(theta_v: u64, d_max: u64) -> Result<VaughanCoeffs, VaughanError> {
    if theta_v < 2 {
        return Err(VaughanError::RangeError(format!("theta_v = {theta_v} must be at least 2")));
    }
    let c_max = theta_v * theta_v;
    let d_max = d_max.max(1);
    let table = sieve_monolithic(c_max.max(d_max));

    let mut c_acc = vec![NeumaierSum::new(); c_max as usize + 1];
    for r in 1..=theta_v {
        let mu = table.mu(r);
        if mu == 0 {
            continue;
        }
        for s in 2..=theta_v {
            let lam = table.lambda(s);
            if lam > 0.0 {
                c_acc[(r * s) as usize].add(mu as f64 * lam);
            }
        }
    }
    let c: Vec<f64> = c_acc.iter().map(NeumaierSum::value).collect();

    let mut a = vec![0i64; d_max as usize + 1];
    for r in 1..=theta_v.min(d_max) {
        let mu = table.mu(r) as i64;
        if mu == 0 {
            continue;
        }
        let mut d = r;
        while d <= d_max {
            a[d as usize] += mu;
            d += r;
        }
    }

    for d in 1..=c_max {
        let log_d = (d as f64).ln();
        if c[d as usize].abs() > log_d + 1e-12 * log_d.max(1.0) {
            return Err(VaughanError::BoundViolated {
                d,
                detail: format!("|c(d)| = {} > log d = {log_d}", c[d as usize].abs()),
            });
        }
    }
    for d in 1..=d_max {
        let tau = table.tau(d) as i64;
        if a[d as usize].abs() > tau {
            return Err(VaughanError::BoundViolated {
                d,
                detail: format!("|a(d)| = {} > tau(d) = {tau}", a[d as usize].abs()),
            });
        }
    }
    Ok(VaughanCoeffs {
        theta_v,
        c,
        a,
        table,
    })
}

/// `Θ₁…Θ₄` and the direct sum `Φ` over `(N₁, N₂]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThetaSums {
    pub theta1: Complex64,
    pub theta2: Complex64,
    pub theta3: Complex64,
    pub theta4: Complex64,
    pub phi_direct: Complex64,
}

impl ThetaSums {
    /// `Θ₁ - Θ₂ - Θ₃ - Θ₄`.
    pub fn combined(&self) -> Complex64 {
        self.theta1 - self.theta2 - self.theta3 - self.theta4
    }

    pub fn residual(&self) -> f64 {
        (self.phi_direct - self.combined()).norm()
    }
}

/// The four Vaughan sums of `e(f(dl))` over `N₁ < dl ≤ N₂`.
pub fn theta_sums(n1: u64, n2: u64, theta_v: u64, phase: &PhaseSpec) -> Result<ThetaSums, VaughanError> {
    if theta_v < 2 {
        return Err(VaughanError::RangeError(format!("theta_v = {theta_v} must be at least 2")));
    }
    if n1 < theta_v {
        return Err(VaughanError::RangeError(format!("N1 = {n1} below theta_v = {theta_v}")));
    }
    if n1 >= n2 {
        return Err(VaughanError::RangeError(format!("N1 = {n1} not below N2 = {n2}")));
    }
    let coeffs = build_coeffs(theta_v, n2)?;
    let prepared = phase.prepare(n2)?;
    let values: Vec<Complex64> = (n1 + 1..=n2).map(|n| e_turns(prepared.turns(n)).value()).collect();
    let ph = |n: u64| values[(n - n1 - 1) as usize];
    // Σ_{N₁/d < l ≤ N₂/d} e(f(dl)) · weight(l)
    let inner = |d: u64, weight: &dyn Fn(u64) -> f64| -> Complex64 {
        let mut s = crate::numerics::ComplexSum::new();
        for l in n1 / d + 1..=n2 / d {
            s.add(ph(d * l) * weight(l));
        }
        s.value()
    };
    let one = |_: u64| 1.0;
    let log = |l: u64| (l as f64).ln();

    let small = theta_v.min(n2) as usize;
    let theta1 = ordered_sum(0..small, |i| {
        let d = i as u64 + 1;
        inner(d, &log) * coeffs.mu(d) as f64
    });
    let theta2 = ordered_sum(0..small, |i| {
        let d = i as u64 + 1;
        inner(d, &one) * coeffs.c(d)
    });
    let big = coeffs.c_max().min(n2);
    let theta3 = ordered_sum(0..big.saturating_sub(theta_v) as usize, |i| {
        let d = theta_v + 1 + i as u64;
        inner(d, &one) * coeffs.c(d)
    });
    let d_top = n2 / (theta_v + 1);
    let theta4 = ordered_sum(0..d_top.saturating_sub(theta_v) as usize, |i| {
        let d = theta_v + 1 + i as u64;
        let a = coeffs.a(d);
        if a == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let mut s = crate::numerics::ComplexSum::new();
        for l in (n1 / d + 1).max(theta_v + 1)..=n2 / d {
            let lam = coeffs.lambda(l);
            if lam > 0.0 {
                s.add(ph(d * l) * lam);
            }
        }
        s.value() * a as f64
    });
    let phi_direct = ordered_sum(0..values.len(), |i| {
        let n = n1 + 1 + i as u64;
        values[i] * coeffs.lambda(n)
    });
    Ok(ThetaSums {
        theta1,
        theta2,
        theta3,
        theta4,
        phi_direct,
    })
}

/// Per-term tolerance of the exact identity.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// `|Φ_direct - (Θ₁ - Θ₂ - Θ₃ - Θ₄)|`, failing above `1e-9·(N₂ - N₁ + 1)`.
pub fn identity_residual(n1: u64, n2: u64, theta_v: u64, phase: &PhaseSpec) -> Result<f64, VaughanError> {
    if n1 >= n2 {
        return Ok(0.0);
    }
    let sums = theta_sums(n1, n2, theta_v, phase)?;
    let residual = sums.residual();
    let tolerance = IDENTITY_TOLERANCE * (n2 - n1 + 1) as f64;
    if residual > tolerance {
        return Err(VaughanError::IdentityViolated { residual, tolerance });
    }
    Ok(residual)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_coefficients() {
        let k = build_coeffs(2, 10).unwrap();
        assert_eq!(k.c(2), 2f64.ln());
        assert_eq!(k.a(1), 1);
        let k = build_coeffs(3, 10).unwrap();
        assert!((k.c(6) + 6f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn zero_phase_recovers_chebyshev_difference() {
        let sums = theta_sums(4, 12, 2, &PhaseSpec::Zero).unwrap();
        let expected = (5.0f64 * 7.0 * 2.0 * 3.0 * 11.0).ln();
        assert!((sums.combined().re - expected).abs() < 1e-12);
        assert!(sums.combined().im.abs() < 1e-12);
        assert!(sums.residual() <= 1e-12);
    }

    #[test]
    fn single_composite_step() {
        let sums = theta_sums(9, 10, 3, &PhaseSpec::Zero).unwrap();
        assert!(sums.combined().norm() < 1e-12);
    }

    #[test]
    fn degenerate_ranges() {
        assert_eq!(identity_residual(10, 10, 2, &PhaseSpec::Zero).unwrap(), 0.0);
        assert_eq!(identity_residual(20, 10, 2, &PhaseSpec::Zero).unwrap(), 0.0);
        assert!(matches!(theta_sums(1, 10, 2, &PhaseSpec::Zero), Err(VaughanError::RangeError(_))));
        assert!(build_coeffs(1, 10).is_err());
    }
}
