//! Exponential sums over primes and the measured-ratio form of each `≪` bound.
//!
//! Every `≪` claim is carried by a [`BoundReport`]: the computed magnitude,
//! the right-hand side with `ε = 0` and implied constant 1, and their ratio.

mod checks;
mod phase;

pub use checks::{differenced_phase_sum, differenced_range, sargos_check, wvdc_check, SARGOS_SPREAD};
pub use phase::{precision_for, PhaseReducer, PhaseSpec, PreparedPhase};

use num_bigint::BigInt;
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::diophantine::{AlphaSpec, DiophantineError, DirichletApproximant};
use crate::numerics::{e_turns, ordered_sum, ordered_sum_real, pow_guarded, FixedReal, NumericsError, Rational};
use crate::primes::{check_ps_gamma, primes_up_to, PrimesError, PS_FRAC_BITS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpSumError {
    #[error("third-derivative hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("Weyl-van der Corput inequality violated: lhs {lhs} > rhs {rhs}")]
    InequalityViolated { lhs: f64, rhs: f64 },
    #[error("{0}")]
    BadArgument(String),
    #[error(transparent)]
    Diophantine(#[from] DiophantineError),
    #[error(transparent)]
    Primes(#[from] PrimesError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A computed magnitude next to the bound it is claimed to respect.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub value: f64,
    pub bound: f64,
    pub ratio: f64,
    pub meta: Vec<(String, String)>,
}

impl BoundReport {
    pub fn new(value: f64, bound: f64) -> Self {
        let ratio = if bound > 0.0 { value / bound } else { f64::INFINITY };
        Self {
            value,
            bound,
            ratio,
            meta: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// Per-prime weights for `p ≤ N`, shared by every sum over primes.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    pub n: u64,
    pub gamma: Rational,
    pub primes: Vec<u64>,
    pub log_p: Vec<f64>,
    /// `p^{γ-1}`.
    pub power_weight: Vec<f64>,
    /// `(p+1)^γ - p^γ`.
    pub smooth: Vec<f64>,
    /// `ψ(-(p+1)^γ) - ψ(-p^γ)`.
    pub psi_diff: Vec<f64>,
    /// `⌊-p^γ⌋ - ⌊-(p+1)^γ⌋`, 1 exactly for Piatetski-Shapiro primes.
    pub indicator: Vec<u8>,
}

struct PrimeWeights {
    smooth: f64,
    psi_diff: f64,
    indicator: u8,
}

fn prime_weights(p: u64, gamma: &Rational) -> Result<PrimeWeights, NumericsError> {
    let x = pow_guarded(p, gamma, PS_FRAC_BITS)?.value;
    let y = pow_guarded(p + 1, gamma, PS_FRAC_BITS)?.value;
    let (neg_x, neg_y) = (-&x, -&y);
    let smooth = &y - &x;
    let psi_diff = &neg_y.psi() - &neg_x.psi();
    let ind = neg_x.floor() - neg_y.floor();
    // ψ(-y) - ψ(-x) + (y - x) = ⌊-x⌋ - ⌊-y⌋ holds exactly in fixed point.
    debug_assert_eq!(&smooth + &psi_diff, FixedReal::from_int(ind.clone(), smooth.frac_bits()));
    let indicator = if ind == BigInt::from(1) { 1 } else { 0 };
    Ok(PrimeWeights {
        smooth: smooth.to_f64(),
        psi_diff: psi_diff.to_f64(),
        indicator,
    })
}

impl PrimeTable {
    pub fn new(n: u64, gamma: &Rational) -> Result<Self, ExpSumError> {
        check_ps_gamma(gamma)?;
        let primes = primes_up_to(n);
        let g = *gamma.numer() as f64 / *gamma.denom() as f64;
        let weights: Vec<PrimeWeights> = primes
            .par_iter()
            .map(|&p| prime_weights(p, gamma))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            n,
            gamma: *gamma,
            log_p: primes.iter().map(|&p| (p as f64).ln()).collect(),
            power_weight: primes.iter().map(|&p| (p as f64).powf(g - 1.0)).collect(),
            smooth: weights.iter().map(|w| w.smooth).collect(),
            psi_diff: weights.iter().map(|w| w.psi_diff).collect(),
            indicator: weights.iter().map(|w| w.indicator).collect(),
            primes,
        })
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// `Σ_{p≤N} log p` (Chebyshev `θ(N)`).
    pub fn theta(&self) -> f64 {
        ordered_sum_real(0..self.len(), |i| self.log_p[i])
    }

    /// `Σ_{PS p≤N} log p`.
    pub fn ps_log_mass(&self) -> f64 {
        ordered_sum_real(0..self.len(), |i| self.indicator[i] as f64 * self.log_p[i])
    }

    pub fn ps_count(&self) -> usize {
        self.indicator.iter().filter(|&&b| b == 1).count()
    }
}

/// `Σ_{p ∈ table} weight(i) · e(αhp²)`.
pub fn weighted_phase_sum<W>(table: &PrimeTable, reducer: &PhaseReducer, h: u64, weight: W) -> Complex64
where
    W: Fn(usize) -> f64 + Sync,
{
    ordered_sum(0..table.len(), |i| {
        let p = table.primes[i] as u128;
        e_turns(reducer.turns(h as u128 * p * p)) * weight(i)
    })
}

fn reducer_for(alpha: &AlphaSpec, h_max: u64, n: u64) -> Result<PhaseReducer, ExpSumError> {
    let top = n as u128 + 1;
    PhaseReducer::new(alpha, (h_max as u128).saturating_mul(top * top))
}

fn check_h(h: u64) -> Result<(), ExpSumError> {
    if h == 0 {
        return Err(ExpSumError::BadArgument("h must be positive".into()));
    }
    Ok(())
}

/// `S(y) = Σ_{p≤y} e(αhp²) log p`.
pub fn prime_phase_sum(alpha: &AlphaSpec, h: u64, y: u64) -> Result<Complex64, ExpSumError> {
    check_h(h)?;
    if y < 2 {
        return Err(ExpSumError::BadArgument("S(y) needs y >= 2".into()));
    }
    let primes = primes_up_to(y);
    let reducer = reducer_for(alpha, h, y)?;
    Ok(ordered_sum(0..primes.len(), |i| {
        let p = primes[i];
        e_turns(reducer.turns(h as u128 * (p as u128) * (p as u128))) * (p as f64).ln()
    }))
}

/// The Ghosh-type bound `N·(1/q_h + N^{-1/2} + q_h/N²)^{1/4}`.
pub fn ghosh_bound(n: u64, q_h: f64) -> f64 {
    let nf = n as f64;
    nf * (1.0 / q_h + nf.powf(-0.5) + q_h / (nf * nf)).powf(0.25)
}

/// Compare `|S(N)|` with [`ghosh_bound`] for the approximant's `q_h`.
pub fn ghosh_bound_report(
    alpha: &AlphaSpec,
    h: u64,
    n: u64,
    approximant: &DirichletApproximant,
) -> Result<BoundReport, ExpSumError> {
    if approximant.h != h {
        return Err(ExpSumError::BadArgument(format!(
            "approximant is for h = {}, not {h}",
            approximant.h
        )));
    }
    let s = prime_phase_sum(alpha, h, n)?;
    Ok(BoundReport::new(s.norm(), ghosh_bound(n, approximant.q_h_f64()))
        .with("N", n)
        .with("h", h)
        .with("q_h", &approximant.q_h))
}

/// `Σ = Σ_{p≤N} (ψ(-(p+1)^γ) - ψ(-p^γ)) e(αhp²) log p`.
pub fn sigma_sum(alpha: &AlphaSpec, h: u64, gamma: &Rational, n: u64) -> Result<Complex64, ExpSumError> {
    check_h(h)?;
    let table = PrimeTable::new(n, gamma)?;
    let reducer = reducer_for(alpha, h, n)?;
    Ok(sigma_sum_with(&table, &reducer, h))
}

pub fn sigma_sum_with(table: &PrimeTable, reducer: &PhaseReducer, h: u64) -> Complex64 {
    weighted_phase_sum(table, reducer, h, |i| table.psi_diff[i] * table.log_p[i])
}

/// Partial sums `𝔖(u)` and `G(u)` over `h ≤ u`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPartialSums {
    pub u: f64,
    /// `𝔖(u) = Σ_{h≤u} |Σ_{p≤N} p^{γ-1} e(αhp²) log p|`.
    pub frak_s: f64,
    /// `G(u) = Σ_{h≤u} |Σ_{p≤N} (ψ(-(p+1)^γ) - ψ(-p^γ)) e(αhp²) log p|`.
    pub g: f64,
    /// Inner magnitudes per `h`, ascending.
    pub per_h: Vec<(u64, f64, f64)>,
}

pub fn weighted_partial_sums(alpha: &AlphaSpec, gamma: &Rational, n: u64, u: f64) -> Result<WeightedPartialSums, ExpSumError> {
    if !(u >= 1.0) {
        return Err(ExpSumError::BadArgument("u must be at least 1".into()));
    }
    let table = PrimeTable::new(n, gamma)?;
    let h_max = u.floor() as u64;
    let reducer = reducer_for(alpha, h_max, n)?;
    Ok(weighted_partial_sums_with(&table, &reducer, u))
}

pub fn weighted_partial_sums_with(table: &PrimeTable, reducer: &PhaseReducer, u: f64) -> WeightedPartialSums {
    let h_max = u.floor() as u64;
    let per_h: Vec<(u64, f64, f64)> = (1..=h_max)
        .map(|h| {
            let smooth = weighted_phase_sum(table, reducer, h, |i| table.power_weight[i] * table.log_p[i]);
            let saw = sigma_sum_with(table, reducer, h);
            (h, smooth.norm(), saw.norm())
        })
        .collect();
    let frak_s = per_h.iter().map(|r| r.1).collect::<crate::numerics::NeumaierSum>().value();
    let g = per_h.iter().map(|r| r.2).collect::<crate::numerics::NeumaierSum>().value();
    WeightedPartialSums { u, frak_s, g, per_h }
}

fn min_term(big_h: u64, x: &FixedReal) -> f64 {
    let d = x.dist_nearest().to_f64();
    if d == 0.0 {
        1.0
    } else {
        (1.0 / (big_h as f64 * d)).min(1.0)
    }
}

/// `Ω = Σ_{n≤N} [min(1, 1/(H‖αn²+β+Δ‖)) + min(1, 1/(H‖αn²+β-Δ‖))]`.
pub fn omega_sum(alpha: &AlphaSpec, beta: &FixedReal, delta: f64, big_h: u64, n: u64) -> Result<f64, ExpSumError> {
    if big_h == 0 {
        return Err(ExpSumError::BadArgument("H must be positive".into()));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(ExpSumError::BadArgument(format!("Delta {delta} outside (0, 1/2)")));
    }
    let reducer = reducer_for(alpha, 1, n)?;
    let bits = reducer.bits().max(beta.frac_bits());
    let shift_up = beta + &FixedReal::from_f64(delta, bits);
    let shift_down = beta - &FixedReal::from_f64(delta, bits);
    Ok(ordered_sum_real(0..n as usize, |i| {
        let k = (i as u128 + 1) * (i as u128 + 1);
        let base = reducer.frac(k);
        min_term(big_h, &(&base + &shift_up)) + min_term(big_h, &(&base + &shift_down))
    }))
}

/// The bound `Nq^{-1/2} + N^{1/2} + NH^{-1} + H^{-1/2}q^{1/2}` for `Ω`.
pub fn omega_bound(n: u64, big_h: u64, q: f64) -> f64 {
    let (nf, hf) = (n as f64, big_h as f64);
    nf / q.sqrt() + nf.sqrt() + nf / hf + q.sqrt() / hf.sqrt()
}

pub fn omega_report(
    alpha: &AlphaSpec,
    beta: &FixedReal,
    delta: f64,
    big_h: u64,
    n: u64,
    q: &BigInt,
) -> Result<BoundReport, ExpSumError> {
    let value = omega_sum(alpha, beta, delta, big_h, n)?;
    let qf = num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::INFINITY);
    Ok(BoundReport::new(value, omega_bound(n, big_h, qf))
        .with("N", n)
        .with("H", big_h)
        .with("q", q))
}
