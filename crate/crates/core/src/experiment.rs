//! Desk-scale driver for the inequality `‖αp² + β‖ < Δ` over
//! Piatetski-Shapiro primes: parameter cascade, the smoothed indicator `F_Δ`
//! and its Fourier truncation, `Γ = Γ₁ + Γ₂`, the solution search and the
//! cross-convergent scaling table.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::diophantine::{certify_convergent, AlphaSpec, Convergent, DiophantineError};
use crate::expsums::{omega_sum, ExpSumError, PhaseReducer, PrimeTable};
use crate::numerics::{ordered_sum_real, pow_real_big, FixedReal, NumericsError, Rational};

/// Largest `Δ` used when the formula gives `Δ ≥ 1/2`.
pub const DELTA_CLAMP: f64 = 0.499999;

/// Fractional bits used for `N = ⌊q^{29/(55-28γ)}⌋`.
const PARAM_BITS: u32 = 128;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error("gamma {0} outside (13/14, 1)")]
    GammaOutOfRange(Rational),
    #[error("{0}")]
    BadArgument(String),
    #[error(transparent)]
    Diophantine(#[from] DiophantineError),
    #[error(transparent)]
    ExpSum(#[from] ExpSumError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Everything fixed by `(α, β, γ, C, ε)` and a convergent `a/q` of `α`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentParams {
    pub alpha: AlphaSpec,
    pub beta: FixedReal,
    pub gamma: Rational,
    pub c: f64,
    pub eps: f64,
    pub conv: Convergent,
    /// `⌊q^{29/(55-28γ)}⌋`.
    pub n: u64,
    /// `C·N^{(13-14γ)/29+ε}`, clamped to [`DELTA_CLAMP`].
    pub delta: f64,
    /// The unclamped formula value.
    pub delta_formula: f64,
    pub delta_clamped: bool,
    /// `⌊q^{1/2}⌋`.
    pub h: u64,
    /// `⌊N^{(16-15γ)/29}⌋`.
    pub m: u64,
    /// `⌊N^{(2γ+23)/58}⌋`.
    pub theta_v: u64,
}

impl ExperimentParams {
    pub fn gamma_f64(&self) -> f64 {
        *self.gamma.numer() as f64 / *self.gamma.denom() as f64
    }

    pub fn q(&self) -> &BigInt {
        &self.conv.q
    }

    /// `N^{(15γ+13)/29}`, the scale of `Γ`.
    pub fn gamma_scale(&self) -> f64 {
        (self.n as f64).powf((15.0 * self.gamma_f64() + 13.0) / 29.0)
    }

    /// `N^{(28γ+3)/58}`, the scale of `Ω`.
    pub fn omega_scale(&self) -> f64 {
        (self.n as f64).powf((28.0 * self.gamma_f64() + 3.0) / 58.0)
    }
}

pub(crate) fn check_theorem_gamma(gamma: &Rational) -> Result<(), ExperimentError> {
    if *gamma <= Rational::new(13, 14) || *gamma >= Rational::from_integer(1) {
        return Err(ExperimentError::GammaOutOfRange(*gamma));
    }
    Ok(())
}

/// `⌊q^{29/(55-28γ)}⌋`, with the floor confirmed at two precisions.
pub fn n_for(q: &BigInt, gamma: &Rational) -> Result<u64, ExperimentError> {
    let (a, b) = (*gamma.numer(), *gamma.denom());
    let exponent = Rational::new(29 * b, 55 * b - 28 * a);
    let lo = pow_real_big(q, &exponent, PARAM_BITS)?;
    let hi = pow_real_big(q, &exponent, 2 * PARAM_BITS)?;
    let floor = lo.value.floor();
    if floor != hi.value.floor() || (lo.near_integer && !lo.exact) {
        return Err(NumericsError::AmbiguousFloor {
            n: q.to_u64().unwrap_or(u64::MAX),
            gamma: exponent,
        }
        .into());
    }
    floor
        .to_u64()
        .ok_or_else(|| ExperimentError::BadArgument(format!("N = {floor} does not fit in 64 bits")))
}

/// Derive `N, Δ, H, M, ϑ` from a convergent of `α`.
pub fn derive_params(
    alpha: &AlphaSpec,
    beta: &FixedReal,
    gamma: &Rational,
    c: f64,
    eps: f64,
    conv: &Convergent,
) -> Result<ExperimentParams, ExperimentError> {
    check_theorem_gamma(gamma)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(ExperimentError::BadArgument(format!("C = {c} must be positive")));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(ExperimentError::BadArgument(format!("eps = {eps} must be nonnegative")));
    }
    if !conv.is_admissible() {
        return Err(ExperimentError::BadArgument(format!(
            "convergent {}/{} has a = 0",
            conv.a, conv.q
        )));
    }
    certify_convergent(alpha, conv)?;

    let n = n_for(&conv.q, gamma)?;
    let nf = n as f64;
    let g = *gamma.numer() as f64 / *gamma.denom() as f64;
    let delta_formula = c * nf.powf((13.0 - 14.0 * g) / 29.0 + eps);
    let delta_clamped = !(delta_formula < 0.5);
    let delta = if delta_clamped { DELTA_CLAMP } else { delta_formula };
    let h = conv.q.sqrt().to_u64().unwrap_or(u64::MAX);
    let m = (nf.powf((16.0 - 15.0 * g) / 29.0).floor() as u64).max(1);
    let theta_v = (nf.powf((2.0 * g + 23.0) / 58.0).floor() as u64).max(1);
    Ok(ExperimentParams {
        alpha: alpha.clone(),
        beta: beta.clone(),
        gamma: *gamma,
        c,
        eps,
        conv: conv.clone(),
        n,
        delta,
        delta_formula,
        delta_clamped,
        h,
        m,
        theta_v,
    })
}

/// The period-1 indicator of `[-Δ, Δ)`.
pub fn f_delta(theta: &FixedReal, delta: f64) -> u8 {
    let t = theta.frac();
    let d = FixedReal::from_f64(delta, t.frac_bits());
    let one = FixedReal::from_int(1, t.frac_bits());
    u8::from(t < d || t >= &one - &d)
}

fn f_delta_f64(theta: f64, delta: f64) -> f64 {
    let t = theta - theta.floor();
    if t < delta || t >= 1.0 - delta {
        1.0
    } else {
        0.0
    }
}

fn dist_f64(x: f64) -> f64 {
    (x - x.round()).abs()
}

fn capped(scale: u64, dist: f64) -> f64 {
    if dist == 0.0 {
        1.0
    } else {
        (1.0 / (scale as f64 * dist)).min(1.0)
    }
}

/// A truncated Fourier series next to the function it approximates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpansionError {
    pub truncated: f64,
    pub error: f64,
    pub envelope: f64,
}

impl ExpansionError {
    pub fn ratio(&self) -> f64 {
        self.error / self.envelope
    }
}

/// `2Δ + Σ_{1≤|h|≤H} sin(2πhΔ)/(πh)·e(hθ)` against `F_Δ(θ)`, with envelope
/// `min(1, 1/(H‖θ+Δ‖)) + min(1, 1/(H‖θ-Δ‖))`.
pub fn f_delta_expansion_error(theta: f64, delta: f64, big_h: u64) -> Result<ExpansionError, ExperimentError> {
    if big_h == 0 {
        return Err(ExperimentError::BadArgument("H must be at least 1".into()));
    }
    let tail = ordered_sum_real(0..big_h as usize, |i| {
        let h = (i + 1) as f64;
        2.0 * (2.0 * PI * h * delta).sin() / (PI * h) * (2.0 * PI * h * theta).cos()
    });
    let truncated = 2.0 * delta + tail;
    let error = (f_delta_f64(theta, delta) - truncated).abs();
    let envelope = capped(big_h, dist_f64(theta + delta)) + capped(big_h, dist_f64(theta - delta));
    Ok(ExpansionError {
        truncated,
        error,
        envelope,
    })
}

/// `-Σ_{1≤|m|≤M} e(mt)/(2πim)` against `ψ(t) = {t} - 1/2`, with envelope
/// `min(1, 1/(M‖t‖))`.
pub fn psi_expansion_error(t: f64, big_m: u64) -> Result<ExpansionError, ExperimentError> {
    if big_m < 2 {
        return Err(ExperimentError::BadArgument(format!("M = {big_m} must be at least 2")));
    }
    let truncated = -ordered_sum_real(0..big_m as usize, |i| {
        let m = (i + 1) as f64;
        (2.0 * PI * m * t).sin() / (PI * m)
    });
    let error = ((t - t.floor() - 0.5) - truncated).abs();
    let envelope = capped(big_m, dist_f64(t));
    Ok(ExpansionError {
        truncated,
        error,
        envelope,
    })
}

/// `{αp² + β}` for every prime of `table`, in fixed point.
fn phases(params: &ExperimentParams, table: &PrimeTable) -> Result<Vec<FixedReal>, ExperimentError> {
    let n = params.n as u128;
    let reducer = PhaseReducer::new(&params.alpha, n * n)?;
    let bits = reducer.bits().max(params.beta.frac_bits());
    let beta = params.beta.with_frac_bits(bits);
    Ok(table
        .primes
        .par_iter()
        .map(|&p| (&reducer.frac(p as u128 * p as u128).with_frac_bits(bits) + &beta).frac())
        .collect())
}

/// `Γ` and its split `Γ₁ + Γ₂` by the identity
/// `⌊-p^γ⌋ - ⌊-(p+1)^γ⌋ = ((p+1)^γ - p^γ) + (ψ(-(p+1)^γ) - ψ(-p^γ))`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSums {
    pub gamma: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub residual: f64,
    pub prime_count: usize,
}

pub fn gamma_sums(params: &ExperimentParams) -> Result<GammaSums, ExperimentError> {
    let table = PrimeTable::new(params.n, &params.gamma)?;
    gamma_sums_with(params, &table)
}

fn gamma_sums_with(params: &ExperimentParams, table: &PrimeTable) -> Result<GammaSums, ExperimentError> {
    let phases = phases(params, table)?;
    let centred: Vec<f64> = phases
        .iter()
        .zip(&table.log_p)
        .map(|(t, lp)| (f_delta(t, params.delta) as f64 - 2.0 * params.delta) * lp)
        .collect();
    let len = table.len();
    let gamma = ordered_sum_real(0..len, |i| table.indicator[i] as f64 * centred[i]);
    let gamma1 = ordered_sum_real(0..len, |i| table.smooth[i] * centred[i]);
    let gamma2 = ordered_sum_real(0..len, |i| table.psi_diff[i] * centred[i]);
    Ok(GammaSums {
        gamma,
        gamma1,
        gamma2,
        residual: (gamma - gamma1 - gamma2).abs(),
        prime_count: len,
    })
}

/// A Piatetski-Shapiro prime `p ≤ N` with `‖αp² + β‖` and whether it is `< Δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionRecord {
    pub p: u64,
    pub n: u64,
    pub dist: FixedReal,
    pub passes: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchSummary {
    /// Piatetski-Shapiro primes up to `N`.
    pub ps_count: usize,
    pub pass_count: usize,
    /// `Σ log p` over passing primes.
    pub pass_mass: f64,
    /// `2Δ·Σ_{PS p≤N} log p`.
    pub expectation: f64,
    /// `pass_mass / expectation`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    /// Every Piatetski-Shapiro prime `p ≤ N`, ascending.
    pub records: Vec<SolutionRecord>,
    pub summary: SearchSummary,
}

impl SearchResult {
    pub fn passes(&self) -> impl Iterator<Item = &SolutionRecord> {
        self.records.iter().filter(|r| r.passes)
    }
}

pub fn solution_search(params: &ExperimentParams) -> Result<SearchResult, ExperimentError> {
    let table = PrimeTable::new(params.n, &params.gamma)?;
    solution_search_with(params, &table)
}

fn solution_search_with(params: &ExperimentParams, table: &PrimeTable) -> Result<SearchResult, ExperimentError> {
    let phases = phases(params, table)?;
    let g = params.gamma;
    let mut records = Vec::new();
    let mut ps_mass = Vec::new();
    let mut pass_mass = Vec::new();
    for (i, t) in phases.iter().enumerate() {
        if table.indicator[i] == 0 {
            continue;
        }
        let p = table.primes[i];
        // The witness is ⌈p^γ⌉, which the indicator already certified.
        let n = crate::numerics::pow_guarded(p, &g, crate::primes::PS_FRAC_BITS)?
            .value
            .ceil()
            .to_u64()
            .expect("n <= p");
        let dist = t.dist_nearest();
        let passes = dist.to_f64() < params.delta
            && dist < FixedReal::from_f64(params.delta, dist.frac_bits());
        ps_mass.push(table.log_p[i]);
        if passes {
            pass_mass.push(table.log_p[i]);
        }
        records.push(SolutionRecord { p, n, dist, passes });
    }
    let ps_mass = ordered_sum_real(0..ps_mass.len(), |i| ps_mass[i]);
    let pass_total = ordered_sum_real(0..pass_mass.len(), |i| pass_mass[i]);
    let expectation = 2.0 * params.delta * ps_mass;
    let summary = SearchSummary {
        ps_count: records.len(),
        pass_count: pass_mass.len(),
        pass_mass: pass_total,
        expectation,
        ratio: if expectation > 0.0 { pass_total / expectation } else { f64::NAN },
    };
    Ok(SearchResult { records, summary })
}

/// One convergent's row of the scaling table.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub q: BigInt,
    pub n: u64,
    pub delta: f64,
    pub delta_clamped: bool,
    pub h: u64,
    pub m: u64,
    pub theta_v: u64,
    pub abs_gamma: f64,
    /// `|Γ| / N^{(15γ+13)/29}`.
    pub gamma_norm: f64,
    pub pass_count: usize,
    pub expectation: f64,
    /// Pass mass over expectation.
    pub ratio: f64,
    /// `Ω / N^{(28γ+3)/58}`.
    pub omega_ratio: f64,
    pub residual: f64,
}

pub const SCALING_COLUMNS: [&str; 12] = [
    "q",
    "N",
    "Delta",
    "H",
    "M",
    "theta",
    "abs_gamma",
    "gamma_norm",
    "pass_count",
    "expectation",
    "ratio",
    "omega_ratio",
];

pub fn scaling_row(params: &ExperimentParams) -> Result<ScalingRow, ExperimentError> {
    let table = PrimeTable::new(params.n, &params.gamma)?;
    let sums = gamma_sums_with(params, &table)?;
    let search = solution_search_with(params, &table)?;
    let omega = omega_sum(&params.alpha, &params.beta, params.delta, params.h.max(1), params.n)?;
    Ok(ScalingRow {
        q: params.conv.q.clone(),
        n: params.n,
        delta: params.delta,
        delta_clamped: params.delta_clamped,
        h: params.h,
        m: params.m,
        theta_v: params.theta_v,
        abs_gamma: sums.gamma.abs(),
        gamma_norm: sums.gamma.abs() / params.gamma_scale(),
        pass_count: search.summary.pass_count,
        expectation: search.summary.expectation,
        ratio: search.summary.ratio,
        omega_ratio: omega / params.omega_scale(),
        residual: sums.residual,
    })
}

/// One row per convergent (at least two), in ascending `q`.
pub fn scaling_report(
    alpha: &AlphaSpec,
    beta: &FixedReal,
    gamma: &Rational,
    c: f64,
    eps: f64,
    convergents: &[Convergent],
) -> Result<Vec<ScalingRow>, ExperimentError> {
    if convergents.len() < 2 {
        return Err(ExperimentError::BadArgument(format!(
            "scaling needs at least 2 convergents, got {}",
            convergents.len()
        )));
    }
    let mut sorted = convergents.to_vec();
    sorted.sort_by(|x, y| x.q.cmp(&y.q));
    sorted
        .iter()
        .map(|conv| scaling_row(&derive_params(alpha, beta, gamma, c, eps, conv)?))
        .collect()
}
