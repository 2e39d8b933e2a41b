use num_complex::Complex64;

use crate::numerics::{e_turns, ordered_sum, ComplexSum};

use super::{BoundReport, ExpSumError, PhaseSpec, PreparedPhase};

/// Largest `max|f'''| / min|f'''|` accepted as `f''' ≍ λ`.
pub const SARGOS_SPREAD: f64 = 16.0;

/// `|Σ_{a<n≤b} e(f(n))|` against `(b-a)λ^{1/6} + λ^{-1/3}`, `λ = max|f'''|`.
///
/// Every supported phase has a monotone `f'''` on `x > 0`, so the extremes of
/// `|f'''|` over `[a, b]` sit at the endpoints.
pub fn sargos_check(phase: &PhaseSpec, a: u64, b: u64) -> Result<BoundReport, ExpSumError> {
    if b <= a {
        return Err(ExpSumError::BadArgument(format!("empty range ({a}, {b}]")));
    }
    let fa = phase.third_derivative(a as f64);
    let fb = phase.third_derivative(b as f64);
    if !(fa.is_finite() && fb.is_finite()) || fa == 0.0 || fb == 0.0 {
        return Err(ExpSumError::HypothesisViolated(format!(
            "f''' vanishes or is unbounded on [{a}, {b}]"
        )));
    }
    if fa.signum() != fb.signum() {
        return Err(ExpSumError::HypothesisViolated(format!("f''' changes sign on [{a}, {b}]")));
    }
    let (lo, hi) = (fa.abs().min(fb.abs()), fa.abs().max(fb.abs()));
    if hi / lo > SARGOS_SPREAD {
        return Err(ExpSumError::HypothesisViolated(format!(
            "max|f'''|/min|f'''| = {} exceeds {SARGOS_SPREAD}",
            hi / lo
        )));
    }
    let lambda = hi;
    let prepared = phase.prepare(b)?;
    let sum = ordered_sum(0..(b - a) as usize, |i| e_turns(prepared.turns(a + 1 + i as u64)).value());
    let bound = (b - a) as f64 * lambda.powf(1.0 / 6.0) + lambda.powf(-1.0 / 3.0);
    Ok(BoundReport::new(sum.norm(), bound)
        .with("a", a)
        .with("b", b)
        .with("lambda", lambda))
}

/// Both sides of the Weyl-van der Corput inequality for `seq = a(a+1), …, a(b)`:
///
/// `|Σ a(n)|² ≤ (1 + (b-a)/Q) Σ_{|r|≤Q} (1 - |r|/Q) Σ_{n, n+r ∈ (a,b]} a(n+r) conj(a(n))`.
pub fn wvdc_check(seq: &[Complex64], q: usize) -> Result<(f64, f64), ExpSumError> {
    if q == 0 {
        return Err(ExpSumError::BadArgument("Q must be a positive integer".into()));
    }
    let len = seq.len();
    let lhs = seq.iter().copied().collect::<ComplexSum>().value().norm_sqr();
    let mut total = ComplexSum::new();
    let qf = q as f64;
    for r in -(q as i64)..=(q as i64) {
        let weight = 1.0 - r.unsigned_abs() as f64 / qf;
        if weight == 0.0 {
            continue;
        }
        let shift = r.unsigned_abs() as usize;
        if shift >= len {
            continue;
        }
        let corr: ComplexSum = (0..len - shift)
            .map(|i| {
                if r >= 0 {
                    seq[i + shift] * seq[i].conj()
                } else {
                    seq[i] * seq[i + shift].conj()
                }
            })
            .collect();
        total.add(corr.value() * weight);
    }
    let rhs = (1.0 + len as f64 / qf) * total.value().re;
    if lhs > rhs + 1e-9 * rhs.abs() {
        return Err(ExpSumError::InequalityViolated { lhs, rhs });
    }
    Ok((lhs, rhs))
}

/// Integer range `(D₁, D₂]` with `D₁ = max{D, N₁/l, N₁/(l+q)}` and
/// `D₂ = min{2D, N₂/l, N₂/(l+q)}`, as `(⌊D₁⌋, ⌊D₂⌋)`.
pub fn differenced_range(l: u64, qshift: u64, big_d: f64, n1: u64, n2: u64) -> (u64, u64) {
    let lq = l + qshift;
    let d1 = (big_d.floor() as u64).max(n1 / l).max(n1 / lq);
    let d2 = ((2.0 * big_d).floor() as u64).min(n2 / l).min(n2 / lq);
    (d1, d2)
}

/// `Σ_{D₁<d≤D₂} e(g(d))` with `g(d) = f(d, l+q) - f(d, l)`.
///
/// `f(d, l)` is the prepared phase at `d·l`; the phase must be prepared for
/// running values up to `⌊2D⌋·(l+q)`.
pub fn differenced_phase_sum(
    phase: &PreparedPhase,
    l: u64,
    qshift: u64,
    big_d: f64,
    n1: u64,
    n2: u64,
) -> Result<Complex64, ExpSumError> {
    if l == 0 || !(big_d >= 1.0) || n1 >= n2 {
        return Err(ExpSumError::BadArgument(format!(
            "need l >= 1, D >= 1, N1 < N2 (got l={l}, D={big_d}, N1={n1}, N2={n2})"
        )));
    }
    let (d1, d2) = differenced_range(l, qshift, big_d, n1, n2);
    if d2 <= d1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let needed = d2 * (l + qshift);
    if needed > phase.max_running() {
        return Err(ExpSumError::BadArgument(format!(
            "phase prepared up to {} but {needed} is required",
            phase.max_running()
        )));
    }
    Ok(ordered_sum(0..(d2 - d1) as usize, |i| {
        let d = d1 + 1 + i as u64;
        e_turns(phase.turns(d * (l + qshift)) - phase.turns(d * l)).value()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diophantine::AlphaSpec;
    use crate::numerics::Rational;

    #[test]
    fn zero_phase_fails_hypothesis() {
        assert!(matches!(
            sargos_check(&PhaseSpec::Zero, 0, 10),
            Err(ExpSumError::HypothesisViolated(_))
        ));
    }

    #[test]
    fn cubic_monomial_lambda() {
        let r = sargos_check(&PhaseSpec::Monomial { sigma: 1e-6, k: 3 }, 0, 1000).unwrap();
        assert_eq!(r.meta("lambda").unwrap().parse::<f64>().unwrap(), 6e-6);
        assert!(r.ratio <= 4.0, "{}", r.ratio);
    }

    #[test]
    fn wide_bilinear_range_fails_spread() {
        let phase = PhaseSpec::Bilinear {
            alpha: AlphaSpec::Surd(2),
            h: 1,
            m: 1,
            gamma: Rational::new(19, 20),
            fixed: 3,
        };
        assert!(sargos_check(&phase, 10, 100).is_err());
        assert!(sargos_check(&phase, 100, 200).is_ok());
    }

    #[test]
    fn wvdc_constant_sequence() {
        let seq = vec![Complex64::new(1.0, 0.0); 50];
        let (lhs, rhs) = wvdc_check(&seq, 1).unwrap();
        assert_eq!(lhs, 2500.0);
        assert_eq!(rhs, 51.0 * 50.0);
    }

    #[test]
    fn wvdc_single_entry() {
        let mut seq = vec![Complex64::new(0.0, 0.0); 9];
        seq[4] = Complex64::new(0.6, -0.8);
        let (lhs, rhs) = wvdc_check(&seq, 3).unwrap();
        assert!((lhs - 1.0).abs() < 1e-15);
        assert!((rhs - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_shift_counts_points() {
        let phase = PhaseSpec::Monomial { sigma: 0.37, k: 2 }.prepare(10_000).unwrap();
        let s = differenced_phase_sum(&phase, 7, 0, 10.0, 50, 130).unwrap();
        let (d1, d2) = differenced_range(7, 0, 10.0, 50, 130);
        assert_eq!((d1, d2), (10, 18));
        assert!((s.re - 8.0).abs() < 1e-12 && s.im.abs() < 1e-12);
    }

    #[test]
    fn empty_differenced_range() {
        let phase = PhaseSpec::Zero.prepare(10_000).unwrap();
        let s = differenced_phase_sum(&phase, 50, 3, 100.0, 10, 20).unwrap();
        assert_eq!(s, Complex64::new(0.0, 0.0));
    }
}
