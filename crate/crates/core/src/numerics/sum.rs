//! Compensated summation and the ordered parallel reduction used by every
//! sum evaluator.
//!
//! Work is split into chunks of [`REDUCTION_CHUNK`] consecutive indices.
//! Chunk boundaries do not depend on the thread pool, and partial sums are
//! combined left to right, so results are bit-identical for any worker count.

use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;

pub const REDUCTION_CHUNK: usize = 1024;

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        iter.into_iter().for_each(|v| s.add(v));
        s
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    pub fn merge(&mut self, other: &ComplexSum) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = ComplexSum::new();
        iter.into_iter().for_each(|v| s.add(v));
        s
    }
}

fn chunks(range: Range<usize>) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut lo = range.start;
    while lo < range.end {
        let hi = (lo + REDUCTION_CHUNK).min(range.end);
        out.push(lo..hi);
        lo = hi;
    }
    out
}

/// `Σ_{i ∈ range} term(i)` with compensated, ordered, data-parallel reduction.
pub fn ordered_sum<F>(range: Range<usize>, term: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    let partials: Vec<ComplexSum> = chunks(range)
        .into_par_iter()
        .map(|c| c.map(&term).collect())
        .collect();
    let mut total = ComplexSum::new();
    partials.iter().for_each(|p| total.merge(p));
    total.value()
}

/// Real-valued counterpart of [`ordered_sum`].
pub fn ordered_sum_real<F>(range: Range<usize>, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let partials: Vec<NeumaierSum> = chunks(range)
        .into_par_iter()
        .map(|c| c.map(&term).collect())
        .collect();
    let mut total = NeumaierSum::new();
    partials.iter().for_each(|p| total.merge(p));
    total.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_recovers_small_terms() {
        let mut s = NeumaierSum::new();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }

    #[test]
    fn reduction_independent_of_pool_size() {
        let term = |i: usize| Complex64::new((i as f64).sin() * 1e-3, 1.0 / (i as f64 + 1.0));
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| ordered_sum(0..50_000, term))
        };
        let a = run(1);
        let b = run(8);
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }

    #[test]
    fn empty_range_is_zero() {
        assert_eq!(ordered_sum(5..5, |_| Complex64::new(1.0, 1.0)), Complex64::new(0.0, 0.0));
    }
}
