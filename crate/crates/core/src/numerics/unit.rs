use std::f64::consts::TAU;
use std::ops::Mul;

use num_complex::Complex64;

use super::FixedReal;

/// A point on the unit circle, `e(x)` for some real `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitComplex(Complex64);

impl UnitComplex {
    pub const ONE: UnitComplex = UnitComplex(Complex64 { re: 1.0, im: 0.0 });

    /// `e(t)` for a turn count `t` already reduced into `[0, 1)` or `[-1/2, 1/2)`.
    pub fn from_turns(t: f64) -> Self {
        let centred = if t >= 0.5 { t - 1.0 } else { t };
        let (s, c) = (TAU * centred).sin_cos();
        UnitComplex(Complex64::new(c, s))
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }

    pub fn conj(&self) -> Self {
        UnitComplex(self.0.conj())
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }
}

impl From<UnitComplex> for Complex64 {
    fn from(u: UnitComplex) -> Self {
        u.0
    }
}

impl Mul for UnitComplex {
    type Output = UnitComplex;
    fn mul(self, rhs: UnitComplex) -> UnitComplex {
        UnitComplex(self.0 * rhs.0)
    }
}

impl Mul<f64> for UnitComplex {
    type Output = Complex64;
    fn mul(self, rhs: f64) -> Complex64 {
        self.0 * rhs
    }
}

/// `e(x) = exp(2πix)`, reducing `x` modulo one exactly before leaving fixed point.
pub fn e_of(x: &FixedReal) -> UnitComplex {
    UnitComplex::from_turns(x.centred_frac().to_f64())
}

/// `e(t)` for a binary64 turn count; reduces with `t - round(t)`.
pub fn e_turns(t: f64) -> UnitComplex {
    UnitComplex::from_turns(t - t.round())
}
