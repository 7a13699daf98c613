//! Scalar abstraction so the solver runs in double or double-double precision.

use std::fmt::Debug;
use std::ops::Neg;

use num_complex::Complex;
use super::dd::Dd;

pub trait Real: Copy + num_traits::Num + Neg<Output = Self> + PartialOrd + Debug + Send + Sync + 'static {
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn atan2(self, x: Self) -> Self;
    fn pi() -> Self;
    /// `(sin, cos)` of `p*pi/q`.
    fn sin_cos_pi_frac(p: i64, q: i64) -> (Self, Self);
    fn sin_cos(self) -> (Self, Self);
}

impl Real for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn sin_cos_pi_frac(p: i64, q: i64) -> (Self, Self) {
        (p as f64 * std::f64::consts::PI / q as f64).sin_cos()
    }
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
}

impl Real for Dd {
    fn from_f64(x: f64) -> Self {
        Dd::new(x)
    }
    fn to_f64(self) -> f64 {
        Dd::to_f64(self)
    }
    fn sqrt(self) -> Self {
        Dd::sqrt(self)
    }
    fn abs(self) -> Self {
        Dd::abs(self)
    }
    fn atan2(self, x: Self) -> Self {
        // f64 seed plus one tangent correction
        let t0 = Dd::new(self.to_f64().atan2(x.to_f64()));
        let (s, c) = dd_sin_cos(t0);
        t0 + (self * c - x * s) / (x * c + self * s)
    }
    fn pi() -> Self {
        Dd::pi()
    }
    fn sin_cos_pi_frac(p: i64, q: i64) -> (Self, Self) {
        dd_sin_cos(Dd::pi() * Dd::new(p as f64) / Dd::new(q as f64))
    }
    fn sin_cos(self) -> (Self, Self) {
        dd_sin_cos(self)
    }
}

/// Double-double sine and cosine by Taylor series after reduction to
/// `[-pi, pi]`, independent of any library trigonometry.
fn dd_sin_cos(x: Dd) -> (Dd, Dd) {
    let two_pi = Dd::pi() * Dd::new(2.0);
    let turns = (x.hi() / two_pi.hi()).round();
    let x = x - two_pi * Dd::new(turns);
    let (mut s, mut c) = (Dd::new(0.0), Dd::new(0.0));
    let mut term = Dd::new(1.0);
    for n in 0..60 {
        match n % 4 {
            0 => c += term,
            1 => s += term,
            2 => c -= term,
            _ => s -= term,
        }
        term = term * x / Dd::new((n + 1) as f64);
        if term.hi().abs() < 1e-40 {
            break;
        }
    }
    (s, c)
}

#[inline]
pub fn norm_sqr<R: Real>(z: Complex<R>) -> R {
    z.re * z.re + z.im * z.im
}

#[inline]
pub fn modulus<R: Real>(z: Complex<R>) -> R {
    norm_sqr(z).sqrt()
}

#[inline]
pub fn to_c64<R: Real>(z: Complex<R>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

#[inline]
pub fn from_c64<R: Real>(z: Complex<f64>) -> Complex<R> {
    Complex::new(R::from_f64(z.re), R::from_f64(z.im))
}
