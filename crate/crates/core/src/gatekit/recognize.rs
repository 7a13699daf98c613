//! Closed-form recognition of numerically computed angles and lengths.

use std::fmt;

use serde::{Deserialize, Serialize};

pub const DEFAULT_Q_MAX: i64 = 64;
pub const DEFAULT_RAT_TOL: f64 = 1e-8;
pub const DEFAULT_SURD_TOL: f64 = 1e-6;
pub const DEFAULT_COEFF_BOUND: i64 = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    pub p: i64,
    pub q: i64,
}

impl Rational {
    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

/// First continued-fraction convergent of `x` within `tol`, if its
/// denominator stays at or below `q_max`.
pub fn recognize_rational(x: f64, q_max: i64, tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i64;
        let h = a.checked_mul(h1)?.checked_add(h0)?;
        let k = a.checked_mul(k1)?.checked_add(k0)?;
        if k > q_max {
            return None;
        }
        if (x - h as f64 / k as f64).abs() <= tol {
            return Some(Rational { p: h, q: k });
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        let frac = rest - a as f64;
        if frac <= 0.0 {
            return None;
        }
        rest = 1.0 / frac;
    }
    None
}

/// `(a + b sqrt(d)) / den` with `d` squarefree; `b = 0` for rationals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadraticSurd {
    pub a: i64,
    pub b: i64,
    pub d: i64,
    pub den: i64,
    /// Integer relation `A x^2 + B x + C = 0` that produced the form.
    pub relation: [i64; 3],
}

impl QuadraticSurd {
    pub fn value(&self) -> f64 {
        (self.a as f64 + self.b as f64 * (self.d as f64).sqrt()) / self.den as f64
    }

    pub fn is_rational(&self) -> bool {
        self.b == 0
    }

    pub fn height(&self) -> i64 {
        self.relation.iter().map(|c| c.abs()).sum()
    }
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b == 0 {
            return write!(f, "{}", Rational { p: self.a, q: self.den });
        }
        let root = match self.b.abs() {
            1 => format!("sqrt({})", self.d),
            m => format!("{m}*sqrt({})", self.d),
        };
        let body = match (self.a, self.b < 0) {
            (0, false) => root,
            (0, true) => format!("-{root}"),
            (a, false) => format!("{a}+{root}"),
            (a, true) => format!("{a}-{root}"),
        };
        if self.den == 1 {
            write!(f, "{body}")
        } else if self.a == 0 {
            write!(f, "{body}/{}", self.den)
        } else {
            write!(f, "({body})/{}", self.den)
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Splits `n > 0` as `f^2 d` with `d` squarefree.
fn square_split(mut n: i64) -> (i64, i64) {
    let mut f = 1;
    let mut p = 2;
    while p * p <= n {
        while n % (p * p) == 0 {
            n /= p * p;
            f *= p;
        }
        p += 1;
    }
    (f, n)
}

/// Minimal-height integer relation `A x^2 + B x + C` with every coefficient
/// bounded by `bound` and residual at most `tol`, turned into a closed form.
pub fn recognize_quadratic_surd(x: f64, bound: i64, tol: f64) -> Option<QuadraticSurd> {
    if !x.is_finite() {
        return None;
    }
    let x2 = x * x;
    let mut best: Option<([i64; 3], i64)> = None;
    for a in 0..=bound {
        let limit = match best {
            Some((_, h)) if a >= h => break,
            Some((_, h)) => (h - a - 1).min(bound),
            None => bound,
        };
        let b_start = if a == 0 { 1 } else { -limit };
        for b in b_start..=limit {
            let v = a as f64 * x2 + b as f64 * x;
            let c = -v.round();
            if c.abs() > bound as f64 {
                continue;
            }
            let c = c as i64;
            let h = a + b.abs() + c.abs();
            if best.is_some_and(|(_, bh)| h >= bh) {
                continue;
            }
            if (v + c as f64).abs() <= tol {
                best = Some(([a, b, c], h));
            }
        }
    }
    let ([a, b, c], _) = best?;
    if a == 0 {
        let g = gcd(c, b);
        let (p, q) = (-c / g, b / g);
        return Some(QuadraticSurd { a: p, b: 0, d: 1, den: q, relation: [a, b, c] });
    }
    let disc = b * b - 4 * a * c;
    if disc < 0 {
        return None;
    }
    let (f, d) = square_split(disc);
    // choose the root nearest x
    let plus = (-(b as f64) + (disc as f64).sqrt()) / (2 * a) as f64;
    let minus = (-(b as f64) - (disc as f64).sqrt()) / (2 * a) as f64;
    let sign = if (plus - x).abs() <= (minus - x).abs() { 1 } else { -1 };
    let (mut num_a, mut num_b, mut den) = (-b, sign * f, 2 * a);
    if d == 1 {
        num_a += num_b;
        num_b = 0;
    }
    let g = gcd(gcd(num_a, num_b), den);
    num_a /= g;
    num_b /= g;
    den /= g;
    Some(QuadraticSurd { a: num_a, b: num_b, d, den, relation: [a, b, c] })
}
