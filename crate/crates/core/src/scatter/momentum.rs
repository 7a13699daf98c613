use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MomentumError {
    #[error("momentum {p}/{q} pi is not strictly between 0 and pi")]
    OutOfRange { p: i64, q: i64 },
    #[error("cannot parse momentum {0:?}; expected p/q or p*pi/q")]
    Parse(String),
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Plane-wave momentum `k = p*pi/q`, `0 < k < pi`, stored in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Momentum {
    p: u32,
    q: u32,
}

impl Momentum {
    pub fn new(p: i64, q: i64) -> Result<Self, MomentumError> {
        if p <= 0 || q <= 0 || p >= q || q > u32::MAX as i64 {
            return Err(MomentumError::OutOfRange { p, q });
        }
        let (p, q) = (p as u32, q as u32);
        let g = gcd(p, q);
        Ok(Momentum { p: p / g, q: q / g })
    }

    /// `k = p*pi/q` for `q` in {2, 3, 4, 5}, `0 < p < q`.
    pub fn default_set() -> Vec<Momentum> {
        [(1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 5), (2, 5), (3, 5), (4, 5)]
            .iter()
            .map(|&(p, q)| Momentum::new(p, q).unwrap())
            .collect()
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn k(&self) -> f64 {
        self.p as f64 * std::f64::consts::PI / self.q as f64
    }

    pub fn cos(&self) -> f64 {
        self.k().cos()
    }

    pub fn sin(&self) -> f64 {
        self.k().sin()
    }

    /// `e^{ik}`.
    pub fn phase(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.k())
    }

    /// Tail eigenvalue `-2 cos k` of `H = -A`.
    pub fn energy(&self) -> f64 {
        -2.0 * self.cos()
    }
}

impl PartialOrd for Momentum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Momentum {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.p as u64 * other.q as u64)
            .cmp(&(other.p as u64 * self.q as u64))
            .then(self.q.cmp(&other.q))
    }
}

impl fmt::Display for Momentum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Momentum {
    type Err = MomentumError;

    /// Accepts `p/q` (in units of pi), `pi/q`, `p*pi/q`, `ppi/q` and `π` for `pi`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || MomentumError::Parse(s.to_string());
        let t: String = s.trim().replace('π', "pi").chars().filter(|c| !c.is_whitespace()).collect();
        let (num, den) = t.split_once('/').ok_or_else(err)?;
        let num = num.strip_suffix("pi").unwrap_or(num);
        let num = num.strip_suffix('*').unwrap_or(num);
        let p: i64 = if num.is_empty() { 1 } else { num.parse().map_err(|_| err())? };
        let q: i64 = den.parse().map_err(|_| err())?;
        Momentum::new(p, q)
    }
}

impl Serialize for Momentum {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Momentum {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
