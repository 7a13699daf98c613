//! Double-double scalar. Addition and multiplication come from `twofloat`;
//! division and square root are done here by residual correction because the
//! crate's own versions drop the low word.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{Num, One, Zero};
use twofloat::TwoFloat;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Dd(pub TwoFloat);

impl Dd {
    pub fn new(x: f64) -> Self {
        Dd(TwoFloat::from(x))
    }

    pub fn hi(self) -> f64 {
        self.0.hi()
    }

    pub fn lo(self) -> f64 {
        self.0.lo()
    }

    pub fn to_f64(self) -> f64 {
        self.0.hi() + self.0.lo()
    }

    pub fn abs(self) -> Self {
        if self.0.hi() < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Self {
        let x = self.to_f64();
        if x <= 0.0 {
            return Dd::new(0.0);
        }
        let y = Dd::new(x.sqrt());
        y + (self - y * y) / (Dd::new(2.0) * y)
    }

    pub fn pi() -> Self {
        Dd(twofloat::consts::PI)
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        Dd(self.0 + o.0)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        Dd(self.0 - o.0)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        Dd(self.0 * o.0)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let d = o.0.hi();
        let q1 = self.0.hi() / d;
        let r = self.0 - o.0 * TwoFloat::from(q1);
        let q2 = r.hi() / d;
        let r = r - o.0 * TwoFloat::from(q2);
        let q3 = r.hi() / d;
        Dd(TwoFloat::new_add(q1, q2) + TwoFloat::from(q3))
    }
}

impl Rem for Dd {
    type Output = Dd;
    fn rem(self, o: Dd) -> Dd {
        let q = (self / o).to_f64().trunc();
        self - o * Dd::new(q)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}

impl AddAssign for Dd {
    fn add_assign(&mut self, o: Dd) {
        *self = *self + o;
    }
}

impl SubAssign for Dd {
    fn sub_assign(&mut self, o: Dd) {
        *self = *self - o;
    }
}

impl MulAssign for Dd {
    fn mul_assign(&mut self, o: Dd) {
        *self = *self * o;
    }
}

impl Zero for Dd {
    fn zero() -> Self {
        Dd::new(0.0)
    }
    fn is_zero(&self) -> bool {
        self.0.hi() == 0.0 && self.0.lo() == 0.0
    }
}

impl One for Dd {
    fn one() -> Self {
        Dd::new(1.0)
    }
}

impl Num for Dd {
    type FromStrRadixErr = num_traits::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(s, radix).map(Dd::new)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_keeps_the_low_word() {
        let third = Dd::new(1.0) / Dd::new(3.0);
        let back = third * Dd::new(3.0) - Dd::new(1.0);
        assert!(back.to_f64().abs() < 1e-31, "{:e}", back.to_f64());
        let x = Dd::pi() / Dd::new(7.0);
        assert!((x * Dd::new(7.0) - Dd::pi()).to_f64().abs() < 1e-31);
    }

    #[test]
    fn square_root() {
        let r = Dd::new(2.0).sqrt();
        assert!((r * r - Dd::new(2.0)).to_f64().abs() < 1e-31);
        assert_eq!(Dd::new(0.0).sqrt(), Dd::new(0.0));
    }
}
