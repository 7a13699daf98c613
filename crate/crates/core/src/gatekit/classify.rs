use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mat2::Mat2;
use super::recognize::{recognize_rational, Rational};
use super::{GateError, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    Identity,
    Rotation,
}

/// Rotation angle as a multiple of pi, when a small-denominator fraction fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum AngleForm {
    RationalPi { p: i64, q: i64 },
    IrrationalCandidate,
}

/// A gate up to global phase: `exp(-i alpha/2 n.sigma)` with `n` on the
/// upper hemisphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateClass {
    /// Input operator with the phase chosen so the first nonzero entry in
    /// reading order is real and positive.
    pub representative: Mat2,
    pub kind: GateKind,
    /// Polar angle in `[0, pi/2]`.
    pub theta: f64,
    /// Azimuth in `(-pi, pi]`, restricted to `[0, pi)` on the equator.
    pub phi: f64,
    /// Rotation angle in `(-pi, pi]`.
    pub alpha: f64,
    pub angle_form: AngleForm,
}

impl GateClass {
    pub fn is_identity(&self) -> bool {
        self.kind == GateKind::Identity
    }

    /// Unit-determinant form `exp(-i alpha/2 n.sigma)`.
    pub fn su2(&self) -> Mat2 {
        Mat2::rotation(self.theta, self.phi, self.alpha)
    }

    pub fn axis(&self) -> [f64; 3] {
        [self.theta.sin() * self.phi.cos(), self.theta.sin() * self.phi.sin(), self.theta.cos()]
    }
}

/// `1 - |tr(U^dagger V)|/2 <= tol`.
pub fn equal_up_to_phase(u: &Mat2, v: &Mat2, tol: f64) -> bool {
    phase_distance(u, v) <= tol
}

pub fn phase_distance(u: &Mat2, v: &Mat2) -> f64 {
    1.0 - (u.adjoint() * *v).trace().norm() / 2.0
}

/// Scales by a phase so the first entry of modulus above `tol` is real positive.
pub fn fix_phase(m: &Mat2, tol: f64) -> Mat2 {
    match m.entries().iter().find(|z| z.norm() > tol) {
        Some(z) => m.scale(z.conj() / z.norm()),
        None => *m,
    }
}

/// Axis-angle decomposition of a unitary, up to global phase.
pub fn classify_matrix(o: &Mat2, tol: &Tolerances) -> Result<GateClass, GateError> {
    if !o.is_finite() {
        return Err(GateError::NonUnitary(f64::NAN));
    }
    let defect = o.unitarity_defect();
    if defect > tol.gate {
        return Err(GateError::NonUnitary(defect));
    }
    let representative = fix_phase(o, 1e-6);
    let root = o.det().sqrt();
    let mut u = o.scale(root.inv());
    let mut c = (u.get(0, 0) + u.get(1, 1)).re / 2.0;
    if c < 0.0 {
        u = u.scale(Complex64::new(-1.0, 0.0));
        c = -c;
    }
    let (u00, u01, u10, u11) = (u.get(0, 0), u.get(0, 1), u.get(1, 0), u.get(1, 1));
    let mut sn = [-(u01.im + u10.im) / 2.0, (u10.re - u01.re) / 2.0, (u11.im - u00.im) / 2.0];
    let s = (sn[0] * sn[0] + sn[1] * sn[1] + sn[2] * sn[2]).sqrt();
    let half = s.atan2(c.min(1.0));
    if (u.trace().norm() / 2.0) >= 1.0 - tol.gate || s == 0.0 {
        return Ok(GateClass {
            representative,
            kind: GateKind::Identity,
            theta: 0.0,
            phi: 0.0,
            alpha: 0.0,
            angle_form: AngleForm::RationalPi { p: 0, q: 1 },
        });
    }
    for x in &mut sn {
        *x /= s;
    }
    let mut alpha = 2.0 * half;
    let mut n = sn;
    let flip = if n[2].abs() <= tol.axis {
        // on the equator keep the azimuth in [0, pi)
        n[2] = 0.0;
        let phi = n[1].atan2(n[0]);
        phi < -tol.axis || phi > PI - tol.axis
    } else {
        n[2] < 0.0
    };
    if flip {
        n = n.map(|x| -x);
        // a half turn is its own inverse up to phase
        if (alpha - PI).abs() > tol.axis {
            alpha = -alpha;
        }
    }
    let theta = n[2].clamp(-1.0, 1.0).acos();
    let mut phi = if n[0].hypot(n[1]) <= tol.axis { 0.0 } else { n[1].atan2(n[0]) };
    if phi.abs() <= tol.axis {
        phi = 0.0;
    }
    let angle_form = match recognize_rational(alpha / PI, tol.q_max, tol.rational) {
        Some(Rational { p, q }) => AngleForm::RationalPi { p, q },
        None => AngleForm::IrrationalCandidate,
    };
    Ok(GateClass {
        representative,
        kind: GateKind::Rotation,
        theta,
        phi,
        alpha,
        angle_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_phase_gate() {
        let g = classify_matrix(&Mat2::diag(c(1.0, 0.0), c(0.0, -1.0)), &tol()).unwrap();
        assert_eq!(g.kind, GateKind::Rotation);
        assert!(g.theta.abs() < 1e-12);
        assert!((g.alpha + FRAC_PI_2).abs() < 1e-12);
        assert_eq!(g.angle_form, AngleForm::RationalPi { p: -1, q: 2 });
    }

    #[test]
    fn identity_and_paulis() {
        let id = classify_matrix(&Mat2::identity().scale(c(0.0, 1.0)), &tol()).unwrap();
        assert!(id.is_identity());
        let x = classify_matrix(&Mat2::pauli_x(), &tol()).unwrap();
        assert!((x.theta - FRAC_PI_2).abs() < 1e-12 && x.phi.abs() < 1e-12);
        assert!((x.alpha - PI).abs() < 1e-12);
        let y = classify_matrix(&Mat2::pauli_y(), &tol()).unwrap();
        assert!((y.phi - FRAC_PI_2).abs() < 1e-12 && (y.alpha - PI).abs() < 1e-12);
        let z = classify_matrix(&Mat2::pauli_z(), &tol()).unwrap();
        assert!(z.theta.abs() < 1e-12 && (z.alpha - PI).abs() < 1e-12);
        let minus_x = classify_matrix(&Mat2::rx(-FRAC_PI_2), &tol()).unwrap();
        assert!((minus_x.alpha + FRAC_PI_2).abs() < 1e-12 && minus_x.phi.abs() < 1e-12);
    }

    #[test]
    fn equatorial_pi_rotations_use_half_turn_azimuths() {
        for p in 1..8 {
            let phi = p as f64 * PI / 8.0;
            for sign in [1.0, -1.0] {
                let g = classify_matrix(&Mat2::rotation(FRAC_PI_2, sign * phi, PI), &tol()).unwrap();
                let expect = if sign > 0.0 { phi } else { PI - phi };
                assert!((g.phi - expect).abs() < 1e-12, "p={p} sign={sign} phi={}", g.phi);
                assert!((g.alpha - PI).abs() < 1e-12);
            }
        }
        let g = classify_matrix(&Mat2::rotation(FRAC_PI_2, FRAC_PI_4, -0.5), &tol()).unwrap();
        assert!((g.phi - FRAC_PI_4).abs() < 1e-12 && (g.alpha + 0.5).abs() < 1e-12);
        let g = classify_matrix(&Mat2::rotation(FRAC_PI_2, -FRAC_PI_4, 0.5), &tol()).unwrap();
        assert!((g.phi - 3.0 * FRAC_PI_4).abs() < 1e-12 && (g.alpha + 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_unitary() {
        let m = Mat2::diag(c(1.0, 0.0), c(0.5, 0.0));
        assert!(matches!(classify_matrix(&m, &tol()), Err(GateError::NonUnitary(_))));
    }

    #[test]
    fn phase_equivalence() {
        let u = Mat2::rotation(0.4, 1.0, 2.0);
        assert!(equal_up_to_phase(&u, &u.scale(Complex64::from_polar(1.0, PI / 7.0)), 1e-9));
        assert!(!equal_up_to_phase(&Mat2::identity(), &Mat2::pauli_x(), 1e-9));
        // X R X is the rotation about (theta, pi - phi) by -alpha
        for phi in [0.3, 1.2, -2.0] {
            let r = Mat2::rotation(0.8, phi, 1.1);
            assert!(!equal_up_to_phase(&r, &r.conj_x(), 1e-9));
        }
        // equatorial axes at azimuth 0 commute with X
        let r = Mat2::rotation(FRAC_PI_2, 0.0, 1.1);
        assert!(equal_up_to_phase(&r, &r.conj_x(), 1e-9));
    }

    fn axis_strategy() -> impl Strategy<Value = (f64, f64, f64)> {
        (0.0f64..PI, -PI..PI, -3.1f64..3.1)
    }

    proptest! {
        #[test]
        fn class_ignores_global_phase((theta, phi, alpha) in axis_strategy(), gamma in -PI..PI) {
            let u = Mat2::rotation(theta, phi, alpha);
            let a = classify_matrix(&u, &tol()).unwrap();
            let b = classify_matrix(&u.scale(Complex64::from_polar(1.0, gamma)), &tol()).unwrap();
            prop_assert_eq!(a.kind, b.kind);
            prop_assert!((a.theta - b.theta).abs() < 1e-9);
            prop_assert!((a.phi - b.phi).abs() < 1e-9);
            prop_assert!((a.alpha - b.alpha).abs() < 1e-9);
            prop_assert!((a.representative - b.representative).max_abs() < 1e-12);
        }

        #[test]
        fn class_reconstructs_the_gate((theta, phi, alpha) in axis_strategy()) {
            let u = Mat2::rotation(theta, phi, alpha);
            let g = classify_matrix(&u, &tol()).unwrap();
            prop_assert!(g.theta <= FRAC_PI_2 + 1e-12);
            prop_assert!(g.alpha > -PI && g.alpha <= PI + 1e-12);
            prop_assert!(equal_up_to_phase(&g.su2(), &u, 1e-12));
        }

        #[test]
        fn transpose_reflects_azimuth((theta, phi, alpha) in axis_strategy()) {
            let u = Mat2::rotation(theta, phi, alpha);
            prop_assume!(alpha.abs() > 1e-3);
            let g = classify_matrix(&u, &tol()).unwrap();
            let t = classify_matrix(&u.transpose(), &tol()).unwrap();
            let x = classify_matrix(&u.conj_x(), &tol()).unwrap();
            prop_assert!(equal_up_to_phase(&t.su2(), &Mat2::rotation(g.theta, -g.phi, g.alpha), 1e-12));
            prop_assert!(equal_up_to_phase(&x.su2(), &Mat2::rotation(g.theta, PI - g.phi, -g.alpha), 1e-12));
        }
    }
}
