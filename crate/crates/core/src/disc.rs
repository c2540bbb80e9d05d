//! Points of the closed unit disc in gap/angle form.
//!
//! A point is stored as `gap = 1 - |z|` together with its argument. The
//! argument is split into an `angle` and a small `offset` so that boundary
//! nodes placed a distance `1e-20` away from a zero angle keep their exact
//! phase difference to that zero.
//!
//! All factor arithmetic here is written in a frame rotated by the zero's
//! angle, which keeps `1 - conj(w) z` and `w - z` free of cancellation when
//! both points sit close to the unit circle.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscPoint {
    /// `1 - |z|`; zero on the unit circle.
    pub gap: f64,
    pub angle: f64,
    /// Extra argument added to `angle`, kept separate for resolution.
    pub offset: f64,
}

impl DiscPoint {
    pub fn new(gap: f64, angle: f64) -> Self {
        DiscPoint {
            gap,
            angle,
            offset: 0.0,
        }
    }

    pub fn boundary(angle: f64) -> Self {
        DiscPoint::new(0.0, angle)
    }

    pub fn with_offset(gap: f64, angle: f64, offset: f64) -> Self {
        DiscPoint { gap, angle, offset }
    }

    /// Converts a Cartesian point. The gap is computed as `1 - |z|` and
    /// therefore loses relative accuracy for points very close to the circle.
    pub fn from_complex(z: Complex64) -> Self {
        let modulus = z.norm();
        let angle = if modulus == 0.0 { 0.0 } else { z.arg() };
        DiscPoint::new(1.0 - modulus, angle)
    }

    pub fn radius(&self) -> f64 {
        1.0 - self.gap
    }

    pub fn argument(&self) -> f64 {
        self.angle + self.offset
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.radius(), self.argument())
    }

    /// Argument of this point minus `angle`, reduced so that the offset
    /// survives at full relative precision.
    pub fn phase_from(&self, angle: f64) -> f64 {
        wrap_pi(self.angle - angle) + self.offset
    }
}

/// Reduces an angle to `(-pi, pi]`.
pub fn wrap_pi(x: f64) -> f64 {
    if x > -PI && x <= PI {
        return x;
    }
    let r = (x + PI).rem_euclid(TAU) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

/// Reduces an angle to `[0, 2pi)`.
pub fn wrap_tau(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// `1 - e^{i phi}` without cancellation for small `phi`.
#[inline]
pub(crate) fn one_minus_cis(phi: f64) -> Complex64 {
    let h = (0.5 * phi).sin();
    Complex64::new(2.0 * h * h, -phi.sin())
}

/// `1 - conj(w) z` for `w = (1 - e) e^{i a}` and `z = (1 - s) e^{i (a + phi)}`.
#[inline]
pub(crate) fn one_minus_conj_product(e: f64, s: f64, phi: f64) -> Complex64 {
    let g = e + s - e * s;
    one_minus_cis(phi) + Complex64::from_polar(g, phi)
}

/// `e^{-i a} (w - z)` for the same parametrization as [`one_minus_conj_product`].
#[inline]
pub(crate) fn rotated_difference(e: f64, s: f64, phi: f64) -> Complex64 {
    one_minus_cis(phi) + Complex64::new(-e, 0.0) + Complex64::from_polar(s, phi)
}

/// `1 - |w|^2` for `|w| = 1 - e`.
#[inline]
pub(crate) fn one_minus_modulus_sq(e: f64) -> f64 {
    e * (2.0 - e)
}

/// `|e^{i theta} - w|^2` for `|w| = 1 - e`, `phi = theta - arg w`.
#[inline]
pub(crate) fn boundary_distance_sq(e: f64, phi: f64) -> f64 {
    let h = (0.5 * phi).sin();
    e * e + 4.0 * (1.0 - e) * h * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn naive_one_minus(w: Complex64, z: Complex64) -> Complex64 {
        Complex64::new(1.0, 0.0) - w.conj() * z
    }

    #[test]
    fn stable_forms_agree_with_cartesian_away_from_boundary() {
        let (e, a) = (0.3, 1.1);
        let (s, t) = (0.45, -2.0);
        let w = Complex64::from_polar(1.0 - e, a);
        let z = Complex64::from_polar(1.0 - s, t);
        let phi = wrap_pi(t - a);
        let lhs = one_minus_conj_product(e, s, phi);
        let rhs = naive_one_minus(w, z);
        assert_relative_eq!(lhs.re, rhs.re, epsilon = 1e-14);
        assert_relative_eq!(lhs.im, rhs.im, epsilon = 1e-14);

        let diff = rotated_difference(e, s, phi) * Complex64::from_polar(1.0, a);
        let naive = w - z;
        assert_relative_eq!(diff.re, naive.re, epsilon = 1e-14);
        assert_relative_eq!(diff.im, naive.im, epsilon = 1e-14);
    }

    #[test]
    fn boundary_distance_matches_cartesian() {
        let (e, a, t) = (0.2_f64, 0.4_f64, 2.9_f64);
        let w = Complex64::from_polar(1.0 - e, a);
        let xi = Complex64::from_polar(1.0, t);
        assert_relative_eq!(boundary_distance_sq(e, t - a), (xi - w).norm_sqr(), epsilon = 1e-14);
    }

    #[test]
    fn tiny_gaps_keep_relative_precision() {
        // At e = 1e-20, 1 - conj(w) xi at phi = 0 is exactly e.
        let v = one_minus_conj_product(1e-20, 0.0, 0.0);
        assert_eq!(v, Complex64::new(1e-20, 0.0));
        let p = DiscPoint::with_offset(0.0, 2.0, 3e-22);
        assert_eq!(p.phase_from(2.0), 3e-22);
    }

    #[test]
    fn wrapping() {
        assert_eq!(wrap_pi(PI), PI);
        assert_relative_eq!(wrap_pi(-PI), PI);
        assert_relative_eq!(wrap_pi(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-15);
        assert_relative_eq!(wrap_tau(-0.5), TAU - 0.5, epsilon = 1e-15);
        assert_eq!(wrap_tau(0.0), 0.0);
    }
}
