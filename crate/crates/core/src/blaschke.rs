//! Finite Blaschke products.
//!
//! Each factor is evaluated in the frame rotated by its zero's argument, so
//! neither `z_n - z` nor `1 - conj(z_n) z` suffers cancellation when both
//! points are near the circle. The derivative uses the product rule with
//! prefix and suffix products, which stays exact at the zeros themselves.

use crate::disc::{boundary_distance_sq, one_minus_conj_product, one_minus_modulus_sq, rotated_difference, DiscPoint};
use crate::error::{Error, Result};
use crate::zeroseq::{Zero, ZeroSequence};
use num_complex::Complex64;

/// Largest number of factors a product may carry.
pub const MAX_FACTORS: usize = 10_000;

const POLE_GUARD: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    zeros: ZeroSequence,
    unimodular: Complex64,
}

impl BlaschkeProduct {
    pub fn new(zeros: ZeroSequence) -> Result<Self> {
        Self::with_constant(zeros, Complex64::new(1.0, 0.0))
    }

    pub fn with_constant(zeros: ZeroSequence, unimodular: Complex64) -> Result<Self> {
        if zeros.len() > MAX_FACTORS {
            return Err(Error::TooManyFactors {
                count: zeros.len(),
                max: MAX_FACTORS,
            });
        }
        if (unimodular.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("unimodular", "constant must have modulus 1"));
        }
        Ok(BlaschkeProduct { zeros, unimodular })
    }

    pub fn zeros(&self) -> &ZeroSequence {
        &self.zeros
    }

    pub fn unimodular(&self) -> Complex64 {
        self.unimodular
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        check_closed_disc(z)?;
        self.evaluate_at(&DiscPoint::from_complex(z))
    }

    pub fn evaluate_at(&self, p: &DiscPoint) -> Result<Complex64> {
        let mut acc = self.unimodular;
        for (index, zero) in self.zeros.entries().iter().enumerate() {
            acc *= factor(zero, p, index)?.value;
        }
        Ok(acc)
    }

    /// `log |B(p)|` as a sum of per-factor logarithms (no underflow for
    /// long products evaluated near the zeros).
    pub fn log_modulus_at(&self, p: &DiscPoint) -> Result<f64> {
        let mut acc = 0.0;
        for (index, zero) in self.zeros.entries().iter().enumerate() {
            if zero.is_origin() {
                acc += (-p.gap).ln_1p();
                continue;
            }
            let phi = p.phase_from(zero.theta);
            let den = one_minus_conj_product(zero.eps, p.gap, phi);
            let dn = den.norm();
            if dn < POLE_GUARD {
                return Err(Error::PoleProximity { index, distance: dn });
            }
            acc += rotated_difference(zero.eps, p.gap, phi).norm().ln() - dn.ln();
        }
        Ok(acc)
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        check_closed_disc(z)?;
        self.derivative_at(&DiscPoint::from_complex(z))
    }

    /// `B'(p)` by the product rule `sum_m b_m' prod_{n != m} b_n`.
    pub fn derivative_at(&self, p: &DiscPoint) -> Result<Complex64> {
        let factors = self
            .zeros
            .entries()
            .iter()
            .enumerate()
            .map(|(i, z)| factor(z, p, i))
            .collect::<Result<Vec<_>>>()?;
        // suffix[m] = prod_{n >= m} b_n
        let mut suffix = vec![Complex64::new(1.0, 0.0); factors.len() + 1];
        for (m, f) in factors.iter().enumerate().rev() {
            suffix[m] = suffix[m + 1] * f.value;
        }
        let mut prefix = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for (m, f) in factors.iter().enumerate() {
            sum += prefix * f.derivative * suffix[m + 1];
            prefix *= f.value;
        }
        Ok(self.unimodular * sum)
    }

    /// `|B'(e^{i theta})| = sum_n (1 - |z_n|^2) / |e^{i theta} - z_n|^2`.
    pub fn boundary_derivative_modulus(&self, theta: f64) -> f64 {
        self.boundary_derivative_modulus_at(&DiscPoint::boundary(theta))
    }

    /// Same as [`Self::boundary_derivative_modulus`]; the gap of `p` is ignored.
    pub fn boundary_derivative_modulus_at(&self, p: &DiscPoint) -> f64 {
        self.zeros
            .entries()
            .iter()
            .map(|z| {
                let phi = p.phase_from(z.theta);
                one_minus_modulus_sq(z.eps) / boundary_distance_sq(z.eps, phi)
            })
            .sum()
    }

    /// Boundary modulus of the derivative of `(B - a) / (1 - conj(a) B)`.
    pub fn frostman_shift_boundary(&self, a: Complex64, theta: f64) -> Result<f64> {
        self.frostman_shift_boundary_at(a, &DiscPoint::boundary(theta))
    }

    pub fn frostman_shift_boundary_at(&self, a: Complex64, p: &DiscPoint) -> Result<f64> {
        if a.norm() >= 1.0 {
            return Err(Error::invalid("a", "must lie in the open unit disc"));
        }
        let boundary = DiscPoint::with_offset(0.0, p.angle, p.offset);
        let modulus = self.boundary_derivative_modulus_at(&boundary);
        if a == Complex64::new(0.0, 0.0) {
            return Ok(modulus);
        }
        let b = self.evaluate_at(&boundary)?;
        let den = (Complex64::new(1.0, 0.0) - a.conj() * b).norm_sqr();
        Ok((1.0 - a.norm_sqr()) * modulus / den)
    }
}

fn check_closed_disc(z: Complex64) -> Result<()> {
    if z.norm() > 1.0 + 1e-12 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::invalid("z", "must lie in the closed unit disc"));
    }
    Ok(())
}

struct Factor {
    value: Complex64,
    derivative: Complex64,
}

/// `b(z) = (conj(w)/|w|) (w - z) / (1 - conj(w) z)` and its derivative, with
/// the convention `b(z) = -z` for `w = 0`.
fn factor(zero: &Zero, p: &DiscPoint, index: usize) -> Result<Factor> {
    if zero.is_origin() {
        return Ok(Factor {
            value: -p.to_complex(),
            derivative: Complex64::new(-1.0, 0.0),
        });
    }
    let phi = p.phase_from(zero.theta);
    let den = one_minus_conj_product(zero.eps, p.gap, phi);
    let dn = den.norm();
    if dn < POLE_GUARD {
        return Err(Error::PoleProximity { index, distance: dn });
    }
    let value = rotated_difference(zero.eps, p.gap, phi) / den;
    let derivative = Complex64::from_polar(-one_minus_modulus_sq(zero.eps), -zero.theta) / (den * den);
    Ok(Factor { value, derivative })
}
