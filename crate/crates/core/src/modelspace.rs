//! Finite combinations of normalized Szegő kernels at the zeros of a
//! Blaschke product,
//!
//! `f(z) = sum_k beta_k (1 - |z_k|)^{1/2} / (1 - conj(z_k) z)`,
//!
//! which span a dense subspace of the model space `(B H^2)^perp`.

use crate::blaschke::BlaschkeProduct;
use crate::boundary::{hardy_quasinorm, make_grid, weak_quasinorm, BoundaryGrid};
use crate::disc::{one_minus_conj_product, rotated_difference, DiscPoint};
use crate::error::{Error, Result};
use crate::zeroseq::{lag_ratios, ZeroSequence};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Minimum pseudo-hyperbolic distance between kernel points.
pub const MIN_SEPARATION: f64 = 1e-12;
/// Largest system [`interpolation_solve`] accepts.
pub const MAX_SYSTEM: usize = 64;
/// Condition estimate above which interpolation is refused.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct ModelFunction {
    zeros: ZeroSequence,
    coefficients: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawModel {
    zeros: ZeroSequence,
    /// `(re, im)` pairs.
    coefficients: Vec<(f64, f64)>,
}

impl TryFrom<RawModel> for ModelFunction {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        let coefficients = raw
            .coefficients
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        ModelFunction::new(raw.zeros, coefficients)
    }
}

impl From<ModelFunction> for RawModel {
    fn from(f: ModelFunction) -> Self {
        RawModel {
            zeros: f.zeros,
            coefficients: f.coefficients.iter().map(|c| (c.re, c.im)).collect(),
        }
    }
}

/// `rho(z_j, z_k) = |z_j - z_k| / |1 - conj(z_j) z_k|`.
pub fn pseudo_hyperbolic(zeros: &ZeroSequence, j: usize, k: usize) -> f64 {
    let (a, b) = (zeros.entries()[j], zeros.entries()[k]);
    let p = DiscPoint::new(b.eps, b.theta);
    let phi = p.phase_from(a.theta);
    rotated_difference(a.eps, b.eps, phi).norm() / one_minus_conj_product(a.eps, b.eps, phi).norm()
}

fn closest_pair(zeros: &ZeroSequence) -> Option<(usize, usize, f64)> {
    let n = zeros.len();
    let mut best: Option<(usize, usize, f64)> = None;
    for j in 0..n {
        for k in j + 1..n {
            let d = pseudo_hyperbolic(zeros, j, k);
            if best.is_none_or(|(_, _, b)| d < b) {
                best = Some((j, k, d));
            }
        }
    }
    best
}

/// Normalized Gram matrix `G_jk = sqrt(eps_j eps_k) / (1 - conj(z_j) z_k)`,
/// the inner products of the normalized kernels.
pub fn gram_matrix(zeros: &ZeroSequence) -> DMatrix<Complex64> {
    let z = zeros.entries();
    let n = z.len();
    DMatrix::from_fn(n, n, |j, k| {
        let p = DiscPoint::new(z[k].eps, z[k].theta);
        let den = one_minus_conj_product(z[j].eps, z[k].eps, p.phase_from(z[j].theta));
        Complex64::new((z[j].eps * z[k].eps).sqrt(), 0.0) / den
    })
}

impl ModelFunction {
    pub fn new(zeros: ZeroSequence, coefficients: Vec<Complex64>) -> Result<Self> {
        if zeros.len() != coefficients.len() {
            return Err(Error::invalid(
                "coefficients",
                format!("{} coefficients for {} zeros", coefficients.len(), zeros.len()),
            ));
        }
        if let Some((first, second, distance)) = closest_pair(&zeros) {
            if distance < MIN_SEPARATION {
                return Err(Error::NotSeparated {
                    first,
                    second,
                    distance,
                });
            }
        }
        Ok(ModelFunction { zeros, coefficients })
    }

    /// The normalized kernel at zero `index` of `zeros`.
    pub fn kernel(zeros: &ZeroSequence, index: usize) -> Result<Self> {
        let z = *zeros
            .entries()
            .get(index)
            .ok_or_else(|| Error::invalid("index", "out of range"))?;
        let single = ZeroSequence::new(vec![z], zeros.allow_origin())?;
        ModelFunction::new(single, vec![Complex64::new(1.0, 0.0)])
    }

    pub fn zeros(&self) -> &ZeroSequence {
        &self.zeros
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn scaled(&self, c: Complex64) -> ModelFunction {
        ModelFunction {
            zeros: self.zeros.clone(),
            coefficients: self.coefficients.iter().map(|b| b * c).collect(),
        }
    }

    pub fn evaluate_at(&self, p: &DiscPoint) -> Complex64 {
        self.zeros
            .entries()
            .iter()
            .zip(&self.coefficients)
            .map(|(z, beta)| {
                let den = one_minus_conj_product(z.eps, p.gap, p.phase_from(z.theta));
                beta * z.eps.sqrt() / den
            })
            .sum()
    }

    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.evaluate_at(&DiscPoint::from_complex(z))
    }

    /// `f'(p) = sum_k beta_k (1 - |z_k|)^{1/2} conj(z_k) / (1 - conj(z_k) p)^2`.
    pub fn derivative_at(&self, p: &DiscPoint) -> Complex64 {
        self.zeros
            .entries()
            .iter()
            .zip(&self.coefficients)
            .map(|(z, beta)| {
                let den = one_minus_conj_product(z.eps, p.gap, p.phase_from(z.theta));
                let conj_z = Complex64::from_polar(1.0 - z.eps, -z.theta);
                beta * z.eps.sqrt() * conj_z / (den * den)
            })
            .sum()
    }

    /// `f'(r e^{i theta})` for `0 < r <= 1`.
    pub fn derivative_boundary(&self, r: f64, theta: f64) -> Result<Complex64> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::RadiusOutOfRange(r));
        }
        Ok(self.derivative_at(&DiscPoint::new(1.0 - r, theta)))
    }

    /// `||f||_2` from the Gram matrix of the kernels (reproducing property).
    pub fn l2_norm(&self) -> Result<f64> {
        let n = self.coefficients.len();
        if n == 0 {
            return Ok(0.0);
        }
        let g = gram_matrix(&self.zeros);
        if n > 1 {
            let trace: f64 = (0..n).map(|i| g[(i, i)].re).sum();
            let smallest = g
                .clone()
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            if smallest < -1e-9 * trace {
                let (first, second, _) = closest_pair(&self.zeros).unwrap_or((0, 0, 0.0));
                return Err(Error::GramNotPsd {
                    smallest,
                    first,
                    second,
                });
            }
        }
        let beta = &self.coefficients;
        let mut sq = 0.0;
        for j in 0..n {
            for k in 0..n {
                sq += (beta[j] * beta[k].conj() * g[(j, k)]).re;
            }
        }
        Ok(sq.max(0.0).sqrt())
    }
}

/// Weak-`L^{2/3}` quasinorm of `|f'(r e^{i theta})| / ||f||_2` over `grid`.
pub fn weak23_statistic(f: &ModelFunction, r: f64, grid: &BoundaryGrid) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::RadiusOutOfRange(r));
    }
    let norm = f.l2_norm()?;
    if norm == 0.0 {
        return Err(Error::invalid("f", "has zero norm"));
    }
    let gap = 1.0 - r;
    let samples: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|n| f.derivative_at(&n.point_at_gap(gap)).norm() / norm)
        .collect();
    weak_quasinorm(&samples, grid, 2.0 / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClaimStatistic {
    /// `sup lambda^{2/3} |{|B' h| > lambda}|`.
    pub sup: f64,
    /// `||h||_2^{2/3}`.
    pub norm_pow: f64,
    /// `sup / norm_pow`.
    pub ratio: f64,
}

/// Weak-`L^{2/3}` statistic of `|B'(e^{i theta})| |h(e^{i theta})|`, with `h`
/// built on zeros of `b`.
pub fn claim_statistic(b: &BlaschkeProduct, h: &ModelFunction, grid: &BoundaryGrid) -> Result<ClaimStatistic> {
    for z in h.zeros().entries() {
        if !b.zeros().entries().iter().any(|w| w == z) {
            return Err(Error::invalid("h", "kernel point is not a zero of B"));
        }
    }
    let samples: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|n| {
            let p = n.point();
            b.boundary_derivative_modulus_at(&p) * h.evaluate_at(&p).norm()
        })
        .collect();
    let sup = weak_quasinorm(&samples, grid, 2.0 / 3.0)?;
    let norm_pow = h.l2_norm()?.powf(2.0 / 3.0);
    Ok(ClaimStatistic {
        sup,
        norm_pow,
        ratio: sup / norm_pow,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interpolant {
    pub function: ModelFunction,
    /// 2-norm condition number of the row-scaled system.
    pub condition: f64,
}

/// Finds `f` in the kernel span with `f(z_m) = w_m`.
///
/// Row `m` of the system is scaled by `(1 - |z_m|)^{1/2}`, which turns it
/// into the normalized Gram matrix; its condition number stays bounded for
/// separated sequences, unlike the raw system whose diagonal grows like
/// `eps^{-1/2}`.
pub fn interpolation_solve(zeros: &ZeroSequence, targets: &[Complex64]) -> Result<Interpolant> {
    let n = zeros.len();
    if n == 0 || n > MAX_SYSTEM {
        return Err(Error::invalid("zeros", format!("need 1..={MAX_SYSTEM} points")));
    }
    if targets.len() != n {
        return Err(Error::invalid("targets", "length differs from zeros"));
    }
    // validates separation
    ModelFunction::new(zeros.clone(), vec![Complex64::new(0.0, 0.0); n])?;
    let system = gram_matrix(zeros).transpose();
    let rhs = DVector::from_iterator(n, zeros.gaps().zip(targets).map(|(e, w)| w * e.sqrt()));
    let sv = system.clone().singular_values();
    let (smax, smin) = sv
        .iter()
        .fold((0.0_f64, f64::INFINITY), |(a, b), &s| (a.max(s), b.min(s)));
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let beta = system.lu().solve(&rhs).ok_or(Error::IllConditioned { condition })?;
    let function = ModelFunction::new(zeros.clone(), beta.iter().copied().collect())?;
    Ok(Interpolant { function, condition })
}

/// Target sequences for the divergence experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessWeight {
    /// `w_n = eps_n^{-1/2} / n`: square-summable against `eps`, but
    /// `sum |w_n|^{2/3} eps_n^{1/3} = sum n^{-2/3}` diverges.
    Divergent,
    /// `w_n = n^{-2}`: both sums converge.
    Control,
}

impl WitnessWeight {
    pub fn target(&self, n: usize, eps: f64) -> f64 {
        let n = n as f64;
        match self {
            WitnessWeight::Divergent => 1.0 / (eps.sqrt() * n),
            WitnessWeight::Control => 1.0 / (n * n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub m: usize,
    /// `H^{2/3}` quasinorm of the boundary values of `f_M'`.
    pub quasinorm: f64,
    pub condition: f64,
    /// `sum |w_n|^2 eps_n`.
    pub l2_sum: f64,
    /// `sum |w_n|^{2/3} eps_n^{1/3}`.
    pub weak_sum: f64,
}

pub const MAX_WITNESS_M: usize = 40;

/// For each `M`, interpolates the first `M` targets and records the
/// `H^{2/3}` quasinorm of the derivative of the interpolant.
pub fn divergence_witness(
    zeros: &ZeroSequence,
    m_list: &[usize],
    weight: WitnessWeight,
    base_count: usize,
    refine_factor: usize,
) -> Result<Vec<WitnessRow>> {
    if m_list.is_empty() || m_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("m_list", "must be nonempty and increasing"));
    }
    let top = *m_list.last().unwrap_or(&0);
    if m_list[0] == 0 || top > MAX_WITNESS_M || top > zeros.len() {
        return Err(Error::invalid(
            "m_list",
            format!("entries must lie in 1..={}", MAX_WITNESS_M.min(zeros.len())),
        ));
    }
    let eps: Vec<f64> = zeros.gaps().collect();
    if eps.len() > 1 && !lag_ratios(&eps).iter().any(|&a| a < 1.0) {
        return Err(Error::invalid("zeros", "not geometrically decaying"));
    }
    let mut rows = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let sub = zeros.truncate(m);
        let w: Vec<f64> = sub.gaps().enumerate().map(|(i, e)| weight.target(i + 1, e)).collect();
        let targets: Vec<Complex64> = w.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let interp = interpolation_solve(&sub, &targets)?;
        let grid = make_grid(&sub, base_count, refine_factor)?;
        let samples: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|n| interp.function.derivative_at(&n.point()).norm())
            .collect();
        let quasinorm = hardy_quasinorm(&samples, &grid, 2.0 / 3.0)?;
        let (l2_sum, weak_sum) = sub.gaps().zip(&w).fold((0.0, 0.0), |(a, b), (e, &v)| {
            (a + v * v * e, b + v.powf(2.0 / 3.0) * e.powf(1.0 / 3.0))
        });
        rows.push(WitnessRow {
            m,
            quasinorm,
            condition: interp.condition,
            l2_sum,
            weak_sum,
        });
    }
    Ok(rows)
}

/// `inf_n |B'(z_n)| (1 - |z_n|)`, positive for interpolating sequences.
pub fn interpolation_infimum(zeros: &ZeroSequence) -> Result<f64> {
    let b = BlaschkeProduct::new(zeros.clone())?;
    let mut best = f64::INFINITY;
    for z in zeros.entries() {
        let d = b.derivative_at(&DiscPoint::new(z.eps, z.theta))?;
        best = best.min(d.norm() * z.eps);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeroseq::{generate_geometric, AngleRule, Zero};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn origin_kernel(beta: Complex64) -> ModelFunction {
        let z = ZeroSequence::new(vec![Zero::new(1.0, 0.0)], true).unwrap();
        ModelFunction::new(z, vec![beta]).unwrap()
    }

    #[test]
    fn kernel_at_origin_is_constant() {
        let f = origin_kernel(c(3.0, -4.0));
        assert_relative_eq!(f.l2_norm().unwrap(), 5.0, epsilon = 1e-15);
        assert_eq!(f.evaluate(c(0.3, 0.2)), c(3.0, -4.0));
        assert_eq!(f.derivative_boundary(1.0, 0.7).unwrap(), c(0.0, 0.0));
        let g = BoundaryGrid::uniform(128).unwrap();
        assert_eq!(weak23_statistic(&f, 1.0, &g).unwrap(), 0.0);
    }

    #[test]
    fn kernel_at_half() {
        let z = ZeroSequence::from_parts(&[0.5], &[0.0]).unwrap();
        let f = ModelFunction::new(z, vec![c(1.0, 0.0)]).unwrap();
        assert_relative_eq!(f.l2_norm().unwrap(), (2.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        let d = f.derivative_boundary(1.0, 0.0).unwrap();
        assert_relative_eq!(d.norm(), 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn separation_enforced() {
        let z = ZeroSequence::from_parts(&[0.5, 0.5], &[1.0, 1.0]).unwrap();
        assert!(matches!(
            ModelFunction::new(z, vec![c(1.0, 0.0); 2]),
            Err(Error::NotSeparated { .. })
        ));
    }

    #[test]
    fn interpolation_single_origin() {
        let z = ZeroSequence::new(vec![Zero::new(1.0, 0.0)], true).unwrap();
        let r = interpolation_solve(&z, &[c(5.0, 0.0)]).unwrap();
        assert_relative_eq!(r.function.coefficients()[0].re, 5.0, epsilon = 1e-14);
        assert_relative_eq!(r.condition, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn interpolation_round_trip() {
        let z = ZeroSequence::from_parts(&[0.4, 0.1], &[0.5, 2.5]).unwrap();
        let beta = vec![c(1.0, -2.0), c(0.3, 0.7)];
        let f = ModelFunction::new(z.clone(), beta.clone()).unwrap();
        let w: Vec<Complex64> = z
            .entries()
            .iter()
            .map(|e| f.evaluate_at(&DiscPoint::new(e.eps, e.theta)))
            .collect();
        let r = interpolation_solve(&z, &w).unwrap();
        for (a, b) in r.function.coefficients().iter().zip(&beta) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn interpolation_rejects_oversize() {
        let z = generate_geometric(1.0, 0.9, 65, &AngleRule::Equispaced).unwrap();
        assert!(interpolation_solve(&z, &vec![c(1.0, 0.0); 65]).is_err());
    }

    #[test]
    fn ill_conditioned_system() {
        // two nearly coincident points: separated enough to build, not to solve
        let z = ZeroSequence::from_parts(&[0.5, 0.5], &[1.0, 1.0 + 1e-11]).unwrap();
        let r = interpolation_solve(&z, &[c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(matches!(r, Err(Error::IllConditioned { .. })), "{r:?}");
    }

    #[test]
    fn derivative_is_linear() {
        let z = generate_geometric(1.0, 0.25, 6, &AngleRule::UniformRandom { seed: 3 }).unwrap();
        let a = ModelFunction::new(z.clone(), (0..6).map(|i| c(i as f64, 1.0)).collect()).unwrap();
        let b = ModelFunction::new(z.clone(), (0..6).map(|i| c(-1.0, i as f64 * 0.5)).collect()).unwrap();
        let sum = ModelFunction::new(
            z,
            a.coefficients()
                .iter()
                .zip(b.coefficients())
                .map(|(x, y)| x + y)
                .collect(),
        )
        .unwrap();
        for t in [0.0, 1.3, 4.4] {
            let p = DiscPoint::boundary(t);
            let lhs = sum.derivative_at(&p);
            let rhs = a.derivative_at(&p) + b.derivative_at(&p);
            assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
        }
    }

    #[test]
    fn witness_rejects_bad_lists() {
        let z = generate_geometric(1.0, 0.25, 10, &AngleRule::Equispaced).unwrap();
        for list in [vec![], vec![5, 3], vec![0, 2], vec![5, 11]] {
            assert!(divergence_witness(&z, &list, WitnessWeight::Divergent, 256, 16).is_err());
        }
    }

    #[test]
    fn json_round_trip() {
        let z = ZeroSequence::from_parts(&[0.4, 0.1], &[0.5, 2.5]).unwrap();
        let f = ModelFunction::new(z, vec![c(1.0, -2.0), c(0.3, 0.7)]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"coefficients\":[[1.0,-2.0],[0.3,0.7]]"));
        let back: ModelFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
