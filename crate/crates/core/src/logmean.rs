//! Logarithmic means `T(r) = (1 / log r) (1 / 2pi) int log |B(r e^{i theta})| d theta`.
//!
//! By Jensen's formula `T(r)` equals the number of zeros in `|z| <= r` plus
//! `(1 / log r) sum_{|z_n| >= r} log |z_n|`, which is what [`t_exact`]
//! evaluates. [`t_quadrature`] integrates the definition directly and serves
//! as the independent check.

use crate::blaschke::BlaschkeProduct;
use crate::boundary::BoundaryGrid;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt::Write as _;

/// Shift applied to a radius that coincides with a zero modulus.
pub const COLLISION_NUDGE: f64 = 1e-12;

/// Closest a zero may sit to the integration contour in [`t_quadrature`].
pub const MIN_CONTOUR_DISTANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogMean {
    pub value: f64,
    /// Radius actually used, after any collision nudge.
    pub radius: f64,
    pub nudged: bool,
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::RadiusOutOfRange(r));
    }
    Ok(())
}

/// `log r` through `log1p` once `r >= 1/2`, where `r - 1` is exact.
fn log_radius(r: f64) -> f64 {
    if r >= 0.5 {
        (r - 1.0).ln_1p()
    } else {
        r.ln()
    }
}

/// `T(r)` from the zeros. A radius equal to some `|z_n|` is moved inward by
/// [`COLLISION_NUDGE`] (repeatedly, if needed) and the move is reported.
pub fn t_exact(b: &BlaschkeProduct, r: f64) -> Result<LogMean> {
    check_radius(r)?;
    let mut radius = r;
    let mut nudged = false;
    while b.zeros().gaps().any(|e| e == 1.0 - radius) {
        radius -= COLLISION_NUDGE;
        nudged = true;
        check_radius(radius)?;
    }
    let gap = 1.0 - radius;
    let log_r = log_radius(radius);
    let mut count = 0usize;
    let mut tail = 0.0;
    for e in b.zeros().gaps() {
        if e >= gap {
            count += 1;
        } else {
            tail += (-e).ln_1p();
        }
    }
    Ok(LogMean {
        value: count as f64 + tail / log_r,
        radius,
        nudged,
    })
}

/// `T(r)` by quadrature of `log |B(r e^{i theta})|` over `grid`.
///
/// The integrand is smooth and periodic, so a uniform grid gives spectral
/// accuracy; the node count needed grows like the inverse distance from the
/// contour to the nearest zero.
pub fn t_quadrature(b: &BlaschkeProduct, r: f64, grid: &BoundaryGrid) -> Result<f64> {
    check_radius(r)?;
    let gap = 1.0 - r;
    for (index, e) in b.zeros().gaps().enumerate() {
        let distance = (e - gap).abs();
        if distance < MIN_CONTOUR_DISTANCE {
            return Err(Error::ContourProximity { index, distance });
        }
    }
    let mut acc = 0.0;
    for node in grid.nodes() {
        acc += node.weight * b.log_modulus_at(&node.point_at_gap(gap))?;
    }
    Ok(acc / (TAU * log_radius(r)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogMeanCurve {
    pub radii: Vec<f64>,
    pub t_exact: Vec<f64>,
    pub t_quad: Option<Vec<f64>>,
    /// `(N, |T(1 - 2^{-N-1}) - T(1 - 2^{-N})|)` for `N = 1..=N_max`.
    pub increments: Vec<(u32, f64)>,
    pub max_increment: f64,
}

/// Deepest level for which `1 - 2^{-N-1}` is exactly representable.
pub const MAX_DYADIC_LEVEL: u32 = 51;

/// Dyadic increments of `T` at the radii `1 - 2^{-N}`, `N = 1..=n_max + 1`.
pub fn dyadic_increments(b: &BlaschkeProduct, n_max: u32) -> Result<LogMeanCurve> {
    if n_max == 0 || n_max > MAX_DYADIC_LEVEL {
        return Err(Error::invalid("n_max", format!("must lie in 1..={MAX_DYADIC_LEVEL}")));
    }
    let radii: Vec<f64> = (1..=n_max + 1).map(|n| 1.0 - 2f64.powi(-(n as i32))).collect();
    let t_exact = radii
        .iter()
        .map(|&r| t_exact(b, r).map(|t| t.value))
        .collect::<Result<Vec<_>>>()?;
    let increments: Vec<(u32, f64)> = t_exact
        .windows(2)
        .enumerate()
        .map(|(i, w)| (i as u32 + 1, (w[1] - w[0]).abs()))
        .collect();
    let max_increment = increments.iter().map(|&(_, v)| v).fold(0.0, f64::max);
    Ok(LogMeanCurve {
        radii,
        t_exact,
        t_quad: None,
        increments,
        max_increment,
    })
}

impl LogMeanCurve {
    /// Fills `t_quad` wherever the contour condition holds (`NaN` elsewhere).
    pub fn with_quadrature(mut self, b: &BlaschkeProduct, grid: &BoundaryGrid) -> Result<Self> {
        let mut out = Vec::with_capacity(self.radii.len());
        for &r in &self.radii {
            match t_quadrature(b, r, grid) {
                Ok(v) => out.push(v),
                Err(Error::ContourProximity { .. }) => out.push(f64::NAN),
                Err(e) => return Err(e),
            }
        }
        self.t_quad = Some(out);
        Ok(self)
    }

    pub fn increment(&self, n: u32) -> Option<f64> {
        self.increments.iter().find(|(k, _)| *k == n).map(|&(_, v)| v)
    }

    /// `r,t_exact,t_quad` (empty `t_quad` when not computed or not available).
    pub fn radii_csv(&self) -> String {
        let mut s = String::from("r,t_exact,t_quad\n");
        for (i, (&r, &t)) in self.radii.iter().zip(&self.t_exact).enumerate() {
            let q = self
                .t_quad
                .as_ref()
                .map(|q| q[i])
                .filter(|v| v.is_finite())
                .map(|v| format!("{v:e}"))
                .unwrap_or_default();
            let _ = writeln!(s, "{r:e},{t:e},{q}");
        }
        s
    }

    /// `N,increment`.
    pub fn increments_csv(&self) -> String {
        let mut s = String::from("N,increment\n");
        for &(n, v) in &self.increments {
            let _ = writeln!(s, "{n},{v:e}");
        }
        s
    }
}
