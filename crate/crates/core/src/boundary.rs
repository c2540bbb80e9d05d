//! Quadrature on the unit circle and distribution statistics of boundary
//! samples.
//!
//! A [`BoundaryGrid`] is a uniform grid plus, for every zero, a nested set of
//! refinement windows centred at the zero's angle. The innermost window has
//! width `8 pi eps` and spacing `8 pi eps / refine_factor`; each further level
//! doubles both until the spacing reaches the base spacing. Weights are
//! midpoint-rule cells (half the distance between the two neighbours), which
//! partition the circle.
//!
//! Window nodes keep their position as `(anchor, offset)` with the anchor
//! equal to the zero's angle, so the offset from that zero is exact even at
//! gaps far below the resolution of an absolute angle near `2 pi`.

use crate::disc::{wrap_tau, DiscPoint};
use crate::error::{Error, Result};
use crate::zeroseq::ZeroSequence;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    /// Index of the zero whose window produced this node; `None` for base nodes.
    pub anchor_id: Option<u32>,
    /// Zero angle for window nodes, the node's own angle for base nodes.
    pub anchor: f64,
    pub offset: f64,
    /// `anchor + offset` reduced to `[0, 2pi)`.
    pub theta: f64,
    pub weight: f64,
}

impl BoundaryNode {
    pub fn point(&self) -> DiscPoint {
        DiscPoint::with_offset(0.0, self.anchor, self.offset)
    }

    /// The node pulled radially inward to `|z| = 1 - gap`.
    pub fn point_at_gap(&self, gap: f64) -> DiscPoint {
        DiscPoint::with_offset(gap, self.anchor, self.offset)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementWindow {
    pub center: f64,
    pub half_width: f64,
    /// Spacing in the innermost level.
    pub spacing: f64,
    pub levels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GridKind {
    Uniform {
        count: usize,
    },
    Stratified {
        base_count: usize,
        refine_factor: usize,
        windows: Vec<RefinementWindow>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGrid {
    nodes: Vec<BoundaryNode>,
    kind: GridKind,
}

pub const MIN_BASE_COUNT: usize = 64;

impl BoundaryGrid {
    /// `count` equally spaced nodes with weights `2 pi / count` (periodic
    /// trapezoidal rule).
    pub fn uniform(count: usize) -> Result<Self> {
        if count < MIN_BASE_COUNT {
            return Err(Error::invalid("base_count", "must be at least 64"));
        }
        let h = TAU / count as f64;
        let nodes = (0..count)
            .map(|i| {
                let theta = i as f64 * h;
                BoundaryNode {
                    anchor_id: None,
                    anchor: theta,
                    offset: 0.0,
                    theta,
                    weight: h,
                }
            })
            .collect();
        Ok(BoundaryGrid {
            nodes,
            kind: GridKind::Uniform { count },
        })
    }

    pub fn nodes(&self) -> &[BoundaryNode] {
        &self.nodes
    }

    pub fn kind(&self) -> &GridKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    /// Evaluates `f` at every node on the unit circle.
    pub fn sample<F: FnMut(&DiscPoint) -> f64>(&self, mut f: F) -> Vec<f64> {
        self.nodes.iter().map(|n| f(&n.point())).collect()
    }

    /// Fallible variant of [`Self::sample`].
    pub fn try_sample<F: FnMut(&DiscPoint) -> Result<f64>>(&self, mut f: F) -> Result<Vec<f64>> {
        self.nodes.iter().map(|n| f(&n.point())).collect()
    }

    /// `sum_i w_i g_i`.
    pub fn integrate(&self, samples: &[f64]) -> Result<f64> {
        check_aligned(self, samples)?;
        Ok(self.nodes.iter().zip(samples).map(|(n, g)| n.weight * g).sum())
    }
}

/// Uniform grid of `base_count` nodes refined around every zero of `zeros`.
pub fn make_grid(zeros: &ZeroSequence, base_count: usize, refine_factor: usize) -> Result<BoundaryGrid> {
    if base_count < MIN_BASE_COUNT {
        return Err(Error::invalid("base_count", "must be at least 64"));
    }
    if refine_factor < 2 {
        return Err(Error::invalid("refine_factor", "must be at least 2"));
    }
    if zeros.is_empty() {
        return BoundaryGrid::uniform(base_count);
    }
    let base_h = TAU / base_count as f64;
    let mut raw: Vec<BoundaryNode> = (0..base_count)
        .map(|i| {
            let theta = i as f64 * base_h;
            BoundaryNode {
                anchor_id: None,
                anchor: theta,
                offset: 0.0,
                theta,
                weight: 0.0,
            }
        })
        .collect();

    let mut windows = Vec::new();
    for (id, zero) in zeros.entries().iter().enumerate() {
        let mut half = 4.0 * PI * zero.eps;
        let mut h = 2.0 * half / refine_factor as f64;
        let spacing = h;
        let mut inner = -1.0_f64;
        let mut levels = 0;
        while h < base_h && inner < PI {
            let kmax = (half / h).round() as i64;
            for k in -kmax..=kmax {
                let offset = k as f64 * h;
                if offset.abs() <= inner || offset <= -PI || offset > PI {
                    continue;
                }
                raw.push(BoundaryNode {
                    anchor_id: Some(id as u32),
                    anchor: zero.theta,
                    offset,
                    theta: wrap_tau(zero.theta + offset),
                    weight: 0.0,
                });
            }
            levels += 1;
            inner = half;
            half *= 2.0;
            h *= 2.0;
        }
        if levels > 0 {
            windows.push(RefinementWindow {
                center: zero.theta,
                half_width: inner,
                spacing,
                levels,
            });
        }
    }

    // Nodes sharing an anchor value are ordered by offset even when their
    // absolute angles round to the same float.
    raw.sort_by(|a, b| {
        a.theta
            .total_cmp(&b.theta)
            .then(a.anchor.total_cmp(&b.anchor))
            .then(a.offset.total_cmp(&b.offset))
    });
    raw.dedup_by(|b, a| a.anchor == b.anchor && a.offset == b.offset);
    assign_midpoint_weights(&mut raw);

    Ok(BoundaryGrid {
        nodes: raw,
        kind: GridKind::Stratified {
            base_count,
            refine_factor,
            windows,
        },
    })
}

/// Angular distance from `a` to the next node `b`, measured through offsets
/// when both hang off the same anchor angle.
fn gap_between(a: &BoundaryNode, b: &BoundaryNode) -> f64 {
    if a.anchor == b.anchor {
        b.offset - a.offset
    } else {
        b.theta - a.theta
    }
}

fn assign_midpoint_weights(nodes: &mut [BoundaryNode]) {
    let n = nodes.len();
    let mut gaps = Vec::with_capacity(n);
    for i in 0..n - 1 {
        gaps.push(gap_between(&nodes[i], &nodes[i + 1]).max(0.0));
    }
    let (last, first) = (&nodes[n - 1], &nodes[0]);
    let wrap = if last.anchor == first.anchor {
        (first.offset - last.offset).rem_euclid(TAU)
    } else {
        first.theta + TAU - last.theta
    };
    gaps.push(wrap);
    for i in 0..n {
        let before = gaps[(i + n - 1) % n];
        nodes[i].weight = 0.5 * (before + gaps[i]);
    }
}

fn check_aligned(grid: &BoundaryGrid, samples: &[f64]) -> Result<()> {
    if samples.len() != grid.len() {
        return Err(Error::invalid(
            "samples",
            format!("{} samples for {} grid nodes", samples.len(), grid.len()),
        ));
    }
    Ok(())
}

/// Weak-type summary attached to a profile once an exponent is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakSummary {
    pub p: f64,
    /// `sup_lambda lambda^p m(lambda)` over the lambda grid.
    pub quasinorm: f64,
    pub argmax_lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionProfile {
    pub lambdas: Vec<f64>,
    /// `m(lambda)`: total weight of nodes with sample strictly above lambda.
    pub measures: Vec<f64>,
    pub weak: Option<WeakSummary>,
}

pub const DEFAULT_POINTS_PER_DECADE: usize = 200;

impl DistributionProfile {
    pub fn with_exponent(mut self, p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::invalid("p", "must be positive"));
        }
        let mut best = WeakSummary {
            p,
            quasinorm: 0.0,
            argmax_lambda: 0.0,
        };
        for (&l, &m) in self.lambdas.iter().zip(&self.measures) {
            let v = l.powf(p) * m;
            if v > best.quasinorm {
                best.quasinorm = v;
                best.argmax_lambda = l;
            }
        }
        self.weak = Some(best);
        Ok(self)
    }

    pub fn quasinorm(&self) -> Option<f64> {
        self.weak.map(|w| w.quasinorm)
    }

    /// `m` at an arbitrary level, interpolated by the step convention of the
    /// grid (the measure at the largest grid lambda not above `lambda`).
    pub fn measure_at(&self, lambda: f64) -> f64 {
        match self.lambdas.partition_point(|&l| l <= lambda) {
            0 => self.measures.first().copied().unwrap_or(0.0),
            i => self.measures[i - 1],
        }
    }

    /// CSV with columns `lambda,measure,lambda_times_measure_pow_p`. The last
    /// column uses `p = 1` when no exponent has been set.
    pub fn to_csv(&self) -> String {
        let p = self.weak.map_or(1.0, |w| w.p);
        let mut s = String::from("lambda,measure,lambda_times_measure_pow_p\n");
        for (&l, &m) in self.lambdas.iter().zip(&self.measures) {
            let _ = writeln!(s, "{:e},{:e},{:e}", l, m, l.powf(p) * m);
        }
        s
    }
}

/// Log-spaced levels `10^(j / points_per_decade)` covering `[lo, hi]` with one
/// extra level below `lo`.
pub fn log_lambda_grid(lo: f64, hi: f64, points_per_decade: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::invalid("lambda range", "need 0 < lo <= hi < inf"));
    }
    if points_per_decade == 0 {
        return Err(Error::invalid("points_per_decade", "must be positive"));
    }
    let ppd = points_per_decade as f64;
    let start = (lo.log10() * ppd).floor() as i64 - 1;
    let end = (hi.log10() * ppd).ceil() as i64;
    Ok((start..=end).map(|j| 10f64.powf(j as f64 / ppd)).collect())
}

/// Empirical distribution function `m(lambda) = |{theta : g > lambda}|`.
pub fn distribution(samples: &[f64], grid: &BoundaryGrid, lambdas: &[f64]) -> Result<DistributionProfile> {
    check_aligned(grid, samples)?;
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples[b].total_cmp(&samples[a]));
    let sorted: Vec<f64> = order.iter().map(|&i| samples[i]).collect();
    let mut cumulative = Vec::with_capacity(order.len());
    let mut acc = 0.0;
    for &i in &order {
        acc += grid.nodes[i].weight;
        cumulative.push(acc);
    }
    let measures = lambdas
        .iter()
        .map(|&l| match sorted.partition_point(|&v| v > l) {
            0 => 0.0,
            k => cumulative[k - 1],
        })
        .collect();
    Ok(DistributionProfile {
        lambdas: lambdas.to_vec(),
        measures,
        weak: None,
    })
}

/// Profile and `sup lambda^p m(lambda)` over a log grid spanning the samples.
pub fn weak_profile(
    samples: &[f64],
    grid: &BoundaryGrid,
    p: f64,
    points_per_decade: usize,
) -> Result<DistributionProfile> {
    if !(p > 0.0 && p <= 2.0) {
        return Err(Error::invalid("p", "must lie in (0, 2]"));
    }
    let (lo, hi) = samples
        .iter()
        .filter(|v| **v > 0.0)
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi == 0.0 {
        check_aligned(grid, samples)?;
        return DistributionProfile {
            lambdas: Vec::new(),
            measures: Vec::new(),
            weak: None,
        }
        .with_exponent(p);
    }
    let lambdas = log_lambda_grid(lo, hi, points_per_decade)?;
    distribution(samples, grid, &lambdas)?.with_exponent(p)
}

/// `sup_lambda lambda^p |{|g| > lambda}|` with the default level density.
pub fn weak_quasinorm(samples: &[f64], grid: &BoundaryGrid, p: f64) -> Result<f64> {
    Ok(weak_profile(samples, grid, p, DEFAULT_POINTS_PER_DECADE)?
        .quasinorm()
        .unwrap_or(0.0))
}

/// `(1/2pi sum_i w_i |g_i|^p)^(1/p)`.
pub fn hardy_quasinorm(samples: &[f64], grid: &BoundaryGrid, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("p", "must lie in (0, 1)"));
    }
    check_aligned(grid, samples)?;
    let mean: f64 = grid
        .nodes
        .iter()
        .zip(samples)
        .map(|(n, g)| n.weight * g.abs().powf(p))
        .sum::<f64>()
        / TAU;
    Ok(mean.powf(1.0 / p))
}
