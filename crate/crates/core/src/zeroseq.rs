//! Zero sequences of Blaschke products.
//!
//! Zeros are stored as `(eps, theta)` with `eps = 1 - |z|`, ordered by
//! nondecreasing modulus. Keeping the gap instead of the Cartesian point
//! lets gaps down to `2^-500` be represented without loss.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;

/// Smallest gap accepted anywhere in the crate.
pub const MIN_GAP: f64 = 3.054936363499605e-151; // 2^-500

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Zero {
    /// `1 - |z|`.
    pub eps: f64,
    pub theta: f64,
}

impl Zero {
    pub fn new(eps: f64, theta: f64) -> Self {
        Zero { eps, theta }
    }

    pub fn modulus(&self) -> f64 {
        1.0 - self.eps
    }

    pub fn is_origin(&self) -> bool {
        self.eps == 1.0
    }

    pub fn to_complex(&self) -> num_complex::Complex64 {
        num_complex::Complex64::from_polar(self.modulus(), self.theta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSequence", into = "RawSequence")]
pub struct ZeroSequence {
    entries: Vec<Zero>,
    allow_origin: bool,
    gap_sum: f64,
}

#[derive(Serialize, Deserialize)]
struct RawSequence {
    zeros: Vec<Zero>,
    #[serde(default)]
    allow_origin: bool,
}

impl TryFrom<RawSequence> for ZeroSequence {
    type Error = Error;

    fn try_from(raw: RawSequence) -> Result<Self> {
        ZeroSequence::new(raw.zeros, raw.allow_origin)
    }
}

impl From<ZeroSequence> for RawSequence {
    fn from(seq: ZeroSequence) -> Self {
        RawSequence {
            zeros: seq.entries,
            allow_origin: seq.allow_origin,
        }
    }
}

impl ZeroSequence {
    /// Validates and stores a zero list. Angles are reduced to `[0, 2pi)`.
    ///
    /// `eps = 1` (a zero at the origin) is rejected unless `allow_origin`.
    pub fn new(entries: Vec<Zero>, allow_origin: bool) -> Result<Self> {
        let mut out = Vec::with_capacity(entries.len());
        let mut gap_sum = 0.0;
        for (index, z) in entries.into_iter().enumerate() {
            let upper_ok = z.eps < 1.0 || (allow_origin && z.eps == 1.0);
            if !(z.eps > 0.0 && upper_ok) || !z.theta.is_finite() {
                return Err(Error::ZeroOutsideDisc { index, eps: z.eps });
            }
            if z.eps < MIN_GAP {
                return Err(Error::Underflow { index, eps: z.eps });
            }
            if let Some(prev) = out.last() {
                let prev: &Zero = prev;
                if z.eps > prev.eps {
                    return Err(Error::NotOrdered { index });
                }
            }
            gap_sum += z.eps;
            let theta = if z.is_origin() {
                0.0
            } else {
                crate::disc::wrap_tau(z.theta)
            };
            out.push(Zero::new(z.eps, theta));
        }
        Ok(ZeroSequence {
            entries: out,
            allow_origin,
            gap_sum,
        })
    }

    pub fn empty() -> Self {
        ZeroSequence {
            entries: Vec::new(),
            allow_origin: false,
            gap_sum: 0.0,
        }
    }

    /// Builds a sequence from gaps and angles of equal length.
    pub fn from_parts(eps: &[f64], theta: &[f64]) -> Result<Self> {
        if eps.len() != theta.len() {
            return Err(Error::invalid("theta", "length differs from eps"));
        }
        let entries = eps.iter().zip(theta).map(|(&e, &t)| Zero::new(e, t)).collect();
        ZeroSequence::new(entries, false)
    }

    pub fn entries(&self) -> &[Zero] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn allow_origin(&self) -> bool {
        self.allow_origin
    }

    /// Blaschke sum `sum_n (1 - |z_n|)`.
    pub fn gap_sum(&self) -> f64 {
        self.gap_sum
    }

    pub fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|z| z.eps)
    }

    /// The first `n` zeros (all of them if `n` exceeds the length).
    pub fn truncate(&self, n: usize) -> ZeroSequence {
        let entries: Vec<Zero> = self.entries.iter().take(n).copied().collect();
        let gap_sum = entries.iter().map(|z| z.eps).sum();
        ZeroSequence {
            entries,
            allow_origin: self.allow_origin,
            gap_sum,
        }
    }

    /// One `eps theta` pair per line, shortest round-trip decimal form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for z in &self.entries {
            let _ = writeln!(s, "{} {}", z.eps, z.theta);
        }
        s
    }

    /// Parses the line format written by [`ZeroSequence::to_text`]. Blank
    /// lines and lines starting with `#` are skipped.
    pub fn from_text(text: &str, allow_origin: bool) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let mut next = |what: &str| -> Result<f64> {
                let tok = parts.next().ok_or_else(|| Error::Parse {
                    line: i + 1,
                    message: format!("missing {what}"),
                })?;
                tok.parse::<f64>().map_err(|e| Error::Parse {
                    line: i + 1,
                    message: format!("bad {what} `{tok}`: {e}"),
                })
            };
            let eps = next("eps")?;
            let theta = next("theta")?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "expected exactly two columns".into(),
                });
            }
            entries.push(Zero::new(eps, theta));
        }
        ZeroSequence::new(entries, allow_origin)
    }
}

/// How generators assign arguments to zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum AngleRule {
    UniformRandom {
        seed: u64,
    },
    /// `theta_n = 2 pi (n - 1) / count`.
    Equispaced,
    Fixed {
        angles: Vec<f64>,
    },
}

impl AngleRule {
    fn angles(&self, count: usize) -> Result<Vec<f64>> {
        match self {
            AngleRule::UniformRandom { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..count).map(|_| rng.random_range(0.0..TAU)).collect())
            }
            AngleRule::Equispaced => Ok((0..count).map(|n| TAU * n as f64 / count as f64).collect()),
            AngleRule::Fixed { angles } => {
                if angles.len() != count {
                    return Err(Error::invalid(
                        "angles",
                        format!("fixed list has {} entries, need {count}", angles.len()),
                    ));
                }
                Ok(angles.clone())
            }
        }
    }
}

/// Zeros with gaps `eps_n = c * delta^n`, `n = 1..=count`.
pub fn generate_geometric(c: f64, delta: f64, count: usize, angles: &AngleRule) -> Result<ZeroSequence> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid("c", "must be positive"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta", "must lie in (0, 1)"));
    }
    if c * delta >= 1.0 {
        return Err(Error::ZeroOutsideDisc {
            index: 0,
            eps: c * delta,
        });
    }
    if count == 0 {
        return Err(Error::invalid("count", "must be at least 1"));
    }
    let deepest_log2 = c.log2() + count as f64 * delta.log2();
    if deepest_log2 < -500.0 {
        return Err(Error::Underflow {
            index: count - 1,
            eps: deepest_log2.exp2(),
        });
    }
    let theta = angles.angles(count)?;
    let eps: Vec<f64> = (1..=count).map(|n| c * delta.powi(n as i32)).collect();
    ZeroSequence::from_parts(&eps, &theta)
}

/// Zeros with gaps `eps_n = (n + 1)^-q`, `n = 1..=count`.
///
/// The index is shifted by one so that the first zero is not at the origin.
pub fn generate_power(q: f64, count: usize, angles: &AngleRule) -> Result<ZeroSequence> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(Error::invalid("q", "must exceed 1 for a Blaschke sequence"));
    }
    if count == 0 {
        return Err(Error::invalid("count", "must be at least 1"));
    }
    if -q * ((count + 1) as f64).log2() < -500.0 {
        return Err(Error::Underflow {
            index: count - 1,
            eps: ((count + 1) as f64).powf(-q),
        });
    }
    let theta = angles.angles(count)?;
    let eps: Vec<f64> = (1..=count).map(|n| ((n + 1) as f64).powf(-q)).collect();
    ZeroSequence::from_parts(&eps, &theta)
}

/// Zero counts per dyadic annulus `2^-k-1 <= eps <= 2^-k`.
///
/// Annuli are closed at both ends, so a gap that is an exact power of two is
/// counted in both adjacent annuli. This can double `max_count` at most.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicCensus {
    pub counts: BTreeMap<u32, usize>,
    pub max_count: usize,
}

impl DyadicCensus {
    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }

    pub fn count(&self, k: u32) -> usize {
        self.counts.get(&k).copied().unwrap_or(0)
    }
}

/// Index `k` with `2^-k-1 <= eps < 2^-k`, plus whether `eps` is exactly `2^-k-1`.
fn dyadic_index(eps: f64) -> (u32, bool) {
    let mut k = (-eps.log2()).floor().max(0.0) as i32;
    // log2 may be off by one ulp near powers of two; settle it exactly.
    while k > 0 && eps >= 2f64.powi(-k) {
        k -= 1;
    }
    while eps < 2f64.powi(-k - 1) {
        k += 1;
    }
    (k as u32, eps == 2f64.powi(-k - 1))
}

pub fn dyadic_census(seq: &ZeroSequence) -> Result<DyadicCensus> {
    if seq.is_empty() {
        return Err(Error::invalid("seq", "census of an empty sequence"));
    }
    let mut counts = BTreeMap::new();
    for eps in seq.gaps() {
        let (k, on_edge) = dyadic_index(eps);
        // eps = 1 sits on the upper edge of annulus 0 only.
        *counts.entry(k).or_insert(0) += 1;
        if on_edge {
            *counts.entry(k + 1).or_insert(0) += 1;
        }
    }
    let max_count = counts.values().copied().max().unwrap_or(0);
    Ok(DyadicCensus { counts, max_count })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentialCheck {
    pub is_exponential: bool,
    pub max_observed: usize,
}

/// Compares the largest dyadic annulus population against `bound`.
///
/// Every finite sequence is exponential, so without a bound the flag is
/// always set and only `max_observed` carries information.
pub fn is_exponential(seq: &ZeroSequence, bound: Option<usize>) -> Result<ExponentialCheck> {
    let census = dyadic_census(seq)?;
    Ok(ExponentialCheck {
        is_exponential: bound.is_none_or(|m| census.max_count <= m),
        max_observed: census.max_count,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricEnvelope {
    pub c: f64,
    pub delta: f64,
    /// `alpha(K) = max_n eps_{n+K} / eps_n` for `K = 1, 2, ...`.
    pub lag_ratios: Vec<f64>,
}

impl GeometricEnvelope {
    /// Smallest lag with ratio below one.
    pub fn contracting_lag(&self) -> Option<usize> {
        self.lag_ratios.iter().position(|&a| a < 1.0).map(|i| i + 1)
    }
}

pub const MAX_LAG: usize = 10;

pub(crate) fn lag_ratios(eps: &[f64]) -> Vec<f64> {
    let max_k = MAX_LAG.min(eps.len().saturating_sub(1));
    (1..=max_k)
        .map(|k| eps.windows(k + 1).map(|w| w[k] / w[0]).fold(0.0, f64::max))
        .collect()
}

/// Fits `eps_n <= c delta^n` anchored at the first zero.
///
/// `delta = max_{n >= 2} (eps_n / eps_1)^(1 / (n - 1))` is the smallest ratio
/// for which the envelope through `eps_1` dominates every later gap; for a
/// sequence that keeps decaying geometrically it converges to the true ratio,
/// and it creeps towards one for slower decay.
pub fn fit_geometric_envelope(seq: &ZeroSequence) -> Result<GeometricEnvelope> {
    if seq.len() < 2 {
        return Err(Error::invalid("seq", "need at least two zeros"));
    }
    let eps: Vec<f64> = seq.gaps().collect();
    let first = eps[0];
    let delta = eps
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &e)| (e / first).powf(1.0 / i as f64))
        .fold(0.0, f64::max);
    let c = eps
        .iter()
        .enumerate()
        .map(|(i, &e)| e / delta.powi(i as i32 + 1))
        .fold(0.0, f64::max)
        * (1.0 + 4.0 * f64::EPSILON);
    Ok(GeometricEnvelope {
        c,
        delta,
        lag_ratios: lag_ratios(&eps),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Result {
    pub exponents: Vec<u32>,
    /// `sum_k 2^{n_k} eps_k`.
    pub s_c: f64,
    /// `sum_k 2^{-2 n_k} / eps_k`.
    pub s_d: f64,
    pub mu: f64,
    /// Lag `K` at which the ratio condition holds; `None` for a single zero.
    pub witness_lag: Option<usize>,
}

/// Smallest `n >= 0` with `2^{-2n} / eps <= mu / (100 k^2)` for the `k`-th
/// zero (1-based).
pub fn lemma1_exponent(k: usize, eps: f64, mu: f64) -> u32 {
    let k = k as f64;
    let x = 100.0 * k * k / (mu * eps);
    if x <= 1.0 {
        0
    } else {
        (0.5 * x.log2()).ceil() as u32
    }
}

/// Chooses integer exponents `n_k` with `2^{-2 n_k} / eps_k <= mu / (100 k^2)`.
///
/// The real solution of the equality is rounded up, which can only shrink
/// each term of `s_d`, so `s_d <= mu * pi^2 / 600 < mu`.
pub fn lemma1_construct(seq: &ZeroSequence, mu: f64) -> Result<Lemma1Result> {
    if !(mu > 10.0 && mu.is_finite()) {
        return Err(Error::invalid("mu", "must exceed 10"));
    }
    if seq.is_empty() {
        return Err(Error::invalid("seq", "empty sequence"));
    }
    let eps: Vec<f64> = seq.gaps().collect();
    if eps[0] > 1.0 / mu {
        return Err(Error::Lemma1Precondition {
            condition: "a",
            detail: format!("first gap {} exceeds 1/mu = {}", eps[0], 1.0 / mu),
        });
    }
    let witness_lag = if eps.len() == 1 {
        None
    } else {
        let ratios = lag_ratios(&eps);
        match ratios.iter().position(|&a| a < 1.0) {
            Some(i) => Some(i + 1),
            None => {
                return Err(Error::Lemma1Precondition {
                    condition: "b",
                    detail: format!("no lag K <= {} with max eps_(n+K)/eps_n < 1", ratios.len()),
                })
            }
        }
    };

    let mut exponents = Vec::with_capacity(eps.len());
    let (mut s_c, mut s_d) = (0.0, 0.0);
    for (i, &e) in eps.iter().enumerate() {
        let n = lemma1_exponent(i + 1, e, mu);
        let scale = 2f64.powi(n as i32);
        s_c += scale * e;
        s_d += 1.0 / (scale * scale * e);
        exponents.push(n);
    }
    Ok(Lemma1Result {
        exponents,
        s_c,
        s_d,
        mu,
        witness_lag,
    })
}
