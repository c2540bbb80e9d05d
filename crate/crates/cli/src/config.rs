//! Experiment configuration, read from TOML.
//!
//! ```toml
//! experiment = "thm1"
//! n_list = [10, 20, 30, 40]
//! output_dir = "out/thm1"
//!
//! [generator]
//! kind = "geometric"
//! c = 1.0
//! delta = 0.5
//! angles = "uniform-random"
//! seed = 42
//!
//! [grid]
//! base_count = 16384
//! refine_factor = 64
//! ```

use blaschke_core::modelspace::MAX_WITNESS_M;
use blaschke_core::zeroseq::{generate_geometric, generate_power, AngleRule, ZeroSequence};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("{field}: {reason}")]
    Field { field: &'static str, reason: String },
}

fn field(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Thm1,
    Thm2,
    Thm3,
    Frostman,
    Lemma1,
    Claim,
    Observation,
    Protas,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Thm1 => "thm1",
            Experiment::Thm2 => "thm2",
            Experiment::Thm3 => "thm3",
            Experiment::Frostman => "frostman",
            Experiment::Lemma1 => "lemma1",
            Experiment::Claim => "claim",
            Experiment::Observation => "observation",
            Experiment::Protas => "protas",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Geometric,
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngleKind {
    #[default]
    UniformRandom,
    Equispaced,
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub kind: GeneratorKind,
    #[serde(default = "one")]
    pub c: f64,
    pub delta: Option<f64>,
    pub q: Option<f64>,
    /// Zeros to generate; defaults to the largest entry of `n_list`.
    pub count: Option<usize>,
    #[serde(default)]
    pub angles: AngleKind,
    #[serde(default)]
    pub fixed_angles: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_base")]
    pub base_count: usize,
    #[serde(default = "default_refine")]
    pub refine_factor: usize,
}

fn default_base() -> usize {
    1 << 14
}

fn default_refine() -> usize {
    64
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            base_count: default_base(),
            refine_factor: default_refine(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaConfig {
    #[serde(default = "default_ppd")]
    pub points_per_decade: usize,
    /// Span of the level grid below the largest sample; `None` reaches down
    /// to the smallest positive sample.
    pub decades: Option<f64>,
}

fn default_ppd() -> usize {
    200
}

impl Default for LambdaConfig {
    fn default() -> Self {
        LambdaConfig {
            points_per_decade: default_ppd(),
            decades: None,
        }
    }
}

/// Pass/fail factors for the uniformity and growth checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// Largest max/min of the weak-L1 quasinorms over `n_list`.
    pub uniformity: f64,
    /// Smallest last/first quasinorm ratio that signals growth.
    pub growth: f64,
    /// Largest dyadic increment of `T`.
    pub increment: f64,
    /// Smallest late/early increment ratio that signals growth.
    pub increment_growth: f64,
    pub model_spread: f64,
    /// Allowed factor between shifted and unshifted quasinorms.
    pub shift: f64,
    pub claim: f64,
    pub control: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            uniformity: 1.5,
            growth: 3.0,
            increment: 4.0,
            increment_growth: 2.0,
            model_spread: 3.0,
            shift: 4.0,
            claim: 4.0,
            control: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Truncation lengths (kernel counts for `thm3`, `M` values for
    /// `observation`).
    pub n_list: Vec<usize>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    pub generator: GeneratorConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub lambda: LambdaConfig,
    #[serde(default)]
    pub thresholds: Thresholds,
    /// Deepest dyadic level for `thm2`.
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    /// Uniform quadrature nodes for the `thm2` Jensen cross-check; 0 skips it.
    #[serde(default)]
    pub quadrature_nodes: usize,
    /// Random model functions per entry of `n_list` for `thm3`.
    #[serde(default = "default_functions")]
    pub functions: usize,
    /// Radius for the `thm3` statistic.
    #[serde(default = "one")]
    pub radius: f64,
    /// Frostman parameters as `[re, im]`.
    #[serde(default = "default_shifts")]
    pub shifts: Vec<[f64; 2]>,
    #[serde(default = "default_mu")]
    pub mu: f64,
    /// Exponent of the `protas` Hardy quasinorm.
    #[serde(default = "default_p")]
    pub p: f64,
}

fn default_n_max() -> u32 {
    35
}

fn default_functions() -> usize {
    50
}

fn default_shifts() -> Vec<[f64; 2]> {
    vec![[0.0, 0.0], [0.0, 0.4], [-0.7, 0.0], [0.5, 0.3]]
}

fn default_mu() -> f64 {
    16.0
}

fn default_p() -> f64 {
    0.9
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: ExperimentConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// Number of zeros the generator must produce.
    pub fn zero_count(&self) -> usize {
        let top = self.n_list.iter().copied().max().unwrap_or(0);
        self.generator.count.unwrap_or(top).max(top)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_list.is_empty() {
            return Err(field("n_list", "must not be empty"));
        }
        if self.n_list.contains(&0) {
            return Err(field("n_list", "entries must be positive"));
        }
        if self.n_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(field("n_list", "must be strictly increasing"));
        }
        let g = &self.generator;
        match g.kind {
            GeneratorKind::Geometric => {
                let delta = g
                    .delta
                    .ok_or_else(|| field("generator.delta", "required for kind = geometric"))?;
                if !(delta > 0.0 && delta < 1.0) {
                    return Err(field("generator.delta", "must lie in (0, 1)"));
                }
                if !(g.c > 0.0 && g.c * delta < 1.0) {
                    return Err(field("generator.c", "need c > 0 and c * delta < 1"));
                }
                if self.experiment == Experiment::Thm3 && delta >= 0.5 {
                    return Err(field("generator.delta", "thm3 needs ratio below 1/2"));
                }
            }
            GeneratorKind::Power => {
                let q = g.q.ok_or_else(|| field("generator.q", "required for kind = power"))?;
                if !(q > 1.0 && q.is_finite()) {
                    return Err(field("generator.q", "must exceed 1"));
                }
            }
        }
        if g.angles == AngleKind::Fixed && g.fixed_angles.len() != self.zero_count() {
            return Err(field(
                "generator.fixed_angles",
                format!("need {} angles", self.zero_count()),
            ));
        }
        if let Some(count) = g.count {
            if count < self.n_list.iter().copied().max().unwrap_or(0) {
                return Err(field("generator.count", "smaller than the largest n_list entry"));
            }
        }
        if self.grid.base_count < 64 {
            return Err(field("grid.base_count", "must be at least 64"));
        }
        if self.grid.refine_factor < 2 {
            return Err(field("grid.refine_factor", "must be at least 2"));
        }
        if self.lambda.points_per_decade == 0 {
            return Err(field("lambda.points_per_decade", "must be positive"));
        }
        if let Some(d) = self.lambda.decades {
            if !(d > 0.0 && d.is_finite()) {
                return Err(field("lambda.decades", "must be positive"));
            }
        }
        let t = &self.thresholds;
        for (name, v) in [
            ("thresholds.uniformity", t.uniformity),
            ("thresholds.growth", t.growth),
            ("thresholds.increment", t.increment),
            ("thresholds.increment_growth", t.increment_growth),
            ("thresholds.model_spread", t.model_spread),
            ("thresholds.shift", t.shift),
            ("thresholds.claim", t.claim),
            ("thresholds.control", t.control),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(field(name, "must be positive"));
            }
        }
        match self.experiment {
            Experiment::Thm2 => {
                if !(4..=blaschke_core::logmean::MAX_DYADIC_LEVEL).contains(&self.n_max) {
                    return Err(field("n_max", "must lie in 4..=51"));
                }
                if self.quadrature_nodes != 0 && self.quadrature_nodes < 64 {
                    return Err(field("quadrature_nodes", "must be 0 or at least 64"));
                }
            }
            Experiment::Thm3 => {
                if self.functions == 0 {
                    return Err(field("functions", "must be positive"));
                }
                if !(self.radius > 0.0 && self.radius <= 1.0) {
                    return Err(field("radius", "must lie in (0, 1]"));
                }
            }
            Experiment::Frostman => {
                if self.shifts.is_empty() {
                    return Err(field("shifts", "must not be empty"));
                }
                if self.shifts.iter().any(|[re, im]| re.hypot(*im) >= 1.0) {
                    return Err(field("shifts", "every a must satisfy |a| < 1"));
                }
            }
            Experiment::Lemma1 => {
                if !(self.mu > 10.0 && self.mu.is_finite()) {
                    return Err(field("mu", "must exceed 10"));
                }
            }
            Experiment::Observation => {
                if self.generator.kind != GeneratorKind::Geometric {
                    return Err(field("generator.kind", "observation needs a geometric generator"));
                }
                if self.n_list.iter().any(|&m| m > MAX_WITNESS_M) {
                    return Err(field("n_list", format!("observation allows M <= {MAX_WITNESS_M}")));
                }
            }
            Experiment::Protas => {
                if !(self.p > 0.0 && self.p < 1.0) {
                    return Err(field("p", "must lie in (0, 1)"));
                }
            }
            Experiment::Thm1 | Experiment::Claim => {}
        }
        Ok(())
    }

    pub fn angle_rule(&self) -> AngleRule {
        match self.generator.angles {
            AngleKind::UniformRandom => AngleRule::UniformRandom {
                seed: self.generator.seed,
            },
            AngleKind::Equispaced => AngleRule::Equispaced,
            AngleKind::Fixed => AngleRule::Fixed {
                angles: self.generator.fixed_angles.clone(),
            },
        }
    }

    pub fn zeros(&self) -> blaschke_core::Result<ZeroSequence> {
        let g = &self.generator;
        let rule = self.angle_rule();
        match g.kind {
            GeneratorKind::Geometric => generate_geometric(g.c, g.delta.unwrap_or(0.5), self.zero_count(), &rule),
            GeneratorKind::Power => generate_power(g.q.unwrap_or(2.0), self.zero_count(), &rule),
        }
    }

    /// SHA-256 over the canonical JSON form (defaults filled in, output
    /// directory excluded).
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = None;
        let json = serde_json::to_string(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const THM1: &str = r#"
experiment = "thm1"
n_list = [10, 20]

[generator]
kind = "geometric"
delta = 0.5
seed = 3
"#;

    fn reason(text: &str) -> String {
        ExperimentConfig::from_toml(text).unwrap_err().to_string()
    }

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_toml(THM1).unwrap();
        assert_eq!(c.grid.base_count, 16384);
        assert_eq!(c.thresholds.uniformity, 1.5);
        assert_eq!(c.zero_count(), 20);
        assert_eq!(c.zeros().unwrap().len(), 20);
    }

    #[test]
    fn errors_name_the_field() {
        assert!(reason(&THM1.replace("delta = 0.5", "delta = 1.5")).starts_with("generator.delta"));
        assert!(reason(&THM1.replace("[10, 20]", "[20, 10]")).starts_with("n_list"));
        assert!(reason(&THM1.replace("kind = \"geometric\"", "kind = \"power\"")).starts_with("generator.q"));
        let grid = format!("{THM1}\n[grid]\nbase_count = 8\n");
        assert!(reason(&grid).starts_with("grid.base_count"));
        assert!(reason(&THM1.replace("seed = 3", "seed = 3\nbogus = 1")).contains("bogus"));
    }

    #[test]
    fn thm3_requires_small_ratio() {
        let t = THM1.replace("thm1", "thm3");
        assert!(reason(&t).starts_with("generator.delta"));
        assert!(ExperimentConfig::from_toml(&t.replace("0.5", "0.25")).is_ok());
    }

    #[test]
    fn hash_ignores_output_dir_and_tracks_seed() {
        let a = ExperimentConfig::from_toml(THM1).unwrap();
        let mut b = a.clone();
        b.output_dir = Some("elsewhere".into());
        assert_eq!(a.hash(), b.hash());
        b.generator.seed = 4;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
