//! Experiment sweeps. Each entry of `n_list` is computed independently (in
//! parallel); files are written only after every entry has finished.

use crate::config::{Experiment, ExperimentConfig, GeneratorKind, LambdaConfig};
use blaschke_core::blaschke::BlaschkeProduct;
use blaschke_core::boundary::{
    distribution, hardy_quasinorm, log_lambda_grid, make_grid, BoundaryGrid, DistributionProfile,
};
use blaschke_core::logmean::{dyadic_increments, t_quadrature};
use blaschke_core::modelspace::{divergence_witness, interpolation_infimum, ModelFunction, WitnessWeight};
use blaschke_core::zeroseq::{is_exponential, lemma1_construct, ZeroSequence};
use blaschke_core::Error as CoreError;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{experiment} at n = {n}: {source}")]
    Compute {
        experiment: &'static str,
        n: usize,
        source: CoreError,
    },
    #[error("{experiment}: {source}")]
    Setup {
        experiment: &'static str,
        source: CoreError,
    },
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub n: usize,
    /// Aligned with [`Summary::columns`]. A missing value is NaN in memory
    /// and `null` in JSON.
    #[serde(with = "nullable")]
    pub values: Vec<f64>,
}

mod nullable {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let opt: Vec<Option<f64>> = v.iter().map(|x| (!x.is_nan()).then_some(*x)).collect();
        opt.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let opt = Vec::<Option<f64>>::deserialize(d)?;
        Ok(opt.into_iter().map(|x| x.unwrap_or(f64::NAN)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// `"<="` or `">="`.
    pub relation: String,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.to_string(),
            value,
            relation: "<=".into(),
            threshold,
            pass: value <= threshold,
        }
    }

    fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.to_string(),
            value,
            relation: ">=".into(),
            threshold,
            pass: value >= threshold,
        }
    }
}

/// Machine-readable result of a run. Contains nothing time-dependent, so
/// identical configs give byte-identical JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: String,
    pub config_hash: String,
    pub seed: u64,
    pub generator: String,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
    pub verdict: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metadata {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    pub unix_time: u64,
    pub files: Vec<String>,
}

#[derive(Debug)]
pub struct RunReport {
    pub summary: Summary,
    pub files: Vec<PathBuf>,
}

struct Outcome {
    columns: Vec<String>,
    rows: Vec<Row>,
    checks: Vec<Check>,
    verdict: String,
    /// `(file name, CSV or JSON body)`.
    files: Vec<(String, String)>,
}

struct Ctx<'a> {
    config: &'a ExperimentConfig,
    zeros: ZeroSequence,
    name: &'static str,
}

impl Ctx<'_> {
    fn fail(&self, n: usize) -> impl Fn(CoreError) -> RunError + '_ {
        move |source| RunError::Compute {
            experiment: self.name,
            n,
            source,
        }
    }

    fn product(&self, n: usize) -> Result<(ZeroSequence, BlaschkeProduct, BoundaryGrid), RunError> {
        let zeros = self.zeros.truncate(n);
        let b = BlaschkeProduct::new(zeros.clone()).map_err(self.fail(n))?;
        let g = self.config.grid;
        let grid = make_grid(&zeros, g.base_count, g.refine_factor).map_err(self.fail(n))?;
        Ok((zeros, b, grid))
    }

    fn geometric(&self) -> bool {
        self.config.generator.kind == GeneratorKind::Geometric
    }
}

/// Weak-type profile over the configured level grid.
pub fn level_profile(
    samples: &[f64],
    grid: &BoundaryGrid,
    p: f64,
    lambda: &LambdaConfig,
) -> blaschke_core::Result<DistributionProfile> {
    let (lo, hi) = samples
        .iter()
        .filter(|v| **v > 0.0)
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi == 0.0 {
        return DistributionProfile {
            lambdas: Vec::new(),
            measures: Vec::new(),
            weak: None,
        }
        .with_exponent(p);
    }
    let lo = match lambda.decades {
        Some(d) => lo.max(hi * 10f64.powf(-d)),
        None => lo,
    };
    let lambdas = log_lambda_grid(lo, hi, lambda.points_per_decade)?;
    distribution(samples, grid, &lambdas)?.with_exponent(p)
}

fn spread(v: impl IntoIterator<Item = f64>) -> f64 {
    let (lo, hi) = v
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    hi / lo
}

fn column(rows: &[Row], i: usize) -> impl Iterator<Item = f64> + '_ {
    rows.iter().map(move |r| r.values[i])
}

fn names(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

fn growth_or_bound(ctx: &Ctx, rows: &[Row], col: usize, label: &str) -> (Vec<Check>, String) {
    let t = ctx.config.thresholds;
    if ctx.geometric() {
        let s = spread(column(rows, col));
        let check = Check::at_most(&format!("max/min {label}"), s, t.uniformity);
        let verdict = if check.pass { "bounded in N" } else { "not uniform in N" };
        (vec![check], verdict.into())
    } else {
        let first = rows[0].values[col];
        let last = rows[rows.len() - 1].values[col];
        let check = Check::at_least(&format!("last/first {label}"), last / first, t.growth);
        let verdict = if check.pass {
            "non-exponential detected"
        } else {
            "growth not detected"
        };
        (vec![check], verdict.into())
    }
}

fn thm1(ctx: &Ctx) -> Result<Outcome, RunError> {
    let results: Vec<(Row, String)> = ctx
        .config
        .n_list
        .par_iter()
        .map(|&n| {
            let (zeros, b, grid) = ctx.product(n)?;
            let samples = grid.sample(|p| b.boundary_derivative_modulus_at(p));
            let prof = level_profile(&samples, &grid, 1.0, &ctx.config.lambda).map_err(ctx.fail(n))?;
            let weak = prof.weak.expect("exponent set");
            let m = is_exponential(&zeros, None).map_err(ctx.fail(n))?.max_observed;
            let row = Row {
                n,
                values: vec![weak.quasinorm, weak.argmax_lambda, m as f64, grid.len() as f64],
            };
            Ok((row, prof.to_csv()))
        })
        .collect::<Result<_, RunError>>()?;
    let (rows, csvs): (Vec<Row>, Vec<String>) = results.into_iter().unzip();
    let (checks, verdict) = growth_or_bound(ctx, &rows, 0, "quasinorm");
    let files = rows
        .iter()
        .zip(csvs)
        .map(|(r, c)| (format!("thm1_N{}.csv", r.n), c))
        .collect();
    Ok(Outcome {
        columns: names(&["quasinorm", "argmax_lambda", "m_observed", "grid_nodes"]),
        rows,
        checks,
        verdict,
        files,
    })
}

/// Nodes times distance to the nearest zero needed before a uniform
/// trapezoid rule is trusted for `T(r)`.
const RESOLVED: f64 = 32.0;

fn thm2(ctx: &Ctx) -> Result<Outcome, RunError> {
    let cfg = ctx.config;
    let quad = if cfg.quadrature_nodes > 0 {
        Some(
            BoundaryGrid::uniform(cfg.quadrature_nodes).map_err(|source| RunError::Setup {
                experiment: ctx.name,
                source,
            })?,
        )
    } else {
        None
    };
    let results: Vec<(Row, [String; 2])> = cfg
        .n_list
        .par_iter()
        .map(|&n| {
            let zeros = ctx.zeros.truncate(n);
            let b = BlaschkeProduct::new(zeros.clone()).map_err(ctx.fail(n))?;
            let mut curve = dyadic_increments(&b, cfg.n_max).map_err(ctx.fail(n))?;
            let mut jensen = f64::NAN;
            if let Some(grid) = &quad {
                let mut tq = Vec::with_capacity(curve.radii.len());
                let mut worst = f64::NAN;
                for (&r, &t) in curve.radii.iter().zip(&curve.t_exact) {
                    let d = zeros
                        .gaps()
                        .map(|e| (e - (1.0 - r)).abs())
                        .fold(f64::INFINITY, f64::min);
                    if d * grid.len() as f64 >= RESOLVED {
                        let q = t_quadrature(&b, r, grid).map_err(ctx.fail(n))?;
                        worst = (q - t).abs().max(if worst.is_nan() { 0.0 } else { worst });
                        tq.push(q);
                    } else {
                        tq.push(f64::NAN);
                    }
                }
                curve.t_quad = Some(tq);
                jensen = worst;
            }
            let half = cfg.n_max / 2;
            let early = curve
                .increments
                .iter()
                .filter(|(k, _)| *k <= half)
                .map(|p| p.1)
                .fold(0.0, f64::max);
            let late = curve
                .increments
                .iter()
                .filter(|(k, _)| *k > half)
                .map(|p| p.1)
                .fold(0.0, f64::max);
            let m = is_exponential(&zeros, None).map_err(ctx.fail(n))?.max_observed;
            let row = Row {
                n,
                values: vec![curve.max_increment, late / early, m as f64, jensen],
            };
            Ok((row, [curve.radii_csv(), curve.increments_csv()]))
        })
        .collect::<Result<_, RunError>>()?;
    let t = cfg.thresholds;
    let mut files = Vec::new();
    let mut rows = Vec::new();
    for (row, [radii, inc]) in results {
        files.push((format!("thm2_N{}_radii.csv", row.n), radii));
        files.push((format!("thm2_N{}_increments.csv", row.n), inc));
        rows.push(row);
    }
    let mut checks = Vec::new();
    let verdict;
    if ctx.geometric() {
        let m = column(&rows, 0).fold(0.0, f64::max);
        let c = Check::at_most("max increment", m, t.increment);
        verdict = if c.pass {
            "increments bounded"
        } else {
            "increments exceed bound"
        };
        checks.push(c);
    } else {
        let g = rows[rows.len() - 1].values[1];
        let c = Check::at_least("late/early increment", g, t.increment_growth);
        verdict = if c.pass {
            "non-exponential detected"
        } else {
            "growth not detected"
        };
        checks.push(c);
    }
    // NaN marks a truncation where no radius was far enough from the zeros
    let resolved: Vec<f64> = column(&rows, 3).filter(|g| !g.is_nan()).collect();
    if !resolved.is_empty() {
        let worst = resolved.into_iter().fold(0.0, f64::max);
        checks.push(Check::at_most("max |t_exact - t_quad|", worst, 1e-6));
    }
    Ok(Outcome {
        columns: names(&["max_increment", "late_over_early", "m_observed", "jensen_gap"]),
        rows,
        checks,
        verdict: verdict.into(),
        files,
    })
}

fn random_unit_function(zeros: &ZeroSequence, seed: u64) -> blaschke_core::Result<ModelFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let beta: Vec<Complex64> = (0..zeros.len())
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let f = ModelFunction::new(zeros.clone(), beta)?;
    let norm = f.l2_norm()?;
    Ok(f.scaled(Complex64::new(1.0 / norm, 0.0)))
}

fn thm3(ctx: &Ctx) -> Result<Outcome, RunError> {
    let cfg = ctx.config;
    let mut rows = Vec::new();
    let mut files = Vec::new();
    let mut all = Vec::new();
    for &m in &cfg.n_list {
        let zeros = ctx.zeros.truncate(m);
        let grid = make_grid(&zeros, cfg.grid.base_count, cfg.grid.refine_factor).map_err(ctx.fail(m))?;
        let stats: Vec<f64> = (0..cfg.functions)
            .into_par_iter()
            .map(|i| {
                let seed = cfg.generator.seed ^ ((m as u64) << 32) ^ i as u64;
                let f = random_unit_function(&zeros, seed).map_err(ctx.fail(m))?;
                let samples: Vec<f64> = grid
                    .nodes()
                    .iter()
                    .map(|node| f.derivative_at(&node.point_at_gap(1.0 - cfg.radius)).norm())
                    .collect();
                let prof = level_profile(&samples, &grid, 2.0 / 3.0, &cfg.lambda).map_err(ctx.fail(m))?;
                Ok(prof.quasinorm().unwrap_or(0.0))
            })
            .collect::<Result<_, RunError>>()?;
        let mut csv = String::from("function,statistic\n");
        for (i, s) in stats.iter().enumerate() {
            let _ = writeln!(csv, "{i},{s:e}");
        }
        files.push((format!("thm3_M{m}.csv"), csv));
        let lo = stats.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = stats.iter().copied().fold(0.0, f64::max);
        let mean = stats.iter().sum::<f64>() / stats.len() as f64;
        rows.push(Row {
            n: m,
            values: vec![lo, hi, mean],
        });
        all.extend(stats);
    }
    let c = Check::at_most("max/min statistic", spread(all), cfg.thresholds.model_spread);
    let verdict = if c.pass { "bounded in M" } else { "not uniform in M" };
    Ok(Outcome {
        columns: names(&["min", "max", "mean"]),
        rows,
        checks: vec![c],
        verdict: verdict.into(),
        files,
    })
}

fn frostman(ctx: &Ctx) -> Result<Outcome, RunError> {
    let cfg = ctx.config;
    let shifts: Vec<Complex64> = cfg.shifts.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
    let results: Vec<(Row, f64, String)> = cfg
        .n_list
        .par_iter()
        .map(|&n| {
            let (_, b, grid) = ctx.product(n)?;
            let base_samples = grid.sample(|p| b.boundary_derivative_modulus_at(p));
            let base = level_profile(&base_samples, &grid, 1.0, &cfg.lambda)
                .map_err(ctx.fail(n))?
                .quasinorm()
                .unwrap_or(0.0);
            let mut values = vec![base];
            let mut identity_gap: f64 = 0.0;
            let mut csv = String::from("a_re,a_im,quasinorm,ratio\n");
            for a in &shifts {
                let samples = grid
                    .try_sample(|p| b.frostman_shift_boundary_at(*a, p))
                    .map_err(ctx.fail(n))?;
                if a.norm() == 0.0 {
                    for (x, y) in samples.iter().zip(&base_samples) {
                        identity_gap = identity_gap.max((x - y).abs() / y);
                    }
                }
                let q = level_profile(&samples, &grid, 1.0, &cfg.lambda)
                    .map_err(ctx.fail(n))?
                    .quasinorm()
                    .unwrap_or(0.0);
                let _ = writeln!(csv, "{:e},{:e},{q:e},{:e}", a.re, a.im, q / base);
                values.push(q / base);
            }
            Ok((Row { n, values }, identity_gap, csv))
        })
        .collect::<Result<_, RunError>>()?;
    let mut rows = Vec::new();
    let mut files = Vec::new();
    let mut identity: f64 = 0.0;
    for (row, gap, csv) in results {
        files.push((format!("frostman_N{}.csv", row.n), csv));
        identity = identity.max(gap);
        rows.push(row);
    }
    let worst = rows
        .iter()
        .flat_map(|r| r.values[1..].iter().map(|&x| x.max(1.0 / x)))
        .fold(1.0, f64::max);
    let mut checks = vec![Check::at_most(
        "max factor shifted vs unshifted",
        worst,
        cfg.thresholds.shift,
    )];
    if shifts.iter().any(|a| a.norm() == 0.0) {
        checks.push(Check::at_most("a = 0 relative deviation", identity, 1e-14));
    }
    let pass = checks.iter().all(|c| c.pass);
    let mut columns = vec!["unshifted".to_string()];
    columns.extend(shifts.iter().map(|a| format!("ratio[{}{:+}i]", a.re, a.im)));
    Ok(Outcome {
        columns,
        rows,
        checks,
        verdict: if pass {
            "shift preserves weak-L1 bound"
        } else {
            "shift changes weak-L1 bound"
        }
        .into(),
        files,
    })
}

fn lemma1(ctx: &Ctx) -> Result<Outcome, RunError> {
    let mu = ctx.config.mu;
    let mut rows = Vec::new();
    let mut files = Vec::new();
    for &n in &ctx.config.n_list {
        let zeros = ctx.zeros.truncate(n);
        let r = lemma1_construct(&zeros, mu).map_err(ctx.fail(n))?;
        let mut csv = String::from("k,eps,n_k\n");
        for (k, (e, nk)) in zeros.gaps().zip(&r.exponents).enumerate() {
            let _ = writeln!(csv, "{},{e:e},{nk}", k + 1);
        }
        files.push((format!("lemma1_N{n}.csv"), csv));
        files.push((
            format!("lemma1_N{n}.json"),
            serde_json::to_string_pretty(&r).expect("result serializes") + "\n",
        ));
        rows.push(Row {
            n,
            values: vec![r.s_c, r.s_d, r.s_c * mu, r.witness_lag.map_or(f64::NAN, |k| k as f64)],
        });
    }
    let ratio = column(&rows, 1).fold(0.0, f64::max) / mu;
    let c = Check::at_most("max S_d / mu", ratio, 1.0);
    Ok(Outcome {
        columns: names(&["s_c", "s_d", "s_c_times_mu", "witness_lag"]),
        verdict: if c.pass {
            "dual sum bounded by mu"
        } else {
            "dual sum exceeds mu"
        }
        .into(),
        rows,
        checks: vec![c],
        files,
    })
}

fn claim(ctx: &Ctx) -> Result<Outcome, RunError> {
    let cfg = ctx.config;
    let results: Vec<(Row, String)> = cfg
        .n_list
        .par_iter()
        .map(|&n| {
            let (zeros, b, grid) = ctx.product(n)?;
            let h = ModelFunction::kernel(&zeros, n - 1).map_err(ctx.fail(n))?;
            let samples = grid.sample(|p| b.boundary_derivative_modulus_at(p) * h.evaluate_at(p).norm());
            let prof = level_profile(&samples, &grid, 2.0 / 3.0, &cfg.lambda).map_err(ctx.fail(n))?;
            let sup = prof.quasinorm().unwrap_or(0.0);
            let norm_pow = h.l2_norm().map_err(ctx.fail(n))?.powf(2.0 / 3.0);
            Ok((
                Row {
                    n,
                    values: vec![sup, norm_pow, sup / norm_pow],
                },
                prof.to_csv(),
            ))
        })
        .collect::<Result<_, RunError>>()?;
    let (rows, csvs): (Vec<Row>, Vec<String>) = results.into_iter().unzip();
    let files = rows
        .iter()
        .zip(csvs)
        .map(|(r, c)| (format!("claim_N{}.csv", r.n), c))
        .collect();
    let c = Check::at_most("max/min ratio", spread(column(&rows, 2)), cfg.thresholds.claim);
    Ok(Outcome {
        columns: names(&["sup", "h_norm_pow", "ratio"]),
        verdict: if c.pass {
            "claim constant uniform in N"
        } else {
            "claim constant not uniform"
        }
        .into(),
        rows,
        checks: vec![c],
        files,
    })
}

fn witness_csv(rows: &[blaschke_core::WitnessRow]) -> String {
    let mut s = String::from("M,quasinorm,condition,l2_sum,weak_sum\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{:e},{:e},{:e},{:e}",
            r.m, r.quasinorm, r.condition, r.l2_sum, r.weak_sum
        );
    }
    s
}

fn observation(ctx: &Ctx) -> Result<Outcome, RunError> {
    let cfg = ctx.config;
    let top = *cfg.n_list.last().expect("validated nonempty");
    let setup = |source| RunError::Compute {
        experiment: ctx.name,
        n: top,
        source,
    };
    let (div, ctl) = rayon::join(
        || {
            divergence_witness(
                &ctx.zeros,
                &cfg.n_list,
                WitnessWeight::Divergent,
                cfg.grid.base_count,
                cfg.grid.refine_factor,
            )
        },
        || {
            divergence_witness(
                &ctx.zeros,
                &cfg.n_list,
                WitnessWeight::Control,
                cfg.grid.base_count,
                cfg.grid.refine_factor,
            )
        },
    );
    let (div, ctl) = (div.map_err(setup)?, ctl.map_err(setup)?);
    let mut rows = Vec::new();
    for (d, c) in div.iter().zip(&ctl) {
        let inf = interpolation_infimum(&ctx.zeros.truncate(d.m)).map_err(ctx.fail(d.m))?;
        rows.push(Row {
            n: d.m,
            values: vec![d.quasinorm, d.condition, d.weak_sum, c.quasinorm, c.condition, inf],
        });
    }
    let growth = div
        .windows(2)
        .map(|w| w[1].quasinorm / w[0].quasinorm)
        .fold(f64::INFINITY, f64::min);
    let mut checks = Vec::new();
    if div.len() > 1 {
        let mut c = Check::at_least("min successive ratio (divergent)", growth, 1.0);
        c.pass = growth > 1.0;
        checks.push(c);
    }
    // a single kernel is a degenerate interpolant; the control spread uses M > 1
    let control: Vec<f64> = ctl.iter().filter(|r| r.m > 1).map(|r| r.quasinorm).collect();
    if !control.is_empty() {
        checks.push(Check::at_most(
            "max/min control",
            spread(control),
            cfg.thresholds.control,
        ));
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(Outcome {
        columns: names(&[
            "divergent_h23",
            "divergent_condition",
            "divergent_weak_sum",
            "control_h23",
            "control_condition",
            "interpolation_infimum",
        ]),
        rows,
        checks,
        verdict: if pass {
            "divergent grows, control bounded"
        } else {
            "witness inconclusive"
        }
        .into(),
        files: vec![
            ("observation_divergent.csv".into(), witness_csv(&div)),
            ("observation_control.csv".into(), witness_csv(&ctl)),
        ],
    })
}

fn protas(ctx: &Ctx) -> Result<Outcome, RunError> {
    let p = ctx.config.p;
    let results: Vec<(Row, String)> = ctx
        .config
        .n_list
        .par_iter()
        .map(|&n| {
            let (zeros, b, grid) = ctx.product(n)?;
            let samples = grid.sample(|pt| b.boundary_derivative_modulus_at(pt));
            let h = hardy_quasinorm(&samples, &grid, p).map_err(ctx.fail(n))?;
            let sum: f64 = zeros.gaps().map(|e| e.powf(1.0 - p)).sum();
            let prof = level_profile(&samples, &grid, p, &ctx.config.lambda).map_err(ctx.fail(n))?;
            Ok((
                Row {
                    n,
                    values: vec![h, sum],
                },
                prof.to_csv(),
            ))
        })
        .collect::<Result<_, RunError>>()?;
    let (rows, csvs): (Vec<Row>, Vec<String>) = results.into_iter().unzip();
    let files = rows
        .iter()
        .zip(csvs)
        .map(|(r, c)| (format!("protas_N{}.csv", r.n), c))
        .collect();
    let steps: Vec<f64> = rows.windows(2).map(|w| w[1].values[0] - w[0].values[0]).collect();
    let mut checks = Vec::new();
    let verdict = if ctx.geometric() {
        // bounded sequences show shrinking steps along the truncation list
        let worst = steps.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
        if steps.len() >= 2 {
            checks.push(Check::at_most("max step ratio", worst, 1.0));
        }
        "steps shrink"
    } else {
        let first = rows[0].values[0];
        let last = rows[rows.len() - 1].values[0];
        checks.push(Check::at_least(
            "last/first Hardy quasinorm",
            last / first,
            ctx.config.thresholds.growth,
        ));
        "growth"
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(Outcome {
        columns: names(&["hardy_quasinorm", "protas_sum"]),
        rows,
        checks,
        verdict: format!("{}{verdict}", if pass { "" } else { "no " }),
        files,
    })
}

fn write(path: &Path, body: &str) -> Result<(), RunError> {
    std::fs::write(path, body).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Computes the summary without touching the filesystem.
pub fn evaluate(config: &ExperimentConfig) -> Result<(Summary, Vec<(String, String)>), RunError> {
    let name = config.experiment.name();
    let zeros = config.zeros().map_err(|source| RunError::Setup {
        experiment: name,
        source,
    })?;
    let ctx = Ctx { config, zeros, name };
    let outcome = match config.experiment {
        Experiment::Thm1 => thm1(&ctx),
        Experiment::Thm2 => thm2(&ctx),
        Experiment::Thm3 => thm3(&ctx),
        Experiment::Frostman => frostman(&ctx),
        Experiment::Lemma1 => lemma1(&ctx),
        Experiment::Claim => claim(&ctx),
        Experiment::Observation => observation(&ctx),
        Experiment::Protas => protas(&ctx),
    }?;
    let g = &config.generator;
    let generator = match g.kind {
        GeneratorKind::Geometric => format!("geometric c={} delta={}", g.c, g.delta.unwrap_or(f64::NAN)),
        GeneratorKind::Power => format!("power q={}", g.q.unwrap_or(f64::NAN)),
    };
    let summary = Summary {
        experiment: name.to_string(),
        config_hash: config.hash(),
        seed: g.seed,
        generator,
        columns: outcome.columns,
        pass: outcome.checks.iter().all(|c| c.pass),
        rows: outcome.rows,
        checks: outcome.checks,
        verdict: outcome.verdict,
    };
    Ok((summary, outcome.files))
}

/// Runs the experiment and writes its files into `out_dir`. CSV files start
/// with a `# config_hash=... seed=...` line; JSON objects carry both as keys.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<RunReport, RunError> {
    let (summary, files) = evaluate(config)?;
    std::fs::create_dir_all(out_dir).map_err(|source| RunError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let stamp = format!("# config_hash={} seed={}\n", summary.config_hash, summary.seed);
    let mut written = Vec::new();
    for (name, body) in &files {
        let path = out_dir.join(name);
        if name.ends_with(".csv") {
            write(&path, &format!("{stamp}{body}"))?;
        } else {
            let mut value: serde_json::Value = serde_json::from_str(body).expect("experiment JSON is valid");
            if let Some(map) = value.as_object_mut() {
                map.insert("config_hash".into(), summary.config_hash.clone().into());
                map.insert("seed".into(), summary.seed.into());
            }
            write(
                &path,
                &(serde_json::to_string_pretty(&value).expect("value serializes") + "\n"),
            )?;
        }
        written.push(path);
    }
    let summary_path = out_dir.join("summary.json");
    write(
        &summary_path,
        &(serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n"),
    )?;
    written.push(summary_path);
    let unix_time = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let meta = Metadata {
        config_hash: summary.config_hash.clone(),
        seed: summary.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        unix_time,
        files: written
            .iter()
            .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
            .collect(),
    };
    let meta_path = out_dir.join("metadata.json");
    write(
        &meta_path,
        &(serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n"),
    )?;
    written.push(meta_path);
    Ok(RunReport {
        summary,
        files: written,
    })
}
