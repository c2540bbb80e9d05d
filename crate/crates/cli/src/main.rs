use anyhow::{anyhow, bail, Result};
use blaschke_cli::config::ExperimentConfig;
use blaschke_cli::experiment::{self, Summary};
use blaschke_cli::report;
use blaschke_core::blaschke::BlaschkeProduct;
use blaschke_core::boundary::{make_grid, BoundaryGrid};
use blaschke_core::disc::DiscPoint;
use blaschke_core::logmean::dyadic_increments;
use blaschke_core::modelspace::{interpolation_infimum, interpolation_solve};
use blaschke_core::zeroseq::{generate_geometric, generate_power, lemma1_construct, AngleRule, ZeroSequence};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "blaschke", version, about = "Numerical experiments on Blaschke products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a zero sequence.
    Gen(GenArgs),
    /// Evaluate B, B' and the boundary derivative at points.
    Eval(EvalArgs),
    /// Distribution profile of |B'| on the circle.
    Dist(DistArgs),
    /// Logarithmic mean at dyadic radii.
    Tmean(TmeanArgs),
    /// Weak-L1 quasinorm of a Frostman shift against the unshifted one.
    Frostman(FrostmanArgs),
    /// Interpolation in the model space spanned by the zero kernels.
    Modelspace(ModelArgs),
    /// Exponent construction for a zero sequence.
    Lemma1(LemmaArgs),
    /// Run an experiment described by a TOML config.
    Run(RunArgs),
    /// Render a summary JSON as a plain-text table.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Geometric,
    Power,
}

#[derive(Clone, Copy, ValueEnum)]
enum Angles {
    Random,
    Equispaced,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    #[arg(long)]
    count: usize,
    #[arg(long, value_enum, default_value = "random")]
    angles: Angles,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; `.json` selects JSON, anything else the `eps theta` text form.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ZeroArgs {
    /// Zero file: JSON when the extension is `.json`, else `eps theta` lines.
    #[arg(long)]
    zeros: PathBuf,
    #[arg(long)]
    allow_origin: bool,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 1 << 14)]
    base_count: usize,
    #[arg(long, default_value_t = 64)]
    refine_factor: usize,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    zeros: ZeroArgs,
    /// Gap `1 - |z|` of the evaluation points; 0 means the circle.
    #[arg(long, default_value_t = 0.0)]
    gap: f64,
    #[arg(long, required = true, num_args = 1.., allow_negative_numbers = true)]
    theta: Vec<f64>,
}

#[derive(Args)]
struct DistArgs {
    #[command(flatten)]
    zeros: ZeroArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 200)]
    points_per_decade: usize,
    #[arg(long)]
    decades: Option<f64>,
}

#[derive(Args)]
struct TmeanArgs {
    #[command(flatten)]
    zeros: ZeroArgs,
    #[arg(long, default_value_t = 35)]
    n_max: u32,
    /// Also evaluate the trapezoid rule on this many uniform nodes.
    #[arg(long)]
    quadrature: Option<usize>,
}

#[derive(Args)]
struct FrostmanArgs {
    #[command(flatten)]
    zeros: ZeroArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, allow_negative_numbers = true)]
    re: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    im: f64,
}

#[derive(Args)]
struct ModelArgs {
    #[command(flatten)]
    zeros: ZeroArgs,
    /// Targets as `re im` lines, one per zero.
    #[arg(long)]
    targets: Option<PathBuf>,
}

#[derive(Args)]
struct LemmaArgs {
    #[command(flatten)]
    zeros: ZeroArgs,
    #[arg(long, default_value_t = 16.0)]
    mu: f64,
}

#[derive(Args)]
struct RunArgs {
    config: PathBuf,
    /// Overrides `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    summary: PathBuf,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| anyhow!("cannot read {}: {e}", path.display()))
}

fn load_zeros(args: &ZeroArgs) -> Result<ZeroSequence> {
    let text = read(&args.zeros)?;
    let seq = if args.zeros.extension().is_some_and(|e| e == "json") {
        let mut value: serde_json::Value = serde_json::from_str(&text)?;
        if args.allow_origin {
            value["allow_origin"] = true.into();
        }
        serde_json::from_value(value)?
    } else {
        ZeroSequence::from_text(&text, args.allow_origin)?
    };
    Ok(seq)
}

fn grid_for(zeros: &ZeroSequence, g: &GridArgs) -> Result<BoundaryGrid> {
    Ok(make_grid(zeros, g.base_count, g.refine_factor)?)
}

fn gen(a: GenArgs) -> Result<bool> {
    let rule = match a.angles {
        Angles::Random => AngleRule::UniformRandom { seed: a.seed },
        Angles::Equispaced => AngleRule::Equispaced,
    };
    let z = match a.kind {
        Kind::Geometric => generate_geometric(a.c, a.delta, a.count, &rule)?,
        Kind::Power => generate_power(a.q, a.count, &rule)?,
    };
    match a.out {
        Some(path) => {
            let body = if path.extension().is_some_and(|e| e == "json") {
                serde_json::to_string_pretty(&z)? + "\n"
            } else {
                z.to_text()
            };
            std::fs::write(&path, body).map_err(|e| anyhow!("cannot write {}: {e}", path.display()))?;
        }
        None => print!("{}", z.to_text()),
    }
    Ok(true)
}

fn eval(a: EvalArgs) -> Result<bool> {
    let b = BlaschkeProduct::new(load_zeros(&a.zeros)?)?;
    println!("theta,re_b,im_b,re_db,im_db,abs_db");
    for th in a.theta {
        let p = DiscPoint::new(a.gap, th);
        let v = b.evaluate_at(&p)?;
        let d = b.derivative_at(&p)?;
        let m = if a.gap == 0.0 {
            b.boundary_derivative_modulus_at(&p)
        } else {
            d.norm()
        };
        println!("{th:e},{:e},{:e},{:e},{:e},{m:e}", v.re, v.im, d.re, d.im);
    }
    Ok(true)
}

fn dist(a: DistArgs) -> Result<bool> {
    let z = load_zeros(&a.zeros)?;
    let b = BlaschkeProduct::new(z.clone())?;
    let grid = grid_for(&z, &a.grid)?;
    let samples = grid.sample(|p| b.boundary_derivative_modulus_at(p));
    let lambda = blaschke_cli::config::LambdaConfig {
        points_per_decade: a.points_per_decade,
        decades: a.decades,
    };
    let prof = experiment::level_profile(&samples, &grid, a.p, &lambda)?;
    print!("{}", prof.to_csv());
    let w = prof.weak.expect("exponent set");
    eprintln!("quasinorm {:e} at lambda {:e}", w.quasinorm, w.argmax_lambda);
    Ok(true)
}

fn tmean(a: TmeanArgs) -> Result<bool> {
    let b = BlaschkeProduct::new(load_zeros(&a.zeros)?)?;
    let mut curve = dyadic_increments(&b, a.n_max)?;
    if let Some(n) = a.quadrature {
        curve = curve.with_quadrature(&b, &BoundaryGrid::uniform(n)?)?;
    }
    print!("{}", curve.radii_csv());
    eprintln!("max increment {:e}", curve.max_increment);
    Ok(true)
}

fn frostman(a: FrostmanArgs) -> Result<bool> {
    let z = load_zeros(&a.zeros)?;
    let b = BlaschkeProduct::new(z.clone())?;
    let grid = grid_for(&z, &a.grid)?;
    let shift = Complex64::new(a.re, a.im);
    let lambda = Default::default();
    let q = |s: &[f64]| -> Result<f64> {
        Ok(experiment::level_profile(s, &grid, 1.0, &lambda)?
            .quasinorm()
            .unwrap_or(0.0))
    };
    let base = q(&grid.sample(|p| b.boundary_derivative_modulus_at(p)))?;
    let shifted = q(&grid.try_sample(|p| b.frostman_shift_boundary_at(shift, p))?)?;
    println!("unshifted,shifted,ratio");
    println!("{base:e},{shifted:e},{:e}", shifted / base);
    Ok(true)
}

fn modelspace(a: ModelArgs) -> Result<bool> {
    let z = load_zeros(&a.zeros)?;
    println!("interpolation_infimum {:e}", interpolation_infimum(&z)?);
    if let Some(path) = a.targets {
        let mut w = Vec::new();
        for (i, line) in read(&path)?.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let nums: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|e| anyhow!("{}:{}: bad number: {e}", path.display(), i + 1))?;
            let [re, im] = nums[..] else {
                bail!("{}:{}: expected `re im`", path.display(), i + 1);
            };
            w.push(Complex64::new(re, im));
        }
        let r = interpolation_solve(&z, &w)?;
        println!("condition {:e}", r.condition);
        println!("norm {:e}", r.function.l2_norm()?);
        println!("k,re_beta,im_beta");
        for (k, c) in r.function.coefficients().iter().enumerate() {
            println!("{},{:e},{:e}", k + 1, c.re, c.im);
        }
    }
    Ok(true)
}

fn lemma1(a: LemmaArgs) -> Result<bool> {
    let r = lemma1_construct(&load_zeros(&a.zeros)?, a.mu)?;
    println!("{}", serde_json::to_string_pretty(&r)?);
    Ok(r.s_d <= r.mu)
}

fn run(a: RunArgs) -> Result<bool> {
    let config = ExperimentConfig::load(&a.config)?;
    let out = a
        .out
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(config.experiment.name()));
    let r = experiment::run(&config, &out)?;
    print!("{}", report::render(&r.summary));
    eprintln!("wrote {} files to {}", r.files.len(), out.display());
    Ok(r.summary.pass)
}

fn report_cmd(a: ReportArgs) -> Result<bool> {
    let s: Summary = serde_json::from_str(&read(&a.summary)?)?;
    print!("{}", report::render(&s));
    Ok(s.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Eval(a) => eval(a),
        Command::Dist(a) => dist(a),
        Command::Tmean(a) => tmean(a),
        Command::Frostman(a) => frostman(a),
        Command::Modelspace(a) => modelspace(a),
        Command::Lemma1(a) => lemma1(a),
        Command::Run(a) => run(a),
        Command::Report(a) => report_cmd(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
