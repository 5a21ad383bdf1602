//! `ncs`: evaluate nonlinear coherent-state quantities on grids, run the
//! transform between thermal P and Q functions, and run verification suites.
//!
//! Exit status: 0 success, 1 a verification check failed, 2 usage or
//! configuration error, 3 numerical failure.

mod grid;
mod output;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use grid::Grid;
use ncs_core::hyper::{HypergeometricModel, SeriesBudget};
use ncs_core::meijer::{moment_check, ContourSpec};
use ncs_core::pho::{bargmann_k, pho_model, PhoParams};
use ncs_core::quadrature::RadialQuadrature;
use ncs_core::states::{identity_resolution_check, measure_weight, normalization, overlap, ComplexLabel, Flavor, StateFamily};
use ncs_core::thermal::{husimi_function, husimi_q, p_function, p_moment_condition_check, p_quasi, ThermalParams};
use ncs_core::transform::Transformer;
use ncs_core::verify::{run_suite, VerifyOptions, SUITES};
use output::{emit, Cell, Format, Table};
use rayon::prelude::*;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ncs", version, about = "Nonlinear coherent states: thermal P/Q functions and their transform pair")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a quantity on a grid of x = |z|².
    Eval(EvalArgs),
    /// Transform thermal P to Q (or back) and compare with the closed form.
    Transform(TransformArgs),
    /// Run a verification suite and print its JSON report.
    Verify(VerifyArgs),
    /// Moment table of the measure weight, the resolution of identity, or P.
    Moments(MomentsArgs),
    /// Bargmann index of a pseudoharmonic diatomic molecule.
    PhoK(PhoKArgs),
}

#[derive(Args)]
struct Common {
    /// Preset (`canonical`, `pho:<k>`) or path to a model JSON file.
    #[arg(long, default_value = "canonical")]
    model: String,
    #[arg(long, value_enum, default_value_t = FlavorArg::Bg)]
    flavor: FlavorArg,
    /// `gl:<order>`, `adaptive:<tol>` or `auto`.
    #[arg(long, default_value = "auto")]
    quad: String,
    /// Maximum number of series terms.
    #[arg(long, default_value_t = SeriesBudget::default().max_terms)]
    max_terms: usize,
    /// Relative truncation tolerance of the series.
    #[arg(long, default_value_t = SeriesBudget::default().rel_tol)]
    series_tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    quantity: Quantity,
    /// Mean thermal occupation, for `q` and `p`.
    #[arg(long, default_value_t = 1.0)]
    nbar: f64,
    /// `xmin:xmax:steps[:log]`.
    #[arg(long, default_value = "0:4:5")]
    grid: Grid,
    /// Reference label |z0|² for `overlap`.
    #[arg(long, default_value_t = 1.0)]
    ref_x: f64,
    /// Phase of the reference label relative to the grid labels.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    ref_phase: f64,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum)]
    direction: Direction,
    #[arg(long, default_value_t = 1.0)]
    nbar: f64,
    #[arg(long, default_value = "0.1:10:6:log")]
    grid: Grid,
}

#[derive(Args)]
struct VerifyArgs {
    /// One of canonical, pho-bg, pho-kp, moments, all.
    #[arg(long)]
    suite: String,
    /// Replace every per-check tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value = "auto")]
    quad: String,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct MomentsArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = MomentKind::Weight)]
    kind: MomentKind,
    #[arg(long, default_value_t = 10)]
    n_max: usize,
    /// Mean thermal occupation, for `--kind p`.
    #[arg(long, default_value_t = 1.0)]
    nbar: f64,
}

#[derive(Args)]
struct PhoKArgs {
    /// Rotational quantum number.
    #[arg(long = "J")]
    j: u32,
    /// Reduced mass in kg.
    #[arg(long)]
    mass: f64,
    /// Angular frequency in rad/s.
    #[arg(long)]
    omega: f64,
    /// Equilibrium distance in m.
    #[arg(long)]
    r0: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Bg,
    Kp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    Q,
    P,
    Overlap,
    Weight,
    Norm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    PToQ,
    QToP,
}

#[derive(Clone, Copy, ValueEnum)]
enum MomentKind {
    /// ∫ xⁿ G(x) dx against the Mellin transform.
    Weight,
    /// ∫ h xⁿ dx against the structure function.
    Identity,
    /// ∫ h P xⁿ dx against the thermal diagonal.
    P,
}

/// A configuration problem, reported with exit status 2.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl fmt::Display) -> anyhow::Error {
    anyhow!(Usage(msg.to_string()))
}

/// Resolved numerical settings shared by the grid subcommands.
struct Setup {
    fam: StateFamily,
    quad: RadialQuadrature,
    contour: ContourSpec,
    budget: SeriesBudget,
    format: Format,
    output: Option<PathBuf>,
}

impl Common {
    fn setup(&self) -> Result<Setup> {
        let model = load_model(&self.model)?;
        let flavor = match self.flavor {
            FlavorArg::Bg => Flavor::Bg,
            FlavorArg::Kp => Flavor::Kp,
        };
        let fam = StateFamily::new(model, flavor).map_err(usage)?;
        let quad = RadialQuadrature::parse(&self.quad).map_err(usage)?;
        let budget = SeriesBudget::new(self.max_terms, self.series_tol, SeriesBudget::default().abs_tol).map_err(usage)?;
        Ok(Setup {
            fam,
            quad,
            contour: ContourSpec::default(),
            budget,
            format: self.format,
            output: self.output.clone(),
        })
    }
}

fn load_model(source: &str) -> Result<HypergeometricModel> {
    let path = Path::new(source);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("reading {source}: {e}")))?;
        HypergeometricModel::from_json(&text).map_err(|e| usage(format!("{source}: {e}")))
    } else {
        HypergeometricModel::from_preset(source).map_err(usage)
    }
}

impl Setup {
    fn check_grid(&self, grid: &Grid) -> Result<()> {
        let radius = self.fam.radius();
        if grid.upper() >= radius {
            return Err(usage(ncs_core::Error::OutsideRadius { x: grid.upper(), radius }));
        }
        Ok(())
    }

    fn finish(&self, table: Table) -> Result<()> {
        emit(&table.render(self.format), self.output.as_deref())
    }
}

fn thermal(nbar: f64) -> Result<ThermalParams> {
    ThermalParams::new(nbar, 0.5).map_err(usage)
}

/// P is an ordinary function only above zero temperature.
fn thermal_for_p(nbar: f64) -> Result<ThermalParams> {
    if nbar <= 0.0 {
        return Err(usage(format!("the P function needs nbar > 0, got {nbar}")));
    }
    thermal(nbar)
}

/// Evaluate `f` at every grid point in parallel, keeping grid order.
fn on_grid<T, F>(grid: &Grid, op: &str, f: F) -> Result<Vec<(f64, T)>>
where
    T: Send,
    F: Fn(f64) -> ncs_core::Result<T> + Sync,
{
    grid.points()
        .into_par_iter()
        .map(|x| f(x).map(|v| (x, v)).with_context(|| format!("{op} failed at x = {x}")))
        .collect()
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let s = args.common.setup()?;
    s.check_grid(&args.grid)?;
    let (fam, contour, budget) = (&s.fam, &s.contour, &s.budget);
    let values = match args.quantity {
        Quantity::Q => {
            let t = thermal(args.nbar)?;
            on_grid(&args.grid, "husimi_q", |x| husimi_q(fam, &t, x, budget))?
        }
        Quantity::P => {
            let t = thermal_for_p(args.nbar)?;
            on_grid(&args.grid, "p_quasi", |x| p_quasi(fam, &t, x, contour, budget))?
        }
        Quantity::Overlap => {
            let z0 = ComplexLabel::new(args.ref_x, args.ref_phase).map_err(usage)?;
            if args.ref_x >= fam.radius() {
                return Err(usage(ncs_core::Error::OutsideRadius { x: args.ref_x, radius: fam.radius() }));
            }
            on_grid(&args.grid, "overlap", |x| {
                Ok(overlap(fam, &z0, &ComplexLabel::new(x, 0.0)?, budget)?.norm())
            })?
        }
        Quantity::Weight => on_grid(&args.grid, "measure_weight", |x| measure_weight(fam, x, contour, budget))?,
        Quantity::Norm => on_grid(&args.grid, "normalization", |x| normalization(fam, x, budget))?,
    };
    s.finish(Table {
        header: vec!["x", "value"],
        rows: values.into_iter().map(|(x, v)| vec![Cell::Num(x), Cell::Num(v)]).collect(),
    })
}

fn cmd_transform(args: &TransformArgs) -> Result<()> {
    let s = args.common.setup()?;
    s.check_grid(&args.grid)?;
    let (fam, contour, budget) = (&s.fam, &s.contour, &s.budget);
    let t = thermal_for_p(args.nbar)?;
    let engine = Transformer::new(fam, &s.quad, contour, budget).map_err(usage)?;
    let rows = match args.direction {
        Direction::PToQ => {
            let p = p_function(fam, &t, contour, budget);
            on_grid(&args.grid, "gft", |x| Ok((engine.gft(&p, x)?, husimi_q(fam, &t, x, budget)?)))?
        }
        Direction::QToP => {
            let q = husimi_function(fam, &t, budget);
            on_grid(&args.grid, "gft_inverse", |x| {
                Ok((engine.gft_inverse(&q, x)?, p_quasi(fam, &t, x, contour, budget)?))
            })?
        }
    };
    s.finish(Table {
        header: vec!["x", "transformed", "closed_form", "rel_err"],
        rows: rows
            .into_iter()
            .map(|(x, (got, want))| {
                let err = if want == 0.0 { got.abs() } else { (got - want).abs() / want.abs() };
                vec![Cell::Num(x), Cell::Num(got), Cell::Num(want), Cell::Num(err)]
            })
            .collect(),
    })
}

fn cmd_moments(args: &MomentsArgs) -> Result<()> {
    let s = args.common.setup()?;
    let (fam, quad, contour, budget) = (&s.fam, &s.quad, &s.contour, &s.budget);
    let rows: Vec<(usize, f64, f64, f64)> = match args.kind {
        MomentKind::Weight => moment_check(&fam.weight(), args.n_max, quad, contour, budget)
            .context("moment_check failed")?
            .into_iter()
            .map(|r| (r.n, r.computed, r.expected, r.rel_err))
            .collect(),
        MomentKind::Identity => identity_resolution_check(fam, args.n_max, quad, contour, budget)
            .context("identity_resolution_check failed")?
            .into_iter()
            .map(|r| (r.n, r.computed, r.expected, r.rel_err))
            .collect(),
        MomentKind::P => p_moment_condition_check(fam, &thermal_for_p(args.nbar)?, args.n_max, quad, contour, budget)
            .context("p_moment_condition_check failed")?
            .into_iter()
            .map(|r| (r.n, r.computed, r.expected, r.rel_err))
            .collect(),
    };
    s.finish(Table {
        header: vec!["n", "computed", "expected", "rel_err"],
        rows: rows
            .into_iter()
            .map(|(n, c, e, r)| vec![Cell::Int(n), Cell::Num(c), Cell::Num(e), Cell::Num(r)])
            .collect(),
    })
}

fn cmd_pho_k(args: &PhoKArgs) -> Result<()> {
    let params = PhoParams::new(args.mass, args.omega, args.r0, args.j).map_err(usage)?;
    let k = bargmann_k(&params);
    let model = pho_model(&k).context("pho_model failed")?;
    let text = match args.format {
        Format::Csv => format!("k = {:.16e}\n{}\n", k.k, model.to_json()),
        Format::Json => {
            let model: serde_json::Value = serde_json::from_str(&model.to_json())?;
            format!("{}\n", serde_json::json!({ "k": k.k, "model": model }))
        }
    };
    emit(&text, None)
}

/// Returns whether every check passed.
fn cmd_verify(args: &VerifyArgs) -> Result<bool> {
    if !SUITES.contains(&args.suite.as_str()) {
        return Err(usage(format!("unknown suite `{}`; expected one of {}", args.suite, SUITES.join(", "))));
    }
    if let Some(t) = args.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(usage(format!("tolerance must be positive, got {t}")));
        }
    }
    let opts = VerifyOptions {
        quad: RadialQuadrature::parse(&args.quad).map_err(usage)?,
        tolerance: args.tol,
        ..VerifyOptions::default()
    };
    let report = run_suite(&args.suite, &opts).with_context(|| format!("suite {} broke down", args.suite))?;
    let failed = report.checks.iter().filter(|c| !c.pass).count();
    log::info!(
        "suite {}: {} checks, {failed} failed, {:.2} s",
        report.suite,
        report.checks.len(),
        report.wall_time_s
    );
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    emit(&text, args.output.as_deref())?;
    Ok(report.pass)
}

fn init_logging() {
    let level = match std::env::var("NCS_LOG").as_deref() {
        Ok("debug") => log::LevelFilter::Debug,
        Ok("info") => log::LevelFilter::Info,
        Ok("quiet") => log::LevelFilter::Off,
        _ => log::LevelFilter::Warn,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
}

fn main() -> ExitCode {
    init_logging();
    // clap exits with status 2 on malformed arguments
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a).map(|_| true),
        Command::Transform(a) => cmd_transform(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Moments(a) => cmd_moments(a).map(|_| true),
        Command::PhoK(a) => cmd_pho_k(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
