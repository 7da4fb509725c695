//! `fracvar` command line.
//!
//! Every subcommand reads its parameters from flags, optionally layered over
//! a JSON config file (`--config`) whose keys are the flag names in
//! snake_case; flags win. Parameters are checked against the owning module
//! before anything is computed.
//!
//! Exit codes: 0 success, 1 computation failure (including rejected
//! parameter values), 2 usage error.

use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::dampedwave::{self, DampedWaveParams};
use crate::eigensolver::{self, UnitsConfig};
use crate::fracops::{self, FracOrder, Scheme};
use crate::grid::{Grid, GridFunction};
use crate::lagrangian::{self, LagrangianSpec, PotentialSpec};
use crate::oscillator::{self, OscillatorParams};
use crate::output;
use crate::verify;
use crate::Direction;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("{module}: {message}")]
    Module { module: &'static str, message: String },
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0} verification check(s) failed")]
    VerifyFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    fn module(module: &'static str, err: impl fmt::Display) -> Self {
        CliError::Module { module, message: err.to_string() }
    }
}

#[derive(Parser, Debug)]
#[command(name = "fracvar", version, about = "Causal/retrocausal fractional variational mechanics")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// JSON file of parameters (flag names in snake_case, plus optional
    /// "command", "grid" and "units"); flags override it
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<CommandArgs>,
}

#[derive(Subcommand, Debug)]
enum CommandArgs {
    /// Causal or retrocausal fractional derivative of a built-in function
    Fracdiff(FracdiffArgs),
    /// Paired equations of motion of a lagrangian
    DeriveEom(DeriveEomArgs),
    /// Damped (causal) or anti-damped (retrocausal) oscillator trajectory
    Oscillate(OscillateArgs),
    /// Lowest eigenpairs of the paired stationary wave equations
    Eigensolve(EigensolveArgs),
    /// Damped stationary wave equation: free solution or hard-wall well modes
    Dampedwave(DampedwaveArgs),
    /// Run the built-in property checks
    Verify(VerifyArgs),
}

impl CommandArgs {
    fn name(&self) -> &'static str {
        match self {
            CommandArgs::Fracdiff(_) => "fracdiff",
            CommandArgs::DeriveEom(_) => "derive-eom",
            CommandArgs::Oscillate(_) => "oscillate",
            CommandArgs::Eigensolve(_) => "eigensolve",
            CommandArgs::Dampedwave(_) => "dampedwave",
            CommandArgs::Verify(_) => "verify",
        }
    }
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum DirectionArg {
    Causal,
    Retrocausal,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Causal => Direction::Causal,
            DirectionArg::Retrocausal => Direction::Retrocausal,
        }
    }
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum SchemeArg {
    /// Grünwald-Letnikov
    Gl,
    /// Product trapezoid
    Trapezoid,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Gl => Scheme::GrunwaldLetnikov,
            SchemeArg::Trapezoid => Scheme::ProductTrapezoid,
        }
    }
}

/// Closed set of test functions accepted by `--fn`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TestFn {
    T,
    T2,
    T3,
    Sin,
    Cos,
    Exp,
    Const,
}

impl TestFn {
    const NAMES: [(&'static str, TestFn); 7] = [
        ("t", TestFn::T),
        ("t^2", TestFn::T2),
        ("t^3", TestFn::T3),
        ("sin(t)", TestFn::Sin),
        ("cos(t)", TestFn::Cos),
        ("exp(t)", TestFn::Exp),
        ("const", TestFn::Const),
    ];

    pub fn eval(self, t: f64) -> f64 {
        match self {
            TestFn::T => t,
            TestFn::T2 => t * t,
            TestFn::T3 => t * t * t,
            TestFn::Sin => t.sin(),
            TestFn::Cos => t.cos(),
            TestFn::Exp => t.exp(),
            TestFn::Const => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        Self::NAMES.iter().find(|(_, f)| *f == self).map(|(s, _)| *s).expect("every variant named")
    }
}

impl std::str::FromStr for TestFn {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let key: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        Self::NAMES.iter().find(|(n, _)| *n == key).map(|(_, f)| *f).ok_or_else(|| {
            let names: Vec<&str> = Self::NAMES.iter().map(|(n, _)| *n).collect();
            format!("unknown function {s:?} (expected one of {})", names.join(", "))
        })
    }
}

impl TryFrom<String> for TestFn {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<TestFn> for String {
    fn from(f: TestFn) -> String {
        f.as_str().to_string()
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default)]
struct OutputArgs {
    /// Output file, replaced atomically; stdout when absent
    #[arg(long = "output", value_name = "PATH")]
    output_path: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default)]
struct GridArgs {
    /// Interval start
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    /// Interval end
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    /// Number of grid points
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default)]
struct UnitsArgs {
    #[arg(long)]
    hbar: Option<f64>,
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    c_light: Option<f64>,
}

impl UnitsArgs {
    fn resolve(&self) -> UnitsConfig {
        let d = UnitsConfig::default();
        UnitsConfig {
            hbar: self.hbar.unwrap_or(d.hbar),
            mass: self.mass.unwrap_or(d.mass),
            c_light: self.c_light.unwrap_or(d.c_light),
        }
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default)]
struct FracdiffArgs {
    /// Derivative order (0 <= alpha <= 2, non-integer orders below 2)
    #[arg(long)]
    alpha: Option<f64>,
    /// One of t, t^2, t^3, sin(t), cos(t), exp(t), const
    #[arg(long = "fn", value_name = "FN")]
    #[serde(rename = "fn")]
    func: Option<TestFn>,
    #[arg(long, value_enum)]
    direction: Option<DirectionArg>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutputArgs,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default)]
struct DeriveEomArgs {
    /// Lagrangian, e.g. "1.0*q[1] + 0.3*q[0.5] + 4.0*q[0]"
    #[arg(long, allow_hyphen_values = true)]
    lagrangian: Option<String>,
    /// Order substituted for every non-integer order before reduction
    #[arg(long)]
    alpha: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutputArgs,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default)]
struct OscillateArgs {
    #[arg(long)]
    m: Option<f64>,
    /// Damping coefficient C >= 0
    #[arg(long)]
    c: Option<f64>,
    /// Stiffness (m omega^2)
    #[arg(long)]
    k: Option<f64>,
    /// Position at the anchor (start for causal, end for retrocausal)
    #[arg(long, allow_negative_numbers = true)]
    q0: Option<f64>,
    /// Velocity at the anchor
    #[arg(long, allow_negative_numbers = true)]
    v0: Option<f64>,
    #[arg(long, value_enum)]
    direction: Option<DirectionArg>,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutputArgs,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default)]
struct EigensolveArgs {
    /// Potential: "free", "harmonic, k", "poly, c0, c1, ..." or "well, L"
    #[arg(long)]
    potential: Option<String>,
    /// Number of eigenpairs
    #[arg(long)]
    count: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    units: UnitsArgs,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutputArgs,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default)]
struct DampedwaveArgs {
    /// Damping factor xi >= 0
    #[arg(long)]
    xi: Option<f64>,
    /// Damping coefficient B; sets xi = m^2 c / (2 hbar B)
    #[arg(long = "B", value_name = "B")]
    #[serde(rename = "B")]
    b_coeff: Option<f64>,
    /// Energy E >= 0
    #[arg(long)]
    energy: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    psi0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    psi0_im: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    dpsi0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    dpsi0_im: Option<f64>,
    /// Emit the first N hard-wall well modes instead of the free solution
    #[arg(long, value_name = "N")]
    well_count: Option<usize>,
    /// Well width
    #[arg(long)]
    length: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    units: UnitsArgs,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutputArgs,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(default)]
struct VerifyArgs {
    /// Report file; stdout when absent
    #[arg(long = "output", value_name = "PATH")]
    output_path: Option<PathBuf>,
}

/// A fully resolved and validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub output_path: Option<PathBuf>,
    /// `None` for plain-text output.
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Fracdiff { grid: Grid, order: FracOrder, func: TestFn, direction: Direction, scheme: Scheme },
    DeriveEom { spec: LagrangianSpec, alpha: Option<f64> },
    Oscillate { params: OscillatorParams, grid: Grid, direction: Direction },
    Eigensolve { potential: PotentialSpec, grid: Grid, units: UnitsConfig, count: usize },
    Dampedwave { params: DampedWaveParams, grid: Grid, psi0: Complex64, dpsi0: Complex64 },
    DampedWell { xi: f64, length: f64, units: UnitsConfig, count: usize },
    Verify,
}

/// Parses `argv` (program name first) into a validated configuration.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&argv)?;
    let file = match &cli.config {
        Some(path) => Some(read_config(path)?),
        None => None,
    };
    let file_command = match file.as_ref().and_then(|f| f.get("command")) {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(other) => {
            return Err(CliError::Usage(format!("config: \"command\" must be a string, got {other}")))
        }
    };
    let command = match (cli.command, &file_command) {
        (Some(c), _) => c,
        (None, Some(name)) => {
            let mut extended = argv.clone();
            extended.push(name.into());
            let matches = Cli::command().try_get_matches_from(extended)?;
            Cli::from_arg_matches(&matches)?.command.expect("subcommand appended")
        }
        (None, None) => {
            return Err(CliError::Usage(
                "no subcommand given (run `fracvar --help` for the list)".to_string(),
            ))
        }
    };
    if let Some(name) = &file_command {
        if name != command.name() {
            return Err(CliError::Usage(format!(
                "config is for {name:?} but the subcommand is {:?}",
                command.name()
            )));
        }
    }
    let file = file.unwrap_or_default();
    match command {
        CommandArgs::Fracdiff(a) => resolve_fracdiff(merge(&file, a)?),
        CommandArgs::DeriveEom(a) => resolve_derive_eom(merge(&file, a)?),
        CommandArgs::Oscillate(a) => resolve_oscillate(merge(&file, a)?),
        CommandArgs::Eigensolve(a) => resolve_eigensolve(merge(&file, a)?),
        CommandArgs::Dampedwave(a) => resolve_dampedwave(merge(&file, a)?),
        CommandArgs::Verify(a) => {
            let a = merge(&file, a)?;
            Ok(RunConfig { command: Command::Verify, output_path: a.output_path, format: None })
        }
    }
}

/// Reads the config file and lifts the nested "grid" and "units" objects to
/// the top level.
fn read_config(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
    let Value::Object(mut map) = value else {
        return Err(CliError::Usage(format!("--config {}: expected a JSON object", path.display())));
    };
    for nested in ["grid", "units"] {
        match map.remove(nested) {
            None => {}
            Some(Value::Object(inner)) => map.extend(inner),
            Some(_) => return Err(CliError::Usage(format!("config: {nested:?} must be an object"))),
        }
    }
    Ok(map)
}

/// Config-file values overlaid by every flag that was given.
fn merge<T>(file: &Map<String, Value>, flags: T) -> Result<T, CliError>
where
    T: Serialize + DeserializeOwned + Default,
{
    let known = match serde_json::to_value(T::default()).expect("plain data") {
        Value::Object(m) => m,
        _ => unreachable!("argument structs serialize to objects"),
    };
    let mut merged = Map::new();
    for (key, value) in file {
        if key == "command" {
            continue;
        }
        if !known.contains_key(key) {
            return Err(CliError::Usage(format!("config: unknown field {key:?}")));
        }
        merged.insert(key.clone(), value.clone());
    }
    if let Value::Object(given) = serde_json::to_value(flags).expect("plain data") {
        merged.extend(given.into_iter().filter(|(_, v)| !v.is_null()));
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Usage(format!("config: {e}")))
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing required parameter --{flag}")))
}

fn grid_from(g: &GridArgs, a: f64, b: f64, n: usize) -> Result<Grid, CliError> {
    Grid::new(g.a.unwrap_or(a), g.b.unwrap_or(b), g.n.unwrap_or(n)).map_err(|e| CliError::module("grid", e))
}

fn resolve_fracdiff(a: FracdiffArgs) -> Result<RunConfig, CliError> {
    let alpha = required(a.alpha, "alpha")?;
    let func = required(a.func, "fn")?;
    let order = FracOrder::new(alpha).map_err(|e| CliError::module("fracops", e))?;
    let grid = grid_from(&a.grid, 0.0, 1.0, 1024)?;
    if grid.len() < order.min_samples() {
        return Err(CliError::module(
            "fracops",
            fracops::FracError::GridTooCoarse { required: order.min_samples(), got: grid.len() },
        ));
    }
    Ok(RunConfig {
        command: Command::Fracdiff {
            grid,
            order,
            func,
            direction: a.direction.unwrap_or(DirectionArg::Causal).into(),
            scheme: a.scheme.unwrap_or(SchemeArg::Gl).into(),
        },
        output_path: a.out.output_path,
        format: Some(a.out.format.unwrap_or(Format::Csv)),
    })
}

fn resolve_derive_eom(a: DeriveEomArgs) -> Result<RunConfig, CliError> {
    let text = required(a.lagrangian, "lagrangian")?;
    if a.out.format == Some(Format::Csv) {
        return Err(CliError::Usage("derive-eom supports --format json only".to_string()));
    }
    let spec = lagrangian::parse_lagrangian(&text).map_err(|e| CliError::module("lagrangian", e))?;
    let spec = match a.alpha {
        Some(alpha) => spec.with_fractional_order(alpha).map_err(|e| CliError::module("lagrangian", e))?,
        None => spec,
    };
    Ok(RunConfig {
        command: Command::DeriveEom { spec, alpha: a.alpha },
        output_path: a.out.output_path,
        format: a.out.format,
    })
}

fn resolve_oscillate(a: OscillateArgs) -> Result<RunConfig, CliError> {
    let params = OscillatorParams::new(
        a.m.unwrap_or(1.0),
        a.c.unwrap_or(0.0),
        a.k.unwrap_or(1.0),
        a.q0.unwrap_or(1.0),
        a.v0.unwrap_or(0.0),
    )
    .map_err(|e| CliError::module("oscillator", e))?;
    Ok(RunConfig {
        command: Command::Oscillate {
            params,
            grid: grid_from(&a.grid, 0.0, 10.0, 10_001)?,
            direction: a.direction.unwrap_or(DirectionArg::Causal).into(),
        },
        output_path: a.out.output_path,
        format: Some(a.out.format.unwrap_or(Format::Csv)),
    })
}

fn resolve_eigensolve(a: EigensolveArgs) -> Result<RunConfig, CliError> {
    let text = required(a.potential, "potential")?;
    let potential = lagrangian::parse_potential(&text).map_err(|e| CliError::module("eigensolver", e))?;
    let units = a.units.resolve();
    let grid = match potential {
        PotentialSpec::InfiniteWell { length } => {
            let start = a.grid.a.unwrap_or(0.0);
            grid_from(&a.grid, start, start + length, 2000)?
        }
        _ => grid_from(&a.grid, -12.0, 12.0, 2000)?,
    };
    let count = a.count.unwrap_or(5);
    // builds and discards the matrix so every precondition is checked up front
    let h = eigensolver::build_hamiltonian(&potential, &grid, &units)
        .map_err(|e| CliError::module("eigensolver", e))?;
    if count > h.matrix.dim() {
        return Err(CliError::module(
            "eigensolver",
            eigensolver::EigenError::TooManyStates { requested: count, dim: h.matrix.dim() },
        ));
    }
    Ok(RunConfig {
        command: Command::Eigensolve { potential, grid, units, count },
        output_path: a.out.output_path,
        format: Some(a.out.format.unwrap_or(Format::Json)),
    })
}

fn resolve_dampedwave(a: DampedwaveArgs) -> Result<RunConfig, CliError> {
    let units = a.units.resolve();
    let xi = match (a.xi, a.b_coeff) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --xi or --B, not both".to_string())),
        (Some(xi), None) => xi,
        (None, Some(b)) => dampedwave::xi_from_params(units.mass, units.c_light, units.hbar, b)
            .map_err(|e| CliError::module("dampedwave", e))?,
        (None, None) => 0.0,
    };
    let format = Some(a.out.format.unwrap_or(Format::Csv));
    if let Some(count) = a.well_count {
        let length = a.length.unwrap_or(1.0);
        // validates xi, length and units without running the shooting pass
        dampedwave::damped_well_modes(xi, length, &units, 0)
            .map_err(|e| CliError::module("dampedwave", e))?;
        return Ok(RunConfig {
            command: Command::DampedWell { xi, length, units, count },
            output_path: a.out.output_path,
            format,
        });
    }
    let params = DampedWaveParams::new(xi, a.energy.unwrap_or(0.5), units)
        .map_err(|e| CliError::module("dampedwave", e))?;
    let psi0 = Complex64::new(a.psi0.unwrap_or(1.0), a.psi0_im.unwrap_or(0.0));
    let dpsi0 = Complex64::new(a.dpsi0.unwrap_or(0.0), a.dpsi0_im.unwrap_or(0.0));
    if !(psi0.is_finite() && dpsi0.is_finite()) {
        return Err(CliError::module("dampedwave", "initial values must be finite"));
    }
    Ok(RunConfig {
        command: Command::Dampedwave { params, grid: grid_from(&a.grid, 0.0, 10.0, 10_001)?, psi0, dpsi0 },
        output_path: a.out.output_path,
        format,
    })
}

/// Executes a validated configuration and writes its output.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let format = config.format;
    let (text, failures) = match &config.command {
        Command::Fracdiff { grid, order, func, direction, scheme } => {
            let f = GridFunction::from_fn(*grid, |t| func.eval(t));
            let d = fracops::frac_deriv(&f, *order, *scheme, *direction)
                .map_err(|e| CliError::module("fracops", e))?;
            let text = match format {
                Some(Format::Json) => output::json(&json!({
                    "alpha": order.alpha(),
                    "fn": func.as_str(),
                    "direction": direction.as_str(),
                    "t": grid.points().collect::<Vec<_>>(),
                    "f": f.samples(),
                    "derivative": d.samples(),
                })),
                _ => output::csv(
                    &["t", "f", "derivative"],
                    grid.points().zip(f.samples()).zip(d.samples()).map(|((t, &v), &dv)| [t, v, dv]),
                ),
            };
            (text, 0)
        }
        Command::DeriveEom { spec, alpha } => (derive_eom_output(spec, *alpha, format)?, 0),
        Command::Oscillate { params, grid, direction } => {
            let traj =
                oscillator::solve(params, grid, *direction).map_err(|e| CliError::module("oscillator", e))?;
            let (q, v) = (traj.position(), traj.velocity());
            let text = match format {
                Some(Format::Json) => output::json(&json!({
                    "direction": direction.as_str(),
                    "regime": oscillator::classify_damping(params).as_str(),
                    "t": grid.points().collect::<Vec<_>>(),
                    "q": q.samples(),
                    "v": v.samples(),
                })),
                _ => output::csv(
                    &["t", "q", "v"],
                    grid.points().zip(q.samples()).zip(v.samples()).map(|((t, &q), &v)| [t, q, v]),
                ),
            };
            (text, 0)
        }
        Command::Eigensolve { potential, grid, units, count } => {
            let fail = |e| CliError::module("eigensolver", e);
            let h = eigensolver::build_hamiltonian(potential, grid, units).map_err(fail)?;
            let sol = eigensolver::solve_spectrum(&h, *count).map_err(fail)?;
            let text = match format {
                Some(Format::Csv) => {
                    let mut header = vec!["x".to_string()];
                    header.extend((0..sol.len()).map(|i| format!("psi_{i}")));
                    let header: Vec<&str> = header.iter().map(String::as_str).collect();
                    let rows = (0..grid.len()).map(|i| {
                        let mut row = vec![grid.x(i)];
                        row.extend(sol.eigenfunctions.iter().map(|f| f.samples()[i]));
                        row
                    });
                    output::csv(&header, rows)
                }
                _ => output::json(&sol.spectrum_json()),
            };
            (text, 0)
        }
        Command::Dampedwave { params, grid, psi0, dpsi0 } => {
            let sol = dampedwave::solve_damped_free(params, grid, *psi0, *dpsi0)
                .map_err(|e| CliError::module("dampedwave", e))?;
            let text = match format {
                Some(Format::Json) => output::json(&dampedwave::regime_report(params)),
                _ => output::csv(
                    &["x", "Re(psi)", "Im(psi)", "abs(psi)"],
                    grid.points().zip(sol.psi.samples()).map(|(x, z)| [x, z.re, z.im, z.norm()]),
                ),
            };
            (text, 0)
        }
        Command::DampedWell { xi, length, units, count } => {
            let modes = dampedwave::damped_well_modes(*xi, *length, units, *count)
                .map_err(|e| CliError::module("dampedwave", e))?;
            let text = match format {
                Some(Format::Json) => output::json(&json!({"xi": xi, "length": length, "modes": modes})),
                _ => output::csv(
                    &["n", "energy", "shooting_residual"],
                    modes.iter().map(|m| [m.n as f64, m.energy, m.shooting_residual]),
                ),
            };
            (text, 0)
        }
        Command::Verify => {
            let results = verify::run_all();
            let mut text = String::new();
            for r in &results {
                text.push_str(&r.line());
                text.push('\n');
            }
            (text, results.iter().filter(|r| !r.passed).count())
        }
    };
    output::emit(config.output_path.as_deref(), &text)?;
    if failures > 0 {
        return Err(CliError::VerifyFailed(failures));
    }
    Ok(())
}

fn derive_eom_output(
    spec: &LagrangianSpec,
    alpha: Option<f64>,
    format: Option<Format>,
) -> Result<String, CliError> {
    let fail = |e| CliError::module("lagrangian", e);
    let causal = lagrangian::derive_causal_eom(spec).map_err(fail)?;
    let retro = lagrangian::derive_retrocausal_eom(spec).map_err(fail)?;
    let reduced = [&causal, &retro].map(lagrangian::reduce_integer_orders);
    if format == Some(Format::Json) {
        let ode_json = |r: &Result<lagrangian::ClassicalOde, _>| match r {
            Ok(o) => {
                json!({"mass": o.mass_coeff, "damping": o.damping_coeff, "stiffness": o.stiffness_coeff})
            }
            Err(_) => Value::Null,
        };
        return Ok(output::json(&json!({
            "lagrangian": spec.render(),
            "alpha": alpha,
            "degenerate": causal.degenerate,
            "causal": causal.to_json(),
            "retrocausal": retro.to_json(),
            "reduced": {"causal": ode_json(&reduced[0]), "retrocausal": ode_json(&reduced[1])},
        })));
    }
    let mut text = format!(
        "causal: {}\nretrocausal: {}\n",
        lagrangian::render_eom(&causal),
        lagrangian::render_eom(&retro)
    );
    for (name, r) in ["causal", "retrocausal"].iter().zip(&reduced) {
        match r {
            Ok(ode) => text.push_str(&format!("{name} reduced: {}\n", ode.render())),
            Err(e) => text.push_str(&format!("{name} reduced: not reducible ({e})\n")),
        }
    }
    if causal.degenerate {
        text.push_str("degenerate: no terms and no potential\n");
    }
    Ok(text)
}

/// Runs the command line and returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(argv).and_then(|config| run(&config)) {
        Ok(()) => 0,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(e) => {
            eprintln!("fracvar: {e}");
            e.exit_code()
        }
    }
}
