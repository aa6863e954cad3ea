//! Command line front end.
//!
//! Every subcommand resolves its inputs from flags first and then from an
//! optional `key=value` config file, runs the library, and emits records as
//! CSV (the default) or JSON lines. Exit codes: 0 success, 1 usage or
//! inadmissible input, 2 a solve that did not converge.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::cylinder::{check_assumptions, AssumptionReport, CylinderField};
use crate::omega_system::{barrier_check, OmegaSystem};
use crate::oracles::{
    a0_angular_k, bsw_lambda_with, gordon_omega_profile, jacobi_theta_connector, sommerfeld, BswConvention,
    SommerfeldIndex,
};
use crate::params::{spectroscopic_label, validate, ModelParams, SpectroLabel, WindingTarget, ALPHA_S};
use crate::solver::{solve_pair, BoundState, SolveOptions};
use crate::theta_system::ThetaSystem;
use crate::wavefunction::wave_profile;
use crate::Error;

/// Environment variable holding the scan worker count.
pub const WORKERS_ENV: &str = "ZGKN_WORKERS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "zgkn", version, about = "Dirac bound states on the zero-G Kerr-Newman spacetime")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for one bound state.
    Solve(SolveArgs),
    /// Sweep gamma, Z or a and solve at every point.
    Scan(ScanArgs),
    /// Evaluate a closed-form reference value.
    Oracle {
        #[command(subcommand)]
        which: OracleCmd,
    },
    /// Spectroscopic label of a winding pair.
    Label(LabelArgs),
    /// Radial and angular profiles of a solved state.
    Wavefunction(WaveArgs),
    /// Sample the cylinder assumptions and the radial barrier at a solved state.
    Check(CheckArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct PhysicsArgs {
    /// Ring radius a > 0.
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    /// Coupling gamma < 0.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "z")]
    gamma: Option<f64>,
    /// Nuclear charge; gamma = -Z * alpha.
    #[arg(long = "Z", id = "z", value_name = "Z", allow_negative_numbers = true)]
    z: Option<f64>,
    /// Azimuthal half-integer kappa.
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// Plain-text key=value file; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
struct WindingArgs {
    /// Angular winding.
    #[arg(long, allow_negative_numbers = true)]
    ntheta: Option<i64>,
    /// Radial winding.
    #[arg(long, allow_negative_numbers = true)]
    nomega: Option<i64>,
}

#[derive(Args, Debug, Clone, Default)]
struct SolverArgs {
    /// Outer tolerance on the energy iterates.
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration cap for the energy fixed point.
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args, Debug, Clone, Default)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Sweep {
    Gamma,
    #[value(name = "Z")]
    Z,
    A,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    physics: PhysicsArgs,
    #[command(flatten)]
    winding: WindingArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    physics: PhysicsArgs,
    #[command(flatten)]
    winding: WindingArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Swept parameter.
    #[arg(long, value_enum)]
    sweep: Option<Sweep>,
    #[arg(long, allow_negative_numbers = true)]
    from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    to: Option<f64>,
    /// Number of sweep points, at least 2.
    #[arg(long)]
    steps: Option<usize>,
    /// Geometric spacing.
    #[arg(long)]
    log: bool,
    /// Winding pairs as `ntheta:nomega`, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    targets: Option<String>,
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    /// Sommerfeld fine-structure energy.
    Sommerfeld {
        #[arg(long = "M")]
        big_m: u32,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, allow_negative_numbers = true, conflicts_with = "z")]
        gamma: Option<f64>,
        #[arg(long = "Z", id = "z", value_name = "Z", allow_negative_numbers = true)]
        z: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Second-order small-a series for the angular eigenvalue.
    Bsw {
        #[arg(long, allow_negative_numbers = true)]
        kappa: f64,
        #[arg(long = "N", allow_negative_numbers = true)]
        big_n: i64,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long = "E", allow_negative_numbers = true)]
        energy: f64,
        #[arg(long, value_enum, default_value = "printed")]
        convention: Convention,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Spin-orbit number k of the flat-space angular eigenvalue.
    K {
        #[arg(long = "N", allow_negative_numbers = true)]
        big_n: i64,
        #[arg(long, allow_negative_numbers = true)]
        kappa: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closed-form angular connector at a = 0.
    Jacobi {
        #[arg(long = "N", allow_negative_numbers = true)]
        big_n: i64,
        #[arg(long, allow_negative_numbers = true)]
        kappa: f64,
        #[arg(long)]
        theta: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closed-form radial phase at a = 0.
    Gordon {
        #[arg(long = "M")]
        big_m: u32,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, allow_negative_numbers = true, conflicts_with = "z")]
        gamma: Option<f64>,
        #[arg(long = "Z", id = "z", value_name = "Z", allow_negative_numbers = true)]
        z: Option<f64>,
        #[arg(long)]
        r: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Convention {
    Printed,
    SignCorrected,
}

#[derive(Args, Debug)]
struct LabelArgs {
    #[arg(long, allow_negative_numbers = true)]
    kappa: f64,
    #[command(flatten)]
    winding: WindingArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct WaveArgs {
    #[command(flatten)]
    physics: PhysicsArgs,
    #[command(flatten)]
    winding: WindingArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Half the number of grid intervals in r and in theta.
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[command(flatten)]
    physics: PhysicsArgs,
    #[command(flatten)]
    winding: WindingArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Sample counts along the axis and around the circle.
    #[arg(long, default_value_t = 64)]
    nx: usize,
    #[arg(long, default_value_t = 64)]
    ny: usize,
    /// Points sampled along the barrier line.
    #[arg(long, default_value_t = 401)]
    barrier_grid: usize,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Solve(Error),
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Solve(Error::Inadmissible(_) | Error::InvalidArgument(_)) => EXIT_USAGE,
            CliError::Solve(_) => EXIT_NOT_CONVERGED,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Solve(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let (name, result) = dispatch(cli.command, stderr);
    let result = result.and_then(|out| match out.path {
        Some(path) => std::fs::write(&path, &out.bytes)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => stdout.write_all(&out.bytes).and_then(|_| stdout.flush()).map_err(|e| CliError::Io(e.to_string())),
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(err) => {
            let _ = match &err {
                CliError::Usage(msg) => writeln!(stderr, "error: {msg}\n\n{}", usage_of(name)),
                CliError::Solve(e) => writeln!(stderr, "error: {e}"),
                CliError::Io(msg) => writeln!(stderr, "error: {msg}"),
            };
            err.code()
        }
    }
}

fn usage_of(sub: &str) -> String {
    let mut cmd = Cli::command();
    cmd.build();
    match cmd.find_subcommand_mut(sub) {
        Some(s) => format!("{}\n\nFor more information, try '--help'.", s.render_usage()),
        None => cmd.render_usage().to_string(),
    }
}

fn dispatch(command: Command, stderr: &mut dyn Write) -> (&'static str, CliResult<Emitted>) {
    match command {
        Command::Solve(a) => ("solve", cmd_solve(a)),
        Command::Scan(a) => ("scan", cmd_scan(a, stderr)),
        Command::Oracle { which } => ("oracle", cmd_oracle(which)),
        Command::Label(a) => ("label", cmd_label(a)),
        Command::Wavefunction(a) => ("wavefunction", cmd_wavefunction(a)),
        Command::Check(a) => ("check", cmd_check(a)),
    }
}

// ---------------------------------------------------------------------------
// config file

const CONFIG_KEYS: &[&str] = &[
    "a", "gamma", "Z", "kappa", "ntheta", "nomega", "tol", "max_iter", "format", "points", "sweep", "from",
    "to", "steps", "log", "targets",
];

/// Values read from a `key=value` file. Blank lines and `#` comments are skipped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key=value", no + 1))?;
            let k = k.trim().replace('-', "_");
            if !CONFIG_KEYS.contains(&k.as_str()) {
                return Err(format!("config line {}: unknown key `{k}`", no + 1));
            }
            if values.insert(k.clone(), v.trim().to_string()).is_some() {
                return Err(format!("config line {}: duplicate key `{k}`", no + 1));
            }
        }
        Ok(Self { values })
    }

    fn load(path: Option<&Path>) -> CliResult<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
                Self::parse(&text).map_err(CliError::Usage)
            }
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config key `{key}`: cannot parse `{v}`"))),
        }
    }
}

fn pick<T: std::str::FromStr>(flag: Option<T>, cfg: &Config, key: &str) -> CliResult<Option<T>> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.parsed(key),
    }
}

fn required<T>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Usage(format!("missing required value --{flag} (flag or config key)")))
}

/// Coupling from `--gamma`/`--Z` flags, then from the config.
fn pick_gamma(gamma: Option<f64>, z: Option<f64>, cfg: &Config) -> CliResult<Option<f64>> {
    if let Some(g) = gamma {
        return Ok(Some(g));
    }
    if let Some(z) = z {
        return Ok(Some(-z * ALPHA_S));
    }
    let g: Option<f64> = cfg.parsed("gamma")?;
    let z: Option<f64> = cfg.parsed("Z")?;
    match (g, z) {
        (Some(_), Some(_)) => Err(CliError::Usage("config sets both gamma and Z".into())),
        (Some(g), None) => Ok(Some(g)),
        (None, Some(z)) => Ok(Some(-z * ALPHA_S)),
        (None, None) => Ok(None),
    }
}

struct Resolved {
    cfg: Config,
    a: Option<f64>,
    gamma: Option<f64>,
    kappa: Option<f64>,
    target: WindingTarget,
    opts: SolveOptions,
    format: Format,
}

impl Resolved {
    fn new(p: &PhysicsArgs, w: &WindingArgs, s: &SolverArgs, o: &OutputArgs) -> CliResult<Self> {
        let cfg = Config::load(p.config.as_deref())?;
        let a = pick(p.a, &cfg, "a")?;
        let gamma = pick_gamma(p.gamma, p.z, &cfg)?;
        let kappa = pick(p.kappa, &cfg, "kappa")?;
        let n_theta = pick(w.ntheta, &cfg, "ntheta")?.unwrap_or(0);
        let n_omega = pick(w.nomega, &cfg, "nomega")?.unwrap_or(0);
        let mut opts = SolveOptions::default();
        if let Some(t) = pick(s.tol, &cfg, "tol")? {
            opts.tol = t;
        }
        if let Some(m) = pick(s.max_iter, &cfg, "max_iter")? {
            opts.max_iter = m;
        }
        let format = match o.format {
            Some(f) => f,
            None => match cfg.get("format") {
                None => Format::Csv,
                Some(v) => Format::from_str(v, true).map_err(|_| CliError::Usage(format!("unknown format `{v}`")))?,
            },
        };
        Ok(Self { cfg, a, gamma, kappa, target: WindingTarget::new(n_theta, n_omega), opts, format })
    }

    fn params(&self) -> CliResult<ModelParams> {
        let a = required(self.a, "a")?;
        let gamma = required(self.gamma, "gamma or --Z")?;
        let kappa = required(self.kappa, "kappa")?;
        Ok(ModelParams::new(a, gamma, kappa))
    }
}

/// Rejects inadmissible inputs before any numerical work.
fn admissible(params: &ModelParams, target: WindingTarget) -> CliResult<SpectroLabel> {
    let check = validate(params, target);
    if !check.accepted {
        return Err(CliError::Solve(Error::Inadmissible(check.reasons.join("; "))));
    }
    Ok(spectroscopic_label(target, params.kappa)?)
}

// ---------------------------------------------------------------------------
// records and emission

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    F(f64),
    I(i64),
    B(bool),
    S(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(x) => format_sig(*x),
            Cell::I(i) => i.to_string(),
            Cell::B(b) => b.to_string(),
            Cell::S(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::F(x) if x.is_finite() => serde_json::to_string(x).unwrap_or_else(|_| "null".into()),
            Cell::F(_) | Cell::Empty => "null".into(),
            Cell::I(i) => i.to_string(),
            Cell::B(b) => b.to_string(),
            Cell::S(s) => serde_json::to_string(s).unwrap_or_else(|_| "null".into()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}
impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::I(v)
    }
}
impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::I(v as i64)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::B(v)
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}
impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, Default)]
struct Record(Vec<(&'static str, Cell)>);

impl Record {
    fn with(mut self, key: &'static str, v: impl Into<Cell>) -> Self {
        self.0.push((key, v.into()));
        self
    }

    fn json(&self) -> String {
        let mut s = String::from("{");
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "\"{k}\":{}", v.json());
        }
        s.push('}');
        s
    }
}

/// Rounds to 12 significant digits and prints the shortest decimal that
/// round-trips the rounded value.
pub fn format_sig(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if (1e-4..1e12).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn render(records: &[Record], format: Format, comments: &[String]) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => {
            for c in comments {
                let _ = writeln!(buf, "# {c}");
            }
            let mut w = csv::Writer::from_writer(&mut buf);
            if let Some(first) = records.first() {
                w.write_record(first.0.iter().map(|(k, _)| *k)).map_err(csv_err)?;
            }
            for r in records {
                w.write_record(r.0.iter().map(|(_, v)| v.csv())).map_err(csv_err)?;
            }
            w.flush().map_err(|e| CliError::Io(e.to_string()))?;
        }
        Format::Json => {
            for r in records {
                let _ = writeln!(buf, "{}", r.json());
            }
        }
    }
    Ok(buf)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Rendered bytes and where they go (stdout when `path` is `None`).
struct Emitted {
    bytes: Vec<u8>,
    path: Option<PathBuf>,
}

fn deliver(bytes: Vec<u8>, output: &OutputArgs) -> CliResult<Emitted> {
    Ok(Emitted { bytes, path: output.output.clone() })
}

fn emit(records: &[Record], format: Format, comments: &[String], output: &OutputArgs) -> CliResult<Emitted> {
    deliver(render(records, format, comments)?, output)
}

fn params_record(p: &ModelParams) -> Record {
    Record::default().with("a", p.a).with("gamma", p.gamma).with("Z", p.z()).with("kappa", p.kappa)
}

fn label_record(r: Record, l: &SpectroLabel) -> Record {
    r.with("label", l.to_string())
        .with("n", l.n)
        .with("ell", l.ell)
        .with("j", l.j)
        .with("m_j", l.m_j)
        .with("k", l.k)
        .with("M", l.big_m)
        .with("N", l.big_n)
}

fn state_record(s: &BoundState) -> Record {
    let c = &s.convergence;
    let r = params_record(&s.params)
        .with("n_theta", s.target.n_theta)
        .with("n_omega", s.target.n_omega)
        .with("E", s.energy)
        .with("lambda", s.lambda);
    label_record(r, &s.label)
        .with("iterations", c.iterations)
        .with("delta_e", c.delta_e)
        .with("residual_lambda", c.residual_lambda)
        .with("residual_e", c.residual_e)
        .with("contraction_ratio", c.contraction_ratio)
        .with("retried", c.retried)
        .with("theta_gap", s.theta.matching_gap)
        .with("omega_gap", s.omega.matching_gap)
        .with("in_guaranteed_region", s.in_guaranteed_region)
}

// ---------------------------------------------------------------------------
// subcommands

fn solve_resolved(r: &Resolved) -> CliResult<BoundState> {
    let params = r.params()?;
    admissible(&params, r.target)?;
    Ok(solve_pair(&params, r.target, &r.opts)?)
}

fn cmd_solve(args: SolveArgs) -> CliResult<Emitted> {
    let r = Resolved::new(&args.physics, &args.winding, &args.solver, &args.output)?;
    let state = solve_resolved(&r)?;
    emit(&[state_record(&state)], r.format, &[], &args.output)
}

/// Sweep values, linear or geometric, endpoints included.
pub fn sweep_values(from: f64, to: f64, steps: usize, log: bool) -> std::result::Result<Vec<f64>, String> {
    if steps < 2 {
        return Err(format!("steps must be at least 2 (got {steps})"));
    }
    if !(from.is_finite() && to.is_finite()) {
        return Err("sweep endpoints must be finite".into());
    }
    if log && !(from * to > 0.0) {
        return Err("a geometric sweep needs nonzero endpoints of equal sign".into());
    }
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            let t = i as f64 / last;
            if i == steps - 1 {
                to
            } else if log {
                from * (to / from).powf(t)
            } else {
                from + (to - from) * t
            }
        })
        .collect())
}

/// Parses `ntheta:nomega[,ntheta:nomega...]`.
pub fn parse_targets(s: &str) -> std::result::Result<Vec<WindingTarget>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (a, b) = t.split_once(':').ok_or_else(|| format!("target `{t}` is not ntheta:nomega"))?;
            let nt = a.trim().parse().map_err(|_| format!("bad ntheta in `{t}`"))?;
            let no = b.trim().parse().map_err(|_| format!("bad nomega in `{t}`"))?;
            Ok(WindingTarget::new(nt, no))
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .and_then(|v| if v.is_empty() { Err("empty target list".into()) } else { Ok(v) })
}

/// Worker count from the environment; `None` leaves the rayon default.
fn workers() -> CliResult<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("{WORKERS_ENV} must be a positive integer (got `{v}`)"))),
        },
    }
}

fn cmd_scan(args: ScanArgs, stderr: &mut dyn Write) -> CliResult<Emitted> {
    let r = Resolved::new(&args.physics, &args.winding, &args.solver, &args.output)?;
    let sweep = match args.sweep {
        Some(s) => s,
        None => match r.cfg.get("sweep") {
            Some(v) => Sweep::from_str(v, true).map_err(|_| CliError::Usage(format!("unknown sweep `{v}`")))?,
            None => return Err(CliError::Usage("missing required value --sweep".into())),
        },
    };
    let from = required(pick(args.from, &r.cfg, "from")?, "from")?;
    let to = required(pick(args.to, &r.cfg, "to")?, "to")?;
    let steps = required(pick(args.steps, &r.cfg, "steps")?, "steps")?;
    let log = args.log || pick::<bool>(None, &r.cfg, "log")?.unwrap_or(false);
    let values = sweep_values(from, to, steps, log).map_err(CliError::Usage)?;
    let endpoint_ok = match sweep {
        Sweep::A => values.iter().all(|&v| v > 0.0),
        Sweep::Gamma => values.iter().all(|&v| v < 0.0),
        Sweep::Z => values.iter().all(|&v| v > 0.0),
    };
    if !endpoint_ok {
        return Err(CliError::Usage(format!("sweep range [{from}, {to}] is invalid for {sweep:?}")));
    }
    let targets = match args.targets.as_deref().or(r.cfg.get("targets")) {
        Some(t) => parse_targets(t).map_err(CliError::Usage)?,
        None => vec![r.target],
    };
    let kappa = required(r.kappa, "kappa")?;
    for t in &targets {
        spectroscopic_label(*t, kappa)?;
    }
    let fixed_a = if sweep == Sweep::A { None } else { Some(required(r.a, "a")?) };
    let fixed_gamma = if sweep == Sweep::A { Some(required(r.gamma, "gamma or --Z")?) } else { None };

    let jobs: Vec<(f64, WindingTarget)> =
        values.iter().flat_map(|&v| targets.iter().map(move |&t| (v, t))).collect();
    let opts = r.opts;
    let solve_one = |&(v, t): &(f64, WindingTarget)| {
        let params = match sweep {
            Sweep::A => ModelParams::new(v, fixed_gamma.unwrap_or(f64::NAN), kappa),
            Sweep::Gamma => ModelParams::new(fixed_a.unwrap_or(f64::NAN), v, kappa),
            Sweep::Z => ModelParams::from_z(fixed_a.unwrap_or(f64::NAN), v, kappa),
        };
        (params, t, solve_pair(&params, t, &opts))
    };
    let results: Vec<_> = match workers()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Io(e.to_string()))?
            .install(|| jobs.par_iter().map(solve_one).collect()),
        None => jobs.par_iter().map(solve_one).collect(),
    };

    let sweep_name = match sweep {
        Sweep::A => "a",
        Sweep::Gamma => "gamma",
        Sweep::Z => "Z",
    };
    let mut failed = 0usize;
    let records: Vec<Record> = jobs
        .iter()
        .zip(&results)
        .map(|(&(v, _), (params, t, res))| {
            let label = spectroscopic_label(*t, kappa).map(|l| l.to_string()).unwrap_or_default();
            let base = Record::default()
                .with("sweep", sweep_name)
                .with("sweep_value", v)
                .with("a", params.a)
                .with("gamma", params.gamma)
                .with("kappa", params.kappa)
                .with("n_theta", t.n_theta)
                .with("n_omega", t.n_omega);
            match res {
                Ok(s) => base
                    .with("E", s.energy)
                    .with("lambda", s.lambda)
                    .with("converged", true)
                    .with("label", label)
                    .with("iterations", s.convergence.iterations)
                    .with("error", Cell::Empty),
                Err(e) => {
                    failed += 1;
                    base.with("E", Cell::Empty)
                        .with("lambda", Cell::Empty)
                        .with("converged", false)
                        .with("label", label)
                        .with("iterations", Cell::Empty)
                        .with("error", e.to_string())
                }
            }
        })
        .collect();
    if failed > 0 {
        let _ = writeln!(stderr, "warning: {failed} of {} scan points did not converge", records.len());
    }
    emit(&records, r.format, &[], &args.output)
}

fn oracle_format(o: &OutputArgs) -> Format {
    o.format.unwrap_or(Format::Csv)
}

fn gamma_of(gamma: Option<f64>, z: Option<f64>) -> CliResult<f64> {
    required(pick_gamma(gamma, z, &Config::default())?, "gamma or --Z")
}

fn cmd_oracle(which: OracleCmd) -> CliResult<Emitted> {
    let (rec, output) = match which {
        OracleCmd::Sommerfeld { big_m, k, gamma, z, output } => {
            let g = gamma_of(gamma, z)?;
            let e = sommerfeld(big_m, k, g)?;
            let n = SommerfeldIndex::new(big_m, k, g)?.n();
            (Record::default().with("M", big_m).with("k", k).with("gamma", g).with("n", n).with("E", e), output)
        }
        OracleCmd::Bsw { kappa, big_n, a, energy, convention, output } => {
            let conv = match convention {
                Convention::Printed => BswConvention::Printed,
                Convention::SignCorrected => BswConvention::SignCorrected,
            };
            let l = bsw_lambda_with(conv, kappa, big_n, a, energy)?;
            let name = match convention {
                Convention::Printed => "printed",
                Convention::SignCorrected => "sign-corrected",
            };
            let rec = Record::default()
                .with("kappa", kappa)
                .with("N", big_n)
                .with("a", a)
                .with("E", energy)
                .with("convention", name)
                .with("lambda", l);
            (rec, output)
        }
        OracleCmd::K { big_n, kappa, output } => {
            let k = a0_angular_k(big_n, kappa)?;
            (Record::default().with("N", big_n).with("kappa", kappa).with("k", k), output)
        }
        OracleCmd::Jacobi { big_n, kappa, theta, output } => {
            let v = jacobi_theta_connector(big_n, kappa, theta)?;
            (Record::default().with("N", big_n).with("kappa", kappa).with("theta", theta).with("Theta", v), output)
        }
        OracleCmd::Gordon { big_m, k, gamma, z, r, output } => {
            let g = gamma_of(gamma, z)?;
            let idx = SommerfeldIndex::new(big_m, k, g)?;
            let v = gordon_omega_profile(&idx, r)?;
            (Record::default().with("M", big_m).with("k", k).with("gamma", g).with("r", r).with("Omega", v), output)
        }
    };
    emit(&[rec], oracle_format(&output), &[], &output)
}

fn cmd_label(args: LabelArgs) -> CliResult<Emitted> {
    let t = WindingTarget::new(args.winding.ntheta.unwrap_or(0), args.winding.nomega.unwrap_or(0));
    let l = spectroscopic_label(t, args.kappa)?;
    let rec = Record::default().with("n_theta", t.n_theta).with("n_omega", t.n_omega).with("kappa", args.kappa);
    emit(&[label_record(rec, &l)], oracle_format(&args.output), &[], &args.output)
}

#[derive(serde::Serialize)]
struct WaveJson<'a> {
    label: String,
    #[serde(flatten)]
    profile: &'a crate::wavefunction::WaveProfile,
}

fn cmd_wavefunction(args: WaveArgs) -> CliResult<Emitted> {
    let r = Resolved::new(&args.physics, &args.winding, &args.solver, &args.output)?;
    let points = pick(args.points, &r.cfg, "points")?.unwrap_or(400);
    if points < 2 {
        return Err(CliError::Usage("points must be at least 2".into()));
    }
    let state = solve_resolved(&r)?;
    let prof = wave_profile(&state, points)?;
    let bytes = match r.format {
        Format::Json => {
            let mut s = serde_json::to_string(&WaveJson { label: state.label.to_string(), profile: &prof })
                .map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let p = &state.params;
            let comments = vec![
                format!("label={}", state.label),
                format!("E={}", format_sig(state.energy)),
                format!("lambda={}", format_sig(state.lambda)),
                format!(
                    "a={} gamma={} kappa={} n_theta={} n_omega={}",
                    format_sig(p.a),
                    format_sig(p.gamma),
                    format_sig(p.kappa),
                    state.target.n_theta,
                    state.target.n_omega
                ),
                format!("peak_r={}", format_sig(prof.peak_r)),
            ];
            let records: Vec<Record> = (0..prof.r.len().max(prof.theta.len()))
                .map(|i| {
                    Record::default()
                        .with("r", prof.r.get(i).copied())
                        .with("R", prof.big_r.get(i).copied())
                        .with("Omega", prof.omega.get(i).copied())
                        .with("theta", prof.theta.get(i).copied())
                        .with("S", prof.s.get(i).copied())
                        .with("Theta", prof.big_theta.get(i).copied())
                        .with("density", prof.density.get(i).copied())
                })
                .collect();
            render(&records, Format::Csv, &comments)?
        }
    };
    deliver(bytes, &args.output)
}

fn assumption_records(system: &'static str, rep: &AssumptionReport) -> Vec<Record> {
    [
        ("a", &rep.a_axis_speed),
        ("b", &rep.b_boundary_equilibria),
        ("c", &rep.c_fundamental_domain),
        ("d", &rep.d_monotone_in_mu),
        ("e", &rep.e_heteroclinic),
    ]
    .into_iter()
    .map(|(name, c)| {
        Record::default()
            .with("system", system)
            .with("check", name)
            .with("parameter", rep.mu)
            .with("passed", c.passed)
            .with("detail", c.detail.clone())
    })
    .collect()
}

fn cmd_check(args: CheckArgs) -> CliResult<Emitted> {
    let r = Resolved::new(&args.physics, &args.winding, &args.solver, &args.output)?;
    let state = solve_resolved(&r)?;
    let theta_ctx = ThetaSystem::new(&state.params, state.energy);
    let omega_ctx = OmegaSystem::new(&state.params, state.lambda);
    let mut records = assumption_records("theta", &check_assumptions(&theta_ctx, state.lambda, args.nx, args.ny));
    records.extend(assumption_records("omega", &check_assumptions(&omega_ctx, state.energy, args.nx, args.ny)));
    let b = barrier_check(&omega_ctx, state.energy, args.barrier_grid);
    records.push(
        Record::default()
            .with("system", "omega")
            .with("check", "barrier")
            .with("parameter", state.energy)
            .with("passed", b.holds)
            .with(
                "detail",
                format!(
                    "max rate {} at xi = {} on Omega = {}",
                    format_sig(b.max_rate),
                    format_sig(b.xi_at_max),
                    format_sig(b.line)
                ),
            ),
    );
    let eq = omega_ctx.equilibria(state.energy);
    let comments = vec![
        format!("label={}", state.label),
        format!("E={} lambda={}", format_sig(state.energy), format_sig(state.lambda)),
        format!("omega s_minus={} s_plus={}", format_sig(eq.s_minus), format_sig(eq.s_plus)),
    ];
    emit(&records, r.format, &comments, &args.output)
}
