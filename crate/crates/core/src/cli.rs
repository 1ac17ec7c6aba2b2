//! Command-line front end: argument parsing, engine dispatch and output.
//!
//! [`run_from`] never exits the process; the binary prints the returned
//! [`Outcome`] and exits with its code. Exit codes: 0 success, 1 a failed
//! `verify` suite, 2 bad input (unparsable or non-monotone profile, engine
//! or backend mismatch), 3 a computation error.

use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{debug, info};
use rayon::prelude::*;
use rug::Rational;
use serde_json::{json, Value};

use crate::error::Error;
use crate::gefp::{gefp_homogeneous, HomParams, ResidueEngine};
use crate::hfun::HTable;
use crate::ik::{
    gefp_inhom_determinant, gefp_inhom_recurrence, homogeneous_partition_jets, ik_partition,
};
use crate::oracle::{
    gefp_oracle_value, modified_domain_partition, partition_function_oracle,
    reduced_modified_domain_partition, reduced_partition_function, WeightGrid, YoungProfile,
};
use crate::params::{trig_from_delta_t, weights_from_trig, AnisotropyPoint, SpectralData};
use crate::report::{CorrelationResult, Engine, ParamEcho, Quantity};
use crate::scalar::{parse_rational, Backend, BigFloat, Scalar};
use crate::verify::{self, Level, SuiteReport};

pub const SCHEMA: &str = "gefp-lab/1";
pub const DEFAULT_PRECISION: u32 = 128;
const MAX_PRECISION: u32 = 1 << 16;

#[derive(Debug, Parser)]
#[command(
    name = "gefp-lab",
    version,
    about = "Six-vertex model with domain-wall boundaries: partition functions and GEFP"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Partition function Z_N.
    Partition(PartitionArgs),
    /// Generalized emptiness formation probability for a profile r_1..r_s.
    Gefp(GefpArgs),
    /// Emptiness formation probability, the constant profile (r, ..., r).
    Efp(EfpArgs),
    /// Boundary correlation H_N^(r), all r unless --r is given.
    Hfun(HfunArgs),
    /// Partition function of the lattice with the frozen corner removed.
    Cutdomain(CutArgs),
    /// Run the acceptance suites.
    Verify(VerifyArgs),
    /// GEFP over every profile of every N at every parameter point.
    Table(TableArgs),
}

/// Model parameters: `--delta/--t`, `--lambda/--eta`, or
/// `--lambdas/--nus/--eta` for an inhomogeneous lattice.
#[derive(Debug, Clone, Default, Args)]
pub struct PointArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<String>,
    /// Column rapidities, comma separated, counted from the right.
    #[arg(long, allow_hyphen_values = true)]
    pub lambdas: Option<String>,
    /// Row rapidities, comma separated, counted from the top.
    #[arg(long, allow_hyphen_values = true)]
    pub nus: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Float precision in bits.
    #[arg(long, env = "GEFP_LAB_PRECISION", default_value_t = DEFAULT_PRECISION)]
    pub precision: u32,
    /// Report wall time (off by default so output is reproducible byte for byte).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EngineArgs {
    #[arg(long, value_parser = parse_engine)]
    pub engine: Option<Engine>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    #[arg(long)]
    pub allow_nonphysical: bool,
    /// Largest jet order the derivative engines may use (they need 2N-2).
    #[arg(long)]
    pub jet_order: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Report Z_N / c^N.
    #[arg(long)]
    pub reduced: bool,
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct GefpArgs {
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Profile r_1,...,r_s; empty for s = 0.
    #[arg(long, allow_hyphen_values = true)]
    pub r: String,
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct EfpArgs {
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub r: usize,
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct HfunArgs {
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long)]
    pub r: Option<usize>,
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct CutArgs {
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub r: String,
    /// Report Z_mod / c^N.
    #[arg(long)]
    pub reduced: bool,
    #[command(flatten)]
    pub point: PointArgs,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_parser = parse_level, default_value = "desk")]
    pub level: Level,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Lattice sizes.
    #[arg(long = "N", value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub delta: Vec<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub t: Vec<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Vec<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eta: Vec<String>,
    /// Only profiles with at most this many rows.
    #[arg(long)]
    pub s_max: Option<usize>,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    Engine::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Engine::ALL.iter().map(|e| e.as_str()).collect();
        format!("unknown engine {s:?}, expected one of {}", names.join(", "))
    })
}

fn parse_level(s: &str) -> Result<Level, String> {
    Level::parse(s).ok_or_else(|| format!("unknown level {s:?}, expected quick or desk"))
}

/// What the binary should print and exit with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn failure_outcome(f: Failure) -> Outcome {
    let (code, stderr) = match f {
        Failure::Usage(msg) => (2, format!("error: {msg}\n")),
        Failure::Compute(e) => {
            let code = match e {
                Error::InvalidProfile(_) | Error::Parse { .. } => 2,
                _ => 3,
            };
            (code, format!("error: {}: {e}\n", e.name()))
        }
    };
    Outcome {
        code,
        stdout: String::new(),
        stderr,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                Outcome::ok(text)
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}

pub fn run(cli: Cli) -> Outcome {
    let started = Instant::now();
    let (name, out, result) = match &cli.command {
        Command::Partition(a) => ("partition", &a.out, partition(a)),
        Command::Gefp(a) => ("gefp", &a.out, gefp(a)),
        Command::Efp(a) => ("efp", &a.out, efp(a)),
        Command::Hfun(a) => ("hfun", &a.out, hfun(a)),
        Command::Cutdomain(a) => ("cutdomain", &a.out, cutdomain(a)),
        Command::Table(a) => ("table", &a.out, table(a)),
        Command::Verify(a) => return verify_command(a, started),
    };
    match result {
        Ok((records, failed)) => {
            let elapsed = out.timing.then(|| started.elapsed());
            let mut outcome = Outcome::ok(render(name, &records, out.format, elapsed));
            if failed {
                outcome.code = 3;
                outcome.stderr = "error: some table entries failed, see their \"error\" field\n".into();
            }
            outcome
        }
        Err(f) => failure_outcome(f),
    }
}

// ---------------------------------------------------------------------------
// parameters

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    DeltaT,
    Trig,
    Spectral,
}

impl Kind {
    fn describe(self) -> &'static str {
        match self {
            Kind::DeltaT => "(delta, t)",
            Kind::Trig => "(lambda, eta)",
            Kind::Spectral => "spectral (lambdas, nus, eta)",
        }
    }
}

fn kind_of(p: &PointArgs) -> Res<Kind> {
    let has = |o: &Option<String>| o.is_some();
    match (
        has(&p.delta),
        has(&p.t),
        has(&p.lambda),
        has(&p.eta),
        has(&p.lambdas),
        has(&p.nus),
    ) {
        (true, true, false, false, false, false) => Ok(Kind::DeltaT),
        (false, false, true, true, false, false) => Ok(Kind::Trig),
        (false, false, false, true, true, true) => Ok(Kind::Spectral),
        _ => Err(Failure::Usage(
            "give exactly one parameter set: --delta and --t, --lambda and --eta, \
             or --lambdas, --nus and --eta"
                .into(),
        )),
    }
}

fn is_rational_literal(s: &str) -> bool {
    parse_rational(s).is_ok()
}

/// Scalars the CLI can read.
trait CliScalar: Scalar {
    fn read(s: &str, prec: u32) -> Res<Self>;
    fn to_trig(p: &AnisotropyPoint<Self>) -> Res<(Self, Self)>;
}

impl CliScalar for Rational {
    fn read(s: &str, _prec: u32) -> Res<Self> {
        if !is_rational_literal(s) && BigFloat::parse(53, s).is_ok() {
            return Err(Failure::Usage(format!(
                "{s:?} is a decimal; the exact backend takes p/q rationals (use --backend float)"
            )));
        }
        Ok(parse_rational(s)?)
    }

    fn to_trig(_: &AnisotropyPoint<Self>) -> Res<(Self, Self)> {
        Err(Failure::Usage("(lambda, eta) engines need the float backend".into()))
    }
}

impl CliScalar for BigFloat {
    fn read(s: &str, prec: u32) -> Res<Self> {
        Ok(BigFloat::parse(prec, s)?)
    }

    fn to_trig(p: &AnisotropyPoint<Self>) -> Res<(Self, Self)> {
        Ok(trig_from_delta_t(p)?)
    }
}

fn read_list<S: CliScalar>(s: &str, prec: u32) -> Res<Vec<S>> {
    s.split(',').map(|x| S::read(x, prec)).collect()
}

#[derive(Debug, Clone)]
enum Point<S> {
    Hom(HomParams<S>),
    Spectral(SpectralData<S>),
}

fn read_point<S: CliScalar>(p: &PointArgs, prec: u32, allow: bool) -> Res<Point<S>> {
    let get = |o: &Option<String>| o.clone().unwrap_or_default();
    Ok(match kind_of(p)? {
        Kind::DeltaT => Point::Hom(HomParams::DeltaT(AnisotropyPoint::new(
            S::read(&get(&p.delta), prec)?,
            S::read(&get(&p.t), prec)?,
            allow,
        )?)),
        Kind::Trig => Point::Hom(HomParams::Trig {
            lambda: S::read(&get(&p.lambda), prec)?,
            eta: S::read(&get(&p.eta), prec)?,
        }),
        Kind::Spectral => Point::Spectral(SpectralData::new(
            read_list(&get(&p.lambdas), prec)?,
            read_list(&get(&p.nus), prec)?,
            S::read(&get(&p.eta), prec)?,
        )?),
    })
}

fn check_precision(prec: u32) -> Res<()> {
    if !(8..=MAX_PRECISION).contains(&prec) {
        return Err(Failure::Usage(format!(
            "precision {prec} is outside 8..={MAX_PRECISION} bits"
        )));
    }
    Ok(())
}

/// Picks the backend; the exact one only takes rational `(Δ, t)` and the
/// oracle or residue engines.
fn resolve_backend(
    requested: Option<BackendArg>,
    kind: Kind,
    literals: &[&str],
    engine: Engine,
) -> Res<Backend> {
    let backend = match (requested, kind) {
        (Some(BackendArg::Exact), Kind::Trig | Kind::Spectral) => {
            return Err(Failure::Usage(format!(
                "{} parameters need the float backend",
                kind.describe()
            )))
        }
        (Some(BackendArg::Exact), Kind::DeltaT) => Backend::Exact,
        (Some(BackendArg::Float), _) | (None, Kind::Trig | Kind::Spectral) => Backend::Float,
        (None, Kind::DeltaT) => {
            if !engine.needs_float() && literals.iter().all(|s| is_rational_literal(s)) {
                Backend::Exact
            } else {
                Backend::Float
            }
        }
    };
    if backend == Backend::Exact && engine.needs_float() {
        return Err(Failure::Usage(format!(
            "engine {engine} needs the float backend"
        )));
    }
    Ok(backend)
}

fn check_engine(command: &str, kind: Kind, engine: Engine, allowed: &[Engine]) -> Res<()> {
    if allowed.contains(&engine) {
        return Ok(());
    }
    let names: Vec<&str> = allowed.iter().map(|e| e.as_str()).collect();
    Err(Failure::Usage(format!(
        "engine {engine} does not compute {command} from {} parameters; use one of {}",
        kind.describe(),
        names.join(", ")
    )))
}

fn check_jet_order(cap: Option<usize>, n: usize, engine: Engine) -> Res<()> {
    let uses_jets = matches!(
        engine,
        Engine::IkHom | Engine::Homlim | Engine::Jets | Engine::KOperator
    );
    match cap {
        Some(cap) if uses_jets && 2 * n.saturating_sub(1) > cap => Err(Error::TooLarge {
            what: "jet order",
            got: 2 * n.saturating_sub(1),
            cap,
        }
        .into()),
        _ => Ok(()),
    }
}

/// `(λ, η)` for the derivative engines; a float `(Δ, t)` point is converted.
fn as_trig<S: CliScalar>(params: &HomParams<S>) -> Res<(S, S)> {
    match params {
        HomParams::Trig { lambda, eta } => Ok((lambda.clone(), eta.clone())),
        HomParams::DeltaT(p) => S::to_trig(p),
    }
}

fn profile_from(n: usize, r: &str) -> Res<YoungProfile> {
    let r = r.trim();
    let entries = if r.is_empty() {
        Vec::new()
    } else {
        r.split(',')
            .map(|x| {
                x.trim().parse::<usize>().map_err(|_| {
                    Failure::Compute(Error::Parse {
                        what: "profile entry",
                        input: x.to_string(),
                    })
                })
            })
            .collect::<Res<Vec<usize>>>()?
    };
    Ok(YoungProfile::new(n, entries)?)
}

fn size_of(n: Option<usize>, point: &PointArgs) -> Res<usize> {
    let from_spec = point.lambdas.as_ref().map(|l| l.split(',').count());
    match (n, from_spec) {
        (Some(n), Some(m)) if n != m => Err(Failure::Usage(format!(
            "--N {n} but {m} column rapidities were given"
        ))),
        (Some(n), _) => Ok(n),
        (None, Some(m)) => Ok(m),
        (None, None) => Err(Failure::Usage("--N is required".into())),
    }
}

fn literals(p: &PointArgs) -> Vec<&str> {
    [&p.delta, &p.t].into_iter().flatten().map(String::as_str).collect()
}

/// Shared set-up: kind, engine, backend.
struct Setup {
    engine: Engine,
    backend: Backend,
}

fn setup(
    command: &str,
    point: &PointArgs,
    eng: &EngineArgs,
    out: &OutArgs,
    default: impl Fn(Kind) -> Engine,
    allowed: impl Fn(Kind) -> &'static [Engine],
) -> Res<Setup> {
    check_precision(out.precision)?;
    let kind = kind_of(point)?;
    let engine = eng.engine.unwrap_or_else(|| default(kind));
    check_engine(command, kind, engine, allowed(kind))?;
    let backend = resolve_backend(eng.backend, kind, &literals(point), engine)?;
    info!("{command}: engine {engine}, backend {backend}");
    Ok(Setup {
        engine,
        backend,
    })
}

type Records = (Vec<Value>, bool);

macro_rules! by_backend {
    ($backend:expr, $f:ident ( $($arg:expr),* )) => {
        match $backend {
            Backend::Exact => $f::<Rational>($($arg),*),
            Backend::Float => $f::<BigFloat>($($arg),*),
        }
    };
    ($backend:expr, $f:ident ( $($arg:expr),* ) => json) => {
        match $backend {
            Backend::Exact => $f::<Rational>($($arg),*).map(|r| r.to_json()),
            Backend::Float => $f::<BigFloat>($($arg),*).map(|r| r.to_json()),
        }
    };
}

// ---------------------------------------------------------------------------
// commands

const HOM_GEFP: &[Engine] = &[Engine::Residue, Engine::Oracle, Engine::Jets, Engine::Homlim];
const INHOM_GEFP: &[Engine] = &[Engine::Recurrence, Engine::InhomDet, Engine::Oracle];

fn partition(a: &PartitionArgs) -> Res<Records> {
    let st = setup(
        "partition",
        &a.point,
        &a.engine,
        &a.out,
        |k| match k {
            Kind::DeltaT => Engine::Oracle,
            Kind::Trig => Engine::IkHom,
            Kind::Spectral => Engine::Ik,
        },
        |k| match k {
            Kind::DeltaT => &[Engine::Oracle, Engine::IkHom],
            Kind::Trig => &[Engine::IkHom, Engine::Oracle, Engine::Ik],
            Kind::Spectral => &[Engine::Ik, Engine::Oracle],
        },
    )?;
    let n = size_of(a.n, &a.point)?;
    if n == 0 {
        return Err(Failure::Usage("--N must be at least 1".into()));
    }
    check_jet_order(a.engine.jet_order, n, st.engine)?;
    let rec = by_backend!(st.backend, partition_in(a, &st, n) => json)?;
    Ok((vec![rec], false))
}

fn partition_in<S: CliScalar>(a: &PartitionArgs, st: &Setup, n: usize) -> Res<CorrelationResult<S>> {
    let allow = a.engine.allow_nonphysical;
    let point = read_point::<S>(&a.point, a.out.precision, allow)?;
    let (grid, echo) = match &point {
        Point::Hom(HomParams::DeltaT(p)) => (Some(WeightGrid::from_anisotropy(n, p)), ParamEcho::delta_t(p)),
        Point::Hom(HomParams::Trig { lambda, eta }) => {
            let w = weights_from_trig(lambda, &S::zero(), eta, allow)?;
            (Some(WeightGrid::homogeneous(n, &w)), ParamEcho::trig(lambda, eta))
        }
        Point::Spectral(spec) => (
            Some(WeightGrid::from_spectral(spec, allow)?),
            ParamEcho::spectral(spec),
        ),
    };
    let value = match (st.engine, &point) {
        (Engine::Oracle, _) => {
            let grid = grid.expect("grid");
            if a.reduced {
                reduced_partition_function(&grid)?
            } else {
                partition_function_oracle(&grid)?
            }
        }
        (Engine::IkHom, Point::Hom(params)) => {
            let (lambda, eta) = as_trig(params)?;
            let z = homogeneous_partition_jets(n, &lambda, &eta)?;
            let w = weights_from_trig(&lambda, &S::zero(), &eta, true)?;
            // a (Δ, t) point is normalised to a = 1
            let z = match params {
                HomParams::DeltaT(_) => z.checked_div(&w.a.powi((n * n) as u32))?,
                HomParams::Trig { .. } => z,
            };
            let c = match params {
                HomParams::DeltaT(_) => w.c.checked_div(&w.a)?,
                HomParams::Trig { .. } => w.c.clone(),
            };
            if a.reduced {
                z.checked_div(&c.powi(n as u32))?
            } else {
                z
            }
        }
        (Engine::Ik, Point::Hom(HomParams::Trig { lambda, eta })) => {
            let spec = SpectralData::homogeneous(n, lambda.clone(), eta.clone());
            reduce_if(a.reduced, ik_partition(&spec)?, &spec, n)?
        }
        (Engine::Ik, Point::Spectral(spec)) => reduce_if(a.reduced, ik_partition(spec)?, spec, n)?,
        _ => unreachable!("engine checked in setup"),
    };
    Ok(CorrelationResult {
        value,
        quantity: if a.reduced {
            Quantity::ReducedPartitionFunction
        } else {
            Quantity::PartitionFunction
        },
        engine: st.engine,
        n,
        r: Vec::new(),
        params: echo,
    })
}

fn reduce_if<S: Scalar>(reduced: bool, z: S, spec: &SpectralData<S>, n: usize) -> Res<S> {
    if reduced {
        Ok(z.checked_div(&spec.c()?.powi(n as u32))?)
    } else {
        Ok(z)
    }
}

fn gefp(a: &GefpArgs) -> Res<Records> {
    let st = setup(
        "gefp",
        &a.point,
        &a.engine,
        &a.out,
        |k| match k {
            Kind::Spectral => Engine::Recurrence,
            _ => Engine::Residue,
        },
        |k| match k {
            Kind::Spectral => INHOM_GEFP,
            _ => HOM_GEFP,
        },
    )?;
    let n = size_of(a.n, &a.point)?;
    let profile = profile_from(n, &a.r)?;
    check_jet_order(a.engine.jet_order, n, st.engine)?;
    let rec = by_backend!(
        st.backend,
        gefp_in(&a.point, &a.engine, a.out.precision, &profile, st.engine) => json
    )?;
    Ok((vec![rec], false))
}

fn gefp_in<S: CliScalar>(
    point: &PointArgs,
    eng: &EngineArgs,
    prec: u32,
    profile: &YoungProfile,
    engine: Engine,
) -> Res<CorrelationResult<S>> {
    let allow = eng.allow_nonphysical;
    match read_point::<S>(point, prec, allow)? {
        Point::Hom(params) => hom_gefp(profile, &params, engine, allow),
        Point::Spectral(spec) => {
            if spec.size() != profile.n() {
                return Err(Failure::Usage("profile and rapidities disagree on N".into()));
            }
            let value = match engine {
                Engine::Recurrence => gefp_inhom_recurrence(&spec, profile)?,
                Engine::InhomDet => gefp_inhom_determinant(&spec, profile)?,
                _ => gefp_oracle_value(&WeightGrid::from_spectral(&spec, allow)?, profile)?,
            };
            Ok(CorrelationResult {
                value,
                quantity: Quantity::Gefp,
                engine,
                n: profile.n(),
                r: profile.r().to_vec(),
                params: ParamEcho::spectral(&spec),
            })
        }
    }
}

/// Homogeneous GEFP; float `(Δ, t)` points are converted for the derivative
/// engines and echoed as given.
fn hom_gefp<S: CliScalar>(
    profile: &YoungProfile,
    params: &HomParams<S>,
    engine: Engine,
    allow: bool,
) -> Res<CorrelationResult<S>> {
    let converted = match (engine, params) {
        (Engine::Jets | Engine::Homlim, HomParams::DeltaT(_)) => {
            let (lambda, eta) = as_trig(params)?;
            Some(HomParams::Trig { lambda, eta })
        }
        _ => None,
    };
    let mut rec = gefp_homogeneous(profile, converted.as_ref().unwrap_or(params), engine, allow)?;
    rec.params = params.echo();
    Ok(rec)
}

fn efp(a: &EfpArgs) -> Res<Records> {
    let st = setup("efp", &a.point, &a.engine, &a.out, |_| Engine::Residue, |k| match k {
        Kind::Spectral => &[],
        _ => HOM_GEFP,
    })?;
    let profile = YoungProfile::constant(a.n, a.s, a.r)?;
    check_jet_order(a.engine.jet_order, a.n, st.engine)?;
    let mut rec = by_backend!(
        st.backend,
        efp_in(&a.point, &a.engine, a.out.precision, &profile, st.engine)
    )?;
    rec["quantity"] = json!(Quantity::Efp);
    Ok((vec![rec], false))
}

fn efp_in<S: CliScalar>(
    point: &PointArgs,
    eng: &EngineArgs,
    prec: u32,
    profile: &YoungProfile,
    engine: Engine,
) -> Res<Value> {
    match read_point::<S>(point, prec, eng.allow_nonphysical)? {
        Point::Hom(params) => Ok(hom_gefp(profile, &params, engine, eng.allow_nonphysical)?.to_json()),
        Point::Spectral(_) => unreachable!("engine checked in setup"),
    }
}

fn hfun(a: &HfunArgs) -> Res<Records> {
    let st = setup(
        "hfun",
        &a.point,
        &a.engine,
        &a.out,
        |k| match k {
            Kind::Trig => Engine::KOperator,
            _ => Engine::Oracle,
        },
        |k| match k {
            Kind::Spectral => &[],
            _ => &[Engine::Oracle, Engine::KOperator],
        },
    )?;
    if a.n == 0 {
        return Err(Failure::Usage("--N must be at least 1".into()));
    }
    if let Some(r) = a.r {
        if r == 0 || r > a.n {
            return Err(Error::BadIndex(format!("r = {r} is outside 1..={}", a.n)).into());
        }
    }
    check_jet_order(a.engine.jet_order, a.n, st.engine)?;
    let recs = by_backend!(st.backend, hfun_in(a, st.engine))?;
    Ok((recs, false))
}

fn hfun_in<S: CliScalar>(a: &HfunArgs, engine: Engine) -> Res<Vec<Value>> {
    let allow = a.engine.allow_nonphysical;
    let Point::Hom(params) = read_point::<S>(&a.point, a.out.precision, allow)? else {
        unreachable!("engine checked in setup")
    };
    let table = match (engine, &params) {
        (Engine::Oracle, HomParams::DeltaT(p)) => HTable::from_oracle(&WeightGrid::from_anisotropy(a.n, p))?,
        (Engine::Oracle, HomParams::Trig { lambda, eta }) => {
            let w = weights_from_trig(lambda, &S::zero(), eta, allow)?;
            HTable::from_oracle(&WeightGrid::homogeneous(a.n, &w))?
        }
        _ => {
            let (lambda, eta) = as_trig(&params)?;
            HTable::via_k(a.n, &lambda, &eta)?
        }
    };
    let rs: Vec<usize> = match a.r {
        Some(r) => vec![r],
        None => (1..=a.n).collect(),
    };
    rs.into_iter()
        .map(|r| {
            Ok(CorrelationResult {
                value: table.get(r)?.clone(),
                quantity: Quantity::BoundaryH,
                engine,
                n: a.n,
                r: vec![r],
                params: params.echo(),
            }
            .to_json())
        })
        .collect()
}

fn cutdomain(a: &CutArgs) -> Res<Records> {
    let st = setup("cutdomain", &a.point, &a.engine, &a.out, |_| Engine::Oracle, |k| match k {
        Kind::Spectral => &[],
        _ => &[Engine::Oracle],
    })?;
    let profile = profile_from(a.n, &a.r)?;
    let rec = by_backend!(st.backend, cutdomain_in(a, &profile) => json)?;
    Ok((vec![rec], false))
}

fn cutdomain_in<S: CliScalar>(a: &CutArgs, profile: &YoungProfile) -> Res<CorrelationResult<S>> {
    let allow = a.engine.allow_nonphysical;
    let Point::Hom(params) = read_point::<S>(&a.point, a.out.precision, allow)? else {
        unreachable!("engine checked in setup")
    };
    let grid = match &params {
        HomParams::DeltaT(p) => WeightGrid::from_anisotropy(a.n, p),
        HomParams::Trig { lambda, eta } => {
            WeightGrid::homogeneous(a.n, &weights_from_trig(lambda, &S::zero(), eta, allow)?)
        }
    };
    let value = if a.reduced {
        reduced_modified_domain_partition(&grid, profile)?
    } else {
        modified_domain_partition(&grid, profile)?
    };
    Ok(CorrelationResult {
        value,
        quantity: Quantity::CutDomainPartition,
        engine: Engine::Oracle,
        n: a.n,
        r: profile.r().to_vec(),
        params: params.echo(),
    })
}

/// `(N, first parameter index, second parameter index)`.
type TableKey = (usize, usize, usize);

fn table(a: &TableArgs) -> Res<Records> {
    check_precision(a.out.precision)?;
    let kind = match (
        a.delta.is_empty(),
        a.t.is_empty(),
        a.lambda.is_empty(),
        a.eta.is_empty(),
    ) {
        (false, false, true, true) => Kind::DeltaT,
        (true, true, false, false) => Kind::Trig,
        _ => {
            return Err(Failure::Usage(
                "table takes --delta and --t lists, or --lambda and --eta lists".into(),
            ))
        }
    };
    let engine = a.engine.engine.unwrap_or(Engine::Residue);
    check_engine("table", kind, engine, HOM_GEFP)?;
    let lits: Vec<&str> = a.delta.iter().chain(&a.t).map(String::as_str).collect();
    let backend = resolve_backend(a.engine.backend, kind, &lits, engine)?;
    if let Some(&bad) = a.n.iter().find(|&&n| n == 0) {
        return Err(Failure::Usage(format!("--N {bad} must be at least 1")));
    }
    for &n in &a.n {
        check_jet_order(a.engine.jet_order, n, engine)?;
    }
    let (x, y) = match kind {
        Kind::DeltaT => (&a.delta, &a.t),
        _ => (&a.lambda, &a.eta),
    };
    let mut groups = Vec::new();
    for &n in &a.n {
        for (i, xv) in x.iter().enumerate() {
            for (j, yv) in y.iter().enumerate() {
                let point = match kind {
                    Kind::DeltaT => PointArgs {
                        delta: Some(xv.clone()),
                        t: Some(yv.clone()),
                        ..Default::default()
                    },
                    _ => PointArgs {
                        lambda: Some(xv.clone()),
                        eta: Some(yv.clone()),
                        ..Default::default()
                    },
                };
                groups.push(((n, i, j), point));
            }
        }
    }
    let mut rows: Vec<(TableKey, Vec<(YoungProfile, Value)>)> = groups
        .par_iter()
        .map(|(key, point)| {
            let rows = by_backend!(backend, table_group(point, &a.engine, a.out.precision, key.0, a.s_max, engine));
            (*key, rows)
        })
        .collect();
    rows.sort_by_key(|row| row.0);
    let mut failed = false;
    let mut out = Vec::new();
    for (_, group) in rows {
        for (_, v) in group {
            failed |= v.get("error").is_some();
            out.push(v);
        }
    }
    Ok((out, failed))
}

/// All profiles at one `(N, point)`, sharing one residue engine.
fn table_group<S: CliScalar>(
    point: &PointArgs,
    eng: &EngineArgs,
    prec: u32,
    n: usize,
    s_max: Option<usize>,
    engine: Engine,
) -> Vec<(YoungProfile, Value)> {
    let mut profiles: Vec<YoungProfile> = YoungProfile::enumerate(n)
        .into_iter()
        .filter(|p| s_max.map_or(true, |m| p.s() <= m))
        .collect();
    profiles.sort();
    let allow = eng.allow_nonphysical;
    let params = match read_point::<S>(point, prec, allow) {
        Ok(Point::Hom(p)) => p,
        Ok(Point::Spectral(_)) => unreachable!("table points are homogeneous"),
        Err(f) => {
            let v = error_record(n, &[], point, &f);
            return vec![(YoungProfile::new(n, Vec::new()).expect("empty profile"), v)];
        }
    };
    let mut residue = match (&params, engine) {
        (HomParams::DeltaT(p), Engine::Residue) => Some(ResidueEngine::from_oracle(n, p.clone())),
        _ => None,
    };
    profiles
        .into_iter()
        .map(|profile| {
            debug!("table: N = {n}, r = {profile}");
            let rec = match residue.as_mut() {
                Some(Ok(engine_state)) => engine_state.gefp(&profile).map(|value| CorrelationResult {
                    value,
                    quantity: Quantity::Gefp,
                    engine,
                    n,
                    r: profile.r().to_vec(),
                    params: params.echo(),
                }).map_err(Failure::from),
                Some(Err(e)) => Err(Failure::Compute(e.clone())),
                None => hom_gefp(&profile, &params, engine, allow),
            };
            let v = match rec {
                Ok(rec) => rec.to_json(),
                Err(f) => error_record(n, profile.r(), point, &f),
            };
            (profile, v)
        })
        .collect()
}

fn error_record(n: usize, r: &[usize], point: &PointArgs, f: &Failure) -> Value {
    let (name, message) = match f {
        Failure::Usage(m) => ("Usage", m.clone()),
        Failure::Compute(e) => (e.name(), e.to_string()),
    };
    let params = match (&point.delta, &point.t) {
        (Some(d), Some(t)) => json!({"kind": "delta-t", "delta": d, "t": t}),
        _ => json!({"kind": "trig", "lambda": point.lambda, "eta": point.eta}),
    };
    json!({
        "quantity": Quantity::Gefp,
        "N": n,
        "r": r,
        "params": params,
        "error": name,
        "message": message,
    })
}

fn verify_command(a: &VerifyArgs, started: Instant) -> Outcome {
    if let Err(f) = check_precision(a.out.precision) {
        return failure_outcome(f);
    }
    let suites = verify::all_suites(a.level);
    let passed = suites.iter().all(|s| s.passed);
    let elapsed = a.out.timing.then(|| started.elapsed());
    let stdout = render_suites(&suites, a.level, passed, a.out.format, elapsed);
    Outcome {
        code: if passed { 0 } else { 1 },
        stdout,
        stderr: String::new(),
    }
}

// ---------------------------------------------------------------------------
// output

fn params_text(p: &Value) -> String {
    let Some(obj) = p.as_object() else {
        return String::new();
    };
    obj.iter()
        .filter(|(k, _)| k.as_str() != "kind")
        .map(|(k, v)| {
            let v = match v {
                Value::String(s) => s.clone(),
                Value::Array(xs) => xs
                    .iter()
                    .map(|x| x.as_str().map(str::to_owned).unwrap_or_else(|| x.to_string()))
                    .collect::<Vec<_>>()
                    .join(" "),
                Value::Null => String::new(),
                other => other.to_string(),
            };
            format!("{k}={v}")
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn field(v: &Value, key: &str) -> String {
    match v.get(key) {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(Value::Array(xs)) => xs
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" "),
        Some(other) => other.to_string(),
    }
}

fn render(command: &str, records: &[Value], format: Format, elapsed: Option<Duration>) -> String {
    match format {
        Format::Json => {
            let mut doc = json!({
                "schema": SCHEMA,
                "command": command,
                "results": records,
            });
            if let Some(d) = elapsed {
                doc["wall_time_s"] = json!(d.as_secs_f64());
            }
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
        Format::Csv => {
            let mut s = String::from("quantity,engine,backend,precision,N,r,params,value,error\n");
            for v in records {
                let cols = [
                    field(v, "quantity"),
                    field(v, "engine"),
                    field(v, "backend"),
                    field(v, "precision"),
                    field(v, "N"),
                    field(v, "r"),
                    params_text(v.get("params").unwrap_or(&Value::Null)),
                    field(v, "value"),
                    field(v, "error"),
                ];
                s += &cols.join(",");
                s.push('\n');
            }
            if let Some(d) = elapsed {
                s += &format!("# wall time {:.3} s\n", d.as_secs_f64());
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for v in records {
                let params = params_text(v.get("params").unwrap_or(&Value::Null)).replace(';', " ");
                let head = format!("{} N={} r=[{}] {params}", field(v, "quantity"), field(v, "N"), field(v, "r"));
                match v.get("error") {
                    Some(e) => s += &format!("{head}: error {}: {}\n", e.as_str().unwrap_or(""), field(v, "message")),
                    None => {
                        let prec = match v.get("precision") {
                            Some(Value::Number(p)) => format!(", {p} bits"),
                            _ => String::new(),
                        };
                        s += &format!(
                            "{head}: {}  ({}, {}{prec})\n",
                            field(v, "value"),
                            field(v, "engine"),
                            field(v, "backend")
                        );
                    }
                }
            }
            if let Some(d) = elapsed {
                s += &format!("wall time {:.3} s\n", d.as_secs_f64());
            }
            s
        }
    }
}

fn render_suites(
    suites: &[SuiteReport],
    level: Level,
    passed: bool,
    format: Format,
    elapsed: Option<Duration>,
) -> String {
    match format {
        Format::Json => {
            let mut doc = json!({
                "schema": SCHEMA,
                "command": "verify",
                "level": level,
                "passed": passed,
                "suites": suites,
            });
            if let Some(d) = elapsed {
                doc["wall_time_s"] = json!(d.as_secs_f64());
            }
            serde_json::to_string_pretty(&doc).expect("json") + "\n"
        }
        Format::Csv => {
            let mut s = String::from("id,passed,checks,title,first_failure\n");
            for r in suites {
                let quote = |x: &str| format!("\"{}\"", x.replace('"', "\"\""));
                s += &format!(
                    "{},{},{},{},{}\n",
                    r.id,
                    r.passed,
                    r.checks,
                    quote(r.title),
                    quote(r.failures.first().map(String::as_str).unwrap_or(""))
                );
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in suites {
                s += &r.line();
                s.push('\n');
            }
            s += if passed { "all suites passed\n" } else { "some suites FAILED\n" };
            if let Some(d) = elapsed {
                s += &format!("wall time {:.3} s\n", d.as_secs_f64());
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &str) -> Outcome {
        run_from(std::iter::once("gefp-lab").chain(args.split_whitespace()))
    }

    fn results(o: &Outcome) -> Vec<Value> {
        let doc: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(doc["schema"], SCHEMA);
        doc["results"].as_array().unwrap().clone()
    }

    #[test]
    fn vanishing_profile_is_exact_zero() {
        let o = run("gefp --N 2 --r 1,1 --delta 1/2 --t 1");
        assert_eq!(o.code, 0, "{}", o.stderr);
        let r = results(&o);
        assert_eq!(r[0]["value"], "0/1");
        assert_eq!(r[0]["backend"], "exact");
    }

    #[test]
    fn backend_resolution() {
        let k = Kind::DeltaT;
        assert_eq!(resolve_backend(None, k, &["1/2", "1"], Engine::Residue).unwrap(), Backend::Exact);
        assert_eq!(resolve_backend(None, k, &["0.5", "1"], Engine::Residue).unwrap(), Backend::Float);
        assert_eq!(resolve_backend(None, k, &["1/2", "1"], Engine::Jets).unwrap(), Backend::Float);
        assert!(resolve_backend(Some(BackendArg::Exact), k, &["1/2"], Engine::Jets).is_err());
        assert!(resolve_backend(Some(BackendArg::Exact), Kind::Trig, &[], Engine::Oracle).is_err());
    }

    #[test]
    fn exit_codes() {
        let bad = run("gefp --N 3 --r 3,2 --delta 1/2 --t 1");
        assert_eq!(bad.code, 2);
        assert!(bad.stderr.contains("r_1 <= r_2 <= ... <= r_s"), "{}", bad.stderr);
        assert_eq!(run("gefp --N 3 --r 2,3 --delta 1/2 --t 1 --engine jets --backend exact").code, 2);
        assert_eq!(run("gefp --N 3 --r 2,3 --delta 0.5 --t 1 --backend exact").code, 2);
        assert_eq!(run("gefp --N 3 --r 2,3 --delta 1/2").code, 2);
        // Δ = 3/2 has no trigonometric parametrisation
        let c = run("gefp --N 3 --r 2,3 --delta 3/2 --t 1/4 --engine jets");
        assert_eq!(c.code, 3);
        assert!(c.stderr.contains("Unsupported"), "{}", c.stderr);
    }

    #[test]
    fn jet_order_cap() {
        let o = run("gefp --N 3 --r 2,3 --lambda 1.2 --eta 0.4 --engine jets --jet-order 3");
        assert_eq!(o.code, 3);
        assert!(o.stderr.contains("TooLarge"));
        assert_eq!(run("gefp --N 3 --r 2,3 --lambda 1.2 --eta 0.4 --engine jets --jet-order 4").code, 0);
    }

    #[test]
    fn formats_are_deterministic() {
        for f in ["json", "csv", "text"] {
            let cmd = format!("hfun --N 3 --delta 1/3 --t 3/4 --format {f}");
            let a = run(&cmd);
            assert_eq!(a.code, 0, "{}", a.stderr);
            assert_eq!(a, run(&cmd));
        }
        let csv = run("hfun --N 3 --delta 1/3 --t 3/4 --format csv").stdout;
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(1).unwrap().starts_with("boundary-h,oracle,exact,,3,1,delta=1/3;t=3/4,"));
    }

    #[test]
    fn params_text_flattens() {
        let v = json!({"kind": "spectral", "lambdas": ["1", "2"], "eta": "0.5"});
        assert_eq!(params_text(&v), "eta=0.5;lambdas=1 2");
    }
}
