//! Command-line front end. Tables go to standard output (or `--out`),
//! progress to standard error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::engine::{Fault, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::experiments::{self, calibrate_kappa, spec_from_csv, ExperimentKind, ExperimentSpec};
use crate::field::InstructionField;
use crate::model::{Configuration, InitialState, JumpDistribution, Lattice, SiteState, SleepRate};
use crate::procedures::{self, TrapOptions, TrapStatus};
use crate::rng::derive_seed;
use crate::stats::Estimate;
use crate::validate::run_validate;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Parser, Debug, Clone, PartialEq)]
#[command(name = "arw", version, about = "Activated random walk simulation lab", args_override_self = true)]
pub struct Cli {
    /// File of `key = value` lines supplying defaults for long flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum Command {
    /// Run the exact-invariant suite on random small instances.
    Validate(ValidateArgs),
    /// Exit density and origin odometer over a grid of densities.
    Scan(ScanArgs),
    /// Fixed-energy ring: total topplings to absorb.
    Ring(RingArgs),
    /// Driven-dissipative stationary density.
    Dd(DdArgs),
    /// Fixation and activity criteria on growing boxes.
    Condition(ConditionArgs),
    /// Single-block exit functions and their invariants.
    Block(BlockArgs),
    /// Trap exploration in one dimension.
    Trap(TrapArgs),
    /// Reference processes: killed walk, Green function, urn, directed sweep.
    Oracle(OracleArgs),
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    /// Nearest-neighbour walk with p(+e1) = 1 (one dimension).
    #[arg(long)]
    pub directed: bool,
    /// Weight of +e1; the rest is spread evenly over the other directions.
    #[arg(long, value_name = "P")]
    pub bias: Option<f64>,
    /// Explicit weights for +e1,-e1,+e2,-e2,...
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub weights: Option<Vec<f64>>,
    /// Sleep rate; `inf` for instantaneous sleep.
    #[arg(long, default_value = "1", value_parser = parse_rate)]
    pub lambda: SleepRate,
    #[arg(long, default_value_t = 0.5, value_parser = parse_density, allow_hyphen_values = true)]
    pub zeta: f64,
    /// Initial law: poisson, bernoulli, mixture or deterministic.
    #[arg(long, default_value = "poisson")]
    pub initial: String,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct RunArgs {
    #[arg(long, default_value_t = 100)]
    pub replicas: u64,
    /// Topplings allowed to one stabilization.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, env = "ARW_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Rerun the spec recorded in the header of an earlier CSV table.
    #[arg(long, value_name = "CSV")]
    pub from: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 1000)]
    pub seeds: u64,
    #[arg(long, env = "ARW_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Run against an engine that forgets to advance its odometer.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct ScanArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_delimiter = ',', default_value = "10,20,40")]
    pub sizes: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.4,0.6,0.8")]
    pub zetas: Vec<f64>,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct RingArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Ring lengths.
    #[arg(long, value_delimiter = ',', default_value = "128")]
    pub n: Vec<u32>,
    /// Thresholds `kappa` for `T <= kappa n log^2 n`; calibrated by a pilot when absent.
    #[arg(long, value_delimiter = ',')]
    pub kappa: Vec<f64>,
    /// Ring length of the calibration pilot.
    #[arg(long, default_value_t = 64)]
    pub pilot: u32,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct DdArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Box sides.
    #[arg(long, value_delimiter = ',', default_value = "50,100")]
    pub sizes: Vec<u32>,
    /// Particles added per chain.
    #[arg(long, default_value_t = 10_000)]
    pub steps: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    B,
    U,
    E,
    Universality,
    Fewstay,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct ConditionArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Box radii (or `r` for the few-stay probe).
    #[arg(long, value_delimiter = ',', default_value = "50,100,200")]
    pub sizes: Vec<u32>,
    /// Odometer thresholds, or mass fractions for the few-stay probe.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<f64>,
    /// Initial laws compared against `--initial` at the same density.
    #[arg(long, value_delimiter = ',')]
    pub alternatives: Vec<String>,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct BlockArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 4)]
    pub k: u32,
    #[arg(long, default_value_t = 200)]
    pub m_max: u64,
    /// Independent fields to sample.
    #[arg(long, default_value_t = 200)]
    pub fields: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, env = "ARW_SEED", default_value_t = 0)]
    pub seed: u64,
    /// JSON lines of the first field's topplings.
    #[arg(long, value_name = "PATH")]
    pub trace: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct TrapArgs {
    #[arg(long, default_value = "1", value_parser = parse_rate)]
    pub lambda: SleepRate,
    /// Particles per side.
    #[arg(long, default_value_t = 10)]
    pub particles: usize,
    /// Distance between consecutive particles.
    #[arg(long, default_value_t = 20)]
    pub spacing: i64,
    #[arg(long, default_value_t = 100)]
    pub replicas: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub jump_cap: u64,
    #[arg(long, env = "ARW_SEED", default_value_t = 0)]
    pub seed: u64,
    /// JSON lines of the first replica's settling topplings.
    #[arg(long, value_name = "PATH")]
    pub trace: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    KilledWalk,
    Green,
    Urn,
    Sweep,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub which: OracleKind,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 10_000)]
    pub replicas: u64,
    #[arg(long, default_value_t = 100_000)]
    pub horizon: u64,
    /// Half-space normal for the killed walk.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub v: Option<Vec<f64>>,
    /// Urn size, or interval length for the sweep.
    #[arg(long, default_value_t = 200)]
    pub r: u64,
    /// Geometric parameter of the urn.
    #[arg(long, default_value_t = 0.5)]
    pub zeta2: f64,
    #[arg(long, env = "ARW_SEED", default_value_t = 0)]
    pub seed: u64,
}

fn parse_rate(s: &str) -> std::result::Result<SleepRate, String> {
    SleepRate::parse(s).map_err(|e| e.to_string())
}

fn parse_density(s: &str) -> std::result::Result<f64, String> {
    let z: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if z.is_finite() && z >= 0.0 {
        Ok(z)
    } else {
        Err(format!("density must be finite and nonnegative, got {s}"))
    }
}

impl ModelArgs {
    pub fn jumps(&self) -> Result<JumpDistribution> {
        if let Some(w) = &self.weights {
            let j = JumpDistribution::from_weights(w.clone())?;
            if j.dim() != self.dim {
                return Err(Error::InvalidSpec(format!("{} weights do not fit dimension {}", w.len(), self.dim)));
            }
            return Ok(j);
        }
        if self.directed {
            if self.dim != 1 {
                return Err(Error::InvalidSpec("--directed is one-dimensional".into()));
            }
            return Ok(JumpDistribution::directed_1d());
        }
        match self.bias {
            Some(p) => JumpDistribution::biased(self.dim, p),
            None => Ok(JumpDistribution::symmetric(self.dim)),
        }
    }

    pub fn initial_state(&self) -> Result<InitialState> {
        InitialState::parse_kind(&self.initial, self.zeta)
    }

    fn spec(&self, kind: ExperimentKind, run: &RunArgs, sizes: &[u32]) -> Result<ExperimentSpec> {
        let mut s = ExperimentSpec::new(kind, self.jumps()?, self.lambda, self.initial_state()?);
        s.sizes = sizes.to_vec();
        s.replicas = run.replicas;
        s.budget = run.budget;
        s.master_seed = run.seed;
        Ok(s)
    }
}

/// Turns `key = value` lines into long flags. Blank lines and `#` comments
/// are skipped; `true`/`false` switch boolean flags.
pub fn config_to_args(text: &str) -> Result<Vec<OsString>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", n + 1)))?;
        let flag = format!("--{}", k.trim().replace('_', "-"));
        match v.trim() {
            "true" => out.push(flag.into()),
            "false" => {}
            v => {
                out.push(flag.into());
                out.push(v.into());
            }
        }
    }
    Ok(out)
}

/// Parses the command line. Config-file values are inserted right after the
/// subcommand, so flags given on the command line override them.
pub fn parse_args<I, T>(argv: I) -> std::result::Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let first = Cli::try_parse_from(&args)?;
    let Some(path) = &first.config else { return Ok(first) };
    let text = fs::read_to_string(path).map_err(|e| {
        clap::Error::raw(clap::error::ErrorKind::Io, format!("cannot read config {}: {e}\n", path.display()))
    })?;
    let extra = config_to_args(&text)
        .map_err(|e| clap::Error::raw(clap::error::ErrorKind::InvalidValue, format!("{e}\n")))?;
    let sub = args.iter().position(|a| SUBCOMMANDS.iter().any(|s| a == *s)).expect("parsed subcommand");
    let mut merged = args[..=sub].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&args[sub + 1..]);
    Cli::try_parse_from(merged)
}

const SUBCOMMANDS: [&str; 8] = ["validate", "scan", "ring", "dd", "condition", "block", "trap", "oracle"];

/// Resolved experiment spec for the table-producing subcommands.
pub fn experiment_spec(cmd: &Command) -> Result<Option<(ExperimentSpec, RunArgs)>> {
    let (spec, run) = match cmd {
        Command::Scan(a) => {
            let mut s = a.model.spec(ExperimentKind::PhaseScan, &a.run, &a.sizes)?;
            s.zetas = a.zetas.clone();
            (s, a.run.clone())
        }
        Command::Ring(a) => {
            let mut s = a.model.spec(ExperimentKind::RingFixedEnergy, &a.run, &a.n)?;
            s.k_grid = a.kappa.clone();
            (s, a.run.clone())
        }
        Command::Dd(a) => {
            let mut s = a.model.spec(ExperimentKind::DrivenDissipative, &a.run, &a.sizes)?;
            s.steps = a.steps;
            (s, a.run.clone())
        }
        Command::Condition(a) => {
            let kind = match a.which {
                Which::B => ExperimentKind::ConditionB,
                Which::U => ExperimentKind::ConditionU,
                Which::E => ExperimentKind::ConditionE,
                Which::Universality => ExperimentKind::UniversalityCheck,
                Which::Fewstay => ExperimentKind::FewStayProbe,
            };
            let mut s = a.model.spec(kind, &a.run, &a.sizes)?;
            s.k_grid = a.k.clone();
            s.alternatives = a
                .alternatives
                .iter()
                .map(|k| InitialState::parse_kind(k, a.model.zeta))
                .collect::<Result<_>>()?;
            (s, a.run.clone())
        }
        _ => return Ok(None),
    };
    let spec = match &run.from {
        Some(p) => spec_from_csv(&fs::read_to_string(p)?)?,
        None => spec,
    };
    spec.validate()?;
    Ok(Some((spec, run)))
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
    crate::trace::write_jsonl(&mut f, items)?;
    f.flush()?;
    Ok(())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

/// Entry point shared by the binary and the tests. Returns the exit code.
pub fn main_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match parse_args(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                clap::error::ErrorKind::Io => EXIT_IO,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(stdout, "{text}");
            } else {
                let _ = write!(stderr, "{text}");
            }
            return code;
        }
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => {
                let (mut out, mut err) = (Vec::new(), Vec::new());
                let r = pool.install(|| dispatch(&cli, &mut out, &mut err));
                let _ = stdout.write_all(&out);
                let _ = stderr.write_all(&err);
                r
            }
            Err(e) => Err(Error::InvalidSpec(e.to_string())),
        },
        None => dispatch(&cli, stdout, stderr),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    if let Some((mut spec, run)) = experiment_spec(&cli.command)? {
        if spec.kind == ExperimentKind::RingFixedEnergy && spec.k_grid.is_empty() {
            let pilot_n = match &cli.command {
                Command::Ring(a) => a.pilot,
                _ => 64,
            };
            let mut pilot = spec.clone();
            pilot.sizes = vec![pilot_n];
            let _ = writeln!(stderr, "calibrating kappa on a ring of {pilot_n} sites");
            spec.k_grid = vec![calibrate_kappa(&pilot, pilot_n)?];
        }
        let _ = writeln!(stderr, "running {} over sizes {:?} with {} replicas", spec.kind.label(), spec.sizes, spec.replicas);
        let table = experiments::run(&spec)?;
        let text = match run.format {
            Format::Csv => table.to_csv(),
            Format::Json => table.to_json(),
        };
        emit(&text, run.out.as_deref(), stdout)?;
        return Ok(EXIT_OK);
    }
    match &cli.command {
        Command::Validate(a) => validate_cmd(a, stdout, stderr),
        Command::Block(a) => block_cmd(a, stdout),
        Command::Trap(a) => trap_cmd(a, stdout),
        Command::Oracle(a) => oracle_cmd(a, stdout),
        _ => unreachable!("experiment subcommands handled above"),
    }
}

fn validate_cmd(a: &ValidateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    if a.seeds == 0 {
        writeln!(stderr, "warning: zero seeds requested, no checks run")?;
    }
    let fault = a.inject_fault.then_some(Fault::SkipOdometerIncrement);
    let report = run_validate(a.seeds, a.seed, fault)?;
    match report.violation {
        Some(v) => {
            writeln!(stdout, "VIOLATION {} after {} checks", v.check, report.checks_run)?;
            writeln!(stdout, "{}", v.instance)?;
            Ok(EXIT_VIOLATION)
        }
        None => {
            writeln!(stdout, "ok: {} checks passed, {} skipped, {} instances", report.checks_run, report.skipped, a.seeds)?;
            Ok(EXIT_OK)
        }
    }
}

fn block_cmd(a: &BlockArgs, stdout: &mut dyn Write) -> Result<i32> {
    let lattice = procedures::block_lattice(a.k)?;
    let params = crate::model::ModelParams::new(a.model.lambda, a.model.jumps()?);
    if params.dim() != 1 {
        return Err(Error::WrongModel("the block is one-dimensional".into()));
    }
    let initial = a.model.initial_state()?;
    let (mut l, mut r, mut violations) = (Vec::new(), Vec::new(), 0u64);
    for i in 0..a.fields {
        let seed = derive_seed(a.seed, &[i]);
        let mut block = crate::model::sample_initial(&initial, &lattice, derive_seed(seed, &[1]))?;
        let k = i64::from(a.k);
        block.set_at(&[-k], SiteState::Empty)?;
        block.set_at(&[k], SiteState::Empty)?;
        let field = InstructionField::new(derive_seed(seed, &[2]), params.clone());
        let f = procedures::block_functions(&block, &field, a.m_max, a.budget)?;
        if let Err(msg) = f.check() {
            violations += 1;
            writeln!(stdout, "field {i}: {msg}")?;
        }
        if i == 0 {
            if let Some(path) = &a.trace {
                let mut e = crate::engine::Engine::new(block.clone(), field.clone())?.with_trace();
                let inner = crate::model::Volume::filter(&lattice, |x| x[0].abs() < k);
                let src = lattice.origin().expect("origin");
                for _ in 0..a.m_max {
                    e.add_particles(src, 1);
                    e.stabilize(&inner, crate::engine::Strategy::ExhaustSiteThenNext, crate::engine::ToppleMode::Legal, a.budget)?;
                }
                write_jsonl(path, e.trace().unwrap_or_default())?;
            }
        }
        l.push(*f.l.last().expect("m = 0 present") as f64);
        r.push(*f.r.last().expect("m = 0 present") as f64);
    }
    let (el, er) = (Estimate::from_samples(&l), Estimate::from_samples(&r));
    writeln!(stdout, "fields {} K {} m_max {} violations {violations}", a.fields, a.k, a.m_max)?;
    writeln!(stdout, "L(m_max) {:.6} +- {:.6}", el.mean, el.stderr)?;
    writeln!(stdout, "R(m_max) {:.6} +- {:.6}", er.mean, er.stderr)?;
    Ok(if violations > 0 { EXIT_VIOLATION } else { EXIT_OK })
}

/// Particles at `±spacing, ±2 spacing, ...` on an interval large enough for them.
pub fn trap_configuration(particles: usize, spacing: i64) -> Result<Configuration> {
    let radius = (particles as i64 + 1) * spacing.max(1);
    let lattice = Lattice::cube(1, radius as u32, crate::model::Boundary::Kill)?;
    let mut cfg = Configuration::empty(lattice);
    for k in 1..=particles as i64 {
        cfg.set_at(&[k * spacing], SiteState::Active(1))?;
        cfg.set_at(&[-k * spacing], SiteState::Active(1))?;
    }
    Ok(cfg)
}

#[derive(Serialize)]
struct SettleStep {
    step: usize,
    site: i64,
    index: u64,
    instruction: crate::field::Instruction,
}

fn trap_cmd(a: &TrapArgs, stdout: &mut dyn Write) -> Result<i32> {
    if a.spacing < 1 {
        return Err(Error::InvalidSpec("spacing must be positive".into()));
    }
    let cfg = trap_configuration(a.particles, a.spacing)?;
    let params = crate::model::ModelParams::new(a.lambda, JumpDistribution::symmetric(1));
    let opts = TrapOptions { particles_per_side: a.particles, jump_cap: a.jump_cap, verify: true };
    let (mut successes, mut gaps, mut bad_origin) = (0u64, Vec::new(), 0u64);
    for i in 0..a.replicas {
        let field = InstructionField::new(derive_seed(a.seed, &[i]), params.clone());
        let res = procedures::trap_explore(&cfg, &field, opts)?;
        if res.status == TrapStatus::Success {
            successes += 1;
            if res.origin_odometer != Some(0) {
                bad_origin += 1;
            }
        }
        gaps.extend(res.interdistances.iter().map(|&g| g as f64));
        if i == 0 {
            if let Some(path) = &a.trace {
                let steps: Vec<SettleStep> = res
                    .settle_log
                    .iter()
                    .enumerate()
                    .map(|(k, &(site, index))| SettleStep {
                        step: k + 1,
                        site,
                        index,
                        instruction: field.instruction_at(&[site], index),
                    })
                    .collect();
                write_jsonl(path, &steps)?;
            }
        }
    }
    let g = Estimate::from_samples(&gaps);
    writeln!(stdout, "replicas {} successes {successes} traps {}", a.replicas, gaps.len())?;
    writeln!(stdout, "interdistance mean {:.6} +- {:.6}", g.mean, g.stderr)?;
    writeln!(stdout, "origin toppled after success: {bad_origin}")?;
    Ok(if bad_origin > 0 { EXIT_VIOLATION } else { EXIT_OK })
}

fn oracle_cmd(a: &OracleArgs, stdout: &mut dyn Write) -> Result<i32> {
    let jumps = a.model.jumps()?;
    match a.which {
        OracleKind::KilledWalk => {
            let v = a.v.clone().unwrap_or_else(|| {
                let mut v = vec![0.0; jumps.dim()];
                v[0] = 1.0;
                v
            });
            if v.len() != jumps.dim() {
                return Err(Error::InvalidSpec("--v has the wrong dimension".into()));
            }
            let lambda = a.model.lambda.value();
            let r = procedures::killed_walk_prob(&jumps, &v, lambda, a.replicas, a.horizon, a.seed);
            writeln!(stdout, "F_v {:.6} +- {:.6} (truncated {})", r.estimate.mean, r.estimate.stderr, r.truncated)?;
        }
        OracleKind::Green => {
            let g = procedures::green_function_estimate(&jumps, a.replicas, a.horizon, a.seed);
            writeln!(stdout, "G {:.6} +- {:.6}", g.estimate.mean, g.estimate.stderr)?;
            if g.not_transient {
                writeln!(stdout, "warning: walk is recurrent, estimate grows with the horizon")?;
            }
        }
        OracleKind::Urn => {
            let ks: Vec<f64> = (0..a.replicas)
                .map(|i| procedures::urn_run(a.r, a.zeta2, derive_seed(a.seed, &[i])).map(|u| u.k_star as f64))
                .collect::<Result<_>>()?;
            let e = Estimate::from_samples(&ks);
            writeln!(stdout, "k* {:.6} +- {:.6}", e.mean, e.stderr)?;
        }
        OracleKind::Sweep => {
            let lattice = Lattice::cube(1, a.r as u32, crate::model::Boundary::Kill)?;
            let params = crate::model::ModelParams::new(a.model.lambda, jumps);
            let initial = a.model.initial_state()?;
            let mut flows = Vec::new();
            let mut origin = Vec::new();
            for i in 0..a.replicas {
                let seed = derive_seed(a.seed, &[i]);
                let cfg = crate::model::sample_initial(&initial, &lattice, derive_seed(seed, &[1]))?;
                let field = InstructionField::new(derive_seed(seed, &[2]), params.clone());
                let s = procedures::directed_sweep(&cfg, &field)?;
                flows.push(s.inflow() as f64);
                origin.push(s.origin_odometer as f64);
            }
            let (f, o) = (Estimate::from_samples(&flows), Estimate::from_samples(&origin));
            writeln!(stdout, "N_L {:.6} +- {:.6}", f.mean, f.stderr)?;
            writeln!(stdout, "m(0) {:.6} +- {:.6}", o.mean, o.stderr)?;
        }
    }
    Ok(EXIT_OK)
}
