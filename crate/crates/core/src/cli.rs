//! Command-line surface. Exit codes: 0 when every asserted property holds,
//! 1 on a violation, 2 on a usage or input error, 3 when a size guard or
//! exact-arithmetic limit is hit.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::audit::{run_audit, AuditConfig};
use crate::bounds::{all_bounds, Analysis, BoundReport};
use crate::cmi::{build_cmi_joint, cmi_report, CmiReport};
use crate::counterexample::{counterexample_setting, verify_properties, CEParams, Mode, PartitionSpace};
use crate::error::{Error, Result};
use crate::lemmacov::{cov_grid, cov_report, find_nprime, CovReport, NPrime, ParityEnsemble};
use crate::limits::Limits;
use crate::probcore::rational::{parse_rational, serde_option_rational, serde_rational};
use crate::probcore::{Prob, Rational};
use crate::report;
use crate::setting::{random_setting, LearningSetting, SettingDoc, SizeCaps};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "genbound", version, about = "Exact laboratory for information-theoretic generalization bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Certify properties of the partition counterexample.
    VerifyCounterexample(CounterexampleArgs),
    /// Exact parity covariances of random equal-size partitions.
    LemmaCov(LemmaArgs),
    /// Every standard-setting bound for one setting.
    BoundsReport(BoundsArgs),
    /// Every supersample (CMI and e-CMI) bound for one setting.
    CmiReport(CmiArgs),
    /// Sweep all bounds over seeded random settings.
    RandomAudit(AuditArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::VerifyCounterexample(_) => "verify-counterexample",
            Command::LemmaCov(_) => "lemma-cov",
            Command::BoundsReport(_) => "bounds-report",
            Command::CmiReport(_) => "cmi-report",
            Command::RandomAudit(_) => "random-audit",
        }
    }

    fn output(&self) -> &OutputArgs {
        match self {
            Command::VerifyCounterexample(a) => &a.output,
            Command::LemmaCov(a) => &a.output,
            Command::BoundsReport(a) => &a.output,
            Command::CmiReport(a) => &a.output,
            Command::RandomAudit(a) => &a.output,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CliMode {
    Exact,
    Mc,
}

#[derive(Args, Debug, Serialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Args, Debug, Serialize)]
pub struct CounterexampleArgs {
    /// Training-set size, a power of two.
    #[arg(long)]
    pub n: u32,
    /// Cube dimension.
    #[arg(long)]
    pub d: u32,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: CliMode,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Required with `--mode mc`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = rational_arg, default_value = "1/2")]
    #[serde(with = "serde_rational")]
    pub delta: Rational,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct LemmaArgs {
    /// Block size.
    #[arg(long)]
    pub n: u32,
    #[arg(long, requires = "n1")]
    pub n0: Option<u32>,
    #[arg(long, requires = "n0")]
    pub n1: Option<u32>,
    /// Tabulate every `1 <= N0, N1 <= cap`.
    #[arg(long, conflicts_with = "n0")]
    pub cap: Option<u32>,
    /// Search the grid for the smallest N' with cov <= delta P(Y=1)^2.
    #[arg(long, value_parser = rational_arg, requires = "cap")]
    #[serde(with = "serde_option_rational")]
    pub delta: Option<Rational>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct SettingSource {
    /// Setting JSON document.
    #[arg(long)]
    pub setting: Option<PathBuf>,
    /// Random setting drawn from this seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Partition counterexample on {0,1}^d, with `--n`.
    #[arg(long, requires = "n")]
    pub d: Option<u32>,
    #[arg(long, requires = "d")]
    pub n: Option<u32>,
}

#[derive(Args, Debug, Serialize)]
pub struct BoundsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SettingSource,
    #[arg(long, value_parser = rational_arg, default_value = "1/2")]
    #[serde(with = "serde_rational")]
    pub sigma: Rational,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct CmiArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SettingSource,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct AuditArgs {
    /// Number of settings.
    #[arg(long, default_value_t = 500)]
    pub seeds: u64,
    /// First seed of the sweep.
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_parser = rational_arg, default_value = "1/2")]
    #[serde(with = "serde_rational")]
    pub sigma: Rational,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

/// A rendered report and whether its asserted properties hold.
#[derive(Debug)]
pub struct Rendered {
    pub body: String,
    pub ok: bool,
    /// JSON for the violating instance, when there is one.
    pub reproducer: Option<String>,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn load_setting(src: &SettingSource, limits: &Limits) -> Result<LearningSetting> {
    match (&src.setting, src.seed, src.d) {
        (Some(p), None, None) => {
            let text = std::fs::read_to_string(p).map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?;
            LearningSetting::from_json(&text)
        }
        (None, Some(seed), None) => Ok(random_setting(seed, SizeCaps::default())),
        (None, None, Some(d)) => {
            let n = src.n.ok_or_else(|| usage("--d needs --n"))?;
            counterexample_setting(&PartitionSpace::new(d, n, limits)?)
        }
        _ => Err(usage("give exactly one of --setting, --seed, or --d with --n")),
    }
}

#[derive(Serialize)]
struct BoundsResult<'a> {
    data_size: usize,
    n: usize,
    hypotheses: usize,
    #[serde(with = "serde_rational")]
    expected_gap: Rational,
    #[serde(with = "serde_rational")]
    expected_squared_gap: Rational,
    bounds: &'a [BoundReport],
    #[serde(skip_serializing_if = "Option::is_none")]
    violating_setting: Option<SettingDoc>,
}

#[derive(Serialize)]
struct CmiResult<'a> {
    #[serde(flatten)]
    report: &'a CmiReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    violating_setting: Option<SettingDoc>,
}

#[derive(Serialize)]
struct LemmaResult {
    rows: Vec<CovReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nprime: Option<NPrime>,
}

fn reproducer(s: &LearningSetting, ok: bool) -> Option<SettingDoc> {
    (!ok).then(|| SettingDoc::from_setting(s))
}

fn doc_json(doc: &Option<SettingDoc>) -> Option<String> {
    doc.as_ref().and_then(|d| serde_json::to_string(d).ok())
}

/// Run one command and render its report.
pub fn execute(cmd: &Command, limits: &Limits) -> Result<Rendered> {
    let name = cmd.name();
    let fmt = cmd.output().format;
    match cmd {
        Command::VerifyCounterexample(a) => {
            if !a.n.is_power_of_two() {
                return Err(usage(format!("--n must be a power of two, got {}", a.n)));
            }
            let mode = match a.mode {
                CliMode::Exact => Mode::Exact,
                CliMode::Mc => Mode::MonteCarlo,
            };
            let mut p = CEParams::new(a.n.trailing_zeros(), a.d, mode);
            p.trials = a.trials;
            p.delta = Prob::new(a.delta.clone())?;
            if mode == Mode::MonteCarlo {
                p.seed = a.seed.ok_or_else(|| usage("--mode mc requires --seed"))?;
            }
            let r = verify_properties(&p, limits)?;
            let body = match fmt {
                Format::Json => report::envelope_json(name, a, &r, r.ok)?,
                Format::Csv => report::counterexample_csv(&r)?,
            };
            Ok(Rendered { body, ok: r.ok, reproducer: None })
        }
        Command::LemmaCov(a) => {
            let rows = match (a.n0, a.n1, a.cap) {
                (Some(n0), Some(n1), None) => vec![cov_report(&ParityEnsemble::new(n0, n1, a.n)?)?],
                (None, None, Some(cap)) => cov_grid(a.n, cap)?,
                _ => return Err(usage("give --n0 and --n1, or --cap")),
            };
            let nprime = match (&a.delta, a.cap) {
                (Some(delta), Some(cap)) => Some(find_nprime(a.n, delta, cap)?),
                _ => None,
            };
            let res = LemmaResult { rows, nprime };
            let body = match fmt {
                Format::Json => report::envelope_json(name, a, &res, true)?,
                Format::Csv => report::cov_csv(&res.rows)?,
            };
            Ok(Rendered { body, ok: true, reproducer: None })
        }
        Command::BoundsReport(a) => {
            let s = load_setting(&a.source, limits)?;
            let an = Analysis::new(&s, limits)?;
            let bounds = all_bounds(&an, &a.sigma)?;
            let ok = bounds.iter().all(|b| b.holds);
            let res = BoundsResult {
                data_size: s.data_size(),
                n: s.n(),
                hypotheses: s.hypothesis_count(),
                expected_gap: an.stats.expected_gap.clone(),
                expected_squared_gap: an.stats.expected_squared_gap.clone(),
                bounds: &bounds,
                violating_setting: reproducer(&s, ok),
            };
            let body = match fmt {
                Format::Json => report::envelope_json(name, a, &res, ok)?,
                Format::Csv => report::bounds_csv(&bounds)?,
            };
            Ok(Rendered { body, ok, reproducer: doc_json(&res.violating_setting) })
        }
        Command::CmiReport(a) => {
            let s = load_setting(&a.source, limits)?;
            let sj = build_cmi_joint(&s, limits)?;
            let r = cmi_report(&sj)?;
            let ok = r.ok();
            let res = CmiResult { report: &r, violating_setting: reproducer(&s, ok) };
            let body = match fmt {
                Format::Json => report::envelope_json(name, a, &res, ok)?,
                Format::Csv => report::bounds_csv(&r.bounds)?,
            };
            Ok(Rendered { body, ok, reproducer: doc_json(&res.violating_setting) })
        }
        Command::RandomAudit(a) => {
            let mut cfg = AuditConfig::new(a.seeds, a.seed);
            cfg.sigma = a.sigma.clone();
            if a.seeds == 0 {
                return Err(usage("--seeds must be positive"));
            }
            let r = run_audit(&cfg, limits)?;
            let ok = r.ok();
            let body = match fmt {
                Format::Json => report::envelope_json(name, a, &r, ok)?,
                Format::Csv => report::audit_csv(&r)?,
            };
            let reproducer = (!ok).then(|| serde_json::to_string(&r.violations).unwrap_or_default());
            Ok(Rendered { body, ok, reproducer })
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::GuardExceeded { .. } | Error::Overflow(_) => EXIT_GUARD,
        _ => EXIT_USAGE,
    }
}

/// Parse arguments, run, write the report, and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = Limits::from_env().and_then(|l| execute(&cli.command, &l));
    let r = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    match &cli.command.output().out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &r.body) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return EXIT_USAGE;
            }
        }
        None => print!("{}", r.body),
    }
    if r.ok {
        EXIT_OK
    } else {
        eprintln!("violation in {}", cli.command.name());
        if let Some(x) = &r.reproducer {
            eprintln!("{x}");
        }
        EXIT_VIOLATION
    }
}
