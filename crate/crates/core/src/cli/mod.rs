//! Command-line front end. Every command writes one table, CSV by default
//! or JSON with `--format json`, behind a metadata header that records the
//! command line, version, seed and every resolved flag.

mod commands;
mod config;
mod output;
mod verify;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use crate::combinatorics::{Cutoffs, Schedule, DEFAULT_EXACT_CUTOFF};
use crate::patterns::{ExpansionKind, PatternLang};
use crate::sampler::{Event, RunSettings};
use crate::trees::{Class, DEFAULT_ENUM_BUDGET, DEFAULT_SAT_BUDGET};

pub use output::Format;
use output::{Emitter, Meta};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SUITE_FAILURE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

pub const ENV_EXACT_CUTOFF: &str = "ANDOR_EXACT_CUTOFF";
pub const ENV_EXACT_WORK: &str = "ANDOR_EXACT_WORK";
pub const ENV_ENUM_BUDGET: &str = "ANDOR_ENUM_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "andor", version, about = "Counting, enumeration and sampling of and/or tree classes")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// File of `key=value` lines giving defaults for any long flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Largest n handled in exact rational arithmetic.
    #[arg(long, global = true, env = ENV_EXACT_CUTOFF, default_value_t = DEFAULT_EXACT_CUTOFF)]
    pub exact_cutoff: u64,
    /// Largest n*k handled in exact rational arithmetic.
    #[arg(long, global = true, env = ENV_EXACT_WORK, default_value_t = Cutoffs::default().exact_work)]
    pub exact_work: u64,
    /// Largest size enumerated exhaustively (at most 7).
    #[arg(long, global = true, env = ENV_ENUM_BUDGET, default_value_t = DEFAULT_ENUM_BUDGET)]
    pub enum_budget: usize,
    /// Sampler worker threads; all cores when absent.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Search budget of one satisfiability decision.
    #[arg(long, global = true, default_value_t = DEFAULT_SAT_BUDGET)]
    pub sat_budget: u64,
}

impl GlobalArgs {
    pub fn cutoffs(&self) -> Cutoffs {
        Cutoffs {
            exact_n: self.exact_cutoff,
            exact_work: self.exact_work,
        }
    }

    pub fn run_settings(&self) -> RunSettings {
        RunSettings {
            cutoffs: self.cutoffs(),
            sat_budget: self.sat_budget,
            workers: self.workers,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Class count T, labelling weight B and rat for each n.
    Count(CountArgs),
    /// Threshold M_n and M_n ln(M_n) / n for each n.
    Threshold(ThresholdArgs),
    /// Every class of one size, optionally filtered by an event.
    Enumerate(EnumerateArgs),
    /// Minimal tree size, essential variables and multiplicity of every
    /// function up to a size.
    Atlas(AtlasArgs),
    /// Monte-Carlo probability of one event at one size.
    Estimate(EstimateArgs),
    /// Monte-Carlo probabilities of several events over several sizes.
    Sweep(SweepArgs),
    /// Raw uniform samples with their substream coordinates.
    Sample(SampleArgs),
    /// Exact invariant suites; exit code 1 when a check fails.
    Verify(VerifyArgs),
    /// Exact coefficients of a generating function.
    Series(SeriesArgs),
    /// Repetition census of a pattern language.
    Census(CensusArgs),
    /// Function-preserving expansions of a base class.
    Expand(ExpandArgs),
}

impl Command {
    fn sampling(&self) -> Option<&SamplingArgs> {
        match self {
            Command::Estimate(a) => Some(&a.sampling),
            Command::Sweep(a) => Some(&a.sampling),
            Command::Sample(a) => Some(&a.sampling),
            _ => None,
        }
    }
}

/// Sizes given as a comma list of values and inclusive ranges `a..b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sizes(pub Vec<u64>);

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim) {
        let num = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("bad size `{t}`"));
        match item.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
                if a > b {
                    return Err(format!("empty range `{item}`"));
                }
                out.extend(a..=b);
            }
            None => out.push(num(item)?),
        }
    }
    if out.contains(&0) {
        return Err("sizes must be positive".into());
    }
    Ok(Sizes(out))
}

fn parse_schedule(s: &str) -> Result<Schedule, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_event(s: &str) -> Result<Event, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

/// A comma-separated event list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Events(pub Vec<Event>);

fn parse_events(s: &str) -> Result<Events, String> {
    let v = Event::parse_list(s).map_err(|e| e.to_string())?;
    if v.is_empty() {
        return Err("empty event list".into());
    }
    Ok(Events(v))
}

fn parse_lang(s: &str) -> Result<PatternLang, String> {
    PatternLang::builtin(s).map_err(|e| e.to_string())
}

fn parse_class(s: &str) -> Result<Class, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_kind(s: &str) -> Result<ExpansionKind, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct BudgetArgs {
    /// Variable budget k_n: identity, sqrt, power:A, n_over_ln, threshold or
    /// file:PATH.
    #[arg(long, default_value = "identity", value_parser = parse_schedule)]
    pub schedule: Schedule,
    /// Fixed k replacing the schedule.
    #[arg(long)]
    pub k: Option<u64>,
}

impl BudgetArgs {
    pub fn k(&self, n: u64) -> u64 {
        self.k.unwrap_or_else(|| self.schedule.k(n))
    }

    /// The schedule with a fixed `k` folded in (clamped to `n`).
    pub fn effective(&self) -> Schedule {
        match self.k {
            Some(k) => Schedule::Explicit(vec![k]),
            None => self.schedule.clone(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SamplingArgs {
    /// Master seed; chosen at random and recorded in the header when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Substream id.
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
}

#[derive(Debug, Clone, Args)]
pub struct CountArgs {
    /// Sizes, e.g. `5`, `1..10` or `64,128`.
    #[arg(long, value_parser = parse_sizes)]
    pub n: Sizes,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ThresholdArgs {
    #[arg(long, value_parser = parse_sizes)]
    pub n: Sizes,
}

#[derive(Debug, Clone, Args)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub n: u64,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// Keep only classes on which this event holds.
    #[arg(long, value_parser = parse_event)]
    pub filter: Option<Event>,
}

#[derive(Debug, Clone, Args)]
pub struct AtlasArgs {
    #[arg(long, default_value_t = 4)]
    pub max_size: usize,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub n: u64,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// e.g. `satisfiable`, `matches_key(E1:2)`, `has_repetitions(N;1)`.
    #[arg(long, value_parser = parse_event)]
    pub event: Event,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_sizes)]
    pub n: Sizes,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// Comma-separated events, all evaluated on the same samples.
    #[arg(long, value_parser = parse_events)]
    pub events: Events,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub n: u64,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, default_value_t = 10)]
    pub count: u64,
    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Bonferroni,
    Unimodal,
    Series,
    DcBrackets,
    Census,
    Duality,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Comma-separated suites.
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub suite: Vec<Suite>,
    /// Largest size checked; each suite has its own default.
    #[arg(long)]
    pub max_n: Option<u64>,
    /// Series order for the `series` suite.
    #[arg(long, default_value_t = 200)]
    pub order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    /// All structures by leaves.
    #[value(name = "I")]
    I,
    #[value(name = "u")]
    U,
    /// Two pointed leaves.
    #[value(name = "Itilde", alias = "I2")]
    Itilde,
    #[value(name = "I3")]
    I3,
    #[value(name = "I4")]
    I4,
}

#[derive(Debug, Clone, Args)]
pub struct SeriesArgs {
    #[arg(long, value_enum, default_value_t = Which::I)]
    pub which: Which,
    #[arg(long, default_value_t = 20)]
    pub order: usize,
}

#[derive(Debug, Clone, Args)]
pub struct CensusArgs {
    #[arg(long)]
    pub n: u64,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// N, P, S, S~, N_pow(j), N_oplus_P or a composition such as N[N].
    #[arg(long, default_value = "N", value_parser = parse_lang)]
    pub lang: PatternLang,
    /// Repetition counts reported.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    pub r: Vec<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ExpandArgs {
    /// Base class, e.g. `(1:+ & 2:+)`.
    #[arg(long, value_parser = parse_class)]
    pub base: Class,
    /// T or X.
    #[arg(long, value_parser = parse_kind)]
    pub kind: ExpansionKind,
    #[arg(long)]
    pub target_n: usize,
    /// Block budget; the target size when absent.
    #[arg(long)]
    pub k: Option<usize>,
}

/// Runs the CLI on `args` (program name first) against the process streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI writing to `out` and `err`; returns the exit code.
pub fn run_with(args: Vec<OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let command_line = args
        .iter()
        .map(|a| {
            let s = a.to_string_lossy();
            if s.contains(char::is_whitespace) {
                format!("'{s}'")
            } else {
                s.into_owned()
            }
        })
        .collect::<Vec<_>>()
        .join(" ");
    let args = match config::merge(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.exit_code() == 0 { EXIT_OK } else { EXIT_USAGE };
            let _ = if code == EXIT_OK {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return code;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return EXIT_USAGE;
        }
    };
    let seed = cli.command.sampling().map(|s| s.seed.unwrap_or_else(rand::random));
    let meta = Meta {
        command_line,
        version: env!("CARGO_PKG_VERSION"),
        seed,
        config: echo(&matches),
    };
    let result = match &cli.global.out {
        Some(path) => match File::create(path) {
            Ok(f) => {
                let mut w = BufWriter::new(f);
                let r = commands::execute(&cli, seed, &mut Emitter::new(&mut w, cli.global.format, meta));
                r.and_then(|o| w.flush().map(|_| o).map_err(Into::into))
            }
            Err(e) => Err(e.into()),
        },
        None => commands::execute(&cli, seed, &mut Emitter::new(out, cli.global.format, meta)),
    };
    match result {
        Ok(false) => EXIT_OK,
        Ok(true) => EXIT_SUITE_FAILURE,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DOMAIN
        }
    }
}

/// `(flag, raw value)` for every flag that has a value, top level first.
fn echo(m: &ArgMatches) -> Vec<(String, String)> {
    let cmd = Cli::command();
    let mut out = Vec::new();
    collect(&cmd, m, &mut out);
    if let Some((name, sub)) = m.subcommand() {
        if let Some(sc) = cmd.find_subcommand(name) {
            collect(sc, sub, &mut out);
        }
    }
    out.sort();
    out.dedup_by(|a, b| a.0 == b.0);
    out
}

fn collect(cmd: &clap::Command, m: &ArgMatches, out: &mut Vec<(String, String)>) {
    for arg in cmd.get_arguments() {
        let id = arg.get_id().as_str();
        if let Ok(Some(raw)) = m.try_get_raw(id) {
            let vals: Vec<String> = raw.map(|v| v.to_string_lossy().into_owned()).collect();
            out.push((id.to_string(), vals.join(",")));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut argv = vec![OsString::from("andor")];
        argv.extend(args.iter().map(OsString::from));
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    /// Non-comment lines.
    fn body(s: &str) -> Vec<&str> {
        s.lines().filter(|l| !l.starts_with('#')).collect()
    }

    #[test]
    fn count_examples() {
        let (code, out, _) = call(&["count", "--n", "2", "--k", "2"]);
        assert_eq!(code, 0);
        assert_eq!(body(&out)[0], "n,k,T,B,rat,rat_float");
        assert!(body(&out)[1].starts_with("2,2,6,3/4,2/3,"), "{out}");
        let (_, out, _) = call(&["count", "--n", "1", "--k", "1"]);
        assert!(body(&out)[1].starts_with("1,1,1,1/2,"));
        let (_, out, _) = call(&["count", "--n", "3", "--k", "3"]);
        assert!(body(&out)[1].starts_with("3,3,88,"));
    }

    #[test]
    fn threshold_examples() {
        let (code, out, _) = call(&["threshold", "--n", "10,4,2"]);
        assert_eq!(code, 0);
        let rows: Vec<Vec<&str>> = body(&out)[1..].iter().map(|l| l.split(',').collect()).collect();
        assert_eq!(rows.iter().map(|r| (r[0], r[1])).collect::<Vec<_>>(), [("10", "4"), ("4", "2"), ("2", "1")]);
    }

    #[test]
    fn enumerate_examples() {
        let (_, out, _) = call(&["enumerate", "--n", "2", "--k", "2", "--filter", "is_true"]);
        assert_eq!(body(&out).len(), 2);
        let (_, out, _) = call(&["enumerate", "--n", "2", "--k", "2"]);
        assert_eq!(body(&out).len(), 7);
        let (_, out, _) = call(&["enumerate", "--n", "1"]);
        assert_eq!(body(&out).len(), 2);
        assert!(out.contains("# classes: 1"));
    }

    #[test]
    fn usage_and_domain_codes() {
        assert_eq!(call(&["verify", "--suite", ""]).0, EXIT_USAGE);
        assert_eq!(call(&["verify"]).0, EXIT_USAGE);
        assert_eq!(call(&["nonsense"]).0, EXIT_USAGE);
        assert_eq!(call(&["count", "--n", "0"]).0, EXIT_USAGE);
        assert_eq!(call(&["estimate", "--n", "4", "--event", "nope"]).0, EXIT_USAGE);
        assert_eq!(call(&["enumerate", "--n", "9"]).0, EXIT_DOMAIN);
        assert_eq!(call(&["--version"]).0, EXIT_OK);
    }

    #[test]
    fn header_echoes_flags() {
        let (_, out, _) = call(&["count", "--n", "2", "--k", "2"]);
        assert!(out.starts_with("# command: andor count --n 2 --k 2\n"));
        assert!(out.contains("# version: "));
        assert!(out.contains("# config.n: 2\n"));
        assert!(out.contains("# config.schedule: identity\n"));
        assert!(!out.contains("BudgetArgs"));
        let (_, out, _) = call(&["sample", "--n", "3", "--count", "2"]);
        assert!(out.lines().any(|l| l.starts_with("# seed: ")));
    }

    #[test]
    fn json_mirrors_csv() {
        let (_, csv, _) = call(&["count", "--n", "2..3"]);
        let (_, json, _) = call(&["count", "--n", "2..3", "--format", "json"]);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let rows = body(&csv);
        let cols: Vec<&str> = rows[0].split(',').collect();
        assert_eq!(v["columns"], serde_json::json!(cols));
        for (i, line) in rows[1..].iter().enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(v["rows"][i], serde_json::json!(fields));
        }
        assert_eq!(v["meta"]["config"]["n"], "2..3");
    }

    #[test]
    fn sizes() {
        assert_eq!(parse_sizes("3").unwrap().0, [3]);
        assert_eq!(parse_sizes("1..3,8").unwrap().0, [1, 2, 3, 8]);
        assert_eq!(parse_sizes("2..=4").unwrap().0, [2, 3, 4]);
        assert!(parse_sizes("4..2").is_err());
        assert!(parse_sizes("x").is_err());
        assert!(parse_sizes("0").is_err());
    }
}
