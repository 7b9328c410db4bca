//! Command-line front end. Every command is a pure function of its flags and
//! input files; outputs are byte-identical across reruns.
//!
//! Exit status: 0 when every check passes, 1 when a check fails, 2 on usage,
//! parse, or size-limit errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::bits::BitString;
use crate::election::{parse_election, parse_soc, CandidateId, DodgsonTriple, Election};
use crate::junta::{build_report, junta_nu, uniform_ensemble, JuntaParams, ENUM_MAX_LEN};
use crate::mc::{mc_row, Event, McRow};
use crate::sat::toy_pierced_sat;
use crate::skc::{adversarial_benign_scheme, wrap_benign, wrapper_row, ExactScheme, FunctionTable, WrapperRow};
use crate::solvers::{exact_scores, greedy_score, greedy_winner};

/// Environment variable supplying the default Monte Carlo seed.
pub const SEED_ENV: &str = "SKC_SEED";
/// Longest length the wrapper demo sweeps.
pub const WRAPPER_MAX_LEN: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "skc", version, about = "Self-knowingly correct Dodgson heuristics and junta checkers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact and greedy Dodgson scores for every candidate of an election.
    Score(ScoreArgs),
    /// Monte Carlo frequency of non-nice triples against the analytic bounds.
    Mc(McArgs),
    /// Junta construction over the toy SAT set, with every condition checker.
    Junta(JuntaArgs),
    /// Maybe-fraction of a wrapped benign scheme at each length.
    WrapperDemo(WrapperArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Native,
    Soc,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Election file (native format, or PrefLib SOC).
    #[arg(long)]
    pub input: PathBuf,
    /// Input format; inferred from a `.soc` extension when omitted.
    #[arg(long, value_enum)]
    pub input_format: Option<InputFormat>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Grid points `m:n`, comma separated.
    #[arg(long, conflicts_with_all = ["m", "n"])]
    pub grid: Option<String>,
    #[arg(long, requires = "n")]
    pub m: Option<usize>,
    #[arg(long, requires = "m")]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 20_000)]
    pub trials: u64,
    /// Master seed; falls back to $SKC_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Events to estimate, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "not_nice,any_candidate_maybe")]
    pub events: Vec<Event>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EnsembleKind {
    Nu,
    Uniform,
}

#[derive(Debug, Args)]
pub struct JuntaArgs {
    /// Inclusive length range `a..b`; defaults to threshold..10.
    #[arg(long)]
    pub lengths: Option<String>,
    #[arg(long, value_enum, default_value = "nu")]
    pub ensemble: EnsembleKind,
    /// Balance constant c (rational, > 1).
    #[arg(long, default_value = "3")]
    pub balance_c: String,
    /// Almost-uniformity constant K (rational, > 0).
    #[arg(long, default_value = "256")]
    pub uniformity_k: String,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeKind {
    Adversarial,
    Exact,
}

#[derive(Debug, Args)]
pub struct WrapperArgs {
    /// Inclusive length range `a..b`, at most 12.
    #[arg(long, default_value = "1..12")]
    pub lengths: String,
    #[arg(long, value_enum, default_value = "adversarial")]
    pub scheme: SchemeKind,
    /// Target function table (`bitstring value` per line); defaults to the
    /// number of ones in the string.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("{0}")]
    Limit(String),
}

/// Rendered command output and whether every check passed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub pass: bool,
}

/// Formats with 12 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn frac(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn parse_rational(s: &str) -> Result<BigRational, CliError> {
    let bad = || CliError::Usage(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

/// Parses `a..b` (inclusive) or a single length.
pub fn parse_lengths(s: &str) -> Result<RangeInclusive<usize>, CliError> {
    let bad = || CliError::Usage(format!("bad length range {s:?}; expected a..b"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.strip_prefix('=').unwrap_or(b)),
        None => (s, s),
    };
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}

/// Parses `m:n,m:n,...`.
pub fn parse_grid(s: &str) -> Result<Vec<(usize, usize)>, CliError> {
    let grid = s
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (m, n) = p
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("bad grid point {p:?}; expected m:n")))?;
            let m: usize = m.trim().parse().map_err(|_| CliError::Usage(format!("bad m in {p:?}")))?;
            let n: usize = n.trim().parse().map_err(|_| CliError::Usage(format!("bad n in {p:?}")))?;
            if m == 0 || n == 0 {
                return Err(CliError::Usage(format!("grid point {p:?} needs m, n ≥ 1")));
            }
            Ok((m, n))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if grid.is_empty() {
        return Err(CliError::Usage("grid is empty".into()));
    }
    Ok(grid)
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_election(args: &ScoreArgs) -> Result<(Election, Vec<String>), CliError> {
    let text = read(&args.input)?;
    let kind = args.input_format.unwrap_or_else(|| {
        if args.input.extension().is_some_and(|e| e == "soc") {
            InputFormat::Soc
        } else {
            InputFormat::Native
        }
    });
    let input_err = |e: crate::election::ParseError| CliError::Input {
        path: args.input.display().to_string(),
        message: e.to_string(),
    };
    match kind {
        InputFormat::Native => {
            let e = parse_election(&text).map_err(input_err)?;
            let names = vec![String::new(); e.m()];
            Ok((e, names))
        }
        InputFormat::Soc => parse_soc(&text).map_err(input_err),
    }
}

pub fn cmd_score(args: &ScoreArgs) -> Result<Outcome, CliError> {
    let (e, names) = load_election(args)?;
    let exact = exact_scores(&e).map_err(|err| CliError::Limit(err.to_string()))?;
    let best = *exact.iter().min().expect("m ≥ 1");
    let winners: Vec<CandidateId> = e.candidates().filter(|c| exact[c.index()] == best).collect();

    let mut pass = true;
    let mut rows = Vec::new();
    for c in e.candidates() {
        let greedy = greedy_score(&DodgsonTriple {
            election: e.clone(),
            c,
        });
        let gw = greedy_winner(&e, c);
        let is_winner = winners.contains(&c);
        if (greedy.is_definite() && greedy.value != exact[c.index()]) || (gw.is_definite() && gw.value != is_winner) {
            pass = false;
        }
        rows.push((c, greedy, gw, is_winner));
    }

    let mut out = String::new();
    let winner_list: Vec<String> = winners.iter().map(|w| w.to_string()).collect();
    match args.format {
        Format::Text => {
            writeln!(out, "election m={} n={}", e.m(), e.n()).unwrap();
            writeln!(out, "candidate name exact greedy greedy_flag greedy_winner greedy_winner_flag").unwrap();
            for (c, g, gw, _) in &rows {
                let name = if names[c.index()].is_empty() { "-" } else { &names[c.index()] };
                writeln!(
                    out,
                    "{} {} {} {} {} {} {}",
                    c, name, exact[c.index()], g.value, g.flag, gw.value, gw.flag
                )
                .unwrap();
            }
            writeln!(out, "winners {}", winner_list.join(" ")).unwrap();
        }
        Format::Csv => {
            writeln!(
                out,
                "candidate,name,exact_score,greedy_score,greedy_flag,greedy_winner,greedy_winner_flag,exact_winner"
            )
            .unwrap();
            for (c, g, gw, w) in &rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    c,
                    names[c.index()],
                    exact[c.index()],
                    g.value,
                    g.flag,
                    gw.value,
                    gw.flag,
                    w
                )
                .unwrap();
            }
        }
        Format::Json => {
            for (c, g, gw, w) in &rows {
                let rec = serde_json::json!({
                    "record": "candidate",
                    "candidate": c.index(),
                    "name": names[c.index()],
                    "exact_score": exact[c.index()].0,
                    "greedy_score": g.value.0,
                    "greedy_flag": g.flag.to_string(),
                    "greedy_winner": gw.value,
                    "greedy_winner_flag": gw.flag.to_string(),
                    "exact_winner": w,
                });
                writeln!(out, "{rec}").unwrap();
            }
            let idx: Vec<usize> = winners.iter().map(|w| w.index()).collect();
            writeln!(out, "{}", serde_json::json!({ "record": "winners", "winners": idx })).unwrap();
        }
    }
    Ok(Outcome { output: out, pass })
}

/// Seed and where it came from.
fn resolve_seed(flag: Option<u64>) -> Result<(u64, &'static str), CliError> {
    if let Some(s) = flag {
        return Ok((s, "flag"));
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(|s| (s, "env"))
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok((0, "default")),
    }
}

fn bound_cell(row: &McRow) -> String {
    row.bound.map_or_else(|| "NA".to_string(), fmt_float)
}

pub fn cmd_mc(args: &McArgs) -> Result<Outcome, CliError> {
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let grid = match (&args.grid, args.m, args.n) {
        (Some(g), _, _) => parse_grid(g)?,
        (None, Some(m), Some(n)) => parse_grid(&format!("{m}:{n}"))?,
        _ => return Err(CliError::Usage("give --grid or both --m and --n".into())),
    };
    if args.events.is_empty() {
        return Err(CliError::Usage("no events selected".into()));
    }
    let (seed, source) = resolve_seed(args.seed)?;

    let mut rows = Vec::new();
    for &event in &args.events {
        for &(m, n) in &grid {
            rows.push(mc_row(event, m, n, args.trials, seed));
        }
    }
    let pass = rows.iter().all(|r| r.pass);

    let mut out = String::new();
    match args.format {
        Format::Csv => {
            writeln!(out, "# seed={seed} source={source} trials={}", args.trials).unwrap();
            writeln!(out, "event,m,n,trials,successes,p_hat,ci99_upper,bound,pass").unwrap();
            for r in &rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    r.event,
                    r.m,
                    r.n,
                    r.trials,
                    r.successes,
                    fmt_float(r.p_hat),
                    fmt_float(r.ci99_upper),
                    bound_cell(r),
                    r.pass
                )
                .unwrap();
            }
        }
        Format::Text => {
            writeln!(out, "seed {seed} (source: {source})").unwrap();
            for r in &rows {
                writeln!(
                    out,
                    "{:<20} m={:<3} n={:<6} trials={} successes={} p_hat={} ci99_upper={} bound={} {}",
                    r.event.name(),
                    r.m,
                    r.n,
                    r.trials,
                    r.successes,
                    fmt_float(r.p_hat),
                    fmt_float(r.ci99_upper),
                    bound_cell(r),
                    if r.pass { "PASS" } else { "FAIL" }
                )
                .unwrap();
            }
        }
        Format::Json => {
            writeln!(
                out,
                "{{\"record\":\"header\",\"seed\":{seed},\"seed_source\":\"{source}\",\"trials\":{}}}",
                args.trials
            )
            .unwrap();
            for r in &rows {
                let bound = r.bound.map_or_else(|| "null".to_string(), fmt_float);
                writeln!(
                    out,
                    "{{\"record\":\"estimate\",\"event\":\"{}\",\"m\":{},\"n\":{},\"trials\":{},\"successes\":{},\
                     \"p_hat\":{},\"ci99_upper\":{},\"bound\":{},\"pass\":{}}}",
                    r.event,
                    r.m,
                    r.n,
                    r.trials,
                    r.successes,
                    fmt_float(r.p_hat),
                    fmt_float(r.ci99_upper),
                    bound,
                    r.pass
                )
                .unwrap();
            }
        }
    }
    Ok(Outcome { output: out, pass })
}

pub fn cmd_junta(args: &JuntaArgs) -> Result<Outcome, CliError> {
    let ps = toy_pierced_sat();
    let range = match &args.lengths {
        Some(s) => parse_lengths(s)?,
        None => ps.threshold..=10,
    };
    if *range.end() > ENUM_MAX_LEN {
        return Err(CliError::Limit(format!(
            "length {} exceeds the enumeration limit {ENUM_MAX_LEN}",
            range.end()
        )));
    }
    let balance_c = parse_rational(&args.balance_c)?;
    if balance_c <= BigRational::from_integer(1.into()) {
        return Err(CliError::Usage("--balance-c must exceed 1".into()));
    }
    let uniformity_k = parse_rational(&args.uniformity_k)?;
    if uniformity_k <= BigRational::from_integer(0.into()) {
        return Err(CliError::Usage("--uniformity-k must be positive".into()));
    }
    let params = JuntaParams {
        balance_c,
        uniformity_k,
        ..JuntaParams::default()
    };
    let ensemble = match args.ensemble {
        EnsembleKind::Nu => junta_nu(&ps),
        EnsembleKind::Uniform => uniform_ensemble(),
    };
    let report = build_report(&ensemble, "toy-sat", &ps, &params, range).map_err(|e| CliError::Limit(e.to_string()))?;
    let output = match args.format {
        Format::Text => report.to_text(),
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json_lines(),
    };
    Ok(Outcome {
        output,
        pass: report.construction_holds(),
    })
}

fn popcount(x: &BitString) -> i64 {
    x.count_ones() as i64
}

pub fn cmd_wrapper_demo(args: &WrapperArgs) -> Result<Outcome, CliError> {
    let range = parse_lengths(&args.lengths)?;
    if *range.start() == 0 {
        return Err(CliError::Usage("lengths start at 1".into()));
    }
    if *range.end() > WRAPPER_MAX_LEN {
        return Err(CliError::Limit(format!(
            "length {} exceeds the wrapper demo limit {WRAPPER_MAX_LEN}",
            range.end()
        )));
    }
    let table = match &args.input {
        Some(path) => {
            let t: FunctionTable<i64> = FunctionTable::parse(&read(path)?).map_err(|e| CliError::Input {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            if !t.covers(*range.end()) {
                return Err(CliError::Input {
                    path: path.display().to_string(),
                    message: format!("table does not cover every string of length 1..={}", range.end()),
                });
            }
            t
        }
        None => FunctionTable::from_fn(*range.end(), popcount),
    };
    let target = |x: &BitString| *table.get(x).expect("table covers the range");

    // placeholder for maybe answers; never compared against the target
    const SENTINEL: i64 = i64::MIN;
    let mut rows: Vec<WrapperRow> = Vec::new();
    for n in range {
        let row = match args.scheme {
            SchemeKind::Adversarial => {
                let alg = wrap_benign(adversarial_benign_scheme(target, n), SENTINEL);
                wrapper_row(&alg, target, n)
            }
            SchemeKind::Exact => {
                let alg = wrap_benign(ExactScheme(target), SENTINEL);
                wrapper_row(&alg, target, n)
            }
        }
        .map_err(|e| CliError::Limit(e.to_string()))?;
        rows.push(row);
    }
    let pass = rows.iter().all(WrapperRow::pass);

    let mut out = String::new();
    match args.format {
        Format::Csv => {
            writeln!(out, "{}", WrapperRow::csv_header()).unwrap();
            for r in &rows {
                writeln!(out, "{}", r.to_csv()).unwrap();
            }
        }
        Format::Text => {
            for r in &rows {
                writeln!(
                    out,
                    "n={:<3} maybe_fraction={:<12} bound={:<8} wrong_definite={} {}",
                    r.n,
                    frac(&r.fraction),
                    frac(&r.bound),
                    r.wrong_definite,
                    if r.pass() { "PASS" } else { "FAIL" }
                )
                .unwrap();
            }
        }
        Format::Json => {
            for r in &rows {
                let rec = serde_json::json!({
                    "n": r.n,
                    "fraction": frac(&r.fraction),
                    "bound": frac(&r.bound),
                    "wrong_definite": r.wrong_definite,
                    "pass": r.pass(),
                });
                writeln!(out, "{rec}").unwrap();
            }
        }
    }
    Ok(Outcome { output: out, pass })
}

fn out_path(cmd: &Command) -> Option<&PathBuf> {
    match cmd {
        Command::Score(a) => a.out.as_ref(),
        Command::Mc(a) => a.out.as_ref(),
        Command::Junta(a) => a.out.as_ref(),
        Command::WrapperDemo(a) => a.out.as_ref(),
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Score(a) => cmd_score(a),
        Command::Mc(a) => cmd_mc(a),
        Command::Junta(a) => cmd_junta(a),
        Command::WrapperDemo(a) => cmd_wrapper_demo(a),
    }
}

/// Parses arguments, runs the command, writes its output, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match out_path(&cli.command) {
        Some(path) => {
            if let Err(e) = fs::write(path, &outcome.output) {
                eprintln!("error: {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{}", outcome.output),
    }
    if outcome.pass {
        0
    } else {
        1
    }
}
