//! Command-line interface.
//!
//! Exit codes: 0 success, 2 ambiguous retrieval, 3 silent retrieval,
//! 64 usage error, 65 malformed input data, 74 I/O failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis;
use crate::clique::{ClusterState, ClusterTopology, DecodeParams, FanalPattern};
use crate::error::Error;
use crate::experiments::{self, SweepRecord, SweepSpec};
use crate::formats;
use crate::hopfield;
use crate::wta::{parse_soft_input, Codebook, SoftMLDecoder};
use crate::CliqueNetwork;

pub const EXIT_OK: i32 = 0;
pub const EXIT_AMBIGUOUS: i32 = 2;
pub const EXIT_SILENT: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Parser)]
#[command(name = "cliquenet", version, about = "Clustered clique-coded associative memory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn messages into a network snapshot.
    Learn(LearnArgs),
    /// Complete a partially erased message.
    Retrieve(RetrieveArgs),
    /// Accept or reject each message of a file.
    Classify(ClassifyArgs),
    /// Run the soft maximum-likelihood decoder on one input.
    Decode(DecodeArgs),
    /// Evaluate closed-form formulas as CSV.
    Analyze(AnalyzeArgs),
    /// Run Monte Carlo sweeps.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct TopologyArgs {
    #[arg(long, short = 'c')]
    pub clusters: Option<usize>,
    #[arg(long, short = 'l')]
    pub fanals: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DecodeFlags {
    #[arg(long)]
    pub gamma: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<i64>,
    #[arg(long)]
    pub iters: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    #[command(flatten)]
    pub topology: TopologyArgs,
    /// Message file: one hex message per line, or one word per line with `--ascii`.
    #[arg(long, short = 'm', conflicts_with = "random")]
    pub messages: Option<PathBuf>,
    /// Learn this many uniform random messages instead of a file.
    #[arg(long)]
    pub random: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Read words as ASCII, one byte per cluster of 256 fanals.
    #[arg(long)]
    pub ascii: bool,
    /// Add to the existing snapshot at `--out` instead of starting empty.
    #[arg(long)]
    pub append: bool,
    #[arg(long, short = 'o')]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RetrieveArgs {
    #[arg(long, short = 's')]
    pub snapshot: PathBuf,
    /// Probe such as `?:72:61:69:6e`, or `?rain` with `--ascii`.
    pub probe: String,
    #[arg(long)]
    pub ascii: bool,
    #[command(flatten)]
    pub decode: DecodeFlags,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long, short = 's')]
    pub snapshot: PathBuf,
    #[arg(long, short = 'm')]
    pub messages: PathBuf,
    #[arg(long)]
    pub ascii: bool,
    #[command(flatten)]
    pub decode: DecodeFlags,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Codebook file: one `+`/`-` word per line.
    #[arg(long)]
    pub codebook: PathBuf,
    /// Input over `+`, `-` and `0` (erased).
    #[arg(long, allow_hyphen_values = true)]
    pub input: String,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Formula {
    All,
    Code,
    Density,
    DensityApprox,
    Bound,
    Memory,
    Accept,
    AcceptedSet,
    Ratio,
    Retrieval,
    RetrievalApprox,
    PRetrieve,
    PRemain,
    COpt,
    Efficiency,
    HnnDiversity,
    HnnCapacity,
    HnnMemory,
    HnnEfficiency,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(value_enum)]
    pub formula: Formula,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub c: Option<usize>,
    #[arg(long)]
    pub l: Option<usize>,
    /// Number of learnt messages.
    #[arg(long)]
    pub m: Option<f64>,
    /// Erased clusters.
    #[arg(long)]
    pub ce: Option<usize>,
    /// Density; defaults to the expectation after `m` messages.
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long)]
    pub p0: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub gamma: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Svg,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep file with one section per sweep.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in sweep: density, accept, ratio, retrieval, retrieval_iter, capacity or hopfield.
    #[arg(long)]
    pub preset: Option<String>,
    /// Run presets with clusters of up to 512 fanals.
    #[arg(long)]
    pub full: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// CSV file (default: standard output), or the directory receiving one SVG per sweep.
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    /// Fill the wall-time column.
    #[arg(long)]
    pub timing: bool,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_) => EXIT_IO,
            e if e.is_data_error() => EXIT_DATA,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

type CliResult<T = i32> = std::result::Result<T, CliError>;

/// Parses `args` (program name first) and runs the command, writing normal
/// output to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write) -> CliResult {
    match command {
        Command::Learn(a) => cmd_learn(a, out),
        Command::Retrieve(a) => cmd_retrieve(a, out),
        Command::Classify(a) => cmd_classify(a, out),
        Command::Decode(a) => cmd_decode(a, out),
        Command::Analyze(a) => cmd_analyze(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    })
}

fn load_snapshot(path: &Path) -> CliResult<CliqueNetwork> {
    CliqueNetwork::load(path).map_err(|e| {
        let mut ce = CliError::from(e);
        ce.message = format!("{}: {}", path.display(), ce.message);
        ce
    })
}

fn resolve_topology(args: &TopologyArgs, ascii: bool) -> CliResult<Option<ClusterTopology>> {
    let fanals = match (args.fanals, ascii) {
        (Some(l), true) if l != 256 => {
            return Err(CliError::usage("--ascii needs --fanals 256 (or no --fanals)"))
        }
        (None, true) => Some(256),
        (l, _) => l,
    };
    match (args.clusters, fanals) {
        (Some(c), Some(l)) => Ok(Some(ClusterTopology::new(c, l)?)),
        (None, None) => Ok(None),
        // the word length decides the cluster count
        (None, Some(_)) if ascii => Ok(None),
        _ => Err(CliError::usage("--clusters and --fanals go together")),
    }
}

pub fn cmd_learn(a: &LearnArgs, out: &mut dyn Write) -> CliResult {
    if a.messages.is_none() && a.random.is_none() {
        return Err(CliError::usage("learn needs --messages FILE or --random N"));
    }
    if a.ascii && a.random.is_some() {
        return Err(CliError::usage("--ascii applies to message files only"));
    }
    let given = resolve_topology(&a.topology, a.ascii)?;
    let mut net = if a.append {
        let net = load_snapshot(&a.out)?;
        if let Some(t) = given {
            if t != *net.topology() {
                return Err(CliError::usage(format!(
                    "snapshot is c={} l={}, flags say c={} l={}",
                    net.topology().clusters(),
                    net.topology().fanals(),
                    t.clusters(),
                    t.fanals()
                )));
            }
        }
        net
    } else {
        let t = match (given, &a.messages) {
            (Some(t), _) => t,
            (None, Some(path)) if a.ascii => {
                let text = read_text(path)?;
                let word = text
                    .lines()
                    .map(|l| l.trim_end_matches('\r'))
                    .find(|w| !w.is_empty() && !w.starts_with('#'))
                    .unwrap_or("");
                ClusterTopology::new(word.len(), 256)?
            }
            _ => return Err(CliError::usage("learn needs --clusters and --fanals")),
        };
        CliqueNetwork::new(t)
    };
    let topology = *net.topology();

    // Parse everything before touching the network so a bad line leaves no partial snapshot.
    let patterns: Vec<FanalPattern> = match (&a.messages, a.random) {
        (Some(path), _) => {
            let text = read_text(path)?;
            if a.ascii {
                formats::parse_ascii_messages(&text, &topology)?
            } else {
                formats::parse_messages(&text, topology.message_bits())?
                    .iter()
                    .map(|m| topology.pattern_of(m))
                    .collect::<Result<_, _>>()?
            }
        }
        (None, Some(count)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            (0..count)
                .map(|_| experiments::random_pattern(&mut rng, &topology))
                .collect()
        }
        (None, None) => unreachable!(),
    };
    for p in &patterns {
        net.learn_pattern(p)?;
    }
    net.save(&a.out)?;

    let m = net.learned_count();
    writeln!(out, "clusters: {}", topology.clusters())?;
    writeln!(out, "fanals: {}", topology.fanals())?;
    writeln!(out, "messages: {m}")?;
    writeln!(out, "edges: {}", net.edge_count())?;
    writeln!(out, "density: {:.6}", net.density())?;
    writeln!(
        out,
        "expected density: {:.6}",
        analysis::expected_density(m as f64, topology.fanals() as f64)
    )?;
    Ok(EXIT_OK)
}

fn decode_params(flags: &DecodeFlags, default: DecodeParams) -> CliResult<DecodeParams> {
    let p = DecodeParams {
        gamma: flags.gamma.unwrap_or(default.gamma),
        sigma: flags.sigma.unwrap_or(default.sigma),
        max_iters: flags.iters.unwrap_or(default.max_iters),
        stop_on_fixed_point: true,
    };
    if p.max_iters == 0 {
        return Err(CliError::usage("--iters must be at least 1"));
    }
    Ok(p)
}

/// Default iteration budget for `retrieve`.
pub const RETRIEVE_ITERS: usize = 4;

pub fn cmd_retrieve(a: &RetrieveArgs, out: &mut dyn Write) -> CliResult {
    let net = load_snapshot(&a.snapshot)?;
    let topology = *net.topology();
    let params = decode_params(&a.decode, DecodeParams::retrieval(RETRIEVE_ITERS))?;
    let probe = if a.ascii {
        formats::parse_ascii_probe(&a.probe, &topology)?
    } else {
        formats::parse_probe(&a.probe, &topology)?
    };
    let outcome = net.decode(&probe, &params)?;
    let show = |f: u32| {
        if a.ascii {
            formats::format_ascii(&FanalPattern::full(&[f]))
        } else {
            format!("{f:x}")
        }
    };
    if outcome.is_unique() {
        let p = outcome.pattern();
        let text = if a.ascii {
            formats::format_ascii(&p)
        } else {
            formats::format_probe(&p, &topology)
        };
        writeln!(out, "{text}")?;
    } else {
        for (i, state) in outcome.clusters.iter().enumerate() {
            match state {
                ClusterState::Unique(f) => writeln!(out, "cluster {i}: {}", show(*f))?,
                ClusterState::Ambiguous(fs) => {
                    let list: Vec<String> = fs.iter().map(|&f| show(f)).collect();
                    writeln!(out, "cluster {i}: AMBIGUOUS {{{}}}", list.join(", "))?
                }
                ClusterState::Silent => writeln!(out, "cluster {i}: SILENT")?,
            }
        }
    }
    writeln!(out, "iterations: {}", outcome.iterations)?;
    Ok(if outcome.any_ambiguous() {
        EXIT_AMBIGUOUS
    } else if outcome.any_silent() {
        EXIT_SILENT
    } else {
        EXIT_OK
    })
}

pub fn cmd_classify(a: &ClassifyArgs, out: &mut dyn Write) -> CliResult {
    let net = load_snapshot(&a.snapshot)?;
    let topology = *net.topology();
    let params = decode_params(&a.decode, DecodeParams::classification(topology.clusters()))?;
    let text = read_text(&a.messages)?;
    let patterns: Vec<FanalPattern> = if a.ascii {
        formats::parse_ascii_messages(&text, &topology)?
    } else {
        formats::parse_messages(&text, topology.message_bits())?
            .iter()
            .map(|m| topology.pattern_of(m))
            .collect::<Result<_, _>>()?
    };
    let mut accepted = 0usize;
    for p in &patterns {
        let ok = net.is_pattern_accepted(p, &params)?;
        accepted += usize::from(ok);
        let label = if a.ascii {
            formats::format_ascii(p)
        } else {
            topology.message_of(p)?.to_hex()
        };
        writeln!(out, "{label} {}", if ok { "accept" } else { "reject" })?;
    }
    let rate = if patterns.is_empty() {
        0.0
    } else {
        accepted as f64 / patterns.len() as f64
    };
    writeln!(out, "accepted: {accepted}/{} ({rate:.6})", patterns.len())?;
    writeln!(out, "density: {:.6}", net.density())?;
    writeln!(
        out,
        "predicted random acceptance: {:.6e}",
        analysis::accept_prob(net.density(), topology.clusters())
    )?;
    Ok(EXIT_OK)
}

pub fn cmd_decode(a: &DecodeArgs, out: &mut dyn Write) -> CliResult {
    let codebook = Codebook::parse(&read_text(&a.codebook)?)?;
    let decoder = SoftMLDecoder::new(codebook);
    let input = parse_soft_input(&a.input)?;
    let output = decoder.decode(&input, a.sigma.unwrap_or(i64::MIN))?;
    let winners: Vec<String> = output.winners.iter().map(|w| w.to_string()).collect();
    writeln!(out, "output: {output}")?;
    writeln!(out, "winners: {}", winners.join(" "))?;
    writeln!(out, "score: {}", output.v_max)?;
    Ok(EXIT_OK)
}

struct Row {
    formula: &'static str,
    params: String,
    value: f64,
}

fn need<T: Copy>(v: Option<T>, flag: &str, formula: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::usage(format!("{formula} needs --{flag}")))
}

fn analyze_rows(a: &AnalyzeArgs, formula: Formula) -> CliResult<Vec<Row>> {
    let name = formula.to_possible_value().unwrap().get_name().to_string();
    let name = name.as_str();
    let row = |formula: &'static str, params: String, value: f64| Row { formula, params, value };
    let density = || -> CliResult<f64> {
        match (a.d, a.m, a.l) {
            (Some(d), _, _) => Ok(d),
            (None, Some(m), Some(l)) => Ok(analysis::expected_density(m, l as f64)),
            _ => Err(CliError::usage(format!("{name} needs --d, or --m and --l"))),
        }
    };
    let dparams = || match a.d {
        Some(d) => format!("d={d}"),
        None => format!("m={};l={}", a.m.unwrap_or(0.0), a.l.unwrap_or(0)),
    };
    Ok(match formula {
        Formula::All => unreachable!(),
        Formula::Code => {
            let c = need(a.c, "c", name)?;
            let p = analysis::clique_code_params(c)?;
            vec![
                row("d_min", format!("c={c}"), p.d_min as f64),
                row("rate", format!("c={c}"), p.rate),
                row("merit", format!("c={c}"), p.merit),
            ]
        }
        Formula::Density => {
            let (m, l) = (need(a.m, "m", name)?, need(a.l, "l", name)?);
            vec![row("density", format!("m={m};l={l}"), analysis::expected_density(m, l as f64))]
        }
        Formula::DensityApprox => {
            let (m, l) = (need(a.m, "m", name)?, need(a.l, "l", name)?);
            vec![row(
                "density_approx",
                format!("m={m};l={l}"),
                analysis::expected_density_approx(m, l as f64),
            )]
        }
        Formula::Bound => {
            let (n, c) = (need(a.n, "n", name)?, need(a.c, "c", name)?);
            vec![row("bound", format!("n={n};c={c}"), analysis::max_ordered_messages(n, c)?)]
        }
        Formula::Memory => {
            let (n, c) = (need(a.n, "n", name)?, need(a.c, "c", name)?);
            vec![row("memory", format!("n={n};c={c}"), analysis::clique_memory_bits(n, c)?)]
        }
        Formula::Accept => {
            let c = need(a.c, "c", name)?;
            let d = density()?;
            vec![row("accept", format!("{};c={c}", dparams()), analysis::accept_prob(d, c))]
        }
        Formula::AcceptedSet => {
            let (c, l) = (need(a.c, "c", name)?, need(a.l, "l", name)?);
            let d = density()?;
            let k = ClusterTopology::new(c, l)?.message_bits();
            let s = analysis::accepted_set_size(k, d, c);
            vec![
                row("accepted_set", format!("{};c={c};l={l}", dparams()), s.value),
                row("accepted_set_log2", format!("{};c={c};l={l}", dparams()), s.log2),
            ]
        }
        Formula::Ratio => {
            let (c, l, m) = (need(a.c, "c", name)?, need(a.l, "l", name)?, need(a.m, "m", name)?);
            let k = ClusterTopology::new(c, l)?.message_bits();
            let p = analysis::accept_prob(density()?, c);
            vec![row("ratio", format!("m={m};c={c};l={l}"), analysis::spurious_ratio(k, p, m))]
        }
        Formula::Retrieval => {
            let (c, l, ce) = (need(a.c, "c", name)?, need(a.l, "l", name)?, need(a.ce, "ce", name)?);
            if ce == 0 || ce >= c {
                return Err(CliError::usage(format!("--ce must satisfy 1 <= ce < c, got {ce}")));
            }
            let value = match a.d {
                Some(d) => analysis::retrieval_error_at_density(d, l, c, ce),
                None => analysis::retrieval_error(need(a.m, "m", name)?, l, c, ce)?,
            };
            vec![row("retrieval", format!("{};c={c};ce={ce}", dparams()), value)]
        }
        Formula::RetrievalApprox => {
            let (c, l, ce, m) = (
                need(a.c, "c", name)?,
                need(a.l, "l", name)?,
                need(a.ce, "ce", name)?,
                need(a.m, "m", name)?,
            );
            vec![row(
                "retrieval_approx",
                format!("m={m};l={l};c={c};ce={ce}"),
                analysis::retrieval_error_approx(m, l, c, ce)?,
            )]
        }
        Formula::PRetrieve => {
            let (c, l) = (need(a.c, "c", name)?, need(a.l, "l", name)?);
            let d = density()?;
            vec![row("p_retrieve", format!("{};c={c}", dparams()), analysis::p_retrieve(d, l, c))]
        }
        Formula::PRemain => {
            let (c, l) = (need(a.c, "c", name)?, need(a.l, "l", name)?);
            let d = density()?;
            vec![row(
                "p_remain",
                format!("{};c={c};gamma={}", dparams(), a.gamma),
                analysis::p_remain(d, l, c, a.gamma),
            )]
        }
        Formula::COpt => {
            let (n, p0) = (need(a.n, "n", name)?, need(a.p0, "p0", name)?);
            vec![
                row("c_opt", format!("n={n};p0={p0}"), analysis::c_opt(n, p0)? as f64),
                row("c_opt_unrounded", format!("n={n};p0={p0}"), analysis::c_opt_unrounded(n, p0)?),
            ]
        }
        Formula::Efficiency => {
            let (c, l, m) = (need(a.c, "c", name)?, need(a.l, "l", name)?, need(a.m, "m", name)?);
            let t = ClusterTopology::new(c, l)?;
            let value = analysis::network_efficiency(m * t.message_bits() as f64, t.max_edges() as f64)?;
            vec![row("efficiency", format!("m={m};c={c};l={l}"), value)]
        }
        Formula::HnnDiversity => {
            let n = need(a.n, "n", name)?;
            vec![row("hnn_diversity", format!("n={n}"), hopfield::hnn_diversity(n as f64)?)]
        }
        Formula::HnnCapacity => {
            let n = need(a.n, "n", name)?;
            vec![row("hnn_capacity", format!("n={n}"), hopfield::hnn_capacity(n as f64)?)]
        }
        Formula::HnnMemory => {
            let n = need(a.n, "n", name)?;
            vec![row("hnn_memory", format!("n={n}"), hopfield::hnn_max_memory_bits(n as f64)?)]
        }
        Formula::HnnEfficiency => {
            let n = need(a.n, "n", name)?;
            vec![
                row("hnn_efficiency", format!("n={n}"), hopfield::hnn_efficiency(n as f64)?),
                row("hnn_capacity_ratio", format!("n={n}"), hopfield::hnn_capacity_ratio(n as f64)?),
            ]
        }
    })
}

pub fn cmd_analyze(a: &AnalyzeArgs, out: &mut dyn Write) -> CliResult {
    let rows = if a.formula == Formula::All {
        // Every formula whose inputs were given.
        let mut rows = Vec::new();
        for f in Formula::value_variants().iter().filter(|&&f| f != Formula::All) {
            match analyze_rows(a, *f) {
                Ok(r) => rows.extend(r),
                Err(e) if e.code == EXIT_USAGE && e.message.contains(" needs --") => {}
                Err(e) => return Err(e),
            }
        }
        if rows.is_empty() {
            return Err(CliError::usage("no formula has all of its parameters"));
        }
        rows
    } else {
        analyze_rows(a, a.formula)?
    };
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["formula", "parameters", "value"]).map_err(Error::from)?;
    for r in rows {
        wtr.write_record([r.formula, &r.params, &r.value.to_string()])
            .map_err(Error::from)?;
    }
    wtr.flush()?;
    Ok(EXIT_OK)
}

pub fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> CliResult {
    let mut sweeps: Vec<(String, SweepSpec)> = match (&a.config, &a.preset) {
        (Some(path), _) => experiments::parse_sweep_file(&read_text(path)?)?,
        (None, Some(name)) => {
            experiments::preset(name, a.full).map_err(|e| CliError::usage(e.to_string()))?
        }
        (None, None) => unreachable!("clap requires one of them"),
    };
    if a.format == OutputFormat::Svg && a.out.is_none() {
        return Err(CliError::usage("--format svg needs --out DIR"));
    }
    for (_, spec) in &mut sweeps {
        if let Some(seed) = a.seed {
            spec.seed = seed;
        }
        if let Some(trials) = a.trials {
            spec.trials = trials;
        }
        spec.timing |= a.timing;
        spec.validate().map_err(|e| CliError::usage(e.to_string()))?;
    }

    let mut all: Vec<SweepRecord> = Vec::new();
    for (name, spec) in &sweeps {
        let records = experiments::run(spec)?;
        if a.format == OutputFormat::Svg {
            let dir = a.out.as_ref().unwrap();
            fs::create_dir_all(dir)?;
            let path = dir.join(format!("{name}.svg"));
            fs::write(&path, experiments::svg::render(&records, name))?;
            writeln!(out, "{}", path.display())?;
        }
        all.extend(records);
    }
    if a.format == OutputFormat::Csv {
        match &a.out {
            Some(path) => experiments::write_csv(&all, fs::File::create(path)?)?,
            None => experiments::write_csv(&all, &mut *out)?,
        }
    }
    Ok(EXIT_OK)
}
