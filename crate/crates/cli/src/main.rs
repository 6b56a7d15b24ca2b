//! `pcp`: design, encode, decode and simulate PCP codes.
//!
//! Exit status is 0 on success, 1 when the command fails at run time and 2
//! for usage errors.

mod manifest;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use manifest::RunManifest;
use pcp_core::bits::{from_hex, to_hex};
use pcp_core::channel::LLR_LIMIT;
use pcp_core::harness::{
    sweep, write_csv, RandomPuncturingBaseline, StopRule, SweepAxis, TrialConfig,
};
use pcp_core::pcp::{build_pcp, format_rational, parse_rational, rate_to_f64};
use pcp_core::polar::design_profile;
use pcp_core::puncture::{design_punctured_code, make_uniform_pattern};
use pcp_core::{
    BuildRequest, ChannelModel, DesignOptions, Error, PcpSpec, Result, UpdateRule,
};

#[derive(Debug, Parser)]
#[command(name = "pcp", version, about = "Rate-compatible parallel concatenated polar codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a code and write its JSON description.
    Design(DesignArgs),
    /// Monte Carlo HARQ-IR simulation over a parameter grid.
    Simulate(SimulateArgs),
    /// Print the chunk sent in one transmission.
    Encode(EncodeArgs),
    /// Sequentially decode received chunks.
    Decode(DecodeArgs),
    /// Dump the bit-channel reliability profile of a (punctured) code.
    Reliability(ReliabilityArgs),
    /// Validate a code file.
    Check(CheckArgs),
}

fn parse_seed(text: &str) -> std::result::Result<u64, String> {
    match text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => text.parse(),
    }
    .map_err(|e| format!("invalid seed `{text}`: {e}"))
}

#[derive(Debug, Args, Serialize)]
struct DesignArgs {
    /// Design channel per rate, best first (`bec:<e>`, `bsc:<p>`,
    /// `biawgn:<sigma>`). One channel is reused for every rate.
    #[arg(long = "channel", required = true)]
    channels: Vec<ChannelModel>,
    /// Information bits.
    #[arg(long, required_unless_present = "table1_mode")]
    k: Option<u64>,
    /// First transmission length.
    #[arg(long, required_unless_present_any = ["lengths", "table1_mode"])]
    n1: Option<u64>,
    /// Rates as `p/q`, decreasing, comma separated.
    #[arg(long, value_delimiter = ',')]
    rates: Vec<String>,
    /// Explicit transmission lengths, comma separated.
    #[arg(long, value_delimiter = ',')]
    lengths: Vec<u64>,
    /// k = 192 with lengths 256, 128, 195.
    #[arg(long, conflicts_with_all = ["k", "n1", "rates", "lengths"])]
    table1_mode: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Monte Carlo trials per profile for BSC designs.
    #[arg(long, default_value_t = 2000)]
    mc_trials: usize,
    #[arg(long, default_value = "0x5eed", value_parser = parse_seed)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BaselineKind {
    RandomPuncturing,
}

#[derive(Debug, Args, Serialize)]
struct SimulateArgs {
    #[arg(long)]
    spec: PathBuf,
    /// `kind:start:stop:step` or `kind:v1,v2,...`; kind is bec, bsc,
    /// biawgn or ebn0 (dB, one noise level per rate).
    #[arg(long)]
    sweep: SweepAxis,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value = "1", value_parser = parse_seed)]
    seed: u64,
    /// CSV output; stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// `ack-nack` or `fixed:<m>`.
    #[arg(long, default_value = "ack-nack")]
    stop_rule: StopRule,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    threads: Option<usize>,
    /// Use the min-sum check-node rule.
    #[arg(long)]
    min_sum: bool,
    /// Also simulate a comparison scheme.
    #[arg(long, value_enum, requires = "csv")]
    baseline: Option<BaselineKind>,
    #[arg(long, default_value_t = 512)]
    baseline_n_u: usize,
    #[arg(long, default_value_t = 171)]
    baseline_k: usize,
    /// Cumulative baseline lengths; defaults to k / R for the code's rates.
    #[arg(long, value_delimiter = ',')]
    baseline_lengths: Vec<usize>,
    /// Design channel of the baseline mother code; defaults to the code's
    /// last design channel.
    #[arg(long)]
    baseline_channel: Option<ChannelModel>,
    /// Permutation seed; defaults to --seed.
    #[arg(long, value_parser = parse_seed)]
    baseline_seed: Option<u64>,
    /// Baseline CSV; defaults to `<csv stem>.baseline.csv`.
    #[arg(long)]
    baseline_csv: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct EncodeArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Transmission index, 1-based.
    #[arg(long)]
    level: usize,
    /// Message as hex, most significant bit first.
    #[arg(long = "in")]
    input: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("received").required(true).args(["chunks", "llr_file"])))]
struct DecodeArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Hard-decision chunk as hex, one per transmission in order.
    #[arg(long = "chunk")]
    chunks: Vec<String>,
    /// JSON array of LLR arrays, one per transmission.
    #[arg(long, conflicts_with = "chunks")]
    llr_file: Option<PathBuf>,
    /// Transmitted message, to flag each stage as correct or not.
    #[arg(long)]
    truth: Option<String>,
    #[arg(long)]
    min_sum: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct ReliabilityArgs {
    #[arg(long)]
    channel: ChannelModel,
    /// Transmitted length; punctured from the next power of two if needed.
    #[arg(long)]
    n: usize,
    /// Also select the k most reliable positions.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 2000)]
    mc_trials: usize,
    #[arg(long, default_value = "0x5eed", value_parser = parse_seed)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct CheckArgs {
    #[arg(long)]
    spec: PathBuf,
}

fn rule(min_sum: bool) -> UpdateRule {
    if min_sum {
        UpdateRule::MinSum
    } else {
        UpdateRule::Exact
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn load_spec(path: &Path) -> Result<PcpSpec> {
    PcpSpec::from_json(&read(path)?)
}

/// Writes `text` to `out` (with a manifest) or to stdout.
fn emit<P: Serialize>(
    text: &str,
    out: Option<&Path>,
    subcommand: &str,
    params: &P,
    seed: Option<u64>,
) -> Result<()> {
    match out {
        Some(path) => {
            write(path, text)?;
            let mut m = RunManifest::new(subcommand, params, seed);
            m.artifacts.push(path.to_path_buf());
            m.write()
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn design(args: &DesignArgs) -> Result<()> {
    let options = DesignOptions {
        mc_trials: args.mc_trials,
        seed: args.seed,
        rule: UpdateRule::Exact,
    };
    let request = if args.table1_mode {
        let mut r = BuildRequest::three_level(args.channels[0]);
        r.channels = args.channels.clone();
        r.options = options;
        r
    } else {
        let rates = if args.rates.is_empty() {
            None
        } else {
            Some(
                args.rates
                    .iter()
                    .map(|r| parse_rational(r))
                    .collect::<Result<Vec<_>>>()?,
            )
        };
        BuildRequest {
            k: args.k.expect("required by clap"),
            n1: args.n1,
            rates,
            lengths: (!args.lengths.is_empty()).then(|| args.lengths.clone()),
            channels: args.channels.clone(),
            options,
        }
    };
    let spec = build_pcp(&request)?;
    emit(&spec.to_json()?, args.out.as_deref(), "design", args, Some(args.seed))
}

fn default_baseline_csv(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().unwrap_or_default().to_string_lossy();
    csv.with_file_name(format!("{stem}.baseline.csv"))
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let spec = load_spec(&args.spec)?;
    let config = TrialConfig {
        trials: args.trials,
        seed: args.seed,
        stop_rule: args.stop_rule,
        rule: rule(args.min_sum),
        threads: args.threads,
    };
    let mut csv = Vec::new();
    write_csv(&sweep(&spec, &args.sweep, &config)?, &mut csv)?;
    let Some(path) = args.csv.as_deref() else {
        std::io::stdout().lock().write_all(&csv)?;
        return Ok(());
    };
    write(path, &csv)?;
    let mut manifest = RunManifest::new("simulate", args, Some(args.seed));
    manifest.artifacts.push(path.to_path_buf());

    if args.baseline.is_some() {
        let lengths = if args.baseline_lengths.is_empty() {
            let rates: Vec<f64> = spec.schedule().rates().iter().map(rate_to_f64).collect();
            RandomPuncturingBaseline::lengths_for_rates(args.baseline_n_u, args.baseline_k, &rates)
        } else {
            args.baseline_lengths.clone()
        };
        let channel = args.baseline_channel.unwrap_or_else(|| {
            *spec
                .design_channels()
                .last()
                .expect("a code has at least one level")
        });
        let baseline = RandomPuncturingBaseline::new(
            args.baseline_n_u,
            args.baseline_k,
            lengths,
            &channel,
            spec.options(),
            args.baseline_seed.unwrap_or(args.seed),
        )?;
        let mut out = Vec::new();
        write_csv(&sweep(&baseline, &args.sweep, &config)?, &mut out)?;
        let baseline_path = args
            .baseline_csv
            .clone()
            .unwrap_or_else(|| default_baseline_csv(path));
        write(&baseline_path, &out)?;
        manifest.artifacts.push(baseline_path);
    }
    manifest.write()
}

fn encode(args: &EncodeArgs) -> Result<()> {
    let spec = load_spec(&args.spec)?;
    let u = from_hex(&args.input, spec.k())?;
    let chunk = spec.encode_level(&u, args.level)?;
    emit(&to_hex(&chunk), args.out.as_deref(), "encode", args, None)
}

#[derive(Serialize)]
struct StageOutput {
    level: usize,
    decoded: usize,
    ambiguous: usize,
    /// Present when the true message was supplied.
    correct: Option<bool>,
}

#[derive(Serialize)]
struct DecodeOutput {
    k: usize,
    transmissions: usize,
    message: String,
    stages: Vec<StageOutput>,
}

fn decode(args: &DecodeArgs) -> Result<()> {
    let spec = load_spec(&args.spec)?;
    let chunks: Vec<Vec<f64>> = match &args.llr_file {
        Some(path) => serde_json::from_str(&read(path)?)?,
        None => args
            .chunks
            .iter()
            .zip(spec.levels())
            .map(|(hex, level)| {
                Ok(from_hex(hex, level.n())?
                    .iter()
                    .map(|&b| if b == 0 { LLR_LIMIT } else { -LLR_LIMIT })
                    .collect())
            })
            .collect::<Result<_>>()?,
    };
    if args.llr_file.is_none() && args.chunks.len() > spec.depth() {
        return Err(Error::OutOfRange(format!(
            "{} chunks for a {}-level code",
            args.chunks.len(),
            spec.depth()
        )));
    }
    let truth = args
        .truth
        .as_deref()
        .map(|t| from_hex(t, spec.k()))
        .transpose()?;
    let result = spec.decode(&chunks, rule(args.min_sum))?;
    let output = DecodeOutput {
        k: spec.k(),
        transmissions: chunks.len(),
        message: to_hex(&result.message),
        stages: result
            .stages
            .iter()
            .map(|s| StageOutput {
                level: s.level,
                decoded: s.decoded.len(),
                ambiguous: s.ambiguous,
                correct: truth.as_deref().map(|t| s.is_correct(&result.message, t)),
            })
            .collect(),
    };
    emit(
        &serde_json::to_string_pretty(&output)?,
        args.out.as_deref(),
        "decode",
        args,
        None,
    )
}

fn reliability(args: &ReliabilityArgs) -> Result<()> {
    let options = DesignOptions {
        mc_trials: args.mc_trials,
        seed: args.seed,
        rule: UpdateRule::Exact,
    };
    let document = match args.k {
        Some(k) => {
            let (code, profile) = design_punctured_code(&args.channel, args.n, k, &options)?;
            profile.to_document(Some(code.info()))
        }
        None => {
            let n_u = args.n.next_power_of_two();
            let pattern = make_uniform_pattern(n_u, args.n)?;
            design_profile(&args.channel, n_u, Some(&pattern), &options, args.n as u64)?
                .to_document(None)
        }
    };
    emit(
        &serde_json::to_string_pretty(&document)?,
        args.out.as_deref(),
        "reliability",
        args,
        Some(args.seed),
    )
}

fn check(args: &CheckArgs) -> Result<()> {
    let spec = load_spec(&args.spec)?;
    let rates: Vec<String> = spec.schedule().rates().iter().map(format_rational).collect();
    println!(
        "ok: {} levels, k = {}, lengths {:?}, rates [{}]",
        spec.depth(),
        spec.k(),
        spec.schedule().lengths(),
        rates.join(", ")
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Design(a) => design(a),
        Command::Simulate(a) => simulate(a),
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::Reliability(a) => reliability(a),
        Command::Check(a) => check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
