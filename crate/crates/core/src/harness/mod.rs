//! Monte Carlo HARQ-IR simulation.
//!
//! Every trial draws its own ChaCha8 stream from `(seed, point, set, trial)`
//! and tallies are integer sums, so results do not depend on how many
//! threads run the trials.

mod baseline;
mod report;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use baseline::RandomPuncturingBaseline;
pub use report::{write_csv, CSV_HEADER};

use crate::pcp::rate_to_f64;
use crate::{ChannelKind, ChannelModel, Error, PcpSpec, Result, UpdateRule};

/// Mixes `salt` into `seed` (SplitMix64 finalizer).
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for one trial.
pub fn trial_rng(seed: u64, point: u64, set: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(mix_seed(mix_seed(seed, point), set), trial))
}

/// Anything that sends `k` bits over up to `depth()` incremental chunks.
pub trait RateCompatibleScheme: Sync {
    fn k(&self) -> usize;

    fn depth(&self) -> usize;

    /// Coded bits sent after `m` transmissions.
    fn cumulative_length(&self, m: usize) -> usize;

    fn encode(&self, u: &[u8]) -> Result<Vec<Vec<u8>>>;

    /// Message estimate from the LLRs of the first `chunks.len()` chunks.
    fn decode(&self, chunks: &[Vec<f64>], rule: UpdateRule) -> Result<Vec<u8>>;

    /// Rate after `m` transmissions.
    fn rate(&self, m: usize) -> f64 {
        self.k() as f64 / self.cumulative_length(m) as f64
    }
}

impl RateCompatibleScheme for PcpSpec {
    fn k(&self) -> usize {
        PcpSpec::k(self)
    }

    fn depth(&self) -> usize {
        PcpSpec::depth(self)
    }

    fn cumulative_length(&self, m: usize) -> usize {
        self.schedule().cumulative(m) as usize
    }

    fn encode(&self, u: &[u8]) -> Result<Vec<Vec<u8>>> {
        PcpSpec::encode(self, u)
    }

    fn decode(&self, chunks: &[Vec<f64>], rule: UpdateRule) -> Result<Vec<u8>> {
        Ok(PcpSpec::decode(self, chunks, rule)?.message)
    }

    fn rate(&self, m: usize) -> f64 {
        rate_to_f64(&self.schedule().rate(m))
    }
}

/// When the transmitter stops sending chunks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopRule {
    /// Stop after the first stage that decodes correctly.
    AckNack,
    /// Always send this many chunks (capped by the available stages).
    Fixed(usize),
}

impl fmt::Display for StopRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopRule::AckNack => f.write_str("ack-nack"),
            StopRule::Fixed(m) => write!(f, "fixed:{m}"),
        }
    }
}

impl FromStr for StopRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "ack-nack" || s == "acknack" => Ok(StopRule::AckNack),
            Some(("fixed", m)) => match m.parse() {
                Ok(m) if m >= 1 => Ok(StopRule::Fixed(m)),
                _ => Err(Error::OutOfRange(format!("bad stop rule `{s}`"))),
            },
            _ => Err(Error::OutOfRange(format!(
                "bad stop rule `{s}` (expected ack-nack or fixed:<m>)"
            ))),
        }
    }
}

/// Per-trial record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialResult {
    /// First stage (1-based) whose message estimate is correct.
    pub first_success: Option<usize>,
    /// `block_errors[m-1]`: the estimate after `m` chunks is wrong.
    pub block_errors: Vec<bool>,
    pub bit_errors: Vec<usize>,
}

impl TrialResult {
    /// Chunks sent under `rule` when at most `stages` are available.
    pub fn transmissions(&self, rule: StopRule, stages: usize) -> usize {
        match rule {
            StopRule::AckNack => self.first_success.unwrap_or(stages).min(stages),
            StopRule::Fixed(m) => m.min(stages),
        }
    }
}

/// Sends a uniform message, transmitting chunk `i` over `channels[i-1]`, and
/// decodes after each of the first `stages` chunks.
pub fn run_trial<S: RateCompatibleScheme + ?Sized, R: Rng + ?Sized>(
    scheme: &S,
    channels: &[ChannelModel],
    stages: usize,
    rule: UpdateRule,
    rng: &mut R,
) -> Result<TrialResult> {
    if stages == 0 || stages > scheme.depth() || channels.len() < stages {
        return Err(Error::OutOfRange(format!(
            "{stages} stages with {} channels on a {}-stage scheme",
            channels.len(),
            scheme.depth()
        )));
    }
    let u: Vec<u8> = (0..scheme.k()).map(|_| rng.gen_range(0..=1)).collect();
    let codewords = scheme.encode(&u)?;
    let received: Vec<Vec<f64>> = codewords[..stages]
        .iter()
        .zip(channels)
        .map(|(c, ch)| ch.transmit(c, rng))
        .collect();
    let mut result = TrialResult {
        first_success: None,
        block_errors: Vec::with_capacity(stages),
        bit_errors: Vec::with_capacity(stages),
    };
    for m in 1..=stages {
        let estimate = scheme.decode(&received[..m], rule)?;
        let errors = estimate.iter().zip(&u).filter(|(a, b)| a != b).count();
        if errors == 0 && result.first_success.is_none() {
            result.first_success = Some(m);
        }
        result.block_errors.push(errors > 0);
        result.bit_errors.push(errors);
    }
    Ok(result)
}

/// The swept quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Bec,
    Bsc,
    Biawgn,
    /// Eb/N0 in dB on BI-AWGN; each rate gets its own noise level.
    Ebn0,
}

/// A grid of parameter values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub kind: SweepKind,
    pub values: Vec<f64>,
}

impl SweepAxis {
    pub fn new(kind: SweepKind, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::OutOfRange("empty sweep grid".to_string()));
        }
        Ok(SweepAxis { kind, values })
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    /// `kind:start:stop:step` or `kind:v1,v2,...`, with kind one of
    /// `bec`, `bsc`, `biawgn`, `ebn0`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::OutOfRange(format!("bad sweep `{s}`: {why}"));
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("missing kind"))?;
        let kind = match kind.to_ascii_lowercase().as_str() {
            "bec" => SweepKind::Bec,
            "bsc" => SweepKind::Bsc,
            "biawgn" | "awgn" => SweepKind::Biawgn,
            "ebn0" => SweepKind::Ebn0,
            _ => return Err(bad("unknown kind")),
        };
        let number = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("not a number"));
        let parts: Vec<&str> = rest.split(':').collect();
        let values = match parts.as_slice() {
            [list] => list.split(',').map(number).collect::<Result<Vec<_>>>()?,
            [start, stop, step] => {
                let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
                if step.is_nan() || step <= 0.0 || stop < start {
                    return Err(bad("need step > 0 and stop >= start"));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
                (0..count).map(|t| start + t as f64 * step).collect()
            }
            _ => return Err(bad("expected start:stop:step or a list")),
        };
        SweepAxis::new(kind, values)
    }
}

/// Simulation settings shared by all points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub trials: u64,
    pub seed: u64,
    pub stop_rule: StopRule,
    pub rule: UpdateRule,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            trials: 1000,
            seed: 1,
            stop_rule: StopRule::AckNack,
            rule: UpdateRule::Exact,
            threads: None,
        }
    }
}

/// Aggregates for one rate at one grid point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateRow {
    pub rate_index: usize,
    pub k: usize,
    pub rate_bits: u64,
    pub trials: u64,
    pub block_errors: u64,
    pub bit_errors: u64,
    /// Total chunks sent under the stop rule.
    pub transmissions: u64,
    /// `stop_counts[i-1]`: trials that stopped after chunk `i`.
    pub stop_counts: Vec<u64>,
}

impl RateRow {
    pub fn rate(&self) -> f64 {
        f64::from_bits(self.rate_bits)
    }

    pub fn bler(&self) -> f64 {
        self.block_errors as f64 / self.trials as f64
    }

    pub fn ber(&self) -> f64 {
        self.bit_errors as f64 / (self.trials as f64 * self.k as f64)
    }

    pub fn mean_tx(&self) -> f64 {
        self.transmissions as f64 / self.trials as f64
    }

    /// Delivered information per coded bit at this rate.
    pub fn throughput(&self) -> f64 {
        self.rate() * (1.0 - self.bler())
    }

    /// Standard error of the block error rate.
    pub fn stderr(&self) -> f64 {
        let p = self.bler();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn stop_distribution(&self) -> Vec<f64> {
        self.stop_counts
            .iter()
            .map(|&c| c as f64 / self.trials as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub param: f64,
    pub rows: Vec<RateRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub kind: SweepKind,
    pub points: Vec<SweepPoint>,
}

#[derive(Debug, Clone, Default)]
struct Tally {
    block_errors: Vec<u64>,
    bit_errors: Vec<u64>,
    transmissions: u64,
    stop_counts: Vec<u64>,
}

impl Tally {
    fn zero(stages: usize) -> Self {
        Tally {
            block_errors: vec![0; stages],
            bit_errors: vec![0; stages],
            transmissions: 0,
            stop_counts: vec![0; stages],
        }
    }

    fn record(mut self, trial: &TrialResult, rule: StopRule, stages: usize) -> Self {
        for m in 0..stages {
            self.block_errors[m] += u64::from(trial.block_errors[m]);
            self.bit_errors[m] += trial.bit_errors[m] as u64;
        }
        let sent = trial.transmissions(rule, stages);
        self.transmissions += sent as u64;
        self.stop_counts[sent - 1] += 1;
        self
    }

    fn merge(mut self, other: Tally) -> Self {
        for (a, b) in self.block_errors.iter_mut().zip(other.block_errors) {
            *a += b;
        }
        for (a, b) in self.bit_errors.iter_mut().zip(other.bit_errors) {
            *a += b;
        }
        for (a, b) in self.stop_counts.iter_mut().zip(other.stop_counts) {
            *a += b;
        }
        self.transmissions += other.transmissions;
        self
    }
}

fn run_set<S: RateCompatibleScheme + ?Sized>(
    scheme: &S,
    channels: &[ChannelModel],
    stages: usize,
    config: &TrialConfig,
    point: u64,
    set: u64,
) -> Result<Tally> {
    (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(config.seed, point, set, t);
            let trial = run_trial(scheme, channels, stages, config.rule, &mut rng)?;
            Ok(Tally::zero(stages).record(&trial, config.stop_rule, stages))
        })
        .try_reduce(|| Tally::zero(stages), |a, b| Ok(a.merge(b)))
}

fn row(scheme: &(impl RateCompatibleScheme + ?Sized), tally: &Tally, m: usize, trials: u64) -> RateRow {
    RateRow {
        rate_index: m,
        k: scheme.k(),
        rate_bits: scheme.rate(m).to_bits(),
        trials,
        block_errors: tally.block_errors[m - 1],
        bit_errors: tally.bit_errors[m - 1],
        transmissions: tally.transmissions,
        stop_counts: tally.stop_counts.clone(),
    }
}

/// Simulates `scheme` at every grid point.
///
/// For channel-parameter axes one trial set per point sends every chunk over
/// the same channel and yields a row per rate. For Eb/N0 axes rate `m` gets
/// its own trial set at the noise level matching `R_m`, using chunks `1..=m`.
pub fn sweep<S: RateCompatibleScheme + ?Sized>(
    scheme: &S,
    axis: &SweepAxis,
    config: &TrialConfig,
) -> Result<SweepResult> {
    if config.trials == 0 {
        return Err(Error::OutOfRange("at least one trial is required".to_string()));
    }
    if axis.values.is_empty() {
        return Err(Error::OutOfRange("empty sweep grid".to_string()));
    }
    let body = || -> Result<SweepResult> {
        let depth = scheme.depth();
        let mut points = Vec::with_capacity(axis.values.len());
        for (p, &param) in axis.values.iter().enumerate() {
            let p = p as u64;
            let mut rows = Vec::with_capacity(depth);
            match axis.kind {
                SweepKind::Ebn0 => {
                    for m in 1..=depth {
                        let ch = ChannelModel::biawgn_from_ebn0_db(param, scheme.rate(m))?;
                        let channels = vec![ch; m];
                        let tally = run_set(scheme, &channels, m, config, p, m as u64)?;
                        rows.push(row(scheme, &tally, m, config.trials));
                    }
                }
                kind => {
                    let kind = match kind {
                        SweepKind::Bec => ChannelKind::Bec,
                        SweepKind::Bsc => ChannelKind::Bsc,
                        _ => ChannelKind::Biawgn,
                    };
                    let channels = vec![ChannelModel::new(kind, param)?; depth];
                    let tally = run_set(scheme, &channels, depth, config, p, 0)?;
                    rows.extend((1..=depth).map(|m| row(scheme, &tally, m, config.trials)));
                }
            }
            points.push(SweepPoint { param, rows });
        }
        Ok(SweepResult {
            kind: axis.kind,
            points,
        })
    };
    match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?
            .install(body),
        None => body(),
    }
}

/// Simulates with explicit per-transmission channels.
pub fn simulate_channels<S: RateCompatibleScheme + ?Sized>(
    scheme: &S,
    channels: &[ChannelModel],
    config: &TrialConfig,
) -> Result<Vec<RateRow>> {
    let stages = scheme.depth();
    if channels.len() < stages {
        return Err(Error::LengthMismatch {
            expected: stages,
            actual: channels.len(),
        });
    }
    if config.trials == 0 {
        return Err(Error::OutOfRange("at least one trial is required".to_string()));
    }
    let body = || -> Result<Vec<RateRow>> {
        let tally = run_set(scheme, channels, stages, config, 0, 0)?;
        Ok((1..=stages).map(|m| row(scheme, &tally, m, config.trials)).collect())
    };
    match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?
            .install(body),
        None => body(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pcp::{build_pcp, BuildRequest};
    use crate::DesignOptions;

    fn bec(e: f64) -> ChannelModel {
        ChannelModel::bec(e).unwrap()
    }

    fn small_spec() -> PcpSpec {
        build_pcp(&BuildRequest {
            k: 4,
            n1: Some(8),
            rates: None,
            lengths: None,
            channels: vec![bec(0.3), bec(0.6)],
            options: DesignOptions::default(),
        })
        .unwrap()
    }

    fn repetition(k: u64) -> PcpSpec {
        build_pcp(&BuildRequest {
            k,
            n1: None,
            rates: None,
            lengths: Some(vec![k]),
            channels: vec![bec(0.5)],
            options: DesignOptions::default(),
        })
        .unwrap()
    }

    #[test]
    fn seeds_differ() {
        assert_ne!(mix_seed(1, 0), mix_seed(1, 1));
        assert_ne!(mix_seed(0, 1), mix_seed(1, 0));
        assert_eq!(mix_seed(7, 3), mix_seed(7, 3));
    }

    #[test]
    fn noiseless_trial() {
        let spec = small_spec();
        let mut rng = trial_rng(1, 0, 0, 0);
        let t = run_trial(&spec, &[bec(0.0), bec(0.0)], 2, UpdateRule::Exact, &mut rng).unwrap();
        assert_eq!(t.first_success, Some(1));
        assert_eq!(t.bit_errors, vec![0, 0]);
        assert_eq!(t.transmissions(StopRule::AckNack, 2), 1);
        assert_eq!(t.transmissions(StopRule::Fixed(3), 2), 2);
    }

    #[test]
    fn erased_channel_guesses() {
        let spec = small_spec();
        let config = TrialConfig {
            trials: 2000,
            ..TrialConfig::default()
        };
        let rows = simulate_channels(&spec, &[bec(1.0), bec(1.0)], &config).unwrap();
        for r in &rows {
            // Ties decide 0, so half the bits of a uniform message are wrong.
            let sigma = (0.25f64 / (2000.0 * 4.0)).sqrt();
            assert!((r.ber() - 0.5).abs() < 3.0 * sigma * 2.0, "ber {}", r.ber());
            assert!(r.bler() > 0.85);
        }
        assert_eq!(rows[0].stop_counts.iter().sum::<u64>(), 2000);
    }

    #[test]
    fn single_bit_calibration() {
        let code = repetition(1);
        let p = 0.2;
        let config = TrialConfig {
            trials: 20_000,
            seed: 3,
            ..TrialConfig::default()
        };
        let axis = SweepAxis::new(SweepKind::Bsc, vec![p]).unwrap();
        let result = sweep(&code, &axis, &config).unwrap();
        let r = &result.points[0].rows[0];
        let sigma = (p * (1.0 - p) / 20_000.0).sqrt();
        assert!((r.bler() - p).abs() < 3.0 * sigma, "bler {}", r.bler());
        assert!((r.stderr() - sigma).abs() < 1e-3);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let spec = small_spec();
        let axis: SweepAxis = "bec:0.2:0.6:0.2".parse().unwrap();
        let mut config = TrialConfig {
            trials: 300,
            seed: 42,
            ..TrialConfig::default()
        };
        config.threads = Some(1);
        let a = sweep(&spec, &axis, &config).unwrap();
        config.threads = Some(4);
        let b = sweep(&spec, &axis, &config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points.len(), 3);
    }

    #[test]
    fn stop_distribution_sums_to_one() {
        let spec = small_spec();
        let axis = SweepAxis::new(SweepKind::Bec, vec![0.4]).unwrap();
        let r = sweep(&spec, &axis, &TrialConfig { trials: 500, ..TrialConfig::default() }).unwrap();
        for row in &r.points[0].rows {
            let total: f64 = row.stop_distribution().iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!((1.0..=2.0).contains(&row.mean_tx()));
        }
    }

    #[test]
    fn ebn0_axis_uses_rate_specific_noise() {
        let spec = small_spec();
        let axis: SweepAxis = "ebn0:20".parse().unwrap();
        let r = sweep(&spec, &axis, &TrialConfig { trials: 50, ..TrialConfig::default() }).unwrap();
        assert_eq!(r.points[0].rows.len(), 2);
        assert!(r.points[0].rows.iter().all(|row| row.block_errors == 0));
    }

    #[test]
    fn axis_parsing() {
        let a: SweepAxis = "bec:0.1:0.9:0.1".parse().unwrap();
        assert_eq!(a.values.len(), 9);
        assert!((a.values[8] - 0.9).abs() < 1e-12);
        let b: SweepAxis = "ebn0:1,2.5".parse().unwrap();
        assert_eq!((b.kind, b.values), (SweepKind::Ebn0, vec![1.0, 2.5]));
        assert!("foo:1".parse::<SweepAxis>().is_err());
        assert!("bec:0.5:0.1:0.1".parse::<SweepAxis>().is_err());
        assert!("bec".parse::<SweepAxis>().is_err());
        assert_eq!("fixed:2".parse::<StopRule>().unwrap(), StopRule::Fixed(2));
        assert!("fixed:0".parse::<StopRule>().is_err());
    }

    #[test]
    fn zero_trials_rejected() {
        let spec = small_spec();
        let axis = SweepAxis::new(SweepKind::Bec, vec![0.4]).unwrap();
        let config = TrialConfig { trials: 0, ..TrialConfig::default() };
        assert!(sweep(&spec, &axis, &config).is_err());
    }
}
