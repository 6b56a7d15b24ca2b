//! Binary-input memoryless channels.
//!
//! BPSK for the AWGN channel maps bit 0 to +1 and bit 1 to -1, so a positive
//! log-likelihood ratio always favours bit 0.

use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;
use std::sync::OnceLock;

use gauss_quad::hermite::GaussHermite;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Magnitude used in place of an infinite LLR (a received BEC bit, a
/// noiseless BSC). Keeps the decoder arithmetic finite.
pub const LLR_LIMIT: f64 = 1.0e3;

const HERMITE_NODES: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Bec,
    Bsc,
    Biawgn,
}

impl ChannelKind {
    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Bec => "bec",
            ChannelKind::Bsc => "bsc",
            ChannelKind::Biawgn => "biawgn",
        }
    }
}

/// A received channel output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelSymbol {
    Bit(u8),
    Erasure,
    Real(f64),
}

impl fmt::Display for ChannelSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelSymbol::Bit(b) => write!(f, "{b}"),
            ChannelSymbol::Erasure => f.write_str("?"),
            ChannelSymbol::Real(y) => write!(f, "{y}"),
        }
    }
}

/// A binary-input channel from one of the supported families.
///
/// `param` is the erasure probability for BEC, the crossover probability for
/// BSC and the noise standard deviation for BI-AWGN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    kind: ChannelKind,
    param: f64,
}

impl ChannelModel {
    pub fn new(kind: ChannelKind, param: f64) -> Result<Self> {
        let ok = match kind {
            ChannelKind::Bec => (0.0..=1.0).contains(&param),
            ChannelKind::Bsc => (0.0..=0.5).contains(&param),
            ChannelKind::Biawgn => param > 0.0 && param.is_finite(),
        };
        if !ok {
            return Err(Error::ChannelParameter(format!(
                "{} parameter {param} out of range",
                kind.name()
            )));
        }
        Ok(ChannelModel { kind, param })
    }

    pub fn bec(erasure: f64) -> Result<Self> {
        Self::new(ChannelKind::Bec, erasure)
    }

    pub fn bsc(crossover: f64) -> Result<Self> {
        Self::new(ChannelKind::Bsc, crossover)
    }

    pub fn biawgn(sigma: f64) -> Result<Self> {
        Self::new(ChannelKind::Biawgn, sigma)
    }

    /// BI-AWGN channel at a given Eb/N0 (dB) for a code of rate `rate`,
    /// using `Eb/N0 = 1 / (2 R sigma^2)`.
    pub fn biawgn_from_ebn0_db(ebn0_db: f64, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::ChannelParameter(format!("rate {rate} not in (0, 1]")));
        }
        let ebn0 = 10f64.powf(ebn0_db / 10.0);
        Self::biawgn((1.0 / (2.0 * rate * ebn0)).sqrt())
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn param(&self) -> f64 {
        self.param
    }

    /// Draws one channel output for input `bit`.
    pub fn sample_output<R: Rng + ?Sized>(&self, bit: u8, rng: &mut R) -> ChannelSymbol {
        let bit = bit & 1;
        match self.kind {
            ChannelKind::Bec => {
                if rng.gen::<f64>() < self.param {
                    ChannelSymbol::Erasure
                } else {
                    ChannelSymbol::Bit(bit)
                }
            }
            ChannelKind::Bsc => {
                let flip = rng.gen::<f64>() < self.param;
                ChannelSymbol::Bit(bit ^ u8::from(flip))
            }
            ChannelKind::Biawgn => {
                let x = 1.0 - 2.0 * f64::from(bit);
                let z: f64 = rng.sample(StandardNormal);
                ChannelSymbol::Real(x + self.param * z)
            }
        }
    }

    /// `ln(W(y|0) / W(y|1))`, clamped to `±LLR_LIMIT`.
    pub fn llr(&self, y: ChannelSymbol) -> Result<f64> {
        let value = match (self.kind, y) {
            (ChannelKind::Bec, ChannelSymbol::Erasure) => 0.0,
            (ChannelKind::Bec, ChannelSymbol::Bit(b)) if b <= 1 => bit_llr(b, LLR_LIMIT),
            (ChannelKind::Bsc, ChannelSymbol::Bit(b)) if b <= 1 => {
                let p = self.param;
                let magnitude = if p == 0.0 {
                    LLR_LIMIT
                } else {
                    ((1.0 - p) / p).ln()
                };
                bit_llr(b, magnitude)
            }
            (ChannelKind::Biawgn, ChannelSymbol::Real(v)) if v.is_finite() => {
                2.0 * v / (self.param * self.param)
            }
            _ => {
                return Err(Error::InvalidSymbol {
                    channel: self.to_string(),
                    symbol: y.to_string(),
                })
            }
        };
        Ok(value.clamp(-LLR_LIMIT, LLR_LIMIT))
    }

    /// Sends `bits` through the channel and returns the output LLRs.
    pub fn transmit<R: Rng + ?Sized>(&self, bits: &[u8], rng: &mut R) -> Vec<f64> {
        bits.iter()
            .map(|&b| {
                self.llr(self.sample_output(b, rng))
                    .expect("sampled symbols belong to the channel alphabet")
            })
            .collect()
    }

    /// Symmetric capacity in bits per channel use.
    pub fn capacity(&self) -> f64 {
        match self.kind {
            ChannelKind::Bec => 1.0 - self.param,
            ChannelKind::Bsc => 1.0 - binary_entropy(self.param),
            ChannelKind::Biawgn => biawgn_capacity(self.param),
        }
    }

    /// Output alphabet and transition probabilities for finite-alphabet
    /// channels, as `(symbol, W(y|0), W(y|1))`.
    pub fn finite_law(&self) -> Option<Vec<(ChannelSymbol, f64, f64)>> {
        let p = self.param;
        match self.kind {
            ChannelKind::Bec => Some(vec![
                (ChannelSymbol::Bit(0), 1.0 - p, 0.0),
                (ChannelSymbol::Bit(1), 0.0, 1.0 - p),
                (ChannelSymbol::Erasure, p, p),
            ]),
            ChannelKind::Bsc => Some(vec![
                (ChannelSymbol::Bit(0), 1.0 - p, p),
                (ChannelSymbol::Bit(1), p, 1.0 - p),
            ]),
            ChannelKind::Biawgn => None,
        }
    }
}

fn bit_llr(bit: u8, magnitude: f64) -> f64 {
    if bit == 0 {
        magnitude
    } else {
        -magnitude
    }
}

impl fmt::Display for ChannelModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.name(), self.param)
    }
}

impl FromStr for ChannelModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ChannelSpec(s.to_string());
        let (kind, value) = s.trim().split_once(':').ok_or_else(bad)?;
        let kind = match kind.to_ascii_lowercase().as_str() {
            "bec" => ChannelKind::Bec,
            "bsc" => ChannelKind::Bsc,
            "biawgn" | "awgn" => ChannelKind::Biawgn,
            _ => return Err(bad()),
        };
        let param: f64 = value.trim().parse().map_err(|_| bad())?;
        ChannelModel::new(kind, param)
    }
}

impl Serialize for ChannelModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ChannelModel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Checks that `channels` is ordered from best to worst.
///
/// Only same-family sequences are comparable; the ordering is read off the
/// channel parameter.
pub fn assert_degraded_sequence(channels: &[ChannelModel]) -> Result<bool> {
    let Some(first) = channels.first() else {
        return Ok(true);
    };
    if channels.iter().any(|c| c.kind != first.kind) {
        return Err(Error::MixedChannelKinds);
    }
    Ok(channels.windows(2).all(|w| w[0].param <= w[1].param))
}

pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

fn hermite() -> &'static GaussHermite {
    static RULE: OnceLock<GaussHermite> = OnceLock::new();
    RULE.get_or_init(|| GaussHermite::new(NonZeroUsize::new(HERMITE_NODES).unwrap()))
}

/// `1 - E[log2(1 + exp(-L))]` with `L = 2y/sigma^2` and `y ~ N(1, sigma^2)`.
fn biawgn_capacity(sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    let expectation = hermite().integrate(|t| {
        let y = 1.0 + sigma * std::f64::consts::SQRT_2 * t;
        softplus(-2.0 * y / s2)
    }) / std::f64::consts::PI.sqrt();
    (1.0 - expectation / std::f64::consts::LN_2).clamp(0.0, 1.0)
}

/// `ln(1 + e^x)` without overflow.
pub(crate) fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}
