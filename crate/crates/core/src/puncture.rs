//! Puncturing patterns and punctured polar codes.
//!
//! A pattern over a mother length `n_u` marks each coded bit as transmitted
//! (`true`) or punctured (`false`). The receiver knows the pattern and treats
//! punctured positions as erasures.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits;
use crate::channel::ChannelModel;
use crate::polar::{
    design_profile, polar_transform_in_place, select_information_set, InformationSet,
    ReliabilityProfile, UpdateRule,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PatternDocument", into = "PatternDocument")]
pub struct PuncturePattern {
    bits: Vec<bool>,
    n: usize,
}

/// JSON form: mother length plus an MSB-first hex bitmask.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PatternDocument {
    n_u: usize,
    mask: String,
}

impl TryFrom<PatternDocument> for PuncturePattern {
    type Error = Error;
    fn try_from(doc: PatternDocument) -> Result<Self> {
        let bits = bits::from_hex(&doc.mask, doc.n_u)?;
        PuncturePattern::new(bits.into_iter().map(|b| b == 1).collect())
    }
}

impl From<PuncturePattern> for PatternDocument {
    fn from(p: PuncturePattern) -> Self {
        let raw: Vec<u8> = p.bits.iter().map(|&b| u8::from(b)).collect();
        PatternDocument {
            n_u: p.n_u(),
            mask: bits::to_hex(&raw),
        }
    }
}

impl PuncturePattern {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if !bits.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(bits.len()));
        }
        let n = bits.iter().filter(|&&b| b).count();
        if n == 0 {
            return Err(Error::OutOfRange(
                "a pattern must transmit at least one bit".to_string(),
            ));
        }
        Ok(PuncturePattern { bits, n })
    }

    pub fn unpunctured(n_u: usize) -> Result<Self> {
        Self::new(vec![true; n_u])
    }

    pub fn n_u(&self) -> usize {
        self.bits.len()
    }

    /// Number of transmitted positions.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Fraction of mother-code bits not transmitted.
    pub fn fraction(&self) -> f64 {
        (self.n_u() - self.n) as f64 / self.n_u() as f64
    }

    pub fn is_unpunctured(&self) -> bool {
        self.n == self.n_u()
    }

    /// 1-based punctured positions.
    pub fn punctured_positions(&self) -> Vec<usize> {
        (1..=self.n_u()).filter(|&p| !self.bits[p - 1]).collect()
    }
}

/// Punctures `n_u - n` evenly spaced positions `floor((t-1) n_u / s) + 1`.
pub fn make_uniform_pattern(n_u: usize, n: usize) -> Result<PuncturePattern> {
    if !n_u.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n_u));
    }
    if n == 0 || n > n_u {
        return Err(Error::OutOfRange(format!(
            "post-puncturing length {n} not in [1, {n_u}]"
        )));
    }
    let s = n_u - n;
    let mut bits = vec![true; n_u];
    for t in 0..s {
        bits[t * n_u / s] = false;
    }
    PuncturePattern::new(bits)
}

/// Punctures `n_u - n` positions drawn uniformly without replacement.
pub fn make_random_pattern<R: Rng + ?Sized>(
    n_u: usize,
    n: usize,
    rng: &mut R,
) -> Result<PuncturePattern> {
    if !n_u.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n_u));
    }
    if n == 0 || n > n_u {
        return Err(Error::OutOfRange(format!(
            "post-puncturing length {n} not in [1, {n_u}]"
        )));
    }
    let mut positions: Vec<usize> = (0..n_u).collect();
    positions.shuffle(rng);
    let mut bits = vec![true; n_u];
    for &p in &positions[..n_u - n] {
        bits[p] = false;
    }
    PuncturePattern::new(bits)
}

/// Keeps the transmitted coordinates of `x`, in order.
pub fn puncture<T: Copy>(x: &[T], pattern: &PuncturePattern) -> Result<Vec<T>> {
    if x.len() != pattern.n_u() {
        return Err(Error::LengthMismatch {
            expected: pattern.n_u(),
            actual: x.len(),
        });
    }
    Ok(x.iter()
        .zip(pattern.bits())
        .filter(|(_, &keep)| keep)
        .map(|(&v, _)| v)
        .collect())
}

/// Places received LLRs at transmitted positions and zeros elsewhere.
pub fn expand_llrs(llrs: &[f64], pattern: &PuncturePattern) -> Result<Vec<f64>> {
    if llrs.len() != pattern.n() {
        return Err(Error::LengthMismatch {
            expected: pattern.n(),
            actual: llrs.len(),
        });
    }
    let mut received = llrs.iter();
    Ok(pattern
        .bits()
        .iter()
        .map(|&sent| if sent { *received.next().unwrap() } else { 0.0 })
        .collect())
}

/// Knobs shared by every code-design routine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignOptions {
    /// Trials for Monte Carlo reliability estimation (BSC designs).
    pub mc_trials: usize,
    pub seed: u64,
    pub rule: UpdateRule,
}

impl Default for DesignOptions {
    fn default() -> Self {
        DesignOptions {
            mc_trials: 2000,
            seed: 0x5eed,
            rule: UpdateRule::Exact,
        }
    }
}

/// A punctured polar code with all frozen bits equal to zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PuncturedPolarCode {
    pattern: PuncturePattern,
    info: InformationSet,
}

impl PuncturedPolarCode {
    pub fn new(pattern: PuncturePattern, info: InformationSet) -> Result<Self> {
        if info.n_u() != pattern.n_u() {
            return Err(Error::LengthMismatch {
                expected: pattern.n_u(),
                actual: info.n_u(),
            });
        }
        if info.len() > pattern.n() {
            return Err(Error::OutOfRange(format!(
                "{} information bits on {} transmitted positions",
                info.len(),
                pattern.n()
            )));
        }
        Ok(PuncturedPolarCode { pattern, info })
    }

    pub fn pattern(&self) -> &PuncturePattern {
        &self.pattern
    }

    pub fn info(&self) -> &InformationSet {
        &self.info
    }

    pub fn n(&self) -> usize {
        self.pattern.n()
    }

    pub fn k(&self) -> usize {
        self.info.len()
    }

    /// Encodes `message` (one bit per information position, ascending) and
    /// returns the transmitted bits.
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                actual: message.len(),
            });
        }
        let mut u = vec![0u8; self.pattern.n_u()];
        for (&p, &b) in self.info.indices().iter().zip(message) {
            u[p - 1] = b & 1;
        }
        polar_transform_in_place(&mut u)?;
        puncture(&u, &self.pattern)
    }
}

/// Designs a length-`n` punctured code with `k` information bits.
///
/// The mother length is the smallest power of two not below `n`, the pattern
/// is evenly spaced, and the bit-channels are ranked with punctured
/// positions modelled as erased.
pub fn design_punctured_code(
    channel: &ChannelModel,
    n: usize,
    k: usize,
    options: &DesignOptions,
) -> Result<(PuncturedPolarCode, ReliabilityProfile)> {
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!("k = {k} not in [1, {n}]")));
    }
    let n_u = n.next_power_of_two();
    let pattern = make_uniform_pattern(n_u, n)?;
    let profile = design_profile(channel, n_u, Some(&pattern), options, n as u64)?;
    let info = select_information_set(&profile, k)?;
    Ok((PuncturedPolarCode::new(pattern, info)?, profile))
}
