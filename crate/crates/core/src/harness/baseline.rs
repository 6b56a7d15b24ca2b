//! A single mother polar code made rate-compatible by random puncturing.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::RateCompatibleScheme;
use crate::polar::{
    design_profile, polar_transform_in_place, select_information_set, ScDecoder,
};
use crate::{
    ChannelModel, DesignOptions, Error, InformationSet, PuncturePattern, Result, UpdateRule,
};

/// Mother code of length `n_u` whose transmissions follow one random
/// permutation of the codeword positions; after `m` transmissions the first
/// `lengths[m-1]` positions of that permutation have been sent.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomPuncturingBaseline {
    info: InformationSet,
    order: Vec<usize>,
    lengths: Vec<usize>,
}

impl RandomPuncturingBaseline {
    /// `lengths` are cumulative transmitted lengths, strictly increasing and
    /// at most `n_u`. The information set is designed for the full mother
    /// code on `channel`; the permutation is drawn from `seed`.
    pub fn new(
        n_u: usize,
        k: usize,
        lengths: Vec<usize>,
        channel: &ChannelModel,
        options: &DesignOptions,
        seed: u64,
    ) -> Result<Self> {
        if !n_u.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n_u));
        }
        if lengths.is_empty() || lengths.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Schedule(
                "baseline lengths must strictly increase".to_string(),
            ));
        }
        if lengths[lengths.len() - 1] > n_u {
            return Err(Error::OutOfRange(format!(
                "length {} exceeds the mother length {n_u}",
                lengths[lengths.len() - 1]
            )));
        }
        if k == 0 || k > lengths[0] {
            return Err(Error::OutOfRange(format!(
                "k = {k} exceeds the shortest length {}",
                lengths[0]
            )));
        }
        let profile = design_profile(channel, n_u, None, options, n_u as u64)?;
        let info = select_information_set(&profile, k)?;
        let mut order: Vec<usize> = (0..n_u).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Ok(RandomPuncturingBaseline {
            info,
            order,
            lengths,
        })
    }

    /// Cumulative lengths `min(n_u, round(k / R))` for each rate.
    pub fn lengths_for_rates(n_u: usize, k: usize, rates: &[f64]) -> Vec<usize> {
        rates
            .iter()
            .map(|r| ((k as f64 / r).round() as usize).min(n_u))
            .collect()
    }

    pub fn n_u(&self) -> usize {
        self.order.len()
    }

    pub fn info(&self) -> &InformationSet {
        &self.info
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// Positions sent after `m` transmissions.
    pub fn pattern(&self, m: usize) -> Result<PuncturePattern> {
        let sent = *self.lengths.get(m.wrapping_sub(1)).ok_or_else(|| {
            Error::OutOfRange(format!("transmission {m} of {}", self.lengths.len()))
        })?;
        let mut bits = vec![false; self.n_u()];
        for &t in &self.order[..sent] {
            bits[t] = true;
        }
        PuncturePattern::new(bits)
    }

    fn span(&self, m: usize) -> &[usize] {
        let start = if m == 1 { 0 } else { self.lengths[m - 2] };
        &self.order[start..self.lengths[m - 1]]
    }
}

impl RateCompatibleScheme for RandomPuncturingBaseline {
    fn k(&self) -> usize {
        self.info.len()
    }

    fn depth(&self) -> usize {
        self.lengths.len()
    }

    fn cumulative_length(&self, m: usize) -> usize {
        self.lengths[m - 1]
    }

    fn encode(&self, u: &[u8]) -> Result<Vec<Vec<u8>>> {
        if u.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                actual: u.len(),
            });
        }
        let mut x = vec![0u8; self.n_u()];
        for (&p, &b) in self.info.indices().iter().zip(u) {
            x[p - 1] = b & 1;
        }
        polar_transform_in_place(&mut x)?;
        Ok((1..=self.depth())
            .map(|m| self.span(m).iter().map(|&t| x[t]).collect())
            .collect())
    }

    fn decode(&self, chunks: &[Vec<f64>], rule: UpdateRule) -> Result<Vec<u8>> {
        if chunks.is_empty() || chunks.len() > self.depth() {
            return Err(Error::OutOfRange(format!(
                "{} transmissions of {}",
                chunks.len(),
                self.depth()
            )));
        }
        let mut llrs = vec![0.0; self.n_u()];
        for (m, chunk) in (1..).zip(chunks) {
            let span = self.span(m);
            if chunk.len() != span.len() {
                return Err(Error::LengthMismatch {
                    expected: span.len(),
                    actual: chunk.len(),
                });
            }
            for (&t, &l) in span.iter().zip(chunk) {
                llrs[t] = l;
            }
        }
        let mut roles = vec![Some(0u8); self.n_u()];
        for &p in self.info.indices() {
            roles[p - 1] = None;
        }
        let out = ScDecoder::new(self.n_u(), rule)?.decode(&llrs, &roles);
        Ok(out.info_bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::LLR_LIMIT;
    use crate::puncture::PuncturedPolarCode;
    use rand::Rng;

    fn baseline(lengths: Vec<usize>) -> RandomPuncturingBaseline {
        RandomPuncturingBaseline::new(
            512,
            171,
            lengths,
            &ChannelModel::biawgn(0.8).unwrap(),
            &DesignOptions::default(),
            9,
        )
        .unwrap()
    }

    #[test]
    fn paper_lengths_and_rates() {
        let lengths = RandomPuncturingBaseline::lengths_for_rates(512, 171, &[0.75, 0.5, 1.0 / 3.0]);
        assert_eq!(lengths, vec![228, 342, 512]);
        let b = baseline(lengths);
        assert!((b.rate(1) - 0.75).abs() < 1e-12);
        assert!((b.rate(2) - 0.5).abs() < 1e-12);
        assert!((b.rate(3) - 171.0 / 512.0).abs() < 1e-12);
    }

    #[test]
    fn patterns_are_nested() {
        let b = baseline(vec![228, 342, 512]);
        let p1 = b.pattern(1).unwrap().punctured_positions();
        let p2 = b.pattern(2).unwrap().punctured_positions();
        assert_eq!((p1.len(), p2.len()), (284, 170));
        assert!(p2.iter().all(|p| p1.contains(p)));
        assert!(b.pattern(3).unwrap().is_unpunctured());
        assert!(b.pattern(4).is_err());
    }

    #[test]
    fn unpunctured_matches_mother_code() {
        let b = baseline(vec![512]);
        let mother = PuncturedPolarCode::new(PuncturePattern::unpunctured(512).unwrap(), b.info().clone())
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u: Vec<u8> = (0..171).map(|_| rng.gen_range(0..2)).collect();
        let x = mother.encode(&u).unwrap();
        let chunk = &b.encode(&u).unwrap()[0];
        let reordered: Vec<u8> = b.order.iter().map(|&t| x[t]).collect();
        assert_eq!(chunk, &reordered);
    }

    #[test]
    fn noiseless_roundtrip() {
        let b = baseline(vec![228, 342, 512]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u: Vec<u8> = (0..171).map(|_| rng.gen_range(0..2)).collect();
        let chunks: Vec<Vec<f64>> = b
            .encode(&u)
            .unwrap()
            .iter()
            .map(|c| c.iter().map(|&x| if x == 0 { LLR_LIMIT } else { -LLR_LIMIT }).collect())
            .collect();
        assert_eq!(b.decode(&chunks, UpdateRule::Exact).unwrap(), u);
    }

    #[test]
    fn construction_errors() {
        let ch = ChannelModel::biawgn(0.8).unwrap();
        let o = DesignOptions::default();
        assert!(RandomPuncturingBaseline::new(512, 171, vec![170, 342], &ch, &o, 0).is_err());
        assert!(RandomPuncturingBaseline::new(512, 171, vec![342, 228], &ch, &o, 0).is_err());
        assert!(RandomPuncturingBaseline::new(512, 171, vec![228, 600], &ch, &o, 0).is_err());
        assert!(RandomPuncturingBaseline::new(500, 171, vec![228], &ch, &o, 0).is_err());
    }
}
