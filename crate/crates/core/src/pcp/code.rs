//! Construction, encoding and sequential decoding of PCP codes.

use super::mapping::{build_bit_mappings, check_partition, BitMapping};
use super::schedule::{
    apportion_sizes, derive_lengths, dyadic_schedule_for_capacities, RateSchedule, Rational,
    SizeTable,
};
use crate::channel::assert_degraded_sequence;
use crate::gf2::BitMatrix;
use crate::polar::{
    design_profile, nested_information_sets, polar_row, polar_transform_in_place, NestedSetFamily,
    ReliabilityProfile, ScDecoder, UpdateRule,
};
use crate::puncture::{expand_llrs, make_uniform_pattern, puncture, PuncturePattern};
use crate::{ChannelModel, DesignOptions, Error, PuncturedPolarCode, Result};

/// Generator matrices beyond this many entries are refused.
pub const MAX_GENERATOR_ENTRIES: usize = 1 << 28;

/// What to build: `k` plus either explicit lengths, rates with `n_1`, or
/// only `n_1` (later lengths are then derived from the design channels).
#[derive(Debug, Clone, PartialEq)]
pub struct BuildRequest {
    pub k: u64,
    pub n1: Option<u64>,
    pub rates: Option<Vec<Rational>>,
    pub lengths: Option<Vec<u64>>,
    /// Design channel per rate, best first. A single channel is reused for
    /// every rate.
    pub channels: Vec<ChannelModel>,
    pub options: DesignOptions,
}

impl BuildRequest {
    /// The three-level example with `k = 192` and lengths 256, 128 and 195.
    pub fn three_level(channel: ChannelModel) -> Self {
        BuildRequest {
            k: 192,
            n1: None,
            rates: None,
            lengths: Some(vec![256, 128, 195]),
            channels: vec![channel],
            options: DesignOptions::default(),
        }
    }

    pub fn schedule(&self) -> Result<RateSchedule> {
        let schedule = match (&self.lengths, &self.rates) {
            (Some(lengths), rates) => {
                let s = RateSchedule::from_lengths(self.k, lengths.clone())?;
                if let Some(rates) = rates {
                    if rates.as_slice() != s.rates() {
                        return Err(Error::Schedule(
                            "rates disagree with the given lengths".to_string(),
                        ));
                    }
                }
                s
            }
            (None, Some(rates)) => {
                let n1 = self.n1.ok_or_else(|| {
                    Error::Schedule("n_1 is required when rates are given".to_string())
                })?;
                derive_lengths(self.k, rates, n1)?
            }
            (None, None) => {
                let n1 = self.n1.ok_or_else(|| {
                    Error::Schedule("give lengths, or n_1 with rates or channels".to_string())
                })?;
                if !n1.is_power_of_two() {
                    return Err(Error::Schedule(format!(
                        "n_1 = {n1} must be a power of two to derive dyadic lengths"
                    )));
                }
                let capacities: Vec<f64> = self.channels.iter().map(|c| c.capacity()).collect();
                dyadic_schedule_for_capacities(self.k, n1, &capacities)?
            }
        };
        schedule.check_exact()?;
        Ok(schedule)
    }
}

/// One level: a punctured polar code with a chain of nested information
/// sets, one per rate `R_i, ..., R_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct PcpLevel {
    level: usize,
    pattern: PuncturePattern,
    sets: NestedSetFamily,
    mapping: BitMapping,
    /// Positions of `u` (1-based) in stacked order: the smallest set first,
    /// then each successive difference, each block ascending.
    row_order: Vec<usize>,
}

impl PcpLevel {
    pub fn new(
        level: usize,
        pattern: PuncturePattern,
        sets: NestedSetFamily,
        mapping: BitMapping,
    ) -> Result<Self> {
        if sets.n_u() != pattern.n_u() {
            return Err(Error::LengthMismatch {
                expected: pattern.n_u(),
                actual: sets.n_u(),
            });
        }
        let largest = sets.sets()[0].len();
        if mapping.len() != largest {
            return Err(Error::LengthMismatch {
                expected: largest,
                actual: mapping.len(),
            });
        }
        if largest > pattern.n() {
            return Err(Error::condition(
                "(c.3)",
                format!(
                    "level {level} has {largest} information bits on {} coded bits",
                    pattern.n()
                ),
            ));
        }
        let row_order = stacked_order(&sets);
        Ok(PcpLevel {
            level,
            pattern,
            sets,
            mapping,
            row_order,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn n(&self) -> usize {
        self.pattern.n()
    }

    pub fn n_u(&self) -> usize {
        self.pattern.n_u()
    }

    pub fn pattern(&self) -> &PuncturePattern {
        &self.pattern
    }

    pub fn sets(&self) -> &NestedSetFamily {
        &self.sets
    }

    pub fn mapping(&self) -> &BitMapping {
        &self.mapping
    }

    pub fn row_order(&self) -> &[usize] {
        &self.row_order
    }

    /// The stand-alone punctured code at this level's own rate.
    pub fn code(&self) -> Result<PuncturedPolarCode> {
        PuncturedPolarCode::new(self.pattern.clone(), self.sets.sets()[0].clone())
    }

    fn transform_input(&self, message: &[u8]) -> Vec<u8> {
        let mut u = vec![0u8; self.n_u()];
        for (local, &position) in self.row_order.iter().enumerate() {
            u[position - 1] = message[self.mapping.global(local + 1) - 1] & 1;
        }
        u
    }
}

fn stacked_order(sets: &NestedSetFamily) -> Vec<usize> {
    let sets = sets.sets();
    let mut order: Vec<usize> = sets.last().map(|s| s.indices().to_vec()).unwrap_or_default();
    for pair in sets.windows(2).rev() {
        order.extend(pair[0].difference(&pair[1]));
    }
    order
}

/// A complete K-level code.
#[derive(Debug, Clone, PartialEq)]
pub struct PcpSpec {
    schedule: RateSchedule,
    sizes: SizeTable,
    channels: Vec<ChannelModel>,
    options: DesignOptions,
    levels: Vec<PcpLevel>,
}

/// Designs a code for `request`.
pub fn build_pcp(request: &BuildRequest) -> Result<PcpSpec> {
    let schedule = request.schedule()?;
    let levels = schedule.levels();
    let channels = match request.channels.len() {
        0 => return Err(Error::Schedule("at least one design channel is needed".to_string())),
        1 => vec![request.channels[0]; levels],
        n if n == levels => request.channels.clone(),
        n => {
            return Err(Error::Schedule(format!(
                "{n} design channels for {levels} rates"
            )))
        }
    };
    if !assert_degraded_sequence(&channels)? {
        return Err(Error::Schedule(
            "design channels must be ordered from best to worst".to_string(),
        ));
    }
    let sizes = apportion_sizes(&schedule)?;
    let k = schedule.k() as usize;
    let maps = build_bit_mappings(&sizes, k)?;

    let mut built = Vec::with_capacity(levels);
    for (i, mapping) in (1..=levels).zip(maps) {
        let n = schedule.length(i) as usize;
        let n_u = n.next_power_of_two();
        let pattern = make_uniform_pattern(n_u, n)?;
        let mut profiles: Vec<ReliabilityProfile> = Vec::with_capacity(levels - i + 1);
        for j in i..=levels {
            if j > i && channels[j - 1] == channels[j - 2] {
                let previous = profiles[profiles.len() - 1].clone();
                profiles.push(previous);
                continue;
            }
            let salt = ((i as u64) << 32) | j as u64;
            profiles.push(design_profile(
                &channels[j - 1],
                n_u,
                Some(&pattern),
                &request.options,
                salt,
            )?);
        }
        let targets: Vec<usize> = sizes.level_row(i).iter().map(|&a| a as usize).collect();
        let sets = nested_information_sets(&profiles, &targets)?;
        built.push(PcpLevel::new(i, pattern, sets, mapping)?);
    }
    let spec = PcpSpec {
        schedule,
        sizes,
        channels,
        options: request.options,
        levels: built,
    };
    spec.validate()?;
    Ok(spec)
}

impl PcpSpec {
    /// Assembles a code from explicit parts and validates it.
    pub fn from_parts(
        schedule: RateSchedule,
        channels: Vec<ChannelModel>,
        options: DesignOptions,
        levels: Vec<PcpLevel>,
    ) -> Result<Self> {
        let rows = levels
            .iter()
            .map(|l| l.sets().sizes().into_iter().map(|a| a as u64).collect())
            .collect();
        let sizes = SizeTable::from_rows(rows)?;
        let spec = PcpSpec {
            schedule,
            sizes,
            channels,
            options,
            levels,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn k(&self) -> usize {
        self.schedule.k() as usize
    }

    /// Number of levels K.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn schedule(&self) -> &RateSchedule {
        &self.schedule
    }

    pub fn sizes(&self) -> &SizeTable {
        &self.sizes
    }

    pub fn design_channels(&self) -> &[ChannelModel] {
        &self.channels
    }

    pub fn options(&self) -> &DesignOptions {
        &self.options
    }

    pub fn levels(&self) -> &[PcpLevel] {
        &self.levels
    }

    /// Level `i`, 1-based.
    pub fn level(&self, i: usize) -> Result<&PcpLevel> {
        if i == 0 || i > self.depth() {
            return Err(Error::OutOfRange(format!(
                "level {i} not in [1, {}]",
                self.depth()
            )));
        }
        Ok(&self.levels[i - 1])
    }

    /// Re-checks every structural condition.
    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        self.schedule.check_exact()?;
        if self.levels.len() != self.schedule.levels() || self.channels.len() != self.depth() {
            return Err(Error::LengthMismatch {
                expected: self.schedule.levels(),
                actual: self.levels.len(),
            });
        }
        if !assert_degraded_sequence(&self.channels)? {
            return Err(Error::Schedule(
                "design channels must be ordered from best to worst".to_string(),
            ));
        }
        for (i, level) in self.levels.iter().enumerate() {
            let i = i + 1;
            if level.level() != i || level.n() as u64 != self.schedule.length(i) {
                return Err(Error::condition(
                    "(c.1)",
                    format!("level {i} transmits {} bits", level.n()),
                ));
            }
            let sets = level.sets().sets();
            if sets.len() != self.depth() - i + 1 || sets.windows(2).any(|w| !w[1].is_subset(&w[0]))
            {
                return Err(Error::condition(
                    "(c.2)",
                    format!("level {i} sets are not a nested chain"),
                ));
            }
        }
        let expected = apportion_sizes(&self.schedule)?;
        if expected != self.sizes {
            return Err(Error::condition(
                "(c.3)",
                format!(
                    "sizes {:?} differ from the apportioned {:?}",
                    self.sizes.rows(),
                    expected.rows()
                ),
            ));
        }
        self.sizes.check_identities(k as u64)?;
        let maps = build_bit_mappings(&self.sizes, k)?;
        for (level, map) in self.levels.iter().zip(&maps) {
            if level.mapping() != map {
                return Err(Error::condition(
                    "mapping partition",
                    format!("level {} mapping is not the canonical one", level.level()),
                ));
            }
        }
        check_partition(&maps, &self.sizes, k)
    }

    /// Codeword sent in transmission `i` for the global message `u`.
    pub fn encode_level(&self, u: &[u8], i: usize) -> Result<Vec<u8>> {
        if u.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                actual: u.len(),
            });
        }
        let level = self.level(i)?;
        let mut x = level.transform_input(u);
        polar_transform_in_place(&mut x)?;
        puncture(&x, level.pattern())
    }

    /// All K transmissions.
    pub fn encode(&self, u: &[u8]) -> Result<Vec<Vec<u8>>> {
        (1..=self.depth()).map(|i| self.encode_level(u, i)).collect()
    }

    /// The `k x (n_1 + ... + n_i)` generator of the first `i` transmissions.
    pub fn generator(&self, i: usize) -> Result<BitMatrix> {
        self.level(i)?;
        let cols = self.schedule.cumulative(i) as usize;
        if self.k().saturating_mul(cols) > MAX_GENERATOR_ENTRIES {
            return Err(Error::SizeLimit(format!(
                "generator of {} x {cols} entries",
                self.k()
            )));
        }
        let mut g = BitMatrix::zeros(self.k(), cols);
        let mut offset = 0;
        for level in &self.levels[..i] {
            for (local, &position) in level.row_order().iter().enumerate() {
                let row = puncture(&polar_row(level.n_u(), position)?, level.pattern())?;
                let global = level.mapping().global(local + 1) - 1;
                for (c, &bit) in row.iter().enumerate() {
                    if bit == 1 {
                        g.set(global, offset + c, true);
                    }
                }
            }
            offset += level.n();
        }
        Ok(g)
    }

    pub fn decoder(&self, rule: UpdateRule) -> SequentialDecoder<'_> {
        SequentialDecoder::new(self, rule)
    }

    /// Convenience wrapper around [`SequentialDecoder::decode`].
    pub fn decode(&self, chunks: &[Vec<f64>], rule: UpdateRule) -> Result<SequentialDecoding> {
        self.decoder(rule).decode(chunks)
    }
}

/// What one stage of sequential decoding recovered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageReport {
    pub level: usize,
    /// Global indices (1-based) decided at this stage.
    pub decoded: Vec<usize>,
    /// Information decisions taken on a zero LLR.
    pub ambiguous: usize,
}

impl StageReport {
    /// Whether every bit decided here matches `truth`.
    pub fn is_correct(&self, estimate: &[u8], truth: &[u8]) -> bool {
        self.decoded.iter().all(|&g| estimate[g - 1] == truth[g - 1])
    }
}

/// Result of decoding after `m` transmissions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequentialDecoding {
    pub message: Vec<u8>,
    /// Stages in decoding order, level `m` first.
    pub stages: Vec<StageReport>,
}

impl SequentialDecoding {
    pub fn decisions(&self) -> usize {
        self.stages.iter().map(|s| s.decoded.len()).sum()
    }
}

/// Decoder with per-level SC state kept between calls.
pub struct SequentialDecoder<'a> {
    spec: &'a PcpSpec,
    decoders: Vec<ScDecoder>,
    known: Vec<Option<u8>>,
}

impl<'a> SequentialDecoder<'a> {
    pub fn new(spec: &'a PcpSpec, rule: UpdateRule) -> Self {
        let decoders = spec
            .levels()
            .iter()
            .map(|l| ScDecoder::new(l.n_u(), rule).expect("mother lengths are powers of two"))
            .collect();
        SequentialDecoder {
            spec,
            decoders,
            known: vec![None; spec.k()],
        }
    }

    /// Decodes from the channel LLRs of the first `m = chunks.len()`
    /// transmissions. Level `m` is decoded on its rate-`R_m` set; each
    /// earlier level then freezes the bits already recovered elsewhere.
    pub fn decode(&mut self, chunks: &[Vec<f64>]) -> Result<SequentialDecoding> {
        let spec = self.spec;
        let m = chunks.len();
        if m == 0 || m > spec.depth() {
            return Err(Error::OutOfRange(format!(
                "{m} transmissions for a {}-level code",
                spec.depth()
            )));
        }
        for (level, chunk) in spec.levels().iter().zip(chunks) {
            if chunk.len() != level.n() {
                return Err(Error::LengthMismatch {
                    expected: level.n(),
                    actual: chunk.len(),
                });
            }
        }
        self.known.iter_mut().for_each(|b| *b = None);
        let mut stages = Vec::with_capacity(m);
        for i in (1..=m).rev() {
            let level = &spec.levels()[i - 1];
            let active = spec.sizes().get(i, m) as usize;
            let mut roles = vec![Some(0u8); level.n_u()];
            for (local, &position) in level.row_order().iter().enumerate() {
                roles[position - 1] = if local < active {
                    None
                } else {
                    let global = level.mapping().global(local + 1);
                    let bit = self.known[global - 1].ok_or_else(|| {
                        Error::condition(
                            "decoding order",
                            format!("bit {global} is needed at level {i} before it is known"),
                        )
                    })?;
                    Some(bit)
                };
            }
            let llrs = expand_llrs(&chunks[i - 1], level.pattern())?;
            let out = self.decoders[i - 1].decode(&llrs, &roles);
            let mut decoded = Vec::with_capacity(active);
            for (local, &position) in level.row_order()[..active].iter().enumerate() {
                let global = level.mapping().global(local + 1);
                self.known[global - 1] = Some(out.u[position - 1]);
                decoded.push(global);
            }
            stages.push(StageReport {
                level: i,
                decoded,
                ambiguous: out.ambiguous,
            });
        }
        let message = self
            .known
            .iter()
            .map(|b| b.expect("every bit is decided once"))
            .collect();
        Ok(SequentialDecoding { message, stages })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::LLR_LIMIT;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bec(e: f64) -> ChannelModel {
        ChannelModel::bec(e).unwrap()
    }

    fn small_request() -> BuildRequest {
        BuildRequest {
            k: 4,
            n1: Some(8),
            rates: None,
            lengths: None,
            channels: vec![bec(0.3), bec(0.6)],
            options: DesignOptions::default(),
        }
    }

    fn noiseless(bits: &[u8]) -> Vec<f64> {
        bits.iter()
            .map(|&b| if b == 0 { LLR_LIMIT } else { -LLR_LIMIT })
            .collect()
    }

    #[test]
    fn channel_derived_example() {
        let spec = build_pcp(&small_request()).unwrap();
        assert_eq!(spec.schedule().lengths(), &[8, 8]);
        assert_eq!(spec.schedule().rates(), &[Rational::new(1, 2), Rational::new(1, 4)]);
        assert_eq!(spec.sizes().rows(), &[vec![4, 2], vec![2]]);
        assert_eq!(spec.level(2).unwrap().mapping().table(), &[3, 4]);
        let l1 = spec.level(1).unwrap();
        assert_eq!(l1.sets().sets()[1].len(), 2);
        assert!(l1.sets().sets()[1].is_subset(&l1.sets().sets()[0]));
    }

    #[test]
    fn three_level_design() {
        let spec = build_pcp(&BuildRequest::three_level(ChannelModel::biawgn(0.9).unwrap())).unwrap();
        assert_eq!(spec.sizes().rows(), &[vec![192, 128, 85], vec![64, 42], vec![65]]);
        let l3 = spec.level(3).unwrap();
        assert_eq!((l3.n(), l3.n_u()), (195, 256));
        assert_eq!(l3.pattern().punctured_positions().len(), 61);
    }

    #[test]
    fn generator_matches_encoder() {
        let spec = build_pcp(&BuildRequest::three_level(ChannelModel::biawgn(0.9).unwrap())).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let u: Vec<u8> = (0..192).map(|_| rng.gen_range(0..2)).collect();
            let chunks = spec.encode(&u).unwrap();
            for i in 1..=3 {
                let g = spec.generator(i).unwrap();
                assert_eq!(g.rows(), 192);
                let joined: Vec<u8> = chunks[..i].concat();
                assert_eq!(g.left_mul(&u), joined);
            }
        }
        assert_eq!(spec.generator(1).unwrap().rank(), 192);
    }

    #[test]
    fn every_stage_decodes_noiseless() {
        let spec = build_pcp(&BuildRequest::three_level(ChannelModel::biawgn(0.9).unwrap())).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u: Vec<u8> = (0..192).map(|_| rng.gen_range(0..2)).collect();
        let chunks: Vec<Vec<f64>> = spec.encode(&u).unwrap().iter().map(|c| noiseless(c)).collect();
        let mut decoder = spec.decoder(UpdateRule::Exact);
        for m in 1..=3 {
            let out = decoder.decode(&chunks[..m]).unwrap();
            assert_eq!(out.message, u);
            assert_eq!(out.decisions(), 192);
            assert_eq!(out.stages[0].level, m);
            assert!(out.stages.iter().all(|s| s.is_correct(&out.message, &u)));
        }
    }

    #[test]
    fn decode_input_checks() {
        let spec = build_pcp(&small_request()).unwrap();
        assert!(spec.decode(&[], UpdateRule::Exact).is_err());
        assert!(spec.decode(&[vec![0.0; 7]], UpdateRule::Exact).is_err());
        assert!(spec
            .decode(&[vec![0.0; 8], vec![0.0; 8], vec![0.0; 8]], UpdateRule::Exact)
            .is_err());
        assert!(spec.encode_level(&[0, 1, 0], 1).is_err());
        assert!(spec.encode_level(&[0, 1, 0, 1], 3).is_err());
    }

    #[test]
    fn request_errors() {
        let mut r = small_request();
        r.channels = vec![bec(0.6), bec(0.3)];
        assert!(build_pcp(&r).is_err());
        let mut r = small_request();
        r.lengths = Some(vec![2, 4]);
        assert!(matches!(build_pcp(&r), Err(Error::Schedule(_))));
        let mut r = small_request();
        r.channels = vec![bec(0.3), bec(0.4), bec(0.5)];
        r.lengths = Some(vec![8, 8]);
        assert!(build_pcp(&r).is_err());
        let mut r = small_request();
        r.n1 = Some(6);
        assert!(build_pcp(&r).is_err());
    }

    #[test]
    fn tampered_parts_rejected() {
        let spec = build_pcp(&small_request()).unwrap();
        let levels = spec.levels().to_vec();
        let mut swapped = levels.clone();
        swapped[1] = PcpLevel::new(
            2,
            levels[1].pattern().clone(),
            levels[1].sets().clone(),
            BitMapping::new(2, vec![4, 3]),
        )
        .unwrap();
        assert!(PcpSpec::from_parts(
            spec.schedule().clone(),
            spec.design_channels().to_vec(),
            *spec.options(),
            swapped
        )
        .is_err());
        assert!(PcpSpec::from_parts(
            spec.schedule().clone(),
            spec.design_channels().to_vec(),
            *spec.options(),
            levels
        )
        .is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn random_specs_roundtrip(k in 1u64..40, pad in 0u64..24, tail in proptest::collection::vec(1u64..48, 1..3), seed in any::<u64>()) {
            let n1 = k + pad;
            let mut lengths = vec![n1];
            lengths.extend(tail);
            let levels = lengths.len();
            let channels: Vec<ChannelModel> = (0..levels).map(|i| bec(0.2 + 0.2 * i as f64)).collect();
            let request = BuildRequest { k, n1: None, rates: None, lengths: Some(lengths), channels, options: DesignOptions::default() };
            let Ok(spec) = build_pcp(&request) else { return Ok(()); };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u: Vec<u8> = (0..k).map(|_| rng.gen_range(0..2)).collect();
            let chunks: Vec<Vec<f64>> = spec.encode(&u).unwrap().iter().map(|c| noiseless(c)).collect();
            for m in 1..=levels {
                let out = spec.decode(&chunks[..m], UpdateRule::Exact).unwrap();
                prop_assert_eq!(&out.message, &u);
                prop_assert_eq!(out.decisions(), k as usize);
            }
        }
    }
}
