//! JSON form of a PCP code.

use serde::{Deserialize, Serialize};

use super::code::{PcpLevel, PcpSpec};
use super::mapping::BitMapping;
use super::schedule::{format_rational, parse_rational, RateSchedule};
use crate::polar::{InformationSet, NestedSetFamily};
use crate::{ChannelModel, DesignOptions, Error, PuncturePattern, Result};

pub const FORMAT: &str = "pcp-spec";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpecDocument {
    pub format: String,
    pub version: u32,
    pub k: u64,
    pub lengths: Vec<u64>,
    /// Exact rates as `p/q`.
    pub rates: Vec<String>,
    pub design_channels: Vec<ChannelModel>,
    pub design_options: DesignOptions,
    pub sizes: Vec<Vec<u64>>,
    pub levels: Vec<LevelDocument>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelDocument {
    pub level: usize,
    pub n: usize,
    pub pattern: PuncturePattern,
    /// Information sets for rates `R_i, ..., R_K`, each 1-based ascending.
    pub sets: Vec<Vec<usize>>,
    /// Global index of each local information position, in stacked order.
    pub mapping: Vec<usize>,
}

impl PcpSpec {
    pub fn to_document(&self) -> SpecDocument {
        let schedule = self.schedule();
        SpecDocument {
            format: FORMAT.to_string(),
            version: VERSION,
            k: schedule.k(),
            lengths: schedule.lengths().to_vec(),
            rates: schedule.rates().iter().map(format_rational).collect(),
            design_channels: self.design_channels().to_vec(),
            design_options: *self.options(),
            sizes: self.sizes().rows().to_vec(),
            levels: self
                .levels()
                .iter()
                .map(|l| LevelDocument {
                    level: l.level(),
                    n: l.n(),
                    pattern: l.pattern().clone(),
                    sets: l.sets().sets().iter().map(|s| s.indices().to_vec()).collect(),
                    mapping: l.mapping().table().to_vec(),
                })
                .collect(),
        }
    }

    /// Rebuilds and fully re-validates a code from its document.
    pub fn from_document(doc: SpecDocument) -> Result<Self> {
        if doc.format != FORMAT || doc.version != VERSION {
            return Err(Error::Unsupported(format!(
                "document format {} version {}",
                doc.format, doc.version
            )));
        }
        let schedule = RateSchedule::from_lengths(doc.k, doc.lengths)?;
        let rates = doc
            .rates
            .iter()
            .map(|r| parse_rational(r))
            .collect::<Result<Vec<_>>>()?;
        if rates != schedule.rates() {
            return Err(Error::condition("(c.1)", "stored rates disagree with the lengths"));
        }
        let mut levels = Vec::with_capacity(doc.levels.len());
        for l in doc.levels {
            if l.n != l.pattern.n() {
                return Err(Error::LengthMismatch {
                    expected: l.n,
                    actual: l.pattern.n(),
                });
            }
            let n_u = l.pattern.n_u();
            let sets = l
                .sets
                .into_iter()
                .map(|s| InformationSet::new(n_u, s))
                .collect::<Result<Vec<_>>>()?;
            let family = NestedSetFamily::new(sets)?;
            levels.push(PcpLevel::new(
                l.level,
                l.pattern,
                family,
                BitMapping::new(l.level, l.mapping),
            )?);
        }
        let spec = PcpSpec::from_parts(schedule, doc.design_channels, doc.design_options, levels)?;
        if spec.sizes().rows() != doc.sizes.as_slice() {
            return Err(Error::condition("(c.3)", "stored sizes disagree with the sets"));
        }
        Ok(spec)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(serde_json::from_str(text)?)
    }
}
