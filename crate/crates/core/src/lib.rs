//! Rate-compatible polar codes by parallel concatenation.
//!
//! A K-level parallel concatenated polar (PCP) code sends `k` information
//! bits over up to K incremental transmissions. Transmission `i` carries a
//! (possibly punctured) polar codeword of length `n_i`; after `i`
//! transmissions the effective rate is `k / (n_1 + ... + n_i)`. Each level
//! holds a chain of nested information sets, one per remaining rate, so that
//! bits recovered from later transmissions can be frozen inside earlier
//! codewords, lowering their rate until they are decodable.
//!
//! The crate is organised bottom-up:
//!
//! * [`channel`] binary-input memoryless channels (BEC, BSC, BI-AWGN).
//! * [`polar`] the Arikan transform, bit-channel reliability construction,
//!   information-set selection and successive-cancellation decoding.
//! * [`puncture`] puncturing patterns and punctured-code design.
//! * [`pcp`] rate schedules, size apportionment, bit mappings, incremental
//!   encoding, generator assembly and the sequential decoder.
//! * [`harness`] Monte Carlo HARQ-IR simulation, including a
//!   random-puncturing baseline.

pub mod bits;
pub mod channel;
mod error;
pub mod gf2;
pub mod harness;
pub mod pcp;
pub mod polar;
pub mod puncture;

pub use channel::{ChannelKind, ChannelModel, ChannelSymbol};
pub use error::{Error, Result};
pub use pcp::{
    BitMapping, BuildRequest, PcpLevel, PcpSpec, RateSchedule, Rational, SequentialDecoding,
    SizeTable,
};
pub use polar::{
    InformationSet, MetricKind, NestedSetFamily, ReliabilityProfile, UpdateRule,
};
pub use puncture::{DesignOptions, PuncturePattern, PuncturedPolarCode};
