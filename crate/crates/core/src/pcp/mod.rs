//! Parallel concatenated polar codes.

mod code;
mod document;
mod mapping;
mod schedule;

pub use code::{
    build_pcp, BuildRequest, PcpLevel, PcpSpec, SequentialDecoder, SequentialDecoding,
    StageReport, MAX_GENERATOR_ENTRIES,
};
pub use document::{LevelDocument, SpecDocument};
pub use mapping::{build_bit_mappings, check_partition, BitMapping};
pub use schedule::{
    apportion_sizes, check_dyadic_feasibility, derive_lengths, dyadic_schedule_for_capacities,
    format_rational, parse_rational, rate_to_f64, DyadicCheck, RateSchedule, Rational, SizeTable,
};
