//! Polar-code primitives.
//!
//! Positions are 1-based on every public surface. Bit `u_j` enters row `j`
//! of `P_n`, the plain Kronecker power of `[[1, 0], [1, 1]]`, with no
//! bit-reversal.

mod brute;
mod reliability;
mod sc;
mod sets;
mod transform;

pub use brute::brute_force_bit_channel;
pub use reliability::{
    bec_reliability, design_profile, gaussian_reliability, monte_carlo_reliability,
    MetricKind, ProfileDocument, ReliabilityProfile,
};
pub use sc::{check_node, sc_decode, ScDecoder, ScOutput, UpdateRule};
pub use sets::{nested_information_sets, select_information_set, InformationSet, NestedSetFamily};
pub use transform::{polar_transform, polar_transform_in_place, polar_row};
