//! Fixed inputs shared by the benchmarks.

use rank1_core::pairs::{Mode, PairDescriptor};

/// Equal radial parameters away from the support edges.
pub const T: f64 = 0.7853981633974483;

pub const SEED: u64 = 2024;

/// One compact pair per family at a moderate size.
pub fn pairs() -> Vec<PairDescriptor> {
    ["su-compact", "so-compact", "sp-compact"]
        .iter()
        .map(|k| PairDescriptor::from_kind(k.parse().expect("pair name"), 6, Mode::Standard).expect("valid pair"))
        .collect()
}
