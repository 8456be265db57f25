use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Samples per independently seeded block in [`par_collect`].
pub const BLOCK: usize = 4096;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Identity of a random stream: a seed plus a stream index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamId {
    pub seed: u64,
    pub stream_id: u64,
}

/// A reproducible generator: ChaCha20 keyed by `seed`, on stream `stream_id`.
///
/// Gaussians come from Box–Muller so the output depends on nothing but the
/// ChaCha20 word sequence.
#[derive(Debug, Clone)]
pub struct RngStream {
    id: StreamId,
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream {
            id: StreamId { seed, stream_id },
            rng,
            spare: None,
        }
    }

    pub fn id(&self) -> StreamId {
        self.id
    }

    /// Child stream `index`; children with distinct indices do not overlap.
    pub fn substream(&self, index: u64) -> RngStream {
        let child = splitmix64(splitmix64(self.id.stream_id) ^ splitmix64(index.wrapping_add(1)));
        RngStream::new(self.id.seed, child)
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Standard normal.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

/// Draw `count` values in blocks of [`BLOCK`], block `b` using
/// `rng.substream(b)`. The result does not depend on the thread count.
pub fn par_collect<T: Send>(
    rng: &RngStream,
    count: usize,
    f: impl Fn(&mut RngStream) -> T + Sync,
) -> Vec<T> {
    let blocks = count.div_ceil(BLOCK);
    let chunks: Vec<Vec<T>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut r = rng.substream(b as u64);
            let len = BLOCK.min(count - b * BLOCK);
            (0..len).map(|_| f(&mut r)).collect()
        })
        .collect();
    chunks.into_iter().flatten().collect()
}
