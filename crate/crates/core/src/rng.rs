//! Seeded random streams.
//!
//! Every environment derives its randomness from one master seed. Each use
//! (item draws, demand, prices, ...) gets its own named ChaCha stream, so
//! adding a new consumer never shifts the draws an existing one sees.

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// FNV-1a, used to turn stream names into stable 64-bit stream ids.
fn stream_id(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// One step of SplitMix64; a bijective scrambler for deriving child seeds.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the `index`-th episode of a run with the given master seed.
///
/// Benchmarks evaluate every method on the same sequence of episode seeds.
pub fn episode_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(1)))
}

/// A named, reproducible random stream.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    name: String,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, name: &str) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id(name));
        Self { seed, name: name.to_string(), rng }
    }

    /// A stream keyed by this stream's seed and a child name (`parent/child`).
    pub fn substream(&self, child: &str) -> Self {
        Self::new(self.seed, &format!("{}/{child}", self.name))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
