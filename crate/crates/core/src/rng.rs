//! Seeded, splittable random streams.

use rand::distr::{Distribution, Open01};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A reproducible pseudorandom stream identified by `(seed, stream_id)`.
///
/// Streams with the same seed and different ids are disjoint ChaCha
/// keystreams, which is how parallel work is partitioned. The stream also
/// counts how often a sampler had to redraw a degenerate floating value.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
    redraws: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
            redraws: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of degenerate draws discarded so far on this stream.
    pub fn redraws(&self) -> u64 {
        self.redraws
    }

    pub(crate) fn note_redraw(&mut self) {
        self.redraws += 1;
    }

    /// Uniform draw on the open interval (0, 1).
    #[inline]
    pub fn open01(&mut self) -> f64 {
        Open01.sample(self)
    }
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    #[inline]
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
