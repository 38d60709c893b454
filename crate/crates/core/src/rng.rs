//! Counter-based SplitMix64 randomness.
//!
//! Every draw is a pure function of `(seed, index)`: the i-th output is
//! `mix64(seed + (i+1)·GAMMA)` with the SplitMix64 finalizer, so sampling is
//! order-independent, trivially reproducible across platforms, and two runs
//! with the same seed are bit-identical. Uniforms are mapped to the *open*
//! interval `(0, 1)` — `((z >> 11) + 0.5)·2⁻⁵³` — because downstream
//! inversion layers must never see 0 or 1.

/// Weyl increment of SplitMix64 (the golden-ratio constant).
pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A counter-based SplitMix64 stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The i-th 64-bit output of this stream.
    pub fn nth_u64(&self, i: u64) -> u64 {
        mix64(self.seed.wrapping_add(GAMMA.wrapping_mul(i.wrapping_add(1))))
    }

    /// The i-th uniform draw on the open interval `(0, 1)`.
    pub fn nth_u01(&self, i: u64) -> f64 {
        (((self.nth_u64(i) >> 11) as f64) + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// The i-th pair of uniforms, consuming indices `2i` and `2i + 1`.
    pub fn pair_u01(&self, i: u64) -> (f64, f64) {
        (self.nth_u01(2 * i), self.nth_u01(2 * i + 1))
    }

    /// A decorrelated child stream, keyed by a label.
    pub fn substream(&self, label: u64) -> CounterRng {
        CounterRng::new(self.nth_u64(label))
    }
}
