//! Deterministic counter-based uniform stream.
//!
//! Every uniform consumed by the simulation comes from the splitmix64
//! finalizer applied to `stream_seed + counter * GOLDEN_GAMMA`. Stream seeds
//! are in turn derived from a user seed and a stream id through the same
//! finalizer, so the triple (seed, stream id, counter) maps to one fixed
//! `u64` on every platform. This is what makes chunked and multi-threaded
//! runs reproduce bit-for-bit: a chunk owns a stream id, not a position in a
//! shared sequence.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_CONST1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_CONST2: u64 = 0x94D0_49BB_1331_11EB;

/// 2^-64, the width of one `u64` cell in the unit interval.
const CELL_WIDTH: f64 = 5.421_010_862_427_522e-20;

fn splitmix64(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(MIX_CONST1);
    x ^= x >> 27;
    x = x.wrapping_mul(MIX_CONST2);
    x ^ (x >> 31)
}

/// Derives the seed of stream `stream_id` from the run seed.
pub fn derive_stream(seed: u64, stream_id: u64) -> u64 {
    splitmix64(seed ^ stream_id.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA))
}

/// Counter-based generator: stateless apart from the number of draws taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRng {
    stream_seed: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(stream_seed: u64) -> Self {
        Self {
            stream_seed,
            counter: 0,
        }
    }

    pub fn from_seed_and_stream(seed: u64, stream_id: u64) -> Self {
        Self::new(derive_stream(seed, stream_id))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        splitmix64(
            self.stream_seed
                .wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)),
        )
    }

    /// Uniform draw in (0, 1), both endpoints excluded: (x + 0.5) * 2^-64.
    pub fn next_open01(&mut self) -> f64 {
        let x = self.next_u64();
        let u = (x as f64 + 0.5) * CELL_WIDTH;
        // `x as f64` rounds up to 2^64 for the top 2^10 values, which would
        // yield exactly 1.0; snap those to the largest double below one.
        if u >= 1.0 {
            1.0 - f64::EPSILON / 2.0
        } else {
            u
        }
    }
}
