//! Deterministic per-element random streams.
//!
//! Every element draws from its own splitmix64 streams, one per purpose,
//! derived from `(seed, element id, purpose)`. Adding or removing elements
//! never shifts another element's draws, and draws for packet sizes never
//! interleave with inter-arrival draws, so e.g. halving the inter-arrival cap
//! scales every gap of a generator by exactly one half.

/// One independent draw stream.
#[derive(Debug, Clone)]
pub struct Stream {
    state: u64,
}

/// Draw purposes, kept separate per element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Interarrival,
    Size,
    Service,
    Branch,
    Forward,
    Monitor,
}

fn fnv1a64(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn mix(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

impl Stream {
    /// Stream for `(seed, element, purpose)`.
    pub fn element(seed: u64, element_id: &str, purpose: Purpose) -> Stream {
        let tag = match purpose {
            Purpose::Interarrival => 0x49415252,
            Purpose::Size => 0x53495a45,
            Purpose::Service => 0x53455256,
            Purpose::Branch => 0x4252414e,
            Purpose::Forward => 0x464f5257,
            Purpose::Monitor => 0x4d4f4e49,
        };
        let state = mix(seed ^ 0xa076_1d64_78bd_642f)
            ^ mix(fnv1a64(element_id).wrapping_add(tag))
            ^ 0x9e37_79b9_7f4a_7c15;
        Stream { state }
    }

    pub fn from_seed(seed: u64) -> Stream {
        Stream { state: mix(seed) | 1 }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        mix(self.state)
    }

    /// Uniform draw in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Exponential draw with the given mean.
    pub fn exp(&mut self, mean: f64) -> f64 {
        debug_assert!(mean > 0.0);
        let u = self.unit();
        -mean * (-u).ln_1p()
    }
}

/// Exponential draw with mean `mean`, clamped at `cap` when present.
pub fn sample_truncated_exp(mean: f64, cap: Option<f64>, rng: &mut Stream) -> f64 {
    let draw = rng.exp(mean);
    match cap {
        Some(c) => draw.min(c),
        None => draw,
    }
}
