//! Counter-based pseudo-random streams.
//!
//! Every random quantity in the crate is drawn from a [`CounterRng`], a
//! SplitMix64-style generator whose i-th output is a pure function of
//! `(seed, purpose-tag, i)`. Streams are split by tag (and optional lane
//! index), so generators used by different subsystems never alias and each
//! one can be reproduced in isolation. Gaussian variates use Box-Muller;
//! transcendentals go through `libm` so streams are bitwise identical across
//! platforms.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn hash_tag(tag: &str) -> u64 {
    // FNV-1a, then one mixing round.
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in tag.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    mix64(h)
}

/// Derive a fresh seed from `(seed, tag)`, for handing distinct sub-seeds
/// to generators that take a bare seed.
pub fn derive_seed(seed: u64, tag: &str) -> u64 {
    mix64(seed.wrapping_mul(GOLDEN) ^ hash_tag(tag))
}

/// A deterministic stream of pseudo-random numbers.
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
    gauss_cache: Option<f64>,
}

impl CounterRng {
    /// Stream identified by `(seed, tag)`.
    pub fn new(seed: u64, tag: &str) -> Self {
        CounterRng {
            key: mix64(seed.wrapping_mul(GOLDEN) ^ hash_tag(tag)),
            counter: 0,
            gauss_cache: None,
        }
    }

    /// Stream identified by `(seed, tag, lane)`, for indexed sub-streams
    /// (per repeat, per grid cell, per objective).
    pub fn with_lane(seed: u64, tag: &str, lane: u64) -> Self {
        CounterRng {
            key: mix64(seed.wrapping_mul(GOLDEN) ^ hash_tag(tag) ^ mix64(lane.wrapping_add(1))),
            counter: 0,
            gauss_cache: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on (0, 1]; safe as a log argument.
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        // Multiply-shift; bias is negligible for the n used here (n << 2^64).
        ((u128::from(self.next_u64()) * n as u128) >> 64) as usize
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.gauss_cache.take() {
            return z;
        }
        let u1 = self.uniform_open();
        let u2 = self.uniform();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let t = 2.0 * std::f64::consts::PI * u2;
        self.gauss_cache = Some(r * libm::sin(t));
        r * libm::cos(t)
    }

    pub fn normal_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }

    /// Rademacher sign, +1.0 or -1.0.
    pub fn sign(&mut self) -> f64 {
        if self.next_u64() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Gamma(shape, 1) via Marsaglia-Tsang, with the standard boost for
    /// shape < 1.
    pub fn gamma(&mut self, shape: f64) -> f64 {
        assert!(shape > 0.0, "gamma shape must be positive");
        if shape < 1.0 {
            let g = self.gamma(shape + 1.0);
            let u = self.uniform_open();
            return g * libm::pow(u, 1.0 / shape);
        }
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / libm::sqrt(9.0 * d);
        loop {
            let x = self.normal();
            let t = 1.0 + c * x;
            if t <= 0.0 {
                continue;
            }
            let v = t * t * t;
            let u = self.uniform_open();
            if libm::log(u) < 0.5 * x * x + d - d * v + d * libm::log(v) {
                return d * v;
            }
        }
    }

    /// Draw `k` indices without replacement from `0..n` (Fisher-Yates prefix).
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n);
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below(n - i);
            idx.swap(i, j);
        }
        idx.truncate(k);
        idx
    }
}
