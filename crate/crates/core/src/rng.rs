//! Counter-based random streams.
//!
//! A [`RandomStream`] is a 64-bit key plus a counter; output `c` is a fixed
//! bijective mix of `key + c * GAMMA` (the SplitMix64 construction), so any
//! position of any stream can be computed without replaying earlier draws.
//! Sub-streams are derived by hashing `(key, purpose, index)` into a new key,
//! which lets the engine address "edge choice at iteration t" and "noise draw
//! k of node i" directly.
//!
//! Not cryptographic.

use crate::error::{Error, Result};

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// What a derived sub-stream is used for. Distinct purposes never share keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Edge,
    Noise,
    Init,
    Geometry,
    Custom(u32),
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Edge => 0x45_44_47_45,
            Purpose::Noise => 0x4E_4F_49_53,
            Purpose::Init => 0x49_4E_49_54,
            Purpose::Geometry => 0x47_45_4F_4D,
            Purpose::Custom(c) => 0x1_0000_0000 | c as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomStream {
    key: u64,
    counter: u64,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        RandomStream {
            key: mix64(seed ^ 0x6A09_E667_F3BC_C908),
            counter: 0,
        }
    }

    /// A fresh stream keyed by `(self.key, purpose, index)`. The parent's
    /// counter is not consulted or advanced.
    pub fn derive(&self, purpose: Purpose, index: u64) -> RandomStream {
        let k = mix64(self.key ^ mix64(purpose.tag().wrapping_mul(GAMMA)));
        RandomStream {
            key: mix64(k.wrapping_add(mix64(index.wrapping_add(GAMMA)))),
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let out = mix64(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)));
        self.counter = self.counter.wrapping_add(1);
        out
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Unbiased uniform index in `[0, m)` by rejection sampling.
    pub fn uniform_index(&mut self, m: usize) -> Result<usize> {
        if m == 0 {
            return Err(Error::invalid("cannot sample an index from an empty range"));
        }
        let m = m as u64;
        // Largest multiple of m representable; draws at or above it are rejected.
        let zone = u64::MAX - (u64::MAX % m + 1) % m;
        loop {
            let v = self.next_u64();
            if v <= zone {
                return Ok((v % m) as usize);
            }
        }
    }

    /// `N(0, sigma2)` by the polar Box-Muller method. `sigma2 == 0` yields
    /// exactly `0.0` without consuming the stream.
    pub fn gaussian(&mut self, sigma2: f64) -> Result<f64> {
        if sigma2.is_nan() || sigma2 < 0.0 || !sigma2.is_finite() {
            return Err(Error::invalid(format!(
                "variance must be finite and >= 0, got {sigma2}"
            )));
        }
        if sigma2 == 0.0 {
            return Ok(0.0);
        }
        Ok(sigma2.sqrt() * self.standard_normal())
    }

    fn standard_normal(&mut self) -> f64 {
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                return u * (-2.0 * s.ln() / s).sqrt();
            }
        }
    }
}

/// The independent streams one simulation draws from.
///
/// Edge choices and noise come from separate roots so that an experiment can
/// hold the edge sequence fixed and resample only the noise, or pair a noisy
/// run with a noiseless baseline on the same edges.
#[derive(Debug, Clone)]
pub struct SimStreams {
    edges: RandomStream,
    noise: RandomStream,
    init: RandomStream,
}

impl SimStreams {
    pub fn from_seed(seed: u64) -> Self {
        let root = RandomStream::new(seed);
        SimStreams {
            edges: root.derive(Purpose::Edge, 0),
            noise: root.derive(Purpose::Noise, 0),
            init: root.derive(Purpose::Init, 0),
        }
    }

    /// Same edge sequence as `self`, noise taken from `noise_seed`.
    pub fn with_noise_seed(&self, noise_seed: u64) -> Self {
        SimStreams {
            noise: RandomStream::new(noise_seed).derive(Purpose::Noise, 0),
            ..self.clone()
        }
    }

    /// Index of the edge sampled at `iteration` among `m` edges.
    pub fn edge_index(&self, iteration: u64, m: usize) -> Result<usize> {
        self.edges.derive(Purpose::Edge, iteration).uniform_index(m)
    }

    /// Stream for the `draw`-th noise variate of `node`.
    pub fn noise_stream(&self, node: usize, draw: u64) -> RandomStream {
        self.noise
            .derive(Purpose::Noise, node as u64)
            .derive(Purpose::Noise, draw)
    }

    /// Stream for generating initial values.
    pub fn init_stream(&self) -> RandomStream {
        self.init.clone()
    }
}
