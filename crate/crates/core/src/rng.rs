//! Deterministic randomness.
//!
//! All draws in this crate go through a counter-based ChaCha8 stream keyed by
//! a 64-bit seed. Child streams are derived by folding tag words into the
//! parent seed with the splitmix64 finalizer, so replicas and grid points get
//! independent streams whose identity depends only on (seed, tags), never on
//! execution order. Normals come from uniforms via Box-Muller; the whole
//! pipeline is identified by [`GENERATOR_ID`] in tensor provenance.
//! Determinism promise: identical within one build, not across builds or
//! architectures.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{cast, Scalar};

/// Identifies the seed-to-entries pipeline recorded in provenance.
pub const GENERATOR_ID: &str = "chacha8/splitmix64/box-muller/v1";

/// splitmix64 finalizer (Steele, Lea, Flood 2014 constants).
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a master seed and a tag path.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut s = mix64(master);
    for &t in tags {
        s = mix64(s ^ mix64(t));
    }
    s
}

/// FNV-1a hash of a label, for use as a derivation tag.
pub fn tag(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in label.as_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Deterministic stream of uniforms and standard normals.
pub struct Stream {
    rng: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    /// Child stream at `tags` below this stream's seed space.
    pub fn derived(master: u64, tags: &[u64]) -> Self {
        Stream::new(derive_seed(master, tags))
    }

    /// Uniform on the open interval (0, 1).
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        // 53 high bits, offset by half an ulp so 0 and 1 are excluded.
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Uniform on [lo, hi).
    #[inline]
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * (((self.rng.next_u64() >> 11) as f64) * (1.0 / 9_007_199_254_740_992.0))
    }

    /// Standard normal via Box-Muller; pairs are consumed in order.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.uniform_open();
        let u2 = self.uniform_open();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    /// Vector of i.i.d. N(0, sigma²) values.
    pub fn normal_vec<T: Scalar>(&mut self, len: usize, sigma: f64) -> Vec<T> {
        (0..len)
            .map(|_| cast::<T>(self.standard_normal() * sigma))
            .collect()
    }

    /// Vector of i.i.d. uniforms on [lo, hi).
    pub fn uniform_vec<T: Scalar>(&mut self, len: usize, lo: f64, hi: f64) -> Vec<T> {
        (0..len).map(|_| cast::<T>(self.uniform_in(lo, hi))).collect()
    }

    /// Uniform random sign vector of ±1.
    pub fn sign_vec(&mut self, len: usize) -> Vec<i8> {
        (0..len)
            .map(|_| if self.rng.next_u64() & 1 == 1 { 1 } else { -1 })
            .collect()
    }
}
