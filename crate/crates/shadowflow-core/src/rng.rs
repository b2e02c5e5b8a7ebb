//! Seeded pseudo-random numbers with a pinned algorithm.
//!
//! Reproducibility of trajectories and Monte-Carlo estimates is part of the
//! crate contract (same seed, same bits), so the generator is fixed here
//! (xoshiro256** seeded through splitmix64) instead of delegating to an
//! external crate whose stream may change between versions.

use crate::chart::{Point, DIM_MAX, ZERO};

pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    pub fn seed_from(seed: u64) -> Self {
        let mut sm = seed;
        let mut s = [0u64; 4];
        for slot in s.iter_mut() {
            *slot = splitmix64(&mut sm);
        }
        // All-zero state is invalid for xoshiro; splitmix of any seed avoids it,
        // but guard anyway.
        if s.iter().all(|&w| w == 0) {
            s[0] = 0x9e3779b97f4a7c15;
        }
        Rng { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`, safe as a logarithm argument.
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Log-uniform on `[lo, hi]`, `0 < lo < hi`.
    pub fn log_range(&mut self, lo: f64, hi: f64) -> f64 {
        (self.range(lo.ln(), hi.ln())).exp()
    }

    pub fn rademacher(&mut self) -> f64 {
        if self.next_u64() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform_open();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos()
    }

    /// Uniform direction on the unit sphere of the first `dim` coordinates.
    pub fn unit_vector(&mut self, dim: usize) -> Point {
        loop {
            let mut v = ZERO;
            let mut n2 = 0.0;
            for slot in v.iter_mut().take(dim.min(DIM_MAX)) {
                let z = self.normal();
                *slot = z;
                n2 += z * z;
            }
            if n2 > 1e-30 {
                let inv = 1.0 / n2.sqrt();
                for slot in v.iter_mut().take(dim.min(DIM_MAX)) {
                    *slot *= inv;
                }
                return v;
            }
        }
    }

    /// Uniform point in the ball of radius `r` (first `dim` coordinates).
    pub fn in_ball(&mut self, dim: usize, r: f64) -> Point {
        let dir = self.unit_vector(dim);
        let u = self.uniform();
        let radius = r * u.powf(1.0 / dim as f64);
        crate::chart::scaled(&dir, radius)
    }
}

/// Deterministic sign in `{-1, +1}` from a seed and two keys; used for the
/// random-sign perturbation policy so that the sign is a pure function of
/// time bucket and channel rather than of generator call order.
pub fn hashed_sign(seed: u64, bucket: u64, channel: u64) -> f64 {
    let mut s = seed ^ bucket.wrapping_mul(0x9e3779b97f4a7c15) ^ channel.rotate_left(32);
    if splitmix64(&mut s) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}
