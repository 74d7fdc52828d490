//! Seeded Wiener increments.
//!
//! Generator: ChaCha8 (`rand_chacha::ChaCha8Rng`), keyed by the 64-bit master
//! seed and positioned on a 64-bit stream index, so trajectory `i` of an
//! ensemble always draws from stream `i` no matter which worker runs it.
//! Normal deviates come from the Box–Muller transform evaluated with the
//! pure-Rust `libm` routines, which makes the sequence bit-identical across
//! platforms. Each uniform pair yields two deviates; the second is cached.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure, Result};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Stream index for sub-stream `lane` of trajectory `trajectory`.
///
/// Trajectories that need several independent sources (e.g. two Wiener
/// processes, or a Wiener process plus a jump clock) take lanes 0..16.
pub fn substream(trajectory: u64, lane: u64) -> u64 {
    debug_assert!(lane < 16);
    (trajectory << 4) | lane
}

/// Unbounded source of standard normals, uniforms and scaled increments.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
    seed: u64,
    stream: u64,
}

impl NoiseStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self {
            rng,
            spare: None,
            seed,
            stream,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform on the half-open interval (0, 1].
    pub fn uniform_open0(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Exponential waiting time with the given rate.
    pub fn exponential(&mut self, rate: f64) -> f64 {
        -libm::log(self.uniform_open0()) / rate
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform_open0();
        let u2 = self.uniform();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let theta = TWO_PI * u2;
        self.spare = Some(r * libm::sin(theta));
        r * libm::cos(theta)
    }
}

/// A materialized Wiener path: `increments[i]` is W(t_{i+1}) - W(t_i).
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    seed: u64,
    stream: u64,
    dt: f64,
    increments: Vec<f64>,
}

impl NoisePath {
    /// `n_steps` increments of variance `dt` from stream 0 of `seed`.
    pub fn generate(seed: u64, dt: f64, n_steps: usize) -> Result<Self> {
        Self::generate_stream(seed, 0, dt, n_steps)
    }

    pub fn generate_stream(seed: u64, stream: u64, dt: f64, n_steps: usize) -> Result<Self> {
        ensure(dt.is_finite() && dt > 0.0, || {
            format!("noise dt must be positive, got {dt}")
        })?;
        ensure(n_steps >= 1, || "noise path needs at least one step".into())?;
        let mut source = NoiseStream::new(seed, stream);
        let scale = dt.sqrt();
        let increments = (0..n_steps)
            .map(|_| scale * source.standard_normal())
            .collect();
        Ok(Self {
            seed,
            stream,
            dt,
            increments,
        })
    }

    /// Wraps externally produced increments (e.g. for replaying a path).
    pub fn from_increments(dt: f64, increments: Vec<f64>) -> Result<Self> {
        ensure(dt.is_finite() && dt > 0.0, || {
            format!("noise dt must be positive, got {dt}")
        })?;
        ensure(!increments.is_empty(), || "empty noise path".into())?;
        Ok(Self {
            seed: 0,
            stream: 0,
            dt,
            increments,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }
}

/// Anything that hands out Wiener increments of a fixed step.
pub trait IncrementSource {
    fn dt(&self) -> f64;
    /// `None` once a finite source is exhausted.
    fn next_increment(&mut self) -> Option<f64>;
}

/// Lazily generated increments: used where the number of steps is not
/// known up front (first-passage problems).
#[derive(Debug, Clone)]
pub struct StreamingIncrements {
    stream: NoiseStream,
    dt: f64,
    scale: f64,
}

impl StreamingIncrements {
    pub fn new(seed: u64, stream: u64, dt: f64) -> Result<Self> {
        ensure(dt.is_finite() && dt > 0.0, || {
            format!("noise dt must be positive, got {dt}")
        })?;
        Ok(Self {
            stream: NoiseStream::new(seed, stream),
            dt,
            scale: dt.sqrt(),
        })
    }
}

impl IncrementSource for StreamingIncrements {
    fn dt(&self) -> f64 {
        self.dt
    }

    fn next_increment(&mut self) -> Option<f64> {
        Some(self.scale * self.stream.standard_normal())
    }
}

/// Cursor over a materialized path.
#[derive(Debug, Clone)]
pub struct PathCursor<'a> {
    path: &'a NoisePath,
    pos: usize,
}

impl NoisePath {
    pub fn cursor(&self) -> PathCursor<'_> {
        PathCursor { path: self, pos: 0 }
    }
}

impl IncrementSource for PathCursor<'_> {
    fn dt(&self) -> f64 {
        self.path.dt
    }

    fn next_increment(&mut self) -> Option<f64> {
        let v = self.path.increments.get(self.pos).copied();
        self.pos += 1;
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_arguments() {
        assert!(NoisePath::generate(1, 0.0, 10).is_err());
        assert!(NoisePath::generate(1, -1.0, 10).is_err());
        assert!(NoisePath::generate(1, 1e-3, 0).is_err());
    }

    #[test]
    fn bit_identical_for_same_seed() {
        let a = NoisePath::generate(7, 1e-3, 1000).unwrap();
        let b = NoisePath::generate(7, 1e-3, 1000).unwrap();
        let bits = |p: &NoisePath| p.increments().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        let c = NoisePath::generate(8, 1e-3, 1000).unwrap();
        assert_ne!(bits(&a), bits(&c));
    }

    #[test]
    fn streams_are_distinct() {
        let a = NoisePath::generate_stream(7, 0, 1.0, 16).unwrap();
        let b = NoisePath::generate_stream(7, 1, 1.0, 16).unwrap();
        assert_ne!(a.increments(), b.increments());
    }

    #[test]
    fn moments_of_increments() {
        let dt = 1e-3;
        let n = 100_000;
        let path = NoisePath::generate(7, dt, n).unwrap();
        let nf = n as f64;
        let mean = path.increments().iter().sum::<f64>() / nf;
        assert!(mean.abs() < 3.0 * (dt / nf).sqrt(), "mean {mean}");
        let var = path.increments().iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0);
        // Var of the sample variance of N(0, dt) is 2 dt^2 / (n - 1).
        let sigma = dt * (2.0 / (nf - 1.0)).sqrt();
        assert!((var - dt).abs() < 3.0 * sigma, "var {var}");
    }

    #[test]
    fn uniforms_in_range() {
        let mut s = NoiseStream::new(3, 0);
        for _ in 0..10_000 {
            let u = s.uniform();
            assert!((0.0..1.0).contains(&u));
            let v = s.uniform_open0();
            assert!(v > 0.0 && v <= 1.0);
        }
    }

    #[test]
    fn streaming_matches_materialized() {
        let path = NoisePath::generate_stream(11, 5, 0.01, 50).unwrap();
        let mut lazy = StreamingIncrements::new(11, 5, 0.01).unwrap();
        for &x in path.increments() {
            assert_eq!(lazy.next_increment().unwrap().to_bits(), x.to_bits());
        }
    }
}
