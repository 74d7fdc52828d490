//! Ensemble statistics and the order-independent parallel ensemble driver.

use rayon::prelude::*;

/// Running mean/variance (Welford), mergeable so partial sums from
/// different workers can be combined.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n;
        self.m2 += other.m2 + delta * delta * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            f64::INFINITY
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for Accumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

/// One-sigma binomial error of a frequency estimate.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Runs `n` independent trajectories and returns their results in index
/// order. Trajectory `i` must derive all its randomness from `i` (see
/// [`crate::noise::substream`]); the output is then independent of the
/// thread count and scheduling.
pub fn run_ensemble<T, F>(n: usize, trajectory: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..n as u64).into_par_iter().map(trajectory).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn simple_moments() {
        let acc: Accumulator = [1.0, 2.0, 3.0, 4.0].into_iter().collect();
        assert_eq!(acc.count(), 4);
        assert!((acc.mean() - 2.5).abs() < 1e-15);
        assert!((acc.variance() - 5.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn ensemble_is_ordered() {
        let out = run_ensemble(100, |i| i * 2);
        assert_eq!(out, (0..100).map(|i| i * 2).collect::<Vec<_>>());
    }

    proptest! {
        #[test]
        fn merge_matches_sequential(xs in prop::collection::vec(-1e3f64..1e3, 2..200), split in 0usize..200) {
            let split = split.min(xs.len());
            let whole: Accumulator = xs.iter().copied().collect();
            let mut left: Accumulator = xs[..split].iter().copied().collect();
            let right: Accumulator = xs[split..].iter().copied().collect();
            left.merge(&right);
            prop_assert_eq!(left.count(), whole.count());
            prop_assert!((left.mean() - whole.mean()).abs() < 1e-9);
            prop_assert!((left.variance() - whole.variance()).abs() < 1e-6 * (1.0 + whole.variance()));
        }
    }
}
