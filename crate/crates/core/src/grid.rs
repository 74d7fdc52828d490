//! Wavefunctions sampled on a uniform 1D grid.
//!
//! Position moments use trapezoid quadrature; momentum moments and the free
//! kinetic propagator use the discrete Fourier transform. The integrators
//! require the amplitude to vanish near both ends of the grid (see
//! [`GridWavefunction::edge_probability`]), so the wall condition at the
//! boundary never influences a run that is allowed to complete.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{ensure, Error, Result};

/// Normalization tolerance accepted by operations that require a unit state.
pub const NORM_TOLERANCE: f64 = 1e-8;

/// Fraction of the grid, at each end, that must stay empty.
pub const EDGE_FRACTION: f64 = 0.05;

/// Probability allowed inside the edge margin before a run aborts.
pub const EDGE_LEAK_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    x_min: f64,
    dx: f64,
    len: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, dx: f64, len: usize) -> Result<Self> {
        if len < 8 {
            return Err(Error::Geometry(format!("grid needs at least 8 points, got {len}")));
        }
        if !(dx.is_finite() && dx > 0.0) || !x_min.is_finite() {
            return Err(Error::Geometry(format!("bad grid origin/spacing ({x_min}, {dx})")));
        }
        Ok(Self { x_min, dx, len })
    }

    /// `len` points spanning [-half_width, half_width).
    pub fn centered(half_width: f64, len: usize) -> Result<Self> {
        Self::new(-half_width, 2.0 * half_width / len as f64, len)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn x_max(&self) -> f64 {
        self.x(self.len - 1)
    }

    pub fn extent(&self) -> f64 {
        self.len as f64 * self.dx
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.x(i))
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.len;
        let dk = 2.0 * PI / (n as f64 * self.dx);
        (0..n)
            .map(|j| {
                let j = if j < n.div_ceil(2) { j as f64 } else { j as f64 - n as f64 };
                j * dk
            })
            .collect()
    }
}

/// Observable selector for [`GridWavefunction::expectation_and_variance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Position,
    /// Wavenumber k = p / hbar.
    Momentum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    grid: GridSpec,
    amplitudes: Vec<Complex64>,
}

impl GridWavefunction {
    pub fn from_amplitudes(grid: GridSpec, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::Geometry(format!(
                "{} amplitudes for a {}-point grid",
                amplitudes.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let amplitudes = grid.positions().map(f).collect();
        Self { grid, amplitudes }
    }

    /// Normalized Gaussian with position spread `sigma` and mean wavenumber
    /// `k_mean`. Fails if the packet is not resolved or does not keep a 4
    /// sigma margin from both ends.
    pub fn gaussian(grid: GridSpec, x_mean: f64, k_mean: f64, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 2.0 * grid.dx()) {
            return Err(Error::Geometry(format!(
                "sigma {sigma} not resolvable with dx {}",
                grid.dx()
            )));
        }
        if x_mean - 4.0 * sigma < grid.x_min() || x_mean + 4.0 * sigma > grid.x_max() {
            return Err(Error::Geometry(format!(
                "packet at {x_mean} +- 4*{sigma} leaves [{}, {}]",
                grid.x_min(),
                grid.x_max()
            )));
        }
        let mut psi = Self::from_fn(grid, |x| {
            let env = (-(x - x_mean).powi(2) / (4.0 * sigma * sigma)).exp();
            Complex64::from_polar(env, k_mean * x)
        });
        psi.normalize()?;
        Ok(psi)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    /// sum |psi_i|^2 dx
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// Rescales to unit norm and returns the factor applied.
    pub fn normalize(&mut self) -> Result<f64> {
        let n2 = self.norm_sqr();
        if !(n2.is_finite() && n2 > 0.0) {
            return Err(Error::NumericFailure {
                step: 0,
                detail: format!("cannot normalize state with norm^2 = {n2}"),
            });
        }
        let factor = 1.0 / n2.sqrt();
        for a in &mut self.amplitudes {
            *a *= factor;
        }
        Ok(factor)
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    fn require_normalized(&self) -> Result<()> {
        let n2 = self.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Contract(format!("state not normalized (norm^2 = {n2})")));
        }
        Ok(())
    }

    /// |psi_i|^2 on the grid.
    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Mean and variance of position (m, m^2) or wavenumber (m^-1, m^-2).
    pub fn expectation_and_variance(&self, observable: Observable) -> Result<(f64, f64)> {
        self.require_normalized()?;
        Ok(match observable {
            Observable::Position => self.position_moments(),
            Observable::Momentum => self.wavenumber_moments(),
        })
    }

    /// Trapezoid-rule position mean and variance; assumes unit norm.
    pub fn position_moments(&self) -> (f64, f64) {
        let dx = self.grid.dx();
        let n = self.amplitudes.len();
        let w = |i: usize| if i == 0 || i == n - 1 { 0.5 * dx } else { dx };
        let mut norm = 0.0;
        let mut m1 = 0.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr() * w(i);
            norm += p;
            m1 += p * self.grid.x(i);
        }
        let mean = m1 / norm;
        let mut var = 0.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            var += a.norm_sqr() * w(i) * (self.grid.x(i) - mean).powi(2);
        }
        (mean, var / norm)
    }

    /// Spectral wavenumber mean and variance.
    pub fn wavenumber_moments(&self) -> (f64, f64) {
        let mut spec = self.amplitudes.clone();
        let fft = FftPlanner::new().plan_fft_forward(spec.len());
        fft.process(&mut spec);
        let ks = self.grid.wavenumbers();
        let total: f64 = spec.iter().map(|a| a.norm_sqr()).sum();
        let mean = spec.iter().zip(&ks).map(|(a, k)| a.norm_sqr() * k).sum::<f64>() / total;
        let var = spec
            .iter()
            .zip(&ks)
            .map(|(a, k)| a.norm_sqr() * (k - mean).powi(2))
            .sum::<f64>()
            / total;
        (mean, var)
    }

    /// |<self|other>|, both assumed normalized on the same grid.
    pub fn overlap(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
            * self.grid.dx()
    }

    /// Excess kurtosis of the position density (0 for a Gaussian).
    pub fn excess_kurtosis(&self) -> f64 {
        let (mean, var) = self.position_moments();
        let dx = self.grid.dx();
        let norm = self.norm_sqr();
        let m4 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * (self.grid.x(i) - mean).powi(4))
            .sum::<f64>()
            * dx
            / norm;
        m4 / (var * var) - 3.0
    }

    /// Probability inside the outer `fraction` of the grid at either end.
    pub fn edge_probability(&self, fraction: f64) -> f64 {
        let n = self.amplitudes.len();
        let margin = ((n as f64 * fraction).ceil() as usize).max(1);
        let dx = self.grid.dx();
        let head: f64 = self.amplitudes[..margin].iter().map(|a| a.norm_sqr()).sum();
        let tail: f64 = self.amplitudes[n - margin..].iter().map(|a| a.norm_sqr()).sum();
        (head + tail) * dx / self.norm_sqr()
    }

    pub(crate) fn check_edges(&self, step: usize) -> Result<()> {
        let leaked = self.edge_probability(EDGE_FRACTION);
        if leaked > EDGE_LEAK_LIMIT {
            return Err(Error::BoundaryLeak { step, leaked });
        }
        Ok(())
    }

    /// psi(x_i) at the grid point closest to `x`.
    pub fn value_near(&self, x: f64) -> Complex64 {
        self.amplitudes[self.index_near(x)]
    }

    pub fn index_near(&self, x: f64) -> usize {
        let i = ((x - self.grid.x_min()) / self.grid.dx()).round();
        (i.max(0.0) as usize).min(self.grid.len() - 1)
    }
}

/// Exact free-particle propagator exp(-i (hbar/m) k^2 t / 2) applied in
/// Fourier space.
pub struct FreePropagator {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
    hbar_over_m: f64,
    cached_dt: f64,
    phases: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl FreePropagator {
    pub fn new(grid: &GridSpec, hbar_over_m: f64) -> Result<Self> {
        ensure(hbar_over_m.is_finite() && hbar_over_m >= 0.0, || {
            format!("hbar/m must be non-negative, got {hbar_over_m}")
        })?;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.len());
        let inverse = planner.plan_fft_inverse(grid.len());
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Ok(Self {
            forward,
            inverse,
            wavenumbers: grid.wavenumbers(),
            hbar_over_m,
            cached_dt: f64::NAN,
            phases: Vec::new(),
            scratch: vec![Complex64::default(); scratch_len],
        })
    }

    pub fn propagate(&mut self, psi: &mut GridWavefunction, dt: f64) {
        if dt == 0.0 || self.hbar_over_m == 0.0 {
            return;
        }
        if dt != self.cached_dt {
            let n = self.wavenumbers.len() as f64;
            self.phases = self
                .wavenumbers
                .iter()
                .map(|k| Complex64::from_polar(1.0 / n, -0.5 * self.hbar_over_m * k * k * dt))
                .collect();
            self.cached_dt = dt;
        }
        let amps = psi.amplitudes_mut();
        self.forward.process_with_scratch(amps, &mut self.scratch);
        for (a, p) in amps.iter_mut().zip(&self.phases) {
            *a *= p;
        }
        self.inverse.process_with_scratch(amps, &mut self.scratch);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::centered(20.0, 1024).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(0.0, 0.1, 7).is_err());
        assert!(GridSpec::new(0.0, 0.0, 16).is_err());
        assert!(GridSpec::new(0.0, 0.1, 8).is_ok());
    }

    #[test]
    fn gaussian_moments() {
        let g = grid();
        let psi = GridWavefunction::gaussian(g, 0.0, 0.0, 1.0).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-9);
        let (m, v) = psi.expectation_and_variance(Observable::Position).unwrap();
        assert!(m.abs() < g.dx());
        assert!((v - 1.0).abs() < 0.02);

        let shifted = GridWavefunction::gaussian(g, 2.0, 0.0, 1.0).unwrap();
        let (m, _) = shifted.expectation_and_variance(Observable::Position).unwrap();
        assert!((m - 2.0).abs() < g.dx());
    }

    #[test]
    fn gaussian_momentum() {
        let g = grid();
        let psi = GridWavefunction::gaussian(g, 0.0, 5.0, 1.0).unwrap();
        let (k, _) = psi.expectation_and_variance(Observable::Momentum).unwrap();
        assert!((k - 5.0).abs() < 1.0 / g.extent(), "k = {k}");
    }

    #[test]
    fn windowed_plane_wave_momentum() {
        // A real envelope contributes no momentum: <k> equals the carrier.
        let g = grid();
        let mut psi = GridWavefunction::from_fn(g, |x| {
            let w = if x.abs() < 10.0 { (PI * x / 20.0).cos().powi(2) } else { 0.0 };
            Complex64::from_polar(w, 3.0 * x)
        });
        psi.normalize().unwrap();
        let (k, _) = psi.expectation_and_variance(Observable::Momentum).unwrap();
        assert!((k - 3.0).abs() < 1e-6, "k = {k}");
    }

    #[test]
    fn uncertainty_relation() {
        let g = grid();
        for sigma in [0.5, 1.0, 2.0] {
            let psi = GridWavefunction::gaussian(g, 0.0, 1.0, sigma).unwrap();
            let (_, vq) = psi.expectation_and_variance(Observable::Position).unwrap();
            let (_, vk) = psi.expectation_and_variance(Observable::Momentum).unwrap();
            assert!(vq * vk >= 0.25 * (1.0 - 1e-3), "{}", vq * vk);
        }
    }

    #[test]
    fn rejects_unnormalized() {
        let g = grid();
        let psi = GridWavefunction::from_fn(g, |_| Complex64::new(1.0, 0.0));
        assert!(matches!(
            psi.expectation_and_variance(Observable::Position),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn geometry_errors() {
        let g = grid();
        assert!(matches!(
            GridWavefunction::gaussian(g, 0.0, 0.0, g.dx()),
            Err(Error::Geometry(_))
        ));
        assert!(matches!(
            GridWavefunction::gaussian(g, 18.0, 0.0, 1.0),
            Err(Error::Geometry(_))
        ));
    }

    #[test]
    fn free_propagation_matches_dispersion() {
        let g = GridSpec::centered(40.0, 2048).unwrap();
        let sigma0 = 1.0;
        let mut psi = GridWavefunction::gaussian(g, 0.0, 0.0, sigma0).unwrap();
        let mut prop = FreePropagator::new(&g, 1.0).unwrap();
        let t = 3.0;
        prop.propagate(&mut psi, t);
        let (_, v) = psi.position_moments();
        let expected = sigma0 * sigma0 * (1.0 + (t / (2.0 * sigma0 * sigma0)).powi(2));
        assert!((v / expected - 1.0).abs() < 1e-6);
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
