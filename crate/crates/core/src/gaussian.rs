use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, GridWavefunction};

/// Parameters of psi(x) = exp[-a (x - x_mean)^2 + i k_mean x + log_weight].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub a_re: f64,
    pub a_im: f64,
    pub x_mean: f64,
    pub k_mean: f64,
    pub log_weight: f64,
}

impl GaussianState {
    pub fn new(a: Complex64, x_mean: f64, k_mean: f64) -> Result<Self> {
        let state = Self {
            a_re: a.re,
            a_im: a.im,
            x_mean,
            k_mean,
            log_weight: 0.0,
        };
        state.validate()?;
        Ok(state)
    }

    /// Real-width packet with position spread `sigma`.
    pub fn with_spread(sigma: f64, x_mean: f64, k_mean: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
        }
        Self::new(Complex64::new(1.0 / (4.0 * sigma * sigma), 0.0), x_mean, k_mean)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a_re.is_finite() && self.a_re > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "Gaussian width needs Re a > 0, got {}",
                self.a_re
            )));
        }
        Ok(())
    }

    pub fn a(&self) -> Complex64 {
        Complex64::new(self.a_re, self.a_im)
    }

    /// Position spread 1 / (2 sqrt(Re a)).
    pub fn sigma_q(&self) -> f64 {
        0.5 / self.a_re.sqrt()
    }

    /// Wavenumber spread sqrt(|a|^2 / Re a); multiply by hbar for momentum.
    pub fn sigma_k(&self) -> f64 {
        ((self.a_re * self.a_re + self.a_im * self.a_im) / self.a_re).sqrt()
    }

    /// Samples the (normalized) packet on a grid.
    pub fn to_grid(&self, grid: GridSpec) -> Result<GridWavefunction> {
        let a = self.a();
        let mut psi = GridWavefunction::from_fn(grid, |x| {
            let d = x - self.x_mean;
            (-a * d * d + Complex64::new(0.0, self.k_mean * x)).exp()
        });
        psi.normalize()?;
        Ok(psi)
    }
}
