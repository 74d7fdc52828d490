//! Spontaneous-localization jump process on grid wavefunctions.
//!
//! At exponentially distributed times (rate `n lambda`) the state is
//! multiplied by a Gaussian of width `r_c` centred at a random point drawn
//! from `p(x) = ||L(x) psi||^2`, and renormalized. Between jumps it evolves
//! unitarily.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{LAMBDA_GRW, R_C};
use crate::error::{ensure, ensure_positive, Error, Result};
use crate::grid::{FreePropagator, GridWavefunction};
use crate::noise::NoiseStream;

/// Degenerate jumps are resampled at most this many times in a row.
const MAX_RESAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrwParams {
    /// Jump rate per particle, s^-1.
    pub lambda_grw: f64,
    /// Localization width, m.
    pub r_c: f64,
    /// Particles sharing the centre-of-mass coordinate.
    pub n_particles: u64,
}

impl GrwParams {
    pub fn new(lambda_grw: f64, r_c: f64, n_particles: u64) -> Result<Self> {
        ensure(lambda_grw.is_finite() && lambda_grw >= 0.0, || {
            format!("lambda_grw must be non-negative, got {lambda_grw}")
        })?;
        ensure_positive("r_c", r_c)?;
        ensure(n_particles >= 1, || "n_particles must be at least 1".into())?;
        Ok(Self {
            lambda_grw,
            r_c,
            n_particles,
        })
    }

    /// Standard single-particle values.
    pub fn standard() -> Self {
        Self {
            lambda_grw: LAMBDA_GRW,
            r_c: R_C,
            n_particles: 1,
        }
    }

    /// Jump rate of the centre of mass: n lambda.
    pub fn total_rate(&self) -> f64 {
        self.n_particles as f64 * self.lambda_grw
    }
}

/// L(x) = (pi r^2)^{-1/4} exp(-(q - x)^2 / 2 r^2) evaluated at `q`.
pub fn localization_function(q: f64, x_center: f64, r_c: f64) -> f64 {
    let u = (q - x_center) / r_c;
    (std::f64::consts::PI * r_c * r_c).powf(-0.25) * (-0.5 * u * u).exp()
}

/// Applies L(x_center) and renormalizes.
pub fn localize(psi: &GridWavefunction, x_center: f64, r_c: f64) -> Result<GridWavefunction> {
    ensure_positive("r_c", r_c)?;
    if !psi.is_normalized() {
        return Err(Error::Contract(format!(
            "state not normalized (norm^2 = {})",
            psi.norm_sqr()
        )));
    }
    let grid = *psi.grid();
    let mut out = psi.clone();
    for (i, a) in out.amplitudes_mut().iter_mut().enumerate() {
        *a *= localization_function(grid.x(i), x_center, r_c);
    }
    let n2 = out.norm_sqr();
    if !(n2 > f64::MIN_POSITIVE * 1e10) || !n2.is_finite() {
        return Err(Error::DegenerateJump(format!(
            "localization at {x_center} left norm^2 = {n2:e}"
        )));
    }
    out.normalize()?;
    Ok(out)
}

/// Jump-centre density p(x_i) = ||L(x_i) psi||^2 at every grid point; it
/// integrates to one (up to the grid edges).
pub fn jump_position_density(psi: &GridWavefunction, r_c: f64) -> Result<Vec<f64>> {
    ensure_positive("r_c", r_c)?;
    if !psi.is_normalized() {
        return Err(Error::Contract(format!(
            "state not normalized (norm^2 = {})",
            psi.norm_sqr()
        )));
    }
    let grid = psi.grid();
    let dx = grid.dx();
    let rho = psi.density();
    // L^2 is a normalized Gaussian of variance r^2/2, negligible beyond 40 r.
    let reach = ((40.0 * r_c / dx).ceil() as usize).min(grid.len());
    let kernel: Vec<f64> = (0..=reach)
        .map(|j| localization_function(j as f64 * dx, 0.0, r_c).powi(2) * dx)
        .collect();
    let n = grid.len();
    let out = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(reach);
            let hi = (i + reach).min(n - 1);
            (lo..=hi).map(|j| rho[j] * kernel[i.abs_diff(j)]).sum()
        })
        .collect();
    Ok(out)
}

/// lambda [1 - exp(-(x - y)^2 / 4 r^2)]: decay rate of rho(x, y).
pub fn offdiag_decay_rate(x: f64, y: f64, lambda_grw: f64, r_c: f64) -> f64 {
    let d = x - y;
    -lambda_grw * (-d * d / (4.0 * r_c * r_c)).exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrwHamiltonian {
    Free,
    /// Only jumps act.
    Frozen,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrwRunConfig {
    pub t_final: f64,
    /// Interval between observer calls.
    pub sample_dt: f64,
    pub hbar_over_m: f64,
    pub hamiltonian: GrwHamiltonian,
}

impl GrwRunConfig {
    pub fn new(t_final: f64, sample_dt: f64, hbar_over_m: f64, hamiltonian: GrwHamiltonian) -> Result<Self> {
        ensure_positive("t_final", t_final)?;
        ensure_positive("sample_dt", sample_dt)?;
        ensure_positive("hbar_over_m", hbar_over_m)?;
        Ok(Self {
            t_final,
            sample_dt,
            hbar_over_m,
            hamiltonian,
        })
    }

    pub fn n_samples(&self) -> usize {
        (self.t_final / self.sample_dt).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub time: f64,
    pub center: f64,
}

#[derive(Debug, Clone)]
pub struct GrwTrajectory {
    pub jumps: Vec<Jump>,
    /// Jump centres that were redrawn because localization underflowed.
    pub degenerate_resamples: usize,
    pub final_state: GridWavefunction,
}

fn sample_center(psi: &GridWavefunction, r_c: f64, rng: &mut NoiseStream) -> Result<f64> {
    let density = jump_position_density(psi, r_c)?;
    let total: f64 = density.iter().sum();
    let target = rng.uniform() * total;
    let mut acc = 0.0;
    for (i, p) in density.iter().enumerate() {
        acc += p;
        if acc >= target {
            return Ok(psi.grid().x(i));
        }
    }
    Ok(psi.grid().x_max())
}

/// Runs one jump trajectory. Waiting times are drawn exactly from the
/// exponential law; free evolution between events is spectral and exact.
/// `observer` is called at t = 0, sample_dt, 2 sample_dt, ... with the
/// current state.
pub fn evolve_grw(
    psi0: &GridWavefunction,
    params: &GrwParams,
    config: &GrwRunConfig,
    rng: &mut NoiseStream,
    mut observer: impl FnMut(f64, &GridWavefunction),
) -> Result<GrwTrajectory> {
    if !psi0.is_normalized() {
        return Err(Error::Contract(format!(
            "initial state not normalized (norm^2 = {})",
            psi0.norm_sqr()
        )));
    }
    let mut propagator = match config.hamiltonian {
        GrwHamiltonian::Free => Some(FreePropagator::new(psi0.grid(), config.hbar_over_m)?),
        GrwHamiltonian::Frozen => None,
    };
    let rate = params.total_rate();
    let draw_wait = |rng: &mut NoiseStream| if rate > 0.0 { rng.exponential(rate) } else { f64::INFINITY };

    let mut psi = psi0.clone();
    psi.check_edges(0)?;
    let mut t = 0.0;
    let mut next_jump = draw_wait(rng);
    let mut jumps = Vec::new();
    let mut resamples = 0;
    observer(0.0, &psi);

    for k in 1..=config.n_samples() {
        let t_sample = k as f64 * config.sample_dt;
        while next_jump <= t_sample {
            if let Some(p) = propagator.as_mut() {
                p.propagate(&mut psi, next_jump - t);
            }
            t = next_jump;
            let mut attempts = 0;
            psi = loop {
                let center = sample_center(&psi, params.r_c, rng)?;
                match localize(&psi, center, params.r_c) {
                    Ok(next) => {
                        jumps.push(Jump { time: t, center });
                        break next;
                    }
                    Err(Error::DegenerateJump(msg)) => {
                        attempts += 1;
                        resamples += 1;
                        if attempts >= MAX_RESAMPLES {
                            return Err(Error::DegenerateJump(msg));
                        }
                    }
                    Err(e) => return Err(e),
                }
            };
            next_jump = t + draw_wait(rng);
        }
        if let Some(p) = propagator.as_mut() {
            p.propagate(&mut psi, t_sample - t);
        }
        t = t_sample;
        psi.check_edges(k)?;
        observer(t, &psi);
    }

    Ok(GrwTrajectory {
        jumps,
        degenerate_resamples: resamples,
        final_state: psi,
    })
}

/// Ensemble estimate of rho(x, y, t) / rho(x, y, 0) for a jump process.
#[derive(Debug, Clone, PartialEq)]
pub struct OffdiagonalEnsemble {
    pub times: Vec<f64>,
    /// Mean of Re[psi(x) psi*(y)] divided by its initial value.
    pub ratios: Vec<f64>,
    /// Standard errors of `ratios`.
    pub std_errors: Vec<f64>,
    /// Jumps per trajectory.
    pub jump_counts: Vec<usize>,
    /// Jump log of every trajectory, in trajectory order.
    pub jumps: Vec<Vec<Jump>>,
}

impl OffdiagonalEnsemble {
    /// Least-squares rate k in ratio ~ exp(-k t), weighting each sample
    /// time by its inverse variance on the log scale. Times where the
    /// ratio is not positive are skipped.
    pub fn fitted_rate(&self) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for ((&t, &r), &se) in self.times.iter().zip(&self.ratios).zip(&self.std_errors) {
            if t <= 0.0 || r <= 0.0 {
                continue;
            }
            let sigma_log = (se / r).max(1e-12);
            let w = 1.0 / (sigma_log * sigma_log);
            num += w * t * -r.ln();
            den += w * t * t;
        }
        num / den
    }
}

/// Runs `n` jump trajectories from `psi0` and tracks the density-matrix
/// element between grid points nearest to `x` and `y`. Trajectory `i`
/// draws from substream `i` (lane 2) of `seed`.
pub fn offdiagonal_ensemble(
    psi0: &GridWavefunction,
    params: &GrwParams,
    config: &GrwRunConfig,
    x: f64,
    y: f64,
    n: usize,
    seed: u64,
) -> Result<OffdiagonalEnsemble> {
    ensure(n > 0, || "ensemble needs at least one trajectory".into())?;
    let (ix, iy) = (psi0.index_near(x), psi0.index_near(y));
    let rho0 = (psi0.amplitudes()[ix] * psi0.amplitudes()[iy].conj()).re;
    ensure(rho0.abs() > 0.0, || format!("initial rho({x}, {y}) vanishes"))?;
    let runs = crate::stats::run_ensemble(n, |i| {
        let mut rng = NoiseStream::new(seed, crate::noise::substream(i, 2));
        let mut values = Vec::with_capacity(config.n_samples() + 1);
        let mut times = Vec::with_capacity(config.n_samples() + 1);
        let tr = evolve_grw(psi0, params, config, &mut rng, |t, psi| {
            times.push(t);
            values.push((psi.amplitudes()[ix] * psi.amplitudes()[iy].conj()).re / rho0);
        })?;
        Ok::<_, Error>((times, values, tr.jumps))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let times = runs[0].0.clone();
    let mut ratios = Vec::with_capacity(times.len());
    let mut std_errors = Vec::with_capacity(times.len());
    for k in 0..times.len() {
        let acc: crate::stats::Accumulator = runs.iter().map(|r| r.1[k]).collect();
        ratios.push(acc.mean());
        std_errors.push(acc.std_error());
    }
    let jumps: Vec<Vec<Jump>> = runs.into_iter().map(|r| r.2).collect();
    Ok(OffdiagonalEnsemble {
        times,
        ratios,
        std_errors,
        jump_counts: jumps.iter().map(|j| j.len()).collect(),
        jumps,
    })
}

/// Real two-peak superposition of Gaussians of width `sigma` at +-d/2.
pub fn two_peak_state(grid: crate::grid::GridSpec, separation: f64, sigma: f64) -> Result<GridWavefunction> {
    ensure_positive("sigma", sigma)?;
    let h = 0.5 * separation;
    let mut psi = GridWavefunction::from_fn(grid, |x| {
        let a = ((x - h) / sigma).powi(2);
        let b = ((x + h) / sigma).powi(2);
        Complex64::new((-0.25 * a).exp() + (-0.25 * b).exp(), 0.0)
    });
    psi.normalize()?;
    Ok(psi)
}
