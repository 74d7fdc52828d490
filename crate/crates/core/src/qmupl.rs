//! QMUPL dynamics: the position-localizing stochastic Schrödinger equation
//!
//! ```text
//! dpsi = [ -(i/hbar) H dt + sqrt(lambda) (q - <q>) dW - (lambda/2) (q - <q>)^2 dt ] psi
//! ```
//!
//! in its closed Gaussian sector and on a grid, plus the spread formulas and
//! the ensemble-level position-decoherence factor.
//!
//! Both integrators depend on the physical parameters only through
//! `hbar / m` and `lambda`, so a run may be carried out in SI units or in
//! the dimensionless units produced by [`QmuplRunConfig::nondimensionalize`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::HBAR;
use crate::error::{ensure, ensure_positive, Error, Result};
use crate::gaussian::GaussianState;
use crate::grid::{FreePropagator, GridWavefunction};
use crate::model::CollapseModelParams;
use crate::noise::NoisePath;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Hamiltonian {
    /// H = p^2 / 2m
    Free,
    /// H = p^2 / 2m + m omega^2 q^2 / 2
    Harmonic { omega_trap: f64 },
    /// H neglected: only the collapse terms act.
    Frozen,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QmuplRunConfig {
    pub mass: f64,
    /// m^-2 s^-1, already mass-scaled.
    pub lambda: f64,
    pub t_final: f64,
    pub dt: f64,
    pub hamiltonian: Hamiltonian,
    pub hbar: f64,
}

/// Length and time units of a dimensionless run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaturalScales {
    pub length: f64,
    pub time: f64,
    pub mass: f64,
}

impl QmuplRunConfig {
    pub fn new(mass: f64, lambda: f64, t_final: f64, dt: f64, hamiltonian: Hamiltonian) -> Result<Self> {
        Self::with_hbar(mass, lambda, t_final, dt, hamiltonian, HBAR)
    }

    pub fn with_hbar(
        mass: f64,
        lambda: f64,
        t_final: f64,
        dt: f64,
        hamiltonian: Hamiltonian,
        hbar: f64,
    ) -> Result<Self> {
        ensure_positive("mass", mass)?;
        ensure_positive("hbar", hbar)?;
        ensure_positive("t_final", t_final)?;
        ensure_positive("dt", dt)?;
        ensure(lambda.is_finite() && lambda >= 0.0, || {
            format!("lambda must be non-negative, got {lambda}")
        })?;
        ensure(dt <= t_final / 100.0 * (1.0 + 1e-12), || {
            format!("dt = {dt} must be at most t_final/100 = {}", t_final / 100.0)
        })?;
        if let Hamiltonian::Harmonic { omega_trap } = hamiltonian {
            ensure_positive("omega_trap", omega_trap)?;
        }
        Ok(Self {
            mass,
            lambda,
            t_final,
            dt,
            hamiltonian,
            hbar,
        })
    }

    /// lambda = (m / m0) lambda0 taken from the model parameters.
    pub fn from_params(
        params: &CollapseModelParams,
        mass: f64,
        t_final: f64,
        dt: f64,
        hamiltonian: Hamiltonian,
    ) -> Result<Self> {
        Self::new(mass, params.lambda_for_mass(mass), t_final, dt, hamiltonian)
    }

    pub fn hbar_over_m(&self) -> f64 {
        self.hbar / self.mass
    }

    pub fn n_steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    /// Collapse frequency 2 sqrt(hbar lambda / m) of this particle.
    pub fn omega(&self) -> f64 {
        2.0 * (self.hbar_over_m() * self.lambda).sqrt()
    }

    /// The same run expressed with x' = x / L, t' = t / T and unit mass.
    /// The dimensionless equation keeps its form with
    /// hbar' = hbar T / (m L^2) and lambda' = lambda L^2 T.
    pub fn nondimensionalize(&self, scales: NaturalScales) -> Result<Self> {
        let NaturalScales { length, time, .. } = scales;
        let hamiltonian = match self.hamiltonian {
            Hamiltonian::Harmonic { omega_trap } => Hamiltonian::Harmonic {
                omega_trap: omega_trap * time,
            },
            h => h,
        };
        Self::with_hbar(
            1.0,
            self.lambda * length * length * time,
            self.t_final / time,
            self.dt / time,
            hamiltonian,
            self.hbar * time / (self.mass * length * length),
        )
    }

    /// Characteristic scales: initial spread for length, 1/omega for time.
    pub fn natural_scales(&self, sigma0: f64) -> NaturalScales {
        let omega = self.omega();
        let time = if omega > 0.0 { 1.0 / omega } else { self.t_final };
        NaturalScales {
            length: sigma0,
            time,
            mass: self.mass,
        }
    }
}

/// Diffusion and drift coefficients multiplying (q - <q>) dW and
/// (q - <q>)^2 dt. Norm preservation ties them: drift = -diffusion^2 / 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseCoefficients {
    pub diffusion: f64,
    pub drift: f64,
}

pub fn collapse_coefficients(lambda: f64) -> CollapseCoefficients {
    let diffusion = lambda.sqrt();
    CollapseCoefficients {
        diffusion,
        drift: -0.5 * diffusion * diffusion,
    }
}

fn tanh_c(z: Complex64) -> Complex64 {
    if z.re < 0.0 {
        return -tanh_c(-z);
    }
    let e = (-2.0 * z).exp();
    (1.0 - e) / (1.0 + e)
}

/// Closed-form solution of da/dt = lambda - 2 i (hbar/m) a^2.
pub fn riccati_width(a0: Complex64, lambda: f64, hbar_over_m: f64, t: f64) -> Complex64 {
    let c = Complex64::new(0.0, 2.0 * hbar_over_m);
    if lambda == 0.0 {
        return a0 / (1.0 + c * a0 * t);
    }
    // Fixed point s with Re s > 0; the flow relaxes onto it.
    let s = (Complex64::new(lambda, 0.0) / c).sqrt();
    let s = if s.re < 0.0 { -s } else { s };
    let th = tanh_c(c * s * t);
    s * (a0 + s * th) / (s + a0 * th)
}

fn riccati_rk4(a: Complex64, lambda: f64, hbar_over_m: f64, dt: f64) -> Complex64 {
    let c = Complex64::new(0.0, 2.0 * hbar_over_m);
    let f = |a: Complex64| lambda - c * a * a;
    let k1 = f(a);
    let k2 = f(a + 0.5 * dt * k1);
    let k3 = f(a + 0.5 * dt * k2);
    let k4 = f(a + dt * k3);
    a + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrates the Gaussian-sector equations
///
/// ```text
/// da     = [lambda - (2 i hbar / m) a^2] dt
/// dx_bar = (hbar/m) k_bar dt + sqrt(lambda) / (2 Re a) dW
/// dk_bar = -sqrt(lambda) (Im a / Re a) dW
/// ```
///
/// `a` is advanced with RK4 (it does not see the noise); the means with
/// Euler–Maruyama using `a` at the start of each step. Returns
/// `n_steps + 1` states including the initial one.
pub fn propagate_gaussian(
    config: &QmuplRunConfig,
    init: GaussianState,
    noise: &NoisePath,
) -> Result<Vec<GaussianState>> {
    if config.hamiltonian != Hamiltonian::Free {
        return Err(Error::InvalidArgument(
            "the Gaussian sector is only closed for the free Hamiltonian".into(),
        ));
    }
    init.validate()?;
    let n = config.n_steps();
    check_noise(config, noise, n)?;
    let hm = config.hbar_over_m();
    let sl = config.lambda.sqrt();
    let mut state = init;
    state.log_weight = normalization_weight(state.a_re);
    let mut out = Vec::with_capacity(n + 1);
    out.push(state);
    for (step, &dw) in noise.increments()[..n].iter().enumerate() {
        let a = state.a();
        let x_mean = state.x_mean + hm * state.k_mean * config.dt + sl / (2.0 * a.re) * dw;
        let k_mean = state.k_mean - sl * (a.im / a.re) * dw;
        let a_next = riccati_rk4(a, config.lambda, hm, config.dt);
        if !(a_next.re.is_finite() && a_next.re > 0.0) {
            return Err(Error::NumericFailure {
                step: step + 1,
                detail: format!("Re a became {}", a_next.re),
            });
        }
        state = GaussianState {
            a_re: a_next.re,
            a_im: a_next.im,
            x_mean,
            k_mean,
            log_weight: normalization_weight(a_next.re),
        };
        out.push(state);
    }
    Ok(out)
}

/// log of the prefactor that normalizes exp(-a (x - x0)^2).
fn normalization_weight(a_re: f64) -> f64 {
    0.25 * (2.0 * a_re / std::f64::consts::PI).ln()
}

fn check_noise(config: &QmuplRunConfig, noise: &NoisePath, n: usize) -> Result<()> {
    if (noise.dt() / config.dt - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "noise dt {} differs from run dt {}",
            noise.dt(),
            config.dt
        )));
    }
    if noise.len() < n {
        return Err(Error::NoiseExhausted(noise.len()));
    }
    Ok(())
}

/// Position and momentum spreads for QMUPL Gaussian solutions,
///
/// ```text
/// sigma_q = sqrt( hbar/(m w)   (cosh(wt+phi1) + cos(wt+phi2)) / (sinh(wt+phi1) + sin(wt+phi2)) )
/// sigma_p = sqrt( hbar m w / 2 (cosh(wt+phi1) - cos(wt+phi2)) / (sinh(wt+phi1) + sin(wt+phi2)) )
/// ```
///
/// with w = 2 sqrt(hbar lambda0 / m0). The phases encode the initial
/// condition and are taken as given.
pub fn spread_evolution(
    params: &CollapseModelParams,
    mass: f64,
    phi1: f64,
    phi2: f64,
    t: f64,
) -> Result<(f64, f64)> {
    ensure_positive("mass", mass)?;
    ensure(t.is_finite() && t >= 0.0, || format!("t must be non-negative, got {t}"))?;
    let w = params.qmupl_omega();
    let u = w * t + phi1;
    let v = w * t + phi2;
    // Divide through by cosh(u) so large wt does not overflow.
    let th = u.tanh();
    let sech = 1.0 / u.cosh();
    let den = th + v.sin() * sech;
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::Domain(format!(
            "sinh(wt+phi1) + sin(wt+phi2) must be positive (got {den:e} after scaling)"
        )));
    }
    let num_q = 1.0 + v.cos() * sech;
    let num_p = 1.0 - v.cos() * sech;
    let sigma_q = (HBAR / (mass * w) * num_q / den).sqrt();
    let sigma_p = (HBAR * mass * w / 2.0 * num_p / den).sqrt();
    Ok((sigma_q, sigma_p))
}

/// Late-time spreads sqrt(hbar / m w) and sqrt(hbar m w / 2); their product
/// is hbar / sqrt 2 for every mass.
pub fn asymptotic_spreads(mass: f64, lambda0: f64, m0: f64) -> Result<(f64, f64)> {
    ensure_positive("mass", mass)?;
    ensure_positive("lambda0", lambda0)?;
    ensure_positive("m0", m0)?;
    let w = 2.0 * (HBAR * lambda0 / m0).sqrt();
    Ok(((HBAR / (mass * w)).sqrt(), (HBAR * mass * w / 2.0).sqrt()))
}

/// Scheme for the collapse part of a grid step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollapseScheme {
    /// psi <- [1 + sqrt(lambda) d dW - (lambda/2) d^2 dt] psi, d = q - <q>.
    EulerMaruyama,
    /// psi <- exp[sqrt(lambda) d dW - lambda d^2 dt] psi: the exact Itô
    /// solution of the linear step with <q> frozen. Agrees with
    /// Euler–Maruyama to first order and maps Gaussians onto Gaussians.
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSdeOptions {
    pub scheme: CollapseScheme,
    /// Largest tolerated |norm^2 - 1| before renormalization.
    pub max_norm_drift: f64,
    /// Record moments every this many steps (and at the final step).
    pub record_every: usize,
    /// Keep full wavefunctions every this many steps.
    pub snapshot_every: Option<usize>,
}

impl Default for GridSdeOptions {
    fn default() -> Self {
        Self {
            scheme: CollapseScheme::Exponential,
            max_norm_drift: 0.05,
            record_every: 1,
            snapshot_every: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSample {
    pub step: usize,
    pub t: f64,
    pub mean_q: f64,
    pub sigma_q: f64,
    pub mean_k: f64,
    pub sigma_k: f64,
}

#[derive(Debug, Clone)]
pub struct GridTrajectory {
    pub samples: Vec<GridSample>,
    pub snapshots: Vec<(f64, GridWavefunction)>,
    /// Renormalization factor applied at each step.
    pub corrections: Vec<f64>,
    pub final_state: GridWavefunction,
}

fn sample(step: usize, t: f64, psi: &GridWavefunction) -> GridSample {
    let (mean_q, var_q) = psi.position_moments();
    let (mean_k, var_k) = psi.wavenumber_moments();
    GridSample {
        step,
        t,
        mean_q,
        sigma_q: var_q.sqrt(),
        mean_k,
        sigma_k: var_k.sqrt(),
    }
}

/// Integrates the QMUPL equation for a grid wavefunction.
///
/// Each step applies the collapse multiplier with `<q>` taken at the start
/// of the step, renormalizes (recording the factor), then applies the
/// unitary part exactly: the potential phase followed by the spectral free
/// propagator. The run aborts if the norm drift before renormalization
/// exceeds the tolerance or if probability reaches the outer grid margin.
pub fn integrate_grid_sde(
    config: &QmuplRunConfig,
    psi0: &GridWavefunction,
    noise: &NoisePath,
    options: &GridSdeOptions,
) -> Result<GridTrajectory> {
    if !psi0.is_normalized() {
        return Err(Error::Contract(format!(
            "initial state not normalized (norm^2 = {})",
            psi0.norm_sqr()
        )));
    }
    let n = config.n_steps();
    check_noise(config, noise, n)?;
    let grid = *psi0.grid();
    let xs: Vec<f64> = grid.positions().collect();
    let coeff = collapse_coefficients(config.lambda);
    let dt = config.dt;
    let hm = config.hbar_over_m();
    let mut kinetic = match config.hamiltonian {
        Hamiltonian::Frozen => None,
        _ => Some(FreePropagator::new(&grid, hm)?),
    };
    let potential_phase: Option<Vec<Complex64>> = match config.hamiltonian {
        Hamiltonian::Harmonic { omega_trap } => Some(
            xs.iter()
                .map(|x| Complex64::from_polar(1.0, -0.5 * omega_trap * omega_trap * x * x * dt / hm))
                .collect(),
        ),
        _ => None,
    };

    let record_every = options.record_every.max(1);
    let mut psi = psi0.clone();
    psi.check_edges(0)?;
    let mut samples = vec![sample(0, 0.0, &psi)];
    let mut snapshots = Vec::new();
    if options.snapshot_every.is_some() {
        snapshots.push((0.0, psi.clone()));
    }
    let mut corrections = Vec::with_capacity(n);

    for (idx, &dw) in noise.increments()[..n].iter().enumerate() {
        let step = idx + 1;
        if config.lambda > 0.0 {
            let (mean_q, _) = psi.position_moments();
            for (a, &x) in psi.amplitudes_mut().iter_mut().zip(&xs) {
                let d = x - mean_q;
                let factor = match options.scheme {
                    CollapseScheme::EulerMaruyama => {
                        1.0 + coeff.diffusion * d * dw + coeff.drift * d * d * dt
                    }
                    CollapseScheme::Exponential => {
                        (coeff.diffusion * d * dw + 2.0 * coeff.drift * d * d * dt).exp()
                    }
                };
                *a *= factor;
            }
            let n2 = psi.norm_sqr();
            let drift = (n2 - 1.0).abs();
            if !n2.is_finite() || drift > options.max_norm_drift {
                return Err(Error::StepSize {
                    step,
                    drift,
                    tolerance: options.max_norm_drift,
                });
            }
            corrections.push(psi.normalize()?);
        } else {
            corrections.push(1.0);
        }
        if let Some(phase) = &potential_phase {
            for (a, p) in psi.amplitudes_mut().iter_mut().zip(phase) {
                *a *= p;
            }
        }
        if let Some(prop) = kinetic.as_mut() {
            prop.propagate(&mut psi, dt);
        }
        psi.check_edges(step)?;
        let t = step as f64 * dt;
        if step % record_every == 0 || step == n {
            samples.push(sample(step, t, &psi));
        }
        if let Some(every) = options.snapshot_every {
            if step % every.max(1) == 0 || step == n {
                snapshots.push((t, psi.clone()));
            }
        }
    }

    Ok(GridTrajectory {
        samples,
        snapshots,
        corrections,
        final_state: psi,
    })
}

/// rho_t(x, y) = rho_0(x, y) exp(-lambda N (x - y)^2 t / 2), free evolution
/// neglected.
pub fn master_equation_decay(
    rho0_offdiag: f64,
    x: f64,
    y: f64,
    lambda: f64,
    n_particles: u64,
    t: f64,
) -> Result<f64> {
    ensure(t.is_finite() && t >= 0.0, || format!("t must be non-negative, got {t}"))?;
    ensure(n_particles >= 1, || "need at least one particle".into())?;
    ensure(lambda.is_finite() && lambda >= 0.0, || {
        format!("lambda must be non-negative, got {lambda}")
    })?;
    Ok(rho0_offdiag * (-lambda * n_particles as f64 * (x - y).powi(2) * t / 2.0).exp())
}
