use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::HBAR;
use crate::error::{ensure, ensure_positive, Error, Result};

/// Lowest accepted first-passage threshold.
pub const MIN_THRESHOLD: f64 = 5.0;

/// Default first-passage threshold.
pub const DEFAULT_THRESHOLD: f64 = 35.0;

/// A pointer of mass `pointer_mass` coupled for a time `t_interaction` to a
/// two-outcome observable, with product coupling `kappa_hbar` (velocity
/// imparted to the pointer) and initial amplitudes `c_plus`, `c_minus`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetup {
    pub pointer_mass: f64,
    pub kappa_hbar: f64,
    pub t_interaction: f64,
    pub c_plus: Complex64,
    pub c_minus: Complex64,
    pub b_threshold: f64,
}

impl MeasurementSetup {
    pub fn new(
        pointer_mass: f64,
        kappa_hbar: f64,
        t_interaction: f64,
        c_plus: Complex64,
        c_minus: Complex64,
        b_threshold: f64,
    ) -> Result<Self> {
        ensure_positive("pointer_mass", pointer_mass)?;
        ensure_positive("kappa_hbar", kappa_hbar)?;
        ensure_positive("t_interaction", t_interaction)?;
        let norm = c_plus.norm_sqr() + c_minus.norm_sqr();
        ensure((norm - 1.0).abs() <= 1e-12, || {
            format!("|c+|^2 + |c-|^2 must be 1, got {norm}")
        })?;
        ensure(b_threshold >= MIN_THRESHOLD, || {
            format!("threshold b must be at least {MIN_THRESHOLD}, got {b_threshold}")
        })?;
        Ok(Self {
            pointer_mass,
            kappa_hbar,
            t_interaction,
            c_plus,
            c_minus,
            b_threshold,
        })
    }

    /// 1 g pointer, 1 cm/s coupling for 1 s, equal real amplitudes, b = 35.
    pub fn reference() -> Self {
        let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            pointer_mass: 1e-3,
            kappa_hbar: 1e-2,
            t_interaction: 1.0,
            c_plus: c,
            c_minus: c,
            b_threshold: DEFAULT_THRESHOLD,
        }
    }

    /// Born weight |c+|^2.
    pub fn p_plus(&self) -> f64 {
        self.c_plus.norm_sqr()
    }

    /// Mass-scaled localization rate for this pointer.
    pub fn lambda(&self, lambda0: f64, m0: f64) -> f64 {
        self.pointer_mass / m0 * lambda0
    }

    /// 2 sqrt(hbar lambda / m) for this pointer.
    pub fn omega(&self, lambda0: f64, m0: f64) -> f64 {
        2.0 * (HBAR * self.lambda(lambda0, m0) / self.pointer_mass).sqrt()
    }
}

/// Separation X_t between the centres of the two pointer components.
///
/// ```text
/// t <= T:  X_t = (2 hbar kappa / w) e^{-wt/2} sin(wt/2)
/// t >= T:  X_t = (2 hbar kappa / w) e^{-wt/2} [ sin(wt/2) - e^{wT/2} sin(w(t-T)/2) ]
/// ```
///
/// The separation obeys a linear deterministic system; no noise is consumed.
pub fn pointer_separation(t: f64, setup: &MeasurementSetup, omega: f64) -> Result<f64> {
    ensure(t.is_finite() && t >= 0.0, || format!("t must be non-negative, got {t}"))?;
    ensure_positive("omega", omega)?;
    let amp = setup.kappa_hbar;
    let half = 0.5 * omega;
    // (2/w) e^{-wt/2} sin(wt/2), written to stay accurate as w -> 0.
    let kernel = |tau: f64| {
        let x = half * tau;
        let sinc = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
        tau * (-x).exp() * sinc
    };
    let tt = setup.t_interaction;
    let value = if t <= tt {
        kernel(t)
    } else {
        // e^{-wt/2} e^{wT/2} = e^{-w(t-T)/2}
        kernel(t) - kernel(t - tt)
    };
    Ok(amp * value)
}

/// s_t = lambda int_0^t X^2 dt' = (lambda hbar^2 kappa^2 / 3) t^3, valid
/// while the pointer is coupled (0 <= t <= T).
pub fn time_change(t: f64, lambda: f64, kappa_hbar: f64, t_interaction: f64) -> Result<f64> {
    ensure(t.is_finite() && t >= 0.0, || format!("t must be non-negative, got {t}"))?;
    ensure_positive("lambda", lambda)?;
    ensure_positive("kappa_hbar", kappa_hbar)?;
    if t > t_interaction {
        return Err(Error::OutOfValidity(format!(
            "time change holds only during the interaction (t = {t} > T = {t_interaction})"
        )));
    }
    Ok(lambda * kappa_hbar * kappa_hbar * t.powi(3) / 3.0)
}

/// Inverse of [`time_change`].
pub fn inverse_time_change(s: f64, lambda: f64, kappa_hbar: f64, t_interaction: f64) -> Result<f64> {
    ensure(s.is_finite() && s >= 0.0, || format!("s must be non-negative, got {s}"))?;
    ensure_positive("lambda", lambda)?;
    ensure_positive("kappa_hbar", kappa_hbar)?;
    let t = (3.0 * s / (lambda * kappa_hbar * kappa_hbar)).cbrt();
    if t > t_interaction {
        return Err(Error::OutOfValidity(format!(
            "s = {s} maps to t = {t} beyond the interaction time {t_interaction}"
        )));
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseTimeChain {
    /// Typical first-passage value of the s-clock, taken as b.
    pub s_col: f64,
    /// Physical collapse time.
    pub t_col: f64,
    /// Pointer separation reached at `t_col`.
    pub separation: f64,
}

/// Composes the typical first passage s ~ b with the inverse time change.
pub fn collapse_time_chain(setup: &MeasurementSetup, lambda0: f64, m0: f64) -> Result<CollapseTimeChain> {
    let lambda = setup.lambda(lambda0, m0);
    let s_col = setup.b_threshold;
    let t_col = inverse_time_change(s_col, lambda, setup.kappa_hbar, setup.t_interaction)?;
    let separation = pointer_separation(t_col, setup, setup.omega(lambda0, m0))?;
    Ok(CollapseTimeChain {
        s_col,
        t_col,
        separation,
    })
}
