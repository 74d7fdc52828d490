//! Gravity-related coherence scales: the Károlyházy length and time
//! uncertainty, Diósi damping times and critical lengths, and the
//! Schrödinger–Newton coupling.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constants::{C_LIGHT, G_NEWTON, HBAR};
use crate::error::{ensure, ensure_positive, Result};

/// Ratios of M^3 R to hbar^2 / G below this are micro, above its inverse macro.
const REGIME_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodySpec {
    pub mass: f64,
    pub radius: f64,
    pub density: f64,
}

impl BodySpec {
    pub fn new(mass: f64, radius: f64, density: f64) -> Result<Self> {
        ensure_positive("mass", mass)?;
        ensure_positive("radius", radius)?;
        ensure_positive("density", density)?;
        let implied = sphere_mass(density, radius);
        ensure((implied / mass - 1.0).abs() <= 1e-6, || {
            format!("mass {mass} inconsistent with density {density} and radius {radius} (sphere mass {implied})")
        })?;
        Ok(Self { mass, radius, density })
    }

    /// Uniform sphere of given mass and radius.
    pub fn sphere(mass: f64, radius: f64) -> Result<Self> {
        ensure_positive("mass", mass)?;
        ensure_positive("radius", radius)?;
        Ok(Self {
            mass,
            radius,
            density: mass / (4.0 / 3.0 * PI * radius.powi(3)),
        })
    }

    /// Uniform sphere of given density and radius.
    pub fn from_density(density: f64, radius: f64) -> Result<Self> {
        ensure_positive("density", density)?;
        ensure_positive("radius", radius)?;
        Ok(Self {
            mass: sphere_mass(density, radius),
            radius,
            density,
        })
    }
}

fn sphere_mass(density: f64, radius: f64) -> f64 {
    4.0 / 3.0 * PI * density * radius.powi(3)
}

/// hbar^2 / G, the scale separating micro from macro behaviour.
pub fn gravity_scale() -> f64 {
    HBAR * HBAR / G_NEWTON
}

/// Width hbar^2 / (G m^3) at which self-gravity competes with dispersion.
pub fn threshold_width(mass: f64) -> f64 {
    gravity_scale() / mass.powi(3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Micro,
    Transition,
    Macro,
}

impl Regime {
    fn classify(ratio: f64) -> Self {
        if ratio < REGIME_MARGIN {
            Self::Micro
        } else if ratio > 1.0 / REGIME_MARGIN {
            Self::Macro
        } else {
            Self::Transition
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeValue {
    pub value: f64,
    pub regime: Regime,
}

/// Delta s = (G hbar / 2 c^3)^{1/3} s^{1/3}: minimal uncertainty of a
/// length s.
pub fn karolyhazy_uncertainty(s: f64) -> Result<f64> {
    ensure_positive("s", s)?;
    Ok((G_NEWTON * HBAR / (2.0 * C_LIGHT.powi(3)) * s).cbrt())
}

/// Coherence cell a_c: hbar^2 / (G M^3) when hbar^2/G >> M^3 R,
/// (hbar^2/G)^{1/3} R^{2/3} / M when hbar^2/G << M^3 R. The two agree at
/// M^3 R = hbar^2 / G, where a_c = R; in the transition band the formula
/// on the corresponding side of that point is used.
pub fn coherence_cell(body: &BodySpec) -> RegimeValue {
    let ratio = body.mass.powi(3) * body.radius / gravity_scale();
    let value = if ratio < 1.0 {
        threshold_width(body.mass)
    } else {
        gravity_scale().cbrt() * body.radius.powf(2.0 / 3.0) / body.mass
    };
    RegimeValue {
        value,
        regime: Regime::classify(ratio),
    }
}

/// tau_c = m a_c^2 / hbar.
pub fn reduction_time(mass: f64, a_c: f64) -> Result<f64> {
    ensure_positive("mass", mass)?;
    ensure_positive("a_c", a_c)?;
    Ok(mass * a_c * a_c / HBAR)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionScales {
    pub a_tr: f64,
    pub tau_tr: f64,
    pub m_tr: f64,
}

/// The sphere of given density whose coherence cell equals its radius:
/// (4 pi rho / 3)^3 R^10 = hbar^2 / G.
pub fn karolyhazy_transition(density: f64) -> Result<TransitionScales> {
    ensure_positive("density", density)?;
    let k = 4.0 / 3.0 * PI * density;
    let r = (gravity_scale() / k.powi(3)).powf(0.1);
    let m = k * r.powi(3);
    Ok(TransitionScales {
        a_tr: r,
        tau_tr: reduction_time(m, r)?,
        m_tr: m,
    })
}

/// Gravitational interaction energy of two uniform spheres of mass m and
/// radius R whose centres are d apart. For d >= 2R this is -G m^2 / d; for
/// overlapping spheres, with x = d / R,
/// -(G m^2 / R)(6/5 - x^2/2 + 3x^3/16 - x^5/160).
pub fn sphere_interaction_energy(mass: f64, radius: f64, d: f64) -> f64 {
    let gm2 = G_NEWTON * mass * mass;
    let d = d.abs();
    if d >= 2.0 * radius {
        -gm2 / d
    } else {
        let x = d / radius;
        -gm2 / radius * (1.2 - 0.5 * x * x + 3.0 / 16.0 * x.powi(3) - x.powi(5) / 160.0)
    }
}

/// tau_d = hbar / [U(d) - U(0)]; infinite at zero separation.
pub fn diosi_damping_time(body: &BodySpec, separation: f64) -> Result<f64> {
    ensure(separation >= 0.0, || format!("separation must be non-negative, got {separation}"))?;
    let du = sphere_interaction_energy(body.mass, body.radius, separation)
        - sphere_interaction_energy(body.mass, body.radius, 0.0);
    if du <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(HBAR / du)
}

/// Critical superposition size: (hbar^2/G m^3)^{1/4} R^{3/4} when
/// R m^3 >= hbar^2/G, (hbar^2/G m^3)^{1/2} R^{1/2} otherwise. Both equal R
/// at the crossover. Order of magnitude only.
pub fn diosi_critical_length(body: &BodySpec) -> RegimeValue {
    let w = threshold_width(body.mass);
    let ratio = body.radius * body.mass.powi(3) / gravity_scale();
    let value = if ratio >= 1.0 {
        w.powf(0.25) * body.radius.powf(0.75)
    } else {
        (w * body.radius).sqrt()
    };
    RegimeValue {
        value,
        regime: Regime::classify(ratio),
    }
}

/// K = 2 G m^3 l / hbar^2.
pub fn sn_coupling(mass: f64, length: f64) -> Result<f64> {
    ensure_positive("mass", mass)?;
    ensure_positive("length", length)?;
    Ok(2.0 * G_NEWTON * mass.powi(3) * length / (HBAR * HBAR))
}

/// Self-gravity inhibits dispersion once the coupling is of order one.
pub fn dispersion_inhibited(coupling: f64) -> bool {
    coupling >= 1.0
}

/// a0 = 2 hbar^2 / (G m^3).
pub fn sn_ground_width(mass: f64) -> Result<f64> {
    ensure_positive("mass", mass)?;
    Ok(2.0 * threshold_width(mass))
}

/// Mass whose ground-state width is `a0`.
pub fn sn_mass_for_width(a0: f64) -> Result<f64> {
    ensure_positive("a0", a0)?;
    Ok((2.0 * gravity_scale() / a0).cbrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdWidths {
    pub karolyhazy: f64,
    pub diosi: f64,
    pub schrodinger_newton: f64,
}

impl ThresholdWidths {
    /// Largest ratio between any two of the widths.
    pub fn spread(&self) -> f64 {
        let v = [self.karolyhazy, self.diosi, self.schrodinger_newton];
        let max = v.iter().cloned().fold(f64::MIN, f64::max);
        let min = v.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }
}

/// Width below which each model stops treating a particle of this mass as
/// free: the micro coherence cell, the critical length of a body whose
/// radius sits at the crossover, and the ground-state width.
pub fn threshold_widths(mass: f64) -> Result<ThresholdWidths> {
    ensure_positive("mass", mass)?;
    let r_cross = threshold_width(mass);
    let body = BodySpec::sphere(mass, r_cross)?;
    Ok(ThresholdWidths {
        karolyhazy: threshold_width(mass),
        diosi: diosi_critical_length(&body).value,
        schrodinger_newton: sn_ground_width(mass)?,
    })
}
