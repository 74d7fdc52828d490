//! Near-field matter-wave interferometry: Talbot scales, the gravity
//! ceiling on particle mass, visibility damping and the bound it implies
//! on the collapse rate.

use serde::{Deserialize, Serialize};

use crate::constants::{AMU, G_EARTH, M_NUCLEON, PLANCK_H};
use crate::error::{ensure, ensure_positive, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferometerSpec {
    pub grating_period: f64,
    pub particle_mass: f64,
    pub velocity: f64,
    pub flight_time: f64,
    pub nucleon_count: u64,
}

impl InterferometerSpec {
    pub fn new(grating_period: f64, particle_mass: f64, velocity: f64, flight_time: f64, nucleon_count: u64) -> Result<Self> {
        ensure_positive("grating_period", grating_period)?;
        ensure_positive("particle_mass", particle_mass)?;
        ensure_positive("velocity", velocity)?;
        ensure_positive("flight_time", flight_time)?;
        let implied = particle_mass / M_NUCLEON;
        ensure((nucleon_count as f64 / implied - 1.0).abs() <= 0.01, || {
            format!("nucleon count {nucleon_count} inconsistent with mass (~{implied:.0} nucleons)")
        })?;
        Ok(Self {
            grating_period,
            particle_mass,
            velocity,
            flight_time,
            nucleon_count,
        })
    }

    pub fn de_broglie_wavelength(&self) -> Result<f64> {
        de_broglie_wavelength(self.particle_mass, self.velocity)
    }

    pub fn talbot_length(&self) -> Result<f64> {
        talbot_length(self.grating_period, self.de_broglie_wavelength()?)
    }

    /// Visibility left after the flight given a collapse rate lambda and
    /// any additional decoherence rates.
    pub fn predicted_visibility(&self, lambda: f64, extra_rates: &[f64]) -> Result<f64> {
        let n = self.nucleon_count as f64;
        let rate = lambda * n * n + extra_rates.iter().sum::<f64>();
        visibility_damping(rate, self.flight_time)
    }
}

/// lambda_dB = h / (m v).
pub fn de_broglie_wavelength(mass: f64, velocity: f64) -> Result<f64> {
    ensure_positive("mass", mass)?;
    ensure_positive("velocity", velocity)?;
    Ok(PLANCK_H / (mass * velocity))
}

/// L_T = d^2 / lambda_dB.
pub fn talbot_length(grating_period: f64, lambda_db: f64) -> Result<f64> {
    ensure_positive("grating_period", grating_period)?;
    ensure_positive("lambda_db", lambda_db)?;
    Ok(grating_period * grating_period / lambda_db)
}

/// Speed gained falling from rest through `height`: sqrt(2 g h).
pub fn free_fall_speed(height: f64, g: f64) -> Result<f64> {
    ensure(height >= 0.0, || format!("height must be non-negative, got {height}"))?;
    ensure(g >= 0.0, || format!("g must be non-negative, got {g}"))?;
    Ok((2.0 * g * height).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GravityLimit {
    /// Heaviest particle whose beam is not doubled in speed by gravity over
    /// one Talbot length; infinite without gravity.
    pub max_mass: f64,
    /// Talbot length at that mass.
    pub talbot_length: f64,
    /// Speed gained by free fall over that Talbot length.
    pub fall_speed: f64,
}

/// Mass ceiling for a vertical Talbot–Lau interferometer with beam
/// velocity `v`: the Talbot length grows with mass, and once falling
/// through it adds as much speed as the beam carries,
/// sqrt(v^2 + 2 g L_T) - v = v, i.e. L_T = 3 v^2 / (2 g), the design
/// velocity can no longer be held. With L_T = d^2 m v / h this gives
/// m = 3 h v / (2 g d^2).
pub fn tli_gravity_limit(grating_period: f64, velocity: f64, g: f64) -> Result<GravityLimit> {
    ensure_positive("grating_period", grating_period)?;
    ensure_positive("velocity", velocity)?;
    ensure(g >= 0.0, || format!("g must be non-negative, got {g}"))?;
    if g == 0.0 {
        return Ok(GravityLimit {
            max_mass: f64::INFINITY,
            talbot_length: f64::INFINITY,
            fall_speed: 0.0,
        });
    }
    let l_t = 1.5 * velocity * velocity / g;
    let max_mass = l_t * PLANCK_H / (grating_period * grating_period * velocity);
    Ok(GravityLimit {
        max_mass,
        talbot_length: l_t,
        fall_speed: free_fall_speed(l_t, g)?,
    })
}

/// Same as [`tli_gravity_limit`] with standard gravity.
pub fn tli_gravity_limit_earth(grating_period: f64, velocity: f64) -> Result<GravityLimit> {
    tli_gravity_limit(grating_period, velocity, G_EARTH)
}

/// exp(-Gamma t).
pub fn visibility_damping(gamma: f64, t: f64) -> Result<f64> {
    ensure(t.is_finite() && t >= 0.0, || format!("t must be non-negative, got {t}"))?;
    ensure(gamma >= 0.0, || format!("rate must be non-negative, got {gamma}"))?;
    Ok((-gamma * t).exp())
}

/// lambda <= 1 / (n^2 t): the rate at which a cluster of n nucleons loses
/// an e-fold of visibility in time t.
pub fn interferometric_bound(nucleon_count: u64, superposition_time: f64) -> Result<f64> {
    ensure(nucleon_count >= 1, || "nucleon count must be positive".into())?;
    ensure_positive("superposition_time", superposition_time)?;
    let n = nucleon_count as f64;
    Ok(1.0 / (n * n * superposition_time))
}

/// Bound from a measured visibility V: ln(1/V) / (n^2 t).
pub fn interferometric_bound_from_visibility(nucleon_count: u64, superposition_time: f64, visibility: f64) -> Result<f64> {
    ensure(visibility > 0.0 && visibility < 1.0, || format!("visibility must lie in (0, 1), got {visibility}"))?;
    Ok(-visibility.ln() * interferometric_bound(nucleon_count, superposition_time)?)
}

/// Superposition time implied by a quoted bound: 1 / (n^2 lambda).
pub fn effective_time_for_bound(nucleon_count: u64, lambda_max: f64) -> Result<f64> {
    ensure(nucleon_count >= 1, || "nucleon count must be positive".into())?;
    ensure_positive("lambda_max", lambda_max)?;
    let n = nucleon_count as f64;
    Ok(1.0 / (n * n * lambda_max))
}

/// Particle mass in kg for a mass in atomic mass units.
pub fn amu(mass_amu: f64) -> f64 {
    mass_amu * AMU
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::LAMBDA_CSL;
    use crate::csl::cluster_rate;
    use proptest::prelude::*;

    #[test]
    fn wavelengths() {
        let l6 = de_broglie_wavelength(amu(1e6), 1.0).unwrap();
        assert!((l6 / 3.99e-13 - 1.0).abs() < 0.01, "{l6:e}");
        let l8 = de_broglie_wavelength(amu(1e8), 1.0).unwrap();
        assert!((l8 / 3.99e-15 - 1.0).abs() < 0.01);
        assert!((de_broglie_wavelength(amu(1e6), 2.0).unwrap() * 2.0 / l6 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn talbot_lengths() {
        let d = 100e-9;
        let l6 = talbot_length(d, de_broglie_wavelength(amu(1e6), 1.0).unwrap()).unwrap();
        let l8 = talbot_length(d, de_broglie_wavelength(amu(1e8), 1.0).unwrap()).unwrap();
        assert!((l6 / 0.025 - 1.0).abs() < 0.01, "{l6}");
        assert!((l8 / 2.5 - 1.0).abs() < 0.01, "{l8}");
        let lam = 3e-13;
        assert!((talbot_length(2.0 * d, lam).unwrap() / talbot_length(d, lam).unwrap() - 4.0).abs() < 1e-12);
        assert!((talbot_length(d, lam).unwrap() * lam / (d * d) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gravity_limit() {
        assert!((free_fall_speed(2.5, G_EARTH).unwrap() / 7.0 - 1.0).abs() < 0.02);
        let lim = tli_gravity_limit_earth(100e-9, 1.0).unwrap();
        let m_amu = lim.max_mass / AMU;
        assert!(m_amu > 1e7 / 3.0 && m_amu < 3e7, "{m_amu:e}");
        // at the ceiling, falling through one Talbot length doubles the speed
        let v_end = (1.0 + 2.0 * G_EARTH * lim.talbot_length).sqrt();
        assert!((v_end - 2.0).abs() < 1e-12);
        let none = tli_gravity_limit(100e-9, 1.0, 0.0).unwrap();
        assert_eq!(none.max_mass, f64::INFINITY);
    }

    #[test]
    fn damping() {
        assert_eq!(visibility_damping(0.0, 5.0).unwrap(), 1.0);
        assert!((visibility_damping(2f64.ln(), 1.0).unwrap() - 0.5).abs() < 1e-15);
        let g = cluster_rate(1000, 1, LAMBDA_CSL).unwrap();
        assert!((1.0 - visibility_damping(g, 1e-2).unwrap()) < 1e-10);
    }

    #[test]
    fn bounds() {
        assert_eq!(interferometric_bound(1, 1.0).unwrap(), 1.0);
        let t = effective_time_for_bound(7000, 1e-5).unwrap();
        assert!((t / 2.04e-3 - 1.0).abs() < 0.01);
        assert!((interferometric_bound(7000, t).unwrap() / 1e-5 - 1.0).abs() < 1e-12);
        let b = interferometric_bound(500_000, 1e-2).unwrap();
        assert!((b / 4e-10 - 1.0).abs() < 1e-12);
        let v = interferometric_bound_from_visibility(10, 1.0, (-1f64).exp()).unwrap();
        assert!((v - 0.01).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn bound_decreasing(n in 1u64..1_000_000, t in 1e-4f64..10.0) {
            let b = interferometric_bound(n, t).unwrap();
            prop_assert!(interferometric_bound(n + 1, t).unwrap() < b);
            prop_assert!(interferometric_bound(n, t * 1.01).unwrap() < b);
        }

        #[test]
        fn bound_is_e_fold(n in 1u64..100_000, t in 1e-4f64..10.0) {
            let lam = interferometric_bound(n, t).unwrap();
            let v = visibility_damping(cluster_rate(n, 1, lam).unwrap(), t).unwrap();
            prop_assert!((v - (-1f64).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn spec_validation() {
        let m = 720.0 * AMU;
        let n = (m / M_NUCLEON).round() as u64;
        assert!(InterferometerSpec::new(1e-7, m, 100.0, 1e-3, n).is_ok());
        assert!(InterferometerSpec::new(1e-7, m, 100.0, 1e-3, 2 * n).is_err());
        let s = InterferometerSpec::new(1e-7, m, 100.0, 1e-3, n).unwrap();
        assert!(s.predicted_visibility(LAMBDA_CSL, &[]).unwrap() > 0.999_999);
        assert!(s.predicted_visibility(0.0, &[100.0]).unwrap() < 0.91);
    }
}
