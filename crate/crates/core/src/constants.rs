//! SI physical constants (CODATA 2018) and the reference parameter values
//! used throughout the collapse-model literature.
//!
//! Every quantity in this crate is a raw SI `f64`. The derived Planck units
//! are computed from `hbar`, `G` and `c`, never typed in separately.

use std::f64::consts::PI;

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant, J s (exact).
pub const PLANCK_H: f64 = 6.626_070_15e-34;
/// Newtonian constant of gravitation, m^3 kg^-1 s^-2.
pub const G_NEWTON: f64 = 6.674_30e-11;
/// Speed of light in vacuum, m/s (exact).
pub const C_LIGHT: f64 = 299_792_458.0;
/// Unified atomic mass unit, kg.
pub const AMU: f64 = 1.660_539_066_60e-27;
/// Nucleon reference mass (the proton mass), kg.
pub const M_NUCLEON: f64 = 1.672_621_923_69e-27;
/// Electron mass, kg.
pub const M_ELECTRON: f64 = 9.109_383_701_5e-31;
/// Standard gravity, m/s^2.
pub const G_EARTH: f64 = 9.806_65;
/// Elementary charge, C (exact).
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Vacuum permeability, N/A^2.
pub const MU_0: f64 = 1.256_637_062_12e-6;
/// Boltzmann constant, J/K (exact).
pub const K_BOLTZMANN: f64 = 1.380_649e-23;
/// Bohr radius, m.
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;

/// GRW localization rate per nucleon, s^-1.
pub const LAMBDA_GRW: f64 = 1e-16;
/// Conventional CSL collapse rate, s^-1.
pub const LAMBDA_CSL: f64 = 2.2e-17;
/// Enhanced rate proposed from latent-image formation: 2.2e-8 with a
/// +-2 decade band. This is the central value.
pub const LAMBDA_ADLER: f64 = 2.2e-8;
/// Lower edge of the enhanced-rate band; reproduces the quoted cluster
/// decay rates for 1e4 and 1e6 nucleon particles.
pub const LAMBDA_ADLER_LOW: f64 = 2.2e-10;
/// Localization / noise correlation length, m.
pub const R_C: f64 = 1e-7;
/// QMUPL collapse strength for a nucleon, m^-2 s^-1.
pub const LAMBDA0_QMUPL: f64 = 1e-2;
/// CSL coupling, m^3 s^-1 (1e-30 cm^3/s).
pub const GAMMA_CSL: f64 = 1e-36;

/// The full constant set, carried by value where a function wants to be
/// explicit about which constants it uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub g_newton: f64,
    pub c: f64,
    pub amu: f64,
    pub m_nucleon: f64,
    pub g_earth: f64,
    pub planck_length: f64,
    pub planck_mass: f64,
    pub e_charge: f64,
    pub epsilon_0: f64,
}

impl PhysicalConstants {
    pub fn si() -> Self {
        Self {
            hbar: HBAR,
            g_newton: G_NEWTON,
            c: C_LIGHT,
            amu: AMU,
            m_nucleon: M_NUCLEON,
            g_earth: G_EARTH,
            planck_length: planck_length(),
            planck_mass: planck_mass(),
            e_charge: E_CHARGE,
            epsilon_0: EPSILON_0,
        }
    }

    pub fn planck_h(&self) -> f64 {
        2.0 * PI * self.hbar
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::si()
    }
}

/// sqrt(hbar G / c^3)
pub fn planck_length() -> f64 {
    (HBAR * G_NEWTON / C_LIGHT.powi(3)).sqrt()
}

/// sqrt(hbar c / G)
pub fn planck_mass() -> f64 {
    (HBAR * C_LIGHT / G_NEWTON).sqrt()
}
