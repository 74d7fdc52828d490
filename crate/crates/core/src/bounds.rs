//! Bounds on the collapse rate from physical processes: heating, photon
//! emission, and the tabulated experimental limits.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::catalog::{BoundCatalog, BoundEntry, ReferenceValue};
use crate::constants::{C_LIGHT, EPSILON_0, E_CHARGE, HBAR, K_BOLTZMANN, MU_0, M_NUCLEON};
use crate::error::{ensure, ensure_positive, Error, Result};

/// Seconds in a Julian year.
const YEAR: f64 = 365.25 * 86_400.0;

/// dE/dt = (3/4) lambda hbar^2 M / (r_c^2 m_N^2): mean power deposited in a
/// body of mass M by collapses of rate lambda per nucleon.
pub fn heating_rate(total_mass: f64, r_c: f64, lambda: f64) -> Result<f64> {
    ensure(total_mass >= 0.0, || format!("mass must be non-negative, got {total_mass}"))?;
    ensure_positive("r_c", r_c)?;
    ensure(lambda >= 0.0, || format!("lambda must be non-negative, got {lambda}"))?;
    Ok(0.75 * lambda * HBAR * HBAR * total_mass / (r_c * r_c * M_NUCLEON * M_NUCLEON))
}

/// Energy budget of the ionized intergalactic medium: heating a proton to
/// the observed temperature over the time it has been held there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IgmBudget {
    /// K
    pub temperature: f64,
    /// s
    pub timescale: f64,
}

impl Default for IgmBudget {
    /// 2e4 K maintained over redshifts 4 to 2, about 2.2 Gyr.
    fn default() -> Self {
        Self {
            temperature: 2e4,
            timescale: 2.2e9 * YEAR,
        }
    }
}

impl IgmBudget {
    /// Power per proton the medium can absorb: (3/2) k_B T / timescale.
    pub fn power_per_proton(&self) -> f64 {
        1.5 * K_BOLTZMANN * self.temperature / self.timescale
    }

    /// Rate at which collapse heating alone would exhaust the budget.
    pub fn lambda_bound(&self, r_c: f64) -> Result<f64> {
        Ok(self.power_per_proton() / heating_rate(M_NUCLEON, r_c, 1.0)?)
    }
}

/// e^2 hbar / (2 pi^2 epsilon_0 m0^2 c^3) with m0 the nucleon mass.
pub fn emission_prefactor() -> f64 {
    E_CHARGE * E_CHARGE * HBAR / (2.0 * PI * PI * EPSILON_0 * M_NUCLEON * M_NUCLEON * C_LIGHT.powi(3))
}

/// Same constant via 1/epsilon_0 = mu_0 c^2.
pub fn emission_prefactor_magnetic() -> f64 {
    E_CHARGE * E_CHARGE * HBAR * MU_0 / (2.0 * PI * PI * M_NUCLEON * M_NUCLEON * C_LIGHT)
}

/// Photons emitted per unit time and unit photon momentum k by a free
/// charged particle: e^2 lambda hbar / (2 pi^2 epsilon_0 m0^2 c^3 k).
pub fn photon_emission_rate_free(k: f64, lambda: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("photon momentum k must be positive, got {k}")));
    }
    ensure(lambda >= 0.0, || format!("lambda must be non-negative, got {lambda}"))?;
    Ok(emission_prefactor() * lambda / k)
}

/// 2 [1 - (1 + (k a0 / 2)^2)^{-2}]: suppression of emission from a bound
/// electron relative to a free one.
pub fn hydrogen_emission_factor(k: f64, a0_bohr: f64) -> f64 {
    let u = 0.5 * k * a0_bohr;
    2.0 * (1.0 - (1.0 + u * u).powi(-2))
}

/// Emission rate from a hydrogen atom.
pub fn photon_emission_rate_hydrogen(k: f64, lambda: f64, a0_bohr: f64) -> Result<f64> {
    ensure_positive("a0_bohr", a0_bohr)?;
    Ok(hydrogen_emission_factor(k, a0_bohr) * photon_emission_rate_free(k, lambda)?)
}

/// Multiplier gamma(omega_k) applied to an emission rate when the noise
/// has spectrum `spectrum`.
pub fn colored_noise_multiplier(spectrum: impl Fn(f64) -> f64, omega_k: f64) -> Result<f64> {
    ensure(omega_k.is_finite() && omega_k >= 0.0, || format!("frequency must be non-negative, got {omega_k}"))?;
    let v = spectrum(omega_k);
    ensure(v.is_finite() && v >= 0.0, || format!("spectrum returned {v} at {omega_k}"))?;
    Ok(v)
}

/// Flat spectrum.
pub fn white_noise(_omega: f64) -> f64 {
    1.0
}

/// Flat spectrum up to `cutoff`, zero above.
pub fn hard_cutoff(cutoff: f64) -> impl Fn(f64) -> f64 {
    move |omega| if omega <= cutoff { 1.0 } else { 0.0 }
}

/// Orders of magnitude separating a bound from a reference value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "orders")]
pub enum Distance {
    Orders(i32),
    /// The bound lies below the reference value.
    Excluded,
}

impl std::fmt::Display for Distance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Orders(n) => write!(f, "{n}"),
            Self::Excluded => f.write_str("Excluded"),
        }
    }
}

/// round(log10(bound / reference)); negative values mean excluded.
pub fn order_distance(bound: f64, reference: f64) -> Result<Distance> {
    ensure_positive("bound", bound)?;
    ensure_positive("reference", reference)?;
    let d = (bound / reference).log10().round() as i32;
    Ok(if d < 0 { Distance::Excluded } else { Distance::Orders(d) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub name: String,
    pub lambda_max: f64,
    pub category: crate::catalog::BoundCategory,
    /// One entry per reference value, in catalog order.
    pub distances: Vec<Distance>,
}

/// Distance of every bound from every reference value.
pub fn bounds_table(catalog: &BoundCatalog) -> Result<Vec<TableRow>> {
    catalog
        .bounds
        .iter()
        .map(|b| {
            Ok(TableRow {
                name: b.name.clone(),
                lambda_max: b.lambda_max,
                category: b.category,
                distances: catalog
                    .references
                    .iter()
                    .map(|r| order_distance(b.lambda_max, r.lambda))
                    .collect::<Result<_>>()?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "by")]
pub enum ExclusionStatus {
    Allowed,
    /// Excluded; names the strongest (smallest) bound that is exceeded.
    ExcludedBy(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExclusionPoint {
    pub lambda: f64,
    pub status: ExclusionStatus,
    /// Bounds exceeded at this lambda.
    pub n_exceeded: usize,
    /// round(log10(lambda / reference)) for each reference value.
    pub reference_orders: Vec<i32>,
}

/// Classifies each lambda in `lambda_grid` against the catalog.
pub fn exclusion_map(bounds: &[BoundEntry], lambda_grid: &[f64], references: &[ReferenceValue]) -> Result<Vec<ExclusionPoint>> {
    ensure(!bounds.is_empty(), || "catalog is empty".into())?;
    let binding = bounds
        .iter()
        .min_by(|a, b| a.lambda_max.total_cmp(&b.lambda_max))
        .expect("nonempty");
    lambda_grid
        .iter()
        .map(|&lambda| {
            ensure_positive("lambda", lambda)?;
            let n_exceeded = bounds.iter().filter(|b| lambda > b.lambda_max).count();
            let status = if lambda > binding.lambda_max {
                ExclusionStatus::ExcludedBy(binding.name.clone())
            } else {
                ExclusionStatus::Allowed
            };
            Ok(ExclusionPoint {
                lambda,
                status,
                n_exceeded,
                reference_orders: references
                    .iter()
                    .map(|r| (lambda / r.lambda).log10().round() as i32)
                    .collect(),
            })
        })
        .collect()
}

/// `n` points spaced evenly in log10 between `lo` and `hi`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    ensure_positive("lo", lo)?;
    ensure(hi > lo && n >= 2, || "need hi > lo and at least two points".into())?;
    let (a, b) = (lo.log10(), hi.log10());
    Ok((0..n).map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{BOHR_RADIUS, LAMBDA_GRW, R_C};
    use proptest::prelude::*;

    #[test]
    fn heating_scaling() {
        assert_eq!(heating_rate(1.0, R_C, 0.0).unwrap(), 0.0);
        let a = heating_rate(1.0, R_C, 1e-8).unwrap();
        assert!((heating_rate(2.0, R_C, 1e-8).unwrap() / a - 2.0).abs() < 1e-15);
        // units: J s^-1 from (J s)^2 kg / (m^2 kg^2) s^-1
        assert!(a > 0.0);
    }

    #[test]
    fn igm_budget_gives_order_1e_minus_8() {
        let lam = IgmBudget::default().lambda_bound(R_C).unwrap();
        assert!(lam > 1e-9 && lam < 1e-7, "{lam:e}");
    }

    #[test]
    fn emission_prefactor_two_routes() {
        let a = emission_prefactor();
        let b = emission_prefactor_magnetic();
        assert!((a / b - 1.0).abs() < 1e-10, "{}", a / b - 1.0);
        let r = photon_emission_rate_free(1.0, LAMBDA_GRW).unwrap();
        assert!((r / (a * LAMBDA_GRW) - 1.0).abs() < 1e-15);
        assert!((photon_emission_rate_free(2.0, 1.0).unwrap() * 2.0 / photon_emission_rate_free(1.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(photon_emission_rate_free(0.0, 1.0), Err(Error::Domain(_))));
        assert!(photon_emission_rate_free(-1.0, 1.0).is_err());
    }

    #[test]
    fn hydrogen_factor_limits() {
        assert!(hydrogen_emission_factor(1e-9, BOHR_RADIUS) < 1e-30);
        assert!((hydrogen_emission_factor(1e6 / BOHR_RADIUS, BOHR_RADIUS) - 2.0).abs() < 1e-10);
        assert!((hydrogen_emission_factor(2.0 / BOHR_RADIUS, BOHR_RADIUS) - 1.5).abs() < 1e-12);
        let k = 1e10;
        let h = photon_emission_rate_hydrogen(k, 1.0, BOHR_RADIUS).unwrap();
        assert!(h < 2.0 * photon_emission_rate_free(k, 1.0).unwrap());
    }

    proptest! {
        #[test]
        fn emission_positive_and_linear(k in 1e-3f64..1e12, lam in 1e-20f64..1.0) {
            let r = photon_emission_rate_hydrogen(k, lam, BOHR_RADIUS).unwrap();
            prop_assert!(r >= 0.0);
            let r2 = photon_emission_rate_hydrogen(k, 2.0 * lam, BOHR_RADIUS).unwrap();
            prop_assert!((r2 - 2.0 * r).abs() <= 1e-12 * r2.abs());
        }

        #[test]
        fn exclusion_monotone(a in -20.0f64..2.0, b in -20.0f64..2.0) {
            let cat = BoundCatalog::builtin();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let pts = exclusion_map(&cat.bounds, &[10f64.powf(lo), 10f64.powf(hi)], &cat.references).unwrap();
            if pts[0].status != ExclusionStatus::Allowed {
                prop_assert!(pts[1].status != ExclusionStatus::Allowed);
            }
            prop_assert!(pts[0].n_exceeded <= pts[1].n_exceeded);
        }
    }

    #[test]
    fn noise_spectra() {
        for w in [0.0, 1e3, 1e20] {
            assert_eq!(colored_noise_multiplier(white_noise, w).unwrap(), 1.0);
        }
        let cut = hard_cutoff(1e18);
        assert_eq!(colored_noise_multiplier(&cut, 1e19).unwrap(), 0.0);
        assert_eq!(colored_noise_multiplier(&cut, 1e17).unwrap(), 1.0);
        assert!(colored_noise_multiplier(|_| -1.0, 1.0).is_err());
    }

    #[test]
    fn distances() {
        assert_eq!(order_distance(1e-11, 2.2e-17).unwrap(), Distance::Orders(6));
        assert_eq!(order_distance(1e-11, 1e-9).unwrap(), Distance::Excluded);
        assert_eq!(order_distance(1e-5, 1e-9).unwrap(), Distance::Orders(4));
        assert_eq!(order_distance(1e-9, 1e-9).unwrap(), Distance::Orders(0));
        assert_eq!(Distance::Excluded.to_string(), "Excluded");
    }

    #[test]
    fn table_rows() {
        let rows = bounds_table(&BoundCatalog::builtin()).unwrap();
        let expect = [
            (12, Some(4)),
            (14, Some(6)),
            (6, None),
            (18, Some(10)),
            (17, Some(9)),
            (8, Some(0)),
            (15, Some(7)),
        ];
        for (row, (c, a)) in rows.iter().zip(expect) {
            assert_eq!(row.distances[0], Distance::Orders(c), "{}", row.name);
            let adler = a.map(Distance::Orders).unwrap_or(Distance::Excluded);
            assert_eq!(row.distances[1], adler, "{}", row.name);
        }
    }

    #[test]
    fn map_points() {
        let cat = BoundCatalog::builtin();
        let grid = log_grid(1e-20, 1e2, 23).unwrap();
        let map = exclusion_map(&cat.bounds, &grid, &cat.references).unwrap();
        assert_eq!(map[3].status, ExclusionStatus::Allowed);
        assert_eq!(map[3].reference_orders[0], 0);
        assert_eq!(
            map[11].status,
            ExclusionStatus::ExcludedBy("spontaneous x-ray emission from Ge".into())
        );
        assert!(exclusion_map(&[], &grid, &cat.references).is_err());
    }
}
