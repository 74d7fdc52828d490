//! Continuous spontaneous localization: decay rates of spatial
//! superpositions for single particles, clusters and rigid bodies.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constants::{GAMMA_CSL, M_NUCLEON, R_C};
use crate::error::{ensure, ensure_positive, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CslParams {
    /// Collapse strength, m^3 s^-1.
    pub gamma: f64,
    /// Correlation length, m.
    pub r_c: f64,
}

impl CslParams {
    pub fn new(gamma: f64, r_c: f64) -> Result<Self> {
        ensure_positive("gamma", gamma)?;
        ensure_positive("r_c", r_c)?;
        Ok(Self { gamma, r_c })
    }

    /// Parameters reproducing a given single-nucleon rate lambda.
    pub fn from_lambda(lambda: f64, r_c: f64) -> Result<Self> {
        ensure_positive("lambda", lambda)?;
        ensure_positive("r_c", r_c)?;
        Self::new(lambda * (4.0 * PI * r_c * r_c).powf(1.5), r_c)
    }

    pub fn standard() -> Self {
        Self {
            gamma: GAMMA_CSL,
            r_c: R_C,
        }
    }

    /// lambda = gamma / (4 pi r_c^2)^{3/2}.
    pub fn lambda(&self) -> f64 {
        self.gamma / (4.0 * PI * self.r_c * self.r_c).powf(1.5)
    }
}

/// Gamma(x) = lambda [1 - exp(-x^2 / 4 r_c^2)].
pub fn decay_function(x: f64, lambda: f64, r_c: f64) -> f64 {
    -lambda * (-x * x / (4.0 * r_c * r_c)).exp_m1()
}

/// Smeared kernel G(x) = (4 pi r_c^2)^{-3/2} exp(-|x|^2 / 4 r_c^2).
pub fn kernel(x: [f64; 3], r_c: f64) -> f64 {
    let r2 = x.iter().map(|c| c * c).sum::<f64>();
    (4.0 * PI * r_c * r_c).powf(-1.5) * (-r2 / (4.0 * r_c * r_c)).exp()
}

fn diff(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Decay rate of the superposition of configurations x' and x'':
///
/// ```text
/// Gamma = (gamma / 2) sum_ij [ G(x'_i - x'_j) + G(x''_i - x''_j) - 2 G(x'_i - x''_j) ]
/// ```
pub fn many_particle_gamma(x_primed: &[[f64; 3]], x_doubleprimed: &[[f64; 3]], gamma: f64, r_c: f64) -> Result<f64> {
    ensure(x_primed.len() == x_doubleprimed.len(), || {
        format!(
            "configurations differ in particle number ({} vs {})",
            x_primed.len(),
            x_doubleprimed.len()
        )
    })?;
    ensure_positive("r_c", r_c)?;
    ensure(gamma >= 0.0, || format!("gamma must be non-negative, got {gamma}"))?;
    let mut sum = 0.0;
    for &a in x_primed {
        for &b in x_primed {
            sum += kernel(diff(a, b), r_c);
        }
        for &b in x_doubleprimed {
            sum -= 2.0 * kernel(diff(a, b), r_c);
        }
    }
    for &a in x_doubleprimed {
        for &b in x_doubleprimed {
            sum += kernel(diff(a, b), r_c);
        }
    }
    // The sum is a squared norm; clamp round-off below zero.
    Ok((0.5 * gamma * sum).max(0.0))
}

/// Gamma = lambda n^2 N for N well-separated clusters of n nucleons each
/// (nucleons within a cluster closer than r_c). The caller supplies the
/// partition.
pub fn cluster_rate(n_per_cluster: u64, n_clusters: u64, lambda: f64) -> Result<f64> {
    ensure(n_per_cluster >= 1 && n_clusters >= 1, || "cluster counts must be positive".into())?;
    let n = n_per_cluster as f64;
    Ok(lambda * n * n * n_clusters as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallDistanceGamma {
    pub gamma: f64,
    /// False when some displacement exceeds r_c / 10 and the quadratic
    /// expansion is no longer reliable.
    pub in_regime: bool,
}

/// Gamma ~ (lambda / 4 r_c^2) (sum_i d_i)^2 for displacements d_i much
/// smaller than r_c of particles lying within r_c of each other.
pub fn small_distance_gamma(displacements: &[f64], lambda: f64, r_c: f64) -> Result<SmallDistanceGamma> {
    ensure_positive("r_c", r_c)?;
    let s: f64 = displacements.iter().sum();
    Ok(SmallDistanceGamma {
        gamma: lambda * s * s / (4.0 * r_c * r_c),
        in_regime: displacements.iter().all(|d| d.abs() <= r_c / 10.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Shape {
    Sphere { radius: f64 },
    /// Displaced along its normal.
    Slab { thickness: f64, area: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidBody {
    /// Mass density, kg m^-3.
    pub density: f64,
    pub shape: Shape,
}

impl RigidBody {
    pub fn new(density: f64, shape: Shape) -> Result<Self> {
        ensure_positive("density", density)?;
        match shape {
            Shape::Sphere { radius } => ensure_positive("radius", radius)?,
            Shape::Slab { thickness, area } => {
                ensure_positive("thickness", thickness)?;
                ensure_positive("area", area)?;
            }
        }
        Ok(Self { density, shape })
    }

    pub fn volume(&self) -> f64 {
        match self.shape {
            Shape::Sphere { radius } => 4.0 / 3.0 * PI * radius.powi(3),
            Shape::Slab { thickness, area } => thickness * area,
        }
    }

    /// Nucleons per m^3.
    pub fn nucleon_density(&self) -> f64 {
        self.density / M_NUCLEON
    }

    pub fn nucleon_count(&self) -> f64 {
        self.nucleon_density() * self.volume()
    }

    pub fn mass(&self) -> f64 {
        self.density * self.volume()
    }

    /// Volume of the body not shared with its copy displaced by `d`.
    pub fn non_overlap_volume(&self, d: f64) -> f64 {
        let d = d.abs();
        match self.shape {
            Shape::Sphere { radius } => {
                if d >= 2.0 * radius {
                    self.volume()
                } else {
                    self.volume() - sphere_lens_volume(radius, d)
                }
            }
            Shape::Slab { thickness, area } => area * d.min(thickness),
        }
    }
}

/// Intersection volume of two spheres of radius `r` whose centres are `d`
/// apart (d < 2r): pi (4r + d)(2r - d)^2 / 12.
pub fn sphere_lens_volume(r: f64, d: f64) -> f64 {
    if d >= 2.0 * r {
        0.0
    } else {
        PI * (4.0 * r + d) * (2.0 * r - d).powi(2) / 12.0
    }
}

/// Gamma = gamma D n_out for a homogeneous body of nucleon density D
/// displaced rigidly by `displacement`; n_out counts the nucleons outside
/// the overlap region. Valid when r_c is small compared to the body.
pub fn rigid_body_gamma(body: &RigidBody, displacement: f64, gamma: f64) -> Result<f64> {
    ensure(displacement >= 0.0, || format!("displacement must be non-negative, got {displacement}"))?;
    let dens = body.nucleon_density();
    let n_out = dens * body.non_overlap_volume(displacement);
    Ok(gamma * dens * n_out)
}

/// lambda_CM = (M / m0) lambda0.
pub fn amplified_rate(total_mass: f64, lambda0: f64, m0: f64) -> Result<f64> {
    ensure_positive("total_mass", total_mass)?;
    ensure_positive("m0", m0)?;
    ensure(lambda0 >= 0.0, || "lambda0 must be non-negative".into())?;
    Ok(total_mass / m0 * lambda0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::LAMBDA_ADLER_LOW;
    use crate::noise::NoiseStream;
    use proptest::prelude::*;

    #[test]
    fn lambda_from_gamma() {
        let p = CslParams::standard();
        assert!((p.lambda() / 2.24e-17 - 1.0).abs() < 0.01);
        let q = CslParams::from_lambda(p.lambda(), p.r_c).unwrap();
        assert!((q.gamma / p.gamma - 1.0).abs() < 1e-12);
    }

    #[test]
    fn decay_function_limits() {
        assert_eq!(decay_function(0.0, 1.0, 1.0), 0.0);
        assert!((decay_function(1e9, 3.0, 1.0) - 3.0).abs() < 1e-15);
        for x in [1e-3, 0.05, 0.2] {
            let taylor = x * x / 4.0;
            assert!((decay_function(x, 1.0, 1.0) / taylor - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn single_particle_matches_decay_function() {
        let p = CslParams::standard();
        for d in [0.0, 0.3e-7, 1e-7, 5e-7] {
            let g = many_particle_gamma(&[[0.0; 3]], &[[d, 0.0, 0.0]], p.gamma, p.r_c).unwrap();
            let f = decay_function(d, p.lambda(), p.r_c);
            assert!((g - f).abs() <= 1e-12 * p.lambda(), "{g} vs {f}");
        }
    }

    #[test]
    fn colocated_cluster_gives_n_squared() {
        let p = CslParams::standard();
        let n = 50;
        let xp = vec![[0.0; 3]; n];
        let xpp = vec![[1.0, 0.0, 0.0]; n];
        let g = many_particle_gamma(&xp, &xpp, p.gamma, p.r_c).unwrap();
        let expect = cluster_rate(n as u64, 1, p.lambda()).unwrap();
        assert!((g / expect - 1.0).abs() < 1e-6);
        assert_eq!(many_particle_gamma(&xp, &xp, p.gamma, p.r_c).unwrap(), 0.0);
        assert!(many_particle_gamma(&xp, &xpp[..3], p.gamma, p.r_c).is_err());
    }

    #[test]
    fn separated_clusters_add_linearly() {
        let p = CslParams::standard();
        let (n, clusters) = (8u64, 5u64);
        let mut xp = Vec::new();
        for c in 0..clusters {
            for _ in 0..n {
                xp.push([c as f64 * 1e-4, 0.0, 0.0]);
            }
        }
        let xpp: Vec<_> = xp.iter().map(|x| [x[0], 1.0, 0.0]).collect();
        let g = many_particle_gamma(&xp, &xpp, p.gamma, p.r_c).unwrap();
        assert!((g / cluster_rate(n, clusters, p.lambda()).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn figure_rates() {
        let a = cluster_rate(10_000, 1, LAMBDA_ADLER_LOW).unwrap();
        let b = cluster_rate(1_000_000, 1, LAMBDA_ADLER_LOW).unwrap();
        assert!((a - 2.2e-2).abs() < 1e-15);
        assert!((b - 2.2e2).abs() < 1e-10);
        assert_eq!(cluster_rate(1, 1, 3.0).unwrap(), 3.0);
    }

    #[test]
    fn small_distance_expansion() {
        let p = CslParams::standard();
        let lam = p.lambda();
        assert_eq!(small_distance_gamma(&[0.0; 4], lam, p.r_c).unwrap().gamma, 0.0);
        let d = 5e-9;
        let one = small_distance_gamma(&[d], lam, p.r_c).unwrap();
        assert!(one.in_regime);
        assert!((one.gamma - lam * d * d / (4.0 * p.r_c * p.r_c)).abs() < 1e-30);
        let n = 6;
        let many = small_distance_gamma(&vec![d; n], lam, p.r_c).unwrap();
        assert!((many.gamma / one.gamma - (n * n) as f64).abs() < 1e-9);
        assert!(!small_distance_gamma(&[0.5 * p.r_c], lam, p.r_c).unwrap().in_regime);

        // agrees with the full sum for a compact cluster
        let pts: Vec<[f64; 3]> = (0..n).map(|i| [i as f64 * 1e-9, 0.0, 0.0]).collect();
        let moved: Vec<[f64; 3]> = pts.iter().map(|x| [x[0] + d, 0.0, 0.0]).collect();
        let full = many_particle_gamma(&pts, &moved, p.gamma, p.r_c).unwrap();
        assert!((full / many.gamma - 1.0).abs() < 0.05, "{full} vs {}", many.gamma);
    }

    proptest! {
        #[test]
        fn gamma_nonnegative_and_symmetric(coords in proptest::collection::vec(-3e-7f64..3e-7, 12)) {
            let xp: Vec<[f64; 3]> = coords[..6].chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
            let xpp: Vec<[f64; 3]> = coords[6..].chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
            let g1 = many_particle_gamma(&xp, &xpp, GAMMA_CSL, R_C).unwrap();
            let g2 = many_particle_gamma(&xpp, &xp, GAMMA_CSL, R_C).unwrap();
            prop_assert!(g1 >= 0.0);
            prop_assert!((g1 - g2).abs() <= 1e-12 * g1.max(1e-40));
        }

        #[test]
        fn rigid_displacement_monotone(d1 in 0.0f64..4e-7, d2 in 0.0f64..4e-7) {
            let pts: Vec<[f64; 3]> = (0..5).map(|i| [i as f64 * 3e-8, (i % 2) as f64 * 2e-8, 0.0]).collect();
            let shift = |d: f64| pts.iter().map(|x| [x[0] + d, x[1], x[2]]).collect::<Vec<_>>();
            let (lo, hi) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
            let g_lo = many_particle_gamma(&pts, &shift(lo), GAMMA_CSL, R_C).unwrap();
            let g_hi = many_particle_gamma(&pts, &shift(hi), GAMMA_CSL, R_C).unwrap();
            prop_assert!(g_lo <= g_hi * (1.0 + 1e-12) + 1e-40);
        }
    }

    #[test]
    fn rigid_sphere() {
        let body = RigidBody::new(2000.0, Shape::Sphere { radius: 1e-6 }).unwrap();
        assert_eq!(rigid_body_gamma(&body, 0.0, GAMMA_CSL).unwrap(), 0.0);
        let sat = rigid_body_gamma(&body, 2e-6, GAMMA_CSL).unwrap();
        let far = rigid_body_gamma(&body, 7e-6, GAMMA_CSL).unwrap();
        assert_eq!(sat, far);
        assert!((sat / (GAMMA_CSL * body.nucleon_density() * body.nucleon_count()) - 1.0).abs() < 1e-12);
        assert!((body.nucleon_count() - body.mass() / M_NUCLEON).abs() <= 1e-6 * body.nucleon_count());
    }

    #[test]
    fn lens_volume_matches_monte_carlo() {
        // rejection sampling in the bounding box of the first sphere
        let r = 1.0;
        let d = r;
        let mut rng = NoiseStream::new(42, 0);
        let n = 400_000;
        let mut outside = 0usize;
        let mut inside_first = 0usize;
        for _ in 0..n {
            let p = [
                2.0 * rng.uniform() - 1.0,
                2.0 * rng.uniform() - 1.0,
                2.0 * rng.uniform() - 1.0,
            ];
            let r1 = p.iter().map(|c| c * c).sum::<f64>();
            if r1 <= 1.0 {
                inside_first += 1;
                let r2 = (p[0] - d).powi(2) + p[1] * p[1] + p[2] * p[2];
                if r2 > 1.0 {
                    outside += 1;
                }
            }
        }
        let mc = 8.0 * outside as f64 / n as f64;
        let body = RigidBody::new(1.0, Shape::Sphere { radius: r }).unwrap();
        let exact = body.non_overlap_volume(d);
        assert!((mc / exact - 1.0).abs() < 0.005, "{mc} vs {exact}");
        assert!(inside_first > 0);
    }

    #[test]
    fn slab_shape() {
        let body = RigidBody::new(1000.0, Shape::Slab { thickness: 1e-6, area: 1e-8 }).unwrap();
        assert!((body.non_overlap_volume(5e-7) - 5e-15).abs() < 1e-27);
        assert_eq!(body.non_overlap_volume(3e-6), body.volume());
    }

    #[test]
    fn amplification() {
        let m0 = M_NUCLEON;
        assert_eq!(amplified_rate(m0, 1e-2, m0).unwrap(), 1e-2);
        assert!((amplified_rate(2.0 * m0, 1e-2, m0).unwrap() - 2e-2).abs() < 1e-16);
        assert!((amplified_rate(1e24 * m0, 1e-16, m0).unwrap() / 1e8 - 1.0).abs() < 1e-12);
    }
}
