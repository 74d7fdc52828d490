use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::constants::HBAR;
use crate::error::{ensure, Error, Result};
use crate::noise::IncrementSource;

/// Largest supported Hilbert-space dimension.
pub const MAX_DIMENSION: usize = 64;

/// Eigenvalues closer than this are treated as one eigenspace.
const DEGENERACY_TOLERANCE: f64 = 1e-9;

/// Collapse driven by a single self-adjoint operator `A`:
///
/// ```text
/// dpsi = ( -(i/hbar) H - (1/2) [ bR^2 (A - <A>)^2 + bI^2 A^2 ] ) psi dt
///        + bR (A - <A>) psi dW_R + i bI A psi dW_I
/// ```
///
/// The Hamiltonian part is applied exactly, the stochastic part with an
/// Euler–Maruyama step followed by renormalization.
#[derive(Debug, Clone)]
pub struct GenericCollapse {
    dim: usize,
    h_eigen: SymmetricEigen<Complex64, nalgebra::Dyn>,
    a: DMatrix<Complex64>,
    a_sq: DMatrix<Complex64>,
    /// Eigenspace projectors of A with their eigenvalues.
    projectors: Vec<(f64, DMatrix<Complex64>)>,
    beta_r: f64,
    beta_i: f64,
    hbar: f64,
    /// Largest tolerated |norm^2 - 1| before renormalization.
    pub max_norm_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenericTrajectory {
    pub times: Vec<f64>,
    /// <A^2> - <A>^2 at each recorded time.
    pub variances: Vec<f64>,
    /// Weight in each eigenspace of A at each recorded time.
    pub eigenspace_weights: Vec<Vec<f64>>,
    pub final_state: DVector<Complex64>,
}

fn check_hermitian(name: &str, m: &DMatrix<Complex64>) -> Result<()> {
    ensure(m.is_square(), || format!("{name} must be square"))?;
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let asym = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    ensure(asym <= 1e-10 * scale, || format!("{name} is not self-adjoint (deviation {asym:e})"))
}

impl GenericCollapse {
    pub fn new(hamiltonian: DMatrix<Complex64>, a: DMatrix<Complex64>, beta_r: f64, beta_i: f64) -> Result<Self> {
        Self::with_hbar(hamiltonian, a, beta_r, beta_i, HBAR)
    }

    pub fn with_hbar(
        hamiltonian: DMatrix<Complex64>,
        a: DMatrix<Complex64>,
        beta_r: f64,
        beta_i: f64,
        hbar: f64,
    ) -> Result<Self> {
        check_hermitian("hamiltonian", &hamiltonian)?;
        check_hermitian("A", &a)?;
        let dim = a.nrows();
        ensure(dim >= 1 && dim <= MAX_DIMENSION, || {
            format!("dimension {dim} outside 1..={MAX_DIMENSION}")
        })?;
        ensure(hamiltonian.nrows() == dim, || "H and A dimensions differ".into())?;
        ensure(beta_r.is_finite() && beta_i.is_finite(), || "couplings must be finite".into())?;
        ensure(hbar > 0.0, || "hbar must be positive".into())?;

        let a_eigen = SymmetricEigen::new(a.clone());
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&i, &j| a_eigen.eigenvalues[i].total_cmp(&a_eigen.eigenvalues[j]));
        let mut projectors: Vec<(f64, DMatrix<Complex64>)> = Vec::new();
        for i in order {
            let value = a_eigen.eigenvalues[i];
            let v = a_eigen.eigenvectors.column(i);
            let p = &v * v.adjoint();
            match projectors.last_mut() {
                Some((last, acc)) if (value - *last).abs() <= DEGENERACY_TOLERANCE * (1.0 + value.abs()) => {
                    *acc += p;
                }
                _ => projectors.push((value, p)),
            }
        }
        Ok(Self {
            dim,
            h_eigen: SymmetricEigen::new(hamiltonian),
            a_sq: &a * &a,
            a,
            projectors,
            beta_r,
            beta_i,
            hbar,
            max_norm_drift: 0.1,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Distinct eigenvalues of A, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.projectors.iter().map(|(v, _)| *v).collect()
    }

    /// exp(-i H dt / hbar).
    pub fn unitary(&self, dt: f64) -> DMatrix<Complex64> {
        let v = &self.h_eigen.eigenvectors;
        let phases = DVector::from_iterator(
            self.dim,
            self.h_eigen
                .eigenvalues
                .iter()
                .map(|&e| Complex64::from_polar(1.0, -e * dt / self.hbar)),
        );
        v * DMatrix::from_diagonal(&phases) * v.adjoint()
    }

    fn expectation(&self, op: &DMatrix<Complex64>, psi: &DVector<Complex64>) -> f64 {
        psi.dotc(&(op * psi)).re
    }

    pub fn variance(&self, psi: &DVector<Complex64>) -> f64 {
        let m = self.expectation(&self.a, psi);
        (self.expectation(&self.a_sq, psi) - m * m).max(0.0)
    }

    pub fn eigenspace_weights(&self, psi: &DVector<Complex64>) -> Vec<f64> {
        self.projectors.iter().map(|(_, p)| self.expectation(p, psi)).collect()
    }

    /// Integrates `n_steps` steps of size `dt`, recording every
    /// `record_every` steps (and the last). The real and imaginary
    /// couplings draw from separate increment sources.
    pub fn trajectory(
        &self,
        psi0: &DVector<Complex64>,
        n_steps: usize,
        record_every: usize,
        noise_r: &mut impl IncrementSource,
        noise_i: &mut impl IncrementSource,
    ) -> Result<GenericTrajectory> {
        ensure(psi0.len() == self.dim, || {
            format!("state has dimension {}, operators {}", psi0.len(), self.dim)
        })?;
        let n0 = psi0.norm_squared();
        if (n0 - 1.0).abs() > 1e-10 {
            return Err(Error::Contract(format!("initial state not normalized (norm^2 = {n0})")));
        }
        let dt = noise_r.dt();
        ensure((noise_i.dt() / dt - 1.0).abs() < 1e-12, || "noise sources must share dt".into())?;
        let u = self.unitary(dt);
        let record_every = record_every.max(1);
        let mut psi = psi0.clone();
        let mut out = GenericTrajectory {
            times: vec![0.0],
            variances: vec![self.variance(&psi)],
            eigenspace_weights: vec![self.eigenspace_weights(&psi)],
            final_state: psi.clone(),
        };
        let (br, bi) = (self.beta_r, self.beta_i);
        let i = Complex64::i();
        for step in 1..=n_steps {
            let dwr = noise_r.next_increment().ok_or(Error::NoiseExhausted(step - 1))?;
            let dwi = if bi != 0.0 {
                noise_i.next_increment().ok_or(Error::NoiseExhausted(step - 1))?
            } else {
                0.0
            };
            psi = &u * psi;
            let mean = self.expectation(&self.a, &psi);
            let a_psi = &self.a * &psi;
            let shifted = &a_psi - &psi * Complex64::from(mean);
            let shifted_sq = &self.a * &shifted - &shifted * Complex64::from(mean);
            let a_sq_psi = &self.a * &a_psi;
            let increment = (shifted_sq * Complex64::from(br * br) + a_sq_psi * Complex64::from(bi * bi))
                * Complex64::from(-0.5 * dt)
                + shifted * Complex64::from(br * dwr)
                + a_psi * (i * bi * dwi);
            psi += increment;
            let n2 = psi.norm_squared();
            let drift = (n2 - 1.0).abs();
            if !n2.is_finite() || drift > self.max_norm_drift {
                return Err(Error::StepSize {
                    step,
                    drift,
                    tolerance: self.max_norm_drift,
                });
            }
            psi.unscale_mut(n2.sqrt());
            if step % record_every == 0 || step == n_steps {
                out.times.push(step as f64 * dt);
                out.variances.push(self.variance(&psi));
                out.eigenspace_weights.push(self.eigenspace_weights(&psi));
            }
        }
        out.final_state = psi;
        Ok(out)
    }
}

/// Deterministic envelope V0 / (1 + 4 bR^2 V0 t) that bounds the ensemble
/// mean of the variance when H commutes with A.
pub fn variance_envelope(v0: f64, beta_r: f64, t: f64) -> f64 {
    v0 / (1.0 + 4.0 * beta_r * beta_r * v0 * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{substream, StreamingIncrements};
    use crate::stats::{run_ensemble, Accumulator};

    fn diag(values: &[f64]) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&v| Complex64::from(v))))
    }

    fn state(values: &[Complex64]) -> DVector<Complex64> {
        DVector::from_column_slice(values)
    }

    #[test]
    fn rejects_bad_operators() {
        let mut h = diag(&[0.0, 1.0]);
        h[(0, 1)] = Complex64::new(0.0, 1.0);
        assert!(GenericCollapse::with_hbar(h, diag(&[1.0, -1.0]), 1.0, 0.0, 1.0).is_err());
        assert!(GenericCollapse::with_hbar(diag(&[0.0; 3]), diag(&[1.0, -1.0]), 1.0, 0.0, 1.0).is_err());
        assert!(GenericCollapse::with_hbar(diag(&[0.0; 65]), diag(&[0.0; 65]), 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn degenerate_eigenspaces_are_merged() {
        let g = GenericCollapse::with_hbar(diag(&[0.0; 3]), diag(&[2.0, -1.0, 2.0]), 1.0, 0.0, 1.0).unwrap();
        assert_eq!(g.eigenvalues().len(), 2);
        let s = 1.0 / 3f64.sqrt();
        let psi = state(&[Complex64::from(s); 3]);
        let w = g.eigenspace_weights(&psi);
        assert!((w[0] - 1.0 / 3.0).abs() < 1e-12 && (w[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn unitary_limit() {
        // sigma_x Hamiltonian: Rabi oscillation between the A eigenstates
        let mut h = DMatrix::zeros(2, 2);
        h[(0, 1)] = Complex64::from(1.0);
        h[(1, 0)] = Complex64::from(1.0);
        let g = GenericCollapse::with_hbar(h, diag(&[1.0, -1.0]), 0.0, 0.0, 1.0).unwrap();
        let psi0 = state(&[Complex64::from(1.0), Complex64::from(0.0)]);
        let mut nr = StreamingIncrements::new(1, 0, 1e-3).unwrap();
        let mut ni = StreamingIncrements::new(1, 1, 1e-3).unwrap();
        let tr = g.trajectory(&psi0, 1000, 100, &mut nr, &mut ni).unwrap();
        for (t, w) in tr.times.iter().zip(&tr.eigenspace_weights) {
            // weight on eigenvalue +1 (the second projector) is cos^2 t
            assert!((w[1] - t.cos().powi(2)).abs() < 1e-9, "t={t}");
        }

        // commuting H: variance constant
        let g = GenericCollapse::with_hbar(diag(&[0.3, -2.0]), diag(&[1.0, -1.0]), 0.0, 0.0, 1.0).unwrap();
        let psi0 = state(&[Complex64::from(0.7f64.sqrt()), Complex64::new(0.0, 0.3f64.sqrt())]);
        let tr = g.trajectory(&psi0, 500, 50, &mut nr, &mut ni).unwrap();
        for v in &tr.variances {
            assert!((v - tr.variances[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn imaginary_coupling_alone_only_dephases_phases() {
        let g = GenericCollapse::with_hbar(diag(&[0.0, 0.0]), diag(&[1.0, -1.0]), 0.0, 1.0, 1.0).unwrap();
        let psi0 = state(&[Complex64::from(0.6), Complex64::from(0.8)]);
        let mut nr = StreamingIncrements::new(2, 0, 1e-4).unwrap();
        let mut ni = StreamingIncrements::new(2, 1, 1e-4).unwrap();
        let tr = g.trajectory(&psi0, 2000, 2000, &mut nr, &mut ni).unwrap();
        let w = tr.eigenspace_weights.last().unwrap();
        assert!((w[1] - 0.36).abs() < 1e-2, "{w:?}");
    }

    #[test]
    fn variance_decays_below_envelope() {
        let g = GenericCollapse::with_hbar(diag(&[0.0, 0.0]), diag(&[1.0, -1.0]), 1.0, 0.0, 1.0).unwrap();
        let psi0 = state(&[Complex64::from(0.5f64.sqrt()), Complex64::from(0.5f64.sqrt())]);
        let runs = run_ensemble(400, |i| {
            let mut nr = StreamingIncrements::new(5, substream(i, 0), 1e-3).unwrap();
            let mut ni = StreamingIncrements::new(5, substream(i, 1), 1e-3).unwrap();
            g.trajectory(&psi0, 1000, 100, &mut nr, &mut ni).unwrap()
        });
        let v0 = runs[0].variances[0];
        for k in 0..runs[0].times.len() {
            let acc: Accumulator = runs.iter().map(|r| r.variances[k]).collect();
            let bound = variance_envelope(v0, 1.0, runs[0].times[k]);
            assert!(acc.mean() <= bound + 3.0 * acc.std_error() + 1e-12);
        }
    }
}
