//! Collapse onto the eigenspaces of an arbitrary Hermitian operator. The
//! ensemble variance of A falls below the envelope V0 / (1 + 4 beta^2 V0 t)
//! while the mean eigenspace weights stay at their initial values.
//!
//! cargo run --release --example generic_collapse

use collapse_dynamics::measurement::{variance_envelope, GenericCollapse};
use collapse_dynamics::noise::{substream, StreamingIncrements};
use collapse_dynamics::stats::{run_ensemble, Accumulator};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn main() -> collapse_dynamics::Result<()> {
    let diag = |v: &[f64]| DMatrix::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|&x| Complex64::from(x))));
    // three levels, A has a degenerate eigenvalue
    let h = diag(&[0.0, 0.2, 0.2]);
    let a = diag(&[1.0, -1.0, -1.0]);
    let collapse = GenericCollapse::with_hbar(h, a, 1.0, 0.3, 1.0)?;
    let s = (1.0f64 / 3.0).sqrt();
    let psi0 = DVector::from_element(3, Complex64::from(s));
    let dt = 1e-3;
    let runs = run_ensemble(1000, |i| {
        let mut nr = StreamingIncrements::new(3, substream(i, 0), dt)?;
        let mut ni = StreamingIncrements::new(3, substream(i, 1), dt)?;
        collapse.trajectory(&psi0, 3000, 300, &mut nr, &mut ni)
    })
    .into_iter()
    .collect::<collapse_dynamics::Result<Vec<_>>>()?;

    let v0 = runs[0].variances[0];
    println!("eigenvalues of A: {:?}", collapse.eigenvalues());
    println!("{:>6} {:>10} {:>10} {:>22}", "t", "E[V]", "envelope", "mean eigenspace weights");
    for k in 0..runs[0].times.len() {
        let v: Accumulator = runs.iter().map(|r| r.variances[k]).collect();
        let w: Vec<String> = (0..runs[0].eigenspace_weights[k].len())
            .map(|j| {
                let acc: Accumulator = runs.iter().map(|r| r.eigenspace_weights[k][j]).collect();
                format!("{:.3}", acc.mean())
            })
            .collect();
        let t = runs[0].times[k];
        println!("{t:>6.2} {:>10.4} {:>10.4} {:>22}", v.mean(), variance_envelope(v0, 1.0, t), w.join(" "));
    }
    Ok(())
}
