//! Spontaneous localization by discrete jumps: a single trajectory's jump
//! log, then the ensemble-averaged decay of the coherence between two
//! peaks compared with the master-equation rate.
//!
//! cargo run --release --example grw_jumps

use collapse_dynamics::grid::GridSpec;
use collapse_dynamics::grw::{
    evolve_grw, offdiag_decay_rate, offdiagonal_ensemble, two_peak_state, GrwHamiltonian, GrwParams, GrwRunConfig,
};
use collapse_dynamics::NoiseStream;

fn main() -> collapse_dynamics::Result<()> {
    // lengths in units of r_C, times in units of 1/lambda
    let d = 2.0;
    let psi0 = two_peak_state(GridSpec::centered(10.0, 512)?, d, 0.2)?;
    let params = GrwParams::new(1.0, 1.0, 1)?;
    let config = GrwRunConfig::new(3.0, 0.1, 1.0, GrwHamiltonian::Frozen)?;

    let mut rng = NoiseStream::new(7, 0);
    let single = evolve_grw(&psi0, &params, &config, &mut rng, |_, _| {})?;
    for jump in &single.jumps {
        println!("jump at t = {:.3}, centre x = {:+.3}", jump.time, jump.center);
    }
    let (q, s) = single.final_state.position_moments();
    println!("final <q> = {q:+.3}, sigma = {s:.3}\n");

    let short = GrwRunConfig::new(1.0, 0.1, 1.0, GrwHamiltonian::Frozen)?;
    let ens = offdiagonal_ensemble(&psi0, &params, &short, -d / 2.0, d / 2.0, 1000, 11)?;
    let rate = offdiag_decay_rate(-d / 2.0, d / 2.0, 1.0, 1.0);
    println!("{:>5} {:>10} {:>10}", "t", "rho ratio", "exp(-rt)");
    for (t, r) in ens.times.iter().zip(&ens.ratios) {
        println!("{t:>5.2} {r:>10.4} {:>10.4}", (-rate * t).exp());
    }
    println!("\nfitted rate {:.4} vs master equation {rate:.4}", ens.fitted_rate());
    Ok(())
}
