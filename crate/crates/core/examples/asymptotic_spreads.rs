//! Asymptotic position and momentum spreads of a free particle under QMUPL,
//! and the time the spreads take to settle.
//!
//! cargo run --example asymptotic_spreads

use collapse_dynamics::constants::{HBAR, LAMBDA0_QMUPL, M_NUCLEON};
use collapse_dynamics::qmupl::{asymptotic_spreads, QmuplRunConfig, Hamiltonian};

fn main() -> collapse_dynamics::Result<()> {
    println!("{:>10} {:>12} {:>12} {:>14} {:>12}", "mass [kg]", "sigma_q [m]", "sigma_p", "product/hbar", "1/omega [s]");
    for mass in [M_NUCLEON, 1e-18, 1e-9, 1e-3, 1.0] {
        let (sq, sp) = asymptotic_spreads(mass, LAMBDA0_QMUPL, M_NUCLEON)?;
        let lambda = LAMBDA0_QMUPL * mass / M_NUCLEON;
        let cfg = QmuplRunConfig::new(mass, lambda, 1.0, 0.01, Hamiltonian::Free)?;
        println!(
            "{mass:>10.2e} {sq:>12.3e} {sp:>12.3e} {:>14.6} {:>12.3e}",
            sq * sp / HBAR,
            1.0 / cfg.omega()
        );
    }
    println!("\nThe product stays at 1/sqrt(2) = {:.6} for every mass.", 0.5f64.sqrt());
    Ok(())
}
