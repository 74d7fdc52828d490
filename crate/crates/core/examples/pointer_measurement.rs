//! A 1 g pointer coupled to a two-outcome observable: the separation of the
//! two pointer branches over the interaction, and the chain from the
//! collapse clock s to laboratory time.
//!
//! cargo run --example pointer_measurement

use collapse_dynamics::constants::{LAMBDA0_QMUPL, M_NUCLEON};
use collapse_dynamics::measurement::{collapse_time_chain, pointer_separation, time_change, MeasurementSetup};

fn main() -> collapse_dynamics::Result<()> {
    let setup = MeasurementSetup::reference();
    let omega = setup.omega(LAMBDA0_QMUPL, M_NUCLEON);
    let lambda = setup.lambda(LAMBDA0_QMUPL, M_NUCLEON);
    println!("pointer mass {} kg, lambda = {lambda:.3e} m^-2 s^-1, omega = {omega:.3e} s^-1", setup.pointer_mass);
    println!("{:>10} {:>14} {:>12}", "t [s]", "separation [m]", "s(t)");
    for t in [1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2] {
        let sep = pointer_separation(t, &setup, omega)?;
        let s = time_change(t, lambda, setup.kappa_hbar, setup.t_interaction)?;
        println!("{t:>10.0e} {sep:>14.4e} {s:>12.4e}");
    }
    let chain = collapse_time_chain(&setup, LAMBDA0_QMUPL, M_NUCLEON)?;
    println!(
        "\nexpected collapse at s = {:.2} -> t = {:.3e} s, branch separation {:.3e} m",
        chain.s_col, chain.t_col, chain.separation
    );
    Ok(())
}
