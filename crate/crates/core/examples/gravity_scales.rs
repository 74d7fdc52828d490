//! Gravity-related localization scales: the Karolyhazy coherence cell, the
//! Diosi critical length and the Schrodinger-Newton self-localization
//! width, which agree within a small factor across many decades of mass.
//!
//! cargo run --example gravity_scales

use collapse_dynamics::constants::{AMU, M_NUCLEON};
use collapse_dynamics::gravity::{karolyhazy_transition, sn_mass_for_width, threshold_widths};

fn main() -> collapse_dynamics::Result<()> {
    println!("{:>10} {:>12} {:>12} {:>12} {:>7}", "mass [kg]", "Karolyhazy", "Diosi", "S-N", "spread");
    let mut m = M_NUCLEON;
    while m < 1e-3 {
        let w = threshold_widths(m)?;
        println!(
            "{m:>10.2e} {:>12.3e} {:>12.3e} {:>12.3e} {:>7.2}",
            w.karolyhazy, w.diosi, w.schrodinger_newton, w.spread()
        );
        m *= 100.0;
    }
    let tr = karolyhazy_transition(1000.0)?;
    println!(
        "\nmicro/macro transition at unit density: a = {:.2e} m, tau = {:.2e} s, m = {:.2e} kg",
        tr.a_tr, tr.tau_tr, tr.m_tr
    );
    println!("mass self-localized to 0.5 um: {:.2e} amu", sn_mass_for_width(0.5e-6)? / AMU);
    Ok(())
}
