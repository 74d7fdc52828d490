//! Near-field interferometry: Talbot lengths, the gravity-imposed mass
//! limit for a horizontal beam, and the collapse bounds implied by
//! observed interference.
//!
//! cargo run --example talbot_interferometer

use collapse_dynamics::catalog::ExperimentCatalog;
use collapse_dynamics::constants::{AMU, G_EARTH, LAMBDA_CSL};
use collapse_dynamics::csl::cluster_rate;
use collapse_dynamics::interferometry::{
    de_broglie_wavelength, free_fall_speed, interferometric_bound, talbot_length, tli_gravity_limit_earth,
    visibility_damping,
};

fn main() -> collapse_dynamics::Result<()> {
    let d = 100e-9;
    println!("{:>10} {:>12} {:>14} {:>14}", "mass [amu]", "L_T [m]", "fall v [m/s]", "CSL damping");
    for m in [1e4, 1e5, 1e6, 1e7, 1e8] {
        let lt = talbot_length(d, de_broglie_wavelength(m * AMU, 1.0)?)?;
        let damping = visibility_damping(cluster_rate(m as u64, 1, LAMBDA_CSL)?, 1e-2)?;
        println!("{m:>10.0e} {lt:>12.4e} {:>14.3} {:>14.10}", free_fall_speed(lt, G_EARTH)?, damping);
    }
    let lim = tli_gravity_limit_earth(d, 1.0)?;
    println!(
        "\nat 1 m/s the beam is limited to {:.2e} amu (L_T = {:.3} m, fall speed {:.2} m/s)",
        lim.max_mass / AMU,
        lim.talbot_length,
        lim.fall_speed
    );
    println!("\nbounds from interference experiments:");
    for e in &ExperimentCatalog::builtin().experiments {
        println!(
            "  {:<40} n = {:>8}, t = {:.2e} s: lambda < {:.2e} s^-1",
            e.name,
            e.nucleon_count,
            e.superposition_time,
            interferometric_bound(e.nucleon_count, e.superposition_time)?
        );
    }
    Ok(())
}
