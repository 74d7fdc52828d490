//! CSL collapse rates: amplification with the number of nucleons, the
//! rigid-body rate for spheres, and the saturation beyond r_C.
//!
//! cargo run --example csl_rates

use collapse_dynamics::constants::{GAMMA_CSL, LAMBDA_CSL, R_C};
use collapse_dynamics::csl::{cluster_rate, decay_function, rigid_body_gamma, CslParams, RigidBody, Shape};

fn main() -> collapse_dynamics::Result<()> {
    println!("lambda from gamma = {:.3e} s^-1", CslParams::new(GAMMA_CSL, R_C)?.lambda());
    println!("\nclusters of n nucleons at the enhanced rate 2.2e-10 s^-1:");
    for n in [1u64, 100, 10_000, 1_000_000] {
        println!("  n = {n:>9}: rate = {:.3e} s^-1", cluster_rate(n, 1, 2.2e-10)?);
    }
    println!("\nsingle-nucleon decay function at lambda = {LAMBDA_CSL:e}:");
    for x in [0.1, 1.0, 2.0, 10.0] {
        println!("  |x - y| = {x:>4} r_C: {:.3e} s^-1", decay_function(x * R_C, LAMBDA_CSL, R_C));
    }
    let body = RigidBody::new(2000.0, Shape::Sphere { radius: 1e-6 })?;
    println!("\n1 um silica-density sphere, {:.3e} nucleons:", body.nucleon_count());
    for d in [1e-9, 1e-8, 1e-7, 1e-6, 1e-5] {
        println!("  displacement {d:.0e} m: Gamma = {:.3e} s^-1", rigid_body_gamma(&body, d, GAMMA_CSL)?);
    }
    Ok(())
}
