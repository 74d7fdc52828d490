//! Integrates one QMUPL noise realization twice: in the exact Gaussian
//! sector (width Riccati equation plus mean SDEs) and on a position grid
//! with a split-step integrator. Both see the same Brownian path.
//!
//! cargo run --release --example gaussian_vs_grid

use collapse_dynamics::gaussian::GaussianState;
use collapse_dynamics::grid::GridSpec;
use collapse_dynamics::qmupl::{integrate_grid_sde, propagate_gaussian, GridSdeOptions, Hamiltonian, QmuplRunConfig};
use collapse_dynamics::NoisePath;

fn main() -> collapse_dynamics::Result<()> {
    // units: hbar = m = 1, unit collapse strength
    let cfg = QmuplRunConfig::with_hbar(1.0, 1.0, 2.0, 1e-3, Hamiltonian::Free, 1.0)?;
    let init = GaussianState::with_spread(1.0, 0.0, 0.5)?;
    let noise = NoisePath::generate(42, cfg.dt, cfg.n_steps())?;

    let sector = propagate_gaussian(&cfg, init, &noise)?;
    let options = GridSdeOptions { record_every: 200, ..Default::default() };
    let grid = GridSpec::centered(30.0, 1024)?;
    let traj = integrate_grid_sde(&cfg, &init.to_grid(grid)?, &noise, &options)?;

    println!("{:>6} {:>11} {:>11} {:>11} {:>11}", "t", "<q> exact", "<q> grid", "sq exact", "sq grid");
    for s in &traj.samples {
        let g = sector[s.step];
        println!("{:>6.2} {:>11.5} {:>11.5} {:>11.5} {:>11.5}", s.t, g.x_mean, s.mean_q, g.sigma_q(), s.sigma_q);
    }
    let worst = traj.corrections.iter().map(|c| (c - 1.0).abs()).fold(0.0, f64::max);
    println!("\nlargest per-step norm correction on the grid: {worst:.2e}");
    Ok(())
}
