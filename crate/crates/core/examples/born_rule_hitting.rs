//! The outcome of a measurement as a first-passage problem: the log-ratio
//! of branch weights diffuses until it hits +-b. Outcome frequencies follow
//! the Born rule.
//!
//! cargo run --release --example born_rule_hitting

use collapse_dynamics::measurement::{
    collapse_probability, expected_collapse_s_from, gamma0_from_amplitudes, run_hitting_ensemble,
};
use collapse_dynamics::stats::binomial_sigma;

fn main() -> collapse_dynamics::Result<()> {
    let (b, n) = (10.0, 10_000);
    println!("{:>6} {:>9} {:>9} {:>8} {:>9} {:>9}", "|c+|^2", "P+ (MC)", "P+ exact", "3 sigma", "E[S] MC", "E[S]");
    for p in [0.1, 0.3, 0.5, 0.8] {
        let gamma0 = gamma0_from_amplitudes(p, 1.0 - p)?;
        let ens = run_hitting_ensemble(gamma0, b, 1e-2, n, 1)?;
        let (exact, _) = collapse_probability(gamma0, b)?;
        println!(
            "{p:>6.2} {:>9.4} {exact:>9.4} {:>8.4} {:>9.3} {:>9.3}",
            ens.p_plus,
            3.0 * binomial_sigma(exact, n),
            ens.mean_s,
            expected_collapse_s_from(gamma0, b)?
        );
    }
    Ok(())
}
