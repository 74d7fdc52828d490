//! Upper bounds on the CSL rate from laboratory and cosmological processes,
//! their distance in orders of magnitude from the reference values, and
//! the IGM heating estimate derived from the heating rate.
//!
//! cargo run --example bounds_table

use collapse_dynamics::bounds::{bounds_table, exclusion_map, log_grid, ExclusionStatus, IgmBudget};
use collapse_dynamics::catalog::BoundCatalog;
use collapse_dynamics::constants::R_C;

fn main() -> collapse_dynamics::Result<()> {
    let catalog = BoundCatalog::builtin();
    let names: Vec<&str> = catalog.references.iter().map(|r| r.name.as_str()).collect();
    println!("{:<38} {:>10} {:>10} {:>10}", "process", "lambda_max", names[0], names[1]);
    for row in bounds_table(&catalog)? {
        println!(
            "{:<38} {:>10.0e} {:>10} {:>10}",
            row.name,
            row.lambda_max,
            row.distances[0].to_string(),
            row.distances[1].to_string()
        );
    }
    println!("\nIGM heating estimate: lambda < {:.2e} s^-1", IgmBudget::default().lambda_bound(R_C)?);

    println!("\nexclusion scan:");
    let grid = log_grid(1e-20, 1e0, 11)?;
    for p in exclusion_map(&catalog.bounds, &grid, &catalog.references)? {
        let status = match &p.status {
            ExclusionStatus::Allowed => "allowed".to_string(),
            ExclusionStatus::ExcludedBy(name) => format!("excluded by {name}"),
        };
        println!("  lambda = {:.0e}: {status}", p.lambda);
    }
    Ok(())
}
