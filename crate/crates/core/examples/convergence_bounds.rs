//! Closed-form constants and distance bounds for p-series schedules.
//!
//!     cargo run --example convergence_bounds

use gtrl::bounds::{corollary2_constants, explicit_rate, pseries_bound, LogReal};

fn main() -> gtrl::Result<()> {
    for counts in [vec![1], vec![2, 2], vec![5, 11]] {
        let gamma: Vec<f64> = counts.iter().map(|&k| 1.0 / k as f64).collect();
        let c = corollary2_constants(&counts, &gamma)?;
        println!("actions {counts:?}: |Z| = {}, C = {}, rate cap = {}", c.chain_size, c.c, c.rate_cap);
        println!("  iterations for distance 0.1: {}", explicit_rate(counts.len(), c.c, 0.1)?);
    }

    // With a unit constant the shape of the bound is visible.
    let grid: Vec<u64> = (0..=6).map(|k| 10u64.pow(k) + 10).collect();
    println!("\nC = 1, two players with two actions each, t* = 10");
    println!("{:>10}{:>14}{:>14}", "t", "p = 1", "p = 0.25");
    let a = pseries_bound(&[2, 2], 1.0, 10, &grid, LogReal::ONE)?;
    let b = pseries_bound(&[2, 2], 0.25, 10, &grid, LogReal::ONE)?;
    for (x, y) in a.iter().zip(&b) {
        println!("{:>10}{:>14.6}{:>14.6}", x.t, x.total.to_f64(), y.total.to_f64());
    }
    Ok(())
}
