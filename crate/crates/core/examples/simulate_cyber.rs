//! 100 replications of the defense game and the spread of platform choices.
//!
//!     cargo run --release --example simulate_cyber

use gtrl::noise::NoiseModel;
use gtrl::studies::{cyber_schedule, run_cyber, DEFENDER_PLATFORMS};

fn main() -> gtrl::Result<()> {
    let horizon = 10_000;
    let (_, emp) = run_cyber(&cyber_schedule(), &NoiseModel::zero(), horizon, 100, 2024)?;
    print!("{:>6}", "t");
    for name in DEFENDER_PLATFORMS {
        print!("{name:>12}");
    }
    println!();
    for t in [0, 10, 100, 1000, 5000, horizon] {
        print!("{t:>6}");
        for f in emp.player_frequencies(t, 0) {
            print!("{f:>12.2}");
        }
        println!();
    }
    let f = emp.player_frequencies(horizon, 0);
    println!("share on d4 or d5 at t = {horizon}: {:.2}", f[3] + f[4]);
    Ok(())
}
