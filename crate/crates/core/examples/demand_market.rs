//! Slot totals in the demand market under different exploration and
//! noise settings, summarised by the late-window variance.
//!
//!     cargo run --release --example demand_market

use gtrl::noise::{NoiseKind, NoiseModel};
use gtrl::studies::{demand_schedule, run_demand, windowed_variance, DemandMarketSpec};

fn main() -> gtrl::Result<()> {
    let spec = DemandMarketSpec::uniform(100, 10);
    let horizon = 2000;
    let cases: [(&str, f64, bool, NoiseKind); 6] = [
        ("p = 1", 1.0, false, NoiseKind::Zero),
        ("p = 0.5", 0.5, false, NoiseKind::Zero),
        ("p = 0.25", 0.25, false, NoiseKind::Zero),
        ("fixed 0.1", 1.0, true, NoiseKind::Zero),
        ("p = 1, uniform 10", 1.0, false, NoiseKind::Uniform { bound: 10.0 }),
        ("p = 1, growing 10 ln t", 1.0, false, NoiseKind::GrowingUniform { scale: 10.0 }),
    ];
    println!("{:<24}{:>14}{:>14}   final slot totals", "setting", "var[500,1000]", "var[1500,2000]");
    for (name, p, fixed, noise) in cases {
        let schedule = demand_schedule(spec.customers(), p, fixed)?;
        let (_, trace) = run_demand(&spec, &schedule, &NoiseModel::shared(noise), horizon, 7)?;
        let early = windowed_variance(&trace, 500, 1000)?;
        let late = windowed_variance(&trace, 1500, 2000)?;
        let last: Vec<String> = trace[horizon as usize].iter().map(|x| format!("{x:.0}")).collect();
        println!("{name:<24}{early:>14.2}{late:>14.2}   {}", last.join(" "));
    }
    Ok(())
}
