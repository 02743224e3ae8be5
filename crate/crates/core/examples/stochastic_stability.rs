//! Stochastically stable states: potentials along a ladder of vanishing
//! exploration rates, cross-checked with minimum-resistance trees.
//!
//!     cargo run --release --example stochastic_stability

use gtrl::chain::{stable_states, ChainState};
use gtrl::equilibrium::pure_nash;
use gtrl::noise::NoiseModel;
use gtrl::studies::cyber_game;
use gtrl::{Game, DEFAULT_STATE_CAP};

fn show(name: &str, game: &Game, ladder: &[f64], gamma: &[f64]) -> gtrl::Result<()> {
    let report = stable_states(game, &NoiseModel::zero(), ladder, gamma)?;
    let nash = pure_nash(game, DEFAULT_STATE_CAP)?;
    println!("{name}: |Z| = {}", report.final_report.log_potential.len());
    let Some(lambda) = &report.lambda_star else {
        println!("  ladder did not stabilise: {:?}", report.lambdas);
        return Ok(());
    };
    for &z in lambda {
        let s = ChainState::from_index(game, z);
        let tag = if nash.contains(&s.curr) { "Nash" } else { "not Nash" };
        println!("  z = {z:>5}  {} -> {}  ({tag})", s.prev, s.curr);
    }
    println!("  contained in the minimum-resistance set: {:?}", report.resistance_agrees);
    Ok(())
}

fn main() -> gtrl::Result<()> {
    let coordination = Game::from_payoffs(&[3, 3], {
        let u: Vec<f64> = (0..9).map(|k| if k / 3 == k % 3 { 1.0 + (k / 3) as f64 } else { 0.0 }).collect();
        vec![u.clone(), u]
    })?;
    show("3x3 coordination", &coordination, &[1e-1, 1e-2, 1e-3, 1e-4, 1e-5], &[1.0 / 3.0; 2])?;
    show("defense game", &cyber_game(), &[1e-2, 1e-3, 1e-4, 1e-5, 1e-6], &[1.0 / 11.0; 2])?;
    Ok(())
}
