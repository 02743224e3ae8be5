//! Exact chains: the stationary law by elimination and by enumerating
//! spanning trees, then the distance of an evolving law from its limit.
//!
//!     cargo run --example stationary_analysis

use gtrl::chain::{
    distance_trace, evolve, stationary_linear, stationary_tree, transition_matrix, ChainState, Distribution,
};
use gtrl::noise::{NoiseKind, NoiseModel};
use gtrl::schedule::Schedule;
use gtrl::Game;

fn main() -> gtrl::Result<()> {
    // Tree enumeration is exponential, so the comparison uses a single
    // learner with a noisy two-armed bandit: four chain states.
    let bandit = Game::from_payoffs(&[2], vec![vec![1.0, 0.6]])?;
    let noisy = NoiseModel::shared(NoiseKind::Uniform { bound: 0.5 });
    let p = transition_matrix(&bandit, &[0.1], &noisy)?;
    let linear = stationary_linear(&p)?;
    let tree = stationary_tree(&p)?;
    println!("state          linear        tree");
    for z in 0..p.size() {
        let s = ChainState::from_index(&bandit, z);
        println!("{} -> {}  {:>12.6}{:>12.6}", s.prev, s.curr, linear.get(z), tree.get(z));
    }
    println!("L1 gap between methods: {:.2e}\n", linear.l1_distance(&tree));

    let game = Game::from_payoffs(&[2, 2], vec![vec![2.0, 0.0, 0.0, 1.0], vec![2.0, 0.0, 0.0, 1.0]])?;
    let noise = NoiseModel::zero();

    // Reference law at a small common rate, then D(t) under 1/(2 sqrt t).
    let schedule = Schedule::canonical(&game.action_counts(), 1.0)?;
    let reference = stationary_linear(&transition_matrix(&game, &[0.5e-3, 0.5e-3], &noise)?)?;
    let pis = evolve(&Distribution::uniform(reference.len()), &game, &schedule, &noise, 0, 20_000)?;
    let d = distance_trace(&pis, &reference)?;
    for t in [0, 10, 100, 1000, 10_000, 20_000] {
        println!("D({t}) = {:.4}", d[t]);
    }
    Ok(())
}
