//! Pure equilibria and best-response structure of the defense game.
//!
//!     cargo run --example equilibria

use gtrl::equilibrium::{enumerate_equilibria, is_weakly_acyclic, pure_nash, EquilibriumKind};
use gtrl::studies::cyber_game;
use gtrl::{Profile, DEFAULT_STATE_CAP};

fn label(game: &gtrl::Game, p: &Profile) -> String {
    p.actions()
        .iter()
        .enumerate()
        .map(|(i, &a)| game.action_labels(i)[a].clone())
        .collect::<Vec<_>>()
        .join(" vs ")
}

fn main() -> gtrl::Result<()> {
    let game = cyber_game();
    let nash = pure_nash(&game, DEFAULT_STATE_CAP)?;
    println!("{} pure Nash equilibria:", nash.profiles.len());
    for p in &nash.profiles {
        println!("  {}", label(&game, p));
    }

    // Every equilibrium leaves the defender indifferent between d4 and d5,
    // so none survives a strict margin.
    let strict = enumerate_equilibria(&game, EquilibriumKind::AntiEpsNash, 0.1, DEFAULT_STATE_CAP)?;
    println!("anti-0.1 equilibria: {}", strict.profiles.len());

    let acyc = is_weakly_acyclic(&game, DEFAULT_STATE_CAP)?;
    println!("weakly acyclic: {}", acyc.weakly_acyclic);
    let longest = acyc.paths.values().max_by_key(|p| p.len()).expect("nonempty game");
    let path: Vec<String> = longest.iter().map(|p| label(&game, p)).collect();
    println!("a longest best-response path: {}", path.join("  ->  "));
    Ok(())
}
