use super::kernel::KernelStructure;
use super::Distribution;
use crate::error::{Error, Result};
use crate::game::{Game, DEFAULT_STATE_CAP};
use crate::noise::NoiseModel;
use crate::schedule::Schedule;

/// Pushes `initial`, the law of `z(t_from) = (s(t_from), s(t_from + 1))`,
/// forward to `t_to`, calling `visit(t, pi(t))` for every t in between
/// (both ends included). The step from z(t) to z(t+1) draws s(t+2), so it
/// uses the rates of iteration t + 2. The kernel is never materialised.
pub fn evolve_each<F>(
    initial: &Distribution,
    game: &Game,
    schedule: &Schedule,
    noise: &NoiseModel,
    t_from: u64,
    t_to: u64,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(u64, &Distribution),
{
    if t_to < t_from {
        return Err(Error::InvalidArgument(format!("t_to = {t_to} precedes t_from = {t_from}")));
    }
    if schedule.num_players() != game.num_players() {
        return Err(Error::Dimension("schedule and game disagree on player count".into()));
    }
    let k = KernelStructure::new(game, noise, DEFAULT_STATE_CAP)?;
    let states = k.states();
    if initial.len() != states {
        return Err(Error::Dimension(format!("initial distribution has {} entries, chain has {states}", initial.len())));
    }
    let s = k.profiles();
    let offsets = k.law_offsets();
    let mut laws = vec![0.0; *offsets.last().unwrap()];
    let mut row = vec![0.0; s];
    let mut pi = initial.clone();
    visit(t_from, &pi);
    let mut next = vec![0.0; states];
    for t in t_from..t_to {
        let rates = schedule.effective_rates(t + 2)?;
        k.check_rates(&rates)?;
        next.fill(0.0);
        for (z, &w) in pi.probs().iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            k.fill_row(z, &rates, &offsets, &mut laws, &mut row);
            let base = (z % s) * s;
            for (o, &p) in next[base..base + s].iter_mut().zip(&row) {
                *o += w * p;
            }
        }
        pi = Distribution::from_raw(next.clone());
        visit(t + 1, &pi);
    }
    Ok(())
}

/// Every pi(t) for t in `t_from..=t_to`.
pub fn evolve(
    initial: &Distribution,
    game: &Game,
    schedule: &Schedule,
    noise: &NoiseModel,
    t_from: u64,
    t_to: u64,
) -> Result<Vec<Distribution>> {
    let mut out = Vec::with_capacity((t_to.saturating_sub(t_from) + 1) as usize);
    evolve_each(initial, game, schedule, noise, t_from, t_to, |_, pi| out.push(pi.clone()))?;
    Ok(out)
}
