//! Finite normal-form games.
//!
//! A [`Game`] holds the player list, one ordered action list per player and a
//! utility backend. Profiles are encoded as a mixed-radix index with player 0
//! as the most significant digit, so the lexicographic order of
//! [`Profile`]s matches the order of their indices.
//!
//! Utilities come either from a dense table (one row of length |S| per
//! player) or from a pure function. Function-backed games exist for
//! instances whose profile space cannot be enumerated, such as the
//! 100-customer demand market; they can be simulated but not analysed
//! exactly unless tabulated first.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on |S| (and on |Z| for chain analyses).
pub const DEFAULT_STATE_CAP: usize = 4096;

/// Version tag written to and required from game definition files.
pub const GAME_SCHEMA_VERSION: u32 = 1;

/// One action index per player.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Profile(pub Vec<usize>);

impl Profile {
    pub fn new(actions: Vec<usize>) -> Self {
        Profile(actions)
    }

    pub fn actions(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<usize>> for Profile {
    fn from(v: Vec<usize>) -> Self {
        Profile(v)
    }
}

/// A utility map given as code rather than as a table.
///
/// Implementations must be pure: the same profile always yields the same
/// values.
pub trait UtilityFn: Send + Sync + fmt::Debug {
    /// Writes `u_i(profile)` for every player `i` into `out`.
    fn eval(&self, profile: &[usize], out: &mut [f64]);
}

#[derive(Clone)]
enum Backend {
    Table(Arc<Vec<Vec<f64>>>),
    Function(Arc<dyn UtilityFn>),
}

impl fmt::Debug for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Table(t) => write!(f, "Table({} players)", t.len()),
            Backend::Function(u) => write!(f, "Function({u:?})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Game {
    players: Vec<String>,
    actions: Vec<Vec<String>>,
    backend: Backend,
    // Present iff |S| fits in usize.
    strides: Option<Vec<usize>>,
    profile_count: Option<usize>,
}

fn mixed_radix(actions: &[Vec<String>]) -> (Option<Vec<usize>>, Option<usize>) {
    let n = actions.len();
    let mut strides = vec![0usize; n];
    let mut acc: usize = 1;
    for i in (0..n).rev() {
        strides[i] = acc;
        match acc.checked_mul(actions[i].len()) {
            Some(v) => acc = v,
            None => return (None, None),
        }
    }
    (Some(strides), Some(acc))
}

impl Game {
    fn check_shape(players: &[String], actions: &[Vec<String>]) -> Result<()> {
        if players.is_empty() {
            return Err(Error::InvalidGame("a game needs at least one player".into()));
        }
        if players.len() != actions.len() {
            return Err(Error::InvalidGame(format!(
                "{} players but {} action lists",
                players.len(),
                actions.len()
            )));
        }
        for (i, a) in actions.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::InvalidGame(format!("player {i} has an empty action set")));
            }
        }
        Ok(())
    }

    /// Builds a table-backed game. `tables[i][k]` is player i's utility at the
    /// profile with index k.
    pub fn from_tables(
        players: Vec<String>,
        actions: Vec<Vec<String>>,
        tables: Vec<Vec<f64>>,
    ) -> Result<Game> {
        Self::check_shape(&players, &actions)?;
        let (strides, count) = mixed_radix(&actions);
        let count = count.ok_or_else(|| {
            Error::InvalidGame("profile space too large for a dense utility table".into())
        })?;
        if tables.len() != players.len() {
            return Err(Error::InvalidGame(format!(
                "{} utility tables for {} players",
                tables.len(),
                players.len()
            )));
        }
        for (i, t) in tables.iter().enumerate() {
            if t.len() != count {
                return Err(Error::InvalidGame(format!(
                    "utility table of player {i} has {} entries, expected {count}",
                    t.len()
                )));
            }
            if let Some(k) = t.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidGame(format!(
                    "utility of player {i} at profile {k} is not finite"
                )));
            }
        }
        Ok(Game {
            players,
            actions,
            backend: Backend::Table(Arc::new(tables)),
            strides,
            profile_count: Some(count),
        })
    }

    /// Builds a game whose utilities are computed on demand.
    pub fn from_fn(
        players: Vec<String>,
        actions: Vec<Vec<String>>,
        utility: Arc<dyn UtilityFn>,
    ) -> Result<Game> {
        Self::check_shape(&players, &actions)?;
        let (strides, count) = mixed_radix(&actions);
        Ok(Game {
            players,
            actions,
            backend: Backend::Function(utility),
            strides,
            profile_count: count,
        })
    }

    /// Convenience constructor: players named `p1..pN`, actions `a1..ak`.
    pub fn from_payoffs(action_counts: &[usize], tables: Vec<Vec<f64>>) -> Result<Game> {
        let players = (1..=action_counts.len()).map(|i| format!("p{i}")).collect();
        let actions = action_counts
            .iter()
            .map(|&k| (1..=k).map(|a| format!("a{a}")).collect())
            .collect();
        Game::from_tables(players, actions, tables)
    }

    /// Materialises a function-backed game into a dense table.
    pub fn tabulate(&self, cap: usize) -> Result<Game> {
        let count = self.require_profiles(cap, "profile space")?;
        if let Backend::Table(_) = self.backend {
            return Ok(self.clone());
        }
        let n = self.num_players();
        let mut tables = vec![vec![0.0; count]; n];
        let mut buf = vec![0usize; n];
        let mut out = vec![0.0; n];
        for k in 0..count {
            self.decode_into(k, &mut buf);
            self.utilities(&buf, &mut out);
            for i in 0..n {
                tables[i][k] = out[i];
            }
        }
        Game::from_tables(self.players.clone(), self.actions.clone(), tables)
    }

    pub fn num_players(&self) -> usize {
        self.players.len()
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn action_labels(&self, player: usize) -> &[String] {
        &self.actions[player]
    }

    pub fn action_count(&self, player: usize) -> usize {
        self.actions[player].len()
    }

    pub fn action_counts(&self) -> Vec<usize> {
        self.actions.iter().map(Vec::len).collect()
    }

    pub fn is_tabular(&self) -> bool {
        matches!(self.backend, Backend::Table(_))
    }

    /// |S|, or `None` when it does not fit in a machine word.
    pub fn profile_count(&self) -> Option<usize> {
        self.profile_count
    }

    /// |S| when it is within `cap`, otherwise an infeasibility error.
    pub fn require_profiles(&self, cap: usize, what: &'static str) -> Result<usize> {
        match self.profile_count {
            Some(c) if c <= cap => Ok(c),
            Some(c) => Err(Error::Infeasible { what, size: c.to_string(), cap }),
            None => Err(Error::Infeasible { what, size: self.profile_count_string(), cap }),
        }
    }

    /// |S| written out exactly, even when it overflows a machine word.
    pub fn profile_count_string(&self) -> String {
        if let Some(c) = self.profile_count {
            return c.to_string();
        }
        let log10: f64 = self.actions.iter().map(|a| (a.len() as f64).log10()).sum();
        let counts = self.action_counts();
        if counts.iter().all(|&c| c == counts[0]) {
            format!("{}^{}", counts[0], counts.len())
        } else {
            format!("~1e{log10:.1}")
        }
    }

    pub fn validate_profile(&self, profile: &[usize]) -> Result<()> {
        if profile.len() != self.num_players() {
            return Err(Error::InvalidProfile(format!(
                "profile has {} entries for {} players",
                profile.len(),
                self.num_players()
            )));
        }
        for (i, &a) in profile.iter().enumerate() {
            if a >= self.action_count(i) {
                return Err(Error::InvalidProfile(format!(
                    "player {i} action {a} out of range (|A_{i}| = {})",
                    self.action_count(i)
                )));
            }
        }
        Ok(())
    }

    fn strides(&self) -> &[usize] {
        self.strides
            .as_deref()
            .expect("profile indexing requested on a game whose profile space overflows usize")
    }

    /// Mixed-radix index of a valid profile.
    pub fn index_of(&self, profile: &[usize]) -> usize {
        profile.iter().zip(self.strides()).map(|(a, s)| a * s).sum()
    }

    pub fn decode_into(&self, mut index: usize, out: &mut [usize]) {
        for (slot, &s) in out.iter_mut().zip(self.strides()) {
            *slot = index / s;
            index %= s;
        }
    }

    pub fn profile_at(&self, index: usize) -> Profile {
        let mut v = vec![0; self.num_players()];
        self.decode_into(index, &mut v);
        Profile(v)
    }

    /// Index of the profile obtained by switching `player` to `action`.
    pub fn deviate_index(&self, index: usize, profile: &[usize], player: usize, action: usize) -> usize {
        let s = self.strides()[player];
        index - profile[player] * s + action * s
    }

    pub fn utility(&self, player: usize, profile: &[usize]) -> f64 {
        match &self.backend {
            Backend::Table(t) => t[player][self.index_of(profile)],
            Backend::Function(f) => {
                let mut out = vec![0.0; self.num_players()];
                f.eval(profile, &mut out);
                out[player]
            }
        }
    }

    /// Utility by profile index; table-backed games only need the index.
    pub fn utility_at(&self, player: usize, index: usize) -> f64 {
        match &self.backend {
            Backend::Table(t) => t[player][index],
            Backend::Function(_) => self.utility(player, self.profile_at(index).actions()),
        }
    }

    /// Writes every player's utility at `profile` into `out`.
    pub fn utilities(&self, profile: &[usize], out: &mut [f64]) {
        match &self.backend {
            Backend::Table(t) => {
                let k = self.index_of(profile);
                for (o, row) in out.iter_mut().zip(t.iter()) {
                    *o = row[k];
                }
            }
            Backend::Function(f) => f.eval(profile, out),
        }
    }

    /// Iterates over all profiles in index order.
    pub fn profiles(&self) -> impl Iterator<Item = Profile> + '_ {
        (0..self.profile_count.unwrap_or(0)).map(move |k| self.profile_at(k))
    }

    pub fn to_file(&self, cap: usize) -> Result<GameFile> {
        let table = self.tabulate(cap)?;
        let utilities = match &table.backend {
            Backend::Table(t) => t.as_ref().clone(),
            Backend::Function(_) => unreachable!("tabulate returns a table-backed game"),
        };
        Ok(GameFile {
            schema_version: GAME_SCHEMA_VERSION,
            players: self.players.clone(),
            actions: self.actions.clone(),
            utilities,
        })
    }

    pub fn to_json(&self, cap: usize) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file(cap)?)?)
    }

    pub fn from_json(text: &str) -> Result<Game> {
        let file: GameFile = serde_json::from_str(text)?;
        file.into_game()
    }
}

/// On-disk game definition (JSON).
///
/// `utilities[i]` is a dense row-major array for player i; entry k belongs
/// to the profile whose mixed-radix index is k, player 1 most significant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameFile {
    pub schema_version: u32,
    pub players: Vec<String>,
    pub actions: Vec<Vec<String>>,
    pub utilities: Vec<Vec<f64>>,
}

impl GameFile {
    pub fn into_game(self) -> Result<Game> {
        if self.schema_version != GAME_SCHEMA_VERSION {
            return Err(Error::InvalidGame(format!(
                "unsupported schema_version {} (expected {GAME_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        Game::from_tables(self.players, self.actions, self.utilities)
    }
}
