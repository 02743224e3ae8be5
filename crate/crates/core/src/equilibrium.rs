//! Pure equilibria and best-response structure.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, Profile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumKind {
    PureNash,
    /// Every unilateral deviation loses at least 2·eps.
    AntiEpsNash,
    /// No unilateral deviation gains more than 2·eps.
    EpsApproxNash,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub kind: EquilibriumKind,
    pub epsilon: f64,
    /// Sorted lexicographically.
    pub profiles: Vec<Profile>,
}

impl EquilibriumReport {
    pub fn contains(&self, p: &Profile) -> bool {
        self.profiles.binary_search(p).is_ok()
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be finite and >= 0, got {eps}")));
    }
    Ok(())
}

/// Exhaustive scan of the profile space. Deviations range over the other
/// actions of the deviating player; a player with a single action imposes no
/// condition.
pub fn enumerate_equilibria(
    game: &Game,
    kind: EquilibriumKind,
    eps: f64,
    cap: usize,
) -> Result<EquilibriumReport> {
    check_eps(eps)?;
    let count = game.require_profiles(cap, "profile space")?;
    let margin = match kind {
        EquilibriumKind::PureNash => 0.0,
        EquilibriumKind::AntiEpsNash => 2.0 * eps,
        EquilibriumKind::EpsApproxNash => -2.0 * eps,
    };
    let n = game.num_players();
    let mut buf = vec![0usize; n];
    let mut profiles = Vec::new();
    'profiles: for k in 0..count {
        game.decode_into(k, &mut buf);
        for i in 0..n {
            let here = game.utility_at(i, k);
            for a in 0..game.action_count(i) {
                if a == buf[i] {
                    continue;
                }
                let there = game.utility_at(i, game.deviate_index(k, &buf, i, a));
                if here < there + margin {
                    continue 'profiles;
                }
            }
        }
        profiles.push(Profile(buf.clone()));
    }
    let epsilon = if kind == EquilibriumKind::PureNash { 0.0 } else { eps };
    Ok(EquilibriumReport { kind, epsilon, profiles })
}

pub fn pure_nash(game: &Game, cap: usize) -> Result<EquilibriumReport> {
    enumerate_equilibria(game, EquilibriumKind::PureNash, 0.0, cap)
}

/// One best-response move: `player` switches and the profile index changes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BestResponseEdge {
    pub from: usize,
    pub to: usize,
    pub player: usize,
}

/// Directed graph over profile indices. Edges are ordered by source index,
/// then player, then target action.
#[derive(Clone, Debug)]
pub struct BestResponseGraph {
    pub profile_count: usize,
    pub edges: Vec<BestResponseEdge>,
    /// `offsets[k]..offsets[k+1]` are the edges leaving profile k.
    offsets: Vec<usize>,
}

impl BestResponseGraph {
    pub fn successors(&self, from: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges[self.offsets[from]..self.offsets[from + 1]].iter().map(|e| e.to)
    }

    pub fn out_degree(&self, from: usize) -> usize {
        self.offsets[from + 1] - self.offsets[from]
    }
}

/// Edge s -> s' whenever s' changes one player's action to a best response
/// against the others. Every tied best response gets an edge; staying put
/// is not an edge.
pub fn best_response_graph(game: &Game, cap: usize) -> Result<BestResponseGraph> {
    let count = game.require_profiles(cap, "profile space")?;
    let n = game.num_players();
    let mut buf = vec![0usize; n];
    let mut edges = Vec::new();
    let mut offsets = Vec::with_capacity(count + 1);
    let mut values = Vec::new();
    for k in 0..count {
        offsets.push(edges.len());
        game.decode_into(k, &mut buf);
        for i in 0..n {
            values.clear();
            values.extend(
                (0..game.action_count(i)).map(|a| game.utility_at(i, game.deviate_index(k, &buf, i, a))),
            );
            let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for (a, &v) in values.iter().enumerate() {
                if v == best && a != buf[i] {
                    edges.push(BestResponseEdge { from: k, to: game.deviate_index(k, &buf, i, a), player: i });
                }
            }
        }
    }
    offsets.push(edges.len());
    Ok(BestResponseGraph { profile_count: count, edges, offsets })
}

#[derive(Clone, Debug)]
pub struct AcyclicityReport {
    pub weakly_acyclic: bool,
    /// A shortest best-response path (start and end included) to a pure
    /// Nash equilibrium, for every profile that has one.
    pub paths: BTreeMap<Profile, Vec<Profile>>,
    /// A profile from which no equilibrium is reachable.
    pub stuck: Option<Profile>,
    /// A best-response cycle reachable from `stuck`.
    pub cycle: Option<Vec<Profile>>,
}

/// Multi-source BFS from the pure Nash set over reversed best-response edges.
pub fn is_weakly_acyclic(game: &Game, cap: usize) -> Result<AcyclicityReport> {
    let graph = best_response_graph(game, cap)?;
    let nash = pure_nash(game, cap)?;
    let count = graph.profile_count;

    let mut reverse: Vec<Vec<usize>> = vec![Vec::new(); count];
    for e in &graph.edges {
        reverse[e.to].push(e.from);
    }
    const UNSEEN: usize = usize::MAX;
    let mut next_hop = vec![UNSEEN; count];
    let mut queue = VecDeque::new();
    for p in &nash.profiles {
        let k = game.index_of(p.actions());
        next_hop[k] = k;
        queue.push_back(k);
    }
    while let Some(v) = queue.pop_front() {
        for &u in &reverse[v] {
            if next_hop[u] == UNSEEN {
                next_hop[u] = v;
                queue.push_back(u);
            }
        }
    }

    let mut paths = BTreeMap::new();
    let mut stuck = None;
    for k in 0..count {
        if next_hop[k] == UNSEEN {
            stuck.get_or_insert(k);
            continue;
        }
        let mut path = vec![game.profile_at(k)];
        let mut v = k;
        while next_hop[v] != v {
            v = next_hop[v];
            path.push(game.profile_at(v));
        }
        paths.insert(game.profile_at(k), path);
    }

    let cycle = stuck.map(|start| {
        // Every profile reachable from `start` is a non-equilibrium and so has
        // an outgoing edge; following first edges must revisit a profile.
        let mut order = vec![UNSEEN; count];
        let mut walk = Vec::new();
        let mut v = start;
        while order[v] == UNSEEN {
            order[v] = walk.len();
            walk.push(v);
            v = graph.successors(v).next().expect("non-equilibrium profile without best response");
        }
        walk[order[v]..].iter().map(|&k| game.profile_at(k)).collect()
    });

    Ok(AcyclicityReport {
        weakly_acyclic: stuck.is_none(),
        paths,
        stuck: stuck.map(|k| game.profile_at(k)),
        cycle,
    })
}
