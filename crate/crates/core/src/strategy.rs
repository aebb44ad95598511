//! Checking that a positional strategy wins from a claimed set.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use crate::error::GameError;
use crate::game::{ParityGame, Player, PositionalStrategy, Priority, Vertex};
use crate::vertex_set::VertexSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum StrategyVerdict {
    Pass,
    /// A cycle whose maximal priority is `priority` (of the wrong parity) is
    /// reachable; `vertex` lies on it.
    Fail {
        priority: Priority,
        vertex: Vertex,
    },
}

impl StrategyVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, StrategyVerdict::Pass)
    }
}

/// Vertices reachable from `from` along strategy edges.
pub fn strategy_reachable(strategy: &PositionalStrategy, from: &VertexSet) -> VertexSet {
    let mut seen = from.clone();
    let mut stack: Vec<Vertex> = from.iter().collect();
    while let Some(v) = stack.pop() {
        for &w in &strategy.edges[v] {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen
}

/// PASS iff every cycle of `(V, σ)` reachable from `claimed` has a maximal
/// priority of the strategy player's parity.
pub fn verify_strategy_wins(
    game: &ParityGame,
    strategy: &PositionalStrategy,
    claimed: &VertexSet,
) -> Result<StrategyVerdict, GameError> {
    strategy.check(game)?;
    if claimed.capacity() != game.len() {
        return Err(GameError::MalformedStrategy("claimed set has the wrong size".into()));
    }
    let reach = strategy_reachable(strategy, claimed);
    let bad = strategy.player.opponent();
    let mut bad_priorities: Vec<Priority> =
        reach.iter().map(|v| game.priority(v)).filter(|&p| Player::of_priority(p) == bad).collect();
    bad_priorities.sort_unstable();
    bad_priorities.dedup();
    for p in bad_priorities {
        if let Some(v) = cycle_through_priority(game, strategy, &reach, p) {
            return Ok(StrategyVerdict::Fail { priority: p, vertex: v });
        }
    }
    Ok(StrategyVerdict::Pass)
}

/// A priority-`p` vertex on a cycle inside `{v ∈ reach : π(v) ≤ p}`.
fn cycle_through_priority(
    game: &ParityGame,
    strategy: &PositionalStrategy,
    reach: &VertexSet,
    p: Priority,
) -> Option<Vertex> {
    let keep: Vec<Vertex> = reach.iter().filter(|&v| game.priority(v) <= p).collect();
    let mut index = vec![usize::MAX; game.len()];
    let mut graph: DiGraph<Vertex, ()> = DiGraph::with_capacity(keep.len(), 0);
    for &v in &keep {
        index[v] = graph.add_node(v).index();
    }
    for &v in &keep {
        for &w in &strategy.edges[v] {
            if index[w] != usize::MAX {
                graph.add_edge(NodeIndex::new(index[v]), NodeIndex::new(index[w]), ());
            }
        }
    }
    for scc in tarjan_scc(&graph) {
        let cyclic = scc.len() > 1 || {
            let v = graph[scc[0]];
            strategy.edges[v].contains(&v)
        };
        if !cyclic {
            continue;
        }
        let mut hits: Vec<Vertex> = scc.iter().map(|&i| graph[i]).filter(|&v| game.priority(v) == p).collect();
        hits.sort_unstable();
        if let Some(&v) = hits.first() {
            return Some(v);
        }
    }
    None
}
