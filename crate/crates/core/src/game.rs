//! Parity-game data model.
//!
//! Vertices are dense indices `0..n`. Priorities live in `1..=d` with `d`
//! even; the game has no sinks. Successor lists keep the order in which they
//! were supplied, and that order is the tie-break wherever an algorithm has
//! to choose an edge.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GameError;
use crate::vertex_set::VertexSet;

pub type Vertex = usize;
pub type Priority = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Even,
    Odd,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Even => Player::Odd,
            Player::Odd => Player::Even,
        }
    }

    /// The player favoured by a priority: even priorities belong to Even.
    pub fn of_priority(p: Priority) -> Player {
        if p.is_multiple_of(2) {
            Player::Even
        } else {
            Player::Odd
        }
    }

    /// PGSolver owner code: 0 for Even, 1 for Odd.
    pub fn code(self) -> u8 {
        match self {
            Player::Even => 0,
            Player::Odd => 1,
        }
    }

    pub fn index(self) -> usize {
        self.code() as usize
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Player::Even => f.write_str("even"),
            Player::Odd => f.write_str("odd"),
        }
    }
}

/// An immutable parity game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityGame {
    owner: Vec<Player>,
    priority: Vec<Priority>,
    succ: Vec<Vec<Vertex>>,
    pred: Vec<Vec<Vertex>>,
    names: Vec<Option<String>>,
    /// External vertex ids, as they appear in a PGSolver file.
    ids: Vec<usize>,
    d: Priority,
    /// Amount added to every file priority during normalization.
    priority_shift: Priority,
}

impl ParityGame {
    /// Builds and validates a game. `d` is the maximal priority rounded up to
    /// the next even number.
    pub fn new(owner: Vec<Player>, priority: Vec<Priority>, succ: Vec<Vec<Vertex>>) -> Result<Self, GameError> {
        let n = owner.len();
        GameBuilder { owner, priority, succ, names: vec![None; n], ids: (0..n).collect(), priority_shift: 0 }.build()
    }

    pub fn empty() -> Self {
        ParityGame {
            owner: Vec::new(),
            priority: Vec::new(),
            succ: Vec::new(),
            pred: Vec::new(),
            names: Vec::new(),
            ids: Vec::new(),
            d: 0,
            priority_shift: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.len()
    }

    pub fn owner(&self, v: Vertex) -> Player {
        self.owner[v]
    }

    pub fn priority(&self, v: Vertex) -> Priority {
        self.priority[v]
    }

    pub fn successors(&self, v: Vertex) -> &[Vertex] {
        &self.succ[v]
    }

    pub fn predecessors(&self, v: Vertex) -> &[Vertex] {
        &self.pred[v]
    }

    pub fn name(&self, v: Vertex) -> Option<&str> {
        self.names[v].as_deref()
    }

    pub fn external_id(&self, v: Vertex) -> usize {
        self.ids[v]
    }

    /// Even upper bound on priorities.
    pub fn d(&self) -> Priority {
        self.d
    }

    pub fn max_priority(&self) -> Priority {
        self.priority.iter().copied().max().unwrap_or(0)
    }

    pub fn priority_shift(&self) -> Priority {
        self.priority_shift
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.vertices().flat_map(move |v| self.succ[v].iter().map(move |&w| (v, w)))
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.succ[u].contains(&v)
    }

    pub fn vertices_with_priority(&self, p: Priority) -> VertexSet {
        VertexSet::from_vertices(self.len(), self.vertices().filter(|&v| self.priority[v] == p))
    }

    pub fn all(&self) -> VertexSet {
        VertexSet::full(self.len())
    }

    /// Induced subgame on `keep`, with vertex ids remapped densely in
    /// increasing order. The returned vector maps new ids back to parent ids.
    pub fn subgame(&self, keep: &VertexSet) -> Result<(ParityGame, Vec<Vertex>), GameError> {
        let back: Vec<Vertex> = keep.iter().collect();
        let mut forward = vec![usize::MAX; self.len()];
        for (i, &v) in back.iter().enumerate() {
            forward[v] = i;
        }
        let mut succ = Vec::with_capacity(back.len());
        for &v in &back {
            let s: Vec<Vertex> = self.succ[v].iter().filter(|&&w| keep.contains(w)).map(|&w| forward[w]).collect();
            if s.is_empty() {
                return Err(GameError::Sink { id: self.ids[v] });
            }
            succ.push(s);
        }
        let game = GameBuilder {
            owner: back.iter().map(|&v| self.owner[v]).collect(),
            priority: back.iter().map(|&v| self.priority[v]).collect(),
            succ,
            names: back.iter().map(|&v| self.names[v].clone()).collect(),
            ids: back.iter().map(|&v| self.ids[v]).collect(),
            priority_shift: self.priority_shift,
        }
        .build()?;
        Ok((game, back))
    }
}

pub(crate) struct GameBuilder {
    pub owner: Vec<Player>,
    pub priority: Vec<Priority>,
    pub succ: Vec<Vec<Vertex>>,
    pub names: Vec<Option<String>>,
    pub ids: Vec<usize>,
    pub priority_shift: Priority,
}

impl GameBuilder {
    pub fn build(self) -> Result<ParityGame, GameError> {
        let n = self.owner.len();
        if self.priority.len() != n || self.succ.len() != n || self.names.len() != n || self.ids.len() != n {
            return Err(GameError::Shape);
        }
        for v in 0..n {
            if self.priority[v] < 1 {
                return Err(GameError::PriorityOutOfRange { id: self.ids[v], priority: self.priority[v] });
            }
            if self.succ[v].is_empty() {
                return Err(GameError::Sink { id: self.ids[v] });
            }
            if let Some(&w) = self.succ[v].iter().find(|&&w| w >= n) {
                return Err(GameError::DanglingSuccessor { id: self.ids[v], successor: w });
            }
            if let Some(name) = &self.names[v] {
                if name.contains('"') || name.contains('\n') {
                    return Err(GameError::BadName { id: self.ids[v] });
                }
            }
        }
        let max = self.priority.iter().copied().max().unwrap_or(0);
        let d = max + max % 2;
        let mut pred = vec![Vec::new(); n];
        for (v, ws) in self.succ.iter().enumerate() {
            for &w in ws {
                if pred[w].last() != Some(&v) {
                    pred[w].push(v);
                }
            }
        }
        Ok(ParityGame {
            owner: self.owner,
            priority: self.priority,
            succ: self.succ,
            pred,
            names: self.names,
            ids: self.ids,
            d,
            priority_shift: self.priority_shift,
        })
    }
}

/// A positional strategy: an edge subset giving every vertex of `player` at
/// least one choice and keeping every edge of the opponent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionalStrategy {
    pub player: Player,
    /// Chosen successors per vertex.
    pub edges: Vec<Vec<Vertex>>,
}

impl PositionalStrategy {
    /// Builds a strategy from one choice per `player` vertex; opponent
    /// vertices keep all their edges. Vertices of `player` without a choice
    /// keep all their edges too.
    pub fn from_choices(game: &ParityGame, player: Player, choice: &[Option<Vertex>]) -> Self {
        let edges = game
            .vertices()
            .map(|v| match (game.owner(v) == player, choice[v]) {
                (true, Some(w)) => vec![w],
                _ => game.successors(v).to_vec(),
            })
            .collect();
        PositionalStrategy { player, edges }
    }

    pub fn check(&self, game: &ParityGame) -> Result<(), GameError> {
        if self.edges.len() != game.len() {
            return Err(GameError::MalformedStrategy("vertex count mismatch".into()));
        }
        for v in game.vertices() {
            let chosen = &self.edges[v];
            if let Some(&w) = chosen.iter().find(|&&w| !game.has_edge(v, w)) {
                return Err(GameError::MalformedStrategy(format!("edge {v}->{w} is not in the game")));
            }
            if game.owner(v) == self.player {
                if chosen.is_empty() {
                    return Err(GameError::MalformedStrategy(format!("vertex {v} has no chosen edge")));
                }
            } else if game.successors(v).iter().any(|w| !chosen.contains(w)) {
                return Err(GameError::MalformedStrategy(format!("opponent vertex {v} is missing edges")));
            }
        }
        Ok(())
    }
}

/// Winning regions of both players, with optional witness strategies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WinningPartition {
    pub even: VertexSet,
    pub odd: VertexSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub even_strategy: Option<PositionalStrategy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub odd_strategy: Option<PositionalStrategy>,
}

impl WinningPartition {
    pub fn from_even(game: &ParityGame, even: VertexSet) -> Self {
        let odd = even.complement();
        debug_assert_eq!(even.capacity(), game.len());
        WinningPartition { even, odd, even_strategy: None, odd_strategy: None }
    }

    pub fn region(&self, player: Player) -> &VertexSet {
        match player {
            Player::Even => &self.even,
            Player::Odd => &self.odd,
        }
    }

    pub fn same_regions(&self, other: &WinningPartition) -> bool {
        self.even == other.even && self.odd == other.odd
    }
}
