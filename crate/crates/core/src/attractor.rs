//! Attractors, attractors through a safe set, and reachability witnesses.

use std::collections::VecDeque;

use crate::game::{ParityGame, Player, Vertex};
use crate::vertex_set::VertexSet;

/// Result of an attractor computation. `witness[v]` is the edge the
/// attracting player uses at an attracted vertex of its own outside the
/// target; `rank[v]` counts the steps needed to reach the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttractorResult {
    pub set: VertexSet,
    pub witness: Vec<Option<Vertex>>,
    pub rank: Vec<Option<usize>>,
}

/// `Attr_player(target)` in the whole game.
pub fn attractor(game: &ParityGame, player: Player, target: &VertexSet) -> AttractorResult {
    attractor_core(game, player, target, None, None)
}

/// Attractor to `target` whose intermediate vertices all lie in `safe`.
/// Returns `None` when `target` is not a subset of `safe`.
pub fn attractor_through(
    game: &ParityGame,
    player: Player,
    target: &VertexSet,
    safe: &VertexSet,
) -> Option<AttractorResult> {
    if !target.is_subset(safe) {
        return None;
    }
    Some(attractor_core(game, player, target, Some(safe), None))
}

/// Attractor inside the subgame induced by `mask`: edges leaving the mask do
/// not exist. `target` must be a subset of `mask`.
pub fn attractor_in(game: &ParityGame, player: Player, target: &VertexSet, mask: &VertexSet) -> AttractorResult {
    attractor_core(game, player, target, Some(mask), Some(mask))
}

/// Shared fixpoint. `safe` limits which vertices may join. `arena`, when set,
/// drops edges leaving it, so opponent vertices only count successors inside.
fn attractor_core(
    game: &ParityGame,
    player: Player,
    target: &VertexSet,
    safe: Option<&VertexSet>,
    arena: Option<&VertexSet>,
) -> AttractorResult {
    let n = game.len();
    let mut set = target.clone();
    let mut witness = vec![None; n];
    let mut rank = vec![None; n];
    let mut remaining: Vec<usize> = game
        .vertices()
        .map(|v| match arena {
            Some(a) => game.successors(v).iter().filter(|&&w| a.contains(w)).count(),
            None => game.successors(v).len(),
        })
        .collect();
    let mut queue: VecDeque<Vertex> = VecDeque::new();
    for v in target.iter() {
        rank[v] = Some(0);
        queue.push_back(v);
    }
    while let Some(w) = queue.pop_front() {
        let r = rank[w].expect("queued vertices are ranked") + 1;
        for &u in game.predecessors(w) {
            if set.contains(u) || safe.is_some_and(|s| !s.contains(u)) {
                continue;
            }
            let joins = if game.owner(u) == player {
                // smallest-index successor already in the set
                let best = game.successors(u).iter().copied().filter(|&x| set.contains(x)).min();
                witness[u] = best;
                true
            } else {
                let hits = game.successors(u).iter().filter(|&&x| x == w).count();
                remaining[u] -= hits;
                remaining[u] == 0
            };
            if joins {
                set.insert(u);
                rank[u] = Some(r);
                queue.push_back(u);
            }
        }
    }
    AttractorResult { set, witness, rank }
}

/// True iff `v` can move into `target` in one step: `player` owns `v` and has
/// an edge into `target`, or the opponent owns it and every edge goes there.
pub fn one_step_reach(game: &ParityGame, player: Player, target: &VertexSet, v: Vertex) -> bool {
    let succ = game.successors(v);
    if game.owner(v) == player {
        succ.iter().any(|&w| target.contains(w))
    } else {
        succ.iter().all(|&w| target.contains(w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Player::{Even, Odd};

    fn chain() -> ParityGame {
        // a -> b -> t, t loops
        ParityGame::new(vec![Even, Even, Odd], vec![1, 1, 2], vec![vec![1], vec![2], vec![2]]).unwrap()
    }

    #[test]
    fn full_target() {
        let g = chain();
        assert_eq!(attractor(&g, Even, &g.all()).set, g.all());
    }

    #[test]
    fn one_step_rule() {
        let g = chain();
        let t = VertexSet::from_vertices(3, [2]);
        let a = attractor(&g, Even, &t);
        assert_eq!(a.set, g.all());
        assert_eq!(a.rank, vec![Some(2), Some(1), Some(0)]);
        assert_eq!(a.witness[0], Some(1));
    }

    #[test]
    fn opponent_needs_all_successors() {
        let g = ParityGame::new(vec![Odd, Even, Even], vec![1, 1, 1], vec![vec![1, 2], vec![1], vec![2]]).unwrap();
        let a = attractor(&g, Even, &VertexSet::from_vertices(3, [1]));
        assert!(!a.set.contains(0));
    }

    #[test]
    fn through_blocks_unsafe_middle() {
        let g = chain();
        let t = VertexSet::from_vertices(3, [2]);
        let safe = VertexSet::from_vertices(3, [0, 2]);
        let a = attractor_through(&g, Even, &t, &safe).unwrap();
        assert_eq!(a.set.to_vec(), vec![2]);
        assert_eq!(attractor_through(&g, Even, &t, &t).unwrap().set, t);
        assert!(attractor_through(&g, Even, &g.all(), &t).is_none());
    }

    #[test]
    fn in_mask_ignores_outside_edges() {
        // Odd vertex 0 with edges to 1 (target) and 2 (outside the mask)
        let g = ParityGame::new(vec![Odd, Even, Even], vec![1, 1, 1], vec![vec![1, 2], vec![1], vec![2]]).unwrap();
        let mask = VertexSet::from_vertices(3, [0, 1]);
        let a = attractor_in(&g, Even, &VertexSet::from_vertices(3, [1]), &mask);
        assert!(a.set.contains(0));
    }

    #[test]
    fn one_step() {
        let g = ParityGame::new(vec![Even, Odd], vec![1, 1], vec![vec![0, 1], vec![0, 1]]).unwrap();
        let t = VertexSet::from_vertices(2, [1]);
        assert!(one_step_reach(&g, Even, &t, 0));
        assert!(!one_step_reach(&g, Even, &t, 1));
        assert!(one_step_reach(&g, Odd, &g.all(), 1));
        assert!(one_step_reach(&g, Even, &g.all(), 1));
    }
}
