//! Random and exhaustive game generators.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::GameError;
use crate::game::{ParityGame, Player, Priority, Vertex};

/// Default bound on the number of games [`enumerate_tiny_games`] will produce.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// A random game. Each vertex gets between 1 and `max_out_degree` distinct
/// successors (sorted), a uniform owner and a uniform priority in
/// `1..=max_priority`. Deterministic in `seed`.
pub fn random_game(n: usize, max_out_degree: usize, max_priority: Priority, seed: u64) -> ParityGame {
    assert!(n >= 1 && max_out_degree >= 1 && max_priority >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut owner = Vec::with_capacity(n);
    let mut priority = Vec::with_capacity(n);
    let mut succ = Vec::with_capacity(n);
    let top = max_out_degree.min(n);
    for _ in 0..n {
        owner.push(if rng.gen::<bool>() { Player::Odd } else { Player::Even });
        priority.push(rng.gen_range(1..=max_priority));
        let k = rng.gen_range(1..=top);
        let mut s: Vec<Vertex> = sample(&mut rng, n, k).into_vec();
        s.sort_unstable();
        succ.push(s);
    }
    ParityGame::new(owner, priority, succ).expect("generator produces valid games")
}

/// Nonempty subsets of `0..n` of size at most `k`, each sorted, in a fixed order.
fn successor_sets(n: usize, k: usize) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << n) {
        if (mask.count_ones() as usize) <= k {
            out.push((0..n).filter(|i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

/// Number of games [`enumerate_tiny_games`] would produce.
pub fn tiny_game_count(n: usize, max_out_degree: usize, max_priority: Priority) -> u128 {
    let sets = successor_sets_count(n, max_out_degree);
    let per_vertex = 2u128 * max_priority as u128 * sets;
    per_vertex.checked_pow(n as u32).unwrap_or(u128::MAX)
}

fn successor_sets_count(n: usize, k: usize) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    for size in 1..=k.min(n) {
        binom = binom * (n - size + 1) as u128 / size as u128;
        total += binom;
    }
    total
}

/// Every game with exactly `n` vertices, successor sets of size
/// `1..=max_out_degree`, any owners and priorities in `1..=max_priority`.
/// Each game appears once.
pub fn enumerate_tiny_games(
    n: usize,
    max_out_degree: usize,
    max_priority: Priority,
    cap: u128,
) -> Result<impl Iterator<Item = ParityGame>, GameError> {
    assert!(n <= 16, "tiny games only");
    let size = tiny_game_count(n, max_out_degree, max_priority);
    if size > cap {
        return Err(GameError::CapExceeded { size, cap });
    }
    let sets = successor_sets(n, max_out_degree);
    let n_sets = sets.len();
    let choices: Vec<(Player, Priority, usize)> = [Player::Even, Player::Odd]
        .into_iter()
        .flat_map(|o| (1..=max_priority).flat_map(move |p| (0..n_sets).map(move |s| (o, p, s))))
        .collect();
    let base = choices.len() as u128;
    Ok((0..size).map(move |mut code| {
        let mut owner = Vec::with_capacity(n);
        let mut priority = Vec::with_capacity(n);
        let mut succ = Vec::with_capacity(n);
        for _ in 0..n {
            let (o, p, s) = choices[(code % base) as usize];
            code /= base;
            owner.push(o);
            priority.push(p);
            succ.push(sets[s].clone());
        }
        ParityGame::new(owner, priority, succ).expect("enumerated games are valid")
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn single_vertex_random_game_is_a_loop() {
        let g = random_game(1, 1, 2, 0);
        assert_eq!(g.len(), 1);
        assert_eq!(g.successors(0), &[0]);
    }

    #[test]
    fn random_game_is_deterministic() {
        assert_eq!(random_game(30, 4, 6, 7), random_game(30, 4, 6, 7));
        let g = random_game(30, 4, 6, 7);
        assert!(g.vertices().all(|v| !g.successors(v).is_empty() && g.successors(v).len() <= 4));
        assert!(g.vertices().all(|v| (1..=6).contains(&g.priority(v))));
    }

    #[test]
    fn tiny_counts() {
        assert_eq!(enumerate_tiny_games(1, 1, 2, u128::MAX).unwrap().count(), 4);
        assert_eq!(enumerate_tiny_games(1, 1, 1, u128::MAX).unwrap().count(), 2);
        // 3 vertices: 6 successor sets of size <= 2, times 2 owners and 4 priorities, cubed
        assert_eq!(tiny_game_count(3, 2, 4), 48u128.pow(3));
    }

    #[test]
    fn tiny_games_are_distinct() {
        let games: Vec<ParityGame> = enumerate_tiny_games(2, 2, 2, u128::MAX).unwrap().collect();
        let mut seen = HashSet::new();
        for g in &games {
            let key: Vec<(u8, Priority, Vec<Vertex>)> =
                g.vertices().map(|v| (g.owner(v).code(), g.priority(v), g.successors(v).to_vec())).collect();
            assert!(seen.insert(key));
        }
        assert_eq!(games.len() as u128, tiny_game_count(2, 2, 2));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(enumerate_tiny_games(3, 2, 4, 10), Err(GameError::CapExceeded { .. })));
    }
}
