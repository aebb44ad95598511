#![allow(dead_code)]

use parlift::game::{ParityGame, Player, Priority};
use parlift::generate::random_game;
use parlift::labelling::Labelling;
use parlift::lazy::{LazySpace, Pos};
use parlift::tree::{random_shape, OrderedLevelledTree};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Game `seed` of the random corpus: up to 40 vertices, priorities up to 6,
/// out-degree up to 4.
pub fn corpus_game(seed: u64) -> ParityGame {
    let mut r = rng(seed ^ 0x5eed);
    let n = r.gen_range(1..=40);
    let prio = r.gen_range(1..=6);
    let deg = r.gen_range(1..=4);
    random_game(n, deg, prio, seed)
}

/// A random admissible position at or above `from` for `priority`.
pub fn admissible_at_least(space: &LazySpace, priority: Priority, from: Pos, r: &mut impl Rng) -> Pos {
    let options: Vec<Pos> = (from..=space.top()).filter(|&p| space.admissible(p, priority)).collect();
    options[r.gen_range(0..options.len())]
}

/// A random labelling; small positions are favoured so that not every vertex
/// lands at ⊤.
pub fn random_labelling<'a>(game: &'a ParityGame, space: &'a LazySpace, r: &mut impl Rng) -> Labelling<'a> {
    let pos = game
        .vertices()
        .map(|v| {
            let options: Vec<Pos> = (0..=space.top()).filter(|&p| space.admissible(p, game.priority(v))).collect();
            let a = r.gen_range(0..options.len());
            let b = r.gen_range(0..options.len());
            options[a.min(b)]
        })
        .collect();
    Labelling::from_positions(game, space, pos).unwrap()
}

/// `mu` with some vertices raised to random admissible positions.
pub fn raise<'a>(mu: &Labelling<'a>, r: &mut impl Rng) -> Labelling<'a> {
    let game = mu.game();
    let space = mu.space();
    let pos = game
        .vertices()
        .map(|v| {
            if r.gen_bool(0.4) {
                admissible_at_least(space, game.priority(v), mu.position(v), r)
            } else {
                mu.position(v)
            }
        })
        .collect();
    Labelling::from_positions(game, space, pos).unwrap()
}

/// A small random game and a random tree of matching height for `flavor`.
pub fn small_instance(seed: u64, flavor: Player) -> (ParityGame, OrderedLevelledTree) {
    let mut r = rng(seed);
    let n = r.gen_range(1..=7);
    let prio = r.gen_range(1..=6);
    let deg = r.gen_range(1..=3);
    let game = random_game(n, deg, prio, seed.wrapping_mul(31).wrapping_add(7));
    let h = game.d() / 2;
    let shape = random_shape(h, 3, &mut r);
    let tree = OrderedLevelledTree::from_shape(flavor, h, &shape).unwrap();
    (game, tree)
}
