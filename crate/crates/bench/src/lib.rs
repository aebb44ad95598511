//! Workloads shared by the benchmarks.

use parlift::generate::random_game;
use parlift::tree::{OrderedLevelledTree, TreeChoice, DEFAULT_TREE_CAP};
use parlift::{ParityGame, Player};

/// A random game with its two trees, built once per benchmark.
pub struct Workload {
    pub name: String,
    pub game: ParityGame,
    pub even: OrderedLevelledTree,
    pub odd: OrderedLevelledTree,
}

impl Workload {
    pub fn random(n: usize, max_priority: u32, choice: TreeChoice, seed: u64) -> Self {
        let game = random_game(n, 3, max_priority, seed);
        let h = game.d() / 2;
        let even = choice.build(Player::Even, h, n, DEFAULT_TREE_CAP).expect("tree fits the cap");
        let odd = choice.build(Player::Odd, h, n, DEFAULT_TREE_CAP).expect("tree fits the cap");
        Workload { name: format!("n{n}-d{}-{choice}", game.d()), game, even, odd }
    }
}

/// The default sweep: small complete trees, then larger games on succinct trees.
pub fn sweep() -> Vec<Workload> {
    let mut out = vec![Workload::random(8, 4, TreeChoice::Auto, 1), Workload::random(12, 6, TreeChoice::Auto, 2)];
    for n in [32, 64] {
        out.push(Workload::random(n, 6, TreeChoice::Succinct(n), n as u64));
    }
    out
}
