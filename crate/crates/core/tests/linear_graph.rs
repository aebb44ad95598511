mod common;

use parlift::asym::{solve_asymmetric, LiftPolicy};
use parlift::generate::random_game;
use parlift::tree::{random_shape, OrderedLevelledTree, TreeChoice, DEFAULT_TREE_CAP};
use parlift::universal_graph::{check_labelling_correspondence, vertex_count, LinearGraph};
use parlift::{LazySpace, Player};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn size_follows_the_recurrence(h in 0u32..4, n in 1usize..5, seed in any::<u64>()) {
        let shape = random_shape(h, 3, &mut common::rng(seed));
        let t = OrderedLevelledTree::from_shape(Player::Even, h, &shape).unwrap();
        let g = LinearGraph::build(&t, n, DEFAULT_TREE_CAP).unwrap();
        prop_assert_eq!(g.len() as u128, vertex_count(&t, n));
        prop_assert!(g.len() <= 2 * n * t.len() + t.len());
        prop_assert_eq!(g.d(), 2 * h);
        // ranks increase along the layout
        prop_assert!((1..g.len()).all(|x| g.rank(x - 1) <= g.rank(x)));
    }

    #[test]
    fn least_decompositions_map_into_the_graph(n in 1usize..7, deg in 1usize..4, prio in 1u32..5, seed in any::<u64>()) {
        let game = random_game(n, deg, prio, seed);
        let t = TreeChoice::Auto.build(Player::Even, game.d() / 2, n, DEFAULT_TREE_CAP).unwrap();
        let space = LazySpace::new(&t);
        let (mu, _) = solve_asymmetric(&game, &space, LiftPolicy::MAX).unwrap();
        let verdict = check_labelling_correspondence(&game, &mu, DEFAULT_TREE_CAP).unwrap();
        prop_assert!(verdict.passed(), "{:?}", verdict);
        prop_assert_eq!(verdict.mapped_vertices, mu.below_top().len());
    }
}

#[test]
fn odd_trees_are_refused() {
    let t = OrderedLevelledTree::complete(Player::Odd, 1, 2, DEFAULT_TREE_CAP).unwrap();
    assert!(LinearGraph::build(&t, 2, DEFAULT_TREE_CAP).is_err());
}

#[test]
fn dump_lists_vertices_then_edges() {
    let t = OrderedLevelledTree::complete(Player::Even, 1, 1, DEFAULT_TREE_CAP).unwrap();
    let g = LinearGraph::build(&t, 1, DEFAULT_TREE_CAP).unwrap();
    let dump = g.dump();
    assert_eq!(dump.lines().filter(|l| l.starts_with("v ")).count(), 3);
    assert!(dump.contains("e 2 0 1"));
    assert!(!dump.contains("e 0 2 1"));
}
