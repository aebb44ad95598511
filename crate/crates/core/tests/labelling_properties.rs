mod common;

use parlift::asym::{lift_to_fixpoint, solve_asymmetric, LiftPolicy, TargetRule, VertexSelection};
use parlift::game::Player;
use parlift::lazy::LazySpace;
use proptest::prelude::*;

fn flavor(even: bool) -> Player {
    if even {
        Player::Even
    } else {
        Player::Odd
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn destination_is_monotone(seed in any::<u64>(), even in any::<bool>()) {
        let (g, t) = common::small_instance(seed, flavor(even));
        let space = LazySpace::new(&t);
        let mut r = common::rng(seed);
        let m1 = common::random_labelling(&g, &space, &mut r);
        let m2 = common::raise(&m1, &mut r);
        prop_assert!(m1.le(&m2));
        for v in g.vertices() {
            prop_assert!(m1.destination(v) <= m2.destination(v));
        }
    }

    #[test]
    fn destination_matches_scan(seed in any::<u64>(), even in any::<bool>()) {
        let (g, t) = common::small_instance(seed, flavor(even));
        let space = LazySpace::new(&t);
        let mu = common::random_labelling(&g, &space, &mut common::rng(seed));
        for v in g.vertices() {
            let d = mu.destination(v);
            prop_assert_eq!(d, mu.destination_bruteforce(v));
            prop_assert_eq!(d == mu.position(v), mu.is_vertex_valid(v));
        }
    }

    #[test]
    fn pointwise_min_stays_valid(seed in any::<u64>(), even in any::<bool>()) {
        let (g, t) = common::small_instance(seed, flavor(even));
        let space = LazySpace::new(&t);
        let mut r = common::rng(seed);
        let mut a = common::random_labelling(&g, &space, &mut r);
        let mut b = common::random_labelling(&g, &space, &mut r);
        lift_to_fixpoint(&mut a, LiftPolicy::MAX, &mut |_| {}).unwrap();
        lift_to_fixpoint(&mut b, LiftPolicy::MAX, &mut |_| {}).unwrap();
        prop_assert!(a.pointwise_min(&b).unwrap().is_attractor_decomposition());
    }

    #[test]
    fn validity_transfers_downwards(seed in any::<u64>(), even in any::<bool>()) {
        let (g, t) = common::small_instance(seed, flavor(even));
        let space = LazySpace::new(&t);
        let mut r = common::rng(seed);
        let lower = common::random_labelling(&g, &space, &mut r);
        let upper = common::raise(&lower, &mut r);
        for u in g.vertices() {
            if upper.position(u) == lower.position(u) && upper.is_vertex_valid(u) {
                prop_assert!(lower.is_vertex_valid(u));
            }
        }
    }

    #[test]
    fn least_decomposition_buckets_are_attractors(seed in any::<u64>(), even in any::<bool>()) {
        let (g, t) = common::small_instance(seed, flavor(even));
        let space = LazySpace::new(&t);
        let (mu, stats) = solve_asymmetric(&g, &space, LiftPolicy::MAX).unwrap();
        prop_assert!(mu.is_attractor_decomposition());
        prop_assert!(mu.lazy_attractor_mismatches().is_empty());
        prop_assert!(stats.lifts as usize <= g.len() * space.len());
        let mut other = common::random_labelling(&g, &space, &mut common::rng(seed));
        lift_to_fixpoint(&mut other, LiftPolicy::MAX, &mut |_| {}).unwrap();
        prop_assert!(mu.le(&other));
    }

    #[test]
    fn every_lift_policy_reaches_the_same_fixpoint(seed in any::<u64>(), even in any::<bool>()) {
        let (g, t) = common::small_instance(seed, flavor(even));
        let space = LazySpace::new(&t);
        let reference = solve_asymmetric(&g, &space, LiftPolicy::MAX).unwrap().0;
        for selection in [VertexSelection::SmallestId, VertexSelection::LargestId] {
            for target in [TargetRule::ToDestination, TargetRule::MinimalStep, TargetRule::ShortLift] {
                let (mu, _) = solve_asymmetric(&g, &space, LiftPolicy { selection, target }).unwrap();
                prop_assert_eq!(mu.positions(), reference.positions());
            }
        }
    }
}

#[test]
fn all_top_is_valid_but_not_least() {
    // an Even self-loop of priority 2 sits at the root of a height-1 Even
    // tree in the least decomposition; ⊤ is valid but not least
    let g = parlift::ParityGame::new(vec![Player::Even], vec![2], vec![vec![0]]).unwrap();
    let t = parlift::OrderedLevelledTree::from_shape(Player::Even, 1, &parlift::Shape::star(1, 1)).unwrap();
    let space = LazySpace::new(&t);
    let least = solve_asymmetric(&g, &space, LiftPolicy::MAX).unwrap().0;
    assert!(!least.is_top(0));
    let top = parlift::Labelling::all_top(&g, &space);
    assert!(top.is_attractor_decomposition());
    assert!(least.le(&top));
}
