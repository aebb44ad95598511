//! Ground truth and cross-checking: a strategy-enumeration oracle, and a
//! report that runs every solver on one game and checks the bounds.

use std::collections::{BTreeMap, VecDeque};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asym::{solve_asymmetric, LiftPolicy};
use crate::error::SolveError;
use crate::game::{ParityGame, Player, Vertex, WinningPartition};
use crate::lazy::LazySpace;
use crate::recursive::{solve_universal, solve_variant, zielonka};
use crate::strategy::{verify_strategy_wins, StrategyVerdict};
use crate::symmetric::{solve_symmetric, EngineOptions, Mode, PairLift};
use crate::tree::{OrderedLevelledTree, TreeChoice, DEFAULT_TREE_CAP};
use crate::vertex_set::VertexSet;

pub const DEFAULT_ORACLE_CAP: u128 = 1_000_000;

/// Number of positional strategies of `player`.
pub fn strategy_count(game: &ParityGame, player: Player) -> u128 {
    game.vertices()
        .filter(|&v| game.owner(v) == player)
        .map(|v| game.successors(v).len() as u128)
        .try_fold(1u128, |acc, k| acc.checked_mul(k))
        .unwrap_or(u128::MAX)
}

/// Winning regions by brute force. For each positional strategy of a player,
/// the vertices from which no cycle won by the opponent is reachable are
/// won with it. Both players are enumerated and the results must partition
/// the vertices.
pub fn oracle_enumerate(game: &ParityGame, cap: u128) -> Result<WinningPartition, SolveError> {
    for player in [Player::Even, Player::Odd] {
        let size = strategy_count(game, player);
        if size > cap {
            return Err(SolveError::OracleCap { size, cap });
        }
    }
    let even = enumerate_wins(game, Player::Even);
    let odd = enumerate_wins(game, Player::Odd);
    if !even.intersection(&odd).is_empty() || even.union(&odd) != game.all() {
        return Err(SolveError::Internal("the two enumerations do not partition the game".into()));
    }
    Ok(WinningPartition::from_even(game, even))
}

fn enumerate_wins(game: &ParityGame, player: Player) -> VertexSet {
    let n = game.len();
    let mine: Vec<Vertex> = game.vertices().filter(|&v| game.owner(v) == player).collect();
    let mut digits = vec![0usize; mine.len()];
    let mut won = VertexSet::empty(n);
    loop {
        let succ: Vec<Vec<Vertex>> = game
            .vertices()
            .map(|v| match mine.iter().position(|&u| u == v) {
                Some(k) => vec![game.successors(v)[digits[k]]],
                None => game.successors(v).to_vec(),
            })
            .collect();
        let lost = reaches_opponent_cycle(game, &succ, player.opponent());
        won.union_with(&lost.complement());

        // next strategy, mixed radix
        let mut k = 0;
        loop {
            if k == mine.len() {
                return won;
            }
            digits[k] += 1;
            if digits[k] < game.successors(mine[k]).len() {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

/// Vertices that can reach a cycle whose largest priority belongs to `winner`.
fn reaches_opponent_cycle(game: &ParityGame, succ: &[Vec<Vertex>], winner: Player) -> VertexSet {
    let n = game.len();
    let mut bad = VertexSet::empty(n);
    for v in game.vertices() {
        let p = game.priority(v);
        if Player::of_priority(p) != winner || bad.contains(v) {
            continue;
        }
        // is v on a cycle through vertices of priority at most p?
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([v]);
        let mut cycle = false;
        while let Some(x) = queue.pop_front() {
            for &y in &succ[x] {
                if game.priority(y) > p {
                    continue;
                }
                if y == v {
                    cycle = true;
                    break;
                }
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
            if cycle {
                break;
            }
        }
        if cycle {
            bad.insert(v);
        }
    }
    // backward closure
    let mut pred = vec![Vec::new(); n];
    for (x, ys) in succ.iter().enumerate() {
        for &y in ys {
            pred[y].push(x);
        }
    }
    let mut queue: VecDeque<Vertex> = bad.iter().collect();
    while let Some(y) = queue.pop_front() {
        for &x in &pred[y] {
            if bad.insert(x) {
                queue.push_back(x);
            }
        }
    }
    bad
}

/// Reference partition: enumeration within the cap, else Zielonka.
pub fn reference_partition(game: &ParityGame, cap: u128) -> (WinningPartition, &'static str) {
    match oracle_enumerate(game, cap) {
        Ok(w) => (w, "enumeration"),
        Err(_) => (zielonka(game), "zielonka"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverOutcome {
    pub even: Vec<Vertex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub micros: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub value: u128,
    pub bound: u128,
    pub ok: bool,
}

impl BoundCheck {
    fn at_most(value: u128, bound: u128) -> Self {
        BoundCheck { value, bound, ok: value <= bound }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub partition_equal: bool,
    /// Variant output sends the recursion's Even region to ⊤ for Odd and the
    /// rest to ⊤ for Even.
    pub mapping_ok: bool,
    pub t: u64,
    pub t_prime: u64,
    pub delta: usize,
    pub sandwich_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub game_id: String,
    pub vertices: usize,
    pub solvers: BTreeMap<String, SolverOutcome>,
    /// Which reference was used: `enumeration` or `zielonka`.
    pub reference: String,
    pub agreement: bool,
    pub strategies: BTreeMap<String, StrategyVerdict>,
    pub bounds: BTreeMap<String, BoundCheck>,
    /// Symmetric result: every vertex at ⊤ in some labelling, and each
    /// labelling below the asymmetric fixpoint of its flavor.
    pub symmetric_complete: bool,
    pub symmetric_below_fixpoints: bool,
    pub equivalence: EquivalenceReport,
    pub errors: Vec<String>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.partition_equal && self.mapping_ok && self.sandwich_ok
    }
}

impl CrossCheckReport {
    /// Agreement, winning strategies, bounds, and post-conditions all hold.
    pub fn ok(&self) -> bool {
        self.agreement
            && self.errors.is_empty()
            && self.strategies.values().all(StrategyVerdict::passed)
            && self.bounds.values().all(|b| b.ok)
            && self.symmetric_complete
            && self.symmetric_below_fixpoints
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrossCheckOptions {
    pub oracle_cap: u128,
    /// Record wall-clock times; off by default so reports are reproducible.
    pub timings: bool,
    pub symmetric_lift: PairLift,
}

impl Default for CrossCheckOptions {
    fn default() -> Self {
        CrossCheckOptions { oracle_cap: DEFAULT_ORACLE_CAP, timings: false, symmetric_lift: PairLift::Short }
    }
}

/// Runs every solver on `game` with the given trees and compares them.
pub fn cross_check(
    game_id: &str,
    game: &ParityGame,
    even: &OrderedLevelledTree,
    odd: &OrderedLevelledTree,
    options: CrossCheckOptions,
) -> CrossCheckReport {
    let se = LazySpace::new(even);
    let so = LazySpace::new(odd);
    let mut report = CrossCheckReport {
        game_id: game_id.to_string(),
        vertices: game.len(),
        solvers: BTreeMap::new(),
        reference: String::new(),
        agreement: false,
        strategies: BTreeMap::new(),
        bounds: BTreeMap::new(),
        symmetric_complete: false,
        symmetric_below_fixpoints: false,
        equivalence: EquivalenceReport::default(),
        errors: Vec::new(),
    };
    let record = |report: &mut CrossCheckReport, name: &str, start: Instant, result: Result<VertexSet, SolveError>| {
        let micros = options.timings.then(|| start.elapsed().as_micros());
        let outcome = match result {
            Ok(set) => SolverOutcome { even: set.to_vec(), micros, error: None },
            Err(e) => {
                report.errors.push(format!("{name}: {e}"));
                SolverOutcome { even: Vec::new(), micros, error: Some(e.to_string()) }
            }
        };
        report.solvers.insert(name.to_string(), outcome);
    };

    let lift_bound = |space: &LazySpace| (game.len() as u128) * space.len() as u128;
    let mut fixpoints = Vec::new();
    for (name, space) in [("asym-even", &se), ("asym-odd", &so)] {
        let start = Instant::now();
        match solve_asymmetric(game, space, LiftPolicy::MAX) {
            Ok((mu, stats)) => {
                let mine = mu.below_top();
                let even_set = if space.flavor() == Player::Even { mine.clone() } else { mine.complement() };
                record(&mut report, name, start, Ok(even_set));
                report
                    .bounds
                    .insert(format!("{name}-lifts"), BoundCheck::at_most(stats.lifts as u128, lift_bound(space)));
                match mu.extract_strategy() {
                    Ok(s) => match verify_strategy_wins(game, &s, &mine) {
                        Ok(v) => {
                            report.strategies.insert(name.to_string(), v);
                        }
                        Err(e) => report.errors.push(format!("{name} strategy: {e}")),
                    },
                    Err(e) => report.errors.push(format!("{name} strategy: {e}")),
                }
                fixpoints.push(mu);
            }
            Err(e) => record(&mut report, name, start, Err(e)),
        }
    }

    let start = Instant::now();
    let sym_options = EngineOptions { mode: Mode::Symmetric(options.symmetric_lift), ..Default::default() };
    match solve_symmetric(game, &se, &so, sym_options) {
        Ok(r) => {
            record(&mut report, "symmetric", start, Ok(r.even_region()));
            report.symmetric_complete = r.is_complete();
            report.symmetric_below_fixpoints =
                fixpoints.len() == 2 && r.pair.even.le(&fixpoints[0]) && r.pair.odd.le(&fixpoints[1]);
            let s = &r.stats;
            report
                .bounds
                .insert("symmetric-calls-by-lifts".into(), BoundCheck::at_most(s.calls as u128, s.lift_call_bound()));
            report
                .bounds
                .insert("symmetric-calls-by-size".into(), BoundCheck::at_most(s.calls as u128, s.size_call_bound()));
            report.bounds.insert(
                "symmetric-accelerating-run".into(),
                BoundCheck::at_most(s.max_accelerating_run as u128, s.accelerating_run_bound() as u128),
            );
        }
        Err(e) => record(&mut report, "symmetric", start, Err(e)),
    }

    let start = Instant::now();
    let variant = solve_variant(game, &se, &so, false);
    let variant_calls = variant.as_ref().map(|r| r.stats.calls).unwrap_or(0);
    let variant_tops = variant.as_ref().ok().map(|r| (r.pair.even.below_top(), r.pair.odd.below_top()));
    record(&mut report, "variant", start, variant.map(|r| r.even_region()));

    let start = Instant::now();
    let uni = solve_universal(game, even, odd, false);
    let uni_calls = uni.as_ref().map(|r| r.calls).unwrap_or(0);
    // the recursion's Even region sits at ⊤ in the variant's Odd labelling,
    // its complement at ⊤ in the Even labelling
    let mapping_ok = match (&uni, &variant_tops) {
        (Ok(u), Some((even_below, odd_below))) => {
            odd_below.intersection(&u.even_region).is_empty()
                && even_below.intersection(&u.even_region.complement()).is_empty()
        }
        _ => false,
    };
    record(&mut report, "universal", start, uni.map(|r| r.even_region));

    let start = Instant::now();
    let z = zielonka(game);
    for (player, s) in [(Player::Even, &z.even_strategy), (Player::Odd, &z.odd_strategy)] {
        if let Some(s) = s {
            match verify_strategy_wins(game, s, z.region(player)) {
                Ok(v) => {
                    report
                        .strategies
                        .insert(format!("zielonka-{}", if player == Player::Even { "even" } else { "odd" }), v);
                }
                Err(e) => report.errors.push(format!("zielonka strategy: {e}")),
            }
        }
    }
    record(&mut report, "zielonka", start, Ok(z.even));

    let start = Instant::now();
    match oracle_enumerate(game, options.oracle_cap) {
        Ok(w) => {
            report.reference = "enumeration".into();
            record(&mut report, "oracle", start, Ok(w.even));
        }
        Err(SolveError::OracleCap { .. }) => report.reference = "zielonka".into(),
        Err(e) => record(&mut report, "oracle", start, Err(e)),
    }

    let delta = even.max_degree().max(odd.max_degree());
    let (t, tp) = (variant_calls, uni_calls);
    report.equivalence = EquivalenceReport {
        partition_equal: report.solvers.get("variant").map(|o| &o.even)
            == report.solvers.get("universal").map(|o| &o.even),
        mapping_ok,
        t,
        t_prime: tp,
        delta,
        sandwich_ok: t <= tp && tp as u128 <= (delta as u128 + 1) * t as u128,
    };
    let mut partitions = report.solvers.values().filter(|o| o.error.is_none()).map(|o| &o.even);
    let first = partitions.next();
    report.agreement = report.solvers.values().all(|o| o.error.is_none()) && partitions.all(|p| Some(p) == first);
    report
}

/// Builds both trees for `game` from a choice: height `d/2`, sized for |G|.
pub fn trees_for(
    game: &ParityGame,
    choice: TreeChoice,
    cap: u128,
) -> Result<(OrderedLevelledTree, OrderedLevelledTree), SolveError> {
    let h = game.d() / 2;
    let n = game.len();
    Ok((choice.build(Player::Even, h, n, cap)?, choice.build(Player::Odd, h, n, cap)?))
}

/// Cross-checks many games in parallel; reports come back in input order.
pub fn cross_check_batch(
    games: &[(String, ParityGame)],
    choice: TreeChoice,
    options: CrossCheckOptions,
) -> Vec<Result<CrossCheckReport, SolveError>> {
    games
        .par_iter()
        .map(|(id, g)| {
            let (te, to) = trees_for(g, choice, DEFAULT_TREE_CAP)?;
            Ok(cross_check(id, g, &te, &to, options))
        })
        .collect()
}
