//! Asymmetric lifting: raise invalid vertices until every vertex is valid.
//! Starting from the smallest labelling this reaches the least attractor
//! decomposition embedded in the tree, whatever the lift policy.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::game::{ParityGame, Vertex};
use crate::labelling::Labelling;
use crate::lazy::LazySpace;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexSelection {
    #[default]
    SmallestId,
    LargestId,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetRule {
    /// Straight to the destination.
    #[default]
    ToDestination,
    /// The next admissible position.
    MinimalStep,
    /// The destination, but no further than just past the innermost node
    /// whose subtree holds the vertex.
    ShortLift,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftPolicy {
    pub selection: VertexSelection,
    pub target: TargetRule,
}

impl LiftPolicy {
    pub const MAX: LiftPolicy =
        LiftPolicy { selection: VertexSelection::SmallestId, target: TargetRule::ToDestination };
}

impl fmt::Display for TargetRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TargetRule::ToDestination => "max",
            TargetRule::MinimalStep => "min-step",
            TargetRule::ShortLift => "short",
        })
    }
}

impl FromStr for TargetRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max" => Ok(TargetRule::ToDestination),
            "min-step" => Ok(TargetRule::MinimalStep),
            "short" => Ok(TargetRule::ShortLift),
            _ => Err(format!("unknown lift target {s:?}; expected max, min-step or short")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub lifts: u64,
    pub validity_checks: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Runs the lifting loop on `mu` until it is an attractor decomposition.
/// `observer` sees the labelling after every lift.
pub fn lift_to_fixpoint(
    mu: &mut Labelling<'_>,
    policy: LiftPolicy,
    observer: &mut dyn FnMut(&Labelling<'_>),
) -> Result<SolveStats, SolveError> {
    let start = Instant::now();
    let game = mu.game();
    let space = mu.space();
    let mut stats = SolveStats::default();
    let mut work: BTreeSet<Vertex> = mu.invalid_vertices().into_iter().collect();
    stats.validity_checks += game.len() as u64;

    loop {
        let v = match policy.selection {
            VertexSelection::SmallestId => work.pop_first(),
            VertexSelection::LargestId => work.pop_last(),
        };
        let Some(v) = v else { break };
        stats.validity_checks += 1;
        if mu.is_vertex_valid(v) {
            continue;
        }
        let old = mu.position(v);
        let dest = mu.destination(v);
        let target = match policy.target {
            TargetRule::ToDestination => dest,
            TargetRule::MinimalStep => {
                space.next_admissible(old, game.priority(v)).expect("invalid vertices are below ⊤")
            }
            TargetRule::ShortLift => {
                let n = space.enclosing(old).expect("invalid vertices are below ⊤");
                dest.min(space.after(n))
            }
        };
        mu.lift(v, target)?;
        stats.lifts += 1;
        observer(mu);

        work.insert(v);
        work.extend(game.predecessors(v).iter().copied());
        work.extend(mu.members(old).iter().copied());
        work.extend(mu.members(target).iter().copied());
        for &u in game.predecessors(v) {
            work.extend(mu.members(mu.position(u)).iter().copied());
        }
    }
    stats.elapsed = start.elapsed();
    Ok(stats)
}

/// Least attractor decomposition of `game` embedded in the space's tree, for
/// the space's flavor.
pub fn solve_asymmetric<'a>(
    game: &'a ParityGame,
    space: &'a LazySpace,
    policy: LiftPolicy,
) -> Result<(Labelling<'a>, SolveStats), SolveError> {
    solve_asymmetric_observed(game, space, policy, &mut |_| {})
}

pub fn solve_asymmetric_observed<'a>(
    game: &'a ParityGame,
    space: &'a LazySpace,
    policy: LiftPolicy,
    observer: &mut dyn FnMut(&Labelling<'_>),
) -> Result<(Labelling<'a>, SolveStats), SolveError> {
    let mut mu = Labelling::smallest(game, space)?;
    let stats = lift_to_fixpoint(&mut mu, policy, observer)?;
    debug_assert!(mu.is_attractor_decomposition());
    Ok((mu, stats))
}
