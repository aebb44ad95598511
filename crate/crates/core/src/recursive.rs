//! Attractor-based recursions: the universal-tree-guided recursion, and
//! classic Zielonka with winning strategies.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::attractor::attractor_in;
use crate::error::SolveError;
use crate::game::{ParityGame, Player, PositionalStrategy, Vertex, WinningPartition};
use crate::labelling::check_height;
use crate::lazy::LazySpace;
use crate::symmetric::interleaving::{self, InterleavingNode, SpacePair, TreePair};
use crate::symmetric::{solve_symmetric, EngineOptions, Mode, Snapshot, SymmetricResult};
use crate::tree::OrderedLevelledTree;
use crate::vertex_set::VertexSet;

/// Sets computed for one child in one call.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniversalFrame {
    pub g: VertexSet,
    pub a: VertexSet,
    pub g_prime: VertexSet,
    pub u: VertexSet,
    pub b: VertexSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniversalRun {
    /// What the root call returns: the Even winning region.
    pub even_region: VertexSet,
    /// Every call, empty ones included.
    pub calls: u64,
    pub frames: BTreeMap<InterleavingNode, Vec<UniversalFrame>>,
}

/// Runs the recursion from `(Even, V, root_Even, root_Odd)`.
pub fn solve_universal(
    game: &ParityGame,
    even: &OrderedLevelledTree,
    odd: &OrderedLevelledTree,
    record_frames: bool,
) -> Result<UniversalRun, SolveError> {
    if even.flavor() != Player::Even || odd.flavor() != Player::Odd {
        return Err(SolveError::FlavorMismatch);
    }
    if even.height() != odd.height() {
        return Err(SolveError::HeightMismatch);
    }
    if game.d() > even.d() {
        return Err(SolveError::TreeTooShallow { height: even.height(), tree_d: even.d(), max_priority: game.d() });
    }
    let mut run = UniversalRun { even_region: VertexSet::empty(game.len()), calls: 0, frames: BTreeMap::new() };
    let trees = TreePair { even, odd };
    run.even_region = solve_at(game, &trees, InterleavingNode::root(), game.all(), record_frames, &mut run);
    Ok(run)
}

/// One call at node `n` on subgame `g`; returns what `n.p` keeps.
pub fn solve_at(
    game: &ParityGame,
    trees: &TreePair<'_>,
    n: InterleavingNode,
    g: VertexSet,
    record_frames: bool,
    run: &mut UniversalRun,
) -> VertexSet {
    run.calls += 1;
    if g.is_empty() {
        return g;
    }
    let h = n.level(trees);
    let top = game.vertices_with_priority(h);
    let mut gi = g;
    let mut frames = Vec::new();
    for c in n.children(trees) {
        let a = attractor_in(game, n.p, &gi.intersection(&top), &gi).set;
        let g_prime = gi.difference(&a);
        let u = solve_at(game, trees, c, g_prime.clone(), record_frames, run);
        let b = attractor_in(game, n.q(), &u, &gi).set;
        let next = gi.difference(&b);
        if record_frames {
            frames.push(UniversalFrame { g: gi, a, g_prime, u, b });
        }
        gi = next;
    }
    if record_frames {
        run.frames.insert(n, frames);
    }
    gi
}

/// Runs the short-lift/reset variant, capped at the interleaving size.
pub fn solve_variant<'a>(
    game: &'a ParityGame,
    even: &'a LazySpace,
    odd: &'a LazySpace,
    record_frames: bool,
) -> Result<SymmetricResult<'a>, SolveError> {
    let cap = TreePair { even: even.tree(), odd: odd.tree() }.interleaving_size();
    let options = EngineOptions {
        mode: Mode::Variant,
        record_trace: false,
        record_frames,
        call_cap: Some(u64::try_from(cap).unwrap_or(u64::MAX)),
    };
    solve_symmetric(game, even, odd, options)
}

/// Outcome of running the variant and the recursion side by side.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameReport {
    pub nodes_compared: usize,
    pub children_compared: usize,
    /// Failures of the two entry conditions: the subgame and the attractor
    /// to the top priority.
    pub mismatches: Vec<String>,
    /// Failures of the later conditions (subgame handed down, result, and
    /// opponent attractor).
    pub later_mismatches: Vec<String>,
    pub partitions_agree: bool,
    /// Whether the initial labellings meet the entry conditions the
    /// correspondence relies on at the root: every destination inside the
    /// root scope, and some vertex invalid for Odd.
    pub root_conditions_hold: bool,
}

impl FrameReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.partitions_agree
    }
}

/// Compares, at every node where the variant did not accelerate, each set
/// of the recursion with the vertices the variant holds in the matching
/// grid region at the matching instant.
pub fn check_frame_correspondence(
    game: &ParityGame,
    even: &LazySpace,
    odd: &LazySpace,
) -> Result<FrameReport, SolveError> {
    check_height(game, even)?;
    let variant = solve_variant(game, even, odd, true)?;
    let uni = solve_universal(game, even.tree(), odd.tree(), true)?;
    let spaces = SpacePair { even, odd };
    let mut report = FrameReport {
        partitions_agree: variant.even_region() == uni.even_region,
        root_conditions_hold: root_conditions_hold(game, even, odd)?,
        ..Default::default()
    };

    for (n, vf) in &variant.frames {
        if vf.accelerated {
            continue;
        }
        let Some(uf) = uni.frames.get(n) else { continue };
        report.nodes_compared += 1;
        let sp = spaces.get(n.p);
        let after_p = sp.after(n.np);
        let scope_n = interleaving::scope(&spaces, *n);
        let children = n.children(&spaces.trees());
        if children.len() != uf.len() || children.len() != vf.children.len() {
            report.mismatches.push(format!("{n:?}: child counts differ"));
            continue;
        }
        let at_after_p = |s: &Snapshot| -> VertexSet {
            let pos = s.get(n.p);
            VertexSet::from_vertices(pos.len(), (0..pos.len()).filter(|&v| pos[v] == after_p))
        };
        for (i, (c, (snaps, f))) in children.iter().zip(vf.children.iter().zip(uf)).enumerate() {
            report.children_compared += 1;
            let [m1, m2, m3, m4] = snaps;
            let a_region = interleaving::region_a(&spaces, *c).expect("children have an after position");
            if m1.preimage(&scope_n) != f.g {
                report.mismatches.push(format!("{n:?} child {i}: subgame differs from the scope after the first loop"));
            }
            if m2.preimage(&a_region) != f.a {
                report.mismatches.push(format!("{n:?} child {i}: attractor differs from A after the second loop"));
            }
            if m3.preimage(&interleaving::scope(&spaces, *c)) != f.g_prime {
                report.later_mismatches.push(format!("{n:?} child {i}: subgame handed down differs"));
            }
            if f.g_prime.intersection(&at_after_p(m4)) != f.u {
                report.later_mismatches.push(format!("{n:?} child {i}: recursive result differs"));
            }
            let next = vf.children.get(i + 1).map(|s| &s[0]).or(vf.after_a1.as_ref());
            match next {
                Some(next) if at_after_p(next).intersection(&m1.preimage(&scope_n)) == f.b => {}
                _ => report.later_mismatches.push(format!("{n:?} child {i}: opponent attractor differs")),
            }
        }
    }
    Ok(report)
}

/// Entry conditions of the correspondence at the root, for the smallest
/// labellings.
pub fn root_conditions_hold(game: &ParityGame, even: &LazySpace, odd: &LazySpace) -> Result<bool, SolveError> {
    let me = crate::labelling::Labelling::smallest(game, even)?;
    let mo = crate::labelling::Labelling::smallest(game, odd)?;
    let inside = game.vertices().all(|v| me.destination(v) < even.top() && mo.destination(v) < odd.top());
    Ok(game.is_empty() || (inside && !mo.invalid_vertices().is_empty()))
}

struct Split {
    win: [VertexSet; 2],
    /// A move for every vertex owned by the winner of its region.
    choice: Vec<Option<Vertex>>,
}

/// Classic Zielonka recursion, with positional winning strategies for both
/// players.
pub fn zielonka(game: &ParityGame) -> WinningPartition {
    let split = zielonka_in(game, &game.all());
    let strategy = |player: Player| {
        let choice: Vec<Option<Vertex>> = game
            .vertices()
            .map(|v| if split.win[player.index()].contains(v) { split.choice[v] } else { None })
            .collect();
        PositionalStrategy::from_choices(game, player, &choice)
    };
    let [even, odd] = split.win.clone();
    WinningPartition {
        even,
        odd,
        even_strategy: Some(strategy(Player::Even)),
        odd_strategy: Some(strategy(Player::Odd)),
    }
}

fn zielonka_in(game: &ParityGame, mask: &VertexSet) -> Split {
    let n = game.len();
    let mut choice = vec![None; n];
    let Some(p) = mask.iter().map(|v| game.priority(v)).max() else {
        return Split { win: [VertexSet::empty(n), VertexSet::empty(n)], choice };
    };
    let alpha = Player::of_priority(p);
    let beta = alpha.opponent();
    let top = game.vertices_with_priority(p).intersection(mask);
    let attr = attractor_in(game, alpha, &top, mask);
    let sub = zielonka_in(game, &mask.difference(&attr.set));

    if sub.win[beta.index()].is_empty() {
        for v in mask.iter() {
            if game.owner(v) != alpha {
                continue;
            }
            choice[v] = if top.contains(v) {
                game.successors(v).iter().copied().find(|&w| mask.contains(w))
            } else if attr.set.contains(v) {
                attr.witness[v]
            } else {
                sub.choice[v]
            };
        }
        let mut win = [VertexSet::empty(n), VertexSet::empty(n)];
        win[alpha.index()] = mask.clone();
        return Split { win, choice };
    }

    let battr = attractor_in(game, beta, &sub.win[beta.index()], mask);
    let rest = zielonka_in(game, &mask.difference(&battr.set));
    for v in mask.iter() {
        choice[v] = if !battr.set.contains(v) {
            rest.choice[v]
        } else if game.owner(v) != beta {
            None
        } else if sub.win[beta.index()].contains(v) {
            sub.choice[v]
        } else {
            battr.witness[v]
        };
    }
    let mut win = rest.win;
    win[beta.index()].union_with(&battr.set);
    Split { win, choice }
}
