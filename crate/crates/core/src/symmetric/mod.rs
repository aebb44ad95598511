//! Symmetric solving: one Even and one Odd labelling lifted together by a
//! recursion over the interleaving of the two trees. The same engine runs
//! the short-lift/reset variant used to mirror the attractor recursion.

pub mod interleaving;
pub mod trace;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::game::{ParityGame, Player, Vertex};
use crate::labelling::{Labelling, LabellingPair};
use crate::lazy::{LazySpace, Pos};
use crate::vertex_set::VertexSet;
pub use interleaving::{InterleavingNode, Rect, RegionKind, SpacePair, TreePair};
pub use trace::{trace_to_svg, Move, Trace, TraceCounters, TraceEvent};

/// How a vertex leaving a `B` or `A` region is lifted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairLift {
    /// Just out of the region, to the nearest position the proof names.
    #[default]
    Short,
    /// Both coordinates to their destinations.
    Max,
}

impl fmt::Display for PairLift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairLift::Short => "short",
            PairLift::Max => "max",
        })
    }
}

impl FromStr for PairLift {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "short" => Ok(PairLift::Short),
            "max" => Ok(PairLift::Max),
            _ => Err(format!("unknown lift policy {s:?}; expected short or max")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Symmetric(PairLift),
    /// Three fixed while-loops per child, and a reset after every call.
    Variant,
}

impl Default for Mode {
    fn default() -> Self {
        Mode::Symmetric(PairLift::Short)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EngineOptions {
    pub mode: Mode,
    pub record_trace: bool,
    /// Snapshot the labellings at each loop boundary (variant mode only).
    pub record_frames: bool,
    pub call_cap: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetricStats {
    pub calls: u64,
    pub accelerating_calls: u64,
    /// Longest run of consecutive accelerating calls.
    pub max_accelerating_run: u64,
    /// Lifts per labelling; acceleration moves count here too.
    pub lifts_even: u64,
    pub lifts_odd: u64,
    pub acceleration_moves: u64,
    pub reset_moves: u64,
    pub d: u32,
    pub delta: usize,
    pub vertices: usize,
    pub lazy_even: usize,
    pub lazy_odd: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SymmetricStats {
    pub fn total_lifts(&self) -> u64 {
        self.lifts_even + self.lifts_odd
    }

    /// `2·d·δ·(total lifts + 1)`.
    pub fn lift_call_bound(&self) -> u128 {
        2 * self.d as u128 * self.delta as u128 * (self.total_lifts() as u128 + 1)
    }

    /// `2·d·δ·(|G|·min(|lazy Even|, |lazy Odd|) + 1)`.
    pub fn size_call_bound(&self) -> u128 {
        let m = self.lazy_even.min(self.lazy_odd) as u128;
        2 * self.d as u128 * self.delta as u128 * (self.vertices as u128 * m + 1)
    }

    /// `d·δ`.
    pub fn accelerating_run_bound(&self) -> u64 {
        self.d as u64 * self.delta as u64
    }
}

/// Both labellings at one instant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub even: Vec<Pos>,
    pub odd: Vec<Pos>,
}

impl Snapshot {
    fn of(mu: &LabellingPair<'_>) -> Self {
        Snapshot { even: mu.even.positions().to_vec(), odd: mu.odd.positions().to_vec() }
    }

    pub fn get(&self, player: Player) -> &[Pos] {
        match player {
            Player::Even => &self.even,
            Player::Odd => &self.odd,
        }
    }

    /// Vertices whose pair of positions lies in `r`.
    pub fn preimage(&self, r: &Rect) -> VertexSet {
        let n = self.even.len();
        VertexSet::from_vertices(n, (0..n).filter(|&v| r.contains(self.even[v], self.odd[v])))
    }
}

/// Labellings recorded during one variant call at a node. `children[i]` holds
/// the state after the first, second and third while-loop and after the
/// recursive call, for the `i`-th child.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantFrame {
    pub entry: Option<Snapshot>,
    pub accelerated: bool,
    pub children: Vec<[Snapshot; 4]>,
    /// After the first loop over `A` of the last child.
    pub after_a1: Option<Snapshot>,
    pub exit: Option<Snapshot>,
}

pub struct SymmetricResult<'a> {
    pub pair: LabellingPair<'a>,
    pub stats: SymmetricStats,
    pub trace: Trace,
    pub frames: BTreeMap<InterleavingNode, VariantFrame>,
}

impl SymmetricResult<'_> {
    /// Vertices sent to ⊤ in the Odd labelling.
    pub fn even_region(&self) -> VertexSet {
        let odd = &self.pair.odd;
        VertexSet::from_vertices(odd.game().len(), odd.game().vertices().filter(|&v| odd.is_top(v)))
    }

    /// Every vertex has reached ⊤ in at least one labelling.
    pub fn is_complete(&self) -> bool {
        let g = self.pair.even.game();
        g.vertices().all(|v| self.pair.even.is_top(v) || self.pair.odd.is_top(v))
    }
}

/// Runs the symmetric solver from the pair of smallest labellings.
pub fn solve_symmetric<'a>(
    game: &'a ParityGame,
    even: &'a LazySpace,
    odd: &'a LazySpace,
    options: EngineOptions,
) -> Result<SymmetricResult<'a>, SolveError> {
    if even.flavor() != Player::Even || odd.flavor() != Player::Odd {
        return Err(SolveError::FlavorMismatch);
    }
    if even.tree().height() != odd.tree().height() {
        return Err(SolveError::HeightMismatch);
    }
    let start = Instant::now();
    let pair = LabellingPair { even: Labelling::smallest(game, even)?, odd: Labelling::smallest(game, odd)? };
    let spaces = SpacePair { even, odd };
    let trees = spaces.trees();
    let mut engine = Engine {
        game,
        spaces,
        mu: pair,
        options,
        stats: SymmetricStats {
            d: even.tree().d(),
            delta: trees.delta(),
            vertices: game.len(),
            lazy_even: even.len(),
            lazy_odd: odd.len(),
            ..Default::default()
        },
        run: 0,
        trace: Trace::new(options.record_trace),
        frames: BTreeMap::new(),
    };
    engine
        .trace
        .push(TraceEvent::Init { even: engine.mu.even.positions().to_vec(), odd: engine.mu.odd.positions().to_vec() });
    engine.empty_scope(InterleavingNode::root())?;
    let mut stats = engine.stats;
    stats.elapsed = start.elapsed();
    Ok(SymmetricResult { pair: engine.mu, stats, trace: engine.trace, frames: engine.frames })
}

struct Engine<'a> {
    game: &'a ParityGame,
    spaces: SpacePair<'a>,
    mu: LabellingPair<'a>,
    options: EngineOptions,
    stats: SymmetricStats,
    run: u64,
    trace: Trace,
    frames: BTreeMap<InterleavingNode, VariantFrame>,
}

/// Which side of a `B` or `A` region a vertex leaves through.
enum Exit {
    /// `P` moves to `after(n^P)`.
    PastP,
    /// `Q` moves to the given position.
    Q(Pos),
    /// Max policy: both coordinates to their destinations.
    Both,
}

impl<'a> Engine<'a> {
    fn pair_of(&self, v: Vertex) -> (Pos, Pos) {
        (self.mu.even.position(v), self.mu.odd.position(v))
    }

    fn in_rect(&self, v: Vertex, r: &Rect) -> bool {
        let (e, o) = self.pair_of(v);
        r.contains(e, o)
    }

    fn count_lift(&mut self, axis: Player) {
        match axis {
            Player::Even => self.stats.lifts_even += 1,
            Player::Odd => self.stats.lifts_odd += 1,
        }
    }

    fn lift(&mut self, v: Vertex, axis: Player, target: Pos) -> Result<(), SolveError> {
        let space = self.spaces.get(axis);
        let from = self.mu.get(axis).position(v);
        self.mu.get_mut(axis).lift(v, target)?;
        self.count_lift(axis);
        self.trace
            .push(TraceEvent::Lift { axis, step: Move { vertex: v, from: space.info(from), to: space.info(target) } });
        Ok(())
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot::of(&self.mu)
    }

    fn recording_frames(&self) -> bool {
        self.options.record_frames && self.options.mode == Mode::Variant
    }

    fn empty_scope(&mut self, n: InterleavingNode) -> Result<(), SolveError> {
        self.stats.calls += 1;
        if let Some(cap) = self.options.call_cap {
            if self.stats.calls > cap {
                return Err(SolveError::CallCap { cap });
            }
        }
        self.trace.push(TraceEvent::CallEnter { node: n });
        let (p, q) = (n.p, n.q());
        let (sp, sq) = (self.spaces.get(p), self.spaces.get(q));
        let scope = interleaving::scope(&self.spaces, n);
        let members: Vec<Vertex> = self.game.vertices().filter(|&v| self.in_rect(v, &scope)).collect();
        let mut frame = VariantFrame::default();
        if self.recording_frames() {
            frame.entry = Some(self.snapshot());
        }

        let winner = [Player::Even, Player::Odd].into_iter().find(|&r| {
            let mu = self.mu.get(r);
            let mut memo = HashMap::new();
            members.iter().all(|&v| mu.vertex_valid_memo(v, &mut memo))
        });

        if let Some(r) = winner {
            self.stats.accelerating_calls += 1;
            self.run += 1;
            self.stats.max_accelerating_run = self.stats.max_accelerating_run.max(self.run);
            frame.accelerated = true;
            let rb = r.opponent();
            let space = self.spaces.get(rb);
            let target = space.after(n.node_of(rb));
            let mut moves = Vec::with_capacity(members.len());
            for &v in &members {
                let from = self.mu.get(rb).position(v);
                self.mu.get_mut(rb).set_position(v, target)?;
                self.count_lift(rb);
                self.stats.acceleration_moves += 1;
                moves.push(Move { vertex: v, from: space.info(from), to: space.info(target) });
            }
            self.trace.push(TraceEvent::Acceleration { node: n, winner: r, moves });
        } else {
            self.run = 0;
            let children = n.children(&self.spaces.trees());
            if children.is_empty() {
                return Err(SolveError::Internal(format!("non-accelerating call at leaf {n:?}")));
            }
            let after_p = sp.after(n.np);
            for &c in &children {
                // c.np is a node of the Q tree
                let b = interleaving::region_b(&self.spaces, c).expect("children have a before position");
                let before_c = sq.before(c.np).expect("children have a before position");
                let after_c = sq.after(c.np);
                let level_c = sq.tree().level(c.np);
                let pos_c = sq.pos(c.np);
                let step_in =
                    move |prio: u32| if prio == level_c { pos_c } else { sq.succ(pos_c).expect("inner position") };
                match self.options.mode {
                    Mode::Symmetric(policy) => {
                        self.drain(
                            &members,
                            &b,
                            policy,
                            |this, v| {
                                let dp = this.mu.get(p).destination(v);
                                let dq = this.mu.get(q).destination(v);
                                if dp >= after_p {
                                    Some((0, Exit::PastP))
                                } else if dq >= after_c {
                                    Some((1, Exit::Q(after_c)))
                                } else if dq > before_c {
                                    Some((2, Exit::Q(step_in(this.game.priority(v)))))
                                } else {
                                    None
                                }
                            },
                            after_p,
                            p,
                            q,
                        )?;
                    }
                    Mode::Variant => {
                        let mut snaps: Vec<Snapshot> = Vec::new();
                        self.while_dest(&members, &b, p, after_p, after_p)?;
                        if self.recording_frames() {
                            snaps.push(self.snapshot());
                        }
                        self.while_dest(&members, &b, q, after_c, after_c)?;
                        if self.recording_frames() {
                            snaps.push(self.snapshot());
                        }
                        for &v in &members {
                            if self.in_rect(v, &b) {
                                let t = step_in(self.game.priority(v));
                                self.lift(v, q, t)?;
                            }
                        }
                        if self.recording_frames() {
                            snaps.push(self.snapshot());
                        }
                        self.empty_scope(c)?;
                        if self.recording_frames() {
                            snaps.push(self.snapshot());
                            frame.children.push(snaps.try_into().expect("four snapshots"));
                        }
                    }
                }
                if members.iter().any(|&v| self.in_rect(v, &b)) {
                    return Err(SolveError::Internal(format!("B({c:?}) not emptied")));
                }
                if matches!(self.options.mode, Mode::Symmetric(_)) {
                    self.empty_scope(c)?;
                }
            }

            let last = *children.last().expect("non-empty");
            let a = interleaving::region_a(&self.spaces, last).expect("children have an after position");
            let after_ck = sq.after(last.np);
            let after_q = sq.after(n.nq);
            match self.options.mode {
                Mode::Symmetric(policy) => {
                    self.drain(
                        &members,
                        &a,
                        policy,
                        |this, v| {
                            let dp = this.mu.get(p).destination(v);
                            let dq = this.mu.get(q).destination(v);
                            if dp >= after_p {
                                Some((0, Exit::PastP))
                            } else if dq > after_ck {
                                Some((1, Exit::Q(after_q)))
                            } else {
                                None
                            }
                        },
                        after_p,
                        p,
                        q,
                    )?;
                }
                Mode::Variant => {
                    self.while_dest(&members, &a, p, after_p, after_p)?;
                    if self.recording_frames() {
                        frame.after_a1 = Some(self.snapshot());
                    }
                    for &v in &members {
                        if self.in_rect(v, &a) {
                            self.lift(v, q, after_q)?;
                        }
                    }
                }
            }
            if members.iter().any(|&v| self.in_rect(v, &scope)) {
                return Err(SolveError::Internal(format!("scope of {n:?} not emptied")));
            }
        }

        if self.options.mode == Mode::Variant {
            self.reset(n)?;
        }
        if self.recording_frames() {
            frame.exit = Some(self.snapshot());
            self.frames.insert(n, frame);
        }
        self.trace.push(TraceEvent::CallExit { node: n });
        Ok(())
    }

    /// Variant loop: while some vertex of `region` has destination at least
    /// `threshold` on `axis`, lift the smallest such vertex to `target`.
    fn while_dest(
        &mut self,
        members: &[Vertex],
        region: &Rect,
        axis: Player,
        threshold: Pos,
        target: Pos,
    ) -> Result<(), SolveError> {
        loop {
            let pick = members
                .iter()
                .copied()
                .filter(|&v| self.in_rect(v, region))
                .find(|&v| self.mu.get(axis).destination(v) >= threshold);
            match pick {
                Some(v) => self.lift(v, axis, target)?,
                None => return Ok(()),
            }
        }
    }

    /// Symmetric loop over a `B` or `A` region. `classify` says how a vertex
    /// leaves the region, with a rank; the lowest rank goes first, ties to
    /// the smallest vertex, and the scan restarts after every lift.
    #[allow(clippy::too_many_arguments)]
    fn drain(
        &mut self,
        members: &[Vertex],
        region: &Rect,
        policy: PairLift,
        classify: impl Fn(&Self, Vertex) -> Option<(u8, Exit)>,
        after_p: Pos,
        p: Player,
        q: Player,
    ) -> Result<(), SolveError> {
        loop {
            let mut best: Option<(u8, Vertex, Exit)> = None;
            for &v in members {
                if !self.in_rect(v, region) {
                    continue;
                }
                if let Some((rank, exit)) = classify(self, v) {
                    if best.as_ref().is_none_or(|b| rank < b.0) {
                        best = Some((rank, v, exit));
                        if rank == 0 {
                            break;
                        }
                    }
                }
            }
            let Some((_, v, exit)) = best else { return Ok(()) };
            let exit = if policy == PairLift::Max { Exit::Both } else { exit };
            match exit {
                Exit::PastP => self.lift(v, p, after_p)?,
                Exit::Q(t) => self.lift(v, q, t)?,
                Exit::Both => {
                    for axis in [p, q] {
                        let d = self.mu.get(axis).destination(v);
                        if d > self.mu.get(axis).position(v) {
                            self.lift(v, axis, d)?;
                        }
                    }
                }
            }
        }
    }

    /// Vertices at `{after(n^P)} ×_P subtree⁻(n^Q)` go back to `succ(n^Q)`.
    fn reset(&mut self, n: InterleavingNode) -> Result<(), SolveError> {
        let (p, q) = (n.p, n.q());
        let (sp, sq) = (self.spaces.get(p), self.spaces.get(q));
        let after_p = sp.after(n.np);
        let inner = sq.subtree_strict(n.nq);
        let Some(target) = sq.succ(sq.pos(n.nq)) else { return Ok(()) };
        let mut moves = Vec::new();
        for v in self.game.vertices() {
            let (pp, pq) = (self.mu.get(p).position(v), self.mu.get(q).position(v));
            if pp == after_p && inner.contains(&pq) && pq != target {
                self.mu.get_mut(q).set_position(v, target)?;
                moves.push(Move { vertex: v, from: sq.info(pq), to: sq.info(target) });
            }
        }
        if !moves.is_empty() {
            self.stats.reset_moves += moves.len() as u64;
            self.trace.push(TraceEvent::Reset { node: n, axis: q, moves });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asym::{solve_asymmetric, LiftPolicy};
    use crate::generate::random_game;
    use crate::tree::{OrderedLevelledTree, DEFAULT_TREE_CAP};
    use Player::{Even, Odd};

    fn spaces(h: u32, b: usize) -> (LazySpace, LazySpace) {
        (
            LazySpace::new(&OrderedLevelledTree::complete(Even, h, b, DEFAULT_TREE_CAP).unwrap()),
            LazySpace::new(&OrderedLevelledTree::complete(Odd, h, b, DEFAULT_TREE_CAP).unwrap()),
        )
    }

    fn asym_region(g: &ParityGame, se: &LazySpace) -> VertexSet {
        solve_asymmetric(g, se, LiftPolicy::MAX).unwrap().0.below_top()
    }

    #[test]
    fn single_loops() {
        let (se, so) = spaces(1, 1);
        for (prio, even_wins) in [(1, false), (2, true)] {
            let g = ParityGame::new(vec![Even], vec![prio], vec![vec![0]]).unwrap();
            for mode in [Mode::Symmetric(PairLift::Short), Mode::Symmetric(PairLift::Max), Mode::Variant] {
                let r = solve_symmetric(&g, &se, &so, EngineOptions { mode, ..Default::default() }).unwrap();
                assert!(r.is_complete());
                assert_eq!(r.even_region().contains(0), even_wins, "{mode:?} prio {prio}");
            }
        }
    }

    #[test]
    fn agrees_with_asymmetric_on_random_games() {
        for seed in 0..40 {
            let g = random_game(6, 2, 4, seed);
            let (se, so) = spaces(g.d() / 2, g.len());
            let expect = asym_region(&g, &se);
            for mode in [Mode::Symmetric(PairLift::Short), Mode::Symmetric(PairLift::Max), Mode::Variant] {
                let r = solve_symmetric(&g, &se, &so, EngineOptions { mode, ..Default::default() }).unwrap();
                assert!(r.is_complete(), "seed {seed} {mode:?}");
                assert_eq!(r.even_region(), expect, "seed {seed} {mode:?}");
                assert!((r.stats.calls as u128) <= r.stats.lift_call_bound());
                assert!(r.stats.max_accelerating_run <= r.stats.accelerating_run_bound());
            }
        }
    }

    #[test]
    fn trace_counters_match_events() {
        let g = random_game(5, 2, 4, 3);
        let (se, so) = spaces(g.d() / 2, g.len());
        let r = solve_symmetric(&g, &se, &so, EngineOptions { record_trace: true, ..Default::default() }).unwrap();
        assert_eq!(r.trace.recount(), r.trace.counters);
        assert_eq!(r.trace.counters.calls, r.stats.calls);
        let back = Trace::from_jsonl(&r.trace.to_jsonl()).unwrap();
        assert_eq!(back.events, r.trace.events);
    }
}
