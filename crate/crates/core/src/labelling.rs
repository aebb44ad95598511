//! Labellings of game vertices by positions of a lazified tree.
//!
//! A labelling is admissible when a vertex at a regular position has the
//! position's level as priority, and a vertex at a lazy position has a
//! priority no larger than its level. Vertices sitting at the same lazy
//! position `p` form a bucket; a bucket member is valid iff the flavor player
//! attracts it to `μ⁻¹(<p)` while staying in `μ⁻¹(≤p)`, which only involves
//! the bucket itself.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;

use crate::attractor::attractor_through;
use crate::error::{LabellingError, SolveError};
use crate::game::{ParityGame, Player, PositionalStrategy, Vertex};
use crate::lazy::{LazySpace, Pos, PosKind, PositionInfo};
use crate::vertex_set::VertexSet;

/// Attractor ranks of the valid members of one lazy bucket. Rank 1 means the
/// vertex reaches `μ⁻¹(<p)` in one step.
pub type BucketRanks = HashMap<Vertex, u32>;

#[derive(Clone, Debug)]
pub struct Labelling<'a> {
    game: &'a ParityGame,
    space: &'a LazySpace,
    pos: Vec<Pos>,
    /// Members of every occupied lazy position.
    buckets: BTreeMap<Pos, Vec<Vertex>>,
    lifts: u64,
}

impl PartialEq for Labelling<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.space, other.space) && self.pos == other.pos
    }
}

/// Checks that the tree is tall enough for the game.
pub fn check_height(game: &ParityGame, space: &LazySpace) -> Result<(), SolveError> {
    let tree = space.tree();
    if tree.d() < game.d() {
        return Err(SolveError::TreeTooShallow {
            height: tree.height(),
            tree_d: tree.d(),
            max_priority: game.max_priority(),
        });
    }
    Ok(())
}

impl<'a> Labelling<'a> {
    /// Labelling with the given positions; each must be admissible.
    pub fn from_positions(game: &'a ParityGame, space: &'a LazySpace, pos: Vec<Pos>) -> Result<Self, LabellingError> {
        if pos.len() != game.len() {
            return Err(LabellingError::Mismatch);
        }
        let mut buckets: BTreeMap<Pos, Vec<Vertex>> = BTreeMap::new();
        for (v, &p) in pos.iter().enumerate() {
            if p as usize >= space.len() || !space.admissible(p, game.priority(v)) {
                return Err(LabellingError::Inadmissible { vertex: v, pos: p, priority: game.priority(v) });
            }
            if space.is_lazy(p) {
                buckets.entry(p).or_default().push(v);
            }
        }
        Ok(Labelling { game, space, pos, buckets, lifts: 0 })
    }

    /// Vertices whose priority equals the root level go to the root, all
    /// others to `succ(root)`.
    pub fn smallest(game: &'a ParityGame, space: &'a LazySpace) -> Result<Self, SolveError> {
        check_height(game, space)?;
        let root = space.root();
        let next = space.succ(root).expect("the root is below ⊤");
        let pos = game.vertices().map(|v| if game.priority(v) == space.level(root) { root } else { next }).collect();
        Ok(Self::from_positions(game, space, pos)?)
    }

    pub fn all_top(game: &'a ParityGame, space: &'a LazySpace) -> Self {
        Self::from_positions(game, space, vec![space.top(); game.len()]).expect("⊤ is always admissible")
    }

    pub fn game(&self) -> &'a ParityGame {
        self.game
    }

    pub fn space(&self) -> &'a LazySpace {
        self.space
    }

    pub fn flavor(&self) -> Player {
        self.space.flavor()
    }

    pub fn position(&self, v: Vertex) -> Pos {
        self.pos[v]
    }

    pub fn positions(&self) -> &[Pos] {
        &self.pos
    }

    /// Number of successful [`Labelling::lift`] calls.
    pub fn lifts(&self) -> u64 {
        self.lifts
    }

    /// Vertices at lazy position `p`.
    pub fn members(&self, p: Pos) -> &[Vertex] {
        self.buckets.get(&p).map_or(&[], Vec::as_slice)
    }

    pub fn is_top(&self, v: Vertex) -> bool {
        self.pos[v] == self.space.top()
    }

    /// `μ⁻¹(<⊤)`.
    pub fn below_top(&self) -> VertexSet {
        self.preimage(|p| p < self.space.top())
    }

    pub fn preimage(&self, pred: impl Fn(Pos) -> bool) -> VertexSet {
        VertexSet::from_vertices(self.game.len(), self.game.vertices().filter(|&v| pred(self.pos[v])))
    }

    pub fn view(&self) -> Vec<PositionInfo> {
        self.pos.iter().map(|&p| self.space.info(p)).collect()
    }

    /// Moves `v` to `target` after checking admissibility only.
    pub fn set_position(&mut self, v: Vertex, target: Pos) -> Result<(), LabellingError> {
        let priority = self.game.priority(v);
        if target as usize >= self.space.len() || !self.space.admissible(target, priority) {
            return Err(LabellingError::Inadmissible { vertex: v, pos: target, priority });
        }
        let old = self.pos[v];
        if old == target {
            return Ok(());
        }
        if self.space.is_lazy(old) {
            let bucket = self.buckets.get_mut(&old).expect("lazy vertices are bucketed");
            let i = bucket.iter().position(|&x| x == v).expect("vertex is in its bucket");
            bucket.swap_remove(i);
            if bucket.is_empty() {
                self.buckets.remove(&old);
            }
        }
        if self.space.is_lazy(target) {
            self.buckets.entry(target).or_default().push(v);
        }
        self.pos[v] = target;
        Ok(())
    }

    /// Raises `v` to `target`, which must lie strictly above its position and
    /// no higher than its destination.
    pub fn lift(&mut self, v: Vertex, target: Pos) -> Result<(), LabellingError> {
        let current = self.pos[v];
        if target <= current {
            return Err(LabellingError::NotIncreasing { vertex: v, current, target });
        }
        let destination = self.destination(v);
        if target > destination {
            return Err(LabellingError::BeyondDestination { vertex: v, target, destination });
        }
        self.set_position(v, target)?;
        self.lifts += 1;
        Ok(())
    }

    /// Local attractor of the bucket at lazy `p`, with `moved` (if any)
    /// placed at `p` instead of its current position.
    fn attract_bucket(&self, p: Pos, moved: Option<Vertex>) -> BucketRanks {
        let game = self.game;
        let player = self.flavor();
        let pos_of = |w: Vertex| if Some(w) == moved { p } else { self.pos[w] };
        let mut members: Vec<Vertex> = self.members(p).iter().copied().filter(|&w| Some(w) != moved).collect();
        members.extend(moved);

        let mut rank = BucketRanks::with_capacity(members.len());
        let mut need: HashMap<Vertex, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        for &u in &members {
            let succ = game.successors(u);
            let ready = if game.owner(u) == player {
                succ.iter().any(|&w| pos_of(w) < p)
            } else if succ.iter().any(|&w| pos_of(w) > p) {
                false
            } else {
                let k = succ.iter().filter(|&&w| pos_of(w) == p).count();
                need.insert(u, k);
                k == 0
            };
            if ready {
                rank.insert(u, 1);
                queue.push_back(u);
            }
        }
        while let Some(x) = queue.pop_front() {
            let r = rank[&x] + 1;
            for &y in game.predecessors(x) {
                if pos_of(y) != p || rank.contains_key(&y) {
                    continue;
                }
                let joins = if game.owner(y) == player {
                    true
                } else if let Some(k) = need.get_mut(&y) {
                    *k -= game.successors(y).iter().filter(|&&w| w == x).count();
                    *k == 0
                } else {
                    false
                };
                if joins {
                    rank.insert(y, r);
                    queue.push_back(y);
                }
            }
        }
        rank
    }

    /// Attractor ranks of the valid vertices at lazy position `p`.
    pub fn bucket_ranks(&self, p: Pos) -> BucketRanks {
        self.attract_bucket(p, None)
    }

    pub fn is_edge_valid(&self, u: Vertex, w: Vertex) -> bool {
        let p = self.pos[u];
        match self.space.kind(p) {
            _ if p == self.space.top() => true,
            PosKind::Regular(n) => self.pos[w] < self.space.after(n),
            PosKind::Lazy => self.pos[w] < p || (self.pos[w] == p && self.bucket_ranks(p).contains_key(&w)),
        }
    }

    pub fn is_vertex_valid(&self, v: Vertex) -> bool {
        self.vertex_valid_memo(v, &mut HashMap::new())
    }

    /// Validity with bucket attractors cached in `memo`, which must be
    /// discarded whenever the labelling changes.
    pub fn vertex_valid_memo(&self, v: Vertex, memo: &mut HashMap<Pos, BucketRanks>) -> bool {
        let p = self.pos[v];
        let succ = self.game.successors(v);
        let mine = self.game.owner(v) == self.flavor();
        match self.space.kind(p) {
            _ if p == self.space.top() => true,
            PosKind::Regular(n) => {
                let a = self.space.after(n);
                if mine {
                    succ.iter().any(|&w| self.pos[w] < a)
                } else {
                    succ.iter().all(|&w| self.pos[w] < a)
                }
            }
            PosKind::Lazy => {
                let one_step =
                    if mine { succ.iter().any(|&w| self.pos[w] < p) } else { succ.iter().all(|&w| self.pos[w] < p) };
                one_step || memo.entry(p).or_insert_with(|| self.attract_bucket(p, None)).contains_key(&v)
            }
        }
    }

    pub fn invalid_vertices(&self) -> Vec<Vertex> {
        let mut memo = HashMap::new();
        self.game.vertices().filter(|&v| !self.vertex_valid_memo(v, &mut memo)).collect()
    }

    /// True iff every vertex is valid.
    pub fn is_attractor_decomposition(&self) -> bool {
        let mut memo = HashMap::new();
        self.game.vertices().all(|v| self.vertex_valid_memo(v, &mut memo))
    }

    /// Lazy positions `l` where `μ⁻¹(l)` is not exactly the attractor to
    /// `μ⁻¹(<l)` through `μ⁻¹(<l)` plus every vertex at or above `l` that
    /// may sit at `l`. Empty for the least decomposition.
    pub fn lazy_attractor_mismatches(&self) -> Vec<Pos> {
        let n = self.game.len();
        let mut out = Vec::new();
        for l in 0..self.space.top() {
            if !self.space.is_lazy(l) {
                continue;
            }
            let below = self.preimage(|p| p < l);
            let through = VertexSet::from_vertices(
                n,
                self.game.vertices().filter(|&v| self.pos[v] < l || self.space.admissible(l, self.game.priority(v))),
            );
            let attracted = attractor_through(self.game, self.flavor(), &below, &through)
                .expect("the target lies in the safe set")
                .set
                .difference(&below);
            if attracted != self.preimage(|p| p == l) {
                out.push(l);
            }
        }
        out
    }

    /// Would `v` be valid if moved to `r`, everything else unchanged?
    pub fn valid_at(&self, v: Vertex, r: Pos) -> bool {
        let succ = self.game.successors(v);
        let mine = self.game.owner(v) == self.flavor();
        let pos_of = |w: Vertex| if w == v { r } else { self.pos[w] };
        match self.space.kind(r) {
            _ if r == self.space.top() => true,
            PosKind::Regular(n) => {
                let a = self.space.after(n);
                if mine {
                    succ.iter().any(|&w| pos_of(w) < a)
                } else {
                    succ.iter().all(|&w| pos_of(w) < a)
                }
            }
            PosKind::Lazy => self.attract_bucket(r, Some(v)).contains_key(&v),
        }
    }

    /// Smallest admissible `r ≥ μ(v)` at which `v` is valid, by scanning
    /// every admissible position. Used as a reference in tests.
    pub fn destination_bruteforce(&self, v: Vertex) -> Pos {
        let priority = self.game.priority(v);
        (self.pos[v]..=self.space.top())
            .filter(|&r| self.space.admissible(r, priority))
            .find(|&r| self.valid_at(v, r))
            .expect("⊤ is always a valid destination")
    }

    /// Smallest admissible `r ≥ μ(v)` at which `v` is valid.
    pub fn destination(&self, v: Vertex) -> Pos {
        let space = self.space;
        let game = self.game;
        let q = self.pos[v];
        let priority = game.priority(v);
        let mine = game.owner(v) == self.flavor();
        let self_loop = game.successors(v).contains(&v);
        let others = game.successors(v).iter().filter(|&&w| w != v).map(|&w| self.pos[w]);
        let (min_other, max_other) = others.fold((None, None), |(lo, hi): (Option<Pos>, Option<Pos>), p| {
            (Some(lo.map_or(p, |x| x.min(p))), Some(hi.map_or(p, |x| x.max(p))))
        });
        let mut best = space.top();

        // regular candidates at the vertex's own level
        let regular = space.regular_at_level(priority);
        let bound = match (mine, self_loop) {
            (true, true) => None,
            (true, false) => min_other,
            (false, _) => max_other,
        };
        let mut i = regular.partition_point(|&r| r < q);
        if let Some(m) = bound {
            i = i.max(regular.partition_point(|&r| {
                let n = space.node(r).expect("regular");
                space.after(n) <= m
            }));
        }
        if let Some(&r) = regular.get(i) {
            best = best.min(r);
        }

        // lazy candidates where one step already reaches below the position
        let lazy = space.lazy_admissible(priority);
        let one_step = match (mine, self_loop) {
            (true, _) => min_other,
            (false, false) => max_other,
            (false, true) => None,
        };
        if let Some(m) = one_step {
            let i = lazy.partition_point(|&r| r < q).max(lazy.partition_point(|&r| r <= m));
            if let Some(&r) = lazy.get(i) {
                best = best.min(r);
            }
        }

        // occupied lazy positions, where the bucket may carry the vertex
        for (&r, members) in self.buckets.range(q..best) {
            if space.level(r) < priority || members.iter().all(|&w| w == v) {
                continue;
            }
            if self.attract_bucket(r, Some(v)).contains_key(&v) {
                best = r;
                break;
            }
        }
        best
    }

    /// Per-vertex minimum of two labellings over the same space.
    pub fn pointwise_min(&self, other: &Labelling<'a>) -> Result<Labelling<'a>, LabellingError> {
        if !std::ptr::eq(self.space, other.space) || !std::ptr::eq(self.game, other.game) {
            return Err(LabellingError::Mismatch);
        }
        let pos = self.pos.iter().zip(&other.pos).map(|(&a, &b)| a.min(b)).collect();
        Labelling::from_positions(self.game, self.space, pos)
    }

    /// Pointwise `self ≤ other`.
    pub fn le(&self, other: &Labelling<'_>) -> bool {
        self.pos.iter().zip(&other.pos).all(|(a, b)| a <= b)
    }

    /// The valid edges, as a strategy for the flavor player. At a lazy
    /// position only edges that lower the attractor rank are kept, so that
    /// plays leave the bucket.
    pub fn extract_strategy(&self) -> Result<PositionalStrategy, LabellingError> {
        if let Some(&v) = self.invalid_vertices().first() {
            return Err(LabellingError::InvalidVertex(v));
        }
        let player = self.flavor();
        let mut memo: HashMap<Pos, BucketRanks> = HashMap::new();
        let mut edges = Vec::with_capacity(self.game.len());
        for v in self.game.vertices() {
            let succ = self.game.successors(v);
            let p = self.pos[v];
            if self.game.owner(v) != player || p == self.space.top() {
                edges.push(succ.to_vec());
                continue;
            }
            let chosen: Vec<Vertex> = match self.space.kind(p) {
                PosKind::Regular(n) => {
                    let a = self.space.after(n);
                    succ.iter().copied().filter(|&w| self.pos[w] < a).collect()
                }
                PosKind::Lazy => {
                    let ranks = memo.entry(p).or_insert_with(|| self.attract_bucket(p, None));
                    let mine = ranks[&v];
                    succ.iter()
                        .copied()
                        .filter(|&w| self.pos[w] < p || (self.pos[w] == p && ranks.get(&w).is_some_and(|&r| r < mine)))
                        .collect()
                }
            };
            edges.push(chosen);
        }
        Ok(PositionalStrategy { player, edges })
    }
}

#[derive(Serialize)]
struct LabellingView<'b> {
    flavor: Player,
    positions: &'b [PositionInfo],
}

impl Serialize for Labelling<'_> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        LabellingView { flavor: self.flavor(), positions: &self.view() }.serialize(serializer)
    }
}

/// One Even and one Odd labelling of the same game.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LabellingPair<'a> {
    pub even: Labelling<'a>,
    pub odd: Labelling<'a>,
}

impl<'a> LabellingPair<'a> {
    pub fn get(&self, player: Player) -> &Labelling<'a> {
        match player {
            Player::Even => &self.even,
            Player::Odd => &self.odd,
        }
    }

    pub fn get_mut(&mut self, player: Player) -> &mut Labelling<'a> {
        match player {
            Player::Even => &mut self.even,
            Player::Odd => &mut self.odd,
        }
    }
}
