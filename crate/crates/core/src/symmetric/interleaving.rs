//! The interleaving of an Even and an Odd tree, and the grid regions
//! attached to its nodes.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::game::Player;
use crate::lazy::{LazySpace, Pos};
use crate::tree::{NodeId, OrderedLevelledTree};

/// A pair `(n^P, n^Q)` where `n^P` lives in the tree of `p` and `n^Q` in the
/// other tree, one level above `n^P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InterleavingNode {
    pub p: Player,
    pub np: NodeId,
    pub nq: NodeId,
}

/// The two trees, addressed by player.
#[derive(Clone, Copy, Debug)]
pub struct TreePair<'t> {
    pub even: &'t OrderedLevelledTree,
    pub odd: &'t OrderedLevelledTree,
}

impl<'t> TreePair<'t> {
    pub fn get(&self, player: Player) -> &'t OrderedLevelledTree {
        match player {
            Player::Even => self.even,
            Player::Odd => self.odd,
        }
    }

    /// Largest node degree over both trees.
    pub fn delta(&self) -> usize {
        self.even.max_degree().max(self.odd.max_degree())
    }

    /// Number of interleaving nodes, counted level by level.
    pub fn interleaving_size(&self) -> u128 {
        let hist = |t: &OrderedLevelledTree| {
            let mut h = vec![0u128; t.level(t.root()) as usize + 3];
            for n in 0..t.len() {
                h[t.level(n) as usize] += 1;
            }
            h
        };
        let (e, o) = (hist(self.even), hist(self.odd));
        let pairs =
            |a: &[u128], b: &[u128]| (0..a.len()).map(|l| a[l] * b.get(l + 1).copied().unwrap_or(0)).sum::<u128>();
        pairs(&e, &o) + pairs(&o, &e)
    }
}

impl InterleavingNode {
    pub fn root() -> Self {
        InterleavingNode { p: Player::Even, np: 0, nq: 0 }
    }

    pub fn q(&self) -> Player {
        self.p.opponent()
    }

    /// The component of this node in the tree of `player`.
    pub fn node_of(&self, player: Player) -> NodeId {
        if player == self.p {
            self.np
        } else {
            self.nq
        }
    }

    pub fn level(&self, trees: &TreePair<'_>) -> u32 {
        trees.get(self.p).level(self.np)
    }

    pub fn is_leaf(&self, trees: &TreePair<'_>) -> bool {
        trees.get(self.q()).is_leaf(self.nq)
    }

    /// `(c, n^P)` for every child `c` of `n^Q`, in order.
    pub fn children(&self, trees: &TreePair<'_>) -> Vec<InterleavingNode> {
        trees
            .get(self.q())
            .children(self.nq)
            .iter()
            .map(|&c| InterleavingNode { p: self.q(), np: c, nq: self.np })
            .collect()
    }
}

/// The two lazified trees, addressed by player.
#[derive(Clone, Copy, Debug)]
pub struct SpacePair<'s> {
    pub even: &'s LazySpace,
    pub odd: &'s LazySpace,
}

impl<'s> SpacePair<'s> {
    pub fn get(&self, player: Player) -> &'s LazySpace {
        match player {
            Player::Even => self.even,
            Player::Odd => self.odd,
        }
    }

    pub fn trees(&self) -> TreePair<'s> {
        TreePair { even: self.even.tree(), odd: self.odd.tree() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    Scope,
    G,
    B,
    A,
}

/// An index rectangle of the Even × Odd grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub even: Range<Pos>,
    pub odd: Range<Pos>,
}

impl Rect {
    fn from_pq(p: Player, on_p: Range<Pos>, on_q: Range<Pos>) -> Rect {
        match p {
            Player::Even => Rect { even: on_p, odd: on_q },
            Player::Odd => Rect { even: on_q, odd: on_p },
        }
    }

    pub fn contains(&self, even: Pos, odd: Pos) -> bool {
        self.even.contains(&even) && self.odd.contains(&odd)
    }

    pub fn area(&self) -> u64 {
        self.even.len() as u64 * self.odd.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.even.is_empty() || self.odd.is_empty()
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        let overlap = |a: &Range<Pos>, b: &Range<Pos>| a.start.max(b.start) < a.end.min(b.end);
        overlap(&self.even, &other.even) && overlap(&self.odd, &other.odd)
    }

    pub fn includes(&self, other: &Rect) -> bool {
        other.is_empty()
            || (self.even.start <= other.even.start
                && other.even.end <= self.even.end
                && self.odd.start <= other.odd.start
                && other.odd.end <= self.odd.end)
    }
}

fn single(p: Pos) -> Range<Pos> {
    p..p + 1
}

/// `scope(n) = subtree(n^P) ×_P subtree⁻(n^Q)`.
pub fn scope(spaces: &SpacePair<'_>, n: InterleavingNode) -> Rect {
    let (sp, sq) = (spaces.get(n.p), spaces.get(n.q()));
    Rect::from_pq(n.p, sp.subtree(n.np), sq.subtree_strict(n.nq))
}

/// `G(n) = subtree(n^P) ×_P {n^Q}`.
pub fn region_g(spaces: &SpacePair<'_>, n: InterleavingNode) -> Rect {
    let (sp, sq) = (spaces.get(n.p), spaces.get(n.q()));
    Rect::from_pq(n.p, sp.subtree(n.np), single(sq.pos(n.nq)))
}

/// `B(n) = {before(n^P)} ×_P subtree(n^Q)`; `None` at the root.
pub fn region_b(spaces: &SpacePair<'_>, n: InterleavingNode) -> Option<Rect> {
    let (sp, sq) = (spaces.get(n.p), spaces.get(n.q()));
    let b = sp.before(n.np)?;
    Some(Rect::from_pq(n.p, single(b), sq.subtree(n.nq)))
}

/// `A(n) = {after(n^P)} ×_P subtree(n^Q)`; `None` at the root. The full
/// subtree of `n^Q` is used so that `A(n)` of one child is `B` of the next
/// and the regions of the children tile the scope of the parent.
pub fn region_a(spaces: &SpacePair<'_>, n: InterleavingNode) -> Option<Rect> {
    spaces.get(n.p).before(n.np)?;
    let (sp, sq) = (spaces.get(n.p), spaces.get(n.q()));
    Some(Rect::from_pq(n.p, single(sp.after(n.np)), sq.subtree(n.nq)))
}

pub fn region(spaces: &SpacePair<'_>, kind: RegionKind, n: InterleavingNode) -> Option<Rect> {
    match kind {
        RegionKind::Scope => Some(scope(spaces, n)),
        RegionKind::G => Some(region_g(spaces, n)),
        RegionKind::B => region_b(spaces, n),
        RegionKind::A => region_a(spaces, n),
    }
}

/// Checks that the scope of `n` is the disjoint union of `G`, `B` and the
/// scope of every child, plus `A` of the last child.
pub fn check_partition(spaces: &SpacePair<'_>, n: InterleavingNode) -> Result<(), String> {
    let whole = scope(spaces, n);
    let children = n.children(&spaces.trees());
    let mut parts: Vec<Rect> = Vec::new();
    for c in &children {
        parts.push(region_g(spaces, *c));
        parts.push(region_b(spaces, *c).ok_or("child without before position")?);
        parts.push(scope(spaces, *c));
    }
    if let Some(last) = children.last() {
        parts.push(region_a(spaces, *last).ok_or("child without after position")?);
    }
    for pair in children.windows(2) {
        if region_a(spaces, pair[0]) != region_b(spaces, pair[1]) {
            return Err(format!("A({:?}) differs from B({:?})", pair[0], pair[1]));
        }
    }
    let parts: Vec<Rect> = parts.into_iter().filter(|r| !r.is_empty()).collect();
    for (i, r) in parts.iter().enumerate() {
        if !whole.includes(r) {
            return Err(format!("{r:?} leaves the scope of {n:?}"));
        }
        if parts[i + 1..].iter().any(|s| s.intersects(r)) {
            return Err(format!("{r:?} overlaps another part of {n:?}"));
        }
    }
    let covered: u64 = parts.iter().map(Rect::area).sum();
    if covered != whole.area() {
        return Err(format!("parts cover {covered} cells of {} in {n:?}", whole.area()));
    }
    Ok(())
}

/// Every interleaving node, in depth-first order.
pub fn all_nodes(trees: &TreePair<'_>) -> Vec<InterleavingNode> {
    let mut out = Vec::new();
    let mut stack = vec![InterleavingNode::root()];
    while let Some(n) = stack.pop() {
        out.push(n);
        let mut kids = n.children(trees);
        kids.reverse();
        stack.extend(kids);
    }
    out
}
