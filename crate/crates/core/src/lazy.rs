//! The lazification of a tree: tree nodes interleaved with lazy positions.
//!
//! Positions are dense indices. For a node `n` with children `c1..ck` the
//! layout is `n, before(c1), c1.., after(c1) = before(c2), .., ck.., after(ck)`,
//! and the whole space ends with `⊤ = after(root)`. Lazy positions sit one
//! level above the node they bound, and the subtree of `n` is the interval
//! `[pos(n), after(n))`.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::game::{Player, Priority};
use crate::tree::{NodeId, OrderedLevelledTree};

pub type Pos = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "node")]
pub enum PosKind {
    Regular(NodeId),
    Lazy,
}

/// Serialized form of a position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionInfo {
    pub index: Pos,
    #[serde(flatten)]
    pub kind: PosKind,
    pub level: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LazySpace {
    tree: OrderedLevelledTree,
    kind: Vec<PosKind>,
    level: Vec<u32>,
    node_pos: Vec<Pos>,
    before: Vec<Option<Pos>>,
    after: Vec<Pos>,
    /// Innermost node whose subtree contains the position; `None` for ⊤.
    enclosing: Vec<Option<NodeId>>,
    /// Regular positions per level, increasing.
    regular_at_level: Vec<Vec<Pos>>,
    /// Lazy positions of level at least `p`, increasing, for every `p`.
    lazy_at_least: Vec<Vec<Pos>>,
}

impl LazySpace {
    pub fn new(tree: &OrderedLevelledTree) -> Self {
        let n = tree.len();
        let mut space = LazySpace {
            tree: tree.clone(),
            kind: Vec::new(),
            level: Vec::new(),
            node_pos: vec![0; n],
            before: vec![None; n],
            after: vec![0; n],
            enclosing: Vec::new(),
            regular_at_level: Vec::new(),
            lazy_at_least: Vec::new(),
        };
        space.emit(tree, tree.root());
        let top = space.kind.len() as Pos;
        space.after[tree.root()] = top;
        space.push(PosKind::Lazy, tree.level(tree.root()) + 1, None);

        let max_level = tree.level(tree.root()) + 1;
        space.regular_at_level = vec![Vec::new(); max_level as usize + 1];
        space.lazy_at_least = vec![Vec::new(); max_level as usize + 1];
        for p in 0..space.kind.len() {
            let l = space.level[p];
            match space.kind[p] {
                PosKind::Regular(_) => space.regular_at_level[l as usize].push(p as Pos),
                PosKind::Lazy => {
                    for list in &mut space.lazy_at_least[..=l as usize] {
                        list.push(p as Pos);
                    }
                }
            }
        }
        space
    }

    fn push(&mut self, kind: PosKind, level: u32, enclosing: Option<NodeId>) -> Pos {
        self.kind.push(kind);
        self.level.push(level);
        self.enclosing.push(enclosing);
        (self.kind.len() - 1) as Pos
    }

    fn emit(&mut self, tree: &OrderedLevelledTree, n: NodeId) {
        self.node_pos[n] = self.push(PosKind::Regular(n), tree.level(n), Some(n));
        let children = tree.children(n);
        if let Some(&first) = children.first() {
            let b = self.push(PosKind::Lazy, tree.level(n) - 1, Some(n));
            self.before[first] = Some(b);
            for (i, &c) in children.iter().enumerate() {
                self.emit(tree, c);
                let a = self.push(PosKind::Lazy, tree.level(n) - 1, Some(n));
                self.after[c] = a;
                if let Some(&next) = children.get(i + 1) {
                    self.before[next] = Some(a);
                }
            }
        }
    }

    pub fn tree(&self) -> &OrderedLevelledTree {
        &self.tree
    }

    pub fn flavor(&self) -> Player {
        self.tree.flavor()
    }

    pub fn len(&self) -> usize {
        self.kind.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kind.is_empty()
    }

    pub fn top(&self) -> Pos {
        (self.kind.len() - 1) as Pos
    }

    pub fn root(&self) -> Pos {
        0
    }

    pub fn kind(&self, p: Pos) -> PosKind {
        self.kind[p as usize]
    }

    pub fn is_regular(&self, p: Pos) -> bool {
        matches!(self.kind[p as usize], PosKind::Regular(_))
    }

    pub fn is_lazy(&self, p: Pos) -> bool {
        !self.is_regular(p)
    }

    pub fn node(&self, p: Pos) -> Option<NodeId> {
        match self.kind[p as usize] {
            PosKind::Regular(n) => Some(n),
            PosKind::Lazy => None,
        }
    }

    pub fn level(&self, p: Pos) -> u32 {
        self.level[p as usize]
    }

    pub fn info(&self, p: Pos) -> PositionInfo {
        PositionInfo { index: p, kind: self.kind(p), level: self.level(p) }
    }

    pub fn pos(&self, n: NodeId) -> Pos {
        self.node_pos[n]
    }

    /// `None` for the root.
    pub fn before(&self, n: NodeId) -> Option<Pos> {
        self.before[n]
    }

    pub fn after(&self, n: NodeId) -> Pos {
        self.after[n]
    }

    /// Next position, or `None` at ⊤.
    pub fn succ(&self, p: Pos) -> Option<Pos> {
        (p < self.top()).then_some(p + 1)
    }

    /// `[n, after(n))`.
    pub fn subtree(&self, n: NodeId) -> Range<Pos> {
        self.node_pos[n]..self.after[n]
    }

    /// `subtree(n)` without `n` itself.
    pub fn subtree_strict(&self, n: NodeId) -> Range<Pos> {
        self.node_pos[n] + 1..self.after[n]
    }

    /// Innermost node whose subtree contains `p`.
    pub fn enclosing(&self, p: Pos) -> Option<NodeId> {
        self.enclosing[p as usize]
    }

    /// Regular positions must match the priority; lazy ones must not be below it.
    pub fn admissible(&self, p: Pos, priority: Priority) -> bool {
        match self.kind[p as usize] {
            PosKind::Regular(_) => self.level[p as usize] == priority,
            PosKind::Lazy => self.level[p as usize] >= priority,
        }
    }

    /// Regular positions at `level`, increasing; their `after` values increase too.
    pub fn regular_at_level(&self, level: u32) -> &[Pos] {
        self.regular_at_level.get(level as usize).map_or(&[], Vec::as_slice)
    }

    /// Lazy positions admissible for `priority`, increasing.
    pub fn lazy_admissible(&self, priority: Priority) -> &[Pos] {
        self.lazy_at_least.get(priority as usize).map_or(&[], Vec::as_slice)
    }

    /// Smallest admissible position strictly above `p`.
    pub fn next_admissible(&self, p: Pos, priority: Priority) -> Option<Pos> {
        (p + 1..=self.top()).find(|&r| self.admissible(r, priority))
    }
}
