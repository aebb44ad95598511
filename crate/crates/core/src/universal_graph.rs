//! The linear graph built from an Even tree: copies of the graphs of the
//! root's subtrees, interleaved with `N` fresh vertices per gap, ranked
//! left to right. Edges are not stored; they follow from the addresses.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{SolveError, TreeError};
use crate::game::{ParityGame, Player, Priority, Vertex};
use crate::labelling::Labelling;
use crate::lazy::{LazySpace, Pos, PosKind};
use crate::tree::{NodeId, OrderedLevelledTree};

/// Where a vertex sits inside the innermost layer that contains it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    /// Fresh vertex `(i, l)`: gap `i` among the children, copy `l` of `N`.
    Fresh { i: usize, l: usize },
    /// The single vertex of the graph of a leaf.
    Loop,
}

/// A vertex: the chain of copies (1-based child indices) leading to its
/// layer, then its slot there.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphVertex {
    pub copies: Vec<usize>,
    pub slot: Slot,
}

impl GraphVertex {
    /// Rank within the layer at `depth`: `2i` inside copy `i`, `2i+1` for
    /// fresh vertex `(i, l)`, 0 for a leaf's vertex.
    pub fn rank_at(&self, depth: usize) -> u32 {
        match self.copies.get(depth) {
            Some(&i) => 2 * i as u32,
            None => match self.slot {
                Slot::Fresh { i, .. } => 2 * i as u32 + 1,
                Slot::Loop => 0,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearGraph {
    n: usize,
    d: Priority,
    vertices: Vec<GraphVertex>,
}

/// Vertex count by the recurrence: 1 per leaf, plus `(k+1)·N` per inner node
/// with `k` children.
pub fn vertex_count(tree: &OrderedLevelledTree, n: usize) -> u128 {
    (0..tree.len())
        .map(|x| match tree.children(x).len() {
            0 => 1,
            k => (k as u128 + 1) * n as u128,
        })
        .sum()
}

impl LinearGraph {
    pub fn build(tree: &OrderedLevelledTree, n: usize, cap: u128) -> Result<Self, TreeError> {
        if tree.flavor() != Player::Even {
            return Err(TreeError::Invalid("the linear graph is built from an Even tree".into()));
        }
        if n == 0 {
            return Err(TreeError::Invalid("N must be at least 1".into()));
        }
        let size = vertex_count(tree, n);
        if size > cap {
            return Err(TreeError::TooLarge { size, cap });
        }
        let mut vertices = Vec::with_capacity(size as usize);
        layer(tree, tree.root(), n, &mut Vec::new(), &mut vertices);
        Ok(LinearGraph { n, d: tree.d(), vertices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> Priority {
        self.d
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, x: usize) -> &GraphVertex {
        &self.vertices[x]
    }

    pub fn index_of(&self, v: &GraphVertex) -> Option<usize> {
        self.vertices.binary_search_by(|w| order_key(w).cmp(&order_key(v))).ok()
    }

    /// Top-layer rank.
    pub fn rank(&self, x: usize) -> u32 {
        self.vertices[x].rank_at(0)
    }

    /// Is there an edge `x → y` labelled `label`?
    pub fn has_edge(&self, x: usize, y: usize, label: Priority) -> bool {
        let (u, v) = (&self.vertices[x], &self.vertices[y]);
        let mut depth = 0;
        let mut layer_d = self.d;
        loop {
            if label == layer_d {
                return true;
            }
            if label >= 1 && label < layer_d && u.rank_at(depth) > v.rank_at(depth) {
                return true;
            }
            match (u.copies.get(depth), v.copies.get(depth)) {
                (Some(a), Some(b)) if a == b && layer_d >= 2 => {
                    depth += 1;
                    layer_d -= 2;
                }
                _ => return false,
            }
        }
    }

    /// Edge list: a header, one line per vertex with its address and rank,
    /// then one `x y label` line per edge.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# linear graph: {} vertices, d = {}, N = {}", self.len(), self.d, self.n);
        for (x, v) in self.vertices.iter().enumerate() {
            let slot = match v.slot {
                Slot::Fresh { i, l } => format!("({i},{l})"),
                Slot::Loop => "loop".to_string(),
            };
            let path: Vec<String> = v.copies.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "v {x} copies [{}] {slot} rank {}", path.join(","), self.rank(x));
        }
        for x in 0..self.len() {
            for y in 0..self.len() {
                for label in 0..=self.d {
                    if self.has_edge(x, y, label) {
                        let _ = writeln!(out, "e {x} {y} {label}");
                    }
                }
            }
        }
        out
    }
}

fn order_key(v: &GraphVertex) -> Vec<u32> {
    let mut key: Vec<u32> = (0..v.copies.len()).map(|d| v.rank_at(d)).collect();
    key.push(v.rank_at(v.copies.len()));
    if let Slot::Fresh { l, .. } = v.slot {
        key.push(l as u32);
    }
    key
}

fn layer(tree: &OrderedLevelledTree, node: NodeId, n: usize, prefix: &mut Vec<usize>, out: &mut Vec<GraphVertex>) {
    let kids = tree.children(node);
    if kids.is_empty() {
        out.push(GraphVertex { copies: prefix.clone(), slot: Slot::Loop });
        return;
    }
    for i in 0..=kids.len() {
        for l in 0..n {
            out.push(GraphVertex { copies: prefix.clone(), slot: Slot::Fresh { i, l } });
        }
        if let Some(&c) = kids.get(i) {
            prefix.push(i + 1);
            layer(tree, c, n, prefix, out);
            prefix.pop();
        }
    }
}

/// Graph vertex for position `p` of the lazified tree. `local` is the
/// attractor rank (from 1) of a vertex at a lazy position. Regular inner
/// nodes map to the first fresh vertex of their own layer. `None` for ⊤.
pub fn address_of(space: &LazySpace, p: Pos, local: usize, n: usize) -> Option<GraphVertex> {
    if p == space.top() {
        return None;
    }
    let tree = space.tree();
    let mut node = tree.root();
    let mut copies = Vec::new();
    loop {
        if p == space.pos(node) {
            let slot = if tree.is_leaf(node) { Slot::Loop } else { Slot::Fresh { i: 0, l: 0 } };
            return Some(GraphVertex { copies, slot });
        }
        let kids = tree.children(node);
        let first = space.before(kids[0]).expect("children have a before position");
        let mut gap = None;
        let mut inside = None;
        for (i, &c) in kids.iter().enumerate() {
            if i == 0 && p == first {
                gap = Some(0);
                break;
            }
            if space.subtree(c).contains(&p) {
                inside = Some((i, c));
                break;
            }
            if p == space.after(c) {
                gap = Some(i + 1);
                break;
            }
        }
        if let Some(i) = gap {
            let l = local.saturating_sub(1).min(n - 1);
            return Some(GraphVertex { copies, slot: Slot::Fresh { i, l } });
        }
        let (i, c) = inside?;
        copies.push(i + 1);
        node = c;
    }
}

/// Result of mapping a valid Even labelling into the linear graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrespondenceVerdict {
    pub mapped_vertices: usize,
    pub checked_edges: usize,
    /// Moves inside one fresh group, which the top layers cannot express.
    pub unchecked_edges: usize,
    pub violations: Vec<(Vertex, Vertex)>,
}

impl CorrespondenceVerdict {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Maps every vertex below ⊤ to the graph vertex of its position and checks
/// that each edge of the labelling's strategy, labelled by the source's
/// priority, is an edge of the graph.
pub fn check_labelling_correspondence(
    game: &ParityGame,
    mu: &Labelling<'_>,
    cap: u128,
) -> Result<CorrespondenceVerdict, SolveError> {
    let space = mu.space();
    if space.flavor() != Player::Even {
        return Err(SolveError::FlavorMismatch);
    }
    let strategy = mu.extract_strategy()?;
    let n = game.len().max(1);
    let graph = LinearGraph::build(space.tree(), n, cap)?;
    let mut phi: Vec<Option<usize>> = vec![None; game.len()];
    let mut verdict = CorrespondenceVerdict::default();
    for v in game.vertices() {
        let p = mu.position(v);
        let local = match space.kind(p) {
            PosKind::Lazy => mu.bucket_ranks(p).get(&v).copied().unwrap_or(1) as usize,
            PosKind::Regular(_) => 1,
        };
        if let Some(addr) = address_of(space, p, local, n) {
            let x =
                graph.index_of(&addr).ok_or_else(|| SolveError::Internal(format!("no graph vertex for {addr:?}")))?;
            phi[v] = Some(x);
            verdict.mapped_vertices += 1;
        }
    }
    for v in game.vertices() {
        let Some(x) = phi[v] else { continue };
        for &w in &strategy.edges[v] {
            let Some(y) = phi[w] else {
                verdict.violations.push((v, w));
                continue;
            };
            if graph.has_edge(x, y, game.priority(v)) {
                verdict.checked_edges += 1;
            } else {
                let (a, b) = (graph.vertex(x), graph.vertex(y));
                let same_group = a.copies == b.copies
                    && matches!((&a.slot, &b.slot), (Slot::Fresh { i, .. }, Slot::Fresh { i: j, .. }) if i == j);
                if same_group {
                    verdict.unchecked_edges += 1;
                } else {
                    verdict.violations.push((v, w));
                }
            }
        }
    }
    Ok(verdict)
}
