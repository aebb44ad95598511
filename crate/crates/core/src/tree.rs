//! Ordered levelled trees.
//!
//! Nodes are numbered in depth-first preorder, so node 0 is the root and the
//! subtree of `n` is the index range `n..subtree_end(n)`. An Even tree of
//! height `h` has levels `0, 2, .., 2h`; an Odd tree has `1, 3, .., 2h + 1`.
//! Every leaf sits at the bottom level.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::TreeError;
use crate::game::Player;

pub type NodeId = usize;

/// Default node cap for tree constructions.
pub const DEFAULT_TREE_CAP: u128 = 1 << 20;

/// The bare ordered shape of a tree: a node and its ordered children.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Shape {
    pub children: Vec<Shape>,
}

impl Shape {
    pub fn leaf() -> Self {
        Shape { children: Vec::new() }
    }

    pub fn node(children: Vec<Shape>) -> Self {
        Shape { children }
    }

    /// A root with `k` children, each a path of length `height - 1`.
    pub fn star(height: u32, k: usize) -> Self {
        if height == 0 {
            return Shape::leaf();
        }
        Shape::node(vec![Shape::path(height - 1); k])
    }

    pub fn path(height: u32) -> Self {
        (0..height).fold(Shape::leaf(), |s, _| Shape::node(vec![s]))
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Shape::size).sum::<usize>()
    }

    pub fn leaves(&self) -> usize {
        if self.children.is_empty() {
            1
        } else {
            self.children.iter().map(Shape::leaves).sum()
        }
    }

    /// True iff every leaf is at depth exactly `height`.
    pub fn is_balanced(&self, height: u32) -> bool {
        if height == 0 {
            self.children.is_empty()
        } else {
            !self.children.is_empty() && self.children.iter().all(|c| c.is_balanced(height - 1))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedLevelledTree {
    flavor: Player,
    height: u32,
    level: Vec<u32>,
    parent: Vec<Option<NodeId>>,
    children: Vec<Vec<NodeId>>,
    end: Vec<NodeId>,
}

impl OrderedLevelledTree {
    /// Builds a tree from a shape whose leaves are all at depth `height`.
    pub fn from_shape(flavor: Player, height: u32, shape: &Shape) -> Result<Self, TreeError> {
        if !shape.is_balanced(height) {
            return Err(TreeError::Invalid(format!("some leaf is not at depth {height}")));
        }
        let mut t = OrderedLevelledTree {
            flavor,
            height,
            level: Vec::new(),
            parent: Vec::new(),
            children: Vec::new(),
            end: Vec::new(),
        };
        let top = 2 * height + flavor.code() as u32;
        t.push(shape, None, top);
        Ok(t)
    }

    fn push(&mut self, shape: &Shape, parent: Option<NodeId>, level: u32) -> NodeId {
        let id = self.level.len();
        self.level.push(level);
        self.parent.push(parent);
        self.children.push(Vec::with_capacity(shape.children.len()));
        self.end.push(id + 1);
        for c in &shape.children {
            let cid = self.push(c, Some(id), level - 2);
            self.children[id].push(cid);
        }
        self.end[id] = self.level.len();
        id
    }

    /// Every inner node has `branching` children; `branching^height` leaves.
    pub fn complete(flavor: Player, height: u32, branching: usize, cap: u128) -> Result<Self, TreeError> {
        if branching == 0 {
            return Err(TreeError::Invalid("branching must be at least 1".into()));
        }
        let size = complete_size(height, branching);
        if size > cap {
            return Err(TreeError::TooLarge { size, cap });
        }
        let mut shape = Shape::leaf();
        for _ in 0..height {
            shape = Shape::node(vec![shape; branching]);
        }
        Self::from_shape(flavor, height, &shape)
    }

    /// An `n`-universal tree built by the usual halving recursion: the root's
    /// children are those of U(n/2, h), then U(n, h-1), then those of U(n/2, h).
    /// At height 1 it is the star with `n` leaves.
    pub fn succinct_universal(flavor: Player, n: usize, height: u32, cap: u128) -> Result<Self, TreeError> {
        if n == 0 {
            return Err(TreeError::Invalid("n must be at least 1".into()));
        }
        let size = succinct_size(n, height);
        if size > cap {
            return Err(TreeError::TooLarge { size, cap });
        }
        Self::from_shape(flavor, height, &succinct_shape(n, height))
    }

    pub fn flavor(&self) -> Player {
        self.flavor
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Largest even priority the tree can host: `2 * height`.
    pub fn d(&self) -> u32 {
        2 * self.height
    }

    pub fn len(&self) -> usize {
        self.level.len()
    }

    pub fn is_empty(&self) -> bool {
        self.level.is_empty()
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn level(&self, n: NodeId) -> u32 {
        self.level[n]
    }

    pub fn parent(&self, n: NodeId) -> Option<NodeId> {
        self.parent[n]
    }

    pub fn children(&self, n: NodeId) -> &[NodeId] {
        &self.children[n]
    }

    pub fn is_leaf(&self, n: NodeId) -> bool {
        self.children[n].is_empty()
    }

    /// One past the last node of the subtree of `n`.
    pub fn subtree_end(&self, n: NodeId) -> NodeId {
        self.end[n]
    }

    pub fn is_ancestor_or_self(&self, a: NodeId, n: NodeId) -> bool {
        a <= n && n < self.end[a]
    }

    pub fn leaf_count(&self) -> usize {
        (0..self.len()).filter(|&n| self.is_leaf(n)).count()
    }

    /// Largest number of children of any node.
    pub fn max_degree(&self) -> usize {
        self.children.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn shape(&self) -> Shape {
        self.shape_of(0)
    }

    fn shape_of(&self, n: NodeId) -> Shape {
        Shape::node(self.children[n].iter().map(|&c| self.shape_of(c)).collect())
    }

    /// The same shape with the other level convention.
    pub fn with_flavor(&self, flavor: Player) -> Self {
        let shift = |l: u32| match (self.flavor, flavor) {
            (Player::Even, Player::Odd) => l + 1,
            (Player::Odd, Player::Even) => l - 1,
            _ => l,
        };
        OrderedLevelledTree { flavor, level: self.level.iter().map(|&l| shift(l)).collect(), ..self.clone() }
    }
}

fn complete_size(height: u32, branching: usize) -> u128 {
    let b = branching as u128;
    let mut total = 0u128;
    let mut layer = 1u128;
    for _ in 0..=height {
        total = total.saturating_add(layer);
        layer = layer.saturating_mul(b);
    }
    total
}

/// Nodes of U(n, h) below and including the root, computed without building it.
fn succinct_size(n: usize, height: u32) -> u128 {
    fn children_size(n: usize, h: u32, memo: &mut std::collections::HashMap<(usize, u32), u128>) -> u128 {
        if n == 0 || h == 0 {
            return 0;
        }
        if h == 1 {
            return n as u128;
        }
        if let Some(&s) = memo.get(&(n, h)) {
            return s;
        }
        let side = children_size(n / 2, h, memo);
        let mid = 1 + children_size(n, h - 1, memo);
        let s = side.saturating_mul(2).saturating_add(mid);
        memo.insert((n, h), s);
        s
    }
    1 + children_size(n, height, &mut std::collections::HashMap::new())
}

fn succinct_children(n: usize, h: u32) -> Vec<Shape> {
    if n == 0 || h == 0 {
        return Vec::new();
    }
    if h == 1 {
        return vec![Shape::leaf(); n];
    }
    let side = succinct_children(n / 2, h);
    let mut out = side.clone();
    out.push(Shape::node(succinct_children(n, h - 1)));
    out.extend(side);
    out
}

fn succinct_shape(n: usize, h: u32) -> Shape {
    Shape::node(succinct_children(n, h))
}

/// Greedy leftmost embedding of `small` into `big`. Returns the node map
/// indexed by nodes of `small`, or `None` if no embedding exists.
pub fn tree_inclusion(
    small: &OrderedLevelledTree,
    big: &OrderedLevelledTree,
) -> Result<Option<Vec<NodeId>>, TreeError> {
    if small.flavor != big.flavor || small.height != big.height {
        return Err(TreeError::Mismatch);
    }
    let mut map = vec![usize::MAX; small.len()];
    Ok(embed(small, big, 0, 0, &mut map).then_some(map))
}

fn embed(small: &OrderedLevelledTree, big: &OrderedLevelledTree, a: NodeId, b: NodeId, map: &mut [NodeId]) -> bool {
    map[a] = b;
    let targets = big.children(b);
    let mut next = 0;
    for &c in small.children(a) {
        loop {
            if next == targets.len() {
                return false;
            }
            let t = targets[next];
            next += 1;
            if embed(small, big, c, t, map) {
                break;
            }
        }
    }
    true
}

/// All shapes of the given height with between 1 and `max_leaves` leaves.
pub fn enumerate_shapes(height: u32, max_leaves: usize, cap: usize) -> Result<Vec<Shape>, TreeError> {
    let mut out = Vec::new();
    for k in 1..=max_leaves {
        out.extend(shapes_with_leaves(height, k, cap)?);
        if out.len() > cap {
            return Err(TreeError::EnumerationCap { cap });
        }
    }
    Ok(out)
}

fn shapes_with_leaves(height: u32, k: usize, cap: usize) -> Result<Vec<Shape>, TreeError> {
    if height == 0 {
        return Ok(if k == 1 { vec![Shape::leaf()] } else { Vec::new() });
    }
    // ordered forests of height-1 trees with k leaves in total
    let mut forests: Vec<Vec<Vec<Shape>>> = vec![Vec::new(); k + 1];
    forests[0].push(Vec::new());
    let sub: Vec<Vec<Shape>> = (0..=k)
        .map(|j| if j == 0 { Ok(Vec::new()) } else { shapes_with_leaves(height - 1, j, cap) })
        .collect::<Result<_, _>>()?;
    for total in 1..=k {
        let mut acc = Vec::new();
        for first in 1..=total {
            for head in &sub[first] {
                for rest in &forests[total - first] {
                    let mut f = Vec::with_capacity(rest.len() + 1);
                    f.push(head.clone());
                    f.extend(rest.iter().cloned());
                    acc.push(f);
                    if acc.len() > cap {
                        return Err(TreeError::EnumerationCap { cap });
                    }
                }
            }
        }
        forests[total] = acc;
    }
    Ok(forests.pop().unwrap_or_default().into_iter().map(Shape::node).collect())
}

/// True iff every tree of the same height with at most `n` leaves embeds in `t`.
pub fn is_universal_bruteforce(t: &OrderedLevelledTree, n: usize, cap: usize) -> Result<bool, TreeError> {
    for shape in enumerate_shapes(t.height(), n, cap)? {
        let small = OrderedLevelledTree::from_shape(t.flavor(), t.height(), &shape)?;
        if tree_inclusion(&small, t)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A random shape of the given height; inner nodes get `1..=max_children` children.
pub fn random_shape<R: Rng + ?Sized>(height: u32, max_children: usize, rng: &mut R) -> Shape {
    if height == 0 {
        return Shape::leaf();
    }
    let k = rng.gen_range(1..=max_children.max(1));
    Shape::node((0..k).map(|_| random_shape(height - 1, max_children, rng)).collect())
}

/// Which tree to use for a game with `n` vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "n")]
pub enum TreeChoice {
    /// Complete tree of the given branching.
    Complete(usize),
    /// Succinct universal tree for the given leaf count.
    Succinct(usize),
    /// Complete tree of branching |G| if it fits the cap, else succinct |G|-universal.
    Auto,
}

impl TreeChoice {
    pub fn build(
        self,
        flavor: Player,
        height: u32,
        vertices: usize,
        cap: u128,
    ) -> Result<OrderedLevelledTree, TreeError> {
        let n = vertices.max(1);
        match self {
            TreeChoice::Complete(b) => OrderedLevelledTree::complete(flavor, height, b, cap),
            TreeChoice::Succinct(k) => OrderedLevelledTree::succinct_universal(flavor, k, height, cap),
            TreeChoice::Auto => match OrderedLevelledTree::complete(flavor, height, n, cap) {
                Err(TreeError::TooLarge { .. }) => OrderedLevelledTree::succinct_universal(flavor, n, height, cap),
                other => other,
            },
        }
    }
}

impl fmt::Display for TreeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeChoice::Complete(b) => write!(f, "complete:{b}"),
            TreeChoice::Succinct(n) => write!(f, "succinct:{n}"),
            TreeChoice::Auto => f.write_str("auto"),
        }
    }
}

impl FromStr for TreeChoice {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(TreeChoice::Auto);
        }
        let bad = || TreeError::BadChoice(s.to_string());
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        let k: usize = arg.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        match kind {
            "complete" => Ok(TreeChoice::Complete(k)),
            "succinct" => Ok(TreeChoice::Succinct(k)),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Player::{Even, Odd};

    #[test]
    fn complete_counts() {
        let t = OrderedLevelledTree::complete(Even, 1, 2, DEFAULT_TREE_CAP).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.children(0), &[1, 2]);
        let t = OrderedLevelledTree::complete(Even, 0, 5, DEFAULT_TREE_CAP).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.level(0), 0);
        let t = OrderedLevelledTree::complete(Odd, 2, 3, DEFAULT_TREE_CAP).unwrap();
        assert_eq!(t.len(), 1 + 3 + 9);
        assert_eq!(t.level(0), 5);
        assert_eq!(t.leaf_count(), 9);
        assert!(OrderedLevelledTree::complete(Even, 3, 40, 1000).is_err());
    }

    #[test]
    fn levels_drop_by_two() {
        let t = OrderedLevelledTree::complete(Odd, 3, 2, DEFAULT_TREE_CAP).unwrap();
        for n in 0..t.len() {
            for &c in t.children(n) {
                assert_eq!(t.level(c) + 2, t.level(n));
                assert_eq!(t.parent(c), Some(n));
            }
            if t.is_leaf(n) {
                assert_eq!(t.level(n), 1);
            }
        }
    }

    #[test]
    fn succinct_leaf_counts() {
        let path = OrderedLevelledTree::succinct_universal(Even, 1, 4, DEFAULT_TREE_CAP).unwrap();
        assert_eq!(path.leaf_count(), 1);
        assert_eq!(path.len(), 5);
        let u = OrderedLevelledTree::succinct_universal(Even, 3, 2, DEFAULT_TREE_CAP).unwrap();
        assert_eq!(u.leaf_count(), 5);
        let u = OrderedLevelledTree::succinct_universal(Even, 3, 1, DEFAULT_TREE_CAP).unwrap();
        assert_eq!(u.leaf_count(), 3);
        for (n, h) in [(1, 3), (5, 2), (8, 3), (40, 3)] {
            let u = OrderedLevelledTree::succinct_universal(Odd, n, h, DEFAULT_TREE_CAP).unwrap();
            assert_eq!(u.len() as u128, succinct_size(n, h));
        }
    }

    #[test]
    fn inclusion_basics() {
        let star3 = OrderedLevelledTree::from_shape(Even, 1, &Shape::star(1, 3)).unwrap();
        let star2 = OrderedLevelledTree::from_shape(Even, 1, &Shape::star(1, 2)).unwrap();
        assert_eq!(tree_inclusion(&star3, &star3).unwrap(), Some(vec![0, 1, 2, 3]));
        assert_eq!(tree_inclusion(&star3, &star2).unwrap(), None);
        let path = OrderedLevelledTree::from_shape(Even, 1, &Shape::path(1)).unwrap();
        assert_eq!(tree_inclusion(&path, &star2).unwrap(), Some(vec![0, 1]));
        let odd = star2.with_flavor(Odd);
        assert_eq!(tree_inclusion(&path, &odd), Err(TreeError::Mismatch));
    }

    #[test]
    fn greedy_skips_unusable_children() {
        // big: root -> [path, star of 2]; small: root -> [star of 2]
        let big =
            OrderedLevelledTree::from_shape(Even, 2, &Shape::node(vec![Shape::path(1), Shape::star(1, 2)])).unwrap();
        let small = OrderedLevelledTree::from_shape(Even, 2, &Shape::node(vec![Shape::star(1, 2)])).unwrap();
        assert_eq!(tree_inclusion(&small, &big).unwrap(), Some(vec![0, 3, 4, 5]));
    }

    #[test]
    fn shape_enumeration_counts() {
        // height 1: one star per leaf count
        assert_eq!(enumerate_shapes(1, 3, 1000).unwrap().len(), 3);
        // height 2 with exactly 2 leaves: [star2] or [path, path]
        assert_eq!(shapes_with_leaves(2, 2, 1000).unwrap().len(), 2);
        assert!(enumerate_shapes(3, 6, 10).is_err());
    }

    #[test]
    fn universality() {
        for h in 0..=2 {
            for n in 1..=3 {
                let t = OrderedLevelledTree::complete(Even, h, n, DEFAULT_TREE_CAP).unwrap();
                assert!(is_universal_bruteforce(&t, n, 10_000).unwrap());
            }
        }
        let path = OrderedLevelledTree::from_shape(Even, 2, &Shape::path(2)).unwrap();
        assert!(is_universal_bruteforce(&path, 1, 100).unwrap());
        assert!(!is_universal_bruteforce(&path, 2, 100).unwrap());
        let u = OrderedLevelledTree::succinct_universal(Even, 2, 1, DEFAULT_TREE_CAP).unwrap();
        assert_eq!(u.leaf_count(), 2);
        assert!(is_universal_bruteforce(&u, 2, 100).unwrap());
        let u = OrderedLevelledTree::succinct_universal(Even, 3, 2, DEFAULT_TREE_CAP).unwrap();
        assert!(is_universal_bruteforce(&u, 3, 10_000).unwrap());
    }

    #[test]
    fn tree_choice_parsing() {
        assert_eq!("complete:3".parse::<TreeChoice>().unwrap(), TreeChoice::Complete(3));
        assert_eq!("succinct:7".parse::<TreeChoice>().unwrap(), TreeChoice::Succinct(7));
        assert_eq!("auto".parse::<TreeChoice>().unwrap(), TreeChoice::Auto);
        assert!("complete".parse::<TreeChoice>().is_err());
        assert!("cube:3".parse::<TreeChoice>().is_err());
        assert_eq!(TreeChoice::Complete(4).to_string(), "complete:4");
    }

    #[test]
    fn auto_falls_back_to_succinct() {
        let t = TreeChoice::Auto.build(Even, 3, 40, 4096).unwrap();
        assert_eq!(t.len() as u128, succinct_size(40, 3));
        let t = TreeChoice::Auto.build(Even, 2, 3, 4096).unwrap();
        assert_eq!(t.len(), 13);
    }
}
