use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::game::Vertex;

/// A set of vertices over a fixed universe `0..capacity`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct VertexSet {
    bits: FixedBitSet,
}

impl VertexSet {
    pub fn empty(capacity: usize) -> Self {
        Self { bits: FixedBitSet::with_capacity(capacity) }
    }

    pub fn full(capacity: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(capacity);
        bits.insert_range(..);
        Self { bits }
    }

    pub fn from_vertices(capacity: usize, vertices: impl IntoIterator<Item = Vertex>) -> Self {
        let mut set = Self::empty(capacity);
        for v in vertices {
            set.insert(v);
        }
        set
    }

    pub fn capacity(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, v: Vertex) -> bool {
        !self.bits.put(v)
    }

    pub fn remove(&mut self, v: Vertex) {
        self.bits.set(v, false);
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.bits.contains(v)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    /// Vertices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.iter().collect()
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        self.bits.union_with(&other.bits);
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        self.bits.difference_with(&other.bits);
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        self.bits.intersect_with(&other.bits);
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut out = self.clone();
        out.difference_with(other);
        out
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn complement(&self) -> VertexSet {
        let mut out = self.clone();
        out.bits.toggle_range(..);
        out
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.bits.is_subset(&other.bits)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// Deserialization cannot recover the universe size, so the capacity is the
/// smallest one holding every listed vertex.
impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let vertices = Vec::<Vertex>::deserialize(deserializer)?;
        let capacity = vertices.iter().max().map_or(0, |&m| m + 1);
        Ok(VertexSet::from_vertices(capacity, vertices))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_and_difference() {
        let a = VertexSet::from_vertices(5, [0, 2, 4]);
        assert_eq!(a.complement().to_vec(), vec![1, 3]);
        let b = VertexSet::from_vertices(5, [2, 3]);
        assert_eq!(a.difference(&b).to_vec(), vec![0, 4]);
        assert!(VertexSet::from_vertices(5, [2]).is_subset(&a));
        assert_eq!(VertexSet::full(3).len(), 3);
    }
}
