//! Balanced tripartite graphs and the primitive queries every other module
//! is built from.
//!
//! A [`TripartiteGraph`] has three vertex classes `V1`, `V2`, `V3` of equal
//! size `N`. Vertices are addressed by class and offset. Adjacency is held as
//! one bit row per vertex and per foreign class, so neighbourhood
//! intersections are word-parallel. Graphs are immutable once built.

use std::fmt;

use fixedbitset::FixedBitSet;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One of the three vertex classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Class {
    V1,
    V2,
    V3,
}

impl Class {
    pub const ALL: [Class; 3] = [Class::V1, Class::V2, Class::V3];

    /// Zero-based index (`V1` is 0).
    pub fn index(self) -> usize {
        self as usize
    }

    /// One-based number, as used in the text format.
    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_index(index: usize) -> Option<Class> {
        Class::ALL.get(index).copied()
    }

    pub fn from_number(number: u8) -> Option<Class> {
        (1..=3).contains(&number).then(|| Class::ALL[number as usize - 1])
    }

    /// The two other classes, in increasing order.
    pub fn others(self) -> [Class; 2] {
        match self {
            Class::V1 => [Class::V2, Class::V3],
            Class::V2 => [Class::V1, Class::V3],
            Class::V3 => [Class::V1, Class::V2],
        }
    }

    /// The class distinct from both `a` and `b`. Panics if `a == b`.
    pub fn third(a: Class, b: Class) -> Class {
        assert_ne!(a, b, "third() needs two distinct classes");
        Class::ALL[3 - a.index() - b.index()]
    }

    /// Successor modulo 3 (`V3` wraps to `V1`).
    pub fn next(self) -> Class {
        Class::ALL[(self.index() + 1) % 3]
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V{}", self.number())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexRef {
    pub class: Class,
    pub offset: usize,
}

impl VertexRef {
    pub fn new(class: Class, offset: usize) -> Self {
        VertexRef { class, offset }
    }
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.class, self.offset)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("a graph needs at least one vertex per class")]
    EmptyClasses,
    #[error("edge {0} -- {1} joins two vertices of the same class")]
    SameClassEdge(VertexRef, VertexRef),
    #[error("vertex {vertex} is out of range for N = {n}")]
    OutOfRange { vertex: VertexRef, n: usize },
    #[error("density of an empty vertex set is undefined")]
    EmptySet,
    #[error("both sets lie in class {0}")]
    SameClass(Class),
    #[error("set of class {found} given where class {expected} was required")]
    ClassMismatch { expected: Class, found: Class },
    #[error("set capacity {found} does not match N = {expected}")]
    CapacityMismatch { expected: usize, found: usize },
    #[error("induced subgraph needs equal set sizes, got {0:?}")]
    UnbalancedInduce([usize; 3]),
}

/// A subset of one vertex class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexSet {
    class: Class,
    members: FixedBitSet,
}

impl VertexSet {
    pub fn empty(class: Class, n: usize) -> Self {
        VertexSet { class, members: FixedBitSet::with_capacity(n) }
    }

    pub fn full(class: Class, n: usize) -> Self {
        let mut members = FixedBitSet::with_capacity(n);
        members.insert_range(..);
        VertexSet { class, members }
    }

    /// Builds a set from offsets. Panics on an offset `>= n`.
    pub fn from_offsets<I: IntoIterator<Item = usize>>(class: Class, n: usize, offsets: I) -> Self {
        let mut set = VertexSet::empty(class, n);
        for offset in offsets {
            set.insert(offset);
        }
        set
    }

    pub(crate) fn from_bits(class: Class, members: FixedBitSet) -> Self {
        VertexSet { class, members }
    }

    pub fn class(&self) -> Class {
        self.class
    }

    /// Size of the ambient class.
    pub fn capacity(&self) -> usize {
        self.members.len()
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn contains(&self, offset: usize) -> bool {
        self.members.contains(offset)
    }

    pub fn insert(&mut self, offset: usize) {
        assert!(offset < self.capacity(), "offset {offset} out of range");
        self.members.insert(offset);
    }

    pub fn remove(&mut self, offset: usize) {
        if offset < self.capacity() {
            self.members.set(offset, false);
        }
    }

    /// Offsets in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.class, other.class);
        self.members.intersect_with(&other.members);
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.class, other.class);
        self.members.union_with(&other.members);
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        debug_assert_eq!(self.class, other.class);
        self.members.difference_with(&other.members);
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.class != other.class || self.members.is_disjoint(&other.members)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.class == other.class && self.members.is_subset(&other.members)
    }
}

/// Incremental edge collector for [`TripartiteGraph`].
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    n: usize,
    rows: Vec<FixedBitSet>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        GraphBuilder { n, rows: vec![FixedBitSet::with_capacity(n); 9 * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check(&self, v: VertexRef) -> Result<(), GraphError> {
        if v.offset >= self.n {
            Err(GraphError::OutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    pub fn add_edge(&mut self, u: VertexRef, v: VertexRef) -> Result<&mut Self, GraphError> {
        if u.class == v.class {
            return Err(GraphError::SameClassEdge(u, v));
        }
        self.check(u)?;
        self.check(v)?;
        let n = self.n;
        self.rows[row_index(n, u.class, v.class, u.offset)].insert(v.offset);
        self.rows[row_index(n, v.class, u.class, v.offset)].insert(u.offset);
        Ok(self)
    }

    /// Removes an edge if present.
    pub fn remove_edge(&mut self, u: VertexRef, v: VertexRef) -> Result<&mut Self, GraphError> {
        if u.class == v.class {
            return Err(GraphError::SameClassEdge(u, v));
        }
        self.check(u)?;
        self.check(v)?;
        self.unjoin(u.class, u.offset, v.class, v.offset);
        Ok(self)
    }

    /// Adds an edge whose endpoints are known to be valid.
    pub(crate) fn join(&mut self, a: Class, u: usize, b: Class, v: usize) {
        debug_assert!(a != b && u < self.n && v < self.n);
        let n = self.n;
        self.rows[row_index(n, a, b, u)].insert(v);
        self.rows[row_index(n, b, a, v)].insert(u);
    }

    pub(crate) fn unjoin(&mut self, a: Class, u: usize, b: Class, v: usize) {
        let n = self.n;
        self.rows[row_index(n, a, b, u)].set(v, false);
        self.rows[row_index(n, b, a, v)].set(u, false);
    }

    pub(crate) fn has_edge(&self, a: Class, u: usize, b: Class, v: usize) -> bool {
        a != b && self.rows[row_index(self.n, a, b, u)].contains(v)
    }

    pub(crate) fn degree(&self, a: Class, u: usize, b: Class) -> usize {
        self.rows[row_index(self.n, a, b, u)].count_ones(..)
    }

    pub fn build(self) -> Result<TripartiteGraph, GraphError> {
        if self.n == 0 {
            return Err(GraphError::EmptyClasses);
        }
        Ok(TripartiteGraph { n: self.n, rows: self.rows })
    }
}

fn row_index(n: usize, from: Class, to: Class, offset: usize) -> usize {
    (from.index() * 3 + to.index()) * n + offset
}

/// A balanced tripartite graph with `N` vertices in each class.
#[derive(Clone, PartialEq, Eq)]
pub struct TripartiteGraph {
    n: usize,
    rows: Vec<FixedBitSet>,
}

impl fmt::Debug for TripartiteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TripartiteGraph")
            .field("n", &self.n)
            .field("edges", &self.edge_count())
            .finish()
    }
}

/// Result of [`TripartiteGraph::induced`]: the relabelled graph plus, per
/// class, the original offset of every new offset.
#[derive(Clone, Debug)]
pub struct Induced {
    pub graph: TripartiteGraph,
    pub maps: [Vec<usize>; 3],
}

impl Induced {
    pub fn original(&self, v: VertexRef) -> VertexRef {
        VertexRef::new(v.class, self.maps[v.class.index()][v.offset])
    }
}

impl TripartiteGraph {
    /// Builds a graph from an edge list. Duplicate edges are harmless.
    pub fn build<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexRef, VertexRef)>,
    {
        if n == 0 {
            return Err(GraphError::EmptyClasses);
        }
        let mut builder = GraphBuilder::new(n);
        for (u, v) in edges {
            builder.add_edge(u, v)?;
        }
        builder.build()
    }

    /// `K_{N,N,N}`.
    pub fn complete(n: usize) -> Self {
        let mut builder = GraphBuilder::new(n);
        for row in builder.rows.iter_mut() {
            row.insert_range(..);
        }
        // rows[c][c] must stay empty
        for c in Class::ALL {
            for u in 0..n {
                builder.rows[row_index(n, c, c, u)].clear();
            }
        }
        TripartiteGraph { n, rows: builder.rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Neighbours of `(class, offset)` inside `to`, as a bit row.
    pub fn row(&self, class: Class, offset: usize, to: Class) -> &FixedBitSet {
        &self.rows[row_index(self.n, class, to, offset)]
    }

    pub fn has_edge(&self, u: VertexRef, v: VertexRef) -> bool {
        u.class != v.class
            && u.offset < self.n
            && v.offset < self.n
            && self.row(u.class, u.offset, v.class).contains(v.offset)
    }

    pub fn edge_count(&self) -> usize {
        let mut total = 0;
        for (a, b) in class_pairs() {
            for u in 0..self.n {
                total += self.row(a, u, b).count_ones(..);
            }
        }
        total
    }

    /// Edges in canonical order: class pairs (1,2), (1,3), (2,3), then
    /// lexicographic in `(u, v)`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexRef, VertexRef)> + '_ {
        class_pairs().into_iter().flat_map(move |(a, b)| {
            (0..self.n).flat_map(move |u| {
                self.row(a, u, b)
                    .ones()
                    .map(move |v| (VertexRef::new(a, u), VertexRef::new(b, v)))
            })
        })
    }

    fn check_vertex(&self, v: VertexRef) -> Result<(), GraphError> {
        if v.offset >= self.n {
            Err(GraphError::OutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    fn check_set(&self, s: &VertexSet) -> Result<(), GraphError> {
        if s.capacity() != self.n {
            Err(GraphError::CapacityMismatch { expected: self.n, found: s.capacity() })
        } else {
            Ok(())
        }
    }

    /// `|N(v) ∩ V^(to)|`. Zero when `to` is the vertex's own class.
    pub fn cross_degree(&self, v: VertexRef, to: Class) -> Result<usize, GraphError> {
        self.check_vertex(v)?;
        Ok(self.row(v.class, v.offset, to).count_ones(..))
    }

    pub fn neighbors(&self, v: VertexRef, to: Class) -> Result<VertexSet, GraphError> {
        self.check_vertex(v)?;
        Ok(VertexSet::from_bits(to, self.row(v.class, v.offset, to).clone()))
    }

    /// Vertices of `to` adjacent to every member of `s`. The empty set has
    /// all of `V^(to)` as common neighbourhood.
    pub fn common_neighbors(&self, s: &VertexSet, to: Class) -> Result<VertexSet, GraphError> {
        self.check_set(s)?;
        if s.class() == to {
            return Err(GraphError::SameClass(to));
        }
        let mut common = VertexSet::full(to, self.n);
        for u in s.iter() {
            common.members.intersect_with(self.row(s.class(), u, to));
        }
        Ok(common)
    }

    /// Minimum over all vertices `v` and foreign classes `j` of
    /// `|N(v) ∩ V^(j)|`.
    pub fn bar_min_degree(&self) -> usize {
        self.min_degree_witness().1
    }

    /// A vertex and foreign class attaining [`bar_min_degree`], with the
    /// degree itself. Ties go to the lowest class, offset, then target class.
    ///
    /// [`bar_min_degree`]: TripartiteGraph::bar_min_degree
    pub fn min_degree_witness(&self) -> ((VertexRef, Class), usize) {
        let mut best = ((VertexRef::new(Class::V1, 0), Class::V2), usize::MAX);
        for c in Class::ALL {
            for u in 0..self.n {
                for to in c.others() {
                    let d = self.row(c, u, to).count_ones(..);
                    if d < best.1 {
                        best = ((VertexRef::new(c, u), to), d);
                    }
                }
            }
        }
        best
    }

    /// Number of edges between two sets of distinct classes.
    pub fn edges_between(&self, a: &VertexSet, b: &VertexSet) -> Result<usize, GraphError> {
        self.check_set(a)?;
        self.check_set(b)?;
        if a.class() == b.class() {
            return Err(GraphError::SameClass(a.class()));
        }
        Ok(a.iter()
            .map(|u| self.row(a.class(), u, b.class()).intersection_count(&b.members))
            .sum())
    }

    /// Exact edge density `e(a, b) / (|a| |b|)`.
    pub fn density(&self, a: &VertexSet, b: &VertexSet) -> Result<Ratio<u64>, GraphError> {
        if a.is_empty() || b.is_empty() {
            return Err(GraphError::EmptySet);
        }
        let e = self.edges_between(a, b)?;
        Ok(Ratio::new(e as u64, (a.len() * b.len()) as u64))
    }

    /// The subgraph induced on one equal-sized set per class, with offsets
    /// relabelled densely in increasing order.
    pub fn induced(&self, sets: [&VertexSet; 3]) -> Result<Induced, GraphError> {
        for (c, s) in Class::ALL.iter().zip(sets.iter()) {
            self.check_set(s)?;
            if s.class() != *c {
                return Err(GraphError::ClassMismatch { expected: *c, found: s.class() });
            }
        }
        let sizes = [sets[0].len(), sets[1].len(), sets[2].len()];
        if sizes[0] != sizes[1] || sizes[1] != sizes[2] {
            return Err(GraphError::UnbalancedInduce(sizes));
        }
        let m = sizes[0];
        if m == 0 {
            return Err(GraphError::EmptyClasses);
        }
        let maps = [sets[0].to_vec(), sets[1].to_vec(), sets[2].to_vec()];
        let mut builder = GraphBuilder::new(m);
        for (a, b) in class_pairs() {
            for (nu, &u) in maps[a.index()].iter().enumerate() {
                let row = self.row(a, u, b);
                for (nv, &v) in maps[b.index()].iter().enumerate() {
                    if row.contains(v) {
                        builder.join(a, nu, b, nv);
                    }
                }
            }
        }
        Ok(Induced { graph: builder.build()?, maps })
    }

    /// A builder pre-loaded with this graph's edges.
    pub fn to_builder(&self) -> GraphBuilder {
        GraphBuilder { n: self.n, rows: self.rows.clone() }
    }
}

/// The three unordered class pairs in canonical order.
pub fn class_pairs() -> [(Class, Class); 3] {
    [(Class::V1, Class::V2), (Class::V1, Class::V3), (Class::V2, Class::V3)]
}
