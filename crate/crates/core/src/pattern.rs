//! Block patterns (`Γ₃`, `Θ_{r×n}`) and their blow-ups.
//!
//! A pattern has `parts` rows of `blocks` blocks each. Blocks in different
//! parts are adjacent unless the pair is listed as a nonedge; blocks in the
//! same part are never adjacent. Blowing a pattern up replaces each block
//! by a run of consecutive offsets, each pattern edge by a complete
//! bipartite graph and each nonedge by an empty one.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Class, GraphBuilder, TripartiteGraph, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BlockId {
    pub part: usize,
    pub column: usize,
}

impl BlockId {
    pub fn new(part: usize, column: usize) -> Self {
        BlockId { part, column }
    }
}

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a({})_{}", self.part + 1, self.column + 1)
    }
}

/// The named patterns the tools know about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternId {
    Gamma3,
    Theta22,
    Theta32,
    Theta33,
}

impl PatternId {
    pub fn pattern(self) -> PatternGraph {
        match self {
            PatternId::Gamma3 => PatternGraph::gamma3(),
            PatternId::Theta22 => PatternGraph::theta(2, 2),
            PatternId::Theta32 => PatternGraph::theta(3, 2),
            PatternId::Theta33 => PatternGraph::theta(3, 3),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PatternId::Gamma3 => "gamma3",
            PatternId::Theta22 => "theta22",
            PatternId::Theta32 => "theta32",
            PatternId::Theta33 => "theta33",
        }
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PatternId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gamma3" => Ok(PatternId::Gamma3),
            "theta22" => Ok(PatternId::Theta22),
            "theta32" => Ok(PatternId::Theta32),
            "theta33" => Ok(PatternId::Theta33),
            _ => Err(format!("unknown pattern `{s}` (expected gamma3, theta22, theta32 or theta33)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternGraph {
    parts: usize,
    blocks: usize,
    /// Each nonedge stored once, smaller block first.
    nonedges: BTreeSet<(BlockId, BlockId)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("nonedge {0} -- {1} is not a cross-part block pair")]
    BadNonedge(BlockId, BlockId),
    #[error("blow-ups need exactly 3 parts, pattern has {0}")]
    NotTripartite(usize),
    #[error("block sizes must be given for {parts} parts of {blocks} blocks")]
    ShapeMismatch { parts: usize, blocks: usize },
    #[error("block sizes must be positive")]
    EmptyBlock,
    #[error("parts have unequal total sizes {0:?}")]
    UnbalancedParts(Vec<usize>),
}

impl PatternGraph {
    pub fn new<I>(parts: usize, blocks: usize, nonedges: I) -> Result<Self, PatternError>
    where
        I: IntoIterator<Item = (BlockId, BlockId)>,
    {
        let mut set = BTreeSet::new();
        for (a, b) in nonedges {
            if a.part == b.part || a.part >= parts || b.part >= parts || a.column >= blocks || b.column >= blocks {
                return Err(PatternError::BadNonedge(a, b));
            }
            set.insert(if a < b { (a, b) } else { (b, a) });
        }
        Ok(PatternGraph { parts, blocks, nonedges: set })
    }

    /// Every cross-part block pair is an edge.
    pub fn complete(parts: usize, blocks: usize) -> Self {
        PatternGraph { parts, blocks, nonedges: BTreeSet::new() }
    }

    /// `Θ_{r×n}`: blocks adjacent iff they differ in part and in column.
    pub fn theta(parts: usize, columns: usize) -> Self {
        let nonedges = (0..parts).flat_map(|i| {
            (i + 1..parts).flat_map(move |k| (0..columns).map(move |j| (BlockId::new(i, j), BlockId::new(k, j))))
        });
        PatternGraph::new(parts, columns, nonedges).expect("theta nonedges are cross-part")
    }

    /// `Γ₃`: like `Θ_{3×3}` except that between parts 2 and 3 columns 1 and 2
    /// are crossed. Each block misses exactly one block of every other part,
    /// so the pattern has bar-min-degree 2, and the composite of the three
    /// nonedge matchings is a transposition, which rules out a triangle
    /// factor.
    pub fn gamma3() -> Self {
        let b = BlockId::new;
        let nonedges = [
            (b(0, 0), b(1, 0)),
            (b(0, 1), b(1, 1)),
            (b(0, 2), b(1, 2)),
            (b(0, 0), b(2, 0)),
            (b(0, 1), b(2, 1)),
            (b(0, 2), b(2, 2)),
            (b(1, 0), b(2, 1)),
            (b(1, 1), b(2, 0)),
            (b(1, 2), b(2, 2)),
        ];
        PatternGraph::new(3, 3, nonedges).expect("gamma3 nonedges are cross-part")
    }

    /// A two-part pattern as a three-part one whose extra part is joined to
    /// every block. Three-part patterns come back unchanged.
    pub fn padded_to_three(&self) -> PatternGraph {
        PatternGraph { parts: self.parts.max(3), blocks: self.blocks, nonedges: self.nonedges.clone() }
    }

    pub fn parts(&self) -> usize {
        self.parts
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn nonedges(&self) -> impl Iterator<Item = (BlockId, BlockId)> + '_ {
        self.nonedges.iter().copied()
    }

    pub fn is_nonedge(&self, a: BlockId, b: BlockId) -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        self.nonedges.contains(&key)
    }

    pub fn is_edge(&self, a: BlockId, b: BlockId) -> bool {
        a.part != b.part && !self.is_nonedge(a, b)
    }

    /// All cross-part block pairs that are pattern edges, smaller block first.
    pub fn edges(&self) -> Vec<(BlockId, BlockId)> {
        let mut out = Vec::new();
        for i in 0..self.parts {
            for k in i + 1..self.parts {
                for j in 0..self.blocks {
                    for l in 0..self.blocks {
                        let (a, b) = (BlockId::new(i, j), BlockId::new(k, l));
                        if !self.is_nonedge(a, b) {
                            out.push((a, b));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Block membership of every vertex: `columns[part][offset]` is the column of
/// that vertex's block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockAssignment {
    pub columns: Vec<Vec<usize>>,
}

impl BlockAssignment {
    /// Contiguous blocks of the given sizes, part by part.
    pub fn contiguous(sizes: &[Vec<usize>]) -> Self {
        let columns = sizes
            .iter()
            .map(|part| part.iter().enumerate().flat_map(|(j, &s)| std::iter::repeat(j).take(s)).collect())
            .collect();
        BlockAssignment { columns }
    }

    /// Members of one block of a tripartite assignment.
    pub fn block_set(&self, block: BlockId) -> VertexSet {
        let class = Class::from_index(block.part).expect("tripartite assignment");
        let part = &self.columns[block.part];
        VertexSet::from_offsets(class, part.len(), (0..part.len()).filter(|&o| part[o] == block.column))
    }

    pub fn block_sizes(&self, blocks: usize) -> Vec<Vec<usize>> {
        self.columns
            .iter()
            .map(|part| {
                let mut s = vec![0; blocks];
                for &j in part {
                    if j < blocks {
                        s[j] += 1;
                    }
                }
                s
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct Blowup {
    pub graph: TripartiteGraph,
    pub blocks: BlockAssignment,
}

/// Blows `pattern` up with `sizes[part][column]` vertices per block. Blocks
/// occupy consecutive offsets in column order.
pub fn blowup(pattern: &PatternGraph, sizes: &[Vec<usize>]) -> Result<Blowup, PatternError> {
    if pattern.parts != 3 {
        return Err(PatternError::NotTripartite(pattern.parts));
    }
    if sizes.len() != 3 || sizes.iter().any(|p| p.len() != pattern.blocks) {
        return Err(PatternError::ShapeMismatch { parts: 3, blocks: pattern.blocks });
    }
    if sizes.iter().flatten().any(|&s| s == 0) {
        return Err(PatternError::EmptyBlock);
    }
    let totals: Vec<usize> = sizes.iter().map(|p| p.iter().sum()).collect();
    if totals.iter().any(|&t| t != totals[0]) {
        return Err(PatternError::UnbalancedParts(totals));
    }
    let n = totals[0];
    let blocks = BlockAssignment::contiguous(sizes);
    let mut builder = GraphBuilder::new(n);
    for (a, b) in crate::graph::class_pairs() {
        for u in 0..n {
            let bu = BlockId::new(a.index(), blocks.columns[a.index()][u]);
            for v in 0..n {
                let bv = BlockId::new(b.index(), blocks.columns[b.index()][v]);
                if pattern.is_edge(bu, bv) {
                    builder.join(a, u, b, v);
                }
            }
        }
    }
    Ok(Blowup { graph: builder.build().expect("n > 0"), blocks })
}

/// Blow-up with every block of size `m`.
pub fn uniform_blowup(pattern: &PatternGraph, m: usize) -> Result<Blowup, PatternError> {
    blowup(pattern, &vec![vec![m; pattern.blocks]; pattern.parts])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexRef;
    use num_rational::Ratio;

    #[test]
    fn gamma3_itself_has_bar_min_degree_two() {
        let g = uniform_blowup(&PatternGraph::gamma3(), 1).unwrap().graph;
        assert_eq!(g.n(), 3);
        assert_eq!(g.bar_min_degree(), 2);
        assert_eq!(g.edge_count(), 18);
    }

    #[test]
    fn padded_theta22_keeps_its_pair() {
        let p = PatternGraph::theta(2, 2).padded_to_three();
        assert_eq!(p.parts(), 3);
        assert_eq!(p.nonedges().count(), 2);
        let g = uniform_blowup(&p, 2).unwrap().graph;
        assert_eq!(g.bar_min_degree(), 2);
        assert_eq!(g.cross_degree(VertexRef::new(Class::V3, 0), Class::V1).unwrap(), 4);
    }

    #[test]
    fn theta33_blowup_degree() {
        for m in 1..5 {
            let g = uniform_blowup(&PatternGraph::theta(3, 3), m).unwrap().graph;
            assert_eq!(g.bar_min_degree(), 2 * m);
        }
    }

    #[test]
    fn single_block_blowup_is_complete() {
        let b = blowup(&PatternGraph::complete(3, 1), &[vec![4], vec![4], vec![4]]).unwrap();
        assert_eq!(b.graph, TripartiteGraph::complete(4));
    }

    #[test]
    fn blowup_block_densities() {
        let p = PatternGraph::gamma3();
        let b = uniform_blowup(&p, 2).unwrap();
        for (x, y) in p.edges() {
            let d = b.graph.density(&b.blocks.block_set(x), &b.blocks.block_set(y)).unwrap();
            assert_eq!(d, Ratio::from_integer(1));
        }
        for (x, y) in p.nonedges() {
            let d = b.graph.density(&b.blocks.block_set(x), &b.blocks.block_set(y)).unwrap();
            assert_eq!(d, Ratio::from_integer(0));
        }
        // same-column blocks of theta33 are empty
        let t = uniform_blowup(&PatternGraph::theta(3, 3), 2).unwrap();
        let d = t.graph.density(&t.blocks.block_set(BlockId::new(0, 1)), &t.blocks.block_set(BlockId::new(2, 1)));
        assert_eq!(d.unwrap(), Ratio::from_integer(0));
    }

    #[test]
    fn blowup_errors() {
        let p = PatternGraph::theta(3, 2);
        assert!(matches!(blowup(&p, &[vec![1, 2], vec![2, 2], vec![3, 1]]), Err(PatternError::UnbalancedParts(_))));
        assert!(matches!(blowup(&p, &[vec![1, 2]]), Err(PatternError::ShapeMismatch { .. })));
        assert!(matches!(blowup(&PatternGraph::theta(2, 2), &[vec![1, 1], vec![1, 1]]), Err(PatternError::NotTripartite(2))));
        assert!(matches!(
            PatternGraph::new(3, 2, [(BlockId::new(0, 0), BlockId::new(0, 1))]),
            Err(PatternError::BadNonedge(..))
        ));
    }

    #[test]
    fn unequal_blocks_are_fine_if_parts_balance() {
        let b = blowup(&PatternGraph::theta(3, 2), &[vec![1, 3], vec![2, 2], vec![3, 1]]).unwrap();
        assert_eq!(b.graph.n(), 4);
        assert_eq!(b.blocks.block_sizes(2), vec![vec![1, 3], vec![2, 2], vec![3, 1]]);
    }
}
