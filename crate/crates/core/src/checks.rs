//! Exhaustive structural scans: triangles, 4-cycles inside a class pair,
//! and regularity of natural bipartite subgraphs.

use crate::graph::{class_pairs, Class, TripartiteGraph, VertexRef};

/// Some triangle of `g`, lowest `(u, v, w)` first.
pub fn find_triangle(g: &TripartiteGraph) -> Option<[VertexRef; 3]> {
    for u in 0..g.n() {
        for v in g.row(Class::V1, u, Class::V2).ones() {
            let row = g.row(Class::V1, u, Class::V3);
            if let Some(w) = g.row(Class::V2, v, Class::V3).intersection(row).next() {
                return Some([
                    VertexRef::new(Class::V1, u),
                    VertexRef::new(Class::V2, v),
                    VertexRef::new(Class::V3, w),
                ]);
            }
        }
    }
    None
}

pub fn count_triangles(g: &TripartiteGraph) -> usize {
    let mut total = 0;
    for u in 0..g.n() {
        for v in g.row(Class::V1, u, Class::V2).ones() {
            total += g.row(Class::V2, v, Class::V3).intersection_count(g.row(Class::V1, u, Class::V3));
        }
    }
    total
}

/// A 4-cycle `u1 - v1 - u2 - v2` inside the bipartite graph between classes
/// `a` and `b`, returned as `(u1, u2, v1, v2)` offsets.
pub fn find_c4(g: &TripartiteGraph, a: Class, b: Class) -> Option<(usize, usize, usize, usize)> {
    for u1 in 0..g.n() {
        let r1 = g.row(a, u1, b);
        for u2 in u1 + 1..g.n() {
            let mut common = r1.intersection(g.row(a, u2, b));
            if let (Some(v1), Some(v2)) = (common.next(), common.next()) {
                return Some((u1, u2, v1, v2));
            }
        }
    }
    None
}

pub fn is_c4_free(g: &TripartiteGraph) -> bool {
    class_pairs().iter().all(|&(a, b)| find_c4(g, a, b).is_none())
}

/// `Some(d)` when every vertex has exactly `d` neighbours in each foreign
/// class, `None` otherwise.
pub fn regular_degree(g: &TripartiteGraph) -> Option<usize> {
    let d = g.row(Class::V1, 0, Class::V2).count_ones(..);
    let regular = Class::ALL
        .iter()
        .all(|&c| c.others().iter().all(|&to| (0..g.n()).all(|u| g.row(c, u, to).count_ones(..) == d)));
    regular.then_some(d)
}
