//! Randomised greedy packing of vertex-disjoint `K_{h,h,h}` copies, used to
//! seed the clusters of the direct stage.

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;

use crate::constructions::rng_from_seed;
use crate::factor::KhhhCopy;
use crate::graph::{Class, TripartiteGraph};

struct CopySearch<'a> {
    g: &'a TripartiteGraph,
    h: usize,
    free: &'a [FixedBitSet; 3],
    rank: &'a [Vec<usize>; 3],
    nodes: usize,
    cap: usize,
}

impl CopySearch<'_> {
    fn candidates(&self, chosen: &[Vec<usize>; 3], c: usize) -> FixedBitSet {
        let class = Class::ALL[c];
        let mut cand = self.free[c].clone();
        for o in class.others() {
            for &w in &chosen[o.index()] {
                cand.intersect_with(self.g.row(o, w, class));
            }
        }
        cand
    }

    /// Fills classes in order, each in increasing rank so that every copy is
    /// met once.
    fn extend(&mut self, chosen: &mut [Vec<usize>; 3], fixed: usize) -> bool {
        self.nodes += 1;
        if self.nodes > self.cap {
            return false;
        }
        let Some(c) = (0..3).find(|&c| chosen[c].len() < self.h) else { return true };
        let floor = match (c, chosen[c].last()) {
            (0, _) if chosen[0].len() == 1 => None,
            (_, Some(&last)) => Some(self.rank[c][last]),
            _ => None,
        };
        let mut cand: Vec<usize> = self.candidates(chosen, c).ones().filter(|&x| !(c == 0 && x == fixed)).collect();
        cand.retain(|&x| floor.map_or(true, |f| self.rank[c][x] > f));
        cand.sort_by_key(|&x| self.rank[c][x]);
        // not enough left in this class to finish
        if cand.len() < self.h - chosen[c].len() {
            return false;
        }
        for x in cand {
            chosen[c].push(x);
            if self.extend(chosen, fixed) {
                return true;
            }
            chosen[c].pop();
            if self.nodes > self.cap {
                return false;
            }
        }
        false
    }
}

/// Copies through `V1` vertices taken in random order; a vertex that lies in
/// no copy within `cap` search nodes is skipped.
pub(crate) fn greedy_packing(g: &TripartiteGraph, h: usize, seed: u64, cap: usize) -> Vec<KhhhCopy> {
    let n = g.n();
    let mut rng = rng_from_seed(seed);
    let rank: [Vec<usize>; 3] = std::array::from_fn(|_| {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut rank = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i;
        }
        rank
    });
    let mut free: [FixedBitSet; 3] = std::array::from_fn(|_| {
        let mut s = FixedBitSet::with_capacity(n);
        s.insert_range(..);
        s
    });
    let mut roots: Vec<usize> = (0..n).collect();
    roots.sort_by_key(|&v| rank[0][v]);
    let mut copies = Vec::new();
    for v in roots {
        if !free[0].contains(v) {
            continue;
        }
        let mut chosen: [Vec<usize>; 3] = [vec![v], vec![], vec![]];
        let mut search = CopySearch { g, h, free: &free, rank: &rank, nodes: 0, cap };
        if search.extend(&mut chosen, v) {
            for (c, part) in chosen.iter().enumerate() {
                for &x in part {
                    free[c].set(x, false);
                }
            }
            copies.push(KhhhCopy::new(chosen));
        }
    }
    copies
}
