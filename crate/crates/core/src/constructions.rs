//! Generators for the explicit graph families: Sidon-pair gadgets `Q(n,d)`,
//! the three-column lower-bound graph `G₃`, and random test corpora.
//!
//! `Q(n, d)` is realized on `Z_n` from a pair of sets `S, T`:
//!
//! * `u ∈ V1 ~ v ∈ V2` iff `v - u ∈ S`, `v ∈ V2 ~ w ∈ V3` iff `w - v ∈ S`,
//! * `u ∈ V1 ~ w ∈ V3` iff `w - u ∈ T`.
//!
//! Each natural bipartite subgraph is then `d`-regular. A 4-cycle inside a
//! pair forces a repeated difference, so Sidon sets make every pair
//! `C₄`-free, and a triangle forces `s + s' ∈ T`, so `(S + S) ∩ T = ∅`
//! makes the graph triangle-free.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::factor::{FactorCertificate, KhhhCopy};
use crate::graph::{class_pairs, Class, GraphBuilder, TripartiteGraph, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("no Sidon pair found for n = {n}, d = {d} within the search budget")]
    Infeasible { n: usize, d: usize },
    #[error("column {column}: no Sidon pair found for Q({n}, {d})")]
    ColumnInfeasible { column: usize, n: usize, d: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("self-check failed: {0}")]
    SelfCheck(String),
}

/// Seeded RNG used by every generator in the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidonPair {
    pub modulus: usize,
    pub s_set: Vec<usize>,
    pub t_set: Vec<usize>,
}

/// All ordered differences `a - b (mod n)`, `a != b`, are distinct.
pub fn is_sidon(set: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    for &a in set {
        for &b in set {
            if a != b {
                let diff = (a + n - b) % n;
                if std::mem::replace(&mut seen[diff], true) {
                    return false;
                }
            }
        }
    }
    true
}

impl SidonPair {
    pub fn d(&self) -> usize {
        self.s_set.len()
    }

    /// Checks all three invariants exhaustively; returns the first failure.
    pub fn check(&self) -> Result<(), String> {
        let n = self.modulus;
        let distinct = |set: &[usize]| {
            let mut v = set.to_vec();
            v.sort_unstable();
            v.dedup();
            v.len() == set.len() && set.iter().all(|&x| x < n)
        };
        if self.s_set.len() != self.t_set.len() {
            return Err("S and T differ in size".into());
        }
        if !distinct(&self.s_set) || !distinct(&self.t_set) {
            return Err("S or T has repeated or out-of-range elements".into());
        }
        if !is_sidon(&self.s_set, n) {
            return Err("S is not Sidon".into());
        }
        if !is_sidon(&self.t_set, n) {
            return Err("T is not Sidon".into());
        }
        for &a in &self.s_set {
            for &b in &self.s_set {
                if self.t_set.contains(&((a + b) % n)) {
                    return Err(format!("{a} + {b} lies in T"));
                }
            }
        }
        Ok(())
    }
}

/// Search limits for [`find_sidon_pair`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidonBudget {
    pub restarts: usize,
    pub insertions_per_restart: usize,
}

impl Default for SidonBudget {
    fn default() -> Self {
        SidonBudget { restarts: 64, insertions_per_restart: 10_000 }
    }
}

struct SidonSearch<'a, R: Rng> {
    n: usize,
    d: usize,
    rng: &'a mut R,
    insertions: usize,
    limit: usize,
}

impl<R: Rng> SidonSearch<'_, R> {
    /// Extends `set` to size `d` with candidates from `pool`, keeping the
    /// differences recorded in `used` distinct.
    fn extend(&mut self, set: &mut Vec<usize>, used: &mut [bool], pool: &[usize], from: usize) -> bool {
        if set.len() == self.d {
            return true;
        }
        for idx in from..pool.len() {
            if pool.len() - idx < self.d - set.len() {
                break;
            }
            if self.insertions >= self.limit {
                return false;
            }
            let c = pool[idx];
            let mut diffs = Vec::with_capacity(2 * set.len());
            let mut ok = true;
            for &x in set.iter() {
                for diff in [(c + self.n - x) % self.n, (x + self.n - c) % self.n] {
                    if used[diff] || diffs.contains(&diff) {
                        ok = false;
                        break;
                    }
                    diffs.push(diff);
                }
                if !ok {
                    break;
                }
            }
            if !ok {
                continue;
            }
            self.insertions += 1;
            for &diff in &diffs {
                used[diff] = true;
            }
            set.push(c);
            if self.extend(set, used, pool, idx + 1) {
                return true;
            }
            set.pop();
            for &diff in &diffs {
                used[diff] = false;
            }
        }
        false
    }

    fn attempt(&mut self) -> Option<SidonPair> {
        let n = self.n;
        // Translating S and T by (c, 2c) preserves every invariant, so S may
        // be assumed to contain 0.
        let mut rest: Vec<usize> = (1..n).collect();
        rest.shuffle(self.rng);
        let mut s = vec![0];
        let mut used_s = vec![false; n];
        loop {
            if !self.extend(&mut s, &mut used_s, &rest, 0) {
                return None;
            }
            let mut sums = vec![false; n];
            for &a in &s {
                for &b in &s {
                    sums[(a + b) % n] = true;
                }
            }
            let mut pool: Vec<usize> = (0..n).filter(|&x| !sums[x]).collect();
            pool.shuffle(self.rng);
            let mut t = Vec::new();
            let mut used_t = vec![false; n];
            if self.extend(&mut t, &mut used_t, &pool, 0) {
                return Some(SidonPair { modulus: n, s_set: s, t_set: t });
            }
            if self.insertions >= self.limit {
                return None;
            }
            // T is impossible for this S; reshuffle and rebuild S.
            self.insertions += 1;
            rest.shuffle(self.rng);
            s = vec![0];
            used_s = vec![false; n];
        }
    }
}

/// Randomized backtracking search for a Sidon pair in `Z_n` with `|S| = |T| = d`.
/// Deterministic given `seed`.
pub fn find_sidon_pair(n: usize, d: usize, seed: u64, budget: SidonBudget) -> Result<SidonPair, ConstructionError> {
    if n == 0 {
        return Err(ConstructionError::InvalidParams("modulus must be positive".into()));
    }
    if d == 0 {
        return Ok(SidonPair { modulus: n, s_set: vec![], t_set: vec![] });
    }
    // d(d-1) distinct nonzero differences must fit in Z_n \ {0}.
    if d * (d - 1) > n - 1 {
        return Err(ConstructionError::Infeasible { n, d });
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..budget.restarts {
        let mut search =
            SidonSearch { n, d, rng: &mut rng, insertions: 0, limit: budget.insertions_per_restart };
        if let Some(mut pair) = search.attempt() {
            pair.s_set.sort_unstable();
            pair.t_set.sort_unstable();
            debug_assert_eq!(pair.check(), Ok(()));
            return Ok(pair);
        }
    }
    Err(ConstructionError::Infeasible { n, d })
}

#[derive(Clone, Debug)]
pub struct QGraph {
    pub graph: TripartiteGraph,
    pub pair: SidonPair,
}

/// The graph of a Sidon pair (see the module docs).
pub fn q_graph_from_pair(pair: &SidonPair) -> TripartiteGraph {
    let n = pair.modulus;
    let mut b = GraphBuilder::new(n);
    for u in 0..n {
        for &s in &pair.s_set {
            b.join(Class::V1, u, Class::V2, (u + s) % n);
            b.join(Class::V2, u, Class::V3, (u + s) % n);
        }
        for &t in &pair.t_set {
            b.join(Class::V1, u, Class::V3, (u + t) % n);
        }
    }
    b.build().expect("modulus is positive")
}

pub fn q_graph(n: usize, d: usize, seed: u64, budget: SidonBudget) -> Result<QGraph, ConstructionError> {
    let pair = find_sidon_pair(n, d, seed, budget)?;
    Ok(QGraph { graph: q_graph_from_pair(&pair), pair })
}

/// Parameters of the three-column graph `G₃` with `N = (3q + r)h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct G3Params {
    pub h: usize,
    pub q: usize,
    pub r: usize,
}

impl G3Params {
    pub fn new(h: usize, q: usize, r: usize) -> Result<Self, ConstructionError> {
        if h < 3 {
            return Err(ConstructionError::InvalidParams(format!("h = {h} must be at least 3")));
        }
        if q < 1 {
            return Err(ConstructionError::InvalidParams("q must be at least 1".into()));
        }
        if !(1..=2).contains(&r) {
            return Err(ConstructionError::InvalidParams(format!("r = {r} must be 1 or 2")));
        }
        Ok(G3Params { h, q, r })
    }

    pub fn n(&self) -> usize {
        (3 * self.q + self.r) * self.h
    }

    /// `(qh + rh - 1, qh, qh + 1)`.
    pub fn column_sizes(&self) -> [usize; 3] {
        let (h, q, r) = (self.h, self.q, self.r);
        [q * h + r * h - 1, q * h, q * h + 1]
    }

    /// Internal degree of each column's `Q` graph; `None` for an empty column.
    pub fn column_degrees(&self) -> [Option<usize>; 3] {
        let (h, r) = (self.h as i64, self.r as i64);
        let d1 = r * h + h - 4;
        [(d1 >= 0).then_some(d1 as usize), Some(self.h - 3), Some(self.h - 2)]
    }

    /// `2qh + rh + h - 3`.
    pub fn expected_bar_min_degree(&self) -> usize {
        2 * self.q * self.h + self.r * self.h + self.h - 3
    }
}

/// Each class split into consecutive column ranges of the given sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnLabeling {
    pub sizes: [usize; 3],
}

impl ColumnLabeling {
    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn range(&self, column: usize) -> std::ops::Range<usize> {
        let start: usize = self.sizes[..column].iter().sum();
        start..start + self.sizes[column]
    }

    pub fn column_of(&self, offset: usize) -> usize {
        (0..3).find(|&j| self.range(j).contains(&offset)).expect("offset within N")
    }

    pub fn column_set(&self, class: Class, column: usize) -> VertexSet {
        VertexSet::from_offsets(class, self.n(), self.range(column))
    }
}

#[derive(Clone, Debug)]
pub struct G3Graph {
    pub graph: TripartiteGraph,
    pub params: G3Params,
    pub columns: ColumnLabeling,
    pub sidon_pairs: [Option<SidonPair>; 3],
}

/// Builds `G₃`: column `j` carries a `Q(c_j, d_j)` gadget, and vertices in
/// different columns and different classes are always adjacent.
pub fn g3_construction(params: G3Params, seed: u64, budget: SidonBudget) -> Result<G3Graph, ConstructionError> {
    let sizes = params.column_sizes();
    let degrees = params.column_degrees();
    let columns = ColumnLabeling { sizes };
    let n = params.n();
    let mut builder = GraphBuilder::new(n);
    let mut sidon_pairs: [Option<SidonPair>; 3] = [None, None, None];
    for j in 0..3 {
        let Some(d) = degrees[j] else { continue };
        let pair = find_sidon_pair(sizes[j], d, seed.wrapping_add(j as u64), budget).map_err(|_| {
            ConstructionError::ColumnInfeasible { column: j + 1, n: sizes[j], d }
        })?;
        let q = q_graph_from_pair(&pair);
        let base = columns.range(j).start;
        for (u, v) in q.edges() {
            builder.join(u.class, base + u.offset, v.class, base + v.offset);
        }
        sidon_pairs[j] = Some(pair);
    }
    for (a, b) in class_pairs() {
        for u in 0..n {
            for v in 0..n {
                if columns.column_of(u) != columns.column_of(v) {
                    builder.join(a, u, b, v);
                }
            }
        }
    }
    let graph = builder.build().expect("n > 0");
    let got = graph.bar_min_degree();
    if got != params.expected_bar_min_degree() {
        return Err(ConstructionError::SelfCheck(format!(
            "bar-min-degree {got}, expected {}",
            params.expected_bar_min_degree()
        )));
    }
    Ok(G3Graph { graph, params, columns, sidon_pairs })
}

/// `G(N, 1/2)` repaired by adding random edges at every vertex whose degree
/// into some class is below `target` (clamped to `N`).
pub fn random_graph_with_min_degree(n: usize, target: usize, seed: u64) -> TripartiteGraph {
    let target = target.min(n);
    let mut rng = rng_from_seed(seed);
    let mut b = GraphBuilder::new(n);
    for (a, c) in class_pairs() {
        for u in 0..n {
            for v in 0..n {
                if rng.gen_bool(0.5) {
                    b.join(a, u, c, v);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    for c in Class::ALL {
        for to in c.others() {
            for u in 0..n {
                let missing = target.saturating_sub(b.degree(c, u, to));
                if missing == 0 {
                    continue;
                }
                order.shuffle(&mut rng);
                let fresh: Vec<usize> = order.iter().copied().filter(|&v| !b.has_edge(c, u, to, v)).take(missing).collect();
                for v in fresh {
                    b.join(c, u, to, v);
                }
            }
        }
    }
    b.build().expect("n > 0")
}

/// A random graph whose bar-min-degree is exactly `min(level, N)`.
///
/// Starts from `K_{N,N,N}` and deletes random edges with a random fill rate,
/// never letting a vertex miss more than `N - level` vertices of a class.
/// A quarter of the draws delete greedily to saturation. If no vertex ends
/// up at the cap, one vertex is pushed onto it.
pub fn random_graph_with_exact_min_degree(n: usize, level: usize, seed: u64) -> TripartiteGraph {
    let level = level.min(n);
    let cap = n - level;
    if cap == 0 {
        return TripartiteGraph::complete(n);
    }
    let mut rng = rng_from_seed(seed);
    let mut b = TripartiteGraph::complete(n).to_builder();
    // missing[c][to][u]
    let mut missing = vec![vec![vec![0usize; n]; 3]; 3];
    let fill = if rng.gen_bool(0.25) { 1.0 } else { rng.gen::<f64>() };
    let mut pairs = class_pairs();
    pairs.shuffle(&mut rng);
    for (a, c) in pairs {
        let mut slots: Vec<(usize, usize)> = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).collect();
        slots.shuffle(&mut rng);
        for (u, v) in slots {
            if missing[a.index()][c.index()][u] < cap && missing[c.index()][a.index()][v] < cap && rng.gen_bool(fill) {
                b.unjoin(a, u, c, v);
                missing[a.index()][c.index()][u] += 1;
                missing[c.index()][a.index()][v] += 1;
            }
        }
    }
    let saturated = Class::ALL
        .iter()
        .any(|&c| c.others().iter().any(|&to| missing[c.index()][to.index()].iter().any(|&m| m == cap)));
    if !saturated {
        let c = Class::ALL[rng.gen_range(0..3)];
        let to = c.others()[rng.gen_range(0..2)];
        let u = rng.gen_range(0..n);
        let mut others: Vec<usize> = (0..n).collect();
        others.shuffle(&mut rng);
        for v in others {
            if missing[c.index()][to.index()][u] == cap {
                break;
            }
            if b.has_edge(c, u, to, v) && missing[to.index()][c.index()][v] < cap {
                b.unjoin(c, u, to, v);
                missing[c.index()][to.index()][u] += 1;
                missing[to.index()][c.index()][v] += 1;
            }
        }
    }
    b.build().expect("n > 0")
}

/// Flips every cross pair of `g` independently with probability `p`.
pub fn with_noise(g: &TripartiteGraph, p: f64, seed: u64) -> Result<TripartiteGraph, ConstructionError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ConstructionError::InvalidParams(format!("noise probability {p} outside [0, 1]")));
    }
    let n = g.n();
    let mut rng = rng_from_seed(seed);
    let mut b = g.to_builder();
    for (a, c) in class_pairs() {
        for u in 0..n {
            for v in 0..n {
                if rng.gen_bool(p) {
                    if b.has_edge(a, u, c, v) {
                        b.unjoin(a, u, c, v);
                    } else {
                        b.join(a, u, c, v);
                    }
                }
            }
        }
    }
    Ok(b.build().expect("n > 0"))
}

/// `N/h` random disjoint copies of `K_{h,h,h}` plus noise edges, each other
/// cross pair present with probability `extra_edge_prob`.
pub fn planted_factor_graph(
    n: usize,
    h: usize,
    extra_edge_prob: f64,
    seed: u64,
) -> Result<(TripartiteGraph, FactorCertificate), ConstructionError> {
    if h == 0 || n == 0 || n % h != 0 {
        return Err(ConstructionError::InvalidParams(format!("h = {h} must divide N = {n}")));
    }
    if !(0.0..=1.0).contains(&extra_edge_prob) {
        return Err(ConstructionError::InvalidParams(format!("edge probability {extra_edge_prob} outside [0, 1]")));
    }
    let mut rng = rng_from_seed(seed);
    let perms: [Vec<usize>; 3] = std::array::from_fn(|_| {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(&mut rng);
        p
    });
    let mut b = GraphBuilder::new(n);
    let mut copies = Vec::with_capacity(n / h);
    for i in 0..n / h {
        let parts: [Vec<usize>; 3] = std::array::from_fn(|c| perms[c][i * h..(i + 1) * h].to_vec());
        for (a, c) in class_pairs() {
            for &u in &parts[a.index()] {
                for &v in &parts[c.index()] {
                    b.join(a, u, c, v);
                }
            }
        }
        copies.push(KhhhCopy::new(parts));
    }
    if extra_edge_prob > 0.0 {
        for (a, c) in class_pairs() {
            for u in 0..n {
                for v in 0..n {
                    if !b.has_edge(a, u, c, v) && rng.gen_bool(extra_edge_prob) {
                        b.join(a, u, c, v);
                    }
                }
            }
        }
    }
    Ok((b.build().expect("n > 0"), FactorCertificate::new(copies)))
}
