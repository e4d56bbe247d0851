//! Exact `K_{h,h,h}`-factor search with certificates either way.
//!
//! [`find_factor_exact`] is a depth-first search over copies. At each node it
//! branches on the uncovered vertex with the fewest uncovered neighbours in
//! some other class and enumerates every copy through it in canonical order
//! (classmates, then the first foreign class, then the second, each by
//! increasing offset). A node is refuted early when some uncovered vertex
//! has fewer than `h` uncovered neighbours in a class, and every refuted
//! uncovered set is remembered so that it is never expanded twice.
//!
//! [`brute_force_oracle`] shares nothing with the search: it enumerates all
//! partitions of each class into `h`-blocks and all block matchings.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checks::{find_c4, find_triangle};
use crate::constructions::ColumnLabeling;
use crate::factor::{verify_factor, FactorCertificate, KhhhCopy};
use crate::graph::{class_pairs, Class, TripartiteGraph};

/// Largest class size the bitmask search handles.
pub const MAX_EXACT_N: usize = 64;

/// Default node budget of the exact search.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

/// Default vertex bound (`3N`) of the brute-force oracle.
pub const DEFAULT_ORACLE_BOUND: usize = 18;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("tile size h must be positive")]
    ZeroTileSize,
    #[error("h = {h} does not divide N = {n}")]
    IndivisibleN { n: usize, h: usize },
    #[error("{vertices} vertices exceed the bound of {bound}")]
    TooLarge { vertices: usize, bound: usize },
}

fn check_divisible(n: usize, h: usize) -> Result<(), SolverError> {
    if h == 0 {
        Err(SolverError::ZeroTileSize)
    } else if n % h != 0 {
        Err(SolverError::IndivisibleN { n, h })
    } else {
        Ok(())
    }
}

/// Premises of the column argument, as measured on the graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnPremises {
    pub triangle_free: [bool; 3],
    pub c4_free: [bool; 3],
    /// Largest degree of a vertex into another class inside its own column.
    pub max_internal_degree: [usize; 3],
}

/// No-factor proof for a three-column graph: inside each column every copy
/// meets the column in a star or a single-class set, so the `qh + 1`
/// column-3 vertices of each class need `q + 1` copies of their own, i.e.
/// `3q + 3` copies, while a factor has only `3q + r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnArgument {
    pub h: usize,
    pub q: usize,
    pub r: usize,
    pub column_sizes: [usize; 3],
    pub premises: ColumnPremises,
    pub copies_required: usize,
    pub copies_available: usize,
}

impl ColumnArgument {
    /// Re-measures every premise on `g` and re-checks the count.
    pub fn verify(&self, g: &TripartiteGraph) -> Result<(), String> {
        let labeling = ColumnLabeling { sizes: self.column_sizes };
        match g3_no_factor_certificate(g, &labeling, self.h) {
            ColumnCheck::Certificate(again) if again == *self => Ok(()),
            ColumnCheck::Certificate(_) => Err("recomputed certificate differs".into()),
            ColumnCheck::NotApplicable(reason) => Err(reason),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NoFactorCertificate {
    /// The full search tree was refuted.
    #[serde(rename = "exhausted")]
    ExhaustedSearch { h: usize, explored: u64 },
    ColumnArgument(ColumnArgument),
}

impl NoFactorCertificate {
    /// Re-checks the claim on `g`. An exhausted search is replayed with a
    /// node budget equal to the recorded count, so it must finish with the
    /// same verdict and the same number of nodes.
    pub fn verify(&self, g: &TripartiteGraph) -> Result<(), String> {
        match self {
            NoFactorCertificate::ExhaustedSearch { h, explored } => {
                match find_factor_exact(g, *h, *explored).map_err(|e| e.to_string())? {
                    ExactOutcome::NoFactor(NoFactorCertificate::ExhaustedSearch { explored: e, .. }) if e == *explored => {
                        Ok(())
                    }
                    ExactOutcome::NoFactor(_) => Err("replayed search explored a different number of nodes".into()),
                    ExactOutcome::Factor(_) => Err("the graph has a factor".into()),
                    ExactOutcome::Unknown { .. } => Err(format!("replay did not finish within {explored} nodes")),
                }
            }
            NoFactorCertificate::ColumnArgument(arg) => arg.verify(g),
        }
    }
}

impl Certificate {
    /// Checks a factor against `h`, or replays a no-factor claim.
    pub fn verify(&self, g: &TripartiteGraph, h: usize) -> Result<(), String> {
        match self {
            Certificate::Factor(f) => verify_factor(g, h, f).map_err(|e| e.to_string()),
            Certificate::NoFactor(nf) => {
                let claimed = match nf {
                    NoFactorCertificate::ExhaustedSearch { h, .. } => *h,
                    NoFactorCertificate::ColumnArgument(a) => a.h,
                };
                if claimed != h {
                    return Err(format!("certificate is for h = {claimed}, not {h}"));
                }
                nf.verify(g)
            }
        }
    }
}

/// Either kind of certificate, in its JSON shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Factor(FactorCertificate),
    NoFactor(NoFactorCertificate),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactOutcome {
    Factor(FactorCertificate),
    NoFactor(NoFactorCertificate),
    /// Node budget exhausted before a decision.
    Unknown { explored: u64 },
}

impl ExactOutcome {
    pub fn has_factor(&self) -> Option<bool> {
        match self {
            ExactOutcome::Factor(_) => Some(true),
            ExactOutcome::NoFactor(_) => Some(false),
            ExactOutcome::Unknown { .. } => None,
        }
    }
}

struct BudgetExceeded;

struct Search {
    n: usize,
    h: usize,
    /// adj[(c * 3 + d) * n + u]: neighbours of (c, u) in class d.
    adj: Vec<u64>,
    budget: u64,
    explored: u64,
    refuted: HashSet<[u64; 3]>,
    refuted_cap: usize,
    copies: Vec<[u64; 3]>,
}

fn low_bits(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

/// Bits strictly above `b`.
fn above(b: u32) -> u64 {
    if b >= 63 {
        0
    } else {
        !0u64 << (b + 1)
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = u32> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros();
            m &= m - 1;
            Some(b)
        }
    })
}

impl Search {
    fn new(g: &TripartiteGraph, h: usize, budget: u64) -> Self {
        let n = g.n();
        let mut adj = vec![0u64; 9 * n];
        for c in Class::ALL {
            for d in c.others() {
                for u in 0..n {
                    adj[(c.index() * 3 + d.index()) * n + u] = g.row(c, u, d).ones().fold(0, |m, v| m | 1 << v);
                }
            }
        }
        Search { n, h, adj, budget, explored: 0, refuted: HashSet::new(), refuted_cap: 1 << 21, copies: Vec::new() }
    }

    fn row(&self, c: usize, d: usize, u: u32) -> u64 {
        self.adj[(c * 3 + d) * self.n + u as usize]
    }

    fn search(&mut self, unc: [u64; 3]) -> Result<bool, BudgetExceeded> {
        if unc == [0; 3] {
            return Ok(true);
        }
        self.explored += 1;
        if self.explored > self.budget {
            return Err(BudgetExceeded);
        }
        if self.refuted.contains(&unc) {
            return Ok(false);
        }
        let h = self.h as u32;
        let mut best: Option<(u32, usize, u32)> = None;
        for c in 0..3 {
            for u in bits(unc[c]) {
                let mut lo = u32::MAX;
                for d in (0..3).filter(|&d| d != c) {
                    lo = lo.min((self.row(c, d, u) & unc[d]).count_ones());
                }
                if lo < h {
                    self.remember(unc);
                    return Ok(false);
                }
                if best.map_or(true, |(b, _, _)| lo < b) {
                    best = Some((lo, c, u));
                }
            }
        }
        let (_, c, v) = best.expect("some vertex is uncovered");
        let [d1, d2] = Class::ALL[c].others().map(Class::index);
        let cn1 = self.row(c, d1, v) & unc[d1];
        let cn2 = self.row(c, d2, v) & unc[d2];
        let pool = unc[c] & !(1u64 << v);
        let found = self.pick_mates(unc, (c, d1, d2), 1u64 << v, pool, self.h - 1, cn1, cn2)?;
        if !found {
            self.remember(unc);
        }
        Ok(found)
    }

    fn remember(&mut self, unc: [u64; 3]) {
        if self.refuted.len() < self.refuted_cap {
            self.refuted.insert(unc);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn pick_mates(
        &mut self,
        unc: [u64; 3],
        cls: (usize, usize, usize),
        chosen: u64,
        pool: u64,
        need: usize,
        cn1: u64,
        cn2: u64,
    ) -> Result<bool, BudgetExceeded> {
        if need == 0 {
            return self.pick_first(unc, cls, chosen, 0, cn1, self.h, cn2);
        }
        let h = self.h as u32;
        let (c, d1, d2) = cls;
        for b in bits(pool) {
            let rest = pool & above(b);
            if (rest.count_ones() as usize) < need - 1 {
                break;
            }
            let n1 = cn1 & self.row(c, d1, b);
            let n2 = cn2 & self.row(c, d2, b);
            if n1.count_ones() < h || n2.count_ones() < h {
                continue;
            }
            if self.pick_mates(unc, cls, chosen | 1 << b, rest, need - 1, n1, n2)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    #[allow(clippy::too_many_arguments)]
    fn pick_first(
        &mut self,
        unc: [u64; 3],
        cls: (usize, usize, usize),
        chosen_c: u64,
        chosen_1: u64,
        pool: u64,
        need: usize,
        cn2: u64,
    ) -> Result<bool, BudgetExceeded> {
        if need == 0 {
            return self.pick_second(unc, cls, chosen_c, chosen_1, 0, cn2, self.h);
        }
        let (_, d1, d2) = cls;
        for b in bits(pool) {
            let rest = pool & above(b);
            if (rest.count_ones() as usize) < need - 1 {
                break;
            }
            let n2 = cn2 & self.row(d1, d2, b);
            if (n2.count_ones() as usize) < self.h {
                continue;
            }
            if self.pick_first(unc, cls, chosen_c, chosen_1 | 1 << b, rest, need - 1, n2)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    #[allow(clippy::too_many_arguments)]
    fn pick_second(
        &mut self,
        unc: [u64; 3],
        cls: (usize, usize, usize),
        chosen_c: u64,
        chosen_1: u64,
        chosen_2: u64,
        pool: u64,
        need: usize,
    ) -> Result<bool, BudgetExceeded> {
        let (c, d1, d2) = cls;
        if need == 0 {
            let mut sel = [0u64; 3];
            sel[c] = chosen_c;
            sel[d1] = chosen_1;
            sel[d2] = chosen_2;
            let next = [unc[0] & !sel[0], unc[1] & !sel[1], unc[2] & !sel[2]];
            if self.search(next)? {
                self.copies.push(sel);
                return Ok(true);
            }
            return Ok(false);
        }
        for b in bits(pool) {
            let rest = pool & above(b);
            if (rest.count_ones() as usize) < need - 1 {
                break;
            }
            if self.pick_second(unc, cls, chosen_c, chosen_1, chosen_2 | 1 << b, rest, need - 1)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Decides whether `g` has a `K_{h,h,h}`-factor, exploring at most
/// `node_budget` search nodes. Deterministic.
pub fn find_factor_exact(g: &TripartiteGraph, h: usize, node_budget: u64) -> Result<ExactOutcome, SolverError> {
    let n = g.n();
    check_divisible(n, h)?;
    if n > MAX_EXACT_N {
        return Err(SolverError::TooLarge { vertices: 3 * n, bound: 3 * MAX_EXACT_N });
    }
    let mut search = Search::new(g, h, node_budget);
    let all = low_bits(n);
    match search.search([all; 3]) {
        Ok(true) => {
            let copies = search
                .copies
                .iter()
                .map(|sel| KhhhCopy::new(sel.map(|m| bits(m).map(|b| b as usize).collect())))
                .collect();
            let cert = FactorCertificate::new(copies);
            debug_assert_eq!(verify_factor(g, h, &cert), Ok(()));
            Ok(ExactOutcome::Factor(cert))
        }
        Ok(false) => Ok(ExactOutcome::NoFactor(NoFactorCertificate::ExhaustedSearch { h, explored: search.explored })),
        Err(BudgetExceeded) => Ok(ExactOutcome::Unknown { explored: search.explored }),
    }
}

/// All partitions of `items` into blocks of size `h`, each block sorted and
/// the blocks ordered by their smallest element.
fn block_partitions(items: &[usize], h: usize) -> Vec<Vec<Vec<usize>>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let first = items[0];
    let rest = &items[1..];
    let mut out = Vec::new();
    for mates in combinations(rest, h - 1) {
        let remaining: Vec<usize> = rest.iter().copied().filter(|x| !mates.contains(x)).collect();
        for mut tail in block_partitions(&remaining, h) {
            let mut block = vec![first];
            block.extend(&mates);
            tail.insert(0, block);
            out.push(tail);
        }
    }
    out
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut tail in combinations(&items[i + 1..], k - 1) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..k {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

fn blocks_complete(g: &TripartiteGraph, a: Class, x: &[usize], b: Class, y: &[usize]) -> bool {
    x.iter().all(|&u| y.iter().all(|&v| g.row(a, u, b).contains(v)))
}

/// Brute-force factor test: every triple of block partitions and every pair
/// of block matchings. Refuses graphs with more than `bound` vertices.
pub fn brute_force_oracle(g: &TripartiteGraph, h: usize, bound: usize) -> Result<bool, SolverError> {
    let n = g.n();
    check_divisible(n, h)?;
    if 3 * n > bound {
        return Err(SolverError::TooLarge { vertices: 3 * n, bound });
    }
    let items: Vec<usize> = (0..n).collect();
    let partitions = block_partitions(&items, h);
    let k = n / h;
    let perms = permutations(k);
    for p1 in &partitions {
        for p2 in &partitions {
            // complete12[i][j]: block i of V1 is complete to block j of V2
            let complete12: Vec<Vec<bool>> = p1
                .iter()
                .map(|x| p2.iter().map(|y| blocks_complete(g, Class::V1, x, Class::V2, y)).collect())
                .collect();
            for p3 in &partitions {
                let complete13: Vec<Vec<bool>> = p1
                    .iter()
                    .map(|x| p3.iter().map(|z| blocks_complete(g, Class::V1, x, Class::V3, z)).collect())
                    .collect();
                let complete23: Vec<Vec<bool>> = p2
                    .iter()
                    .map(|y| p3.iter().map(|z| blocks_complete(g, Class::V2, y, Class::V3, z)).collect())
                    .collect();
                for sigma in &perms {
                    if !(0..k).all(|i| complete12[i][sigma[i]]) {
                        continue;
                    }
                    for tau in &perms {
                        if (0..k).all(|i| complete13[i][tau[i]] && complete23[sigma[i]][tau[i]]) {
                            return Ok(true);
                        }
                    }
                }
            }
        }
    }
    Ok(false)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColumnCheck {
    Certificate(ColumnArgument),
    NotApplicable(String),
}

/// Recovers `(q, r)` from column sizes `(qh + rh - 1, qh, qh + 1)`.
fn g3_shape(sizes: [usize; 3], n: usize, h: usize) -> Option<(usize, usize)> {
    if h == 0 || sizes[1] == 0 || sizes[1] % h != 0 {
        return None;
    }
    let q = sizes[1] / h;
    if sizes[2] != q * h + 1 {
        return None;
    }
    let r = (1..=2).find(|&r| sizes[0] == q * h + r * h - 1)?;
    (n == (3 * q + r) * h).then_some((q, r))
}

/// Checks the premises of the column argument for a three-column labeling
/// and, if they hold, returns the resulting no-factor certificate.
pub fn g3_no_factor_certificate(g: &TripartiteGraph, columns: &ColumnLabeling, h: usize) -> ColumnCheck {
    let na = |s: String| ColumnCheck::NotApplicable(s);
    if columns.n() != g.n() {
        return na(format!("columns cover {} offsets, graph has N = {}", columns.n(), g.n()));
    }
    if h < 2 {
        return na("the column argument needs h >= 2".into());
    }
    let Some((q, r)) = g3_shape(columns.sizes, g.n(), h) else {
        return na(format!("column sizes {:?} are not (qh+rh-1, qh, qh+1) for h = {h}", columns.sizes));
    };
    let mut premises =
        ColumnPremises { triangle_free: [true; 3], c4_free: [true; 3], max_internal_degree: [0; 3] };
    for j in 0..3 {
        let sets = Class::ALL.map(|c| columns.column_set(c, j));
        let column = g.induced([&sets[0], &sets[1], &sets[2]]).expect("equal column sizes").graph;
        premises.triangle_free[j] = find_triangle(&column).is_none();
        premises.c4_free[j] = class_pairs().iter().all(|&(a, b)| find_c4(&column, a, b).is_none());
        premises.max_internal_degree[j] = Class::ALL
            .iter()
            .flat_map(|&c| c.others().map(move |d| (c, d)))
            .flat_map(|(c, d)| (0..column.n()).map(move |u| (c, d, u)))
            .map(|(c, d, u)| column.row(c, u, d).count_ones(..))
            .max()
            .unwrap_or(0);
    }
    for j in 0..3 {
        if !premises.triangle_free[j] {
            return na(format!("column {} contains a triangle", j + 1));
        }
        if !premises.c4_free[j] {
            return na(format!("column {} contains a 4-cycle", j + 1));
        }
    }
    // Stars inside columns 2 and 3 must be smaller than h.
    for j in 1..3 {
        if premises.max_internal_degree[j] + 2 > h {
            return na(format!(
                "column {} has internal degree {} > h - 2",
                j + 1,
                premises.max_internal_degree[j]
            ));
        }
    }
    let copies_required = 3 * columns.sizes[2].div_ceil(h);
    let copies_available = g.n() / h;
    if copies_required <= copies_available {
        return na("counting does not exceed the copy budget".into());
    }
    ColumnCheck::Certificate(ColumnArgument {
        h,
        q,
        r,
        column_sizes: columns.sizes,
        premises,
        copies_required,
        copies_available,
    })
}
