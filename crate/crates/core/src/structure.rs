//! Detectors for the structures the extremal argument branches on.
//!
//! Every detector returns either a witness that has been re-checked against
//! the graph or nothing. Outside the small exhaustive regimes a `None` is a
//! heuristic miss, not a proof of absence.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::rng_from_seed;
use crate::graph::{class_pairs, Class, TripartiteGraph, VertexRef, VertexSet};
use crate::pattern::{BlockAssignment, BlockId, PatternGraph};

pub fn default_gamma() -> Ratio<u64> {
    Ratio::new(1, 20)
}

pub fn default_delta() -> Ratio<u64> {
    Ratio::new(1, 10)
}

/// `detect_extreme` enumerates every triple when `⌊N/3⌋` is at most this.
pub const EXTREME_EXHAUSTIVE_SIZE: usize = 2;

/// `fit_approx` enumerates every balanced assignment when there are at most
/// this many.
pub const FIT_EXHAUSTIVE_LIMIT: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("malformed assignment: {0}")]
    MalformedAssignment(String),
    #[error("N = {n} is not of the form (6q+3)h for h = {h}")]
    WrongDivisibility { n: usize, h: usize },
}

/// Three sets of size `⌊N/3⌋`, one per class, pairwise sparse. Densities are
/// listed for the pairs (1,2), (1,3), (2,3).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremeWitness {
    pub sets: [Vec<usize>; 3],
    pub densities: [Ratio<u64>; 3],
}

impl ExtremeWitness {
    pub(crate) fn measure(g: &TripartiteGraph, sets: [Vec<usize>; 3]) -> Self {
        let vs = vertex_sets(g.n(), &sets);
        let densities = class_pairs().map(|(a, b)| g.density(&vs[a.index()], &vs[b.index()]).expect("nonempty"));
        ExtremeWitness { sets, densities }
    }

    pub fn verify(&self, g: &TripartiteGraph, gamma: Ratio<u64>) -> Result<(), String> {
        let k = g.n() / 3;
        for (i, s) in self.sets.iter().enumerate() {
            let mut sorted = s.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != k || s.len() != k || s.iter().any(|&o| o >= g.n()) {
                return Err(format!("set {} is not {k} distinct offsets", i + 1));
            }
        }
        let again = ExtremeWitness::measure(g, self.sets.clone());
        if again.densities != self.densities {
            return Err("recorded densities do not match the graph".into());
        }
        match self.densities.iter().position(|&d| d > gamma) {
            Some(p) => Err(format!("pair {} has density {} > {gamma}", p + 1, self.densities[p])),
            None => Ok(()),
        }
    }
}

fn vertex_sets(n: usize, sets: &[Vec<usize>; 3]) -> [VertexSet; 3] {
    Class::ALL.map(|c| VertexSet::from_offsets(c, n, sets[c.index()].iter().copied()))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Swap refinement of three `k`-sets minimizing the number of edges among
/// them. `cnt[i][v]` is the number of neighbours of `(i, v)` in the sets of
/// the other two classes.
struct TripleSearch<'a> {
    g: &'a TripartiteGraph,
    member: [Vec<bool>; 3],
    cnt: [Vec<usize>; 3],
}

impl<'a> TripleSearch<'a> {
    fn new(g: &'a TripartiteGraph, sets: &[Vec<usize>; 3]) -> Self {
        let n = g.n();
        let mut member = [vec![false; n], vec![false; n], vec![false; n]];
        for c in 0..3 {
            for &o in &sets[c] {
                member[c][o] = true;
            }
        }
        let mut cnt = [vec![0; n], vec![0; n], vec![0; n]];
        for c in Class::ALL {
            for v in 0..n {
                cnt[c.index()][v] =
                    c.others().iter().map(|&d| g.row(c, v, d).ones().filter(|&w| member[d.index()][w]).count()).sum();
            }
        }
        TripleSearch { g, member, cnt }
    }

    fn flip(&mut self, c: Class, v: usize, into: bool) {
        self.member[c.index()][v] = into;
        for d in c.others() {
            for w in self.g.row(c, v, d).ones() {
                if into {
                    self.cnt[d.index()][w] += 1;
                } else {
                    self.cnt[d.index()][w] -= 1;
                }
            }
        }
    }

    /// Best-improvement swaps until none helps or `cap` swaps were made.
    fn refine(&mut self, cap: usize) {
        let n = self.g.n();
        for _ in 0..cap {
            let mut best: Option<(usize, Class, usize, usize)> = None;
            for c in Class::ALL {
                let ci = c.index();
                let out = (0..n).filter(|&u| self.member[ci][u]).max_by_key(|&u| (self.cnt[ci][u], std::cmp::Reverse(u)));
                let inn = (0..n).filter(|&v| !self.member[ci][v]).min_by_key(|&v| (self.cnt[ci][v], v));
                if let (Some(u), Some(v)) = (out, inn) {
                    if self.cnt[ci][u] > self.cnt[ci][v] {
                        let gain = self.cnt[ci][u] - self.cnt[ci][v];
                        if best.map_or(true, |(b, ..)| gain > b) {
                            best = Some((gain, c, u, v));
                        }
                    }
                }
            }
            let Some((_, c, u, v)) = best else { break };
            self.flip(c, u, false);
            self.flip(c, v, true);
        }
    }

    fn sets(&self) -> [Vec<usize>; 3] {
        [0, 1, 2].map(|c| (0..self.g.n()).filter(|&v| self.member[c][v]).collect())
    }
}

/// Looks for an extreme-case triple with every pairwise density at most
/// `gamma`. Exhaustive when `⌊N/3⌋ ≤ 2`; otherwise `effort` seeded restarts
/// of swap refinement.
pub fn detect_extreme(g: &TripartiteGraph, gamma: Ratio<u64>, seed: u64, effort: usize) -> Option<ExtremeWitness> {
    let n = g.n();
    let k = n / 3;
    if k == 0 {
        return None;
    }
    let accept = |sets: [Vec<usize>; 3]| {
        let w = ExtremeWitness::measure(g, sets);
        w.densities.iter().all(|&d| d <= gamma).then_some(w)
    };
    if k <= EXTREME_EXHAUSTIVE_SIZE {
        let combos = combinations(n, k);
        for a in &combos {
            for b in &combos {
                for c in &combos {
                    if let Some(w) = accept([a.clone(), b.clone(), c.clone()]) {
                        return Some(w);
                    }
                }
            }
        }
        return None;
    }
    let mut rng = rng_from_seed(seed);
    for restart in 0..effort.max(1) {
        let start = if restart == 0 { low_degree_start(g, k) } else { random_start(&mut rng, n, k) };
        let mut search = TripleSearch::new(g, &start);
        search.refine(n * n);
        if let Some(w) = accept(search.sets()) {
            return Some(w);
        }
    }
    None
}

/// Class by class, the `k` vertices with fewest neighbours among the
/// current candidates of the other classes.
fn low_degree_start(g: &TripartiteGraph, k: usize) -> [Vec<usize>; 3] {
    let n = g.n();
    let mut cand: [Vec<bool>; 3] = [vec![true; n], vec![true; n], vec![true; n]];
    for c in Class::ALL {
        let mut order: Vec<(usize, usize)> = (0..n)
            .map(|v| {
                let d = c.others().iter().map(|&d| g.row(c, v, d).ones().filter(|&w| cand[d.index()][w]).count()).sum();
                (d, v)
            })
            .collect();
        order.sort_unstable();
        cand[c.index()] = vec![false; n];
        for &(_, v) in &order[..k] {
            cand[c.index()][v] = true;
        }
    }
    cand.map(|m| (0..n).filter(|&v| m[v]).collect())
}

fn random_start(rng: &mut impl Rng, n: usize, k: usize) -> [Vec<usize>; 3] {
    [(); 3].map(|_| {
        let mut s = rand::seq::index::sample(rng, n, k).into_vec();
        s.sort_unstable();
        s
    })
}

/// Edge density of one pattern-nonedge block pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonedgeDensity {
    pub a: BlockId,
    pub b: BlockId,
    pub edges: usize,
    pub density: Ratio<u64>,
}

/// A block assignment under which every pattern nonedge is sparser than
/// the tolerance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxWitness {
    pub m: usize,
    pub assignment: BlockAssignment,
    pub densities: Vec<NonedgeDensity>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ApproxCheck {
    Witness(ApproxWitness),
    /// The first nonedge pair (in pattern order) whose density is too high.
    Violation(NonedgeDensity),
}

/// Parts of a pattern are mapped to the classes `V1, V2, ...` in order.
fn pattern_classes(pattern: &PatternGraph) -> Result<Vec<Class>, StructureError> {
    if !(2..=3).contains(&pattern.parts()) {
        return Err(StructureError::MalformedAssignment(format!("pattern has {} parts", pattern.parts())));
    }
    Ok(Class::ALL[..pattern.parts()].to_vec())
}

/// Checks that `assignment` realizes `g` as δ-approximately `pattern(M)`.
pub fn check_approx(
    g: &TripartiteGraph,
    pattern: &PatternGraph,
    assignment: &BlockAssignment,
    delta: Ratio<u64>,
) -> Result<ApproxCheck, StructureError> {
    let classes = pattern_classes(pattern)?;
    let n = g.n();
    let b = pattern.blocks();
    let bad = |s: String| Err(StructureError::MalformedAssignment(s));
    if assignment.columns.len() != classes.len() {
        return bad(format!("{} parts given, pattern has {}", assignment.columns.len(), classes.len()));
    }
    if b == 0 || n < b {
        return bad(format!("N = {n} cannot be split into {b} nonempty blocks"));
    }
    let m = n / b;
    for (p, part) in assignment.columns.iter().enumerate() {
        if part.len() != n {
            return bad(format!("part {} labels {} vertices, expected {n}", p + 1, part.len()));
        }
        if let Some(&j) = part.iter().find(|&&j| j >= b) {
            return bad(format!("part {} uses block {j} of {b}", p + 1));
        }
    }
    for (p, sizes) in assignment.block_sizes(b).iter().enumerate() {
        if let Some(&s) = sizes.iter().find(|&&s| s != m && s != m + 1) {
            return bad(format!("part {} has a block of size {s}, expected {m} or {}", p + 1, m + 1));
        }
    }
    let block = |id: BlockId| {
        let class = classes[id.part];
        let labels = &assignment.columns[id.part];
        VertexSet::from_offsets(class, n, (0..n).filter(|&o| labels[o] == id.column))
    };
    let mut densities = Vec::new();
    for (a, bb) in pattern.nonedges() {
        let (sa, sb) = (block(a), block(bb));
        let edges = g.edges_between(&sa, &sb).expect("distinct classes");
        let density = Ratio::new(edges as u64, (sa.len() * sb.len()) as u64);
        let entry = NonedgeDensity { a, b: bb, edges, density };
        if density >= delta {
            return Ok(ApproxCheck::Violation(entry));
        }
        densities.push(entry);
    }
    Ok(ApproxCheck::Witness(ApproxWitness { m, assignment: assignment.clone(), densities }))
}

/// Vertices of a graph split into parts (each inside one class) to be
/// labelled with pattern blocks.
pub(crate) struct PartView {
    pub classes: Vec<Class>,
    pub members: Vec<Vec<usize>>,
}

impl PartView {
    pub fn whole(n: usize, classes: &[Class]) -> Self {
        PartView { classes: classes.to_vec(), members: vec![(0..n).collect(); classes.len()] }
    }
}

/// Block labels of a part view with cached neighbour counts per block.
struct Fitter {
    b: usize,
    /// nbrs[p][i][q]: member indices of part q adjacent to member i of part p.
    nbrs: Vec<Vec<Vec<Vec<usize>>>>,
    /// partners[p][col]: the blocks forming a nonedge with block (p, col).
    partners: Vec<Vec<Vec<BlockId>>>,
    labels: Vec<Vec<usize>>,
    /// cnt[p][i][q * b + col]: neighbours of member i of part p in block (q, col).
    cnt: Vec<Vec<Vec<u32>>>,
}

impl Fitter {
    fn new(g: &TripartiteGraph, view: &PartView, pattern: &PatternGraph) -> Self {
        let parts = view.classes.len();
        let b = pattern.blocks();
        let nbrs = (0..parts)
            .map(|p| {
                view.members[p]
                    .iter()
                    .map(|&u| {
                        (0..parts)
                            .map(|q| {
                                if q == p {
                                    return Vec::new();
                                }
                                let row = g.row(view.classes[p], u, view.classes[q]);
                                view.members[q].iter().enumerate().filter(|&(_, &v)| row.contains(v)).map(|(j, _)| j).collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut partners = vec![vec![Vec::new(); b]; parts];
        for (x, y) in pattern.nonedges() {
            partners[x.part][x.column].push(y);
            partners[y.part][y.column].push(x);
        }
        let labels = view.members.iter().map(|m| vec![0; m.len()]).collect();
        let cnt = view.members.iter().map(|m| vec![vec![0; parts * b]; m.len()]).collect();
        Fitter { b, nbrs, partners, labels, cnt }
    }

    fn set_labels(&mut self, labels: Vec<Vec<usize>>) {
        self.labels = labels;
        let b = self.b;
        for p in 0..self.labels.len() {
            for i in 0..self.labels[p].len() {
                let mut row = vec![0u32; self.labels.len() * b];
                for (q, list) in self.nbrs[p][i].iter().enumerate() {
                    for &j in list {
                        row[q * b + self.labels[q][j]] += 1;
                    }
                }
                self.cnt[p][i] = row;
            }
        }
    }

    /// Edges from member i of part p into the nonedge partners of block col.
    fn cost(&self, p: usize, i: usize, col: usize) -> u32 {
        self.partners[p][col].iter().map(|blk| self.cnt[p][i][blk.part * self.b + blk.column]).sum()
    }

    #[cfg(test)]
    fn objective(&self) -> u64 {
        let mut total = 0u64;
        for p in 0..self.labels.len() {
            for i in 0..self.labels[p].len() {
                total += self.cost(p, i, self.labels[p][i]) as u64;
            }
        }
        total / 2
    }

    fn relabel(&mut self, p: usize, i: usize, to: usize) {
        let from = self.labels[p][i];
        let b = self.b;
        for q in 0..self.labels.len() {
            for k in 0..self.nbrs[p][i][q].len() {
                let j = self.nbrs[p][i][q][k];
                self.cnt[q][j][p * b + from] -= 1;
                self.cnt[q][j][p * b + to] += 1;
            }
        }
        self.labels[p][i] = to;
    }

    /// Best-improvement swaps between blocks of one part; ties go to the
    /// lowest indices.
    fn refine(&mut self, cap: usize) {
        for _ in 0..cap {
            let mut best: Option<(i64, usize, usize, usize)> = None;
            for p in 0..self.labels.len() {
                let len = self.labels[p].len();
                for i in 0..len {
                    let a = self.labels[p][i];
                    let ci = self.cost(p, i, a) as i64;
                    for j in i + 1..len {
                        let bb = self.labels[p][j];
                        if a == bb {
                            continue;
                        }
                        let gain = ci + self.cost(p, j, bb) as i64 - self.cost(p, i, bb) as i64 - self.cost(p, j, a) as i64;
                        if gain > 0 && best.map_or(true, |(g, ..)| gain > g) {
                            best = Some((gain, p, i, j));
                        }
                    }
                }
            }
            let Some((_, p, i, j)) = best else { break };
            let (a, bb) = (self.labels[p][i], self.labels[p][j]);
            self.relabel(p, i, bb);
            self.relabel(p, j, a);
        }
    }
}

/// Sizes of the blocks of a part with `len` members: `len mod b` blocks get
/// one extra vertex.
fn balanced_sizes(len: usize, b: usize) -> Vec<usize> {
    (0..b).map(|j| len / b + usize::from(j < len % b)).collect()
}

fn random_labels(rng: &mut impl Rng, len: usize, b: usize) -> Vec<usize> {
    let mut labels: Vec<usize> =
        balanced_sizes(len, b).iter().enumerate().flat_map(|(j, &s)| std::iter::repeat(j).take(s)).collect();
    labels.shuffle(rng);
    labels
}

/// Balanced clustering of one part by neighbourhood distance: farthest-point
/// centres, then greedy nearest-centre assignment under size caps.
fn cluster_part(rows: &[Vec<bool>], b: usize) -> Vec<usize> {
    let len = rows.len();
    let dist = |x: usize, y: usize| rows[x].iter().zip(&rows[y]).filter(|(a, c)| a != c).count();
    let mut centres = vec![0];
    while centres.len() < b.min(len) {
        let next = (0..len)
            .filter(|v| !centres.contains(v))
            .max_by_key(|&v| (centres.iter().map(|&c| dist(v, c)).min().unwrap_or(0), std::cmp::Reverse(v)))
            .expect("enough members");
        centres.push(next);
    }
    let mut pairs: Vec<(usize, usize, usize)> =
        (0..len).flat_map(|v| centres.iter().enumerate().map(move |(c, &x)| (v, c, x))).map(|(v, c, x)| (dist(v, x), v, c)).collect();
    pairs.sort_unstable();
    let (m, extra) = (len / b, len % b);
    let mut size = vec![0usize; b];
    let mut big = 0;
    let mut label = vec![usize::MAX; len];
    for (_, v, c) in pairs {
        if label[v] != usize::MAX {
            continue;
        }
        let cap = if big < extra || size[c] == m + 1 { m + 1 } else { m };
        if size[c] >= cap {
            continue;
        }
        label[v] = c;
        size[c] += 1;
        if size[c] == m + 1 {
            big += 1;
        }
    }
    label
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

/// Clusters every part, then picks the column names of the clusters that
/// minimize the nonedge edge mass.
fn clustered_start(g: &TripartiteGraph, view: &PartView, pattern: &PatternGraph) -> Vec<Vec<usize>> {
    let parts = view.classes.len();
    let b = pattern.blocks();
    let clusters: Vec<Vec<usize>> = (0..parts)
        .map(|p| {
            let rows: Vec<Vec<bool>> = view.members[p]
                .iter()
                .map(|&u| {
                    (0..parts)
                        .filter(|&q| q != p)
                        .flat_map(|q| {
                            let row = g.row(view.classes[p], u, view.classes[q]);
                            view.members[q].iter().map(move |&v| row.contains(v))
                        })
                        .collect()
                })
                .collect();
            cluster_part(&rows, b)
        })
        .collect();
    // edges between cluster x of part p and cluster y of part q
    let mut e = vec![vec![0u64; parts * b]; parts * b];
    for p in 0..parts {
        for q in p + 1..parts {
            for (i, &u) in view.members[p].iter().enumerate() {
                let row = g.row(view.classes[p], u, view.classes[q]);
                for (j, &v) in view.members[q].iter().enumerate() {
                    if row.contains(v) {
                        e[p * b + clusters[p][i]][q * b + clusters[q][j]] += 1;
                    }
                }
            }
        }
    }
    let perms = permutations(b);
    let mut choice = vec![0usize; parts];
    let mut best = (u64::MAX, choice.clone());
    loop {
        // perms[choice[p]][cluster] = column
        let mut mass = 0u64;
        for (x, y) in pattern.nonedges() {
            let cx = perms[choice[x.part]].iter().position(|&c| c == x.column).expect("permutation");
            let cy = perms[choice[y.part]].iter().position(|&c| c == y.column).expect("permutation");
            let (lo, hi) = if x.part < y.part { ((x.part, cx), (y.part, cy)) } else { ((y.part, cy), (x.part, cx)) };
            mass += e[lo.0 * b + lo.1][hi.0 * b + hi.1];
        }
        if mass < best.0 {
            best = (mass, choice.clone());
        }
        let mut p = 0;
        while p < parts {
            choice[p] += 1;
            if choice[p] < perms.len() {
                break;
            }
            choice[p] = 0;
            p += 1;
        }
        if p == parts {
            break;
        }
    }
    (0..parts).map(|p| clusters[p].iter().map(|&c| perms[best.1[p]][c]).collect()).collect()
}

fn multinomial(len: usize, b: usize) -> u64 {
    // number of balanced labelings; saturates
    let sizes = balanced_sizes(len, b);
    let mut total: f64 = 1.0;
    let mut left = len;
    for s in sizes {
        let mut c = 1.0f64;
        for t in 0..s {
            c = c * (left - t) as f64 / (t + 1) as f64;
        }
        total *= c;
        left -= s;
    }
    if total > u64::MAX as f64 {
        u64::MAX
    } else {
        total.round() as u64
    }
}

/// All labelings of `len` members whose block sizes are `sizes`.
fn all_labelings(len: usize, sizes: &[usize]) -> Vec<Vec<usize>> {
    fn go(i: usize, len: usize, left: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == len {
            out.push(cur.clone());
            return;
        }
        for j in 0..left.len() {
            if left[j] > 0 {
                left[j] -= 1;
                cur.push(j);
                go(i + 1, len, left, cur, out);
                cur.pop();
                left[j] += 1;
            }
        }
    }
    let mut out = Vec::new();
    go(0, len, &mut sizes.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Searches labelings of `view` by `pattern` blocks and returns the first one
/// `accept` takes. Exhaustive when the number of balanced labelings is at
/// most [`FIT_EXHAUSTIVE_LIMIT`].
pub(crate) fn fit_labels(
    g: &TripartiteGraph,
    view: &PartView,
    pattern: &PatternGraph,
    seed: u64,
    effort: usize,
    accept: &dyn Fn(&[Vec<usize>]) -> bool,
) -> Option<Vec<Vec<usize>>> {
    let b = pattern.blocks();
    let parts = view.classes.len();
    if b == 0 || view.members.iter().any(|m| m.len() < b) {
        return None;
    }
    let count = view
        .members
        .iter()
        .map(|m| multinomial(m.len(), b))
        .try_fold(1u64, |acc, c| acc.checked_mul(c));
    if count.is_some_and(|c| c <= FIT_EXHAUSTIVE_LIMIT) {
        let per_part: Vec<Vec<Vec<usize>>> =
            view.members.iter().map(|m| all_labelings(m.len(), &balanced_sizes(m.len(), b))).collect();
        let mut idx = vec![0usize; parts];
        loop {
            let labels: Vec<Vec<usize>> = (0..parts).map(|p| per_part[p][idx[p]].clone()).collect();
            if accept(&labels) {
                return Some(labels);
            }
            let mut p = 0;
            while p < parts {
                idx[p] += 1;
                if idx[p] < per_part[p].len() {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
            if p == parts {
                return None;
            }
        }
    }
    let mut fitter = Fitter::new(g, view, pattern);
    let cap = view.members.iter().map(|m| m.len() * m.len()).max().unwrap_or(0);
    let mut rng = rng_from_seed(seed);
    for restart in 0..effort.max(1) {
        let start = if restart == 0 {
            clustered_start(g, view, pattern)
        } else {
            view.members.iter().map(|m| random_labels(&mut rng, m.len(), b)).collect()
        };
        fitter.set_labels(start);
        fitter.refine(cap);
        if accept(&fitter.labels) {
            return Some(fitter.labels.clone());
        }
    }
    None
}

/// Searches for a block assignment showing `g` is δ-approximately
/// `pattern(M)`. Patterns with two parts are fitted on `(V1, V2)`.
pub fn fit_approx(
    g: &TripartiteGraph,
    pattern: &PatternGraph,
    delta: Ratio<u64>,
    seed: u64,
    effort: usize,
) -> Option<ApproxWitness> {
    let classes = pattern_classes(pattern).ok()?;
    let view = PartView::whole(g.n(), &classes);
    let check = |labels: &[Vec<usize>]| {
        let assignment = BlockAssignment { columns: labels.to_vec() };
        check_approx(g, pattern, &assignment, delta).ok()
    };
    let labels = fit_labels(g, &view, pattern, seed, effort, &|l| matches!(check(l), Some(ApproxCheck::Witness(_))))?;
    match check(&labels) {
        Some(ApproxCheck::Witness(w)) => Some(w),
        _ => None,
    }
}

/// Nine sets (`sets[part][column]`) certified as a near-exact blow-up of a
/// pattern along its edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VeryExtremeWitness {
    pub q: usize,
    pub sets: Vec<Vec<Vec<usize>>>,
    /// For each set and each member, the most non-neighbours it has in any
    /// set joined to its own by a pattern edge.
    pub nonadjacency: Vec<Vec<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VeryExtremeViolation {
    SetTooSmall { block: BlockId, size: usize, min: usize },
    TooManyNonNeighbours { vertex: VertexRef, block: BlockId, target: BlockId, count: usize, max: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VeryExtremeCheck {
    Witness(VeryExtremeWitness),
    Violation(VeryExtremeViolation),
}

/// Checks the very extreme conditions for nine given sets against a
/// three-part, three-column pattern (normally `Γ₃`).
pub fn check_very_extreme(
    g: &TripartiteGraph,
    h: usize,
    sets: &[Vec<Vec<usize>>],
    pattern: &PatternGraph,
) -> Result<VeryExtremeCheck, StructureError> {
    let n = g.n();
    if h == 0 || n % h != 0 || (n / h) % 6 != 3 {
        return Err(StructureError::WrongDivisibility { n, h });
    }
    let q = (n / h - 3) / 6;
    if pattern.parts() != 3 || pattern.blocks() != 3 {
        return Err(StructureError::MalformedAssignment("pattern must have 3 parts of 3 blocks".into()));
    }
    if sets.len() != 3 || sets.iter().any(|p| p.len() != 3) {
        return Err(StructureError::MalformedAssignment("expected 3 x 3 sets".into()));
    }
    for (i, part) in sets.iter().enumerate() {
        let mut seen = vec![false; n];
        for set in part {
            for &o in set {
                if o >= n || seen[o] {
                    return Err(StructureError::MalformedAssignment(format!(
                        "offset {o} is out of range or repeated in part {}",
                        i + 1
                    )));
                }
                seen[o] = true;
            }
        }
    }
    let min = 2 * q * h + 1;
    for i in 0..3 {
        for j in 0..3 {
            if sets[i][j].len() < min {
                return Ok(VeryExtremeCheck::Violation(VeryExtremeViolation::SetTooSmall {
                    block: BlockId::new(i, j),
                    size: sets[i][j].len(),
                    min,
                }));
            }
        }
    }
    let max = 3 * h - 3;
    let mut nonadjacency = vec![vec![Vec::new(); 3]; 3];
    for i in 0..3 {
        let ci = Class::ALL[i];
        for j in 0..3 {
            let block = BlockId::new(i, j);
            for &v in &sets[i][j] {
                let mut worst = 0;
                for (k, ck) in Class::ALL.into_iter().enumerate() {
                    if k == i {
                        continue;
                    }
                    for l in 0..3 {
                        let target = BlockId::new(k, l);
                        if !pattern.is_edge(block, target) {
                            continue;
                        }
                        let row = g.row(ci, v, ck);
                        let count = sets[k][l].iter().filter(|&&w| !row.contains(w)).count();
                        if count > max {
                            return Ok(VeryExtremeCheck::Violation(VeryExtremeViolation::TooManyNonNeighbours {
                                vertex: VertexRef::new(ci, v),
                                block,
                                target,
                                count,
                                max,
                            }));
                        }
                        worst = worst.max(count);
                    }
                }
                nonadjacency[i][j].push(worst);
            }
        }
    }
    Ok(VeryExtremeCheck::Witness(VeryExtremeWitness { q, sets: sets.to_vec(), nonadjacency }))
}

/// The nine blocks of a tripartite block assignment as offset lists.
pub fn assignment_sets(assignment: &BlockAssignment, blocks: usize) -> Vec<Vec<Vec<usize>>> {
    assignment
        .columns
        .iter()
        .map(|part| (0..blocks).map(|j| (0..part.len()).filter(|&o| part[o] == j).collect()).collect())
        .collect()
}
