//! Cluster matchings: `K_{h,h}`-factors of a class pair and their extension
//! to `K_{h,h,h}`-factors.
//!
//! Both steps group vertices into `h`-clusters and look for a perfect
//! matching in an auxiliary graph whose edges are the complete cluster
//! pairs. When every vertex misses fewer than `M/(2h²)` (respectively
//! `M/(4h²)`) vertices of the other side, every cluster sees at least half
//! of the other side and the matching exists for any clustering.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::rng_from_seed;
use crate::factor::{verify_factor, FactorCertificate, KhhhCopy};
use crate::graph::{Class, TripartiteGraph, VertexSet};
use crate::matching::{hopcroft_karp, BipartiteMatching};
use crate::pattern::PatternGraph;
use crate::structure::{fit_labels, PartView};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TilerError {
    #[error("sides of sizes {left} and {right} cannot be tiled by K_({h},{h})")]
    UnbalancedOrIndivisible { left: usize, right: usize, h: usize },
    #[error("both sides lie in {0}")]
    SameClass(Class),
    #[error("invalid input factor: {0}")]
    InvalidInputFactor(String),
    #[error("h = {h} does not divide N = {n}")]
    IndivisibleN { n: usize, h: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KhhCopy {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// A `K_{h,h}`-factor of two equal vertex sets in different classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KhhFactor {
    pub left_class: Class,
    pub right_class: Class,
    pub copies: Vec<KhhCopy>,
}

impl KhhFactor {
    /// Checks that the copies are complete, of size `h`, and partition
    /// `b1 ∪ b2`.
    pub fn verify(&self, g: &TripartiteGraph, h: usize, b1: &VertexSet, b2: &VertexSet) -> Result<(), String> {
        if b1.class() != self.left_class || b2.class() != self.right_class {
            return Err("classes do not match".into());
        }
        let mut seen1 = VertexSet::empty(b1.class(), g.n());
        let mut seen2 = VertexSet::empty(b2.class(), g.n());
        for (i, c) in self.copies.iter().enumerate() {
            if c.left.len() != h || c.right.len() != h {
                return Err(format!("copy {i} is not K_({h},{h})"));
            }
            for &u in &c.left {
                if u >= g.n() || seen1.contains(u) || !b1.contains(u) {
                    return Err(format!("copy {i}: left vertex {u} reused or outside the set"));
                }
                seen1.insert(u);
                for &v in &c.right {
                    if v >= g.n() || !g.row(b1.class(), u, b2.class()).contains(v) {
                        return Err(format!("copy {i}: {u} and {v} are not adjacent"));
                    }
                }
            }
            for &v in &c.right {
                if seen2.contains(v) || !b2.contains(v) {
                    return Err(format!("copy {i}: right vertex {v} reused or outside the set"));
                }
                seen2.insert(v);
            }
        }
        if seen1 != *b1 || seen2 != *b2 {
            return Err("copies do not cover both sets".into());
        }
        Ok(())
    }
}

/// A maximum cluster matching that is not perfect, with a Hall-deficient
/// set of left clusters and the smaller set of right items they see.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterFailure {
    pub left_clusters: Vec<Vec<usize>>,
    pub deficient: Vec<usize>,
    pub neighbours: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClusterOutcome {
    Factor(KhhFactor),
    Failure(ClusterFailure),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtendOutcome {
    Factor(FactorCertificate),
    Failure(ClusterFailure),
}

/// Two sparse pairs splitting `A × B` in halves: `(A', B')` and
/// `(A \ A', B \ B')`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaSplitWitness {
    pub a_class: Class,
    pub b_class: Class,
    pub a_prime: Vec<usize>,
    pub b_prime: Vec<usize>,
    pub a_rest: Vec<usize>,
    pub b_rest: Vec<usize>,
    pub densities: [Ratio<u64>; 2],
}

impl ThetaSplitWitness {
    pub fn verify(&self, g: &TripartiteGraph, a: &VertexSet, b: &VertexSet, epsilon: Ratio<u64>) -> Result<(), String> {
        let n = g.n();
        let set = |c, v: &[usize]| VertexSet::from_offsets(c, n, v.iter().copied());
        let (ap, bp) = (set(self.a_class, &self.a_prime), set(self.b_class, &self.b_prime));
        let (ar, br) = (set(self.a_class, &self.a_rest), set(self.b_class, &self.b_rest));
        let mut au = ap.clone();
        au.union_with(&ar);
        let mut bu = bp.clone();
        bu.union_with(&br);
        if !ap.is_disjoint(&ar) || !bp.is_disjoint(&br) || au != *a || bu != *b {
            return Err("halves do not partition the sides".into());
        }
        let half = |s: usize, t: usize| s.abs_diff(t) <= 1;
        if !half(ap.len(), ar.len()) || !half(bp.len(), br.len()) {
            return Err("halves are unbalanced".into());
        }
        let d0 = g.density(&ap, &bp).map_err(|e| e.to_string())?;
        let d1 = g.density(&ar, &br).map_err(|e| e.to_string())?;
        let d = [d0, d1];
        if d != self.densities {
            return Err("recorded densities differ".into());
        }
        if d.iter().any(|&x| x > epsilon) {
            return Err(format!("a half pair is denser than {epsilon}"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KhhOrTheta {
    Factor(KhhFactor),
    Theta(ThetaSplitWitness),
    Unknown,
}

fn chunks(members: &[usize], h: usize) -> Vec<Vec<usize>> {
    members.chunks(h).map(<[usize]>::to_vec).collect()
}

fn complete(g: &TripartiteGraph, a: Class, x: &[usize], b: Class, y: &[usize]) -> bool {
    x.iter().all(|&u| {
        let row = g.row(a, u, b);
        y.iter().all(|&v| row.contains(v))
    })
}

struct ClusterMatch {
    adj: Vec<Vec<usize>>,
    matching: BipartiteMatching,
}

fn match_clusters(g: &TripartiteGraph, a: Class, xs: &[Vec<usize>], b: Class, ys: &[Vec<usize>]) -> ClusterMatch {
    let adj: Vec<Vec<usize>> =
        xs.iter().map(|x| (0..ys.len()).filter(|&j| complete(g, a, x, b, &ys[j])).collect()).collect();
    let matching = hopcroft_karp(ys.len(), &adj);
    ClusterMatch { adj, matching }
}

fn failure(xs: &[Vec<usize>], m: &ClusterMatch) -> ClusterFailure {
    let deficient = m.matching.hall_violator(&m.adj).unwrap_or_default();
    let mut neighbours: Vec<usize> = deficient.iter().flat_map(|&i| m.adj[i].iter().copied()).collect();
    neighbours.sort_unstable();
    neighbours.dedup();
    ClusterFailure { left_clusters: xs.to_vec(), deficient, neighbours }
}

fn khh_from(a: Class, xs: &[Vec<usize>], b: Class, ys: &[Vec<usize>], m: &BipartiteMatching) -> KhhFactor {
    let mut copies: Vec<KhhCopy> = m
        .pairs()
        .map(|(i, j)| {
            let mut left = xs[i].clone();
            let mut right = ys[j].clone();
            left.sort_unstable();
            right.sort_unstable();
            KhhCopy { left, right }
        })
        .collect();
    copies.sort_by(|p, q| p.left.cmp(&q.left));
    KhhFactor { left_class: a, right_class: b, copies }
}

fn check_sides(b1: &VertexSet, b2: &VertexSet, h: usize) -> Result<(), TilerError> {
    if b1.class() == b2.class() {
        return Err(TilerError::SameClass(b1.class()));
    }
    if h == 0 || b1.len() != b2.len() || b1.len() % h != 0 {
        return Err(TilerError::UnbalancedOrIndivisible { left: b1.len(), right: b2.len(), h });
    }
    Ok(())
}

fn clusters_factor(g: &TripartiteGraph, a: Class, xs: &[Vec<usize>], b: Class, ys: &[Vec<usize>]) -> ClusterOutcome {
    let m = match_clusters(g, a, xs, b, ys);
    if m.matching.is_perfect() {
        ClusterOutcome::Factor(khh_from(a, xs, b, ys, &m.matching))
    } else {
        ClusterOutcome::Failure(failure(xs, &m))
    }
}

/// `K_{h,h}`-factor of `(b1, b2)` from clusters of consecutive members.
pub fn cluster_khh_factor(
    g: &TripartiteGraph,
    b1: &VertexSet,
    b2: &VertexSet,
    h: usize,
) -> Result<ClusterOutcome, TilerError> {
    check_sides(b1, b2, h)?;
    Ok(clusters_factor(g, b1.class(), &chunks(&b1.to_vec(), h), b2.class(), &chunks(&b2.to_vec(), h)))
}

fn check_input_factor(g: &TripartiteGraph, h: usize, factor: &KhhFactor) -> Result<(), TilerError> {
    let n = g.n();
    if h == 0 || n % h != 0 {
        return Err(TilerError::IndivisibleN { n, h });
    }
    if factor.left_class == factor.right_class {
        return Err(TilerError::SameClass(factor.left_class));
    }
    let full1 = VertexSet::full(factor.left_class, n);
    let full2 = VertexSet::full(factor.right_class, n);
    factor.verify(g, h, &full1, &full2).map_err(TilerError::InvalidInputFactor)
}

fn extend_with(g: &TripartiteGraph, factor: &KhhFactor, clusters: &[Vec<usize>]) -> ExtendOutcome {
    let (a, b) = (factor.left_class, factor.right_class);
    let c = Class::third(a, b);
    let adj: Vec<Vec<usize>> = clusters
        .iter()
        .map(|x| {
            (0..factor.copies.len())
                .filter(|&j| {
                    let cp = &factor.copies[j];
                    complete(g, c, x, a, &cp.left) && complete(g, c, x, b, &cp.right)
                })
                .collect()
        })
        .collect();
    let matching = hopcroft_karp(factor.copies.len(), &adj);
    if !matching.is_perfect() {
        return ExtendOutcome::Failure(failure(clusters, &ClusterMatch { adj, matching }));
    }
    let copies = matching
        .pairs()
        .map(|(i, j)| {
            let mut parts: [Vec<usize>; 3] = Default::default();
            parts[c.index()] = clusters[i].clone();
            parts[a.index()] = factor.copies[j].left.clone();
            parts[b.index()] = factor.copies[j].right.clone();
            KhhhCopy::new(parts)
        })
        .collect();
    ExtendOutcome::Factor(FactorCertificate::new(copies))
}

/// Extends a `K_{h,h}`-factor covering two whole classes to a
/// `K_{h,h,h}`-factor by matching `h`-clusters of the third class (in
/// offset order) to its copies.
pub fn extend_to_khhh(g: &TripartiteGraph, h: usize, factor: &KhhFactor) -> Result<ExtendOutcome, TilerError> {
    check_input_factor(g, h, factor)?;
    let out = extend_with(g, factor, &chunks(&(0..g.n()).collect::<Vec<_>>(), h));
    if let ExtendOutcome::Factor(cert) = &out {
        debug_assert_eq!(verify_factor(g, h, cert), Ok(()));
    }
    Ok(out)
}

/// Extends a `K_{h,h}`-factor covering two whole classes by matching single
/// vertices of the third class to the `h` slots of each copy. Exact: it
/// fails only if no completion of this factor exists.
pub fn extend_by_slots(g: &TripartiteGraph, h: usize, factor: &KhhFactor) -> Result<ExtendOutcome, TilerError> {
    check_input_factor(g, h, factor)?;
    let (a, b) = (factor.left_class, factor.right_class);
    let c = Class::third(a, b);
    let singles: Vec<Vec<usize>> = (0..g.n()).map(|v| vec![v]).collect();
    let adj: Vec<Vec<usize>> = singles
        .iter()
        .map(|x| {
            factor
                .copies
                .iter()
                .enumerate()
                .filter(|(_, cp)| complete(g, c, x, a, &cp.left) && complete(g, c, x, b, &cp.right))
                .flat_map(|(j, _)| j * h..(j + 1) * h)
                .collect()
        })
        .collect();
    let matching = hopcroft_karp(factor.copies.len() * h, &adj);
    if !matching.is_perfect() {
        return Ok(ExtendOutcome::Failure(failure(&singles, &ClusterMatch { adj, matching })));
    }
    let mut third = vec![Vec::with_capacity(h); factor.copies.len()];
    for (v, slot) in matching.pairs() {
        third[slot / h].push(v);
    }
    let copies = factor
        .copies
        .iter()
        .zip(third)
        .map(|(cp, x)| {
            let mut parts: [Vec<usize>; 3] = Default::default();
            parts[c.index()] = x;
            parts[a.index()] = cp.left.clone();
            parts[b.index()] = cp.right.clone();
            KhhhCopy::new(parts)
        })
        .collect();
    let cert = FactorCertificate::new(copies);
    debug_assert_eq!(verify_factor(g, h, &cert), Ok(()));
    Ok(ExtendOutcome::Factor(cert))
}

/// Like [`extend_to_khhh`] but retries with `attempts` seeded shuffles of
/// the third class.
pub(crate) fn extend_shuffled(
    g: &TripartiteGraph,
    h: usize,
    factor: &KhhFactor,
    seed: u64,
    attempts: usize,
) -> Result<ExtendOutcome, TilerError> {
    let first = extend_to_khhh(g, h, factor)?;
    if matches!(first, ExtendOutcome::Factor(_)) {
        return Ok(first);
    }
    let mut rng = rng_from_seed(seed);
    let mut order: Vec<usize> = (0..g.n()).collect();
    for _ in 0..attempts {
        order.shuffle(&mut rng);
        let out = extend_with(g, factor, &chunks(&order, h));
        if matches!(out, ExtendOutcome::Factor(_)) {
            return Ok(out);
        }
    }
    Ok(first)
}

/// One vertex swap between clusters of one side that makes the unmatched
/// cluster `xs[x]` closer to complete towards `ys[y]` without breaking the
/// partner cluster's matched pair.
fn repair_side(
    g: &TripartiteGraph,
    a: Class,
    xs: &mut [Vec<usize>],
    b: Class,
    ys: &[Vec<usize>],
    x: usize,
    y: usize,
    mate: &[Option<usize>],
) -> bool {
    let bad: Vec<usize> = (0..xs[x].len()).filter(|&p| !complete(g, a, &xs[x][p..=p], b, &ys[y])).collect();
    for p in bad {
        let u = xs[x][p];
        for other in 0..xs.len() {
            if other == x {
                continue;
            }
            for q in 0..xs[other].len() {
                let w = xs[other][q];
                if !complete(g, a, &[w], b, &ys[y]) {
                    continue;
                }
                if let Some(j) = mate[other] {
                    if !complete(g, a, &[u], b, &ys[j]) {
                        continue;
                    }
                }
                xs[x][p] = w;
                xs[other][q] = u;
                return true;
            }
        }
    }
    false
}

/// Cluster matching with seeded reshuffles and swap repair. Returns a
/// factor or `None`.
pub(crate) fn khh_search(
    g: &TripartiteGraph,
    b1: &VertexSet,
    b2: &VertexSet,
    h: usize,
    seed: u64,
    effort: usize,
    start: Option<(Vec<usize>, Vec<usize>)>,
) -> Option<KhhFactor> {
    let (a, b) = (b1.class(), b2.class());
    let mut rng = rng_from_seed(seed);
    let (mut m1, mut m2) = start.unwrap_or_else(|| (b1.to_vec(), b2.to_vec()));
    let rounds = 4 * m1.len() / h.max(1) + 4;
    for attempt in 0..=effort {
        if attempt > 0 {
            m1.shuffle(&mut rng);
            m2.shuffle(&mut rng);
        }
        let mut xs = chunks(&m1, h);
        let mut ys = chunks(&m2, h);
        for _ in 0..rounds {
            let m = match_clusters(g, a, &xs, b, &ys);
            if m.matching.is_perfect() {
                return Some(khh_from(a, &xs, b, &ys, &m.matching));
            }
            let x = m.matching.mate_left.iter().position(Option::is_none).expect("not perfect");
            let y = m.matching.mate_right.iter().position(Option::is_none).expect("balanced sides");
            let fixed = repair_side(g, a, &mut xs, b, &ys, x, y, &m.matching.mate_left)
                || repair_side(g, b, &mut ys, a, &xs, y, x, &m.matching.mate_right);
            if !fixed {
                break;
            }
        }
    }
    None
}

/// Looks for a sparse half split of `(b1, b2)`: both pattern nonedges of
/// `Θ_{2×2}` at density at most `epsilon`.
pub fn theta_split(
    g: &TripartiteGraph,
    b1: &VertexSet,
    b2: &VertexSet,
    epsilon: Ratio<u64>,
    seed: u64,
    effort: usize,
) -> Option<ThetaSplitWitness> {
    let view = PartView { classes: vec![b1.class(), b2.class()], members: vec![b1.to_vec(), b2.to_vec()] };
    let pattern = PatternGraph::theta(2, 2);
    let build = |labels: &[Vec<usize>]| {
        let pick = |p: usize, col: usize| -> Vec<usize> {
            view.members[p].iter().zip(&labels[p]).filter(|&(_, &l)| l == col).map(|(&v, _)| v).collect()
        };
        let (a_prime, a_rest, b_prime, b_rest) = (pick(0, 0), pick(0, 1), pick(1, 0), pick(1, 1));
        let n = g.n();
        let set = |c, v: &[usize]| VertexSet::from_offsets(c, n, v.iter().copied());
        let d0 = g.density(&set(b1.class(), &a_prime), &set(b2.class(), &b_prime)).ok()?;
        let d1 = g.density(&set(b1.class(), &a_rest), &set(b2.class(), &b_rest)).ok()?;
        Some(ThetaSplitWitness {
            a_class: b1.class(),
            b_class: b2.class(),
            a_prime,
            b_prime,
            a_rest,
            b_rest,
            densities: [d0, d1],
        })
    };
    let accept = |labels: &[Vec<usize>]| build(labels).is_some_and(|w| w.densities.iter().all(|&d| d <= epsilon));
    let labels = fit_labels(g, &view, &pattern, seed, effort, &accept)?;
    build(&labels)
}

/// Either a `K_{h,h}`-factor of `(b1, b2)`, a sparse half split, or
/// `Unknown` when neither turned up within `effort`.
pub fn khh_factor_or_theta(
    g: &TripartiteGraph,
    b1: &VertexSet,
    b2: &VertexSet,
    h: usize,
    epsilon: Ratio<u64>,
    seed: u64,
    effort: usize,
) -> Result<KhhOrTheta, TilerError> {
    check_sides(b1, b2, h)?;
    if let ClusterOutcome::Factor(f) = cluster_khh_factor(g, b1, b2, h)? {
        return Ok(KhhOrTheta::Factor(f));
    }
    if let Some(f) = khh_search(g, b1, b2, h, seed, effort, None) {
        return Ok(KhhOrTheta::Factor(f));
    }
    Ok(match theta_split(g, b1, b2, epsilon, seed, effort) {
        Some(w) => KhhOrTheta::Theta(w),
        None => KhhOrTheta::Unknown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::planted_factor_graph;
    use crate::graph::GraphBuilder;

    fn sides(n: usize, a: Class, b: Class) -> (VertexSet, VertexSet) {
        (VertexSet::full(a, n), VertexSet::full(b, n))
    }

    #[test]
    fn complete_pair_factor() {
        let g = TripartiteGraph::complete(6);
        let (b1, b2) = sides(6, Class::V2, Class::V3);
        let ClusterOutcome::Factor(f) = cluster_khh_factor(&g, &b1, &b2, 3).unwrap() else { panic!() };
        assert_eq!(f.copies.len(), 2);
        assert_eq!(f.verify(&g, 3, &b1, &b2), Ok(()));
        let ExtendOutcome::Factor(cert) = extend_to_khhh(&g, 3, &f).unwrap() else { panic!() };
        assert_eq!(verify_factor(&g, 3, &cert), Ok(()));
    }

    #[test]
    fn single_missing_edge_fails() {
        let mut b = TripartiteGraph::complete(2).to_builder();
        b.unjoin(Class::V1, 0, Class::V2, 1);
        let g = b.build().unwrap();
        let (b1, b2) = sides(2, Class::V1, Class::V2);
        let ClusterOutcome::Failure(fail) = cluster_khh_factor(&g, &b1, &b2, 2).unwrap() else { panic!() };
        assert_eq!(fail.deficient, vec![0]);
        assert!(fail.neighbours.is_empty());
    }

    #[test]
    fn precondition_errors() {
        let g = TripartiteGraph::complete(4);
        let (b1, _) = sides(4, Class::V1, Class::V2);
        let b2 = VertexSet::from_offsets(Class::V2, 4, [0, 1]);
        assert!(matches!(cluster_khh_factor(&g, &b1, &b2, 2), Err(TilerError::UnbalancedOrIndivisible { .. })));
        assert!(matches!(cluster_khh_factor(&g, &b1, &b1, 2), Err(TilerError::SameClass(Class::V1))));
        let bad = KhhFactor { left_class: Class::V2, right_class: Class::V3, copies: vec![] };
        assert!(matches!(extend_to_khhh(&g, 2, &bad), Err(TilerError::InvalidInputFactor(_))));
    }

    #[test]
    fn planted_pairs_extend() {
        let (g, cert) = planted_factor_graph(6, 2, 0.0, 3).unwrap();
        let copies = cert.copies.iter().map(|c| KhhCopy { left: c.part(Class::V2).to_vec(), right: c.part(Class::V3).to_vec() });
        let f = KhhFactor { left_class: Class::V2, right_class: Class::V3, copies: copies.collect() };
        // offset-order clusters of V1 rarely line up with the planted ones
        if let ExtendOutcome::Failure(fail) = extend_to_khhh(&g, 2, &f).unwrap() {
            assert!(fail.neighbours.len() < fail.deficient.len());
        }
        let ExtendOutcome::Factor(out) = extend_shuffled(&g, 2, &f, 1, 200).unwrap() else { panic!() };
        // the planted graph has no other factor
        assert_eq!(out, cert);
    }

    fn theta22_pair(m: usize) -> TripartiteGraph {
        // (V1, V2): first halves complete to second halves, nothing else
        let n = 2 * m;
        let mut b = GraphBuilder::new(n);
        for u in 0..n {
            for v in 0..n {
                if (u < m) != (v < m) {
                    b.join(Class::V1, u, Class::V2, v);
                }
            }
        }
        b.build().unwrap()
    }

    #[test]
    fn theta22_with_odd_halves_splits() {
        let g = theta22_pair(3);
        let (b1, b2) = sides(6, Class::V1, Class::V2);
        let out = khh_factor_or_theta(&g, &b1, &b2, 2, Ratio::new(1, 20), 1, 4).unwrap();
        let KhhOrTheta::Theta(w) = out else { panic!("expected a split, got {out:?}") };
        assert_eq!(w.densities, [Ratio::from_integer(0); 2]);
        assert_eq!(w.verify(&g, &b1, &b2, Ratio::from_integer(0)), Ok(()));
        // with h = 1 the same pair has a perfect matching
        let out = khh_factor_or_theta(&g, &b1, &b2, 1, Ratio::new(1, 20), 1, 4).unwrap();
        assert!(matches!(out, KhhOrTheta::Factor(_)));
    }

    #[test]
    fn repair_fixes_a_bad_clustering() {
        // K_{2,2}-factor exists but canonical clusters {0,1},{2,3} break it
        let mut b = GraphBuilder::new(4);
        for (u, v) in [(0, 0), (0, 1), (2, 0), (2, 1), (1, 2), (1, 3), (3, 2), (3, 3)] {
            b.join(Class::V1, u, Class::V2, v);
        }
        let g = b.build().unwrap();
        let (b1, b2) = sides(4, Class::V1, Class::V2);
        assert!(matches!(cluster_khh_factor(&g, &b1, &b2, 2).unwrap(), ClusterOutcome::Failure(_)));
        let f = khh_search(&g, &b1, &b2, 2, 0, 0, None).expect("swap repair");
        assert_eq!(f.verify(&g, 2, &b1, &b2), Ok(()));
    }
}
