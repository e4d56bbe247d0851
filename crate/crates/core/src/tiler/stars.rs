//! Vertex-disjoint `K_{1,h}` families between sparse sets.
//!
//! The greedy either meets its quota or stalls; a stall is returned as the
//! pair `(S, T)` of consumed centres and leaves, which certifies that some
//! hypothesis of the counting argument fails.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::graph::{Class, TripartiteGraph, VertexRef, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Star {
    pub center: VertexRef,
    pub leaf_class: Class,
    pub leaves: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarFamily {
    pub stars: Vec<Star>,
    /// Number of centres in each class.
    pub counts: [usize; 3],
}

impl StarFamily {
    fn from_stars(stars: Vec<Star>) -> Self {
        let mut counts = [0; 3];
        for s in &stars {
            counts[s.center.class.index()] += 1;
        }
        StarFamily { stars, counts }
    }

    /// Checks star shape, adjacency and global vertex-disjointness.
    pub fn verify(&self, g: &TripartiteGraph, h: usize) -> Result<(), String> {
        let n = g.n();
        let mut used = [vec![false; n], vec![false; n], vec![false; n]];
        let mut take = |v: VertexRef| -> Result<(), String> {
            if v.offset >= n {
                return Err(format!("{v} is out of range"));
            }
            let slot = &mut used[v.class.index()][v.offset];
            if *slot {
                return Err(format!("{v} is used twice"));
            }
            *slot = true;
            Ok(())
        };
        let mut counts = [0; 3];
        for (i, s) in self.stars.iter().enumerate() {
            if s.leaves.len() != h || s.leaf_class == s.center.class {
                return Err(format!("star {i} is not a K_(1,{h}) across two classes"));
            }
            take(s.center)?;
            counts[s.center.class.index()] += 1;
            for &l in &s.leaves {
                let leaf = VertexRef::new(s.leaf_class, l);
                take(leaf)?;
                if !g.has_edge(s.center, leaf) {
                    return Err(format!("star {i}: {} is not adjacent to {leaf}", s.center));
                }
            }
        }
        if counts != self.counts {
            return Err(format!("recorded counts {:?} differ from {counts:?}", self.counts));
        }
        Ok(())
    }
}

/// How the size and degree hypotheses of the star lemma look on an
/// instance. `epsilon_needed` is the smallest tolerance the sizes and
/// degrees are compatible with, taking `M` to be the mean set size; the
/// lemma applies when it is below `epsilon_bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub degrees_ok: bool,
    pub epsilon_needed: Ratio<u64>,
    pub epsilon_bound: Ratio<u64>,
    pub holds: bool,
}

/// Why a stall was possible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StarDiagnosis {
    /// A vertex on the leaf side has fewer than `d` neighbours on the centre side.
    DegreeHypothesis { vertex: usize, degree: usize },
    /// Degrees are fine, so the sizes are too unbalanced for the tolerance.
    SizeHypothesis { epsilon_needed: Ratio<u64>, epsilon_bound: Ratio<u64> },
}

/// A stalled greedy: centres `s` and their leaves `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarCertificate {
    pub center_class: Class,
    pub leaf_class: Class,
    pub h: usize,
    pub d: usize,
    pub quota: usize,
    /// The centre and leaf sets of the stalled call.
    pub a1: Vec<usize>,
    pub a2: Vec<usize>,
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    /// `(d - |S|) * |A2 \ T|`
    pub lhs: u64,
    /// `e(A1 \ S, A2 \ T)`
    pub edges: u64,
    /// `(h - 1) * |A1 \ S|`
    pub rhs: u64,
    pub diagnosis: StarDiagnosis,
}

impl StarCertificate {
    /// Re-checks the certificate against the sets it records.
    pub fn verify_recorded(&self, g: &TripartiteGraph) -> Result<(), String> {
        let n = g.n();
        if self.a1.iter().chain(&self.a2).any(|&o| o >= n) {
            return Err("recorded sets leave the graph".into());
        }
        let a1 = VertexSet::from_offsets(self.center_class, n, self.a1.iter().copied());
        let a2 = VertexSet::from_offsets(self.leaf_class, n, self.a2.iter().copied());
        self.verify(g, &a1, &a2)
    }

    /// Re-checks the certificate against the sets it was produced for.
    pub fn verify(&self, g: &TripartiteGraph, a1: &VertexSet, a2: &VertexSet) -> Result<(), String> {
        if (a1.class(), a2.class()) != (self.center_class, self.leaf_class) || a1.to_vec() != self.a1 || a2.to_vec() != self.a2 {
            return Err("certificate was issued for other sets".into());
        }
        if a1.class() != self.center_class || a2.class() != self.leaf_class {
            return Err("classes do not match the sets".into());
        }
        if self.quota != quota(self.d, self.h) || self.s.len() >= self.quota {
            return Err(format!("|S| = {} must be below the quota {}", self.s.len(), self.quota));
        }
        if self.t.len() != self.h * self.s.len() {
            return Err("|T| must be h|S|".into());
        }
        let s = VertexSet::from_offsets(a1.class(), g.n(), self.s.iter().copied());
        let t = VertexSet::from_offsets(a2.class(), g.n(), self.t.iter().copied());
        if s.len() != self.s.len() || t.len() != self.t.len() || !s.is_subset(a1) || !t.is_subset(a2) {
            return Err("S or T is not a set of members of A1, A2".into());
        }
        let mut a1_rest = a1.clone();
        a1_rest.difference_with(&s);
        let mut a2_rest = a2.clone();
        a2_rest.difference_with(&t);
        for u in a1_rest.iter() {
            let free = g.row(a1.class(), u, a2.class()).intersection(a2_rest.bits()).count();
            if free >= self.h {
                return Err(format!("{} still has {free} free neighbours", VertexRef::new(a1.class(), u)));
            }
        }
        let edges = g.edges_between(&a1_rest, &a2_rest).map_err(|e| e.to_string())? as u64;
        let lhs = (self.d - self.s.len()) as u64 * a2_rest.len() as u64;
        let rhs = (self.h as u64 - 1) * a1_rest.len() as u64;
        if (lhs, edges, rhs) != (self.lhs, self.edges, self.rhs) {
            return Err("recorded counts differ from the graph".into());
        }
        if edges > rhs {
            return Err("upper count fails".into());
        }
        let expected = diagnose(g, a1, a2, self.h, self.d);
        if expected != self.diagnosis {
            return Err(format!("diagnosis should be {expected:?}"));
        }
        match &self.diagnosis {
            StarDiagnosis::DegreeHypothesis { .. } => Ok(()),
            StarDiagnosis::SizeHypothesis { epsilon_needed, epsilon_bound } => {
                // with all degrees at least d the lower count must hold too,
                // and the counting shows the tolerance cannot be met
                if lhs > edges {
                    return Err("lower count fails although degrees hold".into());
                }
                if epsilon_needed < epsilon_bound {
                    return Err("hypotheses hold, so the greedy could not have stalled".into());
                }
                Ok(())
            }
        }
    }
}

pub(crate) fn quota(d: usize, h: usize) -> usize {
    (d + 1).saturating_sub(h)
}

fn bipartite_bound(h: usize) -> Ratio<u64> {
    Ratio::new(1, ((h + 1) * h) as u64)
}

fn tripartite_bound(h: usize) -> Ratio<u64> {
    Ratio::new(1, (2 * (h + 2) * (h + 1) * h) as u64)
}

/// `max(|size - M|, d) / M` over the given sets and degrees, `M` the mean size.
fn epsilon_needed(sizes: &[usize], degrees: &[usize]) -> Ratio<u64> {
    let k = sizes.len() as u64;
    let total: u64 = sizes.iter().map(|&s| s as u64).sum();
    if total == 0 {
        return Ratio::from_integer(u64::MAX);
    }
    // scaled by k: M = total / k
    let dev = sizes.iter().map(|&s| (s as u64 * k).abs_diff(total)).max().unwrap_or(0);
    let deg = degrees.iter().map(|&d| d as u64 * k).max().unwrap_or(0);
    Ratio::new(dev.max(deg), total)
}

fn min_degree_into(g: &TripartiteGraph, from: &VertexSet, into: &VertexSet) -> Option<(usize, usize)> {
    from.iter().map(|v| (g.row(from.class(), v, into.class()).intersection(into.bits()).count(), v)).min()
}

fn diagnose(g: &TripartiteGraph, a1: &VertexSet, a2: &VertexSet, h: usize, d: usize) -> StarDiagnosis {
    if let Some((degree, vertex)) = min_degree_into(g, a2, a1).filter(|&(deg, _)| deg < d) {
        return StarDiagnosis::DegreeHypothesis { vertex, degree };
    }
    StarDiagnosis::SizeHypothesis {
        epsilon_needed: epsilon_needed(&[a1.len(), a2.len()], &[d]),
        epsilon_bound: bipartite_bound(h),
    }
}

/// Hypotheses of the two-set lemma: every vertex of `a2` has at least `d`
/// neighbours in `a1`, and sizes and `d` are within the tolerance.
pub fn star_hypotheses_bipartite(g: &TripartiteGraph, a1: &VertexSet, a2: &VertexSet, h: usize, d: usize) -> HypothesisReport {
    let degrees_ok = min_degree_into(g, a2, a1).map_or(true, |(deg, _)| deg >= d);
    let epsilon_needed = epsilon_needed(&[a1.len(), a2.len()], &[d]);
    let epsilon_bound = bipartite_bound(h);
    HypothesisReport { degrees_ok, holds: degrees_ok && epsilon_needed < epsilon_bound, epsilon_needed, epsilon_bound }
}

/// Hypotheses of the three-set lemma: every vertex of the other two sets has
/// at least `d[i]` neighbours in `sets[i]`.
pub fn star_hypotheses_tripartite(g: &TripartiteGraph, sets: [&VertexSet; 3], h: usize, d: [usize; 3]) -> HypothesisReport {
    let degrees_ok = (0..3).all(|i| {
        (0..3).filter(|&j| j != i).all(|j| min_degree_into(g, sets[j], sets[i]).map_or(true, |(deg, _)| deg >= d[i]))
    });
    let epsilon_needed = epsilon_needed(&sets.map(VertexSet::len), &d);
    let epsilon_bound = tripartite_bound(h);
    HypothesisReport { degrees_ok, holds: degrees_ok && epsilon_needed < epsilon_bound, epsilon_needed, epsilon_bound }
}

/// Greedy: the lowest centre with at least `h` unused neighbours takes its
/// `h` lowest ones, until `want` stars exist. On a stall returns `(S, T)`.
fn greedy(
    g: &TripartiteGraph,
    a1: &VertexSet,
    a2: &VertexSet,
    h: usize,
    want: usize,
) -> Result<Vec<Star>, (Vec<usize>, Vec<usize>)> {
    let mut free = a2.clone();
    let mut stars: Vec<Star> = Vec::new();
    let mut centers = VertexSet::empty(a1.class(), a1.capacity());
    while stars.len() < want {
        let pick = a1.iter().filter(|&u| !centers.contains(u)).find_map(|u| {
            let leaves: Vec<usize> = g.row(a1.class(), u, a2.class()).intersection(free.bits()).take(h).collect();
            (leaves.len() == h).then_some((u, leaves))
        });
        let Some((u, leaves)) = pick else {
            let s = stars.iter().map(|s| s.center.offset).collect();
            let t = stars.iter().flat_map(|s| s.leaves.iter().copied()).collect();
            return Err((s, t));
        };
        for &l in &leaves {
            free.remove(l);
        }
        centers.insert(u);
        stars.push(Star { center: VertexRef::new(a1.class(), u), leaf_class: a2.class(), leaves });
    }
    Ok(stars)
}

fn certificate(
    g: &TripartiteGraph,
    a1: &VertexSet,
    a2: &VertexSet,
    h: usize,
    d: usize,
    (mut s, mut t): (Vec<usize>, Vec<usize>),
) -> StarCertificate {
    s.sort_unstable();
    t.sort_unstable();
    let mut a1_rest = a1.clone();
    a1_rest.difference_with(&VertexSet::from_offsets(a1.class(), g.n(), s.iter().copied()));
    let mut a2_rest = a2.clone();
    a2_rest.difference_with(&VertexSet::from_offsets(a2.class(), g.n(), t.iter().copied()));
    let edges = g.edges_between(&a1_rest, &a2_rest).expect("distinct classes") as u64;
    StarCertificate {
        center_class: a1.class(),
        leaf_class: a2.class(),
        h,
        d,
        quota: quota(d, h),
        a1: a1.to_vec(),
        a2: a2.to_vec(),
        lhs: (d - s.len()) as u64 * a2_rest.len() as u64,
        edges,
        rhs: (h as u64 - 1) * a1_rest.len() as u64,
        diagnosis: diagnose(g, a1, a2, h, d),
        s,
        t,
    }
}

fn check_pair(a1: &VertexSet, a2: &VertexSet, h: usize) {
    assert!(h >= 1, "h must be positive");
    assert_ne!(a1.class(), a2.class(), "star sets must lie in different classes");
}

/// `max(0, d - h + 1)` disjoint stars with centres in `a1` and leaves in
/// `a2`, or the certificate of a stalled greedy.
pub fn star_family_bipartite(
    g: &TripartiteGraph,
    a1: &VertexSet,
    a2: &VertexSet,
    h: usize,
    d: usize,
) -> Result<StarFamily, StarCertificate> {
    check_pair(a1, a2, h);
    greedy(g, a1, a2, h, quota(d, h))
        .map(StarFamily::from_stars)
        .map_err(|st| certificate(g, a1, a2, h, d, st))
}

fn minus(a: &VertexSet, offsets: impl IntoIterator<Item = usize>) -> VertexSet {
    let mut out = a.clone();
    for o in offsets {
        out.remove(o);
    }
    out
}

/// For `i = 1, 2, 3`: `max(0, d_i - h + 1)` stars with centres in `sets[i]`
/// and leaves in `sets[i + 1]`, all vertex-disjoint. Follows the case chain
/// of the counting proof; the first stalled two-set step is returned as the
/// failure.
pub fn star_family_tripartite(
    g: &TripartiteGraph,
    sets: [&VertexSet; 3],
    h: usize,
    d: [usize; 3],
) -> Result<StarFamily, StarCertificate> {
    for (i, s) in sets.iter().enumerate() {
        assert_eq!(s.class(), Class::ALL[i], "sets must be given in class order");
    }
    assert!(h >= 1, "h must be positive");
    let q = d.map(|x| quota(x, h));
    let call = |c: usize, centres: &VertexSet, leaves: &VertexSet, want: usize| {
        // degree parameter matching the wanted quota
        let dd = if want == 0 { d[c].min(h - 1) } else { want + h - 1 };
        greedy(g, centres, leaves, h, want).map_err(|st| certificate(g, centres, leaves, h, dd, st))
    };
    let centres_of = |stars: &[Star]| stars.iter().map(|s| s.center.offset).collect::<Vec<_>>();
    let leaves_of = |stars: &[Star]| stars.iter().flat_map(|s| s.leaves.iter().copied()).collect::<Vec<_>>();

    if let Some(k) = (0..3).find(|&k| q[k] == 0) {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        let first = call(j, sets[j], sets[k], q[j])?;
        let second = call(i, sets[i], &minus(sets[j], centres_of(&first)), q[i])?;
        let mut stars = first;
        stars.extend(second);
        return Ok(StarFamily::from_stars(stars));
    }
    match greedy(g, sets[0], sets[1], h, q[0] + q[1]) {
        Ok(wide) => {
            let z0 = centres_of(&wide);
            let third = call(2, sets[2], &minus(sets[0], z0), q[2])?;
            let z2 = centres_of(&third);
            let second = call(1, sets[1], &minus(sets[2], z2), q[1])?;
            let z1 = centres_of(&second);
            let first: Vec<Star> =
                wide.into_iter().filter(|s| s.leaves.iter().all(|l| !z1.contains(l))).take(q[0]).collect();
            debug_assert_eq!(first.len(), q[0]);
            let mut stars = first;
            stars.extend(second);
            stars.extend(third);
            Ok(StarFamily::from_stars(stars))
        }
        Err((s, t)) => {
            let third = call(2, sets[2], &minus(sets[0], s.iter().copied()), q[2])?;
            let second = call(1, sets[1], &minus(sets[2], centres_of(&third)), q[1])?;
            let centres = minus(sets[0], leaves_of(&third));
            let leaves = minus(&minus(sets[1], centres_of(&second)), t);
            let first = call(0, &centres, &leaves, q[0])?;
            let mut stars = first;
            stars.extend(second);
            stars.extend(third);
            Ok(StarFamily::from_stars(stars))
        }
    }
}
