//! Desk-scale run of the basic extreme case: fix the sizes of the sparse
//! sets with stars and superstars, split the remainder into pairs, tile each
//! pair with `K_{h,h}` and complete with the matching sparse set.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;

use super::cluster::{extend_shuffled, khh_factor_or_theta, ExtendOutcome, KhhOrTheta, ThetaSplitWitness};
use super::stars::star_family_tripartite;
use crate::constructions::rng_from_seed;
use crate::factor::{verify_factor, FactorCertificate, KhhhCopy};
use crate::graph::{Class, TripartiteGraph, VertexSet};
use crate::structure::ExtremeWitness;

pub(crate) struct Part1Params {
    pub typical: Ratio<u64>,
    pub epsilon: Ratio<u64>,
    pub seed: u64,
    pub effort: usize,
    pub split_retries: usize,
}

pub(crate) enum Part1Outcome {
    Factor(FactorCertificate),
    /// A remainder pair split into two sparse halves.
    Theta(ThetaSplitWitness),
    DeadEnd(String),
}

/// Mutable bookkeeping: which vertices still play the sparse role, which
/// are used by committed copies, and the remaining size targets.
struct State<'a> {
    g: &'a TripartiteGraph,
    h: usize,
    in_a: [Vec<bool>; 3],
    used: [Vec<bool>; 3],
    targets: [usize; 3],
    copies: Vec<KhhhCopy>,
    /// Neighbours in the other two original sparse sets, per vertex.
    a_degree: [Vec<[usize; 2]>; 3],
}

impl State<'_> {
    fn a_count(&self, c: usize) -> usize {
        (0..self.g.n()).filter(|&v| self.in_a[c][v] && !self.used[c][v]).count()
    }

    fn pool(&self, c: usize, sparse: bool) -> Vec<usize> {
        (0..self.g.n()).filter(|&v| !self.used[c][v] && self.in_a[c][v] == sparse).collect()
    }

    /// Lower is more like a member of the sparse set.
    fn likeness(&self, c: usize, v: usize) -> usize {
        self.a_degree[c][v][0] + self.a_degree[c][v][1]
    }

    fn commit(&mut self, parts: [Vec<usize>; 3], kind: usize) {
        for (c, part) in parts.iter().enumerate() {
            for &v in part {
                self.used[c][v] = true;
            }
        }
        self.targets[kind] -= self.h;
        self.copies.push(KhhhCopy::new(parts));
    }
}

/// Greedy completion of a partial copy. `fill` lists, in order, a class,
/// how many vertices it still needs and its candidates; each pick must be
/// adjacent to everything chosen so far in the other classes.
fn complete_copy(
    g: &TripartiteGraph,
    mut parts: [Vec<usize>; 3],
    fill: &[(usize, usize, &[usize])],
) -> Option<[Vec<usize>; 3]> {
    for &(c, need, cands) in fill {
        let class = Class::ALL[c];
        let mut got = 0;
        for &v in cands {
            if got == need {
                break;
            }
            if parts[c].contains(&v) {
                continue;
            }
            let fits = class.others().iter().all(|&o| {
                let row = g.row(class, v, o);
                parts[o.index()].iter().all(|&w| row.contains(w))
            });
            if fits {
                parts[c].push(v);
                got += 1;
            }
        }
        if got < need {
            return None;
        }
    }
    Some(parts)
}

fn targets(n: usize, h: usize, sizes: [usize; 3]) -> [usize; 3] {
    let (s, t) = (n / h / 3, n / h % 3);
    let mut order = [0, 1, 2];
    order.sort_by_key(|&c| (std::cmp::Reverse(sizes[c]), c));
    let mut out = [s * h; 3];
    for &c in &order[..t] {
        out[c] += h;
    }
    out
}

pub(crate) fn part1(g: &TripartiteGraph, h: usize, w: &ExtremeWitness, p: &Part1Params) -> Part1Outcome {
    let n = g.n();
    let mut rng = rng_from_seed(p.seed);
    let a_sets: [VertexSet; 3] = std::array::from_fn(|c| VertexSet::from_offsets(Class::ALL[c], n, w.sets[c].iter().copied()));
    let a_degree: [Vec<[usize; 2]>; 3] = std::array::from_fn(|c| {
        let class = Class::ALL[c];
        (0..n)
            .map(|v| class.others().map(|o| g.row(class, v, o).intersection_count(a_sets[o.index()].bits())))
            .collect()
    });
    let (num, den) = (*p.typical.numer() as usize, *p.typical.denom() as usize);
    let a_size = |c: usize| a_sets[c].len();
    let typical_a = |c: usize, v: usize| {
        let others = Class::ALL[c].others();
        (0..2).all(|x| a_degree[c][v][x] * den <= num * a_size(others[x].index()))
    };
    let in_a: [Vec<bool>; 3] = std::array::from_fn(|c| (0..n).map(|v| typical_a(c, v)).collect());
    let sizes: [usize; 3] = std::array::from_fn(|c| in_a[c].iter().filter(|&&x| x).count());
    let mut st = State {
        g,
        h,
        in_a,
        used: [vec![false; n], vec![false; n], vec![false; n]],
        targets: targets(n, h, sizes),
        copies: Vec::new(),
        a_degree,
    };

    // Step 1: oversized sparse sets shed centres of stars into the next set.
    let tilde: [VertexSet; 3] = std::array::from_fn(|c| {
        VertexSet::from_offsets(Class::ALL[c], n, (0..n).filter(|&v| st.in_a[c][v]))
    });
    let d: [usize; 3] = std::array::from_fn(|c| match sizes[c].checked_sub(st.targets[c]) {
        Some(x) if x > 0 => x + h - 1,
        _ => 0,
    });
    if d.iter().any(|&x| x > 0) {
        let family = match star_family_tripartite(g, [&tilde[0], &tilde[1], &tilde[2]], h, d) {
            Ok(f) => f,
            Err(cert) => {
                return Part1Outcome::DeadEnd(format!(
                    "star family stalled between {} and {}: {:?}",
                    cert.center_class, cert.leaf_class, cert.diagnosis
                ))
            }
        };
        // centres leave their set before any copy is completed
        let mut centre = [vec![false; n], vec![false; n], vec![false; n]];
        for s in &family.stars {
            st.in_a[s.center.class.index()][s.center.offset] = false;
            centre[s.center.class.index()][s.center.offset] = true;
        }
        for s in &family.stars {
            let (i, j) = (s.center.class.index(), s.leaf_class.index());
            let k = 3 - i - j;
            if st.targets[j] < h {
                return Part1Outcome::DeadEnd(format!("too many stars into {}", s.leaf_class));
            }
            let mut parts: [Vec<usize>; 3] = Default::default();
            parts[i].push(s.center.offset);
            parts[j] = s.leaves.clone();
            // other centres are spoken for by their own stars
            let free = |c: usize| -> Vec<usize> {
                let mut v = st.pool(c, false);
                v.retain(|&x| (x == s.center.offset && c == i) || !centre[c][x]);
                v
            };
            let (pk, pi) = (free(k), free(i));
            let Some(done) = complete_copy(g, parts, &[(k, h, &pk), (i, h - 1, &pi)]) else {
                return Part1Outcome::DeadEnd(format!("no copy completes the star at {}", s.center));
            };
            st.commit(done, j);
        }
    }

    // Step 2: undersized sparse sets gain superstar centres.
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        while st.a_count(i) < st.targets[i] {
            let mut centres = st.pool(i, false);
            centres.sort_by_key(|&v| (st.likeness(i, v), v));
            let (pj, pk, pa) = (st.pool(j, false), st.pool(k, false), st.pool(i, true));
            let found = centres.iter().find_map(|&v| {
                let mut parts: [Vec<usize>; 3] = Default::default();
                parts[i].push(v);
                complete_copy(g, parts, &[(j, h, &pj), (k, h, &pk), (i, h - 1, &pa)])
            });
            match found {
                Some(done) => st.commit(done, i),
                None => {
                    // relabel the most sparse-like leftover vertex instead
                    let Some(&v) = centres.first() else {
                        return Part1Outcome::DeadEnd(format!("class {} has no vertex left to grow its sparse set", i + 1));
                    };
                    st.in_a[i][v] = true;
                }
            }
        }
        while st.a_count(i) > st.targets[i] {
            // superstars elsewhere can leave a small surplus; hand back the
            // least sparse-like members
            let mut members = st.pool(i, true);
            members.sort_by_key(|&v| (std::cmp::Reverse(st.likeness(i, v)), v));
            st.in_a[i][members[0]] = false;
        }
    }
    for i in 0..3 {
        if st.a_count(i) != st.targets[i] {
            return Part1Outcome::DeadEnd(format!("class {} sparse set has size {} not {}", i + 1, st.a_count(i), st.targets[i]));
        }
    }

    // Steps 3 and 4: split each remainder by preference, tile and complete.
    let remainder: [Vec<usize>; 3] = std::array::from_fn(|c| st.pool(c, false));
    let a_final: [Vec<usize>; 3] = std::array::from_fn(|c| st.pool(c, true));
    let mut last_theta = None;
    'retry: for attempt in 0..=p.split_retries {
        // sides[j][i]: the part of class j's remainder paired with sparse set i
        let mut sides: [[Vec<usize>; 3]; 3] = Default::default();
        for j in 0..3 {
            let (i, k) = ((j + 1) % 3, (j + 2) % 3);
            let pref = |v: usize| {
                let x = st.a_degree[j][v];
                // others() of class j lists classes in increasing order
                let (di, dk) = if i < k { (x[0], x[1]) } else { (x[1], x[0]) };
                di as f64 / a_size(i).max(1) as f64 - dk as f64 / a_size(k).max(1) as f64
            };
            let noise = attempt as f64 / (p.split_retries.max(1)) as f64;
            let mut keyed: Vec<(f64, usize)> =
                remainder[j].iter().map(|&v| (pref(v) + noise * rng.gen_range(-1.0..=1.0), v)).collect();
            keyed.shuffle(&mut rng);
            keyed.sort_by(|x, y| y.0.total_cmp(&x.0));
            let split = st.targets[i];
            sides[j][i] = keyed[..split].iter().map(|&(_, v)| v).collect();
            sides[j][k] = keyed[split..].iter().map(|&(_, v)| v).collect();
        }
        let mut copies = st.copies.clone();
        for i in 0..3 {
            if st.targets[i] == 0 {
                continue;
            }
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let mut members: [Vec<usize>; 3] = Default::default();
            members[i] = a_final[i].clone();
            members[j] = sides[j][i].clone();
            members[k] = sides[k][i].clone();
            let sets: [VertexSet; 3] =
                std::array::from_fn(|c| VertexSet::from_offsets(Class::ALL[c], n, members[c].iter().copied()));
            let sub = match g.induced([&sets[0], &sets[1], &sets[2]]) {
                Ok(s) => s,
                Err(e) => return Part1Outcome::DeadEnd(format!("unbalanced remainder: {e}")),
            };
            let m = sub.graph.n();
            let (bj, bk) = (VertexSet::full(Class::ALL[j], m), VertexSet::full(Class::ALL[k], m));
            let seed = p.seed.wrapping_add(attempt as u64);
            let khh = match khh_factor_or_theta(&sub.graph, &bj, &bk, h, p.epsilon, seed, p.effort) {
                Ok(x) => x,
                Err(e) => return Part1Outcome::DeadEnd(e.to_string()),
            };
            let factor = match khh {
                KhhOrTheta::Factor(f) => f,
                KhhOrTheta::Theta(mut t) => {
                    let map = |c: Class, v: &mut Vec<usize>| {
                        for x in v.iter_mut() {
                            *x = sub.maps[c.index()][*x];
                        }
                    };
                    map(t.a_class, &mut t.a_prime);
                    map(t.a_class, &mut t.a_rest);
                    map(t.b_class, &mut t.b_prime);
                    map(t.b_class, &mut t.b_rest);
                    last_theta = Some(t);
                    continue 'retry;
                }
                KhhOrTheta::Unknown => continue 'retry,
            };
            match extend_shuffled(&sub.graph, h, &factor, seed, p.effort) {
                Ok(ExtendOutcome::Factor(cert)) => {
                    for cp in cert.copies {
                        let parts = std::array::from_fn(|c| cp.parts()[c].iter().map(|&x| sub.maps[c][x]).collect());
                        copies.push(KhhhCopy::new(parts));
                    }
                }
                _ => continue 'retry,
            }
        }
        let cert = FactorCertificate::new(copies);
        return match verify_factor(g, h, &cert) {
            Ok(()) => Part1Outcome::Factor(cert),
            Err(e) => Part1Outcome::DeadEnd(format!("assembled copies do not verify: {e}")),
        };
    }
    match last_theta {
        Some(t) => Part1Outcome::Theta(t),
        None => Part1Outcome::DeadEnd(format!("no split of the remainder tiled in {} attempts", p.split_retries + 1)),
    }
}
