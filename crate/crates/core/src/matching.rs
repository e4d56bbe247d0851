//! Maximum bipartite matching (Hopcroft–Karp) and Hall deficiency sets.

use std::collections::VecDeque;

const FREE: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteMatching {
    pub mate_left: Vec<Option<usize>>,
    pub mate_right: Vec<Option<usize>>,
}

impl BipartiteMatching {
    pub fn size(&self) -> usize {
        self.mate_left.iter().flatten().count()
    }

    /// Every left and every right vertex is matched.
    pub fn is_perfect(&self) -> bool {
        self.mate_left.len() == self.mate_right.len() && self.mate_left.iter().all(Option::is_some)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.mate_left.iter().enumerate().filter_map(|(l, r)| r.map(|r| (l, r)))
    }

    /// For a maximum matching that leaves some left vertex unmatched: the
    /// left vertices reachable from unmatched ones by alternating paths.
    /// Their neighbourhood is strictly smaller than the set itself.
    pub fn hall_violator(&self, adj: &[Vec<usize>]) -> Option<Vec<usize>> {
        let mut seen_left = vec![false; self.mate_left.len()];
        let mut seen_right = vec![false; self.mate_right.len()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for (l, m) in self.mate_left.iter().enumerate() {
            if m.is_none() {
                seen_left[l] = true;
                queue.push_back(l);
            }
        }
        if queue.is_empty() {
            return None;
        }
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                if !seen_right[r] {
                    seen_right[r] = true;
                    if let Some(next) = self.mate_right[r] {
                        if !seen_left[next] {
                            seen_left[next] = true;
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
        Some((0..seen_left.len()).filter(|&l| seen_left[l]).collect())
    }
}

/// Maximum matching of the bipartite graph with `adj[l]` listing the right
/// neighbours of left vertex `l`. Deterministic: neighbours are tried in the
/// order given.
pub fn hopcroft_karp(right: usize, adj: &[Vec<usize>]) -> BipartiteMatching {
    let left = adj.len();
    let mut ml = vec![FREE; left];
    let mut mr = vec![FREE; right];
    let mut dist = vec![0usize; left];
    loop {
        // layered BFS from free left vertices
        let mut queue = VecDeque::new();
        for l in 0..left {
            if ml[l] == FREE {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let next = mr[r];
                if next == FREE {
                    found = true;
                } else if dist[next] == usize::MAX {
                    dist[next] = dist[l] + 1;
                    queue.push_back(next);
                }
            }
        }
        if !found {
            break;
        }
        let mut cursor = vec![0usize; left];
        for l in 0..left {
            if ml[l] == FREE {
                augment(l, adj, &mut ml, &mut mr, &mut dist, &mut cursor);
            }
        }
    }
    let wrap = |v: Vec<usize>| v.into_iter().map(|x| (x != FREE).then_some(x)).collect();
    BipartiteMatching { mate_left: wrap(ml), mate_right: wrap(mr) }
}

fn augment(
    l: usize,
    adj: &[Vec<usize>],
    ml: &mut [usize],
    mr: &mut [usize],
    dist: &mut [usize],
    cursor: &mut [usize],
) -> bool {
    while cursor[l] < adj[l].len() {
        let r = adj[l][cursor[l]];
        cursor[l] += 1;
        let next = mr[r];
        if next == FREE || (dist[next] == dist[l] + 1 && augment(next, adj, ml, mr, dist, cursor)) {
            ml[l] = r;
            mr[r] = l;
            return true;
        }
    }
    dist[l] = usize::MAX;
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Maximum matching size by exhaustive subset DP over right vertices.
    fn brute_max(right: usize, adj: &[Vec<usize>]) -> usize {
        let mut best = vec![0usize; 1 << right];
        for row in adj {
            let prev = best.clone();
            for mask in 0..1usize << right {
                for &r in row {
                    if mask >> r & 1 == 1 {
                        best[mask] = best[mask].max(prev[mask & !(1 << r)] + 1);
                    }
                }
            }
        }
        best[(1 << right) - 1]
    }

    fn check_valid(m: &BipartiteMatching, adj: &[Vec<usize>]) {
        for (l, r) in m.pairs() {
            assert!(adj[l].contains(&r));
            assert_eq!(m.mate_right[r], Some(l));
        }
    }

    #[test]
    fn perfect_on_complete() {
        let adj = vec![vec![0, 1, 2]; 3];
        let m = hopcroft_karp(3, &adj);
        assert!(m.is_perfect());
        assert_eq!(m.hall_violator(&adj), None);
    }

    #[test]
    fn violator_on_star() {
        // three left vertices all attached to right vertex 0 only
        let adj = vec![vec![0], vec![0], vec![0, 1]];
        let m = hopcroft_karp(3, &adj);
        assert_eq!(m.size(), 2);
        let x = m.hall_violator(&adj).unwrap();
        assert_eq!(x, vec![0, 1]);
    }

    proptest! {
        #[test]
        fn matches_brute_force(left in 0usize..7, right in 1usize..7, bits in any::<u64>()) {
            let adj: Vec<Vec<usize>> = (0..left)
                .map(|l| (0..right).filter(|&r| bits >> ((l * right + r) % 64) & 1 == 1).collect())
                .collect();
            let m = hopcroft_karp(right, &adj);
            check_valid(&m, &adj);
            prop_assert_eq!(m.size(), brute_max(right, &adj));
            if let Some(x) = m.hall_violator(&adj) {
                let mut nbrs: Vec<usize> = x.iter().flat_map(|&l| adj[l].iter().copied()).collect();
                nbrs.sort_unstable();
                nbrs.dedup();
                prop_assert!(nbrs.len() < x.len());
            } else {
                prop_assert_eq!(m.size(), left);
            }
        }
    }
}
