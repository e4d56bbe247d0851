//! `K_{h,h,h}` copies and self-verifying factor certificates.

use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::graph::{class_pairs, Class, TripartiteGraph, VertexRef};

/// A copy of `K_{h,h,h}`: `h` offsets per class, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KhhhCopy {
    parts: [Vec<usize>; 3],
}

impl KhhhCopy {
    pub fn new(mut parts: [Vec<usize>; 3]) -> Self {
        for p in parts.iter_mut() {
            p.sort_unstable();
        }
        KhhhCopy { parts }
    }

    pub fn part(&self, class: Class) -> &[usize] {
        &self.parts[class.index()]
    }

    pub fn parts(&self) -> &[Vec<usize>; 3] {
        &self.parts
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexRef> + '_ {
        Class::ALL
            .into_iter()
            .flat_map(move |c| self.parts[c.index()].iter().map(move |&o| VertexRef::new(c, o)))
    }

    /// First non-adjacent cross pair, if any.
    pub fn missing_edge(&self, g: &TripartiteGraph) -> Option<(VertexRef, VertexRef)> {
        for (a, b) in class_pairs() {
            for &u in self.part(a) {
                for &v in self.part(b) {
                    let (x, y) = (VertexRef::new(a, u), VertexRef::new(b, v));
                    if !g.has_edge(x, y) {
                        return Some((x, y));
                    }
                }
            }
        }
        None
    }
}

/// Vertex-disjoint copies of `K_{h,h,h}` covering every vertex.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorCertificate {
    pub copies: Vec<KhhhCopy>,
}

impl FactorCertificate {
    pub fn new(mut copies: Vec<KhhhCopy>) -> Self {
        copies.sort();
        FactorCertificate { copies }
    }

    pub fn verify(&self, g: &TripartiteGraph, h: usize) -> Result<(), FactorViolation> {
        verify_factor(g, h, self)
    }
}

/// First problem found while checking a [`FactorCertificate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorViolation {
    ZeroTileSize,
    IndivisibleN { n: usize, h: usize },
    WrongCopyCount { expected: usize, found: usize },
    WrongPartSize { copy: usize, class: Class, size: usize },
    OutOfRange { copy: usize, vertex: VertexRef },
    MissingEdge { copy: usize, u: VertexRef, v: VertexRef },
    Overlap { copy: usize, vertex: VertexRef },
}

impl fmt::Display for FactorViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorViolation::ZeroTileSize => write!(f, "tile size h must be positive"),
            FactorViolation::IndivisibleN { n, h } => write!(f, "h = {h} does not divide N = {n}"),
            FactorViolation::WrongCopyCount { expected, found } => {
                write!(f, "expected {expected} copies, found {found}")
            }
            FactorViolation::WrongPartSize { copy, class, size } => {
                write!(f, "copy {copy} has {size} vertices in {class}")
            }
            FactorViolation::OutOfRange { copy, vertex } => {
                write!(f, "copy {copy} uses out-of-range vertex {vertex}")
            }
            FactorViolation::MissingEdge { copy, u, v } => {
                write!(f, "copy {copy} is not complete: {u} and {v} are not adjacent")
            }
            FactorViolation::Overlap { copy, vertex } => {
                write!(f, "copy {copy} reuses vertex {vertex}")
            }
        }
    }
}

impl std::error::Error for FactorViolation {}

/// Checks that `cert` is a `K_{h,h,h}`-factor of `g`. Disjointness plus the
/// copy count `N/h` implies coverage.
pub fn verify_factor(g: &TripartiteGraph, h: usize, cert: &FactorCertificate) -> Result<(), FactorViolation> {
    let n = g.n();
    if h == 0 {
        return Err(FactorViolation::ZeroTileSize);
    }
    if n % h != 0 {
        return Err(FactorViolation::IndivisibleN { n, h });
    }
    if cert.copies.len() != n / h {
        return Err(FactorViolation::WrongCopyCount { expected: n / h, found: cert.copies.len() });
    }
    let mut used = [FixedBitSet::with_capacity(n), FixedBitSet::with_capacity(n), FixedBitSet::with_capacity(n)];
    for (i, copy) in cert.copies.iter().enumerate() {
        for c in Class::ALL {
            let part = copy.part(c);
            if part.len() != h {
                return Err(FactorViolation::WrongPartSize { copy: i, class: c, size: part.len() });
            }
            for &o in part {
                let vertex = VertexRef::new(c, o);
                if o >= n {
                    return Err(FactorViolation::OutOfRange { copy: i, vertex });
                }
                if used[c.index()].put(o) {
                    return Err(FactorViolation::Overlap { copy: i, vertex });
                }
            }
        }
        if let Some((u, v)) = copy.missing_edge(g) {
            return Err(FactorViolation::MissingEdge { copy: i, u, v });
        }
    }
    Ok(())
}
