//! Threshold scans: random graphs at exact `δ̄` levels, solved and tallied.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tritile::constructions::random_graph_with_exact_min_degree;
use tritile::format;
use tritile::graph::TripartiteGraph;
use tritile::solver::{brute_force_oracle, Certificate};
use tritile::tiler::{solve, Branch, SolveOutcome, TilerError};

use crate::config::{sha256_hex, RunConfig};

#[derive(Clone, Debug)]
pub struct ScanParams {
    pub h: usize,
    pub n: usize,
    pub levels: Vec<usize>,
    pub samples: usize,
    /// Where exemplar graphs are written; `None` keeps them in memory only.
    pub out_dir: Option<PathBuf>,
    /// Distinct exemplars kept per level, contradictions excepted.
    pub max_exemplars: usize,
    /// Worker threads; `None` lets the pool decide.
    pub workers: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExemplarKind {
    NoFactor,
    Unknown,
    /// No factor at or above the universal upper bound.
    TheoremContradiction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exemplar {
    pub kind: ExemplarKind,
    pub sample: usize,
    pub seed: u64,
    pub graph_sha256: String,
    pub branch: Option<Branch>,
    /// The solver placed the graph as a blow-up of `Γ₃`.
    pub gamma3_fit: bool,
    pub path: Option<String>,
    pub certificate_path: Option<String>,
    /// Canonical graph text, kept so in-memory scans can be inspected.
    #[serde(skip)]
    pub graph_text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: usize,
    pub samples: usize,
    pub factor: usize,
    pub no_factor: usize,
    pub structure: usize,
    pub unknown: usize,
    pub oracle_checked: usize,
    pub oracle_disagreements: usize,
    pub exemplars: Vec<Exemplar>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub h: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    pub config_hash: String,
    pub universal_upper: usize,
    pub levels: Vec<LevelReport>,
    pub contradictions: usize,
}

#[derive(Debug)]
pub enum ScanError {
    Tiler(TilerError),
    Io(std::io::Error),
    Pool(String),
}

impl std::fmt::Display for ScanError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScanError::Tiler(e) => write!(f, "{e}"),
            ScanError::Io(e) => write!(f, "{e}"),
            ScanError::Pool(e) => write!(f, "worker pool: {e}"),
        }
    }
}

impl std::error::Error for ScanError {}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of one sample, derived by counter from the run seed.
pub fn sample_seed(seed: u64, level: usize, sample: usize) -> u64 {
    splitmix(splitmix(seed ^ splitmix(level as u64)) ^ sample as u64)
}

struct Sample {
    index: usize,
    seed: u64,
    outcome: SolveOutcome,
    branch: Option<Branch>,
    gamma3: bool,
    certificate: Option<Certificate>,
    oracle: Option<bool>,
    graph: TripartiteGraph,
}

fn run_sample(p: &ScanParams, config: &RunConfig, level: usize, index: usize) -> Result<Sample, TilerError> {
    let seed = sample_seed(config.seed, level, index);
    let graph = random_graph_with_exact_min_degree(p.n, level, seed);
    let mut solve_config = config.solve_config(p.n);
    solve_config.seed = seed;
    let report = solve(&graph, p.h, &solve_config)?;
    let oracle = (3 * p.n <= config.tiny_bounds.oracle_vertices)
        .then(|| brute_force_oracle(&graph, p.h, config.tiny_bounds.oracle_vertices).ok())
        .flatten();
    let branch = report.structure.as_ref().map(|s| s.branch);
    let gamma3 = report.structure.as_ref().is_some_and(|s| s.gamma3.is_some());
    Ok(Sample { index, seed, outcome: report.outcome, branch, gamma3, certificate: report.certificate, oracle, graph })
}

fn save(dir: &Path, name: &str, contents: &str) -> Result<String, ScanError> {
    fs::create_dir_all(dir).map_err(ScanError::Io)?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(ScanError::Io)?;
    Ok(path.display().to_string())
}

pub fn scan(p: &ScanParams, config: &RunConfig) -> Result<ScanReport, ScanError> {
    if p.h == 0 || p.n == 0 || p.n % p.h != 0 {
        return Err(ScanError::Tiler(TilerError::IndivisibleN { n: p.n, h: p.h }));
    }
    let universal_upper = p.h * (2 * p.n).div_ceil(3 * p.h) + 2 * p.h - 1;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = p.workers {
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| ScanError::Pool(e.to_string()))?;
    let mut levels = Vec::new();
    let mut contradictions = 0;
    for &level in &p.levels {
        let samples: Vec<Sample> = pool
            .install(|| (0..p.samples).into_par_iter().map(|i| run_sample(p, config, level, i)).collect::<Result<_, _>>())
            .map_err(ScanError::Tiler)?;
        let mut report = LevelReport {
            level,
            samples: samples.len(),
            factor: 0,
            no_factor: 0,
            structure: 0,
            unknown: 0,
            oracle_checked: 0,
            oracle_disagreements: 0,
            exemplars: Vec::new(),
        };
        let mut seen = std::collections::HashSet::new();
        for s in samples {
            match s.outcome {
                SolveOutcome::Factor => report.factor += 1,
                SolveOutcome::NoFactor => report.no_factor += 1,
                SolveOutcome::Structure => report.structure += 1,
                SolveOutcome::Unknown => report.unknown += 1,
            }
            if let Some(truth) = s.oracle {
                report.oracle_checked += 1;
                let claimed = match s.outcome {
                    SolveOutcome::Factor => Some(true),
                    SolveOutcome::NoFactor => Some(false),
                    _ => None,
                };
                if claimed != Some(truth) {
                    report.oracle_disagreements += 1;
                }
            }
            if s.outcome == SolveOutcome::Factor {
                continue;
            }
            let kind = if level >= universal_upper && s.outcome == SolveOutcome::NoFactor {
                contradictions += 1;
                ExemplarKind::TheoremContradiction
            } else if s.outcome == SolveOutcome::NoFactor {
                ExemplarKind::NoFactor
            } else {
                ExemplarKind::Unknown
            };
            let text = format::write(&s.graph, Some(p.h));
            let sha = sha256_hex(text.as_bytes());
            let keep = kind == ExemplarKind::TheoremContradiction || report.exemplars.len() < p.max_exemplars;
            if !keep || !seen.insert(sha.clone()) {
                continue;
            }
            let stem = format!("level{level}-sample{}-{}", s.index, serde_json::to_value(kind).unwrap().as_str().unwrap());
            let (mut path, mut certificate_path) = (None, None);
            if let Some(dir) = &p.out_dir {
                path = Some(save(dir, &format!("{stem}.txt"), &text)?);
                if let Some(cert) = &s.certificate {
                    let json = serde_json::to_string_pretty(cert).expect("certificate serializes");
                    certificate_path = Some(save(dir, &format!("{stem}.cert.json"), &json)?);
                }
            }
            report.exemplars.push(Exemplar {
                kind,
                sample: s.index,
                seed: s.seed,
                graph_sha256: sha,
                branch: s.branch,
                gamma3_fit: s.gamma3,
                path,
                certificate_path,
                graph_text: text,
            });
        }
        levels.push(report);
    }
    Ok(ScanReport { h: p.h, n: p.n, seed: config.seed, config_hash: config.hash(), universal_upper, levels, contradictions })
}
