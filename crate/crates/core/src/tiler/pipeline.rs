//! The staged best-effort solver.
//!
//! Stages run in order: threshold report, direct cluster matching, extreme
//! case detection and its tiling sequence, structure fits, then exact
//! search. Every certificate returned has been checked against the graph.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::cluster::{extend_by_slots, khh_search, ExtendOutcome, TilerError, ThetaSplitWitness};
use super::packing::greedy_packing;
use super::part1::{part1, Part1Outcome, Part1Params};
use crate::constructions::ColumnLabeling;
use crate::factor::{verify_factor, FactorCertificate};
use crate::graph::{Class, TripartiteGraph, VertexSet};
use crate::pattern::PatternGraph;
use crate::solver::{
    find_factor_exact, g3_no_factor_certificate, Certificate, ColumnCheck, ExactOutcome, NoFactorCertificate,
    DEFAULT_NODE_BUDGET, MAX_EXACT_N,
};
use crate::structure::{
    assignment_sets, check_very_extreme, default_delta, default_gamma, detect_extreme, fit_approx, ApproxWitness,
    ExtremeWitness, VeryExtremeCheck, VeryExtremeViolation, VeryExtremeWitness,
};

/// Search nodes allowed per copy in the greedy packing.
const PACKING_NODES: usize = 20_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub seed: u64,
    /// Density tolerance of the extreme case.
    pub gamma: Ratio<u64>,
    /// Density tolerance of the pattern fits.
    pub delta: Ratio<u64>,
    /// Density tolerance of a sparse half split.
    pub epsilon: Ratio<u64>,
    /// Fraction of a sparse set a typical vertex may see.
    pub typical: Ratio<u64>,
    pub node_budget: u64,
    pub effort: usize,
    pub restarts: usize,
    pub split_retries: usize,
    pub exact_fallback: bool,
    /// Column layout of a lower-bound construction, if known.
    pub columns: Option<ColumnLabeling>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            seed: 0,
            gamma: default_gamma(),
            delta: default_delta(),
            epsilon: Ratio::new(1, 20),
            typical: Ratio::new(1, 10),
            node_budget: DEFAULT_NODE_BUDGET,
            effort: 8,
            restarts: 8,
            split_retries: 32,
            exact_fallback: true,
            columns: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    BelowLower,
    Between,
    AtOrAboveUpper,
    Unclassified,
}

/// `δ̄` against the asymptotic bounds on the factor threshold for this
/// `(N, h)`. The bounds only bind for large `N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub n: usize,
    pub h: usize,
    pub bar_min_degree: usize,
    pub lower: Option<usize>,
    pub upper: Option<usize>,
    /// `h⌈2N/3h⌉ + 2h - 1`, valid for every residue of `N/h`.
    pub universal_upper: usize,
    pub regime: Regime,
}

impl ThresholdReport {
    pub fn new(n: usize, h: usize, bar_min_degree: usize) -> Self {
        let ceil = h * (2 * n).div_ceil(3 * h);
        let (lower, upper) = if h == 1 {
            (None, (n % 3 == 0).then_some(2 * n / 3 + 1))
        } else {
            match (n / h) % 6 {
                0 => (Some(2 * n / 3 + h - 1), Some(2 * n / 3 + h - 1)),
                3 => (Some(2 * n / 3 + h - 1), Some(2 * n / 3 + 2 * h - 1)),
                _ => (Some(ceil + h - 2), Some(ceil + h - 1)),
            }
        };
        let regime = match (lower, upper) {
            (_, Some(u)) if bar_min_degree >= u => Regime::AtOrAboveUpper,
            (Some(l), _) if bar_min_degree < l => Regime::BelowLower,
            (Some(_), Some(_)) => Regime::Between,
            _ => Regime::Unclassified,
        };
        ThresholdReport { n, h, bar_min_degree, lower, upper, universal_upper: ceil + 2 * h - 1, regime }
    }
}

/// Which part of the extreme-case analysis the instance ended up in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    NonExtreme,
    Part1,
    Part2,
    Part3a,
    Part3b,
    VeryExtreme,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub branch: Branch,
    pub extreme: Option<ExtremeWitness>,
    pub theta_split: Option<ThetaSplitWitness>,
    pub theta33: Option<ApproxWitness>,
    pub gamma3: Option<ApproxWitness>,
    pub very_extreme: Option<VeryExtremeWitness>,
    pub very_extreme_violation: Option<VeryExtremeViolation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Thresholds,
    Direct,
    Extreme,
    Part1,
    Structure,
    Exact,
    ColumnArgument,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Success,
    Failure,
    Skipped,
    Info,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub status: StageStatus,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveOutcome {
    Factor,
    NoFactor,
    /// No certificate either way, but the instance was placed in a branch.
    Structure,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub n: usize,
    pub h: usize,
    pub outcome: SolveOutcome,
    pub thresholds: ThresholdReport,
    pub certificate: Option<Certificate>,
    pub structure: Option<StructureReport>,
    pub trace: Vec<StageRecord>,
}

struct Trace(Vec<StageRecord>);

impl Trace {
    fn push(&mut self, stage: Stage, status: StageStatus, detail: impl Into<String>) {
        self.0.push(StageRecord { stage, status, detail: detail.into() });
    }
}

/// Cluster matching on `(V2, V3)` then extension by `V1`, over seeded
/// restarts. Clusters start from a greedy packing of copies, which is
/// returned outright when it already covers everything.
fn direct(g: &TripartiteGraph, h: usize, config: &SolveConfig) -> Option<FactorCertificate> {
    let n = g.n();
    let (b2, b3) = (VertexSet::full(Class::V2, n), VertexSet::full(Class::V3, n));
    for r in 0..config.restarts.max(1) {
        let seed = config.seed.wrapping_add(r as u64);
        let packing = greedy_packing(g, h, seed, PACKING_NODES);
        if packing.len() == n / h {
            return Some(FactorCertificate::new(packing));
        }
        let order = |c: Class| {
            let mut seen = vec![false; n];
            let mut out: Vec<usize> = packing.iter().flat_map(|cp| cp.part(c).iter().copied()).collect();
            for &v in &out {
                seen[v] = true;
            }
            out.extend((0..n).filter(|&v| !seen[v]));
            out
        };
        let start = (order(Class::V2), order(Class::V3));
        let Some(f) = khh_search(g, &b2, &b3, h, seed, config.effort, Some(start)) else { continue };
        if let Ok(ExtendOutcome::Factor(cert)) = extend_by_slots(g, h, &f) {
            return Some(cert);
        }
    }
    None
}

fn structure_report(
    g: &TripartiteGraph,
    h: usize,
    config: &SolveConfig,
    extreme: Option<ExtremeWitness>,
    theta_split: Option<ThetaSplitWitness>,
) -> StructureReport {
    let fits = g.n() >= 3;
    let fit = |p: PatternGraph| if fits { fit_approx(g, &p, config.delta, config.seed, config.effort) } else { None };
    let theta33 = fit(PatternGraph::theta(3, 3));
    let gamma = PatternGraph::gamma3();
    let gamma3 = fit(gamma.clone());
    let (mut very_extreme, mut very_extreme_violation) = (None, None);
    if let Some(w) = &gamma3 {
        if (g.n() / h) % 6 == 3 {
            match check_very_extreme(g, h, &assignment_sets(&w.assignment, 3), &gamma) {
                Ok(VeryExtremeCheck::Witness(v)) => very_extreme = Some(v),
                Ok(VeryExtremeCheck::Violation(v)) => very_extreme_violation = Some(v),
                Err(_) => {}
            }
        }
    }
    let branch = if very_extreme.is_some() {
        Branch::VeryExtreme
    } else if gamma3.is_some() {
        Branch::Part3b
    } else if theta33.is_some() {
        Branch::Part3a
    } else if theta_split.is_some() {
        Branch::Part2
    } else if extreme.is_some() {
        Branch::Part1
    } else {
        Branch::NonExtreme
    };
    StructureReport { branch, extreme, theta_split, theta33, gamma3, very_extreme, very_extreme_violation }
}

/// Runs the staged pipeline on `g`.
pub fn solve(g: &TripartiteGraph, h: usize, config: &SolveConfig) -> Result<SolveReport, TilerError> {
    let n = g.n();
    if h == 0 || n % h != 0 {
        return Err(TilerError::IndivisibleN { n, h });
    }
    let mut trace = Trace(Vec::new());
    let thresholds = ThresholdReport::new(n, h, g.bar_min_degree());
    trace.push(Stage::Thresholds, StageStatus::Info, format!("bar min degree {}, {:?}", thresholds.bar_min_degree, thresholds.regime));
    let done = |outcome, certificate, structure, trace: Trace, thresholds| SolveReport {
        n,
        h,
        outcome,
        thresholds,
        certificate,
        structure,
        trace: trace.0,
    };
    let factor = |cert: FactorCertificate| {
        debug_assert_eq!(verify_factor(g, h, &cert), Ok(()));
        Some(Certificate::Factor(cert))
    };

    if let Some(cert) = direct(g, h, config).filter(|c| verify_factor(g, h, c).is_ok()) {
        trace.push(Stage::Direct, StageStatus::Success, format!("{} copies", cert.copies.len()));
        return Ok(done(SolveOutcome::Factor, factor(cert), None, trace, thresholds));
    }
    trace.push(Stage::Direct, StageStatus::Failure, "no extendable cluster matching on (V2, V3)");

    let extreme = detect_extreme(g, config.gamma, config.seed, config.effort);
    let mut theta_split = None;
    match &extreme {
        None => trace.push(Stage::Extreme, StageStatus::Failure, format!("no sparse triple at density {}", config.gamma)),
        Some(w) => {
            trace.push(Stage::Extreme, StageStatus::Success, format!("sparse triple with densities {:?}", w.densities));
            let params = Part1Params {
                typical: config.typical,
                epsilon: config.epsilon,
                seed: config.seed,
                effort: config.effort,
                split_retries: config.split_retries,
            };
            match part1(g, h, w, &params) {
                Part1Outcome::Factor(cert) => {
                    trace.push(Stage::Part1, StageStatus::Success, format!("{} copies", cert.copies.len()));
                    return Ok(done(SolveOutcome::Factor, factor(cert), None, trace, thresholds));
                }
                Part1Outcome::Theta(t) => {
                    trace.push(Stage::Part1, StageStatus::Failure, format!("sparse half split between {} and {}", t.a_class, t.b_class));
                    theta_split = Some(t);
                }
                Part1Outcome::DeadEnd(msg) => trace.push(Stage::Part1, StageStatus::Failure, msg),
            }
        }
    }

    let structure = structure_report(g, h, config, extreme, theta_split);
    trace.push(Stage::Structure, StageStatus::Info, format!("{:?}", structure.branch));

    let mut column = None;
    if let Some(labels) = &config.columns {
        match g3_no_factor_certificate(g, labels, h) {
            ColumnCheck::Certificate(arg) if arg.verify(g).is_ok() => {
                trace.push(
                    Stage::ColumnArgument,
                    StageStatus::Success,
                    format!("{} copies needed, {} available", arg.copies_required, arg.copies_available),
                );
                column = Some(NoFactorCertificate::ColumnArgument(arg));
            }
            ColumnCheck::Certificate(_) => trace.push(Stage::ColumnArgument, StageStatus::Failure, "certificate does not re-verify"),
            ColumnCheck::NotApplicable(why) => trace.push(Stage::ColumnArgument, StageStatus::Failure, why),
        }
    }

    let mut certificate = None;
    if !config.exact_fallback {
        trace.push(Stage::Exact, StageStatus::Skipped, "disabled");
    } else if n > MAX_EXACT_N {
        trace.push(Stage::Exact, StageStatus::Skipped, format!("N = {n} exceeds {MAX_EXACT_N}"));
    } else {
        match find_factor_exact(g, h, config.node_budget) {
            Ok(ExactOutcome::Factor(cert)) if verify_factor(g, h, &cert).is_ok() => {
                trace.push(Stage::Exact, StageStatus::Success, format!("{} copies", cert.copies.len()));
                return Ok(done(SolveOutcome::Factor, factor(cert), Some(structure), trace, thresholds));
            }
            Ok(ExactOutcome::Factor(_)) => trace.push(Stage::Exact, StageStatus::Failure, "factor did not verify"),
            Ok(ExactOutcome::NoFactor(nf)) => {
                let explored = match &nf {
                    NoFactorCertificate::ExhaustedSearch { explored, .. } => *explored,
                    NoFactorCertificate::ColumnArgument(_) => 0,
                };
                trace.push(Stage::Exact, StageStatus::Success, format!("no factor, {explored} nodes"));
                certificate = Some(nf);
            }
            Ok(ExactOutcome::Unknown { explored }) => {
                trace.push(Stage::Exact, StageStatus::Failure, format!("budget exhausted after {explored} nodes"))
            }
            Err(e) => trace.push(Stage::Exact, StageStatus::Failure, e.to_string()),
        }
    }

    // the column argument is the shorter certificate when both exist
    if let Some(nf) = column.or(certificate) {
        return Ok(done(SolveOutcome::NoFactor, Some(Certificate::NoFactor(nf)), Some(structure), trace, thresholds));
    }
    let outcome = if structure.branch == Branch::NonExtreme { SolveOutcome::Unknown } else { SolveOutcome::Structure };
    Ok(done(outcome, None, Some(structure), trace, thresholds))
}
