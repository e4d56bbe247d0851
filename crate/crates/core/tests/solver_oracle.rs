//! The exact search and the staged solver against the brute-force oracle.

use proptest::prelude::*;
use tritile::graph::{class_pairs, TripartiteGraph, VertexRef};
use tritile::solver::{brute_force_oracle, find_factor_exact, Certificate, ExactOutcome, DEFAULT_NODE_BUDGET};
use tritile::tiler::{solve, SolveConfig, SolveOutcome};

fn graph_from_bits(n: usize, bits: &[bool]) -> TripartiteGraph {
    let slots = class_pairs()
        .into_iter()
        .flat_map(|(a, b)| (0..n).flat_map(move |u| (0..n).map(move |v| (VertexRef::new(a, u), VertexRef::new(b, v)))));
    TripartiteGraph::build(n, slots.zip(bits).filter(|(_, &on)| on).map(|(e, _)| e)).unwrap()
}

/// Sizes with `h | n` small enough for the oracle, and a dense-ish edge mask.
fn instance() -> impl Strategy<Value = (usize, usize, TripartiteGraph)> {
    prop_oneof![Just((2, 1)), Just((3, 1)), Just((4, 1)), Just((4, 2)), Just((6, 2)), Just((6, 3))].prop_flat_map(
        |(n, h)| {
            (0.3f64..1.0).prop_flat_map(move |p| {
                proptest::collection::vec(proptest::bool::weighted(p), 3 * n * n)
                    .prop_map(move |bits| (n, h, graph_from_bits(n, &bits)))
            })
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn exact_matches_oracle((_n, h, g) in instance()) {
        let truth = brute_force_oracle(&g, h, 18).unwrap();
        let out = find_factor_exact(&g, h, DEFAULT_NODE_BUDGET).unwrap();
        prop_assert_eq!(out.has_factor(), Some(truth));
        match out {
            ExactOutcome::Factor(f) => prop_assert_eq!(Certificate::Factor(f).verify(&g, h), Ok(())),
            ExactOutcome::NoFactor(nf) => prop_assert_eq!(nf.verify(&g), Ok(())),
            ExactOutcome::Unknown { .. } => unreachable!(),
        }
    }

    #[test]
    fn staged_solver_is_decisive_and_right((_n, h, g) in instance(), seed in any::<u64>()) {
        let truth = brute_force_oracle(&g, h, 18).unwrap();
        let report = solve(&g, h, &SolveConfig { seed, ..SolveConfig::default() }).unwrap();
        let want = if truth { SolveOutcome::Factor } else { SolveOutcome::NoFactor };
        prop_assert_eq!(report.outcome, want);
        prop_assert_eq!(report.certificate.unwrap().verify(&g, h), Ok(()));
        prop_assert_eq!(report.thresholds.bar_min_degree, g.bar_min_degree());
    }
}

#[test]
fn exhaustive_n2() {
    for mask in 0u32..1 << 12 {
        let bits: Vec<bool> = (0..12).map(|i| mask >> i & 1 == 1).collect();
        let g = graph_from_bits(2, &bits);
        let truth = brute_force_oracle(&g, 1, 18).unwrap();
        assert_eq!(find_factor_exact(&g, 1, DEFAULT_NODE_BUDGET).unwrap().has_factor(), Some(truth), "mask {mask}");
    }
}

#[test]
fn tampered_exhausted_certificate_is_rejected() {
    let g = tritile::pattern::uniform_blowup(&tritile::pattern::PatternGraph::gamma3(), 3).unwrap().graph;
    let ExactOutcome::NoFactor(nf) = find_factor_exact(&g, 1, DEFAULT_NODE_BUDGET).unwrap() else { panic!() };
    assert_eq!(nf.verify(&g), Ok(()));
    let mut json = serde_json::to_value(&nf).unwrap();
    let explored = json["explored"].as_u64().unwrap();
    json["explored"] = (explored + 1).into();
    let bad: tritile::solver::NoFactorCertificate = serde_json::from_value(json).unwrap();
    assert!(bad.verify(&g).is_err());
    // the same claim about a graph that does have a factor fails too
    assert!(nf.verify(&TripartiteGraph::complete(9)).is_err());
}
