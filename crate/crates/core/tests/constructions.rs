//! Generators checked against independent structural scans.

use proptest::prelude::*;
use tritile::checks::{count_triangles, is_c4_free, regular_degree};
use tritile::constructions::{
    find_sidon_pair, g3_construction, planted_factor_graph, q_graph, random_graph_with_exact_min_degree, with_noise,
    ConstructionError, G3Params, SidonBudget,
};
use tritile::factor::verify_factor;
use tritile::format;
use tritile::graph::{class_pairs, VertexRef};
use tritile::solver::{g3_no_factor_certificate, ColumnCheck};

/// Differences counted by hand rather than through the library check.
fn distinct_differences(set: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    for &a in set {
        for &b in set {
            if a != b {
                let d = (a + n - b) % n;
                if seen[d] {
                    return false;
                }
                seen[d] = true;
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn q_graphs_are_regular_triangle_and_c4_free(n in 1usize..80, d in 0usize..6, seed in any::<u64>()) {
        match q_graph(n, d, seed, SidonBudget::default()) {
            Ok(q) => {
                prop_assert!(distinct_differences(&q.pair.s_set, n));
                prop_assert!(distinct_differences(&q.pair.t_set, n));
                prop_assert_eq!(count_triangles(&q.graph), 0);
                prop_assert!(is_c4_free(&q.graph));
                prop_assert_eq!(regular_degree(&q.graph), Some(d));
            }
            // d = 1 needs some t != 2s, impossible only in Z_1
            Err(ConstructionError::Infeasible { .. }) => prop_assert!(d >= 2 || n == 1),
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn exact_level_is_exact(n in 1usize..12, level in 0usize..14, seed in any::<u64>()) {
        let g = random_graph_with_exact_min_degree(n, level, seed);
        prop_assert_eq!(g.bar_min_degree(), level.min(n));
    }

    #[test]
    fn planted_certificates_hold(k in 1usize..5, h in 1usize..4, p in 0.0f64..1.0, seed in any::<u64>()) {
        let (g, cert) = planted_factor_graph(k * h, h, p, seed).unwrap();
        prop_assert_eq!(verify_factor(&g, h, &cert), Ok(()));
    }

    #[test]
    fn text_format_round_trips(n in 1usize..8, level in 0usize..8, h in 0usize..3, seed in any::<u64>()) {
        let g = random_graph_with_exact_min_degree(n, level, seed);
        let h = (h > 0).then_some(h);
        let text = format::write(&g, h);
        let back = format::parse(&text).unwrap();
        prop_assert_eq!(&back.graph, &g);
        prop_assert_eq!(back.h, h);
        prop_assert_eq!(format::write(&back.graph, back.h), text);
    }
}

#[test]
fn g3_matches_its_formulas_over_seeds() {
    let p = G3Params::new(3, 1, 1).unwrap();
    for seed in 0..20 {
        let g3 = g3_construction(p, seed, SidonBudget::default()).unwrap();
        let n = p.n();
        assert_eq!(n, 12);
        assert_eq!(g3.graph.bar_min_degree(), 3 * (2 * n).div_ceil(9) + 3 - 3);
        assert!(matches!(g3_no_factor_certificate(&g3.graph, &g3.columns, 3), ColumnCheck::Certificate(_)));
    }
}

#[test]
fn sidon_density_limit() {
    // d(d - 1) differences need n - 1 >= d(d - 1)
    assert!(find_sidon_pair(6, 3, 0, SidonBudget::default()).is_err());
    let pair = find_sidon_pair(31, 3, 0, SidonBudget::default()).unwrap();
    assert!(distinct_differences(&pair.s_set, 31));
    assert!(distinct_differences(&pair.t_set, 31));
}

#[test]
fn noise_zero_and_one() {
    let (g, _) = planted_factor_graph(6, 2, 0.3, 1).unwrap();
    assert_eq!(with_noise(&g, 0.0, 5).unwrap(), g);
    let flipped = with_noise(&g, 1.0, 5).unwrap();
    for (a, b) in class_pairs() {
        for u in 0..6 {
            for v in 0..6 {
                let (x, y) = (VertexRef::new(a, u), VertexRef::new(b, v));
                assert_ne!(g.has_edge(x, y), flipped.has_edge(x, y));
            }
        }
    }
    assert!(with_noise(&g, 1.5, 0).is_err());
}
