use forge_core::expansion::{edges_within, exact_profile, neighborhood, unique_neighbor_list, unique_neighbors_bipartite};
use forge_core::graphs::{format_graph_file, named, parse_graph};
use forge_core::products::line_product;
use forge_core::sampling::{sample_biregular, sample_regular};
use forge_core::spectral::{nb_spectral_radius, nb_spectral_radius_dense};
use forge_core::{BipartiteGraph, Graph, GraphFile, Side, VertexSet};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn simple_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..3 * n).prop_map(move |pairs| {
            let mut edges: Vec<(usize, usize)> =
                pairs.into_iter().filter(|(u, v)| u != v).map(|(u, v)| (u.min(v), u.max(v))).collect();
            edges.sort_unstable();
            edges.dedup();
            Graph::from_edges(n, &edges, false).unwrap()
        })
    })
}

fn bipartite(max_side: usize) -> impl Strategy<Value = BipartiteGraph> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(a, b)| {
        prop::collection::vec((0..a, 0..b), 0..2 * (a + b)).prop_map(move |mut edges| {
            edges.sort_unstable();
            edges.dedup();
            BipartiteGraph::from_edges(a, b, &edges, false).unwrap()
        })
    })
}

fn subset(n: usize, mask: u64) -> Vec<usize> {
    (0..n).filter(|&v| mask >> (v % 64) & 1 == 1).collect()
}

/// Brute-force `|UN(S)|` straight from the definition.
fn un_oracle(g: &Graph, s: &[usize]) -> usize {
    (0..g.n()).filter(|w| !s.contains(w)).filter(|&w| s.iter().map(|&v| g.multiplicity(v, w)).sum::<usize>() == 1).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn unique_neighbors_match_definition(g in simple_graph(14), mask in any::<u64>()) {
        let s = subset(g.n(), mask);
        let un = unique_neighbor_list(&g, &s);
        let nb = neighborhood(&g, &s);
        prop_assert_eq!(un.len(), un_oracle(&g, &s));
        prop_assert!(un.iter().all(|w| nb.contains(w)));
        prop_assert!(un.iter().all(|w| !s.contains(w)));
    }

    #[test]
    fn unique_neighbors_count_incidences(g in simple_graph(14), mask in any::<u64>()) {
        // Every vertex of N(S) receives one or more edges from S; the unique ones receive one.
        let s = subset(g.n(), mask);
        let cut: usize = s.iter().map(|&v| g.degree(v)).sum::<usize>() - 2 * edges_within(&g, &s);
        let un = unique_neighbor_list(&g, &s).len();
        let nb = neighborhood(&g, &s).len();
        prop_assert!(un <= nb && nb <= cut);
        prop_assert!(cut - un >= 2 * (nb - un));
    }

    #[test]
    fn bipartite_unique_neighbors_cross_sides(b in bipartite(7), mask in any::<u64>()) {
        let left = subset(b.n_left(), mask);
        let s = VertexSet::new(Side::Left, left.clone(), b.n_left()).unwrap();
        let un = unique_neighbors_bipartite(&b, &s);
        prop_assert_eq!(un.side, Side::Right);
        let expect: Vec<usize> = (0..b.n_right())
            .filter(|&r| b.right_neighbors(r).iter().filter(|l| left.contains(l)).count() == 1)
            .collect();
        prop_assert_eq!(un.members, expect);
    }

    #[test]
    fn profile_is_monotone_and_argmin_reproduces(g in simple_graph(9)) {
        let t_max = g.n().min(5);
        let p = exact_profile(&g, Side::Whole, t_max, u64::MAX).unwrap();
        for t in 1..=t_max {
            let e = p.entry(t);
            prop_assert!(!e.argmin.is_empty() && e.argmin.len() <= t);
            prop_assert_eq!(e.size, e.argmin.len());
            let un = un_oracle(&g, &e.argmin);
            prop_assert_eq!(un, e.unique);
            prop_assert_eq!(e.min_ratio, un as f64 / e.size as f64);
            if t > 1 {
                prop_assert!(p.ratio(t) <= p.ratio(t - 1));
            }
        }
    }

    #[test]
    fn graph_text_round_trips(g in simple_graph(20)) {
        let f = GraphFile::Graph(g);
        let back = parse_graph(&format_graph_file(&f)).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn bipartite_text_round_trips(b in bipartite(10)) {
        let f = GraphFile::Bipartite(b);
        let back = parse_graph(&format_graph_file(&f)).unwrap();
        prop_assert_eq!(back, f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn line_product_shape(seed in any::<u64>(), half_n in 3usize..10, d in 3usize..6) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let n = 2 * half_n;
        let g = sample_regular(n, d, &mut rng, None).unwrap();
        // A 2-regular gadget on d vertices gives a 4-regular product.
        let cyc = named::cycle(d);
        let p = line_product(&g, &cyc, None).unwrap();
        prop_assert_eq!(p.graph.n(), n * d / 2);
        prop_assert_eq!(p.merges, 0);
        prop_assert_eq!(p.graph.regular_degree(), Some(4));
    }

    #[test]
    fn rho_closed_forms(seed in any::<u64>(), c in 2usize..5, d in 2usize..5, k in 4usize..8) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let b = sample_biregular(d * k, c * k, c, d, &mut rng, None).unwrap();
        let g = b.to_graph();
        let expect = (((c - 1) * (d - 1)) as f64).sqrt();
        let rho = nb_spectral_radius(&g).unwrap().rho;
        prop_assert!((rho - expect).abs() <= 1e-6 * expect.max(1.0), "rho {} expect {}", rho, expect);
        prop_assert!((nb_spectral_radius_dense(&g) - expect).abs() <= 1e-6 * expect.max(1.0));
    }
}
