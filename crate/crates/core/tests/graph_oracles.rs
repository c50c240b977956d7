mod common;

use eqcohom::graph::{analyze_graph_action, Graph};
use eqcohom::random::{random_graph, random_graph_action};
use eqcohom::{kernel_basis, Rat, Subspace};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn components(g: &Graph) -> usize {
    let mut uf = common::UnionFind::new(g.n_vertices);
    for e in &g.edges {
        uf.union(e.o, e.t);
    }
    uf.classes()
}

fn arb_graph() -> impl Strategy<Value = Graph> {
    (
        0usize..8,
        prop::collection::vec((0usize..8, 0usize..8), 0..12),
    )
        .prop_map(|(n, raw)| {
            if n == 0 {
                return Graph::new(0, &[]);
            }
            let edges: Vec<(usize, usize)> = raw.into_iter().map(|(a, b)| (a % n, b % n)).collect();
            Graph::new(n, &edges)
        })
}

#[test]
fn kernel_dimension_on_seeded_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut loops, mut multi, mut edgeless) = (0, 0, 0);
    for _ in 0..150 {
        let g = random_graph(&mut rng, 9, 14);
        loops += usize::from(g.edges.iter().any(|e| e.o == e.t));
        let mut pairs: Vec<(usize, usize)> = g
            .edges
            .iter()
            .map(|e| (e.o.min(e.t), e.o.max(e.t)))
            .collect();
        pairs.sort_unstable();
        multi += usize::from(pairs.windows(2).any(|w| w[0] == w[1]));
        edgeless += usize::from(g.edges.is_empty());
        assert_eq!(kernel_basis(&g.coboundary()).dim(), components(&g));
    }
    assert!(
        loops > 0 && multi > 0 && edgeless > 0,
        "{loops} {multi} {edgeless}"
    );
}

proptest! {
    #[test]
    fn kernel_is_spanned_by_component_indicators(g in arb_graph()) {
        let k = kernel_basis(&g.coboundary());
        prop_assert_eq!(k.dim(), components(&g));
        let indicators = Subspace::from_vectors(g.n_vertices, &g.kernel_indicators()).unwrap();
        prop_assert_eq!(indicators.basis(), k.basis());
    }

    #[test]
    fn exact_forms_integrate(g in arb_graph(), f in prop::collection::vec(-9i64..=9, 8)) {
        let f: Vec<Rat> = f[..g.n_vertices].iter().map(|&x| Rat::from_int(x)).collect();
        let w: Vec<Rat> = g.edges.iter().map(|e| &f[e.t] - &f[e.o]).collect();
        prop_assert_eq!(g.coboundary().mul_vec(&f).unwrap(), w.clone());
        let p = g.potential(&w).unwrap().expect("exact forms have potentials");
        let comp = g.component_of();
        for u in 0..g.n_vertices {
            for v in 0..g.n_vertices {
                if comp[u] == comp[v] {
                    prop_assert_eq!(&p[u] - &f[u], &p[v] - &f[v]);
                }
            }
        }
    }

    #[test]
    fn potential_exists_iff_in_column_space(g in arb_graph(), w in prop::collection::vec(-3i64..=3, 12)) {
        let w: Vec<Rat> = w[..g.n_edges()].iter().map(|&x| Rat::from_int(x)).collect();
        let delta = g.coboundary();
        let mut augmented = common::to_rows(&delta);
        for (row, x) in augmented.iter_mut().zip(&w) {
            row.push(x.clone());
        }
        let exact = g.n_edges() == 0 || common::rank(&augmented) == common::rank(&common::to_rows(&delta));
        prop_assert_eq!(g.potential(&w).unwrap().is_some(), exact);
    }

    #[test]
    fn finite_actions_have_trivial_quotient(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, a) = random_graph_action(&mut rng, 6);
        let r = analyze_graph_action(&g, &a).unwrap();
        prop_assert_eq!(r.dim, 0);
        prop_assert_eq!(r.m, components(&g));
        prop_assert!(r.consistent, "{:?}", r);
    }
}
