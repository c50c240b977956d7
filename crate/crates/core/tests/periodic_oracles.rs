mod common;

use eqcohom::fixtures;
use eqcohom::graph::Graph;
use eqcohom::lattice::Hnf;
use eqcohom::periodic::{
    summarize, transform_coefficients, truncation_oracle, PeriodicError, PeriodicGraph,
};
use eqcohom::Rat;
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Rat> {
    (-20i64..=20, 1i64..=6).prop_map(|(p, q)| Rat::new(p, q))
}

/// `w(e) = f(t e) - f(o e) + Σ_j a_j(k) t(e)_j`, written out directly.
fn form(pg: &PeriodicGraph, a: &[Vec<Rat>], f: &[Rat]) -> Vec<Rat> {
    let comp = pg.quotient.component_of();
    let mut w = Vec::new();
    for (e, t) in pg.quotient.edges.iter().zip(&pg.voltages) {
        let mut x = &f[e.t] - &f[e.o];
        for (j, tj) in t.iter().enumerate() {
            x += &a[j][comp[e.o]] * Rat::from_int(*tj);
        }
        w.push(x);
    }
    w
}

fn round_trip(pg: &PeriodicGraph, a: &[Vec<Rat>], f: &[Rat]) -> Result<(), TestCaseError> {
    let w = form(pg, a, f);
    let dec = pg.decompose(&w).unwrap();
    prop_assert_eq!(&dec.a, a);
    let comp = pg.quotient.component_of();
    for u in 0..f.len() {
        for v in 0..f.len() {
            if comp[u] == comp[v] {
                prop_assert_eq!(&dec.f[u] - &f[u], &dec.f[v] - &f[v]);
            }
        }
    }
    prop_assert_eq!(pg.reconstruct(&dec.a, &dec.f), w.clone());
    let t = truncation_oracle(pg, &w, &dec, 1).unwrap();
    prop_assert_eq!(t.mismatches, 0);
    prop_assert_eq!(t.checks, pg.quotient.n_edges() * 3usize.pow(pg.d as u32));
    Ok(())
}

fn coefficients(d: usize, m: usize) -> impl Strategy<Value = Vec<Vec<Rat>>> {
    prop::collection::vec(prop::collection::vec(rat(), m), d)
}

#[test]
fn torus_has_d_period_generators() {
    for d in 1..=4 {
        let pg = PeriodicGraph::torus(d);
        assert_eq!(pg.period_generator_rank(), d);
        assert_eq!(pg.closed_modulo_exact_dim().unwrap(), d);
        let s = summarize(&pg).unwrap();
        assert!(s.action_closed);
        let c: Vec<Rat> = (0..d)
            .map(|j| Rat::new(2 * j as i64 - 3, j as i64 + 2))
            .collect();
        let dec = pg.decompose(&c).unwrap();
        let a: Vec<Rat> = dec.a.iter().map(|row| row[0].clone()).collect();
        assert_eq!(a, c);
        assert_eq!(dec.f, vec![Rat::zero()]);
    }
}

#[test]
fn truncation_at_radius_three() {
    for (pg, expected_checks) in [
        (PeriodicGraph::torus(2), 2 * 49),
        (PeriodicGraph::torus(3), 3 * 343),
        (fixtures::hex(), 3 * 49),
    ] {
        let w = fixtures::sample_form(&pg);
        let dec = pg.decompose(&w).unwrap();
        let t = truncation_oracle(&pg, &w, &dec, 3).unwrap();
        assert_eq!((t.checks, t.mismatches), (expected_checks, 0));
    }
}

#[test]
fn hex_by_hand() {
    // cycles e1 - e0 and e2 - e0 carry voltages (1,0) and (0,1)
    let pg = fixtures::hex();
    let w = fixtures::hex_sample_form();
    let dec = pg.decompose(&w).unwrap();
    assert_eq!(dec.a, vec![vec![&w[1] - &w[0]], vec![&w[2] - &w[0]]]);
    assert_eq!(dec.f, vec![Rat::zero(), w[0].clone()]);
}

#[test]
fn open_actions_are_refused() {
    let err = fixtures::loop_voltage_2_0()
        .decompose(&[Rat::one()])
        .unwrap_err();
    assert!(err.is_precondition());
    assert_eq!(err.to_string(), "period lattice not full: rank 1 of 2");
    let pg = fixtures::square_index2();
    let err = pg.decompose(&[Rat::one(), Rat::one()]).unwrap_err();
    assert!(matches!(
        err,
        PeriodicError::NotClosedAction { index: Some(2), .. }
    ));
    assert_eq!(err.to_string(), "period lattice not full: index 2 in Z^2");
}

#[test]
fn non_closed_forms_are_refused() {
    // two parallel loops of voltage e_1: their difference is a zero-voltage cycle
    let pg =
        PeriodicGraph::new(1, Graph::new(1, &[(0, 0), (0, 0)]), vec![vec![1], vec![1]]).unwrap();
    let err = pg.decompose(&[Rat::one(), Rat::from_int(2)]).unwrap_err();
    assert!(matches!(err, PeriodicError::NotInvariantClosed { .. }));
    let dec = pg.decompose(&[Rat::from_int(2), Rat::from_int(2)]).unwrap();
    assert_eq!(dec.certificate.cross_checks, 1);
}

fn cofactor_det(m: &[Vec<i64>]) -> i64 {
    if m.len() == 1 {
        return m[0][0];
    }
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != j)
                        .map(|(_, &x)| x)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * cofactor_det(&minor)
        })
        .sum()
}

/// A random periodic graph with `d ≤ 2`, up to 4 vertices and 6 edges.
fn arb_periodic() -> impl Strategy<Value = PeriodicGraph> {
    (1usize..=2, 1usize..=4)
        .prop_flat_map(|(d, n)| {
            (
                Just(d),
                Just(n),
                prop::collection::vec(((0..n), (0..n), prop::collection::vec(-2i64..=2, d)), 0..=6),
            )
        })
        .prop_map(|(d, n, raw)| {
            let edges: Vec<(usize, usize)> = raw.iter().map(|(o, t, _)| (*o, *t)).collect();
            let voltages = raw.into_iter().map(|(_, _, v)| v).collect();
            PeriodicGraph::new(d, Graph::new(n, &edges), voltages).unwrap()
        })
}

proptest! {
    #[test]
    fn torus_2_round_trip(a in coefficients(2, 1)) {
        round_trip(&PeriodicGraph::torus(2), &a, &[Rat::zero()])?;
    }

    #[test]
    fn torus_3_round_trip(a in coefficients(3, 1), f in rat()) {
        round_trip(&PeriodicGraph::torus(3), &a, &[f])?;
    }

    #[test]
    fn hex_round_trip(a in coefficients(2, 1), f in prop::collection::vec(rat(), 2)) {
        round_trip(&fixtures::hex(), &a, &f)?;
    }

    #[test]
    fn hnf_index_is_determinant(rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 3)) {
        let hnf = Hnf::new(3, &rows).unwrap();
        let det = cofactor_det(&rows).unsigned_abs();
        if det == 0 {
            prop_assert!(!hnf.is_full_rank());
        } else {
            prop_assert_eq!(hnf.index(), Some(det));
            prop_assert_eq!(hnf.is_unimodular(), det == 1);
        }
        for r in &rows {
            let x = hnf.express(r).expect("generators lie in their lattice");
            let back: Vec<i64> = (0..3).map(|c| x.iter().zip(&rows).map(|(a, row)| a * row[c]).sum()).collect();
            prop_assert_eq!(&back, r);
        }
    }

    /// On graphs whose period lattices are all of `Z^d`, a form is invariant
    /// closed exactly when it lies in exact forms plus the span of the period
    /// generators, and then the decomposition round-trips.
    #[test]
    fn random_periodic_graphs(pg in arb_periodic(), w in prop::collection::vec(-3i64..=3, 6)) {
        let w: Vec<Rat> = w[..pg.quotient.n_edges()].iter().map(|&x| Rat::from_int(x)).collect();
        if !pg.action_is_closed().unwrap() {
            let err = pg.decompose(&w).unwrap_err();
            prop_assert!(err.is_precondition());
            return Ok(());
        }
        let comp = pg.quotient.component_of();
        let m = pg.quotient.components().len();
        let mut base = common::to_rows(&pg.quotient.coboundary());
        for (i, (e, t)) in pg.quotient.edges.iter().zip(&pg.voltages).enumerate() {
            for tj in t {
                for k in 0..m {
                    base[i].push(if comp[e.o] == k { Rat::from_int(*tj) } else { Rat::zero() });
                }
            }
        }
        let mut augmented = base.clone();
        for (row, x) in augmented.iter_mut().zip(&w) {
            row.push(x.clone());
        }
        let closed = pg.quotient.n_edges() == 0 || common::rank(&augmented) == common::rank(&base);
        prop_assert_eq!(pg.is_invariant_closed(&w).unwrap(), closed);
        match pg.decompose(&w) {
            Ok(dec) => {
                prop_assert!(closed);
                prop_assert_eq!(form(&pg, &dec.a, &dec.f), w);
            }
            Err(e) => {
                let refused = matches!(e, PeriodicError::NotInvariantClosed { .. });
                prop_assert!(!closed && refused);
            }
        }
    }

    #[test]
    fn change_of_generators(a in coefficients(2, 1), f in prop::collection::vec(rat(), 2), shear in -3i64..=3) {
        let pg = fixtures::hex();
        let w = form(&pg, &a, &f);
        let basis = vec![vec![1, shear], vec![0, 1]];
        let periods = pg.periods_for_generators(&w, &basis).unwrap();
        prop_assert_eq!(periods, transform_coefficients(&a, &basis));
    }
}
