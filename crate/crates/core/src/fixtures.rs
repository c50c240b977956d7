//! Canonical small examples, shared by tests, the CLI and the web demo.

use serde::Serialize;

use crate::graph::{to_instance, Graph, GraphAction};
use crate::instance::{Generator, LinearInstance};
use crate::linalg::Mat;
use crate::periodic::PeriodicGraph;
use crate::rational::Rat;

/// `U = Q^2`, `W = Q`, `π = [1 0]`, one shear generator.
pub fn shear() -> LinearInstance {
    LinearInstance {
        dim_u: 2,
        dim_w: 1,
        pi: Mat::from_ints(&[[1, 0]]),
        generators: vec![Generator {
            g_u: Mat::from_ints(&[[1, 0], [1, 1]]),
            g_w: Mat::identity(1),
            order: None,
        }],
    }
}

/// Two commuting shears on `Q^4` feeding the same kernel direction `e_1`;
/// `π` forgets the `e_1` coordinate.
pub fn double_shear() -> LinearInstance {
    LinearInstance {
        dim_u: 4,
        dim_w: 3,
        pi: Mat::from_ints(&[[1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]),
        generators: vec![
            Generator {
                g_u: Mat::from_ints(&[[1, 0, 0, 0], [1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]),
                g_w: Mat::identity(3),
                order: None,
            },
            Generator {
                g_u: Mat::from_ints(&[[1, 0, 0, 0], [0, 1, 1, 0], [0, 0, 1, 0], [0, 0, 0, 1]]),
                g_w: Mat::identity(3),
                order: None,
            },
        ],
    }
}

/// Trivial action with a rank-2 `π : Q^3 → Q^2`.
pub fn identity() -> LinearInstance {
    LinearInstance {
        dim_u: 3,
        dim_w: 2,
        pi: Mat::from_ints(&[[1, 1, 0], [0, 1, 1]]),
        generators: vec![Generator {
            g_u: Mat::identity(3),
            g_w: Mat::identity(2),
            order: Some(1),
        }],
    }
}

fn cycle(n: usize) -> (Graph, GraphAction) {
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let rotation = (0..n).map(|i| (i + 1) % n).collect();
    (
        Graph::new(n, &edges),
        GraphAction {
            generators: vec![rotation],
            orders: Some(vec![Some(n as u64)]),
        },
    )
}

pub fn c4_rotation() -> (Graph, GraphAction) {
    cycle(4)
}

pub fn c6_rotation() -> (Graph, GraphAction) {
    cycle(6)
}

pub fn p2_swap() -> (Graph, GraphAction) {
    (
        Graph::new(2, &[(0, 1)]),
        GraphAction {
            generators: vec![vec![1, 0]],
            orders: Some(vec![Some(2)]),
        },
    )
}

/// Triangle with the symmetric group generated by two transpositions.
pub fn k3_s3() -> (Graph, GraphAction) {
    (
        Graph::new(3, &[(0, 1), (1, 2), (2, 0)]),
        GraphAction {
            generators: vec![vec![1, 0, 2], vec![0, 2, 1]],
            orders: Some(vec![Some(2), Some(2)]),
        },
    )
}

/// Two disjoint triangles exchanged by an involution.
pub fn two_triangles_swap() -> (Graph, GraphAction) {
    (
        Graph::new(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]),
        GraphAction {
            generators: vec![vec![3, 4, 5, 0, 1, 2]],
            orders: Some(vec![Some(2)]),
        },
    )
}

/// Honeycomb quotient: two vertices joined by three edges.
pub fn hex() -> PeriodicGraph {
    PeriodicGraph::new(
        2,
        Graph::new(2, &[(0, 1), (0, 1), (0, 1)]),
        vec![vec![0, 0], vec![1, 0], vec![0, 1]],
    )
    .expect("valid fixture")
}

/// Square lattice quotient whose loops only reach an index-2 sublattice.
pub fn square_index2() -> PeriodicGraph {
    PeriodicGraph::new(
        2,
        Graph::new(1, &[(0, 0), (0, 0)]),
        vec![vec![2, 0], vec![0, 1]],
    )
    .expect("valid fixture")
}

/// Single vertex, one loop with voltage `(2, 0)`.
pub fn loop_voltage_2_0() -> PeriodicGraph {
    PeriodicGraph::new(2, Graph::new(1, &[(0, 0)]), vec![vec![2, 0]]).expect("valid fixture")
}

const LOOP_SAMPLE: [i64; 8] = [5, -3, 2, -7, 11, -13, 4, 1];

/// A sample invariant 1-form to pair with a periodic fixture.
pub fn sample_form(pg: &PeriodicGraph) -> Vec<Rat> {
    (0..pg.quotient.n_edges())
        .map(|i| Rat::from_int(LOOP_SAMPLE[i % LOOP_SAMPLE.len()]))
        .collect()
}

pub fn hex_sample_form() -> Vec<Rat> {
    vec![Rat::new(1, 2), Rat::from_int(3), Rat::from_int(-2)]
}

/// The curated linear instances, graph fixtures compiled through
/// [`to_instance`].
pub fn curated_instances() -> Vec<(&'static str, LinearInstance)> {
    let graph = |(g, a): (Graph, GraphAction)| to_instance(&g, &a).expect("valid fixture");
    vec![
        ("shear", shear()),
        ("double-shear", double_shear()),
        ("identity", identity()),
        ("c4-rotation", graph(c4_rotation())),
        ("p2-swap", graph(p2_swap())),
        ("k3-s3", graph(k3_s3())),
        ("two-triangles-swap", graph(two_triangles_swap())),
    ]
}

pub const FIXTURE_NAMES: [&str; 9] = [
    "torus-d",
    "hex",
    "square-index2",
    "c4-rotation",
    "p2-swap",
    "k3-s3",
    "shear",
    "double-shear",
    "two-triangles-swap",
];

pub const MAX_TORUS_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown fixture `{name}`; expected one of: {list}", name = .0, list = FIXTURE_NAMES.join(", "))]
pub struct UnknownFixture(pub String);

/// A fixture rendered as named JSON documents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fixture {
    Instance(LinearInstance),
    Graph(Graph, GraphAction),
    Periodic(PeriodicGraph, Vec<Rat>),
}

pub fn by_name(name: &str) -> Result<Fixture, UnknownFixture> {
    let unknown = || UnknownFixture(name.to_string());
    if let Some(d) = name.strip_prefix("torus-") {
        let d: usize = d.parse().map_err(|_| unknown())?;
        if d == 0 || d > MAX_TORUS_DIM {
            return Err(unknown());
        }
        let pg = PeriodicGraph::torus(d);
        let w = sample_form(&pg);
        return Ok(Fixture::Periodic(pg, w));
    }
    Ok(match name {
        "hex" => Fixture::Periodic(hex(), hex_sample_form()),
        "square-index2" => {
            let pg = square_index2();
            let w = sample_form(&pg);
            Fixture::Periodic(pg, w)
        }
        "c4-rotation" => {
            let (g, a) = c4_rotation();
            Fixture::Graph(g, a)
        }
        "p2-swap" => {
            let (g, a) = p2_swap();
            Fixture::Graph(g, a)
        }
        "k3-s3" => {
            let (g, a) = k3_s3();
            Fixture::Graph(g, a)
        }
        "two-triangles-swap" => {
            let (g, a) = two_triangles_swap();
            Fixture::Graph(g, a)
        }
        "shear" => Fixture::Instance(shear()),
        "double-shear" => Fixture::Instance(double_shear()),
        _ => return Err(unknown()),
    })
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("fixtures serialize");
    s.push('\n');
    s
}

impl Fixture {
    /// `(file name, contents)` pairs, using `stem` as the file name prefix.
    pub fn files(&self, stem: &str) -> Vec<(String, String)> {
        match self {
            Fixture::Instance(inst) => vec![(format!("{stem}.instance.json"), pretty(inst))],
            Fixture::Graph(g, a) => vec![
                (format!("{stem}.graph.json"), pretty(g)),
                (format!("{stem}.action.json"), pretty(a)),
            ],
            Fixture::Periodic(pg, w) => vec![
                (format!("{stem}.pgraph.json"), pretty(pg)),
                (format!("{stem}.w.json"), pretty(w)),
            ],
        }
    }
}
