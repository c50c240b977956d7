//! Finite graphs, their 0- and 1-cochains, and permutation group actions.
//!
//! Each geometric edge is stored once with a chosen orientation `o → t`; the
//! reversed edge is implicit and carries the negated 1-cochain value.

use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::instance::{Generator, LinearInstance, ValidInstance};
use crate::linalg::{kernel_basis, Mat, Subspace};
use crate::rational::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: u64,
    pub o: usize,
    pub t: usize,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.o == self.t
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    #[serde(rename = "vertices")]
    pub n_vertices: usize,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("edge {id} has endpoint {vertex} outside 0..{n}")]
    DanglingEndpoint { id: u64, vertex: usize, n: usize },
    #[error("duplicate edge id {0}")]
    DuplicateEdgeId(u64),
    #[error("generator {generator} is not a permutation of 0..{n}")]
    NotPermutation { generator: usize, n: usize },
    #[error("generator {generator} does not map edges to edges")]
    NotAutomorphism { generator: usize },
    #[error("declared order of generator {generator} is wrong")]
    WrongOrder { generator: usize },
    #[error("orders list has {found} entries for {expected} generators")]
    OrdersLength { expected: usize, found: usize },
    #[error("group closure exceeded {cap} elements")]
    ClosureCap { cap: usize },
    #[error("cochain has length {found}, expected {expected}")]
    CochainLength { expected: usize, found: usize },
}

/// Non-fatal observations made while validating a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphWarnings {
    /// Ids of loop edges; 1-cochain values on them are forced to zero.
    pub loops: Vec<u64>,
}

impl Graph {
    pub fn new(n_vertices: usize, edges: &[(usize, usize)]) -> Graph {
        Graph {
            n_vertices,
            edges: edges
                .iter()
                .enumerate()
                .map(|(i, &(o, t))| Edge { id: i as u64, o, t })
                .collect(),
        }
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn validate(&self) -> Result<GraphWarnings, GraphError> {
        let mut seen = HashSet::new();
        for e in &self.edges {
            for v in [e.o, e.t] {
                if v >= self.n_vertices {
                    return Err(GraphError::DanglingEndpoint {
                        id: e.id,
                        vertex: v,
                        n: self.n_vertices,
                    });
                }
            }
            if !seen.insert(e.id) {
                return Err(GraphError::DuplicateEdgeId(e.id));
            }
        }
        Ok(GraphWarnings {
            loops: self
                .edges
                .iter()
                .filter(|e| e.is_loop())
                .map(|e| e.id)
                .collect(),
        })
    }

    /// Position of the edge with the given id in storage order.
    pub fn edge_index(&self, id: u64) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Sorted neighbor lists with the incident stored edge index and its
    /// direction (+1 when leaving along the stored orientation).
    fn adjacency(&self) -> Vec<Vec<(usize, usize, i8)>> {
        let mut adj = vec![Vec::new(); self.n_vertices];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.o].push((e.t, i, 1));
            if !e.is_loop() {
                adj[e.t].push((e.o, i, -1));
            }
        }
        for list in &mut adj {
            list.sort();
        }
        adj
    }

    /// `(π f)(e) = f(t e) - f(o e)`, one row per stored edge.
    pub fn coboundary(&self) -> Mat {
        let mut m = Mat::zeros(self.edges.len(), self.n_vertices);
        for (i, e) in self.edges.iter().enumerate() {
            if e.is_loop() {
                continue;
            }
            m[(i, e.t)] = Rat::one();
            m[(i, e.o)] = Rat::from_int(-1);
        }
        m
    }

    /// Connected components from BFS, each rooted at its smallest vertex and
    /// listed in order of that root.
    pub fn components(&self) -> Vec<Vec<usize>> {
        self.spanning_forest().components
    }

    pub fn component_of(&self) -> Vec<usize> {
        self.spanning_forest().component_of
    }

    /// Indicator functions `1_{V_k}` of the components.
    pub fn kernel_indicators(&self) -> Vec<Vec<Rat>> {
        self.components()
            .iter()
            .map(|comp| {
                let mut v = vec![Rat::zero(); self.n_vertices];
                for &x in comp {
                    v[x] = Rat::one();
                }
                v
            })
            .collect()
    }

    pub fn spanning_forest(&self) -> SpanningForest {
        let adj = self.adjacency();
        let n = self.n_vertices;
        let mut component_of = vec![usize::MAX; n];
        let mut parent = vec![None; n];
        let mut tree_edge = vec![false; self.edges.len()];
        let mut components = Vec::new();
        let mut order = Vec::with_capacity(n);
        for root in 0..n {
            if component_of[root] != usize::MAX {
                continue;
            }
            let k = components.len();
            let mut comp = vec![root];
            component_of[root] = k;
            order.push(root);
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &(u, ei, dir) in &adj[v] {
                    if component_of[u] == usize::MAX {
                        component_of[u] = k;
                        parent[u] = Some((v, ei, dir));
                        tree_edge[ei] = true;
                        comp.push(u);
                        order.push(u);
                        queue.push_back(u);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }
        SpanningForest {
            components,
            component_of,
            parent,
            tree_edge,
            order,
        }
    }

    /// Whether `w` sums to zero around every cycle.
    pub fn is_closed(&self, w: &[Rat]) -> Result<bool, GraphError> {
        Ok(self.potential(w)?.is_some())
    }

    /// Potential `f` with `π f = w`, normalized to zero at each component's
    /// smallest vertex, or `None` if `w` is not closed.
    pub fn potential(&self, w: &[Rat]) -> Result<Option<Vec<Rat>>, GraphError> {
        if w.len() != self.edges.len() {
            return Err(GraphError::CochainLength {
                expected: self.edges.len(),
                found: w.len(),
            });
        }
        let forest = self.spanning_forest();
        let f = forest.integrate(w);
        let closed = self
            .edges
            .iter()
            .zip(w)
            .all(|(e, we)| &f[e.t] - &f[e.o] == *we);
        Ok(closed.then_some(f))
    }
}

/// BFS spanning forest; see [`Graph::spanning_forest`].
#[derive(Debug, Clone)]
pub struct SpanningForest {
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
    /// `(parent vertex, stored edge index, direction)`; direction is +1 when
    /// the stored edge points from parent to child.
    pub parent: Vec<Option<(usize, usize, i8)>>,
    pub tree_edge: Vec<bool>,
    /// BFS visiting order; parents precede children.
    pub order: Vec<usize>,
}

impl SpanningForest {
    /// Integrates an additive edge quantity from the roots along tree edges.
    pub fn integrate(&self, w: &[Rat]) -> Vec<Rat> {
        let mut f = vec![Rat::zero(); self.parent.len()];
        for &v in &self.order {
            if let Some((p, ei, dir)) = self.parent[v] {
                f[v] = if dir > 0 {
                    &f[p] + &w[ei]
                } else {
                    &f[p] - &w[ei]
                };
            }
        }
        f
    }
}

/// Vertex permutations generating a group acting on a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphAction {
    pub generators: Vec<Vec<usize>>,
    /// Declared orders, one entry per generator (`null` when unknown).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orders: Option<Vec<Option<u64>>>,
}

pub const DEFAULT_CLOSURE_CAP: usize = 100_000;

fn is_permutation(p: &[usize], n: usize) -> bool {
    if p.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &x in p {
        if x >= n || std::mem::replace(&mut seen[x], true) {
            return false;
        }
    }
    true
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    // (a ∘ b)(v) = a(b(v))
    b.iter().map(|&v| a[v]).collect()
}

fn perm_order(p: &[usize]) -> u64 {
    let id: Vec<usize> = (0..p.len()).collect();
    let mut cur = p.to_vec();
    let mut k = 1;
    while cur != id {
        cur = compose(p, &cur);
        k += 1;
    }
    k
}

impl GraphAction {
    pub fn declared_order(&self, i: usize) -> Option<u64> {
        self.orders
            .as_ref()
            .and_then(|o| o.get(i).copied().flatten())
    }

    /// For each stored edge, the stored edge it maps to and the sign (+1 if
    /// the orientation is preserved). Parallel edges between the same pair of
    /// endpoints are matched in storage order.
    pub fn edge_map(g: &Graph, perm: &[usize]) -> Option<Vec<(usize, i8)>> {
        let key = |a: usize, b: usize| (a.min(b), a.max(b));
        let mut buckets: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, e) in g.edges.iter().enumerate() {
            buckets.entry(key(e.o, e.t)).or_default().push(i);
        }
        let mut out = vec![(0, 0); g.edges.len()];
        for (k, list) in &buckets {
            let target = buckets.get(&key(perm[k.0], perm[k.1]))?;
            if target.len() != list.len() {
                return None;
            }
            for (&src, &dst) in list.iter().zip(target) {
                let (e, f) = (g.edges[src], g.edges[dst]);
                let sign = if e.is_loop() || (perm[e.o] == f.o && perm[e.t] == f.t) {
                    1
                } else {
                    -1
                };
                out[src] = (dst, sign);
            }
        }
        Some(out)
    }

    pub fn validate(&self, g: &Graph) -> Result<(), GraphError> {
        let n = g.n_vertices;
        if let Some(orders) = &self.orders {
            if orders.len() != self.generators.len() {
                return Err(GraphError::OrdersLength {
                    expected: self.generators.len(),
                    found: orders.len(),
                });
            }
        }
        for (i, p) in self.generators.iter().enumerate() {
            if !is_permutation(p, n) {
                return Err(GraphError::NotPermutation { generator: i, n });
            }
            if Self::edge_map(g, p).is_none() {
                return Err(GraphError::NotAutomorphism { generator: i });
            }
            if let Some(k) = self.declared_order(i) {
                if k != perm_order(p) {
                    return Err(GraphError::WrongOrder { generator: i });
                }
            }
        }
        Ok(())
    }

    /// All elements of the generated permutation group, identity first, in
    /// BFS order over right multiplication by generators.
    pub fn closure(&self, n: usize, cap: usize) -> Result<Vec<Vec<usize>>, GraphError> {
        let id: Vec<usize> = (0..n).collect();
        let mut seen: HashSet<Vec<usize>> = HashSet::from([id.clone()]);
        let mut elements = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &self.generators {
                let y = compose(&x, g);
                if seen.insert(y.clone()) {
                    if elements.len() >= cap {
                        return Err(GraphError::ClosureCap { cap });
                    }
                    elements.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
        Ok(elements)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActionChecks {
    pub is_automorphism: bool,
    pub group_order: usize,
    pub is_free: bool,
    pub is_closed_in_components: bool,
}

pub fn action_checks(g: &Graph, act: &GraphAction, cap: usize) -> Result<ActionChecks, GraphError> {
    g.validate()?;
    let is_automorphism = match act.validate(g) {
        Ok(()) => true,
        Err(GraphError::NotAutomorphism { .. }) => false,
        Err(e) => return Err(e),
    };
    let elements = act.closure(g.n_vertices, cap)?;
    let comp = g.component_of();
    let is_free = elements
        .iter()
        .skip(1)
        .all(|p| p.iter().enumerate().all(|(v, &pv)| v != pv));
    let is_closed_in_components = elements
        .iter()
        .all(|p| p.iter().enumerate().all(|(v, &pv)| comp[v] == comp[pv]));
    Ok(ActionChecks {
        is_automorphism,
        group_order: elements.len(),
        is_free,
        is_closed_in_components,
    })
}

/// Permutation matrix with `M e_v = e_{p(v)}`, i.e. `(M f)(p(v)) = f(v)`.
fn vertex_matrix(perm: &[usize]) -> Mat {
    let n = perm.len();
    let mut m = Mat::zeros(n, n);
    for (v, &pv) in perm.iter().enumerate() {
        m[(pv, v)] = Rat::one();
    }
    m
}

fn edge_matrix(map: &[(usize, i8)]) -> Mat {
    let n = map.len();
    let mut m = Mat::zeros(n, n);
    for (e, &(f, sign)) in map.iter().enumerate() {
        m[(f, e)] = Rat::from_int(sign as i64);
    }
    m
}

/// `U = C^0`, `W = C^1`, `π` the coboundary, generators acting by signed
/// permutation matrices.
pub fn to_instance(g: &Graph, act: &GraphAction) -> Result<LinearInstance, GraphError> {
    g.validate()?;
    act.validate(g)?;
    let generators = act
        .generators
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let map = GraphAction::edge_map(g, p).expect("validated automorphism");
            Generator {
                g_u: vertex_matrix(p),
                g_w: edge_matrix(&map),
                order: act.declared_order(i),
            }
        })
        .collect();
    let inst = LinearInstance {
        dim_u: g.n_vertices,
        dim_w: g.n_edges(),
        pi: g.coboundary(),
        generators,
    };
    assert!(
        inst.validate().is_valid(),
        "graph actions are equivariant by construction"
    );
    Ok(inst)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphReport {
    pub checks: ActionChecks,
    pub loops: Vec<u64>,
    pub components: usize,
    pub m: usize,
    pub d: usize,
    pub md: usize,
    pub dim: usize,
    pub condition_i: bool,
    pub condition_ii: bool,
    pub iff_holds: bool,
    /// Finite permutation groups have abelianization of rank 0, so the
    /// quotient must vanish.
    pub predicted_dim: usize,
    pub commutation_on_u_tilde: Option<bool>,
    pub torsion_trivial_on_u_tilde: Option<bool>,
    pub notes: Vec<String>,
    pub consistent: bool,
}

pub fn analyze_graph_action(g: &Graph, act: &GraphAction) -> Result<GraphReport, GraphError> {
    let warnings = g.validate()?;
    let checks = action_checks(g, act, DEFAULT_CLOSURE_CAP)?;
    if !checks.is_automorphism {
        act.validate(g)?;
    }
    let inst = to_instance(g, act)?;
    let valid: ValidInstance = inst.into_valid().expect("asserted valid in to_instance");
    let iff = valid.verify_iff();
    let components = g.components().len();
    let kernel_matches = kernel_basis(&g.coboundary())
        == Subspace::from_vectors(g.n_vertices, &g.kernel_indicators()).expect("indicator length");
    let commutation = valid.check_commutation().ok();
    let torsion = valid.check_torsion_trivial().ok().map(|t| match t {
        crate::instance::TorsionCheck::Vacuous => true,
        crate::instance::TorsionCheck::Checked { holds, .. } => holds,
    });

    let mut notes = vec![
        "hypothesis G ≅ Z^d not satisfied: finite permutation group, rank of abelianization is 0"
            .to_string(),
    ];
    if !warnings.loops.is_empty() {
        notes.push(format!(
            "loops {:?} carry forced 1-cochain value 0",
            warnings.loops
        ));
    }
    if !checks.is_closed_in_components {
        notes.push(
            "action exchanges components; condition (i) fails for the component basis".to_string(),
        );
    }
    let predicted_dim = 0;
    let consistent = kernel_matches
        && iff.m == components
        && !iff.is_violation()
        && iff.dim == predicted_dim
        && commutation.unwrap_or(true)
        && torsion.unwrap_or(true)
        && iff.condition_i == checks.is_closed_in_components;
    Ok(GraphReport {
        checks,
        loops: warnings.loops,
        components,
        m: iff.m,
        d: iff.d,
        md: iff.md,
        dim: iff.dim,
        condition_i: iff.condition_i,
        condition_ii: iff.condition_ii,
        iff_holds: iff.iff_holds,
        predicted_dim,
        commutation_on_u_tilde: commutation,
        torsion_trivial_on_u_tilde: torsion,
        notes,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::ints;

    #[test]
    fn single_edge_coboundary() {
        let g = Graph::new(2, &[(0, 1)]);
        assert_eq!(g.coboundary(), Mat::from_ints(&[[-1, 1]]));
    }

    #[test]
    fn path_has_constant_kernel() {
        let g = Graph::new(3, &[(0, 1), (1, 2)]);
        assert_eq!(g.coboundary().rank(), 2);
        assert_eq!(
            kernel_basis(&g.coboundary()),
            Subspace::from_vectors(3, &[ints(&[1, 1, 1])]).unwrap()
        );
    }

    #[test]
    fn two_triangles_components() {
        let (g, _) = fixtures::two_triangles_swap();
        assert_eq!(kernel_basis(&g.coboundary()).dim(), 2);
        assert_eq!(g.components(), vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert_eq!(
            g.kernel_indicators(),
            vec![ints(&[1, 1, 1, 0, 0, 0]), ints(&[0, 0, 0, 1, 1, 1])]
        );
    }

    #[test]
    fn edgeless_graph_has_singleton_components() {
        let g = Graph::new(4, &[]);
        assert_eq!(g.kernel_indicators().len(), 4);
        assert_eq!(g.components(), vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn loops_are_flagged_and_zero() {
        let g = Graph::new(2, &[(0, 0), (0, 1)]);
        assert_eq!(g.validate().unwrap().loops, vec![0]);
        assert!(g.coboundary().row(0).iter().all(Rat::is_zero));
        assert!(!g.is_closed(&ints(&[1, 0])).unwrap());
        assert!(g.is_closed(&ints(&[0, 5])).unwrap());
    }

    #[test]
    fn validation_errors() {
        let g = Graph::new(2, &[(0, 2)]);
        assert!(matches!(
            g.validate(),
            Err(GraphError::DanglingEndpoint { .. })
        ));
        let mut g = Graph::new(2, &[(0, 1), (1, 0)]);
        g.edges[1].id = 0;
        assert_eq!(g.validate(), Err(GraphError::DuplicateEdgeId(0)));
    }

    #[test]
    fn triangle_circulation_is_not_closed() {
        let g = Graph::new(3, &[(0, 1), (1, 2), (2, 0)]);
        assert!(!g.is_closed(&ints(&[1, 1, 1])).unwrap());
        assert!(g.potential(&ints(&[1, 1, 1])).unwrap().is_none());
    }

    #[test]
    fn tree_cochains_are_closed() {
        let g = Graph::new(4, &[(0, 1), (2, 1), (1, 3)]);
        let w = ints(&[3, -2, 7]);
        let f = g.potential(&w).unwrap().unwrap();
        assert_eq!(g.coboundary().mul_vec(&f).unwrap(), w);
        assert!(f[0].is_zero());
    }

    #[test]
    fn rotation_on_c4() {
        let (g, act) = fixtures::c4_rotation();
        let c = action_checks(&g, &act, DEFAULT_CLOSURE_CAP).unwrap();
        assert_eq!(
            c,
            ActionChecks {
                is_automorphism: true,
                group_order: 4,
                is_free: true,
                is_closed_in_components: true
            }
        );
        let inst = to_instance(&g, &act).unwrap();
        assert!(inst.validate().is_valid());
        assert_eq!(inst.generators[0].g_w.rows(), 4);
    }

    #[test]
    fn swap_on_p2() {
        let (g, act) = fixtures::p2_swap();
        let c = action_checks(&g, &act, DEFAULT_CLOSURE_CAP).unwrap();
        assert!(c.is_free && c.is_closed_in_components);
        assert_eq!(c.group_order, 2);
        let inst = to_instance(&g, &act).unwrap();
        assert_eq!(inst.generators[0].g_w, Mat::from_ints(&[[-1]]));
    }

    #[test]
    fn reflection_on_p3_is_not_free() {
        let g = Graph::new(3, &[(0, 1), (1, 2)]);
        let act = GraphAction {
            generators: vec![vec![2, 1, 0]],
            orders: None,
        };
        assert!(
            !action_checks(&g, &act, DEFAULT_CLOSURE_CAP)
                .unwrap()
                .is_free
        );
    }

    #[test]
    fn identity_action_gives_identity_matrices() {
        let g = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]);
        let act = GraphAction {
            generators: vec![vec![0, 1, 2]],
            orders: None,
        };
        let inst = to_instance(&g, &act).unwrap();
        assert_eq!(inst.generators[0].g_u, Mat::identity(3));
        assert_eq!(inst.generators[0].g_w, Mat::identity(3));
    }

    #[test]
    fn non_automorphism_is_rejected() {
        let g = Graph::new(3, &[(0, 1), (1, 2)]);
        let act = GraphAction {
            generators: vec![vec![1, 0, 2]],
            orders: None,
        };
        assert!(
            !action_checks(&g, &act, DEFAULT_CLOSURE_CAP)
                .unwrap()
                .is_automorphism
        );
        assert_eq!(
            to_instance(&g, &act),
            Err(GraphError::NotAutomorphism { generator: 0 })
        );
        let bad = GraphAction {
            generators: vec![vec![0, 0, 2]],
            orders: None,
        };
        assert!(matches!(
            bad.validate(&g),
            Err(GraphError::NotPermutation { .. })
        ));
    }

    #[test]
    fn closure_cap_is_enforced() {
        let (g, act) = fixtures::c4_rotation();
        assert_eq!(
            action_checks(&g, &act, 3),
            Err(GraphError::ClosureCap { cap: 3 })
        );
    }

    #[test]
    fn parallel_edges_with_mixed_orientation() {
        // Two parallel edges 0→1 and 1→0, swapped by the vertex swap.
        let g = Graph::new(2, &[(0, 1), (1, 0)]);
        let act = GraphAction {
            generators: vec![vec![1, 0]],
            orders: Some(vec![Some(2)]),
        };
        let inst = to_instance(&g, &act).unwrap();
        assert!(inst.validate().is_valid());
    }

    #[test]
    fn graph_reports() {
        for (g, act) in [
            fixtures::k3_s3(),
            fixtures::c4_rotation(),
            fixtures::p2_swap(),
            fixtures::c6_rotation(),
        ] {
            let r = analyze_graph_action(&g, &act).unwrap();
            assert_eq!(r.dim, 0);
            assert!(r.consistent, "{r:?}");
        }
        let (g, act) = fixtures::two_triangles_swap();
        let r = analyze_graph_action(&g, &act).unwrap();
        assert!(!r.condition_i);
        assert!(r.dim < r.md);
        assert!(r.consistent);

        let g = Graph::new(4, &[(0, 1), (2, 3)]);
        let act = GraphAction {
            generators: vec![vec![2, 3, 0, 1]],
            orders: Some(vec![Some(2)]),
        };
        let r = analyze_graph_action(&g, &act).unwrap();
        assert!(!r.condition_i && r.dim < r.md && r.consistent);
    }
}
