//! `Z^d`-periodic graphs given by a finite quotient graph with integer
//! voltages on its edges.
//!
//! The lift has vertices `(v, b)` for `v` in the quotient and `b ∈ Z^d`, and
//! an edge `(v, b) → (v', b + t(e))` for every quotient edge `e : v → v'`.
//! Translations by `Z^d` act freely on it. All computation happens on the
//! quotient; only [`truncation_oracle`] looks at a finite window of the lift.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::graph::{Graph, GraphError, SpanningForest};
use crate::lattice::{det, Hnf, LatticeError, LatticeSummary};
use crate::linalg::Mat;
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PeriodicGraphJson", into = "PeriodicGraphJson")]
pub struct PeriodicGraph {
    pub d: usize,
    pub quotient: Graph,
    /// Voltage of each stored edge, in storage order.
    pub voltages: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct PeriodicGraphJson {
    #[serde(flatten)]
    quotient: Graph,
    d: usize,
    voltages: BTreeMap<u64, Vec<i64>>,
}

impl TryFrom<PeriodicGraphJson> for PeriodicGraph {
    type Error = PeriodicError;

    fn try_from(j: PeriodicGraphJson) -> Result<Self, PeriodicError> {
        let mut voltages = Vec::with_capacity(j.quotient.edges.len());
        for e in &j.quotient.edges {
            let v = j
                .voltages
                .get(&e.id)
                .ok_or(PeriodicError::MissingVoltage(e.id))?;
            voltages.push(v.clone());
        }
        if let Some(&id) = j
            .voltages
            .keys()
            .find(|id| j.quotient.edge_index(**id).is_none())
        {
            return Err(PeriodicError::UnknownVoltage(id));
        }
        let pg = PeriodicGraph {
            d: j.d,
            quotient: j.quotient,
            voltages,
        };
        pg.validate()?;
        Ok(pg)
    }
}

impl From<PeriodicGraph> for PeriodicGraphJson {
    fn from(pg: PeriodicGraph) -> Self {
        let voltages = pg
            .quotient
            .edges
            .iter()
            .zip(pg.voltages)
            .map(|(e, v)| (e.id, v))
            .collect();
        PeriodicGraphJson {
            quotient: pg.quotient,
            d: pg.d,
            voltages,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PeriodicError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("no voltage given for edge {0}")]
    MissingVoltage(u64),
    #[error("voltage given for unknown edge {0}")]
    UnknownVoltage(u64),
    #[error("voltage of edge {id} has {found} entries, expected {expected}")]
    VoltageLength {
        id: u64,
        expected: usize,
        found: usize,
    },
    #[error("1-cochain has {found} entries, expected {expected}")]
    CochainLength { expected: usize, found: usize },
    #[error("period lattice not full: {}", describe_lattice(*rank, *d, *index))]
    NotClosedAction {
        component: usize,
        rank: usize,
        d: usize,
        index: Option<u64>,
    },
    #[error("1-form is not closed on the lift: nonzero sum on a zero-voltage cycle in component {component}")]
    NotInvariantClosed { component: usize },
    #[error("generating set is not a basis of Z^d")]
    NotUnimodular,
    #[error("truncation check failed on edge {edge_id} at cell {cell:?}")]
    TruncationMismatch { edge_id: u64, cell: Vec<i64> },
}

fn describe_lattice(rank: usize, d: usize, index: Option<u64>) -> String {
    match index {
        Some(i) if rank == d => format!("index {i} in Z^{d}"),
        _ => format!("rank {rank} of {d}"),
    }
}

impl PeriodicError {
    /// Whether the error is a violated mathematical hypothesis rather than
    /// malformed input.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            PeriodicError::NotClosedAction { .. } | PeriodicError::NotInvariantClosed { .. }
        )
    }
}

/// A quotient cycle: a non-tree edge closed up through the spanning tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FundamentalCycle {
    /// Stored index of the closing non-tree edge.
    pub edge: usize,
    pub component: usize,
    /// Signed edge multiplicities of the closed walk.
    pub incidence: Vec<i64>,
    pub voltage: Vec<i64>,
}

/// Fundamental cycles of the quotient and their voltages.
#[derive(Debug, Clone)]
pub struct CycleData {
    pub forest: SpanningForest,
    pub cycles: Vec<FundamentalCycle>,
}

impl CycleData {
    fn cycles_in(&self, component: usize) -> impl Iterator<Item = &FundamentalCycle> {
        self.cycles.iter().filter(move |c| c.component == component)
    }

    pub fn n_components(&self) -> usize {
        self.forest.components.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodLattice {
    pub component: usize,
    pub hnf: Hnf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftComponents {
    Finite(u64),
    Infinite,
}

impl Serialize for LiftComponents {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            LiftComponents::Finite(n) => s.serialize_u64(*n),
            LiftComponents::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl fmt::Display for LiftComponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftComponents::Finite(n) => write!(f, "{n}"),
            LiftComponents::Infinite => f.write_str("infinite"),
        }
    }
}

fn dot(a: &[i64], w: &[Rat]) -> Rat {
    a.iter()
        .zip(w)
        .filter(|(c, _)| **c != 0)
        .map(|(&c, x)| Rat::from_int(c) * x)
        .sum()
}

fn unit(d: usize, j: usize) -> Vec<i64> {
    let mut e = vec![0; d];
    e[j] = 1;
    e
}

impl PeriodicGraph {
    pub fn new(
        d: usize,
        quotient: Graph,
        voltages: Vec<Vec<i64>>,
    ) -> Result<PeriodicGraph, PeriodicError> {
        let pg = PeriodicGraph {
            d,
            quotient,
            voltages,
        };
        pg.validate()?;
        Ok(pg)
    }

    /// One vertex with `d` loops carrying the standard basis voltages.
    pub fn torus(d: usize) -> PeriodicGraph {
        let quotient = Graph::new(1, &vec![(0, 0); d]);
        let voltages = (0..d).map(|j| unit(d, j)).collect();
        PeriodicGraph {
            d,
            quotient,
            voltages,
        }
    }

    pub fn validate(&self) -> Result<(), PeriodicError> {
        self.quotient.validate()?;
        if self.voltages.len() != self.quotient.n_edges() {
            return Err(PeriodicError::CochainLength {
                expected: self.quotient.n_edges(),
                found: self.voltages.len(),
            });
        }
        for (e, v) in self.quotient.edges.iter().zip(&self.voltages) {
            if v.len() != self.d {
                return Err(PeriodicError::VoltageLength {
                    id: e.id,
                    expected: self.d,
                    found: v.len(),
                });
            }
        }
        Ok(())
    }

    fn check_cochain(&self, w: &[Rat]) -> Result<(), PeriodicError> {
        if w.len() != self.quotient.n_edges() {
            return Err(PeriodicError::CochainLength {
                expected: self.quotient.n_edges(),
                found: w.len(),
            });
        }
        Ok(())
    }

    pub fn cycle_data(&self) -> CycleData {
        let forest = self.quotient.spanning_forest();
        let n_edges = self.quotient.n_edges();
        // tree path from the root to each vertex, as signed edge multiplicities
        let mut paths: Vec<Vec<i64>> = vec![vec![0; n_edges]; self.quotient.n_vertices];
        for &v in &forest.order {
            if let Some((p, ei, dir)) = forest.parent[v] {
                let mut path = paths[p].clone();
                path[ei] += dir as i64;
                paths[v] = path;
            }
        }
        let cycles = self
            .quotient
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !forest.tree_edge[*i])
            .map(|(i, e)| {
                let incidence: Vec<i64> = (0..n_edges)
                    .map(|x| paths[e.o][x] - paths[e.t][x] + i64::from(x == i))
                    .collect();
                let voltage = (0..self.d)
                    .map(|j| {
                        incidence
                            .iter()
                            .zip(&self.voltages)
                            .map(|(c, t)| c * t[j])
                            .sum()
                    })
                    .collect();
                FundamentalCycle {
                    edge: i,
                    component: forest.component_of[e.o],
                    incidence,
                    voltage,
                }
            })
            .collect();
        CycleData { forest, cycles }
    }

    pub fn period_lattices(&self) -> Result<Vec<PeriodLattice>, PeriodicError> {
        let data = self.cycle_data();
        self.lattices_from(&data)
    }

    fn lattices_from(&self, data: &CycleData) -> Result<Vec<PeriodLattice>, PeriodicError> {
        (0..data.n_components())
            .map(|k| {
                let gens: Vec<Vec<i64>> = data.cycles_in(k).map(|c| c.voltage.clone()).collect();
                Ok(PeriodLattice {
                    component: k,
                    hnf: Hnf::new(self.d, &gens)?,
                })
            })
            .collect()
    }

    /// Every quotient component's period lattice is all of `Z^d`.
    pub fn action_is_closed(&self) -> Result<bool, PeriodicError> {
        Ok(self
            .period_lattices()?
            .iter()
            .all(|l| l.hnf.is_unimodular()))
    }

    /// Number of lift components over each quotient component.
    pub fn lift_component_count(&self) -> Result<Vec<LiftComponents>, PeriodicError> {
        Ok(self
            .period_lattices()?
            .iter()
            .map(|l| match l.hnf.index() {
                Some(i) => LiftComponents::Finite(i),
                None => LiftComponents::Infinite,
            })
            .collect())
    }

    fn cycle_sums(data: &CycleData, w: &[Rat]) -> Vec<Rat> {
        data.cycles.iter().map(|c| dot(&c.incidence, w)).collect()
    }

    fn first_open_component(
        &self,
        data: &CycleData,
        lattices: &[PeriodLattice],
        w: &[Rat],
    ) -> Option<usize> {
        let sums = Self::cycle_sums(data, w);
        for l in lattices {
            let local: Vec<&Rat> = data
                .cycles
                .iter()
                .zip(&sums)
                .filter(|(c, _)| c.component == l.component)
                .map(|(_, s)| s)
                .collect();
            for rel in l.hnf.relations() {
                let total: Rat = rel
                    .iter()
                    .zip(&local)
                    .filter(|(c, _)| **c != 0)
                    .map(|(&c, s)| Rat::from_int(c) * *s)
                    .sum();
                if !total.is_zero() {
                    return Some(l.component);
                }
            }
        }
        None
    }

    /// Whether `w`, read as a translation-invariant 1-form on the lift, is
    /// closed there: it must vanish on every quotient cycle combination of
    /// total voltage zero inside one component.
    pub fn is_invariant_closed(&self, w: &[Rat]) -> Result<bool, PeriodicError> {
        self.check_cochain(w)?;
        let data = self.cycle_data();
        let lattices = self.lattices_from(&data)?;
        Ok(self.first_open_component(&data, &lattices, w).is_none())
    }

    fn require_closed(&self, lattices: &[PeriodLattice]) -> Result<(), PeriodicError> {
        match lattices.iter().find(|l| !l.hnf.is_unimodular()) {
            Some(l) => Err(PeriodicError::NotClosedAction {
                component: l.component,
                rank: l.hnf.rank(),
                d: self.d,
                index: l.hnf.index(),
            }),
            None => Ok(()),
        }
    }

    /// Period coefficients `a[j][k]` for an arbitrary basis of `Z^d` (rows of
    /// `generators`), read directly as cycle sums along cycles of those
    /// voltages. Returns the coefficients and how many were cross-checked
    /// against a second cycle.
    fn periods(
        &self,
        data: &CycleData,
        lattices: &[PeriodLattice],
        w: &[Rat],
        generators: &[Vec<i64>],
    ) -> (Vec<Vec<Rat>>, usize) {
        let sums = Self::cycle_sums(data, w);
        let m = data.n_components();
        let mut a = vec![vec![Rat::zero(); m]; generators.len()];
        let mut cross_checks = 0;
        for l in lattices {
            let local: Vec<&Rat> = data
                .cycles
                .iter()
                .zip(&sums)
                .filter(|(c, _)| c.component == l.component)
                .map(|(_, s)| s)
                .collect();
            let along = |x: &[i64]| -> Rat {
                x.iter()
                    .zip(&local)
                    .filter(|(c, _)| **c != 0)
                    .map(|(&c, s)| Rat::from_int(c) * *s)
                    .sum()
            };
            for (j, g) in generators.iter().enumerate() {
                let x = l
                    .hnf
                    .express(g)
                    .expect("unimodular lattice contains every vector");
                let value = along(&x);
                if let Some(rel) = l.hnf.relations().first() {
                    let alt: Vec<i64> = x.iter().zip(rel).map(|(p, q)| p + q).collect();
                    assert_eq!(
                        along(&alt),
                        value,
                        "period must not depend on the chosen cycle"
                    );
                    cross_checks += 1;
                }
                a[j][l.component] = value;
            }
        }
        (a, cross_checks)
    }

    /// Splits a closed invariant 1-form into period coefficients and a
    /// periodic potential.
    pub fn decompose(&self, w: &[Rat]) -> Result<PeriodicDecomposition, PeriodicError> {
        self.check_cochain(w)?;
        let data = self.cycle_data();
        let lattices = self.lattices_from(&data)?;
        self.require_closed(&lattices)?;
        if let Some(component) = self.first_open_component(&data, &lattices, w) {
            return Err(PeriodicError::NotInvariantClosed { component });
        }
        let basis: Vec<Vec<i64>> = (0..self.d).map(|j| unit(self.d, j)).collect();
        let (a, cross_checks) = self.periods(&data, &lattices, w, &basis);

        let comp = &data.forest.component_of;
        let residual: Vec<Rat> = self
            .quotient
            .edges
            .iter()
            .zip(w)
            .zip(&self.voltages)
            .map(|((e, we), t)| {
                let k = comp[e.o];
                let shift: Rat = (0..self.d).map(|j| &a[j][k] * Rat::from_int(t[j])).sum();
                we - shift
            })
            .collect();
        let f = self
            .quotient
            .potential(&residual)?
            .expect("residual of a closed invariant form is exact on the quotient");
        let dec = PeriodicDecomposition {
            a,
            f,
            certificate: Certificate {
                closed: true,
                lattices: lattices.iter().map(|l| l.hnf.rows().to_vec()).collect(),
                cross_checks,
            },
        };
        assert_eq!(
            self.reconstruct(&dec.a, &dec.f),
            w,
            "reconstruction must be exact"
        );
        Ok(dec)
    }

    /// Period coefficients for the generating set given by the rows of
    /// `generators`, which must form a basis of `Z^d`.
    pub fn periods_for_generators(
        &self,
        w: &[Rat],
        generators: &[Vec<i64>],
    ) -> Result<Vec<Vec<Rat>>, PeriodicError> {
        self.check_cochain(w)?;
        check_unimodular(self.d, generators)?;
        let data = self.cycle_data();
        let lattices = self.lattices_from(&data)?;
        self.require_closed(&lattices)?;
        if let Some(component) = self.first_open_component(&data, &lattices, w) {
            return Err(PeriodicError::NotInvariantClosed { component });
        }
        Ok(self.periods(&data, &lattices, w, generators).0)
    }

    /// `w(e) = f(t e) - f(o e) + Σ_j a[j][k] t(e)_j` for `e` in component `k`.
    pub fn reconstruct(&self, a: &[Vec<Rat>], f: &[Rat]) -> Vec<Rat> {
        let comp = self.quotient.component_of();
        self.quotient
            .edges
            .iter()
            .zip(&self.voltages)
            .map(|(e, t)| {
                let k = comp[e.o];
                let shift: Rat = (0..self.d).map(|j| &a[j][k] * Rat::from_int(t[j])).sum();
                &f[e.t] - &f[e.o] + shift
            })
            .collect()
    }

    /// Number of period generators `e ↦ t(e)_j · 1[e ∈ component k]` that are
    /// independent modulo exact forms on the quotient.
    pub fn period_generator_rank(&self) -> usize {
        let cob = self.quotient.coboundary();
        let comp = self.quotient.component_of();
        let m = self.quotient.components().len();
        let n_edges = self.quotient.n_edges();
        let mut columns = Vec::new();
        for j in 0..self.d {
            for k in 0..m {
                columns.push(
                    self.quotient
                        .edges
                        .iter()
                        .zip(&self.voltages)
                        .map(|(e, t)| {
                            if comp[e.o] == k {
                                Rat::from_int(t[j])
                            } else {
                                Rat::zero()
                            }
                        })
                        .collect::<Vec<_>>(),
                );
            }
        }
        let gens = Mat::from_columns(n_edges, &columns).expect("edge-length columns");
        let both = Mat::hstack(n_edges, &[&cob, &gens]).expect("same row count");
        both.rank() - cob.rank()
    }

    /// `dim { closed invariant forms } - dim { exact invariant forms }`.
    pub fn closed_modulo_exact_dim(&self) -> Result<usize, PeriodicError> {
        let data = self.cycle_data();
        let lattices = self.lattices_from(&data)?;
        let n_edges = self.quotient.n_edges();
        // closed forms are the kernel of the relation functionals
        let mut rows = Vec::new();
        for l in &lattices {
            let local: Vec<&FundamentalCycle> = data.cycles_in(l.component).collect();
            for rel in l.hnf.relations() {
                let mut functional = vec![0i64; n_edges];
                for (c, cyc) in rel.iter().zip(&local) {
                    for (f, x) in functional.iter_mut().zip(&cyc.incidence) {
                        *f += c * x;
                    }
                }
                rows.push(
                    functional
                        .into_iter()
                        .map(Rat::from_int)
                        .collect::<Vec<_>>(),
                );
            }
        }
        let constraints = Mat::from_rows(n_edges, &rows).expect("edge-length rows");
        let closed_dim = n_edges - constraints.rank();
        Ok(closed_dim - self.quotient.coboundary().rank())
    }
}

fn check_unimodular(d: usize, generators: &[Vec<i64>]) -> Result<(), PeriodicError> {
    if generators.len() != d || generators.iter().any(|g| g.len() != d) {
        return Err(PeriodicError::NotUnimodular);
    }
    match det(generators) {
        Some(1) | Some(-1) => Ok(()),
        _ => Err(PeriodicError::NotUnimodular),
    }
}

/// Coefficients with respect to the generating set whose rows are
/// `generators`, from coefficients with respect to the standard basis:
/// `a' = B a`. Lift coordinates transform by the inverse transpose.
pub fn transform_coefficients(a: &[Vec<Rat>], generators: &[Vec<i64>]) -> Vec<Vec<Rat>> {
    let m = a.first().map_or(0, Vec::len);
    generators
        .iter()
        .map(|g| {
            (0..m)
                .map(|k| {
                    g.iter()
                        .zip(a)
                        .map(|(&b, row)| Rat::from_int(b) * &row[k])
                        .sum()
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub closed: bool,
    /// HNF of each component's period lattice.
    pub lattices: Vec<Vec<Vec<i64>>>,
    /// Number of coefficients confirmed along a second cycle.
    pub cross_checks: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodicDecomposition {
    /// `a[j][k]`: generator `j`, quotient component `k`.
    pub a: Vec<Vec<Rat>>,
    pub f: Vec<Rat>,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruncationReport {
    pub radius: u32,
    pub cells: usize,
    pub checks: usize,
    pub mismatches: usize,
}

/// Lifted potential `F(v, b) = f(v) + Σ_j a[j][k(v)] b_j`.
pub fn lifted_potential(
    a: &[Vec<Rat>],
    f: &[Rat],
    component: usize,
    v: usize,
    cell: &[i64],
) -> Rat {
    let periodic: Rat = cell
        .iter()
        .enumerate()
        .map(|(j, &b)| &a[j][component] * Rat::from_int(b))
        .sum();
    &f[v] + periodic
}

/// All cells of `[-radius, radius]^d` in lexicographic order.
pub fn window(d: usize, radius: u32) -> Vec<Vec<i64>> {
    let r = radius as i64;
    let mut cells = vec![Vec::new()];
    for _ in 0..d {
        cells = cells
            .into_iter()
            .flat_map(|c| {
                (-r..=r).map(move |x| {
                    let mut next = c.clone();
                    next.push(x);
                    next
                })
            })
            .collect();
    }
    cells
}

/// Checks `w(e) = F(t e) - F(o e)` on every lift edge leaving the window
/// `[-radius, radius]^d`.
pub fn truncation_oracle(
    pg: &PeriodicGraph,
    w: &[Rat],
    dec: &PeriodicDecomposition,
    radius: u32,
) -> Result<TruncationReport, PeriodicError> {
    pg.check_cochain(w)?;
    let comp = pg.quotient.component_of();
    let cells = window(pg.d, radius);
    let mut checks = 0;
    for cell in &cells {
        for ((e, t), we) in pg.quotient.edges.iter().zip(&pg.voltages).zip(w) {
            let k = comp[e.o];
            let target: Vec<i64> = cell.iter().zip(t).map(|(b, s)| b + s).collect();
            let diff = lifted_potential(&dec.a, &dec.f, k, e.t, &target)
                - lifted_potential(&dec.a, &dec.f, k, e.o, cell);
            if &diff != we {
                return Err(PeriodicError::TruncationMismatch {
                    edge_id: e.id,
                    cell: cell.clone(),
                });
            }
            checks += 1;
        }
    }
    Ok(TruncationReport {
        radius,
        cells: cells.len(),
        checks,
        mismatches: 0,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodicSummary {
    pub d: usize,
    pub quotient_components: usize,
    pub lattices: Vec<LatticeSummary>,
    pub lift_components: Vec<LiftComponents>,
    pub action_closed: bool,
    pub action_free: bool,
    pub period_generator_rank: usize,
    pub closed_modulo_exact_dim: usize,
}

pub fn summarize(pg: &PeriodicGraph) -> Result<PeriodicSummary, PeriodicError> {
    let lattices = pg.period_lattices()?;
    Ok(PeriodicSummary {
        d: pg.d,
        quotient_components: lattices.len(),
        lattices: lattices
            .iter()
            .map(|l| LatticeSummary::from(&l.hnf))
            .collect(),
        lift_components: pg.lift_component_count()?,
        action_closed: lattices.iter().all(|l| l.hnf.is_unimodular()),
        action_free: true,
        period_generator_rank: pg.period_generator_rank(),
        closed_modulo_exact_dim: pg.closed_modulo_exact_dim()?,
    })
}
