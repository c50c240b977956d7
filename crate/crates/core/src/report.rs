//! Serializable analysis bundles shared by the command line and the browser
//! demo.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::instance::{
    Decomposition, IffReport, InstanceError, LinearInstance, TorsionCheck, ValidInstance,
    ValidationReport,
};
use crate::periodic::{
    summarize, truncation_oracle, PeriodicDecomposition, PeriodicError, PeriodicGraph,
    PeriodicSummary, TruncationReport,
};
use crate::rational::Rat;

pub const FREE_PART_NOTE: &str =
    "generators are taken as declared; that they generate the free part of the abelianization is not certified";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Applicability<T> {
    Value(T),
    NotApplicable(&'static str),
}

impl<T> Applicability<T> {
    fn from_result(r: Result<T, InstanceError>) -> Self {
        match r {
            Ok(v) => Applicability::Value(v),
            Err(_) => Applicability::NotApplicable("not_applicable: condition (i) fails"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceAnalysis {
    pub dim_u: usize,
    pub dim_w: usize,
    #[serde(flatten)]
    pub iff: IffReport,
    pub dim_u_invariant: usize,
    pub dim_w_invariant: usize,
    pub dim_pi_u_invariant: usize,
    pub dim_pi_of_u_invariant: usize,
    pub commutation_on_u_tilde: Applicability<bool>,
    pub torsion: Applicability<TorsionCheck>,
    pub ujk_found: Applicability<bool>,
    /// Decomposition of the first basis vector of `π(U)^G`, when the
    /// equality case holds and the space is nonzero.
    pub sample_decomposition: Option<Decomposition>,
    pub notes: Vec<&'static str>,
}

pub fn analyze_instance(inst: &LinearInstance) -> Result<InstanceAnalysis, ValidationReport> {
    let valid: ValidInstance = inst.clone().into_valid()?;
    let iff = valid.verify_iff();
    let q = valid.oracle_quotient_dim();
    let basis = valid.kernel().basis_vectors();
    let ujk = valid.find_ujk(&basis);
    let sample_decomposition = match (&ujk, q.pi_u_invariant.basis_vectors().first()) {
        (Ok(Some(u)), Some(w)) => Some(
            valid
                .decompose(w, u, &basis)
                .expect("w is an invariant image vector"),
        ),
        _ => None,
    };
    Ok(InstanceAnalysis {
        dim_u: inst.dim_u,
        dim_w: inst.dim_w,
        iff,
        dim_u_invariant: valid.invariant_subspace_u().dim(),
        dim_w_invariant: valid.invariant_subspace_w().dim(),
        dim_pi_u_invariant: q.pi_u_invariant.dim(),
        dim_pi_of_u_invariant: q.pi_of_u_invariant.dim(),
        commutation_on_u_tilde: Applicability::from_result(valid.check_commutation()),
        torsion: Applicability::from_result(valid.check_torsion_trivial()),
        ujk_found: Applicability::from_result(ujk.map(|u| u.is_some())),
        sample_decomposition,
        notes: vec![FREE_PART_NOTE],
    })
}

impl InstanceAnalysis {
    /// Named pass/fail assertions on the analysis.
    pub fn assertions(&self) -> Vec<(&'static str, bool)> {
        let mut out = vec![
            ("bound dim <= m*d", self.iff.bound_holds),
            ("dim = m*d iff (i) and (ii)", self.iff.iff_holds),
        ];
        if let Applicability::Value(c) = self.commutation_on_u_tilde {
            out.push(("generators commute on U~", c));
        }
        if let Applicability::Value(TorsionCheck::Checked { holds, .. }) = self.torsion {
            out.push(("finite-order generators fix U~", holds));
        }
        if let Applicability::Value(found) = self.ujk_found {
            out.push(("u_jk exist iff (ii)", found == self.iff.condition_ii));
        }
        out
    }
}

/// A 1-cochain on stored edges, given either positionally or keyed by edge id.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum EdgeCochain {
    Positional(Vec<Rat>),
    Keyed(BTreeMap<String, Rat>),
}

impl EdgeCochain {
    pub fn resolve(self, g: &Graph) -> Result<Vec<Rat>, String> {
        match self {
            EdgeCochain::Positional(v) => {
                if v.len() != g.n_edges() {
                    return Err(format!(
                        "1-cochain has {} entries, expected {}",
                        v.len(),
                        g.n_edges()
                    ));
                }
                Ok(v)
            }
            EdgeCochain::Keyed(raw) => {
                let mut map = BTreeMap::new();
                for (k, v) in raw {
                    let id: u64 = k
                        .parse()
                        .map_err(|_| format!("edge key `{k}` is not an edge id"))?;
                    map.insert(id, v);
                }
                let out = g
                    .edges
                    .iter()
                    .map(|e| {
                        map.remove(&e.id)
                            .ok_or_else(|| format!("no value for edge {}", e.id))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if let Some(id) = map.keys().next() {
                    return Err(format!("value given for unknown edge {id}"));
                }
                Ok(out)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodicAnalysis {
    pub summary: PeriodicSummary,
    pub invariant_closed: bool,
    pub decomposition: PeriodicDecomposition,
    pub reconstruction_exact: bool,
    pub truncation: TruncationReport,
}

/// Structural summary, closedness checks, decomposition and the finite
/// window cross-check.
pub fn analyze_periodic(
    pg: &PeriodicGraph,
    w: &[Rat],
    radius: u32,
) -> Result<PeriodicAnalysis, PeriodicError> {
    let summary = summarize(pg)?;
    let invariant_closed = pg.is_invariant_closed(w)?;
    let decomposition = pg.decompose(w)?;
    let reconstruction_exact = pg.reconstruct(&decomposition.a, &decomposition.f) == w;
    let truncation = truncation_oracle(pg, w, &decomposition, radius)?;
    Ok(PeriodicAnalysis {
        summary,
        invariant_closed,
        decomposition,
        reconstruction_exact,
        truncation,
    })
}
