//! Equivariant linear instances `π : U → W` with a finitely generated group
//! acting on both sides.
//!
//! A [`LinearInstance`] is raw input. [`LinearInstance::validate`] checks
//! invertibility, equivariance and declared orders, and only a
//! [`ValidInstance`] exposes the analysis operations.

use serde::{Deserialize, Serialize};

use crate::linalg::{kernel_basis, solve, LinalgError, Mat, Subspace};
use crate::rational::Rat;

/// One group generator acting on `U` and on `W`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub g_u: Mat,
    pub g_w: Mat,
    /// Declared finite order, if known.
    pub order: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceJson", into = "InstanceJson")]
pub struct LinearInstance {
    pub dim_u: usize,
    pub dim_w: usize,
    pub pi: Mat,
    pub generators: Vec<Generator>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorJson {
    #[serde(rename = "gU")]
    g_u: Vec<Vec<Rat>>,
    #[serde(rename = "gW")]
    g_w: Vec<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceJson {
    #[serde(rename = "dim_U")]
    dim_u: usize,
    #[serde(rename = "dim_W")]
    dim_w: usize,
    pi: Vec<Vec<Rat>>,
    generators: Vec<GeneratorJson>,
}

fn shaped(name: &str, rows: usize, cols: usize, data: &[Vec<Rat>]) -> Result<Mat, String> {
    if data.len() != rows {
        return Err(format!(
            "{name}: expected {rows} rows, found {}",
            data.len()
        ));
    }
    Mat::from_rows(cols, data).map_err(|e| format!("{name}: {e}"))
}

impl TryFrom<InstanceJson> for LinearInstance {
    type Error = String;

    fn try_from(j: InstanceJson) -> Result<Self, String> {
        let pi = shaped("pi", j.dim_w, j.dim_u, &j.pi)?;
        let generators = j
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| {
                Ok(Generator {
                    g_u: shaped(&format!("generators[{i}].gU"), j.dim_u, j.dim_u, &g.g_u)?,
                    g_w: shaped(&format!("generators[{i}].gW"), j.dim_w, j.dim_w, &g.g_w)?,
                    order: g.order,
                })
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(LinearInstance {
            dim_u: j.dim_u,
            dim_w: j.dim_w,
            pi,
            generators,
        })
    }
}

impl From<LinearInstance> for InstanceJson {
    fn from(inst: LinearInstance) -> Self {
        InstanceJson {
            dim_u: inst.dim_u,
            dim_w: inst.dim_w,
            pi: inst.pi.to_rows(),
            generators: inst
                .generators
                .into_iter()
                .map(|g| GeneratorJson {
                    g_u: g.g_u.to_rows(),
                    g_w: g.g_w.to_rows(),
                    order: g.order,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IssueKind {
    NotInvertibleOnU,
    NotInvertibleOnW,
    NotEquivariant,
    ZeroOrder,
    OrderMismatch { order: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationIssue {
    pub generator: usize,
    #[serde(flatten)]
    pub kind: IssueKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("invalid instance: {} issue(s)", issues.len())]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("precondition not met: {0}")]
    Precondition(&'static str),
    #[error("supplied vectors are not a basis of ker π")]
    NotKernelBasis,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecomposeError {
    #[error("target has length {found}, expected {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("target is not in the image of π")]
    NotInImage,
    #[error("target is not invariant under the group")]
    NotInvariant,
    #[error("u_(j,k) family does not satisfy (g_i - id) u_(j,k) = δ_ij u_k")]
    BadUjk,
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

impl DecomposeError {
    pub fn code(&self) -> &'static str {
        match self {
            DecomposeError::WrongLength { .. } => "wrong_length",
            DecomposeError::NotInImage => "not_in_image",
            DecomposeError::NotInvariant => "not_invariant",
            DecomposeError::BadUjk => "bad_ujk",
            DecomposeError::Instance(InstanceError::NotKernelBasis) => "not_kernel_basis",
            DecomposeError::Instance(_) => "precondition",
        }
    }
}

impl LinearInstance {
    pub fn d(&self) -> usize {
        self.generators.len()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            let mut push = |kind| issues.push(ValidationIssue { generator: i, kind });
            if !g.g_u.is_invertible() {
                push(IssueKind::NotInvertibleOnU);
            }
            if !g.g_w.is_invertible() {
                push(IssueKind::NotInvertibleOnW);
            }
            let lhs = self.pi.mul(&g.g_u).expect("shapes checked at construction");
            let rhs = g.g_w.mul(&self.pi).expect("shapes checked at construction");
            if lhs != rhs {
                push(IssueKind::NotEquivariant);
            }
            match g.order {
                Some(0) => push(IssueKind::ZeroOrder),
                Some(n) => {
                    let fixed_u = g.g_u.pow(n) == Mat::identity(self.dim_u);
                    let fixed_w = g.g_w.pow(n) == Mat::identity(self.dim_w);
                    if !(fixed_u && fixed_w) {
                        push(IssueKind::OrderMismatch { order: n });
                    }
                }
                None => {}
            }
        }
        ValidationReport { issues }
    }

    pub fn into_valid(self) -> Result<ValidInstance, ValidationReport> {
        let report = self.validate();
        if !report.is_valid() {
            return Err(report);
        }
        Ok(ValidInstance::new_unchecked(self))
    }
}

/// The stacked map `u ↦ ((g_1 - id) u, …, (g_d - id) u)` from `U` to `U^d`.
#[derive(Debug, Clone)]
pub struct GbarMap {
    dim_u: usize,
    matrix: Mat,
}

impl GbarMap {
    pub fn new(inst: &LinearInstance) -> GbarMap {
        let id = Mat::identity(inst.dim_u);
        let blocks: Vec<Mat> = inst
            .generators
            .iter()
            .map(|g| g.g_u.sub(&id).expect("square"))
            .collect();
        let refs: Vec<&Mat> = blocks.iter().collect();
        GbarMap {
            dim_u: inst.dim_u,
            matrix: Mat::vstack(inst.dim_u, &refs).expect("block widths agree"),
        }
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn blocks(&self) -> usize {
        self.matrix.rows() / self.dim_u.max(1)
    }

    /// Applies the map, returning the stacked vector of length `d · dim U`.
    pub fn apply(&self, u: &[Rat]) -> Vec<Rat> {
        self.matrix.mul_vec(u).expect("vector in U")
    }

    /// Slot `i` of `ḡ u`.
    pub fn slot(stacked: &[Rat], dim_u: usize, i: usize) -> &[Rat] {
        &stacked[i * dim_u..(i + 1) * dim_u]
    }
}

fn slotted(dim_u: usize, d: usize, slot: usize, v: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); dim_u * d];
    out[slot * dim_u..(slot + 1) * dim_u].clone_from_slice(v);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientDim {
    pub dim: usize,
    /// `π(U) ∩ W^G`
    pub pi_u_invariant: Subspace,
    /// `π(U^G)`
    pub pi_of_u_invariant: Subspace,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IffReport {
    pub m: usize,
    pub d: usize,
    pub md: usize,
    pub dim: usize,
    pub condition_i: bool,
    pub condition_ii: bool,
    pub bound_holds: bool,
    pub iff_holds: bool,
}

impl IffReport {
    pub fn from_parts(
        m: usize,
        d: usize,
        dim: usize,
        condition_i: bool,
        condition_ii: bool,
    ) -> IffReport {
        let md = m * d;
        IffReport {
            m,
            d,
            md,
            dim,
            condition_i,
            condition_ii,
            bound_holds: dim <= md,
            iff_holds: (dim == md) == (condition_i && condition_ii),
        }
    }

    pub fn is_violation(&self) -> bool {
        !(self.bound_holds && self.iff_holds)
    }
}

/// `u_(j,k)` family, indexed `[j][k]`.
pub type Ujk = Vec<Vec<Vec<Rat>>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    /// `a[j][k]`, one row per generator, one column per kernel basis vector.
    pub coefficients: Vec<Vec<Rat>>,
    pub invariant_part: Vec<Rat>,
    pub preimage: Vec<Rat>,
    pub target: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TorsionCheck {
    /// No generator has a declared finite order.
    Vacuous,
    Checked {
        generators: Vec<usize>,
        holds: bool,
    },
}

/// An instance that passed [`LinearInstance::validate`], with cached
/// kernel and fixed-point subspaces.
#[derive(Debug, Clone)]
pub struct ValidInstance {
    inst: LinearInstance,
    kernel: Subspace,
    u_invariant: Subspace,
    w_invariant: Subspace,
    gbar: GbarMap,
}

fn fixed_space(n: usize, mats: impl Iterator<Item = Mat>) -> Subspace {
    let id = Mat::identity(n);
    mats.fold(Subspace::full(n), |acc, g| {
        let k = kernel_basis(&g.sub(&id).expect("square"));
        acc.intersect(&k).expect("same ambient")
    })
}

impl ValidInstance {
    fn new_unchecked(inst: LinearInstance) -> ValidInstance {
        let kernel = kernel_basis(&inst.pi);
        let u_invariant = fixed_space(inst.dim_u, inst.generators.iter().map(|g| g.g_u.clone()));
        let w_invariant = fixed_space(inst.dim_w, inst.generators.iter().map(|g| g.g_w.clone()));
        let gbar = GbarMap::new(&inst);
        ValidInstance {
            inst,
            kernel,
            u_invariant,
            w_invariant,
            gbar,
        }
    }

    pub fn instance(&self) -> &LinearInstance {
        &self.inst
    }

    pub fn m(&self) -> usize {
        self.kernel.dim()
    }

    pub fn d(&self) -> usize {
        self.inst.d()
    }

    pub fn kernel(&self) -> &Subspace {
        &self.kernel
    }

    pub fn gbar(&self) -> &GbarMap {
        &self.gbar
    }

    /// `U^G`, the common fixed space of all generators on `U`.
    pub fn invariant_subspace_u(&self) -> &Subspace {
        &self.u_invariant
    }

    pub fn invariant_subspace_w(&self) -> &Subspace {
        &self.w_invariant
    }

    /// `Ũ = { u : π u ∈ W^G }`
    pub fn u_tilde(&self) -> Subspace {
        Subspace::preimage(&self.inst.pi, &self.w_invariant).expect("shapes agree")
    }

    /// Brute-force `dim π(U)^G / π(U^G)` straight from the subspaces.
    pub fn oracle_quotient_dim(&self) -> QuotientDim {
        let image = Subspace::column_space(&self.inst.pi);
        let pi_u_invariant = image.intersect(&self.w_invariant).expect("ambient W");
        let pi_of_u_invariant = self.u_invariant.image(&self.inst.pi).expect("ambient U");
        let dim = pi_u_invariant
            .quotient_dim(&pi_of_u_invariant)
            .expect("π(U^G) lies in π(U)^G for an equivariant π");
        QuotientDim {
            dim,
            pi_u_invariant,
            pi_of_u_invariant,
        }
    }

    /// `ker π ⊂ U^G`
    pub fn check_condition_i(&self) -> bool {
        self.kernel
            .is_subspace_of(&self.u_invariant)
            .expect("ambient U")
    }

    /// `(ker π)^d ⊂ ḡ(U)`
    pub fn check_condition_ii(&self) -> bool {
        let n = self.inst.dim_u;
        let d = self.d();
        let image = Subspace::column_space(self.gbar.matrix());
        self.kernel.basis_vectors().iter().all(|u| {
            (0..d).all(|slot| {
                image
                    .contains(&slotted(n, d, slot, u))
                    .expect("ambient U^d")
            })
        })
    }

    pub fn verify_iff(&self) -> IffReport {
        self.verify_iff_with(|v| v.check_condition_ii())
    }

    /// Same as [`verify_iff`](Self::verify_iff) with a substitute condition
    /// (ii) check, so the harness can be exercised against a broken checker.
    pub fn verify_iff_with(&self, condition_ii: impl Fn(&ValidInstance) -> bool) -> IffReport {
        let q = self.oracle_quotient_dim();
        IffReport::from_parts(
            self.m(),
            self.d(),
            q.dim,
            self.check_condition_i(),
            condition_ii(self),
        )
    }

    fn check_kernel_basis(&self, basis: &[Vec<Rat>]) -> Result<(), InstanceError> {
        let n = self.inst.dim_u;
        if basis.len() != self.m() || basis.iter().any(|v| v.len() != n) {
            return Err(InstanceError::NotKernelBasis);
        }
        let span = Subspace::from_vectors(n, basis)?;
        if span != self.kernel {
            return Err(InstanceError::NotKernelBasis);
        }
        Ok(())
    }

    /// Solves `(g_i - id) x = δ_ij u_k` for every `(j, k)`.
    ///
    /// `Ok(None)` means some system is inconsistent, i.e. condition (ii)
    /// fails.
    pub fn find_ujk(&self, basis: &[Vec<Rat>]) -> Result<Option<Ujk>, InstanceError> {
        self.check_kernel_basis(basis)?;
        if !self.check_condition_i() {
            return Err(InstanceError::Precondition("condition (i): ker π ⊂ U^G"));
        }
        let (n, d) = (self.inst.dim_u, self.d());
        let mut out = Vec::with_capacity(d);
        for j in 0..d {
            let mut row = Vec::with_capacity(basis.len());
            for u_k in basis {
                match solve(self.gbar.matrix(), &slotted(n, d, j, u_k)) {
                    Some(x) => row.push(x),
                    None => return Ok(None),
                }
            }
            out.push(row);
        }
        Ok(Some(out))
    }

    /// Writes `w = π(Σ a_jk u_jk + u)` with `u ∈ U^G`.
    pub fn decompose(
        &self,
        w: &[Rat],
        ujk: &Ujk,
        basis: &[Vec<Rat>],
    ) -> Result<Decomposition, DecomposeError> {
        let (n, d, m) = (self.inst.dim_u, self.d(), self.m());
        if w.len() != self.inst.dim_w {
            return Err(DecomposeError::WrongLength {
                expected: self.inst.dim_w,
                found: w.len(),
            });
        }
        self.check_kernel_basis(basis)?;
        if !self.check_condition_i() {
            return Err(InstanceError::Precondition("condition (i): ker π ⊂ U^G").into());
        }
        if ujk.len() != d
            || ujk
                .iter()
                .any(|r| r.len() != m || r.iter().any(|v| v.len() != n))
        {
            return Err(DecomposeError::BadUjk);
        }
        let u0 = solve(&self.inst.pi, w).ok_or(DecomposeError::NotInImage)?;
        if !self.w_invariant.contains(w).map_err(InstanceError::from)? {
            return Err(DecomposeError::NotInvariant);
        }

        // ḡ u0 expressed in the family {ḡ u_jk}, flattened with index j*m + k.
        let columns: Vec<Vec<Rat>> = ujk.iter().flatten().map(|x| self.gbar.apply(x)).collect();
        let system = Mat::from_columns(n * d, &columns).map_err(InstanceError::from)?;
        let target = self.gbar.apply(&u0);
        let flat = solve(&system, &target).ok_or(DecomposeError::BadUjk)?;
        let coefficients: Vec<Vec<Rat>> = if m == 0 {
            vec![Vec::new(); d]
        } else {
            flat.chunks(m).map(<[Rat]>::to_vec).collect()
        };

        let mut combo = vec![Rat::zero(); n];
        for (a_row, u_row) in coefficients.iter().zip(ujk) {
            for (a, x) in a_row.iter().zip(u_row) {
                if a.is_zero() {
                    continue;
                }
                for (c, xi) in combo.iter_mut().zip(x) {
                    *c += a * xi;
                }
            }
        }
        let invariant_part: Vec<Rat> = u0.iter().zip(&combo).map(|(a, b)| a - b).collect();
        if !self
            .u_invariant
            .contains(&invariant_part)
            .map_err(InstanceError::from)?
        {
            return Err(DecomposeError::BadUjk);
        }
        let preimage: Vec<Rat> = combo
            .iter()
            .zip(&invariant_part)
            .map(|(a, b)| a + b)
            .collect();
        let reconstructed = self
            .inst
            .pi
            .mul_vec(&preimage)
            .map_err(InstanceError::from)?;
        assert_eq!(
            reconstructed, w,
            "decomposition must reconstruct the target exactly"
        );
        Ok(Decomposition {
            coefficients,
            invariant_part,
            preimage,
            target: w.to_vec(),
        })
    }

    /// Checks that all generator pairs commute on `Ũ` (requires condition (i)).
    pub fn check_commutation(&self) -> Result<bool, InstanceError> {
        if !self.check_condition_i() {
            return Err(InstanceError::Precondition("condition (i): ker π ⊂ U^G"));
        }
        let basis = self.u_tilde().basis_vectors();
        let gens = &self.inst.generators;
        for (i, gi) in gens.iter().enumerate() {
            for gj in &gens[i + 1..] {
                for u in &basis {
                    let a = gi.g_u.mul_vec(&gj.g_u.mul_vec(u)?)?;
                    let b = gj.g_u.mul_vec(&gi.g_u.mul_vec(u)?)?;
                    if a != b {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Checks that every declared finite-order generator fixes `Ũ` pointwise
    /// (requires condition (i)).
    pub fn check_torsion_trivial(&self) -> Result<TorsionCheck, InstanceError> {
        if !self.check_condition_i() {
            return Err(InstanceError::Precondition("condition (i): ker π ⊂ U^G"));
        }
        let torsion: Vec<usize> = self
            .inst
            .generators
            .iter()
            .enumerate()
            .filter(|(_, g)| g.order.is_some())
            .map(|(i, _)| i)
            .collect();
        if torsion.is_empty() {
            return Ok(TorsionCheck::Vacuous);
        }
        let basis = self.u_tilde().basis_vectors();
        let mut holds = true;
        for &i in &torsion {
            let g = &self.inst.generators[i].g_u;
            for u in &basis {
                if &g.mul_vec(u)? != u {
                    holds = false;
                }
            }
        }
        Ok(TorsionCheck::Checked {
            generators: torsion,
            holds,
        })
    }
}
