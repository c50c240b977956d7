//! Invariant parts of images of equivariant linear maps.
//!
//! For a linear map `π : U → W` commuting with a group `G = ⟨g_1, …, g_d⟩`,
//! this crate computes `dim π(U)^G / π(U^G)` exactly, checks when it reaches
//! `dim ker π · d`, and writes invariant elements of `π(U)` as
//! `π(Σ a_jk u_jk + u)` with `u` invariant. The same machinery is applied to
//! graph cohomology (`U = C^0`, `W = C^1`, `π` the coboundary) and to
//! `Z^d`-periodic graphs given by voltage assignments.

pub mod fixtures;
pub mod graph;
pub mod instance;
pub mod lattice;
pub mod linalg;
pub mod periodic;
pub mod random;
pub mod rational;
pub mod report;
pub mod verify;

pub use graph::{analyze_graph_action, Graph, GraphAction, GraphReport};
pub use instance::{Decomposition, IffReport, LinearInstance, ValidInstance};
pub use linalg::{kernel_basis, rref, solve, Mat, Subspace};
pub use periodic::{PeriodicDecomposition, PeriodicGraph};
pub use rational::Rat;
