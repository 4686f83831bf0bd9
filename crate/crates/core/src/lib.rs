//! Real structured controllability, stabilizability, and stability radii of
//! affinely parameterized linear systems.
//!
//! The radius problems minimize the norm of a structured perturbation
//! `Gamma(theta)` subject to a rank deficiency of a real pencil `Z(theta,
//! mu, lambda)`.  The rank constraint is relaxed with a regularized
//! truncated nuclear norm and solved as a sequence of semidefinite programs
//! (a difference-of-convex / majorization-minimization scheme).  Exact
//! feasibility is NP-hard, so the crate also ships verification oracles and
//! subset-sum reduction generators for adversarial testing.

pub mod affine;
pub mod conic;
pub mod error;
pub mod hardness;
pub mod oracle;
pub mod realify;
pub mod solver;
pub mod tnn;

pub use affine::{radius_of, AffineFamily, NormKind, StructureForm, StructureMap};
pub use error::{Error, Result};
pub use realify::{build_pencil, realify, PencilKind, PencilStructure};
pub use solver::{
    multi_start, Certificate, GammaPolicy, InitPoint, IterateState, MultiStartReport,
    RadiusProblem, RadiusResult, RunStatus, SolverConfig, Stage, TracePoint, TrialRecord,
};
pub use tnn::{ky_fan, linearized_term, nuclear, sigma_min, svd_partition, tnnr, SvdPartition};
