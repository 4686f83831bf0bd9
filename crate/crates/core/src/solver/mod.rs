//! The rank-relaxation radius solvers.
//!
//! All three radius problems share one majorization-minimization loop over
//! the relaxed objective `F(Z) = g(theta) + gamma * (||Z||_* -
//! ||Z||_{F_{2n-1}})`: at each iterate the Ky Fan term is linearized at the
//! current pencil and the resulting convex program is solved exactly.  The
//! two-stage variants first run the same loop on the pure truncated-nuclear-
//! norm objective to land near a rank-deficient pencil, then weight `g`
//! against the rank term with `gamma` picked from the first-stage value so
//! the final pencil satisfies `sigma_{2n}(Z*) <= epsilon` whenever the first
//! stage found a feasible point.

mod multistart;
mod runner;
mod verify;

pub use multistart::{multi_start, MultiStartReport, RadiusCluster, TrialRecord};
pub use runner::FeasibilityStage;
pub use verify::Certificate;

use nalgebra::DMatrix;

use crate::affine::{AffineFamily, NormKind, StructureMap};
use crate::conic::SolverSettings;
use crate::error::{Error, Result};
use crate::realify::{PencilKind, PencilStructure};

/// How the regularization weight for the second stage is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaPolicy {
    /// A fixed weight, independent of the starting point.
    Fixed(f64),
    /// `min(cap, g(theta_0) / epsilon)`: the tolerance-guaranteeing weight,
    /// capped to keep the subproblems well conditioned.
    Capped { cap: f64 },
    /// `g(theta_0) / epsilon` with no cap; this is the choice under which
    /// the `sigma <= epsilon` guarantee holds from a feasible first stage.
    Uncapped,
}

impl GammaPolicy {
    /// Evaluates the weight at a first-stage objective value `g0`.  `g0` is
    /// floored at `epsilon` so a zero-cost feasible start still produces a
    /// positive weight (the tolerance guarantee survives the floor).
    pub fn value(self, g0: f64, epsilon: f64) -> f64 {
        match self {
            GammaPolicy::Fixed(v) => v,
            GammaPolicy::Capped { cap } => cap.min(g0.max(epsilon) / epsilon),
            GammaPolicy::Uncapped => g0.max(epsilon) / epsilon,
        }
    }
}

/// Tunables of the iterative solvers.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Target tolerance on `sigma_{2n}(Z*)`.
    pub epsilon: f64,
    /// Convergence threshold on `|F(Z_k) - F(Z_{k-1})|`.
    pub xi: f64,
    /// Iteration cap per stage.
    pub max_iter: usize,
    /// Second-stage regularization policy.
    pub gamma: GammaPolicy,
    /// Run the feasibility stage before the weighted stage.
    pub two_stage: bool,
    /// Uniform initialization range for the parameter entries.
    pub theta_init: (f64, f64),
    /// Uniform initialization range for `lambda`.
    pub lambda_init: (f64, f64),
    /// Uniform initialization range for `mu` (clipped to be nonnegative
    /// for stabilizability starts).
    pub mu_init: (f64, f64),
    /// Master seed; trial `i` of a multi-start uses stream `i` of this seed.
    pub seed: u64,
    /// Interior-point settings for the subproblems.
    pub conic: SolverSettings,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-4,
            xi: 1e-5,
            max_iter: 600,
            gamma: GammaPolicy::Capped { cap: 5.0 },
            two_stage: true,
            theta_init: (0.0, 1.0),
            lambda_init: (-2.0, 2.0),
            mu_init: (-2.0, 2.0),
            seed: 0,
            conic: SolverSettings::default(),
        }
    }
}

/// Which loop a trace point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Feasibility,
    Weighted,
}

impl Stage {
    pub fn label(self) -> &'static str {
        match self {
            Stage::Feasibility => "feasibility",
            Stage::Weighted => "weighted",
        }
    }
}

/// One point of the convergence trace.
#[derive(Debug, Clone)]
pub struct TracePoint {
    pub stage: Stage,
    pub iteration: usize,
    pub f_value: f64,
    pub sigma_min: f64,
}

/// The solver state after an iteration: the decision variables, the pencil,
/// and the relaxed objective value.
#[derive(Debug, Clone)]
pub struct IterateState {
    pub theta: Vec<f64>,
    pub lambda: f64,
    pub mu: Option<f64>,
    pub z: DMatrix<f64>,
    pub f_value: f64,
    pub sigma_min: f64,
    pub iteration: usize,
}

/// Why a run stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunStatus {
    /// `|dF| <= xi` and `sigma_{2n}(Z*) <= epsilon`.
    ToleranceMet,
    /// `|dF| <= xi` but the pencil is not rank deficient to `epsilon`.
    Converged,
    /// The iteration cap was reached.
    MaxIter,
    /// A subproblem solve failed; the result carries the last good iterate.
    SolverFailure(String),
}

impl RunStatus {
    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::ToleranceMet => "tolerance-met",
            RunStatus::Converged => "converged",
            RunStatus::MaxIter => "max-iter",
            RunStatus::SolverFailure(_) => "solver-failure",
        }
    }
}

/// Result of one solver run.
#[derive(Debug, Clone)]
pub struct RadiusResult {
    /// Reported radius: `sqrt(g)` for the Frobenius norm, `g` for the
    /// spectral norm.
    pub radius: f64,
    pub g_value: f64,
    pub theta: Vec<f64>,
    pub lambda: f64,
    pub mu: Option<f64>,
    /// `sigma_{2n}` of the final pencil.
    pub sigma_min: f64,
    /// Second-stage regularization weight actually used.
    pub gamma: f64,
    pub stage1_iterations: usize,
    pub stage2_iterations: usize,
    /// `sigma_{2n}` at the first-stage exit, for auditing the tolerance
    /// guarantee's precondition.
    pub stage1_sigma_min: Option<f64>,
    /// Subproblem solves that returned reduced accuracy instead of a full
    /// interior-point optimum.  Zero on a healthy run.
    pub reduced_accuracy_solves: usize,
    pub trace: Vec<TracePoint>,
    pub status: RunStatus,
}

impl RadiusResult {
    pub fn total_iterations(&self) -> usize {
        self.stage1_iterations + self.stage2_iterations
    }
}

/// Starting point selection for a run.
#[derive(Debug, Clone)]
pub enum InitPoint {
    /// Draw `(theta, lambda, mu)` from the configured ranges.
    Random,
    /// Run both stages from an explicit point.
    Explicit {
        theta: Vec<f64>,
        lambda: f64,
        mu: Option<f64>,
    },
    /// Start the weighted stage from a known state (skips stage one).
    Warm(IterateState),
}

/// A fully specified radius problem: the pencil, the structure map, and the
/// norm.  Immutable; safe to share across concurrent trials.
#[derive(Debug, Clone)]
pub struct RadiusProblem {
    pencil: PencilStructure,
    fam_a: AffineFamily,
    fam_b: Option<AffineFamily>,
    map: StructureMap,
    norm: NormKind,
}

impl RadiusProblem {
    pub fn new(
        kind: PencilKind,
        fam_a: AffineFamily,
        fam_b: Option<AffineFamily>,
        map: StructureMap,
        norm: NormKind,
    ) -> Result<Self> {
        if map.param_count() != fam_a.param_count() {
            return Err(Error::Dimension(format!(
                "structure map has {} parameters, family has {}",
                map.param_count(),
                fam_a.param_count()
            )));
        }
        let pencil = PencilStructure::new(kind, &fam_a, fam_b.as_ref())?;
        Ok(Self {
            pencil,
            fam_a,
            fam_b,
            map,
            norm,
        })
    }

    pub fn kind(&self) -> PencilKind {
        self.pencil.kind()
    }

    pub fn norm(&self) -> NormKind {
        self.norm
    }

    pub fn map(&self) -> &StructureMap {
        &self.map
    }

    pub fn state_family(&self) -> &AffineFamily {
        &self.fam_a
    }

    pub fn input_family(&self) -> Option<&AffineFamily> {
        self.fam_b.as_ref()
    }

    pub fn pencil(&self) -> &PencilStructure {
        &self.pencil
    }

    pub fn param_count(&self) -> usize {
        self.pencil.param_count()
    }
}
