//! The majorization-minimization loop and the staged run protocols.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    InitPoint, IterateState, RadiusProblem, RadiusResult, RunStatus, SolverConfig, Stage,
    TracePoint,
};
use crate::conic::{build_feasibility_subproblem, build_subproblem, Subproblem};
use crate::error::{Error, Result};
use crate::oracle;
use crate::realify::PencilKind;
use crate::tnn;

/// Objective of one stage of the DC iteration.
#[derive(Debug, Clone, Copy)]
enum StageObjective {
    /// `||Z||_* - ||Z||_{F_{2n-1}}`; drives the pencil toward rank
    /// deficiency without caring about the perturbation size.
    Feasibility,
    /// `g(theta) + gamma * (||Z||_* - ||Z||_{F_{2n-1}})`.
    Weighted { gamma: f64 },
}

/// How a stage stopped.
#[derive(Debug, Clone)]
enum StageExit {
    Converged,
    MaxIter,
    SolverFailure(String),
}

struct StageOutcome {
    state: IterateState,
    iterations: usize,
    reduced_accuracy: usize,
    exit: StageExit,
}

/// Exit state of the feasibility stage.
#[derive(Debug, Clone)]
pub struct FeasibilityStage {
    pub state: IterateState,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<TracePoint>,
}

impl RadiusProblem {
    fn objective_value(&self, obj: StageObjective, theta: &[f64], sigma: f64) -> Result<f64> {
        Ok(match obj {
            StageObjective::Feasibility => sigma,
            StageObjective::Weighted { gamma } => {
                self.map().g_value(theta, self.norm())? + gamma * sigma
            }
        })
    }

    /// Runs one MM stage from the given point.  The trace receives one
    /// point per iterate, starting with the initial one.
    #[allow(clippy::too_many_arguments)]
    fn mm_stage(
        &self,
        obj: StageObjective,
        theta0: Vec<f64>,
        lambda0: f64,
        mu0: Option<f64>,
        config: &SolverConfig,
        stage: Stage,
        trace: &mut Vec<TracePoint>,
    ) -> Result<StageOutcome> {
        let pencil = self.pencil();
        let rank = pencil.rank_bound() - 1;
        let mut theta = theta0;
        let mut lambda = lambda0;
        let mut mu = mu0;
        let mut z = pencil.evaluate(&theta, mu.unwrap_or(0.0), lambda)?;
        let mut sigma = tnn::tnnr(&z, rank)?;
        let mut f = self.objective_value(obj, &theta, sigma)?;
        trace.push(TracePoint {
            stage,
            iteration: 0,
            f_value: f,
            sigma_min: sigma,
        });

        let mut iterations = 0;
        let mut reduced_accuracy = 0;
        let exit = loop {
            if iterations >= config.max_iter {
                break StageExit::MaxIter;
            }
            let part = tnn::svd_partition(&z, rank)?;
            let sub: Subproblem = match obj {
                StageObjective::Feasibility => build_feasibility_subproblem(pencil, &part)?,
                StageObjective::Weighted { gamma } => {
                    build_subproblem(pencil, self.map(), self.norm(), &part, gamma)?
                }
            };
            let sol = sub.program.solve(&config.conic)?;
            if !sol.is_usable() {
                break StageExit::SolverFailure(format!(
                    "subproblem at iteration {} returned {}",
                    iterations + 1,
                    sol.status_detail
                ));
            }
            if sol.status != crate::conic::SolveStatus::Optimal {
                reduced_accuracy += 1;
            }
            let theta_new: Vec<f64> = sub.theta.iter().map(|&v| sol.value(v)).collect();
            let lambda_new = sol.value(sub.lambda);
            let mu_new = sub.mu.map(|v| sol.value(v));
            let z_new = pencil.evaluate(&theta_new, mu_new.unwrap_or(0.0), lambda_new)?;
            let sigma_new = tnn::tnnr(&z_new, rank)?;
            let f_new = self.objective_value(obj, &theta_new, sigma_new)?;
            if f_new > f {
                // A true majorization step cannot increase the objective,
                // so an uptick is subproblem-solver noise: the previous
                // iterate is already optimal to the solver's resolution.
                break StageExit::Converged;
            }
            let delta = f - f_new;
            theta = theta_new;
            lambda = lambda_new;
            mu = mu_new;
            z = z_new;
            sigma = sigma_new;
            f = f_new;
            iterations += 1;
            trace.push(TracePoint {
                stage,
                iteration: iterations,
                f_value: f,
                sigma_min: sigma,
            });
            if delta <= config.xi {
                break StageExit::Converged;
            }
        };

        Ok(StageOutcome {
            state: IterateState {
                theta,
                lambda,
                mu,
                z,
                f_value: f,
                sigma_min: sigma,
                iteration: iterations,
            },
            iterations,
            reduced_accuracy,
            exit,
        })
    }

    fn draw_init(&self, config: &SolverConfig, rng: &mut impl Rng) -> (Vec<f64>, f64, Option<f64>) {
        let theta: Vec<f64> = (0..self.param_count())
            .map(|_| rng.random_range(config.theta_init.0..config.theta_init.1))
            .collect();
        let lambda = rng.random_range(config.lambda_init.0..config.lambda_init.1);
        let mu = if self.pencil().mu_basis().is_some() {
            let raw = rng.random_range(config.mu_init.0..config.mu_init.1);
            // The stabilizability constraint set requires mu >= 0; clip the
            // start so stage one begins feasible.
            Some(if self.kind() == PencilKind::Stabilizability {
                raw.max(0.0)
            } else {
                raw
            })
        } else {
            None
        };
        (theta, lambda, mu)
    }

    /// Runs the feasibility stage (truncated-nuclear-norm minimization
    /// only) from a random start.  Rank deficiency of the result is not
    /// guaranteed — deciding feasibility exactly is NP-complete — so the
    /// achieved `sigma_{2n}` is recorded for auditing.
    pub fn feasibility_stage(
        &self,
        config: &SolverConfig,
        rng: &mut impl Rng,
    ) -> Result<FeasibilityStage> {
        self.check_preconditions()?;
        let (theta, lambda, mu) = self.draw_init(config, rng);
        let mut trace = Vec::new();
        let out = self.mm_stage(
            StageObjective::Feasibility,
            theta,
            lambda,
            mu,
            config,
            Stage::Feasibility,
            &mut trace,
        )?;
        match out.exit {
            StageExit::SolverFailure(msg) => Err(Error::Solver(msg)),
            exit => Ok(FeasibilityStage {
                state: out.state,
                iterations: out.iterations,
                converged: matches!(exit, StageExit::Converged),
                trace,
            }),
        }
    }

    fn check_preconditions(&self) -> Result<()> {
        if self.kind() == PencilKind::Stability {
            let (stable, abscissa) = oracle::is_stable(self.state_family().base())?;
            if !stable {
                return Err(Error::Precondition(format!(
                    "stability radius requires a stable base matrix \
                     (spectral abscissa {abscissa:.6})"
                )));
            }
        }
        Ok(())
    }

    /// Runs the full protocol with the trial-0 random stream.
    pub fn run(&self, config: &SolverConfig) -> Result<RadiusResult> {
        self.run_trial(config, 0)
    }

    /// Runs one trial: the random stream is derived from the master seed
    /// and the trial index, so trials are reproducible independently of
    /// scheduling.
    pub fn run_trial(&self, config: &SolverConfig, trial: u64) -> Result<RadiusResult> {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(trial);
        self.run_with_rng(config, &mut rng)
    }

    /// Runs the protocol drawing initial points from the given generator.
    pub fn run_with_rng(&self, config: &SolverConfig, rng: &mut impl Rng) -> Result<RadiusResult> {
        self.run_from(config, InitPoint::Random, rng)
    }

    /// Runs the protocol from an explicit starting point.  `Warm` skips the
    /// feasibility stage and starts the weighted loop at the given state.
    pub fn run_from(
        &self,
        config: &SolverConfig,
        init: InitPoint,
        rng: &mut impl Rng,
    ) -> Result<RadiusResult> {
        self.check_preconditions()?;
        let mut trace = Vec::new();

        // Stage one: either the feasibility loop, a warm state, or (for the
        // single-stage protocol) nothing at all.
        let mut reduced_accuracy = 0usize;
        #[allow(clippy::type_complexity)]
        let (start, stage1_iterations, stage1_sigma, mut failure): (
            (Vec<f64>, f64, Option<f64>),
            usize,
            Option<f64>,
            Option<String>,
        ) = match init {
            InitPoint::Warm(state) => {
                self.validate_state(&state)?;
                (
                    (state.theta, state.lambda, state.mu),
                    0,
                    Some(state.sigma_min),
                    None,
                )
            }
            InitPoint::Random | InitPoint::Explicit { .. } => {
                let init = match init {
                    InitPoint::Explicit { theta, lambda, mu } => {
                        if theta.len() != self.param_count() {
                            return Err(Error::Dimension(format!(
                                "explicit start has {} parameters, problem has {}",
                                theta.len(),
                                self.param_count()
                            )));
                        }
                        (theta, lambda, mu)
                    }
                    _ => self.draw_init(config, rng),
                };
                if config.two_stage {
                    let out = self.mm_stage(
                        StageObjective::Feasibility,
                        init.0,
                        init.1,
                        init.2,
                        config,
                        Stage::Feasibility,
                        &mut trace,
                    )?;
                    reduced_accuracy += out.reduced_accuracy;
                    let failure = match out.exit {
                        StageExit::SolverFailure(msg) => Some(msg),
                        _ => None,
                    };
                    (
                        (out.state.theta, out.state.lambda, out.state.mu),
                        out.iterations,
                        Some(out.state.sigma_min),
                        failure,
                    )
                } else {
                    (init, 0, None, None)
                }
            }
        };

        let g0 = self.map().g_value(&start.0, self.norm())?;
        let gamma = config.gamma.value(g0, config.epsilon);
        if !(gamma > 0.0) {
            return Err(Error::Construction(format!(
                "gamma policy produced a nonpositive weight {gamma}"
            )));
        }

        let mut stage2_iterations = 0;
        let state = if failure.is_none() {
            let out = self.mm_stage(
                StageObjective::Weighted { gamma },
                start.0,
                start.1,
                start.2,
                config,
                Stage::Weighted,
                &mut trace,
            )?;
            stage2_iterations = out.iterations;
            reduced_accuracy += out.reduced_accuracy;
            if let StageExit::SolverFailure(msg) = &out.exit {
                failure = Some(msg.clone());
            }
            out
        } else {
            // Stage one already failed: materialize its end state.
            let (theta, lambda, mu) = start;
            let z = self.pencil().evaluate(&theta, mu.unwrap_or(0.0), lambda)?;
            let sigma = tnn::tnnr(&z, self.pencil().rank_bound() - 1)?;
            let f = g0 + gamma * sigma;
            StageOutcome {
                state: IterateState {
                    theta,
                    lambda,
                    mu,
                    z,
                    f_value: f,
                    sigma_min: sigma,
                    iteration: 0,
                },
                iterations: 0,
                reduced_accuracy: 0,
                exit: StageExit::SolverFailure(failure.clone().unwrap()),
            }
        };

        let g_final = self.map().g_value(&state.state.theta, self.norm())?;
        let status = if let Some(msg) = failure {
            RunStatus::SolverFailure(msg)
        } else if matches!(state.exit, StageExit::Converged) {
            if state.state.sigma_min <= config.epsilon {
                RunStatus::ToleranceMet
            } else {
                RunStatus::Converged
            }
        } else {
            RunStatus::MaxIter
        };

        Ok(RadiusResult {
            radius: crate::affine::radius_of(g_final, self.norm()),
            g_value: g_final,
            theta: state.state.theta,
            lambda: state.state.lambda,
            mu: state.state.mu,
            sigma_min: state.state.sigma_min,
            gamma,
            stage1_iterations,
            stage2_iterations,
            stage1_sigma_min: stage1_sigma,
            reduced_accuracy_solves: reduced_accuracy,
            trace,
            status,
        })
    }

    fn validate_state(&self, state: &IterateState) -> Result<()> {
        if state.theta.len() != self.param_count() {
            return Err(Error::Dimension(format!(
                "warm state has {} parameters, problem has {}",
                state.theta.len(),
                self.param_count()
            )));
        }
        if state.mu.is_some() != self.pencil().mu_basis().is_some() {
            return Err(Error::Construction(
                "warm state and problem disagree on the shift variable".into(),
            ));
        }
        Ok(())
    }

    /// Evaluates the relaxed objective `g(theta) + gamma * tnnr(Z)` that the
    /// weighted stage minimizes; exposed for tie-ins like tangency tests.
    pub fn weighted_objective(&self, theta: &[f64], sigma: f64, gamma: f64) -> Result<f64> {
        Ok(self.map().g_value(theta, self.norm())? + gamma * sigma)
    }
}
