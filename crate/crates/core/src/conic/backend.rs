//! Interior-point backend: assembles the abstract program into the
//! `A x + s = b, s in K` form and hands it to Clarabel.
//!
//! Cone blocks are emitted in a fixed canonical order (equalities,
//! nonnegativity, second-order cones, semidefinite blocks) so identical
//! programs produce identical solver inputs.

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};

use super::{expr_parts, ConicProgram, ConicSolution, LinExpr, SolveStatus};
use crate::error::{Error, Result};

/// Interior-point solver settings.
#[derive(Debug, Clone)]
pub struct SolverSettings {
    /// Duality-gap and feasibility tolerance.
    pub tol: f64,
    /// Iteration cap for one conic solve.
    pub max_iter: u32,
    /// Print solver progress.
    pub verbose: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
            verbose: false,
        }
    }
}

struct RowBuilder {
    /// Per-variable column triplets (row index, value).
    cols: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
    row: usize,
}

impl RowBuilder {
    fn new(nvars: usize) -> Self {
        Self {
            cols: vec![Vec::new(); nvars],
            b: Vec::new(),
            row: 0,
        }
    }

    /// Pushes one row of `A x + s = b`.  `sign` is the coefficient applied
    /// to the expression's variable terms (+1 for equality rows where
    /// `A x = b`, -1 for cone rows where `s = expr`), `scale` the svec
    /// scaling factor.
    fn push(&mut self, expr: &LinExpr, sign: f64, scale: f64) {
        let (terms, constant) = expr_parts(expr);
        for &(v, c) in terms {
            let val = sign * scale * c;
            if val != 0.0 {
                self.cols[v].push((self.row, val));
            }
        }
        self.b.push(if sign > 0.0 {
            -scale * constant
        } else {
            scale * constant
        });
        self.row += 1;
    }

    fn finish(mut self) -> (CscMatrix<f64>, Vec<f64>) {
        let n = self.cols.len();
        let m = self.row;
        let mut colptr = Vec::with_capacity(n + 1);
        let mut rowval = Vec::new();
        let mut nzval = Vec::new();
        colptr.push(0);
        for col in &mut self.cols {
            col.sort_by_key(|&(r, _)| r);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(col.len());
            for &(r, v) in col.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == r => last.1 += v,
                    _ => merged.push((r, v)),
                }
            }
            for (r, v) in merged {
                if v != 0.0 {
                    rowval.push(r);
                    nzval.push(v);
                }
            }
            colptr.push(rowval.len());
        }
        (CscMatrix::new(m, n, colptr, rowval, nzval), self.b)
    }
}

pub(super) fn solve(prog: &ConicProgram, settings: &SolverSettings) -> Result<ConicSolution> {
    let (nvars, objective, eqs, nonnegs, socs, psds) = prog.parts();
    let sqrt2 = std::f64::consts::SQRT_2;

    let mut builder = RowBuilder::new(nvars);
    let mut cones: Vec<SupportedConeT<f64>> = Vec::new();

    if !eqs.is_empty() {
        for e in eqs {
            builder.push(e, 1.0, 1.0);
        }
        cones.push(SupportedConeT::ZeroConeT(eqs.len()));
    }
    if !nonnegs.is_empty() {
        for e in nonnegs {
            builder.push(e, -1.0, 1.0);
        }
        cones.push(SupportedConeT::NonnegativeConeT(nonnegs.len()));
    }
    for soc in socs {
        for e in soc {
            builder.push(e, -1.0, 1.0);
        }
        cones.push(SupportedConeT::SecondOrderConeT(soc.len()));
    }
    for block in psds {
        let mut idx = 0;
        for j in 0..block.dim {
            for i in 0..=j {
                let scale = if i == j { 1.0 } else { sqrt2 };
                builder.push(&block.entries[idx], -1.0, scale);
                idx += 1;
            }
        }
        cones.push(SupportedConeT::PSDTriangleConeT(block.dim));
    }

    let (a, b) = builder.finish();
    let p = CscMatrix::zeros((nvars, nvars));
    let mut q = vec![0.0; nvars];
    for &(v, c) in objective {
        q[v] += c;
    }

    let clarabel_settings = DefaultSettingsBuilder::default()
        .verbose(settings.verbose)
        .max_iter(settings.max_iter)
        .tol_gap_abs(settings.tol)
        .tol_gap_rel(settings.tol)
        .tol_feas(settings.tol)
        .build()
        .map_err(|e| Error::Solver(format!("bad solver settings: {e}")))?;

    let mut solver = DefaultSolver::new(&p, &q, &a, &b, &cones, clarabel_settings)
        .map_err(|e| Error::Solver(format!("solver setup failed: {e}")))?;
    solver.solve();

    let sol = &solver.solution;
    let status = match sol.status {
        SolverStatus::Solved => SolveStatus::Optimal,
        SolverStatus::AlmostSolved => SolveStatus::NearOptimal,
        SolverStatus::PrimalInfeasible
        | SolverStatus::DualInfeasible
        | SolverStatus::AlmostPrimalInfeasible
        | SolverStatus::AlmostDualInfeasible => SolveStatus::Infeasible,
        _ => SolveStatus::NumericalFailure,
    };

    Ok(ConicSolution {
        status,
        status_detail: format!("{:?}", sol.status),
        objective: sol.obj_val,
        primal_residual: sol.r_prim,
        dual_residual: sol.r_dual,
        iterations: sol.iterations,
        values: sol.x.clone(),
    })
}
