//! Abstract conic program model and the encodings of the DC subproblems.
//!
//! Every subproblem of the rank-relaxation iteration is a linear objective
//! over scalar variables subject to affine equalities, nonnegativity,
//! second-order-cone rows, and semidefinite blocks.  The nuclear norm enters
//! through its semidefinite epigraph
//!
//! ```text
//! ||Z||_* = min { tr(W1 + W2) / 2 : [[W1, Z], [Z^T, W2]] >= 0 }
//! ```
//!
//! so each iteration is one small SDP handed to the interior-point backend.

mod backend;

use nalgebra::DMatrix;

use crate::affine::{NormKind, StructureMap};
use crate::error::{Error, Result};
use crate::realify::PencilStructure;
use crate::tnn::SvdPartition;

pub use backend::SolverSettings;

/// Handle to a scalar decision variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarId(pub(crate) usize);

/// A dense matrix of scalar variables, column-major.
#[derive(Debug, Clone)]
pub struct MatrixVar {
    rows: usize,
    cols: usize,
    base: usize,
}

impl MatrixVar {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> VarId {
        debug_assert!(i < self.rows && j < self.cols);
        VarId(self.base + j * self.rows + i)
    }
}

/// A symmetric matrix of scalar variables (upper triangle, column-major).
#[derive(Debug, Clone)]
pub struct SymVar {
    dim: usize,
    base: usize,
}

impl SymVar {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, i: usize, j: usize) -> VarId {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        debug_assert!(j < self.dim);
        VarId(self.base + j * (j + 1) / 2 + i)
    }
}

/// Affine expression `sum_k coeff_k * x_k + constant`.
#[derive(Debug, Clone, Default)]
pub struct LinExpr {
    terms: Vec<(usize, f64)>,
    constant: f64,
}

impl LinExpr {
    pub fn constant(c: f64) -> Self {
        Self {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn var(v: VarId) -> Self {
        Self {
            terms: vec![(v.0, 1.0)],
            constant: 0.0,
        }
    }

    pub fn term(v: VarId, coeff: f64) -> Self {
        Self {
            terms: vec![(v.0, coeff)],
            constant: 0.0,
        }
    }

    pub fn add_term(mut self, v: VarId, coeff: f64) -> Self {
        if coeff != 0.0 {
            self.terms.push((v.0, coeff));
        }
        self
    }

    pub fn add_constant(mut self, c: f64) -> Self {
        self.constant += c;
        self
    }

    pub fn scaled(mut self, s: f64) -> Self {
        for t in &mut self.terms {
            t.1 *= s;
        }
        self.constant *= s;
        self
    }
}

/// A semidefinite constraint block: `dim x dim` symmetric matrix of affine
/// expressions (upper triangle, column-major) required to be PSD.
#[derive(Debug, Clone)]
pub struct PsdBlock {
    pub dim: usize,
    pub entries: Vec<LinExpr>,
}

/// Status of a conic solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    NearOptimal,
    Infeasible,
    NumericalFailure,
}

/// Solution of a conic program.
#[derive(Debug, Clone)]
pub struct ConicSolution {
    pub status: SolveStatus,
    /// Backend status string, for diagnostics.
    pub status_detail: String,
    pub objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: u32,
    values: Vec<f64>,
}

impl ConicSolution {
    pub fn value(&self, v: VarId) -> f64 {
        self.values[v.0]
    }

    pub fn matrix_value(&self, m: &MatrixVar) -> DMatrix<f64> {
        DMatrix::from_fn(m.rows, m.cols, |i, j| self.value(m.at(i, j)))
    }

    pub fn is_usable(&self) -> bool {
        matches!(self.status, SolveStatus::Optimal | SolveStatus::NearOptimal)
    }
}

/// Linear-objective conic program over scalar variables.
#[derive(Debug, Clone, Default)]
pub struct ConicProgram {
    nvars: usize,
    objective: Vec<(usize, f64)>,
    eqs: Vec<LinExpr>,
    nonnegs: Vec<LinExpr>,
    socs: Vec<Vec<LinExpr>>,
    psds: Vec<PsdBlock>,
}

impl ConicProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.nvars
    }

    pub fn add_var(&mut self) -> VarId {
        let id = VarId(self.nvars);
        self.nvars += 1;
        id
    }

    pub fn add_matrix_var(&mut self, rows: usize, cols: usize) -> MatrixVar {
        let base = self.nvars;
        self.nvars += rows * cols;
        MatrixVar { rows, cols, base }
    }

    pub fn add_sym_var(&mut self, dim: usize) -> SymVar {
        let base = self.nvars;
        self.nvars += dim * (dim + 1) / 2;
        SymVar { dim, base }
    }

    /// Adds `coeff * v` to the (linear) objective.
    pub fn add_objective(&mut self, v: VarId, coeff: f64) {
        if coeff != 0.0 {
            self.objective.push((v.0, coeff));
        }
    }

    /// Constrains `expr == 0`.
    pub fn add_eq_zero(&mut self, expr: LinExpr) {
        self.eqs.push(expr);
    }

    /// Constrains `expr >= 0`.
    pub fn add_nonneg(&mut self, expr: LinExpr) {
        self.nonnegs.push(expr);
    }

    /// Constrains `rows[0] >= || rows[1..] ||_2`.
    pub fn add_soc(&mut self, rows: Vec<LinExpr>) {
        assert!(rows.len() >= 2, "second-order cone needs at least two rows");
        self.socs.push(rows);
    }

    /// Constrains the symmetric matrix with the given upper triangle
    /// (column-major) to be positive semidefinite.
    pub fn add_psd(&mut self, dim: usize, entries: Vec<LinExpr>) {
        assert_eq!(entries.len(), dim * (dim + 1) / 2);
        self.psds.push(PsdBlock { dim, entries });
    }

    /// Solves the program with the interior-point backend.  Solver-level
    /// failures are reported through [`ConicSolution::status`]; `Err` is
    /// reserved for malformed programs.
    pub fn solve(&self, settings: &SolverSettings) -> Result<ConicSolution> {
        backend::solve(self, settings)
    }

    #[allow(clippy::type_complexity)]
    pub(crate) fn parts(
        &self,
    ) -> (
        usize,
        &[(usize, f64)],
        &[LinExpr],
        &[LinExpr],
        &[Vec<LinExpr>],
        &[PsdBlock],
    ) {
        (
            self.nvars,
            &self.objective,
            &self.eqs,
            &self.nonnegs,
            &self.socs,
            &self.psds,
        )
    }
}

pub(crate) fn expr_parts(e: &LinExpr) -> (&[(usize, f64)], f64) {
    (&e.terms, e.constant)
}

/// Adds the semidefinite epigraph of the nuclear norm of a matrix variable
/// and returns the scalar `t` with `t >= ||Z||_*` (with equality at the
/// optimum when `t` is minimized).
pub fn encode_nuclear_epigraph(prog: &mut ConicProgram, z: &MatrixVar) -> VarId {
    let (r, c) = (z.rows(), z.cols());
    let w1 = prog.add_sym_var(r);
    let w2 = prog.add_sym_var(c);
    let t = prog.add_var();

    // t = tr(W1 + W2) / 2
    let mut trace = LinExpr::term(t, 1.0);
    for i in 0..r {
        trace = trace.add_term(w1.at(i, i), -0.5);
    }
    for j in 0..c {
        trace = trace.add_term(w2.at(j, j), -0.5);
    }
    prog.add_eq_zero(trace);

    // [[W1, Z], [Z^T, W2]] >= 0
    let dim = r + c;
    let mut entries = Vec::with_capacity(dim * (dim + 1) / 2);
    for j in 0..dim {
        for i in 0..=j {
            let e = if j < r {
                LinExpr::var(w1.at(i, j))
            } else if i < r {
                LinExpr::var(z.at(i, j - r))
            } else {
                LinExpr::var(w2.at(i - r, j - r))
            };
            entries.push(e);
        }
    }
    prog.add_psd(dim, entries);
    t
}

/// Adds the epigraph of `g(theta)` and returns the scalar `t_g`:
/// for the Frobenius norm `t_g >= ||Gamma(theta)||_F^2` (rotated quadratic
/// cone), for the spectral norm `t_g >= ||Gamma(theta)||_2` (semidefinite
/// block with `t_g` on the diagonal).
pub fn encode_g_epigraph(
    prog: &mut ConicProgram,
    map: &StructureMap,
    theta: &[VarId],
    norm: NormKind,
) -> VarId {
    assert_eq!(theta.len(), map.param_count());
    let (t1, t2) = (map.rows(), map.cols());
    let gamma_entry = |i: usize, j: usize| -> LinExpr {
        let mut e = LinExpr::constant(map.constant()[(i, j)]);
        for (k, g) in map.basis().iter().enumerate() {
            e = e.add_term(theta[k], g[(i, j)]);
        }
        e
    };
    let t = prog.add_var();
    match norm {
        NormKind::Frobenius => {
            // t >= sum v_k^2  <=>  t + 1 >= || (2 v, t - 1) ||_2
            let mut rows = Vec::with_capacity(t1 * t2 + 2);
            rows.push(LinExpr::var(t).add_constant(1.0));
            for j in 0..t2 {
                for i in 0..t1 {
                    rows.push(gamma_entry(i, j).scaled(2.0));
                }
            }
            rows.push(LinExpr::var(t).add_constant(-1.0));
            prog.add_soc(rows);
        }
        NormKind::Spectral => {
            // [[t I, Gamma], [Gamma^T, t I]] >= 0
            let dim = t1 + t2;
            let mut entries = Vec::with_capacity(dim * (dim + 1) / 2);
            for j in 0..dim {
                for i in 0..=j {
                    let e = if i == j {
                        LinExpr::var(t)
                    } else if i < t1 && j >= t1 {
                        gamma_entry(i, j - t1)
                    } else {
                        LinExpr::constant(0.0)
                    };
                    entries.push(e);
                }
            }
            prog.add_psd(dim, entries);
        }
    }
    t
}

/// A DC subproblem with handles to its decision variables.
#[derive(Debug)]
pub struct Subproblem {
    pub program: ConicProgram,
    pub theta: Vec<VarId>,
    pub lambda: VarId,
    pub mu: Option<VarId>,
    pub z: MatrixVar,
    /// Nuclear-norm epigraph scalar.
    pub t_nuclear: VarId,
    /// `g(theta)` epigraph scalar; absent in the feasibility stage.
    pub t_g: Option<VarId>,
}

fn base_subproblem(pencil: &PencilStructure) -> Subproblem {
    let mut prog = ConicProgram::new();
    let theta: Vec<VarId> = (0..pencil.param_count()).map(|_| prog.add_var()).collect();
    let lambda = prog.add_var();
    let mu = pencil.mu_basis().map(|_| prog.add_var());
    let z = prog.add_matrix_var(pencil.rows(), pencil.cols());

    // Bind Z to the pencil entrywise: Z_ij - (C + sum theta_k T_k + mu M +
    // lambda L)_ij = 0.
    for j in 0..pencil.cols() {
        for i in 0..pencil.rows() {
            let mut e = LinExpr::var(z.at(i, j)).add_constant(-pencil.constant()[(i, j)]);
            for (k, tb) in pencil.theta_basis().iter().enumerate() {
                e = e.add_term(theta[k], -tb[(i, j)]);
            }
            if let (Some(mv), Some(mb)) = (mu, pencil.mu_basis()) {
                e = e.add_term(mv, -mb[(i, j)]);
            }
            e = e.add_term(lambda, -pencil.lambda_basis()[(i, j)]);
            prog.add_eq_zero(e);
        }
    }

    // mu >= 0 for the stabilizability pencil.
    if pencil.kind() == crate::realify::PencilKind::Stabilizability {
        if let Some(mv) = mu {
            prog.add_nonneg(LinExpr::var(mv));
        }
    }

    let t_nuclear = encode_nuclear_epigraph(&mut prog, &z);
    Subproblem {
        program: prog,
        theta,
        lambda,
        mu,
        z,
        t_nuclear,
        t_g: None,
    }
}

fn add_linearized_objective(sub: &mut Subproblem, part: &SvdPartition, gamma: f64) {
    // -gamma * tr(U1^T Z V1) = -gamma * <U1 V1^T, Z>
    let grad = &part.u1 * part.v1.transpose();
    for j in 0..sub.z.cols() {
        for i in 0..sub.z.rows() {
            sub.program
                .add_objective(sub.z.at(i, j), -gamma * grad[(i, j)]);
        }
    }
}

/// Builds the weighted subproblem
/// `min g(theta) + gamma ||Z||_* - gamma tr(U1^T Z V1)` subject to the
/// pencil equality (and `mu >= 0` for stabilizability).
pub fn build_subproblem(
    pencil: &PencilStructure,
    map: &StructureMap,
    norm: NormKind,
    part: &SvdPartition,
    gamma: f64,
) -> Result<Subproblem> {
    if map.param_count() != pencil.param_count() {
        return Err(Error::Dimension(format!(
            "structure map has {} parameters, pencil has {}",
            map.param_count(),
            pencil.param_count()
        )));
    }
    if !(gamma > 0.0) {
        return Err(Error::Construction(format!(
            "regularization weight must be positive, got {gamma}"
        )));
    }
    let mut sub = base_subproblem(pencil);
    let t_g = encode_g_epigraph(&mut sub.program, map, &sub.theta, norm);
    sub.t_g = Some(t_g);
    sub.program.add_objective(t_g, 1.0);
    sub.program.add_objective(sub.t_nuclear, gamma);
    add_linearized_objective(&mut sub, part, gamma);
    Ok(sub)
}

/// Builds the feasibility-stage subproblem
/// `min ||Z||_* - tr(U1^T Z V1)` subject to the same constraint set.
pub fn build_feasibility_subproblem(
    pencil: &PencilStructure,
    part: &SvdPartition,
) -> Result<Subproblem> {
    let mut sub = base_subproblem(pencil);
    sub.program.add_objective(sub.t_nuclear, 1.0);
    add_linearized_objective(&mut sub, part, 1.0);
    Ok(sub)
}
