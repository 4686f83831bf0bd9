//! Affine parameterizations of system matrices and the perturbation
//! structure map.
//!
//! A family `A(theta) = A0 + sum_i theta_i * A_i` describes how a parameter
//! vector perturbs a system matrix.  The structure map `Gamma(theta)` is the
//! (affine) matrix whose norm defines the radius being minimized: its
//! Frobenius or spectral norm is the size of the perturbation.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Which matrix norm defines the radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// Frobenius norm.  `g(theta)` is the *squared* norm so the epigraph is
    /// a rotated quadratic cone; the reported radius is `sqrt(g)`.
    Frobenius,
    /// Spectral (2-) norm, unsquared.  The reported radius is `g` itself.
    Spectral,
}

/// Converts a `g` value into the reported radius for the given norm.
pub fn radius_of(g: f64, norm: NormKind) -> f64 {
    match norm {
        NormKind::Frobenius => g.max(0.0).sqrt(),
        NormKind::Spectral => g,
    }
}

/// An affinely parameterized matrix family `base + sum_i theta_i * basis_i`.
#[derive(Debug, Clone)]
pub struct AffineFamily {
    base: DMatrix<f64>,
    basis: Vec<DMatrix<f64>>,
}

impl AffineFamily {
    /// Builds a family, checking that every basis matrix matches the base's
    /// shape and that there is at least one parameter.
    pub fn new(base: DMatrix<f64>, basis: Vec<DMatrix<f64>>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::Construction(
                "affine family needs at least one basis matrix".into(),
            ));
        }
        for (i, b) in basis.iter().enumerate() {
            if b.shape() != base.shape() {
                return Err(Error::Dimension(format!(
                    "basis matrix {} has shape {:?}, base has {:?}",
                    i,
                    b.shape(),
                    base.shape()
                )));
            }
        }
        Ok(Self { base, basis })
    }

    /// A family with no parameter dependence: one zero basis matrix per
    /// parameter so it composes with a `p`-parameter family.
    pub fn constant(base: DMatrix<f64>, p: usize) -> Result<Self> {
        let zero = DMatrix::zeros(base.nrows(), base.ncols());
        Self::new(base, vec![zero; p.max(1)])
    }

    pub fn rows(&self) -> usize {
        self.base.nrows()
    }

    pub fn cols(&self) -> usize {
        self.base.ncols()
    }

    /// Number of parameters `p`.
    pub fn param_count(&self) -> usize {
        self.basis.len()
    }

    pub fn base(&self) -> &DMatrix<f64> {
        &self.base
    }

    pub fn basis(&self) -> &[DMatrix<f64>] {
        &self.basis
    }

    /// Evaluates `base + sum_i theta_i * basis_i`.
    pub fn evaluate(&self, theta: &[f64]) -> Result<DMatrix<f64>> {
        if theta.len() != self.basis.len() {
            return Err(Error::Dimension(format!(
                "theta has length {}, family has {} parameters",
                theta.len(),
                self.basis.len()
            )));
        }
        let mut out = self.base.clone();
        for (t, b) in theta.iter().zip(&self.basis) {
            out += b * *t;
        }
        Ok(out)
    }
}

/// The canonical shapes of the structure map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureForm {
    /// `Gamma(theta)` is a full `t1 x t2` matrix whose column-major
    /// vectorization is `theta` (`t1 * t2 = p`).
    Full,
    /// `Gamma(theta) = diag(theta)`, a `p x p` diagonal matrix.
    Diagonal,
    /// `Gamma(theta) = theta` as a `p x 1` column.
    Vector,
    /// Arbitrary affine map given by an explicit constant and basis.
    General,
}

/// Affine map `theta -> Gamma(theta) = constant + sum_i theta_i * G_i`.
///
/// The basis matrices must be linearly independent (as vectors) so that
/// distinct parameters give distinct perturbations.
#[derive(Debug, Clone)]
pub struct StructureMap {
    constant: DMatrix<f64>,
    basis: Vec<DMatrix<f64>>,
    form: StructureForm,
}

impl StructureMap {
    /// Full form: `Gamma` is `t1 x t2` and `vec(Gamma) = theta` column-wise.
    pub fn full(t1: usize, t2: usize) -> Result<Self> {
        if t1 == 0 || t2 == 0 {
            return Err(Error::Construction("empty structure map".into()));
        }
        let mut basis = Vec::with_capacity(t1 * t2);
        for j in 0..t2 {
            for i in 0..t1 {
                let mut g = DMatrix::zeros(t1, t2);
                g[(i, j)] = 1.0;
                basis.push(g);
            }
        }
        Ok(Self {
            constant: DMatrix::zeros(t1, t2),
            basis,
            form: StructureForm::Full,
        })
    }

    /// Diagonal form: `Gamma = diag(theta_1, ..., theta_p)`.
    pub fn diagonal(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::Construction("empty structure map".into()));
        }
        let basis = (0..p)
            .map(|i| {
                let mut g = DMatrix::zeros(p, p);
                g[(i, i)] = 1.0;
                g
            })
            .collect();
        Ok(Self {
            constant: DMatrix::zeros(p, p),
            basis,
            form: StructureForm::Diagonal,
        })
    }

    /// Vector form: `Gamma = theta` as a column.
    pub fn vector(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::Construction("empty structure map".into()));
        }
        let basis = (0..p)
            .map(|i| {
                let mut g = DMatrix::zeros(p, 1);
                g[(i, 0)] = 1.0;
                g
            })
            .collect();
        Ok(Self {
            constant: DMatrix::zeros(p, 1),
            basis,
            form: StructureForm::Vector,
        })
    }

    /// General form with explicit constant and basis matrices.  The basis
    /// must be linearly independent as vectors; the check uses the singular
    /// values of the stacked vectorizations with a relative tolerance of
    /// `1e-10`.
    pub fn general(constant: DMatrix<f64>, basis: Vec<DMatrix<f64>>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::Construction(
                "structure map needs at least one basis matrix".into(),
            ));
        }
        for (i, g) in basis.iter().enumerate() {
            if g.shape() != constant.shape() {
                return Err(Error::Dimension(format!(
                    "structure basis {} has shape {:?}, constant has {:?}",
                    i,
                    g.shape(),
                    constant.shape()
                )));
            }
        }
        let (t1, t2) = constant.shape();
        let p = basis.len();
        if p > t1 * t2 {
            return Err(Error::Construction(format!(
                "{} basis matrices cannot be independent in a {}x{} space",
                p, t1, t2
            )));
        }
        let mut stacked = DMatrix::zeros(t1 * t2, p);
        for (k, g) in basis.iter().enumerate() {
            for (idx, v) in g.iter().enumerate() {
                stacked[(idx, k)] = *v;
            }
        }
        let sv = stacked.svd(false, false).singular_values;
        let max = sv.max();
        let min = sv.min();
        if !(min > 1e-10 * max) {
            return Err(Error::Construction(format!(
                "structure basis matrices are linearly dependent (sigma_min/sigma_max = {:.3e})",
                if max > 0.0 { min / max } else { 0.0 }
            )));
        }
        Ok(Self {
            constant,
            basis,
            form: StructureForm::General,
        })
    }

    pub fn form(&self) -> StructureForm {
        self.form
    }

    pub fn rows(&self) -> usize {
        self.constant.nrows()
    }

    pub fn cols(&self) -> usize {
        self.constant.ncols()
    }

    pub fn param_count(&self) -> usize {
        self.basis.len()
    }

    pub fn constant(&self) -> &DMatrix<f64> {
        &self.constant
    }

    pub fn basis(&self) -> &[DMatrix<f64>] {
        &self.basis
    }

    /// Evaluates `Gamma(theta)`.
    pub fn evaluate(&self, theta: &[f64]) -> Result<DMatrix<f64>> {
        if theta.len() != self.basis.len() {
            return Err(Error::Dimension(format!(
                "theta has length {}, structure map has {} parameters",
                theta.len(),
                self.basis.len()
            )));
        }
        let mut out = self.constant.clone();
        for (t, g) in theta.iter().zip(&self.basis) {
            out += g * *t;
        }
        Ok(out)
    }

    /// The convex objective `g(theta)`: squared Frobenius norm, or the
    /// plain spectral norm (the unsquared variant keeps the epigraph a
    /// single semidefinite block).
    pub fn g_value(&self, theta: &[f64], norm: NormKind) -> Result<f64> {
        let gamma = self.evaluate(theta)?;
        Ok(match norm {
            NormKind::Frobenius => gamma.iter().map(|v| v * v).sum(),
            NormKind::Spectral => gamma.svd(false, false).singular_values.max(),
        })
    }

    /// `radius_of(g_value(theta))` — the reported perturbation size.
    pub fn radius(&self, theta: &[f64], norm: NormKind) -> Result<f64> {
        Ok(radius_of(self.g_value(theta, norm)?, norm))
    }
}
