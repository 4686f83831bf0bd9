//! Complex-to-real rank embedding and the structured pencils.
//!
//! A complex matrix `X + jY` loses full row rank exactly when the real block
//! matrix `W = [[X, Y], [-Y, X]]` does, and `sigma_min(X + jY) =
//! sigma_min(W)` (every singular value of `X + jY` appears twice in `W`).
//! This lets each radius problem work with a real pencil `Z` whose smallest
//! singular value certifies the property loss:
//!
//! * controllability / stabilizability:
//!   `Z = [[A(theta) - mu*I, B(theta), -lambda*I, 0],
//!         [lambda*I, 0, A(theta) - mu*I, B(theta)]]`,
//! * stability: `Z = [[A(theta), -lambda*I], [lambda*I, A(theta)]]`.

use nalgebra::DMatrix;

use crate::affine::AffineFamily;
use crate::error::{Error, Result};

/// Which radius problem a pencil encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PencilKind {
    /// Distance to uncontrollability; `mu` and `lambda` free.
    Controllability,
    /// Distance to unstabilizability; `mu >= 0`, `lambda` free.
    Stabilizability,
    /// Distance to instability; no `mu`, `lambda` free (eigenvalue on the
    /// imaginary axis).
    Stability,
}

impl PencilKind {
    /// Whether the pencil carries an input matrix `B`.
    pub fn has_input(self) -> bool {
        !matches!(self, PencilKind::Stability)
    }

    /// Whether the pencil carries a real shift `mu`.
    pub fn has_shift(self) -> bool {
        !matches!(self, PencilKind::Stability)
    }
}

/// Embeds `X + jY` as `[[X, Y], [-Y, X]]`.
pub fn realify(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.shape() != y.shape() {
        return Err(Error::Dimension(format!(
            "realify: X is {:?}, Y is {:?}",
            x.shape(),
            y.shape()
        )));
    }
    let (r, c) = x.shape();
    let mut w = DMatrix::zeros(2 * r, 2 * c);
    w.view_mut((0, 0), (r, c)).copy_from(x);
    w.view_mut((0, c), (r, c)).copy_from(y);
    w.view_mut((r, 0), (r, c)).copy_from(&(-y));
    w.view_mut((r, c), (r, c)).copy_from(x);
    Ok(w)
}

/// Affine decomposition of the pencil `Z(theta, mu, lambda)`: a constant
/// block plus one basis block per scalar variable.  The conic encoder binds
/// the `Z` matrix variable to the decision variables through this.
#[derive(Debug, Clone)]
pub struct PencilStructure {
    kind: PencilKind,
    n: usize,
    m: usize,
    constant: DMatrix<f64>,
    theta_basis: Vec<DMatrix<f64>>,
    mu_basis: Option<DMatrix<f64>>,
    lambda_basis: DMatrix<f64>,
}

impl PencilStructure {
    /// Derives the pencil structure from the system families.  `fam_b` must
    /// be present exactly for the controllability/stabilizability kinds and
    /// share the parameter count of `fam_a`.
    pub fn new(
        kind: PencilKind,
        fam_a: &AffineFamily,
        fam_b: Option<&AffineFamily>,
    ) -> Result<Self> {
        let n = fam_a.rows();
        if fam_a.cols() != n {
            return Err(Error::Dimension(format!(
                "state matrix family must be square, got {}x{}",
                fam_a.rows(),
                fam_a.cols()
            )));
        }
        if kind.has_input() != fam_b.is_some() {
            return Err(Error::Construction(format!(
                "{:?} pencil {} an input family",
                kind,
                if kind.has_input() {
                    "requires"
                } else {
                    "does not take"
                }
            )));
        }
        let p = fam_a.param_count();
        let m = match fam_b {
            Some(fb) => {
                if fb.rows() != n {
                    return Err(Error::Dimension(format!(
                        "input family has {} rows, state family has {}",
                        fb.rows(),
                        n
                    )));
                }
                if fb.param_count() != p {
                    return Err(Error::Dimension(format!(
                        "input family has {} parameters, state family has {}",
                        fb.param_count(),
                        p
                    )));
                }
                fb.cols()
            }
            None => 0,
        };

        let zero_b = DMatrix::zeros(n, m);
        let place = |a: &DMatrix<f64>, b: &DMatrix<f64>| -> DMatrix<f64> {
            // [[A, B, 0, 0], [0, 0, A, B]] for con/stz; [[A, 0], [0, A]]
            // for stability (m = 0 collapses the B columns).
            let cols = 2 * n + 2 * m;
            let mut z = DMatrix::zeros(2 * n, cols);
            z.view_mut((0, 0), (n, n)).copy_from(a);
            z.view_mut((0, n), (n, m)).copy_from(b);
            z.view_mut((n, n + m), (n, n)).copy_from(a);
            z.view_mut((n, 2 * n + m), (n, m)).copy_from(b);
            z
        };

        let constant = place(fam_a.base(), fam_b.map_or(&zero_b, |f| f.base()));
        let theta_basis = (0..p)
            .map(|k| {
                place(
                    &fam_a.basis()[k],
                    fam_b.map_or(&zero_b, |f| &f.basis()[k]),
                )
            })
            .collect();

        let mut lambda_basis = DMatrix::zeros(2 * n, 2 * n + 2 * m);
        for i in 0..n {
            lambda_basis[(i, n + m + i)] = -1.0;
            lambda_basis[(n + i, i)] = 1.0;
        }

        let mu_basis = if kind.has_shift() {
            let mut mb = DMatrix::zeros(2 * n, 2 * n + 2 * m);
            for i in 0..n {
                mb[(i, i)] = -1.0;
                mb[(n + i, n + m + i)] = -1.0;
            }
            Some(mb)
        } else {
            None
        };

        Ok(Self {
            kind,
            n,
            m,
            constant,
            theta_basis,
            mu_basis,
            lambda_basis,
        })
    }

    pub fn kind(&self) -> PencilKind {
        self.kind
    }

    pub fn state_dim(&self) -> usize {
        self.n
    }

    pub fn input_dim(&self) -> usize {
        self.m
    }

    pub fn param_count(&self) -> usize {
        self.theta_basis.len()
    }

    /// Pencil row count `2n`.
    pub fn rows(&self) -> usize {
        2 * self.n
    }

    /// Pencil column count: `2n + 2m` (or `2n` for stability).
    pub fn cols(&self) -> usize {
        2 * self.n + 2 * self.m
    }

    /// Rank threshold: the pencil certifies the property loss when
    /// `sigma_{2n}(Z) = 0`, i.e. `rank Z < 2n`.
    pub fn rank_bound(&self) -> usize {
        2 * self.n
    }

    pub fn constant(&self) -> &DMatrix<f64> {
        &self.constant
    }

    pub fn theta_basis(&self) -> &[DMatrix<f64>] {
        &self.theta_basis
    }

    pub fn mu_basis(&self) -> Option<&DMatrix<f64>> {
        self.mu_basis.as_ref()
    }

    pub fn lambda_basis(&self) -> &DMatrix<f64> {
        &self.lambda_basis
    }

    /// Evaluates `Z(theta, mu, lambda)`.  `mu` is ignored for stability
    /// pencils.
    pub fn evaluate(&self, theta: &[f64], mu: f64, lambda: f64) -> Result<DMatrix<f64>> {
        if theta.len() != self.theta_basis.len() {
            return Err(Error::Dimension(format!(
                "theta has length {}, pencil has {} parameters",
                theta.len(),
                self.theta_basis.len()
            )));
        }
        let mut z = self.constant.clone();
        for (t, b) in theta.iter().zip(&self.theta_basis) {
            z += b * *t;
        }
        if let Some(mb) = &self.mu_basis {
            z += mb * mu;
        }
        z += &self.lambda_basis * lambda;
        Ok(z)
    }
}

/// One-shot pencil assembly; see [`PencilStructure`] for the layout.
pub fn build_pencil(
    kind: PencilKind,
    fam_a: &AffineFamily,
    fam_b: Option<&AffineFamily>,
    theta: &[f64],
    mu: f64,
    lambda: f64,
) -> Result<DMatrix<f64>> {
    PencilStructure::new(kind, fam_a, fam_b)?.evaluate(theta, mu, lambda)
}
