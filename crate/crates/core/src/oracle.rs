//! Independent verification oracles: PBH-style uncontrollability metrics,
//! stability checks, and a grid-search ground truth for small stability
//! problems.
//!
//! These deliberately avoid the solver's own machinery where possible so a
//! solver result can be certified from scratch: eigenvalues come from a
//! Schur decomposition, pencil singular values from a fresh SVD of the
//! realified pencil.

use nalgebra::{Complex, DMatrix, Schur};
use rayon::prelude::*;

use crate::affine::{radius_of, AffineFamily, NormKind, StructureMap};
use crate::error::{Error, Result};
use crate::realify::realify;
use crate::tnn;

/// Eigenvalues of a square real matrix.
///
/// The QR iteration can stall on exactly structured matrices (e.g. the
/// nilpotent shift patterns of the reduction instances), so a failed
/// bounded decomposition is retried after a deterministic orthogonal
/// similarity, which preserves the spectrum but genericizes the entries.
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Dimension(format!(
            "eigenvalues of a {}x{} matrix",
            n,
            a.ncols()
        )));
    }
    let max_iter = 200 * n.max(10);
    if let Some(schur) = Schur::try_new(a.clone(), f64::EPSILON, max_iter) {
        return Ok(schur.complex_eigenvalues().iter().copied().collect());
    }
    use rand::prelude::*;
    for attempt in 0..3u64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xE16E ^ attempt);
        let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let q = g.qr().q();
        let rotated = &q * a * q.transpose();
        if let Some(schur) = Schur::try_new(rotated, f64::EPSILON, max_iter) {
            return Ok(schur.complex_eigenvalues().iter().copied().collect());
        }
    }
    Err(Error::Numerical(format!(
        "Schur decomposition did not converge on a {n}x{n} matrix"
    )))
}

/// Largest real part of the eigenvalues.
pub fn spectral_abscissa(a: &DMatrix<f64>) -> Result<f64> {
    Ok(eigenvalues(a)?
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Hurwitz stability: all eigenvalues in the open left half plane.
/// Returns the verdict together with the spectral abscissa.
pub fn is_stable(a: &DMatrix<f64>) -> Result<(bool, f64)> {
    let abscissa = spectral_abscissa(a)?;
    Ok((abscissa < 0.0, abscissa))
}

/// `sigma_n([A - zI, B])` for a complex shift `z`, via realification.
/// Pass `b = None` for the input-free pencil `A - zI`.
pub fn pencil_sigma_at(
    a: &DMatrix<f64>,
    b: Option<&DMatrix<f64>>,
    z: Complex<f64>,
) -> Result<f64> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Dimension("pencil needs a square state matrix".into()));
    }
    let m = b.map_or(0, |b| b.ncols());
    if let Some(b) = b {
        if b.nrows() != n {
            return Err(Error::Dimension(format!(
                "input matrix has {} rows, state matrix has {}",
                b.nrows(),
                n
            )));
        }
    }
    let mut x = DMatrix::zeros(n, n + m);
    let mut y = DMatrix::zeros(n, n + m);
    x.view_mut((0, 0), (n, n)).copy_from(a);
    for i in 0..n {
        x[(i, i)] -= z.re;
        y[(i, i)] = -z.im;
    }
    if let Some(b) = b {
        x.view_mut((0, n), (n, m)).copy_from(b);
    }
    tnn::sigma_min(&realify(&x, &y)?)
}

/// Uncontrollability metric of a (perturbed) pair: the minimum of
/// `sigma_n([A - zI, B])` over the eigenvalues `z` of `A`, together with the
/// minimizing eigenvalue.  Zero exactly when some mode is uncontrollable.
pub fn m_ucon_witness(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<(f64, Complex<f64>)> {
    let mut best = (f64::INFINITY, Complex::new(f64::NAN, f64::NAN));
    for z in eigenvalues(a)? {
        let s = pencil_sigma_at(a, Some(b), z)?;
        if s < best.0 {
            best = (s, z);
        }
    }
    Ok(best)
}

/// See [`m_ucon_witness`]; returns just the metric value.
pub fn m_ucon(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    Ok(m_ucon_witness(a, b)?.0)
}

/// PBH test: `(A, B)` is controllable iff `[A - zI, B]` keeps full row rank
/// at every eigenvalue `z` of `A`.  The rank tolerance scales with the data.
pub fn pbh_controllability(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<bool> {
    let n = a.nrows();
    let m = b.ncols();
    let mut ab = DMatrix::zeros(n, n + m);
    ab.view_mut((0, 0), (n, n)).copy_from(a);
    ab.view_mut((0, n), (n, m)).copy_from(b);
    let scale = tnn::singular_values(&ab)?[0];
    let tol = 1e-8 * (1.0 + scale);
    Ok(m_ucon(a, b)? > tol)
}

/// One imaginary-axis crossing found by the grid oracle.
#[derive(Debug, Clone)]
pub struct GridCrossing {
    pub theta: Vec<f64>,
    pub abscissa: f64,
    pub g: f64,
    pub radius: f64,
}

/// One eigenvalue of `A(theta)` at a grid point.
#[derive(Debug, Clone)]
pub struct EigenCloudPoint {
    pub theta: Vec<f64>,
    pub re: f64,
    pub im: f64,
}

/// Output of [`rssr_grid_oracle`].
#[derive(Debug, Clone)]
pub struct GridOracle {
    /// Crossing tolerance on the abscissa: half the largest abscissa
    /// variation between neighboring grid points.
    pub axis_tol: f64,
    /// Grid points whose spectral abscissa reaches `-axis_tol` or above.
    pub crossings: Vec<GridCrossing>,
    /// Minimum radius over the crossings, when any exist.
    pub min_radius: Option<f64>,
    /// Every eigenvalue of every grid point, for plotting.
    pub cloud: Vec<EigenCloudPoint>,
}

/// Exhaustive ground truth for small stability problems: scans `A(theta)`
/// over a box, records the eigenvalue cloud, and reports the grid points
/// that reach the imaginary axis (within a grid-induced tolerance) as a
/// lower envelope for the structured stability radius.
pub fn rssr_grid_oracle(
    fam_a: &AffineFamily,
    map: &StructureMap,
    norm: NormKind,
    bounds: &[(f64, f64)],
    resolution: usize,
) -> Result<GridOracle> {
    let p = fam_a.param_count();
    if p > 3 {
        return Err(Error::TooLarge(format!(
            "grid oracle cost is resolution^p; got p = {p} > 3"
        )));
    }
    if bounds.len() != p {
        return Err(Error::Dimension(format!(
            "{} parameter bounds for {} parameters",
            bounds.len(),
            p
        )));
    }
    if map.param_count() != p {
        return Err(Error::Dimension(
            "structure map and family disagree on parameter count".into(),
        ));
    }
    if resolution < 2 {
        return Err(Error::Construction("grid resolution must be at least 2".into()));
    }
    let (stable, abscissa) = is_stable(fam_a.base())?;
    if !stable {
        return Err(Error::Precondition(format!(
            "base matrix is not stable (spectral abscissa {abscissa:.6})"
        )));
    }

    let total = resolution.pow(p as u32);
    let coordinate = |axis: usize, idx: usize| -> f64 {
        let (lo, hi) = bounds[axis];
        lo + (hi - lo) * idx as f64 / (resolution - 1) as f64
    };
    let theta_of = |flat: usize| -> Vec<f64> {
        let mut rest = flat;
        let mut theta = vec![0.0; p];
        for axis in (0..p).rev() {
            theta[axis] = coordinate(axis, rest % resolution);
            rest /= resolution;
        }
        theta
    };

    // Abscissa and eigenvalues per grid point, in flat index order.
    let evaluated: Result<Vec<(f64, Vec<Complex<f64>>)>> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let theta = theta_of(flat);
            let a = fam_a.evaluate(&theta)?;
            let eigs = eigenvalues(&a)?;
            let abscissa = eigs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
            Ok((abscissa, eigs))
        })
        .collect();
    let evaluated = evaluated?;

    // axis_tol: half the largest abscissa change across one grid step.
    let mut max_diff: f64 = 0.0;
    let mut stride = 1;
    for _ in 0..p {
        for flat in 0..total {
            let idx = (flat / stride) % resolution;
            if idx + 1 < resolution {
                max_diff = max_diff.max((evaluated[flat].0 - evaluated[flat + stride].0).abs());
            }
        }
        stride *= resolution;
    }
    let axis_tol = max_diff / 2.0;

    let mut crossings = Vec::new();
    let mut cloud = Vec::with_capacity(total * fam_a.rows());
    for (flat, (abscissa, eigs)) in evaluated.iter().enumerate() {
        let theta = theta_of(flat);
        for z in eigs {
            cloud.push(EigenCloudPoint {
                theta: theta.clone(),
                re: z.re,
                im: z.im,
            });
        }
        if *abscissa >= -axis_tol {
            let g = map.g_value(&theta, norm)?;
            crossings.push(GridCrossing {
                theta,
                abscissa: *abscissa,
                g,
                radius: radius_of(g, norm),
            });
        }
    }
    let min_radius = crossings
        .iter()
        .map(|c| c.radius)
        .fold(None, |acc: Option<f64>, r| {
            Some(acc.map_or(r, |a| a.min(r)))
        });

    Ok(GridOracle {
        axis_tol,
        crossings,
        min_radius,
        cloud,
    })
}
