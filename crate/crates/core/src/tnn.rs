//! Truncated nuclear norm machinery.
//!
//! For a `2n`-row pencil, `sigma_{2n}(Z) = ||Z||_* - ||Z||_{F_{2n-1}}`: the
//! nuclear norm minus the Ky Fan `(2n-1)`-norm.  The Ky Fan term is convex,
//! and `U1 V1^T` (top singular subspaces) is one of its subgradients, so the
//! concave part of the DC objective is majorized by its linearization
//! `tr(U1^T Z V1)` at the current iterate.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Top-`r` singular subspaces of a matrix, with the full singular spectrum.
#[derive(Debug, Clone)]
pub struct SvdPartition {
    /// Left singular vectors of the largest `r` singular values (`rows x r`).
    pub u1: DMatrix<f64>,
    /// Right singular vectors of the largest `r` singular values (`cols x r`).
    pub v1: DMatrix<f64>,
    /// All singular values, descending.
    pub singular_values: Vec<f64>,
    /// Partition rank `r`.
    pub r: usize,
}

fn svd_sorted(z: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>, Vec<f64>)> {
    let svd = z.clone().try_svd(true, true, f64::EPSILON, 0).ok_or_else(|| {
        Error::Numerical(format!("SVD did not converge on a {:?} matrix", z.shape()))
    })?;
    let u = svd.u.ok_or_else(|| Error::Numerical("SVD returned no U".into()))?;
    let v_t = svd.v_t.ok_or_else(|| Error::Numerical("SVD returned no V^T".into()))?;
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
    });
    let mut u_sorted = DMatrix::zeros(u.nrows(), k);
    let mut v_sorted = DMatrix::zeros(v_t.ncols(), k);
    let mut sv = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        u_sorted.set_column(dst, &u.column(src));
        v_sorted.set_column(dst, &v_t.row(src).transpose());
        sv.push(svd.singular_values[src]);
    }
    Ok((u_sorted, v_sorted, sv))
}

/// Splits the SVD of `Z` at rank `r`, keeping the top-`r` subspaces.
pub fn svd_partition(z: &DMatrix<f64>, r: usize) -> Result<SvdPartition> {
    let k = z.nrows().min(z.ncols());
    if r > k {
        return Err(Error::Dimension(format!(
            "partition rank {} exceeds min dimension {}",
            r, k
        )));
    }
    let (u, v, sv) = svd_sorted(z)?;
    Ok(SvdPartition {
        u1: u.columns(0, r).clone_owned(),
        v1: v.columns(0, r).clone_owned(),
        singular_values: sv,
        r,
    })
}

/// All singular values of `Z`, descending.
pub fn singular_values(z: &DMatrix<f64>) -> Result<Vec<f64>> {
    let svd = z.clone().try_svd(false, false, f64::EPSILON, 0).ok_or_else(|| {
        Error::Numerical(format!("SVD did not converge on a {:?} matrix", z.shape()))
    })?;
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(sv)
}

/// Smallest singular value.
pub fn sigma_min(z: &DMatrix<f64>) -> Result<f64> {
    Ok(*singular_values(z)?.last().expect("nonempty spectrum"))
}

/// Nuclear norm: the sum of all singular values.
pub fn nuclear(z: &DMatrix<f64>) -> Result<f64> {
    Ok(singular_values(z)?.iter().sum())
}

/// Ky Fan `r`-norm: the sum of the largest `r` singular values.
pub fn ky_fan(z: &DMatrix<f64>, r: usize) -> Result<f64> {
    let sv = singular_values(z)?;
    if r > sv.len() {
        return Err(Error::Dimension(format!(
            "Ky Fan rank {} exceeds min dimension {}",
            r,
            sv.len()
        )));
    }
    Ok(sv[..r].iter().sum())
}

/// Truncated nuclear norm `||Z||_* - ||Z||_{F_r}`: the sum of the singular
/// values below the top `r`.  With `r = rows - 1` on a wide matrix this is
/// exactly the smallest singular value.
pub fn tnnr(z: &DMatrix<f64>, r: usize) -> Result<f64> {
    let sv = singular_values(z)?;
    if r > sv.len() {
        return Err(Error::Dimension(format!(
            "truncation rank {} exceeds min dimension {}",
            r,
            sv.len()
        )));
    }
    Ok(sv[r..].iter().sum())
}

/// The linearized Ky Fan term `tr(U1^T Z V1)` at a partition.
pub fn linearized_term(z: &DMatrix<f64>, part: &SvdPartition) -> f64 {
    (part.u1.transpose() * z * &part.v1).trace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut impl Rng, r: usize, c: usize) -> DMatrix<f64> {
        DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn diagonal_partition() {
        let z = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 2.0, 1.0]));
        let part = svd_partition(&z, 2).unwrap();
        assert_eq!(part.singular_values, vec![3.0, 2.0, 1.0]);
        // Up to sign, U1 and V1 are the first two identity columns; the
        // invariant that matters is the Ky Fan inner product.
        let val = (part.u1.transpose() * &z * &part.v1).trace();
        assert!((val - 5.0).abs() < 1e-12);
        // Orthonormality.
        let iu = part.u1.transpose() * &part.u1;
        let iv = part.v1.transpose() * &part.v1;
        assert!((iu - DMatrix::identity(2, 2)).abs().max() < 1e-10);
        assert!((iv - DMatrix::identity(2, 2)).abs().max() < 1e-10);
    }

    #[test]
    fn degenerate_spectrum_yields_valid_subgradient() {
        // Identity: any orthonormal pair spans a valid top-2 subspace; the
        // subgradient inner product is forced to equal the Ky Fan value.
        let z = DMatrix::<f64>::identity(3, 3);
        let part = svd_partition(&z, 2).unwrap();
        let val = (part.u1.transpose() * &z * &part.v1).trace();
        assert!((val - 2.0).abs() < 1e-10);
    }

    #[test]
    fn partition_trace_equals_ky_fan_on_random_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let z = random_matrix(&mut rng, 8, 12);
        let part = svd_partition(&z, 7).unwrap();
        let val = (part.u1.transpose() * &z * &part.v1).trace();
        assert!((val - ky_fan(&z, 7).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn norms_on_diagonal_matrix() {
        let z = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 2.0, 1.0]));
        assert!((nuclear(&z).unwrap() - 6.0).abs() < 1e-12);
        assert!((ky_fan(&z, 2).unwrap() - 5.0).abs() < 1e-12);
        assert!((tnnr(&z, 2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tnnr_vanishes_on_rank_deficient_matrix() {
        // 4-row matrix of rank 3: truncation at 3 leaves sigma_4 = 0.
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let left = random_matrix(&mut rng, 4, 3);
        let right = random_matrix(&mut rng, 3, 6);
        let z = left * right;
        assert!(tnnr(&z, 3).unwrap() < 1e-10);
    }

    #[test]
    fn tnnr_is_smallest_singular_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..50 {
            let rows = rng.random_range(2..7);
            let cols = rng.random_range(rows..10);
            let z = random_matrix(&mut rng, rows, cols);
            let direct = sigma_min(&z).unwrap();
            let via_tnnr = tnnr(&z, rows - 1).unwrap();
            assert!((direct - via_tnnr).abs() < 1e-10);
        }
    }

    #[test]
    fn linearization_is_tangent_at_the_partition_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let z = random_matrix(&mut rng, 6, 9);
        let part = svd_partition(&z, 5).unwrap();
        let lin = linearized_term(&z, &part);
        assert!((lin - ky_fan(&z, 5).unwrap()).abs() < 1e-10);
        assert_eq!(linearized_term(&DMatrix::zeros(6, 9), &part), 0.0);
    }

    #[test]
    fn subgradient_inequality_holds() {
        // Ky Fan convexity: f(Z) >= f(Zk) + <U1 V1^T, Z - Zk>.
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..1000 {
            let rows = rng.random_range(2..6);
            let cols = rng.random_range(2..8);
            let r = rng.random_range(1..=rows.min(cols));
            let zk = random_matrix(&mut rng, rows, cols);
            let z = random_matrix(&mut rng, rows, cols);
            let part = svd_partition(&zk, r).unwrap();
            let lhs = ky_fan(&z, r).unwrap();
            let rhs = ky_fan(&zk, r).unwrap() + linearized_term(&(&z - &zk), &part);
            assert!(lhs - rhs >= -1e-9, "subgradient inequality violated: {lhs} < {rhs}");
        }
    }

    #[test]
    fn orthonormal_columns_on_random_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..20 {
            let z = random_matrix(&mut rng, 6, 10);
            let part = svd_partition(&z, 5).unwrap();
            let iu = part.u1.transpose() * &part.u1;
            let iv = part.v1.transpose() * &part.v1;
            assert!((iu - DMatrix::identity(5, 5)).abs().max() < 1e-10);
            assert!((iv - DMatrix::identity(5, 5)).abs().max() < 1e-10);
        }
    }

    #[test]
    fn rank_request_beyond_dimension_is_rejected() {
        let z = DMatrix::<f64>::identity(3, 3);
        assert!(svd_partition(&z, 4).is_err());
        assert!(ky_fan(&z, 4).is_err());
    }
}
