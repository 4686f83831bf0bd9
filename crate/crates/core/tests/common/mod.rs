//! Shared fixtures: the two benchmark systems the experiment tables use.

use nalgebra::DMatrix;
use strad::{AffineFamily, NormKind, PencilKind, RadiusProblem, StructureMap};

/// The 4-state stability benchmark: stable `A` with eigenvalues
/// `{-1 +/- 10j, -1 +/- 1j}`, perturbed through `A_delta = E * Delta * H`.
pub fn stability_system() -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let a = DMatrix::from_row_slice(
        4,
        4,
        &[
            79.0, 20.0, -30.0, -20.0, //
            -41.0, -12.0, 17.0, 13.0, //
            167.0, 40.0, -60.0, -38.0, //
            33.5, 9.0, -14.5, -11.0,
        ],
    );
    let e = DMatrix::from_row_slice(
        4,
        2,
        &[
            0.2190, 0.9347, //
            0.0470, 0.3835, //
            0.6789, 0.5194, //
            0.6793, 0.8310,
        ],
    );
    let h = DMatrix::from_row_slice(
        2,
        4,
        &[
            0.0346, 0.5297, 0.0077, 0.0668, //
            0.0535, 0.6711, 0.3848, 0.4175,
        ],
    );
    (a, e, h)
}

/// Which sparsity of `Delta` the stability benchmark uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaCase {
    /// Full 2x2 `Delta` (p = 4).
    Full,
    /// Diagonal `Delta` (p = 2).
    Diagonal,
}

/// Builds the stability-radius problem for one case and norm.
pub fn stability_problem(case: DeltaCase, norm: NormKind) -> RadiusProblem {
    let (a, e, h) = stability_system();
    let (map, delta_basis): (StructureMap, Vec<DMatrix<f64>>) = match case {
        DeltaCase::Full => {
            let map = StructureMap::full(2, 2).unwrap();
            (map, full_basis(2, 2))
        }
        DeltaCase::Diagonal => {
            let map = StructureMap::diagonal(2).unwrap();
            let basis = (0..2)
                .map(|i| {
                    let mut g = DMatrix::zeros(2, 2);
                    g[(i, i)] = 1.0;
                    g
                })
                .collect();
            (map, basis)
        }
    };
    let a_basis: Vec<DMatrix<f64>> = delta_basis.iter().map(|g| &e * g * &h).collect();
    let fam_a = AffineFamily::new(a, a_basis).unwrap();
    RadiusProblem::new(PencilKind::Stability, fam_a, None, map, norm).unwrap()
}

fn full_basis(t1: usize, t2: usize) -> Vec<DMatrix<f64>> {
    let mut basis = Vec::new();
    for j in 0..t2 {
        for i in 0..t1 {
            let mut g = DMatrix::zeros(t1, t2);
            g[(i, j)] = 1.0;
            basis.push(g);
        }
    }
    basis
}

/// The 4-state, single-input controllability/stabilizability benchmark:
/// perturbations on `A` entries (3,3), (4,1..4) and on the whole input
/// column; the radius is the Euclidean norm of the 9 parameters.
pub fn pair_families() -> (AffineFamily, AffineFamily) {
    let a = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, -1.0, 0.0, 0.0, //
            -1.0, 0.0, 1.0, 0.0, //
            1.0, 0.0, -1.0, 0.0, //
            -1.0, 1.0, 0.0, 1.0,
        ],
    );
    let b = DMatrix::from_row_slice(4, 1, &[1.0, 0.0, 0.0, 1.0]);
    let a_positions = [(2, 2), (3, 0), (3, 1), (3, 2), (3, 3)];
    let mut a_basis = Vec::new();
    let mut b_basis = Vec::new();
    for &(i, j) in &a_positions {
        let mut g = DMatrix::zeros(4, 4);
        g[(i, j)] = 1.0;
        a_basis.push(g);
        b_basis.push(DMatrix::zeros(4, 1));
    }
    for i in 0..4 {
        a_basis.push(DMatrix::zeros(4, 4));
        let mut g = DMatrix::zeros(4, 1);
        g[(i, 0)] = 1.0;
        b_basis.push(g);
    }
    (
        AffineFamily::new(a, a_basis).unwrap(),
        AffineFamily::new(b, b_basis).unwrap(),
    )
}

pub fn controllability_problem() -> RadiusProblem {
    let (fam_a, fam_b) = pair_families();
    let p = fam_a.param_count();
    RadiusProblem::new(
        PencilKind::Controllability,
        fam_a,
        Some(fam_b),
        StructureMap::vector(p).unwrap(),
        NormKind::Frobenius,
    )
    .unwrap()
}

pub fn stabilizability_problem() -> RadiusProblem {
    let (fam_a, fam_b) = pair_families();
    let p = fam_a.param_count();
    RadiusProblem::new(
        PencilKind::Stabilizability,
        fam_a,
        Some(fam_b),
        StructureMap::vector(p).unwrap(),
        NormKind::Frobenius,
    )
    .unwrap()
}
