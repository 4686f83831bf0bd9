//! Generators for the shipped problem-file fixtures: the stability
//! benchmark (four case/norm combinations), the controllability/
//! stabilizability benchmark, and a scalar toy problem.

use nalgebra::DMatrix;
use strad::{NormKind, PencilKind};
use strad_cli::format::{ParseError, ProblemFile, StructureSpec};

pub fn parse(text: &str) -> Result<ProblemFile, ParseError> {
    ProblemFile::parse(text)
}

fn stability_data() -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
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

fn stability_fixture(full: bool, norm: NormKind) -> ProblemFile {
    let (a, e, h) = stability_data();
    let delta_basis: Vec<DMatrix<f64>> = if full {
        let mut basis = Vec::new();
        for j in 0..2 {
            for i in 0..2 {
                let mut g = DMatrix::zeros(2, 2);
                g[(i, j)] = 1.0;
                basis.push(g);
            }
        }
        basis
    } else {
        (0..2)
            .map(|i| {
                let mut g = DMatrix::zeros(2, 2);
                g[(i, i)] = 1.0;
                g
            })
            .collect()
    };
    let a_basis: Vec<DMatrix<f64>> = delta_basis.iter().map(|g| &e * g * &h).collect();
    let p = a_basis.len();
    ProblemFile {
        kind: PencilKind::Stability,
        norm,
        n: 4,
        m: 0,
        p,
        a0: a,
        a_basis,
        b0: None,
        b_basis: Vec::new(),
        structure: if full {
            StructureSpec::Full { t1: 2, t2: 2 }
        } else {
            StructureSpec::Diagonal
        },
        options: Default::default(),
    }
}

fn pair_fixture(kind: PencilKind) -> ProblemFile {
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
    let p = a_positions.len() + 4;
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
    ProblemFile {
        kind,
        norm: NormKind::Frobenius,
        n: 4,
        m: 1,
        p,
        a0: a,
        a_basis,
        b0: Some(b),
        b_basis,
        structure: StructureSpec::Vector,
        options: Default::default(),
    }
}

fn toy_fixture() -> ProblemFile {
    ProblemFile {
        kind: PencilKind::Stability,
        norm: NormKind::Frobenius,
        n: 1,
        m: 0,
        p: 1,
        a0: DMatrix::from_element(1, 1, -1.0),
        a_basis: vec![DMatrix::from_element(1, 1, 1.0)],
        b0: None,
        b_basis: Vec::new(),
        structure: StructureSpec::Vector,
        options: Default::default(),
    }
}

pub fn all_fixtures() -> Vec<(&'static str, ProblemFile)> {
    vec![
        (
            "example2_case1_frobenius.prob",
            stability_fixture(true, NormKind::Frobenius),
        ),
        (
            "example2_case1_spectral.prob",
            stability_fixture(true, NormKind::Spectral),
        ),
        (
            "example2_case2_frobenius.prob",
            stability_fixture(false, NormKind::Frobenius),
        ),
        (
            "example2_case2_spectral.prob",
            stability_fixture(false, NormKind::Spectral),
        ),
        (
            "example3_rscr.prob",
            pair_fixture(PencilKind::Controllability),
        ),
        (
            "example3_rsszr.prob",
            pair_fixture(PencilKind::Stabilizability),
        ),
        ("toy_scalar.prob", toy_fixture()),
    ]
}
