//! From-scratch certification of solver results.

use super::{RadiusProblem, RadiusResult};
use crate::error::Result;
use crate::oracle;
use crate::realify::PencilKind;
use crate::tnn;

/// Independent post-hoc metrics for a solver result.
#[derive(Debug, Clone)]
pub struct Certificate {
    /// `sigma_{2n}` of the pencil rebuilt at `(theta*, mu*, lambda*)`.
    pub sigma_min: f64,
    /// Uncontrollability metric of the perturbed pair (controllability and
    /// stabilizability problems).
    pub m_ucon: Option<f64>,
    /// Eigenvalue achieving the metric: the mode the perturbation makes
    /// uncontrollable, or the eigenvalue closest to the imaginary axis for
    /// stability problems.
    pub witness_eigenvalue: Option<(f64, f64)>,
    /// Distance of the closest eigenvalue of `A(theta*)` to the imaginary
    /// axis (stability problems).
    pub axis_distance: Option<f64>,
}

impl RadiusProblem {
    /// Recomputes the rank-deficiency and mode metrics of a result without
    /// reusing any solver state.
    pub fn verify_result(&self, result: &RadiusResult) -> Result<Certificate> {
        let z = self.pencil().evaluate(
            &result.theta,
            result.mu.unwrap_or(0.0),
            result.lambda,
        )?;
        let sigma_min = tnn::tnnr(&z, self.pencil().rank_bound() - 1)?;

        let a = self.state_family().evaluate(&result.theta)?;
        match self.kind() {
            PencilKind::Controllability | PencilKind::Stabilizability => {
                let b = self
                    .input_family()
                    .expect("input family present for controllability kinds")
                    .evaluate(&result.theta)?;
                let (value, z) = oracle::m_ucon_witness(&a, &b)?;
                Ok(Certificate {
                    sigma_min,
                    m_ucon: Some(value),
                    witness_eigenvalue: Some((z.re, z.im)),
                    axis_distance: None,
                })
            }
            PencilKind::Stability => {
                let mut best: Option<(f64, (f64, f64))> = None;
                for z in oracle::eigenvalues(&a)? {
                    let d = z.re.abs();
                    if best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, (z.re, z.im)));
                    }
                }
                let (axis_distance, witness) = best.expect("square matrix has eigenvalues");
                Ok(Certificate {
                    sigma_min,
                    m_ucon: None,
                    witness_eigenvalue: Some(witness),
                    axis_distance: Some(axis_distance),
                })
            }
        }
    }
}
