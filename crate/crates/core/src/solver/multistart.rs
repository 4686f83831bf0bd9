//! Multi-start trial protocol with radius clustering.
//!
//! Trials are independent and run in parallel; trial `i` derives its random
//! stream from `(master seed, i)`, so a report is reproducible regardless
//! of scheduling.  Radii are grouped into clusters by a gap threshold:
//! sorted radii closer than the threshold stay in one cluster, matching how
//! the experiment tables report intervals of local optima.

use rayon::prelude::*;

use super::{Certificate, RadiusProblem, RadiusResult, SolverConfig};
use crate::error::{Error, Result};

/// Gap threshold separating radius clusters.
pub const CLUSTER_GAP: f64 = 1e-3;

/// One successful trial of a multi-start batch.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub trial: usize,
    pub result: RadiusResult,
    pub certificate: Certificate,
}

/// A group of trials whose radii agree to the cluster gap.
#[derive(Debug, Clone)]
pub struct RadiusCluster {
    /// Smallest radius in the cluster.
    pub low: f64,
    /// Largest radius in the cluster.
    pub high: f64,
    /// Representative value: the cluster's minimum.
    pub representative: f64,
    pub count: usize,
}

/// Aggregate outcome of a multi-start batch.
#[derive(Debug)]
pub struct MultiStartReport {
    pub trials: Vec<TrialRecord>,
    /// Clusters of the certified trials (those whose final pencil satisfies
    /// `sigma_{2n} <= epsilon`), sorted by radius ascending.
    pub clusters: Vec<RadiusCluster>,
    /// Trials whose pencil stayed above the tolerance: their objective
    /// value is not a radius, so they are excluded from the clusters.
    pub uncertified: usize,
    /// Fraction of all trials landing in the smallest-radius cluster.
    pub success_rate: f64,
    /// Mean of (stage-1 + stage-2) iteration counts over all trials.
    pub avg_iterations: f64,
}

impl MultiStartReport {
    pub fn best_radius(&self) -> Option<f64> {
        self.clusters.first().map(|c| c.representative)
    }
}

/// Groups sorted radii into clusters separated by more than `gap`.
pub fn cluster_radii(radii: &mut [(f64, usize)], gap: f64) -> Vec<RadiusCluster> {
    radii.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut clusters: Vec<RadiusCluster> = Vec::new();
    for &(r, _) in radii.iter() {
        match clusters.last_mut() {
            Some(c) if r - c.high <= gap => {
                c.high = r;
                c.count += 1;
            }
            _ => clusters.push(RadiusCluster {
                low: r,
                high: r,
                representative: r,
                count: 1,
            }),
        }
    }
    clusters
}

/// Runs `trials` independent solver trials and aggregates the outcomes.
/// Any trial failure aborts the batch with that trial's error.
pub fn multi_start(
    problem: &RadiusProblem,
    config: &SolverConfig,
    trials: usize,
) -> Result<MultiStartReport> {
    if trials == 0 {
        return Err(Error::Construction("multi-start needs at least one trial".into()));
    }
    let outcomes: Result<Vec<TrialRecord>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let result = problem.run_trial(config, trial as u64)?;
            let certificate = problem.verify_result(&result)?;
            Ok(TrialRecord {
                trial,
                result,
                certificate,
            })
        })
        .collect();
    let mut records = outcomes?;
    records.sort_by_key(|r| r.trial);

    let mut radii: Vec<(f64, usize)> = records
        .iter()
        .filter(|r| r.result.sigma_min <= config.epsilon)
        .map(|r| (r.result.radius, r.trial))
        .collect();
    let uncertified = trials - radii.len();
    let clusters = cluster_radii(&mut radii, CLUSTER_GAP);
    let success_rate = clusters
        .first()
        .map_or(0.0, |c| c.count as f64 / trials as f64);
    let avg_iterations = records
        .iter()
        .map(|r| r.result.total_iterations() as f64)
        .sum::<f64>()
        / trials as f64;

    Ok(MultiStartReport {
        trials: records,
        clusters,
        uncertified,
        success_rate,
        avg_iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clustering_merges_within_gap_and_splits_across() {
        let mut radii = vec![(0.5001, 0), (0.5, 1), (0.5008, 2), (0.7, 3), (0.7005, 4)];
        let clusters = cluster_radii(&mut radii, 1e-3);
        assert_eq!(clusters.len(), 2);
        assert_eq!(clusters[0].count, 3);
        assert_eq!(clusters[0].low, 0.5);
        assert_eq!(clusters[0].high, 0.5008);
        assert_eq!(clusters[1].count, 2);
        assert_eq!(
            clusters.iter().map(|c| c.count).sum::<usize>(),
            radii.len()
        );
    }

    #[test]
    fn chained_radii_merge_transitively() {
        // Consecutive gaps below the threshold chain into one cluster even
        // when the endpoints are far apart.
        let mut radii: Vec<(f64, usize)> =
            (0..30).map(|i| (0.1 + 0.0009 * i as f64, i)).collect();
        let clusters = cluster_radii(&mut radii, 1e-3);
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].count, 30);
    }

    #[test]
    fn clusters_are_sorted_ascending() {
        let mut radii = vec![(0.9, 0), (0.1, 1), (0.5, 2)];
        let clusters = cluster_radii(&mut radii, 1e-3);
        let reps: Vec<f64> = clusters.iter().map(|c| c.representative).collect();
        assert_eq!(reps, vec![0.1, 0.5, 0.9]);
    }
}
