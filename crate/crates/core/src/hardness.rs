//! Subset-sum reduction instances: adversarial fixtures with known ground
//! truth for the controllability-radius feasibility problem.
//!
//! The reduction builds a `(2p+2) x (2p+2)` nilpotent state family whose
//! subdiagonal carries `1 + sum theta_i a_i, 1 - theta_1, theta_1, ...,
//! 1 - theta_p, theta_p`, paired with a constant Vandermonde input matrix
//! in which any `p+1` rows are linearly independent.  The pair becomes
//! uncontrollable for a binary `theta` exactly when the chosen subset of
//! `a_i` sums to `-1`, so subset-sum feasibility transfers to radius
//! feasibility.  Because each pencil column holds at most one nonzero of
//! the state part, the rank of `[A(theta), B]` at binary `theta` follows
//! exactly from integer counts — no floating-point rank decisions.

use nalgebra::DMatrix;

use crate::affine::AffineFamily;
use crate::error::{Error, Result};

/// A subset-sum instance: does some nonempty subset of `values` sum to
/// `target`?  The radius reduction fixes `target = -1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSumInstance {
    pub values: Vec<i64>,
    pub target: i64,
}

impl SubsetSumInstance {
    pub fn new(values: Vec<i64>, target: i64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Construction("subset-sum needs at least one value".into()));
        }
        Ok(Self { values, target })
    }

    /// The reduction's normal form: target fixed at `-1`.
    pub fn with_unit_target(values: Vec<i64>) -> Result<Self> {
        Self::new(values, -1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Exact subset-sum decision by enumeration; returns a witness subset
/// (indices into `values`) when feasible.  Refuses `p > 24`.
pub fn subset_sum_bruteforce(inst: &SubsetSumInstance) -> Result<Option<Vec<usize>>> {
    let p = inst.len();
    if p > 24 {
        return Err(Error::TooLarge(format!(
            "brute force enumerates 2^p subsets; p = {p} > 24"
        )));
    }
    for mask in 1u64..(1u64 << p) {
        let sum: i64 = (0..p)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| inst.values[i])
            .sum();
        if sum == inst.target {
            return Ok(Some((0..p).filter(|&i| mask & (1 << i) != 0).collect()));
        }
    }
    Ok(None)
}

/// Standard Vandermonde matrix on the given nodes: row `i` is
/// `(1, beta_i, beta_i^2, ..., beta_i^{cols-1})`.  Distinct nodes make
/// every `cols`-row submatrix nonsingular.
pub fn vandermonde(nodes: &[f64], cols: usize) -> Result<DMatrix<f64>> {
    if cols == 0 {
        return Err(Error::Construction("vandermonde needs at least one column".into()));
    }
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            if nodes[i] == nodes[j] {
                return Err(Error::Construction(format!(
                    "duplicate vandermonde node {} at positions {i} and {j}",
                    nodes[i]
                )));
            }
        }
    }
    Ok(DMatrix::from_fn(nodes.len(), cols, |i, j| {
        nodes[i].powi(j as i32)
    }))
}

/// `count` Chebyshev points on `[-1, 1]`, a well-conditioned alternative to
/// integer nodes (whose Vandermonde blows up for `p` beyond about six).
pub fn chebyshev_nodes(count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * count) as f64).cos())
        .collect()
}

/// Node choice for the reduction's Vandermonde input matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NodeScheme {
    /// Integers `1..=2p+2`.
    #[default]
    Integer,
    /// Chebyshev points on `[-1, 1]`.
    Chebyshev,
}

impl NodeScheme {
    fn nodes(self, count: usize) -> Vec<f64> {
        match self {
            NodeScheme::Integer => (1..=count).map(|i| i as f64).collect(),
            NodeScheme::Chebyshev => chebyshev_nodes(count),
        }
    }
}

/// Builds the reduction pair `(A(theta), B)` for a subset-sum instance with
/// target `-1`.  `A(theta)` is the subdiagonal construction; `B` is the
/// constant Vandermonde matrix (its basis matrices are all zero).
pub fn build_rscr_reduction(
    inst: &SubsetSumInstance,
    scheme: NodeScheme,
) -> Result<(AffineFamily, AffineFamily)> {
    if inst.target != -1 {
        return Err(Error::Construction(format!(
            "the reduction is normalized to target -1, got {}",
            inst.target
        )));
    }
    let p = inst.len();
    let dim = 2 * p + 2;

    // Base: subdiagonal at theta = 0 is (1, 1, 0, 1, 0, ..., 1, 0).
    let mut base = DMatrix::zeros(dim, dim);
    base[(1, 0)] = 1.0;
    for i in 0..p {
        base[(2 * i + 2, 2 * i + 1)] = 1.0;
    }
    // Basis k: a_k at (1,0); -1 at the `1 - theta_k` slot; +1 at the
    // `theta_k` slot.
    let mut basis = Vec::with_capacity(p);
    for k in 0..p {
        let mut g = DMatrix::zeros(dim, dim);
        g[(1, 0)] = inst.values[k] as f64;
        g[(2 * k + 2, 2 * k + 1)] = -1.0;
        g[(2 * k + 3, 2 * k + 2)] = 1.0;
        basis.push(g);
    }
    let fam_a = AffineFamily::new(base, basis)?;

    let b = vandermonde(&scheme.nodes(dim), p + 1)?;
    let fam_b = AffineFamily::constant(b, p)?;
    Ok((fam_a, fam_b))
}

/// Exact integer subdiagonal of `A(theta)` at a binary `theta`.
fn subdiagonal_at_binary(inst: &SubsetSumInstance, theta: &[bool]) -> Vec<i64> {
    let p = inst.len();
    let picked: i64 = theta
        .iter()
        .zip(&inst.values)
        .filter_map(|(&t, &a)| t.then_some(a))
        .sum();
    let mut diag = Vec::with_capacity(2 * p + 1);
    diag.push(1 + picked);
    for &t in theta {
        diag.push(if t { 0 } else { 1 });
        diag.push(if t { 1 } else { 0 });
    }
    diag
}

/// Exact rank of `[A(theta), B]` at a binary `theta`.
///
/// Each column of `A(theta)` holds at most one nonzero (the subdiagonal
/// entry), so the rows with a nonzero state entry are independent of
/// everything else, and the remaining rows contribute the rank of the
/// corresponding Vandermonde rows — `min(count, p+1)` because any `p+1`
/// rows of `B` are independent.
pub fn binary_rank(inst: &SubsetSumInstance, theta: &[bool]) -> Result<usize> {
    if theta.len() != inst.len() {
        return Err(Error::Dimension(format!(
            "theta has {} entries, instance has {}",
            theta.len(),
            inst.len()
        )));
    }
    let p = inst.len();
    let dim = 2 * p + 2;
    let nonzero = subdiagonal_at_binary(inst, theta)
        .iter()
        .filter(|&&e| e != 0)
        .count();
    let zero_rows = dim - nonzero;
    Ok(nonzero + zero_rows.min(p + 1))
}

/// Exact uncontrollability of the reduction pair at a binary `theta`:
/// `rank [A(theta), B] < 2p + 2`.  (All eigenvalues of `A(theta)` are zero,
/// so the PBH test reduces to the rank at `z = 0`.)
pub fn binary_uncontrollable(inst: &SubsetSumInstance, theta: &[bool]) -> Result<bool> {
    Ok(binary_rank(inst, theta)? < 2 * inst.len() + 2)
}

/// Report of [`reduction_equivalence_check`].
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    /// Brute-force subset-sum feasibility.
    pub subset_sum_feasible: bool,
    /// Binary parameter vectors making the pair uncontrollable.
    pub uncontrollable_binaries: usize,
    /// Binary vectors checked (`2^p`).
    pub binaries_checked: usize,
    /// First binary vector violating the equivalence, if any.
    pub counterexample: Option<Vec<bool>>,
    /// For infeasible instances: smallest scaled `sigma_min` seen over the
    /// random real probes (None when the instance is feasible).
    pub min_scaled_sigma: Option<f64>,
    pub random_probes: usize,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none() && self.min_scaled_sigma.is_none_or(|s| s > 1e-6)
    }
}

/// Verifies the reduction's defining equivalence on an instance:
/// over all binary `theta`, the pair is uncontrollable exactly when the
/// selected subset sums to `-1`; and for infeasible instances, random real
/// `theta` never produce a rank-deficient `[A(theta), B]` (checked as a
/// scaled `sigma_min` staying above `1e-6` over `probes` draws).
///
/// Random probes use Chebyshev nodes when `p > 6`: the integer-node
/// Vandermonde is too ill-conditioned there for a meaningful floating-point
/// rank decision, and the node choice does not affect the equivalence.
pub fn reduction_equivalence_check(
    inst: &SubsetSumInstance,
    probes: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    let p = inst.len();
    if p > 12 {
        return Err(Error::TooLarge(format!(
            "equivalence check enumerates 2^p binary vectors; p = {p} > 12"
        )));
    }
    let feasible = subset_sum_bruteforce(inst)?.is_some();

    let mut uncontrollable = 0usize;
    let mut counterexample = None;
    for mask in 0u64..(1u64 << p) {
        let theta: Vec<bool> = (0..p).map(|i| mask & (1 << i) != 0).collect();
        let picked: i64 = theta
            .iter()
            .zip(&inst.values)
            .filter_map(|(&t, &a)| t.then_some(a))
            .sum();
        let expect = picked == -1;
        let got = binary_uncontrollable(inst, &theta)?;
        if got {
            uncontrollable += 1;
        }
        if got != expect && counterexample.is_none() {
            counterexample = Some(theta);
        }
    }

    // Random-theta probe only matters for infeasible instances, where the
    // pencil must keep full rank everywhere.
    let min_scaled_sigma = if feasible {
        None
    } else {
        use rand::prelude::*;
        let scheme = if p > 6 {
            NodeScheme::Chebyshev
        } else {
            NodeScheme::Integer
        };
        let (fam_a, fam_b) = build_rscr_reduction(inst, scheme)?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let dim = 2 * p + 2;
        let mut min_sigma = f64::INFINITY;
        for _ in 0..probes {
            let theta: Vec<f64> = (0..p).map(|_| rng.random_range(-2.0..2.0)).collect();
            let a = fam_a.evaluate(&theta)?;
            let mut ab = DMatrix::zeros(dim, dim + p + 1);
            ab.view_mut((0, 0), (dim, dim)).copy_from(&a);
            ab.view_mut((0, dim), (dim, p + 1)).copy_from(fam_b.base());
            // Row scaling keeps the Vandermonde magnitudes from swamping
            // the sigma threshold.
            for mut row in ab.row_iter_mut() {
                let norm = row.norm();
                if norm > 0.0 {
                    row /= norm;
                }
            }
            min_sigma = min_sigma.min(crate::tnn::sigma_min(&ab)?);
        }
        Some(min_sigma)
    };

    Ok(EquivalenceReport {
        subset_sum_feasible: feasible,
        uncontrollable_binaries: uncontrollable,
        binaries_checked: 1 << p,
        counterexample,
        min_scaled_sigma,
        random_probes: probes,
    })
}

/// The determinant identity of the imaginary-axis-eigenvalue reduction:
/// `sum_i theta_i^2 (theta_i - 1)^2 + (1 + sum_i theta_i a_i)^2`.  It is a
/// sum of squares, vanishing exactly at binary `theta` whose selected
/// subset sums to `-1`.
pub fn theorem3_determinant(theta: &[f64], values: &[i64]) -> f64 {
    let mut det = 0.0;
    for &t in theta {
        det += t * t * (t - 1.0) * (t - 1.0);
    }
    let mut affine = 1.0;
    for (&t, &a) in theta.iter().zip(values) {
        affine += t * a as f64;
    }
    det + affine * affine
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    #[test]
    fn bruteforce_full_set_witness() {
        let inst = SubsetSumInstance::with_unit_target(vec![2, -3]).unwrap();
        let witness = subset_sum_bruteforce(&inst).unwrap().unwrap();
        assert_eq!(witness, vec![0, 1]);
    }

    #[test]
    fn bruteforce_positive_values_infeasible() {
        let inst = SubsetSumInstance::with_unit_target(vec![1, 2]).unwrap();
        assert!(subset_sum_bruteforce(&inst).unwrap().is_none());
    }

    fn subset_sum_dp(values: &[i64], target: i64) -> bool {
        // Independent dynamic-programming oracle over reachable sums.
        let mut reachable: HashSet<i64> = HashSet::new();
        for &v in values {
            let mut next = reachable.clone();
            next.insert(v);
            for &s in &reachable {
                next.insert(s + v);
            }
            reachable = next;
        }
        reachable.contains(&target)
    }

    #[test]
    fn bruteforce_agrees_with_dp_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for _ in 0..50 {
            let values: Vec<i64> = (0..10).map(|_| rng.random_range(-20..=20)).collect();
            let target = rng.random_range(-30..=30);
            let inst = SubsetSumInstance::new(values.clone(), target).unwrap();
            let brute = subset_sum_bruteforce(&inst).unwrap();
            assert_eq!(brute.is_some(), subset_sum_dp(&values, target));
            if let Some(witness) = brute {
                let sum: i64 = witness.iter().map(|&i| values[i]).sum();
                assert_eq!(sum, target);
                assert!(!witness.is_empty());
            }
        }
    }

    #[test]
    fn vandermonde_small_case() {
        let v = vandermonde(&[0.0, 1.0, 2.0], 2).unwrap();
        assert_eq!(v, DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0]));
        // Every 2x2 row pair is nonsingular.
        for i in 0..3 {
            for j in (i + 1)..3 {
                let m = DMatrix::from_row_slice(
                    2,
                    2,
                    &[v[(i, 0)], v[(i, 1)], v[(j, 0)], v[(j, 1)]],
                );
                assert!(m.determinant().abs() > 0.0);
            }
        }
    }

    #[test]
    fn vandermonde_rejects_duplicates() {
        assert!(vandermonde(&[1.0, 2.0, 1.0], 2).is_err());
    }

    #[test]
    fn vandermonde_row_submatrices_nonsingular() {
        let p = 3;
        let dim = 2 * p + 2;
        let nodes: Vec<f64> = (1..=dim).map(|i| i as f64).collect();
        let v = vandermonde(&nodes, p + 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(89);
        for _ in 0..200 {
            let mut rows: Vec<usize> = (0..dim).collect();
            rows.shuffle(&mut rng);
            rows.truncate(p + 1);
            let sub = DMatrix::from_fn(p + 1, p + 1, |i, j| v[(rows[i], j)]);
            assert!(sub.determinant().abs() > 0.0);
        }
    }

    #[test]
    fn chebyshev_nodes_better_conditioned_than_integers() {
        for p in 4..7 {
            let count = 2 * p + 2;
            let cond = |nodes: &[f64]| {
                let v = vandermonde(nodes, p + 1).unwrap();
                let sv = crate::tnn::singular_values(&v).unwrap();
                sv[0] / sv.last().unwrap()
            };
            let integer: Vec<f64> = (1..=count).map(|i| i as f64).collect();
            let cheb = chebyshev_nodes(count);
            assert!(
                cond(&cheb) < cond(&integer),
                "p = {p}: chebyshev {} vs integer {}",
                cond(&cheb),
                cond(&integer)
            );
        }
    }

    #[test]
    fn exhaustive_submatrix_independence_small_p() {
        // Every (p+1)-row submatrix of B is nonsingular, exhaustively for
        // p <= 4.
        for p in 1..=4usize {
            let dim = 2 * p + 2;
            let nodes: Vec<f64> = (1..=dim).map(|i| i as f64).collect();
            let v = vandermonde(&nodes, p + 1).unwrap();
            let mut count = 0;
            let mut rows = vec![0usize; p + 1];
            fn rec(
                v: &DMatrix<f64>,
                rows: &mut Vec<usize>,
                level: usize,
                start: usize,
                dim: usize,
                count: &mut usize,
            ) {
                if level == rows.len() {
                    let sub =
                        DMatrix::from_fn(rows.len(), rows.len(), |i, j| v[(rows[i], j)]);
                    assert!(sub.determinant().abs() > 1e-12);
                    *count += 1;
                    return;
                }
                for r in start..dim {
                    rows[level] = r;
                    rec(v, rows, level + 1, r + 1, dim, count);
                }
            }
            rec(&v, &mut rows, 0, 0, dim, &mut count);
            assert!(count > 0);
        }
    }

    #[test]
    fn reduction_single_negative_one() {
        let inst = SubsetSumInstance::with_unit_target(vec![-1]).unwrap();
        let (fam_a, fam_b) = build_rscr_reduction(&inst, NodeScheme::Integer).unwrap();
        // theta = 1 selects the subset {-1}: the first subdiagonal entry and
        // the `1 - theta_1` entry vanish, leaving rank p = 1.
        let a = fam_a.evaluate(&[1.0]).unwrap();
        assert_eq!(a.rank(1e-12), 1);
        assert!(binary_uncontrollable(&inst, &[true]).unwrap());
        // And theta = 0 is controllable.
        let a0 = fam_a.evaluate(&[0.0]).unwrap();
        let b = fam_b.evaluate(&[0.0]).unwrap();
        assert!(oracle::pbh_controllability(&a0, &b).unwrap());
    }

    #[test]
    fn reduction_infeasible_pair_stays_controllable() {
        let inst = SubsetSumInstance::with_unit_target(vec![1, 2]).unwrap();
        for mask in 0..4u32 {
            let theta = [(mask & 1) != 0, (mask & 2) != 0];
            assert!(!binary_uncontrollable(&inst, &theta).unwrap());
        }
        let report = reduction_equivalence_check(&inst, 1000, 91).unwrap();
        assert!(report.holds());
        assert!(!report.subset_sum_feasible);
        assert_eq!(report.uncontrollable_binaries, 0);
        assert!(report.min_scaled_sigma.unwrap() > 1e-6);
    }

    #[test]
    fn reduction_feasible_instances_hold() {
        for values in [vec![-1], vec![3, -4], vec![2, -3]] {
            let inst = SubsetSumInstance::with_unit_target(values).unwrap();
            let report = reduction_equivalence_check(&inst, 0, 93).unwrap();
            assert!(report.holds());
            assert!(report.subset_sum_feasible);
            assert!(report.uncontrollable_binaries > 0);
        }
    }

    #[test]
    fn binary_rank_matches_float_rank_on_small_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        for _ in 0..20 {
            let p = rng.random_range(1..=3);
            let values: Vec<i64> = (0..p).map(|_| rng.random_range(-4..=4)).collect();
            let inst = SubsetSumInstance::with_unit_target(values).unwrap();
            let (fam_a, fam_b) = build_rscr_reduction(&inst, NodeScheme::Integer).unwrap();
            let dim = 2 * p + 2;
            for mask in 0u64..(1 << p) {
                let theta_b: Vec<bool> = (0..p).map(|i| mask & (1 << i) != 0).collect();
                let theta_f: Vec<f64> =
                    theta_b.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
                let a = fam_a.evaluate(&theta_f).unwrap();
                let mut ab = DMatrix::zeros(dim, dim + p + 1);
                ab.view_mut((0, 0), (dim, dim)).copy_from(&a);
                ab.view_mut((0, dim), (dim, p + 1)).copy_from(fam_b.base());
                let float_rank = ab.rank(1e-9);
                let exact = binary_rank(&inst, &theta_b).unwrap();
                assert_eq!(exact, float_rank, "p={p} mask={mask}");
            }
        }
    }

    #[test]
    fn feasible_witness_gives_rank_p_state_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..20 {
            let p = rng.random_range(1..=10);
            let values: Vec<i64> = (0..p).map(|_| rng.random_range(-10..=10)).collect();
            let inst = SubsetSumInstance::with_unit_target(values.clone()).unwrap();
            if let Some(witness) = subset_sum_bruteforce(&inst).unwrap() {
                let theta: Vec<bool> = (0..p).map(|i| witness.contains(&i)).collect();
                let nonzero = super::subdiagonal_at_binary(&inst, &theta)
                    .iter()
                    .filter(|&&e| e != 0)
                    .count();
                // rank A(theta) equals the number of nonzero subdiagonal
                // entries; the witness kills p + 1 of the 2p + 1 entries.
                assert_eq!(nonzero, p);
            }
        }
    }

    #[test]
    fn determinant_identity_values() {
        assert_eq!(theorem3_determinant(&[0.0], &[-1]), 1.0);
        assert_eq!(theorem3_determinant(&[1.0], &[-1]), 0.0);
        // Infeasible set {1, 2}: strictly positive on a grid.
        for i in 0..21 {
            for j in 0..21 {
                let t = [i as f64 * 0.1 - 1.0, j as f64 * 0.1 - 1.0];
                assert!(theorem3_determinant(&t, &[1, 2]) > 0.0);
            }
        }
    }

    #[test]
    fn determinant_identity_is_sum_of_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        for _ in 0..500 {
            let p = rng.random_range(1..5);
            let theta: Vec<f64> = (0..p).map(|_| rng.random_range(-3.0..3.0)).collect();
            let values: Vec<i64> = (0..p).map(|_| rng.random_range(-5..=5)).collect();
            assert!(theorem3_determinant(&theta, &values) >= 0.0);
        }
    }
}
