//! Group k-sparsity index and greedy optimal decompositions.
//!
//! The sparsity index of `x` is the smallest norm of `x - x_L` over all
//! group k-sparse sets `L`. The optimal decomposition repeats that
//! minimization on the residual, restricted to groups not yet used, until
//! the residual support is exhausted. Unlike conventional sparsity, the
//! stages need not be ordered by entry magnitude; `check_interleaving_counterexample`
//! detects exactly that.

use crate::error::{Error, Result};
use crate::group::{enumerate_gks, enumerate_gks_over, restrict, restrict_complement, GroupKSparseSet, GroupPartition};
use crate::norms::{eval_norm, NormSpec};

/// Stages `L_0..L_s`, the matching parts `x_{L_0}..x_{L_s}`, and the
/// sparsity index `sigma = ||x - x_{L_0}||`.
#[derive(Clone, Debug)]
pub struct SparseDecomposition {
    pub lambdas: Vec<GroupKSparseSet>,
    pub parts: Vec<Vec<f64>>,
    pub sigma: f64,
}

impl SparseDecomposition {
    /// Exact sum of the parts.
    pub fn reconstruct(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for part in &self.parts {
            for (o, v) in out.iter_mut().zip(part) {
                *o += v;
            }
        }
        out
    }
}

/// Minimize `||x - x_L||` over all group k-sparse `L`. Ties break toward the
/// lexicographically smallest member-group-id set, which is the enumeration
/// order, so the first strict improvement wins.
pub fn sparsity_index(
    x: &[f64],
    spec: &NormSpec,
    p: &GroupPartition,
    cap: usize,
) -> Result<(f64, GroupKSparseSet)> {
    if x.len() != p.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), got: x.len() });
    }
    let sets = enumerate_gks(p, cap)?;
    argmin_residual(x, spec, p, &sets)
}

fn argmin_residual(
    x: &[f64],
    spec: &NormSpec,
    p: &GroupPartition,
    sets: &[GroupKSparseSet],
) -> Result<(f64, GroupKSparseSet)> {
    let mut best_val = f64::INFINITY;
    let mut best: Option<&GroupKSparseSet> = None;
    for lam in sets {
        let resid = restrict_complement(x, lam.indices())?;
        let val = eval_norm(spec, p, &resid)?;
        if val < best_val {
            best_val = val;
            best = Some(lam);
        }
    }
    let best = best.expect("enumeration yields at least one set");
    Ok((best_val, best.clone()))
}

/// Greedy optimal group k-sparse decomposition of `x`. Stage 0 achieves the
/// sparsity index; stage `i` minimizes the residual norm over unions of
/// groups not yet used. The zero vector decomposes into zero stages.
pub fn optimal_decomposition(
    x: &[f64],
    spec: &NormSpec,
    p: &GroupPartition,
    cap: usize,
) -> Result<SparseDecomposition> {
    if x.len() != p.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), got: x.len() });
    }
    let mut residual = x.to_vec();
    let mut unused: Vec<usize> = (0..p.num_groups()).collect();
    let mut lambdas = Vec::new();
    let mut parts = Vec::new();
    let mut sigma = 0.0;

    // Residual entries on consumed groups are exactly zero (x_i - x_i), so
    // an exact nonzero test terminates the recursion.
    while residual.iter().any(|&v| v != 0.0) {
        let candidates = enumerate_gks_over(p, &unused, cap)?;
        let (val, lam) = argmin_residual(&residual, spec, p, &candidates)?;
        if lambdas.is_empty() {
            sigma = val;
        }
        let part = restrict(&residual, lam.indices())?;
        for &i in lam.indices() {
            residual[i] = 0.0;
        }
        unused.retain(|g| !lam.member_group_ids().contains(g));
        lambdas.push(lam);
        parts.push(part);
    }
    Ok(SparseDecomposition { lambdas, parts, sigma })
}

/// True when the largest entry of the stage-1 part exceeds the smallest
/// nonzero entry of the stage-0 part under the l1 norm, i.e. the group
/// decomposition is not magnitude-ordered. With all-singleton groups the
/// stages are the sorted magnitudes and this can never hold.
pub fn check_interleaving_counterexample(
    x: &[f64],
    p: &GroupPartition,
    cap: usize,
) -> Result<bool> {
    let dec = optimal_decomposition(x, &NormSpec::L1, p, cap)?;
    if dec.lambdas.len() < 2 {
        return Ok(false);
    }
    let max_stage1 = dec.parts[1].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min_nonzero_stage0 = dec.parts[0]
        .iter()
        .filter(|v| **v != 0.0)
        .fold(f64::INFINITY, |m, v| m.min(v.abs()));
    Ok(max_stage1 > min_nonzero_stage0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::DEFAULT_ENUM_CAP;

    fn two_pair_partition() -> GroupPartition {
        GroupPartition::new(4, vec![vec![0, 1], vec![2, 3]], 2).unwrap()
    }

    fn mixed_partition() -> GroupPartition {
        GroupPartition::new(8, vec![vec![0], vec![1, 2, 3], vec![4, 5], vec![6, 7]], 4).unwrap()
    }

    #[test]
    fn worked_example_four_dim() {
        let p = two_pair_partition();
        let x = [1.0, 0.1, 0.6, 0.6];
        let (sigma, lam0) = sparsity_index(&x, &NormSpec::L1, &p, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(lam0.indices(), &[2, 3]);
        assert_eq!(lam0.member_group_ids(), &[1]);
        assert!((sigma - 1.1).abs() < 1e-15);

        let dec = optimal_decomposition(&x, &NormSpec::L1, &p, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(dec.lambdas.len(), 2);
        assert_eq!(dec.parts[0], vec![0.0, 0.0, 0.6, 0.6]);
        assert_eq!(dec.parts[1], vec![1.0, 0.1, 0.0, 0.0]);
    }

    #[test]
    fn worked_example_eight_dim() {
        let p = mixed_partition();
        let x = [0.1, 1.0, 0.2, 0.3, 0.4, 0.5, 0.4, 0.7];
        let (sigma, lam0) = sparsity_index(&x, &NormSpec::L1, &p, DEFAULT_ENUM_CAP).unwrap();
        // L_0 = G3 u G4, sigma = 0.1 + 1 + 0.2 + 0.3.
        assert_eq!(lam0.member_group_ids(), &[2, 3]);
        assert!((sigma - 1.6).abs() < 1e-15);

        let dec = optimal_decomposition(&x, &NormSpec::L1, &p, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(dec.lambdas[0].member_group_ids(), &[2, 3]);
        assert_eq!(dec.lambdas[1].member_group_ids(), &[0, 1]);
        assert_eq!(dec.parts[0], vec![0.0, 0.0, 0.0, 0.0, 0.4, 0.5, 0.4, 0.7]);
        assert_eq!(dec.parts[1], vec![0.1, 1.0, 0.2, 0.3, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn group_sparse_vector_has_zero_index() {
        let p = two_pair_partition();
        let (sigma, _) =
            sparsity_index(&[0.0, 0.0, 0.7, -0.2], &NormSpec::gl(), &p, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(sigma, 0.0);
    }

    #[test]
    fn zero_vector_decomposes_to_nothing() {
        let p = two_pair_partition();
        let dec = optimal_decomposition(&[0.0; 4], &NormSpec::L1, &p, DEFAULT_ENUM_CAP).unwrap();
        assert!(dec.lambdas.is_empty());
        assert_eq!(dec.sigma, 0.0);
    }

    #[test]
    fn reconstruction_is_exact() {
        let p = mixed_partition();
        let x = [0.1, 1.0, 0.2, 0.3, 0.4, 0.5, 0.4, 0.7];
        let dec = optimal_decomposition(&x, &NormSpec::gl(), &p, DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(dec.reconstruct(8), x.to_vec());
    }

    #[test]
    fn interleaving_flag_on_worked_example() {
        let p = two_pair_partition();
        assert!(check_interleaving_counterexample(
            &[1.0, 0.1, 0.6, 0.6],
            &p,
            DEFAULT_ENUM_CAP
        )
        .unwrap());
    }

    #[test]
    fn interleaving_never_fires_for_singletons() {
        let p = GroupPartition::singletons(6, 2).unwrap();
        let xs = [
            [3.0, -2.0, 1.5, 0.7, 0.3, 0.1],
            [1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
            [0.0, 5.0, 0.0, -4.0, 2.0, 0.5],
        ];
        for x in xs {
            assert!(!check_interleaving_counterexample(&x, &p, DEFAULT_ENUM_CAP).unwrap());
        }
    }

    #[test]
    fn equal_magnitudes_do_not_interleave() {
        let p = two_pair_partition();
        assert!(!check_interleaving_counterexample(
            &[0.5, 0.5, 0.5, 0.5],
            &p,
            DEFAULT_ENUM_CAP
        )
        .unwrap());
    }

    #[test]
    fn singleton_stage_zero_is_top_k_by_magnitude() {
        let p = GroupPartition::singletons(6, 3).unwrap();
        let x = [0.2, -3.0, 1.0, 1.0, 0.1, 2.5];
        let (_, lam0) = sparsity_index(&x, &NormSpec::L1, &p, DEFAULT_ENUM_CAP).unwrap();
        // Top 3 magnitudes: indices 1, 5, then the 1.0 tie breaks to index 2.
        assert_eq!(lam0.indices(), &[1, 2, 5]);
    }
}
