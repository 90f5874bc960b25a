//! Penalty and approximation norms, and decomposability checks.
//!
//! Four variants ship: plain `l1`, group LASSO (`gl`), sparse group LASSO
//! (`sgl` with mixing weight `mu`), and tree-structured norms built from a
//! laminar family of node sets. Any norm of the form
//! `||x|| = sum_i ||x_{G_i}||_i` over a partition is decomposable: the
//! triangle inequality is tight for summands supported on disjoint unions of
//! groups. Tree norms reduce to that form by flattening to their maximal
//! node sets.

use crate::error::{Error, Result};
use crate::group::GroupPartition;
use crate::linalg::{norm1, norm2};
use crate::rng::Rng;

/// Norm applied within a tree node set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeNorm {
    L1,
    L2,
}

impl NodeNorm {
    fn eval(&self, v: &[f64]) -> f64 {
        match self {
            NodeNorm::L1 => norm1(v),
            NodeNorm::L2 => norm2(v),
        }
    }
}

/// Descriptor of the penalty/approximation norm.
#[derive(Clone, Debug, PartialEq)]
pub enum NormSpec {
    L1,
    /// Group LASSO; optional strictly positive per-group weights.
    GroupLasso { weights: Option<Vec<f64>> },
    /// Sparse group LASSO with mixing weight `mu` in `[0,1]`; `mu = 1` is
    /// the group LASSO, `mu = 0` is plain l1.
    SparseGroupLasso { mu: f64 },
    /// Sum of per-node norms over a laminar family of node sets.
    TreeStructured { nodes: Vec<Vec<usize>>, node_norm: NodeNorm },
}

impl NormSpec {
    pub fn gl() -> Self {
        NormSpec::GroupLasso { weights: None }
    }

    pub fn sgl(mu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::InvalidRange { name: "mu" });
        }
        Ok(NormSpec::SparseGroupLasso { mu })
    }

    pub fn tree(nodes: Vec<Vec<usize>>, node_norm: NodeNorm) -> Self {
        NormSpec::TreeStructured { nodes, node_norm }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NormSpec::L1 => "l1",
            NormSpec::GroupLasso { .. } => "gl",
            NormSpec::SparseGroupLasso { .. } => "sgl",
            NormSpec::TreeStructured { .. } => "tree",
        }
    }
}

fn values_at(x: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| x[i]).collect()
}

/// Evaluate the norm of `x` under `spec` over partition `p`.
pub fn eval_norm(spec: &NormSpec, p: &GroupPartition, x: &[f64]) -> Result<f64> {
    if x.len() != p.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), got: x.len() });
    }
    match spec {
        NormSpec::L1 => Ok(norm1(x)),
        NormSpec::GroupLasso { weights } => {
            if let Some(w) = weights {
                if w.len() != p.num_groups() {
                    return Err(Error::DimensionMismatch {
                        expected: p.num_groups(),
                        got: w.len(),
                    });
                }
                if w.iter().any(|&wi| wi <= 0.0) {
                    return Err(Error::InvalidRange { name: "weights" });
                }
                Ok(p.groups()
                    .iter()
                    .zip(w)
                    .map(|(g, wi)| wi * norm2(&values_at(x, g)))
                    .sum())
            } else {
                Ok(p.groups().iter().map(|g| norm2(&values_at(x, g))).sum())
            }
        }
        NormSpec::SparseGroupLasso { mu } => {
            if !(0.0..=1.0).contains(mu) {
                return Err(Error::InvalidRange { name: "mu" });
            }
            // Endpoints delegate so the reductions to l1 and the group
            // LASSO hold exactly, not just up to summation order.
            if *mu == 0.0 {
                return Ok(norm1(x));
            }
            if *mu == 1.0 {
                return eval_norm(&NormSpec::gl(), p, x);
            }
            Ok(p.groups()
                .iter()
                .map(|g| {
                    let v = values_at(x, g);
                    (1.0 - mu) * norm1(&v) + mu * norm2(&v)
                })
                .sum())
        }
        NormSpec::TreeStructured { nodes, node_norm } => {
            check_laminar(nodes)?;
            let mut covered = vec![false; x.len()];
            let mut total = 0.0;
            for node in nodes {
                for &i in node {
                    if i >= x.len() {
                        return Err(Error::IndexOutOfRange { index: i, n: x.len() });
                    }
                    covered[i] = true;
                }
                total += node_norm.eval(&values_at(x, node));
            }
            // Indices outside every node set contribute their absolute value,
            // matching the singleton groups added by `flatten_tree`.
            for (i, &c) in covered.iter().enumerate() {
                if !c {
                    total += x[i].abs();
                }
            }
            Ok(total)
        }
    }
}

/// Verify the laminar condition: any two node sets are nested or disjoint.
pub fn check_laminar(nodes: &[Vec<usize>]) -> Result<()> {
    let as_sets: Vec<Vec<usize>> = nodes
        .iter()
        .map(|nd| {
            let mut s = nd.clone();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    for i in 0..as_sets.len() {
        for j in (i + 1)..as_sets.len() {
            let inter = intersection_size(&as_sets[i], &as_sets[j]);
            if inter == 0 {
                continue;
            }
            if inter != as_sets[i].len() && inter != as_sets[j].len() {
                return Err(Error::LaminarViolation { a: i, b: j });
            }
        }
    }
    Ok(())
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    // Both sorted.
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Result of flattening a tree-structured norm: the maximal node sets become
/// partition groups (plus singletons for uncovered indices), and each group
/// carries the list of nested node terms whose sum is its composite norm.
#[derive(Clone, Debug)]
pub struct FlattenedTree {
    pub groups: Vec<Vec<usize>>,
    /// Per group: the `(node set, node norm)` terms summed over that group.
    pub per_group_terms: Vec<Vec<(Vec<usize>, NodeNorm)>>,
}

impl FlattenedTree {
    /// Composite norm of group `gid` evaluated on the ambient vector.
    pub fn group_norm(&self, gid: usize, x: &[f64]) -> f64 {
        self.per_group_terms[gid]
            .iter()
            .map(|(node, nn)| nn.eval(&values_at(x, node)))
            .sum()
    }
}

/// Flatten a laminar node family over `{0..n-1}` into partition form.
/// Maximal sets are deduplicated and pairwise disjoint; uncovered indices
/// get singleton groups with an l1 term so the result is a true partition.
pub fn flatten_tree(nodes: &[Vec<usize>], node_norm: NodeNorm, n: usize) -> Result<FlattenedTree> {
    for node in nodes {
        if node.is_empty() {
            return Err(Error::EmptyGroup { group: 0 });
        }
        for &i in node {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
        }
    }
    check_laminar(nodes)?;

    let sorted: Vec<Vec<usize>> = nodes
        .iter()
        .map(|nd| {
            let mut s = nd.clone();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();

    // A node is maximal when no other node strictly contains it; equal sets
    // keep a single representative group.
    let mut maximal: Vec<Vec<usize>> = Vec::new();
    for (i, cand) in sorted.iter().enumerate() {
        let strictly_contained = sorted.iter().enumerate().any(|(j, other)| {
            j != i
                && other.len() > cand.len()
                && intersection_size(cand, other) == cand.len()
        });
        if !strictly_contained && !maximal.contains(cand) {
            maximal.push(cand.clone());
        }
    }
    maximal.sort_by_key(|g| g[0]);

    let mut covered = vec![false; n];
    for g in &maximal {
        for &i in g {
            covered[i] = true;
        }
    }

    let mut groups = maximal;
    let mut per_group_terms: Vec<Vec<(Vec<usize>, NodeNorm)>> = groups
        .iter()
        .map(|g| {
            sorted
                .iter()
                .filter(|node| intersection_size(node, g) == node.len())
                .map(|node| (node.clone(), node_norm))
                .collect()
        })
        .collect();
    for (i, &c) in covered.iter().enumerate() {
        if !c {
            groups.push(vec![i]);
            per_group_terms.push(vec![(vec![i], NodeNorm::L1)]);
        }
    }
    Ok(FlattenedTree { groups, per_group_terms })
}

/// Outcome of an empirical decomposability check.
#[derive(Clone, Debug)]
pub struct DecomposabilityReport {
    pub trials: usize,
    /// Worst relative violation of `||u+v|| >= ||u|| + gamma ||v||`; for
    /// `gamma = 1` the equality form `| ||u+v|| - ||u|| - ||v|| |`.
    pub max_violation: f64,
    pub gamma_tested: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub const DECOMPOSABILITY_TOL: f64 = 1e-12;

/// Sample pairs `(u, v)` supported on disjoint unions of groups and measure
/// the worst violation across `trials` draws. For tree norms the sampling
/// partition is the flattened one.
pub fn check_decomposability(
    spec: &NormSpec,
    p: &GroupPartition,
    gamma: f64,
    trials: usize,
    seed: u64,
) -> Result<DecomposabilityReport> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidRange { name: "gamma" });
    }
    let flattened;
    let groups: &[Vec<usize>] = match spec {
        NormSpec::TreeStructured { nodes, node_norm } => {
            flattened = flatten_tree(nodes, *node_norm, p.n())?;
            &flattened.groups
        }
        _ => p.groups(),
    };
    if groups.len() < 2 {
        return Err(Error::NoDisjointPairsAvailable);
    }

    let mut rng = Rng::stream(seed, 0x6b5f);
    let mut max_violation: f64 = f64::NEG_INFINITY;
    for _ in 0..trials {
        // Two anchor groups guarantee both sides are nonempty; the rest are
        // assigned to u, v, or neither.
        let gu = rng.below(groups.len());
        let gv = {
            let mut g = rng.below(groups.len() - 1);
            if g >= gu {
                g += 1;
            }
            g
        };
        let mut u = vec![0.0; p.n()];
        let mut v = vec![0.0; p.n()];
        for (gid, group) in groups.iter().enumerate() {
            let side = if gid == gu {
                0
            } else if gid == gv {
                1
            } else {
                rng.below(3)
            };
            match side {
                0 => {
                    for &i in group {
                        u[i] = rng.normal();
                    }
                }
                1 => {
                    for &i in group {
                        v[i] = rng.normal();
                    }
                }
                _ => {}
            }
        }
        let nu = eval_norm(spec, p, &u)?;
        let nv = eval_norm(spec, p, &v)?;
        let sum: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let nuv = eval_norm(spec, p, &sum)?;
        let violation = if gamma == 1.0 {
            (nu + nv - nuv).abs()
        } else {
            nu + gamma * nv - nuv
        };
        let rel = violation / nuv.max(1.0);
        max_violation = max_violation.max(rel);
    }
    Ok(DecomposabilityReport {
        trials,
        max_violation,
        gamma_tested: gamma,
        tolerance: DECOMPOSABILITY_TOL,
        passed: max_violation <= DECOMPOSABILITY_TOL,
    })
}
