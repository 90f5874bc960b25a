//! Group partitions and group k-sparse sets.
//!
//! A [`GroupPartition`] splits the index set `{0..n-1}` into disjoint groups
//! `G_1..G_g` with every `|G_i| <= k`. A group k-sparse set is a union of
//! whole groups of total cardinality at most `k`; a vector is group k-sparse
//! when its support is contained in one. All indices are 0-based here; file
//! formats and CLI output convert to 1-based.

use crate::error::{Error, Result};

/// Cap used by callers that do not care to pick one.
pub const DEFAULT_ENUM_CAP: usize = 1_000_000;

/// Immutable partition of `{0..n-1}` with sparsity budget `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupPartition {
    n: usize,
    k: usize,
    groups: Vec<Vec<usize>>,
    group_of: Vec<usize>,
    l_min: usize,
    l_max: usize,
    s_max: usize,
}

impl GroupPartition {
    /// Validate and build a partition. Group members are sorted; group order
    /// is preserved since group ids are meaningful to callers.
    pub fn new(n: usize, groups: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidRange { name: "k" });
        }
        let mut group_of = vec![usize::MAX; n];
        let mut sorted_groups = Vec::with_capacity(groups.len());
        for (gid, mut group) in groups.into_iter().enumerate() {
            if group.is_empty() {
                return Err(Error::EmptyGroup { group: gid });
            }
            if group.len() > k {
                return Err(Error::GroupTooLarge { group: gid, len: group.len(), k });
            }
            group.sort_unstable();
            for &idx in &group {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx, n });
                }
                if group_of[idx] != usize::MAX {
                    return Err(Error::OverlappingGroups { index: idx });
                }
                group_of[idx] = gid;
            }
            // Duplicates within one group also count as overlap.
            for w in group.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::OverlappingGroups { index: w[0] });
                }
            }
            sorted_groups.push(group);
        }
        if let Some(missing) = group_of.iter().position(|&g| g == usize::MAX) {
            return Err(Error::IncompleteCover { missing });
        }
        let l_min = sorted_groups.iter().map(Vec::len).min().unwrap_or(0);
        let l_max = sorted_groups.iter().map(Vec::len).max().unwrap_or(0);
        let s_max = k / l_min;
        Ok(GroupPartition { n, k, groups: sorted_groups, group_of, l_min, l_max, s_max })
    }

    /// Conventional sparsity: `n` singleton groups.
    pub fn singletons(n: usize, k: usize) -> Result<Self> {
        GroupPartition::new(n, (0..n).map(|i| vec![i]).collect(), k)
    }

    /// `g` contiguous groups of equal size `len` over `n = g * len`.
    pub fn uniform(num_groups: usize, len: usize, k: usize) -> Result<Self> {
        let groups = (0..num_groups)
            .map(|g| (g * len..(g + 1) * len).collect())
            .collect();
        GroupPartition::new(num_groups * len, groups, k)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn group(&self, gid: usize) -> &[usize] {
        &self.groups[gid]
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// Group id owning index `i`.
    pub fn group_of(&self, i: usize) -> usize {
        self.group_of[i]
    }

    pub fn l_min(&self) -> usize {
        self.l_min
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// `floor(k / l_min)`: most groups any group k-sparse union can contain.
    pub fn s_max(&self) -> usize {
        self.s_max
    }
}

/// A union of whole groups with cardinality at most `k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupKSparseSet {
    member_group_ids: Vec<usize>,
    indices: Vec<usize>,
}

impl GroupKSparseSet {
    /// Build from sorted-or-not group ids, validating the cardinality budget.
    pub fn from_group_ids(p: &GroupPartition, mut ids: Vec<usize>) -> Result<Self> {
        ids.sort_unstable();
        ids.dedup();
        for &gid in &ids {
            if gid >= p.num_groups() {
                return Err(Error::IndexOutOfRange { index: gid, n: p.num_groups() });
            }
        }
        let mut indices: Vec<usize> = ids.iter().flat_map(|&g| p.group(g).iter().copied()).collect();
        indices.sort_unstable();
        if indices.len() > p.k() {
            return Err(Error::SupportExceedsBudget { cardinality: indices.len(), k: p.k() });
        }
        Ok(GroupKSparseSet { member_group_ids: ids, indices })
    }

    /// Assemble without the cardinality check. Order-2k support families
    /// legitimately exceed the k budget; plain callers should prefer
    /// [`GroupKSparseSet::from_group_ids`].
    pub fn from_raw_parts(member_group_ids: Vec<usize>, indices: Vec<usize>) -> Self {
        GroupKSparseSet { member_group_ids, indices }
    }

    pub fn member_group_ids(&self) -> &[usize] {
        &self.member_group_ids
    }

    /// Sorted indices of the union.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn cardinality(&self) -> usize {
        self.indices.len()
    }

    pub fn is_disjoint_from(&self, other: &GroupKSparseSet) -> bool {
        self.member_group_ids
            .iter()
            .all(|g| !other.member_group_ids.contains(g))
    }

    /// Union of two sets (not necessarily within the k budget).
    pub fn union_indices(&self, other: &GroupKSparseSet) -> Vec<usize> {
        let mut out = self.indices.clone();
        out.extend_from_slice(&other.indices);
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// All nonempty group k-sparse sets over the whole partition, in
/// lexicographic order of their member group ids. The empty union is
/// excluded: the sparsity-index minimization never needs it.
pub fn enumerate_gks(p: &GroupPartition, cap: usize) -> Result<Vec<GroupKSparseSet>> {
    let all: Vec<usize> = (0..p.num_groups()).collect();
    enumerate_gks_over(p, &all, cap)
}

/// Same enumeration restricted to unions of the listed group ids.
pub fn enumerate_gks_over(
    p: &GroupPartition,
    allowed: &[usize],
    cap: usize,
) -> Result<Vec<GroupKSparseSet>> {
    let mut allowed: Vec<usize> = allowed.to_vec();
    allowed.sort_unstable();
    let mut out = Vec::new();
    let mut stack_ids: Vec<usize> = Vec::new();
    dfs(p, &allowed, 0, 0, &mut stack_ids, &mut out, cap)?;
    Ok(out)
}

fn dfs(
    p: &GroupPartition,
    allowed: &[usize],
    from: usize,
    card: usize,
    stack_ids: &mut Vec<usize>,
    out: &mut Vec<GroupKSparseSet>,
    cap: usize,
) -> Result<()> {
    for pos in from..allowed.len() {
        let gid = allowed[pos];
        let next_card = card + p.group(gid).len();
        if next_card > p.k() {
            continue;
        }
        stack_ids.push(gid);
        if out.len() >= cap {
            return Err(Error::EnumerationCapExceeded { cap });
        }
        let mut indices: Vec<usize> =
            stack_ids.iter().flat_map(|&g| p.group(g).iter().copied()).collect();
        indices.sort_unstable();
        out.push(GroupKSparseSet { member_group_ids: stack_ids.clone(), indices });
        dfs(p, allowed, pos + 1, next_card, stack_ids, out, cap)?;
        stack_ids.pop();
    }
    Ok(())
}

/// `x` restricted to `lambda`: entries kept on `lambda`, zero elsewhere.
/// Ambient dimension is preserved.
pub fn restrict(x: &[f64], lambda: &[usize]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; x.len()];
    for &i in lambda {
        if i >= x.len() {
            return Err(Error::IndexOutOfRange { index: i, n: x.len() });
        }
        out[i] = x[i];
    }
    Ok(out)
}

/// `x` restricted to the complement of `lambda`.
pub fn restrict_complement(x: &[f64], lambda: &[usize]) -> Result<Vec<f64>> {
    let mut out = x.to_vec();
    for &i in lambda {
        if i >= x.len() {
            return Err(Error::IndexOutOfRange { index: i, n: x.len() });
        }
        out[i] = 0.0;
    }
    Ok(out)
}

/// Indices where `|x_i| > tol`.
pub fn numeric_support(x: &[f64], tol: f64) -> Vec<usize> {
    x.iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > tol)
        .map(|(i, _)| i)
        .collect()
}

/// Default cutoff separating numerical zeros from support.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-12;

/// True iff the numerical support of `x` is contained in some group
/// k-sparse set. Containment suffices: the union of the groups touched by
/// the support is the smallest candidate, so only its cardinality matters.
pub fn is_group_k_sparse(x: &[f64], p: &GroupPartition, tol: f64) -> Result<bool> {
    if x.len() != p.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), got: x.len() });
    }
    let mut touched = vec![false; p.num_groups()];
    for i in numeric_support(x, tol) {
        touched[p.group_of(i)] = true;
    }
    let card: usize = touched
        .iter()
        .enumerate()
        .filter(|(_, &t)| t)
        .map(|(g, _)| p.group(g).len())
        .sum();
    Ok(card <= p.k())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_pair_partition() -> GroupPartition {
        GroupPartition::new(4, vec![vec![0, 1], vec![2, 3]], 2).unwrap()
    }

    fn mixed_partition() -> GroupPartition {
        GroupPartition::new(8, vec![vec![0], vec![1, 2, 3], vec![4, 5], vec![6, 7]], 4).unwrap()
    }

    #[test]
    fn valid_partitions_and_derived_stats() {
        let p = two_pair_partition();
        assert_eq!((p.l_min(), p.l_max(), p.s_max()), (2, 2, 1));

        let p = mixed_partition();
        assert_eq!((p.l_min(), p.l_max(), p.s_max()), (1, 3, 4));
    }

    #[test]
    fn rejects_overlap_gap_oversize_empty() {
        assert_eq!(
            GroupPartition::new(3, vec![vec![0, 1], vec![1, 2]], 2),
            Err(Error::OverlappingGroups { index: 1 })
        );
        assert_eq!(
            GroupPartition::new(4, vec![vec![0, 1], vec![2]], 2),
            Err(Error::IncompleteCover { missing: 3 })
        );
        assert_eq!(
            GroupPartition::new(4, vec![vec![0, 1, 2], vec![3]], 2),
            Err(Error::GroupTooLarge { group: 0, len: 3, k: 2 })
        );
        assert_eq!(
            GroupPartition::new(2, vec![vec![0, 1], vec![]], 2),
            Err(Error::EmptyGroup { group: 1 })
        );
    }

    #[test]
    fn enumerate_singletons_count() {
        // 4 singleton groups, k = 2: C(4,1) + C(4,2) = 10 nonempty sets.
        let p = GroupPartition::singletons(4, 2).unwrap();
        let sets = enumerate_gks(&p, 1000).unwrap();
        assert_eq!(sets.len(), 10);
        // Lexicographic order on member ids.
        assert_eq!(sets[0].member_group_ids(), &[0]);
        assert_eq!(sets[1].member_group_ids(), &[0, 1]);
        assert_eq!(sets[2].member_group_ids(), &[0, 2]);
    }

    #[test]
    fn enumerate_matches_brute_force() {
        let p = mixed_partition();
        let sets = enumerate_gks(&p, 1000).unwrap();
        // Brute force over all subsets of groups.
        let g = p.num_groups();
        let mut count = 0;
        for mask in 1u32..(1 << g) {
            let card: usize = (0..g)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| p.group(i).len())
                .sum();
            if card <= p.k() {
                count += 1;
            }
        }
        assert_eq!(sets.len(), count);
        // G1 u G2 (card 4) present; G2 u G3 (card 5) absent.
        assert!(sets.iter().any(|s| s.member_group_ids() == [0, 1]));
        assert!(!sets.iter().any(|s| s.member_group_ids() == [1, 2]));
        assert!(sets.iter().any(|s| s.member_group_ids() == [2, 3]));
    }

    #[test]
    fn enumerate_single_full_group() {
        let p = GroupPartition::new(3, vec![vec![0, 1, 2]], 3).unwrap();
        let sets = enumerate_gks(&p, 10).unwrap();
        assert_eq!(sets.len(), 1);
    }

    #[test]
    fn enumeration_cap() {
        let p = GroupPartition::singletons(10, 10).unwrap();
        assert_eq!(enumerate_gks(&p, 5), Err(Error::EnumerationCapExceeded { cap: 5 }));
    }

    #[test]
    fn restrict_example() {
        let x = [1.0, 0.1, 0.6, 0.6];
        assert_eq!(restrict(&x, &[2, 3]).unwrap(), vec![0.0, 0.0, 0.6, 0.6]);
        assert_eq!(restrict(&x, &[]).unwrap(), vec![0.0; 4]);
        assert_eq!(restrict(&x, &[0, 1, 2, 3]).unwrap(), x.to_vec());
        assert_eq!(restrict(&x, &[4]), Err(Error::IndexOutOfRange { index: 4, n: 4 }));
    }

    #[test]
    fn restrict_complement_partitions_exactly() {
        let x = [1.0, -2.5, 0.25, 3.0];
        let lam = [1, 3];
        let a = restrict(&x, &lam).unwrap();
        let b = restrict_complement(&x, &lam).unwrap();
        for i in 0..4 {
            assert_eq!(a[i] + b[i], x[i]);
        }
    }

    #[test]
    fn group_k_sparse_detection() {
        let p = two_pair_partition();
        assert!(is_group_k_sparse(&[0.0, 0.0, 0.6, 0.6], &p, 1e-12).unwrap());
        // Support straddles both groups: covering union has cardinality 4 > 2.
        assert!(!is_group_k_sparse(&[1.0, 0.0, 0.6, 0.0], &p, 1e-12).unwrap());
        assert!(is_group_k_sparse(&[0.0; 4], &p, 1e-12).unwrap());
        // Strict containment in a group also counts.
        assert!(is_group_k_sparse(&[0.0, 0.0, 0.6, 0.0], &p, 1e-12).unwrap());
    }
}
