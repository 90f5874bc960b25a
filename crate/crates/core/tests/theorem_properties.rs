//! Cross-module checks of the inequalities the error analysis is built on,
//! against brute-force or independently computed oracles.

use gsparse_core::constants::{closed_form_constants, estimate_c_d};
use gsparse_core::decomposition::{optimal_decomposition, sparsity_index};
use gsparse_core::grip::{grip_constant, GripOrder};
use gsparse_core::group::{
    enumerate_gks, enumerate_gks_over, restrict_complement, GroupPartition, DEFAULT_ENUM_CAP,
};
use gsparse_core::linalg::norm2;
use gsparse_core::norms::{check_decomposability, eval_norm, NodeNorm, NormSpec};
use gsparse_core::rng::Rng;
use gsparse_core::sampling::generate_matrix;

const CAP: usize = DEFAULT_ENUM_CAP;

/// Enumeration agrees with an independent brute force over all 2^g subsets.
#[test]
fn enumeration_matches_brute_force_on_random_partitions() {
    let mut rng = Rng::new(2024);
    for trial in 0..20 {
        // Random partition with up to 9 groups of size 1..=3.
        let g = 3 + rng.below(7);
        let sizes: Vec<usize> = (0..g).map(|_| 1 + rng.below(3)).collect();
        let n: usize = sizes.iter().sum();
        let mut next = 0;
        let groups: Vec<Vec<usize>> = sizes
            .iter()
            .map(|&s| {
                let g: Vec<usize> = (next..next + s).collect();
                next += s;
                g
            })
            .collect();
        let k = 1 + rng.below(n.min(6));
        let max_size = sizes.iter().copied().max().unwrap();
        if max_size > k {
            continue;
        }
        let p = GroupPartition::new(n, groups, k).unwrap();
        let enumerated = enumerate_gks(&p, CAP).unwrap();

        let mut brute = 0usize;
        for mask in 1u32..(1 << g) {
            let card: usize = (0..g)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| p.group(i).len())
                .sum();
            if card <= k {
                brute += 1;
            }
        }
        assert_eq!(enumerated.len(), brute, "trial {trial}");
        for set in &enumerated {
            assert!(set.cardinality() <= k);
            let rebuilt: usize =
                set.member_group_ids().iter().map(|&g| p.group(g).len()).sum();
            assert_eq!(rebuilt, set.cardinality());
        }
    }
}

/// Decomposable norms satisfy the recursive equality over any family of
/// pairwise disjoint group k-sparse sets.
#[test]
fn recursive_decomposition_equality() {
    let p = GroupPartition::new(8, vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7]], 4)
        .unwrap();
    let specs = [
        NormSpec::L1,
        NormSpec::gl(),
        NormSpec::sgl(0.4).unwrap(),
        NormSpec::tree(vec![vec![0, 1], vec![2], vec![3], vec![4, 5], vec![6, 7]], NodeNorm::L2),
    ];
    let mut rng = Rng::new(7);
    for spec in &specs {
        for _ in 0..100 {
            // Three disjoint single-group parts plus one left empty.
            let mut ids = vec![0usize, 1, 2, 3];
            rng.shuffle(&mut ids);
            let parts: Vec<Vec<f64>> = ids[..3]
                .iter()
                .map(|&gid| {
                    let mut u = vec![0.0; 8];
                    for &i in p.group(gid) {
                        u[i] = rng.normal();
                    }
                    u
                })
                .collect();
            let total: Vec<f64> = (0..8).map(|i| parts.iter().map(|u| u[i]).sum()).collect();
            let lhs = eval_norm(spec, &p, &total).unwrap();
            let rhs: f64 = parts.iter().map(|u| eval_norm(spec, &p, u).unwrap()).sum();
            assert!(
                (lhs - rhs).abs() <= 1e-12 * lhs.max(1.0),
                "{}: {lhs} vs {rhs}",
                spec.name()
            );
        }
    }
}

/// The greedy decomposition is stage-wise optimal: no admissible union of
/// unused groups gives a strictly smaller residual norm (checked by
/// exhaustive re-enumeration).
#[test]
fn greedy_stage_optimality() {
    let p = GroupPartition::new(7, vec![vec![0, 1], vec![2], vec![3, 4], vec![5], vec![6]], 3)
        .unwrap();
    let mut rng = Rng::new(99);
    for spec in [NormSpec::L1, NormSpec::gl()] {
        for _ in 0..50 {
            let x = rng.normals(7);
            let dec = optimal_decomposition(&x, &spec, &p, CAP).unwrap();
            // Replay the greedy pass.
            let mut residual = x.clone();
            let mut unused: Vec<usize> = (0..p.num_groups()).collect();
            for (stage, lam) in dec.lambdas.iter().enumerate() {
                let stage_resid =
                    restrict_complement(&residual, lam.indices()).unwrap();
                let achieved = eval_norm(&spec, &p, &stage_resid).unwrap();
                for cand in enumerate_gks_over(&p, &unused, CAP).unwrap() {
                    let alt = restrict_complement(&residual, cand.indices()).unwrap();
                    let val = eval_norm(&spec, &p, &alt).unwrap();
                    assert!(
                        achieved <= val + 1e-12 * val.max(1.0),
                        "stage {stage} not optimal"
                    );
                }
                residual = stage_resid;
                unused.retain(|g| !lam.member_group_ids().contains(g));
            }
            // Reconstruction is exact.
            assert_eq!(dec.reconstruct(7), x);
            // Decomposable norm splits across the stages.
            let total: f64 =
                dec.parts.iter().map(|u| eval_norm(&spec, &p, u).unwrap()).sum();
            let whole = eval_norm(&spec, &p, &x).unwrap();
            assert!((total - whole).abs() <= 1e-12 * whole.max(1.0));
        }
    }
}

/// Tail-sum inequality behind the decomposition constant `f`: summing the
/// Euclidean norms of stages 2.. of the optimal decomposition of the
/// off-support part never exceeds `||h_{L0^c}||_A / f`.
#[test]
fn tail_sum_inequality_for_f() {
    let mut rng = Rng::new(5);

    // Conventional sparsity: f = sqrt(k).
    let p = GroupPartition::singletons(12, 4).unwrap();
    let f = closed_form_constants(&NormSpec::L1, &p).unwrap().f;
    for _ in 0..100 {
        let h = rng.normals(12);
        let (_, lam0) = sparsity_index(&h, &NormSpec::L1, &p, CAP).unwrap();
        let tail = restrict_complement(&h, lam0.indices()).unwrap();
        let tail_norm = eval_norm(&NormSpec::L1, &p, &tail).unwrap();
        let dec = optimal_decomposition(&tail, &NormSpec::L1, &p, CAP).unwrap();
        let sum: f64 = dec.parts.iter().skip(1).map(|u| norm2(u)).sum();
        assert!(sum <= tail_norm / f + 1e-12);
    }

    // Group LASSO: f = 1.
    let p = GroupPartition::new(10, vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7], vec![8, 9]], 4).unwrap();
    let f = closed_form_constants(&NormSpec::gl(), &p).unwrap().f;
    assert_eq!(f, 1.0);
    for _ in 0..100 {
        let h = rng.normals(10);
        let (_, lam0) = sparsity_index(&h, &NormSpec::gl(), &p, CAP).unwrap();
        let tail = restrict_complement(&h, lam0.indices()).unwrap();
        let tail_norm = eval_norm(&NormSpec::gl(), &p, &tail).unwrap();
        let dec = optimal_decomposition(&tail, &NormSpec::gl(), &p, CAP).unwrap();
        let sum: f64 = dec.parts.iter().skip(1).map(|u| norm2(u)).sum();
        assert!(sum <= tail_norm / f + 1e-12);
    }
}

/// Closed-form `c` and `d` really sandwich the ratio on sampled supported
/// vectors for the norms whose extremal directions are known exactly.
#[test]
fn c_d_sandwich_for_l1_and_gl() {
    let cases: Vec<(GroupPartition, NormSpec)> = vec![
        (GroupPartition::singletons(10, 4).unwrap(), NormSpec::L1),
        (GroupPartition::uniform(5, 2, 4).unwrap(), NormSpec::gl()),
    ];
    let mut rng = Rng::new(31);
    for (p, spec) in cases {
        let consts = closed_form_constants(&spec, &p).unwrap();
        for lam in enumerate_gks(&p, CAP).unwrap() {
            for _ in 0..50 {
                let mut x = vec![0.0; p.n()];
                for &i in lam.indices() {
                    x[i] = rng.normal();
                }
                let l2 = norm2(&x);
                if l2 < 1e-9 {
                    continue;
                }
                let na = eval_norm(&spec, &p, &x).unwrap();
                assert!(na >= consts.c * l2 * (1.0 - 1e-10));
                assert!(na <= consts.d * l2 * (1.0 + 1e-10));
            }
        }
        // The empirical bracket stays inside the closed form.
        let (c_hat, d_hat) = estimate_c_d(&spec, &p, 100, 3, CAP).unwrap();
        assert!(c_hat >= consts.c - 1e-10);
        assert!(d_hat <= consts.d + 1e-10);
    }
}

/// Equality-form decomposability over 1,000 seeded disjoint pairs for every
/// shipped norm, including a flattened tree norm.
#[test]
fn decomposability_equality_all_variants() {
    let p = GroupPartition::new(8, vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7]], 4)
        .unwrap();
    let specs = vec![
        NormSpec::L1,
        NormSpec::gl(),
        NormSpec::sgl(0.0).unwrap(),
        NormSpec::sgl(0.3).unwrap(),
        NormSpec::sgl(0.7).unwrap(),
        NormSpec::sgl(1.0).unwrap(),
        NormSpec::tree(
            vec![vec![0, 1], vec![0], vec![2, 3], vec![4, 5], vec![5], vec![6, 7]],
            NodeNorm::L2,
        ),
    ];
    for spec in specs {
        let rep = check_decomposability(&spec, &p, 1.0, 1000, 7).unwrap();
        assert!(
            rep.passed,
            "{}: max violation {:.3e}",
            spec.name(),
            rep.max_violation
        );
    }
}

/// Gamma-decomposability as a pure inequality with user-supplied gamma < 1:
/// every decomposable norm satisfies it with slack.
#[test]
fn gamma_decomposability_inequality() {
    let p = GroupPartition::uniform(4, 2, 4).unwrap();
    for gamma in [0.25, 0.5, 0.9] {
        let rep = check_decomposability(&NormSpec::gl(), &p, gamma, 300, 11).unwrap();
        assert!(rep.passed);
        // Strict slack: the worst violation is strictly negative.
        assert!(rep.max_violation < 0.0);
    }
}

/// The eigenvalue certificate agrees with brute-force Rayleigh-quotient
/// sampling: random quotients never exceed it, and probing with the
/// extremal eigenvector of the witness set reproduces it to 1e-6.
#[test]
fn grip_certificate_agrees_with_rayleigh_sampling() {
    let p = GroupPartition::uniform(4, 4, 8).unwrap();
    for seed in 0..5u64 {
        let a = generate_matrix(12, 16, 100 + seed);
        let rep = grip_constant(&a, &p, GripOrder::K, CAP).unwrap();
        let mut rng = Rng::new(seed);
        let mut sampled: f64 = 0.0;
        for lam in enumerate_gks(&p, CAP).unwrap() {
            for _ in 0..300 {
                let mut z = vec![0.0; 16];
                for &i in lam.indices() {
                    z[i] = rng.normal();
                }
                let nz = norm2(&z);
                if nz < 1e-12 {
                    continue;
                }
                let az = norm2(&a.matvec(&z));
                sampled = sampled.max((az * az / (nz * nz) - 1.0).abs());
            }
        }
        // Sampling approaches the certificate from below.
        assert!(sampled <= rep.delta + 1e-10, "seed {seed}");

        // Extremal-vector probe on the witness set: embedding the Gram
        // eigenvector and pushing it through A reproduces delta exactly.
        let sub = a.select_columns(rep.witness.indices());
        let eig = gsparse_core::linalg::symmetric_eigen(&sub.gram());
        let dim = rep.witness.cardinality();
        let lo = eig.values[0];
        let hi = eig.values[dim - 1];
        let col = if (hi - 1.0) >= (1.0 - lo) { dim - 1 } else { 0 };
        let vecs = eig.vectors.as_ref().unwrap();
        let mut z = vec![0.0; 16];
        for (local, &global) in rep.witness.indices().iter().enumerate() {
            z[global] = vecs.get(local, col);
        }
        let nz = norm2(&z);
        let az = norm2(&a.matvec(&z));
        let probe = (az * az / (nz * nz) - 1.0).abs();
        assert!((probe - rep.delta).abs() < 1e-6, "probe {probe} vs delta {}", rep.delta);
    }
}
