//! Norm-equivalence constants feeding the error bounds.
//!
//! Six scalars describe how the penalty norm `||.||_P`, the approximation
//! norm `||.||_A`, and the Euclidean norm relate on group k-sparse supports:
//! `a <= ||x_L||_P / ||x_L||_A <= b`, `c <= ||x_L||_A / ||x_L||_2 <= d`, the
//! decomposition constant `f`, and the decomposability parameter `gamma`.
//! The derived ratio `r = b / (a gamma)` appears throughout the bounds.
//!
//! Closed forms: conventional sparsity (l1 over singleton groups) has
//! `d = f = sqrt(k)`; the group LASSO has `d = sqrt(s_max)`, `f = 1`; the
//! sparse group LASSO has `d = (1-mu) sqrt(l_max) + mu sqrt(s_max)`,
//! `f = 1`. For group norms `f = c = 1` is the only valid choice, so no
//! empirical sharpening of `f` is attempted.

use crate::error::{Error, Result};
use crate::group::{enumerate_gks, GroupPartition};
use crate::linalg::norm2;
use crate::norms::{eval_norm, NormSpec};
use crate::rng::Rng;

/// The constants `a, b, c, d, f, gamma` and the derived `r = b/(a gamma)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub f: f64,
    pub gamma: f64,
    pub r: f64,
}

impl NormConstants {
    pub fn new(a: f64, b: f64, c: f64, d: f64, f: f64, gamma: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && c > 0.0 && d > 0.0 && f > 0.0) {
            return Err(Error::NonPositiveParameter { name: "norm constants" });
        }
        if a > b {
            return Err(Error::InvalidRange { name: "a,b" });
        }
        if c > d {
            return Err(Error::InvalidRange { name: "c,d" });
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidRange { name: "gamma" });
        }
        Ok(NormConstants { a, b, c, d, f, gamma, r: b / (a * gamma) })
    }

    /// Constants with a user-supplied decomposability parameter, for norms
    /// whose `gamma` is known only externally.
    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidRange { name: "gamma" });
        }
        self.gamma = gamma;
        self.r = self.b / (self.a * gamma);
        Ok(self)
    }
}

/// Closed-form constants where the penalty and approximation norm coincide.
///
/// `l1` requires an all-singleton partition (conventional sparsity): the
/// grouped l1 is the `mu = 0` sparse group LASSO and takes that closed form
/// instead. Weighted group LASSO and tree norms have no closed form; use
/// [`estimate_c_d`].
pub fn closed_form_constants(spec: &NormSpec, p: &GroupPartition) -> Result<NormConstants> {
    let k = p.k() as f64;
    let s_max = p.s_max() as f64;
    let l_max = p.l_max() as f64;
    match spec {
        NormSpec::L1 => {
            if p.l_max() != 1 {
                return Err(Error::UnsupportedNormForClosedForm);
            }
            NormConstants::new(1.0, 1.0, 1.0, k.sqrt(), k.sqrt(), 1.0)
        }
        NormSpec::GroupLasso { weights: None } => {
            NormConstants::new(1.0, 1.0, 1.0, s_max.sqrt(), 1.0, 1.0)
        }
        NormSpec::GroupLasso { weights: Some(_) } => Err(Error::UnsupportedNormForClosedForm),
        NormSpec::SparseGroupLasso { mu } => {
            let d = (1.0 - mu) * l_max.sqrt() + mu * s_max.sqrt();
            NormConstants::new(1.0, 1.0, 1.0, d, 1.0, 1.0)
        }
        NormSpec::TreeStructured { .. } => Err(Error::UnsupportedNormForClosedForm),
    }
}

/// Probe vectors known to stress the extremes of `||x_L||_A / ||x_L||_2`:
/// flat over the whole union, equal block energy with flat blocks, equal
/// block energy with a single spike per block, and all mass on one block.
fn extremal_probes(p: &GroupPartition, member_ids: &[usize], n: usize) -> Vec<Vec<f64>> {
    let mut probes = Vec::new();

    let mut flat = vec![0.0; n];
    for &g in member_ids {
        for &i in p.group(g) {
            flat[i] = 1.0;
        }
    }
    probes.push(flat);

    let mut equal_energy = vec![0.0; n];
    for &g in member_ids {
        let len = p.group(g).len() as f64;
        for &i in p.group(g) {
            equal_energy[i] = 1.0 / len.sqrt();
        }
    }
    probes.push(equal_energy);

    let mut spikes = vec![0.0; n];
    for &g in member_ids {
        spikes[p.group(g)[0]] = 1.0;
    }
    probes.push(spikes);

    for &g in member_ids {
        let mut single = vec![0.0; n];
        for &i in p.group(g) {
            single[i] = 1.0;
        }
        probes.push(single);
    }
    probes
}

/// Empirical bracket of the approximation/Euclidean ratio over all group
/// k-sparse supports: `samples` random unit vectors per support, plus the
/// deterministic extremal probes. Returns `(c_hat, d_hat)`.
pub fn estimate_c_d(
    spec: &NormSpec,
    p: &GroupPartition,
    samples: usize,
    seed: u64,
    cap: usize,
) -> Result<(f64, f64)> {
    estimate_ratio(spec, None, p, samples, seed, cap)
}

/// Empirical bracket of the penalty/approximation ratio `||x_L||_P/||x_L||_A`
/// over group k-sparse supports. Both endpoints equal 1 when the two norms
/// coincide.
pub fn estimate_a_b(
    penalty: &NormSpec,
    approx: &NormSpec,
    p: &GroupPartition,
    samples: usize,
    seed: u64,
    cap: usize,
) -> Result<(f64, f64)> {
    estimate_ratio(penalty, Some(approx), p, samples, seed, cap)
}

fn estimate_ratio(
    num_spec: &NormSpec,
    den_spec: Option<&NormSpec>,
    p: &GroupPartition,
    samples: usize,
    seed: u64,
    cap: usize,
) -> Result<(f64, f64)> {
    let sets = enumerate_gks(p, cap)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (li, lam) in sets.iter().enumerate() {
        // One substream per support set keeps the sampling splittable.
        let mut rng = Rng::stream(seed, li as u64);
        let mut consider = |x: &[f64]| -> Result<()> {
            let den = match den_spec {
                Some(sp) => eval_norm(sp, p, x)?,
                None => norm2(x),
            };
            if den <= 1e-300 {
                return Ok(());
            }
            let ratio = eval_norm(num_spec, p, x)? / den;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            Ok(())
        };
        for probe in extremal_probes(p, lam.member_group_ids(), p.n()) {
            consider(&probe)?;
        }
        for _ in 0..samples {
            let mut x = vec![0.0; p.n()];
            let unit = rng.unit_vector(lam.cardinality());
            for (&i, &v) in lam.indices().iter().zip(&unit) {
                x[i] = v;
            }
            consider(&x)?;
        }
    }
    Ok((lo, hi))
}
