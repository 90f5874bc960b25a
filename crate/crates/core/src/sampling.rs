//! Sub-Gaussian sample-complexity estimates and measurement matrices.
//!
//! A zero-mean unit-variance random variable with tail bound
//! `P(|X| > t) <= alpha exp(-beta t^2)` concentrates squared lengths with
//! constant `c = beta^2 / (4 alpha + 2 beta)`. Singling out a family `J` of
//! supports of size at most `k`, a matrix of i.i.d. draws scaled by
//! `1/sqrt(m)` is a near-isometry on all of them with failure probability
//! `zeta = 2 |J| (12/theta)^k exp(-m c theta^2)`, `theta = 1 - sqrt(1-delta)`.
//! Inverting for `m` with the Sauer counts `(en/k)^k` (all supports) and
//! `(eg/s_max)^(s_max)` (group k-sparse supports) gives the two lower
//! bounds computed here.
//!
//! Matrix entries are unit-variance normals scaled by `1/sqrt(m)`, which is
//! what makes `E ||Au||^2 = ||u||^2` as the concentration bound requires.
//! Columns are generated from independent substreams, so block-parallel
//! generation stays bit-identical to the serial result.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::rng::Rng;

/// Tail constants of a sub-Gaussian variable and the derived concentration
/// constant `c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubGaussianProfile {
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
}

impl SubGaussianProfile {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        Ok(SubGaussianProfile { alpha, beta, c: subgaussian_c(alpha, beta)? })
    }

    /// Standard normal: `alpha = 2`, `beta = 0.5`.
    pub fn gaussian() -> Self {
        SubGaussianProfile::new(2.0, 0.5).expect("valid constants")
    }

    /// Rademacher (+-1 fair coin): `alpha = 2`, `beta = ln 2` makes the tail
    /// bound tight at `t = 1` and valid below it.
    pub fn rademacher() -> Self {
        SubGaussianProfile::new(2.0, std::f64::consts::LN_2).expect("valid constants")
    }
}

/// `c = beta^2 / (4 alpha + 2 beta)`.
pub fn subgaussian_c(alpha: f64, beta: f64) -> Result<f64> {
    if alpha <= 0.0 {
        return Err(Error::NonPositiveParameter { name: "alpha" });
    }
    if beta <= 0.0 {
        return Err(Error::NonPositiveParameter { name: "beta" });
    }
    Ok(beta * beta / (4.0 * alpha + 2.0 * beta))
}

/// `theta = 1 - sqrt(1 - delta)` for `delta` in `(0, 1)`.
pub fn theta(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidRange { name: "delta" });
    }
    Ok(1.0 - (1.0 - delta).sqrt())
}

fn check_prob(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::InvalidRange { name });
    }
    Ok(())
}

/// Real-valued right side of the order-k isometry sample bound:
/// `(1/(c theta^2)) [ ln(2/zeta) + k (ln(en/k) + ln(12/theta)) ]`.
pub fn min_measurements_rip_real(
    n: usize,
    k: usize,
    delta: f64,
    zeta: f64,
    prof: &SubGaussianProfile,
) -> Result<f64> {
    check_prob("delta", delta)?;
    check_prob("zeta", zeta)?;
    if k == 0 || k >= n {
        return Err(Error::InvalidRange { name: "k" });
    }
    let th = theta(delta)?;
    let nf = n as f64;
    let kf = k as f64;
    let bracket =
        (2.0 / zeta).ln() + kf * ((std::f64::consts::E * nf / kf).ln() + (12.0 / th).ln());
    Ok(bracket / (prof.c * th * th))
}

/// Ceiling of [`min_measurements_rip_real`].
pub fn min_measurements_rip(
    n: usize,
    k: usize,
    delta: f64,
    zeta: f64,
    prof: &SubGaussianProfile,
) -> Result<u64> {
    Ok(min_measurements_rip_real(n, k, delta, zeta, prof)?.ceil() as u64)
}

/// Real-valued right side of the group-support bound:
/// `(1/(c theta^2)) [ ln(2/zeta) + s_max ln(eg/s_max) + k ln(12/theta) ]`.
pub fn min_measurements_grip_real(
    g: usize,
    s_max: usize,
    k: usize,
    delta: f64,
    zeta: f64,
    prof: &SubGaussianProfile,
) -> Result<f64> {
    check_prob("delta", delta)?;
    check_prob("zeta", zeta)?;
    if s_max == 0 || s_max > g {
        return Err(Error::InvalidRange { name: "s_max" });
    }
    if k == 0 {
        return Err(Error::InvalidRange { name: "k" });
    }
    let th = theta(delta)?;
    let gf = g as f64;
    let sf = s_max as f64;
    let kf = k as f64;
    let bracket = (2.0 / zeta).ln()
        + sf * (std::f64::consts::E * gf / sf).ln()
        + kf * (12.0 / th).ln();
    Ok(bracket / (prof.c * th * th))
}

/// Ceiling of [`min_measurements_grip_real`].
pub fn min_measurements_grip(
    g: usize,
    s_max: usize,
    k: usize,
    delta: f64,
    zeta: f64,
    prof: &SubGaussianProfile,
) -> Result<u64> {
    Ok(min_measurements_grip_real(g, s_max, k, delta, zeta, prof)?.ceil() as u64)
}

/// Sauer count of supports of size at most `k` in `{1..n}`: `(en/k)^k`.
pub fn sauer_family_size_rip(n: usize, k: usize) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    (kf * (std::f64::consts::E * nf / kf).ln()).exp()
}

/// Sauer count of group k-sparse supports: `(eg/s_max)^(s_max)`.
pub fn sauer_family_size_grip(g: usize, s_max: usize) -> f64 {
    let (gf, sf) = (g as f64, s_max as f64);
    (sf * (std::f64::consts::E * gf / sf).ln()).exp()
}

/// Union-bound failure probability, raw and clamped to `[0, 1]`.
#[derive(Clone, Copy, Debug)]
pub struct FailureProbability {
    pub raw: f64,
    pub clamped: f64,
}

/// `zeta = 2 |J| (12/theta)^k exp(-m c theta^2)`, computed in log space so
/// astronomically large families stay finite.
pub fn failure_probability(
    family_size: f64,
    k: usize,
    theta: f64,
    m: u64,
    prof: &SubGaussianProfile,
) -> Result<FailureProbability> {
    if family_size < 1.0 {
        return Err(Error::InvalidRange { name: "family_size" });
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidRange { name: "theta" });
    }
    let log_raw = 2.0f64.ln() + family_size.ln() + (k as f64) * (12.0 / theta).ln()
        - (m as f64) * prof.c * theta * theta;
    let raw = log_raw.exp();
    Ok(FailureProbability { raw, clamped: raw.clamp(0.0, 1.0) })
}

/// Both sample bounds for one configuration.
#[derive(Clone, Copy, Debug)]
pub struct SamplingPlan {
    pub n: usize,
    pub k: usize,
    pub g: usize,
    pub s_max: usize,
    pub delta: f64,
    pub zeta: f64,
    pub theta: f64,
    pub m_s: u64,
    pub m_gs: u64,
    pub m_s_real: f64,
    pub m_gs_real: f64,
}

pub fn sampling_plan(
    n: usize,
    k: usize,
    g: usize,
    s_max: usize,
    delta: f64,
    zeta: f64,
    prof: &SubGaussianProfile,
) -> Result<SamplingPlan> {
    let m_s_real = min_measurements_rip_real(n, k, delta, zeta, prof)?;
    let m_gs_real = min_measurements_grip_real(g, s_max, k, delta, zeta, prof)?;
    Ok(SamplingPlan {
        n,
        k,
        g,
        s_max,
        delta,
        zeta,
        theta: theta(delta)?,
        m_s: m_s_real.ceil() as u64,
        m_gs: m_gs_real.ceil() as u64,
        m_s_real,
        m_gs_real,
    })
}

/// `m x n` matrix of i.i.d. standard normals scaled by `1/sqrt(m)`,
/// deterministic in the seed. Column `j` uses substream `j`.
pub fn generate_matrix(m: usize, n: usize, seed: u64) -> Mat {
    let mut a = Mat::zeros(m, n);
    let scale = 1.0 / (m as f64).sqrt();
    for j in 0..n {
        let mut rng = Rng::stream(seed, j as u64);
        for i in 0..m {
            a.set(i, j, rng.normal() * scale);
        }
    }
    a
}
