//! Batch experiment driver.
//!
//! Each trial generates a measurement matrix and a group-sparse signal,
//! optionally certifies the exact order-2k isometry constant, solves the
//! constrained recovery problem, and checks the recovery errors against the
//! bound coefficients. A bound violation on a certified compressible trial
//! is a theorem failure, not data; the aggregates count them so the CLI can
//! exit nonzero.

use crate::bounds::{bound_coefficients, evaluate_bound};
use crate::constants::closed_form_constants;
use crate::decomposition::sparsity_index;
use crate::error::{Error, Result};
use crate::grip::{grip_constant, GripOrder};
use crate::group::{GroupPartition, DEFAULT_ENUM_CAP};
use crate::linalg::{norm2, scale, sub};
use crate::norms::{eval_norm, NormSpec};
use crate::rng::{derive_seed, Rng};
use crate::sampling::{
    generate_matrix, min_measurements_grip_real, min_measurements_rip_real, SubGaussianProfile,
};
use crate::solver::{recover, RecoveryProblem, SolverOptions};

/// How measurement noise is drawn; either way `||eta||_2 <= eps`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseModel {
    /// Uniform on the eps-sphere: the worst case allowed by the model.
    SphereWorstCase,
    /// Gaussian draws rescaled onto the ball when they exceed it.
    GaussianClipped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaCertification {
    /// Exact order-2k constant per trial matrix (desk scale only).
    Exact,
    /// No certification; bounds are reported as unconditional only when
    /// certified, so rows carry no verdict.
    Skip,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub partition: GroupPartition,
    pub norm: NormSpec,
    /// Measurement count.
    pub m: usize,
    /// Number of groups carrying signal.
    pub support_groups: usize,
    /// Off-support entries are uniform in `[-leakage, leakage]`; zero keeps
    /// trials exactly group k-sparse.
    pub leakage: f64,
    pub eps: f64,
    pub noise: NoiseModel,
    pub trials: usize,
    pub seed: u64,
    pub delta_certification: DeltaCertification,
    pub solver: SolverOptions,
    pub enum_cap: usize,
}

impl ExperimentConfig {
    pub fn new(partition: GroupPartition, norm: NormSpec, m: usize) -> Self {
        ExperimentConfig {
            partition,
            norm,
            m,
            support_groups: 1,
            leakage: 0.0,
            eps: 0.0,
            noise: NoiseModel::SphereWorstCase,
            trials: 1,
            seed: 0,
            delta_certification: DeltaCertification::Exact,
            solver: SolverOptions::default(),
            enum_cap: DEFAULT_ENUM_CAP,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidRange { name: "trials" });
        }
        if self.m == 0 {
            return Err(Error::InvalidRange { name: "m" });
        }
        if self.leakage < 0.0 {
            return Err(Error::InvalidRange { name: "leakage" });
        }
        if self.eps < 0.0 {
            return Err(Error::InvalidRange { name: "eps" });
        }
        if self.support_groups == 0 || self.support_groups > self.partition.num_groups() {
            return Err(Error::InvalidRange { name: "support_groups" });
        }
        Ok(())
    }
}

/// One experiment row. `None` fields were not computed (certification
/// skipped, not compressible, or the trial failed).
#[derive(Clone, Debug)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub sigma: f64,
    pub eps: f64,
    pub delta2k: Option<f64>,
    pub compressible: Option<bool>,
    pub l2_error: f64,
    pub l2_bound: Option<f64>,
    pub approx_error: f64,
    pub approx_bound: Option<f64>,
    pub bound_satisfied: Option<bool>,
    pub exact_recovery: bool,
    pub converged: bool,
    pub failed: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct Aggregates {
    pub trials: usize,
    pub failed: usize,
    /// Certified compressible rows whose error exceeded its bound.
    pub violations: usize,
    pub certified: usize,
    pub certified_compressible: usize,
    pub exact_recovery_rate: f64,
    pub median_l2_error: f64,
    pub median_approx_error: f64,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub rows: Vec<TrialRow>,
    pub aggregates: Aggregates,
}

const EXACT_RECOVERY_TOL: f64 = 1e-6;
/// Rounding slack when comparing computed errors against computed bounds.
const BOUND_CHECK_SLACK: f64 = 1e-9;

// Substream tags for per-trial derived seeds.
const TAG_MATRIX: u64 = 1;
const TAG_SIGNAL: u64 = 2;
const TAG_NOISE: u64 = 3;

/// Group k-sparse signal: `support_groups` random groups carry entries
/// uniform in `+-[0.5, 1.5]`; every other entry is uniform in
/// `[-leakage, leakage]`.
pub fn generate_group_sparse_signal(
    p: &GroupPartition,
    support_groups: usize,
    leakage: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if support_groups > p.num_groups() {
        return Err(Error::InvalidRange { name: "support_groups" });
    }
    if leakage < 0.0 {
        return Err(Error::InvalidRange { name: "leakage" });
    }
    let mut rng = Rng::new(seed);
    let mut ids: Vec<usize> = (0..p.num_groups()).collect();
    rng.shuffle(&mut ids);
    let mut chosen = ids[..support_groups].to_vec();
    chosen.sort_unstable();
    let cardinality: usize = chosen.iter().map(|&g| p.group(g).len()).sum();
    if cardinality > p.k() {
        return Err(Error::SupportExceedsBudget { cardinality, k: p.k() });
    }
    let mut x = vec![0.0; p.n()];
    for &g in &chosen {
        for &i in p.group(g) {
            x[i] = rng.sign() * rng.uniform_in(0.5, 1.5);
        }
    }
    if leakage > 0.0 {
        let on_support: std::collections::BTreeSet<usize> =
            chosen.iter().flat_map(|&g| p.group(g).iter().copied()).collect();
        for (i, xi) in x.iter_mut().enumerate() {
            if !on_support.contains(&i) {
                *xi = rng.uniform_in(-leakage, leakage);
            }
        }
    }
    Ok(x)
}

fn draw_noise(model: NoiseModel, m: usize, eps: f64, seed: u64) -> Vec<f64> {
    if eps == 0.0 {
        return vec![0.0; m];
    }
    let mut rng = Rng::new(seed);
    match model {
        NoiseModel::SphereWorstCase => scale(&rng.unit_vector(m), eps),
        NoiseModel::GaussianClipped => {
            let sigma = eps / (m as f64).sqrt();
            let eta: Vec<f64> = (0..m).map(|_| sigma * rng.normal()).collect();
            let nrm = norm2(&eta);
            if nrm > eps {
                scale(&eta, eps / nrm)
            } else {
                eta
            }
        }
    }
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

/// Run every trial, never aborting the batch: per-trial failures mark the
/// row and continue.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let p = &cfg.partition;
    // Closed-form constants are per-config; tree norms have none and the
    // solver rejects them anyway.
    let constants = closed_form_constants(&cfg.norm, p).ok();

    let mut rows = Vec::with_capacity(cfg.trials);
    for trial in 0..cfg.trials {
        let trial_seed = cfg.seed.wrapping_add(trial as u64);
        let row = run_trial(cfg, constants.as_ref(), trial, trial_seed);
        rows.push(match row {
            Ok(r) => r,
            Err(e) => TrialRow {
                trial,
                seed: trial_seed,
                sigma: f64::NAN,
                eps: cfg.eps,
                delta2k: None,
                compressible: None,
                l2_error: f64::NAN,
                l2_bound: None,
                approx_error: f64::NAN,
                approx_bound: None,
                bound_satisfied: None,
                exact_recovery: false,
                converged: false,
                failed: Some(e.to_string()),
            },
        });
    }

    let ok: Vec<&TrialRow> = rows.iter().filter(|r| r.failed.is_none()).collect();
    let mut l2s: Vec<f64> = ok.iter().map(|r| r.l2_error).collect();
    let mut approxes: Vec<f64> = ok.iter().map(|r| r.approx_error).collect();
    let aggregates = Aggregates {
        trials: cfg.trials,
        failed: rows.len() - ok.len(),
        violations: ok.iter().filter(|r| r.bound_satisfied == Some(false)).count(),
        certified: ok.iter().filter(|r| r.delta2k.is_some()).count(),
        certified_compressible: ok.iter().filter(|r| r.compressible == Some(true)).count(),
        exact_recovery_rate: if ok.is_empty() {
            0.0
        } else {
            ok.iter().filter(|r| r.exact_recovery).count() as f64 / ok.len() as f64
        },
        median_l2_error: median(&mut l2s),
        median_approx_error: median(&mut approxes),
    };
    Ok(ExperimentReport { rows, aggregates })
}

fn run_trial(
    cfg: &ExperimentConfig,
    constants: Option<&crate::constants::NormConstants>,
    trial: usize,
    trial_seed: u64,
) -> Result<TrialRow> {
    let p = &cfg.partition;
    let a = generate_matrix(cfg.m, p.n(), derive_seed(trial_seed, TAG_MATRIX));
    let x = generate_group_sparse_signal(
        p,
        cfg.support_groups,
        cfg.leakage,
        derive_seed(trial_seed, TAG_SIGNAL),
    )?;
    let eta = draw_noise(cfg.noise, cfg.m, cfg.eps, derive_seed(trial_seed, TAG_NOISE));
    let y: Vec<f64> = a.matvec(&x).iter().zip(&eta).map(|(ax, e)| ax + e).collect();

    let delta2k = match cfg.delta_certification {
        DeltaCertification::Exact => {
            Some(grip_constant(&a, p, GripOrder::TwoK, cfg.enum_cap)?.delta)
        }
        DeltaCertification::Skip => None,
    };

    let (sigma, _) = sparsity_index(&x, &cfg.norm, p, cfg.enum_cap)?;

    let prob =
        RecoveryProblem::new(a, y, cfg.eps, cfg.norm.clone(), p.clone())?;
    let res = recover(&prob, &cfg.solver)?;

    let diff = sub(&res.x_hat, &x);
    let l2_error = norm2(&diff);
    let approx_error = eval_norm(&cfg.norm, p, &diff)?;

    // Bounds apply only on certified compressible trials.
    let mut compressible = None;
    let mut l2_bound = None;
    let mut approx_bound = None;
    let mut bound_satisfied = None;
    if let (Some(delta), Some(consts)) = (delta2k, constants) {
        if delta < 1.0 {
            let rep = bound_coefficients(consts, delta)?;
            compressible = Some(rep.compressible);
            if rep.compressible {
                let (l2b, apb) = evaluate_bound(&rep, sigma, cfg.eps)?;
                l2_bound = Some(l2b);
                approx_bound = Some(apb);
                bound_satisfied = Some(
                    l2_error <= l2b + BOUND_CHECK_SLACK * (1.0 + l2b)
                        && approx_error <= apb + BOUND_CHECK_SLACK * (1.0 + apb),
                );
            }
        } else {
            compressible = Some(false);
        }
    }

    Ok(TrialRow {
        trial,
        seed: trial_seed,
        sigma,
        eps: cfg.eps,
        delta2k,
        compressible,
        l2_error,
        l2_bound,
        approx_error,
        approx_bound,
        bound_satisfied,
        exact_recovery: l2_error < EXACT_RECOVERY_TOL,
        converged: res.converged,
        failed: None,
    })
}

/// Fixed reference configuration for the sample-complexity comparison:
/// `n = 20,000`, `k = 20`, `g = 6,000` groups with `l_min = 4` (so
/// `s_max = 5`), `delta = 0.25`, `zeta = 1e-8`, Gaussian draws.
#[derive(Clone, Debug)]
pub struct Sec6Report {
    pub n: usize,
    pub k: usize,
    pub g: usize,
    pub s_max: usize,
    pub delta: f64,
    pub zeta: f64,
    pub m_s_formula: f64,
    pub m_gs_formula: f64,
    pub m_s_ceil: u64,
    pub m_gs_ceil: u64,
    /// Values printed in the reference table.
    pub m_s_reference: u64,
    pub m_gs_reference: u64,
    pub ratio_formula: f64,
    pub ratio_reference: f64,
    /// Formula over reference; sits at ~10 for both bounds.
    pub scale_factor_s: f64,
    pub scale_factor_gs: f64,
    pub note: String,
}

/// Evaluate both sample bounds on the reference configuration. No matrix is
/// generated; this is pure arithmetic.
pub fn reproduce_sec6() -> Sec6Report {
    let (n, k, g, s_max) = (20_000usize, 20usize, 6_000usize, 5usize);
    let (delta, zeta) = (0.25, 1e-8);
    let prof = SubGaussianProfile::gaussian();
    let m_s = min_measurements_rip_real(n, k, delta, zeta, &prof).expect("valid inputs");
    let m_gs = min_measurements_grip_real(g, s_max, k, delta, zeta, &prof).expect("valid inputs");
    let (m_s_reference, m_gs_reference) = (53_585u64, 29_978u64);
    Sec6Report {
        n,
        k,
        g,
        s_max,
        delta,
        zeta,
        m_s_formula: m_s,
        m_gs_formula: m_gs,
        m_s_ceil: m_s.ceil() as u64,
        m_gs_ceil: m_gs.ceil() as u64,
        m_s_reference,
        m_gs_reference,
        ratio_formula: m_gs / m_s,
        ratio_reference: m_gs_reference as f64 / m_s_reference as f64,
        scale_factor_s: m_s / m_s_reference as f64,
        scale_factor_gs: m_gs / m_gs_reference as f64,
        note: "direct formula evaluation is ~10x the reference values 53,585 / 29,978 \
               (suspected erratum in the reference table); the group/plain ratio matches \
               either way"
            .to_string(),
    }
}
