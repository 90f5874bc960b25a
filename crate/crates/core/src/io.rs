//! File formats and report serialization.
//!
//! On disk everything is 1-based: partition groups, tree node sets, support
//! sets in reports. Matrices are CSV, row-major, with an optional `m,n`
//! header (written by default). Floats in CSV reports are printed with 17
//! significant digits so values round-trip exactly; JSON uses the shortest
//! representation that round-trips, which is equally lossless.

use serde::{Deserialize, Serialize};

use crate::bounds::BoundReport;
use crate::constants::NormConstants;
use crate::error::{Error, Result};
use crate::grip::GripReport;
use crate::group::GroupPartition;
use crate::harness::{
    Aggregates, DeltaCertification, ExperimentConfig, ExperimentReport, NoiseModel, Sec6Report,
    TrialRow,
};
use crate::linalg::Mat;
use crate::norms::{NodeNorm, NormSpec};
use crate::sampling::SamplingPlan;
use crate::solver::{RecoveryResult, SolverOptions};

/// 17 significant digits: enough to reproduce any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{x:.16e}")
    }
}

fn to_one_based(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|i| i + 1).collect()
}

fn from_one_based(idx: &[usize]) -> Result<Vec<usize>> {
    idx.iter()
        .map(|&i| i.checked_sub(1).ok_or(Error::Parse("indices are 1-based".into())))
        .collect()
}

// ---------------------------------------------------------------------------
// Matrices and vectors (CSV)
// ---------------------------------------------------------------------------

pub fn write_matrix_csv(a: &Mat) -> String {
    let mut out = format!("{},{}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_matrix_csv(text: &str) -> Result<Mat> {
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    if lines.is_empty() {
        return Err(Error::Parse("empty matrix file".into()));
    }
    // Optional header: two integers matching the remaining shape. A first
    // line that fails the shape check is treated as data.
    let head: Vec<&str> = lines[0].split(',').map(str::trim).collect();
    if head.len() == 2 {
        if let (Ok(m), Ok(n)) = (head[0].parse::<usize>(), head[1].parse::<usize>()) {
            if lines.len() - 1 == m {
                let rows = parse_rows(&lines[1..])?;
                if rows.iter().all(|r| r.len() == n) {
                    return Mat::from_rows(rows);
                }
            }
        }
    }
    Mat::from_rows(parse_rows(&lines)?)
}

fn parse_rows(lines: &[&str]) -> Result<Vec<Vec<f64>>> {
    lines
        .iter()
        .map(|line| {
            line.split(',')
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad float `{}`", f.trim())))
                })
                .collect()
        })
        .collect()
}

/// One value per line.
pub fn write_vector_csv(x: &[f64]) -> String {
    let mut out = String::new();
    for &v in x {
        out.push_str(&fmt_f64(v));
        out.push('\n');
    }
    out
}

pub fn parse_vector_csv(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad float `{}`", l.trim())))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Partition (JSON, 1-based)
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct PartitionDto {
    n: usize,
    k: usize,
    groups: Vec<Vec<usize>>,
}

pub fn partition_to_json(p: &GroupPartition) -> String {
    let dto = PartitionDto {
        n: p.n(),
        k: p.k(),
        groups: p.groups().iter().map(|g| to_one_based(g)).collect(),
    };
    serde_json::to_string_pretty(&dto).expect("serializable")
}

pub fn partition_from_json(text: &str) -> Result<GroupPartition> {
    let dto: PartitionDto =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let groups = dto
        .groups
        .iter()
        .map(|g| from_one_based(g))
        .collect::<Result<Vec<_>>>()?;
    GroupPartition::new(dto.n, groups, dto.k)
}

// ---------------------------------------------------------------------------
// Norm descriptor (JSON)
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct NormSpecDto {
    variant: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nodes: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    node_norm: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
}

pub fn norm_spec_to_json(spec: &NormSpec) -> String {
    let dto = match spec {
        NormSpec::L1 => NormSpecDto {
            variant: "l1".into(),
            mu: None,
            nodes: None,
            node_norm: None,
            weights: None,
        },
        NormSpec::GroupLasso { weights } => NormSpecDto {
            variant: "gl".into(),
            mu: None,
            nodes: None,
            node_norm: None,
            weights: weights.clone(),
        },
        NormSpec::SparseGroupLasso { mu } => NormSpecDto {
            variant: "sgl".into(),
            mu: Some(*mu),
            nodes: None,
            node_norm: None,
            weights: None,
        },
        NormSpec::TreeStructured { nodes, node_norm } => NormSpecDto {
            variant: "tree".into(),
            mu: None,
            nodes: Some(nodes.iter().map(|n| to_one_based(n)).collect()),
            node_norm: Some(
                match node_norm {
                    NodeNorm::L1 => "l1",
                    NodeNorm::L2 => "l2",
                }
                .into(),
            ),
            weights: None,
        },
    };
    serde_json::to_string_pretty(&dto).expect("serializable")
}

pub fn norm_spec_from_json(text: &str) -> Result<NormSpec> {
    let dto: NormSpecDto =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    norm_spec_from_dto(dto)
}

fn norm_spec_from_dto(dto: NormSpecDto) -> Result<NormSpec> {
    match dto.variant.as_str() {
        "l1" => Ok(NormSpec::L1),
        "gl" => Ok(NormSpec::GroupLasso { weights: dto.weights }),
        "sgl" => {
            let mu = dto.mu.ok_or(Error::Parse("sgl needs `mu`".into()))?;
            NormSpec::sgl(mu)
        }
        "tree" => {
            let nodes = dto.nodes.ok_or(Error::Parse("tree needs `nodes`".into()))?;
            let nodes = nodes
                .iter()
                .map(|n| from_one_based(n))
                .collect::<Result<Vec<_>>>()?;
            let node_norm = match dto.node_norm.as_deref() {
                Some("l1") => NodeNorm::L1,
                Some("l2") | None => NodeNorm::L2,
                Some(other) => {
                    return Err(Error::Parse(format!("unknown node_norm `{other}`")))
                }
            };
            Ok(NormSpec::tree(nodes, node_norm))
        }
        other => Err(Error::Parse(format!("unknown norm variant `{other}`"))),
    }
}

// ---------------------------------------------------------------------------
// Reports (JSON, 1-based indices)
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct StageDto {
    groups: Vec<usize>,
    indices: Vec<usize>,
}

#[derive(Serialize)]
struct IndexReportDto {
    sigma: f64,
    lambda0: Vec<usize>,
    lambda0_groups: Vec<usize>,
    stages: Vec<StageDto>,
}

pub fn index_report_json(dec: &crate::decomposition::SparseDecomposition, sigma: f64) -> String {
    let (lambda0, lambda0_groups) = match dec.lambdas.first() {
        Some(l0) => (to_one_based(l0.indices()), to_one_based(l0.member_group_ids())),
        None => (vec![], vec![]),
    };
    let dto = IndexReportDto {
        sigma,
        lambda0,
        lambda0_groups,
        stages: dec
            .lambdas
            .iter()
            .map(|l| StageDto {
                groups: to_one_based(l.member_group_ids()),
                indices: to_one_based(l.indices()),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&dto).expect("serializable")
}

#[derive(Serialize)]
struct ConstantsDto {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    f: f64,
    gamma: f64,
    r: f64,
}

pub fn constants_json(c: &NormConstants) -> String {
    let dto = ConstantsDto { a: c.a, b: c.b, c: c.c, d: c.d, f: c.f, gamma: c.gamma, r: c.r };
    serde_json::to_string_pretty(&dto).expect("serializable")
}

#[derive(Serialize)]
struct GripReportDto {
    order: usize,
    delta: f64,
    witness_groups: Vec<usize>,
    witness_indices: Vec<usize>,
    rank_deficient: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    per_set: Option<Vec<GripSetDto>>,
}

#[derive(Serialize)]
struct GripSetDto {
    groups: Vec<usize>,
    lambda_min: f64,
    lambda_max: f64,
}

pub fn grip_report_json(rep: &GripReport) -> String {
    let dto = GripReportDto {
        order: rep.order,
        delta: rep.delta,
        witness_groups: to_one_based(rep.witness.member_group_ids()),
        witness_indices: to_one_based(rep.witness.indices()),
        rank_deficient: rep.rank_deficient,
        per_set: rep.per_set_bounds.as_ref().map(|sets| {
            sets.iter()
                .map(|(lam, (lo, hi))| GripSetDto {
                    groups: to_one_based(lam.member_group_ids()),
                    lambda_min: *lo,
                    lambda_max: *hi,
                })
                .collect()
        }),
    };
    serde_json::to_string_pretty(&dto).expect("serializable")
}

#[derive(Serialize)]
struct BoundReportDto {
    delta2k: f64,
    threshold: f64,
    compressible: bool,
    /// `null` encodes the infinite marker past the threshold.
    d1: Option<f64>,
    d2: Option<f64>,
    d3: Option<f64>,
    d4: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    l2_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    approx_bound: Option<f64>,
}

pub fn bound_report_json(rep: &BoundReport) -> String {
    let fin = |x: f64| x.is_finite().then_some(x);
    let dto = BoundReportDto {
        delta2k: rep.delta2k,
        threshold: rep.threshold,
        compressible: rep.compressible,
        d1: fin(rep.d1),
        d2: fin(rep.d2),
        d3: fin(rep.d3),
        d4: fin(rep.d4),
        l2_bound: rep.l2_bound,
        approx_bound: rep.approx_bound,
    };
    serde_json::to_string_pretty(&dto).expect("serializable")
}

#[derive(Serialize)]
struct SamplingPlanDto {
    n: usize,
    k: usize,
    g: usize,
    s_max: usize,
    delta: f64,
    zeta: f64,
    theta: f64,
    m_s: u64,
    m_gs: u64,
    m_s_real: f64,
    m_gs_real: f64,
}

pub fn sampling_plan_json(plan: &SamplingPlan) -> String {
    let dto = SamplingPlanDto {
        n: plan.n,
        k: plan.k,
        g: plan.g,
        s_max: plan.s_max,
        delta: plan.delta,
        zeta: plan.zeta,
        theta: plan.theta,
        m_s: plan.m_s,
        m_gs: plan.m_gs,
        m_s_real: plan.m_s_real,
        m_gs_real: plan.m_gs_real,
    };
    serde_json::to_string_pretty(&dto).expect("serializable")
}

#[derive(Serialize)]
struct Sec6Dto {
    n: usize,
    k: usize,
    g: usize,
    s_max: usize,
    delta: f64,
    zeta: f64,
    m_s_formula: f64,
    m_gs_formula: f64,
    m_s_ceil: u64,
    m_gs_ceil: u64,
    m_s_reference: u64,
    m_gs_reference: u64,
    ratio_formula: f64,
    ratio_reference: f64,
    scale_factor_s: f64,
    scale_factor_gs: f64,
    note: String,
}

pub fn sec6_report_json(rep: &Sec6Report) -> String {
    let dto = Sec6Dto {
        n: rep.n,
        k: rep.k,
        g: rep.g,
        s_max: rep.s_max,
        delta: rep.delta,
        zeta: rep.zeta,
        m_s_formula: rep.m_s_formula,
        m_gs_formula: rep.m_gs_formula,
        m_s_ceil: rep.m_s_ceil,
        m_gs_ceil: rep.m_gs_ceil,
        m_s_reference: rep.m_s_reference,
        m_gs_reference: rep.m_gs_reference,
        ratio_formula: rep.ratio_formula,
        ratio_reference: rep.ratio_reference,
        scale_factor_s: rep.scale_factor_s,
        scale_factor_gs: rep.scale_factor_gs,
        note: rep.note.clone(),
    };
    serde_json::to_string_pretty(&dto).expect("serializable")
}

#[derive(Serialize)]
struct RecoveryDiagnosticsDto {
    iterations: usize,
    primal_residual: f64,
    dual_residual: f64,
    constraint_slack: f64,
    objective: f64,
    converged: bool,
    eps: f64,
    norm: String,
}

pub fn recovery_diagnostics_json(res: &RecoveryResult, eps: f64, norm: &NormSpec) -> String {
    let dto = RecoveryDiagnosticsDto {
        iterations: res.iterations,
        primal_residual: res.primal_residual,
        dual_residual: res.dual_residual,
        constraint_slack: res.constraint_slack,
        objective: res.objective,
        converged: res.converged,
        eps,
        norm: norm.name().into(),
    };
    serde_json::to_string_pretty(&dto).expect("serializable")
}

// ---------------------------------------------------------------------------
// Experiment config (JSON) and report (CSV + JSON)
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SolverOptionsDto {
    #[serde(default = "default_tau")]
    tau: f64,
    #[serde(default = "default_tol")]
    tol: f64,
    #[serde(default = "default_feas_tol")]
    feas_tol: f64,
    #[serde(default = "default_max_iters")]
    max_iters: usize,
    #[serde(default = "default_relaxation")]
    relaxation: f64,
}

fn default_tau() -> f64 {
    SolverOptions::default().tau
}
fn default_tol() -> f64 {
    SolverOptions::default().tol
}
fn default_feas_tol() -> f64 {
    SolverOptions::default().feas_tol
}
fn default_max_iters() -> usize {
    SolverOptions::default().max_iters
}
fn default_relaxation() -> f64 {
    SolverOptions::default().relaxation
}

impl Default for SolverOptionsDto {
    fn default() -> Self {
        let o = SolverOptions::default();
        SolverOptionsDto {
            tau: o.tau,
            tol: o.tol,
            feas_tol: o.feas_tol,
            max_iters: o.max_iters,
            relaxation: o.relaxation,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ExperimentConfigDto {
    partition: PartitionDto,
    norm: NormSpecDto,
    m: usize,
    #[serde(default = "one")]
    support_groups: usize,
    #[serde(default)]
    leakage: f64,
    #[serde(default)]
    eps: f64,
    /// "sphere" (default) or "gaussian-clipped".
    #[serde(default = "default_noise")]
    noise: String,
    #[serde(default = "one")]
    trials: usize,
    #[serde(default)]
    seed: u64,
    /// "exact" (default) or "skip".
    #[serde(default = "default_cert")]
    delta_certification: String,
    #[serde(default)]
    solver: SolverOptionsDto,
    #[serde(default = "default_cap")]
    enum_cap: usize,
}

fn one() -> usize {
    1
}
fn default_noise() -> String {
    "sphere".into()
}
fn default_cert() -> String {
    "exact".into()
}
fn default_cap() -> usize {
    crate::group::DEFAULT_ENUM_CAP
}

pub fn experiment_config_from_json(text: &str) -> Result<ExperimentConfig> {
    let dto: ExperimentConfigDto =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let groups = dto
        .partition
        .groups
        .iter()
        .map(|g| from_one_based(g))
        .collect::<Result<Vec<_>>>()?;
    let partition = GroupPartition::new(dto.partition.n, groups, dto.partition.k)?;
    let norm = norm_spec_from_dto(dto.norm)?;
    let noise = match dto.noise.as_str() {
        "sphere" => NoiseModel::SphereWorstCase,
        "gaussian-clipped" => NoiseModel::GaussianClipped,
        other => return Err(Error::Parse(format!("unknown noise model `{other}`"))),
    };
    let delta_certification = match dto.delta_certification.as_str() {
        "exact" => DeltaCertification::Exact,
        "skip" => DeltaCertification::Skip,
        other => return Err(Error::Parse(format!("unknown certification mode `{other}`"))),
    };
    Ok(ExperimentConfig {
        partition,
        norm,
        m: dto.m,
        support_groups: dto.support_groups,
        leakage: dto.leakage,
        eps: dto.eps,
        noise,
        trials: dto.trials,
        seed: dto.seed,
        delta_certification,
        solver: SolverOptions {
            tau: dto.solver.tau,
            tol: dto.solver.tol,
            feas_tol: dto.solver.feas_tol,
            max_iters: dto.solver.max_iters,
            relaxation: dto.solver.relaxation,
        },
        enum_cap: dto.enum_cap,
    })
}

/// Versioned per-trial CSV. Column order is part of the format.
pub const EXPERIMENT_CSV_HEADER: &str = "# gsparse experiment report v1";

const EXPERIMENT_COLUMNS: &str = "trial,seed,sigma,eps,delta2k,compressible,l2_error,l2_bound,\
approx_error,approx_bound,bound_satisfied,exact_recovery,converged,failed";

pub fn experiment_rows_csv(rows: &[TrialRow]) -> String {
    let mut out = String::new();
    out.push_str(EXPERIMENT_CSV_HEADER);
    out.push('\n');
    out.push_str(EXPERIMENT_COLUMNS);
    out.push('\n');
    let opt_f = |v: Option<f64>| v.map_or(String::new(), fmt_f64);
    let opt_b = |v: Option<bool>| v.map_or(String::new(), |b| b.to_string());
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.trial,
            r.seed,
            fmt_f64(r.sigma),
            fmt_f64(r.eps),
            opt_f(r.delta2k),
            opt_b(r.compressible),
            fmt_f64(r.l2_error),
            opt_f(r.l2_bound),
            fmt_f64(r.approx_error),
            opt_f(r.approx_bound),
            opt_b(r.bound_satisfied),
            r.exact_recovery,
            r.converged,
            r.failed.clone().unwrap_or_default().replace(',', ";"),
        ));
    }
    out
}

#[derive(Serialize)]
struct AggregatesDto {
    trials: usize,
    failed: usize,
    violations: usize,
    certified: usize,
    certified_compressible: usize,
    exact_recovery_rate: f64,
    median_l2_error: f64,
    median_approx_error: f64,
}

pub fn aggregates_json(agg: &Aggregates) -> String {
    let nan_safe = |x: f64| if x.is_nan() { -1.0 } else { x };
    let dto = AggregatesDto {
        trials: agg.trials,
        failed: agg.failed,
        violations: agg.violations,
        certified: agg.certified,
        certified_compressible: agg.certified_compressible,
        exact_recovery_rate: agg.exact_recovery_rate,
        median_l2_error: nan_safe(agg.median_l2_error),
        median_approx_error: nan_safe(agg.median_approx_error),
    };
    serde_json::to_string_pretty(&dto).expect("serializable")
}

pub fn experiment_report_csv(rep: &ExperimentReport) -> String {
    experiment_rows_csv(&rep.rows)
}

pub fn experiment_report_json(rep: &ExperimentReport) -> String {
    aggregates_json(&rep.aggregates)
}
