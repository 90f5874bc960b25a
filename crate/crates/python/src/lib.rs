//! Python bindings for the group-sparse recovery toolkit.
//!
//! The module mirrors the CLI's JSON schemas: report-producing calls return
//! plain dicts with the same field names, and all indices crossing the
//! boundary are 1-based, matching the file formats.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use gsparse_core::bounds;
use gsparse_core::constants;
use gsparse_core::decomposition;
use gsparse_core::grip::{self, GripOrder};
use gsparse_core::group::{self, GroupPartition, DEFAULT_ENUM_CAP, DEFAULT_SUPPORT_TOL};
use gsparse_core::harness;
use gsparse_core::io;
use gsparse_core::linalg::Mat;
use gsparse_core::norms::{self, NodeNorm, NormSpec};
use gsparse_core::sampling;
use gsparse_core::solver;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_one_based(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|i| i + 1).collect()
}

fn from_one_based(idx: Vec<Vec<usize>>) -> PyResult<Vec<Vec<usize>>> {
    idx.into_iter()
        .map(|g| {
            g.into_iter()
                .map(|i| i.checked_sub(1).ok_or_else(|| err("indices are 1-based")))
                .collect()
        })
        .collect()
}

/// Convert one of the crate's JSON reports into native Python objects so
/// the dict schema matches the CLI output exactly.
fn json_to_py(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(err)?;
    value_to_py(py, &value)
}

fn value_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any().unbind()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any().unbind()
            }
        }
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(value_to_py(py, item)?)?;
            }
            list.into_any().unbind()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, value_to_py(py, val)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

fn mat_from_rows(rows: Vec<Vec<f64>>) -> PyResult<Mat> {
    Mat::from_rows(rows).map_err(err)
}

fn mat_to_rows(a: &Mat) -> Vec<Vec<f64>> {
    (0..a.rows()).map(|i| a.row(i).to_vec()).collect()
}

/// Disjoint groups over 1..n with sparsity budget k.
#[pyclass(name = "Partition", skip_from_py_object)]
#[derive(Clone)]
struct PyPartition {
    inner: GroupPartition,
}

#[pymethods]
impl PyPartition {
    /// Build from 1-based groups.
    #[new]
    fn new(n: usize, groups: Vec<Vec<usize>>, k: usize) -> PyResult<Self> {
        let groups = from_one_based(groups)?;
        Ok(PyPartition { inner: GroupPartition::new(n, groups, k).map_err(err)? })
    }

    /// Conventional sparsity: n singleton groups.
    #[staticmethod]
    fn singletons(n: usize, k: usize) -> PyResult<Self> {
        Ok(PyPartition { inner: GroupPartition::singletons(n, k).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn num_groups(&self) -> usize {
        self.inner.num_groups()
    }

    #[getter]
    fn l_min(&self) -> usize {
        self.inner.l_min()
    }

    #[getter]
    fn l_max(&self) -> usize {
        self.inner.l_max()
    }

    #[getter]
    fn s_max(&self) -> usize {
        self.inner.s_max()
    }

    /// All group k-sparse sets as 1-based index lists.
    #[pyo3(signature = (cap = DEFAULT_ENUM_CAP))]
    fn enumerate(&self, cap: usize) -> PyResult<Vec<Vec<usize>>> {
        Ok(group::enumerate_gks(&self.inner, cap)
            .map_err(err)?
            .into_iter()
            .map(|s| to_one_based(s.indices()))
            .collect())
    }

    /// Entries of x kept on the 1-based index set, zero elsewhere.
    fn restrict(&self, x: Vec<f64>, indices: Vec<usize>) -> PyResult<Vec<f64>> {
        let zero_based: Vec<usize> = indices
            .into_iter()
            .map(|i| i.checked_sub(1).ok_or_else(|| err("indices are 1-based")))
            .collect::<PyResult<_>>()?;
        group::restrict(&x, &zero_based).map_err(err)
    }

    #[pyo3(signature = (x, tol = DEFAULT_SUPPORT_TOL))]
    fn is_group_k_sparse(&self, x: Vec<f64>, tol: f64) -> PyResult<bool> {
        group::is_group_k_sparse(&x, &self.inner, tol).map_err(err)
    }

    fn to_json(&self) -> String {
        io::partition_to_json(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Partition(n={}, k={}, groups={})",
            self.inner.n(),
            self.inner.k(),
            self.inner.num_groups()
        )
    }
}

/// Penalty / approximation norm descriptor.
#[pyclass(name = "Norm", skip_from_py_object)]
#[derive(Clone)]
struct PyNorm {
    inner: NormSpec,
}

#[pymethods]
impl PyNorm {
    #[staticmethod]
    fn l1() -> Self {
        PyNorm { inner: NormSpec::L1 }
    }

    #[staticmethod]
    #[pyo3(signature = (weights = None))]
    fn gl(weights: Option<Vec<f64>>) -> Self {
        PyNorm { inner: NormSpec::GroupLasso { weights } }
    }

    #[staticmethod]
    fn sgl(mu: f64) -> PyResult<Self> {
        Ok(PyNorm { inner: NormSpec::sgl(mu).map_err(err)? })
    }

    /// Tree-structured norm from 1-based laminar node sets.
    #[staticmethod]
    #[pyo3(signature = (nodes, node_norm = "l2"))]
    fn tree(nodes: Vec<Vec<usize>>, node_norm: &str) -> PyResult<Self> {
        let nn = match node_norm {
            "l1" => NodeNorm::L1,
            "l2" => NodeNorm::L2,
            other => return Err(err(format!("unknown node norm `{other}`"))),
        };
        Ok(PyNorm { inner: NormSpec::tree(from_one_based(nodes)?, nn) })
    }

    fn eval(&self, partition: &PyPartition, x: Vec<f64>) -> PyResult<f64> {
        norms::eval_norm(&self.inner, &partition.inner, &x).map_err(err)
    }

    #[pyo3(signature = (partition, gamma = 1.0, trials = 1000, seed = 0))]
    fn check_decomposability(
        &self,
        py: Python<'_>,
        partition: &PyPartition,
        gamma: f64,
        trials: usize,
        seed: u64,
    ) -> PyResult<Py<PyAny>> {
        let rep = norms::check_decomposability(&self.inner, &partition.inner, gamma, trials, seed)
            .map_err(err)?;
        let dict = PyDict::new(py);
        dict.set_item("trials", rep.trials)?;
        dict.set_item("max_violation", rep.max_violation)?;
        dict.set_item("gamma_tested", rep.gamma_tested)?;
        dict.set_item("tolerance", rep.tolerance)?;
        dict.set_item("passed", rep.passed)?;
        Ok(dict.into_any().unbind())
    }

    fn to_json(&self) -> String {
        io::norm_spec_to_json(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Norm({})", self.inner.name())
    }
}

/// Group k-sparsity index: returns (sigma, lambda0) with 1-based indices.
#[pyfunction]
#[pyo3(signature = (partition, norm, x, cap = DEFAULT_ENUM_CAP))]
fn sparsity_index(
    partition: &PyPartition,
    norm: &PyNorm,
    x: Vec<f64>,
    cap: usize,
) -> PyResult<(f64, Vec<usize>)> {
    let (sigma, lam) =
        decomposition::sparsity_index(&x, &norm.inner, &partition.inner, cap).map_err(err)?;
    Ok((sigma, to_one_based(lam.indices())))
}

/// Greedy optimal decomposition as the same dict the CLI `index` emits.
#[pyfunction]
#[pyo3(signature = (partition, norm, x, cap = DEFAULT_ENUM_CAP))]
fn optimal_decomposition(
    py: Python<'_>,
    partition: &PyPartition,
    norm: &PyNorm,
    x: Vec<f64>,
    cap: usize,
) -> PyResult<Py<PyAny>> {
    let dec = decomposition::optimal_decomposition(&x, &norm.inner, &partition.inner, cap)
        .map_err(err)?;
    let obj = json_to_py(py, &io::index_report_json(&dec, dec.sigma))?;
    // Attach the parts themselves; the CLI schema carries only supports.
    let parts = PyList::empty(py);
    for part in &dec.parts {
        parts.append(part.clone())?;
    }
    obj.bind(py).cast::<PyDict>().map_err(|e| err(e.to_string()))?.set_item("parts", parts)?;
    Ok(obj)
}

#[pyfunction]
fn check_interleaving_counterexample(partition: &PyPartition, x: Vec<f64>) -> PyResult<bool> {
    decomposition::check_interleaving_counterexample(&x, &partition.inner, DEFAULT_ENUM_CAP)
        .map_err(err)
}

#[pyfunction]
fn closed_form_constants(
    py: Python<'_>,
    norm: &PyNorm,
    partition: &PyPartition,
) -> PyResult<Py<PyAny>> {
    let c = constants::closed_form_constants(&norm.inner, &partition.inner).map_err(err)?;
    json_to_py(py, &io::constants_json(&c))
}

#[pyfunction]
#[pyo3(signature = (norm, partition, samples = 200, seed = 0, cap = DEFAULT_ENUM_CAP))]
fn estimate_c_d(
    norm: &PyNorm,
    partition: &PyPartition,
    samples: usize,
    seed: u64,
    cap: usize,
) -> PyResult<(f64, f64)> {
    constants::estimate_c_d(&norm.inner, &partition.inner, samples, seed, cap).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (matrix, partition, order = "k", cap = DEFAULT_ENUM_CAP))]
fn grip_constant(
    py: Python<'_>,
    matrix: Vec<Vec<f64>>,
    partition: &PyPartition,
    order: &str,
    cap: usize,
) -> PyResult<Py<PyAny>> {
    let a = mat_from_rows(matrix)?;
    let ord = match order {
        "k" => GripOrder::K,
        "2k" => GripOrder::TwoK,
        other => return Err(err(format!("order must be `k` or `2k`, got `{other}`"))),
    };
    let rep = grip::grip_constant(&a, &partition.inner, ord, cap).map_err(err)?;
    json_to_py(py, &io::grip_report_json(&rep))
}

#[pyfunction]
#[pyo3(signature = (matrix, k, cap = DEFAULT_ENUM_CAP))]
fn rip_constant(py: Python<'_>, matrix: Vec<Vec<f64>>, k: usize, cap: usize) -> PyResult<Py<PyAny>> {
    let a = mat_from_rows(matrix)?;
    let rep = grip::rip_constant(&a, k, cap).map_err(err)?;
    json_to_py(py, &io::grip_report_json(&rep))
}

#[pyfunction]
fn compressibility_threshold(norm: &PyNorm, partition: &PyPartition) -> PyResult<f64> {
    let c = constants::closed_form_constants(&norm.inner, &partition.inner).map_err(err)?;
    Ok(bounds::compressibility_threshold(&c))
}

#[pyfunction]
#[pyo3(signature = (norm, partition, delta2k, sigma = None, eps = None))]
fn bound_coefficients(
    py: Python<'_>,
    norm: &PyNorm,
    partition: &PyPartition,
    delta2k: f64,
    sigma: Option<f64>,
    eps: Option<f64>,
) -> PyResult<Py<PyAny>> {
    let c = constants::closed_form_constants(&norm.inner, &partition.inner).map_err(err)?;
    let mut rep = bounds::bound_coefficients(&c, delta2k).map_err(err)?;
    if let (Some(s), Some(e)) = (sigma, eps) {
        rep = bounds::report_with_bounds(rep, s, e).map_err(err)?;
    }
    json_to_py(py, &io::bound_report_json(&rep))
}

#[pyfunction]
fn subgaussian_c(alpha: f64, beta: f64) -> PyResult<f64> {
    sampling::subgaussian_c(alpha, beta).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, k, g, s_max, delta, zeta, profile = "gaussian"))]
#[allow(clippy::too_many_arguments)]
fn sampling_plan(
    py: Python<'_>,
    n: usize,
    k: usize,
    g: usize,
    s_max: usize,
    delta: f64,
    zeta: f64,
    profile: &str,
) -> PyResult<Py<PyAny>> {
    let prof = match profile {
        "gaussian" => sampling::SubGaussianProfile::gaussian(),
        "rademacher" => sampling::SubGaussianProfile::rademacher(),
        other => return Err(err(format!("unknown profile `{other}`"))),
    };
    let plan = sampling::sampling_plan(n, k, g, s_max, delta, zeta, &prof).map_err(err)?;
    json_to_py(py, &io::sampling_plan_json(&plan))
}

/// Measurement matrix of unit-variance normals scaled by 1/sqrt(m).
#[pyfunction]
#[pyo3(signature = (m, n, seed = 0))]
fn generate_matrix(m: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    mat_to_rows(&sampling::generate_matrix(m, n, seed))
}

/// Solve min ||z||_P subject to ||y - Az||_2 <= eps.
#[pyfunction]
#[pyo3(signature = (matrix, y, eps, norm, partition, max_iters = 20_000, tol = 1e-9))]
#[allow(clippy::too_many_arguments)]
fn recover(
    py: Python<'_>,
    matrix: Vec<Vec<f64>>,
    y: Vec<f64>,
    eps: f64,
    norm: &PyNorm,
    partition: &PyPartition,
    max_iters: usize,
    tol: f64,
) -> PyResult<Py<PyAny>> {
    let a = mat_from_rows(matrix)?;
    let prob = solver::RecoveryProblem::new(
        a,
        y,
        eps,
        norm.inner.clone(),
        partition.inner.clone(),
    )
    .map_err(err)?;
    let opts = solver::SolverOptions { max_iters, tol, ..Default::default() };
    let res = solver::recover(&prob, &opts).map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("x_hat", res.x_hat.clone())?;
    dict.set_item("iterations", res.iterations)?;
    dict.set_item("primal_residual", res.primal_residual)?;
    dict.set_item("dual_residual", res.dual_residual)?;
    dict.set_item("constraint_slack", res.constraint_slack)?;
    dict.set_item("objective", res.objective)?;
    dict.set_item("converged", res.converged)?;
    Ok(dict.into_any().unbind())
}

/// Run a batch experiment from the same JSON config the CLI accepts.
/// Returns (per-trial CSV, aggregates dict).
#[pyfunction]
fn run_experiment(py: Python<'_>, config_json: &str) -> PyResult<(String, Py<PyAny>)> {
    let cfg = io::experiment_config_from_json(config_json).map_err(err)?;
    let rep = harness::run_experiment(&cfg).map_err(err)?;
    let csv = io::experiment_report_csv(&rep);
    let agg = json_to_py(py, &io::experiment_report_json(&rep))?;
    Ok((csv, agg))
}

/// Evaluate the sample-complexity formulas on the fixed reference
/// configuration.
#[pyfunction]
fn repro_sec6(py: Python<'_>) -> PyResult<Py<PyAny>> {
    json_to_py(py, &io::sec6_report_json(&harness::reproduce_sec6()))
}

/// Group-sparse signal recovery: structured norms, sparsity indices,
/// isometry certification, recovery error bounds, sample-size estimates,
/// and a constrained solver. Indices crossing this boundary are 1-based.
#[pymodule]
fn _gsparse(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPartition>()?;
    m.add_class::<PyNorm>()?;
    m.add_function(wrap_pyfunction!(sparsity_index, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(check_interleaving_counterexample, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_constants, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_c_d, m)?)?;
    m.add_function(wrap_pyfunction!(grip_constant, m)?)?;
    m.add_function(wrap_pyfunction!(rip_constant, m)?)?;
    m.add_function(wrap_pyfunction!(compressibility_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(bound_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(subgaussian_c, m)?)?;
    m.add_function(wrap_pyfunction!(sampling_plan, m)?)?;
    m.add_function(wrap_pyfunction!(generate_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(recover, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(repro_sec6, m)?)?;
    Ok(())
}
