//! Python bindings for `pooldesign_core`.
//!
//! Domain errors raise `ValueError`; solver and quadrature failures raise
//! `pooldesign.NumericalError`, a subclass of `RuntimeError`.

use pooldesign_core as core;
use pooldesign_core::{
    BayesOptions, Error, GroupSize, Method, MinimaxOptions, Prevalence, PriorSpec,
    QuadratureOptions, ScanOptions, TableId, TableOptions,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(pooldesign, NumericalError, PyRuntimeError);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ErrorKind {
    Value,
    Numerical,
}

fn kind_of(e: &Error) -> ErrorKind {
    if e.is_numerical() {
        ErrorKind::Numerical
    } else {
        ErrorKind::Value
    }
}

fn to_py(e: Error) -> PyErr {
    match kind_of(&e) {
        ErrorKind::Value => PyValueError::new_err(e.to_string()),
        ErrorKind::Numerical => NumericalError::new_err(e.to_string()),
    }
}

trait IntoPyResult<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPyResult<T> for core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn group(k: u64) -> PyResult<GroupSize> {
    GroupSize::new(k).py()
}

fn prevalence(p: f64) -> PyResult<Prevalence> {
    Prevalence::new(p).py()
}

fn scan(patience: u64) -> ScanOptions {
    ScanOptions {
        patience,
        ..ScanOptions::default()
    }
}

/// Worst-case prevalence and regret of one pool size; `p_star == 0` is the `p -> 0` limit.
#[pyclass(frozen, get_all, skip_from_py_object, module = "pooldesign")]
#[derive(Debug, Clone)]
struct LossPoint {
    k: u64,
    p_star: f64,
    sup_loss: f64,
}

#[pymethods]
impl LossPoint {
    fn is_limit(&self) -> bool {
        self.p_star == 0.0
    }

    fn __repr__(&self) -> String {
        format!(
            "LossPoint(k={}, p_star={}, sup_loss={})",
            self.k, self.p_star, self.sup_loss
        )
    }
}

impl From<core::LossPoint> for LossPoint {
    fn from(p: core::LossPoint) -> Self {
        LossPoint {
            k: p.k.get(),
            p_star: p.p_star,
            sup_loss: p.sup_loss,
        }
    }
}

#[pyclass(frozen, get_all, skip_from_py_object, module = "pooldesign")]
#[derive(Debug, Clone)]
struct MinimaxResult {
    k_minimax: u64,
    upper_bound: f64,
    worst_point: LossPoint,
    method: String,
}

#[pymethods]
impl MinimaxResult {
    fn __repr__(&self) -> String {
        format!(
            "MinimaxResult(k_minimax={}, upper_bound={}, worst_point={}, method='{}')",
            self.k_minimax,
            self.upper_bound,
            self.worst_point.__repr__(),
            self.method
        )
    }
}

#[pyclass(frozen, get_all, skip_from_py_object, module = "pooldesign")]
#[derive(Debug, Clone)]
struct BayesResult {
    k_opt: u64,
    expected_tests: f64,
    a: f64,
    b: f64,
    upper_bound: f64,
}

#[pymethods]
impl BayesResult {
    fn __repr__(&self) -> String {
        format!(
            "BayesResult(k_opt={}, expected_tests={}, a={}, b={}, upper_bound={})",
            self.k_opt, self.expected_tests, self.a, self.b, self.upper_bound
        )
    }
}

/// Expected tests per person with pool size `k` at prevalence `p`.
#[pyfunction]
fn expected_tests(k: u64, p: f64) -> PyResult<f64> {
    core::expected_tests(group(k)?, p).py()
}

/// Cost-optimal pool size for prevalence `p`.
#[pyfunction]
fn samuels_optimal_k(p: f64) -> PyResult<u64> {
    Ok(core::samuels_optimal_k(prevalence(p)?).get())
}

#[pyfunction]
fn optimal_expected_tests(p: f64) -> PyResult<f64> {
    Ok(core::optimal_expected_tests(prevalence(p)?))
}

/// Regret of pool size `k` over the optimal design at `p`.
#[pyfunction]
fn loss(k: u64, p: f64) -> PyResult<f64> {
    core::loss(group(k)?, p).py()
}

#[pyfunction]
fn pooling_threshold() -> f64 {
    core::pooling_threshold()
}

#[pyfunction]
fn delta(k: u64, q: f64) -> PyResult<f64> {
    core::delta(group(k)?, q).py()
}

#[pyfunction]
fn larger_root(k: u64) -> PyResult<f64> {
    core::larger_root(group(k)?).py()
}

/// `(p_low, p_high)` on which `k` is the optimal pool size.
#[pyfunction]
fn optimality_range(k: u64) -> PyResult<(f64, f64)> {
    let r = core::optimality_range(group(k)?).py()?;
    Ok((r.p_low, r.p_high))
}

#[pyfunction]
#[pyo3(signature = (k, upper_bound = 1.0))]
fn sup_loss_analytic(k: u64, upper_bound: f64) -> PyResult<LossPoint> {
    Ok(core::sup_loss_analytic(group(k)?, upper_bound).py()?.into())
}

#[pyfunction]
#[pyo3(signature = (k, upper_bound = 1.0, step = None))]
fn sup_loss_grid(k: u64, upper_bound: f64, step: Option<f64>) -> PyResult<LossPoint> {
    let step = step.unwrap_or_else(|| core::default_grid_step(upper_bound));
    Ok(core::sup_loss_grid(group(k)?, upper_bound, step)
        .py()?
        .into())
}

/// Pool size minimising the worst-case regret for prevalence in `(0, upper_bound]`.
#[pyfunction]
#[pyo3(signature = (upper_bound = 1.0, method = "analytic", grid_step = None, patience = 10))]
fn minimax_group_size(
    upper_bound: f64,
    method: &str,
    grid_step: Option<f64>,
    patience: u64,
) -> PyResult<MinimaxResult> {
    let method = match method {
        "analytic" => Method::Analytic,
        "grid" => Method::Grid,
        other => {
            return Err(PyValueError::new_err(format!(
                "method must be 'analytic' or 'grid', got {other:?}"
            )))
        }
    };
    let opts = MinimaxOptions {
        method,
        grid_step,
        scan: scan(patience),
    };
    let r = core::minimax_group_size_with(upper_bound, &opts).py()?;
    Ok(MinimaxResult {
        k_minimax: r.k_minimax.get(),
        upper_bound: r.upper_bound,
        worst_point: r.worst_point.into(),
        method: if method == Method::Grid {
            "grid"
        } else {
            "analytic"
        }
        .to_string(),
    })
}

#[pyfunction]
fn jeffreys_constant(upper_bound: f64) -> PyResult<f64> {
    core::jeffreys_constant(upper_bound).py()
}

#[pyfunction]
fn expected_tests_uniform(k: u64, upper_bound: f64) -> PyResult<f64> {
    core::expected_tests_uniform(group(k)?, upper_bound).py()
}

/// Prior-mean expected tests with pool size `k` under Beta(a, b) truncated to `(0, upper_bound]`.
#[pyfunction]
#[pyo3(signature = (k, a, b, upper_bound = 1.0, quad_tol = 1e-10))]
fn expected_tests_under_prior(
    k: u64,
    a: f64,
    b: f64,
    upper_bound: f64,
    quad_tol: f64,
) -> PyResult<f64> {
    let prior = PriorSpec::new(a, b, upper_bound).py()?;
    core::expected_tests_under_prior_with(
        group(k)?,
        &prior,
        &QuadratureOptions::with_tolerance(quad_tol),
    )
    .py()
}

#[pyfunction]
#[pyo3(signature = (a, b, upper_bound = 1.0, quad_tol = 1e-10, patience = 10))]
fn bayes_optimal_k(
    a: f64,
    b: f64,
    upper_bound: f64,
    quad_tol: f64,
    patience: u64,
) -> PyResult<BayesResult> {
    let prior = PriorSpec::new(a, b, upper_bound).py()?;
    let opts = BayesOptions {
        quadrature: QuadratureOptions::with_tolerance(quad_tol),
        scan: scan(patience),
    };
    let r = core::bayes_optimal_k_with(&prior, &opts).py()?;
    Ok(BayesResult {
        k_opt: r.k_opt.get(),
        expected_tests: r.expected_tests_at_opt,
        a,
        b,
        upper_bound,
    })
}

#[pyfunction]
fn relative_efficiency(k: u64, p: f64) -> PyResult<f64> {
    Ok(core::relative_efficiency(group(k)?, prevalence(p)?))
}

type Rows = Vec<(String, Vec<f64>)>;
type Mismatches = Vec<(String, usize, String, Option<f64>)>;

fn table_id(number: u8) -> PyResult<TableId> {
    TableId::from_number(number)
        .ok_or_else(|| PyValueError::new_err(format!("table must be 1 to 5, got {number}")))
}

/// Regenerates a design table as `(title, header_rows, rows)`; each row is `(label, values)`.
#[pyfunction]
fn generate_table(number: u8) -> PyResult<(String, Rows, Rows)> {
    let report = core::generate_table(table_id(number)?, &TableOptions::default()).py()?;
    let flatten = |rows: &[core::TableRow]| -> Rows {
        rows.iter()
            .map(|r| (r.label.clone(), r.cells.iter().map(|c| c.value()).collect()))
            .collect()
    };
    Ok((
        report.title.clone(),
        flatten(&report.header),
        flatten(&report.rows),
    ))
}

/// Cells of a regenerated table that disagree with the reference values,
/// as `(row, column, expected, computed)`.
#[pyfunction]
fn check_table(number: u8) -> PyResult<Mismatches> {
    let report = core::generate_table(table_id(number)?, &TableOptions::default()).py()?;
    Ok(core::golden::check(&report)
        .into_iter()
        .map(|m| (m.row, m.column, m.expected, m.computed))
        .collect())
}

#[pymodule]
fn pooldesign(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<LossPoint>()?;
    m.add_class::<MinimaxResult>()?;
    m.add_class::<BayesResult>()?;
    m.add_function(wrap_pyfunction!(expected_tests, m)?)?;
    m.add_function(wrap_pyfunction!(samuels_optimal_k, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_expected_tests, m)?)?;
    m.add_function(wrap_pyfunction!(loss, m)?)?;
    m.add_function(wrap_pyfunction!(pooling_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(delta, m)?)?;
    m.add_function(wrap_pyfunction!(larger_root, m)?)?;
    m.add_function(wrap_pyfunction!(optimality_range, m)?)?;
    m.add_function(wrap_pyfunction!(sup_loss_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(sup_loss_grid, m)?)?;
    m.add_function(wrap_pyfunction!(minimax_group_size, m)?)?;
    m.add_function(wrap_pyfunction!(jeffreys_constant, m)?)?;
    m.add_function(wrap_pyfunction!(expected_tests_uniform, m)?)?;
    m.add_function(wrap_pyfunction!(expected_tests_under_prior, m)?)?;
    m.add_function(wrap_pyfunction!(bayes_optimal_k, m)?)?;
    m.add_function(wrap_pyfunction!(relative_efficiency, m)?)?;
    m.add_function(wrap_pyfunction!(generate_table, m)?)?;
    m.add_function(wrap_pyfunction!(check_table, m)?)?;
    Ok(())
}
