//! Python bindings. Matrices cross the boundary as lists of rows.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use rankcert::certify as cert;
use rankcert::constructions;
use rankcert::harness::{self, CertifyOptions};
use rankcert::matrix::DenseMatrix;
use rankcert::onebit;
use rankcert::sampling::rng_from_seed;
use rankcert::sdp::SolverOptions;

fn to_py(e: rankcert::Error) -> PyErr {
    match e {
        rankcert::Error::Solver(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<DenseMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != c) {
        return Err(PyValueError::new_err("rows have different lengths"));
    }
    DenseMatrix::from_row_major(r, c, rows.concat()).map_err(to_py)
}

fn rows(m: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn solver(max_iter: Option<usize>) -> SolverOptions {
    let mut o = SolverOptions::default();
    if let Some(k) = max_iter {
        o.max_iter = k;
    }
    o
}

/// Outcome of a δ or δ_f program.
#[pyclass(name = "SdpResult", frozen, get_all)]
struct PySdpResult {
    delta: f64,
    status: String,
    iterations: usize,
    analytic_lower_bound: Option<f64>,
    diagnostics: String,
    h: Vec<Vec<f64>>,
}

impl From<cert::CertifyResult> for PySdpResult {
    fn from(r: cert::CertifyResult) -> Self {
        Self {
            delta: r.delta,
            status: r.status.to_string(),
            iterations: r.iterations,
            analytic_lower_bound: r.analytic_lower_bound,
            diagnostics: r.diagnostics,
            h: rows(&r.h),
        }
    }
}

#[pymethods]
impl PySdpResult {
    fn __repr__(&self) -> String {
        format!("SdpResult(delta={}, status='{}', iterations={})", self.delta, self.status, self.iterations)
    }
}

#[pyclass(name = "CertifyReport", frozen, get_all)]
struct PyCertifyReport {
    verdict: String,
    exit_code: i32,
    delta: f64,
    delta_f: Option<f64>,
    relative_error: Option<f64>,
    epsilon: Option<f64>,
    global_threshold: f64,
    local_threshold: Option<f64>,
    text: String,
}

#[pymethods]
impl PyCertifyReport {
    fn __repr__(&self) -> String {
        format!("CertifyReport(verdict='{}', delta={})", self.verdict, self.delta)
    }

    fn __str__(&self) -> String {
        self.text.clone()
    }
}

#[pyclass(name = "RadiusCertificate", frozen, get_all)]
struct PyRadiusCertificate {
    radius: f64,
    m1: f64,
    m2: f64,
    m3: f64,
    gamma_scale: f64,
    delta: f64,
    kappa: Option<f64>,
    lambda_r: f64,
    local_certifies: bool,
    global_certifies: Option<bool>,
}

impl From<onebit::RadiusCertificate> for PyRadiusCertificate {
    fn from(c: onebit::RadiusCertificate) -> Self {
        Self {
            radius: c.radius,
            m1: c.m1,
            m2: c.m2,
            m3: c.m3,
            gamma_scale: c.gamma_scale,
            delta: c.delta,
            kappa: c.kappa,
            lambda_r: c.lambda_r,
            local_certifies: c.local_certifies(),
            global_certifies: c.global_certifies(),
        }
    }
}

#[pymethods]
impl PyRadiusCertificate {
    fn __repr__(&self) -> String {
        format!("RadiusCertificate(radius={}, delta={}, lambda_r={})", self.radius, self.delta, self.lambda_r)
    }
}

#[pyfunction]
#[pyo3(signature = (x, z, kappa, max_iter = None))]
fn delta_sdp(x: Vec<Vec<f64>>, z: Vec<Vec<f64>>, kappa: f64, max_iter: Option<usize>) -> PyResult<PySdpResult> {
    let inst = cert::build_instance(&matrix(x)?, &matrix(z)?, kappa).map_err(to_py)?;
    inst.require_nondegenerate().map_err(to_py)?;
    cert::delta_sdp_with(&inst, &solver(max_iter)).map(Into::into).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (x, z, max_iter = None))]
fn delta_f_sdp(x: Vec<Vec<f64>>, z: Vec<Vec<f64>>, max_iter: Option<usize>) -> PyResult<PySdpResult> {
    cert::delta_f_sdp_with(&matrix(x)?, &matrix(z)?, &solver(max_iter)).map(Into::into).map_err(to_py)
}

/// Closed-form η₀ for a rank-1 pair given as vectors.
#[pyfunction]
fn eta0(x: Vec<f64>, z: Vec<f64>) -> PyResult<f64> {
    cert::eta0(&x, &z).map_err(to_py)
}

#[pyfunction]
fn global_threshold(kappa: f64) -> PyResult<f64> {
    cert::global_threshold(kappa).map_err(to_py)
}

#[pyfunction]
fn local_threshold(epsilon: f64) -> PyResult<f64> {
    cert::local_threshold(epsilon).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (x, z, kappa, epsilon = None, delta = None))]
fn certify(
    x: Vec<Vec<f64>>,
    z: Vec<Vec<f64>>,
    kappa: f64,
    epsilon: Option<f64>,
    delta: Option<f64>,
) -> PyResult<PyCertifyReport> {
    let opts = CertifyOptions { kappa, epsilon, delta, solver: SolverOptions::default() };
    let rep = harness::certify_pair(&matrix(x)?, &matrix(z)?, &opts).map_err(to_py)?;
    Ok(PyCertifyReport {
        verdict: rep.verdict.to_string(),
        exit_code: rep.verdict.exit_code(),
        delta: rep.delta_sdp.delta,
        delta_f: rep.delta_f_sdp.as_ref().map(|d| d.delta),
        relative_error: rep.relative_error,
        epsilon: rep.epsilon,
        global_threshold: rep.global_threshold,
        local_threshold: rep.local_threshold,
        text: rep.to_string(),
    })
}

#[pyfunction]
fn tight_delta(n: usize, r: usize) -> f64 {
    constructions::tight_delta(n, r)
}

#[pyfunction]
fn certified_radius(mstar: Vec<Vec<f64>>, r: usize) -> PyResult<PyRadiusCertificate> {
    onebit::certified_radius(&matrix(mstar)?, r).map(Into::into).map_err(to_py)
}

#[pyfunction]
fn local_constants(mstar: Vec<Vec<f64>>, radius: f64, r: usize) -> PyResult<PyRadiusCertificate> {
    onebit::local_constants(&matrix(mstar)?, radius, r).map(Into::into).map_err(to_py)
}

/// Fraction of positive draws per entry, `count` Bernoulli draws each.
#[pyfunction]
fn simulate_observations(mstar: Vec<Vec<f64>>, count: u64, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    let mut rng = rng_from_seed(seed);
    onebit::simulate_observations(&matrix(mstar)?, count, &mut rng).map(|m| rows(&m)).map_err(to_py)
}

/// One Gaussian sample pair; returns (δ or None, status).
#[pyfunction]
fn sample_delta(seed: u64, n: usize, r: usize, kappa: f64) -> (Option<f64>, String) {
    let rec = harness::sample_row(0, seed, n, r, kappa, &SolverOptions::default());
    (rec.delta, rec.status)
}

#[pymodule]
fn pyrankcert(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySdpResult>()?;
    m.add_class::<PyCertifyReport>()?;
    m.add_class::<PyRadiusCertificate>()?;
    m.add_function(wrap_pyfunction!(delta_sdp, m)?)?;
    m.add_function(wrap_pyfunction!(delta_f_sdp, m)?)?;
    m.add_function(wrap_pyfunction!(eta0, m)?)?;
    m.add_function(wrap_pyfunction!(global_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(local_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(tight_delta, m)?)?;
    m.add_function(wrap_pyfunction!(certified_radius, m)?)?;
    m.add_function(wrap_pyfunction!(local_constants, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_observations, m)?)?;
    m.add_function(wrap_pyfunction!(sample_delta, m)?)?;
    m.add("EPSILON_MAX", cert::EPSILON_MAX)?;
    Ok(())
}
