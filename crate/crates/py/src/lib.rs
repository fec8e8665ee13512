//! Python bindings for the horomap toolkit: series classification, the
//! matrix algebra, coefficient vectors and models, distribution values,
//! the cohomological-equation solver, and the rate bookkeeping.

use num_complex::Complex64 as C64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use horomap::config::Config;
use horomap::dist::{eval_boundary_jet, eval_deltahat};
use horomap::error::HoromapError;
use horomap::models::{
    diagonal_apply, ladder_apply, u_field_apply, Chart, DiagonalOperator, LadderDirection, Model,
    SpectralFunction,
};
use horomap::sl2::{classify as classify_mu, SeriesClass, SeriesKind};
use horomap::solver::{
    lu_delta_matrix as lu_delta, solve_with_options, SolveMethod, SolveOptions, SolveOutcome,
};

fn py_err(e: HoromapError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_chart(name: &str, kind: SeriesKind) -> PyResult<Chart> {
    match name {
        "line" => Ok(Chart::Line),
        "circle" => Ok(Chart::Circle),
        "halfplane" => Ok(Chart::HalfPlane),
        "disk" => Ok(Chart::Disk),
        "auto" => Ok(Chart::default_for(kind)),
        other => Err(PyValueError::new_err(format!(
            "unknown chart '{other}' (expected line, circle, halfplane, disk, or auto)"
        ))),
    }
}

fn chart_name(chart: Chart) -> &'static str {
    match chart {
        Chart::Line => "line",
        Chart::Circle => "circle",
        Chart::HalfPlane => "halfplane",
        Chart::Disk => "disk",
    }
}

/// Series classification record for one Casimir parameter.
#[pyclass(name = "SeriesClass", frozen)]
#[derive(Clone)]
struct PySeriesClass {
    inner: SeriesClass,
}

#[pymethods]
impl PySeriesClass {
    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.inner.kind {
            SeriesKind::Principal => "principal",
            SeriesKind::Complementary => "complementary",
            SeriesKind::Discrete => "discrete",
        }
    }

    #[getter]
    fn nu(&self) -> C64 {
        self.inner.nu
    }

    #[getter]
    fn lowest_weight(&self) -> Option<i64> {
        self.inner.lowest_weight
    }

    fn __repr__(&self) -> String {
        format!(
            "SeriesClass(kind='{}', mu={}, nu={}, lowest_weight={:?})",
            self.kind(),
            self.inner.mu,
            self.inner.nu,
            self.inner.lowest_weight
        )
    }
}

/// Classify a Casimir parameter into principal, complementary, or discrete.
#[pyfunction]
fn classify(mu: f64) -> PyResult<PySeriesClass> {
    Ok(PySeriesClass { inner: classify_mu(mu).map_err(py_err)? })
}

/// The 2x2 horocycle subgroup matrix [[1, t], [0, 1]].
#[pyfunction]
fn horocycle_matrix(t: f64) -> [[f64; 2]; 2] {
    horomap::sl2::horocycle_matrix(t)
}

/// Matrix commutator AB - BA of two 2x2 real matrices.
#[pyfunction]
fn commutator(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    horomap::sl2::commutator(&a, &b)
}

/// A finite coefficient vector over the orthogonal basis {u_k}.
#[pyclass(name = "SpectralFunction")]
#[derive(Clone)]
struct PySpectralFunction {
    inner: SpectralFunction,
}

#[pymethods]
impl PySpectralFunction {
    #[new]
    #[pyo3(signature = (mu, k_min, coeffs, chart = "auto"))]
    fn new(mu: f64, k_min: i64, coeffs: Vec<C64>, chart: &str) -> PyResult<Self> {
        let series = classify_mu(mu).map_err(py_err)?;
        let chart = parse_chart(chart, series.kind)?;
        Ok(PySpectralFunction {
            inner: SpectralFunction::new(mu, chart, k_min, coeffs).map_err(py_err)?,
        })
    }

    /// Unit coefficient vector at index k.
    #[staticmethod]
    #[pyo3(signature = (mu, k, chart = "auto"))]
    fn basis_vector(mu: f64, k: i64, chart: &str) -> PyResult<Self> {
        let series = classify_mu(mu).map_err(py_err)?;
        let chart = parse_chart(chart, series.kind)?;
        Ok(PySpectralFunction {
            inner: SpectralFunction::basis_vector(mu, chart, k).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PySpectralFunction { inner: SpectralFunction::from_json(text).map_err(py_err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(py_err)
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }

    #[getter]
    fn chart(&self) -> &'static str {
        chart_name(self.inner.chart)
    }

    #[getter]
    fn k_min(&self) -> i64 {
        self.inner.k_min
    }

    #[getter]
    fn k_max(&self) -> i64 {
        self.inner.k_max()
    }

    #[getter]
    fn coeffs(&self) -> Vec<C64> {
        self.inner.coeffs.clone()
    }

    /// Coefficient at index k (zero outside the window).
    fn get(&self, k: i64) -> C64 {
        self.inner.get(k)
    }

    /// Raising or lowering ladder action ('raise' / 'lower').
    fn ladder(&self, direction: &str) -> PyResult<Self> {
        let series = classify_mu(self.inner.mu).map_err(py_err)?;
        let dir = match direction {
            "raise" => LadderDirection::Raise,
            "lower" => LadderDirection::Lower,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown ladder direction '{other}' (expected 'raise' or 'lower')"
                )))
            }
        };
        Ok(PySpectralFunction { inner: ladder_apply(&series, &self.inner, dir) })
    }

    /// Diagonal operator action ('theta' / 'laplacian' / 'casimir')^power.
    #[pyo3(signature = (operator, power = 1))]
    fn diagonal(&self, operator: &str, power: u32) -> PyResult<Self> {
        let series = classify_mu(self.inner.mu).map_err(py_err)?;
        let op = match operator {
            "theta" => DiagonalOperator::Theta,
            "laplacian" => DiagonalOperator::Laplacian,
            "casimir" => DiagonalOperator::Casimir,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown diagonal operator '{other}' (expected 'theta', 'laplacian', or 'casimir')"
                )))
            }
        };
        Ok(PySpectralFunction { inner: diagonal_apply(&series, &self.inner, op, power) })
    }

    /// Tridiagonal coefficient action of the horocycle generator U.
    fn u_field(&self) -> PyResult<Self> {
        let series = classify_mu(self.inner.mu).map_err(py_err)?;
        Ok(PySpectralFunction { inner: u_field_apply(&series, &self.inner).map_err(py_err)? })
    }

    /// Boundary jet value delta^(r)(f).
    fn boundary_jet(&self, r: usize) -> PyResult<C64> {
        let series = classify_mu(self.inner.mu).map_err(py_err)?;
        eval_boundary_jet(&series, &self.inner, r).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "SpectralFunction(mu={}, chart='{}', k_min={}, len={})",
            self.inner.mu,
            chart_name(self.inner.chart),
            self.inner.k_min,
            self.inner.coeffs.len()
        )
    }
}

/// A representation model: series class, coefficient window, quadrature.
#[pyclass(name = "Model")]
struct PyModel {
    inner: Model,
}

#[pymethods]
impl PyModel {
    #[new]
    #[pyo3(signature = (mu, window = None))]
    fn new(mu: f64, window: Option<i64>) -> PyResult<Self> {
        let cfg = Config::default();
        Ok(PyModel {
            inner: Model::new(mu, window.unwrap_or(cfg.model.window), cfg.quad).map_err(py_err)?,
        })
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu()
    }

    #[getter]
    fn window(&self) -> (i64, i64) {
        (self.inner.k_floor(), self.inner.k_ceil())
    }

    /// ||u_k||^2 in this model.
    fn norm_sq(&self, k: i64) -> PyResult<f64> {
        self.inner.norm_sq(k).map_err(py_err)
    }

    /// Sobolev norm ||f||_s.
    fn sobolev_norm(&self, f: &PySpectralFunction, s: f64) -> PyResult<f64> {
        self.inner.sobolev_norm(&f.inner, s).map_err(py_err)
    }

    /// Pointwise value of f at a chart point.
    #[pyo3(signature = (f, point, chart = "auto"))]
    fn eval(&self, f: &PySpectralFunction, point: C64, chart: &str) -> PyResult<C64> {
        let chart = parse_chart(chart, self.inner.class().kind)?;
        self.inner.eval(&f.inner, point, chart).map_err(py_err)
    }

    /// Model inner product <f, g>.
    fn pairing(&self, f: &PySpectralFunction, g: &PySpectralFunction) -> PyResult<C64> {
        self.inner.pairing(&f.inner, &g.inner).map_err(py_err)
    }

    /// Equivariant Fourier functional deltahat_{k/T}(f), optionally at a
    /// fixed height y (discrete series).
    #[pyo3(signature = (f, k, t_period, y = None))]
    fn deltahat(&self, f: &PySpectralFunction, k: i64, t_period: f64, y: Option<f64>) -> PyResult<C64> {
        Ok(eval_deltahat(&self.inner, &f.inner, k, t_period, y).map_err(py_err)?.value)
    }

    fn __repr__(&self) -> String {
        format!("Model(mu={}, window=({}, {}))", self.inner.mu(), self.inner.k_floor(), self.inner.k_ceil())
    }
}

/// Solver outcome: method, residual, Sobolev ratios, obstruction screen,
/// the solution grid, and recovered coefficients when available.
#[pyclass(name = "SolveOutcome", frozen)]
struct PySolveOutcome {
    inner: SolveOutcome,
}

#[pymethods]
impl PySolveOutcome {
    #[getter]
    fn method(&self) -> String {
        self.inner.method.clone()
    }

    #[getter]
    fn residual_sup(&self) -> f64 {
        self.inner.residual_sup
    }

    #[getter]
    fn sobolev_ratios(&self) -> Vec<(usize, Option<f64>)> {
        self.inner.sobolev_ratios.clone()
    }

    #[getter]
    fn obstructions<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let out = PyList::empty(py);
        for o in &self.inner.obstructions {
            let d = PyDict::new(py);
            d.set_item("label", &o.label)?;
            d.set_item("value", o.value)?;
            d.set_item("tol", o.tol)?;
            out.append(d)?;
        }
        Ok(out)
    }

    #[getter]
    fn grid_nodes(&self) -> Vec<C64> {
        self.inner.grid.nodes.clone()
    }

    #[getter]
    fn grid_values(&self) -> Vec<C64> {
        self.inner.grid.values.clone()
    }

    #[getter]
    fn coefficients(&self) -> Option<PySpectralFunction> {
        self.inner.coefficients.clone().map(|inner| PySpectralFunction { inner })
    }

    fn __repr__(&self) -> String {
        format!(
            "SolveOutcome(method='{}', residual_sup={:.3e})",
            self.inner.method, self.inner.residual_sup
        )
    }
}

/// Solve the cohomological equation u(. - T) - u = f.
#[pyfunction]
#[pyo3(signature = (f, t_shift, order = 4, method = "auto", window = None))]
fn solve(
    f: &PySpectralFunction,
    t_shift: f64,
    order: usize,
    method: &str,
    window: Option<i64>,
) -> PyResult<PySolveOutcome> {
    let cfg = Config::default();
    let spread = f.inner.k_max().abs().max(f.inner.k_min.abs());
    let window = window.unwrap_or(cfg.model.window.max(spread));
    let model = Model::new(f.inner.mu, window, cfg.quad).map_err(py_err)?;
    let method: SolveMethod = method.parse().map_err(py_err)?;
    let opts = SolveOptions {
        method,
        tol: cfg.solve.tol,
        grid_extent: cfg.solve.grid_extent,
        grid_step: cfg.solve.grid_step,
        recover: true,
    };
    let outcome = solve_with_options(&model, &f.inner, t_shift, order, &opts).map_err(py_err)?;
    Ok(PySolveOutcome { inner: outcome })
}

/// Jet transport matrix of the infinitesimal translation on <delta^(k)>.
#[pyfunction]
fn lu_delta_matrix(mu: f64, order: usize) -> PyResult<Vec<Vec<C64>>> {
    let series = classify_mu(mu).map_err(py_err)?;
    lu_delta(&series, order).map_err(py_err)
}

/// Twisted-rate exponent alpha(mu0).
#[pyfunction]
fn alpha(mu0: f64) -> PyResult<f64> {
    horomap::harness::alpha(mu0).map_err(py_err)
}

/// Equidistribution exponent table for one Casimir parameter against a
/// spectral gap; rows are dicts {kind, exponent, log_factor,
/// coefficient_bound}.
#[pyfunction]
fn exponent_table<'py>(py: Python<'py>, mu: f64, mu0: f64) -> PyResult<Bound<'py, PyDict>> {
    let table = horomap::harness::exponent_table(mu, mu0).map_err(py_err)?;
    let doc = PyDict::new(py);
    doc.set_item("mu", table.mu)?;
    doc.set_item("mu0", table.mu0)?;
    doc.set_item("alpha", table.alpha)?;
    let rows = PyList::empty(py);
    for r in &table.rows {
        let d = PyDict::new(py);
        d.set_item("kind", &r.kind)?;
        d.set_item("exponent", r.exponent)?;
        d.set_item("log_factor", r.log_factor)?;
        d.set_item("coefficient_bound", &r.coefficient_bound)?;
        rows.append(d)?;
    }
    doc.set_item("rows", rows)?;
    Ok(doc)
}

/// Run one verification suite; returns (suite, name, passed, detail) rows.
#[pyfunction]
#[pyo3(signature = (name, seed = None))]
fn run_suite(name: &str, seed: Option<u64>) -> PyResult<Vec<(String, String, bool, String)>> {
    let cfg = Config::default();
    let checks = horomap::verify::run_suite(name, &cfg, seed.unwrap_or(cfg.verify.seed))
        .map_err(py_err)?;
    Ok(checks.into_iter().map(|c| (c.suite, c.name, c.passed, c.detail)).collect())
}

#[pymodule]
fn horomap_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySeriesClass>()?;
    m.add_class::<PySpectralFunction>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PySolveOutcome>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(horocycle_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(commutator, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(lu_delta_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(alpha, m)?)?;
    m.add_function(wrap_pyfunction!(exponent_table, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
