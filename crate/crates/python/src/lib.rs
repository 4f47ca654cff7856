//! Python bindings. Structured results cross the boundary as Python objects
//! decoded from the canonical JSON documents.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde_json::Value;

use scclab::axioms::{applicable_axioms, check_many, AxiomId, CheckOptions};
use scclab::identify::{identify as identify_model, identify_auto};
use scclab::io;
use scclab::models::{generate_scc, ModelSpec, ModelTag};
use scclab::{Error, ToleranceConfig, Universe};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

fn options(tol: Option<f64>, witness_cap: usize) -> PyResult<CheckOptions> {
    let mut t = ToleranceConfig::default();
    if let Some(eps) = tol {
        t = t.with_eps_eq(eps);
    }
    t.validate().map_err(err)?;
    Ok(CheckOptions { tol: t, witness_cap, attributes: None })
}

/// A complete stochastic choice correspondence.
#[pyclass(name = "Scc", frozen)]
struct PyScc {
    inner: scclab::Scc,
}

#[pymethods]
impl PyScc {
    /// Parses a dataset document.
    #[staticmethod]
    #[pyo3(signature = (text, tol=None))]
    fn from_json(text: &str, tol: Option<f64>) -> PyResult<Self> {
        let opts = options(tol, 1)?;
        let inner = io::parse_scc_with(text, &opts.tol).map_err(err)?;
        Ok(PyScc { inner })
    }

    /// Float dataset of observed frequencies from a `menu;set;count` table.
    #[staticmethod]
    fn from_counts(text: &str) -> PyResult<Self> {
        Ok(PyScc { inner: io::estimate_from_counts(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        io::serialize_scc(&self.inner)
    }

    #[getter]
    fn items(&self) -> Vec<String> {
        self.inner.universe().labels().to_vec()
    }

    #[getter]
    fn allows_empty(&self) -> bool {
        self.inner.allows_empty()
    }

    #[getter]
    fn exact(&self) -> bool {
        self.inner.mode() == scclab::Mode::Exact
    }

    /// μ(T,S) as a string; `set` and `menu` are label lists.
    fn prob(&self, set: Vec<String>, menu: Vec<String>) -> PyResult<String> {
        let u = self.inner.universe();
        let t = u.mask_of(&set).map_err(err)?;
        let s = u.mask_of(&menu).map_err(err)?;
        Ok(self.inner.lookup(t, s).map_err(err)?.to_string())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Scc(items={:?}, allows_empty={}, exact={})",
            self.items(),
            self.allows_empty(),
            self.exact()
        )
    }
}

/// A model with its parameters over a labelled universe.
#[pyclass(name = "Model", frozen)]
struct PyModel {
    spec: ModelSpec,
    universe: Universe,
}

#[pymethods]
impl PyModel {
    /// Parses a parameter document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let (spec, universe) = io::parse_params(text).map_err(err)?;
        spec.validate(universe.len()).map_err(err)?;
        Ok(PyModel { spec, universe })
    }

    fn to_json(&self) -> String {
        io::serialize_params(&self.spec, &self.universe)
    }

    #[getter]
    fn model(&self) -> &'static str {
        self.spec.tag().name()
    }

    #[getter]
    fn empty_variant(&self) -> bool {
        self.spec.empty_variant
    }

    fn prob(&self, set: Vec<String>, menu: Vec<String>) -> PyResult<String> {
        let t = self.universe.mask_of(&set).map_err(err)?;
        let s = self.universe.mask_of(&menu).map_err(err)?;
        Ok(self.spec.eval(t, s).map_err(err)?.to_string())
    }

    fn generate(&self) -> PyResult<PyScc> {
        Ok(PyScc { inner: generate_scc(&self.spec, &self.universe).map_err(err)? })
    }
}

/// Axiom reports as dicts; `axioms` defaults to the applicable battery.
#[pyfunction]
#[pyo3(signature = (scc, axioms=None, tol=None, witness_cap=10))]
fn check<'py>(
    py: Python<'py>,
    scc: &PyScc,
    axioms: Option<Vec<String>>,
    tol: Option<f64>,
    witness_cap: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = options(tol, witness_cap)?;
    let list: Vec<AxiomId> = match axioms {
        Some(names) => names.iter().map(|a| a.parse()).collect::<Result<_, _>>().map_err(err)?,
        None => applicable_axioms(&scc.inner, &opts),
    };
    let reports = py.detach(|| check_many(&scc.inner, &list, &opts)).map_err(err)?;
    let u = scc.inner.universe();
    let values = reports.iter().map(|r| io::report_to_value(r, u)).collect();
    to_py(py, &Value::Array(values))
}

/// Recovered parameters, or ValueError when the preconditions fail.
#[pyfunction]
#[pyo3(signature = (scc, model="auto", tol=None))]
fn identify<'py>(py: Python<'py>, scc: &PyScc, model: &str, tol: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
    let opts = options(tol, 10)?;
    let result = if model.eq_ignore_ascii_case("auto") {
        py.detach(|| identify_auto(&scc.inner, &opts))
    } else {
        let tag: ModelTag = model.parse().map_err(err)?;
        py.detach(|| identify_model(&scc.inner, tag, &opts))
    };
    let r = result.map_err(err)?;
    to_py(py, &io::recovery_to_value(&r, scc.inner.universe()))
}

#[pyfunction]
#[pyo3(signature = (scc, tol=None))]
fn classify<'py>(py: Python<'py>, scc: &PyScc, tol: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
    let opts = options(tol, 10)?;
    let report = py.detach(|| scclab::classify::classify(&scc.inner, &opts)).map_err(err)?;
    to_py(py, &io::classification_to_value(&report))
}

/// Sample, generate, check, identify and compare for one model.
#[pyfunction]
#[pyo3(signature = (model, trials, n_values, seed, empty_variant=false))]
fn fuzz<'py>(
    py: Python<'py>,
    model: &str,
    trials: usize,
    n_values: Vec<usize>,
    seed: u64,
    empty_variant: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let tag: ModelTag = model.parse().map_err(err)?;
    let summary = py
        .detach(|| scclab::fuzz::fuzz_characterization(tag, empty_variant, trials, &n_values, seed))
        .map_err(err)?;
    let v = serde_json::to_value(&summary).map_err(|e| err(e.into()))?;
    to_py(py, &v)
}

#[pymodule]
fn scclab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScc>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(identify, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(fuzz, m)?)?;
    Ok(())
}
