//! Python bindings for `sltp_core`.
//!
//! Exact values cross the boundary as `"p/q"` strings; any argument whose
//! `str()` parses as a rational (`int`, `Fraction`, `"0.1"`) is accepted.
//! Structured results are the same JSON documents the `sltp` CLI emits,
//! decoded into Python dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use sltp_core::construction::{build_symmetric_witnesses, slice_subset};
use sltp_core::error::Error;
use sltp_core::families::FamilySpec;
use sltp_core::freespace::{molecule_norm as free_norm, Molecule, WeakStarSlice};
use sltp_core::io::{parse_space, space_to_json};
use sltp_core::metric::{build_from_matrix, validate_metric, PointId, PointedMetricSpace};
use sltp_core::rational::Rational;
use sltp_core::report::{CheckDoc, ConstructionDoc, InequalityDoc, MoleculeNormEntry, ScanDoc, ValidationDoc};
use sltp_core::trapezoid::{
    check_ineq_ltp, check_ineq_sym, counterexample_scan, find_witness as search, required_epsilon as required, Mode,
    WitnessQuery,
};

fn py_err(e: Error) -> PyErr {
    if e.is_internal() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn rational(value: &Bound<'_, PyAny>) -> PyResult<Rational> {
    let text = value.str()?.to_string();
    text.parse()
        .map_err(|e: sltp_core::rational::ParseRationalError| PyValueError::new_err(e.to_string()))
}

fn to_python<'py, T: Serialize>(py: Python<'py>, doc: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(doc).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A finite pointed metric space with exact rational distances.
#[pyclass(module = "sltp", frozen)]
pub struct MetricSpace {
    inner: PointedMetricSpace,
}

impl MetricSpace {
    fn ids(&self, names: &[String]) -> PyResult<Vec<PointId>> {
        self.inner.ids(names).map_err(py_err)
    }

    fn id(&self, name: &str) -> PyResult<PointId> {
        self.inner.id(name).map_err(py_err)
    }
}

#[pymethods]
impl MetricSpace {
    /// Builds a space from point names, a base name and a square matrix.
    #[new]
    fn new(names: Vec<String>, base: &str, matrix: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Self> {
        let dist = matrix
            .iter()
            .map(|row| row.iter().map(rational).collect::<PyResult<Vec<_>>>())
            .collect::<PyResult<Vec<_>>>()?;
        Ok(MetricSpace {
            inner: build_from_matrix(&names, base, dist).map_err(py_err)?,
        })
    }

    /// Parses a space document (the CLI's JSON input format).
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(MetricSpace {
            inner: parse_space(text).map_err(py_err)?,
        })
    }

    /// A generated family: `ex1`, `ex2`, `l1-basis`, `random-graph` or `l1-cloud`.
    #[staticmethod]
    #[pyo3(signature = (family, k=1, m=4, n=6, seed=0))]
    fn example(family: &str, k: usize, m: usize, n: usize, seed: u64) -> PyResult<Self> {
        let spec = match family {
            "ex1" => FamilySpec::Ex1 { k },
            "ex2" => FamilySpec::Ex2 { k },
            "l1-basis" => FamilySpec::L1Basis { m },
            "random-graph" => FamilySpec::RandomGraphMetric { n, seed },
            "l1-cloud" => FamilySpec::L1Cloud { m, seed },
            other => return Err(PyValueError::new_err(format!("unknown family {other:?}"))),
        };
        Ok(MetricSpace {
            inner: spec.generate().map_err(py_err)?,
        })
    }

    fn to_json(&self) -> String {
        space_to_json(&self.inner)
    }

    #[getter]
    fn names(&self) -> Vec<String> {
        self.inner.names().to_vec()
    }

    #[getter]
    fn base(&self) -> String {
        self.inner.name(self.inner.base()).to_string()
    }

    fn distance(&self, x: &str, y: &str) -> PyResult<String> {
        Ok(self.inner.d(self.id(x)?, self.id(y)?).to_string())
    }

    /// Metric-axiom report: `{"ok": bool, "violations": [...]}`.
    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_python(py, &ValidationDoc::new(&self.inner, &validate_metric(&self.inner)))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("MetricSpace({} points, base {:?})", self.inner.len(), self.base())
    }
}

fn mode(text: &str) -> PyResult<Mode> {
    text.parse().map_err(py_err)
}

/// Checks one pair; `mode` is `"ltp"` or `"sltp"`.
#[pyfunction]
#[pyo3(signature = (space, subset, eps, u, v, mode="sltp"))]
fn check<'py>(
    py: Python<'py>,
    space: &MetricSpace,
    subset: Vec<String>,
    eps: &Bound<'py, PyAny>,
    u: &str,
    v: &str,
    mode: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let (n, eps, mode) = (space.ids(&subset)?, rational(eps)?, self::mode(mode)?);
    let (u, v) = (space.id(u)?, space.id(v)?);
    let s = &space.inner;
    let mut checks = vec![check_ineq_ltp(s, &n, &eps, u, v).map_err(py_err)?];
    if mode == Mode::Sltp {
        checks.push(check_ineq_sym(s, &n, &eps, u, v).map_err(py_err)?);
    }
    let req = required(s, &n, u, v).map_err(py_err)?;
    let doc = CheckDoc {
        mode,
        epsilon: eps,
        subset,
        u: s.name(u).to_string(),
        v: s.name(v).to_string(),
        holds: checks.iter().all(|c| c.holds),
        checks: checks.iter().map(|c| InequalityDoc::new(s, c)).collect(),
        required_epsilon: (&req).into(),
    };
    to_python(py, &doc)
}

/// Least ε for which `(u, v)` satisfies each inequality on `subset`, as strings.
#[pyfunction]
fn required_epsilon(space: &MetricSpace, subset: Vec<String>, u: &str, v: &str) -> PyResult<(String, String)> {
    let req = required(&space.inner, &space.ids(&subset)?, space.id(u)?, space.id(v)?).map_err(py_err)?;
    Ok((req.ltp.to_string(), req.sym.to_string()))
}

/// Every pair checked; the verdict names a witness or the least required ε.
#[pyfunction]
#[pyo3(signature = (space, subset, eps, mode="sltp"))]
fn scan<'py>(
    py: Python<'py>,
    space: &MetricSpace,
    subset: Vec<String>,
    eps: &Bound<'py, PyAny>,
    mode: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let report =
        counterexample_scan(&space.inner, &space.ids(&subset)?, &rational(eps)?, self::mode(mode)?).map_err(py_err)?;
    to_python(py, &ScanDoc::new(&space.inner, &report))
}

/// The first witness pair in point order, or `None`.
#[pyfunction]
#[pyo3(signature = (space, subset, eps, mode="sltp"))]
fn find_witness(
    space: &MetricSpace,
    subset: Vec<String>,
    eps: &Bound<'_, PyAny>,
    mode: &str,
) -> PyResult<Option<(String, String)>> {
    let query = WitnessQuery::new(space.ids(&subset)?, rational(eps)?);
    let found = search(&space.inner, &query, self::mode(mode)?).map_err(py_err)?;
    Ok(found.map(|w| (space.inner.name(w.u).to_string(), space.inner.name(w.v).to_string())))
}

/// `[(point, coeff), ...]` as passed from Python.
type Terms<'py> = Vec<(String, Bound<'py, PyAny>)>;

fn molecule(space: &MetricSpace, terms: Terms<'_>) -> PyResult<Molecule> {
    let terms = terms
        .iter()
        .map(|(p, c)| Ok((space.id(p)?, rational(c)?)))
        .collect::<PyResult<Vec<_>>>()?;
    Molecule::new(terms).map_err(py_err)
}

/// Free-space norm of `Σ cᵢ δ(pᵢ)` given as `[(point, coeff), ...]`, with an
/// attaining 1-Lipschitz function and a transport plan.
#[pyfunction]
fn molecule_norm<'py>(py: Python<'py>, space: &MetricSpace, terms: Terms<'py>) -> PyResult<Bound<'py, PyAny>> {
    let mu = molecule(space, terms)?;
    let norm = free_norm(&space.inner, &mu).map_err(py_err)?;
    to_python(py, &MoleculeNormEntry::new(&space.inner, &mu, &norm))
}

/// Builds slice points and a common perturbation for slices given as
/// `[(terms, alpha), ...]`.
#[pyfunction]
fn construct<'py>(
    py: Python<'py>,
    space: &MetricSpace,
    slices: Vec<(Terms<'py>, Bound<'py, PyAny>)>,
    eps: &Bound<'py, PyAny>,
) -> PyResult<Bound<'py, PyAny>> {
    let eps = rational(eps)?;
    let slices = slices
        .into_iter()
        .map(|(terms, alpha)| {
            WeakStarSlice::new(&space.inner, molecule(space, terms)?, rational(&alpha)?).map_err(py_err)
        })
        .collect::<PyResult<Vec<_>>>()?;
    let outcome = build_symmetric_witnesses(&space.inner, &slices, &eps).map_err(py_err)?;
    let subset = slice_subset(&space.inner, &slices);
    to_python(py, &ConstructionDoc::new(&space.inner, &eps, &subset, &outcome))
}

#[pymodule]
fn sltp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<MetricSpace>()?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(required_epsilon, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(find_witness, m)?)?;
    m.add_function(wrap_pyfunction!(molecule_norm, m)?)?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    Ok(())
}
