//! Python bindings.

use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ussort_core::bijections;
use ussort_core::dyck::{self, DyckPath};
use ussort_core::harness::{self, FormulaId, Lattice, Suite};
use ussort_core::noncross::NCInterval;
use ussort_core::perm::{self as core_perm, parse_patterns};
use ussort_core::series::{self, SeriesKind};
use ussort_core::sliding::{self, SlideOp};
use ussort_core::stacksort::{self, FertilityMethod};
use ussort_core::{Error, Limits};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parsed<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

fn limits(limit: Option<usize>) -> Limits {
    match limit {
        Some(_) => Limits::new(limit),
        None => Limits::from_env(),
    }
}

#[derive(FromPyObject)]
enum PermInput {
    Text(String),
    Entries(Vec<u32>),
    Wrapped(Permutation),
}

impl PermInput {
    fn into_core(self) -> PyResult<core_perm::Permutation> {
        match self {
            Self::Text(s) => parsed(&s),
            Self::Entries(e) => core_perm::Permutation::new(e).map_err(err),
            Self::Wrapped(p) => Ok(p.0),
        }
    }
}

/// A permutation in one-line notation.
#[pyclass(frozen, eq, hash, module = "ussort")]
#[derive(Clone, PartialEq, Eq, Hash)]
struct Permutation(core_perm::Permutation);

#[pymethods]
impl Permutation {
    #[new]
    fn new(p: PermInput) -> PyResult<Self> {
        p.into_core().map(Self)
    }

    #[getter]
    fn entries(&self) -> Vec<u32> {
        self.0.entries().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Permutation('{}')", self.0)
    }

    fn descents(&self) -> Vec<usize> {
        self.0.descents()
    }

    fn stack_sort(&self) -> Self {
        Self(stacksort::stack_sort(&self.0))
    }

    fn is_sorted(&self) -> bool {
        stacksort::is_sorted(&self.0)
    }

    fn is_uniquely_sorted(&self) -> bool {
        stacksort::is_uniquely_sorted(&self.0)
    }

    #[pyo3(signature = (method = "census", limit = None))]
    fn fertility(&self, method: &str, limit: Option<usize>) -> PyResult<u64> {
        let m: FertilityMethod = parsed(method)?;
        stacksort::fertility(&self.0, m, &limits(limit)).map_err(err)
    }

    /// Canonical hooks as `(sw, ne)` pairs, or `None` when unsorted.
    fn canonical_hooks(&self) -> Option<Vec<(usize, usize)>> {
        stacksort::canonical_hooks(&self.0)
            .ok()
            .map(|c| c.hooks.iter().map(|h| (h.sw, h.ne)).collect())
    }

    fn slide(&self, op: &str) -> PyResult<Self> {
        let op: SlideOp = parsed(op)?;
        Ok(Self(sliding::slide(&self.0, op)))
    }

    fn avoids(&self, patterns: &str) -> PyResult<bool> {
        Ok(self.0.avoids_all(&parse_patterns(patterns).map_err(err)?))
    }
}

/// A pair of Dyck paths `lower <= upper`.
#[pyclass(frozen, eq, hash, module = "ussort")]
#[derive(Clone, PartialEq, Eq, Hash)]
struct DyckInterval(dyck::DyckInterval);

#[pymethods]
impl DyckInterval {
    #[new]
    #[pyo3(signature = (lower, upper, poset = "stanley"))]
    fn new(lower: &str, upper: &str, poset: &str) -> PyResult<Self> {
        dyck::DyckInterval::new(parsed(lower)?, parsed(upper)?, parsed(poset)?)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn lower(&self) -> String {
        self.0.lower.to_string()
    }

    #[getter]
    fn upper(&self) -> String {
        self.0.upper.to_string()
    }

    #[getter]
    fn poset(&self) -> &'static str {
        self.0.kind.name()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("DyckInterval('{}', '{}', '{}')", self.0.lower, self.0.upper, self.0.kind)
    }
}

#[pyfunction]
fn stack_sort(p: PermInput) -> PyResult<Permutation> {
    Ok(Permutation(stacksort::stack_sort(&p.into_core()?)))
}

#[pyfunction]
#[pyo3(signature = (n, patterns = ""))]
fn avoiders(n: usize, patterns: &str) -> PyResult<Vec<Permutation>> {
    let pats = parse_patterns(patterns).map_err(err)?;
    Ok(core_perm::enumerate_avoiders(n, &pats).map(Permutation).collect())
}

#[pyfunction]
#[pyo3(signature = (k, patterns = "", limit = None))]
fn uniquely_sorted(k: usize, patterns: &str, limit: Option<usize>) -> PyResult<Vec<Permutation>> {
    let pats = parse_patterns(patterns).map_err(err)?;
    Ok(stacksort::enumerate_uniquely_sorted(k, &pats, &limits(limit))
        .map_err(err)?
        .map(Permutation)
        .collect())
}

#[pyfunction]
#[pyo3(signature = (k, patterns = "", limit = None))]
fn count_uniquely_sorted(k: usize, patterns: &str, limit: Option<usize>) -> PyResult<u64> {
    let pats = parse_patterns(patterns).map_err(err)?;
    stacksort::count_uniquely_sorted(k, &pats, &limits(limit)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (poset, k, limit = None))]
fn count_intervals(poset: &str, k: usize, limit: Option<usize>) -> PyResult<u64> {
    let lattice: Lattice = parsed(poset)?;
    harness::count_lattice_intervals(lattice, k, &limits(limit)).map_err(err)
}

#[pyfunction]
fn closed_form(tag: &str, k: u64) -> PyResult<BigUint> {
    let f: FormulaId = parsed(tag)?;
    Ok(harness::closed_form(f, k))
}

#[pyfunction]
fn series_coefficients(which: &str, order: usize) -> PyResult<Vec<BigUint>> {
    let kind: SeriesKind = parsed(which)?;
    Ok(series::series_coefficients(kind, order))
}

/// `(class, k, count)` triples.
#[pyfunction]
#[pyo3(signature = (patterns, max_k, limit = None))]
fn compute_sequence(patterns: &str, max_k: usize, limit: Option<usize>) -> PyResult<Vec<(String, usize, BigUint)>> {
    let pats = parse_patterns(patterns).map_err(err)?;
    Ok(harness::compute_sequence(&pats, max_k, &limits(limit))
        .map_err(err)?
        .into_iter()
        .map(|r| (r.class, r.k, r.count))
        .collect())
}

#[pyfunction]
fn dl_forward(p: PermInput) -> PyResult<DyckInterval> {
    bijections::dl_forward(&p.into_core()?).map(DyckInterval).map_err(err)
}

#[pyfunction]
fn dl_inverse(lower: &str, upper: &str) -> PyResult<Permutation> {
    let (a, b): (DyckPath, DyckPath) = (parsed(lower)?, parsed(upper)?);
    bijections::dl_inverse(&a, &b).map(Permutation).map_err(err)
}

#[pyfunction]
fn tamari_forward(p: PermInput) -> PyResult<DyckInterval> {
    bijections::tamari_forward(&p.into_core()?).map(DyckInterval).map_err(err)
}

#[pyfunction]
fn tamari_inverse(lower: &str, upper: &str) -> PyResult<Permutation> {
    let (a, b): (DyckPath, DyckPath) = (parsed(lower)?, parsed(upper)?);
    bijections::tamari_inverse(&a, &b).map(Permutation).map_err(err)
}

/// The noncrossing interval as `rho|kappa`.
#[pyfunction]
fn upsilon(p: PermInput) -> PyResult<String> {
    bijections::upsilon_tree(&p.into_core()?).map(|iv| iv.to_string()).map_err(err)
}

#[pyfunction]
fn upsilon_direct(p: PermInput) -> PyResult<String> {
    bijections::upsilon_direct(&p.into_core()?).map(|iv| iv.to_string()).map_err(err)
}

#[pyfunction]
fn upsilon_inverse(interval: &str) -> PyResult<Permutation> {
    let iv = NCInterval::parse(interval).map_err(err)?;
    bijections::upsilon_tree_inverse(&iv).map(Permutation).map_err(err)
}

#[pyfunction]
fn parking_forward(p: PermInput) -> PyResult<Vec<u32>> {
    bijections::parking_forward(&p.into_core()?)
        .map(|a| a.values().to_vec())
        .map_err(err)
}

#[pyfunction]
fn parking_inverse(values: Vec<u32>) -> PyResult<Permutation> {
    let a = bijections::ParkingFunction::new(values).map_err(err)?;
    Ok(Permutation(bijections::parking_inverse(&a)))
}

/// Runs a suite; returns whether every check passed and one dict per check.
#[pyfunction]
#[pyo3(signature = (suite = "all", max_k = 5))]
fn verify<'py>(py: Python<'py>, suite: &str, max_k: usize) -> PyResult<(bool, Vec<Bound<'py, PyDict>>)> {
    let suite: Suite = parsed(suite)?;
    let report = py.allow_threads(|| harness::verify(suite, max_k));
    let checks = report
        .checks
        .iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("suite", c.suite)?;
            d.set_item("name", c.name)?;
            d.set_item("anchor", c.anchor)?;
            d.set_item("passed", c.passed)?;
            d.set_item("detail", &c.detail)?;
            d.set_item("millis", c.millis as u64)?;
            Ok(d)
        })
        .collect::<PyResult<_>>()?;
    Ok((report.passed(), checks))
}

#[pymodule]
fn ussort(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Permutation>()?;
    m.add_class::<DyckInterval>()?;
    m.add_function(wrap_pyfunction!(stack_sort, m)?)?;
    m.add_function(wrap_pyfunction!(avoiders, m)?)?;
    m.add_function(wrap_pyfunction!(uniquely_sorted, m)?)?;
    m.add_function(wrap_pyfunction!(count_uniquely_sorted, m)?)?;
    m.add_function(wrap_pyfunction!(count_intervals, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(series_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(compute_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(dl_forward, m)?)?;
    m.add_function(wrap_pyfunction!(dl_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(tamari_forward, m)?)?;
    m.add_function(wrap_pyfunction!(tamari_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(upsilon, m)?)?;
    m.add_function(wrap_pyfunction!(upsilon_direct, m)?)?;
    m.add_function(wrap_pyfunction!(upsilon_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(parking_forward, m)?)?;
    m.add_function(wrap_pyfunction!(parking_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
