//! Python bindings: the main types cross the boundary as classes, scalars as
//! `"p/q"` strings (plain integers are accepted on input), and bulk data via
//! the same JSON wire formats the CLI speaks.

use fi_closure as fic;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyList;
use std::str::FromStr;

fn err(e: fic::Error) -> PyErr {
    match e {
        fic::Error::AlgorithmInvariant(msg) => PyRuntimeError::new_err(msg),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn scalar_from_py(value: &Bound<'_, PyAny>) -> PyResult<fic::Scalar> {
    if let Ok(v) = value.extract::<i64>() {
        return Ok(fic::Scalar::from_int(v));
    }
    let text: String = value.extract()?;
    fic::Scalar::from_str(&text).map_err(err)
}

fn json_out<T: serde::Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

fn json_in<T: serde::de::DeserializeOwned>(text: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn witness_tuple(w: &fic::MinorWitness) -> (usize, Vec<Vec<usize>>, Vec<usize>, String) {
    (w.axis, w.rows.clone(), w.cols.clone(), w.value.to_string())
}

/// An off-diagonal tensor: values at pairwise-distinct index tuples.
#[pyclass(name = "OffDiagTensor", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTensor {
    inner: fic::OffDiagTensor,
}

#[pymethods]
impl PyTensor {
    /// Build from `(tuple, value)` pairs; values are ints or `"p/q"` strings.
    #[new]
    fn new(d: usize, width: usize, entries: &Bound<'_, PyList>) -> PyResult<Self> {
        let mut pairs = Vec::with_capacity(entries.len());
        for item in entries.iter() {
            let (tuple, value): (Vec<usize>, Bound<'_, PyAny>) = item.extract()?;
            pairs.push((tuple, scalar_from_py(&value)?));
        }
        Ok(PyTensor { inner: fic::OffDiagTensor::from_entries(d, width, pairs).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyTensor { inner: json_in(text)? })
    }

    fn to_json(&self) -> PyResult<String> {
        json_out(&self.inner)
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    fn entries(&self) -> Vec<(Vec<usize>, String)> {
        self.inner.entries().map(|(t, v)| (t.clone(), v.to_string())).collect()
    }

    fn value(&self, tuple: Vec<usize>) -> PyResult<String> {
        Ok(self.inner.value(&tuple).map_err(err)?.to_string())
    }

    /// True when every off-diagonal `(l+1) x (l+1)` flattening minor vanishes.
    fn is_member(&self, l: usize) -> bool {
        fic::is_member(&self.inner, l)
    }

    /// The first violated minor in scan order, or None.
    fn membership_witness(
        &self,
        l: usize,
    ) -> Option<(usize, Vec<Vec<usize>>, Vec<usize>, String)> {
        fic::membership_witness(&self.inner, l).map(|w| witness_tuple(&w))
    }

    /// A nonzero `l x l` minor if one exists (evidence of strict rank).
    fn strict_witness(
        &self,
        l: usize,
    ) -> PyResult<Option<(usize, Vec<Vec<usize>>, Vec<usize>, String)>> {
        Ok(fic::strict_witness(&self.inner, l).map_err(err)?.map(|w| witness_tuple(&w)))
    }

    /// Pull entries back along an injection given by its image list.
    fn restrict(&self, images: Vec<usize>, codomain: usize) -> PyResult<Self> {
        let rho = fic::Injection::new(images, codomain).map_err(err)?;
        Ok(PyTensor { inner: self.inner.restrict(&rho).map_err(err)? })
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "OffDiagTensor(d={}, width={}, nonzero={})",
            self.inner.order(),
            self.inner.width(),
            self.inner.num_nonzero()
        )
    }
}

/// A sum of scaled rank-one terms.
#[pyclass(name = "RankDecomposition", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDecomposition {
    inner: fic::RankDecomposition,
}

#[pymethods]
impl PyDecomposition {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyDecomposition { inner: json_in(text)? })
    }

    fn to_json(&self) -> PyResult<String> {
        json_out(&self.inner)
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn term_count(&self) -> usize {
        self.inner.term_count()
    }

    /// Forget the diagonal: the off-diagonal tensor this decomposition fills in.
    fn project(&self) -> PyTensor {
        PyTensor { inner: self.inner.project() }
    }

    /// The full tensor as nested lists of `"p/q"` strings, last axis innermost.
    fn dense(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let dense = self.inner.densify().map_err(err)?;
        fn nest(
            py: Python<'_>,
            dense: &fic::DenseTensor,
            prefix: &mut Vec<usize>,
        ) -> PyResult<Py<PyAny>> {
            if prefix.len() == dense.order() {
                return Ok(dense.get(prefix).to_string().into_pyobject(py)?.unbind().into());
            }
            let out = PyList::empty(py);
            for c in 1..=dense.width() {
                prefix.push(c);
                out.append(nest(py, dense, prefix)?)?;
                prefix.pop();
            }
            Ok(out.unbind().into())
        }
        nest(py, &dense, &mut Vec::new())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "RankDecomposition(d={}, width={}, terms={})",
            self.inner.order(),
            self.inner.width(),
            self.inner.term_count()
        )
    }
}

/// A k-row matrix point with exact rational entries.
#[pyclass(name = "MatrixPoint", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPoint {
    inner: fic::MatrixPoint,
}

#[pymethods]
impl PyPoint {
    #[new]
    fn new(rows: &Bound<'_, PyList>) -> PyResult<Self> {
        let mut out: Vec<Vec<fic::Scalar>> = Vec::with_capacity(rows.len());
        for row in rows.iter() {
            let row: Vec<Bound<'_, PyAny>> = row.extract()?;
            out.push(row.iter().map(scalar_from_py).collect::<PyResult<_>>()?);
        }
        let k = out.len();
        let width = out.first().map_or(0, Vec::len);
        Ok(PyPoint { inner: fic::MatrixPoint::new(k, width, out).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyPoint { inner: json_in(text)? })
    }

    fn to_json(&self) -> PyResult<String> {
        json_out(&self.inner)
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    fn __repr__(&self) -> String {
        format!("MatrixPoint(k={}, width={})", self.inner.k(), self.inner.width())
    }
}

/// A family of polynomial maps from k x w matrices into off-diagonal tensors.
#[pyclass(name = "EquivariantMap", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMap {
    inner: fic::EquivariantMap,
}

#[pymethods]
impl PyMap {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyMap { inner: json_in(text)? })
    }

    fn to_json(&self) -> PyResult<String> {
        json_out(&self.inner)
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn rank_bound(&self) -> usize {
        self.inner.rank_bound()
    }

    /// Component count per order, index = order.
    #[getter]
    fn profile(&self) -> Vec<usize> {
        self.inner.profile()
    }

    /// One off-diagonal tensor per component.
    fn pushforward(&self, point: &PyPoint) -> PyResult<Vec<PyTensor>> {
        Ok(self
            .inner
            .pushforward(&point.inner)
            .map_err(err)?
            .into_iter()
            .map(|inner| PyTensor { inner })
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "EquivariantMap(k={}, components={}, rank_bound={})",
            self.inner.k(),
            self.inner.components().len(),
            self.inner.rank_bound()
        )
    }
}

/// One canonical defining equation of the bounded-rank locus.
#[pyclass(name = "CanonicalEquation", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyEquation {
    inner: fic::CanonicalEquation,
}

#[pymethods]
impl PyEquation {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyEquation { inner: json_in(text)? })
    }

    fn to_json(&self) -> PyResult<String> {
        json_out(&self.inner)
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn l(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.base_width()
    }

    #[getter]
    fn axis(&self) -> usize {
        self.inner.axis()
    }

    #[getter]
    fn rows(&self) -> Vec<Vec<usize>> {
        self.inner.rows().to_vec()
    }

    #[getter]
    fn cols(&self) -> Vec<usize> {
        self.inner.cols().to_vec()
    }

    fn poly_str(&self) -> String {
        self.inner.poly().to_string()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "CanonicalEquation(d={}, l={}, n={}, axis={})",
            self.inner.order(),
            self.inner.rank(),
            self.inner.base_width(),
            self.inner.axis()
        )
    }
}

/// A completion: the decomposition, its certified cap, and the recursion
/// trace as JSON.
#[pyclass(name = "CompletionResult", frozen)]
struct PyCompletion {
    #[pyo3(get)]
    decomposition: PyDecomposition,
    #[pyo3(get)]
    certified_cap: u128,
    trace_json: String,
}

#[pymethods]
impl PyCompletion {
    fn trace_json(&self) -> String {
        self.trace_json.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "CompletionResult(terms={}, certified_cap={})",
            self.decomposition.inner.term_count(),
            self.certified_cap
        )
    }
}

/// Canonical generating equations for order `d` at rank `l`.
#[pyfunction]
fn canonical_generators(d: usize, l: usize) -> Vec<PyEquation> {
    fic::canonical_generators(d, l).into_iter().map(|inner| PyEquation { inner }).collect()
}

/// Input-independent bound on the completion's term count.
#[pyfunction]
fn rank_cap(d: usize, l: usize) -> u128 {
    fic::rank_cap(d, l)
}

/// Generator multiplicities after shifting by an `m`-element set.
#[pyfunction]
fn shift_profile(d: usize, m: usize) -> Vec<u128> {
    fic::shift_profile(d, m).counts
}

/// The factor-model map with `k` latent rows (k+1 matrix rows).
#[pyfunction]
fn factor_model_preset(k: usize) -> PyResult<PyMap> {
    Ok(PyMap { inner: fic::factor_model_preset(k).map_err(err)? })
}

/// Complete an off-diagonal tensor to a full tensor of certified bounded rank.
#[pyfunction]
fn complete(tensor: &PyTensor, l: usize) -> PyResult<PyCompletion> {
    let result = fic::complete(&tensor.inner, l).map_err(err)?;
    Ok(PyCompletion {
        decomposition: PyDecomposition { inner: result.decomposition },
        certified_cap: result.certified_cap,
        trace_json: json_out(&result.trace)?,
    })
}

/// Seeded end-to-end verification; returns the report as a JSON string.
#[pyfunction]
#[pyo3(signature = (map, width, trials, seed, negative_control = false))]
fn run_verify(
    map: &PyMap,
    width: usize,
    trials: usize,
    seed: u64,
    negative_control: bool,
) -> PyResult<String> {
    let options = fic::VerifyOptions { negative_control, ..Default::default() };
    let report = fic::run_verify_with(&map.inner, width, trials, seed, &options).map_err(err)?;
    json_out(&report)
}

#[pymodule]
fn fi_closure_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTensor>()?;
    m.add_class::<PyDecomposition>()?;
    m.add_class::<PyPoint>()?;
    m.add_class::<PyMap>()?;
    m.add_class::<PyEquation>()?;
    m.add_class::<PyCompletion>()?;
    m.add_function(wrap_pyfunction!(canonical_generators, m)?)?;
    m.add_function(wrap_pyfunction!(rank_cap, m)?)?;
    m.add_function(wrap_pyfunction!(shift_profile, m)?)?;
    m.add_function(wrap_pyfunction!(factor_model_preset, m)?)?;
    m.add_function(wrap_pyfunction!(complete, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    Ok(())
}
