use nalgebra::DMatrix;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qec_core::cone;
use qec_core::constructions::{self, ConstructionResult};
use qec_core::entropy::{self, EntropyVector};
use qec_core::io::{self, State};
use qec_core::lemma_lab;
use qec_core::linalg::C64;
use qec_core::qstate::{self, PartyDims, SubsystemMask, DEFAULT_DIM_CAP};
use qec_core::tip_probe::{self, ProbeConfig};
use qec_core::QecError;

fn py_err(e: QecError) -> PyErr {
    match e {
        QecError::EigenFailure | QecError::EigenvalueOutOfRange { .. } | QecError::Degenerate(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn dims(d: Vec<usize>, cap: usize) -> PyResult<PartyDims> {
    PartyDims::with_cap(d, cap).map_err(py_err)
}

fn mask(parties: &[usize], n: usize) -> PyResult<SubsystemMask> {
    if let Some(&p) = parties.iter().find(|&&p| p >= n) {
        return Err(py_err(QecError::PartyOutOfRange { party: p, n }));
    }
    Ok(SubsystemMask::from_parties(parties))
}

/// Pure state on a tensor product of parties; party indices are 0-based.
#[pyclass(name = "PureState", module = "qec", skip_from_py_object)]
#[derive(Clone)]
struct PyPureState {
    inner: qstate::PureState,
}

#[pymethods]
impl PyPureState {
    #[new]
    #[pyo3(signature = (dims, amplitudes, cap = DEFAULT_DIM_CAP))]
    fn new(dims: Vec<usize>, amplitudes: Vec<C64>, cap: usize) -> PyResult<Self> {
        let d = self::dims(dims, cap)?;
        Ok(Self { inner: qstate::PureState::from_amplitudes(d, amplitudes).map_err(py_err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        match io::parse_state_default(text).map_err(py_err)? {
            State::Pure(p) => Ok(Self { inner: p }),
            State::Mixed(_) => Err(PyValueError::new_err("JSON holds a density matrix")),
        }
    }

    fn to_json(&self) -> String {
        io::pure_to_json(&self.inner)
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims().as_slice().to_vec()
    }

    #[getter]
    fn party_count(&self) -> usize {
        self.inner.party_count()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<C64> {
        self.inner.amplitudes().to_vec()
    }

    fn entropy_vector(&self) -> PyResult<Vec<f64>> {
        Ok(entropy::entropy_vector(&self.inner).map_err(py_err)?.values().to_vec())
    }

    fn subsystem_entropy(&self, parties: Vec<usize>) -> PyResult<f64> {
        let m = mask(&parties, self.inner.party_count())?;
        self.inner.subsystem_entropy(m).map_err(py_err)
    }

    fn mutual_information(&self, i: usize, j: usize) -> PyResult<f64> {
        entropy::mutual_information(&self.inner, i, j).map_err(py_err)
    }

    fn marginal(&self, keep: Vec<usize>) -> PyResult<PyDensityMatrix> {
        let m = mask(&keep, self.inner.party_count())?;
        Ok(PyDensityMatrix { inner: self.inner.marginal(m).map_err(py_err)? })
    }

    fn tensor(&self, other: &PyPureState) -> PyResult<Self> {
        Ok(Self { inner: self.inner.tensor(&other.inner).map_err(py_err)? })
    }

    fn regroup(&self, groups: Vec<Vec<usize>>) -> PyResult<Self> {
        Ok(Self { inner: self.inner.regroup(&groups).map_err(py_err)? })
    }

    fn __repr__(&self) -> String {
        format!("PureState(dims={:?})", self.inner.dims().as_slice())
    }
}

/// Density matrix with validated Hermiticity and unit trace.
#[pyclass(name = "DensityMatrix", module = "qec", skip_from_py_object)]
#[derive(Clone)]
struct PyDensityMatrix {
    inner: qstate::DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    #[new]
    #[pyo3(signature = (dims, matrix, cap = DEFAULT_DIM_CAP))]
    fn new(dims: Vec<usize>, matrix: Vec<Vec<C64>>, cap: usize) -> PyResult<Self> {
        let d = self::dims(dims, cap)?;
        let n = matrix.len();
        if matrix.iter().any(|row| row.len() != n) {
            return Err(PyValueError::new_err("matrix must be square"));
        }
        let m = DMatrix::from_fn(n, n, |r, c| matrix[r][c]);
        Ok(Self { inner: qstate::DensityMatrix::from_matrix(d, m).map_err(py_err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        match io::parse_state_default(text).map_err(py_err)? {
            State::Mixed(m) => Ok(Self { inner: m }),
            State::Pure(p) => Ok(Self { inner: p.density().map_err(py_err)? }),
        }
    }

    fn to_json(&self) -> String {
        io::density_to_json(&self.inner)
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims().as_slice().to_vec()
    }

    #[getter]
    fn matrix(&self) -> Vec<Vec<C64>> {
        let m = self.inner.matrix();
        (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect()).collect()
    }

    fn entropy(&self) -> PyResult<f64> {
        self.inner.entropy().map_err(py_err)
    }

    fn spectrum(&self) -> PyResult<Vec<f64>> {
        Ok(self.inner.spectrum().map_err(py_err)?.values)
    }

    fn entropy_vector(&self) -> PyResult<Vec<f64>> {
        Ok(entropy::entropy_vector(&self.inner).map_err(py_err)?.values().to_vec())
    }

    fn partial_trace(&self, keep: Vec<usize>) -> PyResult<Self> {
        let m = mask(&keep, self.inner.party_count())?;
        Ok(Self { inner: self.inner.partial_trace(m).map_err(py_err)? })
    }

    fn purify(&self) -> PyResult<PyPureState> {
        Ok(PyPureState { inner: qstate::purify(&self.inner).map_err(py_err)? })
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(dims={:?})", self.inner.dims().as_slice())
    }
}

#[pyfunction]
fn random_pure(dims: Vec<usize>, seed: u64) -> PyResult<PyPureState> {
    Ok(PyPureState { inner: qstate::random_pure(&self::dims(dims, DEFAULT_DIM_CAP)?, seed) })
}

#[pyfunction]
fn random_density(dims: Vec<usize>, rank: usize, seed: u64) -> PyResult<PyDensityMatrix> {
    let d = self::dims(dims, DEFAULT_DIM_CAP)?;
    Ok(PyDensityMatrix { inner: qstate::random_density(&d, rank, seed).map_err(py_err)? })
}

/// Subset labels in canonical order (by size, then lexicographic).
#[pyfunction]
fn subset_labels(n: usize) -> Vec<String> {
    entropy::canonical_subsets(n).into_iter().map(SubsystemMask::label).collect()
}

#[pyfunction]
fn binary_entropy(x: f64) -> PyResult<f64> {
    entropy::binary_entropy(x).map_err(py_err)
}

#[pyfunction]
fn to_paper_order(vector: Vec<f64>) -> PyResult<Vec<f64>> {
    EntropyVector::from_values(vector).and_then(|v| v.to_paper_order()).map_err(py_err)
}

#[pyfunction]
fn from_paper_order(vector: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(EntropyVector::from_paper_order(&vector).map_err(py_err)?.values().to_vec())
}

fn construction(r: ConstructionResult) -> (PyPureState, Vec<f64>, Vec<f64>) {
    (PyPureState { inner: r.state }, r.claimed.values().to_vec(), r.verified.values().to_vec())
}

/// Returns `(state, claimed_vector, verified_vector)`.
#[pyfunction]
fn v_state(n: usize) -> PyResult<(PyPureState, Vec<f64>, Vec<f64>)> {
    constructions::v_state(n).map(construction).map_err(py_err)
}

#[pyfunction]
fn w_state(n: usize) -> PyResult<(PyPureState, Vec<f64>, Vec<f64>)> {
    constructions::w_state(n).map(construction).map_err(py_err)
}

#[pyfunction]
fn tilde_v4(a: [C64; 4]) -> PyResult<(PyPureState, Vec<f64>, Vec<f64>)> {
    constructions::tilde_v4(&a).map(construction).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (alpha, beta, gamma, delta, aux_dim = constructions::DEFAULT_AUX_DIM))]
fn four_param_family(alpha: f64, beta: f64, gamma: f64, delta: f64, aux_dim: usize) -> PyResult<(PyPureState, Vec<f64>, Vec<f64>)> {
    let p = constructions::FamilyParams::from_entropies(alpha, beta, gamma, delta, aux_dim).map_err(py_err)?;
    constructions::four_param_family(&p).map(construction).map_err(py_err)
}

/// Cone membership and tip bounds as a JSON report.
#[pyfunction]
#[pyo3(signature = (vector, tol = cone::DEFAULT_MEMBERSHIP_TOL))]
fn cone_check(vector: Vec<f64>, tol: f64) -> PyResult<String> {
    let v = EntropyVector::from_values(vector).map_err(py_err)?;
    let report = cone::membership(&v, tol).map_err(py_err)?;
    let tip = cone::tip_bounds(&v, tol);
    serde_json::to_string(&serde_json::json!({ "cone": report, "tip": tip })).map_err(json_err)
}

#[pyfunction]
#[pyo3(signature = (vector, tol = cone::DEFAULT_MEMBERSHIP_TOL))]
fn is_in_cone(vector: Vec<f64>, tol: f64) -> PyResult<bool> {
    let v = EntropyVector::from_values(vector).map_err(py_err)?;
    Ok(cone::membership(&v, tol).map_err(py_err)?.inside)
}

/// Lemma margins and the sum-bound check as a JSON report.
#[pyfunction]
#[pyo3(signature = (state, party = 0, product_tol = lemma_lab::DEFAULT_PRODUCT_TOL))]
fn verify_lemmas(state: &PyPureState, party: usize, product_tol: f64) -> PyResult<String> {
    let r = lemma_lab::verify_lemmas(&state.inner, party, product_tol).map_err(py_err)?;
    serde_json::to_string(&r).map_err(json_err)
}

/// Runs the sum-of-entropies probe. `config` is a JSON object with the probe
/// fields (`dims`, `restarts`, `seed`, ...). Returns the JSON result.
#[pyfunction]
#[pyo3(signature = (config, constrained_party = 0, h_min = tip_probe::DEFAULT_H_MIN))]
fn probe(py: Python<'_>, config: &str, constrained_party: usize, h_min: f64) -> PyResult<String> {
    let cfg: ProbeConfig = serde_json::from_str(config).map_err(json_err)?;
    let r = py.detach(|| tip_probe::minimize(&cfg, constrained_party, h_min)).map_err(py_err)?;
    serde_json::to_string(&serde_json::json!({ "result": r, "best_state": r.best_state_json() })).map_err(json_err)
}

#[pymodule]
fn qec(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPureState>()?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_function(wrap_pyfunction!(random_pure, m)?)?;
    m.add_function(wrap_pyfunction!(random_density, m)?)?;
    m.add_function(wrap_pyfunction!(subset_labels, m)?)?;
    m.add_function(wrap_pyfunction!(binary_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(to_paper_order, m)?)?;
    m.add_function(wrap_pyfunction!(from_paper_order, m)?)?;
    m.add_function(wrap_pyfunction!(v_state, m)?)?;
    m.add_function(wrap_pyfunction!(w_state, m)?)?;
    m.add_function(wrap_pyfunction!(tilde_v4, m)?)?;
    m.add_function(wrap_pyfunction!(four_param_family, m)?)?;
    m.add_function(wrap_pyfunction!(cone_check, m)?)?;
    m.add_function(wrap_pyfunction!(is_in_cone, m)?)?;
    m.add_function(wrap_pyfunction!(verify_lemmas, m)?)?;
    m.add_function(wrap_pyfunction!(probe, m)?)?;
    Ok(())
}
