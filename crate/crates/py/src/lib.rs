//! Python bindings: functions, coefficients, pairings, kernels, projectors
//! and the verification suites (reports as JSON strings).

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use splitquat::coefficients::{basis_element, CoeffIndex, ComponentLabel, Series};
use splitquat::kernels::{self, EigenPair, KernelCase};
use splitquat::laurent::LaurentElement;
use splitquat::matrix::PointHC;
use splitquat::pairing::{self, QuadratureSpec};
use splitquat::projectors;
use splitquat::suites::{self, BoundsCfg};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn point(z: [Complex64; 4]) -> PointHC {
    PointHC::new(z[0], z[1], z[2], z[3])
}

fn index(series: &str, twol: i32, twon: i32, twom: i32, k: i32) -> PyResult<CoeffIndex> {
    let s = Series::parse(series).ok_or_else(|| err(format!("unknown series {series:?}")))?;
    CoeffIndex::new(s, twol, twon, twom, k).map_err(err)
}

fn case(name: &str) -> PyResult<KernelCase> {
    KernelCase::parse(name).ok_or_else(|| err(format!("unknown case {name:?}")))
}

/// An exact element `p(Z) N(Z)^k` of the function ring.
#[pyclass(name = "LaurentElement", frozen)]
struct PyLaurent {
    inner: LaurentElement,
}

#[pymethods]
impl PyLaurent {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        LaurentElement::from_json(text).map(|inner| Self { inner }).map_err(err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("LaurentElement({})", self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __add__(&self, other: &Self) -> Self {
        Self { inner: &self.inner + &other.inner }
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self { inner: &self.inner - &other.inner }
    }

    fn __mul__(&self, other: &Self) -> Self {
        Self { inner: &self.inner * &other.inner }
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    /// Value at the matrix `[[z11, z12], [z21, z22]]` given as four complex numbers.
    fn evaluate(&self, z: [Complex64; 4]) -> PyResult<Complex64> {
        self.inner.evaluate(&point(z)).map_err(err)
    }

    fn box_op(&self) -> Self {
        Self { inner: self.inner.box_op() }
    }

    fn inv_transform(&self) -> Self {
        Self { inner: self.inner.inv_transform() }
    }
}

/// `τ^l_{n,m}·N^k` with doubled indices.
#[pyfunction]
#[pyo3(signature = (series, twol, twon, twom, k = 0))]
fn coeff(series: &str, twol: i32, twon: i32, twom: i32, k: i32) -> PyResult<PyLaurent> {
    let idx = index(series, twol, twon, twom, k)?;
    basis_element(&idx).map(|inner| PyLaurent { inner }).map_err(err)
}

/// The dual partner of a basis element under the pairing.
#[pyfunction]
#[pyo3(signature = (series, twol, twon, twom, k = 0))]
fn dual(series: &str, twol: i32, twon: i32, twom: i32, k: i32) -> PyResult<PyLaurent> {
    let idx = index(series, twol, twon, twom, k)?;
    pairing::dual_element(&idx).map(|inner| PyLaurent { inner }).map_err(err)
}

/// Exact pairing as a string such as `"1/2"`.
#[pyfunction]
fn pair_exact(f1: &PyLaurent, f2: &PyLaurent) -> PyResult<String> {
    pairing::pair_exact(&f1.inner, &f2.inner).map(|v| v.to_string()).map_err(err)
}

/// Quadrature pairing on `R·U(1,1)`.
#[pyfunction]
#[pyo3(signature = (f1, f2, t_max = 40.0, n_t = 200, n_ang = 64, radius = 1.0))]
fn pair_numeric(
    f1: &PyLaurent,
    f2: &PyLaurent,
    t_max: f64,
    n_t: usize,
    n_ang: usize,
    radius: f64,
) -> PyResult<Complex64> {
    let spec = QuadratureSpec { t_max, n_t, n_ang, radius };
    pairing::pair_numeric(&f1.inner, &f2.inner, &spec).map(|o| o.value()).map_err(err)
}

#[pyfunction]
fn project(f: &PyLaurent, component: &str) -> PyResult<PyLaurent> {
    let label = ComponentLabel::parse(component).ok_or_else(|| err(format!("unknown component {component:?}")))?;
    projectors::project_symbolic(&f.inner, label).map(|inner| PyLaurent { inner }).map_err(err)
}

/// Ordered eigenvalues of a matrix and its semigroup label.
#[pyfunction]
fn eigen_split(m: [Complex64; 4]) -> (Option<(Complex64, Complex64)>, String) {
    let s = kernels::eigen_split(&point(m));
    (s.eig.map(|e| (e.lambda1, e.lambda2)), s.label.to_string())
}

/// Closed-form kernel from eigenvalues and `N(Z)`; `printed=True` selects the
/// form as originally stated.
#[pyfunction]
#[pyo3(signature = (case_name, l1, l2, nz, printed = false))]
fn kernel_closed_form(
    case_name: &str,
    l1: Complex64,
    l2: Complex64,
    nz: Complex64,
    printed: bool,
) -> PyResult<Complex64> {
    let (c, eig) = (case(case_name)?, EigenPair::new(l1, l2));
    if printed {
        kernels::printed_closed_form(c, &eig, nz).map_err(err)
    } else {
        kernels::kernel_closed_form(c, &eig, nz).map_err(err)
    }
}

/// The truncated kernel series at `(Z, W)` with adaptive doubling.
#[pyfunction]
#[pyo3(signature = (case_name, z, w, tol = 1e-6))]
fn kernel_series(case_name: &str, z: [Complex64; 4], w: [Complex64; 4], tol: f64) -> PyResult<Complex64> {
    kernels::kernel_series_direct(case(case_name)?, &point(z), &point(w), Default::default(), tol, 2)
        .map(|o| o.value())
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (cases = None, samples = 5, seed = 42))]
fn verify_kernels(cases: Option<Vec<String>>, samples: usize, seed: u64) -> PyResult<String> {
    let d = suites::KernelSuiteConfig::default();
    let cases = match cases {
        Some(v) => v.iter().map(|c| case(c)).collect::<PyResult<Vec<_>>>()?,
        None => d.cases.clone(),
    };
    Ok(suites::verify_kernels(&suites::KernelSuiteConfig { cases, samples, seed, ..d }).to_json())
}

#[pyfunction]
#[pyo3(signature = (min_twol = -6, max_absk = 4, mn_offset = 1, corrupt_fixture = false))]
fn verify_decomposition(min_twol: i32, max_absk: i32, mn_offset: i32, corrupt_fixture: bool) -> String {
    let cfg = suites::DecompositionConfig {
        bounds: BoundsCfg { min_twol, max_absk, mn_offset },
        corrupt_fixture,
        ..Default::default()
    };
    suites::verify_decomposition(&cfg).to_json()
}

#[pyfunction]
#[pyo3(signature = (seed = 42))]
fn verify_structure(seed: u64) -> String {
    suites::verify_structure(&suites::StructureConfig { seed, ..Default::default() }).to_json()
}

#[pymodule]
#[pyo3(name = "splitquat")]
fn splitquat_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLaurent>()?;
    m.add_function(wrap_pyfunction!(coeff, m)?)?;
    m.add_function(wrap_pyfunction!(dual, m)?)?;
    m.add_function(wrap_pyfunction!(pair_exact, m)?)?;
    m.add_function(wrap_pyfunction!(pair_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(project, m)?)?;
    m.add_function(wrap_pyfunction!(eigen_split, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_series, m)?)?;
    m.add_function(wrap_pyfunction!(verify_kernels, m)?)?;
    m.add_function(wrap_pyfunction!(verify_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(verify_structure, m)?)?;
    Ok(())
}
