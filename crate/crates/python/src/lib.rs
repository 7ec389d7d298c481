//! Python bindings for the `algradius` engine.

use std::cmp::Ordering;

use num_bigint::BigInt;
use pyo3::basic::CompareOp;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use algradius::branch::{hensel_lift, validate_branch};
use algradius::cli::parse_polynomial;
use algradius::estimate::EstimateReport;
use algradius::exactpoly::{parse_rational, MultiPoly, Rational, UniPoly};
use algradius::radius::{puiseux_radius, RadiusConfig, RadiusValue};
use algradius::realalg;
use algradius::reinhardt;
use algradius::singularities::CandidateSet;
use algradius::Error;

create_exception!(pyalgradius, AlgRadiusError, PyValueError);
create_exception!(pyalgradius, UndecidedError, AlgRadiusError);
create_exception!(pyalgradius, CrossValidationError, AlgRadiusError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Undecided(_) | Error::ObstructionUndecided(_) => {
            UndecidedError::new_err(e.to_string())
        }
        Error::CrossValidationFailed(_) => CrossValidationError::new_err(e.to_string()),
        other => AlgRadiusError::new_err(other.to_string()),
    }
}

/// Accepts an `int`, a `fractions.Fraction` or a string such as `"3/2"`.
fn rational_arg(v: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if let Ok(s) = v.extract::<String>() {
        return parse_rational(s.trim())
            .ok_or_else(|| AlgRadiusError::new_err(format!("not a rational number: {s:?}")));
    }
    if let Ok(n) = v.extract::<BigInt>() {
        return Ok(Rational::from_integer(n));
    }
    v.extract::<Rational>()
}

fn poly_arg(v: &Bound<'_, PyAny>) -> PyResult<MultiPoly> {
    if let Ok(p) = v.cast::<Polynomial>() {
        return Ok(p.get().inner.clone());
    }
    let text: String = v.extract()?;
    parse_polynomial(&text).map_err(to_py)
}

/// Polynomial in `X` (or `X1 .. Xn`) and `T` with rational coefficients.
#[pyclass(frozen, module = "pyalgradius")]
struct Polynomial {
    inner: MultiPoly,
}

#[pymethods]
impl Polynomial {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Polynomial {
            inner: parse_polynomial(text).map_err(to_py)?,
        })
    }

    #[getter]
    fn nvars(&self) -> usize {
        self.inner.nvars()
    }

    #[getter]
    fn deg_t(&self) -> Option<u32> {
        self.inner.deg_t()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Polynomial('{}')", self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// Real algebraic number: a defining polynomial and an isolating interval.
#[pyclass(
    frozen,
    skip_from_py_object,
    module = "pyalgradius",
    name = "RealAlgebraic"
)]
#[derive(Clone)]
struct PyRealAlgebraic {
    inner: realalg::RealAlgebraic,
}

#[pymethods]
impl PyRealAlgebraic {
    /// Integer coefficients of the defining polynomial, constant term first.
    #[getter]
    fn defining(&self) -> Vec<BigInt> {
        self.inner.defining().primitive_integer_coeffs()
    }

    #[getter]
    fn interval(&self) -> (Rational, Rational) {
        let (lo, hi) = self.inner.interval();
        (lo.clone(), hi.clone())
    }

    fn is_rational(&self) -> bool {
        self.inner.is_rational()
    }

    fn as_fraction(&self) -> Option<Rational> {
        self.inner.as_rational().cloned()
    }

    #[pyo3(signature = (eps))]
    fn refine(&self, eps: &Bound<'_, PyAny>) -> PyResult<Self> {
        let eps = rational_arg(eps)?;
        Ok(PyRealAlgebraic {
            inner: self.inner.refine(&eps).map_err(to_py)?,
        })
    }

    fn pow(&self, p: u32) -> PyResult<Self> {
        Ok(PyRealAlgebraic {
            inner: self.inner.pow(p).map_err(to_py)?,
        })
    }

    #[pyo3(signature = (digits = 12))]
    fn to_decimal(&self, digits: usize) -> String {
        self.inner.to_decimal(digits)
    }

    fn __float__(&self) -> f64 {
        self.inner.to_f64()
    }

    fn __richcmp__(&self, other: &Self, op: CompareOp) -> bool {
        op.matches(self.inner.compare(&other.inner))
    }

    fn __repr__(&self) -> String {
        let (lo, hi) = self.inner.interval();
        format!(
            "RealAlgebraic({} in [{lo}, {hi}])",
            self.inner.defining().display_in("s")
        )
    }
}

fn wrap_value(v: &RadiusValue) -> Option<PyRealAlgebraic> {
    v.finite().map(|r| PyRealAlgebraic { inner: r.clone() })
}

/// Outcome of a radius computation. `value` is `None` for an infinite radius.
#[pyclass(frozen, module = "pyalgradius", name = "RadiusResult")]
struct PyRadiusResult {
    inner: algradius::radius::RadiusResult,
}

#[pymethods]
impl PyRadiusResult {
    #[getter]
    fn value(&self) -> Option<PyRealAlgebraic> {
        wrap_value(&self.inner.value)
    }

    #[getter]
    fn base(&self) -> Option<PyRealAlgebraic> {
        wrap_value(&self.inner.base)
    }

    #[getter]
    fn power(&self) -> u32 {
        self.inner.power
    }

    #[getter]
    fn is_infinite(&self) -> bool {
        self.inner.value.is_infinite()
    }

    #[getter]
    fn decimal(&self) -> &str {
        &self.inner.decimal
    }

    /// Squarefree polynomial whose roots are the candidate singularities.
    #[getter]
    fn candidate_polynomial(&self) -> String {
        self.inner.candidates.d.to_string()
    }

    #[getter]
    fn candidate_moduli(&self) -> Vec<PyRealAlgebraic> {
        moduli(&self.inner.candidates)
    }

    /// `(passed, hadamard, deviation)` of the cross-validation gate, if run.
    #[getter]
    fn cross_check(&self) -> Option<(bool, f64, Option<f64>)> {
        self.inner
            .cross_check
            .as_ref()
            .map(|c| (c.passed, c.hadamard.value(), c.deviation))
    }

    fn __float__(&self) -> f64 {
        self.inner.value.to_f64()
    }

    fn __repr__(&self) -> String {
        format!("RadiusResult({})", self.inner.decimal)
    }
}

fn moduli(c: &CandidateSet) -> Vec<PyRealAlgebraic> {
    c.moduli
        .iter()
        .map(|m| PyRealAlgebraic {
            inner: m.value.clone(),
        })
        .collect()
}

fn config(precision_bits: u32, rtol: f64, check_order: usize, digits: usize) -> RadiusConfig {
    let mut cfg = RadiusConfig {
        digits,
        rtol,
        check_order,
        ..RadiusConfig::default()
    };
    cfg.tracker.precision_bits = precision_bits;
    cfg
}

fn branch_poly(p: &MultiPoly) -> PyResult<algradius::exactpoly::BiPoly> {
    p.to_bipoly().map_err(to_py)
}

/// Exact convergence radius of the branch of `poly` through `t0`. With
/// `puiseux = p` the result is the radius of `f(X^(1/p))`.
#[pyfunction]
#[pyo3(signature = (poly, t0, puiseux = 1, precision_bits = 53, rtol = 0.1, check_order = 512, digits = 12))]
#[allow(clippy::too_many_arguments)]
fn radius(
    py: Python<'_>,
    poly: &Bound<'_, PyAny>,
    t0: &Bound<'_, PyAny>,
    puiseux: u32,
    precision_bits: u32,
    rtol: f64,
    check_order: usize,
    digits: usize,
) -> PyResult<PyRadiusResult> {
    let p = branch_poly(&poly_arg(poly)?)?;
    let t0 = rational_arg(t0)?;
    let cfg = config(precision_bits, rtol, check_order, digits);
    let inner = py
        .detach(|| puiseux_radius(&p, puiseux, &t0, &cfg))
        .map_err(to_py)?;
    Ok(PyRadiusResult { inner })
}

/// Coefficients `a_0 .. a_order` of the branch through `t0`.
#[pyfunction]
fn expand(
    py: Python<'_>,
    poly: &Bound<'_, PyAny>,
    t0: &Bound<'_, PyAny>,
    order: usize,
) -> PyResult<Vec<Rational>> {
    let p = branch_poly(&poly_arg(poly)?)?;
    let t0 = rational_arg(t0)?;
    let b = validate_branch(&p, &t0).map_err(to_py)?;
    Ok(py.detach(|| hensel_lift(&b, order)).coeffs().to_vec())
}

/// Hadamard and ratio estimates from the first `order` coefficients.
#[pyfunction]
fn estimate<'py>(
    py: Python<'py>,
    poly: &Bound<'py, PyAny>,
    t0: &Bound<'py, PyAny>,
    order: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let p = branch_poly(&poly_arg(poly)?)?;
    let t0 = rational_arg(t0)?;
    let b = validate_branch(&p, &t0).map_err(to_py)?;
    let report = py
        .detach(|| EstimateReport::new(&hensel_lift(&b, order)))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("order", report.order)?;
    d.set_item("hadamard", report.hadamard.value())?;
    d.set_item("ratio", report.ratio)?;
    d.set_item("ratio_convention", report.ratio_convention)?;
    Ok(d)
}

/// Candidate moduli of `poly`, ascending.
#[pyfunction]
#[pyo3(signature = (poly, precision_bits = 53))]
fn candidates(
    py: Python<'_>,
    poly: &Bound<'_, PyAny>,
    precision_bits: u32,
) -> PyResult<Vec<PyRealAlgebraic>> {
    let p = branch_poly(&poly_arg(poly)?)?;
    let c = py
        .detach(|| CandidateSet::compute(&p, precision_bits))
        .map_err(to_py)?;
    Ok(moduli(&c))
}

/// Real roots of the polynomial with the given coefficients (constant term
/// first), in increasing order.
#[pyfunction]
fn real_roots(coeffs: Vec<Bound<'_, PyAny>>) -> PyResult<Vec<PyRealAlgebraic>> {
    let c = coeffs
        .iter()
        .map(rational_arg)
        .collect::<PyResult<Vec<_>>>()?;
    let u = UniPoly::new(c);
    if u.degree().is_none_or(|d| d == 0) {
        return Err(AlgRadiusError::new_err("need a nonconstant polynomial"));
    }
    let roots = realalg::isolate_real_roots(&u.squarefree_part()).map_err(to_py)?;
    Ok(roots
        .into_iter()
        .map(|inner| PyRealAlgebraic { inner })
        .collect())
}

/// Directional radius estimate along `direction` and the exact radius of
/// the diagonal restriction, which bounds it from above.
#[pyfunction]
#[pyo3(signature = (poly, t0, direction, order = 64))]
fn directional(
    py: Python<'_>,
    poly: &Bound<'_, PyAny>,
    t0: &Bound<'_, PyAny>,
    direction: Vec<Bound<'_, PyAny>>,
    order: usize,
) -> PyResult<(f64, Option<PyRealAlgebraic>)> {
    let p = poly_arg(poly)?;
    let t0 = rational_arg(t0)?;
    let d = direction
        .iter()
        .map(rational_arg)
        .collect::<PyResult<Vec<_>>>()?;
    let cfg = RadiusConfig::default();
    let (est, upper) = py
        .detach(|| -> algradius::Result<_> {
            let s = reinhardt::multivariate_expand(&p, &t0, order)?;
            let est = reinhardt::directional_estimate(&s, &d)?;
            let upper = reinhardt::diagonal_exact_bound(&p, &t0, &d, &cfg)?;
            Ok((est, upper))
        })
        .map_err(to_py)?;
    Ok((est.value(), wrap_value(&upper)))
}

/// Orders two real algebraic numbers exactly.
#[pyfunction]
fn compare(a: &PyRealAlgebraic, b: &PyRealAlgebraic) -> i8 {
    match a.inner.compare(&b.inner) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

#[pymodule]
pub fn pyalgradius(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<Polynomial>()?;
    m.add_class::<PyRealAlgebraic>()?;
    m.add_class::<PyRadiusResult>()?;
    m.add_function(wrap_pyfunction!(radius, m)?)?;
    m.add_function(wrap_pyfunction!(expand, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(candidates, m)?)?;
    m.add_function(wrap_pyfunction!(real_roots, m)?)?;
    m.add_function(wrap_pyfunction!(directional, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add("AlgRadiusError", py.get_type::<AlgRadiusError>())?;
    m.add("UndecidedError", py.get_type::<UndecidedError>())?;
    m.add(
        "CrossValidationError",
        py.get_type::<CrossValidationError>(),
    )?;
    Ok(())
}
