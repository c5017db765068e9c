//! Python module `torsion_bt`: rods, transformations, roots and invariants.

use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyIOError, PyValueError};
use pyo3::prelude::*;

use torsion::backlund::{closed_double_bt, closed_single_bt_rod, Branch};
use torsion::curves::SampledCurve;
use torsion::rod::{find_torus_rod, rod_curve, RodParams};
use torsion::spectral::{find_floquet_roots, refine_floquet_root, SearchBox};
use torsion::{elliptic, invariants, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyIOError::new_err(io.to_string()),
        Error::Numeric(_) | Error::Pole(_) => PyArithmeticError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn branch(name: &str) -> PyResult<Branch> {
    match name {
        "plus" => Ok(Branch::Plus),
        "minus" => Ok(Branch::Minus),
        _ => Err(PyValueError::new_err(format!("branch must be 'plus' or 'minus', not {name:?}"))),
    }
}

/// A sampled curve with its Frenet frame.
#[pyclass(name = "Curve", frozen)]
pub struct PyCurve {
    inner: SampledCurve,
}

#[pymethods]
impl PyCurve {
    #[getter]
    fn length(&self) -> f64 {
        self.inner.length
    }

    #[getter]
    fn closed(&self) -> bool {
        self.inner.closed
    }

    #[getter]
    fn odd(&self) -> bool {
        self.inner.parity == torsion::curves::Parity::Odd
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn arclengths(&self) -> Vec<f64> {
        self.inner.arclengths()
    }

    fn positions(&self) -> Vec<(f64, f64, f64)> {
        self.inner.samples.iter().map(|c| (c.position.x, c.position.y, c.position.z)).collect()
    }

    fn curvature(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|c| c.kappa).collect()
    }

    fn torsion(&self) -> f64 {
        self.inner.samples[0].tau
    }

    fn writhe(&self) -> PyResult<f64> {
        invariants::writhe(&self.inner).map_err(py_err)
    }

    fn self_linking(&self) -> PyResult<f64> {
        invariants::self_linking(&self.inner).map_err(py_err)
    }

    fn min_self_distance(&self) -> PyResult<f64> {
        Ok(invariants::min_self_distance(&self.inner).map_err(py_err)?.distance)
    }

    fn linking(&self, other: &PyCurve) -> PyResult<f64> {
        invariants::linking(&self.inner, &other.inner).map_err(py_err)
    }

    /// (count, positive, negative) for the projection along `direction`.
    fn crossings(&self, direction: (f64, f64, f64)) -> PyResult<(usize, usize, usize)> {
        let d = torsion::curves::V3::new(direction.0, direction.1, direction.2);
        let r = invariants::crossing_count(&self.inner, &d).map_err(py_err)?;
        Ok((r.count, r.positive, r.negative))
    }

    fn __repr__(&self) -> String {
        format!("Curve(samples={}, length={:.6}, closed={})", self.inner.len(), self.inner.length, self.inner.closed)
    }
}

/// A closed constant-torsion elastic rod of torus type (m, n).
#[pyclass(name = "Rod", frozen)]
pub struct PyRod {
    params: RodParams,
    m: i64,
    n: i64,
}

#[pymethods]
impl PyRod {
    #[new]
    fn new(m: i64, n: i64) -> PyResult<Self> {
        let params = find_torus_rod(m, n, 1e-12).map_err(py_err)?;
        Ok(PyRod { params, m, n })
    }

    #[getter]
    fn p(&self) -> f64 {
        self.params.p()
    }

    #[getter]
    fn tau(&self) -> f64 {
        self.params.tau().re
    }

    #[getter]
    fn rotation(&self) -> f64 {
        self.params.delta_theta_over_2pi()
    }

    #[getter]
    fn length(&self) -> f64 {
        self.params.length()
    }

    #[pyo3(signature = (samples_per_period = 400))]
    fn curve(&self, samples_per_period: usize) -> PyResult<PyCurve> {
        let c = rod_curve(&self.params, self.n as usize, samples_per_period).map_err(py_err)?;
        Ok(PyCurve { inner: if self.m < 0 { c.reflected() } else { c } })
    }

    /// Closed single transformation at the constant C.
    #[pyo3(signature = (c, which = "plus", samples_per_period = 400))]
    fn single_bt(&self, c: f64, which: &str, samples_per_period: usize) -> PyResult<PyCurve> {
        let rod = self.curve(samples_per_period)?;
        let out = closed_single_bt_rod(&rod.inner, &self.params, c, branch(which)?).map_err(py_err)?;
        Ok(PyCurve { inner: out.curve })
    }

    /// Closing roots of sin(k n K Lambda) in the default search box.
    fn floquet_roots(&self, k: usize) -> PyResult<Vec<Complex64>> {
        let s = find_floquet_roots(self.params.p(), self.n as usize, k, &SearchBox::default()).map_err(py_err)?;
        Ok(s.roots.iter().map(|r| r.sigma_root).collect())
    }

    /// Double transformation at the root nearest `sigma`, closed after k covers.
    #[pyo3(signature = (k, sigma, omega = Complex64::new(1.0, 0.0), samples_per_period = 400))]
    fn double_bt(&self, k: usize, sigma: Complex64, omega: Complex64, samples_per_period: usize) -> PyResult<PyCurve> {
        let rod = self.curve(samples_per_period)?;
        let root = refine_floquet_root(self.params.p(), self.n as usize, k, sigma).map_err(py_err)?;
        let out = closed_double_bt(&rod.inner, &self.params, &root, omega).map_err(py_err)?;
        Ok(PyCurve { inner: out.curve })
    }

    fn __repr__(&self) -> String {
        format!("Rod(m={}, n={}, p={:.8})", self.m, self.n, self.params.p())
    }
}

/// (sn, cn, dn) at complex u and modulus p.
#[pyfunction]
fn jacobi(u: Complex64, p: f64) -> PyResult<(Complex64, Complex64, Complex64)> {
    let m = elliptic::make_modulus(p).map_err(py_err)?;
    let t = elliptic::jacobi(u, &m).map_err(py_err)?;
    Ok((t.sn, t.cn, t.dn))
}

/// (K, E) of modulus p.
#[pyfunction]
fn complete_integrals(p: f64) -> PyResult<(f64, f64)> {
    let m = elliptic::make_modulus(p).map_err(py_err)?;
    Ok((m.complete_k, m.complete_e))
}

/// The modulus beyond which no closed rod exists.
#[pyfunction]
fn p_max() -> f64 {
    torsion::rod::p_max()
}

#[pymodule]
#[pyo3(name = "torsion_bt")]
fn torsion_bt_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCurve>()?;
    m.add_class::<PyRod>()?;
    m.add_function(wrap_pyfunction!(jacobi, m)?)?;
    m.add_function(wrap_pyfunction!(complete_integrals, m)?)?;
    m.add_function(wrap_pyfunction!(p_max, m)?)?;
    Ok(())
}
