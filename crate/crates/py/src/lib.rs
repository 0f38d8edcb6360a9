//! Python bindings: the nonlinearity algebra, matrix exponentials, the
//! reduced-system integrator, radiation fields, and the spectral
//! classifier, exposed with plain lists as the exchange format.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use semiwave::algebra;
use semiwave::profiles;
use semiwave::quad::SphereQuadrature;
use semiwave::radiation;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Quadratic nonlinearity F(u, ∂u) of an N-component wave system.
#[pyclass(name = "Nonlinearity")]
struct PyNonlinearity {
    inner: algebra::QuadraticNonlinearity,
    preset: Option<String>,
}

#[pymethods]
impl PyNonlinearity {
    /// Resolve a named preset ("simplestEx", "simplestExR", "LogEx",
    /// "RotEx", "null_demo", "dtu2").
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        let p = algebra::preset(name).map_err(err)?;
        Ok(PyNonlinearity { inner: p.nonlinearity, preset: Some(name.to_string()) })
    }

    /// Parse the JSON nonlinearity-spec format.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyNonlinearity { inner: algebra::nonlinearity_from_json(text).map_err(err)?, preset: None })
    }

    #[getter]
    fn n_total(&self) -> usize {
        self.inner.n_total()
    }

    #[getter]
    fn n_v(&self) -> usize {
        self.inner.n_v()
    }

    /// F(u, ∂u) with du as N rows of [∂_t, ∂_1, ∂_2, ∂_3].
    fn eval(&self, u: Vec<f64>, du: Vec<[f64; 4]>) -> PyResult<Vec<f64>> {
        self.inner.eval(&u, &du).map_err(err)
    }

    /// Reduced nonlinearity F^red(ω, X, Y).
    fn eval_reduced(&self, omega: [f64; 3], x: Vec<f64>, y: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.eval_reduced(omega, &x, &y).map_err(err)
    }

    /// (holds, witness) where witness is None or (omega, x, y).
    fn check_null_condition(&self) -> (bool, Option<([f64; 3], Vec<f64>, Vec<f64>)>) {
        let r = self.inner.check_null_condition();
        (r.holds, r.witness.map(|w| (w.omega, w.x, w.y)))
    }

    /// Spectral verdict of the preset's structure coefficients.
    fn classify(&self, samples: usize, seed: u64) -> PyResult<String> {
        let name = self
            .preset
            .as_ref()
            .ok_or_else(|| PyRuntimeError::new_err("classification needs a preset with structure data"))?;
        let p = algebra::preset(name).map_err(err)?;
        let g = p
            .g_coeffs
            .ok_or_else(|| PyRuntimeError::new_err("preset carries no structure coefficients"))?;
        let report = profiles::classify_seeded(&g, None, samples, seed).map_err(err)?;
        Ok(report.verdict.to_string())
    }

    /// Integrate the reduced system from constant profiles P(σ) ≡ p0;
    /// returns (p_final_per_component, blowup_tau).
    fn integrate_reduced_constant(
        &self,
        p0: Vec<f64>,
        tau_end: f64,
        dtau: f64,
    ) -> PyResult<(Vec<f64>, Option<f64>)> {
        let n = self.inner.n_total();
        if p0.len() != n {
            return Err(PyValueError::new_err("p0 length must match the component count"));
        }
        let geom = radiation::GridGeometry::new(-1.0, 1.0, 9, SphereQuadrature::product(2, 2))
            .map_err(err)?;
        let mut p_grid = radiation::ProfileGrid::zeros(geom.clone(), n);
        let mut u_grid = radiation::ProfileGrid::zeros(geom, n);
        for (c, v) in p0.iter().enumerate() {
            p_grid.fill_component(c, |_, _| *v);
            u_grid.fill_component(c, |s, _| -v * (1.0 - s));
        }
        let sol = profiles::integrate_reduced_system(&self.inner, &p_grid, &u_grid, tau_end, dtau)
            .map_err(err)?;
        let p_final: Vec<f64> = (0..n).map(|c| sol.p.values[[c, 4, 0]]).collect();
        Ok((p_final, sol.blowup))
    }
}

/// Matrix exponential of a square matrix given as nested lists.
#[pyfunction]
fn matrix_exp(m: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    let dm = nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j]);
    let e = profiles::matrix_exp(&dm);
    Ok((0..n).map(|i| (0..n).map(|j| e[(i, j)]).collect()).collect())
}

/// e^{τ·qpᵀ} y through the closed rank-one formula.
#[pyfunction]
fn rank_one_exp(p: Vec<f64>, q: Vec<f64>, tau: f64, y: Vec<f64>) -> PyResult<Vec<f64>> {
    if p.len() != q.len() || p.len() != y.len() {
        return Err(PyValueError::new_err("p, q, y must share a length"));
    }
    Ok(profiles::rank_one_exp(&p, &q, tau, &y))
}

/// (ℱ₀, ∂σℱ₀) at σ for data with prescribed radiation-field values
/// (σ₀, α, β).
#[pyfunction]
fn prescribed_field(sigma0: f64, alpha: f64, beta: f64, sigma: f64) -> PyResult<(f64, f64)> {
    let data = radiation::make_data_with_prescribed_field(sigma0, alpha, beta).map_err(err)?;
    radiation::friedlander_radial(&data, sigma).map_err(err)
}

/// Free-wave value u₀(t, x) of the same prescribed data via the Kirchhoff
/// formula.
#[pyfunction]
fn prescribed_wave(sigma0: f64, alpha: f64, beta: f64, t: f64, x: [f64; 3]) -> PyResult<f64> {
    let data = radiation::make_data_with_prescribed_field(sigma0, alpha, beta).map_err(err)?;
    Ok(radiation::kirchhoff_eval(&data, t, x).u0)
}

#[pymodule]
fn semiwave_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNonlinearity>()?;
    m.add_function(wrap_pyfunction!(matrix_exp, m)?)?;
    m.add_function(wrap_pyfunction!(rank_one_exp, m)?)?;
    m.add_function(wrap_pyfunction!(prescribed_field, m)?)?;
    m.add_function(wrap_pyfunction!(prescribed_wave, m)?)?;
    Ok(())
}
