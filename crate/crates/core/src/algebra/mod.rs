//! Exact representation and analysis of quadratic nonlinearities
//! F(u, ∂u) for an N-component system of wave equations: evaluation,
//! the reduced nonlinearity, the null-condition decision with null-form
//! decomposition, verification of the Alinhac factorization, and the
//! construction of the extended system.

mod alinhac;
mod extended;
mod nullcond;
mod presets;
mod spec_file;

pub use alinhac::{
    verify_alinhac, verify_alinhac_seeded, AlinhacData, AlinhacReport, SphereMatrixFn,
    SphereTensorFn, SphereVectorFn,
};
pub use extended::{build_b, build_extended_system, ExtendedSystem, GCoefficients, GTensors};
pub use nullcond::{NullConditionResult, NullFormDecomposition, NullWitness};
pub use presets::{preset, preset_names, Preset};
pub use spec_file::nonlinearity_from_json;

use crate::error::{argument, Result};
use ndarray::{Array3, Array4, Array5};

/// Coefficient tensors of a homogeneous quadratic right-hand side
/// F_j(u, ∂u) for an N-component system.
///
/// The three tensors store, per output component j:
/// - `uu[j][k][l]`: coefficient of u_k u_l,
/// - `udu[j][k][l][a]`: coefficient of u_k (∂_a u_l), a ∈ {0,1,2,3} with 0 = t,
/// - `dudu[j][k][b][l][c]`: coefficient of (∂_b u_k)(∂_c u_l).
///
/// The first `n_v` components are the v-block and the remaining
/// `n_w = n_total − n_v` are the w-block of the system split.
#[derive(Debug, Clone)]
pub struct QuadraticNonlinearity {
    n_total: usize,
    n_v: usize,
    uu: Array3<f64>,
    udu: Array4<f64>,
    dudu: Array5<f64>,
}

/// One of the classical null forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullForm {
    Q0,
    /// Q_{ab} with 0 ≤ a < b ≤ 3.
    Qab(usize, usize),
}

/// Q0(φ,ψ) = ∂_tφ ∂_tψ − Σ_k ∂_kφ ∂_kψ;
/// Q_{ab}(φ,ψ) = ∂_aφ ∂_bψ − ∂_bφ ∂_aψ.
pub fn eval_null_form(which: NullForm, dphi: [f64; 4], dpsi: [f64; 4]) -> f64 {
    match which {
        NullForm::Q0 => {
            dphi[0] * dpsi[0] - dphi[1] * dpsi[1] - dphi[2] * dpsi[2] - dphi[3] * dpsi[3]
        }
        NullForm::Qab(a, b) => {
            debug_assert!(a < b && b <= 3);
            dphi[a] * dpsi[b] - dphi[b] * dpsi[a]
        }
    }
}

pub(crate) fn check_unit(omega: [f64; 3]) -> Result<()> {
    let r2: f64 = omega.iter().map(|c| c * c).sum();
    if (r2.sqrt() - 1.0).abs() > 1e-12 {
        return Err(argument(format!("direction {omega:?} is not a unit vector")));
    }
    Ok(())
}

impl QuadraticNonlinearity {
    /// The zero nonlinearity on `n_total` components with v-block size `n_v`.
    pub fn zeros(n_total: usize, n_v: usize) -> Self {
        assert!(n_v <= n_total);
        QuadraticNonlinearity {
            n_total,
            n_v,
            uu: Array3::zeros((n_total, n_total, n_total)),
            udu: Array4::zeros((n_total, n_total, n_total, 4)),
            dudu: Array5::zeros((n_total, n_total, 4, n_total, 4)),
        }
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    pub fn n_w(&self) -> usize {
        self.n_total - self.n_v
    }

    pub fn set_n_v(&mut self, n_v: usize) {
        assert!(n_v <= self.n_total);
        self.n_v = n_v;
    }

    /// Add `coef`·u_k u_l to component j.
    pub fn add_uu(&mut self, j: usize, k: usize, l: usize, coef: f64) {
        self.uu[[j, k, l]] += coef;
    }

    /// Add `coef`·u_k (∂_a u_l) to component j.
    pub fn add_udu(&mut self, j: usize, k: usize, l: usize, a: usize, coef: f64) {
        self.udu[[j, k, l, a]] += coef;
    }

    /// Add `coef`·(∂_b u_k)(∂_c u_l) to component j.
    pub fn add_dudu(&mut self, j: usize, k: usize, b: usize, l: usize, c: usize, coef: f64) {
        self.dudu[[j, k, b, l, c]] += coef;
    }

    pub fn uu(&self) -> &Array3<f64> {
        &self.uu
    }

    pub fn udu(&self) -> &Array4<f64> {
        &self.udu
    }

    pub fn dudu(&self) -> &Array5<f64> {
        &self.dudu
    }

    /// True if F depends on ∂u only (no uu or udu terms).
    pub fn is_gradient_only(&self) -> bool {
        self.uu.iter().all(|c| *c == 0.0) && self.udu.iter().all(|c| *c == 0.0)
    }

    /// Add a null form acting on the pair (u_k, u_l) to component j.
    pub fn add_null_form(&mut self, j: usize, form: NullForm, k: usize, l: usize, coef: f64) {
        match form {
            NullForm::Q0 => {
                self.add_dudu(j, k, 0, l, 0, coef);
                for m in 1..4 {
                    self.add_dudu(j, k, m, l, m, -coef);
                }
            }
            NullForm::Qab(a, b) => {
                assert!(a < b && b <= 3);
                self.add_dudu(j, k, a, l, b, coef);
                self.add_dudu(j, k, b, l, a, -coef);
            }
        }
    }

    /// Evaluate F(u, ∂u). `du[k][a]` is ∂_a u_k.
    pub fn eval(&self, u: &[f64], du: &[[f64; 4]]) -> Result<Vec<f64>> {
        if u.len() != self.n_total || du.len() != self.n_total {
            return Err(argument(format!(
                "eval_F: expected {} components, got u: {}, du: {}",
                self.n_total,
                u.len(),
                du.len()
            )));
        }
        let mut out = vec![0.0; self.n_total];
        self.eval_into(u, du, &mut out);
        Ok(out)
    }

    /// Allocation-free evaluation; dimensions must already match.
    pub fn eval_into(&self, u: &[f64], du: &[[f64; 4]], out: &mut [f64]) {
        let n = self.n_total;
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                for l in 0..n {
                    let c = self.uu[[j, k, l]];
                    if c != 0.0 {
                        acc += c * u[k] * u[l];
                    }
                    for a in 0..4 {
                        let c = self.udu[[j, k, l, a]];
                        if c != 0.0 {
                            acc += c * u[k] * du[l][a];
                        }
                    }
                    for b in 0..4 {
                        for c_ix in 0..4 {
                            let c = self.dudu[[j, k, b, l, c_ix]];
                            if c != 0.0 {
                                acc += c * du[k][b] * du[l][c_ix];
                            }
                        }
                    }
                }
            }
            out[j] = acc;
        }
    }

    /// The reduced nonlinearity F^red(ω, X, Y): F evaluated with
    /// u_k ↦ X_k and ∂_a u_k ↦ ω_a Y_k, where ω₀ = −1.
    pub fn eval_reduced(&self, omega: [f64; 3], x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        check_unit(omega)?;
        if x.len() != self.n_total || y.len() != self.n_total {
            return Err(argument("eval_F_red: component count mismatch".to_string()));
        }
        let mut out = vec![0.0; self.n_total];
        self.eval_reduced_into(omega, x, y, &mut out);
        Ok(out)
    }

    /// Allocation-free reduced evaluation; no unit check.
    pub fn eval_reduced_into(&self, omega: [f64; 3], x: &[f64], y: &[f64], out: &mut [f64]) {
        let w4 = [-1.0, omega[0], omega[1], omega[2]];
        let n = self.n_total;
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                for l in 0..n {
                    let c = self.uu[[j, k, l]];
                    if c != 0.0 {
                        acc += c * x[k] * x[l];
                    }
                    for a in 0..4 {
                        let c = self.udu[[j, k, l, a]];
                        if c != 0.0 {
                            acc += c * x[k] * w4[a] * y[l];
                        }
                    }
                    for b in 0..4 {
                        for c_ix in 0..4 {
                            let c = self.dudu[[j, k, b, l, c_ix]];
                            if c != 0.0 {
                                acc += c * w4[b] * y[k] * w4[c_ix] * y[l];
                            }
                        }
                    }
                }
            }
            out[j] = acc;
        }
    }

    /// Sparse term list for hot loops (solver, reduced-system integrator).
    pub fn compile(&self) -> CompiledNonlinearity {
        let n = self.n_total;
        let mut terms = vec![CompiledComponent::default(); n];
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let c = self.uu[[j, k, l]];
                    if c != 0.0 {
                        terms[j].uu.push((k, l, c));
                    }
                    for a in 0..4 {
                        let c = self.udu[[j, k, l, a]];
                        if c != 0.0 {
                            terms[j].udu.push((k, l, a, c));
                        }
                    }
                    for b in 0..4 {
                        for cc in 0..4 {
                            let c = self.dudu[[j, k, b, l, cc]];
                            if c != 0.0 {
                                terms[j].dudu.push((k, b, l, cc, c));
                            }
                        }
                    }
                }
            }
        }
        CompiledNonlinearity { n_total: n, terms }
    }
}

/// Sparse (nonzero-term) form of a `QuadraticNonlinearity`.
#[derive(Debug, Clone, Default)]
pub struct CompiledComponent {
    pub uu: Vec<(usize, usize, f64)>,
    pub udu: Vec<(usize, usize, usize, f64)>,
    pub dudu: Vec<(usize, usize, usize, usize, f64)>,
}

#[derive(Debug, Clone)]
pub struct CompiledNonlinearity {
    pub n_total: usize,
    pub terms: Vec<CompiledComponent>,
}

impl CompiledNonlinearity {
    #[inline]
    pub fn eval_component(&self, j: usize, u: &[f64], du: &[[f64; 4]]) -> f64 {
        let t = &self.terms[j];
        let mut acc = 0.0;
        for &(k, l, c) in &t.uu {
            acc += c * u[k] * u[l];
        }
        for &(k, l, a, c) in &t.udu {
            acc += c * u[k] * du[l][a];
        }
        for &(k, b, l, cc, c) in &t.dudu {
            acc += c * du[k][b] * du[l][cc];
        }
        acc
    }

    /// Reduced-nonlinearity evaluation F^red(ω, X, Y) through the term list.
    #[inline]
    pub fn eval_reduced_component(&self, j: usize, w4: &[f64; 4], x: &[f64], y: &[f64]) -> f64 {
        let t = &self.terms[j];
        let mut acc = 0.0;
        for &(k, l, c) in &t.uu {
            acc += c * x[k] * x[l];
        }
        for &(k, l, a, c) in &t.udu {
            acc += c * x[k] * w4[a] * y[l];
        }
        for &(k, b, l, cc, c) in &t.dudu {
            acc += c * w4[b] * y[k] * w4[cc] * y[l];
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.uu.is_empty() && t.udu.is_empty() && t.dudu.is_empty())
    }
}
