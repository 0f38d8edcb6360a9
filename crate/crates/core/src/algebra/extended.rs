//! Structure coefficients G(ω, u, ∂u) and the extended system built from
//! the Alinhac factorization: v = (u, ∂₀u, …, ∂₃u), w_l = Σ h_{l,ka} ∂_a u_k,
//! giving an N* = 5N + N₀ system whose v/w split satisfies the profile
//! machinery's structural assumptions.

use super::alinhac::{AlinhacData, SphereTensorFn, SphereVectorFn};
use super::{check_unit, verify_alinhac, QuadraticNonlinearity};
use crate::error::{argument, Result};
use nalgebra::DMatrix;
use ndarray::{Array4, Array5};
use std::sync::Arc;

/// Pointwise values of the structure coefficients at one ω:
/// `c[j][k][a][l]` multiplies w_l (∂_a v_k), and `d[j][k][a][l][b]`
/// multiplies (∂_b w_l)(∂_a v_k).
#[derive(Debug, Clone)]
pub struct GTensors {
    pub c: Array4<f64>,
    pub d: Array5<f64>,
}

impl GTensors {
    pub fn zeros(n_v: usize, n_w: usize) -> Self {
        GTensors { c: Array4::zeros((n_v, n_v, 4, n_w)), d: Array5::zeros((n_v, n_v, 4, n_w, 4)) }
    }
}

/// Raw g_{jl,k} coefficients and β from the Alinhac data, carried along so
/// that the spectral classifier can apply the β-projection pointwise.
#[derive(Clone)]
pub struct AlinhacProjection {
    /// Size N of the original system.
    pub n_base: usize,
    /// g(ω)[j][l][k] as in the factorization.
    pub g: SphereTensorFn,
    pub beta: SphereVectorFn,
}

/// Smooth structure coefficients c_{jk}^{a,l}(ω), d_{jk}^{a,lb}(ω) on S².
#[derive(Clone)]
pub struct GCoefficients {
    pub n_v: usize,
    pub n_w: usize,
    eval: Arc<dyn Fn([f64; 3]) -> GTensors + Send + Sync>,
    /// Present when the coefficients came from an Alinhac extension.
    pub projection: Option<AlinhacProjection>,
}

impl std::fmt::Debug for GCoefficients {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GCoefficients")
            .field("n_v", &self.n_v)
            .field("n_w", &self.n_w)
            .field("projection", &self.projection.is_some())
            .finish()
    }
}

impl GCoefficients {
    pub fn new(
        n_v: usize,
        n_w: usize,
        eval: Arc<dyn Fn([f64; 3]) -> GTensors + Send + Sync>,
    ) -> Self {
        GCoefficients { n_v, n_w, eval, projection: None }
    }

    /// Constant-in-ω coefficients.
    pub fn constant(n_v: usize, n_w: usize, tensors: GTensors) -> Self {
        Self::new(n_v, n_w, Arc::new(move |_| tensors.clone()))
    }

    /// Coefficients for a null-condition system: empty w-block, G ≡ 0.
    pub fn null_system(n_v: usize) -> Self {
        Self::constant(n_v, 0, GTensors::zeros(n_v, 0))
    }

    pub fn tensors_at(&self, omega: [f64; 3]) -> GTensors {
        (self.eval)(omega)
    }
}

/// The matrix B(ω, ξ, η) with
/// B_{jk} = −½ Σ_a ω_a Σ_l ( c_{jk}^{a,l}(ω) ξ_l + Σ_b d_{jk}^{a,lb}(ω) ω_b η_l ),
/// ω₀ = −1. A[ζ](σ,ω) = B(ω, ζ(σ,ω), ∂σζ(σ,ω)) pointwise.
pub fn build_b(g: &GCoefficients, omega: [f64; 3], xi: &[f64], eta: &[f64]) -> Result<DMatrix<f64>> {
    check_unit(omega)?;
    if xi.len() != g.n_w || eta.len() != g.n_w {
        return Err(argument(format!(
            "build_B: expected {} w-components, got xi: {}, eta: {}",
            g.n_w,
            xi.len(),
            eta.len()
        )));
    }
    let t = g.tensors_at(omega);
    Ok(build_b_from_tensors(&t, g.n_v, g.n_w, omega, xi, eta))
}

pub(crate) fn build_b_from_tensors(
    t: &GTensors,
    n_v: usize,
    n_w: usize,
    omega: [f64; 3],
    xi: &[f64],
    eta: &[f64],
) -> DMatrix<f64> {
    let w4 = [-1.0, omega[0], omega[1], omega[2]];
    let mut b = DMatrix::zeros(n_v, n_v);
    for j in 0..n_v {
        for k in 0..n_v {
            let mut acc = 0.0;
            for a in 0..4 {
                let mut inner = 0.0;
                for l in 0..n_w {
                    inner += t.c[[j, k, a, l]] * xi[l];
                    for bb in 0..4 {
                        inner += t.d[[j, k, a, l, bb]] * w4[bb] * eta[l];
                    }
                }
                acc += w4[a] * inner;
            }
            b[(j, k)] = -0.5 * acc;
        }
    }
    b
}

/// Result of the extension: the N* = 5N + N₀ nonlinearity and its
/// structure coefficients.
pub struct ExtendedSystem {
    pub f_star: QuadraticNonlinearity,
    pub g_coeffs: GCoefficients,
}

/// Tolerance on the Alinhac residuals accepted by `build_extended_system`.
pub const ALINHAC_TOL: f64 = 1e-9;

/// Build the extended system for a gradient nonlinearity satisfying the
/// Alinhac factorization. The β-projection of the g-coefficients is not
/// applied here; it only matters for pointwise spectral classification and
/// is done there.
pub fn build_extended_system(
    f: &QuadraticNonlinearity,
    data: &AlinhacData,
) -> Result<ExtendedSystem> {
    if !f.is_gradient_only() {
        return Err(argument("build_extended_system requires a ∂u-only nonlinearity"));
    }
    let report = verify_alinhac(f, data, 512)?;
    if report.max_residual() > ALINHAC_TOL {
        return Err(argument(format!(
            "Alinhac residuals too large for extension: {:.3e}",
            report.max_residual()
        )));
    }

    let n = f.n_total();
    let n0 = data.n0;
    let n_star = 5 * n + n0;
    let mut f_star = QuadraticNonlinearity::zeros(n_star, 5 * n);

    // F*_j for 1 ≤ j ≤ N: the original quadratic form on the first N slots.
    let q = f.dudu();
    for j in 0..n {
        for k in 0..n {
            for b in 0..4 {
                for l in 0..n {
                    for c in 0..4 {
                        let coef = q[[j, k, b, l, c]];
                        if coef != 0.0 {
                            f_star.add_dudu(j, k, b, l, c, coef);
                        }
                    }
                }
            }
        }
    }
    // F*_{j+(a+1)N} = ∂_a(F_j) expanded through the chain rule on the
    // extended components v_{k+(a+1)N} = ∂_a u_k.
    for j in 0..n {
        for a in 0..4 {
            let row = j + (a + 1) * n;
            for k in 0..n {
                for b in 0..4 {
                    for l in 0..n {
                        for c in 0..4 {
                            let coef = q[[j, k, b, l, c]];
                            if coef != 0.0 {
                                f_star.add_dudu(row, k, b, l + (a + 1) * n, c, coef);
                                f_star.add_dudu(row, k + (a + 1) * n, b, l, c, coef);
                            }
                        }
                    }
                }
            }
        }
    }
    // w_l equations: Σ_{a,k} h_{l,ka} F*_{k+(a+1)N}.
    for l0 in 0..n0 {
        let row = 5 * n + l0;
        for k in 0..n {
            for a in 0..4 {
                let hcoef = data.h_const[[l0, k, a]];
                if hcoef == 0.0 {
                    continue;
                }
                let src = k + (a + 1) * n;
                for kk in 0..n_star {
                    for b in 0..4 {
                        for ll in 0..n_star {
                            for c in 0..4 {
                                let coef = f_star.dudu()[[src, kk, b, ll, c]];
                                if coef != 0.0 {
                                    f_star.add_dudu(row, kk, b, ll, c, hcoef * coef);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    // Structure coefficients: G_j = −Σ_{l,k} g_{jl,k}(ω) w_l ∂_t v_k for the
    // first N rows; the derivative rows pick up the product-rule pair.
    let g_fn = data.g.clone();
    let n_v = 5 * n;
    let n_w = n0;
    let eval = move |omega: [f64; 3]| -> GTensors {
        let g = g_fn(omega);
        let mut t = GTensors::zeros(n_v, n_w);
        for j in 0..n {
            for l in 0..n0 {
                for k in 0..n {
                    let coef = -g[[j, l, k]];
                    if coef == 0.0 {
                        continue;
                    }
                    t.c[[j, k, 0, l]] += coef;
                    for a in 0..4 {
                        let row = j + (a + 1) * n;
                        t.d[[row, k, 0, l, a]] += coef;
                        t.c[[row, k + (a + 1) * n, 0, l]] += coef;
                    }
                }
            }
        }
        t
    };
    let g_coeffs = GCoefficients {
        n_v,
        n_w,
        eval: Arc::new(eval),
        projection: Some(AlinhacProjection { n_base: n, g: data.g.clone(), beta: data.beta.clone() }),
    };

    Ok(ExtendedSystem { f_star, g_coeffs })
}

impl QuadraticNonlinearity {
    /// Check the structural split: uu ≡ 0 and every u·∂u term is of the
    /// form w_l (∂_a v_k) feeding a v-equation.
    pub fn validate_form01(&self) -> Result<()> {
        if self.uu().iter().any(|c| *c != 0.0) {
            return Err(argument("Form01 split requires uu ≡ 0"));
        }
        let n_v = self.n_v();
        for j in 0..self.n_total() {
            for k in 0..self.n_total() {
                for l in 0..self.n_total() {
                    for a in 0..4 {
                        if self.udu()[[j, k, l, a]] != 0.0 && !(j < n_v && k >= n_v && l < n_v) {
                            return Err(argument(format!(
                                "u·∂u term at j={j}, k={k}, l={l} violates the w_l(∂_a v_k) structure"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
