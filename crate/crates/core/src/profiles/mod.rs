//! Asymptotic-profile machinery: the matrix field A[W] and the phase
//! Θ_ε = (ε log t)·A[W], matrix exponentials, the reduced characteristic
//! system, characteristic integration, and spectral classification of the
//! interaction matrix B(ω, ξ, η).

mod classify;
mod eig;
mod expm;
mod reduced;

pub use classify::{classify, classify_seeded, ClassificationReport, Verdict, Witness};
pub use eig::{eigenvalues, z_membership};
pub use expm::{matrix_exp, rank_one_exp};
pub use reduced::{
    characteristic_integrate, integrate_reduced_system, CharacteristicLimit, ReducedSolution,
};

use crate::algebra::GCoefficients;
use crate::error::{argument, Result};
use crate::radiation::{GridGeometry, ProfileGrid};
use nalgebra::DMatrix;
use rayon::prelude::*;

/// The matrix field A[W](σ, ω) = B(ω, W(σ,ω), ∂σW(σ,ω)) sampled on a grid,
/// together with the amplitude ε that scales the phase Θ_ε = (ε log t)·A.
#[derive(Debug, Clone)]
pub struct MatrixFieldA {
    pub geometry: GridGeometry,
    pub n_v: usize,
    pub eps: f64,
    /// matrices[iσ * nω + iω]
    pub matrices: Vec<DMatrix<f64>>,
}

impl MatrixFieldA {
    pub fn at(&self, isigma: usize, iomega: usize) -> &DMatrix<f64> {
        &self.matrices[isigma * self.geometry.sphere.len() + iomega]
    }

    /// Matrix at arbitrary σ by nearest-σ lookup at a fixed sphere node.
    pub fn at_sigma(&self, sigma: f64, iomega: usize) -> &DMatrix<f64> {
        let ds = self.geometry.dsigma();
        let pos = ((sigma - self.geometry.sigma_min) / ds).round();
        let i = (pos.max(0.0) as usize).min(self.geometry.n_sigma - 1);
        self.at(i, iomega)
    }

    pub fn max_norm(&self) -> f64 {
        self.matrices.iter().fold(0.0f64, |m, a| m.max(a.norm()))
    }
}

/// Build A[W] from structure coefficients and a W grid with n_w
/// components; ∂σW is taken by 4th-order centered differences.
pub fn build_a_of_w(g: &GCoefficients, w: &ProfileGrid, eps: f64) -> Result<MatrixFieldA> {
    if w.components() != g.n_w {
        return Err(argument(format!(
            "build_A_of_W: W has {} components, coefficients expect {}",
            w.components(),
            g.n_w
        )));
    }
    let dw = w.sigma_derivative();
    let geometry = w.geometry.clone();
    let nw_nodes = geometry.sphere.len();
    let matrices: Vec<DMatrix<f64>> = (0..geometry.n_sigma * nw_nodes)
        .into_par_iter()
        .map(|flat| {
            let i = flat / nw_nodes;
            let iw = flat % nw_nodes;
            let omega = geometry.sphere.nodes[iw];
            let xi: Vec<f64> = (0..g.n_w).map(|c| w.values[[c, i, iw]]).collect();
            let eta: Vec<f64> = (0..g.n_w).map(|c| dw.values[[c, i, iw]]).collect();
            // Same contraction as build_b; the direction comes from the
            // grid's own (unit) quadrature nodes.
            crate::algebra::build_b(g, omega, &xi, &eta).expect("grid nodes are unit vectors")
        })
        .collect();
    Ok(MatrixFieldA { geometry, n_v: g.n_v, eps, matrices })
}

/// e^{Θ_ε(t)} = e^{(ε log t) A(σ,ω)} per grid node. For t < 2 the phase is
/// taken as zero (identity matrices), matching the piecewise definition of
/// Θ_ε⁺.
pub fn exp_theta(a: &MatrixFieldA, t: f64) -> Vec<DMatrix<f64>> {
    exp_theta_scaled(a, t, 1.0)
}

/// e^{−Θ_ε(t)} per grid node.
pub fn exp_theta_inverse(a: &MatrixFieldA, t: f64) -> Vec<DMatrix<f64>> {
    exp_theta_scaled(a, t, -1.0)
}

fn exp_theta_scaled(a: &MatrixFieldA, t: f64, sign: f64) -> Vec<DMatrix<f64>> {
    let tau = if t < 2.0 { 0.0 } else { sign * a.eps * t.ln() };
    a.matrices
        .par_iter()
        .map(|m| {
            if tau == 0.0 {
                DMatrix::identity(a.n_v, a.n_v)
            } else {
                matrix_exp(&(m * tau))
            }
        })
        .collect()
}
