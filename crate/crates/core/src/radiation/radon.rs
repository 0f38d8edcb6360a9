//! Radon transforms and the Friedlander radiation field
//! ℱ₀[φ, ψ] = (1/4π)(ℛ[ψ] − ∂σℛ[φ]).

use super::data::{InitialData, InitialDataKind, RadialProfile};
use super::{GridGeometry, ProfileGrid};
use crate::error::{argument, Result};
use crate::quad::{adaptive_simpson, gauss_legendre_interval};
use rayon::prelude::*;

/// Quadrature orders for plane integrals.
#[derive(Debug, Clone, Copy)]
pub struct RadonParams {
    pub n_radial: usize,
    pub n_angular: usize,
}

impl Default for RadonParams {
    fn default() -> Self {
        RadonParams { n_radial: 64, n_angular: 64 }
    }
}

/// Radon transform of a radial function: ℛ[ψ](σ, ω) = 2π ∫_{|σ|}^∞ s ψ(s) ds,
/// independent of ω.
pub fn radon_radial(psi: &RadialProfile, sigma: f64) -> f64 {
    let lo = sigma.abs();
    let hi = psi.support();
    if lo >= hi {
        return 0.0;
    }
    2.0 * std::f64::consts::PI * adaptive_simpson(&|s| s * psi.value(s), lo, hi, 1e-12)
}

/// Orthonormal pair spanning the plane normal to ω.
fn tangent_frame(omega: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let pick = if omega[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let mut e1 = [
        omega[1] * pick[2] - omega[2] * pick[1],
        omega[2] * pick[0] - omega[0] * pick[2],
        omega[0] * pick[1] - omega[1] * pick[0],
    ];
    let n = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    for c in &mut e1 {
        *c /= n;
    }
    let e2 = [
        omega[1] * e1[2] - omega[2] * e1[1],
        omega[2] * e1[0] - omega[0] * e1[2],
        omega[0] * e1[1] - omega[1] * e1[0],
    ];
    (e1, e2)
}

/// Plane integral ∫_{y·ω=σ} h dS by polar Gauss–Legendre × uniform-angle
/// quadrature over the disk of radius √(R²−σ²).
pub fn radon_transform(
    h: &(dyn Fn([f64; 3]) -> f64 + Sync),
    support: f64,
    sigma: f64,
    omega: [f64; 3],
    params: RadonParams,
) -> f64 {
    if sigma.abs() >= support {
        return 0.0;
    }
    let rho_max = (support * support - sigma * sigma).sqrt();
    let (e1, e2) = tangent_frame(omega);
    let (rhos, rws) = gauss_legendre_interval(params.n_radial, 0.0, rho_max);
    let dalpha = 2.0 * std::f64::consts::PI / params.n_angular as f64;
    let center = [sigma * omega[0], sigma * omega[1], sigma * omega[2]];
    let mut acc = 0.0;
    for (rho, rw) in rhos.iter().zip(&rws) {
        let mut ring = 0.0;
        for ia in 0..params.n_angular {
            let alpha = (ia as f64 + 0.5) * dalpha;
            let (ca, sa) = (alpha.cos(), alpha.sin());
            let y = [
                center[0] + rho * (ca * e1[0] + sa * e2[0]),
                center[1] + rho * (ca * e1[1] + sa * e2[1]),
                center[2] + rho * (ca * e1[2] + sa * e2[2]),
            ];
            ring += h(y);
        }
        acc += rw * rho * ring * dalpha;
    }
    acc
}

/// (ℱ₀, ∂σℱ₀) of radial data at one σ, by the closed-form radial Radon
/// transform:
/// ℱ₀(σ) = ½ (∫_{|σ|}^∞ s ψ ds + σ φ(|σ|)),
/// ∂σℱ₀(σ) = ½ (−σ ψ(|σ|) + φ(|σ|) + |σ| φ′(|σ|)).
pub fn friedlander_radial(data: &InitialData, sigma: f64) -> Result<(f64, f64)> {
    let Some((phi, psi)) = data.radial_profiles() else {
        return Err(argument("friedlander_radial requires radial closed-form data"));
    };
    let a = sigma.abs();
    if a >= data.support_radius {
        return Ok((0.0, 0.0));
    }
    let radon = radon_radial(psi, sigma) / (2.0 * std::f64::consts::PI);
    let f0 = 0.5 * (radon + sigma * phi.value(a));
    let df0 = 0.5 * (-sigma * psi.value(a) + phi.value(a) + a * phi.deriv(a));
    Ok((f0, df0))
}

/// The Friedlander radiation field of one data component on a grid.
/// Component 0 of the result is ℱ₀, component 1 is ∂σℱ₀.
///
/// Radial data use the closed-form radial Radon transform and its exact
/// σ-derivative; grid-sampled data use plane quadrature plus centered
/// differences in σ.
pub fn friedlander_field(data: &InitialData, geometry: &GridGeometry) -> Result<ProfileGrid> {
    let r = data.support_radius;
    if geometry.sigma_min > -r || geometry.sigma_max < r {
        return Err(argument(format!(
            "σ grid [{}, {}] does not cover the data support radius {r}",
            geometry.sigma_min, geometry.sigma_max
        )));
    }
    let mut grid = ProfileGrid::zeros(geometry.clone(), 2);
    match &data.kind {
        InitialDataKind::RadialClosedForm { .. } => {
            let columns: Vec<(f64, f64)> = (0..geometry.n_sigma)
                .into_par_iter()
                .map(|i| friedlander_radial(data, geometry.sigma(i)).unwrap())
                .collect();
            for (i, (f0, df0)) in columns.into_iter().enumerate() {
                for w in 0..geometry.sphere.len() {
                    grid.values[[0, i, w]] = f0;
                    grid.values[[1, i, w]] = df0;
                }
            }
        }
        InitialDataKind::GridSampled { .. } => {
            let params = RadonParams::default();
            let phi_fn = |y: [f64; 3]| data.phi_at(y);
            let psi_fn = |y: [f64; 3]| data.psi_at(y);
            let nw = geometry.sphere.len();
            let ds = geometry.dsigma();
            let rows: Vec<Vec<f64>> = (0..geometry.n_sigma)
                .into_par_iter()
                .map(|i| {
                    let s = geometry.sigma(i);
                    (0..nw)
                        .map(|w| {
                            let omega = geometry.sphere.nodes[w];
                            let rp = radon_transform(&psi_fn, r, s, omega, params);
                            // ∂σℛ[φ] by a centered difference of the plane integral.
                            let dphi = (radon_transform(&phi_fn, r, s + 0.5 * ds, omega, params)
                                - radon_transform(&phi_fn, r, s - 0.5 * ds, omega, params))
                                / ds;
                            (rp - dphi) / (4.0 * std::f64::consts::PI)
                        })
                        .collect()
                })
                .collect();
            for (i, row) in rows.iter().enumerate() {
                for (w, v) in row.iter().enumerate() {
                    grid.values[[0, i, w]] = *v;
                }
            }
            // ∂σℱ₀ from the sampled ℱ₀ column.
            let d = ProfileGrid { geometry: geometry.clone(), values: grid.values.clone() }
                .sigma_derivative();
            for i in 0..geometry.n_sigma {
                for w in 0..nw {
                    grid.values[[1, i, w]] = d.values[[0, i, w]];
                }
            }
        }
    }
    Ok(grid)
}

/// ‖𝒯[φ, ψ]‖_{L²(R×S²)} of radial data by adaptive 1D quadrature
/// (ω-independent integrand: the norm is 4π ∫ (∂σℱ₀)² dσ).
pub fn translation_l2_radial(data: &InitialData) -> Result<f64> {
    let r = data.support_radius;
    if r == 0.0 {
        return Ok(0.0);
    }
    let integrand = |s: f64| {
        let (_, df0) = friedlander_radial(data, s).expect("radial data");
        df0 * df0
    };
    if data.radial_profiles().is_none() {
        return Err(argument("translation_l2_radial requires radial data"));
    }
    let integral = adaptive_simpson(&integrand, -r, r, 1e-13);
    Ok((4.0 * std::f64::consts::PI * integral).sqrt())
}

/// The translation representation 𝒯[φ, ψ] = ∂σℱ₀[φ, ψ] on a grid
/// (single-component result).
pub fn translation_representation(data: &InitialData, geometry: &GridGeometry) -> Result<ProfileGrid> {
    let f = friedlander_field(data, geometry)?;
    let mut out = ProfileGrid::zeros(geometry.clone(), 1);
    for i in 0..geometry.n_sigma {
        for w in 0..geometry.sphere.len() {
            out.values[[0, i, w]] = f.values[[1, i, w]];
        }
    }
    Ok(out)
}
