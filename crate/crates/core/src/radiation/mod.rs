//! Radiation fields and free waves: Radon transforms, the Friedlander
//! radiation field, the translation representation with its Lax–Phillips
//! isometry, Kirchhoff evaluation, and initial data with prescribed
//! radiation-field values.

mod data;
mod kirchhoff;
mod radon;

pub use data::{
    bump_chi, h0_norm, make_data_with_prescribed_field, DataSpec, InitialData, InitialDataKind,
    ProfileSpec, RadialProfile,
};
pub use kirchhoff::{kirchhoff_eval, KirchhoffValue};
pub use radon::{
    friedlander_field, friedlander_radial, radon_radial, radon_transform,
    translation_l2_radial, translation_representation, RadonParams,
};

use crate::error::{argument, Result};
use crate::quad::SphereQuadrature;
use ndarray::Array3;

/// Geometry of a (σ, ω) grid: a uniform σ-line times a sphere quadrature.
#[derive(Debug, Clone)]
pub struct GridGeometry {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub n_sigma: usize,
    pub sphere: SphereQuadrature,
}

impl GridGeometry {
    pub fn new(sigma_min: f64, sigma_max: f64, n_sigma: usize, sphere: SphereQuadrature) -> Result<Self> {
        if n_sigma < 2 || sigma_max <= sigma_min {
            return Err(argument("grid needs at least 2 σ nodes and σ_max > σ_min"));
        }
        let w: f64 = sphere.weights.iter().sum();
        if (w - 4.0 * std::f64::consts::PI).abs() > 1e-12 * 4.0 * std::f64::consts::PI {
            return Err(argument("sphere quadrature weights must sum to 4π"));
        }
        Ok(GridGeometry { sigma_min, sigma_max, n_sigma, sphere })
    }

    /// Default grid for data supported in B_R: σ ∈ [−R−2, R+2] at
    /// spacing 0.05, default sphere rule.
    pub fn default_for_support(r: f64) -> Self {
        let lo = -r - 2.0;
        let hi = r + 2.0;
        let n = ((hi - lo) / 0.05).round() as usize + 1;
        GridGeometry::new(lo, hi, n, SphereQuadrature::default_rule()).unwrap()
    }

    pub fn dsigma(&self) -> f64 {
        (self.sigma_max - self.sigma_min) / (self.n_sigma - 1) as f64
    }

    pub fn sigma(&self, i: usize) -> f64 {
        self.sigma_min + i as f64 * self.dsigma()
    }

    pub fn sigmas(&self) -> Vec<f64> {
        (0..self.n_sigma).map(|i| self.sigma(i)).collect()
    }
}

/// Scalar or vector functions of (σ, ω) sampled on a grid: radiation
/// fields, the profiles W and V, and their σ-derivatives.
#[derive(Debug, Clone)]
pub struct ProfileGrid {
    pub geometry: GridGeometry,
    /// values[component][iσ][iω]
    pub values: Array3<f64>,
}

impl ProfileGrid {
    pub fn zeros(geometry: GridGeometry, components: usize) -> Self {
        let values = Array3::zeros((components, geometry.n_sigma, geometry.sphere.len()));
        ProfileGrid { geometry, values }
    }

    pub fn components(&self) -> usize {
        self.values.dim().0
    }

    /// Fill one component from a function of (σ, ω).
    pub fn fill_component(&mut self, comp: usize, f: impl Fn(f64, [f64; 3]) -> f64) {
        for i in 0..self.geometry.n_sigma {
            let s = self.geometry.sigma(i);
            for (w, node) in self.geometry.sphere.nodes.iter().enumerate() {
                self.values[[comp, i, w]] = f(s, *node);
            }
        }
    }

    /// Linear interpolation in σ at a fixed sphere node.
    pub fn interp_sigma(&self, comp: usize, sigma: f64, iomega: usize) -> f64 {
        let ds = self.geometry.dsigma();
        let pos = (sigma - self.geometry.sigma_min) / ds;
        if pos <= 0.0 {
            return self.values[[comp, 0, iomega]];
        }
        let max = (self.geometry.n_sigma - 1) as f64;
        if pos >= max {
            return self.values[[comp, self.geometry.n_sigma - 1, iomega]];
        }
        let i = pos.floor() as usize;
        let t = pos - i as f64;
        (1.0 - t) * self.values[[comp, i, iomega]] + t * self.values[[comp, i + 1, iomega]]
    }

    /// ∂σ of every component by 4th-order centered differences, one-sided
    /// at the grid ends.
    pub fn sigma_derivative(&self) -> ProfileGrid {
        let (nc, ns, nw) = self.values.dim();
        let h = self.geometry.dsigma();
        let mut out = ProfileGrid::zeros(self.geometry.clone(), nc);
        for c in 0..nc {
            for w in 0..nw {
                let v = |i: usize| self.values[[c, i, w]];
                for i in 0..ns {
                    out.values[[c, i, w]] = if ns < 5 {
                        // Fall back to 2nd order on very short lines.
                        match i {
                            0 => (v(1) - v(0)) / h,
                            i if i == ns - 1 => (v(i) - v(i - 1)) / h,
                            _ => (v(i + 1) - v(i - 1)) / (2.0 * h),
                        }
                    } else {
                        match i {
                            0 => (-25.0 * v(0) + 48.0 * v(1) - 36.0 * v(2) + 16.0 * v(3)
                                - 3.0 * v(4))
                                / (12.0 * h),
                            1 => (-3.0 * v(0) - 10.0 * v(1) + 18.0 * v(2) - 6.0 * v(3) + v(4))
                                / (12.0 * h),
                            i if i == ns - 2 => {
                                (3.0 * v(ns - 1) + 10.0 * v(ns - 2) - 18.0 * v(ns - 3)
                                    + 6.0 * v(ns - 4)
                                    - v(ns - 5))
                                    / (12.0 * h)
                            }
                            i if i == ns - 1 => {
                                (25.0 * v(ns - 1) - 48.0 * v(ns - 2) + 36.0 * v(ns - 3)
                                    - 16.0 * v(ns - 4)
                                    + 3.0 * v(ns - 5))
                                    / (12.0 * h)
                            }
                            _ => (v(i - 2) - 8.0 * v(i - 1) + 8.0 * v(i + 1) - v(i + 2))
                                / (12.0 * h),
                        }
                    };
                }
            }
        }
        out
    }

    /// L²(R × S²) norm over the grid: composite Simpson in σ (trapezoid on
    /// the leftover interval for even node counts) times the sphere weights.
    pub fn l2_norm(&self, comp: usize) -> f64 {
        let (_, ns, nw) = self.values.dim();
        let h = self.geometry.dsigma();
        let mut acc = 0.0;
        for w in 0..nw {
            let sw = self.geometry.sphere.weights[w];
            let f = |i: usize| {
                let v = self.values[[comp, i, w]];
                v * v
            };
            let mut line = 0.0;
            let mut i = 0;
            while i + 2 < ns {
                line += h / 3.0 * (f(i) + 4.0 * f(i + 1) + f(i + 2));
                i += 2;
            }
            if i + 1 < ns {
                line += 0.5 * h * (f(i) + f(i + 1));
            }
            acc += sw * line;
        }
        acc.sqrt()
    }

    /// CSV rows `component,sigma,theta,phi,value`.
    pub fn write_csv(&self, out: &mut dyn std::io::Write) -> std::io::Result<()> {
        writeln!(out, "component,sigma,theta,phi,value")?;
        let (nc, ns, nw) = self.values.dim();
        for c in 0..nc {
            for i in 0..ns {
                let s = self.geometry.sigma(i);
                for w in 0..nw {
                    writeln!(
                        out,
                        "{},{:.6},{:.8},{:.8},{:.12e}",
                        c + 1,
                        s,
                        self.geometry.sphere.thetas[w],
                        self.geometry.sphere.phis[w],
                        self.values[[c, i, w]]
                    )?;
                }
            }
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}
