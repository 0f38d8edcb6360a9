//! Verification of the Alinhac factorization data for a gradient
//! nonlinearity: F^red(ω, Y) = M(ω, Y) β(ω) = Σ_l g_{jl}(ω, Y) h_l(ω, Y)
//! with h_l(ω, β(ω)) = 0.

use super::QuadraticNonlinearity;
use crate::error::{argument, Result};
use crate::quad::HaltonSampler;
use ndarray::{Array2, Array3};
use std::sync::Arc;

pub type SphereMatrixFn = Arc<dyn Fn([f64; 3]) -> Array2<f64> + Send + Sync>;
pub type SphereTensorFn = Arc<dyn Fn([f64; 3]) -> Array3<f64> + Send + Sync>;
pub type SphereVectorFn = Arc<dyn Fn([f64; 3]) -> Vec<f64> + Send + Sync>;

/// The (M, β, g, h) factorization data of the Alinhac condition, plus the
/// derived matrix H(ω) with entries Σ_a h_{l,ka} ω_a.
#[derive(Clone)]
pub struct AlinhacData {
    /// Number of h-forms N₀.
    pub n0: usize,
    /// g(ω)[j][l][k]: coefficient of Y_k in g_{jl}(ω, Y).
    pub g: SphereTensorFn,
    /// h_const[l][k][a]: the real constants h_{l,ka} of
    /// h_l(ω, Y) = Σ_{a,k} h_{l,ka} ω_a Y_k  (ω₀ = −1).
    pub h_const: Array3<f64>,
    /// β(ω) ∈ R^N.
    pub beta: SphereVectorFn,
    /// m(ω): symmetric matrix of the quadratic form M(ω, Y) = Yᵀ m(ω) Y.
    pub m: SphereMatrixFn,
}

impl AlinhacData {
    /// Trivial data (M ≡ 0, g ≡ 0, h ≡ 0) for a null-condition system;
    /// β is an arbitrary constant unit vector.
    pub fn trivial(n: usize) -> Self {
        let mut beta0 = vec![0.0; n];
        if n > 0 {
            beta0[0] = 1.0;
        }
        AlinhacData {
            n0: 1,
            g: Arc::new(move |_| Array3::zeros((n, 1, n))),
            h_const: Array3::zeros((1, n, 4)),
            beta: Arc::new(move |_| beta0.clone()),
            m: Arc::new(move |_| Array2::zeros((n, n))),
        }
    }

    /// h_l(ω, Y) for all l.
    pub fn eval_h(&self, omega: [f64; 3], y: &[f64]) -> Vec<f64> {
        let w4 = [-1.0, omega[0], omega[1], omega[2]];
        let (n0, n, _) = self.h_const.dim();
        (0..n0)
            .map(|l| {
                let mut acc = 0.0;
                for k in 0..n {
                    for a in 0..4 {
                        acc += self.h_const[[l, k, a]] * w4[a] * y[k];
                    }
                }
                acc
            })
            .collect()
    }

    /// The matrix H(ω) with H_{lk} = Σ_a h_{l,ka} ω_a, so that
    /// (h_l(ω,Y))_l = H(ω)·Y.
    pub fn h_matrix(&self, omega: [f64; 3]) -> Array2<f64> {
        let w4 = [-1.0, omega[0], omega[1], omega[2]];
        let (n0, n, _) = self.h_const.dim();
        let mut h = Array2::zeros((n0, n));
        for l in 0..n0 {
            for k in 0..n {
                for a in 0..4 {
                    h[[l, k]] += self.h_const[[l, k, a]] * w4[a];
                }
            }
        }
        h
    }
}

impl std::fmt::Debug for AlinhacData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AlinhacData").field("n0", &self.n0).finish_non_exhaustive()
    }
}

/// Maximum residuals of the three factorization identities over a
/// quasi-random sample of (ω, Y).
#[derive(Debug, Clone, serde::Serialize)]
pub struct AlinhacReport {
    /// max |F^red − M β| (rank-one identity).
    pub residual_rank_one: f64,
    /// max |F^red − Σ_l g_{jl} h_l| (bilinear factorization).
    pub residual_factorization: f64,
    /// max |h_l(ω, β(ω))| (kernel identity).
    pub residual_kernel: f64,
    pub samples: usize,
    /// True if β(ω) vanished at a sampled ω where F^red(ω,·) does not;
    /// the data is accepted but flagged.
    pub degenerate_beta: bool,
}

impl AlinhacReport {
    pub fn max_residual(&self) -> f64 {
        self.residual_rank_one.max(self.residual_factorization).max(self.residual_kernel)
    }
}

/// Check the factorization identities on `samples` quasi-random (ω, Y)
/// pairs drawn from a fixed-seed low-discrepancy sequence.
pub fn verify_alinhac(
    f: &QuadraticNonlinearity,
    data: &AlinhacData,
    samples: usize,
) -> Result<AlinhacReport> {
    verify_alinhac_seeded(f, data, samples, 0)
}

pub fn verify_alinhac_seeded(
    f: &QuadraticNonlinearity,
    data: &AlinhacData,
    samples: usize,
    seed: u64,
) -> Result<AlinhacReport> {
    if !f.is_gradient_only() {
        return Err(argument("verify_alinhac requires a nonlinearity depending on ∂u only"));
    }
    let n = f.n_total();
    let mut sampler = HaltonSampler::new(seed);
    let mut r1 = 0.0f64;
    let mut r2 = 0.0f64;
    let mut r3 = 0.0f64;
    let mut degenerate = false;
    let mut fred = vec![0.0; n];
    let x = vec![0.0; n];
    for _ in 0..samples {
        let pt = sampler.next_point(2 + n);
        let omega = HaltonSampler::unit_from_uv(pt[0], pt[1]);
        let y: Vec<f64> = pt[2..].iter().map(|u| 2.0 * u - 1.0).collect();

        f.eval_reduced_into(omega, &x, &y, &mut fred);
        let beta = (data.beta)(omega);
        let g = (data.g)(omega);
        let m = (data.m)(omega);
        let h = data.eval_h(omega, &y);

        // M(ω, Y) = Yᵀ m Y.
        let mut mval = 0.0;
        for k in 0..n {
            for l in 0..n {
                mval += y[k] * m[[k, l]] * y[l];
            }
        }
        for j in 0..n {
            r1 = r1.max((fred[j] - mval * beta[j]).abs());
            let mut gh = 0.0;
            for l in 0..data.n0 {
                let mut gjl = 0.0;
                for k in 0..n {
                    gjl += g[[j, l, k]] * y[k];
                }
                gh += gjl * h[l];
            }
            r2 = r2.max((fred[j] - gh).abs());
        }
        let hb = data.eval_h(omega, &beta);
        for v in &hb {
            r3 = r3.max(v.abs());
        }

        let beta_norm: f64 = beta.iter().map(|b| b * b).sum::<f64>().sqrt();
        let fred_norm: f64 = fred.iter().map(|v| v * v).sum::<f64>().sqrt();
        if beta_norm < 1e-14 && fred_norm > 1e-12 {
            degenerate = true;
        }
    }
    Ok(AlinhacReport {
        residual_rank_one: r1,
        residual_factorization: r2,
        residual_kernel: r3,
        samples,
        degenerate_beta: degenerate,
    })
}
