//! Kirchhoff (spherical-means) evaluation of the free wave with data
//! (φ, ψ): u₀ = ∂_t(t M_t[φ]) + t M_t[ψ], where M_t[h](x) is the mean of
//! h over the sphere of radius t centered at x.
//!
//! The mean is integrated over the cap where the sphere meets the data
//! support, parametrized in μ = x̂·n; this keeps the rule accurate when
//! t ≫ R and the cap is tiny.

use super::data::InitialData;
use crate::quad::gauss_legendre_interval;

#[derive(Debug, Clone, Copy)]
pub struct KirchhoffValue {
    pub u0: f64,
    /// (∂_t u₀, ∂_1 u₀, ∂_2 u₀, ∂_3 u₀).
    pub du0: [f64; 4],
}

const N_MU: usize = 48;
const N_ALPHA: usize = 32;

/// Evaluate the free solution and its first derivatives at (t, x).
/// Profile-level: the data's ε factor is not applied.
pub fn kirchhoff_eval(data: &InitialData, t: f64, x: [f64; 3]) -> KirchhoffValue {
    assert!(t >= 0.0, "kirchhoff_eval requires t ≥ 0");
    if t < 1e-9 {
        let g = data.grad_phi_at(x);
        return KirchhoffValue {
            u0: data.phi_at(x),
            du0: [data.psi_at(x), g[0], g[1], g[2]],
        };
    }
    let r_supp = data.support_radius;
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();

    // Cap of directions n with |x + t n| ≤ R.
    let (mu_lo, mu_hi) = if r < 1e-9 {
        if t <= r_supp {
            (-1.0, 1.0)
        } else {
            return KirchhoffValue { u0: 0.0, du0: [0.0; 4] };
        }
    } else {
        let mu_max = (r_supp * r_supp - r * r - t * t) / (2.0 * r * t);
        if mu_max <= -1.0 {
            return KirchhoffValue { u0: 0.0, du0: [0.0; 4] };
        }
        (-1.0, mu_max.min(1.0))
    };

    let xhat = if r < 1e-9 { [0.0, 0.0, 1.0] } else { [x[0] / r, x[1] / r, x[2] / r] };
    let (e1, e2) = frame(xhat);
    let (mus, mws) = gauss_legendre_interval(N_MU, mu_lo, mu_hi);
    let dalpha = 2.0 * std::f64::consts::PI / N_ALPHA as f64;

    // Accumulated means: M[φ], M[ψ], M[∇φ·n], M[∇ψ·n], M[Δφ],
    // M[∂_jφ], M[∂_jψ], M[(Hess φ · n)_j].
    let mut m_phi = 0.0;
    let mut m_psi = 0.0;
    let mut m_gphi_n = 0.0;
    let mut m_gpsi_n = 0.0;
    let mut m_lap_phi = 0.0;
    let mut m_dphi = [0.0; 3];
    let mut m_dpsi = [0.0; 3];
    let mut m_hess_n = [0.0; 3];

    for (mu, mw) in mus.iter().zip(&mws) {
        let s = (1.0 - mu * mu).max(0.0).sqrt();
        for ia in 0..N_ALPHA {
            let alpha = (ia as f64 + 0.5) * dalpha;
            let (ca, sa) = (alpha.cos(), alpha.sin());
            let n = [
                mu * xhat[0] + s * (ca * e1[0] + sa * e2[0]),
                mu * xhat[1] + s * (ca * e1[1] + sa * e2[1]),
                mu * xhat[2] + s * (ca * e1[2] + sa * e2[2]),
            ];
            let y = [x[0] + t * n[0], x[1] + t * n[1], x[2] + t * n[2]];
            let w = mw * dalpha / (4.0 * std::f64::consts::PI);

            let gphi = data.grad_phi_at(y);
            let gpsi = data.grad_psi_at(y);
            m_phi += w * data.phi_at(y);
            m_psi += w * data.psi_at(y);
            m_gphi_n += w * (gphi[0] * n[0] + gphi[1] * n[1] + gphi[2] * n[2]);
            m_gpsi_n += w * (gpsi[0] * n[0] + gpsi[1] * n[1] + gpsi[2] * n[2]);
            m_lap_phi += w * data.lap_phi_at(y);
            let hn = hessian_dot_n(data, y, n);
            for j in 0..3 {
                m_dphi[j] += w * gphi[j];
                m_dpsi[j] += w * gpsi[j];
                m_hess_n[j] += w * hn[j];
            }
        }
    }

    let u0 = m_phi + t * m_gphi_n + t * m_psi;
    let dt = m_psi + t * m_gpsi_n + t * m_lap_phi;
    let dx = [
        m_dphi[0] + t * m_hess_n[0] + t * m_dpsi[0],
        m_dphi[1] + t * m_hess_n[1] + t * m_dpsi[1],
        m_dphi[2] + t * m_hess_n[2] + t * m_dpsi[2],
    ];
    KirchhoffValue { u0, du0: [dt, dx[0], dx[1], dx[2]] }
}

fn frame(w: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let pick = if w[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let mut e1 = [
        w[1] * pick[2] - w[2] * pick[1],
        w[2] * pick[0] - w[0] * pick[2],
        w[0] * pick[1] - w[1] * pick[0],
    ];
    let n = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    for c in &mut e1 {
        *c /= n;
    }
    let e2 = [
        w[1] * e1[2] - w[2] * e1[1],
        w[2] * e1[0] - w[0] * e1[2],
        w[0] * e1[1] - w[1] * e1[0],
    ];
    (e1, e2)
}

/// (Hess φ(y))·n. For radial φ the Hessian is
/// φ'' ŷŷᵀ + (φ'/|y|)(I − ŷŷᵀ).
fn hessian_dot_n(data: &InitialData, y: [f64; 3], n: [f64; 3]) -> [f64; 3] {
    match data.radial_profiles() {
        Some((phi, _)) => {
            let rho = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
            if rho < 1e-9 {
                let d2 = phi.deriv2(0.0);
                return [d2 * n[0], d2 * n[1], d2 * n[2]];
            }
            let yhat = [y[0] / rho, y[1] / rho, y[2] / rho];
            let yn = yhat[0] * n[0] + yhat[1] * n[1] + yhat[2] * n[2];
            let d2 = phi.deriv2(rho);
            let d1r = phi.deriv(rho) / rho;
            [
                d2 * yn * yhat[0] + d1r * (n[0] - yn * yhat[0]),
                d2 * yn * yhat[1] + d1r * (n[1] - yn * yhat[1]),
                d2 * yn * yhat[2] + d1r * (n[2] - yn * yhat[2]),
            ]
        }
        None => {
            // Directional difference of the interpolated gradient.
            let d = 1e-4;
            let yp = [y[0] + d * n[0], y[1] + d * n[1], y[2] + d * n[2]];
            let ym = [y[0] - d * n[0], y[1] - d * n[1], y[2] - d * n[2]];
            let gp = data.grad_phi_at(yp);
            let gm = data.grad_phi_at(ym);
            [
                (gp[0] - gm[0]) / (2.0 * d),
                (gp[1] - gm[1]) / (2.0 * d),
                (gp[2] - gm[2]) / (2.0 * d),
            ]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radiation::{InitialData, RadialProfile};
    use approx::assert_relative_eq;

    fn bump_data() -> InitialData {
        InitialData::radial(
            RadialProfile::bump_poly(vec![1.0, -0.5], 1.5),
            RadialProfile::bump_poly(vec![0.6, 0.2], 1.5),
            1.0,
        )
    }

    #[test]
    fn initial_values_at_t_zero() {
        let d = bump_data();
        let v = kirchhoff_eval(&d, 0.0, [0.3, -0.2, 0.1]);
        assert_relative_eq!(v.u0, d.phi_at([0.3, -0.2, 0.1]), epsilon = 1e-12);
        assert_relative_eq!(v.du0[0], d.psi_at([0.3, -0.2, 0.1]), epsilon = 1e-12);
    }

    #[test]
    fn huygens_vanishing_outside_shell() {
        let d = bump_data();
        let peak = 1.0;
        // |r − t| ≥ R on both sides of the light cone.
        for (t, r) in [(5.0, 1.0), (5.0, 9.0), (10.0, 5.0), (3.0, 8.0)] {
            let v = kirchhoff_eval(&d, t, [r, 0.0, 0.0]);
            assert!(v.u0.abs() < 1e-10 * peak, "u0 = {} at t={t}, r={r}", v.u0);
            for a in 0..4 {
                assert!(v.du0[a].abs() < 1e-10 * peak);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let d = bump_data();
        let t = 2.0;
        let x = [1.3, 0.4, -0.6];
        let v = kirchhoff_eval(&d, t, x);
        let h = 1e-4;
        let fd_t = (kirchhoff_eval(&d, t + h, x).u0 - kirchhoff_eval(&d, t - h, x).u0) / (2.0 * h);
        // Agreement at the quadrature-noise level of the moving-cap rule.
        assert_relative_eq!(v.du0[0], fd_t, epsilon = 5e-5, max_relative = 5e-4);
        for j in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let fd = (kirchhoff_eval(&d, t, xp).u0 - kirchhoff_eval(&d, t, xm).u0) / (2.0 * h);
            assert_relative_eq!(v.du0[j + 1], fd, epsilon = 5e-5, max_relative = 5e-4);
        }
    }

    #[test]
    fn satisfies_wave_equation_via_finite_differences() {
        let d = bump_data();
        let t = 1.7;
        let x = [0.9, -0.3, 0.5];
        let h = 1e-3;
        let u = |t: f64, x: [f64; 3]| kirchhoff_eval(&d, t, x).u0;
        let utt = (u(t + h, x) - 2.0 * u(t, x) + u(t - h, x)) / (h * h);
        let mut lap = 0.0;
        for j in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            lap += (u(t, xp) - 2.0 * u(t, x) + u(t, xm)) / (h * h);
        }
        assert!((utt - lap).abs() < 2e-4, "□u residual {}", utt - lap);
    }

    #[test]
    fn radiation_field_limit_along_ray() {
        // |r·u₀(t, rω) − ℱ₀(r−t, ω)| ≤ C/t: the decay rate fitted over
        // t ∈ [10, 80] must be ≈ −1. All five FriedAsymp quantities enter.
        let d = bump_data();
        let sigma = 0.5;
        let omega = [0.6, 0.64, 0.48];
        let (f0, df0) = crate::radiation::friedlander_radial(&d, sigma).unwrap();
        let w4 = [-1.0, omega[0], omega[1], omega[2]];
        let mut logs: Vec<(f64, f64)> = Vec::new();
        let mut t = 10.0;
        while t <= 80.0 {
            let r = t + sigma;
            let x = [r * omega[0], r * omega[1], r * omega[2]];
            let v = kirchhoff_eval(&d, t, x);
            let mut resid = (r * v.u0 - f0).abs();
            for a in 0..4 {
                resid += (r * v.du0[a] - w4[a] * df0).abs();
            }
            logs.push((t.ln(), resid.max(1e-300).ln()));
            t *= 1.3;
        }
        let slope = fit_slope(&logs);
        assert!((slope + 1.0).abs() < 0.2, "fitted decay rate {slope}");
    }

    fn fit_slope(pts: &[(f64, f64)]) -> f64 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    }
}
