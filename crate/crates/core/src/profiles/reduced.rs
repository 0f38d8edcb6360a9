//! The reduced characteristic system −2 ∂τ∂σU = F^red(ω, U, ∂σU),
//! integrated as a method-of-lines ODE for P = ∂σU with classical RK4,
//! and the characteristic-limit construction Φ = φ(t₁) + ∫ h dτ.

use crate::algebra::QuadraticNonlinearity;
use crate::error::{argument, Result};
use crate::radiation::ProfileGrid;
use rayon::prelude::*;

/// Threshold on max |P| past which a trajectory counts as blown up.
pub const BLOWUP_THRESHOLD: f64 = 1e8;

#[derive(Debug, Clone)]
pub struct ReducedSolution {
    /// U at the final time (per ω slice, frozen at blow-up where it occurred).
    pub u: ProfileGrid,
    /// P = ∂σU at the final time.
    pub p: ProfileGrid,
    /// Earliest blow-up slow time τ* across ω slices, when any blew up.
    pub blowup: Option<f64>,
    pub tau_end: f64,
}

struct SliceOutcome {
    p: Vec<Vec<f64>>,
    u: Vec<Vec<f64>>,
    blowup: Option<f64>,
}

/// Evolve P by ∂τP_j = −½ F_j^red(ω, U, P) with U recovered from P by
/// trapezoidal integration from σ_max (U(σ_max) = 0) at every RK4 stage.
///
/// Blow-up (|P| > 1e8 or non-finite values) is data, not an error: the
/// crossing time is refined by bisection to 1e-3 relative and reported.
pub fn integrate_reduced_system(
    f: &QuadraticNonlinearity,
    p0: &ProfileGrid,
    u0: &ProfileGrid,
    tau_end: f64,
    dtau: f64,
) -> Result<ReducedSolution> {
    if dtau <= 0.0 || tau_end < 0.0 {
        return Err(argument("integrate_reduced_system: need dτ > 0 and τ_end ≥ 0"));
    }
    let n = f.n_total();
    if p0.components() != n || u0.components() != n {
        return Err(argument(format!(
            "integrate_reduced_system: profiles have {} / {} components, system has {n}",
            p0.components(),
            u0.components()
        )));
    }
    let ns = p0.geometry.n_sigma;
    let nw = p0.geometry.sphere.len();
    if u0.geometry.n_sigma != ns || u0.geometry.sphere.len() != nw {
        return Err(argument("integrate_reduced_system: U0 and P0 grids differ"));
    }
    // Consistency of U0 with −∫_σ^∞ P0.
    let ds = p0.geometry.dsigma();
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    for w in 0..nw {
        for c in 0..n {
            let p_line: Vec<f64> = (0..ns).map(|i| p0.values[[c, i, w]]).collect();
            let u_line = integrate_u_line(&p_line, ds);
            for i in 0..ns {
                worst = worst.max((u_line[i] - u0.values[[c, i, w]]).abs());
                scale = scale.max(u0.values[[c, i, w]].abs());
            }
        }
    }
    if worst > 3e-2 * scale {
        return Err(argument(format!(
            "U0 is not consistent with −∫_σ^∞ P0 (max deviation {worst:.3e}, scale {scale:.3e})"
        )));
    }

    let compiled = f.compile();
    let steps = (tau_end / dtau).ceil() as usize;
    let outcomes: Vec<SliceOutcome> = (0..nw)
        .into_par_iter()
        .map(|w| {
            let omega = p0.geometry.sphere.nodes[w];
            let mut p: Vec<Vec<f64>> =
                (0..n).map(|c| (0..ns).map(|i| p0.values[[c, i, w]]).collect()).collect();
            let mut blowup = None;
            let mut tau = 0.0;
            for step in 0..steps {
                let h = dtau.min(tau_end - step as f64 * dtau);
                if h <= 0.0 {
                    break;
                }
                let saved = p.clone();
                rk4_step(&compiled, omega, &mut p, ds, h);
                if exceeded(&p) {
                    let t_star = refine_blowup(&compiled, omega, &saved, ds, tau, h);
                    blowup = Some(t_star);
                    p = saved;
                    break;
                }
                tau += h;
            }
            let u = (0..n).map(|c| integrate_u_line(&p[c], ds)).collect();
            SliceOutcome { p, u, blowup }
        })
        .collect();

    let mut p_out = ProfileGrid::zeros(p0.geometry.clone(), n);
    let mut u_out = ProfileGrid::zeros(p0.geometry.clone(), n);
    let mut blowup: Option<f64> = None;
    for (w, s) in outcomes.iter().enumerate() {
        for c in 0..n {
            for i in 0..ns {
                p_out.values[[c, i, w]] = s.p[c][i];
                u_out.values[[c, i, w]] = s.u[c][i];
            }
        }
        if let Some(t) = s.blowup {
            blowup = Some(match blowup {
                Some(prev) => prev.min(t),
                None => t,
            });
        }
    }
    Ok(ReducedSolution { u: u_out, p: p_out, blowup, tau_end })
}

/// U(σ_i) = −∫_{σ_i}^{σ_max} P, trapezoidal, U(σ_max) = 0.
fn integrate_u_line(p: &[f64], ds: f64) -> Vec<f64> {
    let ns = p.len();
    let mut u = vec![0.0; ns];
    for i in (0..ns - 1).rev() {
        u[i] = u[i + 1] - 0.5 * ds * (p[i] + p[i + 1]);
    }
    u
}

fn exceeded(p: &[Vec<f64>]) -> bool {
    p.iter().flatten().any(|v| !v.is_finite() || v.abs() > BLOWUP_THRESHOLD)
}

fn rhs(
    f: &crate::algebra::CompiledNonlinearity,
    omega: [f64; 3],
    p: &[Vec<f64>],
    ds: f64,
    out: &mut [Vec<f64>],
) {
    let n = p.len();
    let ns = p[0].len();
    let w4 = [-1.0, omega[0], omega[1], omega[2]];
    let u: Vec<Vec<f64>> = (0..n).map(|c| integrate_u_line(&p[c], ds)).collect();
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    for i in 0..ns {
        for c in 0..n {
            x[c] = u[c][i];
            y[c] = p[c][i];
        }
        for c in 0..n {
            out[c][i] = -0.5 * f.eval_reduced_component(c, &w4, &x, &y);
        }
    }
}

fn rk4_step(
    f: &crate::algebra::CompiledNonlinearity,
    omega: [f64; 3],
    p: &mut [Vec<f64>],
    ds: f64,
    h: f64,
) {
    let n = p.len();
    let ns = p[0].len();
    let zeros = || vec![vec![0.0; ns]; n];
    let mut k1 = zeros();
    let mut k2 = zeros();
    let mut k3 = zeros();
    let mut k4 = zeros();
    let mut tmp = zeros();

    rhs(f, omega, p, ds, &mut k1);
    stage(&mut tmp, p, &k1, 0.5 * h);
    rhs(f, omega, &tmp, ds, &mut k2);
    stage(&mut tmp, p, &k2, 0.5 * h);
    rhs(f, omega, &tmp, ds, &mut k3);
    stage(&mut tmp, p, &k3, h);
    rhs(f, omega, &tmp, ds, &mut k4);
    for c in 0..n {
        for i in 0..ns {
            p[c][i] += h / 6.0 * (k1[c][i] + 2.0 * k2[c][i] + 2.0 * k3[c][i] + k4[c][i]);
        }
    }
}

fn stage(dst: &mut [Vec<f64>], base: &[Vec<f64>], k: &[Vec<f64>], h: f64) {
    for (d, (b, kk)) in dst.iter_mut().zip(base.iter().zip(k)) {
        for i in 0..b.len() {
            d[i] = b[i] + h * kk[i];
        }
    }
}

/// Bisect the first threshold crossing inside (tau, tau + h], re-integrating
/// from the saved pre-crossing state, to 1e-3 relative accuracy.
fn refine_blowup(
    f: &crate::algebra::CompiledNonlinearity,
    omega: [f64; 3],
    saved: &[Vec<f64>],
    ds: f64,
    tau: f64,
    h: f64,
) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = h;
    let mut state = saved.to_vec();
    while (hi - lo) > 1e-3 * (tau + hi).max(1e-6) {
        let mid = 0.5 * (lo + hi);
        let mut trial = state.clone();
        rk4_step(f, omega, &mut trial, ds, mid - lo);
        if exceeded(&trial) {
            hi = mid;
        } else {
            state = trial;
            lo = mid;
        }
    }
    tau + hi
}

/// Characteristic limit of φ along the ray r = t + σ from samples of
/// ∂₊φ = h with |h| ≤ C(1 + 2t + σ)^{−μ}, μ > 1:
/// Φ = φ(t_start) + ∫ h dτ (trapezoid) + extrapolated tail.
#[derive(Debug, Clone, Copy)]
pub struct CharacteristicLimit {
    pub value: f64,
    /// Worst-case remainder of the dropped tail per the decay fit.
    pub tail_bound: f64,
}

pub fn characteristic_integrate(
    sigma: f64,
    times: &[f64],
    phi: &[f64],
    h: &[f64],
    mu: f64,
) -> Result<CharacteristicLimit> {
    if mu <= 1.0 {
        return Err(argument("characteristic_integrate: μ ≤ 1 may diverge"));
    }
    if times.len() < 2 || times.len() != phi.len() || times.len() != h.len() {
        return Err(argument("characteristic_integrate: need matching series of length ≥ 2"));
    }
    let t_min = 2.0f64.max(-2.0 * sigma);
    if times[0] < t_min - 1e-9 {
        return Err(argument(format!(
            "characteristic_integrate: samples must start at t ≥ max(2, −2σ) = {t_min}"
        )));
    }
    for w in times.windows(2) {
        if w[1] <= w[0] {
            return Err(argument("characteristic_integrate: times must increase"));
        }
    }
    let mut integral = 0.0;
    for i in 0..times.len() - 1 {
        integral += 0.5 * (times[i + 1] - times[i]) * (h[i] + h[i + 1]);
    }
    // Fitted decay constant: C = max |h|(1+2t+σ)^μ; the signed tail uses
    // the last sample's local constant.
    let weight = |t: f64| (1.0 + 2.0 * t + sigma).powf(mu);
    let c_max = times.iter().zip(h).fold(0.0f64, |m, (t, hv)| m.max(hv.abs() * weight(*t)));
    let t_max = *times.last().unwrap();
    let tail_base = (1.0 + 2.0 * t_max + sigma).powf(-(mu - 1.0)) / (2.0 * (mu - 1.0));
    let c_last = h.last().unwrap() * weight(t_max);
    Ok(CharacteristicLimit {
        value: phi[0] + integral + c_last * tail_base,
        tail_bound: c_max * tail_base,
    })
}
