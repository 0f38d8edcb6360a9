//! Initial data: radial closed-form profiles, grid-sampled data, the
//! smooth bump machinery, the prescribed-radiation-field constructor, and
//! the H₀ data norm.

use crate::error::{argument, Error, Result};
use crate::quad::adaptive_simpson;
use serde::Deserialize;
use std::sync::Arc;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A smooth radial profile s ↦ f(s) with its first (and optionally
/// second) derivative and a compact support radius.
#[derive(Clone)]
pub struct RadialProfile {
    f: ScalarFn,
    d1: ScalarFn,
    d2: Option<ScalarFn>,
    support: f64,
}

impl std::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProfile").field("support", &self.support).finish_non_exhaustive()
    }
}

/// exp(−1/s) for s > 0, extended by 0; with first and second derivatives.
fn mollifier_e(s: f64) -> (f64, f64, f64) {
    if s <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let e = (-1.0 / s).exp();
    let e1 = e / (s * s);
    let e2 = e * (1.0 / (s * s * s * s) - 2.0 / (s * s * s));
    (e, e1, e2)
}

/// Smooth step q: 0 for s ≤ 0, 1 for s ≥ 1, with derivatives.
fn smooth_step(s: f64) -> (f64, f64, f64) {
    if s <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if s >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let (u, u1, u2) = mollifier_e(s);
    let (v, vneg1, vneg2) = mollifier_e(1.0 - s);
    let v1 = -vneg1;
    let v2 = vneg2;
    let d = u + v;
    let q = u / d;
    let num1 = u1 * v - u * v1;
    let q1 = num1 / (d * d);
    let q2 = (u2 * v - u * v2) / (d * d) - 2.0 * num1 * (u1 + v1) / (d * d * d);
    (q, q1, q2)
}

/// C∞ bump χ: 1 on [−½, ½], 0 outside [−1, 1], with derivatives.
pub fn bump_chi(t: f64) -> (f64, f64, f64) {
    let a = t.abs();
    if a >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let (q, q1, q2) = smooth_step(2.0 - 2.0 * a);
    let sgn = if t >= 0.0 { 1.0 } else { -1.0 };
    (q, -2.0 * sgn * q1, 4.0 * q2)
}

impl RadialProfile {
    pub fn zero() -> Self {
        RadialProfile {
            f: Arc::new(|_| 0.0),
            d1: Arc::new(|_| 0.0),
            d2: Some(Arc::new(|_| 0.0)),
            support: 0.0,
        }
    }

    /// P(s²)·χ(s/R) for a polynomial P in s² (even, hence smooth at the
    /// origin). The bump factor is 1 for s ≤ R/2 and 0 beyond R.
    pub fn bump_poly(coeffs: Vec<f64>, radius: f64) -> Self {
        assert!(radius > 0.0);
        let p = move |z: f64| -> (f64, f64, f64) {
            let mut v = 0.0;
            let mut d = 0.0;
            let mut dd = 0.0;
            for (i, c) in coeffs.iter().enumerate() {
                let i_f = i as f64;
                v += c * z.powi(i as i32);
                if i >= 1 {
                    d += c * i_f * z.powi(i as i32 - 1);
                }
                if i >= 2 {
                    dd += c * i_f * (i_f - 1.0) * z.powi(i as i32 - 2);
                }
            }
            (v, d, dd)
        };
        let p2 = p.clone();
        let p3 = p.clone();
        let r1 = radius;
        let r2 = radius;
        let r3 = radius;
        RadialProfile {
            f: Arc::new(move |s| {
                let (b, _, _) = bump_chi(s / r1);
                p(s * s).0 * b
            }),
            d1: Arc::new(move |s| {
                let (b, b1, _) = bump_chi(s / r2);
                let (pv, pd, _) = p2(s * s);
                2.0 * s * pd * b + pv * b1 / r2
            }),
            d2: Some(Arc::new(move |s| {
                let (b, b1, b2) = bump_chi(s / r3);
                let (pv, pd, pdd) = p3(s * s);
                2.0 * pd * b + 4.0 * s * s * pdd * b + 4.0 * s * pd * b1 / r3
                    + pv * b2 / (r3 * r3)
            })),
            support: radius,
        }
    }

    /// amp·(1 − (s/R)²)⁴ under the usual bump cutoff: a low-wavenumber
    /// profile that the solver resolves well at desk spacings.
    pub fn quartic_bump(amp: f64, radius: f64) -> Self {
        let r2 = radius * radius;
        Self::bump_poly(
            vec![
                amp,
                -4.0 * amp / r2,
                6.0 * amp / (r2 * r2),
                -4.0 * amp / (r2 * r2 * r2),
                amp / (r2 * r2 * r2 * r2),
            ],
            radius,
        )
    }

    /// Natural cubic spline through (s_i, v_i), zero outside the knot range.
    pub fn spline(s: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if s.len() != v.len() || s.len() < 3 {
            return Err(argument("spline: need at least 3 matching knots"));
        }
        for w in s.windows(2) {
            if w[1] <= w[0] {
                return Err(argument("spline: knots must be strictly increasing"));
            }
        }
        let spline = CubicSpline::natural(&s, &v);
        let support = *s.last().unwrap();
        let sp1 = spline.clone();
        let sp2 = spline.clone();
        Ok(RadialProfile {
            f: Arc::new(move |x| spline.eval(x)),
            d1: Arc::new(move |x| sp1.eval_d1(x)),
            d2: Some(Arc::new(move |x| sp2.eval_d2(x))),
            support,
        })
    }

    pub fn from_closures(f: ScalarFn, d1: ScalarFn, d2: Option<ScalarFn>, support: f64) -> Self {
        RadialProfile { f, d1, d2, support }
    }

    pub fn value(&self, s: f64) -> f64 {
        (self.f)(s)
    }

    pub fn deriv(&self, s: f64) -> f64 {
        (self.d1)(s)
    }

    /// Second derivative; falls back to a centered difference of `deriv`.
    pub fn deriv2(&self, s: f64) -> f64 {
        match &self.d2 {
            Some(d2) => d2(s),
            None => {
                let h = 1e-5;
                ((self.d1)(s + h) - (self.d1)(s - h)) / (2.0 * h)
            }
        }
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn is_zero(&self) -> bool {
        self.support == 0.0
    }
}

#[derive(Clone)]
struct CubicSpline {
    s: Vec<f64>,
    v: Vec<f64>,
    m: Vec<f64>, // second derivatives at the knots
}

impl CubicSpline {
    fn natural(s: &[f64], v: &[f64]) -> Arc<CubicSpline> {
        let n = s.len();
        // Tridiagonal system for the interior second derivatives.
        let mut a = vec![0.0; n];
        let b = vec![2.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let hm = s[i] - s[i - 1];
            let hp = s[i + 1] - s[i];
            a[i] = hm / (hm + hp);
            c[i] = hp / (hm + hp);
            d[i] = 6.0 / (hm + hp) * ((v[i + 1] - v[i]) / hp - (v[i] - v[i - 1]) / hm);
        }
        // Thomas algorithm (natural ends: m₀ = m_{n−1} = 0 via b=2, d=0).
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        cp[0] = c[0] / b[0];
        dp[0] = d[0] / b[0];
        for i in 1..n {
            let denom = b[i] - a[i] * cp[i - 1];
            cp[i] = c[i] / denom;
            dp[i] = (d[i] - a[i] * dp[i - 1]) / denom;
        }
        let mut m = vec![0.0; n];
        m[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = dp[i] - cp[i] * m[i + 1];
        }
        Arc::new(CubicSpline { s: s.to_vec(), v: v.to_vec(), m })
    }

    fn segment(&self, x: f64) -> Option<usize> {
        if x < self.s[0] || x > *self.s.last().unwrap() {
            return None;
        }
        let i = self.s.partition_point(|sk| *sk <= x).saturating_sub(1);
        Some(i.min(self.s.len() - 2))
    }

    fn eval(&self, x: f64) -> f64 {
        let Some(i) = self.segment(x) else { return 0.0 };
        let h = self.s[i + 1] - self.s[i];
        let t0 = self.s[i + 1] - x;
        let t1 = x - self.s[i];
        (self.m[i] * t0.powi(3) + self.m[i + 1] * t1.powi(3)) / (6.0 * h)
            + (self.v[i] / h - self.m[i] * h / 6.0) * t0
            + (self.v[i + 1] / h - self.m[i + 1] * h / 6.0) * t1
    }

    fn eval_d1(&self, x: f64) -> f64 {
        let Some(i) = self.segment(x) else { return 0.0 };
        let h = self.s[i + 1] - self.s[i];
        let t0 = self.s[i + 1] - x;
        let t1 = x - self.s[i];
        (-self.m[i] * t0 * t0 + self.m[i + 1] * t1 * t1) / (2.0 * h)
            - (self.v[i] / h - self.m[i] * h / 6.0)
            + (self.v[i + 1] / h - self.m[i + 1] * h / 6.0)
    }

    fn eval_d2(&self, x: f64) -> f64 {
        let Some(i) = self.segment(x) else { return 0.0 };
        let h = self.s[i + 1] - self.s[i];
        (self.m[i] * (self.s[i + 1] - x) + self.m[i + 1] * (x - self.s[i])) / h
    }
}

/// One component of initial data (u, ∂_t u) = (ε φ, ε ψ) at t = 0.
#[derive(Debug, Clone)]
pub enum InitialDataKind {
    RadialClosedForm { phi: RadialProfile, psi: RadialProfile },
    /// Samples of (f, g) on the solver cube [−l, l]³ with n nodes per axis.
    GridSampled { f: Vec<f64>, g: Vec<f64>, n: usize, h: f64, l: f64 },
}

#[derive(Debug, Clone)]
pub struct InitialData {
    pub kind: InitialDataKind,
    /// Amplitude ε multiplying the profile.
    pub eps: f64,
    /// Radius R with data vanishing for |x| ≥ R.
    pub support_radius: f64,
}

impl InitialData {
    pub fn zero() -> Self {
        InitialData {
            kind: InitialDataKind::RadialClosedForm {
                phi: RadialProfile::zero(),
                psi: RadialProfile::zero(),
            },
            eps: 0.0,
            support_radius: 0.0,
        }
    }

    pub fn radial(phi: RadialProfile, psi: RadialProfile, eps: f64) -> Self {
        let support_radius = phi.support().max(psi.support());
        InitialData { kind: InitialDataKind::RadialClosedForm { phi, psi }, eps, support_radius }
    }

    pub fn is_radial(&self) -> bool {
        matches!(self.kind, InitialDataKind::RadialClosedForm { .. })
    }

    pub fn radial_profiles(&self) -> Option<(&RadialProfile, &RadialProfile)> {
        match &self.kind {
            InitialDataKind::RadialClosedForm { phi, psi } => Some((phi, psi)),
            _ => None,
        }
    }

    /// φ(x) (profile, without the ε factor).
    pub fn phi_at(&self, x: [f64; 3]) -> f64 {
        match &self.kind {
            InitialDataKind::RadialClosedForm { phi, .. } => phi.value(norm3(x)),
            InitialDataKind::GridSampled { f, n, h, l, .. } => trilinear(f, *n, *h, *l, x),
        }
    }

    pub fn psi_at(&self, x: [f64; 3]) -> f64 {
        match &self.kind {
            InitialDataKind::RadialClosedForm { psi, .. } => psi.value(norm3(x)),
            InitialDataKind::GridSampled { g, n, h, l, .. } => trilinear(g, *n, *h, *l, x),
        }
    }

    pub fn grad_phi_at(&self, x: [f64; 3]) -> [f64; 3] {
        match &self.kind {
            InitialDataKind::RadialClosedForm { phi, .. } => radial_gradient(phi, x),
            InitialDataKind::GridSampled { f, n, h, l, .. } => grid_gradient(f, *n, *h, *l, x),
        }
    }

    pub fn grad_psi_at(&self, x: [f64; 3]) -> [f64; 3] {
        match &self.kind {
            InitialDataKind::RadialClosedForm { psi, .. } => radial_gradient(psi, x),
            InitialDataKind::GridSampled { g, n, h, l, .. } => grid_gradient(g, *n, *h, *l, x),
        }
    }

    /// Δφ(x).
    pub fn lap_phi_at(&self, x: [f64; 3]) -> f64 {
        match &self.kind {
            InitialDataKind::RadialClosedForm { phi, .. } => {
                let r = norm3(x);
                if r < 1e-8 {
                    3.0 * phi.deriv2(0.0)
                } else {
                    phi.deriv2(r) + 2.0 * phi.deriv(r) / r
                }
            }
            InitialDataKind::GridSampled { f, n, h, l, .. } => grid_laplacian(f, *n, *h, *l, x),
        }
    }
}

fn norm3(x: [f64; 3]) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

fn radial_gradient(p: &RadialProfile, x: [f64; 3]) -> [f64; 3] {
    let r = norm3(x);
    if r < 1e-12 {
        return [0.0; 3];
    }
    let d = p.deriv(r) / r;
    [d * x[0], d * x[1], d * x[2]]
}

fn trilinear(v: &[f64], n: usize, h: f64, l: f64, x: [f64; 3]) -> f64 {
    let idx = |ix: usize, iy: usize, iz: usize| (iz * n + iy) * n + ix;
    let mut c = [0usize; 3];
    let mut t = [0.0f64; 3];
    for d in 0..3 {
        let pos = (x[d] + l) / h;
        if pos < 0.0 || pos > (n - 1) as f64 {
            return 0.0;
        }
        let i = (pos.floor() as usize).min(n - 2);
        c[d] = i;
        t[d] = pos - i as f64;
    }
    let mut acc = 0.0;
    for (dz, wz) in [(0, 1.0 - t[2]), (1, t[2])] {
        for (dy, wy) in [(0, 1.0 - t[1]), (1, t[1])] {
            for (dx, wx) in [(0, 1.0 - t[0]), (1, t[0])] {
                acc += wz * wy * wx * v[idx(c[0] + dx, c[1] + dy, c[2] + dz)];
            }
        }
    }
    acc
}

fn grid_gradient(v: &[f64], n: usize, h: f64, l: f64, x: [f64; 3]) -> [f64; 3] {
    let mut g = [0.0; 3];
    for d in 0..3 {
        let mut xp = x;
        let mut xm = x;
        xp[d] += h;
        xm[d] -= h;
        g[d] = (trilinear(v, n, h, l, xp) - trilinear(v, n, h, l, xm)) / (2.0 * h);
    }
    g
}

fn grid_laplacian(v: &[f64], n: usize, h: f64, l: f64, x: [f64; 3]) -> f64 {
    let c = trilinear(v, n, h, l, x);
    let mut acc = 0.0;
    for d in 0..3 {
        let mut xp = x;
        let mut xm = x;
        xp[d] += h;
        xm[d] -= h;
        acc += trilinear(v, n, h, l, xp) - 2.0 * c + trilinear(v, n, h, l, xm);
    }
    acc / (h * h)
}

/// Data whose radiation field takes prescribed values at σ₀:
/// ℱ₀(σ₀, ω) = α and ∂σℱ₀(σ₀, ω) = β for every ω. Takes φ = 0 and
/// ψ(x) = −|x|⁻¹ ζ′(|x|) for the bump family
/// ζ(s) = (2α + 2 sgn(σ₀) β (s − |σ₀|)) χ((s − |σ₀|)/δ), δ = min(|σ₀|/2, 1).
pub fn make_data_with_prescribed_field(sigma0: f64, alpha: f64, beta: f64) -> Result<InitialData> {
    if sigma0 == 0.0 {
        return Err(argument("prescribed radiation field requires σ₀ ≠ 0"));
    }
    let s0 = sigma0.abs();
    let delta = (s0 / 2.0).min(1.0);
    let a = 2.0 * alpha;
    let b = 2.0 * sigma0.signum() * beta;
    if a == 0.0 && b == 0.0 {
        return Ok(InitialData::zero());
    }
    let support = s0 + delta;

    let zeta_d1 = move |s: f64| -> f64 {
        let tau = (s - s0) / delta;
        let (chi, chi1, _) = bump_chi(tau);
        b * chi + (a + b * (s - s0)) * chi1 / delta
    };
    let zeta_d2 = move |s: f64| -> f64 {
        let tau = (s - s0) / delta;
        let (_, chi1, chi2) = bump_chi(tau);
        2.0 * b * chi1 / delta + (a + b * (s - s0)) * chi2 / (delta * delta)
    };
    // ζ vanishes near s = 0 (support starts at s₀ − δ ≥ s₀/2), so the
    // division by s below stays smooth.
    let psi = RadialProfile::from_closures(
        Arc::new(move |s| if s <= 0.0 { 0.0 } else { -zeta_d1(s) / s }),
        Arc::new(move |s| {
            if s <= 0.0 {
                0.0
            } else {
                -zeta_d2(s) / s + zeta_d1(s) / (s * s)
            }
        }),
        None,
        support,
    );
    Ok(InitialData::radial(RadialProfile::zero(), psi, 1.0))
}

/// The H₀ data norm (½ ∫ |∇φ|² + |ψ|² dx)^{1/2} of the profile pair,
/// without the ε factor.
pub fn h0_norm(data: &InitialData) -> f64 {
    match &data.kind {
        InitialDataKind::RadialClosedForm { phi, psi } => {
            let r = data.support_radius.max(phi.support()).max(psi.support());
            if r == 0.0 {
                return 0.0;
            }
            let integrand = |s: f64| {
                let dphi = phi.deriv(s);
                let pv = psi.value(s);
                (dphi * dphi + pv * pv) * s * s
            };
            let integral = adaptive_simpson(&integrand, 0.0, r, 1e-12);
            (0.5 * 4.0 * std::f64::consts::PI * integral).sqrt()
        }
        InitialDataKind::GridSampled { f, g, n, h, .. } => {
            let idx = |ix: usize, iy: usize, iz: usize| (iz * n + iy) * n + ix;
            let mut acc = 0.0;
            for iz in 1..n - 1 {
                for iy in 1..n - 1 {
                    for ix in 1..n - 1 {
                        let gx = (f[idx(ix + 1, iy, iz)] - f[idx(ix - 1, iy, iz)]) / (2.0 * h);
                        let gy = (f[idx(ix, iy + 1, iz)] - f[idx(ix, iy - 1, iz)]) / (2.0 * h);
                        let gz = (f[idx(ix, iy, iz + 1)] - f[idx(ix, iy, iz - 1)]) / (2.0 * h);
                        let gv = g[idx(ix, iy, iz)];
                        acc += gx * gx + gy * gy + gz * gz + gv * gv;
                    }
                }
            }
            (0.5 * acc * h * h * h).sqrt()
        }
    }
}

/// JSON specification of one initial-data component.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSpec {
    Zero,
    Prescribed {
        sigma0: f64,
        alpha: f64,
        beta: f64,
        #[serde(default = "default_eps")]
        eps: f64,
        /// Declared support radius; may exceed the natural one to give the
        /// solver's causal-support check headroom.
        #[serde(default)]
        support_radius: Option<f64>,
    },
    Radial {
        #[serde(default)]
        phi: Option<ProfileSpec>,
        #[serde(default)]
        psi: Option<ProfileSpec>,
        #[serde(default = "default_eps")]
        eps: f64,
        #[serde(default)]
        support_radius: Option<f64>,
    },
}

fn default_eps() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProfileSpec {
    Zero,
    BumpPoly { coeffs: Vec<f64>, radius: f64 },
    QuarticBump { amp: f64, radius: f64 },
    Spline { s: Vec<f64>, v: Vec<f64> },
}

impl ProfileSpec {
    pub fn build(&self) -> Result<RadialProfile> {
        match self {
            ProfileSpec::Zero => Ok(RadialProfile::zero()),
            ProfileSpec::BumpPoly { coeffs, radius } => {
                if *radius <= 0.0 {
                    return Err(Error::Spec("profile radius must be positive".into()));
                }
                Ok(RadialProfile::bump_poly(coeffs.clone(), *radius))
            }
            ProfileSpec::QuarticBump { amp, radius } => {
                if *radius <= 0.0 {
                    return Err(Error::Spec("profile radius must be positive".into()));
                }
                Ok(RadialProfile::quartic_bump(*amp, *radius))
            }
            ProfileSpec::Spline { s, v } => RadialProfile::spline(s.clone(), v.clone()),
        }
    }
}

impl DataSpec {
    pub fn build(&self) -> Result<InitialData> {
        match self {
            DataSpec::Zero => Ok(InitialData::zero()),
            DataSpec::Prescribed { sigma0, alpha, beta, eps, support_radius } => {
                let mut d = make_data_with_prescribed_field(*sigma0, *alpha, *beta)?;
                d.eps = *eps;
                apply_declared_support(&mut d, *support_radius)?;
                Ok(d)
            }
            DataSpec::Radial { phi, psi, eps, support_radius } => {
                let phi = match phi {
                    Some(p) => p.build()?,
                    None => RadialProfile::zero(),
                };
                let psi = match psi {
                    Some(p) => p.build()?,
                    None => RadialProfile::zero(),
                };
                let mut d = InitialData::radial(phi, psi, 1.0);
                d.eps = *eps;
                apply_declared_support(&mut d, *support_radius)?;
                Ok(d)
            }
        }
    }
}

fn apply_declared_support(d: &mut InitialData, declared: Option<f64>) -> Result<()> {
    if let Some(r) = declared {
        if r < d.support_radius {
            return Err(Error::Spec(format!(
                "declared support radius {r} is smaller than the profile support {}",
                d.support_radius
            )));
        }
        d.support_radius = r;
    }
    Ok(())
}
