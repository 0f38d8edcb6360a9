//! Quadrature and sampling primitives shared across the crate:
//! Gauss–Legendre rules, the product sphere rule, adaptive Simpson
//! integration, and a Halton low-discrepancy sampler.

/// Gauss–Legendre nodes and weights on [-1, 1].
///
/// Newton iteration on the Legendre polynomial; accurate to machine
/// precision for the orders used here (n ≤ a few hundred).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th root (descending order).
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gauss_legendre_interval(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        xs.iter().map(|x| mid + half * x).collect(),
        ws.iter().map(|w| w * half).collect(),
    )
}

/// Quadrature rule on the unit sphere S².
///
/// Product rule: Gauss–Legendre in cos θ times uniform nodes in azimuth.
/// Weights sum to 4π exactly (up to roundoff in the GL weights).
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    /// Polar angles of the nodes (for CSV output).
    pub thetas: Vec<f64>,
    /// Azimuthal angles of the nodes.
    pub phis: Vec<f64>,
}

impl SphereQuadrature {
    /// Product rule with `n_polar` GL nodes in cos θ and `n_azimuth`
    /// equispaced azimuthal nodes.
    pub fn product(n_polar: usize, n_azimuth: usize) -> Self {
        let (mus, mws) = gauss_legendre(n_polar);
        let dphi = 2.0 * std::f64::consts::PI / n_azimuth as f64;
        let mut nodes = Vec::with_capacity(n_polar * n_azimuth);
        let mut weights = Vec::with_capacity(n_polar * n_azimuth);
        let mut thetas = Vec::with_capacity(n_polar * n_azimuth);
        let mut phis = Vec::with_capacity(n_polar * n_azimuth);
        for (mu, mw) in mus.iter().zip(&mws) {
            let s = (1.0 - mu * mu).max(0.0).sqrt();
            let theta = mu.acos();
            for ip in 0..n_azimuth {
                let phi = (ip as f64 + 0.5) * dphi;
                nodes.push([s * phi.cos(), s * phi.sin(), *mu]);
                weights.push(mw * dphi);
                thetas.push(theta);
                phis.push(phi);
            }
        }
        SphereQuadrature { nodes, weights, thetas, phis }
    }

    /// Default rule used by the radiation-field grids.
    pub fn default_rule() -> Self {
        Self::product(24, 48)
    }

    /// A single explicit direction list (unit vectors), all weights equal
    /// and summing to 4π. Used for ray-extracted profile grids where the
    /// directions come from a run configuration rather than a rule.
    pub fn from_directions(dirs: Vec<[f64; 3]>) -> Self {
        let n = dirs.len().max(1);
        let w = 4.0 * std::f64::consts::PI / n as f64;
        let thetas = dirs.iter().map(|d| d[2].clamp(-1.0, 1.0).acos()).collect();
        let phis = dirs.iter().map(|d| d[1].atan2(d[0])).collect();
        SphereQuadrature { weights: vec![w; dirs.len()], nodes: dirs, thetas, phis }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Adaptive Simpson integration of `f` over [a, b] to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
        force: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        // Forced splits guard against false convergence on integrands
        // whose support slips between the first few probe points.
        if depth == 0 || (force == 0 && delta.abs() <= 15.0 * tol) {
            left + right + delta / 15.0
        } else {
            let force = force.saturating_sub(1);
            rec(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1, force)
                + rec(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1, force)
        }
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, whole, m, fm, tol, 48, 6)
}

const HALTON_PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical-inverse (van der Corput) value of `index` in base `base`.
fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut result = 0.0;
    let mut frac = inv;
    while index > 0 {
        result += (index % base) as f64 * frac;
        index /= base;
        frac *= inv;
    }
    result
}

/// Deterministic low-discrepancy sampler (Halton sequence).
///
/// The seed only offsets the start index, so two samplers with the same
/// seed produce identical streams regardless of thread count.
#[derive(Debug, Clone)]
pub struct HaltonSampler {
    index: u64,
}

impl HaltonSampler {
    pub fn new(seed: u64) -> Self {
        // Skip the degenerate all-zeros first point.
        HaltonSampler { index: seed.wrapping_mul(7919) + 1 }
    }

    /// Next point in [0,1)^dims (dims ≤ 16).
    pub fn next_point(&mut self, dims: usize) -> Vec<f64> {
        assert!(dims <= HALTON_PRIMES.len());
        let i = self.index;
        self.index += 1;
        (0..dims).map(|d| radical_inverse(i, HALTON_PRIMES[d])).collect()
    }

    /// Map two [0,1) coordinates to a uniform point on S².
    pub fn unit_from_uv(u: f64, v: f64) -> [f64; 3] {
        let z = 2.0 * u - 1.0;
        let s = (1.0 - z * z).max(0.0).sqrt();
        let phi = 2.0 * std::f64::consts::PI * v;
        [s * phi.cos(), s * phi.sin(), z]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        // n-point GL is exact through degree 2n-1.
        let (xs, ws) = gauss_legendre(5);
        for deg in 0..=9 {
            let num: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            assert_relative_eq!(num, exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn gl_high_order_weights_sum() {
        for n in [24, 64, 96] {
            let (_, ws) = gauss_legendre(n);
            let s: f64 = ws.iter().sum();
            assert_relative_eq!(s, 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sphere_weights_sum_to_4pi() {
        let q = SphereQuadrature::default_rule();
        let s: f64 = q.weights.iter().sum();
        assert_relative_eq!(s, 4.0 * std::f64::consts::PI, epsilon = 1e-12);
        for node in &q.nodes {
            let r: f64 = node.iter().map(|c| c * c).sum();
            assert_relative_eq!(r, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sphere_integrates_low_harmonics() {
        let q = SphereQuadrature::product(8, 16);
        // ∫ ω₁² dS = 4π/3, ∫ ω₁ω₂ dS = 0.
        let i11: f64 = q.nodes.iter().zip(&q.weights).map(|(n, w)| w * n[0] * n[0]).sum();
        let i12: f64 = q.nodes.iter().zip(&q.weights).map(|(n, w)| w * n[0] * n[1]).sum();
        assert_relative_eq!(i11, 4.0 * std::f64::consts::PI / 3.0, epsilon = 1e-12);
        assert_relative_eq!(i12, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn simpson_known_integrals() {
        let v = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-12);
        assert_relative_eq!(v, std::f64::consts::E - 1.0, epsilon = 1e-11);
        let v = adaptive_simpson(&|x: f64| 1.0 / (1.0 + x * x), 0.0, 1.0, 1e-12);
        assert_relative_eq!(v, std::f64::consts::FRAC_PI_4, epsilon = 1e-11);
    }

    #[test]
    fn halton_is_deterministic_and_covers() {
        let mut a = HaltonSampler::new(7);
        let mut b = HaltonSampler::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_point(4), b.next_point(4));
        }
        let mut s = HaltonSampler::new(0);
        let mean: f64 = (0..4096).map(|_| s.next_point(1)[0]).sum::<f64>() / 4096.0;
        assert!((mean - 0.5).abs() < 1e-3);
    }
}
