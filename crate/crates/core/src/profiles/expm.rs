//! Matrix exponential by scaling-and-squaring with a Padé(13) kernel
//! (Higham 2005), plus the closed-form exponential of a rank-one matrix.

use nalgebra::DMatrix;

/// Padé(13,13) numerator coefficients.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn one_norm(m: &DMatrix<f64>) -> f64 {
    let mut max = 0.0f64;
    for j in 0..m.ncols() {
        let s: f64 = m.column(j).iter().map(|v| v.abs()).sum();
        max = max.max(s);
    }
    max
}

/// exp(M) with relative error ≲1e-13 for moderate norms (‖M‖ ≤ 50 is well
/// inside the scaling range).
pub fn matrix_exp(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "matrix_exp requires a square matrix");
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    if n == 1 {
        return DMatrix::from_element(1, 1, m[(0, 0)].exp());
    }

    // Scale so ‖M/2^s‖ is below the Padé(13) radius θ₁₃ ≈ 5.37.
    let norm = one_norm(m);
    let theta13 = 5.371920351148152;
    let s = if norm > theta13 { ((norm / theta13).log2().ceil() as i32).max(0) } else { 0 };
    let a = m / 2f64.powi(s);

    let eye = DMatrix::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let w1 = &a6 * PADE13[13] + &a4 * PADE13[11] + &a2 * PADE13[9];
    let w2 = &a6 * &w1 + &a6 * PADE13[7] + &a4 * PADE13[5] + &a2 * PADE13[3] + &eye * PADE13[1];
    let u = &a * &w2;
    let z1 = &a6 * PADE13[12] + &a4 * PADE13[10] + &a2 * PADE13[8];
    let v = &a6 * &z1 + &a6 * PADE13[6] + &a4 * PADE13[4] + &a2 * PADE13[2] + &eye * PADE13[0];

    let num = &v + &u;
    let den = &v - &u;
    let mut r = den
        .lu()
        .solve(&num)
        .unwrap_or_else(|| DMatrix::identity(n, n));
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// e^{τ B} y for the rank-one matrix B = q pᵀ:
/// y + τ⟨p,y⟩q when ⟨p,q⟩ = 0, else y + ⟨p,q⟩⁻¹⟨p,y⟩(e^{⟨p,q⟩τ} − 1)q.
pub fn rank_one_exp(p: &[f64], q: &[f64], tau: f64, y: &[f64]) -> Vec<f64> {
    assert_eq!(p.len(), q.len());
    assert_eq!(p.len(), y.len());
    let pq: f64 = p.iter().zip(q).map(|(a, b)| a * b).sum();
    let py: f64 = p.iter().zip(y).map(|(a, b)| a * b).sum();
    let pn: f64 = p.iter().map(|a| a * a).sum::<f64>().sqrt();
    let qn: f64 = q.iter().map(|a| a * a).sum::<f64>().sqrt();
    // exp_m1(z)/z is the stable continuation of both branches.
    let factor = if pq.abs() <= 1e-12 * pn * qn {
        tau
    } else {
        let z = pq * tau;
        if z.abs() < 1e-8 {
            tau * (1.0 + 0.5 * z + z * z / 6.0)
        } else {
            z.exp_m1() / pq
        }
    };
    y.iter().zip(q).map(|(yv, qv)| yv + factor * py * qv).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Plain truncated Taylor series, the independent oracle for small norms.
    pub(crate) fn taylor_exp(m: &DMatrix<f64>, terms: usize) -> DMatrix<f64> {
        let n = m.nrows();
        let mut sum = DMatrix::identity(n, n);
        let mut term = DMatrix::identity(n, n);
        for k in 1..=terms {
            term = &term * m / k as f64;
            sum += &term;
        }
        sum
    }

    #[test]
    fn zero_maps_to_identity() {
        let z = DMatrix::zeros(4, 4);
        let e = matrix_exp(&z);
        assert_relative_eq!(e, DMatrix::identity(4, 4), epsilon = 1e-15);
    }

    #[test]
    fn rotation_closed_form() {
        for a in [-2.0f64, -0.3, 0.0, 1.0, 7.5] {
            let m = DMatrix::from_row_slice(2, 2, &[0.0, a, -a, 0.0]);
            let e = matrix_exp(&m);
            assert_relative_eq!(e[(0, 0)], a.cos(), epsilon = 1e-13);
            assert_relative_eq!(e[(0, 1)], a.sin(), epsilon = 1e-13);
            assert_relative_eq!(e[(1, 0)], -a.sin(), epsilon = 1e-13);
            assert_relative_eq!(e[(1, 1)], a.cos(), epsilon = 1e-13);
        }
    }

    #[test]
    fn random_matrices_match_taylor_oracle() {
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..50 {
            let m = DMatrix::from_fn(3, 3, |_, _| rng.random_range(-0.33..0.33));
            let e = matrix_exp(&m);
            let t = taylor_exp(&m, 30);
            assert!((&e - &t).norm() < 1e-12, "diff {}", (&e - &t).norm());
        }
    }

    #[test]
    fn large_norm_scaling() {
        // exp(diag(30, −30)) needs the scaling branch.
        let m = DMatrix::from_row_slice(2, 2, &[30.0, 0.0, 0.0, -30.0]);
        let e = matrix_exp(&m);
        assert_relative_eq!(e[(0, 0)], 30f64.exp(), max_relative = 1e-12);
        assert_relative_eq!(e[(1, 1)], (-30f64).exp(), max_relative = 1e-10);
    }

    #[test]
    fn rank_one_orthogonal_branch() {
        // p ⟂ q: e^{τ qpᵀ} y = y + τ⟨p,y⟩q.
        let out = rank_one_exp(&[1.0, 0.0], &[0.0, 1.0], 1.0, &[1.0, 0.0]);
        assert_relative_eq!(out[0], 1.0);
        assert_relative_eq!(out[1], 1.0);
    }

    #[test]
    fn rank_one_kernel_fixed() {
        // ⟨p,y⟩ = 0: y unchanged.
        let y = [3.0, -2.0, 0.5];
        let out = rank_one_exp(&[0.0, 0.25, 1.0], &[1.0, 1.0, 1.0], 2.0, &y);
        assert_relative_eq!(out[0], y[0], epsilon = 1e-14);
        assert_relative_eq!(out[1], y[1], epsilon = 1e-14);
        assert_relative_eq!(out[2], y[2], epsilon = 1e-14);
    }

    #[test]
    fn rank_one_matches_generic_expm() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.random_range(2..6);
            let p: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let q: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let tau: f64 = rng.random_range(0.0..3.0);
            let b = DMatrix::from_fn(n, n, |i, j| q[i] * p[j]);
            let e = matrix_exp(&(b * tau));
            let oracle = &e * DMatrix::from_column_slice(n, 1, &y);
            let got = rank_one_exp(&p, &q, tau, &y);
            for i in 0..n {
                assert!((got[i] - oracle[(i, 0)]).abs() < 1e-10);
            }
        }
    }
}
