//! Eigenvalues of small dense real matrices and membership in
//! 𝒵(B) = ker B ⊕ ⊕_{Re μ<0} K_μ(B), the set of directions y for which
//! e^{τB}y converges as τ → ∞.
//!
//! Closed-form characteristic roots for n ≤ 3; Hessenberg reduction plus
//! Francis double-shift QR for larger matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// All eigenvalues, with multiplicity, in no particular order.
pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<Complex64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    match n {
        0 => Vec::new(),
        1 => vec![Complex64::new(m[(0, 0)], 0.0)],
        2 => eig2(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]),
        3 => eig3(m),
        _ => {
            let mut h = m.clone();
            hessenberg(&mut h);
            hqr_eigenvalues(h)
        }
    }
}

fn eig2(a: f64, b: f64, c: f64, d: f64) -> Vec<Complex64> {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = tr * tr - 4.0 * det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        vec![Complex64::new(0.5 * (tr + s), 0.0), Complex64::new(0.5 * (tr - s), 0.0)]
    } else {
        let s = (-disc).sqrt();
        vec![Complex64::new(0.5 * tr, 0.5 * s), Complex64::new(0.5 * tr, -0.5 * s)]
    }
}

fn eig3(m: &DMatrix<f64>) -> Vec<Complex64> {
    // Characteristic polynomial λ³ − c2 λ² + c1 λ − c0.
    let c2 = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
    let minor = |i: usize, j: usize, k: usize, l: usize| m[(i, i)] * m[(j, j)]
        - m[(k, l)] * m[(l, k)];
    let c1 = minor(0, 1, 0, 1) + minor(0, 2, 0, 2) + minor(1, 2, 1, 2);
    let c0 = m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
        - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
        + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]);
    cubic_roots(-c2, c1, -c0)
}

/// Roots of λ³ + a λ² + b λ + c.
fn cubic_roots(a: f64, b: f64, c: f64) -> Vec<Complex64> {
    // Depressed cubic t³ + p t + q with λ = t − a/3.
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = -a / 3.0;
    let half_q = q / 2.0;
    let disc = half_q * half_q + p * p * p / 27.0;
    if disc > 0.0 {
        // One real root and a complex pair (Cardano).
        let sq = disc.sqrt();
        let u = cbrt(-half_q + sq);
        let v = cbrt(-half_q - sq);
        let real = u + v + shift;
        let re = -(u + v) / 2.0 + shift;
        let im = (u - v) * 3.0f64.sqrt() / 2.0;
        vec![
            Complex64::new(real, 0.0),
            Complex64::new(re, im),
            Complex64::new(re, -im),
        ]
    } else {
        // Three real roots (trigonometric form).
        let r = (-p / 3.0).max(0.0).sqrt();
        if r == 0.0 {
            // Triple root at the shift.
            return vec![Complex64::new(shift, 0.0); 3];
        }
        let arg = (-half_q / (r * r * r)).clamp(-1.0, 1.0);
        let theta = arg.acos();
        (0..3)
            .map(|k| {
                let t = 2.0 * r * ((theta - 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos();
                Complex64::new(t + shift, 0.0)
            })
            .collect()
    }
}

fn cbrt(x: f64) -> f64 {
    x.signum() * x.abs().cbrt()
}

/// Householder reduction to upper Hessenberg form, in place.
fn hessenberg(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for k in 0..n.saturating_sub(2) {
        let mut alpha: f64 = 0.0;
        for i in (k + 1)..n {
            alpha += a[(i, k)] * a[(i, k)];
        }
        alpha = alpha.sqrt();
        if alpha == 0.0 {
            continue;
        }
        if a[(k + 1, k)] > 0.0 {
            alpha = -alpha;
        }
        let mut v = DVector::zeros(n);
        v[k + 1] = a[(k + 1, k)] - alpha;
        for i in (k + 2)..n {
            v[i] = a[(i, k)];
        }
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // A ← (I − 2vvᵀ/vᵀv) A (I − 2vvᵀ/vᵀv)
        for j in 0..n {
            let dot: f64 = (k + 1..n).map(|i| v[i] * a[(i, j)]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in (k + 1)..n {
                a[(i, j)] -= f * v[i];
            }
        }
        for i in 0..n {
            let dot: f64 = (k + 1..n).map(|j| v[j] * a[(i, j)]).sum();
            let f = 2.0 * dot / vnorm2;
            for j in (k + 1)..n {
                a[(i, j)] -= f * v[j];
            }
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix (hqr).
fn hqr_eigenvalues(mut a: DMatrix<f64>) -> Vec<Complex64> {
    let n = a.nrows();
    let mut eigs = Vec::with_capacity(n);
    let eps = f64::EPSILON;
    let anorm: f64 = a.iter().map(|x| x.abs()).sum::<f64>().max(eps);
    let mut nn = n as isize - 1;
    let mut t = 0.0f64;
    let max_total = 50 * n.max(1);
    let mut total_its = 0usize;
    while nn >= 0 {
        let mut its = 0;
        loop {
            // Small-subdiagonal scan.
            let mut l = nn;
            while l >= 1 {
                let s = a[(l as usize - 1, l as usize - 1)].abs() + a[(l as usize, l as usize)].abs();
                let s = if s == 0.0 { anorm } else { s };
                if a[(l as usize, l as usize - 1)].abs() <= eps * s {
                    a[(l as usize, l as usize - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let x = a[(nn as usize, nn as usize)];
            if l == nn {
                eigs.push(Complex64::new(x + t, 0.0));
                nn -= 1;
                break;
            }
            let y = a[(nn as usize - 1, nn as usize - 1)];
            let w = a[(nn as usize, nn as usize - 1)] * a[(nn as usize - 1, nn as usize)];
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                let x = x + t;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    eigs.push(Complex64::new(x + z, 0.0));
                    eigs.push(Complex64::new(if z != 0.0 { x - w / z } else { x + z }, 0.0));
                } else {
                    eigs.push(Complex64::new(x + p, z));
                    eigs.push(Complex64::new(x + p, -z));
                }
                nn -= 2;
                break;
            }
            total_its += 1;
            if total_its > max_total {
                // Give up on refinement: report the remaining diagonal.
                for i in 0..=nn as usize {
                    eigs.push(Complex64::new(a[(i, i)] + t, 0.0));
                }
                return eigs;
            }
            let (mut x, mut y, mut w) = (x, y, w);
            if its == 10 || its == 20 {
                // Exceptional shift.
                t += x;
                for i in 0..=nn as usize {
                    a[(i, i)] -= x;
                }
                let s = a[(nn as usize, nn as usize - 1)].abs()
                    + a[(nn as usize - 1, nn as usize - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            // Two consecutive small subdiagonals.
            let mut m = nn - 2;
            let (mut p, mut q, mut r) = (0.0, 0.0, 0.0);
            while m >= l {
                let mu = m as usize;
                let z = a[(mu, mu)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(mu + 1, mu)] + a[(mu, mu + 1)];
                q = a[(mu + 1, mu + 1)] - z - rr - ss;
                r = a[(mu + 2, mu + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[(mu, mu - 1)].abs() * (q.abs() + r.abs());
                let v = z.abs()
                    * (p.abs() + a[(mu - 1, mu - 1)].abs() + a[(mu + 1, mu + 1)].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                let iu = i as usize;
                a[(iu, iu - 2)] = 0.0;
                if i > m + 2 {
                    a[(iu, iu - 3)] = 0.0;
                }
            }
            // Double QR sweep over rows m..nn−1.
            for k in m..nn {
                let ku = k as usize;
                if k != m {
                    p = a[(ku, ku - 1)];
                    q = a[(ku + 1, ku - 1)];
                    r = if k != nn - 1 { a[(ku + 2, ku - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        a[(ku, ku - 1)] = -a[(ku, ku - 1)];
                    }
                } else {
                    a[(ku, ku - 1)] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                for j in ku..=nn as usize {
                    let mut pp = a[(ku, j)] + q * a[(ku + 1, j)];
                    if k != nn - 1 {
                        pp += r * a[(ku + 2, j)];
                        a[(ku + 2, j)] -= pp * z;
                    }
                    a[(ku + 1, j)] -= pp * y;
                    a[(ku, j)] -= pp * x;
                }
                let upper = if (k + 3) < nn { k + 3 } else { nn } as usize;
                for i in (l as usize)..=upper {
                    let mut pp = x * a[(i, ku)] + y * a[(i, ku + 1)];
                    if k != nn - 1 {
                        pp += z * a[(i, ku + 2)];
                        a[(i, ku + 2)] -= pp * r;
                    }
                    a[(i, ku + 1)] -= pp * q;
                    a[(i, ku)] -= pp;
                }
            }
        }
    }
    eigs
}

/// Distinct eigenvalue clusters with strictly negative real part
/// (Re μ < −`tol`), merging values closer than `tol` and keeping one
/// representative per complex-conjugate pair.
fn stable_clusters(eigs: &[Complex64], tol: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::new();
    for e in eigs {
        if e.re >= -tol || e.im < 0.0 {
            // Conjugate pairs are represented by the Im ≥ 0 member.
            continue;
        }
        if !out.iter().any(|o| (o - e).norm() <= tol * (1.0 + e.norm())) {
            out.push(*e);
        }
    }
    out
}

const Z_TOL: f64 = 1e-8;

/// True iff y ∈ 𝒵(B), tested through the annihilating product
/// B·∏_{Re μ<0}(B − μI)^m with m = dim(B); equivalently e^{τB}y converges
/// as τ → ∞.
pub fn z_membership(b: &DMatrix<f64>, y: &DVector<f64>) -> bool {
    let n = b.nrows();
    assert_eq!(n, b.ncols());
    assert_eq!(n, y.len());
    let ynorm = y.norm();
    if ynorm == 0.0 {
        return true;
    }
    let eigs = eigenvalues(b);
    let mut op = b.clone();
    for mu in stable_clusters(&eigs, Z_TOL) {
        // Real factor (B − μI); complex pairs enter as
        // B² − 2Re(μ)B + |μ|²I, each raised to the n-th power.
        let factor = if mu.im.abs() <= Z_TOL {
            b - DMatrix::identity(n, n) * mu.re
        } else {
            b * b - b * (2.0 * mu.re) + DMatrix::identity(n, n) * mu.norm_sqr()
        };
        for _ in 0..n {
            op = &op * &factor;
        }
    }
    let scale = op.norm().max(1.0);
    (&op * y).norm() < Z_TOL * scale * ynorm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::matrix_exp;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn sorted_re_im(mut v: Vec<Complex64>) -> Vec<(f64, f64)> {
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v.into_iter().map(|c| (c.re, c.im)).collect()
    }

    fn assert_spectra_match(a: Vec<Complex64>, b: Vec<Complex64>, tol: f64) {
        let aa = sorted_re_im(a);
        let bb = sorted_re_im(b);
        assert_eq!(aa.len(), bb.len());
        for (x, y) in aa.iter().zip(&bb) {
            assert!(
                (x.0 - y.0).abs() < tol && (x.1 - y.1).abs() < tol,
                "{aa:?} vs {bb:?}"
            );
        }
    }

    #[test]
    fn two_by_two_cases() {
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, -2.0, 0.0]);
        assert_spectra_match(
            eigenvalues(&rot),
            vec![Complex64::new(0.0, 2.0), Complex64::new(0.0, -2.0)],
            1e-12,
        );
        let tri = DMatrix::from_row_slice(2, 2, &[1.0, 5.0, 0.0, -3.0]);
        assert_spectra_match(
            eigenvalues(&tri),
            vec![Complex64::new(1.0, 0.0), Complex64::new(-3.0, 0.0)],
            1e-12,
        );
    }

    #[test]
    fn three_by_three_known_spectrum() {
        // Block diag(rotation by s, real 0.7).
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[0.0, 1.5, 0.0, -1.5, 0.0, 0.0, 0.0, 0.0, 0.7],
        );
        assert_spectra_match(
            eigenvalues(&m),
            vec![
                Complex64::new(0.0, 1.5),
                Complex64::new(0.0, -1.5),
                Complex64::new(0.7, 0.0),
            ],
            1e-12,
        );
    }

    #[test]
    fn qr_matches_nalgebra_on_random_matrices() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.random_range(4..8);
            let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
            let ours = eigenvalues(&m);
            let reference: Vec<Complex64> =
                m.clone().complex_eigenvalues().iter().copied().collect();
            assert_spectra_match(ours, reference, 1e-8);
        }
    }

    #[test]
    fn closed_form_matches_nalgebra_on_random_small() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.random_range(2..4);
            let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
            let ours = eigenvalues(&m);
            let reference: Vec<Complex64> =
                m.clone().complex_eigenvalues().iter().copied().collect();
            assert_spectra_match(ours, reference, 1e-9);
        }
    }

    #[test]
    fn z_membership_forced_cases() {
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(z_membership(&b, &DVector::from_vec(vec![0.0, 1.0])));
        assert!(!z_membership(&b, &DVector::from_vec(vec![1.0, 0.0])));
        assert!(z_membership(&b, &DVector::from_vec(vec![0.0, 0.0])));
    }

    #[test]
    fn z_membership_vs_expm_convergence_oracle() {
        // Random well-separated spectra; the oracle follows e^{τB}y at
        // τ ∈ {10, 20, 40}.
        let mut rng = StdRng::seed_from_u64(19);
        let mut tested = 0;
        while tested < 150 {
            let n = rng.random_range(2..5);
            let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.5..1.5));
            let eigs = eigenvalues(&m);
            if eigs.iter().any(|e| e.re.abs() < 0.8) {
                continue;
            }
            tested += 1;
            let y = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0f64));
            let e10 = matrix_exp(&(&m * 10.0)) * &y;
            let e20 = matrix_exp(&(&m * 20.0)) * &y;
            let e40 = matrix_exp(&(&m * 40.0)) * &y;
            let converged = e10.iter().all(|v| v.is_finite())
                && e20.iter().all(|v| v.is_finite())
                && e40.iter().all(|v| v.is_finite())
                && (&e40 - &e20).norm() < 1e-6 * (1.0 + y.norm());
            assert_eq!(z_membership(&m, &y), converged, "matrix {m}");
        }
    }

    #[test]
    fn z_membership_mixed_spectrum_subspace() {
        // diag(−1, 2): span{e₁} is in 𝒵, anything with an e₂ part is not.
        let b = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 2.0]);
        assert!(z_membership(&b, &DVector::from_vec(vec![1.0, 0.0])));
        assert!(!z_membership(&b, &DVector::from_vec(vec![1.0, 1e-3])));
    }
}
