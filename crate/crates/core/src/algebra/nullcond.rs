//! Exact null-condition decision and null-form decomposition.
//!
//! F^red(ω, X, Y) is expanded as a polynomial in (X, Y) whose coefficients
//! are polynomials in ω of degree ≤ 2. Each ω-coefficient is reduced
//! modulo the sphere relation ω₃² = 1 − ω₁² − ω₂²; the null condition
//! holds iff every reduced coefficient vanishes. Sampling alone cannot
//! certify identical vanishing, hence the algebraic route.

use super::{NullForm, QuadraticNonlinearity};
use crate::error::{Error, Result};
use ndarray::{Array3, Array5};
use std::collections::BTreeMap;

/// Polynomial in (ω₁, ω₂, ω₃) with exponents stored per monomial.
/// Only the degrees that arise from quadratic nonlinearities appear (≤ 2).
#[derive(Debug, Clone, Default)]
struct SpherePoly {
    terms: BTreeMap<[u8; 3], f64>,
}

impl SpherePoly {
    fn add(&mut self, exps: [u8; 3], coef: f64) {
        if coef != 0.0 {
            *self.terms.entry(exps).or_insert(0.0) += coef;
        }
    }

    /// Monomial for ω_a with the ω₀ = −1 convention (a = 0 contributes a
    /// constant −1).
    fn add_omega(&mut self, a: usize, coef: f64) {
        match a {
            0 => self.add([0, 0, 0], -coef),
            1 => self.add([1, 0, 0], coef),
            2 => self.add([0, 1, 0], coef),
            3 => self.add([0, 0, 1], coef),
            _ => unreachable!(),
        }
    }

    /// Monomial for ω_a ω_b, again with ω₀ = −1.
    fn add_omega_pair(&mut self, a: usize, b: usize, coef: f64) {
        let mut exps = [0u8; 3];
        let mut sign = 1.0;
        for idx in [a, b] {
            match idx {
                0 => sign = -sign,
                i => exps[i - 1] += 1,
            }
        }
        self.add(exps, sign * coef);
    }

    /// Substitute ω₃² = 1 − ω₁² − ω₂² until every ω₃ exponent is ≤ 1.
    fn reduce_mod_sphere(&self) -> SpherePoly {
        let mut out = SpherePoly::default();
        let mut work: Vec<([u8; 3], f64)> = self.terms.iter().map(|(e, c)| (*e, *c)).collect();
        while let Some((e, c)) = work.pop() {
            if e[2] >= 2 {
                let rest = [e[0], e[1], e[2] - 2];
                work.push((rest, c));
                work.push(([rest[0] + 2, rest[1], rest[2]], -c));
                work.push(([rest[0], rest[1] + 2, rest[2]], -c));
            } else {
                out.add(e, c);
            }
        }
        out
    }

    fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// A concrete point where |F^red| is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct NullWitness {
    pub omega: [f64; 3],
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// max_j |F_j^red| at the witness.
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct NullConditionResult {
    pub holds: bool,
    pub witness: Option<NullWitness>,
    /// Largest reduced ω-coefficient left after the sphere reduction;
    /// zero exactly when the condition holds.
    pub max_residual_coefficient: f64,
}

/// Null-form coefficients reproducing a null-condition nonlinearity:
/// F_j = Σ r0[j][k][l] Q0(u_k,u_l) + Σ rab[j][a][b][k][l] Q_{ab}(u_k,u_l).
#[derive(Debug, Clone)]
pub struct NullFormDecomposition {
    pub n_total: usize,
    /// r0[j][k][l], populated for k ≤ l.
    pub r0: Array3<f64>,
    /// rab[j][a][b][k][l], populated for a < b and k < l.
    pub rab: Array5<f64>,
}

impl NullFormDecomposition {
    /// Rebuild the coefficient tensors from the decomposition. Round-trips
    /// with the source nonlinearity on `eval` for any input.
    pub fn to_nonlinearity(&self, n_v: usize) -> QuadraticNonlinearity {
        let n = self.n_total;
        let mut f = QuadraticNonlinearity::zeros(n, n_v);
        for j in 0..n {
            for k in 0..n {
                for l in k..n {
                    let c = self.r0[[j, k, l]];
                    if c != 0.0 {
                        f.add_null_form(j, NullForm::Q0, k, l, c);
                    }
                    for a in 0..4 {
                        for b in (a + 1)..4 {
                            let c = self.rab[[j, a, b, k, l]];
                            if c != 0.0 {
                                f.add_null_form(j, NullForm::Qab(a, b), k, l, c);
                            }
                        }
                    }
                }
            }
        }
        f
    }
}

const COEF_TOL: f64 = 1e-12;

impl QuadraticNonlinearity {
    /// Decide the null condition exactly (up to the floating-point scale of
    /// the stored coefficients). On failure, returns a witness maximizing
    /// max_j |F_j^red| over a structured sample set.
    pub fn check_null_condition(&self) -> NullConditionResult {
        let scale = self.coefficient_scale().max(1.0);
        let mut max_resid = 0.0f64;
        for poly in self.reduced_coefficient_polys() {
            max_resid = max_resid.max(poly.reduce_mod_sphere().max_abs());
        }
        if max_resid <= COEF_TOL * scale {
            NullConditionResult { holds: true, witness: None, max_residual_coefficient: max_resid }
        } else {
            NullConditionResult {
                holds: false,
                witness: Some(self.search_witness()),
                max_residual_coefficient: max_resid,
            }
        }
    }

    /// If the null condition holds, solve for the null-form coefficients
    /// (Q0 and Q_{ab} per component pair); absent otherwise.
    pub fn decompose_null_forms(&self) -> Result<Option<NullFormDecomposition>> {
        if !self.check_null_condition().holds {
            return Ok(None);
        }
        let n = self.n_total();
        let scale = self.coefficient_scale().max(1.0);
        let tol = COEF_TOL * scale;
        let mut r0 = Array3::zeros((n, n, n));
        let mut rab = Array5::zeros((n, 4, 4, n, n));
        // Metric signature of Q0 in the derivative slots.
        let q0_sig = [1.0, -1.0, -1.0, -1.0];
        for j in 0..n {
            for k in 0..n {
                for l in k..n {
                    // Combined coefficient of the monomial (∂_b u_k)(∂_c u_l)
                    // in F_j; for k < l the transposed entry stores the same
                    // monomial with swapped factor order.
                    let g = |b: usize, c: usize| -> f64 {
                        if k == l {
                            self.dudu()[[j, k, b, l, c]]
                        } else {
                            self.dudu()[[j, k, b, l, c]] + self.dudu()[[j, l, c, k, b]]
                        }
                    };
                    // Symmetric part must match r0·diag(1,−1,−1,−1); the
                    // antisymmetric part gives the Q_{ab} coefficients. For
                    // k = l the antisymmetric part evaluates to zero anyway
                    // (Q_{ab}(u_k, u_k) ≡ 0) and is dropped.
                    let r = g(0, 0);
                    r0[[j, k, l]] = r;
                    for b in 0..4 {
                        for c in 0..4 {
                            let sym = 0.5 * (g(b, c) + g(c, b));
                            let expected = if b == c { r * q0_sig[b] } else { 0.0 };
                            if (sym - expected).abs() > tol {
                                return Err(Error::Internal(format!(
                                    "null-form decomposition inconsistent at j={j} k={k} l={l} (b={b}, c={c}): \
                                     symmetric residual {}",
                                    sym - expected
                                )));
                            }
                            if k < l && b < c {
                                rab[[j, b, c, k, l]] = 0.5 * (g(b, c) - g(c, b));
                            }
                        }
                    }
                }
            }
        }
        Ok(Some(NullFormDecomposition { n_total: n, r0, rab }))
    }

    fn coefficient_scale(&self) -> f64 {
        let a = self.uu().iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let b = self.udu().iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let c = self.dudu().iter().fold(0.0f64, |m, c| m.max(c.abs()));
        a.max(b).max(c)
    }

    /// ω-coefficient polynomials of every (X,Y)-monomial of F^red.
    fn reduced_coefficient_polys(&self) -> Vec<SpherePoly> {
        let n = self.n_total();
        let mut polys = Vec::new();
        for j in 0..n {
            // X_k X_l group: constants.
            for k in 0..n {
                for l in k..n {
                    let c = if k == l {
                        self.uu()[[j, k, k]]
                    } else {
                        self.uu()[[j, k, l]] + self.uu()[[j, l, k]]
                    };
                    let mut p = SpherePoly::default();
                    p.add([0, 0, 0], c);
                    polys.push(p);
                }
            }
            // X_k Y_l group: degree-1 polynomials Σ_a udu ω_a.
            for k in 0..n {
                for l in 0..n {
                    let mut p = SpherePoly::default();
                    for a in 0..4 {
                        p.add_omega(a, self.udu()[[j, k, l, a]]);
                    }
                    polys.push(p);
                }
            }
            // Y_k Y_l group: degree-2 polynomials Σ_{b,c} q ω_b ω_c.
            for k in 0..n {
                for l in k..n {
                    let mut p = SpherePoly::default();
                    for b in 0..4 {
                        for c in 0..4 {
                            let q = if k == l {
                                self.dudu()[[j, k, b, k, c]]
                            } else {
                                self.dudu()[[j, k, b, l, c]] + self.dudu()[[j, l, b, k, c]]
                            };
                            p.add_omega_pair(b, c, q);
                        }
                    }
                    polys.push(p);
                }
            }
        }
        polys
    }

    /// Structured witness search: axis directions first, then diagonal
    /// directions, with X and Y ranging over ±1 vectors supported on at
    /// most two components. Keeps the first strict maximizer of
    /// max_j |F_j^red|.
    fn search_witness(&self) -> NullWitness {
        let n = self.n_total();
        let mut omegas: Vec<[f64; 3]> = vec![
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ];
        let s = 1.0 / 2.0f64.sqrt();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut w = [0.0; 3];
                w[i] = si * s;
                w[j] = sj * s;
                omegas.push(w);
            }
        }
        let t = 1.0 / 3.0f64.sqrt();
        omegas.push([t, t, t]);
        omegas.push([-t, t, t]);
        omegas.push([t, -t, t]);
        omegas.push([t, t, -t]);

        // Sparse ±1 vectors: zero, singletons, then pairs.
        let mut vecs: Vec<Vec<f64>> = vec![vec![0.0; n]];
        for k in 0..n {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; n];
                v[k] = s;
                vecs.push(v);
            }
        }
        for k in 0..n {
            for l in (k + 1)..n {
                for (sk, sl) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    let mut v = vec![0.0; n];
                    v[k] = sk;
                    v[l] = sl;
                    vecs.push(v);
                }
            }
        }

        let grad_only = self.is_gradient_only();
        let x_candidates: &[Vec<f64>] = if grad_only { &vecs[..1] } else { &vecs[..] };

        let mut best = NullWitness {
            omega: omegas[0],
            x: vec![0.0; n],
            y: vec![0.0; n],
            value: 0.0,
        };
        let mut out = vec![0.0; n];
        for omega in &omegas {
            for x in x_candidates {
                for y in &vecs {
                    self.eval_reduced_into(*omega, x, y, &mut out);
                    let v = out.iter().fold(0.0f64, |m, c| m.max(c.abs()));
                    if v > best.value + 1e-12 {
                        best = NullWitness { omega: *omega, x: x.clone(), y: y.clone(), value: v };
                    }
                }
            }
        }
        best
    }
}
