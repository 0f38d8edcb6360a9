//! Test-only jet algebra: exact comparison of quadratic forms on first-
//! and second-order derivatives, and exact polynomial manufactured
//! solutions for the extended-system identities.

use semiwave::algebra::{AlinhacData, QuadraticNonlinearity};
use std::collections::BTreeMap;

/// One derivative factor: D1 is ∂_a u_j, D2 is ∂_a∂_b u_j with a ≤ b.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Factor {
    D1(usize, usize),
    D2(usize, (usize, usize)),
}

/// Quadratic form in jet variables: coefficient per unordered factor pair.
pub struct JetPoly {
    terms: BTreeMap<(Factor, Factor), f64>,
}

impl JetPoly {
    pub fn new() -> Self {
        JetPoly { terms: BTreeMap::new() }
    }

    fn add(&mut self, a: Factor, b: Factor, coef: f64) {
        let key = if a <= b { (a, b) } else { (b, a) };
        *self.terms.entry(key).or_insert(0.0) += coef;
    }

    /// Add coef·(∂_a∂_b u_{j2})(∂_c u_{j1}).
    pub fn add_d2_d1(&mut self, j2: usize, ab: (usize, usize), j1: usize, c: usize, coef: f64) {
        let ab = if ab.0 <= ab.1 { ab } else { (ab.1, ab.0) };
        self.add(Factor::D2(j2, ab), Factor::D1(j1, c), coef);
    }

    pub fn distance(&self, other: &JetPoly) -> f64 {
        let mut keys: Vec<_> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.iter()
            .map(|k| {
                (self.terms.get(k).copied().unwrap_or(0.0)
                    - other.terms.get(k).copied().unwrap_or(0.0))
                .abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Expand one row of an extended nonlinearity into jet variables using
/// the substitutions v_j = u_j and v_{j+(a+1)N} = ∂_a u_j.
pub fn w_equation_polynomial(
    f_star: &QuadraticNonlinearity,
    n_base: usize,
    row: usize,
) -> JetPoly {
    let to_factor = |comp: usize, slot: usize| -> Factor {
        if comp < n_base {
            Factor::D1(comp, slot)
        } else if comp < 5 * n_base {
            let j = comp % n_base;
            let a = comp / n_base - 1;
            let (lo, hi) = if a <= slot { (a, slot) } else { (slot, a) };
            Factor::D2(j, (lo, hi))
        } else {
            panic!("w-components must not appear in the derived w-equation");
        }
    };
    let mut poly = JetPoly::new();
    let n_star = f_star.n_total();
    for k in 0..n_star {
        for b in 0..4 {
            for l in 0..n_star {
                for c in 0..4 {
                    let coef = f_star.dudu()[[row, k, b, l, c]];
                    if coef != 0.0 {
                        let fa = to_factor(k, b);
                        let fb = to_factor(l, c);
                        match (fa, fb) {
                            (Factor::D1(..), Factor::D2(..)) => {
                                poly.add(fb, fa, coef);
                            }
                            _ => poly.add(fa, fb, coef),
                        }
                    }
                }
            }
        }
    }
    poly
}

/// Sparse polynomial in (t, x₁, x₂, x₃) with exact arithmetic over f64
/// coefficients.
#[derive(Debug, Clone, Default)]
pub struct Poly {
    terms: BTreeMap<[u8; 4], f64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn add_term(&mut self, exps: [u8; 4], coef: f64) {
        if coef != 0.0 {
            *self.terms.entry(exps).or_insert(0.0) += coef;
        }
    }

    pub fn add(&mut self, other: &Poly, scale: f64) {
        for (e, c) in &other.terms {
            self.add_term(*e, c * scale);
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn diff(&self, axis: usize) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in &self.terms {
            if e[axis] > 0 {
                let mut d = *e;
                d[axis] -= 1;
                out.add_term(d, c * e[axis] as f64);
            }
        }
        out
    }

    pub fn dalembertian(&self) -> Poly {
        let mut out = self.diff(0).diff(0);
        for axis in 1..4 {
            out.add(&self.diff(axis).diff(axis), -1.0);
        }
        out
    }

    pub fn max_coef(&self) -> f64 {
        self.terms.values().fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

/// Evaluate a gradient-only nonlinearity on polynomial arguments:
/// component j of F(∂u) with du[j][a] given as polynomials.
fn eval_poly(f: &QuadraticNonlinearity, du: &[Vec<Poly>]) -> Vec<Poly> {
    let n = f.n_total();
    let mut out = vec![Poly::zero(); n];
    for j in 0..n {
        for k in 0..n {
            for b in 0..4 {
                for l in 0..n {
                    for c in 0..4 {
                        let coef = f.dudu()[[j, k, b, l, c]];
                        if coef != 0.0 {
                            out[j].add(&du[k][b].mul(&du[l][c]), coef);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Manufactured-solution residual of the extended system's w-equations:
/// for random cubic u the identity □w_l − F*_{w_l}(∂u*) = Σ h_{l,ka} ∂_a ρ_k
/// with ρ = □u − F(∂u) must hold exactly; returns the worst leftover
/// coefficient.
pub fn manufactured_residual(
    f: &QuadraticNonlinearity,
    f_star: &QuadraticNonlinearity,
    data: &AlinhacData,
    seed: u64,
) -> f64 {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    let n = f.n_total();
    let n0 = data.n0;
    let n_star = f_star.n_total();
    let mut rng = StdRng::seed_from_u64(seed);

    // Random cubic polynomials u_j(t, x).
    let mut u: Vec<Poly> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut p = Poly::zero();
        for e0 in 0..=3u8 {
            for e1 in 0..=(3 - e0) {
                for e2 in 0..=(3 - e0 - e1) {
                    for e3 in 0..=(3 - e0 - e1 - e2) {
                        p.add_term([e0, e1, e2, e3], rng.random_range(-1.0..1.0));
                    }
                }
            }
        }
        u.push(p);
    }

    // u* components and their gradients.
    let mut u_star: Vec<Poly> = Vec::with_capacity(n_star);
    for j in 0..n {
        u_star.push(u[j].clone());
    }
    for a in 0..4 {
        for j in 0..n {
            u_star.push(u[j].diff(a));
        }
    }
    for l in 0..n0 {
        let mut w = Poly::zero();
        for k in 0..n {
            for a in 0..4 {
                let coef = data.h_const[[l, k, a]];
                if coef != 0.0 {
                    w.add(&u[k].diff(a), coef);
                }
            }
        }
        u_star.push(w);
    }
    let du_star: Vec<Vec<Poly>> =
        u_star.iter().map(|p| (0..4).map(|a| p.diff(a)).collect()).collect();
    let du: Vec<Vec<Poly>> = u.iter().map(|p| (0..4).map(|a| p.diff(a)).collect()).collect();

    // Manufacturing defect ρ = □u − F(∂u).
    let f_of_u = eval_poly(f, &du);
    let rho: Vec<Poly> = (0..n)
        .map(|j| {
            let mut r = u[j].dalembertian();
            r.add(&f_of_u[j], -1.0);
            r
        })
        .collect();

    let f_star_rows = eval_poly(f_star, &du_star);
    let mut worst = 0.0f64;
    for l in 0..n0 {
        let row = 5 * n + l;
        // residual = □w_l − F*_row − Σ h_{l,ka} ∂_a ρ_k.
        let mut resid = u_star[row].dalembertian();
        resid.add(&f_star_rows[row], -1.0);
        for k in 0..n {
            for a in 0..4 {
                let coef = data.h_const[[l, k, a]];
                if coef != 0.0 {
                    resid.add(&rho[k].diff(a), -coef);
                }
            }
        }
        worst = worst.max(resid.max_coef());
    }
    worst
}
