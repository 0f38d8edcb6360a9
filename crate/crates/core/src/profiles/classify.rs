//! Spectral classification of the interaction matrix B(ω, ξ, η) over
//! quasi-random samples: vanishing B predicts free-like behavior, a
//! purely nilpotent spectrum predicts logarithmic corrections, purely
//! imaginary semisimple spectrum predicts rotation with bounded energy,
//! and eigenvalues with nonzero real part predict t^{±Cε}-type growth.

use super::eig::eigenvalues;
use super::expm::matrix_exp;
use crate::algebra::{build_b, GCoefficients};
use crate::error::Result;
use crate::quad::HaltonSampler;
use nalgebra::DMatrix;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Null,
    NilpotentLogGrowth,
    ImaginaryRotation,
    PositiveRealPart,
    Mixed,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Null => "null",
            Verdict::NilpotentLogGrowth => "nilpotent_log_growth",
            Verdict::ImaginaryRotation => "imaginary_rotation",
            Verdict::PositiveRealPart => "positive_real_part",
            Verdict::Mixed => "mixed",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub omega: [f64; 3],
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    /// (Re, Im) pairs.
    pub eigenvalues: Vec<(f64, f64)>,
    pub kind: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub max_real_part: f64,
    pub b_norm_max: f64,
    pub samples: usize,
    /// True when the β-projected (rank-one) construction was used.
    pub projected: bool,
}

const ZERO_TOL: f64 = 1e-10;
const RE_TOL: f64 = 1e-8;
const MAX_WITNESSES: usize = 8;

#[derive(PartialEq, Clone, Copy)]
enum SampleKind {
    Zero,
    Positive,
    Nilpotent,
    Rotation,
    Mixed,
}

/// Verdict for one sampled matrix.
fn classify_sample(b: &DMatrix<f64>) -> (SampleKind, Vec<(f64, f64)>) {
    let bn = b.norm();
    if bn < ZERO_TOL {
        return (SampleKind::Zero, Vec::new());
    }
    let eigs = eigenvalues(b);
    let pairs: Vec<(f64, f64)> = eigs.iter().map(|e| (e.re, e.im)).collect();
    let max_abs_re = eigs.iter().fold(0.0f64, |m, e| m.max(e.re.abs()));
    if max_abs_re > RE_TOL {
        return (SampleKind::Positive, pairs);
    }
    let max_mod = eigs.iter().fold(0.0f64, |m, e| m.max(e.norm()));
    if max_mod <= RE_TOL * bn.max(1.0) {
        return (SampleKind::Nilpotent, pairs);
    }
    // Purely imaginary nonzero spectrum: bounded e^{τB} ⇔ semisimple.
    // Integrate far enough that a defective block would have grown
    // polynomially by a large factor.
    let t = 100.0 / bn;
    let grown = matrix_exp(&(b * t)).norm();
    let n = b.nrows() as f64;
    if grown <= 20.0 * n {
        (SampleKind::Rotation, pairs)
    } else {
        (SampleKind::Mixed, pairs)
    }
}

/// Classify the structure coefficients by sampling B(ω, ξ, η) over
/// quasi-random (ω, ξ, η) with |ξ|, |η| ≤ 1 (fixed seed 0).
pub fn classify(
    g: &GCoefficients,
    beta: Option<&crate::algebra::SphereVectorFn>,
    samples: usize,
) -> Result<ClassificationReport> {
    classify_seeded(g, beta, samples, 0)
}

pub fn classify_seeded(
    g: &GCoefficients,
    beta: Option<&crate::algebra::SphereVectorFn>,
    samples: usize,
    seed: u64,
) -> Result<ClassificationReport> {
    let use_projection = beta.is_some();
    if use_projection && g.projection.is_none() {
        return Err(crate::error::argument(
            "classify: β-projection requested but the coefficients carry no factorization data",
        ));
    }
    let mut sampler = HaltonSampler::new(seed);
    let mut report = ClassificationReport {
        verdict: Verdict::Null,
        witnesses: Vec::new(),
        max_real_part: 0.0,
        b_norm_max: 0.0,
        samples,
        projected: use_projection,
    };
    let mut seen = [false; 5];
    for _ in 0..samples {
        let pt = sampler.next_point(2 + 2 * g.n_w.max(1));
        let omega = HaltonSampler::unit_from_uv(pt[0], pt[1]);
        let mut xi: Vec<f64> = (0..g.n_w).map(|i| 2.0 * pt[2 + i] - 1.0).collect();
        let mut eta: Vec<f64> = (0..g.n_w).map(|i| 2.0 * pt[2 + g.n_w + i] - 1.0).collect();
        clamp_ball(&mut xi);
        clamp_ball(&mut eta);

        let b = if use_projection {
            projected_b(g, beta.unwrap(), omega, &xi)
        } else {
            build_b(g, omega, &xi, &eta)?
        };
        report.b_norm_max = report.b_norm_max.max(b.norm());
        let (kind, eigs) = classify_sample(&b);
        for (re, _) in &eigs {
            report.max_real_part = report.max_real_part.max(*re);
        }
        let slot = kind as usize;
        let record = !seen[slot] && kind != SampleKind::Zero;
        seen[slot] = true;
        if record && report.witnesses.len() < MAX_WITNESSES {
            report.witnesses.push(Witness {
                omega,
                xi: xi.clone(),
                eta: eta.clone(),
                eigenvalues: eigs,
                kind: match kind {
                    SampleKind::Zero => "zero",
                    SampleKind::Positive => "real_part",
                    SampleKind::Nilpotent => "nilpotent",
                    SampleKind::Rotation => "rotation",
                    SampleKind::Mixed => "mixed",
                }
                .to_string(),
            });
        }
    }
    let [_, positive, nilpotent, rotation, mixed] = seen;
    report.verdict = if positive {
        Verdict::PositiveRealPart
    } else if mixed || (nilpotent && rotation) {
        Verdict::Mixed
    } else if rotation {
        Verdict::ImaginaryRotation
    } else if nilpotent {
        Verdict::NilpotentLogGrowth
    } else {
        Verdict::Null
    };
    Ok(report)
}

fn clamp_ball(v: &mut [f64]) {
    let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 1.0 {
        for x in v {
            *x /= n;
        }
    }
}

/// Rank-one β-projected matrix
/// B(ω, ξ) = −½ β(ω) ξᵀ (Σ_m β_m(ω) G_m(ω)) on the base components.
fn projected_b(
    g: &GCoefficients,
    beta: &crate::algebra::SphereVectorFn,
    omega: [f64; 3],
    xi: &[f64],
) -> DMatrix<f64> {
    let proj = g.projection.as_ref().expect("checked by caller");
    let n = proj.n_base;
    let gt = (proj.g)(omega);
    let bv = beta(omega);
    // p_k = Σ_l ξ_l Σ_m β_m g_{ml,k}.
    let mut p = vec![0.0; n];
    for k in 0..n {
        for l in 0..xi.len() {
            let mut s = 0.0;
            for m in 0..n {
                s += bv[m] * gt[[m, l, k]];
            }
            p[k] += xi[l] * s;
        }
    }
    DMatrix::from_fn(n, n, |j, k| -0.5 * bv[j] * p[k])
}
