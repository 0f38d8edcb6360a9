//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured numbers (run with `--nocapture` to see them all).
//!
//! Criteria 1–8 are algebraic/oracle checks and run in seconds; 9–11 are
//! desk-scale solver reproductions and take minutes.

mod jet;
mod runs;

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use semiwave::algebra::{
    build_extended_system, preset, verify_alinhac, NullForm, QuadraticNonlinearity,
};
use semiwave::profiles::{
    classify_seeded, eigenvalues, integrate_reduced_system, matrix_exp, rank_one_exp,
    z_membership, Verdict,
};
use semiwave::quad::SphereQuadrature;
use semiwave::radiation::{
    friedlander_radial, h0_norm, kirchhoff_eval, make_data_with_prescribed_field, radon_radial,
    radon_transform, translation_l2_radial, GridGeometry, InitialData, ProfileGrid, RadialProfile,
    RadonParams,
};

fn pass(criterion: u32, detail: String) {
    println!("[PASS] criterion {criterion:2}: {detail}");
}

// --- 1. Null-condition classifier -------------------------------------

#[test]
fn criterion_01_null_condition_classifier() {
    let t0 = std::time::Instant::now();
    let mut forms = vec![NullForm::Q0];
    for a in 0..4 {
        for b in (a + 1)..4 {
            forms.push(NullForm::Qab(a, b));
        }
    }
    // Every single null form, on several component pairs.
    for &form in &forms {
        for (k, l) in [(0, 0), (0, 1), (1, 0), (1, 1), (0, 2)] {
            if matches!(form, NullForm::Qab(..)) && k == l {
                continue;
            }
            let mut f = QuadraticNonlinearity::zeros(3, 3);
            f.add_null_form(0, form, k, l, 1.0);
            assert!(f.check_null_condition().holds, "{form:?} on ({k},{l})");
        }
    }
    // Random combinations.
    let mut rng = StdRng::seed_from_u64(101);
    for _ in 0..50 {
        let mut f = QuadraticNonlinearity::zeros(3, 3);
        for _ in 0..6 {
            let form = forms[rng.random_range(0..forms.len())];
            let j = rng.random_range(0..3);
            let k = rng.random_range(0..3);
            let l = rng.random_range(0..3);
            f.add_null_form(j, form, k, l, rng.random_range(-2.0..2.0));
        }
        assert!(f.check_null_condition().holds);
    }
    // Presets fail with valid witnesses.
    for name in ["simplestEx", "LogEx", "RotEx"] {
        let f = preset(name).unwrap().nonlinearity;
        let r = f.check_null_condition();
        assert!(!r.holds, "{name} must fail the null condition");
        let w = r.witness.expect("witness");
        let val = f.eval_reduced(w.omega, &w.x, &w.y).unwrap();
        let max = val.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(max > 1e-6, "{name}: witness does not witness (|F^red| = {max})");
    }
    assert!(t0.elapsed().as_secs_f64() < 1.0, "budget exceeded: {:?}", t0.elapsed());
    pass(1, format!("exact classifier over all null forms and presets in {:.0?}", t0.elapsed()));
}

// --- 2. Alinhac verification -------------------------------------------

#[test]
fn criterion_02_alinhac_verification() {
    let t0 = std::time::Instant::now();
    let p = preset("simplestEx").unwrap();
    let report = verify_alinhac(&p.nonlinearity, &p.alinhac.unwrap(), 10_000).unwrap();
    assert!(report.residual_rank_one < 1e-12, "AA-1 residual {}", report.residual_rank_one);
    assert!(
        report.residual_factorization < 1e-12,
        "AAB-1 residual {}",
        report.residual_factorization
    );
    assert!(report.residual_kernel < 1e-12, "AAB-2 residual {}", report.residual_kernel);
    assert!(t0.elapsed().as_secs_f64() < 1.0);
    pass(
        2,
        format!(
            "residuals ({:.1e}, {:.1e}, {:.1e}) over 10⁴ samples in {:.0?}",
            report.residual_rank_one,
            report.residual_factorization,
            report.residual_kernel,
            t0.elapsed()
        ),
    );
}

// --- 3. Extended system -------------------------------------------------

#[test]
fn criterion_03_extended_system() {
    let t0 = std::time::Instant::now();
    let p = preset("simplestEx").unwrap();
    let data = p.alinhac.unwrap();
    let ext = build_extended_system(&p.nonlinearity, &data).unwrap();
    assert_eq!(ext.f_star.n_total(), 11);

    // Coefficient-level equality in the second-order jet algebra:
    // the built w-equation is Q₁₂(w, u₁) with w = ∂₁u₂ − ∂₂u₁.
    let built = jet::w_equation_polynomial(&ext.f_star, 2, 10);
    let mut reference = jet::JetPoly::new();
    // Q₁₂(w, u₁) = (∂₁w)(∂₂u₁) − (∂₂w)(∂₁u₁).
    reference.add_d2_d1(1, (1, 1), 0, 2, 1.0);
    reference.add_d2_d1(0, (1, 2), 0, 2, -1.0);
    reference.add_d2_d1(1, (1, 2), 0, 1, -1.0);
    reference.add_d2_d1(0, (2, 2), 0, 1, 1.0);
    let dist = built.distance(&reference);
    assert!(dist < 1e-12, "jet-coefficient distance {dist}");

    // Manufactured cubic solution: the w-equation holds up to the
    // manufacturing defect, □w − F*_w = Σ h ∂_a(□u − F).
    let resid = jet::manufactured_residual(&p.nonlinearity, &ext.f_star, &data, 404);
    assert!(resid < 1e-6, "manufactured residual {resid}");
    assert!(t0.elapsed().as_secs_f64() < 1.0);
    pass(
        3,
        format!("Q₁₂ structure matches (dist {dist:.1e}), manufactured residual {resid:.1e}"),
    );
}

// --- 4. Radiation fields -------------------------------------------------

#[test]
fn criterion_04_radiation_fields() {
    let t0 = std::time::Instant::now();
    // Plane quadrature against the radial closed form.
    let psi = RadialProfile::bump_poly(vec![0.8, 0.3, -0.2], 1.7);
    let h = |y: [f64; 3]| psi.value((y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt());
    let mut worst_radon = 0.0f64;
    for sigma in [0.0, 0.3, -0.7, 1.1, -1.4] {
        for omega in [[1.0, 0.0, 0.0], [0.48, -0.6, 0.64]] {
            let plane = radon_transform(&h, 1.7, sigma, omega, RadonParams::default());
            let exact = radon_radial(&psi, sigma);
            if exact.abs() > 1e-12 {
                worst_radon = worst_radon.max((plane - exact).abs() / exact.abs());
            }
        }
    }
    assert!(worst_radon < 1e-6, "radon mismatch {worst_radon}");

    // Prescribed-field constructor hits (α, β).
    let mut worst_prescribed = 0.0f64;
    for (sigma0, alpha, beta) in [(1.0, 1.0, 0.0), (2.0, 0.5, -1.0), (-1.5, -0.4, 0.7), (0.7, 0.0, 2.0)] {
        let d = make_data_with_prescribed_field(sigma0, alpha, beta).unwrap();
        let (a, b) = friedlander_radial(&d, sigma0).unwrap();
        worst_prescribed = worst_prescribed.max((a - alpha).abs()).max((b - beta).abs());
    }
    assert!(worst_prescribed < 1e-5, "prescribed-field error {worst_prescribed}");

    // Lax–Phillips isometry on 5 seeded random radial data.
    let mut rng = StdRng::seed_from_u64(404);
    let mut worst_iso = 0.0f64;
    for _ in 0..5 {
        let coeffs: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let coeffs_psi: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = rng.random_range(1.5..2.5);
        let data = InitialData::radial(
            RadialProfile::bump_poly(coeffs, r),
            RadialProfile::bump_poly(coeffs_psi, r),
            1.0,
        );
        let t = translation_l2_radial(&data).unwrap();
        let h0 = h0_norm(&data);
        if h0 > 1e-12 {
            worst_iso = worst_iso.max((t - h0).abs() / h0);
        }
    }
    assert!(worst_iso < 1e-4, "isometry mismatch {worst_iso}");
    assert!(t0.elapsed().as_secs_f64() < 10.0);
    pass(
        4,
        format!(
            "radon {worst_radon:.1e}, prescribed {worst_prescribed:.1e}, isometry {worst_iso:.1e} in {:.1?}",
            t0.elapsed()
        ),
    );
}

// --- 5. Free-wave suite ---------------------------------------------------

#[test]
fn criterion_05_free_wave_suite() {
    let t0 = std::time::Instant::now();
    let data = InitialData::radial(
        RadialProfile::bump_poly(vec![1.0, -0.5], 1.5),
        RadialProfile::bump_poly(vec![0.6, 0.2], 1.5),
        1.0,
    );
    // Huygens: zero outside |r − t| ≥ R.
    let peak = 1.0;
    let mut worst_huygens = 0.0f64;
    for (t, r) in [(5.0, 1.0), (5.0, 9.5), (12.0, 6.0), (30.0, 35.0), (80.0, 75.0)] {
        let v = kirchhoff_eval(&data, t, [0.0, 0.0, r]);
        worst_huygens = worst_huygens.max(v.u0.abs());
        for a in 0..4 {
            worst_huygens = worst_huygens.max(v.du0[a].abs());
        }
    }
    assert!(worst_huygens < 1e-10 * peak, "huygens residual {worst_huygens}");

    // FriedAsymp ray decay rate over t ∈ [10, 80].
    let sigma = 0.5;
    let omega = [0.6, 0.64, 0.48];
    let (f0, df0) = friedlander_radial(&data, sigma).unwrap();
    let w4 = [-1.0, omega[0], omega[1], omega[2]];
    let mut pts = Vec::new();
    let mut t = 10.0;
    while t <= 80.0 {
        let r = t + sigma;
        let v = kirchhoff_eval(&data, t, [r * omega[0], r * omega[1], r * omega[2]]);
        let mut resid = (r * v.u0 - f0).abs();
        for a in 0..4 {
            resid += (r * v.du0[a] - w4[a] * df0).abs();
        }
        pts.push((t.ln(), resid.max(1e-300).ln()));
        t *= 1.25;
    }
    let rate = fit_slope(&pts);
    assert!((rate + 1.0).abs() < 0.2, "fitted ray rate {rate}");
    assert!(t0.elapsed().as_secs_f64() < 60.0);
    pass(
        5,
        format!("huygens {worst_huygens:.1e}·peak, ray rate {rate:.3} in {:.1?}", t0.elapsed()),
    );
}

// --- 6. Matrix exponentials ------------------------------------------------

#[test]
fn criterion_06_matrix_exponentials() {
    let t0 = std::time::Instant::now();
    // Generic expm against a 30-term Taylor oracle for ‖M‖ ≤ 1.
    let mut rng = StdRng::seed_from_u64(606);
    let mut worst_taylor = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(2..5);
        let mut m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let norm = m.norm();
        if norm > 1.0 {
            m /= norm;
        }
        let e = matrix_exp(&m);
        let mut taylor = DMatrix::identity(n, n);
        let mut term = DMatrix::identity(n, n);
        for k in 1..=30 {
            term = &term * &m / k as f64;
            taylor += &term;
        }
        worst_taylor = worst_taylor.max((&e - &taylor).norm());
    }
    assert!(worst_taylor < 1e-12, "Taylor-oracle distance {worst_taylor}");

    // The three closed forms over τ ∈ [0, 10], |ζ|, |∂σζ| ≤ 2, with the
    // ω₁ → 0 limit entry. Differences are measured relative to the entry
    // scale once it exceeds 1 (the exponentials reach e^10).
    let mut worst_closed = 0.0f64;
    let dist = |got: f64, want: f64| (got - want).abs() / want.abs().max(1.0);
    let taus = [0.0, 0.25, 1.0, 3.0, 10.0];
    let zetas = [-2.0, -1.0, -0.25, 0.0, 0.5, 2.0];
    for omega in [[0.6, 0.8, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
        for &tau in &taus {
            for &z in &zetas {
                let m = DMatrix::from_row_slice(
                    2,
                    2,
                    &[-0.5 * z * omega[0], 0.0, -0.5 * z * omega[1], 0.0],
                );
                let e = matrix_exp(&(&m * tau));
                let x = -0.5 * tau * omega[0] * z;
                let off = if omega[0] != 0.0 {
                    omega[1] / omega[0] * x.exp_m1()
                } else {
                    -0.5 * tau * omega[1] * z
                };
                worst_closed = worst_closed
                    .max(dist(e[(0, 0)], x.exp()))
                    .max(dist(e[(1, 0)], off))
                    .max(dist(e[(1, 1)], 1.0))
                    .max(e[(0, 1)].abs());
            }
        }
    }
    for &tau in &taus {
        for &dz in &zetas {
            let unip = matrix_exp(&DMatrix::from_row_slice(2, 2, &[0.0, dz * tau, 0.0, 0.0]));
            worst_closed = worst_closed
                .max(dist(unip[(0, 1)], tau * dz))
                .max(dist(unip[(0, 0)], 1.0));
            let rot = matrix_exp(&(DMatrix::from_row_slice(2, 2, &[0.0, dz, -dz, 0.0]) * tau));
            let ang = tau * dz;
            worst_closed = worst_closed
                .max(dist(rot[(0, 0)], ang.cos()))
                .max(dist(rot[(0, 1)], ang.sin()));
        }
    }
    assert!(worst_closed < 1e-10, "closed-form distance {worst_closed}");

    // Rank-one formula against the generic exponential, 10³ cases.
    let mut worst_rank_one = 0.0f64;
    for _ in 0..1000 {
        let n = rng.random_range(2..6);
        let p: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let q: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let tau: f64 = rng.random_range(0.0..3.0);
        let b = DMatrix::from_fn(n, n, |i, j| q[i] * p[j]);
        let oracle = matrix_exp(&(b * tau)) * DVector::from_vec(y.clone());
        let got = rank_one_exp(&p, &q, tau, &y);
        for i in 0..n {
            worst_rank_one = worst_rank_one.max((got[i] - oracle[i]).abs());
        }
    }
    assert!(worst_rank_one < 1e-10, "rank-one distance {worst_rank_one}");
    assert!(t0.elapsed().as_secs_f64() < 5.0);
    pass(
        6,
        format!(
            "taylor {worst_taylor:.1e}, closed forms {worst_closed:.1e}, rank-one {worst_rank_one:.1e}"
        ),
    );
}

// --- 7. Reduced system -------------------------------------------------------

#[test]
fn criterion_07_reduced_system() {
    let t0 = std::time::Instant::now();
    let geom = GridGeometry::new(-2.0, 2.0, 41, SphereQuadrature::product(2, 2)).unwrap();

    let constant_profiles = |f: &QuadraticNonlinearity, value: f64| {
        let n = f.n_total();
        let mut p0 = ProfileGrid::zeros(geom.clone(), n);
        let mut u0 = ProfileGrid::zeros(geom.clone(), n);
        for c in 0..n {
            p0.fill_component(c, |_, _| value);
            u0.fill_component(c, |s, _| -value * (geom.sigma_max - s));
        }
        (p0, u0)
    };

    // Closed form P(τ) = P0/(1 + P0 τ/2) at τ = 1 with dτ = 1e-3.
    let dtu2 = preset("dtu2").unwrap().nonlinearity;
    let (p0, u0) = constant_profiles(&dtu2, 1.0);
    let sol = integrate_reduced_system(&dtu2, &p0, &u0, 1.0, 1e-3).unwrap();
    let mut worst_closed = 0.0f64;
    for i in 0..geom.n_sigma {
        worst_closed = worst_closed.max((sol.p.values[[0, i, 0]] - 1.0 / 1.5).abs());
    }
    assert!(worst_closed < 1e-8, "closed-form error {worst_closed}");

    // Blow-up time for P0 = −1.
    let (p0, u0) = constant_profiles(&dtu2, -1.0);
    let sol = integrate_reduced_system(&dtu2, &p0, &u0, 3.0, 1e-3).unwrap();
    let tau_star = sol.blowup.expect("blow-up expected");
    assert!((tau_star - 2.0).abs() <= 0.002, "τ* = {tau_star}");

    // Null preset: exactly constant (bitwise).
    let null = preset("null_demo").unwrap().nonlinearity;
    let n = null.n_total();
    let mut p0 = ProfileGrid::zeros(geom.clone(), n);
    let mut u0 = ProfileGrid::zeros(geom.clone(), n);
    for c in 0..n {
        p0.fill_component(c, |s, _| ((c + 1) as f64 * s).sin());
    }
    let ds = geom.dsigma();
    for c in 0..n {
        for w in 0..geom.sphere.len() {
            let mut acc = 0.0;
            for i in (0..geom.n_sigma - 1).rev() {
                acc -= 0.5 * ds * (p0.values[[c, i, w]] + p0.values[[c, i + 1, w]]);
                u0.values[[c, i, w]] = acc;
            }
        }
    }
    let sol = integrate_reduced_system(&null, &p0, &u0, 2.0, 1e-2).unwrap();
    assert_eq!(sol.p.values, p0.values, "null preset must not move at all");
    assert!(t0.elapsed().as_secs_f64() < 10.0);
    pass(
        7,
        format!("closed form {worst_closed:.1e}, τ* = {tau_star:.4}, null exactly constant"),
    );
}

// --- 8. Spectral classification -----------------------------------------------

#[test]
fn criterion_08_spectral_classification() {
    let t0 = std::time::Instant::now();
    for (name, expected) in [
        ("null_demo", Verdict::Null),
        ("simplestEx", Verdict::PositiveRealPart),
        ("LogEx", Verdict::NilpotentLogGrowth),
        ("RotEx", Verdict::ImaginaryRotation),
    ] {
        let g = preset(name).unwrap().g_coeffs.unwrap();
        let r = classify_seeded(&g, None, 2000, 0).unwrap();
        assert_eq!(r.verdict, expected, "{name}");
    }

    // z_membership against the expm-convergence oracle on 10³ random
    // matrices whose spectra stay ≥ 0.8 from the imaginary axis; the
    // oracle discriminates convergence at 1e-6.
    let mut rng = StdRng::seed_from_u64(808);
    let mut tested = 0;
    let mut agreements = 0;
    while tested < 1000 {
        let n = rng.random_range(2..5);
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.5..1.5));
        if eigenvalues(&m).iter().any(|e| e.re.abs() < 0.8) {
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
        if z_membership(&m, &y) == converged {
            agreements += 1;
        }
    }
    assert_eq!(agreements, tested, "z_membership disagreed on {} cases", tested - agreements);
    assert!(t0.elapsed().as_secs_f64() < 10.0);
    pass(
        8,
        format!("verdict table exact; z_membership 1000/1000 vs expm oracle in {:.1?}", t0.elapsed()),
    );
}

fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

// --- 9. Solver suite -----------------------------------------------------

#[test]
fn criterion_09_solver_suite() {
    use semiwave::solver::{GridConfig, WaveState};
    let t0 = std::time::Instant::now();

    // Free-wave run at the default grid: energy drift and causal support.
    let free = QuadraticNonlinearity::zeros(1, 1);
    let mut data = InitialData::radial(
        RadialProfile::quartic_bump(1.0, 3.0),
        RadialProfile::quartic_bump(0.6, 3.0),
        1.0,
    );
    data.support_radius = 4.5;
    let grid = GridConfig::default();
    let mut state = WaveState::init(&free, &[data.clone()], &grid).unwrap();
    let e0 = state.energy(&[0]);
    let mut worst_drift = 0.0f64;
    let mut worst_support = 0.0f64;
    while state.time() < runs::T_MAX - 1e-9 {
        state.step().unwrap();
        let steps = (state.time() / state.dt()).round() as usize;
        if steps % 64 == 0 {
            worst_drift = worst_drift.max(((state.energy(&[0]) - e0) / e0).abs());
            worst_support = worst_support.max(state.support_violation());
        }
    }
    worst_drift = worst_drift.max(((state.energy(&[0]) - e0) / e0).abs());
    worst_support = worst_support.max(state.support_violation());
    assert!(worst_drift < 0.01, "energy drift {worst_drift}");
    assert!(worst_support < 1e-8, "support violation {worst_support}");

    // Observed spatial order against the Kirchhoff oracle.
    let probe_pts = [[0.7, -0.4, 0.2], [1.6, 0.3, -0.5], [0.1, 1.1, 0.8]];
    let mut errs = Vec::new();
    for h in [0.2, 0.1] {
        let grid = GridConfig { l: 8.0, h, dt: h / 4.0 };
        let mut s = WaveState::init(&free, &[data.clone()], &grid).unwrap();
        while s.time() < 1.5 - 1e-9 {
            s.step().unwrap();
        }
        let mut err = 0.0f64;
        for p in probe_pts {
            let num = s.probe(p).unwrap()[0].0;
            let exact = kirchhoff_eval(&data, s.time(), p).u0;
            err = err.max((num - exact).abs());
        }
        errs.push(err);
    }
    let order = (errs[0] / errs[1]).log2();
    assert!((1.7..=2.3).contains(&order), "observed order {order}");
    pass(
        9,
        format!(
            "drift {worst_drift:.2e}, support {worst_support:.1e}, order {order:.2} in {:.0?}",
            t0.elapsed()
        ),
    );
}

// --- 10. Qualitative energy laws ------------------------------------------

/// RotEx: the energy stays within ±10% of its t = 4 value.
#[test]
fn criterion_10a_rot_ex_energy_bounded() {
    let run = runs::rot_ex_run();
    let e4 = run.energy_at(4.0);
    let mut worst = 0.0f64;
    for (t, e) in &run.energies {
        if *t >= 4.0 {
            worst = worst.max((e / e4 - 1.0).abs());
        }
    }
    assert!(worst < 0.10, "RotEx energy wandered {worst:+.3}");
    pass(10, format!("RotEx energy within ±{:.2}% of E(4)", 100.0 * worst));
}

/// simplestEx with Lemma-RadConst data arranged so ω₁W < 0 on a cap:
/// the spec expects monotone energy increase over [4, 24].
///
/// EXPECTED RED at desk scale: for the RadConst family every ∂σℱ₀ is odd
/// in σ, so the order-ε energy change cancels identically on the sphere
/// average, and the remaining second-order growth (ε·b̂·log t)² is
/// dominated by the paper's own transfer error t^{3λ+Cε−1/2} until far
/// beyond t = 24. Measured at b̂ ∈ {4, 8} (and h-refined): E declines by
/// ~0.1–0.7% instead. See the assessment in the repository notes; the
/// assertion is kept as specified.
#[test]
fn criterion_10b_simplest_ex_energy_growth() {
    let p = preset("simplestEx").unwrap();
    let b_hat = 4.0;
    let mut d1 = make_data_with_prescribed_field(2.0, 0.0, b_hat).unwrap();
    d1.eps = runs::EPS;
    d1.support_radius = 4.25;
    let mut d2 = make_data_with_prescribed_field(2.0, 0.0, -b_hat).unwrap();
    d2.eps = runs::EPS;
    d2.support_radius = 4.25;
    let run = runs::production_run(&p.nonlinearity, vec![d1, d2], &[]);
    let series: Vec<(f64, f64)> =
        run.energies.iter().filter(|(t, _)| *t >= 4.0).cloned().collect();
    let mut monotone = true;
    for w in series.windows(2) {
        if w[1].1 <= w[0].1 {
            monotone = false;
        }
    }
    let ratio = series.last().unwrap().1 / series[0].1;
    if monotone {
        pass(10, format!("simplestEx energy increased monotonically (E(24)/E(4) = {ratio:.4})"));
    } else {
        println!(
            "[FAIL] criterion 10: simplestEx energy not monotone (E(24)/E(4) = {ratio:.4}); \
             desk-scale growth is below the transfer-error floor — see notes"
        );
    }
    assert!(
        monotone,
        "simplestEx energy not monotonically increasing (E(24)/E(4) = {ratio:.4}); \
         expected red: desk-scale growth unobservable, see decisions notes"
    );
}

/// LogEx: E(t) − E(4) grows sublinearly in t and approximately linearly
/// in log(1+t); the log-linear fit must beat the power-law fit.
#[test]
fn criterion_10c_log_ex_energy_log_growth() {
    use semiwave::analysis::{fit_energy_growth, FitModel};
    let p = preset("LogEx").unwrap();
    let mk = || {
        let mut d = InitialData::radial(
            RadialProfile::quartic_bump(3.0, 3.0),
            RadialProfile::zero(),
            runs::EPS,
        );
        d.support_radius = 4.5;
        d
    };
    let run = runs::production_run(&p.nonlinearity, vec![mk(), mk(), mk()], &[]);
    let e4 = run.energy_at(4.0);
    let diffs: Vec<(f64, f64)> = run
        .energies
        .iter()
        .filter(|(t, _)| *t > 4.0)
        .map(|(t, e)| (*t, e - e4))
        .collect();
    assert!(diffs.iter().all(|(_, d)| *d > 0.0), "LogEx energy failed to grow");
    // Sublinear in t: the power-fit exponent of E − E(4) sits below 1.
    let power = fit_energy_growth(&diffs, FitModel::PowerInT).unwrap();
    assert!(power.params[0] < 1.0, "superlinear growth: exponent {}", power.params[0]);
    // Log-linear beats power-law.
    let loglin = fit_energy_growth(&diffs, FitModel::LogLinear).unwrap();
    assert!(
        loglin.r2 > power.r2,
        "log-linear R² {} did not beat power R² {}",
        loglin.r2,
        power.r2
    );
    pass(
        10,
        format!(
            "LogEx growth sublinear (exp {:.2}), log-linear R² {:.6} > power R² {:.6}",
            power.params[0], loglin.r2, power.r2
        ),
    );
}

// --- 11. Modified-profile stability ----------------------------------------

#[test]
fn criterion_11_modified_profile_stability() {
    use semiwave::analysis::{extract_modified_v, extract_w, RayBundle};
    use semiwave::profiles::build_a_of_w;
    let run = runs::rot_ex_run();
    let bundle = RayBundle::from_probes(run.probes.clone()).unwrap();
    let wex = extract_w(&bundle, &[2], runs::EPS, None).unwrap();
    let g = preset("RotEx").unwrap().g_coeffs.unwrap();
    let a = build_a_of_w(&g, &wex.w, runs::EPS).unwrap();
    let modv = extract_modified_v(&bundle, &[0, 1], runs::EPS, &a).unwrap();
    let dw = wex.w.sigma_derivative();
    let log2 = std::f64::consts::LN_2;
    let mut qualifying = 0;
    let mut min_ratio = f64::INFINITY;
    for is in 0..bundle.sigmas.len() {
        for id in 0..bundle.directions.len() {
            let ray = is * bundle.directions.len() + id;
            let phase = runs::EPS * dw.values[[0, is, id]].abs() * log2;
            if phase >= 0.1 {
                qualifying += 1;
                let ratio = modv.var_raw[ray] / modv.var_modified[ray].max(1e-300);
                min_ratio = min_ratio.min(ratio);
                assert!(
                    ratio >= 2.0,
                    "ray (σ = {}, dir {id}): variance ratio {ratio:.2} < 2 at phase {phase:.3}",
                    bundle.sigmas[is]
                );
            }
        }
    }
    assert!(qualifying >= 8, "only {qualifying} rays reached the phase threshold");
    pass(
        11,
        format!("{qualifying} qualifying rays, min variance ratio {min_ratio:.1}"),
    );
}
