//! Prototype of the three qualitative production runs (energy laws and
//! modified-profile variance) before freezing them into the acceptance
//! suite. Run: cargo run --release --example accept_probe -- <which>

use semiwave::algebra::preset;
use semiwave::analysis::{extract_modified_v, extract_w, RayBundle};
use semiwave::profiles::build_a_of_w;
use semiwave::radiation::{make_data_with_prescribed_field, InitialData, RadialProfile};
use semiwave::solver::{GridConfig, RayProbe, WaveState};

const EPS: f64 = 0.05;
const T_MAX: f64 = 24.0;

fn grid() -> GridConfig {
    GridConfig { l: 32.0, h: 0.25, dt: 0.0625 }
}

fn run(
    name: &str,
    f: &semiwave::algebra::QuadraticNonlinearity,
    data: Vec<InitialData>,
    rays: Vec<(f64, [f64; 3])>,
) -> (Vec<(f64, f64)>, Vec<RayProbe>) {
    let n = f.n_total();
    let mut state = WaveState::init(f, &data, &grid()).unwrap();
    let all: Vec<usize> = (0..n).collect();
    let mut probes: Vec<RayProbe> = rays.iter().map(|(s, o)| RayProbe::new(*s, *o, n)).collect();
    let mut energies = vec![(0.0, state.energy(&all))];
    let t0 = std::time::Instant::now();
    while state.time() < T_MAX - 1e-9 {
        state.step().unwrap();
        let steps = (state.time() / state.dt()).round() as usize;
        if steps % 8 == 0 {
            for p in &mut probes {
                p.record(&state).unwrap();
            }
        }
        if steps % 32 == 0 {
            energies.push((state.time(), state.energy(&all)));
        }
    }
    println!(
        "{name}: {} steps in {:.1?}, support violation {:.2e}",
        (T_MAX / state.dt()).round(),
        t0.elapsed(),
        state.support_violation()
    );
    for (t, e) in &energies {
        if (t / 2.0).fract().abs() < 1e-9 {
            println!("  t = {t:5.1}  E = {e:.6e}  E/E(4) = {:.4}", e / energies.iter().find(|(tt, _)| (*tt - 4.0).abs() < 1e-6).map(|(_, e4)| *e4).unwrap_or(1.0));
        }
    }
    (energies, probes)
}

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "rot".into());
    match which.as_str() {
        "rot" => {
            let p = preset("RotEx").unwrap();
            let mut v1 = InitialData::radial(
                RadialProfile::quartic_bump(2.0, 5.0),
                RadialProfile::zero(),
                EPS,
            );
            v1.support_radius = 5.5;
            // Wide φ-type w-data: strong ∂σW at low wavenumber, so the
            // leapfrog dispersion error stays small out to t = 24.
            let mut w = InitialData::radial(
                RadialProfile::quartic_bump(12.0, 5.0),
                RadialProfile::zero(),
                EPS,
            );
            w.support_radius = 5.6;
            let sigmas = [2.45, 2.55, 2.65, 2.75, 2.85];
            let dirs = [
                [0.70710678118654752, 0.0, 0.70710678118654752],
                [0.0, -0.70710678118654752, 0.70710678118654752],
            ];
            let rays: Vec<(f64, [f64; 3])> = sigmas
                .iter()
                .flat_map(|s| dirs.iter().map(move |d| (*s, *d)))
                .collect();
            let (_, probes) = run("RotEx", &p.nonlinearity, vec![v1, InitialData::zero(), w], rays);
            // Extraction and variance comparison.
            let bundle = RayBundle::from_probes(probes).unwrap();
            let wex = extract_w(&bundle, &[2], EPS, None).unwrap();
            let g = p.g_coeffs.unwrap();
            let a = build_a_of_w(&g, &wex.w, EPS).unwrap();
            let modv = extract_modified_v(&bundle, &[0, 1], EPS, &a).unwrap();
            let dw = wex.w.sigma_derivative();
            for is in 0..bundle.sigmas.len() {
                for id in 0..bundle.directions.len() {
                    let ray = is * bundle.directions.len() + id;
                    let phase = EPS * dw.values[[0, is, id]].abs() * (2.0f64).ln();
                    println!(
                        "  ray σ={:.2} dir{}: dσW={:+.3} phase={:.3} var_raw={:.3e} var_mod={:.3e} ratio={:.1}",
                        bundle.sigmas[is],
                        id,
                        dw.values[[0, is, id]],
                        phase,
                        modv.var_raw[ray],
                        modv.var_modified[ray],
                        modv.var_raw[ray] / modv.var_modified[ray].max(1e-300),
                    );
                }
            }
        }
        "simplestfree" => {
            let b_hat: f64 = std::env::args().nth(2).and_then(|v| v.parse().ok()).unwrap_or(4.0);
            let mut d1 = make_data_with_prescribed_field(2.0, 0.0, b_hat).unwrap();
            d1.eps = EPS;
            d1.support_radius = 4.25;
            let mut d2 = make_data_with_prescribed_field(2.0, 0.0, -b_hat).unwrap();
            d2.eps = EPS;
            d2.support_radius = 4.25;
            let f0 = semiwave::algebra::QuadraticNonlinearity::zeros(2, 2);
            run("simplestEx-free", &f0, vec![d1, d2], vec![]);
        }
        "simplest" => {
            let p = preset("simplestEx").unwrap();
            let b_hat: f64 = std::env::args().nth(2).and_then(|v| v.parse().ok()).unwrap_or(4.0);
            let mut d1 = make_data_with_prescribed_field(2.0, 0.0, b_hat).unwrap();
            d1.eps = EPS;
            d1.support_radius = 4.25;
            let mut d2 = make_data_with_prescribed_field(2.0, 0.0, -b_hat).unwrap();
            d2.eps = EPS;
            d2.support_radius = 4.25;
            run("simplestEx", &p.nonlinearity, vec![d1, d2], vec![]);
        }
        "simplestfine" => {
            let p = preset("simplestEx").unwrap();
            let b_hat: f64 = std::env::args().nth(2).and_then(|v| v.parse().ok()).unwrap_or(8.0);
            let mut d1 = make_data_with_prescribed_field(2.0, 0.0, b_hat).unwrap();
            d1.eps = EPS;
            d1.support_radius = 4.25;
            let mut d2 = make_data_with_prescribed_field(2.0, 0.0, -b_hat).unwrap();
            d2.eps = EPS;
            d2.support_radius = 4.25;
            let n = 2;
            let grid = GridConfig { l: 20.0, h: 0.125, dt: 0.03125 };
            let mut state = WaveState::init(&p.nonlinearity, &[d1, d2], &grid).unwrap();
            let all: Vec<usize> = (0..n).collect();
            let mut energies = vec![(0.0, state.energy(&all))];
            while state.time() < 12.0 - 1e-9 {
                state.step().unwrap();
                let steps = (state.time() / state.dt()).round() as usize;
                if steps % 64 == 0 {
                    energies.push((state.time(), state.energy(&all)));
                }
            }
            let e4 = energies.iter().find(|(t, _)| (*t - 4.0).abs() < 1e-6).unwrap().1;
            for (t, e) in &energies {
                println!("  t = {t:5.2}  E = {e:.6e}  E/E(4) = {:.5}", e / e4);
            }
        }
        "log" => {
            let p = preset("LogEx").unwrap();
            let mk = || {
                let mut d = InitialData::radial(
                    RadialProfile::quartic_bump(3.0, 3.0),
                    RadialProfile::zero(),
                    EPS,
                );
                d.support_radius = 4.5;
                d
            };
            run("LogEx", &p.nonlinearity, vec![mk(), mk(), mk()], vec![]);
        }
        other => eprintln!("unknown probe {other}"),
    }
}
