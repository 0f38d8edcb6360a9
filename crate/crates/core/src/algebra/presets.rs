//! Named nonlinearity presets resolvable by string, together with the
//! structure data (v/w split coefficients, Alinhac factorization) that the
//! classifier and the profile machinery need.

use super::alinhac::AlinhacData;
use super::extended::{GCoefficients, GTensors};
use super::{NullForm, QuadraticNonlinearity};
use crate::error::{argument, Result};
use ndarray::{Array2, Array3};
use std::sync::Arc;

/// A named system: the nonlinearity plus whatever structure data the
/// preset carries.
pub struct Preset {
    pub name: &'static str,
    pub nonlinearity: QuadraticNonlinearity,
    /// Structure coefficients of the v/w split, when the preset has one.
    pub g_coeffs: Option<GCoefficients>,
    /// Alinhac factorization data, when the preset satisfies the condition.
    pub alinhac: Option<AlinhacData>,
}

pub fn preset_names() -> &'static [&'static str] {
    &["simplestEx", "simplestExR", "LogEx", "RotEx", "null_demo", "dtu2"]
}

/// Resolve a named preset.
pub fn preset(name: &str) -> Result<Preset> {
    match name {
        "simplestEx" => Ok(simplest_ex()),
        "simplestExR" => Ok(simplest_ex_r()),
        "LogEx" => Ok(log_ex()),
        "RotEx" => Ok(rot_ex()),
        "null_demo" => Ok(null_demo()),
        "dtu2" => Ok(dtu2()),
        other => Err(argument(format!(
            "unknown preset {other:?}; known presets: {}",
            preset_names().join(", ")
        ))),
    }
}

fn simplest_ex_alinhac() -> AlinhacData {
    // M = Y₁(ω₁Y₂ − ω₂Y₁), β = (ω₁, ω₂), N₀ = 1,
    // g₁₁ = ω₁Y₁, g₂₁ = ω₂Y₁, h₁ = ω₁Y₂ − ω₂Y₁.
    let g = Arc::new(|omega: [f64; 3]| {
        let mut g = Array3::zeros((2, 1, 2));
        g[[0, 0, 0]] = omega[0];
        g[[1, 0, 0]] = omega[1];
        g
    });
    let mut h_const = Array3::zeros((1, 2, 4));
    h_const[[0, 1, 1]] = 1.0; // ω₁ Y₂
    h_const[[0, 0, 2]] = -1.0; // −ω₂ Y₁
    let beta = Arc::new(|omega: [f64; 3]| vec![omega[0], omega[1]]);
    let m = Arc::new(|omega: [f64; 3]| {
        let mut m = Array2::zeros((2, 2));
        m[[0, 0]] = -omega[1];
        m[[0, 1]] = 0.5 * omega[0];
        m[[1, 0]] = 0.5 * omega[0];
        m
    });
    AlinhacData { n0: 1, g, h_const, beta, m }
}

/// Structure coefficients of the reduction of `simplestEx`:
/// □v₁ = w ∂₁v₁, □v₂ = w ∂₂v₁ with v = (u₁, u₂), scalar w.
fn simplest_ex_g_coeffs() -> GCoefficients {
    let mut t = GTensors::zeros(2, 1);
    t.c[[0, 0, 1, 0]] = 1.0;
    t.c[[1, 0, 2, 0]] = 1.0;
    GCoefficients::constant(2, 1, t)
}

/// □u₁ = (∂₁u₁)(∂₁u₂ − ∂₂u₁), □u₂ = (∂₂u₁)(∂₁u₂ − ∂₂u₁).
fn simplest_ex() -> Preset {
    let mut f = QuadraticNonlinearity::zeros(2, 2);
    f.add_dudu(0, 0, 1, 1, 1, 1.0);
    f.add_dudu(0, 0, 1, 0, 2, -1.0);
    f.add_dudu(1, 0, 2, 1, 1, 1.0);
    f.add_dudu(1, 0, 2, 0, 2, -1.0);
    Preset {
        name: "simplestEx",
        nonlinearity: f,
        g_coeffs: Some(simplest_ex_g_coeffs()),
        alinhac: Some(simplest_ex_alinhac()),
    }
}

/// The reduction of `simplestEx` with w = ∂₁u₂ − ∂₂u₁ adjoined:
/// □v₁ = w ∂₁v₁, □v₂ = w ∂₂v₁, □w = Q₁₂(w, v₁).
fn simplest_ex_r() -> Preset {
    let mut f = QuadraticNonlinearity::zeros(3, 2);
    f.add_udu(0, 2, 0, 1, 1.0);
    f.add_udu(1, 2, 0, 2, 1.0);
    f.add_null_form(2, NullForm::Qab(1, 2), 2, 0, 1.0);
    Preset {
        name: "simplestExR",
        nonlinearity: f,
        g_coeffs: Some(simplest_ex_g_coeffs()),
        alinhac: None,
    }
}

/// □v₁ = −2(∂_t w)(∂_t v₂), □v₂ = 0, □w = 0. Profiles pick up a
/// unipotent matrix exponential (logarithmic energy growth).
fn log_ex() -> Preset {
    let mut f = QuadraticNonlinearity::zeros(3, 2);
    f.add_dudu(0, 2, 0, 1, 0, -2.0);
    let mut t = GTensors::zeros(2, 1);
    t.d[[0, 1, 0, 0, 0]] = -2.0;
    Preset {
        name: "LogEx",
        nonlinearity: f,
        g_coeffs: Some(GCoefficients::constant(2, 1, t)),
        alinhac: None,
    }
}

/// □v₁ = −2(∂_t w)(∂_t v₂), □v₂ = 2(∂_t w)(∂_t v₁), □w = 0. Profiles
/// rotate; the energy stays bounded.
fn rot_ex() -> Preset {
    let mut f = QuadraticNonlinearity::zeros(3, 2);
    f.add_dudu(0, 2, 0, 1, 0, -2.0);
    f.add_dudu(1, 2, 0, 0, 0, 2.0);
    let mut t = GTensors::zeros(2, 1);
    t.d[[0, 1, 0, 0, 0]] = -2.0;
    t.d[[1, 0, 0, 0, 0]] = 2.0;
    Preset {
        name: "RotEx",
        nonlinearity: f,
        g_coeffs: Some(GCoefficients::constant(2, 1, t)),
        alinhac: None,
    }
}

/// A null-condition demonstration system:
/// □u₁ = Q₀(u₁, u₂), □u₂ = Q₁₂(u₁, u₂).
fn null_demo() -> Preset {
    let mut f = QuadraticNonlinearity::zeros(2, 2);
    f.add_null_form(0, NullForm::Q0, 0, 1, 1.0);
    f.add_null_form(1, NullForm::Qab(1, 2), 0, 1, 1.0);
    Preset {
        name: "null_demo",
        nonlinearity: f,
        g_coeffs: Some(GCoefficients::null_system(2)),
        alinhac: Some(AlinhacData::trivial(2)),
    }
}

/// The single equation □u = (∂_t u)², whose reduced system
/// ∂_τ P = −P²/2 has the closed form P(τ) = P₀/(1 + P₀τ/2).
fn dtu2() -> Preset {
    let mut f = QuadraticNonlinearity::zeros(1, 1);
    f.add_dudu(0, 0, 0, 0, 0, 1.0);
    Preset { name: "dtu2", nonlinearity: f, g_coeffs: None, alinhac: None }
}
