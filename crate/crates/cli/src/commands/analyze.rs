//! `semiwave analyze`: null-condition decision, Alinhac verification when
//! factorization data is available, and spectral classification of the
//! structure coefficients.

use super::write_json;
use crate::config::RunConfig;
use crate::CmdError;
use semiwave::algebra::verify_alinhac_seeded;
use semiwave::profiles::classify_seeded;
use serde_json::json;
use std::io::Write;

pub fn run(cfg: &RunConfig) -> Result<(), CmdError> {
    let nc = cfg.nonlinearity.check_null_condition();
    let decomposition = cfg
        .nonlinearity
        .decompose_null_forms()
        .map_err(|e| CmdError::Runtime(e.to_string()))?;

    let alinhac = match &cfg.alinhac {
        Some(data) => Some(
            verify_alinhac_seeded(&cfg.nonlinearity, data, cfg.raw.alinhac_samples, cfg.raw.seed)
                .map_err(|e| CmdError::Runtime(e.to_string()))?,
        ),
        None => None,
    };

    let classification = match &cfg.g_coeffs {
        Some(g) => Some(
            classify_seeded(g, None, cfg.raw.classify_samples, cfg.raw.seed)
                .map_err(|e| CmdError::Runtime(e.to_string()))?,
        ),
        None => None,
    };

    let report = json!({
        "preset": cfg.preset_name,
        "null_condition": {
            "holds": nc.holds,
            "max_residual_coefficient": nc.max_residual_coefficient,
            "witness": nc.witness.as_ref().map(|w| json!({
                "omega": w.omega, "x": w.x, "y": w.y, "value": w.value,
            })),
        },
        "null_form_decomposition": decomposition.is_some(),
        "alinhac": alinhac,
        "classification": classification,
    });
    write_json(&cfg.out_dir.join("classification.json"), &report)?;

    let mut csv = std::fs::File::create(cfg.out_dir.join("witnesses.csv"))?;
    writeln!(csv, "kind,omega1,omega2,omega3,xi,eta,eigenvalues")?;
    if let Some(w) = &nc.witness {
        writeln!(
            csv,
            "null_condition,{},{},{},\"{:?}\",\"{:?}\",",
            w.omega[0], w.omega[1], w.omega[2], w.x, w.y
        )?;
    }
    if let Some(c) = &classification {
        for w in &c.witnesses {
            writeln!(
                csv,
                "{},{},{},{},\"{:?}\",\"{:?}\",\"{:?}\"",
                w.kind, w.omega[0], w.omega[1], w.omega[2], w.xi, w.eta, w.eigenvalues
            )?;
        }
        println!(
            "verdict: {} (max Re λ = {:.3e}, max ‖B‖ = {:.3e})",
            c.verdict, c.max_real_part, c.b_norm_max
        );
    } else {
        println!(
            "verdict: null condition {} (no structure coefficients for spectral classification)",
            if nc.holds { "holds" } else { "fails" }
        );
    }
    Ok(())
}
