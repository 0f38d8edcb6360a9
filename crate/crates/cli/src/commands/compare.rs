//! `semiwave compare`: post-process a finished `simulate` run against the
//! asymptotic predictions — profile extraction, energy-growth fits, and
//! (when snapshots exist) shell-energy residuals.

use super::write_json;
use crate::config::RunConfig;
use crate::CmdError;
use semiwave::analysis::{
    extract_modified_v, extract_w, fit_energy_growth, shell_energy_compare, FieldSnapshot,
    FitModel, RayBundle,
};
use semiwave::profiles::build_a_of_w;
use semiwave::radiation::{friedlander_radial, ProfileGrid};
use semiwave::solver::RayProbe;
use serde_json::json;
use std::io::Write;
use std::path::Path;

pub fn run(cfg: &RunConfig) -> Result<(), CmdError> {
    let rays_path = cfg.out_dir.join("rays.csv");
    let meta_path = cfg.out_dir.join("rays_meta.json");
    let energy_path = cfg.out_dir.join("energy.csv");
    for p in [&rays_path, &meta_path, &energy_path] {
        if !p.exists() {
            return Err(CmdError::MissingInputs(format!(
                "missing input {}: run `semiwave simulate` first",
                p.display()
            )));
        }
    }
    let probes = load_probes(&rays_path, &meta_path, cfg.nonlinearity.n_total())?;
    let bundle = RayBundle::from_probes(probes).map_err(|e| CmdError::Runtime(e.to_string()))?;

    // v/w split from the structure coefficients when present, else from
    // the nonlinearity's declared split.
    let (n_v, n_w) = match &cfg.g_coeffs {
        Some(g) => (g.n_v, g.n_w),
        None => (cfg.nonlinearity.n_v(), cfg.nonlinearity.n_w()),
    };
    let v_comps: Vec<usize> = (0..n_v).collect();
    let w_comps: Vec<usize> = (n_v..n_v + n_w).collect();
    let eps = cfg.raw.eps;

    let mut summary = json!({});
    let geometry = bundle.geometry().map_err(|e| CmdError::Runtime(e.to_string()))?;

    // Reference ∂σ-free fields (radial data only).
    let f0_of = |comps: &[usize]| -> Option<ProfileGrid> {
        let mut grid = ProfileGrid::zeros(geometry.clone(), comps.len());
        for (slot, &c) in comps.iter().enumerate() {
            let data = &cfg.data[c];
            if !data.is_radial() {
                return None;
            }
            for (i, s) in bundle.sigmas.iter().enumerate() {
                let Ok((f0, _)) = friedlander_radial(data, *s) else { return None };
                for w in 0..bundle.directions.len() {
                    grid.values[[slot, i, w]] = f0;
                }
            }
        }
        Some(grid)
    };

    if !w_comps.is_empty() {
        let f0_w = f0_of(&w_comps);
        let extraction = extract_w(&bundle, &w_comps, eps, f0_w.as_ref())
            .map_err(|e| CmdError::Runtime(e.to_string()))?;
        let mut csv = std::fs::File::create(cfg.out_dir.join("w_profile.csv"))?;
        extraction.w.write_csv(&mut csv)?;
        summary["w_extraction"] = json!({
            "residual_fit": extraction.residual_fit,
            "f0_max_distance": extraction.f0_distance,
        });

        if let Some(g) = &cfg.g_coeffs {
            let a = build_a_of_w(g, &extraction.w, eps)
                .map_err(|e| CmdError::Runtime(e.to_string()))?;
            let modified = extract_modified_v(&bundle, &v_comps, eps, &a)
                .map_err(|e| CmdError::Runtime(e.to_string()))?;
            let mut csv = std::fs::File::create(cfg.out_dir.join("dsigma_v.csv"))?;
            modified.dsigma_v.write_csv(&mut csv)?;

            // Per-ray variance table with the phase-size qualifier
            // ε·|∂σW|·log(t_max/t_mid).
            let dw = extraction.w.sigma_derivative();
            let mut var_csv = std::fs::File::create(cfg.out_dir.join("variance.csv"))?;
            writeln!(
                var_csv,
                "sigma,omega1,omega2,omega3,var_raw,var_modified,phase_scale"
            )?;
            let log2 = std::f64::consts::LN_2;
            for (is, s) in bundle.sigmas.iter().enumerate() {
                for (id, o) in bundle.directions.iter().enumerate() {
                    let ray = is * bundle.directions.len() + id;
                    let mut dws = 0.0f64;
                    for slot in 0..w_comps.len() {
                        dws = dws.max(dw.values[[slot, is, id]].abs());
                    }
                    writeln!(
                        var_csv,
                        "{s:.4},{:.6},{:.6},{:.6},{:.10e},{:.10e},{:.6e}",
                        o[0],
                        o[1],
                        o[2],
                        modified.var_raw[ray],
                        modified.var_modified[ray],
                        eps * dws * log2
                    )?;
                }
            }
            let qualifying: Vec<usize> = (0..modified.var_raw.len())
                .filter(|ray| {
                    let is = ray / bundle.directions.len();
                    let id = ray % bundle.directions.len();
                    let mut dws = 0.0f64;
                    for slot in 0..w_comps.len() {
                        dws = dws.max(dw.values[[slot, is, id]].abs());
                    }
                    eps * dws * log2 >= 0.1
                })
                .collect();
            let improvement: Vec<f64> = qualifying
                .iter()
                .map(|&ray| {
                    if modified.var_modified[ray] > 0.0 {
                        modified.var_raw[ray] / modified.var_modified[ray]
                    } else {
                        f64::INFINITY
                    }
                })
                .collect();
            summary["modified_profile"] = json!({
                "qualifying_rays": qualifying.len(),
                "min_variance_ratio": improvement.iter().cloned().fold(f64::INFINITY, f64::min),
            });
        }
    }

    // Energy fits.
    let energy = load_energy(&energy_path)?;
    let late: Vec<(f64, f64)> = energy.iter().filter(|(t, _)| *t >= 2.0).cloned().collect();
    if late.len() >= 3 {
        let fits = json!({
            "power_in_t": fit_energy_growth(&late, FitModel::PowerInT).ok(),
            "log_linear": fit_energy_growth(&late, FitModel::LogLinear).ok(),
            "constant": fit_energy_growth(&late, FitModel::Constant).ok(),
        });
        write_json(&cfg.out_dir.join("energy_fits.json"), &fits)?;
        summary["energy_fits"] = fits;
    }

    // Shell residuals when snapshots exist.
    let snaps = load_snapshots(cfg)?;
    if !snaps.is_empty() {
        if let Some(g) = &cfg.g_coeffs {
            let f0_w = f0_of(&w_comps);
            let extraction = extract_w(&bundle, &w_comps, eps, None)
                .map_err(|e| CmdError::Runtime(e.to_string()))?;
            let a = build_a_of_w(g, &extraction.w, eps)
                .map_err(|e| CmdError::Runtime(e.to_string()))?;
            let modified = extract_modified_v(&bundle, &v_comps, eps, &a)
                .map_err(|e| CmdError::Runtime(e.to_string()))?;
            let dsw = extraction.w.sigma_derivative();
            let residuals = shell_energy_compare(
                &snaps,
                &v_comps,
                &w_comps,
                &modified.dsigma_v,
                &dsw,
                Some(&a),
                eps,
            )
            .map_err(|e| CmdError::Runtime(e.to_string()))?;
            let mut csv = std::fs::File::create(cfg.out_dir.join("shell_residuals.csv"))?;
            writeln!(csv, "t,v_residual,w_residual")?;
            for r in &residuals {
                writeln!(csv, "{:.6},{:.12e},{:.12e}", r.t, r.v_residual, r.w_residual)?;
            }
            summary["shell_residuals"] = json!(residuals);
            let _ = f0_w;
        }
    }

    write_json(&cfg.out_dir.join("compare_summary.json"), &summary)?;
    println!("comparison reports written to {}", cfg.out_dir.display());
    Ok(())
}

fn load_probes(
    rays: &Path,
    meta: &Path,
    n_comp: usize,
) -> Result<Vec<RayProbe>, CmdError> {
    let meta_text = std::fs::read_to_string(meta)?;
    let meta: serde_json::Value = serde_json::from_str(&meta_text)
        .map_err(|e| CmdError::Runtime(format!("bad rays_meta.json: {e}")))?;
    let ray_meta = meta["rays"]
        .as_array()
        .ok_or_else(|| CmdError::Runtime("rays_meta.json lacks a rays array".into()))?;
    let mut probes: Vec<RayProbe> = ray_meta
        .iter()
        .map(|m| {
            let sigma = m["sigma"].as_f64().unwrap_or(0.0);
            let o = &m["omega"];
            let omega = [
                o[0].as_f64().unwrap_or(0.0),
                o[1].as_f64().unwrap_or(0.0),
                o[2].as_f64().unwrap_or(1.0),
            ];
            RayProbe::new(sigma, omega, n_comp)
        })
        .collect();
    let samples: Vec<usize> =
        ray_meta.iter().map(|m| m["samples"].as_u64().unwrap_or(0) as usize).collect();

    let text = std::fs::read_to_string(rays)?;
    let mut lines = text.lines();
    let _header = lines.next();
    let mut probe_idx = 0usize;
    let mut row_in_probe = 0usize;
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 8 {
            return Err(CmdError::Runtime(format!("bad rays.csv row: {line}")));
        }
        let parse = |s: &str| -> Result<f64, CmdError> {
            s.parse::<f64>().map_err(|e| CmdError::Runtime(format!("bad rays.csv number {s}: {e}")))
        };
        while probe_idx < probes.len() && row_in_probe >= samples[probe_idx] * n_comp {
            probe_idx += 1;
            row_in_probe = 0;
        }
        if probe_idx >= probes.len() {
            return Err(CmdError::Runtime("rays.csv has more rows than rays_meta.json declares".into()));
        }
        let t = parse(cols[0])?;
        let comp = cols[2]
            .parse::<usize>()
            .map_err(|e| CmdError::Runtime(format!("bad component in rays.csv: {e}")))?
            - 1;
        let probe = &mut probes[probe_idx];
        if comp == 0 {
            probe.times.push(t);
        }
        probe.ru[comp].push(parse(cols[3])?);
        probe.rdu[comp].push([parse(cols[4])?, parse(cols[5])?, parse(cols[6])?, parse(cols[7])?]);
        row_in_probe += 1;
    }
    Ok(probes)
}

fn load_energy(path: &Path) -> Result<Vec<(f64, f64)>, CmdError> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for line in text.lines().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 2 {
            continue;
        }
        let t: f64 = cols[0].parse().map_err(|e| CmdError::Runtime(format!("bad energy.csv: {e}")))?;
        let e: f64 = cols[1].parse().map_err(|e| CmdError::Runtime(format!("bad energy.csv: {e}")))?;
        out.push((t, e));
    }
    Ok(out)
}

fn load_snapshots(cfg: &RunConfig) -> Result<Vec<FieldSnapshot>, CmdError> {
    let mut snaps = Vec::new();
    let entries = std::fs::read_dir(&cfg.out_dir)?;
    let mut sidecars: Vec<std::path::PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.extension().is_some_and(|x| x == "json")
                && p.file_name()
                    .is_some_and(|n| n.to_string_lossy().starts_with("snapshot_t"))
        })
        .collect();
    sidecars.sort();
    for sidecar in sidecars {
        let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&sidecar)?)
            .map_err(|e| CmdError::Runtime(format!("bad snapshot sidecar: {e}")))?;
        let n = meta["n"].as_u64().unwrap_or(0) as usize;
        let h = meta["h"].as_f64().unwrap_or(0.0);
        let l = meta["l"].as_f64().unwrap_or(0.0);
        let t = meta["t"].as_f64().unwrap_or(0.0);
        let n_comp = meta["n_comp"].as_u64().unwrap_or(0) as usize;
        let bin_path = sidecar.with_extension("bin");
        let bytes = std::fs::read(&bin_path)?;
        let n3 = n * n * n;
        if bytes.len() != n_comp * 5 * n3 * 8 {
            return Err(CmdError::Runtime(format!(
                "snapshot {} has {} bytes, expected {}",
                bin_path.display(),
                bytes.len(),
                n_comp * 5 * n3 * 8
            )));
        }
        let read_field = |offset: usize| -> Vec<f64> {
            bytes[offset * n3 * 8..(offset + 1) * n3 * 8]
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect()
        };
        let mut du = Vec::with_capacity(n_comp);
        for c in 0..n_comp {
            let base = c * 5;
            // Skip the u field (offset base); derivatives follow.
            let fields: Vec<Vec<f64>> = (1..=4).map(|a| read_field(base + a)).collect();
            du.push(fields);
        }
        snaps.push(FieldSnapshot { t, n, h, l, du });
    }
    Ok(snaps)
}
