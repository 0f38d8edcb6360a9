//! `semiwave simulate`: run the 3D solver, recording energy series, ray
//! samples, and optional derivative-field snapshots.

use super::write_json;
use crate::config::RunConfig;
use crate::CmdError;
use semiwave::error::Error;
use semiwave::solver::{RayProbe, WaveState};
use serde_json::json;
use std::io::Write;

pub fn run(cfg: &RunConfig) -> Result<(), CmdError> {
    let grid = cfg.grid_config();
    let mut state = WaveState::init(&cfg.nonlinearity, &cfg.data, &grid)
        .map_err(|e| CmdError::Config(format!("solver init: {e}")))?;
    let n = cfg.nonlinearity.n_total();

    let mut probes: Vec<RayProbe> =
        cfg.ray_list().into_iter().map(|(s, o)| RayProbe::new(s, o, n)).collect();

    let mut energy_csv = std::fs::File::create(cfg.out_dir.join("energy.csv"))?;
    write!(energy_csv, "t,E")?;
    for c in 0..n {
        write!(energy_csv, ",E_{}", c + 1)?;
    }
    writeln!(energy_csv)?;
    let all: Vec<usize> = (0..n).collect();
    let write_energy = |state: &WaveState, out: &mut std::fs::File| -> Result<(), CmdError> {
        write!(out, "{:.6},{:.12e}", state.time(), state.energy(&all))?;
        for c in 0..n {
            write!(out, ",{:.12e}", state.energy(&[c]))?;
        }
        writeln!(out)?;
        Ok(())
    };
    write_energy(&state, &mut energy_csv)?;

    let mut snapshots_left: Vec<f64> = cfg.raw.snapshots.clone();
    snapshots_left.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut snapshot_files = Vec::new();

    let steps = (cfg.raw.grid.t_max / grid.dt).round() as usize;
    let mut blowup: Option<f64> = None;
    let mut max_violation = 0.0f64;
    for step in 1..=steps {
        match state.step() {
            Ok(()) => {}
            Err(Error::Numeric(msg)) => {
                // Numeric blow-up is data: record and stop.
                blowup = Some(state.time());
                eprintln!("note: {msg}");
                break;
            }
            Err(e) => return Err(CmdError::Runtime(e.to_string())),
        }
        for probe in &mut probes {
            probe.record(&state).map_err(|e| CmdError::Runtime(e.to_string()))?;
        }
        if step % cfg.raw.energy_every == 0 || step == steps {
            write_energy(&state, &mut energy_csv)?;
        }
        if step % 64 == 0 {
            let v = state.support_violation();
            max_violation = max_violation.max(v);
            if v > 1e-8 {
                return Err(CmdError::Runtime(format!(
                    "out-of-cone assertion failed: |u| = {v:.3e}·peak outside B_(t+R+2h) at t = {}",
                    state.time()
                )));
            }
        }
        while let Some(&t_snap) = snapshots_left.first() {
            if state.time() + 1e-9 < t_snap {
                break;
            }
            snapshots_left.remove(0);
            snapshot_files.push(dump_snapshot(cfg, &state)?);
        }
    }

    let mut rays_csv = std::fs::File::create(cfg.out_dir.join("rays.csv"))?;
    writeln!(rays_csv, "t,sigma,component,ru,rdu0,rdu1,rdu2,rdu3")?;
    for probe in &probes {
        probe.write_csv(&mut rays_csv)?;
    }
    let meta: Vec<_> = probes
        .iter()
        .map(|p| {
            json!({
                "sigma": p.sigma,
                "omega": p.omega,
                "samples": p.times.len(),
            })
        })
        .collect();
    write_json(&cfg.out_dir.join("rays_meta.json"), &json!({ "rays": meta }))?;

    write_json(
        &cfg.out_dir.join("simulate_summary.json"),
        &json!({
            "t_final": state.time(),
            "blowup": blowup,
            "peak": state.peak(),
            "max_support_violation": max_violation,
            "snapshots": snapshot_files,
            "eps": cfg.raw.eps,
        }),
    )?;
    match blowup {
        Some(t) => println!("run stopped by numeric blow-up at t ≈ {t:.3}"),
        None => println!("run complete to t = {:.3}", state.time()),
    }
    Ok(())
}

/// Dump ∂_a u_c on a strided grid as little-endian f64, with a JSON
/// sidecar describing the layout.
fn dump_snapshot(cfg: &RunConfig, state: &WaveState) -> Result<String, CmdError> {
    let stride = cfg.raw.snapshot_stride.max(1);
    let n_full = state.nodes_per_axis();
    if (n_full - 1) % stride != 0 {
        return Err(CmdError::Config(format!(
            "snapshot_stride {stride} does not divide the grid ({n_full} nodes per axis)"
        )));
    }
    let n_s = (n_full - 1) / stride + 1;
    let n = cfg.nonlinearity.n_total();
    let name = format!("snapshot_t{:.3}", state.time());
    let bin_path = cfg.out_dir.join(format!("{name}.bin"));
    let mut bin = std::io::BufWriter::new(std::fs::File::create(&bin_path)?);
    let mut deriv = vec![0.0f64; n_full * n_full * n_full];
    for c in 0..n {
        // u itself first, then the four derivatives.
        let field = state.field(c);
        write_strided(&mut bin, field, n_full, stride, n_s)?;
        for a in 0..4 {
            state.derivative_field(c, a, &mut deriv);
            write_strided(&mut bin, &deriv, n_full, stride, n_s)?;
        }
    }
    drop(bin);
    write_json(
        &cfg.out_dir.join(format!("{name}.json")),
        &json!({
            "t": state.time(),
            "n": n_s,
            "h": state.spacing() * stride as f64,
            "l": state.half_width(),
            "n_comp": n,
            "fields_per_component": ["u", "du0", "du1", "du2", "du3"],
            "encoding": "little-endian f64, x fastest",
        }),
    )?;
    Ok(format!("{name}.bin"))
}

fn write_strided(
    out: &mut impl Write,
    field: &[f64],
    n_full: usize,
    stride: usize,
    n_s: usize,
) -> Result<(), CmdError> {
    for iz in 0..n_s {
        for iy in 0..n_s {
            for ix in 0..n_s {
                let idx = ((iz * stride) * n_full + iy * stride) * n_full + ix * stride;
                out.write_all(&field[idx].to_le_bytes())?;
            }
        }
    }
    Ok(())
}
