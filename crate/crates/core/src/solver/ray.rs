//! Ray sampling: r·u and r·∂u along the outgoing line x = (t+σ)ω.

use super::WaveState;
use crate::error::Result;

/// Accumulated samples of one ray (σ, ω): `ru[c][it]` holds r·u_c and
/// `rdu[c][it]` holds r·∂_a u_c at the recorded times.
#[derive(Debug, Clone)]
pub struct RayProbe {
    pub sigma: f64,
    pub omega: [f64; 3],
    pub times: Vec<f64>,
    pub ru: Vec<Vec<f64>>,
    pub rdu: Vec<Vec<[f64; 4]>>,
}

impl RayProbe {
    pub fn new(sigma: f64, omega: [f64; 3], n_comp: usize) -> Self {
        RayProbe {
            sigma,
            omega,
            times: Vec::new(),
            ru: vec![Vec::new(); n_comp],
            rdu: vec![Vec::new(); n_comp],
        }
    }

    /// Whether the ray point lies in the safe interior at time t.
    pub fn in_range(&self, state: &WaveState) -> bool {
        let r = state.time() + self.sigma;
        if r <= 0.0 {
            return false;
        }
        let margin = 2.0 * state.spacing();
        r * self.omega[0].abs().max(self.omega[1].abs()).max(self.omega[2].abs())
            < state.half_width() - margin
    }

    /// Sample the state at its current time (skips silently when the point
    /// is outside the safe interior or behind r = 0).
    pub fn record(&mut self, state: &WaveState) -> Result<()> {
        if !self.in_range(state) {
            return Ok(());
        }
        let t = state.time();
        let r = t + self.sigma;
        let x = [r * self.omega[0], r * self.omega[1], r * self.omega[2]];
        let vals = state.probe(x)?;
        self.times.push(t);
        for (c, (u, du)) in vals.into_iter().enumerate() {
            self.ru[c].push(r * u);
            self.rdu[c].push([r * du[0], r * du[1], r * du[2], r * du[3]]);
        }
        Ok(())
    }

    /// CSV rows `t,sigma,component,ru,rdu0,rdu1,rdu2,rdu3`.
    pub fn write_csv(&self, out: &mut dyn std::io::Write) -> std::io::Result<()> {
        for (it, t) in self.times.iter().enumerate() {
            for c in 0..self.ru.len() {
                let d = self.rdu[c][it];
                writeln!(
                    out,
                    "{:.6},{:.6},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                    t,
                    self.sigma,
                    c + 1,
                    self.ru[c][it],
                    d[0],
                    d[1],
                    d[2],
                    d[3]
                )?;
            }
        }
        Ok(())
    }
}
