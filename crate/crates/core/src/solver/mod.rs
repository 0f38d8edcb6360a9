//! Desk-scale 3D finite-difference solver for □u_j = F_j(u, ∂u) with
//! compactly supported data: predictor–corrector leapfrog, 7-point
//! Laplacian, 2nd-order centered derivatives.
//!
//! The cube is sized so waves never reach the boundary; updates sweep only
//! the ball |x| ≤ t + R + pad, which both saves work and keeps the exterior
//! exactly zero. The pad grows nothing: fields at radius r are written at
//! every step once the ball covers r, so stale buffer contents can never
//! leak back in.

mod ray;

pub use ray::RayProbe;

use crate::algebra::{CompiledNonlinearity, QuadraticNonlinearity};
use crate::error::{argument, Error, Result};
use crate::radiation::InitialData;
use rayon::prelude::*;

/// Largest component count the solver's fixed-size gather buffers accept.
pub const MAX_COMPONENTS: usize = 12;

/// Cells of padding beyond the causal radius t + R kept inside the update
/// ball; numerical tails beyond it are below roundoff-of-interest.
const PAD_CELLS: f64 = 8.0;

#[derive(Debug, Clone, Copy)]
pub struct GridConfig {
    /// Cube half-width: the domain is [−l, l]³.
    pub l: f64,
    /// Grid spacing.
    pub h: f64,
    /// Time step; must satisfy dt ≤ 0.5·h/√3.
    pub dt: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { l: 32.0, h: 0.25, dt: 0.0625 }
    }
}

/// Three time levels of an N-component field on a uniform cube grid.
/// `t` is the time of the middle level.
pub struct WaveState {
    n_comp: usize,
    n: usize,
    l: f64,
    h: f64,
    dt: f64,
    t: f64,
    support_radius: f64,
    /// levels[k] holds component-major data: levels[k][c * n³ + idx].
    levels: [Vec<f64>; 3],
    f: CompiledNonlinearity,
    f_zero: bool,
    peak: f64,
}

struct SendPtr(*mut f64);
unsafe impl Send for SendPtr {}
unsafe impl Sync for SendPtr {}

impl WaveState {
    /// Sample data onto the grid and build the first two levels by a
    /// second-order Taylor start (a backward level is synthesized so that
    /// centered time differences exist at t = 0).
    pub fn init(f: &QuadraticNonlinearity, data: &[InitialData], grid: &GridConfig) -> Result<Self> {
        let n_comp = f.n_total();
        if data.len() != n_comp {
            return Err(argument(format!(
                "init: {} data components for an {}-component system",
                data.len(),
                n_comp
            )));
        }
        if n_comp > MAX_COMPONENTS {
            return Err(argument(format!("init: at most {MAX_COMPONENTS} components supported")));
        }
        if grid.dt > 0.5 * grid.h / 3.0f64.sqrt() + 1e-12 {
            return Err(argument(format!(
                "CFL violation: dt = {} exceeds 0.5·h/√3 = {}",
                grid.dt,
                0.5 * grid.h / 3.0f64.sqrt()
            )));
        }
        let r: f64 = data.iter().map(|d| d.support_radius).fold(0.0, f64::max);
        if r + 2.0 * grid.h >= grid.l {
            return Err(argument("initial data support does not fit inside the cube"));
        }
        let n = (2.0 * grid.l / grid.h).round() as usize + 1;
        if ((n - 1) as f64 * grid.h - 2.0 * grid.l).abs() > 1e-9 {
            return Err(argument("cube half-width must be a multiple of the spacing"));
        }
        let n3 = n * n * n;
        let mut u0 = vec![0.0; n_comp * n3];
        let mut g0 = vec![0.0; n_comp * n3];
        let coord = |i: usize| -grid.l + i as f64 * grid.h;
        // Only the ball containing the data needs sampling.
        let lo = ((grid.l - r - grid.h) / grid.h).floor().max(0.0) as usize;
        let hi = (((grid.l + r + grid.h) / grid.h).ceil() as usize).min(n - 1);
        for c in 0..n_comp {
            let eps = data[c].eps;
            if eps == 0.0 {
                continue;
            }
            for iz in lo..=hi {
                for iy in lo..=hi {
                    for ix in lo..=hi {
                        let x = [coord(ix), coord(iy), coord(iz)];
                        let idx = c * n3 + (iz * n + iy) * n + ix;
                        u0[idx] = eps * data[c].phi_at(x);
                        g0[idx] = eps * data[c].psi_at(x);
                    }
                }
            }
        }

        let compiled = f.compile();
        let f_zero = compiled.is_zero();
        let mut plus = u0.clone();
        let mut minus = u0.clone();
        let h2 = grid.h * grid.h;
        let dt = grid.dt;
        let stride_y = n;
        let stride_z = n * n;
        let mut uvals = [0.0f64; MAX_COMPONENTS];
        let mut duvals = [[0.0f64; 4]; MAX_COMPONENTS];
        for iz in lo.max(1)..=hi.min(n - 2) {
            for iy in lo.max(1)..=hi.min(n - 2) {
                for ix in lo.max(1)..=hi.min(n - 2) {
                    let idx = (iz * n + iy) * n + ix;
                    let mut lap = [0.0f64; MAX_COMPONENTS];
                    for c in 0..n_comp {
                        let b = c * n3;
                        let uc = u0[b + idx];
                        lap[c] = (u0[b + idx + 1]
                            + u0[b + idx - 1]
                            + u0[b + idx + stride_y]
                            + u0[b + idx - stride_y]
                            + u0[b + idx + stride_z]
                            + u0[b + idx - stride_z]
                            - 6.0 * uc)
                            / h2;
                        uvals[c] = uc;
                        duvals[c] = [
                            g0[b + idx],
                            (u0[b + idx + 1] - u0[b + idx - 1]) / (2.0 * grid.h),
                            (u0[b + idx + stride_y] - u0[b + idx - stride_y]) / (2.0 * grid.h),
                            (u0[b + idx + stride_z] - u0[b + idx - stride_z]) / (2.0 * grid.h),
                        ];
                    }
                    for c in 0..n_comp {
                        let fv = if f_zero {
                            0.0
                        } else {
                            compiled.eval_component(c, &uvals[..n_comp], &duvals[..n_comp])
                        };
                        let acc = 0.5 * dt * dt * (lap[c] + fv);
                        let b = c * n3 + idx;
                        plus[b] = u0[b] + dt * g0[b] + acc;
                        minus[b] = u0[b] - dt * g0[b] + acc;
                    }
                }
            }
        }
        let peak = u0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(WaveState {
            n_comp,
            n,
            l: grid.l,
            h: grid.h,
            dt,
            t: 0.0,
            support_radius: r,
            levels: [minus, u0, plus],
            f: compiled,
            f_zero,
            peak,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn n_components(&self) -> usize {
        self.n_comp
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn half_width(&self) -> f64 {
        self.l
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// Peak |u| seen so far.
    pub fn peak(&self) -> f64 {
        self.peak
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.n
    }

    fn coord(&self, i: usize) -> f64 {
        -self.l + i as f64 * self.h
    }

    /// Advance one time step (predictor–corrector leapfrog).
    pub fn step(&mut self) -> Result<()> {
        let t_new = self.t + 2.0 * self.dt;
        let r_cut = t_new + self.support_radius + PAD_CELLS * self.h;
        if r_cut >= self.l - self.h {
            return Err(argument(format!(
                "update ball radius {r_cut} reaches the cube boundary at t = {}",
                self.t
            )));
        }
        let n = self.n;
        let n3 = n * n * n;
        let n_comp = self.n_comp;
        let h = self.h;
        let dt = self.dt;
        let h2 = h * h;
        let stride_y = n;
        let stride_z = n * n;
        let f = &self.f;
        let f_zero = self.f_zero;

        self.levels.rotate_left(1);
        let (head, tail) = self.levels.split_at_mut(2);
        let prev = &head[0];
        let curr = &head[1];
        let next = &mut tail[0];

        let center = (n - 1) / 2;
        let cells = (r_cut / h).floor() as isize;
        let z_lo = center as isize - cells;
        let z_hi = center as isize + cells;
        let next_ptr = SendPtr(next.as_mut_ptr());

        let slab_max: Vec<f64> = (z_lo..=z_hi)
            .into_par_iter()
            .map(|iz| {
                let _ = &next_ptr;
                let z = -self.l + iz as f64 * h;
                let ry2 = r_cut * r_cut - z * z;
                if ry2 <= 0.0 {
                    return 0.0;
                }
                let ry = ry2.sqrt();
                let ylo = ((center as f64) - ry / h).floor().max(1.0) as usize;
                let yhi = (((center as f64) + ry / h).ceil() as usize).min(n - 2);
                let mut local_max = 0.0f64;
                let mut uvals = [0.0f64; MAX_COMPONENTS];
                let mut duvals = [[0.0f64; 4]; MAX_COMPONENTS];
                let mut lap = [0.0f64; MAX_COMPONENTS];
                let mut base2 = [0.0f64; MAX_COMPONENTS];
                let mut pred = [0.0f64; MAX_COMPONENTS];
                for iy in ylo..=yhi {
                    let y = -self.l + iy as f64 * h;
                    let rx2 = ry2 - y * y;
                    if rx2 <= 0.0 {
                        continue;
                    }
                    let rx = rx2.sqrt();
                    let xlo = ((center as f64) - rx / h).floor().max(1.0) as usize;
                    let xhi = (((center as f64) + rx / h).ceil() as usize).min(n - 2);
                    let row = (iz as usize * n + iy) * n;
                    for ix in xlo..=xhi {
                        let idx = row + ix;
                        for c in 0..n_comp {
                            let b = c * n3;
                            let uc = curr[b + idx];
                            let pv = prev[b + idx];
                            let lp = (curr[b + idx + 1]
                                + curr[b + idx - 1]
                                + curr[b + idx + stride_y]
                                + curr[b + idx - stride_y]
                                + curr[b + idx + stride_z]
                                + curr[b + idx - stride_z]
                                - 6.0 * uc)
                                / h2;
                            lap[c] = lp;
                            base2[c] = 2.0 * uc - pv;
                            uvals[c] = uc;
                            duvals[c] = [
                                (uc - pv) / dt,
                                (curr[b + idx + 1] - curr[b + idx - 1]) / (2.0 * h),
                                (curr[b + idx + stride_y] - curr[b + idx - stride_y]) / (2.0 * h),
                                (curr[b + idx + stride_z] - curr[b + idx - stride_z]) / (2.0 * h),
                            ];
                        }
                        if f_zero {
                            for c in 0..n_comp {
                                let v = base2[c] + dt * dt * lap[c];
                                unsafe { *next_ptr.0.add(c * n3 + idx) = v };
                                local_max = local_max.max(v.abs());
                            }
                        } else {
                            // Predictor with backward ∂_t, then one corrector
                            // pass with centered ∂_t from the predicted level.
                            for c in 0..n_comp {
                                let fv = f.eval_component(c, &uvals[..n_comp], &duvals[..n_comp]);
                                pred[c] = base2[c] + dt * dt * (lap[c] + fv);
                            }
                            for c in 0..n_comp {
                                let b = c * n3;
                                duvals[c][0] = (pred[c] - prev[b + idx]) / (2.0 * dt);
                            }
                            for c in 0..n_comp {
                                let fv = f.eval_component(c, &uvals[..n_comp], &duvals[..n_comp]);
                                let v = base2[c] + dt * dt * (lap[c] + fv);
                                unsafe { *next_ptr.0.add(c * n3 + idx) = v };
                                local_max = local_max.max(v.abs());
                            }
                        }
                    }
                }
                local_max
            })
            .collect();

        let step_max = slab_max.iter().fold(0.0f64, |m, v| m.max(*v));
        if !step_max.is_finite() {
            return Err(Error::Numeric(format!(
                "field blew up (non-finite values) at t = {t_new}"
            )));
        }
        self.peak = self.peak.max(step_max);
        self.t += self.dt;
        Ok(())
    }

    /// Energy norm (½ Σ (∂_t u)² + |∇u|² h³)^{1/2} of the selected
    /// components at the middle time level; the reduction is a fixed
    /// pairwise tree over z-slab partial sums, so the result does not
    /// depend on the thread count.
    pub fn energy(&self, components: &[usize]) -> f64 {
        let n = self.n;
        let n3 = n * n * n;
        let h = self.h;
        let two_dt = 2.0 * self.dt;
        let r_cut = self.t + self.dt + self.support_radius + (PAD_CELLS + 2.0) * self.h;
        let center = (n - 1) / 2;
        let cells = ((r_cut / h).floor() as isize).min(center as isize - 1);
        let z_lo = (center as isize - cells).max(1);
        let z_hi = (center as isize + cells).min(n as isize - 2);
        let prev = &self.levels[0];
        let curr = &self.levels[1];
        let next = &self.levels[2];
        let slab_sums: Vec<f64> = (z_lo..=z_hi)
            .into_par_iter()
            .map(|iz| {
                let mut acc = 0.0;
                for iy in 1..n - 1 {
                    let row = (iz as usize * n + iy) * n;
                    for ix in 1..n - 1 {
                        let idx = row + ix;
                        for &c in components {
                            let b = c * n3;
                            let ut = (next[b + idx] - prev[b + idx]) / two_dt;
                            let ux = (curr[b + idx + 1] - curr[b + idx - 1]) / (2.0 * h);
                            let uy = (curr[b + idx + n] - curr[b + idx - n]) / (2.0 * h);
                            let uz = (curr[b + idx + n * n] - curr[b + idx - n * n]) / (2.0 * h);
                            acc += ut * ut + ux * ux + uy * uy + uz * uz;
                        }
                    }
                }
                acc
            })
            .collect();
        (0.5 * pairwise_sum(&slab_sums) * h * h * h).sqrt()
    }

    /// Max |u| outside the causal ball B_{t+R+2h}, relative to the peak.
    /// Zero exactly when nothing has been written there.
    pub fn support_violation(&self) -> f64 {
        let n = self.n;
        let n3 = n * n * n;
        let r_keep = self.t + self.support_radius + 2.0 * self.h;
        let keep2 = r_keep * r_keep;
        let curr = &self.levels[1];
        let worst: f64 = (0..n)
            .into_par_iter()
            .map(|iz| {
                let z = self.coord(iz);
                let mut m = 0.0f64;
                for iy in 0..n {
                    let y = self.coord(iy);
                    for ix in 0..n {
                        let x = self.coord(ix);
                        if x * x + y * y + z * z > keep2 {
                            let idx = (iz * n + iy) * n + ix;
                            for c in 0..self.n_comp {
                                m = m.max(curr[c * n3 + idx].abs());
                            }
                        }
                    }
                }
                m
            })
            .reduce(|| 0.0, f64::max);
        if self.peak > 0.0 {
            worst / self.peak
        } else {
            worst
        }
    }

    /// u and centered-difference ∂u of every component, trilinearly
    /// interpolated at x (which must sit one cell inside the cube).
    pub fn probe(&self, x: [f64; 3]) -> Result<Vec<(f64, [f64; 4])>> {
        let n = self.n;
        let n3 = n * n * n;
        let h = self.h;
        let mut cell = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for d in 0..3 {
            let pos = (x[d] + self.l) / h;
            if pos < 1.0 || pos > (n - 2) as f64 {
                return Err(argument(format!(
                    "probe point {x:?} is outside the safe interior"
                )));
            }
            let i = pos.floor() as usize;
            cell[d] = i.min(n - 3);
            frac[d] = pos - cell[d] as f64;
        }
        let prev = &self.levels[0];
        let curr = &self.levels[1];
        let next = &self.levels[2];
        let two_dt = 2.0 * self.dt;
        let mut out = Vec::with_capacity(self.n_comp);
        for c in 0..self.n_comp {
            let b = c * n3;
            let mut u = 0.0;
            let mut du = [0.0f64; 4];
            for (dz, wz) in [(0, 1.0 - frac[2]), (1, frac[2])] {
                for (dy, wy) in [(0, 1.0 - frac[1]), (1, frac[1])] {
                    for (dx, wx) in [(0, 1.0 - frac[0]), (1, frac[0])] {
                        let w = wz * wy * wx;
                        let idx = ((cell[2] + dz) * n + cell[1] + dy) * n + cell[0] + dx;
                        u += w * curr[b + idx];
                        du[0] += w * (next[b + idx] - prev[b + idx]) / two_dt;
                        du[1] += w * (curr[b + idx + 1] - curr[b + idx - 1]) / (2.0 * h);
                        du[2] += w * (curr[b + idx + n] - curr[b + idx - n]) / (2.0 * h);
                        du[3] += w * (curr[b + idx + n * n] - curr[b + idx - n * n]) / (2.0 * h);
                    }
                }
            }
            out.push((u, du));
        }
        Ok(out)
    }

    /// Raw view of the middle level of one component (row-major, x fastest).
    pub fn field(&self, comp: usize) -> &[f64] {
        let n3 = self.n * self.n * self.n;
        &self.levels[1][comp * n3..(comp + 1) * n3]
    }

    /// ∂_a of one component on the full grid (centered differences),
    /// written into `out` (length n³). Boundary ring is left zero.
    pub fn derivative_field(&self, comp: usize, a: usize, out: &mut [f64]) {
        let n = self.n;
        let n3 = n * n * n;
        let b = comp * n3;
        out.fill(0.0);
        let prev = &self.levels[0];
        let curr = &self.levels[1];
        let next = &self.levels[2];
        let stride = match a {
            1 => 1,
            2 => n,
            3 => n * n,
            _ => 0,
        };
        for iz in 1..n - 1 {
            for iy in 1..n - 1 {
                let row = (iz * n + iy) * n;
                for ix in 1..n - 1 {
                    let idx = row + ix;
                    out[idx] = if a == 0 {
                        (next[b + idx] - prev[b + idx]) / (2.0 * self.dt)
                    } else {
                        (curr[b + idx + stride] - curr[b + idx - stride]) / (2.0 * self.h)
                    };
                }
            }
        }
    }
}

/// Deterministic pairwise tree sum.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2 => v[0] + v[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
        }
    }
}
