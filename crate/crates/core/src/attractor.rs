//! Continuous attractor dynamics on a toroidal 2D neuron sheet and a 1D ring.
//!
//! A localized activity bump encodes a continuous quantity (position or
//! heading). Each step the bump is copied and shifted by the commanded
//! offset (integer part as an index rotation, fractional part as bilinear
//! interpolation scaled by the motion confidence `gamma`), the shifted
//! packet excites its neighbourhood through a truncated Gaussian kernel,
//! global inhibition proportional to total activity is subtracted, negative
//! activities are clamped to zero and the grid is L2-normalized.

use crate::error::{CoreError, Result};

/// Tuned dynamics parameters shared by the 2D sheets and the 1D ring.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NetworkParams {
    /// Half-width of the initialization window, in neurons (`A`).
    pub activation_radius: usize,
    /// Half-width of the excitation window, in neurons (`E`).
    pub excitation_radius: usize,
    /// Scaling of the injected shifted activity, in `[0, 1]`.
    pub gamma: f64,
    /// Global inhibition scale.
    pub phi: f64,
    /// Excitation Gaussian standard deviation along x, in neurons.
    pub sigma_x: f64,
    /// Excitation Gaussian standard deviation along y, in neurons.
    pub sigma_y: f64,
}

pub const ACTIVATION_RADIUS_RANGE: (f64, f64) = (1.0, 10.0);
pub const EXCITATION_RADIUS_RANGE: (f64, f64) = (1.0, 10.0);
pub const GAMMA_RANGE: (f64, f64) = (0.0, 1.0);
pub const PHI_RANGE: (f64, f64) = (0.00001, 0.005);

impl NetworkParams {
    /// Builds parameters with the default sigma convention: the excitation
    /// Gaussian decays to ~13.5% of its peak at the window edge (`sigma = E/2`).
    pub fn new(activation_radius: usize, excitation_radius: usize, gamma: f64, phi: f64) -> Result<Self> {
        let sigma = excitation_radius as f64 / 2.0;
        Self {
            activation_radius,
            excitation_radius,
            gamma,
            phi,
            sigma_x: sigma,
            sigma_y: sigma,
        }
        .validated()
    }

    pub fn with_sigmas(mut self, sigma_x: f64, sigma_y: f64) -> Result<Self> {
        self.sigma_x = sigma_x;
        self.sigma_y = sigma_y;
        self.validated()
    }

    fn validated(self) -> Result<Self> {
        let a = self.activation_radius as f64;
        let e = self.excitation_radius as f64;
        if !(ACTIVATION_RADIUS_RANGE.0..=ACTIVATION_RADIUS_RANGE.1).contains(&a) {
            return Err(CoreError::Config(format!(
                "activation radius {a} outside [{}, {}]",
                ACTIVATION_RADIUS_RANGE.0, ACTIVATION_RADIUS_RANGE.1
            )));
        }
        if !(EXCITATION_RADIUS_RANGE.0..=EXCITATION_RADIUS_RANGE.1).contains(&e) {
            return Err(CoreError::Config(format!(
                "excitation radius {e} outside [{}, {}]",
                EXCITATION_RADIUS_RANGE.0, EXCITATION_RADIUS_RANGE.1
            )));
        }
        if !(GAMMA_RANGE.0..=GAMMA_RANGE.1).contains(&self.gamma) {
            return Err(CoreError::Config(format!("gamma {} outside [0, 1]", self.gamma)));
        }
        if !(PHI_RANGE.0..=PHI_RANGE.1).contains(&self.phi) {
            return Err(CoreError::Config(format!(
                "phi {} outside [{}, {}]",
                self.phi, PHI_RANGE.0, PHI_RANGE.1
            )));
        }
        if self.sigma_x <= 0.0 || self.sigma_y <= 0.0 {
            return Err(CoreError::Config("sigma must be positive".into()));
        }
        Ok(self)
    }

    /// Initialization Gaussian standard deviation (`A/2` per axis).
    pub fn init_sigma(&self) -> (f64, f64) {
        let s = self.activation_radius as f64 / 2.0;
        (s, s)
    }
}

/// A per-step shift split into integer and fractional parts.
///
/// The parts reconstruct the real-valued shift exactly:
/// `shift = int + frac` with `frac` in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftCommand {
    pub x_int: i64,
    pub y_int: i64,
    pub x_frac: f64,
    pub y_frac: f64,
}

impl ShiftCommand {
    pub fn zero() -> Self {
        Self { x_int: 0, y_int: 0, x_frac: 0.0, y_frac: 0.0 }
    }

    /// Splits a real-valued shift (in neurons) per axis; works for negative
    /// shifts too (`-1.3` becomes integer `-2` plus fraction `0.7`).
    pub fn from_real(dx: f64, dy: f64) -> Self {
        assert!(dx.is_finite() && dy.is_finite(), "shift command must be finite");
        Self {
            x_int: dx.floor() as i64,
            y_int: dy.floor() as i64,
            x_frac: dx - dx.floor(),
            y_frac: dy - dy.floor(),
        }
    }

    pub fn from_real_1d(d: f64) -> Self {
        Self::from_real(d, 0.0)
    }

    pub fn x(&self) -> f64 {
        self.x_int as f64 + self.x_frac
    }

    pub fn y(&self) -> f64 {
        self.y_int as f64 + self.y_frac
    }

    pub fn is_zero(&self) -> bool {
        self.x_int == 0 && self.y_int == 0 && self.x_frac == 0.0 && self.y_frac == 0.0
    }
}

/// Outcome flags of one network update.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepReport {
    /// The pre-normalization state collapsed to all-zero and the bump was
    /// reinitialized at the last decoded position.
    pub collapsed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Circular mean of `weights` interpreted as nonnegative masses on a ring of
/// `weights.len()` equally spaced angles; returns an index in `[0, n)`.
pub fn circular_mean_index(weights: &[f64]) -> Option<f64> {
    let n = weights.len();
    if n == 0 {
        return None;
    }
    let mut sin_sum = 0.0;
    let mut cos_sum = 0.0;
    let mut total = 0.0;
    let step = std::f64::consts::TAU / n as f64;
    for (i, &w) in weights.iter().enumerate() {
        let angle = step * i as f64;
        sin_sum += w * angle.sin();
        cos_sum += w * angle.cos();
        total += w;
    }
    if total <= 0.0 {
        return None;
    }
    let mut idx = n as f64 / std::f64::consts::TAU * sin_sum.atan2(cos_sum);
    if idx < 0.0 {
        idx += n as f64;
    }
    if idx >= n as f64 {
        idx = 0.0;
    }
    Some(idx)
}

fn wrap(i: i64, n: usize) -> usize {
    i.rem_euclid(n as i64) as usize
}

/// Truncated Gaussian kernel over offsets `-radius..=radius`.
fn kernel(radius: usize, sigma: f64) -> Vec<f64> {
    (-(radius as i64)..=radius as i64)
        .map(|d| (-((d * d) as f64) / (2.0 * sigma * sigma)).exp())
        .collect()
}

// ---------------------------------------------------------------------------
// 2D toroidal sheet
// ---------------------------------------------------------------------------

/// Nonnegative neuron activations on an `nx x ny` torus, L2-normalized after
/// every update. Values are stored row-major: `(ix, iy)` lives at `iy*nx+ix`.
#[derive(Debug, Clone)]
pub struct ActivityGrid {
    nx: usize,
    ny: usize,
    values: Vec<f64>,
}

impl ActivityGrid {
    /// Initializes a Gaussian bump in the `(2A+1) x (2A+1)` window around
    /// `center`, with toroidal index wrapping; zero outside the window;
    /// L2-normalized.
    pub fn init_gaussian(nx: usize, ny: usize, center: (usize, usize), params: &NetworkParams) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(CoreError::Config(format!("grid dimensions {nx}x{ny} must be positive")));
        }
        if center.0 >= nx || center.1 >= ny {
            return Err(CoreError::Config(format!(
                "center ({}, {}) outside {nx}x{ny} grid",
                center.0, center.1
            )));
        }
        let a = params.activation_radius as i64;
        let (sx, sy) = params.init_sigma();
        let mut values = vec![0.0; nx * ny];
        for dj in -a..=a {
            for di in -a..=a {
                let ix = wrap(center.0 as i64 + di, nx);
                let iy = wrap(center.1 as i64 + dj, ny);
                let g = (-((di * di) as f64) / (2.0 * sx * sx) - ((dj * dj) as f64) / (2.0 * sy * sy)).exp();
                values[iy * nx + ix] += g;
            }
        }
        let mut grid = Self { nx, ny, values };
        grid.normalize_l2();
        Ok(grid)
    }

    /// Builds a grid from raw activations (row-major, length `nx*ny`).
    /// Values are taken as-is; callers wanting the step invariant should
    /// normalize beforehand.
    pub fn from_values(nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        if nx == 0 || ny == 0 || values.len() != nx * ny {
            return Err(CoreError::Config(format!(
                "value buffer of {} does not match {nx}x{ny}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(CoreError::Config("activations must be finite and nonnegative".into()));
        }
        Ok(Self { nx, ny, values })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    fn normalize_l2(&mut self) {
        let norm = self.l2_norm();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            for v in &mut self.values {
                *v *= inv;
            }
        }
    }

    /// Copies every active neuron's value to its integer-shifted position,
    /// wrapping at the edges. Total mass is conserved.
    pub fn shift_copy(&self, cmd: &ShiftCommand) -> Vec<f64> {
        let mut out = vec![0.0; self.values.len()];
        let dx = wrap(cmd.x_int, self.nx);
        let dy = wrap(cmd.y_int, self.ny);
        for iy in 0..self.ny {
            let src = &self.values[iy * self.nx..(iy + 1) * self.nx];
            let dst_row = (iy + dy) % self.ny;
            let dst = &mut out[dst_row * self.nx..(dst_row + 1) * self.nx];
            // Row rotation by dx: split into the two contiguous runs.
            dst[dx..].copy_from_slice(&src[..self.nx - dx]);
            dst[..dx].copy_from_slice(&src[self.nx - dx..]);
        }
        out
    }

    /// Toroidal translation by integer offsets (test and tooling helper).
    pub fn translated(&self, dx: i64, dy: i64) -> Self {
        let cmd = ShiftCommand { x_int: dx, y_int: dy, x_frac: 0.0, y_frac: 0.0 };
        Self { nx: self.nx, ny: self.ny, values: self.shift_copy(&cmd) }
    }

    pub fn decode(&self, axis: Axis) -> Result<f64> {
        let marginal = self.marginal(axis);
        circular_mean_index(&marginal)
            .ok_or_else(|| CoreError::Undecodable("all-zero grid activity".into()))
    }

    fn marginal(&self, axis: Axis) -> Vec<f64> {
        match axis {
            Axis::X => {
                let mut m = vec![0.0; self.nx];
                for iy in 0..self.ny {
                    let row = &self.values[iy * self.nx..(iy + 1) * self.nx];
                    for (ix, v) in row.iter().enumerate() {
                        m[ix] += v;
                    }
                }
                m
            }
            Axis::Y => {
                self.values
                    .chunks_exact(self.nx)
                    .map(|row| row.iter().sum())
                    .collect()
            }
        }
    }

    /// One attractor update.
    ///
    /// A `gamma` fraction of the activity is copied out, shifted by the
    /// command and injected back into the currently active region (shifted
    /// weights landing on inactive neurons are dropped), while the remaining
    /// `1-gamma` stays in place. The injected packet excites its
    /// neighbourhood, then global inhibition, clamping and L2 normalization
    /// are applied. Shifts larger than the bump radius under-integrate by
    /// construction: that is what limits a single sheet to a narrow speed
    /// band and what the multiscale stack works around.
    ///
    /// If inhibition annihilates the whole grid, the bump is reinitialized at
    /// the last decoded position and the report flags a stability fault.
    pub fn step(&mut self, cmd: &ShiftCommand, params: &NetworkParams) -> Result<StepReport> {
        let decoded = (self.decode(Axis::X)?, self.decode(Axis::Y)?);
        let mut copied = self.shift_copy(cmd);
        for (c, &x) in copied.iter_mut().zip(&self.values) {
            if x <= 0.0 {
                *c = 0.0;
            }
        }
        let injected = fractional_shift(&copied, self.nx, self.ny, cmd, params.gamma);
        let excited = excitation(&injected, self.nx, self.ny, params);

        let keep = 1.0 - params.gamma;
        let mut total: Vec<f64> = self
            .values
            .iter()
            .zip(&injected)
            .zip(&excited)
            .map(|((&x, &c), &e)| keep * x + c + e)
            .collect();
        let mu = inhibition(&total, params.phi);

        let mut norm_sq = 0.0;
        for t in &mut total {
            *t = (*t - mu).max(0.0);
            norm_sq += *t * *t;
        }

        if norm_sq <= 0.0 || !norm_sq.is_finite() {
            let cx = wrap(decoded.0.round() as i64, self.nx);
            let cy = wrap(decoded.1.round() as i64, self.ny);
            *self = Self::init_gaussian(self.nx, self.ny, (cx, cy), params)?;
            return Ok(StepReport { collapsed: true });
        }

        let inv = 1.0 / norm_sq.sqrt();
        for (v, t) in self.values.iter_mut().zip(&total) {
            *v = t * inv;
        }
        Ok(StepReport { collapsed: false })
    }
}

/// Bilinear redistribution of a shifted weight field by the fractional parts
/// of `cmd`, scaled by `gamma`. A unit spike splits across the four forward
/// corners with weights `(1-fx)(1-fy)`, `fx(1-fy)`, `(1-fx)fy`, `fx*fy`.
pub fn fractional_shift(field: &[f64], nx: usize, ny: usize, cmd: &ShiftCommand, gamma: f64) -> Vec<f64> {
    let fx = cmd.x_frac;
    let fy = cmd.y_frac;
    debug_assert!((0.0..1.0).contains(&fx) && (0.0..1.0).contains(&fy));
    let w00 = gamma * (1.0 - fx) * (1.0 - fy);
    let w10 = gamma * fx * (1.0 - fy);
    let w01 = gamma * (1.0 - fx) * fy;
    let w11 = gamma * fx * fy;
    let mut out = vec![0.0; field.len()];
    for iy in 0..ny {
        let ym1 = if iy == 0 { ny - 1 } else { iy - 1 };
        let row = &field[iy * nx..(iy + 1) * nx];
        let prev_row = &field[ym1 * nx..(ym1 + 1) * nx];
        let dst = &mut out[iy * nx..(iy + 1) * nx];
        for ix in 0..nx {
            let xm1 = if ix == 0 { nx - 1 } else { ix - 1 };
            dst[ix] = w00 * row[ix] + w10 * row[xm1] + w01 * prev_row[ix] + w11 * prev_row[xm1];
        }
    }
    out
}

/// Truncated-Gaussian excitation: every neuron with positive weight adds its
/// weight times a Gaussian to the `(2E+1) x (2E+1)` toroidal window around
/// itself. Computed as two separable 1D convolutions.
pub fn excitation(field: &[f64], nx: usize, ny: usize, params: &NetworkParams) -> Vec<f64> {
    let e = params.excitation_radius;
    let kx = kernel(e, params.sigma_x);
    let ky = kernel(e, params.sigma_y);

    // Pass 1: convolve along y.
    let mut tmp = vec![0.0; field.len()];
    for (k_idx, &k) in ky.iter().enumerate() {
        let d = k_idx as i64 - e as i64;
        for iy in 0..ny {
            let src_row = wrap(iy as i64 - d, ny);
            let src = &field[src_row * nx..(src_row + 1) * nx];
            let dst = &mut tmp[iy * nx..(iy + 1) * nx];
            for (o, s) in dst.iter_mut().zip(src) {
                *o += k * s;
            }
        }
    }

    // Pass 2: convolve along x, splitting each row into its two wrap runs.
    let mut out = vec![0.0; field.len()];
    for (k_idx, &k) in kx.iter().enumerate() {
        let d = k_idx as i64 - e as i64;
        let shift = wrap(d, nx); // out[ix] += k * tmp[ix - d] == tmp[(ix - shift) mod nx]
        for iy in 0..ny {
            let src = &tmp[iy * nx..(iy + 1) * nx];
            let dst = &mut out[iy * nx..(iy + 1) * nx];
            for (o, s) in dst[shift..].iter_mut().zip(&src[..nx - shift]) {
                *o += k * s;
            }
            for (o, s) in dst[..shift].iter_mut().zip(&src[nx - shift..]) {
                *o += k * s;
            }
        }
    }
    out
}

/// Global inhibition: total activity scaled by `phi`.
pub fn inhibition(field: &[f64], phi: f64) -> f64 {
    field.iter().sum::<f64>() * phi
}

// ---------------------------------------------------------------------------
// 1D ring
// ---------------------------------------------------------------------------

/// Nonnegative activations on a ring of `n` neurons; the 1D counterpart of
/// [`ActivityGrid`] with identical update dynamics.
#[derive(Debug, Clone)]
pub struct ActivityRing {
    values: Vec<f64>,
}

impl ActivityRing {
    pub fn init_gaussian(n: usize, center: usize, params: &NetworkParams) -> Result<Self> {
        if n == 0 {
            return Err(CoreError::Config("ring size must be positive".into()));
        }
        if center >= n {
            return Err(CoreError::Config(format!("center {center} outside ring of {n}")));
        }
        let a = params.activation_radius as i64;
        let (sx, _) = params.init_sigma();
        let mut values = vec![0.0; n];
        for d in -a..=a {
            let i = wrap(center as i64 + d, n);
            values[i] += (-((d * d) as f64) / (2.0 * sx * sx)).exp();
        }
        let mut ring = Self { values };
        ring.normalize_l2();
        Ok(ring)
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn normalize_l2(&mut self) {
        let norm = self.l2_norm();
        if norm > 0.0 {
            let inv = 1.0 / norm;
            for v in &mut self.values {
                *v *= inv;
            }
        }
    }

    pub fn shift_copy(&self, cmd: &ShiftCommand) -> Vec<f64> {
        let n = self.values.len();
        let dx = wrap(cmd.x_int, n);
        let mut out = vec![0.0; n];
        out[dx..].copy_from_slice(&self.values[..n - dx]);
        out[..dx].copy_from_slice(&self.values[n - dx..]);
        out
    }

    pub fn decode(&self) -> Result<f64> {
        circular_mean_index(&self.values)
            .ok_or_else(|| CoreError::Undecodable("all-zero ring activity".into()))
    }

    /// One ring update; same pipeline as [`ActivityGrid::step`] in 1D except
    /// that the shifted packet is not masked to the active region: heading
    /// changes routinely jump several bump widths within one tick and have
    /// no multiscale routing to absorb them.
    pub fn step(&mut self, cmd: &ShiftCommand, params: &NetworkParams) -> Result<StepReport> {
        let n = self.values.len();
        let decoded = self.decode()?;
        let copied = self.shift_copy(cmd);
        let injected = ring_fractional_shift(&copied, cmd, params.gamma);
        let excited = ring_excitation(&injected, params);

        let keep = 1.0 - params.gamma;
        let mut total: Vec<f64> = self
            .values
            .iter()
            .zip(&injected)
            .zip(&excited)
            .map(|((&x, &c), &e)| keep * x + c + e)
            .collect();
        let mu = inhibition(&total, params.phi);

        let mut norm_sq = 0.0;
        for t in &mut total {
            *t = (*t - mu).max(0.0);
            norm_sq += *t * *t;
        }

        if norm_sq <= 0.0 || !norm_sq.is_finite() {
            let c = wrap(decoded.round() as i64, n);
            *self = Self::init_gaussian(n, c, params)?;
            return Ok(StepReport { collapsed: true });
        }

        let inv = 1.0 / norm_sq.sqrt();
        for (v, t) in self.values.iter_mut().zip(&total) {
            *v = t * inv;
        }
        Ok(StepReport { collapsed: false })
    }
}

/// 1D counterpart of [`fractional_shift`].
pub fn ring_fractional_shift(field: &[f64], cmd: &ShiftCommand, gamma: f64) -> Vec<f64> {
    let n = field.len();
    let f = cmd.x_frac;
    let w0 = gamma * (1.0 - f);
    let w1 = gamma * f;
    (0..n)
        .map(|i| {
            let im1 = if i == 0 { n - 1 } else { i - 1 };
            w0 * field[i] + w1 * field[im1]
        })
        .collect()
}

/// 1D counterpart of [`excitation`].
pub fn ring_excitation(field: &[f64], params: &NetworkParams) -> Vec<f64> {
    let n = field.len();
    let e = params.excitation_radius;
    let k = kernel(e, params.sigma_x);
    let mut out = vec![0.0; n];
    for (k_idx, &kv) in k.iter().enumerate() {
        let d = k_idx as i64 - e as i64;
        for (i, o) in out.iter_mut().enumerate() {
            *o += kv * field[wrap(i as i64 - d, n)];
        }
    }
    out
}
