//! Interactive browser demo. Three exhibits:
//!
//! - [`BumpDemo`]: one toroidal sheet under a commanded velocity, with the
//!   four dynamics parameters on sliders.
//! - [`HeadingDemo`]: the 360-neuron head-direction ring integrating a
//!   turn-rate slider.
//! - [`RaceDemo`]: multiscale stack vs equal-neuron single sheet on the same
//!   seeded random drive, with live trajectory error readouts.
//!
//! All rendering happens in JS; this crate only exposes activity buffers and
//! decoded states.

use mcan_core::attractor::{ActivityGrid, Axis, NetworkParams, ShiftCommand};
use mcan_core::heading::HeadDirection;
use mcan_core::multiscale::{ScaleStack, StackConfig};
use mcan_core::tuned;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

fn params_from(a: u32, e: u32, gamma: f64, phi: f64) -> Result<NetworkParams, JsError> {
    NetworkParams::new(a as usize, e as usize, gamma, phi)
        .map_err(|err| JsError::new(&err.to_string()))
}

/// Single-sheet bump playground.
#[wasm_bindgen]
pub struct BumpDemo {
    grid: ActivityGrid,
    params: NetworkParams,
    side: usize,
    faults: u64,
}

#[wasm_bindgen]
impl BumpDemo {
    #[wasm_bindgen(constructor)]
    pub fn new(side: u32, a: u32, e: u32, gamma: f64, phi: f64) -> Result<BumpDemo, JsError> {
        let side = side as usize;
        let params = params_from(a, e, gamma, phi)?;
        let grid = ActivityGrid::init_gaussian(side, side, (side / 2, side / 2), &params)
            .map_err(|err| JsError::new(&err.to_string()))?;
        Ok(Self { grid, params, side, faults: 0 })
    }

    /// Rebuilds the dynamics parameters without resetting the activity.
    pub fn set_params(&mut self, a: u32, e: u32, gamma: f64, phi: f64) -> Result<(), JsError> {
        self.params = params_from(a, e, gamma, phi)?;
        Ok(())
    }

    pub fn reset(&mut self) -> Result<(), JsError> {
        self.grid = ActivityGrid::init_gaussian(self.side, self.side, (self.side / 2, self.side / 2), &self.params)
            .map_err(|err| JsError::new(&err.to_string()))?;
        self.faults = 0;
        Ok(())
    }

    /// One update with a commanded shift in neurons per tick.
    pub fn step(&mut self, shift_x: f64, shift_y: f64) -> Result<(), JsError> {
        let cmd = ShiftCommand::from_real(shift_x, shift_y);
        let report = self.grid.step(&cmd, &self.params).map_err(|err| JsError::new(&err.to_string()))?;
        if report.collapsed {
            self.faults += 1;
        }
        Ok(())
    }

    /// Activity scaled to [0, 1] for heatmap rendering, row-major.
    pub fn activity(&self) -> Vec<f32> {
        let peak = self.grid.values().iter().cloned().fold(0.0, f64::max).max(1e-12);
        self.grid.values().iter().map(|v| (v / peak) as f32).collect()
    }

    pub fn side(&self) -> u32 {
        self.side as u32
    }

    pub fn decoded_x(&self) -> f64 {
        self.grid.decode(Axis::X).unwrap_or(f64::NAN)
    }

    pub fn decoded_y(&self) -> f64 {
        self.grid.decode(Axis::Y).unwrap_or(f64::NAN)
    }

    /// Collapse/reinitialization events so far (the bump dying is part of
    /// the exhibit: push phi up or command huge shifts).
    pub fn faults(&self) -> u32 {
        self.faults as u32
    }
}

/// Head-direction ring exhibit.
#[wasm_bindgen]
pub struct HeadingDemo {
    hd: HeadDirection,
    truth_deg: f64,
}

#[wasm_bindgen]
impl HeadingDemo {
    #[wasm_bindgen(constructor)]
    pub fn new() -> Result<HeadingDemo, JsError> {
        let params = tuned::genome_1d().to_params().map_err(|err| JsError::new(&err.to_string()))?;
        let hd = HeadDirection::new(90.0, params).map_err(|err| JsError::new(&err.to_string()))?;
        Ok(Self { hd, truth_deg: 90.0 })
    }

    /// Integrates one tick of the given turn rate (degrees per tick).
    pub fn step(&mut self, omega_deg: f64) -> Result<(), JsError> {
        self.hd
            .step(omega_deg.to_radians(), 1.0)
            .map_err(|err| JsError::new(&err.to_string()))?;
        self.truth_deg = (self.truth_deg + omega_deg).rem_euclid(360.0);
        Ok(())
    }

    pub fn ring_activity(&self) -> Vec<f32> {
        let peak = self.hd.ring().values().iter().cloned().fold(0.0, f64::max).max(1e-12);
        self.hd.ring().values().iter().map(|v| (v / peak) as f32).collect()
    }

    pub fn heading_deg(&self) -> f64 {
        self.hd.heading_deg()
    }

    pub fn truth_deg(&self) -> f64 {
        self.truth_deg
    }
}

/// Multiscale vs single-scale tracking race on a shared seeded drive.
#[wasm_bindgen]
pub struct RaceDemo {
    multi: ScaleStack,
    single: ScaleStack,
    rng: ChaCha8Rng,
    heading_deg: f64,
    speed: f64,
    truth: (f64, f64),
    max_speed: f64,
    ate_multi_accum: f64,
    ate_single_accum: f64,
    steps: u64,
    trail_truth: Vec<f32>,
    trail_multi: Vec<f32>,
    trail_single: Vec<f32>,
}

#[wasm_bindgen]
impl RaceDemo {
    /// `max_speed` caps the random drive in m/s (the operating range tops
    /// out at 20).
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32, max_speed: f64) -> Result<RaceDemo, JsError> {
        let params_multi = tuned::genome_2d().to_params().map_err(|err| JsError::new(&err.to_string()))?;
        let params_single = tuned::genome_single().to_params().map_err(|err| JsError::new(&err.to_string()))?;
        let multi = ScaleStack::new(&StackConfig::multiscale(params_multi))
            .map_err(|err| JsError::new(&err.to_string()))?;
        let single = ScaleStack::new(&StackConfig::single_scale(params_single))
            .map_err(|err| JsError::new(&err.to_string()))?;
        Ok(Self {
            multi,
            single,
            rng: ChaCha8Rng::seed_from_u64(seed as u64),
            heading_deg: 0.0,
            speed: 0.0,
            truth: (0.0, 0.0),
            max_speed: max_speed.clamp(1.0, 20.0),
            ate_multi_accum: 0.0,
            ate_single_accum: 0.0,
            steps: 0,
            trail_truth: Vec::new(),
            trail_multi: Vec::new(),
            trail_single: Vec::new(),
        })
    }

    /// Advances both trackers by one tick of the shared random drive.
    pub fn step(&mut self) -> Result<(), JsError> {
        self.heading_deg += self.rng.random_range(-18.0..=18.0);
        // speed meanders inside [0, max] so both slow and fast regimes occur
        let target: f64 = self.rng.random_range(0.0..=self.max_speed);
        self.speed += (target - self.speed) * 0.3;
        let dt = 1.0;

        self.multi
            .step(self.speed, self.heading_deg, dt)
            .map_err(|err| JsError::new(&err.to_string()))?;
        self.single
            .step(self.speed, self.heading_deg, dt)
            .map_err(|err| JsError::new(&err.to_string()))?;

        let theta = self.heading_deg.to_radians();
        self.truth.0 += self.speed * dt * theta.cos();
        self.truth.1 += self.speed * dt * theta.sin();

        let (mx, my) = self.multi.decode();
        let (sx, sy) = self.single.decode();
        self.ate_multi_accum += (mx - self.truth.0).powi(2) + (my - self.truth.1).powi(2);
        self.ate_single_accum += (sx - self.truth.0).powi(2) + (sy - self.truth.1).powi(2);
        self.steps += 1;

        self.trail_truth.extend([self.truth.0 as f32, self.truth.1 as f32]);
        self.trail_multi.extend([mx as f32, my as f32]);
        self.trail_single.extend([sx as f32, sy as f32]);
        Ok(())
    }

    /// Interleaved x,y trail of the ground truth, meters.
    pub fn trail_truth(&self) -> Vec<f32> {
        self.trail_truth.clone()
    }

    pub fn trail_multi(&self) -> Vec<f32> {
        self.trail_multi.clone()
    }

    pub fn trail_single(&self) -> Vec<f32> {
        self.trail_single.clone()
    }

    /// Running RMS position error of the multiscale stack, meters.
    pub fn rms_multi(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            (self.ate_multi_accum / self.steps as f64).sqrt()
        }
    }

    pub fn rms_single(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            (self.ate_single_accum / self.steps as f64).sqrt()
        }
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn selected_scale(&self) -> f64 {
        let scales = self.multi.scales();
        scales[mcan_core::multiscale::select_scale(self.speed, scales)]
    }

    pub fn steps(&self) -> u32 {
        self.steps as u32
    }

    /// Activity of one multiscale sheet scaled to `[0, 1]`; `sheet` indexes
    /// the scales finest-first.
    pub fn sheet_activity(&self, sheet: u32) -> Vec<f32> {
        let nets = self.multi.networks();
        let Some(net) = nets.get(sheet as usize) else {
            return Vec::new();
        };
        let peak = net.values().iter().cloned().fold(0.0, f64::max).max(1e-12);
        net.values().iter().map(|v| (v / peak) as f32).collect()
    }

    pub fn sheet_side(&self) -> u32 {
        self.multi.side() as u32
    }

    pub fn sheet_count(&self) -> u32 {
        self.multi.scales().len() as u32
    }
}
