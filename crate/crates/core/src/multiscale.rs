//! Multiscale position tracking: a stack of 2D attractor sheets at
//! geometrically spaced spatial resolutions.
//!
//! Each step the world displacement is routed to the sheet whose resolution
//! is nearest the current speed (log-space), converted to a neuron shift for
//! that sheet only; the others run self-stabilizing zero-shift updates.
//! Per-sheet wraparound buffers record full torus traversals so the decoded
//! world position never resets at an edge.

use crate::attractor::{ActivityGrid, Axis, NetworkParams, ShiftCommand};
use crate::error::{CoreError, Result};
use crate::heading::HeadDirection;

/// Default scale resolutions in meters per neuron.
pub const DEFAULT_SCALES: [f64; 4] = [0.25, 1.0, 4.0, 16.0];
/// Default sheet side for the multiscale stack.
pub const DEFAULT_SIDE: usize = 100;
/// Operating speed range upper bound, m/s.
pub const DEFAULT_MAX_SPEED: f64 = 20.0;

/// Stack construction parameters.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct StackConfig {
    /// Side length of each square sheet (N neurons).
    pub side: usize,
    /// Meters per neuron for each sheet; strictly increasing.
    pub scales: Vec<f64>,
    pub params: NetworkParams,
    /// Speeds beyond this are clamped (with a warning count).
    pub max_speed: f64,
}

impl StackConfig {
    pub fn multiscale(params: NetworkParams) -> Self {
        Self {
            side: DEFAULT_SIDE,
            scales: DEFAULT_SCALES.to_vec(),
            params,
            max_speed: DEFAULT_MAX_SPEED,
        }
    }

    /// Equal-neuron single-sheet baseline: one 200x200 network at 1 m/neuron.
    pub fn single_scale(params: NetworkParams) -> Self {
        Self {
            side: 200,
            scales: vec![1.0],
            params,
            max_speed: DEFAULT_MAX_SPEED,
        }
    }
}

/// Picks the sheet whose resolution is log-nearest the given per-step
/// displacement; ties break toward the finer scale, zero displacement maps
/// to the finest.
pub fn select_scale(displacement: f64, scales: &[f64]) -> usize {
    assert!(!scales.is_empty());
    if displacement <= 0.0 {
        return 0;
    }
    let target = displacement.ln();
    let mut best = 0;
    let mut best_cost = (target - scales[0].ln()).abs();
    for (j, s) in scales.iter().enumerate().skip(1) {
        let cost = (target - s.ln()).abs();
        if cost < best_cost - 1e-12 {
            best = j;
            best_cost = cost;
        }
    }
    best
}

/// Wraparound buffer delta for one axis after one step.
///
/// A decoded-index jump larger than half the sheet is a torus traversal; the
/// buffer gains one full sheet extent, signed by the motion direction along
/// the axis (`cos` of the heading for x, `sin` for y).
pub fn update_wraparound(
    prev_idx: f64,
    new_idx: f64,
    heading_deg: f64,
    axis: Axis,
    n: usize,
    scale: f64,
) -> f64 {
    if (new_idx - prev_idx).abs() <= n as f64 / 2.0 {
        return 0.0;
    }
    let theta = heading_deg.to_radians();
    let direction = match axis {
        Axis::X => theta.cos(),
        Axis::Y => theta.sin(),
    };
    if direction > 0.0 {
        n as f64 * scale
    } else {
        -(n as f64 * scale)
    }
}

/// Per-step outcome counters for a stack update.
#[derive(Debug, Clone, Copy, Default)]
pub struct StackStepReport {
    pub selected: usize,
    pub collapsed: bool,
    pub speed_clamped: bool,
}

/// M parallel sheets with per-sheet wraparound buffers and decode state.
#[derive(Debug, Clone)]
pub struct ScaleStack {
    networks: Vec<ActivityGrid>,
    scales: Vec<f64>,
    wrap_x: Vec<f64>,
    wrap_y: Vec<f64>,
    last_decoded: Vec<(f64, f64)>,
    origin: f64,
    side: usize,
    params: NetworkParams,
    max_speed: f64,
    faults: u64,
    clamps: u64,
}

impl ScaleStack {
    pub fn new(config: &StackConfig) -> Result<Self> {
        if config.scales.is_empty() {
            return Err(CoreError::Config("at least one scale is required".into()));
        }
        if config.scales.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CoreError::Config(format!(
                "scales must be strictly increasing, got {:?}",
                config.scales
            )));
        }
        if config.scales[0] <= 0.0 {
            return Err(CoreError::Config("scales must be positive".into()));
        }
        if config.max_speed <= 0.0 {
            return Err(CoreError::Config("max speed must be positive".into()));
        }
        let center = config.side / 2;
        let networks: Vec<ActivityGrid> = config
            .scales
            .iter()
            .map(|_| ActivityGrid::init_gaussian(config.side, config.side, (center, center), &config.params))
            .collect::<Result<_>>()?;
        let m = config.scales.len();
        let last_decoded = networks
            .iter()
            .map(|g| Ok((g.decode(Axis::X)?, g.decode(Axis::Y)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            networks,
            scales: config.scales.clone(),
            wrap_x: vec![0.0; m],
            wrap_y: vec![0.0; m],
            last_decoded,
            origin: center as f64,
            side: config.side,
            params: config.params,
            max_speed: config.max_speed,
            faults: 0,
            clamps: 0,
        })
    }

    /// Total neurons across all sheets (for equal-neuron comparisons).
    pub fn neuron_count(&self) -> usize {
        self.networks.iter().map(|g| g.len()).sum()
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn networks(&self) -> &[ActivityGrid] {
        &self.networks
    }

    /// Collapse/reinitialization events so far.
    pub fn faults(&self) -> u64 {
        self.faults
    }

    /// Steps whose speed was outside the operating range and got clamped.
    pub fn clamps(&self) -> u64 {
        self.clamps
    }

    /// Advances the stack by one tick: routes `v*dt` along `heading_deg` to
    /// the log-nearest sheet, zero-shift updates for the rest, then updates
    /// wraparound buffers from the per-sheet decode deltas.
    pub fn step(&mut self, v: f64, heading_deg: f64, dt: f64) -> Result<StackStepReport> {
        if !v.is_finite() || !heading_deg.is_finite() || !dt.is_finite() || dt <= 0.0 {
            return Err(CoreError::Input(format!("bad step inputs: v={v}, heading={heading_deg}, dt={dt}")));
        }
        let mut report = StackStepReport::default();
        let speed = if (0.0..=self.max_speed).contains(&v) {
            v
        } else {
            self.clamps += 1;
            report.speed_clamped = true;
            v.clamp(0.0, self.max_speed)
        };

        let displacement = speed * dt;
        let j = select_scale(displacement, &self.scales);
        report.selected = j;

        let theta = heading_deg.to_radians();
        let alpha_x = displacement * theta.cos() / self.scales[j];
        let alpha_y = displacement * theta.sin() / self.scales[j];
        let cmd = ShiftCommand::from_real(alpha_x, alpha_y);

        for (i, net) in self.networks.iter_mut().enumerate() {
            let step_cmd = if i == j { cmd } else { ShiftCommand::zero() };
            let rep = net.step(&step_cmd, &self.params)?;
            if rep.collapsed {
                self.faults += 1;
                report.collapsed = true;
            }
        }

        for i in 0..self.networks.len() {
            let nx = self.networks[i].decode(Axis::X).map_err(|_| self.undecodable(i))?;
            let ny = self.networks[i].decode(Axis::Y).map_err(|_| self.undecodable(i))?;
            let (px, py) = self.last_decoded[i];
            self.wrap_x[i] += update_wraparound(px, nx, heading_deg, Axis::X, self.side, self.scales[i]);
            self.wrap_y[i] += update_wraparound(py, ny, heading_deg, Axis::Y, self.side, self.scales[i]);
            self.last_decoded[i] = (nx, ny);
        }
        Ok(report)
    }

    fn undecodable(&self, i: usize) -> CoreError {
        CoreError::Undecodable(format!(
            "sheet at scale {} m/neuron has no decodable activity",
            self.scales[i]
        ))
    }

    /// World displacement since initialization, in meters: per axis the sum
    /// over sheets of `scale * (decoded index - origin) + wraparound buffer`.
    pub fn decode(&self) -> (f64, f64) {
        let mut x = 0.0;
        let mut y = 0.0;
        for (i, s) in self.scales.iter().enumerate() {
            let (dx, dy) = self.last_decoded[i];
            x += s * (dx - self.origin) + self.wrap_x[i];
            y += s * (dy - self.origin) + self.wrap_y[i];
        }
        (x, y)
    }

    /// Decoded index of one sheet (diagnostics).
    pub fn decoded_index(&self, sheet: usize) -> (f64, f64) {
        self.last_decoded[sheet]
    }

    pub fn wrap_buffers(&self, sheet: usize) -> (f64, f64) {
        (self.wrap_x[sheet], self.wrap_y[sheet])
    }
}

/// One timestamped pose produced by the tracker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseEstimate {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// Heading in degrees, `[0, 360)`.
    pub theta_deg: f64,
}

/// Head-direction plus position stack driven from one velocity stream.
#[derive(Debug, Clone)]
pub struct Tracker {
    hd: HeadDirection,
    stack: ScaleStack,
    origin_x: f64,
    origin_y: f64,
}

/// Counters accumulated over a tracking run.
#[derive(Debug, Clone, Copy, Default)]
pub struct TrackReport {
    pub faults: u64,
    pub speed_clamps: u64,
}

impl Tracker {
    pub fn new(initial: &PoseEstimate, stack_config: &StackConfig, hd_params: NetworkParams) -> Result<Self> {
        Ok(Self {
            hd: HeadDirection::new(initial.theta_deg, hd_params)?,
            stack: ScaleStack::new(stack_config)?,
            origin_x: initial.x,
            origin_y: initial.y,
        })
    }

    /// One tick: the head-direction ring integrates `omega` first, then the
    /// stack integrates `v` along the freshly decoded heading.
    pub fn step(&mut self, v: f64, omega: f64, dt: f64) -> Result<()> {
        self.hd.step(omega, dt)?;
        self.stack.step(v, self.hd.heading_deg(), dt)?;
        Ok(())
    }

    pub fn pose(&self, t: f64) -> PoseEstimate {
        let (dx, dy) = self.stack.decode();
        PoseEstimate {
            t,
            x: self.origin_x + dx,
            y: self.origin_y + dy,
            theta_deg: self.hd.heading_deg(),
        }
    }

    pub fn stack(&self) -> &ScaleStack {
        &self.stack
    }

    pub fn head_direction(&self) -> &HeadDirection {
        &self.hd
    }

    pub fn report(&self) -> TrackReport {
        TrackReport {
            faults: self.stack.faults() + self.hd.faults(),
            speed_clamps: self.stack.clamps(),
        }
    }
}

/// Integrates a `(t, v, omega)` stream into one pose estimate per sample.
///
/// Sample `k` carries the velocity over `[t_k, t_{k+1})`; the estimate at
/// `t_0` is the initial pose and the final sample's velocity is unused.
pub fn track_trajectory(
    samples: &[(f64, f64, f64)],
    initial: PoseEstimate,
    stack_config: &StackConfig,
    hd_params: NetworkParams,
) -> Result<(Vec<PoseEstimate>, TrackReport)> {
    if samples.is_empty() {
        return Ok((Vec::new(), TrackReport::default()));
    }
    if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(CoreError::Input("timestamps must be strictly increasing".into()));
    }
    let mut tracker = Tracker::new(&initial, stack_config, hd_params)?;
    let mut estimates = Vec::with_capacity(samples.len());
    estimates.push(PoseEstimate { t: samples[0].0, ..initial });
    for k in 1..samples.len() {
        let (t_prev, v, omega) = samples[k - 1];
        let t = samples[k].0;
        tracker.step(v, omega, t - t_prev)?;
        estimates.push(tracker.pose(t));
    }
    Ok((estimates, tracker.report()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuned_ish() -> NetworkParams {
        NetworkParams::new(3, 10, 1.0, 0.0001).unwrap()
    }

    fn small_stack() -> StackConfig {
        StackConfig {
            side: 60,
            scales: DEFAULT_SCALES.to_vec(),
            params: tuned_ish(),
            max_speed: 20.0,
        }
    }

    #[test]
    fn select_scale_conventions() {
        let scales = [0.25, 1.0, 4.0, 16.0];
        assert_eq!(select_scale(0.0, &scales), 0);
        assert_eq!(select_scale(16.0, &scales), 3);
        // log-tie between 1 and 4 breaks toward the finer scale
        assert_eq!(select_scale(2.0, &scales), 1);
        assert_eq!(select_scale(0.1, &scales), 0);
        assert_eq!(select_scale(100.0, &scales), 3);
    }

    #[test]
    fn every_displacement_maps_to_exactly_one_scale() {
        let scales = [0.25, 1.0, 4.0, 16.0];
        let mut d = 0.0;
        while d <= 20.0 {
            let j = select_scale(d, &scales);
            assert!(j < scales.len());
            d += 0.037;
        }
    }

    #[test]
    fn wraparound_rule_matches_stated_cases() {
        assert_eq!(update_wraparound(99.5, 0.5, 0.0, Axis::X, 100, 1.0), 100.0);
        assert_eq!(update_wraparound(0.5, 99.5, 180.0, Axis::X, 100, 1.0), -100.0);
        assert_eq!(update_wraparound(40.0, 42.0, 0.0, Axis::X, 100, 1.0), 0.0);
        assert_eq!(update_wraparound(99.5, 0.5, 90.0, Axis::Y, 100, 0.25), 25.0);
    }

    #[test]
    fn neuron_counts_expose_equal_neuron_comparison() {
        let multi = ScaleStack::new(&StackConfig::multiscale(tuned_ish())).unwrap();
        let single = ScaleStack::new(&StackConfig::single_scale(tuned_ish())).unwrap();
        assert_eq!(multi.neuron_count(), 40_000);
        assert_eq!(single.neuron_count(), 40_000);
    }

    #[test]
    fn fresh_stack_decodes_to_origin() {
        let stack = ScaleStack::new(&small_stack()).unwrap();
        let (x, y) = stack.decode();
        assert!(x.abs() < 1e-9 && y.abs() < 1e-9, "({x}, {y})");
    }

    #[test]
    fn zero_velocity_is_stable() {
        let mut stack = ScaleStack::new(&small_stack()).unwrap();
        for _ in 0..50 {
            stack.step(0.0, 0.0, 1.0).unwrap();
            let (x, y) = stack.decode();
            assert!(x.abs() < 0.1 * 0.25 && y.abs() < 0.1 * 0.25, "({x}, {y})");
        }
    }

    #[test]
    fn unit_speed_routes_to_unit_scale_and_advances() {
        let mut stack = ScaleStack::new(&small_stack()).unwrap();
        for _ in 0..30 {
            stack.step(0.0, 0.0, 1.0).unwrap(); // settle the bump profiles
        }
        for _ in 0..30 {
            let rep = stack.step(1.0, 0.0, 1.0).unwrap();
            assert_eq!(rep.selected, 1);
        }
        // decode linearity at an exact-match speed: k steps at scale s move
        // the decoded position by k*s within half a cell of that scale
        let (x, y) = stack.decode();
        assert!((x - 30.0).abs() < 0.5, "x = {x}");
        assert!(y.abs() < 0.5, "y = {y}");
    }

    #[test]
    fn top_speed_routes_to_coarse_scale_and_isolates_axes() {
        let mut stack = ScaleStack::new(&small_stack()).unwrap();
        for _ in 0..20 {
            let rep = stack.step(16.0, 90.0, 1.0).unwrap();
            assert_eq!(rep.selected, 3);
        }
        let (x, y) = stack.decode();
        assert!((y - 320.0).abs() < 16.0, "y = {y}");
        assert!(x.abs() < 8.0, "x = {x}");
    }

    #[test]
    fn out_of_range_speed_is_clamped_and_counted() {
        let mut stack = ScaleStack::new(&small_stack()).unwrap();
        let rep = stack.step(50.0, 0.0, 1.0).unwrap();
        assert!(rep.speed_clamped);
        assert_eq!(stack.clamps(), 1);
    }

    #[test]
    fn wraparound_keeps_position_continuous() {
        // 60-neuron sheet at scale 1: the unit-scale sheet wraps every 60 m.
        let mut stack = ScaleStack::new(&small_stack()).unwrap();
        let mut prev = stack.decode();
        for _ in 0..200 {
            stack.step(1.0, 0.0, 1.0).unwrap();
            let cur = stack.decode();
            let jump = (cur.0 - prev.0).hypot(cur.1 - prev.1);
            assert!(jump < 2.0 * 16.0, "jump of {jump} m");
            prev = cur;
        }
        assert!((prev.0 - 200.0).abs() < 6.0, "final x {}", prev.0);
    }

    #[test]
    fn track_trajectory_straight_line() {
        let samples: Vec<(f64, f64, f64)> = (0..100).map(|k| (k as f64, 1.0, 0.0)).collect();
        let initial = PoseEstimate { t: 0.0, x: 0.0, y: 0.0, theta_deg: 0.0 };
        let (estimates, report) =
            track_trajectory(&samples, initial, &small_stack(), tuned_ish()).unwrap();
        assert_eq!(estimates.len(), 100);
        let last = estimates.last().unwrap();
        assert!((last.x - 99.0).abs() < 2.0, "x = {}", last.x);
        assert!(last.y.abs() < 2.0, "y = {}", last.y);
        assert_eq!(report.faults, 0);
    }

    #[test]
    fn track_trajectory_rejects_nonmonotonic_time() {
        let samples = vec![(0.0, 1.0, 0.0), (0.5, 1.0, 0.0), (0.5, 1.0, 0.0)];
        let initial = PoseEstimate { t: 0.0, x: 0.0, y: 0.0, theta_deg: 0.0 };
        assert!(matches!(
            track_trajectory(&samples, initial, &small_stack(), tuned_ish()),
            Err(CoreError::Input(_))
        ));
    }

    #[test]
    fn track_trajectory_empty_input() {
        let initial = PoseEstimate { t: 0.0, x: 0.0, y: 0.0, theta_deg: 0.0 };
        let (estimates, _) = track_trajectory(&[], initial, &small_stack(), tuned_ish()).unwrap();
        assert!(estimates.is_empty());
    }
}
