//! Pure-pursuit traversal of planned routes with bicycle kinematics.

use super::raster::OccupancyGrid;
use crate::error::{CoreError, Result};
use crate::eval::dataset::TrajectoryDataset;

/// Planar bicycle state.
#[derive(Debug, Clone, Copy)]
pub struct BicycleState {
    pub x: f64,
    pub y: f64,
    pub theta_rad: f64,
    pub v: f64,
}

/// Vehicle and controller parameters.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct BicycleConfig {
    /// Wheelbase in meters.
    pub wheelbase_m: f64,
    /// Pure-pursuit lookahead, in cells.
    pub lookahead_cells: f64,
    /// Acceleration bound, m/s^2.
    pub max_accel: f64,
    /// Steering angle bound, radians.
    pub max_steer_rad: f64,
    /// Sample interval, seconds.
    pub dt: f64,
}

impl Default for BicycleConfig {
    fn default() -> Self {
        Self {
            wheelbase_m: 2.5,
            lookahead_cells: 3.0,
            max_accel: 2.0,
            max_steer_rad: 0.6,
            dt: 1.0,
        }
    }
}

/// Traversal result; `timed_out` marks a run that exhausted its step budget
/// before reaching the goal (the dataset then holds the partial track).
#[derive(Debug, Clone)]
pub struct TraverseOutcome {
    pub dataset: TrajectoryDataset,
    pub timed_out: bool,
}

fn wrap_angle(a: f64) -> f64 {
    let mut a = a.rem_euclid(std::f64::consts::TAU);
    if a > std::f64::consts::PI {
        a -= std::f64::consts::TAU;
    }
    a
}

/// Drives the cell path with pure-pursuit steering, recording `(t, v, omega)`
/// and the pose before each step. The recorded stream re-integrates to the
/// recorded poses exactly (heading-first Euler), and recorded speeds never
/// exceed the local cell speed.
pub fn traverse(
    path: &[(usize, usize)],
    grid: &OccupancyGrid,
    config: &BicycleConfig,
    source: impl Into<String>,
) -> Result<TraverseOutcome> {
    if path.is_empty() {
        return Err(CoreError::Input("cannot traverse an empty path".into()));
    }
    let source = source.into();
    let waypoints: Vec<(f64, f64)> = path.iter().map(|(ix, iy)| grid.cell_center(*ix, *iy)).collect();
    if waypoints.len() == 1 {
        let (x, y) = waypoints[0];
        let dataset = TrajectoryDataset::new(vec![(0.0, 0.0, 0.0)], vec![(0.0, x, y, 0.0)], source)?;
        return Ok(TraverseOutcome { dataset, timed_out: false });
    }

    // cumulative path length from each waypoint to the end, for the speed taper
    let mut remaining = vec![0.0; waypoints.len()];
    for k in (0..waypoints.len() - 1).rev() {
        let d = (waypoints[k + 1].0 - waypoints[k].0).hypot(waypoints[k + 1].1 - waypoints[k].1);
        remaining[k] = remaining[k + 1] + d;
    }

    let lookahead_m = config.lookahead_cells * grid.resolution_m;
    let goal = *waypoints.last().unwrap();
    let goal_tol = grid.resolution_m;
    let budget = (remaining[0] / 0.5) as usize + 600;

    let mut state = BicycleState {
        x: waypoints[0].0,
        y: waypoints[0].1,
        theta_rad: (waypoints[1].1 - waypoints[0].1).atan2(waypoints[1].0 - waypoints[0].0),
        v: 0.0,
    };
    let mut progress = 0usize;
    let mut samples: Vec<(f64, f64, f64)> = Vec::new();
    let mut ground_truth: Vec<(f64, f64, f64, f64)> = Vec::new();
    let mut timed_out = false;

    for step in 0.. {
        if (state.x - goal.0).hypot(state.y - goal.1) <= goal_tol {
            break;
        }
        if step >= budget {
            timed_out = true;
            break;
        }

        // advance the progress index to the nearest waypoint ahead
        while progress + 1 < waypoints.len() {
            let here = (state.x - waypoints[progress].0).hypot(state.y - waypoints[progress].1);
            let next = (state.x - waypoints[progress + 1].0).hypot(state.y - waypoints[progress + 1].1);
            if next <= here {
                progress += 1;
            } else {
                break;
            }
        }

        // lookahead target along the path
        let mut target = goal;
        let mut walked = 0.0;
        let mut target_idx = waypoints.len() - 1;
        for k in progress..waypoints.len() - 1 {
            let d = (waypoints[k + 1].0 - waypoints[k].0).hypot(waypoints[k + 1].1 - waypoints[k].1);
            walked += d;
            if walked >= lookahead_m {
                target = waypoints[k + 1];
                target_idx = k + 1;
                break;
            }
        }

        // pure pursuit steering toward the target
        let to_target = (target.1 - state.y).atan2(target.0 - state.x);
        let alpha = wrap_angle(to_target - state.theta_rad);
        let ld = (target.0 - state.x).hypot(target.1 - state.y).max(grid.resolution_m * 0.5);
        let curvature = 2.0 * alpha.sin() / ld;
        let steer = (curvature * config.wheelbase_m).atan().clamp(-config.max_steer_rad, config.max_steer_rad);

        // local speed limit with an end-of-path taper
        let (cx, cy) = path[progress.min(path.len() - 1)];
        let limit = grid.speed(cx, cy).min(grid.speed(path[target_idx].0, path[target_idx].1));
        let rem = remaining[progress] + (state.x - waypoints[progress].0).hypot(state.y - waypoints[progress].1);
        let taper = (2.0 * config.max_accel * rem.max(0.0)).sqrt();
        let v_next = (state.v + config.max_accel * config.dt).min(limit).min(taper.max(0.8));
        let omega = v_next / config.wheelbase_m * steer.tan();

        let t = samples.len() as f64 * config.dt;
        samples.push((t, v_next, omega));
        ground_truth.push((t, state.x, state.y, state.theta_rad));

        state.theta_rad += omega * config.dt;
        state.x += v_next * config.dt * state.theta_rad.cos();
        state.y += v_next * config.dt * state.theta_rad.sin();
        state.v = v_next;
    }

    // closing sample so poses and samples stay aligned; its velocity is
    // never integrated
    let t = samples.len() as f64 * config.dt;
    samples.push((t, 0.0, 0.0));
    ground_truth.push((t, state.x, state.y, state.theta_rad));

    let dataset = TrajectoryDataset::new(samples, ground_truth, source)?;
    if timed_out {
        return Ok(TraverseOutcome { dataset, timed_out: true });
    }
    Ok(TraverseOutcome { dataset, timed_out: false })
}
