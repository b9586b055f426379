//! Kitti odometry ground-truth ingestion.
//!
//! Pose files carry one 3x4 row-major camera-to-world matrix per line
//! (12 whitespace-separated reals, left-camera convention: x right, y down,
//! z forward). The planar projection maps camera z to world x and camera -x
//! to world y; altitude (camera y) is discarded.

use super::dataset::TrajectoryDataset;
use crate::error::{CoreError, Result};
use std::path::Path;

/// Kitti odometry frame interval (10 fps).
pub const KITTI_DT: f64 = 0.1;

/// Loads a Kitti pose file and differentiates it into a velocity dataset.
///
/// Speeds are chord lengths over `dt`; turn rates are course (chord
/// direction) differences, with the first sample turning from the recorded
/// initial yaw onto the first course so that heading-first re-integration
/// from the ground-truth start pose reproduces every position exactly.
pub fn load_kitti_poses(path: &Path, dt: f64) -> Result<TrajectoryDataset> {
    let text = std::fs::read_to_string(path)?;
    let context = path.display().to_string();
    let mut positions: Vec<(f64, f64)> = Vec::new();
    let mut yaws: Vec<f64> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 12 {
            return Err(CoreError::parse(
                &context,
                Some(lineno),
                format!("expected 12 pose values, found {}", fields.len()),
            ));
        }
        let mut m = [0.0f64; 12];
        for (i, f) in fields.iter().enumerate() {
            m[i] = f.parse().map_err(|_| {
                CoreError::parse(&context, Some(lineno), format!("value {} is not a number: '{f}'", i + 1))
            })?;
        }
        // row-major [r11 r12 r13 tx; r21 r22 r23 ty; r31 r32 r33 tz]
        let (tx, tz) = (m[3], m[11]);
        positions.push((tz, -tx));
        yaws.push((-m[2]).atan2(m[10])); // forward axis (r13, r33) projected
    }

    if positions.is_empty() {
        return Err(CoreError::parse(&context, None, "no poses in file"));
    }
    if dt <= 0.0 {
        return Err(CoreError::Input("frame interval must be positive".into()));
    }

    let n = positions.len();
    let mut samples: Vec<(f64, f64, f64)> = Vec::with_capacity(n);
    let mut courses: Vec<f64> = Vec::with_capacity(n);
    let mut prev_course = yaws[0];
    for k in 0..n.saturating_sub(1) {
        let dx = positions[k + 1].0 - positions[k].0;
        let dy = positions[k + 1].1 - positions[k].1;
        let course = if dx.hypot(dy) > 1e-9 { dy.atan2(dx) } else { prev_course };
        courses.push(course);
        prev_course = course;
    }

    let mut prev = yaws[0];
    for k in 0..n {
        let t = k as f64 * dt;
        if k < n - 1 {
            let dx = positions[k + 1].0 - positions[k].0;
            let dy = positions[k + 1].1 - positions[k].1;
            let v = dx.hypot(dy) / dt;
            let omega = wrap_angle(courses[k] - prev) / dt;
            prev = courses[k];
            samples.push((t, v, omega));
        } else {
            // hold the last motion so lengths match
            let (_, v, omega) = *samples.last().unwrap_or(&(t, 0.0, 0.0));
            samples.push((t, v, omega));
        }
    }

    let ground_truth: Vec<(f64, f64, f64, f64)> = positions
        .iter()
        .zip(&yaws)
        .enumerate()
        .map(|(k, ((x, y), yaw))| (k as f64 * dt, *x, *y, *yaw))
        .collect();

    let source = path
        .file_stem()
        .map(|s| format!("kitti-{}", s.to_string_lossy()))
        .unwrap_or_else(|| "kitti".into());
    TrajectoryDataset::new(samples, ground_truth, source)
}

fn wrap_angle(a: f64) -> f64 {
    let mut a = a.rem_euclid(std::f64::consts::TAU);
    if a > std::f64::consts::PI {
        a -= std::f64::consts::TAU;
    }
    a
}
