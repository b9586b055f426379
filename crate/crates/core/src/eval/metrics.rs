//! Error metrics between estimated and ground-truth trajectories.

use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// Planar rigid transform (rotation then translation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Se2 {
    pub theta_rad: f64,
    pub tx: f64,
    pub ty: f64,
}

impl Se2 {
    pub fn identity() -> Self {
        Self { theta_rad: 0.0, tx: 0.0, ty: 0.0 }
    }

    pub fn apply(&self, p: (f64, f64)) -> (f64, f64) {
        let (s, c) = self.theta_rad.sin_cos();
        (c * p.0 - s * p.1 + self.tx, s * p.0 + c * p.1 + self.ty)
    }
}

fn check_lengths(estimate: &[(f64, f64)], truth: &[(f64, f64)]) -> Result<()> {
    if estimate.len() != truth.len() {
        return Err(CoreError::Input(format!(
            "trajectory lengths differ: estimate {} vs truth {}",
            estimate.len(),
            truth.len()
        )));
    }
    Ok(())
}

/// Least-squares rigid 2D alignment (rotation + translation, no scale)
/// minimizing `sum ||R*est + t - truth||^2`.
///
/// With all estimate points coincident the rotation is the identity and the
/// translation maps the common point onto the truth centroid.
pub fn align_se2(estimate: &[(f64, f64)], truth: &[(f64, f64)]) -> Result<Se2> {
    check_lengths(estimate, truth)?;
    if estimate.len() < 2 {
        return Err(CoreError::Input("alignment needs at least two points".into()));
    }
    let n = estimate.len() as f64;
    let (mut ex, mut ey, mut tx, mut ty) = (0.0, 0.0, 0.0, 0.0);
    for ((ax, ay), (bx, by)) in estimate.iter().zip(truth) {
        ex += ax;
        ey += ay;
        tx += bx;
        ty += by;
    }
    let (ex, ey, tx, ty) = (ex / n, ey / n, tx / n, ty / n);

    // 2D Umeyama closed form: the optimal angle is the argument of the
    // complex cross-correlation of the centered point sets.
    let mut dot = 0.0;
    let mut cross = 0.0;
    for ((ax, ay), (bx, by)) in estimate.iter().zip(truth) {
        let (px, py) = (ax - ex, ay - ey);
        let (qx, qy) = (bx - tx, by - ty);
        dot += px * qx + py * qy;
        cross += px * qy - py * qx;
    }
    let theta = if dot == 0.0 && cross == 0.0 { 0.0 } else { cross.atan2(dot) };
    let (s, c) = theta.sin_cos();
    Ok(Se2 {
        theta_rad: theta,
        tx: tx - (c * ex - s * ey),
        ty: ty - (s * ex + c * ey),
    })
}

/// Absolute trajectory error: RMSE of pointwise distances after rigid
/// alignment.
pub fn ate(estimate: &[(f64, f64)], truth: &[(f64, f64)]) -> Result<f64> {
    let transform = align_se2(estimate, truth)?;
    let mut sq = 0.0;
    for (e, t) in estimate.iter().zip(truth) {
        let (ax, ay) = transform.apply(*e);
        sq += (ax - t.0).powi(2) + (ay - t.1).powi(2);
    }
    Ok((sq / estimate.len() as f64).sqrt())
}

/// Sum of absolute per-step differences, without alignment; the raw
/// integration error used as the tuning fitness.
pub fn sad(estimate: &[(f64, f64)], truth: &[(f64, f64)]) -> Result<f64> {
    check_lengths(estimate, truth)?;
    Ok(estimate
        .iter()
        .zip(truth)
        .map(|((ax, ay), (bx, by))| (ax - bx).abs() + (ay - by).abs())
        .sum())
}

/// 1D heading variant of [`sad`]: per-step circular differences in degrees.
pub fn sad_heading_deg(estimate: &[f64], truth: &[f64]) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(CoreError::Input(format!(
            "heading sequence lengths differ: {} vs {}",
            estimate.len(),
            truth.len()
        )));
    }
    Ok(estimate
        .iter()
        .zip(truth)
        .map(|(a, b)| {
            let d = (a - b).rem_euclid(360.0);
            d.min(360.0 - d)
        })
        .sum())
}

/// Splits by cumulative ground-truth distance and scores each segment
/// independently (each realigned, so error does not accumulate across
/// segments). A segment length beyond the trajectory yields one segment.
pub fn segment_ate(
    estimate: &[(f64, f64)],
    truth: &[(f64, f64)],
    segment_length_m: f64,
) -> Result<Vec<f64>> {
    check_lengths(estimate, truth)?;
    if segment_length_m <= 0.0 {
        return Err(CoreError::Input("segment length must be positive".into()));
    }
    if estimate.len() < 2 {
        return Ok(Vec::new());
    }
    let mut segments = Vec::new();
    let mut start = 0;
    let mut accumulated = 0.0;
    for k in 1..truth.len() {
        accumulated += dist(truth[k - 1], truth[k]);
        let last = k == truth.len() - 1;
        if accumulated >= segment_length_m || last {
            if k - start >= 1 {
                segments.push(ate(&estimate[start..=k], &truth[start..=k])?);
            }
            start = k;
            accumulated = 0.0;
        }
    }
    Ok(segments)
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Ground-truth path length.
pub fn path_length(truth: &[(f64, f64)]) -> f64 {
    truth.windows(2).map(|w| dist(w[0], w[1])).sum()
}

/// Summary of one estimate-vs-truth comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricReport {
    pub ate_m: f64,
    pub ate_per_meter: f64,
    pub sad: f64,
    pub distance_m: f64,
    pub segment_length_m: f64,
    pub segment_ate_m: Vec<f64>,
}

impl MetricReport {
    /// Computes all metrics; `ate_per_meter` is normalized by the
    /// ground-truth path length.
    pub fn compute(
        estimate: &[(f64, f64)],
        truth: &[(f64, f64)],
        segment_length_m: f64,
    ) -> Result<Self> {
        let ate_m = ate(estimate, truth)?;
        let distance_m = path_length(truth);
        let ate_per_meter = if distance_m > 0.0 { ate_m / distance_m } else { 0.0 };
        Ok(Self {
            ate_m,
            ate_per_meter,
            sad: sad(estimate, truth)?,
            distance_m,
            segment_length_m,
            segment_ate_m: segment_ate(estimate, truth, segment_length_m)?,
        })
    }

    pub fn save_json(&self, path: &std::path::Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| CoreError::Config(format!("report serialization: {e}")))?;
        std::fs::write(path, json + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> Vec<(f64, f64)> {
        (0..n).map(|k| (k as f64, 0.0)).collect()
    }

    #[test]
    fn align_identity_for_equal_trajectories() {
        let t = line(10);
        let a = align_se2(&t, &t).unwrap();
        assert!(a.theta_rad.abs() < 1e-12);
        assert!(a.tx.abs() < 1e-12 && a.ty.abs() < 1e-12);
    }

    #[test]
    fn align_recovers_pure_rotation() {
        let truth: Vec<(f64, f64)> = (0..20).map(|k| (k as f64 * 0.7, (k as f64).sin())).collect();
        // estimate = truth rotated +90 degrees about the origin
        let estimate: Vec<(f64, f64)> = truth.iter().map(|(x, y)| (-y, *x)).collect();
        let a = align_se2(&estimate, &truth).unwrap();
        assert!(
            (a.theta_rad + std::f64::consts::FRAC_PI_2).abs() < 1e-9,
            "recovered {}",
            a.theta_rad
        );
        for (e, t) in estimate.iter().zip(&truth) {
            let p = a.apply(*e);
            assert!((p.0 - t.0).abs() < 1e-9 && (p.1 - t.1).abs() < 1e-9);
        }
    }

    #[test]
    fn align_recovers_known_transform_under_noise() {
        // Monte Carlo with seeded noise: recovered transform within 3*sigma/sqrt(n).
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let n = 400;
        let sigma = 0.1;
        let truth: Vec<(f64, f64)> =
            (0..n).map(|k| ((k as f64 * 0.21).sin() * 30.0, k as f64 * 0.5)).collect();
        let applied = Se2 { theta_rad: 0.4, tx: -3.0, ty: 8.0 };
        let estimate: Vec<(f64, f64)> = truth
            .iter()
            .map(|p| {
                // estimate = inverse-transformed truth plus noise
                let (s, c) = (-applied.theta_rad).sin_cos();
                let q = (p.0 - applied.tx, p.1 - applied.ty);
                (
                    c * q.0 - s * q.1 + rng.random_range(-sigma..sigma),
                    s * q.0 + c * q.1 + rng.random_range(-sigma..sigma),
                )
            })
            .collect();
        let a = align_se2(&estimate, &truth).unwrap();
        let bound = 3.0 * sigma / (n as f64).sqrt();
        assert!((a.theta_rad - applied.theta_rad).abs() < bound, "theta {}", a.theta_rad);
        assert!((a.tx - applied.tx).abs() < 3.0 * bound * 30.0, "tx {}", a.tx);
        assert!((a.ty - applied.ty).abs() < 3.0 * bound * 30.0, "ty {}", a.ty);
    }

    #[test]
    fn align_degenerate_coincident_points() {
        let estimate = vec![(2.0, 3.0); 5];
        let truth: Vec<(f64, f64)> = (0..5).map(|k| (k as f64, 1.0)).collect();
        let a = align_se2(&estimate, &truth).unwrap();
        assert_eq!(a.theta_rad, 0.0);
        let p = a.apply((2.0, 3.0));
        assert!((p.0 - 2.0).abs() < 1e-12 && (p.1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ate_zero_for_identical_and_for_constant_offset() {
        let t = line(50);
        assert!(ate(&t, &t).unwrap() < 1e-12);
        let shifted: Vec<(f64, f64)> = t.iter().map(|(x, y)| (x + 5.0, *y)).collect();
        assert!(ate(&shifted, &t).unwrap() < 1e-9);
    }

    #[test]
    fn ate_alternating_offset_is_one() {
        // +-1 m on y in a period-4 pattern: zero mean and zero moment
        // against x, so no rigid transform removes any of it and the RMSE
        // equals the offset exactly.
        let truth = line(100);
        let pattern = [1.0, -1.0, -1.0, 1.0];
        let estimate: Vec<(f64, f64)> = truth
            .iter()
            .enumerate()
            .map(|(k, (x, y))| (*x, y + pattern[k % 4]))
            .collect();
        let e = ate(&estimate, &truth).unwrap();
        assert!((e - 1.0).abs() < 1e-9, "ate {e}");

        // strict alternation leaves a tiny alignable component; still ~1
        let estimate: Vec<(f64, f64)> = truth
            .iter()
            .enumerate()
            .map(|(k, (x, y))| (*x, y + if k % 2 == 0 { 1.0 } else { -1.0 }))
            .collect();
        let e = ate(&estimate, &truth).unwrap();
        assert!((e - 1.0).abs() < 2e-3, "ate {e}");
    }

    #[test]
    fn ate_invariant_under_rigid_transform_of_estimate() {
        let truth: Vec<(f64, f64)> = (0..60).map(|k| ((k as f64 * 0.3).cos() * 10.0, k as f64)).collect();
        let estimate: Vec<(f64, f64)> = truth.iter().map(|(x, y)| (x + 0.3 * y.sin(), *y)).collect();
        let base = ate(&estimate, &truth).unwrap();
        let rig = Se2 { theta_rad: 1.1, tx: 100.0, ty: -40.0 };
        let moved: Vec<(f64, f64)> = estimate.iter().map(|p| rig.apply(*p)).collect();
        let after = ate(&moved, &truth).unwrap();
        assert!((after - base).abs() < 1e-9, "{base} vs {after}");
    }

    #[test]
    fn sad_is_offset_sensitive() {
        let truth = line(100);
        let estimate: Vec<(f64, f64)> = truth.iter().map(|(x, y)| (x + 1.0, *y)).collect();
        assert!((sad(&estimate, &truth).unwrap() - 100.0).abs() < 1e-9);
        assert_eq!(sad(&truth, &truth).unwrap(), 0.0);
    }

    #[test]
    fn sad_heading_wraps_circularly() {
        let a = vec![359.0; 10];
        let b = vec![1.0; 10];
        assert!((sad_heading_deg(&a, &b).unwrap() - 20.0).abs() < 1e-9);
    }

    #[test]
    fn segment_ate_partitions_and_isolates() {
        // 3 km straight line, 1 km segments
        let truth: Vec<(f64, f64)> = (0..=300).map(|k| (k as f64 * 10.0, 0.0)).collect();
        let estimate = truth.clone();
        let segs = segment_ate(&estimate, &truth, 1000.0).unwrap();
        assert_eq!(segs.len(), 3);
        assert!(segs.iter().all(|s| *s < 1e-9));

        // error only in the final third stays in the final segment; a
        // quadratic bend is not removable by rigid alignment
        let mut skewed = truth.clone();
        for (k, p) in skewed.iter_mut().enumerate() {
            if k > 200 {
                p.1 += ((k - 200) as f64 * 0.1).powi(2) * 0.01;
            }
        }
        let segs = segment_ate(&skewed, &truth, 1000.0).unwrap();
        assert!(segs[0] < 1e-9 && segs[1] < 1e-9);
        assert!(segs[2] > 0.05, "final segment {}", segs[2]);
    }

    #[test]
    fn segment_longer_than_trajectory_is_single() {
        let truth = line(10);
        let segs = segment_ate(&truth, &truth, 1e9).unwrap();
        assert_eq!(segs.len(), 1);
    }

    #[test]
    fn report_normalizes_by_truth_length() {
        let truth = line(101); // 100 m
        let estimate: Vec<(f64, f64)> = truth
            .iter()
            .enumerate()
            .map(|(k, (x, y))| (*x, y + if k % 2 == 0 { 1.0 } else { -1.0 }))
            .collect();
        let r = MetricReport::compute(&estimate, &truth, 50.0).unwrap();
        assert!((r.distance_m - 100.0).abs() < 1e-9);
        assert!((r.ate_per_meter - r.ate_m / 100.0).abs() < 1e-12);
        assert_eq!(r.segment_ate_m.len(), 2);
    }

    #[test]
    fn length_mismatch_is_an_input_error() {
        let a = line(5);
        let b = line(6);
        assert!(matches!(ate(&a, &b), Err(CoreError::Input(_))));
        assert!(matches!(sad(&a, &b), Err(CoreError::Input(_))));
    }
}
