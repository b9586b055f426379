//! Velocity/ground-truth datasets and their CSV representation.
//!
//! Input schema: optional `# key=value` comment lines, then the header
//! `t,v,omega,gt_x,gt_y,gt_theta` (seconds, m/s, rad/s, meters, meters,
//! radians). Estimate schema: `t,x,y,theta` with theta in degrees.
//! Floats are written in shortest round-trip form, so write-read-write is
//! byte-identical.

use crate::error::{CoreError, Result};
use crate::multiscale::PoseEstimate;
use std::path::Path;

/// Timestamped velocity samples paired with ground-truth poses.
///
/// Sample `k` holds the velocity applied over `[t_k, t_{k+1})`; the pose at
/// index `k` is the state at `t_k` before that velocity acts. Re-integrating
/// the samples therefore reproduces the pose sequence exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryDataset {
    /// `(t, v, omega)` in seconds, m/s, rad/s.
    pub samples: Vec<(f64, f64, f64)>,
    /// `(t, x, y, theta)` in seconds, meters, radians.
    pub ground_truth: Vec<(f64, f64, f64, f64)>,
    pub source: String,
}

impl TrajectoryDataset {
    pub fn new(
        samples: Vec<(f64, f64, f64)>,
        ground_truth: Vec<(f64, f64, f64, f64)>,
        source: impl Into<String>,
    ) -> Result<Self> {
        if samples.len() != ground_truth.len() {
            return Err(CoreError::Input(format!(
                "sample/ground-truth length mismatch: {} vs {}",
                samples.len(),
                ground_truth.len()
            )));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(CoreError::Input("timestamps must be strictly increasing".into()));
        }
        Ok(Self { samples, ground_truth, source: source.into() })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sampling interval, from the first timestamp gap.
    pub fn dt(&self) -> f64 {
        if self.samples.len() >= 2 {
            self.samples[1].0 - self.samples[0].0
        } else {
            1.0
        }
    }

    /// Ground-truth path length in meters.
    pub fn total_distance_m(&self) -> f64 {
        self.ground_truth
            .windows(2)
            .map(|w| (w[1].1 - w[0].1).hypot(w[1].2 - w[0].2))
            .sum()
    }

    pub fn gt_points(&self) -> Vec<(f64, f64)> {
        self.ground_truth.iter().map(|(_, x, y, _)| (*x, *y)).collect()
    }

    pub fn initial_pose(&self) -> Option<PoseEstimate> {
        self.ground_truth.first().map(|(t, x, y, theta)| PoseEstimate {
            t: *t,
            x: *x,
            y: *y,
            theta_deg: theta.to_degrees().rem_euclid(360.0),
        })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str(&format!("# source={}\n", self.source));
        out.push_str(&format!("# total_distance_m={}\n", self.total_distance_m()));
        out.push_str("t,v,omega,gt_x,gt_y,gt_theta\n");
        for ((t, v, omega), (_, x, y, theta)) in self.samples.iter().zip(&self.ground_truth) {
            out.push_str(&format!("{t},{v},{omega},{x},{y},{theta}\n"));
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let context = path.display().to_string();
        let mut source = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into());
        let mut samples = Vec::new();
        let mut ground_truth = Vec::new();
        let mut header_seen = false;
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(v) = comment.trim().strip_prefix("source=") {
                    source = v.to_string();
                }
                continue;
            }
            if !header_seen {
                expect_header(line, &["t", "v", "omega", "gt_x", "gt_y", "gt_theta"], &context, lineno)?;
                header_seen = true;
                continue;
            }
            let f = parse_row(line, 6, &context, lineno)?;
            samples.push((f[0], f[1], f[2]));
            ground_truth.push((f[0], f[3], f[4], f[5]));
        }
        if !header_seen {
            return Err(CoreError::parse(context, Some(1), "missing header row"));
        }
        Self::new(samples, ground_truth, source)
    }
}

fn expect_header(line: &str, columns: &[&str], context: &str, lineno: usize) -> Result<()> {
    let got: Vec<&str> = line.split(',').map(str::trim).collect();
    for (i, want) in columns.iter().enumerate() {
        match got.get(i) {
            Some(g) if g == want => {}
            Some(g) => {
                return Err(CoreError::parse(
                    context,
                    Some(lineno),
                    format!("expected column '{want}' at position {}, found '{g}'", i + 1),
                ))
            }
            None => {
                return Err(CoreError::parse(
                    context,
                    Some(lineno),
                    format!("missing column '{want}'"),
                ))
            }
        }
    }
    Ok(())
}

fn parse_row(line: &str, want: usize, context: &str, lineno: usize) -> Result<Vec<f64>> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != want {
        return Err(CoreError::parse(
            context,
            Some(lineno),
            format!("expected {want} fields, found {}", fields.len()),
        ));
    }
    fields
        .iter()
        .enumerate()
        .map(|(i, f)| {
            f.parse::<f64>().map_err(|_| {
                CoreError::parse(
                    context,
                    Some(lineno),
                    format!("field {} is not a number: '{f}'", i + 1),
                )
            })
        })
        .collect()
}

/// Writes tracker estimates (`t,x,y,theta`, theta in degrees).
pub fn write_estimates_csv(estimates: &[PoseEstimate], path: &Path) -> Result<()> {
    let mut out = String::from("t,x,y,theta\n");
    for e in estimates {
        out.push_str(&format!("{},{},{},{}\n", e.t, e.x, e.y, e.theta_deg));
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_estimates_csv(path: &Path) -> Result<Vec<PoseEstimate>> {
    let text = std::fs::read_to_string(path)?;
    let context = path.display().to_string();
    let mut estimates = Vec::new();
    let mut header_seen = false;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            expect_header(line, &["t", "x", "y", "theta"], &context, lineno)?;
            header_seen = true;
            continue;
        }
        let f = parse_row(line, 4, &context, lineno)?;
        estimates.push(PoseEstimate { t: f[0], x: f[1], y: f[2], theta_deg: f[3] });
    }
    if !header_seen {
        return Err(CoreError::parse(context, Some(1), "missing header row"));
    }
    Ok(estimates)
}

/// Integrates a sample stream with the heading-first Euler scheme used by
/// the simulator and the tracker: per gap, `theta += omega*dt` first, then
/// the position advances along the new heading.
pub fn reintegrate(
    samples: &[(f64, f64, f64)],
    initial: (f64, f64, f64),
) -> Vec<(f64, f64, f64, f64)> {
    let mut poses = Vec::with_capacity(samples.len());
    if samples.is_empty() {
        return poses;
    }
    let (mut x, mut y, mut theta) = initial;
    poses.push((samples[0].0, x, y, theta));
    for k in 1..samples.len() {
        let (t_prev, v, omega) = samples[k - 1];
        let t = samples[k].0;
        let dt = t - t_prev;
        theta += omega * dt;
        x += v * dt * theta.cos();
        y += v * dt * theta.sin();
        poses.push((t, x, y, theta));
    }
    poses
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_dataset() -> TrajectoryDataset {
        let samples: Vec<(f64, f64, f64)> =
            (0..20).map(|k| (k as f64 * 0.5, 2.0 + 0.1 * k as f64, 0.01 * k as f64)).collect();
        let ground_truth = reintegrate(&samples, (3.0, -2.0, 0.4));
        TrajectoryDataset::new(samples, ground_truth, "unit").unwrap()
    }

    #[test]
    fn csv_round_trip_is_byte_identical() {
        let dir = std::env::temp_dir().join("mcan-dataset-test");
        std::fs::create_dir_all(&dir).unwrap();
        let p1 = dir.join("a.csv");
        let p2 = dir.join("b.csv");
        let ds = sample_dataset();
        ds.write_csv(&p1).unwrap();
        let loaded = TrajectoryDataset::read_csv(&p1).unwrap();
        assert_eq!(ds, loaded);
        loaded.write_csv(&p2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn missing_column_is_named() {
        let dir = std::env::temp_dir().join("mcan-dataset-test2");
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("bad.csv");
        std::fs::write(&p, "t,v,omega,gt_x,gt_y\n").unwrap();
        let err = TrajectoryDataset::read_csv(&p).unwrap_err();
        assert!(err.to_string().contains("gt_theta"), "{err}");
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn empty_file_with_header_is_empty_dataset() {
        let dir = std::env::temp_dir().join("mcan-dataset-test3");
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("empty.csv");
        std::fs::write(&p, "t,v,omega,gt_x,gt_y,gt_theta\n").unwrap();
        let ds = TrajectoryDataset::read_csv(&p).unwrap();
        assert!(ds.is_empty());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn bad_number_reports_row() {
        let dir = std::env::temp_dir().join("mcan-dataset-test4");
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("bad.csv");
        std::fs::write(&p, "t,v,omega,gt_x,gt_y,gt_theta\n0,1,0,0,0,0\n1,x,0,0,0,0\n").unwrap();
        let err = TrajectoryDataset::read_csv(&p).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn reintegration_reproduces_generated_truth() {
        let ds = sample_dataset();
        let replay = reintegrate(&ds.samples, (3.0, -2.0, 0.4));
        for (a, b) in replay.iter().zip(&ds.ground_truth) {
            assert!((a.1 - b.1).abs() < 1e-12 && (a.2 - b.2).abs() < 1e-12);
        }
    }

    #[test]
    fn estimates_round_trip() {
        let dir = std::env::temp_dir().join("mcan-dataset-test5");
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("est.csv");
        let estimates = vec![
            PoseEstimate { t: 0.0, x: 1.5, y: -0.25, theta_deg: 90.0 },
            PoseEstimate { t: 1.0, x: 2.5, y: 0.125, theta_deg: 359.7 },
        ];
        write_estimates_csv(&estimates, &p).unwrap();
        let loaded = read_estimates_csv(&p).unwrap();
        assert_eq!(estimates, loaded);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn non_monotonic_time_rejected() {
        let samples = vec![(0.0, 1.0, 0.0), (0.0, 1.0, 0.0)];
        let gt = vec![(0.0, 0.0, 0.0, 0.0), (0.0, 1.0, 0.0, 0.0)];
        assert!(TrajectoryDataset::new(samples, gt, "x").is_err());
    }
}
