//! Road network rasterization onto a per-cell speed grid, plus the portable
//! graymap artifact.

use super::osm::RoadNetwork;
use crate::error::{CoreError, Result};
use std::path::Path;

const MAX_CELLS: usize = 100_000_000;

/// Occupancy grid over the simulation region. A cell holds the maximum
/// speed of any road crossing it, in m/s; `0.0` marks blocked (off-road)
/// cells.
#[derive(Debug, Clone)]
pub struct OccupancyGrid {
    pub resolution_m: f64,
    pub width: usize,
    pub height: usize,
    /// Row-major, `cells[iy * width + ix]`.
    pub cells: Vec<f64>,
    /// World coordinate of the (0, 0) cell corner.
    pub origin: (f64, f64),
}

impl OccupancyGrid {
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        iy * self.width + ix
    }

    pub fn is_traversable(&self, ix: usize, iy: usize) -> bool {
        ix < self.width && iy < self.height && self.cells[self.idx(ix, iy)] > 0.0
    }

    pub fn speed(&self, ix: usize, iy: usize) -> f64 {
        self.cells[self.idx(ix, iy)]
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            self.origin.0 + (ix as f64 + 0.5) * self.resolution_m,
            self.origin.1 + (iy as f64 + 0.5) * self.resolution_m,
        )
    }

    pub fn traversable_cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for iy in 0..self.height {
            for ix in 0..self.width {
                if self.cells[self.idx(ix, iy)] > 0.0 {
                    out.push((ix, iy));
                }
            }
        }
        out
    }

    /// Binary PGM raster: blocked cells are black, road cells encode speed
    /// as `55 + round(10 * speed)` so the map and its speed structure are
    /// viewable in any image tool. The sidecar documents the encoding.
    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        let mut data = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        // PGM rows go top-down; the grid's y axis goes up
        for iy in (0..self.height).rev() {
            for ix in 0..self.width {
                let v = self.cells[self.idx(ix, iy)];
                data.push(if v > 0.0 { (55.0 + (v * 10.0).round()).min(255.0) as u8 } else { 0 });
            }
        }
        std::fs::write(path, data)?;
        Ok(())
    }

    pub fn write_sidecar(&self, path: &Path) -> Result<()> {
        let sidecar = serde_json::json!({
            "resolution_m": self.resolution_m,
            "width": self.width,
            "height": self.height,
            "origin": [self.origin.0, self.origin.1],
            "encoding": {
                "blocked": 0,
                "road_gray": "55 + round(10 * speed_mps)",
                "speed_cap_mps": 20.0,
            },
        });
        std::fs::write(path, serde_json::to_string_pretty(&sidecar).unwrap() + "\n")?;
        Ok(())
    }
}

/// Rasterizes every segment with single-cell-thick line stepping; where
/// roads overlap the faster one wins.
pub fn rasterize(net: &RoadNetwork, resolution_m: f64) -> Result<OccupancyGrid> {
    if resolution_m <= 0.0 {
        return Err(CoreError::Config("resolution must be positive".into()));
    }
    let width = (net.width_m / resolution_m).ceil().max(1.0) as usize;
    let height = (net.height_m / resolution_m).ceil().max(1.0) as usize;
    if width.saturating_mul(height) > MAX_CELLS {
        return Err(CoreError::Config(format!(
            "grid of {width}x{height} cells exceeds the {MAX_CELLS} cell limit; coarsen the resolution"
        )));
    }
    let mut grid = OccupancyGrid {
        resolution_m,
        width,
        height,
        cells: vec![0.0; width * height],
        origin: (0.0, 0.0),
    };
    let clamp = |v: i64, hi: usize| v.clamp(0, hi as i64 - 1) as usize;
    for seg in &net.segments {
        for w in seg.points.windows(2) {
            let (x0, y0) = (w[0].0 / resolution_m, w[0].1 / resolution_m);
            let (x1, y1) = (w[1].0 / resolution_m, w[1].1 / resolution_m);
            let (mut cx, mut cy) = (clamp(x0.floor() as i64, width), clamp(y0.floor() as i64, height));
            let (ex, ey) = (clamp(x1.floor() as i64, width), clamp(y1.floor() as i64, height));
            loop {
                let idx = grid.idx(cx, cy);
                grid.cells[idx] = grid.cells[idx].max(seg.speed_mps);
                if cx == ex && cy == ey {
                    break;
                }
                // step one cell toward the endpoint, axis with the larger gap first
                let dx = ex as i64 - cx as i64;
                let dy = ey as i64 - cy as i64;
                if dx.abs() >= dy.abs() {
                    cx = (cx as i64 + dx.signum()) as usize;
                } else {
                    cy = (cy as i64 + dy.signum()) as usize;
                }
            }
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::osm::RoadSegment;

    fn net(segments: Vec<RoadSegment>, w: f64, h: f64) -> RoadNetwork {
        RoadNetwork { segments, width_m: w, height_m: h }
    }

    #[test]
    fn horizontal_segment_fills_one_row() {
        let n = net(
            vec![RoadSegment {
                points: vec![(0.0, 55.0), (100.0, 55.0)],
                speed_mps: 10.0,
                class: "residential".into(),
            }],
            200.0,
            200.0,
        );
        let grid = rasterize(&n, 10.0).unwrap();
        let cells = grid.traversable_cells();
        assert!(cells.len() == 10 || cells.len() == 11, "{} cells", cells.len());
        assert!(cells.iter().all(|(_, iy)| *iy == 5));
    }

    #[test]
    fn empty_network_is_all_blocked() {
        let n = net(Vec::new(), 100.0, 100.0);
        let grid = rasterize(&n, 10.0).unwrap();
        assert!(grid.traversable_cells().is_empty());
    }

    #[test]
    fn crossing_segments_keep_max_speed() {
        let n = net(
            vec![
                RoadSegment { points: vec![(0.0, 50.0), (100.0, 50.0)], speed_mps: 5.0, class: "service".into() },
                RoadSegment { points: vec![(50.0, 0.0), (50.0, 100.0)], speed_mps: 15.0, class: "primary".into() },
            ],
            100.0,
            100.0,
        );
        let grid = rasterize(&n, 10.0).unwrap();
        assert_eq!(grid.speed(5, 5), 15.0);
    }

    #[test]
    fn oversize_grid_is_rejected() {
        let n = net(
            vec![RoadSegment { points: vec![(0.0, 0.0), (1.0, 1.0)], speed_mps: 5.0, class: "service".into() }],
            2.0e6,
            2.0e6,
        );
        assert!(rasterize(&n, 0.1).is_err());
    }

    #[test]
    fn diagonal_segment_is_connected_path() {
        let n = net(
            vec![RoadSegment { points: vec![(5.0, 5.0), (95.0, 95.0)], speed_mps: 8.0, class: "residential".into() }],
            100.0,
            100.0,
        );
        let grid = rasterize(&n, 10.0).unwrap();
        let cells = grid.traversable_cells();
        // 8-connected chain from (0,0) to (9,9)
        assert!(cells.windows(2).all(|w| {
            let dx = (w[1].0 as i64 - w[0].0 as i64).abs();
            let dy = (w[1].1 as i64 - w[0].1 as i64).abs();
            dx <= 1 && dy <= 1 || dx + dy <= 2
        }));
        assert!(cells.contains(&(0, 0)) && cells.contains(&(9, 9)));
    }

    #[test]
    fn pgm_artifact_has_header_and_payload() {
        let n = net(
            vec![RoadSegment { points: vec![(0.0, 5.0), (30.0, 5.0)], speed_mps: 10.0, class: "residential".into() }],
            30.0,
            10.0,
        );
        let grid = rasterize(&n, 10.0).unwrap();
        let dir = std::env::temp_dir().join("mcan-raster-test");
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("map.pgm");
        grid.write_pgm(&p).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        assert!(bytes.starts_with(b"P5\n3 1\n255\n"));
        assert_eq!(bytes.len(), "P5\n3 1\n255\n".len() + 3);
        assert_eq!(bytes[bytes.len() - 3], 155); // 55 + 10*10
        std::fs::remove_dir_all(&dir).ok();
    }
}
