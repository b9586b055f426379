//! Route planning on the occupancy grid: a wavefront distance transform
//! seeded at the goal, followed by steepest descent from the start.

use super::raster::OccupancyGrid;
use crate::error::{CoreError, Result};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// 8-connected neighbourhood with step costs (1 straight, sqrt(2) diagonal).
const NEIGHBOURS: [(i64, i64, f64); 8] = [
    (1, 0, 1.0),
    (-1, 0, 1.0),
    (0, 1, 1.0),
    (0, -1, 1.0),
    (1, 1, SQRT2),
    (1, -1, SQRT2),
    (-1, 1, SQRT2),
    (-1, -1, SQRT2),
];

#[derive(PartialEq)]
struct QueueEntry(f64, usize);

impl Eq for QueueEntry {}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Wavefront distances (in cells) from `goal` over traversable cells;
/// blocked or unreachable cells hold infinity.
pub fn distance_transform(grid: &OccupancyGrid, goal: (usize, usize)) -> Result<Vec<f64>> {
    if !grid.is_traversable(goal.0, goal.1) {
        return Err(CoreError::Input(format!("goal cell ({}, {}) is blocked", goal.0, goal.1)));
    }
    let mut dist = vec![f64::INFINITY; grid.cells.len()];
    let mut heap = BinaryHeap::new();
    let goal_idx = grid.idx(goal.0, goal.1);
    dist[goal_idx] = 0.0;
    heap.push(Reverse(QueueEntry(0.0, goal_idx)));
    while let Some(Reverse(QueueEntry(d, idx))) = heap.pop() {
        if d > dist[idx] {
            continue;
        }
        let (ix, iy) = (idx % grid.width, idx / grid.width);
        for (dx, dy, cost) in NEIGHBOURS {
            let (nx, ny) = (ix as i64 + dx, iy as i64 + dy);
            if nx < 0 || ny < 0 {
                continue;
            }
            let (nx, ny) = (nx as usize, ny as usize);
            if !grid.is_traversable(nx, ny) {
                continue;
            }
            let nidx = grid.idx(nx, ny);
            let nd = d + cost;
            if nd < dist[nidx] {
                dist[nidx] = nd;
                heap.push(Reverse(QueueEntry(nd, nidx)));
            }
        }
    }
    Ok(dist)
}

/// Optimal cell path from `start` to `goal`: steepest descent over the
/// goal-seeded transform, following a true minimizer of
/// `dist[n] + cost(cell, n)` at every cell.
pub fn plan_route(
    grid: &OccupancyGrid,
    start: (usize, usize),
    goal: (usize, usize),
) -> Result<Vec<(usize, usize)>> {
    if !grid.is_traversable(start.0, start.1) {
        return Err(CoreError::Input(format!("start cell ({}, {}) is blocked", start.0, start.1)));
    }
    let dist = distance_transform(grid, goal)?;
    if !dist[grid.idx(start.0, start.1)].is_finite() {
        return Err(CoreError::Unreachable(format!(
            "no route from ({}, {}) to ({}, {})",
            start.0, start.1, goal.0, goal.1
        )));
    }
    let mut path = vec![start];
    let mut current = start;
    let budget = grid.cells.len() + 1;
    while current != goal {
        let (cx, cy) = current;
        let mut best: Option<((usize, usize), f64)> = None;
        for (dx, dy, cost) in NEIGHBOURS {
            let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
            if nx < 0 || ny < 0 {
                continue;
            }
            let (nx, ny) = (nx as usize, ny as usize);
            if !grid.is_traversable(nx, ny) {
                continue;
            }
            let through = dist[grid.idx(nx, ny)] + cost;
            if best.is_none() || through < best.unwrap().1 {
                best = Some(((nx, ny), through));
            }
        }
        let Some((next, _)) = best else {
            return Err(CoreError::Unreachable("descent hit an isolated cell".into()));
        };
        path.push(next);
        current = next;
        if path.len() > budget {
            return Err(CoreError::Unreachable("descent failed to converge".into()));
        }
    }
    Ok(path)
}

/// Exact path cost `straight + sqrt(2)*diagonal` for comparisons: two
/// optimal 8-connected paths always share the same (straight, diagonal)
/// step counts, so equal costs compare exactly in f64.
pub fn path_cost_value(path: &[(usize, usize)]) -> f64 {
    let (mut straight, mut diagonal) = (0u64, 0u64);
    for w in path.windows(2) {
        let dx = (w[1].0 as i64 - w[0].0 as i64).abs();
        let dy = (w[1].1 as i64 - w[0].1 as i64).abs();
        if dx + dy == 1 {
            straight += 1;
        } else {
            diagonal += 1;
        }
    }
    straight as f64 + SQRT2 * diagonal as f64
}

/// Uniformly random distinct, mutually reachable road cells.
pub fn sample_endpoints(
    grid: &OccupancyGrid,
    rng: &mut ChaCha8Rng,
) -> Result<((usize, usize), (usize, usize))> {
    let cells = grid.traversable_cells();
    if cells.len() < 2 {
        return Err(CoreError::Input("need at least two road cells".into()));
    }
    for _ in 0..100 {
        let a = cells[rng.random_range(0..cells.len())];
        let b = cells[rng.random_range(0..cells.len())];
        if a == b {
            continue;
        }
        let dist = distance_transform(grid, b)?;
        if dist[grid.idx(a.0, a.1)].is_finite() {
            return Ok((a, b));
        }
    }
    Err(CoreError::Unreachable("no connected endpoint pair found after 100 draws".into()))
}
