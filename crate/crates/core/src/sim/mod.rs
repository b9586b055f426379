//! City-scale navigation simulator: real road networks in, velocity
//! datasets with ground truth out.
//!
//! Pipeline: parse an OSM extract into projected road polylines, rasterize
//! them onto an occupancy grid carrying per-cell speeds, plan routes between
//! random road cells with a goal-seeded distance transform, then drive the
//! routes with a pure-pursuit bicycle model while recording velocities and
//! poses.

pub mod drive;
pub mod osm;
pub mod plan;
pub mod raster;

pub use drive::{traverse, BicycleConfig, BicycleState, TraverseOutcome};
pub use osm::{parse_osm_file, parse_osm_str, RoadNetwork, RoadSegment};
pub use plan::{distance_transform, plan_route, sample_endpoints, path_cost_value};
pub use raster::{rasterize, OccupancyGrid};
