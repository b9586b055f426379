//! Trajectory evaluation: SE(2) alignment, ATE/SAD metrics, dataset
//! ingestion and plot emission.

pub mod dataset;
pub mod kitti;
pub mod metrics;
pub mod svg;

pub use dataset::{reintegrate, TrajectoryDataset};
pub use metrics::{align_se2, ate, sad, sad_heading_deg, segment_ate, MetricReport, Se2};
pub use svg::{emit_plot, render_svg, PlotSeries};
