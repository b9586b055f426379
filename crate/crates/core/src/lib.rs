//! Dead reckoning with multiscale continuous attractor networks.
//!
//! The crate integrates linear and angular velocity through a stack of 2D
//! toroidal attractor networks at geometrically spaced spatial resolutions
//! plus a 1D head-direction ring, tunes the shared dynamics parameters with
//! a genetic algorithm, and ships a city-scale trajectory simulator and
//! evaluation tooling (ATE, SAD, SE(2) alignment) for benchmarking.

pub mod attractor;
pub mod error;
pub mod eval;
pub mod heading;
pub mod multiscale;
pub mod seed;
pub mod sim;
pub mod tuned;
pub mod tuning;

pub use attractor::{ActivityGrid, ActivityRing, Axis, NetworkParams, ShiftCommand, StepReport};
pub use error::{CoreError, Result};
pub use heading::HeadDirection;
pub use multiscale::{PoseEstimate, ScaleStack, StackConfig, Tracker};
pub use tuning::{GaConfig, Genome, TrialSpec};
