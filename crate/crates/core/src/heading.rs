//! Head-direction network: a ring attractor integrating angular velocity
//! into a heading estimate in degrees.

use crate::attractor::{ActivityRing, NetworkParams, ShiftCommand, StepReport};
use crate::error::{CoreError, Result};

/// Ring size used throughout: one neuron per degree.
pub const HD_RING_SIZE: usize = 360;

/// Ring attractor whose bump angle encodes the agent heading.
#[derive(Debug, Clone)]
pub struct HeadDirection {
    ring: ActivityRing,
    params: NetworkParams,
    heading_deg: f64,
    faults: u64,
}

impl HeadDirection {
    /// Initializes the bump at `initial_heading` degrees (wrapped into
    /// `[0, 360)`) on a ring of [`HD_RING_SIZE`] neurons.
    pub fn new(initial_heading_deg: f64, params: NetworkParams) -> Result<Self> {
        Self::with_ring_size(HD_RING_SIZE, initial_heading_deg, params)
    }

    pub fn with_ring_size(n: usize, initial_heading_deg: f64, params: NetworkParams) -> Result<Self> {
        if !initial_heading_deg.is_finite() {
            return Err(CoreError::Input("initial heading must be finite".into()));
        }
        let heading = initial_heading_deg.rem_euclid(360.0);
        let center = (heading * n as f64 / 360.0).round() as usize % n;
        let ring = ActivityRing::init_gaussian(n, center, &params)?;
        let heading_deg = Self::decode_ring(&ring)?;
        Ok(Self { ring, params, heading_deg, faults: 0 })
    }

    /// Advances the ring by `omega * dt`, converted to neurons
    /// (`alpha = omega*dt*(n/2pi)`), and re-decodes the heading.
    ///
    /// A shift beyond half the ring cannot be represented and signals that
    /// the sampling interval is too coarse.
    pub fn step(&mut self, omega_rad_s: f64, dt: f64) -> Result<StepReport> {
        let n = self.ring.n() as f64;
        let alpha = omega_rad_s * dt * n / std::f64::consts::TAU;
        if !alpha.is_finite() || alpha.abs() > n / 2.0 {
            return Err(CoreError::OutOfRange(format!(
                "angular shift of {alpha:.2} neurons exceeds half the ring ({n}); reduce dt"
            )));
        }
        let report = self.ring.step(&ShiftCommand::from_real_1d(alpha), &self.params)?;
        if report.collapsed {
            self.faults += 1;
        }
        self.heading_deg = Self::decode_ring(&self.ring)?;
        Ok(report)
    }

    /// Circular-mean heading in degrees, `[0, 360)`.
    pub fn decode(&self) -> Result<f64> {
        Self::decode_ring(&self.ring)
    }

    fn decode_ring(ring: &ActivityRing) -> Result<f64> {
        let idx = ring.decode()?;
        let deg = idx * 360.0 / ring.n() as f64;
        Ok(if deg >= 360.0 { 0.0 } else { deg })
    }

    /// Last decoded heading in degrees.
    pub fn heading_deg(&self) -> f64 {
        self.heading_deg
    }

    pub fn ring(&self) -> &ActivityRing {
        &self.ring
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    /// Number of collapse/reinitialization events since construction.
    pub fn faults(&self) -> u64 {
        self.faults
    }
}
