//! Nested-array integrated sensing and communication toolkit.
//!
//! * [`geometry`]: nested / ULA geometries and difference co-arrays
//! * [`beam`]: beam-pattern evaluation and its closed-form metrics
//! * [`channel`]: LoS and one-ring multipath channels
//! * [`comm`]: MRC combining, SINR and achievable rate
//! * [`sensing`]: snapshot simulation and co-array subspace DoA estimation
//! * [`experiments`]: seeded Monte Carlo sweeps and CSV output
//!
//! The closed-form code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the simulation pipeline uses.

pub mod beam;
pub mod channel;
pub mod comm;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod optimize;
pub mod scalar;
pub mod sensing;

pub use error::{Error, Result};
pub use geometry::{ArrayGeometry, CoArray, GeometryKind};
pub use scalar::Real;

pub type C64 = num_complex::Complex<f64>;

pub type Metrics = beam::BeamPatternMetrics<f64>;
pub type Decomposition = beam::PatternDecomposition<f64>;
pub type Nulls = beam::NullPoints<f64>;
pub type Lobe = beam::GratingLobe<f64>;
pub type Channel = channel::ChannelRealization<f64>;
pub type RingParams = channel::OneRingParams<f64>;
pub type Scenario = comm::UplinkScenario<f64>;
