//! Two-time-scale distributed subgradient dynamics over time-varying graphs.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod network;
pub mod noise;
pub mod objectives;
pub mod presets;
pub mod schedules;
pub mod verification;

pub use dynamics::{run, step, SimulationConfig, Trajectory};
pub use error::{Error, Result};
pub use linalg::{StateMatrix, StochasticVector};
pub use network::{GraphSequence, WeightMatrix};
pub use noise::NoiseModel;
pub use objectives::ObjectiveSet;
pub use schedules::PowerLawSchedule;
