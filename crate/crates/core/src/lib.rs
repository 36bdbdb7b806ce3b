//! Agent-based model of cooperation through group formation under time
//! pressure.
//!
//! Each term a handful of initiators recruit friends into groups, the groups
//! harvest fields and share the yield, and co-members may become friends.
//! Agents differ in how they pick partners: similar-preferring agents favour
//! partners strong where they are strong, complement-preferring agents favour
//! partners strong where they are weak. [`sweep`] compares the two classes
//! over a grid of preference spread (alpha) and complement share (beta).

pub mod cli;
pub mod config;
pub mod economy;
pub mod engine;
pub mod error;
pub mod formation;
pub mod friendship;
pub mod model;
pub mod network;
pub mod output;
pub mod stats;
pub mod sweep;

pub use config::SimConfig;
pub use engine::{run_simulation, RunReport, Simulation, TermReport, Winner};
pub use error::{Error, Result};
pub use model::{Agent, AgentId, BehaviorVector, Population, PreferenceVector, StrategyClass};
pub use sweep::{run_sweep, SweepCell, SweepReport, SweepSpec};
