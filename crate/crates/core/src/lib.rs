//! Deterministic system-level simulator for UAV base stations assisting a
//! terrestrial downlink cellular network.
//!
//! UAVs play a satisfaction-form game: each one moves on a 3D grid,
//! reinforcing its moves with a learning automaton until its utility clears
//! an adaptive threshold. Three static placement schemes serve as
//! benchmarks. The [`engine`] drives an episode; [`experiment`] handles
//! seeds and sweeps; [`output`] writes result files.

pub mod baselines;
pub mod channel;
pub mod config;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod game;
pub mod geometry;
pub mod network;
pub mod output;
pub mod rng;

pub use config::{Algorithm, SimConfig};
pub use engine::{run_episode, Episode, RunResult, RunSummary};
pub use error::SimError;
pub use experiment::{run_replications, sweep, ReplicationSummary, SweepAxis};
pub use geometry::{Position3D, Strategy};
