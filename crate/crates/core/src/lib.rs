//! Simulation and analysis of exceptional-configuration attacks on Szegedy quantum spatial
//! search.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] and [`generators`]: simple undirected graphs, edge-list IO and the
//!   Erdős–Rényi, Watts–Strogatz and Barabási–Albert models.
//! * [`stochastic`] and [`walk`]: the Szegedy search walk on ordered vertex pairs.
//! * [`ec`]: certification and enumeration of exceptional configurations.
//! * [`attack`]: expected runtime, attacks on the marked set, efficiency and strong
//!   efficiency, measurement-time optimisation.
//! * [`experiment`]: seeded, parallel experiment drivers producing CSV datasets and
//!   log-log regressions.

pub mod attack;
pub mod ec;
pub mod experiment;
pub mod generators;
pub mod graph;
pub mod sampling;
pub mod stats;
pub mod stochastic;
pub mod walk;

pub use attack::{AttackReport, SearchInstance};
pub use ec::{EcKind, EcOrder, ExceptionalConfiguration};
pub use generators::{GraphModel, ModelParams};
pub use graph::Graph;
pub use stochastic::StochasticMatrix;
pub use walk::{MarkedReflection, WalkOperator, WalkState};
