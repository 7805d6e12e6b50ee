//! Statistical discrimination under partner choice in an iterated Stag Hunt.
//!
//! * [`game`]: the 2×2 game, strategies and interaction records.
//! * [`analytic`]: closed-form policy payoffs and dominance predicates.
//! * [`abstract_sim`]: agent-based Monte Carlo of the abstract game, used as
//!   the oracle for [`analytic`] and to sample discrimination indices.
//! * [`boatrace`]: the boat-race grid world.
//! * [`agents`]: scripted controllers for the boat race.
//! * [`metrics`]: association matrices, discrimination index, communities
//!   and Schelling diagrams.
//! * [`harness`]: experiment configs and the drivers behind the CLI.

pub mod abstract_sim;
pub mod agents;
pub mod analytic;
pub mod boatrace;
pub mod game;
pub mod harness;
pub mod metrics;
pub mod rng;
pub mod stats;

pub use analytic::{AnalyticParams, AnalyticPolicy};
pub use game::{BehaviorAction, Color, IndividualId, InteractionRecord, PayoffMatrix, Strategy};
