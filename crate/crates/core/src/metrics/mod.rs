//! Association matrices, the discrimination index, training communities,
//! focal evaluation and Schelling diagrams.

mod association;
mod community;
mod evaluation;
mod schelling;

pub use association::{accumulate_associations, discrimination_index, participation, AssociationMatrix, RaceFilter};
pub use community::{build_community, community_bias, sample_coplayers, COMMUNITY_SIZE};
pub use evaluation::{
    aggregate, evaluate_focal, focal_episode_log, penalties_per_race, seat_counts, summarize_focal, FocalEpisode, FOCAL,
};
pub use schelling::{
    curve_crossings, roster_entries, schelling_diagram, schelling_episode, schelling_roster, SchellingPoint,
};

use crate::boatrace::EnvError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("{0}")]
    OutOfRange(String),
    #[error("at least one episode is required")]
    ZeroEpisodes,
    #[error(transparent)]
    Env(#[from] EnvError),
}
