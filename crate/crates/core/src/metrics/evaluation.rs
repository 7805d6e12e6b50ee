//! Evaluation of a focal scripted controller against sampled co-players.

use super::association::{accumulate_associations, AssociationMatrix, RaceFilter};
use super::community::sample_coplayers;
use super::schelling::roster_entries;
use super::MetricsError;
use crate::agents::{make_controllers, AwareFidelity, BotSpec};
use crate::boatrace::{run_episode, EnvConfig, EpisodeLog, Event, PlayerId, BOATS, PLAYERS, SEATS_PER_BOAT};
use crate::rng::derive_seed;
use rayon::prelude::*;
use serde::Serialize;

pub const FOCAL: PlayerId = 0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FocalEpisode {
    pub episode: u32,
    pub first: AssociationMatrix,
    pub last: AssociationMatrix,
    pub all: AssociationMatrix,
    /// Mismatch penalties the focal received, per race.
    pub penalties_per_race: Vec<u32>,
    pub reward: f64,
    pub disqualified: bool,
}

impl FocalEpisode {
    pub fn association(&self, filter: RaceFilter) -> AssociationMatrix {
        match filter {
            RaceFilter::First => self.first,
            RaceFilter::Last => self.last,
            RaceFilter::All => self.all,
        }
    }

    pub fn penalties_from_race(&self, race: usize) -> u32 {
        self.penalties_per_race.iter().skip(race).sum()
    }
}

/// Mismatch penalties received by `player`, per race.
pub fn penalties_per_race(log: &EpisodeLog, player: PlayerId) -> Vec<u32> {
    let len = log.header.config.race_length() as u64;
    let mut out = vec![0; log.header.config.races as usize];
    for (t, e) in log.events() {
        if matches!(e, Event::PenaltyApplied { player: p, .. } if *p == player) {
            out[(t / len) as usize] += 1;
        }
    }
    out
}

/// Boarding counts per (boat, seat), flattened boat-major, for one player or
/// for everyone.
pub fn seat_counts(log: &EpisodeLog, player: Option<PlayerId>) -> [u64; BOATS * SEATS_PER_BOAT] {
    let mut out = [0; BOATS * SEATS_PER_BOAT];
    for (_, e) in log.events() {
        if let Event::Boarded { player: p, boat, seat, .. } = *e {
            if player.is_none_or(|q| q == p) {
                out[boat * SEATS_PER_BOAT + seat] += 1;
            }
        }
    }
    out
}

/// Runs one evaluation episode: the focal as player 0 and five co-players
/// sampled without replacement from `community`.
pub fn focal_episode_log(
    focal: BotSpec,
    community: &[BotSpec],
    env: &EnvConfig,
    fidelity: AwareFidelity,
    seed: u64,
) -> Result<EpisodeLog, MetricsError> {
    let mut specs = vec![focal];
    specs.extend(sample_coplayers(community, PLAYERS - 1, derive_seed(seed, 0))?);
    let config = EnvConfig { seed: derive_seed(seed, 1), ..env.clone() };
    let mut controllers = make_controllers(&specs, fidelity, derive_seed(seed, 2));
    Ok(run_episode(&config, &roster_entries(&specs), &mut controllers)?)
}

pub fn summarize_focal(log: &EpisodeLog, episode: u32) -> Result<FocalEpisode, MetricsError> {
    Ok(FocalEpisode {
        episode,
        first: accumulate_associations(log, FOCAL, RaceFilter::First)?,
        last: accumulate_associations(log, FOCAL, RaceFilter::Last)?,
        all: accumulate_associations(log, FOCAL, RaceFilter::All)?,
        penalties_per_race: penalties_per_race(log, FOCAL),
        reward: log.final_rewards[FOCAL],
        disqualified: log.disqualified[FOCAL],
    })
}

/// `episodes` evaluation episodes; episode `e` uses `derive_seed(seed, e)`.
pub fn evaluate_focal(
    focal: BotSpec,
    community: &[BotSpec],
    env: &EnvConfig,
    fidelity: AwareFidelity,
    episodes: u32,
    seed: u64,
) -> Result<Vec<FocalEpisode>, MetricsError> {
    if episodes == 0 {
        return Err(MetricsError::ZeroEpisodes);
    }
    env.validate()?;
    (0..episodes)
        .into_par_iter()
        .map(|e| {
            let log = focal_episode_log(focal, community, env, fidelity, derive_seed(seed, e as u64))?;
            summarize_focal(&log, e)
        })
        .collect()
}

/// Sum of the per-episode matrices under a race filter.
pub fn aggregate(episodes: &[FocalEpisode], filter: RaceFilter) -> AssociationMatrix {
    episodes.iter().map(|e| e.association(filter)).sum()
}
