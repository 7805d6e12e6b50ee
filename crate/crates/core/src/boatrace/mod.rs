//! The boat-race grid world.
//!
//! Six players pair up in three two-seat boats and row back and forth across
//! a river for apples. An episode is `races` races of
//! `partner_choice + semaphore + rowing` steps each (65 + 5 + 230 by
//! default), alternating between rowing north and rowing south.
//!
//! Rowing mechanics: a paddle starts a cooldown of `paddle_cooldown` steps
//! during which further paddles by the same player are no-ops, and leaves the
//! paddle pending. A paddle by the partner while it is pending, or both
//! players paddling in the same step, agrees a stroke; the boat then moves
//! one cell on the last step of the first paddler's cooldown window, so two
//! players paddling at the maximal rate move one cell every
//! `paddle_cooldown + 1` steps. A flail by the partner while a paddle is
//! pending (in the same step or later) costs the paddler `mismatch_penalty`
//! and wastes the paddle. Each flail also moves the boat with probability
//! `flail_move_prob`; a boat moves at most one cell per step. A single
//! seated player cannot row.

mod config;
mod episode;
mod map;
mod observe;
mod state;

pub use config::{EnvConfig, FlailRule};
pub use episode::{
    run_episode, Controller, EpisodeLog, EventRecord, Idle, LogHeader, RosterEntry, Scripted, StepRecord, LOG_SCHEMA,
    LOG_VERSION,
};
pub use map::{
    Direction, GridMap, Pos, SeatLane, Side, Terrain, BOATS, DEFAULT_MAP, DEFAULT_MAP_VERSION, PLAYERS, SEATS_PER_BOAT,
};
pub use observe::{
    avatar_rgb, observe, render_rgb, render_window, window_cell, AvatarView, CellTerrain, CellView, Image, Window,
    AHEAD, BEHIND, IMAGE, PURPLE_RGB, SIDE, SPRITE, TEAL_RGB, WINDOW,
};
pub use state::{
    race_direction, Action, Badge, Boat, Event, Phase, PhaseKind, PlayerId, PlayerState, Rowing, SeatRef,
    SemaphoreColor, StepOutcome, WorldState,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("roster must have {PLAYERS} players, got {0}")]
    BadRoster(usize),
    #[error("invalid map: {0}")]
    BadMap(String),
    #[error("invalid environment config: {0}")]
    BadConfig(String),
    #[error("expected one action per player, got {0}")]
    BadActions(usize),
    #[error("player {player} is disqualified but acted at step {t}")]
    InvalidAction { player: PlayerId, t: u64 },
    #[error("no player with id {0}")]
    UnknownPlayer(PlayerId),
    #[error("episode is over")]
    EpisodeOver,
}
