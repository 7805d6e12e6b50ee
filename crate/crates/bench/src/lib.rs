//! Shared fixtures for the throughput benchmarks.

use stagmix_core::boatrace::{Action, EnvConfig, WorldState, PLAYERS};
use stagmix_core::Color;

pub const ROSTER: [Color; PLAYERS] =
    [Color::Purple, Color::Teal, Color::Purple, Color::Teal, Color::Purple, Color::Teal];

/// A fresh one-race world.
pub fn fresh_world(seed: u64) -> WorldState {
    WorldState::reset(&EnvConfig::with_races(1, seed), &ROSTER).expect("default config is valid")
}

/// A fixed, cheap pseudo-random action schedule: player `i` at step `t`.
pub fn scripted_action(i: usize, t: u64) -> Action {
    let x = (t.wrapping_mul(0x9E37_79B9) ^ (i as u64).wrapping_mul(0x85EB_CA6B)) >> 7;
    Action::ALL[(x % Action::ALL.len() as u64) as usize]
}
