//! Driving an episode to completion and recording it.

use super::config::EnvConfig;
use super::map::PLAYERS;
use super::state::{Action, Badge, Event, PlayerId, StepOutcome, WorldState};
use super::EnvError;
use crate::game::{Color, Strategy};
use serde::{Deserialize, Serialize};
use std::io::{self, Write};

pub const LOG_SCHEMA: &str = "stagmix.episode";
pub const LOG_VERSION: u32 = 1;

/// Decides one player's action each step.
///
/// Controllers receive the full world state; scripted controllers restrict
/// themselves to the information their policy is entitled to.
pub trait Controller {
    fn begin_episode(&mut self, _state: &WorldState, _me: PlayerId) {}

    fn act(&mut self, state: &WorldState, me: PlayerId) -> Action;

    /// Called after every step with the resulting state.
    fn after_step(&mut self, _state: &WorldState, _me: PlayerId, _outcome: &StepOutcome) {}
}

/// Controller that never does anything.
#[derive(Debug, Clone, Copy, Default)]
pub struct Idle;

impl Controller for Idle {
    fn act(&mut self, _: &WorldState, _: PlayerId) -> Action {
        Action::Noop
    }
}

/// Replays a fixed action sequence per step, then idles.
#[derive(Debug, Clone, Default)]
pub struct Scripted(pub Vec<Action>);

impl Controller for Scripted {
    fn act(&mut self, state: &WorldState, _: PlayerId) -> Action {
        self.0.get(state.t as usize).copied().unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RosterEntry {
    pub color: Color,
    /// Free-form controller description, e.g. `paddler/random-boat`.
    pub controller: String,
    /// Ground-truth rowing strategy, when the controller has one.
    pub strategy: Option<Strategy>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHeader {
    pub schema: String,
    pub version: u32,
    pub seed: u64,
    pub config: EnvConfig,
    pub roster: Vec<RosterEntry>,
    pub badges: Vec<Badge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: u64,
    pub actions: [Action; PLAYERS],
    pub rewards: [f64; PLAYERS],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub t: u64,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub header: LogHeader,
    pub steps: Vec<StepRecord>,
    pub events: Vec<EventRecord>,
    pub final_rewards: [f64; PLAYERS],
    pub disqualified: [bool; PLAYERS],
}

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Line<'a> {
    Header(&'a LogHeader),
    Step(&'a StepRecord),
    Event(&'a EventRecord),
    Summary { final_rewards: &'a [f64; PLAYERS], disqualified: &'a [bool; PLAYERS] },
}

impl EpisodeLog {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn events(&self) -> impl Iterator<Item = (u64, &Event)> {
        self.events.iter().map(|r| (r.t, &r.event))
    }

    /// Newline-delimited JSON: a header record, then per step its step
    /// record followed by that step's events, then a summary record.
    pub fn write_ndjson<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut line = |l: Line| -> io::Result<()> {
            serde_json::to_writer(&mut w, &l)?;
            w.write_all(b"\n")
        };
        line(Line::Header(&self.header))?;
        let mut events = self.events.iter().peekable();
        for s in &self.steps {
            line(Line::Step(s))?;
            while let Some(e) = events.next_if(|e| e.t == s.t) {
                line(Line::Event(e))?;
            }
        }
        line(Line::Summary { final_rewards: &self.final_rewards, disqualified: &self.disqualified })
    }

    pub fn to_ndjson(&self) -> String {
        let mut buf = Vec::new();
        self.write_ndjson(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    /// Per-step rewards as CSV: `t,r0,...,r5`.
    pub fn write_reward_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,{}", (0..PLAYERS).map(|i| format!("r{i}")).collect::<Vec<_>>().join(","))?;
        for s in &self.steps {
            let cols: Vec<String> = s.rewards.iter().map(|r| r.to_string()).collect();
            writeln!(w, "{},{}", s.t, cols.join(","))?;
        }
        Ok(())
    }
}

/// Runs one episode from reset until the step budget is spent or every
/// player is disqualified.
pub fn run_episode(
    config: &EnvConfig,
    roster: &[RosterEntry],
    controllers: &mut [Box<dyn Controller + '_>],
) -> Result<EpisodeLog, EnvError> {
    if roster.len() != PLAYERS {
        return Err(EnvError::BadRoster(roster.len()));
    }
    if controllers.len() != PLAYERS {
        return Err(EnvError::BadRoster(controllers.len()));
    }
    let colors: Vec<Color> = roster.iter().map(|r| r.color).collect();
    let mut state = WorldState::reset(config, &colors)?;
    for (id, c) in controllers.iter_mut().enumerate() {
        c.begin_episode(&state, id);
    }
    let mut steps = Vec::with_capacity(config.episode_length() as usize);
    let mut events = Vec::new();
    while !state.is_done() {
        let mut actions = [Action::Noop; PLAYERS];
        for (id, c) in controllers.iter_mut().enumerate() {
            if !state.players[id].disqualified {
                actions[id] = c.act(&state, id);
            }
        }
        let outcome = state.step(&actions)?;
        for (id, c) in controllers.iter_mut().enumerate() {
            c.after_step(&state, id, &outcome);
        }
        steps.push(StepRecord { t: outcome.t, actions, rewards: outcome.rewards });
        events.extend(outcome.events.into_iter().map(|event| EventRecord { t: outcome.t, event }));
    }
    Ok(EpisodeLog {
        header: LogHeader {
            schema: LOG_SCHEMA.into(),
            version: LOG_VERSION,
            seed: config.seed,
            config: config.clone(),
            roster: roster.to_vec(),
            badges: state.players.iter().map(|p| p.badge).collect(),
        },
        steps,
        events,
        final_rewards: std::array::from_fn(|i| state.players[i].cumulative_reward),
        disqualified: std::array::from_fn(|i| state.players[i].disqualified),
    })
}
