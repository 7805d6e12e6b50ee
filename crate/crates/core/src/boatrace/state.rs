//! World state and the step function.

use super::config::{EnvConfig, FlailRule};
use super::map::{Direction, GridMap, Pos, Side, Terrain, BOATS, PLAYERS, SEATS_PER_BOAT};
use super::EnvError;
use crate::game::Color;
use crate::rng::{make_rng, SimRng};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

pub type PlayerId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Action {
    #[default]
    Noop,
    MoveNorth,
    MoveEast,
    MoveSouth,
    MoveWest,
    TurnLeft,
    TurnRight,
    Paddle,
    Flail,
}

impl Action {
    pub const ALL: [Action; 9] = [
        Action::Noop,
        Action::MoveNorth,
        Action::MoveEast,
        Action::MoveSouth,
        Action::MoveWest,
        Action::TurnLeft,
        Action::TurnRight,
        Action::Paddle,
        Action::Flail,
    ];

    pub fn step(d: Direction) -> Action {
        match d {
            Direction::North => Action::MoveNorth,
            Direction::East => Action::MoveEast,
            Direction::South => Action::MoveSouth,
            Direction::West => Action::MoveWest,
        }
    }

    pub fn movement(self) -> Option<Direction> {
        match self {
            Action::MoveNorth => Some(Direction::North),
            Action::MoveEast => Some(Direction::East),
            Action::MoveSouth => Some(Direction::South),
            Action::MoveWest => Some(Direction::West),
            _ => None,
        }
    }
}

/// Rowing action that actually took effect (a paddle during cooldown does not).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rowing {
    Paddle,
    Flail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseKind {
    PartnerChoice,
    SemaphoreChange,
    Rowing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SemaphoreColor {
    Red,
    Yellow,
    Green,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phase {
    pub kind: PhaseKind,
    pub race: u32,
    /// Bank the boats row towards in this race.
    pub direction: Side,
    /// Steps already spent in this phase.
    pub elapsed: u32,
    /// Steps already spent in this race.
    pub race_step: u32,
}

impl Phase {
    pub fn semaphore(&self) -> SemaphoreColor {
        match self.kind {
            PhaseKind::PartnerChoice => SemaphoreColor::Red,
            PhaseKind::SemaphoreChange => SemaphoreColor::Yellow,
            PhaseKind::Rowing => SemaphoreColor::Green,
        }
    }

    pub fn departure(&self) -> Side {
        self.direction.other()
    }
}

/// Direction of race `race`: north first, then alternating.
pub fn race_direction(race: u32) -> Side {
    if race % 2 == 0 {
        Side::North
    } else {
        Side::South
    }
}

/// Per-episode identity marker: a 2×2 binary pattern stored as four bits,
/// row-major from the top-left cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Badge(pub u8);

impl Badge {
    pub fn pattern(self) -> [[bool; 2]; 2] {
        let bit = |i: u8| self.0 & (1 << (3 - i)) != 0;
        [[bit(0), bit(1)], [bit(2), bit(3)]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeatRef {
    pub boat: usize,
    pub seat: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerState {
    pub id: PlayerId,
    pub color: Color,
    pub badge: Badge,
    pub position: Pos,
    pub orientation: Direction,
    pub seated_in: Option<SeatRef>,
    pub paddle_cooldown_remaining: u32,
    pub pending_paddle: bool,
    /// Last step of the cooldown window of the pending paddle.
    pub pending_until: u64,
    pub disqualified: bool,
    pub cumulative_reward: f64,
    /// Reached the goal bank in the current race.
    pub crossed: bool,
    pub apples_eaten: u32,
    pub penalties: u32,
}

impl PlayerState {
    pub fn active(&self) -> bool {
        !self.disqualified
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Boat {
    /// Row of both seats.
    pub row: i32,
    /// Bank the boat is moored at, or `None` while crossing.
    pub docked: Option<Side>,
    pub seats: [Option<PlayerId>; SEATS_PER_BOAT],
    /// Step at which an agreed stroke moves the boat.
    pub stroke_at: Option<u64>,
}

impl Boat {
    pub fn full(&self) -> bool {
        self.seats.iter().all(Option::is_some)
    }

    pub fn empty(&self) -> bool {
        self.seats.iter().all(Option::is_none)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    AppleEaten { player: PlayerId, pos: Pos, river: bool },
    Boarded { race: u32, player: PlayerId, boat: usize, seat: usize },
    PairFormed { race: u32, boat: usize, players: [PlayerId; 2] },
    BoatMoved { boat: usize, row: i32 },
    PenaltyApplied { player: PlayerId, boat: usize, amount: f64 },
    RaceFinished { race: u32, boat: usize },
    Disqualified { player: PlayerId, race: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub t: u64,
    pub rewards: [f64; PLAYERS],
    pub events: Vec<Event>,
}

#[derive(Debug, Clone)]
pub struct WorldState {
    pub config: EnvConfig,
    pub map: GridMap,
    /// Index of the next step to execute.
    pub t: u64,
    pub players: Vec<PlayerState>,
    pub boats: [Boat; BOATS],
    /// Presence per entry of `map.river_apples`.
    pub river_apples: Vec<bool>,
    /// Presence per entry of `map.bank_apples`, per side.
    pub bank_apples: [Vec<bool>; 2],
    /// Barrier state per side.
    pub barriers_open: [bool; 2],
    /// Effective rowing action of each player in the last step.
    pub last_rowing: [Option<Rowing>; PLAYERS],
    occupancy: Vec<Option<PlayerId>>,
    rng: SimRng,
}

impl PartialEq for WorldState {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config
            && self.map == other.map
            && self.t == other.t
            && self.players == other.players
            && self.boats == other.boats
            && self.river_apples == other.river_apples
            && self.bank_apples == other.bank_apples
            && self.barriers_open == other.barriers_open
            && self.last_rowing == other.last_rowing
            && self.rng == other.rng
    }
}

impl WorldState {
    /// Fresh episode: boats at the south dock, players on their spawn points
    /// (assigned in random order), unique random badges, first race heading
    /// north.
    pub fn reset(config: &EnvConfig, roster: &[Color]) -> Result<WorldState, EnvError> {
        config.validate()?;
        if roster.len() != PLAYERS {
            return Err(EnvError::BadRoster(roster.len()));
        }
        let map = config.map();
        let mut rng = make_rng(config.seed);
        let mut badges: Vec<u8> = (0..16).collect();
        badges.shuffle(&mut rng);
        let mut spawns = map.spawns.clone();
        spawns.shuffle(&mut rng);
        let players = roster
            .iter()
            .enumerate()
            .map(|(id, &color)| PlayerState {
                id,
                color,
                badge: Badge(badges[id]),
                position: spawns[id],
                orientation: Direction::North,
                seated_in: None,
                paddle_cooldown_remaining: 0,
                pending_paddle: false,
                pending_until: 0,
                disqualified: false,
                cumulative_reward: 0.0,
                crossed: false,
                apples_eaten: 0,
                penalties: 0,
            })
            .collect::<Vec<_>>();
        let south = map.dock_row(Side::South);
        let boat = Boat { row: south, docked: Some(Side::South), seats: [None; 2], stroke_at: None };
        let mut occupancy = vec![None; (map.width * map.height) as usize];
        for p in &players {
            occupancy[(p.position.row * map.width + p.position.col) as usize] = Some(p.id);
        }
        let mut state = WorldState {
            config: config.clone(),
            river_apples: vec![true; map.river_apples.len()],
            bank_apples: [vec![false; map.bank_apples[0].len()], vec![false; map.bank_apples[1].len()]],
            map,
            t: 0,
            players,
            boats: [boat.clone(), boat.clone(), boat],
            barriers_open: [false; 2],
            last_rowing: [None; PLAYERS],
            occupancy,
            rng,
        };
        state.start_race(0);
        Ok(state)
    }

    pub fn episode_length(&self) -> u64 {
        self.config.episode_length()
    }

    pub fn all_disqualified(&self) -> bool {
        self.players.iter().all(|p| p.disqualified)
    }

    pub fn is_done(&self) -> bool {
        self.t >= self.episode_length() || self.all_disqualified()
    }

    pub fn phase_at(&self, t: u64) -> Phase {
        let len = self.config.race_length() as u64;
        let race = (t / len) as u32;
        let w = (t % len) as u32;
        let pc = self.config.partner_choice_steps;
        let sem = self.config.semaphore_steps;
        let (kind, elapsed) = if w < pc {
            (PhaseKind::PartnerChoice, w)
        } else if w < pc + sem {
            (PhaseKind::SemaphoreChange, w - pc)
        } else {
            (PhaseKind::Rowing, w - pc - sem)
        };
        Phase { kind, race, direction: race_direction(race), elapsed, race_step: w }
    }

    /// Phase of the next step to execute.
    pub fn phase(&self) -> Phase {
        self.phase_at(self.t)
    }

    pub fn player(&self, id: PlayerId) -> Result<&PlayerState, EnvError> {
        self.players.get(id).ok_or(EnvError::UnknownPlayer(id))
    }

    pub fn occupant(&self, p: Pos) -> Option<PlayerId> {
        if !self.map.in_bounds(p) {
            return None;
        }
        self.occupancy[self.idx(p)]
    }

    fn idx(&self, p: Pos) -> usize {
        (p.row * self.map.width + p.col) as usize
    }

    pub fn seat_pos(&self, s: SeatRef) -> Pos {
        Pos::new(self.boats[s.boat].row, self.map.lanes[s.boat][s.seat].col)
    }

    /// Boat and seat whose cell is `p`, if any.
    pub fn seat_at(&self, p: Pos) -> Option<SeatRef> {
        (0..BOATS).find_map(|boat| {
            if self.boats[boat].row != p.row {
                return None;
            }
            (0..SEATS_PER_BOAT).find(|&seat| self.map.lanes[boat][seat].col == p.col).map(|seat| SeatRef { boat, seat })
        })
    }

    pub fn partner_of(&self, id: PlayerId) -> Option<PlayerId> {
        let s = self.players[id].seated_in?;
        self.boats[s.boat].seats[1 - s.seat]
    }

    /// Whether a player on foot may stand on `p`, ignoring other players.
    pub fn passable(&self, p: Pos) -> bool {
        match self.map.terrain(p) {
            Terrain::Bank => self.map.in_bounds(p),
            Terrain::Barrier => self.barriers_open[self.map.side_of(p).index()],
            _ => false,
        }
    }

    pub fn river_apple_at(&self, p: Pos) -> bool {
        self.map.river_apples.iter().zip(&self.river_apples).any(|(&a, &present)| present && a == p)
    }

    pub fn bank_apple_at(&self, p: Pos) -> bool {
        let side = self.map.side_of(p).index();
        self.map.bank_apples[side].iter().zip(&self.bank_apples[side]).any(|(&a, &present)| present && a == p)
    }

    pub fn bank_apple_count(&self, side: Side) -> usize {
        self.bank_apples[side.index()].iter().filter(|&&a| a).count()
    }

    /// Positions of present bank apples on a side.
    pub fn bank_apple_positions(&self, side: Side) -> impl Iterator<Item = Pos> + '_ {
        let i = side.index();
        self.map.bank_apples[i].iter().zip(&self.bank_apples[i]).filter(|(_, &p)| p).map(|(&a, _)| a)
    }

    fn start_race(&mut self, race: u32) {
        let arrival = race_direction(race);
        let departure = arrival.other();
        self.bank_apples[arrival.index()].iter_mut().for_each(|a| *a = true);
        self.bank_apples[departure.index()].iter_mut().for_each(|a| *a = false);
        self.river_apples.iter_mut().for_each(|a| *a = true);
        self.barriers_open[departure.index()] = false;
        self.barriers_open[arrival.index()] = true;
        for p in &mut self.players {
            p.crossed = false;
            p.paddle_cooldown_remaining = 0;
            p.pending_paddle = false;
        }
    }

    fn start_rowing(&mut self, race: u32) {
        let arrival = race_direction(race);
        self.barriers_open[arrival.other().index()] = true;
        self.barriers_open[arrival.index()] = false;
    }

    fn set_position(&mut self, id: PlayerId, to: Pos) {
        let from = self.players[id].position;
        let fi = self.idx(from);
        if self.occupancy[fi] == Some(id) {
            self.occupancy[fi] = None;
        }
        let ti = self.idx(to);
        self.occupancy[ti] = Some(id);
        self.players[id].position = to;
    }

    fn remove_from_grid(&mut self, id: PlayerId) {
        let i = self.idx(self.players[id].position);
        if self.occupancy[i] == Some(id) {
            self.occupancy[i] = None;
        }
    }

    /// Seat that a move from `from` onto `to` would board, if boarding is
    /// currently allowed.
    fn boarding_target(&self, from: Pos, to: Pos) -> Option<SeatRef> {
        let phase = self.phase();
        if phase.kind != PhaseKind::Rowing {
            return None;
        }
        let departure = phase.departure();
        let seat = self.seat_at(to)?;
        let boat = &self.boats[seat.boat];
        if boat.docked != Some(departure) || boat.seats[seat.seat].is_some() {
            return None;
        }
        let lane = &self.map.lanes[seat.boat][seat.seat];
        (lane.barrier[departure.index()] == from && self.barriers_open[departure.index()]).then_some(seat)
    }

    /// Advances the world by one step.
    ///
    /// Order of resolution: phase toggles, turns and movement, rowing,
    /// apples, race end.
    pub fn step(&mut self, actions: &[Action]) -> Result<StepOutcome, EnvError> {
        if self.is_done() {
            return Err(EnvError::EpisodeOver);
        }
        if actions.len() != PLAYERS {
            return Err(EnvError::BadActions(actions.len()));
        }
        if self.config.strict_actions {
            if let Some(id) = (0..PLAYERS).find(|&i| self.players[i].disqualified && actions[i] != Action::Noop) {
                return Err(EnvError::InvalidAction { player: id, t: self.t });
            }
        }
        let t = self.t;
        let phase = self.phase();
        let mut out = StepOutcome { t, rewards: [0.0; PLAYERS], events: Vec::new() };

        // (1) Phase toggles.
        if phase.race_step == 0 && phase.race > 0 {
            self.start_race(phase.race);
        }
        if phase.kind == PhaseKind::Rowing && phase.elapsed == 0 {
            self.start_rowing(phase.race);
        }

        // (2) Turns and movement.
        let mut claims: BTreeMap<Pos, Vec<PlayerId>> = BTreeMap::new();
        for (id, &action) in actions.iter().enumerate() {
            let p = &self.players[id];
            if p.disqualified || p.seated_in.is_some() {
                continue;
            }
            match action {
                Action::TurnLeft => self.players[id].orientation = p.orientation.turn_left(),
                Action::TurnRight => self.players[id].orientation = p.orientation.turn_right(),
                _ => {
                    if let Some(d) = action.movement() {
                        let to = p.position.offset(d);
                        if self.occupant(to).is_none()
                            && (self.passable(to) || self.boarding_target(p.position, to).is_some())
                        {
                            claims.entry(to).or_default().push(id);
                        }
                    }
                }
            }
        }
        for (to, movers) in claims {
            let winner = if movers.len() == 1 { movers[0] } else { movers[self.rng.random_range(0..movers.len())] };
            if let Some(seat) = self.boarding_target(self.players[winner].position, to) {
                self.set_position(winner, to);
                self.board(winner, seat, phase.race, &mut out);
            } else {
                self.set_position(winner, to);
            }
        }

        // (3) Rowing.
        self.last_rowing = [None; PLAYERS];
        if phase.kind == PhaseKind::Rowing {
            for b in 0..BOATS {
                self.row_boat(b, actions, phase, &mut out);
            }
        }

        // (4) Apples.
        for id in 0..PLAYERS {
            let p = &self.players[id];
            if p.disqualified || p.seated_in.is_some() {
                continue;
            }
            let pos = p.position;
            let side = self.map.side_of(pos).index();
            if let Some(i) = self.map.bank_apples[side].iter().position(|&a| a == pos) {
                if self.bank_apples[side][i] {
                    self.bank_apples[side][i] = false;
                    self.eat(id, pos, false, &mut out);
                }
            }
        }
        let goal = phase.direction.index();
        let prob = self.config.bank_apple_respawn_prob;
        for i in 0..self.map.bank_apples[goal].len() {
            if !self.bank_apples[goal][i] && self.occupant(self.map.bank_apples[goal][i]).is_none() {
                let roll: f64 = self.rng.random();
                if roll < prob {
                    self.bank_apples[goal][i] = true;
                }
            }
        }

        // (5) Race end.
        if phase.race_step + 1 == self.config.race_length() {
            self.finish_race(phase, &mut out);
        }

        for (id, r) in out.rewards.iter().enumerate() {
            self.players[id].cumulative_reward += r;
        }
        self.t += 1;
        Ok(out)
    }

    fn eat(&mut self, id: PlayerId, pos: Pos, river: bool, out: &mut StepOutcome) {
        out.rewards[id] += self.config.apple_reward;
        self.players[id].apples_eaten += 1;
        out.events.push(Event::AppleEaten { player: id, pos, river });
    }

    fn board(&mut self, id: PlayerId, seat: SeatRef, race: u32, out: &mut StepOutcome) {
        let boat = &mut self.boats[seat.boat];
        boat.seats[seat.seat] = Some(id);
        let p = &mut self.players[id];
        p.seated_in = Some(seat);
        p.paddle_cooldown_remaining = 0;
        p.pending_paddle = false;
        out.events.push(Event::Boarded { race, player: id, boat: seat.boat, seat: seat.seat });
        if let [Some(a), Some(b)] = boat.seats {
            out.events.push(Event::PairFormed { race, boat: seat.boat, players: [a, b] });
        }
    }

    fn row_boat(&mut self, b: usize, actions: &[Action], phase: Phase, out: &mut StepOutcome) {
        let t = self.t;
        let [Some(p0), Some(p1)] = self.boats[b].seats else {
            return;
        };
        if self.boats[b].docked == Some(phase.direction) {
            return;
        }
        let crew = [p0, p1];
        let effective: [Option<Rowing>; 2] = std::array::from_fn(|i| {
            let p = &self.players[crew[i]];
            match actions[crew[i]] {
                Action::Paddle if p.paddle_cooldown_remaining == 0 => Some(Rowing::Paddle),
                Action::Flail => Some(Rowing::Flail),
                _ => None,
            }
        });
        for i in 0..2 {
            self.last_rowing[crew[i]] = effective[i];
        }
        let cooldown = self.config.paddle_cooldown;
        let paddled = effective.map(|e| e == Some(Rowing::Paddle));
        let mut started = [false; 2];
        if paddled[0] && paddled[1] {
            self.boats[b].stroke_at = Some(t + cooldown as u64);
            for &id in &crew {
                let p = &mut self.players[id];
                p.paddle_cooldown_remaining = cooldown;
                p.pending_paddle = false;
            }
            started = [true, true];
        } else {
            for i in 0..2 {
                if !paddled[i] {
                    continue;
                }
                let partner = crew[1 - i];
                if self.players[partner].pending_paddle {
                    self.boats[b].stroke_at = Some(self.players[partner].pending_until);
                    self.players[partner].pending_paddle = false;
                    let p = &mut self.players[crew[i]];
                    p.paddle_cooldown_remaining = cooldown;
                    p.pending_paddle = false;
                } else {
                    let p = &mut self.players[crew[i]];
                    p.paddle_cooldown_remaining = cooldown;
                    p.pending_paddle = true;
                    p.pending_until = t + cooldown as u64;
                }
                started[i] = true;
            }
        }
        // A flail while the partner's paddle is pending wastes it.
        for i in 0..2 {
            if effective[1 - i] == Some(Rowing::Flail) && self.players[crew[i]].pending_paddle {
                let p = &mut self.players[crew[i]];
                p.pending_paddle = false;
                p.penalties += 1;
                let amount = self.config.mismatch_penalty;
                out.rewards[crew[i]] += amount;
                out.events.push(Event::PenaltyApplied { player: crew[i], boat: b, amount });
            }
        }
        let prob = self.config.flail_move_prob;
        let flails = effective.iter().filter(|e| **e == Some(Rowing::Flail)).count();
        let flail_move = match self.config.flail_rule {
            FlailRule::Independent => (0..flails).fold(false, |moved, _| {
                let roll: f64 = self.rng.random();
                moved | (roll < prob)
            }),
            FlailRule::CappedAt010 => flails > 0 && self.rng.random::<f64>() < prob,
        };
        let stroke = self.boats[b].stroke_at == Some(t);
        if stroke {
            self.boats[b].stroke_at = None;
        }
        for i in 0..2 {
            let p = &mut self.players[crew[i]];
            if !started[i] {
                p.paddle_cooldown_remaining = p.paddle_cooldown_remaining.saturating_sub(1);
            }
            if p.pending_paddle && p.pending_until <= t {
                p.pending_paddle = false;
            }
        }
        if stroke || flail_move {
            self.move_boat(b, phase, out);
        }
    }

    fn move_boat(&mut self, b: usize, phase: Phase, out: &mut StepOutcome) {
        let (dr, _) = phase.direction.heading().delta();
        self.boats[b].row += dr;
        self.boats[b].docked = None;
        let row = self.boats[b].row;
        out.events.push(Event::BoatMoved { boat: b, row });
        let crew: Vec<(usize, PlayerId)> =
            self.boats[b].seats.iter().enumerate().filter_map(|(s, p)| p.map(|p| (s, p))).collect();
        for &(_, id) in &crew {
            self.remove_from_grid(id);
        }
        for &(s, id) in &crew {
            let pos = Pos::new(row, self.map.lanes[b][s].col);
            self.set_position(id, pos);
            if let Some(i) = self.map.river_apples.iter().position(|&a| a == pos) {
                if self.river_apples[i] {
                    self.river_apples[i] = false;
                    self.eat(id, pos, true, out);
                }
            }
        }
        if row == self.map.dock_row(phase.direction) {
            self.disembark(b, phase, out);
        }
    }

    fn disembark(&mut self, b: usize, phase: Phase, out: &mut StepOutcome) {
        let arrival = phase.direction;
        out.events.push(Event::RaceFinished { race: phase.race, boat: b });
        let boat = &mut self.boats[b];
        boat.docked = Some(arrival);
        boat.stroke_at = None;
        let seats = std::mem::take(&mut boat.seats);
        for (s, id) in seats.into_iter().enumerate() {
            let Some(id) = id else { continue };
            self.remove_from_grid(id);
            let queue = self.map.lanes[b][s].queue[arrival.index()];
            let to = self.nearest_free_bank(queue).unwrap_or(queue);
            self.set_position(id, to);
            let p = &mut self.players[id];
            p.seated_in = None;
            p.crossed = true;
            p.paddle_cooldown_remaining = 0;
            p.pending_paddle = false;
            p.orientation = arrival.heading();
        }
    }

    /// Closest unoccupied bank cell to `from` on the same side, by
    /// breadth-first search over bank cells.
    fn nearest_free_bank(&self, from: Pos) -> Option<Pos> {
        let side = self.map.side_of(from);
        let mut seen = vec![false; self.occupancy.len()];
        let mut queue = VecDeque::from([from]);
        seen[self.idx(from)] = true;
        while let Some(p) = queue.pop_front() {
            if self.occupant(p).is_none() {
                return Some(p);
            }
            for d in Direction::ALL {
                let n = p.offset(d);
                if self.map.terrain(n) == Terrain::Bank && self.map.side_of(n) == side && !seen[self.idx(n)] {
                    seen[self.idx(n)] = true;
                    queue.push_back(n);
                }
            }
        }
        None
    }

    fn finish_race(&mut self, phase: Phase, out: &mut StepOutcome) {
        let arrival = phase.direction;
        for id in 0..PLAYERS {
            let p = &self.players[id];
            if p.disqualified || p.crossed {
                continue;
            }
            self.remove_from_grid(id);
            let p = &mut self.players[id];
            p.disqualified = true;
            p.seated_in = None;
            p.pending_paddle = false;
            out.events.push(Event::Disqualified { player: id, race: phase.race });
        }
        let dock = self.map.dock_row(arrival);
        for boat in &mut self.boats {
            if boat.docked != Some(arrival) {
                *boat = Boat { row: dock, docked: Some(arrival), seats: [None; 2], stroke_at: None };
            }
        }
        self.bank_apples[arrival.index()].iter_mut().for_each(|a| *a = false);
    }
}
