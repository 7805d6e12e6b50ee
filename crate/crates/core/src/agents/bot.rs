//! The scripted controller and the partner-choice protocol.
//!
//! Bots coordinate through a public claims board recording which seat each
//! player is heading for, and which seat a choosing bot has reserved for the
//! partner it invites. At the first step of every partner-choice phase a
//! choosing bot picks a partner, claims a seat in an unclaimed boat near
//! that partner and reserves the other seat for them. Random-boat bots wait
//! a random 1 to 10 steps, then take a reserved seat if invited, otherwise a
//! random seat in a random unclaimed boat; when no boat is unclaimed they
//! wait until step 20 and take a random unclaimed seat. Bots walk to the
//! queue cell in front of their seat and board when the barriers lift.
//! Once across, they collect the nearest bank apples.

use super::navigate::{navigate, navigate_to_nearest};
use super::{
    choose_target, AwareFidelity, BotSpec, Candidate, Classification, PartnerChoiceMode, PartnerLedger, RowingType,
};
use crate::boatrace::{
    Action, Controller, Event, Phase, PhaseKind, PlayerId, Pos, Rowing, SeatRef, StepOutcome, WorldState, BOATS,
    PLAYERS, SEATS_PER_BOAT,
};
use crate::rng::{derive_seed, make_rng, SimRng};
use rand::seq::IndexedRandom;
use rand::Rng;
use std::cell::RefCell;
use std::rc::Rc;

/// Race step after which bots without an unclaimed boat take any seat.
const LATE_CLAIM_STEP: u32 = 20;
/// Steps without progress before a bot gives up on its seat.
const RETARGET_AFTER: u32 = 5;
const MAX_DELAY: u32 = 10;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClaimsBoard {
    race: Option<u32>,
    pub claims: [Option<SeatRef>; PLAYERS],
    /// Seat reserved for an invited player.
    pub invites: [Option<SeatRef>; PLAYERS],
}

pub type SharedBoard = Rc<RefCell<ClaimsBoard>>;

impl ClaimsBoard {
    fn sync(&mut self, race: u32) {
        if self.race != Some(race) {
            *self = ClaimsBoard { race: Some(race), ..ClaimsBoard::default() };
        }
    }

    pub fn claimant(&self, seat: SeatRef) -> Option<PlayerId> {
        self.claims.iter().position(|c| *c == Some(seat))
    }

    fn reserved_for_other(&self, seat: SeatRef, me: PlayerId) -> bool {
        self.invites.iter().enumerate().any(|(p, inv)| p != me && *inv == Some(seat) && self.claims[p].is_none())
    }

    fn seat_free(&self, seat: SeatRef, me: PlayerId) -> bool {
        self.claimant(seat).is_none() && !self.reserved_for_other(seat, me)
    }

    fn boat_unclaimed(&self, boat: usize) -> bool {
        (0..SEATS_PER_BOAT).all(|seat| {
            let s = SeatRef { boat, seat };
            self.claimant(s).is_none() && !self.invites.contains(&Some(s))
        })
    }
}

fn sibling(s: SeatRef) -> SeatRef {
    SeatRef { boat: s.boat, seat: 1 - s.seat }
}

fn all_seats() -> impl Iterator<Item = SeatRef> {
    (0..BOATS).flat_map(|boat| (0..SEATS_PER_BOAT).map(move |seat| SeatRef { boat, seat }))
}

#[derive(Debug, Clone, Copy, Default)]
struct Window {
    crew: Option<[PlayerId; 2]>,
    steps: u32,
    moves: u32,
}

pub struct ScriptedBot {
    spec: BotSpec,
    fidelity: AwareFidelity,
    rng: SimRng,
    board: SharedBoard,
    /// True rowing type of every player, consulted only by omniscient bots.
    truth: Vec<RowingType>,
    pub ledger: PartnerLedger,
    race: Option<u32>,
    delay: u32,
    stuck: u32,
    last_pos: Option<Pos>,
    /// Paddles and flails seen per player in the current race.
    race_obs: [(u32, u32); PLAYERS],
    crews_before: [Option<[PlayerId; 2]>; BOATS],
    /// Positions of all players when this bot last acted.
    seen_at: [Option<Pos>; PLAYERS],
    windows: [Window; BOATS],
}

impl ScriptedBot {
    pub fn new(spec: BotSpec, fidelity: AwareFidelity, truth: Vec<RowingType>, board: SharedBoard, seed: u64) -> Self {
        ScriptedBot {
            spec,
            fidelity,
            rng: make_rng(seed),
            board,
            truth,
            ledger: PartnerLedger::default(),
            race: None,
            delay: 0,
            stuck: 0,
            last_pos: None,
            race_obs: [(0, 0); PLAYERS],
            crews_before: [None; BOATS],
            seen_at: [None; PLAYERS],
            windows: [Window::default(); BOATS],
        }
    }

    pub fn spec(&self) -> BotSpec {
        self.spec
    }

    fn sync_race(&mut self, race: u32) {
        if self.race == Some(race) {
            return;
        }
        if self.race.is_some() {
            self.ledger.settle();
        }
        self.race = Some(race);
        self.delay = self.rng.random_range(1..=MAX_DELAY);
        self.stuck = 0;
        self.race_obs = [(0, 0); PLAYERS];
        self.windows = [Window::default(); BOATS];
        self.board.borrow_mut().sync(race);
    }

    fn partner_cooperates(&self, state: &WorldState, me: PlayerId) -> bool {
        let Some(partner) = state.partner_of(me) else { return true };
        if self.spec.choice == PartnerChoiceMode::Omniscient {
            return self.truth[partner].cooperates();
        }
        let (paddles, flails) = self.race_obs[partner];
        self.ledger.classification(state.players[partner].badge) != Classification::Defector && flails <= paddles
    }

    fn row(&self, state: &WorldState, me: PlayerId) -> Action {
        let ready = state.players[me].paddle_cooldown_remaining == 0;
        let paddle = if ready { Action::Paddle } else { Action::Noop };
        match self.spec.rowing {
            RowingType::Paddler => paddle,
            RowingType::Flailer => Action::Flail,
            RowingType::Reciprocal if self.partner_cooperates(state, me) => paddle,
            RowingType::Reciprocal => Action::Flail,
        }
    }

    fn walkable<'a>(&self, state: &'a WorldState, me: PlayerId, avoid: Vec<Pos>) -> impl Fn(Pos) -> bool + 'a {
        move |p: Pos| state.passable(p) && state.occupant(p).is_none_or(|o| o == me) && !avoid.contains(&p)
    }

    /// Shortest-path step to `goal`. Players that stood still on the last
    /// step are obstacles; moving ones are planned through. When a moving
    /// player is in the way the bot either detours around everyone or waits,
    /// at random, so that two bots blocking each other do not mirror each
    /// other's moves forever.
    fn step_towards(&mut self, state: &WorldState, me: PlayerId, goal: Pos, avoid: Vec<Pos>) -> Action {
        let pos = state.players[me].position;
        let bounds = (state.map.height, state.map.width);
        let still =
            |p: Pos| state.occupant(p).is_some_and(|o| o != me && self.seen_at.get(o).copied().flatten() == Some(p));
        let open = |p: Pos| p == goal || (state.passable(p) && !avoid.contains(&p) && !still(p));
        let direct = navigate(bounds, open, pos, goal);
        let blocked = direct.movement().is_some_and(|d| state.occupant(pos.offset(d)).is_some());
        if !blocked {
            return direct;
        }
        if self.rng.random::<bool>() {
            let walk = self.walkable(state, me, avoid);
            navigate(bounds, |p| p == goal || walk(p), pos, goal)
        } else {
            Action::Noop
        }
    }

    fn forage(&self, state: &WorldState, me: PlayerId) -> Action {
        let pos = state.players[me].position;
        let side = state.map.side_of(pos);
        let bounds = (state.map.height, state.map.width);
        let walk = self.walkable(state, me, Vec::new());
        navigate_to_nearest(bounds, walk, |p| state.map.side_of(p) == side && state.bank_apple_at(p), pos)
            .map(|(a, _)| a)
            .unwrap_or(Action::Noop)
    }

    fn candidates(&self, state: &WorldState, me: PlayerId) -> Vec<Candidate> {
        let omniscient = self.spec.choice == PartnerChoiceMode::Omniscient;
        state
            .players
            .iter()
            .filter(|p| p.id != me && !p.disqualified)
            .map(|p| Candidate {
                id: p.id,
                color: p.color,
                badge: p.badge,
                pos: p.position,
                rowing: omniscient.then(|| self.truth[p.id]),
            })
            .collect()
    }

    fn queue_cell(state: &WorldState, seat: SeatRef, phase: Phase) -> Pos {
        state.map.lanes[seat.boat][seat.seat].queue[phase.departure().index()]
    }

    /// Unclaimed boat to anchor in. Choosers take the one closest to their
    /// partner; everyone else picks at random.
    fn pick_empty_boat(&mut self, state: &WorldState, phase: Phase, near: Option<Pos>) -> Option<SeatRef> {
        let board = self.board.borrow();
        let boats: Vec<usize> = (0..BOATS).filter(|&b| board.boat_unclaimed(b)).collect();
        drop(board);
        let boat = match near {
            Some(p) => {
                let dist = |b: usize| {
                    (0..SEATS_PER_BOAT)
                        .map(|s| Self::queue_cell(state, SeatRef { boat: b, seat: s }, phase).manhattan(p))
                        .min()
                        .unwrap_or(i32::MAX)
                };
                let best = boats.iter().map(|&b| dist(b)).min()?;
                let closest: Vec<usize> = boats.iter().copied().filter(|&b| dist(b) == best).collect();
                *closest.choose(&mut self.rng)?
            }
            None => *boats.choose(&mut self.rng)?,
        };
        let seat = self.rng.random_range(0..SEATS_PER_BOAT);
        Some(SeatRef { boat, seat })
    }

    fn pick_free_seat(&mut self, state: &WorldState, me: PlayerId, phase: Phase) -> Option<SeatRef> {
        let board = self.board.borrow();
        let departure = phase.departure();
        let free: Vec<SeatRef> = all_seats()
            .filter(|&s| board.seat_free(s, me))
            .filter(|&s| state.boats[s.boat].docked == Some(departure) && state.boats[s.boat].seats[s.seat].is_none())
            .collect();
        // Prefer completing a pair over opening a new boat.
        let pairing: Vec<SeatRef> = free
            .iter()
            .copied()
            .filter(|&s| board.claimant(sibling(s)).is_some() || state.boats[s.boat].seats[1 - s.seat].is_some())
            .collect();
        drop(board);
        let pool = if pairing.is_empty() { free } else { pairing };
        pool.choose(&mut self.rng).copied()
    }

    fn claim(&self, me: PlayerId, seat: SeatRef) {
        self.board.borrow_mut().claims[me] = Some(seat);
    }

    fn decide_claim(&mut self, state: &WorldState, me: PlayerId, phase: Phase) {
        if self.spec.choice.chooses() {
            let candidates = self.candidates(state, me);
            let from = state.players[me].position;
            let target = choose_target(self.spec.choice, &self.ledger, &candidates, phase.race, from, &mut self.rng);
            if let Some(t) = target {
                let (their_claim, invited) = {
                    let b = self.board.borrow();
                    (b.claims[t], b.invites[t].is_some())
                };
                if let Some(ts) = their_claim {
                    if self.board.borrow().seat_free(sibling(ts), me) {
                        self.claim(me, sibling(ts));
                        return;
                    }
                } else if !invited {
                    if let Some(seat) = self.pick_empty_boat(state, phase, Some(state.players[t].position)) {
                        self.claim(me, seat);
                        self.board.borrow_mut().invites[t] = Some(sibling(seat));
                        return;
                    }
                }
            }
            if let Some(seat) =
                self.pick_empty_boat(state, phase, None).or_else(|| self.pick_free_seat(state, me, phase))
            {
                self.claim(me, seat);
            }
            return;
        }
        if phase.kind == PhaseKind::PartnerChoice && phase.race_step < self.delay {
            return;
        }
        let invite = self.board.borrow().invites[me];
        if let Some(seat) = invite {
            if self.board.borrow().claimant(seat).is_none() {
                self.claim(me, seat);
                return;
            }
        }
        if let Some(seat) = self.pick_empty_boat(state, phase, None) {
            self.claim(me, seat);
            return;
        }
        if phase.kind != PhaseKind::PartnerChoice || phase.race_step >= LATE_CLAIM_STEP {
            if let Some(seat) = self.pick_free_seat(state, me, phase) {
                self.claim(me, seat);
            }
        }
    }

    /// Whether the claimed seat can still be boarded.
    fn claim_valid(state: &WorldState, me: PlayerId, seat: SeatRef, phase: Phase) -> bool {
        let boat = &state.boats[seat.boat];
        boat.docked == Some(phase.departure()) && boat.seats[seat.seat].is_none_or(|p| p == me)
    }

    fn approach(&mut self, state: &WorldState, me: PlayerId, phase: Phase) -> Action {
        let mut claim = self.board.borrow().claims[me];
        if let Some(seat) = claim {
            if !Self::claim_valid(state, me, seat, phase) {
                self.board.borrow_mut().claims[me] = None;
                claim = None;
            }
        }
        if claim.is_none() {
            self.decide_claim(state, me, phase);
            claim = self.board.borrow().claims[me];
        }
        let pos = state.players[me].position;
        let bounds = (state.map.height, state.map.width);
        let departure = phase.departure();
        let Some(seat) = claim else {
            // Waiting: keep off the queue cells.
            let queues: Vec<Pos> = state.map.lanes.iter().flatten().map(|l| l.queue[departure.index()]).collect();
            if !queues.contains(&pos) {
                return Action::Noop;
            }
            let walk = self.walkable(state, me, queues.clone());
            return navigate_to_nearest(bounds, walk, |p| !queues.contains(&p), pos)
                .map(|(a, _)| a)
                .unwrap_or_default();
        };
        let goal =
            if phase.kind == PhaseKind::Rowing { state.seat_pos(seat) } else { Self::queue_cell(state, seat, phase) };
        if pos == goal {
            self.stuck = 0;
            self.last_pos = Some(pos);
            return Action::Noop;
        }
        let others: Vec<Pos> = {
            let b = self.board.borrow();
            b.claims
                .iter()
                .enumerate()
                .filter(|(p, c)| *p != me && c.is_some())
                .map(|(_, c)| Self::queue_cell(state, c.unwrap(), phase))
                .filter(|&q| q != goal)
                .collect()
        };
        let action = self.step_towards(state, me, goal, others);
        if self.last_pos == Some(pos) {
            self.stuck += 1;
        } else {
            self.stuck = 0;
        }
        self.last_pos = Some(pos);
        let blocked = state.occupant(goal).is_some_and(|o| o != me);
        if self.stuck >= RETARGET_AFTER && blocked {
            self.stuck = 0;
            self.board.borrow_mut().claims[me] = None;
            if let Some(s) = self.pick_free_seat(state, me, phase).filter(|&s| s != seat) {
                self.claim(me, s);
            }
        }
        action
    }

    fn choose_action(&mut self, state: &WorldState, me: PlayerId, phase: Phase) -> Action {
        let player = &state.players[me];
        if player.seated_in.is_some() {
            return self.row(state, me);
        }
        if player.crossed {
            return self.forage(state, me);
        }
        self.approach(state, me, phase)
    }

    fn observe_rowing(&mut self, state: &WorldState, player: PlayerId, rowing: Option<Rowing>) {
        let Some(r) = rowing else { return };
        let badge = state.players[player].badge;
        let entry = self.ledger.entry(badge);
        let obs = &mut self.race_obs[player];
        match r {
            Rowing::Paddle => {
                entry.paddles += 1;
                obs.0 += 1;
            }
            Rowing::Flail => {
                entry.flails += 1;
                obs.1 += 1;
            }
        }
    }
}

impl Controller for ScriptedBot {
    fn act(&mut self, state: &WorldState, me: PlayerId) -> Action {
        let phase = state.phase();
        self.sync_race(phase.race);
        self.crews_before = std::array::from_fn(|b| match state.boats[b].seats {
            [Some(x), Some(y)] => Some([x, y]),
            _ => None,
        });
        let action = self.choose_action(state, me, phase);
        self.seen_at = std::array::from_fn(|i| Some(state.players[i].position));
        action
    }

    fn after_step(&mut self, state: &WorldState, me: PlayerId, outcome: &StepOutcome) {
        if state.players[me].disqualified {
            return;
        }
        for e in &outcome.events {
            if let Event::PairFormed { players, .. } = e {
                if let Some(&partner) = players.iter().find(|&&p| p != me).filter(|_| players.contains(&me)) {
                    let badge = state.players[partner].badge;
                    self.ledger.entry(badge).races_shared += 1;
                    self.ledger.last_partner = Some(badge);
                }
            }
        }
        let aware = matches!(self.spec.choice, PartnerChoiceMode::AwareReciprocator(_));
        for b in 0..BOATS {
            let Some(crew) = self.crews_before[b] else {
                self.windows[b] = Window::default();
                continue;
            };
            if crew.contains(&me) {
                let partner = if crew[0] == me { crew[1] } else { crew[0] };
                self.observe_rowing(state, partner, state.last_rowing[partner]);
                continue;
            }
            if !aware {
                continue;
            }
            match self.fidelity {
                AwareFidelity::Privileged => {
                    for p in crew {
                        self.observe_rowing(state, p, state.last_rowing[p]);
                    }
                }
                AwareFidelity::Inferred => {
                    let finished =
                        outcome.events.iter().any(|e| matches!(e, Event::RaceFinished { boat, .. } if *boat == b));
                    let moved = outcome.events.iter().any(|e| matches!(e, Event::BoatMoved { boat, .. } if *boat == b));
                    let w = &mut self.windows[b];
                    if w.crew != Some(crew) {
                        *w = Window { crew: Some(crew), ..Window::default() };
                    }
                    w.steps += 1;
                    w.moves += moved as u32;
                    if finished {
                        self.windows[b] = Window::default();
                    } else if w.steps == 3 {
                        let verdict = if w.moves == 1 { Rowing::Paddle } else { Rowing::Flail };
                        self.windows[b] = Window { crew: Some(crew), ..Window::default() };
                        for p in crew {
                            self.observe_rowing(state, p, Some(verdict));
                        }
                    }
                }
            }
        }
    }
}

/// One controller per spec, sharing a claims board. Bot `i` draws from the
/// stream `derive_seed(seed, i)`.
pub fn make_controllers(specs: &[BotSpec], fidelity: AwareFidelity, seed: u64) -> Vec<Box<dyn Controller>> {
    let board: SharedBoard = Rc::new(RefCell::new(ClaimsBoard::default()));
    let truth: Vec<RowingType> = specs.iter().map(|s| s.rowing).collect();
    specs
        .iter()
        .enumerate()
        .map(|(i, &spec)| {
            Box::new(ScriptedBot::new(spec, fidelity, truth.clone(), board.clone(), derive_seed(seed, i as u64)))
                as Box<dyn Controller>
        })
        .collect()
}
