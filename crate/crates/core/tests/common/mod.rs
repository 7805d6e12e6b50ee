#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stagmix_core::agents::navigate;
use stagmix_core::boatrace::{
    Action, EnvConfig, FlailRule, GridMap, PhaseKind, PlayerId, Pos, SeatRef, Side, WorldState, PLAYERS,
};
use stagmix_core::Color;

pub const COLORS: [Color; PLAYERS] =
    [Color::Purple, Color::Teal, Color::Purple, Color::Teal, Color::Purple, Color::Teal];

/// Default map with `extra` additional water rows, for crossings longer
/// than the default river.
pub fn tall_map(extra: usize) -> GridMap {
    let mut rows: Vec<String> = stagmix_core::boatrace::DEFAULT_MAP.lines().map(str::to_owned).collect();
    let water = format!("X{}X", "~".repeat(rows[0].len() - 2));
    for _ in 0..extra {
        rows.insert(8, water.clone());
    }
    GridMap::parse(&rows.join("\n")).unwrap()
}

/// Walks the listed players to the queue cells of their seats during the
/// first partner-choice phase and boards them as soon as rowing starts.
/// Everyone else idles. Returns the state right after the last boarding.
pub fn seated_world(config: &EnvConfig, crew: &[(PlayerId, SeatRef)]) -> WorldState {
    let mut state = WorldState::reset(config, &COLORS).unwrap();
    let departure = state.phase().departure().index();
    let bounds = (state.map.height, state.map.width);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    loop {
        let phase = state.phase();
        let mut actions = [Action::Noop; PLAYERS];
        let mut all_seated = true;
        for &(id, seat) in crew {
            let me = &state.players[id];
            if me.seated_in.is_some() {
                continue;
            }
            all_seated = false;
            let lane = &state.map.lanes[seat.boat][seat.seat];
            let goal = if phase.kind == PhaseKind::Rowing { state.seat_pos(seat) } else { lane.queue[departure] };
            let s = &state;
            let taken: Vec<_> =
                crew.iter().filter(|c| c.0 != id).map(|c| s.map.lanes[c.1.boat][c.1.seat].queue[departure]).collect();
            let idle = |p: Pos| s.occupant(p).is_some_and(|o| !crew.iter().any(|c| c.0 == o));
            let open = |p| p == goal || (s.passable(p) && !taken.contains(&p) && !idle(p));
            let direct = navigate(bounds, open, me.position, goal);
            let blocked = direct.movement().is_some_and(|d| s.occupant(me.position.offset(d)).is_some());
            actions[id] = if !blocked {
                direct
            } else if rng.random_bool(0.5) {
                navigate(bounds, |p| open(p) && s.occupant(p).is_none_or(|o| o == id), me.position, goal)
            } else {
                Action::Noop
            };
        }
        if all_seated {
            return state;
        }
        assert!(
            phase.race == 0,
            "crew failed to board in the first race: {:?}",
            state.players.iter().map(|p| p.position).collect::<Vec<_>>()
        );
        state.step(&actions).unwrap();
    }
}

pub fn seat(boat: usize, seat: usize) -> SeatRef {
    SeatRef { boat, seat }
}

/// Steps with `actions` for the listed players and no-ops for the rest.
pub fn step_with(state: &mut WorldState, moves: &[(PlayerId, Action)]) -> stagmix_core::boatrace::StepOutcome {
    let mut actions = [Action::Noop; PLAYERS];
    for &(id, a) in moves {
        actions[id] = a;
    }
    state.step(&actions).unwrap()
}

/// Boat moves and rowing boat-steps, over boats crewed by two flailers,
/// until at least `min_samples` boat-steps are collected.
pub fn flail_move_rate(rule: FlailRule, min_samples: u64) -> (u64, u64) {
    let (mut samples, mut moves) = (0u64, 0u64);
    let crew = [(0, seat(0, 0)), (1, seat(0, 1)), (2, seat(1, 0)), (3, seat(1, 1)), (4, seat(2, 0)), (5, seat(2, 1))];
    let mut seed = 0;
    while samples < min_samples {
        let config = EnvConfig { flail_rule: rule, seed, ..EnvConfig::default() };
        seed += 1;
        let mut state = seated_world(&config, &crew);
        while state.boats.iter().any(|b| b.docked != Some(Side::North)) && state.phase().race == 0 {
            let rowing: Vec<bool> = state.boats.iter().map(|b| b.docked != Some(Side::North)).collect();
            let before: Vec<i32> = state.boats.iter().map(|b| b.row).collect();
            let flails: Vec<_> = (0..6).map(|id| (id, Action::Flail)).collect();
            step_with(&mut state, &flails);
            for b in 0..3 {
                if rowing[b] {
                    samples += 1;
                    moves += (state.boats[b].row != before[b]) as u64;
                }
            }
        }
    }
    (moves, samples)
}
