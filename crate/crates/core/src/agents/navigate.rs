//! Breadth-first path finding on the grid.

use crate::boatrace::{Action, Direction, Pos};
use std::collections::VecDeque;

const UNSEEN: u32 = u32::MAX;

/// Grid distances to `to` over cells accepted by `walkable` (the target and
/// `from` are always accepted). Indexed row-major; `UNSEEN` when unreachable.
fn distances_to<F: Fn(Pos) -> bool>(bounds: (i32, i32), walkable: &F, from: Pos, to: Pos) -> Vec<u32> {
    let (height, width) = bounds;
    let idx = |p: Pos| (p.row * width + p.col) as usize;
    let inside = |p: Pos| p.row >= 0 && p.col >= 0 && p.row < height && p.col < width;
    let mut dist = vec![UNSEEN; (width * height) as usize];
    if !inside(to) {
        return dist;
    }
    dist[idx(to)] = 0;
    let mut queue = VecDeque::from([to]);
    while let Some(p) = queue.pop_front() {
        if p == from {
            break;
        }
        let d = dist[idx(p)];
        for dir in Direction::ALL {
            let n = p.offset(dir);
            if inside(n) && dist[idx(n)] == UNSEEN && (n == from || walkable(n)) {
                dist[idx(n)] = d + 1;
                queue.push_back(n);
            }
        }
    }
    dist
}

/// First move of a shortest path from `from` to `to`. Among equally short
/// paths the first step is chosen in the order north, east, south, west.
/// Returns `Noop` when already there or when `to` is unreachable.
///
/// `bounds` is `(height, width)`; `walkable` decides which intermediate
/// cells may be crossed.
pub fn navigate<F: Fn(Pos) -> bool>(bounds: (i32, i32), walkable: F, from: Pos, to: Pos) -> Action {
    if from == to {
        return Action::Noop;
    }
    let dist = distances_to(bounds, &walkable, from, to);
    let width = bounds.1;
    let at = |p: Pos| dist[(p.row * width + p.col) as usize];
    let inside = |p: Pos| p.row >= 0 && p.col >= 0 && p.row < bounds.0 && p.col < width;
    if !inside(from) || at(from) == UNSEEN {
        return Action::Noop;
    }
    let here = at(from);
    Direction::ALL
        .into_iter()
        .find(|&d| {
            let n = from.offset(d);
            inside(n) && at(n) != UNSEEN && at(n) + 1 == here
        })
        .map(Action::step)
        .unwrap_or(Action::Noop)
}

/// First move towards the nearest cell satisfying `goal`, with its
/// position. Neighbors are expanded north, east, south, west.
pub fn navigate_to_nearest<F, G>(bounds: (i32, i32), walkable: F, goal: G, from: Pos) -> Option<(Action, Pos)>
where
    F: Fn(Pos) -> bool,
    G: Fn(Pos) -> bool,
{
    let (height, width) = bounds;
    let idx = |p: Pos| (p.row * width + p.col) as usize;
    let inside = |p: Pos| p.row >= 0 && p.col >= 0 && p.row < height && p.col < width;
    if !inside(from) {
        return None;
    }
    if goal(from) {
        return Some((Action::Noop, from));
    }
    let mut first: Vec<Option<Direction>> = vec![None; (width * height) as usize];
    let mut seen = vec![false; (width * height) as usize];
    seen[idx(from)] = true;
    let mut queue = VecDeque::new();
    for d in Direction::ALL {
        let n = from.offset(d);
        if inside(n) && walkable(n) && !seen[idx(n)] {
            seen[idx(n)] = true;
            first[idx(n)] = Some(d);
            queue.push_back(n);
        }
    }
    while let Some(p) = queue.pop_front() {
        if goal(p) {
            return first[idx(p)].map(|d| (Action::step(d), p));
        }
        for d in Direction::ALL {
            let n = p.offset(d);
            if inside(n) && walkable(n) && !seen[idx(n)] {
                seen[idx(n)] = true;
                first[idx(n)] = first[idx(p)];
                queue.push_back(n);
            }
        }
    }
    None
}
