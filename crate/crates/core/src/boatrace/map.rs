//! ASCII map format and the static layout derived from it.
//!
//! Legend:
//!
//! | glyph | meaning |
//! |-------|---------|
//! | `.`   | bank |
//! | `X`   | wall (impassable) |
//! | `~`   | water |
//! | `#`   | barrier |
//! | `S`   | semaphore (impassable) |
//! | `B`   | boat seat, in the boats' starting dock row |
//! | `a`   | river apple spawn (water) |
//! | `A`   | bank apple spawn |
//! | `P`   | player spawn (bank) |
//!
//! The water rows must form one contiguous band that spans every column not
//! occupied by a wall. Boats are pairs of horizontally adjacent `B` cells on
//! the southern water row. Every seat column has a barrier directly north and
//! south of the band, and a walkable queue cell beyond each barrier.

use super::EnvError;
use serde::{Deserialize, Serialize};
use std::fmt;

/// The default layout, versioned with [`DEFAULT_MAP_VERSION`].
pub const DEFAULT_MAP: &str = include_str!("default_map.txt");
pub const DEFAULT_MAP_VERSION: u32 = 1;

pub const BOATS: usize = 3;
pub const SEATS_PER_BOAT: usize = 2;
pub const PLAYERS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pos {
    pub row: i32,
    pub col: i32,
}

impl Pos {
    pub const fn new(row: i32, col: i32) -> Self {
        Pos { row, col }
    }

    pub fn offset(self, d: Direction) -> Pos {
        let (dr, dc) = d.delta();
        Pos::new(self.row + dr, self.col + dc)
    }

    pub fn manhattan(self, other: Pos) -> i32 {
        (self.row - other.row).abs() + (self.col - other.col).abs()
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// Compass direction; also used for facing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    North,
    East,
    South,
    West,
}

impl Direction {
    /// Fixed order used for breadth-first tie-breaking.
    pub const ALL: [Direction; 4] = [Direction::North, Direction::East, Direction::South, Direction::West];

    pub fn delta(self) -> (i32, i32) {
        match self {
            Direction::North => (-1, 0),
            Direction::East => (0, 1),
            Direction::South => (1, 0),
            Direction::West => (0, -1),
        }
    }

    pub fn turn_left(self) -> Direction {
        match self {
            Direction::North => Direction::West,
            Direction::West => Direction::South,
            Direction::South => Direction::East,
            Direction::East => Direction::North,
        }
    }

    pub fn turn_right(self) -> Direction {
        match self {
            Direction::North => Direction::East,
            Direction::East => Direction::South,
            Direction::South => Direction::West,
            Direction::West => Direction::North,
        }
    }

    pub fn opposite(self) -> Direction {
        self.turn_left().turn_left()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Terrain {
    Bank,
    Wall,
    Water,
    Barrier,
    Semaphore,
}

/// River bank, also used for race direction (the bank being rowed to).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    North,
    South,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::North => Side::South,
            Side::South => Side::North,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::North => 0,
            Side::South => 1,
        }
    }

    /// Direction of travel when rowing towards this bank.
    pub fn heading(self) -> Direction {
        match self {
            Side::North => Direction::North,
            Side::South => Direction::South,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::North => "north",
            Side::South => "south",
        })
    }
}

/// Static layout of one seat column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeatLane {
    pub col: i32,
    /// Barrier cell per side, indexed by [`Side::index`].
    pub barrier: [Pos; 2],
    /// Walkable cell in front of each barrier.
    pub queue: [Pos; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMap {
    pub width: i32,
    pub height: i32,
    terrain: Vec<Terrain>,
    /// First and last water rows.
    pub water_rows: (i32, i32),
    /// Seat lanes per boat, boats ordered west to east, seats west to east.
    pub lanes: [[SeatLane; SEATS_PER_BOAT]; BOATS],
    pub river_apples: Vec<Pos>,
    /// Bank apple spawn points per side.
    pub bank_apples: [Vec<Pos>; 2],
    pub spawns: Vec<Pos>,
    /// Semaphore cells.
    pub semaphores: Vec<Pos>,
}

impl GridMap {
    pub fn default_map() -> GridMap {
        GridMap::parse(DEFAULT_MAP).expect("default map is valid")
    }

    pub fn from_file(path: &std::path::Path) -> Result<GridMap, EnvError> {
        let text = std::fs::read_to_string(path).map_err(|e| EnvError::BadMap(format!("{}: {e}", path.display())))?;
        GridMap::parse(&text)
    }

    pub fn parse(text: &str) -> Result<GridMap, EnvError> {
        let lines: Vec<&str> = text.lines().map(str::trim_end).filter(|l| !l.is_empty()).collect();
        if lines.is_empty() {
            return Err(EnvError::BadMap("empty map".into()));
        }
        let width = lines[0].chars().count();
        if lines.iter().any(|l| l.chars().count() != width) {
            return Err(EnvError::BadMap("rows differ in width".into()));
        }
        let height = lines.len();
        let mut terrain = Vec::with_capacity(width * height);
        let mut seats = Vec::new();
        let mut river_apples = Vec::new();
        let mut bank_apple_cells = Vec::new();
        let mut spawns = Vec::new();
        let mut semaphores = Vec::new();
        for (r, line) in lines.iter().enumerate() {
            for (c, ch) in line.chars().enumerate() {
                let p = Pos::new(r as i32, c as i32);
                let t = match ch {
                    '.' => Terrain::Bank,
                    'X' => Terrain::Wall,
                    '~' => Terrain::Water,
                    '#' => Terrain::Barrier,
                    'S' => {
                        semaphores.push(p);
                        Terrain::Semaphore
                    }
                    'B' => {
                        seats.push(p);
                        Terrain::Water
                    }
                    'a' => {
                        river_apples.push(p);
                        Terrain::Water
                    }
                    'A' => {
                        bank_apple_cells.push(p);
                        Terrain::Bank
                    }
                    'P' => {
                        spawns.push(p);
                        Terrain::Bank
                    }
                    other => return Err(EnvError::BadMap(format!("unknown glyph `{other}` at {p}"))),
                };
                terrain.push(t);
            }
        }
        let mut map = GridMap {
            width: width as i32,
            height: height as i32,
            terrain,
            water_rows: (0, 0),
            lanes: [[SeatLane { col: 0, barrier: [Pos::new(0, 0); 2], queue: [Pos::new(0, 0); 2] }; 2]; 3],
            river_apples,
            bank_apples: [Vec::new(), Vec::new()],
            spawns,
            semaphores,
        };
        map.water_rows = map.find_water_band()?;
        let (top, bottom) = map.water_rows;
        for p in bank_apple_cells {
            let side = if p.row < top { Side::North } else { Side::South };
            map.bank_apples[side.index()].push(p);
        }
        if map.spawns.len() != PLAYERS {
            return Err(EnvError::BadMap(format!("expected {PLAYERS} spawn points, found {}", map.spawns.len())));
        }
        if map.spawns.iter().any(|p| p.row < bottom) {
            return Err(EnvError::BadMap("spawn points must be on the south bank".into()));
        }
        map.lanes = map.build_lanes(&seats)?;
        Ok(map)
    }

    fn find_water_band(&self) -> Result<(i32, i32), EnvError> {
        let water_row = |r: i32| (0..self.width).any(|c| self.terrain(Pos::new(r, c)) == Terrain::Water);
        let rows: Vec<i32> = (0..self.height).filter(|&r| water_row(r)).collect();
        let (Some(&top), Some(&bottom)) = (rows.first(), rows.last()) else {
            return Err(EnvError::BadMap("no water".into()));
        };
        if rows.len() as i32 != bottom - top + 1 {
            return Err(EnvError::BadMap("water rows are not contiguous".into()));
        }
        for r in top..=bottom {
            for c in 0..self.width {
                let t = self.terrain(Pos::new(r, c));
                if t != Terrain::Water && t != Terrain::Wall {
                    return Err(EnvError::BadMap(format!("river band broken at {}", Pos::new(r, c))));
                }
            }
        }
        Ok((top, bottom))
    }

    fn build_lanes(&self, seats: &[Pos]) -> Result<[[SeatLane; 2]; 3], EnvError> {
        let (top, bottom) = self.water_rows;
        if seats.len() != BOATS * SEATS_PER_BOAT {
            return Err(EnvError::BadMap(format!(
                "expected {} boat seats, found {}",
                BOATS * SEATS_PER_BOAT,
                seats.len()
            )));
        }
        if seats.iter().any(|s| s.row != bottom) {
            return Err(EnvError::BadMap("boat seats must lie on the southern water row".into()));
        }
        let mut cols: Vec<i32> = seats.iter().map(|s| s.col).collect();
        cols.sort_unstable();
        let mut lanes = Vec::new();
        for pair in cols.chunks(2) {
            if pair[1] != pair[0] + 1 {
                return Err(EnvError::BadMap(format!(
                    "seats at columns {} and {} do not form a boat",
                    pair[0], pair[1]
                )));
            }
            let mut boat = Vec::new();
            for &col in pair {
                let barrier = [Pos::new(top - 1, col), Pos::new(bottom + 1, col)];
                let queue = [Pos::new(top - 2, col), Pos::new(bottom + 2, col)];
                for b in barrier {
                    if !self.in_bounds(b) || self.terrain(b) != Terrain::Barrier {
                        return Err(EnvError::BadMap(format!("seat column {col} lacks a barrier at {b}")));
                    }
                }
                for q in queue {
                    if !self.in_bounds(q) || self.terrain(q) != Terrain::Bank {
                        return Err(EnvError::BadMap(format!("seat column {col} lacks a queue cell at {q}")));
                    }
                }
                boat.push(SeatLane { col, barrier, queue });
            }
            lanes.push([boat[0], boat[1]]);
        }
        // Every barrier must lead to a seat lane and nowhere else.
        for r in 0..self.height {
            for c in 0..self.width {
                let p = Pos::new(r, c);
                if self.terrain(p) == Terrain::Barrier && !cols.contains(&c) {
                    return Err(EnvError::BadMap(format!("barrier at {p} is not in a seat column")));
                }
            }
        }
        Ok([lanes[0], lanes[1], lanes[2]])
    }

    pub fn in_bounds(&self, p: Pos) -> bool {
        p.row >= 0 && p.col >= 0 && p.row < self.height && p.col < self.width
    }

    /// Terrain at an in-bounds position. Out-of-bounds reads as wall.
    pub fn terrain(&self, p: Pos) -> Terrain {
        if !self.in_bounds(p) {
            return Terrain::Wall;
        }
        self.terrain[(p.row * self.width + p.col) as usize]
    }

    /// Row of the dock on a side: the water row touching that bank.
    pub fn dock_row(&self, side: Side) -> i32 {
        match side {
            Side::North => self.water_rows.0,
            Side::South => self.water_rows.1,
        }
    }

    /// Number of cells a boat travels between the docks.
    pub fn crossing_distance(&self) -> i32 {
        self.water_rows.1 - self.water_rows.0
    }

    /// Which bank a land cell is on.
    pub fn side_of(&self, p: Pos) -> Side {
        if p.row < self.water_rows.0 {
            Side::North
        } else {
            Side::South
        }
    }
}
