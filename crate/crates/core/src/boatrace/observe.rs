//! Egocentric observation window and its RGB rendering.
//!
//! The window is 11×11 cells: 9 ahead of the player, 1 behind and 5 to each
//! side. Window row 0 is the farthest cell ahead, column 0 the leftmost; the
//! player itself sits at row 9, column 5.

use super::map::{Direction, Pos, Terrain};
use super::state::{Badge, PlayerId, SemaphoreColor, WorldState};
use super::EnvError;
use crate::game::Color;
use serde::Serialize;

pub const WINDOW: usize = 11;
pub const AHEAD: i32 = 9;
pub const BEHIND: i32 = 1;
pub const SIDE: i32 = 5;
pub const SPRITE: usize = 16;
pub const IMAGE: usize = WINDOW * SPRITE;

pub const PURPLE_RGB: [u8; 3] = [145, 30, 180];
pub const TEAL_RGB: [u8; 3] = [30, 180, 145];
const BADGE_OFF: [u8; 3] = [64, 64, 64];
const BADGE_ON: [u8; 3] = [255, 255, 255];
const BANK_RGB: [u8; 3] = [24, 24, 24];
const WALL_RGB: [u8; 3] = [90, 70, 50];
const WATER_RGB: [u8; 3] = [30, 80, 200];
const BARRIER_RGB: [u8; 3] = [128, 128, 128];
const OPAQUE_RGB: [u8; 3] = [60, 60, 60];
const BOAT_RGB: [u8; 3] = [120, 70, 30];
const APPLE_RGB: [u8; 3] = [40, 200, 60];

/// What a single window cell shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum CellTerrain {
    /// Nothing visible (disqualified viewer).
    #[default]
    Void,
    /// Outside the map.
    Opaque,
    Bank,
    Wall,
    Water,
    BarrierOpen,
    BarrierClosed,
    Semaphore(SemaphoreColor),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AvatarView {
    pub color: Color,
    pub badge: Badge,
    pub seated: bool,
    pub facing: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CellView {
    pub terrain: CellTerrain,
    pub apple: bool,
    /// Part of a boat (a seat cell).
    pub boat: bool,
    pub avatar: Option<AvatarView>,
}

pub type Window = [[CellView; WINDOW]; WINDOW];

/// Map cell shown at window position (`row`, `col`) for a player at `at`
/// facing `facing`.
pub fn window_cell(at: Pos, facing: Direction, row: usize, col: usize) -> Pos {
    let front = AHEAD - row as i32;
    let right = col as i32 - SIDE;
    let (fr, fc) = facing.delta();
    let (rr, rc) = facing.turn_right().delta();
    Pos::new(at.row + front * fr + right * rr, at.col + front * fc + right * rc)
}

pub fn observe(state: &WorldState, player: PlayerId) -> Result<Window, EnvError> {
    let me = state.player(player)?;
    let mut window = [[CellView::default(); WINDOW]; WINDOW];
    if me.disqualified {
        return Ok(window);
    }
    let semaphore = state.phase().semaphore();
    for (r, row) in window.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            let p = window_cell(me.position, me.orientation, r, c);
            *cell = describe(state, p, semaphore);
        }
    }
    Ok(window)
}

fn describe(state: &WorldState, p: Pos, semaphore: SemaphoreColor) -> CellView {
    if !state.map.in_bounds(p) {
        return CellView { terrain: CellTerrain::Opaque, ..CellView::default() };
    }
    let terrain = match state.map.terrain(p) {
        Terrain::Bank => CellTerrain::Bank,
        Terrain::Wall => CellTerrain::Wall,
        Terrain::Water => CellTerrain::Water,
        Terrain::Barrier if state.passable(p) => CellTerrain::BarrierOpen,
        Terrain::Barrier => CellTerrain::BarrierClosed,
        Terrain::Semaphore => CellTerrain::Semaphore(semaphore),
    };
    let avatar = state.occupant(p).map(|id| {
        let q = &state.players[id];
        AvatarView { color: q.color, badge: q.badge, seated: q.seated_in.is_some(), facing: q.orientation }
    });
    CellView {
        terrain,
        apple: state.river_apple_at(p) || state.bank_apple_at(p),
        boat: state.seat_at(p).is_some(),
        avatar,
    }
}

/// Row-major RGB image, `IMAGE × IMAGE × 3` bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Image {
    fn black(width: usize, height: usize) -> Self {
        Image { width, height, pixels: vec![0; width * height * 3] }
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    fn fill(&mut self, x0: usize, y0: usize, w: usize, h: usize, rgb: [u8; 3]) {
        for y in y0..y0 + h {
            for x in x0..x0 + w {
                let i = (y * self.width + x) * 3;
                self.pixels[i..i + 3].copy_from_slice(&rgb);
            }
        }
    }
}

pub fn avatar_rgb(color: Color) -> [u8; 3] {
    match color {
        Color::Purple => PURPLE_RGB,
        Color::Teal => TEAL_RGB,
    }
}

fn terrain_rgb(t: CellTerrain) -> Option<[u8; 3]> {
    Some(match t {
        CellTerrain::Void => return None,
        CellTerrain::Opaque => OPAQUE_RGB,
        CellTerrain::Bank | CellTerrain::BarrierOpen => BANK_RGB,
        CellTerrain::Wall => WALL_RGB,
        CellTerrain::Water => WATER_RGB,
        CellTerrain::BarrierClosed => BARRIER_RGB,
        CellTerrain::Semaphore(SemaphoreColor::Red) => [220, 30, 30],
        CellTerrain::Semaphore(SemaphoreColor::Yellow) => [230, 200, 30],
        CellTerrain::Semaphore(SemaphoreColor::Green) => [30, 200, 30],
    })
}

/// Draws one cell's sprite with its top-left corner at (`x0`, `y0`).
fn draw_sprite(img: &mut Image, x0: usize, y0: usize, cell: &CellView) {
    let Some(bg) = terrain_rgb(cell.terrain) else { return };
    img.fill(x0, y0, SPRITE, SPRITE, bg);
    if cell.boat {
        img.fill(x0, y0, SPRITE, SPRITE, BOAT_RGB);
    }
    if cell.apple {
        img.fill(x0 + 5, y0 + 5, 6, 6, APPLE_RGB);
    }
    if let Some(a) = cell.avatar {
        img.fill(x0 + 2, y0 + 2, SPRITE - 4, SPRITE - 4, avatar_rgb(a.color));
        let pattern = a.badge.pattern();
        for (dy, row) in pattern.iter().enumerate() {
            for (dx, &on) in row.iter().enumerate() {
                let rgb = if on { BADGE_ON } else { BADGE_OFF };
                img.fill(x0 + SPRITE / 2 - 1 + dx, y0 + SPRITE / 2 - 1 + dy, 1, 1, rgb);
            }
        }
    }
}

pub fn render_window(window: &Window) -> Image {
    let mut img = Image::black(IMAGE, IMAGE);
    for (r, row) in window.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            draw_sprite(&mut img, c * SPRITE, r * SPRITE, cell);
        }
    }
    img
}

/// The player's view as a 176×176 RGB image.
pub fn render_rgb(state: &WorldState, player: PlayerId) -> Result<Image, EnvError> {
    Ok(render_window(&observe(state, player)?))
}
