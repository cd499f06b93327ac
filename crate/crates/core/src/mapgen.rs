//! Random connected room layouts on a 7x7 grid.
//!
//! Rooms are placed one at a time. The first goes to the grid centre; each
//! later room attaches to a free cell beside an already placed room, with
//! the attachment drawn in proportion to how much the two room kinds like
//! being neighbours (preferred 10, neutral 1, forbidden 0). Afterwards every
//! grid adjacency between placed rooms becomes an edge unless the pair is
//! forbidden. Since each room attaches through a non-forbidden neighbour the
//! edge graph is connected by construction.

use std::fmt::Write;

use crate::library::ObjectLibrary;
use crate::rng::SplitMix64;
use crate::world::{Direction, LocId, RoomKind, WorldState};

pub const GRID: usize = 7;
pub const MAX_LOCATIONS: usize = 11;
pub const MAX_ATTEMPTS: usize = 100;

pub const WEIGHT_PREFERRED: u32 = 10;
pub const WEIGHT_NEUTRAL: u32 = 1;
pub const WEIGHT_FORBIDDEN: u32 = 0;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapError {
    #[error("number of locations must be between 1 and {MAX_LOCATIONS}, got {0}")]
    LocationCount(usize),
    #[error("room kind pool cannot supply {needed} distinct rooms")]
    PoolTooSmall { needed: usize },
    #[error("no feasible placement found after {MAX_ATTEMPTS} attempts")]
    RetriesExhausted,
    #[error("unknown room kind {0:?}")]
    UnknownRoomKind(String),
    #[error("layout needs {0} doors but the catalog has fewer door names")]
    DoorNamesExhausted(usize),
}

/// Which room kinds like or refuse to be neighbours. Both relations are
/// symmetric.
#[derive(Debug, Clone)]
pub struct ConnectionPreferenceTable {
    prefers: [u16; 11],
    forbids: [u16; 11],
}

impl ConnectionPreferenceTable {
    pub fn household() -> Self {
        use RoomKind::*;
        let mut t = Self { prefers: [0; 11], forbids: [0; 11] };
        for (a, b) in [
            (Pantry, Kitchen),
            (Kitchen, Backyard),
            (Kitchen, Corridor),
            (Kitchen, LivingRoom),
            (Corridor, Bedroom),
            (Corridor, Bathroom),
            (Corridor, LivingRoom),
            (Corridor, LaundryRoom),
            (Bedroom, Bathroom),
            (Backyard, Driveway),
            (Backyard, LaundryRoom),
            (Driveway, Street),
            (Street, Supermarket),
        ] {
            t.prefer(a, b);
        }
        for (a, b) in [
            (Pantry, Bedroom),
            (Pantry, Bathroom),
            (Pantry, Street),
            (Pantry, Driveway),
            (Kitchen, Supermarket),
            (Kitchen, Bathroom),
            (Kitchen, Street),
            (Backyard, Bedroom),
            (Backyard, Bathroom),
            (Bedroom, Street),
            (Bedroom, Driveway),
            (Bathroom, Street),
            (Bathroom, Driveway),
            (LaundryRoom, Street),
        ] {
            t.forbid(a, b);
        }
        // The supermarket only opens onto the street or a corridor.
        for k in RoomKind::ALL {
            if !matches!(k, Street | Corridor | Supermarket) {
                t.forbid(Supermarket, k);
            }
        }
        t
    }

    pub fn prefer(&mut self, a: RoomKind, b: RoomKind) {
        self.prefers[a.index()] |= 1 << b.index();
        self.prefers[b.index()] |= 1 << a.index();
    }

    pub fn forbid(&mut self, a: RoomKind, b: RoomKind) {
        self.forbids[a.index()] |= 1 << b.index();
        self.forbids[b.index()] |= 1 << a.index();
    }

    pub fn prefers(&self, a: RoomKind, b: RoomKind) -> bool {
        self.prefers[a.index()] & (1 << b.index()) != 0
    }

    pub fn forbids(&self, a: RoomKind, b: RoomKind) -> bool {
        self.forbids[a.index()] & (1 << b.index()) != 0
    }

    pub fn weight(&self, a: RoomKind, b: RoomKind) -> u32 {
        if self.forbids(a, b) {
            WEIGHT_FORBIDDEN
        } else if self.prefers(a, b) {
            WEIGHT_PREFERRED
        } else {
            WEIGHT_NEUTRAL
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlacedRoom {
    pub kind: RoomKind,
    pub row: u8,
    pub col: u8,
}

/// Undirected edge; `dir` points from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapEdge {
    pub a: usize,
    pub b: usize,
    pub dir: Direction,
    pub door: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapLayout {
    /// Rooms in placement order; a room's index is its location id.
    pub cells: Vec<PlacedRoom>,
    pub edges: Vec<MapEdge>,
    pub start: usize,
}

/// What to place: how many rooms, drawn from which kinds, optionally with a
/// fixed first room.
#[derive(Debug, Clone)]
pub struct MapRequest<'a> {
    pub num_locations: usize,
    pub pool: &'a [RoomKind],
    pub first: Option<RoomKind>,
    pub with_doors: bool,
}

/// Lays out `num_locations` rooms drawn from the full roster.
pub fn generate_map(rng: &mut SplitMix64, num_locations: usize, with_doors: bool) -> Result<MapLayout, MapError> {
    generate_map_with(
        rng,
        &ConnectionPreferenceTable::household(),
        &MapRequest { num_locations, pool: &RoomKind::ALL, first: None, with_doors },
    )
}

pub fn generate_map_with(
    rng: &mut SplitMix64,
    prefs: &ConnectionPreferenceTable,
    req: &MapRequest<'_>,
) -> Result<MapLayout, MapError> {
    let n = req.num_locations;
    if !(1..=MAX_LOCATIONS).contains(&n) {
        return Err(MapError::LocationCount(n));
    }
    let mut pool: Vec<RoomKind> = req.pool.to_vec();
    pool.sort();
    pool.dedup();
    if let Some(first) = req.first {
        pool.retain(|&k| k != first);
    }
    let available = pool.len() + usize::from(req.first.is_some());
    if available < n {
        return Err(MapError::PoolTooSmall { needed: n });
    }
    for _ in 0..MAX_ATTEMPTS {
        if let Some(mut layout) = attempt(rng, prefs, req, &mut pool) {
            if req.with_doors {
                for e in &mut layout.edges {
                    e.door = rng.chance(1, 2);
                }
            }
            return Ok(layout);
        }
    }
    Err(MapError::RetriesExhausted)
}

fn attempt(
    rng: &mut SplitMix64,
    prefs: &ConnectionPreferenceTable,
    req: &MapRequest<'_>,
    pool: &mut [RoomKind],
) -> Option<MapLayout> {
    let n = req.num_locations;
    rng.shuffle(pool);
    let (first, rest) = match req.first {
        Some(k) => (k, &pool[..n - 1]),
        None => (pool[0], &pool[1..n]),
    };
    let mut grid = [[usize::MAX; GRID]; GRID];
    let centre = (GRID / 2) as u8;
    let mut cells = vec![PlacedRoom { kind: first, row: centre, col: centre }];
    grid[centre as usize][centre as usize] = 0;
    let mut unplaced: Vec<RoomKind> = rest.to_vec();

    let free_neighbour = |grid: &[[usize; GRID]; GRID], r: u8, c: u8, d: Direction| -> Option<(u8, u8)> {
        let (dr, dc) = d.offset();
        let (nr, nc) = (i32::from(r) + dr, i32::from(c) + dc);
        if (0..GRID as i32).contains(&nr) && (0..GRID as i32).contains(&nc) && grid[nr as usize][nc as usize] == usize::MAX
        {
            Some((nr as u8, nc as u8))
        } else {
            None
        }
    };

    let mut attachments: Vec<(u8, u8)> = Vec::new();
    let mut weights: Vec<u32> = Vec::new();
    while !unplaced.is_empty() {
        let feasible: Vec<usize> = (0..unplaced.len())
            .filter(|&i| {
                cells.iter().any(|p| {
                    prefs.weight(unplaced[i], p.kind) > 0
                        && Direction::ALL.iter().any(|&d| free_neighbour(&grid, p.row, p.col, d).is_some())
                })
            })
            .collect();
        if feasible.is_empty() {
            return None;
        }
        let kind = unplaced.remove(feasible[rng.index(feasible.len())]);
        attachments.clear();
        weights.clear();
        for p in &cells {
            let w = prefs.weight(kind, p.kind);
            for d in Direction::ALL {
                if let Some(cell) = free_neighbour(&grid, p.row, p.col, d) {
                    attachments.push(cell);
                    weights.push(w);
                }
            }
        }
        let pick = rng.weighted(&weights)?;
        let (r, c) = attachments[pick];
        grid[r as usize][c as usize] = cells.len();
        cells.push(PlacedRoom { kind, row: r, col: c });
    }

    let mut edges = Vec::new();
    for (i, p) in cells.iter().enumerate() {
        for d in Direction::ALL {
            let (dr, dc) = d.offset();
            let (nr, nc) = (i32::from(p.row) + dr, i32::from(p.col) + dc);
            if !(0..GRID as i32).contains(&nr) || !(0..GRID as i32).contains(&nc) {
                continue;
            }
            let j = grid[nr as usize][nc as usize];
            if j != usize::MAX && j > i && !prefs.forbids(p.kind, cells[j].kind) {
                edges.push(MapEdge { a: i, b: j, dir: d, door: false });
            }
        }
    }
    Some(MapLayout { cells, edges, start: 0 })
}

impl MapLayout {
    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter_map(move |e| {
            if e.a == i {
                Some(e.b)
            } else if e.b == i {
                Some(e.a)
            } else {
                None
            }
        })
    }

    /// Breadth-first distances (in edges) from `from`; `usize::MAX` if unreachable.
    pub fn distances(&self, from: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.cells.len()];
        let mut queue = std::collections::VecDeque::from([from]);
        dist[from] = 0;
        while let Some(i) = queue.pop_front() {
            for j in self.neighbours(i) {
                if dist[j] == usize::MAX {
                    dist[j] = dist[i] + 1;
                    queue.push_back(j);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.distances(self.start).iter().all(|&d| d != usize::MAX)
    }

    pub fn index_of(&self, kind: RoomKind) -> Option<usize> {
        self.cells.iter().position(|c| c.kind == kind)
    }

    /// ASCII picture of the grid, for debugging only.
    pub fn ascii(&self) -> String {
        let mut art = vec![vec![' '; GRID * 4]; GRID * 2];
        for (i, c) in self.cells.iter().enumerate() {
            let (r, col) = (c.row as usize * 2, c.col as usize * 4);
            let label: Vec<char> = format!("{:<3}", &c.kind.name()[..3]).chars().collect();
            art[r][col..col + 3].copy_from_slice(&label[..3]);
            if i == self.start {
                art[r][col + 3] = '*';
            }
        }
        for e in &self.edges {
            let a = self.cells[e.a];
            let (r, c) = (a.row as usize * 2, a.col as usize * 4);
            let glyph = |open: char| if e.door { '#' } else { open };
            match e.dir {
                Direction::East => art[r][c + 3] = glyph('-'),
                Direction::West => art[r][c - 1] = glyph('-'),
                Direction::South => art[r + 1][c + 1] = glyph('|'),
                Direction::North => art[r - 1][c + 1] = glyph('|'),
            }
        }
        let mut out = String::new();
        for row in art {
            let line: String = row.into_iter().collect();
            let _ = writeln!(out, "{}", line.trim_end());
        }
        for (i, c) in self.cells.iter().enumerate() {
            let _ = writeln!(out, "{i}: {} at ({}, {})", c.kind, c.row, c.col);
        }
        out
    }
}

/// Builds the locations, their fixtures and the doors of a layout. Door
/// names are drawn from the catalog without repetition.
pub fn instantiate_rooms(
    layout: &MapLayout,
    library: &'static ObjectLibrary,
    rng: &mut SplitMix64,
) -> Result<WorldState, MapError> {
    let mut world = WorldState::new();
    for cell in &layout.cells {
        let loc = world.add_location(cell.kind);
        for entry in library.fixtures_for(cell.kind.name()) {
            let id = world.spawn(entry);
            world.move_to(id, crate::world::Parent::Location(loc));
        }
    }
    let mut doors: Vec<_> = library.doors().collect();
    let door_count = layout.edges.iter().filter(|e| e.door).count();
    if door_count > doors.len() {
        return Err(MapError::DoorNamesExhausted(door_count));
    }
    rng.shuffle(&mut doors);
    let mut next_door = doors.into_iter();
    for e in &layout.edges {
        let door = if e.door { Some(world.spawn(next_door.next().expect("counted above"))) } else { None };
        world.connect(LocId(e.a as u32), e.dir, LocId(e.b as u32), door);
    }
    world.agent_location = LocId(layout.start as u32);
    Ok(world)
}

/// Number of fixtures a room kind receives.
pub fn fixture_count(library: &ObjectLibrary, kind: RoomKind) -> usize {
    library.fixtures_for(kind.name()).count()
}
