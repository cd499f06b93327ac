//! TextWorld Commonsense: put misplaced household objects where they belong.

use crate::library::{library, LibraryEntry};
use crate::mapgen::{generate_map_with, instantiate_rooms, ConnectionPreferenceTable, MapRequest};
use crate::variation::{Difficulty, EpisodeError, EpisodeRng, Fold, Params, STREAM_DISTRACTORS, STREAM_MAP, STREAM_TASK};
use crate::world::{LocId, ObjId, ObjectKind, Parent, RoomKind, WorldState};

use super::Task;

/// Rooms whose furniture can receive household objects.
pub const TWC_ROOMS: [RoomKind; 7] = [
    RoomKind::Kitchen,
    RoomKind::Backyard,
    RoomKind::Corridor,
    RoomKind::Bedroom,
    RoomKind::Bathroom,
    RoomKind::LivingRoom,
    RoomKind::LaundryRoom,
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwcTarget {
    pub object: ObjId,
    /// Fixtures in this world that count as tidy for the object.
    pub destinations: Vec<ObjId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwcTask {
    pub targets: Vec<TwcTarget>,
    pub difficulty: Difficulty,
}

/// (rooms, targets) for each difficulty.
pub fn shape(difficulty: Difficulty) -> (usize, usize) {
    match difficulty {
        Difficulty::Easy => (1, 1),
        Difficulty::Medium => (1, 3),
        Difficulty::Hard => (2, 7),
    }
}

fn destinations(world: &WorldState, entry: &LibraryEntry) -> Vec<ObjId> {
    entry.canonical_locations.iter().filter_map(|n| world.find_object(n)).collect()
}

pub fn generate_twc(rng: &EpisodeRng, fold: Fold, params: &Params) -> Result<(WorldState, Task), EpisodeError> {
    let lib = library();
    let (rooms, wanted) = shape(params.difficulty);
    let mut map_rng = rng.stream(STREAM_MAP);
    let req = MapRequest { num_locations: rooms, pool: &TWC_ROOMS, first: None, with_doors: params.with_doors };
    let layout = generate_map_with(&mut map_rng, &ConnectionPreferenceTable::household(), &req)?;
    let mut world = instantiate_rooms(&layout, lib, &mut map_rng)?;

    let mut candidates: Vec<&'static LibraryEntry> =
        lib.household(fold).filter(|e| !destinations(&world, e).is_empty()).collect();
    if candidates.len() < wanted {
        return Err(EpisodeError::PoolExhausted { fold, needed: wanted, available: candidates.len() });
    }
    let mut task_rng = rng.stream(STREAM_TASK);
    task_rng.shuffle(&mut candidates);
    let containers: Vec<ObjId> =
        world.objects.iter().filter(|o| o.kind == ObjectKind::Container).map(|o| o.id).collect();
    let mut targets = Vec::with_capacity(wanted);
    for entry in &candidates[..wanted] {
        let dests = destinations(&world, entry);
        // Out of place: a room's floor or any container that is not a destination.
        let mut spots: Vec<Parent> = (0..world.locations.len()).map(|l| Parent::Location(LocId(l as u32))).collect();
        spots.extend(containers.iter().filter(|c| !dests.contains(c)).map(|&c| Parent::Object(c)));
        let parent = spots[task_rng.index(spots.len())];
        let object = world.spawn(entry);
        world.move_to(object, parent);
        targets.push(TwcTarget { object, destinations: dests });
    }

    // Distractors are already tidy.
    let mut d_rng = rng.stream(STREAM_DISTRACTORS);
    let mut rest: Vec<&'static LibraryEntry> = candidates[wanted..].to_vec();
    rest.sort_unstable_by_key(|e| e.name);
    d_rng.shuffle(&mut rest);
    for entry in rest.into_iter().take(params.num_distractors) {
        let dests = destinations(&world, entry);
        let id = world.spawn(entry);
        world.move_to(id, Parent::Object(dests[d_rng.index(dests.len())]));
    }

    Ok((world, Task::Twc(TwcTask { targets, difficulty: params.difficulty })))
}
