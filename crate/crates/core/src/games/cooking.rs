//! CookingWorld: read the cookbook, gather and prepare ingredients, then
//! prepare and eat the meal.

use std::fmt::Write;

use crate::library::{library, LibraryEntry};
use crate::mapgen::{generate_map_with, instantiate_rooms, ConnectionPreferenceTable, MapRequest};
use crate::rng::SplitMix64;
use crate::variation::{EpisodeError, EpisodeRng, Fold, Params, STREAM_DISTRACTORS, STREAM_MAP, STREAM_TASK};
use crate::world::{CookState, CutState, LocId, ObjId, Parent, RoomKind, WorldState};

use super::Task;

/// Preparation pairs that never appear in training recipes.
pub const HELD_OUT_PREPARATIONS: [(CutState, CookState); 3] = [
    (CutState::Diced, CookState::Barbequed),
    (CutState::Sliced, CookState::Roasted),
    (CutState::Chopped, CookState::Fried),
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecipeIngredient {
    pub object: ObjId,
    pub name: &'static str,
    pub cut: Option<CutState>,
    pub cook: Option<CookState>,
}

impl RecipeIngredient {
    pub fn is_satisfied_by(&self, cut: CutState, cook: CookState) -> bool {
        cut == self.cut.unwrap_or(CutState::Raw) && cook == self.cook.unwrap_or(CookState::Raw)
    }

    pub fn preparation(&self) -> (CutState, CookState) {
        (self.cut.unwrap_or(CutState::Raw), self.cook.unwrap_or(CookState::Raw))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecipeTask {
    pub ingredients: Vec<RecipeIngredient>,
    pub distractors: Vec<ObjId>,
    pub kitchen: LocId,
}

impl RecipeTask {
    /// The cookbook's text.
    pub fn text(&self) -> String {
        let mut s = String::from(
            "Gather all following ingredients and follow the directions to prepare this tasty meal.\n\nIngredients:\n",
        );
        let n = self.ingredients.len();
        for (i, ing) in self.ingredients.iter().enumerate() {
            let _ = writeln!(s, "  {}{}", ing.name, if i + 1 == n { "." } else { "," });
        }
        s.push_str("\nDirections:\n");
        for ing in &self.ingredients {
            if let Some(verb) = ing.cut.and_then(CutState::verb) {
                let _ = writeln!(s, "  {verb} the {},", ing.name);
            }
            if let Some(verb) = ing.cook.and_then(CookState::verb) {
                let _ = writeln!(s, "  {verb} the {},", ing.name);
            }
        }
        s.push_str("  prepare meal.");
        s
    }
}

fn place_in_canonical(world: &mut WorldState, rng: &mut SplitMix64, entry: &'static LibraryEntry) -> ObjId {
    let spots: Vec<ObjId> = entry.canonical_locations.iter().filter_map(|n| world.find_object(n)).collect();
    let id = world.spawn(entry);
    // Every ingredient lists at least one kitchen container, so this only
    // falls back to the kitchen floor for hand-edited catalogs.
    let parent = match rng.choose(&spots) {
        Some(&c) => Parent::Object(c),
        None => Parent::Location(LocId(0)),
    };
    world.move_to(id, parent);
    id
}

fn choose_preparation(rng: &mut SplitMix64, entry: &LibraryEntry, fold: Fold, has_barbeque: bool) -> (Option<CutState>, Option<CookState>) {
    let mut cuts = vec![None];
    if entry.flags.cuttable {
        cuts.extend([Some(CutState::Chopped), Some(CutState::Sliced), Some(CutState::Diced)]);
    }
    let mut cooks = Vec::new();
    // Ingredients labelled raw are never eaten that way.
    if !entry.flags.raw_label {
        cooks.push(None);
    }
    if entry.flags.cookable {
        cooks.extend([Some(CookState::Fried), Some(CookState::Roasted)]);
        if has_barbeque {
            cooks.push(Some(CookState::Barbequed));
        }
    }
    if cooks.is_empty() {
        cooks.push(None);
    }
    loop {
        let cut = *rng.choose(&cuts).expect("non-empty");
        let cook = *rng.choose(&cooks).expect("non-empty");
        let pair = (cut.unwrap_or(CutState::Raw), cook.unwrap_or(CookState::Raw));
        if fold != Fold::Train || !HELD_OUT_PREPARATIONS.contains(&pair) {
            return (cut, cook);
        }
    }
}

pub fn generate_cooking(rng: &EpisodeRng, fold: Fold, params: &Params) -> Result<(WorldState, Task), EpisodeError> {
    let lib = library();
    let mut map_rng = rng.stream(STREAM_MAP);
    let req = MapRequest {
        num_locations: params.num_locations,
        pool: &RoomKind::ALL,
        first: Some(RoomKind::Kitchen),
        with_doors: params.with_doors,
    };
    let layout = generate_map_with(&mut map_rng, &ConnectionPreferenceTable::household(), &req)?;
    let mut world = instantiate_rooms(&layout, lib, &mut map_rng)?;
    let kitchen = LocId(layout.start as u32);

    let counter = world.find_object("counter").expect("kitchen has a counter");
    let drawer = world.find_object("cutlery drawer").expect("kitchen has a cutlery drawer");
    let cookbook = world.spawn(lib.expect("cookbook"));
    world.move_to(cookbook, Parent::Object(counter));
    let knife = world.spawn(lib.expect("knife"));
    world.move_to(knife, Parent::Object(drawer));

    let pool: Vec<&'static LibraryEntry> = lib.ingredients(fold).collect();
    let needed = params.num_ingredients + params.num_distractors;
    if pool.len() < needed {
        return Err(EpisodeError::PoolExhausted { fold, needed, available: pool.len() });
    }
    let has_barbeque = world.find_object("barbeque").is_some();
    let mut task_rng = rng.stream(STREAM_TASK);
    let mut order: Vec<usize> = (0..pool.len()).collect();
    task_rng.shuffle(&mut order);
    let (chosen, rest) = order.split_at(params.num_ingredients);
    let mut ingredients = Vec::with_capacity(chosen.len());
    for &i in chosen {
        let entry = pool[i];
        let (cut, cook) = choose_preparation(&mut task_rng, entry, fold, has_barbeque);
        let object = place_in_canonical(&mut world, &mut task_rng, entry);
        ingredients.push(RecipeIngredient { object, name: entry.name, cut, cook });
    }

    let mut d_rng = rng.stream(STREAM_DISTRACTORS);
    let mut rest = rest.to_vec();
    rest.sort_unstable();
    d_rng.shuffle(&mut rest);
    let distractors = rest[..params.num_distractors]
        .iter()
        .map(|&i| place_in_canonical(&mut world, &mut d_rng, pool[i]))
        .collect();

    Ok((world, Task::Cooking(RecipeTask { ingredients, distractors, kitchen })))
}
