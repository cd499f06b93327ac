//! Coin Collector: find the coin and pick it up.

use crate::library::{library, LibraryEntry};
use crate::mapgen::{generate_map, instantiate_rooms};
use crate::variation::{EpisodeError, EpisodeRng, Fold, Params, STREAM_DISTRACTORS, STREAM_MAP, STREAM_TASK};
use crate::world::{LocId, ObjId, ObjectKind, Parent, WorldState};

use super::Task;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoinTask {
    pub coin: ObjId,
    pub coin_location: LocId,
    pub num_distractors: usize,
}

pub fn generate_coin(rng: &EpisodeRng, fold: Fold, params: &Params) -> Result<(WorldState, Task), EpisodeError> {
    let lib = library();
    let mut map_rng = rng.stream(STREAM_MAP);
    let layout = generate_map(&mut map_rng, params.num_locations, params.with_doors)?;
    let mut world = instantiate_rooms(&layout, lib, &mut map_rng)?;

    let mut task_rng = rng.stream(STREAM_TASK);
    let n = world.locations.len();
    let coin_location = if n == 1 {
        LocId(layout.start as u32)
    } else {
        let others: Vec<usize> = (0..n).filter(|&i| i != layout.start).collect();
        LocId(others[task_rng.index(others.len())] as u32)
    };
    let coin = world.spawn(lib.expect("coin"));
    world.move_to(coin, Parent::Location(coin_location));

    let mut d_rng = rng.stream(STREAM_DISTRACTORS);
    let pool: Vec<&'static LibraryEntry> = lib.household(fold).collect();
    let containers: Vec<ObjId> =
        world.objects.iter().filter(|o| o.kind == ObjectKind::Container).map(|o| o.id).collect();
    let mut picks: Vec<usize> = (0..pool.len()).collect();
    d_rng.shuffle(&mut picks);
    for &i in picks.iter().take(params.num_distractors) {
        let slot = d_rng.index(n + containers.len());
        let parent =
            if slot < n { Parent::Location(LocId(slot as u32)) } else { Parent::Object(containers[slot - n]) };
        let id = world.spawn(pool[i]);
        world.move_to(id, parent);
    }

    Ok((world, Task::Coin(CoinTask { coin, coin_location, num_distractors: params.num_distractors })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::GameKind;
    use crate::variation::{derive_rng, Difficulty, EpisodeConfig};

    #[test]
    fn coin_is_top_level_and_away_from_start() {
        for seed in 0..100 {
            let c = EpisodeConfig::new(GameKind::CoinCollector, seed, Difficulty::Hard);
            let (w, t) = generate_coin(&derive_rng(&c), c.fold, &c.params).unwrap();
            w.check_invariants().unwrap();
            let Task::Coin(t) = t else { unreachable!() };
            assert_eq!(w.obj(t.coin).parent, Parent::Location(t.coin_location));
            assert_ne!(t.coin_location, w.agent_location);
            assert_eq!(w.objects.iter().filter(|o| o.kind == ObjectKind::Coin).count(), 1);
        }
    }

    #[test]
    fn single_room_puts_coin_at_start() {
        let mut c = EpisodeConfig::new(GameKind::CoinCollector, 4, Difficulty::Easy);
        c.params.num_locations = 1;
        let (w, t) = generate_coin(&derive_rng(&c), c.fold, &c.params).unwrap();
        let Task::Coin(t) = t else { unreachable!() };
        assert_eq!(t.coin_location, w.agent_location);
    }
}
