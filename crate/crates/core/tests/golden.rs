mod common;

use common::{GOLD, GOLDEN_SEED, RECIPE};
use textgym::games::GameKind;
use textgym::world::RoomKind;
use textgym::{make_episode, Difficulty, EpisodeConfig, Task};

fn golden() -> EpisodeConfig {
    EpisodeConfig::new(GameKind::CookingWorld, GOLDEN_SEED, Difficulty::Easy)
}

#[test]
fn episode_shape() {
    let ep = make_episode(&golden()).unwrap();
    let mut rooms: Vec<&str> = ep.world.locations.iter().map(|l| l.kind.name()).collect();
    rooms.sort_unstable();
    assert_eq!(rooms, ["backyard", "kitchen", "pantry"]);
    assert_eq!(ep.world.locations[ep.world.agent_location.index()].kind, RoomKind::Kitchen);
    let Task::Cooking(recipe) = &ep.task else { panic!("not a cooking task") };
    assert_eq!(recipe.ingredients.len(), 2);
    assert_eq!(recipe.distractors.len(), 2);
    assert_eq!(recipe.text(), RECIPE);
}

#[test]
fn pinned_gold_path() {
    let gold = make_episode(&golden()).unwrap().gold.unwrap();
    assert_eq!(gold, GOLD);
}

#[test]
fn transcript_reaches_game_completed() {
    let cmds: Vec<String> = GOLD.iter().map(|s| s.to_string()).collect();
    let t = common::transcript(&golden(), &cmds);
    assert!(t[0].observation.starts_with("You are in the kitchen."));
    assert!(t[0].observation.ends_with("To the South you see the backyard. To the West you see the pantry."));
    assert_eq!(t[1].observation, RECIPE);
    assert_eq!(t[2].observation, "You open the cutlery drawer. The cutlery drawer contains a knife.");
    assert!(t[4].observation.starts_with("You are in the backyard."));
    assert_eq!(t[9].observation, "You fry the yellow tomato with the stove.");
    assert_eq!(t[10].observation, "You roast the green beans with the oven.");
    assert_eq!(t[11].observation, "The meal has been added to your inventory.");
    let last = t.last().unwrap();
    assert!(last.observation.ends_with("Game completed."));
    assert!(last.succeeded && !last.failed);
    assert_eq!((last.raw_score, last.max_score), (6, 6));
    assert_eq!(last.normalized_score, 1.0);
    assert_eq!(last.step_count, 12);
    let raw: Vec<u32> = t.iter().map(|r| r.raw_score).collect();
    assert_eq!(raw, [0, 0, 0, 0, 0, 1, 2, 2, 2, 3, 4, 5, 6]);
}
