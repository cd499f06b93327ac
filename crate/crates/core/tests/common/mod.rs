//! Oracles shared by the integration tests and the acceptance harness.

#![allow(dead_code)]

use std::sync::Arc;

use textgym::action::{execute, Args, BoundAction, SlotKind, TEMPLATES};
use textgym::games::GameKind;
use textgym::precrawl::{crawl_sampled, crawl_with, tree_from_bytes, tree_to_bytes, CrawlOptions, TreeCursor};
use textgym::rng::SplitMix64;
use textgym::session::{Mode, OnlineGame, Session, StepResult};
use textgym::world::{Direction, ObjId};
use textgym::{enumerate_valid_actions, make_episode, Difficulty, EpisodeConfig, Fold, Task, WorldState};

/// Easy CookingWorld seed whose episode has the classic three-room shape:
/// kitchen with the backyard to the south and the pantry to the west, both
/// ingredients in the backyard garden.
pub const GOLDEN_SEED: u64 = 40737;

pub const GOLD: [&str; 12] = [
    "read cookbook",
    "open cutlery drawer",
    "take knife",
    "move south",
    "take yellow tomato",
    "take green beans",
    "move north",
    "dice yellow tomato",
    "cook yellow tomato in stove",
    "cook green beans in oven",
    "prepare meal",
    "eat meal",
];

pub const RECIPE: &str = "Gather all following ingredients and follow the directions to prepare this tasty meal.

Ingredients:
  yellow tomato,
  green beans.

Directions:
  dice the yellow tomato,
  fry the yellow tomato,
  roast the green beans,
  prepare meal.";

pub const DIFFICULTIES: [Difficulty; 3] = [Difficulty::Easy, Difficulty::Medium, Difficulty::Hard];

pub fn config(game: GameKind, fold: Fold, n: u64, difficulty: Difficulty) -> EpisodeConfig {
    EpisodeConfig::new(game, fold.nth_seed(n), difficulty)
}

/// Plays `commands` as typed text and returns every result, the reset one
/// first.
pub fn transcript(config: &EpisodeConfig, commands: &[String]) -> Vec<StepResult> {
    let (mut s, first) = Session::reset(config, Mode::Online, None).expect("reset");
    let mut out = vec![first];
    out.extend(commands.iter().map(|c| s.step(c)));
    out
}

/// Gold commands plus the transcript they produce.
pub fn gold_transcript(config: &EpisodeConfig) -> (Vec<String>, Vec<StepResult>) {
    let gold = make_episode(config).expect("episode").gold.expect("gold requested");
    let t = transcript(config, &gold);
    (gold, t)
}

/// Every template filled with every referent, kept when execution on a copy
/// of the world accepts it.
pub fn brute_force_valid(world: &WorldState, task: &Task) -> Vec<BoundAction> {
    if world.is_terminal() {
        return Vec::new();
    }
    let objs: Vec<ObjId> = (0..world.objects.len() as u32).map(ObjId).collect();
    let mut out = Vec::new();
    for t in &TEMPLATES {
        let candidates: Vec<Args> = match t.slot_kinds {
            [] => vec![Args::None],
            [SlotKind::Direction] => Direction::ALL.iter().map(|&d| Args::Dir(d)).collect(),
            [SlotKind::Object] => objs.iter().map(|&o| Args::Obj(o)).collect(),
            [SlotKind::Object, SlotKind::Object] => {
                objs.iter().flat_map(|&a| objs.iter().map(move |&b| Args::Pair(a, b))).collect()
            }
            other => panic!("unexpected slot layout {other:?}"),
        };
        for args in candidates {
            let action = BoundAction::new(t.verb, args);
            let mut w = world.clone();
            if !execute(&mut w, &action, task).rejected {
                out.push(action);
            }
        }
    }
    out
}

/// Walks `steps` random valid actions from a fresh episode.
pub fn random_state(config: &EpisodeConfig, steps: usize, rng: &mut SplitMix64) -> (WorldState, Task) {
    let ep = make_episode(config).expect("episode");
    let (mut world, task) = (ep.world, ep.task);
    for _ in 0..steps {
        let valid = enumerate_valid_actions(&world, &task);
        if valid.is_empty() {
            break;
        }
        let a = valid[rng.index(valid.len())];
        execute(&mut world, &a, &task);
    }
    (world, task)
}

/// Compares online play (typed commands) against playback of a tree crawled
/// to `depth` and passed through serialization, over every path. Returns the
/// number of states compared.
pub fn compare_exhaustive(config: &EpisodeConfig, depth: u32) -> Result<u64, String> {
    let bytes = tree_to_bytes(
        &crawl_with(config, CrawlOptions { max_depth: depth, budget_bytes: u64::MAX }).map_err(|e| e.to_string())?,
    );
    let tree = Arc::new(tree_from_bytes(&bytes).map_err(|e| e.to_string())?);
    drop(bytes);
    let game = OnlineGame::new(make_episode(&EpisodeConfig { generate_gold: false, ..*config }).unwrap());
    let mut count = 0;
    walk(&game, &TreeCursor::new(tree), depth, &mut Vec::new(), &mut count)?;
    Ok(count)
}

/// Field-by-field [`StepResult`] equality without building either side.
fn same_state(game: &OnlineGame, cursor: &TreeCursor) -> bool {
    if game.is_terminal() {
        return game.result() == cursor.result();
    }
    let tree = cursor.tree();
    let node = cursor.current_node();
    game.observation() == cursor.observation()
        && game.look() == tree.str(node.look)
        && game.inventory() == tree.str(node.inv)
        && game.score() == node.score
        && game.world().step_count == cursor.steps()
        && game.valid_surfaces().len() == node.valid.len()
        && game.valid_surfaces().iter().zip(&node.valid).all(|(a, &b)| a == tree.str(b))
}

pub fn walk(game: &OnlineGame, cursor: &TreeCursor, left: u32, path: &mut Vec<String>, count: &mut u64) -> Result<(), String> {
    *count += 1;
    if !same_state(game, cursor) {
        let (a, b) = (game.result(), cursor.result());
        return Err(format!("divergence after {path:?}:\n online    {a:?}\n precrawled {b:?}"));
    }
    if left == 0 {
        return Ok(());
    }
    for i in 0..game.valid_surfaces().len() {
        let surface = game.valid_surfaces()[i].clone();
        let mut g = game.clone();
        let mut c = cursor.clone();
        g.step(&surface);
        if !c.advance(i) {
            return Err(format!("tree has no child for {surface:?} after {path:?}"));
        }
        path.push(surface);
        walk(&g, &c, left - 1, path, count)?;
        path.pop();
    }
    Ok(())
}

/// Replays the random paths recorded by a sampled crawl, online and from the
/// tree, comparing every step.
pub fn compare_sampled(config: &EpisodeConfig, depth: u32, paths: usize, seed: u64) -> Result<(), String> {
    let tree = crawl_sampled(config, depth, paths, seed).map_err(|e| e.to_string())?;
    let tree = Arc::new(tree_from_bytes(&tree_to_bytes(&tree)).map_err(|e| e.to_string())?);
    let fresh = OnlineGame::new(make_episode(&EpisodeConfig { generate_gold: false, ..*config }).unwrap());
    let mut rng = SplitMix64::new(seed);
    for p in 0..paths {
        let mut game = fresh.clone();
        let mut cursor = TreeCursor::new(Arc::clone(&tree));
        for d in 0..depth {
            if game.is_terminal() {
                break;
            }
            let i = rng.index(game.valid_actions().len());
            let surface = game.valid_surfaces()[i].clone();
            let (a, b) = (game.step(&surface), cursor.step_index(i));
            if a != b {
                return Err(format!("path {p} step {d} ({surface}):\n online    {a:?}\n precrawled {b:?}"));
            }
        }
    }
    Ok(())
}

pub fn canonical(results: &[StepResult]) -> String {
    results.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect()
}

/// A crawled tree's JSON, edited to break one structural rule. Each case
/// names the node the loader must blame.
pub struct Corruption {
    pub name: &'static str,
    pub node: usize,
    pub doc: serde_json::Value,
}

/// Needs a tree of depth ≥ 2 whose root has at least two children.
pub fn corruptions(tree: &textgym::PrecrawledTree) -> Vec<Corruption> {
    use serde_json::{json, Value};

    let base: Value = serde_json::from_slice(&tree_to_bytes(tree)).unwrap();
    let root_children: Vec<(String, u64)> = base["nodes"][0]["children"]
        .as_object()
        .unwrap()
        .iter()
        .map(|(k, v)| (k.clone(), v.as_u64().unwrap()))
        .collect();
    assert!(root_children.len() >= 2);
    let (first_key, first) = root_children[0].clone();
    let (_, second) = root_children[1].clone();
    let first = first as usize;
    let grandchild = base["nodes"][first]["children"].as_object().unwrap().values().next().unwrap().as_u64().unwrap();
    let n = base["nodes"].as_array().unwrap().len();

    let mut out = Vec::new();
    let mut case = |name, node, edit: &dyn Fn(&mut Value)| {
        let mut doc = base.clone();
        edit(&mut doc);
        out.push(Corruption { name, node, doc });
    };
    case("child index past the end", 0, &|d| d["nodes"][0]["children"][&first_key] = json!(n + 5));
    case("child keyed by an unknown action", 0, &|d| {
        let c = d["nodes"][0]["children"].as_object_mut().unwrap();
        let v = c.remove(&first_key).unwrap();
        c.insert("dance wildly".into(), v);
    });
    case("raw score above max", first, &|d| {
        d["nodes"][first]["score"] = json!({"raw": 99, "max": 3, "normalized": "99/3", "succeeded": false, "failed": false})
    });
    case("normalized disagrees with raw/max", first, &|d| d["nodes"][first]["score"]["normalized"] = json!("1/1"));
    case("succeeded and failed at once", first, &|d| {
        d["nodes"][first]["score"]["succeeded"] = json!(true);
        d["nodes"][first]["score"]["failed"] = json!(true);
    });
    case("terminal flag without a terminal score", first, &|d| d["nodes"][first]["terminal"] = json!(true));
    case("child pointing backwards", first, &|d| {
        let c = d["nodes"][first]["children"].as_object_mut().unwrap();
        let k = c.keys().next().unwrap().clone();
        c[&k] = json!(0);
    });
    case("node with two parents", first, &|d| {
        let c = d["nodes"][first]["children"].as_object_mut().unwrap();
        let k = c.keys().next().unwrap().clone();
        c[&k] = json!(second);
    });
    case("observation of the wrong type", first, &|d| d["nodes"][first]["obs"] = json!(42));
    case("duplicated valid action", first, &|d| {
        let v = d["nodes"][first]["valid"].as_array_mut().unwrap();
        let dup = v[0].clone();
        v.push(dup);
    });
    case("orphaned node", grandchild as usize, &|d| {
        let c = d["nodes"][first]["children"].as_object_mut().unwrap();
        let k = c.iter().find(|(_, v)| v.as_u64() == Some(grandchild)).unwrap().0.clone();
        c.remove(&k);
    });
    let first_deep = tree.depths().iter().position(|&d| d == 2).unwrap();
    case("subtree deeper than maxDepth", first_deep, &|d| d["header"]["maxDepth"] = json!(1));
    out
}
