//! Scripted solutions. The script drives a private copy of the world through
//! [`execute`], so every emitted command was accepted by the engine.

use std::collections::VecDeque;

use crate::action::{execute, Args, BoundAction, Verb};
use crate::world::{CutState, Direction, LocId, ObjId, Openness, Parent, WorldState};

use super::Task;

struct Driver<'a> {
    world: WorldState,
    task: &'a Task,
    path: Vec<String>,
}

/// First moves of a shortest route, ignoring whether doors are open.
fn route(world: &WorldState, from: LocId, to: LocId) -> Vec<Direction> {
    let n = world.locations.len();
    let mut prev: Vec<Option<(LocId, Direction)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([from]);
    seen[from.index()] = true;
    while let Some(l) = queue.pop_front() {
        if l == to {
            break;
        }
        for dir in Direction::ALL {
            if let Some(exit) = world.loc(l).exit(dir) {
                if !seen[exit.to.index()] {
                    seen[exit.to.index()] = true;
                    prev[exit.to.index()] = Some((l, dir));
                    queue.push_back(exit.to);
                }
            }
        }
    }
    let mut dirs = Vec::new();
    let mut cur = to;
    while let Some((p, d)) = prev[cur.index()] {
        dirs.push(d);
        cur = p;
    }
    dirs.reverse();
    dirs
}

impl Driver<'_> {
    fn act(&mut self, verb: Verb, args: Args) {
        let action = BoundAction::new(verb, args);
        self.path.push(action.surface(&self.world));
        let out = execute(&mut self.world, &action, self.task);
        debug_assert!(!out.rejected, "gold step {:?} rejected: {}", self.path.last(), out.response);
    }

    fn walk_to(&mut self, target: LocId) {
        for dir in route(&self.world, self.world.agent_location, target) {
            let exit = self.world.here().exit(dir).expect("route follows exits");
            if let Some(door) = exit.door {
                if self.world.obj(door).openness == Openness::Closed {
                    self.act(Verb::Open, Args::Obj(door));
                }
            }
            self.act(Verb::Move, Args::Dir(dir));
        }
    }

    fn distance(&self, to: LocId) -> usize {
        route(&self.world, self.world.agent_location, to).len()
    }

    /// Walks to the object and opens every closed container around it,
    /// outermost first. With `open_self` the object itself is opened too.
    fn reach(&mut self, obj: ObjId, open_self: bool) {
        if let Some(loc) = self.world.location_of(obj) {
            self.walk_to(loc);
        }
        let mut chain = Vec::new();
        if open_self {
            chain.push(obj);
        }
        let mut cur = obj;
        while let Parent::Object(c) = self.world.obj(cur).parent {
            chain.push(c);
            cur = c;
        }
        for &c in chain.iter().rev() {
            if self.world.obj(c).openness == Openness::Closed {
                self.act(Verb::Open, Args::Obj(c));
            }
        }
    }

    fn take(&mut self, obj: ObjId) {
        self.reach(obj, false);
        self.act(Verb::Take, Args::Obj(obj));
    }

    /// Index of the item nearest to the agent; ties go to the earliest.
    fn nearest(&self, items: &[ObjId]) -> usize {
        (0..items.len())
            .min_by_key(|&i| self.world.location_of(items[i]).map_or(usize::MAX, |l| self.distance(l)))
            .expect("non-empty")
    }
}

/// A command sequence that completes the episode from its initial state.
pub fn gold_path(world: &WorldState, task: &Task) -> Vec<String> {
    let mut d = Driver { world: world.clone(), task, path: Vec::new() };
    match task {
        Task::Cooking(recipe) => {
            let cookbook = d.world.find_object("cookbook").expect("cookbook placed");
            d.act(Verb::Read, Args::Obj(cookbook));
            if recipe.ingredients.iter().any(|i| i.cut.is_some()) {
                let knife = d.world.find_object("knife").expect("knife placed");
                d.take(knife);
            }
            let mut remaining: Vec<ObjId> = recipe.ingredients.iter().map(|i| i.object).collect();
            while !remaining.is_empty() {
                let next = remaining.remove(d.nearest(&remaining));
                d.take(next);
            }
            d.walk_to(recipe.kitchen);
            for ing in &recipe.ingredients {
                if let Some(cut) = ing.cut {
                    let verb = match cut {
                        CutState::Chopped => Verb::Chop,
                        CutState::Sliced => Verb::Slice,
                        CutState::Diced => Verb::Dice,
                        CutState::Raw => unreachable!("recipes never ask for raw"),
                    };
                    d.act(verb, Args::Obj(ing.object));
                }
                if let Some(appliance) = ing.cook.and_then(|c| c.appliance()) {
                    let appliance = d.world.find_object(appliance).expect("appliance exists");
                    if let Some(loc) = d.world.location_of(appliance) {
                        d.walk_to(loc);
                    }
                    d.act(Verb::Cook, Args::Pair(ing.object, appliance));
                }
            }
            d.walk_to(recipe.kitchen);
            d.act(Verb::PrepareMeal, Args::None);
            let meal = d.world.find_object("meal").expect("meal prepared");
            d.act(Verb::Eat, Args::Obj(meal));
        }
        Task::Twc(twc) => {
            let mut remaining: Vec<usize> = (0..twc.targets.len()).collect();
            while !remaining.is_empty() {
                let objs: Vec<ObjId> = remaining.iter().map(|&i| twc.targets[i].object).collect();
                let target = &twc.targets[remaining.remove(d.nearest(&objs))];
                d.take(target.object);
                let dest = target.destinations[d.nearest(&target.destinations)];
                d.reach(dest, true);
                d.act(Verb::Put, Args::Pair(target.object, dest));
            }
        }
        Task::Coin(coin) => {
            d.take(coin.coin);
        }
    }
    debug_assert!(d.world.succeeded, "gold path did not finish: {:?}", d.path);
    d.path
}
