//! Action templates, valid-action enumeration, execution and input matching.

use std::fmt::Write;

use crate::games::{score_update, Effect, GameKind, Task};
use crate::library::library;
use crate::render::{self, is_visible};
use crate::world::{
    CookState, CutState, Direction, ObjId, ObjectKind, Openness, Parent, RewardEvent, WorldState,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verb {
    LookAround,
    Inventory,
    Examine,
    Move,
    Open,
    Close,
    Take,
    Put,
    Read,
    Cook,
    Chop,
    Slice,
    Dice,
    Eat,
    PrepareMeal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotKind {
    Object,
    Direction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    Generic,
    CookingOnly,
}

#[derive(Debug)]
pub struct ActionTemplate {
    pub verb: Verb,
    pub arity: u8,
    pub slot_kinds: &'static [SlotKind],
    pub surface_pattern: &'static str,
    pub scope: Scope,
}

impl ActionTemplate {
    pub fn in_scope(&self, game: GameKind) -> bool {
        self.scope == Scope::Generic || game == GameKind::CookingWorld
    }
}

const fn template(
    verb: Verb,
    slot_kinds: &'static [SlotKind],
    surface_pattern: &'static str,
    scope: Scope,
) -> ActionTemplate {
    ActionTemplate { verb, arity: slot_kinds.len() as u8, slot_kinds, surface_pattern, scope }
}

use SlotKind::{Direction as D, Object as O};

/// Every action the games understand, in enumeration order.
pub static TEMPLATES: [ActionTemplate; 15] = [
    template(Verb::LookAround, &[], "look around", Scope::Generic),
    template(Verb::Inventory, &[], "inventory", Scope::Generic),
    template(Verb::Examine, &[O], "examine OBJ", Scope::Generic),
    template(Verb::Move, &[D], "move DIR", Scope::Generic),
    template(Verb::Open, &[O], "open OBJ", Scope::Generic),
    template(Verb::Close, &[O], "close OBJ", Scope::Generic),
    template(Verb::Take, &[O], "take OBJ", Scope::Generic),
    template(Verb::Put, &[O, O], "put OBJ in OBJ", Scope::Generic),
    template(Verb::Read, &[O], "read OBJ", Scope::CookingOnly),
    template(Verb::Cook, &[O, O], "cook OBJ in OBJ", Scope::CookingOnly),
    template(Verb::Chop, &[O], "chop OBJ", Scope::CookingOnly),
    template(Verb::Slice, &[O], "slice OBJ", Scope::CookingOnly),
    template(Verb::Dice, &[O], "dice OBJ", Scope::CookingOnly),
    template(Verb::Eat, &[O], "eat OBJ", Scope::CookingOnly),
    template(Verb::PrepareMeal, &[], "prepare meal", Scope::CookingOnly),
];

impl Verb {
    pub fn template(self) -> &'static ActionTemplate {
        &TEMPLATES[self as usize]
    }

    fn cut_state(self) -> Option<CutState> {
        match self {
            Self::Chop => Some(CutState::Chopped),
            Self::Slice => Some(CutState::Sliced),
            Self::Dice => Some(CutState::Diced),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Args {
    None,
    Obj(ObjId),
    Dir(Direction),
    Pair(ObjId, ObjId),
}

/// A template with every slot filled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoundAction {
    pub verb: Verb,
    pub args: Args,
}

impl BoundAction {
    pub const fn new(verb: Verb, args: Args) -> Self {
        Self { verb, args }
    }

    pub fn template(&self) -> &'static ActionTemplate {
        self.verb.template()
    }

    /// Fills the template's placeholders with canonical object names.
    pub fn write_surface(&self, world: &WorldState, out: &mut String) {
        let pattern = self.template().surface_pattern;
        let mut names: [&str; 2] = ["", ""];
        match self.args {
            Args::None => {}
            Args::Obj(o) => names[0] = world.obj(o).name(),
            Args::Dir(d) => names[0] = d.name(),
            Args::Pair(a, b) => names = [world.obj(a).name(), world.obj(b).name()],
        }
        let mut slot = 0;
        for (i, word) in pattern.split(' ').enumerate() {
            if i > 0 {
                out.push(' ');
            }
            if word == "OBJ" || word == "DIR" {
                out.push_str(names[slot]);
                slot += 1;
            } else {
                out.push_str(word);
            }
        }
    }

    pub fn surface(&self, world: &WorldState) -> String {
        let mut s = String::with_capacity(24);
        self.write_surface(world, &mut s);
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    pub response: String,
    pub state_changed: bool,
    /// Events earned by this action that were not already in the ledger.
    pub reward_events: Vec<RewardEvent>,
    pub triggered_failure: bool,
    /// The action's precondition did not hold; nothing but the step counter moved.
    pub rejected: bool,
}

impl StepOutcome {
    fn observed(response: String) -> Self {
        Self { response, state_changed: false, reward_events: Vec::new(), triggered_failure: false, rejected: false }
    }

    fn rejected(response: impl Into<String>) -> Self {
        Self {
            response: response.into(),
            state_changed: false,
            reward_events: Vec::new(),
            triggered_failure: false,
            rejected: true,
        }
    }
}

pub const NOT_FOUND: &str = "You don't see that here.";
pub const GAME_COMPLETED: &str = "Game completed.";
pub const GAME_FAILED: &str = "Game over. That was not what the task called for.";

fn holds_knife(world: &WorldState) -> bool {
    world.inventory.iter().any(|&o| world.obj(o).entry.flags.tool)
}

fn meal_exists(world: &WorldState) -> bool {
    world.objects.iter().any(|o| o.name() == "meal" && o.parent != Parent::Consumed)
}

fn meal_ready(world: &WorldState, task: &Task) -> bool {
    let Task::Cooking(recipe) = task else { return false };
    world.agent_location == recipe.kitchen
        && !meal_exists(world)
        && recipe.ingredients.iter().all(|ing| {
            let o = world.obj(ing.object);
            o.parent == Parent::Inventory && ing.is_satisfied_by(o.cut, o.cook)
        })
}

/// Reusable buffers for [`enumerate_into`].
#[derive(Default, Debug, Clone)]
pub struct Scratch {
    visible: Vec<ObjId>,
}

/// Every action whose precondition holds, in template order and then by
/// ascending argument ids. Empty once the episode has ended.
pub fn enumerate_valid_actions(world: &WorldState, task: &Task) -> Vec<BoundAction> {
    let mut out = Vec::new();
    enumerate_into(world, task, &mut Scratch::default(), &mut out);
    out
}

pub fn enumerate_into(world: &WorldState, task: &Task, scratch: &mut Scratch, out: &mut Vec<BoundAction>) {
    out.clear();
    if world.is_terminal() {
        return;
    }
    let vis = &mut scratch.visible;
    vis.clear();
    render::collect_visible(world, vis);
    vis.sort_unstable();
    let cooking = task.game() == GameKind::CookingWorld;
    let objs = &world.objects;
    let held = |o: ObjId| objs[o.index()].parent == Parent::Inventory;

    out.push(BoundAction::new(Verb::LookAround, Args::None));
    out.push(BoundAction::new(Verb::Inventory, Args::None));
    out.extend(vis.iter().map(|&o| BoundAction::new(Verb::Examine, Args::Obj(o))));
    let here = world.here();
    for dir in Direction::ALL {
        if let Some(exit) = here.exit(dir) {
            if exit.door.is_none_or(|d| objs[d.index()].openness == Openness::Open) {
                out.push(BoundAction::new(Verb::Move, Args::Dir(dir)));
            }
        }
    }
    for &o in vis.iter() {
        if objs[o.index()].openness == Openness::Closed {
            out.push(BoundAction::new(Verb::Open, Args::Obj(o)));
        }
    }
    for &o in vis.iter() {
        if objs[o.index()].openness == Openness::Open {
            out.push(BoundAction::new(Verb::Close, Args::Obj(o)));
        }
    }
    for &o in vis.iter() {
        if objs[o.index()].kind.is_portable() && !held(o) {
            out.push(BoundAction::new(Verb::Take, Args::Obj(o)));
        }
    }
    for &x in vis.iter().filter(|&&x| held(x)) {
        for &y in vis.iter() {
            if y != x && objs[y.index()].is_accessible_container() {
                out.push(BoundAction::new(Verb::Put, Args::Pair(x, y)));
            }
        }
    }
    if !cooking {
        return;
    }
    for &o in vis.iter() {
        if objs[o.index()].kind == ObjectKind::Readable {
            out.push(BoundAction::new(Verb::Read, Args::Obj(o)));
        }
    }
    let cookable = |o: ObjId| {
        let obj = &objs[o.index()];
        obj.kind == ObjectKind::Ingredient && obj.entry.flags.cookable && obj.cook == CookState::Raw
    };
    for &x in vis.iter().filter(|&&x| cookable(x)) {
        for &y in vis.iter() {
            if objs[y.index()].kind == ObjectKind::Appliance {
                out.push(BoundAction::new(Verb::Cook, Args::Pair(x, y)));
            }
        }
    }
    if holds_knife(world) {
        let cuttable = |o: ObjId| {
            let obj = &objs[o.index()];
            obj.kind == ObjectKind::Ingredient && obj.entry.flags.cuttable && obj.cut == CutState::Raw
        };
        for verb in [Verb::Chop, Verb::Slice, Verb::Dice] {
            out.extend(vis.iter().filter(|&&o| cuttable(o)).map(|&o| BoundAction::new(verb, Args::Obj(o))));
        }
    }
    for &o in vis.iter() {
        if held(o) && objs[o.index()].is_edible() {
            out.push(BoundAction::new(Verb::Eat, Args::Obj(o)));
        }
    }
    if meal_ready(world, task) {
        out.push(BoundAction::new(Verb::PrepareMeal, Args::None));
    }
}

/// Result of checking an object argument before acting on it.
fn present(world: &WorldState, o: ObjId) -> bool {
    o.index() < world.objects.len() && world.obj(o).parent != Parent::Consumed && is_visible(world, o)
}

/// Executes `action`, mutating `world`. The step counter always advances;
/// an action whose precondition fails is answered with an explanation and
/// otherwise leaves the world untouched.
pub fn execute(world: &mut WorldState, action: &BoundAction, task: &Task) -> StepOutcome {
    world.step_count += 1;
    if !action.template().in_scope(task.game()) {
        return StepOutcome::rejected("That action is not available in this game.");
    }
    let (mut outcome, effect) = match apply(world, action, task) {
        Ok(pair) => pair,
        Err(rejection) => return rejection,
    };
    if outcome.state_changed && !world.is_terminal() {
        let judgement = task.judge(world, effect);
        outcome.reward_events = judgement.events.into_iter().filter(|&e| !world.has_event(e)).collect();
        outcome.reward_events.dedup();
        outcome.triggered_failure = judgement.failure;
        let score = score_update(world, &outcome, task);
        if score.failed {
            outcome.response.push('\n');
            outcome.response.push_str(GAME_FAILED);
        } else if score.succeeded {
            outcome.response.push('\n');
            outcome.response.push_str(GAME_COMPLETED);
        }
    }
    outcome
}

fn changed(response: String) -> StepOutcome {
    StepOutcome { state_changed: true, ..StepOutcome::observed(response) }
}

fn apply(world: &mut WorldState, action: &BoundAction, task: &Task) -> Result<(StepOutcome, Effect), StepOutcome> {
    let obj_arg = |o: ObjId| if present(world, o) { Ok(o) } else { Err(StepOutcome::rejected(NOT_FOUND)) };
    let mut text = String::new();
    let none = Effect::Nothing;
    match (action.verb, action.args) {
        (Verb::LookAround, Args::None) => Ok((StepOutcome::observed(render::render_observation(world)), none)),
        (Verb::Inventory, Args::None) => Ok((StepOutcome::observed(render::render_inventory(world)), none)),
        (Verb::Examine, Args::Obj(o)) => {
            let o = obj_arg(o)?;
            if world.obj(o).kind == ObjectKind::Readable {
                return Ok((StepOutcome::observed(task.readable_text(o)), none));
            }
            text.push_str("You see ");
            render::write_clause(&mut text, world, o);
            text.push('.');
            Ok((StepOutcome::observed(text), none))
        }
        (Verb::Move, Args::Dir(dir)) => {
            let Some(exit) = world.here().exit(dir) else {
                return Err(StepOutcome::rejected("You can't go that way."));
            };
            if let Some(door) = exit.door {
                if world.obj(door).openness != Openness::Open {
                    return Err(StepOutcome::rejected(format!("The {} is closed.", world.obj(door).name())));
                }
            }
            world.agent_location = exit.to;
            Ok((changed(render::render_observation(world)), none))
        }
        (Verb::Open, Args::Obj(o)) => {
            let o = obj_arg(o)?;
            match world.obj(o).openness {
                Openness::Closed => {}
                Openness::Open => return Err(StepOutcome::rejected("That is already open.")),
                Openness::NotOpenable => return Err(StepOutcome::rejected("You can't open that.")),
            }
            world.obj_mut(o).openness = Openness::Open;
            let _ = write!(text, "You open the {}.", world.obj(o).name());
            if world.obj(o).kind == ObjectKind::Container {
                text.push(' ');
                render::write_contents_sentence(&mut text, world, o);
            }
            Ok((changed(text), none))
        }
        (Verb::Close, Args::Obj(o)) => {
            let o = obj_arg(o)?;
            match world.obj(o).openness {
                Openness::Open => {}
                Openness::Closed => return Err(StepOutcome::rejected("That is already closed.")),
                Openness::NotOpenable => return Err(StepOutcome::rejected("You can't close that.")),
            }
            world.obj_mut(o).openness = Openness::Closed;
            Ok((changed(format!("You close the {}.", world.obj(o).name())), none))
        }
        (Verb::Take, Args::Obj(o)) => {
            let o = obj_arg(o)?;
            let obj = world.obj(o);
            if obj.parent == Parent::Inventory {
                return Err(StepOutcome::rejected("You already have that."));
            }
            if !obj.kind.is_portable() {
                return Err(StepOutcome::rejected("You can't take that."));
            }
            world.move_to(o, Parent::Inventory);
            Ok((changed(format!("You take the {}.", world.obj(o).name())), Effect::Took(o)))
        }
        (Verb::Put, Args::Pair(x, y)) => {
            let x = obj_arg(x)?;
            let y = obj_arg(y)?;
            if world.obj(x).parent != Parent::Inventory {
                return Err(StepOutcome::rejected("You aren't holding that."));
            }
            if x == y || !world.obj(y).is_accessible_container() {
                return Err(StepOutcome::rejected("You can't put things there."));
            }
            world.move_to(x, Parent::Object(y));
            let msg = format!("You put the {} in the {}.", world.obj(x).name(), world.obj(y).name());
            Ok((changed(msg), Effect::Put { obj: x, into: y }))
        }
        (Verb::Read, Args::Obj(o)) => {
            let o = obj_arg(o)?;
            if world.obj(o).kind != ObjectKind::Readable {
                return Err(StepOutcome::rejected("There is nothing to read on that."));
            }
            Ok((StepOutcome::observed(task.readable_text(o)), none))
        }
        (Verb::Cook, Args::Pair(x, y)) => {
            let x = obj_arg(x)?;
            let y = obj_arg(y)?;
            let food = world.obj(x);
            if food.kind != ObjectKind::Ingredient || !food.entry.flags.cookable {
                return Err(StepOutcome::rejected("You can't cook that."));
            }
            if food.cook != CookState::Raw {
                return Err(StepOutcome::rejected("That has already been cooked."));
            }
            let appliance = world.obj(y);
            let state = match appliance.kind {
                ObjectKind::Appliance => CookState::for_appliance(appliance.name()),
                _ => None,
            };
            let Some(state) = state else {
                return Err(StepOutcome::rejected("You can't cook with that."));
            };
            world.obj_mut(x).cook = state;
            let msg = format!(
                "You {} the {} with the {}.",
                state.verb().unwrap_or("cook"),
                world.obj(x).name(),
                world.obj(y).name()
            );
            Ok((changed(msg), Effect::Cooked(x, state)))
        }
        (verb @ (Verb::Chop | Verb::Slice | Verb::Dice), Args::Obj(o)) => {
            let o = obj_arg(o)?;
            if !holds_knife(world) {
                return Err(StepOutcome::rejected("You need a knife for that."));
            }
            let food = world.obj(o);
            if food.kind != ObjectKind::Ingredient || !food.entry.flags.cuttable {
                return Err(StepOutcome::rejected("You can't cut that."));
            }
            if food.cut != CutState::Raw {
                return Err(StepOutcome::rejected("That has already been cut."));
            }
            let state = verb.cut_state().expect("cutting verb");
            world.obj_mut(o).cut = state;
            let msg = format!("You {} the {}.", state.verb().unwrap_or("cut"), world.obj(o).name());
            Ok((changed(msg), Effect::Cut(o, state)))
        }
        (Verb::Eat, Args::Obj(o)) => {
            let o = obj_arg(o)?;
            if world.obj(o).parent != Parent::Inventory {
                return Err(StepOutcome::rejected("You need to be holding that first."));
            }
            if !world.obj(o).is_edible() {
                return Err(StepOutcome::rejected("That's not edible."));
            }
            world.move_to(o, Parent::Consumed);
            Ok((changed(format!("You eat the {}.", world.obj(o).name())), Effect::Ate(o)))
        }
        (Verb::PrepareMeal, Args::None) => {
            let Task::Cooking(recipe) = task else {
                return Err(StepOutcome::rejected("There is no recipe to follow."));
            };
            if world.agent_location != recipe.kitchen {
                return Err(StepOutcome::rejected("You can only prepare the meal in the kitchen."));
            }
            if meal_exists(world) {
                return Err(StepOutcome::rejected("The meal has already been prepared."));
            }
            for ing in &recipe.ingredients {
                let obj = world.obj(ing.object);
                if obj.parent != Parent::Inventory {
                    return Err(StepOutcome::rejected(format!("You are missing the {}.", ing.name)));
                }
                if !ing.is_satisfied_by(obj.cut, obj.cook) {
                    return Err(StepOutcome::rejected(format!(
                        "The {} is not prepared as the recipe asks.",
                        ing.name
                    )));
                }
            }
            for ing in &recipe.ingredients {
                world.move_to(ing.object, Parent::Consumed);
            }
            let meal = world.spawn(library().expect("meal"));
            world.move_to(meal, Parent::Inventory);
            Ok((changed("The meal has been added to your inventory.".to_string()), Effect::MealPrepared(meal)))
        }
        _ => Err(StepOutcome::rejected("That action needs different arguments.")),
    }
}

/// Lowercases, collapses whitespace, drops articles and reads "with" as
/// "in". The only normalizations the matcher applies.
pub fn normalize_command(input: &str) -> String {
    let mut out = String::with_capacity(input.len());
    for word in input.split_whitespace() {
        let word = word.to_lowercase();
        let word = match word.as_str() {
            "a" | "an" | "the" => continue,
            "with" => "in".to_string(),
            _ => word,
        };
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&word);
    }
    out
}

/// Index of the valid action the input names, if any. Surfaces are already
/// in normal form, so only the input needs normalizing.
pub fn match_input<S: AsRef<str>>(input: &str, valid: &[S]) -> Option<usize> {
    match_input_with(input, valid.len(), |i| valid[i].as_ref())
}

/// [`match_input`] over any indexable list of surfaces.
pub fn match_input_with<'a>(input: &str, len: usize, surface: impl Fn(usize) -> &'a str) -> Option<usize> {
    if let Some(i) = (0..len).find(|&i| surface(i) == input) {
        return Some(i);
    }
    let norm = normalize_command(input);
    (0..len).find(|&i| surface(i) == norm)
}
