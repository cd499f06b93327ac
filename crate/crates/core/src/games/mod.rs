//! The three benchmark tasks: generation, reward rules, success/failure
//! detection and gold-path solutions.

pub mod coin;
pub mod cooking;
pub mod gold;
pub mod twc;

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::action::StepOutcome;
use crate::world::{CookState, CutState, LocId, ObjId, Parent, RewardEvent, WorldState};

pub use coin::{generate_coin, CoinTask};
pub use cooking::{generate_cooking, RecipeIngredient, RecipeTask};
pub use gold::gold_path;
pub use twc::{generate_twc, TwcTarget, TwcTask};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GameKind {
    #[serde(rename = "cookingworld", alias = "cooking")]
    CookingWorld,
    #[serde(rename = "twc")]
    Twc,
    #[serde(rename = "coin", alias = "coincollector")]
    CoinCollector,
}

impl GameKind {
    pub const ALL: [GameKind; 3] = [Self::CookingWorld, Self::Twc, Self::CoinCollector];

    pub fn name(self) -> &'static str {
        match self {
            Self::CookingWorld => "cookingworld",
            Self::Twc => "twc",
            Self::CoinCollector => "coin",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cookingworld" | "cooking" => Some(Self::CookingWorld),
            "twc" | "textworld-commonsense" => Some(Self::Twc),
            "coin" | "coincollector" => Some(Self::CoinCollector),
            _ => None,
        }
    }

    /// Salt mixed into the seed so different games never share a stream.
    pub(crate) fn salt(self) -> u64 {
        match self {
            Self::CookingWorld => 0x636F_6F6B_696E_6777,
            Self::Twc => 0x7477_6300_0000_0001,
            Self::CoinCollector => 0x636F_696E_0000_0002,
        }
    }
}

impl std::fmt::Display for GameKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Task {
    Cooking(RecipeTask),
    Twc(TwcTask),
    Coin(CoinTask),
}

/// What an accepted action did, as far as the reward rules care.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Effect {
    Nothing,
    Took(ObjId),
    Put { obj: ObjId, into: ObjId },
    Cut(ObjId, CutState),
    Cooked(ObjId, CookState),
    Ate(ObjId),
    MealPrepared(ObjId),
}

#[derive(Debug, Default)]
pub struct Judgement {
    pub events: Vec<RewardEvent>,
    pub failure: bool,
}

impl Task {
    pub fn game(&self) -> GameKind {
        match self {
            Self::Cooking(_) => GameKind::CookingWorld,
            Self::Twc(_) => GameKind::Twc,
            Self::Coin(_) => GameKind::CoinCollector,
        }
    }

    pub fn max_raw(&self) -> u32 {
        match self {
            Self::Cooking(r) => 2 * r.ingredients.len() as u32 + 2,
            Self::Twc(t) => t.targets.len() as u32,
            Self::Coin(_) => 1,
        }
    }

    /// Text returned by reading (or examining) a readable object.
    pub fn readable_text(&self, _obj: ObjId) -> String {
        match self {
            Self::Cooking(r) => r.text(),
            _ => String::from("There is nothing written on it."),
        }
    }

    /// Applies the game's reward and failure rules to an accepted action.
    /// `world` is the state after the action.
    pub fn judge(&self, world: &WorldState, effect: Effect) -> Judgement {
        let mut j = Judgement::default();
        match self {
            Self::Cooking(recipe) => {
                for ing in &recipe.ingredients {
                    match effect {
                        Effect::Cut(o, s) if o == ing.object && ing.cut != Some(s) => j.failure = true,
                        Effect::Cooked(o, s) if o == ing.object && ing.cook != Some(s) => j.failure = true,
                        Effect::Ate(o) if o == ing.object => j.failure = true,
                        _ => {}
                    }
                    let obj = world.obj(ing.object);
                    if obj.parent == Parent::Inventory {
                        j.events.push(RewardEvent::Took(ing.object));
                        if ing.is_satisfied_by(obj.cut, obj.cook) {
                            j.events.push(RewardEvent::Ready(ing.object));
                        }
                    }
                }
                match effect {
                    Effect::MealPrepared(_) => j.events.push(RewardEvent::MealPrepared),
                    Effect::Ate(o) if world.obj(o).name() == "meal" => j.events.push(RewardEvent::MealEaten),
                    _ => {}
                }
            }
            Self::Twc(task) => {
                if let Effect::Put { obj, into } = effect {
                    if task.targets.iter().any(|t| t.object == obj && t.destinations.contains(&into)) {
                        j.events.push(RewardEvent::Placed(obj));
                    }
                }
            }
            Self::Coin(task) => {
                if effect == Effect::Took(task.coin) {
                    j.events.push(RewardEvent::CoinTaken);
                }
            }
        }
        j
    }

    pub fn is_complete(&self, world: &WorldState) -> bool {
        match self {
            Self::Cooking(_) => world.has_event(RewardEvent::MealEaten),
            Self::Twc(t) => t.targets.iter().all(|x| world.has_event(RewardEvent::Placed(x.object))),
            Self::Coin(_) => world.has_event(RewardEvent::CoinTaken),
        }
    }

    /// The kitchen for cooking tasks.
    pub fn kitchen(&self) -> Option<LocId> {
        match self {
            Self::Cooking(r) => Some(r.kitchen),
            _ => None,
        }
    }
}

/// Score snapshot. `normalized = raw / max_raw`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScoreState {
    pub raw: u32,
    pub max_raw: u32,
    pub succeeded: bool,
    pub failed: bool,
}

impl ScoreState {
    pub fn of(world: &WorldState, task: &Task) -> Self {
        Self {
            raw: world.score_ledger.len() as u32,
            max_raw: task.max_raw(),
            succeeded: world.succeeded,
            failed: world.failed,
        }
    }

    pub fn normalized(&self) -> f64 {
        f64::from(self.raw) / f64::from(self.max_raw)
    }

    /// `raw/max` as text, e.g. "3/7".
    pub fn fraction(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{}/{}", self.raw, self.max_raw);
        s
    }

    pub fn is_terminal(&self) -> bool {
        self.succeeded || self.failed
    }
}

/// Folds an outcome into the world's score ledger. Events are counted at
/// most once, and a terminal episode's score never changes again.
pub fn score_update(world: &mut WorldState, outcome: &StepOutcome, task: &Task) -> ScoreState {
    if !world.is_terminal() {
        for &e in &outcome.reward_events {
            if !world.score_ledger.contains(&e) {
                world.score_ledger.push(e);
            }
        }
        if outcome.triggered_failure {
            world.failed = true;
        } else if task.is_complete(world) {
            world.succeeded = true;
        }
    }
    ScoreState::of(world, task)
}
