//! The step/reset contract, for both online play and precrawled playback.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::action::{enumerate_into, execute, match_input_with, BoundAction, Scratch};
use crate::games::{ScoreState, Task};
use crate::precrawl::{PrecrawledTree, TreeCursor};
use crate::render::{write_inventory, write_observation};
use crate::variation::{make_episode, Episode, EpisodeConfig, EpisodeError};
use crate::world::WorldState;

/// Response to input that names no valid action.
pub const UNRECOGNIZED: &str = "I don't understand that. Try one of the valid actions.";
/// Response to a valid action past the end of a precrawled tree.
pub const EXHAUSTED: &str = "This precrawled tree ends here; no further steps were recorded.";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    pub observation: String,
    pub look: String,
    pub inventory: String,
    pub raw_score: u32,
    pub max_score: u32,
    pub normalized_score: f64,
    pub succeeded: bool,
    pub failed: bool,
    pub valid_actions: Vec<String>,
    pub step_count: u32,
}

impl StepResult {
    pub fn score(&self) -> ScoreState {
        ScoreState { raw: self.raw_score, max_raw: self.max_score, succeeded: self.succeeded, failed: self.failed }
    }

    pub fn is_terminal(&self) -> bool {
        self.succeeded || self.failed
    }

    /// Copy without the valid-action list, for lean replies.
    pub fn without_actions(&self) -> Self {
        Self { valid_actions: Vec::new(), ..self.clone() }
    }

    pub(crate) fn assemble(
        observation: &str,
        look: &str,
        inventory: &str,
        score: ScoreState,
        valid_actions: Vec<String>,
        step_count: u32,
    ) -> Self {
        Self {
            observation: observation.to_owned(),
            look: look.to_owned(),
            inventory: inventory.to_owned(),
            raw_score: score.raw,
            max_score: score.max_raw,
            normalized_score: score.normalized(),
            succeeded: score.succeeded,
            failed: score.failed,
            valid_actions,
            step_count,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Online,
    Precrawled,
}

impl Mode {
    pub fn from_name(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "online" => Some(Self::Online),
            "precrawled" | "precrawl" | "tree" => Some(Self::Precrawled),
            _ => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error(transparent)]
    Episode(#[from] EpisodeError),
    #[error("precrawled mode needs a tree for this config")]
    MissingTree,
    #[error("the loaded tree was crawled for a different config")]
    TreeMismatch,
}

/// A live episode run by the engine.
#[derive(Clone, Debug)]
pub struct OnlineGame {
    world: WorldState,
    task: Task,
    scratch: Scratch,
    valid: Vec<BoundAction>,
    surfaces: Vec<String>,
    observation: String,
    look: String,
    inventory: String,
    frozen: Option<StepResult>,
}

impl OnlineGame {
    pub fn new(episode: Episode) -> Self {
        let mut g = Self {
            world: episode.world,
            task: episode.task,
            scratch: Scratch::default(),
            valid: Vec::new(),
            surfaces: Vec::new(),
            observation: String::new(),
            look: String::new(),
            inventory: String::new(),
            frozen: None,
        };
        g.refresh();
        g.observation.clone_from(&g.look);
        g
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn task(&self) -> &Task {
        &self.task
    }

    pub fn valid_actions(&self) -> &[BoundAction] {
        &self.valid
    }

    pub fn valid_surfaces(&self) -> &[String] {
        &self.surfaces
    }

    pub fn observation(&self) -> &str {
        &self.observation
    }

    pub fn look(&self) -> &str {
        &self.look
    }

    pub fn inventory(&self) -> &str {
        &self.inventory
    }

    pub fn score(&self) -> ScoreState {
        ScoreState::of(&self.world, &self.task)
    }

    pub fn is_terminal(&self) -> bool {
        self.world.is_terminal()
    }

    fn refresh(&mut self) {
        enumerate_into(&self.world, &self.task, &mut self.scratch, &mut self.valid);
        self.surfaces.resize_with(self.valid.len(), String::new);
        for (s, a) in self.surfaces.iter_mut().zip(&self.valid) {
            s.clear();
            a.write_surface(&self.world, s);
        }
        self.look.clear();
        write_observation(&mut self.look, &self.world);
        self.inventory.clear();
        write_inventory(&mut self.inventory, &self.world);
    }

    pub fn result(&self) -> StepResult {
        if let Some(f) = &self.frozen {
            return f.clone();
        }
        StepResult::assemble(
            &self.observation,
            &self.look,
            &self.inventory,
            self.score(),
            self.surfaces.clone(),
            self.world.step_count,
        )
    }

    /// Executes the `i`-th valid action without building a [`StepResult`].
    /// Returns false (and does nothing) once the episode is over or when `i`
    /// is out of range.
    pub fn advance(&mut self, i: usize) -> bool {
        if self.frozen.is_some() || i >= self.valid.len() {
            return false;
        }
        let action = self.valid[i];
        let outcome = execute(&mut self.world, &action, &self.task);
        self.observation = outcome.response;
        self.refresh();
        if self.world.is_terminal() {
            self.frozen = Some(self.result());
        }
        true
    }

    pub fn step_index(&mut self, i: usize) -> StepResult {
        if self.frozen.is_none() && !self.advance(i) {
            self.world.step_count += 1;
            self.observation = UNRECOGNIZED.to_owned();
        }
        self.result()
    }

    pub fn step(&mut self, input: &str) -> StepResult {
        if self.frozen.is_some() {
            return self.result();
        }
        match match_input_with(input, self.surfaces.len(), |i| self.surfaces[i].as_str()) {
            Some(i) => self.step_index(i),
            None => {
                self.world.step_count += 1;
                self.observation = UNRECOGNIZED.to_owned();
                self.result()
            }
        }
    }
}

#[derive(Clone, Debug)]
enum Engine {
    Online(Box<OnlineGame>),
    Precrawled(TreeCursor),
}

/// One episode, bound to a config until the next reset.
#[derive(Clone, Debug)]
pub struct Session {
    config: EpisodeConfig,
    engine: Engine,
}

impl Session {
    /// Starts a fresh episode. Precrawled mode needs a tree crawled for
    /// exactly this config.
    pub fn reset(
        config: &EpisodeConfig,
        mode: Mode,
        tree: Option<Arc<PrecrawledTree>>,
    ) -> Result<(Self, StepResult), SessionError> {
        config.check()?;
        let engine = match mode {
            Mode::Online => {
                let episode = make_episode(&EpisodeConfig { generate_gold: false, ..*config })?;
                Engine::Online(Box::new(OnlineGame::new(episode)))
            }
            Mode::Precrawled => {
                let tree = tree.ok_or(SessionError::MissingTree)?;
                if !tree.header.matches(config) {
                    return Err(SessionError::TreeMismatch);
                }
                Engine::Precrawled(TreeCursor::new(tree))
            }
        };
        let session = Self { config: *config, engine };
        let first = session.current();
        Ok((session, first))
    }

    pub fn config(&self) -> &EpisodeConfig {
        &self.config
    }

    pub fn mode(&self) -> Mode {
        match self.engine {
            Engine::Online(_) => Mode::Online,
            Engine::Precrawled(_) => Mode::Precrawled,
        }
    }

    pub fn current(&self) -> StepResult {
        match &self.engine {
            Engine::Online(g) => g.result(),
            Engine::Precrawled(c) => c.result(),
        }
    }

    pub fn step(&mut self, input: &str) -> StepResult {
        match &mut self.engine {
            Engine::Online(g) => g.step(input),
            Engine::Precrawled(c) => c.step(input),
        }
    }

    pub fn step_index(&mut self, i: usize) -> StepResult {
        match &mut self.engine {
            Engine::Online(g) => g.step_index(i),
            Engine::Precrawled(c) => c.step_index(i),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::GameKind;
    use crate::variation::Difficulty;

    fn online(game: GameKind, seed: u64) -> Session {
        Session::reset(&EpisodeConfig::new(game, seed, Difficulty::Easy), Mode::Online, None).unwrap().0
    }

    #[test]
    fn cooking_starts_in_kitchen() {
        let s = online(GameKind::CookingWorld, 0);
        let r = s.current();
        assert!(r.observation.starts_with("You are in the kitchen."));
        assert_eq!(r.observation, r.look);
        assert_eq!(r.step_count, 0);
        assert_eq!(r.raw_score, 0);
        assert!(!r.valid_actions.is_empty());
    }

    #[test]
    fn unrecognized_input_only_advances_the_counter() {
        let mut s = online(GameKind::Twc, 2);
        let before = s.current();
        let after = s.step("xyzzy");
        assert_eq!(after.observation, UNRECOGNIZED);
        assert_eq!(after.step_count, 1);
        assert_eq!(StepResult { observation: before.observation.clone(), step_count: 0, ..after }, before);
    }

    #[test]
    fn look_around_echoes_look() {
        let mut s = online(GameKind::CoinCollector, 5);
        let r = s.step("look around");
        assert_eq!(r.observation, r.look);
    }

    #[test]
    fn terminal_result_is_frozen() {
        let config = EpisodeConfig::new(GameKind::CoinCollector, 11, Difficulty::Easy);
        let gold = make_episode(&config).unwrap().gold.unwrap();
        let (mut s, _) = Session::reset(&config, Mode::Online, None).unwrap();
        let mut last = None;
        for cmd in &gold {
            last = Some(s.step(cmd));
        }
        let last = last.unwrap();
        assert!(last.succeeded);
        assert_eq!(last.normalized_score, 1.0);
        assert!(last.valid_actions.is_empty());
        assert_eq!(s.step("look around"), last);
        assert_eq!(s.step("xyzzy"), last);
    }

    #[test]
    fn precrawled_mode_requires_tree() {
        let config = EpisodeConfig::new(GameKind::CoinCollector, 1, Difficulty::Easy);
        assert!(matches!(Session::reset(&config, Mode::Precrawled, None), Err(SessionError::MissingTree)));
    }
}
