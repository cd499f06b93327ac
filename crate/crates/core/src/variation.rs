//! Seeds, folds, difficulty parameters and episode construction.
//!
//! Seeds are split into folds by their last decimal digit: 0 through 7 are
//! training seeds, 8 is development and 9 is test. Every episode draws from
//! three independent substreams (map, task, distractors) so that changing
//! one parameter group never perturbs the others.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::games::{self, GameKind, Task};
use crate::mapgen::MapError;
use crate::rng::{mix64, tag_salt, SplitMix64};
use crate::world::WorldState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fold {
    Train,
    Dev,
    Test,
}

impl Fold {
    pub const ALL: [Fold; 3] = [Self::Train, Self::Dev, Self::Test];

    pub fn name(self) -> &'static str {
        match self {
            Self::Train => "train",
            Self::Dev => "dev",
            Self::Test => "test",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Some(Self::Train),
            "dev" | "development" => Some(Self::Dev),
            "test" => Some(Self::Test),
            _ => None,
        }
    }

    /// The `n`-th seed (counting from zero) that belongs to this fold.
    pub fn nth_seed(self, n: u64) -> u64 {
        match self {
            Self::Train => n / 8 * 10 + n % 8,
            Self::Dev => n * 10 + 8,
            Self::Test => n * 10 + 9,
        }
    }
}

impl fmt::Display for Fold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn fold_of_seed(seed: u64) -> Fold {
    match seed % 10 {
        8 => Fold::Dev,
        9 => Fold::Test,
        _ => Fold::Train,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    #[default]
    Easy,
    Medium,
    Hard,
}

impl Difficulty {
    pub fn from_name(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "easy" => Some(Self::Easy),
            "medium" => Some(Self::Medium),
            "hard" => Some(Self::Hard),
            _ => None,
        }
    }
}

/// Difficulty knobs. Each game reads the fields it understands: cooking
/// uses all four counts, coin ignores `num_ingredients`, and TWC takes its
/// room and target counts from `difficulty`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Params {
    pub num_locations: usize,
    pub num_ingredients: usize,
    pub num_distractors: usize,
    pub with_doors: bool,
    pub difficulty: Difficulty,
}

pub const MAX_INGREDIENTS: usize = 5;
pub const MAX_DISTRACTORS: usize = 10;

impl Params {
    pub fn preset(game: GameKind, difficulty: Difficulty) -> Self {
        use Difficulty::*;
        let (num_locations, num_ingredients, num_distractors, with_doors) = match (game, difficulty) {
            (GameKind::CookingWorld, Easy) => (3, 2, 2, false),
            (GameKind::CookingWorld, Medium) => (6, 3, 5, true),
            (GameKind::CookingWorld, Hard) => (11, 5, 10, true),
            (GameKind::Twc, Easy) => (1, 0, 0, false),
            (GameKind::Twc, Medium) => (1, 0, 2, false),
            (GameKind::Twc, Hard) => (2, 0, 4, true),
            (GameKind::CoinCollector, Easy) => (3, 0, 0, false),
            (GameKind::CoinCollector, Medium) => (6, 0, 2, true),
            (GameKind::CoinCollector, Hard) => (11, 0, 5, true),
        };
        Self { num_locations, num_ingredients, num_distractors, with_doors, difficulty }
    }

    pub fn validate(&self, game: GameKind) -> Result<(), EpisodeError> {
        let bad = |what: &str| Err(EpisodeError::InvalidParams(what.to_string()));
        if game != GameKind::Twc && !(1..=crate::mapgen::MAX_LOCATIONS).contains(&self.num_locations) {
            return bad("num_locations must be between 1 and 11");
        }
        if game == GameKind::CookingWorld && !(1..=MAX_INGREDIENTS).contains(&self.num_ingredients) {
            return bad("num_ingredients must be between 1 and 5");
        }
        if self.num_distractors > MAX_DISTRACTORS {
            return bad("num_distractors must be between 0 and 10");
        }
        Ok(())
    }
}

/// Everything needed to regenerate an episode bit for bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub game: GameKind,
    pub seed: u64,
    pub fold: Fold,
    pub params: Params,
    #[serde(default = "yes")]
    pub generate_gold: bool,
}

fn yes() -> bool {
    true
}

impl EpisodeConfig {
    /// A config for the game's preset at `difficulty`, in the seed's own fold.
    pub fn new(game: GameKind, seed: u64, difficulty: Difficulty) -> Self {
        Self::with_params(game, seed, Params::preset(game, difficulty))
    }

    pub fn with_params(game: GameKind, seed: u64, params: Params) -> Self {
        Self { game, seed, fold: fold_of_seed(seed), params, generate_gold: true }
    }

    pub fn check(&self) -> Result<(), EpisodeError> {
        let expected = fold_of_seed(self.seed);
        if self.fold != expected {
            return Err(EpisodeError::FoldMismatch { seed: self.seed, requested: self.fold, actual: expected });
        }
        self.params.validate(self.game)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EpisodeError {
    #[error("seed {seed} belongs to the {actual} fold, not {requested}")]
    FoldMismatch { seed: u64, requested: Fold, actual: Fold },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("map generation failed: {0}")]
    Map(#[from] MapError),
    #[error("the {fold} pool has only {available} candidates, {needed} needed")]
    PoolExhausted { fold: Fold, needed: usize, available: usize },
}

/// Per-episode root generator. Substreams are keyed by tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EpisodeRng {
    base: u64,
}

pub const STREAM_MAP: &str = "map";
pub const STREAM_TASK: &str = "task";
pub const STREAM_DISTRACTORS: &str = "distractors";

impl EpisodeRng {
    pub fn stream(&self, tag: &str) -> SplitMix64 {
        SplitMix64::new(mix64(self.base ^ tag_salt(tag)))
    }
}

/// Mixes the game salt and the seed through the splitmix finalizer.
pub fn derive_rng(config: &EpisodeConfig) -> EpisodeRng {
    EpisodeRng { base: mix64(config.game.salt() ^ mix64(config.seed)) }
}

/// A generated episode: initial world, task and (optionally) gold path.
#[derive(Clone, Debug)]
pub struct Episode {
    pub config: EpisodeConfig,
    pub world: WorldState,
    pub task: Task,
    pub gold: Option<Vec<String>>,
}

pub fn make_episode(config: &EpisodeConfig) -> Result<Episode, EpisodeError> {
    config.check()?;
    let rng = derive_rng(config);
    let (world, task) = match config.game {
        GameKind::CookingWorld => games::generate_cooking(&rng, config.fold, &config.params)?,
        GameKind::Twc => games::generate_twc(&rng, config.fold, &config.params)?,
        GameKind::CoinCollector => games::generate_coin(&rng, config.fold, &config.params)?,
    };
    let gold = config.generate_gold.then(|| games::gold_path(&world, &task));
    Ok(Episode { config: *config, world, task, gold })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_follow_last_digit() {
        assert_eq!(fold_of_seed(0), Fold::Train);
        assert_eq!(fold_of_seed(18), Fold::Dev);
        assert_eq!(fold_of_seed(29), Fold::Test);
        let mut counts = [0; 3];
        for s in 0..10_000 {
            counts[fold_of_seed(s) as usize] += 1;
        }
        assert_eq!(counts, [8000, 1000, 1000]);
    }

    #[test]
    fn nth_seed_enumerates_each_fold_in_order() {
        for fold in Fold::ALL {
            let direct: Vec<u64> = (0..200).filter(|&s| fold_of_seed(s) == fold).take(15).collect();
            let nth: Vec<u64> = (0..15).map(|n| fold.nth_seed(n)).collect();
            assert_eq!(direct, nth, "{fold}");
        }
    }

    #[test]
    fn streams_differ_by_game_and_tag() {
        let a = EpisodeConfig::new(GameKind::CoinCollector, 7, Difficulty::Easy);
        let b = EpisodeConfig { game: GameKind::Twc, ..a };
        let ra = derive_rng(&a);
        assert_ne!(ra.stream(STREAM_MAP).next_u64(), derive_rng(&b).stream(STREAM_MAP).next_u64());
        assert_ne!(ra.stream(STREAM_MAP).next_u64(), ra.stream(STREAM_TASK).next_u64());
        let first: Vec<u64> = std::iter::repeat_with({
            let mut s = ra.stream(STREAM_TASK);
            move || s.next_u64()
        })
        .take(1000)
        .collect();
        let mut again = derive_rng(&a).stream(STREAM_TASK);
        assert!(first.iter().all(|&x| x == again.next_u64()));
    }

    #[test]
    fn fold_guard_rejects_mismatch() {
        let mut c = EpisodeConfig::new(GameKind::CoinCollector, 1, Difficulty::Easy);
        c.fold = Fold::Dev;
        assert!(matches!(make_episode(&c), Err(EpisodeError::FoldMismatch { .. })));
    }

    #[test]
    fn params_out_of_range_are_rejected() {
        let mut c = EpisodeConfig::new(GameKind::CookingWorld, 3, Difficulty::Easy);
        c.params.num_ingredients = 6;
        assert!(matches!(c.check(), Err(EpisodeError::InvalidParams(_))));
        c.params.num_ingredients = 2;
        c.params.num_locations = 0;
        assert!(c.check().is_err());
    }
}
