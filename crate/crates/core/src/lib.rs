//! A fast, deterministic engine for three text games: CookingWorld, TextWorld
//! Commonsense and Coin Collector.
//!
//! Episodes are generated from an [`EpisodeConfig`] and played either online
//! (every step runs the engine) or from a precrawled tree of every action
//! path up to a depth bound. See the README for the CLI and wire protocol.

pub mod action;
pub mod bench;
pub mod games;
pub mod library;
pub mod mapgen;
pub mod precrawl;
pub mod render;
pub mod rng;
pub mod server;
pub mod session;
pub mod variation;
pub mod world;

pub use action::{enumerate_valid_actions, execute, match_input, BoundAction, StepOutcome};
pub use games::{gold_path, GameKind, ScoreState, Task};
pub use precrawl::{crawl, load_tree, save_tree, PrecrawledTree};
pub use session::{Mode, Session, SessionError, StepResult};
pub use variation::{fold_of_seed, make_episode, Difficulty, Episode, EpisodeConfig, EpisodeError, Fold, Params};
pub use world::WorldState;
