//! Random-agent throughput benchmark.
//!
//! Each worker thread owns its sessions and picks uniformly among the valid
//! actions with its own seeded generator. Online episode generation is
//! timed separately from stepping, so `sps` covers stepping only. Precrawled
//! runs restart the cursor in place; that cost is counted as stepping.

use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::action::{enumerate_into, execute, BoundAction, Scratch};
use crate::games::GameKind;
use crate::precrawl::{PrecrawledTree, TreeCursor};
use crate::rng::{mix64, SplitMix64};
use crate::session::{Mode, OnlineGame};
use crate::variation::{make_episode, EpisodeConfig, Params};

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub game: GameKind,
    pub params: Params,
    pub mode: Mode,
    /// Distinct episodes (consecutive seeds from `first_seed`) cycled through.
    pub num_episodes: u64,
    /// Total step budget, split across threads.
    pub max_steps: u64,
    pub num_threads: usize,
    /// An episode is restarted after this many steps even if unfinished.
    pub episode_step_limit: u32,
    pub first_seed: u64,
    /// Seed of the random agents.
    pub agent_seed: u64,
    /// Skip rendering look/inventory/action strings (online) or reading
    /// node text (precrawled).
    pub lean: bool,
    /// Required in precrawled mode.
    pub tree: Option<Arc<PrecrawledTree>>,
}

impl BenchConfig {
    pub fn new(game: GameKind, params: Params, mode: Mode, max_steps: u64) -> Self {
        Self {
            game,
            params,
            mode,
            num_episodes: 100,
            max_steps,
            num_threads: 1,
            episode_step_limit: 100,
            first_seed: 0,
            agent_seed: 0,
            lean: false,
            tree: None,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ThreadReport {
    pub steps: u64,
    pub episodes: u64,
    pub step_seconds: f64,
    pub generation_seconds: f64,
    pub sps: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub game: GameKind,
    pub mode: Mode,
    pub lean: bool,
    pub threads: usize,
    pub total_steps: u64,
    pub episodes: u64,
    pub wall_seconds: f64,
    pub generation_seconds: f64,
    /// Sum of the per-thread rates.
    pub aggregate_sps: f64,
    /// Steps over wall-clock time, generation included.
    pub wall_sps: f64,
    pub per_thread: Vec<ThreadReport>,
    /// Valid-action bytes produced per step (full online runs only); shows
    /// what serializing the action list would add.
    pub mean_action_bytes: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("precrawled benchmark needs a tree")]
    MissingTree,
    #[error("episode {seed}: {source}")]
    Episode { seed: u64, source: crate::variation::EpisodeError },
}

fn rate(steps: u64, secs: f64) -> f64 {
    if steps == 0 || secs <= 0.0 {
        0.0
    } else {
        steps as f64 / secs
    }
}

fn worker(cfg: &BenchConfig, t: usize, budget: u64) -> Result<(ThreadReport, u64), BenchError> {
    let mut rng = SplitMix64::new(mix64(cfg.agent_seed ^ (t as u64).wrapping_mul(0x9E37_79B9)));
    let mut rep = ThreadReport::default();
    let mut action_bytes = 0u64;
    let mut gen = Duration::ZERO;
    let mut episode_index = t as u64;
    let mut next_config = || {
        let seed = cfg.first_seed + episode_index % cfg.num_episodes.max(1);
        episode_index += cfg.num_threads as u64;
        EpisodeConfig { generate_gold: false, ..EpisodeConfig::with_params(cfg.game, seed, cfg.params) }
    };
    let started = Instant::now();
    match (cfg.mode, cfg.lean) {
        (Mode::Online, false) => {
            while rep.steps < budget {
                let g0 = Instant::now();
                let c = next_config();
                let ep = make_episode(&c).map_err(|source| BenchError::Episode { seed: c.seed, source })?;
                let mut game = OnlineGame::new(ep);
                gen += g0.elapsed();
                rep.episodes += 1;
                let mut n = 0;
                while n < cfg.episode_step_limit && rep.steps < budget && !game.is_terminal() {
                    let k = game.valid_actions().len();
                    game.advance(rng.index(k));
                    action_bytes += game.valid_surfaces().iter().map(|s| s.len() as u64).sum::<u64>();
                    std::hint::black_box((game.observation(), game.score()));
                    rep.steps += 1;
                    n += 1;
                }
            }
        }
        (Mode::Online, true) => {
            let mut scratch = Scratch::default();
            let mut valid: Vec<BoundAction> = Vec::new();
            while rep.steps < budget {
                let g0 = Instant::now();
                let c = next_config();
                let ep = make_episode(&c).map_err(|source| BenchError::Episode { seed: c.seed, source })?;
                let (mut world, task) = (ep.world, ep.task);
                enumerate_into(&world, &task, &mut scratch, &mut valid);
                gen += g0.elapsed();
                rep.episodes += 1;
                let mut n = 0;
                while n < cfg.episode_step_limit && rep.steps < budget && !valid.is_empty() {
                    let a = valid[rng.index(valid.len())];
                    std::hint::black_box(execute(&mut world, &a, &task));
                    enumerate_into(&world, &task, &mut scratch, &mut valid);
                    rep.steps += 1;
                    n += 1;
                }
            }
        }
        (Mode::Precrawled, lean) => {
            let tree = cfg.tree.clone().ok_or(BenchError::MissingTree)?;
            let mut cursor = TreeCursor::new(Arc::clone(&tree));
            rep.episodes = 1;
            while rep.steps < budget {
                let node = cursor.current_node();
                if node.terminal || node.valid.is_empty() {
                    cursor = TreeCursor::new(Arc::clone(&tree));
                    rep.episodes += 1;
                    continue;
                }
                let k = node.valid.len();
                if !cursor.advance(rng.index(k)) {
                    cursor = TreeCursor::new(Arc::clone(&tree));
                    rep.episodes += 1;
                }
                if !lean {
                    let n = cursor.current_node();
                    std::hint::black_box((cursor.observation(), tree.str(n.look), tree.str(n.inv), n.score));
                    std::hint::black_box(n.valid.iter().map(|&v| tree.str(v)).last());
                }
                rep.steps += 1;
            }
        }
    }
    let total = started.elapsed();
    rep.generation_seconds = gen.as_secs_f64();
    rep.step_seconds = (total - gen).as_secs_f64();
    rep.sps = rate(rep.steps, rep.step_seconds);
    Ok((rep, action_bytes))
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport, BenchError> {
    if cfg.mode == Mode::Precrawled && cfg.tree.is_none() {
        return Err(BenchError::MissingTree);
    }
    let threads = cfg.num_threads.max(1);
    let cfg = BenchConfig { num_threads: threads, ..cfg.clone() };
    let share = |t: usize| cfg.max_steps / threads as u64 + u64::from((t as u64) < cfg.max_steps % threads as u64);
    let started = Instant::now();
    let results: Vec<Result<(ThreadReport, u64), BenchError>> = thread::scope(|s| {
        let handles: Vec<_> = (0..threads).map(|t| {
            let cfg = &cfg;
            s.spawn(move || worker(cfg, t, share(t)))
        }).collect();
        handles.into_iter().map(|h| h.join().expect("bench worker panicked")).collect()
    });
    let wall = started.elapsed().as_secs_f64();
    let mut per_thread = Vec::with_capacity(threads);
    let mut action_bytes = 0;
    for r in results {
        let (rep, bytes) = r?;
        action_bytes += bytes;
        per_thread.push(rep);
    }
    let total_steps: u64 = per_thread.iter().map(|r| r.steps).sum();
    let online_full = cfg.mode == Mode::Online && !cfg.lean;
    Ok(BenchReport {
        game: cfg.game,
        mode: cfg.mode,
        lean: cfg.lean,
        threads,
        total_steps,
        episodes: per_thread.iter().map(|r| r.episodes).sum(),
        wall_seconds: wall,
        generation_seconds: per_thread.iter().map(|r| r.generation_seconds).sum(),
        aggregate_sps: per_thread.iter().map(|r| r.sps).sum(),
        wall_sps: rate(total_steps, wall),
        mean_action_bytes: if online_full && total_steps > 0 { action_bytes as f64 / total_steps as f64 } else { 0.0 },
        per_thread,
    })
}
