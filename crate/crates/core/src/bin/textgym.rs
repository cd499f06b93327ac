use std::io::{self, BufRead, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::thread;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use textgym::bench::{run_bench, BenchConfig};
use textgym::mapgen::generate_map;
use textgym::precrawl::{crawl_sampled, crawl_with, load_tree, save_tree, CrawlOptions, DEFAULT_BUDGET_BYTES};
use textgym::rng::SplitMix64;
use textgym::server::{serve_http, serve_tcp, ConfigFields, Service};
use textgym::session::{Mode, Session};
use textgym::{make_episode, EpisodeConfig, PrecrawledTree};

#[derive(Parser)]
#[command(name = "textgym", version, about = "Deterministic text-game engine: CookingWorld, TWC, Coin Collector")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// cookingworld, twc or coin
    #[arg(long, default_value = "cookingworld")]
    game: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Must agree with the seed's own fold (last digit 0-7 train, 8 dev, 9 test)
    #[arg(long)]
    fold: Option<String>,
    /// easy, medium or hard; sets defaults for the counts below
    #[arg(long)]
    difficulty: Option<String>,
    #[arg(long)]
    num_locations: Option<usize>,
    #[arg(long)]
    num_ingredients: Option<usize>,
    #[arg(long)]
    num_distractors: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    with_doors: Option<bool>,
}

impl ConfigArgs {
    fn config(&self) -> Result<EpisodeConfig, String> {
        ConfigFields {
            game: Some(self.game.clone()),
            seed: Some(self.seed),
            fold: self.fold.clone(),
            difficulty: self.difficulty.clone(),
            num_locations: self.num_locations,
            num_ingredients: self.num_ingredients,
            num_distractors: self.num_distractors,
            with_doors: self.with_doors,
        }
        .to_config()
        .map_err(|e| e.to_string())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Play an episode in the terminal
    Play {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "online")]
        mode: String,
        /// Tree file for precrawled mode; crawled on the fly when absent
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        max_depth: u32,
    },
    /// Print an episode's first step and gold path as JSON
    Gen {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Crawl an episode's game tree and save it
    Crawl {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 3)]
        max_depth: u32,
        /// Output file; `.gz` compresses
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET_BYTES)]
        budget_bytes: u64,
        /// Record only this many random paths instead of every path
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Random-agent throughput benchmark
    Bench {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "online")]
        mode: String,
        #[arg(long, default_value_t = 100_000)]
        steps: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long, default_value_t = 100)]
        episodes: u64,
        #[arg(long, default_value_t = 100)]
        episode_steps: u32,
        /// Skip rendering text that a lean client would not read
        #[arg(long)]
        lean: bool,
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        max_depth: u32,
    },
    /// Serve wire protocol v1 over TCP (and optionally HTTP)
    Serve {
        #[arg(long, default_value = "127.0.0.1:7878")]
        addr: String,
        #[arg(long)]
        http: Option<String>,
        /// Precrawled trees to preload
        #[arg(long)]
        tree: Vec<PathBuf>,
    },
    /// Check a tree file and report its size
    ValidateTree { path: PathBuf },
    /// Print a generated map as ASCII art (diagnostic only)
    Map {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 11)]
        num_locations: usize,
        #[arg(long)]
        with_doors: bool,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::from_name(s).ok_or_else(|| format!("unknown mode {s:?} (online, precrawled)"))
}

fn obtain_tree(config: &EpisodeConfig, path: Option<&PathBuf>, depth: u32) -> Result<Arc<PrecrawledTree>, String> {
    match path {
        Some(p) => load_tree(p).map(Arc::new).map_err(|e| format!("{}: {e}", p.display())),
        None => crawl_with(config, CrawlOptions::depth(depth)).map(Arc::new).map_err(|e| e.to_string()),
    }
}

fn print_json(v: &impl serde::Serialize) {
    // A closed pipe (`| head`) is not an error worth reporting.
    let _ = writeln!(io::stdout().lock(), "{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn play(config: EpisodeConfig, mode: Mode, tree: Option<Arc<PrecrawledTree>>) -> Result<(), String> {
    let (mut session, mut r) = Session::reset(&config, mode, tree).map_err(|e| e.to_string())?;
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    loop {
        println!("\n{}", r.observation);
        println!("[score {}/{}  step {}]", r.raw_score, r.max_score, r.step_count);
        if r.succeeded {
            println!("*** You succeeded! ***");
            return Ok(());
        }
        if r.failed {
            println!("*** Task failed. ***");
            return Ok(());
        }
        for (i, a) in r.valid_actions.iter().enumerate() {
            println!("  {i:>3}. {a}");
        }
        print!("> ");
        io::stdout().flush().map_err(|e| e.to_string())?;
        let Some(line) = lines.next() else { return Ok(()) };
        let line = line.map_err(|e| e.to_string())?;
        let line = line.trim();
        if line == "quit" || line == "exit" {
            return Ok(());
        }
        r = match line.parse::<usize>() {
            Ok(i) => session.step_index(i),
            Err(_) => session.step(line),
        };
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Play { config, mode, tree, max_depth } => {
            let config = config.config()?;
            let mode = parse_mode(&mode)?;
            let tree = match mode {
                Mode::Precrawled => Some(obtain_tree(&config, tree.as_ref(), max_depth)?),
                Mode::Online => None,
            };
            play(config, mode, tree)
        }
        Command::Gen { config } => {
            let config = config.config()?;
            let ep = make_episode(&config).map_err(|e| e.to_string())?;
            let (_, first) = Session::reset(&config, Mode::Online, None).map_err(|e| e.to_string())?;
            print_json(&json!({
                "config": ConfigFields::from_config(&config),
                "result": first,
                "gold": ep.gold,
            }));
            Ok(())
        }
        Command::Crawl { config, max_depth, out, budget_bytes, sample } => {
            let config = config.config()?;
            let t0 = Instant::now();
            let tree = match sample {
                Some(paths) => crawl_sampled(&config, max_depth, paths, config.seed),
                None => crawl_with(&config, CrawlOptions { max_depth, budget_bytes }),
            }
            .map_err(|e| e.to_string())?;
            let crawl_secs = t0.elapsed().as_secs_f64();
            let bytes = save_tree(&tree, &out).map_err(|e| e.to_string())?;
            print_json(&json!({
                "path": out.display().to_string(),
                "maxDepth": max_depth,
                "nodeCount": tree.len(),
                "distinctStrings": tree.distinct_strings(),
                "bytes": bytes,
                "crawlSeconds": crawl_secs,
            }));
            Ok(())
        }
        Command::Bench { config, mode, steps, threads, episodes, episode_steps, lean, tree, max_depth } => {
            let config = config.config()?;
            let mode = parse_mode(&mode)?;
            let mut b = BenchConfig::new(config.game, config.params, mode, steps);
            b.num_threads = threads;
            b.num_episodes = episodes;
            b.episode_step_limit = episode_steps;
            b.first_seed = config.seed;
            b.lean = lean;
            if mode == Mode::Precrawled {
                b.tree = Some(obtain_tree(&config, tree.as_ref(), max_depth)?);
            }
            print_json(&run_bench(&b).map_err(|e| e.to_string())?);
            Ok(())
        }
        Command::Serve { addr, http, tree } => {
            let service = Arc::new(Service::new());
            for p in &tree {
                let t = load_tree(p).map_err(|e| format!("{}: {e}", p.display()))?;
                service.add_tree(Arc::new(t));
            }
            if let Some(http) = http {
                let listener = TcpListener::bind(&http).map_err(|e| format!("bind {http}: {e}"))?;
                eprintln!("http on {http}");
                let service = Arc::clone(&service);
                thread::spawn(move || serve_http(listener, service));
            }
            let listener = TcpListener::bind(&addr).map_err(|e| format!("bind {addr}: {e}"))?;
            eprintln!("tcp on {addr}");
            serve_tcp(listener, service).map_err(|e| e.to_string())
        }
        Command::ValidateTree { path } => {
            let tree = load_tree(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            print_json(&json!({
                "ok": true,
                "header": tree.header,
                "distinctStrings": tree.distinct_strings(),
            }));
            Ok(())
        }
        Command::Map { seed, num_locations, with_doors } => {
            let layout =
                generate_map(&mut SplitMix64::new(seed), num_locations, with_doors).map_err(|e| e.to_string())?;
            let _ = write!(io::stdout().lock(), "{}", layout.ascii());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
