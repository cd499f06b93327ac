//! Precrawled game trees: every action path of an episode up to a depth
//! bound, stored so that playback is a child-index lookup.
//!
//! On disk a tree is one JSON document:
//!
//! ```text
//! {"header": {"game", "seed", "fold", "params", "maxDepth", "nodeCount", "formatVersion"},
//!  "nodes": [{"obs", "look", "inv",
//!             "score": {"raw", "max", "normalized": "raw/max", "succeeded", "failed"},
//!             "valid": [...], "children": {"action": index, ...}, "terminal"}, ...]}
//! ```
//!
//! Node 0 is the root. Every other node is the child of exactly one node
//! with a smaller index. Paths ending in `.gz` are gzip-compressed.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::action::{enumerate_into, execute, match_input_with, BoundAction, Scratch};
use crate::games::{GameKind, ScoreState, Task};
use crate::render::{render_inventory, render_observation};
use crate::rng::SplitMix64;
use crate::session::{StepResult, EXHAUSTED, UNRECOGNIZED};
use crate::variation::{make_episode, EpisodeConfig, EpisodeError, Fold, Params};
use crate::world::WorldState;

pub const FORMAT_VERSION: u32 = 1;
pub const DEFAULT_BUDGET_BYTES: u64 = 1 << 30;
/// Marks a valid action whose subtree was not crawled.
pub const NO_CHILD: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TreeHeader {
    pub game: GameKind,
    pub seed: u64,
    pub fold: Fold,
    pub params: Params,
    pub max_depth: u32,
    pub node_count: u64,
    pub format_version: u32,
}

impl TreeHeader {
    pub fn matches(&self, c: &EpisodeConfig) -> bool {
        self.game == c.game && self.seed == c.seed && self.fold == c.fold && self.params == c.params
    }

    pub fn config(&self) -> EpisodeConfig {
        EpisodeConfig { game: self.game, seed: self.seed, fold: self.fold, params: self.params, generate_gold: false }
    }
}

/// Strings are interned per tree; fields hold indices into the table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub obs: u32,
    pub look: u32,
    pub inv: u32,
    pub score: ScoreState,
    pub valid: Vec<u32>,
    /// Aligned with `valid`; [`NO_CHILD`] where the path was not crawled.
    pub children: Vec<u32>,
    pub terminal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecrawledTree {
    pub header: TreeHeader,
    strings: Vec<Box<str>>,
    nodes: Vec<TreeNode>,
}

#[derive(Default)]
struct Interner {
    strings: Vec<Box<str>>,
    index: HashMap<Box<str>, u32>,
}

impl Interner {
    fn intern(&mut self, s: &str) -> u32 {
        if let Some(&i) = self.index.get(s) {
            return i;
        }
        let i = self.strings.len() as u32;
        self.strings.push(s.into());
        self.index.insert(s.into(), i);
        i
    }
}

impl PrecrawledTree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, i: u32) -> &TreeNode {
        &self.nodes[i as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    #[inline]
    pub fn str(&self, i: u32) -> &str {
        &self.strings[i as usize]
    }

    pub fn distinct_strings(&self) -> usize {
        self.strings.len()
    }

    /// Depth of every node.
    pub fn depths(&self) -> Vec<u32> {
        let mut depth = vec![0u32; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            for &c in n.children.iter().filter(|&&c| c != NO_CHILD) {
                depth[c as usize] = depth[i] + 1;
            }
        }
        depth
    }

    /// Playback result for node `i` reached after `steps` steps.
    pub fn result_at(&self, i: u32, observation: &str, steps: u32) -> StepResult {
        let n = self.node(i);
        StepResult::assemble(
            observation,
            self.str(n.look),
            self.str(n.inv),
            n.score,
            n.valid.iter().map(|&v| self.str(v).to_owned()).collect(),
            steps,
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CrawlError {
    #[error(transparent)]
    Episode(#[from] EpisodeError),
    #[error(
        "size budget of {budget} bytes exceeded after {nodes} nodes (estimate {estimated} bytes); \
         nodes per depth so far: {per_depth:?}"
    )]
    BudgetExceeded { budget: u64, estimated: u64, nodes: u64, per_depth: Vec<u64> },
}

#[derive(Clone, Copy, Debug)]
pub struct CrawlOptions {
    pub max_depth: u32,
    pub budget_bytes: u64,
}

impl CrawlOptions {
    pub fn depth(max_depth: u32) -> Self {
        Self { max_depth, budget_bytes: DEFAULT_BUDGET_BYTES }
    }
}

/// Rough serialized size of a node; strings dominate.
fn estimate(strings: &[&str], valid: &[String]) -> u64 {
    let text: usize = strings.iter().map(|s| s.len() + 10).sum();
    let actions: usize = valid.iter().map(|s| 2 * s.len() + 16).sum();
    (text + actions + 128) as u64
}

struct Crawler<'a> {
    task: &'a Task,
    opts: CrawlOptions,
    interner: Interner,
    nodes: Vec<TreeNode>,
    per_depth: Vec<u64>,
    estimated: u64,
    scratch: Scratch,
    valid: Vec<BoundAction>,
}

impl Crawler<'_> {
    fn check_budget(&self) -> Result<(), CrawlError> {
        if self.estimated > self.opts.budget_bytes {
            return Err(CrawlError::BudgetExceeded {
                budget: self.opts.budget_bytes,
                estimated: self.estimated,
                nodes: self.nodes.len() as u64,
                per_depth: self.per_depth.clone(),
            });
        }
        Ok(())
    }

    /// Records the node for `world` and returns its index and valid actions.
    fn add_node(&mut self, world: &WorldState, obs: &str, depth: u32) -> Result<(u32, Vec<BoundAction>), CrawlError> {
        enumerate_into(world, self.task, &mut self.scratch, &mut self.valid);
        let actions = self.valid.clone();
        let surfaces: Vec<String> = actions.iter().map(|a| a.surface(world)).collect();
        let look = render_observation(world);
        let inv = render_inventory(world);
        self.estimated += estimate(&[obs, &look, &inv], &surfaces);
        let node = TreeNode {
            obs: self.interner.intern(obs),
            look: self.interner.intern(&look),
            inv: self.interner.intern(&inv),
            score: ScoreState::of(world, self.task),
            valid: surfaces.iter().map(|s| self.interner.intern(s)).collect(),
            children: vec![NO_CHILD; surfaces.len()],
            terminal: world.is_terminal(),
        };
        let idx = self.nodes.len() as u32;
        self.nodes.push(node);
        if self.per_depth.len() <= depth as usize {
            self.per_depth.resize(depth as usize + 1, 0);
        }
        self.per_depth[depth as usize] += 1;
        self.check_budget()?;
        Ok((idx, actions))
    }

    fn expand(&mut self, world: &WorldState, obs: &str, depth: u32) -> Result<u32, CrawlError> {
        let (idx, actions) = self.add_node(world, obs, depth)?;
        if depth < self.opts.max_depth && !world.is_terminal() {
            for (i, a) in actions.iter().enumerate() {
                let mut child = world.clone();
                let out = execute(&mut child, a, self.task);
                let c = self.expand(&child, &out.response, depth + 1)?;
                self.nodes[idx as usize].children[i] = c;
            }
        }
        Ok(idx)
    }

    fn finish(self, config: &EpisodeConfig) -> PrecrawledTree {
        PrecrawledTree {
            header: TreeHeader {
                game: config.game,
                seed: config.seed,
                fold: config.fold,
                params: config.params,
                max_depth: self.opts.max_depth,
                node_count: self.nodes.len() as u64,
                format_version: FORMAT_VERSION,
            },
            strings: self.interner.strings,
            nodes: self.nodes,
        }
    }
}

fn start(config: &EpisodeConfig) -> Result<(WorldState, Task), EpisodeError> {
    let ep = make_episode(&EpisodeConfig { generate_gold: false, ..*config })?;
    Ok((ep.world, ep.task))
}

/// Exhaustive depth-first crawl to `max_depth`, nodes in preorder.
pub fn crawl(config: &EpisodeConfig, max_depth: u32) -> Result<PrecrawledTree, CrawlError> {
    crawl_with(config, CrawlOptions::depth(max_depth))
}

pub fn crawl_with(config: &EpisodeConfig, opts: CrawlOptions) -> Result<PrecrawledTree, CrawlError> {
    let (world, task) = start(config)?;
    let mut c = Crawler {
        task: &task,
        opts,
        interner: Interner::default(),
        nodes: Vec::new(),
        per_depth: Vec::new(),
        estimated: 0,
        scratch: Scratch::default(),
        valid: Vec::new(),
    };
    let look = render_observation(&world);
    c.expand(&world, &look, 0)?;
    Ok(c.finish(config))
}

/// Partial tree holding `paths` uniformly random action paths of length up
/// to `max_depth` (shorter when a path ends the episode). Shared prefixes
/// share nodes; untaken actions have no child.
pub fn crawl_sampled(
    config: &EpisodeConfig,
    max_depth: u32,
    paths: usize,
    seed: u64,
) -> Result<PrecrawledTree, CrawlError> {
    let (world0, task) = start(config)?;
    let mut c = Crawler {
        task: &task,
        opts: CrawlOptions::depth(max_depth),
        interner: Interner::default(),
        nodes: Vec::new(),
        per_depth: Vec::new(),
        estimated: 0,
        scratch: Scratch::default(),
        valid: Vec::new(),
    };
    let look = render_observation(&world0);
    c.add_node(&world0, &look, 0)?;
    let mut rng = SplitMix64::new(seed);
    for _ in 0..paths {
        let mut world = world0.clone();
        let mut node = 0u32;
        for depth in 0..max_depth {
            if world.is_terminal() {
                break;
            }
            enumerate_into(&world, &task, &mut c.scratch, &mut c.valid);
            let i = rng.index(c.valid.len());
            let action = c.valid[i];
            let out = execute(&mut world, &action, &task);
            let next = c.nodes[node as usize].children[i];
            node = if next == NO_CHILD {
                let (n, _) = c.add_node(&world, &out.response, depth + 1)?;
                c.nodes[node as usize].children[i] = n;
                n
            } else {
                next
            };
        }
    }
    Ok(c.finish(config))
}

/// Playback position in a shared tree.
#[derive(Clone, Debug)]
pub struct TreeCursor {
    tree: Arc<PrecrawledTree>,
    node: u32,
    steps: u32,
    observation: Option<&'static str>,
}

impl TreeCursor {
    pub fn new(tree: Arc<PrecrawledTree>) -> Self {
        Self { tree, node: 0, steps: 0, observation: None }
    }

    pub fn tree(&self) -> &PrecrawledTree {
        &self.tree
    }

    pub fn node(&self) -> u32 {
        self.node
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn current_node(&self) -> &TreeNode {
        self.tree.node(self.node)
    }

    pub fn observation(&self) -> &str {
        self.observation.unwrap_or_else(|| self.tree.str(self.current_node().obs))
    }

    pub fn result(&self) -> StepResult {
        self.tree.result_at(self.node, self.observation(), self.steps)
    }

    /// Pointer-speed step by valid-action index. Returns false when the move
    /// was not possible (terminal node, bad index or uncrawled child).
    #[inline]
    pub fn advance(&mut self, i: usize) -> bool {
        let n = self.tree.node(self.node);
        if n.terminal {
            return false;
        }
        self.steps += 1;
        match n.children.get(i) {
            Some(&c) if c != NO_CHILD => {
                self.node = c;
                self.observation = None;
                true
            }
            Some(_) => {
                self.observation = Some(EXHAUSTED);
                false
            }
            None => {
                self.observation = Some(UNRECOGNIZED);
                false
            }
        }
    }

    pub fn step_index(&mut self, i: usize) -> StepResult {
        self.advance(i);
        self.result()
    }

    pub fn step(&mut self, input: &str) -> StepResult {
        let tree = &self.tree;
        let n = tree.node(self.node);
        if n.terminal {
            return self.result();
        }
        match match_input_with(input, n.valid.len(), |i| tree.str(n.valid[i])) {
            Some(i) => self.step_index(i),
            None => {
                self.steps += 1;
                self.observation = Some(UNRECOGNIZED);
                self.result()
            }
        }
    }
}

// ---- serialization ----

struct Children<'a>(&'a PrecrawledTree, &'a TreeNode);

impl Serialize for Children<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (tree, node) = (self.0, self.1);
        s.collect_map(
            node.valid
                .iter()
                .zip(&node.children)
                .filter(|(_, &c)| c != NO_CHILD)
                .map(|(&v, &c)| (tree.str(v), c)),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct ScoreRecord {
    raw: u32,
    max: u32,
    normalized: String,
    succeeded: bool,
    failed: bool,
}

#[derive(Serialize)]
struct NodeOut<'a> {
    obs: &'a str,
    look: &'a str,
    inv: &'a str,
    score: ScoreRecord,
    valid: Vec<&'a str>,
    children: Children<'a>,
    terminal: bool,
}

/// Writes the document to any sink.
pub fn write_tree<W: Write>(tree: &PrecrawledTree, mut w: W) -> io::Result<()> {
    w.write_all(b"{\"header\":")?;
    serde_json::to_writer(&mut w, &tree.header)?;
    w.write_all(b",\"nodes\":[")?;
    for (i, n) in tree.nodes.iter().enumerate() {
        if i > 0 {
            w.write_all(b",\n")?;
        }
        let out = NodeOut {
            obs: tree.str(n.obs),
            look: tree.str(n.look),
            inv: tree.str(n.inv),
            score: ScoreRecord {
                raw: n.score.raw,
                max: n.score.max_raw,
                normalized: n.score.fraction(),
                succeeded: n.score.succeeded,
                failed: n.score.failed,
            },
            valid: n.valid.iter().map(|&v| tree.str(v)).collect(),
            children: Children(tree, n),
            terminal: n.terminal,
        };
        serde_json::to_writer(&mut w, &out)?;
    }
    w.write_all(b"]}\n")?;
    w.flush()
}

pub fn tree_to_bytes(tree: &PrecrawledTree) -> Vec<u8> {
    let mut v = Vec::new();
    write_tree(tree, &mut v).expect("writing to memory cannot fail");
    v
}

fn is_gz(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}

/// Saves to `path`, gzip-compressed when it ends in `.gz`. Returns the
/// number of bytes written to disk.
pub fn save_tree(tree: &PrecrawledTree, path: impl AsRef<Path>) -> Result<u64, TreeError> {
    let path = path.as_ref();
    let file = BufWriter::new(File::create(path)?);
    if is_gz(path) {
        let mut gz = GzEncoder::new(file, Compression::default());
        write_tree(tree, &mut gz)?;
        gz.finish()?.flush()?;
    } else {
        write_tree(tree, file)?;
    }
    Ok(std::fs::metadata(path)?.len())
}

pub fn load_tree(path: impl AsRef<Path>) -> Result<PrecrawledTree, TreeError> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    let file = BufReader::new(File::open(path)?);
    if is_gz(path) {
        GzDecoder::new(file).read_to_end(&mut bytes)?;
    } else {
        let mut file = file;
        file.read_to_end(&mut bytes)?;
    }
    tree_from_bytes(&bytes)
}

#[derive(Debug, thiserror::Error)]
pub enum TreeError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("unsupported format version {found} (expected {FORMAT_VERSION})")]
    Version { found: u32 },
    #[error("header: {0}")]
    Header(String),
    #[error("node {node}: {reason}")]
    Node { node: usize, reason: String },
}

impl TreeError {
    /// The offending node, for node-level diagnostics.
    pub fn node(&self) -> Option<usize> {
        match self {
            Self::Node { node, .. } => Some(*node),
            _ => None,
        }
    }
}

/// `{"action": index}` with document order kept.
struct OrderedChildren(Vec<(String, u64)>);

impl<'de> Deserialize<'de> for OrderedChildren {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = OrderedChildren;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping actions to node indices")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut m: A) -> Result<Self::Value, A::Error> {
                let mut v = Vec::new();
                while let Some(entry) = m.next_entry::<String, u64>()? {
                    v.push(entry);
                }
                Ok(OrderedChildren(v))
            }
        }
        d.deserialize_map(V)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeIn {
    obs: String,
    look: String,
    inv: String,
    score: ScoreRecord,
    valid: Vec<String>,
    children: OrderedChildren,
    terminal: bool,
}

#[derive(Deserialize)]
struct DocIn<'a> {
    header: serde_json::Value,
    #[serde(borrow)]
    nodes: Vec<&'a RawValue>,
}

#[derive(Deserialize)]
struct VersionProbe {
    #[serde(rename = "formatVersion")]
    format_version: u32,
}

/// Parses and validates a document. Every structural rule is checked, and
/// failures name the node they were found at.
pub fn tree_from_bytes(bytes: &[u8]) -> Result<PrecrawledTree, TreeError> {
    let doc: DocIn = serde_json::from_slice(bytes).map_err(|e| TreeError::Malformed(e.to_string()))?;
    let probe: VersionProbe =
        serde_json::from_value(doc.header.clone()).map_err(|e| TreeError::Header(e.to_string()))?;
    if probe.format_version != FORMAT_VERSION {
        return Err(TreeError::Version { found: probe.format_version });
    }
    let header: TreeHeader = serde_json::from_value(doc.header).map_err(|e| TreeError::Header(e.to_string()))?;
    if header.node_count != doc.nodes.len() as u64 {
        return Err(TreeError::Header(format!(
            "nodeCount is {} but the document has {} nodes",
            header.node_count,
            doc.nodes.len()
        )));
    }
    if doc.nodes.is_empty() {
        return Err(TreeError::Header("a tree needs at least the root node".into()));
    }
    let n = doc.nodes.len();
    let mut interner = Interner::default();
    let mut nodes = Vec::with_capacity(n);
    let mut parent = vec![usize::MAX; n];
    for (i, raw) in doc.nodes.iter().enumerate() {
        let bad = |reason: String| TreeError::Node { node: i, reason };
        let node: NodeIn = serde_json::from_str(raw.get()).map_err(|e| bad(e.to_string()))?;
        let s = &node.score;
        if s.max == 0 {
            return Err(bad("score max must be positive".into()));
        }
        if s.raw > s.max {
            return Err(bad(format!("raw score {} exceeds max {}", s.raw, s.max)));
        }
        if s.normalized != format!("{}/{}", s.raw, s.max) {
            return Err(bad(format!("normalized {:?} does not equal raw/max", s.normalized)));
        }
        if s.succeeded && s.failed {
            return Err(bad("node is both succeeded and failed".into()));
        }
        if node.terminal != (s.succeeded || s.failed) {
            return Err(bad("terminal flag disagrees with the score".into()));
        }
        if node.terminal && !(node.children.0.is_empty() && node.valid.is_empty()) {
            return Err(bad("terminal node has actions or children".into()));
        }
        // Same interning order as the crawler, so equal trees compare equal.
        let (obs, look, inv) =
            (interner.intern(&node.obs), interner.intern(&node.look), interner.intern(&node.inv));
        let valid: Vec<u32> = node.valid.iter().map(|v| interner.intern(v)).collect();
        for (k, v) in valid.iter().enumerate() {
            if valid[..k].contains(v) {
                return Err(bad(format!("valid action {:?} listed twice", node.valid[k])));
            }
        }
        let mut children = vec![NO_CHILD; valid.len()];
        for (key, idx) in &node.children.0 {
            let Some(slot) = node.valid.iter().position(|v| v == key) else {
                return Err(bad(format!("child {key:?} is not a valid action")));
            };
            if children[slot] != NO_CHILD {
                return Err(bad(format!("child {key:?} listed twice")));
            }
            let c = *idx as usize;
            if c >= n {
                return Err(bad(format!("child {key:?} points to node {c}, past the end ({n} nodes)")));
            }
            if c <= i {
                return Err(bad(format!("child {key:?} points backwards to node {c}")));
            }
            if parent[c] != usize::MAX {
                return Err(bad(format!("node {c} already has parent {}", parent[c])));
            }
            parent[c] = i;
            children[slot] = c as u32;
        }
        nodes.push(TreeNode {
            obs,
            look,
            inv,
            score: ScoreState { raw: s.raw, max_raw: s.max, succeeded: s.succeeded, failed: s.failed },
            valid,
            children,
            terminal: node.terminal,
        });
    }
    let mut depth = vec![0u32; n];
    for i in 1..n {
        if parent[i] == usize::MAX {
            return Err(TreeError::Node { node: i, reason: "node is not referenced by any parent".into() });
        }
        depth[i] = depth[parent[i]] + 1;
        if depth[i] > header.max_depth {
            return Err(TreeError::Node {
                node: i,
                reason: format!("depth {} exceeds maxDepth {}", depth[i], header.max_depth),
            });
        }
    }
    Ok(PrecrawledTree { header, strings: interner.strings, nodes })
}
