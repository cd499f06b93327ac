mod common;

use std::collections::{HashSet, VecDeque};

use proptest::prelude::*;
use textgym::action::{execute, Args, Verb};
use textgym::games::GameKind;
use textgym::mapgen::{generate_map, ConnectionPreferenceTable};
use textgym::precrawl::{crawl, tree_from_bytes, tree_to_bytes};
use textgym::render::{render_observation, visible_objects};
use textgym::rng::SplitMix64;
use textgym::session::{Mode, Session};
use textgym::world::{ObjId, Parent};
use textgym::{
    enumerate_valid_actions, fold_of_seed, make_episode, Difficulty, EpisodeConfig, Fold, Params, WorldState,
};

fn game() -> impl Strategy<Value = GameKind> {
    prop::sample::select(GameKind::ALL.to_vec())
}

fn difficulty() -> impl Strategy<Value = Difficulty> {
    prop::sample::select(common::DIFFICULTIES.to_vec())
}

fn episode_config() -> impl Strategy<Value = EpisodeConfig> {
    (game(), any::<u32>(), difficulty()).prop_map(|(g, s, d)| EpisodeConfig::new(g, s as u64, d))
}

fn live_objects(w: &WorldState) -> usize {
    w.objects.iter().filter(|o| o.parent != Parent::Consumed).count()
}

fn fingerprint(w: &WorldState, o: ObjId) -> String {
    format!("{:?}", w.obj(o))
}

fn parent_obj(p: Parent) -> Option<ObjId> {
    match p {
        Parent::Object(o) => Some(o),
        _ => None,
    }
}

/// Locations reachable from the agent by following exits.
fn reachable(w: &WorldState) -> usize {
    let mut seen = vec![false; w.locations.len()];
    let mut queue = VecDeque::from([w.agent_location]);
    seen[w.agent_location.index()] = true;
    let mut n = 1;
    while let Some(l) = queue.pop_front() {
        for e in w.loc(l).exits.iter().flatten() {
            if !seen[e.to.index()] {
                seen[e.to.index()] = true;
                n += 1;
                queue.push_back(e.to);
            }
        }
    }
    n
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn rollouts_keep_engine_invariants(config in episode_config(), agent in any::<u64>(), len in 0usize..60) {
        let ep = make_episode(&config).unwrap();
        let (mut world, task) = (ep.world, ep.task);
        let mut rng = SplitMix64::new(agent);
        let mut failed_at: Option<u32> = None;
        for _ in 0..len {
            let valid = enumerate_valid_actions(&world, &task);
            if valid.is_empty() {
                prop_assert!(world.is_terminal());
                break;
            }
            let a = valid[rng.index(valid.len())];
            let before = world.clone();
            prop_assert_eq!(render_observation(&world), render_observation(&world));

            let mut twin = world.clone();
            let out = execute(&mut world, &a, &task);
            prop_assert_eq!(&execute(&mut twin, &a, &task), &out);
            prop_assert_eq!(format!("{twin:?}"), format!("{world:?}"));
            prop_assert!(!out.rejected, "enumerated action rejected: {:?}", a);
            prop_assert_eq!(world.step_count, before.step_count + 1);
            if let Err(e) = world.check_invariants() {
                return Err(TestCaseError::fail(e));
            }

            // Conservation: only meal preparation and eating create or consume.
            if !matches!(a.verb, Verb::PrepareMeal | Verb::Eat) {
                prop_assert_eq!(world.objects.len(), before.objects.len());
                prop_assert_eq!(live_objects(&world), live_objects(&before));
            }

            // Frame: objects outside the action's arguments and their old and
            // new holders are untouched.
            if !matches!(a.verb, Verb::PrepareMeal | Verb::Eat) {
                let args: Vec<ObjId> = match a.args {
                    Args::Obj(o) => vec![o],
                    Args::Pair(x, y) => vec![x, y],
                    _ => vec![],
                };
                let mut involved: HashSet<ObjId> = args.iter().copied().collect();
                for &o in &args {
                    involved.extend(parent_obj(before.obj(o).parent));
                    involved.extend(parent_obj(world.obj(o).parent));
                }
                for i in 0..before.objects.len() as u32 {
                    let o = ObjId(i);
                    if !involved.contains(&o) {
                        prop_assert_eq!(fingerprint(&before, o), fingerprint(&world, o), "{:?} touched by {:?}", o, a);
                    }
                }
            }

            // Opening only reveals.
            if let (Verb::Open, Args::Obj(c)) = (a.verb, a.args) {
                let seen_before: HashSet<ObjId> = visible_objects(&before).into_iter().collect();
                let seen_after: HashSet<ObjId> = visible_objects(&world).into_iter().collect();
                prop_assert!(seen_after.is_superset(&seen_before));
                for o in &world.obj(c).contents {
                    prop_assert!(seen_after.contains(o));
                }
            }

            let s = textgym::ScoreState::of(&world, &task);
            prop_assert!((0.0..=1.0).contains(&s.normalized()));
            prop_assert!(!(s.succeeded && s.failed));
            if let Some(raw) = failed_at {
                prop_assert_eq!(s.raw, raw);
                prop_assert!(!s.succeeded);
            }
            if s.failed && failed_at.is_none() {
                failed_at = Some(s.raw);
            }
        }
    }

    #[test]
    fn gold_path_solves(config in episode_config()) {
        let (gold, t) = common::gold_transcript(&config);
        let last = t.last().unwrap();
        prop_assert!(last.succeeded, "seed {} {:?}: {:?}", config.seed, config.game, gold);
        prop_assert_eq!(last.normalized_score, 1.0);
        for r in &t[..t.len() - 1] {
            prop_assert!(!r.is_terminal());
        }
    }

    #[test]
    fn regeneration_is_identical(config in episode_config()) {
        let a = Session::reset(&config, Mode::Online, None).unwrap().1;
        let b = Session::reset(&config, Mode::Online, None).unwrap().1;
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let (x, y) = (make_episode(&config).unwrap(), make_episode(&config).unwrap());
        prop_assert_eq!(format!("{:?}", x.world), format!("{:?}", y.world));
        prop_assert_eq!(x.gold, y.gold);
    }

    #[test]
    fn distractor_count_does_not_move_the_map(g in game(), seed in any::<u32>(), d in difficulty(), k in 0usize..=4) {
        let base = Params::preset(g, d);
        let other = Params { num_distractors: k, ..base };
        let a = make_episode(&EpisodeConfig::with_params(g, seed as u64, base)).unwrap().world;
        let b = make_episode(&EpisodeConfig::with_params(g, seed as u64, other)).unwrap().world;
        let shape = |w: &WorldState| -> Vec<String> {
            w.locations.iter().map(|l| format!("{:?} {:?}", l.kind, l.exits.map(|e| e.map(|e| (e.to, e.door.is_some()))))).collect()
        };
        prop_assert_eq!(shape(&a), shape(&b));
    }

    #[test]
    fn folds_partition_seeds(seed in any::<u64>(), n in 0u64..1 << 40) {
        let f = fold_of_seed(seed);
        prop_assert_eq!(f, match seed % 10 { 8 => Fold::Dev, 9 => Fold::Test, _ => Fold::Train });
        for fold in Fold::ALL {
            prop_assert_eq!(fold_of_seed(fold.nth_seed(n)), fold);
            prop_assert!(fold.nth_seed(n + 1) > fold.nth_seed(n));
        }
    }

    #[test]
    fn terminal_results_are_absorbing(config in episode_config(), extra in prop::collection::vec("[a-z ]{0,12}", 1..5)) {
        let (gold, t) = common::gold_transcript(&config);
        let (mut s, _) = Session::reset(&config, Mode::Online, None).unwrap();
        for c in &gold {
            s.step(c);
        }
        let last = t.last().unwrap();
        for e in &extra {
            prop_assert_eq!(&s.step(e), last);
            prop_assert_eq!(&s.step_index(0), last);
        }
    }

    #[test]
    fn unrecognized_input_advances_only_the_counter(config in episode_config(), junk in "[qxz]{3,8}") {
        let (mut s, first) = Session::reset(&config, Mode::Online, None).unwrap();
        let r = s.step(&junk);
        prop_assert_eq!(r.step_count, 1);
        prop_assert_eq!(r.observation.as_str(), textgym::session::UNRECOGNIZED);
        prop_assert_eq!(&r.valid_actions, &first.valid_actions);
        prop_assert_eq!((r.raw_score, &r.look, &r.inventory), (first.raw_score, &first.look, &first.inventory));
    }

    #[test]
    fn interleaved_sessions_match_solo_runs(configs in prop::collection::vec(episode_config(), 2..5), agent in any::<u64>()) {
        let mut rng = SplitMix64::new(agent);
        let mut sessions: Vec<Session> = configs.iter().map(|c| Session::reset(c, Mode::Online, None).unwrap().0).collect();
        let mut logs: Vec<Vec<String>> = vec![Vec::new(); configs.len()];
        let mut results: Vec<Vec<String>> = vec![Vec::new(); configs.len()];
        for _ in 0..40 {
            let k = rng.index(sessions.len());
            let valid = sessions[k].current().valid_actions;
            let cmd = if valid.is_empty() { "look around".to_string() } else { valid[rng.index(valid.len())].clone() };
            results[k].push(serde_json::to_string(&sessions[k].step(&cmd)).unwrap());
            logs[k].push(cmd);
        }
        for (k, c) in configs.iter().enumerate() {
            let solo = common::transcript(c, &logs[k]);
            let solo: Vec<String> = solo[1..].iter().map(|r| serde_json::to_string(r).unwrap()).collect();
            prop_assert_eq!(&solo, &results[k]);
        }
    }

    #[test]
    fn trees_round_trip_and_grow(g in game(), seed in 0u64..10_000) {
        let c = EpisodeConfig::new(g, seed, Difficulty::Easy);
        let mut prev = 0;
        for d in 0..=2 {
            let t = crawl(&c, d).unwrap();
            if d == 0 {
                prop_assert_eq!(t.len(), 1);
            }
            prop_assert!(t.len() >= prev);
            prev = t.len();
            prop_assert_eq!(&tree_from_bytes(&tree_to_bytes(&t)).unwrap(), &t);
        }
    }

    #[test]
    fn map_layout_is_deterministic(seed in any::<u64>(), n in 1usize..=11, doors in any::<bool>()) {
        let a = generate_map(&mut SplitMix64::new(seed), n, doors).unwrap();
        let b = generate_map(&mut SplitMix64::new(seed), n, doors).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.cells.len(), n);
        prop_assert!(a.is_connected());
    }
}

#[test]
fn map_sweep_is_connected_and_respects_preferences() {
    let prefs = ConnectionPreferenceTable::household();
    for seed in 0..10_000u64 {
        let game = GameKind::ALL[seed as usize % 3];
        let difficulty = common::DIFFICULTIES[seed as usize / 3 % 3];
        let c = EpisodeConfig { generate_gold: false, ..EpisodeConfig::new(game, seed, difficulty) };
        let w = make_episode(&c).unwrap().world;
        assert_eq!(reachable(&w), w.locations.len(), "seed {seed}");
        for l in &w.locations {
            assert!(l.exits.iter().flatten().count() <= 4);
            for (d, e) in l.exits.iter().enumerate() {
                let Some(e) = e else { continue };
                let to = w.loc(e.to);
                assert!(!prefs.forbids(l.kind, to.kind), "seed {seed}: {:?} next to {:?}", l.kind, to.kind);
                let back = to.exits.iter().flatten().find(|b| b.to == l.id);
                assert!(back.is_some_and(|b| b.door == e.door), "seed {seed}: one-way exit {d}");
            }
        }
    }
}
