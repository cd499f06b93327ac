mod common;

use std::sync::Arc;

use textgym::games::GameKind;
use textgym::precrawl::crawl;
use textgym::session::{Mode, Session, EXHAUSTED, UNRECOGNIZED};
use textgym::{Difficulty, EpisodeConfig, Fold};

#[test]
fn exhaustive_depth_three() {
    for game in GameKind::ALL {
        for n in 0..2 {
            let c = common::config(game, Fold::ALL[n as usize], n, Difficulty::Easy);
            let states = common::compare_exhaustive(&c, 3).unwrap();
            assert!(states > 1);
        }
    }
}

#[test]
fn sampled_depth_eight() {
    for game in GameKind::ALL {
        for (n, d) in common::DIFFICULTIES.into_iter().enumerate() {
            let c = common::config(game, Fold::Test, n as u64, d);
            common::compare_sampled(&c, 8, 200, 77 + n as u64).unwrap();
        }
    }
}

#[test]
fn modes_agree_on_text_input_and_past_the_horizon() {
    let c = EpisodeConfig::new(GameKind::CoinCollector, 6, Difficulty::Easy);
    let tree = Arc::new(crawl(&c, 1).unwrap());
    let (mut on, a) = Session::reset(&c, Mode::Online, None).unwrap();
    let (mut pre, b) = Session::reset(&c, Mode::Precrawled, Some(tree)).unwrap();
    assert_eq!(a, b);
    assert_eq!(on.step("  LOOK   around "), pre.step("  LOOK   around "));
    // Both count the junk step.
    let (x, y) = (on.step("frobnicate"), pre.step("frobnicate"));
    assert_eq!(x.observation, UNRECOGNIZED);
    assert_eq!(x, y);
    let y = pre.step("look around");
    assert_eq!(y.observation, EXHAUSTED);
    assert_eq!(y.step_count, 3);
    assert_eq!(pre.step_index(10_000).observation, UNRECOGNIZED);
}

#[test]
fn tree_for_another_config_is_refused() {
    let c = EpisodeConfig::new(GameKind::Twc, 2, Difficulty::Easy);
    let tree = Arc::new(crawl(&c, 1).unwrap());
    let other = EpisodeConfig::new(GameKind::Twc, 12, Difficulty::Easy);
    assert!(Session::reset(&other, Mode::Precrawled, Some(tree)).is_err());
}
