//! Brute-force sweeps and differential checks against independent oracles.

mod common;

use std::collections::BTreeSet;
use std::sync::Mutex;
use std::time::Duration;

use circrep::morphisms::{main_word_prefix, UniformMorphism};
use circrep::search::{longest_word_with, recheck, Checkpoint, Progress, SearchConfig, SearchOptions};
use circrep::words::{has_period, shortest_period, verify_conjugate_characterization};
use circrep::{PowerThreshold, Rational, Symbol};
use common::all_words;

#[test]
fn conjugate_sets_agree_on_small_words() {
    for (k, max) in [(2, 8), (3, 6)] {
        for len in 1..=max {
            for w in all_words(k, len) {
                assert!(verify_conjugate_characterization(&w).unwrap(), "{w}");
            }
        }
    }
}

#[test]
fn shortest_period_matches_naive_scan() {
    for k in 1..=3u8 {
        for len in 1..=12 {
            for w in all_words(k, len) {
                let naive = (1..=len).find(|&p| (p..len).all(|i| w.symbols()[i] == w.symbols()[i - p])).unwrap();
                assert_eq!(shortest_period(&w).unwrap(), naive, "{w}");
            }
        }
    }
}

#[test]
fn incremental_checker_matches_full_check() {
    let (extensions, rejected) = common::checker_differential(0x5eed, 10_000).unwrap();
    // Both outcomes must be well represented for the comparison to mean much.
    assert!(rejected > 1000 && extensions - rejected > 1000);
}

fn windows(text: &[Symbol], len: usize) -> BTreeSet<Vec<Symbol>> {
    text.windows(len).map(<[Symbol]>::to_vec).collect()
}

#[test]
fn lifted_factor_sets_match_long_prefixes() {
    for (h, prefix) in [(UniformMorphism::psi(), 1 << 16), (UniformMorphism::thue_morse(), 1 << 16)] {
        let text = h.fixed_point_prefix(0, prefix).unwrap();
        for len in 1..=40 {
            let fs = h.factor_set(0, len).unwrap();
            let members: BTreeSet<Vec<Symbol>> = fs.members.iter().map(|m| m.symbols().to_vec()).collect();
            assert_eq!(members, windows(text.symbols(), len), "{} length {len}", h.name);
            assert!(fs.provenance.witness_prefix_len <= prefix);
            let witness = h.fixed_point_prefix(0, fs.provenance.witness_prefix_len).unwrap();
            assert_eq!(windows(witness.symbols(), len), members);
        }
    }
}

#[test]
fn image_factor_sets_match_main_word_prefix() {
    let text = main_word_prefix(200_000);
    let (mu, psi) = (UniformMorphism::mu(), UniformMorphism::psi());
    for len in [1, 2, 3, 7, 15, 16, 31, 45, 60] {
        let fs = psi.image_factor_set(&mu, 0, len).unwrap();
        let members: BTreeSet<Vec<Symbol>> = fs.members.iter().map(|m| m.symbols().to_vec()).collect();
        assert_eq!(members, windows(text.symbols(), len), "length {len}");
    }
}

#[test]
fn short_powers_are_found_when_present() {
    // Thue-Morse has squares but no overlaps.
    let tm = UniformMorphism::thue_morse();
    let fs = tm.factor_set(0, 12).unwrap();
    let sq = fs.find_power(2, 12).unwrap();
    assert!(has_period(sq.repetition.symbols(), sq.period));
    assert!(tm.factor_set(0, 7).unwrap().find_power(3, 7).is_none());
}

fn ternary_147() -> SearchConfig {
    SearchConfig::new(3, PowerThreshold::non_strict(Rational::new(13, 4)), true)
        .with_squares_below(147)
        .with_max_length(400)
}

#[test]
fn search_is_thread_count_invariant() {
    let cfg = ternary_147();
    let run = |threads| {
        let opts = SearchOptions { threads: Some(threads), split_depth: 9, ..Default::default() };
        longest_word_with(&cfg, &opts).unwrap()
    };
    let one = run(1);
    for threads in [2, 5] {
        let r = run(threads);
        assert_eq!(
            (r.longest_length, &r.witness, r.exhausted, r.nodes_visited),
            (one.longest_length, &one.witness, one.exhausted, one.nodes_visited)
        );
    }
    assert_eq!(one.longest_length, 147);
    assert!(recheck(&one.witness, &cfg).is_none());
}

#[test]
fn interrupted_search_resumes_to_same_result() {
    let cfg = ternary_147();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("search.checkpoint");
    let snapshot = dir.path().join("snapshot.checkpoint");

    // Copy the checkpoint as it stood part way through; that copy plays the
    // file left behind by a killed run.
    let copied = Mutex::new(false);
    let grab = |p: &Progress| {
        let mut done = copied.lock().unwrap();
        if !*done && p.subtrees_done * 3 >= p.subtrees_total && path.exists() {
            std::fs::copy(&path, &snapshot).unwrap();
            *done = true;
        }
    };
    let full = longest_word_with(
        &cfg,
        &SearchOptions {
            threads: Some(2),
            split_depth: 9,
            checkpoint_path: Some(path.clone()),
            checkpoint_interval: Duration::ZERO,
            progress: Some(&grab),
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(Checkpoint::load(&path).unwrap().next_prefix, None);

    let partial = Checkpoint::load(&snapshot).unwrap();
    assert!(partial.next_prefix.is_some());
    assert!(partial.nodes_visited < full.nodes_visited);
    let resumed = longest_word_with(
        &cfg,
        &SearchOptions { threads: Some(3), split_depth: 9, resume: Some(partial), ..Default::default() },
    )
    .unwrap();
    assert_eq!(resumed.longest_length, full.longest_length);
    assert_eq!(resumed.witness, full.witness);
    assert_eq!(resumed.nodes_visited, full.nodes_visited);
    assert!(resumed.exhausted);
}

#[test]
fn resume_from_finished_checkpoint_is_immediate() {
    let cfg = ternary_147();
    let done: Checkpoint = format!("done 328258 147 {}", "0".repeat(147)).parse().unwrap();
    let r = longest_word_with(&cfg, &SearchOptions { resume: Some(done), ..Default::default() }).unwrap();
    assert_eq!(r.nodes_visited, 328_258);
    assert!(r.exhausted);
}

#[test]
fn checkpoint_rejects_foreign_prefix() {
    let cfg = ternary_147();
    let bogus: Checkpoint = "000000 10 0 -".parse().unwrap();
    assert!(longest_word_with(&cfg, &SearchOptions { resume: Some(bogus), ..Default::default() }).is_err());
}
