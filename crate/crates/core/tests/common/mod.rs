#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use circrep::search::{recheck, SearchConfig};
use circrep::{PowerThreshold, Rational, Symbol, Word};

pub fn all_words(k: u8, len: usize) -> impl Iterator<Item = Word> {
    (0..(k as usize).pow(len as u32)).map(move |mut code| {
        let mut s = vec![0; len];
        for c in s.iter_mut().rev() {
            *c = (code % k as usize) as Symbol;
            code /= k as usize;
        }
        Word::new(s, k).unwrap()
    })
}

/// Random depth-first walks over ternary words: every push is judged by the
/// incremental checker and by a from-scratch check of the whole word.
/// Returns `(extensions, rejected)` or the first disagreement.
pub fn checker_differential(seed: u64, target: usize) -> Result<(usize, usize), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let thresholds =
        [(7, 4, false), (7, 4, true), (2, 1, false), (5, 2, false), (5, 2, true), (13, 4, false), (3, 1, true)];
    let (mut extensions, mut rejected) = (0, 0);
    while extensions < target {
        let (n, d, strict) = thresholds[rng.gen_range(0..thresholds.len())];
        let th = PowerThreshold::new(Rational::new(n, d), strict).unwrap();
        let circular = rng.gen_bool(0.7);
        let squares = if rng.gen_bool(0.3) { rng.gen_range(4..20) } else { 0 };
        let cfg = SearchConfig::new(3, th, circular).with_squares_below(squares).with_max_length(40);
        let mut checker = cfg.checker();
        let mut misses = 0;
        while checker.len() < 40 && misses < 12 && extensions < target {
            checker.push(rng.gen_range(0..3));
            extensions += 1;
            let w = Word::new(checker.word().to_vec(), 3).unwrap();
            let full = recheck(&w, &cfg);
            if checker.violates_last() != full.is_some() {
                return Err(format!("{w} under {th} circular={circular} C={squares}: incremental disagrees"));
            }
            if let Some(wit) = checker.check_last() {
                if !wit.replay(&w) {
                    return Err(format!("{w}: witness {wit:?} does not replay"));
                }
            }
            if full.is_some() {
                rejected += 1;
                misses += 1;
                checker.pop();
            }
        }
    }
    Ok((extensions, rejected))
}
