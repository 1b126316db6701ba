//! Backtracking search for longest words avoiding (circular) repetitions.

mod checker;
mod engine;
mod evidence;

pub use checker::IncrementalChecker;
pub use engine::{
    longest_word, longest_word_with, Checkpoint, Progress, SearchOptions, SearchReport, DEFAULT_SPLIT_DEPTH,
    THREADS_ENV,
};
pub use evidence::{rt, rtc_conjectured, threshold_evidence, EvidenceRow, RtTable, ThresholdEvidence};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::PowerThreshold;
use crate::words::{RepetitionWitness, Word};

/// What to search for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub k: u8,
    pub threshold: PowerThreshold,
    pub circular: bool,
    /// Additionally forbid factors `xx` with `|xx| < C`; 0 disables.
    pub square_constraint_bound: usize,
    pub max_length: usize,
    /// Only explore words whose letters first appear in increasing order.
    pub symmetry_reduction: bool,
}

impl SearchConfig {
    pub fn new(k: u8, threshold: PowerThreshold, circular: bool) -> Self {
        SearchConfig { k, threshold, circular, square_constraint_bound: 0, max_length: 1000, symmetry_reduction: true }
    }

    pub fn with_squares_below(mut self, c: usize) -> Self {
        self.square_constraint_bound = c;
        self
    }

    pub fn with_max_length(mut self, n: usize) -> Self {
        self.max_length = n;
        self
    }

    pub fn with_symmetry_reduction(mut self, on: bool) -> Self {
        self.symmetry_reduction = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > 36 {
            return Err(Error::Precondition(format!("alphabet size {} out of range 1..=36", self.k)));
        }
        if self.max_length == 0 {
            return Err(Error::Precondition("max_length must be at least 1".into()));
        }
        Ok(())
    }

    pub fn checker(&self) -> IncrementalChecker {
        IncrementalChecker::new(self.threshold, self.circular, self.square_constraint_bound, self.k, self.max_length)
    }
}

/// Outcome of an exhaustive or capped search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub longest_length: usize,
    /// Lexicographically least word among the longest found.
    pub witness: Word,
    /// The whole tree was explored, so `longest_length` is exact.
    pub exhausted: bool,
    pub nodes_visited: u64,
}

/// Checks `w` against `cfg` from scratch, with a checker that shares no code
/// with the incremental one.
pub fn recheck(w: &Word, cfg: &SearchConfig) -> Option<RepetitionWitness> {
    use crate::words::{is_circularly_power_free, is_power_free};
    let verdict =
        if cfg.circular { is_circularly_power_free(w, &cfg.threshold) } else { is_power_free(w, &cfg.threshold) };
    if let Some(wit) = verdict.witness() {
        return Some(wit.clone());
    }
    if cfg.square_constraint_bound > 0 {
        let s = w.symbols();
        let limit = (cfg.square_constraint_bound - 1) / 2;
        for start in 0..s.len() {
            for half in 1..=limit {
                if start + 2 * half > s.len() {
                    break;
                }
                if s[start..start + half] == s[start + half..start + 2 * half] {
                    return Some(RepetitionWitness::factor(s, w.alphabet_size(), start, 2 * half, half));
                }
            }
        }
    }
    None
}

/// Scans `w` for a repetition that breaks `th` and spans at most `window`
/// symbols, as a circular factor when `circular` is set. This is the same as
/// checking every length-`window` factor of `w` on its own.
pub fn windowed_scan(w: &Word, th: PowerThreshold, circular: bool, window: usize) -> Option<RepetitionWitness> {
    let mut c = IncrementalChecker::windowed(th, circular, 0, w.alphabet_size(), window);
    for &x in w.symbols() {
        c.push(x);
        if let Some(wit) = c.check_last() {
            return Some(wit);
        }
    }
    None
}

/// Product-of-factors exponents.
pub use crate::products::{product_exponent, product_exponent_of_word, product_exponent_until, ProductExponent};
