//! Repetition thresholds and search-based evidence for circular ones.

use serde::{Deserialize, Serialize};

use super::{longest_word_with, SearchConfig, SearchOptions};
use crate::error::{Error, Result};
use crate::rational::{PowerThreshold, Rational};
use crate::words::Word;

/// The ordinary repetition threshold `rt(k)`, for `k >= 2`.
pub fn rt(k: u32) -> Option<Rational> {
    match k {
        0 | 1 => None,
        2 => Some(Rational::integer(2)),
        3 => Some(Rational::new(7, 4)),
        4 => Some(Rational::new(7, 5)),
        _ => Some(Rational::new(k as u64, k as u64 - 1)),
    }
}

/// Conjectured circular repetition threshold for `k >= 4`.
pub fn rtc_conjectured(k: u32) -> Option<Rational> {
    match k {
        0..=3 => None,
        4 => Some(Rational::new(5, 2)),
        5 => Some(Rational::new(105, 46)),
        _ => Some(Rational::new(2 * k as u64 - 1, k as u64 - 1)),
    }
}

/// Known circular thresholds: proved for 2 and 3 letters, conjectured beyond.
#[derive(Clone, Copy, Debug, Default)]
pub struct RtTable;

impl RtTable {
    pub fn rt(&self, k: u32) -> Option<Rational> {
        rt(k)
    }

    /// `(value, proved)`.
    pub fn rtc(&self, k: u32) -> Option<(Rational, bool)> {
        match k {
            2 => Some((Rational::integer(4), true)),
            3 => Some((Rational::new(13, 4), true)),
            _ => rtc_conjectured(k).map(|v| (v, false)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceRow {
    pub square_constraint_bound: usize,
    pub longest_length: usize,
    pub exhausted: bool,
    pub nodes_visited: u64,
    pub witness: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdEvidence {
    pub k: u8,
    pub threshold: PowerThreshold,
    pub rows: Vec<EvidenceRow>,
}

impl ThresholdEvidence {
    /// Every run exhausted its tree: no infinite word avoids the threshold
    /// under the matching constraint, which supports `rtc(k) >= value`.
    pub fn all_finite(&self) -> bool {
        self.rows.iter().all(|r| r.exhausted)
    }
}

/// Runs the circular search once per square bound in `schedule`.
pub fn threshold_evidence(
    k: u8,
    th: PowerThreshold,
    schedule: &[usize],
    max_length: usize,
    opts: &SearchOptions,
) -> Result<ThresholdEvidence> {
    if k < 2 {
        return Err(Error::Precondition(format!("alphabet size {k} is below 2")));
    }
    let mut rows = Vec::with_capacity(schedule.len());
    for &c in schedule {
        let cfg = SearchConfig::new(k, th, true).with_squares_below(c).with_max_length(max_length);
        let r = longest_word_with(&cfg, opts)?;
        rows.push(EvidenceRow {
            square_constraint_bound: c,
            longest_length: r.longest_length,
            exhausted: r.exhausted,
            nodes_visited: r.nodes_visited,
            witness: r.witness,
        });
    }
    Ok(ThresholdEvidence { k, threshold: th, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_match_table() {
        assert_eq!(rt(2), Some(Rational::integer(2)));
        assert_eq!(rt(3), Some(Rational::new(7, 4)));
        assert_eq!(rt(4), Some(Rational::new(7, 5)));
        assert_eq!(rt(5), Some(Rational::new(5, 4)));
        assert_eq!(rt(1), None);
        assert_eq!(rtc_conjectured(5), Some(Rational::new(105, 46)));
        assert_eq!(rtc_conjectured(6), Some(Rational::new(11, 5)));
        // For k >= 6 the conjecture is 1 + rt(k).
        for k in 6..40u32 {
            let a = rtc_conjectured(k).unwrap();
            let b = rt(k).unwrap();
            assert_eq!(a.numer() * b.denom(), (b.numer() + b.denom()) * a.denom());
        }
    }
}
