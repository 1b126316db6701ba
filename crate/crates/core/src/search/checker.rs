//! Last-position violation checks for words grown one symbol at a time.
//!
//! After appending position `n - 1`, the only circular factors that are new
//! are `s = v t` with `v` a nonempty suffix of the word and `t` a factor
//! that ends at or before the start of `v`. For a period `p`, a violating
//! `s` exists iff one of three shapes exists:
//!
//! * `|v| >= p`: `v` has period `p` and `t` is a prefix of `X^ω`, where `X`
//!   is the last `p` symbols of the word;
//! * `|v| < p <= |t|`: `t` has period `p` and its first block ends with `v`;
//! * `|v|, |t| < p`: only possible when the exponent bound is below 2.
//!
//! All three are decided with a table of longest common suffixes
//! `lcs(x, d)` between the prefixes ending at `x` and at `x - d`. Appending a
//! symbol adds one row to the table.

use crate::rational::PowerThreshold;
use crate::words::{RepetitionWitness, Symbol};

#[derive(Clone, Copy, Debug)]
enum Hit {
    Factor { start: usize, len: usize, period: usize },
    Circular { start: usize, t_len: usize, u_len: usize, v_len: usize, period: usize },
}

/// Growable word with constant-time repetition queries near its end.
#[derive(Clone, Debug)]
pub struct IncrementalChecker {
    threshold: PowerThreshold,
    circular: bool,
    square_bound: usize,
    alphabet_size: u8,
    /// Largest span `|t u v|` considered, and the width of the table.
    window: usize,
    /// Largest period that can produce a violation within `window`.
    max_period: usize,
    min_len: Vec<usize>,
    word: Vec<Symbol>,
    /// Ring of rows; row `x % rows` holds `lcs(x, d)` at index `d`.
    lcs: Vec<u32>,
    rows: usize,
    /// Longest run of period `p` seen so far, at index `p` of the top row.
    /// Row `x` only covers `p <= x`; older rows are kept for `pop`.
    best_run: Vec<u32>,
    row_starts: Vec<usize>,
    keep_history: bool,
}

impl IncrementalChecker {
    /// A checker for depth-first search: supports `pop`, spans are unbounded
    /// up to `max_len`.
    pub fn new(
        threshold: PowerThreshold,
        circular: bool,
        square_bound: usize,
        alphabet_size: u8,
        max_len: usize,
    ) -> Self {
        Self::build(threshold, circular, square_bound, alphabet_size, max_len, true)
    }

    /// A checker for scanning a long word: only repetitions whose span
    /// `|t u v|` is at most `window` are reported, and `pop` is unsupported.
    pub fn windowed(
        threshold: PowerThreshold,
        circular: bool,
        square_bound: usize,
        alphabet_size: u8,
        window: usize,
    ) -> Self {
        Self::build(threshold, circular, square_bound, alphabet_size, window, false)
    }

    fn build(
        threshold: PowerThreshold,
        circular: bool,
        square_bound: usize,
        alphabet_size: u8,
        window: usize,
        keep_history: bool,
    ) -> Self {
        let window = window.max(1);
        let by_threshold = (1..=window).take_while(|&p| threshold.min_violating_len(p) <= window).last().unwrap_or(1);
        let by_squares = (square_bound.saturating_sub(1) / 2).min(window / 2);
        let max_period = by_threshold.max(by_squares).max(1);
        let min_len = (0..=max_period).map(|p| threshold.min_violating_len(p)).collect();
        let rows = window + 1;
        IncrementalChecker {
            threshold,
            circular,
            square_bound,
            alphabet_size,
            window,
            max_period,
            min_len,
            word: Vec::new(),
            lcs: vec![0; rows * (window + 1)],
            rows,
            best_run: if keep_history { Vec::new() } else { vec![0; max_period + 1] },
            row_starts: Vec::new(),
            keep_history,
        }
    }

    pub fn word(&self) -> &[Symbol] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn threshold(&self) -> &PowerThreshold {
        &self.threshold
    }

    #[inline]
    fn lcs_at(&self, x: usize, d: usize) -> usize {
        if d > x {
            return 0;
        }
        self.lcs[(x % self.rows) * (self.window + 1) + d] as usize
    }

    /// Longest suffix ending at `x` with period `p`, capped at `x + 1`.
    #[inline]
    fn run_ending_at(&self, x: usize, p: usize) -> usize {
        if p > x {
            x + 1
        } else {
            p + self.lcs_at(x, p)
        }
    }

    pub fn push(&mut self, c: Symbol) {
        let x = self.word.len();
        self.word.push(c);
        let width = self.window + 1;
        let cap = (self.window + 1) as u32;
        let row = (x % self.rows) * width;
        let prev = if x >= 1 { Some(((x - 1) % self.rows) * width) } else { None };
        // Entries with d > x are never read.
        let top = x.min(self.window);
        self.lcs[row] = 0;
        for d in 1..=top {
            let v = if self.word[x - d] == c {
                let before = match prev {
                    Some(pr) if d < x => self.lcs[pr + d],
                    _ => 0,
                };
                (before + 1).min(cap)
            } else {
                0
            };
            self.lcs[row + d] = v;
        }
        let top_p = x.min(self.max_period);
        let base = if self.keep_history {
            let base = self.best_run.len();
            match self.row_starts.last() {
                Some(&prev) => self.best_run.extend_from_within(prev..base),
                None => self.best_run.push(0),
            }
            self.best_run.resize(base + top_p + 1, 0);
            self.row_starts.push(base);
            base
        } else {
            0
        };
        for p in 1..=top_p {
            let r = self.run_ending_at(x, p) as u32;
            if r > self.best_run[base + p] {
                self.best_run[base + p] = r;
            }
        }
    }

    fn best_run_row(&self) -> &[u32] {
        match self.row_starts.last() {
            Some(&start) if self.keep_history => &self.best_run[start..],
            _ => &self.best_run,
        }
    }

    pub fn pop(&mut self) -> Option<Symbol> {
        assert!(self.keep_history, "pop on a windowed checker");
        let c = self.word.pop()?;
        let start = self.row_starts.pop().expect("one row per symbol");
        self.best_run.truncate(start);
        Some(c)
    }

    /// The first violation that touches the last position, if any.
    pub fn check_last(&self) -> Option<RepetitionWitness> {
        let k = self.alphabet_size;
        let w = &self.word;
        self.find_last().map(|hit| match hit {
            Hit::Factor { start, len, period } => RepetitionWitness::factor(w, k, start, len, period),
            Hit::Circular { start, t_len, u_len, v_len, period } => {
                RepetitionWitness::circular(w, k, start, t_len, u_len, v_len, period)
            }
        })
    }

    pub fn violates_last(&self) -> bool {
        self.find_last().is_some()
    }

    fn find_last(&self) -> Option<Hit> {
        let n = self.word.len();
        if n == 0 {
            return None;
        }
        let w = &self.word;
        let last = n - 1;
        let lo = n.saturating_sub(self.window);
        let span = n - lo;
        let runs = self.best_run_row();
        for p in 1..=self.max_period.min(n) {
            let lmin = self.min_len[p];
            let rp = self.run_ending_at(last, p).min(span);
            if rp >= lmin {
                return Some(Hit::Factor { start: n - lmin, len: lmin, period: p });
            }
            if 2 * p < self.square_bound && rp >= 2 * p {
                return Some(Hit::Factor { start: n - 2 * p, len: 2 * p, period: p });
            }
            if !self.circular || lmin > span || p == n {
                continue;
            }
            let best_run = runs[p] as usize;

            // |v| >= p: v = w[n - rp..n), t = prefix of X^ω at i.
            let need_a = lmin - rp;
            if need_a <= p || best_run >= need_a {
                let q = need_a.min(p);
                let head = w[n - p];
                for (i, &c) in w.iter().enumerate().take(n - lmin + 1).skip(lo) {
                    if c != head {
                        continue;
                    }
                    let d = n - p - i;
                    if self.lcs_at(n - p + q - 1, d) < q {
                        continue;
                    }
                    if need_a > p && self.lcs_at(i + need_a - 1, p) < need_a - p {
                        continue;
                    }
                    return Some(Hit::Circular {
                        start: i,
                        t_len: need_a,
                        u_len: n - rp - i - need_a,
                        v_len: rp,
                        period: p,
                    });
                }
            }

            // |v| < p <= |t|: t = w[i..i + m) has period p and w[i..i + p) ends with v.
            if p >= 2 {
                let fmin = lmin - (p - 1).min(lmin - p);
                if fmin <= p || best_run >= fmin {
                    let tail = w[last];
                    for i in lo..=n - lmin {
                        if w[i + p - 1] != tail {
                            continue;
                        }
                        let d = n - p - i;
                        let v_len = self.lcs_at(last, d).min(p - 1).min(lmin - p);
                        let m = lmin - v_len;
                        if m > p && self.lcs_at(i + m - 1, p) < m - p {
                            continue;
                        }
                        return Some(Hit::Circular { start: i, t_len: m, u_len: n - v_len - i - m, v_len, period: p });
                    }
                }
            }

            // |v|, |t| < p: s = v y v' with |v y| = p, y v' = t and v' a prefix of v.
            if lmin + 2 <= 2 * p {
                let need = lmin - p;
                for v_len in need + 1..p {
                    let v0 = n - v_len;
                    let gap = p - v_len;
                    let j_lo = (lo + gap).max(gap);
                    if v0 < need || j_lo + need > v0 {
                        continue;
                    }
                    for j in j_lo..=v0 - need {
                        if w[j] != w[v0] || self.lcs_at(v0 + need - 1, v0 - j) < need {
                            continue;
                        }
                        let i = j - gap;
                        let m = gap + need;
                        return Some(Hit::Circular { start: i, t_len: m, u_len: v0 - i - m, v_len, period: p });
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;
    use crate::words::{is_circularly_power_free, is_power_free, Word};

    fn threshold(num: u64, den: u64, strict: bool) -> PowerThreshold {
        PowerThreshold::new(Rational::new(num, den), strict).unwrap()
    }

    fn push_all(c: &mut IncrementalChecker, s: &[Symbol]) {
        for &x in s {
            c.push(x);
        }
    }

    #[test]
    fn aabaa_gives_circular_fourth_power() {
        let mut c = IncrementalChecker::new(threshold(4, 1, false), true, 0, 2, 16);
        push_all(&mut c, &[0, 0, 1, 0]);
        assert!(c.check_last().is_none());
        c.push(0);
        let wit = c.check_last().expect("aaaa is a circular 4-power of aabaa");
        assert_eq!(wit.repetition.symbols(), &[0, 0, 0, 0]);
        assert!(wit.replay(&Word::new(vec![0, 0, 1, 0, 0], 2).unwrap()));
    }

    #[test]
    fn squarefree_010() {
        let mut c = IncrementalChecker::new(threshold(2, 1, false), false, 0, 2, 8);
        for &x in &[0, 1, 0] {
            c.push(x);
            assert!(c.check_last().is_none());
        }
        c.push(0);
        assert!(c.check_last().is_some());
    }

    #[test]
    fn pop_restores_state() {
        let th = threshold(5, 2, false);
        let mut a = IncrementalChecker::new(th, true, 0, 3, 20);
        push_all(&mut a, &[0, 1, 2, 0, 2, 1]);
        let mut b = a.clone();
        b.push(0);
        b.push(1);
        b.pop();
        b.pop();
        a.push(2);
        b.push(2);
        assert_eq!(a.check_last(), b.check_last());
        assert_eq!(a.best_run, b.best_run);
    }

    #[test]
    fn agrees_with_full_check_on_all_short_words() {
        let ths = [
            threshold(4, 1, false),
            threshold(13, 4, false),
            threshold(5, 2, true),
            threshold(2, 1, false),
            threshold(7, 4, true),
            threshold(3, 2, false),
            threshold(1, 1, true),
        ];
        for th in ths {
            for circular in [false, true] {
                for k in 2..=3u8 {
                    let max = if k == 2 { 11 } else { 7 };
                    let mut c = IncrementalChecker::new(th, circular, 0, k, max);
                    walk(&mut c, k, max, th, circular);
                }
            }
        }
    }

    // Visits every word that is free up to its last position and compares the
    // last-position verdict with the full check.
    fn walk(c: &mut IncrementalChecker, k: u8, max: usize, th: PowerThreshold, circular: bool) {
        if c.len() == max {
            return;
        }
        for x in 0..k {
            c.push(x);
            let w = Word::new(c.word().to_vec(), k).unwrap();
            let full = if circular { is_circularly_power_free(&w, &th) } else { is_power_free(&w, &th) };
            let inc = c.check_last();
            assert_eq!(full.is_pass(), inc.is_none(), "{w} {th} circular={circular}");
            if let Some(wit) = inc {
                assert!(wit.replay(&w), "{wit:?}");
                assert!(th.violated_by(wit.exponent));
            } else {
                walk(c, k, max, th, circular);
            }
            c.pop();
        }
    }
}
