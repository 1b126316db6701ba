//! Exponents of products of factors.
//!
//! For a product `s = f_1 ... f_i` of nonempty factors with period `p`,
//! `s` is a window of `X^ω` for some root `X` of length `p`. If the exponent
//! beats the trivial `a^i`, some `f_j` is longer than `p`, so a conjugate of
//! `X` is itself a factor. For a fixed root, jumping greedily to the longest
//! factor at each step is optimal: the furthest point reachable from `x` in
//! one step never decreases as `x` grows.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::words::{shortest_period, Symbol, Word};

const NONE: u32 = u32::MAX;

/// Suffix automaton recognising every factor of a set of texts.
#[derive(Clone, Debug)]
pub struct FactorIndex {
    alphabet_size: u8,
    sigma: usize,
    next: Vec<u32>,
    link: Vec<u32>,
    len: Vec<u32>,
    /// Longest factor length the index vouches for, if limited.
    max_len: Option<usize>,
}

impl FactorIndex {
    pub fn from_word(w: &Word) -> Self {
        Self::from_texts(w.alphabet_size(), std::iter::once(w.symbols()), None)
    }

    /// Every member and each of its factors; nothing longer than the members.
    pub fn from_members<'a>(alphabet_size: u8, members: impl IntoIterator<Item = &'a Word>) -> Self {
        let members: Vec<&Word> = members.into_iter().collect();
        let max_len = members.iter().map(|m| m.len()).max();
        Self::from_texts(alphabet_size, members.iter().map(|m| m.symbols()), max_len)
    }

    /// Index of `text`, trusted only for factors up to `max_len`.
    pub fn from_text_limited(alphabet_size: u8, text: &[Symbol], max_len: usize) -> Self {
        Self::from_texts(alphabet_size, std::iter::once(text), Some(max_len))
    }

    fn from_texts<'a>(alphabet_size: u8, texts: impl Iterator<Item = &'a [Symbol]>, max_len: Option<usize>) -> Self {
        let sigma = alphabet_size as usize + 1;
        let mut idx =
            FactorIndex { alphabet_size, sigma, next: vec![NONE; sigma], link: vec![NONE], len: vec![0], max_len };
        let sep = alphabet_size;
        let mut last = 0u32;
        for (n, t) in texts.enumerate() {
            if n > 0 {
                last = idx.extend(last, sep);
            }
            for &c in t {
                last = idx.extend(last, c);
            }
        }
        idx
    }

    fn new_state(&mut self, len: u32, link: u32, copy_from: Option<u32>) -> u32 {
        let id = self.len.len() as u32;
        self.len.push(len);
        self.link.push(link);
        match copy_from {
            Some(q) => {
                let start = q as usize * self.sigma;
                self.next.extend_from_within(start..start + self.sigma);
            }
            None => self.next.extend(std::iter::repeat_n(NONE, self.sigma)),
        }
        id
    }

    fn go(&self, state: u32, c: Symbol) -> u32 {
        self.next[state as usize * self.sigma + c as usize]
    }

    fn set(&mut self, state: u32, c: Symbol, to: u32) {
        self.next[state as usize * self.sigma + c as usize] = to;
    }

    fn extend(&mut self, last: u32, c: Symbol) -> u32 {
        let cur = self.new_state(self.len[last as usize] + 1, NONE, None);
        let mut p = last;
        while p != NONE && self.go(p, c) == NONE {
            self.set(p, c, cur);
            p = self.link[p as usize];
        }
        if p == NONE {
            self.link[cur as usize] = 0;
            return cur;
        }
        let q = self.go(p, c);
        if self.len[p as usize] + 1 == self.len[q as usize] {
            self.link[cur as usize] = q;
            return cur;
        }
        let clone = self.new_state(self.len[p as usize] + 1, self.link[q as usize], Some(q));
        while p != NONE && self.go(p, c) == q {
            self.set(p, c, clone);
            p = self.link[p as usize];
        }
        self.link[q as usize] = clone;
        self.link[cur as usize] = clone;
        cur
    }

    pub fn alphabet_size(&self) -> u8 {
        self.alphabet_size
    }

    pub fn max_len(&self) -> Option<usize> {
        self.max_len
    }

    fn in_alphabet(&self, c: Symbol) -> bool {
        c < self.alphabet_size
    }

    pub fn contains(&self, s: &[Symbol]) -> bool {
        if self.max_len.is_some_and(|m| s.len() > m) {
            return false;
        }
        let mut st = 0u32;
        for &c in s {
            if !self.in_alphabet(c) {
                return false;
            }
            st = self.go(st, c);
            if st == NONE {
                return false;
            }
        }
        true
    }

    /// For each `x`, the length of the longest factor ending at `t[x]`.
    pub fn longest_ending_at(&self, t: &[Symbol]) -> Vec<usize> {
        let cap = self.max_len.unwrap_or(usize::MAX);
        let mut out = Vec::with_capacity(t.len());
        let (mut st, mut l) = (0u32, 0usize);
        for &c in t {
            if !self.in_alphabet(c) {
                st = 0;
                l = 0;
                out.push(0);
                continue;
            }
            while st != 0 && self.go(st, c) == NONE {
                st = self.link[st as usize];
                l = self.len[st as usize] as usize;
            }
            if self.go(st, c) != NONE {
                st = self.go(st, c);
                l += 1;
            } else {
                l = 0;
            }
            out.push(l.min(cap));
        }
        out
    }

    /// For each `a`, the length of the longest factor starting at `t[a]`.
    pub fn longest_starting_at(&self, t: &[Symbol]) -> Vec<usize> {
        let ending = self.longest_ending_at(t);
        let mut out = vec![0; t.len()];
        // The leftmost start of a factor ending at y never decreases with y.
        let mut y = 0usize;
        for (a, slot) in out.iter_mut().enumerate() {
            if y < a {
                y = a;
            }
            while y < t.len() && y < a + ending[y] {
                y += 1;
            }
            *slot = y - a;
        }
        out
    }

    /// Distinct factors of every length up to `max`, grouped by length.
    pub fn factors_up_to(&self, max: usize) -> Vec<Vec<Vec<Symbol>>> {
        let mut by_len = vec![Vec::new(); max + 1];
        by_len[0].push(Vec::new());
        let mut path = Vec::new();
        self.collect(0, max.min(self.max_len.unwrap_or(usize::MAX)), &mut path, &mut by_len);
        by_len
    }

    fn collect(&self, st: u32, max: usize, path: &mut Vec<Symbol>, by_len: &mut [Vec<Vec<Symbol>>]) {
        if path.len() == max {
            return;
        }
        for c in 0..self.alphabet_size {
            let to = self.go(st, c);
            if to == NONE {
                continue;
            }
            path.push(c);
            by_len[path.len()].push(path.clone());
            self.collect(to, max, path, by_len);
            path.pop();
        }
    }
}

/// A product of factors with the largest exponent found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductExponent {
    pub exponent: Rational,
    pub period: usize,
    pub length: usize,
    pub factors: Vec<Word>,
}

impl ProductExponent {
    pub fn product(&self) -> Vec<Symbol> {
        self.factors.iter().flat_map(|f| f.symbols().iter().copied()).collect()
    }
}

/// Factors are closed under taking factors, so a long piece can always be
/// cut in two when the cap was reached with fewer than `i` pieces.
fn split_until(cuts: &mut Vec<usize>, count: usize) {
    while cuts.len() < count {
        let j =
            (1..cuts.len()).max_by_key(|&j| (cuts[j] - cuts[j - 1], std::cmp::Reverse(j))).expect("at least one piece");
        let mid = cuts[j - 1] + 1;
        cuts.insert(j, mid);
    }
}

fn min_rotation(x: &[Symbol]) -> Vec<Symbol> {
    (0..x.len()).map(|r| [&x[r..], &x[..r]].concat()).min().unwrap_or_default()
}

/// Largest exponent of `f_1 ... f_i` over factors known to `index`, with
/// `|f_1 ... f_i| <= max_total_len`.
pub fn product_exponent(index: &FactorIndex, i: usize, max_total_len: usize) -> Result<ProductExponent> {
    search_products(index, i, max_total_len, None)
}

/// Like `product_exponent`, but returns as soon as some product has an
/// exponent above `bound`. If none does, the result is the exact maximum.
pub fn product_exponent_until(
    index: &FactorIndex,
    i: usize,
    max_total_len: usize,
    bound: Rational,
) -> Result<ProductExponent> {
    search_products(index, i, max_total_len, Some(bound))
}

fn search_products(
    index: &FactorIndex,
    i: usize,
    max_total_len: usize,
    stop_above: Option<Rational>,
) -> Result<ProductExponent> {
    if i == 0 || max_total_len < i {
        return Err(Error::Precondition(format!(
            "need 1 <= i <= max_total_len, got i = {i}, max_total_len = {max_total_len}"
        )));
    }
    let k = index.alphabet_size();
    let Some(letter) = (0..k).find(|&c| index.contains(&[c])) else {
        return Err(Error::EmptyWord);
    };
    let mut best = {
        let f = Word::new(vec![letter], k)?;
        let factors = vec![f; i];
        ProductExponent { exponent: Rational::integer(i as u64), period: 1, length: i, factors }
    };

    // Beating exponent i needs a length above i * p.
    let max_p = (max_total_len - 1) / i;
    if max_p == 0 {
        return Ok(best);
    }
    let roots_by_len = index.factors_up_to(max_p);
    for (p, roots) in roots_by_len.iter().enumerate().skip(1) {
        if Rational::from_lengths(max_total_len, p) <= best.exponent {
            break;
        }
        let mut seen = HashSet::new();
        for x in roots {
            let canon = min_rotation(x);
            if !seen.insert(canon) {
                continue;
            }
            let t: Vec<Symbol> = x.iter().copied().cycle().take(max_total_len + p).collect();
            let step = index.longest_starting_at(&t);
            for a in 0..p {
                let mut cuts = vec![a];
                let mut pos = a;
                for _ in 0..i {
                    let reach = (pos + step[pos]).min(a + max_total_len);
                    if reach == pos {
                        break;
                    }
                    pos = reach;
                    cuts.push(pos);
                    if pos == a + max_total_len {
                        break;
                    }
                }
                let length = pos - a;
                if Rational::from_lengths(length, p) <= best.exponent {
                    continue;
                }
                split_until(&mut cuts, i + 1);
                let factors: Vec<Word> =
                    cuts.windows(2).map(|c| Word::new(t[c[0]..c[1]].to_vec(), k)).collect::<Result<_>>()?;
                let s = Word::new(t[a..pos].to_vec(), k)?;
                let period = shortest_period(&s)?;
                best = ProductExponent { exponent: Rational::from_lengths(length, period), period, length, factors };
                if stop_above.is_some_and(|b| best.exponent > b) {
                    return Ok(best);
                }
            }
        }
    }
    Ok(best)
}

/// `product_exponent` over the factors of a finite word.
pub fn product_exponent_of_word(w: &Word, i: usize, max_total_len: usize) -> Result<ProductExponent> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    product_exponent(&FactorIndex::from_word(w), i, max_total_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::critical_exponent;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn index_knows_factors() {
        let idx = FactorIndex::from_word(&w("0120"));
        assert!(idx.contains(&[1, 2, 0]));
        assert!(!idx.contains(&[2, 1]));
        let sets = FactorIndex::from_members(3, [&w("01"), &w("20")]);
        assert!(sets.contains(&[2, 0]));
        assert!(!sets.contains(&[1, 2]));
        assert_eq!(sets.factors_up_to(2)[2].len(), 2);
    }

    #[test]
    fn starting_lengths() {
        let idx = FactorIndex::from_word(&w("0110"));
        assert_eq!(idx.longest_starting_at(&[0, 1, 1, 0, 1]), vec![4, 3, 2, 2, 1]);
    }

    #[test]
    fn aba_squared() {
        let r = product_exponent_of_word(&w("010"), 2, 6).unwrap();
        assert_eq!(r.exponent, Rational::new(5, 2));
        assert_eq!(r.factors.len(), 2);
    }

    #[test]
    fn one_factor_is_critical_exponent() {
        for s in ["0010110", "0120210", "0000", "0110100110010110"] {
            let x = w(s);
            let r = product_exponent_of_word(&x, 1, x.len()).unwrap();
            assert_eq!(r.exponent, critical_exponent(&x).unwrap().0, "{s}");
        }
    }
}
