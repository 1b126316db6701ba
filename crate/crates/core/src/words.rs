//! Finite words, periods, exponents and circular factors.
//!
//! A circular factor of `w` is a factor of a conjugate of a factor of `w`.
//! Every function here that deals with circular factors enumerates them as
//! `s = v t` where `t u v` is a factor of `w`; [`verify_conjugate_characterization`]
//! checks by brute force that this matches the other three characterizations.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{PowerThreshold, Rational};

pub type Symbol = u8;

const RENDER: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

/// A finite word over the alphabet `{0, .., alphabet_size - 1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    symbols: Vec<Symbol>,
    alphabet_size: u8,
}

impl Word {
    pub fn new(symbols: Vec<Symbol>, alphabet_size: u8) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::InvalidWord("alphabet size must be at least 1".into()));
        }
        if let Some(&symbol) = symbols.iter().find(|&&s| s >= alphabet_size) {
            return Err(Error::SymbolOutOfAlphabet { symbol, alphabet_size });
        }
        Ok(Word { symbols, alphabet_size })
    }

    /// A word whose alphabet is the smallest one containing its symbols.
    pub fn from_symbols(symbols: Vec<Symbol>) -> Self {
        let k = symbols.iter().copied().max().map_or(1, |m| m + 1);
        Word { symbols, alphabet_size: k }
    }

    pub fn empty(alphabet_size: u8) -> Self {
        Word::new(Vec::new(), alphabet_size).expect("alphabet size must be positive")
    }

    /// Parses digits (`"0121"`) directly, or letters by order of first
    /// appearance (`"alfalfa"` becomes `0120120`). Mixing the two is rejected.
    pub fn parse(text: &str) -> Result<Self> {
        parse_word(text).map(|(w, _)| w)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.symbols
    }

    pub fn alphabet_size(&self) -> u8 {
        self.alphabet_size
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// The factor `w[start..end)` over the same alphabet.
    pub fn factor(&self, start: usize, end: usize) -> Word {
        Word { symbols: self.symbols[start..end].to_vec(), alphabet_size: self.alphabet_size }
    }

    pub fn with_alphabet(self, alphabet_size: u8) -> Result<Word> {
        Word::new(self.symbols, alphabet_size)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Word { symbols, alphabet_size: self.alphabet_size.max(other.alphabet_size) }
    }

    /// Rotation by `k`: `w[k..] w[..k]`.
    pub fn rotate(&self, k: usize) -> Word {
        if self.is_empty() {
            return self.clone();
        }
        let k = k % self.len();
        let mut symbols = self.symbols[k..].to_vec();
        symbols.extend_from_slice(&self.symbols[..k]);
        Word { symbols, alphabet_size: self.alphabet_size }
    }

    pub fn is_factor_of(&self, other: &[Symbol]) -> bool {
        self.is_empty() || other.windows(self.len()).any(|win| win == self.symbols.as_slice())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.symbols {
            let c = RENDER.get(s as usize).copied().unwrap_or(b'?');
            write!(f, "{}", c as char)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let symbols = s
            .chars()
            .map(|c| c.to_digit(36).map(|d| d as u8))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| serde::de::Error::custom(format!("bad word {s:?}")))?;
        Ok(Word::from_symbols(symbols))
    }
}

/// How the symbols of a parsed word were spelled, so results can be
/// printed back in the caller's letters.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum Lettering {
    #[default]
    Digits,
    Letters(Vec<char>),
}

impl Lettering {
    pub fn render(&self, w: &Word) -> String {
        match self {
            Lettering::Digits => w.to_string(),
            Lettering::Letters(letters) => {
                w.symbols().iter().map(|&s| letters.get(s as usize).copied().unwrap_or('?')).collect()
            }
        }
    }
}

/// Parses a word and remembers its lettering.
pub fn parse_word(text: &str) -> Result<(Word, Lettering)> {
    let text = text.trim();
    if text.chars().all(|c| c.is_ascii_digit()) {
        let symbols: Vec<Symbol> = text.bytes().map(|b| b - b'0').collect();
        return Ok((Word::from_symbols(symbols), Lettering::Digits));
    }
    if text.chars().all(|c| c.is_ascii_alphabetic()) {
        let mut letters: Vec<char> = Vec::new();
        let mut symbols = Vec::with_capacity(text.len());
        for c in text.chars() {
            let idx = match letters.iter().position(|&l| l == c) {
                Some(i) => i,
                None => {
                    letters.push(c);
                    letters.len() - 1
                }
            };
            symbols.push(idx as Symbol);
        }
        let k = letters.len().max(1) as u8;
        return Ok((Word::new(symbols, k)?, Lettering::Letters(letters)));
    }
    let has_digit = text.chars().any(|c| c.is_ascii_digit());
    let has_alpha = text.chars().any(|c| c.is_ascii_alphabetic());
    if has_digit && has_alpha {
        Err(Error::InvalidWord(format!("{text:?} mixes digits and letters")))
    } else {
        Err(Error::InvalidWord(format!("{text:?} contains characters other than digits or letters")))
    }
}

/// Where a repetition was found, relative to the word it was found in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessSource {
    /// The ordinary factor `w[start..start + length)`.
    Factor { start: usize },
    /// `s = v t` where `t u v = w[start..start + t_len + u_len + v_len)`.
    Circular { start: usize, t_len: usize, u_len: usize, v_len: usize },
    /// `s` is the concatenation of the listed factors.
    Product { factors: Vec<Word> },
}

/// A repetition of length `length` with period `period`, and where it lives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepetitionWitness {
    pub source: WitnessSource,
    pub period: usize,
    pub length: usize,
    pub exponent: Rational,
    pub repetition: Word,
}

impl RepetitionWitness {
    pub fn factor(w: &[Symbol], k: u8, start: usize, length: usize, period: usize) -> Self {
        RepetitionWitness {
            source: WitnessSource::Factor { start },
            period,
            length,
            exponent: Rational::from_lengths(length, period),
            repetition: Word { symbols: w[start..start + length].to_vec(), alphabet_size: k },
        }
    }

    pub fn circular(
        w: &[Symbol],
        k: u8,
        start: usize,
        t_len: usize,
        u_len: usize,
        v_len: usize,
        period: usize,
    ) -> Self {
        let v0 = start + t_len + u_len;
        let mut symbols = w[v0..v0 + v_len].to_vec();
        symbols.extend_from_slice(&w[start..start + t_len]);
        let length = symbols.len();
        RepetitionWitness {
            source: WitnessSource::Circular { start, t_len, u_len, v_len },
            period,
            length,
            exponent: Rational::from_lengths(length, period),
            repetition: Word { symbols, alphabet_size: k },
        }
    }

    pub fn product(factors: Vec<Word>, period: usize) -> Self {
        let symbols: Vec<Symbol> = factors.iter().flat_map(|f| f.symbols().iter().copied()).collect();
        let k = factors.iter().map(Word::alphabet_size).max().unwrap_or(1);
        let length = symbols.len();
        RepetitionWitness {
            source: WitnessSource::Product { factors },
            period,
            length,
            exponent: Rational::from_lengths(length, period),
            repetition: Word { symbols, alphabet_size: k },
        }
    }

    /// Rebuilds the repetition from `w` and checks every recorded quantity.
    /// Product witnesses are checked against `w` as the source of factors.
    pub fn replay(&self, w: &Word) -> bool {
        let ws = w.symbols();
        let rebuilt: Vec<Symbol> = match &self.source {
            WitnessSource::Factor { start } => match ws.get(*start..start + self.length) {
                Some(s) => s.to_vec(),
                None => return false,
            },
            WitnessSource::Circular { start, t_len, u_len, v_len } => {
                let end = start + t_len + u_len + v_len;
                if end > ws.len() {
                    return false;
                }
                let v0 = start + t_len + u_len;
                let mut s = ws[v0..end].to_vec();
                s.extend_from_slice(&ws[*start..start + t_len]);
                s
            }
            WitnessSource::Product { factors } => {
                if !factors.iter().all(|f| f.is_factor_of(ws)) {
                    return false;
                }
                factors.iter().flat_map(|f| f.symbols().iter().copied()).collect()
            }
        };
        self.is_consistent() && rebuilt == self.repetition.symbols
    }

    /// Checks length, period and exponent against the stored repetition.
    pub fn is_consistent(&self) -> bool {
        let s = self.repetition.symbols();
        self.period >= 1
            && s.len() == self.length
            && self.length >= self.period
            && has_period(s, self.period)
            && self.exponent == Rational::from_lengths(self.length, self.period)
    }
}

/// Outcome of a freeness check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "witness", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail(RepetitionWitness),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn witness(&self) -> Option<&RepetitionWitness> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(w) => Some(w),
        }
    }
}

pub fn has_period(s: &[Symbol], p: usize) -> bool {
    p >= 1 && (p..s.len()).all(|i| s[i] == s[i - p])
}

/// Border array: `fail[i]` is the length of the longest proper border of `s[..=i]`.
pub fn failure_function(s: &[Symbol]) -> Vec<usize> {
    let mut fail = vec![0usize; s.len()];
    let mut k = 0;
    for i in 1..s.len() {
        while k > 0 && s[i] != s[k] {
            k = fail[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        fail[i] = k;
    }
    fail
}

/// Smallest `p >= 1` such that `w[i + p] = w[i]` wherever both are defined.
pub fn shortest_period(w: &Word) -> Result<usize> {
    let s = w.symbols();
    if s.is_empty() {
        return Err(Error::EmptyWord);
    }
    let fail = failure_function(s);
    Ok(s.len() - fail[s.len() - 1])
}

/// `|w|` divided by the shortest period of `w`.
pub fn exponent(w: &Word) -> Result<Rational> {
    let p = shortest_period(w)?;
    Ok(Rational::from_lengths(w.len(), p))
}

/// Largest exponent of a nonempty factor, with the shortest (then earliest)
/// factor attaining it.
pub fn critical_exponent(w: &Word) -> Result<(Rational, RepetitionWitness)> {
    let s = w.symbols();
    if s.is_empty() {
        return Err(Error::EmptyWord);
    }
    let mut best: Option<(Rational, RepetitionWitness)> = None;
    for start in 0..s.len() {
        let fail = failure_function(&s[start..]);
        for (idx, &border) in fail.iter().enumerate() {
            let len = idx + 1;
            let p = len - border;
            let e = Rational::from_lengths(len, p);
            let better = best.as_ref().is_none_or(|(b, bw)| e > *b || (e == *b && len < bw.length));
            if better {
                best = Some((e, RepetitionWitness::factor(s, w.alphabet_size(), start, len, p)));
            }
        }
    }
    Ok(best.expect("nonempty word has a factor"))
}

/// The `|w|` rotations of `w` in order; `[ε]` for the empty word.
pub fn conjugates(w: &Word) -> Vec<Word> {
    if w.is_empty() {
        return vec![w.clone()];
    }
    (0..w.len()).map(|k| w.rotate(k)).collect()
}

/// All distinct `s = v t` with `t u v` a factor of `w` and `1 <= |s| <= max_len`.
pub fn circular_factors(w: &Word, max_len: usize) -> BTreeSet<Word> {
    let s = w.symbols();
    let n = s.len();
    let mut out = BTreeSet::new();
    for start in 0..n {
        for end in start..=n {
            // t = s[start..mid1), u = s[mid1..mid2), v = s[mid2..end)
            for mid1 in start..=end {
                for mid2 in mid1..=end {
                    let len = (end - mid2) + (mid1 - start);
                    if len == 0 || len > max_len {
                        continue;
                    }
                    let mut sym = s[mid2..end].to_vec();
                    sym.extend_from_slice(&s[start..mid1]);
                    out.insert(Word { symbols: sym, alphabet_size: w.alphabet_size() });
                }
            }
        }
    }
    out
}

/// Largest exponent over all circular factors of `w`.
pub fn circular_critical_exponent(w: &Word) -> Result<(Rational, RepetitionWitness)> {
    circular_critical_exponent_bounded(w, w.len())
}

/// Largest exponent over circular factors of length at most `max_len`.
///
/// For each `v = w[j..j + b)` the border array of `v` is reused while the
/// candidates `v t`, `t = w[i..i + a)`, `i + a <= j`, are extended one
/// symbol at a time, so every candidate costs amortized constant work on top
/// of the border computation.
pub fn circular_critical_exponent_bounded(w: &Word, max_len: usize) -> Result<(Rational, RepetitionWitness)> {
    let s = w.symbols();
    let n = s.len();
    if n == 0 || max_len == 0 {
        return Err(Error::EmptyWord);
    }
    let k = w.alphabet_size();
    let mut best: Option<(Rational, RepetitionWitness)> = None;
    let mut consider = |e: Rational, make: &dyn Fn() -> RepetitionWitness| {
        if best.as_ref().is_none_or(|(b, _)| e > *b) {
            best = Some((e, make()));
        }
    };
    // Scratch buffer holding v t and its border array.
    let mut buf: Vec<Symbol> = Vec::with_capacity(n);
    let mut fail: Vec<usize> = Vec::with_capacity(n);
    for j in 0..n {
        let vfail = failure_function(&s[j..n.min(j + max_len)]);
        for b in 1..=vfail.len() {
            let p = b - vfail[b - 1];
            consider(Rational::from_lengths(b, p), &|| RepetitionWitness::circular(s, k, j, 0, 0, b, p));
            if b == max_len {
                continue;
            }
            for i in 0..j {
                buf.clear();
                buf.extend_from_slice(&s[j..j + b]);
                fail.clear();
                fail.extend_from_slice(&vfail[..b]);
                let mut state = vfail[b - 1];
                let amax = (j - i).min(max_len - b);
                for a in 1..=amax {
                    let c = s[i + a - 1];
                    while state > 0 && buf[state] != c {
                        state = fail[state - 1];
                    }
                    if buf[state] == c {
                        state += 1;
                    }
                    buf.push(c);
                    fail.push(state);
                    let len = b + a;
                    let p = len - state;
                    consider(Rational::from_lengths(len, p), &|| {
                        RepetitionWitness::circular(s, k, i, a, j - i - a, b, p)
                    });
                }
            }
        }
    }
    Ok(best.expect("nonempty word has a circular factor"))
}

/// Checks that no factor of `w` violates `th`.
pub fn is_power_free(w: &Word, th: &PowerThreshold) -> Verdict {
    if w.is_empty() {
        return Verdict::Pass;
    }
    let s = w.symbols();
    for start in 0..s.len() {
        let fail = failure_function(&s[start..]);
        for (idx, &border) in fail.iter().enumerate() {
            let len = idx + 1;
            let p = len - border;
            if th.violated_by_lengths(len, p) {
                return Verdict::Fail(RepetitionWitness::factor(s, w.alphabet_size(), start, len, p));
            }
        }
    }
    Verdict::Pass
}

/// Checks that no circular factor of `w` violates `th`.
pub fn is_circularly_power_free(w: &Word, th: &PowerThreshold) -> Verdict {
    if w.is_empty() {
        return Verdict::Pass;
    }
    let (e, witness) = circular_critical_exponent(w).expect("nonempty");
    if th.violated_by(e) {
        Verdict::Fail(witness)
    } else {
        Verdict::Pass
    }
}

pub const DEFAULT_CHARACTERIZATION_BOUND: usize = 12;

/// Computes the four sets of strings
/// (a) factors of conjugates of factors, (b) prefixes of conjugates of factors,
/// (c) suffixes of conjugates of factors, (d) `v t` for factors `t u v`,
/// each by its own brute-force enumeration, and reports whether they coincide.
pub fn verify_conjugate_characterization(w: &Word) -> Result<bool> {
    verify_conjugate_characterization_with_bound(w, DEFAULT_CHARACTERIZATION_BOUND)
}

pub fn verify_conjugate_characterization_with_bound(w: &Word, bound: usize) -> Result<bool> {
    if w.len() > bound {
        return Err(Error::BoundExceeded { len: w.len(), bound });
    }
    let sets = characterization_sets(w.symbols());
    Ok(sets.iter().all(|set| *set == sets[0]))
}

fn characterization_sets(s: &[Symbol]) -> [HashSet<Vec<Symbol>>; 4] {
    let n = s.len();
    let mut factors: HashSet<&[Symbol]> = HashSet::new();
    for i in 0..=n {
        for j in i..=n {
            factors.insert(&s[i..j]);
        }
    }
    let rotations = |f: &[Symbol]| -> Vec<Vec<Symbol>> {
        if f.is_empty() {
            return vec![Vec::new()];
        }
        (0..f.len()).map(|k| [&f[k..], &f[..k]].concat()).collect()
    };
    let mut a = HashSet::new();
    let mut b = HashSet::new();
    let mut c = HashSet::new();
    let mut d = HashSet::new();
    for f in &factors {
        for conj in rotations(f) {
            let m = conj.len();
            for i in 0..=m {
                b.insert(conj[..i].to_vec());
                c.insert(conj[i..].to_vec());
                for j in i..=m {
                    a.insert(conj[i..j].to_vec());
                }
            }
        }
        for x in 0..=f.len() {
            for y in x..=f.len() {
                let (t, v) = (&f[..x], &f[y..]);
                d.insert([v, t].concat());
            }
        }
    }
    [a, b, c, d]
}

/// Finds some square `x x` in `s`, returning `(start, |x|)`.
///
/// Main–Lorentz divide and conquer with Z-functions, `O(n log n)`.
pub fn find_square(s: &[Symbol]) -> Option<(usize, usize)> {
    let t: Vec<u16> = s.iter().map(|&c| c as u16).collect();
    find_square_rec(&t, 0)
}

const SEP: u16 = u16::MAX;

fn z_function(s: &[u16]) -> Vec<usize> {
    let n = s.len();
    let mut z = vec![0usize; n];
    let (mut l, mut r) = (0usize, 0usize);
    for i in 1..n {
        if i < r {
            z[i] = (r - i).min(z[i - l]);
        }
        while i + z[i] < n && s[z[i]] == s[i + z[i]] {
            z[i] += 1;
        }
        if i + z[i] > r {
            l = i;
            r = i + z[i];
        }
    }
    z
}

fn find_square_rec(s: &[u16], shift: usize) -> Option<(usize, usize)> {
    let n = s.len();
    if n < 2 {
        return None;
    }
    let nu = n / 2;
    let nv = n - nu;
    let (u, v) = s.split_at(nu);
    if let Some(found) = find_square_rec(u, shift) {
        return Some(found);
    }
    if let Some(found) = find_square_rec(v, shift + nu) {
        return Some(found);
    }
    let ru: Vec<u16> = u.iter().rev().copied().collect();
    let rv: Vec<u16> = v.iter().rev().copied().collect();
    let z1 = z_function(&ru);
    let z2 = z_function(&[v, &[SEP], u].concat());
    let z3 = z_function(&[&ru[..], &[SEP], &rv[..]].concat());
    let z4 = z_function(v);
    let get = |z: &[usize], i: usize| z.get(i).copied().unwrap_or(0);
    for cntr in 0..n {
        let (l, k1, k2, left) = if cntr < nu {
            (nu - cntr, get(&z1, nu - cntr), get(&z2, nv + 1 + cntr), true)
        } else {
            let l = cntr - nu + 1;
            (l, get(&z3, nu + 1 + nv - 1 - (cntr - nu)), get(&z4, cntr - nu + 1), false)
        };
        if k1 + k2 >= l {
            let lo = 1.max(l.saturating_sub(k2));
            let hi = l.min(k1);
            // Any l1 in lo..=hi works; on the left half l1 = l is excluded.
            let l1 = lo;
            if l1 <= hi && !(left && l1 == l) {
                let pos = if left { cntr - l1 } else { cntr + 1 - l - l1 };
                return Some((shift + pos, l));
            }
        }
    }
    None
}
