//! Uniform morphisms, their fixed points and exact factor sets.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::report::ClaimReport;
use crate::words::{has_period, RepetitionWitness, Symbol, Word};

/// Built-in image tables with the SHA-256 of each data file.
const BUILTINS: [(&str, &str, &str); 3] = [
    ("mu", include_str!("../data/mu.txt"), "d7b12f117ba94399e007522db3cc1d9eb523795f22121c225b4bd62e2db75600"),
    ("psi", include_str!("../data/psi.txt"), "3d02e8b963432cf0e6573fb6a28d04a5dca75806aeebd5f78a000e716df8567c"),
    (
        "thue-morse",
        include_str!("../data/thue-morse.txt"),
        "2f96a42fc446ca0586187412f5fd9a09449b556dfae49f7624d7d5160a3e7208",
    ),
];

pub const BUILTIN_NAMES: [&str; 3] = ["mu", "psi", "thue-morse"];

/// Prefixes longer than this are never materialised while closing factor sets.
const MAX_PREFIX_LEN: usize = 1 << 26;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformMorphism {
    pub name: String,
    pub source_alphabet_size: u8,
    pub target_alphabet_size: u8,
    pub q: usize,
    pub images: Vec<Word>,
}

/// `h(ab) = r h(c) s` at an offset the definition forbids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncCounterexample {
    pub a: Symbol,
    pub b: Symbol,
    pub c: Symbol,
    pub r_len: usize,
    pub s_len: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrongSyncCounterexample {
    NotSynchronizing(SyncCounterexample),
    /// `h(c) = x y` with `x` a prefix of `h(a)`, `y` a suffix of `h(b)`, `|x| = split`.
    Straddle {
        a: Symbol,
        b: Symbol,
        c: Symbol,
        split: usize,
    },
}

impl UniformMorphism {
    pub fn new(name: &str, source_alphabet_size: u8, target_alphabet_size: u8, images: Vec<Word>) -> Result<Self> {
        let bad = |why: String| Error::InvalidMorphism(why);
        if source_alphabet_size == 0 || images.len() != source_alphabet_size as usize {
            return Err(bad(format!("expected {source_alphabet_size} images, got {}", images.len())));
        }
        let q = images[0].len();
        if q == 0 {
            return Err(bad("images must be nonempty".into()));
        }
        let mut fixed = Vec::with_capacity(images.len());
        for (c, img) in images.into_iter().enumerate() {
            if img.len() != q {
                return Err(bad(format!("image of {c} has length {}, expected {q}", img.len())));
            }
            fixed.push(img.with_alphabet(target_alphabet_size)?);
        }
        Ok(UniformMorphism { name: name.to_string(), source_alphabet_size, target_alphabet_size, q, images: fixed })
    }

    /// Parses the text format: a header `k_source k_target q`, then one image
    /// per line. Blank lines and lines starting with `#` are ignored.
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidMorphism(why.to_string());
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header: Vec<usize> = lines
            .next()
            .ok_or_else(|| bad("missing header"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("header must be three integers")))
            .collect::<Result<_>>()?;
        let [ks, kt, q] = header[..] else {
            return Err(bad("header must be three integers"));
        };
        if ks == 0 || ks > 36 || kt == 0 || kt > 36 {
            return Err(bad("alphabet sizes must lie in 1..=36"));
        }
        let images: Vec<Word> = lines
            .map(|l| {
                let symbols = l
                    .chars()
                    .map(|ch| ch.to_digit(36).map(|d| d as Symbol).ok_or_else(|| bad(&format!("bad symbol {ch:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                Word::new(symbols, kt as u8)
            })
            .collect::<Result<_>>()?;
        let h = Self::new(name, ks as u8, kt as u8, images)?;
        if h.q != q {
            return Err(bad(&format!("header says q = {q}, images have length {}", h.q)));
        }
        Ok(h)
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let (_, text, sum) = BUILTINS
            .iter()
            .find(|(n, _, _)| n.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::UnknownMorphism(name.to_string()))?;
        let actual = hex::encode(Sha256::digest(text.as_bytes()));
        if actual != *sum {
            return Err(Error::InvalidMorphism(format!("checksum mismatch for built-in {name}")));
        }
        Self::parse(name, text)
    }

    /// A built-in name, or else a path to a morphism file.
    pub fn load(name_or_path: &str) -> Result<Self> {
        match Self::builtin(name_or_path) {
            Err(Error::UnknownMorphism(_)) => {
                let path = Path::new(name_or_path);
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::UnknownMorphism(format!("{name_or_path} (not built in, and {e})")))?;
                Self::parse(name_or_path, &text)
            }
            other => other,
        }
    }

    pub fn mu() -> Self {
        Self::builtin("mu").expect("built-in table")
    }

    pub fn psi() -> Self {
        Self::builtin("psi").expect("built-in table")
    }

    pub fn thue_morse() -> Self {
        Self::builtin("thue-morse").expect("built-in table")
    }

    /// A copy with one image replaced; the image is validated.
    pub fn with_image(&self, c: Symbol, image: Word) -> Result<Self> {
        let mut images = self.images.clone();
        images[c as usize] = image;
        Self::new(&format!("{}*", self.name), self.source_alphabet_size, self.target_alphabet_size, images)
    }

    pub fn image(&self, c: Symbol) -> &[Symbol] {
        self.images[c as usize].symbols()
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        Ok(Word::new(self.apply_symbols(w.symbols())?, self.target_alphabet_size).expect("images validated"))
    }

    pub fn apply_symbols(&self, w: &[Symbol]) -> Result<Vec<Symbol>> {
        let mut out = Vec::with_capacity(w.len() * self.q);
        for &c in w {
            if c >= self.source_alphabet_size {
                return Err(Error::SymbolOutOfAlphabet { symbol: c, alphabet_size: self.source_alphabet_size });
            }
            out.extend_from_slice(self.image(c));
        }
        Ok(out)
    }

    pub fn is_endomorphism(&self) -> bool {
        self.source_alphabet_size == self.target_alphabet_size
    }

    fn check_prolongable(&self, a: Symbol) -> Result<()> {
        if !self.is_endomorphism() {
            return Err(Error::AlphabetMismatch);
        }
        if a >= self.source_alphabet_size {
            return Err(Error::SymbolOutOfAlphabet { symbol: a, alphabet_size: self.source_alphabet_size });
        }
        if self.q < 2 || self.image(a)[0] != a {
            return Err(Error::NotProlongable(a));
        }
        Ok(())
    }

    /// The first `n` symbols of `h^ω(a)`.
    pub fn fixed_point_prefix(&self, a: Symbol, n: usize) -> Result<Word> {
        self.check_prolongable(a)?;
        let mut cur = vec![a];
        while cur.len() < n {
            // Only the part that can reach length n needs expanding.
            let need = n.div_ceil(self.q).min(cur.len());
            cur = self.apply_symbols(&cur[..need])?;
        }
        cur.truncate(n);
        Ok(Word::new(cur, self.target_alphabet_size).expect("images validated"))
    }

    pub fn sync_counterexample(&self) -> Option<SyncCounterexample> {
        let q = self.q;
        let k = self.source_alphabet_size;
        for a in 0..k {
            for b in 0..k {
                let ab = [self.image(a), self.image(b)].concat();
                for c in 0..k {
                    let hc = self.image(c);
                    for off in 0..=q {
                        if &ab[off..off + q] != hc {
                            continue;
                        }
                        let allowed = (off == 0 && a == c) || (off == q && b == c);
                        if !allowed {
                            return Some(SyncCounterexample { a, b, c, r_len: off, s_len: q - off });
                        }
                    }
                }
            }
        }
        None
    }

    pub fn is_synchronizing(&self) -> bool {
        self.sync_counterexample().is_none()
    }

    pub fn strong_sync_counterexample(&self) -> Option<StrongSyncCounterexample> {
        if let Some(cx) = self.sync_counterexample() {
            return Some(StrongSyncCounterexample::NotSynchronizing(cx));
        }
        let k = self.source_alphabet_size;
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    if c == a || c == b {
                        continue;
                    }
                    let (ha, hb, hc) = (self.image(a), self.image(b), self.image(c));
                    for split in 0..=self.q {
                        if hc[..split] == ha[..split] && hc[split..] == hb[split..] {
                            return Some(StrongSyncCounterexample::Straddle { a, b, c, split });
                        }
                    }
                }
            }
        }
        None
    }

    pub fn is_strongly_synchronizing(&self) -> bool {
        self.strong_sync_counterexample().is_none()
    }

    /// Number of consecutive images a window of `len` symbols can touch.
    fn blocks_spanned(&self, len: usize) -> usize {
        if len <= 1 {
            return len;
        }
        (len - 2) / self.q + 2
    }

    /// Exact length-`len` factors of `h^ω(a)`, from shorter exact sets.
    ///
    /// Length 1 and 2 are least fixed points of one expansion step. Any
    /// longer factor lies in `h(x)` for a factor `x` that is strictly shorter.
    fn exact_factors(
        &self,
        a: Symbol,
        len: usize,
        memo: &mut HashMap<usize, HashSet<Vec<Symbol>>>,
    ) -> HashSet<Vec<Symbol>> {
        if let Some(s) = memo.get(&len) {
            return s.clone();
        }
        let set: HashSet<Vec<Symbol>> = match len {
            0 => HashSet::from([Vec::new()]),
            1 | 2 => {
                let mut set: HashSet<Vec<Symbol>> = if len == 1 {
                    HashSet::from([vec![a]])
                } else {
                    self.windows_of_images(&self.exact_factors(a, 1, memo), 2)
                };
                loop {
                    let grown: HashSet<Vec<Symbol>> = self.windows_of_images(&set, len);
                    let before = set.len();
                    set.extend(grown);
                    if set.len() == before {
                        break set;
                    }
                }
            }
            _ => {
                let shorter = self.exact_factors(a, self.blocks_spanned(len), memo);
                self.windows_of_images(&shorter, len)
            }
        };
        memo.insert(len, set.clone());
        set
    }

    fn windows_of_images(&self, xs: &HashSet<Vec<Symbol>>, len: usize) -> HashSet<Vec<Symbol>> {
        let mut out = HashSet::new();
        for x in xs {
            let hx = self.apply_symbols(x).expect("factors use the source alphabet");
            for win in hx.windows(len) {
                out.insert(win.to_vec());
            }
        }
        out
    }

    /// The exact set of length-`len` factors of `h^ω(a)`.
    pub fn factor_set(&self, a: Symbol, len: usize) -> Result<FactorSet> {
        self.check_prolongable(a)?;
        if len == 0 {
            return Err(Error::Precondition("factor length must be at least 1".into()));
        }
        let exact = self.exact_factors(a, len, &mut HashMap::new());
        let (iterations, prefix_len) = self.witness_iterations(a, len, &exact, None)?;
        Ok(FactorSet::from_raw(
            len,
            exact,
            self.target_alphabet_size,
            Provenance {
                morphism: self.name.clone(),
                seed: a,
                image_under: None,
                closure_iterations: iterations,
                witness_prefix_len: prefix_len,
            },
        ))
    }

    /// The exact length-`len` factors of `g(h^ω(a))` for a second morphism `g`.
    pub fn image_factor_set(&self, g: &UniformMorphism, a: Symbol, len: usize) -> Result<FactorSet> {
        self.check_prolongable(a)?;
        if g.source_alphabet_size != self.target_alphabet_size {
            return Err(Error::AlphabetMismatch);
        }
        if len == 0 {
            return Err(Error::Precondition("factor length must be at least 1".into()));
        }
        let pre = self.exact_factors(a, g.blocks_spanned(len), &mut HashMap::new());
        let exact = g.windows_of_images(&pre, len);
        let (iterations, prefix_len) = self.witness_iterations(a, len, &exact, Some(g))?;
        Ok(FactorSet::from_raw(
            len,
            exact,
            g.target_alphabet_size,
            Provenance {
                morphism: self.name.clone(),
                seed: a,
                image_under: Some(g.name.clone()),
                closure_iterations: iterations,
                witness_prefix_len: prefix_len,
            },
        ))
    }

    /// Smallest `m` such that the length-`len` factors of `h^m(a)` (or of
    /// `g(h^m(a))`) are exactly `exact`, and the length of that word.
    fn witness_iterations(
        &self,
        a: Symbol,
        len: usize,
        exact: &HashSet<Vec<Symbol>>,
        g: Option<&UniformMorphism>,
    ) -> Result<(usize, usize)> {
        let mut cur = vec![a];
        let mut m = 0;
        loop {
            let text = match g {
                Some(g) => g.apply_symbols(&cur)?,
                None => cur.clone(),
            };
            if text.len() >= len {
                let found: HashSet<&[Symbol]> = text.windows(len).collect();
                if let Some(extra) = found.iter().find(|f| !exact.contains(**f)) {
                    // Would mean the closure missed a factor: a bug, not bad input.
                    panic!("factor {extra:?} of an iterate is missing from the closed set");
                }
                if found.len() == exact.len() {
                    return Ok((m, text.len()));
                }
            }
            if cur.len() * self.q > MAX_PREFIX_LEN {
                return Err(Error::BoundExceeded { len: cur.len() * self.q, bound: MAX_PREFIX_LEN });
            }
            cur = self.apply_symbols(&cur)?;
            m += 1;
        }
    }

    /// Checks that `h^ω(a)` has no factor `z^n` with `|z^n| < 2nq`. For a
    /// strongly synchronizing `h`, shorter powers are the only possible ones,
    /// so a pass shows the fixed point is free of `n`-th powers.
    pub fn lift_power_freeness(&self, a: Symbol, n: usize) -> Result<ClaimReport> {
        if let Some(cx) = self.strong_sync_counterexample() {
            return Err(Error::Precondition(format!("{} is not strongly synchronizing: {cx:?}", self.name)));
        }
        if n < 2 {
            return Err(Error::Precondition(format!("power {n} must be at least 2")));
        }
        let started = Instant::now();
        let bound = 2 * n * self.q;
        let fs = self.factor_set(a, bound - 1)?;
        let mut report = ClaimReport::new(
            "lift_power_freeness",
            format!("{}^ω({a}) has no factor z^{n} with |z^{n}| < {bound}, so it contains no {n}-th powers", self.name),
        );
        report.param("morphism", &self.name).param("seed", a).param("n", n).param("q", self.q).param("bound", bound);
        report.stat("factor_length", fs.length).stat("members", fs.members.len()).stat("provenance", &fs.provenance);
        if let Some(w) = fs.find_power(n, bound - 1) {
            report.violation("short power", w);
        }
        report.elapsed(started.elapsed());
        Ok(report)
    }

    /// For every prefix `z^n` of `h(w)` with `|z| >= q`: `q` divides `|z|`
    /// and `w` starts with an `n`-th power of length `n|z|/q`.
    pub fn check_technical_lemma(&self, w: &Word, n: usize) -> Result<bool> {
        if let Some(cx) = self.sync_counterexample() {
            return Err(Error::Precondition(format!("{} is not synchronizing: {cx:?}", self.name)));
        }
        self.technical_lemma_holds(w, n)
    }

    /// The conclusion of `check_technical_lemma` without its precondition.
    pub fn technical_lemma_holds(&self, w: &Word, n: usize) -> Result<bool> {
        if n < 2 {
            return Err(Error::Precondition(format!("power {n} must be greater than 1")));
        }
        let hw = self.apply_symbols(w.symbols())?;
        let ws = w.symbols();
        for z in self.q..=hw.len() / n {
            if !has_period(&hw[..n * z], z) {
                continue;
            }
            if z % self.q != 0 {
                return Ok(false);
            }
            let u = z / self.q;
            if n * u > ws.len() || !has_period(&ws[..n * u], u) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for UniformMorphism {
    /// The file format accepted by `parse`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {}", self.source_alphabet_size, self.target_alphabet_size, self.q)?;
        for img in &self.images {
            writeln!(f, "{img}")?;
        }
        Ok(())
    }
}

/// The first `n` symbols of `g(h^ω(a))`.
pub fn image_of_fixed_point_prefix(g: &UniformMorphism, h: &UniformMorphism, a: Symbol, n: usize) -> Result<Word> {
    let pre = h.fixed_point_prefix(a, n.div_ceil(g.q))?;
    let mut s = g.apply_symbols(pre.symbols())?;
    s.truncate(n);
    Word::new(s, g.target_alphabet_size)
}

/// The word `μ(ψ^ω(0))`, truncated to `n` symbols.
pub fn main_word_prefix(n: usize) -> Word {
    image_of_fixed_point_prefix(&UniformMorphism::mu(), &UniformMorphism::psi(), 0, n).expect("built-ins compose")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub morphism: String,
    pub seed: Symbol,
    /// Set when the factors are those of an image of the fixed point.
    pub image_under: Option<String>,
    /// Iterations of the morphism after which every member had appeared.
    pub closure_iterations: usize,
    /// Every member occurs in the prefix of this length.
    pub witness_prefix_len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorSet {
    pub length: usize,
    pub members: BTreeSet<Word>,
    pub provenance: Provenance,
}

impl FactorSet {
    fn from_raw(length: usize, raw: HashSet<Vec<Symbol>>, k: u8, provenance: Provenance) -> Self {
        let members = raw.into_iter().map(|s| Word::new(s, k).expect("closed set stays in the alphabet")).collect();
        FactorSet { length, members, provenance }
    }

    pub fn contains(&self, w: &[Symbol]) -> bool {
        self.members.iter().any(|m| m.symbols() == w)
    }

    /// Some factor `z^n` with `|z^n| <= max_len` inside a member.
    pub fn find_power(&self, n: usize, max_len: usize) -> Option<RepetitionWitness> {
        for m in &self.members {
            let s = m.symbols();
            for start in 0..s.len() {
                for z in 1..=(s.len() - start).min(max_len) / n {
                    if has_period(&s[start..start + n * z], z) {
                        return Some(RepetitionWitness::factor(s, m.alphabet_size(), start, n * z, z));
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

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn tables() {
        assert_eq!(UniformMorphism::psi().apply(&w("0")).unwrap().to_string(), "0435");
        assert_eq!(UniformMorphism::mu().apply(&w("01")).unwrap().to_string(), "012102120102012201020121012021");
        assert!(UniformMorphism::mu().apply(&Word::empty(6)).unwrap().is_empty());
        assert!(UniformMorphism::load("nope").is_err());
    }

    #[test]
    fn fixed_points() {
        let psi = UniformMorphism::psi();
        assert_eq!(psi.fixed_point_prefix(0, 4).unwrap().to_string(), "0435");
        assert!(psi.fixed_point_prefix(1, 4).is_err());
        let tm = UniformMorphism::thue_morse();
        assert_eq!(tm.fixed_point_prefix(0, 8).unwrap().to_string(), "01101001");
        assert!(tm.fixed_point_prefix(0, 0).unwrap().is_empty());
        assert_eq!(UniformMorphism::mu().fixed_point_prefix(0, 3), Err(Error::AlphabetMismatch));
    }

    #[test]
    fn synchronization() {
        assert!(UniformMorphism::mu().is_strongly_synchronizing());
        assert!(UniformMorphism::psi().is_strongly_synchronizing());
        // 0110 contains 11 only at a boundary, but 1001 = 10 01 puts 01 at offset 1.
        let tm = UniformMorphism::thue_morse();
        assert_eq!(tm.sync_counterexample(), Some(SyncCounterexample { a: 0, b: 0, c: 1, r_len: 1, s_len: 1 }));
        let flat = UniformMorphism::parse("x", "2 2 2\n01\n01\n").unwrap();
        assert!(!flat.is_synchronizing());
    }

    #[test]
    fn small_factor_sets() {
        let letters = UniformMorphism::psi().factor_set(0, 1).unwrap();
        assert_eq!(letters.members.len(), 6);
        let tm2 = UniformMorphism::thue_morse().factor_set(0, 2).unwrap();
        let got: Vec<String> = tm2.members.iter().map(|m| m.to_string()).collect();
        assert_eq!(got, ["00", "01", "10", "11"]);
    }

    #[test]
    fn technical_lemma_examples() {
        let tm = UniformMorphism::thue_morse();
        // Thue-Morse is not synchronizing, so the check refuses it, though the
        // conclusion holds here: h(00) = (01)^2 and 00 = 0^2.
        assert!(tm.check_technical_lemma(&w("00"), 2).is_err());
        assert!(tm.technical_lemma_holds(&w("00"), 2).unwrap());
        let flat = UniformMorphism::parse("x", "2 2 2\n01\n01\n").unwrap();
        assert!(matches!(flat.check_technical_lemma(&w("00"), 2), Err(Error::Precondition(_))));
        assert!(UniformMorphism::psi().check_technical_lemma(&w("0435"), 2).unwrap());
    }

    #[test]
    fn file_format_round_trips() {
        let mu = UniformMorphism::mu();
        assert_eq!(UniformMorphism::parse("mu", &mu.to_string()).unwrap(), mu);
        assert!(UniformMorphism::parse("x", "2 2 3\n01\n10\n").is_err());
        assert!(UniformMorphism::parse("x", "2 2 2\n01\n").is_err());
        assert!(UniformMorphism::parse("x", "2 2 2\n01\n13\n").is_err());
    }
}
