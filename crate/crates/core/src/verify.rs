//! One check per computational claim, each producing a `ClaimReport`.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morphisms::{image_of_fixed_point_prefix, UniformMorphism};
use crate::products::{product_exponent, product_exponent_until, FactorIndex};
use crate::rational::{PowerThreshold, Rational};
use crate::report::ClaimReport;
use crate::search::{self, longest_word_with, windowed_scan, SearchConfig, SearchOptions};
use crate::words::{circular_critical_exponent, find_square, is_power_free, Symbol, Word};

pub const CLAIM_IDS: [&str; 10] = [
    "mu_ssm",
    "psi_ssm",
    "psi_squarefree",
    "psi_circularly_cubefree",
    "main_word",
    "147",
    "147_ci",
    "thue_morse_binary",
    "bound_theorem_desk",
    "rti2",
];

/// Claims skipped by `--skip-long`.
pub const LONG_CLAIMS: [&str; 1] = ["147"];

/// Length of the prefixes scanned by the independent oracles.
pub const ORACLE_PREFIX_LEN: usize = 100_000;

/// Square bound of the scaled-down ternary search, and its recorded length.
pub const CI_SQUARE_BOUND: usize = 50;
pub const CI_GOLDEN_LENGTH: usize = 229;

/// Longest binary word avoiding circular 4-powers, recorded on first run.
pub const BINARY_CIRCULAR_FOUR_LENGTH: usize = 11;

pub const DEFAULT_RADIUS_CONSTANT: usize = 22;

/// Products longer than `constant_c * q` cannot break the bound, so only
/// shorter ones are enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRadius {
    pub constant_c: usize,
    pub q: usize,
}

impl CheckRadius {
    pub fn new(constant_c: usize, q: usize) -> Self {
        CheckRadius { constant_c, q }
    }

    pub fn radius(&self) -> usize {
        self.constant_c * self.q
    }
}

/// The morphisms the claims are about; swapped out for mutation testing.
#[derive(Clone, Debug)]
pub struct Subjects {
    pub mu: UniformMorphism,
    pub psi: UniformMorphism,
    pub thue_morse: UniformMorphism,
}

impl Subjects {
    pub fn builtin() -> Self {
        Subjects { mu: UniformMorphism::mu(), psi: UniformMorphism::psi(), thue_morse: UniformMorphism::thue_morse() }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub subjects: Subjects,
    pub skip_long: bool,
    pub radius_constant: usize,
    pub rti_max: usize,
    pub threads: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            subjects: Subjects::builtin(),
            skip_long: false,
            radius_constant: DEFAULT_RADIUS_CONSTANT,
            rti_max: 3,
            threads: None,
        }
    }
}

fn non_strict(n: u64, d: u64) -> PowerThreshold {
    PowerThreshold::non_strict(Rational::new(n, d))
}

fn strict(n: u64, d: u64) -> PowerThreshold {
    PowerThreshold::strict(Rational::new(n, d))
}

/// Runs `body`; an error becomes a failing report instead of propagating.
fn claim(id: &str, statement: &str, body: impl FnOnce(&mut ClaimReport) -> Result<()>) -> ClaimReport {
    let started = Instant::now();
    let mut report = ClaimReport::new(id, statement);
    if let Err(e) = body(&mut report) {
        report.fail(&e.to_string());
    }
    report.elapsed(started.elapsed());
    report
}

pub fn verify_ssm(id: &str, h: &UniformMorphism) -> ClaimReport {
    claim(id, &format!("{} is a strongly synchronizing morphism", h.name), |r| {
        r.param("morphism", &h.name).param("q", h.q).param("images", &h.images);
        if let Some(cx) = h.strong_sync_counterexample() {
            r.violation("counterexample", cx);
        }
        Ok(())
    })
}

pub fn verify_psi_squarefree() -> ClaimReport {
    verify_psi_squarefree_with(&UniformMorphism::psi())
}

pub fn verify_psi_squarefree_with(psi: &UniformMorphism) -> ClaimReport {
    claim("psi_squarefree", "the fixed point psi^ω(0) is squarefree", |r| {
        let lifted = psi.lift_power_freeness(0, 2)?;
        r.parameters.extend(lifted.parameters);
        r.stats.extend(lifted.stats);
        for w in lifted.witnesses {
            r.violation(&w.label, w.value);
        }
        let prefix = psi.fixed_point_prefix(0, ORACLE_PREFIX_LEN)?;
        r.param("oracle_prefix_len", ORACLE_PREFIX_LEN);
        if let Some((start, half)) = find_square(prefix.symbols()) {
            r.violation("square in prefix", serde_json::json!({ "start": start, "half_length": half }));
        }
        Ok(())
    })
}

pub fn verify_psi_circularly_cubefree() -> ClaimReport {
    verify_psi_circularly_cubefree_with(&UniformMorphism::psi(), 66)
}

/// Products `v t` of two factors with `|vt| <= bound` contain every circular
/// factor of that length, so a pass here is a sound certificate.
pub fn verify_psi_circularly_cubefree_with(psi: &UniformMorphism, bound: usize) -> ClaimReport {
    claim("psi_circularly_cubefree", "psi^ω(0) has no circular cube of length at most the bound", |r| {
        r.param("bound", bound).param("threshold", non_strict(3, 1));
        let fs = psi.factor_set(0, bound)?;
        r.stat("factor_set_size", fs.members.len()).stat("provenance", &fs.provenance);
        let index = FactorIndex::from_members(psi.target_alphabet_size, &fs.members);
        let best = product_exponent(&index, 2, bound)?;
        r.stat("max_two_factor_exponent", best.exponent);
        if best.exponent >= Rational::integer(3) {
            r.violation("cube product", &best);
        }
        let prefix = psi.fixed_point_prefix(0, ORACLE_PREFIX_LEN)?;
        r.param("oracle_prefix_len", ORACLE_PREFIX_LEN).param("oracle_window", bound);
        if let Some(w) = windowed_scan(&prefix, non_strict(3, 1), true, bound) {
            r.violation("circular cube in prefix window", w);
        }
        Ok(())
    })
}

pub fn verify_main_word() -> ClaimReport {
    let s = Subjects::builtin();
    verify_main_word_with(&s.mu, &s.psi, CheckRadius::new(DEFAULT_RADIUS_CONSTANT, s.mu.q))
}

/// Every product `yx` of two factors of `mu(psi^ω(0))` shorter than the
/// radius has exponent at most 13/4.
pub fn verify_main_word_with(mu: &UniformMorphism, psi: &UniformMorphism, radius: CheckRadius) -> ClaimReport {
    let statement = "no product of two factors of mu(psi^ω(0)) shorter than the radius has exponent above 13/4";
    claim("main_word", statement, |r| {
        let bound = Rational::new(13, 4);
        let max_len = radius.radius().saturating_sub(1).max(2);
        r.param("radius", radius).param("max_product_length", max_len).param("threshold", strict(13, 4));
        r.stat(
            "note",
            "only the finite check is mechanized; that longer violations reduce to shorter ones is taken as given",
        );
        let fs = psi.image_factor_set(mu, 0, max_len)?;
        r.stat("factor_set_size", fs.members.len()).stat("provenance", &fs.provenance);
        let index = FactorIndex::from_members(mu.target_alphabet_size, &fs.members);
        let best = product_exponent_until(&index, 2, max_len, bound)?;
        if best.exponent > bound {
            r.violation("product above 13/4", &best);
            return Ok(());
        }
        r.stat("max_two_factor_exponent", best.exponent);
        r.extremal("product attaining the maximum", &best);
        let prefix = image_of_fixed_point_prefix(mu, psi, 0, ORACLE_PREFIX_LEN)?;
        r.param("oracle_prefix_len", ORACLE_PREFIX_LEN).param("oracle_window", radius.radius());
        if let Some(w) = windowed_scan(&prefix, strict(13, 4), true, radius.radius()) {
            r.violation("circular factor above 13/4 in prefix window", w);
        }
        Ok(())
    })
}

pub fn verify_147() -> ClaimReport {
    verify_ternary_search("147", 147, Some(147), &SearchOptions::default())
}

pub fn verify_147_ci() -> ClaimReport {
    verify_ternary_search("147_ci", CI_SQUARE_BOUND, Some(CI_GOLDEN_LENGTH), &SearchOptions::default())
}

/// Exhaustive ternary circular 13/4-free search forbidding squares shorter
/// than `c`; passes iff it terminates with length `expected`.
pub fn verify_ternary_search(id: &str, c: usize, expected: Option<usize>, opts: &SearchOptions) -> ClaimReport {
    let statement = format!(
        "the longest ternary circularly 13/4-power-free word avoiding squares xx with |xx| < {c} has length {}",
        expected.map_or("finite".to_string(), |e| e.to_string())
    );
    claim(id, &statement, |r| {
        let cfg = SearchConfig::new(3, non_strict(13, 4), true).with_squares_below(c).with_max_length(2000);
        r.param("config", cfg).param("expected_length", expected);
        let report = longest_word_with(&cfg, opts)?;
        r.stat("nodes_visited", report.nodes_visited)
            .stat("longest_length", report.longest_length)
            .stat("exhausted", report.exhausted)
            .stat("search_time_ms", report.wall_time_ms);
        if let Some(v) = search::recheck(&report.witness, &cfg) {
            r.violation("witness fails the independent recheck", v);
        }
        r.extremal("witness", &report.witness);
        if !report.exhausted {
            r.fail("search hit the length cap");
        } else if expected.is_some_and(|e| e != report.longest_length) {
            r.fail("longest length differs from the expected value");
        }
        Ok(())
    })
}

pub fn verify_thue_morse_binary() -> ClaimReport {
    verify_thue_morse_binary_with(&UniformMorphism::thue_morse())
}

pub fn verify_thue_morse_binary_with(tm: &UniformMorphism) -> ClaimReport {
    let statement =
        "Thue-Morse windows avoid circular 4+-powers and attain 4; binary circular 4-power-free words are finite";
    claim("thue_morse_binary", statement, |r| {
        let (prefix_len, window) = (1 << 14, 64);
        r.param("prefix_len", prefix_len).param("window", window);
        let prefix = tm.fixed_point_prefix(0, prefix_len)?;
        if let Some(w) = windowed_scan(&prefix, strict(4, 1), true, window) {
            r.violation("circular factor above 4", w);
        }
        match windowed_scan(&prefix, non_strict(4, 1), true, window) {
            Some(w) if w.exponent == Rational::integer(4) => {
                r.extremal("circular 4-power", w);
            }
            Some(w) => {
                r.violation("circular factor above 4", w);
            }
            None => {
                r.fail("no window attains exponent 4");
            }
        }
        let cfg = SearchConfig::new(2, non_strict(4, 1), true).with_max_length(2000);
        r.param("search", cfg);
        let res = search::longest_word(&cfg)?;
        r.stat("binary_longest_length", res.longest_length).stat("binary_exhausted", res.exhausted);
        r.extremal("longest binary circularly 4-power-free word", &res.witness);
        if !res.exhausted {
            r.fail("binary search hit the length cap");
        }
        Ok(())
    })
}

/// Every word over `k` letters of length at most `max_len` that avoids
/// `r^+`-powers, in lexicographic order.
fn power_free_words(k: u8, r: Rational, max_len: usize) -> Vec<Word> {
    fn go(k: u8, th: &PowerThreshold, max_len: usize, cur: &mut Vec<Symbol>, out: &mut Vec<Word>) {
        for c in 0..k {
            cur.push(c);
            let w = Word::new(cur.clone(), k).expect("symbols below k");
            if is_power_free(&w, th).is_pass() {
                out.push(w);
                if cur.len() < max_len {
                    go(k, th, max_len, cur, out);
                }
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(k, &PowerThreshold::strict(r), max_len, &mut Vec::new(), &mut out);
    out
}

/// `r^+`-power-free words are circularly `(2r)^+`-power-free, checked on all
/// short binary (r = 2) and ternary (r = 7/4) words.
pub fn verify_bound_theorem_desk() -> ClaimReport {
    let statement = "short words with critical exponent at most r have circular critical exponent at most 2r";
    claim("bound_theorem_desk", statement, |r| {
        let sweeps = [(2u8, Rational::integer(2), 12usize), (3, Rational::new(7, 4), 10)];
        for (k, rr, max_len) in sweeps {
            let words = power_free_words(k, rr, max_len);
            let double = Rational::new(2 * rr.numer(), rr.denom());
            let mut top = Rational::integer(1);
            for w in &words {
                let (e, wit) = circular_critical_exponent(w)?;
                top = top.max(e);
                if e > double {
                    r.violation("circular exponent above 2r", serde_json::json!({ "word": w, "witness": wit }));
                }
            }
            r.param(&format!("sweep_k{k}"), serde_json::json!({ "r": rr, "max_len": max_len }));
            r.stat(&format!("sweep_k{k}_words"), words.len()).stat(&format!("sweep_k{k}_max_cexp"), top);
        }
        Ok(())
    })
}

/// For `i = 1..=i_max`, the largest exponent of a product of `i` Thue-Morse
/// factors of total length at most `16 i` is exactly `2i`.
pub fn verify_rti2(i_max: usize) -> ClaimReport {
    verify_rti2_with(&UniformMorphism::thue_morse(), i_max)
}

pub fn verify_rti2_with(tm: &UniformMorphism, i_max: usize) -> ClaimReport {
    claim("rti2", "products of i Thue-Morse factors reach exponent 2i and never exceed it", |r| {
        if i_max < 2 {
            return Err(Error::Precondition(format!("i_max = {i_max} is below 2")));
        }
        let len = 16 * i_max;
        r.param("i_max", i_max).param("max_total_len", "16 i").param("factor_length", len);
        let fs = tm.factor_set(0, len)?;
        let index = FactorIndex::from_members(tm.target_alphabet_size, &fs.members);
        for i in 1..=i_max {
            let best = product_exponent(&index, i, 16 * i)?;
            let want = Rational::integer(2 * i as u64);
            r.stat(&format!("pexp_{i}"), best.exponent);
            if best.exponent > want {
                r.violation(&format!("product of {i} factors above {want}"), &best);
            } else if best.exponent < want {
                r.fail(&format!("no product of {i} factors reaches {want}"));
            } else {
                r.extremal(&format!("product of {i} factors attaining {want}"), &best);
            }
        }
        Ok(())
    })
}

/// Runs one claim by id.
pub fn run_claim(id: &str, opts: &VerifyOptions) -> Result<ClaimReport> {
    let s = &opts.subjects;
    let search_opts = SearchOptions { threads: opts.threads, ..Default::default() };
    Ok(match id {
        "mu_ssm" => verify_ssm(id, &s.mu),
        "psi_ssm" => verify_ssm(id, &s.psi),
        "psi_squarefree" => verify_psi_squarefree_with(&s.psi),
        "psi_circularly_cubefree" => verify_psi_circularly_cubefree_with(&s.psi, 66),
        "main_word" => verify_main_word_with(&s.mu, &s.psi, CheckRadius::new(opts.radius_constant, s.mu.q)),
        "147" => verify_ternary_search(id, 147, Some(147), &search_opts),
        "147_ci" => verify_ternary_search(id, CI_SQUARE_BOUND, Some(CI_GOLDEN_LENGTH), &search_opts),
        "thue_morse_binary" => verify_thue_morse_binary_with(&s.thue_morse),
        "bound_theorem_desk" => verify_bound_theorem_desk(),
        "rti2" => verify_rti2_with(&s.thue_morse, opts.rti_max),
        _ => return Err(Error::Precondition(format!("unknown claim {id:?}; known: {}", CLAIM_IDS.join(", ")))),
    })
}

/// Every claim, in `CLAIM_IDS` order, skipping `LONG_CLAIMS` when asked.
pub fn verify_all(opts: &VerifyOptions) -> Vec<ClaimReport> {
    let ids: Vec<&str> = CLAIM_IDS.iter().copied().filter(|id| !(opts.skip_long && LONG_CLAIMS.contains(id))).collect();
    ids.par_iter().map(|id| run_claim(id, opts).expect("known claim id")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_for_mu() {
        assert_eq!(CheckRadius::new(DEFAULT_RADIUS_CONSTANT, 15).radius(), 330);
    }

    #[test]
    fn morphisms_are_ssm() {
        assert!(verify_ssm("mu_ssm", &UniformMorphism::mu()).passed());
        assert!(verify_ssm("psi_ssm", &UniformMorphism::psi()).passed());
    }

    #[test]
    fn unknown_claim() {
        assert!(run_claim("nope", &VerifyOptions::default()).is_err());
    }
}
