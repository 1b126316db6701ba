//! Depth-first search with a shallow split for parallelism.
//!
//! The tree is cut at a fixed depth. Subtrees are handed out in
//! lexicographic order and merged in that same order, so the result does not
//! depend on the number of threads.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{IncrementalChecker, SearchConfig, SearchResult};
use crate::error::{Error, Result};
use crate::words::{Symbol, Word};

pub const DEFAULT_SPLIT_DEPTH: usize = 6;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "CIRCREP_THREADS";

const CANCEL_POLL_MASK: u64 = 0xfff;

/// Snapshot handed to the progress callback after each merged subtree.
#[derive(Clone, Debug)]
pub struct Progress {
    pub subtrees_done: usize,
    pub subtrees_total: usize,
    pub nodes_visited: u64,
    pub best_length: usize,
    pub elapsed: Duration,
}

/// Resumable state: everything before `next_prefix` has been merged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    /// `None` once the search has finished.
    pub next_prefix: Option<Vec<Symbol>>,
    pub nodes_visited: u64,
    pub best_length: usize,
    pub best_witness: Option<Vec<Symbol>>,
}

fn render(s: &[Symbol]) -> String {
    s.iter().map(|&c| char::from_digit(c as u32, 36).expect("symbol below 36")).collect()
}

fn unrender(s: &str) -> Result<Vec<Symbol>> {
    s.chars()
        .map(|c| {
            c.to_digit(36).map(|d| d as Symbol).ok_or_else(|| Error::InvalidCheckpoint(format!("bad symbol {c:?}")))
        })
        .collect()
}

impl fmt::Display for Checkpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = self.next_prefix.as_deref().map_or_else(|| "done".to_string(), render);
        let witness = self.best_witness.as_deref().map_or_else(|| "-".to_string(), render);
        write!(f, "{} {} {} {}", prefix, self.nodes_visited, self.best_length, witness)
    }
}

impl FromStr for Checkpoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidCheckpoint(format!("{why}: {:?}", s.trim()));
        let fields: Vec<&str> = s.split_whitespace().collect();
        let [prefix, nodes, best, witness] = fields[..] else {
            return Err(bad("expected 4 fields"));
        };
        let next_prefix = if prefix == "done" { None } else { Some(unrender(prefix)?) };
        let best_witness = if witness == "-" { None } else { Some(unrender(witness)?) };
        let best_length: usize = best.parse().map_err(|_| bad("bad best length"))?;
        if best_witness.as_ref().map_or(0, Vec::len) != best_length {
            return Err(bad("witness length disagrees with best length"));
        }
        Ok(Checkpoint {
            next_prefix,
            nodes_visited: nodes.parse().map_err(|_| bad("bad node count"))?,
            best_length,
            best_witness,
        })
    }
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::InvalidCheckpoint(format!("{}: {e}", path.display())))?;
        text.parse()
    }

    /// Writes through a temporary file so a crash never leaves half a line.
    pub fn store(&self, path: &Path) -> std::io::Result<()> {
        let tmp = path.with_extension("tmp");
        let mut f = fs::File::create(&tmp)?;
        writeln!(f, "{self}")?;
        f.sync_all()?;
        fs::rename(tmp, path)
    }
}

pub struct SearchOptions<'a> {
    /// Worker threads; falls back to `THREADS_ENV`, then to the core count.
    pub threads: Option<usize>,
    pub split_depth: usize,
    pub checkpoint_path: Option<PathBuf>,
    pub checkpoint_interval: Duration,
    pub resume: Option<Checkpoint>,
    pub progress: Option<&'a (dyn Fn(&Progress) + Sync)>,
}

impl Default for SearchOptions<'_> {
    fn default() -> Self {
        SearchOptions {
            threads: None,
            split_depth: DEFAULT_SPLIT_DEPTH,
            checkpoint_path: None,
            checkpoint_interval: Duration::from_secs(10),
            resume: None,
            progress: None,
        }
    }
}

impl SearchOptions<'_> {
    pub fn thread_count(&self) -> usize {
        self.threads
            .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()))
            .filter(|&n| n > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

/// The JSON report of a finished search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub config: SearchConfig,
    pub longest_length: usize,
    pub witness: Word,
    pub exhausted: bool,
    pub nodes_visited: u64,
    pub wall_time_ms: u64,
}

impl SearchReport {
    pub fn result(&self) -> SearchResult {
        SearchResult {
            longest_length: self.longest_length,
            witness: self.witness.clone(),
            exhausted: self.exhausted,
            nodes_visited: self.nodes_visited,
        }
    }
}

/// Exhaustive search with default options.
pub fn longest_word(cfg: &SearchConfig) -> Result<SearchResult> {
    longest_word_with(cfg, &SearchOptions::default()).map(|r| r.result())
}

struct Dfs<'a> {
    checker: IncrementalChecker,
    k: u8,
    symmetry: bool,
    cap: usize,
    depth_limit: usize,
    nodes: u64,
    best: Vec<Symbol>,
    hit_cap: bool,
    aborted: bool,
    /// Words of length `depth_limit`, collected instead of explored.
    frontier: Option<Vec<Vec<Symbol>>>,
    cancel: Option<(&'a AtomicUsize, usize)>,
}

impl Dfs<'_> {
    fn alphabet_limit(&self, max_used: i16) -> u8 {
        if self.symmetry {
            (max_used + 2).min(self.k as i16) as u8
        } else {
            self.k
        }
    }

    /// Returns true when the whole search must stop.
    fn run(&mut self, max_used: i16) -> bool {
        for c in 0..self.alphabet_limit(max_used) {
            self.checker.push(c);
            if !self.checker.violates_last() {
                self.nodes += 1;
                let len = self.checker.len();
                if len > self.best.len() {
                    self.best = self.checker.word().to_vec();
                }
                if len >= self.cap {
                    self.hit_cap = true;
                    self.checker.pop();
                    return true;
                }
                if self.nodes & CANCEL_POLL_MASK == 0 {
                    if let Some((flag, me)) = self.cancel {
                        if flag.load(Ordering::Relaxed) < me {
                            self.aborted = true;
                            self.checker.pop();
                            return true;
                        }
                    }
                }
                let stop = if len == self.depth_limit {
                    if let Some(f) = self.frontier.as_mut() {
                        f.push(self.checker.word().to_vec());
                    }
                    false
                } else {
                    self.run(max_used.max(c as i16))
                };
                if stop {
                    self.checker.pop();
                    return true;
                }
            }
            self.checker.pop();
        }
        false
    }
}

fn max_used(prefix: &[Symbol]) -> i16 {
    prefix.iter().map(|&c| c as i16).max().unwrap_or(-1)
}

struct SubResult {
    nodes: u64,
    best: Vec<Symbol>,
    hit_cap: bool,
}

fn explore_subtree(cfg: &SearchConfig, prefix: &[Symbol], cancel: &AtomicUsize, index: usize) -> Option<SubResult> {
    let mut checker = cfg.checker();
    for &c in prefix {
        checker.push(c);
    }
    let mut dfs = Dfs {
        checker,
        k: cfg.k,
        symmetry: cfg.symmetry_reduction,
        cap: cfg.max_length,
        depth_limit: usize::MAX,
        nodes: 0,
        best: prefix.to_vec(),
        hit_cap: false,
        aborted: false,
        frontier: None,
        cancel: Some((cancel, index)),
    };
    dfs.run(max_used(prefix));
    if dfs.aborted {
        return None;
    }
    Some(SubResult { nodes: dfs.nodes, best: dfs.best, hit_cap: dfs.hit_cap })
}

/// Merged state of the shallow phase and every subtree before `next`.
struct Merged {
    next: usize,
    nodes: u64,
    best: Vec<Symbol>,
    hit_cap: bool,
}

impl Merged {
    fn absorb(&mut self, r: &SubResult) {
        self.nodes += r.nodes;
        if r.best.len() > self.best.len() {
            self.best = r.best.clone();
        }
        self.hit_cap |= r.hit_cap;
        self.next += 1;
    }

    fn checkpoint(&self, frontier: &[Vec<Symbol>]) -> Checkpoint {
        let done = self.hit_cap || self.next >= frontier.len();
        Checkpoint {
            next_prefix: if done { None } else { Some(frontier[self.next].clone()) },
            nodes_visited: self.nodes,
            best_length: self.best.len(),
            best_witness: if self.best.is_empty() { None } else { Some(self.best.clone()) },
        }
    }
}

/// Exhaustive search with progress reporting and checkpointing.
pub fn longest_word_with(cfg: &SearchConfig, opts: &SearchOptions) -> Result<SearchReport> {
    cfg.validate()?;
    let started = Instant::now();
    let split = opts.split_depth.clamp(1, cfg.max_length);

    let mut shallow = Dfs {
        checker: cfg.checker(),
        k: cfg.k,
        symmetry: cfg.symmetry_reduction,
        cap: cfg.max_length,
        depth_limit: split,
        nodes: 0,
        best: Vec::new(),
        hit_cap: false,
        aborted: false,
        frontier: Some(Vec::new()),
        cancel: None,
    };
    shallow.run(-1);
    let frontier = if shallow.hit_cap { Vec::new() } else { shallow.frontier.take().unwrap_or_default() };

    let mut merged = Merged { next: 0, nodes: shallow.nodes, best: shallow.best.clone(), hit_cap: shallow.hit_cap };
    if let Some(cp) = &opts.resume {
        merged.nodes = cp.nodes_visited;
        merged.best = cp.best_witness.clone().unwrap_or_default();
        merged.next = match &cp.next_prefix {
            None => frontier.len(),
            Some(p) => frontier
                .iter()
                .position(|f| f == p)
                .ok_or_else(|| Error::InvalidCheckpoint(format!("prefix {} is not a frontier word", render(p))))?,
        };
        if cp.next_prefix.is_none() && cp.best_length >= cfg.max_length {
            merged.hit_cap = true;
        }
    }

    if !merged.hit_cap && merged.next < frontier.len() {
        run_parallel(cfg, opts, &frontier, &mut merged, started)?;
    }

    if let Some(path) = &opts.checkpoint_path {
        merged.checkpoint(&frontier).store(path)?;
    }
    let exhausted = !merged.hit_cap;
    Ok(SearchReport {
        config: *cfg,
        longest_length: merged.best.len(),
        witness: Word::new(merged.best, cfg.k)?,
        exhausted,
        nodes_visited: merged.nodes,
        wall_time_ms: started.elapsed().as_millis() as u64,
    })
}

fn run_parallel(
    cfg: &SearchConfig,
    opts: &SearchOptions,
    frontier: &[Vec<Symbol>],
    merged: &mut Merged,
    started: Instant,
) -> Result<()> {
    let threads = opts.thread_count().min(frontier.len() - merged.next).max(1);
    let next_task = AtomicUsize::new(merged.next);
    // Lowest subtree index known to reach the cap; later subtrees may stop.
    let cap_index = AtomicUsize::new(usize::MAX);
    let mut slots: Vec<Option<SubResult>> = (0..frontier.len()).map(|_| None).collect();
    let mut last_store = Instant::now();
    let mut io_error = None;

    std::thread::scope(|scope| {
        let (tx, rx) = mpsc::channel::<(usize, Option<SubResult>)>();
        for _ in 0..threads {
            let tx = tx.clone();
            let (next_task, cap_index) = (&next_task, &cap_index);
            scope.spawn(move || loop {
                let i = next_task.fetch_add(1, Ordering::Relaxed);
                if i >= frontier.len() || i > cap_index.load(Ordering::Relaxed) {
                    break;
                }
                let r = explore_subtree(cfg, &frontier[i], cap_index, i);
                if r.as_ref().is_some_and(|r| r.hit_cap) {
                    cap_index.fetch_min(i, Ordering::Relaxed);
                }
                if tx.send((i, r)).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        for (i, r) in rx {
            // Aborted subtrees come after a cap hit and are never merged.
            let Some(r) = r else { continue };
            slots[i] = Some(r);
            let before = merged.next;
            while merged.next < frontier.len() && !merged.hit_cap {
                let Some(r) = slots[merged.next].take() else { break };
                merged.absorb(&r);
            }
            if merged.next == before {
                continue;
            }
            if let Some(cb) = opts.progress {
                cb(&Progress {
                    subtrees_done: merged.next,
                    subtrees_total: frontier.len(),
                    nodes_visited: merged.nodes,
                    best_length: merged.best.len(),
                    elapsed: started.elapsed(),
                });
            }
            if let Some(path) = &opts.checkpoint_path {
                if last_store.elapsed() >= opts.checkpoint_interval {
                    if let Err(e) = merged.checkpoint(frontier).store(path) {
                        io_error.get_or_insert(e);
                    }
                    last_store = Instant::now();
                }
            }
            if merged.hit_cap {
                cap_index.fetch_min(merged.next, Ordering::Relaxed);
            }
        }
    });
    match io_error {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{PowerThreshold, Rational};

    fn cfg(k: u8, num: u64, den: u64, circular: bool) -> SearchConfig {
        SearchConfig::new(k, PowerThreshold::non_strict(Rational::new(num, den)), circular)
    }

    #[test]
    fn binary_squarefree_is_010() {
        let r = longest_word(&cfg(2, 2, 1, false)).unwrap();
        assert_eq!(r.longest_length, 3);
        assert_eq!(r.witness.to_string(), "010");
        assert!(r.exhausted);
    }

    #[test]
    fn cap_stops_search() {
        let c = cfg(3, 2, 1, false).with_max_length(30);
        let r = longest_word(&c).unwrap();
        assert_eq!(r.longest_length, 30);
        assert!(!r.exhausted);
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let c = cfg(3, 7, 4, false).with_max_length(200);
        let one = longest_word_with(&c, &SearchOptions { threads: Some(1), ..Default::default() }).unwrap();
        let many =
            longest_word_with(&c, &SearchOptions { threads: Some(4), split_depth: 3, ..Default::default() }).unwrap();
        assert_eq!(one.result(), many.result());
    }

    #[test]
    fn checkpoint_round_trip() {
        let cp = Checkpoint {
            next_prefix: Some(vec![0, 1, 2]),
            nodes_visited: 77,
            best_length: 4,
            best_witness: Some(vec![0, 1, 0, 2]),
        };
        assert_eq!(cp.to_string(), "012 77 4 0102");
        assert_eq!(cp.to_string().parse::<Checkpoint>().unwrap(), cp);
        assert!("012 77 3 0102".parse::<Checkpoint>().is_err());
        assert!("done 1 0 -".parse::<Checkpoint>().is_ok());
    }
}
