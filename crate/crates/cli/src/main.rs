use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use circrep::morphisms::StrongSyncCounterexample;
use circrep::products::product_exponent_of_word;
use circrep::search::{longest_word_with, Checkpoint, Progress, SearchConfig, SearchOptions, THREADS_ENV};
use circrep::verify::{run_claim, verify_all, VerifyOptions, CLAIM_IDS, DEFAULT_RADIUS_CONSTANT};
use circrep::words::{
    circular_critical_exponent, exponent, is_circularly_power_free, is_power_free, parse_word, shortest_period,
    Lettering,
};
use circrep::{PowerThreshold, Rational, UniformMorphism, Verdict, Word};

mod output;

use output::Envelope;

#[derive(Parser)]
#[command(name = "circrep", version, about = "Repetition exponents, circular repetitions and extremal word search")]
struct Cli {
    /// Print JSON objects instead of text lines.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exponent |w| / shortest period.
    Exp(WordInput),
    /// Circular critical exponent, with a witness.
    Cexp(WordInput),
    /// Test (circular) power-freeness against a threshold.
    Check {
        #[command(flatten)]
        words: WordInput,
        #[arg(long, value_name = "P/Q", value_parser = parse_rational)]
        alpha: Rational,
        /// Forbid only exponents strictly above alpha.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        circular: bool,
    },
    /// Uniform morphisms, built in (mu, psi, thue-morse) or read from a file.
    #[command(subcommand)]
    Morphism(MorphismCommand),
    /// Exact set of factors of a given length of a fixed point.
    Factors {
        /// Morphism name or file.
        name: String,
        len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u8,
        /// Factors of g(h^ω(seed)) instead of h^ω(seed).
        #[arg(long, value_name = "NAME|FILE")]
        image_under: Option<String>,
    },
    /// Longest word avoiding a threshold, by exhaustive search.
    Search(SearchArgs),
    /// Largest exponent of a product of i factors of a word.
    Pexp {
        #[command(flatten)]
        words: WordInput,
        #[arg(long)]
        i: usize,
        #[arg(long, value_name = "N")]
        max_len: usize,
    },
    /// Re-run claims and report each as JSON.
    Verify {
        /// Claim id, or "all".
        #[arg(default_value = "all")]
        claim: String,
        /// Leave out the multi-hour searches.
        #[arg(long)]
        skip_long: bool,
        #[arg(long, default_value_t = DEFAULT_RADIUS_CONSTANT)]
        radius_constant: usize,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Subcommand)]
enum MorphismCommand {
    /// Synchronization properties.
    Check { name: String },
    /// Image of each input word.
    Apply {
        name: String,
        #[command(flatten)]
        words: WordInput,
    },
    /// Prefix of the fixed point starting with the seed.
    Fixpoint {
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u8,
        #[arg(long, default_value_t = 100)]
        len: usize,
    },
}

/// Words from arguments, a file, or standard input ("-"), one per line.
#[derive(Args)]
struct WordInput {
    words: Vec<String>,
    #[arg(long, value_name = "FILE")]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    k: u8,
    #[arg(long, value_name = "P/Q", value_parser = parse_rational)]
    alpha: Rational,
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    circular: bool,
    /// Also forbid squares xx with |xx| < C.
    #[arg(long, value_name = "C", default_value_t = 0)]
    avoid_squares: usize,
    #[arg(long, value_name = "N", default_value_t = 1000)]
    max_len: usize,
    /// Explore every word instead of one per letter renaming.
    #[arg(long)]
    no_symmetry: bool,
    /// Continue from a checkpoint file; it keeps being updated unless --checkpoint says otherwise.
    #[arg(long, value_name = "FILE")]
    resume: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    checkpoint: Option<PathBuf>,
    /// Seconds between checkpoint writes.
    #[arg(long, default_value_t = 10)]
    checkpoint_every: u64,
    #[arg(long, default_value_t = circrep::search::DEFAULT_SPLIT_DEPTH)]
    split_depth: usize,
    #[arg(long)]
    threads: Option<usize>,
    /// Node counts on stderr as subtrees finish.
    #[arg(long)]
    progress: bool,
    /// Also write the search report to FILE.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse().map_err(|e: circrep::Error| e.to_string())
}

impl WordInput {
    fn read(&self) -> anyhow::Result<Vec<String>> {
        let mut out = Vec::new();
        let mut push_lines = |text: &str| {
            out.extend(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from));
        };
        for w in &self.words {
            if w == "-" {
                let mut text = String::new();
                for line in io::stdin().lock().lines() {
                    text.push_str(&line.context("reading standard input")?);
                    text.push('\n');
                }
                push_lines(&text);
            } else {
                push_lines(w);
            }
        }
        if let Some(path) = &self.file {
            push_lines(&std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?);
        }
        if out.is_empty() {
            bail!("no input words; give WORD, --file FILE or - for standard input");
        }
        Ok(out)
    }

    fn parsed(&self) -> anyhow::Result<Vec<(String, Word, Lettering)>> {
        self.read()?
            .into_iter()
            .map(|text| {
                let (w, l) = parse_word(&text)?;
                Ok((text, w, l))
            })
            .collect()
    }
}

fn init_pool(threads: Option<usize>) {
    let n = threads.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()));
    if let Some(n) = n.filter(|&n| n > 0) {
        // Only fails if a pool already exists, which is fine.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run(cli: &Cli) -> anyhow::Result<Vec<Envelope>> {
    Ok(match &cli.command {
        Command::Exp(input) => input
            .parsed()?
            .into_iter()
            .map(|(text, w, _)| {
                let (e, p) = (exponent(&w)?, shortest_period(&w)?);
                Ok(Envelope::new("exp")
                    .input("word", text)
                    .result(json!({"exponent": e, "period": p, "length": w.len()})))
            })
            .collect::<anyhow::Result<_>>()?,
        Command::Cexp(input) => input
            .parsed()?
            .into_iter()
            .map(|(text, w, lettering)| {
                let (e, wit) = circular_critical_exponent(&w)?;
                Ok(Envelope::new("cexp").input("word", text).result(json!({"exponent": e})).witness(
                    "witness",
                    lettering.render(&wit.repetition),
                    &wit,
                ))
            })
            .collect::<anyhow::Result<_>>()?,
        Command::Check { words, alpha, strict, circular } => {
            let th = PowerThreshold::new(*alpha, *strict)?;
            words
                .parsed()?
                .into_iter()
                .map(|(text, w, lettering)| {
                    let verdict = if *circular { is_circularly_power_free(&w, &th) } else { is_power_free(&w, &th) };
                    let mut env = Envelope::new("check")
                        .input("word", text)
                        .input("alpha", alpha)
                        .input("strict", strict)
                        .input("circular", circular);
                    env = env.result(json!({"verdict": if verdict.is_pass() { "pass" } else { "fail" }, "threshold": th.to_string()}));
                    if let Verdict::Fail(wit) = verdict {
                        env = env.witness("witness", lettering.render(&wit.repetition), &wit);
                    }
                    env
                })
                .collect()
        }
        Command::Morphism(m) => morphism(m)?,
        Command::Factors { name, len, seed, image_under } => {
            let h = UniformMorphism::load(name)?;
            let set = match image_under {
                Some(g) => h.image_factor_set(&UniformMorphism::load(g)?, *seed, *len)?,
                None => h.factor_set(*seed, *len)?,
            };
            let members: Vec<String> = set.members.iter().map(Word::to_string).collect();
            vec![Envelope::new("factors")
                .input("morphism", &h.name)
                .input("length", len)
                .input("seed", seed)
                .input("image_under", image_under)
                .result(json!({"length": set.length, "count": members.len(), "members": members, "provenance": set.provenance}))]
        }
        Command::Search(args) => vec![search(args)?],
        Command::Pexp { words, i, max_len } => words
            .parsed()?
            .into_iter()
            .map(|(text, w, lettering)| {
                let best = product_exponent_of_word(&w, *i, *max_len)?;
                let factors: Vec<String> = best.factors.iter().map(|f| lettering.render(f)).collect();
                Ok(Envelope::new("pexp")
                    .input("word", text)
                    .input("i", i)
                    .input("max_len", max_len)
                    .result(json!({"exponent": best.exponent, "period": best.period, "length": best.length}))
                    .witness("factors", factors.join("+"), &best))
            })
            .collect::<anyhow::Result<_>>()?,
        Command::Verify { claim, skip_long, radius_constant, threads } => {
            let opts = VerifyOptions {
                skip_long: *skip_long,
                radius_constant: *radius_constant,
                threads: *threads,
                ..Default::default()
            };
            let reports = if claim == "all" {
                verify_all(&opts)
            } else {
                if !CLAIM_IDS.contains(&claim.as_str()) {
                    bail!("unknown claim {claim:?}; known: all, {}", CLAIM_IDS.join(", "));
                }
                vec![run_claim(claim, &opts)?]
            };
            for r in &reports {
                let ms = r.stats.get("wall_time_ms").map(|v| v.to_string()).unwrap_or_default();
                eprintln!("{} {} ({} ms)", if r.passed() { "PASS" } else { "FAIL" }, r.claim_id, ms);
            }
            vec![Envelope::new("verify")
                .input("claim", claim)
                .input("skip_long", skip_long)
                .input("radius_constant", radius_constant)
                .result(&reports)
                .stat("claims_run", reports.len())
                .stat("claims_failed", reports.iter().filter(|r| !r.passed()).count())]
        }
    })
}

fn morphism(cmd: &MorphismCommand) -> anyhow::Result<Vec<Envelope>> {
    Ok(match cmd {
        MorphismCommand::Check { name } => {
            let h = UniformMorphism::load(name)?;
            let sync = h.sync_counterexample();
            let strong = h.strong_sync_counterexample();
            let mut env = Envelope::new("morphism check").input("morphism", name).result(json!({
                "verdict": if strong.is_none() { "pass" } else { "fail" },
                "synchronizing": sync.is_none(),
                "strongly_synchronizing": strong.is_none(),
                "k_source": h.source_alphabet_size,
                "k_target": h.target_alphabet_size,
                "q": h.q,
            }));
            if let Some(cx) = strong {
                let text = match cx {
                    StrongSyncCounterexample::NotSynchronizing(s) => {
                        format!("h({}{})={}+h({})+{}", s.a, s.b, s.r_len, s.c, s.s_len)
                    }
                    StrongSyncCounterexample::Straddle { a, b, c, split } => {
                        format!("h({c})=prefix{split}(h({a}))+suffix(h({b}))")
                    }
                };
                env = env.witness("counterexample", text, cx);
            }
            vec![env]
        }
        MorphismCommand::Apply { name, words } => {
            let h = UniformMorphism::load(name)?;
            words
                .parsed()?
                .into_iter()
                .map(|(text, w, _)| {
                    let image = Word::new(h.apply_symbols(w.symbols())?, h.target_alphabet_size)?;
                    Ok(Envelope::new("morphism apply")
                        .input("morphism", name)
                        .input("word", text)
                        .result(json!({"image": image})))
                })
                .collect::<anyhow::Result<_>>()?
        }
        MorphismCommand::Fixpoint { name, seed, len } => {
            let h = UniformMorphism::load(name)?;
            let prefix = h.fixed_point_prefix(*seed, *len)?;
            vec![Envelope::new("morphism fixpoint")
                .input("morphism", name)
                .input("seed", seed)
                .input("len", len)
                .result(json!({"prefix": prefix}))]
        }
    })
}

fn search(args: &SearchArgs) -> anyhow::Result<Envelope> {
    let th = PowerThreshold::new(args.alpha, args.strict)?;
    let cfg = SearchConfig::new(args.k, th, args.circular)
        .with_squares_below(args.avoid_squares)
        .with_max_length(args.max_len)
        .with_symmetry_reduction(!args.no_symmetry);
    let resume = args.resume.as_deref().map(Checkpoint::load).transpose()?;
    let print_progress = |p: &Progress| {
        eprintln!(
            "{}/{} subtrees, {} nodes, best {}, {:.1}s",
            p.subtrees_done,
            p.subtrees_total,
            p.nodes_visited,
            p.best_length,
            p.elapsed.as_secs_f64()
        );
    };
    let opts = SearchOptions {
        threads: args.threads,
        split_depth: args.split_depth,
        checkpoint_path: args.checkpoint.clone().or_else(|| args.resume.clone()),
        checkpoint_interval: std::time::Duration::from_secs(args.checkpoint_every),
        resume,
        progress: if args.progress { Some(&print_progress) } else { None },
    };
    let report = longest_word_with(&cfg, &opts)?;
    if let Some(path) = &args.report {
        std::fs::write(path, serde_json::to_string_pretty(&report)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(Envelope::new("search")
        .input("config", cfg)
        .input("resume", &args.resume)
        .witness("witness", report.witness.to_string(), &report.witness)
        .stat("wall_time_ms", report.wall_time_ms)
        .stat("threads", opts.thread_count())
        .result(&report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_pool(match &cli.command {
        Command::Verify { threads, .. } => *threads,
        _ => None,
    });
    match run(&cli) {
        Ok(envs) => {
            let mut out = io::stdout().lock();
            let mut failed = false;
            for env in &envs {
                failed |= env.failed();
                let line =
                    if cli.json { serde_json::to_string(env).expect("envelope serializes") } else { env.render() };
                if writeln!(out, "{line}").is_err() {
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(failed as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
