use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use factorgen_core::scoring::{chance_table, simulate_random, Subtest};
use factorgen_core::{Difficulty, SeededRng};
use factorgen_harness::config::{Config, EndpointConfig, TransportTarget};
use factorgen_harness::corpus::{build_corpus, validate};
use factorgen_harness::manifest::{Manifest, Plan};
use factorgen_harness::report::{score, Reduction, Results};
use factorgen_harness::runner::run_suite;
use factorgen_harness::serve::{plan_assignments, serve, AssignmentPlan, Study};
use factorgen_harness::transcript::Transcript;
use factorgen_harness::transport::{connect, ReplayTransport};

#[derive(Parser)]
#[command(name = "factorgen", version, about = "Generate, run and score visual-spatial test corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Responder {
    Random,
    Gold,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a corpus directory: images plus manifest.json.
    Gen {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "normal")]
        difficulty: Difficulty,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict to these subtests (comma separated codes).
        #[arg(long, value_delimiter = ',')]
        only: Vec<Subtest>,
        /// Cap every subtest at this many items.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Re-check every gold label and image of a corpus.
    Validate {
        #[arg(long)]
        corpus: PathBuf,
        /// Skip re-rendering images.
        #[arg(long)]
        no_images: bool,
    },
    /// Print the chance table, optionally checked by simulation.
    Chance {
        /// Simulated random-responder groups per subtest.
        #[arg(long)]
        simulate: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Ask every query of a corpus and write a transcript.
    Run {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, requires = "endpoint")]
        config: Option<PathBuf>,
        #[arg(long)]
        endpoint: Option<String>,
        /// Canned responses (JSON lines of {query_id, responses}).
        #[arg(long, conflicts_with_all = ["config", "responder"])]
        replay: Option<PathBuf>,
        #[arg(long, value_enum, conflicts_with = "config")]
        responder: Option<Responder>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        concurrency: Option<usize>,
    },
    /// Score transcripts; with several, a best-of row is added.
    #[command(alias = "score")]
    Report {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(required = true)]
        transcripts: Vec<PathBuf>,
        #[arg(long, default_value = "majority")]
        reduction: Reduction,
        /// Score even if some queries are unanswered.
        #[arg(long)]
        partial: bool,
        /// Also write machine-readable results here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assign queries to study participants.
    Plan {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        participants: usize,
        #[arg(long, default_value_t = 3)]
        per_query: usize,
        /// Fixed seed for reproducible tokens; drawn from the OS otherwise.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve a human study over HTTP.
    Serve {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        log: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Gen { out, difficulty, seed, only, limit } => {
            let mut plan = Plan::reference(difficulty);
            if !only.is_empty() {
                plan.counts.retain(|s, _| only.contains(s));
                if let Some(s) = only.iter().find(|s| !s.is_generated()) {
                    bail!("{s} is not a generated subtest");
                }
            }
            if let Some(n) = limit {
                plan = plan.capped(n);
            }
            let started = Instant::now();
            let m = build_corpus(&plan, seed, &out)?;
            for (s, (items, queries)) in m.counts() {
                println!("{:<4} {items:>4} items {queries:>5} queries", s.code());
            }
            println!("wrote {} in {:.1}s, digest {}", out.display(), started.elapsed().as_secs_f64(), m.digest());
        }
        Command::Validate { corpus, no_images } => {
            let m = Manifest::read(&corpus)?;
            let report = validate(&m, (!no_images).then_some(corpus.as_path()));
            for line in &report.mismatches {
                println!("{line}");
            }
            println!(
                "{} items, {} queries, {} images checked, {} mismatches",
                report.items,
                report.queries,
                report.images_checked,
                report.mismatches.len()
            );
            if !report.ok() {
                std::process::exit(1);
            }
        }
        Command::Chance { simulate, seed } => {
            let (rows, mean) = chance_table();
            let mut rng = SeededRng::new(seed);
            for r in rows {
                print!("{:<4} {:<22} {:>9.6}", r.subtest.code(), r.format, r.chance);
                if let Some(n) = simulate {
                    let sim = simulate_random(&r.subtest.group_format(), n, &mut rng)?;
                    let verdict = if sim.within(3.0) { "ok" } else { "OUTSIDE 3 sigma" };
                    print!("  simulated {:>9.6} {verdict}", 100.0 * sim.rate());
                }
                println!();
            }
            println!("mean {mean:.6}");
        }
        Command::Run { corpus, out, config, endpoint, replay, responder, seed, concurrency } => {
            let m = Manifest::read(&corpus)?;
            let mut ep = match (config, endpoint, replay, responder) {
                (Some(path), Some(name), _, _) => Config::read(&path)?.endpoint(&name)?.clone(),
                (None, None, Some(path), None) => EndpointConfig::new("replay", TransportTarget::Replay { path }),
                (None, None, None, Some(Responder::Random)) => EndpointConfig::new("random", TransportTarget::Random { seed }),
                (None, None, None, Some(Responder::Gold)) => EndpointConfig::new("gold", TransportTarget::Gold),
                _ => bail!("give --config with --endpoint, --replay, or --responder"),
            };
            if let Some(c) = concurrency {
                ep.concurrency = c;
            }
            let transport = match &ep.transport {
                TransportTarget::Replay { path } if path.extension().is_some_and(|e| e == "transcript") => {
                    Box::new(ReplayTransport::from_transcript(&Transcript::read(path)?))
                }
                _ => connect(&ep, &m)?,
            };
            let t = run_suite(&m, &corpus, &ep, transport.as_ref(), &out)?;
            let failed = t.rows.iter().filter(|r| r.failure.is_some()).count();
            println!("{} rows written to {}, {failed} without a usable answer", t.rows.len(), out.display());
        }
        Command::Report { corpus, transcripts, reduction, partial, out } => {
            let m = Manifest::read(&corpus)?;
            let mut named = Vec::new();
            for path in &transcripts {
                let t = Transcript::read(path)?;
                let table = score(&m, &t, reduction, partial).with_context(|| format!("scoring {}", path.display()))?;
                named.push((t.header.source.clone(), table));
            }
            let results = Results::new(&named);
            print!("{}", results.render());
            if let Some(path) = out {
                std::fs::write(&path, results.to_text()).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Plan { corpus, participants, per_query, seed, out } => {
            let m = Manifest::read(&corpus)?;
            let mut rng = SeededRng::new(seed.unwrap_or_else(rand::random));
            let plan = plan_assignments(&m, participants, per_query, &mut rng)?;
            plan.write(&out)?;
            for p in &plan.participants {
                println!("{} {} queries", p.token, p.queries.len());
            }
        }
        Command::Serve { corpus, plan, log, addr } => {
            let m = Manifest::read(&corpus)?;
            let study = Study::open(m, corpus, AssignmentPlan::read(&plan)?, log)?;
            let rt = tokio::runtime::Runtime::new()?;
            println!("serving on http://{addr}");
            rt.block_on(serve(study, addr))?;
        }
    }
    Ok(())
}
