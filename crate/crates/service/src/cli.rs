use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use scholarec_core::analytics::{self, Metric};
use scholarec_core::grammars::{self, DiscoverRequest, GrammarRegistry, NewsRequest, RefereeRequest};
use scholarec_core::ingest::{self, concept_term};
use scholarec_core::ns;
use scholarec_core::quadstore::{nquads, is_absolute_iri, QuadStore, Term};
use scholarec_core::schema::load_vocabulary;
use scholarec_core::timestamp;
use scholarec_core::walker::{Mode, Walker, WalkerConfig};

use crate::api::{self, AppState};

#[derive(Debug, Parser)]
#[command(name = "scholarec", version, about = "Scholarly resource recommender")]
pub struct Cli {
    /// Holds store.nqlog and an optional grammars/ directory.
    #[arg(long, env = "SCHOLAREC_DATA", default_value = "scholarec-data", global = true)]
    pub data_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load OAI-PMH XML (.xml) or N-Quads (.nq) files.
    Ingest {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Provider graph for XML records; for N-Quads, moves every quad into it.
        #[arg(long)]
        graph: Option<String>,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
    /// Run a named grammar, or `referee`, `discover` or `news`, from seeds.
    Recommend {
        grammar: String,
        #[arg(long = "seed", required = true)]
        seeds: Vec<String>,
        #[arg(long, value_enum, default_value = "diffusion")]
        mode: ModeArg,
        #[arg(long)]
        walkers: Option<u32>,
        #[arg(long)]
        rng_seed: Option<u64>,
        #[arg(long)]
        decay: Option<f64>,
        #[arg(long)]
        max_steps: Option<usize>,
        /// Referee coauthor decay.
        #[arg(long)]
        delta: Option<f64>,
        /// Referee coauthor depth.
        #[arg(long)]
        depth: Option<usize>,
        /// Discover return type (repeatable).
        #[arg(long = "type")]
        types: Vec<String>,
        /// News concept, IRI or label; the seed is the user.
        #[arg(long)]
        concept: Option<String>,
        #[arg(long)]
        now: Option<String>,
        #[arg(long)]
        half_life: Option<f64>,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Print a metric report as JSON.
    Stats {
        metric: String,
        iri: String,
        #[arg(long)]
        other: Option<String>,
        #[arg(long)]
        year: Option<i32>,
    },
    /// Write the whole store as canonical N-Quads.
    Export {
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum ModeArg {
    Diffusion,
    Montecarlo,
}

pub fn open_store(data_dir: &Path) -> anyhow::Result<QuadStore> {
    std::fs::create_dir_all(data_dir).with_context(|| format!("creating {}", data_dir.display()))?;
    let path = data_dir.join("store.nqlog");
    QuadStore::open(&path).with_context(|| format!("opening {}", path.display()))
}

pub fn registry(data_dir: &Path) -> anyhow::Result<GrammarRegistry> {
    let dir = data_dir.join("grammars");
    if dir.is_dir() {
        Ok(GrammarRegistry::from_dir(&dir)?)
    } else {
        Ok(GrammarRegistry::builtin())
    }
}

fn ingest_file(store: &mut QuadStore, path: &Path, graph: Option<&Term>) -> anyhow::Result<String> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or_default();
    match ext {
        "xml" => {
            let bytes = std::fs::read(path)?;
            let records = ingest::parse_oaipmh(&bytes)?;
            let default = Term::iri(ns::DEFAULT_GRAPH);
            let report = ingest::ingest_records(store, &records, graph.unwrap_or(&default))?;
            Ok(format!(
                "{} records, {} quads added, {} new resources",
                report.records, report.quads_added, report.new_resources
            ))
        }
        "nq" | "nquads" => {
            let text = std::fs::read_to_string(path)?;
            let added = match graph {
                None => store.load_nquads(&text)?,
                Some(g) => {
                    let moved: Vec<_> = nquads::parse_document(&text)?
                        .into_iter()
                        .map(|mut q| {
                            q.g = g.clone();
                            q
                        })
                        .collect();
                    store.load_nquads(&nquads::write_document(&moved))?
                }
            };
            Ok(format!("{added} quads added"))
        }
        _ => bail!("{}: expected a .xml or .nq file", path.display()),
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<()> {
    let data = cli.data_dir.as_path();
    match cli.command {
        Command::Ingest { files, graph } => {
            let graph = match graph {
                Some(g) if !is_absolute_iri(&g) => bail!("--graph {g:?} is not an absolute IRI"),
                g => g.map(Term::iri),
            };
            let mut store = open_store(data)?;
            for path in files {
                let summary =
                    ingest_file(&mut store, &path, graph.as_ref()).with_context(|| format!("ingesting {}", path.display()))?;
                writeln!(out, "{}: {summary}", path.display())?;
            }
        }
        Command::Serve { port, host } => {
            let addr: SocketAddr = format!("{host}:{port}").parse().context("bad --host/--port")?;
            let state = AppState::new(open_store(data)?, registry(data)?);
            tokio::runtime::Runtime::new()?.block_on(api::serve(state, addr))?;
        }
        Command::Recommend {
            grammar,
            seeds,
            mode,
            walkers,
            rng_seed,
            decay,
            max_steps,
            delta,
            depth,
            types,
            concept,
            now,
            half_life,
            json,
        } => {
            let store = open_store(data)?;
            let vocab = load_vocabulary();
            let walker = Walker::new(&store, &vocab);
            let defaults = WalkerConfig::default();
            let cfg = WalkerConfig {
                mode: match mode {
                    ModeArg::Diffusion => Mode::Diffusion,
                    ModeArg::Montecarlo => Mode::MonteCarlo,
                },
                walkers_per_seed: walkers.unwrap_or(defaults.walkers_per_seed),
                rng_seed: rng_seed.unwrap_or(defaults.rng_seed),
                decay: decay.unwrap_or(defaults.decay),
                max_steps: max_steps.unwrap_or(defaults.max_steps),
                ..defaults
            };
            let list = match grammar.as_str() {
                "referee" => {
                    let [article] = seeds.as_slice() else {
                        bail!("referee takes exactly one --seed (the article)");
                    };
                    let mut req = RefereeRequest::new(article.as_str());
                    req.delta = delta.unwrap_or(req.delta);
                    req.max_depth_coauthor = depth.unwrap_or(req.max_depth_coauthor);
                    grammars::referees(&walker, &req, &cfg)?
                }
                "discover" => {
                    let req = DiscoverRequest {
                        seeds,
                        return_types: types,
                    };
                    grammars::discover(&walker, &req, &cfg)?
                }
                "news" => {
                    let [user] = seeds.as_slice() else {
                        bail!("news takes exactly one --seed (the user)");
                    };
                    let concept = concept.context("news needs --concept")?;
                    let expanded = ns::expand(&concept);
                    let concept = if is_absolute_iri(&expanded) { expanded } else { concept_term(&concept).value().to_string() };
                    let now = match now {
                        Some(t) => timestamp::parse(&t).with_context(|| format!("bad --now {t:?}"))?,
                        None => chrono::Utc::now(),
                    };
                    let req = NewsRequest {
                        user: user.clone(),
                        concept,
                        now,
                        half_life_secs: half_life.unwrap_or(grammars::DEFAULT_HALF_LIFE_SECS),
                    };
                    grammars::news(&walker, &req, &cfg)?
                }
                name => {
                    let g = registry(data)?.load(name)?;
                    let seeds: Vec<Term> = seeds.iter().map(|s| Term::iri(s.as_str())).collect();
                    walker.execute(&g, &seeds, &cfg)?
                }
            };
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&list)?)?;
            } else {
                write!(out, "{}", list.to_table())?;
            }
        }
        Command::Stats {
            metric,
            iri,
            other,
            year,
        } => {
            let metric: Metric = metric.parse().map_err(anyhow::Error::msg)?;
            let store = open_store(data)?;
            let resource = Term::iri(iri.as_str());
            if !store.mentions(&resource) {
                bail!("unknown resource {iri}");
            }
            let other = other.map(Term::iri);
            let report = analytics::report(&store, metric, &resource, other.as_ref(), year).map_err(anyhow::Error::msg)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
        }
        Command::Export { out: path } => {
            let store = open_store(data)?;
            let text = store.export_nquads();
            match path {
                Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => out.write_all(text.as_bytes())?,
            }
        }
    }
    Ok(())
}
