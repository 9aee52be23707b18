use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use wcutset::bench::{self, BenchConfig, Network, OutputFormat, Table};
use wcutset::cutset::{certify, find_wcutset, gwc, Algorithm, CostModel};
use wcutset::decomposition::{check_decomposition, min_fill_decomposition};
use wcutset::format::{parse_graph, parse_smc, parse_uai, write_decomposition, write_graph, write_smc, write_uai};
use wcutset::generate::{gen_layered, graph_of_decomposition, LayeredNetSpec, ParentPool};
use wcutset::sequence::{cutset_sequence, f_profile, recommend_w};
use wcutset::smc::{smc_to_augmented_td, td_to_smc, verify_cover};
use wcutset::{Error, Execution, Graph};

#[derive(Parser)]
#[command(name = "wcutset", version, about = "Find small w-cutsets of graphical models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the min-fill tree decomposition of a graph
    Decompose { graph: PathBuf },
    /// Find a w-cutset
    Cutset {
        graph: PathBuf,
        #[arg(long)]
        w: usize,
        #[arg(long, default_value = "gwca")]
        alg: Algorithm,
        #[arg(long, default_value = "unit")]
        cost: CostModel,
    },
    /// Cutsets for every w up to the min-fill width, with the f-profile
    Sequence {
        graph: PathBuf,
        #[arg(long, default_value = "gwca")]
        alg: Algorithm,
        #[arg(long, default_value = "unit")]
        cost: CostModel,
        #[arg(long)]
        space_bound: Option<usize>,
    },
    /// Convert between decompositions and set multi-cover instances
    Reduce {
        #[command(subcommand)]
        direction: Reduce,
    },
    /// Generate a layered random network
    Gen {
        #[arg(long)]
        layers: usize,
        #[arg(long)]
        per_layer: usize,
        #[arg(long)]
        parents: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        domain: u32,
        #[arg(long, value_enum, default_value_t = GenFormat::Graph)]
        format: GenFormat,
        /// Draw parents from all earlier layers instead of the previous one
        #[arg(long)]
        any_earlier: bool,
    },
    /// Run a benchmark described by a TOML file
    Bench {
        config: PathBuf,
        /// First seed, overriding the config
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long, value_enum)]
        table: Option<TableArg>,
        /// Also print per-instance width and approximation parameter
        #[arg(long)]
        instances: bool,
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Subcommand)]
enum Reduce {
    /// Multi-cover instance of the min-fill decomposition of a graph
    ToSmc {
        graph: PathBuf,
        #[arg(long)]
        w: usize,
        #[arg(long, default_value = "unit")]
        cost: CostModel,
    },
    /// Augmented decomposition of a unit-cost instance, solved with GWC
    FromSmc {
        instance: PathBuf,
        /// Cover size to test against
        #[arg(long)]
        k: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenFormat {
    /// Moral graph in the edge-list format
    Graph,
    /// Network structure
    Uai,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableArg {
    Sizes,
    Profile,
}

enum Failure {
    Usage(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Verification(_) => Failure::Verification(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Edge-list graph, or the moral graph of a network structure file.
fn load_graph(path: &Path) -> Result<Graph, Failure> {
    let text = read(path)?;
    let first = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty());
    let parsed = match first {
        Some(l) if l.eq_ignore_ascii_case("bayes") => parse_uai(&text).and_then(|bn| bn.moralize()),
        _ => parse_graph(&text),
    };
    parsed.map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> Result<String, Failure> {
    let mut out = String::new();
    match cli.command {
        Command::Decompose { graph } => {
            let g = load_graph(&graph)?;
            let td = min_fill_decomposition(&g);
            check_decomposition(&td, &g).map_err(|v| Failure::Verification(v.to_string()))?;
            out = write_decomposition(&td);
        }
        Command::Cutset { graph, w, alg, cost } => {
            let g = load_graph(&graph)?;
            let c = find_wcutset(&g, w, cost, alg)?;
            certify(&g, &c)?;
            writeln!(out, "algorithm {alg}\nw {w}\nsize {}\ncost {}", c.len(), c.cost).unwrap();
            writeln!(out, "nodes {}", join(&c.members)).unwrap();
        }
        Command::Sequence {
            graph,
            alg,
            cost,
            space_bound,
        } => {
            let g = load_graph(&graph)?;
            let seq = cutset_sequence(&g, alg, cost)?;
            for e in &seq.entries {
                certify(&g, &e.cutset)?;
            }
            writeln!(out, "algorithm {alg}").unwrap();
            writeln!(out, "w size f plateau").unwrap();
            for (e, p) in seq.entries.iter().zip(f_profile(&seq)) {
                let mark = if p.preferred_over_next { "*" } else { "-" };
                writeln!(out, "{} {} {} {mark}", e.w, e.cutset.len(), e.f).unwrap();
            }
            if let Some(r) = space_bound {
                writeln!(out, "recommended w {}", recommend_w(&seq, r)?).unwrap();
            }
        }
        Command::Reduce {
            direction: Reduce::ToSmc { graph, w, cost },
        } => {
            let g = load_graph(&graph)?;
            let td = min_fill_decomposition(&g);
            out = write_smc(&td_to_smc(&td, w, &g, cost)?);
        }
        Command::Reduce {
            direction: Reduce::FromSmc { instance, k },
        } => {
            let text = read(&instance)?;
            let inst = parse_smc(&text).map_err(|e| Failure::Usage(format!("{}: {e}", instance.display())))?;
            let aug = smc_to_augmented_td(&inst, k.unwrap_or(0))?;
            let g = graph_of_decomposition(&aug.decomposition);
            let c = gwc(&g, &aug.decomposition, aug.w, CostModel::Unit, Algorithm::Gwc)?;
            let cover = aug.cover_of(&c.members);
            if !verify_cover(&inst, &cover)? {
                return Err(Failure::Verification("repaired cutset is not a cover".into()));
            }
            writeln!(out, "w {}", aug.w).unwrap();
            out.push_str(&write_decomposition(&aug.decomposition));
            writeln!(out, "cutset {}", join(&c.members)).unwrap();
            writeln!(out, "cover {}", join(&cover)).unwrap();
            writeln!(out, "size {}", cover.len()).unwrap();
            if let Some(k) = k {
                writeln!(out, "within k {}", if cover.len() <= k { "yes" } else { "unknown" }).unwrap();
            }
        }
        Command::Gen {
            layers,
            per_layer,
            parents,
            seed,
            domain,
            format,
            any_earlier,
        } => {
            let spec = LayeredNetSpec {
                layers,
                nodes_per_layer: per_layer,
                parents_per_node: parents,
                domain_size: domain,
                seed,
                parent_pool: if any_earlier {
                    ParentPool::Earlier
                } else {
                    ParentPool::Previous
                },
            };
            let bn = gen_layered(&spec)?;
            out = match format {
                GenFormat::Graph => write_graph(&bn.moralize()?),
                GenFormat::Uai => write_uai(&bn),
            };
        }
        Command::Bench {
            config,
            seed,
            format,
            table,
            instances,
            sequential,
        } => {
            let text = read(&config)?;
            let mut cfg =
                BenchConfig::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", config.display())))?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let fmt = match format {
                Some(Format::Text) => OutputFormat::Text,
                Some(Format::Csv) => OutputFormat::Csv,
                None => cfg.format,
            };
            let table = match table {
                Some(TableArg::Sizes) => Table::Sizes,
                Some(TableArg::Profile) => Table::Profile,
                None => cfg.table,
            };
            let mut networks = cfg.generated_networks()?;
            let base = config.parent().unwrap_or(Path::new("."));
            for path in &cfg.graphs {
                networks.push(Network {
                    name: path.clone(),
                    graph: load_graph(&base.join(path))?,
                });
            }
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::default()
            };
            let report = bench::run_benchmark(
                &networks,
                &cfg.algorithms()?,
                cfg.w_min..=cfg.w_max,
                cfg.cost_model()?,
                exec,
            )?;
            out = bench::render(&report, table, fmt);
            if instances {
                out.push('\n');
                out.push_str(&bench::render_instances(&report, fmt));
            }
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
