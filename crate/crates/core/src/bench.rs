//! Benchmark runner: every (instance, algorithm, w) cell is solved and
//! certified independently, then aggregated in a fixed order.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use serde::Deserialize;

use crate::cutset::{certify, find_wcutset, gwc, Algorithm, CostModel};
use crate::decomposition::{min_fill_decomposition, TreeDecomposition};
use crate::error::{Error, Result};
use crate::generate::{gen_layered, LayeredNetSpec, ParentPool};
use crate::graph::Graph;
use crate::par::{self, Execution};

#[derive(Clone, Debug)]
pub struct Network {
    pub name: String,
    pub graph: Graph,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceInfo {
    pub name: String,
    pub nodes: usize,
    pub width: usize,
    /// Largest number of oversized min-fill clusters sharing a node, over
    /// the benchmarked `w` range.
    pub m: usize,
}

impl InstanceInfo {
    pub fn approximation_factor(&self) -> f64 {
        1.0 + (self.m.max(1) as f64).ln()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub instance: usize,
    pub algorithm: Algorithm,
    pub w: usize,
    pub size: usize,
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub instances: Vec<InstanceInfo>,
    pub algorithms: Vec<Algorithm>,
    pub ws: Vec<usize>,
    pub cost_model: CostModel,
    /// Instance-major, then algorithm, then `w`.
    pub cells: Vec<Cell>,
}

impl BenchReport {
    fn cells_for(&self, alg: Algorithm, w: usize) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(move |c| c.algorithm == alg && c.w == w)
    }

    pub fn mean_size(&self, alg: Algorithm, w: usize) -> f64 {
        mean(self.cells_for(alg, w).map(|c| c.size as f64))
    }

    pub fn mean_cost(&self, alg: Algorithm, w: usize) -> f64 {
        mean(self.cells_for(alg, w).map(|c| c.cost))
    }

    pub fn mean_width(&self) -> f64 {
        mean(self.instances.iter().map(|i| i.width as f64))
    }

    pub fn max_m(&self) -> usize {
        self.instances.iter().map(|i| i.m).max().unwrap_or(0)
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Max over nodes of the number of clusters larger than `w + 1` containing it.
pub fn approximation_parameter(td: &TreeDecomposition, w: usize) -> usize {
    let mut count = std::collections::BTreeMap::new();
    for c in td.clusters.iter().filter(|c| c.len() > w + 1) {
        for v in c {
            *count.entry(*v).or_insert(0usize) += 1;
        }
    }
    count.into_values().max().unwrap_or(0)
}

pub fn run_benchmark(
    networks: &[Network],
    algorithms: &[Algorithm],
    w_range: RangeInclusive<usize>,
    cm: CostModel,
    exec: Execution,
) -> Result<BenchReport> {
    let ws: Vec<usize> = w_range.collect();
    if networks.is_empty() || algorithms.is_empty() || ws.is_empty() {
        return Err(Error::argument("benchmark needs at least one network, algorithm and w"));
    }
    if ws[0] < 1 {
        return Err(Error::argument("w must be at least 1"));
    }
    let tds = par::map(exec, networks, |n| min_fill_decomposition(&n.graph));

    let mut jobs = Vec::with_capacity(networks.len() * algorithms.len() * ws.len());
    for i in 0..networks.len() {
        for &a in algorithms {
            for &w in &ws {
                jobs.push((i, a, w));
            }
        }
    }
    let solved = par::map(exec, &jobs, |&(i, alg, w)| -> Result<Cell> {
        let g = &networks[i].graph;
        let c = match alg {
            Algorithm::Gwc | Algorithm::Gwca | Algorithm::Gwcm | Algorithm::Gwcd => gwc(g, &tds[i], w, cm, alg)?,
            _ => find_wcutset(g, w, cm, alg)?,
        };
        certify(g, &c)
            .map_err(|e| Error::Verification(format!("instance {} ({}), {alg}, w={w}: {e}", i, networks[i].name)))?;
        Ok(Cell {
            instance: i,
            algorithm: alg,
            w,
            size: c.len(),
            cost: c.cost,
        })
    });
    let cells = solved.into_iter().collect::<Result<Vec<_>>>()?;

    let instances = networks
        .iter()
        .zip(&tds)
        .map(|(n, td)| InstanceInfo {
            name: n.name.clone(),
            nodes: n.graph.node_count(),
            width: td.width,
            m: ws.iter().map(|&w| approximation_parameter(td, w)).max().unwrap_or(0),
        })
        .collect();
    Ok(BenchReport {
        instances,
        algorithms: algorithms.to_vec(),
        ws,
        cost_model: cm,
        cells,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Table {
    /// Mean cutset size per algorithm and `w`.
    #[default]
    Sizes,
    /// Mean `f(w) = |C_w| + w` per algorithm and `w`.
    Profile,
}

fn render_grid(rows: &[(String, Vec<String>)], header: &[String], fmt: OutputFormat) -> String {
    let mut out = String::new();
    match fmt {
        OutputFormat::Csv => {
            writeln!(out, "{}", header.join(",")).unwrap();
            for (name, vals) in rows {
                writeln!(out, "{name},{}", vals.join(",")).unwrap();
            }
        }
        OutputFormat::Text => {
            let cols = header.len();
            let mut widths = header.iter().map(String::len).collect::<Vec<_>>();
            for (name, vals) in rows {
                widths[0] = widths[0].max(name.len());
                for (j, v) in vals.iter().enumerate() {
                    widths[j + 1] = widths[j + 1].max(v.len());
                }
            }
            let line = |cells: Vec<&str>| {
                let mut s = format!("{:<w$}", cells[0], w = widths[0]);
                for j in 1..cols {
                    write!(s, "  {:>w$}", cells[j], w = widths[j]).unwrap();
                }
                s
            };
            writeln!(out, "{}", line(header.iter().map(String::as_str).collect())).unwrap();
            for (name, vals) in rows {
                let mut cells = vec![name.as_str()];
                cells.extend(vals.iter().map(String::as_str));
                writeln!(out, "{}", line(cells)).unwrap();
            }
        }
    }
    out
}

pub fn render(report: &BenchReport, table: Table, fmt: OutputFormat) -> String {
    let mut header = vec!["alg".to_string()];
    header.extend(report.ws.iter().map(|w| format!("w={w}")));
    let rows: Vec<(String, Vec<String>)> = report
        .algorithms
        .iter()
        .map(|&a| {
            let vals = report
                .ws
                .iter()
                .map(|&w| {
                    let size = report.mean_size(a, w);
                    let v = match table {
                        Table::Sizes => size,
                        Table::Profile => size + w as f64,
                    };
                    format!("{v:.2}")
                })
                .collect();
            (a.to_string(), vals)
        })
        .collect();

    let mut out = String::new();
    if fmt == OutputFormat::Text {
        writeln!(
            out,
            "instances {}  mean width {:.2}  max m {}  factor {:.2}  cost {}",
            report.instances.len(),
            report.mean_width(),
            report.max_m(),
            1.0 + (report.max_m().max(1) as f64).ln(),
            report.cost_model
        )
        .unwrap();
    }
    out.push_str(&render_grid(&rows, &header, fmt));
    out
}

/// Per-instance metadata: name, node count, min-fill width, m, 1 + ln m.
pub fn render_instances(report: &BenchReport, fmt: OutputFormat) -> String {
    let header: Vec<String> = ["instance", "nodes", "width", "m", "factor"].map(String::from).to_vec();
    let rows: Vec<(String, Vec<String>)> = report
        .instances
        .iter()
        .map(|i| {
            (
                i.name.clone(),
                vec![
                    i.nodes.to_string(),
                    i.width.to_string(),
                    i.m.to_string(),
                    format!("{:.3}", i.approximation_factor()),
                ],
            )
        })
        .collect();
    render_grid(&rows, &header, fmt)
}

/// Configuration of the `bench` subcommand, read from TOML.
///
/// ```toml
/// algorithms = ["gwc", "gwca", "mga"]
/// w_min = 1
/// w_max = 10
/// seeds = 100          # seeds seed..seed+seeds
/// seed = 0
/// cost = "unit"
/// table = "sizes"      # or "profile"
/// format = "text"      # or "csv"
///
/// [network]
/// layers = 4
/// nodes_per_layer = 50
/// parents_per_node = 3
/// ```
///
/// Instead of `[network]`, `graphs = ["a.graph", ...]` benchmarks files in
/// the edge-list format (paths relative to the config file).
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub algorithms: Vec<String>,
    #[serde(default = "one")]
    pub w_min: usize,
    pub w_max: usize,
    #[serde(default = "one")]
    pub seeds: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "unit")]
    pub cost: String,
    #[serde(default)]
    pub table: Table,
    #[serde(default)]
    pub format: OutputFormat,
    pub network: Option<NetworkConfig>,
    #[serde(default)]
    pub graphs: Vec<String>,
}

fn one() -> usize {
    1
}

fn unit() -> String {
    "unit".into()
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub layers: usize,
    pub nodes_per_layer: usize,
    pub parents_per_node: usize,
    #[serde(default = "two")]
    pub domain_size: u32,
    #[serde(default)]
    pub parent_pool: ParentPool,
}

fn two() -> u32 {
    2
}

impl BenchConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start].matches('\n').count() + 1).unwrap_or(0);
            Error::parse(line, e.message().to_string())
        })
    }

    pub fn algorithms(&self) -> Result<Vec<Algorithm>> {
        self.algorithms.iter().map(|a| a.parse()).collect()
    }

    pub fn cost_model(&self) -> Result<CostModel> {
        self.cost.parse()
    }

    /// Generated networks for seeds `seed..seed + seeds`.
    pub fn generated_networks(&self) -> Result<Vec<Network>> {
        let Some(net) = self.network else {
            return Ok(Vec::new());
        };
        (0..self.seeds as u64)
            .map(|k| {
                let seed = self.seed + k;
                let spec = LayeredNetSpec {
                    layers: net.layers,
                    nodes_per_layer: net.nodes_per_layer,
                    parents_per_node: net.parents_per_node,
                    domain_size: net.domain_size,
                    seed,
                    parent_pool: net.parent_pool,
                };
                Ok(Network {
                    name: format!("seed{seed}"),
                    graph: gen_layered(&spec)?.moralize()?,
                })
            })
            .collect()
    }
}
