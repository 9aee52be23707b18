//! w-cutset algorithms: the greedy decomposition-based family (GWC and its
//! rebuilding variants), the MGA and DGR baselines, verification and cost
//! accounting.
//!
//! Every algorithm returns a [`Cutset`] carrying a residual decomposition of
//! the graph with the cutset removed. The residual has width at most the
//! target `w` and serves as a certificate that does not depend on min-fill
//! reproducing the same width.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;

use crate::decomposition::{
    check_decomposition, clique_tree, decomposition_from, eliminate_along, eliminate_min_fill, full_mask, width_of,
    TreeDecomposition,
};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::oracle;

/// How a node's cost is derived.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CostModel {
    /// Every node costs 1.
    #[default]
    Unit,
    /// `lg |D(X)|`.
    LogDomain,
    /// `|D(X)|`.
    Domain,
    /// The per-node cost declared on the graph.
    Declared,
}

impl CostModel {
    pub fn cost_of(self, g: &Graph, i: usize) -> f64 {
        match self {
            CostModel::Unit => 1.0,
            CostModel::LogDomain => (g.domain_at(i) as f64).log2(),
            CostModel::Domain => g.domain_at(i) as f64,
            CostModel::Declared => g.cost_at(i),
        }
    }

    pub(crate) fn costs(self, g: &Graph) -> Vec<f64> {
        (0..g.node_count()).map(|i| self.cost_of(g, i)).collect()
    }
}

impl FromStr for CostModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(CostModel::Unit),
            "logdom" => Ok(CostModel::LogDomain),
            "dom" => Ok(CostModel::Domain),
            "node" => Ok(CostModel::Declared),
            _ => Err(Error::argument(format!("unknown cost model {s:?}"))),
        }
    }
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostModel::Unit => "unit",
            CostModel::LogDomain => "logdom",
            CostModel::Domain => "dom",
            CostModel::Declared => "node",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Gwc,
    Gwca,
    Gwcm,
    Gwcd,
    Mga,
    Dgr,
    Exact,
}

impl Algorithm {
    pub const HEURISTICS: [Algorithm; 6] = [
        Algorithm::Mga,
        Algorithm::Dgr,
        Algorithm::Gwc,
        Algorithm::Gwca,
        Algorithm::Gwcm,
        Algorithm::Gwcd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Gwc => "gwc",
            Algorithm::Gwca => "gwca",
            Algorithm::Gwcm => "gwcm",
            Algorithm::Gwcd => "gwcd",
            Algorithm::Mga => "mga",
            Algorithm::Dgr => "dgr",
            Algorithm::Exact => "exact",
        }
    }

    fn rebuilds(self) -> bool {
        matches!(self, Algorithm::Gwca | Algorithm::Gwcm | Algorithm::Gwcd)
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Algorithm::Exact]
            .into_iter()
            .chain(Algorithm::HEURISTICS)
            .find(|a| a.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::argument(format!("unknown algorithm {s:?}")))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name().to_ascii_uppercase())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cutset {
    /// Ascending.
    pub members: Vec<NodeId>,
    pub target_w: usize,
    pub cost: f64,
    pub algorithm: Algorithm,
    /// Decomposition of the graph without `members`, of width ≤ `target_w`.
    pub residual: TreeDecomposition,
}

impl Cutset {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn build(
        g: &Graph,
        mut picked: Vec<usize>,
        w: usize,
        cm: CostModel,
        algorithm: Algorithm,
        residual: TreeDecomposition,
    ) -> Self {
        picked.sort_unstable();
        Cutset {
            cost: picked.iter().map(|&i| cm.cost_of(g, i)).sum(),
            members: picked.into_iter().map(|i| g.id(i)).collect(),
            target_w: w,
            algorithm,
            residual,
        }
    }
}

fn check_w(w: usize) -> Result<()> {
    if w < 1 {
        Err(Error::argument("w must be at least 1"))
    } else {
        Ok(())
    }
}

/// `a` has a strictly smaller `cost / count` than `b`.
fn ratio_cmp(cost_a: f64, count_a: usize, cost_b: f64, count_b: usize) -> Ordering {
    (cost_a * count_b as f64).total_cmp(&(cost_b * count_a as f64))
}

/// One greedy step over a cluster list: the node minimizing
/// `cost / (#oversized clusters containing it)`, then the highest `tie`
/// score, then the lowest index. `None` when no cluster exceeds `w + 1`.
fn greedy_pick(clusters: &[FixedBitSet], w: usize, costs: &[f64], tie: impl Fn(usize) -> usize) -> Option<usize> {
    let mut f = vec![0usize; costs.len()];
    let mut any = false;
    for c in clusters.iter().filter(|c| c.count_ones(..) > w + 1) {
        any = true;
        for v in c.ones() {
            f[v] += 1;
        }
    }
    if !any {
        return None;
    }
    (0..costs.len()).filter(|&v| f[v] > 0).min_by(|&a, &b| {
        ratio_cmp(costs[a], f[a], costs[b], f[b])
            .then_with(|| tie(b).cmp(&tie(a)))
            .then_with(|| a.cmp(&b))
    })
}

fn membership(clusters: &[FixedBitSet], n: usize, keep: impl Fn(&FixedBitSet) -> bool) -> Vec<usize> {
    let mut count = vec![0usize; n];
    for c in clusters.iter().filter(|c| keep(c)) {
        for v in c.ones() {
            count[v] += 1;
        }
    }
    count
}

fn cluster_masks(g: &Graph, td: &TreeDecomposition) -> Result<Vec<FixedBitSet>> {
    td.clusters.iter().map(|c| g.mask_of(c)).collect()
}

/// Greedy w-cutset of a decomposition.
///
/// `Gwc` works on a copy of `td`'s clusters and never re-triangulates.
/// `Gwca`, `Gwcm` and `Gwcd` start from `td` and rebuild a min-fill
/// decomposition of the residual graph after every pick; they differ only in
/// the tie-break (clusters overall, clusters of maximum size, degree in the
/// pruned residual graph).
pub fn gwc(g: &Graph, td: &TreeDecomposition, w: usize, cm: CostModel, variant: Algorithm) -> Result<Cutset> {
    check_w(w)?;
    let costs = cm.costs(g);
    let n = g.node_count();
    let mut clusters = cluster_masks(g, td)?;
    match variant {
        Algorithm::Gwc => {
            let everywhere = membership(&clusters, n, |_| true);
            let mut picked = Vec::new();
            while let Some(v) = greedy_pick(&clusters, w, &costs, |x| everywhere[x]) {
                for c in &mut clusters {
                    c.set(v, false);
                }
                picked.push(v);
            }
            let residual = td.without(&picked.iter().map(|&i| g.id(i)).collect::<Vec<_>>());
            Ok(Cutset::build(g, picked, w, cm, variant, residual))
        }
        v if v.rebuilds() => {
            let mut alive = full_mask(n);
            let mut picked = Vec::new();
            let mut last = None;
            loop {
                let tie: Vec<usize> = match variant {
                    Algorithm::Gwca => membership(&clusters, n, |_| true),
                    Algorithm::Gwcm => {
                        let top = clusters.iter().map(|c| c.count_ones(..)).max().unwrap_or(0);
                        membership(&clusters, n, |c| c.count_ones(..) == top)
                    }
                    _ => {
                        let core = g.two_core_mask(&alive);
                        (0..n)
                            .map(|i| {
                                if core.contains(i) {
                                    g.row(i).intersection_count(&core)
                                } else {
                                    0
                                }
                            })
                            .collect()
                    }
                };
                let Some(v) = greedy_pick(&clusters, w, &costs, |x| tie[x]) else {
                    break;
                };
                picked.push(v);
                alive.set(v, false);
                let elim = eliminate_min_fill(g, &alive);
                let (kept, _) = clique_tree(&elim);
                clusters = kept.iter().map(|&k| elim.cliques[k].clone()).collect();
                last = Some(elim);
            }
            let residual = match last {
                Some(elim) => decomposition_from(g, &elim),
                None => td.clone(),
            };
            Ok(Cutset::build(g, picked, w, cm, variant, residual))
        }
        other => Err(Error::argument(format!("{other} is not a GWC variant"))),
    }
}

/// MGA: prune degree-≤1 nodes, take the node minimizing cost/degree (ties to
/// the node in most oversized clusters of the current min-fill
/// decomposition), stop once the min-fill width of the residual graph is at
/// most `w`.
pub fn mga(g: &Graph, w: usize, cm: CostModel) -> Result<Cutset> {
    check_w(w)?;
    let n = g.node_count();
    let costs = cm.costs(g);
    let mut alive = full_mask(n);
    let mut picked = Vec::new();
    loop {
        let elim = eliminate_min_fill(g, &alive);
        let (kept, _) = clique_tree(&elim);
        let width = kept
            .iter()
            .map(|&k| elim.cliques[k].count_ones(..))
            .max()
            .unwrap_or(0)
            .saturating_sub(1);
        if width <= w {
            let residual = decomposition_from(g, &elim);
            return Ok(Cutset::build(g, picked, w, cm, Algorithm::Mga, residual));
        }
        let clusters: Vec<FixedBitSet> = kept.iter().map(|&k| elim.cliques[k].clone()).collect();
        let oversized = membership(&clusters, n, |c| c.count_ones(..) > w + 1);
        let core = g.two_core_mask(&alive);
        let degree: Vec<usize> = (0..n).map(|i| g.row(i).intersection_count(&core)).collect();
        let v = core
            .ones()
            .min_by(|&a, &b| {
                ratio_cmp(costs[a], degree[a], costs[b], degree[b])
                    .then_with(|| oversized[b].cmp(&oversized[a]))
                    .then_with(|| a.cmp(&b))
            })
            .expect("a graph of width above 1 has a non-empty 2-core");
        picked.push(v);
        alive.set(v, false);
    }
}

/// DGR: eliminate in min-fill order; whenever the next elimination would
/// create a cluster larger than `w + 1`, instead move the uneliminated node
/// maximizing `sqrt(|N_X|) * prod_{U in N_X} |D(U)|` into the cutset.
/// `cm` only affects the reported cost.
pub fn dgr(g: &Graph, w: usize, cm: CostModel) -> Result<Cutset> {
    check_w(w)?;
    let n = g.node_count();
    let mut mf = crate::decomposition::MinFill::new(g, &full_mask(n));
    let mut order = Vec::new();
    let mut picked = Vec::new();
    while let Some(v) = mf.next() {
        if mf.neighbors(v).count_ones(..) <= w {
            mf.eliminate(v);
            order.push(v);
            continue;
        }
        // compare |N| * C^2, the square of the score, exactly
        let score = |x: usize| -> BigUint {
            let nbrs = mf.neighbors(x);
            let prod = nbrs.ones().fold(BigUint::from(1u32), |acc, u| acc * g.domain_at(u));
            &prod * &prod * nbrs.count_ones(..)
        };
        let x = mf
            .alive()
            .ones()
            .map(|x| (score(x), x))
            .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)))
            .map(|(_, x)| x)
            .expect("alive set is non-empty");
        mf.delete(x);
        picked.push(x);
    }
    let mut alive = full_mask(n);
    for &i in &picked {
        alive.set(i, false);
    }
    let residual = decomposition_from(g, &eliminate_along(g, &alive, &order));
    Ok(Cutset::build(g, picked, w, cm, Algorithm::Dgr, residual))
}

/// Runs any algorithm on `g`, starting decomposition-based ones from the
/// min-fill decomposition.
pub fn find_wcutset(g: &Graph, w: usize, cm: CostModel, algorithm: Algorithm) -> Result<Cutset> {
    match algorithm {
        Algorithm::Mga => mga(g, w, cm),
        Algorithm::Dgr => dgr(g, w, cm),
        Algorithm::Exact => oracle::exact_min_wcutset(g, w, cm),
        variant => gwc(g, &crate::decomposition::min_fill_decomposition(g), w, cm, variant),
    }
}

/// Every cluster keeps at most `w + 1` nodes once `c` is removed.
pub fn verify_wcutset_td(td: &TreeDecomposition, c: &[NodeId], w: usize) -> bool {
    td.clusters
        .iter()
        .all(|cluster| cluster.iter().filter(|v| !c.contains(v)).count() <= w + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    /// Min-fill width of the residual graph; a `true` is always sound.
    Heuristic,
    /// Exact treewidth of the residual graph.
    Exact,
}

pub fn verify_wcutset_graph(g: &Graph, c: &[NodeId], w: usize, mode: VerifyMode) -> Result<bool> {
    let residual = g.remove_nodes(c)?;
    Ok(match mode {
        VerifyMode::Heuristic => width_of(&residual) <= w,
        VerifyMode::Exact => oracle::exact_treewidth(&residual)? <= w,
    })
}

/// Accepts a cutset if either the min-fill width of the residual graph or the
/// carried residual decomposition shows treewidth at most `target_w`.
pub fn certify(g: &Graph, cutset: &Cutset) -> Result<()> {
    if verify_wcutset_graph(g, &cutset.members, cutset.target_w, VerifyMode::Heuristic)? {
        return Ok(());
    }
    let residual = g.remove_nodes(&cutset.members)?;
    check_decomposition(&cutset.residual, &residual)
        .map_err(|v| Error::Verification(format!("{} residual decomposition invalid: {v}", cutset.algorithm)))?;
    if cutset.residual.width > cutset.target_w {
        return Err(Error::Verification(format!(
            "{} residual width {} exceeds w = {}",
            cutset.algorithm, cutset.residual.width, cutset.target_w
        )));
    }
    Ok(())
}

pub fn cutset_cost(c: &[NodeId], g: &Graph, cm: CostModel) -> Result<f64> {
    c.iter()
        .map(|&v| g.index_of(v).map(|i| cm.cost_of(g, i)).ok_or(Error::UnknownNode(v)))
        .sum()
}
