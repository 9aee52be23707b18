//! Seeded instance generators: layered random Bayes networks, random graphs
//! and random tree decompositions. Identical seeds give identical output.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decomposition::TreeDecomposition;
use crate::error::{Error, Result};
use crate::graph::{BayesNetStructure, Graph, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayeredNetSpec {
    pub layers: usize,
    pub nodes_per_layer: usize,
    pub parents_per_node: usize,
    #[serde(default = "default_domain")]
    pub domain_size: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub parent_pool: ParentPool,
}

/// Where a node's parents are drawn from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParentPool {
    /// The immediately preceding layer.
    #[default]
    Previous,
    /// Every node of every preceding layer.
    Earlier,
}

fn default_domain() -> u32 {
    2
}

impl LayeredNetSpec {
    pub fn new(layers: usize, nodes_per_layer: usize, parents_per_node: usize, seed: u64) -> Self {
        LayeredNetSpec {
            layers,
            nodes_per_layer,
            parents_per_node,
            domain_size: 2,
            seed,
            parent_pool: ParentPool::Previous,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers < 2 {
            return Err(Error::argument("need at least 2 layers"));
        }
        if self.nodes_per_layer < 1 {
            return Err(Error::argument("need at least 1 node per layer"));
        }
        if self.parents_per_node > self.nodes_per_layer {
            return Err(Error::argument("more parents than nodes in the previous layer"));
        }
        if self.domain_size < 2 {
            return Err(Error::argument("domain size must be at least 2"));
        }
        Ok(())
    }
}

/// Layered random network: node `j` of layer `k` has id
/// `k * nodes_per_layer + j`; nodes past the first layer draw
/// `parents_per_node` distinct parents uniformly from the previous layer
/// (or from all earlier layers, see [`ParentPool`]).
pub fn gen_layered(spec: &LayeredNetSpec) -> Result<BayesNetStructure> {
    spec.validate()?;
    let per = spec.nodes_per_layer;
    let total = spec.layers * per;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut bn = BayesNetStructure::new((0..total as u32).map(NodeId))?;
    for v in 0..total {
        bn.set_domain_size(NodeId(v as u32), spec.domain_size)?;
    }
    for layer in 1..spec.layers {
        let (prev, pool) = match spec.parent_pool {
            ParentPool::Previous => ((layer - 1) * per, per),
            ParentPool::Earlier => (0, layer * per),
        };
        for j in 0..per {
            let mut parents: Vec<NodeId> = sample(&mut rng, pool, spec.parents_per_node)
                .into_iter()
                .map(|p| NodeId((prev + p) as u32))
                .collect();
            parents.sort_unstable();
            bn.set_parents(NodeId((layer * per + j) as u32), parents)?;
        }
    }
    Ok(bn)
}

/// Erdős–Rényi graph on `0..n`.
pub fn random_graph(n: usize, edge_probability: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::with_nodes(n);
    for a in 0..n as u32 {
        for b in a + 1..n as u32 {
            if rng.random_bool(edge_probability) {
                g.add_edge(NodeId(a), NodeId(b)).unwrap();
            }
        }
    }
    g
}

/// Random valid decomposition over nodes `0..nodes` with `clusters`
/// clusters: a random tree, and for every node a random connected subtree
/// grown from a random cluster.
pub fn random_decomposition(clusters: usize, nodes: usize, seed: u64) -> TreeDecomposition {
    assert!(clusters >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tree_edges: Vec<(usize, usize)> = (1..clusters).map(|c| (rng.random_range(0..c), c)).collect();
    let mut adj = vec![Vec::new(); clusters];
    for &(a, b) in &tree_edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut bags: Vec<Vec<NodeId>> = vec![Vec::new(); clusters];
    for v in 0..nodes as u32 {
        let target = rng.random_range(1..=clusters);
        let start = rng.random_range(0..clusters);
        let mut inside = vec![start];
        let mut frontier: Vec<usize> = adj[start].clone();
        while inside.len() < target && !frontier.is_empty() {
            let pick = frontier.swap_remove(rng.random_range(0..frontier.len()));
            if inside.contains(&pick) {
                continue;
            }
            inside.push(pick);
            frontier.extend(adj[pick].iter().filter(|c| !inside.contains(c)));
        }
        for c in inside {
            bags[c].push(NodeId(v));
        }
    }
    TreeDecomposition::new(bags, tree_edges)
}

/// The chordal graph whose maximal cliques include every cluster of `td`.
pub fn graph_of_decomposition(td: &TreeDecomposition) -> Graph {
    let mut g = Graph::from_ids(td.nodes()).unwrap();
    for c in &td.clusters {
        for (i, &a) in c.iter().enumerate() {
            for &b in &c[i + 1..] {
                g.add_edge(a, b).unwrap();
            }
        }
    }
    g
}
