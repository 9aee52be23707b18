//! Undirected graphs with per-node cost and domain size, moralization of
//! directed structures, and the subgraph operations every cutset algorithm
//! builds on.
//!
//! Nodes are identified by [`NodeId`] but stored at dense local indexes in
//! ascending id order, so "lowest index" and "lowest id" always agree. Every
//! tie-break in the crate relies on that.

use std::collections::BTreeMap;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

/// Undirected simple graph. Immutable once built; derived graphs keep the
/// original node ids.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    ids: Vec<NodeId>,
    adj: Vec<FixedBitSet>,
    cost: Vec<f64>,
    domain: Vec<u32>,
}

impl Graph {
    /// Graph on nodes `0..n` with no edges, unit costs and binary domains.
    pub fn with_nodes(n: usize) -> Self {
        Self::from_ids((0..n as u32).map(NodeId)).expect("dense ids are distinct")
    }

    /// Edgeless graph over the given ids. Duplicate ids are rejected.
    pub fn from_ids(ids: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let mut ids: Vec<NodeId> = ids.into_iter().collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::argument(format!("duplicate node {}", w[0])));
        }
        let n = ids.len();
        Ok(Graph {
            ids,
            adj: vec![FixedBitSet::with_capacity(n); n],
            cost: vec![1.0; n],
            domain: vec![2; n],
        })
    }

    /// Builds a graph on `0..n` from an edge list. Repeated edges are merged.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut g = Self::with_nodes(n);
        for &(u, v) in edges {
            g.add_edge(NodeId(u), NodeId(v))?;
        }
        Ok(g)
    }

    /// Adds an undirected edge. Returns `false` if it was already present.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<bool> {
        if u == v {
            return Err(Error::argument(format!("self-loop on node {u}")));
        }
        let a = self.index_of(u).ok_or(Error::UnknownNode(u))?;
        let b = self.index_of(v).ok_or(Error::UnknownNode(v))?;
        if self.adj[a].contains(b) {
            return Ok(false);
        }
        self.adj[a].insert(b);
        self.adj[b].insert(a);
        Ok(true)
    }

    pub fn set_cost(&mut self, u: NodeId, cost: f64) -> Result<()> {
        if !(cost.is_finite() && cost > 0.0) {
            return Err(Error::argument(format!(
                "cost of node {u} must be positive, got {cost}"
            )));
        }
        let i = self.index_of(u).ok_or(Error::UnknownNode(u))?;
        self.cost[i] = cost;
        Ok(())
    }

    pub fn set_domain_size(&mut self, u: NodeId, size: u32) -> Result<()> {
        if size == 0 {
            return Err(Error::argument(format!("domain of node {u} must be non-empty")));
        }
        let i = self.index_of(u).ok_or(Error::UnknownNode(u))?;
        self.domain[i] = size;
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|row| row.count_ones(..)).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Node ids in ascending order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.ids
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (i, row) in self.adj.iter().enumerate() {
            for j in row.ones().filter(|&j| j > i) {
                out.push((self.ids[i], self.ids[j]));
            }
        }
        out
    }

    pub fn contains(&self, u: NodeId) -> bool {
        self.index_of(u).is_some()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        match (self.index_of(u), self.index_of(v)) {
            (Some(a), Some(b)) => self.adj[a].contains(b),
            _ => false,
        }
    }

    pub fn neighbors(&self, u: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let row = self.index_of(u).map(|i| &self.adj[i]);
        row.into_iter().flat_map(move |r| r.ones().map(move |j| self.ids[j]))
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.index_of(u).map_or(0, |i| self.adj[i].count_ones(..))
    }

    /// Declared cost, default 1.
    pub fn cost(&self, u: NodeId) -> Option<f64> {
        self.index_of(u).map(|i| self.cost[i])
    }

    /// Domain size, default 2.
    pub fn domain_size(&self, u: NodeId) -> Option<u32> {
        self.index_of(u).map(|i| self.domain[i])
    }

    pub fn index_of(&self, u: NodeId) -> Option<usize> {
        self.ids.binary_search(&u).ok()
    }

    pub(crate) fn id(&self, i: usize) -> NodeId {
        self.ids[i]
    }

    pub(crate) fn row(&self, i: usize) -> &FixedBitSet {
        &self.adj[i]
    }

    pub(crate) fn cost_at(&self, i: usize) -> f64 {
        self.cost[i]
    }

    pub(crate) fn domain_at(&self, i: usize) -> u32 {
        self.domain[i]
    }

    /// Local-index bitset for a set of ids.
    pub(crate) fn mask_of(&self, s: &[NodeId]) -> Result<FixedBitSet> {
        let mut mask = FixedBitSet::with_capacity(self.node_count());
        for &u in s {
            mask.insert(self.index_of(u).ok_or(Error::UnknownNode(u))?);
        }
        Ok(mask)
    }

    pub(crate) fn ids_of(&self, mask: &FixedBitSet) -> Vec<NodeId> {
        mask.ones().map(|i| self.ids[i]).collect()
    }

    /// Subgraph induced by the local indexes in `keep`.
    pub(crate) fn induced(&self, keep: &FixedBitSet) -> Graph {
        let kept: Vec<usize> = keep.ones().collect();
        let n = kept.len();
        let mut remap = vec![usize::MAX; self.node_count()];
        for (new, &old) in kept.iter().enumerate() {
            remap[old] = new;
        }
        let adj = kept
            .iter()
            .map(|&old| {
                let mut row = FixedBitSet::with_capacity(n);
                for j in self.adj[old].ones() {
                    if remap[j] != usize::MAX {
                        row.insert(remap[j]);
                    }
                }
                row
            })
            .collect();
        Graph {
            ids: kept.iter().map(|&i| self.ids[i]).collect(),
            adj,
            cost: kept.iter().map(|&i| self.cost[i]).collect(),
            domain: kept.iter().map(|&i| self.domain[i]).collect(),
        }
    }

    /// The subgraph induced on all nodes except `s`. The input is untouched.
    pub fn remove_nodes(&self, s: &[NodeId]) -> Result<Graph> {
        let mut keep = self.mask_of(s)?;
        keep.toggle_range(..);
        Ok(self.induced(&keep))
    }

    /// Local indexes that survive repeated deletion of degree-≤1 nodes
    /// (the 2-core), restricted to `alive`.
    pub(crate) fn two_core_mask(&self, alive: &FixedBitSet) -> FixedBitSet {
        let mut alive = alive.clone();
        let mut degree: Vec<usize> = (0..self.node_count())
            .map(|i| {
                if alive.contains(i) {
                    self.adj[i].intersection_count(&alive)
                } else {
                    0
                }
            })
            .collect();
        let mut stack: Vec<usize> = alive.ones().filter(|&i| degree[i] <= 1).collect();
        while let Some(v) = stack.pop() {
            if !alive.contains(v) {
                continue;
            }
            alive.set(v, false);
            for u in self.adj[v].ones() {
                if alive.contains(u) {
                    degree[u] -= 1;
                    if degree[u] == 1 {
                        stack.push(u);
                    }
                }
            }
        }
        alive
    }

    /// Repeatedly deletes nodes of degree at most one. The result has minimum
    /// degree two or is empty.
    pub fn prune_degree_le1(&self) -> Graph {
        let mut all = FixedBitSet::with_capacity(self.node_count());
        all.insert_range(..);
        self.induced(&self.two_core_mask(&all))
    }
}

/// Directed acyclic structure of a Bayesian network: variables and parent
/// lists only, no tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BayesNetStructure {
    variables: Vec<NodeId>,
    parents: BTreeMap<NodeId, Vec<NodeId>>,
    domain_size: BTreeMap<NodeId, u32>,
}

impl BayesNetStructure {
    /// Variables with no parents and binary domains.
    pub fn new(variables: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let mut variables: Vec<NodeId> = variables.into_iter().collect();
        variables.sort_unstable();
        if let Some(w) = variables.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::argument(format!("duplicate variable {}", w[0])));
        }
        let parents = variables.iter().map(|&v| (v, Vec::new())).collect();
        let domain_size = variables.iter().map(|&v| (v, 2)).collect();
        Ok(BayesNetStructure {
            variables,
            parents,
            domain_size,
        })
    }

    pub fn set_parents(&mut self, child: NodeId, parents: Vec<NodeId>) -> Result<()> {
        if !self.parents.contains_key(&child) {
            return Err(Error::UnknownNode(child));
        }
        let mut seen = parents.clone();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::argument(format!("variable {child} lists parent {} twice", w[0])));
        }
        for &p in &parents {
            if p == child {
                return Err(Error::Cycle(child));
            }
            if !self.parents.contains_key(&p) {
                return Err(Error::UnknownNode(p));
            }
        }
        self.parents.insert(child, parents);
        Ok(())
    }

    pub fn set_domain_size(&mut self, v: NodeId, size: u32) -> Result<()> {
        if size == 0 {
            return Err(Error::argument(format!("domain of variable {v} must be non-empty")));
        }
        match self.domain_size.get_mut(&v) {
            Some(d) => {
                *d = size;
                Ok(())
            }
            None => Err(Error::UnknownNode(v)),
        }
    }

    pub fn variables(&self) -> &[NodeId] {
        &self.variables
    }

    pub fn parents(&self, v: NodeId) -> &[NodeId] {
        self.parents.get(&v).map_or(&[], Vec::as_slice)
    }

    pub fn domain_size(&self, v: NodeId) -> Option<u32> {
        self.domain_size.get(&v).copied()
    }

    /// Returns a node on a directed cycle, if any.
    fn find_cycle(&self) -> Option<NodeId> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state: BTreeMap<NodeId, u8> = self.variables.iter().map(|&v| (v, 0)).collect();
        for &start in &self.variables {
            if state[&start] != 0 {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            state.insert(start, 1);
            while let Some((v, next)) = stack.pop() {
                let ps = self.parents(v);
                if next < ps.len() {
                    stack.push((v, next + 1));
                    let p = ps[next];
                    match state[&p] {
                        0 => {
                            state.insert(p, 1);
                            stack.push((p, 0));
                        }
                        1 => return Some(p),
                        _ => {}
                    }
                } else {
                    state.insert(v, 2);
                }
            }
        }
        None
    }

    /// Moral graph: the skeleton plus an edge between every pair of parents
    /// sharing a child. Domain sizes are copied; costs default to 1.
    pub fn moralize(&self) -> Result<Graph> {
        if let Some(v) = self.find_cycle() {
            return Err(Error::Cycle(v));
        }
        let mut g = Graph::from_ids(self.variables.iter().copied())?;
        for &v in &self.variables {
            g.set_domain_size(v, self.domain_size[&v])?;
            let ps = self.parents(v);
            for (i, &p) in ps.iter().enumerate() {
                g.add_edge(p, v)?;
                for &q in &ps[i + 1..] {
                    g.add_edge(p, q)?;
                }
            }
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u32) -> NodeId {
        NodeId(v)
    }

    fn edge_set(g: &Graph) -> Vec<(u32, u32)> {
        g.edges().into_iter().map(|(a, b)| (a.0, b.0)).collect()
    }

    #[test]
    fn moralize_chain_is_skeleton() {
        let mut bn = BayesNetStructure::new([n(0), n(1), n(2)]).unwrap();
        bn.set_parents(n(1), vec![n(0)]).unwrap();
        bn.set_parents(n(2), vec![n(1)]).unwrap();
        assert_eq!(edge_set(&bn.moralize().unwrap()), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn moralize_marries_parents() {
        let mut bn = BayesNetStructure::new([n(0), n(1), n(2)]).unwrap();
        bn.set_parents(n(2), vec![n(0), n(1)]).unwrap();
        bn.set_domain_size(n(2), 5).unwrap();
        let g = bn.moralize().unwrap();
        assert_eq!(edge_set(&g), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(g.domain_size(n(2)), Some(5));
        assert_eq!(g.cost(n(2)), Some(1.0));
    }

    #[test]
    fn moralize_rejects_cycles() {
        let mut bn = BayesNetStructure::new([n(0), n(1), n(2)]).unwrap();
        bn.set_parents(n(1), vec![n(0)]).unwrap();
        bn.set_parents(n(2), vec![n(1)]).unwrap();
        bn.set_parents(n(0), vec![n(2)]).unwrap();
        assert!(matches!(bn.moralize(), Err(Error::Cycle(_))));
    }

    #[test]
    fn duplicate_parent_rejected() {
        let mut bn = BayesNetStructure::new([n(0), n(1)]).unwrap();
        assert!(bn.set_parents(n(1), vec![n(0), n(0)]).is_err());
    }

    #[test]
    fn remove_from_four_cycle() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let h = g.remove_nodes(&[n(1)]).unwrap();
        assert_eq!(h.nodes(), &[n(0), n(2), n(3)]);
        assert_eq!(edge_set(&h), vec![(0, 3), (2, 3)]);
        // input untouched
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.remove_nodes(&[]).unwrap(), g);
    }

    #[test]
    fn remove_two_from_k4() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let h = g.remove_nodes(&[n(0), n(2)]).unwrap();
        assert_eq!(edge_set(&h), vec![(1, 3)]);
    }

    #[test]
    fn remove_unknown_node_fails() {
        let g = Graph::with_nodes(3);
        assert_eq!(g.remove_nodes(&[n(7)]), Err(Error::UnknownNode(n(7))));
    }

    #[test]
    fn prune_tree_vanishes() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        assert!(g.prune_degree_le1().is_empty());
    }

    #[test]
    fn prune_cycle_with_pendant() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (2, 4)]).unwrap();
        let h = g.prune_degree_le1();
        assert_eq!(h.nodes(), &[n(0), n(1), n(2), n(3)]);
        assert_eq!(h.edge_count(), 4);
    }

    #[test]
    fn prune_bowtie_unchanged() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]).unwrap();
        assert_eq!(g.prune_degree_le1(), g);
    }

    #[test]
    fn rejects_self_loop_and_bad_cost() {
        let mut g = Graph::with_nodes(2);
        assert!(g.add_edge(n(0), n(0)).is_err());
        assert!(g.set_cost(n(0), 0.0).is_err());
        assert!(!g.add_edge(n(0), n(1)).unwrap() || !g.add_edge(n(1), n(0)).unwrap());
    }
}
