//! Min-fill elimination, triangulation and cluster-tree construction.
//!
//! All heavy lifting runs on bitset rows in the graph's local index space.
//! The cutset algorithms call the `pub(crate)` entry points directly with an
//! alive mask instead of materializing residual graphs.

use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// A permutation of a graph's nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationOrder(pub Vec<NodeId>);

impl EliminationOrder {
    pub fn as_slice(&self) -> &[NodeId] {
        &self.0
    }
}

/// Tree of clusters. `width` is the largest cluster size minus one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub clusters: Vec<Vec<NodeId>>,
    pub tree_edges: Vec<(usize, usize)>,
    pub width: usize,
}

impl TreeDecomposition {
    /// Sorts each cluster and derives the width.
    pub fn new(mut clusters: Vec<Vec<NodeId>>, tree_edges: Vec<(usize, usize)>) -> Self {
        for c in &mut clusters {
            c.sort_unstable();
            c.dedup();
        }
        let width = width_of_clusters(&clusters);
        TreeDecomposition {
            clusters,
            tree_edges,
            width,
        }
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Every node mentioned by some cluster, ascending.
    pub fn nodes(&self) -> Vec<NodeId> {
        let mut all: Vec<NodeId> = self.clusters.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    /// Same tree with `removed` deleted from every cluster.
    pub fn without(&self, removed: &[NodeId]) -> TreeDecomposition {
        let clusters = self
            .clusters
            .iter()
            .map(|c| c.iter().copied().filter(|v| !removed.contains(v)).collect())
            .collect();
        TreeDecomposition::new(clusters, self.tree_edges.clone())
    }

    /// Same tree with `added` inserted into every cluster.
    pub fn with_added(&self, added: &[NodeId]) -> TreeDecomposition {
        let clusters = if self.clusters.is_empty() && !added.is_empty() {
            vec![added.to_vec()]
        } else {
            self.clusters
                .iter()
                .map(|c| c.iter().chain(added).copied().collect())
                .collect()
        };
        TreeDecomposition::new(clusters, self.tree_edges.clone())
    }
}

pub(crate) fn width_of_clusters<T>(clusters: &[Vec<T>]) -> usize {
    clusters.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
}

/// Reason a decomposition fails to be valid for a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NotATree,
    UnknownNode(NodeId),
    UncoveredNode(NodeId),
    UncoveredEdge(NodeId, NodeId),
    RunningIntersection(NodeId),
    WidthMismatch { stated: usize, actual: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotATree => write!(f, "tree edges do not form a single tree"),
            Violation::UnknownNode(v) => write!(f, "cluster mentions node {v} not in the graph"),
            Violation::UncoveredNode(v) => write!(f, "node {v} is in no cluster"),
            Violation::UncoveredEdge(u, v) => write!(f, "edge {u}-{v} is in no cluster"),
            Violation::RunningIntersection(v) => {
                write!(f, "clusters containing {v} are not connected")
            }
            Violation::WidthMismatch { stated, actual } => {
                write!(f, "stated width {stated} but largest cluster gives {actual}")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Elimination engine

/// Working graph for vertex elimination. Rows only mention alive nodes.
struct WorkGraph {
    adj: Vec<FixedBitSet>,
    alive: FixedBitSet,
}

impl WorkGraph {
    fn new(g: &Graph, alive: &FixedBitSet) -> Self {
        let adj = (0..g.node_count())
            .map(|i| {
                if alive.contains(i) {
                    let mut row = g.row(i).clone();
                    row.intersect_with(alive);
                    row
                } else {
                    FixedBitSet::with_capacity(g.node_count())
                }
            })
            .collect();
        WorkGraph {
            adj,
            alive: alive.clone(),
        }
    }

    fn fill(&self, v: usize) -> usize {
        let nv = &self.adj[v];
        let deg = nv.count_ones(..);
        let missing: usize = nv.ones().map(|u| nv.difference_count(&self.adj[u])).sum();
        // each u counts itself once; every missing pair is seen from both ends
        (missing - deg) / 2
    }

    /// Eliminates `v`: its neighbors become a clique and `v` disappears.
    /// Returns `{v} ∪ N(v)`.
    fn eliminate(&mut self, v: usize) -> FixedBitSet {
        let nv = std::mem::take(&mut self.adj[v]);
        for u in nv.ones() {
            let row = &mut self.adj[u];
            row.union_with(&nv);
            row.set(u, false);
            row.set(v, false);
        }
        self.alive.set(v, false);
        let mut clique = nv;
        clique.grow(self.alive.len());
        clique.insert(v);
        self.adj[v] = FixedBitSet::with_capacity(self.alive.len());
        clique
    }

    /// Deletes `v` without adding fill. Returns its former neighbors.
    fn delete(&mut self, v: usize) -> FixedBitSet {
        let nv = std::mem::replace(&mut self.adj[v], FixedBitSet::with_capacity(self.alive.len()));
        for u in nv.ones() {
            self.adj[u].set(v, false);
        }
        self.alive.set(v, false);
        nv
    }
}

/// Greedy min-fill elimination with cached fill counts.
pub(crate) struct MinFill {
    work: WorkGraph,
    fill: Vec<usize>,
}

impl MinFill {
    pub(crate) fn new(g: &Graph, alive: &FixedBitSet) -> Self {
        let work = WorkGraph::new(g, alive);
        let fill = (0..g.node_count())
            .map(|i| if alive.contains(i) { work.fill(i) } else { 0 })
            .collect();
        MinFill { work, fill }
    }

    /// Alive node with the fewest fill edges; ties go to the lowest index.
    pub(crate) fn next(&self) -> Option<usize> {
        self.work.alive.ones().min_by_key(|&i| (self.fill[i], i))
    }

    pub(crate) fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.work.adj[v]
    }

    pub(crate) fn alive(&self) -> &FixedBitSet {
        &self.work.alive
    }

    pub(crate) fn eliminate(&mut self, v: usize) -> FixedBitSet {
        let clique = self.work.eliminate(v);
        let mut nbrs = clique.clone();
        nbrs.set(v, false);
        // fill changes for N(v) and for anyone adjacent to two nodes of N(v)
        for x in self.work.alive.ones() {
            if nbrs.contains(x) || self.work.adj[x].intersection_count(&nbrs) >= 2 {
                self.fill[x] = self.work.fill(x);
            }
        }
        clique
    }

    pub(crate) fn delete(&mut self, v: usize) {
        let nbrs = self.work.delete(v);
        for x in nbrs.ones() {
            self.fill[x] = self.work.fill(x);
        }
    }
}

/// Result of eliminating the alive nodes of a graph.
#[derive(Clone, Debug)]
pub(crate) struct Elimination {
    pub order: Vec<usize>,
    pub cliques: Vec<FixedBitSet>,
}

pub(crate) fn eliminate_min_fill(g: &Graph, alive: &FixedBitSet) -> Elimination {
    let mut mf = MinFill::new(g, alive);
    let mut order = Vec::new();
    let mut cliques = Vec::new();
    while let Some(v) = mf.next() {
        cliques.push(mf.eliminate(v));
        order.push(v);
    }
    Elimination { order, cliques }
}

pub(crate) fn eliminate_along(g: &Graph, alive: &FixedBitSet, order: &[usize]) -> Elimination {
    let mut work = WorkGraph::new(g, alive);
    let cliques = order.iter().map(|&v| work.eliminate(v)).collect();
    Elimination {
        order: order.to_vec(),
        cliques,
    }
}

pub(crate) fn full_mask(n: usize) -> FixedBitSet {
    let mut m = FixedBitSet::with_capacity(n);
    m.insert_range(..);
    m
}

/// Reduces elimination cliques to the maximal ones and links them into a
/// tree. Returns the kept positions (ascending) and tree edges between
/// indexes into that list.
///
/// Each clique hangs off the clique of its earliest later neighbor. A
/// non-maximal clique always equals the separator of one of its children, so
/// contracting it into that child keeps the tree valid. Components are
/// chained through their roots.
pub(crate) fn clique_tree(elim: &Elimination) -> (Vec<usize>, Vec<(usize, usize)>) {
    let len = elim.order.len();
    if len == 0 {
        return (Vec::new(), Vec::new());
    }
    let n = elim.cliques[0].len();
    let mut pos = vec![usize::MAX; n];
    for (k, &v) in elim.order.iter().enumerate() {
        pos[v] = k;
    }
    let parent: Vec<Option<usize>> = elim
        .order
        .iter()
        .zip(&elim.cliques)
        .map(|(&v, c)| c.ones().filter(|&u| u != v).map(|u| pos[u]).min())
        .collect();

    let sizes: Vec<usize> = elim.cliques.iter().map(|c| c.count_ones(..)).collect();
    let mut absorber = vec![usize::MAX; len];
    for k in 0..len {
        if let Some(p) = parent[k] {
            if sizes[k] == sizes[p] + 1 && absorber[p] == usize::MAX {
                absorber[p] = k;
            }
        }
    }
    let mut rep = vec![0usize; len];
    for k in 0..len {
        rep[k] = if absorber[k] == usize::MAX { k } else { rep[absorber[k]] };
    }
    let kept: Vec<usize> = (0..len).filter(|&k| absorber[k] == usize::MAX).collect();
    let mut slot = vec![usize::MAX; len];
    for (i, &k) in kept.iter().enumerate() {
        slot[k] = i;
    }

    let mut edges = Vec::new();
    let mut roots = Vec::new();
    for k in 0..len {
        match parent[k] {
            Some(p) => {
                let (a, b) = (slot[rep[k]], slot[rep[p]]);
                if a != b {
                    edges.push((a.min(b), a.max(b)));
                }
            }
            None => roots.push(slot[rep[k]]),
        }
    }
    for w in roots.windows(2) {
        edges.push((w[0].min(w[1]), w[0].max(w[1])));
    }
    edges.sort_unstable();
    (kept, edges)
}

pub(crate) fn decomposition_from(g: &Graph, elim: &Elimination) -> TreeDecomposition {
    let (kept, edges) = clique_tree(elim);
    let clusters = kept.iter().map(|&k| g.ids_of(&elim.cliques[k])).collect();
    TreeDecomposition::new(clusters, edges)
}

fn order_indexes(g: &Graph, ord: &EliminationOrder) -> Result<Vec<usize>> {
    if ord.0.len() != g.node_count() {
        return Err(Error::argument(format!(
            "order has {} nodes but graph has {}",
            ord.0.len(),
            g.node_count()
        )));
    }
    let mut seen = FixedBitSet::with_capacity(g.node_count());
    ord.0
        .iter()
        .map(|&v| {
            let i = g.index_of(v).ok_or(Error::UnknownNode(v))?;
            if seen.put(i) {
                return Err(Error::argument(format!("node {v} appears twice in order")));
            }
            Ok(i)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Public operations

/// Greedy min-fill order: fewest fill edges first, ties to the lowest id.
pub fn min_fill_order(g: &Graph) -> EliminationOrder {
    let elim = eliminate_min_fill(g, &full_mask(g.node_count()));
    EliminationOrder(elim.order.into_iter().map(|i| g.id(i)).collect())
}

/// `g` plus every fill edge created by eliminating along `ord`.
pub fn triangulate(g: &Graph, ord: &EliminationOrder) -> Result<Graph> {
    let order = order_indexes(g, ord)?;
    let elim = eliminate_along(g, &full_mask(g.node_count()), &order);
    let mut out = g.clone();
    for c in &elim.cliques {
        let members: Vec<usize> = c.ones().collect();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                out.add_edge(g.id(a), g.id(b))?;
            }
        }
    }
    Ok(out)
}

/// Cluster tree whose clusters are the maximal cliques of the triangulation
/// induced by `ord`.
pub fn build_decomposition(g: &Graph, ord: &EliminationOrder) -> Result<TreeDecomposition> {
    let order = order_indexes(g, ord)?;
    let elim = eliminate_along(g, &full_mask(g.node_count()), &order);
    Ok(decomposition_from(g, &elim))
}

/// Decomposition from the min-fill order.
pub fn min_fill_decomposition(g: &Graph) -> TreeDecomposition {
    let elim = eliminate_min_fill(g, &full_mask(g.node_count()));
    decomposition_from(g, &elim)
}

/// Width of the min-fill decomposition; an upper bound on treewidth.
pub fn width_of(g: &Graph) -> usize {
    width_of_masked(g, &full_mask(g.node_count()))
}

pub(crate) fn width_of_masked(g: &Graph, alive: &FixedBitSet) -> usize {
    let mut mf = MinFill::new(g, alive);
    let mut width = 0;
    while let Some(v) = mf.next() {
        width = width.max(mf.neighbors(v).count_ones(..));
        mf.eliminate(v);
    }
    width
}

/// Checks `td` against `g`: single tree, node and edge coverage, running
/// intersection, and the stated width.
pub fn check_decomposition(td: &TreeDecomposition, g: &Graph) -> std::result::Result<(), Violation> {
    let k = td.clusters.len();
    if !is_tree(k, &td.tree_edges) || (k == 0 && !g.is_empty()) {
        return Err(Violation::NotATree);
    }
    let n = g.node_count();
    let mut member: Vec<FixedBitSet> = Vec::with_capacity(k);
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ci, cluster) in td.clusters.iter().enumerate() {
        let mut set = FixedBitSet::with_capacity(n);
        for &v in cluster {
            let i = g.index_of(v).ok_or(Violation::UnknownNode(v))?;
            set.insert(i);
            holders[i].push(ci);
        }
        member.push(set);
    }
    if let Some(i) = holders.iter().position(Vec::is_empty) {
        return Err(Violation::UncoveredNode(g.id(i)));
    }
    for (u, v) in g.edges() {
        let (a, b) = (g.index_of(u).unwrap(), g.index_of(v).unwrap());
        if !holders[a].iter().any(|&c| member[c].contains(b)) {
            return Err(Violation::UncoveredEdge(u, v));
        }
    }
    let mut tree_adj: Vec<Vec<usize>> = vec![Vec::new(); k];
    for &(a, b) in &td.tree_edges {
        tree_adj[a].push(b);
        tree_adj[b].push(a);
    }
    for (i, held) in holders.iter().enumerate() {
        if !connected_within(&tree_adj, held, |c| member[c].contains(i)) {
            return Err(Violation::RunningIntersection(g.id(i)));
        }
    }
    let actual = width_of_clusters(&td.clusters);
    if td.width != actual {
        return Err(Violation::WidthMismatch {
            stated: td.width,
            actual,
        });
    }
    Ok(())
}

pub fn verify_decomposition(td: &TreeDecomposition, g: &Graph) -> bool {
    check_decomposition(td, g).is_ok()
}

fn is_tree(k: usize, edges: &[(usize, usize)]) -> bool {
    if k == 0 {
        return edges.is_empty();
    }
    if edges.len() != k - 1 {
        return false;
    }
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in edges {
        if a >= k || b >= k {
            return false;
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

fn connected_within(tree_adj: &[Vec<usize>], nodes: &[usize], inside: impl Fn(usize) -> bool) -> bool {
    let Some(&start) = nodes.first() else {
        return true;
    };
    let mut seen = vec![false; tree_adj.len()];
    seen[start] = true;
    let mut stack = vec![start];
    let mut reached = 1;
    while let Some(c) = stack.pop() {
        for &d in &tree_adj[c] {
            if !seen[d] && inside(d) {
                seen[d] = true;
                reached += 1;
                stack.push(d);
            }
        }
    }
    reached == nodes.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> Vec<NodeId> {
        v.iter().map(|&x| NodeId(x)).collect()
    }

    fn cycle(n: u32) -> Graph {
        let edges: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n as usize, &edges).unwrap()
    }

    fn complete(n: u32) -> Graph {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        Graph::from_edges(n as usize, &edges).unwrap()
    }

    #[test]
    fn min_fill_path_is_lexicographic() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(min_fill_order(&g).0, ids(&[0, 1, 2]));
    }

    #[test]
    fn min_fill_four_cycle() {
        let g = cycle(4);
        let ord = min_fill_order(&g);
        assert_eq!(ord.0[0], NodeId(0));
        let tri = triangulate(&g, &ord).unwrap();
        assert!(tri.has_edge(NodeId(1), NodeId(3)));
        assert_eq!(tri.edge_count(), 5);
    }

    #[test]
    fn complete_graph_needs_no_fill() {
        let g = complete(4);
        let ord = min_fill_order(&g);
        assert_eq!(triangulate(&g, &ord).unwrap(), g);
        let td = build_decomposition(&g, &ord).unwrap();
        assert_eq!(td.clusters, vec![ids(&[0, 1, 2, 3])]);
        assert_eq!(td.width, 3);
    }

    #[test]
    fn five_cycle_gets_two_chords() {
        let g = cycle(5);
        let tri = triangulate(&g, &min_fill_order(&g)).unwrap();
        assert_eq!(tri.edge_count(), 7);
    }

    #[test]
    fn four_cycle_decomposition() {
        let g = cycle(4);
        let td = build_decomposition(&g, &EliminationOrder(ids(&[0, 1, 2, 3]))).unwrap();
        assert_eq!(td.clusters, vec![ids(&[0, 1, 3]), ids(&[1, 2, 3])]);
        assert_eq!(td.tree_edges, vec![(0, 1)]);
        assert_eq!(td.width, 2);
        assert!(verify_decomposition(&td, &g));
    }

    #[test]
    fn single_edge_decomposition() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let td = min_fill_decomposition(&g);
        assert_eq!(td.clusters, vec![ids(&[0, 1])]);
        assert_eq!(td.width, 1);
    }

    #[test]
    fn widths_of_simple_graphs() {
        assert_eq!(width_of(&Graph::with_nodes(4)), 0);
        assert_eq!(width_of(&Graph::from_edges(4, &[(0, 1), (1, 2), (1, 3)]).unwrap()), 1);
        assert_eq!(width_of(&cycle(4)), 2);
        assert_eq!(width_of(&Graph::with_nodes(0)), 0);
    }

    #[test]
    fn disconnected_components_are_chained() {
        let g = Graph::from_edges(5, &[(0, 1), (2, 3)]).unwrap();
        let td = min_fill_decomposition(&g);
        assert_eq!(td.clusters.len(), 3);
        assert!(verify_decomposition(&td, &g));
    }

    #[test]
    fn detects_uncovered_edge() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        let td = TreeDecomposition::new(vec![ids(&[0, 1]), ids(&[2, 3])], vec![(0, 1)]);
        assert_eq!(
            check_decomposition(&td, &g),
            Err(Violation::UncoveredEdge(NodeId(1), NodeId(2)))
        );
    }

    #[test]
    fn detects_running_intersection() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let td = TreeDecomposition::new(vec![ids(&[0, 1]), ids(&[1, 2]), ids(&[0, 2])], vec![(0, 1), (1, 2)]);
        assert_eq!(
            check_decomposition(&td, &g),
            Err(Violation::RunningIntersection(NodeId(0)))
        );
    }

    #[test]
    fn detects_non_tree_and_bad_width() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let cyclic = TreeDecomposition::new(vec![ids(&[0, 1]), ids(&[1, 2])], vec![(0, 1), (0, 1)]);
        assert_eq!(check_decomposition(&cyclic, &g), Err(Violation::NotATree));
        let mut td = TreeDecomposition::new(vec![ids(&[0, 1]), ids(&[1, 2])], vec![(0, 1)]);
        td.width = 2;
        assert!(matches!(
            check_decomposition(&td, &g),
            Err(Violation::WidthMismatch { .. })
        ));
    }

    #[test]
    fn order_mismatch_rejected() {
        let g = cycle(4);
        assert!(triangulate(&g, &EliminationOrder(ids(&[0, 1, 2]))).is_err());
        assert!(build_decomposition(&g, &EliminationOrder(ids(&[0, 1, 2, 2]))).is_err());
    }

    #[test]
    fn cached_fill_matches_recomputation() {
        // min-fill with the incremental cache must agree with a naive rescan
        let g = Graph::from_edges(
            8,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 6),
                (6, 7),
                (7, 0),
                (0, 4),
                (2, 6),
                (1, 5),
            ],
        )
        .unwrap();
        let alive = full_mask(8);
        let mut mf = MinFill::new(&g, &alive);
        let mut naive = WorkGraph::new(&g, &alive);
        while let Some(v) = mf.next() {
            let expect = naive.alive.ones().min_by_key(|&i| (naive.fill(i), i)).unwrap();
            assert_eq!(v, expect);
            mf.eliminate(v);
            naive.eliminate(v);
        }
    }
}
