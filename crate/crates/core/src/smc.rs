//! Weighted set multi-cover and its correspondence with w-cutsets of a tree
//! decomposition.
//!
//! In one direction every oversized cluster becomes an element that must be
//! covered `|V_i| - (w + 1)` times, and every node becomes the set of
//! oversized clusters containing it. In the other direction a multi-cover
//! instance is turned into a star-shaped decomposition padded with dummy
//! nodes, whose minimum w-cutsets are exactly the minimum covers.

use std::collections::BTreeMap;
use std::fmt;

use crate::cutset::CostModel;
use crate::decomposition::TreeDecomposition;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetId(pub u32);

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for SetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverSet {
    pub id: SetId,
    /// Ascending, no repeats.
    pub members: Vec<ElementId>,
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmcInstance {
    /// Ascending.
    pub universe: Vec<ElementId>,
    pub requirement: BTreeMap<ElementId, u32>,
    /// Ascending by id.
    pub sets: Vec<CoverSet>,
}

impl SmcInstance {
    /// Validates ids, requirements (≥ 1) and costs (> 0). Feasibility is not
    /// required here; see [`SmcInstance::is_feasible`].
    pub fn new(universe: Vec<ElementId>, requirement: BTreeMap<ElementId, u32>, sets: Vec<CoverSet>) -> Result<Self> {
        let mut universe = universe;
        universe.sort_unstable();
        if universe.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::argument("duplicate element"));
        }
        for e in &universe {
            match requirement.get(e) {
                Some(&r) if r >= 1 => {}
                _ => {
                    return Err(Error::argument(format!(
                        "element {e} needs a requirement of at least 1"
                    )))
                }
            }
        }
        if let Some(e) = requirement.keys().find(|e| universe.binary_search(e).is_err()) {
            return Err(Error::argument(format!("requirement for unknown element {e}")));
        }
        let mut sets = sets;
        sets.sort_by_key(|s| s.id);
        if sets.windows(2).any(|w| w[0].id == w[1].id) {
            return Err(Error::argument("duplicate set id"));
        }
        for s in &mut sets {
            if !(s.cost.is_finite() && s.cost > 0.0) {
                return Err(Error::argument(format!("set {} must have positive cost", s.id)));
            }
            s.members.sort_unstable();
            s.members.dedup();
            if let Some(e) = s.members.iter().find(|e| universe.binary_search(e).is_err()) {
                return Err(Error::argument(format!("set {} mentions unknown element {e}", s.id)));
            }
        }
        Ok(SmcInstance {
            universe,
            requirement,
            sets,
        })
    }

    pub fn requirement(&self, e: ElementId) -> u32 {
        self.requirement.get(&e).copied().unwrap_or(0)
    }

    pub(crate) fn element_index(&self, e: ElementId) -> Option<usize> {
        self.universe.binary_search(&e).ok()
    }

    fn set_index(&self, s: SetId) -> Option<usize> {
        self.sets.binary_search_by_key(&s, |c| c.id).ok()
    }

    /// Every element lies in at least as many sets as it must be covered.
    pub fn is_feasible(&self) -> bool {
        let mut available = vec![0u32; self.universe.len()];
        for s in &self.sets {
            for e in &s.members {
                available[self.element_index(*e).unwrap()] += 1;
            }
        }
        self.universe
            .iter()
            .zip(&available)
            .all(|(e, &a)| a >= self.requirement(*e))
    }

    pub fn is_unit_cost(&self) -> bool {
        self.sets.iter().all(|s| s.cost == 1.0)
    }

    pub fn cost_of(&self, cover: &[SetId]) -> Result<f64> {
        cover
            .iter()
            .map(|&s| self.set_index(s).map(|j| self.sets[j].cost))
            .sum::<Option<f64>>()
            .ok_or_else(|| Error::argument("unknown set in cover"))
    }
}

/// Each element is covered at least its requirement times. Repeated ids in
/// `cover` count once.
pub fn verify_cover(inst: &SmcInstance, cover: &[SetId]) -> Result<bool> {
    let mut chosen = vec![false; inst.sets.len()];
    for &s in cover {
        let j = inst
            .set_index(s)
            .ok_or_else(|| Error::argument(format!("unknown set {s}")))?;
        chosen[j] = true;
    }
    let mut count = vec![0u32; inst.universe.len()];
    for (j, s) in inst.sets.iter().enumerate() {
        if chosen[j] {
            for e in &s.members {
                count[inst.element_index(*e).unwrap()] += 1;
            }
        }
    }
    Ok(inst
        .universe
        .iter()
        .zip(&count)
        .all(|(e, &c)| c >= inst.requirement(*e)))
}

pub fn greedy_smc(inst: &SmcInstance) -> Result<Vec<SetId>> {
    greedy_smc_by(inst, |_| 0)
}

/// Greedy multi-cover: repeatedly take the unused set minimizing
/// `cost / (#live elements it contains)`, where an element is live while it
/// is covered fewer times than required. Ties prefer the higher `priority`,
/// then the lower id. Returns the sets in selection order.
pub fn greedy_smc_by(inst: &SmcInstance, priority: impl Fn(SetId) -> u64) -> Result<Vec<SetId>> {
    if !inst.is_feasible() {
        return Err(Error::argument("instance is infeasible"));
    }
    let members: Vec<Vec<usize>> = inst
        .sets
        .iter()
        .map(|s| s.members.iter().map(|e| inst.element_index(*e).unwrap()).collect())
        .collect();
    let mut deficit: Vec<u32> = inst.universe.iter().map(|e| inst.requirement(*e)).collect();
    let mut used = vec![false; inst.sets.len()];
    let mut cover = Vec::new();
    while deficit.iter().any(|&d| d > 0) {
        let live = |j: usize| members[j].iter().filter(|&&e| deficit[e] > 0).count();
        let best = (0..inst.sets.len())
            .filter(|&j| !used[j])
            .map(|j| (j, live(j)))
            .filter(|&(_, f)| f > 0)
            .min_by(|&(a, fa), &(b, fb)| {
                let (ca, cb) = (inst.sets[a].cost, inst.sets[b].cost);
                (ca * fb as f64)
                    .total_cmp(&(cb * fa as f64))
                    .then_with(|| priority(inst.sets[b].id).cmp(&priority(inst.sets[a].id)))
                    .then_with(|| a.cmp(&b))
            })
            .map(|(j, _)| j)
            .expect("feasible instance always has a useful set");
        used[best] = true;
        for &e in &members[best] {
            deficit[e] = deficit[e].saturating_sub(1);
        }
        cover.push(inst.sets[best].id);
    }
    Ok(cover)
}

/// Multi-cover view of a decomposition: element `i` is cluster `i` (kept
/// only if larger than `w + 1`, with requirement `|V_i| - (w + 1)`), and set
/// `v` holds the oversized clusters containing node `v`, at `v`'s cost.
pub fn td_to_smc(td: &TreeDecomposition, w: usize, g: &Graph, cm: CostModel) -> Result<SmcInstance> {
    if w < 1 {
        return Err(Error::argument("w must be at least 1"));
    }
    let mut requirement = BTreeMap::new();
    let mut holds: BTreeMap<NodeId, Vec<ElementId>> = g.nodes().iter().map(|&v| (v, Vec::new())).collect();
    for (i, cluster) in td.clusters.iter().enumerate() {
        for &v in cluster {
            if !g.contains(v) {
                return Err(Error::UnknownNode(v));
            }
        }
        if cluster.len() > w + 1 {
            let e = ElementId(i as u32);
            requirement.insert(e, (cluster.len() - (w + 1)) as u32);
            for &v in cluster {
                holds.get_mut(&v).unwrap().push(e);
            }
        }
    }
    let sets = holds
        .into_iter()
        .map(|(v, members)| CoverSet {
            id: SetId(v.0),
            members,
            cost: cm.cost_of(g, g.index_of(v).unwrap()),
        })
        .collect();
    SmcInstance::new(requirement.keys().copied().collect(), requirement, sets)
}

pub fn cover_to_nodes(cover: &[SetId]) -> Vec<NodeId> {
    let mut nodes: Vec<NodeId> = cover.iter().map(|s| NodeId(s.0)).collect();
    nodes.sort_unstable();
    nodes
}

pub fn nodes_to_cover(nodes: &[NodeId]) -> Vec<SetId> {
    let mut cover: Vec<SetId> = nodes.iter().map(|v| SetId(v.0)).collect();
    cover.sort_unstable();
    cover
}

/// Star-shaped decomposition built from a unit-cost multi-cover instance.
///
/// Node `j` stands for the `j`-th set (in ascending id order); dummy nodes
/// follow. Clusters are the element clusters in universe order, then the
/// hub holding every set node.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedDecomposition {
    pub decomposition: TreeDecomposition,
    pub set_nodes: Vec<SetId>,
    pub dummy_nodes: Vec<Vec<NodeId>>,
    pub w: usize,
    pub k: usize,
}

impl AugmentedDecomposition {
    pub fn hub(&self) -> usize {
        self.decomposition.clusters.len() - 1
    }

    pub fn is_set_node(&self, v: NodeId) -> bool {
        (v.0 as usize) < self.set_nodes.len()
    }

    pub fn nodes_of(&self, cover: &[SetId]) -> Result<Vec<NodeId>> {
        let mut nodes = cover
            .iter()
            .map(|s| {
                self.set_nodes
                    .binary_search(s)
                    .map(|j| NodeId(j as u32))
                    .map_err(|_| Error::argument(format!("unknown set {s}")))
            })
            .collect::<Result<Vec<_>>>()?;
        nodes.sort_unstable();
        nodes.dedup();
        Ok(nodes)
    }

    /// Replaces every dummy node in a w-cutset by a set node of the same
    /// element cluster that is not yet in the cutset (or drops it when the
    /// cluster has none left). The result is a w-cutset no larger than the
    /// input and made of set nodes only.
    pub fn repair(&self, cutset: &[NodeId]) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = cutset.iter().copied().filter(|&v| self.is_set_node(v)).collect();
        out.sort_unstable();
        out.dedup();
        for (i, dummies) in self.dummy_nodes.iter().enumerate() {
            let hits = dummies.iter().filter(|d| cutset.contains(d)).count();
            for _ in 0..hits {
                let spare = self.decomposition.clusters[i]
                    .iter()
                    .copied()
                    .filter(|&v| self.is_set_node(v))
                    .find(|v| out.binary_search(v).is_err());
                if let Some(v) = spare {
                    let at = out.binary_search(&v).unwrap_err();
                    out.insert(at, v);
                }
            }
        }
        out
    }

    /// Cover corresponding to a w-cutset, after [`repair`](Self::repair).
    pub fn cover_of(&self, cutset: &[NodeId]) -> Vec<SetId> {
        self.repair(cutset)
            .into_iter()
            .map(|v| self.set_nodes[v.0 as usize])
            .collect()
    }
}

/// Builds the padded star decomposition: `w = |S| - 1 - min r_i`, element
/// cluster `i` holds the sets covering it plus `r_i + w + 1 - |V_i|` dummy
/// nodes, and every element cluster hangs off the hub. A cover of size `k`
/// exists iff the result has a w-cutset of size `k`.
pub fn smc_to_augmented_td(inst: &SmcInstance, k: usize) -> Result<AugmentedDecomposition> {
    if !inst.is_feasible() {
        return Err(Error::argument("instance is infeasible"));
    }
    if !inst.is_unit_cost() {
        return Err(Error::argument("the reduction is defined for unit-cost sets only"));
    }
    let m = inst.sets.len();
    let min_r = inst
        .universe
        .iter()
        .map(|e| inst.requirement(*e) as usize)
        .min()
        .ok_or_else(|| Error::argument("empty universe"))?;
    let w = (m - 1)
        .checked_sub(min_r)
        .filter(|&w| w >= 1)
        .ok_or_else(|| Error::argument(format!("reduction gives w = {} < 1", m as i64 - 1 - min_r as i64)))?;

    let mut clusters: Vec<Vec<NodeId>> = Vec::with_capacity(inst.universe.len() + 1);
    let mut dummy_nodes = Vec::with_capacity(inst.universe.len());
    let mut next = m as u32;
    for &e in &inst.universe {
        let mut cluster: Vec<NodeId> = inst
            .sets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.members.binary_search(&e).is_ok())
            .map(|(j, _)| NodeId(j as u32))
            .collect();
        let target = inst.requirement(e) as usize + w + 1;
        let pad = target - cluster.len();
        let dummies: Vec<NodeId> = (next..next + pad as u32).map(NodeId).collect();
        next += pad as u32;
        cluster.extend(&dummies);
        clusters.push(cluster);
        dummy_nodes.push(dummies);
    }
    clusters.push((0..m as u32).map(NodeId).collect());
    let hub = clusters.len() - 1;
    let tree_edges = (0..hub).map(|i| (i, hub)).collect();
    Ok(AugmentedDecomposition {
        decomposition: TreeDecomposition::new(clusters, tree_edges),
        set_nodes: inst.sets.iter().map(|s| s.id).collect(),
        dummy_nodes,
        w,
        k,
    })
}
