//! Brute-force ground truth for small instances. These routines are test
//! instruments: exponential by construction and capped by [`OracleLimits`].

use fixedbitset::FixedBitSet;

use crate::cutset::{Algorithm, CostModel, Cutset};
use crate::decomposition::{decomposition_from, eliminate_along, TreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::smc::{SetId, SmcInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_nodes_treewidth: usize,
    pub max_nodes_cutset: usize,
    pub max_sets_smc: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_nodes_treewidth: 18,
            max_nodes_cutset: 14,
            max_sets_smc: 20,
        }
    }
}

fn capacity(what: &'static str, size: usize, limit: usize) -> Result<()> {
    if size > limit {
        Err(Error::Capacity { what, size, limit })
    } else {
        Ok(())
    }
}

/// Adjacency of the alive part of `g` as compact `u32` masks, plus the map
/// back to local indexes.
fn compact(g: &Graph, alive: &FixedBitSet) -> (Vec<u32>, Vec<usize>) {
    let keep: Vec<usize> = alive.ones().collect();
    let mut slot = vec![usize::MAX; g.node_count()];
    for (k, &i) in keep.iter().enumerate() {
        slot[i] = k;
    }
    let adj = keep
        .iter()
        .map(|&i| {
            g.row(i)
                .ones()
                .filter(|&j| slot[j] != usize::MAX)
                .fold(0u32, |m, j| m | (1 << slot[j]))
        })
        .collect();
    (adj, keep)
}

/// Number of nodes outside `eliminated ∪ {v}` reachable from `v` through
/// `eliminated`: the degree of `v` when it is eliminated after that set.
fn back_degree(adj: &[u32], eliminated: u32, v: usize) -> u32 {
    let mut comp = 1u32 << v;
    let mut frontier = comp;
    let mut boundary = 0u32;
    while frontier != 0 {
        let mut next = 0u32;
        let mut f = frontier;
        while f != 0 {
            let u = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[u];
        }
        boundary |= next;
        next &= eliminated & !comp;
        comp |= next;
        frontier = next;
    }
    (boundary & !comp & !eliminated).count_ones()
}

/// Subset dynamic program over elimination prefixes. Returns the treewidth
/// and an optimal order (compact indexes, first eliminated first).
fn treewidth_dp(adj: &[u32]) -> (usize, Vec<usize>) {
    let k = adj.len();
    if k == 0 {
        return (0, Vec::new());
    }
    let full = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
    let mut best = vec![u8::MAX; 1 << k];
    let mut last = vec![0u8; 1 << k];
    best[0] = 0;
    for s in 1..=full {
        let mut bits = s;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let rest = s & !(1 << v);
            let here = back_degree(adj, rest, v) as u8;
            let cand = best[rest as usize].max(here);
            if cand < best[s as usize] {
                best[s as usize] = cand;
                last[s as usize] = v as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(k);
    let mut s = full;
    while s != 0 {
        let v = last[s as usize] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    (best[full as usize] as usize, order)
}

pub fn exact_treewidth(g: &Graph) -> Result<usize> {
    exact_treewidth_with(g, &OracleLimits::default())
}

/// Exact treewidth by dynamic programming over vertex subsets.
pub fn exact_treewidth_with(g: &Graph, limits: &OracleLimits) -> Result<usize> {
    capacity("nodes", g.node_count(), limits.max_nodes_treewidth)?;
    let alive = crate::decomposition::full_mask(g.node_count());
    let (adj, _) = compact(g, &alive);
    Ok(treewidth_dp(&adj).0)
}

/// Exact treewidth of the alive part together with an optimal order in
/// local indexes.
pub(crate) fn optimal_order(g: &Graph, alive: &FixedBitSet) -> (usize, Vec<usize>) {
    let (adj, keep) = compact(g, alive);
    let (tw, order) = treewidth_dp(&adj);
    (tw, order.into_iter().map(|k| keep[k]).collect())
}

/// Minimum-cost w-cutset by exhaustive enumeration: candidates are visited
/// by nondecreasing cost, then lexicographically, and the first one whose
/// removal leaves treewidth at most `w` is returned.
pub fn exact_min_wcutset(g: &Graph, w: usize, cm: CostModel) -> Result<Cutset> {
    exact_min_wcutset_with(g, w, cm, &OracleLimits::default())
}

pub fn exact_min_wcutset_with(g: &Graph, w: usize, cm: CostModel, limits: &OracleLimits) -> Result<Cutset> {
    if w < 1 {
        return Err(Error::argument("w must be at least 1"));
    }
    let n = g.node_count();
    capacity("nodes", n, limits.max_nodes_cutset)?;
    let costs = cm.costs(g);
    let mut candidates: Vec<(f64, Vec<usize>)> = (0u32..1 << n)
        .map(|m| {
            let members: Vec<usize> = (0..n).filter(|&i| m & (1 << i) != 0).collect();
            (members.iter().map(|&i| costs[i]).sum(), members)
        })
        .collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));

    for (cost, members) in candidates {
        let mut alive = crate::decomposition::full_mask(n);
        for &i in &members {
            alive.set(i, false);
        }
        let (tw, order) = optimal_order(g, &alive);
        if tw <= w {
            let residual = decomposition_from(g, &eliminate_along(g, &alive, &order));
            return Ok(Cutset {
                members: members.iter().map(|&i| g.id(i)).collect(),
                target_w: w,
                cost,
                algorithm: Algorithm::Exact,
                residual,
            });
        }
    }
    unreachable!("removing every node leaves treewidth 0")
}

/// Minimum-size w-cutset of a decomposition (every cluster keeps at most
/// `w + 1` nodes), by enumeration over subsets of increasing size. Only
/// nodes of oversized clusters are candidates.
pub fn exact_min_wcutset_td(td: &TreeDecomposition, w: usize, limits: &OracleLimits) -> Result<Vec<NodeId>> {
    let limit = w + 1;
    let mut candidates: Vec<NodeId> = td
        .clusters
        .iter()
        .filter(|c| c.len() > limit)
        .flatten()
        .copied()
        .collect();
    candidates.sort_unstable();
    candidates.dedup();
    capacity("candidate nodes", candidates.len(), limits.max_sets_smc)?;
    let clusters: Vec<u32> = td
        .clusters
        .iter()
        .filter(|c| c.len() > limit)
        .map(|c| {
            c.iter()
                .filter_map(|v| candidates.binary_search(v).ok())
                .fold(0u32, |m, i| m | (1 << i))
        })
        .collect();
    let sizes: Vec<usize> = td.clusters.iter().filter(|c| c.len() > limit).map(Vec::len).collect();
    let k = candidates.len();
    for size in 0..=k {
        let mut found = None;
        for_each_combination(k, size, |mask| {
            let ok = clusters
                .iter()
                .zip(&sizes)
                .all(|(&c, &len)| len - (c & mask).count_ones() as usize <= limit);
            if ok {
                found = Some(mask);
            }
            ok
        });
        if let Some(mask) = found {
            return Ok((0..k)
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| candidates[i])
                .collect());
        }
    }
    unreachable!("removing every candidate satisfies all clusters")
}

/// Visits `size`-subsets of `0..k` in lexicographic order until `visit`
/// returns true.
fn for_each_combination(k: usize, size: usize, mut visit: impl FnMut(u32) -> bool) {
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        let mask = idx.iter().fold(0u32, |m, &i| m | (1 << i));
        if visit(mask) {
            return;
        }
        let mut i = size;
        while i > 0 && idx[i - 1] == k - size + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..size {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn exact_min_cover(inst: &SmcInstance) -> Result<Vec<SetId>> {
    exact_min_cover_with(inst, &OracleLimits::default())
}

/// Minimum-cost multi-cover by branch and bound over the sets in ascending
/// id order. Among equal-cost optima the lexicographically smallest id
/// vector wins.
pub fn exact_min_cover_with(inst: &SmcInstance, limits: &OracleLimits) -> Result<Vec<SetId>> {
    capacity("sets", inst.sets.len(), limits.max_sets_smc)?;
    if !inst.is_feasible() {
        return Err(Error::argument("instance is infeasible"));
    }
    let elements = inst.universe.len();
    let member_idx: Vec<Vec<usize>> = inst
        .sets
        .iter()
        .map(|s| s.members.iter().map(|e| inst.element_index(*e).unwrap()).collect())
        .collect();
    // remaining[j][e]: coverage of e available from sets j..
    let mut remaining = vec![vec![0u32; elements]; inst.sets.len() + 1];
    for j in (0..inst.sets.len()).rev() {
        remaining[j] = remaining[j + 1].clone();
        for &e in &member_idx[j] {
            remaining[j][e] += 1;
        }
    }
    let deficit: Vec<u32> = inst.universe.iter().map(|e| inst.requirement(*e)).collect();

    struct Search<'a> {
        costs: Vec<f64>,
        members: &'a [Vec<usize>],
        remaining: &'a [Vec<u32>],
        best: Option<(f64, Vec<usize>)>,
    }
    impl Search<'_> {
        fn better(&self, cost: f64, chosen: &[usize]) -> bool {
            match &self.best {
                None => true,
                Some((bc, bv)) => {
                    let tol = 1e-9 * bc.abs().max(1.0);
                    cost < bc - tol || ((cost - bc).abs() <= tol && chosen < bv.as_slice())
                }
            }
        }
        fn go(&mut self, j: usize, cost: f64, chosen: &mut Vec<usize>, deficit: &mut [u32]) {
            if deficit.iter().all(|&d| d == 0) {
                if self.better(cost, chosen) {
                    self.best = Some((cost, chosen.clone()));
                }
                return;
            }
            if j == self.costs.len() {
                return;
            }
            if let Some((bc, _)) = &self.best {
                if cost > bc + 1e-9 * bc.abs().max(1.0) {
                    return;
                }
            }
            if deficit.iter().zip(&self.remaining[j]).any(|(&d, &r)| r < d) {
                return;
            }
            chosen.push(j);
            let touched: Vec<usize> = self.members[j].iter().copied().filter(|&e| deficit[e] > 0).collect();
            for &e in &touched {
                deficit[e] -= 1;
            }
            self.go(j + 1, cost + self.costs[j], chosen, deficit);
            for &e in &touched {
                deficit[e] += 1;
            }
            chosen.pop();
            self.go(j + 1, cost, chosen, deficit);
        }
    }
    let mut search = Search {
        costs: inst.sets.iter().map(|s| s.cost).collect(),
        members: &member_idx,
        remaining: &remaining,
        best: None,
    };
    let mut deficit = deficit;
    search.go(0, 0.0, &mut Vec::new(), &mut deficit);
    let (_, best) = search.best.expect("feasible instance has a cover");
    Ok(best.into_iter().map(|j| inst.sets[j].id).collect())
}
