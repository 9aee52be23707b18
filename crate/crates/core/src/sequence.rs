//! The w-cutset sequence of a graph and the time/space trade-off it exposes.
//!
//! For each `w` the profile value `f(w) = |C_w| + w` is the exponent of the
//! time bound of conditioning on `C_w`, while `w` itself bounds space.

use crate::cutset::{find_wcutset, gwc, Algorithm, CostModel, Cutset};
use crate::decomposition::{min_fill_decomposition, width_of};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::oracle::{exact_min_wcutset, exact_treewidth};
use crate::par::{self, Execution};

#[derive(Clone, Debug, PartialEq)]
pub struct SequenceEntry {
    pub w: usize,
    pub cutset: Cutset,
    pub f: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutsetSequence {
    pub entries: Vec<SequenceEntry>,
    pub algorithm: Algorithm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProfilePoint {
    pub w: usize,
    pub f: usize,
    /// `f(w) == f(w + 1)`: this `w` gives the same time bound in less space.
    pub preferred_over_next: bool,
    /// `f(w)` equals the value at a neighboring `w`.
    pub on_plateau: bool,
}

pub fn cutset_sequence(g: &Graph, algorithm: Algorithm, cm: CostModel) -> Result<CutsetSequence> {
    cutset_sequence_with(g, algorithm, cm, Execution::default())
}

/// Runs `algorithm` independently for every `w` from 1 to the min-fill width
/// of `g` (at least one entry).
pub fn cutset_sequence_with(g: &Graph, algorithm: Algorithm, cm: CostModel, exec: Execution) -> Result<CutsetSequence> {
    if algorithm == Algorithm::Exact {
        // fail fast rather than per entry
        exact_treewidth(g)?;
    }
    let top = width_of(g).max(1);
    let ws: Vec<usize> = (1..=top).collect();
    let td = min_fill_decomposition(g);
    let results = par::map(exec, &ws, |&w| match algorithm {
        Algorithm::Gwc | Algorithm::Gwca | Algorithm::Gwcm | Algorithm::Gwcd => gwc(g, &td, w, cm, algorithm),
        Algorithm::Exact => exact_min_wcutset(g, w, cm),
        _ => find_wcutset(g, w, cm, algorithm),
    });
    let entries = ws
        .into_iter()
        .zip(results)
        .map(|(w, r)| {
            r.map(|cutset| SequenceEntry {
                w,
                f: cutset.len() + w,
                cutset,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CutsetSequence { entries, algorithm })
}

pub fn f_profile(seq: &CutsetSequence) -> Vec<ProfilePoint> {
    let fs: Vec<usize> = seq.entries.iter().map(|e| e.f).collect();
    seq.entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let next = fs.get(i + 1) == Some(&e.f);
            let prev = i > 0 && fs[i - 1] == e.f;
            ProfilePoint {
                w: e.w,
                f: e.f,
                preferred_over_next: next,
                on_plateau: next || prev,
            }
        })
        .collect()
}

/// Smallest `w ≤ space_bound` attaining the minimum `f` over `1..=space_bound`.
pub fn recommend_w(seq: &CutsetSequence, space_bound: usize) -> Result<usize> {
    if space_bound < 1 {
        return Err(Error::argument("space bound must be at least 1"));
    }
    seq.entries
        .iter()
        .filter(|e| e.w <= space_bound)
        .min_by_key(|e| (e.f, e.w))
        .map(|e| e.w)
        .ok_or_else(|| Error::argument("sequence has no entry within the space bound"))
}

/// Exact sizes `c*_i` of minimum i-cutsets for `i = 1..=tw*`, with `tw*`.
pub fn exact_sizes(g: &Graph) -> Result<(Vec<usize>, usize)> {
    let tw = exact_treewidth(g)?;
    let sizes = (1..=tw)
        .map(|i| exact_min_wcutset(g, i, CostModel::Unit).map(|c| c.len()))
        .collect::<Result<Vec<_>>>()?;
    Ok((sizes, tw))
}

/// Checks `c*_1 + 1 ≥ c*_2 + 2 ≥ … ≥ tw*`, ending exactly at `tw*`.
pub fn staircase_check(g: &Graph) -> Result<bool> {
    let (sizes, tw) = exact_sizes(g)?;
    if tw == 0 {
        return Ok(true);
    }
    let f: Vec<usize> = sizes.iter().enumerate().map(|(i, c)| c + i + 1).collect();
    Ok(f.windows(2).all(|w| w[0] >= w[1]) && f.last() == Some(&tw))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: u32) -> Graph {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        Graph::from_edges(n as usize, &edges).unwrap()
    }

    fn sequence_from(fs: &[usize]) -> CutsetSequence {
        let g = Graph::with_nodes(0);
        let base = crate::cutset::find_wcutset(&g, 1, CostModel::Unit, Algorithm::Gwc).unwrap();
        CutsetSequence {
            algorithm: Algorithm::Gwca,
            entries: fs
                .iter()
                .enumerate()
                .map(|(i, &f)| SequenceEntry {
                    w: i + 1,
                    f,
                    cutset: base.clone(),
                })
                .collect(),
        }
    }

    #[test]
    fn tree_has_single_entry() {
        let tree = Graph::from_edges(4, &[(0, 1), (1, 2), (1, 3)]).unwrap();
        let seq = cutset_sequence(&tree, Algorithm::Gwca, CostModel::Unit).unwrap();
        assert_eq!(seq.entries.len(), 1);
        assert_eq!((seq.entries[0].w, seq.entries[0].f), (1, 1));
        assert!(seq.entries[0].cutset.is_empty());
        assert_eq!(recommend_w(&seq, 5).unwrap(), 1);
    }

    #[test]
    fn k5_exact_is_flat() {
        let seq = cutset_sequence(&complete(5), Algorithm::Exact, CostModel::Unit).unwrap();
        let sizes: Vec<usize> = seq.entries.iter().map(|e| e.cutset.len()).collect();
        assert_eq!(sizes, vec![3, 2, 1, 0]);
        let prof = f_profile(&seq);
        assert!(prof.iter().all(|p| p.f == 4 && p.on_plateau));
        assert_eq!(recommend_w(&seq, 2).unwrap(), 1);
    }

    #[test]
    fn profile_marks_first_plateau() {
        let seq = sequence_from(&[28, 23, 21, 20, 20, 20, 20, 20, 20, 20]);
        let prof = f_profile(&seq);
        let first = prof.iter().find(|p| p.preferred_over_next).unwrap();
        assert_eq!(first.w, 4);
        assert_eq!(recommend_w(&seq, 10).unwrap(), 4);
        assert_eq!(recommend_w(&seq, 2).unwrap(), 2);
        assert!(recommend_w(&seq, 0).is_err());
    }

    #[test]
    fn staircase_small_cases() {
        assert!(staircase_check(&complete(5)).unwrap());
        let c4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(staircase_check(&c4).unwrap());
        assert!(staircase_check(&Graph::with_nodes(0)).unwrap());
    }

    #[test]
    fn exact_sequence_rejects_large_graphs() {
        assert!(cutset_sequence(&Graph::with_nodes(30), Algorithm::Exact, CostModel::Unit).is_err());
    }
}
