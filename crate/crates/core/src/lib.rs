//! Minimal and minimum-weight w-cutsets of graphical models.
//!
//! A w-cutset is a set of nodes whose removal leaves a graph of treewidth at
//! most `w`. The crate builds min-fill tree decompositions, runs the greedy
//! decomposition-based cutset algorithms next to the MGA and DGR baselines,
//! maps decompositions to set multi-cover instances and back, and analyses
//! the sequence of cutsets over `w`. Small instances can be solved exactly.

pub mod bench;
pub mod cutset;
pub mod decomposition;
pub mod error;
pub mod format;
pub mod generate;
pub mod graph;
pub mod oracle;
pub mod par;
pub mod sequence;
pub mod smc;

pub use cutset::{certify, find_wcutset, gwc, Algorithm, CostModel, Cutset};
pub use decomposition::{min_fill_decomposition, width_of, EliminationOrder, TreeDecomposition};
pub use error::{Error, Result};
pub use graph::{BayesNetStructure, Graph, NodeId};
pub use par::Execution;
pub use smc::{SetId, SmcInstance};
