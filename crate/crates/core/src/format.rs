//! Text formats: the edge-list graph format, Bayes-network structure files,
//! multi-cover instances and decompositions.
//!
//! Graph format, one directive per line, `#` starts a comment:
//!
//! ```text
//! n 4          # node count, ids 0..n
//! e 0 1        # undirected edge
//! d 2 3        # domain size of node 2
//! c 2 1.5      # cost of node 2
//! ```
//!
//! Multi-cover format: `u <count>`, `r <elem> <req>` (default 1),
//! `s <setid> <cost> <elem...>`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::decomposition::TreeDecomposition;
use crate::error::{Error, Result};
use crate::graph::{BayesNetStructure, Graph, NodeId};
use crate::smc::{CoverSet, ElementId, SetId, SmcInstance};

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} {tok:?}")))
}

fn arity(line: usize, toks: &[&str], n: usize) -> Result<()> {
    if toks.len() != n {
        return Err(Error::parse(
            line,
            format!("'{}' takes {} argument(s), got {}", toks[0], n - 1, toks.len() - 1),
        ));
    }
    Ok(())
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut g: Option<Graph> = None;
    for (line, toks) in lines(text) {
        if toks[0] == "n" {
            arity(line, &toks, 2)?;
            if g.is_some() {
                return Err(Error::parse(line, "node count declared twice"));
            }
            g = Some(Graph::with_nodes(num(line, toks[1], "node count")?));
            continue;
        }
        let graph = g
            .as_mut()
            .ok_or_else(|| Error::parse(line, "expected 'n <count>' first"))?;
        let node = |tok: &str| -> Result<NodeId> {
            let v: u32 = num(line, tok, "node id")?;
            if (v as usize) < graph.node_count() {
                Ok(NodeId(v))
            } else {
                Err(Error::parse(line, format!("undeclared node {v}")))
            }
        };
        match toks[0] {
            "e" => {
                arity(line, &toks, 3)?;
                let (u, v) = (node(toks[1])?, node(toks[2])?);
                let added = graph.add_edge(u, v).map_err(|e| Error::parse(line, e.to_string()))?;
                if !added {
                    return Err(Error::parse(line, format!("duplicate edge {u}-{v}")));
                }
            }
            "d" => {
                arity(line, &toks, 3)?;
                let u = node(toks[1])?;
                let d = num(line, toks[2], "domain size")?;
                graph
                    .set_domain_size(u, d)
                    .map_err(|e| Error::parse(line, e.to_string()))?;
            }
            "c" => {
                arity(line, &toks, 3)?;
                let u = node(toks[1])?;
                let c = num(line, toks[2], "cost")?;
                graph.set_cost(u, c).map_err(|e| Error::parse(line, e.to_string()))?;
            }
            other => return Err(Error::parse(line, format!("unknown directive {other:?}"))),
        }
    }
    g.ok_or_else(|| Error::parse(0, "missing 'n <count>' header"))
}

/// Writes a graph whose ids are `0..n`. Default domains and costs are
/// omitted.
pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    let n = g.nodes().last().map_or(0, |v| v.0 as usize + 1);
    writeln!(out, "n {n}").unwrap();
    for &v in g.nodes() {
        let d = g.domain_size(v).unwrap();
        if d != 2 {
            writeln!(out, "d {v} {d}").unwrap();
        }
        let c = g.cost(v).unwrap();
        if c != 1.0 {
            writeln!(out, "c {v} {c}").unwrap();
        }
    }
    for (u, v) in g.edges() {
        writeln!(out, "e {u} {v}").unwrap();
    }
    out
}

/// Bayes-network structure from a UAI-style file: type line, variable
/// count, domain sizes, function count, then one scope per line whose last
/// variable is the child. Probability tables after the scopes are ignored.
pub fn parse_uai(text: &str) -> Result<BayesNetStructure> {
    let mut it = lines(text);
    let mut next = |what: &str| {
        it.next()
            .ok_or_else(|| Error::parse(0, format!("truncated file: missing {what}")))
    };

    let (line, toks) = next("type line")?;
    if toks.len() != 1 || !toks[0].eq_ignore_ascii_case("BAYES") {
        return Err(Error::parse(
            line,
            format!("expected 'BAYES', got {:?}", toks.join(" ")),
        ));
    }
    let (line, toks) = next("variable count")?;
    if toks.len() != 1 {
        return Err(Error::parse(line, "expected a single variable count"));
    }
    let n: u32 = num(line, toks[0], "variable count")?;
    let (line, toks) = next("domain sizes")?;
    if toks.len() != n as usize {
        return Err(Error::parse(
            line,
            format!("declared {n} variables but found {} domain sizes", toks.len()),
        ));
    }
    let mut bn = BayesNetStructure::new((0..n).map(NodeId))?;
    for (v, tok) in toks.iter().enumerate() {
        let d = num(line, tok, "domain size")?;
        bn.set_domain_size(NodeId(v as u32), d)
            .map_err(|e| Error::parse(line, e.to_string()))?;
    }
    let (line, toks) = next("function count")?;
    let f: u32 = num(line, toks[0], "function count")?;
    if f != n {
        return Err(Error::parse(line, format!("declared {n} variables but {f} functions")));
    }
    let mut seen = vec![false; n as usize];
    for _ in 0..f {
        let (line, toks) = next("scope")?;
        let len: usize = num(line, toks[0], "scope size")?;
        if len == 0 || toks.len() != len + 1 {
            return Err(Error::parse(
                line,
                format!("scope declares {len} variables but lists {}", toks.len() - 1),
            ));
        }
        let vars = toks[1..]
            .iter()
            .map(|t| {
                let v: u32 = num(line, t, "variable")?;
                if v < n {
                    Ok(NodeId(v))
                } else {
                    Err(Error::parse(line, format!("undeclared variable {v}")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let (&child, parents) = vars.split_last().unwrap();
        if std::mem::replace(&mut seen[child.0 as usize], true) {
            return Err(Error::parse(line, format!("variable {child} has two scopes")));
        }
        bn.set_parents(child, parents.to_vec())
            .map_err(|e| Error::parse(line, e.to_string()))?;
    }
    Ok(bn)
}

/// Writes the preamble of a UAI file (no tables).
pub fn write_uai(bn: &BayesNetStructure) -> String {
    let mut out = String::from("BAYES\n");
    let vars = bn.variables();
    writeln!(out, "{}", vars.len()).unwrap();
    let doms: Vec<String> = vars.iter().map(|&v| bn.domain_size(v).unwrap().to_string()).collect();
    writeln!(out, "{}", doms.join(" ")).unwrap();
    writeln!(out, "{}", vars.len()).unwrap();
    for &v in vars {
        let ps = bn.parents(v);
        let scope: Vec<String> = ps.iter().chain([&v]).map(|x| x.to_string()).collect();
        writeln!(out, "{} {}", scope.len(), scope.join(" ")).unwrap();
    }
    out
}

pub fn parse_smc(text: &str) -> Result<SmcInstance> {
    let mut count: Option<u32> = None;
    let mut req = BTreeMap::new();
    let mut sets = Vec::new();
    for (line, toks) in lines(text) {
        if toks[0] == "u" {
            arity(line, &toks, 2)?;
            if count.is_some() {
                return Err(Error::parse(line, "universe declared twice"));
            }
            count = Some(num(line, toks[1], "element count")?);
            continue;
        }
        let n = count.ok_or_else(|| Error::parse(line, "expected 'u <count>' first"))?;
        let elem = |tok: &str| -> Result<ElementId> {
            let e: u32 = num(line, tok, "element")?;
            if e < n {
                Ok(ElementId(e))
            } else {
                Err(Error::parse(line, format!("undeclared element {e}")))
            }
        };
        match toks[0] {
            "r" => {
                arity(line, &toks, 3)?;
                let e = elem(toks[1])?;
                let r: u32 = num(line, toks[2], "requirement")?;
                if r == 0 {
                    return Err(Error::parse(line, "requirement must be at least 1"));
                }
                if req.insert(e, r).is_some() {
                    return Err(Error::parse(line, format!("duplicate requirement for {e}")));
                }
            }
            "s" => {
                if toks.len() < 3 {
                    return Err(Error::parse(line, "'s' needs an id and a cost"));
                }
                let id = SetId(num(line, toks[1], "set id")?);
                let cost = num(line, toks[2], "cost")?;
                let members = toks[3..].iter().map(|t| elem(t)).collect::<Result<Vec<_>>>()?;
                sets.push(CoverSet { id, members, cost });
            }
            other => return Err(Error::parse(line, format!("unknown directive {other:?}"))),
        }
    }
    let n = count.ok_or_else(|| Error::parse(0, "missing 'u <count>' header"))?;
    let universe: Vec<ElementId> = (0..n).map(ElementId).collect();
    for e in &universe {
        req.entry(*e).or_insert(1);
    }
    SmcInstance::new(universe, req, sets).map_err(|e| Error::parse(0, e.to_string()))
}

/// Writes an instance. Elements are renumbered densely in universe order.
pub fn write_smc(inst: &SmcInstance) -> String {
    let mut out = String::new();
    writeln!(out, "u {}", inst.universe.len()).unwrap();
    for (i, e) in inst.universe.iter().enumerate() {
        writeln!(out, "r {i} {}", inst.requirement(*e)).unwrap();
    }
    for s in &inst.sets {
        let members: Vec<String> = s
            .members
            .iter()
            .map(|e| inst.element_index(*e).unwrap().to_string())
            .collect();
        let sep = if members.is_empty() { "" } else { " " };
        writeln!(out, "s {} {}{sep}{}", s.id, s.cost, members.join(" ")).unwrap();
    }
    out
}

/// `width`, then one `b <index> <nodes...>` line per cluster and one
/// `t <a> <b>` line per tree edge.
pub fn write_decomposition(td: &TreeDecomposition) -> String {
    let mut out = String::new();
    writeln!(out, "width {}", td.width).unwrap();
    writeln!(out, "clusters {}", td.clusters.len()).unwrap();
    for (i, c) in td.clusters.iter().enumerate() {
        let nodes: Vec<String> = c.iter().map(|v| v.to_string()).collect();
        writeln!(out, "b {i} {}", nodes.join(" ")).unwrap();
    }
    for (a, b) in &td.tree_edges {
        writeln!(out, "t {a} {b}").unwrap();
    }
    out
}
