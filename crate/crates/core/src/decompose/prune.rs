//! Weighted deletion process that turns an expander with some edges removed
//! back into an expander of minimum degree two.
//!
//! Edge weights follow the rules: every edge of `E0` starts at 2, others at 0;
//! after each step the weight of a deleted edge equals the number of its
//! endpoints still present and live edges weigh 0.

use std::collections::HashSet;

use serde::Serialize;

use super::expansion::{expansion, min_weighted_ratio, sampled_ratio, ExpansionMode};
use crate::{Error, Graph, Rational, Subgraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PruneRule {
    /// A vertex of degree at most one is removed.
    LowDegree,
    /// A set with `e(S, S^c) < c d_G(S) / 10` is removed.
    SparseCut,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PruneStep {
    pub rule: PruneRule,
    pub removed: Vec<usize>,
    pub weight_before: i64,
    pub weight_after: i64,
    /// Sum of degrees in the input graph over `removed`.
    pub d_g: u64,
    /// Edges of the current graph leaving `removed`.
    pub cut: u64,
    /// `1 + W' <= W` for a low-degree step, both `4c d_G(S)/5 + W' <= W`
    /// and `4c|S|/5 + W' <= W` for a sparse-cut step.
    pub decrease_ok: bool,
    /// Incrementally updated weights agree with the closed form.
    pub closed_form_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conclusions {
    pub half_the_vertices: bool,
    pub min_degree_two: bool,
    pub quarter_degree_three: bool,
    /// `None` when the final graph has fewer than two vertices.
    pub expander: Option<bool>,
}

impl Conclusions {
    pub fn all(&self) -> bool {
        self.half_the_vertices && self.min_degree_two && self.quarter_degree_three && self.expander == Some(true)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PruneReport {
    #[serde(skip)]
    pub result: Subgraph,
    pub remaining: Vec<usize>,
    pub steps: Vec<PruneStep>,
    /// `1 <= m <= cN/100`.
    pub precondition: bool,
    /// Exact `Phi(G) >= c`, or `None` if it could not be computed.
    pub input_expander: Option<bool>,
    pub conclusions: Conclusions,
    /// Set when sparse cuts were searched by sampling rather than exactly.
    pub heuristic: bool,
    /// Every step decreased the weight as required and no weight went negative.
    pub ledger_ok: bool,
}

struct State<'a> {
    g: &'a Graph,
    in_e0: Vec<bool>,
    present: Vec<bool>,
    weight: Vec<i64>,
}

impl State<'_> {
    fn live(&self, e: usize) -> bool {
        let (a, b) = self.g.edge(e);
        !self.in_e0[e] && self.present[a] && self.present[b]
    }

    fn total(&self) -> i64 {
        self.weight.iter().sum()
    }

    fn closed_form(&self, deleted: &[bool]) -> bool {
        (0..self.g.edge_count()).all(|e| {
            let (a, b) = self.g.edge(e);
            let expect = if deleted[e] {
                self.present[a] as i64 + self.present[b] as i64
            } else {
                0
            };
            self.weight[e] == expect
        })
    }

    fn current(&self) -> (Graph, Vec<usize>) {
        let verts: Vec<usize> = (0..self.g.vertex_count()).filter(|&v| self.present[v]).collect();
        let mut idx = vec![usize::MAX; self.g.vertex_count()];
        for (i, &v) in verts.iter().enumerate() {
            idx[v] = i;
        }
        let edges: Vec<(usize, usize)> = (0..self.g.edge_count())
            .filter(|&e| self.live(e))
            .map(|e| {
                let (a, b) = self.g.edge(e);
                (idx[a], idx[b])
            })
            .collect();
        (Graph::new(verts.len(), edges).expect("subgraph of a simple graph"), verts)
    }
}

fn at_most(lhs: &Rational, rhs: i64) -> bool {
    *lhs <= Rational::from(rhs)
}

/// Runs the deletion process on `g` with `E0 = removed_edges` and parameter `c`.
pub fn prune(g: &Graph, removed_edges: &[(usize, usize)], c: &Rational, seed: u64) -> Result<PruneReport, Error> {
    if g.min_degree() < 3 {
        return Err(Error::Invalid("pruning needs minimum degree at least 3".into()));
    }
    if !c.is_positive() || *c > Rational::one() {
        return Err(Error::Invalid("c must lie in (0, 1]".into()));
    }
    let n = g.vertex_count();
    let mut in_e0 = vec![false; g.edge_count()];
    let mut e0: HashSet<usize> = HashSet::new();
    for &(a, b) in removed_edges {
        let e = g
            .edge_index(a.min(b), a.max(b))
            .ok_or_else(|| Error::Invalid(format!("{a} {b} is not an edge")))?;
        in_e0[e] = true;
        e0.insert(e);
    }
    let m = e0.len();
    let weight = in_e0.iter().map(|&x| if x { 2 } else { 0 }).collect();
    let mut st = State {
        g,
        in_e0,
        present: vec![true; n],
        weight,
    };
    let d_g: Vec<u64> = (0..n).map(|v| g.degree(v) as u64).collect();
    let tenth = c / &Rational::from(10);
    let four_fifths_c = &(c * &Rational::from(4)) / &Rational::from(5);
    let mut steps = Vec::new();
    let mut heuristic = false;
    let mut ledger_ok = true;
    loop {
        let (cur, verts) = st.current();
        if cur.vertex_count() == 0 {
            break;
        }
        let low = (0..cur.vertex_count()).find(|&v| cur.degree(v) <= 1);
        let before = st.total();
        let deleted_before: Vec<bool> = (0..g.edge_count()).map(|e| !st.live(e)).collect();
        if let Some(lv) = low {
            let u = verts[lv];
            let mut cut = 0;
            for &x in g.neighbors(u) {
                let e = g.edge_index(u.min(x), u.max(x)).expect("adjacent");
                if deleted_before[e] {
                    st.weight[e] -= 1;
                } else {
                    st.weight[e] = 1;
                    cut += 1;
                }
            }
            st.present[u] = false;
            let after = st.total();
            let deleted: Vec<bool> = (0..g.edge_count()).map(|e| !st.live(e)).collect();
            let step = PruneStep {
                rule: PruneRule::LowDegree,
                removed: vec![u],
                weight_before: before,
                weight_after: after,
                d_g: d_g[u],
                cut,
                decrease_ok: after < before,
                closed_form_ok: st.closed_form(&deleted),
            };
            ledger_ok &= step.decrease_ok && step.closed_form_ok && st.weight.iter().all(|&w| w >= 0);
            steps.push(step);
            continue;
        }
        if cur.vertex_count() < 2 {
            break;
        }
        let w: Vec<u64> = verts.iter().map(|&v| d_g[v]).collect();
        let (ratio, set) = match min_weighted_ratio(&cur, &w) {
            Ok(found) => found.expect("at least two vertices"),
            Err(Error::SizeLimit { .. }) => {
                heuristic = true;
                sampled_ratio(&cur, &w, seed ^ steps.len() as u64)
            }
            Err(e) => return Err(e),
        };
        if ratio >= tenth || set.is_empty() {
            break;
        }
        let removed: Vec<usize> = set.iter().map(|&i| verts[i]).collect();
        let mut inside = vec![false; n];
        removed.iter().for_each(|&v| inside[v] = true);
        let mut cut = 0;
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            match (inside[a], inside[b]) {
                (true, true) => st.weight[e] = 0,
                (true, false) | (false, true) => {
                    if deleted_before[e] {
                        st.weight[e] -= 1;
                    } else {
                        st.weight[e] = 1;
                        cut += 1;
                    }
                }
                _ => {}
            }
        }
        for &v in &removed {
            st.present[v] = false;
        }
        let after = st.total();
        let deleted: Vec<bool> = (0..g.edge_count()).map(|e| !st.live(e)).collect();
        let ds: u64 = removed.iter().map(|&v| d_g[v]).sum();
        let drop = before - after;
        let by_degree = &four_fifths_c * &Rational::from(ds as i64);
        let by_size = &four_fifths_c * &Rational::from(removed.len() as i64);
        let step = PruneStep {
            rule: PruneRule::SparseCut,
            d_g: ds,
            cut,
            decrease_ok: at_most(&by_degree, drop) && at_most(&by_size, drop),
            closed_form_ok: st.closed_form(&deleted),
            removed,
            weight_before: before,
            weight_after: after,
        };
        ledger_ok &= step.decrease_ok && step.closed_form_ok && st.weight.iter().all(|&w| w >= 0);
        steps.push(step);
    }
    let (final_graph, remaining) = st.current();
    let nn = final_graph.vertex_count();
    let deg3 = (0..nn).filter(|&v| final_graph.degree(v) >= 3).count();
    let expander = if nn < 2 {
        None
    } else {
        let mode = if heuristic {
            ExpansionMode::Sampled { seed }
        } else {
            ExpansionMode::Exact
        };
        let rep = match expansion(&final_graph, mode) {
            Err(Error::SizeLimit { .. }) => expansion(&final_graph, ExpansionMode::Sampled { seed })?,
            r => r?,
        };
        Some(rep.phi >= tenth)
    };
    let conclusions = Conclusions {
        half_the_vertices: 2 * nn >= n,
        min_degree_two: nn > 0 && final_graph.min_degree() >= 2,
        quarter_degree_three: 4 * deg3 >= n,
        expander,
    };
    let precondition = m >= 1 && Rational::from(100 * m as i64) <= c * &Rational::from(n as i64);
    let input_expander = match expansion(g, ExpansionMode::Exact) {
        Ok(rep) => Some(rep.phi >= *c),
        Err(_) => None,
    };
    Ok(PruneReport {
        result: Subgraph {
            graph: final_graph,
            vertices: remaining.clone(),
        },
        remaining,
        steps,
        precondition,
        input_expander,
        conclusions,
        heuristic,
        ledger_ok,
    })
}
