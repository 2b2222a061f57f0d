//! Large globally rigid subgraphs: the component recursion driven by
//! NAC-colourings and the density-increment process.

use std::cmp::Ordering;

use num_bigint::BigUint;
use serde::Serialize;

use crate::rigidity::{find_rigidity_certificate, Color, NacColoring, RigidityVerdict};
use crate::{Error, Graph, Rational};

/// Compares `x^a` with `y^b` for `x, y >= 1`.
fn cmp_pow(x: u64, a: u64, y: u64, b: u64) -> Ordering {
    let l = a as f64 * (x as f64).ln();
    let r = b as f64 * (y as f64).ln();
    let scale = l.abs().max(r.abs()).max(1.0);
    if (l - r).abs() > 1e-9 * scale {
        return l.partial_cmp(&r).expect("finite logs");
    }
    let exp = |e: u64| u32::try_from(e).expect("exponent fits in u32");
    BigUint::from(x).pow(exp(a)).cmp(&BigUint::from(y).pow(exp(b)))
}

/// Compares `m1 / (s1 ln s1)` with `m2 / (s2 ln s2)`, all `s >= 2`.
fn cmp_ratio(m1: u64, s1: u64, m2: u64, s2: u64) -> Ordering {
    // m1 s2 ln s2 vs m2 s1 ln s1
    cmp_pow(s2, m1 * s2, s1, m2 * s1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "branch", content = "index", rename_all = "snake_case")]
pub enum Branch {
    /// The current graph is globally rigid.
    Rigid,
    /// Recursed into a connected component.
    Component(usize),
    Red(usize),
    Blue(usize),
    Outcome(u8),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub vertices: usize,
    pub edges: usize,
    pub branch: Branch,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakExtraction {
    /// Vertices of the rigid subgraph, original labels.
    pub vertices: Vec<usize>,
    pub trace: Vec<TraceStep>,
    /// `2 ln 2 * m / (n ln n)`.
    pub bound: f64,
    pub bound_met: bool,
    /// Every recursion step found a part whose ratio was at least the
    /// current graph's.
    pub ratio_guarantee_met: bool,
    pub final_rigid: bool,
}

fn rigid_or_certificate(g: &Graph, budget: u64) -> Result<Option<NacColoring>, Error> {
    match find_rigidity_certificate(g, budget)? {
        RigidityVerdict::GloballyRigid { .. } => Ok(None),
        RigidityVerdict::NotRigid { certificate, .. } => Ok(Some(certificate)),
        RigidityVerdict::Unknown { .. } => Err(Error::BudgetExhausted),
    }
}

/// Globally rigid: one vertex, or connected with no certificate.
fn is_rigid(g: &Graph, budget: u64) -> Result<bool, Error> {
    if g.vertex_count() <= 1 {
        return Ok(true);
    }
    if !g.is_connected() {
        return Ok(false);
    }
    Ok(rigid_or_certificate(g, budget)?.is_none())
}

/// Recursion into the component of largest `m_i / (s_i ln s_i)`; red
/// components are examined before blue ones, ties keep the first.
pub fn extract_weakbt(g: &Graph, budget: u64) -> Result<WeakExtraction, Error> {
    let n0 = g.vertex_count();
    if n0 < 2 {
        return Err(Error::Invalid("extraction needs at least two vertices".into()));
    }
    let m0 = g.edge_count();
    let mut cur: Vec<usize> = (0..n0).collect();
    let mut trace = Vec::new();
    let mut guarantee = true;
    loop {
        let h = g.induced(&cur).graph;
        let (n, m) = (h.vertex_count(), h.edge_count());
        if m == 0 {
            cur.truncate(1);
            trace.push(TraceStep {
                vertices: 1,
                edges: 0,
                branch: Branch::Rigid,
            });
            break;
        }
        let parts: Vec<(Branch, Vec<usize>)> = if !h.is_connected() {
            h.connected_components()
                .into_iter()
                .enumerate()
                .map(|(i, c)| (Branch::Component(i), c))
                .collect()
        } else {
            match rigid_or_certificate(&h, budget)? {
                None => {
                    trace.push(TraceStep {
                        vertices: n,
                        edges: m,
                        branch: Branch::Rigid,
                    });
                    break;
                }
                Some(cert) => {
                    let red = cert.red_components.iter().enumerate().map(|(i, c)| (Branch::Red(i), c.clone()));
                    let blue = cert.blue_components.iter().enumerate().map(|(j, c)| (Branch::Blue(j), c.clone()));
                    red.chain(blue).collect()
                }
            }
        };
        let mut best: Option<(Branch, Vec<usize>, u64)> = None;
        for (branch, part) in parts {
            if part.len() < 2 {
                continue;
            }
            let mi = h.edges_within(&part) as u64;
            let better = best.as_ref().is_none_or(|(_, bp, bm)| {
                cmp_ratio(mi, part.len() as u64, *bm, bp.len() as u64) == Ordering::Greater
            });
            if better {
                best = Some((branch, part, mi));
            }
        }
        let (branch, part, mi) = best.expect("a non-rigid graph with edges has a part of size two");
        if cmp_ratio(mi, part.len() as u64, m as u64, n as u64) == Ordering::Less {
            guarantee = false;
        }
        trace.push(TraceStep {
            vertices: n,
            edges: m,
            branch,
        });
        cur = part.iter().map(|&x| cur[x]).collect();
    }
    let size = cur.len() as u64;
    // size * n ln n >= 2 m ln 2
    let bound_met = cmp_pow(n0 as u64, size * n0 as u64, 2, 2 * m0 as u64) != Ordering::Less;
    let bound = 2.0 * 2f64.ln() * m0 as f64 / (n0 as f64 * (n0 as f64).ln());
    let final_rigid = is_rigid(&g.induced(&cur).graph, budget)?;
    Ok(WeakExtraction {
        vertices: cur,
        trace,
        bound,
        bound_met,
        ratio_guarantee_met: guarantee,
        final_rigid,
    })
}

/// Blocks from a certificate: components of the colour class holding at
/// least half of the edges (red on a tie).
pub fn garamvolgyi_partition(g: &Graph, cert: &NacColoring) -> Result<Vec<Vec<usize>>, Error> {
    let red = cert.color.iter().filter(|&&c| c == Color::Red).count();
    let blocks = if 2 * red >= g.edge_count() {
        cert.red_components.clone()
    } else {
        cert.blue_components.clone()
    };
    check_partition(g, &blocks)?;
    Ok(blocks)
}

/// Within-block edges are at least half of all edges, and no vertex sends
/// two edges into the same other block.
fn check_partition(g: &Graph, blocks: &[Vec<usize>]) -> Result<(), Error> {
    if blocks.len() < 2 {
        return Err(Error::Verification("partition has a single block".into()));
    }
    let mut label = vec![usize::MAX; g.vertex_count()];
    for (i, b) in blocks.iter().enumerate() {
        b.iter().for_each(|&v| label[v] = i);
    }
    let inside = g.edges().iter().filter(|&&(a, b)| label[a] == label[b]).count();
    if 2 * inside < g.edge_count() {
        return Err(Error::Verification(format!(
            "only {inside} of {} edges inside blocks",
            g.edge_count()
        )));
    }
    for v in 0..g.vertex_count() {
        let mut seen = std::collections::HashSet::new();
        for &w in g.neighbors(v) {
            if label[w] != label[v] && !seen.insert(label[w]) {
                return Err(Error::Verification(format!("vertex {v} sends two edges into block {}", label[w])));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityStep {
    /// Chosen vertex set, labels of the input graph.
    pub vertices: Vec<usize>,
    pub outcome: u8,
}

fn density(g: &Graph, set: &[usize]) -> Rational {
    Rational::new(g.edges_within(set) as u64, set.len() as u64).expect("nonempty set")
}

/// One density-increment step on a graph that is not globally rigid.
pub fn density_increment_step(g: &Graph, eps: &Rational, budget: u64) -> Result<DensityStep, Error> {
    if !eps.is_positive() {
        return Err(Error::Invalid("eps must be positive".into()));
    }
    let n = g.vertex_count();
    if n <= 1 {
        return Err(Error::Rigid);
    }
    let blocks = if g.is_connected() {
        let cert = rigid_or_certificate(g, budget)?.ok_or(Error::Rigid)?;
        garamvolgyi_partition(g, &cert)?
    } else {
        let comps = g.connected_components();
        check_partition(g, &comps)?;
        comps
    };
    let nn = Rational::from(n as i64);
    let alpha = Rational::new(g.edge_count() as u64, n as u64)?;
    let eps_n = eps * &nn;
    let mut large: Option<usize> = None;
    for (i, b) in blocks.iter().enumerate() {
        if Rational::from(b.len() as i64) >= eps_n && large.is_none_or(|l| b.len() > blocks[l].len()) {
            large = Some(i);
        }
    }
    match large {
        None => {
            let mut best = 0;
            for i in 1..blocks.len() {
                if density(g, &blocks[i]) > density(g, &blocks[best]) {
                    best = i;
                }
            }
            let half = &alpha / &Rational::from(2);
            if density(g, &blocks[best]) < half {
                return Err(Error::Verification("no block reaches half the density".into()));
            }
            Ok(DensityStep {
                vertices: blocks[best].clone(),
                outcome: 1,
            })
        }
        Some(i) => {
            let a = blocks[i].clone();
            let mut in_a = vec![false; n];
            a.iter().for_each(|&v| in_a[v] = true);
            let b: Vec<usize> = (0..n).filter(|&v| !in_a[v]).collect();
            let across = g.edges().iter().filter(|&&(x, y)| in_a[x] != in_a[y]).count();
            if across > b.len() {
                return Err(Error::Verification("more edges between the parts than vertices outside".into()));
            }
            let target = &alpha - &Rational::new(b.len() as u64, n as u64)?;
            if density(g, &b) >= target {
                Ok(DensityStep { vertices: b, outcome: 2 })
            } else if density(g, &a) >= target {
                Ok(DensityStep { vertices: a, outcome: 3 })
            } else {
                Err(Error::Verification("neither part keeps the density".into()))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DenseExtraction {
    pub vertices: Vec<usize>,
    pub trace: Vec<TraceStep>,
    pub i1: usize,
    pub i2: usize,
    pub i3: usize,
    /// `sum (|V_{i-1}| - |V_i|) / |V_{i-1}|` over the steps.
    pub harmonic_loss: Rational,
    /// `|E_t|/|V_t| >= (m/n) 2^{-|I1|} - |I2| - loss`.
    pub density_inequality_ok: bool,
    /// `(m/n) 2^{-ln n / ln(1/eps)} - 3 ln n / eps`.
    pub bound: f64,
    /// `None` when the bound is not positive.
    pub bound_met: Option<bool>,
    pub final_rigid: bool,
}

/// Repeats [`density_increment_step`] until the current graph is rigid.
pub fn extract_dense(g: &Graph, eps: &Rational, budget: u64) -> Result<DenseExtraction, Error> {
    if !eps.is_positive() || *eps >= Rational::new(1, 2)? {
        return Err(Error::Invalid("eps must lie in (0, 1/2)".into()));
    }
    let n0 = g.vertex_count();
    if n0 == 0 {
        return Err(Error::Invalid("empty graph".into()));
    }
    let m0 = g.edge_count();
    let mut cur: Vec<usize> = (0..n0).collect();
    let mut trace = Vec::new();
    let (mut i1, mut i2, mut i3) = (0, 0, 0);
    let mut loss = Rational::zero();
    loop {
        let h = g.induced(&cur).graph;
        let (n, m) = (h.vertex_count(), h.edge_count());
        if is_rigid(&h, budget)? {
            trace.push(TraceStep {
                vertices: n,
                edges: m,
                branch: Branch::Rigid,
            });
            break;
        }
        let step = density_increment_step(&h, eps, budget)?;
        match step.outcome {
            1 => i1 += 1,
            2 => i2 += 1,
            _ => i3 += 1,
        }
        loss += &Rational::new((n - step.vertices.len()) as u64, n as u64)?;
        trace.push(TraceStep {
            vertices: n,
            edges: m,
            branch: Branch::Outcome(step.outcome),
        });
        cur = step.vertices.iter().map(|&x| cur[x]).collect();
    }
    let last = g.induced(&cur).graph;
    let dt = Rational::new(last.edge_count() as u64, last.vertex_count() as u64)?;
    let start = Rational::new(m0 as u64, n0 as u64)? / Rational::from(1i64 << i1.min(62));
    let rhs = &(&start - &Rational::from(i2 as i64)) - &loss;
    let ln_n = (n0 as f64).ln();
    let bound = m0 as f64 / n0 as f64 * 2f64.powf(-ln_n / (1.0 / eps.to_f64()).ln()) - 3.0 * ln_n / eps.to_f64();
    let final_rigid = is_rigid(&last, budget)?;
    Ok(DenseExtraction {
        bound_met: (bound > 0.0).then_some(cur.len() as f64 >= bound),
        vertices: cur,
        trace,
        i1,
        i2,
        i3,
        harmonic_loss: loss,
        density_inequality_ok: dt >= rhs,
        bound,
        final_rigid,
    })
}
