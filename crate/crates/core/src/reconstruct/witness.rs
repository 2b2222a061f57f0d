//! Witness partitions: connected vertex partitions whose cross edges all
//! share one f-difference per block pair and sum to zero around cycles.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use super::{pair_verdict, AlternativeEmbedding, PairVerdict};
use crate::decompose::partition_stats;
use crate::{EmbeddedGraph, Error, Graph, Rational, UnionFind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessPartition {
    pub blocks: Vec<Vec<usize>>,
    /// `offsets[(i, j)] = f_ij` for `i < j`; `f_ji = -f_ij`.
    pub offsets: BTreeMap<(usize, usize), Rational>,
}

impl Serialize for WitnessPartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            blocks: &'a [Vec<usize>],
            offsets: Vec<String>,
        }
        Repr {
            blocks: &self.blocks,
            offsets: self
                .offsets
                .iter()
                .map(|((i, j), f)| format!("{i} {j} {f}"))
                .collect(),
        }
        .serialize(serializer)
    }
}

impl WitnessPartition {
    pub fn offset(&self, i: usize, j: usize) -> Option<Rational> {
        if i == j {
            return Some(Rational::zero());
        }
        if i < j {
            self.offsets.get(&(i, j)).cloned()
        } else {
            self.offsets.get(&(j, i)).map(|f| -f)
        }
    }

    pub fn block_of(&self, n: usize) -> Vec<usize> {
        let mut of = vec![usize::MAX; n];
        for (i, b) in self.blocks.iter().enumerate() {
            for &v in b {
                if v < n {
                    of[v] = i;
                }
            }
        }
        of
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessViolation {
    NotPartition { vertex: usize },
    BlockDisconnected { block: usize },
    TooManyCrossEdges { cross: usize, edges: usize },
    MissingOffset { i: usize, j: usize },
    OffsetMismatch { u: usize, v: usize, expected: Rational, found: Rational },
    CycleSum { cycle: Vec<usize>, sum: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessCheck {
    pub valid: bool,
    pub violation: Option<WitnessViolation>,
}

fn partition_problem(g: &Graph, blocks: &[Vec<usize>]) -> Option<WitnessViolation> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    for b in blocks {
        for &v in b {
            if v >= n || seen[v] {
                return Some(WitnessViolation::NotPartition { vertex: v });
            }
            seen[v] = true;
        }
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return Some(WitnessViolation::NotPartition { vertex: v });
    }
    for (i, b) in blocks.iter().enumerate() {
        if b.is_empty() || !g.induced(b).graph.is_connected() {
            return Some(WitnessViolation::BlockDisconnected { block: i });
        }
    }
    None
}

fn check_with(g: &Graph, f: &[Rational], w: &WitnessPartition) -> Option<WitnessViolation> {
    if let Some(p) = partition_problem(g, &w.blocks) {
        return Some(p);
    }
    let of = w.block_of(g.vertex_count());
    let cross: Vec<(usize, usize)> = g.edges().iter().copied().filter(|&(a, b)| of[a] != of[b]).collect();
    if 2 * cross.len() > g.edge_count() {
        return Some(WitnessViolation::TooManyCrossEdges {
            cross: cross.len(),
            edges: g.edge_count(),
        });
    }
    for &(a, b) in &cross {
        let Some(expected) = w.offset(of[a], of[b]) else {
            return Some(WitnessViolation::MissingOffset { i: of[a], j: of[b] });
        };
        let found = &f[a] - &f[b];
        if found != expected {
            return Some(WitnessViolation::OffsetMismatch { u: a, v: b, expected, found });
        }
    }
    for c in g.cycle_basis() {
        let len = c.vertices.len();
        let mut sum = Rational::zero();
        for i in 0..len {
            let (x, y) = (c.vertices[i], c.vertices[(i + 1) % len]);
            match w.offset(of[x], of[y]) {
                Some(d) => sum += &d,
                None => return Some(WitnessViolation::MissingOffset { i: of[x], j: of[y] }),
            }
        }
        if !sum.is_zero() {
            let mut cycle = c.vertices.clone();
            cycle.push(cycle[0]);
            return Some(WitnessViolation::CycleSum { cycle, sum });
        }
    }
    None
}

/// Checks all three witness conditions exactly. The cycle condition is
/// checked on a fundamental cycle basis; every cycle is a signed sum of
/// basis cycles and the condition is additive.
pub fn validate_witness(eg: &EmbeddedGraph, w: &WitnessPartition) -> WitnessCheck {
    let violation = check_with(eg.graph(), eg.positions(), w);
    WitnessCheck {
        valid: violation.is_none(),
        violation,
    }
}

/// Offsets read off the first cross edge of each block pair.
fn derive_offsets(g: &Graph, f: &[Rational], of: &[usize]) -> BTreeMap<(usize, usize), Rational> {
    let mut offsets = BTreeMap::new();
    for &(a, b) in g.edges() {
        let (i, j) = (of[a], of[b]);
        if i == j {
            continue;
        }
        let (key, val) = if i < j { ((i, j), &f[a] - &f[b]) } else { ((j, i), &f[b] - &f[a]) };
        offsets.entry(key).or_insert(val);
    }
    offsets
}

fn is_witness_with(g: &Graph, f: &[Rational], blocks: &[Vec<usize>]) -> bool {
    if partition_problem(g, blocks).is_some() {
        return false;
    }
    let w = WitnessPartition {
        blocks: blocks.to_vec(),
        offsets: BTreeMap::new(),
    };
    let of = w.block_of(g.vertex_count());
    let w = WitnessPartition {
        offsets: derive_offsets(g, f, &of),
        ..w
    };
    check_with(g, f, &w).is_none()
}

/// Whether some choice of offsets makes `blocks` a witness.
pub fn is_witness(eg: &EmbeddedGraph, blocks: &[Vec<usize>]) -> bool {
    is_witness_with(eg.graph(), eg.positions(), blocks)
}

/// Builds the witness of a realization `g` whose distance between `u` and
/// `v` differs from the reference: blocks are the components left after
/// deleting the edges `g` reverses (or keeps, if that set is smaller).
pub fn witness_from_realization(
    eg: &EmbeddedGraph,
    g: &AlternativeEmbedding,
    u: usize,
    v: usize,
) -> Result<WitnessPartition, Error> {
    let graph = eg.graph();
    if !g.realizes(eg) {
        return Err(Error::Invalid("embedding does not realize the edge lengths".into()));
    }
    if (&g.positions[u] - &g.positions[v]).abs() == eg.distance(u, v) {
        return Err(Error::Invalid("embedding keeps the distance of the pair".into()));
    }
    let reversed: Vec<bool> = graph
        .edges()
        .iter()
        .map(|&(a, b)| &g.positions[a] - &g.positions[b] != eg.delta(a, b))
        .collect();
    let count = reversed.iter().filter(|&&r| r).count();
    let cut_reversed = 2 * count <= graph.edge_count();
    let mut uf = UnionFind::new(graph.vertex_count());
    for (e, &(a, b)) in graph.edges().iter().enumerate() {
        if reversed[e] != cut_reversed {
            uf.union(a, b);
        }
    }
    let mut groups = uf.groups();
    let iu = groups.iter().position(|b| b.contains(&u)).expect("u grouped");
    let bu = groups.remove(iu);
    let iv = groups.iter().position(|b| b.contains(&v)).ok_or(Error::Reconstructible)?;
    let bv = groups.remove(iv);
    let mut blocks = vec![bu, bv];
    blocks.extend(groups);
    let of = {
        let mut of = vec![0; graph.vertex_count()];
        for (i, b) in blocks.iter().enumerate() {
            for &x in b {
                of[x] = i;
            }
        }
        of
    };
    let offsets = derive_offsets(graph, eg.positions(), &of);
    let w = WitnessPartition { blocks, offsets };
    let check = validate_witness(eg, &w);
    if let Some(viol) = check.violation {
        return Err(Error::Verification(format!("constructed witness fails: {viol:?}")));
    }
    Ok(w)
}

/// Finds a realization separating `u` and `v` and turns it into a witness.
pub fn extract_witness(eg: &EmbeddedGraph, u: usize, v: usize, budget: u64) -> Result<WitnessPartition, Error> {
    match pair_verdict(eg, u, v, budget)? {
        PairVerdict::NotReconstructible(g) => witness_from_realization(eg, &g, u, v),
        PairVerdict::Reconstructible => Err(Error::Reconstructible),
        PairVerdict::Unknown => Err(Error::BudgetExhausted),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessProbability {
    pub trials: u64,
    pub hits: u64,
    pub empirical: f64,
    pub exponent: i64,
    pub bound: f64,
    pub v_prime: usize,
    pub c2: usize,
    pub k: usize,
}

/// Monte Carlo frequency with which `blocks` is a witness when the vertices
/// of `g` receive distinct positions drawn from `pool`, next to the bound
/// `(|pool| / 2)^-(V' - C2 - (k - 1))`.
pub fn estimate_witness_probability(
    g: &Graph,
    blocks: &[Vec<usize>],
    pool: &[Rational],
    trials: u64,
    seed: u64,
) -> Result<WitnessProbability, Error> {
    let n = g.vertex_count();
    if pool.len() < 2 * n {
        return Err(Error::Invalid(format!(
            "pool of {} positions is smaller than twice the {n} vertices",
            pool.len()
        )));
    }
    if pool.iter().collect::<HashSet<_>>().len() != pool.len() {
        return Err(Error::Invalid("pool positions must be distinct".into()));
    }
    if let Some(p) = partition_problem(g, blocks) {
        return Err(Error::Invalid(format!("not a connected partition: {p:?}")));
    }
    let stats = partition_stats(g, blocks)?;
    let exponent = stats.v_prime as i64 - stats.c2 as i64 - (blocks.len() as i64 - 1);
    let bound = (pool.len() as f64 / 2.0).powi(-(exponent as i32));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..pool.len()).collect();
    let mut hits = 0;
    for _ in 0..trials {
        let (chosen, _) = idx.partial_shuffle(&mut rng, n);
        let f: Vec<Rational> = chosen.iter().map(|&i| pool[i].clone()).collect();
        if is_witness_with(g, &f, blocks) {
            hits += 1;
        }
    }
    Ok(WitnessProbability {
        trials,
        hits,
        empirical: if trials == 0 { 0.0 } else { hits as f64 / trials as f64 },
        exponent,
        bound,
        v_prime: stats.v_prime,
        c2: stats.c2,
        k: blocks.len(),
    })
}
