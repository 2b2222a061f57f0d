//! Exact reconstructibility of distances from revealed edge lengths.
//!
//! Realizations are found block by block (see [`blocks`]) and assembled at
//! cut vertices. Budgets bound the work; when a budget runs out the answer is
//! [`PairVerdict::Unknown`] rather than a guess.

mod blocks;
mod search;
pub mod witness;

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::{EmbeddedGraph, Error, Rational};
use search::{seed_realizations, GraphModel, Outcome, Search};

pub use witness::{
    estimate_witness_probability, extract_witness, is_witness, validate_witness, witness_from_realization,
    WitnessCheck, WitnessPartition, WitnessProbability, WitnessViolation,
};

pub const DEFAULT_BUDGET: u64 = 1 << 20;

/// `signs[e] = 1` when the realization keeps the orientation of edge `e`,
/// `-1` when it reverses it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SignAssignment {
    pub signs: Vec<i8>,
}

impl SignAssignment {
    /// Signs of `g` relative to the reference embedding, or `None` if `g`
    /// does not realize the edge lengths.
    pub fn from_realization(eg: &EmbeddedGraph, g: &[Rational]) -> Option<Self> {
        let mut signs = Vec::with_capacity(eg.graph().edge_count());
        for &(a, b) in eg.graph().edges() {
            let df = eg.delta(a, b);
            let dg = &g[a] - &g[b];
            if dg == df {
                signs.push(1);
            } else if dg == -df {
                signs.push(-1);
            } else {
                return None;
            }
        }
        Some(SignAssignment { signs })
    }

    pub fn negated(&self) -> Self {
        SignAssignment {
            signs: self.signs.iter().map(|s| -s).collect(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.signs.iter().all(|&s| s == 1)
    }

    /// Positions propagated along a BFS spanning forest; each component root
    /// keeps its reference position.
    pub fn induced_embedding(&self, eg: &EmbeddedGraph) -> Vec<Rational> {
        let (parent, order) = eg.graph().spanning_forest();
        let mut g = eg.positions().to_vec();
        for v in order {
            if let Some((p, e)) = parent[v] {
                let d = eg.delta(v, p);
                g[v] = if self.signs[e] == 1 { &g[p] + &d } else { &g[p] - &d };
            }
        }
        g
    }

    /// The signed f-differences around every basis cycle sum to zero.
    pub fn is_cycle_consistent(&self, eg: &EmbeddedGraph) -> bool {
        eg.graph().cycle_basis().iter().all(|c| {
            let len = c.vertices.len();
            let mut sum = Rational::zero();
            for i in 0..len {
                let d = eg.delta(c.vertices[(i + 1) % len], c.vertices[i]);
                if self.signs[c.edges[i]] == 1 {
                    sum += &d;
                } else {
                    sum -= &d;
                }
            }
            sum.is_zero()
        })
    }
}

/// An alternative placement of every vertex realizing the same edge lengths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlternativeEmbedding {
    pub positions: Vec<Rational>,
}

impl AlternativeEmbedding {
    pub fn realizes(&self, eg: &EmbeddedGraph) -> bool {
        self.positions.len() == eg.vertex_count()
            && eg
                .graph()
                .edges()
                .iter()
                .all(|&(a, b)| (&self.positions[a] - &self.positions[b]).abs() == eg.distance(a, b))
    }

    pub fn is_injective(&self) -> bool {
        let set: HashSet<&Rational> = self.positions.iter().collect();
        set.len() == self.positions.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairVerdict {
    Reconstructible,
    NotReconstructible(AlternativeEmbedding),
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Realizations {
    pub assignments: Vec<SignAssignment>,
    pub exhausted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReconReport {
    pub reconstructible_pairs: Vec<(usize, usize)>,
    pub maximal_subsets: Vec<Vec<usize>>,
    pub unknown_pairs: Vec<(usize, usize)>,
    pub exhausted: bool,
}

impl ReconReport {
    pub fn largest_subset(&self) -> usize {
        self.maximal_subsets.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Sign assignments of every injective realization of a connected graph,
/// one per reflection pair, with `signs[0] = 1`. The trivial assignment
/// comes first.
pub fn enumerate_realizations(eg: &EmbeddedGraph, budget: u64) -> Result<Realizations, Error> {
    if budget == 0 {
        return Err(Error::Invalid("budget must be at least 1".into()));
    }
    let g = eg.graph();
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.edge_count() == 0 {
        return Ok(Realizations {
            assignments: vec![SignAssignment { signs: vec![] }],
            exhausted: true,
        });
    }
    let model = GraphModel::new(eg, budget);
    let order = model.placement_order(0, &[]);
    let mut search = Search::new(eg, &model, order, 0, None, budget);
    let mut found = Vec::new();
    let mut over = false;
    let outcome = search.run(&mut |pos| {
        let positions: Vec<Rational> = (0..eg.vertex_count()).map(|v| pos[&v].clone()).collect();
        let mut s = SignAssignment::from_realization(eg, &positions).expect("placement realizes lengths");
        if s.signs[0] == -1 {
            s = s.negated();
        }
        found.push(s);
        if found.len() as u64 > budget {
            over = true;
            return true;
        }
        false
    });
    let exhausted = outcome == Outcome::Exhausted && !over && model.component_complete(0);
    if over {
        found.pop();
    }
    found.sort_by_key(|s| s.signs.iter().map(|&x| x == -1).collect::<Vec<_>>());
    found.dedup();
    Ok(Realizations {
        assignments: found,
        exhausted,
    })
}

fn check_pair(eg: &EmbeddedGraph, u: usize, v: usize) -> Result<(), Error> {
    let n = eg.vertex_count();
    if u >= n || v >= n {
        return Err(Error::VertexOutOfRange { vertex: u.max(v), n });
    }
    if u == v {
        return Err(Error::SameVertex);
    }
    Ok(())
}

/// Extends positions known on some vertices to all of them: untouched
/// components keep the reference embedding, translated away from anything
/// they would collide with.
fn complete_embedding(eg: &EmbeddedGraph, model: &GraphModel, known: &HashMap<usize, Rational>) -> AlternativeEmbedding {
    let mut positions = eg.positions().to_vec();
    let mut used: HashSet<Rational> = HashSet::new();
    let mut hi: Option<Rational> = None;
    let bump = |p: &Rational, hi: &mut Option<Rational>| {
        if hi.as_ref().is_none_or(|h| p > h) {
            *hi = Some(p.clone());
        }
    };
    let mut pending = Vec::new();
    for comp in &model.components {
        if comp.iter().any(|v| known.contains_key(v)) {
            for &v in comp {
                positions[v] = known[&v].clone();
                used.insert(positions[v].clone());
                bump(&positions[v], &mut hi);
            }
        } else {
            pending.push(comp);
        }
    }
    for comp in pending {
        let collides = comp.iter().any(|&v| used.contains(&positions[v]));
        if collides {
            let lo = comp.iter().map(|&v| positions[v].clone()).min().expect("nonempty");
            let shift = hi.clone().expect("something placed") - lo + Rational::one();
            for &v in comp {
                positions[v] = &positions[v] + &shift;
            }
        }
        for &v in comp {
            used.insert(positions[v].clone());
            bump(&positions[v], &mut hi);
        }
    }
    AlternativeEmbedding { positions }
}

/// Alternative for a pair in different components: the component of `v` is
/// moved far away.
fn separate_components(eg: &EmbeddedGraph, model: &GraphModel, v: usize) -> AlternativeEmbedding {
    let pos = eg.positions();
    let lo = pos.iter().min().expect("nonempty");
    let hi = pos.iter().max().expect("nonempty");
    let shift = (hi - lo) * Rational::from(2) + Rational::one();
    let mut positions = pos.to_vec();
    for &x in &model.components[model.component_of[v]] {
        positions[x] = &positions[x] + &shift;
    }
    AlternativeEmbedding { positions }
}

fn pair_search(eg: &EmbeddedGraph, model: &GraphModel, u: usize, v: usize, budget: u64) -> PairVerdict {
    let c = model.component_of[u];
    if c != model.component_of[v] {
        return PairVerdict::NotReconstructible(separate_components(eg, model, v));
    }
    if eg.graph().has_edge(u, v) {
        return PairVerdict::Reconstructible;
    }
    let path = model.block_path(u, v);
    let check_at = path.len();
    let order = model.placement_order(c, &path);
    let mut search = Search::new(eg, model, order, check_at, Some((u, v)), budget);
    let mut found: Option<HashMap<usize, Rational>> = None;
    let outcome = search.run(&mut |pos| {
        found = Some(pos.clone());
        true
    });
    match outcome {
        Outcome::Stopped => PairVerdict::NotReconstructible(complete_embedding(eg, model, &found.expect("visited"))),
        Outcome::Exhausted if model.component_complete(c) => PairVerdict::Reconstructible,
        _ => PairVerdict::Unknown,
    }
}

/// Decides whether `|f(u) - f(v)|` is forced by the edge lengths.
pub fn pair_verdict(eg: &EmbeddedGraph, u: usize, v: usize, budget: u64) -> Result<PairVerdict, Error> {
    check_pair(eg, u, v)?;
    let model = GraphModel::new(eg, budget);
    Ok(pair_search(eg, &model, u, v, budget))
}

/// Like [`pair_verdict`], with an exhausted budget reported as an error.
pub fn is_pair_reconstructible(eg: &EmbeddedGraph, u: usize, v: usize, budget: u64) -> Result<bool, Error> {
    match pair_verdict(eg, u, v, budget)? {
        PairVerdict::Reconstructible => Ok(true),
        PairVerdict::NotReconstructible(_) => Ok(false),
        PairVerdict::Unknown => Err(Error::BudgetExhausted),
    }
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize, full: bool) -> Self {
        let mut words = vec![if full { u64::MAX } else { 0 }; n.div_ceil(64)];
        if full && !n.is_multiple_of(64) {
            *words.last_mut().unwrap() = (1u64 << (n % 64)) - 1;
        }
        Bits(words)
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
    fn and_assign(&mut self, other: &Bits) {
        self.0.iter_mut().zip(&other.0).for_each(|(a, b)| *a &= b);
    }
    fn or(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }
    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn and_not(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| i * 64 + b)
        })
    }
}

/// Removes from `cand` every pair whose distance differs under `g`
/// (component-local positions).
fn apply_realization(cand: &mut [Bits], f: &[Rational], g: &[Rational]) {
    let n = f.len();
    let mut by_shift: HashMap<Rational, Bits> = HashMap::new();
    let mut by_mirror: HashMap<Rational, Bits> = HashMap::new();
    let keys: Vec<(Rational, Rational)> = (0..n).map(|i| (&g[i] - &f[i], &g[i] + &f[i])).collect();
    for (i, (a, b)) in keys.iter().enumerate() {
        by_shift.entry(a.clone()).or_insert_with(|| Bits::new(n, false)).set(i);
        by_mirror.entry(b.clone()).or_insert_with(|| Bits::new(n, false)).set(i);
    }
    for (i, (a, b)) in keys.iter().enumerate() {
        let keep = by_shift[a].or(&by_mirror[b]);
        cand[i].and_assign(&keep);
    }
}

fn bron_kerbosch(adj: &[Bits], r: &mut Vec<usize>, p: Bits, mut x: Bits, out: &mut Vec<Vec<usize>>) {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        return;
    }
    let pivot = p
        .or(&x)
        .ones()
        .max_by_key(|&u| adj[u].and(&p).ones().count())
        .expect("p or x nonempty");
    let mut p = p;
    for v in p.and_not(&adj[pivot]).ones().collect::<Vec<_>>() {
        r.push(v);
        bron_kerbosch(adj, r, p.and(&adj[v]), x.and(&adj[v]), out);
        r.pop();
        p.clear(v);
        x.set(v);
    }
}

/// The reconstructible-pair relation and its maximal cliques. Pairs whose
/// search ran out of budget are listed in `unknown_pairs` and left out of the
/// relation, so subsets are then lower bounds and `exhausted` is false.
pub fn maximal_reconstructible_subsets(eg: &EmbeddedGraph, budget: u64) -> ReconReport {
    let model = GraphModel::new(eg, budget);
    let mut pairs = Vec::new();
    let mut unknown = Vec::new();
    let mut subsets = Vec::new();
    for (c, comp) in model.components.iter().enumerate() {
        let k = comp.len();
        if k == 1 {
            subsets.push(comp.clone());
            continue;
        }
        let f: Vec<Rational> = comp.iter().map(|&v| eg.position(v).clone()).collect();
        let mut cand: Vec<Bits> = (0..k)
            .map(|i| {
                let mut b = Bits::new(k, true);
                b.clear(i);
                b
            })
            .collect();
        for g in seed_realizations(eg, &model, c) {
            apply_realization(&mut cand, &f, &g);
        }
        let mut proven: Vec<Bits> = (0..k).map(|_| Bits::new(k, false)).collect();
        for i in 0..k {
            for j in i + 1..k {
                if !cand[i].get(j) {
                    continue;
                }
                match pair_search(eg, &model, comp[i], comp[j], budget) {
                    PairVerdict::Reconstructible => {
                        proven[i].set(j);
                        proven[j].set(i);
                        pairs.push((comp[i], comp[j]));
                    }
                    PairVerdict::NotReconstructible(alt) => {
                        let g: Vec<Rational> = comp.iter().map(|&v| alt.positions[v].clone()).collect();
                        apply_realization(&mut cand, &f, &g);
                    }
                    PairVerdict::Unknown => unknown.push((comp[i], comp[j])),
                }
            }
        }
        let mut found = Vec::new();
        bron_kerbosch(&proven, &mut Vec::new(), Bits::new(k, true), Bits::new(k, false), &mut found);
        for mut s in found {
            for x in &mut s {
                *x = comp[*x];
            }
            s.sort_unstable();
            subsets.push(s);
        }
    }
    pairs.sort_unstable();
    unknown.sort_unstable();
    subsets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    ReconReport {
        reconstructible_pairs: pairs,
        maximal_subsets: subsets,
        exhausted: unknown.is_empty(),
        unknown_pairs: unknown,
    }
}
