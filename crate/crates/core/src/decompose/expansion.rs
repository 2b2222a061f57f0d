//! Edge expansion `Phi(S) = e(S, S^c) / d(S)` minimized over vertex sets with
//! `|S| <= |V| / 2`.
//!
//! The exact search groups vertices into twin classes (same neighbourhood
//! outside the class, same weight): the cut and weight of a set depend only
//! on how many vertices it takes from each class.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{Error, Graph, Rational};

/// Largest number of class-count vectors the exact search will visit.
pub const EXACT_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionMode {
    Exact,
    /// Local search from the given seed; reports the best set found.
    Sampled { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpansionReport {
    pub phi: Rational,
    pub witness_set: Vec<usize>,
    /// `false` when `phi` is only the value of the best set found, i.e. an
    /// upper bound on the true minimum.
    pub exact: bool,
}

struct Classes {
    members: Vec<Vec<usize>>,
    weight: Vec<u64>,
    clique: Vec<bool>,
    /// Pairs of distinct classes joined completely.
    links: Vec<Vec<usize>>,
}

fn twin_classes(g: &Graph, weights: &[u64]) -> Classes {
    let n = g.vertex_count();
    let mut class_of = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut clique = Vec::new();
    let mut open: HashMap<(Vec<usize>, u64), usize> = HashMap::new();
    for v in 0..n {
        let key = (g.neighbors(v).to_vec(), weights[v]);
        if let Some(&c) = open.get(&key) {
            class_of[v] = c;
            members[c].push(v);
        } else {
            open.insert(key, members.len());
            class_of[v] = members.len();
            members.push(vec![v]);
            clique.push(false);
        }
    }
    // merge singleton classes that are true twins
    let mut closed: HashMap<(Vec<usize>, u64), usize> = HashMap::new();
    let mut merged: Vec<Vec<usize>> = Vec::new();
    let mut merged_clique = Vec::new();
    let mut new_of = vec![usize::MAX; n];
    for (c, m) in members.iter().enumerate() {
        if m.len() > 1 {
            for &v in m {
                new_of[v] = merged.len();
            }
            merged.push(m.clone());
            merged_clique.push(clique[c]);
            continue;
        }
        let v = m[0];
        let mut nb = g.neighbors(v).to_vec();
        nb.push(v);
        nb.sort_unstable();
        let key = (nb, weights[v]);
        if let Some(&t) = closed.get(&key) {
            merged[t].push(v);
            merged_clique[t] = true;
            new_of[v] = t;
        } else {
            closed.insert(key, merged.len());
            new_of[v] = merged.len();
            merged.push(vec![v]);
            merged_clique.push(false);
        }
    }
    let k = merged.len();
    let mut links = vec![Vec::new(); k];
    for i in 0..k {
        let rep = merged[i][0];
        let mut adj: Vec<usize> = g
            .neighbors(rep)
            .iter()
            .map(|&w| new_of[w])
            .filter(|&c| c != i)
            .collect();
        adj.sort_unstable();
        adj.dedup();
        links[i] = adj;
    }
    let weight = merged.iter().map(|m| weights[m[0]]).collect();
    Classes {
        members: merged,
        weight,
        clique: merged_clique,
        links,
    }
}

fn count_vectors(c: &Classes) -> u64 {
    c.members
        .iter()
        .try_fold(1u64, |acc, m| acc.checked_mul(m.len() as u64 + 1).filter(|&x| x <= EXACT_LIMIT))
        .unwrap_or(u64::MAX)
}

struct Best {
    cut: u64,
    weight: u64,
    counts: Vec<usize>,
    found: bool,
}

impl Best {
    /// `cut / weight < best`, with zero weight counted as ratio zero.
    fn improves(&self, cut: u64, weight: u64) -> bool {
        if !self.found {
            return true;
        }
        let (a, b) = if weight == 0 { (0, 1) } else { (cut, weight) };
        let (c, d) = if self.weight == 0 { (0, 1) } else { (self.cut, self.weight) };
        (a as u128) * (d as u128) < (c as u128) * (b as u128)
    }
}

struct Enumerator<'a> {
    c: &'a Classes,
    max_size: usize,
    counts: Vec<usize>,
    best: Best,
}

impl Enumerator<'_> {
    fn run(&mut self, i: usize, size: usize, cut: u64, weight: u64) {
        if i == self.c.members.len() {
            if size >= 1 && self.best.improves(cut, weight) {
                self.best = Best {
                    cut,
                    weight,
                    counts: self.counts.clone(),
                    found: true,
                };
            }
            return;
        }
        let ni = self.c.members[i].len();
        for take in 0..=ni.min(self.max_size - size) {
            let mut add = 0u64;
            if self.c.clique[i] {
                add += (take * (ni - take)) as u64;
            }
            for &j in &self.c.links[i] {
                let nj = self.c.members[j].len();
                if j < i {
                    let cj = self.counts[j];
                    add += (take * (nj - cj) + cj * (ni - take)) as u64;
                }
            }
            self.counts[i] = take;
            self.run(i + 1, size + take, cut + add, weight + take as u64 * self.c.weight[i]);
        }
        self.counts[i] = 0;
    }
}

/// Minimum of `e(S, S^c) / w(S)` over nonempty `S` with `|S| <= n / 2`;
/// sets of zero weight count as ratio zero. Returns `None` for `n < 2` and
/// an error when the search space exceeds [`EXACT_LIMIT`].
pub fn min_weighted_ratio(g: &Graph, weights: &[u64]) -> Result<Option<(Rational, Vec<usize>)>, Error> {
    let n = g.vertex_count();
    if n < 2 {
        return Ok(None);
    }
    let classes = twin_classes(g, weights);
    let size = count_vectors(&classes);
    if size > EXACT_LIMIT {
        return Err(Error::SizeLimit {
            what: "exact expansion search space",
            limit: EXACT_LIMIT as usize,
            got: size.min(usize::MAX as u64) as usize,
        });
    }
    let mut e = Enumerator {
        c: &classes,
        max_size: n / 2,
        counts: vec![0; classes.members.len()],
        best: Best {
            cut: 0,
            weight: 0,
            counts: Vec::new(),
            found: false,
        },
    };
    e.run(0, 0, 0, 0);
    let best = e.best;
    let mut set: Vec<usize> = best
        .counts
        .iter()
        .enumerate()
        .flat_map(|(i, &k)| classes.members[i][..k].iter().copied())
        .collect();
    set.sort_unstable();
    let ratio = if best.weight == 0 {
        Rational::zero()
    } else {
        Rational::new(best.cut, best.weight).expect("positive weight")
    };
    Ok(Some((ratio, set)))
}

fn cut_and_volume(g: &Graph, weights: &[u64], inside: &[bool]) -> (u64, u64) {
    let mut cut = 0;
    for &(a, b) in g.edges() {
        if inside[a] != inside[b] {
            cut += 1;
        }
    }
    let vol = (0..g.vertex_count()).filter(|&v| inside[v]).map(|v| weights[v]).sum();
    (cut, vol)
}

fn ratio_of(cut: u64, vol: u64) -> Rational {
    if vol == 0 {
        Rational::zero()
    } else {
        Rational::new(cut, vol).expect("positive volume")
    }
}

/// Best set found by growing BFS balls from random starts and then moving
/// single vertices while that lowers the ratio.
pub(crate) fn sampled_ratio(g: &Graph, weights: &[u64], seed: u64) -> (Rational, Vec<usize>) {
    let n = g.vertex_count();
    let half = n / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<usize> = (0..n).collect();
    starts.shuffle(&mut rng);
    starts.truncate(32);
    let mut best: Option<(Rational, Vec<bool>)> = None;
    let consider = |inside: &Vec<bool>, best: &mut Option<(Rational, Vec<bool>)>| {
        let size = inside.iter().filter(|&&x| x).count();
        if size == 0 || size > half {
            return;
        }
        let (c, v) = cut_and_volume(g, weights, inside);
        let r = ratio_of(c, v);
        if best.as_ref().is_none_or(|(b, _)| r < *b) {
            *best = Some((r, inside.clone()));
        }
    };
    for comp in g.connected_components() {
        if comp.len() <= half {
            let mut inside = vec![false; n];
            comp.iter().for_each(|&v| inside[v] = true);
            consider(&inside, &mut best);
        }
    }
    for &s in &starts {
        let mut inside = vec![false; n];
        let mut queue = std::collections::VecDeque::from([s]);
        inside[s] = true;
        let mut size = 1;
        consider(&inside, &mut best);
        while let Some(x) = queue.pop_front() {
            for &y in g.neighbors(x) {
                if !inside[y] && size < half {
                    inside[y] = true;
                    size += 1;
                    queue.push_back(y);
                    consider(&inside, &mut best);
                }
            }
        }
    }
    let Some((mut r, mut inside)) = best else {
        return (Rational::zero(), Vec::new());
    };
    loop {
        let mut improved = false;
        for v in 0..n {
            inside[v] = !inside[v];
            let size = inside.iter().filter(|&&x| x).count();
            if size >= 1 && size <= half {
                let (c, vol) = cut_and_volume(g, weights, &inside);
                let cand = ratio_of(c, vol);
                if cand < r {
                    r = cand;
                    improved = true;
                    continue;
                }
            }
            inside[v] = !inside[v];
        }
        if !improved {
            break;
        }
    }
    (r, (0..n).filter(|&v| inside[v]).collect())
}

/// `Phi(G)`: the minimum edge expansion, with `d(S)` the sum of degrees.
pub fn expansion(g: &Graph, mode: ExpansionMode) -> Result<ExpansionReport, Error> {
    if g.vertex_count() < 2 {
        return Err(Error::Invalid("expansion needs at least two vertices".into()));
    }
    let weights: Vec<u64> = (0..g.vertex_count()).map(|v| g.degree(v) as u64).collect();
    match mode {
        ExpansionMode::Exact => {
            let (phi, witness_set) = min_weighted_ratio(g, &weights)?.expect("n >= 2");
            Ok(ExpansionReport {
                phi,
                witness_set,
                exact: true,
            })
        }
        ExpansionMode::Sampled { seed } => {
            let (phi, witness_set) = sampled_ratio(g, &weights, seed);
            Ok(ExpansionReport {
                phi,
                witness_set,
                exact: false,
            })
        }
    }
}
