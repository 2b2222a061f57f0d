//! The hypercube with base-3 positions: every edge length is forced, yet no
//! non-adjacent pair is, because flipping one coordinate's sign keeps all
//! edge lengths.

use rayon::prelude::*;
use serde::Serialize;

use crate::reconstruct::{pair_verdict, AlternativeEmbedding, PairVerdict};
use crate::{EmbeddedGraph, Error, Graph, Rational};

pub const MAX_DIMENSION: usize = 20;
/// Largest dimension verified pair by pair; above it difference vectors are used.
pub const PAIRWISE_LIMIT: usize = 12;
pub const ORACLE_LIMIT: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypercubeInstance {
    pub k: usize,
    /// Vertex `a` is the bit vector of the integer `a`.
    pub eg: EmbeddedGraph,
}

fn pow3(i: usize) -> i64 {
    3i64.pow(i as u32)
}

/// `sum a_i 3^i`.
pub fn base3(a: usize, k: usize) -> i64 {
    (0..k).filter(|&i| a >> i & 1 == 1).map(pow3).sum()
}

/// `sum (1 - 2[i = j]) a_i 3^i`.
pub fn flipped(a: usize, k: usize, j: usize) -> i64 {
    let f = base3(a, k);
    if a >> j & 1 == 1 {
        f - 2 * pow3(j)
    } else {
        f
    }
}

pub fn build_hypercube(k: usize) -> Result<HypercubeInstance, Error> {
    if !(1..=MAX_DIMENSION).contains(&k) {
        return Err(Error::SizeLimit {
            what: "hypercube dimension",
            limit: MAX_DIMENSION,
            got: k,
        });
    }
    let n = 1usize << k;
    let edges = (0..n).flat_map(|a| (0..k).filter(move |&i| a >> i & 1 == 0).map(move |i| (a, a | 1 << i)));
    let g = Graph::new(n, edges)?;
    let positions = (0..n).map(|a| Rational::from(base3(a, k))).collect();
    Ok(HypercubeInstance {
        k,
        eg: EmbeddedGraph::new(g, positions)?,
    })
}

pub fn flip_embedding(inst: &HypercubeInstance, j: usize) -> Result<AlternativeEmbedding, Error> {
    if j >= inst.k {
        return Err(Error::Invalid(format!("bit {j} out of range for dimension {}", inst.k)));
    }
    let alt = AlternativeEmbedding {
        positions: (0..1usize << inst.k).map(|a| Rational::from(flipped(a, inst.k, j))).collect(),
    };
    if !alt.realizes(&inst.eg) {
        return Err(Error::Verification(format!("flip of bit {j} changes an edge length")));
    }
    Ok(alt)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyMode {
    Direct,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CounterexampleReport {
    pub k: usize,
    pub mode: VerifyMode,
    pub vertices: usize,
    pub edges: usize,
    /// `|E| = k 2^(k-1)`.
    pub edge_count_ok: bool,
    /// Every edge joins vectors at Hamming distance one.
    pub hamming_ok: bool,
    /// Edges join vectors of different parity, so there is no odd cycle.
    pub triangle_free: bool,
    /// Base-3 positions are distinct.
    pub injective: bool,
    /// Every flip keeps every edge length.
    pub flips_agree: bool,
    /// Non-adjacent pairs (or difference vectors) shown not reconstructible.
    pub non_edges_checked: u64,
    pub pairwise: bool,
    /// Pairs where the exhaustive oracle matched, in oracle mode.
    pub oracle_agreements: Option<u64>,
    pub largest_reconstructible_subset: usize,
}

/// For a non-edge with lowest differing bit `j`: `f_j` changes the signed
/// difference, and does not merely negate it.
fn check_difference(fd: i64, dj: i64, j: usize) -> bool {
    let fjd = fd - 2 * dj * pow3(j);
    fjd != fd && fjd != -fd
}

/// Enumerates `d in {-1,0,1}^k` with at least two nonzero entries and checks
/// the inequalities for the pair difference `sum d_i 3^i`.
fn check_difference_vectors(k: usize) -> Result<u64, Error> {
    /// Digits are chosen from the top down, so the last nonzero one seen is
    /// the lowest differing bit.
    fn rec(i: usize, fd: i64, nonzero: u32, low: Option<(usize, i64)>) -> Result<u64, (i64, usize)> {
        if i == 0 {
            if nonzero < 2 {
                return Ok(0);
            }
            let (j, dj) = low.expect("nonzero entry");
            return if check_difference(fd, dj, j) { Ok(1) } else { Err((fd, j)) };
        }
        let mut total = 0;
        for d in [-1i64, 0, 1] {
            let next = if d != 0 { Some((i - 1, d)) } else { low };
            total += rec(i - 1, fd + d * pow3(i - 1), nonzero + (d != 0) as u32, next)?;
        }
        Ok(total)
    }
    let split = k.min(2);
    let heads: Vec<Vec<i64>> = (0..3usize.pow(split as u32))
        .map(|h| (0..split).map(|t| (h / 3usize.pow(t as u32) % 3) as i64 - 1).collect())
        .collect();
    let results: Vec<Result<u64, (i64, usize)>> = heads
        .par_iter()
        .map(|head| {
            let (mut fd, mut nonzero, mut low) = (0, 0, None);
            for (t, &d) in head.iter().enumerate() {
                let i = k - 1 - t;
                if d != 0 {
                    fd += d * pow3(i);
                    nonzero += 1;
                    low = Some((i, d));
                }
            }
            rec(k - split, fd, nonzero, low)
        })
        .collect();
    let mut total = 0;
    for r in results {
        total += r.map_err(|(fd, j)| Error::Verification(format!("difference {fd} with bit {j}")))?;
    }
    Ok(total)
}

pub fn verify_counterexample(inst: &HypercubeInstance, mode: VerifyMode, budget: u64) -> Result<CounterexampleReport, Error> {
    let k = inst.k;
    let n = 1usize << k;
    let g = inst.eg.graph();
    let edge_count_ok = g.edge_count() == k << (k - 1);
    let hamming_ok = g.edges().iter().all(|&(a, b)| (a ^ b).count_ones() == 1);
    let triangle_free = g.edges().iter().all(|&(a, b)| a.count_ones() % 2 != b.count_ones() % 2);
    let mut values: Vec<i64> = (0..n).map(|a| base3(a, k)).collect();
    values.sort_unstable();
    let injective = values.windows(2).all(|w| w[0] < w[1]);
    let flips_agree = (0..k).into_par_iter().all(|j| {
        g.edges()
            .iter()
            .all(|&(a, b)| (base3(a, k) - base3(b, k)).abs() == (flipped(a, k, j) - flipped(b, k, j)).abs())
    });
    let pairwise = k <= PAIRWISE_LIMIT;
    let non_edges_checked = if pairwise {
        let checked: Result<Vec<u64>, Error> = (0..n)
            .into_par_iter()
            .map(|a| {
                let mut c = 0;
                for b in a + 1..n {
                    if (a ^ b).count_ones() == 1 {
                        continue;
                    }
                    let j = (a ^ b).trailing_zeros() as usize;
                    let fd = base3(a, k) - base3(b, k);
                    let fjd = flipped(a, k, j) - flipped(b, k, j);
                    if fjd == fd || fjd == -fd {
                        return Err(Error::Verification(format!("pair {a} {b} keeps its distance under flip {j}")));
                    }
                    c += 1;
                }
                Ok(c)
            })
            .collect();
        checked?.into_iter().sum()
    } else {
        check_difference_vectors(k)?
    };
    let oracle_agreements = match mode {
        VerifyMode::Direct => None,
        VerifyMode::Oracle => {
            if k > ORACLE_LIMIT {
                return Err(Error::SizeLimit {
                    what: "oracle hypercube dimension",
                    limit: ORACLE_LIMIT,
                    got: k,
                });
            }
            let mut agree = 0;
            for a in 0..n {
                for b in a + 1..n {
                    let adjacent = (a ^ b).count_ones() == 1;
                    let verdict = pair_verdict(&inst.eg, a, b, budget)?;
                    let ok = match verdict {
                        PairVerdict::Reconstructible => adjacent,
                        PairVerdict::NotReconstructible(_) => !adjacent,
                        PairVerdict::Unknown => return Err(Error::BudgetExhausted),
                    };
                    if !ok {
                        return Err(Error::Verification(format!("oracle disagrees on pair {a} {b}")));
                    }
                    agree += 1;
                }
            }
            Some(agree)
        }
    };
    let all_ok = edge_count_ok && hamming_ok && triangle_free && injective && flips_agree;
    Ok(CounterexampleReport {
        k,
        mode,
        vertices: n,
        edges: g.edge_count(),
        edge_count_ok,
        hamming_ok,
        triangle_free,
        injective,
        flips_agree,
        non_edges_checked,
        pairwise,
        oracle_agreements,
        largest_reconstructible_subset: if all_ok { 2 } else { 0 },
    })
}
