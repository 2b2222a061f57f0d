//! Seeded samplers: `G(n, p)`, the 2-core model built from a Poisson
//! configuration multigraph with geometric subdivisions, and embeddings.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Normal, Poisson};
use serde::Serialize;

use crate::decompose::{kernelize, KernelDecomposition};
use crate::{EmbeddedGraph, Error, Graph, MultiGraph, Rational};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent child seed for `index` (SplitMix64 of the pair).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The `mu < 1` with `mu e^{-mu} = lambda e^{-lambda}`.
pub fn conjugate(lambda: f64) -> Result<f64, Error> {
    if !lambda.is_finite() || lambda <= 1.0 {
        return Err(Error::Invalid(format!("conjugate needs lambda > 1, got {lambda}")));
    }
    let target = lambda * (-lambda).exp();
    let h = |x: f64| x * (-x).exp() - target;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..4 {
        let d = (1.0 - x) * (-x).exp();
        if d > 0.0 {
            let next = x - h(x) / d;
            if next > 0.0 && next < 1.0 {
                x = next;
            }
        }
    }
    Ok(x)
}

/// `G(n, p)` by skipping over absent pairs with geometric gaps.
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<Graph, Error> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Invalid(format!("p = {p} is not a probability")));
    }
    if p == 0.0 || n < 2 {
        return Ok(Graph::empty(n));
    }
    if p == 1.0 {
        return Ok(Graph::complete(n));
    }
    let mut rng = rng_from_seed(seed);
    let lq = (1.0 - p).ln();
    let mut edges = Vec::new();
    let (mut v, mut w): (usize, i64) = (1, -1);
    while v < n {
        let r: f64 = 1.0 - rng.random::<f64>();
        w += 1 + (r.ln() / lq).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((w as usize, v));
        }
    }
    Graph::new(n, edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DlpParams {
    pub lambda: f64,
    pub mu: f64,
    pub n: usize,
}

impl DlpParams {
    pub fn new(lambda: f64, n: usize) -> Result<Self, Error> {
        Ok(DlpParams {
            lambda,
            mu: conjugate(lambda)?,
            n,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DlpSample {
    /// Kernel vertices are `0..N`, subdivision vertices follow.
    #[serde(skip)]
    pub graph: Graph,
    /// The configuration multigraph before subdivision.
    pub kernel: MultiGraph,
    /// Path length behind each kernel edge.
    pub lengths: Vec<usize>,
    #[serde(skip)]
    pub decomposition: KernelDecomposition,
    pub big_lambda: f64,
    /// Degrees of the kernel vertices.
    pub degrees: Vec<usize>,
    /// Whole degree vectors rejected for odd parity.
    pub parity_rejections: usize,
    /// Path lengths redrawn to keep the result simple.
    pub resampled_lengths: usize,
    /// No vertex of degree at least three was drawn.
    pub degenerate: bool,
}

/// Draws the 2-core model: Gaussian `Lambda`, Poisson degrees conditioned on
/// even total degree-three-plus degree, a uniform pairing of the stubs, and
/// `Geom(1 - mu)` path lengths on the kernel edges.
///
/// Loops need length three and parallel kernel edges may have at most one
/// length-one member for the result to be a simple graph; offending lengths
/// are redrawn conditioned on being long enough.
pub fn sample_dlp(params: &DlpParams, seed: u64) -> Result<DlpSample, Error> {
    let DlpParams { lambda, mu, n } = *params;
    if !lambda.is_finite() || lambda <= 1.0 || mu.is_nan() || mu <= 0.0 || mu >= 1.0 || n == 0 {
        return Err(Error::Invalid("need lambda > 1, mu in (0, 1), n > 0".into()));
    }
    let mut rng = rng_from_seed(seed);
    let normal = Normal::new(lambda - mu, (1.0 / n as f64).sqrt()).map_err(|e| Error::Invalid(e.to_string()))?;
    let big_lambda = loop {
        let x: f64 = normal.sample(&mut rng);
        if x > 0.0 {
            break x;
        }
    };
    let poisson = Poisson::new(big_lambda).map_err(|e| Error::Invalid(e.to_string()))?;
    let mut parity_rejections = 0;
    let degrees: Vec<usize> = loop {
        let d: Vec<usize> = (0..n).map(|_| poisson.sample(&mut rng) as usize).collect();
        let big: Vec<usize> = d.into_iter().filter(|&k| k >= 3).collect();
        if big.iter().sum::<usize>() % 2 == 0 {
            break big;
        }
        parity_rejections += 1;
    };
    let count = degrees.len();
    let mut stubs: Vec<usize> = degrees.iter().enumerate().flat_map(|(v, &k)| std::iter::repeat_n(v, k)).collect();
    stubs.shuffle(&mut rng);
    let kernel_edges: Vec<(usize, usize)> = stubs.chunks(2).map(|c| (c[0].min(c[1]), c[0].max(c[1]))).collect();
    let geom = Geometric::new(1.0 - mu).map_err(|e| Error::Invalid(e.to_string()))?;
    let draw = |rng: &mut ChaCha8Rng| 1 + geom.sample(rng) as usize;
    let mut lengths: Vec<usize> = kernel_edges.iter().map(|_| draw(&mut rng)).collect();
    let mut resampled = 0;
    let mut short_parallel: HashSet<(usize, usize)> = HashSet::new();
    for (i, &(a, b)) in kernel_edges.iter().enumerate() {
        // memorylessness: a geometric length conditioned on >= k is k - 1 + a fresh draw
        if a == b && lengths[i] < 3 {
            lengths[i] = 2 + draw(&mut rng);
            resampled += 1;
        } else if a != b && lengths[i] == 1 && !short_parallel.insert((a, b)) {
            lengths[i] = 1 + draw(&mut rng);
            resampled += 1;
        }
    }
    let mut edges = Vec::new();
    let mut next = count;
    for (&(a, b), &len) in kernel_edges.iter().zip(&lengths) {
        let mut prev = a;
        for _ in 1..len {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
        edges.push((prev, b));
    }
    let graph = Graph::new(next, edges)?;
    let decomposition = kernelize(&graph);
    Ok(DlpSample {
        kernel: MultiGraph::new(count, kernel_edges)?,
        lengths,
        decomposition,
        big_lambda,
        degrees,
        parity_rejections,
        resampled_lengths: resampled,
        degenerate: count == 0,
        graph,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "style", rename_all = "kebab-case")]
pub enum EmbeddingStyle {
    /// Random rationals with numerators up to `2^40`; all pairwise
    /// distances distinct.
    Generic,
    /// Distinct integers from `lo..=hi`.
    IntegerRange { lo: i64, hi: i64 },
    /// `a + b * sigma(i)` for a random permutation `sigma`.
    ArithmeticProgression { a: i64, b: i64 },
}

/// Largest vertex count for which generic embeddings check all distances.
pub const GENERIC_CHECK_LIMIT: usize = 2000;

pub fn random_embedding(g: &Graph, style: EmbeddingStyle, seed: u64) -> Result<EmbeddedGraph, Error> {
    let n = g.vertex_count();
    let mut rng = rng_from_seed(seed);
    let positions: Vec<Rational> = match style {
        EmbeddingStyle::Generic => loop {
            let bound = 1i64 << 40;
            let pos: Vec<Rational> = (0..n)
                .map(|_| Rational::new(rng.random_range(-bound..=bound), rng.random_range(1i64..=8)).expect("positive denominator"))
                .collect();
            if distinct_distances(&pos) {
                break pos;
            }
        },
        EmbeddingStyle::IntegerRange { lo, hi } => {
            let width = hi.checked_sub(lo).and_then(|w| w.checked_add(1)).filter(|&w| w > 0).unwrap_or(0) as u64;
            if width < n as u64 {
                return Err(Error::Invalid(format!("window {lo}..={hi} holds fewer than {n} integers")));
            }
            let mut chosen: HashMap<i64, ()> = HashMap::with_capacity(n);
            let mut pos = Vec::with_capacity(n);
            while pos.len() < n {
                let x = rng.random_range(lo..=hi);
                if chosen.insert(x, ()).is_none() {
                    pos.push(Rational::from(x));
                }
            }
            pos
        }
        EmbeddingStyle::ArithmeticProgression { a, b } => {
            if b == 0 {
                return Err(Error::Invalid("progression step must be nonzero".into()));
            }
            let mut sigma: Vec<i64> = (0..n as i64).collect();
            sigma.shuffle(&mut rng);
            sigma.into_iter().map(|s| Rational::from(a + b * s)).collect()
        }
    };
    EmbeddedGraph::new(g.clone(), positions)
}

fn distinct_distances(pos: &[Rational]) -> bool {
    let set: HashSet<&Rational> = pos.iter().collect();
    if set.len() != pos.len() {
        return false;
    }
    if pos.len() > GENERIC_CHECK_LIMIT {
        return true;
    }
    let mut d = HashSet::new();
    for i in 0..pos.len() {
        for j in i + 1..pos.len() {
            if !d.insert((&pos[i] - &pos[j]).abs()) {
                return false;
            }
        }
    }
    true
}
