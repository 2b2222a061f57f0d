//! Seeded experiment grids over random graphs, with rows that replay
//! exactly from `(config, cell, seed index)`.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::decompose::{kernelize, two_core};
use crate::random_models::{derive_seed, random_embedding, sample_dlp, sample_gnp, DlpParams, EmbeddingStyle};
use crate::reconstruct::{estimate_witness_probability, maximal_reconstructible_subsets, DEFAULT_BUDGET};
use crate::{Error, Graph, Rational};

pub const SCHEMA_VERSION: u32 = 1;
/// Below this many vertices rows carry the asymptotic-regime flag.
pub const ASYMPTOTIC_N: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Gnp,
    Dlp,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub model: Model,
    pub n_grid: Vec<usize>,
    pub eps_grid: Vec<f64>,
    pub seeds_per_cell: usize,
    pub master_seed: u64,
    pub embedding: EmbeddingStyle,
    pub budget: u64,
    pub output: Option<String>,
    pub timing: bool,
    /// Constant in the bare-path tail check.
    pub gamma: f64,
    pub witness_trials: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: Model::Gnp,
            n_grid: vec![100],
            eps_grid: vec![0.5],
            seeds_per_cell: 10,
            master_seed: 1,
            embedding: EmbeddingStyle::Generic,
            budget: DEFAULT_BUDGET,
            output: None,
            timing: false,
            gamma: 0.1,
            witness_trials: 10_000,
        }
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>, Error> {
    v.split(',')
        .map(|x| x.trim().parse().map_err(|_| Error::Invalid(format!("bad value {x:?} for {key}"))))
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, Error> {
    v.trim().parse().map_err(|_| Error::Invalid(format!("bad value {v:?} for {key}")))
}

fn style_text(s: &EmbeddingStyle) -> String {
    match s {
        EmbeddingStyle::Generic => "generic".into(),
        EmbeddingStyle::IntegerRange { lo, hi } => format!("integer-range:{lo}:{hi}"),
        EmbeddingStyle::ArithmeticProgression { a, b } => format!("ap:{a}:{b}"),
    }
}

/// `generic`, `integer-range:LO:HI` or `ap:A:B`.
pub fn parse_style(v: &str) -> Result<EmbeddingStyle, Error> {
    let parts: Vec<&str> = v.trim().split(':').collect();
    let num = |s: &str| parse_one::<i64>("embedding", s);
    match parts.as_slice() {
        ["generic"] => Ok(EmbeddingStyle::Generic),
        ["integer-range", lo, hi] => Ok(EmbeddingStyle::IntegerRange { lo: num(lo)?, hi: num(hi)? }),
        ["ap", a, b] => Ok(EmbeddingStyle::ArithmeticProgression { a: num(a)?, b: num(b)? }),
        _ => Err(Error::Invalid(format!("unknown embedding style {v:?}"))),
    }
}

impl ExperimentConfig {
    /// Sets one `key = value` entry.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), Error> {
        match key {
            "model" => {
                self.model = match value.trim() {
                    "gnp" => Model::Gnp,
                    "dlp" => Model::Dlp,
                    other => return Err(Error::Invalid(format!("unknown model {other:?}"))),
                }
            }
            "n" => self.n_grid = parse_list(key, value)?,
            "epsilon" => self.eps_grid = parse_list(key, value)?,
            "seeds" => self.seeds_per_cell = parse_one(key, value)?,
            "seed" => self.master_seed = parse_one(key, value)?,
            "embedding" => self.embedding = parse_style(value)?,
            "budget" => self.budget = parse_one(key, value)?,
            "output" => self.output = Some(value.trim().to_string()).filter(|s| !s.is_empty()),
            "timing" => self.timing = parse_one(key, value)?,
            "gamma" => self.gamma = parse_one(key, value)?,
            "witness_trials" => self.witness_trials = parse_one(key, value)?,
            _ => return Err(Error::Invalid(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Flat `key = value` text; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut cfg = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(Error::Parse {
                line: i + 1,
                message: "expected key = value".into(),
            })?;
            cfg.set(k.trim(), v).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.n_grid.is_empty() || self.eps_grid.is_empty() {
            return Err(Error::Invalid("grids must be nonempty".into()));
        }
        if self.budget == 0 || self.seeds_per_cell == 0 {
            return Err(Error::Invalid("budget and seeds must be at least 1".into()));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        let mut s = String::new();
        let _ = writeln!(s, "model = {}", if self.model == Model::Gnp { "gnp" } else { "dlp" });
        let _ = writeln!(s, "n = {}", join(self.n_grid.iter().map(|x| x.to_string()).collect()));
        let _ = writeln!(s, "epsilon = {}", join(self.eps_grid.iter().map(|x| x.to_string()).collect()));
        let _ = writeln!(s, "seeds = {}", self.seeds_per_cell);
        let _ = writeln!(s, "seed = {}", self.master_seed);
        let _ = writeln!(s, "embedding = {}", style_text(&self.embedding));
        let _ = writeln!(s, "budget = {}", self.budget);
        if let Some(o) = &self.output {
            let _ = writeln!(s, "output = {o}");
        }
        let _ = writeln!(s, "timing = {}", self.timing);
        let _ = writeln!(s, "gamma = {}", self.gamma);
        let _ = writeln!(s, "witness_trials = {}", self.witness_trials);
        s
    }

    fn cells(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for &n in &self.n_grid {
            for &e in &self.eps_grid {
                out.push((out.len(), n, e));
            }
        }
        out
    }

    /// Seed of run `index` in `cell`.
    pub fn run_seed(&self, cell: usize, index: usize) -> u64 {
        derive_seed(derive_seed(self.master_seed, cell as u64), index as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GiantRow {
    pub schema_version: u32,
    pub model: Model,
    pub n: usize,
    pub epsilon: f64,
    pub cell: usize,
    pub seed_index: usize,
    pub seed: u64,
    pub vertices: usize,
    pub edges: usize,
    pub giant: usize,
    pub core: usize,
    pub kernel_vertices: usize,
    pub kernel_edges: usize,
    pub max_degree: usize,
    pub largest_subset: usize,
    /// `false` when some pair ran out of budget and the size is a lower bound.
    pub subset_exact: bool,
    pub unknown_pairs: usize,
    pub asymptotic_regime: bool,
    pub error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

fn sample_graph(model: Model, n: usize, eps: f64, seed: u64) -> Result<Graph, Error> {
    match model {
        Model::Gnp => sample_gnp(n, ((1.0 + eps) / n as f64).min(1.0), seed),
        Model::Dlp => Ok(sample_dlp(&DlpParams::new(1.0 + eps, n)?, seed)?.graph),
    }
}

/// One giant-component row.
pub fn giant_row(cfg: &ExperimentConfig, cell: usize, n: usize, eps: f64, index: usize) -> GiantRow {
    let seed = cfg.run_seed(cell, index);
    let start = Instant::now();
    let mut row = GiantRow {
        schema_version: SCHEMA_VERSION,
        model: cfg.model,
        n,
        epsilon: eps,
        cell,
        seed_index: index,
        seed,
        vertices: 0,
        edges: 0,
        giant: 0,
        core: 0,
        kernel_vertices: 0,
        kernel_edges: 0,
        max_degree: 0,
        largest_subset: 0,
        subset_exact: false,
        unknown_pairs: 0,
        asymptotic_regime: n < ASYMPTOTIC_N,
        error: String::new(),
        runtime_ms: None,
    };
    let result = (|| -> Result<(), Error> {
        let g = sample_graph(cfg.model, n, eps, derive_seed(seed, 0))?;
        row.vertices = g.vertex_count();
        row.edges = g.edge_count();
        row.giant = g.connected_components().iter().map(Vec::len).max().unwrap_or(0);
        row.core = two_core(&g).vertices.len();
        let k = kernelize(&g);
        row.kernel_vertices = k.kernel.vertex_count;
        row.kernel_edges = k.kernel.edges.len();
        row.max_degree = g.max_degree();
        let eg = random_embedding(&g, cfg.embedding, derive_seed(seed, 1))?;
        let rep = maximal_reconstructible_subsets(&eg, cfg.budget);
        row.largest_subset = rep.largest_subset();
        row.subset_exact = rep.exhausted;
        row.unknown_pairs = rep.unknown_pairs.len();
        Ok(())
    })();
    if let Err(e) = result {
        row.error = e.to_string();
    }
    if cfg.timing {
        row.runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    row
}

/// All cells and seeds, in `(cell, seed index)` order.
pub fn run_giant_experiment(cfg: &ExperimentConfig) -> Vec<GiantRow> {
    let jobs: Vec<(usize, usize, f64, usize)> = cfg
        .cells()
        .into_iter()
        .flat_map(|(c, n, e)| (0..cfg.seeds_per_cell).map(move |s| (c, n, e, s)))
        .collect();
    jobs.par_iter().map(|&(c, n, e, s)| giant_row(cfg, c, n, e, s)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaRow {
    pub schema_version: u32,
    pub check: String,
    pub n: usize,
    pub epsilon: f64,
    pub cell: usize,
    pub seed_index: usize,
    pub seed: u64,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub pass: bool,
    pub asymptotic_regime: bool,
    pub error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

/// Fixed connected partitions with `V' - C2 - (k - 1)` in `{0, 1, 2}`.
pub fn witness_fixtures() -> Vec<(&'static str, Graph, Vec<Vec<usize>>)> {
    let g = |n: usize, e: &[(usize, usize)]| Graph::new(n, e.iter().copied()).expect("fixture graph");
    vec![
        ("p2-split", Graph::path(2), vec![vec![0], vec![1]]),
        ("p3-end", Graph::path(3), vec![vec![0, 1], vec![2]]),
        ("p4-middle", Graph::path(4), vec![vec![0, 1], vec![2, 3]]),
        ("star-three", g(4, &[(0, 1), (0, 2), (0, 3)]), vec![vec![0, 1], vec![2], vec![3]]),
        ("triangle-singletons", Graph::complete(3), vec![vec![0], vec![1], vec![2]]),
        ("triangle-vertex", Graph::complete(3), vec![vec![0], vec![1, 2]]),
        ("c4-dominoes", Graph::cycle(4), vec![vec![0, 1], vec![2, 3]]),
        ("c4-vertex", Graph::cycle(4), vec![vec![0], vec![1, 2, 3]]),
        ("c5-split", Graph::cycle(5), vec![vec![0, 1], vec![2, 3, 4]]),
        ("c6-halves", Graph::cycle(6), vec![vec![0, 1, 2], vec![3, 4, 5]]),
        ("k4-halves", Graph::complete(4), vec![vec![0, 1], vec![2, 3]]),
        ("k4-vertex", Graph::complete(4), vec![vec![0], vec![1, 2, 3]]),
        ("k4-minus-edge", g(4, &[(0, 1), (0, 3), (1, 2), (1, 3), (2, 3)]), vec![vec![0, 1], vec![2, 3]]),
        ("k4-pair-bridge", two_cliques(4, 1), vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]),
        ("triangle-pair-rungs", two_cliques(3, 2), vec![vec![0, 1, 2], vec![3, 4, 5]]),
        ("prism", two_cliques(3, 3), vec![vec![0, 1, 2], vec![3, 4, 5]]),
        ("k4-pair-matching", two_cliques(4, 3), vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]),
    ]
}

/// Two copies of `K_s` joined by the matching `i -- s + i` for `i < rungs`.
fn two_cliques(s: usize, rungs: usize) -> Graph {
    let side = |o: usize| (0..s).flat_map(move |a| (a + 1..s).map(move |b| (o + a, o + b)));
    Graph::new(2 * s, side(0).chain(side(s)).chain((0..rungs).map(|i| (i, s + i)))).expect("fixture graph")
}

/// Pool of `size` consecutive integers.
pub fn integer_pool(size: usize) -> Vec<Rational> {
    (0..size as i64).map(Rational::from).collect()
}

fn kernel_rows(cfg: &ExperimentConfig, cell: usize, n: usize, eps: f64, index: usize) -> Vec<LemmaRow> {
    let seed = cfg.run_seed(cell, index);
    let start = Instant::now();
    let base = LemmaRow {
        schema_version: SCHEMA_VERSION,
        check: String::new(),
        n,
        epsilon: eps,
        cell,
        seed_index: index,
        seed,
        value: 0.0,
        lower: None,
        upper: None,
        pass: false,
        asymptotic_regime: n < ASYMPTOTIC_N,
        error: String::new(),
        runtime_ms: None,
    };
    let sample = DlpParams::new(1.0 + eps, n).and_then(|p| sample_dlp(&p, derive_seed(seed, 0)));
    let elapsed = |r: &mut LemmaRow| {
        if cfg.timing {
            r.runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        }
    };
    let s = match sample {
        Ok(s) => s,
        Err(e) => {
            let mut r = base;
            r.check = "kernel-sample".into();
            r.error = e.to_string();
            elapsed(&mut r);
            return vec![r];
        }
    };
    let e3n = eps.powi(3) * n as f64;
    let kernel = &s.decomposition.kernel;
    let kv = kernel.vertex_count as f64;
    let ke = kernel.edges.len() as f64;
    let dmax = kernel.max_degree() as f64;
    let cap = 10.0 * (n as f64).ln();
    let threshold = 100.0 / (cfg.gamma * eps);
    let m = s.decomposition.edge_path_lengths.len();
    let long = s.decomposition.edge_path_lengths.iter().filter(|&&l| l as f64 >= threshold).count();
    let q = cfg.gamma / 1e8;
    let frac = if m == 0 { 0.0 } else { long as f64 / m as f64 };
    let tail_cap = q + 5.0 * (q * (1.0 - q) / m.max(1) as f64).sqrt();
    let mut rows = Vec::new();
    let mut push = |check: &str, value: f64, lower: Option<f64>, upper: Option<f64>| {
        let mut r = base.clone();
        r.check = check.into();
        r.value = value;
        r.lower = lower;
        r.upper = upper;
        r.pass = lower.is_none_or(|l| value >= l) && upper.is_none_or(|u| value <= u);
        elapsed(&mut r);
        rows.push(r);
    };
    push("kernel-vertices", kv, Some(e3n / 1000.0), Some(16.0 * e3n));
    push("kernel-edges", ke, Some(e3n / 1000.0), Some(32.0 * e3n));
    push("kernel-max-degree", dmax, None, Some(cap));
    push("bare-path-tail", frac, None, Some(tail_cap));
    rows
}

fn witness_rows(cfg: &ExperimentConfig) -> Vec<LemmaRow> {
    let pool = integer_pool(20);
    let cell = cfg.cells().len();
    witness_fixtures()
        .into_par_iter()
        .enumerate()
        .map(|(i, (name, g, blocks))| {
            let seed = cfg.run_seed(cell, i);
            let start = Instant::now();
            let mut r = LemmaRow {
                schema_version: SCHEMA_VERSION,
                check: format!("witness-bound:{name}"),
                n: g.vertex_count(),
                epsilon: 0.0,
                cell,
                seed_index: i,
                seed,
                value: 0.0,
                lower: None,
                upper: None,
                pass: false,
                asymptotic_regime: true,
                error: String::new(),
                runtime_ms: None,
            };
            match estimate_witness_probability(&g, &blocks, &pool, cfg.witness_trials, seed) {
                Ok(p) => {
                    let sigma = (p.bound * (1.0 - p.bound).max(0.0) / p.trials as f64).sqrt();
                    r.value = p.empirical;
                    r.upper = Some(p.bound + 3.0 * sigma);
                    r.pass = p.empirical <= p.bound + 3.0 * sigma;
                }
                Err(e) => r.error = e.to_string(),
            }
            if cfg.timing {
                r.runtime_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            r
        })
        .collect()
}

/// Kernel-size, degree and bare-path checks on the 2-core model for every
/// cell and seed, followed by the witness-probability fixtures.
pub fn run_lemma_checks(cfg: &ExperimentConfig) -> Vec<LemmaRow> {
    let jobs: Vec<(usize, usize, f64, usize)> = cfg
        .cells()
        .into_iter()
        .flat_map(|(c, n, e)| (0..cfg.seeds_per_cell).map(move |s| (c, n, e, s)))
        .collect();
    let mut rows: Vec<LemmaRow> = jobs
        .par_iter()
        .flat_map_iter(|&(c, n, e, s)| kernel_rows(cfg, c, n, e, s))
        .collect();
    rows.extend(witness_rows(cfg));
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::partition_stats;

    #[test]
    fn config_round_trip() {
        let text = "model = dlp\nn = 100, 200\nepsilon = 0.3\nseeds = 4 # four\nembedding = integer-range:0:999\n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.model, Model::Dlp);
        assert_eq!(cfg.n_grid, vec![100, 200]);
        assert_eq!(ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg);
        assert!(ExperimentConfig::parse("budget = 0").is_err());
        assert!(ExperimentConfig::parse("colour = red").is_err());
    }

    #[test]
    fn fixture_exponents() {
        let mut seen = [0; 3];
        for (_, g, blocks) in witness_fixtures() {
            let s = partition_stats(&g, &blocks).unwrap();
            let e = s.v_prime as i64 - s.c2 as i64 - s.c1 as i64;
            assert!((0..=2).contains(&e));
            seen[e as usize] += 1;
        }
        assert!(seen.iter().all(|&c| c > 0));
    }

    #[test]
    fn giant_rows_replay() {
        let cfg = ExperimentConfig {
            n_grid: vec![60],
            seeds_per_cell: 2,
            ..Default::default()
        };
        let a = run_giant_experiment(&cfg);
        let b = run_giant_experiment(&cfg);
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        assert!(a.iter().all(|r| r.asymptotic_regime && r.error.is_empty()));
        assert_eq!(giant_row(&cfg, 0, 60, 0.5, 1), a[1]);
    }
}
