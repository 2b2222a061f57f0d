use serde::Serialize;

use crate::{Error, Graph, UnionFind};

/// Cross-block statistics of a connected partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionStats {
    /// Vertices incident to a cross-block edge.
    pub v_prime: usize,
    /// `k - 1`.
    pub c1: usize,
    /// Components with at least two vertices of the graph formed by the
    /// cross-block edges.
    pub c2: usize,
    /// Components of the auxiliary graph on all blocks but the largest.
    pub super_blocks: usize,
    /// Index of the block treated as largest (ties go to the last one).
    pub largest_block: usize,
}

fn block_labels(n: usize, blocks: &[Vec<usize>]) -> Result<Vec<usize>, Error> {
    let mut label = vec![usize::MAX; n];
    for (i, b) in blocks.iter().enumerate() {
        for &v in b {
            if v >= n {
                return Err(Error::VertexOutOfRange { vertex: v, n });
            }
            if label[v] != usize::MAX {
                return Err(Error::Invalid(format!("vertex {v} is in two blocks")));
            }
            label[v] = i;
        }
    }
    if let Some(v) = label.iter().position(|&l| l == usize::MAX) {
        return Err(Error::Invalid(format!("vertex {v} is in no block")));
    }
    Ok(label)
}

fn super_block_count(g: &Graph, label: &[usize], k: usize, largest: usize) -> usize {
    let mut uf = UnionFind::new(k);
    for &(a, b) in g.edges() {
        let (x, y) = (label[a], label[b]);
        if x != y && x != largest && y != largest {
            uf.union(x, y);
        }
    }
    (0..k).filter(|&i| i != largest && uf.find(i) == i).count()
}

pub fn partition_stats(g: &Graph, blocks: &[Vec<usize>]) -> Result<PartitionStats, Error> {
    let n = g.vertex_count();
    let label = block_labels(n, blocks)?;
    for (i, b) in blocks.iter().enumerate() {
        if b.is_empty() || !g.induced(b).graph.is_connected() {
            return Err(Error::Invalid(format!("block {i} is not connected")));
        }
    }
    let k = blocks.len();
    if k <= 1 {
        return Ok(PartitionStats {
            v_prime: 0,
            c1: 0,
            c2: 0,
            super_blocks: 0,
            largest_block: 0,
        });
    }
    let mut touched = vec![false; n];
    let mut uf = UnionFind::new(n);
    for &(a, b) in g.edges() {
        if label[a] != label[b] {
            touched[a] = true;
            touched[b] = true;
            uf.union(a, b);
        }
    }
    let v_prime = touched.iter().filter(|&&t| t).count();
    let c2 = (0..n).filter(|&v| touched[v] && uf.find(v) == v).count();
    let mut largest = 0;
    for i in 0..k {
        if blocks[i].len() >= blocks[largest].len() {
            largest = i;
        }
    }
    Ok(PartitionStats {
        v_prime,
        c1: k - 1,
        c2,
        super_blocks: super_block_count(g, &label, k, largest),
        largest_block: largest,
    })
}

/// Largest graph accepted by [`count_partitions_f`].
pub const COUNT_LIMIT: usize = 12;

fn mask_connected(g: &Graph, mask: u32) -> bool {
    if mask == 0 {
        return false;
    }
    let start = mask.trailing_zeros() as usize;
    let mut seen = 1u32 << start;
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for &y in g.neighbors(x) {
            let bit = 1u32 << y;
            if mask & bit != 0 && seen & bit == 0 {
                seen |= bit;
                stack.push(y);
            }
        }
    }
    seen == mask
}

struct Counter<'a> {
    g: &'a Graph,
    sizes: &'a [usize],
    by_size: Vec<Vec<u32>>,
    chosen: Vec<u32>,
    full: u32,
    count: u64,
}

impl Counter<'_> {
    fn run(&mut self, i: usize, used: u32) {
        if i == self.sizes.len() {
            let rest = self.full & !used;
            let max = self.sizes.iter().copied().max().unwrap_or(0);
            if (rest.count_ones() as usize) < max.max(1) || !mask_connected(self.g, rest) {
                return;
            }
            if self.single_super_block() {
                self.count += 1;
            }
            return;
        }
        for idx in 0..self.by_size[self.sizes[i]].len() {
            let m = self.by_size[self.sizes[i]][idx];
            if m & used == 0 {
                self.chosen.push(m);
                self.run(i + 1, used | m);
                self.chosen.pop();
            }
        }
    }

    fn single_super_block(&self) -> bool {
        let k = self.chosen.len();
        let mut uf = UnionFind::new(k);
        for &(a, b) in self.g.edges() {
            let find = |v: usize| self.chosen.iter().position(|&m| m >> v & 1 == 1);
            if let (Some(x), Some(y)) = (find(a), find(b)) {
                if x != y {
                    uf.union(x, y);
                }
            }
        }
        (0..k).filter(|&i| uf.find(i) == i).count() == 1
    }
}

/// Number of connected partitions `S_1, ..., S_k` with `|S_i| = sizes[i]`
/// for `i < k`, `S_k` a largest block, and exactly one super-block.
pub fn count_partitions_f(g: &Graph, sizes: &[usize]) -> Result<u64, Error> {
    let n = g.vertex_count();
    if n > COUNT_LIMIT {
        return Err(Error::SizeLimit {
            what: "partition enumeration vertices",
            limit: COUNT_LIMIT,
            got: n,
        });
    }
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::Invalid("block sizes must be nonempty and positive".into()));
    }
    if sizes.iter().sum::<usize>() >= n {
        return Ok(0);
    }
    let full = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let mut by_size = vec![Vec::new(); n + 1];
    for mask in 1..=full {
        if mask_connected(g, mask) {
            by_size[mask.count_ones() as usize].push(mask);
        }
    }
    let mut c = Counter {
        g,
        sizes,
        by_size,
        chosen: Vec::new(),
        full,
        count: 0,
    };
    c.run(0, 0);
    Ok(c.count)
}

/// `n (1000 ln ln n)^(2 * total)`.
pub fn partition_count_bound(n: usize, total: usize) -> f64 {
    let l = (n as f64).ln().ln();
    n as f64 * (1000.0 * l).powf(2.0 * total as f64)
}
