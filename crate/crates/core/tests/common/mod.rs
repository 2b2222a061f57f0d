//! Brute-force oracles shared by the integration tests. Each one works from
//! definitions only and shares no search code with the library.
#![allow(dead_code)]

use std::collections::HashSet;

use linerecon::rigidity::Color;
use linerecon::{EmbeddedGraph, Graph, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

/// Every labelled graph on `n` vertices.
pub fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let ps = pairs(n);
    (0u32..1 << ps.len()).map(move |mask| {
        Graph::new(n, ps.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e)).unwrap()
    })
}

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    Graph::new(n, pairs(n).into_iter().filter(|_| rng.random_bool(p))).unwrap()
}

pub fn random_connected_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    loop {
        let g = random_graph(rng, n, p);
        if g.is_connected() {
            return g;
        }
    }
}

/// Distinct integers from `lo..=hi`.
pub fn distinct_ints(rng: &mut impl Rng, n: usize, lo: i64, hi: i64) -> Vec<i64> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = rng.random_range(lo..=hi);
        if seen.insert(x) {
            out.push(x);
        }
    }
    out
}

pub fn embed(g: &Graph, f: &[i64]) -> EmbeddedGraph {
    EmbeddedGraph::from_integers(g.clone(), f).unwrap()
}

fn components(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut label = vec![usize::MAX; n];
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut c = 0;
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        label[s] = c;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if label[y] == usize::MAX {
                    label[y] = c;
                    stack.push(y);
                }
            }
        }
        c += 1;
    }
    label
}

/// Every injective placement of each component, with the component's first
/// vertex pinned at its reference position, matching all edge lengths.
/// Components are placed independently.
pub fn realizations(g: &Graph, f: &[i64]) -> Vec<Vec<Vec<(usize, i64)>>> {
    let n = g.vertex_count();
    let comp = components(n, g.edges());
    let k = comp.iter().copied().max().map_or(0, |c| c + 1);
    let mut out = Vec::new();
    for c in 0..k {
        let verts: Vec<usize> = (0..n).filter(|&v| comp[v] == c).collect();
        // BFS order with a parent edge for each non-root
        let mut order = vec![verts[0]];
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[verts[0]] = true;
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            for &y in g.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    order.push(y);
                }
            }
            i += 1;
        }
        let mut found = Vec::new();
        for signs in 0u64..1 << (order.len() - 1) {
            let mut pos = vec![0i64; n];
            pos[order[0]] = f[order[0]];
            for (t, &y) in order.iter().enumerate().skip(1) {
                let p = parent[y].unwrap();
                let d = (f[y] - f[p]).abs();
                pos[y] = if signs >> (t - 1) & 1 == 1 { pos[p] + d } else { pos[p] - d };
            }
            let lengths_ok = g
                .edges()
                .iter()
                .filter(|&&(a, _)| comp[a] == c)
                .all(|&(a, b)| (pos[a] - pos[b]).abs() == (f[a] - f[b]).abs());
            let distinct: HashSet<i64> = verts.iter().map(|&v| pos[v]).collect();
            if lengths_ok && distinct.len() == verts.len() {
                found.push(verts.iter().map(|&v| (v, pos[v])).collect());
            }
        }
        out.push(found);
    }
    out
}

/// Pair `u, v` keeps its distance in every realization.
pub fn brute_reconstructible(g: &Graph, f: &[i64], u: usize, v: usize) -> bool {
    let comp = components(g.vertex_count(), g.edges());
    if comp[u] != comp[v] {
        return false;
    }
    let reals = realizations(g, f);
    reals[comp[u]].iter().all(|r| {
        let get = |x: usize| r.iter().find(|&&(y, _)| y == x).unwrap().1;
        (get(u) - get(v)).abs() == (f[u] - f[v]).abs()
    })
}

/// Edge sets of all simple cycles, by checking every edge subset.
pub fn all_cycles(g: &Graph) -> Vec<Vec<usize>> {
    let m = g.edge_count();
    assert!(m <= 20, "cycle enumeration limited to 20 edges");
    let n = g.vertex_count();
    let mut out = Vec::new();
    for mask in 1u32..1 << m {
        if mask.count_ones() < 3 {
            continue;
        }
        let es: Vec<(usize, usize)> = (0..m).filter(|&e| mask >> e & 1 == 1).map(|e| g.edge(e)).collect();
        let mut deg = vec![0; n];
        for &(a, b) in &es {
            deg[a] += 1;
            deg[b] += 1;
        }
        if deg.iter().any(|&d| d != 0 && d != 2) {
            continue;
        }
        let comp = components(n, &es);
        let used: HashSet<usize> = (0..n).filter(|&v| deg[v] > 0).map(|v| comp[v]).collect();
        if used.len() == 1 {
            out.push((0..m).filter(|&e| mask >> e & 1 == 1).collect());
        }
    }
    out
}

/// Searches all colourings for one that uses both colours, puts no cycle
/// at exactly one edge of a colour and meets every red component in at
/// most one vertex of every blue component.
pub fn brute_nac(g: &Graph) -> Option<Vec<Color>> {
    let m = g.edge_count();
    if m < 2 {
        return None;
    }
    let cycles = all_cycles(g);
    let n = g.vertex_count();
    for mask in 1u32..(1 << m) - 1 {
        let red = |e: usize| mask >> e & 1 == 1;
        let ok = cycles.iter().all(|c| {
            let r = c.iter().filter(|&&e| red(e)).count();
            r != 1 && c.len() - r != 1
        });
        if !ok {
            continue;
        }
        let reds: Vec<(usize, usize)> = (0..m).filter(|&e| red(e)).map(|e| g.edge(e)).collect();
        let blues: Vec<(usize, usize)> = (0..m).filter(|&e| !red(e)).map(|e| g.edge(e)).collect();
        let rc = components(n, &reds);
        let bc = components(n, &blues);
        let mut meet = HashSet::new();
        if (0..n).all(|v| meet.insert((rc[v], bc[v]))) {
            return Some((0..m).map(|e| if red(e) { Color::Red } else { Color::Blue }).collect());
        }
    }
    None
}

/// Minimum of `e(S, S^c) / d(S)` over nonempty `S` with `|S| <= n / 2`.
pub fn brute_phi(g: &Graph) -> Rational {
    let n = g.vertex_count();
    let mut best: Option<Rational> = None;
    for mask in 1u32..1 << n {
        if mask.count_ones() as usize > n / 2 {
            continue;
        }
        let inside = |v: usize| mask >> v & 1 == 1;
        let d: i64 = (0..n).filter(|&v| inside(v)).map(|v| g.degree(v) as i64).sum();
        let cut = g.edges().iter().filter(|&&(a, b)| inside(a) != inside(b)).count() as i64;
        let r = if d == 0 { Rational::zero() } else { Rational::new(cut, d).unwrap() };
        if best.as_ref().is_none_or(|b| r < *b) {
            best = Some(r);
        }
    }
    best.unwrap()
}

/// Graph `g` with a random distinct integer embedding in `[0, 4n]`, for
/// instances with many coincident lengths.
pub fn tight_instance(rng: &mut impl Rng, n: usize, p: f64) -> (Graph, Vec<i64>) {
    let g = random_graph(rng, n, p);
    let f = distinct_ints(rng, n, 0, 4 * n as i64);
    (g, f)
}
