//! Realizations of a single block, up to translation and reflection.
//!
//! A 2-connected block is built from a shortest cycle followed by ears.
//! Each ear is a path between two already placed vertices, so its signs must
//! solve `sum s_i * delta_i = target`; solutions are listed by splitting the
//! ear in two halves and matching partial sums. Bridges have one class.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::{EmbeddedGraph, Rational};

/// One block of the graph with every injective realization found.
#[derive(Debug, Clone)]
pub(crate) struct BlockModel {
    /// Global vertex ids, sorted.
    pub vertices: Vec<usize>,
    /// Positions aligned with `vertices`. `classes[0]` is the reference
    /// embedding itself.
    pub classes: Vec<Vec<Rational>>,
    pub complete: bool,
}

impl BlockModel {
    pub fn local(&self, v: usize) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }
}

struct Ear {
    /// Local path `v0 .. vk`, both ends placed when the ear is reached.
    path: Vec<usize>,
    deltas: Vec<Rational>,
    left: HashMap<Rational, Vec<u64>>,
    right: Vec<(Rational, u64)>,
}

fn half_sums(deltas: &[Rational]) -> Vec<(Rational, u64)> {
    let mut sums = vec![(Rational::zero(), 0u64)];
    for (i, d) in deltas.iter().enumerate() {
        let mut next = Vec::with_capacity(sums.len() * 2);
        for (s, m) in &sums {
            next.push((s + d, *m));
            next.push((s - d, *m | (1 << i)));
        }
        sums = next;
    }
    sums
}

impl Ear {
    fn new(path: Vec<usize>, pos: &[Rational], spent: &mut u64, limit: u64) -> Option<Ear> {
        let deltas: Vec<Rational> = path.windows(2).map(|w| &pos[w[1]] - &pos[w[0]]).collect();
        let k = deltas.len();
        let split = k / 2;
        let mut left = HashMap::new();
        let mut right = Vec::new();
        if k >= 2 {
            if k > 60 {
                return None;
            }
            let cost = (1u64 << split) + (1u64 << (k - split));
            *spent += cost;
            if *spent > limit {
                return None;
            }
            for (s, m) in half_sums(&deltas[..split]) {
                left.entry(s).or_insert_with(Vec::new).push(m);
            }
            right = half_sums(&deltas[split..])
                .into_iter()
                .map(|(s, m)| (s, m << split))
                .collect();
        }
        Some(Ear {
            path,
            deltas,
            left,
            right,
        })
    }

    /// Sign masks (bit set = sign -1) whose signed sum equals `target`.
    fn solutions(&self, target: &Rational, spent: &mut u64) -> Vec<u64> {
        if self.deltas.len() == 1 {
            *spent += 1;
            return if *target == self.deltas[0] {
                vec![0]
            } else if *target == -&self.deltas[0] {
                vec![1]
            } else {
                vec![]
            };
        }
        *spent += self.right.len() as u64;
        let mut out = Vec::new();
        for (s, m) in &self.right {
            if let Some(ms) = self.left.get(&(target - s)) {
                out.extend(ms.iter().map(|l| l | m));
            }
        }
        out.sort_unstable();
        out
    }
}

/// Shortest cycle through some edge, as a closed local vertex list
/// `c0 c1 .. c_{L-1}` (the edge `c_{L-1} c0` closes it).
fn shortest_cycle(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut best: Option<Vec<usize>> = None;
    let mut parent = vec![usize::MAX; n];
    for a in 0..n {
        for &b in &adj[a] {
            if b < a {
                continue;
            }
            parent.iter_mut().for_each(|p| *p = usize::MAX);
            parent[a] = a;
            let mut queue = VecDeque::from([a]);
            let mut found = false;
            'bfs: while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if x == a && y == b {
                        continue;
                    }
                    if parent[y] == usize::MAX {
                        parent[y] = x;
                        if y == b {
                            found = true;
                            break 'bfs;
                        }
                        queue.push_back(y);
                    }
                }
            }
            if !found {
                continue;
            }
            let mut path = vec![b];
            let mut x = b;
            while x != a {
                x = parent[x];
                path.push(x);
            }
            path.reverse();
            if best.as_ref().is_none_or(|c| path.len() < c.len()) {
                best = Some(path);
            }
        }
    }
    best.expect("2-connected block has a cycle")
}

/// Next ear: an edge between two placed vertices, otherwise a short path
/// through unplaced vertices found by a multi-source search from the placed
/// set.
fn next_ear(adj: &[Vec<usize>], placed: &[bool], used: &HashSet<(usize, usize)>) -> Vec<usize> {
    let n = adj.len();
    for a in 0..n {
        if !placed[a] {
            continue;
        }
        for &b in &adj[a] {
            if a < b && placed[b] && !used.contains(&(a, b)) {
                return vec![a, b];
            }
        }
    }
    let mut dist = vec![usize::MAX; n];
    let mut source = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for v in 0..n {
        if placed[v] {
            dist[v] = 0;
            source[v] = v;
            queue.push_back(v);
        }
    }
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if dist[y] == usize::MAX && !placed[y] {
                dist[y] = dist[x] + 1;
                source[y] = source[x];
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    let mut best: Option<(usize, usize, usize)> = None;
    for x in 0..n {
        for &y in &adj[x] {
            if placed[x] && placed[y] {
                continue;
            }
            if dist[x] == usize::MAX || dist[y] == usize::MAX || source[x] == source[y] {
                continue;
            }
            let len = dist[x] + dist[y] + 1;
            if best.is_none_or(|(l, _, _)| len < l) {
                best = Some((len, x, y));
            }
        }
    }
    let (_, x, y) = best.expect("2-connected block always has an ear");
    let mut path = Vec::new();
    let mut cur = x;
    while !placed[cur] {
        path.push(cur);
        cur = parent[cur];
    }
    path.push(cur);
    path.reverse();
    let mut cur = y;
    while !placed[cur] {
        path.push(cur);
        cur = parent[cur];
    }
    path.push(cur);
    path
}

struct ClassSearch<'a> {
    ears: &'a [Ear],
    pos: Vec<Option<Rational>>,
    occupied: HashSet<Rational>,
    classes: Vec<Vec<Rational>>,
    spent: u64,
    limit: u64,
    aborted: bool,
}

impl ClassSearch<'_> {
    fn run(&mut self, i: usize) {
        if self.aborted {
            return;
        }
        if i == self.ears.len() {
            self.spent += 1;
            self.classes
                .push(self.pos.iter().map(|p| p.clone().expect("placed")).collect());
            if self.spent > self.limit {
                self.aborted = true;
            }
            return;
        }
        let ear = &self.ears[i];
        let start = self.pos[ear.path[0]].clone().expect("ear start placed");
        let end = self.pos[*ear.path.last().unwrap()].clone().expect("ear end placed");
        let target = &end - &start;
        let sols = ear.solutions(&target, &mut self.spent);
        if self.spent > self.limit {
            self.aborted = true;
            return;
        }
        let k = ear.deltas.len();
        for mask in sols {
            let mut placed = Vec::with_capacity(k.saturating_sub(1));
            let mut cur = start.clone();
            let mut ok = true;
            for j in 0..k - 1 {
                if mask >> j & 1 == 1 {
                    cur -= &ear.deltas[j];
                } else {
                    cur += &ear.deltas[j];
                }
                if !self.occupied.insert(cur.clone()) {
                    ok = false;
                    break;
                }
                placed.push((ear.path[j + 1], cur.clone()));
            }
            if ok {
                for (v, p) in &placed {
                    self.pos[*v] = Some(p.clone());
                }
                self.run(i + 1);
                for (v, _) in &placed {
                    self.pos[*v] = None;
                }
            }
            for (_, p) in &placed {
                self.occupied.remove(p);
            }
            if self.aborted {
                return;
            }
        }
    }
}

/// Enumerates the realizations of the block spanned by `edges`, spending at
/// most roughly `limit` units of work.
pub(crate) fn build_block(eg: &EmbeddedGraph, edges: &[usize], limit: u64) -> BlockModel {
    let g = eg.graph();
    let mut vertices: Vec<usize> = edges
        .iter()
        .flat_map(|&e| {
            let (a, b) = g.edge(e);
            [a, b]
        })
        .collect();
    vertices.sort_unstable();
    vertices.dedup();
    let f: Vec<Rational> = vertices.iter().map(|&v| eg.position(v).clone()).collect();
    let mut model = BlockModel {
        vertices,
        classes: vec![f.clone()],
        complete: true,
    };
    if edges.len() == 1 {
        return model;
    }

    let n = model.vertices.len();
    let mut adj = vec![Vec::new(); n];
    for &e in edges {
        let (a, b) = g.edge(e);
        let (la, lb) = (model.local(a).unwrap(), model.local(b).unwrap());
        adj[la].push(lb);
        adj[lb].push(la);
    }
    for list in &mut adj {
        list.sort_unstable();
    }

    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut spent = 0u64;
    let mut placed = vec![false; n];
    let mut used = HashSet::new();
    let mut ears = Vec::new();

    let cycle = shortest_cycle(&adj);
    let (c0, c1) = (cycle[0], cycle[1]);
    placed[c0] = true;
    placed[c1] = true;
    used.insert(key(c0, c1));
    let mut first: Vec<usize> = cycle[1..].to_vec();
    first.push(c0);
    let mut path = first;
    loop {
        for w in path.windows(2) {
            used.insert(key(w[0], w[1]));
        }
        for &v in &path {
            placed[v] = true;
        }
        match Ear::new(path, &f, &mut spent, limit) {
            Some(ear) => ears.push(ear),
            None => {
                model.complete = false;
                return model;
            }
        }
        if used.len() == edges.len() {
            break;
        }
        path = next_ear(&adj, &placed, &used);
    }

    let mut pos = vec![None; n];
    pos[c0] = Some(f[c0].clone());
    pos[c1] = Some(f[c1].clone());
    let occupied: HashSet<Rational> = [f[c0].clone(), f[c1].clone()].into_iter().collect();
    let mut search = ClassSearch {
        ears: &ears,
        pos,
        occupied,
        classes: Vec::new(),
        spent,
        limit,
        aborted: false,
    };
    search.run(0);
    let mut classes = search.classes;
    classes.retain(|c| *c != f);
    classes.sort();
    classes.insert(0, f);
    model.classes = classes;
    model.complete = !search.aborted;
    model
}
