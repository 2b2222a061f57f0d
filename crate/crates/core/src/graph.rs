//! Graph containers and the structural routines shared by every module.
//!
//! Vertices are dense indices `0..n`. Edges of a [`Graph`] are stored sorted
//! with `u < v`; an edge's id is its index in that order.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::{Error, Rational};

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `false` if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Groups sorted internally and ordered by smallest member.
    pub fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut slot = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for v in 0..n {
            let r = self.find(v);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(v);
        }
        out
    }
}

/// Finite simple undirected graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(skip)]
    adj: Vec<Vec<usize>>,
}

/// A cycle as a closed vertex walk; `edges[i]` joins `vertices[i]` and
/// `vertices[(i + 1) % len]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cycle {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

/// An induced subgraph together with the original label of each vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub graph: Graph,
    pub vertices: Vec<usize>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, Error> {
        let mut list = Vec::new();
        let mut seen = HashSet::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::VertexOutOfRange { vertex: a.max(b), n });
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(Error::DuplicateEdge(e.0, e.1));
            }
            list.push(e);
        }
        Ok(Self::from_sorted_unique(n, list))
    }

    fn from_sorted_unique(n: usize, mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort_unstable();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_unique(n, Vec::new())
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        Self::from_sorted_unique(n, edges)
    }

    pub fn path(n: usize) -> Self {
        let edges = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_sorted_unique(n, edges)
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        edges.push((0, n - 1));
        Self::from_sorted_unique(n, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_index(u, v).is_some()
    }

    pub fn with_edge(&self, u: usize, v: usize) -> Result<Graph, Error> {
        Graph::new(self.n, self.edges.iter().copied().chain([(u, v)]))
    }

    /// Same vertex set, edges whose id is in `removed` dropped.
    pub fn without_edges(&self, removed: &HashSet<usize>) -> Graph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !removed.contains(i))
            .map(|(_, &e)| e)
            .collect();
        Self::from_sorted_unique(self.n, edges)
    }

    /// Induced subgraph on `vertices` (any order; relabelled in sorted order).
    pub fn induced(&self, vertices: &[usize]) -> Subgraph {
        let mut vs = vertices.to_vec();
        vs.sort_unstable();
        vs.dedup();
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in vs.iter().enumerate() {
            local[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| local[a] != usize::MAX && local[b] != usize::MAX)
            .map(|&(a, b)| (local[a], local[b]))
            .collect();
        Subgraph {
            graph: Self::from_sorted_unique(vs.len(), edges),
            vertices: vs,
        }
    }

    /// Number of edges with both ends in `set`.
    pub fn edges_within(&self, set: &[usize]) -> usize {
        let inside: HashSet<usize> = set.iter().copied().collect();
        self.edges
            .iter()
            .filter(|(a, b)| inside.contains(a) && inside.contains(b))
            .count()
    }

    /// Components sorted internally, ordered by smallest vertex.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.n);
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        uf.groups()
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.connected_components().len() == 1
    }

    /// BFS spanning forest: `parent[v] = Some((p, edge_id))`, roots have `None`.
    /// Also returns the BFS visiting order.
    pub fn spanning_forest(&self) -> (Vec<Option<(usize, usize)>>, Vec<usize>) {
        let mut parent = vec![None; self.n];
        let mut seen = vec![false; self.n];
        let mut order = Vec::with_capacity(self.n);
        for root in 0..self.n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = Some((v, self.edge_index(v, w).expect("adjacent")));
                        queue.push_back(w);
                    }
                }
            }
        }
        (parent, order)
    }

    /// Fundamental cycle basis of a BFS spanning forest; one cycle per
    /// non-forest edge, so its length is `|E| - |V| + #components`.
    pub fn cycle_basis(&self) -> Vec<Cycle> {
        let (parent, order) = self.spanning_forest();
        let mut depth = vec![0usize; self.n];
        for &v in &order {
            if let Some((p, _)) = parent[v] {
                depth[v] = depth[p] + 1;
            }
        }
        let tree: HashSet<usize> = parent.iter().flatten().map(|&(_, e)| e).collect();
        let mut cycles = Vec::new();
        for (id, &(a, b)) in self.edges.iter().enumerate() {
            if tree.contains(&id) {
                continue;
            }
            // climb to the lowest common ancestor
            let (mut x, mut y) = (a, b);
            let mut left = vec![a];
            let mut left_edges = Vec::new();
            let mut right = vec![b];
            let mut right_edges = Vec::new();
            while x != y {
                if depth[x] >= depth[y] {
                    let (p, e) = parent[x].expect("non-root");
                    left_edges.push(e);
                    left.push(p);
                    x = p;
                } else {
                    let (p, e) = parent[y].expect("non-root");
                    right_edges.push(e);
                    right.push(p);
                    y = p;
                }
            }
            // walk: b .. lca .. a, then close with edge (a, b)
            let mut vertices: Vec<usize> = right.clone();
            let mut edges: Vec<usize> = right_edges.clone();
            let mut tail: Vec<usize> = left[..left.len() - 1].to_vec();
            tail.reverse();
            vertices.extend(tail);
            let mut tail_edges = left_edges.clone();
            tail_edges.reverse();
            edges.extend(tail_edges);
            edges.push(id);
            cycles.push(Cycle { vertices, edges });
        }
        cycles
    }

    /// Blocks (maximal 2-connected subgraphs and bridges) as sorted edge-id
    /// lists, ordered by smallest edge id. Isolated vertices belong to no block.
    pub fn biconnected_components(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut timer = 0;
        let mut blocks = Vec::new();
        let mut edge_stack: Vec<usize> = Vec::new();
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            // frame: (vertex, parent edge, next neighbour cursor)
            let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
            while let Some(top) = stack.last_mut() {
                let (v, pe, cursor) = *top;
                if cursor < self.adj[v].len() {
                    top.2 += 1;
                    let w = self.adj[v][cursor];
                    let e = self.edge_index(v, w).expect("adjacent");
                    if e == pe {
                        continue;
                    }
                    if disc[w] == usize::MAX {
                        edge_stack.push(e);
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        stack.push((w, e, 0));
                    } else if disc[w] < disc[v] {
                        edge_stack.push(e);
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(p, _, _)) = stack.last() {
                        low[p] = low[p].min(low[v]);
                        if low[v] >= disc[p] {
                            let mut block = Vec::new();
                            while let Some(e) = edge_stack.pop() {
                                block.push(e);
                                if e == pe {
                                    break;
                                }
                            }
                            block.sort_unstable();
                            blocks.push(block);
                        }
                    }
                }
            }
        }
        blocks.sort();
        blocks
    }

    /// Length of a shortest cycle, `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        let mut dist = vec![usize::MAX; self.n];
        let mut par = vec![usize::MAX; self.n];
        for s in 0..self.n {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[s] = 0;
            par[s] = usize::MAX;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                if best.is_some_and(|b| 2 * dist[v] + 1 >= b) {
                    break;
                }
                for &w in &self.adj[v] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        par[w] = v;
                        queue.push_back(w);
                    } else if par[v] != w {
                        let len = dist[v] + dist[w] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }
}

/// Undirected multigraph; loops and parallel edges allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiGraph {
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
}

impl MultiGraph {
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self, Error> {
        for &(a, b) in &edges {
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::VertexOutOfRange {
                    vertex: a.max(b),
                    n: vertex_count,
                });
            }
        }
        Ok(MultiGraph { vertex_count, edges })
    }

    /// Loops count twice.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }
}

/// A graph with an injective placement of its vertices on the line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddedGraph {
    graph: Graph,
    positions: Vec<Rational>,
}

/// Edge lengths indexed by edge id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeLengthMap {
    pub lengths: Vec<Rational>,
}

impl EdgeLengthMap {
    pub fn get(&self, graph: &Graph, u: usize, v: usize) -> Option<&Rational> {
        graph.edge_index(u, v).map(|e| &self.lengths[e])
    }
}

impl EmbeddedGraph {
    pub fn new(graph: Graph, positions: Vec<Rational>) -> Result<Self, Error> {
        if positions.len() != graph.vertex_count() {
            return Err(Error::PositionCount {
                expected: graph.vertex_count(),
                got: positions.len(),
            });
        }
        let mut seen = HashSet::with_capacity(positions.len());
        for (v, p) in positions.iter().enumerate() {
            if !seen.insert(p) {
                return Err(Error::DuplicatePosition {
                    vertex: v,
                    position: p.to_string(),
                });
            }
        }
        Ok(EmbeddedGraph { graph, positions })
    }

    pub fn from_integers(graph: Graph, positions: &[i64]) -> Result<Self, Error> {
        Self::new(graph, positions.iter().map(|&x| Rational::from(x)).collect())
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn positions(&self) -> &[Rational] {
        &self.positions
    }

    pub fn position(&self, v: usize) -> &Rational {
        &self.positions[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// `f(u) - f(v)`.
    pub fn delta(&self, u: usize, v: usize) -> Rational {
        &self.positions[u] - &self.positions[v]
    }

    pub fn distance(&self, u: usize, v: usize) -> Rational {
        self.delta(u, v).abs()
    }

    /// Same graph, positions replaced.
    pub fn with_positions(&self, positions: Vec<Rational>) -> Result<Self, Error> {
        Self::new(self.graph.clone(), positions)
    }

    pub fn with_graph(&self, graph: Graph) -> Result<Self, Error> {
        Self::new(graph, self.positions.clone())
    }

    /// Maps every position through `x -> scale * x + shift`; `scale != 0`.
    pub fn affine(&self, scale: &Rational, shift: &Rational) -> Self {
        assert!(!scale.is_zero());
        EmbeddedGraph {
            graph: self.graph.clone(),
            positions: self.positions.iter().map(|p| scale * p + shift).collect(),
        }
    }
}

/// `lengths[e] = |f(u) - f(v)|` for every edge `e = uv`.
pub fn distance_map(eg: &EmbeddedGraph) -> EdgeLengthMap {
    EdgeLengthMap {
        lengths: eg
            .graph()
            .edges()
            .iter()
            .map(|&(a, b)| eg.distance(a, b))
            .collect(),
    }
}
