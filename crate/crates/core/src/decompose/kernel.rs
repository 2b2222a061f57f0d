use serde::Serialize;

use crate::{Graph, MultiGraph, Subgraph};

/// Repeatedly deletes vertices of degree at most one.
pub fn two_core(g: &Graph) -> Subgraph {
    let n = g.vertex_count();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &w in g.neighbors(v) {
            if alive[w] {
                deg[w] -= 1;
                if deg[w] == 1 {
                    stack.push(w);
                }
            }
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    g.induced(&keep)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelDecomposition {
    /// 2-core vertices in original labels, sorted.
    pub core_vertices: Vec<usize>,
    #[serde(skip)]
    pub two_core: Graph,
    /// Maximal bare paths between kernel vertices, original labels.
    pub bare_paths: Vec<Vec<usize>>,
    pub kernel: MultiGraph,
    /// Kernel vertex to original vertex.
    pub kernel_vertex_map: Vec<usize>,
    /// Number of 2-core edges on the path behind each kernel edge.
    pub edge_path_lengths: Vec<usize>,
    /// 2-core components without a vertex of degree three, in cycle order.
    pub pure_cycles: Vec<Vec<usize>>,
}

/// Contracts every maximal bare path of the 2-core to one kernel edge.
pub fn kernelize(g: &Graph) -> KernelDecomposition {
    let core = two_core(g);
    let h = &core.graph;
    let n = h.vertex_count();
    let branch: Vec<usize> = (0..n).filter(|&v| h.degree(v) >= 3).collect();
    let mut kernel_index = vec![usize::MAX; n];
    for (i, &v) in branch.iter().enumerate() {
        kernel_index[v] = i;
    }
    let mut used = vec![false; h.edge_count()];
    let mut kernel_edges = Vec::new();
    let mut lengths = Vec::new();
    let mut bare_paths = Vec::new();
    for &b in &branch {
        for &first in h.neighbors(b) {
            let e0 = h.edge_index(b, first).expect("adjacent");
            if used[e0] {
                continue;
            }
            used[e0] = true;
            let mut path = vec![b, first];
            let mut cur = first;
            while kernel_index[cur] == usize::MAX {
                let next = *h
                    .neighbors(cur)
                    .iter()
                    .find(|&&w| !used[h.edge_index(cur, w).expect("adjacent")])
                    .expect("degree-2 vertex continues");
                used[h.edge_index(cur, next).expect("adjacent")] = true;
                cur = next;
                path.push(cur);
            }
            kernel_edges.push((kernel_index[b], kernel_index[cur]));
            lengths.push(path.len() - 1);
            bare_paths.push(path.iter().map(|&x| core.vertices[x]).collect());
        }
    }
    let mut pure_cycles = Vec::new();
    let mut seen = vec![false; n];
    for comp in h.connected_components() {
        if comp.iter().any(|&v| kernel_index[v] != usize::MAX) || h.degree(comp[0]) == 0 {
            continue;
        }
        let start = comp[0];
        let mut cyc = vec![start];
        seen[start] = true;
        let mut cur = start;
        loop {
            let next = h.neighbors(cur).iter().copied().find(|&w| !seen[w]);
            match next {
                Some(w) => {
                    seen[w] = true;
                    cyc.push(w);
                    cur = w;
                }
                None => break,
            }
        }
        pure_cycles.push(cyc.iter().map(|&x| core.vertices[x]).collect());
    }
    KernelDecomposition {
        core_vertices: core.vertices.clone(),
        kernel: MultiGraph::new(branch.len(), kernel_edges).expect("kernel endpoints in range"),
        kernel_vertex_map: branch.iter().map(|&v| core.vertices[v]).collect(),
        edge_path_lengths: lengths,
        bare_paths,
        pure_cycles,
        two_core: core.graph,
    }
}
