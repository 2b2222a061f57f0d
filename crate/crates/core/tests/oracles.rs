mod common;

use std::collections::{BTreeSet, HashMap};

use common::*;
use linerecon::decompose::{count_partitions_f, expansion, kernelize, two_core, ExpansionMode};
use linerecon::reconstruct::{extract_witness, maximal_reconstructible_subsets, pair_verdict, validate_witness, PairVerdict};
use linerecon::rigidity::{construct_flex_embedding, find_rigidity_certificate, is_nac_coloring, Color};
use linerecon::{Graph, Rational};
use rand::Rng;

const BUDGET: u64 = 1 << 22;

fn check_instance(g: &Graph, f: &[i64]) {
    let eg = embed(g, f);
    let n = g.vertex_count();
    let mut expected = BTreeSet::new();
    for (u, v) in pairs(n) {
        let brute = brute_reconstructible(g, f, u, v);
        match pair_verdict(&eg, u, v, BUDGET).unwrap() {
            PairVerdict::Reconstructible => assert!(brute, "{g:?} {f:?} pair {u} {v}"),
            PairVerdict::NotReconstructible(alt) => {
                assert!(!brute, "{g:?} {f:?} pair {u} {v}");
                assert!(alt.realizes(&eg) && alt.is_injective());
                assert_ne!((&alt.positions[u] - &alt.positions[v]).abs(), eg.distance(u, v));
            }
            PairVerdict::Unknown => panic!("budget ran out on a tiny graph"),
        }
        if brute {
            expected.insert((u, v));
        }
    }
    let rep = maximal_reconstructible_subsets(&eg, BUDGET);
    assert!(rep.exhausted && rep.unknown_pairs.is_empty());
    let got: BTreeSet<(usize, usize)> = rep.reconstructible_pairs.iter().copied().collect();
    assert_eq!(got, expected, "{g:?} {f:?}");
    let related = |a: usize, b: usize| a == b || expected.contains(&(a.min(b), a.max(b)));
    let mut covered = vec![false; n];
    for s in &rep.maximal_subsets {
        for &a in s {
            covered[a] = true;
            for &b in s {
                assert!(related(a, b));
            }
        }
        assert!((0..n).filter(|x| !s.contains(x)).all(|x| !s.iter().all(|&a| related(a, x))));
    }
    assert!(covered.iter().all(|&c| c));
}

#[test]
fn reconstruction_matches_brute_force_on_all_small_graphs() {
    let mut r = rng(11);
    for n in 2..=5 {
        for g in all_graphs(n) {
            let f = distinct_ints(&mut r, n, 0, 3 * n as i64);
            check_instance(&g, &f);
        }
    }
}

#[test]
fn reconstruction_matches_brute_force_on_random_graphs() {
    let mut r = rng(12);
    for _ in 0..300 {
        let n = r.random_range(6..=9);
        let p = r.random_range(0.2..0.7);
        let (g, f) = tight_instance(&mut r, n, p);
        check_instance(&g, &f);
    }
}

#[test]
fn witnesses_satisfy_the_definition_on_every_cycle() {
    let mut r = rng(13);
    let mut seen = 0;
    for _ in 0..200 {
        let n = r.random_range(3..=7);
        let (g, f) = tight_instance(&mut r, n, 0.5);
        if !g.is_connected() || g.edge_count() > 14 {
            continue;
        }
        let eg = embed(&g, &f);
        let cycles = all_cycles(&g);
        for (u, v) in pairs(n) {
            if brute_reconstructible(&g, &f, u, v) {
                continue;
            }
            let w = extract_witness(&eg, u, v, BUDGET).unwrap();
            assert!(validate_witness(&eg, &w).valid);
            assert!(w.blocks[0].contains(&u) && w.blocks[1].contains(&v));
            let mut of = vec![0; n];
            for (i, b) in w.blocks.iter().enumerate() {
                for &x in b {
                    of[x] = i;
                }
            }
            let off = |i: usize, j: usize| -> i64 {
                if i == j {
                    return 0;
                }
                let (a, b, s) = if i < j { (i, j, 1) } else { (j, i, -1) };
                s * w.offsets[&(a, b)].to_f64() as i64
            };
            let cross: Vec<(usize, usize)> = g.edges().iter().copied().filter(|&(a, b)| of[a] != of[b]).collect();
            assert!(2 * cross.len() <= g.edge_count());
            for &(a, b) in &cross {
                assert_eq!(f[a] - f[b], off(of[a], of[b]));
            }
            for c in &cycles {
                // walk the cycle
                let es: Vec<(usize, usize)> = c.iter().map(|&e| g.edge(e)).collect();
                let start = es[0].0;
                let (mut prev, mut cur, mut sum) = (usize::MAX, start, 0i64);
                loop {
                    let &(a, b) = es
                        .iter()
                        .find(|&&(a, b)| (a == cur || b == cur) && (a != prev && b != prev || es.len() == 2))
                        .unwrap();
                    let next = if a == cur { b } else { a };
                    sum += off(of[cur], of[next]);
                    prev = cur;
                    cur = next;
                    if cur == start {
                        break;
                    }
                }
                assert_eq!(sum, 0);
            }
            seen += 1;
        }
    }
    assert!(seen > 50);
}

fn cycles_ok(g: &Graph, color: &[Color]) -> bool {
    let both = color.contains(&Color::Red) && color.contains(&Color::Blue);
    both && all_cycles(g).iter().all(|c| {
        let r = c.iter().filter(|&&e| color[e] == Color::Red).count();
        r != 1 && c.len() - r != 1
    })
}

#[test]
fn nac_validity_matches_cycle_definition() {
    let mut r = rng(14);
    for _ in 0..400 {
        let n = r.random_range(2..=7);
        let g = random_graph(&mut r, n, 0.5);
        if g.edge_count() > 14 {
            continue;
        }
        let color: Vec<Color> = (0..g.edge_count()).map(|_| if r.random_bool(0.5) { Color::Red } else { Color::Blue }).collect();
        assert_eq!(is_nac_coloring(&g, &color).unwrap(), cycles_ok(&g, &color), "{g:?} {color:?}");
    }
}

fn check_rigidity(g: &Graph) {
    let verdict = find_rigidity_certificate(g, BUDGET).unwrap();
    let brute = brute_nac(g);
    assert_eq!(verdict.globally_rigid(), Some(brute.is_none()), "{g:?}");
    if let Some(cert) = verdict.certificate() {
        assert!(cycles_ok(g, &cert.color));
        assert!(cert.satisfies_intersection());
        let (f, alt) = construct_flex_embedding(g, cert).unwrap();
        assert!(alt.realizes(&f) && alt.is_injective());
    }
}

#[test]
fn rigidity_matches_brute_force() {
    for n in 2..=5 {
        for g in all_graphs(n).filter(Graph::is_connected) {
            check_rigidity(&g);
        }
    }
    let mut r = rng(15);
    for _ in 0..150 {
        let n = r.random_range(6..=7);
        let g = random_connected_graph(&mut r, n, 0.55);
        if g.edge_count() <= 15 {
            check_rigidity(&g);
        }
    }
}

#[test]
fn expansion_matches_brute_force() {
    let mut r = rng(16);
    for _ in 0..80 {
        let n = r.random_range(2..=9);
        let p = r.random_range(0.2..0.9);
        let g = random_graph(&mut r, n, p);
        let rep = expansion(&g, ExpansionMode::Exact).unwrap();
        assert_eq!(rep.phi, brute_phi(&g), "{g:?}");
        assert!(rep.exact);
        let s = &rep.witness_set;
        assert!(!s.is_empty() && s.len() <= n / 2);
        let sampled = expansion(&g, ExpansionMode::Sampled { seed: 3 }).unwrap();
        assert!(sampled.phi >= rep.phi);
    }
}

/// Labels every vertex and keeps labellings whose classes have the required
/// sizes, are connected, leave a largest last class and form one super-block.
fn brute_partitions(g: &Graph, sizes: &[usize]) -> u64 {
    let n = g.vertex_count();
    let k = sizes.len() + 1;
    let mut count = 0;
    let total = (k as u64).pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let label: Vec<usize> = (0..n)
            .map(|_| {
                let l = (c % k as u64) as usize;
                c /= k as u64;
                l
            })
            .collect();
        let class = |i: usize| -> Vec<usize> { (0..n).filter(|&v| label[v] == i).collect() };
        let classes: Vec<Vec<usize>> = (0..k).map(class).collect();
        if (0..k - 1).any(|i| classes[i].len() != sizes[i]) {
            continue;
        }
        let last = classes[k - 1].len();
        if last == 0 || sizes.iter().any(|&s| s > last) {
            continue;
        }
        if classes.iter().any(|c| !g.induced(c).graph.is_connected()) {
            continue;
        }
        let mut aux: HashMap<usize, Vec<usize>> = HashMap::new();
        for &(a, b) in g.edges() {
            let (x, y) = (label[a], label[b]);
            if x != y && x < k - 1 && y < k - 1 {
                aux.entry(x).or_default().push(y);
                aux.entry(y).or_default().push(x);
            }
        }
        let mut seen = vec![false; k - 1];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &y in aux.get(&x).into_iter().flatten() {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if seen.iter().all(|&s| s) {
            count += 1;
        }
    }
    count
}

#[test]
fn partition_counts_match_labelling() {
    let mut r = rng(17);
    for _ in 0..60 {
        let n = r.random_range(3..=7);
        let g = random_connected_graph(&mut r, n, 0.5);
        let parts = r.random_range(1..=3usize);
        let sizes: Vec<usize> = (0..parts).map(|_| r.random_range(1..=2)).collect();
        assert_eq!(count_partitions_f(&g, &sizes).unwrap(), brute_partitions(&g, &sizes), "{g:?} {sizes:?}");
    }
}

/// Repeatedly deletes a vertex of degree below two.
fn peel(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut alive = vec![true; n];
    loop {
        let deg = |v: usize| g.neighbors(v).iter().filter(|&&w| alive[w]).count();
        match (0..n).find(|&v| alive[v] && deg(v) < 2) {
            Some(v) => alive[v] = false,
            None => return (0..n).filter(|&v| alive[v]).collect(),
        }
    }
}

#[test]
fn kernel_accounts_for_every_core_edge() {
    let mut r = rng(18);
    for _ in 0..200 {
        let n = r.random_range(2..=40);
        let g = random_graph(&mut r, n, (2.5 / n as f64).min(1.0));
        let core = two_core(&g);
        assert_eq!(core.vertices, peel(&g));
        let k = kernelize(&g);
        let core_edges = core.graph.edge_count();
        let path_edges: usize = k.edge_path_lengths.iter().sum();
        let cycle_edges: usize = k.pure_cycles.iter().map(Vec::len).sum();
        assert_eq!(path_edges + cycle_edges, core_edges);
        assert_eq!(k.edge_path_lengths.len(), k.kernel.edges.len());
        let deg3 = core.vertices.iter().enumerate().filter(|&(i, _)| core.graph.degree(i) >= 3).count();
        assert_eq!(k.kernel.vertex_count, deg3);
        let kernel_deg: usize = k.kernel.degrees().iter().sum();
        assert_eq!(kernel_deg, 2 * k.kernel.edges.len());
        for (i, &v) in k.kernel_vertex_map.iter().enumerate() {
            let local = core.vertices.binary_search(&v).unwrap();
            assert_eq!(k.kernel.degrees()[i], core.graph.degree(local));
        }
    }
}

#[test]
fn rational_positions_round_trip_through_instance_files() {
    let mut r = rng(19);
    for _ in 0..50 {
        let n = r.random_range(1..=8);
        let g = random_graph(&mut r, n, 0.4);
        let nums = distinct_ints(&mut r, n, -1000, 1000);
        let pos: Vec<Rational> = nums.iter().map(|&x| Rational::new(x, 7).unwrap()).collect();
        let eg = linerecon::EmbeddedGraph::new(g, pos).unwrap();
        let text = linerecon::write_instance(&eg);
        assert_eq!(linerecon::read_instance(&text).unwrap(), eg);
    }
}
