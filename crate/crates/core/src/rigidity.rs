//! Global rigidity on the line through NAC-colourings.
//!
//! A connected graph is globally rigid in one dimension iff it has no
//! NAC-colouring whose red and blue components meet in at most one vertex.

use serde::{Serialize, Serializer};

use crate::reconstruct::AlternativeEmbedding;
use crate::{EmbeddedGraph, Error, Graph, Rational, UnionFind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NacColoring {
    /// Colour of each edge, by edge id.
    pub color: Vec<Color>,
    /// Components of the red subgraph on all vertices, ordered by smallest member.
    pub red_components: Vec<Vec<usize>>,
    pub blue_components: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Serialize for NacColoring {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Edge {
            u: usize,
            v: usize,
            color: Color,
        }
        #[derive(Serialize)]
        struct Out<'a> {
            edges: Vec<Edge>,
            red_components: &'a [Vec<usize>],
            blue_components: &'a [Vec<usize>],
        }
        Out {
            edges: self
                .edges
                .iter()
                .zip(&self.color)
                .map(|(&(u, v), &color)| Edge { u, v, color })
                .collect(),
            red_components: &self.red_components,
            blue_components: &self.blue_components,
        }
        .serialize(s)
    }
}

fn colour_components(g: &Graph, color: &[Color], which: Color) -> UnionFind {
    let mut uf = UnionFind::new(g.vertex_count());
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        if color[e] == which {
            uf.union(a, b);
        }
    }
    uf
}

impl NacColoring {
    /// Wraps a complete colouring; it is not checked to be NAC.
    pub fn new(g: &Graph, color: Vec<Color>) -> Result<Self, Error> {
        if color.len() != g.edge_count() {
            return Err(Error::Invalid(format!(
                "colouring has {} entries for {} edges",
                color.len(),
                g.edge_count()
            )));
        }
        Ok(NacColoring {
            red_components: colour_components(g, &color, Color::Red).groups(),
            blue_components: colour_components(g, &color, Color::Blue).groups(),
            color,
            edges: g.edges().to_vec(),
        })
    }

    pub fn swapped(&self) -> Self {
        NacColoring {
            color: self.color.iter().map(|c| c.other()).collect(),
            red_components: self.blue_components.clone(),
            blue_components: self.red_components.clone(),
            edges: self.edges.clone(),
        }
    }

    /// `|R_i ∩ B_j| <= 1` for all component pairs.
    pub fn satisfies_intersection(&self) -> bool {
        let n: usize = self.red_components.iter().map(Vec::len).sum();
        let mut red = vec![0; n];
        for (i, c) in self.red_components.iter().enumerate() {
            c.iter().for_each(|&v| red[v] = i);
        }
        let mut seen = std::collections::HashSet::new();
        for (j, c) in self.blue_components.iter().enumerate() {
            for &v in c {
                if !seen.insert((red[v], j)) {
                    return false;
                }
            }
        }
        true
    }

    fn component_index(components: &[Vec<usize>], n: usize) -> Vec<usize> {
        let mut idx = vec![0; n];
        for (i, c) in components.iter().enumerate() {
            c.iter().for_each(|&v| idx[v] = i);
        }
        idx
    }
}

/// Both colours are used and no cycle has exactly one edge of a colour.
///
/// An edge of colour `c` lies on a cycle whose other edges all have the
/// other colour iff its endpoints are joined by a path of that other colour.
pub fn is_nac_coloring(g: &Graph, color: &[Color]) -> Result<bool, Error> {
    if color.len() != g.edge_count() {
        return Err(Error::Invalid(format!(
            "colouring has {} entries for {} edges",
            color.len(),
            g.edge_count()
        )));
    }
    if !color.contains(&Color::Red) || !color.contains(&Color::Blue) {
        return Ok(false);
    }
    let mut red = colour_components(g, color, Color::Red);
    let mut blue = colour_components(g, color, Color::Blue);
    Ok(g.edges().iter().enumerate().all(|(e, &(a, b))| match color[e] {
        Color::Red => !blue.same(a, b),
        Color::Blue => !red.same(a, b),
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum RigidityVerdict {
    /// Every colouring was ruled out.
    GloballyRigid { nodes: u64 },
    NotRigid { certificate: NacColoring, nodes: u64 },
    /// The node budget ran out first.
    Unknown { nodes: u64 },
}

impl RigidityVerdict {
    pub fn globally_rigid(&self) -> Option<bool> {
        match self {
            RigidityVerdict::GloballyRigid { .. } => Some(true),
            RigidityVerdict::NotRigid { .. } => Some(false),
            RigidityVerdict::Unknown { .. } => None,
        }
    }

    pub fn certificate(&self) -> Option<&NacColoring> {
        match self {
            RigidityVerdict::NotRigid { certificate, .. } => Some(certificate),
            _ => None,
        }
    }
}

struct NacSearch<'a> {
    g: &'a Graph,
    color: Vec<Option<Color>>,
    nodes: u64,
    budget: u64,
}

enum Step {
    Found(Vec<Color>),
    Exhausted,
    Budget,
}

impl NacSearch<'_> {
    /// Applies forced colours; `false` on a contradiction.
    fn propagate(&mut self) -> bool {
        let n = self.g.vertex_count();
        loop {
            let mut red = UnionFind::new(n);
            let mut blue = UnionFind::new(n);
            for (e, &(a, b)) in self.g.edges().iter().enumerate() {
                match self.color[e] {
                    Some(Color::Red) => {
                        red.union(a, b);
                    }
                    Some(Color::Blue) => {
                        blue.union(a, b);
                    }
                    None => {}
                }
            }
            let mut changed = false;
            for (e, &(a, b)) in self.g.edges().iter().enumerate() {
                let (r, bl) = (red.same(a, b), blue.same(a, b));
                match (self.color[e], r, bl) {
                    (_, true, true) => return false,
                    (Some(Color::Blue), true, _) | (Some(Color::Red), _, true) => return false,
                    (None, true, false) => {
                        self.color[e] = Some(Color::Red);
                        changed = true;
                    }
                    (None, false, true) => {
                        self.color[e] = Some(Color::Blue);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if changed {
                continue;
            }
            // two vertices sharing a red and a blue component stay that way
            let mut keys = std::collections::HashSet::new();
            for v in 0..n {
                if !keys.insert((red.find(v), blue.find(v))) {
                    return false;
                }
            }
            return true;
        }
    }

    fn run(&mut self) -> Step {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Step::Budget;
        }
        if !self.propagate() {
            return Step::Exhausted;
        }
        let Some(e) = self.color.iter().position(Option::is_none) else {
            let color: Vec<Color> = self.color.iter().map(|c| c.expect("complete")).collect();
            let ok = is_nac_coloring(self.g, &color).expect("full length")
                && NacColoring::new(self.g, color.clone())
                    .expect("full length")
                    .satisfies_intersection();
            return if ok { Step::Found(color) } else { Step::Exhausted };
        };
        for c in [Color::Red, Color::Blue] {
            let saved = self.color.clone();
            self.color[e] = Some(c);
            match self.run() {
                Step::Exhausted => self.color = saved,
                other => return other,
            }
        }
        Step::Exhausted
    }
}

/// Searches for a NAC-colouring with the intersection property. Edge 0 is
/// red; edges are decided in id order, red first, so the certificate found is
/// the smallest colour vector in that order.
pub fn find_rigidity_certificate(g: &Graph, budget: u64) -> Result<RigidityVerdict, Error> {
    if g.vertex_count() < 2 {
        return Err(Error::Invalid("rigidity needs at least two vertices".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut color = vec![None; g.edge_count()];
    color[0] = Some(Color::Red);
    let mut s = NacSearch {
        g,
        color,
        nodes: 0,
        budget,
    };
    Ok(match s.run() {
        Step::Found(color) => RigidityVerdict::NotRigid {
            certificate: NacColoring::new(g, color)?,
            nodes: s.nodes,
        },
        Step::Exhausted => RigidityVerdict::GloballyRigid { nodes: s.nodes },
        Step::Budget => RigidityVerdict::Unknown { nodes: s.nodes },
    })
}

/// Two embeddings with equal edge lengths and different distance on some
/// pair: `f(v) = x_R(v) + y_B(v)`, `g(v) = y_B(v) - x_R(v)` with
/// `y_j = j` and `x_i = i * l`, `l` the number of blue components.
pub fn construct_flex_embedding(g: &Graph, cert: &NacColoring) -> Result<(EmbeddedGraph, AlternativeEmbedding), Error> {
    if !is_nac_coloring(g, &cert.color)? {
        return Err(Error::Invalid("colouring is not NAC".into()));
    }
    if !cert.satisfies_intersection() {
        return Err(Error::Invalid("colouring fails the intersection condition".into()));
    }
    let n = g.vertex_count();
    let red = NacColoring::component_index(&cert.red_components, n);
    let blue = NacColoring::component_index(&cert.blue_components, n);
    let l = cert.blue_components.len() as i64;
    let f: Vec<Rational> = (0..n)
        .map(|v| Rational::from(red[v] as i64 * l + blue[v] as i64))
        .collect();
    let alt: Vec<Rational> = (0..n)
        .map(|v| Rational::from(blue[v] as i64 - red[v] as i64 * l))
        .collect();
    let eg = EmbeddedGraph::new(g.clone(), f)?;
    let alt = AlternativeEmbedding { positions: alt };
    if !alt.realizes(&eg) || !alt.is_injective() {
        return Err(Error::Verification("flex embedding does not match edge lengths".into()));
    }
    let differs = (0..n).any(|u| (u + 1..n).any(|v| (&alt.positions[u] - &alt.positions[v]).abs() != eg.distance(u, v)));
    if !differs {
        return Err(Error::Verification("flex embedding changes no distance".into()));
    }
    Ok((eg, alt))
}
