//! Realizations of whole components, assembled block by block.
//!
//! A realization of a connected graph is a choice, for every block, of one
//! block class and an orientation, glued at cut vertices. The root block keeps
//! orientation `+1`, which removes the global reflection.

use std::collections::{HashMap, HashSet, VecDeque};

use super::blocks::{build_block, BlockModel};
use crate::{EmbeddedGraph, Rational};

#[derive(Debug, Clone)]
pub(crate) struct GraphModel {
    pub blocks: Vec<BlockModel>,
    /// Blocks containing each vertex.
    pub vertex_blocks: Vec<Vec<usize>>,
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
}

impl GraphModel {
    pub fn new(eg: &EmbeddedGraph, block_budget: u64) -> Self {
        let g = eg.graph();
        let blocks: Vec<BlockModel> = g
            .biconnected_components()
            .iter()
            .map(|edges| build_block(eg, edges, block_budget))
            .collect();
        let mut vertex_blocks = vec![Vec::new(); g.vertex_count()];
        for (i, b) in blocks.iter().enumerate() {
            for &v in &b.vertices {
                vertex_blocks[v].push(i);
            }
        }
        let components = g.connected_components();
        let mut component_of = vec![0; g.vertex_count()];
        for (c, comp) in components.iter().enumerate() {
            for &v in comp {
                component_of[v] = c;
            }
        }
        GraphModel {
            blocks,
            vertex_blocks,
            components,
            component_of,
        }
    }

    /// Blocks of component `c`, sorted.
    pub fn component_blocks(&self, c: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.components[c]
            .iter()
            .flat_map(|&v| self.vertex_blocks[v].iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn component_complete(&self, c: usize) -> bool {
        self.component_blocks(c).iter().all(|&b| self.blocks[b].complete)
    }

    /// Block path from a block containing `u` to a block containing `v`.
    pub fn block_path(&self, u: usize, v: usize) -> Vec<usize> {
        let mut prev: HashMap<usize, Option<usize>> = HashMap::new();
        let mut queue = VecDeque::new();
        for &b in &self.vertex_blocks[u] {
            prev.insert(b, None);
            queue.push_back(b);
        }
        while let Some(b) = queue.pop_front() {
            if self.blocks[b].local(v).is_some() {
                let mut path = vec![b];
                let mut cur = b;
                while let Some(Some(p)) = prev.get(&cur) {
                    path.push(*p);
                    cur = *p;
                }
                path.reverse();
                return path;
            }
            for &x in &self.blocks[b].vertices {
                for &nb in &self.vertex_blocks[x] {
                    if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(nb) {
                        e.insert(Some(b));
                        queue.push_back(nb);
                    }
                }
            }
        }
        Vec::new()
    }

    /// Placement order starting with `path` (a block path) or, when empty,
    /// with the smallest block of component `c`. Every later block is
    /// attached through a vertex already placed.
    pub fn placement_order(&self, c: usize, path: &[usize]) -> Vec<(usize, Option<usize>)> {
        let blocks = self.component_blocks(c);
        let mut order: Vec<(usize, Option<usize>)> = Vec::new();
        let mut seen: HashSet<usize> = HashSet::new();
        let start: Vec<usize> = if path.is_empty() {
            blocks.first().copied().into_iter().collect()
        } else {
            path.to_vec()
        };
        for (i, &b) in start.iter().enumerate() {
            let attach = if i == 0 {
                None
            } else {
                let prev = &self.blocks[start[i - 1]];
                self.blocks[b].vertices.iter().copied().find(|&x| prev.local(x).is_some())
            };
            order.push((b, attach));
            seen.insert(b);
        }
        let mut head = 0;
        while head < order.len() {
            let b = order[head].0;
            head += 1;
            for &x in &self.blocks[b].vertices {
                for &nb in &self.vertex_blocks[x] {
                    if seen.insert(nb) {
                        order.push((nb, Some(x)));
                    }
                }
            }
        }
        order
    }
}

/// Choice of class and orientation for one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Choice {
    pub class: usize,
    pub flip: bool,
}

impl Choice {
    pub const IDENTITY: Choice = Choice {
        class: 0,
        flip: false,
    };
}

fn choices(block: &BlockModel, root: bool, prefer_change: bool) -> Vec<Choice> {
    let mut out = Vec::new();
    for class in 0..block.classes.len() {
        out.push(Choice { class, flip: false });
        if !root {
            out.push(Choice { class, flip: true });
        }
    }
    if prefer_change {
        out.rotate_left(1);
    }
    out
}

/// Positions of the non-attached vertices of `block` under `choice`.
fn place_block(
    block: &BlockModel,
    choice: Choice,
    attach: Option<(usize, &Rational)>,
    anchor: &Rational,
) -> Vec<(usize, Rational)> {
    let h = &block.classes[choice.class];
    let (base_local, base_pos) = match attach {
        Some((a, pos)) => (block.local(a).expect("attach vertex in block"), pos.clone()),
        None => (0, anchor.clone()),
    };
    let mut out = Vec::with_capacity(block.vertices.len());
    for (i, &x) in block.vertices.iter().enumerate() {
        if attach.is_some() && i == base_local {
            continue;
        }
        let d = &h[i] - &h[base_local];
        let p = if choice.flip { &base_pos - &d } else { &base_pos + &d };
        out.push((x, p));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Outcome {
    Stopped,
    Exhausted,
    Budget,
}

/// Depth-first search over block choices in a fixed placement order.
pub(crate) struct Search<'a> {
    pub eg: &'a EmbeddedGraph,
    pub model: &'a GraphModel,
    pub order: Vec<(usize, Option<usize>)>,
    /// After this many blocks are placed, `pair` must have a changed distance.
    pub check_at: usize,
    pub pair: Option<(usize, usize)>,
    pub limit: u64,
    nodes: u64,
    pos: HashMap<usize, Rational>,
    occupied: HashSet<Rational>,
}

impl<'a> Search<'a> {
    pub fn new(
        eg: &'a EmbeddedGraph,
        model: &'a GraphModel,
        order: Vec<(usize, Option<usize>)>,
        check_at: usize,
        pair: Option<(usize, usize)>,
        limit: u64,
    ) -> Self {
        Search {
            eg,
            model,
            order,
            check_at,
            pair,
            limit,
            nodes: 0,
            pos: HashMap::new(),
            occupied: HashSet::new(),
        }
    }

    fn anchor(&self) -> Rational {
        let b = &self.model.blocks[self.order[0].0];
        self.eg.position(b.vertices[0]).clone()
    }

    /// Runs the search; `visit` sees every complete placement and returns
    /// `true` to stop.
    pub fn run(&mut self, visit: &mut dyn FnMut(&HashMap<usize, Rational>) -> bool) -> Outcome {
        if self.order.is_empty() {
            return Outcome::Exhausted;
        }
        let anchor = self.anchor();
        match self.step(0, &anchor, visit) {
            Some(true) => Outcome::Stopped,
            Some(false) => Outcome::Exhausted,
            None => Outcome::Budget,
        }
    }

    /// `Some(true)` stop requested, `Some(false)` exhausted, `None` budget.
    fn step(
        &mut self,
        level: usize,
        anchor: &Rational,
        visit: &mut dyn FnMut(&HashMap<usize, Rational>) -> bool,
    ) -> Option<bool> {
        if level == self.order.len() {
            return Some(visit(&self.pos));
        }
        let (b, attach) = self.order[level];
        let block = &self.model.blocks[b];
        let prefer_change = level < self.check_at;
        for choice in choices(block, level == 0, prefer_change) {
            self.nodes += 1;
            if self.nodes > self.limit {
                return None;
            }
            let at = attach.map(|a| (a, self.pos[&a].clone()));
            let placed = place_block(block, choice, at.as_ref().map(|(a, p)| (*a, p)), anchor);
            let mut ok = true;
            let mut inserted = 0;
            for (_, p) in &placed {
                if !self.occupied.insert(p.clone()) {
                    ok = false;
                    break;
                }
                inserted += 1;
            }
            if ok {
                for (x, p) in &placed {
                    self.pos.insert(*x, p.clone());
                }
                if level + 1 == self.check_at {
                    if let Some((u, v)) = self.pair {
                        let d = (&self.pos[&u] - &self.pos[&v]).abs();
                        ok = d != self.eg.distance(u, v);
                    }
                }
                if ok {
                    match self.step(level + 1, anchor, visit) {
                        Some(true) => return Some(true),
                        None => return None,
                        Some(false) => {}
                    }
                }
                for (x, _) in &placed {
                    self.pos.remove(x);
                }
            }
            for (_, p) in placed.iter().take(inserted) {
                self.occupied.remove(p);
            }
        }
        Some(false)
    }
}

/// Seed realizations of component `c`: one per block and non-identity
/// choice, everything else left as the reference embedding. Only injective
/// ones are returned, as component-indexed position lists.
pub(crate) fn seed_realizations(eg: &EmbeddedGraph, model: &GraphModel, c: usize) -> Vec<Vec<Rational>> {
    let order = model.placement_order(c, &[]);
    let comp = &model.components[c];
    let local: HashMap<usize, usize> = comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut out = Vec::new();
    for (level, &(b, _)) in order.iter().enumerate() {
        let block = &model.blocks[b];
        for choice in choices(block, level == 0, false) {
            if choice == Choice::IDENTITY {
                continue;
            }
            let g = realize(eg, model, &order, |i| if i == level { choice } else { Choice::IDENTITY });
            let mut seen = HashSet::with_capacity(g.len());
            if g.values().all(|p| seen.insert(p.clone())) {
                let mut v = vec![Rational::zero(); comp.len()];
                for (x, p) in g {
                    v[local[&x]] = p;
                }
                out.push(v);
            }
        }
    }
    out
}

/// Positions for a full choice vector along `order` (no injectivity check).
pub(crate) fn realize(
    eg: &EmbeddedGraph,
    model: &GraphModel,
    order: &[(usize, Option<usize>)],
    choice: impl Fn(usize) -> Choice,
) -> HashMap<usize, Rational> {
    let mut pos: HashMap<usize, Rational> = HashMap::new();
    if order.is_empty() {
        return pos;
    }
    let anchor = eg.position(model.blocks[order[0].0].vertices[0]).clone();
    for (i, &(b, attach)) in order.iter().enumerate() {
        let at = attach.map(|a| (a, pos[&a].clone()));
        let placed = place_block(&model.blocks[b], choice(i), at.as_ref().map(|(a, p)| (*a, p)), &anchor);
        pos.extend(placed);
    }
    pos
}
