//! Navigation graph over the Voronoi ridge.
//!
//! Ridge cells below the clearance floor are dropped, the rest is thinned
//! to a unit-width 8-connected skeleton, short leaf chains are pruned, and
//! the result becomes a graph: nodes at junctions and endpoints, edges as
//! maximal chains with their cell polylines. Closed loops without any
//! junction keep their topology through a single anchor node carrying a
//! positive-length self-loop edge.
//!
//! Cell degree is measured in neighbor *runs*: maximal arcs of consecutive
//! foreground cells around the 8-ring. On an 8-connected skeleton a branch
//! leaving a straight bar is diagonally adjacent to two bar cells; counting
//! runs instead of raw neighbors keeps such cells ordinary chain members
//! and junctions where they belong.

use serde::{Deserialize, Serialize};

use crate::clearance::ClearanceField;
use crate::error::GraphError;
use crate::ridge::RidgeSet;
use crate::scalar::Scalar;

/// Clearance floor and leaf-pruning threshold, both in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GraphConfig<S: Scalar> {
    pub min_clearance: S,
    pub spur_prune_length: S,
}

impl<S: Scalar> Default for GraphConfig<S> {
    fn default() -> Self {
        Self {
            min_clearance: S::cast_f64(0.3),
            spur_prune_length: S::cast_f64(0.5),
        }
    }
}

impl<S: Scalar> GraphConfig<S> {
    pub fn validate(&self) -> Result<(), GraphError> {
        if !(self.min_clearance.is_finite() && self.min_clearance >= S::zero()) {
            return Err(GraphError::InvalidConfig(
                "min_clearance must be finite and non-negative".into(),
            ));
        }
        if !(self.spur_prune_length.is_finite() && self.spur_prune_length >= S::zero()) {
            return Err(GraphError::InvalidConfig(
                "spur_prune_length must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Graph node: a junction, endpoint, isolated cell or loop anchor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GraphNode<S: Scalar> {
    pub id: usize,
    pub cx: usize,
    pub cy: usize,
    pub wx: S,
    pub wy: S,
    pub clearance: S,
}

/// Graph edge: a maximal chain between two nodes, with the ridge-cell
/// polyline it follows (endpoints included) and its metric length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GraphEdge<S: Scalar> {
    pub a: usize,
    pub b: usize,
    pub length: S,
    pub polyline: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct NavGraph<S: Scalar> {
    pub nodes: Vec<GraphNode<S>>,
    pub edges: Vec<GraphEdge<S>>,
}

impl<S: Scalar> NavGraph<S> {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes") + "\n"
    }

    pub fn from_json_str(s: &str) -> Result<Self, GraphError> {
        let graph: Self =
            serde_json::from_str(s).map_err(|e| GraphError::MalformedGraph(e.to_string()))?;
        graph.check()?;
        Ok(graph)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), GraphError> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self, GraphError> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    fn check(&self) -> Result<(), GraphError> {
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i {
                return Err(GraphError::MalformedGraph(format!(
                    "node ids must be dense and sorted; found {} at position {i}",
                    node.id
                )));
            }
        }
        for edge in &self.edges {
            if edge.a >= self.nodes.len() || edge.b >= self.nodes.len() {
                return Err(GraphError::MalformedGraph(format!(
                    "edge ({}, {}) references a missing node",
                    edge.a, edge.b
                )));
            }
            if edge.polyline.len() < 2 {
                return Err(GraphError::MalformedGraph(
                    "edge polyline must contain both endpoints".into(),
                ));
            }
        }
        Ok(())
    }

    /// Metric cell size of an edge, recovered from its length and the
    /// unit-step arc of its polyline. The same value comes out of the
    /// in-memory graph and its JSON round-trip.
    pub fn edge_cell_size(&self, edge: &GraphEdge<S>) -> Option<S> {
        if edge.polyline.len() < 2 || edge.length <= S::zero() {
            return None;
        }
        let sqrt2 = (S::one() + S::one()).sqrt();
        let mut unit_arc = S::zero();
        for pair in edge.polyline.windows(2) {
            let diagonal = pair[0][0] != pair[1][0] && pair[0][1] != pair[1][1];
            unit_arc = unit_arc + if diagonal { sqrt2 } else { S::one() };
        }
        (unit_arc > S::zero()).then(|| edge.length / unit_arc)
    }

    /// World coordinates of an edge's polyline cells, anchored at node `a`.
    pub fn edge_world_polyline(&self, edge: &GraphEdge<S>) -> Vec<[S; 2]> {
        let a = &self.nodes[edge.a];
        let Some(res) = self.edge_cell_size(edge) else {
            let b = &self.nodes[edge.b];
            return vec![[a.wx, a.wy], [b.wx, b.wy]];
        };
        let origin = edge.polyline[0];
        edge.polyline
            .iter()
            .map(|cell| {
                let dx = S::cast_usize(cell[0]) - S::cast_usize(origin[0]);
                let dy = S::cast_usize(cell[1]) - S::cast_usize(origin[1]);
                [a.wx + res * dx, a.wy + res * dy]
            })
            .collect()
    }

    /// Connected components over nodes, as a component id per node.
    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.nodes.len()];
        let mut adjacency = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adjacency[e.a].push(e.b);
            adjacency[e.b].push(e.a);
        }
        let mut next = 0;
        for start in 0..self.nodes.len() {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = next;
            while let Some(u) = stack.pop() {
                for &v in &adjacency[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        comp
    }
}

/// Ring order (counter-clockwise, y up): E, NE, N, NW, W, SW, S, SE.
const RING: [(i64, i64); 8] = [
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
];

/// Skeleton bitmap with 8-neighborhood helpers.
struct Mask {
    w: usize,
    h: usize,
    set: Vec<bool>,
}

impl Mask {
    fn get(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.w
            && (y as usize) < self.h
            && self.set[y as usize * self.w + x as usize]
    }

    fn clear(&mut self, x: usize, y: usize) {
        self.set[y * self.w + x] = false;
    }

    fn ring_bits(&self, x: usize, y: usize) -> [bool; 8] {
        let mut bits = [false; 8];
        for (i, (dx, dy)) in RING.iter().enumerate() {
            bits[i] = self.get(x as i64 + dx, y as i64 + dy);
        }
        bits
    }

    fn neighbor_count(&self, x: usize, y: usize) -> usize {
        self.ring_bits(x, y).iter().filter(|b| **b).count()
    }

    /// Crossing number: 0->1 transitions around the ring. A foreground cell
    /// is simple (removal preserves connectivity) exactly when this is 1.
    fn crossing_number(&self, x: usize, y: usize) -> usize {
        let bits = self.ring_bits(x, y);
        (0..8).filter(|&i| !bits[i] && bits[(i + 1) % 8]).count()
    }

    /// Maximal runs of consecutive foreground ring positions, each run as
    /// ring indices in cyclic order. Runs are ordered by their start.
    fn runs(&self, x: usize, y: usize) -> Vec<Vec<usize>> {
        let bits = self.ring_bits(x, y);
        if bits.iter().all(|b| *b) {
            return vec![(0..8).collect()];
        }
        let mut runs = Vec::new();
        for i in 0..8 {
            // A run starts where a background position precedes a foreground one.
            if bits[i] && !bits[(i + 7) % 8] {
                let mut run = vec![i];
                let mut j = (i + 1) % 8;
                while bits[j] {
                    run.push(j);
                    j = (j + 1) % 8;
                }
                runs.push(run);
            }
        }
        runs
    }

    /// Run-based degree; branches incident to the cell.
    fn branch_count(&self, x: usize, y: usize) -> usize {
        self.runs(x, y).len()
    }

    /// The cell a chain continues into within one run: the axis-adjacent
    /// member when present, else the first member in ring order.
    fn run_target(&self, x: usize, y: usize, run: &[usize]) -> (usize, usize) {
        let pick = run
            .iter()
            .copied()
            .find(|&i| RING[i].0 == 0 || RING[i].1 == 0)
            .unwrap_or(run[0]);
        (
            (x as i64 + RING[pick].0) as usize,
            (y as i64 + RING[pick].1) as usize,
        )
    }

    /// Successor of `cur` when entered from `prev` on a degree-2 chain.
    fn chain_successor(
        &self,
        cur: (usize, usize),
        prev: (usize, usize),
    ) -> (usize, usize) {
        let runs = self.runs(cur.0, cur.1);
        debug_assert_eq!(runs.len(), 2, "chain successor needs a degree-2 cell at {:?} from {:?}", cur, prev);
        let holds_prev = |run: &Vec<usize>| {
            run.iter().any(|&i| {
                (cur.0 as i64 + RING[i].0, cur.1 as i64 + RING[i].1)
                    == (prev.0 as i64, prev.1 as i64)
            })
        };
        let other = runs
            .iter()
            .find(|r| !holds_prev(r))
            .expect("one run continues the chain");
        self.run_target(cur.0, cur.1, other)
    }

    fn cells_raster_order(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for y in 0..self.h {
            for x in 0..self.w {
                if self.set[y * self.w + x] {
                    out.push((x, y));
                }
            }
        }
        out
    }
}

/// Builds the navigation graph from ridge cells and the clearance field.
pub fn build_graph<S: Scalar>(
    ridge: &RidgeSet,
    field: &ClearanceField<S>,
    cfg: &GraphConfig<S>,
) -> Result<NavGraph<S>, GraphError> {
    cfg.validate()?;

    let mut mask = Mask {
        w: field.width,
        h: field.height,
        set: vec![false; field.width * field.height],
    };
    let mut survivors = 0usize;
    for &(ix, iy) in ridge {
        if field.clearance(ix, iy) >= cfg.min_clearance {
            mask.set[iy * field.width + ix] = true;
            survivors += 1;
        }
    }
    if survivors == 0 {
        return Err(GraphError::EmptyGraph {
            min_clearance: cfg.min_clearance.to_f64_lossy(),
        });
    }

    thin(&mut mask);
    // Pruning can expose fresh simple cells at the junction it cut from,
    // so thinning and pruning alternate to a joint fixpoint.
    while prune_spurs(&mut mask, field.resolution, cfg.spur_prune_length) {
        thin(&mut mask);
    }
    Ok(extract_graph(&mask, field))
}

/// Sequential connectivity-preserving thinning in raster order. Endpoints
/// (fewer than two neighbors) are never removed.
fn thin(mask: &mut Mask) {
    loop {
        let mut changed = false;
        for (x, y) in mask.cells_raster_order() {
            if !mask.set[y * mask.w + x] {
                continue;
            }
            if mask.neighbor_count(x, y) < 2 {
                continue;
            }
            if mask.crossing_number(x, y) == 1 {
                mask.clear(x, y);
                changed = true;
            }
        }
        if !changed {
            return;
        }
    }
}

/// Removes leaf chains shorter than `max_len` that terminate at a junction.
/// Whole components that are bare paths or isolated cells stay. Returns
/// whether anything was removed.
fn prune_spurs<S: Scalar>(mask: &mut Mask, resolution: S, max_len: S) -> bool {
    if max_len <= S::zero() {
        return false;
    }
    let sqrt2 = (S::one() + S::one()).sqrt();
    let step = |a: (usize, usize), b: (usize, usize)| {
        if a.0 != b.0 && a.1 != b.1 {
            sqrt2 * resolution
        } else {
            resolution
        }
    };
    let mut removed_any = false;
    loop {
        let mut changed = false;
        for (x, y) in mask.cells_raster_order() {
            if !mask.set[y * mask.w + x] || mask.branch_count(x, y) != 1 {
                continue;
            }
            let start = (x, y);
            let runs = mask.runs(x, y);
            let mut cur = mask.run_target(x, y, &runs[0]);
            let mut prev = start;
            let mut chain = vec![start];
            let mut length = step(start, cur);
            while mask.branch_count(cur.0, cur.1) == 2 {
                let next = mask.chain_successor(cur, prev);
                chain.push(cur);
                length = length + step(cur, next);
                prev = cur;
                cur = next;
            }
            if mask.branch_count(cur.0, cur.1) >= 3 && length < max_len {
                for (cx, cy) in chain {
                    mask.clear(cx, cy);
                }
                changed = true;
                removed_any = true;
            }
        }
        if !changed {
            return removed_any;
        }
    }
}

fn extract_graph<S: Scalar>(mask: &Mask, field: &ClearanceField<S>) -> NavGraph<S> {
    let sqrt2 = (S::one() + S::one()).sqrt();
    let res = field.resolution;
    let path_length = |path: &[(usize, usize)]| {
        let mut total = S::zero();
        for pair in path.windows(2) {
            let diagonal = pair[0].0 != pair[1].0 && pair[0].1 != pair[1].1;
            total = total + if diagonal { sqrt2 * res } else { res };
        }
        total
    };

    let mut node_id = vec![usize::MAX; mask.w * mask.h];
    let mut nodes: Vec<GraphNode<S>> = Vec::new();
    let push_node =
        |cell: (usize, usize), nodes: &mut Vec<GraphNode<S>>, node_id: &mut Vec<usize>| {
            let id = nodes.len();
            node_id[cell.1 * mask.w + cell.0] = id;
            let world = field.cell_center(cell.0, cell.1);
            nodes.push(GraphNode {
                id,
                cx: cell.0,
                cy: cell.1,
                wx: world[0],
                wy: world[1],
                clearance: field.clearance(cell.0, cell.1),
            });
            id
        };

    for (x, y) in mask.cells_raster_order() {
        if mask.branch_count(x, y) != 2 {
            push_node((x, y), &mut nodes, &mut node_id);
        }
    }

    let mut consumed = vec![false; mask.w * mask.h];
    let mut edges: Vec<GraphEdge<S>> = Vec::new();
    let mut direct_seen = std::collections::BTreeSet::new();
    let is_node = |cell: (usize, usize), node_id: &[usize]| -> Option<usize> {
        let id = node_id[cell.1 * mask.w + cell.0];
        (id != usize::MAX).then_some(id)
    };
    // Every chain cell has two runs, so a trace visits a cell at most twice.
    let step_limit = 2 * mask.w * mask.h + 2;

    // Chains are entered from every cell adjacent to a node (id order,
    // then ring order), so a chain that leaves a node through a diagonal
    // member of a wider run is still consumed from that node's side.
    for u in 0..nodes.len() {
        let start = (nodes[u].cx, nodes[u].cy);
        for (dx, dy) in RING {
            let (nx, ny) = (start.0 as i64 + dx, start.1 as i64 + dy);
            if !mask.get(nx, ny) {
                continue;
            }
            let first = (nx as usize, ny as usize);
            if let Some(v) = is_node(first, &node_id) {
                // Direct node-node adjacency; record once per pair.
                if direct_seen.insert((u.min(v), u.max(v))) {
                    let path = [start, first];
                    edges.push(GraphEdge {
                        a: u,
                        b: v,
                        length: path_length(&path),
                        polyline: path.iter().map(|c| [c.0, c.1]).collect(),
                    });
                }
                continue;
            }
            if consumed[first.1 * mask.w + first.0] {
                continue;
            }
            let mut path = vec![start, first];
            let (mut prev, mut cur) = (start, first);
            let end = loop {
                consumed[cur.1 * mask.w + cur.0] = true;
                let next = mask.chain_successor(cur, prev);
                path.push(next);
                if let Some(v) = is_node(next, &node_id) {
                    break v;
                }
                assert!(path.len() <= step_limit, "chain trace did not terminate");
                prev = cur;
                cur = next;
            };
            edges.push(GraphEdge {
                a: u,
                b: end,
                length: path_length(&path),
                polyline: path.iter().map(|c| [c.0, c.1]).collect(),
            });
        }
    }

    // Leftover chain cells belong to pure cycles (a cycle cell adjacent to
    // anything else would have a third branch and be a node): anchor each
    // at its raster-first cell and record the loop as a self-loop edge.
    for (x, y) in mask.cells_raster_order() {
        let idx = y * mask.w + x;
        if consumed[idx] || node_id[idx] != usize::MAX {
            continue;
        }
        let anchor = push_node((x, y), &mut nodes, &mut node_id);
        consumed[idx] = true;
        let start = (x, y);
        let runs = mask.runs(x, y);
        let mut path = vec![start];
        let mut prev = start;
        let mut cur = mask.run_target(x, y, &runs[0]);
        while cur != start {
            consumed[cur.1 * mask.w + cur.0] = true;
            path.push(cur);
            let next = mask.chain_successor(cur, prev);
            assert!(path.len() <= step_limit, "cycle trace did not terminate");
            prev = cur;
            cur = next;
        }
        path.push(start);
        edges.push(GraphEdge {
            a: anchor,
            b: anchor,
            length: path_length(&path),
            polyline: path.iter().map(|c| [c.0, c.1]).collect(),
        });
    }

    NavGraph { nodes, edges }
}
