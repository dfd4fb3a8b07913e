//! Finite truncations (balls) of lazily generated infinite graphs, with
//! oriented edges, degrees and boundary shells.
//!
//! Vertex ids are assigned by canonical breadth-first discovery order from
//! the generator root, using each family's fixed neighbor order. Discovery
//! order at distance d only depends on the ball of radius d, so the same
//! abstract vertex receives the same id in every truncation of the same
//! generator — truncations form a monotone exhaustion.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{GraphGenerator, VertexKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Oriented edge: the fixed orientation points from the smaller vertex id
/// (tail, e⁻) to the larger (head, e⁺); loops keep tail = head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientedEdge {
    pub id: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
}

impl OrientedEdge {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

/// Resource guard for truncation construction.
#[derive(Debug, Clone, Copy)]
pub struct TruncationConfig {
    pub max_vertices: usize,
}

pub const DEFAULT_MAX_VERTICES: usize = 4_000_000;

impl Default for TruncationConfig {
    fn default() -> Self {
        TruncationConfig {
            max_vertices: DEFAULT_MAX_VERTICES,
        }
    }
}

impl TruncationConfig {
    /// Reads `SURFLAB_MAX_VERTICES` from the environment, if set and valid.
    pub fn from_env() -> Self {
        let max_vertices = std::env::var("SURFLAB_MAX_VERTICES")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(DEFAULT_MAX_VERTICES);
        TruncationConfig { max_vertices }
    }
}

/// Finite ball of a generator: immutable after construction.
#[derive(Debug, Clone)]
pub struct GraphView {
    family: String,
    parameters: serde_json::Value,
    radius: u32,
    boundary: Vec<bool>,
    edges: Vec<OrientedEdge>,
    /// Per vertex: (edge, true when this vertex is the head). Loops show up
    /// twice, once per end, so `incidence.len()` is the degree.
    incidence: Vec<Vec<(EdgeId, bool)>>,
    /// Vertex keys, present when the view was built from a generator.
    keys: Option<Vec<VertexKey>>,
    key_index: Option<HashMap<VertexKey, VertexId>>,
    pair_index: HashMap<(u32, u32), EdgeId>,
}

pub fn build_truncation(gen: &GraphGenerator, radius: u32) -> Result<GraphView> {
    build_truncation_with(gen, radius, &TruncationConfig::default())
}

pub fn build_truncation_with(
    gen: &GraphGenerator,
    radius: u32,
    cfg: &TruncationConfig,
) -> Result<GraphView> {
    let mut keys: Vec<VertexKey> = Vec::new();
    let mut dist: Vec<u32> = Vec::new();
    let mut index: HashMap<VertexKey, VertexId> = HashMap::new();

    let root = gen.root();
    keys.push(root.clone());
    dist.push(0);
    index.insert(root, VertexId(0));

    let mut queue: VecDeque<u32> = VecDeque::new();
    queue.push_back(0);
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize];
        if d == radius {
            continue;
        }
        for nk in gen.neighbors(&keys[v as usize]) {
            if !index.contains_key(&nk) {
                if keys.len() >= cfg.max_vertices {
                    return Err(Error::VertexCapExceeded {
                        cap: cfg.max_vertices,
                        radius,
                    });
                }
                let id = VertexId(keys.len() as u32);
                index.insert(nk.clone(), id);
                keys.push(nk);
                dist.push(d + 1);
                queue.push_back(id.0);
            }
        }
    }

    let n = keys.len();
    let boundary: Vec<bool> = dist.iter().map(|&d| d == radius).collect();

    // Second pass over the oracle collects every edge with both endpoints in
    // the ball exactly once, oriented small id -> large id.
    let mut edges: Vec<OrientedEdge> = Vec::new();
    for v in 0..n as u32 {
        for nk in gen.neighbors(&keys[v as usize]) {
            if let Some(&u) = index.get(&nk) {
                if u.0 >= v {
                    edges.push(OrientedEdge {
                        id: EdgeId(edges.len() as u32),
                        tail: VertexId(v),
                        head: u,
                    });
                }
            }
        }
    }

    let mut view = GraphView {
        family: gen.family_name().to_string(),
        parameters: gen.parameters(),
        radius,
        boundary,
        edges,
        incidence: Vec::new(),
        keys: Some(keys),
        key_index: Some(index),
        pair_index: HashMap::new(),
    };
    view.rebuild_indexes();
    Ok(view)
}

impl GraphView {
    /// Builds a view from explicit parts (tests, file loads). Vertex ids must
    /// be dense 0..n in the order given.
    pub fn from_parts(
        family: impl Into<String>,
        parameters: serde_json::Value,
        radius: u32,
        boundary: Vec<bool>,
        edges: Vec<OrientedEdge>,
    ) -> Result<GraphView> {
        let n = boundary.len();
        for (k, e) in edges.iter().enumerate() {
            if e.id.index() != k {
                return Err(Error::InvalidInput(format!(
                    "edge ids must be dense and ordered, got {} at {}",
                    e.id.0, k
                )));
            }
            if e.tail.index() >= n || e.head.index() >= n {
                return Err(Error::UnknownVertex(e.tail.0.max(e.head.0)));
            }
        }
        let mut view = GraphView {
            family: family.into(),
            parameters,
            radius,
            boundary,
            edges,
            incidence: Vec::new(),
            keys: None,
            key_index: None,
            pair_index: HashMap::new(),
        };
        view.rebuild_indexes();
        Ok(view)
    }

    fn rebuild_indexes(&mut self) {
        let n = self.boundary.len();
        let mut incidence: Vec<Vec<(EdgeId, bool)>> = vec![Vec::new(); n];
        let mut pair_index = HashMap::new();
        for e in &self.edges {
            incidence[e.tail.index()].push((e.id, false));
            incidence[e.head.index()].push((e.id, true));
            pair_index.insert((e.tail.0.min(e.head.0), e.tail.0.max(e.head.0)), e.id);
        }
        self.incidence = incidence;
        self.pair_index = pair_index;
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn parameters(&self) -> &serde_json::Value {
        &self.parameters
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn vertex_count(&self) -> usize {
        self.boundary.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.boundary.len() as u32).map(VertexId)
    }

    pub fn edges(&self) -> &[OrientedEdge] {
        &self.edges
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.index() < self.boundary.len()
    }

    pub fn is_boundary(&self, v: VertexId) -> bool {
        self.boundary[v.index()]
    }

    pub fn is_interior(&self, v: VertexId) -> bool {
        !self.boundary[v.index()]
    }

    /// Exactly the vertices at graph distance = radius from the root; empty
    /// only when the generator's component fits inside the ball.
    pub fn boundary_shell(&self) -> BTreeSet<VertexId> {
        self.vertices().filter(|&v| self.is_boundary(v)).collect()
    }

    /// Number of incident edge ends (a loop contributes 2).
    pub fn degree(&self, v: VertexId) -> Result<usize> {
        if !self.contains(v) {
            return Err(Error::UnknownVertex(v.0));
        }
        Ok(self.incidence[v.index()].len())
    }

    pub fn incident(&self, v: VertexId) -> &[(EdgeId, bool)] {
        &self.incidence[v.index()]
    }

    pub fn edge(&self, e: EdgeId) -> &OrientedEdge {
        &self.edges[e.index()]
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.pair_index.get(&(u.0.min(v.0), u.0.max(v.0))).copied()
    }

    /// The other endpoint of `e` as seen from `v` (loops return `v`).
    pub fn opposite(&self, v: VertexId, e: EdgeId) -> VertexId {
        let edge = self.edge(e);
        if edge.tail == v {
            edge.head
        } else {
            edge.tail
        }
    }

    pub fn key(&self, v: VertexId) -> Option<&VertexKey> {
        self.keys.as_ref().map(|k| &k[v.index()])
    }

    pub fn keys(&self) -> Option<&[VertexKey]> {
        self.keys.as_deref()
    }

    pub fn id_of_key(&self, key: &VertexKey) -> Option<VertexId> {
        self.key_index.as_ref().and_then(|m| m.get(key)).copied()
    }

    /// BFS distances from `from` inside the view (u32::MAX if unreachable).
    pub fn distances_from(&self, from: VertexId) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertex_count()];
        dist[from.index()] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(from);
        while let Some(v) = queue.pop_front() {
            let d = dist[v.index()];
            for &(e, _) in self.incident(v) {
                let u = self.opposite(v, e);
                if dist[u.index()] == u32::MAX {
                    dist[u.index()] = d + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count() == 0 {
            return true;
        }
        self.distances_from(VertexId(0))
            .iter()
            .all(|&d| d != u32::MAX)
    }

    /// Genus of the embedding induced by the generator's rotation order
    /// (neighbor order), via face tracing and the Euler formula. Only
    /// meaningful when the family's neighbor order is a planar rotation;
    /// returns None when the view carries no keys or is disconnected.
    pub fn rotation_genus(&self, gen: &GraphGenerator) -> Option<usize> {
        let keys = self.keys.as_ref()?;
        if !self.is_connected() || self.edges.is_empty() {
            return None;
        }
        // rotation[v] = incident edge ids in the generator's ccw order,
        // restricted to edges present in the view
        let mut rotation: Vec<Vec<EdgeId>> = Vec::with_capacity(self.vertex_count());
        let mut rot_pos: HashMap<(u32, u32), usize> = HashMap::new(); // (vertex, edge) -> position
        for v in 0..self.vertex_count() as u32 {
            let mut order = Vec::new();
            for nk in gen.neighbors(&keys[v as usize]) {
                if let Some(u) = self.id_of_key(&nk) {
                    if let Some(e) = self.edge_between(VertexId(v), u) {
                        rot_pos.insert((v, e.0), order.len());
                        order.push(e);
                    }
                }
            }
            rotation.push(order);
        }
        // darts are (edge, true = tail->head); next dart after arriving at w
        // along d is the rotation successor of d's reverse at w
        let dart_count = 2 * self.edges.len();
        let mut seen = vec![false; dart_count];
        let mut faces = 0usize;
        for start in 0..dart_count {
            if seen[start] {
                continue;
            }
            faces += 1;
            let mut dart = start;
            loop {
                seen[dart] = true;
                let e = EdgeId((dart / 2) as u32);
                let forward = dart % 2 == 0;
                let edge = self.edge(e);
                let w = if forward { edge.head } else { edge.tail };
                let pos = rot_pos[&(w.0, e.0)];
                let order = &rotation[w.index()];
                let next_e = order[(pos + 1) % order.len()];
                let next_edge = self.edge(next_e);
                let next_forward = next_edge.tail == w;
                dart = next_e.index() * 2 + usize::from(!next_forward);
                if dart == start {
                    break;
                }
            }
        }
        let v = self.vertex_count() as i64;
        let e = self.edge_count() as i64;
        let f = faces as i64;
        let euler = v - e + f;
        // euler = 2 - 2g for a closed orientable surface
        if euler > 2 || (2 - euler) % 2 != 0 {
            return Some(usize::MAX); // rotation not consistently orientable
        }
        Some(((2 - euler) / 2) as usize)
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            family: self.family.clone(),
            parameters: self.parameters.clone(),
            radius: self.radius,
            vertices: self
                .vertices()
                .map(|v| VertexRecord {
                    id: v.0,
                    boundary: self.is_boundary(v),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    id: e.id.0,
                    tail: e.tail.0,
                    head: e.head.0,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("graph file serializes")
    }

    pub fn from_json(s: &str) -> Result<GraphView> {
        let file: GraphFile = serde_json::from_str(s)?;
        file.into_view()
    }
}

/// On-disk graph format. Field order is fixed so that save/load round-trips
/// are byte-identical.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub family: String,
    pub parameters: serde_json::Value,
    pub radius: u32,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: u32,
    pub boundary: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: u32,
    pub tail: u32,
    pub head: u32,
}

impl GraphFile {
    pub fn into_view(self) -> Result<GraphView> {
        let n = self.vertices.len();
        let mut boundary = vec![false; n];
        for (k, v) in self.vertices.iter().enumerate() {
            if v.id as usize != k {
                return Err(Error::InvalidInput(format!(
                    "vertex ids must be dense and ordered, got {} at {}",
                    v.id, k
                )));
            }
            boundary[k] = v.boundary;
        }
        let edges = self
            .edges
            .iter()
            .map(|e| OrientedEdge {
                id: EdgeId(e.id),
                tail: VertexId(e.tail),
                head: VertexId(e.head),
            })
            .collect();
        GraphView::from_parts(self.family, self.parameters, self.radius, boundary, edges)
    }
}
