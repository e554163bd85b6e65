//! n-hulls: the undirected n-neighbourhood of a point with the relation
//! restricted to it, compared up to root-preserving isomorphism.

mod canon;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

pub use canon::{canonical_form, HullType, CERTIFICATE_VERSION};

use crate::error::{Error, Result};
use crate::fo::FOFormula;
use crate::frame::{Frame, Vertex, VertexSet};

/// A frame with a distinguished root, every vertex within `depth`
/// undirected steps of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedGraph {
    graph: Frame,
    root: Vertex,
    depth: usize,
    layer: Vec<usize>,
    /// Vertex of the source frame each hull vertex came from, when known.
    origin: Vec<Vertex>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RootedDoc {
    vertices: Vec<String>,
    #[serde(default)]
    edges: Vec<(String, String)>,
    root: String,
    depth: usize,
}

/// Undirected BFS distances from `root`, `usize::MAX` when unreachable.
fn bfs_layers(frame: &Frame, root: Vertex, limit: usize) -> Vec<usize> {
    let mut layer = vec![usize::MAX; frame.len()];
    layer[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        if layer[v] == limit {
            continue;
        }
        for u in frame.neighbors(v) {
            if layer[u] == usize::MAX {
                layer[u] = layer[v] + 1;
                queue.push_back(u);
            }
        }
    }
    layer
}

impl RootedGraph {
    pub fn new(graph: Frame, root: Vertex, depth: usize) -> Result<RootedGraph> {
        if root >= graph.len() {
            return Err(Error::input(format!("root index {root} is not a vertex")));
        }
        let layer = bfs_layers(&graph, root, depth);
        if let Some(v) = layer.iter().position(|&l| l == usize::MAX) {
            return Err(Error::input(format!(
                "vertex {:?} is not within {depth} steps of the root",
                graph.id(v)
            )));
        }
        let origin = graph.vertices().collect();
        Ok(RootedGraph { graph, root, depth, layer, origin })
    }

    pub fn graph(&self) -> &Frame {
        &self.graph
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    /// Undirected distance of each vertex from the root.
    pub fn layers(&self) -> &[usize] {
        &self.layer
    }

    pub fn origin(&self) -> &[Vertex] {
        &self.origin
    }

    /// Vertices ordered by layer, ties in load order; the root comes first.
    pub fn bfs_order(&self) -> Vec<Vertex> {
        let mut order: Vec<Vertex> = self.graph.vertices().collect();
        order.sort_by_key(|&v| (v != self.root, self.layer[v], v));
        order
    }

    pub fn to_json(&self) -> String {
        let doc = self.graph.to_doc();
        let doc = RootedDoc {
            vertices: doc.vertices,
            edges: doc.edges,
            root: self.graph.id(self.root).to_string(),
            depth: self.depth,
        };
        serde_json::to_string(&doc).expect("hull serializes")
    }

    pub fn from_json(text: &str) -> Result<RootedGraph> {
        let doc: RootedDoc = serde_json::from_str(text)?;
        let graph = Frame::from_named(&doc.vertices, &doc.edges)?;
        let root = graph.vertex(&doc.root)?;
        RootedGraph::new(graph, root, doc.depth)
    }
}

/// `⟨w⟩ⁿ`: the vertices within `n` undirected steps of `w` with the induced
/// relation. Vertices are listed in BFS order, so the root is vertex 0.
pub fn hull(frame: &Frame, w: Vertex, n: usize) -> Result<RootedGraph> {
    if w >= frame.len() {
        return Err(Error::input(format!("unknown vertex index {w}")));
    }
    let mut order = vec![w];
    let mut seen = VertexSet::singleton(frame.len(), w);
    let mut layer = vec![0];
    let mut start = 0;
    for depth in 1..=n {
        let end = order.len();
        for i in start..end {
            for u in frame.neighbors(order[i]) {
                if !seen.contains(u) {
                    seen.insert(u);
                    order.push(u);
                    layer.push(depth);
                }
            }
        }
        if order.len() == end {
            break;
        }
        start = end;
    }
    let mut local = std::collections::HashMap::with_capacity(order.len());
    for (i, &v) in order.iter().enumerate() {
        local.insert(v, i);
    }
    let ids = order.iter().map(|&v| frame.id(v).to_string()).collect();
    let edges: Vec<(Vertex, Vertex)> = order
        .iter()
        .enumerate()
        .flat_map(|(i, &v)| frame.successors(v).iter().filter_map(|u| local.get(u)).map(move |&j| (i, j)))
        .collect();
    let graph = Frame::from_indexed(ids, edges)?;
    Ok(RootedGraph { graph, root: 0, depth: n, layer, origin: order })
}

/// Vertices first reached at layer exactly `depth`.
pub fn endpoints(h: &RootedGraph) -> Result<VertexSet> {
    if h.depth == 0 {
        return Err(Error::input("endpoints are defined for hulls of depth at least 1"));
    }
    Ok(h.graph.set_of(h.graph.vertices().filter(|&v| h.layer[v] == h.depth)))
}

/// A root-preserving isomorphism `h1 → h2`, as a map on vertex indices.
pub fn rooted_iso(h1: &RootedGraph, h2: &RootedGraph) -> Option<Vec<Vertex>> {
    let (g1, g2) = (&h1.graph, &h2.graph);
    if g1.len() != g2.len() || g1.edge_count() != g2.edge_count() {
        return None;
    }
    let invariant = |h: &RootedGraph, v: Vertex| {
        let g = &h.graph;
        (h.layer[v], g.successors(v).len(), g.predecessors(v).len(), g.has_edge(v, v))
    };
    let mut profile1: Vec<_> = g1.vertices().map(|v| invariant(h1, v)).collect();
    let mut profile2: Vec<_> = g2.vertices().map(|v| invariant(h2, v)).collect();
    profile1.sort_unstable();
    profile2.sort_unstable();
    if profile1 != profile2 {
        return None;
    }

    let order = h1.bfs_order();
    let mut map = vec![usize::MAX; g1.len()];
    let mut used = vec![false; g2.len()];

    fn extend(
        k: usize,
        order: &[Vertex],
        h1: &RootedGraph,
        h2: &RootedGraph,
        map: &mut [Vertex],
        used: &mut [bool],
        invariant: &dyn Fn(&RootedGraph, Vertex) -> (usize, usize, usize, bool),
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let v = order[k];
        let candidates: Vec<Vertex> = if v == h1.root { vec![h2.root] } else { h2.graph.vertices().collect() };
        for c in candidates {
            if used[c] || invariant(h1, v) != invariant(h2, c) {
                continue;
            }
            let fits = order[..k].iter().all(|&a| {
                let b = map[a];
                h1.graph.has_edge(v, a) == h2.graph.has_edge(c, b) && h1.graph.has_edge(a, v) == h2.graph.has_edge(b, c)
            });
            if !fits {
                continue;
            }
            map[v] = c;
            used[c] = true;
            if extend(k + 1, order, h1, h2, map, used, invariant) {
                return true;
            }
            used[c] = false;
            map[v] = usize::MAX;
        }
        false
    }

    extend(0, &order, h1, h2, &mut map, &mut used, &invariant).then_some(map)
}

/// `φ_h(x)`: true at `v` in a frame exactly when the frame's hull of depth
/// `h.depth()` at `v` is isomorphic to `h` with root sent to `v`.
///
/// The root is `x` and the other vertices `y1, y2, ..` in BFS order; each
/// quantifier is followed by the literals it completes, so evaluation
/// cuts off failing partial embeddings early.
pub fn hull_formula(h: &RootedGraph) -> FOFormula {
    let g = &h.graph;
    let order = h.bfs_order();
    let name = |k: usize| if k == 0 { "x".to_string() } else { format!("y{k}") };
    let lit = |positive: bool, f: FOFormula| if positive { f } else { f.not() };

    // literals that mention order[k] and earlier vertices only
    let literals = |k: usize| -> Vec<FOFormula> {
        let v = order[k];
        let me = name(k);
        let mut out = vec![lit(g.has_edge(v, v), FOFormula::rel(me.clone(), me.clone()))];
        for (j, &a) in order[..k].iter().enumerate() {
            let other = name(j);
            out.push(FOFormula::eq(me.clone(), other.clone()).not());
            out.push(lit(g.has_edge(a, v), FOFormula::rel(other.clone(), me.clone())));
            out.push(lit(g.has_edge(v, a), FOFormula::rel(me.clone(), other)));
        }
        out
    };

    // every neighbour of an inner vertex is one of the named vertices
    let closure: Vec<FOFormula> = order
        .iter()
        .enumerate()
        .filter(|&(_, &v)| h.layer[v] < h.depth)
        .map(|(k, _)| {
            let me = name(k);
            let adjacent = FOFormula::rel(me.clone(), "z").or(FOFormula::rel("z", me));
            let named = FOFormula::disjunction((0..order.len()).map(|j| FOFormula::eq("z", name(j)))).expect("root is named");
            FOFormula::forall("z", adjacent.imp(named))
        })
        .collect();

    let mut body = closure;
    for k in (1..order.len()).rev() {
        let inner = literals(k).into_iter().chain(FOFormula::conjunction(body));
        body = vec![FOFormula::exists(name(k), FOFormula::conjunction(inner).expect("nonempty"))];
    }
    FOFormula::conjunction(literals(0).into_iter().chain(body)).expect("root literal")
}
