//! Finite frames `<W, R>` and the powerset operations on them.
//!
//! Vertices are addressed by their position in load order. All set-valued
//! results are [`VertexSet`]s, which iterate in that order.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a vertex in its frame's load order.
pub type Vertex = usize;

/// A subset of a frame's vertices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(FixedBitSet);

impl VertexSet {
    pub fn empty(universe: usize) -> Self {
        VertexSet(FixedBitSet::with_capacity(universe))
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        VertexSet(bits)
    }

    pub fn singleton(universe: usize, v: Vertex) -> Self {
        let mut s = Self::empty(universe);
        s.insert(v);
        s
    }

    pub fn from_iter_in(universe: usize, items: impl IntoIterator<Item = Vertex>) -> Self {
        let mut s = Self::empty(universe);
        for v in items {
            s.insert(v);
        }
        s
    }

    /// The subset encoded by the low `universe` bits of `mask`.
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        debug_assert!(universe <= 64);
        Self::from_iter_in(universe, (0..universe).filter(|&i| mask >> i & 1 == 1))
    }

    pub fn to_mask(&self) -> u64 {
        debug_assert!(self.universe() <= 64);
        self.iter().fold(0u64, |m, i| m | 1 << i)
    }

    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, v: Vertex) {
        self.0.insert(v);
    }

    pub fn remove(&mut self, v: Vertex) {
        self.0.set(v, false);
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.contains(v)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.ones()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut out = self.0.clone();
        out.union_with(&other.0);
        VertexSet(out)
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut out = self.0.clone();
        out.intersect_with(&other.0);
        VertexSet(out)
    }

    pub fn complement(&self) -> VertexSet {
        let mut out = self.0.clone();
        out.toggle_range(..);
        VertexSet(out)
    }

    pub fn to_vec(&self) -> Vec<Vertex> {
        self.iter().collect()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// How `relation_image` reads the relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ImageMode {
    /// `R+(X)`: successors of members of X.
    Forward,
    /// `R-(X)`: predecessors of members of X.
    Backward,
    /// `R(X) = R-(X) ∪ R+(X)`.
    Both,
    /// `l_R(X)`: vertices all of whose successors lie in X.
    Box,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    pub deg_plus: usize,
    pub deg_minus: usize,
    pub deg: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Boundedness {
    pub max_deg_plus: usize,
    pub max_deg_minus: usize,
    pub max_deg: usize,
}

/// A finite directed graph with named vertices.
#[derive(Clone, PartialEq, Eq)]
pub struct Frame {
    ids: Vec<String>,
    index: HashMap<String, Vertex>,
    succ: Vec<Vec<Vertex>>,
    pred: Vec<Vec<Vertex>>,
    edge_count: usize,
}

/// On-disk form: `{"vertices": [id...], "edges": [[from,to]...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameDoc {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
}

impl Frame {
    /// Builds a frame from vertex ids and index pairs. Duplicates are an error.
    pub fn from_indexed(ids: Vec<String>, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Frame> {
        let n = ids.len();
        let mut index = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::input(format!("duplicate vertex id {id:?}")));
            }
        }
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::input(format!("edge ({a},{b}) out of range for {n} vertices")));
            }
            succ[a].push(b);
            pred[b].push(a);
        }
        let mut edge_count = 0;
        for (a, list) in succ.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::input(format!(
                    "duplicate edge [{:?},{:?}]",
                    ids[a], ids[w[0]]
                )));
            }
            edge_count += list.len();
        }
        for list in pred.iter_mut() {
            list.sort_unstable();
        }
        Ok(Frame { ids, index, succ, pred, edge_count })
    }

    /// Like [`Frame::from_indexed`] but silently merges repeated edges.
    pub fn from_indexed_dedup(ids: Vec<String>, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Frame> {
        let mut list: Vec<_> = edges.into_iter().collect();
        list.sort_unstable();
        list.dedup();
        Frame::from_indexed(ids, list)
    }

    /// Builds a frame from string ids, as read from a frame file.
    pub fn from_named<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Frame> {
        let ids: Vec<String> = vertices.iter().map(|s| s.as_ref().to_string()).collect();
        let lookup: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let resolve = |s: &str| {
            lookup
                .get(s)
                .copied()
                .ok_or_else(|| Error::input(format!("edge endpoint {s:?} is not a vertex")))
        };
        let mut pairs = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            pairs.push((resolve(a.as_ref())?, resolve(b.as_ref())?));
        }
        Frame::from_indexed(ids, pairs)
    }

    /// Vertices named `0..n` in order.
    pub fn numbered(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Frame> {
        Frame::from_indexed((0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn empty() -> Frame {
        Frame::from_indexed(Vec::new(), []).expect("empty frame")
    }

    pub fn from_doc(doc: &FrameDoc) -> Result<Frame> {
        Frame::from_named(&doc.vertices, &doc.edges)
    }

    pub fn from_json(text: &str) -> Result<Frame> {
        let doc: FrameDoc = serde_json::from_str(text)?;
        Frame::from_doc(&doc)
    }

    pub fn to_doc(&self) -> FrameDoc {
        FrameDoc {
            vertices: self.ids.clone(),
            edges: self.edges().map(|(a, b)| (self.ids[a].clone(), self.ids[b].clone())).collect(),
        }
    }

    /// Compact JSON, edges in load order of their endpoints.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("frame serializes")
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph \"{name}\" {{\n");
        for id in &self.ids {
            out.push_str(&format!("  \"{id}\";\n"));
        }
        for (a, b) in self.edges() {
            out.push_str(&format!("  \"{}\" -> \"{}\";\n", self.ids[a], self.ids[b]));
        }
        out.push_str("}\n");
        out
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, v: Vertex) -> &str {
        &self.ids[v]
    }

    pub fn vertex(&self, id: &str) -> Result<Vertex> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::input(format!("unknown vertex {id:?}")))
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.ids.len()
    }

    pub fn successors(&self, v: Vertex) -> &[Vertex] {
        &self.succ[v]
    }

    pub fn predecessors(&self, v: Vertex) -> &[Vertex] {
        &self.pred[v]
    }

    /// Successors and predecessors merged, without duplicates, in load order.
    pub fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        let mut out: Vec<Vertex> = self.succ[v].iter().chain(&self.pred[v]).copied().collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.succ[a].binary_search(&b).is_ok()
    }

    pub fn is_reflexive_at(&self, v: Vertex) -> bool {
        self.has_edge(v, v)
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().map(move |&b| (a, b)))
    }

    pub fn empty_set(&self) -> VertexSet {
        VertexSet::empty(self.len())
    }

    pub fn full_set(&self) -> VertexSet {
        VertexSet::full(self.len())
    }

    pub fn set_of(&self, items: impl IntoIterator<Item = Vertex>) -> VertexSet {
        VertexSet::from_iter_in(self.len(), items)
    }

    pub fn set_of_ids<S: AsRef<str>>(&self, ids: &[S]) -> Result<VertexSet> {
        let mut s = self.empty_set();
        for id in ids {
            s.insert(self.vertex(id.as_ref())?);
        }
        Ok(s)
    }

    pub fn names(&self, set: &VertexSet) -> Vec<&str> {
        set.iter().map(|v| self.id(v)).collect()
    }

    pub fn reverse(&self) -> Frame {
        Frame::from_indexed(self.ids.clone(), self.edges().map(|(a, b)| (b, a))).expect("reverse of a frame")
    }

    /// The substructure on `keep`, vertices in load order.
    pub fn induced(&self, keep: &VertexSet) -> (Frame, Vec<Vertex>) {
        let origin: Vec<Vertex> = keep.iter().collect();
        let mut local = vec![usize::MAX; self.len()];
        for (i, &v) in origin.iter().enumerate() {
            local[v] = i;
        }
        let ids = origin.iter().map(|&v| self.ids[v].clone()).collect();
        let edges = origin
            .iter()
            .flat_map(|&a| self.succ[a].iter().map(move |&b| (a, b)))
            .filter(|&(_, b)| keep.contains(b))
            .map(|(a, b)| (local[a], local[b]))
            .collect::<Vec<_>>();
        (Frame::from_indexed(ids, edges).expect("induced subframe"), origin)
    }

    /// Disjoint union; vertex ids are kept as they are and must not clash.
    pub fn disjoint_union(parts: &[&Frame]) -> Result<Frame> {
        let mut ids = Vec::new();
        let mut edges = Vec::new();
        for part in parts {
            let off = ids.len();
            ids.extend(part.ids.iter().cloned());
            edges.extend(part.edges().map(|(a, b)| (a + off, b + off)));
        }
        Frame::from_indexed(ids, edges)
    }

    /// Renames every vertex with `f`.
    pub fn relabel(&self, f: impl Fn(&str) -> String) -> Result<Frame> {
        Frame::from_indexed(self.ids.iter().map(|s| f(s)).collect(), self.edges())
    }

    fn check_set(&self, x: &VertexSet) -> Result<()> {
        if x.universe() != self.len() {
            return Err(Error::input(format!(
                "vertex set over {} elements used with a frame of {} vertices",
                x.universe(),
                self.len()
            )));
        }
        Ok(())
    }

    /// `R+`, `R-`, `R` or `l_R` applied to `x`.
    pub fn relation_image(&self, x: &VertexSet, mode: ImageMode) -> Result<VertexSet> {
        self.check_set(x)?;
        let mut out = self.empty_set();
        match mode {
            ImageMode::Forward => {
                for w in x.iter() {
                    self.succ[w].iter().for_each(|&s| out.insert(s));
                }
            }
            ImageMode::Backward => {
                for s in x.iter() {
                    self.pred[s].iter().for_each(|&w| out.insert(w));
                }
            }
            ImageMode::Both => {
                out = self
                    .relation_image(x, ImageMode::Forward)?
                    .union(&self.relation_image(x, ImageMode::Backward)?);
            }
            ImageMode::Box => {
                for w in self.vertices() {
                    if self.succ[w].iter().all(|&v| x.contains(v)) {
                        out.insert(w);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn degree(&self, w: Vertex) -> Result<DegreeReport> {
        if w >= self.len() {
            return Err(Error::input(format!("unknown vertex index {w}")));
        }
        let deg_plus = self.succ[w].len();
        let deg_minus = self.pred[w].len();
        Ok(DegreeReport { deg_plus, deg_minus, deg: deg_plus + deg_minus })
    }

    pub fn boundedness(&self) -> Boundedness {
        self.vertices().fold(Boundedness::default(), |acc, w| {
            let d = self.degree(w).expect("vertex in range");
            Boundedness {
                max_deg_plus: acc.max_deg_plus.max(d.deg_plus),
                max_deg_minus: acc.max_deg_minus.max(d.deg_minus),
                max_deg: acc.max_deg.max(d.deg),
            }
        })
    }
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Frame{}", self.to_json())
    }
}
