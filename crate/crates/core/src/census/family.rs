//! Finitely presented infinite frames and their finite truncations.
//!
//! A family is the disjoint union of a finite base, ω copies of each
//! template, a number of periodic rays or lines, and at most one builtin
//! generator.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Frame, FrameDoc, Vertex, VertexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RayKind {
    /// Copies `0, 1, 2, ...`.
    Ray,
    /// Copies `..., -1, 0, 1, ...`.
    Line,
}

/// Copies of `period` glued in sequence: each `(a, b)` in `seam` is an edge
/// from `a` in copy k to `b` in copy k+1, each `(a, b)` in `back_seam` an
/// edge from `a` in copy k+1 to `b` in copy k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayPresentation {
    pub period: Frame,
    pub seam: Vec<(Vertex, Vertex)>,
    pub back_seam: Vec<(Vertex, Vertex)>,
    pub kind: RayKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeBound {
    Yes(usize),
    No,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    /// `⨄ₙ ⟨n, <⟩`: component c is the strict linear order on c+1 points.
    ChainsLt,
    /// `⟨ℕ, <⟩`.
    NatLt,
    /// `⟨ℕ, S⟩`.
    NatSucc,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::ChainsLt => "chains_lt",
            Builtin::NatLt => "nat_lt",
            Builtin::NatSucc => "nat_succ",
        }
    }

    pub fn degree_bounded(self) -> DegreeBound {
        match self {
            Builtin::ChainsLt | Builtin::NatLt => DegreeBound::No,
            Builtin::NatSucc => DegreeBound::Yes(2),
        }
    }

    /// Whether every component is finite, so that a truncation contains
    /// whole components only.
    pub fn components_finite(self) -> bool {
        matches!(self, Builtin::ChainsLt)
    }

    /// Components emitted at `budget`, each a list of local edges on
    /// `size` vertices.
    fn components(self, budget: usize) -> Vec<(usize, Vec<(Vertex, Vertex)>)> {
        let lt = |n: usize| (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        match self {
            Builtin::ChainsLt => (0..budget).map(|c| (c + 1, lt(c + 1))).collect(),
            Builtin::NatLt => vec![(budget, lt(budget))],
            Builtin::NatSucc => vec![(budget, (1..budget).map(|i| (i - 1, i)).collect())],
        }
    }

    /// Vertices (component, index) of a truncation whose neighbourhood in
    /// the infinite frame is not fully present.
    fn frontier(self, budget: usize, component: usize, index: usize) -> bool {
        match self {
            Builtin::ChainsLt => false,
            Builtin::NatLt => true,
            Builtin::NatSucc => component == 0 && index + 1 == budget,
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyPresentation {
    pub base: Frame,
    pub omega_templates: Vec<Frame>,
    pub rays: Vec<RayPresentation>,
    pub generator: Option<Builtin>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RayDoc {
    period: FrameDoc,
    #[serde(default)]
    seam: Vec<(String, String)>,
    #[serde(default)]
    back_seam: Vec<(String, String)>,
    kind: RayKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorDoc {
    builtin: Builtin,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyDoc {
    #[serde(default)]
    base: Option<FrameDoc>,
    #[serde(default)]
    omega_templates: Vec<FrameDoc>,
    #[serde(default)]
    rays: Vec<RayDoc>,
    #[serde(default)]
    generator: Option<GeneratorDoc>,
}

/// Which part of the family a vertex of a truncation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Base,
    Template { template: usize, copy: usize },
    Ray { ray: usize, copy: i64 },
    Generator { component: usize },
}

impl Part {
    /// Parts repeated ω times in the family.
    pub fn is_periodic(self) -> bool {
        matches!(self, Part::Template { .. } | Part::Ray { .. })
    }
}

/// A finite truncation of a family.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub frame: Frame,
    pub part: Vec<Part>,
    /// Vertices whose neighbourhood in the infinite frame is cut off.
    pub frontier: VertexSet,
}

impl Expansion {
    /// Vertices at undirected distance ≥ `n` from every frontier vertex: their
    /// depth-n hulls are the same as in the infinite frame.
    pub fn settled(&self, n: usize) -> VertexSet {
        let f = &self.frame;
        let mut dist = vec![usize::MAX; f.len()];
        let mut queue: VecDeque<Vertex> = self.frontier.iter().collect();
        for v in self.frontier.iter() {
            dist[v] = 0;
        }
        while let Some(v) = queue.pop_front() {
            if dist[v] + 1 >= n {
                continue;
            }
            for u in f.neighbors(v) {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        f.set_of(f.vertices().filter(|&v| dist[v] == usize::MAX || dist[v] >= n))
    }
}

impl FamilyPresentation {
    pub fn from_base(base: Frame) -> Self {
        FamilyPresentation { base, omega_templates: Vec::new(), rays: Vec::new(), generator: None }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FamilyDoc = serde_json::from_str(text)?;
        let base = match &doc.base {
            Some(b) => Frame::from_doc(b)?,
            None => Frame::empty(),
        };
        let omega_templates = doc.omega_templates.iter().map(Frame::from_doc).collect::<Result<Vec<_>>>()?;
        let rays = doc
            .rays
            .iter()
            .map(|r| {
                let period = Frame::from_doc(&r.period)?;
                let pairs = |list: &[(String, String)]| -> Result<Vec<(Vertex, Vertex)>> {
                    list.iter().map(|(a, b)| Ok((period.vertex(a)?, period.vertex(b)?))).collect()
                };
                let seam = pairs(&r.seam)?;
                let back_seam = pairs(&r.back_seam)?;
                Ok(RayPresentation { period, seam, back_seam, kind: r.kind })
            })
            .collect::<Result<Vec<_>>>()?;
        let fam = FamilyPresentation { base, omega_templates, rays, generator: doc.generator.map(|g| g.builtin) };
        fam.validate()?;
        Ok(fam)
    }

    pub fn to_json(&self) -> String {
        let pairs = |period: &Frame, list: &[(Vertex, Vertex)]| {
            list.iter().map(|&(a, b)| (period.id(a).to_string(), period.id(b).to_string())).collect()
        };
        let doc = FamilyDoc {
            base: (!self.base.is_empty()).then(|| self.base.to_doc()),
            omega_templates: self.omega_templates.iter().map(Frame::to_doc).collect(),
            rays: self
                .rays
                .iter()
                .map(|r| RayDoc {
                    period: r.period.to_doc(),
                    seam: pairs(&r.period, &r.seam),
                    back_seam: pairs(&r.period, &r.back_seam),
                    kind: r.kind,
                })
                .collect(),
            generator: self.generator.map(|builtin| GeneratorDoc { builtin }),
        };
        serde_json::to_string(&doc).expect("family serializes")
    }

    fn validate(&self) -> Result<()> {
        for (i, r) in self.rays.iter().enumerate() {
            if r.period.is_empty() {
                return Err(Error::input(format!("ray {i} has an empty period")));
            }
            for &(a, b) in r.seam.iter().chain(&r.back_seam) {
                if a >= r.period.len() || b >= r.period.len() {
                    return Err(Error::input(format!("ray {i} has a seam edge outside its period")));
                }
            }
        }
        Ok(())
    }

    /// `⟨ℕ, S⟩` as a one-vertex period glued forward.
    pub fn nat_succ_ray() -> Self {
        let period = Frame::numbered(1, []).expect("one point");
        let ray = RayPresentation { period, seam: vec![(0, 0)], back_seam: Vec::new(), kind: RayKind::Ray };
        FamilyPresentation { base: Frame::empty(), omega_templates: Vec::new(), rays: vec![ray], generator: None }
    }

    pub fn builtin(generator: Builtin) -> Self {
        FamilyPresentation { base: Frame::empty(), omega_templates: Vec::new(), rays: Vec::new(), generator: Some(generator) }
    }

    /// Whether every vertex of the infinite frame has bounded `deg⁺ + deg⁻`.
    pub fn degree_bounded(&self) -> DegreeBound {
        match self.generator.map(Builtin::degree_bounded) {
            None => DegreeBound::Yes(self.structural_degree_bound()),
            Some(DegreeBound::Yes(m)) => DegreeBound::Yes(m.max(self.structural_degree_bound())),
            Some(other) => other,
        }
    }

    /// Degree bound of base, templates and rays (those are always bounded).
    fn structural_degree_bound(&self) -> usize {
        let mut m = self.base.boundedness().max_deg;
        for t in &self.omega_templates {
            m = m.max(t.boundedness().max_deg);
        }
        for r in &self.rays {
            // a middle copy of a line sees seams on both sides
            let probe = ray_frame(r, 3, RayKind::Line).0;
            m = m.max(probe.boundedness().max_deg);
        }
        m
    }

    /// Largest undirected diameter of a template component.
    pub fn template_diameter(&self) -> usize {
        self.omega_templates
            .iter()
            .flat_map(|t| t.vertices().map(move |v| eccentricity(t, v)))
            .max()
            .unwrap_or(0)
    }

    pub fn has_generator(&self) -> bool {
        self.generator.is_some()
    }
}

fn eccentricity(f: &Frame, v: Vertex) -> usize {
    let mut dist = vec![usize::MAX; f.len()];
    dist[v] = 0;
    let mut queue = VecDeque::from([v]);
    let mut far = 0;
    while let Some(a) = queue.pop_front() {
        far = far.max(dist[a]);
        for b in f.neighbors(a) {
            if dist[b] == usize::MAX {
                dist[b] = dist[a] + 1;
                queue.push_back(b);
            }
        }
    }
    far
}

/// `budget` copies of a ray (copies `|k| < budget` of a line), with local
/// ids `<copy>:<id>`, plus the copy index of each vertex.
fn ray_frame(r: &RayPresentation, budget: usize, kind: RayKind) -> (Frame, Vec<i64>) {
    let copies: Vec<i64> = match kind {
        RayKind::Ray => (0..budget as i64).collect(),
        RayKind::Line => (-(budget as i64) + 1..budget as i64).collect(),
    };
    let p = r.period.len();
    let mut ids = Vec::new();
    let mut copy_of = Vec::new();
    for &k in &copies {
        for j in r.period.vertices() {
            ids.push(format!("{k}:{}", r.period.id(j)));
            copy_of.push(k);
        }
    }
    let mut edges = Vec::new();
    for (slot, _) in copies.iter().enumerate() {
        let off = slot * p;
        edges.extend(r.period.edges().map(|(a, b)| (off + a, off + b)));
        if slot + 1 < copies.len() {
            let next = off + p;
            edges.extend(r.seam.iter().map(|&(a, b)| (off + a, next + b)));
            edges.extend(r.back_seam.iter().map(|&(a, b)| (next + a, off + b)));
        }
    }
    (Frame::from_indexed_dedup(ids, edges).expect("ray copies"), copy_of)
}

/// A ray or line on its own, truncated at `budget` copies per direction.
pub(crate) fn ray_expansion(r: &RayPresentation, budget: usize) -> (Frame, Vec<i64>) {
    ray_frame(r, budget, r.kind)
}

struct Builder {
    ids: Vec<String>,
    edges: Vec<(Vertex, Vertex)>,
    part: Vec<Part>,
    frontier: Vec<Vertex>,
}

impl Builder {
    fn add(&mut self, f: &Frame, name: impl Fn(&str) -> String, part: impl Fn(Vertex) -> Part) -> usize {
        let off = self.ids.len();
        for v in f.vertices() {
            self.ids.push(name(f.id(v)));
            self.part.push(part(v));
        }
        self.edges.extend(f.edges().map(|(a, b)| (a + off, b + off)));
        off
    }
}

/// The truncation of `fam` at `budget`: the base, `budget` copies of each
/// template, rays unrolled to `budget` copies in each direction, and the
/// generator's components for indices `< budget`.
///
/// Vertex ids are `t<t>.<copy>:<id>` for templates, `r<r>.<copy>:<id>` for
/// rays, `g:<i>` or `g<c>:<i>` for the generator; base ids are kept.
pub fn expansion(fam: &FamilyPresentation, budget: usize) -> Result<Expansion> {
    let mut b = Builder { ids: Vec::new(), edges: Vec::new(), part: Vec::new(), frontier: Vec::new() };
    b.add(&fam.base, |id| id.to_string(), |_| Part::Base);
    for (t, tf) in fam.omega_templates.iter().enumerate() {
        for copy in 0..budget {
            b.add(tf, |id| format!("t{t}.{copy}:{id}"), |_| Part::Template { template: t, copy });
        }
    }
    for (ri, r) in fam.rays.iter().enumerate() {
        let (rf, copy_of) = ray_expansion(r, budget);
        let off = b.add(&rf, |id| format!("r{ri}.{id}"), |v| Part::Ray { ray: ri, copy: copy_of[v] });
        let edge = budget as i64 - 1;
        for (v, &k) in copy_of.iter().enumerate() {
            if k == edge || (r.kind == RayKind::Line && k == -edge) {
                b.frontier.push(off + v);
            }
        }
    }
    if let Some(g) = fam.generator {
        let comps = g.components(budget);
        let single = !g.components_finite();
        for (c, (size, edges)) in comps.into_iter().enumerate() {
            let comp = Frame::numbered(size, edges)?;
            if let DegreeBound::Yes(m) = g.degree_bounded() {
                let seen = comp.boundedness().max_deg;
                if seen > m {
                    return Err(Error::defect(format!("generator {g} declares degree ≤ {m} but emitted degree {seen}")));
                }
            }
            let off = b.add(
                &comp,
                |id| if single { format!("g:{id}") } else { format!("g{c}:{id}") },
                |_| Part::Generator { component: c },
            );
            for i in comp.vertices() {
                if g.frontier(budget, c, i) {
                    b.frontier.push(off + i);
                }
            }
        }
    }
    let frame = Frame::from_indexed(b.ids, b.edges)?;
    let frontier = frame.set_of(b.frontier);
    Ok(Expansion { frame, part: b.part, frontier })
}

/// `expansion(fam, budget).frame`.
pub fn expand(fam: &FamilyPresentation, budget: usize) -> Result<Frame> {
    Ok(expansion(fam, budget)?.frame)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expand_examples() {
        let f = expand(&FamilyPresentation::nat_succ_ray(), 5).unwrap();
        assert_eq!(f.len(), 5);
        assert_eq!(f.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert_eq!(f.id(0), "r0.0:0");

        let f = expand(&FamilyPresentation::builtin(Builtin::ChainsLt), 3).unwrap();
        assert_eq!(f.len(), 6);
        assert_eq!(f.edge_count(), 4);
        assert!(f.has_edge(f.vertex("g2:0").unwrap(), f.vertex("g2:2").unwrap()));

        let base = Frame::numbered(2, [(0, 1)]).unwrap();
        let fam = FamilyPresentation::from_base(base.clone());
        for b in [0, 1, 7] {
            assert_eq!(expand(&fam, b).unwrap(), base);
        }
    }

    #[test]
    fn frontier_and_settled_vertices() {
        let e = expansion(&FamilyPresentation::nat_succ_ray(), 6).unwrap();
        assert_eq!(e.frontier.to_vec(), vec![5]);
        assert_eq!(e.settled(2).to_vec(), vec![0, 1, 2, 3]);
        assert_eq!(e.settled(0).len(), 6);
        let e = expansion(&FamilyPresentation::builtin(Builtin::NatLt), 4).unwrap();
        assert!(e.settled(1).is_empty());
    }

    #[test]
    fn lines_run_both_ways() {
        let period = Frame::numbered(1, []).unwrap();
        let line = RayPresentation { period, seam: vec![(0, 0)], back_seam: Vec::new(), kind: RayKind::Line };
        let fam = FamilyPresentation { base: Frame::empty(), omega_templates: Vec::new(), rays: vec![line], generator: None };
        let e = expansion(&fam, 3).unwrap();
        assert_eq!(e.frame.len(), 5);
        assert_eq!(e.frame.id(0), "r0.-2:0");
        assert_eq!(e.frontier.len(), 2);
        assert_eq!(fam.degree_bounded(), DegreeBound::Yes(2));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"base":{"vertices":["a"],"edges":[["a","a"]]},
            "omega_templates":[{"vertices":["x","y"],"edges":[["x","y"]]}],
            "rays":[{"period":{"vertices":["0"]},"seam":[["0","0"]],"kind":"ray"}],
            "generator":{"builtin":"nat_succ"}}"#;
        let fam = FamilyPresentation::from_json(text).unwrap();
        assert_eq!(fam.generator, Some(Builtin::NatSucc));
        assert_eq!(FamilyPresentation::from_json(&fam.to_json()).unwrap(), fam);
        assert!(FamilyPresentation::from_json(r#"{"rays":[{"period":{"vertices":["0"]},"seam":[["0","1"]],"kind":"ray"}]}"#).is_err());
        assert!(FamilyPresentation::from_json(r#"{"generator":{"builtin":"nat_pred"}}"#).is_err());
    }
}
