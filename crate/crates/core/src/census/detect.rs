//! Verdicts about the ultrafilter extension of a presented family.
//!
//! For an irreflexive frame, a proper colouring with finitely many colours
//! partitions W into independent sets; each ultrafilter contains one of
//! them and so cannot see itself. Conversely, when no finite colouring
//! exists (by de Bruijn–Erdős, when finite parts need unboundedly many
//! colours), complements of independent sets have the finite intersection
//! property, and an ultrafilter containing all of them is reflexive: for
//! X ∈ u, the set X ∖ R⁻(X) is independent, so R⁻(X) ∈ u.

use std::collections::BTreeMap;

use serde::Serialize;

use super::family::{expansion, Builtin, DegreeBound, FamilyPresentation, Part, RayPresentation};
use crate::error::Result;
use crate::fo::{parse_fo, satisfies};
use crate::frame::{Frame, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coloring {
    pub colors: Vec<usize>,
    pub count: usize,
}

impl Coloring {
    /// No edge between distinct vertices joins two vertices of one colour,
    /// nor a loop when `ignore_loops` is false.
    pub fn is_proper(&self, frame: &Frame, ignore_loops: bool) -> bool {
        frame
            .edges()
            .all(|(a, b)| if a == b { ignore_loops } else { self.colors[a] != self.colors[b] })
    }
}

/// Greedy colouring in load order: each vertex takes the least colour not
/// used by an already coloured neighbour. `None` when a loop is present and
/// loops are not ignored.
pub fn greedy_coloring(frame: &Frame, ignore_loops: bool) -> Option<Coloring> {
    if !ignore_loops && frame.vertices().any(|v| frame.is_reflexive_at(v)) {
        return None;
    }
    let mut colors = vec![usize::MAX; frame.len()];
    for v in frame.vertices() {
        let taken: Vec<usize> = frame
            .neighbors(v)
            .into_iter()
            .filter(|&u| u != v && colors[u] != usize::MAX)
            .map(|u| colors[u])
            .collect();
        colors[v] = (0..).find(|c| !taken.contains(c)).expect("some colour is free");
    }
    let count = colors.iter().map(|&c| c + 1).max().unwrap_or(0);
    Some(Coloring { colors, count })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartColoring {
    pub part: String,
    /// For rays: colour of vertex j in copy k is that of `<k mod period>:<j>`.
    pub period: Option<usize>,
    pub colors: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColoringWitness {
    pub colors: usize,
    pub parts: Vec<PartColoring>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ReflexiveEvidence {
    /// A reflexive point of the frame; its principal ultrafilter is
    /// reflexive, and so is any ultrafilter on the set of its copies when
    /// there are infinitely many.
    ReflexivePoint { vertex: String, infinitely_many: bool },
    /// A component whose chromatic number exceeds the threshold: a
    /// strict linear order on `lower_bound` points is a tournament and
    /// needs that many colours.
    Chromatic {
        component: usize,
        budget: usize,
        lower_bound: usize,
        threshold: usize,
        /// Holds in the frame.
        frame_sentence: String,
        /// Holds in the ultrafilter extension.
        extension_sentence: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum ReflexiveVerdict {
    Yes { evidence: ReflexiveEvidence },
    No { witness: ColoringWitness },
    Unknown { bound: usize, threshold: usize },
}

const IRREFLEXIVE: &str = "forall x. ~R(x,x)";
const HAS_REFLEXIVE: &str = "exists x. R(x,x)";

fn named_colors(frame: &Frame, c: &Coloring) -> BTreeMap<String, usize> {
    frame.vertices().map(|v| (frame.id(v).to_string(), c.colors[v])).collect()
}

/// `p` copies of the period closed into a cycle by the seams.
fn wrapped(r: &RayPresentation, p: usize) -> Frame {
    let n = r.period.len();
    let mut ids = Vec::new();
    let mut edges = Vec::new();
    for k in 0..p {
        ids.extend(r.period.ids().iter().map(|id| format!("{k}:{id}")));
        edges.extend(r.period.edges().map(|(a, b)| (k * n + a, k * n + b)));
        let next = (k + 1) % p * n;
        edges.extend(r.seam.iter().map(|&(a, b)| (k * n + a, next + b)));
        edges.extend(r.back_seam.iter().map(|&(a, b)| (next + a, k * n + b)));
    }
    Frame::from_indexed_dedup(ids, edges).expect("wrapped period")
}

/// The cheapest periodic colouring schema with period at most 4.
fn ray_coloring(r: &RayPresentation) -> Option<(usize, Frame, Coloring)> {
    (1..=4)
        .filter_map(|p| {
            let w = wrapped(r, p);
            let c = greedy_coloring(&w, false)?;
            Some((p, w, c))
        })
        .min_by_key(|(p, _, c)| (c.count, *p))
}

/// Largest clique found greedily in the undirected, loop-free graph of `f`
/// restricted to `keep`.
fn clique_lower_bound(f: &Frame, keep: &[Vertex]) -> usize {
    let adjacent = |a: Vertex, b: Vertex| a != b && (f.has_edge(a, b) || f.has_edge(b, a));
    keep.iter()
        .map(|&start| {
            let mut clique = vec![start];
            for &v in keep {
                if clique.iter().all(|&c| adjacent(c, v)) {
                    clique.push(v);
                }
            }
            clique.len()
        })
        .max()
        .unwrap_or(0)
}

/// Decides whether the ultrafilter extension of `fam` has a reflexive point.
///
/// Infinitely repeated parts are coloured once by a schema; a degree bound
/// m on the generator gives m+1 colours; an unbounded generator is searched
/// for a component needing more than `chi_threshold` colours.
pub fn reflexive_point_in_ue(fam: &FamilyPresentation, chi_threshold: usize) -> Result<ReflexiveVerdict> {
    for (t, tf) in fam.omega_templates.iter().enumerate() {
        if let Some(v) = tf.vertices().find(|&v| tf.is_reflexive_at(v)) {
            let vertex = format!("t{t}.*:{}", tf.id(v));
            return Ok(ReflexiveVerdict::Yes { evidence: ReflexiveEvidence::ReflexivePoint { vertex, infinitely_many: true } });
        }
    }
    for (ri, r) in fam.rays.iter().enumerate() {
        if let Some(v) = r.period.vertices().find(|&v| r.period.is_reflexive_at(v)) {
            let vertex = format!("r{ri}.*:{}", r.period.id(v));
            return Ok(ReflexiveVerdict::Yes { evidence: ReflexiveEvidence::ReflexivePoint { vertex, infinitely_many: true } });
        }
    }
    if let Some(v) = fam.base.vertices().find(|&v| fam.base.is_reflexive_at(v)) {
        let vertex = fam.base.id(v).to_string();
        return Ok(ReflexiveVerdict::Yes { evidence: ReflexiveEvidence::ReflexivePoint { vertex, infinitely_many: false } });
    }
    if let Some(g) = fam.generator {
        let e = expansion(&FamilyPresentation::builtin(g), 8)?;
        if let Some(v) = e.frame.vertices().find(|&v| e.frame.is_reflexive_at(v)) {
            let vertex = e.frame.id(v).to_string();
            return Ok(ReflexiveVerdict::Yes { evidence: ReflexiveEvidence::ReflexivePoint { vertex, infinitely_many: false } });
        }
    }

    // irreflexive from here on
    let mut parts = Vec::new();
    let mut colors = 0;
    if !fam.base.is_empty() {
        let c = greedy_coloring(&fam.base, false).expect("irreflexive");
        colors = colors.max(c.count);
        parts.push(PartColoring { part: "base".into(), period: None, colors: named_colors(&fam.base, &c) });
    }
    for (t, tf) in fam.omega_templates.iter().enumerate() {
        let c = greedy_coloring(tf, false).expect("irreflexive");
        colors = colors.max(c.count);
        parts.push(PartColoring { part: format!("t{t}"), period: None, colors: named_colors(tf, &c) });
    }
    for (ri, r) in fam.rays.iter().enumerate() {
        let Some((p, w, c)) = ray_coloring(r) else {
            return Ok(ReflexiveVerdict::Unknown { bound: colors, threshold: chi_threshold });
        };
        colors = colors.max(c.count);
        parts.push(PartColoring { part: format!("r{ri}"), period: Some(p), colors: named_colors(&w, &c) });
    }

    let Some(g) = fam.generator else {
        return Ok(ReflexiveVerdict::No { witness: ColoringWitness { colors, parts } });
    };
    if let DegreeBound::Yes(m) = g.degree_bounded() {
        let e = expansion(&FamilyPresentation::builtin(g), 4 * (m + 1))?;
        let c = greedy_coloring(&e.frame, false).expect("irreflexive");
        // greedy never needs more than m+1 colours, on any finite part
        colors = colors.max(m + 1);
        parts.push(PartColoring { part: format!("generator {g} (deg <= {m})"), period: None, colors: named_colors(&e.frame, &c) });
        return Ok(ReflexiveVerdict::No { witness: ColoringWitness { colors, parts } });
    }
    chromatic_search(g, chi_threshold)
}

fn chromatic_search(g: Builtin, threshold: usize) -> Result<ReflexiveVerdict> {
    let max_budget = 2 * (threshold + 1) + 2;
    let mut best = 0;
    for budget in 1..=max_budget {
        let e = expansion(&FamilyPresentation::builtin(g), budget)?;
        let mut components: BTreeMap<usize, Vec<Vertex>> = BTreeMap::new();
        for v in e.frame.vertices() {
            if let Part::Generator { component } = e.part[v] {
                components.entry(component).or_default().push(v);
            }
        }
        for (component, members) in components {
            let lower_bound = clique_lower_bound(&e.frame, &members);
            best = best.max(lower_bound);
            if lower_bound > threshold {
                let irreflexive = parse_fo(IRREFLEXIVE).expect("fixed sentence");
                if !satisfies(&e.frame, &irreflexive)? {
                    return Err(crate::error::Error::defect("irreflexive generator emitted a loop"));
                }
                return Ok(ReflexiveVerdict::Yes {
                    evidence: ReflexiveEvidence::Chromatic {
                        component,
                        budget,
                        lower_bound,
                        threshold,
                        frame_sentence: IRREFLEXIVE.into(),
                        extension_sentence: HAS_REFLEXIVE.into(),
                    },
                });
            }
        }
    }
    Ok(ReflexiveVerdict::Unknown { bound: best, threshold })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum GeneratedVerdict {
    Yes { reason: String },
    /// `witness` has out-degree `out_degrees[i].1` in the truncation at
    /// budget `out_degrees[i].0`, growing without bound.
    No { witness: String, out_degrees: Vec<(usize, usize)> },
    Unknown { reason: String },
}

/// Whether the frame is a generated substructure of its ultrafilter
/// extension, i.e. whether every vertex has finitely many successors.
pub fn generated_substructure_verdict(fam: &FamilyPresentation) -> Result<GeneratedVerdict> {
    let Some(g) = fam.generator else {
        return Ok(GeneratedVerdict::Yes { reason: "base, templates and rays have finite out-degree".into() });
    };
    if let DegreeBound::Yes(m) = g.degree_bounded() {
        return Ok(GeneratedVerdict::Yes { reason: format!("generator {g} has degree at most {m}") });
    }
    if g.components_finite() {
        return Ok(GeneratedVerdict::Yes { reason: format!("every component of {g} is finite") });
    }
    let mut out_degrees = Vec::new();
    let mut witness = None;
    for budget in [8, 16, 32] {
        let e = expansion(&FamilyPresentation::builtin(g), budget)?;
        let v = e.frame.vertex("g:0")?;
        witness = Some(e.frame.id(v).to_string());
        out_degrees.push((budget, e.frame.successors(v).len()));
    }
    if out_degrees.windows(2).all(|w| w[1].1 > w[0].1) {
        Ok(GeneratedVerdict::No { witness: witness.expect("three budgets"), out_degrees })
    } else {
        Ok(GeneratedVerdict::Unknown { reason: format!("out-degree of g:0 did not grow: {out_degrees:?}") })
    }
}
