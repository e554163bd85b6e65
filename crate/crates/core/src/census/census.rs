use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::family::{expansion, ray_expansion, DegreeBound, Expansion, FamilyPresentation, Part, RayKind};
use crate::error::{Error, Result};
use crate::frame::{Frame, Vertex};
use crate::hulls::{canonical_form, hull, rooted_iso, HullType, RootedGraph};
use crate::modal::{n_bisimilar, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Multiplicity {
    Finite(usize),
    Omega,
    /// Seen `count` times in a truncation; more may exist.
    AtLeast { count: usize, unbounded_suspected: bool },
}

impl Multiplicity {
    fn merge(self, other: Multiplicity) -> Multiplicity {
        use Multiplicity::*;
        match (self, other) {
            (Omega, _) | (_, Omega) => Omega,
            (Finite(a), Finite(b)) => Finite(a + b),
            (Finite(a), AtLeast { count, unbounded_suspected })
            | (AtLeast { count, unbounded_suspected }, Finite(a)) => AtLeast { count: count + a, unbounded_suspected },
            (AtLeast { count: a, unbounded_suspected: x }, AtLeast { count: b, unbounded_suspected: y }) => {
                AtLeast { count: a + b, unbounded_suspected: x || y }
            }
        }
    }

    pub fn is_omega(self) -> bool {
        self == Multiplicity::Omega
    }

    /// `"w"` for ω, `">=k"` for a lower bound, the number otherwise.
    pub fn label(self) -> String {
        match self {
            Multiplicity::Finite(k) => k.to_string(),
            Multiplicity::Omega => "w".to_string(),
            Multiplicity::AtLeast { count, .. } => format!(">={count}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CensusEntry {
    pub multiplicity: Multiplicity,
    pub representative: RootedGraph,
    /// Where the representative was taken from.
    pub source: String,
}

/// Depth-n hull types of a family with their multiplicities.
#[derive(Debug, Clone)]
pub struct HullCensus {
    pub depth: usize,
    pub entries: BTreeMap<HullType, CensusEntry>,
}

impl HullCensus {
    pub fn omega_types(&self) -> impl Iterator<Item = (&HullType, &CensusEntry)> {
        self.entries.iter().filter(|(_, e)| e.multiplicity.is_omega())
    }

    pub fn to_json(&self) -> String {
        let multiplicities: serde_json::Map<String, Value> =
            self.entries.iter().map(|(t, e)| (t.to_hex(), Value::from(e.multiplicity.label()))).collect();
        let representatives: serde_json::Map<String, Value> = self
            .entries
            .iter()
            .map(|(t, e)| {
                let hull: Value = serde_json::from_str(&e.representative.to_json()).expect("hull json");
                (t.to_hex(), json!({ "source": e.source, "hull": hull }))
            })
            .collect();
        json!({ "depth": self.depth, "multiplicities": multiplicities, "representatives": representatives }).to_string()
    }

    fn add(&mut self, t: HullType, h: RootedGraph, multiplicity: Multiplicity, source: String) {
        match self.entries.get_mut(&t) {
            Some(e) => e.multiplicity = e.multiplicity.merge(multiplicity),
            None => {
                self.entries.insert(t, CensusEntry { multiplicity, representative: h, source });
            }
        }
    }
}

/// One census contribution, computed independently of the others.
type Item = (RootedGraph, Multiplicity, String);

fn require_bounded(fam: &FamilyPresentation) -> Result<usize> {
    match fam.degree_bounded() {
        DegreeBound::Yes(m) => Ok(m),
        _ => Err(Error::Verdict("census requires bounded degree".into())),
    }
}

fn ray_items(fam: &FamilyPresentation, n: usize) -> Result<Vec<Item>> {
    let mut items = Vec::new();
    for (ri, r) in fam.rays.iter().enumerate() {
        // copies up to 2n+1 are enough for the hulls of copies n and n+1
        let (rf, copy_of) = ray_expansion(r, 2 * n + 2);
        let p = r.period.len();
        let at = |k: i64, j: Vertex| copy_of.iter().position(|&c| c == k).expect("copy present") + j;
        let interior = match r.kind {
            RayKind::Ray => n as i64,
            RayKind::Line => 0,
        };
        for j in 0..p {
            let here = hull(&rf, at(interior, j), n)?;
            let next = hull(&rf, at(interior + 1, j), n)?;
            if rooted_iso(&here, &next).is_none() {
                return Err(Error::defect(format!("ray {ri}: hull types did not stabilize at copy {interior}")));
            }
            items.push((here, Multiplicity::Omega, format!("r{ri}.{interior}:{}", r.period.id(j))));
        }
        if r.kind == RayKind::Ray {
            for k in 0..n as i64 {
                for j in 0..p {
                    let h = hull(&rf, at(k, j), n)?;
                    items.push((h, Multiplicity::Finite(1), format!("r{ri}.{k}:{}", r.period.id(j))));
                }
            }
        }
    }
    Ok(items)
}

/// Settled generator vertices of a truncation, grouped by type with counts.
fn generator_counts(fam: &FamilyPresentation, n: usize, budget: usize) -> Result<BTreeMap<HullType, (usize, RootedGraph, String)>> {
    let gen_only = FamilyPresentation { generator: fam.generator, ..FamilyPresentation::from_base(Frame::empty()) };
    let e = expansion(&gen_only, budget)?;
    let settled = e.settled(n);
    let hulls: Vec<(HullType, RootedGraph, String)> = settled
        .to_vec()
        .into_par_iter()
        .map(|v| {
            let h = hull(&e.frame, v, n)?;
            Ok((canonical_form(&h), h, e.frame.id(v).to_string()))
        })
        .collect::<Result<_>>()?;
    let mut out: BTreeMap<HullType, (usize, RootedGraph, String)> = BTreeMap::new();
    for (t, h, id) in hulls {
        out.entry(t).or_insert((0, h, id)).0 += 1;
    }
    Ok(out)
}

/// Census with an explicit truncation budget for the generator part.
pub fn hull_census_with_budget(fam: &FamilyPresentation, n: usize, generator_budget: usize) -> Result<HullCensus> {
    require_bounded(fam)?;
    let mut items: Vec<Item> = Vec::new();
    for v in fam.base.vertices() {
        items.push((hull(&fam.base, v, n)?, Multiplicity::Finite(1), fam.base.id(v).to_string()));
    }
    for (t, tf) in fam.omega_templates.iter().enumerate() {
        for v in tf.vertices() {
            items.push((hull(tf, v, n)?, Multiplicity::Omega, format!("t{t}.0:{}", tf.id(v))));
        }
    }
    items.extend(ray_items(fam, n)?);

    let mut census = HullCensus { depth: n, entries: BTreeMap::new() };
    let typed: Vec<(HullType, Item)> = items.into_par_iter().map(|it| (canonical_form(&it.0), it)).collect();
    for (t, (h, m, source)) in typed {
        census.add(t, h, m, source);
    }

    if fam.generator.is_some() {
        // only lower bounds: a count that grows with the budget is flagged,
        // never promoted to ω
        let small = generator_counts(fam, n, generator_budget)?;
        let large = generator_counts(fam, n, 2 * generator_budget)?;
        for (t, (count, h, source)) in large {
            let before = small.get(&t).map_or(0, |e| e.0);
            census.add(t, h, Multiplicity::AtLeast { count, unbounded_suspected: count > before }, source);
        }
    }
    Ok(census)
}

/// The depth-n hull census of a bounded family.
pub fn hull_census(fam: &FamilyPresentation, n: usize) -> Result<HullCensus> {
    hull_census_with_budget(fam, n, 4 * (n + 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    /// A vertex of the truncation.
    Expansion { part: Part, id: String },
    /// A vertex of the representative hull of an ω type.
    Representative { certificate: String, source: String, root: bool },
}

#[derive(Debug, Clone)]
pub struct UESkeleton {
    pub frame: Frame,
    pub provenance: Vec<Provenance>,
    pub budget: usize,
    /// Vertex index of each representative's root, in census order.
    pub representative_roots: Vec<Vertex>,
}

impl UESkeleton {
    pub fn to_json(&self) -> String {
        let frame: Value = serde_json::from_str(&self.frame.to_json()).expect("frame json");
        json!({ "budget": self.budget, "frame": frame, "provenance": self.provenance }).to_string()
    }
}

/// `max(4n, 2·(largest template diameter) + n)`, and at least 1 so that a
/// depth-0 check has something to match against.
pub fn default_skeleton_budget(fam: &FamilyPresentation, n: usize) -> usize {
    (4 * n).max(2 * fam.template_diameter() + n).max(1)
}

/// The truncation at `budget` plus one representative hull per ω type,
/// named `rep<k>:<id>`.
pub fn ue_skeleton(fam: &FamilyPresentation, n: usize, budget: Option<usize>) -> Result<UESkeleton> {
    let census = hull_census(fam, n)?;
    let budget = budget.unwrap_or_else(|| default_skeleton_budget(fam, n));
    let e = expansion(fam, budget)?;
    let mut parts: Vec<Frame> = vec![e.frame.clone()];
    let mut provenance: Vec<Provenance> = e
        .frame
        .vertices()
        .map(|v| Provenance::Expansion { part: e.part[v], id: e.frame.id(v).to_string() })
        .collect();
    let mut representative_roots = Vec::new();
    let mut offset = e.frame.len();
    for (k, (t, entry)) in census.omega_types().enumerate() {
        let g = entry.representative.graph();
        parts.push(g.relabel(|id| format!("rep{k}:{id}"))?);
        for v in g.vertices() {
            provenance.push(Provenance::Representative {
                certificate: t.to_hex(),
                source: entry.source.clone(),
                root: v == entry.representative.root(),
            });
        }
        representative_roots.push(offset + entry.representative.root());
        offset += g.len();
    }
    let refs: Vec<&Frame> = parts.iter().collect();
    let frame = Frame::disjoint_union(&refs)?;
    Ok(UESkeleton { frame, provenance, budget, representative_roots })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HullMatch {
    pub certificate: String,
    /// Vertex of the truncation realizing the type.
    pub vertex: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaReport {
    pub coincides: bool,
    pub depth: usize,
    pub budget: usize,
    pub matches: Vec<HullMatch>,
    pub unmatched: Option<String>,
}

/// Whether every ω type of the census is realized in the truncation at
/// `budget` by a vertex whose hull is root-isomorphic, so that the
/// representatives add no new depth-n modal behaviour.
pub fn modal_logic_coincides(fam: &FamilyPresentation, n: usize, budget: Option<usize>) -> Result<LambdaReport> {
    let census = hull_census(fam, n)?;
    let budget = budget.unwrap_or_else(|| default_skeleton_budget(fam, n));
    let e: Expansion = expansion(fam, budget)?;
    let settled = e.settled(n).to_vec();
    let exp_model = Model::new(e.frame.clone(), Default::default())?;
    let mut matches = Vec::new();
    for (t, entry) in census.omega_types() {
        let rep = &entry.representative;
        let found = settled.iter().copied().find_map(|v| {
            let h = hull(&e.frame, v, n).ok()?;
            (canonical_form(&h) == *t).then_some((v, h))
        });
        let Some((v, h)) = found else {
            return Ok(LambdaReport { coincides: false, depth: n, budget, matches, unmatched: Some(t.to_hex()) });
        };
        if rooted_iso(rep, &h).is_none() {
            return Err(Error::defect(format!("certificate {} matched a non-isomorphic hull", t.to_hex())));
        }
        let rep_model = Model::new(rep.graph().clone(), Default::default())?;
        if !n_bisimilar(&rep_model, rep.root(), &exp_model, v, n)? {
            return Err(Error::defect(format!("isomorphic hulls at {} are not {n}-bisimilar", e.frame.id(v))));
        }
        matches.push(HullMatch { certificate: t.to_hex(), vertex: e.frame.id(v).to_string() });
    }
    Ok(LambdaReport { coincides: true, depth: n, budget, matches, unmatched: None })
}
