//! Ultrafilter extensions of finite frames.
//!
//! Over a finite carrier every ultrafilter is principal, so an
//! [`Ultrafilter`] is stored as its principal point. The relation `R^ue` is
//! nevertheless computed from its three set-theoretic definitions by walking
//! the full powerset of the carrier; [`build_ue`] refuses to return a frame
//! unless all three agree.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{Frame, Vertex, VertexSet};
use crate::limits::Limits;

/// Identity of the set an ultrafilter lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Carrier {
    size: usize,
    fingerprint: u64,
}

impl Carrier {
    pub fn of_frame(frame: &Frame) -> Carrier {
        let mut h = DefaultHasher::new();
        frame.ids().hash(&mut h);
        Carrier { size: frame.len(), fingerprint: h.finish() }
    }

    /// The index set `{0, .., size-1}` of an ultraproduct.
    pub fn indices(size: usize) -> Carrier {
        let mut h = DefaultHasher::new();
        ("index-set", size).hash(&mut h);
        Carrier { size, fingerprint: h.finish() }
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

/// An ultrafilter over a finite carrier, i.e. `π_w = {X : w ∈ X}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ultrafilter {
    carrier: Carrier,
    point: usize,
}

impl Ultrafilter {
    pub fn principal(frame: &Frame, w: Vertex) -> Result<Ultrafilter> {
        if w >= frame.len() {
            return Err(Error::input(format!("unknown vertex index {w}")));
        }
        Ok(Ultrafilter { carrier: Carrier::of_frame(frame), point: w })
    }

    pub fn on_indices(size: usize, index: usize) -> Result<Ultrafilter> {
        if index >= size {
            return Err(Error::input(format!("index {index} outside an index set of size {size}")));
        }
        Ok(Ultrafilter { carrier: Carrier::indices(size), point: index })
    }

    pub fn point(&self) -> usize {
        self.point
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    /// `X ∈ u`.
    pub fn contains(&self, x: &VertexSet) -> bool {
        assert_eq!(x.universe(), self.carrier.size, "set and ultrafilter over different carriers");
        x.contains(self.point)
    }

    fn contains_mask(&self, mask: u64) -> bool {
        mask >> self.point & 1 == 1
    }
}

impl fmt::Debug for Ultrafilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pi_{}", self.point)
    }
}

/// Which of the three equivalent definitions of `R^ue uv` to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UeMode {
    /// `∀X ∈ v. R-(X) ∈ u`
    A,
    /// `{Y : l_R(Y) ∈ u} ⊆ v`
    B,
    /// `{R+(X) : X ∈ u} ⊆ v`
    C,
}

pub fn enumerate_ultrafilters(frame: &Frame) -> Vec<Ultrafilter> {
    let carrier = Carrier::of_frame(frame);
    frame.vertices().map(|point| Ultrafilter { carrier, point }).collect()
}

/// `R+`, `R-` and `l_R` of every subset of the carrier, indexed by bitmask.
struct PowersetTable {
    forward: Vec<u64>,
    backward: Vec<u64>,
    boxed: Vec<u64>,
}

impl PowersetTable {
    fn new(frame: &Frame, limits: &Limits) -> Result<PowersetTable> {
        let n = frame.len();
        if n > limits.powerset || n >= 63 {
            return Err(Error::resource(format!(
                "powerset enumeration over {n} vertices exceeds the limit of {} (set {})",
                limits.powerset,
                crate::limits::ENV_POWERSET_LIMIT
            )));
        }
        let succ: Vec<u64> = frame.vertices().map(|w| mask_of(frame.successors(w))).collect();
        let pred: Vec<u64> = frame.vertices().map(|w| mask_of(frame.predecessors(w))).collect();
        let size = 1usize << n;
        let mut forward = vec![0u64; size];
        let mut backward = vec![0u64; size];
        let mut boxed = vec![0u64; size];
        for x in 1..size {
            let low = x.trailing_zeros() as usize;
            let rest = x & (x - 1);
            forward[x] = forward[rest] | succ[low];
            backward[x] = backward[rest] | pred[low];
        }
        for (x, slot) in boxed.iter_mut().enumerate() {
            let x = x as u64;
            *slot = (0..n).filter(|&w| succ[w] & !x == 0).fold(0, |m, w| m | 1 << w);
        }
        Ok(PowersetTable { forward, backward, boxed })
    }

    fn related(&self, u: &Ultrafilter, v: &Ultrafilter, mode: UeMode) -> bool {
        let subsets = 0..self.forward.len() as u64;
        match mode {
            UeMode::A => subsets
                .filter(|&x| v.contains_mask(x))
                .all(|x| u.contains_mask(self.backward[x as usize])),
            UeMode::B => subsets
                .filter(|&y| u.contains_mask(self.boxed[y as usize]))
                .all(|y| v.contains_mask(y)),
            UeMode::C => subsets
                .filter(|&x| u.contains_mask(x))
                .all(|x| v.contains_mask(self.forward[x as usize])),
        }
    }
}

fn mask_of(list: &[Vertex]) -> u64 {
    list.iter().fold(0, |m, &v| m | 1 << v)
}

fn check_carrier(frame: &Frame, u: &Ultrafilter) -> Result<()> {
    if u.carrier != Carrier::of_frame(frame) {
        return Err(Error::input(format!("ultrafilter {u:?} is not over this frame's vertex set")));
    }
    Ok(())
}

/// Decides `R^ue uv` by the chosen definition, enumerating the powerset of W.
pub fn ue_related(frame: &Frame, u: &Ultrafilter, v: &Ultrafilter, mode: UeMode, limits: &Limits) -> Result<bool> {
    check_carrier(frame, u)?;
    check_carrier(frame, v)?;
    let table = PowersetTable::new(frame, limits)?;
    Ok(table.related(u, v, mode))
}

/// The ultrafilter extension `F^ue = <Uf(W), R^ue>` of a finite frame.
#[derive(Clone)]
pub struct UEFrame {
    base: Frame,
    ultrafilters: Vec<Ultrafilter>,
    frame: Frame,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossCheckReport {
    pub pairs_checked: usize,
    pub modes_agree: bool,
    pub eta_isomorphism: bool,
}

impl UEFrame {
    pub fn base(&self) -> &Frame {
        &self.base
    }

    pub fn ultrafilters(&self) -> &[Ultrafilter] {
        &self.ultrafilters
    }

    /// The extension as a plain frame whose vertex `i` is the ultrafilter
    /// `ultrafilters()[i]`, named `pi:<original id>`.
    pub fn as_frame(&self) -> &Frame {
        &self.frame
    }

    pub fn related(&self, u: &Ultrafilter, v: &Ultrafilter) -> bool {
        self.frame.has_edge(u.point, v.point)
    }

    pub fn ue_edges(&self) -> Vec<(Ultrafilter, Ultrafilter)> {
        self.frame
            .edges()
            .map(|(a, b)| (self.ultrafilters[a], self.ultrafilters[b]))
            .collect()
    }

    /// `deg+(u)` in the extension.
    pub fn deg_plus(&self, u: &Ultrafilter) -> usize {
        self.frame.successors(u.point).len()
    }

    /// Extension computed by principal points alone: `R^ue π_a π_b ⇔ Rab`.
    /// Valid for finite carriers; the full construction is cross-checked
    /// against this in the test suite.
    pub fn principal_shortcut(frame: &Frame) -> UEFrame {
        let ultrafilters = enumerate_ultrafilters(frame);
        UEFrame { base: frame.clone(), ultrafilters, frame: ue_named(frame, frame.edges()) }
    }

    pub fn to_json(&self) -> String {
        self.frame.to_json()
    }

    pub fn to_dot(&self) -> String {
        self.frame.to_dot("ue")
    }
}

impl fmt::Debug for UEFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UEFrame({:?})", self.frame)
    }
}

fn ue_named(base: &Frame, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Frame {
    let ids = base.ids().iter().map(|id| format!("pi:{id}")).collect();
    Frame::from_indexed(ids, edges).expect("ue frame over principal points")
}

/// Builds `F^ue` from definition A, failing with a defect error if
/// definitions A, B and C ever disagree on a pair.
pub fn build_ue(frame: &Frame, limits: &Limits) -> Result<UEFrame> {
    let table = PowersetTable::new(frame, limits)?;
    let ultrafilters = enumerate_ultrafilters(frame);
    let rows: Vec<Result<Vec<(Vertex, Vertex)>>> = ultrafilters
        .par_iter()
        .map(|u| {
            let mut row = Vec::new();
            for v in &ultrafilters {
                let a = table.related(u, v, UeMode::A);
                let b = table.related(u, v, UeMode::B);
                let c = table.related(u, v, UeMode::C);
                if a != b || a != c {
                    return Err(Error::defect(format!(
                        "definitions of R^ue disagree on ({u:?}, {v:?}): A={a} B={b} C={c}"
                    )));
                }
                if a {
                    row.push((u.point, v.point));
                }
            }
            Ok(row)
        })
        .collect();
    let mut edges = Vec::new();
    for row in rows {
        edges.extend(row?);
    }
    Ok(UEFrame { base: frame.clone(), ultrafilters, frame: ue_named(frame, edges) })
}

/// Full construction when the carrier fits the powerset limit, the
/// principal-point construction otherwise.
pub fn build_ue_auto(frame: &Frame, limits: &Limits) -> Result<UEFrame> {
    if frame.len() <= limits.powerset {
        build_ue(frame, limits)
    } else {
        Ok(UEFrame::principal_shortcut(frame))
    }
}

/// `η : w ↦ π_w`, indexed by vertex.
pub fn canonical_embedding(frame: &Frame) -> Vec<Ultrafilter> {
    enumerate_ultrafilters(frame)
}

/// Whether η is a bijection that carries R exactly onto `R^ue`.
pub fn eta_is_isomorphism(frame: &Frame, ue: &UEFrame) -> bool {
    let eta = canonical_embedding(frame);
    if eta.len() != ue.ultrafilters().len() {
        return false;
    }
    let mut hit = vec![false; eta.len()];
    for u in &eta {
        match ue.ultrafilters().iter().position(|x| x == u) {
            Some(i) if !hit[i] => hit[i] = true,
            _ => return false,
        }
    }
    frame
        .vertices()
        .all(|a| frame.vertices().all(|b| frame.has_edge(a, b) == ue.related(&eta[a], &eta[b])))
}

/// Runs the three-definition check and the η-isomorphism check.
pub fn cross_check(frame: &Frame, limits: &Limits) -> Result<CrossCheckReport> {
    let ue = build_ue(frame, limits)?;
    let eta_iso = eta_is_isomorphism(frame, &ue);
    Ok(CrossCheckReport {
        pairs_checked: frame.len() * frame.len(),
        modes_agree: true,
        eta_isomorphism: eta_iso,
    })
}

/// Pairwise disjoint `D_i` with `D_i ∈ u_j` iff `i = j`.
pub fn distinguishing_elements(ultrafilters: &[Ultrafilter]) -> Result<Vec<VertexSet>> {
    let Some(first) = ultrafilters.first() else {
        return Ok(Vec::new());
    };
    for (i, u) in ultrafilters.iter().enumerate() {
        if u.carrier != first.carrier {
            return Err(Error::input("ultrafilters over different carriers"));
        }
        if ultrafilters[..i].contains(u) {
            return Err(Error::input(format!("duplicate ultrafilter {u:?}")));
        }
    }
    Ok(ultrafilters
        .iter()
        .map(|u| VertexSet::singleton(first.carrier.size, u.point))
        .collect())
}

/// Orientation of one step of a road.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Direction {
    /// `w_i R w_{i+1}`
    Forward,
    /// `w_i R^-1 w_{i+1}`
    Inverse,
}

/// A simple path `w_0 R° w_1 ... R° w_n` with each step along R or against it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Road<T> {
    waypoints: Vec<T>,
    directions: Vec<Direction>,
}

impl<T: PartialEq + fmt::Debug> Road<T> {
    pub fn new(waypoints: Vec<T>, directions: Vec<Direction>) -> Result<Road<T>> {
        if waypoints.is_empty() || directions.len() + 1 != waypoints.len() {
            return Err(Error::input(format!(
                "road needs one direction per step: {} waypoints, {} directions",
                waypoints.len(),
                directions.len()
            )));
        }
        for (i, w) in waypoints.iter().enumerate() {
            if waypoints[..i].contains(w) {
                return Err(Error::input(format!("road revisits {w:?}")));
            }
        }
        Ok(Road { waypoints, directions })
    }

    pub fn waypoints(&self) -> &[T] {
        &self.waypoints
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// The same road walked from the other end.
    pub fn inverse(&self) -> Road<T>
    where
        T: Clone,
    {
        let waypoints = self.waypoints.iter().rev().cloned().collect();
        let directions = self
            .directions
            .iter()
            .rev()
            .map(|d| match d {
                Direction::Forward => Direction::Inverse,
                Direction::Inverse => Direction::Forward,
            })
            .collect();
        Road { waypoints, directions }
    }

    fn steps_hold(&self, related: impl Fn(&T, &T) -> bool) -> bool {
        self.directions.iter().enumerate().all(|(i, d)| {
            let (a, b) = (&self.waypoints[i], &self.waypoints[i + 1]);
            match d {
                Direction::Forward => related(a, b),
                Direction::Inverse => related(b, a),
            }
        })
    }
}

impl Road<Vertex> {
    pub fn holds_in(&self, frame: &Frame) -> bool {
        self.steps_hold(|&a, &b| frame.has_edge(a, b))
    }
}

impl Road<Ultrafilter> {
    pub fn holds_in(&self, ue: &UEFrame) -> bool {
        self.steps_hold(|a, b| ue.related(a, b))
    }
}

/// `Δ(X, R^ue[u,v])`, the ultrafilter road based on `x`.
///
/// `distinguishers[i]` must be a distinguishing element for waypoint `i`.
/// When the road is realized in `ue` the result is checked to be a member
/// of the last waypoint.
pub fn ultrafilter_road_delta(
    ue: &UEFrame,
    x: &VertexSet,
    road: &Road<Ultrafilter>,
    distinguishers: &[VertexSet],
) -> Result<VertexSet> {
    let base = ue.base();
    let first = &road.waypoints()[0];
    if x.universe() != base.len() {
        return Err(Error::input("base set is not over the frame's vertices"));
    }
    if !first.contains(x) {
        return Err(Error::Precondition(format!("base set is not a member of the first waypoint {first:?}")));
    }
    if distinguishers.len() != road.waypoints().len() {
        return Err(Error::input("one distinguishing element per waypoint is required"));
    }
    for (i, d) in distinguishers.iter().enumerate() {
        if d.universe() != base.len() {
            return Err(Error::input("distinguishing element over the wrong carrier"));
        }
        for (j, u) in road.waypoints().iter().enumerate() {
            if u.contains(d) != (i == j) {
                return Err(Error::input(format!("set {i} does not distinguish waypoint {j}")));
            }
            if i != j && !d.is_disjoint(&distinguishers[j]) {
                return Err(Error::input(format!("distinguishing elements {i} and {j} overlap")));
            }
        }
    }
    let mut delta = x.clone();
    for (i, dir) in road.directions().iter().enumerate() {
        let mode = match dir {
            Direction::Forward => crate::frame::ImageMode::Forward,
            Direction::Inverse => crate::frame::ImageMode::Backward,
        };
        delta = base.relation_image(&delta, mode)?.intersection(&distinguishers[i + 1]);
    }
    let last = road.waypoints().last().expect("non-empty road");
    if road.holds_in(ue) && !last.contains(&delta) {
        return Err(Error::defect(format!("ultrafilter road ends outside {last:?}")));
    }
    Ok(delta)
}

/// Every road from `s` to `t` with at most `max_len` steps, sorted by waypoint
/// sequence and then by directions.
pub fn roads_between(frame: &Frame, s: Vertex, t: Vertex, max_len: i64) -> Result<Vec<Road<Vertex>>> {
    if max_len < 0 {
        return Err(Error::input(format!("max_len must be non-negative, got {max_len}")));
    }
    if s >= frame.len() || t >= frame.len() {
        return Err(Error::input("road endpoint is not a vertex"));
    }
    let mut out = Vec::new();
    let mut path = vec![s];
    let mut dirs = Vec::new();
    let mut on_path = vec![false; frame.len()];
    on_path[s] = true;
    extend_roads(frame, t, max_len as usize, &mut path, &mut dirs, &mut on_path, &mut out);
    out.sort_by(|a, b| (&a.waypoints, &a.directions).cmp(&(&b.waypoints, &b.directions)));
    Ok(out)
}

fn extend_roads(
    frame: &Frame,
    target: Vertex,
    max_len: usize,
    path: &mut Vec<Vertex>,
    dirs: &mut Vec<Direction>,
    on_path: &mut [bool],
    out: &mut Vec<Road<Vertex>>,
) {
    let here = *path.last().expect("non-empty path");
    if dirs.len() == max_len {
        return;
    }
    let steps = frame
        .successors(here)
        .iter()
        .map(|&n| (n, Direction::Forward))
        .chain(frame.predecessors(here).iter().map(|&n| (n, Direction::Inverse)));
    for (next, dir) in steps {
        if on_path[next] {
            continue;
        }
        path.push(next);
        dirs.push(dir);
        if next == target {
            out.push(Road { waypoints: path.clone(), directions: dirs.clone() });
        } else {
            on_path[next] = true;
            extend_roads(frame, target, max_len, path, dirs, on_path, out);
            on_path[next] = false;
        }
        path.pop();
        dirs.pop();
    }
}
