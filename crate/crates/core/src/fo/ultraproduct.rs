//! Ultraproducts of finitely many finite frames.
//!
//! Over a finite index set every ultrafilter is principal, so the result is
//! always a copy of one factor. The quotient is still built the long way,
//! from all functions on the index set, so that the construction itself can
//! be tested against Łoś's theorem.

use crate::error::{Error, Result};
use crate::frame::{Frame, Vertex, VertexSet};
use crate::limits::{Limits, ENV_SEARCH_LIMIT};
use crate::ultrafilter::{Carrier, Ultrafilter};

#[derive(Debug, Clone)]
pub struct Ultraproduct {
    pub frame: Frame,
    /// One function `i ↦ f(i) ∈ W_i` per class, the first enumerated.
    pub representatives: Vec<Vec<Vertex>>,
    /// `factor_maps[i][c]` is the value of class `c`'s representative at `i`.
    pub factor_maps: Vec<Vec<Vertex>>,
}

impl Ultraproduct {
    /// The class of the function `f`, if `f` is a function on the index set.
    pub fn class_of(&self, f: &[Vertex], d: &Ultrafilter) -> Option<Vertex> {
        if f.len() != self.factor_maps.len() {
            return None;
        }
        self.representatives.iter().position(|g| d.contains(&equalizer(f, g)))
    }
}

fn equalizer(f: &[Vertex], g: &[Vertex]) -> VertexSet {
    VertexSet::from_iter_in(f.len(), (0..f.len()).filter(|&i| f[i] == g[i]))
}

/// `∏ structures / d`. Vertices are named `[<id>]` after the value of the
/// representative at the index `d` is principal at.
pub fn ultraproduct(structures: &[Frame], d: &Ultrafilter, limits: &Limits) -> Result<Ultraproduct> {
    if structures.is_empty() {
        return Err(Error::input("ultraproduct of an empty family"));
    }
    let size = structures.len();
    if d.carrier() != Carrier::indices(size) {
        return Err(Error::input(format!("ultrafilter is not over the index set of size {size}")));
    }
    let total = structures.iter().try_fold(1usize, |acc, f| acc.checked_mul(f.len()));
    let total = match total {
        Some(t) if t <= limits.search => t,
        _ => {
            return Err(Error::resource(format!(
                "the product has more than {} functions (set {ENV_SEARCH_LIMIT})",
                limits.search
            )))
        }
    };

    let mut representatives: Vec<Vec<Vertex>> = Vec::new();
    for mut code in 0..total {
        let f: Vec<Vertex> = structures
            .iter()
            .map(|s| {
                let v = code % s.len();
                code /= s.len();
                v
            })
            .collect();
        if !representatives.iter().any(|g| d.contains(&equalizer(&f, g))) {
            representatives.push(f);
        }
    }

    let related = |f: &[Vertex], g: &[Vertex]| {
        let holds = VertexSet::from_iter_in(size, (0..size).filter(|&i| structures[i].has_edge(f[i], g[i])));
        d.contains(&holds)
    };
    let mut edges = Vec::new();
    for (a, f) in representatives.iter().enumerate() {
        for (b, g) in representatives.iter().enumerate() {
            if related(f, g) {
                edges.push((a, b));
            }
        }
    }
    let at = d.point();
    let ids = representatives
        .iter()
        .map(|f| format!("[{}]", structures[at].id(f[at])))
        .collect();
    let frame = Frame::from_indexed(ids, edges)?;
    let factor_maps = (0..size).map(|i| representatives.iter().map(|f| f[i]).collect()).collect();
    Ok(Ultraproduct { frame, representatives, factor_maps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fo::{parse_fo, satisfies};

    #[test]
    fn principal_projection() {
        let lim = Limits::default();
        let a = Frame::numbered(2, [(0, 1)]).unwrap();
        let b = Frame::numbered(3, [(0, 0)]).unwrap();
        let d = Ultrafilter::on_indices(2, 0).unwrap();
        let up = ultraproduct(&[a.clone(), b], &d, &lim).unwrap();
        assert_eq!(up.frame.len(), 2);
        assert_eq!(up.frame.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(up.factor_maps[0], vec![0, 1]);
        assert_eq!(up.frame.ids(), ["[0]", "[1]"]);
        assert_eq!(up.class_of(&[1, 2], &d), Some(1));
    }

    #[test]
    fn ultrapower_of_a_cycle() {
        let lim = Limits::default();
        let cycle = Frame::numbered(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let d = Ultrafilter::on_indices(4, 2).unwrap();
        let up = ultraproduct(&vec![cycle.clone(); 4], &d, &lim).unwrap();
        assert_eq!(up.frame.len(), 3);
        let map: Vec<_> = up.factor_maps[2].clone();
        for (a, b) in up.frame.edges() {
            assert!(cycle.has_edge(map[a], map[b]));
        }
        assert_eq!(up.frame.edge_count(), 3);
        let s = parse_fo("forall x. exists y. R(x,y) & ~R(y,x)").unwrap();
        assert!(satisfies(&up.frame, &s).unwrap());
    }

    #[test]
    fn input_errors() {
        let lim = Limits::default();
        let d = Ultrafilter::on_indices(1, 0).unwrap();
        assert!(matches!(ultraproduct(&[], &d, &lim), Err(Error::Input(_))));
        let f = Frame::numbered(1, []).unwrap();
        assert!(matches!(ultraproduct(&[f.clone(), f], &d, &lim), Err(Error::Input(_))));
    }
}
