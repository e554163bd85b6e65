use std::collections::BTreeMap;

use rayon::prelude::*;

use super::syntax::ModalFormula;
use crate::error::{Error, Result};
use crate::frame::{Frame, ImageMode, Vertex, VertexSet};
use crate::limits::{Limits, ENV_VALUATION_BITS};
use crate::ultrafilter::UEFrame;

pub type Valuation = BTreeMap<u32, VertexSet>;

/// A Kripke model `<F, V>`. Letters without an entry are false everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    frame: Frame,
    valuation: Valuation,
}

impl Model {
    pub fn new(frame: Frame, valuation: Valuation) -> Result<Model> {
        for (p, set) in &valuation {
            if set.universe() != frame.len() {
                return Err(Error::input(format!("valuation of p{p} is not over the frame's vertices")));
            }
        }
        Ok(Model { frame, valuation })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn valuation(&self) -> &Valuation {
        &self.valuation
    }

    pub fn letter(&self, p: u32) -> VertexSet {
        self.valuation.get(&p).cloned().unwrap_or_else(|| self.frame.empty_set())
    }

    fn holds_letter(&self, p: u32, w: Vertex) -> bool {
        self.valuation.get(&p).is_some_and(|s| s.contains(w))
    }

    fn eval_at(&self, w: Vertex, phi: &ModalFormula) -> bool {
        match phi {
            ModalFormula::Atom(p) => self.holds_letter(*p, w),
            ModalFormula::Bot => false,
            ModalFormula::Top => true,
            ModalFormula::Not(a) => !self.eval_at(w, a),
            ModalFormula::And(a, b) => self.eval_at(w, a) && self.eval_at(w, b),
            ModalFormula::Or(a, b) => self.eval_at(w, a) || self.eval_at(w, b),
            ModalFormula::Imp(a, b) => !self.eval_at(w, a) || self.eval_at(w, b),
            ModalFormula::Diamond(a) => self.some_successor(w, |v| self.eval_at(v, a)),
            ModalFormula::Boxed(a) => !self.some_successor(w, |v| !self.eval_at(v, a)),
        }
    }

    fn some_successor(&self, w: Vertex, pred: impl Fn(Vertex) -> bool) -> bool {
        self.frame.successors(w).iter().any(|&v| pred(v))
    }
}

/// `M, w ⊩ φ`.
pub fn eval_modal(model: &Model, w: Vertex, phi: &ModalFormula) -> Result<bool> {
    if w >= model.frame.len() {
        return Err(Error::input(format!("unknown vertex index {w}")));
    }
    Ok(model.eval_at(w, phi))
}

/// `V(φ) = {w : M, w ⊩ φ}`, computed set-wise by structural recursion.
pub fn truth_set(model: &Model, phi: &ModalFormula) -> VertexSet {
    let frame = &model.frame;
    let diamond = |inner: &VertexSet| {
        frame
            .relation_image(inner, ImageMode::Backward)
            .expect("truth set over the model's frame")
    };
    match phi {
        ModalFormula::Atom(p) => model.letter(*p),
        ModalFormula::Bot => frame.empty_set(),
        ModalFormula::Top => frame.full_set(),
        ModalFormula::Not(a) => truth_set(model, a).complement(),
        ModalFormula::And(a, b) => truth_set(model, a).intersection(&truth_set(model, b)),
        ModalFormula::Or(a, b) => truth_set(model, a).union(&truth_set(model, b)),
        ModalFormula::Imp(a, b) => truth_set(model, a).complement().union(&truth_set(model, b)),
        ModalFormula::Diamond(a) => diamond(&truth_set(model, a)),
        ModalFormula::Boxed(a) => diamond(&truth_set(model, a).complement()).complement(),
    }
}

/// Outcome of [`frame_valid`]; a refuting valuation and world when invalid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Validity {
    pub valid: bool,
    pub counterexample: Option<(Valuation, Vertex)>,
}

/// `F ⊩ φ`: every valuation of the letters of φ, at every world.
pub fn frame_valid(frame: &Frame, phi: &ModalFormula, limits: &Limits) -> Result<Validity> {
    let letters: Vec<u32> = phi.letters().into_iter().collect();
    let n = frame.len();
    let bits = letters.len() * n;
    if bits > limits.valuation_bits || bits >= 64 {
        return Err(Error::resource(format!(
            "frame validity needs 2^{bits} valuations ({} letters x {n} worlds); limit is 2^{} (set {ENV_VALUATION_BITS})",
            letters.len(),
            limits.valuation_bits
        )));
    }
    let valuation_for = |code: u64| -> Valuation {
        letters
            .iter()
            .enumerate()
            .map(|(k, &p)| {
                let chunk = (code >> (k * n)) & if n == 0 { 0 } else { u64::MAX >> (64 - n) };
                (p, VertexSet::from_mask(n, chunk))
            })
            .collect()
    };
    let refuted = (0..1u64 << bits).into_par_iter().find_first(|&code| {
        let m = Model { frame: frame.clone(), valuation: valuation_for(code) };
        truth_set(&m, phi).len() != n
    });
    Ok(match refuted {
        None => Validity { valid: true, counterexample: None },
        Some(code) => {
            let m = Model { frame: frame.clone(), valuation: valuation_for(code) };
            let w = truth_set(&m, phi).complement().iter().next().expect("refuted somewhere");
            Validity { valid: false, counterexample: Some((m.valuation, w)) }
        }
    })
}

/// `M^ue = <F^ue, V^ue>` with `V^ue(p) = {u : V(p) ∈ u}`.
#[derive(Debug, Clone)]
pub struct UEModel {
    ue: UEFrame,
    base: Model,
}

impl UEModel {
    pub fn new(ue: UEFrame, base: Model) -> Result<UEModel> {
        if ue.base() != base.frame() {
            return Err(Error::input("ue frame was not built from the model's frame"));
        }
        Ok(UEModel { ue, base })
    }

    pub fn ue_frame(&self) -> &UEFrame {
        &self.ue
    }

    pub fn base_model(&self) -> &Model {
        &self.base
    }

    /// The extension as an ordinary model over `ue_frame().as_frame()`.
    pub fn as_model(&self) -> Model {
        let frame = self.ue.as_frame().clone();
        let valuation = self
            .base
            .valuation
            .iter()
            .map(|(&p, set)| {
                let lifted = frame.set_of(
                    self.ue
                        .ultrafilters()
                        .iter()
                        .enumerate()
                        .filter(|(_, u)| u.contains(set))
                        .map(|(i, _)| i),
                );
                (p, lifted)
            })
            .collect();
        Model { frame, valuation }
    }
}

/// Whether `M^ue, u ⊩ φ ⇔ V(φ) ∈ u` holds for every ultrafilter u.
pub fn truth_membership_check(ue_model: &UEModel, phi: &ModalFormula) -> bool {
    let lifted = ue_model.as_model();
    let base_truth = truth_set(&ue_model.base, phi);
    ue_model
        .ue
        .ultrafilters()
        .iter()
        .enumerate()
        .all(|(i, u)| lifted.eval_at(i, phi) == u.contains(&base_truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modal::parse_modal;
    use crate::ultrafilter::build_ue;

    fn model(frame: Frame, val: &[(u32, &[&str])]) -> Model {
        let valuation = val.iter().map(|(p, ids)| (*p, frame.set_of_ids(ids).unwrap())).collect();
        Model::new(frame, valuation).unwrap()
    }

    fn f(text: &str) -> ModalFormula {
        parse_modal(text).unwrap()
    }

    #[test]
    fn eval_examples() {
        let ab = Frame::from_named(&["a", "b"], &[("a", "b")]).unwrap();
        let m = model(ab, &[(0, &["b"])]);
        assert!(eval_modal(&m, 0, &f("<>p0")).unwrap());
        assert!(!eval_modal(&m, 1, &f("<>p0")).unwrap());
        assert!(eval_modal(&m, 1, &f("[]p0")).unwrap());
        assert!(eval_modal(&m, 7, &f("p0")).is_err());

        let cycle = Frame::from_named(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")]).unwrap();
        let m = model(cycle, &[(0, &["a"])]);
        // a→b→c→a
        assert!(eval_modal(&m, 0, &f("<><><>p0")).unwrap());
        assert!(!eval_modal(&m, 0, &f("<><>p0")).unwrap());
    }

    #[test]
    fn unknown_letters_are_false() {
        let m = model(Frame::numbered(2, [(0, 1)]).unwrap(), &[]);
        assert!(!eval_modal(&m, 0, &f("p9")).unwrap());
        assert!(truth_set(&m, &f("p9")).is_empty());
    }

    #[test]
    fn truth_set_examples() {
        let ab = Frame::from_named(&["a", "b"], &[]).unwrap();
        let m = model(ab, &[(0, &["a"])]);
        assert_eq!(truth_set(&m, &f("~p0")), m.frame().set_of([1]));
        assert!(truth_set(&m, &f("false")).is_empty());

        let fr = Frame::from_named(&["a", "b", "c"], &[("a", "b"), ("c", "b")]).unwrap();
        let m = model(fr, &[(0, &["b"])]);
        let expected: Vec<_> = m.frame().vertices().filter(|&w| eval_modal(&m, w, &f("<>p0")).unwrap()).collect();
        assert_eq!(truth_set(&m, &f("<>p0")).to_vec(), expected);
        assert_eq!(expected, vec![0, 2]);
    }

    #[test]
    fn validity_examples() {
        let lim = Limits::default();
        let refl = Frame::numbered(1, [(0, 0)]).unwrap();
        let irrefl = Frame::numbered(1, []).unwrap();
        let t = f("[]p0 -> p0");
        assert!(frame_valid(&refl, &t, &lim).unwrap().valid);
        let v = frame_valid(&irrefl, &t, &lim).unwrap();
        assert!(!v.valid);
        let (val, w) = v.counterexample.unwrap();
        assert_eq!(w, 0);
        assert!(val[&0].is_empty());
        let chain = Frame::numbered(4, [(0, 1), (1, 2)]).unwrap();
        assert!(frame_valid(&chain, &f("p0 -> p0"), &lim).unwrap().valid);
    }

    #[test]
    fn validity_cap_is_a_resource_error() {
        let big = Frame::numbered(8, []).unwrap();
        let lim = Limits { valuation_bits: 10, ..Limits::default() };
        let err = frame_valid(&big, &f("p0 & p1 -> p0"), &lim).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
        assert!(err.to_string().contains("2^16"));
    }

    #[test]
    fn truth_membership_on_small_model() {
        let fr = Frame::numbered(3, [(0, 1), (1, 2), (2, 2)]).unwrap();
        let m = model(fr.clone(), &[(0, &["1"]), (1, &["0", "2"])]);
        let ue = UEModel::new(build_ue(&fr, &Limits::default()).unwrap(), m).unwrap();
        for text in ["p0", "<>p0", "[]p1 -> <><>p0", "~<>[]p1 | p0"] {
            assert!(truth_membership_check(&ue, &f(text)), "{text}");
        }
    }
}
