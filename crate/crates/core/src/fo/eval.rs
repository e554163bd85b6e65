use std::collections::{BTreeMap, HashMap};

use super::syntax::FOFormula;
use crate::error::{Error, Result};
use crate::frame::{Frame, Vertex, VertexSet};
use crate::limits::Limits;
use crate::ultrafilter::{build_ue_auto, Ultrafilter};

pub type Assignment = BTreeMap<String, Vertex>;

/// A formula with variables resolved to environment slots.
#[derive(Debug, Clone)]
pub(crate) enum Compiled {
    Rel(usize, usize),
    Eq(usize, usize),
    Not(Box<Compiled>),
    And(Box<Compiled>, Box<Compiled>),
    Or(Box<Compiled>, Box<Compiled>),
    Imp(Box<Compiled>, Box<Compiled>),
    Exists(usize, Box<Compiled>),
    Forall(usize, Box<Compiled>),
}

impl Compiled {
    /// Compiles `phi`; the free variables in `free` get slots `0..free.len()`.
    pub(crate) fn new(phi: &FOFormula, free: &[String]) -> (Compiled, usize) {
        let mut scope: HashMap<String, Vec<usize>> = HashMap::new();
        for (slot, x) in free.iter().enumerate() {
            scope.entry(x.clone()).or_default().push(slot);
        }
        let mut slots = free.len();
        let c = Self::go(phi, &mut scope, &mut slots);
        (c, slots)
    }

    fn go(phi: &FOFormula, scope: &mut HashMap<String, Vec<usize>>, slots: &mut usize) -> Compiled {
        let slot = |scope: &HashMap<String, Vec<usize>>, x: &str| {
            *scope.get(x).and_then(|s| s.last()).expect("free variables checked before compiling")
        };
        match phi {
            FOFormula::Rel(a, b) => Compiled::Rel(slot(scope, a), slot(scope, b)),
            FOFormula::Eq(a, b) => Compiled::Eq(slot(scope, a), slot(scope, b)),
            FOFormula::Not(a) => Compiled::Not(Box::new(Self::go(a, scope, slots))),
            FOFormula::And(a, b) => Compiled::And(Box::new(Self::go(a, scope, slots)), Box::new(Self::go(b, scope, slots))),
            FOFormula::Or(a, b) => Compiled::Or(Box::new(Self::go(a, scope, slots)), Box::new(Self::go(b, scope, slots))),
            FOFormula::Imp(a, b) => Compiled::Imp(Box::new(Self::go(a, scope, slots)), Box::new(Self::go(b, scope, slots))),
            FOFormula::Exists(x, body) | FOFormula::Forall(x, body) => {
                let s = *slots;
                *slots += 1;
                scope.entry(x.clone()).or_default().push(s);
                let inner = Box::new(Self::go(body, scope, slots));
                scope.get_mut(x).expect("pushed above").pop();
                if matches!(phi, FOFormula::Exists(..)) {
                    Compiled::Exists(s, inner)
                } else {
                    Compiled::Forall(s, inner)
                }
            }
        }
    }

    pub(crate) fn eval(&self, frame: &Frame, env: &mut [Vertex]) -> bool {
        match self {
            Compiled::Rel(a, b) => frame.has_edge(env[*a], env[*b]),
            Compiled::Eq(a, b) => env[*a] == env[*b],
            Compiled::Not(a) => !a.eval(frame, env),
            Compiled::And(a, b) => a.eval(frame, env) && b.eval(frame, env),
            Compiled::Or(a, b) => a.eval(frame, env) || b.eval(frame, env),
            Compiled::Imp(a, b) => !a.eval(frame, env) || b.eval(frame, env),
            Compiled::Exists(s, body) => frame.vertices().any(|v| {
                env[*s] = v;
                body.eval(frame, env)
            }),
            Compiled::Forall(s, body) => frame.vertices().all(|v| {
                env[*s] = v;
                body.eval(frame, env)
            }),
        }
    }
}

/// `F ⊨ φ[asg]`. Extra entries in `asg` are ignored.
pub fn eval_fo(frame: &Frame, phi: &FOFormula, asg: &Assignment) -> Result<bool> {
    let free: Vec<String> = phi.free_vars().into_iter().collect();
    let mut env = Vec::with_capacity(free.len());
    for x in &free {
        match asg.get(x) {
            Some(&v) if v < frame.len() => env.push(v),
            Some(&v) => return Err(Error::input(format!("variable {x} is assigned to unknown vertex index {v}"))),
            None => return Err(Error::input(format!("free variable {x} is not assigned"))),
        }
    }
    let (c, slots) = Compiled::new(phi, &free);
    env.resize(slots, 0);
    Ok(c.eval(frame, &mut env))
}

/// `F ⊨ σ` for a sentence.
pub fn satisfies(frame: &Frame, sentence: &FOFormula) -> Result<bool> {
    eval_fo(frame, sentence, &Assignment::new())
}

/// The vertices satisfying a formula whose only free variable is `x`.
pub fn satisfying_set(frame: &Frame, phi: &FOFormula, x: &str) -> Result<VertexSet> {
    let free = phi.free_vars();
    if free.iter().any(|y| y != x) {
        return Err(Error::input(format!("formula has free variables other than {x}")));
    }
    let (c, slots) = Compiled::new(phi, &[x.to_string()]);
    let mut env = vec![0; slots.max(1)];
    Ok(frame.set_of(frame.vertices().filter(|&v| {
        env[0] = v;
        c.eval(frame, &mut env)
    })))
}

/// Checks `F^ue ⊨ φ(u) ⇔ {w : F^ue ⊨ φ(η(w))} ∈ u` for a formula with exactly
/// one free variable.
pub fn los_like_check(frame: &Frame, phi: &FOFormula, u: &Ultrafilter, limits: &Limits) -> Result<bool> {
    let free = phi.free_vars();
    if free.len() != 1 {
        return Err(Error::input(format!("expected exactly one free variable, found {}", free.len())));
    }
    let x = free.into_iter().next().expect("one free variable");
    let ue = build_ue_auto(frame, limits)?;
    let u_index = ue
        .ultrafilters()
        .iter()
        .position(|v| v == u)
        .ok_or_else(|| Error::input("ultrafilter is not over this frame's carrier"))?;
    let ext = ue.as_frame();
    let lhs = eval_fo(ext, phi, &[(x.clone(), u_index)].into())?;
    // η(w) is the principal ultrafilter at w, which sits at index w
    let eta = crate::ultrafilter::canonical_embedding(frame);
    let mut large = frame.empty_set();
    for (w, pw) in eta.iter().enumerate() {
        let at = ue.ultrafilters().iter().position(|v| v == pw).expect("principal ultrafilters are points of the extension");
        if eval_fo(ext, phi, &[(x.clone(), at)].into())? {
            large.insert(w);
        }
    }
    Ok(lhs == u.contains(&large))
}
