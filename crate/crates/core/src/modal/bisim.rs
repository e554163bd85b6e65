//! Bounded bisimulation and bounded-depth modal equivalence.
//!
//! [`n_bisimilar`] plays the back-and-forth game exactly. [`modally_equivalent_upto`]
//! answers the same question from the formula side: it enumerates every
//! formula of depth at most n up to equivalence on the two models and looks
//! for one that separates the points. On image-finite models the two agree.

use std::collections::{BTreeSet, HashMap};

use super::semantics::Model;
use super::syntax::ModalFormula;
use crate::error::{Error, Result};
use crate::frame::Vertex;
use crate::limits::{Limits, ENV_SEARCH_LIMIT};

/// Whether `(m1, w1)` and `(m2, w2)` are n-bisimilar.
pub fn n_bisimilar(m1: &Model, w1: Vertex, m2: &Model, w2: Vertex, n: usize) -> Result<bool> {
    let (n1, n2) = (m1.frame().len(), m2.frame().len());
    if w1 >= n1 || w2 >= n2 {
        return Err(Error::input("bisimulation root is not a vertex"));
    }
    let letters: BTreeSet<u32> = m1.valuation().keys().chain(m2.valuation().keys()).copied().collect();
    let letter_sets: Vec<_> = letters.iter().map(|&p| (m1.letter(p), m2.letter(p))).collect();
    let base: Vec<bool> = (0..n1 * n2)
        .map(|k| {
            let (a, b) = (k / n2, k % n2);
            letter_sets.iter().all(|(s1, s2)| s1.contains(a) == s2.contains(b))
        })
        .collect();
    let (f1, f2) = (m1.frame(), m2.frame());
    let mut z = base.clone();
    for _ in 0..n {
        let next: Vec<bool> = (0..n1 * n2)
            .map(|k| {
                let (a, b) = (k / n2, k % n2);
                base[k]
                    && f1.successors(a).iter().all(|&a2| f2.successors(b).iter().any(|&b2| z[a2 * n2 + b2]))
                    && f2.successors(b).iter().all(|&b2| f1.successors(a).iter().any(|&a2| z[a2 * n2 + b2]))
            })
            .collect();
        if next == z {
            break;
        }
        z = next;
    }
    Ok(z[w1 * n2 + w2])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModalEquivalence {
    pub equivalent: bool,
    /// True at the first point and false at the second.
    pub witness: Option<ModalFormula>,
}

/// One level of the depth-bounded enumeration: the partition of the joint
/// carrier into classes of points that agree on all formulas of this depth,
/// and a formula defining each class.
struct Level {
    block_of: Vec<usize>,
    block_formula: Vec<ModalFormula>,
    generators: Vec<(ModalFormula, Vec<bool>)>,
}

/// Decides agreement on all formulas of depth ≤ `depth` over `letters`.
pub fn modally_equivalent_upto(
    m1: &Model,
    w1: Vertex,
    m2: &Model,
    w2: Vertex,
    depth: usize,
    letters: &[u32],
    limits: &Limits,
) -> Result<ModalEquivalence> {
    let (n1, n2) = (m1.frame().len(), m2.frame().len());
    if w1 >= n1 || w2 >= n2 {
        return Err(Error::input("comparison point is not a vertex"));
    }
    let total = n1 + n2;
    // successors in the disjoint union
    let succ: Vec<Vec<usize>> = (0..total)
        .map(|k| {
            if k < n1 {
                m1.frame().successors(k).to_vec()
            } else {
                m2.frame().successors(k - n1).iter().map(|&s| s + n1).collect()
            }
        })
        .collect();
    let atoms: Vec<(ModalFormula, Vec<bool>)> = letters
        .iter()
        .map(|&p| {
            let (s1, s2) = (m1.letter(p), m2.letter(p));
            let truth = (0..total)
                .map(|k| if k < n1 { s1.contains(k) } else { s2.contains(k - n1) })
                .collect();
            (ModalFormula::Atom(p), truth)
        })
        .collect();

    let mut level = partition(atoms.clone(), total, limits)?;
    for _ in 0..depth {
        let mut generators = atoms.clone();
        for (b, chi) in level.block_formula.iter().enumerate() {
            let truth = (0..total)
                .map(|k| succ[k].iter().any(|&s| level.block_of[s] == b))
                .collect();
            generators.push((chi.clone().dia(), truth));
        }
        let next = partition(generators, total, limits)?;
        let stable = next.block_formula.len() == level.block_formula.len();
        level = next;
        if stable {
            break;
        }
    }

    let (a, b) = (w1, n1 + w2);
    if level.block_of[a] == level.block_of[b] {
        return Ok(ModalEquivalence { equivalent: true, witness: None });
    }
    let (g, truth) = level
        .generators
        .iter()
        .find(|(_, t)| t[a] != t[b])
        .expect("distinct classes differ on a generator");
    let witness = if truth[a] { g.clone() } else { g.clone().not() };
    Ok(ModalEquivalence { equivalent: false, witness: Some(witness) })
}

fn partition(generators: Vec<(ModalFormula, Vec<bool>)>, total: usize, limits: &Limits) -> Result<Level> {
    if generators.len() * total.max(1) > limits.search {
        return Err(Error::resource(format!(
            "formula enumeration table of {} generators over {total} points exceeds {} (set {ENV_SEARCH_LIMIT})",
            generators.len(),
            limits.search
        )));
    }
    let mut ids: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut signatures: Vec<Vec<bool>> = Vec::new();
    let block_of: Vec<usize> = (0..total)
        .map(|k| {
            let sig: Vec<bool> = generators.iter().map(|(_, t)| t[k]).collect();
            *ids.entry(sig.clone()).or_insert_with(|| {
                signatures.push(sig);
                signatures.len() - 1
            })
        })
        .collect();
    let block_formula = signatures
        .iter()
        .enumerate()
        .map(|(b, sig)| isolate(b, sig, &signatures, &generators))
        .collect();
    Ok(Level { block_of, block_formula, generators })
}

/// A conjunction of generator literals true on block `b` and false on every
/// other block, picked greedily to keep formulas short.
fn isolate(b: usize, sig: &[bool], all: &[Vec<bool>], generators: &[(ModalFormula, Vec<bool>)]) -> ModalFormula {
    let mut rivals: Vec<usize> = (0..all.len()).filter(|&c| c != b).collect();
    let mut literals = Vec::new();
    while !rivals.is_empty() {
        let (best, _) = (0..generators.len())
            .map(|g| (g, rivals.iter().filter(|&&c| all[c][g] != sig[g]).count()))
            .max_by_key(|&(g, hits)| (hits, std::cmp::Reverse(g)))
            .expect("some generator separates distinct signatures");
        rivals.retain(|&c| all[c][best] == sig[best]);
        let lit = generators[best].0.clone();
        literals.push(if sig[best] { lit } else { lit.not() });
    }
    ModalFormula::conjunction(literals)
}
