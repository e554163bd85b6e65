//! Bounded search for a first-order sentence separating two frames.
//!
//! Rather than listing sentences syntactically, the search enumerates them up
//! to equivalence: for `m` free variables and `r` remaining quantifiers it
//! partitions all m-tuples of both frames by the formulas of rank `r`, each
//! class carrying a defining formula. A rank-k sentence can always be
//! rewritten over the variables `x1..xk`, so the partition at `m = 0` decides
//! agreement on all sentences of rank ≤ k.

use std::collections::HashMap;

use super::syntax::FOFormula;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::limits::{Limits, ENV_SEARCH_LIMIT};

fn var(i: usize) -> String {
    format!("x{i}")
}

struct Level {
    block_of: Vec<usize>,
    block_formula: Vec<FOFormula>,
    generators: Vec<(FOFormula, Vec<bool>)>,
}

struct Search<'a> {
    f: [&'a Frame; 2],
    cap: usize,
}

impl Search<'_> {
    fn count(&self, side: usize, m: usize) -> usize {
        self.f[side].len().pow(m as u32)
    }

    fn tuples(&self, m: usize) -> usize {
        self.count(0, m) + self.count(1, m)
    }

    /// Splits a global tuple index into (structure, digits), little-endian.
    fn decode(&self, m: usize, mut k: usize) -> (usize, Vec<usize>) {
        let side = if k < self.count(0, m) { 0 } else { 1 };
        if side == 1 {
            k -= self.count(0, m);
        }
        let n = self.f[side].len();
        let digits = (0..m)
            .map(|_| {
                let d = k % n;
                k /= n;
                d
            })
            .collect();
        (side, digits)
    }

    fn atoms(&self, m: usize) -> Vec<(FOFormula, Vec<bool>)> {
        let decoded: Vec<_> = (0..self.tuples(m)).map(|k| self.decode(m, k)).collect();
        let mut out = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let truth = decoded.iter().map(|(s, t)| self.f[*s].has_edge(t[i], t[j])).collect();
                out.push((FOFormula::rel(var(i + 1), var(j + 1)), truth));
                if i < j {
                    let truth = decoded.iter().map(|(_, t)| t[i] == t[j]).collect();
                    out.push((FOFormula::eq(var(i + 1), var(j + 1)), truth));
                }
            }
        }
        out
    }

    fn level(&self, m: usize, r: usize) -> Result<Level> {
        let mut generators = self.atoms(m);
        if r > 0 {
            let lower = self.level(m + 1, r - 1)?;
            let x = var(m + 1);
            for (b, chi) in lower.block_formula.iter().enumerate() {
                let mut truth = Vec::with_capacity(self.tuples(m));
                for side in 0..2 {
                    let (n, count) = (self.f[side].len(), self.count(side, m));
                    let base = if side == 0 { 0 } else { self.count(0, m + 1) };
                    for t in 0..count {
                        truth.push((0..n).any(|a| lower.block_of[base + t + a * count] == b));
                    }
                }
                generators.push((FOFormula::exists(x.clone(), chi.clone()), truth));
            }
        }
        self.partition(generators, m)
    }

    fn partition(&self, generators: Vec<(FOFormula, Vec<bool>)>, m: usize) -> Result<Level> {
        let total = self.tuples(m);
        if generators.len() * total > self.cap {
            return Err(Error::resource(format!(
                "sentence enumeration table of {} formulas over {total} tuples exceeds {} (set {ENV_SEARCH_LIMIT})",
                generators.len(),
                self.cap
            )));
        }
        let mut ids: HashMap<Vec<bool>, usize> = HashMap::new();
        let mut signatures: Vec<Vec<bool>> = Vec::new();
        let block_of = (0..total)
            .map(|k| {
                let sig: Vec<bool> = generators.iter().map(|(_, t)| t[k]).collect();
                *ids.entry(sig.clone()).or_insert_with(|| {
                    signatures.push(sig);
                    signatures.len() - 1
                })
            })
            .collect();
        // class formulas are only ever used under a quantifier, so m ≥ 1
        let block_formula = if m == 0 {
            Vec::new()
        } else {
            (0..signatures.len()).map(|b| isolate(b, &signatures, &generators, m)).collect()
        };
        Ok(Level { block_of, block_formula, generators })
    }
}

/// Greedy conjunction of generator literals true exactly on block `b`.
fn isolate(b: usize, all: &[Vec<bool>], generators: &[(FOFormula, Vec<bool>)], m: usize) -> FOFormula {
    let sig = &all[b];
    let mut rivals: Vec<usize> = (0..all.len()).filter(|&c| c != b).collect();
    let mut literals = Vec::new();
    while !rivals.is_empty() {
        let (best, _) = (0..generators.len())
            .map(|g| (g, rivals.iter().filter(|&&c| all[c][g] != sig[g]).count()))
            .max_by_key(|&(g, hits)| (hits, std::cmp::Reverse(g)))
            .expect("distinct signatures differ somewhere");
        rivals.retain(|&c| all[c][best] == sig[best]);
        let lit = generators[best].0.clone();
        literals.push(if sig[best] { lit } else { lit.not() });
    }
    FOFormula::conjunction(literals).unwrap_or_else(|| FOFormula::eq(var(m), var(m)))
}

/// A sentence of quantifier rank ≤ `rank`, in negation normal form over
/// the variables `x1..x<rank>`, true in `f1` and false in `f2`; `None` when
/// the frames agree on every such sentence.
pub fn distinguishing_sentence(f1: &Frame, f2: &Frame, rank: usize, limits: &Limits) -> Result<Option<FOFormula>> {
    let search = Search { f: [f1, f2], cap: limits.search };
    let top = search.level(0, rank)?;
    if top.block_of[0] == top.block_of[1] {
        return Ok(None);
    }
    let (g, truth) = top
        .generators
        .iter()
        .find(|(_, t)| t[0] != t[1])
        .expect("distinct classes differ on a generator");
    let sentence = if truth[0] { g.clone() } else { g.clone().not() };
    Ok(Some(sentence.nnf()))
}
