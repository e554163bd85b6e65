//! Canonical certificates for rooted digraphs.
//!
//! Colour refinement seeded with the root and the BFS layers, then
//! individualize-and-refine over every vertex of the first non-singleton
//! cell; the certificate keeps the smallest adjacency encoding over all
//! discrete leaves. No automorphism pruning, which is fine for hulls of
//! bounded-degree frames.

use std::fmt;

use serde::Serialize;

use super::RootedGraph;

/// Bumped whenever the byte layout of certificates changes.
pub const CERTIFICATE_VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HullType {
    /// Equal for two hulls exactly when they are root-isomorphic.
    pub certificate: Vec<u8>,
    pub size: usize,
    pub depth: usize,
}

impl HullType {
    pub fn to_hex(&self) -> String {
        self.certificate.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for HullType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

struct Canon<'a> {
    h: &'a RootedGraph,
    best: Option<Vec<u8>>,
}

impl Canon<'_> {
    /// Ranks iso-invariant signatures into colours `0..k`.
    fn rank<T: Ord + Clone>(sigs: &[T]) -> Vec<u32> {
        let mut sorted = sigs.to_vec();
        sorted.sort();
        sorted.dedup();
        sigs.iter().map(|s| sorted.binary_search(s).expect("present") as u32).collect()
    }

    fn refine(&self, mut colors: Vec<u32>) -> Vec<u32> {
        let g = self.h.graph();
        let mut cells = count(&colors);
        loop {
            let sigs: Vec<(u32, Vec<u32>, Vec<u32>)> = g
                .vertices()
                .map(|v| {
                    let mut out: Vec<u32> = g.successors(v).iter().map(|&u| colors[u]).collect();
                    let mut inn: Vec<u32> = g.predecessors(v).iter().map(|&u| colors[u]).collect();
                    out.sort_unstable();
                    inn.sort_unstable();
                    (colors[v], out, inn)
                })
                .collect();
            colors = Self::rank(&sigs);
            let now = count(&colors);
            if now == cells {
                return colors;
            }
            cells = now;
        }
    }

    fn encode(&self, colors: &[u32]) -> Vec<u8> {
        let g = self.h.graph();
        let n = g.len();
        let mut at = vec![0; n];
        for v in g.vertices() {
            at[colors[v] as usize] = v;
        }
        let mut bytes = vec![0u8; (n * n).div_ceil(8)];
        for i in 0..n {
            for j in 0..n {
                if g.has_edge(at[i], at[j]) {
                    let bit = i * n + j;
                    bytes[bit / 8] |= 0x80 >> (bit % 8);
                }
            }
        }
        bytes
    }

    fn search(&mut self, colors: Vec<u32>) {
        let n = colors.len();
        if count(&colors) == n {
            let code = self.encode(&colors);
            if self.best.as_ref().is_none_or(|b| code < *b) {
                self.best = Some(code);
            }
            return;
        }
        let mut sizes = vec![0usize; n];
        for &c in &colors {
            sizes[c as usize] += 1;
        }
        let target = sizes.iter().position(|&s| s > 1).expect("not discrete") as u32;
        for v in (0..n).filter(|&v| colors[v] == target) {
            let split: Vec<u32> = (0..n)
                .map(|u| 2 * colors[u] + u32::from(colors[u] == target && u != v))
                .collect();
            let split = self.refine(Self::rank(&split));
            self.search(split);
        }
    }
}

fn count(colors: &[u32]) -> usize {
    colors.iter().max().map_or(0, |&m| m as usize + 1)
}

/// The certificate of `h`. Depth is recorded beside it, not in it, so that
/// saturated hulls of different depths compare equal.
pub fn canonical_form(h: &RootedGraph) -> HullType {
    let g = h.graph();
    let mut canon = Canon { h, best: None };
    let seed: Vec<(bool, usize, bool)> = g
        .vertices()
        .map(|v| (v != h.root(), h.layers()[v], g.has_edge(v, v)))
        .collect();
    let colors = canon.refine(Canon::rank(&seed));

    let mut certificate = vec![b'U', b'H', CERTIFICATE_VERSION];
    certificate.extend((g.len() as u32).to_be_bytes());
    let mut sizes = vec![0u16; count(&colors)];
    for &c in &colors {
        sizes[c as usize] += 1;
    }
    certificate.extend((sizes.len() as u16).to_be_bytes());
    for s in &sizes {
        certificate.extend(s.to_be_bytes());
    }
    if !g.is_empty() {
        canon.search(colors);
        certificate.extend(canon.best.expect("a leaf was reached"));
    }
    HullType { certificate, size: g.len(), depth: h.depth() }
}
