//! Ehrenfeucht–Fraïssé games between two finite frames.
//!
//! A position is the set of pebbled pairs, a partial isomorphism kept as a
//! sorted vector so that positions reached in different move orders share
//! one memo entry.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::limits::{Limits, ENV_EF_MEMO_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EfMove {
    /// 1 or 2: the structure Spoiler plays in.
    pub structure: u8,
    pub spoiler: String,
    /// `None` when the other structure has no elements to answer with.
    pub duplicator: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EfOutcome {
    pub rounds: usize,
    pub duplicator_wins: bool,
    /// A winning line for Spoiler against Duplicator's most stubborn replies.
    pub spoiler_line: Vec<EfMove>,
}

type Position = Vec<(u32, u32)>;

struct Solver<'a> {
    f: [&'a Frame; 2],
    memo: HashMap<(Position, usize), bool>,
    cap: usize,
}

impl<'a> Solver<'a> {
    fn new(f1: &'a Frame, f2: &'a Frame, limits: &Limits) -> Self {
        Solver { f: [f1, f2], memo: HashMap::new(), cap: limits.ef_memo }
    }

    /// Whether adding `(a, b)` keeps the position a partial isomorphism.
    fn consistent(&self, pos: &[(u32, u32)], a: u32, b: u32) -> bool {
        let [f1, f2] = self.f;
        let (a_, b_) = (a as usize, b as usize);
        if f1.has_edge(a_, a_) != f2.has_edge(b_, b_) {
            return false;
        }
        pos.iter().all(|&(c, d)| {
            let (c, d) = (c as usize, d as usize);
            (a_ == c) == (b_ == d) && f1.has_edge(a_, c) == f2.has_edge(b_, d) && f1.has_edge(c, a_) == f2.has_edge(d, b_)
        })
    }

    fn extend(pos: &[(u32, u32)], a: u32, b: u32) -> Position {
        let mut next = pos.to_vec();
        let at = next.partition_point(|&p| p < (a, b));
        next.insert(at, (a, b));
        next
    }

    fn pair(side: usize, x: u32, y: u32) -> (u32, u32) {
        if side == 0 {
            (x, y)
        } else {
            (y, x)
        }
    }

    fn pebbled(pos: &[(u32, u32)], side: usize, x: u32) -> bool {
        pos.iter().any(|&(a, b)| if side == 0 { a == x } else { b == x })
    }

    /// Duplicator's replies to Spoiler playing `x` in `side` that keep the
    /// position a partial isomorphism.
    fn replies(&self, pos: &[(u32, u32)], side: usize, x: u32) -> Vec<u32> {
        (0..self.f[1 - side].len() as u32)
            .filter(|&y| {
                let (a, b) = Self::pair(side, x, y);
                self.consistent(pos, a, b)
            })
            .collect()
    }

    /// Whether Duplicator survives `r` more rounds from `pos`.
    fn wins(&mut self, pos: &[(u32, u32)], r: usize) -> Result<bool> {
        if r == 0 {
            return Ok(true);
        }
        let key = (pos.to_vec(), r);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let mut result = true;
        'spoiler: for side in 0..2 {
            for x in 0..self.f[side].len() as u32 {
                // replaying a pebbled element changes nothing
                if Self::pebbled(pos, side, x) {
                    continue;
                }
                let mut answered = false;
                for y in self.replies(pos, side, x) {
                    let (a, b) = Self::pair(side, x, y);
                    if r == 1 || self.wins(&Self::extend(pos, a, b), r - 1)? {
                        answered = true;
                        break;
                    }
                }
                if !answered {
                    result = false;
                    break 'spoiler;
                }
            }
        }
        if self.memo.len() >= self.cap {
            return Err(Error::resource(format!(
                "EF memo table exceeded {} positions (set {ENV_EF_MEMO_LIMIT})",
                self.cap
            )));
        }
        self.memo.insert(key, result);
        Ok(result)
    }

    /// Fewest rounds in which Spoiler wins from `pos`, if at most `r`.
    fn rounds_needed(&mut self, pos: &[(u32, u32)], r: usize) -> Result<Option<usize>> {
        for k in 1..=r {
            if !self.wins(pos, k)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    fn line(&mut self, pos: &[(u32, u32)], r: usize) -> Result<Vec<EfMove>> {
        let Some(r) = self.rounds_needed(pos, r)? else {
            return Ok(Vec::new());
        };
        for side in 0..2 {
            for x in 0..self.f[side].len() as u32 {
                if Self::pebbled(pos, side, x) {
                    continue;
                }
                let replies = self.replies(pos, side, x);
                let mut survivors = Vec::new();
                let mut refuted = true;
                for &y in &replies {
                    let (a, b) = Self::pair(side, x, y);
                    let next = Self::extend(pos, a, b);
                    if self.wins(&next, r - 1)? {
                        refuted = false;
                        break;
                    }
                    let lasts = self.rounds_needed(&next, r - 1)?.unwrap_or(r);
                    survivors.push((lasts, y, next));
                }
                if !refuted {
                    continue;
                }
                let spoiler = self.f[side].id(x as usize).to_string();
                let other = self.f[1 - side];
                let structure = side as u8 + 1;
                // the reply that holds out longest, or any element when every
                // reply breaks the partial isomorphism at once
                let best = survivors.into_iter().max_by_key(|(lasts, y, _)| (*lasts, std::cmp::Reverse(*y)));
                return Ok(match best {
                    Some((_, y, next)) => {
                        let mut moves = vec![EfMove { structure, spoiler, duplicator: Some(other.id(y as usize).to_string()) }];
                        moves.extend(self.line(&next, r - 1)?);
                        moves
                    }
                    None => {
                        let duplicator = (!other.is_empty()).then(|| other.id(0).to_string());
                        vec![EfMove { structure, spoiler, duplicator }]
                    }
                });
            }
        }
        Err(Error::defect("Spoiler wins but no winning move was found"))
    }
}

/// Whether Duplicator wins the `k`-round game on `f1`, `f2`.
pub fn ef_equivalent(f1: &Frame, f2: &Frame, k: usize, limits: &Limits) -> Result<bool> {
    Solver::new(f1, f2, limits).wins(&[], k)
}

/// The winner of the `k`-round game and, when Spoiler wins, a winning line.
pub fn ef_game(f1: &Frame, f2: &Frame, k: usize, limits: &Limits) -> Result<EfOutcome> {
    let mut s = Solver::new(f1, f2, limits);
    let duplicator_wins = s.wins(&[], k)?;
    let spoiler_line = if duplicator_wins { Vec::new() } else { s.line(&[], k)? };
    Ok(EfOutcome { rounds: k, duplicator_wins, spoiler_line })
}

/// The least `k ≤ max_rounds` at which Spoiler wins, if any.
pub fn minimal_distinguishing_rounds(f1: &Frame, f2: &Frame, max_rounds: usize, limits: &Limits) -> Result<Option<usize>> {
    Solver::new(f1, f2, limits).rounds_needed(&[], max_rounds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear(n: usize) -> Frame {
        Frame::numbered(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
    }

    #[test]
    fn identical_frames() {
        let lim = Limits::default();
        let f = Frame::numbered(4, [(0, 1), (1, 2), (2, 0), (3, 3)]).unwrap();
        for k in 0..=4 {
            assert!(ef_equivalent(&f, &f, k, &lim).unwrap());
        }
    }

    #[test]
    fn reflexive_point_is_found_in_one_round() {
        let lim = Limits::default();
        let refl = Frame::numbered(2, [(0, 1), (1, 1)]).unwrap();
        let irrefl = Frame::numbered(2, [(0, 1), (1, 0)]).unwrap();
        assert!(ef_equivalent(&refl, &irrefl, 0, &lim).unwrap());
        let out = ef_game(&refl, &irrefl, 1, &lim).unwrap();
        assert!(!out.duplicator_wins);
        assert_eq!(out.spoiler_line.len(), 1);
        assert_eq!(out.spoiler_line[0].structure, 1);
        assert_eq!(out.spoiler_line[0].spoiler, "1");
    }

    #[test]
    fn linear_orders_three_and_four() {
        let lim = Limits::default();
        let k = minimal_distinguishing_rounds(&linear(3), &linear(4), 4, &lim).unwrap();
        assert_eq!(k, Some(3));
        let out = ef_game(&linear(3), &linear(4), 3, &lim).unwrap();
        assert!(!out.duplicator_wins);
        assert!(!out.spoiler_line.is_empty() && out.spoiler_line.len() <= 3);
    }

    #[test]
    fn empty_structures() {
        let lim = Limits::default();
        let e = Frame::empty();
        assert!(ef_equivalent(&e, &e, 3, &lim).unwrap());
        let out = ef_game(&linear(1), &e, 1, &lim).unwrap();
        assert!(!out.duplicator_wins);
        assert_eq!(out.spoiler_line[0].duplicator, None);
    }

    #[test]
    fn memo_cap_is_a_resource_error() {
        let lim = Limits { ef_memo: 2, ..Limits::default() };
        assert!(matches!(ef_equivalent(&linear(5), &linear(5), 3, &lim), Err(Error::Resource(_))));
    }
}
