//! Reproducible test data: exhaustive and random frames, models and formulas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fo::FOFormula;
use crate::frame::{Frame, VertexSet};
use crate::modal::{Model, ModalFormula, Valuation};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every labelled digraph on `n` vertices (loops allowed), `2^(n²)` of them.
pub fn all_frames(n: usize) -> impl Iterator<Item = Frame> {
    assert!(n * n < 64, "too many frames to enumerate");
    (0..1u64 << (n * n)).map(move |code| {
        let edges = (0..n * n).filter(|b| code >> b & 1 == 1).map(|b| (b / n, b % n));
        Frame::numbered(n, edges).expect("distinct edges")
    })
}

/// A random digraph on `n` vertices with edge probability `p`.
pub fn random_frame(rng: &mut TestRng, n: usize, p: f64) -> Frame {
    let edges: Vec<_> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|_| rng.random_bool(p))
        .collect();
    Frame::numbered(n, edges).expect("distinct edges")
}

/// A random digraph with `1..=max_n` vertices and a random edge density.
pub fn random_small_frame(rng: &mut TestRng, max_n: usize) -> Frame {
    let n = rng.random_range(1..=max_n);
    let p = rng.random_range(0.1..0.6);
    random_frame(rng, n, p)
}

/// A random digraph in which every vertex has `deg⁺ + deg⁻ ≤ max_deg`
/// (a loop counts twice).
pub fn random_bounded_frame(rng: &mut TestRng, n: usize, max_deg: usize) -> Frame {
    let mut deg = vec![0usize; n];
    let mut edges = Vec::new();
    let attempts = n * max_deg;
    for _ in 0..attempts {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if edges.contains(&(a, b)) || deg[a] + 1 > max_deg || deg[b] + 1 > max_deg || (a == b && deg[a] + 2 > max_deg) {
            continue;
        }
        deg[a] += 1;
        deg[b] += 1;
        edges.push((a, b));
    }
    Frame::numbered(n, edges).expect("distinct edges")
}

pub fn random_valuation(rng: &mut TestRng, frame: &Frame, letters: u32) -> Valuation {
    (0..letters)
        .map(|p| {
            let set = VertexSet::from_iter_in(frame.len(), frame.vertices().filter(|_| rng.random_bool(0.5)));
            (p, set)
        })
        .collect()
}

pub fn random_model(rng: &mut TestRng, max_n: usize, letters: u32) -> Model {
    let frame = random_small_frame(rng, max_n);
    let valuation = random_valuation(rng, &frame, letters);
    Model::new(frame, valuation).expect("valuation over the frame")
}

/// A random modal formula of depth at most `depth` over `p0..p<letters-1>`.
pub fn random_modal(rng: &mut TestRng, depth: usize, letters: u32) -> ModalFormula {
    random_modal_sized(rng, depth, letters, 4)
}

fn random_modal_sized(rng: &mut TestRng, depth: usize, letters: u32, fuel: usize) -> ModalFormula {
    let leaf = |rng: &mut TestRng| match rng.random_range(0..letters + 2) {
        0 => ModalFormula::Top,
        1 => ModalFormula::Bot,
        k => ModalFormula::atom(k - 2),
    };
    if fuel == 0 {
        return leaf(rng);
    }
    match rng.random_range(0..9) {
        0 | 1 => leaf(rng),
        2 => random_modal_sized(rng, depth, letters, fuel - 1).not(),
        3 => random_modal_sized(rng, depth, letters, fuel - 1).and(random_modal_sized(rng, depth, letters, fuel - 1)),
        4 => random_modal_sized(rng, depth, letters, fuel - 1).or(random_modal_sized(rng, depth, letters, fuel - 1)),
        5 => random_modal_sized(rng, depth, letters, fuel - 1).imp(random_modal_sized(rng, depth, letters, fuel - 1)),
        6 | 7 if depth > 0 => random_modal_sized(rng, depth - 1, letters, fuel).dia(),
        8 if depth > 0 => random_modal_sized(rng, depth - 1, letters, fuel).boxed(),
        _ => leaf(rng),
    }
}

/// A random first-order sentence of quantifier rank at most `rank`.
pub fn random_sentence(rng: &mut TestRng, rank: usize) -> FOFormula {
    let rank = rank.max(1);
    random_fo(rng, &mut Vec::new(), rank, 4)
}

/// A random formula whose free variables are among `bound`.
pub fn random_fo(rng: &mut TestRng, bound: &mut Vec<String>, rank: usize, fuel: usize) -> FOFormula {
    let quantify = |rng: &mut TestRng, bound: &mut Vec<String>, fuel: usize| {
        let x = format!("x{}", bound.len() + 1);
        bound.push(x.clone());
        let body = random_fo(rng, bound, rank - 1, fuel);
        bound.pop();
        if rng.random_bool(0.5) {
            FOFormula::exists(x, body)
        } else {
            FOFormula::forall(x, body)
        }
    };
    if bound.is_empty() {
        return quantify(rng, bound, fuel);
    }
    let atom = |rng: &mut TestRng, bound: &[String]| {
        let a = bound[rng.random_range(0..bound.len())].clone();
        let b = bound[rng.random_range(0..bound.len())].clone();
        if rng.random_bool(0.75) {
            FOFormula::rel(a, b)
        } else {
            FOFormula::eq(a, b)
        }
    };
    if fuel == 0 {
        return atom(rng, bound);
    }
    match rng.random_range(0..8) {
        0 | 1 => atom(rng, bound),
        2 => random_fo(rng, bound, rank, fuel - 1).not(),
        3 => random_fo(rng, bound, rank, fuel - 1).and(random_fo(rng, bound, rank, fuel - 1)),
        4 => random_fo(rng, bound, rank, fuel - 1).or(random_fo(rng, bound, rank, fuel - 1)),
        5 => random_fo(rng, bound, rank, fuel - 1).imp(random_fo(rng, bound, rank, fuel - 1)),
        _ if rank > 0 => quantify(rng, bound, fuel - 1),
        _ => atom(rng, bound),
    }
}
