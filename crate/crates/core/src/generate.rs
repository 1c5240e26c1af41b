//! Seeded random instances for tests, benchmarks and the acceptance suite.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ideal_lab::SmallnessFamily;
use crate::order_term::OrderTerm;
use crate::ordinal::Ordinal;
use crate::tagged_tree::{Node, TaggedTree, Tree};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An ordinal below `ω^(ω+1)`: up to four terms with exponent `ω` or a
/// natural below 6, and coefficients up to 4.
pub fn ordinal(rng: &mut impl Rng) -> Ordinal {
    let n = rng.gen_range(0..=4);
    let terms: Vec<(Ordinal, u64)> = (0..n)
        .map(|_| {
            let e = if rng.gen_bool(0.2) {
                Ordinal::omega()
            } else {
                Ordinal::from(rng.gen_range(0..6u64))
            };
            (e, rng.gen_range(1..=4))
        })
        .collect();
    Ordinal::from_terms(terms).expect("positive coefficients")
}

/// A small ordinal for order terms: below `ω^3`.
fn small_ordinal(rng: &mut impl Rng) -> Ordinal {
    let terms: Vec<(Ordinal, u64)> = (0..rng.gen_range(1..=2))
        .map(|_| (Ordinal::from(rng.gen_range(0..3u64)), rng.gen_range(1..=3)))
        .collect();
    Ordinal::from_terms(terms).expect("positive coefficients")
}

/// A random order term of nesting depth at most `depth`. Shuffles appear
/// only when `dense` is set.
pub fn term(rng: &mut impl Rng, depth: u32, dense: bool) -> OrderTerm {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        return match rng.gen_range(0..if dense { 4 } else { 3 }) {
            0 => OrderTerm::One(rng.gen_bool(0.3).then(|| rng.gen_range(0..3))),
            1 => OrderTerm::finite(rng.gen_range(1..6)),
            2 => OrderTerm::ord(small_ordinal(rng)),
            _ => OrderTerm::Shuffle((0..rng.gen_range(1..=3)).collect()),
        };
    }
    match rng.gen_range(0..3) {
        0 => OrderTerm::Rev(Box::new(term(rng, depth - 1, dense))),
        1 => OrderTerm::Sum((0..rng.gen_range(2..=3)).map(|_| term(rng, depth - 1, dense)).collect()),
        _ => OrderTerm::OmegaSum {
            prefix: (0..rng.gen_range(0..=1)).map(|_| term(rng, depth - 1, dense)).collect(),
            repeat: Box::new(term(rng, depth - 1, dense)),
        },
    }
}

/// `n` scattered terms of depth at most 3.
pub fn scattered_corpus(seed: u64, n: usize) -> Vec<OrderTerm> {
    let mut r = rng(seed);
    (0..n).map(|_| term(&mut r, 3, false)).collect()
}

/// A random tree with at most `max_nodes` nodes and branching at most
/// `max_branching`; successor indices are not always consecutive.
pub fn tree(rng: &mut impl Rng, max_nodes: usize, max_branching: u32) -> Tree {
    let mut nodes: Vec<Node> = vec![vec![]];
    let mut frontier = vec![vec![]];
    while let Some(n) = frontier.pop() {
        let room = max_nodes - nodes.len();
        if room == 0 {
            break;
        }
        let k = rng.gen_range(0..=max_branching.min(room as u32));
        let mut idx: Vec<u32> = (0..max_branching + 1).collect();
        idx.shuffle(rng);
        for &i in &idx[..k as usize] {
            let mut c: Node = n.clone();
            c.push(i);
            nodes.push(c.clone());
            frontier.push(c);
        }
        frontier.shuffle(rng);
    }
    Tree::new(nodes).expect("prefix closed")
}

/// A random subset of the nodes of `t`.
pub fn node_set(rng: &mut impl Rng, t: &Tree, p: f64) -> Vec<Node> {
    t.nodes().iter().filter(|_| rng.gen_bool(p)).cloned().collect()
}

/// The downward closure of up to four random proper subsets of `0..size`.
pub fn family(rng: &mut impl Rng, size: u32) -> SmallnessFamily {
    let domain: Vec<u32> = (0..size).collect();
    let gens: Vec<Vec<u32>> = (0..rng.gen_range(0..=4))
        .map(|_| domain.iter().copied().filter(|_| rng.gen_bool(0.5)).collect::<Vec<u32>>())
        .filter(|g| g.len() < size as usize)
        .collect();
    SmallnessFamily::from_generators(domain, gens).expect("proper generators")
}

/// The complete tree with every internal node tagged by the subsets of size
/// at most one.
pub fn singleton_tagged(branching: u32, depth: usize) -> TaggedTree {
    TaggedTree::uniform(Tree::complete(branching, depth), |succ| {
        SmallnessFamily::bounded_size(succ.to_vec(), 1).ok()
    })
    .expect("tags cover successors")
}

/// A random tree whose internal nodes carry random downward-closed tags on
/// their successor indices.
pub fn tagged_tree(rng: &mut impl Rng, max_nodes: usize, max_branching: u32) -> TaggedTree {
    let t = tree(rng, max_nodes, max_branching);
    TaggedTree::uniform(t, |succ| {
        let gens: Vec<Vec<u32>> = (0..rng.gen_range(0..=3))
            .map(|_| succ.iter().copied().filter(|_| rng.gen_bool(0.5)).collect::<Vec<u32>>())
            .filter(|g| g.len() < succ.len())
            .collect();
        SmallnessFamily::from_generators(succ.to_vec(), gens).ok()
    })
    .expect("tags cover successors")
}
