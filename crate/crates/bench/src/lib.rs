//! Fixtures shared by the benchmarks.

use ordtree::{generate, BranchColouring, OrderTerm, TaggedTree};
use rand::Rng;

/// A fixed corpus of scattered terms.
pub fn terms(n: usize) -> Vec<OrderTerm> {
    generate::scattered_corpus(7, n)
}

/// A complete singleton-tagged tree with a seeded two-colouring of its branches.
pub fn coloured_tree(branching: u32, depth: usize, seed: u64) -> (TaggedTree, BranchColouring) {
    let t = generate::singleton_tagged(branching, depth);
    let mut r = generate::rng(seed);
    let c = BranchColouring::from_fn(t.tree(), 2, |_| r.gen_range(0..2));
    (t, c)
}
