use ordtree::generate;
use ordtree::tagged_tree::is_prefix;
use ordtree::tree_games::{self, verify, GameRules, GameSpec, Homogenization};
use ordtree::{
    compare_trees, contains_front, dp_rank, front_witness, homogenize, solve_game, BranchColouring, Node, Ordinal,
    RankMode, Relation, TaggedTree, Tree,
};
use proptest::prelude::*;
use rand::Rng;

fn path_meets(t: &Tree, leaf: usize, a: &[Node]) -> bool {
    t.path_to(leaf).into_iter().any(|i| a.contains(t.node(i)))
}

fn is_antichain(a: &[Node]) -> bool {
    a.iter()
        .enumerate()
        .all(|(i, p)| a.iter().enumerate().all(|(j, q)| i == j || !is_prefix(p, q)))
}

/// Ranks by recursion on the level: `η` reaches level `k+1` when it reaches
/// `k` and some splitting node at or below it has a positive set of
/// children reaching `k`.
fn oracle_rank(t: &TaggedTree, mode: RankMode) -> Vec<u64> {
    let tree = t.tree();
    let n = tree.len();
    let mut reach = vec![vec![true; n]];
    loop {
        let prev = reach.last().unwrap().clone();
        let next: Vec<bool> = (0..n)
            .map(|eta| {
                prev[eta]
                    && tree.cone(eta).into_iter().any(|nu| {
                        (mode == RankMode::Reflexive || nu != eta) && t.is_splitting(nu) && {
                            let kids: Vec<usize> =
                                tree.children(nu).iter().copied().filter(|&c| prev[c]).collect();
                            t.is_positive(nu, &kids)
                        }
                    })
            })
            .collect();
        if next == prev || next.iter().all(|x| !x) {
            if next != prev {
                reach.push(next);
            }
            break;
        }
        reach.push(next);
    }
    (0..n)
        .map(|i| reach.iter().rposition(|lvl| lvl[i]).unwrap() as u64)
        .collect()
}

/// A prefix-closed random selection of nodes.
fn random_subtree_ids(rng: &mut impl Rng, t: &Tree) -> Vec<usize> {
    let mut keep = vec![false; t.len()];
    keep[Tree::ROOT] = true;
    for i in 1..t.len() {
        let p = t.parent(i).unwrap();
        keep[i] = keep[p] && rng.gen_bool(0.8);
    }
    (0..t.len()).filter(|&i| keep[i]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn front_duality(seed in any::<u64>()) {
        let mut r = generate::rng(seed);
        let t = generate::tree(&mut r, 30, 3);
        let a = generate::node_set(&mut r, &t, 0.25);
        let expected = t.leaves().into_iter().all(|l| path_meets(&t, l, &a));
        prop_assert_eq!(contains_front(&t, &a).unwrap(), expected);
        match front_witness(&t, &a) {
            Ok(w) => {
                prop_assert!(expected && is_antichain(&a));
                let df: std::collections::BTreeMap<&Node, u64> = w.depth_fn.iter().map(|(n, d)| (n, *d)).collect();
                for (i, n) in t.nodes().iter().enumerate() {
                    let below_front = a.iter().any(|f| is_prefix(f, n));
                    if below_front {
                        prop_assert_eq!(df[n], 0);
                    } else {
                        for &c in t.children(i) {
                            prop_assert!(df[t.node(c)] < df[n]);
                        }
                        prop_assert!(df[n] > 0);
                    }
                }
            }
            Err(_) => prop_assert!(!(expected && is_antichain(&a))),
        }
    }

    #[test]
    fn depth_rank_matches_recursion(seed in any::<u64>()) {
        let mut r = generate::rng(seed);
        let t = generate::tagged_tree(&mut r, 25, 3);
        for mode in [RankMode::Strict, RankMode::Reflexive] {
            let got: Vec<Ordinal> = dp_rank(&t, None, mode).unwrap().into_iter().map(|(_, o)| o).collect();
            let want: Vec<Ordinal> = oracle_rank(&t, mode).into_iter().map(Ordinal::from).collect();
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn subtree_relation_is_reflexive_and_transitive(seed in any::<u64>()) {
        let mut r = generate::rng(seed);
        let t1 = generate::tagged_tree(&mut r, 25, 3);
        prop_assert_eq!(compare_trees(&t1, &t1, None).level, Relation::LEOtimes);
        let t2 = t1.subtree(&random_subtree_ids(&mut r, t1.tree())).unwrap();
        let t3 = t2.subtree(&random_subtree_ids(&mut r, t2.tree())).unwrap();
        let (a, b, c) = (
            compare_trees(&t1, &t2, None).level,
            compare_trees(&t2, &t3, None).level,
            compare_trees(&t1, &t3, None).level,
        );
        prop_assert!(c >= a.min(b), "{:?} {:?} {:?}", a, b, c);
    }

    #[test]
    fn games_are_determined(seed in any::<u64>()) {
        let mut r = generate::rng(seed);
        let t = generate::tagged_tree(&mut r, 20, 3);
        let target: Vec<Node> = t.tree().leaves().into_iter()
            .filter(|_| r.gen_bool(0.5)).map(|l| t.tree().node(l).clone()).collect();
        let out = solve_game(&t, &target).unwrap();
        let spec = GameSpec::reach(GameRules::STANDARD, tree_games::target_mask(&t, &target).unwrap());
        prop_assert_eq!(out.winner, verify::exhaustive_winner(&t, &spec));
        prop_assert!(verify::check_strategy(&t, &spec, &out.strategy).is_ok());
    }

    #[test]
    fn homogenize_answers_are_certified(seed in any::<u64>()) {
        let mut r = generate::rng(seed);
        let t = if r.gen_bool(0.5) { generate::singleton_tagged(3, 3) } else { generate::tagged_tree(&mut r, 30, 3) };
        let k = r.gen_range(1..=3);
        let colouring = BranchColouring::from_fn(t.tree(), k, |_| r.gen_range(0..k));
        match homogenize(&t, &colouring).unwrap() {
            Homogenization::Homogeneous { colour, subtree, .. } => {
                prop_assert!(verify::check_homogeneous(&t, &colouring, colour, &subtree).is_ok());
                prop_assert!(verify::check_subtree(&t, &subtree, Relation::LEStar).is_ok());
            }
            Homogenization::Counterexample { branch, report, strategies } => {
                let checked = verify::check_counterexample(&t, &colouring, &branch, &report, &strategies);
                prop_assert!(checked.is_ok(), "{:?}", checked);
            }
        }
    }
}
