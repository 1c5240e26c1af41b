//! Finite tree games and the homogenization theorems built on them.
//!
//! A play walks from the root to a maximal node. At a splitting node
//! PlayerII first names a small set of successors and PlayerI moves to a
//! successor outside it. At other internal nodes the [`GameRules`] say who
//! picks the successor. PlayerI wins when every visited node is *safe* and
//! the final node is *accepted*.
//!
//! Games are solved by backward induction. At a splitting node PlayerI wins
//! iff the set `W` of winning successors is tag-positive, and a losing
//! PlayerII simply names `W`. Ties are broken towards the least index.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ideal_lab::Count;
use crate::tagged_tree::{compare_trees, Node, Relation, TaggedTree, Tree, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum GameError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("target node {node:?} is not a maximal node")]
    InvalidTarget { node: Node },
    #[error("invalid colouring: {reason}")]
    InvalidColouring { reason: String },
    #[error("node {node:?} has no label")]
    MissingLabel { node: Node },
    #[error("invalid cover: {reason}")]
    InvalidCover { reason: String },
    #[error("no bound up to {cap} is achievable")]
    NoBoundAchievable { cap: u64, diagnostic: Tree },
    #[error("no index of the cover wins")]
    NoIndexWins { failures: Vec<IndexFailure> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    PlayerI,
    PlayerII,
}

/// Who picks the successor at a non-splitting internal node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chooser {
    PlayerI,
    PlayerII,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameRules {
    pub non_splitting: Chooser,
    /// Nodes with fewer successors than this are kept whole: PlayerII picks
    /// the successor there, splitting or not.
    pub keep_whole_below: Option<usize>,
}

impl GameRules {
    pub const STANDARD: GameRules = GameRules {
        non_splitting: Chooser::PlayerI,
        keep_whole_below: None,
    };
}

impl Default for GameRules {
    fn default() -> Self {
        GameRules::STANDARD
    }
}

/// Rules plus the per-node winning condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSpec {
    pub rules: GameRules,
    pub safe: Vec<bool>,
    pub accept: Vec<bool>,
}

impl GameSpec {
    /// PlayerI must reach one of the accepted maximal nodes.
    pub fn reach(rules: GameRules, accept: Vec<bool>) -> GameSpec {
        GameSpec {
            rules,
            safe: vec![true; accept.len()],
            accept,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Turn {
    Leaf,
    Splitting,
    Free,
    Adversarial,
}

pub fn turn_at(t: &TaggedTree, rules: &GameRules, id: usize) -> Turn {
    let kids = t.tree().children(id).len();
    if kids == 0 {
        Turn::Leaf
    } else if rules.keep_whole_below.is_some_and(|mu| kids < mu) {
        Turn::Adversarial
    } else if t.is_splitting(id) {
        Turn::Splitting
    } else if rules.non_splitting == Chooser::PlayerI {
        Turn::Free
    } else {
        Turn::Adversarial
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Action {
    /// PlayerI at a splitting node: take the first listed successor index
    /// that PlayerII did not name.
    Respond { prefer: Vec<u32> },
    /// PlayerI at a node where PlayerI picks.
    Choose(u32),
    /// PlayerII at a splitting node: the small set of successor indices.
    Block(Vec<u32>),
    /// PlayerII at a node where PlayerII picks.
    Pick(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strategy {
    pub owner: Player,
    /// Sorted by node.
    pub moves: Vec<(Node, Action)>,
}

impl Strategy {
    pub fn action_at(&self, node: &[u32]) -> Option<&Action> {
        self.moves
            .binary_search_by(|(n, _)| n.as_slice().cmp(node))
            .ok()
            .map(|i| &self.moves[i].1)
    }
}

/// A game on a tagged tree, ready to solve.
pub struct Game<'a> {
    t: &'a TaggedTree,
    turn: Vec<Turn>,
    safe: &'a [bool],
    accept: &'a [bool],
}

impl<'a> Game<'a> {
    pub fn new(t: &'a TaggedTree, spec: &'a GameSpec) -> Game<'a> {
        let turn = (0..t.tree().len())
            .map(|i| turn_at(t, &spec.rules, i))
            .collect();
        Game {
            t,
            turn,
            safe: &spec.safe,
            accept: &spec.accept,
        }
    }

    /// `win[v]`: PlayerI wins the game started at `v`.
    pub fn solve(&self) -> Vec<bool> {
        let tree = self.t.tree();
        let mut win = vec![false; tree.len()];
        for v in (0..tree.len()).rev() {
            if !self.safe[v] {
                continue;
            }
            let kids = tree.children(v);
            win[v] = match self.turn[v] {
                Turn::Leaf => self.accept[v],
                Turn::Adversarial => kids.iter().all(|&c| win[c]),
                Turn::Free => kids.iter().any(|&c| win[c]),
                Turn::Splitting => {
                    let w: Vec<usize> = kids.iter().copied().filter(|&c| win[c]).collect();
                    self.t.is_positive(v, &w)
                }
            };
        }
        win
    }

    fn index(&self, c: usize) -> u32 {
        *self.t.tree().node(c).last().expect("child")
    }

    /// Nodes of the plays consistent with PlayerI's canonical strategy.
    pub fn play_tree(&self, win: &[bool]) -> Vec<usize> {
        let tree = self.t.tree();
        let mut out = Vec::new();
        if !win[Tree::ROOT] {
            return out;
        }
        let mut stack = vec![Tree::ROOT];
        while let Some(v) = stack.pop() {
            out.push(v);
            let kids = tree.children(v);
            match self.turn[v] {
                Turn::Leaf => {}
                Turn::Adversarial => stack.extend_from_slice(kids),
                Turn::Free => stack.push(*kids.iter().find(|&&c| win[c]).expect("winning")),
                Turn::Splitting => stack.extend(self.responses(v, win)),
            }
        }
        out.sort_unstable();
        out
    }

    /// Successors PlayerI reaches at a winning splitting node over all
    /// PlayerII sets: a winning child is reached iff the earlier winning
    /// children form a small set.
    fn responses(&self, v: usize, win: &[bool]) -> Vec<usize> {
        let tag = self.t.tag(v).expect("splitting");
        let mut prefix = 0u64;
        let mut out = Vec::new();
        for &c in self.t.tree().children(v) {
            if !win[c] {
                continue;
            }
            if !tag.contains_mask(prefix) {
                break;
            }
            out.push(c);
            let bit = tag.position(self.index(c)).expect("tag covers successors");
            prefix |= 1 << bit;
        }
        out
    }

    pub fn player_i_strategy(&self, win: &[bool]) -> Strategy {
        let tree = self.t.tree();
        let mut moves = Vec::new();
        for v in self.play_tree(win) {
            let kids = tree.children(v);
            match self.turn[v] {
                Turn::Splitting => {
                    let prefer = kids
                        .iter()
                        .filter(|&&c| win[c])
                        .map(|&c| self.index(c))
                        .collect();
                    moves.push((tree.node(v).clone(), Action::Respond { prefer }));
                }
                Turn::Free => {
                    let c = *kids.iter().find(|&&c| win[c]).expect("winning");
                    moves.push((tree.node(v).clone(), Action::Choose(self.index(c))));
                }
                Turn::Leaf | Turn::Adversarial => {}
            }
        }
        moves.sort_by(|a, b| a.0.cmp(&b.0));
        Strategy {
            owner: Player::PlayerI,
            moves,
        }
    }

    /// Defined on the positions reachable while PlayerII follows it and the
    /// outcome is still open.
    pub fn player_ii_strategy(&self, win: &[bool]) -> Strategy {
        let tree = self.t.tree();
        let mut moves = Vec::new();
        let mut stack = Vec::new();
        if !win[Tree::ROOT] {
            stack.push(Tree::ROOT);
        }
        while let Some(v) = stack.pop() {
            if !self.safe[v] {
                continue;
            }
            let kids = tree.children(v);
            match self.turn[v] {
                Turn::Leaf => {}
                Turn::Free => stack.extend_from_slice(kids),
                Turn::Adversarial => {
                    let c = *kids.iter().find(|&&c| !win[c]).expect("losing");
                    moves.push((tree.node(v).clone(), Action::Pick(self.index(c))));
                    stack.push(c);
                }
                Turn::Splitting => {
                    let block = kids
                        .iter()
                        .filter(|&&c| win[c])
                        .map(|&c| self.index(c))
                        .collect();
                    moves.push((tree.node(v).clone(), Action::Block(block)));
                    stack.extend(kids.iter().filter(|&&c| !win[c]));
                }
            }
        }
        moves.sort_by(|a, b| a.0.cmp(&b.0));
        Strategy {
            owner: Player::PlayerII,
            moves,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameOutcome {
    pub winner: Player,
    pub strategy: Strategy,
}

fn solve_spec(t: &TaggedTree, spec: &GameSpec) -> (Vec<bool>, GameOutcome) {
    let game = Game::new(t, spec);
    let win = game.solve();
    let outcome = if win[Tree::ROOT] {
        GameOutcome {
            winner: Player::PlayerI,
            strategy: game.player_i_strategy(&win),
        }
    } else {
        GameOutcome {
            winner: Player::PlayerII,
            strategy: game.player_ii_strategy(&win),
        }
    };
    (win, outcome)
}

/// Mask of accepted leaves for a target set of maximal nodes.
pub fn target_mask(t: &TaggedTree, target: &[Node]) -> Result<Vec<bool>, GameError> {
    let tree = t.tree();
    let mut accept = vec![false; tree.len()];
    for n in target {
        let id = tree.require(n)?;
        if !tree.is_leaf(id) {
            return Err(GameError::InvalidTarget { node: n.clone() });
        }
        accept[id] = true;
    }
    Ok(accept)
}

/// Solves the standard game with the given target set.
pub fn solve_game(t: &TaggedTree, target: &[Node]) -> Result<GameOutcome, GameError> {
    let spec = GameSpec::reach(GameRules::STANDARD, target_mask(t, target)?);
    Ok(solve_spec(t, &spec).1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafColour {
    pub node: Node,
    pub colour: u32,
}

/// Colours of the maximal nodes, standing for colours of branches.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchColouring {
    pub leaves: Vec<LeafColour>,
    pub colour_count: u32,
}

impl BranchColouring {
    pub fn from_fn(tree: &Tree, colour_count: u32, mut f: impl FnMut(&Node) -> u32) -> Self {
        let leaves = tree
            .leaves()
            .into_iter()
            .map(|l| LeafColour {
                node: tree.node(l).clone(),
                colour: f(tree.node(l)),
            })
            .collect();
        BranchColouring {
            leaves,
            colour_count,
        }
    }

    /// Colour per node id (leaves only).
    pub fn resolve(&self, tree: &Tree) -> Result<Vec<Option<u32>>, GameError> {
        let bad = |reason: String| GameError::InvalidColouring { reason };
        if self.colour_count == 0 {
            return Err(bad("colour_count must be positive".into()));
        }
        let mut out = vec![None; tree.len()];
        for lc in &self.leaves {
            let id = tree.require(&lc.node)?;
            if !tree.is_leaf(id) {
                return Err(bad(format!("{:?} is not a maximal node", lc.node)));
            }
            if lc.colour >= self.colour_count {
                return Err(bad(format!("colour {} of {:?} is out of range", lc.colour, lc.node)));
            }
            if out[id].replace(lc.colour).is_some() {
                return Err(bad(format!("{:?} is coloured twice", lc.node)));
            }
        }
        if let Some(l) = tree.leaves().into_iter().find(|&l| out[l].is_none()) {
            return Err(bad(format!("{:?} has no colour", tree.node(l))));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColourBlock {
    pub colour: u32,
    pub block: Vec<u32>,
}

/// Where the diagonal play against all PlayerII strategies got stuck.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureReport {
    pub node: Node,
    pub successors: Vec<u32>,
    pub blocks: Vec<ColourBlock>,
    pub union: Vec<u32>,
    /// Least number of tag members covering the successor set.
    pub covering_number: Count,
    pub colour_count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Homogenization {
    Homogeneous {
        colour: u32,
        subtree: Tree,
        strategy: Strategy,
    },
    Counterexample {
        /// The diagonal play, root first, ending at the stuck node.
        branch: Vec<Node>,
        report: FailureReport,
        /// PlayerII's winning strategy for each colour.
        strategies: Vec<Strategy>,
    },
}

/// Finds a colour with a tag-positive monochromatic subtree, or builds the
/// diagonal counterexample from the PlayerII strategies of all colours.
pub fn homogenize(t: &TaggedTree, colouring: &BranchColouring) -> Result<Homogenization, GameError> {
    let colours = colouring.resolve(t.tree())?;
    homogenize_resolved(t, &colours, colouring.colour_count, GameRules::STANDARD)
}

fn colour_spec(colours: &[Option<u32>], colour: u32, rules: GameRules) -> GameSpec {
    GameSpec::reach(rules, colours.iter().map(|c| *c == Some(colour)).collect())
}

fn homogenize_resolved(
    t: &TaggedTree,
    colours: &[Option<u32>],
    colour_count: u32,
    rules: GameRules,
) -> Result<Homogenization, GameError> {
    let tree = t.tree();
    let mut strategies = Vec::with_capacity(colour_count as usize);
    for colour in 0..colour_count {
        let spec = colour_spec(colours, colour, rules);
        let game = Game::new(t, &spec);
        let win = game.solve();
        if win[Tree::ROOT] {
            let subtree = tree.subtree(&game.play_tree(&win))?;
            return Ok(Homogenization::Homogeneous {
                colour,
                subtree,
                strategy: game.player_i_strategy(&win),
            });
        }
        strategies.push(game.player_ii_strategy(&win));
    }
    let mut branch = Vec::new();
    let mut v = Tree::ROOT;
    loop {
        let node = tree.node(v).clone();
        branch.push(node.clone());
        let kids = tree.children(v);
        let blocks: Vec<ColourBlock> = strategies
            .iter()
            .enumerate()
            .map(|(colour, s)| ColourBlock {
                colour: colour as u32,
                block: match s.action_at(&node) {
                    Some(Action::Block(b)) => b.clone(),
                    _ => Vec::new(),
                },
            })
            .collect();
        let mut union: Vec<u32> = blocks.iter().flat_map(|b| b.block.iter().copied()).collect();
        union.sort_unstable();
        union.dedup();
        let next = match turn_at(t, &rules, v) {
            Turn::Splitting => kids
                .iter()
                .copied()
                .find(|&c| union.binary_search(tree.node(c).last().expect("child")).is_err()),
            Turn::Free => kids.first().copied(),
            Turn::Adversarial => strategies.iter().find_map(|s| match s.action_at(&node) {
                Some(Action::Pick(i)) => {
                    let mut c = node.clone();
                    c.push(*i);
                    tree.id(&c)
                }
                _ => None,
            }),
            Turn::Leaf => None,
        };
        match next {
            Some(c) => v = c,
            None => {
                let successors = tree.succ_indices(v);
                let covering_number = match t.tag(v) {
                    Some(tag) => tag.covering_number_of(
                        tag.mask_of(&successors).expect("tag covers successors"),
                    ),
                    None => Count::Infinite,
                };
                return Ok(Homogenization::Counterexample {
                    branch,
                    report: FailureReport {
                        node,
                        successors,
                        blocks,
                        union,
                        covering_number,
                        colour_count,
                    },
                    strategies,
                });
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeValue {
    pub node: Node,
    pub value: u64,
}

/// A total map from nodes to values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeValues {
    pub values: Vec<NodeValue>,
}

impl NodeValues {
    pub fn from_fn(tree: &Tree, mut f: impl FnMut(&Node) -> u64) -> Self {
        NodeValues {
            values: tree
                .nodes()
                .iter()
                .map(|n| NodeValue {
                    node: n.clone(),
                    value: f(n),
                })
                .collect(),
        }
    }

    pub fn resolve(&self, tree: &Tree) -> Result<Vec<u64>, GameError> {
        let mut out = vec![None; tree.len()];
        for nv in &self.values {
            out[tree.require(&nv.node)?] = Some(nv.value);
        }
        out.into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| GameError::MissingLabel {
                    node: tree.node(i).clone(),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum LevelHomogenization {
    Homogeneous {
        subtree: Tree,
        /// The common label at each depth.
        levels: Vec<u64>,
    },
    Counterexample {
        branch: Vec<Node>,
        report: FailureReport,
        /// Label sequence standing for each colour of the reduction.
        sequences: Vec<Vec<u64>>,
    },
}

/// Homogenizes the colouring of each branch by its label sequence, giving a
/// subtree whose labels depend only on depth.
pub fn level_homogenize(t: &TaggedTree, g: &NodeValues) -> Result<LevelHomogenization, GameError> {
    let tree = t.tree();
    let labels = g.resolve(tree)?;
    let seq_of = |id: usize| -> Vec<u64> { tree.path_to(id).into_iter().map(|i| labels[i]).collect() };
    let mut index: BTreeMap<Vec<u64>, u32> = BTreeMap::new();
    for l in tree.leaves() {
        index.entry(seq_of(l)).or_insert(0);
    }
    for (i, v) in index.values_mut().enumerate() {
        *v = i as u32;
    }
    let mut colours = vec![None; tree.len()];
    for l in tree.leaves() {
        colours[l] = Some(index[&seq_of(l)]);
    }
    let sequences: Vec<Vec<u64>> = index.keys().cloned().collect();
    match homogenize_resolved(t, &colours, sequences.len() as u32, GameRules::STANDARD)? {
        Homogenization::Homogeneous { colour, subtree, .. } => Ok(LevelHomogenization::Homogeneous {
            subtree,
            levels: sequences[colour as usize].clone(),
        }),
        Homogenization::Counterexample { branch, report, .. } => {
            Ok(LevelHomogenization::Counterexample {
                branch,
                report,
                sequences,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundResult {
    /// Least bound such that some subtree keeps every node below it.
    pub alpha: u64,
    pub subtree: Tree,
}

/// Rules of the bounded game: nodes with fewer than `mu` successors are
/// kept whole.
pub fn bound_rules(mu: usize) -> GameRules {
    GameRules {
        non_splitting: Chooser::PlayerI,
        keep_whole_below: Some(mu),
    }
}

/// The least `α` for which a subtree `T† ≥* T` exists with `H < α` on all of
/// its nodes and full successor sets at nodes of branching below `mu`.
pub fn bound_homogenize(
    t: &TaggedTree,
    h: &NodeValues,
    mu: usize,
    cap: Option<u64>,
) -> Result<BoundResult, GameError> {
    let tree = t.tree();
    let values = h.resolve(tree)?;
    let top = values.iter().copied().max().unwrap_or(0) + 1;
    let limit = cap.map_or(top, |c| c.min(top));
    let rules = bound_rules(mu);
    let mut last_spec = None;
    for alpha in 1..=limit {
        let spec = GameSpec {
            rules,
            safe: values.iter().map(|&x| x < alpha).collect(),
            accept: vec![true; tree.len()],
        };
        let game = Game::new(t, &spec);
        let win = game.solve();
        if win[Tree::ROOT] {
            return Ok(BoundResult {
                alpha,
                subtree: tree.subtree(&game.play_tree(&win))?,
            });
        }
        last_spec = Some(spec);
    }
    let spec = last_spec.unwrap_or_else(|| GameSpec {
        rules,
        safe: vec![false; tree.len()],
        accept: vec![true; tree.len()],
    });
    let game = Game::new(t, &spec);
    let win = game.solve();
    Err(GameError::NoBoundAchievable {
        cap: limit,
        diagnostic: tree.subtree(&ii_region(&game, &spec, &win))?,
    })
}

/// Nodes reachable while PlayerII follows its canonical strategy.
fn ii_region(game: &Game, spec: &GameSpec, win: &[bool]) -> Vec<usize> {
    let tree = game.t.tree();
    let mut out = Vec::new();
    let mut stack = vec![Tree::ROOT];
    while let Some(v) = stack.pop() {
        out.push(v);
        if !spec.safe[v] {
            continue;
        }
        let kids = tree.children(v);
        match game.turn[v] {
            Turn::Leaf => {}
            Turn::Adversarial => {
                if let Some(&c) = kids.iter().find(|&&c| !win[c]) {
                    stack.push(c);
                }
            }
            Turn::Free | Turn::Splitting => stack.extend(kids.iter().filter(|&&c| !win[c])),
        }
    }
    out.sort_unstable();
    out
}

/// `cover[i][ε]` lists maximal nodes; increasing in `ε`.
pub type Cover = Vec<Vec<Vec<Node>>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexFailure {
    pub i: usize,
    pub epsilon: usize,
    /// PlayerII's move at the root.
    pub root_move: Option<Action>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverResult {
    pub i: usize,
    pub epsilon: usize,
    pub subtree: Tree,
}

/// Rules of the cover game: PlayerII picks at non-splitting nodes, so the
/// extracted subtree keeps them whole.
pub const COVER_RULES: GameRules = GameRules {
    non_splitting: Chooser::PlayerII,
    keep_whole_below: None,
};

/// The first `(i, ε)` in lexicographic order for which PlayerI can force
/// the play into `cover[i][ε]`, with the extracted subtree.
pub fn cover_homogenize(t: &TaggedTree, cover: &Cover) -> Result<CoverResult, GameError> {
    let tree = t.tree();
    let bad = |reason: String| GameError::InvalidCover { reason };
    let mut masks: Vec<Vec<Vec<bool>>> = Vec::with_capacity(cover.len());
    let mut union = vec![false; tree.len()];
    for (i, chain) in cover.iter().enumerate() {
        let mut row = Vec::with_capacity(chain.len());
        for (e, set) in chain.iter().enumerate() {
            let m = target_mask(t, set)?;
            if let Some(prev) = row.last() {
                let prev: &Vec<bool> = prev;
                if let Some(x) = (0..tree.len()).find(|&x| prev[x] && !m[x]) {
                    return Err(bad(format!(
                        "cover[{i}][{}] contains {:?} but cover[{i}][{e}] does not",
                        e - 1,
                        tree.node(x)
                    )));
                }
            }
            for x in 0..tree.len() {
                union[x] |= m[x];
            }
            row.push(m);
        }
        masks.push(row);
    }
    if let Some(l) = tree.leaves().into_iter().find(|&l| !union[l]) {
        return Err(bad(format!("{:?} is in no set", tree.node(l))));
    }
    let mut failures = Vec::new();
    for (i, row) in masks.into_iter().enumerate() {
        for (epsilon, accept) in row.into_iter().enumerate() {
            let spec = GameSpec::reach(COVER_RULES, accept);
            let game = Game::new(t, &spec);
            let win = game.solve();
            if win[Tree::ROOT] {
                return Ok(CoverResult {
                    i,
                    epsilon,
                    subtree: tree.subtree(&game.play_tree(&win))?,
                });
            }
            let s = game.player_ii_strategy(&win);
            failures.push(IndexFailure {
                i,
                epsilon,
                root_move: s.action_at(&[]).cloned(),
            });
        }
    }
    Err(GameError::NoIndexWins { failures })
}

/// Independent checkers used by tests and by `--verify`.
pub mod verify {
    use super::*;

    fn succ_members(t: &TaggedTree, v: usize) -> Vec<Vec<u32>> {
        let succ = t.tree().succ_indices(v);
        let tag = t.tag(v).expect("splitting");
        let smask = tag.mask_of(&succ).expect("tag covers successors");
        let mut seen: Vec<u64> = tag.member_masks().into_iter().map(|m| m & smask).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.into_iter().map(|m| tag.atoms_of(m)).collect()
    }

    fn child(t: &TaggedTree, v: usize, index: u32) -> Option<usize> {
        let mut n = t.tree().node(v).clone();
        n.push(index);
        t.tree().id(&n)
    }

    /// Minimax over explicit move lists; PlayerII ranges over every member
    /// of the tag.
    pub fn exhaustive_winner(t: &TaggedTree, spec: &GameSpec) -> Player {
        fn wins(t: &TaggedTree, spec: &GameSpec, v: usize) -> bool {
            if !spec.safe[v] {
                return false;
            }
            let tree = t.tree();
            let kids = tree.children(v);
            match turn_at(t, &spec.rules, v) {
                Turn::Leaf => spec.accept[v],
                Turn::Free => kids.iter().any(|&c| wins(t, spec, c)),
                Turn::Adversarial => kids.iter().all(|&c| wins(t, spec, c)),
                Turn::Splitting => succ_members(t, v).iter().all(|a| {
                    kids.iter().any(|&c| {
                        !a.contains(tree.node(c).last().expect("child")) && wins(t, spec, c)
                    })
                }),
            }
        }
        if wins(t, spec, Tree::ROOT) {
            Player::PlayerI
        } else {
            Player::PlayerII
        }
    }

    /// Plays `strategy` against every sequence of opponent moves and checks
    /// that each complete play goes the owner's way. Returns the number of
    /// plays, or a description of a failing play.
    pub fn check_strategy(t: &TaggedTree, spec: &GameSpec, strategy: &Strategy) -> Result<u64, String> {
        let mut plays = 0u64;
        let mut path = Vec::new();
        walk(t, spec, strategy, Tree::ROOT, true, &mut path, &mut plays)?;
        Ok(plays)
    }

    fn walk(
        t: &TaggedTree,
        spec: &GameSpec,
        s: &Strategy,
        v: usize,
        safe_so_far: bool,
        path: &mut Vec<Node>,
        plays: &mut u64,
    ) -> Result<(), String> {
        let tree = t.tree();
        let node = tree.node(v).clone();
        path.push(node.clone());
        let safe = safe_so_far && spec.safe[v];
        let fail = |what: &str, path: &[Node]| Err(format!("{what} along {path:?}"));
        if s.owner == Player::PlayerII && !safe {
            *plays += 1;
            path.pop();
            return Ok(());
        }
        let kids = tree.children(v);
        let result = match (turn_at(t, &spec.rules, v), s.owner) {
            (Turn::Leaf, owner) => {
                *plays += 1;
                let i_wins = safe && spec.accept[v];
                if i_wins != (owner == Player::PlayerI) {
                    fail("play ends against the owner", path)
                } else {
                    Ok(())
                }
            }
            (Turn::Splitting, Player::PlayerI) => {
                let Some(Action::Respond { prefer }) = s.action_at(&node) else {
                    return fail("no response at a splitting node", path);
                };
                for a in succ_members(t, v) {
                    let Some(&i) = prefer.iter().find(|i| !a.contains(i)) else {
                        return fail(&format!("no answer to {a:?}"), path);
                    };
                    let Some(c) = child(t, v, i) else {
                        return fail("response is not a successor", path);
                    };
                    walk(t, spec, s, c, safe, path, plays)?;
                }
                Ok(())
            }
            (Turn::Splitting, Player::PlayerII) => {
                let Some(Action::Block(block)) = s.action_at(&node) else {
                    return fail("no block at a splitting node", path);
                };
                let tag = t.tag(v).expect("splitting");
                if !tag.contains(block) {
                    return fail(&format!("block {block:?} is not small"), path);
                }
                for &c in kids {
                    if !block.contains(tree.node(c).last().expect("child")) {
                        walk(t, spec, s, c, safe, path, plays)?;
                    }
                }
                Ok(())
            }
            (Turn::Free, Player::PlayerI) => match s.action_at(&node) {
                Some(Action::Choose(i)) => match child(t, v, *i) {
                    Some(c) => walk(t, spec, s, c, safe, path, plays),
                    None => fail("choice is not a successor", path),
                },
                _ => fail("no choice at a free node", path),
            },
            (Turn::Adversarial, Player::PlayerII) => match s.action_at(&node) {
                Some(Action::Pick(i)) => match child(t, v, *i) {
                    Some(c) => walk(t, spec, s, c, safe, path, plays),
                    None => fail("pick is not a successor", path),
                },
                _ => fail("no pick at an adversarial node", path),
            },
            (Turn::Free, Player::PlayerII) | (Turn::Adversarial, Player::PlayerI) => {
                for &c in kids {
                    walk(t, spec, s, c, safe, path, plays)?;
                }
                Ok(())
            }
        };
        path.pop();
        result
    }

    /// Checks that `subtree` is a tag-positive subtree (`≥ LEStar`) whose
    /// maximal nodes all carry `colour`.
    pub fn check_homogeneous(
        t: &TaggedTree,
        colouring: &BranchColouring,
        colour: u32,
        subtree: &Tree,
    ) -> Result<(), String> {
        let colours = colouring.resolve(t.tree()).map_err(|e| e.to_string())?;
        check_subtree(t, subtree, Relation::LEStar)?;
        for l in subtree.leaves() {
            let id = t.tree().id(subtree.node(l)).expect("checked");
            if colours[id] != Some(colour) {
                return Err(format!("{:?} has colour {:?}", subtree.node(l), colours[id]));
            }
        }
        Ok(())
    }

    /// Checks nodes, tag positivity at every kept splitting node, and the
    /// requested relation.
    pub fn check_subtree(t: &TaggedTree, subtree: &Tree, at_least: Relation) -> Result<(), String> {
        let ids: Vec<usize> = subtree
            .nodes()
            .iter()
            .map(|n| t.tree().id(n).ok_or_else(|| format!("{n:?} is not in the tree")))
            .collect::<Result<_, _>>()?;
        for (j, &i) in ids.iter().enumerate() {
            if t.is_splitting(i) {
                let kept: Vec<usize> = subtree
                    .children(j)
                    .iter()
                    .map(|&c| ids[c])
                    .collect();
                if !t.is_positive(i, &kept) {
                    return Err(format!("successors kept at {:?} are small", t.tree().node(i)));
                }
            }
        }
        let tagged = t.subtree(&ids).map_err(|e| e.to_string())?;
        let rel = compare_trees(t, &tagged, None).level;
        if rel < at_least {
            return Err(format!("relation {rel:?} is below {at_least:?}"));
        }
        Ok(())
    }

    /// Replays every PlayerII strategy of a counterexample: each must win its
    /// colour game, the diagonal play must be legal against each of them, and
    /// the blocks at the stuck node must cover its successors.
    pub fn check_counterexample(
        t: &TaggedTree,
        colouring: &BranchColouring,
        branch: &[Node],
        report: &FailureReport,
        strategies: &[Strategy],
    ) -> Result<(), String> {
        let colours = colouring.resolve(t.tree()).map_err(|e| e.to_string())?;
        if strategies.len() != colouring.colour_count as usize {
            return Err("one strategy per colour is required".into());
        }
        for (colour, s) in strategies.iter().enumerate() {
            if s.owner != Player::PlayerII {
                return Err(format!("strategy for colour {colour} is not PlayerII's"));
            }
            let spec = colour_spec(&colours, colour as u32, GameRules::STANDARD);
            check_strategy(t, &spec, s).map_err(|e| format!("colour {colour}: {e}"))?;
            for w in branch.windows(2) {
                let (from, to) = (&w[0], &w[1]);
                if to.len() != from.len() + 1 || !to.starts_with(from) {
                    return Err(format!("{to:?} does not follow {from:?}"));
                }
                if let Some(Action::Block(b)) = s.action_at(from) {
                    if b.contains(to.last().expect("child")) {
                        return Err(format!("colour {colour} blocks {to:?}"));
                    }
                }
            }
        }
        let last = branch.last().ok_or("empty branch")?;
        if *last != report.node {
            return Err("branch does not end at the reported node".into());
        }
        let id = t.tree().id(last).ok_or("reported node is not in the tree")?;
        let succ = t.tree().succ_indices(id);
        let mut union: Vec<u32> = strategies
            .iter()
            .filter_map(|s| match s.action_at(last) {
                Some(Action::Block(b)) => Some(b.clone()),
                _ => None,
            })
            .flatten()
            .collect();
        union.sort_unstable();
        union.dedup();
        if union != report.union || !succ.iter().all(|i| union.contains(i)) {
            return Err("blocks at the stuck node do not cover its successors".into());
        }
        match report.covering_number {
            Count::Finite(k) if k <= report.colour_count as u64 => Ok(()),
            other => Err(format!("covering number {other} exceeds the colour count")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::verify::*;
    use super::*;
    use crate::ideal_lab::SmallnessFamily;

    fn tagged(branching: u32, depth: usize, k: Option<usize>) -> TaggedTree {
        TaggedTree::uniform(Tree::complete(branching, depth), |s| {
            let dom: Vec<u32> = (0..s.len() as u32).collect();
            Some(match k {
                Some(k) => SmallnessFamily::bounded_size(dom, k).unwrap(),
                None => SmallnessFamily::trivial(dom).unwrap(),
            })
        })
        .unwrap()
    }

    fn leaves(t: &TaggedTree) -> Vec<Node> {
        t.tree().leaves().iter().map(|&l| t.tree().node(l).clone()).collect()
    }

    #[test]
    fn trivial_targets() {
        let t = tagged(3, 2, Some(1));
        let all = solve_game(&t, &leaves(&t)).unwrap();
        assert_eq!(all.winner, Player::PlayerI);
        let none = solve_game(&t, &[]).unwrap();
        assert_eq!(none.winner, Player::PlayerII);
        assert!(matches!(
            solve_game(&t, &[vec![0]]),
            Err(GameError::InvalidTarget { .. })
        ));
    }

    #[test]
    fn two_level_tags_single_target() {
        let tree = Tree::complete(2, 2);
        let f0 = SmallnessFamily::from_members(vec![0, 1], vec![vec![], vec![0]]).unwrap();
        let f1 = SmallnessFamily::from_members(vec![0, 1], vec![vec![], vec![1]]).unwrap();
        let t = TaggedTree::new(
            tree,
            vec![(vec![], f0), (vec![0], f1.clone()), (vec![1], f1)],
        )
        .unwrap();
        for target in leaves(&t) {
            let spec = GameSpec::reach(GameRules::STANDARD, target_mask(&t, &[target.clone()]).unwrap());
            let out = solve_game(&t, &[target.clone()]).unwrap();
            assert_eq!(out.winner, exhaustive_winner(&t, &spec));
            check_strategy(&t, &spec, &out.strategy).unwrap();
            // Only [1, 0] is forced: PlayerII can take 0 at the root, and
            // then 1 below.
            let expect = if target == vec![1, 0] {
                Player::PlayerI
            } else {
                Player::PlayerII
            };
            assert_eq!(out.winner, expect, "{target:?}");
        }
    }

    #[test]
    fn trivial_tags_homogenize_along_one_branch() {
        let t = tagged(3, 2, None);
        let c = BranchColouring::from_fn(t.tree(), 3, |n| (n[0] + 2 * n[1]) % 3);
        let Homogenization::Homogeneous { colour, subtree, .. } = homogenize(&t, &c).unwrap() else {
            panic!("expected a homogeneous subtree");
        };
        assert_eq!(colour, 0);
        assert_eq!(subtree.leaves().len(), 1);
        check_homogeneous(&t, &c, colour, &subtree).unwrap();
    }

    #[test]
    fn parity_colouring_has_a_counterexample() {
        let t = tagged(2, 2, Some(1));
        let c = BranchColouring::from_fn(t.tree(), 2, |n| (n[0] + n[1]) % 2);
        let Homogenization::Counterexample {
            branch,
            report,
            strategies,
        } = homogenize(&t, &c).unwrap()
        else {
            panic!("expected a counterexample");
        };
        assert_eq!(report.covering_number, Count::Finite(2));
        assert!(report.covering_number <= Count::Finite(2));
        check_counterexample(&t, &c, &branch, &report, &strategies).unwrap();
    }

    #[test]
    fn branching_four_two_colours_always_homogeneous() {
        let t = tagged(4, 2, Some(1));
        let lv = leaves(&t);
        for bits in (0u32..1 << 16).step_by(97) {
            let c = BranchColouring::from_fn(t.tree(), 2, |n| {
                let i = lv.iter().position(|x| x == n).unwrap();
                bits >> i & 1
            });
            match homogenize(&t, &c).unwrap() {
                Homogenization::Homogeneous { colour, subtree, .. } => {
                    check_homogeneous(&t, &c, colour, &subtree).unwrap();
                    for j in 0..subtree.len() {
                        if !subtree.is_leaf(j) {
                            assert!(subtree.children(j).len() >= 2);
                        }
                    }
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn level_examples() {
        let t = tagged(3, 2, Some(1));
        let constant = NodeValues::from_fn(t.tree(), |_| 7);
        let LevelHomogenization::Homogeneous { subtree, levels } = level_homogenize(&t, &constant).unwrap()
        else {
            panic!()
        };
        assert_eq!(levels, vec![7, 7, 7]);
        // Two of three successors are already positive.
        assert_eq!(subtree.len(), 7);

        let depth = NodeValues::from_fn(t.tree(), |n| n.len() as u64);
        let LevelHomogenization::Homogeneous { subtree, levels } = level_homogenize(&t, &depth).unwrap()
        else {
            panic!()
        };
        assert_eq!(levels, vec![0, 1, 2]);
        assert_eq!(subtree.leaves().len(), 4);

        let partial = NodeValues { values: vec![] };
        assert!(matches!(
            level_homogenize(&t, &partial),
            Err(GameError::MissingLabel { .. })
        ));
    }

    #[test]
    fn bound_examples() {
        let t = tagged(3, 3, Some(1));
        let zero = NodeValues::from_fn(t.tree(), |_| 0);
        let r = bound_homogenize(&t, &zero, 3, None).unwrap();
        assert_eq!(r.alpha, 1);
        assert_eq!(r.subtree.len(), 15);
        // Below mu everything is kept.
        let whole = bound_homogenize(&t, &zero, 4, None).unwrap();
        assert_eq!(whole.subtree.len(), t.tree().len());

        let depth = NodeValues::from_fn(t.tree(), |n| n.len() as u64);
        assert_eq!(bound_homogenize(&t, &depth, 3, None).unwrap().alpha, 4);
        assert!(matches!(
            bound_homogenize(&t, &depth, 3, Some(2)),
            Err(GameError::NoBoundAchievable { cap: 2, .. })
        ));
    }

    #[test]
    fn cover_examples() {
        let t = tagged(2, 3, Some(1));
        let all = leaves(&t);
        let r = cover_homogenize(&t, &vec![vec![all.clone()]]).unwrap();
        assert_eq!((r.i, r.epsilon), (0, 0));
        assert_eq!(r.subtree.len(), t.tree().len());

        let bad = cover_homogenize(&t, &vec![vec![all.clone(), vec![]]]);
        assert!(matches!(bad, Err(GameError::InvalidCover { .. })));
        let short = cover_homogenize(&t, &vec![vec![all[..3].to_vec()]]);
        assert!(matches!(short, Err(GameError::InvalidCover { .. })));
    }

    #[test]
    fn json_shapes() {
        let c: BranchColouring =
            serde_json::from_str(r#"{"leaves":[{"node":[0],"colour":1}],"colour_count":2}"#).unwrap();
        assert_eq!(c.leaves[0].colour, 1);
        let t = tagged(2, 1, Some(1));
        let out = homogenize(&t, &BranchColouring::from_fn(t.tree(), 1, |_| 0)).unwrap();
        let v = serde_json::to_value(&out).unwrap();
        assert_eq!(v["verdict"], "Homogeneous");
    }
}
