//! Finite prefix-closed trees of integer sequences, smallness tags on their
//! nodes, the subtree orders, fronts and depth ranks.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ideal_lab::SmallnessFamily;
use crate::ordinal::Ordinal;

pub type Node = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum TreeError {
    #[error("tree has no root")]
    MissingRoot,
    #[error("node {node:?} is present but its parent is not")]
    NotPrefixClosed { node: Node },
    #[error("node {node:?} is not in the tree")]
    UnknownNode { node: Node },
    #[error("invalid tag at {node:?}: {reason}")]
    InvalidTags { node: Node, reason: String },
    #[error("{a:?} and {b:?} are comparable")]
    NotAntichain { a: Node, b: Node },
    #[error("maximal node {missed:?} has no ancestor in the set")]
    NotAFront { missed: Node },
    #[error("refinement fails: a set of P at {eta:?} contains no set of P at {nu:?}")]
    RefinementViolation { eta: Node, nu: Node, set: Vec<Node> },
}

/// `a` is an initial segment of `b` (possibly equal).
pub fn is_prefix(a: &[u32], b: &[u32]) -> bool {
    a.len() <= b.len() && b[..a.len()] == *a
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTree", into = "RawTree")]
pub struct Tree {
    nodes: Vec<Node>,
    index: HashMap<Node, usize>,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawTree {
    pub nodes: Vec<Node>,
}

impl TryFrom<RawTree> for Tree {
    type Error = TreeError;

    fn try_from(raw: RawTree) -> Result<Self, TreeError> {
        Tree::new(raw.nodes)
    }
}

impl From<Tree> for RawTree {
    fn from(t: Tree) -> Self {
        RawTree { nodes: t.nodes }
    }
}

impl Tree {
    /// Nodes are stored in lexicographic order, so parents precede children
    /// and siblings appear by increasing index.
    pub fn new(nodes: impl IntoIterator<Item = Node>) -> Result<Tree, TreeError> {
        let set: BTreeSet<Node> = nodes.into_iter().collect();
        if !set.contains(&Vec::new()) {
            return Err(TreeError::MissingRoot);
        }
        let nodes: Vec<Node> = set.into_iter().collect();
        let index: HashMap<Node, usize> =
            nodes.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let mut parent = vec![None; nodes.len()];
        let mut children = vec![Vec::new(); nodes.len()];
        for (i, n) in nodes.iter().enumerate().skip(1) {
            let p = *index
                .get(&n[..n.len() - 1])
                .ok_or_else(|| TreeError::NotPrefixClosed { node: n.clone() })?;
            parent[i] = Some(p);
            children[p].push(i);
        }
        Ok(Tree {
            nodes,
            index,
            parent,
            children,
        })
    }

    /// Every node has `branching` successors up to length `depth`.
    pub fn complete(branching: u32, depth: usize) -> Tree {
        let mut nodes = vec![Vec::new()];
        let mut frontier = vec![Vec::new()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for n in &frontier {
                for i in 0..branching {
                    let mut c: Node = n.clone();
                    c.push(i);
                    next.push(c);
                }
            }
            nodes.extend(next.iter().cloned());
            frontier = next;
        }
        Tree::new(nodes).expect("complete trees are prefix closed")
    }

    pub const ROOT: usize = 0;

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn id(&self, node: &[u32]) -> Option<usize> {
        self.index.get(node).copied()
    }

    pub fn require(&self, node: &[u32]) -> Result<usize, TreeError> {
        self.id(node).ok_or_else(|| TreeError::UnknownNode {
            node: node.to_vec(),
        })
    }

    pub fn contains(&self, node: &[u32]) -> bool {
        self.index.contains_key(node)
    }

    pub fn parent(&self, id: usize) -> Option<usize> {
        self.parent[id]
    }

    pub fn children(&self, id: usize) -> &[usize] {
        &self.children[id]
    }

    /// Last coordinates of the children of `id`.
    pub fn succ_indices(&self, id: usize) -> Vec<u32> {
        self.children[id]
            .iter()
            .map(|&c| *self.nodes[c].last().expect("children are nonempty"))
            .collect()
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        self.children[id].is_empty()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_leaf(i)).collect()
    }

    pub fn depth(&self, id: usize) -> usize {
        self.nodes[id].len()
    }

    pub fn height(&self) -> usize {
        self.nodes.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Ids of the ancestors of `id`, root first, including `id`.
    pub fn path_to(&self, id: usize) -> Vec<usize> {
        let mut out = vec![id];
        let mut cur = id;
        while let Some(p) = self.parent[cur] {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }

    /// Ids of the subtree of all nodes extending `id` (including it).
    pub fn cone(&self, id: usize) -> Vec<usize> {
        let mut out = vec![id];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&self.children[out[i]]);
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// The subtree on the given node ids; must be prefix closed.
    pub fn subtree(&self, ids: &[usize]) -> Result<Tree, TreeError> {
        Tree::new(ids.iter().map(|&i| self.nodes[i].clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTaggedTree", into = "RawTaggedTree")]
pub struct TaggedTree {
    tree: Tree,
    tags: Vec<Option<SmallnessFamily>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TagEntry {
    pub node: Node,
    pub family: SmallnessFamily,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawTaggedTree {
    pub nodes: Vec<Node>,
    #[serde(default)]
    pub tags: Vec<TagEntry>,
}

impl TryFrom<RawTaggedTree> for TaggedTree {
    type Error = TreeError;

    fn try_from(raw: RawTaggedTree) -> Result<Self, TreeError> {
        let tree = Tree::new(raw.nodes)?;
        TaggedTree::new(tree, raw.tags.into_iter().map(|t| (t.node, t.family)))
    }
}

impl From<TaggedTree> for RawTaggedTree {
    fn from(t: TaggedTree) -> Self {
        let tags = t
            .tags
            .iter()
            .enumerate()
            .filter_map(|(i, f)| {
                f.as_ref().map(|f| TagEntry {
                    node: t.tree.node(i).clone(),
                    family: f.clone(),
                })
            })
            .collect();
        RawTaggedTree {
            nodes: t.tree.nodes,
            tags,
        }
    }
}

impl TaggedTree {
    pub fn new(
        tree: Tree,
        tags: impl IntoIterator<Item = (Node, SmallnessFamily)>,
    ) -> Result<TaggedTree, TreeError> {
        let mut slots: Vec<Option<SmallnessFamily>> = vec![None; tree.len()];
        for (node, family) in tags {
            let id = tree.id(&node).ok_or_else(|| TreeError::InvalidTags {
                node: node.clone(),
                reason: "tagged node is not in the tree".into(),
            })?;
            if slots[id].is_some() {
                return Err(TreeError::InvalidTags {
                    node,
                    reason: "node tagged twice".into(),
                });
            }
            if let Some(i) = tree
                .succ_indices(id)
                .into_iter()
                .find(|&i| family.position(i).is_none())
            {
                return Err(TreeError::InvalidTags {
                    node,
                    reason: format!("successor index {i} is outside the tag domain"),
                });
            }
            slots[id] = Some(family);
        }
        Ok(TaggedTree { tree, tags: slots })
    }

    /// Tags every internal node via `tag(successor indices)`.
    pub fn uniform(
        tree: Tree,
        mut tag: impl FnMut(&[u32]) -> Option<SmallnessFamily>,
    ) -> Result<TaggedTree, TreeError> {
        let tags: Vec<(Node, SmallnessFamily)> = (0..tree.len())
            .filter(|&i| !tree.is_leaf(i))
            .filter_map(|i| tag(&tree.succ_indices(i)).map(|f| (tree.node(i).clone(), f)))
            .collect();
        TaggedTree::new(tree, tags)
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn tag(&self, id: usize) -> Option<&SmallnessFamily> {
        self.tags[id].as_ref()
    }

    /// Mask in the tag domain of the given children of `id`.
    pub fn child_mask(&self, id: usize, children: &[usize]) -> Option<u64> {
        let tag = self.tag(id)?;
        let mut m = 0u64;
        for &c in children {
            let last = *self.tree.node(c).last()?;
            m |= 1 << tag.position(last)?;
        }
        Some(m)
    }

    /// Whether the tag exists and the successor set is not a member.
    pub fn is_splitting(&self, id: usize) -> bool {
        self.is_positive(id, self.tree.children(id))
    }

    /// Whether the given children of `id` form a tag-positive set.
    pub fn is_positive(&self, id: usize, children: &[usize]) -> bool {
        match self.child_mask(id, children) {
            Some(m) => !self.tag(id).expect("mask implies tag").contains_mask(m),
            None => false,
        }
    }

    pub fn splitting_ids(&self) -> Vec<usize> {
        (0..self.tree.len()).filter(|&i| self.is_splitting(i)).collect()
    }

    pub fn splitting_points(&self) -> Vec<Node> {
        self.splitting_ids()
            .into_iter()
            .map(|i| self.tree.node(i).clone())
            .collect()
    }

    /// Keeps tags only at splitting nodes, each restricted to exactly the
    /// successor indices.
    pub fn normal_form(&self) -> TaggedTree {
        let tags = self
            .tags
            .iter()
            .enumerate()
            .map(|(i, f)| match f {
                Some(f) if self.is_splitting(i) => Some(
                    f.restrict(&self.tree.succ_indices(i))
                        .expect("successor set is positive"),
                ),
                _ => None,
            })
            .collect();
        TaggedTree {
            tree: self.tree.clone(),
            tags,
        }
    }

    /// The subtree on the given node ids with the inherited tags.
    pub fn subtree(&self, ids: &[usize]) -> Result<TaggedTree, TreeError> {
        let tree = self.tree.subtree(ids)?;
        let tags = ids
            .iter()
            .filter_map(|&i| self.tags[i].clone().map(|f| (self.tree.node(i).clone(), f)));
        TaggedTree::new(tree, tags)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Relation {
    NotLE,
    LE,
    LEStar,
    LEOtimes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeRelation {
    pub level: Relation,
    /// With a branching cutoff `μ`: at least `LEStar`, and nodes of `T2`
    /// with fewer than `μ` successors in `T1` keep all of them.
    pub otimes_mu: Option<bool>,
}

/// The strongest subtree relation `T2 ≤ T1` that holds.
///
/// `LE` asks that the nodes of `T2` lie in `T1`, that maximal nodes of `T2`
/// are maximal in `T1`, that splitting nodes of `T2` split in `T1`, and that
/// at those nodes the two tags agree on subsets of the `T2` successors.
pub fn compare_trees(t1: &TaggedTree, t2: &TaggedTree, mu: Option<usize>) -> TreeRelation {
    let not_le = TreeRelation {
        level: Relation::NotLE,
        otimes_mu: mu.map(|_| false),
    };
    let (a, b) = (&t1.tree, &t2.tree);
    let mut map = Vec::with_capacity(b.len());
    for n in b.nodes() {
        match a.id(n) {
            Some(i) => map.push(i),
            None => return not_le,
        }
    }
    for j in 0..b.len() {
        if b.is_leaf(j) && !a.is_leaf(map[j]) {
            return not_le;
        }
    }
    let mut star = true;
    let mut otimes = true;
    for j in 0..b.len() {
        let i = map[j];
        let split2 = t2.is_splitting(j);
        let split1 = t1.is_splitting(i);
        if split2 {
            if !split1 {
                return not_le;
            }
            let s: Vec<u32> = b.succ_indices(j);
            let (f1, f2) = (t1.tag(i).expect("split"), t2.tag(j).expect("split"));
            if !same_trace(f1, f2, &s) {
                return not_le;
            }
        } else if split1 {
            star = false;
        }
        if !split1 && b.children(j).len() != a.children(i).len() {
            otimes = false;
        }
    }
    let level = match (star, otimes) {
        (false, _) => Relation::LE,
        (true, false) => Relation::LEStar,
        (true, true) => Relation::LEOtimes,
    };
    let otimes_mu = mu.map(|mu| {
        level >= Relation::LEStar
            && (0..b.len()).all(|j| {
                let i = map[j];
                a.children(i).len() >= mu || b.children(j).len() == a.children(i).len()
            })
    });
    TreeRelation { level, otimes_mu }
}

/// Both families agree on which subsets of `atoms` are members.
fn same_trace(f1: &SmallnessFamily, f2: &SmallnessFamily, atoms: &[u32]) -> bool {
    let trace = |f: &SmallnessFamily| -> BTreeSet<Vec<u32>> {
        let masks: Vec<Vec<u32>> = f
            .maximal_members()
            .into_iter()
            .map(|m| m.into_iter().filter(|x| atoms.contains(x)).collect())
            .collect();
        masks
            .iter()
            .filter(|m| {
                !masks
                    .iter()
                    .any(|o| o.len() > m.len() && m.iter().all(|x| o.contains(x)))
            })
            .cloned()
            .collect()
    };
    trace(f1) == trace(f2)
}

fn ids_of(t: &Tree, a: &[Node]) -> Result<Vec<usize>, TreeError> {
    a.iter().map(|n| t.require(n)).collect()
}

/// Marks the nodes having an ancestor-or-self in `a`.
fn covered_below(t: &Tree, a: &[usize]) -> Vec<bool> {
    let mut covered = vec![false; t.len()];
    for &i in a {
        covered[i] = true;
    }
    for i in 0..t.len() {
        if let Some(p) = t.parent(i) {
            covered[i] |= covered[p];
        }
    }
    covered
}

/// Every maximal node has an ancestor-or-self in `a`.
pub fn contains_front(t: &Tree, a: &[Node]) -> Result<bool, TreeError> {
    let ids = ids_of(t, a)?;
    let covered = covered_below(t, &ids);
    Ok(t.leaves().into_iter().all(|l| covered[l]))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontWitness {
    pub front: Vec<Node>,
    pub depth_fn: Vec<(Node, u64)>,
}

/// For an antichain front, the least depth function: `0` on nodes at or
/// below the front, and otherwise one more than the largest value on the
/// children.
pub fn front_witness(t: &Tree, a: &[Node]) -> Result<FrontWitness, TreeError> {
    let ids = ids_of(t, a)?;
    let front: BTreeSet<usize> = ids.iter().copied().collect();
    let list: Vec<usize> = front.iter().copied().collect();
    for (x, &i) in list.iter().enumerate() {
        for &j in &list[x + 1..] {
            let (p, q) = (t.node(i), t.node(j));
            if is_prefix(p, q) || is_prefix(q, p) {
                return Err(TreeError::NotAntichain {
                    a: p.clone(),
                    b: q.clone(),
                });
            }
        }
    }
    let covered = covered_below(t, &list);
    if let Some(l) = t.leaves().into_iter().find(|&l| !covered[l]) {
        return Err(TreeError::NotAFront {
            missed: t.node(l).clone(),
        });
    }
    let mut df = vec![0u64; t.len()];
    for i in (0..t.len()).rev() {
        if !covered[i] {
            df[i] = 1 + t.children(i).iter().map(|&c| df[c]).max().unwrap_or(0);
        }
    }
    Ok(FrontWitness {
        front: list.iter().map(|&i| t.node(i).clone()).collect(),
        depth_fn: (0..t.len()).map(|i| (t.node(i).clone(), df[i])).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum RankMode {
    /// The witnessing splitting node lies strictly below the node.
    #[default]
    Strict,
    /// The witnessing splitting node may be the node itself.
    Reflexive,
}

/// The node-set families `P_η` driving the depth rank.
pub type RankFamilies = BTreeMap<Node, Vec<Vec<Node>>>;

/// Depth rank of every node: `S₀` is all nodes, and `η ∈ S_{α+1}` iff
/// `η ∈ S_α` and every set `A ∈ P_η` holds a splitting node `ν` below `η`
/// whose children in `S_α` form a tag-positive set. Nodes missing from `p`
/// use `P_η = {nodes extending η}`.
pub fn dp_rank(
    t: &TaggedTree,
    p: Option<&RankFamilies>,
    mode: RankMode,
) -> Result<Vec<(Node, Ordinal)>, TreeError> {
    let tree = t.tree();
    let n = tree.len();
    let mut families: Vec<Vec<Vec<usize>>> = (0..n).map(|i| vec![tree.cone(i)]).collect();
    if let Some(p) = p {
        for (node, sets) in p {
            let id = tree.require(node)?;
            let mut converted = Vec::with_capacity(sets.len());
            for s in sets {
                let mut ids = ids_of(tree, s)?;
                ids.sort_unstable();
                ids.dedup();
                converted.push(ids);
            }
            families[id] = converted;
        }
        for eta in 0..n {
            for nu in tree.cone(eta).into_iter().filter(|&x| x != eta) {
                for a in &families[eta] {
                    let refined = families[nu]
                        .iter()
                        .any(|b| b.iter().all(|x| a.binary_search(x).is_ok()));
                    if !refined {
                        return Err(TreeError::RefinementViolation {
                            eta: tree.node(eta).clone(),
                            nu: tree.node(nu).clone(),
                            set: a.iter().map(|&x| tree.node(x).clone()).collect(),
                        });
                    }
                }
            }
        }
    }
    let splitting: Vec<bool> = (0..n).map(|i| t.is_splitting(i)).collect();
    let mut rank = vec![0u64; n];
    let mut alive = vec![true; n];
    for level in 0.. {
        let positive_at: Vec<bool> = (0..n)
            .map(|nu| {
                if !splitting[nu] {
                    return false;
                }
                let kids: Vec<usize> = tree
                    .children(nu)
                    .iter()
                    .copied()
                    .filter(|&c| alive[c])
                    .collect();
                t.is_positive(nu, &kids)
            })
            .collect();
        let next: Vec<bool> = (0..n)
            .map(|eta| {
                alive[eta]
                    && families[eta].iter().all(|a| {
                        a.iter().any(|&nu| {
                            positive_at[nu]
                                && is_prefix(tree.node(eta), tree.node(nu))
                                && (mode == RankMode::Reflexive || nu != eta)
                        })
                    })
            })
            .collect();
        if next == alive {
            break;
        }
        for i in 0..n {
            if next[i] {
                rank[i] = level + 1;
            }
        }
        alive = next;
    }
    Ok((0..n)
        .map(|i| (tree.node(i).clone(), Ordinal::from(rank[i])))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triv(n: usize) -> SmallnessFamily {
        SmallnessFamily::trivial((0..n as u32).collect()).unwrap()
    }

    fn all_trivial(tree: Tree) -> TaggedTree {
        TaggedTree::uniform(tree, |s| Some(triv(s.len()))).unwrap()
    }

    #[test]
    fn tree_structure() {
        let t = Tree::complete(2, 2);
        assert_eq!(t.len(), 7);
        assert_eq!(t.leaves().len(), 4);
        assert_eq!(t.succ_indices(Tree::ROOT), vec![0, 1]);
        assert_eq!(
            Tree::new(vec![vec![], vec![0, 1]]).unwrap_err(),
            TreeError::NotPrefixClosed { node: vec![0, 1] }
        );
        assert_eq!(Tree::new(vec![vec![0]]).unwrap_err(), TreeError::MissingRoot);
        let j: Tree = serde_json::from_str(r#"{"nodes":[[],[0],[1],[0,0]]}"#).unwrap();
        assert_eq!(j.children(Tree::ROOT).len(), 2);
    }

    #[test]
    fn splitting_examples() {
        let t = all_trivial(Tree::complete(2, 2));
        assert_eq!(
            t.splitting_points(),
            vec![vec![], vec![0], vec![1]]
        );
        let two = Tree::complete(2, 1);
        let t = TaggedTree::uniform(two, |_| {
            Some(SmallnessFamily::bounded_size(vec![0, 1, 2], 2).unwrap())
        })
        .unwrap();
        assert!(t.splitting_points().is_empty());

        // Root has three successors, each of them two.
        let mut nodes = vec![vec![]];
        for i in 0..3 {
            nodes.push(vec![i]);
            for j in 0..2 {
                nodes.push(vec![i, j]);
            }
        }
        let t = TaggedTree::uniform(Tree::new(nodes).unwrap(), |s| {
            Some(SmallnessFamily::bounded_size((0..s.len() as u32).collect(), 1).unwrap())
        })
        .unwrap();
        assert_eq!(t.splitting_points(), vec![vec![], vec![0], vec![1], vec![2]]);
        let t = TaggedTree::uniform(t.tree().clone(), |s| {
            (s.len() == 3)
                .then(|| SmallnessFamily::bounded_size(vec![0, 1, 2], 1).unwrap())
        })
        .unwrap();
        assert_eq!(t.splitting_points(), vec![Node::new()]);
    }

    #[test]
    fn invalid_tags_are_rejected() {
        let t = Tree::complete(3, 1);
        let e = TaggedTree::new(t, vec![(vec![], triv(2))]).unwrap_err();
        assert!(matches!(e, TreeError::InvalidTags { .. }));
    }

    #[test]
    fn compare_examples() {
        let t = all_trivial(Tree::complete(2, 2));
        assert_eq!(compare_trees(&t, &t, None).level, Relation::LEOtimes);

        // Prune the branch through [1]; the root keeps one child, which is
        // still positive for {∅}.
        let ids: Vec<usize> = [vec![], vec![0], vec![0, 0], vec![0, 1]]
            .iter()
            .map(|n| t.tree().id(n).unwrap())
            .collect();
        let pruned = t.subtree(&ids).unwrap();
        assert!(compare_trees(&t, &pruned, None).level >= Relation::LEStar);

        // An untagged binary root; dropping one successor.
        let plain = TaggedTree::new(Tree::complete(2, 1), vec![]).unwrap();
        let one = plain.subtree(&[0, 1]).unwrap();
        let rel = compare_trees(&plain, &one, None).level;
        assert!(rel >= Relation::LE && rel < Relation::LEOtimes);
        assert_eq!(compare_trees(&one, &plain, None).level, Relation::NotLE);
    }

    #[test]
    fn compare_with_cutoff() {
        let t = all_trivial(Tree::complete(2, 2));
        let rel = compare_trees(&t, &t, Some(3));
        assert_eq!(rel.otimes_mu, Some(true));
        let ids: Vec<usize> = [vec![], vec![0], vec![0, 0], vec![0, 1]]
            .iter()
            .map(|n| t.tree().id(n).unwrap())
            .collect();
        let pruned = t.subtree(&ids).unwrap();
        assert_eq!(compare_trees(&t, &pruned, Some(3)).otimes_mu, Some(false));
        assert_eq!(compare_trees(&t, &pruned, Some(2)).otimes_mu, Some(true));
    }

    #[test]
    fn front_examples() {
        let t = Tree::complete(2, 2);
        assert!(contains_front(&t, &[vec![]]).unwrap());
        assert!(!contains_front(&t, &[]).unwrap());
        let t3 = Tree::complete(2, 3);
        let depth2: Vec<Node> = t3.nodes().iter().filter(|n| n.len() == 2).cloned().collect();
        assert!(contains_front(&t3, &depth2).unwrap());

        let leaves: Vec<Node> = t.leaves().iter().map(|&i| t.node(i).clone()).collect();
        let w = front_witness(&t, &leaves).unwrap();
        let df: BTreeMap<Node, u64> = w.depth_fn.into_iter().collect();
        assert_eq!(df[&vec![]], 2);
        assert_eq!(df[&vec![0]], 1);
        assert_eq!(df[&vec![1, 0]], 0);

        let w = front_witness(&t, &[vec![]]).unwrap();
        assert_eq!(w.depth_fn[0], (vec![], 0));

        assert_eq!(
            front_witness(&t, &[vec![0], vec![1, 0]]).unwrap_err(),
            TreeError::NotAFront { missed: vec![1, 1] }
        );
        assert!(matches!(
            front_witness(&t, &[vec![0], vec![0, 1]]),
            Err(TreeError::NotAntichain { .. })
        ));
    }

    #[test]
    fn rank_examples() {
        for d in 1..=4 {
            let t = all_trivial(Tree::complete(2, d));
            let strict = dp_rank(&t, None, RankMode::Strict).unwrap();
            let reflexive = dp_rank(&t, None, RankMode::Reflexive).unwrap();
            // Each step of the strict rank needs a splitting node strictly
            // below whose children already carry the previous rank.
            assert_eq!(strict[0].1, Ordinal::from(d as u64 / 2));
            assert_eq!(reflexive[0].1, Ordinal::from(d as u64));
            for (node, r) in &strict {
                if node.len() == d {
                    assert_eq!(*r, Ordinal::zero());
                }
            }
        }
        let t = TaggedTree::uniform(Tree::complete(2, 3), |s| {
            Some(SmallnessFamily::bounded_size(vec![0, 1, 2], 2).unwrap()).filter(|_| !s.is_empty())
        })
        .unwrap();
        assert!(t.splitting_points().is_empty());
        let r = dp_rank(&t, None, RankMode::Strict).unwrap();
        assert!(r.iter().all(|(_, x)| x.is_zero()));
    }

    #[test]
    fn rank_with_families() {
        let t = all_trivial(Tree::complete(2, 2));
        let mut p = RankFamilies::new();
        for id in 0..t.tree().len() {
            let leaves: Vec<Node> = t
                .tree()
                .cone(id)
                .into_iter()
                .filter(|&x| t.tree().is_leaf(x))
                .map(|x| t.tree().node(x).clone())
                .collect();
            p.insert(t.tree().node(id).clone(), vec![leaves]);
        }
        let r = dp_rank(&t, Some(&p), RankMode::Reflexive).unwrap();
        assert!(r.iter().all(|(_, x)| x.is_zero()));

        let mut bad = RankFamilies::new();
        bad.insert(vec![], vec![vec![vec![1]]]);
        assert!(matches!(
            dp_rank(&t, Some(&bad), RankMode::Strict),
            Err(TreeError::RefinementViolation { .. })
        ));
    }
}
