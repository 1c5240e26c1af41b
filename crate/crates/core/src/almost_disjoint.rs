//! Almost-disjoint families of sets of naturals, inspected below a bound.
//!
//! `ad_extend` builds the diagonal set: the `β`-th element is the least member
//! of the `β`-th chosen set outside all sets chosen before it. `disjointify`
//! computes cut points past which the sets become pairwise disjoint.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LazySet {
    /// Listed members; nothing is known at or above the family bound.
    Explicit { elems: Vec<u64> },
    /// Codes of the prefixes of the binary branch that reads `index` in
    /// `depth` bits and continues with zeros. The string `σ` has code
    /// `2^|σ| - 1 + value(σ)`.
    Branch { depth: u32, index: u64 },
    /// `{residue + k·modulus}`.
    Progression { modulus: u64, residue: u64 },
}

/// Code of a binary string given by its length and value.
pub fn prefix_code(len: u32, value: u64) -> u64 {
    (1u64 << len) - 1 + value
}

impl LazySet {
    /// Members below `bound`, increasing.
    pub fn below(&self, bound: u64) -> Vec<u64> {
        match self {
            LazySet::Explicit { elems } => elems.iter().copied().take_while(|&e| e < bound).collect(),
            LazySet::Branch { depth, index } => {
                let mut out = Vec::new();
                for len in 0..63u32 {
                    let value = if len <= *depth {
                        index >> (depth - len)
                    } else {
                        index << (len - depth)
                    };
                    let code = prefix_code(len, value);
                    if code >= bound {
                        break;
                    }
                    out.push(code);
                }
                out
            }
            LazySet::Progression { modulus, residue } => (*residue..bound).step_by(*modulus as usize).collect(),
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        match self {
            LazySet::Explicit { elems } => elems.binary_search(&n).is_ok(),
            LazySet::Branch { .. } => self.below(n.saturating_add(1)).last() == Some(&n),
            LazySet::Progression { modulus, residue } => n >= *residue && (n - residue) % modulus == 0,
        }
    }

    /// The `k`-th member, if it lies below `bound`.
    pub fn enumerate(&self, k: usize, bound: u64) -> Option<u64> {
        self.below(bound).get(k).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ADFamily {
    pub sets: Vec<LazySet>,
    pub inspection_bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum AdError {
    #[error("invalid family: {reason}")]
    InvalidFamily { reason: String },
    #[error("set {} has no member below {} outside the earlier sets", .0.index, .0.horizon)]
    HorizonExhausted(Box<Exhaustion>),
    #[error("sets {first} and {second} share {element}, too close to the bound {bound}")]
    UncertifiedIntersection {
        first: usize,
        second: usize,
        element: u64,
        bound: u64,
    },
}

/// Why the diagonal choice at step `beta` failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Exhaustion {
    pub beta: usize,
    pub index: usize,
    pub horizon: u64,
    /// Earlier sets covering the chosen set below the horizon.
    pub cover: Vec<usize>,
    /// True when the cover holds for all naturals, not just below the horizon.
    pub certified: bool,
}

pub const DEFAULT_INSPECTION_BOUND: u64 = 10_000;

fn invalid<T>(reason: impl Into<String>) -> Result<T, AdError> {
    Err(AdError::InvalidFamily { reason: reason.into() })
}

impl ADFamily {
    pub fn new(sets: Vec<LazySet>, inspection_bound: u64) -> Result<Self, AdError> {
        if inspection_bound == 0 {
            return invalid("inspection_bound must be positive");
        }
        for (i, s) in sets.iter().enumerate() {
            match s {
                LazySet::Explicit { elems } => {
                    if elems.windows(2).any(|w| w[0] >= w[1]) {
                        return invalid(format!("set {i} is not strictly increasing"));
                    }
                    if elems.last().is_some_and(|&e| e >= inspection_bound) {
                        return invalid(format!("set {i} lists a member at or above the bound"));
                    }
                }
                LazySet::Branch { depth, index } => {
                    if *depth > 40 || *index >> depth != 0 {
                        return invalid(format!("set {i} is not a branch of depth {depth}"));
                    }
                }
                LazySet::Progression { modulus, residue } => {
                    if *modulus == 0 || residue >= modulus {
                        return invalid(format!("set {i} needs 0 <= residue < modulus"));
                    }
                }
            }
        }
        Ok(ADFamily { sets, inspection_bound })
    }

    /// The `2^depth` branches of the complete binary tree of that depth.
    pub fn branches(depth: u32, inspection_bound: u64) -> Result<Self, AdError> {
        if depth > 20 {
            return invalid("branch depth above 20");
        }
        Self::new(
            (0..1u64 << depth).map(|index| LazySet::Branch { depth, index }).collect(),
            inspection_bound,
        )
    }

    /// The residue classes modulo `modulus`.
    pub fn progressions(modulus: u64, inspection_bound: u64) -> Result<Self, AdError> {
        if modulus == 0 || modulus > 1 << 20 {
            return invalid("modulus must be in 1..=2^20");
        }
        Self::new(
            (0..modulus).map(|residue| LazySet::Progression { modulus, residue }).collect(),
            inspection_bound,
        )
    }

    pub fn explicit(sets: Vec<Vec<u64>>, bound: u64) -> Result<Self, AdError> {
        Self::new(sets.into_iter().map(|elems| LazySet::Explicit { elems }).collect(), bound)
    }

    /// Reads `{"gen":"branches","depth":d}`, `{"gen":"apmod","modulus":m}`
    /// (each with an optional `inspection_bound`) or
    /// `{"sets":[[...]],"bound":B}`.
    pub fn from_json(v: &Value) -> Result<Self, AdError> {
        #[derive(Deserialize)]
        #[serde(tag = "gen", rename_all = "snake_case", deny_unknown_fields)]
        enum Generated {
            Branches { depth: u32, inspection_bound: Option<u64> },
            Apmod { modulus: u64, inspection_bound: Option<u64> },
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Explicit {
            sets: Vec<Vec<u64>>,
            bound: u64,
        }
        let bad = |e: serde_json::Error| AdError::InvalidFamily { reason: e.to_string() };
        if v.get("gen").is_some() {
            match Generated::deserialize(v).map_err(bad)? {
                Generated::Branches { depth, inspection_bound } => {
                    Self::branches(depth, inspection_bound.unwrap_or(DEFAULT_INSPECTION_BOUND))
                }
                Generated::Apmod { modulus, inspection_bound } => {
                    Self::progressions(modulus, inspection_bound.unwrap_or(DEFAULT_INSPECTION_BOUND))
                }
            }
        } else {
            let e = Explicit::deserialize(v).map_err(bad)?;
            Self::explicit(e.sets, e.bound)
        }
    }

    pub fn members(&self, i: usize) -> Vec<u64> {
        self.sets[i].below(self.inspection_bound)
    }

    /// Pairwise intersections below the bound, nonempty ones only.
    pub fn overlaps(&self) -> BTreeMap<(usize, usize), Vec<u64>> {
        let members: Vec<BTreeSet<u64>> = (0..self.sets.len())
            .map(|i| self.members(i).into_iter().collect())
            .collect();
        let mut out = BTreeMap::new();
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                let common: Vec<u64> = members[i].intersection(&members[j]).copied().collect();
                if !common.is_empty() {
                    out.insert((i, j), common);
                }
            }
        }
        out
    }

    /// Lowest value counted as touching the bound.
    pub fn upper_window(&self) -> u64 {
        self.inspection_bound / 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Choice {
    pub beta: usize,
    pub index: usize,
    pub element: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extension {
    /// The emitted set, increasing.
    pub elements: Vec<u64>,
    pub choices: Vec<Choice>,
    /// For each chosen set, emitted elements it contains besides its own choices.
    pub overlaps: BTreeMap<usize, Vec<u64>>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

const PERIOD_LIMIT: u64 = 1 << 24;

/// Whether `target` lies inside the union of `cover` on all of ℕ.
fn covered_everywhere(f: &ADFamily, target: usize, cover: &[usize]) -> bool {
    if cover.contains(&target) {
        return true;
    }
    let mut period = 1u64;
    for &i in cover.iter().chain([&target]) {
        let LazySet::Progression { modulus, .. } = f.sets[i] else {
            return false;
        };
        period = period / gcd(period, modulus) * modulus;
        if period > PERIOD_LIMIT {
            return false;
        }
    }
    let LazySet::Progression { modulus, residue } = f.sets[target] else {
        unreachable!()
    };
    (residue..residue + period)
        .step_by(modulus as usize)
        .all(|n| cover.iter().any(|&i| f.sets[i].contains(n)))
}

/// Emits `emit` diagonal elements, taking sets in `order`, cycled as needed.
pub fn ad_extend(f: &ADFamily, order: &[usize], emit: usize) -> Result<Extension, AdError> {
    if emit == 0 {
        return invalid("emit must be positive");
    }
    if order.is_empty() {
        return invalid("order is empty");
    }
    let order: Vec<usize> = order.iter().copied().cycle().take(emit).collect();
    if let Some(&j) = order.iter().find(|&&j| j >= f.sets.len()) {
        return invalid(format!("order names set {j} of {}", f.sets.len()));
    }
    let bound = f.inspection_bound;
    let mut taken: BTreeSet<u64> = BTreeSet::new();
    let mut choices = Vec::with_capacity(emit);
    for (beta, &j) in order[..emit].iter().enumerate() {
        match f.members(j).into_iter().find(|n| !taken.contains(n)) {
            Some(element) => choices.push(Choice { beta, index: j, element }),
            None => {
                let mut cover: Vec<usize> = order[..beta].to_vec();
                cover.sort_unstable();
                cover.dedup();
                let certified = covered_everywhere(f, j, &cover);
                return Err(AdError::HorizonExhausted(Box::new(Exhaustion {
                    beta,
                    index: j,
                    horizon: bound,
                    cover,
                    certified,
                })));
            }
        }
        taken.extend(f.members(j));
    }
    let mut elements: Vec<u64> = choices.iter().map(|c| c.element).collect();
    elements.sort_unstable();
    elements.dedup();
    let mut overlaps = BTreeMap::new();
    for &j in &order[..emit] {
        let own: BTreeSet<u64> = choices.iter().filter(|c| c.index == j).map(|c| c.element).collect();
        let extra: Vec<u64> = elements
            .iter()
            .copied()
            .filter(|&e| !own.contains(&e) && f.sets[j].contains(e))
            .collect();
        overlaps.insert(j, extra);
    }
    Ok(Extension {
        elements,
        choices,
        overlaps,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cuts {
    /// Members below `cuts[j]` are removed from set `j`.
    pub cuts: Vec<u64>,
    /// For each positive cut, a partner set sharing the element `cuts[j] - 1`.
    pub witnesses: Vec<Option<(usize, u64)>>,
}

/// The least cuts removing every shared element from both sets sharing it.
pub fn disjointify(f: &ADFamily) -> Result<Cuts, AdError> {
    let n = f.sets.len();
    let mut cuts = vec![0u64; n];
    let mut witnesses = vec![None; n];
    for ((i, j), common) in f.overlaps() {
        let top = *common.last().expect("nonempty overlap");
        if top >= f.upper_window() {
            return Err(AdError::UncertifiedIntersection {
                first: i,
                second: j,
                element: top,
                bound: f.inspection_bound,
            });
        }
        for (a, b) in [(i, j), (j, i)] {
            if top + 1 > cuts[a] {
                cuts[a] = top + 1;
                witnesses[a] = Some((b, top));
            }
        }
    }
    Ok(Cuts { cuts, witnesses })
}

/// Re-checks cuts by enumeration below the bound: tails are pairwise
/// disjoint, and every positive cut is forced by its witness.
pub fn verify_cuts(f: &ADFamily, c: &Cuts) -> Result<(), String> {
    let tails: Vec<BTreeSet<u64>> = (0..f.sets.len())
        .map(|j| f.members(j).into_iter().filter(|&e| e >= c.cuts[j]).collect())
        .collect();
    for i in 0..tails.len() {
        for j in i + 1..tails.len() {
            if let Some(e) = tails[i].intersection(&tails[j]).next() {
                return Err(format!("tails of {i} and {j} share {e}"));
            }
        }
    }
    for (j, (&cut, w)) in c.cuts.iter().zip(&c.witnesses).enumerate() {
        match (cut, w) {
            (0, None) => {}
            (cut, Some((k, e))) if *e + 1 == cut && f.sets[j].contains(*e) && f.sets[*k].contains(*e) && *k != j => {}
            _ => return Err(format!("cut {cut} of set {j} is not forced")),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_codes() {
        let s = LazySet::Branch { depth: 2, index: 0b10 };
        assert_eq!(s.below(40), vec![0, 2, 5, 11, 23]);
        assert!(s.contains(23) && !s.contains(24));
        assert_eq!(s.enumerate(3, 40), Some(11));
    }

    #[test]
    fn covering_pair_exhausts() {
        let f = ADFamily::progressions(2, 100).unwrap();
        let Err(AdError::HorizonExhausted(e)) = ad_extend(&f, &[0, 1], 3) else {
            panic!("expected exhaustion")
        };
        assert_eq!((e.beta, e.cover.clone(), e.certified), (2, vec![0, 1], true));
        let g = ADFamily::explicit(vec![vec![0, 2], vec![1, 3], vec![0, 1, 2]], 4).unwrap();
        let Err(AdError::HorizonExhausted(e)) = ad_extend(&g, &[0, 1, 2], 3) else {
            panic!("expected exhaustion")
        };
        assert!(!e.certified);
    }

    #[test]
    fn eight_branches() {
        let f = ADFamily::branches(3, 10_000).unwrap();
        let order: Vec<usize> = (0..8).collect();
        let x = ad_extend(&f, &order, 8).unwrap();
        assert_eq!(x.elements.len(), 8);
        for j in 0..8 {
            let hits = f.members(j).iter().filter(|e| x.elements.contains(e)).count();
            assert_eq!(hits, 1 + x.overlaps[&j].len());
        }
        assert_eq!(x.choices[0].element, 0);
    }

    #[test]
    fn progressions_mod_16() {
        let f = ADFamily::progressions(16, 1000).unwrap();
        let order: Vec<usize> = (0..16).rev().collect();
        let x = ad_extend(&f, &order, 16).unwrap();
        assert_eq!(x.elements, (0..16).collect::<Vec<_>>());
        assert!(x.overlaps.values().all(Vec::is_empty));
    }

    #[test]
    fn cuts() {
        let f = ADFamily::progressions(3, 50).unwrap();
        assert_eq!(disjointify(&f).unwrap().cuts, vec![0, 0, 0]);
        let mut pow2 = vec![0];
        pow2.extend((0..10).map(|k| 1u64 << k));
        let mut pow3 = vec![0];
        pow3.extend((0..7).map(|k| 3u64.pow(k)));
        let f = ADFamily::explicit(vec![pow2, pow3], 1025).unwrap();
        let c = disjointify(&f).unwrap();
        assert_eq!(c.cuts, vec![2, 2]);
        verify_cuts(&f, &c).unwrap();
        let f = ADFamily::branches(3, 10_000).unwrap();
        let c = disjointify(&f).unwrap();
        verify_cuts(&f, &c).unwrap();
        // Siblings 2k and 2k+1 share the depth-2 prefix, whose code is 3 + k.
        for j in 0..8u64 {
            assert_eq!(c.cuts[j as usize], 4 + j / 2);
        }
        let f = ADFamily::explicit(vec![vec![1, 9], vec![2, 9]], 10).unwrap();
        assert!(matches!(disjointify(&f), Err(AdError::UncertifiedIntersection { .. })));
    }

    #[test]
    fn json_forms() {
        let f = ADFamily::from_json(&serde_json::json!({"gen":"branches","depth":2})).unwrap();
        assert_eq!((f.sets.len(), f.inspection_bound), (4, DEFAULT_INSPECTION_BOUND));
        let f = ADFamily::from_json(&serde_json::json!({"gen":"apmod","modulus":5,"inspection_bound":99})).unwrap();
        assert_eq!((f.sets.len(), f.inspection_bound), (5, 99));
        let f = ADFamily::from_json(&serde_json::json!({"sets":[[1,2],[3]],"bound":4})).unwrap();
        assert_eq!(f.members(0), vec![1, 2]);
        assert!(ADFamily::from_json(&serde_json::json!({"sets":[[2,1]],"bound":4})).is_err());
        assert!(ADFamily::from_json(&serde_json::json!({"gen":"stars"})).is_err());
    }
}
