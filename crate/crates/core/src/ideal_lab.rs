//! Finite smallness families: downward-closed proper families of subsets of
//! a finite atom domain, with completeness, covering and indecomposability
//! checks.
//!
//! A family is stored by its antichain of maximal members; a set is a member
//! iff it is contained in one of them. Atoms are mapped to bit positions in
//! domain order, so domains are limited to 64 atoms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_ATOMS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum IdealError {
    #[error("domain is empty")]
    EmptyDomain,
    #[error("domain has {size} atoms, at most {max} are supported")]
    DomainTooLarge { size: usize, max: usize },
    #[error("atom {atom} of {set:?} is outside the domain")]
    AtomOutsideDomain { atom: u32, set: Vec<u32> },
    #[error("the empty set is not a member")]
    MissingEmptySet,
    #[error("{member:?} is a member but its subset {missing:?} is not")]
    NotDownwardClosed { member: Vec<u32>, missing: Vec<u32> },
    #[error("the whole domain {witness:?} is a member")]
    NotProper { witness: Vec<u32> },
    #[error("{set:?} is a member, restriction needs a positive set")]
    RestrictedToSmallSet { set: Vec<u32> },
    #[error("lambda must be at least 1")]
    InvalidLambda,
    #[error("search exceeded its budget after {explored} nodes")]
    SearchBudgetExceeded { explored: u64 },
    #[error("instance size {size} exceeds cap {cap}")]
    BudgetExceeded { size: u64, cap: u64 },
}

/// A cardinal that is either a natural number or infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Count {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(n) => write!(f, "{n}"),
            Count::Infinite => write!(f, "infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealReport {
    pub is_union_closed: bool,
    pub contains_all_singletons: bool,
    pub completeness: Count,
    pub covering_number: Count,
}

/// Caps for the exhaustive searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_domain: usize,
    pub max_lambda: u32,
    pub node_budget: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_domain: 8,
            max_lambda: 6,
            node_budget: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily", into = "RawFamily")]
pub struct SmallnessFamily {
    domain: Vec<u32>,
    maximal: Vec<u64>,
}

/// JSON shape of a family: explicit `members`, or `generators` that are
/// closed downward on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawFamily {
    pub domain: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<u32>>>,
}

impl TryFrom<RawFamily> for SmallnessFamily {
    type Error = IdealError;

    fn try_from(raw: RawFamily) -> Result<Self, Self::Error> {
        match (raw.members, raw.generators) {
            (Some(m), None) => SmallnessFamily::from_members(raw.domain, m),
            (None, Some(g)) => SmallnessFamily::from_generators(raw.domain, g),
            (None, None) => SmallnessFamily::from_generators(raw.domain, Vec::new()),
            (Some(m), Some(g)) => {
                let all: Vec<Vec<u32>> = m.into_iter().chain(g).collect();
                SmallnessFamily::from_generators(raw.domain, all)
            }
        }
    }
}

impl From<SmallnessFamily> for RawFamily {
    fn from(f: SmallnessFamily) -> Self {
        let generators = f.maximal.iter().map(|&m| f.atoms_of(m)).collect();
        RawFamily {
            domain: f.domain,
            members: None,
            generators: Some(generators),
        }
    }
}

fn normalize_domain(domain: Vec<u32>) -> Result<Vec<u32>, IdealError> {
    let set: BTreeSet<u32> = domain.into_iter().collect();
    if set.is_empty() {
        return Err(IdealError::EmptyDomain);
    }
    if set.len() > MAX_ATOMS {
        return Err(IdealError::DomainTooLarge {
            size: set.len(),
            max: MAX_ATOMS,
        });
    }
    Ok(set.into_iter().collect())
}

fn full_mask_of(len: usize) -> u64 {
    if len == 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Keeps only the masks not strictly contained in another one.
fn maximal_antichain(masks: impl IntoIterator<Item = u64>) -> Vec<u64> {
    let mut sorted: Vec<u64> = masks.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    sorted.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
    let mut out: Vec<u64> = Vec::new();
    for m in sorted {
        if !out.iter().any(|&o| m & !o == 0) {
            out.push(m);
        }
    }
    out.sort_unstable();
    out
}

impl SmallnessFamily {
    /// Loads an explicit member list, checking downward closure and
    /// properness.
    pub fn from_members(domain: Vec<u32>, members: Vec<Vec<u32>>) -> Result<Self, IdealError> {
        let domain = normalize_domain(domain)?;
        let shell = SmallnessFamily {
            domain,
            maximal: Vec::new(),
        };
        let mut masks = BTreeSet::new();
        for m in &members {
            masks.insert(shell.mask_of(m)?);
        }
        if !masks.contains(&0) {
            return Err(IdealError::MissingEmptySet);
        }
        for &m in &masks {
            let mut bits = m;
            while bits != 0 {
                let b = bits & bits.wrapping_neg();
                bits ^= b;
                if !masks.contains(&(m ^ b)) {
                    return Err(IdealError::NotDownwardClosed {
                        member: shell.atoms_of(m),
                        missing: shell.atoms_of(m ^ b),
                    });
                }
            }
        }
        let full = shell.full_mask();
        if masks.contains(&full) {
            return Err(IdealError::NotProper {
                witness: shell.atoms_of(full),
            });
        }
        Ok(SmallnessFamily {
            maximal: maximal_antichain(masks),
            ..shell
        })
    }

    /// The downward closure of the generators (plus the empty set).
    pub fn from_generators(domain: Vec<u32>, generators: Vec<Vec<u32>>) -> Result<Self, IdealError> {
        let domain = normalize_domain(domain)?;
        let shell = SmallnessFamily {
            domain,
            maximal: Vec::new(),
        };
        let mut masks = vec![0u64];
        for g in &generators {
            masks.push(shell.mask_of(g)?);
        }
        let full = shell.full_mask();
        if masks.contains(&full) {
            return Err(IdealError::NotProper {
                witness: shell.atoms_of(full),
            });
        }
        Ok(SmallnessFamily {
            maximal: maximal_antichain(masks),
            ..shell
        })
    }

    /// `{∅}` over the domain.
    pub fn trivial(domain: Vec<u32>) -> Result<Self, IdealError> {
        SmallnessFamily::from_generators(domain, Vec::new())
    }

    /// All subsets with at most `k` atoms.
    pub fn bounded_size(domain: Vec<u32>, k: usize) -> Result<Self, IdealError> {
        let domain = normalize_domain(domain)?;
        let n = domain.len();
        if k >= n {
            return Err(IdealError::NotProper {
                witness: domain.clone(),
            });
        }
        let mut maximal = Vec::new();
        k_subsets(n, k, &mut |m| maximal.push(m));
        Ok(SmallnessFamily {
            domain,
            maximal: maximal_antichain(maximal),
        })
    }

    pub fn domain(&self) -> &[u32] {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn full_mask(&self) -> u64 {
        full_mask_of(self.domain.len())
    }

    pub fn maximal_masks(&self) -> &[u64] {
        &self.maximal
    }

    pub fn maximal_members(&self) -> Vec<Vec<u32>> {
        self.maximal.iter().map(|&m| self.atoms_of(m)).collect()
    }

    pub fn position(&self, atom: u32) -> Option<usize> {
        self.domain.binary_search(&atom).ok()
    }

    pub fn mask_of(&self, atoms: &[u32]) -> Result<u64, IdealError> {
        let mut mask = 0u64;
        for &a in atoms {
            let p = self.position(a).ok_or_else(|| IdealError::AtomOutsideDomain {
                atom: a,
                set: atoms.to_vec(),
            })?;
            mask |= 1 << p;
        }
        Ok(mask)
    }

    pub fn atoms_of(&self, mask: u64) -> Vec<u32> {
        self.domain
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &a)| a)
            .collect()
    }

    pub fn contains_mask(&self, mask: u64) -> bool {
        self.maximal.iter().any(|&m| mask & !m == 0)
    }

    /// Membership; sets with atoms outside the domain are never members.
    pub fn contains(&self, atoms: &[u32]) -> bool {
        self.mask_of(atoms).map(|m| self.contains_mask(m)).unwrap_or(false)
    }

    /// Every member as a mask, ascending.
    pub fn member_masks(&self) -> Vec<u64> {
        let mut all = BTreeSet::new();
        for &m in &self.maximal {
            let mut sub = m;
            loop {
                all.insert(sub);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & m;
            }
        }
        all.into_iter().collect()
    }

    pub fn members(&self) -> Vec<Vec<u32>> {
        self.member_masks().into_iter().map(|m| self.atoms_of(m)).collect()
    }

    pub fn is_union_closed(&self) -> bool {
        self.maximal.len() == 1
    }

    pub fn contains_all_singletons(&self) -> bool {
        (0..self.domain.len()).all(|i| self.contains_mask(1 << i))
    }

    /// Largest `k` such that every union of fewer than `k` members is a member.
    pub fn completeness(&self) -> Count {
        if self.is_union_closed() {
            Count::Infinite
        } else {
            Count::Finite(2)
        }
    }

    /// Least number of members whose union is the domain.
    pub fn covering_number(&self) -> Count {
        self.covering_number_of(self.full_mask())
    }

    /// Least number of members whose union contains `target`.
    pub fn covering_number_of(&self, target: u64) -> Count {
        if target == 0 {
            return Count::Finite(0);
        }
        let union = self.maximal.iter().fold(0, |a, &m| a | m);
        if target & !union != 0 {
            return Count::Infinite;
        }
        let mut best = target.count_ones() as u64;
        cover_search(&self.maximal, target, 0, 0, &mut best);
        Count::Finite(best)
    }

    pub fn report(&self) -> IdealReport {
        IdealReport {
            is_union_closed: self.is_union_closed(),
            contains_all_singletons: self.contains_all_singletons(),
            completeness: self.completeness(),
            covering_number: self.covering_number(),
        }
    }

    /// The family induced on a positive subset of the domain.
    pub fn restrict(&self, atoms: &[u32]) -> Result<SmallnessFamily, IdealError> {
        let a = self.mask_of(atoms)?;
        if self.contains_mask(a) {
            return Err(IdealError::RestrictedToSmallSet {
                set: self.atoms_of(a),
            });
        }
        let sub_domain = self.atoms_of(a);
        let sub = SmallnessFamily {
            domain: sub_domain,
            maximal: Vec::new(),
        };
        let masks = self.maximal.iter().map(|&m| {
            let atoms = self.atoms_of(m & a);
            sub.mask_of(&atoms).expect("atoms lie in the restricted domain")
        });
        Ok(SmallnessFamily {
            maximal: maximal_antichain(masks),
            ..sub
        })
    }

    /// Positive subsets of the domain, ascending by mask.
    pub fn positive_masks(&self) -> impl Iterator<Item = u64> + '_ {
        (1..=self.full_mask()).filter(move |&m| !self.contains_mask(m))
    }

    fn check_caps(&self, lam: u32, config: &SearchConfig) -> Result<(), IdealError> {
        if lam == 0 {
            return Err(IdealError::InvalidLambda);
        }
        if self.domain.len() > config.max_domain {
            return Err(IdealError::DomainTooLarge {
                size: self.domain.len(),
                max: config.max_domain,
            });
        }
        if lam > config.max_lambda {
            return Err(IdealError::BudgetExceeded {
                size: lam as u64,
                cap: config.max_lambda as u64,
            });
        }
        Ok(())
    }

    /// Exhaustive check that no positive set splits into `lam` pieces whose
    /// co-pieces are all small.
    pub fn is_indecomposable(
        &self,
        lam: u32,
        config: &SearchConfig,
    ) -> Result<Indecomposability, IdealError> {
        self.check_caps(lam, config)?;
        for a in self.positive_masks() {
            let bits: Vec<usize> = (0..64).filter(|i| a >> i & 1 == 1).collect();
            if bits.len() < lam as usize {
                continue;
            }
            let mut found = None;
            partitions_into(bits.len(), lam as usize, &mut |rgs| {
                let mut blocks = vec![0u64; lam as usize];
                for (pos, &b) in rgs.iter().enumerate() {
                    blocks[b as usize] |= 1 << bits[pos];
                }
                if blocks.iter().all(|&blk| self.contains_mask(a & !blk)) {
                    found = Some(rgs.to_vec());
                    return true;
                }
                false
            });
            if let Some(rgs) = found {
                let colouring = bits
                    .iter()
                    .zip(&rgs)
                    .map(|(&p, &c)| (self.domain[p], c))
                    .collect();
                return Ok(Indecomposability {
                    holds: false,
                    witness: Some(Decomposition {
                        set: self.atoms_of(a),
                        colouring,
                    }),
                });
            }
        }
        Ok(Indecomposability {
            holds: true,
            witness: None,
        })
    }

    /// Exhaustive check that for every positive set and every `lam` members
    /// some subset of size below `lam` escapes all of them.
    pub fn is_strongly_indecomposable(
        &self,
        lam: u32,
        config: &SearchConfig,
    ) -> Result<StrongIndecomposability, IdealError> {
        self.check_caps(lam, config)?;
        let mut explored = 0u64;
        let minimal: Vec<u64> = self
            .positive_masks()
            .filter(|&a| {
                let mut bits = a;
                while bits != 0 {
                    let b = bits & bits.wrapping_neg();
                    bits ^= b;
                    if !self.contains_mask(a ^ b) {
                        return false;
                    }
                }
                true
            })
            .collect();
        for a in minimal {
            let size = a.count_ones() as usize;
            if size < lam as usize {
                continue;
            }
            let bits: Vec<usize> = (0..64).filter(|i| a >> i & 1 == 1).collect();
            let mut targets = Vec::new();
            k_subsets(size, lam as usize - 1, &mut |m| {
                let mut t = 0u64;
                for (i, &b) in bits.iter().enumerate() {
                    if m >> i & 1 == 1 {
                        t |= 1 << b;
                    }
                }
                targets.push(t);
            });
            let candidates = maximal_antichain(self.maximal.iter().map(|&m| m & a));
            let mut chosen = Vec::new();
            let hit = cover_all(
                &targets,
                &candidates,
                lam as usize,
                &mut chosen,
                &mut explored,
                config.node_budget,
            )?;
            if hit {
                return Ok(StrongIndecomposability {
                    holds: false,
                    witness: Some(StrongWitness {
                        set: self.atoms_of(a),
                        members: chosen.iter().map(|&m| self.atoms_of(m)).collect(),
                    }),
                });
            }
        }
        Ok(StrongIndecomposability {
            holds: true,
            witness: None,
        })
    }

    /// Largest family of choice functions in `∏ f` whose pairwise
    /// difference (or agreement) sets are members, by maximum-clique search.
    pub fn t_invariant(
        &self,
        f: &BTreeMap<u32, u32>,
        variant: TVariant,
        cap: u64,
    ) -> Result<TInvariant, IdealError> {
        let mut radices = Vec::with_capacity(self.domain.len());
        for &atom in &self.domain {
            let v = *f.get(&atom).ok_or(IdealError::AtomOutsideDomain {
                atom,
                set: f.keys().copied().collect(),
            })?;
            radices.push(v.max(1));
        }
        for &k in f.keys() {
            if self.position(k).is_none() {
                return Err(IdealError::AtomOutsideDomain {
                    atom: k,
                    set: f.keys().copied().collect(),
                });
            }
        }
        let mut total: u64 = 1;
        for &r in &radices {
            total = total.saturating_mul(r as u64);
            if total > cap {
                return Err(IdealError::BudgetExceeded { size: total, cap });
            }
        }
        let n = total as usize;
        let funcs: Vec<Vec<u32>> = (0..n)
            .map(|mut idx| {
                radices
                    .iter()
                    .map(|&r| {
                        let d = (idx % r as usize) as u32;
                        idx /= r as usize;
                        d
                    })
                    .collect()
            })
            .collect();
        let words = n.div_ceil(64);
        let mut adj = vec![vec![0u64; words]; n];
        for i in 0..n {
            for j in i + 1..n {
                let mut differ = 0u64;
                for (p, (x, y)) in funcs[i].iter().zip(&funcs[j]).enumerate() {
                    if x != y {
                        differ |= 1 << p;
                    }
                }
                let probe = match variant {
                    TVariant::AsWritten => differ,
                    TVariant::DifferModI => self.full_mask() & !differ,
                };
                if self.contains_mask(probe) {
                    adj[i][j / 64] |= 1 << (j % 64);
                    adj[j][i / 64] |= 1 << (i % 64);
                }
            }
        }
        let clique = max_clique(&adj, n);
        let family = clique
            .iter()
            .map(|&v| {
                self.domain
                    .iter()
                    .zip(&funcs[v])
                    .map(|(&a, &x)| (a, x))
                    .collect()
            })
            .collect();
        Ok(TInvariant {
            size: clique.len() as u64,
            family,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TVariant {
    AsWritten,
    DifferModI,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub set: Vec<u32>,
    /// `(atom, colour)` pairs.
    pub colouring: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Indecomposability {
    pub holds: bool,
    pub witness: Option<Decomposition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongWitness {
    pub set: Vec<u32>,
    pub members: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongIndecomposability {
    pub holds: bool,
    pub witness: Option<StrongWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TInvariant {
    pub size: u64,
    /// Each function as `(atom, value)` pairs.
    pub family: Vec<Vec<(u32, u32)>>,
}

/// Calls `visit` with every `k`-subset of `0..n` as a mask.
pub(crate) fn k_subsets(n: usize, k: usize, visit: &mut dyn FnMut(u64)) {
    fn go(start: usize, n: usize, k: usize, acc: u64, visit: &mut dyn FnMut(u64)) {
        if k == 0 {
            visit(acc);
            return;
        }
        for i in start..n {
            if n - i < k {
                break;
            }
            go(i + 1, n, k - 1, acc | 1 << i, visit);
        }
    }
    go(0, n, k, 0, visit);
}

/// Restricted growth strings of length `n` with exactly `k` blocks; stops
/// when `visit` returns true.
fn partitions_into(n: usize, k: usize, visit: &mut dyn FnMut(&[u32]) -> bool) {
    fn go(
        pos: usize,
        used: usize,
        n: usize,
        k: usize,
        rgs: &mut Vec<u32>,
        visit: &mut dyn FnMut(&[u32]) -> bool,
    ) -> bool {
        if pos == n {
            return used == k && visit(rgs);
        }
        if k - used > n - pos {
            return false;
        }
        let top = (used + 1).min(k);
        for b in 0..top {
            rgs.push(b as u32);
            let stop = go(pos + 1, used.max(b + 1), n, k, rgs, visit);
            rgs.pop();
            if stop {
                return true;
            }
        }
        false
    }
    go(0, 0, n, k, &mut Vec::with_capacity(n), visit);
}

fn cover_search(maximal: &[u64], target: u64, covered: u64, depth: u64, best: &mut u64) {
    let missing = target & !covered;
    if missing == 0 {
        *best = (*best).min(depth);
        return;
    }
    if depth + 1 >= *best {
        return;
    }
    let bit = missing & missing.wrapping_neg();
    for &m in maximal {
        if m & bit != 0 {
            cover_search(maximal, target, covered | m, depth + 1, best);
        }
    }
}

fn cover_all(
    targets: &[u64],
    candidates: &[u64],
    slots: usize,
    chosen: &mut Vec<u64>,
    explored: &mut u64,
    budget: u64,
) -> Result<bool, IdealError> {
    *explored += 1;
    if *explored > budget {
        return Err(IdealError::SearchBudgetExceeded {
            explored: *explored,
        });
    }
    let open = targets
        .iter()
        .find(|&&t| !chosen.iter().any(|&c| t & !c == 0));
    let Some(&t) = open else {
        return Ok(true);
    };
    if chosen.len() == slots {
        return Ok(false);
    }
    for &c in candidates {
        if t & !c == 0 {
            chosen.push(c);
            if cover_all(targets, candidates, slots, chosen, explored, budget)? {
                return Ok(true);
            }
            chosen.pop();
        }
    }
    Ok(false)
}

fn max_clique(adj: &[Vec<u64>], n: usize) -> Vec<usize> {
    let words = n.div_ceil(64);
    let mut p = vec![0u64; words];
    for v in 0..n {
        p[v / 64] |= 1 << (v % 64);
    }
    let mut best = Vec::new();
    let mut current = Vec::new();
    expand(adj, &mut current, p, &mut best);
    best.sort_unstable();
    best
}

fn first_bit(set: &[u64]) -> Option<usize> {
    set.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
}

/// Branch and bound with a greedy colouring bound.
fn expand(adj: &[Vec<u64>], current: &mut Vec<usize>, mut p: Vec<u64>, best: &mut Vec<usize>) {
    let mut order = Vec::new();
    let mut colour_of = Vec::new();
    let mut uncoloured = p.clone();
    let mut colour = 0usize;
    while uncoloured.iter().any(|&w| w != 0) {
        colour += 1;
        let mut q = uncoloured.clone();
        while let Some(v) = first_bit(&q) {
            q[v / 64] &= !(1 << (v % 64));
            uncoloured[v / 64] &= !(1 << (v % 64));
            for (qw, aw) in q.iter_mut().zip(&adj[v]) {
                *qw &= !aw;
            }
            order.push(v);
            colour_of.push(colour);
        }
    }
    for idx in (0..order.len()).rev() {
        if current.len() + colour_of[idx] <= best.len() {
            return;
        }
        let v = order[idx];
        current.push(v);
        let next: Vec<u64> = p.iter().zip(&adj[v]).map(|(a, b)| a & b).collect();
        if next.iter().all(|&w| w == 0) {
            if current.len() > best.len() {
                *best = current.clone();
            }
        } else {
            expand(adj, current, next, best);
        }
        current.pop();
        p[v / 64] &= !(1 << (v % 64));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SearchConfig {
        SearchConfig::default()
    }

    #[test]
    fn check_family_examples() {
        let f = SmallnessFamily::bounded_size(vec![0, 1, 2, 3], 1).unwrap();
        let r = f.report();
        assert_eq!(r.covering_number, Count::Finite(4));
        assert!(!r.is_union_closed);
        assert!(r.contains_all_singletons);
        assert_eq!(r.completeness, Count::Finite(2));

        let f = SmallnessFamily::trivial(vec![0, 1]).unwrap();
        let r = f.report();
        assert_eq!(r.covering_number, Count::Infinite);
        assert_eq!(r.completeness, Count::Infinite);

        let f = SmallnessFamily::from_members(
            vec![0, 1, 2],
            vec![vec![], vec![0], vec![1], vec![0, 1]],
        )
        .unwrap();
        let r = f.report();
        assert!(r.is_union_closed);
        assert_eq!(r.covering_number, Count::Infinite);
    }

    #[test]
    fn loader_rejections_carry_witnesses() {
        let e = SmallnessFamily::from_members(vec![0, 1, 2], vec![vec![], vec![0, 1]]).unwrap_err();
        assert_eq!(
            e,
            IdealError::NotDownwardClosed {
                member: vec![0, 1],
                missing: vec![1]
            }
        );
        let e = SmallnessFamily::from_members(vec![0], vec![vec![], vec![0]]).unwrap_err();
        assert_eq!(e, IdealError::NotProper { witness: vec![0] });
        let e = SmallnessFamily::from_members(vec![0, 1], vec![vec![0]]).unwrap_err();
        assert_eq!(e, IdealError::MissingEmptySet);
        let e = SmallnessFamily::from_members(vec![0, 1], vec![vec![], vec![5]]).unwrap_err();
        assert!(matches!(e, IdealError::AtomOutsideDomain { atom: 5, .. }));
        assert_eq!(
            SmallnessFamily::trivial(vec![]).unwrap_err(),
            IdealError::EmptyDomain
        );
    }

    #[test]
    fn json_forms() {
        let f: SmallnessFamily =
            serde_json::from_str(r#"{"domain":[0,1,2],"members":[[],[0],[1]]}"#).unwrap();
        assert_eq!(f.members(), vec![vec![], vec![0], vec![1]]);
        let g: SmallnessFamily =
            serde_json::from_str(r#"{"domain":[0,1,2],"generators":[[0,1]]}"#).unwrap();
        assert_eq!(g.members().len(), 4);
        let back: SmallnessFamily = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn restrict_examples() {
        let f = SmallnessFamily::bounded_size(vec![0, 1, 2, 3], 1).unwrap();
        let r = f.restrict(&[0, 1]).unwrap();
        assert_eq!(r, SmallnessFamily::bounded_size(vec![0, 1], 1).unwrap());
        assert_eq!(f.restrict(&[0, 1, 2, 3]).unwrap(), f);
        assert!(matches!(
            f.restrict(&[2]),
            Err(IdealError::RestrictedToSmallSet { .. })
        ));

        let g = SmallnessFamily::from_members(
            vec![0, 1, 2],
            vec![vec![], vec![0], vec![2], vec![0, 2]],
        )
        .unwrap();
        let r = g.restrict(&[0, 1]).unwrap();
        assert_eq!(r.domain(), &[0, 1]);
        assert_eq!(r.members(), vec![vec![], vec![0]]);
    }

    #[test]
    fn indecomposability_examples() {
        let any = SmallnessFamily::bounded_size(vec![0, 1, 2], 1).unwrap();
        let v = any.is_indecomposable(1, &cfg()).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert!(!any.contains(&w.set));

        let triv = SmallnessFamily::trivial(vec![0, 1, 2]).unwrap();
        assert!(triv.is_indecomposable(2, &cfg()).unwrap().holds);

        let s1 = SmallnessFamily::bounded_size(vec![0, 1, 2, 3], 1).unwrap();
        assert!(s1.is_indecomposable(4, &cfg()).unwrap().holds);
    }

    #[test]
    fn decomposition_witness_is_genuine() {
        let s1 = SmallnessFamily::bounded_size(vec![0, 1, 2, 3], 1).unwrap();
        let v = s1.is_indecomposable(2, &cfg()).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert!(!s1.contains(&w.set));
        for colour in 0..2 {
            let rest: Vec<u32> = w
                .colouring
                .iter()
                .filter(|(_, c)| *c != colour)
                .map(|(a, _)| *a)
                .collect();
            assert!(s1.contains(&rest));
        }
    }

    #[test]
    fn strong_indecomposability_examples() {
        let triv = SmallnessFamily::trivial(vec![0, 1, 2, 3]).unwrap();
        for lam in 2..=5 {
            assert!(triv.is_strongly_indecomposable(lam, &cfg()).unwrap().holds);
        }
        // Any positive pair {a, b} has its singletons covered by the two
        // members {a} and {b}, so the size-≤1 family fails at lam = 2.
        let s1 = SmallnessFamily::bounded_size((0..6).collect(), 1).unwrap();
        let v = s1.is_strongly_indecomposable(2, &cfg()).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.set, vec![0, 1]);
        assert_eq!(w.members, vec![vec![0], vec![1]]);
        assert!(!s1.is_indecomposable(2, &cfg()).unwrap().holds);
    }

    #[test]
    fn lambda_one_is_never_indecomposable() {
        let triv = SmallnessFamily::trivial(vec![0, 1]).unwrap();
        assert!(!triv.is_indecomposable(1, &cfg()).unwrap().holds);
        assert!(!triv.is_strongly_indecomposable(1, &cfg()).unwrap().holds);
        assert_eq!(
            triv.is_indecomposable(0, &cfg()).unwrap_err(),
            IdealError::InvalidLambda
        );
    }

    #[test]
    fn t_invariant_examples() {
        let two: BTreeMap<u32, u32> = [(0, 2), (1, 2)].into_iter().collect();
        let triv = SmallnessFamily::trivial(vec![0, 1]).unwrap();
        assert_eq!(triv.t_invariant(&two, TVariant::AsWritten, 4096).unwrap().size, 1);
        let i0 = SmallnessFamily::from_members(vec![0, 1], vec![vec![], vec![0]]).unwrap();
        let a = i0.t_invariant(&two, TVariant::AsWritten, 4096).unwrap();
        assert_eq!(a.size, 2);
        assert_eq!(i0.t_invariant(&two, TVariant::DifferModI, 4096).unwrap().size, 2);
        let big: BTreeMap<u32, u32> = [(0, 100), (1, 100)].into_iter().collect();
        assert!(matches!(
            i0.t_invariant(&big, TVariant::AsWritten, 4096),
            Err(IdealError::BudgetExceeded { .. })
        ));
    }

    /// Brute force over all subsets of functions.
    fn t_invariant_brute(f: &SmallnessFamily, radices: &[u32], variant: TVariant) -> u64 {
        let n: usize = radices.iter().map(|&r| r as usize).product();
        let funcs: Vec<Vec<u32>> = (0..n)
            .map(|mut idx| {
                radices
                    .iter()
                    .map(|&r| {
                        let d = (idx % r as usize) as u32;
                        idx /= r as usize;
                        d
                    })
                    .collect()
            })
            .collect();
        let ok = |i: usize, j: usize| {
            let differ: Vec<u32> = f
                .domain()
                .iter()
                .enumerate()
                .filter(|(p, _)| funcs[i][*p] != funcs[j][*p])
                .map(|(_, &a)| a)
                .collect();
            let agree: Vec<u32> = f
                .domain()
                .iter()
                .filter(|a| !differ.contains(a))
                .copied()
                .collect();
            match variant {
                TVariant::AsWritten => f.contains(&differ),
                TVariant::DifferModI => f.contains(&agree),
            }
        };
        let mut best = 0;
        for sub in 0u32..(1 << n) {
            let vs: Vec<usize> = (0..n).filter(|v| sub >> v & 1 == 1).collect();
            if vs.len() as u64 <= best {
                continue;
            }
            if vs
                .iter()
                .enumerate()
                .all(|(x, &i)| vs[x + 1..].iter().all(|&j| ok(i, j)))
            {
                best = vs.len() as u64;
            }
        }
        best
    }

    #[test]
    fn t_invariant_matches_brute_force() {
        let domain = vec![0, 1, 2];
        let families = [
            SmallnessFamily::trivial(domain.clone()).unwrap(),
            SmallnessFamily::bounded_size(domain.clone(), 1).unwrap(),
            SmallnessFamily::bounded_size(domain.clone(), 2).unwrap(),
            SmallnessFamily::from_generators(domain.clone(), vec![vec![0, 1]]).unwrap(),
        ];
        for fam in &families {
            for radices in [[2u32, 2, 2], [1, 2, 3], [2, 1, 2]] {
                let f: BTreeMap<u32, u32> = domain.iter().copied().zip(radices).collect();
                for variant in [TVariant::AsWritten, TVariant::DifferModI] {
                    let got = fam.t_invariant(&f, variant, 4096).unwrap().size;
                    assert_eq!(got, t_invariant_brute(fam, &radices, variant));
                }
            }
        }
    }

    #[test]
    fn covering_number_of_sizes() {
        for n in 2..=7usize {
            for k in 1..n {
                let f = SmallnessFamily::bounded_size((0..n as u32).collect(), k).unwrap();
                assert_eq!(f.covering_number(), Count::Finite(n.div_ceil(k) as u64));
            }
        }
    }

    #[test]
    fn partitions_are_counted_by_stirling_numbers() {
        let mut count = 0;
        partitions_into(6, 3, &mut |_| {
            count += 1;
            false
        });
        assert_eq!(count, 90);
    }
}
