//! Symbolic algebra of countable coloured linear orders.
//!
//! Terms are built from single points, ordinals, reversal, finite sums,
//! ω-sums and dense shuffles. Paths address subterms: a `Sum` step is the
//! summand index, an `OmegaSum` step `i` is `prefix[i]` for `i < |prefix|`
//! and copy `i - |prefix|` of the repeated term otherwise, and a `Rev` step
//! is always `0`.
//!
//! # Characters and the canonical colouring
//!
//! The character of a point is the pair (left, right) describing the part
//! of the order below and above it. Each side is an endpoint, an adjacent
//! element, or an ω-sequence converging to the point. The colour index of a
//! character is `3·left + right` with
//! `EndpointMin = 0, Successor = 1, OmegaLimit = 2` on the left and
//! `EndpointMax = 0, Predecessor = 1, OmegaColimit = 2` on the right. So
//! `(EndpointMin, Predecessor)` is 1, `(Successor, Predecessor)` is 4,
//! `(Successor, EndpointMax)` is 3 and `(OmegaLimit, OmegaColimit)` is 8.
//!
//! Every uncountable regular cardinal of the general theory is modelled by
//! ω here, so every cofinality that is not 1 is ω.
//!
//! # Shuffle enumeration
//!
//! The points of `Shuffle(C)` are the dyadic rationals in `(0, 1)`, listed
//! level by level: `1/2, 1/4, 3/4, 1/8, 3/8, …`. The point with index `k` in
//! this list has colour `C[k mod |C|]` (colours ascending).

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::{Ordinal, OrdinalError};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum TermError {
    #[error("the term contains a dense subterm")]
    NotScattered,
    #[error("rank exceeds the budget; it is at least {lower_bound}")]
    BudgetExceeded { lower_bound: Ordinal },
    #[error("invalid cut: {reason}")]
    InvalidCut { reason: String },
    #[error("invalid point: {reason}")]
    InvalidPoint { reason: String },
    #[error("{n} points requested, cap is {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("order of size {size} exceeds the limit {max}")]
    TooLarge { size: usize, max: usize },
    #[error("a shuffle needs at least one colour")]
    EmptyShuffle,
    #[error("invalid ordinal: {0}")]
    Ordinal(String),
}

impl From<OrdinalError> for TermError {
    fn from(e: OrdinalError) -> Self {
        TermError::Ordinal(e.to_string())
    }
}

/// Colours of the points of an ordinal, by position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tint {
    /// Position 0.
    pub first: u32,
    /// Other successor positions.
    pub successor: u32,
    /// Limit positions.
    pub limit: u32,
    /// The maximum, when the ordinal has one and it is not position 0.
    pub last: u32,
}

impl Tint {
    pub fn colour_at(&self, a: &Ordinal, g: &Ordinal) -> u32 {
        if g.is_zero() {
            self.first
        } else if a.pred().as_ref() == Some(g) {
            self.last
        } else if g.is_limit() {
            self.limit
        } else {
            self.successor
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTerm", into = "RawTerm")]
pub enum OrderTerm {
    Empty,
    One(Option<u32>),
    Ord { a: Ordinal, tint: Option<Tint> },
    Rev(Box<OrderTerm>),
    Sum(Vec<OrderTerm>),
    /// `prefix` followed by ω copies of `repeat`.
    OmegaSum {
        prefix: Vec<OrderTerm>,
        repeat: Box<OrderTerm>,
    },
    Shuffle(BTreeSet<u32>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CnfInput {
    Finite(u64),
    Terms(Vec<(Ordinal, u64)>),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawTerm {
    Empty,
    One {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        colour: Option<u32>,
    },
    Ord {
        cnf: CnfInput,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tint: Option<Tint>,
    },
    Rev {
        arg: Box<RawTerm>,
    },
    Sum {
        args: Vec<RawTerm>,
    },
    OmegaSum {
        #[serde(default)]
        prefix: Vec<RawTerm>,
        repeat: Box<RawTerm>,
    },
    Shuffle {
        colours: BTreeSet<u32>,
    },
}

impl TryFrom<RawTerm> for OrderTerm {
    type Error = TermError;

    fn try_from(raw: RawTerm) -> Result<Self, TermError> {
        let list = |v: Vec<RawTerm>| -> Result<Vec<OrderTerm>, TermError> {
            v.into_iter().map(OrderTerm::try_from).collect()
        };
        Ok(match raw {
            RawTerm::Empty => OrderTerm::Empty,
            RawTerm::One { colour } => OrderTerm::One(colour),
            RawTerm::Ord { cnf, tint } => OrderTerm::Ord {
                a: match cnf {
                    CnfInput::Finite(n) => Ordinal::from(n),
                    CnfInput::Terms(t) => Ordinal::from_terms(t)?,
                },
                tint,
            },
            RawTerm::Rev { arg } => OrderTerm::Rev(Box::new((*arg).try_into()?)),
            RawTerm::Sum { args } => OrderTerm::Sum(list(args)?),
            RawTerm::OmegaSum { prefix, repeat } => OrderTerm::OmegaSum {
                prefix: list(prefix)?,
                repeat: Box::new((*repeat).try_into()?),
            },
            RawTerm::Shuffle { colours } => {
                if colours.is_empty() {
                    return Err(TermError::EmptyShuffle);
                }
                OrderTerm::Shuffle(colours)
            }
        })
    }
}

impl From<OrderTerm> for RawTerm {
    fn from(t: OrderTerm) -> RawTerm {
        let list = |v: Vec<OrderTerm>| v.into_iter().map(RawTerm::from).collect();
        match t {
            OrderTerm::Empty => RawTerm::Empty,
            OrderTerm::One(colour) => RawTerm::One { colour },
            OrderTerm::Ord { a, tint } => RawTerm::Ord {
                cnf: CnfInput::Terms(a.terms().to_vec()),
                tint,
            },
            OrderTerm::Rev(x) => RawTerm::Rev {
                arg: Box::new((*x).into()),
            },
            OrderTerm::Sum(ts) => RawTerm::Sum { args: list(ts) },
            OrderTerm::OmegaSum { prefix, repeat } => RawTerm::OmegaSum {
                prefix: list(prefix),
                repeat: Box::new((*repeat).into()),
            },
            OrderTerm::Shuffle(colours) => RawTerm::Shuffle { colours },
        }
    }
}

// ---------------------------------------------------------------------------
// Constructors and normalization

impl OrderTerm {
    pub fn one() -> OrderTerm {
        OrderTerm::One(None)
    }

    pub fn ord(a: Ordinal) -> OrderTerm {
        ord_norm(a, None)
    }

    pub fn finite(n: u64) -> OrderTerm {
        OrderTerm::ord(Ordinal::from(n))
    }

    pub fn shuffle(colours: impl IntoIterator<Item = u32>) -> Result<OrderTerm, TermError> {
        let c: BTreeSet<u32> = colours.into_iter().collect();
        if c.is_empty() {
            return Err(TermError::EmptyShuffle);
        }
        Ok(OrderTerm::Shuffle(c))
    }

    /// Normalized sum.
    pub fn sum(ts: impl IntoIterator<Item = OrderTerm>) -> OrderTerm {
        from_items(norm_items(ts.into_iter().map(|t| t.normalize())))
    }

    /// Normalized reversal.
    pub fn rev(t: OrderTerm) -> OrderTerm {
        rev_norm(t.normalize())
    }

    /// Normalized `prefix + repeat·ω`.
    pub fn omega_sum(prefix: Vec<OrderTerm>, repeat: OrderTerm) -> OrderTerm {
        OrderTerm::OmegaSum {
            prefix,
            repeat: Box::new(repeat),
        }
        .normalize()
    }

    /// Canonical form: sums flattened, empty parts dropped, reversal pushed
    /// through sums, adjacent ordinal blocks merged, and ω-sums written as a
    /// sum ending in an ω-sum with empty prefix. Idempotent.
    pub fn normalize(&self) -> OrderTerm {
        match self {
            OrderTerm::Empty => OrderTerm::Empty,
            OrderTerm::One(c) => OrderTerm::One(*c),
            OrderTerm::Ord { a, tint } => ord_norm(a.clone(), *tint),
            OrderTerm::Rev(x) => rev_norm(x.normalize()),
            OrderTerm::Sum(ts) => from_items(norm_items(ts.iter().map(|t| t.normalize()))),
            OrderTerm::OmegaSum { prefix, repeat } => {
                let mut items: Vec<OrderTerm> = prefix.iter().map(|t| t.normalize()).collect();
                items.push(omega_norm(repeat.normalize()));
                from_items(norm_items(items))
            }
            OrderTerm::Shuffle(c) => OrderTerm::Shuffle(c.clone()),
        }
    }

    /// The term with every colour removed; shuffles keep one colour.
    pub fn strip_colours(&self) -> OrderTerm {
        match self {
            OrderTerm::Empty => OrderTerm::Empty,
            OrderTerm::One(_) => OrderTerm::One(None),
            OrderTerm::Ord { a, .. } => OrderTerm::Ord {
                a: a.clone(),
                tint: None,
            },
            OrderTerm::Rev(x) => OrderTerm::Rev(Box::new(x.strip_colours())),
            OrderTerm::Sum(ts) => OrderTerm::Sum(ts.iter().map(|t| t.strip_colours()).collect()),
            OrderTerm::OmegaSum { prefix, repeat } => OrderTerm::OmegaSum {
                prefix: prefix.iter().map(|t| t.strip_colours()).collect(),
                repeat: Box::new(repeat.strip_colours()),
            },
            OrderTerm::Shuffle(_) => OrderTerm::Shuffle(BTreeSet::from([0])),
        }
    }

    /// True iff the term denotes the empty order.
    pub fn is_void(&self) -> bool {
        match self {
            OrderTerm::Empty => true,
            OrderTerm::One(_) | OrderTerm::Shuffle(_) => false,
            OrderTerm::Ord { a, .. } => a.is_zero(),
            OrderTerm::Rev(x) => x.is_void(),
            OrderTerm::Sum(ts) => ts.iter().all(|t| t.is_void()),
            OrderTerm::OmegaSum { prefix, repeat } => {
                repeat.is_void() && prefix.iter().all(|t| t.is_void())
            }
        }
    }

    pub fn has_min(&self) -> bool {
        match self {
            OrderTerm::Empty | OrderTerm::Shuffle(_) => false,
            OrderTerm::One(_) => true,
            OrderTerm::Ord { a, .. } => !a.is_zero(),
            OrderTerm::Rev(x) => x.has_max(),
            OrderTerm::Sum(ts) => ts.iter().find(|t| !t.is_void()).is_some_and(|t| t.has_min()),
            OrderTerm::OmegaSum { prefix, repeat } => prefix
                .iter()
                .chain(std::iter::once(&**repeat))
                .find(|t| !t.is_void())
                .is_some_and(|t| t.has_min()),
        }
    }

    pub fn has_max(&self) -> bool {
        match self {
            OrderTerm::Empty | OrderTerm::Shuffle(_) => false,
            OrderTerm::One(_) => true,
            OrderTerm::Ord { a, .. } => a.is_successor(),
            OrderTerm::Rev(x) => x.has_min(),
            OrderTerm::Sum(ts) => ts.iter().rev().find(|t| !t.is_void()).is_some_and(|t| t.has_max()),
            OrderTerm::OmegaSum { prefix, repeat } => {
                repeat.is_void()
                    && prefix.iter().rev().find(|t| !t.is_void()).is_some_and(|t| t.has_max())
            }
        }
    }

    /// Number of points, when finite.
    pub fn finite_size(&self) -> Option<u64> {
        match self {
            OrderTerm::Empty => Some(0),
            OrderTerm::One(_) => Some(1),
            OrderTerm::Ord { a, .. } => a.as_finite(),
            OrderTerm::Rev(x) => x.finite_size(),
            OrderTerm::Sum(ts) => ts.iter().map(|t| t.finite_size()).sum(),
            OrderTerm::OmegaSum { prefix, repeat } => {
                if repeat.is_void() {
                    prefix.iter().map(|t| t.finite_size()).sum()
                } else {
                    None
                }
            }
            OrderTerm::Shuffle(_) => None,
        }
    }
}

fn ord_norm(a: Ordinal, tint: Option<Tint>) -> OrderTerm {
    match a.as_finite() {
        Some(0) => OrderTerm::Empty,
        Some(1) => OrderTerm::One(tint.map(|t| t.first)),
        _ => OrderTerm::Ord { a, tint },
    }
}

fn from_items(mut v: Vec<OrderTerm>) -> OrderTerm {
    match v.len() {
        0 => OrderTerm::Empty,
        1 => v.pop().expect("one item"),
        _ => OrderTerm::Sum(v),
    }
}

/// Items of a normalized term viewed as a sum.
fn items_of(t: &OrderTerm) -> &[OrderTerm] {
    match t {
        OrderTerm::Sum(v) => v,
        OrderTerm::Empty => &[],
        other => std::slice::from_ref(other),
    }
}

fn norm_items(items: impl IntoIterator<Item = OrderTerm>) -> Vec<OrderTerm> {
    let mut out = Vec::new();
    for t in items {
        match t {
            OrderTerm::Empty => {}
            OrderTerm::Sum(xs) => {
                for x in xs {
                    push_item(&mut out, x);
                }
            }
            x => push_item(&mut out, x),
        }
    }
    out
}

fn push_item(out: &mut Vec<OrderTerm>, y: OrderTerm) {
    if let OrderTerm::OmegaSum { prefix, repeat } = &y {
        if prefix.is_empty() {
            let unit = items_of(repeat);
            while !unit.is_empty() && out.ends_with(unit) {
                out.truncate(out.len() - unit.len());
            }
        }
    }
    if let OrderTerm::Shuffle(c) = &y {
        match out.as_slice() {
            [.., OrderTerm::Shuffle(d)] if d == c => return,
            [.., OrderTerm::Shuffle(d), OrderTerm::One(Some(k))] if d == c && c.contains(k) => {
                out.pop();
                return;
            }
            _ => {}
        }
    }
    if let Some(x) = out.last() {
        if let Some(m) = merge_blocks(x, &y) {
            out.pop();
            if !m.is_void() {
                push_item(out, m);
            }
            return;
        }
    }
    out.push(y);
}

/// An uncoloured ordinal block read forwards or backwards.
fn block(t: &OrderTerm) -> Option<(&Ordinal, bool)> {
    static ONE: std::sync::OnceLock<Ordinal> = std::sync::OnceLock::new();
    match t {
        OrderTerm::One(None) => Some((ONE.get_or_init(Ordinal::one), false)),
        OrderTerm::Ord { a, tint: None } => Some((a, false)),
        OrderTerm::Rev(x) => match &**x {
            OrderTerm::Ord { a, tint: None } => Some((a, true)),
            _ => None,
        },
        _ => None,
    }
}

fn merge_blocks(x: &OrderTerm, y: &OrderTerm) -> Option<OrderTerm> {
    let (a, a_back) = block(x)?;
    let (b, b_back) = block(y)?;
    let (af, bf) = (a.is_finite(), b.is_finite());
    if (!a_back || af) && (!b_back || bf) {
        Some(ord_norm(a.add(b), None))
    } else if (a_back || af) && (b_back || bf) {
        Some(rev_ordinal(b.add(a)))
    } else {
        None
    }
}

fn rev_ordinal(a: Ordinal) -> OrderTerm {
    if a.is_finite() {
        ord_norm(a, None)
    } else {
        OrderTerm::Rev(Box::new(OrderTerm::Ord { a, tint: None }))
    }
}

/// Reversal of a normalized term.
fn rev_norm(x: OrderTerm) -> OrderTerm {
    match x {
        OrderTerm::Empty | OrderTerm::One(_) | OrderTerm::Shuffle(_) => x,
        OrderTerm::Rev(y) => *y,
        OrderTerm::Sum(items) => from_items(norm_items(items.into_iter().rev().map(rev_norm))),
        OrderTerm::Ord { a, tint } if a.is_finite() => OrderTerm::Ord {
            a,
            tint: tint.map(|t| Tint {
                first: t.last,
                last: t.first,
                ..t
            }),
        },
        other => OrderTerm::Rev(Box::new(other)),
    }
}

/// `r·ω` for a normalized `r`.
fn omega_norm(r: OrderTerm) -> OrderTerm {
    match r {
        OrderTerm::Empty => OrderTerm::Empty,
        OrderTerm::One(None) => OrderTerm::Ord {
            a: Ordinal::omega(),
            tint: None,
        },
        OrderTerm::Ord { a, tint: None } => OrderTerm::Ord {
            a: Ordinal::omega_pow(a.leading_exponent().expect("nonzero").succ()),
            tint: None,
        },
        OrderTerm::Shuffle(c) => OrderTerm::Shuffle(c),
        other => OrderTerm::OmegaSum {
            prefix: Vec::new(),
            repeat: Box::new(other),
        },
    }
}

// ---------------------------------------------------------------------------
// Rank

/// Top level and multiplicity of a nonempty scattered term.
///
/// The rank is `1 + ⌊log₂ m⌋` at level 0 and `ω·ρ + ⌊log₂ m⌋` at level
/// `ρ ≥ 1`. A point has level 0; `r·ω` has level one above `r`; an ordinal
/// `ω^e·c + …` has level `e` and multiplicity `c`; a sum keeps the highest
/// level and adds the multiplicities at that level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankProfile {
    pub level: Ordinal,
    pub multiplicity: u64,
}

impl RankProfile {
    fn combine(a: Option<RankProfile>, b: Option<RankProfile>) -> Option<RankProfile> {
        match (a, b) {
            (None, x) | (x, None) => x,
            (Some(a), Some(b)) => Some(match a.level.cmp(&b.level) {
                Ordering::Less => b,
                Ordering::Greater => a,
                Ordering::Equal => RankProfile {
                    level: a.level,
                    multiplicity: a.multiplicity.saturating_add(b.multiplicity),
                },
            }),
        }
    }

    pub fn rank(&self) -> Ordinal {
        let log = Ordinal::from(63 - u64::from(self.multiplicity.leading_zeros()));
        if self.level.is_zero() {
            Ordinal::one().add(&log)
        } else {
            self.level.omega_times().add(&log)
        }
    }
}

/// `None` for the empty order.
pub fn rank_profile(t: &OrderTerm) -> Result<Option<RankProfile>, TermError> {
    Ok(match t {
        OrderTerm::Empty => None,
        OrderTerm::One(_) => Some(RankProfile {
            level: Ordinal::zero(),
            multiplicity: 1,
        }),
        OrderTerm::Ord { a, .. } => a.leading().map(|(e, c)| RankProfile {
            level: e.clone(),
            multiplicity: *c,
        }),
        OrderTerm::Rev(x) => rank_profile(x)?,
        OrderTerm::Sum(ts) => {
            let mut acc = None;
            for t in ts {
                acc = RankProfile::combine(acc, rank_profile(t)?);
            }
            acc
        }
        OrderTerm::OmegaSum { prefix, repeat } => {
            let mut acc = rank_profile(repeat)?.map(|p| RankProfile {
                level: p.level.succ(),
                multiplicity: 1,
            });
            for t in prefix {
                acc = RankProfile::combine(acc, rank_profile(t)?);
            }
            acc
        }
        OrderTerm::Shuffle(_) => return Err(TermError::NotScattered),
    })
}

/// The doubling rank: at least `β+1` iff some cut leaves both sides of
/// rank at least `β`. Exceeding `budget` reports `budget + 1` as a bound.
pub fn dp(t: &OrderTerm, budget: Option<&Ordinal>) -> Result<Ordinal, TermError> {
    let rank = rank_profile(t)?.map_or_else(Ordinal::zero, |p| p.rank());
    match budget {
        Some(b) if rank > *b => Err(TermError::BudgetExceeded {
            lower_bound: b.succ(),
        }),
        _ => Ok(rank),
    }
}

pub fn is_scattered(t: &OrderTerm) -> bool {
    match t {
        OrderTerm::Empty | OrderTerm::One(_) | OrderTerm::Ord { .. } => true,
        OrderTerm::Rev(x) => is_scattered(x),
        OrderTerm::Sum(ts) => ts.iter().all(is_scattered),
        OrderTerm::OmegaSum { prefix, repeat } => {
            prefix.iter().all(is_scattered) && (repeat.is_void() || is_scattered(repeat))
        }
        OrderTerm::Shuffle(_) => false,
    }
}

/// A finite coloured linear order; points are listed in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteOrder {
    pub colours: Vec<Option<u32>>,
}

impl FiniteOrder {
    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }
}

pub const BRUTE_DP_MAX: usize = 256;

/// Rank of a finite order by recursion over every cut of every interval.
pub fn brute_dp(order: &FiniteOrder) -> Result<u64, TermError> {
    let n = order.len();
    if n > BRUTE_DP_MAX {
        return Err(TermError::TooLarge {
            size: n,
            max: BRUTE_DP_MAX,
        });
    }
    // memo[l][r]: rank of the interval [l, r).
    let mut memo = vec![vec![0u64; n + 1]; n + 1];
    for len in 1..=n {
        for l in 0..=n - len {
            let r = l + len;
            let mut best = 1;
            for k in l + 1..r {
                best = best.max(memo[l][k].min(memo[k][r]) + 1);
            }
            memo[l][r] = best;
        }
    }
    Ok(memo[0][n])
}

// ---------------------------------------------------------------------------
// Points

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Local {
    /// The point of a `One`.
    Leaf,
    /// A position in an `Ord`.
    Ordinal(Ordinal),
    /// The dyadic rational `num / 2^level` of a `Shuffle`.
    Dyadic { num: u64, level: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub path: Vec<u32>,
    pub local: Local,
}

const MAX_DYADIC_LEVEL: u32 = 62;

/// Index of a dyadic rational in the level-by-level enumeration.
pub fn dyadic_index(num: u64, level: u32) -> u64 {
    (1u64 << (level - 1)) - 1 + (num - 1) / 2
}

/// The `k`-th dyadic rational as `(num, level)`.
pub fn dyadic_at(k: u64) -> (u64, u32) {
    let level = 64 - (k + 1).leading_zeros();
    let num = 2 * (k + 1 - (1u64 << (level - 1))) + 1;
    (num, level)
}

fn check_dyadic(num: u64, level: u32) -> Result<(), String> {
    if level == 0 || level > MAX_DYADIC_LEVEL {
        return Err(format!("dyadic level {level} is outside 1..={MAX_DYADIC_LEVEL}"));
    }
    if num % 2 == 0 || num >= 1u64 << level {
        return Err(format!("{num}/2^{level} is not a reduced dyadic in (0, 1)"));
    }
    Ok(())
}

fn cmp_dyadic(a: (u64, u32), b: (u64, u32)) -> Ordering {
    let top = a.1.max(b.1);
    let x = (a.0 as u128) << (top - a.1);
    let y = (b.0 as u128) << (top - b.1);
    x.cmp(&y)
}

fn shuffle_colour(c: &BTreeSet<u32>, num: u64, level: u32) -> u32 {
    let k = dyadic_index(num, level) % c.len() as u64;
    *c.iter().nth(k as usize).expect("nonempty")
}

/// Subterm reached by one path step.
fn step<'a>(t: &'a OrderTerm, s: u32) -> Option<&'a OrderTerm> {
    match t {
        OrderTerm::Rev(x) if s == 0 => Some(x),
        OrderTerm::Sum(ts) => ts.get(s as usize),
        OrderTerm::OmegaSum { prefix, repeat } => Some(prefix.get(s as usize).unwrap_or(repeat)),
        _ => None,
    }
}

/// The chain of subterms along a path, root first.
fn descend<'a>(t: &'a OrderTerm, path: &[u32]) -> Option<Vec<&'a OrderTerm>> {
    let mut chain = vec![t];
    let mut cur = t;
    for &s in path {
        cur = step(cur, s)?;
        chain.push(cur);
    }
    Some(chain)
}

fn invalid_point(reason: impl Into<String>) -> TermError {
    TermError::InvalidPoint {
        reason: reason.into(),
    }
}

/// The subterm holding a point, after checking that the point exists.
fn point_node<'a>(t: &'a OrderTerm, p: &Point) -> Result<&'a OrderTerm, TermError> {
    let chain = descend(t, &p.path).ok_or_else(|| invalid_point("path leaves the term"))?;
    let node = *chain.last().expect("root");
    match (node, &p.local) {
        (OrderTerm::One(_), Local::Leaf) => Ok(node),
        (OrderTerm::Ord { a, .. }, Local::Ordinal(g)) if g < a => Ok(node),
        (OrderTerm::Ord { a, .. }, Local::Ordinal(g)) => Err(invalid_point(format!("{g} is not below {a}"))),
        (OrderTerm::Shuffle(_), Local::Dyadic { num, level }) => {
            check_dyadic(*num, *level).map_err(invalid_point)?;
            Ok(node)
        }
        _ => Err(invalid_point("position does not match the subterm")),
    }
}

pub fn validate_point(t: &OrderTerm, p: &Point) -> Result<(), TermError> {
    point_node(t, p).map(|_| ())
}

pub fn point_colour(t: &OrderTerm, p: &Point) -> Result<Option<u32>, TermError> {
    Ok(match (point_node(t, p)?, &p.local) {
        (OrderTerm::One(c), _) => *c,
        (OrderTerm::Ord { a, tint }, Local::Ordinal(g)) => tint.map(|t| t.colour_at(a, g)),
        (OrderTerm::Shuffle(c), Local::Dyadic { num, level }) => Some(shuffle_colour(c, *num, *level)),
        _ => unreachable!("checked by point_node"),
    })
}

/// Order of two points of the same term.
pub fn compare_points(t: &OrderTerm, p: &Point, q: &Point) -> Result<Ordering, TermError> {
    point_node(t, p)?;
    point_node(t, q)?;
    Ok(compare_unchecked(t, p, q))
}

pub(crate) fn compare_unchecked(t: &OrderTerm, p: &Point, q: &Point) -> Ordering {
    let mut flipped = false;
    let mut cur = t;
    for (i, (&a, &b)) in p.path.iter().zip(&q.path).enumerate() {
        if a != b {
            let o = a.cmp(&b);
            return if flipped { o.reverse() } else { o };
        }
        if matches!(cur, OrderTerm::Rev(_)) {
            flipped = !flipped;
        }
        cur = step(cur, a).unwrap_or_else(|| panic!("valid path at depth {i}"));
    }
    let o = match (&p.local, &q.local) {
        (Local::Ordinal(x), Local::Ordinal(y)) => x.cmp(y),
        (Local::Dyadic { num: a, level: l }, Local::Dyadic { num: b, level: m }) => {
            cmp_dyadic((*a, *l), (*b, *m))
        }
        _ => Ordering::Equal,
    };
    if flipped {
        o.reverse()
    } else {
        o
    }
}

fn prepend(s: u32, pts: Vec<Point>) -> impl Iterator<Item = Point> {
    pts.into_iter().map(move |mut p| {
        p.path.insert(0, s);
        p
    })
}

/// The first `n` points of `t` in the fixed dovetailed enumeration: sums
/// take one point from each summand in turn, ω-sums walk the diagonals of
/// (component, index), ordinals are listed by norm and shuffles by dyadic
/// level. Returns every point when `t` has fewer than `n`.
pub fn enumerate_points(t: &OrderTerm, n: usize) -> Vec<Point> {
    if n == 0 {
        return Vec::new();
    }
    match t {
        OrderTerm::Empty => Vec::new(),
        OrderTerm::One(_) => vec![Point {
            path: Vec::new(),
            local: Local::Leaf,
        }],
        OrderTerm::Ord { a, .. } => Ordinal::enumerate_below(a, n)
            .into_iter()
            .map(|g| Point {
                path: Vec::new(),
                local: Local::Ordinal(g),
            })
            .collect(),
        OrderTerm::Rev(x) => prepend(0, enumerate_points(x, n)).collect(),
        OrderTerm::Shuffle(_) => (0..n as u64)
            .map(|k| {
                let (num, level) = dyadic_at(k);
                Point {
                    path: Vec::new(),
                    local: Local::Dyadic { num, level },
                }
            })
            .collect(),
        OrderTerm::Sum(ts) => {
            let lists: Vec<Vec<Point>> = ts.iter().map(|c| enumerate_points(c, n)).collect();
            let mut out = Vec::with_capacity(n);
            let longest = lists.iter().map(Vec::len).max().unwrap_or(0);
            'rounds: for r in 0..longest {
                for (i, l) in lists.iter().enumerate() {
                    if let Some(p) = l.get(r) {
                        let mut p = p.clone();
                        p.path.insert(0, i as u32);
                        out.push(p);
                        if out.len() == n {
                            break 'rounds;
                        }
                    }
                }
            }
            out
        }
        OrderTerm::OmegaSum { prefix, repeat } => {
            let lists: Vec<Vec<Point>> = prefix.iter().map(|c| enumerate_points(c, n)).collect();
            let unit = enumerate_points(repeat, n);
            if unit.is_empty() {
                let as_sum = OrderTerm::Sum(prefix.clone());
                return enumerate_points(&as_sum, n);
            }
            let mut out = Vec::with_capacity(n);
            let mut d = 0usize;
            while out.len() < n {
                for c in 0..=d {
                    let list = lists.get(c).unwrap_or(&unit);
                    if let Some(p) = list.get(d - c) {
                        let mut p = p.clone();
                        p.path.insert(0, c as u32);
                        out.push(p);
                        if out.len() == n {
                            break;
                        }
                    }
                }
                d += 1;
            }
            out
        }
    }
}

/// Finite suborder induced on a probe set, with its points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realization {
    pub points: Vec<Point>,
    pub order: FiniteOrder,
}

pub const DEFAULT_REALIZE_CAP: usize = 1 << 16;

/// The suborder on the first `n` enumerated points, sorted.
pub fn finite_realize(t: &OrderTerm, n: usize, cap: usize) -> Result<Realization, TermError> {
    if n > cap {
        return Err(TermError::CapExceeded { n, cap });
    }
    let mut points = enumerate_points(t, n);
    points.sort_by(|p, q| compare_unchecked(t, p, q));
    let colours = points
        .iter()
        .map(|p| point_colour(t, p).expect("enumerated points are valid"))
        .collect();
    Ok(Realization {
        points,
        order: FiniteOrder { colours },
    })
}

// ---------------------------------------------------------------------------
// Cuts and characters

/// What lies on one side of a cut or point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Void,
    /// Nonempty with an element next to the cut.
    Closed,
    /// Nonempty, no element next to the cut.
    Open,
}

fn side_of(nonempty_closed: Option<bool>) -> Option<Side> {
    nonempty_closed.map(|c| if c { Side::Closed } else { Side::Open })
}

fn left_of_children<'a>(mut before: impl DoubleEndedIterator<Item = &'a OrderTerm>) -> Option<Side> {
    before.rfind(|t| !t.is_void()).map(|t| if t.has_max() { Side::Closed } else { Side::Open })
}

fn right_of_children<'a>(mut after: impl Iterator<Item = &'a OrderTerm>) -> Option<Side> {
    after.find(|t| !t.is_void()).map(|t| if t.has_min() { Side::Closed } else { Side::Open })
}

/// Resolves the sides of a location whose local sides (in the orientation of
/// the deepest subterm) are given, `None` meaning nothing locally.
fn resolve(chain: &[&OrderTerm], path: &[u32], mut left: Option<Side>, mut right: Option<Side>) -> (Side, Side) {
    for (node, &s) in chain.iter().zip(path).rev() {
        match node {
            OrderTerm::Rev(_) => std::mem::swap(&mut left, &mut right),
            OrderTerm::Sum(ts) => {
                let i = s as usize;
                if left.is_none() {
                    left = left_of_children(ts[..i].iter());
                }
                if right.is_none() {
                    right = right_of_children(ts[i + 1..].iter());
                }
            }
            OrderTerm::OmegaSum { prefix, repeat } => {
                let i = s as usize;
                let plen = prefix.len();
                let live = !repeat.is_void();
                if left.is_none() {
                    left = if i > plen && live {
                        side_of(Some(repeat.has_max()))
                    } else {
                        left_of_children(prefix[..i.min(plen)].iter())
                    };
                }
                if right.is_none() {
                    let rest = if i + 1 < plen { &prefix[i + 1..] } else { &[][..] };
                    right = right_of_children(rest.iter().chain(std::iter::once(&**repeat)));
                }
            }
            _ => unreachable!("leaf subterms have no steps"),
        }
    }
    (left.unwrap_or(Side::Void), right.unwrap_or(Side::Void))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PointSide {
    Before,
    After,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CutAt {
    /// Before every point of the subterm.
    Start,
    /// After every point of the subterm.
    End,
    /// In an `Ord` subterm, between the positions below and from `γ` on.
    Ordinal(Ordinal),
    /// In a `Shuffle` subterm, next to a dyadic point.
    Point { num: u64, level: u32, side: PointSide },
}

/// A cut `t = L + R`, located at a subterm.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cut {
    pub path: Vec<u32>,
    pub at: CutAt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CutCase {
    I0HasLast,
    I0Empty,
    I1HasFirst,
    I1Empty,
    BothOmega,
}

fn invalid_cut(reason: impl Into<String>) -> TermError {
    TermError::InvalidCut {
        reason: reason.into(),
    }
}

fn cut_sides(t: &OrderTerm, c: &Cut) -> Result<(Side, Side), TermError> {
    let chain = descend(t, &c.path).ok_or_else(|| invalid_cut("path leaves the term"))?;
    let node = *chain.last().expect("root");
    let whole = |closed: bool| (!node.is_void()).then_some(if closed { Side::Closed } else { Side::Open });
    let (l, r) = match (&c.at, node) {
        (CutAt::Start, _) => (None, whole(node.has_min())),
        (CutAt::End, _) => (whole(node.has_max()), None),
        (CutAt::Ordinal(g), OrderTerm::Ord { a, .. }) => {
            if g > a {
                return Err(invalid_cut(format!("{g} exceeds {a}")));
            }
            let left = if g.is_zero() {
                None
            } else if g.is_limit() {
                Some(Side::Open)
            } else {
                Some(Side::Closed)
            };
            (left, (g != a).then_some(Side::Closed))
        }
        (CutAt::Point { num, level, side }, OrderTerm::Shuffle(_)) => {
            check_dyadic(*num, *level).map_err(invalid_cut)?;
            match side {
                PointSide::Before => (Some(Side::Open), Some(Side::Closed)),
                PointSide::After => (Some(Side::Closed), Some(Side::Open)),
            }
        }
        _ => return Err(invalid_cut("position does not match the subterm")),
    };
    Ok(resolve(&chain, &c.path, l, r))
}

/// The cases holding at a cut `(I0, I1)`. An empty side is reported alone:
/// `I0Empty` (and `I1Empty` for the empty order) excludes the other cases.
pub fn classify_cut(t: &OrderTerm, c: &Cut) -> Result<BTreeSet<CutCase>, TermError> {
    let (l, r) = cut_sides(t, c)?;
    let mut out = BTreeSet::new();
    if l == Side::Void || r == Side::Void {
        if l == Side::Void {
            out.insert(CutCase::I0Empty);
        }
        if r == Side::Void {
            out.insert(CutCase::I1Empty);
        }
        return Ok(out);
    }
    if l == Side::Closed {
        out.insert(CutCase::I0HasLast);
    }
    if r == Side::Closed {
        out.insert(CutCase::I1HasFirst);
    }
    if l == Side::Open && r == Side::Open {
        out.insert(CutCase::BothOmega);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LeftChar {
    EndpointMin,
    Successor,
    OmegaLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RightChar {
    EndpointMax,
    Predecessor,
    OmegaColimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character {
    pub left: LeftChar,
    pub right: RightChar,
}

impl Character {
    /// Colour index `3·left + right`.
    pub fn index(&self) -> u32 {
        3 * self.left as u32 + self.right as u32
    }

    pub fn from_index(i: u32) -> Option<Character> {
        let left = [LeftChar::EndpointMin, LeftChar::Successor, LeftChar::OmegaLimit];
        let right = [RightChar::EndpointMax, RightChar::Predecessor, RightChar::OmegaColimit];
        (i < 9).then(|| Character {
            left: left[(i / 3) as usize],
            right: right[(i % 3) as usize],
        })
    }

    /// The character of the same point in the reversed order.
    pub fn swapped(&self) -> Character {
        Character {
            left: match self.right {
                RightChar::EndpointMax => LeftChar::EndpointMin,
                RightChar::Predecessor => LeftChar::Successor,
                RightChar::OmegaColimit => LeftChar::OmegaLimit,
            },
            right: match self.left {
                LeftChar::EndpointMin => RightChar::EndpointMax,
                LeftChar::Successor => RightChar::Predecessor,
                LeftChar::OmegaLimit => RightChar::OmegaColimit,
            },
        }
    }

    fn of(l: Side, r: Side) -> Character {
        Character {
            left: match l {
                Side::Void => LeftChar::EndpointMin,
                Side::Closed => LeftChar::Successor,
                Side::Open => LeftChar::OmegaLimit,
            },
            right: match r {
                Side::Void => RightChar::EndpointMax,
                Side::Closed => RightChar::Predecessor,
                Side::Open => RightChar::OmegaColimit,
            },
        }
    }
}

pub fn character_at(t: &OrderTerm, p: &Point) -> Result<Character, TermError> {
    let node = point_node(t, p)?;
    let (l, r) = match (node, &p.local) {
        (OrderTerm::Ord { a, .. }, Local::Ordinal(g)) => {
            let left = if g.is_zero() {
                None
            } else if g.is_limit() {
                Some(Side::Open)
            } else {
                Some(Side::Closed)
            };
            let right = (g.succ() != *a).then_some(Side::Closed);
            (left, right)
        }
        (OrderTerm::Shuffle(_), _) => (Some(Side::Open), Some(Side::Open)),
        _ => (None, None),
    };
    let chain = descend(t, &p.path).expect("checked");
    let (l, r) = resolve(&chain, &p.path, l, r);
    Ok(Character::of(l, r))
}

// ---------------------------------------------------------------------------
// Canonical colouring

fn pair(l: Side, r: Side, flipped: bool) -> u32 {
    if flipped {
        Character::of(r, l).index()
    } else {
        Character::of(l, r).index()
    }
}

fn after(t: &OrderTerm) -> Side {
    if t.has_max() {
        Side::Closed
    } else {
        Side::Open
    }
}

fn before(t: &OrderTerm) -> Side {
    if t.has_min() {
        Side::Closed
    } else {
        Side::Open
    }
}

/// Colours every point of `t` by its character, given what lies to the
/// left and right of `t` in its own orientation.
fn colour_in(t: &OrderTerm, l: Side, r: Side, flipped: bool) -> OrderTerm {
    match t {
        OrderTerm::Empty => OrderTerm::Empty,
        OrderTerm::One(_) => OrderTerm::One(Some(pair(l, r, flipped))),
        OrderTerm::Ord { a, .. } => {
            if a.is_zero() {
                return OrderTerm::Empty;
            }
            if a.as_finite() == Some(1) {
                return OrderTerm::One(Some(pair(l, r, flipped)));
            }
            let successor = pair(Side::Closed, Side::Closed, flipped);
            let last = match a.pred() {
                Some(p) if p.is_limit() => pair(Side::Open, r, flipped),
                Some(_) => pair(Side::Closed, r, flipped),
                None => successor,
            };
            OrderTerm::Ord {
                a: a.clone(),
                tint: Some(Tint {
                    first: pair(l, Side::Closed, flipped),
                    successor,
                    limit: pair(Side::Open, Side::Closed, flipped),
                    last,
                }),
            }
        }
        OrderTerm::Rev(x) => OrderTerm::Rev(Box::new(colour_in(x, r, l, !flipped))),
        OrderTerm::Sum(ts) => OrderTerm::Sum(colour_list(ts, l, Some(r), flipped)),
        OrderTerm::OmegaSum { prefix, repeat } => {
            if repeat.is_void() {
                return OrderTerm::Sum(colour_list(prefix, l, Some(r), flipped));
            }
            let mut items = colour_list(prefix, l, None, flipped);
            let copy_right = before(repeat);
            let first_left = prefix.iter().rev().find(|t| !t.is_void()).map_or(l, after);
            items.push(colour_in(repeat, first_left, copy_right, flipped));
            items.push(OrderTerm::OmegaSum {
                prefix: Vec::new(),
                repeat: Box::new(colour_in(repeat, after(repeat), copy_right, flipped)),
            });
            OrderTerm::Sum(items)
        }
        OrderTerm::Shuffle(_) => OrderTerm::Shuffle(BTreeSet::from([pair(Side::Open, Side::Open, flipped)])),
    }
}

/// Colours a list of summands; `r = None` means an ω-sum of a nonempty
/// term follows, whose first copy starts on the right.
fn colour_list(ts: &[OrderTerm], l: Side, r: Option<Side>, flipped: bool) -> Vec<OrderTerm> {
    let live: Vec<usize> = (0..ts.len()).filter(|&i| !ts[i].is_void()).collect();
    let mut out = Vec::with_capacity(live.len());
    for (k, &i) in live.iter().enumerate() {
        let left = if k == 0 { l } else { after(&ts[live[k - 1]]) };
        let right = match live.get(k + 1) {
            Some(&j) => before(&ts[j]),
            None => r.unwrap_or(Side::Open),
        };
        out.push(colour_in(&ts[i], left, right, flipped));
    }
    out
}

/// Colours every point by the index of its character. Input colours are
/// ignored. The result is normalized, and the operation is idempotent.
pub fn canonical_colouring(t: &OrderTerm) -> OrderTerm {
    let base = t.strip_colours().normalize();
    colour_in(&base, Side::Void, Side::Void, false).normalize()
}

// ---------------------------------------------------------------------------
// Splitting

fn ord_slice(a: &Ordinal, tint: Option<Tint>, from: &Ordinal, to: &Ordinal) -> OrderTerm {
    let len = Ordinal::left_subtract(from, to).expect("from <= to");
    let tint = tint.map(|t| Tint {
        first: t.colour_at(a, from),
        successor: t.successor,
        limit: t.limit,
        last: to.pred().map_or(t.successor, |p| t.colour_at(a, &p)),
    });
    ord_norm(len, tint)
}

fn split_rec(
    t: &OrderTerm,
    path: &[u32],
    leaf: &dyn Fn(&OrderTerm) -> Result<(OrderTerm, OrderTerm), TermError>,
) -> Result<(OrderTerm, OrderTerm), TermError> {
    let Some((&s, rest)) = path.split_first() else {
        return leaf(t);
    };
    let bad = || invalid_cut("path leaves the term");
    match t {
        OrderTerm::Rev(x) if s == 0 => {
            let (l, r) = split_rec(x, rest, leaf)?;
            Ok((OrderTerm::Rev(Box::new(r)), OrderTerm::Rev(Box::new(l))))
        }
        OrderTerm::Sum(ts) => {
            let i = s as usize;
            let child = ts.get(i).ok_or_else(bad)?;
            let (l, r) = split_rec(child, rest, leaf)?;
            let mut left = ts[..i].to_vec();
            left.push(l);
            let mut right = vec![r];
            right.extend_from_slice(&ts[i + 1..]);
            Ok((OrderTerm::Sum(left), OrderTerm::Sum(right)))
        }
        OrderTerm::OmegaSum { prefix, repeat } => {
            let i = s as usize;
            let plen = prefix.len();
            let child = prefix.get(i).unwrap_or(repeat);
            let (l, r) = split_rec(child, rest, leaf)?;
            let (left, right_prefix) = if i < plen {
                let mut left = prefix[..i].to_vec();
                left.push(l);
                let mut rp = vec![r];
                rp.extend_from_slice(&prefix[i + 1..]);
                (left, rp)
            } else {
                let mut left = prefix.clone();
                left.extend(std::iter::repeat_n((**repeat).clone(), i - plen));
                left.push(l);
                (left, vec![r])
            };
            Ok((
                OrderTerm::Sum(left),
                OrderTerm::OmegaSum {
                    prefix: right_prefix,
                    repeat: repeat.clone(),
                },
            ))
        }
        _ => Err(bad()),
    }
}

/// The two sides `(L, R)` of a cut, normalized.
pub fn split_at_cut(t: &OrderTerm, c: &Cut) -> Result<(OrderTerm, OrderTerm), TermError> {
    cut_sides(t, c)?;
    let at = c.at.clone();
    let leaf = move |node: &OrderTerm| -> Result<(OrderTerm, OrderTerm), TermError> {
        Ok(match (&at, node) {
            (CutAt::Start, _) => (OrderTerm::Empty, node.clone()),
            (CutAt::End, _) => (node.clone(), OrderTerm::Empty),
            (CutAt::Ordinal(g), OrderTerm::Ord { a, tint }) => (
                ord_slice(a, *tint, &Ordinal::zero(), g),
                ord_slice(a, *tint, g, a),
            ),
            (CutAt::Point { num, level, side }, OrderTerm::Shuffle(c)) => {
                let pt = OrderTerm::One(Some(shuffle_colour(c, *num, *level)));
                let sh = OrderTerm::Shuffle(c.clone());
                match side {
                    PointSide::Before => (sh.clone(), OrderTerm::Sum(vec![pt, sh])),
                    PointSide::After => (OrderTerm::Sum(vec![sh.clone(), pt]), sh),
                }
            }
            _ => unreachable!("checked by cut_sides"),
        })
    };
    let (l, r) = split_rec(t, &c.path, &leaf)?;
    Ok((l.normalize(), r.normalize()))
}

/// The parts strictly below and strictly above a point, normalized.
pub fn split_at_point(t: &OrderTerm, p: &Point) -> Result<(OrderTerm, OrderTerm), TermError> {
    point_node(t, p)?;
    let local = p.local.clone();
    let leaf = move |node: &OrderTerm| -> Result<(OrderTerm, OrderTerm), TermError> {
        Ok(match (&local, node) {
            (Local::Ordinal(g), OrderTerm::Ord { a, tint }) => (
                ord_slice(a, *tint, &Ordinal::zero(), g),
                ord_slice(a, *tint, &g.succ(), a),
            ),
            (Local::Dyadic { .. }, OrderTerm::Shuffle(c)) => {
                (OrderTerm::Shuffle(c.clone()), OrderTerm::Shuffle(c.clone()))
            }
            _ => (OrderTerm::Empty, OrderTerm::Empty),
        })
    };
    let (l, r) = split_rec(t, &p.path, &leaf)?;
    Ok((l.normalize(), r.normalize()))
}
