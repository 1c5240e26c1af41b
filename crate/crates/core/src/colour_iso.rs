//! Back-and-forth construction of isomorphisms between lazily presented
//! countable coloured orders.
//!
//! A presentation enumerates its points; a token is an enumeration index.
//! The engine alternates forward steps (place the next point of `A`) and
//! backward steps (find a preimage for the next point of `B`). Each step
//! locates the target between the pairs already matched and takes the
//! unused point of the other side in the matching interval, at the same
//! relative position as far as the window shows, with the same colour (and the same character, when both sides know it).
//!
//! Infinite presentations are explored inside a finite window, so a failed
//! search is a certificate only when the passive side is finite.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::order_term::{
    character_at, compare_unchecked, dyadic_at, enumerate_points, point_colour, Character, OrderTerm, Point,
};

pub trait PresentedOrder {
    /// Whether the enumeration has an `i`-th point.
    fn exists(&self, i: usize) -> bool;
    fn compare(&self, i: usize, j: usize) -> Ordering;
    fn colour(&self, i: usize) -> u32;
    /// Number of points, for finite orders.
    fn size(&self) -> Option<usize> {
        None
    }
    /// The set of colours used, when known.
    fn palette(&self) -> Option<BTreeSet<u32>> {
        None
    }
    fn character(&self, _i: usize) -> Option<Character> {
        None
    }
}

/// A term explored on its first `window` enumerated points.
pub struct TermPresentation {
    term: OrderTerm,
    points: Vec<Point>,
    colours: Vec<u32>,
    finite: bool,
}

impl TermPresentation {
    pub fn new(term: OrderTerm, window: usize) -> Self {
        let points = enumerate_points(&term, window);
        let colours = points
            .iter()
            .map(|p| point_colour(&term, p).expect("enumerated").unwrap_or(0))
            .collect();
        let finite = term.finite_size().is_some_and(|n| n as usize <= window);
        TermPresentation {
            term,
            points,
            colours,
            finite,
        }
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }
}

impl PresentedOrder for TermPresentation {
    fn exists(&self, i: usize) -> bool {
        i < self.points.len()
    }
    fn compare(&self, i: usize, j: usize) -> Ordering {
        compare_unchecked(&self.term, &self.points[i], &self.points[j])
    }
    fn colour(&self, i: usize) -> u32 {
        self.colours[i]
    }
    fn size(&self) -> Option<usize> {
        self.finite.then_some(self.points.len())
    }
    fn palette(&self) -> Option<BTreeSet<u32>> {
        match &self.term {
            OrderTerm::Shuffle(c) => Some(c.clone()),
            _ => None,
        }
    }
    fn character(&self, i: usize) -> Option<Character> {
        character_at(&self.term, &self.points[i]).ok()
    }
}

/// A finite coloured order listed in some enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePresentation {
    /// Colours by position.
    colours: Vec<u32>,
    /// Position of the `i`-th enumerated point.
    position: Vec<usize>,
}

impl FinitePresentation {
    pub fn new(colours: Vec<u32>) -> Self {
        let position = (0..colours.len()).collect();
        FinitePresentation { colours, position }
    }

    /// `order[i]` is the position of the `i`-th enumerated point.
    pub fn with_order(colours: Vec<u32>, order: Vec<usize>) -> Self {
        assert_eq!(colours.len(), order.len(), "one position per point");
        FinitePresentation {
            colours,
            position: order,
        }
    }

    pub fn position(&self, i: usize) -> usize {
        self.position[i]
    }
}

impl PresentedOrder for FinitePresentation {
    fn exists(&self, i: usize) -> bool {
        i < self.position.len()
    }
    fn compare(&self, i: usize, j: usize) -> Ordering {
        self.position[i].cmp(&self.position[j])
    }
    fn colour(&self, i: usize) -> u32 {
        self.colours[self.position[i]]
    }
    fn size(&self) -> Option<usize> {
        Some(self.position.len())
    }
    fn palette(&self) -> Option<BTreeSet<u32>> {
        Some(self.colours.iter().copied().collect())
    }
}

/// The dyadic rationals of `(0, 1)`, level by level with a seeded order
/// inside each level, each point coloured uniformly at random.
pub struct SeededShuffle {
    points: Vec<(u64, u32)>,
    colours: Vec<u32>,
    palette: BTreeSet<u32>,
}

impl SeededShuffle {
    pub const DEFAULT_WINDOW: usize = (1 << 16) - 1;

    pub fn new(palette: BTreeSet<u32>, seed: u64, window: usize) -> Self {
        assert!(!palette.is_empty(), "a shuffle needs a colour");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let choices: Vec<u32> = palette.iter().copied().collect();
        let mut points = Vec::with_capacity(window);
        let mut k = 0u64;
        while points.len() < window {
            let (_, level) = dyadic_at(k);
            let width = 1u64 << (level - 1);
            let mut row: Vec<(u64, u32)> = (0..width).map(|j| (2 * j + 1, level)).collect();
            row.shuffle(&mut rng);
            row.truncate(window - points.len());
            points.extend(row);
            k += width;
        }
        let colours = points
            .iter()
            .map(|_| choices[rng.gen_range(0..choices.len())])
            .collect();
        SeededShuffle {
            points,
            colours,
            palette,
        }
    }

    pub fn dyadic(&self, i: usize) -> (u64, u32) {
        self.points[i]
    }
}

impl PresentedOrder for SeededShuffle {
    fn exists(&self, i: usize) -> bool {
        i < self.points.len()
    }
    fn compare(&self, i: usize, j: usize) -> Ordering {
        let (a, l) = self.points[i];
        let (b, m) = self.points[j];
        let top = l.max(m);
        ((a as u128) << (top - l)).cmp(&((b as u128) << (top - m)))
    }
    fn colour(&self, i: usize) -> u32 {
        self.colours[i]
    }
    fn palette(&self) -> Option<BTreeSet<u32>> {
        Some(self.palette.clone())
    }
    fn character(&self, _i: usize) -> Option<Character> {
        Character::from_index(8)
    }
}

/// Pairs `(a, b)` of tokens, sorted by the order of `A`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialIso {
    pub pairs: Vec<(usize, usize)>,
}

impl PartialIso {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// Target in `A`, image searched in `B`.
    Forward,
    /// Target in `B`, preimage searched in `A`.
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Schedule {
    /// Round `n` targets point `⌊n/2⌋`, forward on even rounds.
    Alternating,
    /// Round `n = k² + j` targets point `⌊j/2⌋`, forward when `j` is even.
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoOptions {
    pub rounds: usize,
    pub schedule: Schedule,
    /// Points of each side inspected when choosing the anchor pairs.
    pub anchor_window: usize,
}

impl IsoOptions {
    pub fn rounds(rounds: usize) -> Self {
        IsoOptions {
            rounds,
            schedule: Schedule::Alternating,
            anchor_window: 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrderSide {
    A,
    B,
}

/// No point of `side` with `colour` fits where `target` must go.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    /// The side searched without success.
    pub side: OrderSide,
    /// The point being matched, on the other side.
    pub target: Option<usize>,
    /// Matched neighbours bounding the search on `side`.
    pub interval: (Option<usize>, Option<usize>),
    pub colour: u32,
    /// True when the search covered every point, so no isomorphism exists.
    pub certain: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub round: usize,
    pub direction: Direction,
    pub target: usize,
    pub placed: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoRun {
    pub iso: PartialIso,
    pub obstruction: Option<Obstruction>,
    pub trace: Vec<TraceEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum IsoError {
    #[error("precondition failed: {reason}")]
    PreconditionFailed { reason: String },
}

fn window_len(p: &dyn PresentedOrder) -> usize {
    if let Some(n) = p.size() {
        return n;
    }
    let mut hi = 1usize;
    while p.exists(hi) {
        hi *= 2;
    }
    let mut lo = hi / 2;
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if p.exists(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if p.exists(0) {
        lo + 1
    } else {
        0
    }
}

struct Engine<'a> {
    a: &'a dyn PresentedOrder,
    b: &'a dyn PresentedOrder,
    len_a: usize,
    len_b: usize,
    pairs: Vec<(usize, usize)>,
    used_a: HashSet<usize>,
    used_b: HashSet<usize>,
    sorted_a: Vec<usize>,
    rank_a: Vec<usize>,
    sorted_b: Vec<usize>,
    rank_b: Vec<usize>,
}

impl<'a> Engine<'a> {
    fn side(&self, s: OrderSide) -> (&'a dyn PresentedOrder, usize) {
        match s {
            OrderSide::A => (self.a, self.len_a),
            OrderSide::B => (self.b, self.len_b),
        }
    }

    fn token(pair: &(usize, usize), s: OrderSide) -> usize {
        match s {
            OrderSide::A => pair.0,
            OrderSide::B => pair.1,
        }
    }

    fn image(&self, x: usize, from: OrderSide) -> Option<usize> {
        self.pairs
            .iter()
            .find(|p| Self::token(p, from) == x)
            .map(|p| Self::token(p, other(from)))
    }

    fn insert(&mut self, a: usize, b: usize) {
        let at = self.pairs.partition_point(|&(x, _)| self.a.compare(x, a) == Ordering::Less);
        self.pairs.insert(at, (a, b));
        self.used_a.insert(a);
        self.used_b.insert(b);
    }

    /// Matches `x` of side `from`, or reports why it cannot be matched.
    fn place(&mut self, x: usize, from: OrderSide) -> Result<usize, Obstruction> {
        if let Some(y) = self.image(x, from) {
            return Ok(y);
        }
        let to = other(from);
        let (src, _) = self.side(from);
        let (dst, _) = self.side(to);
        let at = self
            .pairs
            .partition_point(|p| src.compare(Self::token(p, from), x) == Ordering::Less);
        let lo = at.checked_sub(1).map(|i| Self::token(&self.pairs[i], to));
        let hi = self.pairs.get(at).map(|p| Self::token(p, to));
        let colour = src.colour(x);
        let want = src.character(x);
        let (src_rank, dst_sorted, dst_rank) = match from {
            OrderSide::A => (&self.rank_a, &self.sorted_b, &self.rank_b),
            OrderSide::B => (&self.rank_b, &self.sorted_a, &self.rank_a),
        };
        let src_lo = at.checked_sub(1).map_or(0, |i| src_rank[Self::token(&self.pairs[i], from)] + 1);
        let src_hi = self.pairs.get(at).map_or(src_rank.len(), |p| src_rank[Self::token(p, from)]);
        let (below, total) = (src_rank[x] - src_lo, src_hi - src_lo);
        let room = &dst_sorted[lo.map_or(0, |l| dst_rank[l] + 1)..hi.map_or(dst_rank.len(), |h| dst_rank[h])];
        let fits = |y: usize| {
            dst.colour(y) == colour
                && match (want, dst.character(y)) {
                    (Some(w), Some(c)) => w == c,
                    _ => true,
                }
        };
        // Keep the relative position of the target inside its interval.
        let aim = if total == 0 { 0 } else { below * room.len() / total };
        let best = (0..room.len())
            .flat_map(|d| [aim.checked_add(d), aim.checked_sub(d + 1)])
            .flatten()
            .filter(|&k| k < room.len())
            .map(|k| room[k])
            .find(|&y| fits(y))
            .map(|y| ((), y));
        match best {
            Some((_, y)) => {
                match from {
                    OrderSide::A => self.insert(x, y),
                    OrderSide::B => self.insert(y, x),
                }
                Ok(y)
            }
            None => Err(Obstruction {
                side: to,
                target: Some(x),
                interval: (lo, hi),
                colour,
                certain: dst.size().is_some(),
            }),
        }
    }
}

fn other(s: OrderSide) -> OrderSide {
    match s {
        OrderSide::A => OrderSide::B,
        OrderSide::B => OrderSide::A,
    }
}

/// Target of round `n`.
fn scheduled(schedule: Schedule, n: usize) -> (Direction, usize) {
    let (j, base) = match schedule {
        Schedule::Alternating => (n, n),
        Schedule::Square => {
            let k = n.isqrt();
            (n - k * k, n - k * k)
        }
    };
    let dir = if j % 2 == 0 {
        Direction::Forward
    } else {
        Direction::Backward
    };
    (dir, base / 2)
}

/// Grows a partial isomorphism from `A` to `B` for `opts.rounds` rounds.
pub fn back_and_forth(a: &dyn PresentedOrder, b: &dyn PresentedOrder, opts: &IsoOptions) -> IsoRun {
    run(a, b, Vec::new(), opts, true)
}

fn run(
    a: &dyn PresentedOrder,
    b: &dyn PresentedOrder,
    initial: Vec<(usize, usize)>,
    opts: &IsoOptions,
    anchors: bool,
) -> IsoRun {
    let mut e = Engine {
        a,
        b,
        len_a: window_len(a),
        len_b: window_len(b),
        pairs: Vec::new(),
        used_a: HashSet::new(),
        used_b: HashSet::new(),
        sorted_a: Vec::new(),
        rank_a: Vec::new(),
        sorted_b: Vec::new(),
        rank_b: Vec::new(),
    };
    (e.sorted_a, e.rank_a) = sorted_window(a, e.len_a);
    (e.sorted_b, e.rank_b) = sorted_window(b, e.len_b);
    let mut trace = Vec::new();
    let finish = |e: Engine, trace, obstruction| IsoRun {
        iso: PartialIso { pairs: e.pairs },
        obstruction,
        trace,
    };
    for (x, y) in initial {
        e.insert(x, y);
    }
    if let Some(ob) = palette_obstruction(&e) {
        return finish(e, trace, Some(ob));
    }
    if a.size().is_some() || b.size().is_some() {
        return match finite_match(&mut e) {
            Ok(ranks) => {
                for n in 0..opts.rounds {
                    let (dir, i) = scheduled(opts.schedule, n);
                    let (len, from) = match dir {
                        Direction::Forward => (e.len_a, OrderSide::A),
                        Direction::Backward => (e.len_b, OrderSide::B),
                    };
                    if i >= len {
                        continue;
                    }
                    let y = match from {
                        OrderSide::A => ranks.0[i],
                        OrderSide::B => ranks.1[i],
                    };
                    if e.image(i, from).is_none() {
                        match from {
                            OrderSide::A => e.insert(i, y),
                            OrderSide::B => e.insert(y, i),
                        }
                    }
                    trace.push(TraceEntry {
                        round: n,
                        direction: dir,
                        target: i,
                        placed: Some(y),
                    });
                }
                finish(e, trace, None)
            }
            Err(ob) => finish(e, trace, Some(ob)),
        };
    }
    if anchors {
        if let Err(ob) = anchor(&mut e, opts.anchor_window) {
            return finish(e, trace, Some(ob));
        }
    }
    for n in 0..opts.rounds {
        let (dir, i) = scheduled(opts.schedule, n);
        let (len, from) = match dir {
            Direction::Forward => (e.len_a, OrderSide::A),
            Direction::Backward => (e.len_b, OrderSide::B),
        };
        if i >= len {
            continue;
        }
        match e.place(i, from) {
            Ok(y) => trace.push(TraceEntry {
                round: n,
                direction: dir,
                target: i,
                placed: Some(y),
            }),
            Err(ob) => {
                trace.push(TraceEntry {
                    round: n,
                    direction: dir,
                    target: i,
                    placed: None,
                });
                return finish(e, trace, Some(ob));
            }
        }
    }
    finish(e, trace, None)
}

fn palette_obstruction(e: &Engine) -> Option<Obstruction> {
    let (pa, pb) = (e.a.palette()?, e.b.palette()?);
    let (colour, missing_in) = match (pa.difference(&pb).next(), pb.difference(&pa).next()) {
        (Some(&c), None) => (c, OrderSide::B),
        (None, Some(&c)) => (c, OrderSide::A),
        (Some(&c), Some(&d)) if c < d => (c, OrderSide::B),
        (_, Some(&d)) => (d, OrderSide::A),
        (None, None) => return None,
    };
    let (src, len) = e.side(other(missing_in));
    Some(Obstruction {
        side: missing_in,
        target: (0..len).find(|&i| src.colour(i) == colour),
        interval: (None, None),
        colour,
        certain: true,
    })
}

/// Window tokens in increasing order, and the position of each token.
fn sorted_window(p: &dyn PresentedOrder, len: usize) -> (Vec<usize>, Vec<usize>) {
    let mut v: Vec<usize> = (0..len).collect();
    v.sort_by(|&i, &j| p.compare(i, j));
    let mut rank = vec![0; len];
    for (r, &i) in v.iter().enumerate() {
        rank[i] = r;
    }
    (v, rank)
}

/// The unique candidate map between finite orders: equal ranks. Returns, for
/// each enumeration index of either side, its partner.
fn finite_match(e: &mut Engine) -> Result<(Vec<usize>, Vec<usize>), Obstruction> {
    let (la, lb) = (e.len_a, e.len_b);
    let sa = e.sorted_a.clone();
    let sb = e.sorted_b.clone();
    let both_finite = e.a.size().is_some() && e.b.size().is_some();
    if la != lb || !both_finite {
        let (side, target) = if la > lb {
            (OrderSide::B, sa.get(lb).copied())
        } else {
            (OrderSide::A, sb.get(la).copied())
        };
        let colour = target.map_or(0, |t| match side {
            OrderSide::B => e.a.colour(t),
            OrderSide::A => e.b.colour(t),
        });
        return Err(Obstruction {
            side,
            target,
            interval: (None, None),
            colour,
            certain: both_finite,
        });
    }
    let mut rank_a = vec![0; la];
    let mut rank_b = vec![0; lb];
    for (r, (&x, &y)) in sa.iter().zip(&sb).enumerate() {
        rank_a[x] = r;
        rank_b[y] = r;
    }
    let fail = |x: usize, r: usize| Obstruction {
        side: OrderSide::B,
        target: Some(x),
        interval: (r.checked_sub(1).map(|q| sb[q]), sb.get(r + 1).copied()),
        colour: e.a.colour(x),
        certain: true,
    };
    for (r, (&x, &y)) in sa.iter().zip(&sb).enumerate() {
        if e.a.colour(x) != e.b.colour(y) {
            return Err(fail(x, r));
        }
    }
    for &(x, y) in &e.pairs {
        if rank_a[x] != rank_b[y] {
            return Err(fail(x, rank_a[x]));
        }
    }
    let to_b = (0..la).map(|x| sb[rank_a[x]]).collect();
    let to_a = (0..lb).map(|y| sa[rank_b[y]]).collect();
    Ok((to_b, to_a))
}

/// Matches the least and greatest of the first few points of each side.
fn anchor(e: &mut Engine, window: usize) -> Result<(), Obstruction> {
    let wa: Vec<usize> = (0..e.len_a.min(window)).collect();
    let wb: Vec<usize> = (0..e.len_b.min(window)).collect();
    if wa.is_empty() || wb.is_empty() || !e.pairs.is_empty() {
        return Ok(());
    }
    let extreme = |p: &dyn PresentedOrder, w: &[usize], want: Ordering| {
        *w.iter()
            .reduce(|m, x| if p.compare(*x, *m) == want { x } else { m })
            .expect("nonempty")
    };
    for want in [Ordering::Less, Ordering::Greater] {
        let x = extreme(e.a, &wa, want);
        let y = extreme(e.b, &wb, want);
        let fits = e.a.colour(x) == e.b.colour(y)
            && e.a.character(x) == e.b.character(y)
            && !e.used_a.contains(&x)
            && !e.used_b.contains(&y)
            && e.pairs.iter().all(|&(u, v)| e.a.compare(u, x) == e.b.compare(v, y));
        if fits {
            e.insert(x, y);
        }
    }
    Ok(())
}

/// Checks every pair of pairs for order and colour agreement.
pub fn verify_partial_iso(a: &dyn PresentedOrder, b: &dyn PresentedOrder, iso: &PartialIso) -> Result<(), String> {
    let mut seen_a = HashSet::new();
    let mut seen_b = HashSet::new();
    for &(x, y) in &iso.pairs {
        if !a.exists(x) || !b.exists(y) {
            return Err(format!("pair ({x}, {y}) names a missing point"));
        }
        if !seen_a.insert(x) || !seen_b.insert(y) {
            return Err(format!("pair ({x}, {y}) repeats a point"));
        }
        if a.colour(x) != b.colour(y) {
            return Err(format!("pair ({x}, {y}) changes colour"));
        }
    }
    for (i, &(x, y)) in iso.pairs.iter().enumerate() {
        for &(u, v) in &iso.pairs[i + 1..] {
            if a.compare(x, u) != b.compare(y, v) {
                return Err(format!("pairs ({x}, {y}) and ({u}, {v}) disagree on order"));
            }
        }
    }
    Ok(())
}

/// An isomorphism between two finite presentations by depth-first search
/// over order- and colour-preserving assignments.
pub fn exhaustive_isomorphism(a: &dyn PresentedOrder, b: &dyn PresentedOrder) -> Option<Vec<(usize, usize)>> {
    let (la, lb) = (window_len(a), window_len(b));
    if la != lb {
        return None;
    }
    fn dfs(
        a: &dyn PresentedOrder,
        b: &dyn PresentedOrder,
        n: usize,
        pairs: &mut Vec<(usize, usize)>,
        used: &mut Vec<bool>,
    ) -> bool {
        let x = pairs.len();
        if x == n {
            return true;
        }
        for y in 0..n {
            if used[y] || a.colour(x) != b.colour(y) {
                continue;
            }
            if pairs.iter().any(|&(u, v)| a.compare(u, x) != b.compare(v, y)) {
                continue;
            }
            used[y] = true;
            pairs.push((x, y));
            if dfs(a, b, n, pairs, used) {
                return true;
            }
            pairs.pop();
            used[y] = false;
        }
        false
    }
    let mut pairs = Vec::new();
    dfs(a, b, la, &mut pairs, &mut vec![false; lb]).then_some(pairs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuiteClosedClause {
    /// `J` has a first member.
    NoFirst,
    /// `J` has a last member.
    NoLast,
    /// A cut class of `J` has a last element.
    ClassNoLast,
    /// A cut class of `J` has a first element.
    ClassNoFirst,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiteClosedReport {
    pub holds: bool,
    pub violation: Option<(QuiteClosedClause, usize)>,
    pub probed: usize,
    pub witness_window: usize,
}

/// Checks quite-closedness of `J` inside a window. Probed points are the
/// first `probe` enumerated ones; witnesses are searched among the first
/// `4·probe`. `J` has a first member when no witness lies below its least
/// element; a probed `x ∉ J` is the last of its class when no witness outside
/// `J` lies above `x` in the same cut of `J` (dually for first).
pub fn quite_closed_check(n: &dyn PresentedOrder, j: &[usize], probe: usize) -> QuiteClosedReport {
    let total = window_len(n);
    let probed = probe.min(total);
    let witness_window = probe.saturating_mul(4).min(total);
    let in_j: HashSet<usize> = j.iter().copied().collect();
    let report = |v: Option<(QuiteClosedClause, usize)>| QuiteClosedReport {
        holds: v.is_none(),
        violation: v,
        probed,
        witness_window,
    };
    let lt = |x: usize, y: usize| n.compare(x, y) == Ordering::Less;
    if let (Some(&lo), Some(&hi)) = (
        j.iter().reduce(|m, x| if lt(*x, *m) { x } else { m }),
        j.iter().reduce(|m, x| if lt(*m, *x) { x } else { m }),
    ) {
        if !(0..witness_window).any(|w| !in_j.contains(&w) && lt(w, lo)) {
            return report(Some((QuiteClosedClause::NoFirst, lo)));
        }
        if !(0..witness_window).any(|w| !in_j.contains(&w) && lt(hi, w)) {
            return report(Some((QuiteClosedClause::NoLast, hi)));
        }
    }
    let same_cut = |x: usize, y: usize| j.iter().all(|&q| n.compare(x, q) == n.compare(y, q));
    for x in (0..probed).filter(|x| !in_j.contains(x)) {
        let class = (0..witness_window).filter(|&w| !in_j.contains(&w) && same_cut(w, x));
        let (mut above, mut below) = (false, false);
        for w in class {
            above |= lt(x, w);
            below |= lt(w, x);
        }
        if !above {
            return report(Some((QuiteClosedClause::ClassNoLast, x)));
        }
        if !below {
            return report(Some((QuiteClosedClause::ClassNoFirst, x)));
        }
    }
    report(None)
}

/// A partial automorphism fixing `J` pointwise and sending `s` to `t`.
pub fn automorphism_over(
    n: &dyn PresentedOrder,
    j: &[usize],
    s: usize,
    t: usize,
    opts: &IsoOptions,
) -> Result<IsoRun, IsoError> {
    let bad = |reason: String| Err(IsoError::PreconditionFailed { reason });
    if !n.exists(s) || !n.exists(t) {
        return bad("s and t must be enumerated points".into());
    }
    if j.contains(&s) || j.contains(&t) {
        return bad("s and t must lie outside J".into());
    }
    if n.colour(s) != n.colour(t) {
        return bad(format!("colours differ: {} and {}", n.colour(s), n.colour(t)));
    }
    if n.character(s) != n.character(t) {
        return bad("characters differ".into());
    }
    if let Some(&q) = j.iter().find(|&&q| n.compare(s, q) != n.compare(t, q)) {
        return bad(format!("s and t lie on different sides of {q}"));
    }
    let mut initial: Vec<(usize, usize)> = j.iter().map(|&q| (q, q)).collect();
    initial.sort_unstable();
    initial.dedup();
    initial.push((s, t));
    Ok(run(n, n, initial, opts, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordinal::Ordinal;

    fn shuffle(c: &[u32], seed: u64) -> SeededShuffle {
        SeededShuffle::new(c.iter().copied().collect(), seed, SeededShuffle::DEFAULT_WINDOW)
    }

    #[test]
    fn seeded_shuffles_match() {
        let a = shuffle(&[0, 1], 1);
        let b = shuffle(&[0, 1], 2);
        let run = back_and_forth(&a, &b, &IsoOptions::rounds(200));
        assert!(run.obstruction.is_none(), "{:?}", run.obstruction);
        assert!(run.iso.len() >= 100);
        verify_partial_iso(&a, &b, &run.iso).unwrap();
        for i in 0..100 {
            assert!(run.iso.pairs.iter().any(|p| p.0 == i));
            assert!(run.iso.pairs.iter().any(|p| p.1 == i));
        }
    }

    #[test]
    fn unequal_palettes_obstruct() {
        let a = shuffle(&[0, 1], 1);
        let b = shuffle(&[0, 1, 2], 2);
        let run = back_and_forth(&a, &b, &IsoOptions::rounds(50));
        let ob = run.obstruction.unwrap();
        assert_eq!((ob.side, ob.colour), (OrderSide::A, 2));
    }

    #[test]
    fn term_presentations() {
        let sh = OrderTerm::shuffle([0, 1]).unwrap();
        let a = TermPresentation::new(sh.clone(), 4095);
        let run = back_and_forth(&a, &a, &IsoOptions::rounds(100));
        assert!(run.obstruction.is_none());
        assert!(run.iso.pairs.iter().all(|(x, y)| x == y));
        let b = shuffle(&[0, 1], 9);
        let run = back_and_forth(&a, &b, &IsoOptions::rounds(200));
        assert!(run.obstruction.is_none());
        verify_partial_iso(&a, &b, &run.iso).unwrap();
    }

    #[test]
    fn finite_orders_agree_with_search() {
        for n in 0..=5usize {
            for wa in 0..1u32 << n {
                for wb in 0..1u32 << n {
                    let ca: Vec<u32> = (0..n).map(|i| wa >> i & 1).collect();
                    let cb: Vec<u32> = (0..n).map(|i| wb >> i & 1).collect();
                    let order: Vec<usize> = (0..n).rev().collect();
                    let a = FinitePresentation::new(ca);
                    let b = FinitePresentation::with_order(cb, order);
                    let run = back_and_forth(&a, &b, &IsoOptions::rounds(2 * n));
                    let iso = exhaustive_isomorphism(&a, &b);
                    assert_eq!(run.obstruction.is_none(), iso.is_some(), "{wa} {wb}");
                    if run.obstruction.is_none() {
                        assert_eq!(run.iso.len(), n);
                        verify_partial_iso(&a, &b, &run.iso).unwrap();
                    }
                }
            }
        }
        let a = FinitePresentation::new(vec![0, 0]);
        let b = FinitePresentation::new(vec![0, 0, 0]);
        assert!(back_and_forth(&a, &b, &IsoOptions::rounds(4)).obstruction.unwrap().certain);
    }

    #[test]
    fn square_schedule_is_traceable() {
        let a = shuffle(&[0], 3);
        let mut opts = IsoOptions::rounds(50);
        opts.schedule = Schedule::Square;
        let run = back_and_forth(&a, &a, &opts);
        assert!(run.obstruction.is_none());
        for t in &run.trace {
            let (dir, i) = scheduled(Schedule::Square, t.round);
            assert_eq!((dir, i), (t.direction, t.target));
        }
    }

    #[test]
    fn quite_closed_examples() {
        let sh = shuffle(&[0, 1], 5);
        assert!(quite_closed_check(&sh, &[], 50).holds);
        let w = TermPresentation::new(OrderTerm::ord(Ordinal::omega()), 1000);
        let r = quite_closed_check(&w, &[0, 3], 20);
        assert_eq!(r.violation.map(|v| v.0), Some(QuiteClosedClause::NoFirst));
        let evens: Vec<usize> = (0..100).step_by(2).collect();
        let r = quite_closed_check(&sh, &evens, 100);
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn automorphisms() {
        let sh = shuffle(&[0, 1], 7);
        let j = [0, 1, 2];
        let same = automorphism_over(&sh, &j, 5, 5, &IsoOptions::rounds(40)).unwrap();
        assert!(same.iso.pairs.iter().all(|(x, y)| x == y));
        let s = 5;
        let t = (6..4000)
            .find(|&t| {
                t != s && sh.colour(t) == sh.colour(s) && j.iter().all(|&q| sh.compare(s, q) == sh.compare(t, q))
            })
            .unwrap();
        let run = automorphism_over(&sh, &j, s, t, &IsoOptions::rounds(100)).unwrap();
        assert!(run.obstruction.is_none());
        verify_partial_iso(&sh, &sh, &run.iso).unwrap();
        for &q in &j {
            assert!(run.iso.pairs.contains(&(q, q)));
        }
        assert!(run.iso.pairs.contains(&(s, t)));
        let u = (6..4000).find(|&u| sh.colour(u) != sh.colour(s)).unwrap();
        assert!(matches!(
            automorphism_over(&sh, &j, s, u, &IsoOptions::rounds(10)),
            Err(IsoError::PreconditionFailed { .. })
        ));
    }
}
