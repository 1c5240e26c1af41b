//! Ordinals below ε₀ in Cantor normal form.
//!
//! An [`Ordinal`] is a finite sum `ω^e₁·c₁ + … + ω^eₖ·cₖ` with strictly
//! decreasing exponents (themselves ordinals) and positive coefficients.
//! The empty sum is `0`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinalError {
    #[error("left subtraction underflow: {g} exceeds {a}")]
    Underflow { g: Ordinal, a: Ordinal },
    #[error("coefficient must be positive")]
    ZeroCoefficient,
}

/// Cofinality of a countable ordinal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cofinality {
    Zero,
    One,
    Omega,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "RawOrdinal")]
pub struct Ordinal {
    cnf: Vec<(Ordinal, u64)>,
}

#[derive(Deserialize)]
struct RawOrdinal {
    cnf: Vec<(Ordinal, u64)>,
}

impl TryFrom<RawOrdinal> for Ordinal {
    type Error = OrdinalError;

    fn try_from(raw: RawOrdinal) -> Result<Self, Self::Error> {
        Ordinal::from_terms(raw.cnf)
    }
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { cnf: Vec::new() }
    }

    pub fn one() -> Self {
        Ordinal::from(1)
    }

    pub fn omega() -> Self {
        Ordinal::omega_pow(Ordinal::one())
    }

    /// `ω^e`.
    pub fn omega_pow(e: Ordinal) -> Self {
        Ordinal { cnf: vec![(e, 1)] }
    }

    /// `ω^e·c`, or `0` when `c = 0`.
    pub fn term(e: Ordinal, c: u64) -> Self {
        if c == 0 {
            Ordinal::zero()
        } else {
            Ordinal { cnf: vec![(e, c)] }
        }
    }

    /// Sums the terms in the given order, so unnormalized input is read as
    /// the ordinal sum it denotes.
    pub fn from_terms<I>(terms: I) -> Result<Self, OrdinalError>
    where
        I: IntoIterator<Item = (Ordinal, u64)>,
    {
        let mut acc = Ordinal::zero();
        for (e, c) in terms {
            if c == 0 {
                return Err(OrdinalError::ZeroCoefficient);
            }
            acc = acc.add(&Ordinal::term(e, c));
        }
        Ok(acc)
    }

    pub fn terms(&self) -> &[(Ordinal, u64)] {
        &self.cnf
    }

    pub fn is_zero(&self) -> bool {
        self.cnf.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.as_finite().is_some()
    }

    pub fn as_finite(&self) -> Option<u64> {
        match self.cnf.as_slice() {
            [] => Some(0),
            [(e, c)] if e.is_zero() => Some(*c),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<&(Ordinal, u64)> {
        self.cnf.first()
    }

    pub fn leading_exponent(&self) -> Option<&Ordinal> {
        self.cnf.first().map(|(e, _)| e)
    }

    /// Exponent of the last term; `None` for zero.
    pub fn trailing_exponent(&self) -> Option<&Ordinal> {
        self.cnf.last().map(|(e, _)| e)
    }

    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some((e0, c0)) = other.cnf.first() else {
            return self.clone();
        };
        let mut cnf: Vec<(Ordinal, u64)> = Vec::with_capacity(self.cnf.len() + other.cnf.len());
        let mut carry = 0u64;
        for (e, c) in &self.cnf {
            match e.cmp(e0) {
                Ordering::Greater => cnf.push((e.clone(), *c)),
                Ordering::Equal => carry = *c,
                Ordering::Less => break,
            }
        }
        cnf.push((e0.clone(), c0.saturating_add(carry)));
        cnf.extend(other.cnf[1..].iter().cloned());
        Ordinal { cnf }
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    /// The unique `a′` with `g + a′ = a`.
    pub fn left_subtract(g: &Ordinal, a: &Ordinal) -> Result<Ordinal, OrdinalError> {
        let underflow = || OrdinalError::Underflow {
            g: g.clone(),
            a: a.clone(),
        };
        for (i, (ae, ac)) in a.cnf.iter().enumerate() {
            let Some((ge, gc)) = g.cnf.get(i) else {
                return Ok(Ordinal {
                    cnf: a.cnf[i..].to_vec(),
                });
            };
            match ge.cmp(ae) {
                Ordering::Greater => return Err(underflow()),
                Ordering::Less => {
                    return Ok(Ordinal {
                        cnf: a.cnf[i..].to_vec(),
                    })
                }
                Ordering::Equal => match gc.cmp(ac) {
                    Ordering::Greater => return Err(underflow()),
                    Ordering::Less => {
                        let mut cnf = vec![(ae.clone(), ac - gc)];
                        cnf.extend(a.cnf[i + 1..].iter().cloned());
                        return Ok(Ordinal { cnf });
                    }
                    Ordering::Equal => {}
                },
            }
        }
        if g.cnf.len() > a.cnf.len() {
            Err(underflow())
        } else {
            Ok(Ordinal::zero())
        }
    }

    pub fn cofinality(&self) -> Cofinality {
        match self.cnf.last() {
            None => Cofinality::Zero,
            Some((e, _)) if e.is_zero() => Cofinality::One,
            Some(_) => Cofinality::Omega,
        }
    }

    pub fn is_successor(&self) -> bool {
        self.cofinality() == Cofinality::One
    }

    pub fn is_limit(&self) -> bool {
        self.cofinality() == Cofinality::Omega
    }

    /// The predecessor of a successor ordinal.
    pub fn pred(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut cnf = self.cnf.clone();
        let last = cnf.last_mut().expect("successor is nonzero");
        if last.1 == 1 {
            cnf.pop();
        } else {
            last.1 -= 1;
        }
        Some(Ordinal { cnf })
    }

    /// `ω·self`, obtained by raising every exponent `e` to `1+e`.
    pub fn omega_times(&self) -> Ordinal {
        let one = Ordinal::one();
        Ordinal {
            cnf: self.cnf.iter().map(|(e, c)| (one.add(e), *c)).collect(),
        }
    }

    /// Size measure used to enumerate the ordinals below a bound:
    /// `N(0) = 0`, `N(Σ ω^e·c) = Σ c·(1 + N(e))`.
    pub fn norm(&self) -> u64 {
        self.cnf
            .iter()
            .map(|(e, c)| c.saturating_mul(1 + e.norm()))
            .fold(0u64, u64::saturating_add)
    }

    /// All ordinals `< bound` of norm exactly `k`, ascending.
    pub fn with_norm_below(k: u64, bound: &Ordinal) -> Vec<Ordinal> {
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        norm_walk(k, &bound.cnf, true, None, &mut prefix, &mut out);
        out.sort();
        out
    }

    /// The first `n` ordinals below `bound` ordered by norm, then by value.
    pub fn enumerate_below(bound: &Ordinal, n: usize) -> Vec<Ordinal> {
        let mut out = Vec::new();
        let finite_bound = bound.as_finite();
        let mut k = 0u64;
        while out.len() < n {
            if let Some(b) = finite_bound {
                if k >= b {
                    break;
                }
            }
            for o in Ordinal::with_norm_below(k, bound) {
                if out.len() == n {
                    break;
                }
                out.push(o);
            }
            k += 1;
        }
        out
    }
}

fn norm_walk(
    remaining: u64,
    bound: &[(Ordinal, u64)],
    tight: bool,
    prev_exp: Option<&Ordinal>,
    prefix: &mut Vec<(Ordinal, u64)>,
    out: &mut Vec<Ordinal>,
) {
    if remaining == 0 {
        if !tight || !bound.is_empty() {
            out.push(Ordinal {
                cnf: prefix.clone(),
            });
        }
        return;
    }
    if tight && bound.is_empty() {
        return;
    }
    for j in 0..remaining {
        let exps: Vec<Ordinal> = match (tight, prev_exp) {
            (true, _) => {
                let (be, _) = &bound[0];
                let mut v = Ordinal::with_norm_below(j, be);
                if be.norm() == j {
                    v.push(be.clone());
                }
                v
            }
            (false, Some(p)) => Ordinal::with_norm_below(j, p),
            (false, None) => unreachable!("free mode always follows a term"),
        };
        let unit = 1 + j;
        for e in exps {
            let max_c = remaining / unit;
            for c in 1..=max_c {
                let rest = remaining - c * unit;
                let (next_tight, allowed) = if tight {
                    let (be, bc) = &bound[0];
                    match e.cmp(be).then(c.cmp(bc)) {
                        Ordering::Greater => (false, false),
                        Ordering::Equal => (true, true),
                        Ordering::Less => (false, true),
                    }
                } else {
                    (false, true)
                };
                if !allowed {
                    break;
                }
                prefix.push((e.clone(), c));
                let next_bound = if next_tight { &bound[1..] } else { bound };
                norm_walk(rest, next_bound, next_tight, Some(&e), prefix, out);
                prefix.pop();
            }
        }
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::term(Ordinal::zero(), n)
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for ((ae, ac), (be, bc)) in self.cnf.iter().zip(&other.cnf) {
            let o = ae.cmp(be).then(ac.cmp(bc));
            if o != Ordering::Equal {
                return o;
            }
        }
        self.cnf.len().cmp(&other.cnf.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cnf.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.cnf.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            match e.as_finite() {
                Some(0) => write!(f, "{c}")?,
                Some(1) => write!(f, "ω")?,
                Some(n) => write!(f, "ω^{n}")?,
                None if e.cnf.len() == 1 && e.cnf[0].1 == 1 => write!(f, "ω^{e}")?,
                None => write!(f, "ω^({e})")?,
            }
            if !e.is_zero() && *c > 1 {
                write!(f, "·{c}")?;
            }
        }
        Ok(())
    }
}
