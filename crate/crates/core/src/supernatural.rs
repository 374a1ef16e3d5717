//! Supernatural numbers and sets of primes.
//!
//! A supernatural number assigns every prime an exponent in `{0, 1, 2, …, ∞}`.
//! Only numbers whose exponent function is eventually constant at `0` or at
//! `∞` are representable; that covers ordinary naturals, numbers like `2^∞·3`,
//! and the universal number `U` in which every prime occurs infinitely often.
//!
//! Values are kept canonical: the stored exceptions never repeat the default
//! exponent, so structural equality is numeric equality.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::text::{parse_all, Cursor};

/// Primes are plain `u64`s validated on entry by [`is_prime`].
pub type Prime = u64;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

fn check_prime(p: u64) -> Result<Prime> {
    if is_prime(p) {
        Ok(p)
    } else {
        Err(Error::constraint(format!("{p} is not a prime")))
    }
}

/// An exponent in `{0, 1, 2, …, ∞}`. `Finite(_) < Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Exponent {
    Finite(u64),
    Infinite,
}

impl Exponent {
    pub const ZERO: Exponent = Exponent::Finite(0);

    pub fn is_zero(self) -> bool {
        self == Exponent::ZERO
    }

    fn add(self, other: Exponent) -> Exponent {
        match (self, other) {
            (Exponent::Finite(a), Exponent::Finite(b)) => Exponent::Finite(a.saturating_add(b)),
            _ => Exponent::Infinite,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(k) => write!(f, "{k}"),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Supernatural {
    // Invariant: always ZERO or Infinite.
    default: Exponent,
    // Invariant: keys are prime, no value equals `default`.
    exceptions: BTreeMap<Prime, Exponent>,
}

impl Supernatural {
    fn canonical(default: Exponent, exceptions: BTreeMap<Prime, Exponent>) -> Self {
        debug_assert!(default.is_zero() || default == Exponent::Infinite);
        let exceptions = exceptions.into_iter().filter(|&(_, e)| e != default).collect();
        Supernatural {
            default,
            exceptions,
        }
    }

    pub fn one() -> Self {
        Supernatural::canonical(Exponent::ZERO, BTreeMap::new())
    }

    /// Every prime to the power `∞`.
    pub fn universal() -> Self {
        Supernatural::canonical(Exponent::Infinite, BTreeMap::new())
    }

    pub fn prime_power(p: u64, exponent: Exponent) -> Result<Self> {
        let p = check_prime(p)?;
        Ok(Supernatural::canonical(
            Exponent::ZERO,
            BTreeMap::from([(p, exponent)]),
        ))
    }

    /// `p^∞ · q^∞ · …` over the given primes.
    pub fn infinite_over<I: IntoIterator<Item = u64>>(primes: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for p in primes {
            map.insert(check_prime(p)?, Exponent::Infinite);
        }
        Ok(Supernatural::canonical(Exponent::ZERO, map))
    }

    /// Builds a value from a default exponent (`0` or `∞`) and per-prime
    /// exceptions. Later entries for the same prime replace earlier ones.
    pub fn from_exponents<I>(default: Exponent, exceptions: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, Exponent)>,
    {
        if !(default.is_zero() || default == Exponent::Infinite) {
            return Err(Error::constraint(
                "the default exponent of a supernatural number must be 0 or inf",
            ));
        }
        let mut map = BTreeMap::new();
        for (p, e) in exceptions {
            map.insert(check_prime(p)?, e);
        }
        Ok(Supernatural::canonical(default, map))
    }

    pub fn from_natural(mut n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::constraint("0 is not a supernatural number"));
        }
        let mut map = BTreeMap::new();
        let mut d = 2u64;
        while d.saturating_mul(d) <= n {
            let mut k = 0;
            while n % d == 0 {
                n /= d;
                k += 1;
            }
            if k > 0 {
                map.insert(d, Exponent::Finite(k));
            }
            d += 1;
        }
        if n > 1 {
            let e = map.entry(n).or_insert(Exponent::ZERO);
            *e = e.add(Exponent::Finite(1));
        }
        Ok(Supernatural::canonical(Exponent::ZERO, map))
    }

    pub fn default_exponent(&self) -> Exponent {
        self.default
    }

    /// The primes whose exponent differs from the default, with their exponents.
    pub fn exceptions(&self) -> impl Iterator<Item = (Prime, Exponent)> + '_ {
        self.exceptions.iter().map(|(&p, &e)| (p, e))
    }

    pub fn exponent(&self, p: Prime) -> Exponent {
        self.exceptions.get(&p).copied().unwrap_or(self.default)
    }

    pub fn is_one(&self) -> bool {
        self.default.is_zero() && self.exceptions.is_empty()
    }

    /// Applies `op` pointwise; `op` must map `{0, ∞}²` into `{0, ∞}`.
    fn pointwise(&self, other: &Self, op: impl Fn(Exponent, Exponent) -> Exponent) -> Self {
        let default = op(self.default, other.default);
        let keys: BTreeSet<Prime> = self
            .exceptions
            .keys()
            .chain(other.exceptions.keys())
            .copied()
            .collect();
        let map = keys
            .into_iter()
            .map(|p| (p, op(self.exponent(p), other.exponent(p))))
            .collect();
        Supernatural::canonical(default, map)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.pointwise(other, Exponent::add)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        self.pointwise(other, Exponent::min)
    }

    pub fn coprime(&self, other: &Self) -> bool {
        self.gcd(other).is_one()
    }

    /// `self | other`: every exponent of `self` is at most the matching one of `other`.
    pub fn divides(&self, other: &Self) -> bool {
        if self.default > other.default {
            return false;
        }
        self.exceptions
            .keys()
            .chain(other.exceptions.keys())
            .all(|&p| self.exponent(p) <= other.exponent(p))
    }

    /// Equal to its own square: every exponent is `0` or `∞`.
    pub fn is_infinite_type(&self) -> bool {
        self.exceptions
            .values()
            .all(|&e| e.is_zero() || e == Exponent::Infinite)
    }

    /// The primes dividing `self`.
    pub fn prime_set(&self) -> PrimeSet {
        let nonzero = |want: bool| {
            self.exceptions
                .iter()
                .filter(move |(_, e)| e.is_zero() != want)
                .map(|(&p, _)| p)
                .collect::<BTreeSet<_>>()
        };
        if self.default.is_zero() {
            PrimeSet::Finite(nonzero(true))
        } else {
            PrimeSet::Cofinite(nonzero(false))
        }
    }

    /// The infinite-type number with exponent `∞` exactly on `set`.
    pub fn from_prime_set(set: &PrimeSet) -> Self {
        match set {
            PrimeSet::Finite(members) => Supernatural::canonical(
                Exponent::ZERO,
                members.iter().map(|&p| (p, Exponent::Infinite)).collect(),
            ),
            PrimeSet::Cofinite(excluded) => Supernatural::canonical(
                Exponent::Infinite,
                excluded.iter().map(|&p| (p, Exponent::ZERO)).collect(),
            ),
        }
    }

    /// Parses the supernatural grammar starting at the cursor.
    pub(crate) fn parse_at(cur: &mut Cursor<'_>) -> Result<Self> {
        if cur.eat("U") {
            let mut map = BTreeMap::new();
            if cur.eat("/") {
                loop {
                    let start = cur.pos();
                    let (p, e) = parse_term(cur, true)?;
                    if map.insert(p, e).is_some() {
                        return Err(Error::Parse {
                            pos: start,
                            expected: "each excluded prime at most once".into(),
                            found: format!("a repeated {p}"),
                        });
                    }
                    if !cur.eat("*") {
                        break;
                    }
                }
            }
            return Ok(Supernatural::canonical(Exponent::Infinite, map));
        }
        match cur.peek() {
            Some(c) if c.is_ascii_digit() => {}
            _ => return Err(cur.error("a supernatural number ('1', 'U' or prime powers)")),
        }
        let mut value = Supernatural::one();
        let mut first = true;
        loop {
            let start = cur.pos();
            let n = cur.number()?;
            if n == 1 && first {
                // "1" stands alone.
                return Ok(value);
            }
            first = false;
            if n < 2 {
                return Err(Error::Parse {
                    pos: start,
                    expected: "a base >= 2".into(),
                    found: n.to_string(),
                });
            }
            let e = if cur.eat("^") {
                parse_exponent(cur, false)?
            } else {
                Exponent::Finite(1)
            };
            // Composite bases are shorthand: 6^inf = 2^inf*3^inf.
            let base = Supernatural::from_natural(n)?;
            let term = base.exceptions.iter().map(|(&p, &a)| {
                let power = match (a, e) {
                    (Exponent::Finite(a), Exponent::Finite(k)) => a
                        .checked_mul(k)
                        .map(Exponent::Finite)
                        .ok_or_else(|| Error::constraint(format!("exponent of {p} overflows")))?,
                    _ => Exponent::Infinite,
                };
                Ok((p, power))
            });
            let term = term.collect::<Result<BTreeMap<_, _>>>()?;
            value = value.mul(&Supernatural::canonical(Exponent::ZERO, term));
            if !cur.eat("*") {
                return Ok(value);
            }
        }
    }
}

fn parse_term(cur: &mut Cursor<'_>, allow_zero: bool) -> Result<(Prime, Exponent)> {
    let start = cur.pos();
    let n = cur.number()?;
    let p = check_prime(n).map_err(|_| Error::Parse {
        pos: start,
        expected: "a prime".into(),
        found: n.to_string(),
    })?;
    let e = if cur.eat("^") {
        parse_exponent(cur, allow_zero)?
    } else {
        Exponent::Finite(1)
    };
    Ok((p, e))
}

fn parse_exponent(cur: &mut Cursor<'_>, allow_zero: bool) -> Result<Exponent> {
    if cur.eat("inf") {
        return Ok(Exponent::Infinite);
    }
    let start = cur.pos();
    let k = cur.number()?;
    if k == 0 && !allow_zero {
        return Err(Error::Parse {
            pos: start,
            expected: "an exponent >= 1 or 'inf'".into(),
            found: "0".into(),
        });
    }
    Ok(Exponent::Finite(k))
}

fn write_term(f: &mut fmt::Formatter<'_>, p: Prime, e: Exponent) -> fmt::Result {
    match e {
        Exponent::Finite(1) => write!(f, "{p}"),
        e => write!(f, "{p}^{e}"),
    }
}

impl fmt::Display for Supernatural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.default == Exponent::Infinite {
            f.write_str("U")?;
            if !self.exceptions.is_empty() {
                f.write_str("/")?;
            }
        } else if self.exceptions.is_empty() {
            return f.write_str("1");
        }
        for (i, (&p, &e)) in self.exceptions.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write_term(f, p, e)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Supernatural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Supernatural({self})")
    }
}

impl FromStr for Supernatural {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_all(s, Supernatural::parse_at)
    }
}

impl Serialize for Supernatural {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A finite or cofinite set of primes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PrimeSet {
    Finite(BTreeSet<Prime>),
    /// All primes except the listed ones.
    Cofinite(BTreeSet<Prime>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersection,
    Difference,
}

impl PrimeSet {
    pub fn empty() -> Self {
        PrimeSet::Finite(BTreeSet::new())
    }

    pub fn all() -> Self {
        PrimeSet::Cofinite(BTreeSet::new())
    }

    pub fn finite<I: IntoIterator<Item = u64>>(primes: I) -> Result<Self> {
        primes
            .into_iter()
            .map(check_prime)
            .collect::<Result<_>>()
            .map(PrimeSet::Finite)
    }

    pub fn cofinite<I: IntoIterator<Item = u64>>(excluded: I) -> Result<Self> {
        excluded
            .into_iter()
            .map(check_prime)
            .collect::<Result<_>>()
            .map(PrimeSet::Cofinite)
    }

    pub fn contains(&self, p: Prime) -> bool {
        match self {
            PrimeSet::Finite(s) => s.contains(&p),
            PrimeSet::Cofinite(s) => !s.contains(&p),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, PrimeSet::Finite(s) if s.is_empty())
    }

    pub fn complement(&self) -> Self {
        match self {
            PrimeSet::Finite(s) => PrimeSet::Cofinite(s.clone()),
            PrimeSet::Cofinite(s) => PrimeSet::Finite(s.clone()),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        use PrimeSet::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a | b),
            (Finite(a), Cofinite(b)) | (Cofinite(b), Finite(a)) => Cofinite(b - a),
            (Cofinite(a), Cofinite(b)) => Cofinite(a & b),
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        use PrimeSet::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a & b),
            (Finite(a), Cofinite(b)) | (Cofinite(b), Finite(a)) => Finite(a - b),
            (Cofinite(a), Cofinite(b)) => Cofinite(a | b),
        }
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersection(&other.complement())
    }

    pub fn apply(&self, op: SetOp, other: &Self) -> Self {
        match op {
            SetOp::Union => self.union(other),
            SetOp::Intersection => self.intersection(other),
            SetOp::Difference => self.difference(other),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// Compares two sets under inclusion.
    pub fn partial_cmp_inclusion(&self, other: &Self) -> Option<Ordering> {
        match (self.is_subset(other), other.is_subset(self)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |s: &BTreeSet<Prime>| {
            s.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        };
        match self {
            PrimeSet::Finite(s) => write!(f, "{{{}}}", list(s)),
            PrimeSet::Cofinite(s) if s.is_empty() => f.write_str("all primes"),
            PrimeSet::Cofinite(s) => write!(f, "all primes except {{{}}}", list(s)),
        }
    }
}
