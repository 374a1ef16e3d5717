//! Closed-form calculus for the abelian groups that occur as K-groups here.
//!
//! A group is a finite direct sum of atoms: rank-one torsion-free groups
//! `ℚ_n` with `n` of infinite type (`ℤ = ℚ_1`), finite cyclic `p`-groups
//! `ℤ/p^k`, and Prüfer groups `ℤ(p^∞) = ℚ_{p^∞}/ℤ`. Direct sums are multisets,
//! and tensor products and `Tor` are computed atom by atom from bilinear
//! tables.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::supernatural::{is_prime, Prime, PrimeSet, Supernatural};
use crate::text::{parse_all, Cursor};

/// One indecomposable summand. The derived order (rational, Prüfer, cyclic)
/// is the canonical order used for printing.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `ℚ_n`; `n` is always of infinite type.
    Rational(Supernatural),
    /// `ℚ_{p^∞}/ℤ`.
    Prufer(Prime),
    /// `ℤ/p^k`, `k >= 1`.
    Cyclic { p: Prime, k: u32 },
}

impl Atom {
    pub fn is_torsion(&self) -> bool {
        !matches!(self, Atom::Rational(_))
    }

    pub fn is_p_divisible(&self, p: Prime) -> bool {
        match self {
            Atom::Rational(a) => a.prime_set().contains(p),
            Atom::Prufer(_) => true,
            Atom::Cyclic { p: q, .. } => *q != p,
        }
    }

    /// Divisible by every prime dividing `n`.
    pub fn is_n_divisible(&self, n: &Supernatural) -> bool {
        match self {
            Atom::Rational(a) => n.prime_set().is_subset(&a.prime_set()),
            Atom::Prufer(_) => true,
            Atom::Cyclic { p, .. } => !n.prime_set().contains(*p),
        }
    }

    /// The bilinear table for `⊗`.
    pub fn tensor(&self, other: &Atom) -> Option<Atom> {
        use Atom::*;
        match (self, other) {
            (Rational(a), Rational(b)) => Some(Rational(a.mul(b))),
            (Rational(a), t) | (t, Rational(a)) => {
                let p = match t {
                    Prufer(p) | Cyclic { p, .. } => *p,
                    Rational(_) => unreachable!(),
                };
                (!a.prime_set().contains(p)).then(|| t.clone())
            }
            (Cyclic { p, k: j }, Cyclic { p: q, k }) => {
                (p == q).then(|| Cyclic { p: *p, k: *j.min(k) })
            }
            (Prufer(_), _) | (_, Prufer(_)) => None,
        }
    }

    /// The bilinear table for `Tor₁^ℤ`.
    pub fn tor(&self, other: &Atom) -> Option<Atom> {
        use Atom::*;
        match (self, other) {
            (Rational(_), _) | (_, Rational(_)) => None,
            (Cyclic { p, k: j }, Cyclic { p: q, k }) => {
                (p == q).then(|| Cyclic { p: *p, k: *j.min(k) })
            }
            (Cyclic { p, k }, Prufer(q)) | (Prufer(q), Cyclic { p, k }) => {
                (p == q).then_some(Cyclic { p: *p, k: *k })
            }
            (Prufer(p), Prufer(q)) => (p == q).then_some(Prufer(*p)),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Rational(n) if n.is_one() => f.write_str("Z"),
            Atom::Rational(n) => write!(f, "Q[{n}]"),
            Atom::Prufer(p) => write!(f, "Pr[{p}]"),
            Atom::Cyclic { p, k } => write!(f, "C[{p}^{k}]"),
        }
    }
}

/// A finite direct sum of atoms, kept sorted so that equality is isomorphism.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbGroup {
    atoms: Vec<Atom>,
}

impl AbGroup {
    pub fn zero() -> Self {
        AbGroup::default()
    }

    pub fn integers() -> Self {
        AbGroup::from_atoms([Atom::Rational(Supernatural::one())])
    }

    pub fn from_atoms<I: IntoIterator<Item = Atom>>(atoms: I) -> Self {
        let mut atoms: Vec<Atom> = atoms.into_iter().collect();
        atoms.sort();
        AbGroup { atoms }
    }

    pub fn atom(atom: Atom) -> Result<Self> {
        match &atom {
            Atom::Rational(n) if !n.is_infinite_type() => {
                return Err(Error::constraint(format!(
                    "Q[{n}] needs a supernatural number of infinite type"
                )))
            }
            Atom::Prufer(p) | Atom::Cyclic { p, .. } if !is_prime(*p) => {
                return Err(Error::constraint(format!("{p} is not a prime")))
            }
            Atom::Cyclic { k: 0, .. } => {
                return Err(Error::constraint("cyclic atoms need an exponent >= 1"))
            }
            _ => {}
        }
        Ok(AbGroup::from_atoms([atom]))
    }

    pub fn rational(n: Supernatural) -> Result<Self> {
        AbGroup::atom(Atom::Rational(n))
    }

    pub fn prufer(p: Prime) -> Result<Self> {
        AbGroup::atom(Atom::Prufer(p))
    }

    pub fn cyclic(p: Prime, k: u32) -> Result<Self> {
        AbGroup::atom(Atom::Cyclic { p, k })
    }

    /// `ℚ_m/ℤ = ⊕_{p|m} ℤ(p^∞)`. Needs `m` of infinite type with finitely
    /// many prime divisors.
    pub fn q_mod_z(m: &Supernatural) -> Result<Self> {
        if !m.is_infinite_type() {
            return Err(Error::constraint(format!(
                "Q[{m}]/Z needs a supernatural number of infinite type"
            )));
        }
        match m.prime_set() {
            PrimeSet::Finite(primes) => Ok(AbGroup::from_atoms(primes.into_iter().map(Atom::Prufer))),
            PrimeSet::Cofinite(_) => Err(Error::Unsupported(format!(
                "Q[{m}]/Z is a sum of infinitely many Pruefer groups"
            ))),
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Number of rank-one torsion-free atoms.
    pub fn rank(&self) -> usize {
        self.atoms.iter().filter(|a| !a.is_torsion()).count()
    }

    pub fn direct_sum(&self, other: &AbGroup) -> AbGroup {
        AbGroup::from_atoms(self.atoms.iter().chain(&other.atoms).cloned())
    }

    fn bilinear(&self, other: &AbGroup, table: impl Fn(&Atom, &Atom) -> Option<Atom>) -> AbGroup {
        AbGroup::from_atoms(
            self.atoms
                .iter()
                .flat_map(|a| other.atoms.iter().filter_map(|b| table(a, b)).collect::<Vec<_>>()),
        )
    }

    pub fn tensor(&self, other: &AbGroup) -> AbGroup {
        self.bilinear(other, Atom::tensor)
    }

    pub fn tor(&self, other: &AbGroup) -> AbGroup {
        self.bilinear(other, Atom::tor)
    }

    /// `p`-divisible for every prime `p | n`.
    pub fn is_n_divisible(&self, n: &Supernatural) -> bool {
        self.atoms.iter().all(|a| a.is_n_divisible(n))
    }

    /// Whether every extension of `ℚ_n` or `ℚ_n/ℤ` by `self` is forced to
    /// split, so that the middle group is the direct sum.
    pub fn div_split_applies(&self, n: &Supernatural) -> bool {
        self.is_n_divisible(n)
    }

    /// `(torsion subgroup, torsion-free quotient)`.
    pub fn torsion_split(&self) -> (AbGroup, AbGroup) {
        let (torsion, free): (Vec<Atom>, Vec<Atom>) =
            self.atoms.iter().cloned().partition(Atom::is_torsion);
        (AbGroup { atoms: torsion }, AbGroup { atoms: free })
    }

    pub fn is_isomorphic(&self, other: &AbGroup) -> bool {
        self == other
    }

    /// Primes of all Prüfer atoms, with repetition.
    pub fn prufer_primes(&self) -> impl Iterator<Item = Prime> + '_ {
        self.atoms.iter().filter_map(|a| match a {
            Atom::Prufer(p) => Some(*p),
            _ => None,
        })
    }

    /// Every prime with a torsion atom attached to it.
    pub fn torsion_primes(&self) -> impl Iterator<Item = Prime> + '_ {
        self.atoms.iter().filter_map(|a| match a {
            Atom::Prufer(p) | Atom::Cyclic { p, .. } => Some(*p),
            Atom::Rational(_) => None,
        })
    }

    pub(crate) fn parse_at(cur: &mut Cursor<'_>) -> Result<Self> {
        if cur.eat("0") {
            return Ok(AbGroup::zero());
        }
        let mut atoms = Vec::new();
        loop {
            atoms.extend(parse_atom(cur)?);
            if !cur.eat("+") {
                break;
            }
        }
        Ok(AbGroup::from_atoms(atoms))
    }
}

fn parse_prime(cur: &mut Cursor<'_>) -> Result<Prime> {
    let start = cur.pos();
    let p = cur.number()?;
    if !is_prime(p) {
        return Err(Error::Parse {
            pos: start,
            expected: "a prime".into(),
            found: p.to_string(),
        });
    }
    Ok(p)
}

fn parse_atom(cur: &mut Cursor<'_>) -> Result<Vec<Atom>> {
    if cur.eat("QZ[") {
        let m = Supernatural::parse_at(cur)?;
        cur.expect("]")?;
        return Ok(AbGroup::q_mod_z(&m)?.atoms);
    }
    if cur.eat("Q[") {
        let n = Supernatural::parse_at(cur)?;
        cur.expect("]")?;
        return Ok(AbGroup::rational(n)?.atoms);
    }
    if cur.eat("Z") {
        return Ok(vec![Atom::Rational(Supernatural::one())]);
    }
    if cur.eat("Pr[") {
        let p = parse_prime(cur)?;
        cur.expect("]")?;
        return Ok(vec![Atom::Prufer(p)]);
    }
    if cur.eat("C[") {
        let p = parse_prime(cur)?;
        let k = if cur.eat("^") {
            let start = cur.pos();
            let k = cur.number()?;
            u32::try_from(k)
                .ok()
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::Parse {
                    pos: start,
                    expected: "an exponent between 1 and 2^32-1".into(),
                    found: k.to_string(),
                })?
        } else {
            1
        };
        cur.expect("]")?;
        return Ok(vec![Atom::Cyclic { p, k }]);
    }
    Err(cur.error("a group atom (Z, Q[..], Pr[..], C[..], QZ[..])"))
}

impl fmt::Display for AbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("0");
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for AbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AbGroup({self})")
    }
}

impl FromStr for AbGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_all(s, AbGroup::parse_at)
    }
}

impl Serialize for AbGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
