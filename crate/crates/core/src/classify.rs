//! Which K-theory is compatible with an approximately inner flip, why a
//! given group is not, and which catalog algebra realizes a graded invariant
//! up to stable isomorphism.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::abgroup::{AbGroup, Atom};
use crate::error::{Error, Result};
use crate::kunneth::{pair_violations, GradedKTheory, Violation};
use crate::supernatural::Supernatural;
use crate::text::{parse_all, Cursor};

/// The ungraded groups `K₀ ⊕ K₁` that admit an approximately inner flip.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "shape")]
pub enum AdmissibleShape {
    Zero,
    Z,
    /// `ℚ_n`, `n ≠ 1`.
    Qn { n: Supernatural },
    /// `ℚ_m/ℤ`, `m ≠ 1`.
    QmodZ { m: Supernatural },
    /// `ℚ_n ⊕ ℚ_m/ℤ` with `1 ≠ m | n`.
    QnPlusQmodZ { n: Supernatural, m: Supernatural },
}

impl fmt::Display for AdmissibleShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdmissibleShape::Zero => f.write_str("0"),
            AdmissibleShape::Z => f.write_str("Z"),
            AdmissibleShape::Qn { n } => write!(f, "Q_n with n = {n}"),
            AdmissibleShape::QmodZ { m } => write!(f, "Q_m/Z with m = {m}"),
            AdmissibleShape::QnPlusQmodZ { n, m } => {
                write!(f, "Q_n + Q_m/Z with n = {n}, m = {m}")
            }
        }
    }
}

/// Why a group was rejected: every violated necessary condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub diagnostics: Vec<Violation>,
}

/// Matches the normal form of `g` against the admissible shapes.
pub fn is_flip_admissible(g: &AbGroup) -> std::result::Result<AdmissibleShape, Rejection> {
    let reject = || Rejection {
        diagnostics: diagnose(g),
    };
    let (torsion, free) = g.torsion_split();
    let mut primes = Vec::new();
    for a in torsion.atoms() {
        match a {
            Atom::Prufer(p) if !primes.contains(p) => primes.push(*p),
            _ => return Err(reject()),
        }
    }
    let m = Supernatural::infinite_over(primes).expect("atom primes are prime");
    match (free.atoms(), m.is_one()) {
        ([], true) => Ok(AdmissibleShape::Zero),
        ([], false) => Ok(AdmissibleShape::QmodZ { m }),
        ([Atom::Rational(n)], true) if n.is_one() => Ok(AdmissibleShape::Z),
        ([Atom::Rational(n)], true) => Ok(AdmissibleShape::Qn { n: n.clone() }),
        ([Atom::Rational(n)], false) if m.divides(n) => Ok(AdmissibleShape::QnPlusQmodZ {
            n: n.clone(),
            m,
        }),
        _ => Err(reject()),
    }
}

/// Every failed necessary condition, each with the summands witnessing it.
pub fn diagnose(g: &AbGroup) -> Vec<Violation> {
    let mut out = Vec::new();
    if g.rank() > 1 {
        out.push(Violation::RankAboveOne { rank: g.rank() });
    }
    out.extend(pair_violations(g.atoms()));
    out.extend(
        g.atoms()
            .iter()
            .filter(|a| matches!(a, Atom::Cyclic { .. }))
            .map(|a| Violation::CyclicSummand { atom: a.to_string() }),
    );
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    C,
    E,
    EOinf,
    EOsup,
    F,
}

/// A model algebra, up to stable isomorphism.
///
/// `E(n, m₀, m₁)` is stably finite with `K₀ = ℚ_n ⊕ ℚ_{m₀}/ℤ` and
/// `K₁ = ℚ_{m₁}/ℤ`; `EOi` and `EOs` are its tensor products with `O_∞` and
/// `O^∞`; `F(m₀, m₁)` is the Kirchberg algebra with `K₀ = ℚ_{m₀}/ℤ`,
/// `K₁ = ℚ_{m₁}/ℤ`. Fields are private so every value is valid.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CatalogEntry {
    variant: Variant,
    n: Supernatural,
    m0: Supernatural,
    m1: Supernatural,
}

impl CatalogEntry {
    pub fn c() -> Self {
        CatalogEntry {
            variant: Variant::C,
            n: Supernatural::one(),
            m0: Supernatural::one(),
            m1: Supernatural::one(),
        }
    }

    /// `𝒵 = E(1,1,1)`.
    pub fn jiang_su() -> Self {
        CatalogEntry::e(Supernatural::one(), Supernatural::one(), Supernatural::one())
            .expect("E(1,1,1) is valid")
    }

    pub fn new(variant: Variant, n: Supernatural, m0: Supernatural, m1: Supernatural) -> Result<Self> {
        let one = Supernatural::one();
        match variant {
            Variant::C => {
                if !(n.is_one() && m0.is_one() && m1.is_one()) {
                    return Err(Error::constraint("C takes no parameters"));
                }
            }
            Variant::F => {
                if !n.is_one() {
                    return Err(Error::constraint("F takes only m0 and m1"));
                }
                check_infinite_type("m0", &m0)?;
                check_infinite_type("m1", &m1)?;
                check_coprime(&m0, &m1)?;
            }
            Variant::E | Variant::EOinf | Variant::EOsup => {
                check_infinite_type("n", &n)?;
                check_infinite_type("m0", &m0)?;
                check_infinite_type("m1", &m1)?;
                check_coprime(&m0, &m1)?;
                if !m0.divides(&n) {
                    return Err(Error::constraint(format!("m0 = {m0} does not divide n = {n}")));
                }
                if !m1.divides(&n) {
                    return Err(Error::constraint(format!("m1 = {m1} does not divide n = {n}")));
                }
            }
        }
        debug_assert!(variant != Variant::F || n == one);
        Ok(CatalogEntry { variant, n, m0, m1 })
    }

    pub fn e(n: Supernatural, m0: Supernatural, m1: Supernatural) -> Result<Self> {
        CatalogEntry::new(Variant::E, n, m0, m1)
    }

    pub fn eo_inf(n: Supernatural, m0: Supernatural, m1: Supernatural) -> Result<Self> {
        CatalogEntry::new(Variant::EOinf, n, m0, m1)
    }

    pub fn eo_sup(n: Supernatural, m0: Supernatural, m1: Supernatural) -> Result<Self> {
        CatalogEntry::new(Variant::EOsup, n, m0, m1)
    }

    pub fn f(m0: Supernatural, m1: Supernatural) -> Result<Self> {
        CatalogEntry::new(Variant::F, Supernatural::one(), m0, m1)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// `n`; `1` for `C` and `F`.
    pub fn n(&self) -> &Supernatural {
        &self.n
    }

    pub fn m0(&self) -> &Supernatural {
        &self.m0
    }

    pub fn m1(&self) -> &Supernatural {
        &self.m1
    }

    pub fn is_stably_finite(&self) -> bool {
        matches!(self.variant, Variant::C | Variant::E)
    }

    pub(crate) fn parse_at(cur: &mut Cursor<'_>) -> Result<Self> {
        cur.skip_ws();
        let start = cur.pos();
        let sn = Supernatural::parse_at;
        let at = |e: Error| match e {
            Error::Constraint(msg) => Error::Constraint(format!("{msg} (entry at position {start})")),
            other => other,
        };
        let triple = |cur: &mut Cursor<'_>, variant| -> Result<CatalogEntry> {
            let n = sn(cur)?;
            cur.expect(",")?;
            let m0 = sn(cur)?;
            cur.expect(",")?;
            let m1 = sn(cur)?;
            cur.expect(")")?;
            CatalogEntry::new(variant, n, m0, m1).map_err(at)
        };
        let one = Supernatural::one;
        if cur.eat("EOi(") {
            triple(cur, Variant::EOinf)
        } else if cur.eat("EOs(") {
            triple(cur, Variant::EOsup)
        } else if cur.eat("E(") {
            triple(cur, Variant::E)
        } else if cur.eat("F(") {
            let m0 = sn(cur)?;
            cur.expect(",")?;
            let m1 = sn(cur)?;
            cur.expect(")")?;
            CatalogEntry::f(m0, m1).map_err(at)
        } else if cur.eat("M(") {
            let n = sn(cur)?;
            cur.expect(")")?;
            CatalogEntry::e(n, one(), one()).map_err(at)
        } else if cur.eat("Oinf") {
            CatalogEntry::eo_inf(one(), one(), one())
        } else if cur.eat("Osup") {
            CatalogEntry::eo_sup(one(), one(), one())
        } else if cur.eat("O2") {
            CatalogEntry::f(one(), one())
        } else if cur.eat("C") {
            Ok(CatalogEntry::c())
        } else if cur.eat("Z") {
            Ok(CatalogEntry::jiang_su())
        } else if cur.eat("Q") {
            CatalogEntry::e(Supernatural::universal(), one(), one())
        } else {
            Err(cur.error("a catalog entry (C, E(..), EOi(..), EOs(..), F(..), Z, M(..), Q, O2, Oinf, Osup)"))
        }
    }
}

fn check_infinite_type(name: &str, x: &Supernatural) -> Result<()> {
    if x.is_infinite_type() {
        Ok(())
    } else {
        Err(Error::constraint(format!("{name} = {x} is not of infinite type")))
    }
}

fn check_coprime(m0: &Supernatural, m1: &Supernatural) -> Result<()> {
    if m0.coprime(m1) {
        Ok(())
    } else {
        Err(Error::constraint(format!("m0 = {m0} and m1 = {m1} are not coprime")))
    }
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, m0, m1) = (&self.n, &self.m0, &self.m1);
        match self.variant {
            Variant::C => f.write_str("C"),
            Variant::E => write!(f, "E({n},{m0},{m1})"),
            Variant::EOinf => write!(f, "EOi({n},{m0},{m1})"),
            Variant::EOsup => write!(f, "EOs({n},{m0},{m1})"),
            Variant::F => write!(f, "F({m0},{m1})"),
        }
    }
}

impl FromStr for CatalogEntry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_all(s, CatalogEntry::parse_at)
    }
}

impl Serialize for CatalogEntry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn prufer_parameter(torsion: &AbGroup) -> Supernatural {
    Supernatural::infinite_over(torsion.prufer_primes()).expect("atom primes are prime")
}

/// The catalog entries whose invariant is `k`.
///
/// The answer has two elements only for `(ℤ, 0)` stably finite, which is
/// the invariant of both `ℂ` and `𝒵`.
pub fn classify_stable(k: &GradedKTheory) -> Result<Vec<CatalogEntry>> {
    if let Err(r) = is_flip_admissible(&k.ungraded()) {
        let reasons: Vec<String> = r.diagnostics.iter().map(ToString::to_string).collect();
        return Err(Error::NotInCatalog(format!(
            "K-theory is not admissible: {}",
            reasons.join("; ")
        )));
    }
    let (t0, f0) = k.k0.torsion_split();
    let (t1, f1) = k.k1.torsion_split();
    let (p0, p1) = (prufer_parameter(&t0), prufer_parameter(&t1));
    let rational = |f: &AbGroup| match f.atoms() {
        [Atom::Rational(n)] => n.clone(),
        _ => unreachable!("rank one"),
    };
    let not_in_catalog = |why: &str| Err(Error::NotInCatalog(format!("{k}: {why}")));
    let entry = match (f0.rank(), f1.rank(), k.stably_finite) {
        (1, 0, true) => CatalogEntry::e(rational(&f0), p0, p1),
        (1, 0, false) => CatalogEntry::eo_inf(rational(&f0), p0, p1),
        (0, 1, false) => CatalogEntry::eo_sup(rational(&f1), p1, p0),
        (0, 0, false) => CatalogEntry::f(p0, p1),
        (0, 1, true) => return not_in_catalog("a stably finite entry has its rank-one part in K0"),
        (0, 0, true) => return not_in_catalog("a stably finite entry has a rank-one part"),
        _ => unreachable!("admissible groups have rank at most one"),
    };
    let entry = entry.map_err(|e| Error::NotInCatalog(format!("{k}: {e}")))?;
    if entry == CatalogEntry::jiang_su() {
        Ok(vec![entry, CatalogEntry::c()])
    } else {
        Ok(vec![entry])
    }
}

/// The graded K-theory and finiteness of a catalog entry.
///
/// Fails with `Unsupported` when a torsion parameter has infinitely many
/// primes, since that group is not a finite sum of atoms.
pub fn invariant_of(e: &CatalogEntry) -> Result<GradedKTheory> {
    let q = || AbGroup::rational(e.n.clone());
    let t0 = AbGroup::q_mod_z(&e.m0);
    let t1 = AbGroup::q_mod_z(&e.m1);
    Ok(match e.variant {
        Variant::C => GradedKTheory::unit(),
        Variant::E => GradedKTheory::new(q()?.direct_sum(&t0?), t1?, true),
        Variant::EOinf => GradedKTheory::new(q()?.direct_sum(&t0?), t1?, false),
        Variant::EOsup => GradedKTheory::new(t1?, q()?.direct_sum(&t0?), false),
        Variant::F => GradedKTheory::new(t0?, t1?, false),
    })
}
