//! Graded K-theory, the Künneth formula for `K_*(A ⊗ B)`, and the action of
//! the flip on `K_*(A ⊗ A)`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::abgroup::{AbGroup, Atom};
use crate::error::{Error, Result};
use crate::supernatural::{Exponent, Supernatural};
use crate::text::{parse_all, Cursor};

/// `(K₀, K₁)` plus whether the algebra is stably finite.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GradedKTheory {
    pub k0: AbGroup,
    pub k1: AbGroup,
    pub stably_finite: bool,
}

impl GradedKTheory {
    pub fn new(k0: AbGroup, k1: AbGroup, stably_finite: bool) -> Self {
        GradedKTheory {
            k0,
            k1,
            stably_finite,
        }
    }

    /// `K_*(ℂ) = (ℤ, 0)`, the unit for the Künneth product.
    pub fn unit() -> Self {
        GradedKTheory::new(AbGroup::integers(), AbGroup::zero(), true)
    }

    /// `K₀ ⊕ K₁` with the grading forgotten.
    pub fn ungraded(&self) -> AbGroup {
        self.k0.direct_sum(&self.k1)
    }

    pub(crate) fn parse_at(cur: &mut Cursor<'_>) -> Result<Self> {
        cur.expect("K0")?;
        cur.expect("=")?;
        let k0 = AbGroup::parse_at(cur)?;
        cur.expect(";")?;
        cur.expect("K1")?;
        cur.expect("=")?;
        let k1 = AbGroup::parse_at(cur)?;
        cur.expect(";")?;
        cur.expect("finite")?;
        cur.expect("=")?;
        let stably_finite = if cur.eat("yes") {
            true
        } else if cur.eat("no") {
            false
        } else {
            return Err(cur.error("'yes' or 'no'"));
        };
        Ok(GradedKTheory::new(k0, k1, stably_finite))
    }
}

impl fmt::Display for GradedKTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let finite = if self.stably_finite { "yes" } else { "no" };
        write!(f, "K0={};K1={};finite={finite}", self.k0, self.k1)
    }
}

impl FromStr for GradedKTheory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_all(s, GradedKTheory::parse_at)
    }
}

/// `K_*(A ⊗ B)` as computed from `K_*(A)` and `K_*(B)`.
///
/// Each degree is an extension of a `Tor` part by a tensor part. The groups
/// reported are the split extensions; `split_certain` records whether the
/// splitting is forced in both degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KunnethResult {
    pub k0: AbGroup,
    pub k1: AbGroup,
    pub split_certain: bool,
}

impl KunnethResult {
    pub fn with_finiteness(self, stably_finite: bool) -> GradedKTheory {
        GradedKTheory::new(self.k0, self.k1, stably_finite)
    }
}

/// An extension `0 → tensor_part → K → tor_part → 0` is forced to split when
/// the tensor part is `p`-divisible for every prime `p` of the torsion part.
fn extension_splits(tensor_part: &AbGroup, tor_part: &AbGroup) -> bool {
    tor_part.torsion_primes().all(|p| {
        let p_inf = Supernatural::prime_power(p, Exponent::Infinite).expect("atom primes are prime");
        tensor_part.div_split_applies(&p_inf)
    })
}

pub fn kunneth_product(a: &GradedKTheory, b: &GradedKTheory) -> KunnethResult {
    // Tensor parts keep the degree, Tor parts shift it by one.
    let tensor0 = a.k0.tensor(&b.k0).direct_sum(&a.k1.tensor(&b.k1));
    let tensor1 = a.k0.tensor(&b.k1).direct_sum(&a.k1.tensor(&b.k0));
    let tor0 = a.k0.tor(&b.k1).direct_sum(&a.k1.tor(&b.k0));
    let tor1 = a.k0.tor(&b.k0).direct_sum(&a.k1.tor(&b.k1));
    let split_certain = extension_splits(&tensor0, &tor0) && extension_splits(&tensor1, &tor1);
    KunnethResult {
        k0: tensor0.direct_sum(&tor0),
        k1: tensor1.direct_sum(&tor1),
        split_certain,
    }
}

/// A necessary condition for approximately inner flip that `K_*` fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// More than one rank-one torsion-free summand.
    RankAboveOne { rank: usize },
    /// Two distinct summands whose tensor product is nonzero.
    NonzeroTensor {
        left: String,
        right: String,
        product: AbGroup,
    },
    /// Two distinct summands with nonzero `Tor`.
    NonzeroTor {
        left: String,
        right: String,
        tor: AbGroup,
    },
    /// A finite cyclic summand; it reappears in both degrees of `K_*(A ⊗ A)`.
    CyclicSummand { atom: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    RankAboveOne,
    NonzeroTensor,
    NonzeroTor,
    CyclicSummand,
}

impl Violation {
    pub fn kind(&self) -> ViolationKind {
        match self {
            Violation::RankAboveOne { .. } => ViolationKind::RankAboveOne,
            Violation::NonzeroTensor { .. } => ViolationKind::NonzeroTensor,
            Violation::NonzeroTor { .. } => ViolationKind::NonzeroTor,
            Violation::CyclicSummand { .. } => ViolationKind::CyclicSummand,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RankAboveOne { rank } => {
                write!(f, "torsion-free rank {rank} exceeds one")
            }
            Violation::NonzeroTensor {
                left,
                right,
                product,
            } => write!(
                f,
                "summands {left} and {right} have nonzero tensor product {product}; the flip would exchange the two copies"
            ),
            Violation::NonzeroTor { left, right, tor } => write!(
                f,
                "summands {left} and {right} have nonzero Tor {tor}; the flip would exchange the two copies"
            ),
            Violation::CyclicSummand { atom } => write!(
                f,
                "finite cyclic summand {atom} appears in both K0 and K1 of the square"
            ),
        }
    }
}

/// Obstructions between distinct summands: nonzero tensor or `Tor`.
pub(crate) fn pair_violations(atoms: &[Atom]) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, x) in atoms.iter().enumerate() {
        for y in &atoms[i + 1..] {
            if let Some(t) = x.tensor(y) {
                out.push(Violation::NonzeroTensor {
                    left: x.to_string(),
                    right: y.to_string(),
                    product: AbGroup::from_atoms([t]),
                });
            }
            if let Some(t) = x.tor(y) {
                out.push(Violation::NonzeroTor {
                    left: x.to_string(),
                    right: y.to_string(),
                    tor: AbGroup::from_atoms([t]),
                });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "reasons", rename_all = "snake_case")]
pub enum FlipVerdict {
    IdentityOnKTheory,
    Obstructed(Vec<Violation>),
    Undetermined(Vec<Violation>),
}

/// How the flip acts on `K_*(A ⊗ A)`.
///
/// The flip acts through the tensor flip on `K_*(A) ⊗ K_*(A)` and through
/// `η` on `Tor(K_*(A), K_*(A))`. Between two distinct summands it swaps
/// the summand pair, so any nonzero cross term is an obstruction. On a
/// summand paired with itself it is the identity for rank-one torsion-free
/// atoms (the tensor flip) and for Prüfer atoms (`η` on `ℚ_{p^∞}/ℤ`).
/// Finite cyclic summands are left undetermined here: their obstruction
/// only appears one level up, in `K_*(A ⊗ A)` itself.
pub fn flip_action(k: &GradedKTheory) -> FlipVerdict {
    let g = k.ungraded();
    let pairs = pair_violations(g.atoms());
    if !pairs.is_empty() {
        return FlipVerdict::Obstructed(pairs);
    }
    let cyclic: Vec<Violation> = g
        .atoms()
        .iter()
        .filter(|a| !self_flip_is_trivial(a))
        .map(|a| Violation::CyclicSummand { atom: a.to_string() })
        .collect();
    if cyclic.is_empty() {
        FlipVerdict::IdentityOnKTheory
    } else {
        FlipVerdict::Undetermined(cyclic)
    }
}

fn self_flip_is_trivial(a: &Atom) -> bool {
    match a {
        Atom::Rational(_) | Atom::Prufer(_) => true,
        Atom::Cyclic { .. } => false,
    }
}

/// `Ext(source, target) = 0`, decided atom by atom: free atoms have no
/// extensions, and `ℚ_n`, `ℚ_{p^∞}/ℤ`, `ℤ/p^k` have none into an
/// `n`-divisible (resp. `p`-divisible) group.
pub fn ext_vanishes(source: &AbGroup, target: &AbGroup) -> bool {
    source.atoms().iter().all(|a| match a {
        Atom::Rational(n) if n.is_one() => true,
        Atom::Rational(n) => target.div_split_applies(n),
        Atom::Prufer(p) | Atom::Cyclic { p, .. } => {
            let p_inf = Supernatural::prime_power(*p, Exponent::Infinite).expect("atom primes are prime");
            target.div_split_applies(&p_inf)
        }
    })
}

/// Whether the flip on `A ⊗ A` is forced to agree with the identity in KK.
///
/// This holds exactly for the admissible K-theory shapes. For those, the
/// flip acts as the identity on `K_*(A ⊗ A)`, the Künneth extensions of
/// `K_*(A ⊗ A)` split, and `Ext(K_i(A⊗A), K_{1-i}(A⊗A))` vanishes in both
/// degrees, so the universal coefficient sequence leaves no room for a
/// nontrivial KK-class.
pub fn kk_identity_flip(k: &GradedKTheory) -> bool {
    if crate::classify::is_flip_admissible(&k.ungraded()).is_err() {
        return false;
    }
    let square = kunneth_product(k, k);
    flip_action(k) == FlipVerdict::IdentityOnKTheory
        && square.split_certain
        && ext_vanishes(&square.k0, &square.k1)
        && ext_vanishes(&square.k1, &square.k0)
}
