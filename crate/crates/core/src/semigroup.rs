//! The tensor semigroup on catalog entries: products, squares, infinite
//! tensor powers and the absorption order with its Hasse diagram.

use std::fmt::Write as _;

use crate::classify::{classify_stable, invariant_of, CatalogEntry, Variant};
use crate::error::{Error, Result};
use crate::kunneth::kunneth_product;
use crate::supernatural::{PrimeSet, Supernatural};

fn set(x: &Supernatural) -> PrimeSet {
    x.prime_set()
}

fn union_all(parts: impl IntoIterator<Item = PrimeSet>) -> Supernatural {
    let s = parts.into_iter().fold(PrimeSet::empty(), |acc, p| acc.union(&p));
    Supernatural::from_prime_set(&s)
}

/// Closed-form products for pairs drawn from the `E` and `F` families, with
/// `C` standing in for `E(1,1,1)`. `None` for any other pair.
pub fn tensor_via_formulas(a: &CatalogEntry, b: &CatalogEntry) -> Option<Result<CatalogEntry>> {
    use Variant::*;
    let promote = |x: &CatalogEntry| match x.variant() {
        C => CatalogEntry::jiang_su(),
        _ => x.clone(),
    };
    let (a, b) = (promote(a), promote(b));
    let (a0, a1, b0, b1) = (set(a.m0()), set(a.m1()), set(b.m0()), set(b.m1()));
    // Torsion meets torsion through Tor, in the opposite parity.
    let cross0 = a0.intersection(&b1).union(&b0.intersection(&a1));
    let cross1 = a1.intersection(&b1).union(&a0.intersection(&b0));
    match (a.variant(), b.variant()) {
        (E, E) => {
            let (na, nb) = (set(a.n()), set(b.n()));
            let m0 = union_all([a0.difference(&nb), b0.difference(&na), cross0]);
            let m1 = union_all([a1.difference(&nb), b1.difference(&na), cross1]);
            Some(CatalogEntry::e(a.n().mul(b.n()), m0, m1))
        }
        (E, F) | (F, E) => {
            let (e, f) = if a.variant() == E { (&a, &b) } else { (&b, &a) };
            let n = set(e.n());
            let m0 = union_all([set(f.m0()).difference(&n), cross0]);
            let m1 = union_all([set(f.m1()).difference(&n), cross1]);
            Some(CatalogEntry::f(m0, m1))
        }
        (F, F) => Some(CatalogEntry::f(
            Supernatural::from_prime_set(&cross0),
            Supernatural::from_prime_set(&cross1),
        )),
        _ => None,
    }
}

/// The product computed from invariants: Künneth, then classification.
pub fn tensor_via_kunneth(a: &CatalogEntry, b: &CatalogEntry) -> Result<CatalogEntry> {
    let product = kunneth_product(&invariant_of(a)?, &invariant_of(b)?);
    if !product.split_certain {
        return Err(Error::internal(format!(
            "Künneth extension for {a} and {b} is not forced to split"
        )));
    }
    let k = product.with_finiteness(a.is_stably_finite() && b.is_stably_finite());
    let entries = classify_stable(&k)?;
    entries
        .into_iter()
        .find(|e| e.variant() != Variant::C)
        .ok_or_else(|| Error::internal(format!("{k} classified only as C")))
}

pub fn tensor_catalog(a: &CatalogEntry, b: &CatalogEntry) -> Result<CatalogEntry> {
    if a.variant() == Variant::C && b.variant() == Variant::C {
        return Ok(CatalogEntry::c());
    }
    match tensor_via_formulas(a, b) {
        Some(r) => r,
        None => tensor_via_kunneth(a, b),
    }
}

pub fn square(a: &CatalogEntry) -> Result<CatalogEntry> {
    tensor_catalog(a, a)
}

/// Whether `b ≅ a ⊗ b` at the level of stable invariants.
pub fn absorbs(a: &CatalogEntry, b: &CatalogEntry) -> Result<bool> {
    Ok(tensor_catalog(a, b)? == *b)
}

/// The infinite tensor power `a^{⊗∞}`, through `a ⊗ a` which is always
/// self-absorbing: `E(n,1,m) ↦ E(n,1,1)` and `F(1,m) ↦ F(1,1)`.
pub fn infinite_power(a: &CatalogEntry) -> Result<CatalogEntry> {
    match a.variant() {
        Variant::C => return Ok(CatalogEntry::c()),
        Variant::EOinf | Variant::EOsup => {
            return Err(Error::Unsupported(format!(
                "infinite tensor power of {a}: no closed form for O_inf or O^inf factors"
            )))
        }
        Variant::E | Variant::F => {}
    }
    let s = square(a)?;
    let one = Supernatural::one();
    match s.variant() {
        Variant::E if s.m0().is_one() => CatalogEntry::e(s.n().clone(), one.clone(), one),
        Variant::F if s.m0().is_one() => CatalogEntry::f(one.clone(), one),
        _ => Err(Error::internal(format!("square of {a} is {s}, which is not self-absorbing"))),
    }
}

/// The covering relation of the absorption order on a finite set of entries.
///
/// Edges point from the absorbed entry to the absorbing one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HasseDiagram {
    pub nodes: Vec<CatalogEntry>,
    /// Index pairs `(absorbed, absorbing)`, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl HasseDiagram {
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph absorption {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{n}\"];");
        }
        for (a, b) in &self.edges {
            let _ = writeln!(out, "  n{a} -> n{b};");
        }
        out.push_str("}\n");
        out
    }

    /// Edges as `(absorbed, absorbing)` label pairs.
    pub fn edge_labels(&self) -> Vec<(String, String)> {
        self.edges
            .iter()
            .map(|&(a, b)| (self.nodes[a].to_string(), self.nodes[b].to_string()))
            .collect()
    }
}

/// Nodes keep the input order; edges are sorted by node index.
pub fn hasse(entries: &[CatalogEntry]) -> Result<HasseDiagram> {
    let k = entries.len();
    for (i, e) in entries.iter().enumerate() {
        if entries[..i].contains(e) {
            return Err(Error::constraint(format!("{e} is listed twice")));
        }
    }
    let mut below = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            if i != j {
                below[i][j] = absorbs(&entries[i], &entries[j])?;
            }
        }
    }
    let mut edges = Vec::new();
    for i in 0..k {
        for j in 0..k {
            let covered = below[i][j] && !(0..k).any(|m| m != i && m != j && below[i][m] && below[m][j]);
            if covered {
                edges.push((i, j));
            }
        }
    }
    Ok(HasseDiagram {
        nodes: entries.to_vec(),
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn entry(s: &str) -> CatalogEntry {
        s.parse().unwrap()
    }

    fn product(a: &str, b: &str) -> String {
        tensor_catalog(&entry(a), &entry(b)).unwrap().to_string()
    }

    #[test]
    fn product_examples() {
        assert_eq!(product("E(6^inf,2^inf,3^inf)", "E(6^inf,2^inf,3^inf)"), "E(2^inf*3^inf,1,2^inf*3^inf)");
        assert_eq!(product("E(6^inf,1,2^inf)", "E(6^inf,1,2^inf)"), "E(2^inf*3^inf,1,2^inf)");
        assert_eq!(product("Osup", "Osup"), "EOi(1,1,1)");
        assert_eq!(product("O2", "Z"), "F(1,1)");
        assert_eq!(product("C", "C"), "C");
        assert_eq!(product("C", "Z"), "E(1,1,1)");
        assert_eq!(product("Oinf", "M(2^inf)"), "EOi(2^inf,1,1)");
        assert_eq!(product("Osup", "E(6^inf,2^inf,3^inf)"), "EOs(2^inf*3^inf,2^inf,3^inf)");
    }

    #[test]
    fn square_examples() {
        assert_eq!(square(&entry("F(2^inf,3^inf)")).unwrap().to_string(), "F(1,2^inf*3^inf)");
        assert_eq!(square(&entry("Z")).unwrap(), CatalogEntry::jiang_su());
    }

    #[test]
    fn absorption_examples() {
        assert!(absorbs(&entry("Z"), &entry("E(6^inf,1,2^inf)")).unwrap());
        assert!(absorbs(&entry("E(6^inf,1,6^inf)"), &entry("E(30^inf,1,2^inf)")).unwrap());
        assert!(!absorbs(&entry("O2"), &entry("Z")).unwrap());
        assert!(absorbs(&entry("Z"), &entry("O2")).unwrap());
    }

    #[test]
    fn infinite_powers() {
        let p = |s: &str| infinite_power(&entry(s)).map(|e| e.to_string());
        assert_eq!(p("E(6^inf,1,2^inf)").unwrap(), "E(2^inf*3^inf,1,1)");
        assert_eq!(p("F(1,U)").unwrap(), "F(1,1)");
        assert_eq!(p("Z").unwrap(), "E(1,1,1)");
        assert_eq!(p("C").unwrap(), "C");
        assert_eq!(p("F(2^inf,3^inf)").unwrap(), "F(1,1)");
        assert!(matches!(p("Oinf"), Err(Error::Unsupported(_))));
        assert!(matches!(p("EOs(2^inf,1,1)"), Err(Error::Unsupported(_))));
    }

    #[test]
    fn hasse_basics() {
        let one = hasse(&[entry("Z")]).unwrap();
        assert!(one.edges.is_empty());
        assert_eq!(one.to_dot(), "digraph absorption {\n  n0 [label=\"E(1,1,1)\"];\n}\n");
        assert!(hasse(&[entry("Z"), entry("E(1,1,1)")]).is_err());
        let chain = hasse(&[entry("C"), entry("Z"), entry("O2")]).unwrap();
        assert_eq!(chain.edges, [(0, 1), (1, 2)]);
    }

    fn arb_infinite() -> impl Strategy<Value = Supernatural> {
        prop::sample::subsequence(vec![2u64, 3, 5, 7, 11], 0..=5)
            .prop_map(|ps| Supernatural::infinite_over(ps).unwrap())
    }

    fn arb_entry() -> impl Strategy<Value = CatalogEntry> {
        (0u8..5, arb_infinite(), arb_infinite(), arb_infinite()).prop_map(|(v, n, a, b)| {
            let m0 = Supernatural::from_prime_set(&a.prime_set().intersection(&n.prime_set()));
            let m1 = Supernatural::from_prime_set(
                &b.prime_set().intersection(&n.prime_set()).difference(&m0.prime_set()),
            );
            match v {
                0 => CatalogEntry::c(),
                1 => CatalogEntry::e(n, m0, m1).unwrap(),
                2 => CatalogEntry::eo_inf(n, m0, m1).unwrap(),
                3 => CatalogEntry::eo_sup(n, m0, m1).unwrap(),
                _ => CatalogEntry::f(a.clone(), Supernatural::from_prime_set(&b.prime_set().difference(&a.prime_set())))
                    .unwrap(),
            }
        })
    }

    proptest! {
        #[test]
        fn formulas_match_kunneth(a in arb_entry(), b in arb_entry()) {
            if let Some(f) = tensor_via_formulas(&a, &b) {
                prop_assert_eq!(f.unwrap(), tensor_via_kunneth(&a, &b).unwrap());
            }
        }

        #[test]
        fn commutative_and_associative(a in arb_entry(), b in arb_entry(), c in arb_entry()) {
            prop_assert_eq!(tensor_catalog(&a, &b).unwrap(), tensor_catalog(&b, &a).unwrap());
            let ab_c = tensor_catalog(&tensor_catalog(&a, &b).unwrap(), &c).unwrap();
            let a_bc = tensor_catalog(&a, &tensor_catalog(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
        }

        #[test]
        fn squares_are_self_absorbing(a in arb_entry()) {
            let s = square(&a).unwrap();
            prop_assert_eq!(square(&s).unwrap(), s.clone());
            prop_assert!(absorbs(&s, &s).unwrap());
            prop_assert!(s.m0().is_one());
            prop_assert!(s.m1().divides(s.n()) || s.variant() == Variant::F || s.variant() == Variant::C);
            prop_assert!(matches!(s.variant(), Variant::C | Variant::E | Variant::EOinf | Variant::F));
            prop_assert_eq!(absorbs(&a, &a).unwrap(), square(&a).unwrap() == a);
        }

        #[test]
        fn absorption_is_transitive(a in arb_entry(), b in arb_entry(), c in arb_entry()) {
            if absorbs(&a, &b).unwrap() && absorbs(&b, &c).unwrap() {
                prop_assert!(absorbs(&a, &c).unwrap());
            }
        }
    }
}
