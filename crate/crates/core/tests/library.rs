use innerflip::classify::{classify_stable, invariant_of};
use innerflip::fgoracle::{structure, tensor_fg, tor_fg, FgPresentation};
use innerflip::semigroup::{absorbs, hasse, infinite_power, tensor_catalog};
use innerflip::{expr, AbGroup, CatalogEntry, Error, GradedKTheory, Variant};
use proptest::prelude::*;

fn entry(s: &str) -> CatalogEntry {
    s.parse().unwrap()
}

#[test]
fn named_algebras_multiply() {
    let cases = [
        ("Z @ Z", "E(1,1,1)"),
        ("Z @ O2", "F(1,1)"),
        ("Q @ O2", "F(1,1)"),
        ("M(2^inf) @ M(3^inf)", "E(2^inf*3^inf,1,1)"),
        ("Osup @ Osup", "EOi(1,1,1)"),
    ];
    for (input, expected) in cases {
        assert_eq!(expr::eval(input).unwrap().entry.to_string(), expected, "{input}");
    }
}

#[test]
fn invariants_classify_back() {
    for s in ["E(2^inf,1,2^inf)", "F(3^inf,2^inf)", "EOi(U,1,1)", "E(1,1,1)"] {
        let e = entry(s);
        let k = invariant_of(&e).unwrap();
        assert!(classify_stable(&k).unwrap().contains(&e), "{s}");
    }
}

#[test]
fn infinite_power_is_idempotent_under_tensor() {
    let e = entry("E(2^inf*3^inf,2^inf,3^inf)");
    let p = infinite_power(&e).unwrap();
    assert_eq!(tensor_catalog(&p, &p).unwrap(), p);
    assert!(absorbs(&p, &p).unwrap());
    assert!(matches!(infinite_power(&entry("Oinf")), Err(Error::Unsupported(_))));
}

#[test]
fn hasse_rejects_repeats() {
    let e = entry("F(1,1)");
    assert!(hasse(&[e.clone(), e]).is_err());
}

#[test]
fn outside_the_catalog() {
    let k = GradedKTheory::new("Z+Z".parse().unwrap(), AbGroup::zero(), true);
    assert!(matches!(classify_stable(&k), Err(Error::NotInCatalog(_))));
}

#[test]
fn oracle_matches_closed_form_on_a_few_groups() {
    let specs: [&[u64]; 4] = [&[4], &[0, 6], &[2, 2, 8], &[9, 0]];
    for a in specs {
        for b in specs {
            let (pa, pb) = (FgPresentation::from_invariant_factors(a), FgPresentation::from_invariant_factors(b));
            let (ga, gb) = (structure(&pa), structure(&pb));
            assert!(structure(&tensor_fg(&pa, &pb)).is_isomorphic(&ga.tensor(&gb)));
            assert!(structure(&tor_fg(&pa, &pb)).is_isomorphic(&ga.tor(&gb)));
        }
    }
}

fn uhf(primes: &[u64]) -> CatalogEntry {
    if primes.is_empty() {
        return entry("M(1)");
    }
    let n: Vec<String> = primes.iter().map(|p| format!("{p}^inf")).collect();
    entry(&format!("M({})", n.join("*")))
}

proptest! {
    #[test]
    fn uhf_tensor_is_union(
        a in prop::sample::subsequence(vec![2u64, 3, 5, 7], 0..=4),
        b in prop::sample::subsequence(vec![2u64, 3, 5, 7], 0..=4),
    ) {
        let xy = tensor_catalog(&uhf(&a), &uhf(&b)).unwrap();
        prop_assert_eq!(xy.variant(), Variant::E);
        let mut union: Vec<u64> = a.iter().chain(&b).copied().collect();
        union.sort();
        union.dedup();
        prop_assert_eq!(xy, uhf(&union));
    }
}
