//! Seeded cross-validation of the closed-form rules against the exact
//! oracle and against each other. Each check reports how many cases it ran
//! and the first disagreement it found.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::abgroup::{AbGroup, Atom};
use crate::classify::{classify_stable, diagnose, invariant_of, is_flip_admissible, CatalogEntry};
use crate::error::Result;
use crate::expr;
use crate::fgoracle::{eta_chase, eta_hom, structure, tensor_fg, tor_fg, FgPresentation, IntMatrix};
use crate::kunneth::{flip_action, kunneth_product, FlipVerdict, GradedKTheory};
use crate::semigroup::{absorbs, square, tensor_via_formulas, tensor_via_kunneth};
use crate::supernatural::Supernatural;

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    /// The first failing case, if any.
    pub failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

struct Check {
    name: &'static str,
    cases: usize,
    failure: Option<String>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check {
            name,
            cases: 0,
            failure: None,
        }
    }

    fn case(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(describe());
        }
    }

    fn result(&mut self, r: Result<bool>, describe: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.case(ok, describe),
            Err(e) => {
                let d = describe();
                self.case(false, || format!("{d}: {e}"))
            }
        }
    }

    fn finish(self) -> CheckOutcome {
        CheckOutcome {
            name: self.name,
            cases: self.cases,
            failure: self.failure,
        }
    }
}

const PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

fn random_cyclic_sum(rng: &mut ChaCha8Rng, max_atoms: usize) -> AbGroup {
    let count = rng.gen_range(0..=max_atoms);
    AbGroup::from_atoms((0..count).map(|_| Atom::Cyclic {
        p: *[2u64, 3, 5].choose(rng).expect("nonempty"),
        k: rng.gen_range(1..=4),
    }))
}

fn random_infinite(rng: &mut ChaCha8Rng, primes: &[u64]) -> Supernatural {
    Supernatural::infinite_over(primes.iter().copied().filter(|_| rng.gen_bool(0.5))).expect("primes")
}

/// A valid entry of the given variant index (0 = E, 1 = F, 2 = EOi, 3 = EOs)
/// over `primes`.
fn random_entry(rng: &mut ChaCha8Rng, variant: u8) -> CatalogEntry {
    let n = random_infinite(rng, &PRIMES);
    let (mut m0, mut m1) = (Vec::new(), Vec::new());
    for &p in &PRIMES {
        let in_range = variant == 1 || n.prime_set().contains(p);
        match rng.gen_range(0..3) {
            0 if in_range => m0.push(p),
            1 if in_range => m1.push(p),
            _ => {}
        }
    }
    let m0 = Supernatural::infinite_over(m0).expect("primes");
    let m1 = Supernatural::infinite_over(m1).expect("primes");
    match variant {
        0 => CatalogEntry::e(n, m0, m1),
        1 => CatalogEntry::f(m0, m1),
        2 => CatalogEntry::eo_inf(n, m0, m1),
        _ => CatalogEntry::eo_sup(n, m0, m1),
    }
    .expect("constructed within the constraints")
}

fn oracle_tensor_tor(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut c = Check::new("tensor and Tor of cyclic sums agree with the Smith normal form oracle");
    for _ in 0..400 {
        let a = random_cyclic_sum(rng, 3);
        let b = random_cyclic_sum(rng, 3);
        let (pa, pb) = (FgPresentation::from_group(&a), FgPresentation::from_group(&b));
        let (pa, pb) = match (pa, pb) {
            (Ok(x), Ok(y)) => (x, y),
            _ => {
                c.case(false, || format!("no presentation for {a} or {b}"));
                continue;
            }
        };
        c.case(structure(&tensor_fg(&pa, &pb)) == a.tensor(&b), || format!("{a} (x) {b}"));
        c.case(structure(&tor_fg(&pa, &pb)) == a.tor(&b), || format!("Tor({a}, {b})"));
    }
    c.finish()
}

fn eta_identity(seed: u64) -> CheckOutcome {
    let mut c = Check::new("eta is the identity on Tor(Z/n, Z/n)");
    for n in 2..=12u64 {
        let p = FgPresentation::cyclic(n);
        let plain = eta_chase(&p, &p);
        c.result(plain.map(|m| m == IntMatrix::identity(m.rows())), || format!("n = {n}"));
        for s in [seed, seed.wrapping_add(1)] {
            c.result(eta_hom(&p, &p, Some(s)).map(|h| h.is_identity()), || {
                format!("n = {n}, lift seed {s}")
            });
        }
    }
    c.finish()
}

fn prufer_stabilization(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut c = Check::new("Tor(Z/p^j, X) stabilizes at Tor(Pr[p], X)");
    for _ in 0..60 {
        let x = random_cyclic_sum(rng, 2);
        let px = FgPresentation::from_group(&x).expect("cyclic atoms");
        for p in [2u64, 3, 5] {
            let expected = AbGroup::from_atoms([Atom::Prufer(p)]).tor(&x);
            for j in 4..=6u32 {
                let got = structure(&tor_fg(&FgPresentation::cyclic(p.pow(j)), &px));
                c.case(got == expected, || format!("Tor(Z/{p}^{j}, {x}) = {got}, expected {expected}"));
            }
        }
    }
    c.finish()
}

fn square_case_table() -> CheckOutcome {
    let mut c = Check::new("K-theory of A (x) A for the admissible shapes");
    let n = "Q[6^inf]";
    let m = "Pr[2]+Pr[3]";
    // (K0, K1) of the input and the expected (K0, K1) of its square.
    let table = [
        ("0", "0", "0", "0"),
        ("Z", "0", "Z", "0"),
        (n, "0", n, "0"),
        ("0", m, "0", m),
        (m, "0", "0", m),
        ("Pr[2]", "Pr[3]", "0", m),
        (&format!("{n}+{m}"), "0", n, m),
        (&format!("{n}+Pr[2]"), "Pr[3]", n, m),
        (n, m, n, m),
    ];
    for (k0, k1, s0, s1) in table {
        let k = GradedKTheory::new(k0.parse().expect("fixture"), k1.parse().expect("fixture"), true);
        let sq = kunneth_product(&k, &k);
        let want: (AbGroup, AbGroup) = (s0.parse().expect("fixture"), s1.parse().expect("fixture"));
        c.case(sq.split_certain && (sq.k0.clone(), sq.k1.clone()) == want, || {
            format!("({k0}, {k1}) squared to ({}, {})", sq.k0, sq.k1)
        });
    }
    c.finish()
}

fn semigroup_cross_validation(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut c = Check::new("closed-form products agree with Kunneth and classification");
    for (va, vb) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        for _ in 0..60 {
            let a = random_entry(rng, va);
            let b = random_entry(rng, vb);
            let r = match tensor_via_formulas(&a, &b) {
                Some(f) => f.and_then(|f| Ok(f == tensor_via_kunneth(&a, &b)?)),
                None => Ok(false),
            };
            c.result(r, || format!("{a} (x) {b}"));
        }
    }
    c.finish()
}

fn admissibility_fixtures() -> CheckOutcome {
    let mut c = Check::new("admissibility and diagnostics agree");
    for ok in ["0", "Z", "Q[6^inf]", "Pr[2]+Pr[3]", "Q[6^inf]+Pr[2]+Pr[3]"] {
        let g: AbGroup = ok.parse().expect("fixture");
        c.case(is_flip_admissible(&g).is_ok() && diagnose(&g).is_empty(), || format!("{ok} rejected"));
    }
    for bad in ["Z+Z", "Z+Pr[2]", "C[2]", "Q[2^inf]+Pr[3]", "Pr[2]+Pr[2]"] {
        let g: AbGroup = bad.parse().expect("fixture");
        c.case(is_flip_admissible(&g).is_err() && !diagnose(&g).is_empty(), || format!("{bad} accepted"));
    }
    c.finish()
}

fn identity_flip_closure(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut c = Check::new("identity flip on K-theory is closed under squaring");
    for _ in 0..200 {
        let atoms: Vec<Atom> = (0..rng.gen_range(0..4))
            .map(|_| match rng.gen_range(0..3) {
                0 => Atom::Rational(random_infinite(rng, &[2, 3, 5])),
                1 => Atom::Prufer(*[2u64, 3, 5].choose(rng).expect("nonempty")),
                _ => Atom::Cyclic {
                    p: *[2u64, 3, 5].choose(rng).expect("nonempty"),
                    k: rng.gen_range(1..3),
                },
            })
            .collect();
        let split = rng.gen_range(0..=atoms.len());
        let k = GradedKTheory::new(
            AbGroup::from_atoms(atoms[..split].to_vec()),
            AbGroup::from_atoms(atoms[split..].to_vec()),
            rng.gen_bool(0.5),
        );
        if flip_action(&k) == FlipVerdict::IdentityOnKTheory {
            let sq = kunneth_product(&k, &k).with_finiteness(k.stably_finite);
            c.case(flip_action(&sq) == FlipVerdict::IdentityOnKTheory, || format!("{k}"));
        }
    }
    c.finish()
}

fn self_absorption(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut c = Check::new("squares are self-absorbing");
    for _ in 0..200 {
        let variant = rng.gen_range(0..4);
        let a = random_entry(rng, variant);
        let r = square(&a).and_then(|s| Ok(square(&s)? == s && s.m0().is_one() && absorbs(&s, &s)?));
        c.result(r, || format!("{a}"));
    }
    c.finish()
}

fn e_family_absorption() -> CheckOutcome {
    let mut c = Check::new("E(n',1,m') absorbed by E(n,1,m) iff n' | n and gcd(m, n') | m'");
    let subsets: Vec<Vec<u64>> = (0..8u32)
        .map(|mask| [2u64, 3, 5].into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p).collect())
        .collect();
    let mut entries = Vec::new();
    for n in &subsets {
        for m in subsets.iter().filter(|m| m.iter().all(|p| n.contains(p))) {
            let n = Supernatural::infinite_over(n.clone()).expect("primes");
            let m = Supernatural::infinite_over(m.clone()).expect("primes");
            entries.push((n.clone(), m.clone(), CatalogEntry::e(n, Supernatural::one(), m).expect("m | n")));
        }
    }
    for (n1, m1, a) in &entries {
        for (n, m, b) in &entries {
            let criterion = n1.divides(n) && m.gcd(n1).divides(m1);
            c.result(absorbs(a, b).map(|x| x == criterion), || format!("{a} absorbed by {b}"));
        }
    }
    c.finish()
}

fn round_trips(rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut c = Check::new("classification, parsing and formatting round trips");
    for _ in 0..200 {
        let variant = rng.gen_range(0..4);
        let e = random_entry(rng, variant);
        let r = invariant_of(&e).and_then(|k| Ok(classify_stable(&k)?.contains(&e)));
        c.result(r, || format!("classify(invariant({e}))"));
        let text = e.to_string();
        c.result(expr::parse(&text).map(|x| x.to_string() == text), || format!("parse({text})"));
    }
    let unit = classify_stable(&GradedKTheory::unit());
    c.case(unit == Ok(vec![CatalogEntry::jiang_su(), CatalogEntry::c()]), || format!("{unit:?}"));
    c.finish()
}

/// Runs every check with randomness drawn from `seed`.
pub fn run(seed: u64) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        oracle_tensor_tor(&mut rng),
        eta_identity(seed),
        prufer_stabilization(&mut rng),
        square_case_table(),
        semigroup_cross_validation(&mut rng),
        admissibility_fixtures(),
        identity_flip_closure(&mut rng),
        self_absorption(&mut rng),
        e_family_absorption(),
        round_trips(&mut rng),
    ]
}
