//! Acceptance suite. One test per criterion; each prints a single
//! `criterion N ... PASS|FAIL` line before asserting.
//!
//! Every comparison is exact: groups, matrices and catalog entries are
//! compared for equality with zero tolerance. Time budgets are pinned per
//! criterion where one is stated.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use innerflip::classify::{classify_stable, diagnose, invariant_of, is_flip_admissible};
use innerflip::fgoracle::{eta_chase, eta_hom, structure, tensor_fg, tor_fg, FgPresentation, IntMatrix};
use innerflip::kunneth::kunneth_product;
use innerflip::semigroup::{absorbs, hasse, square, tensor_via_formulas, tensor_via_kunneth};
use innerflip::{expr, AbGroup, AdmissibleShape, Atom, CatalogEntry, GradedKTheory, Supernatural, Variant, ViolationKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, name: &str, passed: bool, detail: &str) {
    let status = if passed { "PASS" } else { "FAIL" };
    // Straight to the stdout handle so the line survives output capture.
    let line = format!("criterion {n:>2} {name}: {status} ({detail})\n");
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
}

fn within(elapsed: Duration, budget_secs: u64) -> bool {
    elapsed < Duration::from_secs(budget_secs)
}

fn g(s: &str) -> AbGroup {
    s.parse().unwrap()
}

fn sn(s: &str) -> Supernatural {
    s.parse().unwrap()
}

fn entry(s: &str) -> CatalogEntry {
    s.parse().unwrap()
}

/// Every direct sum of at most three cyclic atoms over p in {2,3,5}, k <= 4.
fn cyclic_sums() -> Vec<AbGroup> {
    let atoms: Vec<Atom> = [2u64, 3, 5]
        .into_iter()
        .flat_map(|p| (1..=4).map(move |k| Atom::Cyclic { p, k }))
        .collect();
    let mut out = vec![AbGroup::zero()];
    for i in 0..atoms.len() {
        out.push(AbGroup::from_atoms([atoms[i].clone()]));
        for j in i..atoms.len() {
            out.push(AbGroup::from_atoms([atoms[i].clone(), atoms[j].clone()]));
            for k in j..atoms.len() {
                out.push(AbGroup::from_atoms([atoms[i].clone(), atoms[j].clone(), atoms[k].clone()]));
            }
        }
    }
    out
}

#[test]
fn criterion_01_oracle_equivalence() {
    let start = Instant::now();
    let groups = cyclic_sums();
    let presentations: Vec<FgPresentation> =
        groups.iter().map(|x| FgPresentation::from_group(x).unwrap()).collect();
    let mut pairs = 0usize;
    let mut mismatches = Vec::new();
    // Both sides are symmetric in their arguments, so unordered pairs suffice;
    // the symmetry itself is checked on a sample below.
    for i in 0..groups.len() {
        for j in i..groups.len() {
            pairs += 1;
            let (a, b) = (&groups[i], &groups[j]);
            let (pa, pb) = (&presentations[i], &presentations[j]);
            if structure(&tensor_fg(pa, pb)) != a.tensor(b) {
                mismatches.push(format!("{a} (x) {b}"));
            }
            if structure(&tor_fg(pa, pb)) != a.tor(b) {
                mismatches.push(format!("Tor({a}, {b})"));
            }
        }
    }
    for i in (0..groups.len()).step_by(37) {
        for j in (0..groups.len()).step_by(41) {
            let (pa, pb) = (&presentations[i], &presentations[j]);
            if structure(&tor_fg(pa, pb)) != structure(&tor_fg(pb, pa)) {
                mismatches.push(format!("Tor symmetry for {} and {}", groups[i], groups[j]));
            }
        }
    }
    let elapsed = start.elapsed();
    let passed = mismatches.is_empty() && within(elapsed, 30);
    report(
        1,
        "oracle equivalence for tensor and Tor",
        passed,
        &format!("{} groups, {pairs} pairs, {} mismatches, {elapsed:.1?}", groups.len(), mismatches.len()),
    );
    assert!(mismatches.is_empty(), "first mismatches: {:?}", &mismatches[..mismatches.len().min(5)]);
    assert!(within(elapsed, 30), "took {elapsed:?}");
}

#[test]
fn criterion_02_eta_identity() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in 2..=12u64 {
        let p = FgPresentation::cyclic(n);
        let m = eta_chase(&p, &p).unwrap();
        if m != IntMatrix::identity(m.rows()) {
            failures.push(format!("n = {n}: {m}"));
        }
        for seed in [11u64, 12] {
            let h = eta_hom(&p, &p, Some(seed)).unwrap();
            if h.matrix != m {
                failures.push(format!("n = {n}, seed {seed}: {}", h.matrix));
            }
        }
    }
    let elapsed = start.elapsed();
    let passed = failures.is_empty() && within(elapsed, 10);
    report(2, "eta is the identity on Tor(Z/n, Z/n)", passed, &format!("n = 2..12, 2 seeds, {elapsed:.1?}"));
    assert!(failures.is_empty(), "{failures:?}");
    assert!(within(elapsed, 10));
}

#[test]
fn criterion_03_prufer_stabilization() {
    let mut grid: Vec<AbGroup> = vec![AbGroup::zero(), AbGroup::integers()];
    for p in [2u64, 3, 5] {
        for k in 1..=4 {
            grid.push(AbGroup::from_atoms([Atom::Cyclic { p, k }]));
            grid.push(AbGroup::from_atoms([Atom::Cyclic { p, k }, Atom::Cyclic { p: 2, k: 1 }]));
        }
    }
    let mut failures = Vec::new();
    let mut cases = 0;
    for p in [2u64, 3, 5] {
        let prufer = AbGroup::from_atoms([Atom::Prufer(p)]);
        for x in &grid {
            let px = FgPresentation::from_group(x).unwrap();
            let expected = prufer.tor(x);
            for j in 4..=7u32 {
                cases += 1;
                let got = structure(&tor_fg(&FgPresentation::cyclic(p.pow(j)), &px));
                if got != expected {
                    failures.push(format!("Tor(Z/{p}^{j}, {x}) = {got}, closed form {expected}"));
                }
            }
        }
    }
    report(3, "Prufer stabilization", failures.is_empty(), &format!("{cases} cases, j = 4..7"));
    assert!(failures.is_empty(), "{failures:?}");
}

/// All ways to distribute the atoms of `g` over the two degrees.
fn gradings(g: &AbGroup, finite: bool) -> Vec<GradedKTheory> {
    let atoms = g.atoms();
    (0..1u32 << atoms.len())
        .map(|mask| {
            let (mut k0, mut k1) = (Vec::new(), Vec::new());
            for (i, a) in atoms.iter().enumerate() {
                if mask >> i & 1 == 0 {
                    k0.push(a.clone());
                } else {
                    k1.push(a.clone());
                }
            }
            GradedKTheory::new(AbGroup::from_atoms(k0), AbGroup::from_atoms(k1), finite)
        })
        .collect()
}

#[test]
fn criterion_04_square_case_table() {
    let mut failures = Vec::new();
    let mut cases = 0;
    for (n_text, m_text) in [("6^inf", "6^inf"), ("2^inf*3^inf", "2^inf*3^inf")] {
        let n = AbGroup::rational(sn(n_text)).unwrap();
        let m = AbGroup::q_mod_z(&sn(m_text)).unwrap();
        // Each admissible shape with the K-theory of A (x) A listed for it.
        let table = [
            (AbGroup::zero(), AbGroup::zero(), AbGroup::zero()),
            (AbGroup::integers(), AbGroup::integers(), AbGroup::zero()),
            (n.clone(), n.clone(), AbGroup::zero()),
            (m.clone(), AbGroup::zero(), m.clone()),
            (n.direct_sum(&m), n.clone(), m.clone()),
        ];
        for (shape, want0, want1) in table {
            for finite in [true, false] {
                for k in gradings(&shape, finite) {
                    cases += 1;
                    let sq = kunneth_product(&k, &k);
                    if !(sq.split_certain && sq.k0 == want0 && sq.k1 == want1) {
                        failures.push(format!("{k} squared to ({}, {}, split {})", sq.k0, sq.k1, sq.split_certain));
                    }
                }
            }
        }
    }
    report(4, "K-theory of A (x) A for the admissible shapes", failures.is_empty(), &format!("{cases} graded inputs"));
    assert!(failures.is_empty(), "{failures:?}");
}

const PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

fn random_subset(rng: &mut ChaCha8Rng, of: &[u64]) -> Vec<u64> {
    of.iter().copied().filter(|_| rng.gen_bool(0.5)).collect()
}

fn infinite(primes: &[u64]) -> Supernatural {
    Supernatural::infinite_over(primes.iter().copied()).unwrap()
}

fn random_e(rng: &mut ChaCha8Rng) -> CatalogEntry {
    let n = random_subset(rng, &PRIMES);
    let (mut m0, mut m1) = (Vec::new(), Vec::new());
    for &p in &n {
        match rng.gen_range(0..3) {
            0 => m0.push(p),
            1 => m1.push(p),
            _ => {}
        }
    }
    CatalogEntry::e(infinite(&n), infinite(&m0), infinite(&m1)).unwrap()
}

fn random_f(rng: &mut ChaCha8Rng) -> CatalogEntry {
    let (mut m0, mut m1) = (Vec::new(), Vec::new());
    for p in PRIMES {
        match rng.gen_range(0..3) {
            0 => m0.push(p),
            1 => m1.push(p),
            _ => {}
        }
    }
    CatalogEntry::f(infinite(&m0), infinite(&m1)).unwrap()
}

#[test]
fn criterion_05_semigroup_cross_validation() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = Vec::new();
    let per_family = 250;
    for family in ["E (x) E", "E (x) F", "F (x) F"] {
        for _ in 0..per_family {
            let (a, b) = match family {
                "E (x) E" => (random_e(&mut rng), random_e(&mut rng)),
                "E (x) F" => (random_e(&mut rng), random_f(&mut rng)),
                _ => (random_f(&mut rng), random_f(&mut rng)),
            };
            let formula = tensor_via_formulas(&a, &b).expect("E/F pair").unwrap();
            let kunneth = tensor_via_kunneth(&a, &b).unwrap();
            if formula != kunneth {
                failures.push(format!("{a} (x) {b}: formulas {formula}, Kunneth {kunneth}"));
            }
        }
    }
    let elapsed = start.elapsed();
    let passed = failures.is_empty() && within(elapsed, 60);
    report(
        5,
        "closed-form products equal Kunneth + classification",
        passed,
        &format!("{} tuples, {elapsed:.1?}", 3 * per_family),
    );
    assert!(failures.is_empty(), "{failures:?}");
    assert!(within(elapsed, 60));
}

#[test]
fn criterion_06_admissibility_fixtures() {
    let mut failures = Vec::new();
    let accepted = [
        ("0", AdmissibleShape::Zero),
        ("Z", AdmissibleShape::Z),
        ("Q[6^inf]", AdmissibleShape::Qn { n: sn("6^inf") }),
        ("Pr[2]+Pr[3]", AdmissibleShape::QmodZ { m: sn("6^inf") }),
        ("Q[6^inf]+Pr[2]+Pr[3]", AdmissibleShape::QnPlusQmodZ { n: sn("6^inf"), m: sn("6^inf") }),
    ];
    for (text, shape) in accepted {
        if is_flip_admissible(&g(text)) != Ok(shape.clone()) {
            failures.push(format!("{text} not accepted as {shape}"));
        }
    }
    // The obstruction each group must be rejected for: a nonzero tensor
    // product or Tor between two summands, or a finite cyclic summand.
    let rejected = [
        ("Z+Z", ViolationKind::NonzeroTensor),
        ("Z+Pr[2]", ViolationKind::NonzeroTensor),
        ("C[2^1]", ViolationKind::CyclicSummand),
        ("Q[2^inf]+Pr[3]", ViolationKind::NonzeroTensor),
        ("Pr[2]+Pr[2]", ViolationKind::NonzeroTor),
    ];
    for (text, kind) in rejected {
        let group = g(text);
        let named: BTreeSet<String> = diagnose(&group)
            .iter()
            .map(|v| v.kind())
            .filter(|k| *k != ViolationKind::RankAboveOne)
            .map(|k| format!("{k:?}"))
            .collect();
        let want = BTreeSet::from([format!("{kind:?}")]);
        if is_flip_admissible(&group).is_ok() || named != want {
            failures.push(format!("{text}: diagnosed {named:?}, expected {want:?}"));
        }
    }
    report(6, "admissibility fixtures", failures.is_empty(), "5 accepted, 5 rejected");
    assert!(failures.is_empty(), "{failures:?}");
}

/// Every valid E, EOi, EOs and F entry with parameters over `primes`, plus C.
fn entry_grid(primes: &[u64]) -> Vec<CatalogEntry> {
    let mut out = vec![CatalogEntry::c()];
    let states = 4usize.pow(primes.len() as u32);
    for code in 0..states {
        let (mut n, mut m0, mut m1) = (Vec::new(), Vec::new(), Vec::new());
        let mut c = code;
        for &p in primes {
            // 0: absent, 1: in n only, 2: in n and m0, 3: in n and m1.
            match c % 4 {
                1 => n.push(p),
                2 => {
                    n.push(p);
                    m0.push(p)
                }
                3 => {
                    n.push(p);
                    m1.push(p)
                }
                _ => {}
            }
            c /= 4;
        }
        let (n, m0, m1) = (infinite(&n), infinite(&m0), infinite(&m1));
        out.push(CatalogEntry::e(n.clone(), m0.clone(), m1.clone()).unwrap());
        out.push(CatalogEntry::eo_inf(n.clone(), m0.clone(), m1.clone()).unwrap());
        out.push(CatalogEntry::eo_sup(n, m0, m1).unwrap());
    }
    for code in 0..3usize.pow(primes.len() as u32) {
        let (mut m0, mut m1) = (Vec::new(), Vec::new());
        let mut c = code;
        for &p in primes {
            match c % 3 {
                1 => m0.push(p),
                2 => m1.push(p),
                _ => {}
            }
            c /= 3;
        }
        out.push(CatalogEntry::f(infinite(&m0), infinite(&m1)).unwrap());
    }
    out
}

#[test]
fn criterion_07_self_absorption_closure() {
    let grid = entry_grid(&PRIMES);
    let mut failures = Vec::new();
    for a in &grid {
        let s = square(a).unwrap();
        if square(&s).unwrap() != s {
            failures.push(format!("square of {a} is {s}, which is not idempotent"));
        }
        // C (x) C = C by convention; C has the invariant of E(1,1,1).
        let in_families = match s.variant() {
            Variant::C => a.variant() == Variant::C,
            Variant::E | Variant::EOinf => s.m0().is_one() && s.m1().divides(s.n()),
            Variant::F => s.m0().is_one(),
            Variant::EOsup => false,
        };
        if !in_families {
            failures.push(format!("square of {a} is {s}, outside the self-absorbing families"));
        }
    }
    report(7, "squares are self-absorbing", failures.is_empty(), &format!("{} entries over primes 2..11", grid.len()));
    assert!(failures.is_empty(), "{:?}", &failures[..failures.len().min(5)]);
}

fn subsets(primes: &[u64]) -> Vec<Vec<u64>> {
    (0..1u32 << primes.len())
        .map(|mask| primes.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect())
        .collect()
}

#[test]
fn criterion_08_e_family_absorption() {
    let mut family = Vec::new();
    for n in subsets(&[2, 3, 5]) {
        for m in subsets(&n) {
            let (n, m) = (infinite(&n), infinite(&m));
            family.push((n.clone(), m.clone(), CatalogEntry::e(n, Supernatural::one(), m).unwrap()));
        }
    }
    let mut disagreements = Vec::new();
    let mut pairs = 0;
    for (n1, m1, a) in &family {
        for (n, m, b) in &family {
            pairs += 1;
            let stated = n1.divides(n) && m.divides(m1);
            let actual = absorbs(a, b).unwrap();
            if actual != stated {
                disagreements.push(format!("absorbs({a}, {b}) = {actual}"));
            }
        }
    }
    report(
        8,
        "E-family absorption iff n'|n and m|m'",
        disagreements.is_empty(),
        &format!("{pairs} pairs, {} disagreements", disagreements.len()),
    );
    for d in disagreements.iter().take(3) {
        println!("    e.g. {d}");
    }
    assert!(disagreements.is_empty(), "{} disagreements, e.g. {:?}", disagreements.len(), &disagreements[..3.min(disagreements.len())]);
}

fn golden(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn criterion_09_golden_diagrams() {
    let six: Vec<CatalogEntry> = ["C", "E(1,1,1)", "EOi(1,1,1)", "E(6^inf,1,2^inf)", "EOi(6^inf,1,2^inf)", "F(1,2^inf)"]
        .into_iter()
        .map(entry)
        .collect();
    let diamond: Vec<CatalogEntry> = ["E(6^inf,1,6^inf)", "E(30^inf,1,6^inf)", "E(6^inf,1,2^inf)", "E(30^inf,1,2^inf)"]
        .into_iter()
        .map(entry)
        .collect();
    let first = hasse(&six).unwrap();
    let second = hasse(&diamond).unwrap();
    let first_ok = first.to_dot() == golden("absorption_catalog.dot") && first.edges.len() == 6;
    let second_ok = second.to_dot() == golden("absorption_e_family.dot") && second.edges.len() == 4;
    report(
        9,
        "Hasse diagrams match golden DOT files",
        first_ok && second_ok,
        &format!("{} and {} edges", first.edges.len(), second.edges.len()),
    );
    assert_eq!(first.to_dot(), golden("absorption_catalog.dot"));
    assert_eq!(second.to_dot(), golden("absorption_e_family.dot"));
}

#[test]
fn criterion_10_round_trips() {
    let mut failures = Vec::new();
    let grid = entry_grid(&[2, 3, 5, 7]);
    for e in &grid {
        let k = invariant_of(e).unwrap();
        if !classify_stable(&k).unwrap().contains(e) {
            failures.push(format!("classification of the invariant of {e} misses it"));
        }
        let text = e.to_string();
        match expr::parse(&text) {
            Ok(x) if x.to_string() == text => {}
            other => failures.push(format!("parse({text}) = {other:?}")),
        }
    }
    let unit = classify_stable(&GradedKTheory::unit()).unwrap();
    if unit != [entry("E(1,1,1)"), CatalogEntry::c()] {
        failures.push(format!("(Z, 0, finite) classified as {unit:?}"));
    }
    // The binary prints canonical forms that it parses back unchanged.
    let bin = env!("CARGO_BIN_EXE_innerflip");
    for e in grid.iter().step_by(97) {
        let out = Command::new(bin).args(["compute", &e.to_string()]).output().unwrap();
        let text = String::from_utf8(out.stdout).unwrap();
        if !out.status.success() || !text.starts_with(&format!("entry: {e}\n")) {
            failures.push(format!("innerflip compute {e} printed {text:?}"));
        }
    }
    report(10, "round trips", failures.is_empty(), &format!("{} entries", grid.len()));
    assert!(failures.is_empty(), "{:?}", &failures[..failures.len().min(5)]);
}
