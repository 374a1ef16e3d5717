//! Brute-force oracle over finitely generated abelian groups.
//!
//! Groups are cokernels of integer matrices. Tensor products and `Tor` are
//! computed from free resolutions with exact integer linear algebra, and the
//! natural isomorphism `η: Tor(G₁, G₂) → Tor(G₂, G₁)` induced by the flip is
//! computed by chasing elements through the double complex
//!
//! ```text
//!   H₁⊗H₂ → H₁⊗F₂ → H₁⊗G₂
//!     ↓        ↓        ↓
//!   F₁⊗H₂ → F₁⊗F₂ → F₁⊗G₂
//!     ↓        ↓        ↓
//!   G₁⊗H₂ → G₁⊗F₂ → G₁⊗G₂
//! ```
//!
//! Nothing here shares code with the closed-form tables in [`crate::abgroup`].

mod matrix;
mod snf;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abgroup::{AbGroup, Atom};
use crate::error::{Error, Result};

pub use matrix::IntMatrix;
pub use snf::{invariant_factors, smith_normal_form, Smith};

/// `ℤ^generators / (column span of relations)`.
#[derive(Clone, PartialEq, Eq)]
pub struct FgPresentation {
    relations: IntMatrix,
}

impl FgPresentation {
    /// The relation matrix has one row per generator and one column per relation.
    pub fn new(relations: IntMatrix) -> Self {
        FgPresentation { relations }
    }

    pub fn free(rank: usize) -> Self {
        FgPresentation::new(IntMatrix::zeros(rank, 0))
    }

    /// `ℤ/n`; `n = 0` gives `ℤ`.
    pub fn cyclic(n: u64) -> Self {
        FgPresentation::new(IntMatrix::from_rows(&[[n as i64]]))
    }

    /// `⊕ ℤ/dᵢ` with a diagonal relation matrix. A zero factor is a copy of `ℤ`.
    pub fn from_invariant_factors(factors: &[u64]) -> Self {
        let diag: Vec<BigInt> = factors.iter().map(|&d| BigInt::from(d)).collect();
        FgPresentation::new(IntMatrix::diagonal(factors.len(), factors.len(), &diag))
    }

    /// A presentation of a group from the closed-form calculus. Only cyclic
    /// atoms and `ℤ` are finitely generated.
    pub fn from_group(g: &AbGroup) -> Result<Self> {
        let mut factors = Vec::new();
        for a in g.atoms() {
            match a {
                Atom::Rational(n) if n.is_one() => factors.push(0),
                Atom::Cyclic { p, k } => {
                    let d = p.checked_pow(*k).ok_or_else(|| {
                        Error::Unsupported(format!("{p}^{k} does not fit in 64 bits"))
                    })?;
                    factors.push(d)
                }
                other => {
                    return Err(Error::Unsupported(format!(
                        "{other} is not finitely generated"
                    )))
                }
            }
        }
        Ok(FgPresentation::from_invariant_factors(&factors))
    }

    pub fn generators(&self) -> usize {
        self.relations.rows()
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn direct_sum(&self, other: &FgPresentation) -> FgPresentation {
        let (a, b) = (&self.relations, &other.relations);
        let mut m = IntMatrix::zeros(a.rows() + b.rows(), a.cols() + b.cols());
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                m[(i, j)] = a[(i, j)].clone();
            }
        }
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                m[(a.rows() + i, a.cols() + j)] = b[(i, j)].clone();
            }
        }
        FgPresentation::new(m)
    }

    /// A basis of the relation subgroup `H ⊂ F = ℤ^g`, as the columns of a
    /// full-column-rank matrix. This is the free resolution `0 → H → F → G → 0`.
    fn resolution(&self) -> IntMatrix {
        snf::column_space_basis(&self.relations)
    }
}

impl fmt::Debug for FgPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FgPresentation(<{} | {}>)", self.generators(), self.relations)
    }
}

/// Splits `d > 1` into prime powers by trial division.
fn prime_power_factors(d: &BigInt) -> Vec<(u64, u32)> {
    let mut n = d.abs();
    let mut out = Vec::new();
    let mut p = 2u64;
    while BigInt::from(p) * BigInt::from(p) <= n {
        let bp = BigInt::from(p);
        let mut k = 0;
        while (&n % &bp).is_zero() {
            n /= &bp;
            k += 1;
        }
        if k > 0 {
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        let p = n.to_u64().expect("oracle-scale invariant factors fit in 64 bits");
        out.push((p, 1));
    }
    out
}

/// The isomorphism type of a presented group, as cyclic prime-power atoms
/// plus one `ℤ` per free generator.
pub fn structure(p: &FgPresentation) -> AbGroup {
    let factors = invariant_factors(p.relations());
    let rank = factors.iter().filter(|d| !d.is_zero()).count();
    let free = p.generators() - rank;
    let mut atoms = vec![Atom::Rational(crate::Supernatural::one()); free];
    for d in factors.iter().filter(|d| !d.is_zero()) {
        for (p, k) in prime_power_factors(d) {
            atoms.push(Atom::Cyclic { p, k });
        }
    }
    AbGroup::from_atoms(atoms)
}

/// Presents `a ⊗ b` on generator pairs `(i, j) ↦ i·g_b + j`, with relations
/// `r ⊗ e_j` and `e_i ⊗ s` for relations `r` of `a` and `s` of `b`.
pub fn tensor_fg(a: &FgPresentation, b: &FgPresentation) -> FgPresentation {
    let ia = IntMatrix::identity(a.generators());
    let ib = IntMatrix::identity(b.generators());
    FgPresentation::new(a.relations.kron(&ib).hcat(&ia.kron(&b.relations)))
}

/// A group `K / L` where `K ⊂ ℤ^n` has basis `basis` and `L ⊂ K` is spanned
/// by `lattice`, together with cyclic generators read off a Smith normal form.
struct Subquotient {
    basis: Smith,
    /// Change of coordinates on `K` diagonalizing `L`.
    to_cyclic: IntMatrix,
    /// Indices (into the diagonal) of the non-trivial cyclic factors.
    kept: Vec<usize>,
    orders: Vec<BigInt>,
    generators: IntMatrix,
}

/// The Smith form of `basis` and the coordinates of `lattice` in it.
fn lattice_in_basis(basis: &IntMatrix, lattice: &IntMatrix) -> Result<(Smith, IntMatrix)> {
    let basis_snf = smith_normal_form(basis);
    if basis_snf.rank() != basis.cols() {
        return Err(Error::internal("subgroup basis is not linearly independent"));
    }
    let mut coords = Vec::with_capacity(lattice.cols());
    for col in lattice.columns() {
        coords.push(
            basis_snf
                .solve(&col)
                .ok_or_else(|| Error::internal("relation lattice escapes the subgroup"))?,
        );
    }
    let c = IntMatrix::from_columns(basis.cols(), &coords);
    Ok((basis_snf, c))
}

impl Subquotient {
    fn new(basis: &IntMatrix, lattice: &IntMatrix) -> Result<Self> {
        let (basis_snf, c) = lattice_in_basis(basis, lattice)?;
        let c_snf = smith_normal_form(&c);
        let s = basis.cols();
        let mut kept = Vec::new();
        let mut orders = Vec::new();
        for k in 0..s {
            let d = if k < c_snf.rank() {
                c_snf.d[(k, k)].clone()
            } else {
                BigInt::zero()
            };
            if !d.is_one() {
                kept.push(k);
                orders.push(d);
            }
        }
        let generators = basis.mul(c_snf.u_inverse()).select_columns(kept.iter().copied());
        Ok(Subquotient {
            basis: basis_snf,
            to_cyclic: c_snf.u,
            kept,
            orders,
            generators,
        })
    }

    /// Coordinates of `v` (a vector of the ambient `ℤ^n` lying in `K`) with
    /// respect to the cyclic generators, each reduced modulo its order.
    fn coordinates(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        let y = self
            .basis
            .solve(v)
            .ok_or_else(|| Error::internal("element does not lie in the subgroup"))?;
        let c = self.to_cyclic.mul_vec(&y);
        Ok(self
            .kept
            .iter()
            .zip(&self.orders)
            .map(|(&k, d)| reduce(&c[k], d))
            .collect())
    }
}

fn reduce(x: &BigInt, order: &BigInt) -> BigInt {
    if order.is_zero() {
        x.clone()
    } else {
        x.mod_floor(order)
    }
}

/// `{x : f x ∈ span(target_lattice)}`, as a basis.
fn preimage_of_lattice(f: &IntMatrix, target_lattice: &IntMatrix) -> IntMatrix {
    let joint = f.hcat(target_lattice);
    let kernel = snf::kernel_basis(&joint);
    let projected = kernel.select_rows(0..f.cols());
    snf::column_space_basis(&projected)
}

/// `Tor(G_a, G_b) = ker(H_a ⊗ G_b → F_a ⊗ G_b)` with its generators.
struct TorModel {
    res_a: IntMatrix,
    res_b: IntMatrix,
    gens_b: usize,
    group: Subquotient,
}

impl TorModel {
    fn new(a: &FgPresentation, b: &FgPresentation) -> Result<Self> {
        let (res_a, kernel, source_lattice) = tor_kernel(a, b);
        let group = Subquotient::new(&kernel, &source_lattice)?;
        Ok(TorModel {
            res_a,
            res_b: b.resolution(),
            gens_b: b.generators(),
            group,
        })
    }
}

/// `(resolution of a, basis of ker(H_a ⊗ G_b → F_a ⊗ G_b) lifted to
/// H_a ⊗ F_b, relations I ⊗ R_b of H_a ⊗ G_b)`.
fn tor_kernel(a: &FgPresentation, b: &FgPresentation) -> (IntMatrix, IntMatrix, IntMatrix) {
    let res_a = a.resolution();
    let (ga, gb, ra) = (a.generators(), b.generators(), res_a.cols());
    // H_a ⊗ G_b = ℤ^{ra·gb} / (I ⊗ R_b); F_a ⊗ G_b = ℤ^{ga·gb} / (I ⊗ R_b).
    let source_lattice = IntMatrix::identity(ra).kron(&b.relations);
    let target_lattice = IntMatrix::identity(ga).kron(&b.relations);
    let inclusion = res_a.kron(&IntMatrix::identity(gb));
    let kernel = preimage_of_lattice(&inclusion, &target_lattice);
    (res_a, kernel, source_lattice)
}

/// `Tor₁^ℤ(a, b)`, presented by its invariant factors in Smith order.
///
/// Computed as `H₁` of the tensor product of the free resolutions
/// `0 → H_a → F_a` and `0 → H_b → F_b`:
///
/// ```text
/// H_a⊗H_b --d2--> H_a⊗F_b ⊕ F_a⊗H_b --d1--> F_a⊗F_b
/// ```
///
/// `ker d1` is a pure sublattice, so the torsion of `H₁` is read off the
/// invariant factors of `d2` and its rank is `dim ker d1 - rank d2`.
pub fn tor_fg(a: &FgPresentation, b: &FgPresentation) -> FgPresentation {
    let (res_a, res_b) = (a.resolution(), b.resolution());
    let (ga, gb, ra, rb) = (a.generators(), b.generators(), res_a.cols(), res_b.cols());
    let (ia, ib) = (IntMatrix::identity(ra), IntMatrix::identity(rb));
    // Middle term ordered as H_a⊗F_b (ra·gb coordinates), then F_a⊗H_b.
    let d1 = res_a.kron(&IntMatrix::identity(gb)).hcat(&IntMatrix::identity(ga).kron(&res_b));
    let upper = ia.kron(&res_b);
    let lower = res_a.kron(&ib);
    let mut d2 = IntMatrix::zeros(ra * gb + ga * rb, ra * rb);
    for j in 0..ra * rb {
        for i in 0..ra * gb {
            d2[(i, j)] = -&upper[(i, j)];
        }
        for i in 0..ga * rb {
            d2[(ra * gb + i, j)] = lower[(i, j)].clone();
        }
    }
    debug_assert!(d1.mul(&d2).is_zero());
    let rank = |m: &IntMatrix| invariant_factors(m).iter().filter(|d| !d.is_zero()).count();
    let kernel_dim = d1.cols() - rank(&d1);
    let d2_factors = invariant_factors(&d2);
    let d2_rank = d2_factors.iter().filter(|d| !d.is_zero()).count();
    let mut orders: Vec<BigInt> = d2_factors
        .into_iter()
        .filter(|d| !d.is_zero() && !d.is_one())
        .collect();
    orders.extend(std::iter::repeat_n(BigInt::zero(), kernel_dim - d2_rank));
    let n = orders.len();
    FgPresentation::new(IntMatrix::diagonal(n, n, &orders))
}

/// A homomorphism between groups given by cyclic generators of the listed
/// orders (`0` = infinite order), as an integer matrix acting on
/// coordinate columns. Entries are reduced modulo the target orders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FgHom {
    pub matrix: IntMatrix,
    pub source_orders: Vec<BigInt>,
    pub target_orders: Vec<BigInt>,
}

impl FgHom {
    fn from_columns(columns: Vec<Vec<BigInt>>, source: &[BigInt], target: &[BigInt]) -> Self {
        FgHom {
            matrix: IntMatrix::from_columns(target.len(), &columns),
            source_orders: source.to_vec(),
            target_orders: target.to_vec(),
        }
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &FgHom) -> FgHom {
        assert_eq!(first.target_orders, self.source_orders, "maps do not compose");
        let mut m = self.matrix.mul(&first.matrix);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                m[(i, j)] = reduce(&m[(i, j)], &self.target_orders[i]);
            }
        }
        FgHom {
            matrix: m,
            source_orders: first.source_orders.clone(),
            target_orders: self.target_orders.clone(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.source_orders == self.target_orders
            && self.matrix == IntMatrix::identity(self.target_orders.len())
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }
}

/// Moves index `(i, j)` of a `left ⊗ right` tensor to `(j, i)` of `right ⊗ left`.
fn swap_factors(v: &[BigInt], left: usize, right: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); v.len()];
    for i in 0..left {
        for j in 0..right {
            out[j * left + i] = v[i * right + j].clone();
        }
    }
    out
}

/// `η_{a,b}: Tor(a, b) → Tor(b, a)` on the generators produced by [`tor_fg`].
pub fn eta_chase(a: &FgPresentation, b: &FgPresentation) -> Result<IntMatrix> {
    eta_hom(a, b, None).map(|h| h.matrix)
}

/// [`eta_chase`] as a homomorphism. With `seed`, every lift in the chase is
/// perturbed by a pseudo-random element of the lift's coset.
pub fn eta_hom(a: &FgPresentation, b: &FgPresentation, seed: Option<u64>) -> Result<FgHom> {
    let src = TorModel::new(a, b)?;
    let dst = TorModel::new(b, a)?;
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let (ga, gb) = (a.generators(), b.generators());
    let (ra, rb) = (src.res_a.cols(), src.res_b.cols());

    // α₁₂: H₁⊗F₂ → H₁⊗G₂ is reduction mod I⊗H₂; its kernel is spanned by I⊗res_b.
    let alpha12_kernel = IntMatrix::identity(ra).kron(&src.res_b);
    let beta12 = src.res_a.kron(&IntMatrix::identity(gb));
    let alpha21 = smith_normal_form(&IntMatrix::identity(ga).kron(&src.res_b));

    let mut columns = Vec::with_capacity(src.group.orders.len());
    for x in src.group.generators.columns() {
        let mut x12 = x;
        if let Some(rng) = rng.as_mut() {
            for col in alpha12_kernel.columns() {
                let c = BigInt::from(rng.gen_range(-3i64..=3));
                for (xi, ci) in x12.iter_mut().zip(col) {
                    *xi += &c * ci;
                }
            }
        }
        let pushed = beta12.mul_vec(&x12);
        // α₂₁ is injective, so the preimage is unique when it exists.
        let x21 = alpha21
            .solve(&pushed)
            .ok_or_else(|| Error::internal("β₁₂(x₁₂) is not in the image of α₂₁"))?;
        // β₂₁ is reduction mod H₁⊗I; ker(α₃₁) ⊂ G₁⊗H₂ is identified with H₂⊗G₁.
        let y = swap_factors(&x21, ga, rb);
        columns.push(dst.group.coordinates(&y)?);
    }
    debug_assert_eq!(src.gens_b, gb);
    Ok(FgHom::from_columns(columns, &src.group.orders, &dst.group.orders))
}

/// The map `Tor(a, b) → Tor(a2, b2)` induced by generator-level maps
/// `fa: ℤ^{g_a} → ℤ^{g_a2}` and `fb: ℤ^{g_b} → ℤ^{g_b2}` that carry relations
/// into relations.
pub fn tor_map(
    a: &FgPresentation,
    a2: &FgPresentation,
    fa: &IntMatrix,
    b: &FgPresentation,
    b2: &FgPresentation,
    fb: &IntMatrix,
) -> Result<FgHom> {
    let src = TorModel::new(a, b)?;
    let dst = TorModel::new(a2, b2)?;
    let res_a2 = smith_normal_form(&dst.res_a);
    let image = fa.mul(&src.res_a);
    let mut lifted = Vec::with_capacity(image.cols());
    for col in image.columns() {
        lifted.push(res_a2.solve(&col).ok_or_else(|| {
            Error::constraint("the generator map does not carry relations to relations")
        })?);
    }
    // Also check the second factor respects relations.
    let b2_span = smith_normal_form(&b2.relations);
    for col in fb.mul(&b.relations).columns() {
        if b2_span.solve(&col).is_none() {
            return Err(Error::constraint(
                "the generator map does not carry relations to relations",
            ));
        }
    }
    let on_h = IntMatrix::from_columns(dst.res_a.cols(), &lifted);
    let induced = on_h.kron(fb);
    let mut columns = Vec::new();
    for x in src.group.generators.columns() {
        columns.push(dst.group.coordinates(&induced.mul_vec(&x))?);
    }
    Ok(FgHom::from_columns(columns, &src.group.orders, &dst.group.orders))
}

/// The flip `a ⊗ b → b ⊗ a` on the cyclic generators of both tensor products.
pub fn sigma_hom(a: &FgPresentation, b: &FgPresentation) -> Result<FgHom> {
    let (ga, gb) = (a.generators(), b.generators());
    let src = Subquotient::new(&IntMatrix::identity(ga * gb), tensor_fg(a, b).relations())?;
    let dst = Subquotient::new(&IntMatrix::identity(ga * gb), tensor_fg(b, a).relations())?;
    let mut columns = Vec::new();
    for x in src.generators.columns() {
        columns.push(dst.coordinates(&swap_factors(&x, ga, gb))?);
    }
    Ok(FgHom::from_columns(columns, &src.orders, &dst.orders))
}
