//! Smith normal form with tracked unimodular transforms, and the integer
//! linear algebra built on it (kernels, column spans, exact solving).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// `u * m * v == d`, with `u`, `v` unimodular and `d` diagonal,
/// `d[0] | d[1] | …`, all entries non-negative.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    u_inv: IntMatrix,
    v_inv: IntMatrix,
    rank: usize,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn u_inverse(&self) -> &IntMatrix {
        &self.u_inv
    }

    pub fn v_inverse(&self) -> &IntMatrix {
        &self.v_inv
    }

    /// The diagonal of `d`, length `min(rows, cols)`, zeros last.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    /// Basis of `{x : m x = 0}`, one column per basis vector.
    pub fn kernel_basis(&self) -> IntMatrix {
        self.v.select_columns(self.rank..self.v.cols())
    }

    /// Basis of the column span of `m`: `d_k · u⁻¹ e_k` for `k < rank`.
    pub fn column_space_basis(&self) -> IntMatrix {
        let mut b = self.u_inv.select_columns(0..self.rank);
        for k in 0..self.rank {
            let d = self.d[(k, k)].clone();
            for i in 0..b.rows() {
                b[(i, k)] *= &d;
            }
        }
        b
    }

    /// An integer solution of `m x = b`, if one exists. The free coordinates
    /// (those of the kernel) are taken from `free`, which is called once per
    /// kernel dimension.
    pub fn solve_with(&self, b: &[BigInt], mut free: impl FnMut() -> BigInt) -> Option<Vec<BigInt>> {
        let c = self.u.mul_vec(b);
        let mut y = vec![BigInt::zero(); self.v.cols()];
        for (k, ck) in c.iter().enumerate() {
            if k < self.rank {
                let (q, r) = ck.div_rem(&self.d[(k, k)]);
                if !r.is_zero() {
                    return None;
                }
                y[k] = q;
            } else if !ck.is_zero() {
                return None;
            }
        }
        for yk in y.iter_mut().skip(self.rank) {
            *yk = free();
        }
        Some(self.v.mul_vec(&y))
    }

    /// The canonical solution, with every free coordinate zero.
    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        self.solve_with(b, BigInt::zero)
    }
}

/// The transforms being tracked; `None` entries are skipped.
#[derive(Default)]
struct Transforms {
    u: Option<IntMatrix>,
    u_inv: Option<IntMatrix>,
    v: Option<IntMatrix>,
    v_inv: Option<IntMatrix>,
}

struct Work<'a> {
    a: &'a mut IntMatrix,
    t: Transforms,
}

impl Work<'_> {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        if let Some(u) = &mut self.t.u {
            u.swap_rows(i, j);
        }
        if let Some(u_inv) = &mut self.t.u_inv {
            u_inv.swap_cols(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        if let Some(v) = &mut self.t.v {
            v.swap_cols(i, j);
        }
        if let Some(v_inv) = &mut self.t.v_inv {
            v_inv.swap_rows(i, j);
        }
    }

    /// `row[dst] += c * row[src]`.
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.a.add_row_multiple(dst, src, c);
        if let Some(u) = &mut self.t.u {
            u.add_row_multiple(dst, src, c);
        }
        if let Some(u_inv) = &mut self.t.u_inv {
            u_inv.add_col_multiple(src, dst, &-c);
        }
    }

    /// `col[dst] += c * col[src]`.
    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.a.add_col_multiple(dst, src, c);
        if let Some(v) = &mut self.t.v {
            v.add_col_multiple(dst, src, c);
        }
        if let Some(v_inv) = &mut self.t.v_inv {
            v_inv.add_row_multiple(src, dst, &-c);
        }
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        if let Some(u) = &mut self.t.u {
            u.negate_row(i);
        }
        if let Some(u_inv) = &mut self.t.u_inv {
            u_inv.negate_col(i);
        }
    }

    /// Position of the smallest nonzero entry (by absolute value) in the
    /// lower-right block starting at `(s, s)`.
    fn min_pivot(&self, s: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in s..self.a.rows() {
            for j in s..self.a.cols() {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.magnitude() < self.a[(bi, bj)].magnitude()) {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    fn run(&mut self) -> usize {
        let (rows, cols) = (self.a.rows(), self.a.cols());
        let mut s = 0;
        while s < rows.min(cols) {
            let Some((pi, pj)) = self.min_pivot(s) else {
                break;
            };
            self.swap_rows(s, pi);
            self.swap_cols(s, pj);
            loop {
                let mut leftover = false;
                for i in s + 1..rows {
                    if self.a[(i, s)].is_zero() {
                        continue;
                    }
                    let q = self.a[(i, s)].div_floor(&self.a[(s, s)]);
                    self.add_row(i, s, &-q);
                    leftover |= !self.a[(i, s)].is_zero();
                }
                for j in s + 1..cols {
                    if self.a[(s, j)].is_zero() {
                        continue;
                    }
                    let q = self.a[(s, j)].div_floor(&self.a[(s, s)]);
                    self.add_col(j, s, &-q);
                    leftover |= !self.a[(s, j)].is_zero();
                }
                if leftover {
                    // A remainder is now smaller than the pivot; promote it.
                    let mut best = (s, s);
                    for i in s + 1..rows {
                        let x = &self.a[(i, s)];
                        if !x.is_zero() && x.magnitude() < self.a[best].magnitude() {
                            best = (i, s);
                        }
                    }
                    for j in s + 1..cols {
                        let x = &self.a[(s, j)];
                        if !x.is_zero() && x.magnitude() < self.a[best].magnitude() {
                            best = (s, j);
                        }
                    }
                    self.swap_rows(s, best.0);
                    self.swap_cols(s, best.1);
                    continue;
                }
                // Row and column are clear; enforce the divisibility chain.
                let p = self.a[(s, s)].clone();
                let offender = (s + 1..rows)
                    .find(|&i| (s + 1..cols).any(|j| !self.a[(i, j)].is_multiple_of(&p)));
                match offender {
                    Some(i) => self.add_row(s, i, &BigInt::one()),
                    None => break,
                }
            }
            if self.a[(s, s)].is_negative() {
                self.negate_row(s);
            }
            s += 1;
        }
        s
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let mut d = m.clone();
    let t = Transforms {
        u: Some(IntMatrix::identity(m.rows())),
        u_inv: Some(IntMatrix::identity(m.rows())),
        v: Some(IntMatrix::identity(m.cols())),
        v_inv: Some(IntMatrix::identity(m.cols())),
    };
    let mut work = Work { a: &mut d, t };
    let rank = work.run();
    let t = work.t;
    Smith {
        u: t.u.expect("tracked"),
        d,
        v: t.v.expect("tracked"),
        u_inv: t.u_inv.expect("tracked"),
        v_inv: t.v_inv.expect("tracked"),
        rank,
    }
}

/// Diagonal of the Smith normal form without tracking transforms.
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    let mut d = m.clone();
    let mut work = Work {
        a: &mut d,
        t: Transforms::default(),
    };
    work.run();
    (0..d.rows().min(d.cols())).map(|i| d[(i, i)].clone()).collect()
}

/// [`Smith::kernel_basis`], tracking only the column transform.
pub(crate) fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let mut d = m.clone();
    let t = Transforms {
        v: Some(IntMatrix::identity(m.cols())),
        ..Transforms::default()
    };
    let mut work = Work { a: &mut d, t };
    let rank = work.run();
    let v = work.t.v.expect("tracked");
    v.select_columns(rank..v.cols())
}

/// [`Smith::column_space_basis`], tracking only the inverse row transform.
pub(crate) fn column_space_basis(m: &IntMatrix) -> IntMatrix {
    let mut d = m.clone();
    let t = Transforms {
        u_inv: Some(IntMatrix::identity(m.rows())),
        ..Transforms::default()
    };
    let mut work = Work { a: &mut d, t };
    let rank = work.run();
    let mut b = work.t.u_inv.expect("tracked").select_columns(0..rank);
    for k in 0..rank {
        for i in 0..b.rows() {
            b[(i, k)] *= &d[(k, k)];
        }
    }
    b
}
