//! Exact linear algebra over Q.
//!
//! Elimination uses a fraction-free (Bareiss) forward pass on integer-scaled
//! rows followed by rational normalization, so the output is the unique RREF
//! while intermediate bignum growth stays bounded.
//!
//! [`solve_affine_parametric`] solves `A x = rhs` where `A` is rational and
//! the right-hand side has polynomial entries: the solve happens monomial by
//! monomial, components of the right-hand side outside the image of `A` are
//! collected into *obstruction polynomials*, and kernel directions are
//! reported once. Pivoting is done from the highest coordinate downwards so
//! that the free coordinates of the kernel sit as early as possible; the
//! series expander names its free parameters after those coordinates.

use crate::poly::{Mono, PolyQ, Rat};
use crate::{KovError, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::HashMap;

/// Dense row-major matrix over exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rat>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(KovError::DimMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(QMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QMatrix { rows, cols, data }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_fn(rows.len(), rows[0].len(), |i, j| {
            Rat::from_integer(BigInt::from(rows[i][j]))
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[Rat] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn add_ref(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub_ref(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn neg_ref(&self) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul_ref(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = QMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = self.get(i, k) * b + out.get(i, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    if !a.is_zero() && !v[j].is_zero() {
                        acc += a * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn commutator(&self, other: &QMatrix) -> QMatrix {
        self.mul_ref(other).sub_ref(&other.mul_ref(self))
    }

    pub fn transpose(&self) -> QMatrix {
        QMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn to_matpoly(&self) -> crate::MatPoly {
        crate::MatPoly::from_fn(self.rows, self.cols, |i, j| {
            PolyQ::constant(self.get(i, j).clone())
        })
    }

    /// Exact determinant by fraction-free elimination.
    pub fn det(&self) -> Rat {
        assert!(self.rows == self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Rat::one();
        }
        let (mut m, scale) = to_scaled_ints(self);
        let mut prev = BigInt::one();
        let mut sign = 1i32;
        for col in 0..n {
            let Some(sel) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return Rat::zero();
            };
            if sel != col {
                m.swap(sel, col);
                sign = -sign;
            }
            for r in col + 1..n {
                for c in col + 1..n {
                    let num = &m[col][col] * &m[r][c] - &m[r][col] * &m[col][c];
                    let (q, rem) = num.div_rem(&prev);
                    debug_assert!(rem.is_zero(), "fraction-free division must be exact");
                    m[r][c] = q;
                }
                m[r][col] = BigInt::zero();
            }
            prev = m[col][col].clone();
        }
        let det_scaled = Rat::from_integer(m[n - 1][n - 1].clone());
        let det = det_scaled / Rat::from_integer(scale);
        if sign < 0 {
            -det
        } else {
            det
        }
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        assert!(self.rows == self.cols);
        let ctx = SolveContext::new(self, false);
        if ctx.rank != self.rows {
            return None;
        }
        Some(ctx.transform)
    }

    pub fn rank(&self) -> usize {
        SolveContext::new(self, false).rank
    }
}

fn to_scaled_ints(a: &QMatrix) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut rows = Vec::with_capacity(a.rows);
    let mut scale = BigInt::one();
    for i in 0..a.rows {
        let mut l = BigInt::one();
        for j in 0..a.cols {
            l = l.lcm(a.get(i, j).denom());
        }
        let row = (0..a.cols)
            .map(|j| {
                let r = a.get(i, j);
                r.numer() * (&l / r.denom())
            })
            .collect();
        scale *= &l;
        rows.push(row);
    }
    (rows, scale)
}

/// Row-reduction context of a rational matrix, optionally with pivoting on
/// the highest coordinates first ("reversed").
///
/// Carries the unique RREF `r` of the (possibly column-reversed) input, its
/// pivot columns, and the invertible transform `e` with `e * A_oriented = r`,
/// obtained by reducing the identity-augmented matrix. Rows of `e` beyond the
/// rank span the left null space; they define the canonical cokernel
/// complement used for obstruction extraction.
pub struct SolveContext {
    pub rank: usize,
    reversed: bool,
    a_cols: usize,
    a_rows: usize,
    /// RREF of the oriented input.
    pub rref: QMatrix,
    /// Transform with `transform * A_oriented = rref`.
    pub transform: QMatrix,
    /// Pivot column (oriented coords) per pivot row.
    pub pivots: Vec<usize>,
    free_cols: Vec<usize>,
}

impl SolveContext {
    pub fn new(a: &QMatrix, reversed: bool) -> Self {
        let (rows, cols) = (a.rows, a.cols);
        // oriented copy, augmented with the identity
        let aug = QMatrix::from_fn(rows, cols + rows, |i, j| {
            if j < cols {
                let col = if reversed { cols - 1 - j } else { j };
                a.get(i, col).clone()
            } else if j - cols == i {
                Rat::one()
            } else {
                Rat::zero()
            }
        });
        let (rref_aug, pivots_aug) = rref_raw(&aug);
        let rank = pivots_aug.iter().filter(|&&c| c < cols).count();
        let pivots: Vec<usize> = pivots_aug.iter().copied().filter(|&c| c < cols).collect();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_set.contains(c)).collect();
        let rref = QMatrix::from_fn(rows, cols, |i, j| rref_aug.get(i, j).clone());
        let transform = QMatrix::from_fn(rows, rows, |i, j| rref_aug.get(i, cols + j).clone());
        SolveContext {
            rank,
            reversed,
            a_cols: cols,
            a_rows: rows,
            rref,
            transform,
            pivots,
            free_cols,
        }
    }

    fn unorient(&self, col: usize) -> usize {
        if self.reversed {
            self.a_cols - 1 - col
        } else {
            col
        }
    }

    /// Kernel basis in original coordinates. Each vector has a 1 at its free
    /// coordinate and 0 at every other free coordinate; vectors are sorted by
    /// free coordinate.
    pub fn kernel(&self) -> Vec<(usize, Vec<Rat>)> {
        let mut basis: Vec<(usize, Vec<Rat>)> = self
            .free_cols
            .iter()
            .map(|&f| {
                let mut v = vec![Rat::zero(); self.a_cols];
                v[self.unorient(f)] = Rat::one();
                for (i, &p) in self.pivots.iter().enumerate() {
                    let coef = self.rref.get(i, f);
                    if !coef.is_zero() {
                        v[self.unorient(p)] = -coef.clone();
                    }
                }
                (self.unorient(f), v)
            })
            .collect();
        basis.sort_by_key(|(fc, _)| *fc);
        basis
    }

    /// Solve for one rational right-hand side. Returns the particular
    /// solution (free coordinates set to zero, original coordinate order)
    /// and the cokernel component (length `rows - rank`; zero iff solvable).
    pub fn solve_one(&self, v: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
        assert_eq!(v.len(), self.a_rows);
        let w = self.transform.mul_vec(v);
        let mut x = vec![Rat::zero(); self.a_cols];
        for (i, &p) in self.pivots.iter().enumerate() {
            x[self.unorient(p)] = w[i].clone();
        }
        let obstruction = w[self.rank..].to_vec();
        (x, obstruction)
    }
}

/// Unique RREF plus pivot columns (plain left-to-right pivoting).
fn rref_raw(a: &QMatrix) -> (QMatrix, Vec<usize>) {
    let (rows, cols) = (a.rows, a.cols);
    let (mut m, _) = to_scaled_ints(a);
    let mut prev = BigInt::one();
    let mut pr = 0usize;
    let mut pivots: Vec<usize> = Vec::new();
    for col in 0..cols {
        if pr == rows {
            break;
        }
        let Some(sel) = (pr..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(sel, pr);
        for r in pr + 1..rows {
            for c in col + 1..cols {
                let num = &m[pr][col] * &m[r][c] - &m[r][col] * &m[pr][c];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "fraction-free division must be exact");
                m[r][c] = q;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[pr][col].clone();
        pivots.push(col);
        pr += 1;
    }
    // rational normalization: pivots to 1, eliminate above
    let mut q: Vec<Vec<Rat>> = m
        .into_iter()
        .map(|row| row.into_iter().map(Rat::from_integer).collect())
        .collect();
    for i in (0..pivots.len()).rev() {
        let pcol = pivots[i];
        let pval = q[i][pcol].clone();
        for c in pcol..cols {
            let v = &q[i][c] / &pval;
            q[i][c] = v;
        }
        for r in 0..i {
            let f = q[r][pcol].clone();
            if f.is_zero() {
                continue;
            }
            for c in pcol..cols {
                let v = &q[r][c] - &f * &q[i][c];
                q[r][c] = v;
            }
        }
    }
    let out = QMatrix::from_fn(rows, cols, |i, j| q[i][j].clone());
    (out, pivots)
}

/// RREF, rank and kernel basis of a rational matrix.
pub fn rref_rank_kernel(a: &QMatrix) -> (QMatrix, usize, Vec<Vec<Rat>>) {
    let ctx = SolveContext::new(a, false);
    let kernel = ctx.kernel().into_iter().map(|(_, v)| v).collect();
    (ctx.rref.clone(), ctx.rank, kernel)
}

pub fn rank(a: &QMatrix) -> usize {
    SolveContext::new(a, false).rank
}

pub fn nullity(a: &QMatrix) -> usize {
    a.cols - rank(a)
}

/// Result of a parametric affine solve `A x = rhs`.
#[derive(Debug, Clone)]
pub struct AffineSolveResult {
    pub rank: usize,
    /// Particular solution; zero on the kernel's free coordinates.
    pub particular: Vec<PolyQ>,
    /// Kernel basis vectors, each tagged with its free coordinate.
    pub kernel_basis: Vec<(usize, Vec<Rat>)>,
    /// Cokernel components of the right-hand side, one polynomial per
    /// deficient row; all zero iff the system is solvable for every
    /// parameter value.
    pub obstruction: Vec<PolyQ>,
}

impl AffineSolveResult {
    pub fn is_unobstructed(&self) -> bool {
        self.obstruction.iter().all(|p| p.is_zero())
    }
}

/// Solve `A x = rhs` with polynomial right-hand side, monomial by monomial.
pub fn solve_affine_parametric(a: &QMatrix, rhs: &[PolyQ]) -> AffineSolveResult {
    assert_eq!(a.rows(), rhs.len(), "rhs length mismatch");
    let ctx = SolveContext::new(a, true);
    // gather the coefficient vector of every monomial appearing in rhs
    let mut monos: HashMap<Mono, Vec<Rat>> = HashMap::new();
    for (i, p) in rhs.iter().enumerate() {
        for (m, c) in p.terms() {
            monos
                .entry(m.clone())
                .or_insert_with(|| vec![Rat::zero(); rhs.len()])[i] = c.clone();
        }
    }
    let mut mono_list: Vec<(Mono, Vec<Rat>)> = monos.into_iter().collect();
    mono_list.sort_by(|x, y| y.0.cmp(&x.0));

    let mut particular_terms: Vec<Vec<(Mono, Rat)>> = vec![Vec::new(); a.cols()];
    let mut obstruction_terms: Vec<Vec<(Mono, Rat)>> = vec![Vec::new(); a.rows() - ctx.rank];
    for (mono, v) in mono_list {
        let (x, obs) = ctx.solve_one(&v);
        for (j, val) in x.into_iter().enumerate() {
            if !val.is_zero() {
                particular_terms[j].push((mono.clone(), val));
            }
        }
        for (j, val) in obs.into_iter().enumerate() {
            if !val.is_zero() {
                obstruction_terms[j].push((mono.clone(), val));
            }
        }
    }
    AffineSolveResult {
        rank: ctx.rank,
        particular: particular_terms.into_iter().map(PolyQ::from_terms).collect(),
        kernel_basis: ctx.kernel(),
        obstruction: obstruction_terms.into_iter().map(PolyQ::from_terms).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::ParamTable;
    use crate::poly::rat_i;

    #[test]
    fn identity_rref() {
        let a = QMatrix::identity(4);
        let (r, rank, kernel) = rref_rank_kernel(&a);
        assert_eq!(r, a);
        assert_eq!(rank, 4);
        assert!(kernel.is_empty());
    }

    #[test]
    fn zero_matrix_kernel() {
        let a = QMatrix::zero(3, 3);
        let (_, rank, kernel) = rref_rank_kernel(&a);
        assert_eq!(rank, 0);
        assert_eq!(kernel.len(), 3);
    }

    #[test]
    fn rank_one_block_system() {
        // the 2x2 system for a mixed coefficient pair at its singular shift,
        // alpha = 0, beta = -3: [[1+beta, alpha], [2+2beta, 2alpha]]
        let a = QMatrix::from_i64_rows(&[vec![-2, 0], vec![-4, 0]]);
        let (_, rank, kernel) = rref_rank_kernel(&a);
        assert_eq!(rank, 1);
        assert_eq!(kernel.len(), 1);
    }

    #[test]
    fn determinant_and_inverse() {
        let a = QMatrix::from_i64_rows(&[vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]]);
        assert_eq!(a.det(), rat_i(18));
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul_ref(&inv), QMatrix::identity(3));
    }

    #[test]
    fn solve_identity_particular_is_rhs() {
        let t = ParamTable::new();
        let s = t.intern("sigma");
        let a = QMatrix::identity(2);
        let rhs = vec![PolyQ::var(s), PolyQ::int(3)];
        let res = solve_affine_parametric(&a, &rhs);
        assert!(res.is_unobstructed());
        assert_eq!(res.particular, rhs);
        assert!(res.kernel_basis.is_empty());
    }

    #[test]
    fn solve_zero_matrix_collects_obstruction() {
        let t = ParamTable::new();
        let s = t.intern("sigma");
        let a = QMatrix::zero(1, 1);
        let res = solve_affine_parametric(&a, &[PolyQ::var(s)]);
        assert_eq!(res.obstruction.len(), 1);
        assert_eq!(res.obstruction[0], PolyQ::var(s));
        assert!(!res.is_unobstructed());
    }

    #[test]
    fn reversed_pivoting_frees_early_coordinates() {
        // kernel of [[-2,-2],[-2,-2]] should be parametrized by coordinate 0
        let a = QMatrix::from_i64_rows(&[vec![-2, -2], vec![-2, -2]]);
        let ctx = SolveContext::new(&a, true);
        let kernel = ctx.kernel();
        assert_eq!(kernel.len(), 1);
        assert_eq!(kernel[0].0, 0);
        assert_eq!(kernel[0].1, vec![rat_i(1), rat_i(-1)]);
    }

    #[test]
    fn transform_times_input_is_rref() {
        let a = QMatrix::from_i64_rows(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 1, 1]]);
        let ctx = SolveContext::new(&a, false);
        assert_eq!(ctx.transform.mul_ref(&a), ctx.rref);
        assert_eq!(ctx.rank, 2);
    }
}
