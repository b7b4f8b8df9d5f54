//! Matrices with polynomial entries.

use crate::poly::{rat_i, PolyQ, Rat};
use crate::{KovError, ParamTable, Result};
use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};

/// Dense row-major matrix over [`PolyQ`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatPoly {
    rows: usize,
    cols: usize,
    entries: Vec<PolyQ>,
}

impl MatPoly {
    pub fn zero(rows: usize, cols: usize) -> Self {
        MatPoly {
            rows,
            cols,
            entries: vec![PolyQ::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, PolyQ::one())
    }

    /// `s * I_n`.
    pub fn scalar(n: usize, s: PolyQ) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, s.clone());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> PolyQ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        MatPoly { rows, cols, entries }
    }

    pub fn from_rat_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_fn(rows.len(), rows[0].len(), |i, j| {
            PolyQ::constant(rat_i(rows[i][j]))
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &PolyQ {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: PolyQ) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[PolyQ] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn map(&self, f: impl Fn(&PolyQ) -> PolyQ) -> MatPoly {
        MatPoly {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map(&self, f: impl Fn(&PolyQ) -> Result<PolyQ>) -> Result<MatPoly> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            entries.push(f(e)?);
        }
        Ok(MatPoly {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn scale(&self, c: &PolyQ) -> MatPoly {
        self.map(|e| e.mul_ref(c))
    }

    pub fn scale_rat(&self, c: &Rat) -> MatPoly {
        self.map(|e| e.scale(c))
    }

    pub fn add_ref(&self, other: &MatPoly) -> MatPoly {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        MatPoly {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add_ref(b))
                .collect(),
        }
    }

    pub fn sub_ref(&self, other: &MatPoly) -> MatPoly {
        self.add_ref(&other.neg_ref())
    }

    pub fn neg_ref(&self) -> MatPoly {
        self.map(|e| e.neg_ref())
    }

    pub fn mul_ref(&self, other: &MatPoly) -> MatPoly {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = MatPoly::zero(self.rows, other.cols);
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
                    let cur = out.get(i, j).add_ref(&a.mul_ref(b));
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    /// `[a, b] = ab - ba`.
    pub fn commutator(&self, other: &MatPoly) -> MatPoly {
        self.mul_ref(other).sub_ref(&other.mul_ref(self))
    }

    pub fn substitute(&self, param: crate::ParamId, value: &PolyQ) -> Result<MatPoly> {
        self.try_map(|e| e.substitute(param, value))
    }

    pub fn epsilon_limit(&self) -> Result<MatPoly> {
        self.try_map(|e| e.epsilon_limit())
    }

    pub fn eval(&self, values: &HashMap<crate::ParamId, Rat>) -> Result<crate::linalg::QMatrix> {
        let mut data = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            data.push(e.eval(values)?);
        }
        crate::linalg::QMatrix::from_vec(self.rows, self.cols, data)
    }

    /// Rational entries, if the matrix is constant.
    pub fn as_rational(&self) -> Option<crate::linalg::QMatrix> {
        let mut data = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            data.push(e.as_constant()?);
        }
        crate::linalg::QMatrix::from_vec(self.rows, self.cols, data).ok()
    }

    /// Place `block` with its top-left corner at `(i0, j0)`.
    pub fn paste(&mut self, i0: usize, j0: usize, block: &MatPoly) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(i0 + i, j0 + j, block.get(i, j).clone());
            }
        }
    }

    pub fn render(&self, table: &ParamTable) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).render(table)).collect())
            .collect()
    }

    pub fn require_square(&self, n: usize) -> Result<()> {
        if self.rows != n || self.cols != n {
            return Err(KovError::DimMismatch(format!(
                "expected {n}x{n}, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }
}

impl Add for &MatPoly {
    type Output = MatPoly;
    fn add(self, rhs: &MatPoly) -> MatPoly {
        self.add_ref(rhs)
    }
}

impl Sub for &MatPoly {
    type Output = MatPoly;
    fn sub(self, rhs: &MatPoly) -> MatPoly {
        self.sub_ref(rhs)
    }
}

impl Mul for &MatPoly {
    type Output = MatPoly;
    fn mul(self, rhs: &MatPoly) -> MatPoly {
        self.mul_ref(rhs)
    }
}

impl Neg for &MatPoly {
    type Output = MatPoly;
    fn neg(self) -> MatPoly {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_length_invariant() {
        let m = MatPoly::zero(3, 2);
        assert_eq!(m.entries().len(), 6);
    }

    #[test]
    fn commutator_of_commuting_is_zero() {
        let a = MatPoly::from_rat_rows(&[vec![1, 2], vec![0, 1]]);
        let b = MatPoly::from_rat_rows(&[vec![3, 4], vec![0, 3]]);
        assert!(a.commutator(&b).is_zero());
    }

    #[test]
    fn e21_commutator() {
        // [diag(1,-1), E21] = -2 E21
        let h = MatPoly::from_rat_rows(&[vec![1, 0], vec![0, -1]]);
        let e21 = MatPoly::from_rat_rows(&[vec![0, 0], vec![1, 0]]);
        let expected = e21.scale_rat(&rat_i(-2));
        assert_eq!(h.commutator(&e21), expected);
    }
}
