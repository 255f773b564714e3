//! Dense complex matrices and vector helpers.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex;
#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

pub type C64 = Complex<f64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows).map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum elementwise |self − other| over the leading `block × block` corner.
    pub fn max_abs_diff_block(&self, other: &CMatrix, block: usize) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..block.min(self.rows).min(other.rows) {
            for c in 0..block.min(self.cols).min(other.cols) {
                worst = worst.max((self[(r, c)] - other[(r, c)]).norm());
            }
        }
        worst
    }

    /// Induced 1-norm.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols).map(|c| (0..self.rows).map(|r| self[(r, c)].norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Matrix exponential by scaling and squaring with a Taylor kernel.
    pub fn expm(&self) -> CMatrix {
        assert!(self.is_square(), "expm needs a square matrix");
        let n = self.rows;
        let norm = self.norm_one();
        let mut squarings = 0u32;
        if norm > 0.25 {
            squarings = (norm / 0.25).log2().ceil() as u32;
        }
        let scaled = self.scale(C64::new(0.5f64.powi(squarings as i32), 0.0));
        let mut result = CMatrix::identity(n);
        let mut term = CMatrix::identity(n);
        for k in 1..=30 {
            term = term.matmul(&scaled).scale(C64::new(1.0 / k as f64, 0.0));
            result = result.add(&term);
            if term.max_abs() < 1e-20 {
                break;
            }
        }
        for _ in 0..squarings {
            result = result.matmul(&result);
        }
        result
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

/// ⟨a|b⟩ with the conjugate on the left argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// |⟨a|b⟩|² for normalized vectors.
pub fn fidelity(a: &[C64], b: &[C64]) -> f64 {
    inner(a, b).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_pauli_rotation() {
        // exp(-i θ σx) = cos θ I − i sin θ σx
        let theta = 0.7f64;
        let gen = CMatrix::from_fn(2, 2, |r, c| if r != c { C64::new(0.0, -theta) } else { ZERO });
        let u = gen.expm();
        assert!((u[(0, 0)] - C64::new(theta.cos(), 0.0)).norm() < 1e-14);
        assert!((u[(0, 1)] - C64::new(0.0, -theta.sin())).norm() < 1e-14);
    }

    #[test]
    fn expm_of_large_norm_is_unitary() {
        let gen = CMatrix::from_fn(4, 4, |r, c| {
            if r + 1 == c {
                C64::new(3.0, 1.0)
            } else if c + 1 == r {
                C64::new(-3.0, 1.0)
            } else {
                ZERO
            }
        });
        let u = gen.expm();
        let err = u.adjoint().matmul(&u).sub(&CMatrix::identity(4)).max_abs();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn inner_is_conjugate_linear_on_left() {
        let a = [C64::new(0.0, 1.0)];
        let b = [C64::new(1.0, 0.0)];
        assert_eq!(inner(&a, &b), C64::new(0.0, -1.0));
    }
}
