//! Small dense complex matrices.
//!
//! Gate matrices are at most 4x4 and the reference oracle stays below
//! 2^10 x 2^10, so a flat row-major `Vec<Complex64>` is all we need.

use num_complex::Complex64;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        CMat {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMat::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim, "matrix rows must be square");
            data.extend_from_slice(row);
        }
        CMat { dim, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = CMat::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// Kronecker product; `self` supplies the most-significant index bits.
    pub fn kron(&self, other: &CMat) -> CMat {
        let d1 = self.dim;
        let d2 = other.dim;
        let d = d1 * d2;
        let mut out = CMat::zeros(d);
        for i1 in 0..d1 {
            for j1 in 0..d1 {
                let a = self.get(i1, j1);
                if a == ZERO {
                    continue;
                }
                for i2 in 0..d2 {
                    for j2 in 0..d2 {
                        out.set(i1 * d2 + i2, j1 * d2 + j2, a * other.get(i2, j2));
                    }
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> CMat {
        let d = self.dim;
        let mut out = CMat::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.set(i, j, self.get(j, i).conj());
            }
        }
        out
    }

    pub fn conjugate(&self) -> CMat {
        CMat {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> CMat {
        let d = self.dim;
        let mut out = CMat::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.set(i, j, self.get(j, i));
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> CMat {
        CMat {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim);
        CMat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.max_abs_diff(&CMat::identity(self.dim)) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.dagger().mul(self).is_identity(tol)
    }

    /// tr(self† · other), computed entry-wise.
    pub fn overlap_trace(&self, other: &CMat) -> Complex64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_puts_first_factor_on_high_bits() {
        let x = CMat::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]);
        let i = CMat::identity(2);
        let xi = x.kron(&i);
        // |0b⟩ ↦ |1b⟩: entry (2+b, b) = 1
        assert_eq!(xi.get(2, 0), ONE);
        assert_eq!(xi.get(3, 1), ONE);
        assert_eq!(xi.get(0, 0), ZERO);
    }

    #[test]
    fn dagger_is_conjugate_transpose() {
        let m = CMat::from_rows(&[vec![c(1.0, 2.0), c(3.0, -1.0)], vec![c(0.0, 4.0), c(5.0, 0.0)]]);
        assert_eq!(m.dagger(), m.conjugate().transpose());
        assert_eq!(m.dagger(), m.transpose().conjugate());
    }

    #[test]
    fn trace_and_overlap() {
        let s = CMat::from_rows(&[vec![ONE, ZERO], vec![ZERO, c(0.0, 1.0)]]);
        assert_eq!(s.trace(), c(1.0, 1.0));
        // tr(S†S) = 2
        assert_eq!(s.overlap_trace(&s), cr(2.0));
    }
}
