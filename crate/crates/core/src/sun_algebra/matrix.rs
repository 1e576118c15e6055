use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense square complex matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Builds a matrix from row slices. All rows must have the same length as
    /// the number of rows.
    pub fn from_rows(rows: &[&[C64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from a row-major vector of length `dim * dim`.
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let owned: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        let refs: Vec<&[C64]> = owned.iter().map(Vec::as_slice).collect();
        Self::from_rows(&refs)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.data[i * n + j] * other.data[j * n + i];
            }
        }
        acc
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Squared Frobenius norm, `tr(M M†)`.
    pub fn frobenius_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.frobenius_sqr().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        let n = self.dim;
        (0..n)
            .map(|j| (0..n).map(|i| self.data[i * n + j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest modulus of an off-diagonal entry.
    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.dim;
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.data[i * n + j].norm());
                }
            }
        }
        m
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.max_off_diagonal() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self - &self.adjoint()).frobenius() <= tol
    }

    /// Deviation from unitarity, `‖M M† − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        (&(self * &self.adjoint()) - &Self::identity(self.dim)).frobenius()
    }

    /// LU factorization with partial pivoting. Returns the packed factors,
    /// the row permutation and its sign, or `None` for an exactly singular
    /// pivot.
    fn lu(&self) -> Option<(Vec<C64>, Vec<usize>, f64)> {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&p, &q| a[p * n + col].norm().total_cmp(&a[q * n + col].norm()))
                .unwrap_or(col);
            if a[pivot * n + col] == ZERO {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                }
                perm.swap(pivot, col);
                sign = -sign;
            }
            let d = a[col * n + col];
            for row in (col + 1)..n {
                let f = a[row * n + col] / d;
                a[row * n + col] = f;
                for j in (col + 1)..n {
                    let v = a[col * n + j];
                    a[row * n + j] -= f * v;
                }
            }
        }
        Some((a, perm, sign))
    }

    pub fn det(&self) -> C64 {
        match self.dim {
            0 => ONE,
            1 => self.data[0],
            2 => self.data[0] * self.data[3] - self.data[1] * self.data[2],
            _ => match self.lu() {
                None => ZERO,
                Some((a, _, sign)) => {
                    let n = self.dim;
                    (0..n).map(|i| a[i * n + i]).product::<C64>() * sign
                }
            },
        }
    }

    /// Matrix inverse, or `None` when the matrix is singular.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.dim;
        if n == 2 {
            let d = self.det();
            if d == ZERO {
                return None;
            }
            let [a, b, c, e] = [self.data[0], self.data[1], self.data[2], self.data[3]];
            return Some(Self {
                dim: 2,
                data: vec![e / d, -b / d, -c / d, a / d],
            });
        }
        let (lu, perm, _) = self.lu()?;
        let mut inv = Self::zeros(n);
        for col in 0..n {
            // solve L U x = P e_col
            let mut x: Vec<C64> = (0..n).map(|i| if perm[i] == col { ONE } else { ZERO }).collect();
            for i in 0..n {
                for j in 0..i {
                    let l = lu[i * n + j];
                    x[i] = x[i] - l * x[j];
                }
            }
            for i in (0..n).rev() {
                for j in (i + 1)..n {
                    let u = lu[i * n + j];
                    x[i] = x[i] - u * x[j];
                }
                x[i] /= lu[i * n + i];
            }
            for (i, xi) in x.iter().enumerate() {
                inv.data[i * n + col] = *xi;
            }
        }
        Some(inv)
    }

    /// Integer power; negative exponents invert first.
    pub fn powi(&self, k: i32) -> Option<Self> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::identity(self.dim);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Some(acc)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        debug_assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for l in 0..n {
                let a = self.data[i * n + l];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * rhs.data[l * n + j];
                }
            }
        }
        ComplexMatrix { dim: n, data: out }
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        debug_assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        debug_assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn inverse_and_det_3x3() {
        let m = ComplexMatrix::from_rows(&[
            &[c(1.0, 0.5), c(2.0, 0.0), c(0.0, -1.0)],
            &[c(0.0, 0.0), c(1.0, 1.0), c(3.0, 0.0)],
            &[c(-1.0, 0.0), c(0.5, 0.0), c(2.0, -2.0)],
        ])
        .unwrap();
        let inv = m.inverse().unwrap();
        let e = (&(&m * &inv) - &ComplexMatrix::identity(3)).frobenius();
        assert!(e < 1e-13, "{e}");
        // product of determinants
        let d = (m.det() * inv.det() - ONE).norm();
        assert!(d < 1e-13);
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0], &[0.0, 1.0, 0.0]]).unwrap();
        assert!(m.inverse().is_none() || m.det().norm() < 1e-12);
        assert_eq!(ComplexMatrix::zeros(2).inverse(), None);
    }

    #[test]
    fn negative_power_inverts() {
        let m = ComplexMatrix::from_diag(&[c(2.0, 0.0), c(0.5, 0.0)]);
        let p = m.powi(-3).unwrap();
        assert!((p[(0, 0)] - c(0.125, 0.0)).norm() < 1e-15);
        assert!((p[(1, 1)] - c(8.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(ComplexMatrix::from_rows(&[&[ONE, ZERO], &[ONE]]).is_err());
    }
}
