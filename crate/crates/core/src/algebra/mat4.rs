use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense 4×4 complex matrix, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat4(pub [[Complex64; 4]; 4]);

impl Mat4 {
    pub const fn zero() -> Self {
        Mat4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        Self::scalar(ONE)
    }

    pub fn scalar(c: Complex64) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = c;
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_real(rows: [[f64; 4]; 4]) -> Self {
        Self::from_fn(|i, j| Complex64::new(rows[i][j], 0.0))
    }

    /// Embeds two 2×2 blocks: `[[tl, tr], [bl, br]]`.
    pub fn from_blocks(
        tl: [[Complex64; 2]; 2],
        tr: [[Complex64; 2]; 2],
        bl: [[Complex64; 2]; 2],
        br: [[Complex64; 2]; 2],
    ) -> Self {
        Self::from_fn(|i, j| match (i < 2, j < 2) {
            (true, true) => tl[i][j],
            (true, false) => tr[i][j - 2],
            (false, true) => bl[i - 2][j],
            (false, false) => br[i - 2][j - 2],
        })
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn trace(&self) -> Complex64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius inner product tr(A† B).
    pub fn inner(&self, other: &Mat4) -> Complex64 {
        let mut acc = ZERO;
        for i in 0..4 {
            for j in 0..4 {
                acc += self.0[i][j].conj() * other.0[i][j];
            }
        }
        acc
    }

    pub fn commutator(&self, other: &Mat4) -> Mat4 {
        *self * *other - *other * *self
    }

    pub fn anticommutator(&self, other: &Mat4) -> Mat4 {
        *self * *other + *other * *self
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(|z| *z == ZERO)
    }

    /// Returns `Some(c)` when the matrix is exactly `c·I`.
    pub fn as_scalar(&self) -> Option<Complex64> {
        let c = self.0[0][0];
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { c } else { ZERO };
                if self.0[i][j] != expect {
                    return None;
                }
            }
        }
        Some(c)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.dagger()).frobenius_norm()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol * self.frobenius_norm().max(1.0)
    }

    /// ‖U†U − I‖_F.
    pub fn unitarity_defect(&self) -> f64 {
        (self.dagger() * *self - Mat4::identity()).frobenius_norm()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Complex64; 4]) -> [Complex64; 4] {
        std::array::from_fn(|i| (0..4).map(|k| self.0[i][k] * v[k]).sum())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    ///
    /// Rejects matrices with `|det| <= 1e-12 · ‖A‖_F⁴`; the reported
    /// condition estimate is the ratio of the largest to smallest pivot.
    pub fn inverse(&self) -> Result<Mat4> {
        let scale = self.frobenius_norm();
        let mut a = self.0;
        let mut inv = Mat4::identity().0;
        let mut det = ONE;
        let mut max_pivot = 0.0f64;
        let mut min_pivot = f64::INFINITY;

        for col in 0..4 {
            let pivot_row = (col..4)
                .max_by(|&r, &s| a[r][col].norm().total_cmp(&a[s][col].norm()))
                .unwrap_or(col);
            let pivot = a[pivot_row][col];
            max_pivot = max_pivot.max(pivot.norm());
            min_pivot = min_pivot.min(pivot.norm());
            if pivot == ZERO {
                return Err(Error::Singular {
                    det: 0.0,
                    condition: f64::INFINITY,
                });
            }
            if pivot_row != col {
                a.swap(pivot_row, col);
                inv.swap(pivot_row, col);
                det = -det;
            }
            det *= pivot;
            let inv_pivot = ONE / pivot;
            for j in 0..4 {
                a[col][j] *= inv_pivot;
                inv[col][j] *= inv_pivot;
            }
            for r in 0..4 {
                if r == col {
                    continue;
                }
                let f = a[r][col];
                if f == ZERO {
                    continue;
                }
                for j in 0..4 {
                    let (ac, ic) = (a[col][j], inv[col][j]);
                    a[r][j] -= f * ac;
                    inv[r][j] -= f * ic;
                }
            }
        }

        if det.norm() <= 1e-12 * scale.powi(4) {
            return Err(Error::Singular {
                det: det.norm(),
                condition: max_pivot / min_pivot,
            });
        }
        Ok(Mat4(inv))
    }
}

impl Default for Mat4 {
    fn default() -> Self {
        Self::zero()
    }
}

impl Index<(usize, usize)> for Mat4 {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[i][j]
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(self, rhs: Mat4) -> Mat4 {
        Mat4::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl AddAssign for Mat4 {
    fn add_assign(&mut self, rhs: Mat4) {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
    }
}

impl Sub for Mat4 {
    type Output = Mat4;
    fn sub(self, rhs: Mat4) -> Mat4 {
        Mat4::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl SubAssign for Mat4 {
    fn sub_assign(&mut self, rhs: Mat4) {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
    }
}

impl Neg for Mat4 {
    type Output = Mat4;
    fn neg(self) -> Mat4 {
        Mat4::from_fn(|i, j| -self.0[i][j])
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        let mut out = Mat4::zero();
        for i in 0..4 {
            for k in 0..4 {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..4 {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

impl Mul<Complex64> for Mat4 {
    type Output = Mat4;
    fn mul(self, c: Complex64) -> Mat4 {
        Mat4::from_fn(|i, j| self.0[i][j] * c)
    }
}

impl Mul<Mat4> for Complex64 {
    type Output = Mat4;
    fn mul(self, m: Mat4) -> Mat4 {
        m * self
    }
}

impl Mul<f64> for Mat4 {
    type Output = Mat4;
    fn mul(self, c: f64) -> Mat4 {
        Mat4::from_fn(|i, j| self.0[i][j] * c)
    }
}

impl Mul<Mat4> for f64 {
    type Output = Mat4;
    fn mul(self, m: Mat4) -> Mat4 {
        m * self
    }
}

impl fmt::Debug for Mat4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat4[")?;
        for row in &self.0 {
            write!(f, "  ")?;
            for z in row {
                write!(f, "({:+.6e}{:+.6e}i) ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beta() -> Mat4 {
        Mat4::from_real([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
        ])
    }

    #[test]
    fn identity_inverse() {
        assert_eq!(Mat4::identity().inverse().unwrap(), Mat4::identity());
    }

    #[test]
    fn beta_is_self_inverse() {
        assert_eq!(beta().inverse().unwrap(), beta());
    }

    #[test]
    fn singular_matrix_rejected() {
        let mut m = Mat4::identity();
        m.0[3][3] = ZERO;
        match m.inverse() {
            Err(Error::Singular { .. }) => {}
            other => panic!("expected singular error, got {other:?}"),
        }
        let rank_one = Mat4::from_fn(|_, _| ONE);
        assert!(matches!(rank_one.inverse(), Err(Error::Singular { .. })));
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let perm = Mat4::from_real([
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 2.0],
            [0.0, 0.0, 3.0, 0.0],
        ]);
        let inv = perm.inverse().unwrap();
        assert!((perm * inv - Mat4::identity()).frobenius_norm() < 1e-15);
    }

    #[test]
    fn scalar_detection() {
        assert_eq!(Mat4::scalar(Complex64::new(2.0, 1.0)).as_scalar(), Some(Complex64::new(2.0, 1.0)));
        assert_eq!(beta().as_scalar(), None);
    }
}
