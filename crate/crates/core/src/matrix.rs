//! Dense 4×4 matrices over any [`Scalar`], the only size the rank-4
//! lattice needs.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{Field, Scalar};

pub type Vec4<T> = [T; 4];

#[derive(Debug, Clone, PartialEq)]
pub struct Mat4<T> {
    rows: [[T; 4]; 4],
}

impl<T: Scalar> Mat4<T> {
    pub fn from_rows(rows: [[T; 4]; 4]) -> Self {
        Mat4 { rows }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        Mat4 {
            rows: std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))),
        }
    }

    pub fn zero(template: &T) -> Self {
        Self::from_fn(|_, _| template.zero_like())
    }

    pub fn identity(template: &T) -> Self {
        Self::from_fn(|i, j| if i == j { template.one_like() } else { template.zero_like() })
    }

    /// Columns given as vectors.
    pub fn from_columns(cols: [Vec4<T>; 4]) -> Self {
        Self::from_fn(|i, j| cols[j][i].clone())
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.rows[i][j] = v;
    }

    pub fn rows(&self) -> &[[T; 4]; 4] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> Vec4<T> {
        self.rows[i].clone()
    }

    pub fn column(&self, j: usize) -> Vec4<T> {
        std::array::from_fn(|i| self.rows[i][j].clone())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.rows[j][i].clone())
    }

    pub fn map<U: Scalar>(&self, mut f: impl FnMut(&T) -> U) -> Mat4<U> {
        Mat4::from_fn(|i, j| f(&self.rows[i][j]))
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.clone() * c.clone())
    }

    pub fn apply(&self, v: &Vec4<T>) -> Vec4<T> {
        std::array::from_fn(|i| {
            let mut acc = self.rows[i][0].clone() * v[0].clone();
            for k in 1..4 {
                acc = acc + self.rows[i][k].clone() * v[k].clone();
            }
            acc
        })
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::identity(&self.rows[0][0]);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn is_exact_zero(&self) -> bool {
        self.rows.iter().flatten().all(Scalar::is_exact_zero)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.rows.iter().flatten().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    /// `Σ_{k=0}^{3} X^k / k!`, exact for nilpotent `X`.
    pub fn exp_nilpotent(&self) -> Self
    where
        T: Field,
    {
        let one = self.rows[0][0].one_like();
        let x2 = self * self;
        let x3 = &x2 * self;
        let id = Self::identity(&one);
        &(&(&id + self) + &x2.scale(&(one.clone() / one.from_i64_like(2)))) + &x3.scale(&(one.clone() / one.from_i64_like(6)))
    }

    /// `Σ_{k=1}^{3} (−1)^{k+1} (X−I)^k / k`, exact for unipotent `X` of
    /// nilpotency index ≤ 4.
    pub fn log_unipotent(&self) -> Self
    where
        T: Field,
    {
        let one = self.rows[0][0].one_like();
        let u = self - &Self::identity(&one);
        let u2 = &u * &u;
        let u3 = &u2 * &u;
        &(&u - &u2.scale(&(one.clone() / one.from_i64_like(2)))) + &u3.scale(&(one.clone() / one.from_i64_like(3)))
    }

    /// Gauss–Jordan inverse with largest-magnitude pivoting; `None` when a
    /// pivot is exactly zero.
    pub fn inverse(&self) -> Option<Self>
    where
        T: Field,
    {
        let mut a = self.rows.clone();
        let mut inv = Self::identity(&a[0][0]).rows;
        for col in 0..4 {
            let pivot = (col..4)
                .filter(|&r| !a[r][col].is_exact_zero())
                .max_by(|&r, &s| a[r][col].magnitude().total_cmp(&a[s][col].magnitude()))?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col].recip();
            for j in 0..4 {
                a[col][j] = a[col][j].clone() * p.clone();
                inv[col][j] = inv[col][j].clone() * p.clone();
            }
            for r in 0..4 {
                if r == col || a[r][col].is_exact_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for j in 0..4 {
                    a[r][j] = a[r][j].clone() - factor.clone() * a[col][j].clone();
                    inv[r][j] = inv[r][j].clone() - factor.clone() * inv[col][j].clone();
                }
            }
        }
        Some(Mat4 { rows: inv })
    }

    /// Rank of the matrix; entries with magnitude below `tol` count as zero.
    pub fn rank(&self, tol: f64) -> usize
    where
        T: Field,
    {
        let mut a = self.rows.clone();
        let mut rank = 0;
        for col in 0..4 {
            let pivot = (rank..4)
                .filter(|&r| !a[r][col].is_exact_zero() && a[r][col].magnitude() > tol)
                .max_by(|&r, &s| a[r][col].magnitude().total_cmp(&a[s][col].magnitude()));
            let Some(pivot) = pivot else { continue };
            a.swap(rank, pivot);
            let p = a[rank][col].recip();
            for r in (rank + 1)..4 {
                let factor = a[r][col].clone() * p.clone();
                for j in 0..4 {
                    a[r][j] = a[r][j].clone() - factor.clone() * a[rank][j].clone();
                }
            }
            rank += 1;
        }
        rank
    }
}

impl<'a, T: Scalar> Mul<&'a Mat4<T>> for &'a Mat4<T> {
    type Output = Mat4<T>;
    fn mul(self, rhs: &Mat4<T>) -> Mat4<T> {
        Mat4::from_fn(|i, j| {
            let mut acc = self.rows[i][0].clone() * rhs.rows[0][j].clone();
            for k in 1..4 {
                acc = acc + self.rows[i][k].clone() * rhs.rows[k][j].clone();
            }
            acc
        })
    }
}

impl<'a, T: Scalar> Add<&'a Mat4<T>> for &'a Mat4<T> {
    type Output = Mat4<T>;
    fn add(self, rhs: &Mat4<T>) -> Mat4<T> {
        Mat4::from_fn(|i, j| self.rows[i][j].clone() + rhs.rows[i][j].clone())
    }
}

impl<'a, T: Scalar> Sub<&'a Mat4<T>> for &'a Mat4<T> {
    type Output = Mat4<T>;
    fn sub(self, rhs: &Mat4<T>) -> Mat4<T> {
        Mat4::from_fn(|i, j| self.rows[i][j].clone() - rhs.rows[i][j].clone())
    }
}

impl<'a, T: Scalar> Neg for &'a Mat4<T> {
    type Output = Mat4<T>;
    fn neg(self) -> Mat4<T> {
        self.map(|x| -x.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, Rational};

    fn m(rows: [[i64; 4]; 4]) -> Mat4<Rational> {
        Mat4::from_fn(|i, j| int(rows[i][j]))
    }

    #[test]
    fn inverse_round_trip() {
        let a = m([[2, 1, 0, 0], [1, 3, 1, 0], [0, 1, 4, 1], [1, 0, 1, 5]]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, Mat4::identity(&int(0)));
    }

    #[test]
    fn singular_has_no_inverse() {
        let a = m([[1, 2, 0, 0], [2, 4, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        assert!(a.inverse().is_none());
        assert_eq!(a.rank(0.0), 3);
    }

    #[test]
    fn exp_log_nilpotent() {
        let n = m([[0, 0, 0, 0], [1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 3, 0]]);
        let t = n.exp_nilpotent();
        assert_eq!(t, m([[1, 0, 0, 0], [1, 1, 0, 0], [1, 2, 1, 0], [1, 3, 3, 1]]));
        assert_eq!(t.log_unipotent(), n);
    }
}
