//! 2x2 matrices over a ring: the complexified quaternions in matrix form.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::SingularMatrix;
use crate::scalar::{Field, GaussianRational, Ring};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2<T> {
    pub z11: T,
    pub z12: T,
    pub z21: T,
    pub z22: T,
}

/// Exact complexified quaternion.
pub type MatrixHC = Mat2<GaussianRational>;
/// Floating-point evaluation point.
pub type PointHC = Mat2<Complex64>;

impl<T> Mat2<T> {
    pub const fn new(z11: T, z12: T, z21: T, z22: T) -> Self {
        Self { z11, z12, z21, z22 }
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> [&T; 4] {
        [&self.z11, &self.z12, &self.z21, &self.z22]
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        match (i, j) {
            (0, 0) => &self.z11,
            (0, 1) => &self.z12,
            (1, 0) => &self.z21,
            (1, 1) => &self.z22,
            _ => panic!("index ({i},{j}) out of range"),
        }
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Mat2<U> {
        Mat2::new(f(&self.z11), f(&self.z12), f(&self.z21), f(&self.z22))
    }
}

impl<T: Ring> Mat2<T> {
    pub fn from_fn(f: impl Fn(usize, usize) -> T) -> Self {
        Self::new(f(0, 0), f(0, 1), f(1, 0), f(1, 1))
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn identity() -> Self {
        Self::scalar(T::one())
    }

    pub fn scalar(s: T) -> Self {
        Self::new(s.clone(), T::zero(), T::zero(), s)
    }

    pub fn diag(a: T, d: T) -> Self {
        Self::new(a, T::zero(), T::zero(), d)
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|e| e.is_zero())
    }

    /// The quaternionic norm, i.e. the determinant.
    pub fn norm(&self) -> T {
        self.z11.clone() * self.z22.clone() - self.z12.clone() * self.z21.clone()
    }

    /// `Z^+ = [[z22, -z12], [-z21, z11]]`, so that `Z Z^+ = N(Z) I`.
    pub fn conjugate_plus(&self) -> Self {
        Self::new(self.z22.clone(), -self.z12.clone(), -self.z21.clone(), self.z11.clone())
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.z11.clone(), self.z21.clone(), self.z12.clone(), self.z22.clone())
    }

    pub fn trace(&self) -> T {
        self.z11.clone() + self.z22.clone()
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|e| e.clone() * s.clone())
    }

    pub fn matmul(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| {
            self.get(i, 0).clone() * o.get(0, j).clone() + self.get(i, 1).clone() * o.get(1, j).clone()
        })
    }
}

impl<T: Field> Mat2<T> {
    pub fn invert(&self) -> Result<Self, SingularMatrix> {
        let n = self.norm();
        if n.is_zero() {
            return Err(SingularMatrix);
        }
        let inv = T::one() / n;
        Ok(self.conjugate_plus().scale(&inv))
    }
}

impl PointHC {
    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|e| e.re.is_finite() && e.im.is_finite())
    }

    /// Max-norm distance.
    pub fn dist(&self, o: &Self) -> f64 {
        let d = self - o;
        d.entries().iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|e| e.norm()).fold(0.0, f64::max)
    }
}

impl MatrixHC {
    pub fn to_point(&self) -> PointHC {
        self.map(|e| e.to_complex())
    }

    pub fn from_ints(z11: i64, z12: i64, z21: i64, z22: i64) -> Self {
        Self::new(z11.into(), z12.into(), z21.into(), z22.into())
    }
}

impl<T: Ring> Add<&Mat2<T>> for &Mat2<T> {
    type Output = Mat2<T>;
    fn add(self, o: &Mat2<T>) -> Mat2<T> {
        Mat2::new(
            self.z11.clone() + o.z11.clone(),
            self.z12.clone() + o.z12.clone(),
            self.z21.clone() + o.z21.clone(),
            self.z22.clone() + o.z22.clone(),
        )
    }
}

impl<T: Ring> Sub<&Mat2<T>> for &Mat2<T> {
    type Output = Mat2<T>;
    fn sub(self, o: &Mat2<T>) -> Mat2<T> {
        Mat2::new(
            self.z11.clone() - o.z11.clone(),
            self.z12.clone() - o.z12.clone(),
            self.z21.clone() - o.z21.clone(),
            self.z22.clone() - o.z22.clone(),
        )
    }
}

impl<T: Ring> Mul<&Mat2<T>> for &Mat2<T> {
    type Output = Mat2<T>;
    fn mul(self, o: &Mat2<T>) -> Mat2<T> {
        self.matmul(o)
    }
}

impl<T: Ring> Neg for &Mat2<T> {
    type Output = Mat2<T>;
    fn neg(self) -> Mat2<T> {
        self.map(|e| -e.clone())
    }
}

/// Matrix forms of the quaternionic units used as generator entries.
pub mod units {
    use super::MatrixHC;
    use crate::scalar::{GaussianRational, Ring};

    fn i() -> GaussianRational {
        GaussianRational::i()
    }

    pub fn one() -> MatrixHC {
        MatrixHC::identity()
    }

    /// `-i I`
    pub fn e0_tilde() -> MatrixHC {
        MatrixHC::scalar(-i())
    }

    /// `[[0, 1], [1, 0]]`
    pub fn e1_tilde() -> MatrixHC {
        MatrixHC::from_ints(0, 1, 1, 0)
    }

    /// `[[0, i], [-i, 0]]`
    pub fn e2_tilde() -> MatrixHC {
        MatrixHC::new(GaussianRational::zero(), i(), -i(), GaussianRational::zero())
    }

    /// `[[-i, 0], [0, i]]`
    pub fn e3() -> MatrixHC {
        MatrixHC::diag(-i(), i())
    }

    /// The spanning set `1, ẽ1, ẽ2, e3` with display names.
    pub fn spanning_set() -> [(&'static str, MatrixHC); 4] {
        [("1", one()), ("e1~", e1_tilde()), ("e2~", e2_tilde()), ("e3", e3())]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gr(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    #[test]
    fn norm_examples() {
        assert_eq!(MatrixHC::identity().norm(), gr(1));
        assert_eq!(MatrixHC::from_ints(1, 2, 3, 4).norm(), gr(-2));
        assert_eq!(units::e1_tilde().norm(), gr(-1));
    }

    #[test]
    fn conjugate_plus_examples() {
        let z = MatrixHC::from_ints(1, 2, 3, 4);
        let zp = z.conjugate_plus();
        assert_eq!(zp, MatrixHC::from_ints(4, -2, -3, 1));
        assert_eq!(&z * &zp, MatrixHC::scalar(gr(-2)));
        assert_eq!(units::e3().conjugate_plus(), -&units::e3());
        assert_eq!(MatrixHC::identity().conjugate_plus(), MatrixHC::identity());
    }

    #[test]
    fn invert_examples() {
        assert_eq!(MatrixHC::identity().invert().unwrap(), MatrixHC::identity());
        let d = MatrixHC::diag(gr(2), GaussianRational::from_frac(1, 2));
        assert_eq!(d.invert().unwrap(), MatrixHC::diag(GaussianRational::from_frac(1, 2), gr(2)));
        assert_eq!(MatrixHC::from_ints(1, 1, 0, 1).invert().unwrap(), MatrixHC::from_ints(1, -1, 0, 1));
        assert_eq!(MatrixHC::from_ints(1, 2, 2, 4).invert(), Err(SingularMatrix));
    }

    #[test]
    fn units_square_as_split_quaternions() {
        // ẽ1² = ẽ2² = 1 and e3² = -1 in matrix form
        assert_eq!(&units::e1_tilde() * &units::e1_tilde(), MatrixHC::identity());
        assert_eq!(&units::e2_tilde() * &units::e2_tilde(), MatrixHC::identity());
        assert_eq!(&units::e3() * &units::e3(), -&MatrixHC::identity());
    }

    fn small_gr() -> impl Strategy<Value = GaussianRational> {
        (-9i64..10, 1i64..5, -9i64..10, 1i64..5).prop_map(|(a, b, c, d)| GaussianRational::from_parts((a, b), (c, d)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn z_times_z_plus_is_norm(a in small_gr(), b in small_gr(), c in small_gr(), d in small_gr()) {
            let z = MatrixHC::new(a, b, c, d);
            prop_assert_eq!(&z * &z.conjugate_plus(), MatrixHC::scalar(z.norm()));
            prop_assert_eq!(&z.conjugate_plus() * &z, MatrixHC::scalar(z.norm()));
        }
    }
}
