use std::ops::{Mul, Neg};

use super::field::{FieldScalar, Rational};

/// Quaternion with exact coefficients in Q(√2, √5).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quaternion {
    pub w: FieldScalar,
    pub x: FieldScalar,
    pub y: FieldScalar,
    pub z: FieldScalar,
}

impl Quaternion {
    pub fn new(w: FieldScalar, x: FieldScalar, y: FieldScalar, z: FieldScalar) -> Self {
        Self { w, x, y, z }
    }

    fn basis(n: usize) -> Self {
        let mut c = [FieldScalar::zero(), FieldScalar::zero(), FieldScalar::zero(), FieldScalar::zero()];
        c[n] = FieldScalar::one();
        let [w, x, y, z] = c;
        Self::new(w, x, y, z)
    }

    pub fn one() -> Self {
        Self::basis(0)
    }

    pub fn i() -> Self {
        Self::basis(1)
    }

    pub fn j() -> Self {
        Self::basis(2)
    }

    pub fn k() -> Self {
        Self::basis(3)
    }

    /// Quaternion with rational coordinates `(w, x, y, z) / den`.
    pub fn from_ints(w: i64, x: i64, y: i64, z: i64, den: i64) -> Self {
        Self::new(
            FieldScalar::frac(w, den),
            FieldScalar::frac(x, den),
            FieldScalar::frac(y, den),
            FieldScalar::frac(z, den),
        )
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::new(self.w.scale(k), self.x.scale(k), self.y.scale(k), self.z.scale(k))
    }

    pub fn conj(&self) -> Self {
        Self::new(self.w.clone(), -&self.x, -&self.y, -&self.z)
    }

    pub fn norm_sq(&self) -> FieldScalar {
        &(&(&self.w * &self.w) + &(&self.x * &self.x)) + &(&(&self.y * &self.y) + &(&self.z * &self.z))
    }

    pub fn is_unit(&self) -> bool {
        self.norm_sq() == FieldScalar::one()
    }

    pub fn to_f64(&self) -> Quat {
        Quat::new(self.w.to_f64(), self.x.to_f64(), self.y.to_f64(), self.z.to_f64())
    }
}

impl Mul for &Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Self) -> Quaternion {
        let (a1, b1, c1, d1) = (&self.w, &self.x, &self.y, &self.z);
        let (a2, b2, c2, d2) = (&o.w, &o.x, &o.y, &o.z);
        Quaternion::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Self) -> Quaternion {
        &self * &o
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Floating point quaternion used by the numerical code.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const ONE: Quat = Quat { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn dot(self, o: Self) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        Self::new(self.w / n, self.x / n, self.y / n, self.z / n)
    }

    /// Exponential of the pure quaternion `v = (0, x, y, z)`.
    pub fn exp_pure(x: f64, y: f64, z: f64) -> Self {
        let a = (x * x + y * y + z * z).sqrt();
        if a < 1e-300 {
            return Self::ONE;
        }
        let s = a.sin() / a;
        Self::new(a.cos(), x * s, y * s, z * s)
    }

    /// Logarithm of a unit quaternion as a pure vector with norm in `[0, π]`.
    pub fn log_unit(self) -> [f64; 3] {
        let v = (self.x * self.x + self.y * self.y + self.z * self.z).sqrt();
        let a = v.atan2(self.w);
        if v < 1e-300 {
            if self.w > 0.0 {
                return [0.0; 3];
            }
            return [std::f64::consts::PI, 0.0, 0.0];
        }
        let s = a / v;
        [self.x * s, self.y * s, self.z * s]
    }
}

impl std::ops::Mul for Quat {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl std::ops::Neg for Quat {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamilton_relations() {
        let (i, j, k) = (Quaternion::i(), Quaternion::j(), Quaternion::k());
        assert_eq!(&i * &j, k);
        assert_eq!(&j * &k, i);
        assert_eq!(&k * &i, j);
        assert_eq!(&(&i * &j) * &k, -Quaternion::one());
    }

    #[test]
    fn float_matches_exact() {
        let a = Quaternion::from_ints(1, 1, 1, 1, 2);
        let b = Quaternion::from_ints(3, -4, 0, 0, 5);
        let e = (&a * &b).to_f64();
        let f = a.to_f64() * b.to_f64();
        assert!((e.w - f.w).abs() + (e.x - f.x).abs() + (e.y - f.y).abs() + (e.z - f.z).abs() < 1e-15);
    }

    #[test]
    fn exp_log_roundtrip() {
        let q = Quat::exp_pure(0.3, -1.1, 0.7);
        let v = q.log_unit();
        assert!((v[0] - 0.3).abs() < 1e-14 && (v[1] + 1.1).abs() < 1e-14 && (v[2] - 0.7).abs() < 1e-14);
        assert!((q.norm() - 1.0).abs() < 1e-15);
    }
}
