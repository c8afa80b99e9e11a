use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use num_traits::{Signed, Zero};

use super::rational::{format_rational, int, Rational};

/// A dense vector of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(Vec<Rational>);

impl RationalVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        Self(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![Rational::zero(); dim])
    }

    pub fn from_ints(values: &[i64]) -> Self {
        Self(values.iter().map(|&v| int(v)).collect())
    }

    /// The `i`-th standard basis vector of `R^dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = int(1);
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &Self) -> Rational {
        assert_eq!(self.dim(), other.dim(), "dot: dimension mismatch");
        let mut acc = Rational::zero();
        for (a, b) in self.0.iter().zip(&other.0) {
            if !a.is_zero() && !b.is_zero() {
                acc += a * b;
            }
        }
        acc
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self(self.0.iter().map(|a| a * k).collect())
    }

    /// Kronecker product, `self`-major.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.0 {
            for b in &other.0 {
                out.push(a * b);
            }
        }
        Self(out)
    }

    /// Positive rescaling so the first nonzero coordinate is `+1` or `-1`.
    /// The zero vector is returned unchanged.
    pub fn canonical_ray(&self) -> Self {
        match self.0.iter().find(|c| !c.is_zero()) {
            Some(lead) => {
                let k = lead.abs().recip();
                self.scale(&k)
            }
            None => self.clone(),
        }
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a RationalVector>>(dim: usize, items: I) -> Self {
        let mut acc = Self::zeros(dim);
        for v in items {
            acc = &acc + v;
        }
        acc
    }
}

impl From<Vec<Rational>> for RationalVector {
    fn from(v: Vec<Rational>) -> Self {
        Self(v)
    }
}

impl Index<usize> for RationalVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl Add for &RationalVector {
    type Output = RationalVector;
    fn add(self, rhs: &RationalVector) -> RationalVector {
        assert_eq!(self.dim(), rhs.dim(), "add: dimension mismatch");
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &RationalVector {
    type Output = RationalVector;
    fn sub(self, rhs: &RationalVector) -> RationalVector {
        assert_eq!(self.dim(), rhs.dim(), "sub: dimension mismatch");
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &RationalVector {
    type Output = RationalVector;
    fn neg(self) -> RationalVector {
        RationalVector(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&format_rational(c))?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rational::rat;

    #[test]
    fn canonical_ray_keeps_sign() {
        let v = RationalVector::new(vec![int(0), rat(-3, 2), int(3)]);
        assert_eq!(v.canonical_ray(), RationalVector::from_ints(&[0, -1, 2]));
    }

    #[test]
    fn kron_is_lhs_major() {
        let a = RationalVector::from_ints(&[1, 2]);
        let b = RationalVector::from_ints(&[3, 5]);
        assert_eq!(a.kron(&b), RationalVector::from_ints(&[3, 5, 6, 10]));
    }

    #[test]
    fn display_uses_exact_text() {
        let v = RationalVector::new(vec![rat(1, 2), int(-1)]);
        assert_eq!(v.to_string(), "(1/2, -1)");
    }
}
