//! Arithmetic in the prime field F_p for small p.
//!
//! Residues are plain `u32` values in `[0, p)`. The modulus carries every
//! operation, in the style of a field context object, so vectors and tables
//! stay as compact integer slices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A residue in `[0, p)`.
pub type Scalar = u32;

/// A prime `p` with `3 <= p <= 31`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeModulus(u32);

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl PrimeModulus {
    pub const MIN: u32 = 3;
    pub const MAX: u32 = 31;

    pub fn new(p: u32) -> Result<Self> {
        if (Self::MIN..=Self::MAX).contains(&p) && is_prime(p) {
            Ok(Self(p))
        } else {
            Err(Error::InvalidModulus(p))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn size(self) -> usize {
        self.0 as usize
    }

    /// Reduce an arbitrary signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(self, v: i64) -> Scalar {
        v.rem_euclid(self.0 as i64) as Scalar
    }

    #[inline]
    pub fn add(self, a: Scalar, b: Scalar) -> Scalar {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: Scalar, b: Scalar) -> Scalar {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: Scalar) -> Scalar {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: Scalar, b: Scalar) -> Scalar {
        (a * b) % self.0
    }

    pub fn pow(self, mut base: Scalar, mut exp: u64) -> Scalar {
        let mut acc = 1 % self.0;
        base %= self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse as `a^(p-2)`; maps 0 to 0.
    #[inline]
    pub fn inv(self, a: Scalar) -> Scalar {
        self.pow(a, (self.0 - 2) as u64)
    }

    /// Euler's criterion. Zero counts as a square.
    pub fn is_square(self, a: Scalar) -> bool {
        a.is_multiple_of(self.0) || self.pow(a, ((self.0 - 1) / 2) as u64) == 1
    }

    pub fn sqrt(self, a: Scalar) -> Option<Scalar> {
        (0..self.0).find(|&x| self.mul(x, x) == a % self.0)
    }

    /// Embed a field element as a signed integer in `(-p/2, p/2]`.
    pub fn centered(self, a: Scalar) -> i64 {
        if a > self.0 / 2 {
            a as i64 - self.0 as i64
        } else {
            a as i64
        }
    }

    /// `p^k` as an exact integer.
    pub fn power_count(self, k: usize) -> u128 {
        (self.0 as u128).pow(k as u32)
    }

    pub fn dot(self, a: &[Scalar], b: &[Scalar]) -> Scalar {
        let s: u64 = a.iter().zip(b).map(|(&x, &y)| (x * y) as u64).sum();
        (s % self.0 as u64) as Scalar
    }

    /// `a += c * b`, coordinatewise.
    pub fn axpy(self, a: &mut [Scalar], c: Scalar, b: &[Scalar]) {
        if c == 0 {
            return;
        }
        for (x, &y) in a.iter_mut().zip(b) {
            *x = (*x + c * y) % self.0;
        }
    }

    pub fn scale_vec(self, c: Scalar, v: &[Scalar]) -> Vec<Scalar> {
        v.iter().map(|&x| self.mul(c, x)).collect()
    }

    pub fn add_vec(self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        a.iter().zip(b).map(|(&x, &y)| self.add(x, y)).collect()
    }

    pub fn sub_vec(self, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
        a.iter().zip(b).map(|(&x, &y)| self.sub(x, y)).collect()
    }

    pub fn neg_vec(self, a: &[Scalar]) -> Vec<Scalar> {
        a.iter().map(|&x| self.neg(x)).collect()
    }

    /// Row-major base-p index of a point: `x_1` is the most significant digit.
    pub fn point_index(self, x: &[Scalar]) -> usize {
        x.iter().fold(0usize, |acc, &c| acc * self.size() + c as usize)
    }

    pub fn index_point(self, mut idx: usize, n: usize) -> Vec<Scalar> {
        let mut x = vec![0; n];
        for slot in x.iter_mut().rev() {
            *slot = (idx % self.size()) as Scalar;
            idx /= self.size();
        }
        x
    }
}

impl TryFrom<u32> for PrimeModulus {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        Self::new(p)
    }
}

impl From<PrimeModulus> for u32 {
    fn from(p: PrimeModulus) -> u32 {
        p.0
    }
}

impl std::fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_only_small_primes() {
        for p in [3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            assert!(PrimeModulus::new(p).is_ok());
        }
        for p in [0, 1, 2, 4, 9, 15, 25, 33, 37] {
            assert_eq!(PrimeModulus::new(p), Err(Error::InvalidModulus(p)));
        }
    }

    #[test]
    fn inverse_by_exponentiation() {
        for p in [3, 5, 7, 31] {
            let f = PrimeModulus::new(p).unwrap();
            for a in 1..p {
                assert_eq!(f.mul(a, f.inv(a)), 1);
            }
            assert_eq!(f.inv(0), 0);
        }
    }

    #[test]
    fn squares_mod_five() {
        let f = PrimeModulus::new(5).unwrap();
        let squares: Vec<u32> = (0..5).filter(|&a| f.is_square(a)).collect();
        assert_eq!(squares, vec![0, 1, 4]);
        assert_eq!(f.sqrt(4), Some(2));
        assert_eq!(f.sqrt(2), None);
    }

    #[test]
    fn point_index_round_trip() {
        let f = PrimeModulus::new(5).unwrap();
        for idx in 0..125 {
            assert_eq!(f.point_index(&f.index_point(idx, 3)), idx);
        }
        assert_eq!(f.point_index(&[1, 0, 2]), 27);
    }
}
