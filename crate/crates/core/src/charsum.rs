//! Character sums `S = sum_{x in D} e_p(f(x))` and bias, decided exactly.
//!
//! `S` only depends on the level counts `c_j = #{x in D : f(x) = j}`, and
//! `|S|^2 = sum_d R_d ζ^d` with `R_d = sum_j c_j c_{j+d}`. Both live in the
//! ring of cyclotomic integers Z[ζ_p], so equalities such as
//! `bias = p^{-m/2}` are decided without floating point.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Budget, Error, Result};
use crate::field::{PrimeModulus, Scalar};
use crate::linalg::{AffineSubspace, Subspace};
use crate::poly::Polynomial;

/// The set a character sum ranges over.
#[derive(Debug, Clone, Copy)]
pub enum Domain<'a> {
    /// All of F_p^n.
    Full(usize),
    Subspace(&'a Subspace),
    Affine(&'a AffineSubspace),
    /// An explicit point list, e.g. a zero set.
    Points(&'a [Vec<Scalar>]),
}

impl Domain<'_> {
    fn ambient(&self) -> Option<usize> {
        match self {
            Domain::Full(n) => Some(*n),
            Domain::Subspace(s) => Some(s.ambient()),
            Domain::Affine(a) => Some(a.ambient()),
            Domain::Points(pts) => pts.first().map(Vec::len),
        }
    }
}

/// Distribution of values of a function on a domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCounts {
    pub counts: Vec<u64>,
    pub domain_size: u64,
}

pub fn level_counts(f: &Polynomial, domain: Domain<'_>, budget: Budget) -> Result<LevelCounts> {
    let p = f.modulus();
    if let Some(n) = domain.ambient() {
        check_dim(f.num_vars(), n)?;
    }
    let mut counts = vec![0u64; p.size()];
    match domain {
        Domain::Full(_) => {
            for v in f.to_table(budget)?.values {
                counts[v as usize] += 1;
            }
        }
        Domain::Subspace(s) => {
            for x in s.points(budget)? {
                counts[f.eval_unchecked(&x) as usize] += 1;
            }
        }
        Domain::Affine(a) => {
            for x in a.points(budget)? {
                counts[f.eval_unchecked(&x) as usize] += 1;
            }
        }
        Domain::Points(pts) => {
            budget.check(pts.len() as u128)?;
            for x in pts {
                check_dim(f.num_vars(), x.len())?;
                counts[f.eval_unchecked(x) as usize] += 1;
            }
        }
    }
    let domain_size = counts.iter().sum();
    Ok(LevelCounts { counts, domain_size })
}

impl LevelCounts {
    fn modulus(&self) -> PrimeModulus {
        PrimeModulus::new(self.counts.len() as u32).expect("counts indexed by a valid prime")
    }

    /// `S = sum_j c_j ζ^j`.
    pub fn character_sum(&self) -> CyclotomicInteger {
        let coeffs: Vec<i128> = self.counts.iter().map(|&c| c as i128).collect();
        CyclotomicInteger::from_power_coeffs(self.modulus(), &coeffs)
    }

    /// `|S|^2 = sum_d R_d ζ^d`, `R_d = sum_j c_j c_{j+d}`.
    pub fn squared_modulus(&self) -> CyclotomicInteger {
        let q = self.counts.len();
        let r: Vec<i128> =
            (0..q).map(|d| (0..q).map(|j| self.counts[j] as i128 * self.counts[(j + d) % q] as i128).sum()).collect();
        CyclotomicInteger::from_power_coeffs(self.modulus(), &r)
    }

    /// `|E_x e_p(f(x))|` from the exact counts; 0 on an empty domain.
    pub fn bias(&self) -> f64 {
        if self.domain_size == 0 {
            return 0.0;
        }
        let s2 = self.squared_modulus().to_complex().re.max(0.0);
        (s2.sqrt() / self.domain_size as f64).min(1.0)
    }

    /// Whether `bias^2 = p^{-m}` holds exactly, i.e. `|S|^2 p^m = |D|^2`.
    pub fn bias_is_power(&self, m: u32) -> bool {
        let p = self.modulus();
        match self.squared_modulus().as_rational() {
            Some(v) => {
                let d = self.domain_size as i128;
                v.checked_mul((p.get() as i128).pow(m)) == Some(d * d)
            }
            None => false,
        }
    }

    /// Exact classification of `bias^2`: zero, `p^{-m}` for an integer `m`,
    /// or neither.
    pub fn power_class(&self) -> PowerClass {
        let p = self.modulus().get() as i128;
        let Some(v) = self.squared_modulus().as_rational() else {
            return PowerClass::Other;
        };
        if v == 0 {
            return PowerClass::Zero;
        }
        let target = (self.domain_size as i128).pow(2);
        let mut acc = v;
        let mut m = 0;
        while acc < target {
            acc *= p;
            m += 1;
        }
        if acc == target {
            PowerClass::Power(m)
        } else {
            PowerClass::Other
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerClass {
    Zero,
    Power(u32),
    Other,
}

/// A bias value together with the exact counts that back it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bias {
    pub value: f64,
    pub counts: LevelCounts,
}

pub fn bias(f: &Polynomial, domain: Domain<'_>, budget: Budget) -> Result<Bias> {
    let counts = level_counts(f, domain, budget)?;
    Ok(Bias { value: counts.bias(), counts })
}

/// Exact test of `bias(f)^2 = p^{-m}` on `domain` for `deg f <= 2`.
pub fn bias_equals_power_check(f: &Polynomial, domain: Domain<'_>, m: u32, budget: Budget) -> Result<bool> {
    if f.degree() > 2 {
        return Err(Error::Usage(format!("power check needs a quadratic, got degree {}", f.degree())));
    }
    Ok(level_counts(f, domain, budget)?.bias_is_power(m))
}

/// An element `sum_k a_k ζ^k` of Z[ζ_p] in the basis `1, ζ, ..., ζ^{p-2}`,
/// using `ζ^{p-1} = -(1 + ζ + ... + ζ^{p-2})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclotomicInteger {
    p: PrimeModulus,
    coords: Vec<i128>,
}

impl CyclotomicInteger {
    pub fn zero(p: PrimeModulus) -> Self {
        Self { p, coords: vec![0; p.size() - 1] }
    }

    pub fn from_integer(p: PrimeModulus, v: i128) -> Self {
        let mut z = Self::zero(p);
        z.coords[0] = v;
        z
    }

    /// Canonical form of `sum_{k<p} coeffs[k] ζ^k` (indices taken mod p).
    pub fn from_power_coeffs(p: PrimeModulus, coeffs: &[i128]) -> Self {
        let q = p.size();
        let mut full = vec![0i128; q];
        for (k, &c) in coeffs.iter().enumerate() {
            full[k % q] += c;
        }
        let top = full[q - 1];
        let coords = full[..q - 1].iter().map(|&c| c - top).collect();
        Self { p, coords }
    }

    pub fn coords(&self) -> &[i128] {
        &self.coords
    }

    pub fn add(&self, other: &Self) -> Self {
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Self { p: self.p, coords }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let q = self.p.size();
        let mut prod = vec![0i128; q];
        for (i, &a) in self.coords.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coords.iter().enumerate() {
                prod[(i + j) % q] += a * b;
            }
        }
        Self::from_power_coeffs(self.p, &prod)
    }

    /// Complex conjugation `ζ -> ζ^{-1}`.
    pub fn conj(&self) -> Self {
        let q = self.p.size();
        let mut full = vec![0i128; q];
        for (k, &c) in self.coords.iter().enumerate() {
            full[(q - k) % q] += c;
        }
        Self::from_power_coeffs(self.p, &full)
    }

    /// The rational integer this element equals, if it lies in Z.
    pub fn as_rational(&self) -> Option<i128> {
        self.coords[1..].iter().all(|&c| c == 0).then_some(self.coords[0])
    }

    pub fn to_complex(&self) -> num_complex::Complex64 {
        let q = self.p.get() as f64;
        self.coords
            .iter()
            .enumerate()
            .map(|(k, &c)| num_complex::Complex64::from_polar(c as f64, 2.0 * std::f64::consts::PI * k as f64 / q))
            .sum()
    }
}
