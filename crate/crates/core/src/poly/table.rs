use serde::{Deserialize, Serialize};

use super::{Monomial, Polynomial};
use crate::error::{Budget, Error, Result};
use crate::field::{PrimeModulus, Scalar};

/// All values of a function F_p^n -> F_p, indexed by the row-major base-p
/// point order (`x_1` most significant).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueTable {
    pub p: PrimeModulus,
    pub n: usize,
    pub values: Vec<Scalar>,
}

impl ValueTable {
    pub fn new(p: PrimeModulus, n: usize, values: Vec<Scalar>) -> Result<Self> {
        let expected = p.power_count(n);
        if values.len() as u128 != expected {
            return Err(Error::Usage(format!("table has {} entries, expected {expected}", values.len())));
        }
        Ok(Self { p, n, values: values.into_iter().map(|v| v % p.get()).collect() })
    }

    pub fn get(&self, x: &[Scalar]) -> Scalar {
        self.values[self.p.point_index(x)]
    }

    /// The unique reduced polynomial with these values.
    pub fn interpolate(&self, budget: Budget) -> Result<Polynomial> {
        budget.check(self.values.len() as u128)?;
        let inv = inverse_vandermonde(self.p);
        let coeffs = apply_along_axes(self.p, self.n, &self.values, &inv);
        let mut f = Polynomial::zero(self.p, self.n);
        for (idx, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                let exps = self.p.index_point(idx, self.n).into_iter().map(|e| e as u8).collect();
                f.add_term(Monomial::new(exps), c);
            }
        }
        Ok(f)
    }
}

impl Polynomial {
    /// Dense value table, computed by an evaluation transform along each axis.
    pub fn to_table(&self, budget: Budget) -> Result<ValueTable> {
        budget.check(self.p.power_count(self.n))?;
        let size = self.p.power_count(self.n) as usize;
        let mut coeffs = vec![0; size];
        for (m, c) in self.terms() {
            let idx = m.exps().iter().fold(0usize, |acc, &e| acc * self.p.size() + e as usize);
            coeffs[idx] = c;
        }
        let values = apply_along_axes(self.p, self.n, &coeffs, &vandermonde(self.p));
        Ok(ValueTable { p: self.p, n: self.n, values })
    }
}

/// `V[x][e] = x^e` with `0^0 = 1`.
fn vandermonde(p: PrimeModulus) -> Vec<Vec<Scalar>> {
    (0..p.get()).map(|x| (0..p.get()).map(|e| p.pow(x, e as u64)).collect()).collect()
}

fn inverse_vandermonde(p: PrimeModulus) -> Vec<Vec<Scalar>> {
    let q = p.size();
    let v = vandermonde(p);
    let mut aug: Vec<Vec<Scalar>> = v
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..q).map(|j| u32::from(i == j)));
            r
        })
        .collect();
    crate::linalg::rref(p, &mut aug, q);
    aug.into_iter().map(|r| r[q..].to_vec()).collect()
}

/// Apply the `p x p` matrix `m` along every axis of a row-major tensor.
fn apply_along_axes(p: PrimeModulus, n: usize, data: &[Scalar], m: &[Vec<Scalar>]) -> Vec<Scalar> {
    let q = p.size();
    let mut cur = data.to_vec();
    let mut fiber = vec![0; q];
    for axis in 0..n {
        let stride = q.pow((n - 1 - axis) as u32);
        let block = stride * q;
        let mut next = vec![0; cur.len()];
        for base in (0..cur.len()).step_by(block) {
            for off in 0..stride {
                for (k, f) in fiber.iter_mut().enumerate() {
                    *f = cur[base + off + k * stride];
                }
                for (r, row) in m.iter().enumerate() {
                    next[base + off + r * stride] = p.dot(row, &fiber);
                }
            }
        }
        cur = next;
    }
    cur
}
