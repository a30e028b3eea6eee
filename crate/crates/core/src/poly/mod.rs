//! Multivariate polynomials over F_p as functions F_p^n -> F_p.
//!
//! Terms are kept in a sorted map from monomial to nonzero coefficient, with
//! every exponent reduced by `x^p = x`. Two polynomials are therefore equal
//! as values exactly when they agree as functions.

mod polarization;
mod table;
mod text;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{check_dim, Error, Result};
use crate::field::{PrimeModulus, Scalar};
use crate::linalg::AffineSubspace;

pub use polarization::MultilinearForm;
pub use table::ValueTable;
pub use text::{PolynomialJson, TermJson};

/// Default bound on total degree for user-facing products.
pub const DEFAULT_MAX_DEGREE: i32 = 4;
/// Largest degree bound accepted by [`Polynomial::multiply_with_limit`].
pub const PRODUCT_MAX_DEGREE: i32 = 8;
/// Longest direction list accepted by [`Polynomial::iterated_derivative`].
pub const MAX_DERIVATIVE_ORDER: usize = 5;

/// Exponent vector. Ordered by total degree, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u8>,
}

impl Monomial {
    pub fn new(exps: Vec<u8>) -> Self {
        Self { exps }
    }

    pub fn one(n: usize) -> Self {
        Self { exps: vec![0; n] }
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut exps = vec![0; n];
        exps[i] = 1;
        Self { exps }
    }

    pub fn exps(&self) -> &[u8] {
        &self.exps
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    /// Product with `x^p = x` applied.
    fn mul(&self, other: &Monomial, p: PrimeModulus) -> Monomial {
        let exps = self.exps.iter().zip(&other.exps).map(|(&a, &b)| reduce_exp(a as u32 + b as u32, p)).collect();
        Monomial { exps }
    }

    /// The variable indices of this monomial as a sorted multiset.
    fn variables(&self) -> Vec<usize> {
        self.exps.iter().enumerate().flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize)).collect()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree().cmp(&other.total_degree()).then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn reduce_exp(e: u32, p: PrimeModulus) -> u8 {
    let q = p.get();
    if e < q {
        e as u8
    } else {
        ((e - 1) % (q - 1) + 1) as u8
    }
}

fn binomial(n: u32, k: u32) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    p: PrimeModulus,
    n: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero(p: PrimeModulus, n: usize) -> Self {
        Self { p, n, terms: BTreeMap::new() }
    }

    pub fn constant(p: PrimeModulus, n: usize, c: Scalar) -> Self {
        let mut f = Self::zero(p, n);
        f.add_term(Monomial::one(n), c);
        f
    }

    /// The coordinate `x_i`, 0-based.
    pub fn var(p: PrimeModulus, n: usize, i: usize) -> Self {
        let mut f = Self::zero(p, n);
        f.add_term(Monomial::var(n, i), 1);
        f
    }

    /// Build from `(coefficient, exponents)` pairs; exponents are reduced and
    /// like terms combined.
    pub fn from_terms<I>(p: PrimeModulus, n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Scalar, Vec<u32>)>,
    {
        let mut f = Self::zero(p, n);
        for (c, exps) in terms {
            check_dim(n, exps.len())?;
            let mono = Monomial::new(exps.into_iter().map(|e| reduce_exp(e, p)).collect());
            f.add_term(mono, c % p.get());
        }
        Ok(f)
    }

    /// Degree-at-most-one polynomial from an affine form.
    pub fn from_linear(p: PrimeModulus, form: &crate::linalg::LinearForm) -> Self {
        let n = form.dim();
        let mut f = Self::constant(p, n, form.constant);
        for (i, &c) in form.coeffs.iter().enumerate() {
            f.add_term(Monomial::var(n, i), c);
        }
        f
    }

    fn add_term(&mut self, mono: Monomial, c: Scalar) {
        if c == 0 {
            return;
        }
        let p = self.p;
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = p.add(*e.get(), c);
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, Scalar)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Scalar {
        self.terms.get(mono).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree -1.
    pub fn degree(&self) -> i32 {
        self.terms.keys().next_back().map_or(-1, |m| m.total_degree() as i32)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::total_degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p.get(), other.p.get()));
        }
        check_dim(self.n, other.n)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(self.p.neg(1))
    }

    pub fn scale(&self, c: Scalar) -> Self {
        let c = c % self.p.get();
        let terms = if c == 0 {
            BTreeMap::new()
        } else {
            self.terms.iter().map(|(m, &v)| (m.clone(), self.p.mul(v, c))).collect()
        };
        Self { p: self.p, n: self.n, terms }
    }

    /// Product with the default degree limit.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.multiply_with_limit(other, DEFAULT_MAX_DEGREE)
    }

    /// Product, rejecting results of degree above `limit` (at most
    /// [`PRODUCT_MAX_DEGREE`]) or of degree `>= p`.
    pub fn multiply_with_limit(&self, other: &Self, limit: i32) -> Result<Self> {
        self.check_compatible(other)?;
        if limit > PRODUCT_MAX_DEGREE {
            return Err(Error::Usage(format!("degree limit {limit} above {PRODUCT_MAX_DEGREE}")));
        }
        let degree = self.degree() + other.degree();
        if !self.is_zero() && !other.is_zero() {
            if degree > limit {
                return Err(Error::DegreeLimit { degree, limit });
            }
            if degree >= self.p.get() as i32 {
                return Err(Error::DegreeLimit { degree, limit: self.p.get() as i32 - 1 });
            }
        }
        Ok(self.mul_reduced(other))
    }

    /// Product as functions, with no degree bookkeeping.
    pub(crate) fn mul_reduced(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.p, self.n);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                out.add_term(a.mul(b, self.p), self.p.mul(ca, cb));
            }
        }
        out
    }

    pub fn evaluate(&self, x: &[Scalar]) -> Result<Scalar> {
        check_dim(self.n, x.len())?;
        Ok(self.eval_unchecked(x))
    }

    /// Evaluation without the dimension check, for enumeration kernels.
    pub fn eval_unchecked(&self, x: &[Scalar]) -> Scalar {
        let p = self.p;
        let mut acc = 0u64;
        for (m, &c) in &self.terms {
            let mut v = c;
            for (&xi, &e) in x.iter().zip(&m.exps) {
                if e > 0 {
                    v = p.mul(v, p.pow(xi, e as u64));
                }
            }
            acc += v as u64;
        }
        (acc % p.get() as u64) as Scalar
    }

    /// `x -> f(x + h) - f(x)`.
    pub fn discrete_derivative(&self, h: &[Scalar]) -> Result<Self> {
        check_dim(self.n, h.len())?;
        let p = self.p;
        let mut out = Self::zero(p, self.n);
        for (m, &c) in &self.terms {
            // expand prod_i (x_i + h_i)^{e_i}, dropping the leading x^e term
            let mut partial: Vec<(Vec<u8>, Scalar)> = vec![(Vec::with_capacity(self.n), c)];
            for (i, &e) in m.exps.iter().enumerate() {
                let mut next = Vec::with_capacity(partial.len() * (e as usize + 1));
                for (exps, coef) in &partial {
                    for k in 0..=e as u32 {
                        let w = p.mul(
                            (binomial(e as u32, k) % p.get() as u64) as Scalar,
                            p.pow(h[i], (e as u32 - k) as u64),
                        );
                        if w == 0 {
                            continue;
                        }
                        let mut ex = exps.clone();
                        ex.push(k as u8);
                        next.push((ex, p.mul(*coef, w)));
                    }
                }
                partial = next;
            }
            for (exps, coef) in partial {
                if exps != m.exps {
                    out.add_term(Monomial::new(exps), coef);
                }
            }
        }
        Ok(out)
    }

    /// Left fold of [`Self::discrete_derivative`] over `hs`.
    pub fn iterated_derivative(&self, hs: &[Vec<Scalar>]) -> Result<Self> {
        if hs.len() > MAX_DERIVATIVE_ORDER {
            return Err(Error::Usage(format!("at most {MAX_DERIVATIVE_ORDER} directions")));
        }
        hs.iter().try_fold(self.clone(), |f, h| f.discrete_derivative(h))
    }

    /// Sum of the terms of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let terms = self.terms.iter().filter(|(m, _)| m.total_degree() == d).map(|(m, &c)| (m.clone(), c)).collect();
        Self { p: self.p, n: self.n, terms }
    }

    /// Substitute `x_i := subs[i]`; every substitute lives in the same ring.
    pub fn compose(&self, subs: &[Polynomial]) -> Result<Self> {
        check_dim(self.n, subs.len())?;
        let Some(first) = subs.first() else {
            return Ok(Self::constant(self.p, 0, self.coefficient(&Monomial::one(0))));
        };
        let m = first.n;
        for s in subs {
            check_dim(m, s.n)?;
        }
        let max_exp: Vec<u8> = (0..self.n).map(|i| self.terms.keys().map(|mo| mo.exps[i]).max().unwrap_or(0)).collect();
        let powers: Vec<Vec<Polynomial>> = subs
            .iter()
            .zip(&max_exp)
            .map(|(s, &e)| {
                let mut pw = vec![Self::constant(self.p, m, 1)];
                for _ in 0..e {
                    let next = pw.last().unwrap().mul_reduced(s);
                    pw.push(next);
                }
                pw
            })
            .collect();
        let mut out = Self::zero(self.p, m);
        for (mono, &c) in &self.terms {
            let mut term = Self::constant(self.p, m, c);
            for (i, &e) in mono.exps.iter().enumerate() {
                if e > 0 {
                    term = term.mul_reduced(&powers[i][e as usize]);
                }
            }
            for (mm, cc) in term.terms {
                out.add_term(mm, cc);
            }
        }
        Ok(out)
    }

    /// The polynomial `c -> f(offset + sum_j c_j b_j)` in `dim(S)` fresh
    /// coordinates, using the canonical basis of `S`.
    pub fn restrict(&self, s: &AffineSubspace) -> Result<Self> {
        check_dim(self.n, s.ambient())?;
        let p = self.p;
        let k = s.dim();
        let basis = s.direction().basis();
        let subs: Vec<Polynomial> = (0..self.n)
            .map(|i| {
                let mut lin = Self::constant(p, k, s.offset()[i]);
                for (j, b) in basis.iter().enumerate() {
                    lin.add_term(Monomial::var(k, j), b[i]);
                }
                lin
            })
            .collect();
        self.compose(&subs)
    }

    /// Re-express a polynomial on a subspace `V` (given in `V`'s canonical
    /// coordinates) as a polynomial on the ambient space that agrees with it on
    /// `V`, via `c_j = x_{pivot_j}`.
    pub fn lift_from_subspace(&self, v: &crate::linalg::Subspace) -> Result<Self> {
        check_dim(v.dim(), self.n)?;
        let subs: Vec<Polynomial> = v.pivots().iter().map(|&pc| Self::var(self.p, v.ambient(), pc)).collect();
        if subs.is_empty() {
            return Ok(Self::constant(self.p, v.ambient(), self.coefficient(&Monomial::one(0))));
        }
        self.compose(&subs)
    }

    /// The symmetric multilinear form `D(h_1, ..., h_d)` equal to
    /// `Δ_{h_1}...Δ_{h_d} f` whenever `deg f <= d`. Built from the degree-`d`
    /// part by summing each monomial over all orderings of its variables.
    pub fn polarization(&self, d: usize) -> MultilinearForm {
        let mut form = MultilinearForm::zero(self.p, self.n, d);
        for (m, &c) in &self.terms {
            if m.total_degree() as usize != d {
                continue;
            }
            let vars = m.variables();
            for perm in permutations(d) {
                let idx: Vec<usize> = perm.iter().map(|&k| vars[k]).collect();
                form.add_at(&idx, c);
            }
        }
        form
    }
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; d], &mut out);
    out
}
