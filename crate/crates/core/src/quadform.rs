//! Quadratic polynomials as forms: the pairing `(s,t) = Q(s+t) - Q(s) - Q(t)`,
//! Gram rank, Witt type and exact Schmidt rank with an explicit product
//! decomposition.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::field::{PrimeModulus, Scalar};
use crate::linalg::{AffineSubspace, LinearForm, Subspace};
use crate::poly::Polynomial;

/// `sum_{i<=j} g_ij x_i x_j + linear(x) + constant`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticPoly {
    p: PrimeModulus,
    /// Upper triangle, `hom[i][j]` for `i <= j`; entries below the diagonal are 0.
    hom: Vec<Vec<Scalar>>,
    linear: LinearForm,
    constant: Scalar,
}

impl QuadraticPoly {
    pub fn zero(p: PrimeModulus, n: usize) -> Self {
        Self { p, hom: vec![vec![0; n]; n], linear: LinearForm::zero(n), constant: 0 }
    }

    /// Build from a full coefficient table; `g[i][j]` and `g[j][i]` both
    /// contribute to the `x_i x_j` coefficient.
    pub fn from_parts(p: PrimeModulus, g: &[Vec<Scalar>], linear: Vec<Scalar>, constant: Scalar) -> Result<Self> {
        let n = g.len();
        check_dim(n, linear.len())?;
        let mut q = Self::zero(p, n);
        for (i, row) in g.iter().enumerate() {
            check_dim(n, row.len())?;
            for (j, &c) in row.iter().enumerate() {
                let (a, b) = (i.min(j), i.max(j));
                q.hom[a][b] = p.add(q.hom[a][b], c % p.get());
            }
        }
        q.linear = LinearForm::homogeneous(linear.into_iter().map(|c| c % p.get()).collect());
        q.constant = constant % p.get();
        Ok(q)
    }

    pub fn from_polynomial(f: &Polynomial) -> Result<Self> {
        if f.degree() > 2 {
            return Err(Error::DegreeLimit { degree: f.degree(), limit: 2 });
        }
        let p = f.modulus();
        let n = f.num_vars();
        let mut q = Self::zero(p, n);
        for (m, c) in f.terms() {
            let vars: Vec<usize> =
                m.exps().iter().enumerate().flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize)).collect();
            match vars[..] {
                [] => q.constant = c,
                [i] => q.linear.coeffs[i] = c,
                [i, j] => q.hom[i][j] = c,
                _ => unreachable!("degree checked above"),
            }
        }
        Ok(q)
    }

    pub fn to_polynomial(&self) -> Polynomial {
        let n = self.dim();
        let mut terms = vec![(self.constant, vec![0u32; n])];
        for i in 0..n {
            let mut e = vec![0u32; n];
            e[i] = 1;
            terms.push((self.linear.coeffs[i], e));
            for j in i..n {
                let mut e = vec![0u32; n];
                e[i] += 1;
                e[j] += 1;
                terms.push((self.hom[i][j], e));
            }
        }
        Polynomial::from_terms(self.p, n, terms).expect("dimensions agree by construction")
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.hom.len()
    }

    /// Coefficient of `x_i x_j` (order-insensitive).
    pub fn coefficient(&self, i: usize, j: usize) -> Scalar {
        self.hom[i.min(j)][i.max(j)]
    }

    pub fn linear(&self) -> &LinearForm {
        &self.linear
    }

    pub fn constant(&self) -> Scalar {
        self.constant
    }

    /// The purely quadratic part.
    pub fn homogeneous(&self) -> Self {
        Self { p: self.p, hom: self.hom.clone(), linear: LinearForm::zero(self.dim()), constant: 0 }
    }

    /// No quadratic terms.
    pub fn is_affine(&self) -> bool {
        self.hom.iter().flatten().all(|&c| c == 0)
    }

    pub fn eval(&self, x: &[Scalar]) -> Scalar {
        let p = self.p;
        let mut acc = p.add(self.linear.eval(p, x), self.constant);
        for (i, row) in self.hom.iter().enumerate() {
            if x[i] == 0 {
                continue;
            }
            let inner = row[i..].iter().zip(&x[i..]).fold(0, |a, (&g, &xj)| p.add(a, p.mul(g, xj)));
            acc = p.add(acc, p.mul(x[i], inner));
        }
        acc
    }

    pub fn gram(&self) -> GramMatrix {
        let p = self.p;
        let n = self.dim();
        let h = &self.hom;
        let m = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.cmp(&j) {
                        std::cmp::Ordering::Equal => p.add(h[i][i], h[i][i]),
                        std::cmp::Ordering::Less => h[i][j],
                        std::cmp::Ordering::Greater => h[j][i],
                    })
                    .collect()
            })
            .collect();
        GramMatrix { p, m }
    }

    /// `(s,t) = Q(s+t) - Q(s) - Q(t)`.
    pub fn gram_pair(&self, s: &[Scalar], t: &[Scalar]) -> Result<Scalar> {
        check_dim(self.dim(), s.len())?;
        check_dim(self.dim(), t.len())?;
        Ok(self.gram().pair(s, t))
    }

    /// The homogeneous linear form `x -> (t, x)`.
    pub fn pairing_form(&self, t: &[Scalar]) -> Result<LinearForm> {
        check_dim(self.dim(), t.len())?;
        Ok(LinearForm::homogeneous(self.gram().apply(t)))
    }

    pub fn gram_rank(&self) -> usize {
        self.gram().rank()
    }

    /// `sum_k c_k Q_k`.
    pub fn linear_combination(p: PrimeModulus, n: usize, coeffs: &[Scalar], quads: &[QuadraticPoly]) -> Result<Self> {
        check_dim(quads.len(), coeffs.len())?;
        let mut out = Self::zero(p, n);
        for (&c, q) in coeffs.iter().zip(quads) {
            check_dim(n, q.dim())?;
            if c == 0 {
                continue;
            }
            for i in 0..n {
                for j in i..n {
                    out.hom[i][j] = p.add(out.hom[i][j], p.mul(c, q.hom[i][j]));
                }
            }
            out.linear = out.linear.add(p, &q.linear.scale(p, c));
            out.constant = p.add(out.constant, p.mul(c, q.constant));
        }
        Ok(out)
    }

    /// The restriction `c -> Q(sum_j c_j b_j)` in the canonical coordinates of `v`.
    pub fn restrict(&self, v: &Subspace) -> Result<Self> {
        let f = self.to_polynomial().restrict(&AffineSubspace::linear(v.clone()))?;
        Self::from_polynomial(&f)
    }

    /// Schmidt rank together with a decomposition that has been re-expanded
    /// and compared against `self`.
    pub fn schmidt_rank(&self) -> RankCertificate {
        let cert = build_certificate(self);
        assert!(cert.verify(self), "rank decomposition failed re-expansion");
        cert
    }
}

impl Serialize for QuadraticPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_polynomial().serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadraticPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = Polynomial::deserialize(d)?;
        Self::from_polynomial(&f).map_err(serde::de::Error::custom)
    }
}

/// Symmetric matrix of the pairing: `M[i][j] = (e_i, e_j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramMatrix {
    p: PrimeModulus,
    m: Vec<Vec<Scalar>>,
}

impl GramMatrix {
    pub fn entries(&self) -> &[Vec<Scalar>] {
        &self.m
    }

    pub fn pair(&self, s: &[Scalar], t: &[Scalar]) -> Scalar {
        self.p.dot(s, &self.apply(t))
    }

    /// `M t`.
    pub fn apply(&self, t: &[Scalar]) -> Vec<Scalar> {
        self.m.iter().map(|row| self.p.dot(row, t)).collect()
    }

    pub fn rank(&self) -> usize {
        crate::linalg::rank(self.p, &self.m, self.m.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WittType {
    Odd,
    Hyperbolic,
    NonHyperbolic,
}

/// Exact Schmidt rank of a quadratic with a witnessing decomposition
/// `Q = sum_k l_k l'_k + remainder`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCertificate {
    #[serde(rename = "m")]
    pub gram_rank: usize,
    pub witt: WittType,
    #[serde(rename = "r")]
    pub schmidt_rank: usize,
    pub factors: Vec<(LinearForm, LinearForm)>,
    pub remainder: LinearForm,
}

impl RankCertificate {
    /// The rank predicted from `m` and the Witt type alone.
    pub fn formula(m: usize, witt: WittType) -> usize {
        match witt {
            WittType::Odd => m.div_ceil(2),
            WittType::Hyperbolic => m / 2,
            WittType::NonHyperbolic => m / 2 + 1,
        }
    }

    /// Re-expand the decomposition and compare with `q` term by term.
    pub fn verify(&self, q: &QuadraticPoly) -> bool {
        let p = q.modulus();
        if self.factors.len() != self.schmidt_rank {
            return false;
        }
        let mut acc = Polynomial::from_linear(p, &self.remainder);
        for (a, b) in &self.factors {
            let prod = Polynomial::from_linear(p, a).mul_reduced(&Polynomial::from_linear(p, b));
            acc = match acc.add(&prod) {
                Ok(s) => s,
                Err(_) => return false,
            };
        }
        acc == q.to_polynomial()
    }
}

/// A diagonal term `coef * form^2`.
struct Square {
    coef: Scalar,
    form: Vec<Scalar>,
}

/// Lagrange diagonalization of the homogeneous part: `Q_hom = sum_k d_k l_k^2`
/// with linearly independent `l_k`.
fn diagonalize(q: &QuadraticPoly) -> Vec<Square> {
    let p = q.p;
    let n = q.dim();
    let half = p.inv(2);
    // B with Q_hom(x) = x^T B x
    let mut b: Vec<Vec<Scalar>> = q.gram().m.iter().map(|row| p.scale_vec(half, row)).collect();
    let mut out = Vec::new();
    loop {
        let v = (0..n)
            .find(|&i| b[i][i] != 0)
            .map(|i| {
                let mut v = vec![0; n];
                v[i] = 1;
                v
            })
            .or_else(|| {
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| b[i][j] != 0).map(|(i, j)| {
                    let mut v = vec![0; n];
                    v[i] = 1;
                    v[j] = 1;
                    v
                })
            });
        let Some(v) = v else { break };
        let l: Vec<Scalar> = b.iter().map(|row| p.dot(row, &v)).collect();
        let qv = p.dot(&v, &l);
        let d = p.inv(qv);
        for i in 0..n {
            for j in 0..n {
                b[i][j] = p.sub(b[i][j], p.mul(d, p.mul(l[i], l[j])));
            }
        }
        out.push(Square { coef: d, form: l });
    }
    out
}

fn witt_type(p: PrimeModulus, squares: &[Square]) -> WittType {
    let m = squares.len();
    if m % 2 == 1 {
        return WittType::Odd;
    }
    let sign = if (m / 2).is_multiple_of(2) { 1 } else { p.neg(1) };
    let disc = squares.iter().fold(sign, |acc, s| p.mul(acc, s.coef));
    if p.is_square(disc) {
        WittType::Hyperbolic
    } else {
        WittType::NonHyperbolic
    }
}

fn build_certificate(q: &QuadraticPoly) -> RankCertificate {
    let p = q.p;
    let n = q.dim();
    let mut terms = diagonalize(q);
    let m = terms.len();
    let witt = witt_type(p, &terms);
    let mut factors = Vec::new();
    // a y_i^2 + b y_j^2 = a (y_i - c y_j)(y_i + c y_j) when c^2 = -b/a
    while terms.len() >= 2 {
        let pair = (0..terms.len()).flat_map(|i| (i + 1..terms.len()).map(move |j| (i, j))).find_map(|(i, j)| {
            let ratio = p.neg(p.mul(terms[j].coef, p.inv(terms[i].coef)));
            p.sqrt(ratio).map(|c| (i, j, c))
        });
        if let Some((i, j, c)) = pair {
            let tj = terms.remove(j);
            let ti = terms.remove(i);
            let cy = p.scale_vec(c, &tj.form);
            factors.push((
                LinearForm::homogeneous(p.scale_vec(ti.coef, &p.sub_vec(&ti.form, &cy))),
                LinearForm::homogeneous(p.add_vec(&ti.form, &cy)),
            ));
            continue;
        }
        if terms.len() == 2 {
            break;
        }
        // Rewrite a1 Y1^2 + a2 Y2^2 so one new square pairs with a3 Y3^2:
        // (a1 u^2 + a2 v^2)(a1 Y1^2 + a2 Y2^2) = (a1 u Y1 + a2 v Y2)^2 + a1 a2 (v Y1 - u Y2)^2
        let (a1, a2, a3) = (terms[0].coef, terms[1].coef, terms[2].coef);
        let target = p.neg(a3);
        let (u, v) = (0..p.get())
            .flat_map(|u| (0..p.get()).map(move |v| (u, v)))
            .find(|&(u, v)| p.add(p.mul(a1, p.mul(u, u)), p.mul(a2, p.mul(v, v))) == target)
            .expect("a nondegenerate binary form represents every nonzero value");
        let inv_t = p.inv(target);
        let (y1, y2) = (terms[0].form.clone(), terms[1].form.clone());
        let l1 = p.add_vec(&p.scale_vec(p.mul(a1, u), &y1), &p.scale_vec(p.mul(a2, v), &y2));
        let l2 = p.sub_vec(&p.scale_vec(v, &y1), &p.scale_vec(u, &y2));
        terms[0] = Square { coef: inv_t, form: l1 };
        terms[1] = Square { coef: p.mul(p.mul(a1, a2), inv_t), form: l2 };
    }
    for t in terms {
        factors.push((LinearForm::homogeneous(p.scale_vec(t.coef, &t.form)), LinearForm::homogeneous(t.form)));
    }
    let schmidt_rank = factors.len();
    debug_assert_eq!(schmidt_rank, RankCertificate::formula(m, witt));
    let remainder = LinearForm::new(q.linear.coeffs.clone(), q.constant);
    debug_assert_eq!(remainder.dim(), n);
    RankCertificate { gram_rank: m, witt, schmidt_rank, factors, remainder }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> PrimeModulus {
        PrimeModulus::new(5).unwrap()
    }

    fn quad(n: usize, s: &str) -> QuadraticPoly {
        QuadraticPoly::from_polynomial(&Polynomial::parse(f5(), n, s).unwrap()).unwrap()
    }

    #[test]
    fn polynomial_round_trip() {
        let f = Polynomial::parse(f5(), 3, "2*x1^2 + x1*x3 + 4*x2 + 1").unwrap();
        let q = QuadraticPoly::from_polynomial(&f).unwrap();
        assert_eq!(q.to_polynomial(), f);
        assert_eq!(q.coefficient(2, 0), 1);
        for x in Subspace::full(f5(), 3).points(Default::default()).unwrap() {
            assert_eq!(q.eval(&x), f.evaluate(&x).unwrap());
        }
        assert!(QuadraticPoly::from_polynomial(&Polynomial::parse(f5(), 1, "x1^3").unwrap()).is_err());
    }

    #[test]
    fn pairing_examples() {
        let q = quad(2, "x1*x2");
        assert_eq!(q.gram_pair(&[1, 0], &[0, 1]).unwrap(), 1);
        assert_eq!(q.pairing_form(&[1, 0]).unwrap(), LinearForm::homogeneous(vec![0, 1]));
        assert!(q.pairing_form(&[0, 0]).unwrap().is_zero());
        let aff = quad(2, "3*x1 + 2");
        assert_eq!(aff.gram_pair(&[1, 2], &[3, 4]).unwrap(), 0);
        let sq = quad(1, "3*x1^2");
        assert_eq!(sq.gram().entries()[0][0], 1); // 2*3 = 6 = 1
    }

    #[test]
    fn pairing_is_polarization() {
        let q = quad(3, "x1^2 + 2*x1*x2 + 3*x3^2 + x2*x3 + x1 + 4");
        for s in Subspace::full(f5(), 3).points(Default::default()).unwrap() {
            for t in [[1, 0, 2], [4, 4, 1]] {
                let direct = f5().sub(f5().sub(q.eval(&f5().add_vec(&s, &t)), q.eval(&s)), q.eval(&t));
                // the constant is counted once in Q(s+t) and twice in the subtraction
                assert_eq!(f5().sub(direct, f5().neg(q.constant())), q.gram_pair(&s, &t).unwrap());
            }
            assert_eq!(q.gram_pair(&s, &s).unwrap(), f5().mul(2, q.homogeneous().eval(&s)));
        }
    }

    #[test]
    fn rank_examples() {
        let c = quad(2, "x1*x2").schmidt_rank();
        assert_eq!((c.gram_rank, c.witt, c.schmidt_rank), (2, WittType::Hyperbolic, 1));
        let c = quad(2, "x1^2 + x2^2").schmidt_rank();
        assert_eq!((c.gram_rank, c.witt, c.schmidt_rank), (2, WittType::Hyperbolic, 1));
        let c = quad(2, "x1^2 + 2*x2^2").schmidt_rank();
        assert_eq!((c.gram_rank, c.witt, c.schmidt_rank), (2, WittType::NonHyperbolic, 2));
        let c = quad(3, "x1^2 + x2^2 + x3^2 + x1").schmidt_rank();
        assert_eq!((c.gram_rank, c.witt, c.schmidt_rank), (3, WittType::Odd, 2));
        assert_eq!(c.remainder, LinearForm::new(vec![1, 0, 0], 0));
        let c = quad(2, "3*x2 + 1").schmidt_rank();
        assert_eq!((c.gram_rank, c.witt, c.schmidt_rank), (0, WittType::Hyperbolic, 0));
    }

    #[test]
    fn rediagonalization_path() {
        // -1 is a nonsquare mod 7, so equal coefficients never pair directly
        let p7 = PrimeModulus::new(7).unwrap();
        let f = Polynomial::parse(p7, 4, "x1^2 + x2^2 + x3^2 + x4^2").unwrap();
        let c = QuadraticPoly::from_polynomial(&f).unwrap().schmidt_rank();
        assert_eq!(c.gram_rank, 4);
        assert_eq!(c.witt, WittType::Hyperbolic);
        assert_eq!(c.schmidt_rank, 2);
    }

    #[test]
    fn certificate_json_shape() {
        let c = quad(2, "x1*x2").schmidt_rank();
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["m"], 2);
        assert_eq!(v["witt"], "hyperbolic");
        assert_eq!(v["r"], 1);
        assert_eq!(v["factors"].as_array().unwrap().len(), 1);
        assert!(v.get("remainder").is_some());
    }

    #[test]
    fn linear_combination_and_restriction() {
        let a = quad(2, "x1*x2");
        let b = quad(2, "x1^2 + x2");
        let c = QuadraticPoly::linear_combination(f5(), 2, &[2, 3], &[a, b]).unwrap();
        assert_eq!(c, quad(2, "2*x1*x2 + 3*x1^2 + 3*x2"));
        let line = Subspace::span(f5(), 2, vec![vec![1, 1]]).unwrap();
        assert_eq!(quad(2, "x1*x2").restrict(&line).unwrap(), quad(1, "x1^2"));
    }
}
