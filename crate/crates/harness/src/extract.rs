//! Quadratics read off the cubic parts of first derivatives.
//!
//! For a quartic `g` on `V` (in `V`'s coordinates) and a direction `y`, the
//! cubic part `c_y` of `Δ_y g` is written as `sum_{i<=s} α_i P_i` with
//! linear `α_i` and quadratic `P_i`, for the least `s` that works. The
//! quadratics that can occur as some `P_i` for a fixed α-span `A` span
//! `Sp_{y,A}`. Only directions needing the most products are used; those
//! needing fewer are degenerate (a factor's pairing with `y` vanishes) and
//! see part of the structure. Each `Sp_{y,A}` is cut down to quadratics
//! whose pairing with `y` lies in `A`. Choosing one `A` per direction and
//! intersecting gives a branch; the pool is the sum of the branches that
//! stay nonzero through every direction.

use std::collections::BTreeMap;

use biasrank::linalg::solve_linear_system;
use biasrank::poly::Monomial;
use biasrank::{AffineSubspace, Budget, LinearForm, Polynomial, PrimeModulus, QuadraticPoly, Result, Scalar, Subspace};
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::generate::random_point;
use crate::oracle::homogeneous_monomials;

pub const DEFAULT_CAP: usize = 3;
/// Seeded directions per dimension of `V`, on top of its coordinate vectors.
pub const SAMPLES_PER_DIM: usize = 32;
/// Branches kept while reconciling directions; the widest survive.
pub const MAX_BRANCHES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    /// Homogeneous quadratics on the ambient space, a basis of the pool.
    pub pool: Vec<QuadraticPoly>,
    pub directions: usize,
    /// Least number of products per direction; `None` when `cap` was not enough.
    pub terms: Vec<Option<usize>>,
    /// Degree below 4 on `V`: nothing to extract.
    pub trivial: bool,
    /// No direction had a presentation within `cap`.
    pub no_presentation: bool,
}

/// Directions are the coordinate vectors of `V` followed by
/// `SAMPLES_PER_DIM * dim V` seeded samples.
pub fn derivative_extract(f: &Polynomial, v: &Subspace, cap: usize, seed: u64, budget: Budget) -> Result<Extraction> {
    let p = f.modulus();
    let k = v.dim();
    let g = f.restrict(&AffineSubspace::linear(v.clone()))?;
    let mut out = Extraction { pool: vec![], directions: 0, terms: vec![], trivial: false, no_presentation: false };
    if g.degree() < 4 {
        out.trivial = true;
        return Ok(out);
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let coord_space = Subspace::full(p, k);
    let basis = (0..k).map(|j| {
        let mut e = vec![0; k];
        e[j] = 1;
        e
    });
    let samples = (0..SAMPLES_PER_DIM * k).map(|_| random_point(&mut rng, &coord_space));
    let dirs = basis.chain(samples);

    let quad_monos = homogeneous_monomials(k, 2);
    let cubic_monos = homogeneous_monomials(k, 3);
    let q = quad_monos.len();
    // Every cubic is sum_{j<=k} x_j P_j, and with k >= 4 variables it has a
    // nontrivial zero, so k - 1 products always suffice: such presentations
    // say nothing and constrain nothing.
    let uninformative = if k >= 4 { k - 1 } else { k };
    let mut levels: BTreeMap<usize, Vec<Vec<Subspace>>> = BTreeMap::new();
    let mut examined = 0u128;
    for y in dirs {
        out.directions += 1;
        let c = g.discrete_derivative(&y)?.homogeneous_part(3);
        if c.is_zero() {
            out.terms.push(Some(0));
            continue;
        }
        let target: Vec<Scalar> = cubic_monos.iter().map(|m| c.coefficient(&Monomial::new(m.clone()))).collect();
        let mut found = None;
        for s in 1..=cap.min(uninformative - 1) {
            let mut spans: Vec<Subspace> = Vec::new();
            for a in Subspace::enumerate_all(p, k, s) {
                examined += 1;
                budget.check(examined)?;
                if let Some(vecs) = presentation_span(p, a.basis(), &quad_monos, &cubic_monos, &target)? {
                    let sp = Subspace::span(p, q, vecs)?.restrict_by_forms(&gram_conditions(
                        p,
                        a.basis(),
                        &y,
                        &quad_monos,
                    ))?;
                    if !spans.contains(&sp) {
                        spans.push(sp);
                    }
                }
            }
            if !spans.is_empty() {
                found = Some((s, spans));
                break;
            }
        }
        if found.is_none() && cap >= uninformative {
            found = Some((uninformative, vec![Subspace::full(p, q)]));
        }
        out.terms.push(found.as_ref().map(|(s, _)| *s));
        if let Some((s, spans)) = found {
            levels.entry(s).or_default().push(spans);
        }
    }
    // only the directions needing the most products
    let Some((_, mut choices)) = levels.pop_last() else {
        out.no_presentation = true;
        return Ok(out);
    };
    let pool = consistent_pool(p, q, &mut choices, budget)?;
    for b in pool.basis() {
        let local =
            Polynomial::from_terms(p, k, quad_monos.iter().zip(b).map(|(m, &c)| (c, widen(m))).collect::<Vec<_>>())?;
        out.pool.push(QuadraticPoly::from_polynomial(&local.lift_from_subspace(v)?)?);
    }
    Ok(out)
}

/// Linear conditions on a quadratic `q` saying that its pairing with `y`,
/// the form `x -> (y, x)_q`, lies in the span of `alphas`. The true
/// α-span at `y` is exactly the set of such pairings.
fn gram_conditions(p: PrimeModulus, alphas: &[Vec<Scalar>], y: &[Scalar], quad_monos: &[Vec<u8>]) -> Vec<Vec<Scalar>> {
    let k = y.len();
    let rows: Vec<Vec<Scalar>> = alphas.to_vec();
    biasrank::linalg::kernel(p, &rows, k)
        .into_iter()
        .map(|w| {
            quad_monos
                .iter()
                .map(|m| {
                    let vars: Vec<usize> = (0..k).flat_map(|i| std::iter::repeat_n(i, m[i] as usize)).collect();
                    let (i, j) = (vars[0], vars[1]);
                    if i == j {
                        p.mul(2, p.mul(w[i], y[i]))
                    } else {
                        p.add(p.mul(w[i], y[j]), p.mul(w[j], y[i]))
                    }
                })
                .collect()
        })
        .collect()
}

fn consistent_pool(p: PrimeModulus, q: usize, choices: &mut [Vec<Subspace>], budget: Budget) -> Result<Subspace> {
    // few alternatives first keeps the branch count down
    choices.sort_by_key(Vec::len);
    let mut branches = vec![Subspace::full(p, q)];
    for spans in choices.iter() {
        let mut next: Vec<Subspace> = Vec::new();
        for u in &branches {
            for sp in spans {
                let w = u.intersect(sp)?;
                if w.dim() > 0 && !next.contains(&w) {
                    next.push(w);
                }
            }
        }
        budget.check(next.len() as u128)?;
        if next.len() > MAX_BRANCHES {
            next.sort_by_key(|w| std::cmp::Reverse(w.dim()));
            next.truncate(MAX_BRANCHES);
        }
        if next.is_empty() {
            return Ok(Subspace::zero(p, q));
        }
        branches = next;
    }
    let mut pool = Subspace::zero(p, q);
    for b in &branches {
        pool = pool.sum(b)?;
    }
    Ok(pool)
}

fn widen(m: &[u8]) -> Vec<u32> {
    m.iter().map(|&e| e as u32).collect()
}

/// Coefficient vectors of every `P_i` occurring in some solution of
/// `sum α_i P_i = target`, or `None` when there is no solution.
fn presentation_span(
    p: PrimeModulus,
    alphas: &[Vec<Scalar>],
    quad_monos: &[Vec<u8>],
    cubic_monos: &[Vec<u8>],
    target: &[Scalar],
) -> Result<Option<Vec<Vec<Scalar>>>> {
    let q = quad_monos.len();
    let width = alphas.len() * q;
    let mut rows = vec![vec![0; width]; cubic_monos.len()];
    for (i, alpha) in alphas.iter().enumerate() {
        for (j, qm) in quad_monos.iter().enumerate() {
            for (var, &a) in alpha.iter().enumerate().filter(|(_, &a)| a != 0) {
                let mut prod = qm.clone();
                prod[var] += 1;
                let r = cubic_monos.iter().position(|m| *m == prod).expect("cubic monomial");
                rows[r][i * q + j] = p.add(rows[r][i * q + j], a);
            }
        }
    }
    let forms: Vec<LinearForm> = rows.into_iter().map(LinearForm::homogeneous).collect();
    let Some((particular, kern)) = solve_linear_system(p, width, &forms, target)? else {
        return Ok(None);
    };
    let mut out = Vec::new();
    for i in 0..alphas.len() {
        out.push(particular[i * q..(i + 1) * q].to_vec());
        for b in kern.basis() {
            out.push(b[i * q..(i + 1) * q].to_vec());
        }
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> PrimeModulus {
        PrimeModulus::new(5).unwrap()
    }

    fn span_of(qs: &[QuadraticPoly], n: usize) -> Subspace {
        let monos = homogeneous_monomials(n, 2);
        let vecs = qs
            .iter()
            .map(|q| {
                let f = q.to_polynomial();
                monos.iter().map(|m| f.coefficient(&Monomial::new(m.clone()))).collect()
            })
            .collect();
        Subspace::span(f5(), monos.len(), vecs).unwrap()
    }

    #[test]
    fn single_variable_quartic_gives_the_square() {
        let f = Polynomial::parse(f5(), 2, "x1^4").unwrap();
        let out = derivative_extract(&f, &Subspace::full(f5(), 2), DEFAULT_CAP, 1, Budget::DEFAULT).unwrap();
        assert!(!out.no_presentation);
        assert_eq!(out.pool.len(), 1);
        assert_eq!(out.pool[0].to_polynomial(), Polynomial::parse(f5(), 2, "x1^2").unwrap());
    }

    #[test]
    fn low_degree_is_trivial() {
        let f = Polynomial::parse(f5(), 3, "x1^3 + x2*x3").unwrap();
        let out = derivative_extract(&f, &Subspace::full(f5(), 3), DEFAULT_CAP, 1, Budget::DEFAULT).unwrap();
        assert!(out.trivial && out.pool.is_empty());
    }

    #[test]
    fn product_of_two_quadratics_recovers_their_span() {
        let q1 = Polynomial::parse(f5(), 4, "x1*x2 + x3^2").unwrap();
        let q2 = Polynomial::parse(f5(), 4, "x2*x4 + 2*x1^2 + x3*x4").unwrap();
        let f = q1.multiply(&q2).unwrap();
        let out = derivative_extract(&f, &Subspace::full(f5(), 4), DEFAULT_CAP, 9, Budget::DEFAULT).unwrap();
        let truth =
            span_of(&[QuadraticPoly::from_polynomial(&q1).unwrap(), QuadraticPoly::from_polynomial(&q2).unwrap()], 4);
        assert!(span_of(&out.pool, 4).contains_subspace(&truth));
    }
}
