//! Exhaustive Schmidt-rank search at desk scale.
//!
//! The search works on the degree-`d` part `f_d` and looks for
//! `f_d = sum_{i<=r} g_i h_i` with `g_i` homogeneous of degree `a_i` in
//! `1..=d/2`, leading coefficient 1, and `h_i` homogeneous of degree
//! `d - a_i`. For a fixed choice of the `g_i` the `h_i` are found by
//! linear algebra, so only the `g_i` are enumerated.

use std::collections::HashMap;

use biasrank::family::projective_vectors;
use biasrank::linalg::solve_linear_system;
use biasrank::poly::Monomial;
use biasrank::{Budget, Error, LinearForm, Polynomial, PrimeModulus, Result, Scalar};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankResult {
    Exact(usize),
    GreaterThanCap,
    /// The search needed more candidates than the budget allows.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankProbe {
    pub target: Polynomial,
    pub degree: u32,
    pub cap: usize,
    pub result: RankResult,
    /// `(g_i, h_i)` with `sum g_i h_i` equal to the degree-`d` part.
    pub decomposition: Vec<(Polynomial, Polynomial)>,
    /// Factor choices examined.
    pub searched: u64,
}

impl RankProbe {
    pub fn exact(&self) -> Option<usize> {
        match self.result {
            RankResult::Exact(r) => Some(r),
            _ => None,
        }
    }

    /// `f - sum g_i h_i` has degree below `d`, or is affine when `d <= 1`.
    pub fn verify(&self) -> bool {
        let mut acc = self.target.clone();
        for (g, h) in &self.decomposition {
            match g.multiply(h).and_then(|gh| acc.sub(&gh)) {
                Ok(next) => acc = next,
                Err(_) => return false,
            }
        }
        acc.degree() < self.degree.max(2) as i32
    }
}

/// Rank of `f` at its own degree.
pub fn bounded_schmidt_rank(f: &Polynomial, cap: usize, budget: Budget) -> Result<RankProbe> {
    rank_at(f, f.degree().max(0) as u32, cap, budget)
}

/// Rank of the degree-`d` part of `f`, searched up to `cap` products.
pub fn rank_at(f: &Polynomial, d: u32, cap: usize, budget: Budget) -> Result<RankProbe> {
    let p = f.modulus();
    let n = f.num_vars();
    if d as usize >= p.size() {
        return Err(Error::Usage(format!("rank search at degree {d} needs p > {d}")));
    }
    let top = f.homogeneous_part(d);
    let mut probe = RankProbe {
        target: f.clone(),
        degree: d,
        cap,
        result: RankResult::GreaterThanCap,
        decomposition: vec![],
        searched: 0,
    };
    if d <= 1 || top.is_zero() {
        probe.result = RankResult::Exact(0);
        return Ok(probe);
    }
    let mut candidates: Vec<(u32, Polynomial)> = Vec::new();
    for a in 1..=d / 2 {
        let monos = homogeneous_monomials(n, a);
        for coeffs in projective_vectors(p, monos.len()) {
            let terms = monos.iter().zip(&coeffs).map(|(m, &c)| (c, m.iter().map(|&e| e as u32).collect()));
            candidates.push((a, Polynomial::from_terms(p, n, terms.collect::<Vec<_>>())?));
        }
    }
    let target_monos = homogeneous_monomials(n, d);
    let target_index: HashMap<&[u8], usize> = target_monos.iter().enumerate().map(|(i, m)| (m.as_slice(), i)).collect();
    let targets: Vec<Scalar> = target_monos.iter().map(|m| top.coefficient(&Monomial::new(m.clone()))).collect();
    let cofactor_monos: HashMap<u32, Vec<Vec<u8>>> = (1..d).map(|b| (b, homogeneous_monomials(n, b))).collect();
    let mut remaining = budget.0;
    for r in 1..=cap {
        let count = binomial(candidates.len() as u128, r as u128);
        if count > remaining as u128 {
            probe.result = RankResult::Unknown;
            return Ok(probe);
        }
        remaining -= count as u64;
        for combo in Combinations::new(candidates.len(), r) {
            probe.searched += 1;
            let gs: Vec<&(u32, Polynomial)> = combo.iter().map(|&i| &candidates[i]).collect();
            if let Some(hs) = solve_cofactors(p, n, d, &gs, &target_index, &targets, &cofactor_monos)? {
                probe.decomposition = gs.iter().map(|(_, g)| g.clone()).zip(hs).collect();
                probe.result = RankResult::Exact(r);
                debug_assert!(probe.verify());
                return Ok(probe);
            }
        }
    }
    Ok(probe)
}

fn solve_cofactors(
    p: PrimeModulus,
    n: usize,
    d: u32,
    gs: &[&(u32, Polynomial)],
    target_index: &HashMap<&[u8], usize>,
    targets: &[Scalar],
    cofactor_monos: &HashMap<u32, Vec<Vec<u8>>>,
) -> Result<Option<Vec<Polynomial>>> {
    let blocks: Vec<&Vec<Vec<u8>>> = gs.iter().map(|(a, _)| &cofactor_monos[&(d - a)]).collect();
    let width: usize = blocks.iter().map(|b| b.len()).sum();
    let mut rows = vec![vec![0; width]; targets.len()];
    let mut offset = 0;
    for ((_, g), block) in gs.iter().zip(&blocks) {
        for (j, hm) in block.iter().enumerate() {
            for (gm, c) in g.terms() {
                let prod: Vec<u8> = gm.exps().iter().zip(hm).map(|(a, b)| a + b).collect();
                let row = target_index[prod.as_slice()];
                rows[row][offset + j] = p.add(rows[row][offset + j], c);
            }
        }
        offset += block.len();
    }
    let forms: Vec<LinearForm> = rows.into_iter().map(LinearForm::homogeneous).collect();
    let Some((x, _)) = solve_linear_system(p, width, &forms, targets)? else {
        return Ok(None);
    };
    let mut offset = 0;
    let mut hs = Vec::with_capacity(gs.len());
    for block in blocks {
        let terms = block.iter().zip(&x[offset..]).map(|(m, &c)| (c, m.iter().map(|&e| e as u32).collect()));
        hs.push(Polynomial::from_terms(p, n, terms.collect::<Vec<_>>())?);
        offset += block.len();
    }
    Ok(Some(hs))
}

/// Exponent vectors of total degree exactly `d`, lexicographic.
pub fn homogeneous_monomials(n: usize, d: u32) -> Vec<Vec<u8>> {
    fn rec(n: usize, left: u32, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if prefix.len() + 1 == n {
            prefix.push(left as u8);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e as u8);
            rec(n, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(vec![]);
        }
        return out;
    }
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// `k`-subsets of `0..n` as increasing index vectors.
pub struct Combinations {
    n: usize,
    next: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Self { n, next: (k <= n).then(|| (0..k).collect()) }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.next.take()?;
        let k = out.len();
        let mut c = out.clone();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if c[i] < self.n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                self.next = Some(c);
                break;
            }
        }
        Some(out)
    }
}
