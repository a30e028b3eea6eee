//! From a quartic to a regular quadratic family whose zero set kills the
//! fourth derivative `Δ_x^4 f`, checked point by point.

use biasrank::family::projective_vectors;
use biasrank::{Budget, Error, Polynomial, QuadFamily, QuadraticPoly, Result, Scalar, Subspace};
use serde::{Deserialize, Serialize};

use crate::extract::{derivative_extract, Extraction};
use crate::oracle::Combinations;

/// Result of testing `Q_i(x) = 0 for all i  =>  24 f_4(x) = 0` on the
/// family's ambient subspace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Implication {
    pub checked: u64,
    pub zeros: u64,
    /// First zero of the family where `24 f_4` does not vanish.
    pub witness: Option<Vec<Scalar>>,
}

impl Implication {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

/// `24 f_4(x)`, the constant value of `Δ_x^4 f`.
fn taylor_value(f4: &Polynomial, x: &[Scalar]) -> Scalar {
    let p = f4.modulus();
    p.mul(24 % p.get(), f4.eval_unchecked(x))
}

pub fn implication_check(f: &Polynomial, family: &QuadFamily, budget: Budget) -> Result<Implication> {
    if f.degree() > 4 {
        return Err(Error::Usage(format!("implication needs degree at most 4, found {}", f.degree())));
    }
    if f.num_vars() != family.ambient().ambient() {
        return Err(Error::DimensionMismatch { expected: family.ambient().ambient(), found: f.num_vars() });
    }
    let f4 = f.homogeneous_part(4);
    let mut out = Implication { checked: 0, zeros: 0, witness: None };
    for x in family.ambient().points(budget)? {
        out.checked += 1;
        if family.quads().iter().all(|q| q.eval(&x) == 0) {
            out.zeros += 1;
            if out.witness.is_none() && taylor_value(&f4, &x) != 0 {
                out.witness = Some(x);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineStatus {
    Pass,
    /// No family from the pool passed; the extraction is best-effort.
    NotFound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutcome {
    pub status: PipelineStatus,
    pub family: QuadFamily,
    pub family_size: usize,
    pub codim: usize,
    pub zero_set_size: u64,
    pub pool_size: usize,
    pub regularity: usize,
    pub extraction: Option<Extraction>,
    pub implication: Implication,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub r: usize,
    pub cap: usize,
    pub seed: u64,
    /// Limit on subsets tried when shrinking the family.
    pub subset_budget: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self { r: 1, cap: crate::extract::DEFAULT_CAP, seed: 0, subset_budget: 2_000_000 }
    }
}

/// Span elements beyond which shrinking only tries the pool's basis.
pub const SPAN_CANDIDATE_LIMIT: u64 = 20_000;

/// Extract a pool from derivatives, shrink it to the fewest elements of its
/// span that still force the implication, regularize those to rank `r`
/// (shrinking again if regularization changed them), then re-run the
/// implication check on the result.
pub fn pipeline(f: &Polynomial, v: &Subspace, cfg: PipelineConfig, budget: Budget) -> Result<PipelineOutcome> {
    if f.degree() > 4 {
        return Err(Error::Usage(format!("pipeline needs degree at most 4, found {}", f.degree())));
    }
    let f4 = f.homogeneous_part(4);
    let points: Vec<Vec<Scalar>> = v.points(budget)?.collect();
    let bad: Vec<bool> = points.iter().map(|x| taylor_value(&f4, x) != 0).collect();
    if !bad.contains(&true) {
        let family = QuadFamily::new(vec![], v.clone())?;
        let implication = implication_check(f, &family, budget)?;
        return Ok(PipelineOutcome {
            status: if implication.holds() { PipelineStatus::Pass } else { PipelineStatus::NotFound },
            regularity: family.empty_sentinel(),
            family,
            family_size: 0,
            codim: v.codim(),
            zero_set_size: points.len() as u64,
            pool_size: 0,
            extraction: None,
            implication,
        });
    }
    let extraction = derivative_extract(f, v, cfg.cap, cfg.seed, budget)?;
    let pool_size = extraction.pool.len();
    let pool = QuadFamily::new(extraction.pool.clone(), v.clone())?;
    let small = shrink(&pool, &f4, cfg.subset_budget, budget)?.unwrap_or(pool);
    let regularized = small.regularize(cfg.r, budget)?;
    let family = if regularized.steps.is_empty() {
        regularized.family
    } else {
        let base = regularized.family;
        shrink(&base, &f4, cfg.subset_budget, budget)?.unwrap_or(base)
    };
    let implication = implication_check(f, &family, budget)?;
    let regularity = family.regularity(budget)?.rank;
    Ok(PipelineOutcome {
        status: if implication.holds() && regularity >= cfg.r {
            PipelineStatus::Pass
        } else {
            PipelineStatus::NotFound
        },
        family_size: family.len(),
        codim: family.ambient().codim(),
        zero_set_size: implication.zeros,
        pool_size,
        regularity,
        extraction: Some(extraction),
        implication,
        family,
    })
}

/// Fewest elements of the span of `base` whose common zeros on `base`'s
/// ambient subspace avoid every point with `f_4 != 0`; ties go to the
/// largest zero set. A minimal set is linearly independent, since a
/// dependent member never removes a zero. Spans with more than
/// `SPAN_CANDIDATE_LIMIT` projective elements only offer their basis.
fn shrink(base: &QuadFamily, f4: &Polynomial, subset_budget: u64, budget: Budget) -> Result<Option<QuadFamily>> {
    let p = base.modulus();
    let v = base.ambient();
    let n = v.ambient();
    let points: Vec<Vec<Scalar>> = v.points(budget)?.collect();
    let words = points.len().div_ceil(64);
    let mask_of = |nonzero: &dyn Fn(&[Scalar]) -> bool| {
        let mut mask = vec![0u64; words];
        for (i, x) in points.iter().enumerate() {
            if nonzero(x) {
                mask[i / 64] |= 1 << (i % 64);
            }
        }
        mask
    };
    let bad = mask_of(&|x| taylor_value(f4, x) != 0);
    let span_count = (p.power_count(base.len()) - 1) / (p.get() as u128 - 1);
    let elements: Vec<QuadraticPoly> = if span_count <= SPAN_CANDIDATE_LIMIT as u128 {
        projective_vectors(p, base.len())
            .map(|a| QuadraticPoly::linear_combination(p, n, &a, base.quads()))
            .collect::<Result<_>>()?
    } else {
        base.quads().to_vec()
    };
    let mut candidates: Vec<(QuadraticPoly, Vec<u64>)> = Vec::new();
    for q in elements {
        let mask = mask_of(&|x| q.eval(x) != 0);
        if !candidates.iter().any(|(_, m)| *m == mask) {
            candidates.push((q, mask));
        }
    }
    let mut spent = 0u64;
    for size in 0..=base.len() {
        let mut best: Option<(u32, Vec<usize>)> = None;
        for combo in Combinations::new(candidates.len(), size) {
            spent += 1;
            if spent > subset_budget {
                return Ok(None);
            }
            let mut cover = vec![0u64; words];
            for &i in &combo {
                for (c, m) in cover.iter_mut().zip(&candidates[i].1) {
                    *c |= m;
                }
            }
            if bad.iter().zip(&cover).all(|(b, c)| b & !c == 0) {
                let zeros = points.len() as u32 - cover.iter().map(|c| c.count_ones()).sum::<u32>();
                if best.as_ref().is_none_or(|(z, _)| zeros > *z) {
                    best = Some((zeros, combo));
                }
            }
        }
        if let Some((_, combo)) = best {
            let quads = combo.iter().map(|&i| candidates[i].0.clone()).collect();
            return Ok(Some(QuadFamily::new(quads, v.clone())?));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use biasrank::PrimeModulus;

    fn f5() -> PrimeModulus {
        PrimeModulus::new(5).unwrap()
    }

    fn quad(n: usize, s: &str) -> QuadraticPoly {
        QuadraticPoly::from_polynomial(&Polynomial::parse(f5(), n, s).unwrap()).unwrap()
    }

    #[test]
    fn vanishing_factor_passes_and_empty_family_fails_at_all_ones() {
        let f = Polynomial::parse(f5(), 4, "x1*x2*x3*x4").unwrap();
        let fam = QuadFamily::on_full_space(f5(), 4, vec![quad(4, "x1*x2")]).unwrap();
        assert!(implication_check(&f, &fam, Budget::DEFAULT).unwrap().holds());
        let empty = QuadFamily::on_full_space(f5(), 4, vec![]).unwrap();
        let out = implication_check(&f, &empty, Budget::DEFAULT).unwrap();
        assert_eq!(out.witness, Some(vec![1, 1, 1, 1]));
    }

    #[test]
    fn cubic_passes_with_any_family() {
        let f = Polynomial::parse(f5(), 3, "x1^3 + x2*x3^2").unwrap();
        let empty = QuadFamily::on_full_space(f5(), 3, vec![]).unwrap();
        assert!(implication_check(&f, &empty, Budget::DEFAULT).unwrap().holds());
    }

    #[test]
    fn vanishing_quartic_part_needs_no_family() {
        let f = Polynomial::parse(f5(), 3, "x1^3 + x2").unwrap();
        let out = pipeline(&f, &Subspace::full(f5(), 3), PipelineConfig::default(), Budget::DEFAULT).unwrap();
        assert_eq!(out.status, PipelineStatus::Pass);
        assert_eq!((out.family_size, out.codim), (0, 0));
    }

    #[test]
    fn fourth_power_uses_its_square() {
        let f = Polynomial::parse(f5(), 2, "x1^4").unwrap();
        let out = pipeline(&f, &Subspace::full(f5(), 2), PipelineConfig::default(), Budget::DEFAULT).unwrap();
        assert_eq!(out.status, PipelineStatus::Pass);
        assert_eq!(out.family.quads(), &[quad(2, "x1^2")]);
        assert_eq!(out.zero_set_size, 5);
    }

    #[test]
    fn product_of_quadratics() {
        let a = Polynomial::parse(f5(), 4, "x1*x2 + x3^2").unwrap();
        let f = a.multiply(&Polynomial::parse(f5(), 4, "x2*x4 + 2*x1^2").unwrap()).unwrap();
        let out = pipeline(&f, &Subspace::full(f5(), 4), PipelineConfig::default(), Budget::DEFAULT).unwrap();
        assert_eq!(out.status, PipelineStatus::Pass);
        assert!(out.family_size <= 2);
        assert_eq!(out.codim, 0);
        assert!(out.zero_set_size > 1);
    }
}
