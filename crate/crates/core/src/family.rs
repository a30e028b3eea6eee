//! Families of quadratics on a subspace: regularity, regularization, common
//! zero sets, admissible tuples and the two counting statements about them.

use std::collections::HashMap;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Budget, Error, Result};
use crate::field::{PrimeModulus, Scalar};
use crate::linalg::{kernel, AffineSubspace, Subspace, SubspaceJson};
use crate::poly::{MultilinearForm, Polynomial};
use crate::quadform::{QuadraticPoly, RankCertificate};
use crate::sumset::GroupSubset;

/// Longest tuple accepted by [`QuadFamily::admissible`].
pub const MAX_TUPLE_LEN: usize = 4;
/// Attempts drawn by the sampling fallback of [`QuadFamily::cubicity_defect`].
pub const DEFECT_SAMPLES: u64 = 200_000;

/// Quadratics `Q_1..Q_N` on F_p^n, considered on the subspace `ambient`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadFamily {
    quads: Vec<QuadraticPoly>,
    ambient: Subspace,
}

/// Minimum Schmidt rank over nonzero combinations, with the minimizer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Regularity {
    /// For an empty family this is the sentinel `p^n + 1`.
    pub rank: usize,
    pub witness: Option<Vec<Scalar>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<RankCertificate>,
}

/// One removal performed by [`QuadFamily::regularize`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EliminationStep {
    /// Position of the removed quadratic in the input family.
    pub removed: usize,
    pub witness: Vec<Scalar>,
    pub rank: usize,
    /// Ambient coefficient vectors of the forms cut out of the subspace.
    pub forms: Vec<Vec<Scalar>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Regularization {
    pub family: QuadFamily,
    pub steps: Vec<EliminationStep>,
    /// Input positions of the surviving quadratics, in order.
    pub kept: Vec<usize>,
    pub regularity: Regularity,
}

/// `{x in base : Q_i(x + s) = 0 for all i and every shift s}`, with
/// the zero shift always present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroSet {
    base: Subspace,
    quads: Vec<QuadraticPoly>,
    shifts: Vec<Vec<Scalar>>,
    points: Vec<Vec<Scalar>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleDensity {
    /// Admissible `(t, h) in Fset x W^3`.
    pub count: u128,
    /// `|V_1|^4`.
    pub total: u128,
    pub density: Ratio<i128>,
    /// `p^{-6N-3r} mu` with `r = codim(W)`.
    pub bound: Ratio<i128>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineCount {
    pub domain: u64,
    pub in_a: u64,
    pub in_a_and_x: u64,
    /// `|P(x in A and X) - p^{-N} P(x in A)|`.
    pub deviation: Ratio<i128>,
    /// Square of the allowed deviation, `p^{-R}` (1 for an empty family).
    pub bound_squared: Ratio<i128>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicityDefect {
    pub admissible: u128,
    pub violations: u128,
    pub defect: Ratio<i128>,
    pub exhaustive: bool,
    /// No admissible tuple was found; `defect` is then 0.
    pub no_admissible: bool,
}

impl QuadFamily {
    pub fn new(quads: Vec<QuadraticPoly>, ambient: Subspace) -> Result<Self> {
        for q in &quads {
            check_dim(ambient.ambient(), q.dim())?;
            if q.modulus() != ambient.modulus() {
                return Err(Error::ModulusMismatch(q.modulus().get(), ambient.modulus().get()));
            }
        }
        Ok(Self { quads, ambient })
    }

    pub fn on_full_space(p: PrimeModulus, n: usize, quads: Vec<QuadraticPoly>) -> Result<Self> {
        Self::new(quads, Subspace::full(p, n))
    }

    pub fn quads(&self) -> &[QuadraticPoly] {
        &self.quads
    }

    pub fn ambient(&self) -> &Subspace {
        &self.ambient
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.ambient.modulus()
    }

    pub fn len(&self) -> usize {
        self.quads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quads.is_empty()
    }

    /// The same quadratics considered on another subspace.
    pub fn with_ambient(&self, ambient: Subspace) -> Result<Self> {
        Self::new(self.quads.clone(), ambient)
    }

    /// Regularity reported for an empty family.
    pub fn empty_sentinel(&self) -> usize {
        usize::try_from(self.modulus().power_count(self.ambient.ambient()) + 1).unwrap_or(usize::MAX)
    }

    /// The minimum Schmidt rank of `sum a_i Q_i` restricted to the ambient
    /// subspace, over nonzero `a` with first nonzero entry 1.
    pub fn regularity(&self, budget: Budget) -> Result<Regularity> {
        if self.quads.is_empty() {
            return Ok(Regularity { rank: self.empty_sentinel(), witness: None, certificate: None });
        }
        let p = self.modulus();
        budget.check(p.power_count(self.quads.len()) - 1)?;
        let restricted = self.quads.iter().map(|q| q.restrict(&self.ambient)).collect::<Result<Vec<_>>>()?;
        let mut best: Option<(Vec<Scalar>, RankCertificate)> = None;
        for a in projective_vectors(p, self.quads.len()) {
            let combo = QuadraticPoly::linear_combination(p, self.ambient.dim(), &a, &restricted)?;
            let cert = combo.schmidt_rank();
            if best.as_ref().is_none_or(|(_, b)| cert.schmidt_rank < b.schmidt_rank) {
                let done = cert.schmidt_rank == 0;
                best = Some((a, cert));
                if done {
                    break;
                }
            }
        }
        let (witness, cert) = best.expect("a nonempty family has a combination");
        Ok(Regularity { rank: cert.schmidt_rank, witness: Some(witness), certificate: Some(cert) })
    }

    /// Remove quadratics until the family is `r`-regular on a subspace of
    /// the ambient one. Each step takes the minimal-rank combination, drops
    /// its highest-index participant and restricts to the zero set of one
    /// factor of every product in the combination's decomposition.
    pub fn regularize(&self, r: usize, budget: Budget) -> Result<Regularization> {
        if r == 0 {
            return Err(Error::Usage("regularity target must be at least 1".into()));
        }
        let p = self.modulus();
        let mut family = self.clone();
        let mut kept: Vec<usize> = (0..self.len()).collect();
        let mut steps = Vec::new();
        loop {
            let reg = family.regularity(budget)?;
            let (Some(witness), Some(cert)) = (reg.witness.clone(), reg.certificate.clone()) else {
                return Ok(Regularization { family, steps, kept, regularity: reg });
            };
            if reg.rank >= r {
                return Ok(Regularization { family, steps, kept, regularity: reg });
            }
            let k = witness.iter().rposition(|&a| a != 0).expect("witness is nonzero");
            let v = family.ambient.clone();
            // factor forms live on V's coordinates c_j = x_{pivot_j}
            let forms: Vec<Vec<Scalar>> = cert
                .factors
                .iter()
                .map(|(alpha, _)| {
                    let mut lifted = vec![0; v.ambient()];
                    for (&pc, &c) in v.pivots().iter().zip(&alpha.coeffs) {
                        lifted[pc] = c;
                    }
                    lifted
                })
                .collect();
            let coord_rows: Vec<Vec<Scalar>> = cert.factors.iter().map(|(alpha, _)| alpha.coeffs.clone()).collect();
            let next = v.image(&kernel(p, &coord_rows, v.dim()));
            steps.push(EliminationStep { removed: kept[k], witness, rank: reg.rank, forms });
            kept.remove(k);
            let mut quads = family.quads;
            quads.remove(k);
            family = QuadFamily::new(quads, next)?;
        }
    }

    /// Common zeros in the ambient subspace.
    pub fn zero_set(&self, budget: Budget) -> Result<ZeroSet> {
        let p = self.modulus();
        let mut points: Vec<Vec<Scalar>> =
            self.ambient.points(budget)?.filter(|x| self.quads.iter().all(|q| q.eval(x) == 0)).collect();
        points.sort_by_key(|x| p.point_index(x));
        Ok(ZeroSet {
            base: self.ambient.clone(),
            quads: self.quads.clone(),
            shifts: vec![vec![0; self.ambient.ambient()]],
            points,
        })
    }

    /// Whether `(h_i, h_j)_Q = 0` for every member `Q` and all `i != j`.
    pub fn admissible(&self, h: &[Vec<Scalar>]) -> Result<bool> {
        if h.len() > MAX_TUPLE_LEN {
            return Err(Error::Usage(format!("tuples have at most {MAX_TUPLE_LEN} entries")));
        }
        for v in h {
            check_dim(self.ambient.ambient(), v.len())?;
        }
        let grams: Vec<_> = self.quads.iter().map(QuadraticPoly::gram).collect();
        Ok((0..h.len())
            .flat_map(|i| (i + 1..h.len()).map(move |j| (i, j)))
            .all(|(i, j)| grams.iter().all(|g| g.pair(&h[i], &h[j]) == 0)))
    }

    /// `{x in u : (v, x)_Q = 0 for every member}`.
    fn orthogonal_in(&self, u: &Subspace, v: &[Scalar]) -> Subspace {
        let forms: Vec<Vec<Scalar>> =
            self.quads.iter().map(|q| q.gram().apply(v)).filter(|f| f.iter().any(|&c| c != 0)).collect();
        if forms.is_empty() {
            return u.clone();
        }
        u.restrict_by_forms(&forms).expect("forms have ambient length")
    }

    fn check_inside(&self, fset: &GroupSubset, w: &Subspace) -> Result<()> {
        check_dim(self.ambient.ambient(), fset.ambient())?;
        check_dim(self.ambient.ambient(), w.ambient())?;
        if !self.ambient.contains_subspace(w) {
            return Err(Error::Usage("W must lie in the ambient subspace".into()));
        }
        if let Some(x) = fset.points().find(|x| !self.ambient.contains(x)) {
            return Err(Error::Usage(format!("point {x:?} of the set lies outside the ambient subspace")));
        }
        Ok(())
    }

    /// Exact probability, over `t in V_1` and `h in V_1^3`, that
    /// `(t, h) in Fset x W^3` is admissible, against `p^{-6N-3r} mu`.
    pub fn admissible_density(&self, fset: &GroupSubset, w: &Subspace, budget: Budget) -> Result<AdmissibleDensity> {
        self.check_inside(fset, w)?;
        budget.check(fset.size() as u128 * w.size())?;
        budget.check(w.size() * w.size())?;
        let p = self.modulus();
        let mut pairs: HashMap<Subspace, u128> = HashMap::new();
        let mut triples: HashMap<Subspace, u128> = HashMap::new();
        let mut count = 0u128;
        for t in fset.points() {
            let u = self.orthogonal_in(w, &t);
            count += self.count_triples(&u, &mut pairs, &mut triples);
        }
        let v1 = self.ambient.size();
        let total = v1.pow(4);
        let to_i = |v: u128| i128::try_from(v).map_err(|_| Error::Usage("count exceeds exact range".into()));
        let density = Ratio::new(to_i(count)?, to_i(total)?);
        let r = (self.ambient.dim() - w.dim()) as u32;
        let exponent = 6 * self.len() as u32 + 3 * r;
        let scale = (p.get() as i128)
            .checked_pow(exponent)
            .and_then(|s| s.checked_mul(to_i(v1).ok()?))
            .ok_or_else(|| Error::Usage(format!("bound exponent {exponent} exceeds exact range")))?;
        let bound = Ratio::new(fset.size() as i128, scale);
        Ok(AdmissibleDensity { count, total, density, bound, holds: density >= bound })
    }

    fn count_triples(
        &self,
        u: &Subspace,
        pairs: &mut HashMap<Subspace, u128>,
        triples: &mut HashMap<Subspace, u128>,
    ) -> u128 {
        if let Some(&c) = triples.get(u) {
            return c;
        }
        let mut total = 0;
        for h in u.points(Budget(u64::MAX)).expect("unbounded budget") {
            let u2 = self.orthogonal_in(u, &h);
            total += self.count_pairs(&u2, pairs);
        }
        triples.insert(u.clone(), total);
        total
    }

    fn count_pairs(&self, u: &Subspace, pairs: &mut HashMap<Subspace, u128>) -> u128 {
        if let Some(&c) = pairs.get(u) {
            return c;
        }
        let total =
            u.points(Budget(u64::MAX)).expect("unbounded budget").map(|h| self.orthogonal_in(u, &h).size()).sum();
        pairs.insert(u.clone(), total);
        total
    }

    /// Precompute the zero set and regularity for repeated affine checks.
    pub fn affine_counter(&self, budget: Budget) -> Result<AffineCounter> {
        let zeros = self.zero_set(budget)?;
        let domain: Vec<(Vec<Scalar>, bool)> = self
            .ambient
            .points(budget)?
            .map(|x| {
                let z = zeros.contains(&x);
                (x, z)
            })
            .collect();
        let regularity = if self.is_empty() { 0 } else { self.regularity(budget)?.rank };
        Ok(AffineCounter { p: self.modulus(), family_len: self.len(), regularity, domain })
    }

    /// `|P(x in A and X) - p^{-N} P(x in A)| <= p^{-R/2}` for `x` uniform on
    /// the ambient subspace, decided exactly.
    pub fn affine_counting_check(&self, a: &AffineSubspace, budget: Budget) -> Result<AffineCount> {
        self.affine_counter(budget)?.check(a)
    }

    /// Fraction of admissible `(t, h) in Fset x W^3` with
    /// `Δ_{h1} Δ_{h2} Δ_{h3} Δ_t f != 0`. Exhaustive when `|Fset| |W|^3` fits
    /// the budget, otherwise estimated from seeded samples.
    pub fn cubicity_defect(
        &self,
        f: &Polynomial,
        fset: &GroupSubset,
        w: &Subspace,
        budget: Budget,
        seed: u64,
    ) -> Result<CubicityDefect> {
        self.check_inside(fset, w)?;
        check_dim(self.ambient.ambient(), f.num_vars())?;
        let probe = FourthDerivative::new(f);
        let work = fset.size() as u128 * w.size().saturating_pow(3);
        let (admissible, violations, exhaustive) = if budget.check(work).is_ok() {
            let (a, v) = self.defect_exhaustive(&probe, fset, w);
            (a, v, true)
        } else {
            let (a, v) = self.defect_sampled(&probe, fset, w, seed)?;
            (a, v, false)
        };
        let defect =
            if admissible == 0 { Ratio::from_integer(0) } else { Ratio::new(violations as i128, admissible as i128) };
        Ok(CubicityDefect { admissible, violations, defect, exhaustive, no_admissible: admissible == 0 })
    }

    fn defect_exhaustive(&self, probe: &FourthDerivative, fset: &GroupSubset, w: &Subspace) -> (u128, u128) {
        let unbounded = Budget(u64::MAX);
        let (mut admissible, mut violations) = (0u128, 0u128);
        for t in fset.points() {
            let u1 = self.orthogonal_in(w, &t);
            for h1 in u1.points(unbounded).expect("unbounded budget") {
                let u2 = self.orthogonal_in(&u1, &h1);
                for h2 in u2.points(unbounded).expect("unbounded budget") {
                    let u3 = self.orthogonal_in(&u2, &h2);
                    let partial = probe.partial(&t, &h1, &h2);
                    for h3 in u3.points(unbounded).expect("unbounded budget") {
                        admissible += 1;
                        if !partial.vanishes(&h3) {
                            violations += 1;
                        }
                    }
                }
            }
        }
        (admissible, violations)
    }

    fn defect_sampled(
        &self,
        probe: &FourthDerivative,
        fset: &GroupSubset,
        w: &Subspace,
        seed: u64,
    ) -> Result<(u128, u128)> {
        let members: Vec<Vec<Scalar>> = fset.points().collect();
        if members.is_empty() {
            return Ok((0, 0));
        }
        let p = self.modulus();
        let mut rng = SplitMix64::seed_from_u64(seed);
        let draw_w = |rng: &mut SplitMix64| {
            let coords: Vec<Scalar> = (0..w.dim()).map(|_| rng.random_range(0..p.get())).collect();
            w.point(&coords)
        };
        let (mut admissible, mut violations) = (0u128, 0u128);
        for _ in 0..DEFECT_SAMPLES {
            let t = members[rng.random_range(0..members.len())].clone();
            let h = [draw_w(&mut rng), draw_w(&mut rng), draw_w(&mut rng)];
            if !self.admissible(&[t.clone(), h[0].clone(), h[1].clone(), h[2].clone()])? {
                continue;
            }
            admissible += 1;
            if !probe.partial(&t, &h[0], &h[1]).vanishes(&h[2]) {
                violations += 1;
            }
        }
        Ok((admissible, violations))
    }
}

/// `Δ_{h1} Δ_{h2} Δ_{h3} Δ_t f`, through the degree-4 polarization when
/// `deg f <= 4` and by direct differencing otherwise.
enum FourthDerivative {
    Zero,
    Multilinear(MultilinearForm),
    General(Polynomial),
}

enum PartialFourth<'a> {
    Zero,
    Linear(MultilinearForm),
    General(&'a Polynomial, [Vec<Scalar>; 3]),
}

impl FourthDerivative {
    fn new(f: &Polynomial) -> Self {
        match f.degree() {
            d if d <= 3 => Self::Zero,
            4 => Self::Multilinear(f.homogeneous_part(4).polarization(4)),
            _ => Self::General(f.clone()),
        }
    }

    fn partial(&self, t: &[Scalar], h1: &[Scalar], h2: &[Scalar]) -> PartialFourth<'_> {
        match self {
            Self::Zero => PartialFourth::Zero,
            Self::Multilinear(d) => PartialFourth::Linear(d.contract_last(t).contract_last(h1).contract_last(h2)),
            Self::General(f) => PartialFourth::General(f, [t.to_vec(), h1.to_vec(), h2.to_vec()]),
        }
    }
}

impl PartialFourth<'_> {
    fn vanishes(&self, h3: &[Scalar]) -> bool {
        match self {
            Self::Zero => true,
            Self::Linear(form) => form.eval(&[h3]) == 0,
            Self::General(f, dirs) => {
                let mut all = dirs.to_vec();
                all.push(h3.to_vec());
                f.iterated_derivative(&all).expect("four directions of matching length").is_zero()
            }
        }
    }
}

/// Zero-set membership over the ambient subspace, ready for many affine
/// subspaces.
#[derive(Debug, Clone)]
pub struct AffineCounter {
    p: PrimeModulus,
    family_len: usize,
    regularity: usize,
    domain: Vec<(Vec<Scalar>, bool)>,
}

impl AffineCounter {
    pub fn regularity(&self) -> usize {
        self.regularity
    }

    pub fn check(&self, a: &AffineSubspace) -> Result<AffineCount> {
        if let Some((x, _)) = self.domain.first() {
            check_dim(x.len(), a.ambient())?;
        }
        let (mut in_a, mut in_a_and_x) = (0u64, 0u64);
        for (x, z) in &self.domain {
            if a.contains(x) {
                in_a += 1;
                in_a_and_x += u64::from(*z);
            }
        }
        let p = self.p.get() as i128;
        let p_n = p.pow(self.family_len as u32);
        let domain = self.domain.len() as u64;
        let deviation = Ratio::new((p_n * in_a_and_x as i128 - in_a as i128).abs(), p_n * domain as i128);
        let r = if self.family_len == 0 { 0 } else { self.regularity as u32 };
        let bound_squared = Ratio::new(1, p.checked_pow(r).ok_or_else(|| Error::Usage("regularity too large".into()))?);
        let holds = deviation * deviation <= bound_squared;
        Ok(AffineCount { domain, in_a, in_a_and_x, deviation, bound_squared, holds })
    }
}

impl ZeroSet {
    pub fn points(&self) -> &[Vec<Scalar>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn base(&self) -> &Subspace {
        &self.base
    }

    pub fn shifts(&self) -> &[Vec<Scalar>] {
        &self.shifts
    }

    /// The defining predicate, independent of the stored point list.
    pub fn contains(&self, x: &[Scalar]) -> bool {
        let p = self.base.modulus();
        self.base.contains(x)
            && self.shifts.iter().all(|s| {
                let y = p.add_vec(x, s);
                self.base.contains(&y) && self.quads.iter().all(|q| q.eval(&y) == 0)
            })
    }

    /// `self ∩ (self - t)`: members `x` with `x + t` also a member.
    pub fn shifted(&self, t: &[Scalar]) -> Result<ZeroSet> {
        check_dim(self.base.ambient(), t.len())?;
        let p = self.base.modulus();
        let mut shifts = self.shifts.clone();
        for s in &self.shifts {
            let combined = p.add_vec(s, t);
            if !shifts.contains(&combined) {
                shifts.push(combined);
            }
        }
        let mut out = ZeroSet { base: self.base.clone(), quads: self.quads.clone(), shifts, points: Vec::new() };
        out.points = self.points.iter().filter(|x| out.contains(x)).cloned().collect();
        Ok(out)
    }
}

impl Serialize for ZeroSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.points.serialize(s)
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    quads: Vec<Polynomial>,
    p: PrimeModulus,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ambient: Option<SubspaceJson>,
}

impl Serialize for QuadFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyJson {
            quads: self.quads.iter().map(QuadraticPoly::to_polynomial).collect(),
            p: self.modulus(),
            n: self.ambient.ambient(),
            ambient: Some(self.ambient.to_json()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = FamilyJson::deserialize(d)?;
        let build = || -> Result<Self> {
            let ambient = match &j.ambient {
                Some(a) => Subspace::from_json(j.p, a)?,
                None => Subspace::full(j.p, j.n),
            };
            check_dim(j.n, ambient.ambient())?;
            let quads = j.quads.iter().map(QuadraticPoly::from_polynomial).collect::<Result<Vec<_>>>()?;
            Self::new(quads, ambient)
        };
        build().map_err(D::Error::custom)
    }
}

/// Nonzero vectors of F_p^k whose first nonzero entry is 1, ordered by the
/// position of that entry and then as a base-p counter.
pub fn projective_vectors(p: PrimeModulus, k: usize) -> impl Iterator<Item = Vec<Scalar>> {
    (0..k).flat_map(move |lead| {
        let tail = k - lead - 1;
        (0..p.power_count(tail) as usize).map(move |idx| {
            let mut v = vec![0; k];
            v[lead] = 1;
            v[lead + 1..].copy_from_slice(&p.index_point(idx, tail));
            v
        })
    })
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

    fn family(n: usize, qs: &[&str]) -> QuadFamily {
        QuadFamily::on_full_space(f5(), n, qs.iter().map(|s| quad(n, s)).collect()).unwrap()
    }

    const B: Budget = Budget::DEFAULT;

    #[test]
    fn projective_enumeration() {
        let v: Vec<_> = projective_vectors(f5(), 2).collect();
        assert_eq!(v.len(), 6);
        assert_eq!(v[0], vec![1, 0]);
        assert_eq!(v[5], vec![0, 1]);
    }

    #[test]
    fn regularity_examples() {
        let r = family(2, &["x1*x2"]).regularity(B).unwrap();
        assert_eq!((r.rank, r.witness), (1, Some(vec![1])));
        assert_eq!(family(4, &["x1*x2 + x3*x4"]).regularity(B).unwrap().rank, 2);
        let r = family(2, &["x1*x2", "x1*x2"]).regularity(B).unwrap();
        assert_eq!((r.rank, r.witness), (0, Some(vec![1, 4])));
        assert_eq!(family(2, &[]).regularity(B).unwrap().rank, 26);
    }

    #[test]
    fn regularity_is_taken_on_the_ambient_subspace() {
        let f = family(2, &["x1*x2"]);
        let line = Subspace::span(f5(), 2, vec![vec![1, 0]]).unwrap();
        assert_eq!(f.with_ambient(line).unwrap().regularity(B).unwrap().rank, 0);
    }

    #[test]
    fn regularize_examples() {
        let f = family(4, &["x1*x2 + x3*x4"]);
        let out = f.regularize(2, B).unwrap();
        assert_eq!(out.family, f);
        assert!(out.steps.is_empty());

        let f = family(6, &["x1*x2", "x1*x2 + x3*x4 + x5*x6"]);
        let out = f.regularize(2, B).unwrap();
        assert_eq!(out.family.len(), 1);
        assert_eq!(out.kept, vec![1]);
        assert!(out.family.ambient().codim() <= 2);
        assert!(out.regularity.rank >= 2);

        let f = family(2, &["x1*x2", "x1*x2"]);
        let out = f.regularize(1, B).unwrap();
        assert_eq!(out.family.len(), 1);
        assert_eq!(out.steps[0].forms.len(), 0);
        assert!(out.family.ambient().is_full());
    }

    #[test]
    fn zero_set_examples() {
        assert_eq!(family(2, &[]).zero_set(B).unwrap().len(), 25);
        let x = family(4, &["x1*x2 + x3*x4"]).zero_set(B).unwrap();
        assert_eq!(x.len(), 145);
        for pt in Subspace::full(f5(), 4).points(B).unwrap() {
            assert_eq!(
                x.contains(&pt),
                x.points().binary_search_by_key(&f5().point_index(&pt), |y| f5().point_index(y)).is_ok()
            );
        }
        let x0 = x.shifted(&[0, 0, 0, 0]).unwrap();
        assert_eq!(x0.points(), x.points());
        let xt = x.shifted(&[1, 0, 0, 0]).unwrap();
        assert!(xt.len() < x.len());
        assert!(xt.points().iter().all(|p| x.contains(p)));
        // x1 = 0 has no point with x1 + 1 also in it
        let line = family(1, &["x1^2"]).zero_set(B).unwrap();
        assert!(line.shifted(&[1]).unwrap().is_empty());
    }

    #[test]
    fn admissible_examples() {
        let f = family(3, &["x1*x2"]);
        assert!(f.admissible(&[vec![1, 2, 3]]).unwrap());
        assert!(f.admissible(&[vec![1, 0, 0], vec![2, 0, 0]]).unwrap());
        assert!(!f.admissible(&[vec![1, 0, 0], vec![0, 1, 0]]).unwrap());
        assert!(f.admissible(&vec![vec![0, 0, 0]; 5]).is_err());
    }

    #[test]
    fn admissible_density_examples() {
        let empty = family(2, &[]);
        let fset = GroupSubset::from_indices(f5(), 2, &[1, 2, 3]).unwrap();
        let w = Subspace::span(f5(), 2, vec![vec![1, 1]]).unwrap();
        let d = empty.admissible_density(&fset, &w, B).unwrap();
        assert_eq!(d.density, Ratio::new(3, 25) * Ratio::new(1, 125));
        assert!(d.holds);

        let f = family(3, &["x1*x2"]);
        let d = f.admissible_density(&GroupSubset::full(f5(), 3), &Subspace::full(f5(), 3), B).unwrap();
        assert!(d.holds);
        assert_eq!(d.bound, Ratio::new(1, 5i128.pow(6)));

        let d = f.admissible_density(&GroupSubset::empty(f5(), 3), &Subspace::full(f5(), 3), B).unwrap();
        assert_eq!((d.count, d.bound, d.holds), (0, Ratio::from_integer(0), true));
    }

    #[test]
    fn admissible_count_matches_brute_force() {
        let f = family(2, &["x1*x2", "x1^2 + 2*x2^2"]);
        let fset = GroupSubset::from_indices(f5(), 2, &[0, 6, 13]).unwrap();
        let w = Subspace::full(f5(), 2);
        let d = f.admissible_density(&fset, &w, B).unwrap();
        let pts: Vec<_> = w.points(B).unwrap().collect();
        let mut brute = 0u128;
        for t in fset.points() {
            for a in &pts {
                for b in &pts {
                    for c in &pts {
                        brute += u128::from(f.admissible(&[t.clone(), a.clone(), b.clone(), c.clone()]).unwrap());
                    }
                }
            }
        }
        assert_eq!(d.count, brute);
    }

    #[test]
    fn affine_counting_examples() {
        let f = family(4, &["x1*x2 + x3*x4"]);
        let whole = AffineSubspace::linear(Subspace::full(f5(), 4));
        let c = f.affine_counting_check(&whole, B).unwrap();
        assert_eq!(c.in_a_and_x, 145);
        assert_eq!(c.deviation, Ratio::new(4, 125)); // |145/625 - 1/5|
        assert!(c.holds);
        let hyperplane = AffineSubspace::from_equations(f5(), 4, &[crate::linalg::LinearForm::coordinate(4, 0)], &[0])
            .unwrap()
            .unwrap();
        let c = f.affine_counting_check(&hyperplane, B).unwrap();
        assert_eq!(c.in_a_and_x, 45);
        assert_eq!(c.deviation, Ratio::new(2, 625) * 10);
        assert!(c.holds);
        let c = family(4, &[]).affine_counting_check(&hyperplane, B).unwrap();
        assert_eq!((c.deviation, c.bound_squared), (Ratio::from_integer(0), Ratio::from_integer(1)));
    }

    #[test]
    fn cubicity_defect_examples() {
        let empty = family(1, &[]);
        let full = GroupSubset::full(f5(), 1);
        let w = Subspace::full(f5(), 1);
        let quartic = Polynomial::parse(f5(), 1, "x1^4").unwrap();
        let d = empty.cubicity_defect(&quartic, &full, &w, B, 0).unwrap();
        assert!(d.exhaustive);
        assert_eq!(d.defect, Ratio::new(256, 625));
        let cubic = Polynomial::parse(f5(), 1, "x1^3 + x1").unwrap();
        assert_eq!(empty.cubicity_defect(&cubic, &full, &w, B, 0).unwrap().violations, 0);
        let none = empty.cubicity_defect(&quartic, &GroupSubset::empty(f5(), 1), &w, B, 0).unwrap();
        assert!(none.no_admissible);
        let sampled = empty.cubicity_defect(&quartic, &full, &w, Budget(10), 3).unwrap();
        assert!(!sampled.exhaustive);
        let est = sampled.violations as f64 / sampled.admissible as f64;
        assert!((est - 256.0 / 625.0).abs() < 0.01);
    }

    #[test]
    fn family_json_round_trip() {
        let f = family(3, &["x1*x2", "x3^2 + x1"]);
        let v = serde_json::to_value(&f).unwrap();
        let back: QuadFamily = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
    }
}
