//! Seeded generators. Every artifact is a pure function of its spec: the
//! random stream is SplitMix64 seeded with `spec.seed`, consumed in a fixed
//! order.

use biasrank::{
    Budget, Error, GroupSubset, LinearForm, Polynomial, PrimeModulus, QuadraticPoly, Result, Scalar, Subspace,
};
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorKind {
    RandomPoly { degree: u32 },
    StructuredQuartic { k: usize },
    RandomSubset { density: f64 },
    RandomSubspace { codim: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub seed: u64,
    pub p: PrimeModulus,
    pub n: usize,
    #[serde(flatten)]
    pub kind: GeneratorKind,
}

/// `f = sum_i Q_i Q'_i` together with the homogeneous parts of all factors,
/// whose common zeros kill the quartic part of `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredQuartic {
    pub f: Polynomial,
    pub factors: Vec<(QuadraticPoly, QuadraticPoly)>,
    pub family: Vec<QuadraticPoly>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Artifact {
    Polynomial(Polynomial),
    Structured(StructuredQuartic),
    Subset(GroupSubset),
    Subspace(#[serde(serialize_with = "subspace_json")] Subspace),
}

fn subspace_json<S: serde::Serializer>(v: &Subspace, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.to_json().serialize(s)
}

pub fn generate(spec: &GeneratorSpec) -> Result<Artifact> {
    let mut rng = SplitMix64::seed_from_u64(spec.seed);
    let (p, n) = (spec.p, spec.n);
    Ok(match spec.kind {
        GeneratorKind::RandomPoly { degree } => Artifact::Polynomial(random_polynomial(&mut rng, p, n, degree)?),
        GeneratorKind::StructuredQuartic { k } => Artifact::Structured(structured_quartic(&mut rng, p, n, k)?),
        GeneratorKind::RandomSubset { density } => Artifact::Subset(random_subset(&mut rng, p, n, density)?),
        GeneratorKind::RandomSubspace { codim } => Artifact::Subspace(random_subspace(&mut rng, p, n, codim)?),
    })
}

fn monomials_up_to(n: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|e: Vec<u32>| {
                let used: u32 = e.iter().sum();
                (0..=d - used).map(move |k| {
                    let mut next = e.clone();
                    next.push(k);
                    next
                })
            })
            .collect();
    }
    out
}

/// Uniform coefficients on every monomial of degree at most `d`,
/// resampled until the degree is exactly `d`.
pub fn random_polynomial<R: Rng>(rng: &mut R, p: PrimeModulus, n: usize, d: u32) -> Result<Polynomial> {
    if d as usize >= p.size() {
        return Err(Error::Usage(format!("degree {d} needs p > {d}")));
    }
    let monos = monomials_up_to(n, d);
    loop {
        let terms = monos.iter().map(|e| (rng.random_range(0..p.get()), e.clone()));
        let f = Polynomial::from_terms(p, n, terms.collect::<Vec<_>>())?;
        if f.degree() == d as i32 || n == 0 {
            return Ok(f);
        }
    }
}

/// Uniform quadratic: every coefficient, linear and constant term included.
pub fn random_quadratic<R: Rng>(rng: &mut R, p: PrimeModulus, n: usize) -> QuadraticPoly {
    let mut g = vec![vec![0; n]; n];
    for (i, row) in g.iter_mut().enumerate() {
        for c in &mut row[i..] {
            *c = rng.random_range(0..p.get());
        }
    }
    let linear = (0..n).map(|_| rng.random_range(0..p.get())).collect();
    let constant = rng.random_range(0..p.get());
    QuadraticPoly::from_parts(p, &g, linear, constant).expect("square table")
}

pub fn structured_quartic<R: Rng>(rng: &mut R, p: PrimeModulus, n: usize, k: usize) -> Result<StructuredQuartic> {
    let mut f = Polynomial::zero(p, n);
    let mut factors = Vec::with_capacity(k);
    let mut family = Vec::with_capacity(2 * k);
    for _ in 0..k {
        let a = random_quadratic(rng, p, n);
        let b = random_quadratic(rng, p, n);
        f = f.add(&a.to_polynomial().multiply(&b.to_polynomial())?)?;
        family.push(a.homogeneous());
        family.push(b.homogeneous());
        factors.push((a, b));
    }
    Ok(StructuredQuartic { f, factors, family })
}

/// Exactly `floor(density * p^n)` distinct points, by a partial shuffle.
pub fn random_subset<R: Rng>(rng: &mut R, p: PrimeModulus, n: usize, density: f64) -> Result<GroupSubset> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::Usage(format!("density {density} outside [0, 1]")));
    }
    let order = p.power_count(n) as usize;
    let size = (density * order as f64).floor() as usize;
    let mut idx: Vec<usize> = (0..order).collect();
    for i in 0..size {
        let j = rng.random_range(i..order);
        idx.swap(i, j);
    }
    GroupSubset::from_indices(p, n, &idx[..size])
}

/// Kernel of `codim` random independent linear forms.
pub fn random_subspace<R: Rng>(rng: &mut R, p: PrimeModulus, n: usize, codim: usize) -> Result<Subspace> {
    if codim > n {
        return Err(Error::Usage(format!("codimension {codim} exceeds dimension {n}")));
    }
    loop {
        let rows: Vec<Vec<Scalar>> =
            (0..codim).map(|_| (0..n).map(|_| rng.random_range(0..p.get())).collect()).collect();
        if biasrank::linalg::rank(p, &rows, n) == codim {
            let forms: Vec<LinearForm> = rows.into_iter().map(LinearForm::homogeneous).collect();
            return biasrank::linalg::annihilator_subspace(p, n, &forms);
        }
    }
}

/// A uniformly random point of `v`.
pub fn random_point<R: Rng>(rng: &mut R, v: &Subspace) -> Vec<Scalar> {
    let p = v.modulus();
    let coords: Vec<Scalar> = (0..v.dim()).map(|_| rng.random_range(0..p.get())).collect();
    v.point(&coords)
}

/// Budget large enough for every desk-scale enumeration in the harness.
pub const HARNESS_BUDGET: Budget = Budget(50_000_000);
