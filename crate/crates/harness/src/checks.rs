//! The acceptance checks. Each is a pure function of its context apart from
//! timing, and every pass rests on exhaustive enumeration or an exact
//! certificate.

use std::time::Instant;

use biasrank::charsum::{bias, level_counts, Domain, PowerClass};
use biasrank::family::projective_vectors;
use biasrank::quadform::{RankCertificate, WittType};
use biasrank::sumset::bogolyubov_search;
use biasrank::{
    AffineSubspace, Budget, GroupSubset, LinearForm, Polynomial, PrimeModulus, QuadFamily, QuadraticPoly, Result,
    Scalar, Subspace,
};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::generate::{random_polynomial, random_quadratic, random_subset, random_subspace, structured_quartic};
use crate::oracle::{bounded_schmidt_rank, rank_at, RankResult};
use crate::pipeline::{implication_check, pipeline, PipelineConfig, PipelineStatus};
use crate::report::CheckReport;

/// Deliberately broken formulas for testing that the suite notices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Non-hyperbolic forms get rank `m/2` instead of `m/2 + 1`.
    NonhyperbolicRank,
}

#[derive(Debug, Clone, Copy)]
pub struct CheckContext {
    pub seed: u64,
    pub mutation: Option<Mutation>,
    pub budget: Budget,
}

pub type CheckFn = fn(&CheckContext) -> CheckReport;

/// Every check, in report order.
pub const CHECKS: [(&str, CheckFn); 10] = [
    ("gauss-sum-law", gauss_sum_law),
    ("quadratic-rank-bound", quadratic_rank_bound),
    ("rank-formula-vs-search", rank_formula_vs_search),
    ("restriction-rank", restriction_rank),
    ("affine-counting", affine_counting),
    ("admissible-density", admissible_density),
    ("bogolyubov-chang", bogolyubov_chang),
    ("quartic-taylor", quartic_taylor),
    ("main-instances", main_instances),
    ("performance", performance),
];

pub const SEEDED_QUADRATICS: usize = 10_000;
pub const RESTRICTION_CUBICS: usize = 200;
pub const DENSITY_CONFIGS: usize = 20;
pub const SUMSET_SEEDS: usize = 50;
pub const SUMSET_SUCCESS_RATE: f64 = 0.9;
pub const TAYLOR_QUARTICS: usize = 100;
pub const MAIN_INSTANCES_PER_K: usize = 10;
pub const TABLE_BIAS_LIMIT_MS: u128 = 1000;

fn modulus(p: u32) -> PrimeModulus {
    PrimeModulus::new(p).expect("prime in range")
}

/// Record an unexpected error as a failure.
fn guard(report: &mut CheckReport, body: impl FnOnce(&mut CheckReport) -> Result<()>) {
    if let Err(e) = body(report) {
        report.fail(json!({ "error": e.to_string() }));
    }
}

/// Quadratic with upper-triangle, linear and constant coefficients taken in
/// that order from `c`.
fn quadratic_from_coeffs(p: PrimeModulus, n: usize, c: &[Scalar]) -> QuadraticPoly {
    let mut g = vec![vec![0; n]; n];
    let mut it = c.iter().copied();
    for (i, row) in g.iter_mut().enumerate() {
        for e in &mut row[i..] {
            *e = it.next().expect("enough coefficients");
        }
    }
    let linear: Vec<Scalar> = (0..n).map(|_| it.next().expect("enough coefficients")).collect();
    let constant = it.next().expect("enough coefficients");
    QuadraticPoly::from_parts(p, &g, linear, constant).expect("square table")
}

fn coefficient_count(n: usize) -> usize {
    n * (n + 1) / 2 + n + 1
}

/// Every quadratic in `n` variables over F_p.
fn all_quadratics(p: PrimeModulus, n: usize) -> impl Iterator<Item = QuadraticPoly> {
    let k = coefficient_count(n);
    (0..p.power_count(k) as usize).map(move |i| quadratic_from_coeffs(p, n, &p.index_point(i, k)))
}

/// The corpus shared by the bias and rank-bound checks: all quadratics over
/// F_5^2, then seeded samples over F_3^3 and F_7^3.
fn gauss_corpus(seed: u64) -> Vec<(u32, usize, Vec<QuadraticPoly>)> {
    let mut out = vec![(5, 2, all_quadratics(modulus(5), 2).collect())];
    for (i, p) in [3u32, 7].into_iter().enumerate() {
        let mut rng = SplitMix64::seed_from_u64(seed.wrapping_add(i as u64));
        out.push((p, 3, (0..SEEDED_QUADRATICS).map(|_| random_quadratic(&mut rng, modulus(p), 3)).collect()));
    }
    out
}

pub fn gauss_sum_law(ctx: &CheckContext) -> CheckReport {
    CheckReport::new("gauss-sum-law").param("seed", ctx.seed).param("seeded_per_field", SEEDED_QUADRATICS).timed(|r| {
        guard(r, |r| {
            let (mut total, mut zero) = (0u64, 0u64);
            for (p, n, corpus) in gauss_corpus(ctx.seed) {
                let mut hist = [0u64; 4];
                for q in &corpus {
                    let counts = level_counts(&q.to_polynomial(), Domain::Full(n), ctx.budget)?;
                    let m = q.gram_rank();
                    total += 1;
                    if counts.power_class() == PowerClass::Zero {
                        zero += 1;
                    } else if counts.bias_is_power(m as u32) {
                        hist[m] += 1;
                    } else {
                        r.fail(json!({ "p": p, "n": n, "q": q.to_polynomial().to_string(), "m": m, "class": counts.power_class() }));
                    }
                }
                r.metric(&format!("p{p}_n{n}_power_by_m"), hist);
            }
            r.metric("quadratics", total);
            r.metric("zero_bias", zero);
            r.summary = format!("{total} quadratics, {zero} with bias 0, {} violations", r.witnesses.len());
            Ok(())
        })
    })
}

pub fn quadratic_rank_bound(ctx: &CheckContext) -> CheckReport {
    CheckReport::new("quadratic-rank-bound").param("seed", ctx.seed).param("seeded_per_field", SEEDED_QUADRATICS).timed(|r| {
        guard(r, |r| {
            let (mut checked, mut tight) = (0u64, 0u64);
            for (p, n, corpus) in gauss_corpus(ctx.seed) {
                for q in &corpus {
                    let counts = level_counts(&q.to_polynomial(), Domain::Full(n), ctx.budget)?;
                    let PowerClass::Power(m) = counts.power_class() else { continue };
                    let cert = q.schmidt_rank();
                    checked += 1;
                    tight += u64::from(cert.schmidt_rank == m as usize);
                    if !cert.verify(q) || cert.schmidt_rank > m as usize {
                        r.fail(json!({ "p": p, "n": n, "q": q.to_polynomial().to_string(), "m": m, "rank": cert.schmidt_rank }));
                    }
                }
            }
            r.metric("positive_bias", checked);
            r.metric("equality_cases", tight);
            r.summary = format!("{checked} quadratics with positive bias, {} violations", r.witnesses.len());
            Ok(())
        })
    })
}

fn rank_formula(m: usize, witt: WittType, mutation: Option<Mutation>) -> usize {
    match (mutation, witt) {
        (Some(Mutation::NonhyperbolicRank), WittType::NonHyperbolic) => m / 2,
        _ => RankCertificate::formula(m, witt),
    }
}

pub fn rank_formula_vs_search(ctx: &CheckContext) -> CheckReport {
    CheckReport::new("rank-formula-vs-search").param("fields", [3, 5]).param("n", 2).param("cap", 2).timed(|r| {
        guard(r, |r| {
            let mut compared = 0u64;
            for p in [3u32, 5] {
                for q in all_quadratics(modulus(p), 2) {
                    let cert = q.schmidt_rank();
                    let formula = rank_formula(cert.gram_rank, cert.witt, ctx.mutation);
                    let probe = bounded_schmidt_rank(&q.to_polynomial(), 2, ctx.budget)?;
                    compared += 1;
                    let agree = probe.exact() == Some(cert.schmidt_rank)
                        && formula == cert.schmidt_rank
                        && probe.verify()
                        && cert.verify(&q);
                    if !agree {
                        r.fail(json!({
                            "p": p,
                            "q": q.to_polynomial().to_string(),
                            "certificate": cert.schmidt_rank,
                            "formula": formula,
                            "search": probe.result,
                        }));
                    }
                }
            }
            r.metric("compared", compared);
            r.summary = format!("{compared} quadratics, {} disagreements", r.witnesses.len());
            Ok(())
        })
    })
}

pub fn restriction_rank(ctx: &CheckContext) -> CheckReport {
    CheckReport::new("restriction-rank")
        .param("seed", ctx.seed)
        .param("cubics", RESTRICTION_CUBICS)
        .param("cap", 2)
        .timed(|r| {
            guard(r, |r| {
                let p = modulus(5);
                // x1 x2 + x3 x4 on {x1 = 0}: ranks 2 and 1, codimension 1
                let f = Polynomial::parse(p, 4, "x1*x2 + x3*x4")?;
                let v = Subspace::span(p, 4, vec![vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]])?;
                let whole = rank_at(&f, 2, 2, ctx.budget)?.result;
                let part = rank_at(&f.restrict(&AffineSubspace::linear(v))?, 2, 2, ctx.budget)?.result;
                if (whole, part) != (RankResult::Exact(2), RankResult::Exact(1)) {
                    r.fail(json!({ "example": "x1*x2 + x3*x4", "rank": whole, "restricted": part }));
                }
                let mut rng = SplitMix64::seed_from_u64(ctx.seed);
                let (mut resolved, mut skipped) = (0u64, 0u64);
                for _ in 0..RESTRICTION_CUBICS {
                    let f = random_polynomial(&mut rng, p, 2, 3)?;
                    let v = random_subspace(&mut rng, p, 2, 1)?;
                    let g = f.restrict(&AffineSubspace::linear(v.clone()))?;
                    let (a, b) = (rank_at(&f, 3, 2, ctx.budget)?, rank_at(&g, 3, 2, ctx.budget)?);
                    let (Some(rf), Some(rg)) = (a.exact(), b.exact()) else {
                        skipped += 1;
                        continue;
                    };
                    resolved += 1;
                    if rf > rg + v.codim() || !a.verify() || !b.verify() {
                        r.fail(json!({ "f": f.to_string(), "v": v.to_json(), "rank": rf, "restricted": rg }));
                    }
                }
                r.metric("resolved", resolved);
                r.metric("skipped", skipped);
                r.metric("skip_rate", skipped as f64 / RESTRICTION_CUBICS as f64);
                r.summary = format!("{resolved} resolved, {skipped} skipped, {} violations", r.witnesses.len());
                Ok(())
            })
        })
}

pub fn affine_counting(ctx: &CheckContext) -> CheckReport {
    CheckReport::new("affine-counting").param("family", ["x1*x2 + x3*x4"]).param("p", 5).param("n", 4).timed(|r| {
        guard(r, |r| {
            let p = modulus(5);
            let q = QuadraticPoly::from_polynomial(&Polynomial::parse(p, 4, "x1*x2 + x3*x4")?)?;
            let family = QuadFamily::on_full_space(p, 4, vec![q])?;
            let zeros = family.zero_set(ctx.budget)?.len();
            let counter = family.affine_counter(ctx.budget)?;
            r.metric("zero_set_size", zeros);
            r.metric("regularity", counter.regularity());
            if zeros != 145 || counter.regularity() != 2 {
                r.fail(json!({ "zero_set_size": zeros, "regularity": counter.regularity() }));
            }
            let limit = Ratio::new(1i128, 5);
            let mut worst = Ratio::from_integer(0i128);
            let mut scanned = 0u64;
            for l in projective_vectors(p, 4) {
                for c in 0..p.get() {
                    let forms = [LinearForm::homogeneous(l.clone())];
                    let a = AffineSubspace::from_equations(p, 4, &forms, &[c])?.expect("a nonzero form has solutions");
                    let count = counter.check(&a)?;
                    scanned += 1;
                    worst = worst.max(count.deviation);
                    if !count.holds || count.deviation > limit {
                        r.fail(json!({ "form": l, "value": c, "deviation": count.deviation.to_string() }));
                    }
                }
            }
            r.metric("hyperplanes", scanned);
            r.metric("max_deviation", worst.to_string());
            r.summary =
                format!("{scanned} affine hyperplanes, max deviation {worst}, {} violations", r.witnesses.len());
            Ok(())
        })
    })
}

pub fn admissible_density(ctx: &CheckContext) -> CheckReport {
    CheckReport::new("admissible-density")
        .param("seed", ctx.seed)
        .param("configs", DENSITY_CONFIGS)
        .param("p", 5)
        .timed(|r| {
            guard(r, |r| {
                let p = modulus(5);
                let mut rows = Vec::new();
                for i in 0..DENSITY_CONFIGS {
                    let mut rng = SplitMix64::seed_from_u64(ctx.seed.wrapping_add(i as u64));
                    let n = 2 + i % 3;
                    let big_n = i % 3;
                    let v1 = random_subspace(&mut rng, p, n, usize::from(n >= 3 && i % 2 == 1))?;
                    let quads: Vec<QuadraticPoly> =
                        (0..big_n).map(|_| random_quadratic(&mut rng, p, n).homogeneous()).collect();
                    let family = QuadFamily::new(quads, v1.clone())?;
                    let codim = (i / 3) % 3;
                    let local = random_subspace(&mut rng, p, v1.dim(), codim.min(v1.dim()))?;
                    let w = v1.image(local.basis());
                    let mu = [0.2, 0.5, 0.8][i % 3];
                    let points: Vec<Vec<Scalar>> = v1.points(ctx.budget)?.collect();
                    let take = ((mu * points.len() as f64).floor() as usize).max(1);
                    let mut idx: Vec<usize> = (0..points.len()).collect();
                    for j in 0..take {
                        let k = rng.random_range(j..idx.len());
                        idx.swap(j, k);
                    }
                    let chosen: Vec<Vec<Scalar>> = idx[..take].iter().map(|&j| points[j].clone()).collect();
                    let fset = GroupSubset::from_points(p, n, &chosen)?;
                    let d = family.admissible_density(&fset, &w, ctx.budget)?;
                    let row = json!({
                        "n": n, "N": big_n, "dim_v1": v1.dim(), "r": v1.dim() - w.dim(), "fset": take,
                        "density": d.density.to_string(), "bound": d.bound.to_string(),
                    });
                    if !d.holds {
                        r.fail(row.clone());
                    }
                    rows.push(row);
                }
                r.metric("configs", rows);
                r.summary = format!("{DENSITY_CONFIGS} configurations, {} below the bound", r.witnesses.len());
                Ok(())
            })
        })
}

/// `b E - b E` as a membership table, by repeated set addition.
fn iterated_difference(e: &GroupSubset, b: usize) -> Vec<bool> {
    let (p, n) = (e.modulus(), e.ambient());
    let order = e.group_order();
    let points: Vec<Vec<Scalar>> = (0..order).map(|i| p.index_point(i, n)).collect();
    let add = |a: &[bool], b: &[bool]| {
        let mut out = vec![false; order];
        for (i, _) in a.iter().enumerate().filter(|(_, &x)| x) {
            for (j, _) in b.iter().enumerate().filter(|(_, &y)| y) {
                out[p.point_index(&p.add_vec(&points[i], &points[j]))] = true;
            }
        }
        out
    };
    let mut sum = e.members().to_vec();
    for _ in 1..b {
        sum = add(&sum, e.members());
    }
    let mut neg = vec![false; order];
    for (i, _) in sum.iter().enumerate().filter(|(_, &x)| x) {
        neg[p.point_index(&p.neg_vec(&points[i]))] = true;
    }
    add(&sum, &neg)
}

pub fn bogolyubov_chang(ctx: &CheckContext) -> CheckReport {
    CheckReport::new("bogolyubov-chang")
        .param("seed", ctx.seed)
        .param("seeds_per_group", SUMSET_SEEDS)
        .param("max_b", 3)
        .param("max_codim", 3)
        .param("min_success_rate", SUMSET_SUCCESS_RATE)
        .timed(|r| {
            guard(r, |r| {
                let mut parts = Vec::new();
                for (p, n) in [(5u32, 3usize), (3, 4)] {
                    let p = modulus(p);
                    let mut codims = [0u64; 4];
                    let mut bs = [0u64; 4];
                    let mut found = 0usize;
                    for i in 0..SUMSET_SEEDS {
                        let mut rng = SplitMix64::seed_from_u64(ctx.seed.wrapping_add(i as u64));
                        let mu = [0.2, 0.3, 0.4, 0.5][i % 4];
                        let e = random_subset(&mut rng, p, n, mu)?;
                        let Some(res) = bogolyubov_search(&e, 3, 3, ctx.budget)? else { continue };
                        found += 1;
                        codims[res.codim] += 1;
                        bs[res.b] += 1;
                        let diff = iterated_difference(&e, res.b);
                        let outside = res.subspace.points(ctx.budget)?.find(|t| !diff[p.point_index(t)]);
                        if res.b > 3 || res.codim > 3 || res.min_reps == 0 || outside.is_some() {
                            r.fail(json!({ "p": p.get(), "n": n, "instance": i, "b": res.b, "codim": res.codim, "outside": outside }));
                        }
                    }
                    let rate = found as f64 / SUMSET_SEEDS as f64;
                    if rate < SUMSET_SUCCESS_RATE {
                        r.fail(json!({ "p": p.get(), "n": n, "success_rate": rate }));
                    }
                    r.metric(&format!("p{}_n{}_codim_histogram", p.get(), n), codims);
                    r.metric(&format!("p{}_n{}_b_histogram", p.get(), n), bs);
                    r.metric(&format!("p{}_n{}_success_rate", p.get(), n), rate);
                    parts.push(format!("F_{}^{}: {found}/{SUMSET_SEEDS}", p.get(), n));
                }
                r.summary = format!("{}, {} violations", parts.join(", "), r.witnesses.len());
                Ok(())
            })
        })
}

/// `sum_{S} (-1)^{4-|S|} f(sum_{i in S} h_i)` as a polynomial in the `4n`
/// coordinates of `h_1, ..., h_4`.
fn fourfold_difference(f: &Polynomial) -> Result<Polynomial> {
    let (p, n) = (f.modulus(), f.num_vars());
    let mut out = Polynomial::zero(p, 4 * n);
    for s in 0u32..16 {
        let subs: Vec<Polynomial> = (0..n)
            .map(|j| {
                let terms = (0..4).filter(|i| s >> i & 1 == 1).map(|i| (1, unit_exps(4 * n, i * n + j)));
                Polynomial::from_terms(p, 4 * n, terms.collect::<Vec<_>>())
            })
            .collect::<Result<_>>()?;
        let term = f.compose(&subs)?;
        out = if (4 - s.count_ones()) % 2 == 0 { out.add(&term)? } else { out.sub(&term)? };
    }
    Ok(out)
}

fn unit_exps(n: usize, i: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[i] = 1;
    e
}

fn unit(n: usize, i: usize) -> Vec<Scalar> {
    unit_exps(n, i)
}

pub fn quartic_taylor(ctx: &CheckContext) -> CheckReport {
    CheckReport::new("quartic-taylor").param("seed", ctx.seed).param("quartics", TAYLOR_QUARTICS).param("p", 5).timed(|r| {
        guard(r, |r| {
            let p = modulus(5);
            let mut points = 0u64;
            for i in 0..TAYLOR_QUARTICS {
                let mut rng = SplitMix64::seed_from_u64(ctx.seed.wrapping_add(i as u64));
                let n = 1 + i % 3;
                let f = random_polynomial(&mut rng, p, n, 4)?;
                let f4 = f.homogeneous_part(4);
                for x in Subspace::full(p, n).points(ctx.budget)? {
                    points += 1;
                    let d = f.iterated_derivative(&[x.clone(), x.clone(), x.clone(), x.clone()])?;
                    let expected = p.mul(24 % 5, f4.eval_unchecked(&x));
                    if d.degree() > 0 || d.eval_unchecked(&x) != expected {
                        r.fail(json!({ "f": f.to_string(), "x": x, "derivative": d.to_string(), "expected": expected }));
                    }
                }
                let form = f.polarization(4);
                let tuples = p_tuples(n);
                let mut multilinear = Vec::new();
                for idx in &tuples {
                    let args: Vec<Vec<Scalar>> = idx.iter().map(|&j| unit(n, j)).collect();
                    let refs: Vec<&[Scalar]> = args.iter().map(Vec::as_slice).collect();
                    let c = form.eval(&refs);
                    for k in 0..3 {
                        let mut swapped = args.clone();
                        swapped.swap(k, k + 1);
                        let refs: Vec<&[Scalar]> = swapped.iter().map(Vec::as_slice).collect();
                        if form.eval(&refs) != c {
                            r.fail(json!({ "f": f.to_string(), "asymmetric_at": idx }));
                        }
                    }
                    let mut e = vec![0u32; 4 * n];
                    for (k, &j) in idx.iter().enumerate() {
                        e[k * n + j] += 1;
                    }
                    multilinear.push((c, e));
                }
                let expected = Polynomial::from_terms(p, 4 * n, multilinear)?;
                let actual = fourfold_difference(&f)?;
                if actual != expected {
                    r.fail(json!({ "f": f.to_string(), "difference": actual.to_string(), "polarization": expected.to_string() }));
                }
            }
            r.metric("points", points);
            r.summary = format!("{TAYLOR_QUARTICS} quartics, {points} points, {} violations", r.witnesses.len());
            Ok(())
        })
    })
}

/// All of `[0, n)^4`.
fn p_tuples(n: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

pub fn main_instances(ctx: &CheckContext) -> CheckReport {
    let r_target = 1;
    CheckReport::new("main-instances")
        .param("seed", ctx.seed)
        .param("per_k", MAIN_INSTANCES_PER_K)
        .param("p", 5)
        .param("n", 4)
        .param("R", r_target)
        .timed(|r| {
            guard(r, |r| {
                let p = modulus(5);
                let mut rows = Vec::new();
                let mut passed = 0;
                for k in [1usize, 2] {
                    for i in 0..MAIN_INSTANCES_PER_K {
                        let seed = ctx.seed.wrapping_add(i as u64);
                        let mut rng = SplitMix64::seed_from_u64(seed);
                        let s = structured_quartic(&mut rng, p, 4, k)?;
                        let truth = QuadFamily::on_full_space(p, 4, s.family.clone())?;
                        let truth_ok = implication_check(&s.f, &truth, ctx.budget)?.holds();
                        let cfg = PipelineConfig { r: r_target, seed, ..PipelineConfig::default() };
                        let out = pipeline(&s.f, &Subspace::full(p, 4), cfg, ctx.budget)?;
                        let recheck = implication_check(&s.f, &out.family, ctx.budget)?;
                        let expected_points = out.family.ambient().size() as u64;
                        let row = json!({
                            "k": k, "seed": seed, "status": out.status, "N": out.family_size, "codim": out.codim,
                            "zero_set": out.zero_set_size, "pool": out.pool_size, "regularity": out.regularity,
                            "checked": recheck.checked,
                        });
                        let ok = out.status == PipelineStatus::Pass
                            && out.family_size <= 2 * k
                            && out.codim <= 2 * k * r_target
                            && recheck.holds()
                            && recheck.checked == expected_points
                            && truth_ok;
                        if ok {
                            passed += 1;
                        } else {
                            r.fail(
                                json!({ "instance": row, "ground_truth_holds": truth_ok, "witness": recheck.witness }),
                            );
                        }
                        rows.push(row);
                    }
                }
                r.metric("instances", rows);
                r.summary = format!("{passed}/{} structured quartics pass", 2 * MAIN_INSTANCES_PER_K);
                Ok(())
            })
        })
}

/// Keys under this prefix hold wall-clock measurements.
pub const TIMING_METRIC_PREFIX: &str = "timing.";

pub fn performance(ctx: &CheckContext) -> CheckReport {
    CheckReport::new("performance")
        .param("seed", ctx.seed)
        .param("p", 5)
        .param("n", 7)
        .param("limit_ms", TABLE_BIAS_LIMIT_MS)
        .timed(|r| {
            guard(r, |r| {
                let p = modulus(5);
                let mut rng = SplitMix64::seed_from_u64(ctx.seed);
                let f = random_polynomial(&mut rng, p, 7, 4)?;
                let start = Instant::now();
                let b = bias(&f, Domain::Full(7), ctx.budget)?;
                let table_ms = start.elapsed().as_millis();
                let start = Instant::now();
                let mut acc = 0u64;
                let mut evaluated = 0u64;
                for x in Subspace::full(p, 7).points(ctx.budget)? {
                    acc += u64::from(f.eval_unchecked(&x));
                    evaluated += 1;
                }
                let secs = start.elapsed().as_secs_f64().max(1e-9);
                r.metric("points", b.counts.domain_size);
                r.metric("value_sum", acc);
                r.metric(&format!("{TIMING_METRIC_PREFIX}table_bias_ms"), table_ms);
                r.metric(&format!("{TIMING_METRIC_PREFIX}pointwise_evals_per_s"), (evaluated as f64 / secs).round());
                if table_ms >= TABLE_BIAS_LIMIT_MS {
                    r.fail(json!({ "table_bias_ms": table_ms }));
                }
                r.summary = format!("table bias over {} points, limit {TABLE_BIAS_LIMIT_MS} ms", b.counts.domain_size);
                Ok(())
            })
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_layout() {
        let p = modulus(5);
        let q = quadratic_from_coeffs(p, 2, &[1, 2, 3, 4, 0, 1]);
        assert_eq!(q.to_polynomial(), Polynomial::parse(p, 2, "x1^2 + 2*x1*x2 + 3*x2^2 + 4*x1 + 1").unwrap());
        assert_eq!(all_quadratics(modulus(3), 2).count(), 729);
    }

    #[test]
    fn mutation_breaks_nonhyperbolic_formula() {
        assert_eq!(rank_formula(2, WittType::NonHyperbolic, None), 2);
        assert_eq!(rank_formula(2, WittType::NonHyperbolic, Some(Mutation::NonhyperbolicRank)), 1);
    }

    #[test]
    fn difference_set_of_a_line() {
        let p = modulus(5);
        let e = GroupSubset::from_indices(p, 1, &[0, 1]).unwrap();
        assert_eq!(iterated_difference(&e, 1), vec![true, true, false, false, true]);
        assert!(iterated_difference(&e, 2).iter().all(|&x| x));
    }

    #[test]
    fn fourfold_difference_of_a_fourth_power() {
        let p = modulus(5);
        let f = Polynomial::parse(p, 1, "x1^4").unwrap();
        // 24 h1 h2 h3 h4
        assert_eq!(fourfold_difference(&f).unwrap(), Polynomial::parse(p, 4, "4*x1*x2*x3*x4").unwrap());
    }
}
