//! Subsets of the group F_p^n: exact representation counts for `bE - bE`,
//! the Fourier spectrum, and a verified search for a subspace inside
//! `bE - bE`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Budget, Error, Result};
use crate::field::{PrimeModulus, Scalar};
use crate::linalg::{annihilator_subspace, LinearForm, Subspace};

/// Largest `b` accepted by [`rep_counts`].
pub const MAX_REP_ORDER: usize = 3;
/// Absolute slack on the spectrum threshold, relative to `|E|`.
pub const SPECTRUM_GUARD: f64 = 1e-9;

/// A subset of F_p^n as a dense membership table in point-index order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSubset {
    p: PrimeModulus,
    n: usize,
    members: Vec<bool>,
    size: usize,
}

impl GroupSubset {
    pub fn new(p: PrimeModulus, n: usize, members: Vec<bool>) -> Result<Self> {
        let expected = p.power_count(n);
        if members.len() as u128 != expected {
            return Err(Error::Usage(format!("membership table has {} entries, expected {expected}", members.len())));
        }
        let size = members.iter().filter(|&&m| m).count();
        Ok(Self { p, n, members, size })
    }

    pub fn empty(p: PrimeModulus, n: usize) -> Self {
        Self { p, n, members: vec![false; p.power_count(n) as usize], size: 0 }
    }

    pub fn full(p: PrimeModulus, n: usize) -> Self {
        let total = p.power_count(n) as usize;
        Self { p, n, members: vec![true; total], size: total }
    }

    pub fn from_indices(p: PrimeModulus, n: usize, indices: &[usize]) -> Result<Self> {
        let mut set = Self::empty(p, n);
        for &i in indices {
            if i >= set.members.len() {
                return Err(Error::Usage(format!("point index {i} out of range")));
            }
            set.insert_index(i);
        }
        Ok(set)
    }

    pub fn from_points(p: PrimeModulus, n: usize, points: &[Vec<Scalar>]) -> Result<Self> {
        let mut set = Self::empty(p, n);
        for x in points {
            check_dim(n, x.len())?;
            set.insert_index(p.point_index(x));
        }
        Ok(set)
    }

    pub fn from_subspace(v: &Subspace, budget: Budget) -> Result<Self> {
        let mut set = Self::empty(v.modulus(), v.ambient());
        for x in v.points(budget)? {
            set.insert_index(v.modulus().point_index(&x));
        }
        Ok(set)
    }

    fn insert_index(&mut self, i: usize) {
        if !self.members[i] {
            self.members[i] = true;
            self.size += 1;
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn group_order(&self) -> usize {
        self.members.len()
    }

    pub fn density(&self) -> f64 {
        self.size as f64 / self.members.len() as f64
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }

    pub fn contains(&self, x: &[Scalar]) -> bool {
        x.len() == self.n && self.members[self.p.point_index(x)]
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i)
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<Scalar>> + '_ {
        self.indices().map(|i| self.p.index_point(i, self.n))
    }

    /// Membership bitmap as hex, two digits per byte, index `8k + j` in bit
    /// `j` of byte `k`.
    pub fn to_hex(&self) -> String {
        self.members
            .chunks(8)
            .map(|chunk| {
                let byte = chunk.iter().enumerate().fold(0u8, |acc, (j, &m)| acc | (u8::from(m) << j));
                format!("{byte:02x}")
            })
            .collect()
    }

    pub fn from_hex(p: PrimeModulus, n: usize, hex: &str) -> Result<Self> {
        let total = p.power_count(n) as usize;
        if hex.len() != 2 * total.div_ceil(8) {
            return Err(Error::Parse(format!("bitmap needs {} hex digits", 2 * total.div_ceil(8))));
        }
        let mut members = Vec::with_capacity(total);
        for k in 0..hex.len() / 2 {
            let byte = u8::from_str_radix(&hex[2 * k..2 * k + 2], 16)
                .map_err(|_| Error::Parse(format!("bad hex byte at {k}")))?;
            for j in 0..8 {
                if members.len() < total {
                    members.push(byte >> j & 1 == 1);
                } else if byte >> j & 1 == 1 {
                    return Err(Error::Parse("bitmap has bits past the group order".into()));
                }
            }
        }
        Self::new(p, n, members)
    }
}

#[derive(Serialize, Deserialize)]
struct GroupSubsetJson {
    p: PrimeModulus,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bitmap: Option<String>,
}

impl Serialize for GroupSubset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GroupSubsetJson { p: self.p, n: self.n, points: Some(self.indices().collect()), bitmap: None }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupSubset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = GroupSubsetJson::deserialize(d)?;
        match (j.points, j.bitmap) {
            (Some(pts), None) => Self::from_indices(j.p, j.n, &pts),
            (None, Some(hex)) => Self::from_hex(j.p, j.n, &hex),
            _ => Err(Error::Parse("give exactly one of \"points\" or \"bitmap\"".into())),
        }
        .map_err(D::Error::custom)
    }
}

/// `counts[t] = #{(y, z) in E^b x E^b : t = y_1 + ... + y_b - z_1 - ... - z_b}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepProfile {
    pub b: usize,
    pub counts: Vec<u128>,
}

impl RepProfile {
    pub fn get(&self, p: PrimeModulus, t: &[Scalar]) -> u128 {
        self.counts[p.point_index(t)]
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().sum()
    }
}

/// Index arithmetic on F_p^n in point-index order.
struct IndexGroup {
    q: usize,
    n: usize,
}

impl IndexGroup {
    fn add(&self, mut a: usize, mut b: usize, negate_b: bool) -> usize {
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.n {
            let (da, db) = (a % self.q, b % self.q);
            let d = if negate_b { (da + self.q - db) % self.q } else { (da + db) % self.q };
            out += d * place;
            place *= self.q;
            a /= self.q;
            b /= self.q;
        }
        out
    }
}

fn convolve(g: &IndexGroup, a: &[u128], b: &[u128], subtract: bool) -> Vec<u128> {
    let mut out = vec![0u128; a.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if bj != 0 {
                out[g.add(i, j, subtract)] += ai * bj;
            }
        }
    }
    out
}

/// Exact representation counts by direct convolution.
pub fn rep_counts(e: &GroupSubset, b: usize, budget: Budget) -> Result<RepProfile> {
    if b == 0 || b > MAX_REP_ORDER {
        return Err(Error::Usage(format!("b must lie in 1..={MAX_REP_ORDER}")));
    }
    let order = e.group_order() as u128;
    budget.check(order * order)?;
    let g = IndexGroup { q: e.p.size(), n: e.n };
    let ind: Vec<u128> = e.members.iter().map(|&m| u128::from(m)).collect();
    let mut sum = ind.clone();
    for _ in 1..b {
        sum = convolve(&g, &sum, &ind, false);
    }
    Ok(RepProfile { b, counts: convolve(&g, &sum, &sum, true) })
}

/// `Ê(ξ) = sum_{x in E} ω^{ξ·x}` for every `ξ`, in point-index order.
pub fn fourier_coefficients(e: &GroupSubset) -> Vec<Complex64> {
    let q = e.p.size();
    let roots: Vec<Complex64> =
        (0..q).map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / q as f64)).collect();
    let mut cur: Vec<Complex64> = e.members.iter().map(|&m| Complex64::new(f64::from(u8::from(m)), 0.0)).collect();
    let mut fiber = vec![Complex64::new(0.0, 0.0); q];
    for axis in 0..e.n {
        let stride = q.pow((e.n - 1 - axis) as u32);
        let block = stride * q;
        let mut next = vec![Complex64::new(0.0, 0.0); cur.len()];
        for base in (0..cur.len()).step_by(block) {
            for off in 0..stride {
                for (k, f) in fiber.iter_mut().enumerate() {
                    *f = cur[base + off + k * stride];
                }
                for xi in 0..q {
                    next[base + off + xi * stride] =
                        fiber.iter().enumerate().map(|(k, f)| f * roots[(xi * k) % q]).sum();
                }
            }
        }
        cur = next;
    }
    cur
}

/// Representation counts through the transform:
/// `r_b(t) = |G|^{-1} sum_ξ |Ê(ξ)|^{2b} ω^{-ξ·t}`, rounded. Fails if any
/// value is further than `0.25` from an integer.
pub fn rep_counts_via_transform(e: &GroupSubset, b: usize, budget: Budget) -> Result<RepProfile> {
    if b == 0 || b > MAX_REP_ORDER {
        return Err(Error::Usage(format!("b must lie in 1..={MAX_REP_ORDER}")));
    }
    let order = e.group_order();
    budget.check(order as u128 * order as u128)?;
    let powers: Vec<f64> = fourier_coefficients(e).iter().map(|c| c.norm_sqr().powi(b as i32)).collect();
    let q = e.p.size();
    let mut counts = Vec::with_capacity(order);
    for t in 0..order {
        let tp = e.p.index_point(t, e.n);
        let mut acc = 0.0;
        for (xi, &w) in powers.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let phase = (e.p.dot(&e.p.index_point(xi, e.n), &tp) as usize) % q;
            acc += w * (2.0 * std::f64::consts::PI * phase as f64 / q as f64).cos();
        }
        let v = acc / order as f64;
        let r = v.round();
        if (v - r).abs() > 0.25 || r < 0.0 {
            return Err(Error::Usage(format!("transform value {v} at index {t} is not near an integer")));
        }
        counts.push(r as u128);
    }
    Ok(RepProfile { b, counts })
}

/// All `ξ` with `|Ê(ξ)| >= gamma |E|`, largest first (ties by index), with
/// `ξ = 0` always present.
pub fn spectrum(e: &GroupSubset, gamma: f64) -> Vec<Vec<Scalar>> {
    let coeffs = fourier_coefficients(e);
    let threshold = gamma * e.size as f64 - SPECTRUM_GUARD * (e.size as f64).max(1.0);
    let mut hits: Vec<(f64, usize)> =
        coeffs.iter().enumerate().map(|(i, c)| (c.norm(), i)).filter(|&(m, i)| i == 0 || m >= threshold).collect();
    hits.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    hits.into_iter().map(|(_, i)| e.p.index_point(i, e.n)).collect()
}

/// A subspace `U` with every element represented in `bE - bE`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BogolyubovResult {
    pub b: usize,
    #[serde(with = "subspace_basis")]
    pub subspace: Subspace,
    pub codim: usize,
    pub min_reps: u128,
    /// `min_reps / |U|^{2b-1}`.
    pub c: f64,
}

mod subspace_basis {
    use super::*;
    pub fn serialize<S: serde::Serializer>(v: &Subspace, s: S) -> std::result::Result<S::Ok, S::Error> {
        v.to_json().serialize(s)
    }
    pub fn deserialize<'de, D: serde::Deserializer<'de>>(_: D) -> std::result::Result<Subspace, D::Error> {
        Err(serde::de::Error::custom("search results are output-only"))
    }
}

/// Spectrum threshold used by the search, `sqrt(μ/2)`.
pub fn search_gamma(density: f64) -> f64 {
    (density / 2.0).sqrt()
}

/// For `b = 1..=max_b`, try the annihilators of the spans of growing
/// prefixes of the `sqrt(μ/2)`-spectrum and return the first candidate of
/// codimension at most `max_codim` whose every element has a positive
/// representation count. Each returned subspace has been checked point by
/// point against the exact counts.
pub fn bogolyubov_search(
    e: &GroupSubset,
    max_b: usize,
    max_codim: usize,
    budget: Budget,
) -> Result<Option<BogolyubovResult>> {
    if e.size == 0 {
        return Err(Error::Usage("search needs a nonempty set".into()));
    }
    let p = e.p;
    let freqs = spectrum(e, search_gamma(e.density()));
    let mut candidates: Vec<Subspace> = Vec::new();
    for k in 1..=freqs.len() {
        let forms: Vec<LinearForm> = freqs[..k].iter().map(|f| LinearForm::homogeneous(f.clone())).collect();
        let u = annihilator_subspace(p, e.n, &forms)?;
        if u.codim() > max_codim {
            break;
        }
        if candidates.last() != Some(&u) {
            candidates.push(u);
        }
    }
    for b in 1..=max_b.min(MAX_REP_ORDER) {
        let reps = rep_counts(e, b, budget)?;
        for u in &candidates {
            let min_reps = u.points(budget)?.map(|t| reps.get(p, &t)).min().unwrap_or(0);
            if min_reps > 0 {
                let c = min_reps as f64 / (u.size() as f64).powi(2 * b as i32 - 1);
                return Ok(Some(BogolyubovResult { b, subspace: u.clone(), codim: u.codim(), min_reps, c }));
            }
        }
    }
    Ok(None)
}
