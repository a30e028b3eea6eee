//! Linear algebra over F_p: row reduction, linear systems, and canonical
//! (affine) subspaces of F_p^n with deterministic point enumeration.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Budget, Error, Result};
use crate::field::{PrimeModulus, Scalar};

/// An affine-linear function `x -> coeffs . x + constant`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearForm {
    pub coeffs: Vec<Scalar>,
    #[serde(default)]
    pub constant: Scalar,
}

impl LinearForm {
    pub fn new(coeffs: Vec<Scalar>, constant: Scalar) -> Self {
        Self { coeffs, constant }
    }

    pub fn homogeneous(coeffs: Vec<Scalar>) -> Self {
        Self { coeffs, constant: 0 }
    }

    pub fn zero(n: usize) -> Self {
        Self::homogeneous(vec![0; n])
    }

    /// The coordinate function `x_i` (0-based).
    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut coeffs = vec![0; n];
        coeffs[i] = 1;
        Self::homogeneous(coeffs)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.constant == 0
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0 && self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn eval(&self, p: PrimeModulus, x: &[Scalar]) -> Scalar {
        p.add(p.dot(&self.coeffs, x), self.constant)
    }

    pub fn scale(&self, p: PrimeModulus, c: Scalar) -> Self {
        Self::new(p.scale_vec(c, &self.coeffs), p.mul(c, self.constant))
    }

    pub fn add(&self, p: PrimeModulus, other: &Self) -> Self {
        Self::new(p.add_vec(&self.coeffs, &other.coeffs), p.add(self.constant, other.constant))
    }
}

/// Reduced row echelon form of `rows` (each of length `width`), in place.
/// Returns the pivot column of each surviving row; zero rows are dropped.
pub fn rref(p: PrimeModulus, rows: &mut Vec<Vec<Scalar>>, width: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..width {
        if r == rows.len() {
            break;
        }
        let Some(found) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, found);
        let inv = p.inv(rows[r][col]);
        for v in rows[r].iter_mut() {
            *v = p.mul(*v, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[col] != 0 {
                let c = p.neg(row[col]);
                p.axpy(row, c, &pivot_row);
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank(p: PrimeModulus, rows: &[Vec<Scalar>], width: usize) -> usize {
    let mut m = rows.to_vec();
    rref(p, &mut m, width).len()
}

/// Basis of `{x : row . x = 0 for every row}`, as vectors of length `width`.
pub fn kernel(p: PrimeModulus, rows: &[Vec<Scalar>], width: usize) -> Vec<Vec<Scalar>> {
    let mut m = rows.to_vec();
    let pivots = rref(p, &mut m, width);
    let mut is_pivot = vec![false; width];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..width)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![0; width];
            v[free] = 1;
            for (row, &pc) in m.iter().zip(&pivots) {
                v[pc] = p.neg(row[free]);
            }
            v
        })
        .collect()
}

/// Solve `rows[i](x) = targets[i]` for `x` in F_p^n.
///
/// Returns `None` when the system is inconsistent, otherwise a particular
/// solution (free coordinates set to zero) and the canonical kernel.
pub fn solve_linear_system(
    p: PrimeModulus,
    n: usize,
    rows: &[LinearForm],
    targets: &[Scalar],
) -> Result<Option<(Vec<Scalar>, Subspace)>> {
    check_dim(rows.len(), targets.len())?;
    let mut aug = Vec::with_capacity(rows.len());
    for (row, &t) in rows.iter().zip(targets) {
        check_dim(n, row.dim())?;
        let mut v = row.coeffs.clone();
        v.push(p.sub(t % p.get(), row.constant));
        aug.push(v);
    }
    let pivots = rref(p, &mut aug, n + 1);
    if pivots.last() == Some(&n) {
        return Ok(None);
    }
    let mut particular = vec![0; n];
    for (row, &pc) in aug.iter().zip(&pivots) {
        particular[pc] = row[n];
    }
    let homogeneous: Vec<Vec<Scalar>> = aug.iter().map(|r| r[..n].to_vec()).collect();
    let kernel = Subspace::from_rref_unchecked(p, n, kernel(p, &homogeneous, n));
    Ok(Some((particular, kernel)))
}

/// Common kernel of homogeneous linear forms.
pub fn annihilator_subspace(p: PrimeModulus, n: usize, forms: &[LinearForm]) -> Result<Subspace> {
    for f in forms {
        check_dim(n, f.dim())?;
        if !f.is_homogeneous() {
            return Err(Error::Usage("annihilator of a non-homogeneous form".into()));
        }
    }
    let rows: Vec<Vec<Scalar>> = forms.iter().map(|f| f.coeffs.clone()).collect();
    Ok(Subspace::from_rref_unchecked(p, n, kernel(p, &rows, n)))
}

/// A linear subspace of F_p^n stored by its reduced row echelon basis, so
/// equal point sets have identical representations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    p: PrimeModulus,
    ambient: usize,
    basis: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

/// Serialized form of a subspace; the modulus comes from context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub ambient: usize,
    pub basis: Vec<Vec<Scalar>>,
}

impl Subspace {
    /// Canonicalizes any spanning set.
    pub fn span(p: PrimeModulus, n: usize, vectors: Vec<Vec<Scalar>>) -> Result<Self> {
        for v in &vectors {
            check_dim(n, v.len())?;
        }
        let vectors = vectors.into_iter().map(|v| v.into_iter().map(|c| c % p.get()).collect()).collect();
        Ok(Self::from_rref_unchecked(p, n, vectors))
    }

    fn from_rref_unchecked(p: PrimeModulus, n: usize, mut basis: Vec<Vec<Scalar>>) -> Self {
        let pivots = rref(p, &mut basis, n);
        Self { p, ambient: n, basis, pivots }
    }

    pub fn full(p: PrimeModulus, n: usize) -> Self {
        let basis = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                e
            })
            .collect();
        Self { p, ambient: n, basis, pivots: (0..n).collect() }
    }

    pub fn zero(p: PrimeModulus, n: usize) -> Self {
        Self { p, ambient: n, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_json(p: PrimeModulus, json: &SubspaceJson) -> Result<Self> {
        Self::span(p, json.ambient, json.basis.clone())
    }

    pub fn to_json(&self) -> SubspaceJson {
        SubspaceJson { ambient: self.ambient, basis: self.basis.clone() }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.p
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// Number of points, `p^dim`.
    pub fn size(&self) -> u128 {
        self.p.power_count(self.dim())
    }

    /// Reduce `x` against the basis; the result vanishes on pivot columns.
    fn reduce(&self, x: &[Scalar]) -> Vec<Scalar> {
        let mut r: Vec<Scalar> = x.iter().map(|&c| c % self.p.get()).collect();
        for (row, &pc) in self.basis.iter().zip(&self.pivots) {
            let c = self.p.neg(r[pc]);
            self.p.axpy(&mut r, c, row);
        }
        r
    }

    pub fn contains(&self, x: &[Scalar]) -> bool {
        x.len() == self.ambient && self.reduce(x).iter().all(|&c| c == 0)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// Coordinates of a member with respect to the RREF basis. For members,
    /// coordinate `j` is simply the entry at the `j`-th pivot column.
    pub fn coordinates(&self, x: &[Scalar]) -> Option<Vec<Scalar>> {
        self.contains(x).then(|| self.pivots.iter().map(|&pc| x[pc] % self.p.get()).collect())
    }

    /// The member `sum_j c_j b_j`.
    pub fn point(&self, coords: &[Scalar]) -> Vec<Scalar> {
        let mut x = vec![0; self.ambient];
        for (row, &c) in self.basis.iter().zip(coords) {
            self.p.axpy(&mut x, c, row);
        }
        x
    }

    /// Homogeneous forms whose common kernel is exactly this subspace
    /// (a basis of the annihilator).
    pub fn defining_forms(&self) -> Vec<LinearForm> {
        kernel(self.p, &self.basis, self.ambient).into_iter().map(LinearForm::homogeneous).collect()
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        check_dim(self.ambient, other.ambient)?;
        if self.p != other.p {
            return Err(Error::ModulusMismatch(self.p.get(), other.p.get()));
        }
        let mut forms = self.defining_forms();
        forms.extend(other.defining_forms());
        annihilator_subspace(self.p, self.ambient, &forms)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        check_dim(self.ambient, other.ambient)?;
        let mut vectors = self.basis.clone();
        vectors.extend(other.basis.iter().cloned());
        Subspace::span(self.p, self.ambient, vectors)
    }

    /// `{x in self : form(x) = 0 for every form}`, for homogeneous forms given
    /// by their coefficient vectors on the ambient space.
    pub fn restrict_by_forms(&self, forms: &[Vec<Scalar>]) -> Result<Subspace> {
        let rows: Vec<Vec<Scalar>> = forms
            .iter()
            .map(|f| {
                check_dim(self.ambient, f.len())?;
                Ok(self.basis.iter().map(|b| self.p.dot(f, b)).collect())
            })
            .collect::<Result<_>>()?;
        let coords = kernel(self.p, &rows, self.dim());
        Ok(self.image(&coords))
    }

    /// Map vectors given in this subspace's coordinates into the ambient space
    /// and take their span.
    pub fn image(&self, coord_vectors: &[Vec<Scalar>]) -> Subspace {
        let vectors = coord_vectors.iter().map(|c| self.point(c)).collect();
        Self::from_rref_unchecked(self.p, self.ambient, vectors)
    }

    /// Deterministic stream of all members: base-p counter over the basis
    /// coefficients, last coefficient fastest, starting at zero.
    pub fn points(&self, budget: Budget) -> Result<PointIter> {
        budget.check(self.size())?;
        Ok(PointIter::new(self.p, vec![0; self.ambient], self.basis.clone()))
    }

    /// Every subspace of F_p^n of dimension `k`, in a fixed order
    /// (by pivot set, then by free entries as a base-p counter).
    pub fn enumerate_all(p: PrimeModulus, n: usize, k: usize) -> impl Iterator<Item = Subspace> {
        combinations(n, k).flat_map(move |pivots| {
            // free slots: (row r, column c) with c > pivot r and c not a pivot
            let slots: Vec<(usize, usize)> = (0..k)
                .flat_map(|r| {
                    let pv = pivots.clone();
                    ((pv[r] + 1)..n).filter(move |c| !pv.contains(c)).map(move |c| (r, c))
                })
                .collect();
            let count = p.power_count(slots.len()) as usize;
            let pivots = pivots.clone();
            (0..count).map(move |mut idx| {
                let mut basis = vec![vec![0; n]; k];
                for (r, &pc) in pivots.iter().enumerate() {
                    basis[r][pc] = 1;
                }
                for &(r, c) in slots.iter().rev() {
                    basis[r][c] = (idx % p.size()) as Scalar;
                    idx /= p.size();
                }
                Subspace { p, ambient: n, basis, pivots: pivots.clone() }
            })
        })
    }
}

fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if next[i] < n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                current = Some(next);
                break;
            }
        }
        Some(out)
    })
}

/// `offset + direction`, with the offset canonicalized to the
/// lexicographically least member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineSubspace {
    offset: Vec<Scalar>,
    direction: Subspace,
}

impl AffineSubspace {
    pub fn new(offset: Vec<Scalar>, direction: Subspace) -> Result<Self> {
        check_dim(direction.ambient(), offset.len())?;
        // Zeroing the pivot columns yields the lexicographically least member.
        let offset = direction.reduce(&offset);
        Ok(Self { offset, direction })
    }

    pub fn linear(direction: Subspace) -> Self {
        let offset = vec![0; direction.ambient()];
        Self { offset, direction }
    }

    /// Solution set of `forms[i](x) = targets[i]`, or `None` if empty.
    pub fn from_equations(p: PrimeModulus, n: usize, forms: &[LinearForm], targets: &[Scalar]) -> Result<Option<Self>> {
        Ok(solve_linear_system(p, n, forms, targets)?.map(|(x, k)| Self::new(x, k).expect("dims agree")))
    }

    pub fn offset(&self) -> &[Scalar] {
        &self.offset
    }

    pub fn direction(&self) -> &Subspace {
        &self.direction
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.direction.modulus()
    }

    pub fn ambient(&self) -> usize {
        self.direction.ambient()
    }

    pub fn dim(&self) -> usize {
        self.direction.dim()
    }

    pub fn codim(&self) -> usize {
        self.direction.codim()
    }

    pub fn size(&self) -> u128 {
        self.direction.size()
    }

    pub fn contains(&self, x: &[Scalar]) -> bool {
        x.len() == self.ambient() && self.direction.contains(&self.modulus().sub_vec(x, &self.offset))
    }

    /// `offset + sum_j c_j b_j`.
    pub fn point(&self, coords: &[Scalar]) -> Vec<Scalar> {
        self.modulus().add_vec(&self.offset, &self.direction.point(coords))
    }

    pub fn points(&self, budget: Budget) -> Result<PointIter> {
        budget.check(self.size())?;
        Ok(PointIter::new(self.modulus(), self.offset.clone(), self.direction.basis.clone()))
    }
}

/// Odometer over basis coefficients. Each digit that changes on an
/// increment (including wrap-arounds, since `p * b = 0`) adds its basis row.
pub struct PointIter {
    p: PrimeModulus,
    point: Vec<Scalar>,
    basis: Vec<Vec<Scalar>>,
    digits: Vec<Scalar>,
    done: bool,
}

impl PointIter {
    fn new(p: PrimeModulus, start: Vec<Scalar>, basis: Vec<Vec<Scalar>>) -> Self {
        let digits = vec![0; basis.len()];
        Self { p, point: start, basis, digits, done: false }
    }
}

impl Iterator for PointIter {
    type Item = Vec<Scalar>;

    fn next(&mut self) -> Option<Vec<Scalar>> {
        if self.done {
            return None;
        }
        let out = self.point.clone();
        let mut j = self.digits.len();
        loop {
            if j == 0 {
                self.done = true;
                break;
            }
            j -= 1;
            self.p.axpy(&mut self.point, 1, &self.basis[j]);
            self.digits[j] += 1;
            if self.digits[j] < self.p.get() {
                break;
            }
            self.digits[j] = 0;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn f5() -> PrimeModulus {
        PrimeModulus::new(5).unwrap()
    }

    #[test]
    fn homogeneous_system() {
        let p = f5();
        let (x, k) = solve_linear_system(p, 2, &[LinearForm::homogeneous(vec![1, 1])], &[0]).unwrap().unwrap();
        assert_eq!(x, vec![0, 0]);
        assert_eq!(k.basis(), &[vec![1, 4]]);
    }

    #[test]
    fn inconsistent_system() {
        let p = f5();
        let rows = [LinearForm::homogeneous(vec![1]), LinearForm::homogeneous(vec![1])];
        assert_eq!(solve_linear_system(p, 1, &rows, &[1, 2]).unwrap(), None);
    }

    #[test]
    fn single_constraint_system() {
        let p = f5();
        let (x, k) = solve_linear_system(p, 3, &[LinearForm::homogeneous(vec![1, 0, 0])], &[2]).unwrap().unwrap();
        assert_eq!(x, vec![2, 0, 0]);
        assert_eq!(k.dim(), 2);
    }

    #[test]
    fn system_dimension_mismatch() {
        let p = f5();
        let err = solve_linear_system(p, 3, &[LinearForm::homogeneous(vec![1, 0])], &[0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn annihilator_examples() {
        let p = f5();
        let s = annihilator_subspace(p, 3, &[LinearForm::coordinate(3, 0), LinearForm::coordinate(3, 1)]).unwrap();
        assert_eq!(s.basis(), &[vec![0, 0, 1]]);
        assert_eq!(s.codim(), 2);
        assert_eq!(annihilator_subspace(p, 2, &[]).unwrap().codim(), 0);
        let dep = [LinearForm::homogeneous(vec![1, 0]), LinearForm::homogeneous(vec![2, 0])];
        assert_eq!(annihilator_subspace(p, 2, &dep).unwrap().codim(), 1);
        let affine = [LinearForm::new(vec![1, 0], 1)];
        assert!(matches!(annihilator_subspace(p, 2, &affine), Err(Error::Usage(_))));
    }

    #[test]
    fn intersections() {
        let p = f5();
        let a = Subspace::span(p, 2, vec![vec![1, 0]]).unwrap();
        let b = Subspace::span(p, 2, vec![vec![0, 1]]).unwrap();
        assert_eq!(a.intersect(&b).unwrap().dim(), 0);
        assert_eq!(a.intersect(&a).unwrap(), a);
        let c = Subspace::span(p, 3, vec![vec![1, 0]]);
        assert!(c.is_err());
        let c = Subspace::full(p, 3);
        assert!(a.intersect(&c).is_err());
    }

    #[test]
    fn codim_one_intersection_by_membership() {
        let p = f5();
        let s1 = annihilator_subspace(p, 3, &[LinearForm::homogeneous(vec![1, 2, 3])]).unwrap();
        let s2 = annihilator_subspace(p, 3, &[LinearForm::homogeneous(vec![4, 0, 1])]).unwrap();
        let both = s1.intersect(&s2).unwrap();
        assert_eq!(both.codim(), 2);
        let members: Vec<_> = Subspace::full(p, 3)
            .points(Budget::DEFAULT)
            .unwrap()
            .filter(|x| s1.contains(x) && s2.contains(x))
            .collect();
        assert_eq!(members.len(), 5);
        assert!(members.iter().all(|x| both.contains(x)));
    }

    #[test]
    fn enumeration_examples() {
        let p3 = PrimeModulus::new(3).unwrap();
        let pts: Vec<_> = Subspace::full(p3, 2).points(Budget::DEFAULT).unwrap().collect();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], vec![0, 0]);
        assert_eq!(pts[1], vec![0, 1]);

        let p = f5();
        let all: HashSet<_> = Subspace::full(p, 3).points(Budget::DEFAULT).unwrap().collect();
        assert_eq!(all.len(), 125);

        let line = Subspace::span(p, 2, vec![vec![0, 1]]).unwrap();
        let a = AffineSubspace::new(vec![1, 3], line).unwrap();
        assert_eq!(a.offset(), &[1, 0]);
        let pts: Vec<_> = a.points(Budget::DEFAULT).unwrap().collect();
        assert_eq!(pts.len(), 5);
        assert!(pts.iter().all(|x| x[0] == 1));
        assert_eq!(pts[0], vec![1, 0]);
    }

    #[test]
    fn budget_is_enforced() {
        let p = f5();
        let err = Subspace::full(p, 4).points(Budget(100)).err().unwrap();
        assert_eq!(err, Error::BudgetExceeded { requested: 625, budget: 100 });
    }

    #[test]
    fn full_space_order_matches_point_index() {
        let p = f5();
        for (i, x) in Subspace::full(p, 3).points(Budget::DEFAULT).unwrap().enumerate() {
            assert_eq!(p.point_index(&x), i);
        }
    }

    #[test]
    fn subspace_counts_are_gaussian_binomials() {
        let p = PrimeModulus::new(3).unwrap();
        // [4 choose 2]_3 = (3^4-1)(3^3-1)/((3^2-1)(3-1)) = 130
        let all: Vec<_> = Subspace::enumerate_all(p, 4, 2).collect();
        assert_eq!(all.len(), 130);
        let distinct: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(distinct.len(), 130);
        assert!(all.iter().all(|s| s.dim() == 2));
        assert_eq!(Subspace::enumerate_all(p, 3, 0).count(), 1);
        assert_eq!(Subspace::enumerate_all(p, 3, 3).count(), 1);
    }

    #[test]
    fn restrict_by_forms_matches_intersection() {
        let p = f5();
        let v = Subspace::span(p, 3, vec![vec![1, 2, 0], vec![0, 1, 1]]).unwrap();
        let form = vec![1, 1, 1];
        let a = v.restrict_by_forms(std::slice::from_ref(&form)).unwrap();
        let b = v.intersect(&annihilator_subspace(p, 3, &[LinearForm::homogeneous(form)]).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
