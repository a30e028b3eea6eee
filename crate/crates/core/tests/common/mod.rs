#![allow(dead_code)]

use biasrank::quadform::QuadraticPoly;
use biasrank::{Polynomial, PrimeModulus, Scalar};
use proptest::prelude::*;

pub fn modulus() -> impl Strategy<Value = PrimeModulus> {
    prop::sample::select(vec![3u32, 5, 7]).prop_map(|p| PrimeModulus::new(p).unwrap())
}

/// Random polynomial with up to `terms` terms of total degree at most `deg`.
pub fn polynomial(p: PrimeModulus, n: usize, deg: u32, terms: usize) -> impl Strategy<Value = Polynomial> {
    let term = (0..p.get(), prop::collection::vec(0..=deg, n));
    prop::collection::vec(term, 0..=terms).prop_map(move |ts| {
        let ts = ts.into_iter().map(|(c, mut e)| {
            // keep the total degree within bound
            while e.iter().sum::<u32>() > deg {
                let i = e.iter().position(|&x| x > 0).unwrap();
                e[i] -= 1;
            }
            (c, e)
        });
        Polynomial::from_terms(p, n, ts).unwrap()
    })
}

pub fn point(p: PrimeModulus, n: usize) -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec(0..p.get(), n)
}

pub fn quadratic(p: PrimeModulus, n: usize) -> impl Strategy<Value = QuadraticPoly> {
    (prop::collection::vec(prop::collection::vec(0..p.get(), n), n), point(p, n), 0..p.get())
        .prop_map(move |(g, l, c)| QuadraticPoly::from_parts(p, &g, l, c).unwrap())
}

pub fn matrix(p: PrimeModulus, n: usize) -> impl Strategy<Value = Vec<Vec<Scalar>>> {
    prop::collection::vec(point(p, n), n)
}

/// `x -> f(A x)`.
pub fn substitute(f: &Polynomial, a: &[Vec<Scalar>]) -> Polynomial {
    let p = f.modulus();
    let n = f.num_vars();
    let subs: Vec<Polynomial> =
        a.iter().map(|row| Polynomial::from_linear(p, &biasrank::LinearForm::homogeneous(row.clone()))).collect();
    assert_eq!(subs.len(), n);
    f.compose(&subs).unwrap()
}
