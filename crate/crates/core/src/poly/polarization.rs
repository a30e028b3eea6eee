use crate::field::{PrimeModulus, Scalar};

/// A dense multilinear form `(F_p^n)^order -> F_p`, stored as its coefficient
/// tensor in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearForm {
    p: PrimeModulus,
    n: usize,
    order: usize,
    coeffs: Vec<Scalar>,
}

impl MultilinearForm {
    pub fn zero(p: PrimeModulus, n: usize, order: usize) -> Self {
        Self { p, n, order, coeffs: vec![0; n.pow(order as u32)] }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub(crate) fn add_at(&mut self, idx: &[usize], c: Scalar) {
        let flat = idx.iter().fold(0, |acc, &i| acc * self.n + i);
        self.coeffs[flat] = self.p.add(self.coeffs[flat], c);
    }

    /// Fix the last argument to `v`, giving a form of one lower order.
    pub fn contract_last(&self, v: &[Scalar]) -> MultilinearForm {
        assert!(self.order > 0, "cannot contract a scalar");
        let p = self.p;
        let coeffs = self.coeffs.chunks(self.n).map(|chunk| p.dot(chunk, v)).collect();
        Self { p, n: self.n, order: self.order - 1, coeffs }
    }

    /// The value of an order-0 form.
    pub fn scalar(&self) -> Scalar {
        assert_eq!(self.order, 0);
        self.coeffs[0]
    }

    /// Full evaluation `D(args[0], ..., args[order-1])`.
    pub fn eval(&self, args: &[&[Scalar]]) -> Scalar {
        assert_eq!(args.len(), self.order);
        args.iter().rev().fold(self.clone(), |f, v| f.contract_last(v)).scalar()
    }
}
