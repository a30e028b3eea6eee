//! Text form `3*x1^2*x2 + 4*x3 + 2` and the JSON term-list form.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Monomial, Polynomial};
use crate::error::{Error, Result};
use crate::field::{PrimeModulus, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coef: Scalar,
    pub exps: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub p: PrimeModulus,
    pub n: usize,
    pub terms: Vec<TermJson>,
}

impl From<&Polynomial> for PolynomialJson {
    fn from(f: &Polynomial) -> Self {
        let terms = f
            .terms()
            .rev()
            .map(|(m, c)| TermJson { coef: c, exps: m.exps().iter().map(|&e| e as u32).collect() })
            .collect();
        Self { p: f.modulus(), n: f.num_vars(), terms }
    }
}

impl TryFrom<PolynomialJson> for Polynomial {
    type Error = Error;
    fn try_from(j: PolynomialJson) -> Result<Self> {
        Polynomial::from_terms(j.p, j.n, j.terms.into_iter().map(|t| (t.coef, t.exps)))
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolynomialJson::deserialize(d)?;
        Polynomial::try_from(j).map_err(serde::de::Error::custom)
    }
}

impl Polynomial {
    /// Parse a sum of terms such as `3*x1^2*x2 - x3 + 4`. Variables are
    /// 1-based; coefficients are reduced mod `p`.
    pub fn parse(p: PrimeModulus, n: usize, text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut f = Polynomial::zero(p, n);
        let mut rest = compact.as_str();
        let mut first = true;
        while !rest.is_empty() {
            let negative = match rest.as_bytes()[0] {
                b'+' => {
                    rest = &rest[1..];
                    false
                }
                b'-' => {
                    rest = &rest[1..];
                    true
                }
                _ if first => false,
                _ => return Err(Error::Parse(format!("expected '+' or '-' before {rest:?}"))),
            };
            first = false;
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let (term, tail) = rest.split_at(end);
            let (coef, mono) = parse_term(p, n, term)?;
            f.add_term(mono, if negative { p.neg(coef) } else { coef });
            rest = tail;
        }
        Ok(f)
    }
}

fn parse_term(p: PrimeModulus, n: usize, term: &str) -> Result<(Scalar, Monomial)> {
    if term.is_empty() {
        return Err(Error::Parse("empty term".into()));
    }
    let mut coef: Scalar = 1;
    let mut exps = vec![0u32; n];
    for factor in term.split('*') {
        if let Some(var) = factor.strip_prefix('x') {
            let (idx, exp) = match var.split_once('^') {
                Some((i, e)) => (i, parse_int(e)?),
                None => (var, 1),
            };
            let idx = parse_int(idx)? as usize;
            if idx == 0 || idx > n {
                return Err(Error::Parse(format!("variable x{idx} outside x1..x{n}")));
            }
            exps[idx - 1] += exp as u32;
        } else {
            coef = p.mul(coef, (parse_int(factor)? % p.get() as u64) as Scalar);
        }
    }
    let mono = Monomial::new(exps.into_iter().map(|e| super::reduce_exp(e, p)).collect());
    Ok((coef, mono))
}

fn parse_int(s: &str) -> Result<u64> {
    s.parse::<u64>().map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = m
                .exps()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, e) })
                .collect();
            match (c, vars.is_empty()) {
                (_, true) => write!(f, "{c}")?,
                (1, false) => write!(f, "{}", vars.join("*"))?,
                (_, false) => write!(f, "{c}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> PrimeModulus {
        PrimeModulus::new(5).unwrap()
    }

    #[test]
    fn parse_and_print() {
        let f = Polynomial::parse(f5(), 3, "3*x1^2*x2 + 4*x3").unwrap();
        assert_eq!(f.to_string(), "3*x1^2*x2 + 4*x3");
        let g = Polynomial::parse(f5(), 2, "x1*x2 - x1 + 7").unwrap();
        assert_eq!(g.to_string(), "x1*x2 + 4*x1 + 2");
        assert_eq!(Polynomial::zero(f5(), 2).to_string(), "0");
        assert_eq!(Polynomial::parse(f5(), 2, "x1 - x1").unwrap().to_string(), "0");
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "x0", "x3", "2*y1", "x1 ++ x2", "x1^", "3x1"] {
            assert!(Polynomial::parse(f5(), 2, bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn json_form() {
        let f = Polynomial::parse(f5(), 4, "3*x1^2*x2").unwrap();
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(v, serde_json::json!({"p":5,"n":4,"terms":[{"coef":3,"exps":[2,1,0,0]}]}));
        let back: Polynomial = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
        let bad = serde_json::json!({"p":6,"n":1,"terms":[]});
        assert!(serde_json::from_value::<Polynomial>(bad).is_err());
    }
}
