//! Rational linear combinations of products of traces of cycles.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::field::Field;
use crate::paths::{eval_cycle, CyclePath};
use crate::quiver::Quiver;
use crate::rep::RepPoint;

/// A multiset of cycles, kept sorted so equal products compare equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraceMonomial(Vec<CyclePath>);

impl TraceMonomial {
    pub fn one() -> Self {
        TraceMonomial(Vec::new())
    }

    pub fn new(mut factors: Vec<CyclePath>) -> Self {
        factors.sort();
        TraceMonomial(factors)
    }

    pub fn factors(&self) -> &[CyclePath] {
        &self.0
    }

    pub fn mul(&self, other: &Self) -> Self {
        TraceMonomial::new(self.0.iter().chain(&other.0).cloned().collect())
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(CyclePath::len).sum()
    }

    pub fn multidegree(&self, arrows: usize) -> Vec<usize> {
        let mut d = vec![0; arrows];
        for c in &self.0 {
            for (k, x) in c.degree(arrows).into_iter().enumerate() {
                d[k] += x;
            }
        }
        d
    }

    /// `(a)^2 (c b)`, or `1` for the empty product.
    pub fn display(&self, q: &Quiver) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        grouped(&self.0)
            .map(|(c, k)| if k == 1 { c.display(q) } else { format!("{}^{k}", c.display(q)) })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn latex(&self, q: &Quiver) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        grouped(&self.0)
            .map(|(c, k)| if k == 1 { c.latex(q) } else { format!("{}^{{{k}}}", c.latex(q)) })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn grouped(factors: &[CyclePath]) -> impl Iterator<Item = (&CyclePath, usize)> {
    let mut out: Vec<(&CyclePath, usize)> = Vec::new();
    for c in factors {
        match out.last_mut() {
            Some((last, k)) if *last == c => *k += 1,
            _ => out.push((c, 1)),
        }
    }
    out.into_iter()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TraceExpression {
    terms: BTreeMap<TraceMonomial, BigRational>,
}

impl TraceExpression {
    pub fn zero() -> Self {
        TraceExpression::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut e = TraceExpression::zero();
        e.add_term(TraceMonomial::one(), c);
        e
    }

    pub fn cycle(c: CyclePath) -> Self {
        TraceExpression::monomial(TraceMonomial::new(vec![c]), BigRational::one())
    }

    pub fn monomial(m: TraceMonomial, c: BigRational) -> Self {
        let mut e = TraceExpression::zero();
        e.add_term(m, c);
        e
    }

    pub fn add_term(&mut self, m: TraceMonomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<TraceMonomial, BigRational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return TraceExpression::zero();
        }
        TraceExpression { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = TraceExpression::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    /// Part of total degree `k`.
    pub fn component(&self, k: usize) -> Self {
        TraceExpression {
            terms: self.terms.iter().filter(|(m, _)| m.degree() == k).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Distinct multidegrees of the terms.
    pub fn multidegrees(&self, arrows: usize) -> Vec<Vec<usize>> {
        let mut v: Vec<Vec<usize>> = self.terms.keys().map(|m| m.multidegree(arrows)).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Distinct cycles occurring in any term.
    pub fn cycles(&self) -> Vec<&CyclePath> {
        let mut v: Vec<&CyclePath> = self.terms.keys().flat_map(|m| m.factors()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn eval<F: Field>(&self, field: &F, p: &RepPoint<F::Elem>) -> Result<F::Elem, Error> {
        let mut cache = HashMap::new();
        self.eval_cached(field, p, &mut cache)
    }

    /// Evaluation reusing traces already computed for `p`.
    pub fn eval_cached<F: Field>(
        &self,
        field: &F,
        p: &RepPoint<F::Elem>,
        cache: &mut HashMap<CyclePath, F::Elem>,
    ) -> Result<F::Elem, Error> {
        let mut acc = field.zero();
        for (m, c) in &self.terms {
            let mut term = field.from_rational(c)?;
            for factor in m.factors() {
                let v = match cache.get(factor) {
                    Some(v) => v.clone(),
                    None => {
                        let v = eval_cycle(field, factor, p)?;
                        cache.insert(factor.clone(), v.clone());
                        v
                    }
                };
                term = field.mul(&term, &v);
            }
            acc = field.add(&acc, &term);
        }
        Ok(acc)
    }

    /// Denominators of the coefficients.
    pub fn denominators(&self) -> Vec<num_bigint::BigInt> {
        self.terms.values().map(|c| c.denom().clone()).collect()
    }

    pub fn display(&self, q: &Quiver) -> String {
        render(self, |m| m.display(q), |c| c.to_string(), " ")
    }

    pub fn latex(&self, q: &Quiver) -> String {
        render(
            self,
            |m| m.latex(q),
            |c| {
                if c.is_integer() {
                    c.to_string()
                } else {
                    format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
                }
            },
            " ",
        )
    }
}

fn render(
    e: &TraceExpression,
    mono: impl Fn(&TraceMonomial) -> String,
    coef: impl Fn(&BigRational) -> String,
    sep: &str,
) -> String {
    if e.terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in e.terms.iter().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let body = mono(m);
        if m.factors().is_empty() {
            out.push_str(&coef(&abs));
        } else if abs.is_one() {
            out.push_str(&body);
        } else {
            out.push_str(&coef(&abs));
            out.push_str(sep);
            out.push_str(&body);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::quiver::DimensionVector;
    use crate::rep::random_rep;

    fn q1() -> Quiver {
        Quiver::loops(2)
    }

    fn cyc(q: &Quiver, t: &str) -> TraceExpression {
        TraceExpression::cycle(CyclePath::parse(q, t).unwrap())
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn merging_and_cancellation() {
        let q = q1();
        let e = cyc(&q, "(a1)").add(&cyc(&q, "(a1)"));
        assert_eq!(e.terms().values().next().unwrap(), &rat(2, 1));
        assert!(e.sub(&e).is_zero());
        let sq = cyc(&q, "(a1)").mul(&cyc(&q, "(a1)"));
        assert_eq!(sq.display(&q), "(a1)^2");
        let mixed = sq.scale(&rat(1, 2)).sub(&cyc(&q, "(a1 a1)").scale(&rat(1, 2)));
        assert_eq!(mixed.display(&q), "1/2 (a1)^2 - 1/2 (a1 a1)");
        assert!(mixed.latex(&q).contains("\\frac{1}{2}"));
        assert_eq!(TraceExpression::zero().display(&q), "0");
        assert_eq!(TraceExpression::constant(rat(-3, 1)).display(&q), "-3");
    }

    #[test]
    fn evaluation_is_linear_and_multiplicative() {
        let f = PrimeField::mersenne61();
        let q = q1();
        let dv = DimensionVector::uniform(&q, 3);
        let e1 = cyc(&q, "(a1 a2)").scale(&rat(3, 7));
        let e2 = cyc(&q, "(a2)").mul(&cyc(&q, "(a1 a1 a2)"));
        for seed in 0..20 {
            let p = random_rep(&f, &q, &dv, seed);
            let v1 = e1.eval(&f, &p).unwrap();
            let v2 = e2.eval(&f, &p).unwrap();
            assert_eq!(e1.add(&e2).eval(&f, &p).unwrap(), f.add(&v1, &v2));
            assert_eq!(e1.mul(&e2).eval(&f, &p).unwrap(), f.mul(&v1, &v2));
        }
        assert_eq!(TraceExpression::zero().eval(&f, &random_rep(&f, &q, &dv, 0)).unwrap(), f.zero());
    }

    #[test]
    fn degrees() {
        let q = q1();
        let e = cyc(&q, "(a1 a2)").mul(&cyc(&q, "(a2)")).add(&cyc(&q, "(a1)"));
        assert_eq!(e.multidegrees(2), vec![vec![1, 0], vec![1, 2]]);
        assert_eq!(e.component(3).len(), 1);
        assert_eq!(e.cycles().len(), 3);
    }
}
