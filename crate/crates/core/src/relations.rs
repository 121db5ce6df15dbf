//! Substituting path elements into universal trace expressions, and the
//! randomized verification harness.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, TraceError};
use crate::expr::{TraceExpression, TraceMonomial};
use crate::field::Field;
use crate::generators::sigma_rs;
use crate::hat::Multidegree;
use crate::matrix::Matrix;
use crate::paths::{enumerate_cycles, is_closed, path_product, render_steps, CyclePath};
use crate::quiver::{DVertex, DimensionVector, PathStep, Quiver};
use crate::rep::{act, derive_seed, random_group_with, random_rep_with, rng_for, RepPoint};
use crate::word;

/// Source of a nonempty path in product order: the origin of its last step.
pub fn path_source(q: &Quiver, steps: &[PathStep]) -> DVertex {
    q.step_source(*steps.last().expect("nonempty path"))
}

/// Target of a nonempty path in product order: the end of its first step.
pub fn path_target(q: &Quiver, steps: &[PathStep]) -> DVertex {
    q.step_target(steps[0])
}

fn composable(q: &Quiver, steps: &[PathStep]) -> bool {
    steps.windows(2).all(|w| q.step_source(w[0]) == q.step_target(w[1]))
}

/// Linear combination of nonempty paths sharing origin and end.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathElement {
    source: DVertex,
    target: DVertex,
    terms: BTreeMap<Vec<PathStep>, BigRational>,
}

impl PathElement {
    pub fn new(q: &Quiver, terms: Vec<(Vec<PathStep>, BigRational)>) -> Result<Self, TraceError> {
        let mut ends = None;
        let mut merged: BTreeMap<Vec<PathStep>, BigRational> = BTreeMap::new();
        for (steps, c) in terms {
            if steps.is_empty() {
                return Err(TraceError::Substitution("paths must have nonzero degree".into()));
            }
            if steps.iter().any(|s| s.arrow >= q.arrows().len()) || !composable(q, &steps) {
                return Err(TraceError::Substitution(format!("{} is not a path", render_steps(q, &steps))));
            }
            let e = (path_source(q, &steps), path_target(q, &steps));
            if *ends.get_or_insert(e) != e {
                return Err(TraceError::Substitution(format!(
                    "{} does not share the endpoints of the other terms",
                    render_steps(q, &steps)
                )));
            }
            *merged.entry(steps).or_insert_with(BigRational::zero) += c;
        }
        merged.retain(|_, c| !c.is_zero());
        let (source, target) =
            ends.ok_or_else(|| TraceError::Substitution("empty path element".into()))?;
        if merged.is_empty() {
            return Err(TraceError::Substitution("path element cancels to zero".into()));
        }
        Ok(PathElement { source, target, terms: merged })
    }

    pub fn path(q: &Quiver, steps: Vec<PathStep>) -> Result<Self, TraceError> {
        PathElement::new(q, vec![(steps, BigRational::one())])
    }

    /// Parses `a + 2 (c b) - 1/2 (c ~b)`; a bare token is a one-step path.
    pub fn parse(q: &Quiver, text: &str) -> Result<Self, TraceError> {
        let bad = |m: &str| TraceError::Substitution(format!("cannot parse `{text}`: {m}"));
        let mut terms = Vec::new();
        let mut rest = text.trim();
        let mut sign = BigRational::one();
        let mut first = true;
        while !rest.is_empty() {
            if let Some(r) = rest.strip_prefix('+') {
                rest = r.trim_start();
                sign = BigRational::one();
            } else if let Some(r) = rest.strip_prefix('-') {
                rest = r.trim_start();
                sign = -BigRational::one();
            } else if !first {
                return Err(bad("expected `+` or `-`"));
            }
            first = false;
            let num_end = rest.find(|c: char| !(c.is_ascii_digit() || c == '/')).unwrap_or(rest.len());
            let coef = if num_end > 0 {
                let s = &rest[..num_end];
                let c = match s.split_once('/') {
                    Some((n, d)) => {
                        let n: BigInt = n.parse().map_err(|_| bad("bad numerator"))?;
                        let d: BigInt = d.parse().map_err(|_| bad("bad denominator"))?;
                        if d.is_zero() {
                            return Err(bad("zero denominator"));
                        }
                        BigRational::new(n, d)
                    }
                    None => BigRational::from_integer(s.parse().map_err(|_| bad("bad coefficient"))?),
                };
                rest = rest[num_end..].trim_start();
                c
            } else {
                BigRational::one()
            };
            let (body, after) = if let Some(r) = rest.strip_prefix('(') {
                let close = r.find(')').ok_or_else(|| bad("unclosed path"))?;
                (&r[..close], &r[close + 1..])
            } else {
                let end = rest.find(|c: char| c.is_whitespace() || c == '+' || c == '-').unwrap_or(rest.len());
                (&rest[..end], &rest[end..])
            };
            let steps = body
                .split_whitespace()
                .map(|tok| {
                    let (bar, id) = match tok.strip_prefix('~') {
                        Some(id) => (true, id),
                        None => (false, tok),
                    };
                    q.arrow_index(id).map(|arrow| PathStep { arrow, bar }).map_err(|e| bad(&e.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            terms.push((steps, &sign * coef));
            rest = after.trim_start();
        }
        PathElement::new(q, terms)
    }

    pub fn source(&self) -> DVertex {
        self.source
    }

    pub fn target(&self) -> DVertex {
        self.target
    }

    pub fn is_closed(&self) -> bool {
        self.source == self.target
    }

    pub fn terms(&self) -> &BTreeMap<Vec<PathStep>, BigRational> {
        &self.terms
    }

    /// Transposed element: every path reversed with bars toggled.
    pub fn involution(&self, q: &Quiver) -> PathElement {
        PathElement {
            source: q.star(self.target),
            target: q.star(self.source),
            terms: self.terms.iter().map(|(p, c)| (word::involute(p), c.clone())).collect(),
        }
    }

    /// The matrix `Σ c_p Y(p)` at a point.
    pub fn eval_matrix<F: Field>(&self, field: &F, p: &RepPoint<F::Elem>) -> Result<Matrix<F::Elem>, Error> {
        let mut acc: Option<Matrix<F::Elem>> = None;
        for (path, c) in &self.terms {
            let m = path_product(field, p, path)?.scale(&field.from_rational(c)?, field);
            acc = Some(match acc {
                None => m,
                Some(a) => a.add(&m, field)?,
            });
        }
        Ok(acc.expect("nonempty element"))
    }

    pub fn display(&self, q: &Quiver) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(p, c)| if c.is_one() { render_steps(q, p) } else { format!("{c} {}", render_steps(q, p)) })
            .collect();
        parts.join(" + ")
    }
}

/// Images of the arrows of a source quiver as path elements of a target quiver.
#[derive(Clone, Debug)]
pub struct Substitution<'a> {
    pub target: &'a Quiver,
    pub images: Vec<Option<PathElement>>,
}

impl<'a> Substitution<'a> {
    pub fn new(target: &'a Quiver, images: Vec<Option<PathElement>>) -> Self {
        Substitution { target, images }
    }

    fn step_image(&self, s: PathStep) -> Result<PathElement, TraceError> {
        let img = self
            .images
            .get(s.arrow)
            .and_then(Option::as_ref)
            .ok_or_else(|| TraceError::Substitution(format!("no image for arrow {}", s.arrow)))?;
        Ok(if s.bar { img.involution(self.target) } else { img.clone() })
    }

    /// Expansion of one trace factor into traces on the target quiver.
    pub fn expand_cycle(&self, c: &CyclePath) -> Result<TraceExpression, TraceError> {
        let mut partial: Vec<(Vec<PathStep>, BigRational)> = vec![(Vec::new(), BigRational::one())];
        for &s in c.steps() {
            let img = self.step_image(s)?;
            let mut next = Vec::with_capacity(partial.len() * img.terms.len());
            for (p, c0) in &partial {
                for (q, c1) in &img.terms {
                    let mut path = p.clone();
                    path.extend_from_slice(q);
                    next.push((path, c0 * c1));
                }
            }
            partial = next;
        }
        let mut out = TraceExpression::zero();
        for (path, coef) in partial {
            if !is_closed(self.target, &path) {
                return Err(TraceError::Substitution(format!(
                    "image {} of a cycle is not closed",
                    render_steps(self.target, &path)
                )));
            }
            out.add_term(TraceMonomial::new(vec![CyclePath::new(self.target, path)?]), coef);
        }
        Ok(out)
    }

    pub fn apply(&self, e: &TraceExpression) -> Result<TraceExpression, TraceError> {
        let mut cache: HashMap<&CyclePath, TraceExpression> = HashMap::new();
        let mut out = TraceExpression::zero();
        for (m, c) in e.terms() {
            let mut acc = TraceExpression::constant(c.clone());
            for factor in m.factors() {
                if !cache.contains_key(factor) {
                    cache.insert(factor, self.expand_cycle(factor)?);
                }
                acc = acc.mul(&cache[factor]);
            }
            out.add_assign(&acc);
        }
        Ok(out)
    }
}

fn check_head(q: &Quiver, u: DVertex) -> Result<(), TraceError> {
    match u {
        DVertex::Base(v) if !q.is_starred(v) => Ok(()),
        _ => Err(TraceError::Substitution(format!("{u:?} is neither an ordinary vertex nor a pair head"))),
    }
}

/// `σ_r(f)` for a path element `f` closed at an ordinary vertex or pair head.
pub fn substitute_sigma_r(q: &Quiver, f: &PathElement, r: usize, cap: usize) -> Result<TraceExpression, TraceError> {
    if !f.is_closed() {
        return Err(TraceError::Substitution("f must be closed".into()));
    }
    check_head(q, f.source())?;
    let universal = sigma_rs(r, 0, cap)?;
    Substitution::new(q, vec![Some(f.clone()), None, None]).apply(&universal)
}

/// `σ_{r,s}(f1, f2, f3)`: `f1` closed at `u`, `f2` from `u` to its partner, `f3` back.
pub fn substitute_sigma_rs(
    q: &Quiver,
    f1: Option<&PathElement>,
    f2: Option<&PathElement>,
    f3: Option<&PathElement>,
    r: usize,
    s: usize,
    cap: usize,
) -> Result<TraceExpression, TraceError> {
    let t = r.checked_sub(2 * s).ok_or(TraceError::BadDegrees { r, s })?;
    let need = |f: Option<&PathElement>, used: bool, name: &str| -> Result<Option<PathElement>, TraceError> {
        match (f, used) {
            (Some(f), _) => Ok(Some(f.clone())),
            (None, false) => Ok(None),
            (None, true) => Err(TraceError::Substitution(format!("{name} is required"))),
        }
    };
    let (g1, g2, g3) = (need(f1, t > 0, "f1")?, need(f2, s > 0, "f2")?, need(f3, s > 0, "f3")?);
    let u = g1
        .as_ref()
        .map(|f| f.source())
        .or_else(|| g2.as_ref().map(|f| f.source()))
        .ok_or_else(|| TraceError::Substitution("nothing to substitute".into()))?;
    check_head(q, u)?;
    let partner = q.star(u);
    let bad = |name: &str, f: &PathElement, from: DVertex, to: DVertex| {
        TraceError::Substitution(format!(
            "{name} passes {:?} -> {:?}, expected {from:?} -> {to:?}",
            f.source(),
            f.target()
        ))
    };
    if let Some(f) = &g1 {
        if f.source() != u || f.target() != u {
            return Err(bad("f1", f, u, u));
        }
    }
    if let Some(f) = &g2 {
        if f.source() != u || f.target() != partner {
            return Err(bad("f2", f, u, partner));
        }
    }
    if let Some(f) = &g3 {
        if f.source() != partner || f.target() != u {
            return Err(bad("f3", f, partner, u));
        }
    }
    let universal = sigma_rs(r, s, cap)?;
    Substitution::new(q, vec![g1, g2, g3]).apply(&universal)
}

/// Paths of length `1..=max_len` from `from` to `to`, in product order.
pub fn paths_between(q: &Quiver, from: DVertex, to: DVertex, max_len: usize) -> Vec<Vec<PathStep>> {
    let steps = q.doubled().steps();
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<PathStep>> = steps.iter().filter(|s| q.step_source(**s) == from).map(|s| vec![*s]).collect();
    for _ in 0..max_len {
        let mut next = Vec::new();
        for p in frontier {
            if path_target(q, &p) == to {
                out.push(p.clone());
            }
            let head = path_target(q, &p);
            for &s in &steps {
                if q.step_source(s) == head {
                    let mut longer = vec![s];
                    longer.extend_from_slice(&p);
                    next.push(longer);
                }
            }
        }
        frontier = next;
    }
    out
}

/// Report outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    AllZero,
    Counterexample,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub trial: usize,
    /// Found again with entries in `{-1, 0, 1}`.
    pub shrunk: bool,
    pub value: String,
    pub point: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub expr: String,
    pub trials: usize,
    pub field: String,
    pub seed: u64,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Schwartz-Zippel bound for one trial missing a nonzero polynomial.
    pub prob_bound: f64,
    /// `log2` of the bound for all trials missing it.
    pub prob_bound_log2_total: f64,
    pub ms: u128,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::AllZero
    }

    /// The report without its timing field, for reproducibility comparisons.
    pub fn to_json_stable(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v.as_object_mut().expect("object").remove("ms");
        v
    }
}

fn bounds(degree: usize, sample_space: f64, trials: usize) -> (f64, f64) {
    let p = (degree as f64 / sample_space).min(1.0);
    let log = if p == 0.0 { f64::NEG_INFINITY } else { trials as f64 * p.log2() };
    (p, log)
}

fn point_strings<E: std::fmt::Display + Clone + PartialEq>(
    q: &Quiver,
    p: &RepPoint<E>,
) -> BTreeMap<String, Vec<Vec<String>>> {
    q.arrows()
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let m: &Matrix<E> = p.matrix(k);
            (a.id.clone(), m.row_vecs().into_iter().map(|r| r.iter().map(E::to_string).collect()).collect())
        })
        .collect()
}

const SHRINK_ATTEMPTS: u64 = 64;

/// First trial index whose point makes `test` return a nonzero value.
fn first_failure<F: Field>(
    field: &F,
    q: &Quiver,
    dv: &DimensionVector,
    trials: usize,
    seed: u64,
    test: &(dyn Fn(&RepPoint<F::Elem>, u64) -> Result<F::Elem, Error> + Sync),
) -> Result<Option<(usize, RepPoint<F::Elem>, F::Elem, bool)>, Error> {
    let found = (0..trials)
        .into_par_iter()
        .map(|k| {
            let trial_seed = derive_seed(seed, k as u64);
            let p = random_rep_with(field, q, dv, &mut rng_for(trial_seed), false);
            let v = test(&p, trial_seed)?;
            Ok(if field.is_zero(&v) { None } else { Some((k, p, v)) })
        })
        .collect::<Result<Vec<_>, Error>>()?
        .into_iter()
        .flatten()
        .next();
    let Some((k, p, v)) = found else {
        return Ok(None);
    };
    for j in 0..SHRINK_ATTEMPTS {
        let small_seed = derive_seed(seed ^ 0x5348_5249_4e4b, j);
        let sp = random_rep_with(field, q, dv, &mut rng_for(small_seed), true);
        let sv = test(&sp, small_seed)?;
        if !field.is_zero(&sv) {
            return Ok(Some((k, sp, sv, true)));
        }
    }
    Ok(Some((k, p, v, false)))
}

fn max_degree(e: &TraceExpression) -> usize {
    e.terms().keys().map(TraceMonomial::degree).max().unwrap_or(0)
}

/// Evaluates `e` at `trials` random points.
pub fn verify_vanishing<F: Field>(
    field: &F,
    q: &Quiver,
    e: &TraceExpression,
    dv: &DimensionVector,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport, Error> {
    let start = Instant::now();
    let test = |p: &RepPoint<F::Elem>, _: u64| e.eval(field, p);
    let fail = first_failure(field, q, dv, trials, seed, &test)?;
    let (prob_bound, total) = bounds(max_degree(e), field.sample_space(), trials);
    Ok(report(field, q, e, trials, seed, fail, prob_bound, total, start))
}

/// Compares `e` at `p` and at `g·p` for random `p` and `g`.
pub fn verify_invariance<F: Field>(
    field: &F,
    q: &Quiver,
    e: &TraceExpression,
    dv: &DimensionVector,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport, Error> {
    let start = Instant::now();
    let test = |p: &RepPoint<F::Elem>, trial_seed: u64| -> Result<F::Elem, Error> {
        let mut rng = rng_for(derive_seed(trial_seed, 0x6163_74));
        let g = random_group_with(field, q, dv, &mut rng)?;
        let moved = act(field, q, p, &g)?;
        Ok(field.sub(&e.eval(field, &moved)?, &e.eval(field, p)?))
    };
    let fail = first_failure(field, q, dv, trials, seed, &test)?;
    let degree = 4 * max_degree(e) * dv.max().max(1);
    let (prob_bound, total) = bounds(degree, field.sample_space(), trials);
    Ok(report(field, q, e, trials, seed, fail, prob_bound, total, start))
}

#[allow(clippy::too_many_arguments)]
fn report<F: Field>(
    field: &F,
    q: &Quiver,
    e: &TraceExpression,
    trials: usize,
    seed: u64,
    fail: Option<(usize, RepPoint<F::Elem>, F::Elem, bool)>,
    prob_bound: f64,
    total: f64,
    start: Instant,
) -> VerificationReport {
    let (outcome, witness) = match fail {
        None => (Outcome::AllZero, None),
        Some((trial, p, v, shrunk)) => (
            Outcome::Counterexample,
            Some(Witness { trial, shrunk, value: v.to_string(), point: point_strings(q, &p) }),
        ),
    };
    VerificationReport {
        expr: e.display(q),
        trials,
        field: field.describe(),
        seed,
        outcome,
        witness,
        prob_bound,
        prob_bound_log2_total: total,
        ms: start.elapsed().as_millis(),
    }
}

/// All products of cycles with multidegree exactly `rbar`.
pub fn monomials_of_degree(q: &Quiver, rbar: &Multidegree) -> Vec<TraceMonomial> {
    if rbar.totals(q).is_err() {
        return Vec::new();
    }
    let r = rbar.total();
    if r == 0 {
        return vec![TraceMonomial::one()];
    }
    let arrows = q.arrows().len();
    let cycles: Vec<(CyclePath, Vec<usize>)> = enumerate_cycles(q, r, None)
        .into_iter()
        .map(|c| {
            let d = c.degree(arrows);
            (c, d)
        })
        .filter(|(_, d)| d.iter().zip(&rbar.0).all(|(x, y)| x <= y))
        .collect();
    let mut out = Vec::new();
    fn rec(
        cycles: &[(CyclePath, Vec<usize>)],
        from: usize,
        remaining: &mut Vec<usize>,
        chosen: &mut Vec<CyclePath>,
        out: &mut Vec<TraceMonomial>,
    ) {
        if remaining.iter().all(|&x| x == 0) {
            out.push(TraceMonomial::new(chosen.clone()));
            return;
        }
        for k in from..cycles.len() {
            let (c, d) = &cycles[k];
            if d.iter().zip(remaining.iter()).all(|(x, y)| x <= y) {
                for (x, y) in d.iter().zip(remaining.iter_mut()) {
                    *y -= x;
                }
                chosen.push(c.clone());
                rec(cycles, k, remaining, chosen, out);
                chosen.pop();
                for (x, y) in d.iter().zip(remaining.iter_mut()) {
                    *y += x;
                }
            }
        }
    }
    rec(&cycles, 0, &mut rbar.0.clone(), &mut Vec::new(), &mut out);
    out
}

/// Rank of the matrix of values of all multidegree-`rbar` monomials at
/// `sample_points` random points: a lower bound for the dimension of that
/// graded component of the invariant algebra.
pub fn graded_span_dimension<F: Field>(
    field: &F,
    q: &Quiver,
    dv: &DimensionVector,
    rbar: &Multidegree,
    sample_points: usize,
    seed: u64,
) -> Result<usize, Error> {
    let monomials = monomials_of_degree(q, rbar);
    if monomials.is_empty() || sample_points == 0 {
        return Ok(0);
    }
    let columns = (0..sample_points)
        .into_par_iter()
        .map(|k| {
            let p = random_rep_with(field, q, dv, &mut rng_for(derive_seed(seed, k as u64)), false);
            let mut cache = HashMap::new();
            monomials
                .iter()
                .map(|m| TraceExpression::monomial(m.clone(), BigRational::one()).eval_cached(field, &p, &mut cache))
                .collect::<Result<Vec<_>, Error>>()
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let m = Matrix::from_fn(monomials.len(), sample_points, |i, j| columns[j][i].clone());
    Ok(m.rank(field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::generators::{model_quiver, DEFAULT_R_CAP};
    use crate::quiver::Arrow;

    fn sec3(m: usize) -> Quiver {
        let mut arrows: Vec<Arrow> = (1..=m).map(|k| Arrow { id: format!("a{k}"), from: 1, to: 1 }).collect();
        arrows.push(Arrow { id: "b".into(), from: 1, to: 2 });
        arrows.push(Arrow { id: "c".into(), from: 2, to: 1 });
        Quiver::new(2, vec![], vec![(1, 2)], arrows).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn path_element_parsing_and_validation() {
        let q = sec3(1);
        let f = PathElement::parse(&q, "a1 + 2 (c b) - 1/2 (c ~b)").unwrap();
        assert!(f.is_closed());
        assert_eq!(f.source(), DVertex::Base(1));
        assert_eq!(f.terms().len(), 3);
        assert!(PathElement::parse(&q, "a1 + b").is_err());
        assert!(PathElement::parse(&q, "(b c b)").is_ok());
        assert!(PathElement::parse(&q, "(b b)").is_err());
        assert!(PathElement::parse(&q, "a1 - a1").is_err());
        let b = PathElement::parse(&q, "b").unwrap();
        let bt = b.involution(&q);
        assert_eq!((bt.source(), bt.target()), (DVertex::Base(1), DVertex::Base(2)));
    }

    #[test]
    fn sigma_two_of_loop_at_dimension_one() {
        let q = Quiver::loops(1);
        let f = PathElement::parse(&q, "a").unwrap();
        let e = substitute_sigma_r(&q, &f, 2, DEFAULT_R_CAP).unwrap();
        assert_eq!(e.display(&q), "1/2 (a)^2 - 1/2 (a a)");
        let fld = PrimeField::mersenne61();
        let rep = verify_vanishing(&fld, &q, &e, &DimensionVector::uniform(&q, 1), 50, 3).unwrap();
        assert!(rep.passed());
        let rep2 = verify_vanishing(&fld, &q, &e, &DimensionVector::uniform(&q, 2), 50, 3).unwrap();
        assert!(!rep2.passed());
        assert!(rep2.witness.as_ref().unwrap().shrunk);
    }

    #[test]
    fn sum_of_two_loops_distributes_multinomially() {
        // σ_2(a + b) has multidegree components (2,0), (1,1), (0,2)
        let q = Quiver::loops(2);
        let f = PathElement::parse(&q, "a1 + a2").unwrap();
        let e = substitute_sigma_r(&q, &f, 2, DEFAULT_R_CAP).unwrap();
        assert_eq!(e.multidegrees(2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        // oracle: σ_2(A + B) = σ_2(A) + σ_2(B) + tr A tr B - tr(AB)
        let a = |t: &str| TraceExpression::cycle(CyclePath::parse(&q, t).unwrap());
        let s2 = |x: &str, xx: &str| a(x).mul(&a(x)).sub(&a(xx)).scale(&rat(1, 2));
        let expected =
            s2("(a1)", "(a1 a1)").add(&s2("(a2)", "(a2 a2)")).add(&a("(a1)").mul(&a("(a2)"))).sub(&a("(a1 a2)"));
        assert_eq!(e, expected);
    }

    #[test]
    fn sigma_of_cb_is_closed_at_first_vertex() {
        let q = sec3(1);
        let f = PathElement::parse(&q, "(c b)").unwrap();
        let e = substitute_sigma_r(&q, &f, 3, DEFAULT_R_CAP).unwrap();
        assert!(!e.is_zero());
        assert!(e.multidegrees(3).iter().all(|d| d == &vec![0, 3, 3]));
    }

    #[test]
    fn identity_substitution_and_endpoint_checks() {
        let q = model_quiver();
        let x = PathElement::parse(&q, "X").unwrap();
        let y = PathElement::parse(&q, "Y").unwrap();
        let z = PathElement::parse(&q, "Z").unwrap();
        let e = substitute_sigma_rs(&q, Some(&x), Some(&y), Some(&z), 4, 1, 8).unwrap();
        assert_eq!(e, sigma_rs(4, 1, 8).unwrap());
        assert!(matches!(
            substitute_sigma_rs(&q, Some(&x), Some(&z), Some(&y), 4, 1, 8),
            Err(TraceError::Substitution(_))
        ));
    }

    #[test]
    fn substitution_preserves_vanishing() {
        // σ_2 vanishes in dimension 1; so do its images under admissible substitutions
        let fld = PrimeField::mersenne61();
        let q = sec3(2);
        let dv = DimensionVector::uniform(&q, 1);
        for text in ["a1", "a1 + 3 (a2 a1)", "(c b) - a2", "(c ~b) + 1/2 (a1 a1 a2)"] {
            let f = PathElement::parse(&q, text).unwrap();
            let e = substitute_sigma_r(&q, &f, 2, 8).unwrap();
            assert!(verify_vanishing(&fld, &q, &e, &dv, 30, 11).unwrap().passed(), "{text}");
        }
    }

    #[test]
    fn reports_are_reproducible_and_invariance_holds() {
        let fld = PrimeField::mersenne61();
        let q = sec3(1);
        let dv = DimensionVector::uniform(&q, 2);
        let e = TraceExpression::cycle(CyclePath::parse(&q, "(c ~b a1)").unwrap())
            .mul(&TraceExpression::cycle(CyclePath::parse(&q, "(a1)").unwrap()));
        let r1 = verify_invariance(&fld, &q, &e, &dv, 20, 5).unwrap();
        let r2 = verify_invariance(&fld, &q, &e, &dv, 20, 5).unwrap();
        assert!(r1.passed());
        assert_eq!(r1.to_json_stable(), r2.to_json_stable());
        let v = verify_vanishing(&fld, &q, &e, &dv, 20, 5).unwrap();
        assert_eq!(v.outcome, Outcome::Counterexample);
        let json = serde_json::to_string(&v).unwrap();
        assert!(json.contains("\"outcome\":\"counterexample\""));
    }

    #[test]
    fn paths_between_vertices() {
        let q = sec3(1);
        let to_partner = paths_between(&q, DVertex::Base(1), DVertex::Base(2), 1);
        assert_eq!(to_partner.len(), 2);
        for p in to_partner {
            assert_eq!(path_source(&q, &p), DVertex::Base(1));
            assert_eq!(path_target(&q, &p), DVertex::Base(2));
        }
    }

    #[test]
    fn span_small_cases() {
        let fld = PrimeField::mersenne61();
        let q = Quiver::loops(1);
        for d in 1..=3 {
            let dv = DimensionVector::uniform(&q, d);
            assert_eq!(graded_span_dimension(&fld, &q, &dv, &Multidegree(vec![1]), 4, 1).unwrap(), 1);
        }
        let m = model_quiver();
        let dv = DimensionVector::uniform(&m, 2);
        assert_eq!(graded_span_dimension(&fld, &m, &dv, &Multidegree(vec![0, 1, 0]), 4, 1).unwrap(), 0);
        assert_eq!(monomials_of_degree(&q, &Multidegree(vec![3])).len(), 3);
    }

    #[test]
    fn span_grows_with_samples_then_stabilizes() {
        let fld = PrimeField::mersenne61();
        let q = Quiver::loops(1);
        let dv = DimensionVector::uniform(&q, 3);
        let rbar = Multidegree(vec![3]);
        let ranks: Vec<usize> =
            (1..=6).map(|n| graded_span_dimension(&fld, &q, &dv, &rbar, n, 2).unwrap()).collect();
        assert!(ranks.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(ranks[2], ranks[5]);
    }
}
