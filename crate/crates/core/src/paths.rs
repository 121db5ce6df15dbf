//! Closed paths in the doubled quiver, taken up to rotation and involution.

use std::collections::BTreeSet;

use crate::error::{AlgebraError, QuiverError, TraceError};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::quiver::{DVertex, PathStep, Quiver};
use crate::rep::RepPoint;
use crate::word;

/// A cycle stored in canonical form. Steps are in matrix-product order:
/// `(w1 ... wk)` is `tr(Z(w1) ... Z(wk))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclePath {
    steps: Vec<PathStep>,
}

/// Whether `steps` compose to a closed path in the doubled quiver.
pub fn is_closed(q: &Quiver, steps: &[PathStep]) -> bool {
    let k = steps.len();
    k > 0 && (0..k).all(|j| q.step_source(steps[j]) == q.step_target(steps[(j + 1) % k]))
}

impl CyclePath {
    pub fn new(q: &Quiver, steps: Vec<PathStep>) -> Result<Self, TraceError> {
        if let Some(s) = steps.iter().find(|s| s.arrow >= q.arrows().len()) {
            return Err(TraceError::NotClosed(format!("arrow index {} out of range", s.arrow)));
        }
        if !is_closed(q, &steps) {
            return Err(TraceError::NotClosed(render_steps(q, &steps)));
        }
        Ok(CyclePath { steps: word::canonical(&steps) })
    }

    /// Parses `(c ~b a)`.
    pub fn parse(q: &Quiver, text: &str) -> Result<Self, Box<dyn std::error::Error + Send + Sync>> {
        let body = text
            .trim()
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| TraceError::Parse(format!("`{text}` is not parenthesized")))?;
        let steps = body
            .split_whitespace()
            .map(|tok| {
                let (bar, id) = match tok.strip_prefix('~') {
                    Some(id) => (true, id),
                    None => (false, tok),
                };
                Ok::<_, QuiverError>(PathStep { arrow: q.arrow_index(id)?, bar })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CyclePath::new(q, steps)?)
    }

    pub fn steps(&self) -> &[PathStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_primitive(&self) -> bool {
        word::smallest_period(&self.steps) == self.steps.len()
    }

    /// `k`-fold concatenation.
    pub fn power(&self, k: usize) -> Self {
        let steps: Vec<PathStep> = (0..k).flat_map(|_| self.steps.iter().copied()).collect();
        CyclePath { steps: word::canonical(&steps) }
    }

    /// Degree in each arrow.
    pub fn degree(&self, arrows: usize) -> Vec<usize> {
        let mut d = vec![0; arrows];
        for s in &self.steps {
            d[s.arrow] += 1;
        }
        d
    }

    /// Vertices of the doubled quiver visited, as step sources.
    pub fn vertices(&self, q: &Quiver) -> BTreeSet<DVertex> {
        self.steps.iter().map(|&s| q.step_source(s)).collect()
    }

    pub fn display(&self, q: &Quiver) -> String {
        render_steps(q, &self.steps)
    }

    pub fn latex(&self, q: &Quiver) -> String {
        let parts: Vec<String> = self
            .steps
            .iter()
            .map(|s| {
                let id = &q.arrow(s.arrow).id;
                if s.bar {
                    format!("\\bar{{{id}}}")
                } else {
                    id.clone()
                }
            })
            .collect();
        format!("\\operatorname{{tr}}({})", parts.join(""))
    }
}

pub fn render_steps(q: &Quiver, steps: &[PathStep]) -> String {
    let parts: Vec<String> = steps
        .iter()
        .map(|s| {
            let id = q.arrows().get(s.arrow).map_or("?", |a| a.id.as_str());
            if s.bar {
                format!("~{id}")
            } else {
                id.to_string()
            }
        })
        .collect();
    format!("({})", parts.join(" "))
}

/// Canonical representative of a closed step sequence.
pub fn canonicalize(q: &Quiver, steps: &[PathStep]) -> Result<CyclePath, TraceError> {
    CyclePath::new(q, steps.to_vec())
}

/// Every cycle class of length `1..=max_len`, optionally only those through `base`.
pub fn enumerate_cycles(q: &Quiver, max_len: usize, base: Option<DVertex>) -> Vec<CyclePath> {
    let steps = q.doubled().steps();
    let mut found = BTreeSet::new();
    let mut path = Vec::new();
    fn extend(
        q: &Quiver,
        steps: &[PathStep],
        max_len: usize,
        path: &mut Vec<PathStep>,
        found: &mut BTreeSet<CyclePath>,
    ) {
        if is_closed(q, path) {
            found.insert(CyclePath { steps: word::canonical(path) });
        }
        if path.len() == max_len {
            return;
        }
        // next step in product order must end where the current last step starts
        let want = q.step_source(*path.last().expect("nonempty"));
        for &s in steps {
            if q.step_target(s) == want {
                path.push(s);
                extend(q, steps, max_len, path, found);
                path.pop();
            }
        }
    }
    for &s in &steps {
        path.push(s);
        extend(q, &steps, max_len, &mut path, &mut found);
        path.pop();
    }
    found.into_iter().filter(|c| base.is_none_or(|b| c.vertices(q).contains(&b))).collect()
}

/// Ordered product of the step matrices.
pub fn path_product<F: Field>(
    field: &F,
    p: &RepPoint<F::Elem>,
    steps: &[PathStep],
) -> Result<Matrix<F::Elem>, AlgebraError> {
    let (first, rest) = steps.split_first().ok_or_else(|| AlgebraError::Shape("empty path".into()))?;
    let mut acc = p.step(first.arrow, first.bar).clone();
    for s in rest {
        acc = acc.mul(p.step(s.arrow, s.bar), field)?;
    }
    Ok(acc)
}

pub fn eval_cycle<F: Field>(field: &F, c: &CyclePath, p: &RepPoint<F::Elem>) -> Result<F::Elem, AlgebraError> {
    path_product(field, p, &c.steps)?.trace(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::quiver::{Arrow, DimensionVector};
    use crate::rep::random_rep;
    use proptest::prelude::*;

    fn model() -> Quiver {
        let arrow = |id: &str, from, to| Arrow { id: id.into(), from, to };
        Quiver::new(2, vec![], vec![(1, 2)], vec![arrow("a", 1, 1), arrow("b", 1, 2), arrow("c", 2, 1)]).unwrap()
    }

    #[test]
    fn one_loop_classes() {
        let q = Quiver::loops(1);
        let cycles = enumerate_cycles(&q, 3, None);
        let text: Vec<String> = cycles.iter().map(|c| c.display(&q)).collect();
        // a and ~a live at different vertices, so only powers of (a) remain
        assert!(text.contains(&"(a)".to_string()));
        assert!(text.contains(&"(a a)".to_string()));
        assert!(text.contains(&"(a a a)".to_string()));
        assert!(!text.iter().any(|t| t == "(~a)"));
        assert_eq!(cycles.len(), 3);
    }

    #[test]
    fn model_classes_through_first_vertex() {
        let q = model();
        let cycles = enumerate_cycles(&q, 2, Some(DVertex::Base(1)));
        let text: BTreeSet<String> = cycles.iter().map(|c| c.display(&q)).collect();
        // brute force: all closed words of length <= 2 touching vertex 1, up to equivalence
        let steps = q.doubled().steps();
        let mut oracle = BTreeSet::new();
        for &x in &steps {
            if is_closed(&q, &[x]) && q.step_source(x) == DVertex::Base(1) {
                oracle.insert(CyclePath::new(&q, vec![x]).unwrap().display(&q));
            }
            for &y in &steps {
                let w = [x, y];
                if is_closed(&q, &w) && (q.step_source(x) == DVertex::Base(1) || q.step_source(y) == DVertex::Base(1)) {
                    oracle.insert(CyclePath::new(&q, w.to_vec()).unwrap().display(&q));
                }
            }
        }
        assert_eq!(text, oracle);
        assert!(text.contains("(a)"));
        assert!(text.contains("(b c)"));
        assert!(text.contains("(b ~c)"));
        assert!(!text.contains("(~b ~c)"));
    }

    #[test]
    fn open_paths_rejected() {
        let q = model();
        assert!(matches!(CyclePath::parse(&q, "(b)").unwrap_err().downcast_ref::<TraceError>(), Some(TraceError::NotClosed(_))));
        assert!(CyclePath::parse(&q, "(c b)").is_ok());
        assert!(CyclePath::parse(&q, "(c x)").is_err());
        assert!(CyclePath::parse(&q, "c b").is_err());
    }

    #[test]
    fn powers_are_not_primitive() {
        let q = model();
        for text in ["(a)", "(c b)", "(c ~b)"] {
            let c = CyclePath::parse(&q, text).unwrap();
            assert!(c.is_primitive());
            assert!(!c.power(2).is_primitive());
            assert_eq!(c.power(2).len(), 2 * c.len());
        }
    }

    #[test]
    fn trace_and_power_evaluation() {
        let f = PrimeField::mersenne61();
        let q = model();
        let dv = DimensionVector::uniform(&q, 3);
        let p = random_rep(&f, &q, &dv, 4);
        let a = CyclePath::parse(&q, "(a)").unwrap();
        assert_eq!(eval_cycle(&f, &a, &p).unwrap(), p.matrix(0).trace(&f).unwrap());
        let cb = CyclePath::parse(&q, "(c b)").unwrap();
        let m = p.matrix(2).mul(p.matrix(1), &f).unwrap();
        let m3 = m.mul(&m, &f).unwrap().mul(&m, &f).unwrap();
        assert_eq!(eval_cycle(&f, &cb.power(3), &p).unwrap(), m3.trace(&f).unwrap());
    }

    fn random_closed_word(q: &Quiver, choices: &[usize]) -> Vec<PathStep> {
        let steps = q.doubled().steps();
        let mut w = vec![steps[choices[0] % steps.len()]];
        for &c in &choices[1..] {
            let want = q.step_source(*w.last().unwrap());
            let options: Vec<_> = steps.iter().filter(|s| q.step_target(**s) == want).collect();
            w.push(*options[c % options.len()]);
            if is_closed(q, &w) {
                break;
            }
        }
        while !is_closed(q, &w) {
            let want = q.step_source(*w.last().unwrap());
            let first_target = q.step_target(w[0]);
            let s = steps
                .iter()
                .find(|s| q.step_target(**s) == want && q.step_source(**s) == first_target)
                .or_else(|| steps.iter().find(|s| q.step_target(**s) == want))
                .unwrap();
            w.push(*s);
        }
        w
    }

    proptest! {
        #[test]
        fn canonical_form_respects_rotation_involution_and_evaluation(
            choices in prop::collection::vec(0usize..64, 1..6),
            k in 0usize..8,
            seed in any::<u64>(),
        ) {
            let q = model();
            let w = random_closed_word(&q, &choices);
            let k = k % w.len();
            let rotated: Vec<PathStep> = w[k..].iter().chain(&w[..k]).copied().collect();
            let c = CyclePath::new(&q, w.clone()).unwrap();
            prop_assert_eq!(&CyclePath::new(&q, word::involute(&rotated)).unwrap(), &c);

            let f = PrimeField::mersenne61();
            let dv = DimensionVector::uniform(&q, 2);
            let p = random_rep(&f, &q, &dv, seed);
            let direct = path_product(&f, &p, &w).unwrap().trace(&f).unwrap();
            prop_assert_eq!(eval_cycle(&f, &c, &p).unwrap(), direct.clone());
            let inv = path_product(&f, &p, &word::involute(&w)).unwrap().trace(&f).unwrap();
            prop_assert_eq!(inv, direct);
        }
    }
}
