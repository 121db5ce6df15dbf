//! The two-vertex quiver whose mixed invariants specialize to orthogonal and
//! symplectic invariants of several matrices.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{AlgebraError, Error};
use crate::expr::TraceExpression;
use crate::field::{Field, Rationals};
use crate::matrix::Matrix;
use crate::paths::CyclePath;
use crate::quiver::{Arrow, PathStep, Quiver};
use crate::rep::{
    cayley_orthogonal, cayley_symplectic, derive_seed, random_matrix, random_symmetric, rng_for, symplectic_form,
    RepPoint,
};
use crate::word::{self, Letter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    #[serde(rename = "o")]
    Orthogonal,
    #[serde(rename = "sp")]
    Symplectic,
}

impl FromStr for Flavor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "o" | "orthogonal" => Ok(Flavor::Orthogonal),
            "sp" | "symplectic" => Ok(Flavor::Symplectic),
            other => Err(format!("unknown flavor `{other}`, expected `o` or `sp`")),
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Orthogonal => "o",
            Flavor::Symplectic => "sp",
        })
    }
}

/// Loops `a1..am` at vertex 1, `b: 1 → 2`, `c: 2 → 1`, with `(1, 2)` a dual pair.
pub fn ortho_quiver(m: usize) -> Quiver {
    let mut arrows: Vec<Arrow> = (1..=m).map(|k| Arrow { id: format!("a{k}"), from: 1, to: 1 }).collect();
    arrows.push(Arrow { id: "b".into(), from: 1, to: 2 });
    arrows.push(Arrow { id: "c".into(), from: 2, to: 1 });
    Quiver::new(2, vec![], vec![(1, 2)], arrows).expect("valid quiver")
}

fn check_field<F: Field>(field: &F) -> Result<(), Error> {
    if field.characteristic() == 2 {
        return Err(AlgebraError::FieldSpec("orthogonal and symplectic flavors exclude characteristic 2".into()).into());
    }
    Ok(())
}

/// `a_i` or its adjoint: the transpose for O, `J^{-1} a^T J` for Sp.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatLetter {
    pub index: usize,
    pub adjoint: bool,
}

impl Letter for MatLetter {
    fn toggled(&self) -> Self {
        MatLetter { index: self.index, adjoint: !self.adjoint }
    }
}

/// Canonical cyclic word; the empty word stands for the identity matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatWord(Vec<MatLetter>);

impl MatWord {
    pub fn new(letters: &[MatLetter]) -> Self {
        MatWord(word::canonical(letters))
    }

    pub fn letters(&self) -> &[MatLetter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Product of the letters at `a`, given the adjoints `adj`.
    pub fn product<F: Field>(
        &self,
        field: &F,
        a: &[Matrix<F::Elem>],
        adj: &[Matrix<F::Elem>],
        d: usize,
    ) -> Result<Matrix<F::Elem>, Error> {
        let mut acc = Matrix::identity(field, d);
        for l in &self.0 {
            let m = if l.adjoint { &adj[l.index] } else { &a[l.index] };
            acc = acc.mul(m, field)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for MatWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|l| format!("{}a{}", if l.adjoint { "~" } else { "" }, l.index + 1))
            .collect();
        write!(f, "({})", parts.join(" "))
    }
}

/// Adjoints of the matrices for a flavor.
pub fn adjoints<F: Field>(field: &F, flavor: Flavor, a: &[Matrix<F::Elem>]) -> Result<Vec<Matrix<F::Elem>>, Error> {
    check_field(field)?;
    match flavor {
        Flavor::Orthogonal => Ok(a.iter().map(Matrix::transpose).collect()),
        Flavor::Symplectic => {
            let d = a.first().map_or(0, Matrix::rows);
            let j = symplectic_form(field, d)?;
            let jinv = j.scale(&field.from_i64(-1), field);
            a.iter().map(|m| Ok(jinv.mul(&m.transpose(), field)?.mul(&j, field)?)).collect()
        }
    }
}

/// Linear combination of products of traces of words in the `a_i` and adjoints.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpecializedExpression {
    terms: BTreeMap<Vec<MatWord>, BigRational>,
}

impl SpecializedExpression {
    pub fn terms(&self) -> &BTreeMap<Vec<MatWord>, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, mut words: Vec<MatWord>, c: BigRational) {
        words.sort();
        let slot = self.terms.entry(words.clone()).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&words);
        }
    }

    pub fn eval<F: Field>(&self, field: &F, flavor: Flavor, a: &[Matrix<F::Elem>], d: usize) -> Result<F::Elem, Error> {
        if flavor == Flavor::Symplectic && d % 2 != 0 {
            return Err(AlgebraError::OddSymplectic(d).into());
        }
        let adj = adjoints(field, flavor, a)?;
        let mut cache: BTreeMap<&MatWord, F::Elem> = BTreeMap::new();
        let mut acc = field.zero();
        for (words, c) in &self.terms {
            let mut term = field.from_rational(c)?;
            for w in words {
                if !cache.contains_key(w) {
                    let v = w.product(field, a, &adj, d)?.trace(field)?;
                    cache.insert(w, v);
                }
                term = field.mul(&term, &cache[w]);
            }
            acc = field.add(&acc, &term);
        }
        Ok(acc)
    }

    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (words, c)) in self.terms.iter().enumerate() {
            if k == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            let body: Vec<String> = words.iter().map(MatWord::to_string).collect();
            let abs = c.abs();
            match (abs.is_one(), body.is_empty()) {
                (_, true) => out.push_str(&abs.to_string()),
                (true, false) => out.push_str(&body.join(" ")),
                (false, false) => out.push_str(&format!("{abs} {}", body.join(" "))),
            }
        }
        out
    }
}

pub(crate) enum StepKind {
    Loop(usize),
    B,
    C,
}

pub(crate) struct Layout {
    b: usize,
    c: usize,
    loops: Vec<Option<usize>>,
}

pub(crate) fn layout(q: &Quiver) -> Result<Layout, Error> {
    let bad = || Error::Specialization("expression is not on the orthogonal-symplectic model quiver".into());
    let b = q.arrow_index("b").map_err(|_| bad())?;
    let c = q.arrow_index("c").map_err(|_| bad())?;
    if q.pairs() != [(1, 2)] || q.vertex_count() != 2 {
        return Err(bad());
    }
    let (ab, ac) = (q.arrow(b), q.arrow(c));
    if (ab.from, ab.to, ac.from, ac.to) != (1, 2, 2, 1) {
        return Err(bad());
    }
    let mut loops = vec![None; q.arrows().len()];
    let mut next = 0;
    for (k, a) in q.arrows().iter().enumerate() {
        if k == b || k == c {
            continue;
        }
        if (a.from, a.to) != (1, 1) {
            return Err(bad());
        }
        loops[k] = Some(next);
        next += 1;
    }
    Ok(Layout { b, c, loops })
}

pub(crate) fn kind(l: &Layout, s: PathStep) -> StepKind {
    if s.arrow == l.b {
        StepKind::B
    } else if s.arrow == l.c {
        StepKind::C
    } else {
        StepKind::Loop(l.loops[s.arrow].expect("loop arrow"))
    }
}

fn specialize_steps(l: &Layout, steps: &[PathStep], flavor: Flavor) -> (i64, MatWord) {
    let start = steps.iter().position(|s| matches!(kind(l, *s), StepKind::C)).unwrap_or(0);
    let mut sign = 1;
    let mut pending_c = 1;
    let mut letters = Vec::with_capacity(steps.len());
    for s in steps[start..].iter().chain(&steps[..start]) {
        match kind(l, *s) {
            StepKind::Loop(i) => letters.push(MatLetter { index: i, adjoint: s.bar }),
            // Y(c) = -J, its transpose J
            StepKind::C => pending_c = if s.bar { 1 } else { -1 },
            // Y(b) = J, its transpose -J; c P b = -s_c s_b J P J^{-1}
            StepKind::B => {
                let sb = if s.bar { -1 } else { 1 };
                if flavor == Flavor::Symplectic {
                    sign *= -pending_c * sb;
                }
            }
        }
    }
    (sign, MatWord::new(&letters))
}

/// Image of one trace under `Y(b), Y(c) ↦ E` (O) or `J, -J` (Sp): a sign and a word.
pub fn specialize_cycle(q: &Quiver, c: &CyclePath, flavor: Flavor) -> Result<(i64, MatWord), Error> {
    Ok(specialize_steps(&layout(q)?, c.steps(), flavor))
}

/// Eliminates `b` and `c` from an expression on the model quiver.
pub fn ortho_symp_specialize(q: &Quiver, e: &TraceExpression, flavor: Flavor) -> Result<SpecializedExpression, Error> {
    let l = layout(q)?;
    let mut out = SpecializedExpression::default();
    for (m, c) in e.terms() {
        let mut coef = c.clone();
        let mut words = Vec::with_capacity(m.factors().len());
        for f in m.factors() {
            let (s, w) = specialize_steps(&l, f.steps(), flavor);
            if s < 0 {
                coef = -coef;
            }
            words.push(w);
        }
        out.add_term(words, coef);
    }
    Ok(out)
}

/// A closed path on the model quiver through vertex 1 whose specialization is
/// `word`, with `c` and `b` inserted wherever the letters change between a
/// matrix and an adjoint.
pub fn lift_word(q: &Quiver, word: &[MatLetter]) -> Result<Vec<PathStep>, Error> {
    let l = layout(q)?;
    if word.is_empty() {
        return Err(Error::Specialization("cannot lift the empty word".into()));
    }
    let letters: Vec<MatLetter> = if word.iter().all(|x| x.adjoint) { word::involute(word) } else { word.to_vec() };
    let arrow_of: Vec<usize> = {
        let mut v = vec![0; l.loops.iter().flatten().count()];
        for (k, i) in l.loops.iter().enumerate() {
            if let Some(i) = i {
                v[*i] = k;
            }
        }
        v
    };
    if letters.iter().any(|x| x.index >= arrow_of.len()) {
        return Err(Error::Specialization("word uses a matrix the quiver lacks".into()));
    }
    let start = letters.iter().position(|x| !x.adjoint).expect("some plain letter");
    let rotated: Vec<MatLetter> = letters[start..].iter().chain(&letters[..start]).copied().collect();
    let mut steps = Vec::with_capacity(rotated.len() * 2);
    for (k, x) in rotated.iter().enumerate() {
        steps.push(PathStep { arrow: arrow_of[x.index], bar: x.adjoint });
        let next = rotated[(k + 1) % rotated.len()];
        match (x.adjoint, next.adjoint) {
            (false, true) => steps.push(PathStep::plain(l.c)),
            (true, false) => steps.push(PathStep::plain(l.b)),
            _ => {}
        }
    }
    Ok(steps)
}

/// Random point with `Y(b) Y(c) = E` and `Y(c)` symmetric (O) or skew (Sp).
pub fn locus_point<F: Field>(field: &F, flavor: Flavor, d: usize, m: usize, seed: u64) -> Result<RepPoint<F::Elem>, Error> {
    check_field(field)?;
    if flavor == Flavor::Symplectic && d % 2 != 0 {
        return Err(AlgebraError::OddSymplectic(d).into());
    }
    let mut rng = rng_for(seed);
    let mut mats: Vec<Matrix<F::Elem>> = (0..m).map(|_| random_matrix(field, d, d, &mut rng, false)).collect();
    const ATTEMPTS: usize = 64;
    for _ in 0..ATTEMPTS {
        let c = random_symmetric(field, d, &mut rng, flavor == Flavor::Symplectic);
        if let Ok(b) = c.inverse(field) {
            mats.push(b);
            mats.push(c);
            return Ok(RepPoint::new(mats));
        }
    }
    Err(AlgebraError::Exhausted(ATTEMPTS).into())
}

/// The matrices at which the O or Sp invariants are read off the model quiver.
pub fn structured_point<F: Field>(
    field: &F,
    flavor: Flavor,
    a: &[Matrix<F::Elem>],
    d: usize,
) -> Result<RepPoint<F::Elem>, Error> {
    check_field(field)?;
    let (b, c) = match flavor {
        Flavor::Orthogonal => (Matrix::identity(field, d), Matrix::identity(field, d)),
        Flavor::Symplectic => {
            let j = symplectic_form(field, d)?;
            let minus = j.scale(&field.from_i64(-1), field);
            (j, minus)
        }
    };
    let mut mats = a.to_vec();
    mats.push(b);
    mats.push(c);
    Ok(RepPoint::new(mats))
}

/// Values of the generators `z_ij` of `Y(b)Y(c) - E` and `u_kl` of `Y(c) ∓ Y(c)^T`.
pub fn td_values<F: Field>(field: &F, flavor: Flavor, q: &Quiver, p: &RepPoint<F::Elem>) -> Result<Vec<F::Elem>, Error> {
    let l = layout(q)?;
    let (b, c) = (p.matrix(l.b), p.matrix(l.c));
    let d = c.rows();
    let z = b.mul(c, field)?.sub(&Matrix::identity(field, d), field)?;
    let mut out: Vec<F::Elem> = z.entries().to_vec();
    for k in 0..d {
        for m in k..d {
            let v = match flavor {
                Flavor::Orthogonal if k < m => field.sub(&c[(k, m)], &c[(m, k)]),
                Flavor::Symplectic => field.add(&c[(k, m)], &c[(m, k)]),
                _ => continue,
            };
            out.push(v);
        }
    }
    Ok(out)
}

/// All canonical nonempty words of length at most `max_len` in `m` matrices and their adjoints.
pub fn canonical_words(m: usize, max_len: usize) -> Vec<MatWord> {
    let alphabet: Vec<MatLetter> =
        (0..m).flat_map(|i| [false, true].map(|adjoint| MatLetter { index: i, adjoint })).collect();
    let mut out = std::collections::BTreeSet::new();
    let mut layer: Vec<Vec<MatLetter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for w in &layer {
            for x in &alphabet {
                let mut v = w.clone();
                v.push(*x);
                out.insert(MatWord::new(&v));
                next.push(v);
            }
        }
        layer = next;
    }
    out.into_iter().collect()
}

/// `σ_0..σ_d` of the product of a word.
pub fn word_sigmas<F: Field>(
    field: &F,
    w: &MatWord,
    a: &[Matrix<F::Elem>],
    adj: &[Matrix<F::Elem>],
    d: usize,
) -> Result<Vec<F::Elem>, Error> {
    Ok(w.product(field, a, adj, d)?.char_coeffs(field)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthoReport {
    pub flavor: Flavor,
    pub m: usize,
    pub d: usize,
    pub max_len: usize,
    pub words: usize,
    pub generators: usize,
    pub trials: usize,
    pub seed: u64,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl OrthoReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Checks `σ_j(p)` for every canonical word `p` and `1 ≤ j ≤ d` against
/// `trials` Cayley-generated orthogonal or symplectic matrices, exactly over
/// the rationals. Entries are drawn from `[-2, 2]` to keep rational growth in check.
pub fn invariance_suite(flavor: Flavor, m: usize, d: usize, max_len: usize, trials: usize, seed: u64) -> Result<OrthoReport, Error> {
    let field = Rationals { bound: 2 };
    if flavor == Flavor::Symplectic && d % 2 != 0 {
        return Err(AlgebraError::OddSymplectic(d).into());
    }
    let q = ortho_quiver(m);
    let words = canonical_words(m, max_len);
    for w in &words {
        let lifted = CyclePath::new(&q, lift_word(&q, w.letters())?)?;
        let (s, back) = specialize_cycle(&q, &lifted, flavor)?;
        if s != 1 || &back != w {
            return Err(Error::Specialization(format!("lift of {w} specializes to {back}")));
        }
    }
    let failures = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Vec<String>, Error> {
            let mut rng = rng_for(derive_seed(seed, t as u64));
            let a: Vec<Matrix<BigRational>> = (0..m).map(|_| random_matrix(&field, d, d, &mut rng, false)).collect();
            let g = match flavor {
                Flavor::Orthogonal => cayley_orthogonal(&field, d, &mut rng)?,
                Flavor::Symplectic => cayley_symplectic(&field, d, &mut rng)?,
            };
            let gi = g.inverse(&field)?;
            let moved = a.iter().map(|x| Ok(g.mul(x, &field)?.mul(&gi, &field)?)).collect::<Result<Vec<_>, Error>>()?;
            let (adj, adj_moved) = (adjoints(&field, flavor, &a)?, adjoints(&field, flavor, &moved)?);
            let mut bad = Vec::new();
            for w in &words {
                let before = word_sigmas(&field, w, &a, &adj, d)?;
                let after = word_sigmas(&field, w, &moved, &adj_moved, d)?;
                for j in 1..=d {
                    if before[j] != after[j] {
                        bad.push(format!("trial {t}: sigma_{j}{w}"));
                    }
                }
            }
            Ok(bad)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let all: Vec<String> = failures.into_iter().flatten().collect();
    Ok(OrthoReport {
        flavor,
        m,
        d,
        max_len,
        words: words.len(),
        generators: words.len() * d,
        trials,
        seed,
        failures: all.len(),
        first_failure: all.into_iter().next(),
    })
}
