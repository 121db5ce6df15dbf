//! Closed-form coefficient identities behind the correction `z(f)` of `σ_r(f)`
//! under a non-standard specialization.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, TraceError};
use crate::expr::TraceExpression;
use crate::field::{binomial, Field, Rationals};
use crate::generators::DEFAULT_R_CAP;
use crate::matrix::Matrix;
use crate::quiver::{DVertex, Quiver};
use crate::relations::{substitute_sigma_r, PathElement};
use crate::rep::{derive_seed, random_matrix, rng_for};
use crate::special::ortho::{kind, layout, StepKind};
use crate::special::poly::Poly;

/// Both sides of `σ_k(X + yE) = Σ_s C(N-k+s, s) y^s σ_{k-s}(X)` for an `N×N` matrix `X`.
pub fn sigma_shift_identity<F: Field>(
    field: &F,
    k: usize,
    x: &Matrix<F::Elem>,
    y: &F::Elem,
) -> Result<(F::Elem, F::Elem), Error> {
    if !x.is_square() {
        return Err(crate::error::AlgebraError::NotSquare(x.rows(), x.cols()).into());
    }
    let big = x.rows();
    if k > big {
        return Err(Error::Specialization(format!("k = {k} exceeds N = {big}")));
    }
    let shifted = x.add(&Matrix::scalar(field, big, y), field)?;
    let lhs = shifted.sigma(k, field)?;
    let sig = x.char_coeffs(field)?;
    let mut rhs = field.zero();
    for s in 0..=k {
        let c = field.from_rational(&BigRational::from_integer(binomial((big - k + s) as u64, s as u64)))?;
        let term = field.mul(&field.mul(&c, &field.pow(y, s as u64)), &sig[k - s]);
        rhs = field.add(&rhs, &term);
    }
    Ok((lhs, rhs))
}

fn require_drop(big: usize, n: usize) -> Result<usize, Error> {
    if big <= n {
        return Err(Error::Specialization(format!("need N > n, got N = {big}, n = {n}")));
    }
    Ok(big - n)
}

/// `α_j = (-1)^j C(N-n+j-1, j) λ^j` for `j = 0..=r`.
pub fn alpha_coeffs(big: usize, n: usize, r: usize) -> Result<Vec<Poly>, Error> {
    let diff = require_drop(big, n)?;
    Ok((0..=r)
        .map(|j| {
            let c = binomial((diff + j - 1) as u64, j as u64);
            Poly::monomial(if j % 2 == 0 { c } else { -c }, j)
        })
        .collect())
}

/// `Σ_{k=0..r-t} C(N-n, k) λ^k α_{r-t-k}` for `t = 0..r`; all should vanish.
pub fn eq_t_residuals(big: usize, n: usize, r: usize) -> Result<Vec<Poly>, Error> {
    let diff = require_drop(big, n)?;
    let alpha = alpha_coeffs(big, n, r)?;
    Ok((0..r)
        .map(|t| {
            (0..=r - t).fold(Poly::zero(), |acc, k| {
                &acc + &(&Poly::monomial(binomial(diff as u64, k as u64), k) * &alpha[r - t - k])
            })
        })
        .collect())
}

/// `Σ_{s=0..r-t1} C(N-t2, s) λ^s α_{r-t1-s}`.
pub fn generalized_vanishing(big: usize, n: usize, r: usize, t1: usize, t2: usize) -> Result<Poly, Error> {
    require_drop(big, n)?;
    if t1 > t2 || t2 > big || t1 > r {
        return Err(Error::Specialization(format!("need t1 <= t2 <= N and t1 <= r, got ({t1}, {t2})")));
    }
    let alpha = alpha_coeffs(big, n, r)?;
    Ok((0..=r - t1).fold(Poly::zero(), |acc, s| {
        &acc + &(&Poly::monomial(binomial((big - t2) as u64, s as u64), s) * &alpha[r - t1 - s])
    }))
}

fn eval_rational(p: &Poly, x: &BigRational) -> BigRational {
    p.coeffs().iter().rev().fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
}

/// Splits `f` into monomials containing a loop letter and the rest, which
/// are words in `b`, `c` and their transposes only.
pub fn split_f(q: &Quiver, f: &PathElement) -> Result<(Vec<(Vec<crate::PathStep>, BigRational)>, BigRational), Error> {
    let l = layout(q)?;
    if f.source() != DVertex::Base(1) || f.target() != DVertex::Base(1) {
        return Err(TraceError::Substitution("f must be closed at vertex 1".into()).into());
    }
    let mut f1 = Vec::new();
    let mut lambda = BigRational::zero();
    for (path, c) in f.terms() {
        if path.iter().any(|s| matches!(kind(&l, *s), StepKind::Loop(_))) {
            f1.push((path.clone(), c.clone()));
        } else {
            lambda += c;
        }
    }
    Ok((f1, lambda))
}

/// `z(f) = Σ_k α_k σ_{r-k}(f)` with `λ` the coefficient sum of the loop-free part of `f`.
pub fn z_of_f(q: &Quiver, f: &PathElement, r: usize, big: usize, n: usize) -> Result<(TraceExpression, BigRational), Error> {
    let (_, lambda) = split_f(q, f)?;
    let alpha = alpha_coeffs(big, n, r)?;
    let mut z = TraceExpression::zero();
    for (k, a) in alpha.iter().enumerate() {
        let coef = eval_rational(a, &lambda);
        if coef.is_zero() {
            continue;
        }
        let sigma = if k == r {
            TraceExpression::constant(BigRational::one())
        } else {
            substitute_sigma_r(q, f, r - k, DEFAULT_R_CAP.max(r))?
        };
        z.add_assign(&sigma.scale(&coef));
    }
    Ok((z, lambda))
}

/// One line of an identity run.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub which: String,
    pub instance: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

/// The shift identity for every `k ≤ N` at `trials` random `(X, y)` over the rationals.
pub fn check_sigma_shift(big: usize, trials: usize, seed: u64) -> Result<Vec<IdentityCheck>, Error> {
    let field = Rationals::default();
    (0..=big)
        .into_par_iter()
        .map(|k| {
            let mut failures = 0;
            for t in 0..trials {
                let mut rng = rng_for(derive_seed(seed, (k * trials + t) as u64));
                let x = random_matrix(&field, big, big, &mut rng, false);
                let y = field.random(&mut rng);
                let (lhs, rhs) = sigma_shift_identity(&field, k, &x, &y)?;
                if lhs != rhs {
                    failures += 1;
                }
            }
            Ok(IdentityCheck {
                which: "shift".into(),
                instance: format!("N={big} k={k} trials={trials}"),
                passed: failures == 0,
                detail: if failures == 0 { String::new() } else { format!("{failures} mismatches") },
            })
        })
        .collect()
}

pub fn check_eq_t(big: usize, n: usize, r: usize) -> Result<Vec<IdentityCheck>, Error> {
    Ok(eq_t_residuals(big, n, r)?
        .into_iter()
        .enumerate()
        .map(|(t, res)| IdentityCheck {
            which: "eqt".into(),
            instance: format!("N={big} n={n} r={r} t={t}"),
            passed: res.is_zero(),
            detail: if res.is_zero() { String::new() } else { format!("residual {res}") },
        })
        .collect())
}

/// Every pair `t1 ≤ t2 ≤ n`, expected zero, plus the probes `t2 = n + 1`, expected nonzero.
pub fn check_generalized_vanishing(big: usize, n: usize, r: usize) -> Result<Vec<IdentityCheck>, Error> {
    if r <= n {
        return Err(Error::Specialization(format!("the vanishing sums need r > n, got r = {r}, n = {n}")));
    }
    let mut out = Vec::new();
    for t2 in 0..=(n + 1).min(big) {
        for t1 in 0..=t2.min(r) {
            let probe = t2 == n + 1;
            let p = generalized_vanishing(big, n, r, t1, t2)?;
            out.push(IdentityCheck {
                which: if probe { "genvanish-probe" } else { "genvanish" }.into(),
                instance: format!("N={big} n={n} r={r} t1={t1} t2={t2}"),
                passed: p.is_zero() != probe,
                detail: if p.is_zero() { String::new() } else { p.to_string() },
            });
        }
    }
    Ok(out)
}

/// The coefficient of `σ_t(f'_1)` in the orthogonal specialization of `z(f)`
/// at `λ`, as an integer when `λ` is.
pub fn z_component_coefficient(big: usize, n: usize, r: usize, t: usize, lambda: &BigInt) -> Result<BigInt, Error> {
    Ok(generalized_vanishing(big, n, r, t, t)?.eval(lambda))
}
