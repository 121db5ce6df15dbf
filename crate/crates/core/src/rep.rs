//! Representation points, the group acting on them, and structured group elements.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::AlgebraError;
use crate::field::Field;
use crate::matrix::Matrix;
use crate::quiver::{ArrowClass, DimensionVector, Quiver};

/// Matrices on the arrows of a quiver, with their transposes cached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepPoint<E> {
    mats: Vec<Matrix<E>>,
    transposes: Vec<Matrix<E>>,
}

impl<E: Clone + PartialEq> RepPoint<E> {
    pub fn new(mats: Vec<Matrix<E>>) -> Self {
        let transposes = mats.iter().map(Matrix::transpose).collect();
        RepPoint { mats, transposes }
    }

    /// Checks each matrix has shape `d_{t(a)} x d_{i(a)}`.
    pub fn checked(q: &Quiver, dv: &DimensionVector, mats: Vec<Matrix<E>>) -> Result<Self, AlgebraError> {
        if mats.len() != q.arrows().len() {
            return Err(AlgebraError::Shape(format!("{} matrices for {} arrows", mats.len(), q.arrows().len())));
        }
        for (k, m) in mats.iter().enumerate() {
            let want = dv.arrow_shape(q, k);
            if m.shape() != want {
                return Err(AlgebraError::Shape(format!(
                    "arrow `{}` carries a {}x{} matrix, expected {}x{}",
                    q.arrow(k).id,
                    m.rows(),
                    m.cols(),
                    want.0,
                    want.1
                )));
            }
        }
        Ok(RepPoint::new(mats))
    }

    pub fn matrix(&self, arrow: usize) -> &Matrix<E> {
        &self.mats[arrow]
    }

    pub fn transpose(&self, arrow: usize) -> &Matrix<E> {
        &self.transposes[arrow]
    }

    /// `Y(a)` or `Y(a)ᵀ`.
    pub fn step(&self, arrow: usize, bar: bool) -> &Matrix<E> {
        if bar {
            &self.transposes[arrow]
        } else {
            &self.mats[arrow]
        }
    }

    pub fn matrices(&self) -> &[Matrix<E>] {
        &self.mats
    }

    pub fn into_matrices(self) -> Vec<Matrix<E>> {
        self.mats
    }
}

/// One invertible matrix per partition cell, inverse cached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement<E> {
    mats: Vec<Matrix<E>>,
    inverses: Vec<Matrix<E>>,
}

impl<E: Clone + PartialEq> GroupElement<E> {
    pub fn new<F: Field<Elem = E>>(field: &F, mats: Vec<Matrix<E>>) -> Result<Self, AlgebraError> {
        let inverses = mats.iter().map(|m| m.inverse(field)).collect::<Result<Vec<_>, _>>()?;
        Ok(GroupElement { mats, inverses })
    }

    pub fn identity<F: Field<Elem = E>>(field: &F, q: &Quiver, dv: &DimensionVector) -> Self {
        let mats: Vec<_> = (0..q.cell_count()).map(|c| Matrix::identity(field, dv.cell_dim(q, c))).collect();
        GroupElement { inverses: mats.clone(), mats }
    }

    pub fn matrix(&self, cell: usize) -> &Matrix<E> {
        &self.mats[cell]
    }

    pub fn inverse_matrix(&self, cell: usize) -> &Matrix<E> {
        &self.inverses[cell]
    }

    pub fn matrices(&self) -> &[Matrix<E>] {
        &self.mats
    }

    /// `self · other`, cellwise.
    pub fn compose<F: Field<Elem = E>>(&self, other: &Self, field: &F) -> Result<Self, AlgebraError> {
        let mats = self.mats.iter().zip(&other.mats).map(|(a, b)| a.mul(b, field)).collect::<Result<Vec<_>, _>>()?;
        let inverses =
            other.inverses.iter().zip(&self.inverses).map(|(a, b)| a.mul(b, field)).collect::<Result<Vec<_>, _>>()?;
        Ok(GroupElement { mats, inverses })
    }
}

/// The action `Y(a) ↦ g_t Y(a) g_i^{-1}` with `g^{-T}` on the starred end of A2
/// arrows and `g^T` on the starred origin of A3 arrows.
pub fn act<F: Field>(
    field: &F,
    q: &Quiver,
    p: &RepPoint<F::Elem>,
    g: &GroupElement<F::Elem>,
) -> Result<RepPoint<F::Elem>, AlgebraError> {
    let mut out = Vec::with_capacity(q.arrows().len());
    for (k, a) in q.arrows().iter().enumerate() {
        let (ct, ci) = (q.cell_of(a.to), q.cell_of(a.from));
        let y = p.matrix(k);
        let m = match q.class(k) {
            ArrowClass::A1 => g.matrix(ct).mul(y, field)?.mul(g.inverse_matrix(ci), field)?,
            ArrowClass::A2 => g.inverse_matrix(ct).transpose().mul(y, field)?.mul(g.inverse_matrix(ci), field)?,
            ArrowClass::A3 => g.matrix(ct).mul(y, field)?.mul(&g.matrix(ci).transpose(), field)?,
        };
        out.push(m);
    }
    Ok(RepPoint::new(out))
}

/// SplitMix64 step, used to give each trial its own RNG stream.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix<F: Field, R: rand::Rng + ?Sized>(
    field: &F,
    rows: usize,
    cols: usize,
    rng: &mut R,
    small: bool,
) -> Matrix<F::Elem> {
    Matrix::from_fn(rows, cols, |_, _| if small { field.random_small(rng) } else { field.random(rng) })
}

pub fn random_rep_with<F: Field, R: rand::Rng + ?Sized>(
    field: &F,
    q: &Quiver,
    dv: &DimensionVector,
    rng: &mut R,
    small: bool,
) -> RepPoint<F::Elem> {
    let mats = (0..q.arrows().len())
        .map(|k| {
            let (r, c) = dv.arrow_shape(q, k);
            random_matrix(field, r, c, rng, small)
        })
        .collect();
    RepPoint::new(mats)
}

/// Deterministic random point for a seed.
pub fn random_rep<F: Field>(field: &F, q: &Quiver, dv: &DimensionVector, seed: u64) -> RepPoint<F::Elem> {
    random_rep_with(field, q, dv, &mut rng_for(seed), false)
}

const MAX_ATTEMPTS: usize = 64;

pub fn random_invertible<F: Field, R: rand::Rng + ?Sized>(
    field: &F,
    d: usize,
    rng: &mut R,
) -> Result<Matrix<F::Elem>, AlgebraError> {
    for _ in 0..MAX_ATTEMPTS {
        let m = random_matrix(field, d, d, rng, false);
        if !field.is_zero(&m.determinant(field)?) {
            return Ok(m);
        }
    }
    Err(AlgebraError::Exhausted(MAX_ATTEMPTS))
}

pub fn random_group_with<F: Field, R: rand::Rng + ?Sized>(
    field: &F,
    q: &Quiver,
    dv: &DimensionVector,
    rng: &mut R,
) -> Result<GroupElement<F::Elem>, AlgebraError> {
    let mats = (0..q.cell_count())
        .map(|c| random_invertible(field, dv.cell_dim(q, c), rng))
        .collect::<Result<Vec<_>, _>>()?;
    GroupElement::new(field, mats)
}

pub fn random_group<F: Field>(
    field: &F,
    q: &Quiver,
    dv: &DimensionVector,
    seed: u64,
) -> Result<GroupElement<F::Elem>, AlgebraError> {
    random_group_with(field, q, dv, &mut rng_for(seed))
}

/// Antidiagonal skew form: `+1` in the upper half of the rows, `-1` in the lower half.
pub fn symplectic_form<F: Field>(field: &F, d: usize) -> Result<Matrix<F::Elem>, AlgebraError> {
    if d % 2 != 0 {
        return Err(AlgebraError::OddSymplectic(d));
    }
    Ok(Matrix::from_fn(d, d, |i, j| {
        if i + j + 1 != d {
            field.zero()
        } else if i < d / 2 {
            field.one()
        } else {
            field.from_i64(-1)
        }
    }))
}

/// `(I - S)(I + S)^{-1}`, or `None` when `I + S` is singular.
pub fn cayley<F: Field>(field: &F, s: &Matrix<F::Elem>) -> Result<Option<Matrix<F::Elem>>, AlgebraError> {
    let id = Matrix::identity(field, s.rows());
    let plus = id.add(s, field)?;
    if field.is_zero(&plus.determinant(field)?) {
        return Ok(None);
    }
    Ok(Some(id.sub(s, field)?.mul(&plus.inverse(field)?, field)?))
}

/// Random symmetric matrix, or skew-symmetric with zero diagonal.
pub fn random_symmetric<F: Field, R: rand::Rng + ?Sized>(field: &F, d: usize, rng: &mut R, skew: bool) -> Matrix<F::Elem> {
    let mut m = Matrix::zeros(field, d, d);
    for i in 0..d {
        for j in i..d {
            if skew && i == j {
                continue;
            }
            let v = field.random(rng);
            let w = if skew { field.neg(&v) } else { v.clone() };
            m.set(i, j, v);
            m.set(j, i, w);
        }
    }
    m
}

/// Orthogonal matrix from a random skew-symmetric `S`.
pub fn cayley_orthogonal<F: Field, R: rand::Rng + ?Sized>(
    field: &F,
    d: usize,
    rng: &mut R,
) -> Result<Matrix<F::Elem>, AlgebraError> {
    for _ in 0..MAX_ATTEMPTS {
        let s = random_symmetric(field, d, rng, true);
        if let Some(g) = cayley(field, &s)? {
            return Ok(g);
        }
    }
    Err(AlgebraError::Exhausted(MAX_ATTEMPTS))
}

/// Symplectic matrix from `S = J H` with `H` random symmetric.
pub fn cayley_symplectic<F: Field, R: rand::Rng + ?Sized>(
    field: &F,
    d: usize,
    rng: &mut R,
) -> Result<Matrix<F::Elem>, AlgebraError> {
    let j = symplectic_form(field, d)?;
    for _ in 0..MAX_ATTEMPTS {
        let s = j.mul(&random_symmetric(field, d, rng, false), field)?;
        if let Some(g) = cayley(field, &s)? {
            return Ok(g);
        }
    }
    Err(AlgebraError::Exhausted(MAX_ATTEMPTS))
}
