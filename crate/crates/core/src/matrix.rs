//! Dense matrices over an exact [`Field`].

use std::ops::Index;

use crate::error::AlgebraError;
use crate::field::Field;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>, // row-major
}

impl<E: Clone> Matrix<E> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<E>) -> Self {
        assert_eq!(rows * cols, data.len(), "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[E] {
        &self.data
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn row_vecs(&self) -> Vec<Vec<E>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(|r| r.to_vec()).collect()
    }

    /// Square submatrix on the given (sorted) index set.
    pub fn principal_submatrix(&self, idx: &[usize]) -> Self {
        Matrix::from_fn(idx.len(), idx.len(), |i, j| self[(idx[i], idx[j])].clone())
    }

    pub fn map<T: Clone>(&self, f: impl FnMut(&E) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<E> Index<(usize, usize)> for Matrix<E> {
    type Output = E;

    fn index(&self, (i, j): (usize, usize)) -> &E {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of {}x{}", self.rows, self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<E: Clone + PartialEq> Matrix<E> {
    pub fn zeros<F: Field<Elem = E>>(field: &F, rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity<F: Field<Elem = E>>(field: &F, n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { field.one() } else { field.zero() })
    }

    pub fn scalar<F: Field<Elem = E>>(field: &F, n: usize, c: &E) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { c.clone() } else { field.zero() })
    }

    pub fn mul<F: Field<Elem = E>>(&self, other: &Self, field: &F) -> Result<Self, AlgebraError> {
        if self.cols != other.rows {
            return Err(AlgebraError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if field.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    let prod = field.mul(a, &other.data[k * other.cols + j]);
                    out.data[idx] = field.add(&out.data[idx], &prod);
                }
            }
        }
        Ok(out)
    }

    fn same_shape(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.shape() != other.shape() {
            return Err(AlgebraError::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add<F: Field<Elem = E>>(&self, other: &Self, field: &F) -> Result<Self, AlgebraError> {
        self.same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| field.add(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub<F: Field<Elem = E>>(&self, other: &Self, field: &F) -> Result<Self, AlgebraError> {
        self.same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| field.sub(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale<F: Field<Elem = E>>(&self, c: &E, field: &F) -> Self {
        self.map(|a| field.mul(a, c))
    }

    pub fn is_zero<F: Field<Elem = E>>(&self, field: &F) -> bool {
        self.data.iter().all(|a| field.is_zero(a))
    }

    pub fn trace<F: Field<Elem = E>>(&self, field: &F) -> Result<E, AlgebraError> {
        self.require_square()?;
        Ok((0..self.rows).fold(field.zero(), |acc, i| field.add(&acc, &self[(i, i)])))
    }

    fn require_square(&self) -> Result<(), AlgebraError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(AlgebraError::NotSquare(self.rows, self.cols))
        }
    }

    /// Row echelon form by Gaussian elimination; returns (echelon matrix, rank, sign of row swaps).
    fn echelon<F: Field<Elem = E>>(&self, field: &F) -> (Self, usize, bool) {
        let mut m = self.clone();
        let mut rank = 0;
        let mut negated = false;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(pivot) = (rank..m.rows).find(|&r| !field.is_zero(&m[(r, col)])) else {
                continue;
            };
            if pivot != rank {
                for j in 0..m.cols {
                    m.data.swap(pivot * m.cols + j, rank * m.cols + j);
                }
                negated = !negated;
            }
            let inv = field.inv(&m[(rank, col)]).expect("pivot is nonzero");
            for r in rank + 1..m.rows {
                let factor = field.mul(&m[(r, col)], &inv);
                if field.is_zero(&factor) {
                    continue;
                }
                for j in col..m.cols {
                    let v = field.sub(&m[(r, j)], &field.mul(&factor, &m[(rank, j)]));
                    m.data[r * m.cols + j] = v;
                }
            }
            rank += 1;
        }
        (m, rank, negated)
    }

    pub fn rank<F: Field<Elem = E>>(&self, field: &F) -> usize {
        self.echelon(field).1
    }

    pub fn determinant<F: Field<Elem = E>>(&self, field: &F) -> Result<E, AlgebraError> {
        self.require_square()?;
        let (m, rank, negated) = self.echelon(field);
        if rank < self.rows {
            return Ok(field.zero());
        }
        let det = (0..m.rows).fold(field.one(), |acc, i| field.mul(&acc, &m[(i, i)]));
        Ok(if negated { field.neg(&det) } else { det })
    }

    /// Gauss-Jordan inverse.
    pub fn inverse<F: Field<Elem = E>>(&self, field: &F) -> Result<Self, AlgebraError> {
        self.require_square()?;
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(field, n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !field.is_zero(&a[(r, col)])).ok_or(AlgebraError::Singular)?;
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    inv.data.swap(pivot * n + j, col * n + j);
                }
            }
            let p = field.inv(&a[(col, col)]).expect("pivot is nonzero");
            for j in 0..n {
                a.data[col * n + j] = field.mul(&a.data[col * n + j], &p);
                inv.data[col * n + j] = field.mul(&inv.data[col * n + j], &p);
            }
            for r in 0..n {
                if r == col || field.is_zero(&a[(r, col)]) {
                    continue;
                }
                let factor = a[(r, col)].clone();
                for j in 0..n {
                    let va = field.sub(&a.data[r * n + j], &field.mul(&factor, &a.data[col * n + j]));
                    let vi = field.sub(&inv.data[r * n + j], &field.mul(&factor, &inv.data[col * n + j]));
                    a.data[r * n + j] = va;
                    inv.data[r * n + j] = vi;
                }
            }
        }
        Ok(inv)
    }

    /// `[sigma_0, ..., sigma_n]` with `det(tI - M) = sum_j (-1)^j sigma_j t^(n-j)`.
    ///
    /// Faddeev-LeVerrier divides by `1..=n`, so in characteristic `p <= n` the
    /// division-free Berkowitz recursion is used instead.
    pub fn char_coeffs<F: Field<Elem = E>>(&self, field: &F) -> Result<Vec<E>, AlgebraError> {
        self.require_square()?;
        let p = field.characteristic();
        if p == 0 || p as u128 > self.rows as u128 {
            faddeev_leverrier(self, field)
        } else {
            berkowitz(self, field)
        }
    }

    /// The `j`-th elementary symmetric function of the eigenvalues.
    pub fn sigma<F: Field<Elem = E>>(&self, j: usize, field: &F) -> Result<E, AlgebraError> {
        self.require_square()?;
        if j > self.rows {
            return Ok(field.zero());
        }
        Ok(self.char_coeffs(field)?.swap_remove(j))
    }
}

/// `sigma_0..sigma_n` by Faddeev-LeVerrier. Needs `1..=n` invertible in the field.
pub fn faddeev_leverrier<F: Field>(m: &Matrix<F::Elem>, field: &F) -> Result<Vec<F::Elem>, AlgebraError> {
    m.require_square()?;
    let n = m.rows;
    // c[i] is the coefficient of t^i in det(tI - M)
    let mut c = vec![field.zero(); n + 1];
    c[n] = field.one();
    let mut acc = Matrix::zeros(field, n, n);
    for k in 1..=n {
        let shift = Matrix::scalar(field, n, &c[n - k + 1]);
        acc = m.mul(&acc, field)?.add(&shift, field)?;
        let tr = m.mul(&acc, field)?.trace(field)?;
        let k_inv = field
            .inv(&field.from_i64(k as i64))
            .ok_or(AlgebraError::DenominatorVanishes(k.to_string(), field.characteristic()))?;
        c[n - k] = field.neg(&field.mul(&tr, &k_inv));
    }
    Ok((0..=n)
        .map(|j| if j % 2 == 0 { c[n - j].clone() } else { field.neg(&c[n - j]) })
        .collect())
}

/// `sigma_0..sigma_n` by the division-free Berkowitz recursion on trailing
/// principal submatrices.
pub fn berkowitz<F: Field>(m: &Matrix<F::Elem>, field: &F) -> Result<Vec<F::Elem>, AlgebraError> {
    m.require_square()?;
    let n = m.rows;
    // descending coefficients of det(tI - M[r.., r..])
    let mut q = vec![field.one()];
    for r in (0..n).rev() {
        let size = n - r;
        let a = m[(r, r)].clone();
        let row: Vec<_> = (r + 1..n).map(|j| m[(r, j)].clone()).collect();
        let mut col: Vec<_> = (r + 1..n).map(|i| m[(i, r)].clone()).collect();
        // first Toeplitz column: 1, -a, -R C, -R M C, ..., -R M^(size-2) C
        let mut toeplitz = Vec::with_capacity(size + 1);
        toeplitz.push(field.one());
        toeplitz.push(field.neg(&a));
        for _ in 0..size.saturating_sub(1) {
            let dot = row.iter().zip(&col).fold(field.zero(), |acc, (x, y)| field.add(&acc, &field.mul(x, y)));
            toeplitz.push(field.neg(&dot));
            col = (r + 1..n)
                .map(|i| {
                    (r + 1..n).zip(&col).fold(field.zero(), |acc, (j, v)| field.add(&acc, &field.mul(&m[(i, j)], v)))
                })
                .collect();
        }
        let next: Vec<_> = (0..=size)
            .map(|i| {
                (0..q.len())
                    .filter(|&j| j <= i)
                    .fold(field.zero(), |acc, j| field.add(&acc, &field.mul(&toeplitz[i - j], &q[j])))
            })
            .collect();
        q = next;
    }
    Ok(q.iter().enumerate().map(|(j, v)| if j % 2 == 0 { v.clone() } else { field.neg(v) }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix<F: Field>(field: &F, n: usize, seed: u64) -> Matrix<F::Elem> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(n, n, |_, _| field.random(&mut rng))
    }

    /// Laplace expansion along the first row.
    fn cofactor_det<F: Field>(m: &Matrix<F::Elem>, field: &F) -> F::Elem {
        let n = m.rows();
        if n == 0 {
            return field.one();
        }
        let mut acc = field.zero();
        for j in 0..n {
            let minor = Matrix::from_fn(n - 1, n - 1, |r, c| m[(r + 1, if c < j { c } else { c + 1 })].clone());
            let term = field.mul(&m[(0, j)], &cofactor_det(&minor, field));
            acc = if j % 2 == 0 { field.add(&acc, &term) } else { field.sub(&acc, &term) };
        }
        acc
    }

    /// sigma_j as the sum of all j x j principal minors.
    fn minor_sum_oracle<F: Field>(m: &Matrix<F::Elem>, j: usize, field: &F) -> F::Elem {
        let n = m.rows();
        let mut acc = field.zero();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != j {
                continue;
            }
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            acc = field.add(&acc, &cofactor_det(&m.principal_submatrix(&idx), field));
        }
        acc
    }

    #[test]
    fn identity_coefficients_are_binomial() {
        let q = Rationals::default();
        let id = Matrix::identity(&q, 3);
        let c = id.char_coeffs(&q).unwrap();
        assert_eq!(c, vec![q.from_i64(1), q.from_i64(3), q.from_i64(3), q.from_i64(1)]);
    }

    #[test]
    fn sigma_zero_is_one_and_non_square_rejected() {
        let f = PrimeField::mersenne61();
        let m = random_matrix(&f, 4, 1);
        assert_eq!(m.sigma(0, &f).unwrap(), f.one());
        let rect = Matrix::zeros(&f, 2, 3);
        assert_eq!(rect.sigma(1, &f), Err(AlgebraError::NotSquare(2, 3)));
    }

    #[test]
    fn char_coeffs_match_principal_minor_oracle() {
        let f = PrimeField::mersenne61();
        for seed in 0..10 {
            let m = random_matrix(&f, 4, seed);
            let c = m.char_coeffs(&f).unwrap();
            for (j, cj) in c.iter().enumerate() {
                assert_eq!(cj, &minor_sum_oracle(&m, j, &f), "seed {seed} j {j}");
            }
        }
    }

    #[test]
    fn berkowitz_agrees_with_faddeev_leverrier() {
        let q = Rationals::default();
        for seed in 0..6 {
            let m = random_matrix(&q, 5, seed);
            assert_eq!(berkowitz(&m, &q).unwrap(), faddeev_leverrier(&m, &q).unwrap());
        }
    }

    #[test]
    fn small_characteristic_uses_division_free_route() {
        let f = PrimeField::new(3).unwrap();
        for seed in 0..10 {
            let m = random_matrix(&f, 5, seed);
            let c = m.char_coeffs(&f).unwrap();
            assert_eq!(c.len(), 6);
            for (j, cj) in c.iter().enumerate() {
                assert_eq!(cj, &minor_sum_oracle(&m, j, &f));
            }
        }
    }

    #[test]
    fn determinant_and_trace_are_extreme_sigmas() {
        let q = Rationals::default();
        for seed in 0..5 {
            let m = random_matrix(&q, 4, seed);
            assert_eq!(m.sigma(4, &q).unwrap(), cofactor_det(&m, &q));
            assert_eq!(m.sigma(4, &q).unwrap(), m.determinant(&q).unwrap());
            assert_eq!(m.sigma(1, &q).unwrap(), m.trace(&q).unwrap());
        }
    }

    #[test]
    fn inverse_round_trip() {
        let q = Rationals::default();
        let m = random_matrix(&q, 4, 11);
        let inv = m.inverse(&q).unwrap();
        assert_eq!(m.mul(&inv, &q).unwrap(), Matrix::identity(&q, 4));
        let singular = Matrix::zeros(&q, 3, 3);
        assert_eq!(singular.inverse(&q), Err(AlgebraError::Singular));
    }

    #[test]
    fn zero_sized_matrices() {
        let q = Rationals::default();
        let e: Matrix<_> = Matrix::zeros(&q, 0, 0);
        assert_eq!(e.char_coeffs(&q).unwrap(), vec![q.one()]);
        assert_eq!(e.trace(&q).unwrap(), q.zero());
        assert_eq!(e.determinant(&q).unwrap(), q.one());
    }
}
