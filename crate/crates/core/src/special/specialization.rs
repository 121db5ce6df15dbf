//! Dimension-lowering specializations and the matching embeddings of points
//! and group elements.

use crate::error::Error;
use crate::expr::TraceExpression;
use crate::field::Field;
use crate::matrix::Matrix;
use crate::quiver::{Cell, DimensionVector, Quiver, VertexId};
use crate::rep::{GroupElement, RepPoint};

/// How an arrow's matrix is bordered when the dimensions grow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Zero border.
    Standard,
    /// Zero border with ones on the diagonal tail.
    NonStandard,
    /// Zero border with an antidiagonal tail, `top` above the block and
    /// `-top` below it.
    AntiTail { top: i64 },
}

/// Where the small block sits inside the large matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    Leading,
    Centred,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecializationMap {
    big: DimensionVector,
    small: DimensionVector,
    placement: Placement,
    modes: Vec<Mode>,
}

fn spec_err(msg: String) -> Error {
    Error::Specialization(msg)
}

impl SpecializationMap {
    pub fn new(
        q: &Quiver,
        big: DimensionVector,
        small: DimensionVector,
        placement: Placement,
        modes: Vec<Mode>,
    ) -> Result<Self, Error> {
        if modes.len() != q.arrows().len() {
            return Err(spec_err(format!("{} modes for {} arrows", modes.len(), q.arrows().len())));
        }
        for v in 1..=q.vertex_count() {
            let (nb, ns) = (big.at(v), small.at(v));
            if ns > nb {
                return Err(spec_err(format!("vertex {v}: target dimension {ns} exceeds source {nb}")));
            }
            if placement == Placement::Centred && (nb - ns) % 2 != 0 {
                return Err(spec_err(format!("vertex {v}: centred placement needs {nb} - {ns} even")));
            }
        }
        for (k, mode) in modes.iter().enumerate() {
            let a = q.arrow(k);
            let square = big.at(a.from) == big.at(a.to) && small.at(a.from) == small.at(a.to);
            match mode {
                Mode::Standard => {}
                Mode::NonStandard if !square => {
                    return Err(spec_err(format!("non-standard mode on non-square arrow {}", a.id)))
                }
                Mode::AntiTail { .. } if !square || placement != Placement::Centred => {
                    return Err(spec_err(format!("antidiagonal tail on arrow {} needs a centred square block", a.id)))
                }
                Mode::AntiTail { top } if top.abs() != 1 => {
                    return Err(spec_err(format!("antidiagonal tail value {top} is not a sign")))
                }
                _ => {}
            }
        }
        Ok(SpecializationMap { big, small, placement, modes })
    }

    pub fn standard(q: &Quiver, big: DimensionVector, small: DimensionVector) -> Result<Self, Error> {
        let modes = vec![Mode::Standard; q.arrows().len()];
        SpecializationMap::new(q, big, small, Placement::Leading, modes)
    }

    /// Non-standard on the listed arrows, standard elsewhere.
    pub fn non_standard(q: &Quiver, big: DimensionVector, small: DimensionVector, arrows: &[usize]) -> Result<Self, Error> {
        let modes = (0..q.arrows().len())
            .map(|k| if arrows.contains(&k) { Mode::NonStandard } else { Mode::Standard })
            .collect();
        SpecializationMap::new(q, big, small, Placement::Leading, modes)
    }

    /// Centred embedding with antidiagonal tails on the listed arrows.
    pub fn symplectic(
        q: &Quiver,
        big: DimensionVector,
        small: DimensionVector,
        tails: &[(usize, i64)],
    ) -> Result<Self, Error> {
        for v in 1..=q.vertex_count() {
            if big.at(v) % 2 != 0 || small.at(v) % 2 != 0 {
                return Err(spec_err(format!("symplectic map needs even dimensions at vertex {v}")));
            }
        }
        let modes = (0..q.arrows().len())
            .map(|k| match tails.iter().find(|(a, _)| *a == k) {
                Some(&(_, top)) => Mode::AntiTail { top },
                None => Mode::Standard,
            })
            .collect();
        SpecializationMap::new(q, big, small, Placement::Centred, modes)
    }

    pub fn big(&self) -> &DimensionVector {
        &self.big
    }

    pub fn small(&self) -> &DimensionVector {
        &self.small
    }

    pub fn placement(&self) -> Placement {
        self.placement
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// First row or column of the small block at vertex `v` (0-based).
    pub fn offset(&self, v: VertexId) -> usize {
        match self.placement {
            Placement::Leading => 0,
            Placement::Centred => (self.big.at(v) - self.small.at(v)) / 2,
        }
    }

    fn block<F: Field>(field: &F, m: &Matrix<F::Elem>, rows: usize, cols: usize, ro: usize, co: usize) -> Matrix<F::Elem> {
        let mut out = Matrix::zeros(field, rows, cols);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(ro + i, co + j, m[(i, j)].clone());
            }
        }
        out
    }

    /// The point of the large representation space attached to `p`.
    pub fn embed_point<F: Field>(&self, field: &F, q: &Quiver, p: &RepPoint<F::Elem>) -> Result<RepPoint<F::Elem>, Error> {
        if p.matrices().len() != q.arrows().len() {
            return Err(spec_err(format!("point has {} matrices, quiver {} arrows", p.matrices().len(), q.arrows().len())));
        }
        let mut out = Vec::with_capacity(q.arrows().len());
        for (k, a) in q.arrows().iter().enumerate() {
            let y = p.matrix(k);
            if y.shape() != self.small.arrow_shape(q, k) {
                return Err(spec_err(format!("matrix on {} has shape {:?}", a.id, y.shape())));
            }
            let (rows, cols) = self.big.arrow_shape(q, k);
            let (ro, co) = (self.offset(a.to), self.offset(a.from));
            let mut m = Self::block(field, y, rows, cols, ro, co);
            let inside = |i: usize| i >= ro && i < ro + y.rows();
            match self.modes[k] {
                Mode::Standard => {}
                Mode::NonStandard => {
                    for i in (0..rows).filter(|&i| !inside(i)) {
                        m.set(i, i, field.one());
                    }
                }
                Mode::AntiTail { top } => {
                    for i in (0..rows).filter(|&i| !inside(i)) {
                        let v = if i < ro { top } else { -top };
                        m.set(i, rows - 1 - i, field.from_i64(v));
                    }
                }
            }
            out.push(m);
        }
        Ok(RepPoint::new(out))
    }

    /// Borders each group factor by the identity.
    pub fn embed_group<F: Field>(
        &self,
        field: &F,
        q: &Quiver,
        g: &GroupElement<F::Elem>,
    ) -> Result<GroupElement<F::Elem>, Error> {
        let mut mats = Vec::with_capacity(q.cell_count());
        for (c, cell) in q.cells().into_iter().enumerate() {
            let v = match cell {
                Cell::Ordinary(v) | Cell::Pair(v, _) => v,
            };
            let (nb, ns) = (self.big.at(v), self.small.at(v));
            let gm = g.matrix(c);
            if gm.shape() != (ns, ns) {
                return Err(spec_err(format!("group factor {c} has shape {:?}, expected {ns}x{ns}", gm.shape())));
            }
            let off = self.offset(v);
            let mut m = Self::block(field, gm, nb, nb, off, off);
            for i in (0..nb).filter(|&i| i < off || i >= off + ns) {
                m.set(i, i, field.one());
            }
            mats.push(m);
        }
        Ok(GroupElement::new(field, mats)?)
    }
}

/// `p ↦ e(embed(p))`: the specialization of `e` as a function on the small space.
pub fn pullback_eval<F: Field>(
    field: &F,
    q: &Quiver,
    e: &TraceExpression,
    map: &SpecializationMap,
    p: &RepPoint<F::Elem>,
) -> Result<F::Elem, Error> {
    e.eval(field, &map.embed_point(field, q, p)?)
}

/// Diagonal matrix with ones after the first `n` places.
pub fn e_nn<F: Field>(field: &F, big: usize, n: usize) -> Matrix<F::Elem> {
    Matrix::from_fn(big, big, |i, j| if i == j && i >= n { field.one() } else { field.zero() })
}

/// Image of the zero `n×n` matrix under the centred antidiagonal embedding.
pub fn j_nn<F: Field>(field: &F, big: usize, n: usize) -> Result<Matrix<F::Elem>, Error> {
    if big % 2 != 0 || n % 2 != 0 || n > big {
        return Err(spec_err(format!("J({big},{n}) needs even dimensions with {n} <= {big}")));
    }
    let off = (big - n) / 2;
    Ok(Matrix::from_fn(big, big, |i, j| {
        if i + j + 1 != big || (i >= off && i < off + n) {
            field.zero()
        } else if i < off {
            field.one()
        } else {
            field.from_i64(-1)
        }
    }))
}

/// `Δ^r h(0)` for `h(λ) = (e∘embed_a - e∘embed_b)(λp)`, with `r` the degree of
/// the homogeneous `e`. It vanishes exactly when the difference has degree
/// below `r` along the line through `p`.
pub fn degree_drop_defect<F: Field>(
    field: &F,
    q: &Quiver,
    e: &TraceExpression,
    a: &SpecializationMap,
    b: &SpecializationMap,
    p: &RepPoint<F::Elem>,
) -> Result<F::Elem, Error> {
    let r = homogeneous_degree(e)?;
    let mut values = Vec::with_capacity(r + 1);
    for k in 0..=r {
        let lam = field.from_i64(k as i64);
        let scaled = RepPoint::new(p.matrices().iter().map(|m| m.scale(&lam, field)).collect());
        values.push(field.sub(&pullback_eval(field, q, e, a, &scaled)?, &pullback_eval(field, q, e, b, &scaled)?));
    }
    Ok(finite_difference(field, values))
}

pub(crate) fn homogeneous_degree(e: &TraceExpression) -> Result<usize, Error> {
    let mut degrees = e.terms().keys().map(|m| m.degree());
    let r = degrees.next().unwrap_or(0);
    if degrees.any(|d| d != r) {
        return Err(spec_err("expression is not homogeneous".into()));
    }
    Ok(r)
}

/// Highest-order forward difference of equally spaced samples.
pub fn finite_difference<F: Field>(field: &F, mut values: Vec<F::Elem>) -> F::Elem {
    while values.len() > 1 {
        values = values.windows(2).map(|w| field.sub(&w[1], &w[0])).collect();
    }
    values.pop().unwrap_or_else(|| field.zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::paths::CyclePath;
    use crate::rep::{act, random_group, random_rep, symplectic_form};
    use crate::special::ortho::ortho_quiver;

    fn fld() -> PrimeField {
        PrimeField::mersenne61()
    }

    fn dims(q: &Quiver, d: usize) -> DimensionVector {
        DimensionVector::uniform(q, d)
    }

    fn sec3_maps(q: &Quiver, big: usize, small: usize) -> Vec<SpecializationMap> {
        let (b, c) = (q.arrow_index("b").unwrap(), q.arrow_index("c").unwrap());
        let mut maps = vec![
            SpecializationMap::standard(q, dims(q, big), dims(q, small)).unwrap(),
            SpecializationMap::non_standard(q, dims(q, big), dims(q, small), &[b, c]).unwrap(),
        ];
        if big % 2 == 0 && small % 2 == 0 {
            maps.push(SpecializationMap::symplectic(q, dims(q, big), dims(q, small), &[(b, 1), (c, -1)]).unwrap());
        }
        maps
    }

    #[test]
    fn equal_dimensions_embed_identically() {
        let f = fld();
        let q = ortho_quiver(2);
        let p = random_rep(&f, &q, &dims(&q, 3), 1);
        for map in sec3_maps(&q, 3, 3) {
            assert_eq!(map.embed_point(&f, &q, &p).unwrap(), p);
        }
    }

    #[test]
    fn zero_target_non_standard_is_identity() {
        let f = fld();
        let q = Quiver::loops(1);
        let map = SpecializationMap::non_standard(&q, dims(&q, 3), dims(&q, 0), &[0]).unwrap();
        let p = random_rep(&f, &q, &dims(&q, 0), 0);
        assert_eq!(map.embed_point(&f, &q, &p).unwrap().matrix(0), &Matrix::identity(&f, 3));
    }

    #[test]
    fn validation() {
        let q = ortho_quiver(1);
        let a = q.arrow_index("a1").unwrap();
        assert!(SpecializationMap::standard(&q, dims(&q, 2), dims(&q, 3)).is_err());
        assert!(SpecializationMap::symplectic(&q, dims(&q, 5), dims(&q, 3), &[]).is_err());
        let mixed = Quiver::ordinary_only(
            2,
            vec![crate::quiver::Arrow { id: "x".into(), from: 1, to: 2 }],
        )
        .unwrap();
        let big = DimensionVector::new(&mixed, vec![3, 2]).unwrap();
        let small = DimensionVector::new(&mixed, vec![1, 1]).unwrap();
        assert!(SpecializationMap::non_standard(&mixed, big, small, &[0]).is_err());
        assert!(SpecializationMap::non_standard(&q, dims(&q, 3), dims(&q, 1), &[a]).is_ok());
    }

    /// Literal transcription of the piecewise rule with 1-based indices.
    fn piecewise(y: &Matrix<i64>, big: usize, small: usize, sign_top: i64, tail: bool) -> Matrix<i64> {
        let (mm, m) = (big as i64 / 2, small as i64 / 2);
        let n = big as i64;
        Matrix::from_fn(big, big, |i, j| {
            let (k, s) = (i as i64 + 1, j as i64 + 1);
            if mm - m < k && k <= mm + m && mm - m < s && s <= mm + m {
                y[((k - (mm - m) - 1) as usize, (s - (mm - m) - 1) as usize)]
            } else if tail && k + s == n + 1 && k <= mm - m {
                sign_top
            } else if tail && k + s == n + 1 && k >= mm + m + 1 {
                -sign_top
            } else {
                0
            }
        })
    }

    #[test]
    fn symplectic_embedding_matches_index_rule() {
        let f = fld();
        let q = ortho_quiver(1);
        let (a, b, c) = (0, 1, 2);
        for (big, small) in [(4, 2), (6, 2), (6, 4), (8, 2), (8, 6), (4, 0)] {
            let map = SpecializationMap::symplectic(&q, dims(&q, big), dims(&q, small), &[(b, 1), (c, -1)]).unwrap();
            let ints: Vec<Matrix<i64>> =
                (0..3).map(|k| Matrix::from_fn(small, small, |i, j| (7 * k + 3 * i + j + 1) as i64)).collect();
            let p = RepPoint::new(ints.iter().map(|m| m.map(|&v| f.from_i64(v))).collect());
            let e = map.embed_point(&f, &q, &p).unwrap();
            for (arrow, sign, tail) in [(a, 0, false), (b, 1, true), (c, -1, true)] {
                let expected = piecewise(&ints[arrow], big, small, sign, tail).map(|&v| f.from_i64(v));
                assert_eq!(e.matrix(arrow), &expected, "({big},{small}) arrow {arrow}");
            }
        }
    }

    #[test]
    fn structured_matrices() {
        let f = fld();
        for (big, n) in [(4, 1), (5, 3), (6, 0)] {
            let e = e_nn(&f, big, n);
            assert_eq!(e.mul(&e, &f).unwrap(), e);
        }
        for d in [2, 4, 6] {
            let j = symplectic_form(&f, d).unwrap();
            assert_eq!(j.transpose(), j.scale(&f.from_i64(-1), &f));
            assert_eq!(j.mul(&j, &f).unwrap(), Matrix::scalar(&f, d, &f.from_i64(-1)));
            assert_eq!(j_nn(&f, d, 0).unwrap(), j);
        }
        let q = ortho_quiver(1);
        let map = SpecializationMap::symplectic(&q, dims(&q, 6), dims(&q, 2), &[(1, 1), (2, -1)]).unwrap();
        let zero = RepPoint::new(vec![Matrix::zeros(&f, 2, 2); 3]);
        assert_eq!(map.embed_point(&f, &q, &zero).unwrap().matrix(1), &j_nn(&f, 6, 2).unwrap());
    }

    #[test]
    fn embedding_is_equivariant_and_group_embedding_multiplicative() {
        let f = fld();
        let q = ortho_quiver(2);
        for (big, small) in [(4, 2), (5, 2), (6, 4)] {
            for map in sec3_maps(&q, big, small) {
                let gi = GroupElement::identity(&f, &q, &dims(&q, small));
                assert_eq!(
                    map.embed_group(&f, &q, &gi).unwrap().matrices(),
                    GroupElement::identity(&f, &q, &dims(&q, big)).matrices()
                );
                for seed in 0..10 {
                    let p = random_rep(&f, &q, &dims(&q, small), seed);
                    let g = random_group(&f, &q, &dims(&q, small), seed + 100).unwrap();
                    let h = random_group(&f, &q, &dims(&q, small), seed + 200).unwrap();
                    let lhs = map.embed_point(&f, &q, &act(&f, &q, &p, &g).unwrap()).unwrap();
                    let rhs = act(&f, &q, &map.embed_point(&f, &q, &p).unwrap(), &map.embed_group(&f, &q, &g).unwrap())
                        .unwrap();
                    assert_eq!(lhs, rhs);
                    let gh = map.embed_group(&f, &q, &g.compose(&h, &f).unwrap()).unwrap();
                    let gh2 = map
                        .embed_group(&f, &q, &g)
                        .unwrap()
                        .compose(&map.embed_group(&f, &q, &h).unwrap(), &f)
                        .unwrap();
                    assert_eq!(gh.matrices(), gh2.matrices());
                }
            }
        }
    }

    #[test]
    fn composition_law() {
        let f = fld();
        let q = ortho_quiver(2);
        let outer = sec3_maps(&q, 6, 4);
        let inner = sec3_maps(&q, 4, 2);
        let direct = sec3_maps(&q, 6, 2);
        for k in 0..3 {
            for seed in 0..10 {
                let p = random_rep(&f, &q, &dims(&q, 2), seed);
                let two_steps = outer[k].embed_point(&f, &q, &inner[k].embed_point(&f, &q, &p).unwrap()).unwrap();
                assert_eq!(two_steps, direct[k].embed_point(&f, &q, &p).unwrap());
            }
        }
    }

    #[test]
    fn non_standard_drift_on_cb_powers() {
        let f = Rationals::default();
        let q = ortho_quiver(1);
        let (big, small) = (5, 2);
        let map = &sec3_maps(&q, big, small)[1];
        for k in 1..=3 {
            let steps = CyclePath::parse(&q, "(c b)").unwrap().power(k);
            let e = TraceExpression::cycle(steps);
            for seed in 0..5 {
                let p = random_rep(&f, &q, &dims(&q, small), seed);
                let lhs = pullback_eval(&f, &q, &e, map, &p).unwrap();
                let rhs = f.add(&e.eval(&f, &p).unwrap(), &f.from_i64((big - small) as i64));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn degree_drop_between_non_standard_and_standard() {
        let f = fld();
        let q = ortho_quiver(1);
        let maps = sec3_maps(&q, 4, 2);
        let exprs = [
            "(c b)",
            "(c b a1)",
            "(c ~b a1 a1)",
        ];
        for text in exprs {
            let cyc = TraceExpression::cycle(CyclePath::parse(&q, text).unwrap());
            let sq = cyc.mul(&cyc);
            for e in [cyc, sq] {
                for seed in 0..5 {
                    let p = random_rep(&f, &q, &dims(&q, 2), seed);
                    let d = degree_drop_defect(&f, &q, &e, &maps[1], &maps[0], &p).unwrap();
                    assert!(f.is_zero(&d), "{text}");
                }
            }
        }
        // the standard specialization alone is homogeneous of the full degree
        let e = TraceExpression::cycle(CyclePath::parse(&q, "(c b a1)").unwrap());
        let p = random_rep(&f, &q, &dims(&q, 2), 9);
        let values: Vec<_> = (0..=3)
            .map(|k| {
                let lam = f.from_i64(k);
                let scaled = RepPoint::new(p.matrices().iter().map(|m| m.scale(&lam, &f)).collect());
                pullback_eval(&f, &q, &e, &maps[0], &scaled).unwrap()
            })
            .collect();
        let top = f.mul(&f.from_i64(6), &pullback_eval(&f, &q, &e, &maps[0], &p).unwrap());
        assert!(!f.is_zero(&top));
        assert_eq!(finite_difference(&f, values), top);
    }
}
