//! Splitting arrows by a multidegree, and the admissibility sets.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{QuiverError, TraceError};
use crate::perm::{ClassIntervals, Permutation};
use crate::quiver::{ArrowClass, Cell, Quiver, VertexId, VertexRole};

/// Degree `r_a` per arrow, indexed like [`Quiver::arrows`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Multidegree(pub Vec<usize>);

impl Multidegree {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    fn class_sum(&self, q: &Quiver, class: ArrowClass) -> usize {
        self.0.iter().enumerate().filter(|(k, _)| q.class(*k) == class).map(|(_, r)| r).sum()
    }

    /// `(r, s, t)` after checking length and nonvacuity.
    pub fn totals(&self, q: &Quiver) -> Result<(usize, usize, usize), QuiverError> {
        if self.0.len() != q.arrows().len() {
            return Err(QuiverError::MultidegreeLength { expected: q.arrows().len(), got: self.0.len() });
        }
        let into_dual = self.class_sum(q, ArrowClass::A2);
        let out_of_dual = self.class_sum(q, ArrowClass::A3);
        if into_dual != out_of_dual {
            return Err(QuiverError::Vacuous { into_dual, out_of_dual });
        }
        let r = self.total();
        Ok((r, into_dual, r - 2 * into_dual))
    }
}

/// Arrows stably sorted by class, keeping declaration order inside each class.
pub fn default_arrow_order(q: &Quiver) -> Vec<usize> {
    let mut order: Vec<usize> = (0..q.arrows().len()).collect();
    order.sort_by_key(|&k| q.class(k));
    order
}

/// The quiver with each arrow `a` replaced by `r_a` copies numbered `0..r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HatQuiver {
    quiver: Quiver,
    rbar: Multidegree,
    order: Vec<usize>,
    f: Vec<usize>,
    t: usize,
    s: usize,
}

impl HatQuiver {
    /// `order` must list each arrow once with every A1 arrow before every A2
    /// arrow before every A3 arrow; `None` uses [`default_arrow_order`].
    pub fn build(q: &Quiver, rbar: &Multidegree, order: Option<&[usize]>) -> Result<Self, QuiverError> {
        let (_, s, t) = rbar.totals(q)?;
        let order = match order {
            None => default_arrow_order(q),
            Some(o) => {
                let mut sorted = o.to_vec();
                sorted.sort_unstable();
                let complete = sorted == (0..q.arrows().len()).collect::<Vec<_>>();
                let monotone = o.windows(2).all(|w| q.class(w[0]) <= q.class(w[1]));
                if !complete || !monotone {
                    return Err(QuiverError::BadArrowOrder);
                }
                o.to_vec()
            }
        };
        let f = order.iter().flat_map(|&a| std::iter::repeat(a).take(rbar.0[a])).collect();
        Ok(HatQuiver { quiver: q.clone(), rbar: rbar.clone(), order, f, t, s })
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn multidegree(&self) -> &Multidegree {
        &self.rbar
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn r(&self) -> usize {
        self.f.len()
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn intervals(&self) -> ClassIntervals {
        ClassIntervals { t: self.t, s: self.s }
    }

    /// The arrow specialization: original arrow of each position.
    pub fn f(&self) -> &[usize] {
        &self.f
    }

    /// Half-open segment of positions belonging to arrow `a`.
    pub fn segment(&self, a: usize) -> std::ops::Range<usize> {
        let start: usize = self.order.iter().take_while(|&&b| b != a).map(|&b| self.rbar.0[b]).sum();
        start..start + self.rbar.0[a]
    }

    pub fn source(&self, j: usize) -> VertexId {
        self.quiver.arrow(self.f[j]).from
    }

    pub fn target(&self, j: usize) -> VertexId {
        self.quiver.arrow(self.f[j]).to
    }

    pub fn admissibility_sets(&self) -> AdmissibilitySets {
        let r = self.r();
        let (t, s) = (self.t, self.s);
        let in_a1 = |j: usize| j < t;
        let in_a2 = |j: usize| (t..t + s).contains(&j);
        let in_a3 = |j: usize| j >= t + s;
        let mut cells = Vec::new();
        for cell in self.quiver.cells() {
            let head = match cell {
                Cell::Ordinary(v) | Cell::Pair(v, _) => v,
            };
            let mut args = BTreeSet::new();
            let mut images = BTreeSet::new();
            for j in 0..r {
                if self.target(j) == head {
                    if in_a1(j) {
                        args.insert(j);
                    } else if in_a3(j) {
                        args.insert(j - s);
                    }
                }
                if self.source(j) == head {
                    if in_a1(j) {
                        images.insert(j);
                    } else if in_a2(j) {
                        images.insert(j + s);
                    }
                }
            }
            if let Cell::Pair(_, tail) = cell {
                args.extend((0..r).filter(|&j| self.source(j) == tail));
                images.extend((0..r).filter(|&j| self.target(j) == tail));
            }
            cells.push(AdmissibilityCell { cell, args, images });
        }
        AdmissibilitySets { r, cells }
    }
}

/// The argument set `𝒯(x)` and image set `ℐ(x)` of one partition cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibilityCell {
    pub cell: Cell,
    pub args: BTreeSet<usize>,
    pub images: BTreeSet<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibilitySets {
    pub r: usize,
    pub cells: Vec<AdmissibilityCell>,
}

impl AdmissibilitySets {
    /// Whether `sigma` maps every `𝒯(x)` onto `ℐ(x)`.
    pub fn in_lq(&self, sigma: &Permutation) -> Result<bool, TraceError> {
        if sigma.len() != self.r {
            return Err(TraceError::SizeMismatch { expected: self.r, got: sigma.len() });
        }
        Ok(self.cells.iter().all(|c| c.args.iter().all(|&j| c.images.contains(&sigma.apply(j)))
            && c.args.len() == c.images.len()))
    }

    /// Cell whose argument set contains position `j`.
    pub fn cell_of_arg(&self, j: usize) -> Option<usize> {
        self.cells.iter().position(|c| c.args.contains(&j))
    }

    /// Every admissible permutation, in lexicographic order.
    pub fn admissible(&self) -> Vec<Permutation> {
        let mut acc: Vec<Vec<Option<usize>>> = vec![vec![None; self.r]];
        for c in &self.cells {
            let args: Vec<usize> = c.args.iter().copied().collect();
            let images: Vec<usize> = c.images.iter().copied().collect();
            if args.len() != images.len() {
                return Vec::new();
            }
            let local = Permutation::all(args.len());
            let mut next = Vec::with_capacity(acc.len() * local.len());
            for partial in &acc {
                for l in &local {
                    let mut p = partial.clone();
                    for (k, &a) in args.iter().enumerate() {
                        p[a] = Some(images[l.apply(k)]);
                    }
                    next.push(p);
                }
            }
            acc = next;
        }
        let mut out: Vec<Permutation> = acc
            .into_iter()
            .filter_map(|p| p.into_iter().collect::<Option<Vec<_>>>())
            .filter_map(|v| Permutation::from_images(v).ok())
            .collect();
        out.sort();
        out
    }
}

/// Dimension attached to a cell for the "sufficiently large" test.
pub fn cell_head(cell: Cell) -> VertexId {
    match cell {
        Cell::Ordinary(v) | Cell::Pair(v, _) => v,
    }
}

/// Role of the head vertex of a cell, for diagnostics.
pub fn cell_role(q: &Quiver, cell: Cell) -> VertexRole {
    q.role(cell_head(cell))
}
