//! Quivers with a partition into ordinary vertices and dual pairs, dimension
//! vectors, arrow classes and the doubled quiver.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::QuiverError;

/// 1-based vertex id.
pub type VertexId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub id: String,
    pub from: VertexId,
    pub to: VertexId,
}

/// A cell of the vertex partition. Cells index the factors of the group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    Ordinary(VertexId),
    /// `(i_q, j_q)`; the second vertex carries the dual space.
    Pair(VertexId, VertexId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexRole {
    Ordinary,
    /// `i_q` of pair `q` (0-based pair index).
    Head(usize),
    /// `j_q`, the starred member.
    Tail(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArrowClass {
    A1,
    A2,
    A3,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    n: usize,
    arrows: Vec<Arrow>,
    ordinary: Vec<VertexId>,
    pairs: Vec<(VertexId, VertexId)>,
    roles: Vec<VertexRole>,
    cell_of: Vec<usize>,
    classes: Vec<ArrowClass>,
    by_id: HashMap<String, usize>,
}

impl Quiver {
    pub fn new(
        n: usize,
        ordinary: Vec<VertexId>,
        pairs: Vec<(VertexId, VertexId)>,
        arrows: Vec<Arrow>,
    ) -> Result<Self, QuiverError> {
        let check = |v: VertexId| {
            if v == 0 || v > n {
                Err(QuiverError::VertexOutOfRange(v, n))
            } else {
                Ok(())
            }
        };
        let mut roles: Vec<Option<VertexRole>> = vec![None; n];
        let mut cell_of = vec![usize::MAX; n];
        let mut assign = |v: VertexId, role: VertexRole, cell: usize| -> Result<(), QuiverError> {
            check(v)?;
            if roles[v - 1].is_some() {
                return Err(QuiverError::VertexInSeveralCells(v));
            }
            roles[v - 1] = Some(role);
            cell_of[v - 1] = cell;
            Ok(())
        };
        for (c, &v) in ordinary.iter().enumerate() {
            assign(v, VertexRole::Ordinary, c)?;
        }
        for (q, &(i, j)) in pairs.iter().enumerate() {
            if i == j {
                check(i)?;
                return Err(QuiverError::PairNotDistinct(i));
            }
            assign(i, VertexRole::Head(q), ordinary.len() + q)?;
            assign(j, VertexRole::Tail(q), ordinary.len() + q)?;
        }
        let roles = roles
            .into_iter()
            .enumerate()
            .map(|(k, r)| r.ok_or(QuiverError::VertexInNoCell(k + 1)))
            .collect::<Result<Vec<_>, _>>()?;

        let mut by_id = HashMap::new();
        let mut classes = Vec::with_capacity(arrows.len());
        for (k, a) in arrows.iter().enumerate() {
            check(a.from)?;
            check(a.to)?;
            if by_id.insert(a.id.clone(), k).is_some() {
                return Err(QuiverError::DuplicateArrow(a.id.clone()));
            }
            let from_star = matches!(roles[a.from - 1], VertexRole::Tail(_));
            let to_star = matches!(roles[a.to - 1], VertexRole::Tail(_));
            classes.push(match (from_star, to_star) {
                (false, false) => ArrowClass::A1,
                (false, true) => ArrowClass::A2,
                (true, false) => ArrowClass::A3,
                (true, true) => return Err(QuiverError::BothEndpointsStarred(a.id.clone())),
            });
        }
        Ok(Quiver { n, arrows, ordinary, pairs, roles, cell_of, classes, by_id })
    }

    /// Every vertex ordinary.
    pub fn ordinary_only(n: usize, arrows: Vec<Arrow>) -> Result<Self, QuiverError> {
        Quiver::new(n, (1..=n).collect(), Vec::new(), arrows)
    }

    /// One ordinary vertex carrying `m` loops named `a1..am` (or `a` when `m == 1`).
    pub fn loops(m: usize) -> Self {
        let arrows = (1..=m)
            .map(|k| Arrow { id: if m == 1 { "a".into() } else { format!("a{k}") }, from: 1, to: 1 })
            .collect();
        Quiver::ordinary_only(1, arrows).expect("loop quiver is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, k: usize) -> &Arrow {
        &self.arrows[k]
    }

    pub fn arrow_index(&self, id: &str) -> Result<usize, QuiverError> {
        self.by_id.get(id).copied().ok_or_else(|| QuiverError::UnknownArrow(id.to_string()))
    }

    pub fn ordinary(&self) -> &[VertexId] {
        &self.ordinary
    }

    pub fn pairs(&self) -> &[(VertexId, VertexId)] {
        &self.pairs
    }

    pub fn role(&self, v: VertexId) -> VertexRole {
        self.roles[v - 1]
    }

    pub fn is_starred(&self, v: VertexId) -> bool {
        matches!(self.role(v), VertexRole::Tail(_))
    }

    /// Ordinary vertices first, then pairs, in declaration order.
    pub fn cells(&self) -> Vec<Cell> {
        self.ordinary
            .iter()
            .map(|&v| Cell::Ordinary(v))
            .chain(self.pairs.iter().map(|&(i, j)| Cell::Pair(i, j)))
            .collect()
    }

    pub fn cell_count(&self) -> usize {
        self.ordinary.len() + self.pairs.len()
    }

    /// Index into [`Quiver::cells`] of the cell containing `v`.
    pub fn cell_of(&self, v: VertexId) -> usize {
        self.cell_of[v - 1]
    }

    pub fn class(&self, arrow: usize) -> ArrowClass {
        self.classes[arrow]
    }

    pub fn classes(&self) -> &[ArrowClass] {
        &self.classes
    }

    /// Involution on vertices of the doubled quiver.
    pub fn star(&self, v: DVertex) -> DVertex {
        match v {
            DVertex::Star(u) => DVertex::Base(u),
            DVertex::Base(u) => match self.role(u) {
                VertexRole::Ordinary => DVertex::Star(u),
                VertexRole::Head(q) => DVertex::Base(self.pairs[q].1),
                VertexRole::Tail(q) => DVertex::Base(self.pairs[q].0),
            },
        }
    }

    /// Origin of a step in the doubled quiver.
    pub fn step_source(&self, step: PathStep) -> DVertex {
        let a = &self.arrows[step.arrow];
        if step.bar {
            self.star(DVertex::Base(a.to))
        } else {
            DVertex::Base(a.from)
        }
    }

    /// End of a step in the doubled quiver.
    pub fn step_target(&self, step: PathStep) -> DVertex {
        let a = &self.arrows[step.arrow];
        if step.bar {
            self.star(DVertex::Base(a.from))
        } else {
            DVertex::Base(a.to)
        }
    }

    pub fn doubled(&self) -> DoubledQuiver<'_> {
        DoubledQuiver { quiver: self }
    }

    pub fn from_json(text: &str) -> Result<(Self, Option<DimensionVector>), QuiverError> {
        let file: QuiverFile = serde_json::from_str(text).map_err(|e| QuiverError::Parse(e.to_string()))?;
        file.into_quiver()
    }
}

impl fmt::Display for Quiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "quiver on {} vertices:", self.n)?;
        for (a, c) in self.arrows.iter().zip(&self.classes) {
            write!(f, " {}:{}->{}[{:?}]", a.id, a.from, a.to, c)?;
        }
        Ok(())
    }
}

/// Vertex of the doubled quiver: `Star(v)` exists only for ordinary `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DVertex {
    Base(VertexId),
    Star(VertexId),
}

/// An arrow of the doubled quiver: `bar` selects the transposed copy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PathStep {
    pub arrow: usize,
    pub bar: bool,
}

impl PathStep {
    pub fn plain(arrow: usize) -> Self {
        PathStep { arrow, bar: false }
    }

    pub fn barred(arrow: usize) -> Self {
        PathStep { arrow, bar: true }
    }

    pub fn involution(self) -> Self {
        PathStep { arrow: self.arrow, bar: !self.bar }
    }
}

/// View of a quiver as its doubled quiver.
#[derive(Clone, Copy, Debug)]
pub struct DoubledQuiver<'a> {
    quiver: &'a Quiver,
}

impl<'a> DoubledQuiver<'a> {
    pub fn quiver(&self) -> &'a Quiver {
        self.quiver
    }

    pub fn vertices(&self) -> Vec<DVertex> {
        let mut v: Vec<DVertex> = (1..=self.quiver.n).map(DVertex::Base).collect();
        v.extend(self.quiver.ordinary.iter().map(|&u| DVertex::Star(u)));
        v
    }

    pub fn steps(&self) -> Vec<PathStep> {
        (0..self.quiver.arrows.len())
            .flat_map(|k| [PathStep::plain(k), PathStep::barred(k)])
            .collect()
    }

    pub fn source(&self, s: PathStep) -> DVertex {
        self.quiver.step_source(s)
    }

    pub fn target(&self, s: PathStep) -> DVertex {
        self.quiver.step_target(s)
    }
}

/// Per-vertex dimensions; star flags are read off the quiver partition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DimensionVector {
    dims: Vec<usize>,
}

impl DimensionVector {
    pub fn new(q: &Quiver, dims: Vec<usize>) -> Result<Self, QuiverError> {
        if dims.len() != q.n {
            return Err(QuiverError::DimensionLength { expected: q.n, got: dims.len() });
        }
        for &(i, j) in &q.pairs {
            if dims[i - 1] != dims[j - 1] {
                return Err(QuiverError::IncompatibleDims {
                    head: i,
                    tail: j,
                    d_head: dims[i - 1],
                    d_tail: dims[j - 1],
                });
            }
        }
        Ok(DimensionVector { dims })
    }

    /// Same dimension at every vertex.
    pub fn uniform(q: &Quiver, d: usize) -> Self {
        DimensionVector { dims: vec![d; q.n] }
    }

    /// Parses `"1:2,2:2"`; vertices not listed default to `default`.
    pub fn parse(q: &Quiver, text: &str, default: Option<usize>) -> Result<Self, QuiverError> {
        let mut dims: Vec<Option<usize>> = vec![default; q.n];
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (v, d) = part
                .split_once(':')
                .ok_or_else(|| QuiverError::Parse(format!("dimension entry `{part}` is not `vertex:dim`")))?;
            let v: usize = v.trim().parse().map_err(|_| QuiverError::Parse(format!("bad vertex `{v}`")))?;
            let d: usize = d.trim().parse().map_err(|_| QuiverError::Parse(format!("bad dimension `{d}`")))?;
            if v == 0 || v > q.n {
                return Err(QuiverError::VertexOutOfRange(v, q.n));
            }
            dims[v - 1] = Some(d);
        }
        let dims = dims
            .into_iter()
            .enumerate()
            .map(|(k, d)| d.ok_or_else(|| QuiverError::Parse(format!("no dimension for vertex {}", k + 1))))
            .collect::<Result<Vec<_>, _>>()?;
        DimensionVector::new(q, dims)
    }

    pub fn at(&self, v: VertexId) -> usize {
        self.dims[v - 1]
    }

    pub fn at_doubled(&self, v: DVertex) -> usize {
        match v {
            DVertex::Base(u) | DVertex::Star(u) => self.dims[u - 1],
        }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.dims
    }

    pub fn max(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    /// Dimension of the group factor attached to a cell.
    pub fn cell_dim(&self, q: &Quiver, cell: usize) -> usize {
        match q.cells()[cell] {
            Cell::Ordinary(v) | Cell::Pair(v, _) => self.at(v),
        }
    }

    /// Shape `(rows, cols)` of the matrix on an arrow.
    pub fn arrow_shape(&self, q: &Quiver, arrow: usize) -> (usize, usize) {
        let a = q.arrow(arrow);
        (self.at(a.to), self.at(a.from))
    }
}

impl fmt::Display for DimensionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().enumerate().map(|(k, d)| format!("{}:{d}", k + 1)).collect();
        f.write_str(&parts.join(","))
    }
}

/// Classes of all arrows after checking that `dv` fits the partition.
pub fn classify_arrows(q: &Quiver, dv: &DimensionVector) -> Result<Vec<ArrowClass>, QuiverError> {
    DimensionVector::new(q, dv.dims.clone())?;
    Ok(q.classes.clone())
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
enum ArrowIdRepr {
    Text(String),
    Number(i64),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
struct ArrowRepr {
    id: ArrowIdRepr,
    from: VertexId,
    to: VertexId,
}

/// On-disk JSON form of a quiver.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct QuiverFile {
    vertices: usize,
    #[serde(default)]
    ordinary: Option<Vec<VertexId>>,
    #[serde(default)]
    pairs: Vec<[VertexId; 2]>,
    arrows: Vec<ArrowRepr>,
    #[serde(default)]
    dims: Option<BTreeMap<String, usize>>,
}

impl QuiverFile {
    fn into_quiver(self) -> Result<(Quiver, Option<DimensionVector>), QuiverError> {
        let paired: Vec<VertexId> = self.pairs.iter().flatten().copied().collect();
        let ordinary = self
            .ordinary
            .unwrap_or_else(|| (1..=self.vertices).filter(|v| !paired.contains(v)).collect());
        let arrows = self
            .arrows
            .into_iter()
            .map(|a| Arrow {
                id: match a.id {
                    ArrowIdRepr::Text(s) => s,
                    ArrowIdRepr::Number(n) => n.to_string(),
                },
                from: a.from,
                to: a.to,
            })
            .collect();
        let q = Quiver::new(self.vertices, ordinary, self.pairs.iter().map(|p| (p[0], p[1])).collect(), arrows)?;
        let dv = match self.dims {
            None => None,
            Some(map) => {
                let text: Vec<String> = map.iter().map(|(k, v)| format!("{k}:{v}")).collect();
                Some(DimensionVector::parse(&q, &text.join(","), None)?)
            }
        };
        Ok((q, dv))
    }
}
