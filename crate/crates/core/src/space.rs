//! Finite spaces with an exact distance matrix, plus validation reports.

use std::collections::HashMap;

use serde::Serialize;

use crate::dist::Dist;
use crate::error::{Error, Result};

/// A finite set of named points with a square matrix of exact distances.
///
/// Construction only enforces shape (square matrix, unique ids);
/// whether the matrix is actually a metric is what
/// [`validate_metric`](crate::metric::validate_metric) reports.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    points: Vec<String>,
    dist: Vec<Dist>,
    index: HashMap<String, usize>,
}

impl FiniteMetricSpace {
    pub fn new(points: Vec<String>, rows: Vec<Vec<Dist>>) -> Result<Self> {
        let n = points.len();
        if rows.len() != n {
            return Err(Error::NotSquare { points: n, row: rows.len(), len: rows.len() });
        }
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare { points: n, row: i, len: row.len() });
            }
            dist.extend(row);
        }
        Self::from_parts(points, dist)
    }

    /// Builds a space from a distance function. `f` is only called for
    /// `i < j`; the result is symmetric with zero diagonal.
    pub fn from_fn<F>(points: Vec<String>, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Dist,
    {
        let n = points.len();
        let mut dist = vec![Dist::zero(); n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                dist[j * n + i] = v.clone();
                dist[i * n + j] = v;
            }
        }
        Self::from_parts(points, dist)
    }

    /// Integer-valued variant of [`from_fn`](Self::from_fn).
    pub fn from_int_fn<F>(points: Vec<String>, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> u64,
    {
        Self::from_fn(points, |i, j| Dist::from_int(f(i, j)))
    }

    pub fn single(id: impl Into<String>) -> Self {
        Self::from_parts(vec![id.into()], vec![Dist::zero()]).expect("one point is always valid")
    }

    fn from_parts(points: Vec<String>, dist: Vec<Dist>) -> Result<Self> {
        let mut index = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::DuplicateId(p.clone()));
            }
        }
        Ok(Self { points, dist, index })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.points
    }

    pub fn id(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id).ok_or_else(|| Error::UnknownId(id.to_string()))
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> &Dist {
        &self.dist[i * self.points.len() + j]
    }

    pub fn rows(&self) -> Vec<Vec<Dist>> {
        let n = self.len();
        (0..n).map(|i| self.dist[i * n..(i + 1) * n].to_vec()).collect()
    }

    pub fn diameter(&self) -> Dist {
        self.dist.iter().max().cloned().unwrap_or_else(Dist::zero)
    }

    /// Largest distance among the given points.
    pub fn diameter_of(&self, subset: &[usize]) -> Dist {
        let mut best = Dist::zero();
        for (a, &i) in subset.iter().enumerate() {
            for &j in &subset[a + 1..] {
                if self.d(i, j) > &best {
                    best = self.d(i, j).clone();
                }
            }
        }
        best
    }

    /// The subspace on `subset`, in the given order.
    pub fn restrict(&self, subset: &[usize]) -> Self {
        let points = subset.iter().map(|&i| self.points[i].clone()).collect();
        let mut dist = Vec::with_capacity(subset.len() * subset.len());
        for &i in subset {
            for &j in subset {
                dist.push(self.d(i, j).clone());
            }
        }
        Self::from_parts(points, dist).expect("subset of distinct ids")
    }

    /// The subspace on the named points, in the given order.
    pub fn restrict_ids<S: AsRef<str>>(&self, ids: &[S]) -> Result<Self> {
        let subset = ids
            .iter()
            .map(|id| self.require(id.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.restrict(&subset))
    }

    /// The same matrix under new point names.
    pub fn relabel(&self, points: Vec<String>) -> Result<Self> {
        if points.len() != self.len() {
            return Err(Error::MapLength { expected: self.len(), got: points.len() });
        }
        Self::from_parts(points, self.dist.clone())
    }

    /// Point indices sorted by id; the order used for every tie-break.
    pub fn lex_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.points[a].cmp(&self.points[b]));
        order
    }

    /// The matrix as machine integers, when every entry is one.
    pub fn integer_matrix(&self) -> Option<Vec<u64>> {
        self.dist.iter().map(Dist::to_u64).collect()
    }

    pub fn is_integral(&self) -> bool {
        self.dist.iter().all(Dist::is_integer)
    }

    /// Same point set and the same distance for every pair of ids,
    /// regardless of point order.
    pub fn same_metric(&self, other: &Self) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let map: Option<Vec<usize>> = self.points.iter().map(|p| other.index_of(p)).collect();
        let Some(map) = map else { return false };
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| self.d(i, j) == other.d(map[i], map[j])))
    }
}

impl std::fmt::Debug for FiniteMetricSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteMetricSpace")
            .field("points", &self.points)
            .field("dist", &self.rows())
            .finish()
    }
}

/// Point ids for a disjoint union: the original ids when they are
/// already distinct across all parts, otherwise `"{tag}:{id}"`.
pub(crate) fn disjoint_ids(parts: &[&FiniteMetricSpace], tags: &[String]) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    let distinct = parts.iter().flat_map(|p| p.ids()).all(|id| seen.insert(id.as_str()));
    parts
        .iter()
        .zip(tags)
        .flat_map(|(p, tag)| {
            p.ids().iter().map(move |id| if distinct { id.clone() } else { format!("{tag}:{id}") })
        })
        .collect()
}

/// One failed axiom, named by the point ids involved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NonZeroDiagonal { point: String, value: Dist },
    Asymmetric { a: String, b: String },
    ZeroDistance { a: String, b: String },
    /// `d(x,z) > d(x,y) + d(y,z)`.
    Triangle { x: String, y: String, z: String },
    /// `d(x,z) > max(d(x,y), d(y,z))`.
    Ultrametric { x: String, y: String, z: String },
    /// All three sides of the triangle differ.
    NotIsosceles { x: String, y: String, z: String },
    /// Points in different fibers whose distance differs from the base distance.
    CrossFiber { x: String, y: String, total: Dist, base: Dist },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }
}
