//! Metric axioms, value sets, scale components and the chain ultrametric.
//!
//! The chain ultrametric of a map `f : X -> Y` assigns to `x != y` the
//! least integer `r >= 1` such that `f(x)` and `f(y)` are joined by a
//! chain whose consecutive distances are all `< r`. The best chain
//! between two points minimises its longest step, and that minimax value
//! is read off a minimum spanning tree of `Y`: it is the longest edge on
//! the tree path. The strict threshold then gives `floor(minimax) + 1`.

use std::collections::VecDeque;

use serde::Serialize;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::space::{FiniteMetricSpace, Report, Violation};
use crate::union_find::UnionFind;

/// A view of the upper triangle used by the triple scans. Integral
/// spaces go through plain `u64` comparisons.
enum Upper<'a> {
    Int { n: usize, m: Vec<u64> },
    Exact(&'a FiniteMetricSpace),
}

impl<'a> Upper<'a> {
    fn of(space: &'a FiniteMetricSpace) -> Self {
        match space.integer_matrix() {
            Some(m) => Upper::Int { n: space.len(), m },
            None => Upper::Exact(space),
        }
    }
}

/// Unordered triples `(i, j, k)` with `i < j < k`, calling `check` with
/// the three side lengths `d(i,j)`, `d(i,k)`, `d(j,k)`.
fn scan_triples<F>(space: &FiniteMetricSpace, mut check: F)
where
    F: FnMut(usize, usize, usize, TripleSides<'_>),
{
    let n = space.len();
    let upper = Upper::of(space);
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let sides = match &upper {
                    Upper::Int { n, m } => {
                        TripleSides::Int([m[i * n + j], m[i * n + k], m[j * n + k]])
                    }
                    Upper::Exact(s) => TripleSides::Exact([s.d(i, j), s.d(i, k), s.d(j, k)]),
                };
                check(i, j, k, sides);
            }
        }
    }
}

enum TripleSides<'a> {
    Int([u64; 3]),
    Exact([&'a Dist; 3]),
}

impl TripleSides<'_> {
    /// For each side (as index 0: ij, 1: ik, 2: jk), whether it exceeds
    /// the sum (`additive`) or the max (`!additive`) of the other two.
    fn exceeding(&self, additive: bool) -> Option<usize> {
        match self {
            TripleSides::Int(s) => {
                let s = s.map(u128::from);
                (0..3).find(|&e| {
                    let (a, b) = others(e);
                    if additive {
                        s[e] > s[a] + s[b]
                    } else {
                        s[e] > s[a].max(s[b])
                    }
                })
            }
            TripleSides::Exact(s) => (0..3).find(|&e| {
                let (a, b) = others(e);
                if additive {
                    *s[e] > s[a] + s[b]
                } else {
                    s[e] > s[a].max(s[b])
                }
            }),
        }
    }

    fn all_distinct(&self) -> bool {
        match self {
            TripleSides::Int([a, b, c]) => a != b && a != c && b != c,
            TripleSides::Exact([a, b, c]) => a != b && a != c && b != c,
        }
    }
}

fn others(side: usize) -> (usize, usize) {
    match side {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Endpoints `(x, z)` and apex `y` of the given side of triangle `(i,j,k)`.
fn side_names(space: &FiniteMetricSpace, i: usize, j: usize, k: usize, side: usize) -> (String, String, String) {
    let (x, y, z) = match side {
        0 => (i, k, j),
        1 => (i, j, k),
        _ => (j, i, k),
    };
    (space.id(x).to_string(), space.id(y).to_string(), space.id(z).to_string())
}

/// Checks zero diagonal, symmetry, positivity off the diagonal and the
/// triangle inequality. Each violation names the offending points.
pub fn validate_metric(space: &FiniteMetricSpace) -> Report {
    let n = space.len();
    let mut violations = Vec::new();
    for i in 0..n {
        if !space.d(i, i).is_zero() {
            violations.push(Violation::NonZeroDiagonal {
                point: space.id(i).to_string(),
                value: space.d(i, i).clone(),
            });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if space.d(i, j) != space.d(j, i) {
                violations.push(Violation::Asymmetric {
                    a: space.id(i).to_string(),
                    b: space.id(j).to_string(),
                });
            }
            if space.d(i, j).is_zero() {
                violations.push(Violation::ZeroDistance {
                    a: space.id(i).to_string(),
                    b: space.id(j).to_string(),
                });
            }
        }
    }
    scan_triples(space, |i, j, k, sides| {
        if let Some(side) = sides.exceeding(true) {
            let (x, y, z) = side_names(space, i, j, k, side);
            violations.push(Violation::Triangle { x, y, z });
        }
    });
    Report { violations }
}

/// Checks `d(x,z) <= max(d(x,y), d(y,z))` on every triple.
pub fn validate_ultrametric(space: &FiniteMetricSpace) -> Report {
    let mut violations = Vec::new();
    scan_triples(space, |i, j, k, sides| {
        if let Some(side) = sides.exceeding(false) {
            let (x, y, z) = side_names(space, i, j, k, side);
            violations.push(Violation::Ultrametric { x, y, z });
        }
    });
    Report { violations }
}

/// Checks that every triple has at least two equal sides.
pub fn validate_isosceles(space: &FiniteMetricSpace) -> Report {
    let mut violations = Vec::new();
    scan_triples(space, |i, j, k, sides| {
        if sides.all_distinct() {
            violations.push(Violation::NotIsosceles {
                x: space.id(i).to_string(),
                y: space.id(j).to_string(),
                z: space.id(k).to_string(),
            });
        }
    });
    Report { violations }
}

/// Fails with [`Error::NotUltrametric`] naming the first bad triple.
pub fn ensure_ultrametric(space: &FiniteMetricSpace) -> Result<()> {
    match validate_ultrametric(space).violations.into_iter().next() {
        Some(Violation::Ultrametric { x, y, z }) => Err(Error::NotUltrametric { x, y, z }),
        _ => Ok(()),
    }
}

/// A finite set of non-negative integers whose least element is 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct DSet(Vec<u64>);

impl DSet {
    /// Takes a strictly increasing list starting at 0.
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.first() != Some(&0) {
            return Err(Error::InvalidValueSet(format!("{values:?} must start with 0")));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidValueSet(format!("{values:?} is not strictly increasing")));
        }
        Ok(DSet(values))
    }

    /// Sorts, removes duplicates and adds 0 if missing.
    pub fn from_values<I: IntoIterator<Item = u64>>(values: I) -> Self {
        let mut v: Vec<u64> = values.into_iter().chain(std::iter::once(0)).collect();
        v.sort_unstable();
        v.dedup();
        DSet(v)
    }

    /// `{0, 1, ..., top}`.
    pub fn range(top: u64) -> Self {
        DSet((0..=top).collect())
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    /// The positive elements, ascending.
    pub fn nonzero(&self) -> &[u64] {
        &self.0[1..]
    }

    pub fn top(&self) -> u64 {
        *self.0.last().expect("a DSet always contains 0")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The set with its largest element removed; `{0}` stays `{0}`.
    pub fn without_max(&self) -> DSet {
        if self.0.len() == 1 {
            return self.clone();
        }
        DSet(self.0[..self.0.len() - 1].to_vec())
    }

    pub fn contains(&self, v: u64) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_subset_of(&self, other: &DSet) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }
}

impl std::fmt::Display for DSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// `{0} ∪ {d(x,y)}` when all distances are non-negative integers.
pub fn value_set(space: &FiniteMetricSpace) -> Result<DSet> {
    let n = space.len();
    let mut values = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            match space.d(i, j).to_u64() {
                Some(v) => values.push(v),
                None => {
                    return Err(Error::NonIntegral {
                        a: space.id(i).to_string(),
                        b: space.id(j).to_string(),
                        value: space.d(i, j).clone(),
                    })
                }
            }
        }
    }
    Ok(DSet::from_values(values))
}

/// Fails with [`Error::OutsideValueSet`] if some distance is not in `allowed`.
pub fn ensure_values_in(space: &FiniteMetricSpace, allowed: &DSet) -> Result<()> {
    let n = space.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let ok = space.d(i, j).to_u64().is_some_and(|v| allowed.contains(v));
            if !ok {
                return Err(Error::OutsideValueSet {
                    a: space.id(i).to_string(),
                    b: space.id(j).to_string(),
                    value: space.d(i, j).clone(),
                });
            }
        }
    }
    Ok(())
}

/// The r-components of a space at one scale.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScalePartition {
    pub scale: Dist,
    /// Member ids sorted within each block; blocks sorted by least id.
    pub blocks: Vec<Vec<String>>,
}

/// Index groups of the relation "joined by a chain with steps `< r`".
/// Members are sorted by id and groups by their least id.
pub(crate) fn component_indices(space: &FiniteMetricSpace, r: &Dist) -> Vec<Vec<usize>> {
    let n = space.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if space.d(i, j) < r {
                uf.union(i, j);
            }
        }
    }
    let mut groups = uf.groups();
    for g in &mut groups {
        g.sort_by(|&a, &b| space.id(a).cmp(space.id(b)));
    }
    groups.sort_by(|a, b| space.id(a[0]).cmp(space.id(b[0])));
    groups
}

/// Partition into maximal r-connected blocks (chains with steps `< r`).
pub fn r_components(space: &FiniteMetricSpace, r: &Dist) -> Result<ScalePartition> {
    if r.is_zero() {
        return Err(Error::NonPositiveScale(r.clone()));
    }
    let blocks = component_indices(space, r)
        .into_iter()
        .map(|g| g.into_iter().map(|i| space.id(i).to_string()).collect())
        .collect();
    Ok(ScalePartition { scale: r.clone(), blocks })
}

/// All-pairs minimax path values: for each pair, the least possible
/// longest step over all chains joining them. Row-major, `n * n`.
pub fn minimax_matrix(space: &FiniteMetricSpace) -> Vec<Dist> {
    let n = space.len();
    let mut out = vec![Dist::zero(); n * n];
    if n <= 1 {
        return out;
    }
    // Prim on the dense matrix.
    let mut in_tree = vec![false; n];
    let mut best: Vec<Option<(Dist, usize)>> = vec![None; n];
    let mut adj: Vec<Vec<(usize, Dist)>> = vec![Vec::new(); n];
    in_tree[0] = true;
    for j in 1..n {
        best[j] = Some((space.d(0, j).clone(), 0));
    }
    for _ in 1..n {
        let mut pick: Option<usize> = None;
        for j in 0..n {
            if in_tree[j] {
                continue;
            }
            let better = match pick {
                None => true,
                Some(p) => best[j].as_ref().map(|b| &b.0) < best[p].as_ref().map(|b| &b.0),
            };
            if better {
                pick = Some(j);
            }
        }
        let v = pick.expect("a vertex remains outside the tree");
        let (w, parent) = best[v].take().expect("every outside vertex has a candidate edge");
        in_tree[v] = true;
        adj[v].push((parent, w.clone()));
        adj[parent].push((v, w));
        for j in 0..n {
            if !in_tree[j] {
                let d = space.d(v, j);
                if best[j].as_ref().is_none_or(|b| d < &b.0) {
                    best[j] = Some((d.clone(), v));
                }
            }
        }
    }
    // Longest edge on each tree path, one traversal per source.
    let mut queue = VecDeque::new();
    for src in 0..n {
        let mut seen = vec![false; n];
        seen[src] = true;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for (v, w) in &adj[u] {
                if !seen[*v] {
                    seen[*v] = true;
                    let m = if w > &out[src * n + u] { w.clone() } else { out[src * n + u].clone() };
                    out[src * n + *v] = m;
                    queue.push_back(*v);
                }
            }
        }
    }
    out
}

/// The chain ultrametric induced by a map into a metric space.
#[derive(Debug, Clone)]
pub struct ChainUltrametric {
    pub space: FiniteMetricSpace,
    /// Pairs of distinct domain points sharing an image. They sit at
    /// distance 1, the least value allowed for distinct points.
    pub collapsed: Vec<(String, String)>,
}

impl ChainUltrametric {
    pub fn is_injective(&self) -> bool {
        self.collapsed.is_empty()
    }

    /// Rejects maps that identify points.
    pub fn into_strict(self) -> Result<FiniteMetricSpace> {
        match self.collapsed.into_iter().next() {
            Some((a, b)) => Err(Error::NotInjective { a, b }),
            None => Ok(self.space),
        }
    }
}

/// Induced integral ultrametric of `f : domain -> target`, where
/// `image[i]` is the index in `target` of `f(domain[i])`.
pub fn chain_ultrametric(
    domain: &[String],
    image: &[usize],
    target: &FiniteMetricSpace,
) -> Result<ChainUltrametric> {
    if image.len() != domain.len() {
        return Err(Error::MapLength { expected: domain.len(), got: image.len() });
    }
    if let Some(&bad) = image.iter().find(|&&t| t >= target.len()) {
        return Err(Error::InvalidArgument(format!("image index {bad} outside target")));
    }
    let minimax = minimax_matrix(target);
    let tn = target.len();
    let mut collapsed = Vec::new();
    for a in 0..domain.len() {
        for b in (a + 1)..domain.len() {
            if image[a] == image[b] {
                collapsed.push((domain[a].clone(), domain[b].clone()));
            }
        }
    }
    let space = FiniteMetricSpace::from_fn(domain.to_vec(), |a, b| {
        minimax[image[a] * tn + image[b]].strict_ceiling()
    })?;
    Ok(ChainUltrametric { space, collapsed })
}

/// Chain ultrametric of the identity map of a space.
pub fn chain_ultrametric_id(space: &FiniteMetricSpace) -> FiniteMetricSpace {
    let image: Vec<usize> = (0..space.len()).collect();
    chain_ultrametric(space.ids(), &image, space)
        .expect("identity map is total")
        .space
}

/// Greedy maximal subset whose pairwise distances exceed `r`, scanning
/// points in id order. Returned indices are in id order.
pub fn separated_net(space: &FiniteMetricSpace, r: &Dist) -> Vec<usize> {
    let mut net: Vec<usize> = Vec::new();
    for p in space.lex_order() {
        if net.iter().all(|&q| space.d(p, q) > r) {
            net.push(p);
        }
    }
    net
}

/// A 1-separated net together with its integral chain ultrametric.
#[derive(Debug, Clone)]
pub struct Discretization {
    /// Indices of net points in the original space, in id order.
    pub net: Vec<usize>,
    /// Integral ultrametric on the net, chains taken through the whole space.
    pub space: FiniteMetricSpace,
}

/// Replaces a space by a 1-separated net carrying the chain ultrametric
/// of its inclusion (chains may pass through non-net points).
pub fn discretize(space: &FiniteMetricSpace) -> Discretization {
    let net = separated_net(space, &Dist::from_int(1));
    let ids: Vec<String> = net.iter().map(|&i| space.id(i).to_string()).collect();
    let chained = chain_ultrametric(&ids, &net, space).expect("inclusion is total and injective");
    Discretization { net, space: chained.space }
}
