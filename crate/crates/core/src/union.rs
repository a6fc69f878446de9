//! Coarse disjoint unions built by splicing parts over a max-ultrametric
//! index space, and their finite-scale checks.

use serde::Serialize;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::metric::{ensure_ultrametric, value_set};
use crate::resolution::{max_metric_space, radial_resolution};
use crate::space::FiniteMetricSpace;
use crate::splice::{splice_with_owner, SpliceSpec};

/// Parts spliced over the index space `{0..n}` with `d(i,j) = max(level_i, level_j)`.
#[derive(Debug, Clone)]
pub struct CoarseUnion {
    pub parts: Vec<FiniteMetricSpace>,
    /// Strictly increasing base value of each part.
    pub levels: Vec<Dist>,
    /// Basepoint (section point) of each part, by local index.
    pub basepoints: Vec<usize>,
    pub total: FiniteMetricSpace,
    /// Part of each total point.
    pub owner: Vec<usize>,
    /// Index in `total` of each part's first point.
    pub offsets: Vec<usize>,
}

impl CoarseUnion {
    /// Splices `parts` with explicit levels and basepoints.
    pub fn with_levels(parts: Vec<FiniteMetricSpace>, levels: Vec<Dist>, basepoints: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::TooFewPoints { needed: 1, got: 0 });
        }
        if let Some(i) = parts.iter().position(FiniteMetricSpace::is_empty) {
            return Err(Error::InvalidArgument(format!("part {i} is empty")));
        }
        if levels.len() != parts.len() {
            return Err(Error::MapLength { expected: parts.len(), got: levels.len() });
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("part levels must be strictly increasing".into()));
        }
        let base = max_metric_space((0..parts.len()).map(|i| i.to_string()).collect(), &levels);
        let spec = SpliceSpec::new(base, parts, basepoints)?;
        let (total, owner) = splice_with_owner(&spec.base, &spec.fibers, &spec.section)?;
        let SpliceSpec { fibers: parts, section: basepoints, .. } = spec;
        let mut offsets = Vec::with_capacity(parts.len());
        let mut next = 0;
        for p in &parts {
            offsets.push(next);
            next += p.len();
        }
        Ok(CoarseUnion { parts, levels, basepoints, total, owner, offsets })
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The index space with its max metric.
    pub fn base(&self) -> FiniteMetricSpace {
        max_metric_space((0..self.len()).map(|i| i.to_string()).collect(), &self.levels)
    }

    /// Total index of local point `x` of part `s`.
    pub fn global(&self, s: usize, x: usize) -> usize {
        self.offsets[s] + x
    }

    /// Part and local index of a total point.
    pub fn local(&self, x: usize) -> (usize, usize) {
        let s = self.owner[x];
        (s, x - self.offsets[s])
    }

    /// Total indices of part `s`.
    pub fn part_indices(&self, s: usize) -> std::ops::Range<usize> {
        self.offsets[s]..self.offsets[s] + self.parts[s].len()
    }

    /// Total index of the basepoint of part `s`.
    pub fn basepoint(&self, s: usize) -> usize {
        self.global(s, self.basepoints[s])
    }

    /// Total indices within `radius` of `center`.
    pub fn ball(&self, center: usize, radius: &Dist) -> Vec<usize> {
        (0..self.total.len()).filter(|&y| self.total.d(center, y) <= radius).collect()
    }
}

/// Splices the parts over levels `c, 2c, ..., nc` with `c = 1 + max part
/// diameter`. Basepoints default to each part's least id.
pub fn coarse_union(parts: Vec<FiniteMetricSpace>, basepoints: Option<Vec<usize>>) -> Result<CoarseUnion> {
    let stride = &Dist::from_int(1) + &parts.iter().map(FiniteMetricSpace::diameter).max().unwrap_or_else(Dist::zero);
    let levels = (1..=parts.len() as u64).map(|i| &stride * &Dist::from_int(i)).collect();
    let basepoints = match basepoints {
        Some(b) => b,
        None => parts.iter().map(|p| p.lex_order().first().copied().unwrap_or(0)).collect(),
    };
    CoarseUnion::with_levels(parts, levels, basepoints)
}

/// Bounded sets `B_s` outside of which points of different parts are
/// further apart than `scale`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundedWitness {
    pub scale: Dist,
    pub sets: Vec<WitnessSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessSet {
    pub part: usize,
    pub points: Vec<String>,
}

impl BoundedWitness {
    /// Parts with a non-empty set.
    pub fn nonempty_parts(&self) -> Vec<usize> {
        self.sets.iter().filter(|s| !s.points.is_empty()).map(|s| s.part).collect()
    }
}

/// A pair of points in different parts, outside the bounded sets, within `scale`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessFailure {
    pub scale: Dist,
    pub x: String,
    pub y: String,
    pub distance: Dist,
}

impl std::fmt::Display for WitnessFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} and {} lie outside the bounded sets at distance {} <= {}", self.x, self.y, self.distance, self.scale)
    }
}

/// Builds `B_s = {x : d(x, g_s) <= M}` for parts with level `<= M`,
/// drops points with no point of another part within `M`, and checks
/// every cross-part pair outside the sets.
pub fn verify_union_at_scale(u: &CoarseUnion, scale: &Dist) -> std::result::Result<BoundedWitness, WitnessFailure> {
    let n = u.total.len();
    let mut inside = vec![false; n];
    for s in 0..u.len() {
        if &u.levels[s] > scale {
            continue;
        }
        let g = u.basepoint(s);
        for x in u.part_indices(s) {
            let near = u.total.d(x, g) <= scale;
            let partnered = (0..n).any(|y| u.owner[y] != s && u.total.d(x, y) <= scale);
            inside[x] = near && partnered;
        }
    }
    for x in 0..n {
        if inside[x] {
            continue;
        }
        for y in (x + 1)..n {
            if !inside[y] && u.owner[x] != u.owner[y] && u.total.d(x, y) <= scale {
                return Err(WitnessFailure {
                    scale: scale.clone(),
                    x: u.total.id(x).to_string(),
                    y: u.total.id(y).to_string(),
                    distance: u.total.d(x, y).clone(),
                });
            }
        }
    }
    let sets = (0..u.len())
        .map(|s| WitnessSet {
            part: s,
            points: u.part_indices(s).filter(|&x| inside[x]).map(|x| u.total.id(x).to_string()).collect(),
        })
        .collect();
    Ok(BoundedWitness { scale: scale.clone(), sets })
}

/// The fibers of the radial resolution at `x0`, as a union whose levels
/// are the radii. Its total is the input metric.
pub fn radial_block_decomposition(space: &FiniteMetricSpace, x0: &str) -> Result<CoarseUnion> {
    value_set(space)?;
    ensure_ultrametric(space)?;
    let r = radial_resolution(space, x0)?;
    let center = space.require(x0)?;
    let fibers = r.fibers();
    let parts: Vec<FiniteMetricSpace> = fibers
        .iter()
        .map(|f| {
            let mut f = f.clone();
            f.sort_by(|&a, &b| space.id(a).cmp(space.id(b)));
            space.restrict(&f)
        })
        .collect();
    let levels: Vec<Dist> = fibers.iter().map(|f| space.d(center, f[0]).clone()).collect();
    let basepoints = parts.iter().map(|_| 0).collect();
    let u = CoarseUnion::with_levels(parts, levels, basepoints)?;
    debug_assert!(u.total.same_metric(space));
    Ok(u)
}

/// For each input distance bound, the largest output distance among
/// pairs within it, and the same with input and output swapped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistortionTable {
    pub expansion: Vec<DistortionRow>,
    pub compression: Vec<DistortionRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistortionRow {
    pub bound: Dist,
    pub worst: Dist,
}

fn running_max(mut pairs: Vec<(Dist, Dist)>) -> Vec<DistortionRow> {
    pairs.sort();
    let mut rows: Vec<DistortionRow> = Vec::new();
    let mut worst = Dist::zero();
    for (bound, out) in pairs {
        if out > worst {
            worst = out;
        }
        match rows.last_mut() {
            Some(last) if last.bound == bound => last.worst = worst.clone(),
            _ => rows.push(DistortionRow { bound, worst: worst.clone() }),
        }
    }
    rows
}

impl DistortionTable {
    /// Table from `(input distance, output distance)` pairs.
    pub fn from_pairs(forward: Vec<(Dist, Dist)>) -> Self {
        let backward = forward.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
        DistortionTable { expansion: running_max(forward), compression: running_max(backward) }
    }

    /// Table of the map `x -> image[x]` from `source` into `target`, over
    /// all pairs of distinct source points.
    pub fn of_map(source: &FiniteMetricSpace, target: &FiniteMetricSpace, image: &[usize]) -> Self {
        let mut forward = Vec::new();
        for x in 0..source.len() {
            for y in (x + 1)..source.len() {
                forward.push((source.d(x, y).clone(), target.d(image[x], image[y]).clone()));
            }
        }
        Self::from_pairs(forward)
    }

    /// Whether every bound maps to itself in both directions.
    pub fn is_identity(&self) -> bool {
        self.expansion.iter().chain(&self.compression).all(|r| r.bound == r.worst)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UnionMap {
    /// Total index in the target of each source total point.
    pub image: Vec<usize>,
    pub distortion: DistortionTable,
}

/// The map of totals induced by isometric embeddings of corresponding parts.
pub fn map_union(u: &CoarseUnion, v: &CoarseUnion, part_maps: &[Vec<usize>]) -> Result<UnionMap> {
    if u.len() != v.len() {
        return Err(Error::MapLength { expected: u.len(), got: v.len() });
    }
    if part_maps.len() != u.len() {
        return Err(Error::MapLength { expected: u.len(), got: part_maps.len() });
    }
    for (s, map) in part_maps.iter().enumerate() {
        let (from, to) = (&u.parts[s], &v.parts[s]);
        if map.len() != from.len() {
            return Err(Error::MapLength { expected: from.len(), got: map.len() });
        }
        if let Some(&bad) = map.iter().find(|&&y| y >= to.len()) {
            return Err(Error::InvalidArgument(format!("part {s} maps to index {bad} outside its target")));
        }
        for a in 0..map.len() {
            for b in (a + 1)..map.len() {
                if from.d(a, b) != to.d(map[a], map[b]) {
                    return Err(Error::NotIsometric {
                        part: s,
                        a: from.id(a).to_string(),
                        b: from.id(b).to_string(),
                    });
                }
            }
        }
    }
    let image: Vec<usize> = (0..u.total.len())
        .map(|x| {
            let (s, local) = u.local(x);
            v.global(s, part_maps[s][local])
        })
        .collect();
    let distortion = DistortionTable::of_map(&u.total, &v.total, &image);
    Ok(UnionMap { image, distortion })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundedPiece {
    pub part: usize,
    pub level: Dist,
    pub points: Vec<String>,
    pub diameter: Dist,
}

/// Splits a set of total points by part, with each piece's diameter.
pub fn union_boundedness_check(u: &CoarseUnion, points: &[usize]) -> Result<Vec<BoundedPiece>> {
    if let Some(&bad) = points.iter().find(|&&x| x >= u.total.len()) {
        return Err(Error::InvalidArgument(format!("point index {bad} outside the union")));
    }
    let mut by_part: Vec<Vec<usize>> = vec![Vec::new(); u.len()];
    for &x in points {
        if !by_part[u.owner[x]].contains(&x) {
            by_part[u.owner[x]].push(x);
        }
    }
    Ok(by_part
        .into_iter()
        .enumerate()
        .filter(|(_, xs)| !xs.is_empty())
        .map(|(s, mut xs)| {
            xs.sort_unstable();
            BoundedPiece {
                part: s,
                level: u.levels[s].clone(),
                diameter: u.total.diameter_of(&xs),
                points: xs.iter().map(|&x| u.total.id(x).to_string()).collect(),
            }
        })
        .collect())
}

/// Truncated model of a union of `points`-point equidistant spaces, the
/// `n`-th at distance `n + 1`, for `n = 1..=levels`.
pub fn counterexample_family(levels: usize, points: usize) -> Result<CoarseUnion> {
    if levels == 0 || points == 0 {
        return Err(Error::InvalidArgument("levels and points per part must be positive".into()));
    }
    let parts = (1..=levels)
        .map(|n| {
            let ids = crate::generate::ids(points, &format!("n{n}p"));
            FiniteMetricSpace::from_int_fn(ids, |_, _| n as u64 + 1).expect("generated ids are distinct")
        })
        .collect();
    coarse_union(parts, None)
}
