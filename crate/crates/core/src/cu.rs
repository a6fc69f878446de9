//! Address model of the countable universal spaces `CU(D)` and `CU`.
//!
//! A point of `CU(D)` is one natural-number coordinate per non-zero
//! scale, largest scale first; two addresses are at the scale of their
//! first differing coordinate. A point of `CU` is a level `i` and an
//! address in `CU({0..i})`; points on different levels are at the larger
//! level.

use serde::Serialize;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::metric::{discretize, ensure_ultrametric, value_set, DSet};
use crate::resolution::radial_resolution;
use crate::space::FiniteMetricSpace;
use crate::union::DistortionTable;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CUAddress {
    pub dset: DSet,
    /// `coords[0]` belongs to the largest scale.
    pub coords: Vec<u64>,
}

impl CUAddress {
    pub fn new(dset: DSet, coords: Vec<u64>) -> Result<Self> {
        if coords.len() != dset.len() - 1 {
            return Err(Error::MapLength { expected: dset.len() - 1, got: coords.len() });
        }
        Ok(CUAddress { dset, coords })
    }

    pub fn zero(dset: DSet) -> Self {
        let coords = vec![0; dset.len() - 1];
        CUAddress { dset, coords }
    }

    /// Scale of coordinate `i`.
    fn scale(&self, i: usize) -> u64 {
        let nonzero = self.dset.nonzero();
        nonzero[nonzero.len() - 1 - i]
    }
}

pub fn cu_distance(a: &CUAddress, b: &CUAddress) -> Result<Dist> {
    if a.dset != b.dset {
        return Err(Error::ValueSetMismatch(format!("addresses over {} and {}", a.dset, b.dset)));
    }
    Ok(match a.coords.iter().zip(&b.coords).position(|(x, y)| x != y) {
        Some(i) => Dist::from_int(a.scale(i)),
        None => Dist::zero(),
    })
}

/// Isometric embedding of a D-ultrametric space into `CU(D)`.
///
/// At each scale `k`, from the top, a maximal set of points pairwise at
/// distance `k` is chosen greedily in id order; every point lies within
/// `k` of exactly one of them, and the position of that point in the set
/// becomes the coordinate for `k`.
pub fn embed_into_cu_d(space: &FiniteMetricSpace, dset: &DSet) -> Result<Vec<CUAddress>> {
    ensure_ultrametric(space)?;
    let values = value_set(space)?;
    if !values.is_subset_of(dset) {
        return Err(Error::ValueSetMismatch(format!("{values} is not contained in {dset}")));
    }
    let scales: Vec<u64> = dset.nonzero().iter().rev().copied().collect();
    let mut coords = vec![vec![0u64; scales.len()]; space.len()];
    split(space, &space.lex_order(), &scales, 0, &mut coords);
    let addresses: Vec<CUAddress> = coords.into_iter().map(|c| CUAddress { dset: dset.clone(), coords: c }).collect();
    for a in 0..space.len() {
        for b in (a + 1)..space.len() {
            if space.d(a, b) != &cu_distance(&addresses[a], &addresses[b])? {
                return Err(Error::NotIsometric { part: 0, a: space.id(a).into(), b: space.id(b).into() });
            }
        }
    }
    Ok(addresses)
}

/// `subset` is in id order; assigns coordinate `level` and below.
fn split(space: &FiniteMetricSpace, subset: &[usize], scales: &[u64], level: usize, coords: &mut [Vec<u64>]) {
    if level == scales.len() || subset.len() < 2 {
        return;
    }
    let k = Dist::from_int(scales[level]);
    let mut centers: Vec<usize> = Vec::new();
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for &x in subset {
        match centers.iter().position(|&c| space.d(c, x) < &k) {
            Some(p) => parts[p].push(x),
            None => {
                centers.push(x);
                parts.push(vec![x]);
            }
        }
    }
    for (p, part) in parts.iter().enumerate() {
        for &x in part {
            coords[x][level] = p as u64;
        }
        split(space, part, scales, level + 1, coords);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CUPoint {
    pub level: u64,
    /// Address over `{0, 1, ..., level}`.
    pub address: CUAddress,
}

pub fn cu_global_distance(p: &CUPoint, q: &CUPoint) -> Dist {
    if p.level != q.level {
        return Dist::from_int(p.level.max(q.level));
    }
    cu_distance(&p.address, &q.address).expect("same level means same scale set")
}

#[derive(Debug, Clone, Serialize)]
pub struct CUPlacement {
    pub point: String,
    /// Net point the point is sent through (itself for net points).
    pub via: String,
    pub image: CUPoint,
}

#[derive(Debug, Clone, Serialize)]
pub struct CUEmbedding {
    /// Net point whose radii give the levels.
    pub center: String,
    pub net: Vec<String>,
    /// Integral chain ultrametric on the net.
    #[serde(skip)]
    pub net_metric: FiniteMetricSpace,
    pub placements: Vec<CUPlacement>,
    /// Largest distance from a point to the net point it is sent through.
    pub snap_radius: Dist,
    /// Original distances against distances of the images.
    pub distortion: DistortionTable,
}

/// Embeds a finite metric space into `CU`: discretize to a 1-separated
/// net with its chain ultrametric, resolve radially at the least net
/// point, and embed the fiber at radius `t` into `CU({0..t})` on level
/// `t`. Other points go to their nearest net point (ties by id order).
pub fn embed_into_cu(space: &FiniteMetricSpace) -> Result<CUEmbedding> {
    if space.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let disc = discretize(space);
    let net_metric = disc.space.clone();
    let center = net_metric.id(0).to_string();
    let radial = radial_resolution(&net_metric, &center)?;
    let mut images: Vec<Option<CUPoint>> = vec![None; net_metric.len()];
    for (t, fiber) in radial.fibers().into_iter().enumerate() {
        let level = radial.base.id(t).parse::<u64>().map_err(|e| Error::Parse(e.to_string()))?;
        let fiber_space = net_metric.restrict(&fiber);
        let dset = DSet::range(level);
        for (x, address) in fiber.iter().zip(embed_into_cu_d(&fiber_space, &dset)?) {
            images[*x] = Some(CUPoint { level, address });
        }
    }
    let images: Vec<CUPoint> = images.into_iter().map(|p| p.expect("fibers cover the net")).collect();
    for a in 0..net_metric.len() {
        for b in (a + 1)..net_metric.len() {
            if net_metric.d(a, b) != &cu_global_distance(&images[a], &images[b]) {
                return Err(Error::NotIsometric { part: 0, a: net_metric.id(a).into(), b: net_metric.id(b).into() });
            }
        }
    }

    let via: Vec<usize> = (0..space.len())
        .map(|x| {
            (0..disc.net.len())
                .min_by(|&a, &b| space.d(x, disc.net[a]).cmp(space.d(x, disc.net[b])))
                .expect("the net is not empty")
        })
        .collect();
    let snap_radius = (0..space.len()).map(|x| space.d(x, disc.net[via[x]]).clone()).max().unwrap_or_else(Dist::zero);
    let mut pairs = Vec::new();
    for x in 0..space.len() {
        for y in (x + 1)..space.len() {
            pairs.push((space.d(x, y).clone(), cu_global_distance(&images[via[x]], &images[via[y]])));
        }
    }
    let placements = (0..space.len())
        .map(|x| CUPlacement {
            point: space.id(x).to_string(),
            via: net_metric.id(via[x]).to_string(),
            image: images[via[x]].clone(),
        })
        .collect();
    Ok(CUEmbedding {
        center,
        net: net_metric.ids().to_vec(),
        net_metric,
        placements,
        snap_radius,
        distortion: DistortionTable::from_pairs(pairs),
    })
}
