//! Finite prefixes of the proper universal space `PU` and embeddings of
//! coarse unions into it.
//!
//! Block `i` is `FU(m, D_n)` for the `i`-th pair `(m, n)` in Cantor
//! diagonal order `(1,1), (1,2), (2,1), (1,3), ...`, where `D_n` holds 0
//! and every `g` with bit `g - 1` of `n` set. Block `i` sits over radius
//! `r_i = i + diam(Y_1) + ... + diam(Y_i)` and blocks are at distance
//! `max(r_i, r_j)`.

use serde::Serialize;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::fu::{build_fu, embed_into_fu, FUSpace};
use crate::metric::{value_set, DSet};
use crate::resolution::{assemble_total, max_metric_space, AssemblyMode};
use crate::space::FiniteMetricSpace;
use crate::union::{CoarseUnion, DistortionTable};

/// Largest total `build_pu_prefix` will materialize.
pub const MAX_PU_POINTS: usize = 5000;

/// `D_n`: 0 together with `g` for every set bit `g - 1` of `n`.
pub fn dset_index(n: u64) -> Result<DSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("D_n is indexed from 1".into()));
    }
    Ok(DSet::from_values((0..64).filter(|b| n >> b & 1 == 1).map(|b| b + 1)))
}

/// Inverse of [`dset_index`].
pub fn index_dset(dset: &DSet) -> Result<u64> {
    if dset.len() == 1 {
        return Err(Error::InvalidValueSet("{0} has no index".into()));
    }
    let mut n = 0u64;
    for &g in dset.nonzero() {
        if g > 64 {
            return Err(Error::InvalidValueSet(format!("{dset} has values above 64")));
        }
        n |= 1 << (g - 1);
    }
    Ok(n)
}

/// The `i`-th pair `(m, n)`, 1-based, in Cantor diagonal order.
pub fn block_pair(i: u64) -> (u64, u64) {
    assert!(i >= 1, "blocks are numbered from 1");
    // Diagonal s = m + n holds s - 1 pairs; find the one containing i.
    let mut s = 2u64;
    let mut before = 0u64;
    while before + (s - 1) < i {
        before += s - 1;
        s += 1;
    }
    let m = i - before;
    (m, s - m)
}

/// Inverse of [`block_pair`].
pub fn block_index(m: u64, n: u64) -> u64 {
    let s = m + n;
    (s - 2) * (s - 1) / 2 + m
}

/// `0` for `m = 1`, else `max(D_n)`.
pub fn block_diameter(i: u64) -> u64 {
    let (m, n) = block_pair(i);
    if m == 1 {
        0
    } else {
        64 - n.leading_zeros() as u64
    }
}

/// `r_1, ..., r_count`.
pub fn radii(count: u64) -> Vec<u64> {
    let mut sum = 0;
    (1..=count)
        .map(|i| {
            sum += block_diameter(i);
            i + sum
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct PUBlock {
    pub index: u64,
    pub m: u64,
    pub n: u64,
    pub dset: DSet,
    pub radius: u64,
    #[serde(skip)]
    pub fu: FUSpace,
}

#[derive(Debug, Clone)]
pub struct PUPrefix {
    pub blocks: Vec<PUBlock>,
    /// Points relabelled `b{i}:{id}`, blocks in order.
    pub total: FiniteMetricSpace,
    /// Block position of each total point.
    pub projection: Vec<usize>,
}

fn block_space(index: u64, fu: &FUSpace) -> FiniteMetricSpace {
    let ids = fu.space.ids().iter().map(|id| format!("b{index}:{id}")).collect();
    fu.space.relabel(ids).expect("prefixed ids stay distinct")
}

/// The first `count` blocks assembled over the radii with the max metric.
pub fn build_pu_prefix(count: u64) -> Result<PUPrefix> {
    if count == 0 {
        return Err(Error::InvalidArgument("the prefix needs at least one block".into()));
    }
    let radii = radii(count);
    let mut blocks = Vec::new();
    let mut points = 0usize;
    for i in 1..=count {
        let (m, n) = block_pair(i);
        let dset = dset_index(n)?;
        let fu = build_fu(m as usize, &dset)?;
        points += fu.space.len();
        if points > MAX_PU_POINTS {
            return Err(Error::Guard(format!("the first {count} blocks exceed {MAX_PU_POINTS} points")));
        }
        blocks.push(PUBlock { index: i, m, n, dset, radius: radii[i as usize - 1], fu });
    }
    let values: Vec<Dist> = radii.iter().map(|&r| Dist::from_int(r)).collect();
    let base = max_metric_space(blocks.iter().map(|b| format!("b{}", b.index)).collect(), &values);
    let fibers: Vec<FiniteMetricSpace> = blocks.iter().map(|b| block_space(b.index, &b.fu)).collect();
    let r = assemble_total(&base, &fibers, AssemblyMode::Ultrametric)?;
    Ok(PUPrefix { blocks, total: r.total, projection: r.projection })
}

impl PUPrefix {
    /// The prefix as a coarse union over its radii.
    pub fn as_union(&self) -> Result<CoarseUnion> {
        let parts = self.blocks.iter().map(|b| block_space(b.index, &b.fu)).collect();
        let levels = self.blocks.iter().map(|b| Dist::from_int(b.radius)).collect();
        CoarseUnion::with_levels(parts, levels, vec![0; self.blocks.len()])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PUPlacement {
    pub point: String,
    pub block: u64,
    /// Id of the image inside the block's `FU(m, D_n)`.
    pub target: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PUEmbedding {
    /// Block chosen for each part, strictly increasing.
    pub blocks: Vec<u64>,
    pub placements: Vec<PUPlacement>,
    pub distortion: DistortionTable,
}

/// Sends part `k` into the first block after the previous part's block
/// with `m >= |X_k|` and `D_n ⊇ value_set(X_k)`, embedding by
/// [`embed_into_fu`]. Distances between blocks are `max(r_i, r_j)`.
pub fn embed_into_pu(u: &CoarseUnion) -> Result<PUEmbedding> {
    let mut chosen = Vec::with_capacity(u.len());
    let mut maps = Vec::with_capacity(u.len());
    let mut previous = 0u64;
    for part in &u.parts {
        let values = value_set(part)?;
        if values.top() > 64 {
            return Err(Error::InvalidValueSet(format!("{values} has values above 64")));
        }
        let mut i = previous + 1;
        loop {
            let (m, n) = block_pair(i);
            if m as usize >= part.len() && values.is_subset_of(&dset_index(n)?) {
                break;
            }
            i += 1;
        }
        let (m, n) = block_pair(i);
        let e = embed_into_fu(part, m as usize, &dset_index(n)?)?;
        chosen.push(i);
        maps.push(e);
        previous = i;
    }
    let radii = radii(previous);
    let image_distance = |(s, a): (usize, usize), (t, b): (usize, usize)| -> Dist {
        if s == t {
            maps[s].target.space.d(maps[s].map[a], maps[s].map[b]).clone()
        } else {
            let (ri, rj) = (radii[chosen[s] as usize - 1], radii[chosen[t] as usize - 1]);
            Dist::from_int(ri.max(rj))
        }
    };
    let n = u.total.len();
    let mut pairs = Vec::new();
    for x in 0..n {
        for y in (x + 1)..n {
            pairs.push((u.total.d(x, y).clone(), image_distance(u.local(x), u.local(y))));
        }
    }
    for (s, part) in u.parts.iter().enumerate() {
        for a in 0..part.len() {
            for b in (a + 1)..part.len() {
                if part.d(a, b) != &image_distance((s, a), (s, b)) {
                    return Err(Error::NotIsometric { part: s, a: part.id(a).into(), b: part.id(b).into() });
                }
            }
        }
    }
    let placements = (0..n)
        .map(|x| {
            let (s, a) = u.local(x);
            PUPlacement {
                point: u.total.id(x).to_string(),
                block: chosen[s],
                target: maps[s].target.space.id(maps[s].map[a]).to_string(),
            }
        })
        .collect();
    Ok(PUEmbedding { blocks: chosen, placements, distortion: DistortionTable::from_pairs(pairs) })
}
