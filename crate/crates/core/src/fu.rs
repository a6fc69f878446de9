//! The finite universal spaces `FU(m, D)` and the embedding into them.
//!
//! `FU(m, D)` is built from two parts at mutual distance `k = max(D)`:
//! `FU(m, D \ {k})` and `FU(m-1, D)`. The literal variant uses
//! `FU(m-1, D \ {k})` as first part and is kept for comparison; it is too
//! small to be universal (two points at distance 1 do not embed into
//! `FU_literal(2, {0,1,2})`).

use num_bigint::BigUint;
use serde::Serialize;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::metric::{ensure_ultrametric, value_set, DSet};
use crate::resolution::Resolution;
use crate::space::FiniteMetricSpace;

/// Largest space `build_fu` and `embed_into_fu` will materialize.
pub const MAX_FU_POINTS: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Recursion {
    Corrected,
    Literal,
}

#[derive(Debug, Clone)]
pub struct FUSpace {
    pub m: usize,
    pub dset: DSet,
    pub recursion: Recursion,
    pub space: FiniteMetricSpace,
    /// Recursion path of each point: `0` for the first part, `1` for the second.
    pub labels: Vec<String>,
    /// Number of points in the first part (0 for a single point).
    pub first_len: usize,
}

/// `C(m - 1 + d, d)` with `d = |D| - 1`, the size of the corrected `FU(m, D)`.
pub fn fu_size(m: usize, dset: &DSet) -> BigUint {
    if m == 0 {
        return BigUint::from(0u32);
    }
    let d = dset.len() - 1;
    num_integer::binomial(BigUint::from(m - 1 + d), BigUint::from(d))
}

fn is_atomic(m: usize, dset: &DSet) -> bool {
    m <= 1 || dset.len() == 1
}

/// Sizes of the two parts under `recursion`.
fn parts(m: usize, dset: &DSet, recursion: Recursion) -> ((usize, DSet), (usize, DSet)) {
    let first_m = match recursion {
        Recursion::Corrected => m,
        Recursion::Literal => m - 1,
    };
    ((first_m, dset.without_max()), (m - 1, dset.clone()))
}

fn size_of(m: usize, dset: &DSet, recursion: Recursion, cap: usize) -> Option<usize> {
    if is_atomic(m, dset) {
        return Some(1);
    }
    let ((m1, d1), (m2, d2)) = parts(m, dset, recursion);
    let n = size_of(m1, &d1, recursion, cap)?.checked_add(size_of(m2, &d2, recursion, cap)?)?;
    (n <= cap).then_some(n)
}

/// Labels and integer matrix of the recursion, in part order.
fn materialize(m: usize, dset: &DSet, recursion: Recursion, labels: &mut Vec<String>, prefix: &mut String) -> Vec<(usize, usize, u64)> {
    if is_atomic(m, dset) {
        labels.push(prefix.clone());
        return Vec::new();
    }
    let k = dset.top();
    let ((m1, d1), (m2, d2)) = parts(m, dset, recursion);
    let start = labels.len();
    prefix.push('0');
    let mut entries = materialize(m1, &d1, recursion, labels, prefix);
    prefix.pop();
    let mid = labels.len();
    prefix.push('1');
    entries.extend(materialize(m2, &d2, recursion, labels, prefix));
    prefix.pop();
    for a in start..mid {
        for b in mid..labels.len() {
            entries.push((a, b, k));
        }
    }
    entries
}

fn build(m: usize, dset: &DSet, recursion: Recursion) -> Result<FUSpace> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let n = size_of(m, dset, recursion, MAX_FU_POINTS).ok_or_else(|| {
        Error::Guard(format!("FU({m}, {dset}) has more than {MAX_FU_POINTS} points"))
    })?;
    let mut labels = Vec::with_capacity(n);
    let entries = materialize(m, dset, recursion, &mut labels, &mut String::new());
    let mut matrix = vec![0u64; n * n];
    for (a, b, k) in entries {
        matrix[a * n + b] = k;
        matrix[b * n + a] = k;
    }
    let ids = labels.iter().map(|l| format!("x{l}")).collect();
    let space = FiniteMetricSpace::from_int_fn(ids, |a, b| matrix[a * n + b])?;
    let first_len = if is_atomic(m, dset) {
        0
    } else {
        let ((m1, d1), _) = parts(m, dset, recursion);
        size_of(m1, &d1, recursion, MAX_FU_POINTS).expect("smaller than the whole")
    };
    Ok(FUSpace { m, dset: dset.clone(), recursion, space, labels, first_len })
}

/// `FU(m, D) = FU(m, D \ {k}) ⊔_k FU(m-1, D)`; a point when `m = 1` or `D = {0}`.
pub fn build_fu(m: usize, dset: &DSet) -> Result<FUSpace> {
    build(m, dset, Recursion::Corrected)
}

/// `FU(m, D) = FU(m-1, D \ {k}) ⊔_k FU(m-1, D)`; a point when `m = 1` or `D = {0}`.
pub fn build_fu_literal(m: usize, dset: &DSet) -> Result<FUSpace> {
    build(m, dset, Recursion::Literal)
}

impl FUSpace {
    /// The resolution onto `{0, k}` whose fibers are the two parts.
    pub fn part_resolution(&self) -> Option<Resolution> {
        if self.first_len == 0 {
            return None;
        }
        let k = self.dset.top();
        let base = FiniteMetricSpace::from_int_fn(vec!["0".into(), k.to_string()], |_, _| k).expect("two ids");
        let projection = (0..self.space.len()).map(|x| usize::from(x >= self.first_len)).collect();
        Some(Resolution { total: self.space.clone(), base, projection })
    }
}

/// Resolution of a D-ultrametric space with diameter `k = max(D)` onto
/// `{0, k}`: the fiber over 0 is the open `k`-ball around `a`, where
/// `(a, b)` is the first pair at distance `k` in id order.
pub fn top_split_two(space: &FiniteMetricSpace, dset: &DSet) -> Result<Resolution> {
    ensure_ultrametric(space)?;
    let k = Dist::from_int(dset.top());
    let diameter = space.diameter();
    if diameter != k || k.is_zero() {
        return Err(Error::DiameterMismatch { diameter, top: k });
    }
    let a = split_center(space, &(0..space.len()).collect::<Vec<_>>(), &k);
    let projection = (0..space.len()).map(|x| usize::from(space.d(a, x) == &k)).collect();
    let base = FiniteMetricSpace::from_int_fn(vec!["0".into(), dset.top().to_string()], |_, _| dset.top())?;
    Ok(Resolution { total: space.clone(), base, projection })
}

/// First point, in id order, of the first pair in `subset` at distance `k`.
fn split_center(space: &FiniteMetricSpace, subset: &[usize], k: &Dist) -> usize {
    let mut order = subset.to_vec();
    order.sort_by(|&x, &y| space.id(x).cmp(space.id(y)));
    for (i, &a) in order.iter().enumerate() {
        if order[i + 1..].iter().any(|&b| space.d(a, b) == k) {
            return a;
        }
    }
    unreachable!("the subset has a pair at distance k")
}

#[derive(Debug, Clone)]
pub struct FUEmbedding {
    pub target: FUSpace,
    /// Target index of each source point.
    pub map: Vec<usize>,
}

fn embed_rec(space: &FiniteMetricSpace, subset: &[usize], m: usize, dset: &DSet, out: &mut [usize], offset: usize) {
    if subset.len() == 1 {
        out[subset[0]] = offset;
        return;
    }
    debug_assert!(!is_atomic(m, dset));
    let k = Dist::from_int(dset.top());
    let first = dset.without_max();
    if space.diameter_of(subset) < k {
        embed_rec(space, subset, m, &first, out, offset);
        return;
    }
    let a = split_center(space, subset, &k);
    let (near, far): (Vec<usize>, Vec<usize>) = subset.iter().partition(|&&x| space.d(a, x) < &k);
    let first_len = size_of(m, &first, Recursion::Corrected, usize::MAX).expect("no cap");
    embed_rec(space, &near, m, &first, out, offset);
    embed_rec(space, &far, m - 1, dset, out, offset + first_len);
}

/// Embeds an ultrametric space with at most `m` points and values in `D`
/// isometrically into `build_fu(m, D)`, splitting at the top scale and
/// sending the near fiber to the first part and the far fiber to the
/// second. The result is checked pair by pair.
pub fn embed_into_fu(space: &FiniteMetricSpace, m: usize, dset: &DSet) -> Result<FUEmbedding> {
    if space.len() > m {
        return Err(Error::TooManyPoints { allowed: m, got: space.len() });
    }
    if space.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    ensure_ultrametric(space)?;
    let values = value_set(space)?;
    if !values.is_subset_of(dset) {
        return Err(Error::ValueSetMismatch(format!("{values} is not contained in {dset}")));
    }
    let target = build_fu(m, dset)?;
    let mut map = vec![0; space.len()];
    let all: Vec<usize> = (0..space.len()).collect();
    embed_rec(space, &all, m, dset, &mut map, 0);
    for a in 0..space.len() {
        for b in (a + 1)..space.len() {
            if space.d(a, b) != target.space.d(map[a], map[b]) {
                return Err(Error::NotIsometric { part: 0, a: space.id(a).into(), b: space.id(b).into() });
            }
        }
    }
    Ok(FUEmbedding { target, map })
}
