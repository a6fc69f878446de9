//! Seeded random generators for test corpora.
//!
//! Ultrametrics come from random dendrograms (recursive splits with
//! strictly decreasing merge heights); general metrics come from random
//! weighted trees (path-length metrics), which are metrics but usually
//! not ultrametrics.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::dist::Dist;
use crate::space::FiniteMetricSpace;

/// `prefix000`, `prefix001`, ...: zero-padded so id order is numeric order.
pub fn ids(n: usize, prefix: &str) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len().max(3);
    (0..n).map(|i| format!("{prefix}{i:0width$}")).collect()
}

/// `n` points pairwise at distance `k`.
pub fn equidistant(n: usize, k: u64) -> FiniteMetricSpace {
    FiniteMetricSpace::from_int_fn(ids(n, "p"), |_, _| k).expect("generated ids are distinct")
}

/// Random split of `points` into `groups` non-empty groups.
fn random_groups<R: Rng>(rng: &mut R, points: &[usize], groups: usize) -> Vec<Vec<usize>> {
    let mut shuffled = points.to_vec();
    shuffled.shuffle(rng);
    let mut out: Vec<Vec<usize>> = (0..groups).map(|g| vec![shuffled[g]]).collect();
    for &p in &shuffled[groups..] {
        let g = rng.gen_range(0..groups);
        out[g].push(p);
    }
    out
}

fn group_count<R: Rng>(rng: &mut R, len: usize, force_singletons: bool) -> usize {
    if force_singletons || len == 2 {
        return len;
    }
    // Mostly binary or ternary splits, occasionally wide ones.
    if rng.gen_bool(0.8) {
        rng.gen_range(2..=len.min(3))
    } else {
        rng.gen_range(2..=len)
    }
}

fn fill_int<R: Rng>(rng: &mut R, points: &[usize], bound: u64, out: &mut [u64], n: usize) {
    if points.len() < 2 {
        return;
    }
    assert!(bound >= 1, "a scale bound of 0 cannot separate points");
    let scale = rng.gen_range(1..=bound);
    let count = group_count(rng, points.len(), scale == 1);
    let groups = random_groups(rng, points, count);
    for (a, ga) in groups.iter().enumerate() {
        for gb in &groups[a + 1..] {
            for &x in ga {
                for &y in gb {
                    out[x * n + y] = scale;
                    out[y * n + x] = scale;
                }
            }
        }
    }
    for g in &groups {
        fill_int(rng, g, scale - 1, out, n);
    }
}

/// Random integral ultrametric on `n` points with values in `{0..=max_value}`.
pub fn random_int_ultrametric<R: Rng>(rng: &mut R, n: usize, max_value: u64) -> FiniteMetricSpace {
    let mut m = vec![0u64; n * n];
    let points: Vec<usize> = (0..n).collect();
    fill_int(rng, &points, max_value.max(1), &mut m, n);
    FiniteMetricSpace::from_int_fn(ids(n, "p"), |i, j| m[i * n + j]).expect("generated ids are distinct")
}

/// Random integral ultrametric whose values lie in the given positive
/// scales (ascending). Needs at least one scale when `n >= 2`.
pub fn random_d_ultrametric<R: Rng>(rng: &mut R, n: usize, scales: &[u64]) -> FiniteMetricSpace {
    let mut rank = vec![0u64; n * n];
    let points: Vec<usize> = (0..n).collect();
    if n >= 2 {
        fill_int(rng, &points, scales.len() as u64, &mut rank, n);
    }
    FiniteMetricSpace::from_int_fn(ids(n, "p"), |i, j| {
        let r = rank[i * n + j];
        if r == 0 {
            0
        } else {
            scales[r as usize - 1]
        }
    })
    .expect("generated ids are distinct")
}

fn random_fraction<R: Rng>(rng: &mut R) -> Dist {
    let denom = rng.gen_range(2..=9u64);
    let numer = rng.gen_range(1..denom);
    Dist::ratio(numer, denom).expect("non-zero denominator")
}

fn fill_rational<R: Rng>(rng: &mut R, points: &[usize], bound: &Dist, out: &mut [Dist], n: usize) {
    if points.len() < 2 {
        return;
    }
    let scale = bound * &random_fraction(rng);
    let count = group_count(rng, points.len(), false);
    let groups = random_groups(rng, points, count);
    for (a, ga) in groups.iter().enumerate() {
        for gb in &groups[a + 1..] {
            for &x in ga {
                for &y in gb {
                    out[x * n + y] = scale.clone();
                    out[y * n + x] = scale.clone();
                }
            }
        }
    }
    for g in &groups {
        fill_rational(rng, g, &scale, out, n);
    }
}

/// Random ultrametric with rational merge heights below `top`.
pub fn random_rational_ultrametric<R: Rng>(rng: &mut R, n: usize, top: u64) -> FiniteMetricSpace {
    let mut m = vec![Dist::zero(); n * n];
    let points: Vec<usize> = (0..n).collect();
    fill_rational(rng, &points, &Dist::from_int(top), &mut m, n);
    FiniteMetricSpace::from_fn(ids(n, "p"), |i, j| m[i * n + j].clone()).expect("generated ids are distinct")
}

/// Path-length metric of a random tree with rational edge weights in
/// `(0, max_weight]`. Each point hangs off a random earlier point.
pub fn random_tree_metric<R: Rng>(rng: &mut R, n: usize, max_weight: u64) -> FiniteMetricSpace {
    let mut m = vec![Dist::zero(); n * n];
    for v in 1..n {
        let parent = rng.gen_range(0..v);
        let w = &Dist::from_int(rng.gen_range(0..max_weight.max(1))) + &random_fraction(rng);
        for u in 0..v {
            let d = &m[u * n + parent] + &w;
            m[u * n + v] = d.clone();
            m[v * n + u] = d;
        }
    }
    FiniteMetricSpace::from_fn(ids(n, "p"), |i, j| m[i * n + j].clone()).expect("generated ids are distinct")
}
