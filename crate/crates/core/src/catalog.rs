//! Brute-force oracles: every small D-ultrametric space up to isometry,
//! and exhaustive search for isometric embeddings.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::fu::fu_size;
use crate::generate;
use crate::metric::DSet;
use crate::space::FiniteMetricSpace;

/// Largest `C(m-1+d, d)` for which the catalog is enumerated.
pub const CATALOG_GUARD: u32 = 10_000;
/// Largest target accepted by [`oracle_embed_search`].
pub const ORACLE_MAX_TARGET: usize = 60;

/// One space per isometry class of D-ultrametric spaces with `1..=m` points.
#[derive(Debug, Clone)]
pub struct UltraCatalog {
    pub m: usize,
    pub dset: DSet,
    /// Ordered by size, then by enumeration order.
    pub spaces: Vec<FiniteMetricSpace>,
}

/// A rooted tree whose internal nodes carry a scale rank (1-based into
/// the non-zero values of D) strictly larger than their children's.
struct Shape {
    size: usize,
    rank: usize,
    /// Indices of the children in the shape table, non-increasing.
    children: Vec<usize>,
}

/// Chooses non-increasing child indices below `bound` whose sizes sum to `remaining`.
fn choose_children(
    table: &[Shape],
    candidates: &[usize],
    bound: usize,
    remaining: usize,
    acc: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if remaining == 0 {
        if acc.len() >= 2 {
            out.push(acc.clone());
        }
        return;
    }
    for (pos, &c) in candidates[..bound].iter().enumerate().rev() {
        if table[c].size <= remaining {
            acc.push(c);
            choose_children(table, candidates, pos + 1, remaining - table[c].size, acc, out);
            acc.pop();
        }
    }
}

fn fill(table: &[Shape], shape: usize, scales: &[u64], next: &mut usize, m: &mut [u64], n: usize) -> std::ops::Range<usize> {
    let s = &table[shape];
    if s.children.is_empty() {
        *next += 1;
        return (*next - 1)..*next;
    }
    let scale = scales[s.rank - 1];
    let ranges: Vec<_> = s.children.iter().map(|&c| fill(table, c, scales, next, m, n)).collect();
    for (a, ra) in ranges.iter().enumerate() {
        for rb in &ranges[a + 1..] {
            for i in ra.clone() {
                for j in rb.clone() {
                    m[i * n + j] = scale;
                    m[j * n + i] = scale;
                }
            }
        }
    }
    ranges[0].start..ranges[ranges.len() - 1].end
}

/// Enumerates scale-labelled tree shapes with at most `m` leaves; each
/// child multiset is listed once, so shapes are pairwise non-isometric.
pub fn enumerate_ultrametrics(m: usize, dset: &DSet) -> Result<UltraCatalog> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    if fu_size(m, dset) > BigUint::from(CATALOG_GUARD) {
        return Err(Error::Guard(format!("catalog for m = {m}, D = {dset} exceeds {CATALOG_GUARD}")));
    }
    let scales = dset.nonzero();
    let mut table = vec![Shape { size: 1, rank: 0, children: Vec::new() }];
    for size in 2..=m {
        for rank in 1..=scales.len() {
            let candidates: Vec<usize> =
                (0..table.len()).filter(|&i| table[i].rank < rank && table[i].size < size).collect();
            let mut found = Vec::new();
            choose_children(&table, &candidates, candidates.len(), size, &mut Vec::new(), &mut found);
            for children in found {
                table.push(Shape { size, rank, children });
            }
        }
    }
    let mut order: Vec<usize> = (0..table.len()).collect();
    order.sort_by_key(|&i| table[i].size);
    let spaces = order
        .into_iter()
        .map(|i| {
            let n = table[i].size;
            let mut matrix = vec![0u64; n * n];
            fill(&table, i, scales, &mut 0, &mut matrix, n);
            FiniteMetricSpace::from_int_fn(generate::ids(n, "p"), |a, b| matrix[a * n + b]).expect("generated ids")
        })
        .collect();
    Ok(UltraCatalog { m, dset: dset.clone(), spaces })
}

fn extend(x: &FiniteMetricSpace, y: &FiniteMetricSpace, map: &mut Vec<usize>, used: &mut [bool]) -> bool {
    let i = map.len();
    if i == x.len() {
        return true;
    }
    for c in 0..y.len() {
        if used[c] || !map.iter().enumerate().all(|(j, &t)| x.d(i, j) == y.d(c, t)) {
            continue;
        }
        used[c] = true;
        map.push(c);
        if extend(x, y, map, used) {
            return true;
        }
        map.pop();
        used[c] = false;
    }
    false
}

/// Backtracking search for an isometric embedding of `x` into `y`;
/// `None` means the search space was exhausted.
pub fn oracle_embed_search(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<Option<Vec<usize>>> {
    if y.len() > ORACLE_MAX_TARGET {
        return Err(Error::TooManyPoints { allowed: ORACLE_MAX_TARGET, got: y.len() });
    }
    if x.len() > y.len() {
        return Ok(None);
    }
    let mut map = Vec::with_capacity(x.len());
    let mut used = vec![false; y.len()];
    Ok(extend(x, y, &mut map, &mut used).then_some(map))
}
