//! Left-invariant ultrametrics on the countable `Z/2` vector space and
//! isometric embeddings of integral ultrametric spaces into it.
//!
//! A filtration `0 = a_0 < a_1 < ...` with dimensions
//! `0 = dim_0 <= dim_1 <= ...` takes `G_{a_n}` to be the span of
//! coordinates `1..=dim_n`; `d(g, h)` is the least `a_n` with
//! `g + h ∈ G_{a_n}`.

use serde::{Serialize, Serializer};

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::metric::{component_indices, ensure_ultrametric, value_set};
use crate::space::FiniteMetricSpace;
use crate::union::{CoarseUnion, DistortionTable};

/// Finitely supported vector over `Z/2` with coordinates `1, 2, ...`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitVector {
    words: Vec<u64>,
}

impl BitVector {
    pub fn identity() -> Self {
        BitVector::default()
    }

    pub fn from_coords(coords: &[u32]) -> Self {
        let mut v = BitVector::identity();
        for &c in coords {
            v.toggle(c);
        }
        v
    }

    /// Flips coordinate `c` (1-based).
    pub fn toggle(&mut self, c: u32) {
        assert!(c >= 1, "coordinates start at 1");
        let bit = (c - 1) as usize;
        if self.words.len() <= bit / 64 {
            self.words.resize(bit / 64 + 1, 0);
        }
        self.words[bit / 64] ^= 1 << (bit % 64);
        self.trim();
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn xor(&self, other: &Self) -> Self {
        let n = self.words.len().max(other.words.len());
        let mut words: Vec<u64> = (0..n)
            .map(|i| self.words.get(i).copied().unwrap_or(0) ^ other.words.get(i).copied().unwrap_or(0))
            .collect();
        while words.last() == Some(&0) {
            words.pop();
        }
        BitVector { words }
    }

    pub fn is_identity(&self) -> bool {
        self.words.is_empty()
    }

    /// Largest coordinate in the support.
    pub fn top(&self) -> Option<u32> {
        let last = *self.words.last()?;
        Some((self.words.len() as u32 - 1) * 64 + (64 - last.leading_zeros()))
    }

    /// Support, ascending.
    pub fn coords(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for (w, &word) in self.words.iter().enumerate() {
            for b in 0..64 {
                if word >> b & 1 == 1 {
                    out.push(w as u32 * 64 + b + 1);
                }
            }
        }
        out
    }
}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl Serialize for BitVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

/// Scales with the dimension of the subgroup at each, as `(scale, dim)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Filtration {
    levels: Vec<(u64, u32)>,
}

impl Filtration {
    /// Requires `(0, 0)` first, strictly increasing scales and
    /// non-decreasing dimensions.
    pub fn new(levels: Vec<(u64, u32)>) -> Result<Self> {
        if levels.first() != Some(&(0, 0)) {
            return Err(Error::InvalidFiltration("the first level must be (0, 0)".into()));
        }
        for w in levels.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidFiltration(format!("scale {} does not exceed {}", w[1].0, w[0].0)));
            }
            if w[0].1 > w[1].1 {
                return Err(Error::InvalidFiltration(format!("dimension drops after scale {}", w[0].0)));
            }
        }
        Ok(Filtration { levels })
    }

    /// Scales `0, 1, 2, ...` with the given dimensions after `dim_0 = 0`.
    pub fn from_dims(dims: &[u32]) -> Result<Self> {
        let levels = std::iter::once((0, 0)).chain(dims.iter().enumerate().map(|(i, &d)| (i as u64 + 1, d))).collect();
        Self::new(levels)
    }

    pub fn levels(&self) -> &[(u64, u32)] {
        &self.levels
    }

    /// Number of coordinates covered.
    pub fn depth(&self) -> u32 {
        self.levels.last().map_or(0, |l| l.1)
    }

    /// Whether the scales are exactly `0, 1, ..., L`.
    fn is_unit_spaced(&self) -> bool {
        self.levels.iter().enumerate().all(|(i, l)| l.0 == i as u64)
    }

    fn dim(&self, n: usize) -> u32 {
        self.levels[n].1
    }
}

/// Least scale whose subgroup contains `g + h`.
pub fn filtration_metric(f: &Filtration, g: &BitVector, h: &BitVector) -> Result<Dist> {
    let diff = g.xor(h);
    let Some(top) = diff.top() else { return Ok(Dist::zero()) };
    f.levels
        .iter()
        .find(|l| l.1 >= top)
        .map(|l| Dist::from_int(l.0))
        .ok_or(Error::BeyondTruncation { coordinate: top, depth: f.depth() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    /// For each level `n <= depth` of the first filtration, the least level
    /// of the second with at least its dimension.
    pub forward: Vec<Option<usize>>,
    pub backward: Vec<Option<usize>>,
    /// First uncovered scale, as `(which filtration, scale)`.
    pub failure: Option<(usize, u64)>,
}

fn cover(from: &Filtration, to: &Filtration, depth: usize) -> Vec<Option<usize>> {
    from.levels
        .iter()
        .take(depth + 1)
        .map(|&(_, dim)| to.levels.iter().position(|l| l.1 >= dim))
        .collect()
}

/// Mutual cofinality of the subgroup chains for the first `depth + 1`
/// levels of each filtration, searching all supplied levels of the other.
pub fn filtrations_equivalent(f1: &Filtration, f2: &Filtration, depth: usize) -> Equivalence {
    let forward = cover(f1, f2, depth);
    let backward = cover(f2, f1, depth);
    let failure = forward
        .iter()
        .position(Option::is_none)
        .map(|n| (1, f1.levels[n].0))
        .or_else(|| backward.iter().position(Option::is_none).map(|n| (2, f2.levels[n].0)));
    Equivalence { equivalent: failure.is_none(), forward, backward, failure }
}

/// `c[n]`: the largest closed ball `B(x, n + 2)`, for `n = 0..=diam`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CapacityProfile {
    pub c: Vec<usize>,
}

pub fn capacity_profile(space: &FiniteMetricSpace) -> Result<CapacityProfile> {
    value_set(space)?;
    ensure_ultrametric(space)?;
    let diam = space.diameter().to_u64().expect("integral");
    let c = (0..=diam)
        .map(|n| {
            let r = Dist::from_int(n + 2);
            (0..space.len()).map(|x| (0..space.len()).filter(|&y| space.d(x, y) <= &r).count()).max().unwrap_or(0)
        })
        .collect();
    Ok(CapacityProfile { c })
}

/// Per threshold `n = 1..=diam`, the tag of each point's `(d <= n-1)`
/// class inside its `(d <= n)` class, and the largest class count.
fn subclass_tags(space: &FiniteMetricSpace, diam: u64) -> Vec<(Vec<u64>, usize)> {
    (1..=diam)
        .map(|n| {
            let fine = component_indices(space, &Dist::from_int(n));
            let coarse = component_indices(space, &Dist::from_int(n + 1));
            let mut fine_of = vec![0; space.len()];
            for (i, c) in fine.iter().enumerate() {
                for &x in c {
                    fine_of[x] = i;
                }
            }
            let mut tags = vec![0u64; space.len()];
            let mut widest = 1;
            for class in &coarse {
                // `fine` is ordered by least id, so first appearance order
                // within the class is id order too.
                let mut seen: Vec<usize> = Vec::new();
                for &x in class {
                    if !seen.contains(&fine_of[x]) {
                        seen.push(fine_of[x]);
                    }
                }
                seen.sort_unstable();
                widest = widest.max(seen.len());
                for &x in class {
                    tags[x] = seen.iter().position(|&f| f == fine_of[x]).expect("listed") as u64;
                }
            }
            (tags, widest)
        })
        .collect()
}

fn bits_for(count: usize) -> u32 {
    usize::BITS - (count.max(1) - 1).leading_zeros()
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupEmbedding {
    pub filtration: Filtration,
    pub images: Vec<GroupImage>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupImage {
    pub point: String,
    pub support: BitVector,
}

/// Isometric embedding of an integral ultrametric space into the group
/// with scales `a_n = n`. At threshold `n` the `(d <= n-1)` subclasses of
/// each `(d <= n)` class get distinct tags (in id order, the first one
/// the identity) written in the coordinates new at level `n`; a point's
/// image is the sum of its tags. Without a filtration the smallest
/// dimensions that fit are used.
pub fn embed_into_group(space: &FiniteMetricSpace, filtration: Option<&Filtration>) -> Result<GroupEmbedding> {
    if space.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    value_set(space)?;
    ensure_ultrametric(space)?;
    let diam = space.diameter().to_u64().expect("integral");
    let tags = subclass_tags(space, diam);
    let filtration = match filtration {
        Some(f) => {
            check_capacity(f, &tags, diam)?;
            f.clone()
        }
        None => {
            let mut dim = 0;
            let dims: Vec<u32> = tags
                .iter()
                .map(|(_, widest)| {
                    dim += bits_for(*widest);
                    dim
                })
                .collect();
            Filtration::from_dims(&dims)?
        }
    };
    let images = place(space, &tags, &filtration);
    let out = GroupEmbedding {
        filtration,
        images: (0..space.len()).map(|x| GroupImage { point: space.id(x).to_string(), support: images[x].clone() }).collect(),
    };
    for a in 0..space.len() {
        for b in (a + 1)..space.len() {
            if space.d(a, b) != &filtration_metric(&out.filtration, &images[a], &images[b])? {
                return Err(Error::NotIsometric { part: 0, a: space.id(a).into(), b: space.id(b).into() });
            }
        }
    }
    Ok(out)
}

fn check_capacity(f: &Filtration, tags: &[(Vec<u64>, usize)], diam: u64) -> Result<()> {
    if !f.is_unit_spaced() {
        return Err(Error::InvalidFiltration("scales must be 0, 1, 2, ...".into()));
    }
    if (f.levels.len() as u64) <= diam {
        return Err(Error::FiltrationTooShallow(diam as usize));
    }
    for (i, (_, widest)) in tags.iter().enumerate() {
        let n = i + 1;
        let available = f.dim(n) - f.dim(n - 1);
        let needed = bits_for(*widest);
        if available < needed {
            return Err(Error::CapacityViolated { scale: n as u64, needed, available });
        }
    }
    Ok(())
}

fn place(space: &FiniteMetricSpace, tags: &[(Vec<u64>, usize)], f: &Filtration) -> Vec<BitVector> {
    let mut images = vec![BitVector::identity(); space.len()];
    for (i, (tag, _)) in tags.iter().enumerate() {
        let base = f.dim(i);
        for (x, &t) in tag.iter().enumerate() {
            for b in 0..64 {
                if t >> b & 1 == 1 {
                    images[x].toggle(base + b + 1);
                }
            }
        }
    }
    images
}

#[derive(Debug, Clone, Serialize)]
pub struct TranslatedBlock {
    pub level: Dist,
    pub diameter: Dist,
    /// Norm of the translation; every image of the block has this norm.
    pub norm: u64,
    pub translation: BitVector,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockEmbedding {
    pub filtration: Filtration,
    pub blocks: Vec<TranslatedBlock>,
    pub images: Vec<GroupImage>,
    /// Original distances against group distances, over all pairs.
    pub distortion: DistortionTable,
}

/// Embeds each block of a union of integral ultrametric blocks with a
/// common filtration and translates block `n` by a single coordinate
/// of norm `s_n > max(r_n, r_{n-1} + diam(B_n), s_{n-1})`, so its image
/// lies in the annulus `s_{n-1} < |g| <= s_n`. A block at level 0 is not
/// translated. Without a filtration the smallest fitting one is built.
pub fn block_translate_embed(u: &CoarseUnion, filtration: Option<&Filtration>) -> Result<BlockEmbedding> {
    let mut levels = Vec::with_capacity(u.len());
    let mut diameters = Vec::with_capacity(u.len());
    let mut tags = Vec::with_capacity(u.len());
    for (s, part) in u.parts.iter().enumerate() {
        value_set(part)?;
        ensure_ultrametric(part)?;
        let level = u.levels[s].to_u64().ok_or_else(|| Error::NonIntegral {
            a: format!("part {s}"),
            b: "base".into(),
            value: u.levels[s].clone(),
        })?;
        let diam = part.diameter().to_u64().expect("integral");
        levels.push(level);
        diameters.push(diam);
        tags.push(subclass_tags(part, diam));
    }

    // Norms: least admissible scale, and with a supplied filtration one
    // that adds at least one coordinate.
    let adds_coordinate = |n: u64| match filtration {
        Some(f) => (n as usize) < f.levels.len() && f.dim(n as usize) > f.dim(n as usize - 1),
        None => true,
    };
    let mut norms = Vec::with_capacity(u.len());
    let mut prev_norm = 0u64;
    for s in 0..u.len() {
        if levels[s] == 0 {
            norms.push(diameters[s]);
            prev_norm = diameters[s];
            continue;
        }
        let prev_level = if s == 0 { 0 } else { levels[s - 1] };
        let mut n = [levels[s], prev_level + diameters[s], prev_norm].into_iter().max().expect("three") + 1;
        if let Some(f) = filtration {
            while !adds_coordinate(n) {
                if n as usize >= f.levels.len() {
                    return Err(Error::FiltrationTooShallow(n as usize));
                }
                n += 1;
            }
        }
        norms.push(n);
        prev_norm = n;
    }

    let filtration = match filtration {
        Some(f) => {
            if !f.is_unit_spaced() {
                return Err(Error::InvalidFiltration("scales must be 0, 1, 2, ...".into()));
            }
            for (s, t) in tags.iter().enumerate() {
                check_capacity(f, t, diameters[s])?;
            }
            f.clone()
        }
        None => {
            let top = norms.iter().chain(&diameters).copied().max().unwrap_or(0);
            let mut need = vec![0u32; top as usize + 1];
            for t in &tags {
                for (i, (_, widest)) in t.iter().enumerate() {
                    need[i + 1] = need[i + 1].max(bits_for(*widest));
                }
            }
            for (s, &n) in norms.iter().enumerate() {
                if levels[s] != 0 {
                    need[n as usize] = need[n as usize].max(1);
                }
            }
            let mut dim = 0;
            let dims: Vec<u32> = need[1..]
                .iter()
                .map(|&k| {
                    dim += k;
                    dim
                })
                .collect();
            Filtration::from_dims(&dims)?
        }
    };

    let mut blocks = Vec::with_capacity(u.len());
    let mut images = vec![BitVector::identity(); u.total.len()];
    for (s, part) in u.parts.iter().enumerate() {
        let translation = if levels[s] == 0 {
            BitVector::identity()
        } else {
            BitVector::from_coords(&[filtration.dim(norms[s] as usize)])
        };
        for (x, image) in place(part, &tags[s], &filtration).into_iter().enumerate() {
            images[u.global(s, x)] = image.xor(&translation);
        }
        blocks.push(TranslatedBlock {
            level: u.levels[s].clone(),
            diameter: Dist::from_int(diameters[s]),
            norm: norms[s],
            translation,
        });
    }

    let n = u.total.len();
    let mut pairs = Vec::new();
    for x in 0..n {
        for y in (x + 1)..n {
            let got = filtration_metric(&filtration, &images[x], &images[y])?;
            if u.owner[x] == u.owner[y] && &got != u.total.d(x, y) {
                return Err(Error::NotIsometric { part: u.owner[x], a: u.total.id(x).into(), b: u.total.id(y).into() });
            }
            pairs.push((u.total.d(x, y).clone(), got));
        }
    }
    let images = (0..n).map(|x| GroupImage { point: u.total.id(x).to_string(), support: images[x].clone() }).collect();
    Ok(BlockEmbedding { filtration, blocks, images, distortion: DistortionTable::from_pairs(pairs) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::enumerate_ultrametrics;
    use crate::generate;
    use crate::metric::{validate_ultrametric, DSet};
    use crate::union::radial_block_decomposition;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit(depth: u32) -> Filtration {
        Filtration::from_dims(&(1..=depth).collect::<Vec<_>>()).unwrap()
    }

    fn random_vector(rng: &mut ChaCha8Rng, depth: u32) -> BitVector {
        let coords: Vec<u32> = (1..=depth).filter(|_| rng.gen_bool(0.3)).collect();
        BitVector::from_coords(&coords)
    }

    #[test]
    fn bit_vectors() {
        let a = BitVector::from_coords(&[1, 3, 70]);
        assert_eq!(a.top(), Some(70));
        assert_eq!(a.coords(), vec![1, 3, 70]);
        assert!(a.xor(&a).is_identity());
        let b = BitVector::from_coords(&[70]);
        assert_eq!(a.xor(&b).coords(), vec![1, 3]);
        assert_eq!(a.xor(&b).top(), Some(3));
    }

    #[test]
    fn metric_examples() {
        let f = unit(8);
        let e = BitVector::identity();
        assert_eq!(filtration_metric(&f, &e, &BitVector::from_coords(&[1, 3])).unwrap(), Dist::from_int(3));
        assert_eq!(filtration_metric(&f, &e, &e).unwrap(), Dist::zero());
        assert!(matches!(
            filtration_metric(&f, &e, &BitVector::from_coords(&[9])),
            Err(Error::BeyondTruncation { coordinate: 9, depth: 8 })
        ));
    }

    #[test]
    fn sampled_metric_is_invariant_ultrametric() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let f = Filtration::from_dims(&[1, 1, 3, 4, 6, 9, 9, 12]).unwrap();
        let pts: Vec<BitVector> = (0..20).map(|_| random_vector(&mut rng, 12)).collect();
        let mut distinct = pts.clone();
        distinct.sort_by_key(|v| v.coords());
        distinct.dedup();
        let s = FiniteMetricSpace::from_fn(generate::ids(distinct.len(), "g"), |i, j| {
            filtration_metric(&f, &distinct[i], &distinct[j]).unwrap()
        })
        .unwrap();
        assert!(validate_ultrametric(&s).is_empty());
        for _ in 0..200 {
            let (k, x, y) = (random_vector(&mut rng, 12), random_vector(&mut rng, 12), random_vector(&mut rng, 12));
            assert_eq!(
                filtration_metric(&f, &k.xor(&x), &k.xor(&y)).unwrap(),
                filtration_metric(&f, &x, &y).unwrap()
            );
        }
    }

    #[test]
    fn subgroups_are_closed() {
        let mut rng = ChaCha8Rng::seed_from_u64(92);
        let f = Filtration::from_dims(&[2, 3, 7]).unwrap();
        for _ in 0..200 {
            let (g, h) = (random_vector(&mut rng, 7), random_vector(&mut rng, 7));
            for &(_, dim) in f.levels() {
                let inside = |v: &BitVector| v.top().is_none_or(|t| t <= dim);
                if inside(&g) && inside(&h) {
                    assert!(inside(&g.xor(&h)));
                }
            }
        }
    }

    #[test]
    fn equivalence_examples() {
        let f1 = Filtration::from_dims(&(1..=40).collect::<Vec<_>>()).unwrap();
        let f2 = Filtration::from_dims(&(1..=40).map(|i| 2 * i).collect::<Vec<_>>()).unwrap();
        assert!(filtrations_equivalent(&f1, &f2, 10).equivalent);
        assert!(filtrations_equivalent(&f1, &f1, 10).equivalent);
        let flat = Filtration::from_dims(&[1, 2, 3, 3, 3, 3, 3, 3, 3, 3, 3]).unwrap();
        let r = filtrations_equivalent(&f1, &flat, 10);
        assert!(!r.equivalent);
        assert_eq!(r.failure, Some((1, 4)));
        assert!(Filtration::new(vec![(0, 1)]).is_err());
    }

    #[test]
    fn equivalence_is_an_equivalence() {
        let fams: Vec<Filtration> = vec![
            Filtration::from_dims(&(1..=60).collect::<Vec<_>>()).unwrap(),
            Filtration::from_dims(&(1..=60).map(|i| 2 * i).collect::<Vec<_>>()).unwrap(),
            Filtration::from_dims(&(1..=60).map(|i| i / 2).collect::<Vec<_>>()).unwrap(),
            Filtration::from_dims(&[3; 60]).unwrap(),
            Filtration::from_dims(&(1..=60).map(|i| i.min(3)).collect::<Vec<_>>()).unwrap(),
            Filtration::from_dims(&(1..=60).map(|i| i.min(4)).collect::<Vec<_>>()).unwrap(),
        ];
        // Bounded families stop below 5, the dimension the slowest growing
        // one reaches by depth 10, so truncation does not blur the verdicts.
        let eq = |a: &Filtration, b: &Filtration| filtrations_equivalent(a, b, 10).equivalent;
        for a in &fams {
            assert!(eq(a, a));
            for b in &fams {
                assert_eq!(eq(a, b), eq(b, a));
                for c in &fams {
                    if eq(a, b) && eq(b, c) {
                        assert!(eq(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn capacity_examples() {
        let s = generate::equidistant(5, 4);
        assert_eq!(capacity_profile(&s).unwrap().c, vec![1, 1, 5, 5, 5]);
        assert_eq!(capacity_profile(&FiniteMetricSpace::single("a")).unwrap().c, vec![1]);
        let mut rng = ChaCha8Rng::seed_from_u64(93);
        let g = generate::random_int_ultrametric(&mut rng, 40, 7);
        let c = capacity_profile(&g).unwrap().c;
        assert!(c.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn group_embedding_examples() {
        let pair = generate::equidistant(2, 3);
        let e = embed_into_group(&pair, None).unwrap();
        let diff = e.images[0].support.xor(&e.images[1].support);
        let (lo, hi) = (e.filtration.dim(2), e.filtration.dim(3));
        assert!(diff.coords().iter().all(|&c| c > lo && c <= hi));
        let one = embed_into_group(&FiniteMetricSpace::single("a"), None).unwrap();
        assert!(one.images[0].support.is_identity());
    }

    #[test]
    fn catalog_embeds_into_group() {
        let c = enumerate_ultrametrics(5, &DSet::range(3)).unwrap();
        for s in &c.spaces {
            embed_into_group(s, None).unwrap();
        }
    }

    #[test]
    fn supplied_filtration_capacity() {
        let s = generate::equidistant(5, 1);
        assert!(matches!(
            embed_into_group(&s, Some(&Filtration::from_dims(&[2]).unwrap())),
            Err(Error::CapacityViolated { scale: 1, needed: 3, available: 2 })
        ));
        embed_into_group(&s, Some(&Filtration::from_dims(&[3, 4]).unwrap())).unwrap();
    }

    #[test]
    fn dims_stay_within_capacity() {
        let mut rng = ChaCha8Rng::seed_from_u64(94);
        for _ in 0..20 {
            let s = generate::random_int_ultrametric(&mut rng, 30, 6);
            let e = embed_into_group(&s, None).unwrap();
            let c = capacity_profile(&s).unwrap().c;
            for n in 1..e.filtration.levels().len() {
                let step = e.filtration.dim(n) - e.filtration.dim(n - 1);
                assert!(1usize << step <= 2 * c[n - 1].max(1));
            }
        }
    }

    #[test]
    fn block_translation() {
        let single = radial_block_decomposition(&FiniteMetricSpace::single("a"), "a").unwrap();
        let b = block_translate_embed(&single, None).unwrap();
        assert!(b.images[0].support.is_identity());

        // Radii 2 and 5 around a.
        let s = FiniteMetricSpace::from_int_fn(vec!["a".into(), "b".into(), "c".into(), "d".into()], |i, j| {
            match (i, j) {
                (0, 1) => 2,
                (2, 3) => 1,
                _ => 5,
            }
        })
        .unwrap();
        let u = radial_block_decomposition(&s, "a").unwrap();
        let b = block_translate_embed(&u, None).unwrap();
        assert!(b.blocks[1].norm > 2);
        assert!(b.blocks[2].norm > 2 + 1);
        assert!(b.blocks.windows(2).all(|w| w[0].norm < w[1].norm || w[0].level.is_zero()));

        let mut rng = ChaCha8Rng::seed_from_u64(95);
        let g = generate::random_int_ultrametric(&mut rng, 25, 5);
        let u = radial_block_decomposition(&g, "p000").unwrap();
        let b = block_translate_embed(&u, None).unwrap();
        for (s, blk) in b.blocks.iter().enumerate() {
            let lower = if s == 0 { 0 } else { b.blocks[s - 1].norm };
            for x in u.part_indices(s) {
                let norm = filtration_metric(&b.filtration, &b.images[x].support, &BitVector::identity()).unwrap();
                assert!(norm <= Dist::from_int(blk.norm));
                if s > 0 {
                    assert!(norm > Dist::from_int(lower));
                }
            }
        }
        let shallow = Filtration::from_dims(&[1, 2]).unwrap();
        assert!(matches!(block_translate_embed(&u, Some(&shallow)), Err(Error::FiltrationTooShallow(_)) | Err(Error::CapacityViolated { .. })));
    }
}
