//! Metric resolutions: surjections whose cross-fiber distances equal the
//! base distance, and the decompositions built from them.

use serde::Serialize;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::metric::{component_indices, ensure_ultrametric, validate_ultrametric};
use crate::space::{disjoint_ids, FiniteMetricSpace, Report, Violation};

/// A surjection `projection: total -> base`, by point index.
#[derive(Debug, Clone)]
pub struct Resolution {
    pub total: FiniteMetricSpace,
    pub base: FiniteMetricSpace,
    pub projection: Vec<usize>,
}

impl Resolution {
    /// Total-space indices over each base point, in total order.
    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.base.len()];
        for (x, &t) in self.projection.iter().enumerate() {
            out[t].push(x);
        }
        out
    }

    pub fn fiber_space(&self, base_point: usize) -> FiniteMetricSpace {
        self.total.restrict(&self.fibers()[base_point])
    }
}

fn check_surjection(total: usize, base: &FiniteMetricSpace, projection: &[usize]) -> Result<()> {
    if projection.len() != total {
        return Err(Error::MapLength { expected: total, got: projection.len() });
    }
    let mut hit = vec![false; base.len()];
    for &t in projection {
        if t >= base.len() {
            return Err(Error::InvalidArgument(format!("projection target {t} outside base")));
        }
        hit[t] = true;
    }
    match hit.iter().position(|h| !h) {
        Some(t) => Err(Error::NotSurjective(base.id(t).to_string())),
        None => Ok(()),
    }
}

/// Lists every pair in different fibers whose distance differs from the
/// distance of their base points.
pub fn verify_resolution(r: &Resolution) -> Result<Report> {
    check_surjection(r.total.len(), &r.base, &r.projection)?;
    let n = r.total.len();
    let mut violations = Vec::new();
    for x in 0..n {
        for y in (x + 1)..n {
            let (u, t) = (r.projection[x], r.projection[y]);
            if u != t && r.total.d(x, y) != r.base.d(u, t) {
                violations.push(Violation::CrossFiber {
                    x: r.total.id(x).to_string(),
                    y: r.total.id(y).to_string(),
                    total: r.total.d(x, y).clone(),
                    base: r.base.d(u, t).clone(),
                });
            }
        }
    }
    Ok(Report { violations })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AssemblyMode {
    /// Fiber diameters at most half the distance to any other base point.
    General,
    /// Ultrametric base and fibers; fiber diameters at most that distance.
    Ultrametric,
}

/// The total space with fiber metrics inside fibers and base distances
/// across them, without any precondition checks.
pub(crate) fn resolution_total(base: &FiniteMetricSpace, fibers: &[FiniteMetricSpace]) -> Result<Resolution> {
    let tags: Vec<String> = base.ids().to_vec();
    let refs: Vec<&FiniteMetricSpace> = fibers.iter().collect();
    let ids = disjoint_ids(&refs, &tags);
    let mut owner = Vec::with_capacity(ids.len());
    let mut local = Vec::with_capacity(ids.len());
    for (t, f) in fibers.iter().enumerate() {
        for i in 0..f.len() {
            owner.push(t);
            local.push(i);
        }
    }
    let total = FiniteMetricSpace::from_fn(ids, |x, y| {
        if owner[x] == owner[y] {
            fibers[owner[x]].d(local[x], local[y]).clone()
        } else {
            base.d(owner[x], owner[y]).clone()
        }
    })?;
    Ok(Resolution { total, base: base.clone(), projection: owner })
}

/// Assembles the unique total space over `base` whose fiber over base
/// point `t` is `fibers[t]`, after checking the diameter bound of `mode`.
pub fn assemble_total(
    base: &FiniteMetricSpace,
    fibers: &[FiniteMetricSpace],
    mode: AssemblyMode,
) -> Result<Resolution> {
    if fibers.len() != base.len() {
        return Err(Error::MapLength { expected: base.len(), got: fibers.len() });
    }
    if let Some(t) = fibers.iter().position(FiniteMetricSpace::is_empty) {
        return Err(Error::NotSurjective(base.id(t).to_string()));
    }
    if mode == AssemblyMode::Ultrametric {
        ensure_ultrametric(base)?;
        for f in fibers {
            ensure_ultrametric(f)?;
        }
    }
    for (t, fiber) in fibers.iter().enumerate() {
        let nearest = (0..base.len())
            .filter(|&u| u != t)
            .min_by(|&a, &b| base.d(t, a).cmp(base.d(t, b)).then(base.id(a).cmp(base.id(b))));
        let Some(u) = nearest else { continue };
        let bound = match mode {
            AssemblyMode::General => base.d(t, u).half(),
            AssemblyMode::Ultrametric => base.d(t, u).clone(),
        };
        let diameter = fiber.diameter();
        if diameter > bound {
            return Err(Error::FiberTooWide {
                fiber: base.id(t).to_string(),
                diameter,
                bound,
                neighbor: base.id(u).to_string(),
            });
        }
    }
    resolution_total(base, fibers)
}

/// The max-ultrametric `d(u,t) = max(u,t)` on distinct values.
pub(crate) fn max_metric_space(ids: Vec<String>, values: &[Dist]) -> FiniteMetricSpace {
    FiniteMetricSpace::from_fn(ids, |a, b| values[a].clone().max(values[b].clone()))
        .expect("value ids are distinct")
}

/// Resolution `x -> d(x0, x)` onto the set of radii with the max metric.
pub fn radial_resolution(space: &FiniteMetricSpace, x0: &str) -> Result<Resolution> {
    let center = space.require(x0)?;
    ensure_ultrametric(space)?;
    let mut radii: Vec<Dist> = (0..space.len()).map(|x| space.d(center, x).clone()).collect();
    radii.sort();
    radii.dedup();
    let projection = (0..space.len())
        .map(|x| radii.binary_search(space.d(center, x)).expect("radius is listed"))
        .collect();
    let base = max_metric_space(radii.iter().map(Dist::to_string).collect(), &radii);
    Ok(Resolution { total: space.clone(), base, projection })
}

/// Splits an ultrametric space at its diameter `m` into the classes of
/// `d < m`; the base is a copy of the full simplex with side `m`.
/// Each base point is named by the least id of its class.
pub fn top_split(space: &FiniteMetricSpace) -> Result<Resolution> {
    if space.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: space.len() });
    }
    ensure_ultrametric(space)?;
    let m = space.diameter();
    if m.is_zero() {
        return Err(Error::NotMetric(1));
    }
    let classes = component_indices(space, &m);
    let mut projection = vec![0; space.len()];
    for (c, members) in classes.iter().enumerate() {
        for &x in members {
            projection[x] = c;
        }
    }
    let base_ids = classes.iter().map(|c| space.id(c[0]).to_string()).collect();
    let base = FiniteMetricSpace::from_fn(base_ids, |_, _| m.clone())?;
    Ok(Resolution { total: space.clone(), base, projection })
}

/// Sup-distance between distinct non-empty subsets of an ultrametric
/// space. Output points are named `"0"`, `"1"`, ... by subset position.
pub fn subset_sup_metric(space: &FiniteMetricSpace, subsets: &[Vec<usize>]) -> Result<FiniteMetricSpace> {
    ensure_ultrametric(space)?;
    let mut normalized: Vec<Vec<usize>> = Vec::with_capacity(subsets.len());
    for (i, s) in subsets.iter().enumerate() {
        if s.is_empty() {
            return Err(Error::EmptySubset(i));
        }
        if let Some(&bad) = s.iter().find(|&&x| x >= space.len()) {
            return Err(Error::InvalidArgument(format!("subset {i} names point index {bad}")));
        }
        let mut v = s.clone();
        v.sort_unstable();
        v.dedup();
        if let Some(j) = normalized.iter().position(|other| *other == v) {
            return Err(Error::DuplicateSubset(j, i));
        }
        normalized.push(v);
    }
    let ids = (0..subsets.len()).map(|i| i.to_string()).collect();
    let out = FiniteMetricSpace::from_fn(ids, |a, b| {
        let mut best = Dist::zero();
        for &x in &normalized[a] {
            for &y in &normalized[b] {
                if space.d(x, y) > &best {
                    best = space.d(x, y).clone();
                }
            }
        }
        best
    })?;
    debug_assert!(validate_ultrametric(&out).is_empty());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::metric::{validate_isosceles, validate_metric};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn named(ids: &[&str], f: impl FnMut(usize, usize) -> u64) -> FiniteMetricSpace {
        FiniteMetricSpace::from_int_fn(ids.iter().map(|s| s.to_string()).collect(), f).unwrap()
    }

    /// d(a,b)=2, d(a,c)=d(b,c)=5.
    fn abc() -> FiniteMetricSpace {
        named(&["a", "b", "c"], |i, j| if (i, j) == (0, 1) { 2 } else { 5 })
    }

    #[test]
    fn one_point_base_has_no_violations() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let total = generate::random_tree_metric(&mut rng, 6, 3);
        let r = Resolution {
            projection: vec![0; total.len()],
            total,
            base: FiniteMetricSpace::single("*"),
        };
        assert!(verify_resolution(&r).unwrap().is_empty());
    }

    #[test]
    fn mismatched_base_is_reported() {
        let total = abc();
        let base = named(&["a", "b", "c"], |_, _| 5);
        let r = Resolution { total, base, projection: vec![0, 1, 2] };
        let report = verify_resolution(&r).unwrap();
        assert_eq!(report.len(), 1);
        assert!(matches!(&report.violations[0], Violation::CrossFiber { x, y, .. } if x == "a" && y == "b"));
    }

    #[test]
    fn non_surjective_projection_errors() {
        let r = Resolution { total: abc(), base: named(&["u", "t"], |_, _| 5), projection: vec![0, 0, 0] };
        assert!(matches!(verify_resolution(&r), Err(Error::NotSurjective(t)) if t == "t"));
    }

    #[test]
    fn assemble_general_example() {
        let base = named(&["u", "t"], |_, _| 10);
        let fu = named(&["x1", "x2"], |_, _| 4);
        let ft = FiniteMetricSpace::single("y1");
        let r = assemble_total(&base, &[fu.clone(), ft.clone()], AssemblyMode::General).unwrap();
        assert_eq!(r.total.len(), 3);
        assert_eq!(r.total.d(0, 1), &Dist::from_int(4));
        assert_eq!(r.total.d(0, 2), &Dist::from_int(10));
        assert_eq!(r.total.d(1, 2), &Dist::from_int(10));
        assert!(verify_resolution(&r).unwrap().is_empty());
        assert!(validate_metric(&r.total).is_empty());

        let wide = named(&["x1", "x2"], |_, _| 6);
        match assemble_total(&base, &[wide, ft], AssemblyMode::General) {
            Err(Error::FiberTooWide { fiber, neighbor, .. }) => {
                assert_eq!((fiber.as_str(), neighbor.as_str()), ("u", "t"))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn assemble_ultrametric_allows_factor_one() {
        let base = named(&["u", "t"], |_, _| 5);
        let fu = named(&["x1", "x2"], |_, _| 5);
        let ft = FiniteMetricSpace::single("y1");
        let r = assemble_total(&base, &[fu.clone(), ft.clone()], AssemblyMode::Ultrametric).unwrap();
        assert!(validate_ultrametric(&r.total).is_empty());
        assert!(assemble_total(&base, &[fu, ft], AssemblyMode::General).is_err());
    }

    #[test]
    fn assemble_qualifies_colliding_ids() {
        let base = named(&["u", "t"], |_, _| 4);
        let f = FiniteMetricSpace::single("x");
        let r = assemble_total(&base, &[f.clone(), f], AssemblyMode::General).unwrap();
        assert_eq!(r.total.ids(), &["u:x".to_string(), "t:x".to_string()]);
    }

    #[test]
    fn assembly_preserves_isosceles() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let base = generate::random_int_ultrametric(&mut rng, 4, 4);
            let base = FiniteMetricSpace::from_fn(base.ids().to_vec(), |i, j| &base.d(i, j).clone() * &Dist::from_int(10)).unwrap();
            let fibers: Vec<_> = (0..4).map(|_| generate::random_int_ultrametric(&mut rng, 3, 5)).collect();
            let r = assemble_total(&base, &fibers, AssemblyMode::General).unwrap();
            assert!(validate_isosceles(&r.total).is_empty());
            assert!(verify_resolution(&r).unwrap().is_empty());
        }
    }

    #[test]
    fn radial_examples() {
        let r = radial_resolution(&abc(), "a").unwrap();
        assert_eq!(r.base.ids(), &["0".to_string(), "2".into(), "5".into()]);
        assert_eq!(r.base.d(1, 2), &Dist::from_int(5));
        assert_eq!(r.projection, vec![0, 1, 2]);
        assert!(verify_resolution(&r).unwrap().is_empty());

        let one = radial_resolution(&FiniteMetricSpace::single("z"), "z").unwrap();
        assert_eq!(one.base.ids(), &["0".to_string()]);

        let eq = generate::equidistant(5, 3);
        let r = radial_resolution(&eq, eq.id(0)).unwrap();
        assert_eq!(r.base.len(), 2);
        assert_eq!(r.fibers()[1].len(), 4);

        assert!(matches!(radial_resolution(&abc(), "q"), Err(Error::UnknownId(_))));
        let bad = named(&["a", "b", "c"], |i, j| if (i, j) == (1, 2) { 2 } else { 1 });
        assert!(matches!(radial_resolution(&bad, "a"), Err(Error::NotUltrametric { .. })));
    }

    #[test]
    fn radial_is_resolution_on_generated() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..25 {
            let s = generate::random_rational_ultrametric(&mut rng, n, 40);
            for x0 in s.ids() {
                let r = radial_resolution(&s, x0).unwrap();
                assert!(verify_resolution(&r).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn top_split_examples() {
        let r = top_split(&abc()).unwrap();
        assert_eq!(r.base.ids(), &["a".to_string(), "c".into()]);
        assert_eq!(r.base.d(0, 1), &Dist::from_int(5));
        assert_eq!(r.fibers(), vec![vec![0, 1], vec![2]]);

        let eq = generate::equidistant(4, 7);
        assert_eq!(top_split(&eq).unwrap().base.len(), 4);
        assert_eq!(top_split(&generate::equidistant(2, 1)).unwrap().base.len(), 2);
        assert!(matches!(
            top_split(&FiniteMetricSpace::single("a")),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn top_split_fibers_are_narrower() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 2..30 {
            let s = generate::random_int_ultrametric(&mut rng, n, 6);
            let r = top_split(&s).unwrap();
            let m = s.diameter();
            for f in r.fibers() {
                assert!(s.diameter_of(&f) < m);
            }
            assert!(verify_resolution(&r).unwrap().is_empty());
        }
    }

    #[test]
    fn subset_sup_examples() {
        let s = abc();
        let single = subset_sup_metric(&s, &[vec![0], vec![1]]).unwrap();
        assert_eq!(single.d(0, 1), &Dist::from_int(2));
        let ab_c = subset_sup_metric(&s, &[vec![0, 1], vec![2]]).unwrap();
        assert_eq!(ab_c.d(0, 1), &Dist::from_int(5));
        assert!(matches!(subset_sup_metric(&s, &[vec![0], vec![]]), Err(Error::EmptySubset(1))));
        assert!(matches!(
            subset_sup_metric(&s, &[vec![0, 1], vec![2], vec![1, 0]]),
            Err(Error::DuplicateSubset(0, 2))
        ));
    }

    #[test]
    fn subset_sup_is_ultrametric_on_generated() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let s = generate::random_rational_ultrametric(&mut rng, 8, 20);
            let mut family: Vec<Vec<usize>> = Vec::new();
            while family.len() < 6 {
                let mut v: Vec<usize> = (0..8).filter(|_| rng.gen_bool(0.3)).collect();
                if v.is_empty() {
                    v.push(rng.gen_range(0..8));
                }
                if !family.contains(&v) {
                    family.push(v);
                }
            }
            let out = subset_sup_metric(&s, &family).unwrap();
            assert!(validate_ultrametric(&out).is_empty());
            assert!(validate_metric(&out).is_empty());
        }
    }
}
