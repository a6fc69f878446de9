//! Splicing fiber metrics along a section.
//!
//! For `x` over `u` and `y` over `t != u` the spliced distance is
//! `max(d_S(u,t), d_u(x, g(u)), d_t(y, g(t)))`; inside a fiber it is the
//! fiber metric.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::resolution::resolution_total;
use crate::space::{disjoint_ids, FiniteMetricSpace};

/// Base space, one fiber per base point and a section point in each.
#[derive(Debug, Clone)]
pub struct SpliceSpec {
    pub base: FiniteMetricSpace,
    pub fibers: Vec<FiniteMetricSpace>,
    /// `section[t]` indexes a point of `fibers[t]`.
    pub section: Vec<usize>,
}

impl SpliceSpec {
    pub fn new(base: FiniteMetricSpace, fibers: Vec<FiniteMetricSpace>, section: Vec<usize>) -> Result<Self> {
        let spec = SpliceSpec { base, fibers, section };
        spec.check_section(&spec.section)?;
        Ok(spec)
    }

    fn check_section(&self, section: &[usize]) -> Result<()> {
        if self.fibers.len() != self.base.len() {
            return Err(Error::MapLength { expected: self.base.len(), got: self.fibers.len() });
        }
        if section.len() != self.base.len() {
            return Err(Error::MapLength { expected: self.base.len(), got: section.len() });
        }
        for (t, (&g, fiber)) in section.iter().zip(&self.fibers).enumerate() {
            if g >= fiber.len() {
                return Err(Error::SectionOutsideFiber { base: self.base.id(t).to_string(), index: g });
            }
        }
        Ok(())
    }
}

/// Spliced total space and, for each total point, the base point it lies over.
pub(crate) fn splice_with_owner(
    base: &FiniteMetricSpace,
    fibers: &[FiniteMetricSpace],
    section: &[usize],
) -> Result<(FiniteMetricSpace, Vec<usize>)> {
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
        let (u, t) = (owner[x], owner[y]);
        if u == t {
            return fibers[u].d(local[x], local[y]).clone();
        }
        let to_section_x = fibers[u].d(local[x], section[u]);
        let to_section_y = fibers[t].d(local[y], section[t]);
        base.d(u, t).clone().max(to_section_x.clone()).max(to_section_y.clone())
    })?;
    Ok((total, owner))
}

/// The spliced metric on the disjoint union of the fibers.
pub fn splice_metric(spec: &SpliceSpec) -> Result<FiniteMetricSpace> {
    spec.check_section(&spec.section)?;
    Ok(splice_with_owner(&spec.base, &spec.fibers, &spec.section)?.0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SectionInvariance {
    /// Every fiber's diameter is at most its base point's distance to the
    /// rest of the base.
    pub condition_holds: bool,
    /// All examined sections produced the same metric.
    pub sections_agree: bool,
    /// That metric is the resolution total (base distance across fibers).
    pub matches_resolution: bool,
    /// Two sections giving different metrics, when the condition fails.
    pub distinguishing: Option<[Vec<usize>; 2]>,
}

/// Compares splicings along `spec.section` and each alternative section.
///
/// When the diameter condition fails, a pair of sections with different
/// spliced metrics is returned: first from the supplied sections, else
/// built by moving the section point of an over-wide fiber across a
/// diameter-realising pair.
pub fn splice_section_invariance(spec: &SpliceSpec, alternatives: &[Vec<usize>]) -> Result<SectionInvariance> {
    let mut sections = vec![spec.section.clone()];
    for alt in alternatives {
        spec.check_section(alt)?;
        sections.push(alt.clone());
    }
    let base = &spec.base;
    let mut wide: Option<usize> = None;
    for u in 0..base.len() {
        let gap = (0..base.len()).filter(|&t| t != u).map(|t| base.d(u, t)).min();
        if let Some(gap) = gap {
            if &spec.fibers[u].diameter() > gap {
                wide = Some(u);
                break;
            }
        }
    }
    let metrics = sections
        .iter()
        .map(|s| splice_with_owner(base, &spec.fibers, s).map(|(m, _)| m))
        .collect::<Result<Vec<_>>>()?;
    let sections_agree = metrics.windows(2).all(|w| w[0] == w[1]);
    let resolution = resolution_total(base, &spec.fibers)?.total;
    let matches_resolution = sections_agree && metrics[0] == resolution;

    let distinguishing = match wide {
        None => None,
        Some(u) => {
            let supplied = (1..metrics.len())
                .find(|&i| metrics[i] != metrics[0])
                .map(|i| [sections[0].clone(), sections[i].clone()]);
            supplied.or_else(|| {
                let fiber = &spec.fibers[u];
                let diam = fiber.diameter();
                let (a, b) = (0..fiber.len())
                    .flat_map(|a| (0..fiber.len()).map(move |b| (a, b)))
                    .find(|&(a, b)| fiber.d(a, b) == &diam)
                    .expect("diameter is attained");
                let mut first = spec.section.clone();
                let mut second = spec.section.clone();
                first[u] = a;
                second[u] = b;
                Some([first, second])
            })
        }
    };
    Ok(SectionInvariance {
        condition_holds: wide.is_none(),
        sections_agree,
        matches_resolution,
        distinguishing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Dist;
    use crate::generate;
    use crate::metric::{validate_metric, validate_ultrametric};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn named(ids: &[&str], f: impl FnMut(usize, usize) -> u64) -> FiniteMetricSpace {
        FiniteMetricSpace::from_int_fn(ids.iter().map(|s| s.to_string()).collect(), f).unwrap()
    }

    fn two_fiber(diam: u64) -> SpliceSpec {
        SpliceSpec::new(
            named(&["u", "t"], |_, _| 7),
            vec![named(&["x1", "x2"], |_, _| diam), FiniteMetricSpace::single("y1")],
            vec![0, 0],
        )
        .unwrap()
    }

    #[test]
    fn formula_example() {
        let m = splice_metric(&two_fiber(3)).unwrap();
        assert_eq!(m.ids(), &["x1".to_string(), "x2".into(), "y1".into()]);
        assert_eq!(m.d(1, 2), &Dist::from_int(7));
        assert_eq!(m.d(0, 2), &Dist::from_int(7));
        assert_eq!(m.d(0, 1), &Dist::from_int(3));

        let far = splice_metric(&two_fiber(9)).unwrap();
        assert_eq!(far.d(1, 2), &Dist::from_int(9));
        assert_eq!(far.d(0, 2), &Dist::from_int(7));
    }

    #[test]
    fn singleton_fibers_give_base() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let base = generate::random_tree_metric(&mut rng, 5, 5);
        let fibers = (0..5).map(|i| FiniteMetricSpace::single(format!("f{i}"))).collect();
        let spec = SpliceSpec::new(base.clone(), fibers, vec![0; 5]).unwrap();
        let m = splice_metric(&spec).unwrap();
        assert_eq!(m.rows(), base.rows());
    }

    #[test]
    fn same_fiber_ignores_section() {
        let a = splice_metric(&two_fiber(3)).unwrap();
        let mut spec = two_fiber(3);
        spec.section = vec![1, 0];
        let b = splice_metric(&spec).unwrap();
        assert_eq!(a.d(0, 1), b.d(0, 1));
    }

    #[test]
    fn section_outside_fiber() {
        let r = SpliceSpec::new(
            named(&["u", "t"], |_, _| 7),
            vec![FiniteMetricSpace::single("x"), FiniteMetricSpace::single("y")],
            vec![0, 1],
        );
        assert!(matches!(r, Err(Error::SectionOutsideFiber { base, index: 1 }) if base == "t"));
    }

    #[test]
    fn invariance_examples() {
        let zero = SpliceSpec::new(
            named(&["u", "t"], |_, _| 7),
            vec![FiniteMetricSpace::single("x"), FiniteMetricSpace::single("y")],
            vec![0, 0],
        )
        .unwrap();
        let r = splice_section_invariance(&zero, &[]).unwrap();
        assert!(r.condition_holds && r.sections_agree && r.matches_resolution);

        // Every section of a fiber with diameter <= 7 gives the same metric.
        let spec = two_fiber(7);
        let r = splice_section_invariance(&spec, &[vec![1, 0]]).unwrap();
        assert!(r.condition_holds && r.sections_agree && r.matches_resolution);
        assert!(r.distinguishing.is_none());

        let spec = two_fiber(9);
        let r = splice_section_invariance(&spec, &[]).unwrap();
        assert!(!r.condition_holds);
        let [s1, s2] = r.distinguishing.unwrap();
        let mut a = spec.clone();
        a.section = s1;
        let mut b = spec.clone();
        b.section = s2;
        assert_ne!(splice_metric(&a).unwrap(), splice_metric(&b).unwrap());
    }

    #[test]
    fn exhaustive_sections_agree_under_condition() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let base = generate::random_int_ultrametric(&mut rng, 3, 3);
            let base = FiniteMetricSpace::from_fn(base.ids().to_vec(), |i, j| &base.d(i, j).clone() * &Dist::from_int(4)).unwrap();
            let fibers: Vec<_> = (0..3).map(|_| generate::random_int_ultrametric(&mut rng, 3, 4)).collect();
            let mut all = Vec::new();
            for a in 0..3 {
                for b in 0..3 {
                    for c in 0..3 {
                        all.push(vec![a, b, c]);
                    }
                }
            }
            let spec = SpliceSpec::new(base, fibers, vec![0, 0, 0]).unwrap();
            let r = splice_section_invariance(&spec, &all).unwrap();
            assert!(r.condition_holds && r.sections_agree && r.matches_resolution);
        }
    }

    #[test]
    fn random_splices_are_metrics() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..60 {
            let nb = rng.gen_range(2..=4);
            let base = generate::random_tree_metric(&mut rng, nb, 6);
            let fibers: Vec<_> = (0..nb).map(|_| {
                let k = rng.gen_range(1..=4);
                generate::random_tree_metric(&mut rng, k, 6)
            }).collect();
            let section = fibers.iter().map(|f| rng.gen_range(0..f.len())).collect();
            let m = splice_metric(&SpliceSpec::new(base, fibers, section).unwrap()).unwrap();
            assert!(validate_metric(&m).is_empty());
        }
        for _ in 0..60 {
            let nb = rng.gen_range(2..=4);
            let base = generate::random_int_ultrametric(&mut rng, nb, 5);
            let fibers: Vec<_> = (0..nb).map(|_| {
                let k = rng.gen_range(1..=4);
                generate::random_int_ultrametric(&mut rng, k, 8)
            }).collect();
            let section = fibers.iter().map(|f| rng.gen_range(0..f.len())).collect();
            let m = splice_metric(&SpliceSpec::new(base, fibers, section).unwrap()).unwrap();
            assert!(validate_ultrametric(&m).is_empty());
        }
    }
}
