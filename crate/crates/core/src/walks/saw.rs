//! Self-avoiding walk counts: exact, in an environment, and under a
//! polynomial confinement radius; end-to-end statistics; and the two-point
//! comparison inequality on open subgraphs.

use std::ops::ControlFlow;

use num_bigint::BigUint;

use crate::environment::EdgeEnvironment;
use crate::lattice::Site;
use crate::{Error, Result};

use super::{check_steps, count_per_depth_split, enumerate_paths, step_edge};

/// Walk counts for every length `0..=n_max` (arbitrary precision at the API
/// boundary; counts at the enforced length bound fit comfortably in u64).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountSeries {
    counts: Vec<BigUint>,
}

impl CountSeries {
    pub(crate) fn from_u64(counts: Vec<u64>) -> Self {
        CountSeries {
            counts: counts.into_iter().map(BigUint::from).collect(),
        }
    }

    /// Largest length in the series.
    pub fn max_len(&self) -> u32 {
        (self.counts.len() - 1) as u32
    }

    pub fn count(&self, n: u32) -> &BigUint {
        &self.counts[n as usize]
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn last(&self) -> &BigUint {
        self.counts.last().unwrap()
    }
}

/// Number of self-avoiding walks of every length up to `n_max`, from one
/// traversal of the walk tree.
pub fn saw_series(n_max: u32) -> Result<CountSeries> {
    check_steps(n_max)?;
    Ok(CountSeries::from_u64(count_per_depth_split(
        Site::origin(),
        n_max,
        |_, _| true,
    )))
}

/// Number of self-avoiding walks with exactly `n` steps.
pub fn count_saws(n: u32) -> Result<BigUint> {
    Ok(saw_series(n)?.last().clone())
}

/// Visit every length-`n` self-avoiding walk from the origin once, in the
/// fixed enumeration order. A `Break` from the visitor aborts the traversal
/// and is returned.
pub fn enumerate_saws(
    n: u32,
    visit: impl FnMut(&[Site]) -> ControlFlow<()>,
) -> Result<ControlFlow<()>> {
    check_steps(n)?;
    Ok(enumerate_paths(Site::origin(), n, |_, _| true, visit))
}

fn require_ball(env: &EdgeEnvironment, x: Site, radius: u32) -> Result<()> {
    if !env.region().contains_ball(x, radius as i64) {
        return Err(Error::RegionCoverage(format!(
            "the radius-{radius} ball around ({},{})",
            x.x, x.y
        )));
    }
    Ok(())
}

/// Open-walk counts from `x` for every length up to `n_max`: a walk counts
/// only if all of its edges are open. The region must cover the l∞ ball of
/// radius `n_max` around `x` so no walk is clipped.
pub fn open_saw_series(env: &EdgeEnvironment, x: Site, n_max: u32) -> Result<CountSeries> {
    check_steps(n_max)?;
    require_ball(env, x, n_max)?;
    Ok(CountSeries::from_u64(count_per_depth_split(
        x,
        n_max,
        |a, b| env.is_open(step_edge(a, b)),
    )))
}

/// Number of open length-`n` self-avoiding walks from `x`.
pub fn count_open_saws(env: &EdgeEnvironment, x: Site, n: u32) -> Result<BigUint> {
    Ok(open_saw_series(env, x, n)?.last().clone())
}

/// Visit every open length-`n` walk from `x` once.
pub fn enumerate_open_saws(
    env: &EdgeEnvironment,
    x: Site,
    n: u32,
    visit: impl FnMut(&[Site]) -> ControlFlow<()>,
) -> Result<ControlFlow<()>> {
    check_steps(n)?;
    require_ball(env, x, n)?;
    Ok(enumerate_paths(
        x,
        n,
        |a, b| env.is_open(step_edge(a, b)),
        visit,
    ))
}

/// Confinement radius `⌊n^alpha⌋` for the sub-ballistic restriction.
pub fn restricted_radius(n: u32, alpha: f64) -> Result<i64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::parameter(
            "alpha",
            format!("{alpha} is not in (0, 1]"),
        ));
    }
    Ok((n as f64).powf(alpha).floor() as i64)
}

/// Number of length-`n` walks whose every site stays within l∞ distance
/// `⌊n^alpha⌋` of the origin.
pub fn count_restricted_saws(n: u32, alpha: f64) -> Result<BigUint> {
    check_steps(n)?;
    let radius = restricted_radius(n, alpha)?;
    let counts = count_per_depth_split(Site::origin(), n, move |_, b| b.linf_norm() <= radius);
    Ok(CountSeries::from_u64(counts).last().clone())
}

/// Number of open length-`n` walks from `x` confined to the l∞ ball of
/// radius `⌊n^alpha⌋` around `x`. The region only needs to cover that ball.
pub fn count_open_restricted_saws(
    env: &EdgeEnvironment,
    x: Site,
    n: u32,
    alpha: f64,
) -> Result<BigUint> {
    check_steps(n)?;
    let radius = restricted_radius(n, alpha)?;
    require_ball(env, x, radius.min(n as i64) as u32)?;
    let counts = count_per_depth_split(x, n, move |a, b| {
        b.linf_distance(x) <= radius && env.is_open(step_edge(a, b))
    });
    Ok(CountSeries::from_u64(counts).last().clone())
}

/// End-to-end summary over all length-`n` walks: mean squared Euclidean
/// displacement of the endpoint, and the distribution of the maximal l∞
/// displacement along the walk (`histogram[r]` = walks whose maximum is `r`).
#[derive(Clone, Debug, PartialEq)]
pub struct EndToEndStats {
    pub walks: BigUint,
    pub mean_square_displacement: f64,
    pub max_displacement_histogram: Vec<u64>,
}

pub fn end_to_end_stats(n: u32) -> Result<EndToEndStats> {
    check_steps(n)?;
    let mut histogram = vec![0u64; n as usize + 1];
    let mut walks = 0u64;
    let mut sum_sq: u128 = 0;
    let _ = enumerate_paths(
        Site::origin(),
        n,
        |_, _| true,
        |path| {
            walks += 1;
            let end = path[path.len() - 1];
            sum_sq += (end.x * end.x + end.y * end.y) as u128;
            let max_disp = path.iter().map(|s| s.linf_norm()).max().unwrap();
            histogram[max_disp as usize] += 1;
            ControlFlow::Continue(())
        },
    );
    Ok(EndToEndStats {
        walks: BigUint::from(walks),
        mean_square_displacement: sum_sq as f64 / walks as f64,
        max_displacement_histogram: histogram,
    })
}

/// Both sides of the comparison inequality for open walks from adjacent
/// sites `x`, `x2`: the count from `x` against the convolution bound through
/// `x2` (length-0 counts are 1 by convention). Exact on the environment.
///
/// The inequality is guaranteed when the edge joining `x` and `x2` is open
/// (the decomposition re-roots walks avoiding `x2` through that edge); the
/// caller can check `env.is_open(...)` for the hypothesis.
pub fn hammersley_terms(
    env: &EdgeEnvironment,
    x: Site,
    x2: Site,
    n: u32,
) -> Result<(BigUint, BigUint)> {
    crate::lattice::canonical_edge(x, x2)?;
    check_steps(n + 1)?;
    let zx = open_saw_series(env, x, n)?;
    let zx2 = open_saw_series(env, x2, n + 1)?;
    let lhs = zx.count(n).clone();
    let mut rhs = zx2.count(n + 1).clone();
    for k in 1..=n {
        rhs += zx2.count(k) * zx2.count(n - k);
    }
    Ok((lhs, rhs))
}

/// Does the comparison inequality hold on this environment for this pair?
pub fn hammersley_check(env: &EdgeEnvironment, x: Site, x2: Site, n: u32) -> Result<bool> {
    let (lhs, rhs) = hammersley_terms(env, x, x2, n)?;
    Ok(lhs <= rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{sample_environment, EdgeEnvironment};
    use crate::lattice::Region;

    #[test]
    fn first_walk_counts() {
        let s = saw_series(5).unwrap();
        let expect = [1u64, 4, 12, 36, 100, 284];
        for (n, e) in expect.iter().enumerate() {
            assert_eq!(s.count(n as u32), &BigUint::from(*e), "n={n}");
        }
        assert_eq!(count_saws(4).unwrap(), BigUint::from(100u32));
    }

    #[test]
    fn length_bound_is_enforced() {
        assert!(matches!(
            count_saws(MAX + 1),
            Err(Error::ResourceBound { .. })
        ));
    }

    const MAX: u32 = super::super::MAX_WALK_STEPS;

    #[test]
    fn enumerate_visits_each_walk_once() {
        let mut n_paths = 0u64;
        let mut seen = std::collections::HashSet::new();
        let flow = enumerate_saws(3, |p| {
            n_paths += 1;
            assert_eq!(p.len(), 4);
            assert!(seen.insert(p.to_vec()));
            ControlFlow::Continue(())
        })
        .unwrap();
        assert_eq!(flow, ControlFlow::Continue(()));
        assert_eq!(n_paths, 36);
    }

    #[test]
    fn open_counts_on_extreme_environments() {
        let r = Region::centered(Site::origin(), 6).unwrap();
        let all = EdgeEnvironment::all_open(r).unwrap();
        assert_eq!(
            count_open_saws(&all, Site::origin(), 5).unwrap(),
            count_saws(5).unwrap()
        );
        let none = EdgeEnvironment::all_closed(r).unwrap();
        assert_eq!(
            count_open_saws(&none, Site::origin(), 1).unwrap(),
            BigUint::from(0u32)
        );
        assert_eq!(
            count_open_saws(&none, Site::origin(), 0).unwrap(),
            BigUint::from(1u32)
        );
    }

    #[test]
    fn open_counts_need_the_full_ball() {
        let r = Region::centered(Site::origin(), 4).unwrap();
        let env = EdgeEnvironment::all_open(r).unwrap();
        assert!(count_open_saws(&env, Site::origin(), 5).is_err());
        assert!(count_open_saws(&env, Site::new(2, 0), 3).is_err());
        assert!(count_open_saws(&env, Site::new(2, 0), 2).is_ok());
    }

    #[test]
    fn single_open_edge_environment() {
        let r = Region::centered(Site::origin(), 3).unwrap();
        let target = crate::lattice::canonical_edge(Site::origin(), Site::new(1, 0)).unwrap();
        let env = EdgeEnvironment::from_fn(r, 0.5, |e| e == target).unwrap();
        assert_eq!(
            count_open_saws(&env, Site::origin(), 1).unwrap(),
            BigUint::from(1u32)
        );
        assert_eq!(
            count_open_saws(&env, Site::origin(), 2).unwrap(),
            BigUint::from(0u32)
        );
    }

    #[test]
    fn open_counts_are_monotone_in_p() {
        let r = Region::centered(Site::origin(), 6).unwrap();
        let f = crate::environment::sample_coupling_field(r, 31).unwrap();
        let lo = f.threshold(0.4).unwrap();
        let hi = f.threshold(0.7).unwrap();
        for n in 0..=6 {
            assert!(
                count_open_saws(&lo, Site::origin(), n).unwrap()
                    <= count_open_saws(&hi, Site::origin(), n).unwrap()
            );
        }
    }

    #[test]
    fn restricted_counts() {
        // alpha = 1 imposes no restriction a walk could violate.
        assert_eq!(
            count_restricted_saws(6, 1.0).unwrap(),
            count_saws(6).unwrap()
        );
        // radius floor(6^0.5) = 2: strictly fewer walks than unrestricted.
        let restricted = count_restricted_saws(6, 0.5).unwrap();
        assert!(restricted < count_saws(6).unwrap());
        assert!(restricted > BigUint::from(0u32));
        assert_eq!(restricted_radius(16, 0.75).unwrap(), 8);
        assert!(restricted_radius(4, 0.0).is_err());
        assert!(restricted_radius(4, 1.5).is_err());
    }

    #[test]
    fn restricted_open_matches_restricted_on_full_environment() {
        let n = 8;
        let radius = restricted_radius(n, 0.75).unwrap();
        let r = Region::centered(Site::origin(), radius).unwrap();
        let env = EdgeEnvironment::all_open(r).unwrap();
        assert_eq!(
            count_open_restricted_saws(&env, Site::origin(), n, 0.75).unwrap(),
            count_restricted_saws(n, 0.75).unwrap()
        );
    }

    #[test]
    fn end_to_end_two_steps() {
        let s = end_to_end_stats(2).unwrap();
        assert_eq!(s.walks, BigUint::from(12u32));
        // 4 straight walks at squared distance 4, 8 bent at 2: mean 8/3.
        assert!((s.mean_square_displacement - 8.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.max_displacement_histogram, vec![0, 8, 4]);
    }

    #[test]
    fn hammersley_on_full_and_empty_environments() {
        let r = Region::centered(Site::origin(), 6).unwrap();
        let full = EdgeEnvironment::all_open(r).unwrap();
        assert!(hammersley_check(&full, Site::origin(), Site::new(1, 0), 3).unwrap());
        let empty = EdgeEnvironment::all_closed(r).unwrap();
        let (lhs, rhs) = hammersley_terms(&empty, Site::origin(), Site::new(1, 0), 3).unwrap();
        assert_eq!(lhs, BigUint::from(0u32));
        assert_eq!(rhs, BigUint::from(0u32));
        assert!(hammersley_check(&empty, Site::origin(), Site::new(1, 0), 3).unwrap());
        assert!(hammersley_check(&full, Site::origin(), Site::new(1, 1), 3).is_err());
    }

    #[test]
    fn hammersley_holds_across_sampled_environments_with_open_join() {
        let r = Region::centered(Site::origin(), 10).unwrap();
        let x = Site::origin();
        let x2 = Site::new(1, 0);
        let join = crate::lattice::canonical_edge(x, x2).unwrap();
        let mut checked = 0;
        for seed in 0..40 {
            let env = sample_environment(r, 0.6, seed).unwrap();
            if !env.is_open(join) {
                continue;
            }
            checked += 1;
            assert!(hammersley_check(&env, x, x2, 6).unwrap(), "seed {seed}");
        }
        assert!(checked > 10);
    }
}
