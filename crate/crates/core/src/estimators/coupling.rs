//! Monotone coupling of environments at two densities, and the conditional
//! walk-count identity it implies.
//!
//! Both environments come from one uniform field by thresholding, so the
//! sparser one is a subset of the denser one edge by edge — walk counts can
//! only drop. Given the denser environment, each of its open edges survives
//! into the sparser one independently with probability p/p2, which pins the
//! conditional mean of the sparse count at `(p/p2)^N` times the dense count.

use num_traits::ToPrimitive;
use serde::Serialize;

use super::{check_samples, Conditioning, EstimateWithCI};
use crate::environment::{sample_coupling_field, sample_environment, EdgeEnvironment};
use crate::exec;
use crate::lattice::{Region, Site};
use crate::rng::derive_seed;
use crate::walks::count_open_saws;
use crate::{Error, Result};

/// Cap on exact integration: the check sums over three states per edge.
pub const MAX_EXHAUSTIVE_EDGES: u64 = 12;

/// Fixed dense environments used for the nested conditional-mean check.
const OUTER_ENVIRONMENTS: u64 = 4;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct IdentityCheck {
    /// `(p/p2)^N` times the dense-environment walk count.
    pub target: f64,
    /// Inner Monte Carlo estimate of the conditional mean.
    pub estimate: EstimateWithCI,
    pub z_score: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExhaustiveCheck {
    pub edge_count: u64,
    /// Dense-environment configurations integrated (2^edges).
    pub configurations: u64,
    /// Largest absolute gap between the integrated conditional mean and its
    /// closed form, over all configurations.
    pub max_abs_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CouplingReport {
    pub p: f64,
    pub p2: f64,
    pub n: u32,
    pub samples: u64,
    /// Coupled samples where the sparse count exceeded the dense count.
    /// Zero by construction; any other value is a bug.
    pub monotonicity_violations: u64,
    pub identity: Vec<IdentityCheck>,
    pub max_abs_z: f64,
}

fn check_pair(p: f64, p2: f64) -> Result<()> {
    if !(p > 0.0 && p < p2 && p2 <= 1.0) {
        return Err(Error::parameter(
            "p",
            format!("need 0 < p < p2 <= 1, got p = {p}, p2 = {p2}"),
        ));
    }
    Ok(())
}

fn count_f64(env: &EdgeEnvironment, n: u32) -> f64 {
    count_open_saws(env, Site::origin(), n)
        .expect("region contains the walk ball")
        .to_f64()
        .expect("open walk counts fit in f64")
}

/// Coupled monotonicity sweep plus the nested Monte Carlo identity check.
///
/// Sample streams: indices `0..samples` drive the coupled sweep, the next
/// few indices fix dense environments, and a disjoint range drives each
/// inner conditional loop, so the three phases never share randomness.
pub fn coupling_experiment(
    p: f64,
    p2: f64,
    n: u32,
    samples: u64,
    seed: u64,
) -> Result<CouplingReport> {
    check_pair(p, p2)?;
    check_samples(samples, 2)?;
    if n == 0 {
        return Err(Error::parameter("n", "need at least one step".to_string()));
    }
    let region = Region::centered(Site::origin(), n as i64)?;
    let ratio = p / p2;

    let violations: Vec<u64> = exec::map_indexed(samples as usize, |i| {
        let field =
            sample_coupling_field(region, derive_seed(seed, i as u64)).expect("validated region");
        let sparse = field.threshold(p).expect("validated probability");
        let dense = field.threshold(p2).expect("validated probability");
        u64::from(count_f64(&sparse, n) > count_f64(&dense, n))
    });
    let monotonicity_violations = violations.iter().sum();

    let mut identity = Vec::new();
    let mut max_abs_z: f64 = 0.0;
    for k in 0..OUTER_ENVIRONMENTS {
        let dense = sample_environment(region, p2, derive_seed(seed, samples + k))?;
        let target = ratio.powi(n as i32) * count_f64(&dense, n);
        let base = samples + OUTER_ENVIRONMENTS + k * samples;
        let inner = exec::map_indexed(samples as usize, |j| {
            let field = sample_coupling_field(region, derive_seed(seed, base + j as u64))
                .expect("validated region");
            let thinned = EdgeEnvironment::from_fn(region, p, |e| {
                dense.is_open(e) && field.value(e).expect("edge of the same region") <= ratio
            })
            .expect("validated parameters");
            count_f64(&thinned, n)
        });
        let estimate = EstimateWithCI::from_samples(&inner, Conditioning::None)?;
        let z = estimate.z_score(target);
        max_abs_z = max_abs_z.max(z.abs());
        identity.push(IdentityCheck {
            target,
            estimate,
            z_score: z,
        });
    }

    Ok(CouplingReport {
        p,
        p2,
        n,
        samples,
        monotonicity_violations,
        identity,
        max_abs_z,
    })
}

/// Exact integration of the conditional-mean identity over every coupled
/// configuration of a small centered region (radius `n`, at most
/// [`MAX_EXHAUSTIVE_EDGES`] edges).
pub fn exhaustive_coupling_check(p: f64, p2: f64, n: u32) -> Result<ExhaustiveCheck> {
    check_pair(p, p2)?;
    if n == 0 {
        return Err(Error::parameter("n", "need at least one step".to_string()));
    }
    let region = Region::centered(Site::origin(), n as i64)?;
    let edges = region.edge_count();
    if edges > MAX_EXHAUSTIVE_EDGES {
        return Err(Error::ResourceBound {
            what: "exhaustive-integration edges",
            requested: edges,
            bound: MAX_EXHAUSTIVE_EDGES,
            guidance: "use n = 1, whose centered region has exactly 12 edges",
        });
    }
    let e = edges as u32;
    let ratio = p / p2;

    // Walk count for every edge subset, indexed by bitmask over region edges.
    let zs: Vec<f64> = (0usize..1 << e)
        .map(|mask| {
            let mut idx = 0;
            let env = EdgeEnvironment::from_fn(region, p, |_| {
                let open = mask >> idx & 1 == 1;
                idx += 1;
                open
            })
            .expect("validated parameters");
            count_f64(&env, n)
        })
        .collect();

    let mut max_abs_error: f64 = 0.0;
    for mask2 in 0usize..1 << e {
        let open2 = mask2.count_ones();
        // Conditional law given the dense configuration: each dense-open
        // edge survives independently with probability p/p2.
        let mut mean = 0.0;
        let mut sub = mask2;
        loop {
            let kept = sub.count_ones();
            mean += ratio.powi(kept as i32) * (1.0 - ratio).powi((open2 - kept) as i32) * zs[sub];
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask2;
        }
        let want = ratio.powi(n as i32) * zs[mask2];
        max_abs_error = max_abs_error.max((mean - want).abs());
    }

    Ok(ExhaustiveCheck {
        edge_count: edges,
        configurations: 1 << e,
        max_abs_error,
    })
}
