//! Monotonicity in the inverse temperature of the normalized square-root
//! moment `E[(Z_N(beta) e^{-(N+1) log_mgf(beta)})^{1/2}]`.
//!
//! A length-N path carries the potential of N+1 sites (the start included),
//! so one mgf factor per site makes the normalized partition function
//! mean-s_N at every beta. Under that normalization the square-root moment
//! is non-increasing in beta: the walk part by an FKG argument, the start
//! site's factor `exp(log_mgf(beta/2) - log_mgf(beta)/2)` by convexity.
//! Normalizing by only N factors would leave a growing `exp(log_mgf(beta/2))`
//! behind and break monotonicity at small N.
//!
//! All betas are evaluated on the same sampled potentials, so consecutive
//! differences are paired and their standard errors shrink with the shared
//! noise.

use serde::Serialize;

use super::{check_samples, Conditioning, EstimateWithCI};
use crate::environment::{sample_potential, DistributionSpec};
use crate::exec;
use crate::lattice::{Region, Site};
use crate::rng::derive_seed;
use crate::walks::log_partition_function;
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct BetaReport {
    pub law: DistributionSpec,
    pub n: u32,
    pub samples: u64,
    pub betas: Vec<f64>,
    /// Per-beta estimate of the normalized square-root moment.
    pub estimates: Vec<EstimateWithCI>,
    /// Paired drop from each beta to the next (positive mean = decreasing).
    pub consecutive_drops: Vec<EstimateWithCI>,
    /// Every consecutive drop is nonnegative within three standard errors.
    pub non_increasing_within_ci: bool,
}

pub fn beta_monotonicity(
    law: DistributionSpec,
    betas: &[f64],
    n: u32,
    samples: u64,
    seed: u64,
) -> Result<BetaReport> {
    law.validate()?;
    check_samples(samples, 2)?;
    if n == 0 {
        return Err(Error::parameter("n", "need at least one step".to_string()));
    }
    if betas.is_empty() {
        return Err(Error::parameter("betas", "grid is empty".to_string()));
    }
    for pair in betas.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::parameter(
                "betas",
                format!(
                    "grid must be strictly ascending, got {} then {}",
                    pair[0], pair[1]
                ),
            ));
        }
    }
    if betas.iter().any(|b| !b.is_finite() || *b < 0.0) {
        return Err(Error::parameter(
            "betas",
            "entries must be finite and nonnegative".to_string(),
        ));
    }
    let region = Region::centered(Site::origin(), n as i64)?;
    let lambdas: Vec<f64> = betas.iter().map(|&b| law.log_mgf(b)).collect();

    // One row of values per sample, one column per beta.
    let rows: Vec<Vec<f64>> = exec::map_indexed(samples as usize, |i| {
        let pot = sample_potential(region, law, derive_seed(seed, i as u64))
            .expect("validated parameters");
        betas
            .iter()
            .zip(&lambdas)
            .map(|(&b, &lam)| {
                let lz = log_partition_function(&pot, b, n).expect("region contains the walk ball");
                (0.5 * (lz - (n + 1) as f64 * lam)).exp()
            })
            .collect()
    });

    let mut estimates = Vec::with_capacity(betas.len());
    for k in 0..betas.len() {
        let col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
        estimates.push(EstimateWithCI::from_samples(&col, Conditioning::None)?);
    }
    let mut consecutive_drops = Vec::new();
    let mut non_increasing = true;
    for k in 0..betas.len().saturating_sub(1) {
        let diffs: Vec<f64> = rows.iter().map(|r| r[k] - r[k + 1]).collect();
        let d = EstimateWithCI::from_samples(&diffs, Conditioning::None)?;
        if d.mean < -3.0 * d.std_error {
            non_increasing = false;
        }
        consecutive_drops.push(d);
    }

    Ok(BetaReport {
        law,
        n,
        samples,
        betas: betas.to_vec(),
        estimates,
        consecutive_drops,
        non_increasing_within_ci: non_increasing,
    })
}
