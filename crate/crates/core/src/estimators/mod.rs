//! Statistical front-end: growth-rate series, fractional moments, coupling
//! experiments, and β-monotonicity, each with confidence intervals.
//!
//! Every estimator maps a pure function over sample indices (seed derived per
//! index) and reduces with a fixed pairwise tree, so results are bit-identical
//! for any thread count.

mod beta;
mod coupling;
mod fractional;
mod growth;

pub use beta::{beta_monotonicity, BetaReport};
pub use coupling::{
    coupling_experiment, exhaustive_coupling_check, CouplingReport, ExhaustiveCheck, IdentityCheck,
    MAX_EXHAUSTIVE_EDGES,
};
pub use fractional::{fractional_moment, FractionalReport};
pub use growth::{annealed_growth, quenched_growth, GrowthRow, GrowthSeries};

use serde::Serialize;

use crate::exec;
use crate::{Error, Result};

/// Which environments a quenched average retains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conditioning {
    /// Keep every sample.
    None,
    /// Keep samples with at least one open walk of the requested length
    /// (checkable exactly; the default).
    PositiveZ,
    /// Keep samples whose origin cluster reaches the region boundary (a
    /// finite-volume proxy for membership in the infinite cluster).
    OriginInGiant,
}

impl std::fmt::Display for Conditioning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Conditioning::None => "none",
            Conditioning::PositiveZ => "positive_z",
            Conditioning::OriginInGiant => "origin_in_giant",
        })
    }
}

/// A Monte Carlo point estimate with its standard error.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EstimateWithCI {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n_samples)`.
    pub std_error: f64,
    pub n_samples: u64,
    pub conditioning: Conditioning,
}

impl EstimateWithCI {
    /// Summarize a batch; at least two samples are required for a standard
    /// error.
    pub fn from_samples(xs: &[f64], conditioning: Conditioning) -> Result<Self> {
        if xs.len() < 2 {
            return Err(Error::ConditioningStarved(xs.len() as u64));
        }
        let m = exec::moments(xs);
        Ok(EstimateWithCI {
            mean: m.mean,
            std_error: m.se_mean,
            n_samples: m.n,
            conditioning,
        })
    }

    /// Signed distance of `target` from the mean in standard-error units;
    /// zero spread yields 0 on exact agreement and infinity otherwise.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = self.mean - target;
        if self.std_error > 0.0 {
            d / self.std_error
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY * d.signum()
        }
    }

    /// Is `target` within `k` standard errors of the mean?
    pub fn within(&self, target: f64, k: f64) -> bool {
        self.z_score(target).abs() <= k
    }
}

pub(crate) fn check_probability(name: &'static str, p: f64, allow_one: bool) -> Result<()> {
    let ok = p > 0.0 && (p < 1.0 || (allow_one && p == 1.0));
    if !ok {
        let range = if allow_one { "(0, 1]" } else { "(0, 1)" };
        return Err(Error::parameter(name, format!("{p} is outside {range}")));
    }
    Ok(())
}

pub(crate) fn check_samples(samples: u64, min: u64) -> Result<()> {
    if samples < min {
        return Err(Error::parameter(
            "samples",
            format!("{samples} is below the minimum {min}"),
        ));
    }
    Ok(())
}
