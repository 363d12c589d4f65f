//! Fractional moments `E[Z_N^theta]` of the open walk count.

use num_traits::ToPrimitive;
use serde::Serialize;

use super::{check_probability, check_samples, Conditioning, EstimateWithCI};
use crate::environment::sample_environment;
use crate::exec;
use crate::lattice::{Region, Site};
use crate::rng::derive_seed;
use crate::walks::{count_open_saws, count_saws};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FractionalReport {
    pub p: f64,
    pub theta: f64,
    pub n: u32,
    /// Monte Carlo estimate of `E[Z_N^theta]`.
    pub estimate: EstimateWithCI,
    /// Exact annealed mean `p^N s_N`.
    pub annealed_mean: f64,
    /// Jensen ceiling `(p^N s_N)^theta`; the estimate sits below it when the
    /// environment actually fluctuates.
    pub jensen_bound: f64,
    /// Observed per-step contraction `(E[Z^theta])^{1/(N theta)}` over the
    /// annealed per-step growth `p s_N^{1/N}`.
    pub empirical_b: f64,
}

pub fn fractional_moment(
    p: f64,
    theta: f64,
    n: u32,
    samples: u64,
    seed: u64,
) -> Result<FractionalReport> {
    check_probability("p", p, true)?;
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::parameter(
            "theta",
            format!("{theta} is outside (0, 1]"),
        ));
    }
    check_samples(samples, 2)?;
    if n == 0 {
        return Err(Error::parameter("n", "need at least one step".to_string()));
    }
    let s_n = count_saws(n)?
        .to_f64()
        .expect("walk counts within the length bound fit in f64");
    let region = Region::centered(Site::origin(), n as i64)?;

    let values = exec::map_indexed(samples as usize, |i| {
        let env = sample_environment(region, p, derive_seed(seed, i as u64))
            .expect("validated parameters");
        let z = count_open_saws(&env, Site::origin(), n)
            .expect("region contains the walk ball")
            .to_f64()
            .expect("open walk counts fit in f64");
        z.powf(theta)
    });
    let estimate = EstimateWithCI::from_samples(&values, Conditioning::None)?;

    let annealed_mean = p.powi(n as i32) * s_n;
    let nf = n as f64;
    let empirical_b = estimate.mean.powf(1.0 / (nf * theta)) / (p * s_n.powf(1.0 / nf));
    Ok(FractionalReport {
        p,
        theta,
        n,
        estimate,
        annealed_mean,
        jensen_bound: annealed_mean.powf(theta),
        empirical_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_density_is_deterministic() {
        // p = 1, theta = 1/2: every sample is exactly sqrt(s_N).
        let r = fractional_moment(1.0, 0.5, 4, 10, 7).unwrap();
        assert_eq!(r.estimate.std_error, 0.0);
        assert!((r.estimate.mean - 10.0).abs() < 1e-12); // sqrt(100)
        assert!((r.empirical_b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_theta_recovers_the_annealed_mean() {
        let r = fractional_moment(0.7, 1.0, 4, 4000, 13).unwrap();
        assert!(r.estimate.within(r.annealed_mean, 3.5));
        assert_eq!(r.jensen_bound, r.annealed_mean);
    }

    #[test]
    fn jensen_direction_in_dilution() {
        let r = fractional_moment(0.6, 0.5, 6, 4000, 17).unwrap();
        // Strictly below the Jensen ceiling, by far more than noise.
        assert!(r.estimate.mean + 3.0 * r.estimate.std_error < r.jensen_bound);
        assert!(r.empirical_b < 1.0);
    }

    #[test]
    fn parameter_validation() {
        assert!(fractional_moment(0.5, 0.0, 4, 100, 1).is_err());
        assert!(fractional_moment(0.5, 1.5, 4, 100, 1).is_err());
        assert!(fractional_moment(0.0, 0.5, 4, 100, 1).is_err());
        assert!(fractional_moment(0.5, 0.5, 0, 100, 1).is_err());
        assert!(fractional_moment(0.5, 0.5, 4, 1, 1).is_err());
    }
}
