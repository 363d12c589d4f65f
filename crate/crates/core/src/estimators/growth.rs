//! Annealed and quenched per-step growth of the number of open walks.
//!
//! The annealed column is exact: the mean number of open length-N walks in a
//! density-p environment is p^N times the full walk count, so its per-step
//! log is `log p + (1/N) log s_N`. The quenched column is the Monte Carlo
//! average of `(1/N) log Z_N` over retained environments — a finite-N proxy
//! for the almost-sure growth rate, which is a limit this artifact does not
//! extrapolate.

use num_traits::ToPrimitive;
use serde::Serialize;

use super::{check_probability, check_samples, Conditioning};
use crate::environment::{origin_in_giant, sample_environment};
use crate::exec;
use crate::lattice::{Region, Site};
use crate::rng::derive_seed;
use crate::walks::{open_saw_series, saw_series};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GrowthRow {
    pub n: u32,
    /// Exact per-step annealed log-growth `log p + (1/N) log s_N`.
    pub annealed: f64,
    pub quenched_mean: Option<f64>,
    pub quenched_se: Option<f64>,
    /// `annealed - quenched_mean`; nonnegative in expectation by Jensen.
    pub gap: Option<f64>,
    /// Fraction of raw samples the conditioning rule retained for this N.
    pub retention: Option<f64>,
    pub retained: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthSeries {
    pub p: f64,
    pub conditioning: Conditioning,
    /// Raw environment samples drawn (0 for the exact annealed-only series).
    pub samples: u64,
    pub rows: Vec<GrowthRow>,
}

impl GrowthSeries {
    pub fn row(&self, n: u32) -> Option<&GrowthRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

fn annealed_column(p: f64, n_max: u32) -> Result<Vec<(u32, f64)>> {
    let series = saw_series(n_max)?;
    let mut out = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let s = series
            .count(n)
            .to_f64()
            .expect("walk counts within the length bound fit in f64");
        out.push((n, p.ln() + s.ln() / n as f64));
    }
    Ok(out)
}

/// Exact annealed growth series; quenched columns are absent.
pub fn annealed_growth(p: f64, n_max: u32) -> Result<GrowthSeries> {
    check_probability("p", p, true)?;
    let rows = annealed_column(p, n_max)?
        .into_iter()
        .map(|(n, annealed)| GrowthRow {
            n,
            annealed,
            quenched_mean: None,
            quenched_se: None,
            gap: None,
            retention: None,
            retained: None,
        })
        .collect();
    Ok(GrowthSeries {
        p,
        conditioning: Conditioning::None,
        samples: 0,
        rows,
    })
}

/// Monte Carlo quenched growth series over `samples` environments, with the
/// exact annealed column alongside. Retention is per N: a sample enters the
/// length-N average only if the conditioning rule accepts it (for
/// [`Conditioning::PositiveZ`], if it has an open length-N walk).
pub fn quenched_growth(
    p: f64,
    n_max: u32,
    samples: u64,
    seed: u64,
    conditioning: Conditioning,
) -> Result<GrowthSeries> {
    check_probability("p", p, true)?;
    check_samples(samples, 100)?;
    let annealed = annealed_column(p, n_max)?;
    let region = Region::centered(Site::origin(), n_max as i64)?;

    // Per sample: (1/N) log Z_N for each N, NaN marking a rejected sample.
    let logs: Vec<Vec<f64>> = exec::map_indexed(samples as usize, |i| {
        let env = sample_environment(region, p, derive_seed(seed, i as u64))
            .expect("validated parameters");
        let giant = match conditioning {
            Conditioning::OriginInGiant => {
                origin_in_giant(&env).expect("region is centered on the origin")
            }
            _ => true,
        };
        let series =
            open_saw_series(&env, Site::origin(), n_max).expect("region contains the walk ball");
        (1..=n_max)
            .map(|n| {
                let z = series
                    .count(n)
                    .to_f64()
                    .expect("open walk counts fit in f64");
                let keep = giant
                    && match conditioning {
                        Conditioning::PositiveZ => z > 0.0,
                        _ => true,
                    };
                if keep {
                    z.ln() / n as f64
                } else {
                    f64::NAN
                }
            })
            .collect()
    });

    let mut rows = Vec::with_capacity(n_max as usize);
    for (idx, &(n, ann)) in annealed.iter().enumerate() {
        let kept: Vec<f64> = logs
            .iter()
            .map(|l| l[idx])
            .filter(|v| !v.is_nan())
            .collect();
        if kept.len() < 2 {
            return Err(Error::ConditioningStarved(samples));
        }
        let m = exec::moments(&kept);
        rows.push(GrowthRow {
            n,
            annealed: ann,
            quenched_mean: Some(m.mean),
            quenched_se: Some(m.se_mean),
            gap: Some(ann - m.mean),
            retention: Some(kept.len() as f64 / samples as f64),
            retained: Some(kept.len() as u64),
        });
    }
    Ok(GrowthSeries {
        p,
        conditioning,
        samples,
        rows,
    })
}
