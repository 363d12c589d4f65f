//! Partition functions for walks in a site potential: each self-avoiding
//! path picks up weight `exp(beta * sum of the potential over its sites)`.

use crate::environment::SitePotential;
use crate::lattice::Site;
use crate::{Error, Result};

use super::enumerate_paths;

/// Sum of terms given by their logarithms, kept as `scale * sum` with
/// `log_scale` tracked separately so the total never overflows. Additions use
/// Kahan compensation; when `beta == 0` every term is exactly 1.0 and integer
/// totals below 2^53 come out bit-exact.
struct ScaledSum {
    log_scale: f64,
    sum: f64,
    comp: f64,
    empty: bool,
}

impl ScaledSum {
    fn new() -> Self {
        ScaledSum {
            log_scale: 0.0,
            sum: 0.0,
            comp: 0.0,
            empty: true,
        }
    }

    fn kahan_add(&mut self, v: f64) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    fn add_log(&mut self, w: f64) {
        if self.empty {
            // Anchor the scale at the first term so uniformly tiny or huge
            // weights never leave the representable range.
            self.empty = false;
            self.log_scale = w;
            self.kahan_add(1.0);
            return;
        }
        let rel = w - self.log_scale;
        if rel > 600.0 {
            // Rescale so the incoming term becomes 1.0; everything summed so
            // far shrinks accordingly (often to zero, which is the right
            // relative weight at this magnitude gap).
            let shrink = (self.log_scale - w).exp();
            self.sum *= shrink;
            self.comp *= shrink;
            self.log_scale = w;
            self.kahan_add(1.0);
        } else {
            self.kahan_add(rel.exp());
        }
    }

    fn value(&self) -> f64 {
        self.log_scale.exp() * self.sum
    }

    fn log_value(&self) -> f64 {
        self.log_scale + self.sum.ln()
    }
}

fn accumulate(pot: &SitePotential, beta: f64, n: u32) -> Result<ScaledSum> {
    if !beta.is_finite() {
        return Err(Error::parameter("beta", "must be finite"));
    }
    if !pot.region().contains_ball(Site::origin(), n as i64) {
        return Err(Error::RegionCoverage(format!(
            "the radius-{n} ball around the origin"
        )));
    }
    let mut acc = ScaledSum::new();
    let _ = enumerate_paths(
        Site::origin(),
        n,
        |_, _| true,
        |sites| {
            let mut field = 0.0;
            for &s in sites {
                field += pot
                    .value(s)
                    .expect("ball-coverage check admits every path site");
            }
            acc.add_log(beta * field);
            std::ops::ControlFlow::<()>::Continue(())
        },
    );
    Ok(acc)
}

/// Partition function of `n`-step self-avoiding walks from the origin:
/// the sum over paths of `exp(beta * field sum)`. May overflow to infinity
/// for large `beta * n`; prefer [`log_partition_function`] then.
pub fn partition_function(pot: &SitePotential, beta: f64, n: u32) -> Result<f64> {
    Ok(accumulate(pot, beta, n)?.value())
}

/// Logarithm of [`partition_function`], stable for any `beta * n`.
pub fn log_partition_function(pot: &SitePotential, beta: f64, n: u32) -> Result<f64> {
    Ok(accumulate(pot, beta, n)?.log_value())
}
