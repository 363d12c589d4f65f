//! Reweighting for walks confined to a box of radius `n^alpha`: the edge
//! law inside the box is thinned from `p` to `p' = p(1 - n^(-d*alpha/2))`,
//! which buys an exponential tilt factor at a bounded density cost.

use crate::{Error, Result};

/// Parameters of the confined-box reweighting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FredoSpec {
    p: f64,
    n: u32,
    alpha: f64,
    d: u32,
}

/// The analytic outputs of the reweighting: the thinned parameter, the tilt
/// factor gained, and bounds/values for the density cost.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FredoBundle {
    /// Thinned open probability `p' = p (1 - n^(-d alpha / 2))`.
    pub p_prime: f64,
    /// Gained factor `exp(-n^(1 - d alpha / 2))`.
    pub tilt_factor: f64,
    /// Dimension-generic density-cost bound `exp(d 2^(d+2) (p + p^2/(1-p)))`.
    pub density_cost_bound: f64,
    /// Number of edges in the confining box (2-dimensional case).
    pub box_edge_count: u64,
    /// Exact density cost `E[dP/dP'] = (p^2/p' + (1-p)^2/(1-p'))^(box edges)`
    /// for the 2-dimensional box.
    pub density_cost_exact: f64,
}

impl FredoSpec {
    pub fn new(p: f64, n: u32, alpha: f64, d: u32) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::parameter("p", "must lie strictly in (0, 1)"));
        }
        if n < 2 {
            return Err(Error::parameter("n", "need at least 2 steps"));
        }
        if d == 0 {
            return Err(Error::parameter("d", "dimension must be positive"));
        }
        if !(alpha > 0.0) {
            return Err(Error::parameter(
                "alpha",
                "must be positive; alpha = 0 would thin the law to p' = 0",
            ));
        }
        if d as f64 * alpha >= 2.0 {
            return Err(Error::parameter(
                "alpha",
                format!("d * alpha = {} must stay below 2", d as f64 * alpha),
            ));
        }
        Ok(FredoSpec { p, n, alpha, d })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Confinement radius `⌊n^alpha⌋`.
    pub fn radius(&self) -> i64 {
        (self.n as f64).powf(self.alpha).floor() as i64
    }

    pub fn p_prime(&self) -> f64 {
        self.p * (1.0 - (self.n as f64).powf(-(self.d as f64) * self.alpha / 2.0))
    }

    /// Full analytic bundle.
    pub fn bundle(&self) -> FredoBundle {
        let nf = self.n as f64;
        let d = self.d as f64;
        let p = self.p;
        let p_prime = self.p_prime();
        let tilt_factor = (-nf.powf(1.0 - d * self.alpha / 2.0)).exp();
        let density_cost_bound = (d * 2f64.powi(self.d as i32 + 2) * (p + p * p / (1.0 - p))).exp();
        // 2-dimensional box of side L = 2 radius + 1: d L^(d-1) (L-1) edges.
        let l = 2 * self.radius() + 1;
        let box_edge_count = 2 * (l as u64) * (l as u64 - 1);
        let per_edge = p * p / p_prime + (1.0 - p) * (1.0 - p) / (1.0 - p_prime);
        let density_cost_exact = per_edge.powf(box_edge_count as f64);
        FredoBundle {
            p_prime,
            tilt_factor,
            density_cost_bound,
            box_edge_count,
            density_cost_exact,
        }
    }
}
