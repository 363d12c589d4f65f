//! Site-potential analogues of the edge machinery: an exponential tilt of
//! the field on an animal's blocks and a neighborhood quadratic form in the
//! site variables.

use crate::coarsegrain::Animal;
use crate::environment::{DistributionSpec, SitePotential};
use crate::lattice::{block_sites, neighborhood_sites, BlockCoord, Site};
use crate::{Error, Result};

/// The canonical tilt size `1/n0`.
pub fn default_site_delta(n0: i64) -> Result<f64> {
    if n0 < 1 {
        return Err(Error::parameter("n0", "block side must be at least 1"));
    }
    Ok(1.0 / n0 as f64)
}

fn animal_sites(animal: &Animal, n0: i64) -> Result<Vec<Site>> {
    let mut sites = Vec::with_capacity(animal.size() * (n0 * n0) as usize);
    for b in animal.block_coords(n0)? {
        sites.extend(block_sites(b));
    }
    Ok(sites)
}

/// Density shifting the field downward on the animal's block sites:
/// `exp(-delta * sum of the field - m n0^2 log_mgf(-delta))`.
/// Its mean over fields is exactly 1.
pub fn potential_tilt_density(
    pot: &SitePotential,
    animal: &Animal,
    n0: i64,
    delta: f64,
) -> Result<f64> {
    if !delta.is_finite() {
        return Err(Error::parameter("delta", "must be finite"));
    }
    let sites = animal_sites(animal, n0)?;
    let mut field = 0.0;
    for s in &sites {
        field += pot
            .value(*s)
            .ok_or_else(|| Error::RegionCoverage(format!("the tilted site ({},{})", s.x, s.y)))?;
    }
    let lam = pot.law().log_mgf(-delta);
    Ok((-delta * field - sites.len() as f64 * lam).exp())
}

/// `E[1/f_A] = exp(m n0^2 (log_mgf(delta) + log_mgf(-delta)))`.
pub fn potential_inverse_moment(law: DistributionSpec, m: u32, n0: i64, delta: f64) -> Result<f64> {
    law.validate()?;
    if m == 0 {
        return Err(Error::parameter("m", "an animal has at least one cell"));
    }
    if n0 < 1 {
        return Err(Error::parameter("n0", "block side must be at least 1"));
    }
    if !delta.is_finite() {
        return Err(Error::parameter("delta", "must be finite"));
    }
    let cells = (m as f64) * (n0 * n0) as f64;
    Ok((cells * (law.log_mgf(delta) + law.log_mgf(-delta))).exp())
}

/// Normalized pair sum of site values: `(1/(n0 sqrt(ln n0))) * sum over
/// ordered pairs of distinct points of v v' / dist`.
pub fn site_pair_form(points: &[((f64, f64), f64)], n0: i64) -> Result<f64> {
    if n0 < 2 {
        return Err(Error::parameter(
            "n0",
            "block side must be at least 2 so ln(n0) is positive",
        ));
    }
    let norm = 1.0 / (n0 as f64 * (n0 as f64).ln().sqrt());
    Ok(norm * super::weighted_pair_sum(points))
}

/// The site quadratic form over the 3x3 block neighborhood.
pub fn potential_qform(pot: &SitePotential, block: BlockCoord) -> Result<f64> {
    let pts = neighborhood_points(pot, block)?;
    site_pair_form(&pts, block.n0)
}

/// Exact variance of [`potential_qform`] under any unit-variance centered
/// law: `2 * sum over ordered pairs of 1/dist^2 / (n0^2 ln n0)`.
pub fn potential_qform_variance(block: BlockCoord) -> Result<f64> {
    if block.n0 < 2 {
        return Err(Error::parameter(
            "n0",
            "block side must be at least 2 so ln(n0) is positive",
        ));
    }
    let sites = neighborhood_sites(block);
    let mut sq = 0.0;
    for (i, a) in sites.iter().enumerate() {
        for b in &sites[i + 1..] {
            let d2 = ((a.x - b.x) as f64).powi(2) + ((a.y - b.y) as f64).powi(2);
            sq += 1.0 / d2;
        }
    }
    let n0 = block.n0 as f64;
    Ok(2.0 * (2.0 * sq) / (n0 * n0 * n0.ln()))
}

fn neighborhood_points(pot: &SitePotential, block: BlockCoord) -> Result<Vec<((f64, f64), f64)>> {
    let sites = neighborhood_sites(block);
    let mut pts = Vec::with_capacity(sites.len());
    for s in sites {
        let v = pot.value(s).ok_or_else(|| {
            Error::RegionCoverage(format!(
                "the 3x3 site neighborhood of block ({},{})",
                block.bx, block.by
            ))
        })?;
        pts.push(((s.x as f64, s.y as f64), v));
    }
    Ok(pts)
}
