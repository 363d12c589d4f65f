//! Environments conditioned on a path: the path's edges are forced open,
//! everything else stays an independent Bernoulli field. Includes the
//! entry-segment extraction that locates the steps a walk spends approaching
//! a given block.

use crate::environment::{sample_environment, EdgeEnvironment};
use crate::lattice::{block_of_edge, BlockCoord, Edge, Region};
use crate::walks::Path;
use crate::{Error, Result};

/// The conditioned edge law: `forced` edges are open with probability 1,
/// all others are independent Bernoulli(p).
#[derive(Clone, Debug)]
pub struct ConditionalEnv {
    p: f64,
    forced: Vec<Edge>,
}

impl ConditionalEnv {
    pub fn new(p: f64, forced: Vec<Edge>) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::parameter("p", "must lie strictly in (0, 1)"));
        }
        let mut forced = forced;
        forced.sort_unstable();
        forced.dedup();
        Ok(ConditionalEnv { p, forced })
    }

    /// Condition on every edge of a path being open.
    pub fn from_path(p: f64, path: &Path) -> Result<Self> {
        Self::new(p, path.edges().collect())
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn forced_edges(&self) -> &[Edge] {
        &self.forced
    }

    /// Draw one environment from the conditioned law; deterministic per
    /// seed, and identical to the unconditioned draw off the forced set.
    pub fn sample(&self, region: Region, seed: u64) -> Result<EdgeEnvironment> {
        for e in &self.forced {
            if !region.contains_edge(*e) {
                return Err(Error::RegionCoverage(format!(
                    "the forced edge anchored at ({},{})",
                    e.anchor.x, e.anchor.y
                )));
            }
        }
        let mut env = sample_environment(region, self.p, seed)?;
        for e in &self.forced {
            env.set_edge(*e, true)?;
        }
        Ok(env)
    }
}

/// The `n0` steps a walk takes just before first touching a block's own
/// edge set. For the origin block the walk's first `n0` steps are used
/// instead. All returned edges lie in the block's 3x3 neighborhood.
pub fn entry_segment(s: &Path, block: BlockCoord) -> Result<Path> {
    let n0 = block.n0 as usize;
    let sites = s.sites();
    if block.is_origin_block() {
        if s.len() < n0 {
            return Err(Error::parameter(
                "path",
                format!("needs at least {n0} steps for an entry segment"),
            ));
        }
        return Ok(Path::from_trusted(sites[..=n0].to_vec()));
    }
    let mut first_hit = None;
    for (i, e) in s.edges().enumerate() {
        let b = block_of_edge(e, block.n0)?;
        if b == block {
            first_hit = Some(i);
            break;
        }
    }
    let tau = match first_hit {
        Some(i) => i,
        None => return Err(Error::BlockNotVisited(block.bx, block.by)),
    };
    if tau < n0 {
        return Err(Error::parameter(
            "path",
            format!("enters the block after {tau} steps, fewer than n0 = {n0}"),
        ));
    }
    Ok(Path::from_trusted(sites[tau - n0..=tau].to_vec()))
}
