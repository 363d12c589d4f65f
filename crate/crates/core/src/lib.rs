//! Exact enumeration and Monte Carlo tooling for self-avoiding walks and
//! lattice trees on the square lattice, with and without random dilution.
//!
//! The crate is organized around a pipeline:
//!
//! * [`lattice`] — sites, anchored edges, rectangular regions, block geometry;
//! * [`environment`] — coupled Bernoulli bond environments, cluster labeling,
//!   and site potentials, all reproducible from `(region, seed)`;
//! * [`walks`] — depth-first enumeration: walk counts, open-walk counts,
//!   lattice trees, end-to-end statistics, weighted partition functions;
//! * [`coarsegrain`] — block animals of walks, animal enumeration, separated
//!   sub-animals, and the animal decomposition of open-walk counts;
//! * [`reweight`] — change-of-measure densities: exponential edge tilts,
//!   pair-interaction quadratic forms, conditional environments, and the
//!   two-percolation-parameter comparison bundle;
//! * [`estimators`] — seed-deterministic Monte Carlo front ends with
//!   confidence intervals and serializable reports.
//!
//! Everything is deterministic given a seed: per-edge and per-site randomness
//! comes from a counter-based mix of `(seed, coordinate)`, Monte Carlo samples
//! from per-index derived streams, and floating-point reductions use a fixed
//! pairwise tree. Results are identical for any thread count, including the
//! non-`parallel` build.

pub mod coarsegrain;
pub mod environment;
mod error;
pub mod estimators;
pub mod exec;
pub mod lattice;
pub mod reweight;
pub mod rng;
pub mod walks;

pub use error::{Error, Result};
