//! Change-of-measure machinery: exponential tilts of the edge law on an
//! animal's blocks, the neighborhood quadratic form with its indicator
//! density, environments conditioned on an open path, the confined-box
//! reweighting bundle, and the site-potential analogues of all of these.
//!
//! Every bound-producing operation returns the analytic bound alongside the
//! exact quantity so callers can assert inequalities instead of replaying
//! the derivation.

mod conditional;
mod fredo;
mod potential;
mod qform;
mod tilt;

pub use conditional::{entry_segment, ConditionalEnv};
pub use fredo::{FredoBundle, FredoSpec};
pub use potential::{
    default_site_delta, potential_inverse_moment, potential_qform, potential_qform_variance,
    potential_tilt_density, site_pair_form,
};
pub use qform::{
    asymptotic_block_side, ballistic_per_edge_minimum, separated_density, weighted_pair_sum,
    QFormSpec, DEFAULT_K, EMPIRICAL_C1,
};
pub use tilt::{
    animal_block_edges, inverse_moment_small, sample_tilted, small_tilt_density, tilt_lambda,
    InverseMoment, TiltSpec,
};
