use crate::lattice::Site;

/// Crate-wide error type. Variants are grouped by how a driver should react:
/// bad inputs (`Parameter`, `NotAdjacent`, geometry errors), region-coverage
/// failures, enforced resource bounds, and data-dependent starvation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("sites ({},{}) and ({},{}) are not nearest neighbors", .0.x, .0.y, .1.x, .1.y)]
    NotAdjacent(Site, Site),

    #[error("distance between identical edges is undefined")]
    IdenticalEdges,

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("region bounds invalid: {0}")]
    RegionBounds(String),

    #[error("region does not cover {0}")]
    RegionCoverage(String),

    #[error("{what} {requested} exceeds the supported bound {bound}; {guidance}")]
    ResourceBound {
        what: &'static str,
        requested: u64,
        bound: u64,
        guidance: &'static str,
    },

    #[error("conditioning rule rejected all {0} samples")]
    ConditioningStarved(u64),

    #[error("a zero-length walk has no block animal")]
    EmptyPath,

    #[error("walk never enters block ({0},{1})")]
    BlockNotVisited(i64, i64),

    #[error("malformed environment data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parameter(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
