use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate hull: the generators project into a line through the origin")]
    DegenerateHull,
    #[error("point set is not closed under negation")]
    NotSymmetric,
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("point {0} lies outside the unit ball of the norm")]
    OutsideQ(String),
    #[error("point {0} lies outside the ball of radius {1}")]
    OutsideBall(String, String),
    #[error("atlas inconsistency: {0}")]
    AtlasInconsistency(String),
    #[error("distance inconsistency: {0}")]
    ConsistencyError(String),
    #[error("memory budget exceeded: estimated {estimate} bytes for the ball, budget is {budget} bytes")]
    MemoryBudgetExceeded { estimate: u64, budget: u64 },
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("region is not contained in the unit ball of the norm")]
    RegionOutsideQ,
    #[error("invalid generating set: {0}")]
    InvalidGenerator(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
