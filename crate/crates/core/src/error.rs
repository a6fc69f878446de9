use thiserror::Error;

use crate::dist::Dist;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("negative distance {0}")]
    NegativeDistance(String),

    #[error("distance matrix is not square: {points} points but row {row} has {len} entries")]
    NotSquare { points: usize, row: usize, len: usize },

    #[error("duplicate point id {0:?}")]
    DuplicateId(String),

    #[error("unknown point id {0:?}")]
    UnknownId(String),

    #[error("space is not a metric ({0} violations)")]
    NotMetric(usize),

    #[error("space is not an ultrametric: d({x},{z}) exceeds max(d({x},{y}), d({y},{z}))")]
    NotUltrametric { x: String, y: String, z: String },

    #[error("distance d({a},{b}) = {value} is not a non-negative integer")]
    NonIntegral { a: String, b: String, value: Dist },

    #[error("distance d({a},{b}) = {value} is not in the allowed value set")]
    OutsideValueSet { a: String, b: String, value: Dist },

    #[error("scale must be positive, got {0}")]
    NonPositiveScale(Dist),

    #[error("projection is not surjective: base point {0:?} has an empty fiber")]
    NotSurjective(String),

    #[error("map of length {got} does not cover {expected} points")]
    MapLength { expected: usize, got: usize },

    #[error("map sends distinct points {a:?} and {b:?} to the same image")]
    NotInjective { a: String, b: String },

    #[error("fiber over {fiber:?} has diameter {diameter} exceeding the bound {bound} imposed by {neighbor:?}")]
    FiberTooWide { fiber: String, diameter: Dist, bound: Dist, neighbor: String },

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("section point index {index} is outside the fiber over {base:?}")]
    SectionOutsideFiber { base: String, index: usize },

    #[error("subset {0} is empty")]
    EmptySubset(usize),

    #[error("subsets {0} and {1} are equal")]
    DuplicateSubset(usize, usize),

    #[error("diameter {diameter} does not equal the top scale {top}")]
    DiameterMismatch { diameter: Dist, top: Dist },

    #[error("{got} points exceed the allowed {allowed}")]
    TooManyPoints { allowed: usize, got: usize },

    #[error("size guard exceeded: {0}")]
    Guard(String),

    #[error("value set mismatch: {0}")]
    ValueSetMismatch(String),

    #[error("invalid value set: {0}")]
    InvalidValueSet(String),

    #[error("part {part} map is not isometric at ({a}, {b})")]
    NotIsometric { part: usize, a: String, b: String },

    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),

    #[error("support reaches coordinate {coordinate} beyond the filtration depth {depth}")]
    BeyondTruncation { coordinate: u32, depth: u32 },

    #[error("filtration provides {available} tag bits at scale {scale} but {needed} are required")]
    CapacityViolated { scale: u64, needed: u32, available: u32 },

    #[error("filtration too shallow: no fresh coordinate at or above scale {0}")]
    FiltrationTooShallow(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
