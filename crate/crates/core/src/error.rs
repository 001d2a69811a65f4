use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("illegal type {0}")]
    IllegalType(String),
    #[error("mirror root is zero")]
    ZeroMirror,
    #[error("root system is decomposable")]
    Decomposable,
    #[error("root set is not closed under its own reflections")]
    NotClosed,
    #[error("diagram is disconnected")]
    Disconnected,
    #[error("diagram is not parabolic")]
    NotParabolic,
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("infinite (bold) label not allowed here")]
    InfiniteLabel,
    #[error("degenerate chamber: {0}")]
    DegenerateChamber(String),
    #[error("chamber component is not a simplex")]
    NotSimplex,
    #[error("vertex is not special")]
    NotSpecial,
    #[error("vector is not a root of the host system")]
    NotHostRoot,
    #[error("rank {0} is beyond the supported bound of 8")]
    RankTooLarge(usize),
    #[error("records belong to different hosts")]
    HostMismatch,
    #[error("components are not mutually orthogonal")]
    NotOrthogonal,
    #[error("no additional root for component type {0}")]
    BadThetaPrime(String),
    #[error("cutting root forms an acute angle with {0}")]
    AcuteAngle(String),
    #[error("volume ratio {0} is not an integer")]
    NonIntegerRatio(String),
    #[error("chamber is unbounded")]
    UnboundedChamber,
    #[error("tiling search exceeded cap of {0} alcoves")]
    CapExceeded(usize),
    #[error("type has no exceptional self-similar subgroup: {0}")]
    NotExceptionalType(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("manifest error: {0}")]
    Manifest(String),
    #[error("json error: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
