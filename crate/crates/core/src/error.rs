use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty population")]
    EmptyPopulation,
    #[error("incompatible genomes: {0}")]
    IncompatibleGenomes(String),
    #[error("infeasible slot domain at slot {0}")]
    InfeasibleSlotDomain(usize),
    #[error("underfilled generation: need {needed} children, got {got}")]
    UnderfilledGeneration { needed: usize, got: usize },
    #[error("nurse topology requires three grades, instance has {0}")]
    NurseTopologyGrades(usize),
    #[error("mall topology requires five areas, instance has {0}")]
    MallTopologyAreas(usize),
    #[error("non-nested levels: {lower} is not contained in {higher}")]
    NonNestedLevels { lower: String, higher: String },
    #[error("unknown level {0}")]
    UnknownLevel(usize),
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("strategy D requires a toroidal grid")]
    MissingGrid,
    #[error("empty partner pool")]
    EmptyPartnerPool,
    #[error("sparse grid: no partner at or around cell ({0}, {1})")]
    SparseGrid(usize, usize),
    #[error("infeasible pattern {pattern} for nurse {nurse}")]
    InfeasiblePattern { nurse: usize, pattern: usize },
    #[error("invalid shop type {shop_type} at location {location}")]
    InvalidShopType { location: usize, shop_type: usize },
    #[error("slot mismatch: {0}")]
    SlotMismatch(String),
    #[error("negative violation {0}")]
    NegativeViolation(f64),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
