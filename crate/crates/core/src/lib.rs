//! Pyramidal co-operative coevolution for nurse scheduling and mall tenant
//! selection.
//!
//! The algorithm core is generic over the scalar type; the aliases below fix
//! it to `f64` for everyday use.

pub mod engine;
pub mod error;
pub mod harness;
pub mod hillclimb;
pub mod mall;
pub mod nurse;
pub mod partnering;
pub mod penalty;
pub mod problem;
pub mod pyramid;
pub mod scalar;

pub use error::{Error, Result};
pub use partnering::StrategyKind;
pub use problem::{LocalSearch, Problem};
pub use pyramid::{LevelFitness, LevelId, LevelSpec, Topology};
pub use scalar::Scalar;

pub type Real = f64;
pub type Evaluation = problem::Evaluation<Real>;
pub type NurseInstance = nurse::NurseInstance<Real>;
pub type MallInstance = mall::MallInstance<Real>;
pub type MallTables = mall::MallTables<Real>;
pub type Genome = engine::Genome<Real>;
pub type SubPopulation = engine::SubPopulation<Real>;
pub type PenaltyState = penalty::PenaltyState<Real>;
pub type RunSummary = engine::RunSummary<Real>;
pub type NurseHillClimber<'a> = hillclimb::NurseHillClimber<'a, Real>;
