//! Exact classification engine for arithmetic lattices of fake quadrics over
//! real quadratic fields.

pub mod arith;
pub mod bounds;
pub mod chi;
pub mod classify;
pub mod error;
pub mod field;
pub mod forms;
pub mod linalg;
pub mod place;
pub mod reconcile;
pub mod report;
pub mod squares;
pub mod torsion;
pub mod units;
pub mod witness;

pub use chi::{ExactChi, LatticeSpec};
pub use error::{Error, Result};
pub use field::{make_field, FieldElement, FundamentalUnitData, RealQuadraticField};
pub use forms::ClassGroupData;
pub use place::{Conj, FinitePlace, LocalSplitting, SplitKind};
pub use squares::SquareClassGroup;
pub use torsion::TorsionReport;
pub use classify::{CandidateClass, Status};
pub use witness::WitnessTable;
pub use bounds::{BoundsReport, Interval, OdlyzkoTable};
pub use reconcile::Reconciliation;
