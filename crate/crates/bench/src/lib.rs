//! Shared inputs for the engine benchmarks.

use fqlat_core::field::field_of_discriminant;
use fqlat_core::place::parse_places;
use fqlat_core::{FinitePlace, RealQuadraticField};

/// Field and ramification set for a benchmark case.
pub fn case(d: i64, rf: &str) -> (RealQuadraticField, Vec<FinitePlace>) {
    let k = field_of_discriminant(d).expect("fundamental discriminant");
    let rf = parse_places(&k, rf).expect("valid places");
    (k, rf)
}
